use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::Zero;

use super::{ExactError, Poly, Rational, Var};

/// Rational function `num/den` in lowest terms with a monic denominator.
///
/// Because the normal form is unique, equality of values is structural equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    /// Builds and normalizes `num/den`.
    pub fn new(num: Poly, den: Poly) -> Result<Self, ExactError> {
        if num.var() != den.var() {
            return Err(ExactError::VariableMismatch { left: num.var(), right: den.var() });
        }
        if den.is_zero() {
            return Err(ExactError::DivisionByZeroPoly);
        }
        Ok(Self::normalize(num, den))
    }

    fn normalize(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Self::zero(den.var());
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.exact_div(&g).expect("gcd divides"), den.exact_div(&g).expect("gcd divides"))
        };
        let l = den.lead().expect("nonzero denominator").recip();
        RatFunc { num: num.scale(&l), den: den.scale(&l) }
    }

    /// Assembles an already-reduced pair, only fixing the denominator to be monic.
    fn from_coprime(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Self::zero(den.var());
        }
        let l = den.lead().expect("nonzero denominator").recip();
        RatFunc { num: num.scale(&l), den: den.scale(&l) }
    }

    pub fn zero(var: Var) -> Self {
        RatFunc { num: Poly::zero(var), den: Poly::one(var) }
    }

    pub fn one(var: Var) -> Self {
        Self::from_poly(Poly::one(var))
    }

    pub fn constant(c: Rational, var: Var) -> Self {
        Self::from_poly(Poly::constant(c, var))
    }

    pub fn x(var: Var) -> Self {
        Self::from_poly(Poly::x(var))
    }

    pub fn from_poly(p: Poly) -> Self {
        let var = p.var();
        RatFunc { num: p, den: Poly::one(var) }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn var(&self) -> Var {
        self.num.var()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.degree().unwrap_or(0) == 0 && self.den.degree() == Some(0)
    }

    /// Renames the variable without changing coefficients.
    pub fn with_var(self, var: Var) -> Self {
        RatFunc { num: self.num.with_var(var), den: self.den.with_var(var) }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.var());
        }
        RatFunc { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn recip(&self) -> Result<Self, ExactError> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, k: i32) -> Result<Self, ExactError> {
        let base = if k < 0 { self.recip()? } else { self.clone() };
        let e = k.unsigned_abs();
        Ok(RatFunc { num: base.num.pow(e), den: base.den.pow(e) })
    }

    pub fn checked_div(&self, rhs: &RatFunc) -> Result<Self, ExactError> {
        Ok(self * &rhs.recip()?)
    }

    pub fn derivative(&self) -> Self {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        let d = &self.den * &self.den;
        Self::normalize(n, d)
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational, ExactError> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(ExactError::PoleEncountered { at: x.to_string() });
        }
        Ok(self.num.eval(x) / d)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.num.eval_f64(x) / self.den.eval_f64(x)
    }

    pub fn eval_c64(&self, x: Complex64) -> Complex64 {
        self.num.eval_c64(x) / self.den.eval_c64(x)
    }

    /// Substitutes `g` for the variable; the result lives in `g`'s variable.
    pub fn compose(&self, g: &RatFunc) -> Result<RatFunc, ExactError> {
        let m = self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0));
        let (gn, gd) = (g.num(), g.den());
        let mut gn_pows = vec![Poly::one(g.var())];
        let mut gd_pows = vec![Poly::one(g.var())];
        for k in 1..=m {
            gn_pows.push(&gn_pows[k - 1] * gn);
            gd_pows.push(&gd_pows[k - 1] * gd);
        }
        let homogenize = |p: &Poly| {
            let mut acc = Poly::zero(g.var());
            for (i, c) in p.coeffs().iter().enumerate() {
                if !c.is_zero() {
                    acc = &acc + &(&gn_pows[i] * &gd_pows[m - i]).scale(c);
                }
            }
            acc
        };
        let num = homogenize(&self.num);
        let den = homogenize(&self.den);
        if den.is_zero() {
            return Err(ExactError::IdenticallySingular);
        }
        Ok(Self::normalize(num, den))
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc[{}]({self})", self.var())
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        // gcd(a·d1 + c·b1, b1·d1) = 1 when b = g·b1, d = g·d1, so only g can cancel.
        let g = self.den.gcd(&rhs.den);
        if g.is_one() {
            let n = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
            return RatFunc::from_coprime(n, &self.den * &rhs.den);
        }
        let b1 = self.den.exact_div(&g).expect("gcd divides");
        let d1 = rhs.den.exact_div(&g).expect("gcd divides");
        let n = &(&self.num * &d1) + &(&rhs.num * &b1);
        if n.is_zero() {
            return RatFunc::zero(self.var());
        }
        let h = n.gcd(&g);
        let (n, g) = if h.is_one() {
            (n, g)
        } else {
            (n.exact_div(&h).expect("gcd divides"), g.exact_div(&h).expect("gcd divides"))
        };
        RatFunc::from_coprime(n, &(&b1 * &d1) * &g)
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero(self.var());
        }
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let cut = |p: &Poly, g: &Poly| if g.is_one() { p.clone() } else { p.exact_div(g).expect("gcd divides") };
        let n = &cut(&self.num, &g1) * &cut(&rhs.num, &g2);
        let d = &cut(&self.den, &g2) * &cut(&rhs.den, &g1);
        RatFunc::from_coprime(n, d)
    }
}

impl Div for &RatFunc {
    type Output = RatFunc;
    /// Panics on division by the zero function; see [`RatFunc::checked_div`].
    fn div(self, rhs: &RatFunc) -> RatFunc {
        self.checked_div(rhs).expect("division by the zero rational function")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: RatFunc) -> RatFunc {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: &RatFunc) -> RatFunc {
                (&self).$m(rhs)
            }
        }
        impl $tr<RatFunc> for &RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: RatFunc) -> RatFunc {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

impl From<Poly> for RatFunc {
    fn from(p: Poly) -> Self {
        RatFunc::from_poly(p)
    }
}
