use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{ExactError, Rational, Var};

/// Dense univariate polynomial with exact rational coefficients, ascending degree.
///
/// The highest stored coefficient is always nonzero; the zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Rational>,
    var: Var,
}

impl Poly {
    pub fn zero(var: Var) -> Self {
        Poly { coeffs: Vec::new(), var }
    }

    pub fn one(var: Var) -> Self {
        Self::constant(Rational::one(), var)
    }

    pub fn constant(c: Rational, var: Var) -> Self {
        Self::from_coeffs(vec![c], var)
    }

    /// The monomial `x` in the given variable.
    pub fn x(var: Var) -> Self {
        Self::from_coeffs(vec![Rational::zero(), Rational::one()], var)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>, var: Var) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs, var }
    }

    pub fn from_i64s(coeffs: &[i64], var: Var) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect(), var)
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn with_var(mut self, var: Var) -> Self {
        self.var = var;
        self
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.var);
        }
        Poly { coeffs: self.coeffs.iter().map(|a| a * c).collect(), var: self.var }
    }

    pub fn monic(&self) -> Self {
        match self.lead() {
            Some(l) => self.scale(&l.recip()),
            None => self.clone(),
        }
    }

    pub fn derivative(&self) -> Self {
        let coeffs =
            self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * Rational::from_integer(BigInt::from(k))).collect();
        Self::from_coeffs(coeffs, self.var)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.var);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_c64(&self, x: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * x + to_f64(c);
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + to_f64(c);
        }
        acc
    }

    /// Substitutes `g` for the variable; the result carries `g`'s variable.
    pub fn compose(&self, g: &Poly) -> Poly {
        let mut acc = Poly::zero(g.var);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * g) + &Poly::constant(c.clone(), g.var);
        }
        acc
    }

    /// Euclidean division, `self = q·b + r` with `deg r < deg b`.
    pub fn div_rem(&self, b: &Poly) -> Result<(Poly, Poly), ExactError> {
        self.check_var(b)?;
        let db = b.degree().ok_or(ExactError::DivisionByZeroPoly)?;
        let Some(da) = self.degree() else {
            return Ok((Poly::zero(self.var), Poly::zero(self.var)));
        };
        if da < db {
            return Ok((Poly::zero(self.var), self.clone()));
        }
        let inv = b.coeffs[db].recip();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rational::zero(); da - db + 1];
        for k in (0..=da - db).rev() {
            let c = &rem[k + db] * &inv;
            if !c.is_zero() {
                for (j, bj) in b.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * bj;
                }
            }
            quot[k] = c;
        }
        rem.truncate(db);
        Ok((Poly::from_coeffs(quot, self.var), Poly::from_coeffs(rem, self.var)))
    }

    /// Division that must leave no remainder.
    pub fn exact_div(&self, b: &Poly) -> Result<Poly, ExactError> {
        let (q, r) = self.div_rem(b)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(ExactError::NonzeroRemainder { remainder_degree: r.degree().unwrap_or(0) })
        }
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    ///
    /// Runs a primitive pseudo-remainder sequence over the integers to keep
    /// coefficient growth in check.
    pub fn gcd(&self, other: &Poly) -> Poly {
        assert_eq!(self.var, other.var, "variable mismatch in gcd");
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        let mut a = primitive_int(self);
        let mut b = primitive_int(other);
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_empty() {
            let r = int_prem(&a, &b);
            a = b;
            b = int_primitive(r);
        }
        let coeffs = a.into_iter().map(Rational::from_integer).collect();
        Poly::from_coeffs(coeffs, self.var).monic()
    }

    /// Multiplicity of the root `x = 0`.
    pub fn zero_root_order(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    fn check_var(&self, other: &Poly) -> Result<(), ExactError> {
        if self.var == other.var {
            Ok(())
        } else {
            Err(ExactError::VariableMismatch { left: self.var, right: other.var })
        }
    }
}

pub(crate) fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Ratios of huge integers: scale both sides down before converting.
        let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(900);
        let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

fn primitive_int(p: &Poly) -> Vec<BigInt> {
    let lcm = p.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints = p.coeffs.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    int_primitive(ints)
}

fn int_primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    if v.is_empty() {
        return v;
    }
    let mut g = BigInt::zero();
    for c in &v {
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    if v.last().is_some_and(|c| c.is_negative()) {
        g = -g;
    }
    if !g.is_one() {
        for c in v.iter_mut() {
            *c = &*c / &g;
        }
    }
    v
}

/// Pseudo-remainder of `a` by `b` (`lc(b)^k · a mod b`), integer coefficients.
fn int_prem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r = a.to_vec();
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        for c in r.iter_mut() {
            *c *= lb;
        }
        let shift = dr - db;
        for (j, bj) in b.iter().enumerate() {
            r[shift + j] -= &lr * bj;
        }
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
    }
    r
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}](", self.var)?;
        fmt::Display::fmt(self, f)?;
        write!(f, ")")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let show_coeff = k == 0 || !a.is_one();
            if show_coeff {
                if a.is_integer() || k == 0 {
                    write!(f, "{a}")?;
                } else {
                    write!(f, "({a})")?;
                }
            }
            match k {
                0 => {}
                1 => write!(f, "{}{}", if show_coeff { "*" } else { "" }, self.var)?,
                _ => write!(f, "{}{}^{}", if show_coeff { "*" } else { "" }, self.var, k)?,
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.var, rhs.var, "variable mismatch in add");
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|k| match (self.coeffs.get(k), rhs.coeffs.get(k)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Poly::from_coeffs(coeffs, self.var)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| -c).collect(), var: self.var }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.var, rhs.var, "variable mismatch in mul");
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(self.var);
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_coeffs(out, self.var)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn z(c: &[i64]) -> Poly {
        Poly::from_i64s(c, Var::Z)
    }

    #[test]
    fn exact_div_factorization() {
        assert_eq!(z(&[-1, 0, 1]).exact_div(&z(&[-1, 1])).unwrap(), z(&[1, 1]));
        assert_eq!(z(&[72, 72]).exact_div(&z(&[72])).unwrap(), z(&[1, 1]));
        let a = z(&[3, -2, 0, 5]);
        assert!(a.exact_div(&a).unwrap().is_one());
    }

    #[test]
    fn exact_div_reports_remainder_and_zero_divisor() {
        assert!(matches!(z(&[1, 0, 1]).exact_div(&z(&[-1, 1])), Err(ExactError::NonzeroRemainder { .. })));
        assert!(matches!(z(&[1]).exact_div(&Poly::zero(Var::Z)), Err(ExactError::DivisionByZeroPoly)));
        assert!(matches!(z(&[1]).exact_div(&Poly::one(Var::S)), Err(ExactError::VariableMismatch { .. })));
    }

    #[test]
    fn gcd_is_monic_common_factor() {
        let f = z(&[1, 1]);
        let a = &f * &z(&[2, 0, 3]);
        let b = &f * &z(&[-5, 7]);
        assert_eq!(a.gcd(&b), f);
        assert_eq!(z(&[2, 4]).gcd(&z(&[3])), z(&[1]));
        assert_eq!(Poly::zero(Var::Z).gcd(&z(&[4, 2])), z(&[2, 1]));
    }

    #[test]
    fn trailing_zeros_are_trimmed() {
        let p = Poly::from_coeffs(vec![rat(1, 2), rat(0, 1), rat(0, 1)], Var::Z);
        assert_eq!(p.degree(), Some(0));
        assert!(Poly::from_i64s(&[0, 0], Var::Z).is_zero());
    }

    #[test]
    fn compose_and_eval_agree() {
        let f = z(&[1, -3, 0, 2]);
        let g = Poly::from_i64s(&[2, 1], Var::S);
        let h = f.compose(&g);
        assert_eq!(h.var(), Var::S);
        let x = rat(3, 7);
        assert_eq!(h.eval(&x), f.eval(&g.eval(&x)));
    }

    #[test]
    fn display_is_readable() {
        let p = Poly::from_coeffs(vec![rat(1, 2), rat(-3, 2)], Var::Z);
        assert_eq!(p.to_string(), "-(3/2)*z + 1/2");
        assert_eq!(z(&[1, 1]).to_string(), "z + 1");
    }
}
