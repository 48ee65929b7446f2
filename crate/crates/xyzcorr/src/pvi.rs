//! Painleve VI over the field of rational functions in the uniformizing
//! variable `s`: Hamiltonian, the Backlund transformation `T`, the chain
//! `Tⁿ(q₀, p₀)` from the algebraic seed, and the identities tying it to `f_n`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::exact::{int, rat, ExactError, Poly, RatFunc, Rational, Var};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PviError {
    #[error("Backlund transformation is singular: {0}")]
    SingularTransform(ExactError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Parameters `(α₀, α₁, α₂, α₃, α₄)` with `α₀+α₁+2α₂+α₃+α₄ = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PviParams(pub [Rational; 5]);

impl PviParams {
    pub fn new(a: [Rational; 5]) -> Self {
        PviParams(a)
    }

    /// `α₀+α₁+2α₂+α₃+α₄`, which must equal 1.
    pub fn constraint_sum(&self) -> Rational {
        let a = &self.0;
        &a[0] + &a[1] + int(2) * &a[2] + &a[3] + &a[4]
    }

    /// Parameters after one application of `T`.
    pub fn shifted(&self) -> Self {
        let a = &self.0;
        PviParams([&a[0] - int(1), a[1].clone(), &a[2] + int(1), &a[3] - int(1), a[4].clone()])
    }

    /// Parameters of the Hamiltonian that reproduces `f_n`.
    pub fn for_fn(n: i64) -> Self {
        PviParams([rat(1, 2) - int(n), int(0), rat(1, 2) + int(n), rat(-1, 2) - int(n), int(0)])
    }
}

impl fmt::Display for PviParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = &self.0;
        write!(f, "({}, {}, {}, {}, {})", a[0], a[1], a[2], a[3], a[4])
    }
}

impl Serialize for PviParams {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        v.serialize(s)
    }
}

/// A solution `(q(s), p(s))` with its parameters; `t(s)` is shared, see [`t_of_s`].
#[derive(Clone, Debug, PartialEq)]
pub struct PviPoint {
    pub q: RatFunc,
    pub p: RatFunc,
    pub params: PviParams,
}

fn sp(c: &[i64]) -> Poly {
    Poly::from_i64s(c, Var::S)
}

fn s_rf(num: Poly, den: Poly) -> RatFunc {
    RatFunc::new(num, den).expect("nonzero denominator")
}

fn c(r: &Rational) -> RatFunc {
    RatFunc::constant(r.clone(), Var::S)
}

fn ci(n: i64) -> RatFunc {
    c(&int(n))
}

/// `t = s(s+2)³/(2s+1)³`.
pub fn t_of_s() -> RatFunc {
    s_rf(&sp(&[0, 1]) * &sp(&[2, 1]).pow(3), sp(&[1, 2]).pow(3))
}

/// `Z = (s−1)⁴(s+2)(2s+1)/(s(s+1)⁴)`.
pub fn disc_of_s() -> RatFunc {
    s_rf(&(&sp(&[-1, 1]).pow(4) * &sp(&[2, 1])) * &sp(&[1, 2]), &sp(&[0, 1]) * &sp(&[1, 1]).pow(4))
}

/// The algebraic seed with parameters `(0, 0, 1/2, 0, 0)`.
pub fn seed() -> PviPoint {
    let q = s_rf(&sp(&[0, 1]) * &sp(&[2, 1]), sp(&[1, 2]));
    let p = s_rf(-&sp(&[1, 2]), (&sp(&[-1, 1]) * &sp(&[2, 1])).scale(&int(2)));
    PviPoint { q, p, params: PviParams([int(0), int(0), rat(1, 2), int(0), int(0)]) }
}

/// Minimal field interface so the Hamiltonian can be evaluated both on
/// rational functions of `s` and on exact rational points.
pub trait PviField: Clone {
    fn from_rational(r: &Rational) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
}

impl PviField for RatFunc {
    fn from_rational(r: &Rational) -> Self {
        c(r)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
}

impl PviField for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
}

/// The bracket `(α₀−1)q(q−1) + α₃q(q−t) + α₄(q−1)(q−t)`.
fn bracket<F: PviField>(q: &F, t: &F, a: &PviParams) -> F {
    let one = F::from_rational(&int(1));
    let qm1 = q.sub(&one);
    let qmt = q.sub(t);
    let k0 = F::from_rational(&(&a.0[0] - int(1)));
    let k3 = F::from_rational(&a.0[3]);
    let k4 = F::from_rational(&a.0[4]);
    k0.mul(&q.mul(&qm1)).add(&k3.mul(&q.mul(&qmt))).add(&k4.mul(&qm1.mul(&qmt)))
}

/// `H = q(q−1)(q−t)p² − {bracket}p + α₂(α₁+α₂)(q−t)`.
pub fn hamiltonian_at<F: PviField>(q: &F, p: &F, t: &F, a: &PviParams) -> F {
    let one = F::from_rational(&int(1));
    let cubic = q.mul(&q.sub(&one)).mul(&q.sub(t));
    let k = F::from_rational(&(&a.0[2] * (&a.0[1] + &a.0[2])));
    cubic.mul(&p.mul(p)).sub(&bracket(q, t, a).mul(p)).add(&k.mul(&q.sub(t)))
}

/// `H` along a solution, as a rational function of `s`.
pub fn hamiltonian(point: &PviPoint) -> RatFunc {
    hamiltonian_at(&point.q, &point.p, &t_of_s(), &point.params)
}

/// `∂H/∂p = 2q(q−1)(q−t)p − {bracket}`.
pub fn dh_dp<F: PviField>(q: &F, p: &F, t: &F, a: &PviParams) -> F {
    let one = F::from_rational(&int(1));
    let two = F::from_rational(&int(2));
    two.mul(&q.mul(&q.sub(&one)).mul(&q.sub(t))).mul(p).sub(&bracket(q, t, a))
}

/// `∂H/∂q = [(q−1)(q−t) + q(q−t) + q(q−1)]p² − {(α₀−1)(2q−1) + α₃(2q−t) + α₄(2q−1−t)}p + α₂(α₁+α₂)`.
pub fn dh_dq<F: PviField>(q: &F, p: &F, t: &F, a: &PviParams) -> F {
    let one = F::from_rational(&int(1));
    let qm1 = q.sub(&one);
    let qmt = q.sub(t);
    let quad = qm1.mul(&qmt).add(&q.mul(&qmt)).add(&q.mul(&qm1));
    let twoq = q.add(q);
    let lin = F::from_rational(&(&a.0[0] - int(1)))
        .mul(&twoq.sub(&one))
        .add(&F::from_rational(&a.0[3]).mul(&twoq.sub(t)))
        .add(&F::from_rational(&a.0[4]).mul(&twoq.sub(&one).sub(t)));
    let k = F::from_rational(&(&a.0[2] * (&a.0[1] + &a.0[2])));
    quad.mul(&p.mul(p)).sub(&lin.mul(p)).add(&k)
}

/// `d/dt` of a function of `s`, via `(d/ds)/(dt/ds)`.
pub fn d_dt(f: &RatFunc) -> RatFunc {
    &f.derivative() / &t_of_s().derivative()
}

/// `p` recovered from `q`, `dq/dt` and the parameters.
pub fn momentum_from(q: &RatFunc, a: &PviParams) -> Result<RatFunc, ExactError> {
    let t = t_of_s();
    let one = ci(1);
    let qm1 = q - &one;
    let qmt = q - &t;
    let terms = [
        c(&a.0[4]).checked_div(q)?,
        c(&a.0[3]).checked_div(&qm1)?,
        c(&(&a.0[0] - int(1))).checked_div(&qmt)?,
        (&(&t * &(&t - &one)) * &d_dt(q)).checked_div(&(&(q * &qm1) * &qmt))?,
    ];
    let sum = terms.iter().fold(RatFunc::zero(Var::S), |acc, x| &acc + x);
    Ok(sum.scale(&rat(1, 2)))
}

/// One Backlund step: `q' = tp(pq−α₄)/((pq+α₂)(pq+α₁+α₂))`, `p'` rebuilt from `q'`.
pub fn apply_t(point: &PviPoint) -> Result<PviPoint, PviError> {
    let a = &point.params.0;
    let t = t_of_s();
    let pq = &point.p * &point.q;
    let num = &(&t * &point.p) * &(&pq - &c(&a[4]));
    let den = &(&pq + &c(&a[2])) * &(&pq + &c(&(&a[1] + &a[2])));
    let q = num.checked_div(&den).map_err(PviError::SingularTransform)?;
    let params = point.params.shifted();
    let p = momentum_from(&q, &params).map_err(PviError::SingularTransform)?;
    Ok(PviPoint { q, p, params })
}

/// `[T⁰(seed), T¹(seed), …, Tⁿ(seed)]`.
pub fn chain(n: usize) -> Result<Vec<PviPoint>, PviError> {
    let mut out = vec![seed()];
    for _ in 0..n {
        let next = apply_t(out.last().expect("nonempty"))?;
        out.push(next);
    }
    Ok(out)
}

/// `R₁ = t(t−1)q_t − ∂H/∂p`, `R₂ = t(t−1)p_t + ∂H/∂q`; both vanish on a solution.
pub fn hamilton_residuals(point: &PviPoint) -> (RatFunc, RatFunc) {
    let t = t_of_s();
    let tt = &t * &(&t - &ci(1));
    let r1 = &(&tt * &d_dt(&point.q)) - &dh_dp(&point.q, &point.p, &t, &point.params);
    let r2 = &(&tt * &d_dt(&point.p)) + &dh_dq(&point.q, &point.p, &t, &point.params);
    (r1, r2)
}

/// Residual of the second-order equation for `q(t)`.
pub fn painleve_residual(point: &PviPoint) -> Result<RatFunc, ExactError> {
    let a = &point.params.0;
    let (q, t) = (&point.q, t_of_s());
    let one = ci(1);
    let qt = d_dt(q);
    let qtt = d_dt(&qt);
    let qm1 = q - &one;
    let qmt = q - &t;
    let tm1 = &t - &one;
    let alpha = c(&(&a[1] * &a[1] * rat(1, 2)));
    let beta = c(&(-(&a[4] * &a[4]) * rat(1, 2)));
    let gamma = c(&(&a[3] * &a[3] * rat(1, 2)));
    let delta = c(&((int(1) - &a[0] * &a[0]) * rat(1, 2)));
    let first =
        &(&(&(one.checked_div(q)? + one.checked_div(&qm1)?) + one.checked_div(&qmt)?).scale(&rat(1, 2)) * &qt) * &qt;
    let second = &(&(one.checked_div(&t)? + one.checked_div(&tm1)?) + one.checked_div(&qmt)?) * &qt;
    let pref = (&(q * &qm1) * &qmt).checked_div(&(&(&t * &t) * &(&tm1 * &tm1)))?;
    let inner = &(&(&alpha + &(&beta * &t.checked_div(&(q * q))?)) + &(&gamma * &tm1.checked_div(&(&qm1 * &qm1))?))
        + &(&delta * &(&t * &tm1).checked_div(&(&qmt * &qmt))?);
    Ok(&(&(&qtt - &first) + &second) - &(&pref * &inner))
}

/// Right side of the `f_n` representation evaluated on `(q_n, p_n)`, minus `f_n(Z(s))`.
pub fn fpqp_residual(point: &PviPoint, n: i64, f_in_disc: &RatFunc) -> Result<RatFunc, ExactError> {
    let t = t_of_s();
    let l2 = int((2 * n + 1) * (2 * n + 1));
    let h = hamiltonian_at(&point.q, &point.p, &t, &PviParams::for_fn(n));
    let shifted = &h + &t.scale(&(&l2 * rat(1, 4)));
    let quad1 = sp(&[1, 1, 1]);
    let quad4 = sp(&[1, 4, 1]);
    let s1_4 = sp(&[1, 1]).pow(4);
    let lead = s_rf(&quad1 * &quad4, s1_4.clone());
    let pref = s_rf((&sp(&[1, 2]).pow(3) * &quad4).scale(&(int(-4) / &l2)), &sp(&[0, 1]) * &s1_4);
    let rhs = &lead + &(&pref * &shifted);
    let f_s = f_in_disc.clone().with_var(Var::Disc).compose(&disc_of_s())?;
    Ok(&rhs - &f_s)
}

/// Checks `H' + (2n+1)²t/4 = (p(q−1)+n+½)(p(q−t)+n+½)q` on a 5×5×5 exact grid.
///
/// Both sides have degree at most 4 in each of `q`, `p`, `t`, so agreement on a
/// tensor grid of five distinct values per variable decides the identity.
pub fn factorization_check(n: i64) -> bool {
    let grid = [int(-2), rat(-1, 2), int(0), int(1), int(3)];
    let params = PviParams::for_fn(n);
    let shift = rat((2 * n + 1) * (2 * n + 1), 4);
    let half_n = int(n) + rat(1, 2);
    grid.iter().all(|q| {
        grid.iter().all(|p| {
            grid.iter().all(|t| {
                let lhs = hamiltonian_at(q, p, t, &params) + &shift * t;
                let rhs = (p * (q - int(1)) + &half_n) * (p * (q - t) + &half_n) * q;
                lhs == rhs
            })
        })
    })
}

/// Compact `"num/den"` rendering used in reports (`"0/1"` for zero).
pub fn residual_text(r: &RatFunc) -> String {
    if r.is_zero() {
        "0/1".into()
    } else {
        format!("({})/({})", r.num(), r.den())
    }
}

/// Total degree `(deg num, deg den)` of `q`, for growth diagnostics.
pub fn degrees(f: &RatFunc) -> (usize, usize) {
    (f.num().degree().unwrap_or(0), f.den().degree().unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_values() {
        let s0 = seed();
        let two = int(2);
        assert_eq!(s0.q.eval(&two).unwrap(), rat(8, 5));
        assert_eq!(s0.p.eval(&two).unwrap(), rat(-5, 8));
        assert_eq!(t_of_s().eval(&two).unwrap(), rat(128, 125));
        assert_eq!(s0.q.eval(&int(1)).unwrap(), int(1));
        assert_eq!(t_of_s().eval(&int(1)).unwrap(), int(1));
        assert_eq!(s0.params.constraint_sum(), int(1));
    }

    #[test]
    fn hamiltonian_at_seed_point_matches_direct_evaluation() {
        let s0 = seed();
        let h = hamiltonian_at(&s0.q, &s0.p, &t_of_s(), &s0.params);
        let two = int(2);
        let (q, p, t) = (rat(8, 5), rat(-5, 8), rat(128, 125));
        let direct = &q * (&q - int(1)) * (&q - &t) * &p * &p + &q * (&q - int(1)) * &p + rat(1, 4) * (&q - &t);
        assert_eq!(h.eval(&two).unwrap(), direct);
    }

    #[test]
    fn seed_and_first_step_solve_the_system() {
        let pts = chain(2).unwrap();
        for pt in &pts {
            let (r1, r2) = hamilton_residuals(pt);
            assert!(r1.is_zero() && r2.is_zero(), "{}", pt.params);
            assert_eq!(pt.params.constraint_sum(), int(1));
        }
        assert_eq!(pts[1].params, PviParams([int(-1), int(0), rat(3, 2), int(-1), int(0)]));
    }

    #[test]
    fn factorization_holds() {
        for n in 0..=5 {
            assert!(factorization_check(n));
        }
        let params = PviParams::for_fn(0);
        let (q, p, t) = (int(1), int(1), int(0));
        let lhs = hamiltonian_at(&q, &p, &t, &params);
        assert_eq!(lhs, rat(1, 2) * rat(3, 2) * int(1));
    }
}
