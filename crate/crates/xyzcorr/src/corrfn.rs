//! The correlation function `f_n` as an exact rational function of the
//! anisotropy `ζ` and of the normalized discriminant `Z`, the correlation
//! triple, the ζ ↦ γ ↦ δ symmetry and the infinite-lattice limit.

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exact::{int, rat, ExactError, Poly, RatFunc, Rational, Var};
use crate::taurec::{TauError, TauTable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CorrError {
    #[error(transparent)]
    Tau(#[from] TauError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("reconstruction of f_{n} in Z failed up to degree {max_degree}")]
    ReconstructionFailed { n: i64, max_degree: usize },
}

fn zeta_poly(c: &[i64]) -> Poly {
    Poly::from_i64s(c, Var::Zeta)
}

fn zeta_rf(num: &[i64], den: &[i64]) -> RatFunc {
    RatFunc::new(zeta_poly(num), zeta_poly(den)).expect("nonzero denominator")
}

/// `Z(ζ) = ζ²(ζ²−9)²/(ζ²−1)²`.
pub fn discriminant_map() -> RatFunc {
    let num = &zeta_poly(&[0, 0, 1]) * &zeta_poly(&[-9, 0, 1]).pow(2);
    RatFunc::new(num, zeta_poly(&[-1, 0, 1]).pow(2)).expect("nonzero denominator")
}

pub fn discriminant(zeta: f64) -> f64 {
    let z2 = zeta * zeta;
    z2 * (z2 - 9.0).powi(2) / (z2 - 1.0).powi(2)
}

/// `γ = (ζ+3)/(ζ−1)`.
pub fn gamma_map() -> RatFunc {
    zeta_rf(&[3, 1], &[-1, 1])
}

/// `δ = (ζ−3)/(ζ+1)`.
pub fn delta_map() -> RatFunc {
    zeta_rf(&[-3, 1], &[1, 1])
}

/// The leading, `n`-independent term `(ζ²+3)(ζ²−3)/(ζ²−1)²`.
pub fn leading_term() -> RatFunc {
    let num = &zeta_poly(&[3, 0, 1]) * &zeta_poly(&[-3, 0, 1]);
    RatFunc::new(num, zeta_poly(&[-1, 0, 1]).pow(2)).expect("nonzero denominator")
}

/// Finite-size correction `f_n − leading_term()`.
pub fn correction_term(table: &mut TauTable, n: i64) -> Result<RatFunc, CorrError> {
    let inv_sq = zeta_rf(&[1], &[0, 0, 1]);
    let at = |p: Poly| -> Result<RatFunc, CorrError> { Ok(RatFunc::from_poly(p).compose(&inv_sq)?) };
    let s_n = at(table.tau_s(n)?.clone())?;
    let s_m = at(table.tau_s(-n - 1)?.clone())?;
    let sb_n = at(table.tau_sbar(n)?.clone())?;
    let sb_m = at(table.tau_sbar(-n - 1)?.clone())?;
    let l = 2 * n + 1;
    let pref = RatFunc::new(
        (&zeta_poly(&[0, 0, 2]) * &zeta_poly(&[3, 0, 1])).scale(&rat(-1, l * l)),
        zeta_poly(&[-1, 0, 1]).pow(2),
    )?;
    let ratio = (&sb_n * &sb_m).checked_div(&(&s_n * &s_m))?;
    Ok(&pref * &ratio)
}

/// `f_n(ζ)` assembled from the tau polynomials at `z = ζ⁻²`.
pub fn f_zeta(table: &mut TauTable, n: i64) -> Result<RatFunc, CorrError> {
    Ok(&leading_term() + &correction_term(table, n)?)
}

/// `f_n` in both variables, with the composition identity verified exactly.
#[derive(Debug, Clone, Serialize)]
pub struct FnRational {
    pub n: i64,
    pub in_zeta: RatFunc,
    pub in_disc: RatFunc,
}

/// Sample points in ζ avoiding `{0, ±1, ±3}` with pairwise distinct `Z`.
fn sample_points(count: usize, f: &RatFunc) -> Vec<(Rational, Rational, Rational)> {
    let zmap = discriminant_map();
    let mut out: Vec<(Rational, Rational, Rational)> = Vec::new();
    let mut k = 2i64;
    while out.len() < count {
        for j in 1..k {
            if out.len() >= count {
                break;
            }
            let zeta = rat(j, k + 5);
            let Ok(disc) = zmap.eval(&zeta) else { continue };
            if disc.is_zero() || out.iter().any(|(_, d, _)| *d == disc) {
                continue;
            }
            let Ok(val) = f.eval(&zeta) else { continue };
            out.push((zeta, disc, val));
        }
        k += 1;
    }
    out
}

/// Reconstructs `f_n` as a rational function of `Z` and checks `f_n(Z(ζ))` exactly.
pub fn f_in_disc(table: &mut TauTable, n: i64) -> Result<FnRational, CorrError> {
    let in_zeta = f_zeta(table, n)?;
    let cap = (2 * n).max(1) as usize;
    let start = (n.max(0) as usize).min(cap);
    let zmap = discriminant_map();
    for d in start..=cap {
        let pts = sample_points(2 * d + 6, &in_zeta);
        let samples: Vec<_> = pts.into_iter().map(|(_, disc, val)| (disc, val)).collect();
        let Some(fit) = crate::exact::reconstruct_rational(&samples, d, d, Var::Disc) else { continue };
        if fit.compose(&zmap)? == in_zeta {
            return Ok(FnRational { n, in_zeta, in_disc: fit });
        }
    }
    Err(CorrError::ReconstructionFailed { n, max_degree: cap })
}

/// `(C^x, C^y, C^z)` for one chain length and anisotropy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationTriple<T> {
    pub cx: T,
    pub cy: T,
    pub cz: T,
}

impl CorrelationTriple<Rational> {
    pub fn from_f(f: &Rational, zeta: &Rational) -> Self {
        let one = Rational::one();
        let d = zeta * zeta + int(3);
        let cx = &one - (&one - zeta) * (&one - zeta) * f / &d;
        let cy = &one - (&one + zeta) * (&one + zeta) * f / &d;
        let cz = &one - int(4) * f / &d;
        CorrelationTriple { cx, cy, cz }
    }

    /// `(1+ζ)C^x + (1−ζ)C^y + ((ζ²−1)/2)C^z − (ζ²+3)/2`, zero on the supersymmetric line.
    pub fn sum_rule_defect(&self, zeta: &Rational) -> Rational {
        let one = Rational::one();
        let half = rat(1, 2);
        (&one + zeta) * &self.cx + (&one - zeta) * &self.cy + (zeta * zeta - &one) * &half * &self.cz
            - (zeta * zeta + int(3)) * half
    }

    pub fn to_f64(&self) -> CorrelationTriple<f64> {
        use crate::exact::to_f64;
        CorrelationTriple { cx: to_f64(&self.cx), cy: to_f64(&self.cy), cz: to_f64(&self.cz) }
    }
}

impl CorrelationTriple<f64> {
    pub fn from_f(f: f64, zeta: f64) -> Self {
        let d = zeta * zeta + 3.0;
        CorrelationTriple {
            cx: 1.0 - (1.0 - zeta).powi(2) * f / d,
            cy: 1.0 - (1.0 + zeta).powi(2) * f / d,
            cz: 1.0 - 4.0 * f / d,
        }
    }

    pub fn sum_rule_defect(&self, zeta: f64) -> f64 {
        (1.0 + zeta) * self.cx + (1.0 - zeta) * self.cy + 0.5 * (zeta * zeta - 1.0) * self.cz
            - 0.5 * (zeta * zeta + 3.0)
    }
}

/// Exact correlation triple at a rational anisotropy.
pub fn correlations(table: &mut TauTable, n: i64, zeta: &Rational) -> Result<CorrelationTriple<Rational>, CorrError> {
    let f = f_zeta(table, n)?.eval(zeta)?;
    Ok(CorrelationTriple::<Rational>::from_f(&f, zeta))
}

/// Numerator of `f_n(ζ) − f_n(image(ζ))`; zero iff the symmetry holds.
pub fn symmetry_residual_under(table: &mut TauTable, n: i64, image: &RatFunc) -> Result<Poly, CorrError> {
    let f = f_zeta(table, n)?;
    let moved = f.compose(image)?;
    Ok((&f - &moved).num().clone())
}

/// Symmetry defect under `ζ ↦ γ = (ζ+3)/(ζ−1)`.
pub fn symmetry_residual(table: &mut TauTable, n: i64) -> Result<Poly, CorrError> {
    symmetry_residual_under(table, n, &gamma_map())
}

/// Regime of the piecewise infinite-lattice limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Regime {
    Outer,
    Negative,
    Positive,
}

pub fn regime(zeta: f64) -> Regime {
    if zeta.abs() >= 3.0 {
        Regime::Outer
    } else if zeta <= 0.0 {
        Regime::Negative
    } else {
        Regime::Positive
    }
}

/// One branch of the limit formula evaluated exactly.
pub fn f_infinity_branch(branch: Regime, zeta: &Rational) -> Rational {
    let z2 = zeta * zeta;
    let one = Rational::one();
    match branch {
        Regime::Outer => (&z2 + int(3)) * (&z2 - int(3)) / ((&z2 - &one) * (&z2 - &one)),
        Regime::Negative => -(&z2 + int(3)) * (&z2 + int(6) * zeta - int(3)) / (int(8) * (zeta - &one) * (zeta - &one)),
        Regime::Positive => -(&z2 + int(3)) * (&z2 - int(6) * zeta - int(3)) / (int(8) * (zeta + &one) * (zeta + &one)),
    }
}

/// Infinite-lattice limit of `f_n`.
pub fn f_infinity(zeta: f64) -> f64 {
    let z2 = zeta * zeta;
    match regime(zeta) {
        Regime::Outer => (z2 + 3.0) * (z2 - 3.0) / (z2 - 1.0).powi(2),
        Regime::Negative => -(z2 + 3.0) * (z2 + 6.0 * zeta - 3.0) / (8.0 * (zeta - 1.0).powi(2)),
        Regime::Positive => -(z2 + 3.0) * (z2 - 6.0 * zeta - 3.0) / (8.0 * (zeta + 1.0).powi(2)),
    }
}

/// Differences between adjacent branches at `ζ ∈ {−3, 0, 3}`; all zero.
pub fn f_infinity_boundary_defects() -> Vec<(i64, Rational)> {
    vec![
        (-3, f_infinity_branch(Regime::Outer, &int(-3)) - f_infinity_branch(Regime::Negative, &int(-3))),
        (0, f_infinity_branch(Regime::Negative, &int(0)) - f_infinity_branch(Regime::Positive, &int(0))),
        (3, f_infinity_branch(Regime::Positive, &int(3)) - f_infinity_branch(Regime::Outer, &int(3))),
    ]
}

/// Closed forms of `f_n` in `Z` for `n ≤ 5`.
pub fn tabulated_f(n: i64) -> Option<RatFunc> {
    let d = |c: &[i64]| Poly::from_i64s(c, Var::Disc);
    let (num, den) = match n {
        0 => return Some(RatFunc::zero(Var::Disc)),
        1 => return Some(RatFunc::one(Var::Disc)),
        2 => (d(&[27, 1]), d(&[25, 1])),
        3 => (&d(&[24, 1]) * &d(&[27, 1]), &d(&[21, 1]) * &d(&[28, 1])),
        4 => (d(&[14520, 1807, 74, 1]), d(&[13068, 1701, 72, 1])),
        5 => (&d(&[27, 1]) * &d(&[306735, 53404, 3420, 96, 1]), &d(&[429, 44, 1]) * &d(&[17303, 1991, 77, 1])),
        _ => return None,
    };
    RatFunc::new(num, den).ok()
}

/// XXZ-point triple `(5/8+3/(8L²), 5/8+3/(8L²), −1/2+3/(2L²))`.
pub fn xxz_triple(n: i64) -> CorrelationTriple<Rational> {
    let l2 = int((2 * n + 1) * (2 * n + 1));
    let cx = rat(5, 8) + rat(3, 8) / &l2;
    CorrelationTriple { cx: cx.clone(), cy: cx, cz: rat(-1, 2) + rat(3, 2) / l2 }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(num: &[i64], den: &[i64]) -> RatFunc {
        RatFunc::new(Poly::from_i64s(num, Var::Disc), Poly::from_i64s(den, Var::Disc)).unwrap()
    }

    #[test]
    fn low_orders() {
        let mut t = TauTable::new();
        assert!(f_zeta(&mut t, 0).unwrap().is_zero());
        assert_eq!(f_zeta(&mut t, 1).unwrap(), RatFunc::one(Var::Zeta));
        let f2 = disc(&[27, 1], &[25, 1]);
        assert_eq!(f2.compose(&discriminant_map()).unwrap(), f_zeta(&mut t, 2).unwrap());
    }

    #[test]
    fn reconstruction_matches_f3() {
        let mut t = TauTable::new();
        let got = f_in_disc(&mut t, 3).unwrap();
        let num = &Poly::from_i64s(&[24, 1], Var::Disc) * &Poly::from_i64s(&[27, 1], Var::Disc);
        let den = &Poly::from_i64s(&[21, 1], Var::Disc) * &Poly::from_i64s(&[28, 1], Var::Disc);
        assert_eq!(got.in_disc, RatFunc::new(num, den).unwrap());
    }

    #[test]
    fn xxz_point_at_n1() {
        let mut t = TauTable::new();
        let c = correlations(&mut t, 1, &int(0)).unwrap();
        assert_eq!(c, CorrelationTriple { cx: rat(2, 3), cy: rat(2, 3), cz: rat(-1, 3) });
        assert!(c.sum_rule_defect(&int(0)).is_zero());
    }

    #[test]
    fn cz_for_n1() {
        let mut t = TauTable::new();
        for z in [rat(1, 2), rat(-7, 3), rat(5, 1)] {
            let c = correlations(&mut t, 1, &z).unwrap();
            let want = (&z * &z - int(1)) / (&z * &z + int(3));
            assert_eq!(c.cz, want);
        }
    }

    #[test]
    fn infinite_limit_values() {
        assert_eq!(f_infinity_branch(Regime::Negative, &int(0)), rat(9, 8));
        assert_eq!(f_infinity_branch(Regime::Outer, &int(3)), rat(9, 8));
        assert!(f_infinity_boundary_defects().iter().all(|(_, d)| d.is_zero()));
        assert!((f_infinity(1e6) - 1.0).abs() < 1e-9);
        assert!((f_infinity(0.0) - 1.125).abs() < 1e-15);
    }

    #[test]
    fn symmetry_small_n() {
        let mut t = TauTable::new();
        for n in 0..=2 {
            assert!(symmetry_residual(&mut t, n).unwrap().is_zero());
            assert!(symmetry_residual_under(&mut t, n, &delta_map()).unwrap().is_zero());
        }
    }
}
