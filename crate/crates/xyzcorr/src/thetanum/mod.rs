//! Jacobi theta functions in double precision, the Weierstrass `℘` function,
//! contour-based Taylor coefficients, modular parameter maps, the theta
//! identity regression suite and the infinite-lattice limit of `f_n`.

mod baxter;
mod identities;
mod modular;

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

pub use baxter::{baxter_f_infinity, BaxterLimit};
pub use identities::{
    e_coefficient, e_parts, identity_suite, IdentityReport, IdentityResidual, IDENTITY_TOLERANCE, LEMMA_TOLERANCE,
};
pub use modular::{
    boltzmann_weights, coupling_gamma, coupling_gamma_deta, modular_values, zeta_deta, zeta_of_eta, ModularValues,
    Weights,
};

pub type C64 = Complex64;

pub const I: C64 = C64::new(0.0, 1.0);

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThetaError {
    #[error("Im tau must be positive, got {0}")]
    InvalidTau(C64),
    #[error("theta index must be 1..=4, got {0}")]
    InvalidIndex(u8),
    #[error("derivative order {0} exceeds 4")]
    OrderTooHigh(u32),
    #[error("series did not converge within {max_terms} terms")]
    TruncationFailure { max_terms: usize },
    #[error("argument {0} lies on the period lattice")]
    LatticePoint(C64),
    #[error("no contour radius gave consistent Taylor coefficients (best error {best_error:e})")]
    RadiusSelectionFailure { best_error: f64 },
    #[error("cross-check {name} failed with residual {residual:e}")]
    CrossCheckFailure { name: &'static str, residual: f64 },
    #[error("Baxter series outside its convergence region: |x| = {x_abs}, |q^(1/2)| = {q_half_abs}")]
    SeriesDivergence { x_abs: f64, q_half_abs: f64 },
}

pub type ThetaResult<T> = Result<T, ThetaError>;

/// Fixed modular parameter `τ` with truncation controls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaContext {
    tau: C64,
    tolerance: f64,
    max_terms: usize,
}

impl ThetaContext {
    pub fn new(tau: C64) -> ThetaResult<Self> {
        if tau.im.is_nan() || tau.im <= 0.0 {
            return Err(ThetaError::InvalidTau(tau));
        }
        Ok(ThetaContext { tau, tolerance: 1e-15, max_terms: 64 })
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_max_terms(mut self, max_terms: usize) -> Self {
        self.max_terms = max_terms;
        self
    }

    pub fn tau(&self) -> C64 {
        self.tau
    }

    /// Context for `k·τ` with `k > 0`, keeping the truncation settings.
    pub fn scaled(&self, k: f64) -> Self {
        debug_assert!(k > 0.0);
        ThetaContext { tau: self.tau * k, ..*self }
    }

    /// `p = e^{iπτ}`.
    pub fn nome(&self) -> C64 {
        (I * PI * self.tau).exp()
    }

    /// `θ_j^{(order)}(u|τ)` from the Fourier series, differentiated term-wise.
    pub fn theta(&self, j: u8, u: C64, order: u32) -> ThetaResult<C64> {
        if !(1..=4).contains(&j) {
            return Err(ThetaError::InvalidIndex(j));
        }
        if order > 4 {
            return Err(ThetaError::OrderTooHigh(order));
        }
        let odd = j <= 2;
        let mut sum = if !odd && order == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
        let mut mass = sum.norm();
        let mut prev = f64::INFINITY;
        let start = if odd { 0 } else { 1 };
        for n in start..start + self.max_terms {
            let (freq, expo, sign) = if odd {
                let h = n as f64 + 0.5;
                (2.0 * n as f64 + 1.0, h * h, if j == 1 && n % 2 == 1 { -1.0 } else { 1.0 })
            } else {
                let m = n as f64;
                (2.0 * m, m * m, if j == 4 && n % 2 == 1 { -1.0 } else { 1.0 })
            };
            let weight = (I * PI * self.tau * expo).exp() * (2.0 * sign * freq.powi(order as i32));
            let x = u * freq;
            let trig = if j == 1 { sin_derivative(x, order) } else { cos_derivative(x, order) };
            sum += weight * trig;
            // |sin x|, |cos x| ≤ e^{|Im x|}: a bound that does not vanish with the trig factor.
            let bound = weight.norm() * (freq * u.im.abs()).exp();
            mass += bound;
            if n > start && bound <= self.tolerance * mass && bound <= prev {
                return Ok(sum);
            }
            prev = bound;
        }
        Err(ThetaError::TruncationFailure { max_terms: self.max_terms })
    }

    /// `θ_j(u|τ)`.
    pub fn th(&self, j: u8, u: C64) -> ThetaResult<C64> {
        self.theta(j, u, 0)
    }

    /// `θ_j(u|τ)` from the infinite product expansion; an independent oracle for [`Self::theta`].
    pub fn theta_product(&self, j: u8, u: C64) -> ThetaResult<C64> {
        if !(1..=4).contains(&j) {
            return Err(ThetaError::InvalidIndex(j));
        }
        let p = self.nome();
        let p2 = p * p;
        let e = (I * u * 2.0).exp();
        let ei = (-I * u * 2.0).exp();
        let quarter = (I * PI * self.tau / 4.0 - I * u).exp();
        let (prefactor, a, b) = match j {
            1 => (I * quarter, e, p2 * ei),
            2 => (quarter, -e, -p2 * ei),
            3 => (C64::new(1.0, 0.0), -p * e, -p * ei),
            _ => (C64::new(1.0, 0.0), p * e, p * ei),
        };
        Ok(prefactor * self.q_pochhammer(&[p2, a, b], p2)?)
    }

    /// `(a₁, …, a_k; base)_∞`.
    pub fn q_pochhammer(&self, a: &[C64], base: C64) -> ThetaResult<C64> {
        let mut prod = C64::new(1.0, 0.0);
        let mut pw = C64::new(1.0, 0.0);
        for _ in 0..self.max_terms * 4 {
            let mut largest: f64 = 0.0;
            for x in a {
                let t = x * pw;
                largest = largest.max(t.norm());
                prod *= C64::new(1.0, 0.0) - t;
            }
            if largest <= self.tolerance * 1e-2 {
                return Ok(prod);
            }
            pw *= base;
        }
        Err(ThetaError::TruncationFailure { max_terms: self.max_terms * 4 })
    }
}

fn sin_derivative(x: C64, order: u32) -> C64 {
    match order % 4 {
        0 => x.sin(),
        1 => x.cos(),
        2 => -x.sin(),
        _ => -x.cos(),
    }
}

fn cos_derivative(x: C64, order: u32) -> C64 {
    match order % 4 {
        0 => x.cos(),
        1 => -x.sin(),
        2 => -x.cos(),
        _ => x.sin(),
    }
}

/// `θ_j(u|τ)` for a one-off `τ`.
pub fn theta(j: u8, u: C64, tau: C64, order: u32) -> ThetaResult<C64> {
    ThetaContext::new(tau)?.theta(j, u, order)
}

/// Weierstrass `℘(u)` for the lattice `ω₁ℤ + ω₂ℤ`, normalized as `1/u² + O(u²)`.
///
/// Built from `−(log θ₁)''` in `x = πu/ω₁`; the additive constant is
/// `θ₁'''(0)/(3θ₁'(0))`, which removes the `u⁰` term.
pub fn weierstrass_p(u: C64, w1: C64, w2: C64) -> ThetaResult<C64> {
    let ctx = ThetaContext::new(w2 / w1)?;
    let k = (PI / w1).powi(2);
    let x = u * PI / w1;
    let t0 = ctx.theta(1, x, 0)?;
    let d0 = ctx.theta(1, C64::new(0.0, 0.0), 1)?;
    if t0.norm() <= 1e-13 * d0.norm() {
        return Err(ThetaError::LatticePoint(u));
    }
    let t1 = ctx.theta(1, x, 1)?;
    let t2 = ctx.theta(1, x, 2)?;
    let d3 = ctx.theta(1, C64::new(0.0, 0.0), 3)?;
    let log2 = t2 / t0 - (t1 / t0).powi(2);
    Ok(-k * log2 + k * d3 / (3.0 * d0))
}

/// `csc²(x)` written through `e^{±2ix}` so it stays finite far from the real axis.
fn csc2(x: C64) -> C64 {
    let e = if x.im > 0.0 { (I * x * 2.0).exp() } else { (-I * x * 2.0).exp() };
    -4.0 * e / (1.0 - e).powi(2)
}

/// `℘` from the lattice sum, with the inner sum over `m` done in closed form
/// (`Σ_m (z+mπ)⁻² = csc² z`) and the outer sum truncated at `|n| ≤ n_max`.
pub fn weierstrass_p_lattice(u: C64, w1: C64, w2: C64, n_max: i64) -> C64 {
    let k = (PI / w1).powi(2);
    let mut s = C64::new(-1.0 / 3.0, 0.0);
    for n in -n_max..=n_max {
        s += csc2(PI * (u + w2 * n as f64) / w1);
        if n != 0 {
            s -= csc2(PI * w2 * n as f64 / w1);
        }
    }
    k * s
}

const CONTOUR_POINTS: usize = 128;
const RADII: [f64; 10] = [0.5, 0.35, 0.25, 0.18, 0.12, 0.08, 0.05, 0.03, 0.02, 0.01];

fn contour_coefficients<F>(f: &F, u0: C64, k: usize, r: f64) -> ThetaResult<Option<(Vec<C64>, f64)>>
where
    F: Fn(C64) -> ThetaResult<C64>,
{
    let n = CONTOUR_POINTS;
    let mut vals = Vec::with_capacity(n);
    for m in 0..n {
        let w = (I * (2.0 * PI * m as f64 / n as f64)).exp();
        let v = f(u0 + w * r)?;
        if !v.re.is_finite() || !v.im.is_finite() {
            return Ok(None);
        }
        vals.push(v);
    }
    let scale = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let bin = |j: i64| -> C64 {
        let s: C64 = vals
            .iter()
            .enumerate()
            .map(|(m, v)| v * (-I * (2.0 * PI * (m as f64) * (j as f64) / n as f64)).exp())
            .sum();
        s / n as f64
    };
    // Negative bins pick up any enclosed pole.
    let principal = (1..=3).map(|j| bin(-j).norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(Some((vec![C64::new(0.0, 0.0); k], 0.0)));
    }
    if principal > 1e-9 * scale {
        return Ok(None);
    }
    let coeffs = (0..k as i64).map(|j| bin(j) / r.powi(j as i32)).collect();
    Ok(Some((coeffs, scale)))
}

/// First `k` Taylor coefficients of `f` at `u₀` by sampling uniform circles.
///
/// Radii are tried from large to small; a radius is accepted when a second
/// circle at `0.6r` reproduces the coefficients and no principal part is seen.
pub fn series_taylor<F>(f: F, u0: C64, k: usize) -> ThetaResult<Vec<C64>>
where
    F: Fn(C64) -> ThetaResult<C64>,
{
    let mut best: Option<(f64, Vec<C64>)> = None;
    for &r in &RADII {
        let Some((outer, scale)) = contour_coefficients(&f, u0, k, r)? else { continue };
        let Some((inner, _)) = contour_coefficients(&f, u0, k, 0.6 * r)? else { continue };
        let err = if scale == 0.0 {
            0.0
        } else {
            outer
                .iter()
                .zip(&inner)
                .enumerate()
                .map(|(j, (a, b))| (a - b).norm() * r.powi(j as i32) / scale)
                .fold(0.0, f64::max)
        };
        if err <= 1e-10 {
            return Ok(outer);
        }
        if best.as_ref().is_none_or(|(e, _)| err < *e) {
            best = Some((err, outer));
        }
    }
    match best {
        Some((err, coeffs)) if err <= 1e-7 => Ok(coeffs),
        Some((err, _)) => Err(ThetaError::RadiusSelectionFailure { best_error: err }),
        None => Err(ThetaError::RadiusSelectionFailure { best_error: f64::INFINITY }),
    }
}

/// `|a − b| / max(scale, tiny)`.
pub(crate) fn rel(a: C64, b: C64, scale: f64) -> f64 {
    (a - b).norm() / scale.max(1e-300)
}

/// `|a − b| / max(|a|, |b|)`.
pub(crate) fn rel2(a: C64, b: C64) -> f64 {
    rel(a, b, a.norm().max(b.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx_i() -> ThetaContext {
        ThetaContext::new(I).unwrap()
    }

    #[test]
    fn theta1_vanishes_at_origin() {
        for tau in [I, c64(0.3, 0.7), c64(0.0, 2.0)] {
            assert_eq!(theta(1, c64(0.0, 0.0), tau, 0).unwrap().norm(), 0.0);
        }
    }

    #[test]
    fn series_and_product_agree() {
        let ctx = ctx_i();
        for u in [c64(0.3, 0.1), c64(-1.1, 0.4), c64(2.0, -0.2)] {
            for j in 1..=4 {
                let s = ctx.th(j, u).unwrap();
                let p = ctx.theta_product(j, u).unwrap();
                assert!(rel2(s, p) < 1e-13, "j={j} u={u} {s} {p}");
            }
        }
    }

    #[test]
    fn derivative_orders_match_finite_differences() {
        let ctx = ctx_i();
        let u = c64(0.4, 0.1);
        let h = 1e-4;
        for j in 1..=4 {
            for order in 0..4 {
                let fd = (ctx.theta(j, u + h, order).unwrap() - ctx.theta(j, u - h, order).unwrap()) / (2.0 * h);
                let an = ctx.theta(j, u, order + 1).unwrap();
                assert!((fd - an).norm() < 1e-6 * (1.0 + an.norm()), "j={j} order={order}");
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(ThetaContext::new(c64(1.0, 0.0)), Err(ThetaError::InvalidTau(_))));
        assert!(matches!(ctx_i().theta(5, c64(0.0, 0.0), 0), Err(ThetaError::InvalidIndex(5))));
        assert!(matches!(ctx_i().theta(1, c64(0.0, 0.0), 5), Err(ThetaError::OrderTooHigh(5))));
        let tight = ctx_i().with_max_terms(1);
        assert!(matches!(tight.th(3, c64(0.1, 0.0)), Err(ThetaError::TruncationFailure { .. })));
    }

    #[test]
    fn weierstrass_normalization_and_symmetry() {
        let (w1, w2) = (c64(PI / 3.0, 0.0), I * PI);
        for k in 2..=4 {
            let u = c64(10f64.powi(-k), 0.0);
            let v = weierstrass_p(u, w1, w2).unwrap() - 1.0 / (u * u);
            assert!(v.norm() < 1e-3, "k={k} {v}");
        }
        let u = c64(0.3, 0.2);
        let p = weierstrass_p(u, w1, w2).unwrap();
        assert!(rel2(p, weierstrass_p(u + w1, w1, w2).unwrap()) < 1e-12);
        assert!(rel2(p, weierstrass_p(u + w2, w1, w2).unwrap()) < 1e-12);
        assert!(rel2(p, weierstrass_p(-u, w1, w2).unwrap()) < 1e-12);
        assert!(matches!(weierstrass_p(w1, w1, w2), Err(ThetaError::LatticePoint(_))));
    }

    #[test]
    fn weierstrass_matches_lattice_sum() {
        for (w1, w2) in [(c64(PI / 3.0, 0.0), I * PI), (c64(2.0 * PI / 3.0, 0.0), I * PI)] {
            for u in [c64(0.3, 0.1), c64(1.0, 0.0), c64(0.5, 0.4), c64(-0.2, 0.7), c64(0.15, -0.3)] {
                let a = weierstrass_p(u, w1, w2).unwrap();
                let b = weierstrass_p_lattice(u, w1, w2, 40);
                assert!(rel2(a, b) < 1e-8, "{u}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn taylor_of_exp() {
        let c = series_taylor(|u| Ok(u.exp()), c64(0.0, 0.0), 3).unwrap();
        for (got, want) in c.iter().zip([1.0, 1.0, 0.5]) {
            assert!((got - want).norm() < 1e-12);
        }
    }

    #[test]
    fn taylor_of_theta1_over_u() {
        let ctx = ctx_i();
        let f = |u: C64| -> ThetaResult<C64> {
            if u.norm() < 1e-300 {
                ctx.theta(1, u, 1)
            } else {
                Ok(ctx.th(1, u)? / u)
            }
        };
        let c = series_taylor(f, c64(0.0, 0.0), 2).unwrap();
        let d = ctx.theta(1, c64(0.0, 0.0), 1).unwrap();
        assert!(rel2(c[0], d) < 1e-11);
    }

    #[test]
    fn taylor_rejects_enclosed_pole() {
        let c = series_taylor(|u| Ok(1.0 / (u - 0.3) + u), c64(0.0, 0.0), 2).unwrap();
        assert!((c[1] - (-1.0 / 0.09 + 1.0)).norm() < 1e-9);
    }
}
