use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::modular::cross_checks;
use super::{
    boltzmann_weights, coupling_gamma, coupling_gamma_deta, modular_values, rel, rel2, series_taylor, weierstrass_p,
    zeta_deta, zeta_of_eta, ThetaContext, ThetaResult, C64, I,
};

const ZERO: C64 = C64::new(0.0, 0.0);
const SAMPLES: usize = 20;
pub const IDENTITY_TOLERANCE: f64 = 1e-11;
pub const LEMMA_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityResidual {
    pub name: &'static str,
    pub max_residual: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub tau: C64,
    pub seed: u64,
    pub entries: Vec<IdentityResidual>,
    pub passed: bool,
}

impl IdentityReport {
    pub fn get(&self, name: &str) -> Option<&IdentityResidual> {
        self.entries.iter().find(|e| e.name == name)
    }
}

struct Suite {
    entries: Vec<IdentityResidual>,
}

impl Suite {
    fn push(&mut self, name: &'static str, tolerance: f64, residuals: &[f64]) {
        let max_residual =
            residuals.iter().copied().fold(0.0, |a: f64, b| if b.is_nan() { f64::NAN } else { a.max(b) });
        self.entries.push(IdentityResidual {
            name,
            max_residual,
            tolerance,
            samples: residuals.len(),
            passed: max_residual <= tolerance,
        });
    }
}

fn point(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.random_range(-1.5..1.5), rng.random_range(-0.3..0.3))
}

fn sampled<F>(rng: &mut ChaCha8Rng, arity: usize, f: F) -> ThetaResult<Vec<f64>>
where
    F: Fn(&[C64]) -> ThetaResult<f64>,
{
    (0..SAMPLES)
        .map(|_| {
            let args: Vec<C64> = (0..arity).map(|_| point(rng)).collect();
            f(&args)
        })
        .collect()
}

fn max_norm(xs: &[C64]) -> f64 {
    xs.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Evaluates the theta-function identity catalogue and the derived lemmas at
/// `τ`, drawing random arguments from a ChaCha stream seeded with `seed`.
pub fn identity_suite(tau: C64, seed: u64) -> ThetaResult<IdentityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ctx = ThetaContext::new(tau)?;
    let c2 = ctx.scaled(2.0);
    let c3 = ctx.scaled(3.0);
    let inv = ThetaContext::new(-1.0 / tau)?;
    let t = |j: u8, u: C64| ctx.th(j, u);
    let mut s = Suite { entries: Vec::new() };
    let tol = IDENTITY_TOLERANCE;

    let r = sampled(&mut rng, 1, |a| {
        let u = a[0];
        let mut worst: f64 = 0.0;
        for j in 1..=4 {
            worst = worst.max(rel2(ctx.th(j, u)?, ctx.theta_product(j, u)?));
        }
        Ok(worst)
    })?;
    s.push("series_vs_product", tol, &r);

    let r = sampled(&mut rng, 1, |a| {
        let u = a[0];
        let lhs = inv.th(4, u / tau)?;
        let rhs = (tau / I).sqrt() * (I * u * u / (PI * tau)).exp() * t(2, u)?;
        Ok(rel2(lhs, rhs))
    })?;
    s.push("modular_transformation", tol, &r);

    let r = rel2(ctx.theta(1, ZERO, 1)?, t(2, ZERO)? * t(3, ZERO)? * t(4, ZERO)?);
    s.push("theta1_derivative_product", tol, &[r]);

    let r = sampled(&mut rng, 1, |a| {
        let u = a[0];
        Ok(rel2(c2.th(4, ZERO)? * c2.th(1, u * 2.0)?, t(1, u)? * t(2, u)?))
    })?;
    s.push("theta1_duplication", tol, &r);

    let r = sampled(&mut rng, 1, |a| {
        let u = a[0];
        Ok(rel2(c2.th(4, ZERO)? * c2.th(4, u * 2.0)?, t(3, u)? * t(4, u)?))
    })?;
    s.push("theta4_duplication", tol, &r);

    let r = sampled(&mut rng, 1, |a| {
        let u = a[0];
        Ok(rel2(t(2, ZERO)? * t(1, u)?, 2.0 * c2.th(1, u)? * c2.th(4, u)?))
    })?;
    s.push("theta1_nome_doubling", tol, &r);

    let r = sampled(&mut rng, 1, |a| {
        let u = a[0];
        Ok(rel2(t(2, ZERO)? * t(2, u)?, 2.0 * c2.th(2, u)? * c2.th(3, u)?))
    })?;
    s.push("theta2_nome_doubling", tol, &r);

    let r = sampled(&mut rng, 1, |a| {
        let u = a[0];
        let rhs = 2.0 * t(1, u)? * t(2, u)? * t(3, u)? * t(4, u)? / (t(2, ZERO)? * t(3, ZERO)? * t(4, ZERO)?);
        Ok(rel2(t(1, u * 2.0)?, rhs))
    })?;
    s.push("double_argument", tol, &r);

    let p = ctx.nome();
    let ratio = ctx.q_pochhammer(&[p.powi(6)], p.powi(6))? / ctx.q_pochhammer(&[p * p], p * p)?.powi(3);
    let third = C64::new(PI / 3.0, 0.0);
    let r = sampled(&mut rng, 1, |a| {
        let u = a[0];
        let mut worst: f64 = 0.0;
        for j in 1..=4 {
            let rhs = ratio * t(j, u)? * t(j, third + u)? * t(j, third - u)?;
            worst = worst.max(rel2(c3.th(j, u * 3.0)?, rhs));
        }
        Ok(worst)
    })?;
    s.push("triplication", tol, &r);

    let lhs = t(2, third)? * t(3, third)? * t(4, third)? / (t(2, ZERO)? * t(3, ZERO)? * t(4, ZERO)?);
    s.push("third_period_ratio", tol, &[rel2(lhs, C64::new(0.5, 0.0))]);

    let r = sampled(&mut rng, 4, |a| {
        let (x, y, u, v) = (a[0], a[1], a[2], a[3]);
        let pair = |a: C64, b: C64| -> ThetaResult<C64> { Ok(t(1, a - b)? * t(1, a + b)?) };
        let terms = [pair(x, y)? * pair(u, v)?, -pair(x, u)? * pair(y, v)?, pair(x, v)? * pair(y, u)?];
        let sum: C64 = terms.iter().sum();
        Ok(rel(sum, ZERO, max_norm(&terms)))
    })?;
    s.push("weierstrass_three_term", tol, &r);

    let r = sampled(&mut rng, 2, |a| {
        let (x, y) = (a[0], a[1]);
        let lhs = t(4, ZERO)?.powi(2) * t(4, x + y)? * t(4, x - y)?;
        let terms = [(t(4, x)? * t(4, y)?).powi(2), -(t(1, x)? * t(1, y)?).powi(2)];
        Ok(rel(lhs, terms[0] + terms[1], max_norm(&[lhs, terms[0], terms[1]])))
    })?;
    s.push("addition_4411", tol, &r);

    let r = sampled(&mut rng, 2, |a| {
        let (x, y) = (a[0], a[1]);
        let lhs = t(4, ZERO)?.powi(2) * t(4, x + y)? * t(4, x - y)?;
        let terms = [(t(3, x)? * t(3, y)?).powi(2), -(t(2, x)? * t(2, y)?).powi(2)];
        Ok(rel(lhs, terms[0] + terms[1], max_norm(&[lhs, terms[0], terms[1]])))
    })?;
    s.push("addition_3322", tol, &r);

    let r = sampled(&mut rng, 2, |a| {
        let (x, y) = (a[0], a[1]);
        let lhs = t(1, x + y)? * t(2, x - y)?;
        let terms = [c2.th(1, x * 2.0)? * c2.th(4, y * 2.0)?, c2.th(4, x * 2.0)? * c2.th(1, y * 2.0)?];
        Ok(rel(lhs, terms[0] + terms[1], max_norm(&[lhs, terms[0], terms[1]])))
    })?;
    s.push("addition_1441", tol, &r);

    let r = sampled(&mut rng, 1, |a| {
        let u = a[0];
        let (t2, t3) = (t(2, u)?, t(3, u)?);
        let lhs = (ctx.theta(3, u, 1)? * t2 - t3 * ctx.theta(2, u, 1)?) / (t2 * t2);
        let rhs = t(4, ZERO)?.powi(2) * t(1, u)? * t(4, u)? / (t2 * t2);
        Ok(rel2(lhs, rhs))
    })?;
    s.push("quotient_derivative", tol, &r);

    for (name, residual) in cross_checks(tau)? {
        s.push(name, tol, &[residual]);
    }

    let lemma = LEMMA_TOLERANCE;
    let r = sampled(&mut rng, 1, |a| {
        let eta = C64::new(0.2 + 0.35 * (a[0].re + 1.5), a[0].im);
        let zeta = zeta_of_eta(eta, tau)?;
        let terms = [C64::new(1.0, 0.0), -zeta * zeta, 2.0 * coupling_gamma(eta, tau)?];
        let rhs =
            t(1, eta * 3.0)? * (t(3, ZERO)? * t(4, ZERO)?).powi(4) / (t(1, eta)? * (t(3, eta)? * t(4, eta)?).powi(4));
        let lhs: C64 = terms.iter().sum();
        Ok(rel(lhs, rhs, max_norm(&[terms[0], terms[1], terms[2], rhs])))
    })?;
    s.push("coupling_sum", lemma, &r);

    let mv = modular_values(tau)?;
    let gamma = (mv.zeta + 3.0) / (mv.zeta - 1.0);
    let lhs = mv.zeta * zeta_deta(third, tau)? - coupling_gamma_deta(third, tau)?;
    let a_w = boltzmann_weights(third, third, tau, 0)?.a;
    let b_u = boltzmann_weights(third, third, tau, 1)?.b;
    let rhs1 = 6.0 * mv.chi * a_w / b_u;
    let rhs2 = 24.0 * ctx.theta(1, ZERO, 1)? * t(2, third)?.powi(4) / (t(1, third)? * t(2, ZERO)?.powi(4));
    s.push("coupling_derivative", lemma, &[rel2(lhs, rhs1), rel2(lhs, rhs2)]);

    let mut til = Vec::new();
    let mut decomposition = Vec::new();
    let mut hk = Vec::new();
    for n in 0..=3i32 {
        let e = e_coefficient(&ctx, n)?;
        let l = 2.0 * n as f64 + 1.0;
        let t1 = t(1, third)?;
        let log2 = ctx.theta(1, third, 2)? / t1 - (ctx.theta(1, third, 1)? / t1).powi(2);
        let terms = [2.0 * n as f64 * l * log2, l * e];
        let rhs = -l * mv.chi * (gamma * gamma - 3.0) / (gamma + 1.0).powi(2);
        til.push(rel(terms[0] + terms[1], rhs, max_norm(&[terms[0], terms[1], rhs])));

        let parts = e_parts(&ctx, n)?;
        let combo = (l + 2.0) * parts[0] + (l - 2.0) * parts[1] - parts[2] + parts[3];
        decomposition.push(rel(
            l * e,
            combo,
            max_norm(&[l * e, (l + 2.0) * parts[0], (l - 2.0) * parts[1], parts[2], parts[3]]),
        ));

        hk.push(hk_residual(&ctx, n, mv.chi, gamma, mv.z)?);
    }
    s.push("log_derivative_sum", lemma, &til);
    s.push("e_decomposition", lemma, &decomposition);
    s.push("hk_ratio", lemma, &hk);

    let passed = s.entries.iter().all(|e| e.passed);
    Ok(IdentityReport { tau, seed, entries: s.entries, passed })
}

/// `E`: ratio of the `u⁵` and `u³` Taylor coefficients of
/// `θ₁(u|τ)^{2n+3} / (θ₁(3u|3τ)^{2n} θ₄(3u|3τ))` at `u = 0`.
pub fn e_coefficient(ctx: &ThetaContext, n: i32) -> ThetaResult<C64> {
    let c3 = ctx.scaled(3.0);
    let co = series_taylor(
        |u| Ok(ctx.th(1, u)?.powi(2 * n + 3) / (c3.th(1, u * 3.0)?.powi(2 * n) * c3.th(4, u * 3.0)?)),
        ZERO,
        6,
    )?;
    Ok(co[5] / co[3])
}

/// `[A, B, C, D]` with `(2n+1)E = (2n+3)A + (2n−1)B − C + D`.
pub fn e_parts(ctx: &ThetaContext, n: i32) -> ThetaResult<[C64; 4]> {
    let tau = ctx.tau();
    let c3 = ctx.scaled(3.0);
    let c32 = ctx.scaled(1.5);
    let k = n as usize;
    let a = series_taylor(
        |u| Ok(ctx.th(1, u)?.powi(2 * n + 1) / (c3.th(1, u * 3.0)?.powi(n) * c32.th(3, u * 1.5)?)),
        ZERO,
        k + 4,
    )?;
    let b = series_taylor(|u| Ok(u.powi(n) / (c3.th(1, u * 3.0)?.powi(n) * c32.th(4, u * 1.5)?)), ZERO, 3)?;
    let (w1, w2) = (C64::new(2.0 * PI / 3.0, 0.0), tau * PI);
    let c = weierstrass_p(C64::new(PI / 3.0, 0.0) + tau * PI / 2.0, w1, w2)?;
    let d = weierstrass_p(tau * PI / 2.0, w1, w2)?;
    Ok([a[k + 3] / a[k + 1], b[2] / b[0], c, d])
}

fn hk_residual(ctx: &ThetaContext, n: i32, chi: C64, gamma: C64, z: C64) -> ThetaResult<f64> {
    let tau = ctx.tau();
    let half = ctx.scaled(0.5);
    let c32 = ctx.scaled(1.5);
    let ratio4 = |u: C64| -> ThetaResult<C64> { Ok(c32.th(4, u * 1.5)? / half.th(4, u * 0.5)?) };
    let h = |u: C64| -> ThetaResult<C64> { Ok(half.th(3, u * 0.5)? * ratio4(u)?.powi(n)) };
    let k = |u: C64| -> ThetaResult<C64> {
        Ok(c32.th(2, u * 1.5)?.powi(2) * c32.th(3, u * 1.5)? / (half.th(2, u * 0.5)?.powi(2) * half.th(3, u * 0.5)?)
            * ratio4(u)?.powi(n - 1))
    };
    let a = tau * PI / 2.0;
    let pi = C64::new(PI, 0.0);
    // h vanishes at π + πτ/2, so the linear coefficient of the quotient is h'(π+πτ/2)/h(πτ/2).
    let hr = series_taylor(|u| Ok(h(u + pi + a)? / h(u + a)?), ZERO, 2)?[1];
    let kpi = series_taylor(|u| k(u + pi), ZERO, 1)?[0];
    let lhs = c32.theta(1, ZERO, 1)? / c32.th(2, ZERO)? * hr * k(ZERO)? / kpi / chi;
    let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
    let rhs = sign * 2.0 * I * (z + 1.0) / (3.0 * (gamma + 1.0).powi(2) * (z - 1.0) * (2.0 * z + 1.0).powi(n - 1));
    Ok(rel2(lhs, rhs))
}
