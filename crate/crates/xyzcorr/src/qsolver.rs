//! The Q-operator eigenvalue `q(u)` on the supersymmetric line, solved
//! numerically from its three-term functional equation, and the identities
//! built on it: Wronskian relations, the second-order equation relating
//! `q(u)` and `q(u+π)`, the `q''`-relation and the formula for `f_n`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::thetanum::{
    e_coefficient, e_parts, modular_values, rel2, series_taylor, weierstrass_p, ThetaContext, ThetaError, C64, I,
};

const ZERO: C64 = C64::new(0.0, 0.0);
pub const MIN_GAP: f64 = 1e6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QError {
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error("solution space is not numerically one-dimensional (gap {gap:e} < {MIN_GAP:e})")]
    NullspaceDegenerate { gap: f64 },
    #[error("fewer than three grid points avoid the singular set")]
    GridDegenerate,
    #[error("n = {0} outside the supported range 0..=4")]
    UnsupportedN(usize),
}

pub type QResult<T> = Result<T, QError>;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SolveOptions {
    /// Ladder steps beyond the base block; default makes `|p|^K < 1e−18`.
    pub ladders: Option<usize>,
    /// Sample points for the functional equation; default `4L + 8`.
    pub points: Option<usize>,
}

/// One Fourier mode `e^{iku}` of `q`, expressed as `multiplier · c_base`.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Mode {
    k: i64,
    base: usize,
    multiplier: C64,
}

/// `q(u) = Σ_k c_k e^{iku}` with the ladder `c_{k+L} = p^{k+L/2} c_k` and `c_{−k} = c_k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QCoefficients {
    pub n: usize,
    pub tau: C64,
    /// `c_{−n}, …, c_n`.
    pub base: Vec<C64>,
    pub nullspace_gap: f64,
    pub singular_values: Vec<f64>,
    #[serde(skip)]
    modes: Vec<Mode>,
}

fn ladder_modes(n: usize, tau: C64, ladders: usize) -> Vec<Mode> {
    let l = (2 * n + 1) as i64;
    let mut modes = Vec::new();
    for (base, j) in (-(n as i64)..=n as i64).enumerate() {
        modes.push(Mode { k: j, base, multiplier: C64::new(1.0, 0.0) });
        let (mut k, mut m) = (j, C64::new(1.0, 0.0));
        for _ in 0..ladders {
            m *= (I * PI * tau * (k as f64 + l as f64 / 2.0)).exp();
            k += l;
            modes.push(Mode { k, base, multiplier: m });
        }
    }
    let mirrored: Vec<Mode> = modes.iter().filter(|m| m.k > n as i64).map(|m| Mode { k: -m.k, ..*m }).collect();
    modes.extend(mirrored);
    modes
}

impl QCoefficients {
    pub fn l(&self) -> usize {
        2 * self.n + 1
    }

    /// `q^{(d)}(u)`.
    pub fn eval(&self, u: C64, d: u32) -> C64 {
        self.modes
            .iter()
            .map(|m| m.multiplier * self.base[m.base] * (I * m.k as f64).powu(d) * (I * u * m.k as f64).exp())
            .sum()
    }

    pub fn q(&self, u: C64) -> C64 {
        self.eval(u, 0)
    }

    /// Same function times `factor`.
    pub fn scaled(&self, factor: C64) -> Self {
        QCoefficients { base: self.base.iter().map(|c| c * factor).collect(), ..self.clone() }
    }

    fn ctx(&self) -> QResult<ThetaContext> {
        Ok(ThetaContext::new(self.tau)?)
    }

    /// `φ(u) = θ₁(u|τ)^L`.
    pub fn phi(&self, u: C64) -> QResult<C64> {
        Ok(self.ctx()?.th(1, u)?.powi(self.l() as i32))
    }

    /// Relative residual of `φ(u)q(u) + φ(u+2π/3)q(u+2π/3) + φ(u−2π/3)q(u−2π/3) = 0`.
    pub fn functional_residual(&self, u: C64) -> QResult<f64> {
        let mut terms = Vec::new();
        for sh in [0.0, 2.0 * PI / 3.0, -2.0 * PI / 3.0] {
            terms.push(self.phi(u + sh)? * self.q(u + sh));
        }
        let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
        Ok(terms.iter().sum::<C64>().norm() / scale)
    }

    /// `Φ(u,v) = θ₃(3u/2)θ₄(3v/2)q(u)q(v+π) − θ₄(3u/2)θ₃(3v/2)q(u+π)q(v)`, thetas at `3τ/2`.
    pub fn alternant(&self, u: C64, v: C64) -> QResult<C64> {
        let c = self.ctx()?.scaled(1.5);
        Ok(c.th(3, u * 1.5)? * c.th(4, v * 1.5)? * self.q(u) * self.q(v + PI)
            - c.th(4, u * 1.5)? * c.th(3, v * 1.5)? * self.q(u + PI) * self.q(v))
    }

    /// `q'(π+πτ/2)/q(πτ/2)`.
    pub fn shifted_log_ratio(&self) -> C64 {
        let a = self.tau * PI / 2.0;
        self.eval(a + PI, 1) / self.q(a)
    }
}

/// Solves for `q` with default truncation.
pub fn solve_q(n: usize, tau: C64) -> QResult<QCoefficients> {
    solve_q_with(n, tau, SolveOptions::default())
}

pub fn solve_q_with(n: usize, tau: C64, opts: SolveOptions) -> QResult<QCoefficients> {
    if n > 4 {
        return Err(QError::UnsupportedN(n));
    }
    let ctx = ThetaContext::new(tau)?;
    let l = 2 * n + 1;
    let p_abs = (-PI * tau.im).exp();
    let ladders = opts.ladders.unwrap_or_else(|| (18.0 * 10f64.ln() / -p_abs.ln()).ceil() as usize);
    let modes = ladder_modes(n, tau, ladders);
    let m = opts.points.unwrap_or(4 * l + 8);
    let mut rows: Vec<Vec<C64>> = Vec::new();
    for i in 0..m {
        let u = 0.1 + (PI - 0.2) * i as f64 / (m - 1) as f64;
        let mut row = vec![ZERO; l];
        let mut mass = vec![0.0; l];
        for sh in [0.0, 2.0 * PI / 3.0, -2.0 * PI / 3.0] {
            let x = C64::new(u + sh, 0.0);
            let ph = ctx.th(1, x)?.powi(l as i32);
            for md in &modes {
                let v = ph * md.multiplier * (I * x * md.k as f64).exp();
                row[md.base] += v;
                mass[md.base] += v.norm();
            }
        }
        let norm = mass.iter().map(|x| x * x).sum::<f64>().sqrt();
        rows.push(row.into_iter().map(|x| x / norm).collect());
    }
    for k in 1..=n {
        let mut row = vec![ZERO; l];
        row[n + k] = C64::new(1.0 / 2f64.sqrt(), 0.0);
        row[n - k] = C64::new(-1.0 / 2f64.sqrt(), 0.0);
        rows.push(row);
    }
    let a = DMatrix::from_fn(rows.len(), l, |i, j| rows[i][j]);
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let mut order: Vec<usize> = (0..l).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let singular_values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let last = order[l - 1];
    let base: Vec<C64> = (0..l).map(|j| v_t[(last, j)].conj()).collect();
    let smallest = singular_values[l - 1];
    // With a single unknown there is no second singular value; rows have unit scale.
    // Singular values below machine precision are treated as exact zeros.
    let smallest = smallest.max(f64::EPSILON * singular_values[0]);
    let gap = if l > 1 { singular_values[l - 2] / smallest } else { 1.0 / smallest };
    if gap.is_nan() || gap < MIN_GAP {
        return Err(QError::NullspaceDegenerate { gap });
    }
    Ok(QCoefficients { n, tau, base, nullspace_gap: gap, singular_values, modes })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WronskianReport {
    pub w: C64,
    pub max_residual: f64,
    /// `max |Φ(u,u)|` relative to the term sizes.
    pub antisymmetry: f64,
    pub samples: usize,
}

/// `W·φ(u) = q(u−π/3)q(u−2π/3) − q(u+2π/3)q(u+π/3)` at 20 points, with
/// `W = −θ₂(0|3τ/2)Φ(π,π/3)/(θ₁'(0|3τ/2)φ(π/3))`.
pub fn wronskian_checks(qc: &QCoefficients) -> QResult<WronskianReport> {
    let c = qc.ctx()?.scaled(1.5);
    let third = C64::new(PI / 3.0, 0.0);
    let w = -c.th(2, ZERO)? * qc.alternant(C64::new(PI, 0.0), third)? / (c.theta(1, ZERO, 1)? * qc.phi(third)?);
    let mut worst: f64 = 0.0;
    let mut anti: f64 = 0.0;
    let samples = 20;
    for i in 0..samples {
        let u = C64::new(0.05 + 3.0 * i as f64 / samples as f64, 0.1 * (i % 3) as f64);
        let a = qc.q(u - PI / 3.0) * qc.q(u - 2.0 * PI / 3.0);
        let b = qc.q(u + 2.0 * PI / 3.0) * qc.q(u + PI / 3.0);
        let lhs = w * qc.phi(u)?;
        let scale = lhs.norm().max(a.norm()).max(b.norm());
        worst = worst.max((lhs - (a - b)).norm() / scale);
        let cc = qc.ctx()?.scaled(1.5);
        let t = cc.th(3, u * 1.5)? * cc.th(4, u * 1.5)? * qc.q(u) * qc.q(u + PI);
        anti = anti.max(qc.alternant(u, u)?.norm() / t.norm().max(1e-300));
    }
    Ok(WronskianReport { w, max_residual: worst, antisymmetry: anti, samples })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DdtReport {
    pub alpha: C64,
    pub beta: C64,
    pub beta_closed: C64,
    pub beta_residual: f64,
    pub residual: f64,
    /// Relative change in `(α, β)` when a different pair of grid points seeds the fit.
    pub seed_variation: f64,
}

const DDT_GRID: [f64; 6] = [0.2, 0.5, 1.3, 1.8, 2.4, 2.8];

/// Fits `F'' − VF = αF + βG` with
/// `F = φq/(θ₁(3u|3τ)ⁿθ₃(3u/2|3τ/2))`, `G = θ₄(3u/2|3τ/2)φ q(u+π)/(θ₁(3u|3τ)ⁿθ₃(3u/2|3τ/2)²)`,
/// `V = n(n+1)℘(u|π/3,πτ) + 2℘(u+π+πτ/2|2π/3,πτ)`.
pub fn ddt_check(qc: &QCoefficients) -> QResult<DdtReport> {
    let n = qc.n as i32;
    let tau = qc.tau;
    let ctx = qc.ctx()?;
    let c3 = ctx.scaled(3.0);
    let c32 = ctx.scaled(1.5);
    let f = |u: C64| -> Result<C64, ThetaError> {
        let phi = ctx.th(1, u)?.powi(qc.l() as i32);
        Ok(phi * qc.q(u) / (c3.th(1, u * 3.0)?.powi(n) * c32.th(3, u * 1.5)?))
    };
    let g = |u: C64| -> Result<C64, ThetaError> {
        let phi = ctx.th(1, u)?.powi(qc.l() as i32);
        Ok(c32.th(4, u * 1.5)? * phi * qc.q(u + PI) / (c3.th(1, u * 3.0)?.powi(n) * c32.th(3, u * 1.5)?.powi(2)))
    };
    // F''/F = (log F)'² + (log F)'' with every factor differentiated term-wise.
    let f2_over_f = |u: C64| -> Result<C64, ThetaError> {
        let log_parts = |c: &ThetaContext, j: u8, x: C64| -> Result<(C64, C64), ThetaError> {
            let (v, d1, d2) = (c.th(j, x)?, c.theta(j, x, 1)?, c.theta(j, x, 2)?);
            Ok((d1 / v, d2 / v - (d1 / v).powi(2)))
        };
        let (a1, a2) = log_parts(&ctx, 1, u)?;
        let (b1, b2) = log_parts(&c3, 1, u * 3.0)?;
        let (c1, c2) = log_parts(&c32, 3, u * 1.5)?;
        let (q0, q1, q2) = (qc.q(u), qc.eval(u, 1), qc.eval(u, 2));
        let (d1, d2) = (q1 / q0, q2 / q0 - (q1 / q0).powi(2));
        let l = qc.l() as f64;
        let nf = n as f64;
        let first = l * a1 + d1 - 3.0 * nf * b1 - 1.5 * c1;
        let second = l * a2 + d2 - 9.0 * nf * b2 - 2.25 * c2;
        Ok(first * first + second)
    };
    let grid: Vec<f64> = DDT_GRID
        .iter()
        .copied()
        .filter(|u| {
            let k = (u / (PI / 3.0)).round();
            (u - k * PI / 3.0).abs() > 0.05
        })
        .collect();
    if grid.len() < 3 {
        return Err(QError::GridDegenerate);
    }
    let (w1a, w1b) = (C64::new(PI / 3.0, 0.0), tau * PI);
    let w2a = C64::new(2.0 * PI / 3.0, 0.0);
    let mut rows = Vec::new();
    for &u in &grid {
        let u = C64::new(u, 0.0);
        let fv = f(u)?;
        let f2 = fv * f2_over_f(u)?;
        let v = (n * (n + 1)) as f64 * weierstrass_p(u, w1a, w1b)?
            + 2.0 * weierstrass_p(u + PI + tau * PI / 2.0, w2a, w1b)?;
        rows.push((fv, g(u)?, f2 - v * fv));
    }
    let fit = |i: usize, j: usize| -> (C64, C64) {
        let det = rows[i].0 * rows[j].1 - rows[i].1 * rows[j].0;
        let al = (rows[i].2 * rows[j].1 - rows[i].1 * rows[j].2) / det;
        let be = (rows[i].0 * rows[j].2 - rows[i].2 * rows[j].0) / det;
        (al, be)
    };
    let (alpha, beta) = fit(0, 1);
    let residual = rows.iter().map(|r| (r.2 - alpha * r.0 - beta * r.1).norm() / r.2.norm()).fold(0.0, f64::max);
    let (a2, b2) = fit(rows.len() - 2, rows.len() - 1);
    let seed_variation = rel2(alpha, a2).max(rel2(beta, b2));
    let beta_closed = -3.0 * I * c32.th(3, ZERO)? * c32.th(4, ZERO)? * qc.shifted_log_ratio();
    Ok(DdtReport { alpha, beta, beta_closed, beta_residual: rel2(beta, beta_closed), residual, seed_variation })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QfcReport {
    pub lhs: C64,
    pub rhs: C64,
    pub residual: f64,
    pub e: C64,
    /// `(2n+1)E` against `(2n+3)A + (2n−1)B − C + D`.
    pub e_decomposition_residual: f64,
}

/// `(2n+3)q''(0)q(π/3) + (2n−1)q(0)(qφ)''(π/3)/φ(π/3) + 2(2n+1)E q(0)q(π/3)
///  = 3i q'(π+πτ/2)/q(πτ/2) Φ(0,π/3)`.
pub fn qfc_check(qc: &QCoefficients) -> QResult<QfcReport> {
    let n = qc.n as i32;
    let l = 2.0 * n as f64 + 1.0;
    let ctx = qc.ctx()?;
    let third = C64::new(PI / 3.0, 0.0);
    let e = e_coefficient(&ctx, n)?;
    let qphi = |u: C64| -> Result<C64, ThetaError> { Ok(qc.q(u) * ctx.th(1, u)?.powi(qc.l() as i32)) };
    let qphi2 = 2.0 * series_taylor(qphi, third, 3)?[2];
    let (q0, q3) = (qc.q(ZERO), qc.q(third));
    let lhs = (l + 2.0) * qc.eval(ZERO, 2) * q3 + (l - 2.0) * q0 * qphi2 / qc.phi(third)? + 2.0 * l * e * q0 * q3;
    let rhs = 3.0 * I * qc.shifted_log_ratio() * qc.alternant(ZERO, third)?;
    let parts = e_parts(&ctx, n)?;
    let combo = ((l + 2.0) * parts[0] + (l - 2.0) * parts[1] - parts[2] + parts[3]) / l;
    Ok(QfcReport { lhs, rhs, residual: rel2(lhs, rhs), e, e_decomposition_residual: rel2(e, combo) })
}

/// `f_n` at `ζ(τ)` assembled from `q`.
pub fn f_from_q(qc: &QCoefficients) -> QResult<C64> {
    let mv = modular_values(qc.tau)?;
    let c32 = qc.ctx()?.scaled(1.5);
    let g = (mv.zeta + 3.0) / (mv.zeta - 1.0);
    let g2 = g * g;
    let third = C64::new(PI / 3.0, 0.0);
    let lead = (g2 - 3.0) * (g2 + 3.0) / (g2 - 1.0).powi(2);
    let pref = 3.0 * I * (g2 + 3.0) / (qc.l() as f64 * mv.chi * (g - 1.0).powi(2));
    let ratio = qc.alternant(ZERO, third)? / qc.alternant(C64::new(PI, 0.0), third)?;
    Ok(lead - pref * c32.theta(1, ZERO, 1)? / c32.th(2, ZERO)? * ratio * qc.shifted_log_ratio())
}
