use std::f64::consts::PI;

use serde::Serialize;

use super::{rel2, ThetaContext, ThetaError, ThetaResult, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

/// The modular functions of `τ` on the supersymmetric line `η = π/3`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModularValues {
    pub tau: C64,
    pub zeta: C64,
    /// `Γ`, the `J_z`-type coupling.
    pub coupling: C64,
    pub z: C64,
    pub gamma_sq: C64,
    pub chi: C64,
    /// Largest residual among the cross-checks performed on construction.
    pub cross_check: f64,
}

/// `ζ(η) = θ₁(2η|2τ)²/θ₄(2η|2τ)²`.
pub fn zeta_of_eta(eta: C64, tau: C64) -> ThetaResult<C64> {
    let c2 = ThetaContext::new(tau)?.scaled(2.0);
    Ok((c2.th(1, eta * 2.0)? / c2.th(4, eta * 2.0)?).powi(2))
}

/// `Γ(η) = θ₂(2η|2τ)θ₃(2η|2τ)θ₄(0|2τ)² / (θ₂(0|2τ)θ₃(0|2τ)θ₄(2η|2τ)²)`.
pub fn coupling_gamma(eta: C64, tau: C64) -> ThetaResult<C64> {
    let c2 = ThetaContext::new(tau)?.scaled(2.0);
    let x = eta * 2.0;
    Ok(c2.th(2, x)? * c2.th(3, x)? * c2.th(4, ZERO)?.powi(2)
        / (c2.th(2, ZERO)? * c2.th(3, ZERO)? * c2.th(4, x)?.powi(2)))
}

fn log_derivative(ctx: &ThetaContext, j: u8, x: C64) -> ThetaResult<C64> {
    Ok(ctx.theta(j, x, 1)? / ctx.th(j, x)?)
}

/// `∂ζ/∂η`, from term-wise differentiated theta series.
pub fn zeta_deta(eta: C64, tau: C64) -> ThetaResult<C64> {
    let c2 = ThetaContext::new(tau)?.scaled(2.0);
    let x = eta * 2.0;
    let z = zeta_of_eta(eta, tau)?;
    Ok(z * 4.0 * (log_derivative(&c2, 1, x)? - log_derivative(&c2, 4, x)?))
}

/// `∂Γ/∂η`, from term-wise differentiated theta series.
pub fn coupling_gamma_deta(eta: C64, tau: C64) -> ThetaResult<C64> {
    let c2 = ThetaContext::new(tau)?.scaled(2.0);
    let x = eta * 2.0;
    let g = coupling_gamma(eta, tau)?;
    Ok(g * 2.0 * (log_derivative(&c2, 2, x)? + log_derivative(&c2, 3, x)? - 2.0 * log_derivative(&c2, 4, x)?))
}

/// Eight-vertex Boltzmann weights.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Weights {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

/// Weights at spectral parameter `u`, crossing `η`, normalized by `ρ = 2/(θ₂(0|τ)θ₄(0|2τ))`.
/// With `order = 1` the `u`-derivatives are returned instead.
pub fn boltzmann_weights(u: C64, eta: C64, tau: C64, order: u32) -> ThetaResult<Weights> {
    let c1 = ThetaContext::new(tau)?;
    let c2 = c1.scaled(2.0);
    let rho = 2.0 / (c1.th(2, ZERO)? * c2.th(4, ZERO)?);
    let (um, up) = (u - eta, u + eta);
    let pair = |j: u8, k: u8| -> ThetaResult<C64> {
        match order {
            0 => Ok(c2.th(j, um)? * c2.th(k, up)?),
            _ => Ok(c2.theta(j, um, 1)? * c2.th(k, up)? + c2.th(j, um)? * c2.theta(k, up, 1)?),
        }
    };
    let t4 = c2.th(4, eta * 2.0)?;
    let t1 = c2.th(1, eta * 2.0)?;
    Ok(Weights {
        a: rho * t4 * pair(4, 1)?,
        b: rho * t4 * pair(1, 4)?,
        c: rho * t1 * pair(4, 4)?,
        d: rho * t1 * pair(1, 1)?,
    })
}

/// `ζ`, `Γ`, `z`, `γ²`, `χ` at `η = π/3`, with the theta-quotient forms of
/// `1±ζ`, `3±ζ`, the second form of `ζ`, `γ²` in terms of `z`, and
/// `Γ = (ζ²−1)/2` all checked to `1e−12`.
pub fn modular_values(tau: C64) -> ThetaResult<ModularValues> {
    let (values, checks) = values_and_checks(tau)?;
    let mut worst: f64 = 0.0;
    for (name, r) in checks {
        if r.is_nan() || r > 1e-12 {
            return Err(ThetaError::CrossCheckFailure { name, residual: r });
        }
        worst = worst.max(r);
    }
    Ok(ModularValues { cross_check: worst, ..values })
}

/// Named residuals of the consistency relations enforced by [`modular_values`].
pub(crate) fn cross_checks(tau: C64) -> ThetaResult<Vec<(&'static str, f64)>> {
    Ok(values_and_checks(tau)?.1)
}

fn values_and_checks(tau: C64) -> ThetaResult<(ModularValues, Vec<(&'static str, f64)>)> {
    let ctx = ThetaContext::new(tau)?;
    let third = C64::new(PI / 3.0, 0.0);
    let zeta = zeta_of_eta(third, tau)?;
    let coupling = coupling_gamma(third, tau)?;
    let t = |j: u8, u: C64| ctx.th(j, u);
    let d1 = ctx.theta(1, ZERO, 1)?;
    let chi = d1.powi(2) * t(2, third)?.powi(2) / (t(1, third)?.powi(2) * t(2, ZERO)?.powi(2));
    let half = ctx.scaled(0.5);
    let z = -half.th(2, ZERO)? * half.th(3, third)? / (half.th(3, ZERO)? * half.th(2, third)?);
    let gamma = (zeta + 3.0) / (zeta - 1.0);
    let gamma_sq = gamma * gamma;

    let (a1, a2, a3, a4) = (t(1, third)?, t(2, third)?, t(3, third)?, t(4, third)?);
    let (b2, b3, b4) = (t(2, ZERO)?, t(3, ZERO)?, t(4, ZERO)?);
    let checks: [(&'static str, C64, C64); 8] = [
        ("zeta_second_form", zeta, (a1 * a2 / (a3 * a4)).powi(2)),
        ("one_plus_zeta", 1.0 + zeta, 2.0 * a2 * b3 / (b2 * a3)),
        ("one_minus_zeta", 1.0 - zeta, 2.0 * a2 * b4 / (b2 * a4)),
        ("three_plus_zeta", 3.0 + zeta, 2.0 * a1 * a1 * b4 * a4 / (b2 * a2 * a3 * a3)),
        ("three_minus_zeta", 3.0 - zeta, 2.0 * a1 * a1 * b3 * a3 / (b2 * a2 * a4 * a4)),
        ("gamma_theta_form", gamma, -(a1 * a4 / (a2 * a3)).powi(2)),
        ("gamma_squared", gamma_sq, (1.0 - z) * (1.0 + 2.0 * z) / (1.0 + z)),
        ("coupling_on_line", coupling, (zeta * zeta - 1.0) / 2.0),
    ];
    let residuals = checks.iter().map(|&(name, lhs, rhs)| (name, rel2(lhs, rhs))).collect();
    Ok((ModularValues { tau, zeta, coupling, z, gamma_sq, chi, cross_check: 0.0 }, residuals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thetanum::{c64, I};

    #[test]
    fn zeta_in_unit_interval_on_imaginary_axis() {
        for t in [0.5, 1.0, 2.0] {
            let m = modular_values(I * t).unwrap();
            assert!(m.zeta.im.abs() < 1e-14 && m.zeta.re > 0.0 && m.zeta.re < 1.0, "{t}: {}", m.zeta);
            assert!(m.cross_check < 1e-12);
        }
    }

    #[test]
    fn eta_derivatives_match_differences() {
        let (eta, tau) = (c64(0.9, 0.05), c64(0.1, 1.1));
        let h = 1e-5;
        let fd = |f: &dyn Fn(C64) -> ThetaResult<C64>| (f(eta + h).unwrap() - f(eta - h).unwrap()) / (2.0 * h);
        assert!(rel2(fd(&|e| zeta_of_eta(e, tau)), zeta_deta(eta, tau).unwrap()) < 1e-8);
        assert!(rel2(fd(&|e| coupling_gamma(e, tau)), coupling_gamma_deta(eta, tau).unwrap()) < 1e-8);
    }

    #[test]
    fn weight_derivative_matches_difference() {
        let (u, eta, tau) = (c64(0.7, 0.1), c64(PI / 3.0, 0.0), I);
        let h = 1e-5;
        let up = boltzmann_weights(u + h, eta, tau, 0).unwrap();
        let dn = boltzmann_weights(u - h, eta, tau, 0).unwrap();
        let d = boltzmann_weights(u, eta, tau, 1).unwrap();
        for (p, m, a) in [(up.a, dn.a, d.a), (up.b, dn.b, d.b), (up.c, dn.c, d.c), (up.d, dn.d, d.d)] {
            assert!(rel2((p - m) / (2.0 * h), a) < 1e-8);
        }
    }
}
