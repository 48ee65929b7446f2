use std::f64::consts::PI;

use serde::Serialize;

use super::{coupling_gamma, zeta_of_eta, ThetaContext, ThetaError, ThetaResult, C64, I};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BaxterLimit {
    pub tau: C64,
    pub zeta: f64,
    /// Ground-state energy per site at `η = π/3`.
    pub energy: f64,
    pub series: f64,
    pub closed: f64,
    pub diff: f64,
}

/// The series `S(η)` in the per-site energy and its `η`-derivative.
fn energy_series(eta: f64, tau: C64) -> ThetaResult<(C64, C64)> {
    let q_half = (-I * PI / tau).exp();
    let x = (I * (2.0 * eta - PI) / tau).exp();
    if !(x.norm() < 1.0 && q_half.norm() < x.norm()) {
        return Err(ThetaError::SeriesDivergence { x_abs: x.norm(), q_half_abs: q_half.norm() });
    }
    let dx = x * 2.0 * I / tau;
    let (mut s, mut ds) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    for m in 1..400 {
        let mf = m as f64;
        let qm = q_half.powi(2 * m);
        let qmh = q_half.powi(m);
        let xm = x.powi(m);
        let a = 1.0 / xm;
        let b = x.powi(3 * m) - qmh;
        let c = 1.0 - qmh / xm;
        let d = 1.0 - xm * xm;
        let e = 1.0 / ((1.0 - qm) * (1.0 + xm * xm));
        let da = -mf / (xm * x);
        let db = 3.0 * mf * x.powi(3 * m - 1);
        let dc = mf * qmh / (xm * x);
        let dd = -2.0 * mf * x.powi(2 * m - 1);
        let de = -e * e * (1.0 - qm) * 2.0 * mf * x.powi(2 * m - 1);
        let term = a * b * c * d * e;
        let dterm =
            (da * b * c * d * e + a * db * c * d * e + a * b * dc * d * e + a * b * c * dd * e + a * b * c * d * de)
                * dx;
        s += term;
        ds += dterm;
        // At η = π/3 every term vanishes, so convergence is judged on the derivative too.
        if m > 5 && term.norm() + dterm.norm() < 1e-18 * (1.0 + ds.norm()) {
            return Ok((s, ds));
        }
    }
    Err(ThetaError::TruncationFailure { max_terms: 400 })
}

fn prefactor(eta: f64, tau: C64) -> ThetaResult<C64> {
    let c1 = ThetaContext::new(tau)?;
    let c2 = c1.scaled(2.0);
    let e2 = C64::new(2.0 * eta, 0.0);
    Ok(-4.0 * I * c2.th(1, e2)? / (tau * c1.th(2, C64::new(0.0, 0.0))?.powi(2) * c2.th(4, e2)?))
}

fn energy(eta: f64, tau: C64) -> ThetaResult<C64> {
    let e = C64::new(eta, 0.0);
    let z = zeta_of_eta(e, tau)?;
    let couplings = (1.0 + z) + (1.0 - z) + coupling_gamma(e, tau)?;
    Ok(-couplings / 2.0 + prefactor(eta, tau)? * energy_series(eta, tau)?.0)
}

/// Central difference with one Richardson level, step `h`.
fn richardson<F: Fn(f64) -> ThetaResult<C64>>(f: F, x: f64, h: f64) -> ThetaResult<C64> {
    let d1 = (f(x + h)? - f(x - h)?) / (2.0 * h);
    let d2 = (f(x + h / 2.0)? - f(x - h / 2.0)?) / h;
    Ok((4.0 * d2 - d1) / 3.0)
}

/// `f_∞` from the infinite-lattice energy series at `η = π/3`, against the
/// closed form `−(ζ²+3)(ζ²−6ζ−3)/(8(ζ+1)²)`.
pub fn baxter_f_infinity(tau: C64) -> ThetaResult<BaxterLimit> {
    let eta = PI / 3.0;
    let h = 1e-5;
    let e = C64::new(eta, 0.0);
    let zeta = zeta_of_eta(e, tau)?;
    let zeta_e = richardson(|x| zeta_of_eta(C64::new(x, 0.0), tau), eta, h)?;
    let gamma_e = richardson(|x| coupling_gamma(C64::new(x, 0.0), tau), eta, h)?;
    let (s, ds) = energy_series(eta, tau)?;
    let pre = prefactor(eta, tau)?;
    let pre_e = richardson(|x| prefactor(x, tau), eta, h)?;
    let eps = energy(eta, tau)?;
    // J_x + J_y + J_z = 2 + Γ, so its η-derivative is Γ_η.
    let eps_e = -gamma_e / 2.0 + pre * ds + pre_e * s;
    let finf = eps * (2.0 * eps_e + gamma_e) / (zeta * zeta_e - gamma_e);
    let zr = zeta.re;
    let closed = -(zr * zr + 3.0) * (zr * zr - 6.0 * zr - 3.0) / (8.0 * (zr + 1.0).powi(2));
    Ok(BaxterLimit { tau, zeta: zr, energy: eps.re, series: finf.re, closed, diff: (finf.re - closed).abs() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_vanishes_on_line() {
        let (s, ds) = energy_series(PI / 3.0, I).unwrap();
        assert!(s.norm() < 1e-15);
        assert!(ds.norm() > 1e-6);
        let lim = baxter_f_infinity(I).unwrap();
        assert!((lim.energy + (lim.zeta * lim.zeta + 3.0) / 4.0).abs() < 1e-13);
    }

    #[test]
    fn matches_closed_form() {
        for t in [0.6, 1.0, 1.5, 2.5] {
            let lim = baxter_f_infinity(I * t).unwrap();
            assert!(lim.diff < 1e-9, "{t}: {lim:?}");
        }
    }
}
