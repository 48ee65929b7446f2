use num_complex::Complex64;
use xyzcorr::corrfn::f_zeta;
use xyzcorr::qsolver::*;
use xyzcorr::taurec::TauTable;
use xyzcorr::thetanum::{modular_values, I};

#[test]
fn residuals_and_f_at_unit_tau() {
    let mut table = TauTable::new();
    let zeta = modular_values(I).unwrap().zeta.re;
    for n in 0..=3 {
        let qc = solve_q(n, I).unwrap();
        assert!(qc.nullspace_gap >= 1e6);
        let w = wronskian_checks(&qc).unwrap();
        let d = ddt_check(&qc).unwrap();
        let q = qfc_check(&qc).unwrap();
        assert!(w.max_residual < 1e-7 && w.antisymmetry < 1e-7, "{w:?}");
        assert!(d.residual < 1e-7 && d.beta_residual < 1e-7 && d.seed_variation < 1e-8, "{d:?}");
        assert!(q.residual < 1e-7 && q.e_decomposition_residual < 1e-7, "{q:?}");
        if n <= 2 {
            let f = f_from_q(&qc).unwrap();
            let exact = f_zeta(&mut table, n as i64).unwrap().eval_f64(zeta);
            assert!((f - exact).norm() < 1e-6, "n={n}: {f} vs {exact}");
        }
    }
}

#[test]
fn checks_are_homogeneous_in_q() {
    for n in 1..=2 {
        let qc = solve_q(n, I).unwrap();
        let big = qc.scaled(Complex64::new(10.0, 0.0));
        let (a, b) = (ddt_check(&qc).unwrap(), ddt_check(&big).unwrap());
        assert!((a.residual - b.residual).abs() < 1e-12);
        assert!((a.alpha - b.alpha).norm() < 1e-12 * a.alpha.norm().max(1.0));
        let (a, b) = (qfc_check(&qc).unwrap(), qfc_check(&big).unwrap());
        assert!((a.residual - b.residual).abs() < 1e-12);
        let (a, b) = (f_from_q(&qc).unwrap(), f_from_q(&big).unwrap());
        assert!((a - b).norm() < 1e-12);
    }
}

#[test]
fn doubling_truncation_keeps_residuals() {
    let tau = I * 0.8;
    for n in 1..=2 {
        let qc = solve_q(n, tau).unwrap();
        let l = 2 * n + 1;
        let ladders = (18.0 * 10f64.ln() / (std::f64::consts::PI * tau.im)).ceil() as usize;
        let fine =
            solve_q_with(n, tau, SolveOptions { ladders: Some(2 * ladders), points: Some(2 * (4 * l + 8)) }).unwrap();
        let (r0, r1) = (ddt_check(&qc).unwrap().residual, ddt_check(&fine).unwrap().residual);
        assert!(r1 < 10.0 * r0.max(1e-13) && r0 < 10.0 * r1.max(1e-13), "{r0:e} vs {r1:e}");
        assert!((f_from_q(&qc).unwrap() - f_from_q(&fine).unwrap()).norm() < 1e-9);
    }
}

#[test]
fn rejects_large_n() {
    assert!(matches!(solve_q(5, I), Err(QError::UnsupportedN(5))));
}
