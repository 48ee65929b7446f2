use num_complex::Complex64;
use num_rational::BigRational;
use xyzcorr::corrfn::f_zeta;
use xyzcorr::edoracle::*;
use xyzcorr::exact::rat;
use xyzcorr::taurec::TauTable;

fn samples() -> impl Iterator<Item = (BigRational, f64)> {
    ZETA_SAMPLES.iter().map(|&(p, q)| (rat(p, q), p as f64 / q as f64))
}

#[test]
fn energies_and_f_match_exact_values() {
    let mut table = TauTable::new();
    for l in [3usize, 5, 7, 9] {
        let f = f_zeta(&mut table, ((l - 1) / 2) as i64).unwrap();
        for (zq, z) in samples() {
            let gs = ground_state_even_sector(l, z).unwrap();
            let e = -(l as f64) * (z * z + 3.0) / 4.0;
            assert!(((gs.energy - e) / e).abs() < 1e-10, "L={l} z={z}");
            let c = measure_correlations(&gs);
            assert!(c.spread < 1e-9);
            let inf = infer_from(&c, z).unwrap();
            let exact = f.eval(&zq).unwrap();
            let fe = num_traits::ToPrimitive::to_f64(&exact).unwrap();
            assert!((inf.fz - fe).abs() < 1e-7 && inf.disagreement() < 1e-7, "L={l} z={z}: {inf:?} vs {fe}");
        }
    }
}

#[test]
fn five_site_third_matches_table() {
    let mut table = TauTable::new();
    let f2 = f_zeta(&mut table, 2).unwrap().eval_f64(1.0 / 3.0);
    let inf = infer_f(5, 1.0 / 3.0).unwrap();
    assert!((inf.fx - f2).abs() < 1e-10 && (inf.fy - f2).abs() < 1e-10 && (inf.fz - f2).abs() < 1e-10);
}

#[test]
fn lanczos_regime_converges() {
    let gs = ground_state_even_sector(13, 0.4).unwrap();
    assert!(gs.residual < 1e-10 * build_hamiltonian(13, 0.4).unwrap().norm_bound());
    assert!((gs.energy + 13.0 * 3.16 / 4.0).abs() < 1e-9);
}

#[test]
fn symmetries_commute_with_hamiltonian() {
    for l in [3, 5, 7, 9] {
        let h = build_hamiltonian(l, 0.7).unwrap();
        let (cf, ct) = symmetry_commutators(&h, l as u64);
        assert!(cf < 1e-13 && ct < 1e-13);
    }
}

#[test]
fn transfer_matrix_eigenvalue_and_commutation() {
    for l in [3, 5, 7] {
        for t in [0.5, 1.0] {
            let r = transfer_check(l, Complex64::new(0.0, t), &SPECTRAL_POINTS).unwrap();
            assert!(r.eigen_residual < 1e-8 && r.commutator < 1e-9 && r.quasi_periodicity < 1e-12, "{r:?}");
        }
    }
}

#[test]
fn transfer_rejects_large_chain() {
    assert!(matches!(transfer_check(11, Complex64::new(0.0, 1.0), &SPECTRAL_POINTS), Err(EdError::SizeLimit { .. })));
}
