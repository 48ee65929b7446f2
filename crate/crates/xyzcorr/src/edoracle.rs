//! Exact diagonalization of the periodic XYZ chain and the eight-vertex
//! transfer matrix, used as a brute-force oracle for `f_n`.
//!
//! Basis states are bit strings; bit `j` set means spin `j` is down. The
//! sector `W⁺` is the span of states with an even number of down spins.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::thetanum::{boltzmann_weights, ThetaContext, ThetaError};

pub const MAX_SITES: usize = 13;
pub const MAX_TRANSFER_SITES: usize = 9;
pub const DENSE_LIMIT: usize = 2048;
pub const DEGENERACY_TOLERANCE: f64 = 1e-8;
pub const INVERSION_RADIUS: f64 = 1e-3;

/// Rational sample points in `(−3, 3)` away from `0` and `±1`, as `(num, den)`.
pub const ZETA_SAMPLES: [(i64, i64); 10] =
    [(-5, 2), (-3, 2), (-2, 3), (-1, 3), (1, 5), (2, 5), (1, 2), (3, 4), (3, 2), (5, 2)];

/// Samples for the transfer-matrix eigenvalue check.
pub const SPECTRAL_POINTS: [f64; 5] = [0.3, 0.7, 1.1, 1.9, 2.6];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EdError {
    #[error("chain length {l} must be odd and in 3..={max}")]
    SizeLimit { l: usize, max: usize },
    #[error("eigensolver did not converge (residual {residual:e})")]
    NoConvergence { residual: f64 },
    #[error("sector ground level is degenerate (relative gap {gap:e})")]
    DegenerateSectorGround { gap: f64 },
    #[error("zeta = {zeta} is too close to ±1 for the x/y inversion")]
    NearSingularInversion { zeta: f64 },
    #[error(transparent)]
    ThetaPrecision(#[from] ThetaError),
}

pub type EdResult<T> = Result<T, EdError>;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Couplings {
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
}

impl Couplings {
    /// `J_x = 1+ζ`, `J_y = 1−ζ`, `J_z = (ζ²−1)/2`.
    pub fn supersymmetric(zeta: f64) -> Self {
        Couplings { jx: 1.0 + zeta, jy: 1.0 - zeta, jz: (zeta * zeta - 1.0) / 2.0 }
    }
}

/// `H = −½ Σ_j (J_x σˣσˣ + J_y σʸσʸ + J_z σᶻσᶻ)` on a periodic chain, applied matrix-free.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinOperator {
    pub l: usize,
    pub couplings: Couplings,
}

fn check_length(l: usize, max: usize) -> EdResult<()> {
    if !(3..=max).contains(&l) || l.is_multiple_of(2) {
        return Err(EdError::SizeLimit { l, max });
    }
    Ok(())
}

pub fn build_hamiltonian(l: usize, zeta: f64) -> EdResult<SpinOperator> {
    build_hamiltonian_with(l, Couplings::supersymmetric(zeta))
}

pub fn build_hamiltonian_with(l: usize, couplings: Couplings) -> EdResult<SpinOperator> {
    check_length(l, MAX_SITES)?;
    Ok(SpinOperator { l, couplings })
}

impl SpinOperator {
    pub fn dim(&self) -> usize {
        1 << self.l
    }

    /// Nonzero entries of column `s`: `(row, value)`, diagonal first.
    fn column(&self, s: usize, mut visit: impl FnMut(usize, f64)) {
        let Couplings { jx, jy, jz } = self.couplings;
        let mut diag = 0.0;
        for j in 0..self.l {
            let k = (j + 1) % self.l;
            let zz = if (s >> j) & 1 == (s >> k) & 1 { 1.0 } else { -1.0 };
            diag += -0.5 * jz * zz;
        }
        visit(s, diag);
        for j in 0..self.l {
            let k = (j + 1) % self.l;
            let zz = if (s >> j) & 1 == (s >> k) & 1 { 1.0 } else { -1.0 };
            let off = -0.5 * (jx - jy * zz);
            if off != 0.0 {
                visit(s ^ (1 << j) ^ (1 << k), off);
            }
        }
    }

    /// `H v` on the full `2^L` space.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (s, &x) in v.iter().enumerate() {
            if x != 0.0 {
                self.column(s, |t, h| out[t] += h * x);
            }
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for s in 0..n {
            self.column(s, |t, h| m[(t, s)] += h);
        }
        m
    }

    /// Upper bound on the spectral norm.
    pub fn norm_bound(&self) -> f64 {
        let c = self.couplings;
        0.5 * self.l as f64 * (c.jx.abs() + c.jy.abs() + c.jz.abs())
    }
}

/// Even-parity basis of `W⁺` with the inverse index map.
#[derive(Clone, Debug, PartialEq)]
pub struct Sector {
    pub states: Vec<usize>,
    index: Vec<u32>,
}

impl Sector {
    pub fn even(l: usize) -> Self {
        let states: Vec<usize> = (0..1usize << l).filter(|s| s.count_ones() % 2 == 0).collect();
        let mut index = vec![u32::MAX; 1 << l];
        for (i, &s) in states.iter().enumerate() {
            index[s] = i as u32;
        }
        Sector { states, index }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    fn apply(&self, h: &SpinOperator, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (i, &s) in self.states.iter().enumerate() {
            let x = v[i];
            h.column(s, |t, val| out[self.index[t] as usize] += val * x);
        }
        out
    }

    fn dense(&self, h: &SpinOperator) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (i, &s) in self.states.iter().enumerate() {
            h.column(s, |t, val| m[(self.index[t] as usize, i)] += val);
        }
        m
    }

    pub fn embed(&self, v: &[f64], l: usize) -> Vec<f64> {
        let mut full = vec![0.0; 1 << l];
        for (i, &s) in self.states.iter().enumerate() {
            full[s] = v[i];
        }
        full
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroundState {
    pub l: usize,
    pub couplings: Couplings,
    pub energy: f64,
    /// Next level in the sector.
    pub next_energy: f64,
    /// Ground vector on the full `2^L` space, zero outside `W⁺`.
    pub vector: Vec<f64>,
    /// `‖Hψ − Eψ‖`.
    pub residual: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn lowest_two_dense(m: DMatrix<f64>) -> (f64, f64, Vec<f64>) {
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let i0 = order[0];
    let next = order.get(1).map_or(f64::INFINITY, |&i| eig.eigenvalues[i]);
    (eig.eigenvalues[i0], next, eig.eigenvectors.column(i0).iter().copied().collect())
}

/// Lanczos with full reorthogonalization for the lowest pair of the sector operator.
fn lanczos(sector: &Sector, h: &SpinOperator, tol: f64) -> EdResult<(f64, f64, Vec<f64>)> {
    let n = sector.dim();
    let max_steps = n.min(600);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut basis: Vec<Vec<f64>> = vec![v];
    let (mut alphas, mut betas) = (Vec::new(), Vec::new());
    let mut best = f64::INFINITY;
    for step in 0..max_steps {
        let mut w = sector.apply(h, &basis[step]);
        let a = dot(&w, &basis[step]);
        alphas.push(a);
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let beta = norm(&w);
        let k = alphas.len();
        if k >= 2 && (k % 10 == 0 || beta < tol || k == max_steps) {
            let t = DMatrix::from_fn(k, k, |i, j| {
                if i == j {
                    alphas[i]
                } else if i + 1 == j || j + 1 == i {
                    betas[i.min(j)]
                } else {
                    0.0
                }
            });
            let (e0, e1, y) = lowest_two_dense(t);
            let estimate = beta * y[k - 1].abs();
            best = best.min(estimate);
            if estimate < tol {
                let mut psi = vec![0.0; n];
                for (coef, b) in y.iter().zip(&basis) {
                    psi.iter_mut().zip(b).for_each(|(x, bb)| *x += coef * bb);
                }
                let np = norm(&psi);
                psi.iter_mut().for_each(|x| *x /= np);
                return Ok((e0, e1, psi));
            }
        }
        if beta < 1e-300 {
            break;
        }
        betas.push(beta);
        basis.push(w.into_iter().map(|x| x / beta).collect());
    }
    Err(EdError::NoConvergence { residual: best })
}

/// Lowest eigenpair of `H` restricted to `W⁺`.
pub fn ground_state_even_sector(l: usize, zeta: f64) -> EdResult<GroundState> {
    ground_state_of(&build_hamiltonian(l, zeta)?)
}

pub fn ground_state_of(h: &SpinOperator) -> EdResult<GroundState> {
    let sector = Sector::even(h.l);
    let bound = h.norm_bound();
    let (energy, next_energy, v) = if sector.dim() <= DENSE_LIMIT {
        lowest_two_dense(sector.dense(h))
    } else {
        lanczos(&sector, h, 1e-12 * bound)?
    };
    let hv = sector.apply(h, &v);
    let residual = norm(&hv.iter().zip(&v).map(|(a, b)| a - energy * b).collect::<Vec<_>>());
    if residual.is_nan() || residual > 1e-10 * bound {
        return Err(EdError::NoConvergence { residual });
    }
    let gap = (next_energy - energy) / energy.abs().max(1.0);
    if gap < DEGENERACY_TOLERANCE {
        return Err(EdError::DegenerateSectorGround { gap });
    }
    Ok(GroundState { l: h.l, couplings: h.couplings, energy, next_energy, vector: sector.embed(&v, h.l), residual })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Correlations {
    /// Bond averages `(⟨σˣσˣ⟩, ⟨σʸσʸ⟩, ⟨σᶻσᶻ⟩)`.
    pub cx: f64,
    pub cy: f64,
    pub cz: f64,
    pub per_bond: Vec<[f64; 3]>,
    /// Largest deviation of any bond value from its average.
    pub spread: f64,
}

pub fn measure_correlations(state: &GroundState) -> Correlations {
    let l = state.l;
    let psi = &state.vector;
    let nrm2 = dot(psi, psi);
    let mut per_bond = Vec::with_capacity(l);
    for j in 0..l {
        let k = (j + 1) % l;
        let (mut x, mut y, mut z) = (0.0, 0.0, 0.0);
        for (s, &a) in psi.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let zz = if (s >> j) & 1 == (s >> k) & 1 { 1.0 } else { -1.0 };
            z += zz * a * a;
            let b = psi[s ^ (1 << j) ^ (1 << k)];
            x += a * b;
            y += -zz * a * b;
        }
        per_bond.push([x / nrm2, y / nrm2, z / nrm2]);
    }
    let avg = |i: usize| per_bond.iter().map(|b| b[i]).sum::<f64>() / l as f64;
    let (cx, cy, cz) = (avg(0), avg(1), avg(2));
    let spread =
        per_bond.iter().flat_map(|b| [(b[0] - cx).abs(), (b[1] - cy).abs(), (b[2] - cz).abs()]).fold(0.0, f64::max);
    Correlations { cx, cy, cz, per_bond, spread }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InferredF {
    pub fx: f64,
    pub fy: f64,
    pub fz: f64,
}

impl InferredF {
    /// Largest pairwise difference.
    pub fn disagreement(&self) -> f64 {
        (self.fx - self.fy).abs().max((self.fx - self.fz).abs()).max((self.fy - self.fz).abs())
    }
}

/// Inverts `C^x = 1 − (1−ζ)²f/(ζ²+3)`, `C^y = 1 − (1+ζ)²f/(ζ²+3)`, `C^z = 1 − 4f/(ζ²+3)`.
pub fn infer_from(c: &Correlations, zeta: f64) -> EdResult<InferredF> {
    if (zeta - 1.0).abs() < INVERSION_RADIUS || (zeta + 1.0).abs() < INVERSION_RADIUS {
        return Err(EdError::NearSingularInversion { zeta });
    }
    let w = zeta * zeta + 3.0;
    Ok(InferredF {
        fx: (1.0 - c.cx) * w / (1.0 - zeta).powi(2),
        fy: (1.0 - c.cy) * w / (1.0 + zeta).powi(2),
        fz: (1.0 - c.cz) * w / 4.0,
    })
}

pub fn infer_f(l: usize, zeta: f64) -> EdResult<InferredF> {
    let gs = ground_state_even_sector(l, zeta)?;
    infer_from(&measure_correlations(&gs), zeta)
}

/// Relative norms of `[H, F]` and `[H, T]` on a random vector, `F` the global
/// spin flip and `T` the lattice translation.
pub fn symmetry_commutators(h: &SpinOperator, seed: u64) -> (f64, f64) {
    let n = h.dim();
    let l = h.l;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let flip = |w: &[f64]| -> Vec<f64> { (0..n).map(|s| w[s ^ (n - 1)]).collect() };
    let shift = |w: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; n];
        for (s, &x) in w.iter().enumerate() {
            let t = ((s << 1) | (s >> (l - 1))) & (n - 1);
            out[t] = x;
        }
        out
    };
    let diff = |a: Vec<f64>, b: Vec<f64>| norm(&a.iter().zip(&b).map(|(x, y)| x - y).collect::<Vec<_>>());
    let scale = h.norm_bound() * norm(&v);
    let cf = diff(h.apply(&flip(&v)), flip(&h.apply(&v))) / scale;
    let ct = diff(h.apply(&shift(&v)), shift(&h.apply(&v))) / scale;
    (cf, ct)
}

/// `T(u) = Tr₀(R₀₁ ⋯ R₀L)` on `(ℂ²)^{⊗L}`, site bits most-significant first.
pub fn transfer_matrix(l: usize, u: f64, eta: f64, tau: Complex64) -> EdResult<DMatrix<Complex64>> {
    check_length(l, MAX_TRANSFER_SITES)?;
    ThetaContext::new(tau)?;
    let w = boltzmann_weights(Complex64::new(u, 0.0), Complex64::new(eta, 0.0), tau, 0)?;
    let zero = Complex64::new(0.0, 0.0);
    // R[a_out][s_out][a_in][s_in]
    let mut r = [[[[zero; 2]; 2]; 2]; 2];
    let entries = [
        ((0, 0, 0, 0), w.a),
        ((1, 1, 1, 1), w.a),
        ((0, 1, 0, 1), w.b),
        ((1, 0, 1, 0), w.b),
        ((0, 1, 1, 0), w.c),
        ((1, 0, 0, 1), w.c),
        ((0, 0, 1, 1), w.d),
        ((1, 1, 0, 0), w.d),
    ];
    for ((a, b, c, d), v) in entries {
        r[a][b][c][d] = v;
    }
    let n = 1usize << l;
    let mut t = DMatrix::from_element(n, n, zero);
    for s_in in 0..n {
        // x[a_start][a_cur] holds amplitudes over the output bits produced so far.
        let mut x: [[Vec<Complex64>; 2]; 2] =
            [[vec![Complex64::new(1.0, 0.0)], vec![zero]], [vec![zero], vec![Complex64::new(1.0, 0.0)]]];
        for j in 0..l {
            let bit = (s_in >> (l - 1 - j)) & 1;
            let len = x[0][0].len() * 2;
            let mut y: [[Vec<Complex64>; 2]; 2] = Default::default();
            for row in y.iter_mut() {
                for cell in row.iter_mut() {
                    *cell = vec![zero; len];
                }
            }
            for a0 in 0..2 {
                for a1 in 0..2 {
                    for a2 in 0..2 {
                        for so in 0..2 {
                            let wv = r[a1][so][a2][bit];
                            if wv == zero {
                                continue;
                            }
                            for (i, &xv) in x[a0][a1].iter().enumerate() {
                                y[a0][a2][2 * i + so] += wv * xv;
                            }
                        }
                    }
                }
            }
            x = y;
        }
        for s_out in 0..n {
            t[(s_out, s_in)] = x[0][0][s_out] + x[1][1][s_out];
        }
    }
    Ok(t)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransferReport {
    pub l: usize,
    pub tau: Complex64,
    pub zeta: f64,
    /// `max_u ‖T(u)ψ − θ₁(u|τ)^L ψ‖ / |θ₁(u|τ)^L|`.
    pub eigen_residual: f64,
    /// `‖[T(u),T(v)]‖ / (‖T(u)‖‖T(v)‖)`.
    pub commutator: f64,
    /// `‖T(u+π) − (−1)^L T(u)‖ / ‖T(u)‖`.
    pub quasi_periodicity: f64,
}

/// At `η = π/3`, checks that the sector ground state of `H(ζ(τ))` is an
/// eigenvector of `T(u)` with eigenvalue `θ₁(u|τ)^L`.
pub fn transfer_check(l: usize, tau: Complex64, us: &[f64]) -> EdResult<TransferReport> {
    let eta = std::f64::consts::PI / 3.0;
    let mv = crate::thetanum::modular_values(tau)?;
    let zeta = mv.zeta.re;
    let h = build_hamiltonian_with(l, Couplings { jx: 1.0 + zeta, jy: 1.0 - zeta, jz: mv.coupling.re })?;
    let gs = ground_state_of(&h)?;
    let psi = DVector::from_iterator(gs.vector.len(), gs.vector.iter().map(|&x| Complex64::new(x, 0.0)));
    let ctx = ThetaContext::new(tau)?;
    let mut eigen_residual: f64 = 0.0;
    let mut mats = Vec::new();
    for &u in us {
        let t = transfer_matrix(l, u, eta, tau)?;
        let lam = ctx.th(1, Complex64::new(u, 0.0))?.powi(l as i32);
        let r = (&t * &psi - &psi * lam).norm() / (lam.norm() * psi.norm());
        eigen_residual = eigen_residual.max(r);
        mats.push(t);
    }
    let mut commutator: f64 = 0.0;
    for i in 0..mats.len() {
        for j in i + 1..mats.len() {
            let c = &mats[i] * &mats[j] - &mats[j] * &mats[i];
            commutator = commutator.max(c.norm() / (mats[i].norm() * mats[j].norm()));
        }
    }
    let u0 = us.first().copied().unwrap_or(0.4);
    let t0 = transfer_matrix(l, u0, eta, tau)?;
    let tp = transfer_matrix(l, u0 + std::f64::consts::PI, eta, tau)?;
    let sign = if l % 2 == 1 { -1.0 } else { 1.0 };
    let quasi_periodicity = (&tp - &t0 * Complex64::new(sign, 0.0)).norm() / t0.norm();
    Ok(TransferReport { l, tau, zeta, eigen_residual, commutator, quasi_periodicity })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_chain_energy_and_correlations() {
        let gs = ground_state_even_sector(3, 0.0).unwrap();
        assert!((gs.energy + 2.25).abs() < 1e-10);
        let c = measure_correlations(&gs);
        assert!((c.cx - 2.0 / 3.0).abs() < 1e-8 && (c.cy - 2.0 / 3.0).abs() < 1e-8 && (c.cz + 1.0 / 3.0).abs() < 1e-8);
        let f = infer_from(&c, 0.0).unwrap();
        assert!((f.fx - 1.0).abs() < 1e-8 && f.disagreement() < 1e-8);
    }

    #[test]
    fn five_sites_energy() {
        let gs = ground_state_even_sector(5, 0.4).unwrap();
        assert!((gs.energy + 3.95).abs() < 1e-10);
    }

    #[test]
    fn ising_limit_ground_vector() {
        let h = build_hamiltonian_with(3, Couplings { jx: 0.0, jy: 0.0, jz: 0.5 }).unwrap();
        let gs = ground_state_of(&h).unwrap();
        assert!((gs.vector[0].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn traceless_and_symmetric() {
        let h = build_hamiltonian(5, 0.5).unwrap();
        let m = h.to_dense();
        assert!(m.trace().abs() < 1e-12);
        assert!((&m - m.transpose()).norm() < 1e-14);
        let (cf, ct) = symmetry_commutators(&h, 1);
        assert!(cf < 1e-14 && ct < 1e-14);
    }

    #[test]
    fn rejects_even_or_large_chains() {
        assert!(matches!(build_hamiltonian(4, 0.1), Err(EdError::SizeLimit { .. })));
        assert!(matches!(build_hamiltonian(15, 0.1), Err(EdError::SizeLimit { .. })));
        assert!(matches!(transfer_matrix(11, 0.3, 1.0, Complex64::new(0.0, 1.0)), Err(EdError::SizeLimit { .. })));
        let c = measure_correlations(&ground_state_even_sector(3, 0.5).unwrap());
        assert!(matches!(infer_from(&c, 1.0005), Err(EdError::NearSingularInversion { .. })));
    }

    #[test]
    fn lanczos_matches_dense() {
        let h = build_hamiltonian(9, 0.3).unwrap();
        let sector = Sector::even(9);
        let (e_dense, _, _) = lowest_two_dense(sector.dense(&h));
        let (e_l, _, _) = lanczos(&sector, &h, 1e-12 * h.norm_bound()).unwrap();
        assert!((e_dense - e_l).abs() < 1e-10);
    }
}
