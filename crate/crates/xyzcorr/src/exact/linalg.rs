use num_traits::{One, Zero};

use super::{Poly, RatFunc, Rational, Var};

/// Basis of the right nullspace of a dense rational matrix (rows of equal length).
pub fn nullspace(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); ncols];
            v[f] = Rational::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[i][f].clone();
            }
            v
        })
        .collect()
}

/// Fits `N(x)/D(x)` with `deg N ≤ deg_num`, `deg D ≤ deg_den` through the exact samples.
///
/// Returns the reduced fit if the linearized system has a solution with a nonzero
/// denominator that reproduces every sample; `None` otherwise.
pub fn reconstruct_rational(
    samples: &[(Rational, Rational)],
    deg_num: usize,
    deg_den: usize,
    var: Var,
) -> Option<RatFunc> {
    let ncols = deg_num + deg_den + 2;
    let rows: Vec<Vec<Rational>> = samples
        .iter()
        .map(|(x, y)| {
            let mut row = Vec::with_capacity(ncols);
            let mut xp = Rational::one();
            for _ in 0..=deg_num {
                row.push(xp.clone());
                xp *= x;
            }
            let mut xp = Rational::one();
            for _ in 0..=deg_den {
                row.push(-(y * &xp));
                xp *= x;
            }
            row
        })
        .collect();
    for v in nullspace(&rows, ncols) {
        let num = Poly::from_coeffs(v[..=deg_num].to_vec(), var);
        let den = Poly::from_coeffs(v[deg_num + 1..].to_vec(), var);
        if den.is_zero() {
            continue;
        }
        let Ok(f) = RatFunc::new(num, den) else { continue };
        if samples.iter().all(|(x, y)| f.eval(x).is_ok_and(|v| &v == y)) {
            return Some(f);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    #[test]
    fn nullspace_of_rank_one() {
        let rows = vec![vec![int(1), int(2), int(3)]];
        let ns = nullspace(&rows, 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            let dot: Rational = rows[0].iter().zip(&v).map(|(a, b)| a * b).sum();
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn reconstructs_known_function() {
        let f = RatFunc::new(Poly::from_i64s(&[27, 1], Var::Disc), Poly::from_i64s(&[25, 1], Var::Disc)).unwrap();
        let samples: Vec<_> = (1..8)
            .map(|k| {
                let x = rat(k, 3);
                let y = f.eval(&x).unwrap();
                (x, y)
            })
            .collect();
        assert_eq!(reconstruct_rational(&samples, 1, 1, Var::Disc), Some(f.clone()));
        assert_eq!(reconstruct_rational(&samples, 2, 2, Var::Disc), Some(f));
        assert_eq!(reconstruct_rational(&samples, 0, 0, Var::Disc), None);
    }
}
