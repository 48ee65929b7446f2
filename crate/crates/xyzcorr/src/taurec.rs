//! Tau-function polynomials `s_n(z)` and `s̄_n(z)` from the Toda-type bilinear
//! recursion, built outward from `n = 0` with every division checked exact.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::exact::{int, rat, ExactError, Poly, Rational, Var};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TauError {
    #[error("recursion division failed at n = {n} ({family:?}): {source}")]
    Division { n: i64, family: Family, source: ExactError },
}

/// Which of the two polynomial families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    /// `s_n`, seeded by `s_0 = s_1 = 1`.
    Plain,
    /// `s̄_n`, seeded by `s̄_0 = 1`, `s̄_1 = 3`.
    Barred,
}

impl Family {
    /// Coefficient multiplying `(9z − 1)·s_n²`.
    fn shift_coeff(self, n: i64) -> i64 {
        match self {
            Family::Plain => n * (5 * n + 3),
            Family::Barred => (n - 1) * (5 * n + 4),
        }
    }

    fn seeds(self) -> (Poly, Poly) {
        let one = Poly::one(Var::Z);
        match self {
            Family::Plain => (one.clone(), one),
            Family::Barred => (one, Poly::constant(int(3), Var::Z)),
        }
    }
}

/// The part of the recursion at index `n` that involves only `s_n`:
/// `2z(z−1)(9z−1)²(s″s − s′²) + 2(3z−1)²(9z−1)ss′ − (4(3n+1)(3n+2) + c_n(9z−1))s²`.
pub fn bilinear_part(family: Family, n: i64, s: &Poly) -> Poly {
    let z = Var::Z;
    let d1 = s.derivative();
    let d2 = d1.derivative();
    let nine_z_minus_1 = Poly::from_i64s(&[-1, 9], z);
    let w2 = &(&Poly::from_i64s(&[0, -2, 2], z) * &nine_z_minus_1) * &nine_z_minus_1;
    let w1 = (&Poly::from_i64s(&[1, -6, 9], z) * &nine_z_minus_1).scale(&int(2));
    let w0 =
        &Poly::constant(int(4 * (3 * n + 1) * (3 * n + 2)), z) + &nine_z_minus_1.scale(&int(family.shift_coeff(n)));
    let wronsk = &(&d2 * s) - &(&d1 * &d1);
    &(&(&w2 * &wronsk) + &(&w1 * &(s * &d1))) - &(&w0 * &(s * s))
}

fn lead_factor(n: i64) -> Rational {
    int(8 * (2 * n + 1) * (2 * n + 1))
}

/// Memoized table of `s_n`, `s̄_n`, populated contiguously around `n = 0`.
#[derive(Clone, Debug)]
pub struct TauTable {
    plain: BTreeMap<i64, Poly>,
    barred: BTreeMap<i64, Poly>,
}

impl Default for TauTable {
    fn default() -> Self {
        Self::new()
    }
}

impl TauTable {
    pub fn new() -> Self {
        let mut t = TauTable { plain: BTreeMap::new(), barred: BTreeMap::new() };
        for fam in [Family::Plain, Family::Barred] {
            let (s0, s1) = fam.seeds();
            let m = t.map_mut(fam);
            m.insert(0, s0);
            m.insert(1, s1);
        }
        t
    }

    /// Table populated over `[n_min, n_max]` (always including `0` and `1`).
    pub fn with_range(n_min: i64, n_max: i64) -> Result<Self, TauError> {
        let mut t = Self::new();
        t.ensure(n_min)?;
        t.ensure(n_max)?;
        Ok(t)
    }

    fn map(&self, fam: Family) -> &BTreeMap<i64, Poly> {
        match fam {
            Family::Plain => &self.plain,
            Family::Barred => &self.barred,
        }
    }

    fn map_mut(&mut self, fam: Family) -> &mut BTreeMap<i64, Poly> {
        match fam {
            Family::Plain => &mut self.plain,
            Family::Barred => &mut self.barred,
        }
    }

    /// Populated index range `(min, max)`.
    pub fn range(&self) -> (i64, i64) {
        let lo = *self.plain.keys().next().expect("seeded");
        let hi = *self.plain.keys().next_back().expect("seeded");
        (lo, hi)
    }

    /// Extends both families so that index `n` is stored.
    pub fn ensure(&mut self, n: i64) -> Result<(), TauError> {
        for fam in [Family::Plain, Family::Barred] {
            loop {
                let (lo, hi) = {
                    let m = self.map(fam);
                    (*m.keys().next().expect("seeded"), *m.keys().next_back().expect("seeded"))
                };
                if n > hi {
                    // Solve the relation at index `hi` for s_{hi+1}.
                    let next = self.solve(fam, hi, hi - 1)?;
                    self.map_mut(fam).insert(hi + 1, next);
                } else if n < lo {
                    // Solve the relation at index `lo` for s_{lo-1}.
                    let next = self.solve(fam, lo, lo + 1)?;
                    self.map_mut(fam).insert(lo - 1, next);
                } else {
                    break;
                }
            }
        }
        Ok(())
    }

    /// Solves the relation centred at `centre` for the neighbour opposite `known`.
    fn solve(&self, fam: Family, centre: i64, known: i64) -> Result<Poly, TauError> {
        let m = self.map(fam);
        let s = &m[&centre];
        let neighbour = &m[&known];
        let rhs = -&bilinear_part(fam, centre, s);
        let divisor = neighbour.scale(&lead_factor(centre));
        rhs.exact_div(&divisor).map_err(|source| TauError::Division { n: centre, family: fam, source })
    }

    pub fn tau_s(&mut self, n: i64) -> Result<&Poly, TauError> {
        self.ensure(n)?;
        Ok(&self.plain[&n])
    }

    pub fn tau_sbar(&mut self, n: i64) -> Result<&Poly, TauError> {
        self.ensure(n)?;
        Ok(&self.barred[&n])
    }

    /// Stored polynomial, if populated.
    pub fn get(&self, fam: Family, n: i64) -> Option<&Poly> {
        self.map(fam).get(&n)
    }

    /// Residual of the recursion at every interior index: must be the zero polynomial.
    pub fn recursion_residuals(&self) -> Vec<(Family, i64, Poly)> {
        let (lo, hi) = self.range();
        let mut out = Vec::new();
        for fam in [Family::Plain, Family::Barred] {
            let m = self.map(fam);
            for n in lo + 1..hi {
                let lhs = (&m[&(n + 1)] * &m[&(n - 1)]).scale(&lead_factor(n));
                out.push((fam, n, &lhs + &bilinear_part(fam, n, &m[&n])));
            }
        }
        out
    }

    /// Recomputes each interior entry from the opposite direction; returns mismatches.
    pub fn direction_mismatches(&self) -> Vec<(Family, i64)> {
        let (lo, hi) = self.range();
        let mut bad = Vec::new();
        for fam in [Family::Plain, Family::Barred] {
            for n in lo + 1..hi {
                // s_{n+1} re-derived from the centre n with s_{n-1}, and s_{n-1} from s_{n+1}.
                let up = self.solve(fam, n, n - 1).ok();
                let down = self.solve(fam, n, n + 1).ok();
                if up.as_ref() != self.get(fam, n + 1) || down.as_ref() != self.get(fam, n - 1) {
                    bad.push((fam, n));
                }
            }
        }
        bad
    }

    /// Checks `s̄_n(1/9) = 3ⁿ s_n(1/9)` for `−n_max−1 ≤ n ≤ n_max+1`.
    pub fn xxz_check(&mut self, n_max: i64) -> Result<Vec<(i64, bool)>, TauError> {
        self.ensure(-n_max - 1)?;
        self.ensure(n_max + 1)?;
        let ninth = rat(1, 9);
        let three = int(3);
        Ok((-n_max - 1..=n_max + 1)
            .map(|n| {
                let lhs = self.plain[&n].eval(&ninth);
                let rhs = self.barred[&n].eval(&ninth);
                let pow = if n >= 0 {
                    num_traits::pow(three.clone(), n as usize)
                } else {
                    num_traits::pow(three.clone(), (-n) as usize).recip()
                };
                (n, rhs == pow * lhs)
            })
            .collect())
    }

    /// Checks `s_n(0) ≠ 0`, `s̄_n(0) ≠ 0` for `n ≥ 0`, and `zⁿ | s̄_{−n−1}` for `n > 0`.
    pub fn zero_structure_check(&mut self, n_max: i64) -> Result<ZeroStructureReport, TauError> {
        self.ensure(-n_max - 1)?;
        self.ensure(n_max + 1)?;
        let (lo, hi) = self.range();
        let s_zero = (lo..=hi).filter(|n| self.plain[n].coeff(0).is_zero()).collect();
        let sbar_zero = (0..=hi).filter(|n| self.barred[n].coeff(0).is_zero()).collect();
        let sbar_divisible = (1..=n_max).filter(|&n| self.barred[&(-n - 1)].zero_root_order() < n as usize).collect();
        let s_at_ninth = (lo..=hi).filter(|n| self.plain[n].eval(&rat(1, 9)).is_zero()).collect();
        Ok(ZeroStructureReport {
            s_vanishing_at_zero: s_zero,
            sbar_vanishing_at_zero: sbar_zero,
            sbar_not_divisible: sbar_divisible,
            s_vanishing_at_ninth: s_at_ninth,
        })
    }

    /// Degrees and constant-term signs, recorded for inspection rather than asserted.
    pub fn degree_pattern(&self) -> Vec<DegreeRow> {
        let (lo, hi) = self.range();
        (lo..=hi)
            .map(|n| DegreeRow {
                n,
                deg_s: self.plain[&n].degree().unwrap_or(0),
                deg_sbar: self.barred[&n].degree().unwrap_or(0),
                sbar_zero_order: self.barred[&n].zero_root_order(),
            })
            .collect()
    }

    /// JSON-ready dump of the populated range.
    pub fn dump(&self) -> Vec<TauEntry<'_>> {
        self.plain.iter().map(|(&n, s)| TauEntry { n, s, sbar: &self.barred[&n] }).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TauEntry<'a> {
    pub n: i64,
    pub s: &'a Poly,
    pub sbar: &'a Poly,
}

#[derive(Debug, Clone, Serialize)]
pub struct DegreeRow {
    pub n: i64,
    pub deg_s: usize,
    pub deg_sbar: usize,
    pub sbar_zero_order: usize,
}

/// Indices violating each zero-structure statement; all empty on success.
#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct ZeroStructureReport {
    pub s_vanishing_at_zero: Vec<i64>,
    pub sbar_vanishing_at_zero: Vec<i64>,
    pub sbar_not_divisible: Vec<i64>,
    pub s_vanishing_at_ninth: Vec<i64>,
}

impl ZeroStructureReport {
    pub fn passed(&self) -> bool {
        self.s_vanishing_at_zero.is_empty()
            && self.sbar_vanishing_at_zero.is_empty()
            && self.sbar_not_divisible.is_empty()
            && self.s_vanishing_at_ninth.is_empty()
    }
}

/// Evaluates a `z`-polynomial at `z = 1/9`, the XXZ point.
pub fn at_xxz_point(p: &Poly) -> Rational {
    p.eval(&rat(1, 9))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zq(c: &[(i64, i64)]) -> Poly {
        Poly::from_coeffs(c.iter().map(|&(a, b)| rat(a, b)).collect(), Var::Z)
    }

    #[test]
    fn seeds_and_first_steps() {
        let mut t = TauTable::new();
        assert!(t.tau_s(0).unwrap().is_one());
        assert!(t.tau_s(1).unwrap().is_one());
        assert_eq!(t.tau_s(2).unwrap(), &zq(&[(1, 1), (1, 1)]));
        assert!(t.tau_s(-1).unwrap().is_one());
        assert_eq!(t.tau_sbar(1).unwrap(), &zq(&[(3, 1)]));
        assert_eq!(t.tau_sbar(-1).unwrap(), &zq(&[(1, 2), (-3, 2)]));
        assert_eq!(t.tau_sbar(2).unwrap(), &zq(&[(10, 1)]));
    }

    #[test]
    fn frozen_polynomials() {
        let mut t = TauTable::with_range(-3, 4).unwrap();
        assert_eq!(t.tau_s(3).unwrap(), &zq(&[(1, 1), (3, 1), (4, 1)]));
        assert_eq!(t.tau_s(4).unwrap(), &zq(&[(1, 1), (6, 1), (18, 1), (30, 1), (9, 1)]));
        assert_eq!(t.tau_s(-2).unwrap(), &zq(&[(3, 4), (9, 4)]));
        assert_eq!(t.tau_s(-3).unwrap(), &zq(&[(9, 16), (27, 8), (225, 16)]));
        assert_eq!(t.tau_sbar(3).unwrap(), &zq(&[(35, 1), (21, 1)]));
        assert_eq!(t.tau_sbar(4).unwrap(), &zq(&[(126, 1), (252, 1), (198, 1)]));
        assert_eq!(t.tau_sbar(-2).unwrap(), &zq(&[(0, 1), (9, 4), (-45, 4)]));
        assert_eq!(t.tau_sbar(-3).unwrap(), &zq(&[(0, 1), (0, 1), (135, 16), (-315, 8), (-945, 16)]));
    }

    #[test]
    fn one_step_division_by_72() {
        // At n = 1 the derivative terms drop out and 72·s_2 = 72 + 72z.
        let rhs = -&bilinear_part(Family::Plain, 1, &Poly::one(Var::Z));
        assert_eq!(rhs, Poly::from_i64s(&[72, 72], Var::Z));
        let rhs = -&bilinear_part(Family::Barred, 1, &Poly::constant(int(3), Var::Z));
        assert_eq!(rhs, Poly::from_i64s(&[720], Var::Z));
    }

    #[test]
    fn residuals_vanish_and_directions_agree() {
        let t = TauTable::with_range(-5, 5).unwrap();
        assert!(t.recursion_residuals().iter().all(|(_, _, r)| r.is_zero()));
        assert!(t.direction_mismatches().is_empty());
    }

    #[test]
    fn xxz_and_zero_structure() {
        let mut t = TauTable::new();
        assert!(t.xxz_check(4).unwrap().iter().all(|&(_, ok)| ok));
        let rep = t.zero_structure_check(4).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(at_xxz_point(t.tau_sbar(2).unwrap()), int(10));
        assert_eq!(at_xxz_point(t.tau_s(2).unwrap()) * int(9), int(10));
    }
}
