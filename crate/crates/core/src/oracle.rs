//! Finite-difference check on the radial solver: the operator is
//! discretised on a uniform grid with Dirichlet ends, each shell becomes a
//! diagonal weight `alpha/h` on its node, and eigenvalues come from
//! Sturm-sequence bisection on the resulting symmetric tridiagonal matrix.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kp1d::Interval;
use crate::lattice::{LatticeSpec, PartialWave, ShellLattice};
use crate::table::{Cell, Table};

/// Symmetric tridiagonal matrix with constant off-diagonal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TridiagonalOperator {
    pub h: f64,
    pub diag: Vec<f64>,
    pub offdiag: f64,
}

impl TridiagonalOperator {
    pub fn new(h: f64, diag: Vec<f64>, offdiag: f64) -> Self {
        Self { h, diag, offdiag }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// Infinity norm.
    pub fn norm(&self) -> f64 {
        self.diag
            .iter()
            .map(|d| d.abs() + 2.0 * self.offdiag.abs())
            .fold(0.0, f64::max)
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> Interval {
        let o = 2.0 * self.offdiag.abs();
        let lo = self
            .diag
            .iter()
            .map(|d| d - o)
            .fold(f64::INFINITY, f64::min);
        let hi = self
            .diag
            .iter()
            .map(|d| d + o)
            .fold(f64::NEG_INFINITY, f64::max);
        Interval { lo, hi }
    }
}

/// Picks the spacing closest to `h_target` that puts `r_end` and every
/// shell in `(0, r_end)` on a grid node.
fn grid_steps(lattice: &ShellLattice, r_end: f64, h_target: f64) -> Result<usize> {
    let on_grid = |x: f64, h: f64| {
        let m = x / h;
        (m - m.round()).abs() < 1e-9 * m.max(1.0)
    };
    match lattice.spec() {
        LatticeSpec::Periodic { a } => {
            let half = 0.5 * a;
            if !on_grid(r_end, half) {
                return Err(Error::Grid(format!(
                    "R = {r_end} is not a multiple of a/2 = {half}"
                )));
            }
            let m = (half / h_target).round().max(1.0) as usize;
            Ok((r_end / half).round() as usize * m)
        }
        LatticeSpec::Explicit { .. } => {
            let shells = lattice.shells_unchecked(0.0, r_end);
            let first = (r_end / h_target).round().max(1.0) as usize;
            // candidates ordered by distance from h_target, within a factor 2
            let mut candidates: Vec<usize> = ((first / 2).max(1)..=2 * first).collect();
            candidates.sort_by(|&x, &y| {
                let dx = (r_end / x as f64 - h_target).abs();
                let dy = (r_end / y as f64 - h_target).abs();
                dx.total_cmp(&dy).then(x.cmp(&y))
            });
            candidates
                .into_iter()
                .find(|&n| {
                    let h = r_end / n as f64;
                    shells.iter().all(|&r| on_grid(r, h))
                })
                .ok_or_else(|| {
                    Error::Grid(format!(
                        "no uniform grid within 2x of h = {h_target} puts all shells on nodes"
                    ))
                })
        }
    }
}

/// Discretisation of the radial operator on `(0, R)` with spacing near
/// `h_target`; nodes at `r_j = j h`, `j = 1..N-1`.
pub fn build_matrix(
    wave: PartialWave,
    lattice: &ShellLattice,
    radius: f64,
    h_target: f64,
) -> Result<TridiagonalOperator> {
    if !(h_target > 0.0) {
        return Err(Error::Range(format!("h must be > 0, got {h_target}")));
    }
    if !(radius > 0.0 && radius <= lattice.r_max()) {
        return Err(Error::Range(format!(
            "R = {radius} must lie in (0, r_max = {}]",
            lattice.r_max()
        )));
    }
    let steps = grid_steps(lattice, radius, h_target)?;
    if steps < 2 {
        return Err(Error::Grid(format!(
            "h = {h_target} leaves no interior node"
        )));
    }
    let h = radius / steps as f64;
    let c = wave.c();
    let mut diag: Vec<f64> = (1..steps)
        .map(|j| {
            let r = j as f64 * h;
            2.0 / (h * h) + c / (r * r)
        })
        .collect();
    for r in lattice.shells_unchecked(0.0, radius) {
        let j = (r / h).round() as usize;
        if j >= 1 && j < steps {
            diag[j - 1] += lattice.alpha() / h;
        }
    }
    Ok(TridiagonalOperator::new(h, diag, -1.0 / (h * h)))
}

/// Number of eigenvalues of `t` strictly below `lambda`, from the signs of
/// the LDL^T pivots of `t - lambda`.
pub fn sturm_count(t: &TridiagonalOperator, lambda: f64) -> usize {
    let eps = (f64::EPSILON * t.norm()).max(1e-300);
    let off2 = t.offdiag * t.offdiag;
    let mut count = 0;
    let mut d = 1.0;
    for (j, &a) in t.diag.iter().enumerate() {
        d = if j == 0 {
            a - lambda
        } else {
            (a - lambda) - off2 / d
        };
        if d == 0.0 {
            d = eps;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Eigenvalues of `t` in `interval`, each bisected to `tol`.
pub fn oracle_eigenvalues(
    t: &TridiagonalOperator,
    interval: Interval,
    tol: f64,
) -> Result<Vec<f64>> {
    if !(interval.lo < interval.hi) {
        return Err(Error::Range(format!(
            "empty interval [{}, {}]",
            interval.lo, interval.hi
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Range(format!("tol must be > 0, got {tol}")));
    }
    let n_lo = sturm_count(t, interval.lo);
    let n_hi = sturm_count(t, interval.hi);
    Ok((n_lo..n_hi)
        .map(|k| kth_eigenvalue(t, k, interval, tol))
        .collect())
}

/// The `k`-th eigenvalue (0-based) of `t`, known to lie in `interval`.
fn kth_eigenvalue(t: &TridiagonalOperator, k: usize, interval: Interval, tol: f64) -> f64 {
    let (mut lo, mut hi) = (interval.lo, interval.hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if sturm_count(t, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The lowest `count` eigenvalues of `t`.
pub fn lowest_eigenvalues(t: &TridiagonalOperator, count: usize, tol: f64) -> Result<Vec<f64>> {
    if count > t.n() {
        return Err(Error::Range(format!(
            "asked for {count} eigenvalues of a {0}x{0} matrix",
            t.n()
        )));
    }
    let g = t.gershgorin();
    let span = Interval {
        lo: g.lo - 1.0,
        hi: g.hi + 1.0,
    };
    Ok((0..count)
        .map(|k| kth_eigenvalue(t, k, span, tol))
        .collect())
}

/// Three-level extrapolation of one eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extrapolated {
    /// Values at `h`, `h/2`, `h/4`.
    pub values: [f64; 3],
    /// Limit with both the `h` and `h^2` error terms removed.
    pub lambda: f64,
    /// Observed order `log2((E_h - E_{h/2}) / (E_{h/2} - E_{h/4}))`.
    pub order: f64,
}

pub fn richardson(values: [f64; 3]) -> Extrapolated {
    let [x, y, z] = values;
    let order = ((x - y) / (y - z)).abs().log2();
    Extrapolated {
        values,
        lambda: (8.0 * z - 6.0 * y + x) / 3.0,
        order,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub h: [f64; 3],
    pub eigenvalues: Vec<Extrapolated>,
}

impl ConvergenceStudy {
    pub fn limits(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|e| e.lambda).collect()
    }

    /// CSV `h, lambda_index, lambda_h, order_estimate`; the extrapolated
    /// limit is written with `h = 0`.
    pub fn table(&self) -> Table {
        let mut t = Table::new(&["h", "lambda_index", "lambda_h", "order_estimate"]);
        for (i, e) in self.eigenvalues.iter().enumerate() {
            for (h, v) in self.h.iter().zip(e.values) {
                t.push(vec![
                    Cell::Float(*h),
                    Cell::Int(i as i64 + 1),
                    Cell::Float(v),
                    Cell::Float(e.order),
                ]);
            }
            t.push(vec![
                Cell::Float(0.0),
                Cell::Int(i as i64 + 1),
                Cell::Float(e.lambda),
                Cell::Float(e.order),
            ]);
        }
        t
    }
}

/// Lowest `count` eigenvalues at `h`, `h/2`, `h/4`, extrapolated.
pub fn convergence_study(
    wave: PartialWave,
    lattice: &ShellLattice,
    radius: f64,
    h: f64,
    count: usize,
    tol: f64,
) -> Result<ConvergenceStudy> {
    let levels = [h, 0.5 * h, 0.25 * h];
    let mats = levels
        .iter()
        .map(|&hh| build_matrix(wave, lattice, radius, hh))
        .collect::<Result<Vec<_>>>()?;
    let per_level = mats
        .iter()
        .map(|m| lowest_eigenvalues(m, count, tol))
        .collect::<Result<Vec<_>>>()?;
    let eigenvalues = (0..count)
        .map(|k| richardson([per_level[0][k], per_level[1][k], per_level[2][k]]))
        .collect();
    Ok(ConvergenceStudy {
        h: [mats[0].h, mats[1].h, mats[2].h],
        eigenvalues,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn wave(l: u32) -> PartialWave {
        PartialWave::new(3, l).unwrap()
    }

    #[test]
    fn free_three_by_three() {
        let lat = ShellLattice::periodic(0.0, 1.0, 10.0).unwrap();
        let t = build_matrix(wave(0), &lat, 1.0, 0.25).unwrap();
        assert_eq!(t.n(), 3);
        assert_eq!(t.diag, vec![32.0, 32.0, 32.0]);
        assert_eq!(t.offdiag, -16.0);
        assert_eq!(sturm_count(&t, 32.0), 1);
        let ev = oracle_eigenvalues(&t, Interval { lo: 0.0, hi: 100.0 }, 1e-12).unwrap();
        let s = 16.0 * 2f64.sqrt();
        for (got, want) in ev.iter().zip([32.0 - s, 32.0, 32.0 + s]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-11);
        }
    }

    #[test]
    fn one_by_one() {
        let t = TridiagonalOperator::new(1.0, vec![5.0], -1.0);
        assert_eq!(sturm_count(&t, 4.0), 0);
        assert_eq!(sturm_count(&t, 6.0), 1);
        assert_eq!(sturm_count(&t, 5.0), 0);
    }

    #[test]
    fn shells_become_diagonal_bumps() {
        let lat = ShellLattice::periodic(1.0, 1.0, 10.0).unwrap();
        let t = build_matrix(wave(0), &lat, 2.0, 0.25).unwrap();
        let base = 32.0;
        for (j, d) in t.diag.iter().enumerate() {
            let r = (j + 1) as f64 * 0.25;
            let want = if r == 0.5 || r == 1.5 {
                base + 4.0
            } else {
                base
            };
            assert_eq!(*d, want, "node r = {r}");
        }
        assert!(build_matrix(wave(0), &lat, 2.2, 0.25).is_err());
    }

    #[test]
    fn explicit_grid_selection() {
        let lat = ShellLattice::explicit(1.0, vec![0.3, 0.7], 5.0).unwrap();
        let t = build_matrix(wave(0), &lat, 1.0, 0.1).unwrap();
        assert_abs_diff_eq!(t.h, 0.1, epsilon = 1e-15);
        let lat = ShellLattice::explicit(1.0, vec![0.3, 1.0 / 3.0 + 0.3], 5.0).unwrap();
        assert!(matches!(
            build_matrix(wave(0), &lat, 1.0, 0.1),
            Err(Error::Grid(_))
        ));
    }

    #[test]
    fn count_matches_dense_solver() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let diag: Vec<f64> = (0..8).map(|_| rng.random_range(-5.0..5.0)).collect();
            let off = rng.random_range(-2.0..2.0);
            let t = TridiagonalOperator::new(1.0, diag.clone(), off);
            let m = DMatrix::from_fn(8, 8, |i, j| {
                if i == j {
                    diag[i]
                } else if i.abs_diff(j) == 1 {
                    off
                } else {
                    0.0
                }
            });
            let ev = m.symmetric_eigenvalues();
            for _ in 0..10 {
                let lambda = rng.random_range(-8.0..8.0);
                let want = ev.iter().filter(|&&e| e < lambda).count();
                assert_eq!(sturm_count(&t, lambda), want);
            }
            assert_eq!(sturm_count(&t, 1e9), 8);
        }
    }

    #[test]
    fn richardson_exact_for_quadratic_error() {
        let e = |h: f64| 3.0 + 2.0 * h - 5.0 * h * h;
        let r = richardson([e(0.1), e(0.05), e(0.025)]);
        assert_abs_diff_eq!(r.lambda, 3.0, epsilon = 1e-13);
    }

    #[test]
    fn free_convergence_is_second_order() {
        let lat = ShellLattice::periodic(0.0, 1.0, 30.0).unwrap();
        let st = convergence_study(wave(0), &lat, 20.5, 0.05, 10, 1e-12).unwrap();
        for (n, e) in st.eigenvalues.iter().enumerate() {
            let exact = ((n + 1) as f64 * PI / 20.5).powi(2);
            assert!((e.order - 2.0).abs() < 0.05, "order {}", e.order);
            // leftover h^4 term: (8/256 - 6/16 + 1)/3 * lambda^3 h^4 / 360
            let h4 = 0.22 * exact.powi(3) * 0.05f64.powi(4) / 360.0;
            assert_abs_diff_eq!(e.lambda, exact, epsilon = 1.1 * h4 + 1e-11);
        }
        assert_eq!(st.table().len(), 40);
    }
}
