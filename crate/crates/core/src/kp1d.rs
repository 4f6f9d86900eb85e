//! The one-dimensional Kronig-Penney comparison operator: Floquet
//! discriminant, band/gap edges, integrated density of states and the
//! θ-periodic cell eigenvalues.
//!
//! Energies are `lambda`; trigonometric arguments use the momentum
//! `k = sqrt(lambda)`, so `D(lambda) = cos(ka) + alpha/(2k) * sin(ka)`.
//!
//! Every point `lambda = (n*pi/a)^2` is a band edge with `D = (-1)^n`. Inside
//! `I_n = ((n-1)^2 pi^2/a^2, n^2 pi^2/a^2)` there is exactly one further edge
//! when `alpha != 0`: just above the left end for `alpha > 0`, just below the
//! right end for `alpha < 0`. The edge functions `D -+ 1` are evaluated in
//! local coordinates `t = (ka/pi) - (n-1)` so that they keep full relative
//! accuracy next to the points `ka = n*pi`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::table::{Cell, Table};

const SERIES_SWITCH: f64 = 1e-6;
const BASE_GRID: usize = 8;
const MAX_GRID: usize = 1 << 10;
/// Geometric grid points `10^-p` placed next to each `ka = n*pi`.
const END_DECADES: i32 = 14;

/// Absolute tolerance in `lambda` for band edges.
pub const TOL_EDGE: f64 = 1e-10;

/// Closed interval `[lo, hi]` in energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

fn check_period(a: f64) -> Result<()> {
    if a.is_finite() && a > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("period a must be > 0, got {a}")))
    }
}

/// Floquet discriminant `D(lambda)`, half the trace of the one-period
/// transfer matrix.
pub fn discriminant(lambda: f64, alpha: f64, a: f64) -> Result<f64> {
    check_period(a)?;
    Ok(discriminant_unchecked(lambda, alpha, a))
}

pub(crate) fn discriminant_unchecked(lambda: f64, alpha: f64, a: f64) -> f64 {
    let x = lambda * a * a;
    if x.abs() < SERIES_SWITCH {
        // sum_j (-x)^j [1/(2j)! + (alpha a / 2)/(2j+1)!], six terms
        let half = 0.5 * alpha * a;
        let mut term = 1.0;
        let mut fact_even = 1.0;
        let mut fact_odd = 1.0;
        let mut sum = 0.0;
        for j in 0..6 {
            if j > 0 {
                let jj = j as f64;
                fact_even *= (2.0 * jj - 1.0) * (2.0 * jj);
                fact_odd *= (2.0 * jj) * (2.0 * jj + 1.0);
                term *= -x;
            }
            sum += term * (1.0 / fact_even + half / fact_odd);
        }
        sum
    } else if lambda > 0.0 {
        let k = lambda.sqrt();
        (k * a).cos() + alpha / (2.0 * k) * (k * a).sin()
    } else {
        let kappa = (-lambda).sqrt();
        (kappa * a).cosh() + alpha / (2.0 * kappa) * (kappa * a).sinh()
    }
}

/// Energy below which `D > 1` for every coupling: the spectrum of the
/// periodic operator lies above this value.
///
/// With `kappa = |alpha|/2 + 2/a`, `tanh(kappa a / 2) > |alpha|/(2 kappa)`,
/// hence `D - 1 = sinh(kappa a) [tanh(kappa a/2) + alpha/(2 kappa)] > 0`,
/// and the inequality persists for larger `kappa`.
pub fn spectral_floor(alpha: f64, a: f64) -> f64 {
    let kappa = 0.5 * alpha.abs() + 2.0 / a;
    -(kappa * kappa) - 1.0
}

/// Position on the energy axis in coordinates adapted to the edge
/// functions. `Pos` carries both `t` and `s = 1 - t` so that either end of
/// `I_n` is resolved to full precision.
#[derive(Debug, Clone, Copy)]
enum Coord {
    Neg { kappa: f64 },
    Pos { n: u64, t: f64, s: f64 },
}

impl Coord {
    fn zero() -> Self {
        Coord::Pos {
            n: 1,
            t: 0.0,
            s: 1.0,
        }
    }

    fn lambda(self, a: f64) -> f64 {
        match self {
            Coord::Neg { kappa } => -kappa * kappa,
            Coord::Pos { n, t, .. } => {
                let k = ((n - 1) as f64 + t) * PI / a;
                k * k
            }
        }
    }

    fn mid(self, other: Coord) -> Coord {
        match (self, other) {
            (Coord::Neg { kappa: k1 }, Coord::Neg { kappa: k2 }) => Coord::Neg {
                kappa: 0.5 * (k1 + k2),
            },
            (
                Coord::Pos { n, t: t1, s: s1 },
                Coord::Pos {
                    n: n2,
                    t: t2,
                    s: s2,
                },
            ) => {
                debug_assert_eq!(n, n2);
                Coord::Pos {
                    n,
                    t: 0.5 * (t1 + t2),
                    s: 0.5 * (s1 + s2),
                }
            }
            // only the zero point joins the two kinds
            (Coord::Neg { .. }, Coord::Pos { .. }) => self.mid(Coord::Neg { kappa: 0.0 }),
            (Coord::Pos { .. }, Coord::Neg { .. }) => Coord::Neg { kappa: 0.0 }.mid(other),
        }
    }
}

fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x * x / 6.0 * (1.0 + x * x / 20.0)
    } else {
        x.sinh() / x
    }
}

/// `D - sign` at `coord`, with `sign` = +1 or -1.
fn edge_value(coord: Coord, sign: f64, alpha: f64, a: f64) -> f64 {
    match coord {
        Coord::Neg { kappa } => {
            let x = kappa * a;
            let coupling = 0.5 * alpha * a * sinhc(x);
            if sign > 0.0 {
                2.0 * (0.5 * x).sinh().powi(2) + coupling
            } else {
                2.0 * (0.5 * x).cosh().powi(2) + coupling
            }
        }
        Coord::Pos { n, t, s } => {
            let sin_delta = (PI * t.min(s)).sin();
            let coupling = if n == 1 {
                // alpha sin(ka)/(2k) with ka = t pi, finite at t = 0
                if t == 0.0 {
                    0.5 * alpha * a
                } else {
                    0.5 * alpha * a * sin_delta / (PI * t)
                }
            } else {
                let k = ((n - 1) as f64 + t) * PI / a;
                alpha * sin_delta / (2.0 * k)
            };
            // g = cos(delta) + coupling, D = sigma * g
            let g_minus_1 = -2.0 * (0.5 * PI * t).sin().powi(2) + coupling;
            let g_plus_1 = 2.0 * (0.5 * PI * s).sin().powi(2) + coupling;
            let sigma_positive = n % 2 == 1;
            match (sign > 0.0, sigma_positive) {
                (true, true) => g_minus_1,
                (true, false) => -g_plus_1,
                (false, true) => g_plus_1,
                (false, false) => -g_minus_1,
            }
        }
    }
}

fn discriminant_at(coord: Coord, alpha: f64, a: f64) -> f64 {
    // D = edge_value(+1) + 1 loses nothing away from the edges
    edge_value(coord, 1.0, alpha, a) + 1.0
}

/// Unit-interval grid of `m` Chebyshev-clustered points plus geometric
/// points towards both ends, as `(t, 1 - t)` pairs, ascending in `t`.
fn unit_grid(m: usize) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = (1..=m)
        .map(|j| {
            let c = (PI * j as f64 / (m + 1) as f64).cos();
            (0.5 * (1.0 - c), 0.5 * (1.0 + c))
        })
        .collect();
    for p in 1..=END_DECADES {
        let e = 10f64.powi(-p);
        pts.push((e, 1.0 - e));
        pts.push((1.0 - e, e));
    }
    pts.sort_by(|x, y| x.0.total_cmp(&y.0));
    pts.dedup_by(|x, y| (x.0 - y.0).abs() < 1e-15 && (x.1 - y.1).abs() < 1e-15);
    pts
}

#[derive(Debug, Clone, Copy)]
struct EdgeSolver {
    alpha: f64,
    a: f64,
    tol: f64,
}

impl EdgeSolver {
    fn interval_grid(&self, n: u64, m: usize) -> Vec<Coord> {
        unit_grid(m)
            .into_iter()
            .map(|(t, s)| Coord::Pos { n, t, s })
            .collect()
    }

    /// Grid over `(floor, pi^2/a^2)`: negative energies in `kappa`, then zero,
    /// then the first interval.
    fn region0_grid(&self, m: usize) -> Vec<Coord> {
        let kappa_floor = (-spectral_floor(self.alpha, self.a)).sqrt();
        let mut ks: Vec<f64> = (1..=m)
            .map(|j| kappa_floor * j as f64 / m as f64)
            .chain((1..=END_DECADES).map(|p| kappa_floor * 10f64.powi(-p)))
            .collect();
        ks.sort_by(|x, y| y.total_cmp(x));
        ks.dedup();
        let mut pts: Vec<Coord> = ks.into_iter().map(|kappa| Coord::Neg { kappa }).collect();
        pts.push(Coord::zero());
        pts.extend(self.interval_grid(1, m));
        pts
    }

    fn bisect(&self, lo: Coord, hi: Coord, sign: f64) -> f64 {
        let (alpha, a) = (self.alpha, self.a);
        let f_lo = edge_value(lo, sign, alpha, a);
        let (mut lo, mut hi) = (lo, hi);
        for _ in 0..200 {
            let (l_lo, l_hi) = (lo.lambda(a), hi.lambda(a));
            if (l_hi - l_lo).abs() <= self.tol {
                break;
            }
            let mid = lo.mid(hi);
            let l_mid = mid.lambda(a);
            if l_mid == l_lo || l_mid == l_hi {
                break;
            }
            let f_mid = edge_value(mid, sign, alpha, a);
            if f_mid == 0.0 {
                return l_mid;
            }
            if (f_mid > 0.0) == (f_lo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo.mid(hi).lambda(a)
    }

    /// All roots of `D = +1` and `D = -1` bracketed on the grid, ascending.
    fn roots_on(&self, pts: &[Coord]) -> Vec<f64> {
        let mut roots = Vec::new();
        for sign in [1.0, -1.0] {
            let vals: Vec<f64> = pts
                .iter()
                .map(|&p| edge_value(p, sign, self.alpha, self.a))
                .collect();
            for i in 0..pts.len() {
                if vals[i] == 0.0 {
                    roots.push(pts[i].lambda(self.a));
                } else if i + 1 < pts.len() && vals[i] * vals[i + 1] < 0.0 {
                    roots.push(self.bisect(pts[i], pts[i + 1], sign));
                }
            }
        }
        roots.sort_by(f64::total_cmp);
        roots
    }

    fn solve_with_refinement(
        &self,
        expected: usize,
        grid: impl Fn(usize) -> Vec<Coord>,
        what: &str,
    ) -> Result<Vec<f64>> {
        let mut m = BASE_GRID;
        loop {
            let pts = grid(m);
            let roots = self.roots_on(&pts);
            if roots.len() == expected {
                return Ok(roots);
            }
            if m >= MAX_GRID {
                let diagnostic = pts
                    .iter()
                    .map(|&p| (p.lambda(self.a), discriminant_at(p, self.alpha, self.a)))
                    .collect();
                return Err(Error::Convergence {
                    message: format!(
                        "{what}: expected {expected} edge(s), found {} after {m}-point grid \
                         (alpha = {}, a = {})",
                        roots.len(),
                        self.alpha,
                        self.a
                    ),
                    diagnostic,
                });
            }
            m *= 2;
        }
    }

    fn interval_root(&self, n: u64) -> Result<f64> {
        let roots =
            self.solve_with_refinement(1, |m| self.interval_grid(n, m), &format!("interval {n}"))?;
        Ok(roots[0])
    }

    fn region0_roots(&self) -> Result<Vec<f64>> {
        let expected = if self.alpha > 0.0 { 1 } else { 2 };
        self.solve_with_refinement(expected, |m| self.region0_grid(m), "lowest band")
    }

    fn node(&self, n: u64) -> f64 {
        let k = n as f64 * PI / self.a;
        k * k
    }

    /// Full `n`-th band (`n >= 1`), `alpha != 0`.
    fn band(&self, n: u64, region0: &[f64]) -> Result<Interval> {
        debug_assert!(self.alpha != 0.0);
        Ok(match (n, self.alpha > 0.0) {
            (1, true) => Interval {
                lo: region0[0],
                hi: self.node(1),
            },
            (1, false) => Interval {
                lo: region0[0],
                hi: region0[1],
            },
            (_, true) => Interval {
                lo: self.interval_root(n)?,
                hi: self.node(n),
            },
            (_, false) => Interval {
                lo: self.node(n - 1),
                hi: self.interval_root(n)?,
            },
        })
    }
}

/// Bands and gaps of the periodic operator inside an energy window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandStructure {
    pub alpha: f64,
    pub a: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Lower edge of the first band of the full (unclipped) spectrum.
    pub spectral_bottom: f64,
    /// Bands intersected with `[lambda_min, lambda_max]`, ascending.
    pub bands: Vec<Interval>,
    /// Open gaps between consecutive entries of `bands`.
    pub gaps: Vec<Interval>,
}

impl BandStructure {
    /// Gap `n` (1-based, in window order).
    pub fn gap(&self, n: usize) -> Option<Interval> {
        n.checked_sub(1).and_then(|i| self.gaps.get(i).copied())
    }

    pub fn band(&self, n: usize) -> Option<Interval> {
        n.checked_sub(1).and_then(|i| self.bands.get(i).copied())
    }

    /// Width of the gap directly above band `i` (0-based), if any.
    pub fn gap_width_above(&self, i: usize) -> Option<f64> {
        self.gaps.get(i).map(|g| g.width())
    }

    /// Returns the band containing `lambda`, if any.
    pub fn band_containing(&self, lambda: f64) -> Option<usize> {
        self.bands.iter().position(|b| b.contains(lambda))
    }

    pub fn in_gap(&self, lambda: f64) -> bool {
        self.gaps.iter().any(|g| g.lo < lambda && lambda < g.hi)
    }

    /// CSV table `band_index, lambda_lo, lambda_hi, gap_width_above`.
    pub fn table(&self) -> Table {
        let mut t = Table::new(&["band_index", "lambda_lo", "lambda_hi", "gap_width_above"]);
        for (i, b) in self.bands.iter().enumerate() {
            t.push(vec![
                Cell::Int(i as i64 + 1),
                Cell::Float(b.lo),
                Cell::Float(b.hi),
                self.gap_width_above(i).map_or(Cell::Empty, Cell::Float),
            ]);
        }
        t
    }
}

/// Locates all band edges in `[lambda_min, lambda_max]`.
///
/// Edges are the roots of `D = +-1`; each is bracketed on a grid refined
/// towards `ka = n*pi` and bisected to [`TOL_EDGE`]. At `alpha = 0` all gaps
/// close and the spectrum is a single band starting at 0.
pub fn band_edges(alpha: f64, a: f64, lambda_min: f64, lambda_max: f64) -> Result<BandStructure> {
    check_period(a)?;
    if !(alpha.is_finite() && lambda_min.is_finite() && lambda_max.is_finite()) {
        return Err(Error::Domain(
            "alpha and the energy window must be finite".into(),
        ));
    }
    if lambda_max <= lambda_min {
        return Err(Error::Range(format!(
            "lambda_max = {lambda_max} must exceed lambda_min = {lambda_min}"
        )));
    }
    let full = full_bands_up_to(alpha, a, lambda_max)?;
    let spectral_bottom = full.first().map_or(0.0, |b| b.lo);
    let bands: Vec<Interval> = full
        .iter()
        .filter(|b| b.hi > lambda_min && b.lo < lambda_max)
        .map(|b| Interval {
            lo: b.lo.max(lambda_min),
            hi: b.hi.min(lambda_max),
        })
        .collect();
    let gaps = bands
        .windows(2)
        .map(|w| Interval {
            lo: w[0].hi,
            hi: w[1].lo,
        })
        .collect();
    Ok(BandStructure {
        alpha,
        a,
        lambda_min,
        lambda_max,
        spectral_bottom,
        bands,
        gaps,
    })
}

/// Full bands whose lower edge lies below `lambda_max`; zero-width gaps merged.
fn full_bands_up_to(alpha: f64, a: f64, lambda_max: f64) -> Result<Vec<Interval>> {
    if alpha == 0.0 {
        return Ok(vec![Interval {
            lo: 0.0,
            hi: lambda_max.max(0.0),
        }]);
    }
    let solver = EdgeSolver {
        alpha,
        a,
        tol: TOL_EDGE,
    };
    let region0 = solver.region0_roots()?;
    let mut out = Vec::new();
    for n in 1u64.. {
        let band = solver.band(n, &region0)?;
        if band.lo >= lambda_max {
            break;
        }
        out.push(band);
    }
    Ok(out)
}

/// The first `count` full bands of the periodic operator.
pub fn first_bands(alpha: f64, a: f64, count: usize) -> Result<Vec<Interval>> {
    check_period(a)?;
    if alpha == 0.0 {
        return Ok((1..=count as u64)
            .map(|n| {
                let lo = (n - 1) as f64 * PI / a;
                let hi = n as f64 * PI / a;
                Interval {
                    lo: lo * lo,
                    hi: hi * hi,
                }
            })
            .collect());
    }
    let solver = EdgeSolver {
        alpha,
        a,
        tol: TOL_EDGE,
    };
    let region0 = solver.region0_roots()?;
    (1..=count as u64)
        .map(|n| solver.band(n, &region0))
        .collect()
}

/// Integrated density of states (states per unit length below `lambda`).
///
/// In band `m` the Floquet angle `arccos D` runs over `[0, pi]`, increasing
/// for odd `m` and decreasing for even `m`; across gaps the clamped angle
/// stays at a multiple of `pi`, so the result is continuous and constant there.
pub fn floquet_ids(lambda: f64, bands: &BandStructure) -> Result<f64> {
    if !(lambda >= bands.spectral_bottom) {
        return Err(Error::Domain(format!(
            "lambda = {lambda} lies below the spectrum (bottom {})",
            bands.spectral_bottom
        )));
    }
    Ok(ids_unchecked(lambda, bands.alpha, bands.a))
}

pub(crate) fn ids_unchecked(lambda: f64, alpha: f64, a: f64) -> f64 {
    let n = if lambda <= 0.0 {
        1
    } else {
        ((lambda.sqrt() * a / PI).ceil() as u64).max(1)
    };
    let d = discriminant_unchecked(lambda, alpha, a).clamp(-1.0, 1.0);
    let angle = if n % 2 == 1 { d.acos() } else { PI - d.acos() };
    ((n - 1) as f64 * PI + angle) / (PI * a)
}

/// Eigenvalues of the single cell with θ-periodic boundary conditions,
/// one per band for `k = 1..=k_max`: the energy in band `k` where
/// `D(lambda) = cos(theta a)`.
///
/// For `alpha > 0` these are the roots in `((k-1)^2 pi^2/a^2, k^2 pi^2/a^2]`;
/// for `alpha < 0` the intervals close on the left instead, and at
/// `alpha = 0` degenerate roots sit on interval endpoints.
pub fn theta_eigenvalues(theta: f64, alpha: f64, a: f64, k_max: usize) -> Result<Vec<f64>> {
    check_period(a)?;
    let phase = theta * a;
    if !(0.0..=PI).contains(&phase) {
        return Err(Error::Domain(format!(
            "theta * a must lie in [0, pi], got {phase}"
        )));
    }
    let target = phase.cos();
    if alpha == 0.0 {
        return Ok((1..=k_max as u64)
            .map(|k| {
                let sigma = if k % 2 == 1 { 1.0 } else { -1.0 };
                let delta = (sigma * target).clamp(-1.0, 1.0).acos();
                let kk = ((k - 1) as f64 * PI + delta) / a;
                kk * kk
            })
            .collect());
    }
    let bands = first_bands(alpha, a, k_max)?;
    bands
        .iter()
        .enumerate()
        .map(|(i, band)| {
            let sigma = if i % 2 == 0 { 1.0 } else { -1.0 };
            band_root(band, sigma, target, alpha, a).ok_or_else(|| {
                Error::Consistency(format!(
                    "no root of D = {target} in band {} = [{}, {}] (alpha = {alpha}, a = {a})",
                    i + 1,
                    band.lo,
                    band.hi
                ))
            })
        })
        .collect()
}

/// Root of `D = target` on a band where `D` runs from `sigma` to `-sigma`.
fn band_root(band: &Interval, sigma: f64, target: f64, alpha: f64, a: f64) -> Option<f64> {
    if target == sigma {
        return Some(band.lo);
    }
    if target == -sigma {
        return Some(band.hi);
    }
    let f = |x: f64| sigma * (discriminant_unchecked(x, alpha, a) - target);
    let (mut lo, mut hi) = (band.lo, band.hi);
    let (f_lo, f_hi) = (f(lo), f(hi));
    if f_lo < 0.0 || f_hi > 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= TOL_EDGE || mid == lo || mid == hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Samples `lambda, D` on a uniform grid of `count` points.
pub fn discriminant_table(alpha: f64, a: f64, lo: f64, hi: f64, count: usize) -> Result<Table> {
    check_period(a)?;
    let mut t = Table::new(&["lambda", "D"]);
    let count = count.max(2);
    for i in 0..count {
        let x = lo + (hi - lo) * i as f64 / (count - 1) as f64;
        t.push(vec![
            Cell::Float(x),
            Cell::Float(discriminant_unchecked(x, alpha, a)),
        ]);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Plain bisection on the closed form, independent of the edge solver.
    fn bisect_closed_form(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let f_lo = f(lo);
        assert!(f_lo * f(hi) < 0.0);
        for _ in 0..300 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0) == (f_lo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn closed_form(lambda: f64, alpha: f64) -> f64 {
        let k = lambda.sqrt();
        k.cos() + alpha / (2.0 * k) * k.sin()
    }

    #[test]
    fn discriminant_examples() {
        assert_abs_diff_eq!(discriminant(0.0, 1.0, 1.0).unwrap(), 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(discriminant(1e-9, 1.0, 1.0).unwrap(), 1.5, epsilon = 1e-8);
        assert_abs_diff_eq!(
            discriminant(PI * PI, 0.0, 1.0).unwrap(),
            -1.0,
            epsilon = 1e-15
        );
        let expected = 2f64.cos() + 0.25 * 2f64.sin();
        assert_abs_diff_eq!(
            discriminant(4.0, 1.0, 1.0).unwrap(),
            expected,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(expected, -0.18882, epsilon = 5e-6);
        assert!(discriminant(1.0, 1.0, 0.0).is_err());
        assert!(discriminant(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn series_matches_closed_form_at_switch() {
        for &(alpha, a) in &[(1.0, 1.0), (-2.0, 0.7), (3.0, 1.9)] {
            for &x in &[0.9e-6, -0.9e-6, 1.1e-6, -1.1e-6] {
                let lambda = x / (a * a);
                let series = discriminant_unchecked(lambda, alpha, a);
                let direct = if lambda > 0.0 {
                    let k = lambda.sqrt();
                    (k * a).cos() + alpha / (2.0 * k) * (k * a).sin()
                } else {
                    let k = (-lambda).sqrt();
                    (k * a).cosh() + alpha / (2.0 * k) * (k * a).sinh()
                };
                assert_abs_diff_eq!(series, direct, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn free_band() {
        let bs = band_edges(0.0, 1.0, 0.0, 100.0).unwrap();
        assert_eq!(bs.bands, vec![Interval { lo: 0.0, hi: 100.0 }]);
        assert!(bs.gaps.is_empty());
    }

    #[test]
    fn lower_gap_edges_are_nodes() {
        let bs = band_edges(1.0, 1.0, spectral_floor(1.0, 1.0), 1200.0).unwrap();
        for n in 1..=10 {
            let g = bs.gap(n).unwrap();
            assert_abs_diff_eq!(g.lo, (n as f64 * PI).powi(2), epsilon = TOL_EDGE);
        }
    }

    #[test]
    fn upper_edge_of_first_gap() {
        let oracle = bisect_closed_form(
            |x| closed_form(x, 1.0) + 1.0,
            PI * PI + 1e-9,
            4.0 * PI * PI - 1e-9,
        );
        let bs = band_edges(1.0, 1.0, -10.0, 50.0).unwrap();
        assert_abs_diff_eq!(bs.gap(1).unwrap().hi, oracle, epsilon = 1e-9);
    }

    #[test]
    fn gaps_alternate_and_are_genuine() {
        for &(alpha, a) in &[
            (1.0, 1.0),
            (-1.0, 1.0),
            (3.0, 0.5),
            (-5.0, 1.0),
            (-2.5, 2.0),
        ] {
            let floor = spectral_floor(alpha, a);
            let bs = band_edges(alpha, a, floor, 600.0).unwrap();
            assert!(!bs.gaps.is_empty());
            for (i, b) in bs.bands.iter().enumerate() {
                assert!(b.lo < b.hi);
                let d = discriminant(b.mid(), alpha, a).unwrap();
                assert!(d.abs() <= 1.0, "band {i} mid D = {d}");
                if b.hi < bs.lambda_max {
                    // edges of band i+1 (1-based) carry D = +1 then -1 for odd bands
                    let sigma = if i % 2 == 0 { 1.0 } else { -1.0 };
                    assert_abs_diff_eq!(
                        discriminant(b.lo, alpha, a).unwrap(),
                        sigma,
                        epsilon = 1e-7
                    );
                    assert_abs_diff_eq!(
                        discriminant(b.hi, alpha, a).unwrap(),
                        -sigma,
                        epsilon = 1e-7
                    );
                }
            }
            for g in &bs.gaps {
                let d = discriminant(g.mid(), alpha, a).unwrap();
                assert!(d.abs() > 1.0, "gap mid D = {d}");
            }
            assert!(discriminant(floor, alpha, a).unwrap() > 1.0);
        }
    }

    #[test]
    fn strongly_attractive_first_band_is_negative() {
        // alpha a < -4 pushes the whole first band below zero
        let bs = band_edges(-6.0, 1.0, spectral_floor(-6.0, 1.0), 50.0).unwrap();
        assert!(bs.bands[0].hi < 0.0);
        assert_abs_diff_eq!(bs.gaps[0].hi, PI * PI, epsilon = TOL_EDGE);
    }

    #[test]
    fn gap_width_limit() {
        let bs = band_edges(1.0, 1.0, -10.0, (41.5 * PI).powi(2)).unwrap();
        for n in 20..=40 {
            let w = bs.gap(n).unwrap().width();
            assert!((w - 2.0).abs() <= 0.05, "gap {n} width {w}");
        }
        let bs = band_edges(-1.0, 1.0, -10.0, (41.5 * PI).powi(2)).unwrap();
        for n in 20..=40 {
            let g = bs.gap(n).unwrap();
            assert_abs_diff_eq!(g.hi, (n as f64 * PI).powi(2), epsilon = TOL_EDGE);
            assert!((g.width() - 2.0).abs() <= 0.05);
        }
    }

    #[test]
    fn window_clipping() {
        let bs = band_edges(1.0, 1.0, 5.0, 30.0).unwrap();
        assert_eq!(bs.bands[0].lo, 5.0);
        assert_eq!(bs.bands.last().unwrap().hi, 30.0);
        assert_eq!(bs.gaps.len(), bs.bands.len() - 1);
        let bs = band_edges(1.0, 1.0, -7.0, 500.0).unwrap();
        assert_eq!(bs.gaps.len(), 7);
    }

    #[test]
    fn ids_free_case() {
        let bs = band_edges(0.0, 1.0, 0.0, 1000.0).unwrap();
        for &x in &[0.1, 3.0, 9.0, 40.0, 900.0] {
            assert_abs_diff_eq!(floquet_ids(x, &bs).unwrap(), x.sqrt() / PI, epsilon = 1e-12);
        }
        assert!(floquet_ids(-1.0, &bs).is_err());
    }

    #[test]
    fn ids_band_and_gap_structure() {
        for &(alpha, a) in &[(1.0, 1.0), (-1.0, 1.0), (2.0, 0.5)] {
            let bs = band_edges(alpha, a, spectral_floor(alpha, a), 400.0).unwrap();
            // acos near |D| = 1 turns the 1e-10 edge error into ~1e-5 · sqrt(D')
            for b in &bs.bands[..bs.bands.len() - 1] {
                let d = floquet_ids(b.hi, &bs).unwrap() - floquet_ids(b.lo, &bs).unwrap();
                assert_abs_diff_eq!(d, 1.0 / a, epsilon = 1e-4);
            }
            for g in &bs.gaps {
                let lo = floquet_ids(g.lo, &bs).unwrap();
                assert_abs_diff_eq!(lo, floquet_ids(g.hi, &bs).unwrap(), epsilon = 1e-4);
                assert_abs_diff_eq!(lo, floquet_ids(g.mid(), &bs).unwrap(), epsilon = 1e-4);
            }
        }
    }

    #[test]
    fn theta_free_cases() {
        let got = theta_eigenvalues(PI / 2.0, 0.0, 1.0, 3).unwrap();
        let want = [(PI / 2.0).powi(2), (1.5 * PI).powi(2), (2.5 * PI).powi(2)];
        for (g, w) in got.iter().zip(want) {
            assert_abs_diff_eq!(*g, w, epsilon = 1e-10);
        }
        let got = theta_eigenvalues(0.0, 0.0, 1.0, 4).unwrap();
        let want = [
            0.0,
            (2.0 * PI).powi(2),
            (2.0 * PI).powi(2),
            (4.0 * PI).powi(2),
        ];
        for (g, w) in got.iter().zip(want) {
            assert_abs_diff_eq!(*g, w, epsilon = 1e-10);
        }
        assert!(theta_eigenvalues(4.0, 1.0, 1.0, 3).is_err());
    }

    #[test]
    fn theta_coupled_first_root() {
        let oracle = bisect_closed_form(|x| closed_form(x, 1.0), 1e-9, PI * PI);
        let got = theta_eigenvalues(PI / 2.0, 1.0, 1.0, 1).unwrap();
        assert_abs_diff_eq!(got[0], oracle, epsilon = 1e-9);
    }

    #[test]
    fn theta_endpoints_reproduce_edges() {
        for &alpha in &[1.0, -1.0, 2.5] {
            let bands = first_bands(alpha, 1.0, 8).unwrap();
            let zero = theta_eigenvalues(0.0, alpha, 1.0, 8).unwrap();
            let pi = theta_eigenvalues(PI, alpha, 1.0, 8).unwrap();
            for (i, b) in bands.iter().enumerate() {
                let (at_plus, at_minus) = if i % 2 == 0 {
                    (b.lo, b.hi)
                } else {
                    (b.hi, b.lo)
                };
                assert_abs_diff_eq!(zero[i], at_plus, epsilon = TOL_EDGE);
                assert_abs_diff_eq!(pi[i], at_minus, epsilon = TOL_EDGE);
            }
        }
    }

    #[test]
    fn band_table_columns() {
        let bs = band_edges(1.0, 1.0, -7.0, 100.0).unwrap();
        let csv = bs.table().to_csv_string().unwrap();
        assert!(csv.starts_with("band_index,lambda_lo,lambda_hi,gap_width_above\n"));
        assert_eq!(csv.lines().count(), bs.bands.len() + 1);
    }

    proptest! {
        #[test]
        fn edges_satisfy_plus_minus_one(alpha in prop_oneof![-4.0f64..-0.05, 0.05f64..4.0], a in 0.5f64..2.0) {
            let bands = first_bands(alpha, a, 6).unwrap();
            for (i, b) in bands.iter().enumerate() {
                let sigma = if i % 2 == 0 { 1.0 } else { -1.0 };
                prop_assert!((discriminant(b.lo, alpha, a).unwrap() - sigma).abs() < 1e-7);
                prop_assert!((discriminant(b.hi, alpha, a).unwrap() + sigma).abs() < 1e-7);
            }
            for w in bands.windows(2) {
                prop_assert!(w[0].hi < w[1].lo);
            }
        }

        #[test]
        fn ids_nondecreasing(alpha in -3.0f64..3.0, a in 0.5f64..2.0, x in 0.0f64..300.0, dx in 0.0f64..5.0) {
            let bottom = first_bands(alpha, a, 1).unwrap()[0].lo;
            let x = bottom + x;
            prop_assert!(ids_unchecked(x + dx, alpha, a) + 1e-12 >= ids_unchecked(x, alpha, a));
        }
    }
}
