//! Eigenvalues of the truncated radial operators `H_{alpha,l,(0,R)}`
//! (Friedrichs behaviour at the origin, Dirichlet at `R`) by Sturm
//! oscillation counting.
//!
//! `count_below(query, lambda)` is the number of zeros in `(0, R)` of the
//! solution regular at the origin, which equals the number of eigenvalues
//! strictly below `lambda`. Eigenvalues are then isolated and refined by
//! bisection on that integer-valued function.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kp1d::Interval;
use crate::lattice::{PartialWave, ShellLattice};
use crate::propagate::{IntegrationStats, Propagator, PruferOptions, PruferState};
use crate::table::{Cell, Table};

/// Default absolute tolerance on eigenvalues.
pub const TOL_EIG: f64 = 1e-10;

/// Seed radius used when a query does not set one.
pub fn default_r0(lattice: &ShellLattice) -> f64 {
    (lattice.first_radius() / 8.0).min(lattice.min_spacing() / 8.0)
}

/// Exponent `s = 1/2 + sqrt(1/4 + c)` of the Friedrichs solution `u ~ r^s`.
pub fn friedrichs_exponent(c: f64) -> Result<f64> {
    let disc = 0.25 + c;
    if disc < 0.0 {
        return Err(Error::Domain(format!(
            "centrifugal constant c = {c} is below -1/4"
        )));
    }
    Ok(0.5 + disc.sqrt())
}

/// Leading-order seed `u ~ r^s`: phase `atan2(r0^s, s r0^(s-1))`, unit
/// Cauchy norm.
pub fn friedrichs_seed(wave: PartialWave, r0: f64) -> Result<PruferState> {
    regular_seed_c(wave.c(), 0.0, r0)
}

/// Prüfer state at `r0` of the solution regular at the origin,
/// `u = r^s (1 + a_1 r^2 + a_2 r^4 + ...)`, normalised to `|u|^2 + |u'|^2 = 1`.
///
/// The series is exact on `(0, first shell)`, where only the centrifugal
/// term acts. Callers keep `|lambda| r0^2` small (see [`seed_radius`]) so
/// that it converges without cancellation.
pub fn regular_seed(wave: PartialWave, lambda: f64, r0: f64) -> Result<PruferState> {
    regular_seed_c(wave.c(), lambda, r0)
}

pub(crate) fn regular_seed_c(c: f64, lambda: f64, r0: f64) -> Result<PruferState> {
    if !(r0 > 0.0) {
        return Err(Error::Domain(format!("seed radius must be > 0, got {r0}")));
    }
    let s = friedrichs_exponent(c)?;
    let x = -lambda * r0 * r0;
    // u / r0^s and u' / r0^(s-1)
    let (mut term, mut u, mut du) = (1.0, 1.0, s);
    for k in 1..200 {
        let k = k as f64;
        term *= x / (2.0 * k * (2.0 * s + 2.0 * k - 1.0));
        u += term;
        du += (s + 2.0 * k) * term;
        if term.abs() < 1e-17 * u.abs().max(1.0) {
            break;
        }
    }
    Ok(PruferState::new(r0, (r0 * u).atan2(du)))
}

/// Seed radius actually used at energy `lambda`: `r0`, shrunk so that
/// `|lambda| r^2 <= 1/4`.
pub fn seed_radius(r0: f64, lambda: f64) -> f64 {
    let cap = 0.5 / lambda.abs().sqrt();
    if cap < r0 {
        cap
    } else {
        r0
    }
}

/// One eigenvalue problem: operator, truncation radius and energy window.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralQuery<'a> {
    pub wave: PartialWave,
    #[serde(skip)]
    pub lattice: &'a ShellLattice,
    pub radius: f64,
    pub interval: Interval,
    pub tol_eig: f64,
    pub r0: f64,
    #[serde(skip)]
    pub prufer: PruferOptions,
}

impl<'a> SpectralQuery<'a> {
    pub fn new(
        wave: PartialWave,
        lattice: &'a ShellLattice,
        radius: f64,
        lo: f64,
        hi: f64,
    ) -> Result<Self> {
        let r0 = default_r0(lattice);
        if !(radius > r0 && radius <= lattice.r_max()) {
            return Err(Error::Range(format!(
                "truncation radius {radius} must lie in ({r0}, r_max = {}]",
                lattice.r_max()
            )));
        }
        if !(lo < hi) {
            return Err(Error::Range(format!(
                "energy window needs lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self {
            wave,
            lattice,
            radius,
            interval: Interval { lo, hi },
            tol_eig: TOL_EIG,
            r0,
            prufer: PruferOptions::default(),
        })
    }

    pub fn with_tol(mut self, tol_eig: f64) -> Result<Self> {
        if !(tol_eig > 0.0) {
            return Err(Error::Range(format!("tol_eig must be > 0, got {tol_eig}")));
        }
        self.tol_eig = tol_eig;
        Ok(self)
    }

    pub fn with_r0(mut self, r0: f64) -> Result<Self> {
        if !(r0 > 0.0 && r0 < self.lattice.first_radius() && r0 < self.radius) {
            return Err(Error::Range(format!(
                "seed radius {r0} must lie in (0, first shell {})",
                self.lattice.first_radius()
            )));
        }
        self.r0 = r0;
        Ok(self)
    }

    pub fn with_interval(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::Range(format!(
                "energy window needs lo < hi, got [{lo}, {hi}]"
            )));
        }
        self.interval = Interval { lo, hi };
        Ok(self)
    }

    pub fn with_radius(mut self, radius: f64) -> Result<Self> {
        if !(radius > self.r0 && radius <= self.lattice.r_max()) {
            return Err(Error::Range(format!(
                "truncation radius {radius} must lie in ({}, r_max = {}]",
                self.r0,
                self.lattice.r_max()
            )));
        }
        self.radius = radius;
        Ok(self)
    }
}

/// Solver statistics for one `eigenvalues_in` call.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SolverStats {
    pub count_evaluations: usize,
    pub bisection_steps: usize,
    pub ode_steps: usize,
}

impl SolverStats {
    fn merge(mut self, other: SolverStats) -> Self {
        self.count_evaluations += other.count_evaluations;
        self.bisection_steps += other.bisection_steps;
        self.ode_steps += other.ode_steps;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralResult {
    pub eigenvalues: Vec<f64>,
    /// `N(lo)` and `N(hi)`: eigenvalues strictly below each window end.
    pub count_lo: u64,
    pub count_hi: u64,
    pub nu: u32,
    pub l: u32,
    pub radius: f64,
    pub interval: Interval,
    pub tol_eig: f64,
    pub stats: SolverStats,
}

impl SpectralResult {
    /// Rows `l, nu, R, lambda, count_context, stable_flag, drift`, with the
    /// stability columns left unchecked.
    pub fn table(&self) -> Table {
        let mut t = Table::new(RADIAL_COLUMNS);
        for (i, &lambda) in self.eigenvalues.iter().enumerate() {
            t.push(vec![
                Cell::Int(self.l as i64),
                Cell::Int(self.nu as i64),
                Cell::Float(self.radius),
                Cell::Float(lambda),
                Cell::Int((self.count_lo + i as u64) as i64),
                Cell::Text("unchecked".into()),
                Cell::Empty,
            ]);
        }
        t
    }
}

pub const RADIAL_COLUMNS: &[&str] = &[
    "l",
    "nu",
    "R",
    "lambda",
    "count_context",
    "stable_flag",
    "drift",
];

fn count_with_stats(query: &SpectralQuery<'_>, lambda: f64) -> Result<(u64, IntegrationStats)> {
    let c = query.wave.c();
    let r0 = seed_radius(query.r0, lambda);
    let seed = regular_seed_c(c, lambda, r0)?;
    let prop = Propagator::new(c, lambda, query.lattice, query.prufer);
    let (state, stats) = prop.integrate(r0, query.radius, seed, None)?;
    Ok((state.zero_count(), stats))
}

/// Number of eigenvalues of the truncated operator strictly below `lambda`.
pub fn count_below(query: &SpectralQuery<'_>, lambda: f64) -> Result<u64> {
    count_with_stats(query, lambda).map(|(n, _)| n)
}

struct Counter<'q, 'a> {
    query: &'q SpectralQuery<'a>,
}

impl Counter<'_, '_> {
    fn count(&self, lambda: f64, stats: &mut SolverStats) -> Result<u64> {
        let (n, ode) = count_with_stats(self.query, lambda)?;
        stats.count_evaluations += 1;
        stats.ode_steps += ode.accepted_steps + ode.rejected_steps;
        Ok(n)
    }

    /// Splits `(lo, hi)` until every bracket holds one eigenvalue, then
    /// refines each to `tol_eig`.
    fn solve(&self, lo: f64, hi: f64, n_lo: u64, n_hi: u64) -> Result<(Vec<f64>, SolverStats)> {
        let mut stats = SolverStats::default();
        let tol = self.query.tol_eig;
        match n_hi.checked_sub(n_lo) {
            None => Err(Error::Consistency(format!(
                "count decreased from {n_lo} to {n_hi} across [{lo}, {hi}]"
            ))),
            Some(0) => Ok((Vec::new(), stats)),
            Some(1) => {
                let (mut a, mut b) = (lo, hi);
                while b - a > tol {
                    let mid = 0.5 * (a + b);
                    if mid == a || mid == b {
                        break;
                    }
                    stats.bisection_steps += 1;
                    let n = self.count(mid, &mut stats)?;
                    if n == n_lo {
                        a = mid;
                    } else if n == n_hi {
                        b = mid;
                    } else {
                        return Err(Error::Consistency(format!(
                            "count {n} at {mid} outside [{n_lo}, {n_hi}]; ODE tolerance too loose"
                        )));
                    }
                }
                Ok((vec![0.5 * (a + b)], stats))
            }
            Some(k) => {
                if hi - lo <= tol {
                    return Err(Error::Consistency(format!(
                        "{k} eigenvalues within {tol:e} of {lo}; spectrum must be simple"
                    )));
                }
                let mid = 0.5 * (lo + hi);
                stats.bisection_steps += 1;
                let n_mid = self.count(mid, &mut stats)?;
                if n_mid < n_lo || n_mid > n_hi {
                    return Err(Error::Consistency(format!(
                        "count {n_mid} at {mid} outside [{n_lo}, {n_hi}]"
                    )));
                }
                let (left, right) = rayon::join(
                    || self.solve(lo, mid, n_lo, n_mid),
                    || self.solve(mid, hi, n_mid, n_hi),
                );
                let (mut ev, s1) = left?;
                let (ev2, s2) = right?;
                ev.extend(ev2);
                Ok((ev, stats.merge(s1).merge(s2)))
            }
        }
    }
}

/// All eigenvalues in the query window, ascending.
pub fn eigenvalues_in(query: &SpectralQuery<'_>) -> Result<SpectralResult> {
    let counter = Counter { query };
    let mut stats = SolverStats::default();
    let Interval { lo, hi } = query.interval;
    let n_lo = counter.count(lo, &mut stats)?;
    let n_hi = counter.count(hi, &mut stats)?;
    let (eigenvalues, s) = counter.solve(lo, hi, n_lo, n_hi)?;
    let stats = stats.merge(s);
    if eigenvalues.len() as u64 != n_hi - n_lo {
        return Err(Error::Consistency(format!(
            "found {} eigenvalues, counts say {}",
            eigenvalues.len(),
            n_hi - n_lo
        )));
    }
    if let Some(w) = eigenvalues
        .windows(2)
        .find(|w| w[1] - w[0] <= query.tol_eig)
    {
        return Err(Error::Consistency(format!(
            "eigenvalues {} and {} not separated by tol_eig",
            w[0], w[1]
        )));
    }
    Ok(SpectralResult {
        eigenvalues,
        count_lo: n_lo,
        count_hi: n_hi,
        nu: query.wave.nu(),
        l: query.wave.l(),
        radius: query.radius,
        interval: query.interval,
        tol_eig: query.tol_eig,
        stats,
    })
}

/// Largest eigenvalue shift in the window when the seed radius is halved.
/// Must stay below `tol_eig` for the Friedrichs seed to be trusted.
pub fn r0_sensitivity(query: &SpectralQuery<'_>) -> Result<f64> {
    let base = eigenvalues_in(query)?;
    let halved = query.clone().with_r0(0.5 * query.r0)?;
    let other = eigenvalues_in(&halved)?;
    if base.eigenvalues.len() != other.eigenvalues.len() {
        return Ok(f64::INFINITY);
    }
    Ok(base
        .eigenvalues
        .iter()
        .zip(&other.eigenvalues)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Eigenvalue found in a gap at the largest truncation radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapEigenvalue {
    pub lambda: f64,
    /// Distance to the nearest eigenvalue at the second-largest radius.
    pub drift: f64,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapScan {
    pub nu: u32,
    pub l: u32,
    pub gap: Interval,
    pub radii: Vec<f64>,
    /// Eigenvalues in the gap at each radius.
    pub per_radius: Vec<Vec<f64>>,
    pub stab_tol: f64,
    pub candidates: Vec<GapEigenvalue>,
}

impl GapScan {
    pub fn stable(&self) -> impl Iterator<Item = &GapEigenvalue> {
        self.candidates.iter().filter(|e| e.stable)
    }

    pub fn stable_values(&self) -> Vec<f64> {
        self.stable().map(|e| e.lambda).collect()
    }

    /// Radial CSV rows for the largest radius.
    pub fn table(&self) -> Table {
        let mut t = Table::new(RADIAL_COLUMNS);
        let r = *self.radii.last().expect("scan has radii");
        for (i, e) in self.candidates.iter().enumerate() {
            t.push(vec![
                Cell::Int(self.l as i64),
                Cell::Int(self.nu as i64),
                Cell::Float(r),
                Cell::Float(e.lambda),
                Cell::Int(i as i64),
                Cell::Text(e.stable.to_string()),
                Cell::Float(e.drift),
            ]);
        }
        t
    }
}

/// Relative margin kept from the gap edges when scanning a gap.
pub const GAP_EDGE_MARGIN: f64 = 1e-6;

/// Eigenvalues in `gap` at each radius of `radii`; those that move less
/// than `stab_tol` between the two largest radii are flagged stable.
///
/// Eigenvalues belonging to states localised away from the truncation
/// point converge exponentially in `R`; boundary artefacts do not.
pub fn stable_gap_eigenvalues(
    wave: PartialWave,
    lattice: &ShellLattice,
    gap: Interval,
    radii: &[f64],
    stab_tol: f64,
    tol_eig: f64,
) -> Result<GapScan> {
    if radii.len() < 3 {
        return Err(Error::Precondition(format!(
            "need at least 3 truncation radii, got {}",
            radii.len()
        )));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition("truncation radii must ascend".into()));
    }
    if !(gap.hi > gap.lo) {
        return Err(Error::Precondition(format!(
            "empty gap [{}, {}]",
            gap.lo, gap.hi
        )));
    }
    let margin = GAP_EDGE_MARGIN * gap.width();
    let per_radius = radii
        .iter()
        .map(|&r| {
            let q = SpectralQuery::new(wave, lattice, r, gap.lo + margin, gap.hi - margin)?
                .with_tol(tol_eig)?;
            eigenvalues_in(&q).map(|res| res.eigenvalues)
        })
        .collect::<Result<Vec<_>>>()?;
    let last = &per_radius[per_radius.len() - 1];
    let prev = &per_radius[per_radius.len() - 2];
    let candidates = last
        .iter()
        .map(|&lambda| {
            let drift = nearest_distance(prev, lambda).unwrap_or(f64::INFINITY);
            GapEigenvalue {
                lambda,
                drift,
                stable: drift < stab_tol,
            }
        })
        .collect();
    Ok(GapScan {
        nu: wave.nu(),
        l: wave.l(),
        gap,
        radii: radii.to_vec(),
        per_radius,
        stab_tol,
        candidates,
    })
}

/// Distance from `x` to the closest entry of the ascending list `sorted`.
pub fn nearest_distance(sorted: &[f64], x: f64) -> Option<f64> {
    let i = sorted.partition_point(|&v| v < x);
    let right = sorted.get(i).map(|v| (v - x).abs());
    let left = i.checked_sub(1).map(|j| (x - sorted[j]).abs());
    match (left, right) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kp1d::{band_edges, spectral_floor};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn free() -> ShellLattice {
        ShellLattice::periodic(0.0, 1.0, 200.0).unwrap()
    }

    #[test]
    fn friedrichs_exponents() {
        assert_eq!(friedrichs_exponent(0.0).unwrap(), 1.0);
        assert_eq!(friedrichs_exponent(2.0).unwrap(), 2.0);
        assert_eq!(friedrichs_exponent(-0.25).unwrap(), 0.5);
        assert!(friedrichs_exponent(-0.3).is_err());
        let w = PartialWave::new(3, 0).unwrap();
        let st = friedrichs_seed(w, 0.05).unwrap();
        assert_abs_diff_eq!(st.theta, 0.05f64.atan(), epsilon = 1e-15);
        assert_eq!(st.log_rho, 0.0);
        assert!(friedrichs_seed(w, 0.0).is_err());
        let st = friedrichs_seed(PartialWave::new(3, 1).unwrap(), 0.05).unwrap();
        assert_abs_diff_eq!(st.theta, 0.05f64.atan2(2.0), epsilon = 1e-15);
        // c = 0: u = sin(kr) and u = sinh(kr)
        for &(lambda, r) in &[(4.0f64, 0.1f64), (-9.0, 0.1), (0.25, 0.5)] {
            let k = lambda.abs().sqrt();
            let want = if lambda > 0.0 {
                ((k * r).sin() / k).atan2((k * r).cos())
            } else {
                ((k * r).sinh() / k).atan2((k * r).cosh())
            };
            assert_abs_diff_eq!(
                regular_seed(w, lambda, r).unwrap().theta,
                want,
                epsilon = 1e-15
            );
        }
        // c = 2 (l = 1): u = sin(kr)/(kr) - cos(kr), up to normalisation
        let w = PartialWave::new(3, 1).unwrap();
        let (k, r) = (2.0f64, 0.2f64);
        let x = k * r;
        let u = x.sin() / x - x.cos();
        let du = k * (x.sin() - (x.sin() / x - x.cos()) / x);
        assert_abs_diff_eq!(
            regular_seed(w, k * k, r).unwrap().theta,
            u.atan2(du),
            epsilon = 1e-13
        );
        assert_eq!(seed_radius(0.125, 1e4), 0.005);
        assert_eq!(seed_radius(0.125, 1.0), 0.125);
    }

    #[test]
    fn free_dirichlet_counts() {
        let lat = free();
        let wave = PartialWave::new(3, 0).unwrap();
        let q = SpectralQuery::new(wave, &lat, 10.0, 0.0, 1.0).unwrap();
        for &lambda in &[0.05f64, 0.3, 1.0, 4.4, 17.0, 60.0] {
            let want = (lambda.sqrt() * 10.0 / PI).floor() as u64;
            assert_eq!(count_below(&q, lambda).unwrap(), want, "lambda {lambda}");
        }
    }

    #[test]
    fn free_eigenvalues_exact() {
        let lat = free();
        let wave = PartialWave::new(3, 0).unwrap();
        let q = SpectralQuery::new(wave, &lat, 10.0, 0.0, 1.0).unwrap();
        let res = eigenvalues_in(&q).unwrap();
        assert_eq!(res.eigenvalues.len(), 3);
        for (n, ev) in res.eigenvalues.iter().enumerate() {
            let want = ((n + 1) as f64 * PI / 10.0).powi(2);
            assert_abs_diff_eq!(*ev, want, epsilon = 1e-9);
        }
        assert_eq!(res.table().len(), 3);
    }

    #[test]
    fn nothing_below_the_floor() {
        for &alpha in &[1.0, -1.0, -3.0] {
            let lat = ShellLattice::periodic(alpha, 1.0, 50.0).unwrap();
            for l in [0, 1] {
                let q = SpectralQuery::new(PartialWave::new(3, l).unwrap(), &lat, 20.5, -1.0, 1.0)
                    .unwrap();
                assert_eq!(count_below(&q, spectral_floor(alpha, 1.0)).unwrap(), 0);
            }
        }
        let lat = ShellLattice::periodic(1.0, 1.0, 50.0).unwrap();
        let q = SpectralQuery::new(PartialWave::new(3, 0).unwrap(), &lat, 20.5, -1.0, 1.0).unwrap();
        assert_eq!(count_below(&q, 0.0).unwrap(), 0);
    }

    #[test]
    fn count_monotone_in_lambda_and_radius() {
        let lat = ShellLattice::periodic(1.0, 1.0, 80.0).unwrap();
        let wave = PartialWave::new(3, 1).unwrap();
        let mut prev_l = 0;
        for i in 0..40 {
            let lambda = -2.0 + i as f64 * 1.3;
            let q = SpectralQuery::new(wave, &lat, 30.0, -5.0, 5.0).unwrap();
            let n = count_below(&q, lambda).unwrap();
            assert!(n >= prev_l);
            prev_l = n;
            let mut prev_r = 0;
            for r in [5.0, 10.0, 20.0, 40.0] {
                let n = count_below(&q.clone().with_radius(r).unwrap(), lambda).unwrap();
                assert!(n >= prev_r);
                prev_r = n;
            }
        }
    }

    #[test]
    fn interlacing_with_free_string() {
        let lat = ShellLattice::periodic(1.0, 1.0, 80.0).unwrap();
        let wave = PartialWave::new(3, 0).unwrap();
        let r = 20.0;
        let q = SpectralQuery::new(wave, &lat, r, 0.0, 1.0).unwrap();
        let shells = lat.shells_in(0.0, r).unwrap().len() as i64;
        for i in 1..60 {
            let lambda = i as f64 * 2.1;
            let n = count_below(&q, lambda).unwrap() as i64;
            let free = (lambda.sqrt() * r / PI).floor() as i64;
            assert!((n - free).abs() <= shells + 1);
        }
    }

    #[test]
    fn seed_radius_insensitive() {
        let lat = ShellLattice::periodic(1.0, 1.0, 40.0).unwrap();
        for l in [0, 2] {
            let q = SpectralQuery::new(PartialWave::new(3, l).unwrap(), &lat, 10.0, 0.0, 25.0)
                .unwrap()
                .with_tol(1e-9)
                .unwrap();
            let d = r0_sensitivity(&q).unwrap();
            assert!(d < q.tol_eig * 10.0, "l = {l}: shift {d}");
        }
    }

    #[test]
    fn gap_eigenvalues_appear_only_with_centrifugal_term() {
        let lat = ShellLattice::periodic(1.0, 1.0, 100.0).unwrap();
        let bs = band_edges(1.0, 1.0, spectral_floor(1.0, 1.0), 50.0).unwrap();
        let g = bs.gap(1).unwrap();
        let radii = [20.0, 40.0, 80.0];
        let flat =
            stable_gap_eigenvalues(PartialWave::new(3, 0).unwrap(), &lat, g, &radii, 1e-3, 1e-9)
                .unwrap();
        assert_eq!(flat.stable().count(), 0);
        let bent =
            stable_gap_eigenvalues(PartialWave::new(3, 6).unwrap(), &lat, g, &radii, 1e-3, 1e-9)
                .unwrap();
        assert!(bent.stable().count() > 0);
        for e in bent.stable() {
            assert!(g.lo < e.lambda && e.lambda < g.hi);
        }
    }

    #[test]
    fn nearest() {
        assert_eq!(nearest_distance(&[], 1.0), None);
        assert_eq!(nearest_distance(&[1.0, 3.0], 2.5), Some(0.5));
        assert_eq!(nearest_distance(&[1.0, 3.0], 0.0), Some(1.0));
        assert_eq!(nearest_distance(&[1.0, 3.0], 9.0), Some(6.0));
    }

    #[test]
    fn query_validation() {
        let lat = free();
        let w = PartialWave::new(3, 0).unwrap();
        assert!(SpectralQuery::new(w, &lat, 300.0, 0.0, 1.0).is_err());
        assert!(SpectralQuery::new(w, &lat, 10.0, 1.0, 1.0).is_err());
        assert!(SpectralQuery::new(w, &lat, 10.0, 0.0, 1.0)
            .unwrap()
            .with_tol(0.0)
            .is_err());
        assert!(stable_gap_eigenvalues(
            w,
            &lat,
            Interval { lo: 1.0, hi: 2.0 },
            &[10.0, 20.0],
            1e-6,
            1e-9
        )
        .is_err());
    }
}
