//! Propagation of Cauchy data `(u, u')` for `-u'' + (c/r^2) u = lambda u`
//! across free segments and δ shells.
//!
//! Closed-form 2×2 transfer matrices cover the `c = 0` pieces. The general
//! case uses Prüfer variables `u = rho sin(theta)`, `u' = rho cos(theta)`;
//! zeros of `u` are exactly the crossings of `theta` through multiples of
//! `pi`, which is what the eigenvalue counter needs.

use std::ops::Mul;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{PartialWave, ShellLattice};
use crate::rk::{try_step, Controller, StepOutcome, StepStats};
use crate::table::{Cell, Table};

use std::f64::consts::PI;

const SERIES_SWITCH: f64 = 1e-6;

/// Real 2×2 matrix mapping `(u, u')` at a segment start to its end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransferMatrix {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

impl TransferMatrix {
    pub const IDENTITY: Self = Self {
        m11: 1.0,
        m12: 0.0,
        m21: 0.0,
        m22: 1.0,
    };

    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn trace(&self) -> f64 {
        self.m11 + self.m22
    }

    pub fn half_trace(&self) -> f64 {
        0.5 * self.trace()
    }

    pub fn apply(&self, (u, du): (f64, f64)) -> (f64, f64) {
        (self.m11 * u + self.m12 * du, self.m21 * u + self.m22 * du)
    }

    /// Largest eigenvalue modulus of a unimodular matrix: `|D| + sqrt(D^2-1)`
    /// outside the bands, 1 inside.
    pub fn spectral_radius(&self) -> f64 {
        let d = self.half_trace().abs();
        if d <= 1.0 {
            1.0
        } else {
            d + (d * d - 1.0).sqrt()
        }
    }
}

impl Mul for TransferMatrix {
    type Output = TransferMatrix;

    /// `self * rhs` applies `rhs` first.
    fn mul(self, rhs: TransferMatrix) -> TransferMatrix {
        TransferMatrix {
            m11: self.m11 * rhs.m11 + self.m12 * rhs.m21,
            m12: self.m11 * rhs.m12 + self.m12 * rhs.m22,
            m21: self.m21 * rhs.m11 + self.m22 * rhs.m21,
            m22: self.m21 * rhs.m12 + self.m22 * rhs.m22,
        }
    }
}

/// `(cos(kd), sin(kd)/k)` for `lambda = k^2`, continued analytically to
/// `lambda <= 0`.
fn cos_sinc(lambda: f64, d: f64) -> (f64, f64) {
    let x = lambda * d * d;
    if x.abs() < SERIES_SWITCH {
        let (mut c, mut s) = (0.0, 0.0);
        let (mut term_c, mut term_s) = (1.0, 1.0);
        for j in 0..6 {
            if j > 0 {
                let jj = j as f64;
                term_c *= -x / ((2.0 * jj - 1.0) * (2.0 * jj));
                term_s *= -x / ((2.0 * jj) * (2.0 * jj + 1.0));
            }
            c += term_c;
            s += term_s;
        }
        (c, d * s)
    } else if lambda > 0.0 {
        let k = lambda.sqrt();
        ((k * d).cos(), (k * d).sin() / k)
    } else {
        let kappa = (-lambda).sqrt();
        ((kappa * d).cosh(), (kappa * d).sinh() / kappa)
    }
}

/// Transfer matrix of `-u'' = lambda u` over length `d`.
pub fn free_transfer(lambda: f64, d: f64) -> Result<TransferMatrix> {
    if !(d >= 0.0) {
        return Err(Error::Domain(format!(
            "segment length must be >= 0, got {d}"
        )));
    }
    let (c, s) = cos_sinc(lambda, d);
    Ok(TransferMatrix {
        m11: c,
        m12: s,
        m21: -lambda * s,
        m22: c,
    })
}

/// Jump `u' -> u' + alpha u` with `u` continuous.
pub fn delta_jump(alpha: f64) -> TransferMatrix {
    TransferMatrix {
        m11: 1.0,
        m12: 0.0,
        m21: alpha,
        m22: 1.0,
    }
}

/// One period: the shell jump followed by a free segment of length `a`.
pub fn cell_transfer(lambda: f64, alpha: f64, a: f64) -> Result<TransferMatrix> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("period a must be > 0, got {a}")));
    }
    Ok(free_transfer(lambda, a)? * delta_jump(alpha))
}

/// Prüfer phase, log-amplitude and solution functionals along a radial
/// integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PruferState {
    pub r: f64,
    /// Unwrapped phase; `u(r) = 0` exactly when `theta` is a multiple of `pi`.
    pub theta: f64,
    pub log_rho: f64,
    /// `∫ |u|^2` from the integration start.
    pub l2_accum: f64,
    /// Running max of `|u|^2 + |u'|^2` over stepper nodes and both sides of
    /// every shell; a lower bound on the true supremum.
    pub sup_cauchy: f64,
}

impl PruferState {
    /// State with the given phase and unit Cauchy norm at `r`.
    pub fn new(r: f64, theta: f64) -> Self {
        Self {
            r,
            theta,
            log_rho: 0.0,
            l2_accum: 0.0,
            sup_cauchy: 1.0,
        }
    }

    pub fn from_cauchy(r: f64, u: f64, du: f64) -> Self {
        let theta = u.atan2(du).rem_euclid(2.0 * PI);
        let theta = if theta >= PI { theta - PI } else { theta };
        let rho2 = u * u + du * du;
        // theta reduced to [0, pi) flips the sign of (u, u'); amplitude unaffected
        Self {
            r,
            theta,
            log_rho: 0.5 * rho2.ln(),
            l2_accum: 0.0,
            sup_cauchy: rho2,
        }
    }

    /// `(u, u')`, up to the overall sign fixed by the phase branch.
    pub fn cauchy(&self) -> (f64, f64) {
        let rho = self.log_rho.exp();
        (rho * self.theta.sin(), rho * self.theta.cos())
    }

    pub fn cauchy_norm_sq(&self) -> f64 {
        (2.0 * self.log_rho).exp()
    }

    /// Number of zeros of `u` passed since a start with `theta` in `(0, pi)`,
    /// excluding a zero exactly at the current radius.
    pub fn zero_count(&self) -> u64 {
        let m = (self.theta / PI).ceil() - 1.0;
        if m > 0.0 {
            m as u64
        } else {
            0
        }
    }

    /// Resets accumulated functionals and renormalises the Cauchy norm to 1.
    pub fn renormalized(&self) -> Self {
        Self::new(self.r, self.theta)
    }
}

/// One accepted node of a Prüfer integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub r: f64,
    pub theta: f64,
    pub log_rho: f64,
    pub l2_accum: f64,
}

pub fn trajectory_table(points: &[TrajectoryPoint]) -> Table {
    let mut t = Table::new(&["r", "theta", "log_rho", "l2_accum"]);
    for p in points {
        t.push(vec![
            Cell::Float(p.r),
            Cell::Float(p.theta),
            Cell::Float(p.log_rho),
            Cell::Float(p.l2_accum),
        ]);
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PruferOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Step cap; `None` uses an eighth of the lattice's minimal shell spacing.
    pub max_step: Option<f64>,
}

impl Default for PruferOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            max_step: None,
        }
    }
}

/// Counters reported by an integration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct IntegrationStats {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub shells_crossed: usize,
}

impl IntegrationStats {
    pub fn merge(&mut self, other: &IntegrationStats) {
        self.accepted_steps += other.accepted_steps;
        self.rejected_steps += other.rejected_steps;
        self.shells_crossed += other.shells_crossed;
    }
}

/// Integrates the Prüfer system for `wave` at energy `lambda` from
/// `r_start = state0.r` to `r_end`, applying every shell in `(r_start, r_end]`.
pub fn integrate_prufer(
    wave: PartialWave,
    lambda: f64,
    lattice: &ShellLattice,
    r_start: f64,
    r_end: f64,
    state0: PruferState,
) -> Result<PruferState> {
    let prop = Propagator::new(wave.c(), lambda, lattice, PruferOptions::default());
    prop.integrate(r_start, r_end, state0, None).map(|(s, _)| s)
}

/// Integrator for one `(c, lambda, lattice)` triple.
#[derive(Debug, Clone)]
pub struct Propagator<'a> {
    c: f64,
    lambda: f64,
    lattice: &'a ShellLattice,
    opts: PruferOptions,
    /// Scale of the modified Prüfer transform used internally; the step
    /// count then stays flat in `lambda`.
    scale: f64,
}

/// Internal state: scaled phase, scaled log-amplitude, `∫ u^2`.
type Inner = [f64; 3];

impl<'a> Propagator<'a> {
    pub fn new(c: f64, lambda: f64, lattice: &'a ShellLattice, opts: PruferOptions) -> Self {
        Self {
            c,
            lambda,
            lattice,
            opts,
            scale: lambda.abs().sqrt().max(1.0),
        }
    }

    fn max_step(&self) -> f64 {
        self.opts
            .max_step
            .unwrap_or_else(|| self.lattice.min_spacing() / 8.0)
    }

    fn to_inner(&self, st: &PruferState) -> Inner {
        let s = self.scale;
        let m = (st.theta / PI).floor();
        let th = st.theta - m * PI;
        let (sn, cs) = th.sin_cos();
        let phi = m * PI + (s * sn).atan2(cs);
        let log_rho = st.log_rho + 0.5 * (s * sn * sn + cs * cs / s).ln();
        [phi, log_rho, st.l2_accum]
    }

    fn cauchy_sq(&self, y: &Inner) -> f64 {
        let s = self.scale;
        let (sn, cs) = y[0].sin_cos();
        (2.0 * y[1]).exp() * (sn * sn / s + s * cs * cs)
    }

    fn state_at(&self, r: f64, y: &Inner, sup: f64) -> PruferState {
        let s = self.scale;
        let m = (y[0] / PI).floor();
        let ph = y[0] - m * PI;
        let (sn, cs) = ph.sin_cos();
        let theta = m * PI + sn.atan2(s * cs);
        let log_rho = y[1] + 0.5 * (sn * sn / s + s * cs * cs).ln();
        PruferState {
            r,
            theta,
            log_rho,
            l2_accum: y[2],
            sup_cauchy: sup,
        }
    }

    fn rhs(&self, r: f64, y: &Inner) -> Inner {
        let s = self.scale;
        let q = self.lambda - self.c / (r * r);
        let (sn, cs) = y[0].sin_cos();
        [
            s * cs * cs + q / s * sn * sn,
            (s - q / s) * sn * cs,
            (2.0 * y[1]).exp() * sn * sn / s,
        ]
    }

    fn jump(&self, y: &mut Inner) {
        let m = (y[0] / PI).floor();
        let ph = y[0] - m * PI;
        if ph == 0.0 {
            return;
        }
        let (sn, cs) = ph.sin_cos();
        let x = cs + self.lattice.alpha() / self.scale * sn;
        y[0] = m * PI + sn.atan2(x);
        y[1] += x.hypot(sn).ln();
    }

    /// Integrates from `r_start` to `r_end`; optionally records every
    /// accepted node.
    pub fn integrate(
        &self,
        r_start: f64,
        r_end: f64,
        state0: PruferState,
        mut trajectory: Option<&mut Vec<TrajectoryPoint>>,
    ) -> Result<(PruferState, IntegrationStats)> {
        if !(r_start > 0.0 && r_start < r_end && r_end <= self.lattice.r_max()) {
            return Err(Error::Range(format!(
                "need 0 < r_start < r_end <= r_max = {}, got [{r_start}, {r_end}]",
                self.lattice.r_max()
            )));
        }
        if state0.r != r_start {
            return Err(Error::Precondition(format!(
                "state radius {} differs from r_start {r_start}",
                state0.r
            )));
        }
        let shells = self.lattice.shells_unchecked(r_start, r_end);
        let ctl = Controller {
            rtol: self.opts.rtol,
            atol: self.opts.atol,
            controlled: 2,
        };
        let mut stats = StepStats {
            accepted: 0,
            rejected: 0,
        };
        let mut y = self.to_inner(&state0);
        let mut sup = state0.sup_cauchy;
        let mut r = r_start;
        let h_cap = self.max_step();
        let mut h = h_cap.min(0.1 * r_start);
        let f = |x: f64, y: &Inner| self.rhs(x, y);
        let record = |r: f64, y: &Inner, sup: f64, traj: &mut Option<&mut Vec<TrajectoryPoint>>| {
            if let Some(t) = traj.as_deref_mut() {
                let st = self.state_at(r, y, sup);
                t.push(TrajectoryPoint {
                    r,
                    theta: st.theta,
                    log_rho: st.log_rho,
                    l2_accum: st.l2_accum,
                });
            }
        };
        record(r, &y, sup, &mut trajectory);

        let mut stops: Vec<(f64, bool)> = shells.iter().map(|&x| (x, true)).collect();
        if shells.last() != Some(&r_end) {
            stops.push((r_end, false));
        }
        for (stop, is_shell) in stops {
            let mut dy = f(r, &y);
            while r < stop {
                let remaining = stop - r;
                let last = h >= remaining;
                let step = if last { remaining } else { h.min(h_cap) };
                match try_step(&f, &ctl, r, &y, &dy, step) {
                    StepOutcome::Accepted {
                        y: yn,
                        dy: dn,
                        h_next,
                    } => {
                        r = if last { stop } else { r + step };
                        y = yn;
                        dy = dn;
                        h = h_next.min(h_cap);
                        stats.accepted += 1;
                        sup = sup.max(self.cauchy_sq(&y));
                        record(r, &y, sup, &mut trajectory);
                    }
                    StepOutcome::Rejected { h_next } => {
                        stats.rejected += 1;
                        h = h_next;
                        if h < 1e-14 * r.max(1.0) {
                            return Err(Error::Singularity {
                                r,
                                message: format!(
                                    "step size underflow (c = {}, lambda = {}); \
                                     start the integration further from the origin",
                                    self.c, self.lambda
                                ),
                            });
                        }
                    }
                }
            }
            if is_shell {
                self.jump(&mut y);
                sup = sup.max(self.cauchy_sq(&y));
            }
        }
        let out = self.state_at(r_end, &y, sup);
        Ok((
            out,
            IntegrationStats {
                accepted_steps: stats.accepted,
                rejected_steps: stats.rejected,
                shells_crossed: shells.len(),
            },
        ))
    }
}
