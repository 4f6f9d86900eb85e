//! Dormand-Prince 5(4) embedded pair with FSAL, specialised to small fixed
//! state vectors.

pub(crate) struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
}

pub(crate) struct Controller {
    pub rtol: f64,
    pub atol: f64,
    /// How many leading components enter the error norm.
    pub controlled: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b_hat
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])], h: f64) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

pub(crate) enum StepOutcome<const N: usize> {
    Accepted {
        y: [f64; N],
        dy: [f64; N],
        h_next: f64,
    },
    Rejected {
        h_next: f64,
    },
}

/// One attempted step from `(x, y)` with slope `dy` (FSAL).
pub(crate) fn try_step<const N: usize>(
    f: &impl Fn(f64, &[f64; N]) -> [f64; N],
    ctl: &Controller,
    x: f64,
    y: &[f64; N],
    dy: &[f64; N],
    h: f64,
) -> StepOutcome<N> {
    let k1 = *dy;
    let k2 = f(x + C2 * h, &axpy(y, &[(A21, &k1)], h));
    let k3 = f(x + C3 * h, &axpy(y, &[(A31, &k1), (A32, &k2)], h));
    let k4 = f(
        x + C4 * h,
        &axpy(y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h),
    );
    let k5 = f(
        x + C5 * h,
        &axpy(y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h),
    );
    let k6 = f(
        x + h,
        &axpy(
            y,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            h,
        ),
    );
    let y_new = axpy(
        y,
        &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
        h,
    );
    let k7 = f(x + h, &y_new);

    let mut err: f64 = 0.0;
    for i in 0..ctl.controlled.min(N) {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let scale = ctl.atol + ctl.rtol * y[i].abs().max(y_new[i].abs());
        err = err.max((e / scale).abs());
    }
    if !err.is_finite() {
        return StepOutcome::Rejected { h_next: 0.25 * h };
    }
    let factor = if err == 0.0 {
        5.0
    } else {
        (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
    };
    if err <= 1.0 {
        StepOutcome::Accepted {
            y: y_new,
            dy: k7,
            h_next: h * factor,
        }
    } else {
        StepOutcome::Rejected {
            h_next: h * factor.min(0.9),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_period() {
        let f = |_x: f64, y: &[f64; 2]| [y[1], -y[0]];
        let ctl = Controller {
            rtol: 1e-11,
            atol: 1e-13,
            controlled: 2,
        };
        let (mut x, mut y, mut h): (f64, [f64; 2], f64) = (0.0, [0.0, 1.0], 0.1);
        let mut dy = f(x, &y);
        let end = 2.0 * std::f64::consts::PI;
        while x < end {
            let step = h.min(end - x);
            match try_step(&f, &ctl, x, &y, &dy, step) {
                StepOutcome::Accepted {
                    y: yn,
                    dy: dn,
                    h_next,
                } => {
                    x += step;
                    y = yn;
                    dy = dn;
                    h = h_next;
                }
                StepOutcome::Rejected { h_next } => h = h_next,
            }
        }
        assert!(y[0].abs() < 1e-9 && (y[1] - 1.0).abs() < 1e-9);
    }
}
