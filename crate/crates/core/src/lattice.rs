//! δ-shell configurations and partial-wave labels.
//!
//! A [`ShellLattice`] fixes the coupling `alpha` and the radii at which the
//! derivative jump `u'(R+) - u'(R-) = alpha * u(R)` is imposed. Every solver
//! asks the lattice where shells are; nothing else stores radii.

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::json::{invalid, Fields};

/// How the shell radii are laid out.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeSpec {
    /// Shells at `R_n = n*a - a/2`, `n = 1, 2, ...`.
    Periodic { a: f64 },
    /// A finite, strictly increasing list of positive radii.
    Explicit { radii: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShellLattice {
    alpha: f64,
    spec: LatticeSpec,
    r_max: f64,
}

impl ShellLattice {
    pub fn periodic(alpha: f64, a: f64, r_max: f64) -> Result<Self> {
        Self::new(alpha, LatticeSpec::Periodic { a }, r_max)
    }

    pub fn explicit(alpha: f64, radii: Vec<f64>, r_max: f64) -> Result<Self> {
        Self::new(alpha, LatticeSpec::Explicit { radii }, r_max)
    }

    pub fn new(alpha: f64, spec: LatticeSpec, r_max: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::Lattice(format!("alpha must be finite, got {alpha}")));
        }
        if !r_max.is_finite() {
            return Err(Error::Lattice(format!("r_max must be finite, got {r_max}")));
        }
        match &spec {
            LatticeSpec::Periodic { a } => {
                if !(a.is_finite() && *a > 0.0) {
                    return Err(Error::Lattice(format!("period a must be > 0, got {a}")));
                }
            }
            LatticeSpec::Explicit { radii } => {
                if radii.is_empty() {
                    return Err(Error::Lattice("explicit radii list is empty".into()));
                }
                if let Some(bad) = radii.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
                    return Err(Error::Lattice(format!("radius {bad} is not positive")));
                }
                if let Some(w) = radii.windows(2).find(|w| w[1] <= w[0]) {
                    return Err(Error::Lattice(format!(
                        "radii must be strictly increasing, found {} then {}",
                        w[0], w[1]
                    )));
                }
            }
        }
        let lattice = Self { alpha, spec, r_max };
        if r_max <= lattice.first_radius() {
            return Err(Error::Lattice(format!(
                "r_max = {r_max} must exceed the first radius {}",
                lattice.first_radius()
            )));
        }
        Ok(lattice)
    }

    /// Parses the JSON form
    /// `{"alpha": .., "spec": {"periodic": {"a": ..}} | {"explicit": {"radii": [..]}}, "r_max": ..}`.
    ///
    /// `path` is the dotted location of the object inside a larger document
    /// and is used to prefix field names in errors.
    pub fn from_json(value: &Value, path: &str) -> Result<Self> {
        let f = Fields::new(value, path)?;
        f.deny_unknown(&["alpha", "spec", "r_max"])?;
        let alpha = f.f64("alpha")?;
        let r_max = f.f64("r_max")?;
        let spec_path = f.field_path("spec");
        let spec_fields = Fields::new(f.require("spec")?, &spec_path)?;
        let spec = if spec_fields.contains("periodic") {
            spec_fields.deny_unknown(&["periodic"])?;
            let p_path = spec_fields.field_path("periodic");
            let p = Fields::new(spec_fields.require("periodic")?, &p_path)?;
            p.deny_unknown(&["a"])?;
            LatticeSpec::Periodic { a: p.f64("a")? }
        } else if spec_fields.contains("explicit") {
            spec_fields.deny_unknown(&["explicit"])?;
            let e_path = spec_fields.field_path("explicit");
            let e = Fields::new(spec_fields.require("explicit")?, &e_path)?;
            e.deny_unknown(&["radii"])?;
            let radii = e
                .opt_f64_list("radii")?
                .ok_or_else(|| invalid(e.field_path("radii"), "missing required field"))?;
            LatticeSpec::Explicit { radii }
        } else {
            return Err(invalid(
                spec_path,
                "expected exactly one of `periodic` or `explicit`",
            ));
        };
        Self::new(alpha, spec, r_max).map_err(|e| match e {
            Error::Lattice(msg) => invalid(path_or_root(path), msg),
            other => other,
        })
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("lattice serializes")
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Period length for periodic lattices.
    pub fn period(&self) -> Option<f64> {
        match self.spec {
            LatticeSpec::Periodic { a } => Some(a),
            LatticeSpec::Explicit { .. } => None,
        }
    }

    pub fn first_radius(&self) -> f64 {
        match &self.spec {
            LatticeSpec::Periodic { a } => 0.5 * a,
            LatticeSpec::Explicit { radii } => radii[0],
        }
    }

    /// Smallest distance between neighbouring shells. A single explicit
    /// shell reports its own radius.
    pub fn min_spacing(&self) -> f64 {
        match &self.spec {
            LatticeSpec::Periodic { a } => *a,
            LatticeSpec::Explicit { radii } => radii
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(radii[0], f64::min),
        }
    }

    /// Radius of the `n`-th shell of a periodic lattice (`n >= 1`).
    pub fn periodic_radius(a: f64, n: u64) -> f64 {
        (n as f64 - 0.5) * a
    }

    /// All shell radii in the half-open interval `(r_lo, r_hi]`, ascending.
    pub fn shells_in(&self, r_lo: f64, r_hi: f64) -> Result<Vec<f64>> {
        if !(r_lo >= 0.0 && r_lo < r_hi && r_hi <= self.r_max) {
            return Err(Error::Range(format!(
                "need 0 <= r_lo < r_hi <= r_max = {}, got ({r_lo}, {r_hi}]",
                self.r_max
            )));
        }
        Ok(self.shells_unchecked(r_lo, r_hi))
    }

    pub(crate) fn shells_unchecked(&self, r_lo: f64, r_hi: f64) -> Vec<f64> {
        match &self.spec {
            LatticeSpec::Periodic { a } => {
                // first candidate index, backed off by one to absorb rounding
                let start = ((r_lo / a + 0.5).floor() as u64).max(1);
                let mut out = Vec::new();
                let mut n = start.saturating_sub(1).max(1);
                loop {
                    let r = Self::periodic_radius(*a, n);
                    if r > r_hi {
                        break;
                    }
                    if r > r_lo {
                        out.push(r);
                    }
                    n += 1;
                }
                out
            }
            LatticeSpec::Explicit { radii } => {
                let lo = radii.partition_point(|&r| r <= r_lo);
                let hi = radii.partition_point(|&r| r <= r_hi);
                radii[lo..hi.max(lo)].to_vec()
            }
        }
    }
}

fn path_or_root(path: &str) -> String {
    if path.is_empty() {
        "<root>".into()
    } else {
        path.into()
    }
}

/// Centrifugal coefficient `(nu-1)(nu-3)/4 + l(l+nu-2)` of the reduced
/// radial operator in dimension `nu` and angular momentum `l`.
pub fn centrifugal_constant(nu: i64, l: i64) -> Result<f64> {
    if nu < 2 {
        return Err(Error::Domain(format!(
            "dimension nu must be >= 2, got {nu}"
        )));
    }
    if l < 0 {
        return Err(Error::Domain(format!(
            "angular momentum l must be >= 0, got {l}"
        )));
    }
    let (nu, l) = (nu as f64, l as f64);
    Ok((nu - 1.0) * (nu - 3.0) / 4.0 + l * (l + nu - 2.0))
}

/// Angular-momentum sector `(nu, l)`; the centrifugal constant is derived
/// on demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PartialWave {
    nu: u32,
    l: u32,
}

impl PartialWave {
    pub fn new(nu: u32, l: u32) -> Result<Self> {
        if nu < 2 {
            return Err(Error::Domain(format!(
                "dimension nu must be >= 2, got {nu}"
            )));
        }
        Ok(Self { nu, l })
    }

    pub fn nu(&self) -> u32 {
        self.nu
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn c(&self) -> f64 {
        centrifugal_constant(self.nu as i64, self.l as i64).expect("validated at construction")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use serde_json::json;

    fn unit() -> ShellLattice {
        ShellLattice::periodic(1.0, 1.0, 1000.0).unwrap()
    }

    #[test]
    fn periodic_shells() {
        assert_eq!(unit().shells_in(0.0, 3.2).unwrap(), vec![0.5, 1.5, 2.5]);
        assert!(unit().shells_in(0.5, 0.6).unwrap().is_empty());
        assert_eq!(unit().shells_in(0.4, 0.5).unwrap(), vec![0.5]);
    }

    #[test]
    fn explicit_shells() {
        let lat = ShellLattice::explicit(1.0, vec![1.0, 2.5, 4.0], 10.0).unwrap();
        assert_eq!(lat.shells_in(0.0, 3.0).unwrap(), vec![1.0, 2.5]);
        assert_eq!(lat.shells_in(1.0, 4.0).unwrap(), vec![2.5, 4.0]);
        assert_eq!(lat.min_spacing(), 1.0);
    }

    #[test]
    fn bad_ranges() {
        let lat = unit();
        assert!(matches!(lat.shells_in(2.0, 1.0), Err(Error::Range(_))));
        assert!(matches!(lat.shells_in(-1.0, 1.0), Err(Error::Range(_))));
        assert!(matches!(lat.shells_in(0.0, 2000.0), Err(Error::Range(_))));
    }

    #[test]
    fn rejects_invalid_lattices() {
        assert!(ShellLattice::periodic(1.0, 0.0, 10.0).is_err());
        assert!(ShellLattice::periodic(1.0, 1.0, 0.4).is_err());
        assert!(ShellLattice::explicit(1.0, vec![1.0, 1.0, 2.0], 10.0).is_err());
        assert!(ShellLattice::explicit(1.0, vec![2.0, 1.0], 10.0).is_err());
        assert!(ShellLattice::explicit(1.0, vec![-1.0, 1.0], 10.0).is_err());
        assert!(ShellLattice::explicit(1.0, vec![], 10.0).is_err());
    }

    #[test]
    fn centrifugal_values() {
        assert_eq!(centrifugal_constant(3, 0).unwrap(), 0.0);
        assert_eq!(centrifugal_constant(2, 0).unwrap(), -0.25);
        assert_eq!(centrifugal_constant(3, 1).unwrap(), 2.0);
        assert!(matches!(centrifugal_constant(1, 0), Err(Error::Domain(_))));
        assert!(matches!(centrifugal_constant(3, -1), Err(Error::Domain(_))));
        assert_eq!(PartialWave::new(3, 2).unwrap().c(), 6.0);
        assert!(PartialWave::new(1, 0).is_err());
    }

    #[test]
    fn json_round_trip_and_paths() {
        let v = json!({"alpha": 1.0, "spec": {"periodic": {"a": 1.0}}, "r_max": 50.0});
        let lat = ShellLattice::from_json(&v, "lattice").unwrap();
        assert_eq!(lat.to_json(), v);
        let v = json!({"alpha": 1.0, "spec": {"explicit": {"radii": [1.0, 2.0]}}, "r_max": 5.0});
        let lat = ShellLattice::from_json(&v, "").unwrap();
        assert_eq!(lat.to_json(), v);

        let missing = json!({"alpha": 1.0, "spec": {"periodic": {}}, "r_max": 50.0});
        match ShellLattice::from_json(&missing, "lattice") {
            Err(Error::Config { field, .. }) => assert_eq!(field, "lattice.spec.periodic.a"),
            other => panic!("unexpected {other:?}"),
        }
        let missing = json!({"alpha": 1.0, "spec": {"periodic": {}}, "r_max": 50.0});
        match ShellLattice::from_json(&missing, "") {
            Err(Error::Config { field, .. }) => assert_eq!(field, "spec.periodic.a"),
            other => panic!("unexpected {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn split_is_disjoint_union(a in 0.3f64..3.0, r0 in 0.0f64..20.0, d1 in 0.01f64..20.0, d2 in 0.01f64..20.0) {
            let lat = ShellLattice::periodic(1.0, a, 100.0).unwrap();
            let (r1, r2) = (r0 + d1, r0 + d1 + d2);
            let mut joined = lat.shells_in(r0, r1).unwrap();
            joined.extend(lat.shells_in(r1, r2).unwrap());
            prop_assert_eq!(joined, lat.shells_in(r0, r2).unwrap());
        }

        #[test]
        fn k_periods_hold_k_shells(a in 0.1f64..5.0, k in 1u64..200) {
            let lat = ShellLattice::periodic(0.0, a, 1e4).unwrap();
            prop_assert_eq!(lat.shells_in(0.0, k as f64 * a).unwrap().len() as u64, k);
        }

        #[test]
        fn centrifugal_increasing_in_l(nu in 2i64..12, l in 0i64..60) {
            let c0 = centrifugal_constant(nu, l).unwrap();
            prop_assert!(c0 >= -0.25);
            prop_assert!(centrifugal_constant(nu, l + 1).unwrap() > c0);
        }
    }
}
