//! Loading the run configuration and merging it with command-line flags.
//!
//! Precedence is flag > file > default, per field.

use std::path::{Path, PathBuf};

use deltashell::experiments::ExperimentConfig;
use deltashell::json::Fields;
use deltashell::radial::TOL_EIG;
use deltashell::{spectral_floor, Error, Interval, Result, ShellLattice};
use serde::Serialize;
use serde_json::Value;

const TOP_LEVEL: &[&str] = &["lattice", "out", "bands", "eigen", "experiment"];

/// Parsed JSON document; sections are interpreted per command.
pub struct ConfigFile {
    pub doc: Value,
}

fn config_error(field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        field: field.into(),
        message: message.into(),
    }
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let path =
            path.ok_or_else(|| config_error("--config", "a JSON config file is required"))?;
        let text = std::fs::read_to_string(path).map_err(|e| {
            config_error("--config", format!("cannot read {}: {e}", path.display()))
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text)
            .map_err(|e| config_error("<root>", format!("invalid JSON: {e}")))?;
        Fields::new(&doc, "")?.deny_unknown(TOP_LEVEL)?;
        Ok(Self { doc })
    }

    fn root(&self) -> Fields<'_> {
        Fields::new(&self.doc, "").expect("checked at parse time")
    }

    pub fn lattice(&self) -> Result<ShellLattice> {
        ShellLattice::from_json(self.root().require("lattice")?, "lattice")
    }

    pub fn out_dir(&self) -> Result<Option<PathBuf>> {
        match self.root().raw("out") {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(PathBuf::from(s))),
            Some(_) => Err(config_error("out", "expected a path string")),
        }
    }

    fn section(&self, name: &str) -> Option<&Value> {
        self.root().raw(name)
    }
}

/// Output directory: `--out`, then the file's `out`, then `DSS_OUT`, then `out`.
pub fn resolve_out(flag: Option<PathBuf>, file: &ConfigFile) -> Result<PathBuf> {
    if let Some(p) = flag {
        return Ok(p);
    }
    if let Some(p) = file.out_dir()? {
        return Ok(p);
    }
    Ok(std::env::var_os("DSS_OUT").map_or_else(|| PathBuf::from("out"), PathBuf::from))
}

/// Parses `lo:hi`.
pub fn parse_window(s: &str) -> Result<Interval> {
    let err = || {
        config_error(
            "--window",
            format!("expected lo:hi with lo < hi, got `{s}`"),
        )
    };
    let (lo, hi) = s.split_once(':').ok_or_else(err)?;
    let lo: f64 = lo.trim().parse().map_err(|_| err())?;
    let hi: f64 = hi.trim().parse().map_err(|_| err())?;
    if lo.is_finite() && hi.is_finite() && lo < hi {
        Ok(Interval { lo, hi })
    } else {
        Err(err())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandsSettings {
    pub lattice: ShellLattice,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub samples: usize,
}

#[derive(Debug, Default)]
pub struct BandsFlags {
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
    pub samples: Option<usize>,
}

impl BandsSettings {
    pub fn resolve(file: &ConfigFile, flags: &BandsFlags) -> Result<Self> {
        let lattice = file.lattice()?;
        let a = lattice.period().ok_or_else(|| {
            config_error("lattice.spec", "band structure needs a periodic lattice")
        })?;
        let (mut lambda_min, mut lambda_max, mut samples) = (None, None, None);
        if let Some(v) = file.section("bands") {
            let f = Fields::new(v, "bands")?;
            f.deny_unknown(&["lambda_min", "lambda_max", "samples"])?;
            lambda_min = f.opt_f64("lambda_min")?;
            lambda_max = f.opt_f64("lambda_max")?;
            samples = f.opt_u64("samples")?.map(|s| s as usize);
        }
        let lambda_min = flags
            .lambda_min
            .or(lambda_min)
            .unwrap_or_else(|| spectral_floor(lattice.alpha(), a));
        let lambda_max = flags.lambda_max.or(lambda_max).unwrap_or(500.0);
        let samples = flags.samples.or(samples).unwrap_or(1000);
        if !(lambda_min < lambda_max) {
            return Err(config_error(
                "bands.lambda_max",
                format!("must exceed lambda_min = {lambda_min}"),
            ));
        }
        if samples < 2 {
            return Err(config_error("bands.samples", "needs at least 2 samples"));
        }
        Ok(Self {
            lattice,
            lambda_min,
            lambda_max,
            samples,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenSettings {
    pub lattice: ShellLattice,
    pub nu: u32,
    pub l: u32,
    pub radius: f64,
    pub window: Interval,
    pub tol_eig: f64,
}

#[derive(Debug, Default)]
pub struct EigenFlags {
    pub nu: Option<u32>,
    pub l: Option<u32>,
    pub radius: Option<f64>,
    pub window: Option<Interval>,
}

impl EigenSettings {
    pub fn resolve(file: &ConfigFile, flags: &EigenFlags) -> Result<Self> {
        let lattice = file.lattice()?;
        let (mut nu, mut l, mut radius, mut window, mut tol) = (None, None, None, None, None);
        if let Some(v) = file.section("eigen") {
            let f = Fields::new(v, "eigen")?;
            f.deny_unknown(&["nu", "l", "radius", "window", "tol_eig"])?;
            nu = f.opt_u64("nu")?;
            l = f.opt_u64("l")?;
            radius = f.opt_f64("radius")?;
            if let Some(w) = f.opt_f64_list("window")? {
                window = Some(match w.as_slice() {
                    [lo, hi] if lo < hi => Interval { lo: *lo, hi: *hi },
                    _ => {
                        return Err(config_error(
                            "eigen.window",
                            "expected [lo, hi] with lo < hi",
                        ))
                    }
                });
            }
            tol = f.opt_f64("tol_eig")?;
        }
        let to_u32 = |v: u64, field: &str| {
            u32::try_from(v).map_err(|_| config_error(field, "value too large"))
        };
        let nu = match flags.nu {
            Some(v) => v,
            None => nu.map(|v| to_u32(v, "eigen.nu")).transpose()?.unwrap_or(3),
        };
        let l = match flags.l {
            Some(v) => v,
            None => l.map(|v| to_u32(v, "eigen.l")).transpose()?.unwrap_or(0),
        };
        if nu < 2 {
            return Err(config_error("eigen.nu", "dimension must be >= 2"));
        }
        let radius = flags.radius.or(radius).ok_or_else(|| {
            config_error(
                "eigen.radius",
                "missing; set it in the file or pass --radius",
            )
        })?;
        let window = flags.window.or(window).ok_or_else(|| {
            config_error(
                "eigen.window",
                "missing; set it in the file or pass --window",
            )
        })?;
        let tol_eig = tol.unwrap_or(TOL_EIG);
        if !(tol_eig > 0.0) {
            return Err(config_error("eigen.tol_eig", "must be > 0"));
        }
        if !(radius > lattice.first_radius() && radius <= lattice.r_max()) {
            return Err(config_error(
                "eigen.radius",
                format!(
                    "must lie in ({}, r_max = {}]",
                    lattice.first_radius(),
                    lattice.r_max()
                ),
            ));
        }
        Ok(Self {
            lattice,
            nu,
            l,
            radius,
            window,
            tol_eig,
        })
    }
}

#[derive(Debug, Default)]
pub struct ExperimentFlags {
    pub nu: Option<u32>,
    pub l_max: Option<u32>,
}

pub fn resolve_experiment(file: &ConfigFile, flags: &ExperimentFlags) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::from_json(&file.doc)?;
    if let Some(nu) = flags.nu {
        cfg.nu = nu;
    }
    if let Some(l) = flags.l_max {
        cfg.l_max = l;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const KP: &str =
        r#"{"lattice": {"alpha": 1.0, "spec": {"periodic": {"a": 1.0}}, "r_max": 100.0}}"#;

    #[test]
    fn window_syntax() {
        assert_eq!(
            parse_window("1:2.5").unwrap(),
            Interval { lo: 1.0, hi: 2.5 }
        );
        assert_eq!(
            parse_window("-3:0").unwrap(),
            Interval { lo: -3.0, hi: 0.0 }
        );
        for bad in ["2:1", "1:1", "1", "a:b", "1:inf"] {
            assert!(parse_window(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn flag_beats_file_beats_default() {
        let file = ConfigFile::parse(
            r#"{"lattice": {"alpha": 1.0, "spec": {"periodic": {"a": 1.0}}, "r_max": 100.0},
                "eigen": {"l": 2, "radius": 10.0, "window": [0.0, 5.0]}}"#,
        )
        .unwrap();
        let s = EigenSettings::resolve(&file, &EigenFlags::default()).unwrap();
        assert_eq!((s.nu, s.l, s.radius), (3, 2, 10.0));
        let flags = EigenFlags {
            l: Some(4),
            radius: Some(20.0),
            ..Default::default()
        };
        let s = EigenSettings::resolve(&file, &flags).unwrap();
        assert_eq!((s.l, s.radius), (4, 20.0));
    }

    #[test]
    fn missing_fields_are_named() {
        let file = ConfigFile::parse(KP).unwrap();
        match EigenSettings::resolve(&file, &EigenFlags::default()) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "eigen.radius"),
            other => panic!("{other:?}"),
        }
        let file = ConfigFile::parse(
            r#"{"lattice": {"alpha": 1.0, "spec": {"periodic": {}}, "r_max": 100.0}}"#,
        )
        .unwrap();
        match BandsSettings::resolve(&file, &BandsFlags::default()) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "lattice.spec.periodic.a"),
            other => panic!("{other:?}"),
        }
        assert!(ConfigFile::parse(r#"{"lattice": {}, "extra": 1}"#).is_err());
    }

    #[test]
    fn out_precedence() {
        let file = ConfigFile::parse(KP).unwrap();
        assert_eq!(
            resolve_out(Some("x".into()), &file).unwrap(),
            PathBuf::from("x")
        );
        let file = ConfigFile::parse(
            r#"{"lattice": {"alpha": 1.0, "spec": {"periodic": {"a": 1.0}}, "r_max": 100.0}, "out": "from_file"}"#,
        )
        .unwrap();
        assert_eq!(
            resolve_out(None, &file).unwrap(),
            PathBuf::from("from_file")
        );
    }
}
