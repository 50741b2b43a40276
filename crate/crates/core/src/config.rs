//! Case catalogue and TOML configuration.
//!
//! A configuration file may set any subset of the keys below; omitted keys
//! take the defaults of the selected case.
//!
//! ```toml
//! case = 2
//! desk_scale = false
//! m_max = 24
//! methods = ["lpgd1", "lpgd2", "hpgd"]
//! out_dir = "out/case2"
//!
//! [material]
//! youngs_modulus = 220e9
//! density = 7000.0
//! area = 1e-3
//! damping = 0.0
//!
//! [geometry]
//! length = 0.2
//! elements = 224
//!
//! [time]
//! horizon = 1.15e-3
//! steps = 1025
//!
//! [solver]
//! j_max = 20
//! tolerance = 1e-8
//! update = true
//!
//! [loading]
//! amplitude = 1e6
//! omega = 4.4e4
//! initial_strain = 0.05
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{PgdError, Result};
use crate::fem::{Material, Profile, RightBoundary, Scenario, Signal};
use crate::pgd::{Method, SolverSettings};

pub const FULL_ELEMENTS: usize = 224;
pub const FULL_STEPS: usize = 1025;
pub const FULL_STEPS_CASE4: usize = 1300;
pub const DESK_ELEMENTS: usize = 56;
pub const DESK_STEPS: usize = 257;
pub const DESK_M_MAX: usize = 24;
pub const FULL_M_MAX: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialConfig {
    pub youngs_modulus: f64,
    pub density: f64,
    pub area: f64,
    pub damping: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryConfig {
    pub length: f64,
    pub elements: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeConfig {
    pub horizon: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub j_max: usize,
    pub tolerance: f64,
    pub update: bool,
}

/// Load parameters. `amplitude`/`omega` describe the end traction
/// (cases 1, 2, 5) or the end displacement (case 3); `initial_strain` the
/// pre-strain released in case 4.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadingConfig {
    pub amplitude: f64,
    pub omega: f64,
    pub initial_strain: f64,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseConfig {
    pub case: u8,
    pub desk_scale: bool,
    pub m_max: usize,
    pub methods: Vec<Method>,
    pub out_dir: PathBuf,
    pub material: MaterialConfig,
    pub geometry: GeometryConfig,
    pub time: TimeConfig,
    pub solver: SolverConfig,
    pub loading: LoadingConfig,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMaterial {
    youngs_modulus: Option<f64>,
    density: Option<f64>,
    area: Option<f64>,
    damping: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    length: Option<f64>,
    elements: Option<i64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTime {
    horizon: Option<f64>,
    steps: Option<i64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    j_max: Option<i64>,
    tolerance: Option<f64>,
    update: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLoading {
    amplitude: Option<f64>,
    omega: Option<f64>,
    initial_strain: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    case: Option<i64>,
    desk_scale: Option<bool>,
    m_max: Option<i64>,
    methods: Option<Vec<String>>,
    out_dir: Option<PathBuf>,
    #[serde(default)]
    material: RawMaterial,
    #[serde(default)]
    geometry: RawGeometry,
    #[serde(default)]
    time: RawTime,
    #[serde(default)]
    solver: RawSolver,
    #[serde(default)]
    loading: RawLoading,
}

/// Values supplied on the command line; they take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub case: Option<u8>,
    pub desk_scale: bool,
    pub m_max: Option<usize>,
    pub methods: Option<Vec<Method>>,
    pub out_dir: Option<PathBuf>,
}

fn check_case(case: i64) -> Result<u8> {
    if (1..=5).contains(&case) {
        Ok(case as u8)
    } else {
        Err(PgdError::config("case", format!("unknown case {case}; expected 1 to 5")))
    }
}

fn positive_count(path: &str, v: i64) -> Result<usize> {
    if v > 0 {
        Ok(v as usize)
    } else {
        Err(PgdError::config(path, format!("must be positive, got {v}")))
    }
}

impl CaseConfig {
    /// Published parameters of a case at full resolution.
    pub fn full(case: u8) -> Result<Self> {
        let case = check_case(case as i64)?;
        let (horizon, steps) = if case == 4 {
            (0.14e-3, FULL_STEPS_CASE4)
        } else {
            (1.15e-3, FULL_STEPS)
        };
        let loading = match case {
            3 => LoadingConfig {
                amplitude: 5e-3,
                omega: 1.1e4,
                initial_strain: 0.0,
            },
            4 => LoadingConfig {
                amplitude: 0.0,
                omega: 0.0,
                initial_strain: 0.05,
            },
            _ => LoadingConfig {
                amplitude: 1e6,
                omega: 4.4e4,
                initial_strain: 0.0,
            },
        };
        Ok(Self {
            case,
            desk_scale: false,
            m_max: FULL_M_MAX,
            methods: Method::ALL.to_vec(),
            out_dir: PathBuf::from(format!("out/case{case}")),
            material: MaterialConfig {
                youngs_modulus: 220e9,
                density: 7000.0,
                area: 1e-3,
                damping: if case == 5 { 15e3 } else { 0.0 },
            },
            geometry: GeometryConfig {
                length: 0.2,
                elements: FULL_ELEMENTS,
            },
            time: TimeConfig { horizon, steps },
            solver: SolverConfig {
                j_max: 20,
                tolerance: 1e-8,
                update: case != 1,
            },
            loading,
        })
    }

    /// Reduced resolution preset for quick runs.
    pub fn desk(case: u8) -> Result<Self> {
        let mut cfg = Self::full(case)?;
        cfg.apply_desk_scale();
        cfg.m_max = DESK_M_MAX;
        Ok(cfg)
    }

    fn apply_desk_scale(&mut self) {
        self.desk_scale = true;
        self.geometry.elements = DESK_ELEMENTS;
        self.time.steps = DESK_STEPS;
    }

    /// Defaults < file < command-line overrides. The desk-scale flag (from
    /// either source) replaces the mesh and step counts.
    pub fn resolve(file: Option<&Path>, overrides: &Overrides) -> Result<Self> {
        let raw = match file {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    PgdError::config(path.display().to_string(), format!("cannot read file: {e}"))
                })?;
                parse_raw(&text)?
            }
            None => RawConfig::default(),
        };
        Self::merge(raw, overrides)
    }

    pub fn from_toml_str(text: &str, overrides: &Overrides) -> Result<Self> {
        Self::merge(parse_raw(text)?, overrides)
    }

    fn merge(raw: RawConfig, ov: &Overrides) -> Result<Self> {
        let case = match (ov.case, raw.case) {
            (Some(c), _) => check_case(c as i64)?,
            (None, Some(c)) => check_case(c)?,
            (None, None) => return Err(PgdError::config("case", "no case selected")),
        };
        let mut cfg = Self::full(case)?;
        let m = raw.material;
        if let Some(v) = m.youngs_modulus {
            cfg.material.youngs_modulus = v;
        }
        if let Some(v) = m.density {
            cfg.material.density = v;
        }
        if let Some(v) = m.area {
            cfg.material.area = v;
        }
        if let Some(v) = m.damping {
            cfg.material.damping = v;
        }
        if let Some(v) = raw.geometry.length {
            cfg.geometry.length = v;
        }
        if let Some(v) = raw.geometry.elements {
            cfg.geometry.elements = positive_count("geometry.elements", v)?;
        }
        if let Some(v) = raw.time.horizon {
            cfg.time.horizon = v;
        }
        if let Some(v) = raw.time.steps {
            cfg.time.steps = positive_count("time.steps", v)?;
        }
        if let Some(v) = raw.solver.j_max {
            cfg.solver.j_max = positive_count("solver.j_max", v)?;
        }
        if let Some(v) = raw.solver.tolerance {
            cfg.solver.tolerance = v;
        }
        if let Some(v) = raw.solver.update {
            if case == 1 && v {
                return Err(PgdError::config("solver.update", "case 1 runs without temporal updates; use case 2"));
            }
            cfg.solver.update = v;
        }
        if let Some(v) = raw.loading.amplitude {
            cfg.loading.amplitude = v;
        }
        if let Some(v) = raw.loading.omega {
            cfg.loading.omega = v;
        }
        if let Some(v) = raw.loading.initial_strain {
            cfg.loading.initial_strain = v;
        }
        if ov.desk_scale || raw.desk_scale == Some(true) {
            cfg.apply_desk_scale();
            cfg.m_max = DESK_M_MAX;
        }
        if let Some(v) = raw.m_max {
            if v < 0 {
                return Err(PgdError::config("m_max", format!("must be non-negative, got {v}")));
            }
            cfg.m_max = v as usize;
        }
        if let Some(list) = raw.methods {
            cfg.methods = list
                .iter()
                .map(|s| s.parse().map_err(|e: PgdError| PgdError::config("methods", e.to_string())))
                .collect::<Result<_>>()?;
        }
        if let Some(dir) = raw.out_dir {
            cfg.out_dir = dir;
        }
        if let Some(v) = ov.m_max {
            cfg.m_max = v;
        }
        if let Some(v) = &ov.methods {
            cfg.methods = v.clone();
        }
        if let Some(v) = &ov.out_dir {
            cfg.out_dir = v.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |path: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(PgdError::config(path, format!("must be positive and finite, got {v}")))
            }
        };
        check_case(self.case as i64)?;
        pos("material.youngs_modulus", self.material.youngs_modulus)?;
        pos("material.density", self.material.density)?;
        pos("material.area", self.material.area)?;
        if !(self.material.damping >= 0.0 && self.material.damping.is_finite()) {
            return Err(PgdError::config("material.damping", "must be non-negative"));
        }
        pos("geometry.length", self.geometry.length)?;
        pos("time.horizon", self.time.horizon)?;
        pos("solver.tolerance", self.solver.tolerance)?;
        if self.geometry.elements == 0 {
            return Err(PgdError::config("geometry.elements", "must be positive"));
        }
        if self.time.steps == 0 {
            return Err(PgdError::config("time.steps", "must be positive"));
        }
        if self.solver.j_max == 0 {
            return Err(PgdError::config("solver.j_max", "must be positive"));
        }
        let active = if self.case == 3 {
            self.geometry.elements - 1
        } else {
            self.geometry.elements
        };
        if self.m_max > active {
            return Err(PgdError::config(
                "m_max",
                format!("{} exceeds the {active} unconstrained DOFs", self.m_max),
            ));
        }
        if self.methods.is_empty() {
            return Err(PgdError::config("methods", "at least one method is required"));
        }
        for f in [self.loading.amplitude, self.loading.omega, self.loading.initial_strain] {
            if !f.is_finite() {
                return Err(PgdError::config("loading", "values must be finite"));
            }
        }
        Ok(())
    }

    pub fn settings(&self) -> SolverSettings {
        SolverSettings {
            j_max: self.solver.j_max,
            tolerance: self.solver.tolerance,
            update: self.solver.update,
        }
    }

    pub fn scenario(&self) -> Result<Scenario> {
        let material = Material::new(
            self.material.youngs_modulus,
            self.material.area,
            self.material.density,
            self.material.damping,
        )?;
        let mut sc = Scenario::quiescent(
            material,
            self.geometry.length,
            self.geometry.elements,
            self.time.horizon,
            self.time.steps,
        );
        let ramp = |cutoff| Signal::RampCosine {
            amplitude: self.loading.amplitude,
            omega: self.loading.omega,
            cutoff,
        };
        match self.case {
            3 => sc.right = RightBoundary::Displacement(ramp(None)),
            4 => {
                sc.right = RightBoundary::Free;
                sc.initial_displacement = Profile::Linear {
                    slope: self.loading.initial_strain,
                };
            }
            _ => sc.right = RightBoundary::Traction(ramp(Some(0.5 * self.time.horizon))),
        }
        sc.update_enabled = self.solver.update;
        sc.case_id = Some(self.case);
        Ok(sc)
    }

    /// The resolved configuration as TOML, for run manifests.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always serializable")
    }
}

fn parse_raw(text: &str) -> Result<RawConfig> {
    toml::from_str(text).map_err(|e| {
        let path = e
            .span()
            .map(|s| format!("bytes {}..{}", s.start, s.end))
            .unwrap_or_else(|| "<file>".into());
        PgdError::config(path, e.message().to_string())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_full_defaults() {
        let cfg = CaseConfig::from_toml_str("case = 2", &Overrides::default()).unwrap();
        assert_eq!(cfg, CaseConfig::full(2).unwrap());
        assert_eq!(cfg.material.youngs_modulus, 220e9);
        assert_eq!(cfg.geometry.elements, 224);
        assert_eq!(cfg.time.steps, 1025);
        assert_eq!(cfg.time.horizon, 1.15e-3);
    }

    #[test]
    fn case4_time_grid() {
        let cfg = CaseConfig::full(4).unwrap();
        assert_eq!(cfg.time.horizon, 0.14e-3);
        assert_eq!(cfg.time.steps, 1300);
    }

    #[test]
    fn zero_elements_rejected() {
        let err = CaseConfig::from_toml_str("case = 1\n[geometry]\nelements = 0", &Overrides::default()).unwrap_err();
        assert!(matches!(err, PgdError::Config { ref path, .. } if path == "geometry.elements"));
    }

    #[test]
    fn unknown_key_and_case_rejected() {
        assert!(matches!(
            CaseConfig::from_toml_str("case = 1\nbogus = 3", &Overrides::default()),
            Err(PgdError::Config { .. })
        ));
        assert!(matches!(
            CaseConfig::from_toml_str("case = 9", &Overrides::default()),
            Err(PgdError::Config { .. })
        ));
        assert!(CaseConfig::from_toml_str("", &Overrides::default()).is_err());
    }

    #[test]
    fn cases_one_and_two_differ_only_in_update() {
        let mut one = CaseConfig::full(1).unwrap();
        let two = CaseConfig::full(2).unwrap();
        assert!(!one.solver.update && two.solver.update);
        one.solver.update = true;
        one.case = 2;
        one.out_dir = two.out_dir.clone();
        assert_eq!(one, two);
    }

    #[test]
    fn case1_cannot_enable_updates() {
        let err = CaseConfig::from_toml_str("case = 1\n[solver]\nupdate = true", &Overrides::default()).unwrap_err();
        assert!(matches!(err, PgdError::Config { ref path, .. } if path == "solver.update"));
    }

    #[test]
    fn overrides_win() {
        let ov = Overrides {
            case: Some(5),
            desk_scale: true,
            m_max: Some(7),
            methods: Some(vec![Method::Hpgd]),
            out_dir: Some("x".into()),
        };
        let cfg = CaseConfig::from_toml_str("case = 2\nm_max = 3", &ov).unwrap();
        assert_eq!(cfg.case, 5);
        assert_eq!(cfg.material.damping, 15e3);
        assert_eq!((cfg.geometry.elements, cfg.time.steps, cfg.m_max), (56, 257, 7));
        assert_eq!(cfg.methods, vec![Method::Hpgd]);
    }

    #[test]
    fn manifest_round_trips_through_toml() {
        let cfg = CaseConfig::desk(3).unwrap();
        let text = cfg.to_toml();
        let back = CaseConfig::from_toml_str(&text, &Overrides::default()).unwrap();
        assert_eq!(back, cfg);
    }
}
