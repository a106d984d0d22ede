use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::AnalysisConstants;
use crate::error::{Error, Result};
use crate::mhd::{Modulation, ModulationShape, SpinUpPolicy};
use crate::nudging::InitMode;
use crate::observation::{InterpolantKind, InterpolantSpec, ObservationMask};
use crate::spectral::Grid;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Baseline,
    H1Track,
    Type2,
    GeneralizedDa,
    DeterminingInterpolant,
    BOnlyControl,
    UOnlyExploratory,
}

impl Scenario {
    pub fn default_mask(self) -> ObservationMask {
        match self {
            Self::Type2 => ObservationMask::FirstComponent,
            Self::BOnlyControl => ObservationMask::MagneticOnly,
            Self::UOnlyExploratory => ObservationMask::VelocityOnly,
            _ => ObservationMask::All,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpinUpKind {
    Windowed,
    Fixed,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitKind {
    Zero,
    CopyReference,
}

/// Flat experiment description; every key is optional and unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub n: usize,
    pub re: f64,
    pub rm: f64,
    pub seed: u64,
    /// Seed of the second solution in the determining experiment; `seed + 1` if absent.
    pub secondary_seed: Option<u64>,

    pub grashof: f64,
    pub magnetic_forcing: bool,
    pub modulation_shape: Option<ModulationShape>,
    pub modulation_amplitude: f64,
    pub modulation_frequency: f64,
    pub modulation_offset: f64,

    pub interpolant: InterpolantKind,
    pub h: f64,
    /// Defaults to the scenario's own mask.
    pub mask: Option<ObservationMask>,
    pub mu: f64,

    /// Chosen from the CFL limit when absent.
    pub dt: Option<f64>,
    pub horizon: f64,
    pub sample_interval: f64,
    pub spinup: SpinUpKind,
    pub spinup_windows: usize,
    pub spinup_duration: f64,

    pub init: InitKind,
    pub init_amplitude: f64,
    pub init_decay: f64,
    pub init_kmax: i64,

    /// Size of the decaying forcing/observation perturbations.
    pub perturbation_amplitude: f64,
    pub perturbation_rate: f64,

    pub verify_samples: usize,
    pub c_l: f64,
    pub c_b: f64,
    pub c_t: f64,
    pub c_m: f64,
    pub c_tilde_1st: Option<f64>,
    pub threshold_margin: f64,

    pub output_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let k = AnalysisConstants::default();
        Self {
            scenario: Scenario::Baseline,
            n: 64,
            re: 5.0,
            rm: 5.0,
            seed: 1,
            secondary_seed: None,
            grashof: 10.0,
            magnetic_forcing: true,
            modulation_shape: None,
            modulation_amplitude: 0.0,
            modulation_frequency: 0.0,
            modulation_offset: 1.0,
            interpolant: InterpolantKind::SpectralProjection,
            h: 0.125,
            mask: None,
            mu: 50.0,
            dt: None,
            horizon: 20.0,
            sample_interval: 0.02,
            spinup: SpinUpKind::Windowed,
            spinup_windows: 40,
            spinup_duration: 5.0,
            init: InitKind::Zero,
            init_amplitude: 1.0,
            init_decay: 1.5,
            init_kmax: 8,
            perturbation_amplitude: 0.5,
            perturbation_rate: 1.0,
            verify_samples: 1000,
            c_l: k.c_l,
            c_b: k.c_b,
            c_t: k.c_t,
            c_m: k.c_m,
            c_tilde_1st: None,
            threshold_margin: 0.1,
            output_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("flat config serializes")
    }

    pub fn mask(&self) -> ObservationMask {
        self.mask.unwrap_or_else(|| self.scenario.default_mask())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n)
    }

    pub fn interpolant_spec(&self) -> Result<InterpolantSpec> {
        InterpolantSpec::new(self.interpolant, self.h)
    }

    pub fn modulation(&self) -> Option<Modulation> {
        self.modulation_shape.map(|shape| Modulation {
            amplitude: self.modulation_amplitude,
            frequency: self.modulation_frequency,
            offset: self.modulation_offset,
            shape,
        })
    }

    pub fn spinup_policy(&self) -> SpinUpPolicy {
        match self.spinup {
            SpinUpKind::Windowed => SpinUpPolicy::Windowed {
                max_windows: self.spinup_windows,
            },
            SpinUpKind::Fixed => SpinUpPolicy::Fixed {
                duration: self.spinup_duration,
            },
            SpinUpKind::None => SpinUpPolicy::None,
        }
    }

    pub fn init_mode(&self) -> InitMode {
        match self.init {
            InitKind::Zero => InitMode::Zero,
            InitKind::CopyReference => InitMode::CopyReference,
        }
    }

    pub fn analysis_constants(&self) -> AnalysisConstants {
        AnalysisConstants {
            c_l: self.c_l,
            c_b: self.c_b,
            c_t: self.c_t,
            c_m: self.c_m,
            c_tilde_1st: self.c_tilde_1st,
        }
    }

    pub fn secondary_seed(&self) -> u64 {
        self.secondary_seed.unwrap_or(self.seed.wrapping_add(1))
    }

    pub fn validate(&self) -> Result<()> {
        let grid = self.grid()?;
        let positive = [
            ("re", self.re),
            ("rm", self.rm),
            ("horizon", self.horizon),
            ("sample_interval", self.sample_interval),
            ("perturbation_rate", self.perturbation_rate),
            ("c_l", self.c_l),
            ("c_b", self.c_b),
            ("c_t", self.c_t),
            ("c_m", self.c_m),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    detail: format!("{value} must be positive and finite"),
                });
            }
        }
        let nonnegative = [
            ("grashof", self.grashof),
            ("mu", self.mu),
            ("init_amplitude", self.init_amplitude),
            ("init_decay", self.init_decay),
            ("perturbation_amplitude", self.perturbation_amplitude),
            ("spinup_duration", self.spinup_duration),
            ("threshold_margin", self.threshold_margin),
        ];
        for (name, value) in nonnegative {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    detail: format!("{value} must be nonnegative and finite"),
                });
            }
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt <= self.sample_interval) {
                return Err(Error::InvalidParameter {
                    name: "dt",
                    detail: format!("{dt} not in (0, sample_interval]"),
                });
            }
        }
        if self.sample_interval > self.horizon {
            return Err(Error::InvalidParameter {
                name: "sample_interval",
                detail: "longer than the horizon".into(),
            });
        }
        if self.init_kmax < 1 || self.init_kmax > grid.dealias_cutoff() {
            return Err(Error::OutOfRange {
                name: "init_kmax",
                detail: format!("{} not in [1, {}]", self.init_kmax, grid.dealias_cutoff()),
            });
        }
        if self.spinup == SpinUpKind::Windowed && self.spinup_windows < 2 {
            return Err(Error::InvalidParameter {
                name: "spinup_windows",
                detail: "need at least 2 windows".into(),
            });
        }
        if self.verify_samples == 0 {
            return Err(Error::InvalidParameter {
                name: "verify_samples",
                detail: "must be positive".into(),
            });
        }
        if let Some(m) = self.modulation() {
            m.validate()?;
        }
        self.interpolant_spec()?.check_grid(&grid)?;
        let mask = self.mask();
        match self.scenario {
            Scenario::Type2 if self.interpolant != InterpolantKind::NodalBilinear => {
                return Err(Error::Config("scenario type2 needs interpolant = \"nodal-bilinear\"".into()));
            }
            Scenario::BOnlyControl | Scenario::UOnlyExploratory if mask != self.scenario.default_mask() => {
                return Err(Error::Config(format!(
                    "scenario {:?} observes a fixed variable; mask {:?} not allowed",
                    self.scenario, mask
                )));
            }
            _ => {}
        }
        Ok(())
    }
}
