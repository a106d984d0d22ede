use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mhd::ElsasserParams;
use crate::observation::InterpolantConstants;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    ThmAll,
    Thm1st,
    ThmV,
    ThmH1All,
    ThmH11st,
    ThmH1V,
    T2Thm1,
}

impl TheoremId {
    pub const ALL: [TheoremId; 7] = [
        Self::ThmAll,
        Self::Thm1st,
        Self::ThmV,
        Self::ThmH1All,
        Self::ThmH11st,
        Self::ThmH1V,
        Self::T2Thm1,
    ];

    pub fn is_h1(self) -> bool {
        matches!(self, Self::ThmH1All | Self::ThmH11st | Self::ThmH1V)
    }

    /// The L2 theorem with the same gain condition.
    pub fn l2_counterpart(self) -> Self {
        match self {
            Self::ThmH1All => Self::ThmAll,
            Self::ThmH11st => Self::Thm1st,
            Self::ThmH1V => Self::ThmV,
            other => other,
        }
    }

    pub fn type_class(self) -> u8 {
        if self == Self::T2Thm1 {
            2
        } else {
            1
        }
    }
}

/// Constants of the analysis that have no numerical value attached.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConstants {
    /// Ladyzhenskaya constant.
    pub c_l: f64,
    pub c_b: f64,
    pub c_t: f64,
    pub c_m: f64,
    /// `c~` in the first-component theorems; defaults to [`Self::c_tilde_t2`].
    pub c_tilde_1st: Option<f64>,
}

impl Default for AnalysisConstants {
    fn default() -> Self {
        Self {
            c_l: (2.0 * PI).powf(-0.5),
            c_b: 1.0,
            c_t: 1.0,
            c_m: 1.0,
            c_tilde_1st: None,
        }
    }
}

impl AnalysisConstants {
    /// `c = max(c_L/4, 3 c_B / 2)`
    pub fn c(&self) -> f64 {
        (self.c_l / 4.0).max(1.5 * self.c_b)
    }

    /// `C = (81/4) c_L^8`
    pub fn big_c(&self) -> f64 {
        81.0 / 4.0 * self.c_l.powi(8)
    }

    /// `c~ = ln(250 (c_B + c_T)^2 (20 pi^2 + c_M)) / 8`
    pub fn c_tilde_t2(&self) -> f64 {
        (250.0 * (self.c_b + self.c_t).powi(2) * (20.0 * PI * PI + self.c_m)).ln() / 8.0
    }

    pub fn c_tilde_1st(&self) -> f64 {
        self.c_tilde_1st.unwrap_or_else(|| self.c_tilde_t2())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantRecord {
    pub name: &'static str,
    pub value: f64,
    /// `empirical`, `configured`, `default` or `derived`.
    pub provenance: &'static str,
}

/// Sufficient gain and resolution for one theorem.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremThresholds {
    pub theorem_id: TheoremId,
    pub grashof: f64,
    pub mu_min: f64,
    /// `mu_min * (1 + margin)`
    pub mu_chosen: f64,
    pub margin: f64,
    /// Largest admissible `h` at `mu_chosen`; `+inf` when `mu_chosen == 0`.
    pub h_max: f64,
    pub constants_used: Vec<ConstantRecord>,
    #[serde(skip)]
    gap: f64,
    #[serde(skip)]
    interpolant: InterpolantConstants,
}

impl TheoremThresholds {
    /// Largest admissible `h` for a given gain.
    pub fn h_max_at(&self, mu: f64) -> f64 {
        h_max_formula(self.theorem_id, self.gap, mu, &self.interpolant)
    }
}

fn h_max_formula(id: TheoremId, gap: f64, mu: f64, interp: &InterpolantConstants) -> f64 {
    if mu <= 0.0 {
        return f64::INFINITY;
    }
    match *interp {
        InterpolantConstants::Type1 { c1 } => {
            let h = (gap / mu).sqrt() / c1;
            if id.is_h1() {
                h / (2.0 * 2f64.sqrt())
            } else {
                h
            }
        }
        InterpolantConstants::Type2 { c2, c3 } => (gap / (2.0 * mu * (c2 * c2).max(c3))).sqrt(),
    }
}

fn mu_min_formula(id: TheoremId, g: f64, gap: f64, k: &AnalysisConstants) -> f64 {
    if g == 0.0 {
        return 0.0;
    }
    let pi2 = PI * PI;
    let value = match id.l2_counterpart() {
        TheoremId::ThmAll => pi2 * (k.c_l.powi(4) + gap.powi(4)) * g * g / gap,
        TheoremId::Thm1st => {
            32.0 * pi2 * k.c().powi(2) * gap * (k.c_tilde_1st() + 2.0 * g.ln() + k.big_c() * g.powi(4)) * g * g
        }
        TheoremId::ThmV => {
            pi2 * k.c_l.powi(4) * g * g * (4.0 + gap * gap * g * g).powi(2) / (16.0 * gap)
        }
        TheoremId::T2Thm1 => {
            let big_c = k.big_c();
            let tail = k.c_tilde_t2() + (1.0 + g).ln() + big_c * g.powi(4);
            if tail <= 0.0 {
                return 0.0;
            }
            let log_mu = 2000f64.ln()
                + 2.0 * (k.c_b + k.c_t).ln()
                + (20.0 * pi2 + k.c_m).ln()
                + 2.0 * g.ln()
                + 3.0 * (1.0 + g * g).ln()
                + 2.0 * big_c * g.powi(4)
                + tail.ln();
            log_mu.exp()
        }
        _ => unreachable!("l2_counterpart maps onto L2 theorems"),
    };
    value.max(0.0)
}

/// Evaluates the gain and resolution conditions of `id`.
pub fn theorem_thresholds(
    id: TheoremId,
    grashof: f64,
    params: &ElsasserParams,
    constants: &AnalysisConstants,
    interpolant: Option<InterpolantConstants>,
    margin: f64,
) -> Result<TheoremThresholds> {
    if !(grashof >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "G",
            detail: format!("{grashof} must be nonnegative"),
        });
    }
    let interp = interpolant.ok_or(match id.type_class() {
        1 => Error::MissingConstant("c1"),
        _ => Error::MissingConstant("c2, c3"),
    })?;
    if interp.type_class() != id.type_class() {
        return Err(Error::TypeMismatch {
            expected: id.type_class(),
            found: interp.type_class(),
        });
    }
    let gap = params.gap();
    let mu_min = mu_min_formula(id, grashof, gap, constants);
    let mu_chosen = mu_min * (1.0 + margin);
    let configured = |set: bool| if set { "configured" } else { "default" };
    let defaults = AnalysisConstants::default();
    let mut used = vec![ConstantRecord {
        name: "c_L",
        value: constants.c_l,
        provenance: configured(constants.c_l != defaults.c_l),
    }];
    match interp {
        InterpolantConstants::Type1 { c1 } => used.push(ConstantRecord {
            name: "c1",
            value: c1,
            provenance: "empirical",
        }),
        InterpolantConstants::Type2 { c2, c3 } => {
            used.push(ConstantRecord { name: "c2", value: c2, provenance: "empirical" });
            used.push(ConstantRecord { name: "c3", value: c3, provenance: "empirical" });
        }
    }
    match id.l2_counterpart() {
        TheoremId::Thm1st => {
            used.push(ConstantRecord {
                name: "c_B",
                value: constants.c_b,
                provenance: configured(constants.c_b != defaults.c_b),
            });
            used.push(ConstantRecord { name: "c", value: constants.c(), provenance: "derived" });
            used.push(ConstantRecord {
                name: "c_tilde",
                value: constants.c_tilde_1st(),
                provenance: if constants.c_tilde_1st.is_some() { "configured" } else { "derived" },
            });
            used.push(ConstantRecord { name: "C", value: constants.big_c(), provenance: "derived" });
        }
        TheoremId::T2Thm1 => {
            for (name, value, default) in [
                ("c_B", constants.c_b, defaults.c_b),
                ("c_T", constants.c_t, defaults.c_t),
                ("c_M", constants.c_m, defaults.c_m),
            ] {
                used.push(ConstantRecord { name, value, provenance: configured(value != default) });
            }
            used.push(ConstantRecord { name: "c_tilde", value: constants.c_tilde_t2(), provenance: "derived" });
            used.push(ConstantRecord { name: "C", value: constants.big_c(), provenance: "derived" });
        }
        _ => {}
    }
    Ok(TheoremThresholds {
        theorem_id: id,
        grashof,
        mu_min,
        mu_chosen,
        margin,
        h_max: h_max_formula(id, gap, mu_chosen, &interp),
        constants_used: used,
        gap,
        interpolant: interp,
    })
}
