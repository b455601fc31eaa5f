//! JSON run configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    ordering_preset, Branch, Generator, MassProfile, ModelSpec, OrderingPreset,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorConfig {
    Scarf2 {
        v2: f64,
        #[serde(default)]
        branch: Branch,
    },
    SamsonovRoy,
    Morse {
        a: f64,
    },
}

impl GeneratorConfig {
    pub fn build(&self) -> Result<Generator> {
        match *self {
            GeneratorConfig::Scarf2 { v2, branch } => {
                let mut g = Generator::scarf2(v2)?;
                if let Generator::ScarfII { branch: b, .. } = &mut g {
                    *b = branch;
                }
                Ok(g)
            }
            GeneratorConfig::SamsonovRoy => Ok(Generator::SamsonovRoy),
            GeneratorConfig::Morse { a } => {
                if !a.is_finite() {
                    return Err(Error::InvalidArgument("Morse amplitude must be finite".into()));
                }
                Ok(Generator::Morse { a })
            }
        }
    }
}

/// `derived` takes delta from the ordering; `c2 = null` means 0, or 2 for
/// Samsonov-Roy with delta = 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileConfig {
    Derived {
        #[serde(default = "one")]
        c1: f64,
        #[serde(default)]
        c2: Option<f64>,
    },
    PowerLaw {
        c1: f64,
        c2: f64,
        delta: f64,
    },
    Constant,
}

fn one() -> f64 {
    1.0
}

/// `null` analytic tolerances pick 1e-2 (2e-2 for Samsonov-Roy) in the
/// reference picture and 5e-2 in the target picture.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub analytic_reference: Option<f64>,
    pub analytic_target: Option<f64>,
    pub isospectral: f64,
    pub isospectral_min_rate: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            analytic_reference: None,
            analytic_target: None,
            isospectral: 5e-2,
            isospectral_min_rate: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub generator: GeneratorConfig,
    pub ordering: OrderingPreset,
    pub profile: ProfileConfig,
    pub alpha0: f64,
    pub q_interval: (f64, f64),
    /// `null` chooses an offset that fits the interval into the image of
    /// `q(x)`.
    pub q_offset: Option<f64>,
    pub n: usize,
    pub n_list: Vec<usize>,
    /// Levels compared by the isospectrality check; `null` means 2 for
    /// Scarf-II and 3 otherwise.
    pub k: Option<usize>,
    /// Oracle level followed by `sweep`.
    pub level: usize,
    pub tolerances: Tolerances,
    pub out_dir: String,
    pub seed: u64,
    /// Random matrices in the eigensolver validation suite.
    pub suite_size: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            generator: GeneratorConfig::Scarf2 {
                v2: 2.5,
                branch: Branch::Plus,
            },
            ordering: OrderingPreset::ZhuKroemer,
            profile: ProfileConfig::Derived { c1: 1.0, c2: None },
            alpha0: 0.0,
            q_interval: (-12.0, 12.0),
            q_offset: None,
            n: 800,
            n_list: vec![200, 400, 800],
            k: None,
            level: 0,
            tolerances: Tolerances::default(),
            out_dir: "out".into(),
            seed: 0,
            suite_size: 100,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn model_spec(&self) -> Result<ModelSpec> {
        let generator = self.generator.build()?;
        let ordering = ordering_preset(self.ordering);
        let profile = match self.profile {
            ProfileConfig::Constant => MassProfile::Constant,
            ProfileConfig::PowerLaw { c1, c2, delta } => MassProfile::power_law(c1, c2, delta)?,
            ProfileConfig::Derived { c1, c2 } => {
                let delta = ordering.delta()?;
                let c2 = c2.unwrap_or(
                    if matches!(self.generator, GeneratorConfig::SamsonovRoy) && *delta.numer() == 0 {
                        2.0
                    } else {
                        0.0
                    },
                );
                MassProfile::from_ordering(&ordering, c1, c2)?
            }
        };
        match self.q_offset {
            Some(off) => ModelSpec::with_offset(generator, ordering, profile, self.alpha0, self.q_interval, off),
            None => ModelSpec::with_auto_offset(generator, ordering, profile, self.alpha0, self.q_interval),
        }
    }

    pub fn k(&self) -> usize {
        self.k.unwrap_or(match self.generator {
            GeneratorConfig::Scarf2 { .. } => 2,
            _ => 3,
        })
    }

    pub fn analytic_reference_tol(&self) -> f64 {
        self.tolerances.analytic_reference.unwrap_or(match self.generator {
            GeneratorConfig::SamsonovRoy => 2e-2,
            _ => 1e-2,
        })
    }

    pub fn analytic_target_tol(&self) -> f64 {
        self.tolerances.analytic_target.unwrap_or(5e-2)
    }
}
