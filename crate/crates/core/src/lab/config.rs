//! Run configuration and the built-in presets.

use serde::{Deserialize, Serialize};

use crate::data::BoundaryData;
use crate::error::{Error, Result};
use crate::geometry::{GeometryConfig, ShapeSpec, Vec2};
use crate::lab::{GapFamily, Numerics};
use crate::matrix::SuiteSizes;

/// What a run computes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Floating potentials of one configuration, decomposed and direct.
    Perfect,
    /// Insulated solve of one configuration, with the gap profile when
    /// the geometry is a family member.
    Insulated,
    /// Transmission study over `sweep.k_list`.
    Transmission,
    /// Randomized matrix property suite.
    MatrixCheck,
    /// A named study over `sweep.eps_list`.
    Sweep,
}

/// Studies available in sweep mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Study {
    GradientBlowup,
    PotentialGapBound,
    CapacityAsymptotics,
    FlatGapBlowup,
    CrossCheck,
    InsulatedBound,
    InsulatedOracle,
    TransformSelfTest,
    BemCertification,
}

/// Either a fixed configuration or a family member at gap `eps`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed: Option<GeometryConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<GapFamily>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

impl GeometryBlock {
    pub fn fixed(g: GeometryConfig) -> Self {
        GeometryBlock {
            fixed: Some(g),
            ..Self::default()
        }
    }

    pub fn family(f: GapFamily, eps: Option<f64>) -> Self {
        GeometryBlock {
            family: Some(f),
            eps,
            ..Self::default()
        }
    }

    /// The single configuration this block describes.
    pub fn resolve(&self) -> Result<GeometryConfig> {
        match (&self.fixed, &self.family, self.eps) {
            (Some(g), None, None) => {
                g.validate()?;
                Ok(g.clone())
            }
            (None, Some(f), Some(eps)) => f.geometry(eps),
            (None, Some(_), None) => Err(Error::Config("geometry.eps is required for a single solve".into())),
            _ => Err(Error::Config("geometry needs exactly one of `fixed` or `family`".into())),
        }
    }

    pub fn family_or_err(&self) -> Result<&GapFamily> {
        self.family
            .as_ref()
            .ok_or_else(|| Error::Config("geometry.family is required for this study".into()))
    }
}

fn default_eps() -> Vec<f64> {
    DEFAULT_EPS.to_vec()
}

fn default_configs() -> usize {
    10
}

fn default_flip_delta() -> f64 {
    0.3
}

/// Default gap sweep.
pub const DEFAULT_EPS: [f64; 5] = [0.1, 0.05, 0.02, 0.01, 0.005];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub study: Option<Study>,
    #[serde(default = "default_eps")]
    pub eps_list: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub k_list: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    /// Random configurations of the cross-check.
    #[serde(default = "default_configs")]
    pub configs: usize,
    /// Closed-form reference value (`I₀` in transmission mode).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
    /// Strip half-width of the flip-extension self-test.
    #[serde(default = "default_flip_delta")]
    pub flip_delta: f64,
    #[serde(default)]
    pub sizes: SuiteSizes,
}

impl Default for SweepBlock {
    fn default() -> Self {
        SweepBlock {
            study: None,
            eps_list: default_eps(),
            k_list: Vec::new(),
            seed: 0,
            configs: default_configs(),
            reference: None,
            flip_delta: default_flip_delta(),
            sizes: SuiteSizes::default(),
        }
    }
}

/// A complete run description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabConfig {
    pub name: String,
    pub mode: Mode,
    #[serde(default)]
    pub geometry: GeometryBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<BoundaryData>,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub sweep: SweepBlock,
}

impl LabConfig {
    /// Parses JSON, reporting the key path of the first offending value.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::Config(format!("at `{path}`: {}", e.into_inner()))
        })
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs always serialize")
    }

    pub fn data_or_err(&self) -> Result<&BoundaryData> {
        self.data
            .as_ref()
            .ok_or_else(|| Error::Config("`data` is required for this mode".into()))
    }

    /// Directory name of the run: `<name>-<seed>`.
    pub fn run_id(&self) -> String {
        format!("{}-{}", self.name, self.sweep.seed)
    }
}

/// The unit annulus `1 < |x| < 2`.
pub fn annulus() -> GeometryConfig {
    GeometryConfig::new(ShapeSpec::disk(Vec2::ZERO, 2.0), vec![ShapeSpec::disk(Vec2::ZERO, 1.0)])
        .expect("the annulus is admissible")
}

/// Names of the built-in presets.
pub const PRESETS: [&str; 14] = [
    "perfect-blowup",
    "perfect-blowup-fine",
    "potential-gap",
    "capacity",
    "flat-gap-l2",
    "flat-gap-l3",
    "cross-check",
    "matrix-check",
    "insulated-bound",
    "insulated-oracle",
    "transforms",
    "transmission",
    "stiff-limit",
    "bem-certification",
];

fn sweep(name: &str, study: Study, family: Option<GapFamily>, data: Option<BoundaryData>) -> LabConfig {
    LabConfig {
        name: name.into(),
        mode: Mode::Sweep,
        geometry: family.map(|f| GeometryBlock::family(f, None)).unwrap_or_default(),
        data,
        numerics: Numerics::default(),
        sweep: SweepBlock {
            study: Some(study),
            ..SweepBlock::default()
        },
    }
}

/// Built-in configuration of an acceptance experiment.
pub fn preset(name: &str) -> Option<LabConfig> {
    let x1_over_4 = Some(BoundaryData::linear(0.0, 0.25, 0.0));
    let x2_over_4 = Some(BoundaryData::linear(0.0, 0.0, 0.25));
    let two = Some(GapFamily::two_disks());
    Some(match name {
        "perfect-blowup" => sweep(name, Study::GradientBlowup, two, x1_over_4),
        "perfect-blowup-fine" => {
            let mut c = sweep(name, Study::GradientBlowup, two, x1_over_4);
            c.sweep.eps_list.push(0.002);
            c
        }
        "potential-gap" => sweep(name, Study::PotentialGapBound, two, x1_over_4),
        "capacity" => sweep(name, Study::CapacityAsymptotics, two, x1_over_4),
        "flat-gap-l2" => sweep(name, Study::FlatGapBlowup, Some(GapFamily::power_pair(2)), x1_over_4),
        "flat-gap-l3" => sweep(name, Study::FlatGapBlowup, Some(GapFamily::power_pair(3)), x1_over_4),
        "cross-check" => {
            let mut c = sweep(name, Study::CrossCheck, None, Some(BoundaryData::linear(0.1, 0.25, -0.1)));
            c.sweep.seed = 1;
            c
        }
        "matrix-check" => LabConfig {
            name: name.into(),
            mode: Mode::MatrixCheck,
            geometry: GeometryBlock::default(),
            data: None,
            numerics: Numerics::default(),
            sweep: SweepBlock {
                seed: 7,
                ..SweepBlock::default()
            },
        },
        "insulated-bound" => sweep(name, Study::InsulatedBound, two, x2_over_4),
        "insulated-oracle" => {
            let mut c = sweep(name, Study::InsulatedOracle, None, Some(BoundaryData::linear(0.0, 1.0, 0.0)));
            c.geometry = GeometryBlock::fixed(annulus());
            c.numerics.coarse_n = 512;
            c
        }
        "transforms" => {
            let mut c = sweep(name, Study::TransformSelfTest, two, None);
            c.geometry.eps = Some(0.01);
            c.sweep.seed = 5;
            c
        }
        "transmission" => LabConfig {
            name: name.into(),
            mode: Mode::Transmission,
            geometry: GeometryBlock::fixed(annulus()),
            data: Some(BoundaryData::linear(0.0, 1.0, 0.0)),
            numerics: Numerics {
                coarse_n: 512,
                ..Numerics::default()
            },
            sweep: SweepBlock {
                k_list: vec![0.5, 0.1, 0.02],
                reference: Some(1.2 * std::f64::consts::PI),
                ..SweepBlock::default()
            },
        },
        "stiff-limit" => LabConfig {
            name: name.into(),
            mode: Mode::Transmission,
            geometry: GeometryBlock::family(GapFamily::two_disks(), Some(0.1)),
            data: x1_over_4,
            numerics: Numerics::default(),
            sweep: SweepBlock {
                k_list: vec![10.0, 100.0, 1000.0],
                ..SweepBlock::default()
            },
        },
        "bem-certification" => {
            let mut c = sweep(name, Study::BemCertification, None, None);
            c.geometry = GeometryBlock::fixed(annulus());
            c
        }
        _ => return None,
    })
}
