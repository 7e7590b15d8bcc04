use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{GeometryConfig, ShapeSpec, Side, Vec2};

fn four() -> f64 {
    4.0
}

fn one() -> f64 {
    1.0
}

fn half_width() -> f64 {
    0.8
}

/// A one-parameter family of configurations indexed by the gap `ε` between
/// inclusions 0 and 1, which face each other across the origin along x₁.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GapFamily {
    /// Two disks of equal radius centered at `(±(radius + ε/2), 0)`, plus
    /// optional fixed extra inclusions.
    TwoDisks {
        #[serde(default = "four")]
        outer_radius: f64,
        #[serde(default = "one")]
        radius: f64,
        #[serde(default)]
        extra: Vec<ShapeSpec>,
    },
    /// Two power profiles with faces `x₁ = ±(ε/2 + scale·|x₂|^(2·power))`.
    PowerPair {
        #[serde(default = "four")]
        outer_radius: f64,
        power: u32,
        #[serde(default = "one")]
        scale: f64,
        #[serde(default = "half_width")]
        half_width: f64,
    },
}

impl GapFamily {
    pub fn two_disks() -> Self {
        GapFamily::TwoDisks {
            outer_radius: 4.0,
            radius: 1.0,
            extra: Vec::new(),
        }
    }

    pub fn power_pair(power: u32) -> Self {
        GapFamily::PowerPair {
            outer_radius: 4.0,
            power,
            scale: 1.0,
            half_width: 0.8,
        }
    }

    pub fn outer(&self) -> ShapeSpec {
        let r = match self {
            GapFamily::TwoDisks { outer_radius, .. } | GapFamily::PowerPair { outer_radius, .. } => *outer_radius,
        };
        ShapeSpec::disk(Vec2::ZERO, r)
    }

    /// The configuration at gap `eps`.
    pub fn geometry(&self, eps: f64) -> Result<GeometryConfig> {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::GapOutOfRange(eps));
        }
        let inclusions = match self {
            GapFamily::TwoDisks { radius, extra, .. } => {
                let c = radius + 0.5 * eps;
                let mut v = vec![
                    ShapeSpec::disk(Vec2::new(-c, 0.0), *radius),
                    ShapeSpec::disk(Vec2::new(c, 0.0), *radius),
                ];
                v.extend(extra.iter().cloned());
                v
            }
            GapFamily::PowerPair {
                power,
                scale,
                half_width,
                ..
            } => {
                let mk = |x: f64, side| ShapeSpec::PowerPairProfile {
                    apex: Vec2::new(x, 0.0),
                    side,
                    power: *power,
                    scale: *scale,
                    half_width: *half_width,
                };
                vec![mk(-0.5 * eps, Side::Left), mk(0.5 * eps, Side::Right)]
            }
        };
        GeometryConfig::new(self.outer(), inclusions)
    }

    /// Flatness order `l` of the gap (1 for disks).
    pub fn power(&self) -> u32 {
        match self {
            GapFamily::TwoDisks { .. } => 1,
            GapFamily::PowerPair { power, .. } => *power,
        }
    }
}
