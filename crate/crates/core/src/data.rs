//! Boundary data on the outer contour.

use serde::{Deserialize, Serialize};

use crate::geometry::{ShapeSpec, Vec2};

/// One Fourier mode `a·cos(nθ) + b·sin(nθ)` in the polar angle about the
/// expansion center.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierTerm {
    pub n: u32,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

/// Continuous data `φ` prescribed on the outer boundary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundaryData {
    Constant {
        value: f64,
    },
    /// `c₀ + c₁x₁ + c₂x₂`.
    Linear {
        coeffs: [f64; 3],
    },
    Fourier {
        #[serde(default)]
        center: Vec2,
        #[serde(default)]
        mean: f64,
        terms: Vec<FourierTerm>,
    },
}

impl BoundaryData {
    pub fn constant(value: f64) -> Self {
        BoundaryData::Constant { value }
    }

    pub fn linear(c0: f64, c1: f64, c2: f64) -> Self {
        BoundaryData::Linear {
            coeffs: [c0, c1, c2],
        }
    }

    pub fn eval(&self, p: Vec2) -> f64 {
        match self {
            BoundaryData::Constant { value } => *value,
            BoundaryData::Linear { coeffs } => coeffs[0] + coeffs[1] * p.x + coeffs[2] * p.y,
            BoundaryData::Fourier {
                center,
                mean,
                terms,
            } => {
                let q = p - *center;
                let th = q.y.atan2(q.x);
                mean + terms
                    .iter()
                    .map(|t| {
                        let a = t.n as f64 * th;
                        t.cos * a.cos() + t.sin * a.sin()
                    })
                    .sum::<f64>()
            }
        }
    }

    /// `‖φ‖∞` over the outer boundary, sampled densely.
    pub fn sup_norm(&self, outer: &ShapeSpec) -> f64 {
        outer
            .sample(4096)
            .into_iter()
            .map(|p| self.eval(p).abs())
            .fold(0.0, f64::max)
    }

    /// `(min φ, max φ)` over the outer boundary.
    pub fn range(&self, outer: &ShapeSpec) -> (f64, f64) {
        outer
            .sample(4096)
            .into_iter()
            .map(|p| self.eval(p))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }

    pub fn scaled(&self, s: f64) -> Self {
        match self {
            BoundaryData::Constant { value } => BoundaryData::Constant { value: value * s },
            BoundaryData::Linear { coeffs } => BoundaryData::Linear {
                coeffs: coeffs.map(|c| c * s),
            },
            BoundaryData::Fourier {
                center,
                mean,
                terms,
            } => BoundaryData::Fourier {
                center: *center,
                mean: mean * s,
                terms: terms
                    .iter()
                    .map(|t| FourierTerm {
                        n: t.n,
                        cos: t.cos * s,
                        sin: t.sin * s,
                    })
                    .collect(),
            },
        }
    }

    /// Rescaled to unit sup norm on the outer boundary (zero data unchanged).
    pub fn normalized(&self, outer: &ShapeSpec) -> Self {
        let n = self.sup_norm(outer);
        if n > 0.0 {
            self.scaled(1.0 / n)
        } else {
            self.clone()
        }
    }
}
