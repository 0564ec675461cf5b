//! Local shapes of density pieces on the unit coordinate `u ∈ [0, 1]`.
//!
//! Every shape is interpreted up to scale: the owning [`Piece`](super::Piece)
//! rescales it so that its integral equals the piece weight. The functions
//! here therefore come in two flavours, `raw_*` (the shape as written) and the
//! normalized [`PieceShape::pdf`] / [`PieceShape::cdf`] with unit mass.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PieceShape {
    /// Flat density.
    Constant { level: f64 },
    /// Straight line from `left` at `u = 0` to `right` at `u = 1`.
    Linear { left: f64, right: f64 },
    /// `(π/2)·sin(πu)`, unit mass on `[0, 1]`.
    SineBump,
    /// The arc `sin(π·(from + (to − from)·u))` with `0 ≤ from < to ≤ 1`.
    ///
    /// Produced when a [`PieceShape::SineBump`] is cut, e.g. by a mod-1 wrap.
    SineArc { from: f64, to: f64 },
    /// Ordinates at equally spaced local coordinates, joined linearly.
    Tabulated { ordinates: Vec<f64> },
}

fn nonneg(v: f64, what: &str) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidDensity(format!("{what} must be finite and >= 0, got {v}")))
    }
}

/// `cos(πa) − cos(πb)` without cancellation for nearby arguments.
fn cos_diff(a: f64, b: f64) -> f64 {
    2.0 * (FRAC_PI_2 * (a + b)).sin() * (FRAC_PI_2 * (b - a)).sin()
}

/// Smallest `u` with `p` of the mass of a line `left → right` below it.
pub(crate) fn linear_inverse(left: f64, right: f64, p: f64) -> f64 {
    if p <= 0.0 {
        return 0.0;
    }
    // Stable root of ((right-left)/2)u² + left·u − p(left+right)/2 = 0.
    let disc = (left * left * (1.0 - p) + right * right * p).max(0.0);
    let u = p * (left + right) / (left + disc.sqrt());
    u.clamp(0.0, 1.0)
}

impl PieceShape {
    pub fn validate(&self) -> Result<()> {
        match self {
            PieceShape::Constant { level } => nonneg(*level, "constant level")?,
            PieceShape::Linear { left, right } => {
                nonneg(*left, "linear left value")?;
                nonneg(*right, "linear right value")?;
            }
            PieceShape::SineBump => {}
            PieceShape::SineArc { from, to } => {
                if !(from.is_finite() && to.is_finite() && 0.0 <= *from && from < to && *to <= 1.0) {
                    return Err(Error::InvalidDensity(format!(
                        "sine arc [{from}, {to}] must satisfy 0 <= from < to <= 1"
                    )));
                }
            }
            PieceShape::Tabulated { ordinates } => {
                if ordinates.len() < 2 {
                    return Err(Error::InvalidDensity("tabulated shape needs at least two ordinates".into()));
                }
                for &o in ordinates {
                    nonneg(o, "tabulated ordinate")?;
                }
            }
        }
        let mass = self.raw_mass();
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidDensity(format!("shape has non-positive mass {mass}")));
        }
        Ok(())
    }

    /// Integral of the shape as written over `[0, 1]`.
    pub fn raw_mass(&self) -> f64 {
        match self {
            PieceShape::Constant { level } => *level,
            PieceShape::Linear { left, right } => 0.5 * (left + right),
            PieceShape::SineBump => 1.0,
            PieceShape::SineArc { from, to } => cos_diff(*from, *to) / (PI * (to - from)),
            PieceShape::Tabulated { ordinates } => {
                let h = 1.0 / (ordinates.len() - 1) as f64;
                let inner: f64 = ordinates[1..ordinates.len() - 1].iter().sum();
                h * (inner + 0.5 * (ordinates[0] + ordinates[ordinates.len() - 1]))
            }
        }
    }

    /// Value of the shape as written at `u ∈ [0, 1]`.
    pub fn raw_value(&self, u: f64) -> f64 {
        match self {
            PieceShape::Constant { level } => *level,
            PieceShape::Linear { left, right } => left + (right - left) * u,
            PieceShape::SineBump => FRAC_PI_2 * (PI * u).sin(),
            PieceShape::SineArc { from, to } => (PI * (from + (to - from) * u)).sin().max(0.0),
            PieceShape::Tabulated { ordinates } => {
                let segments = ordinates.len() - 1;
                let t = u * segments as f64;
                let i = (t.floor() as usize).min(segments - 1);
                let frac = t - i as f64;
                ordinates[i] + (ordinates[i + 1] - ordinates[i]) * frac
            }
        }
    }

    /// Integral of the shape as written over `[0, u]`.
    pub fn raw_cumulative(&self, u: f64) -> f64 {
        match self {
            PieceShape::Constant { level } => level * u,
            PieceShape::Linear { left, right } => left * u + 0.5 * (right - left) * u * u,
            PieceShape::SineBump => {
                let s = (FRAC_PI_2 * u).sin();
                s * s
            }
            PieceShape::SineArc { from, to } => {
                let theta = from + (to - from) * u;
                cos_diff(*from, theta) / (PI * (to - from))
            }
            PieceShape::Tabulated { ordinates } => {
                let segments = ordinates.len() - 1;
                let h = 1.0 / segments as f64;
                let t = u * segments as f64;
                let i = (t.floor() as usize).min(segments - 1);
                let frac = t - i as f64;
                let whole: f64 = ordinates.windows(2).take(i).map(|w| 0.5 * (w[0] + w[1])).sum();
                let y0 = ordinates[i];
                let y1 = ordinates[i + 1];
                h * (whole + y0 * frac + 0.5 * (y1 - y0) * frac * frac)
            }
        }
    }

    /// Unit-mass density at `u ∈ [0, 1]`.
    pub fn pdf(&self, u: f64) -> f64 {
        self.raw_value(u) / self.raw_mass()
    }

    /// Unit-mass cumulative distribution at `u`, clamped to `[0, 1]`.
    pub fn cdf(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return 1.0;
        }
        (self.raw_cumulative(u) / self.raw_mass()).clamp(0.0, 1.0)
    }

    /// Analytic inverse of [`PieceShape::cdf`] for `p ∈ [0, 1]`.
    pub fn inverse_cdf(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        match self {
            PieceShape::Constant { .. } => p,
            PieceShape::Linear { left, right } => linear_inverse(*left, *right, p),
            PieceShape::SineBump => {
                // (1 − cos πu)/2 = sin²(πu/2); reflect to stay well conditioned.
                if p <= 0.5 {
                    2.0 * libm::asin(p.sqrt()) / PI
                } else {
                    1.0 - 2.0 * libm::asin((1.0 - p).sqrt()) / PI
                }
            }
            PieceShape::SineArc { from, to } => {
                let c_from = libm::cos(PI * from);
                let target = c_from - p * cos_diff(*from, *to);
                let theta = libm::acos(target.clamp(-1.0, 1.0)) / PI;
                ((theta - from) / (to - from)).clamp(0.0, 1.0)
            }
            PieceShape::Tabulated { ordinates } => {
                let segments = ordinates.len() - 1;
                let areas: Vec<f64> = ordinates.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
                let total: f64 = areas.iter().sum();
                let target = p * total;
                let mut acc = 0.0;
                for (i, &a) in areas.iter().enumerate() {
                    if acc + a >= target && a > 0.0 || i == segments - 1 {
                        let local = if a > 0.0 { ((target - acc) / a).clamp(0.0, 1.0) } else { 0.0 };
                        let within = linear_inverse(ordinates[i], ordinates[i + 1], local);
                        return ((i as f64 + within) / segments as f64).clamp(0.0, 1.0);
                    }
                    acc += a;
                }
                1.0
            }
        }
    }

    /// The shape restricted to the local sub-interval `[u0, u1]`, re-expressed
    /// on its own unit coordinate. Tabulated shapes split at their knots, so the
    /// result is a list of `(sub_u0, sub_u1, shape)` tiling `[u0, u1]`.
    pub(crate) fn restrict(&self, u0: f64, u1: f64) -> Vec<(f64, f64, PieceShape)> {
        debug_assert!(u0 < u1);
        match self {
            PieceShape::Constant { .. } => vec![(u0, u1, self.clone())],
            PieceShape::Linear { .. } => {
                vec![(u0, u1, PieceShape::Linear { left: self.raw_value(u0), right: self.raw_value(u1) })]
            }
            PieceShape::SineBump => {
                if u0 <= 0.0 && u1 >= 1.0 {
                    vec![(u0, u1, PieceShape::SineBump)]
                } else {
                    vec![(u0, u1, PieceShape::SineArc { from: u0, to: u1 })]
                }
            }
            PieceShape::SineArc { from, to } => {
                let span = to - from;
                vec![(u0, u1, PieceShape::SineArc { from: from + span * u0, to: (from + span * u1).min(1.0) })]
            }
            PieceShape::Tabulated { ordinates } => {
                let segments = ordinates.len() - 1;
                let knot = |i: usize| i as f64 / segments as f64;
                // first knot strictly after u0, last knot strictly before u1
                let first = ((u0 * segments as f64).floor() as usize + 1).min(segments);
                let last = ((u1 * segments as f64).ceil() as usize).saturating_sub(1);
                if first > last || knot(first) >= u1 {
                    return vec![(u0, u1, PieceShape::Linear { left: self.raw_value(u0), right: self.raw_value(u1) })];
                }
                let mut out = Vec::new();
                let head_end = knot(first);
                if head_end > u0 {
                    out.push((u0, head_end, PieceShape::Linear { left: self.raw_value(u0), right: ordinates[first] }));
                }
                if last > first {
                    out.push((
                        knot(first),
                        knot(last),
                        PieceShape::Tabulated { ordinates: ordinates[first..=last].to_vec() },
                    ));
                }
                let tail_start = knot(last);
                if u1 > tail_start {
                    out.push((tail_start, u1, PieceShape::Linear { left: ordinates[last], right: self.raw_value(u1) }));
                }
                out
            }
        }
    }

    /// The same shape rescaled to unit raw mass, where the variant allows it.
    pub fn with_unit_mass(&self) -> Result<PieceShape> {
        self.validate()?;
        let m = self.raw_mass();
        Ok(match self {
            PieceShape::Constant { .. } => PieceShape::Constant { level: 1.0 },
            PieceShape::Linear { left, right } => PieceShape::Linear { left: left / m, right: right / m },
            PieceShape::SineBump => PieceShape::SineBump,
            PieceShape::Tabulated { ordinates } => {
                PieceShape::Tabulated { ordinates: ordinates.iter().map(|o| o / m).collect() }
            }
            PieceShape::SineArc { .. } => {
                return Err(Error::InvalidDensity("a sine arc cannot be rescaled to unit mass".into()))
            }
        })
    }

    pub(crate) fn is_affine(&self) -> bool {
        matches!(self, PieceShape::Constant { .. } | PieceShape::Linear { .. })
    }
}
