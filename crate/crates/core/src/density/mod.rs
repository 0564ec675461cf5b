//! Piecewise-analytic probability densities on the real line.
//!
//! A [`PiecewiseDensity`] holds the density `g` of `X = log₁₀ Y`, the density
//! `f` of `Y` itself, or the mod-1 projection `g†` (wrapped in
//! [`Mod1Density`]). All intervals are left-closed, right-open.

mod project;
mod shape;

use std::f64::consts::LN_10;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use project::{mod1_project, translate_mod1};
pub use shape::PieceShape;

/// Tolerance on `Σ weights = 1`.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Default ordinate count per piece when tabulating the density of `Y`.
pub const DEFAULT_Y_ORDINATES: usize = 1024;

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// One interval `[lo, hi)` carrying `weight` units of mass distributed
/// according to `shape`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub shape: PieceShape,
    pub weight: f64,
}

impl Piece {
    pub fn new(lo: f64, hi: f64, shape: PieceShape, weight: f64) -> Result<Self> {
        let piece = Piece { lo, hi, shape, weight };
        piece.validate()?;
        Ok(piece)
    }

    fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(Error::InvalidDensity(format!(
                "piece interval [{}, {}) must be finite with lo < hi",
                self.lo, self.hi
            )));
        }
        if !(self.weight.is_finite() && self.weight >= 0.0) {
            return Err(Error::InvalidDensity(format!("piece weight {} must be >= 0", self.weight)));
        }
        self.shape.validate()
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    fn local(&self, x: f64) -> f64 {
        ((x - self.lo) / self.width()).clamp(0.0, 1.0)
    }

    /// Density value at `x`, which is assumed to lie in `[lo, hi]`.
    pub fn value_at(&self, x: f64) -> f64 {
        self.weight / self.width() * self.shape.pdf(self.local(x))
    }

    /// Mass of this piece inside `[a, b)`.
    pub fn mass_between(&self, a: f64, b: f64) -> f64 {
        let a = a.max(self.lo);
        let b = b.min(self.hi);
        if b <= a {
            return 0.0;
        }
        if a <= self.lo && b >= self.hi {
            return self.weight;
        }
        self.weight * (self.shape.cdf(self.local(b)) - self.shape.cdf(self.local(a)))
    }

    /// The part of this piece inside `[a, b)` as one or more pieces.
    pub(crate) fn restrict(&self, a: f64, b: f64) -> Vec<Piece> {
        let a = a.max(self.lo);
        let b = b.min(self.hi);
        if b <= a {
            return Vec::new();
        }
        if a <= self.lo && b >= self.hi {
            return vec![self.clone()];
        }
        let u0 = if a <= self.lo { 0.0 } else { self.local(a) };
        let u1 = if b >= self.hi { 1.0 } else { self.local(b) };
        if u1 <= u0 {
            return Vec::new();
        }
        let parts = self.shape.restrict(u0, u1);
        let last = parts.len() - 1;
        parts
            .into_iter()
            .enumerate()
            .filter_map(|(i, (s0, s1, shape))| {
                let lo = if i == 0 { a } else { self.lo + s0 * self.width() };
                let hi = if i == last { b } else { self.lo + s1 * self.width() };
                let weight = self.weight * (self.shape.cdf(s1) - self.shape.cdf(s0)).max(0.0);
                (hi > lo).then_some(Piece { lo, hi, shape, weight })
            })
            .collect()
    }

    fn shifted(&self, t: f64) -> Piece {
        Piece { lo: self.lo + t, hi: self.hi + t, ..self.clone() }
    }
}

/// Probability density made of finitely many disjoint [`Piece`]s sorted by
/// `lo`, with total weight 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DensitySpec", into = "DensitySpec")]
pub struct PiecewiseDensity {
    pieces: Vec<Piece>,
}

/// On-disk form of a density: `{"pieces": [{lo, hi, shape: {kind, ..}, weight}]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DensitySpec {
    pub pieces: Vec<Piece>,
}

impl TryFrom<DensitySpec> for PiecewiseDensity {
    type Error = Error;

    fn try_from(spec: DensitySpec) -> Result<Self> {
        PiecewiseDensity::new(spec.pieces)
    }
}

impl From<PiecewiseDensity> for DensitySpec {
    fn from(d: PiecewiseDensity) -> Self {
        DensitySpec { pieces: d.pieces }
    }
}

impl PiecewiseDensity {
    /// Builds a density, checking shapes, ordering, disjointness and unit mass.
    pub fn new(mut pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidDensity("density has no pieces".into()));
        }
        for p in &pieces {
            p.validate()?;
        }
        pieces.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for w in pieces.windows(2) {
            if w[0].hi > w[1].lo {
                return Err(Error::InvalidDensity(format!(
                    "pieces [{}, {}) and [{}, {}) overlap",
                    w[0].lo, w[0].hi, w[1].lo, w[1].hi
                )));
            }
        }
        let mass = compensated_sum(pieces.iter().map(|p| p.weight));
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::Unnormalized(mass));
        }
        Ok(PiecewiseDensity { pieces })
    }

    /// Like [`PiecewiseDensity::new`] but rescales the weights to sum to one.
    pub fn normalized(mut pieces: Vec<Piece>) -> Result<Self> {
        let mass = compensated_sum(pieces.iter().map(|p| p.weight));
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Unnormalized(mass));
        }
        for p in &mut pieces {
            p.weight /= mass;
        }
        Self::new(pieces)
    }

    /// Skips the normalization check; callers guarantee mass bookkeeping.
    pub(crate) fn from_parts(pieces: Vec<Piece>) -> Self {
        debug_assert!(pieces.windows(2).all(|w| w[0].hi <= w[1].lo));
        PiecewiseDensity { pieces }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("density serializes")
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn total_mass(&self) -> f64 {
        compensated_sum(self.pieces.iter().map(|p| p.weight))
    }

    /// Smallest interval containing every piece.
    pub fn support(&self) -> (f64, f64) {
        (self.pieces[0].lo, self.pieces.iter().map(|p| p.hi).fold(f64::MIN, f64::max))
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let idx = self.pieces.partition_point(|p| p.hi <= x);
        match self.pieces.get(idx) {
            Some(p) if p.lo <= x => p.value_at(x),
            _ => 0.0,
        }
    }

    /// Exact integral over `[lo, hi)`.
    pub fn integrate(&self, lo: f64, hi: f64) -> Result<f64> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::InvalidInterval { lo, hi });
        }
        if lo == hi {
            return Ok(0.0);
        }
        let start = self.pieces.partition_point(|p| p.hi <= lo);
        let masses = self.pieces[start..].iter().take_while(|p| p.lo < hi).map(|p| p.mass_between(lo, hi));
        Ok(compensated_sum(masses))
    }

    /// Density of `X + t`.
    pub fn translate(&self, t: f64) -> PiecewiseDensity {
        PiecewiseDensity::from_parts(self.pieces.iter().map(|p| p.shifted(t)).collect())
    }

    /// Density of `log_b Y = X / log₁₀ b` given the density of `X = log₁₀ Y`.
    pub fn rebase_log_density(&self, base: u32) -> Result<PiecewiseDensity> {
        if base < 2 {
            return Err(Error::InvalidBase(base));
        }
        let scale = (base as f64).log10();
        if scale == 1.0 {
            return Ok(self.clone());
        }
        Ok(PiecewiseDensity::from_parts(
            self.pieces.iter().map(|p| Piece { lo: p.lo / scale, hi: p.hi / scale, ..p.clone() }).collect(),
        ))
    }

    /// Density of `Y = 10^X` given the density of `X`, tabulated with the
    /// default ordinate count per piece.
    pub fn density_of_y(&self) -> PiecewiseDensity {
        self.density_of_y_with(DEFAULT_Y_ORDINATES)
    }

    /// `f(y) = g(log₁₀ y) / (y ln 10)` tabulated on `ordinates` equally spaced
    /// points per piece. Each piece keeps its weight, so total mass is exact.
    pub fn density_of_y_with(&self, ordinates: usize) -> PiecewiseDensity {
        let k = ordinates.max(2);
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let y_lo = 10f64.powf(p.lo);
                let y_hi = 10f64.powf(p.hi);
                let step = (y_hi - y_lo) / (k - 1) as f64;
                let ords: Vec<f64> = (0..k)
                    .map(|i| {
                        let y = if i == k - 1 { y_hi } else { y_lo + step * i as f64 };
                        let x = if i == 0 {
                            p.lo
                        } else if i == k - 1 {
                            p.hi
                        } else {
                            y.log10()
                        };
                        p.value_at(x) / (y * LN_10)
                    })
                    .collect();
                // a grid can miss all of a very narrow bump
                let shape = if ords.iter().all(|&o| o == 0.0) {
                    PieceShape::Constant { level: 1.0 }
                } else {
                    PieceShape::Tabulated { ordinates: ords }
                };
                Piece { lo: y_lo, hi: y_hi, shape, weight: p.weight }
            })
            .collect();
        PiecewiseDensity::from_parts(pieces)
    }
}

/// A density supported on `[0, 1)`: the mod-1 projection `g†`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DensitySpec", into = "DensitySpec")]
pub struct Mod1Density {
    inner: PiecewiseDensity,
}

impl TryFrom<DensitySpec> for Mod1Density {
    type Error = Error;

    fn try_from(spec: DensitySpec) -> Result<Self> {
        Mod1Density::new(PiecewiseDensity::new(spec.pieces)?)
    }
}

impl From<Mod1Density> for DensitySpec {
    fn from(d: Mod1Density) -> Self {
        d.inner.into()
    }
}

impl Mod1Density {
    pub fn new(inner: PiecewiseDensity) -> Result<Self> {
        if let Some(p) = inner.pieces.iter().find(|p| p.lo < 0.0 || p.hi > 1.0) {
            return Err(Error::InvalidDensity(format!("mod-1 density piece [{}, {}) leaves [0, 1)", p.lo, p.hi)));
        }
        Ok(Mod1Density { inner })
    }

    pub(crate) fn from_parts(pieces: Vec<Piece>) -> Self {
        Mod1Density { inner: PiecewiseDensity::from_parts(pieces) }
    }

    /// The constant density 1 on `[0, 1)`.
    pub fn uniform() -> Self {
        Mod1Density::from_parts(vec![Piece {
            lo: 0.0,
            hi: 1.0,
            shape: PieceShape::Constant { level: 1.0 },
            weight: 1.0,
        }])
    }

    pub fn density(&self) -> &PiecewiseDensity {
        &self.inner
    }

    pub fn into_density(self) -> PiecewiseDensity {
        self.inner
    }

    pub fn pieces(&self) -> &[Piece] {
        self.inner.pieces()
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        self.inner.evaluate(x)
    }

    pub fn integrate(&self, lo: f64, hi: f64) -> Result<f64> {
        self.inner.integrate(lo, hi)
    }

    pub fn translate(&self, t: f64) -> Mod1Density {
        translate_mod1(self, t)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        self.inner.to_json()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, LOG10_2};

    fn uniform() -> PiecewiseDensity {
        Mod1Density::uniform().into_density()
    }

    fn sine1() -> PiecewiseDensity {
        let pieces = (1..=9u32)
            .map(|k| {
                let lo = (k as f64).log10();
                let hi = if k == 9 { 1.0 } else { ((k + 1) as f64).log10() };
                Piece { lo, hi, shape: PieceShape::SineBump, weight: hi - lo }
            })
            .collect();
        PiecewiseDensity::new(pieces).unwrap()
    }

    #[test]
    fn evaluate_uniform() {
        let u = uniform();
        assert_eq!(u.evaluate(0.5), 1.0);
        assert_eq!(u.evaluate(0.0), 1.0);
        assert_eq!(u.evaluate(1.0), 0.0);
        assert_eq!(u.evaluate(-0.1), 0.0);
    }

    #[test]
    fn evaluate_sine_peak() {
        // (π/2)·sin(π/2) at the middle of [0, log 2)
        let v = sine1().evaluate(LOG10_2 / 2.0);
        assert!((v - FRAC_PI_2).abs() < 1e-12, "{v}");
    }

    #[test]
    fn integrate_basics() {
        let u = uniform();
        assert!((u.integrate(0.0, LOG10_2).unwrap() - 0.30103).abs() < 1e-5);
        assert_eq!(u.integrate(0.4, 0.4).unwrap(), 0.0);
        assert!(matches!(u.integrate(0.5, 0.4), Err(Error::InvalidInterval { .. })));
        let s = sine1().integrate(3f64.log10(), 4f64.log10()).unwrap();
        assert!((s - (4.0f64 / 3.0).log10()).abs() < 1e-12);
        assert!((sine1().integrate(-5.0, 5.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constructor_checks() {
        let c = PieceShape::Constant { level: 1.0 };
        assert!(matches!(
            PiecewiseDensity::new(vec![Piece { lo: 0.0, hi: 1.0, shape: c.clone(), weight: 0.9 }]),
            Err(Error::Unnormalized(_))
        ));
        let overlapping = vec![
            Piece { lo: 0.0, hi: 0.6, shape: c.clone(), weight: 0.5 },
            Piece { lo: 0.5, hi: 1.0, shape: c.clone(), weight: 0.5 },
        ];
        assert!(PiecewiseDensity::new(overlapping).is_err());
        assert!(Piece::new(1.0, 1.0, c.clone(), 1.0).is_err());
        let n = PiecewiseDensity::normalized(vec![Piece { lo: 2.0, hi: 3.0, shape: c, weight: 4.0 }]).unwrap();
        assert_eq!(n.pieces()[0].weight, 1.0);
    }

    #[test]
    fn rebase_identity_and_scaling() {
        let s = sine1();
        assert_eq!(s.rebase_log_density(10).unwrap(), s);
        assert!(matches!(s.rebase_log_density(1), Err(Error::InvalidBase(1))));
        let r = uniform().rebase_log_density(100).unwrap();
        assert_eq!(r.pieces()[0].hi, 0.5);
        assert!((r.evaluate(0.25) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn density_of_y_uniform() {
        let f = uniform().density_of_y();
        assert_eq!(f.support(), (1.0, 10.0));
        // pointwise accuracy is that of a 1024-point trapezoid tabulation
        assert!((f.evaluate(1.0) - 1.0 / LN_10).abs() < 1e-5);
        assert!((f.evaluate(5.0) - 1.0 / (5.0 * LN_10)).abs() < 1e-5);
        assert!((f.integrate(1.0, 10.0).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn density_of_y_sine() {
        let f = sine1().density_of_y();
        assert!((f.integrate(1.0, 10.0).unwrap() - 1.0).abs() < 1e-9);
        for k in 1..=9 {
            let y = k as f64 + 0.37;
            let expect = FRAC_PI_2 / (y * LN_10)
                * (std::f64::consts::PI * (y / k as f64).log10() / (1.0 + 1.0 / k as f64).log10()).sin();
            assert!((f.evaluate(y) - expect).abs() < 1e-5, "y={y}: {} vs {expect}", f.evaluate(y));
        }
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let s = sine1();
        let back = PiecewiseDensity::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        let bad = r#"{"pieces":[{"lo":0,"hi":1,"shape":{"kind":"constant","level":1},"weight":0.5}]}"#;
        assert!(PiecewiseDensity::from_json(bad).is_err());
        let outside = r#"{"pieces":[{"lo":0.5,"hi":1.5,"shape":{"kind":"constant","level":1},"weight":1}]}"#;
        assert!(PiecewiseDensity::from_json(outside).is_ok());
        assert!(Mod1Density::from_json(outside).is_err());
    }
}
