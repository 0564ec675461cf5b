//! Named example densities of `X = log₁₀ Y`.

use crate::construct::{benford_partition, construct_n_digit, BumpFamily};
use crate::density::{Mod1Density, Piece, PieceShape, PiecewiseDensity};
use crate::error::{Error, Result};

/// Default number of steps kept from the infinite geometric staircase.
pub const GEOMETRIC_TERMS: u32 = 60;

pub const PRESET_NAMES: [&str; 4] = ["uniform", "sine1", "geom60", "triangle"];

/// `g = 1` on `[0, 1)`.
pub fn uniform() -> PiecewiseDensity {
    Mod1Density::uniform().into_density()
}

/// One sine bump on each first-digit cell `[log k, log(k+1))`.
pub fn sine_one_digit() -> PiecewiseDensity {
    let partition = benford_partition(1).expect("n = 1 is in range");
    let bumps = BumpFamily::broadcast(PieceShape::SineBump).expect("sine bump has unit mass");
    construct_n_digit(&partition, &bumps).expect("one bump per cell").into_density()
}

/// `Σ_{k=1}^{terms} 2^{−k}·1[k, k+1)`, renormalized by `1/(1 − 2^{−terms})`.
pub fn geometric_steps(terms: u32) -> Result<PiecewiseDensity> {
    if terms == 0 || terms > 1000 {
        return Err(Error::Config(format!("geometric staircase needs 1..=1000 terms, got {terms}")));
    }
    let norm = 1.0 - 0.5f64.powi(terms as i32);
    let pieces = (1..=terms)
        .map(|k| Piece {
            lo: k as f64,
            hi: (k + 1) as f64,
            shape: PieceShape::Constant { level: 1.0 },
            weight: 0.5f64.powi(k as i32) / norm,
        })
        .collect();
    PiecewiseDensity::new(pieces)
}

/// Triangle density rising linearly from `lo` to its apex at `peak`, then
/// falling to `hi`.
pub fn triangle(lo: f64, peak: f64, hi: f64) -> Result<PiecewiseDensity> {
    if !(lo < peak && peak < hi) {
        return Err(Error::Config(format!("triangle needs lo < peak < hi, got ({lo}, {peak}, {hi})")));
    }
    let span = hi - lo;
    PiecewiseDensity::new(vec![
        Piece { lo, hi: peak, shape: PieceShape::Linear { left: 0.0, right: 1.0 }, weight: (peak - lo) / span },
        Piece { lo: peak, hi, shape: PieceShape::Linear { left: 1.0, right: 0.0 }, weight: (hi - peak) / span },
    ])
}

/// Looks up one of [`PRESET_NAMES`].
pub fn preset(name: &str) -> Result<PiecewiseDensity> {
    match name {
        "uniform" => Ok(uniform()),
        "sine1" => Ok(sine_one_digit()),
        "geom60" => geometric_steps(GEOMETRIC_TERMS),
        "triangle" => triangle(0.0, 1.5, 3.0),
        other => Err(Error::Config(format!("unknown preset '{other}' (expected one of {})", PRESET_NAMES.join(", ")))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_are_normalized() {
        for name in PRESET_NAMES {
            let g = preset(name).unwrap();
            assert!((g.total_mass() - 1.0).abs() <= 1e-12, "{name}");
        }
        assert!(preset("normal").is_err());
    }

    #[test]
    fn triangle_peak_height() {
        let t = triangle(0.0, 1.5, 3.0).unwrap();
        assert!((t.evaluate(1.5) - 2.0 / 3.0).abs() < 1e-15);
        assert!((t.evaluate(0.75) - 1.0 / 3.0).abs() < 1e-15);
        assert!(triangle(1.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn geometric_weights() {
        let g = geometric_steps(3).unwrap();
        let w: Vec<f64> = g.pieces().iter().map(|p| p.weight).collect();
        assert_eq!(w, vec![4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0]);
    }
}
