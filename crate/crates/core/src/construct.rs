//! n-digit Benford mod-1 densities built from unit bump densities.
//!
//! The unit interval is cut at the logs of consecutive n-digit mantissa
//! boundaries. Each cell receives a bump `h_j`, a probability density on
//! `[0, 1]`, rescaled onto the cell and weighted by the cell width. Every
//! n-digit block then carries exactly its Benford mass, while nothing is said
//! about the digits after the n-th.

use serde::Serialize;

use crate::density::{Mod1Density, Piece, PieceShape, PiecewiseDensity};
use crate::digits::{benford_block_prob, digit_prob_from_mod1, mantissa_log, DigitBlock};
use crate::error::{Error, Result};

/// Largest digit count accepted by [`benford_partition`] and [`verify_n_digit`].
pub const MAX_DIGITS: usize = 4;

/// Threshold on the max block error for a density to count as n-digit Benford.
pub const N_DIGIT_TOLERANCE: f64 = 1e-9;

/// Tolerance on the unit mass of every bump.
pub const BUMP_MASS_TOLERANCE: f64 = 1e-12;

/// Breakpoints `0 = a₀ < a₁ < … < a_m = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    points: Vec<f64>,
}

impl Partition {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 || points[0] != 0.0 || *points.last().unwrap() != 1.0 {
            return Err(Error::Config("partition must start at 0 and end at 1".into()));
        }
        if points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Config("partition points must be strictly increasing".into()));
        }
        Ok(Partition { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn intervals(&self) -> usize {
        self.points.len() - 1
    }

    pub fn widths(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.windows(2).map(|w| w[1] - w[0])
    }
}

/// The `9·10^{n−1}` cells `[log(v/10^{n−1}), log((v+1)/10^{n−1}))`.
pub fn benford_partition(n: usize) -> Result<Partition> {
    if !(1..=MAX_DIGITS).contains(&n) {
        return Err(Error::ResourceLimit { what: "partition digit count", requested: n, limit: MAX_DIGITS });
    }
    let first = 10u64.pow(n as u32 - 1);
    let points = (first..=10 * first).map(|v| mantissa_log(v, n, 10)).collect();
    Partition::new(points)
}

/// Unit bump densities `h_j`, one per cell or a single one broadcast.
#[derive(Clone, Debug, PartialEq)]
pub struct BumpFamily {
    bumps: Vec<PieceShape>,
}

impl BumpFamily {
    pub fn new(bumps: Vec<PieceShape>) -> Result<Self> {
        if bumps.is_empty() {
            return Err(Error::Config("bump family is empty".into()));
        }
        for (j, b) in bumps.iter().enumerate() {
            b.validate()?;
            let mass = b.raw_mass();
            if (mass - 1.0).abs() > BUMP_MASS_TOLERANCE {
                return Err(Error::Config(format!("bump {j} integrates to {mass} on [0, 1], not 1")));
            }
        }
        Ok(BumpFamily { bumps })
    }

    /// One bump reused on every cell.
    pub fn broadcast(bump: PieceShape) -> Result<Self> {
        Self::new(vec![bump])
    }

    /// `"uniform"`, `"sine"` or `"linear-ramp"` (the ramp `2u`).
    pub fn named(name: &str) -> Result<Self> {
        let shape = match name {
            "uniform" => PieceShape::Constant { level: 1.0 },
            "sine" => PieceShape::SineBump,
            "linear-ramp" => PieceShape::Linear { left: 0.0, right: 2.0 },
            other => {
                return Err(Error::Config(format!("unknown bump '{other}' (expected uniform, sine or linear-ramp)")))
            }
        };
        Self::broadcast(shape)
    }

    /// Bumps taken from the piece shapes of a density spec, rescaled to unit
    /// mass: one piece is broadcast, otherwise one piece per cell.
    pub fn from_density(spec: &PiecewiseDensity) -> Result<Self> {
        let shapes = spec.pieces().iter().map(|p| p.shape.with_unit_mass()).collect::<Result<Vec<_>>>()?;
        Self::new(shapes)
    }

    pub fn bumps(&self) -> &[PieceShape] {
        &self.bumps
    }

    fn for_cell(&self, j: usize) -> &PieceShape {
        if self.bumps.len() == 1 {
            &self.bumps[0]
        } else {
            &self.bumps[j]
        }
    }
}

/// `g†(x) = h_j((x − a_j)/(a_{j+1} − a_j))` on every cell `[a_j, a_{j+1})`.
pub fn construct_n_digit(partition: &Partition, bumps: &BumpFamily) -> Result<Mod1Density> {
    let cells = partition.intervals();
    if bumps.bumps.len() != 1 && bumps.bumps.len() != cells {
        return Err(Error::Config(format!(
            "partition has {cells} intervals but {} bumps were given",
            bumps.bumps.len()
        )));
    }
    let pieces = partition
        .points
        .windows(2)
        .enumerate()
        .map(|(j, w)| Piece { lo: w[0], hi: w[1], shape: bumps.for_cell(j).clone(), weight: w[1] - w[0] })
        .collect();
    Mod1Density::new(PiecewiseDensity::new(pieces)?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NDigitReport {
    pub n: usize,
    pub max_abs_error: f64,
    /// Block with the largest deviation.
    pub worst_block: String,
    pub is_n_digit: bool,
}

/// Compares every length-`n` block probability of `g_dag` with Benford's law.
pub fn verify_n_digit(g_dag: &Mod1Density, n: usize) -> Result<NDigitReport> {
    if !(1..=MAX_DIGITS).contains(&n) {
        return Err(Error::ResourceLimit { what: "verification digit count", requested: n, limit: MAX_DIGITS });
    }
    let (worst_block, max_abs_error) = DigitBlock::all(n)
        .map(|b| {
            let err = (digit_prob_from_mod1(g_dag, &b) - benford_block_prob(&b)).abs();
            (b, err)
        })
        .fold(
            (DigitBlock::from_value(10u64.pow(n as u32 - 1), n)?, 0.0),
            |acc, cur| {
                if cur.1 > acc.1 {
                    cur
                } else {
                    acc
                }
            },
        );
    Ok(NDigitReport {
        n,
        max_abs_error,
        worst_block: worst_block.to_string(),
        is_n_digit: max_abs_error <= N_DIGIT_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn partition_one_digit() {
        let p = benford_partition(1).unwrap();
        assert_eq!(p.intervals(), 9);
        for (k, a) in p.points().iter().enumerate() {
            assert!((a - ((k + 1) as f64).log10()).abs() < 1e-15);
        }
        let widths: Vec<f64> = p.widths().collect();
        for (d, w) in widths.iter().enumerate() {
            assert!((w - (1.0 + 1.0 / (d + 1) as f64).log10()).abs() < 1e-15);
        }
        assert!((widths.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partition_two_digit() {
        let p = benford_partition(2).unwrap();
        assert_eq!(p.intervals(), 90);
        assert_eq!(p.points()[0], 0.0);
        assert!((p.points()[1] - 1.1f64.log10()).abs() < 1e-16);
        assert!(matches!(benford_partition(0), Err(Error::ResourceLimit { .. })));
        assert!(matches!(benford_partition(5), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![0.0, 0.5, 0.5, 1.0]).is_err());
        assert!(Partition::new(vec![0.1, 1.0]).is_err());
        assert!(Partition::new(vec![0.0, 0.3, 1.0]).is_ok());
    }

    #[test]
    fn sine_family_reproduces_one_digit_example() {
        let g = construct_n_digit(&benford_partition(1).unwrap(), &BumpFamily::named("sine").unwrap()).unwrap();
        for k in 1..=9u32 {
            let lo = (k as f64).log10();
            let w = (1.0 + 1.0 / k as f64).log10();
            for t in [0.1, 0.25, 0.5, 0.8] {
                let x = lo + t * w;
                let direct = PI / 2.0 * (PI * (x - lo) / w).sin();
                assert!((g.evaluate(x) - direct).abs() < 1e-12);
            }
        }
        assert!(verify_n_digit(&g, 1).unwrap().max_abs_error <= 1e-12);
        assert!(!verify_n_digit(&g, 2).unwrap().is_n_digit);
    }

    #[test]
    fn uniform_family_is_uniform() {
        let p = Partition::new(vec![0.0, 0.2, 0.7, 1.0]).unwrap();
        let g = construct_n_digit(&p, &BumpFamily::named("uniform").unwrap()).unwrap();
        for i in 0..100 {
            assert!((g.evaluate(i as f64 / 100.0) - 1.0).abs() < 1e-12);
        }
        let r = verify_n_digit(&g, 3).unwrap();
        assert!(r.is_n_digit && r.max_abs_error <= 1e-12);
    }

    #[test]
    fn bump_family_checks() {
        assert!(BumpFamily::named("gauss").is_err());
        assert!(BumpFamily::broadcast(PieceShape::Constant { level: 2.0 }).is_err());
        let p = benford_partition(1).unwrap();
        let two = BumpFamily::new(vec![PieceShape::SineBump, PieceShape::SineBump]).unwrap();
        assert!(matches!(construct_n_digit(&p, &two), Err(Error::Config(_))));
        let per_cell = BumpFamily::new(
            (0..9)
                .map(|j| if j % 2 == 0 { PieceShape::SineBump } else { PieceShape::Linear { left: 2.0, right: 0.0 } })
                .collect(),
        )
        .unwrap();
        let g = construct_n_digit(&p, &per_cell).unwrap();
        assert!(verify_n_digit(&g, 1).unwrap().is_n_digit);
    }

    #[test]
    fn bumps_from_density_spec() {
        let spec = PiecewiseDensity::new(vec![Piece {
            lo: 0.0,
            hi: 1.0,
            shape: PieceShape::Linear { left: 1.0, right: 3.0 },
            weight: 1.0,
        }])
        .unwrap();
        let fam = BumpFamily::from_density(&spec).unwrap();
        assert_eq!(fam.bumps(), &[PieceShape::Linear { left: 0.5, right: 1.5 }]);
        let g = construct_n_digit(&benford_partition(2).unwrap(), &fam).unwrap();
        assert!(verify_n_digit(&g, 2).unwrap().is_n_digit);
    }
}
