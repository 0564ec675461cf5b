//! Seeded inverse-CDF sampling from piecewise densities.
//!
//! Draws come from ChaCha8 streams. The 64-bit seed is expanded into the
//! ChaCha key with SplitMix64, and samples are produced in fixed-size chunks,
//! chunk `i` using stream `i`. Output is therefore identical for any number of
//! worker threads.

use std::io::Write;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;

use crate::density::{PiecewiseDensity, MASS_TOLERANCE};
use crate::error::{Error, Result};

/// Draws per independently seeded chunk.
pub const CHUNK_SIZE: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    values: Vec<f64>,
    seed: u64,
    source: String,
}

impl SampleSet {
    pub fn new(values: Vec<f64>, seed: u64, source: impl Into<String>) -> Self {
        SampleSet { values, seed, source: source.into() }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn count(&self) -> usize {
        self.values.len()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = source.into();
        self
    }

    /// One value per line, shortest round-trip formatting.
    pub fn write_text<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for v in &self.values {
            writeln!(out, "{v}")?;
        }
        Ok(())
    }

    /// `# seed=…,count=…,source=…` comment line, a `value` header, then values.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# seed={},count={},source={}", self.seed, self.count(), self.source)?;
        writeln!(out, "value")?;
        self.write_text(out)
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for chunk `chunk` of the run seeded with `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut state = seed;
    let mut key = [0u8; 32];
    for word in key.chunks_exact_mut(8) {
        word.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(chunk);
    rng
}

/// Uniform on `[0, 1)` from the top 53 bits.
fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Inverse CDF of a piecewise density.
struct Inverter<'a> {
    density: &'a PiecewiseDensity,
    cumulative: Vec<f64>,
}

impl<'a> Inverter<'a> {
    fn new(density: &'a PiecewiseDensity) -> Result<Self> {
        let mass = density.total_mass();
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::Unnormalized(mass));
        }
        let mut running = 0.0;
        let mut cumulative: Vec<f64> = density
            .pieces()
            .iter()
            .map(|p| {
                running += p.weight;
                running
            })
            .collect();
        let last = *cumulative.last().expect("density has pieces");
        cumulative.iter_mut().for_each(|c| *c /= last);
        Ok(Inverter { density, cumulative })
    }

    fn quantile(&self, u: f64) -> f64 {
        let pieces = self.density.pieces();
        let idx = self.cumulative.partition_point(|&c| c <= u).min(pieces.len() - 1);
        let piece = &pieces[idx];
        let start = if idx == 0 { 0.0 } else { self.cumulative[idx - 1] };
        let span = self.cumulative[idx] - start;
        let p = if span > 0.0 { ((u - start) / span).clamp(0.0, 1.0) } else { 0.0 };
        let local = piece.shape.inverse_cdf(p);
        let x = piece.lo + local * piece.width();
        if x >= piece.hi {
            piece.hi.next_down().max(piece.lo)
        } else {
            x.max(piece.lo)
        }
    }
}

fn draw<F>(g: &PiecewiseDensity, count: usize, seed: u64, map: F) -> Result<Vec<f64>>
where
    F: Fn(f64) -> f64 + Sync,
{
    if count == 0 {
        return Err(Error::Config("sample count must be at least 1".into()));
    }
    let inv = Inverter::new(g)?;
    let chunks = count.div_ceil(CHUNK_SIZE);
    let parts: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = CHUNK_SIZE.min(count - c * CHUNK_SIZE);
            let mut rng = chunk_rng(seed, c as u64);
            (0..len).map(|_| map(inv.quantile(unit_f64(&mut rng)))).collect()
        })
        .collect();
    Ok(parts.concat())
}

/// `count` draws of `X` with density `g`.
pub fn sample_x(g: &PiecewiseDensity, count: usize, seed: u64) -> Result<SampleSet> {
    let values = draw(g, count, seed, |x| x)?;
    Ok(SampleSet::new(values, seed, "x"))
}

/// `10^x` for finite `x`, through `libm` so results do not depend on the
/// platform math library. Integer exponents are exact.
pub fn pow10(x: f64) -> f64 {
    libm::exp10(x)
}

/// `count` draws of `Y = 10^X` where `X` has density `g`.
pub fn sample_y(g: &PiecewiseDensity, count: usize, seed: u64) -> Result<SampleSet> {
    let (_, hi) = g.support();
    let y_max = pow10(hi);
    let values = draw(g, count, seed, |x| {
        let y = pow10(x);
        // keep the right-open convention at the top of the support
        if y >= y_max {
            y_max.next_down()
        } else {
            y
        }
    })?;
    Ok(SampleSet::new(values, seed, "y"))
}
