//! Empirical digit statistics, goodness of fit, and invariance experiments.

pub mod gamma;
mod ingest;

use std::fmt::Write as _;

use serde::Serialize;

use crate::density::{compensated_sum, mod1_project, translate_mod1, Mod1Density, PiecewiseDensity};
use crate::digits::{base_block_distribution, block_count, extract_digits, full_digit_distribution, DigitDistribution};
use crate::error::{Error, Result};

pub use gamma::chi_square_sf;
pub use ingest::{ingest_dataset, ColumnSelector, IngestReport, RejectedRow};

/// Block-count cap for base-b distributions.
pub const MAX_BASE_BLOCKS: usize = 10_000;

/// Relative frequencies of the length-`n` leading blocks of `values`.
///
/// A nonpositive or non-finite value fails with [`Error::Data`] carrying its
/// 1-based position.
pub fn empirical_digit_distribution(values: &[f64], n: usize) -> Result<DigitDistribution> {
    let cells = block_count(10, n).ok_or_else(|| Error::Config(format!("invalid block length {n}")))?;
    if values.is_empty() {
        return Err(Error::Config("no values to analyze".into()));
    }
    let first = 10u64.pow(n as u32 - 1);
    let mut counts = vec![0u64; cells];
    for (i, &y) in values.iter().enumerate() {
        let block = extract_digits(y, n).map_err(|e| match e {
            Error::Domain(v) => Error::Data { row: i + 1, message: format!("value {v} is not positive") },
            other => other,
        })?;
        counts[(block.value() - first) as usize] += 1;
    }
    let total = values.len() as f64;
    let probs = counts.iter().map(|&c| c as f64 / total).collect();
    DigitDistribution::new(10, n, probs, Some(values.len() as u64))
}

#[derive(Clone, Debug, Serialize)]
pub struct FitReport {
    pub n: usize,
    pub count: u64,
    pub chi_square: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    /// Mean absolute deviation between empirical and theoretical.
    pub mad: f64,
    pub max_abs_dev: f64,
    pub empirical: DigitDistribution,
    pub theoretical: DigitDistribution,
}

/// Pearson chi-square of `empirical` (which must carry its sample count)
/// against a strictly positive `theoretical` distribution.
pub fn fit_report(empirical: &DigitDistribution, theoretical: &DigitDistribution) -> Result<FitReport> {
    empirical.check_compatible(theoretical)?;
    let count =
        empirical.total_count().ok_or_else(|| Error::Config("empirical distribution has no sample count".into()))?;
    if let Some((v, _)) = theoretical.iter().find(|(_, p)| *p <= 0.0) {
        return Err(Error::Config(format!(
            "theoretical probability of block {} is zero; expected counts must be positive",
            theoretical.label(v)
        )));
    }
    let n = count as f64;
    let chi_square =
        compensated_sum(empirical.probabilities().iter().zip(theoretical.probabilities()).map(|(&o, &p)| {
            let observed = o * n;
            let expected = p * n;
            (observed - expected).powi(2) / expected
        }));
    let dof = empirical.probabilities().len() - 1;
    let diffs: Vec<f64> =
        empirical.probabilities().iter().zip(theoretical.probabilities()).map(|(o, p)| (o - p).abs()).collect();
    Ok(FitReport {
        n: empirical.block_len(),
        count,
        chi_square,
        degrees_of_freedom: dof,
        p_value: chi_square_sf(chi_square, dof),
        mad: compensated_sum(diffs.iter().copied()) / diffs.len() as f64,
        max_abs_dev: diffs.iter().copied().fold(0.0, f64::max),
        empirical: empirical.clone(),
        theoretical: theoretical.clone(),
    })
}

impl FitReport {
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:>8}  {:>12}  {:>12}  {:>12}", "block", "empirical", "theoretical", "difference");
        for ((v, o), p) in self.empirical.iter().zip(self.theoretical.probabilities()) {
            let _ = writeln!(s, "{:>8}  {:>12.6}  {:>12.6}  {:>+12.6}", self.empirical.label(v), o, p, o - p);
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "count        {}", self.count);
        let _ = writeln!(s, "chi_square   {:.6}", self.chi_square);
        let _ = writeln!(s, "dof          {}", self.degrees_of_freedom);
        let _ = writeln!(s, "p_value      {:.6}", self.p_value);
        let _ = writeln!(s, "mad          {:.6}", self.mad);
        let _ = writeln!(s, "max_abs_dev  {:.6}", self.max_abs_dev);
        s
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceReport {
    /// `"scale"` or `"translation"`.
    pub parameter_kind: &'static str,
    pub n: usize,
    pub parameters: Vec<f64>,
    /// Total-variation distance of each parameter's distribution from the
    /// reference (unscaled) one.
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
    pub reference: DigitDistribution,
    pub distributions: Vec<DigitDistribution>,
}

impl InvarianceReport {
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:>14}  {:>14}", self.parameter_kind, "deviation");
        for (p, d) in self.parameters.iter().zip(&self.deviations) {
            let _ = writeln!(s, "{p:>14.6}  {d:>14.6e}");
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "max_deviation  {:.6e}", self.max_deviation);
        s
    }
}

/// Digit distributions of `g†` wrapped by each shift in `shifts`.
pub fn translation_invariance_report(g_dag: &Mod1Density, shifts: &[f64], n: usize) -> Result<InvarianceReport> {
    if let Some(t) = shifts.iter().find(|t| !t.is_finite()) {
        return Err(Error::Config(format!("translation {t} is not finite")));
    }
    invariance(g_dag, shifts.to_vec(), shifts.to_vec(), n, "translation")
}

/// Scaling `Y ↦ cY` translates `log₁₀ Y` by `log₁₀ c`; reports the digit
/// distribution of `cY` for every `c` in `scales`.
pub fn scale_invariance_report(g: &PiecewiseDensity, scales: &[f64], n: usize) -> Result<InvarianceReport> {
    if let Some(c) = scales.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
        return Err(Error::Config(format!("scale {c} must be positive and finite")));
    }
    let shifts = scales.iter().map(|c| c.log10()).collect();
    invariance(&mod1_project(g), shifts, scales.to_vec(), n, "scale")
}

fn invariance(
    g_dag: &Mod1Density,
    shifts: Vec<f64>,
    parameters: Vec<f64>,
    n: usize,
    kind: &'static str,
) -> Result<InvarianceReport> {
    let reference = full_digit_distribution(g_dag, n)?;
    let distributions =
        shifts.iter().map(|&t| full_digit_distribution(&translate_mod1(g_dag, t), n)).collect::<Result<Vec<_>>>()?;
    let deviations = distributions.iter().map(|d| d.total_variation(&reference)).collect::<Result<Vec<_>>>()?;
    let max_deviation = deviations.iter().copied().fold(0.0, f64::max);
    Ok(InvarianceReport { parameter_kind: kind, n, parameters, deviations, max_deviation, reference, distributions })
}

/// Length-`n` digit distribution in base `b` of `Y = 10^X`, `X ~ g`.
pub fn base_digit_distribution(g: &PiecewiseDensity, base: u32, n: usize) -> Result<DigitDistribution> {
    let rebased = g.rebase_log_density(base)?;
    base_block_distribution(&mod1_project(&rebased), base, n, MAX_BASE_BLOCKS)
}

/// Equal-width bin counts over `[lo, hi)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub below: u64,
    pub above: u64,
}

pub fn histogram(values: &[f64], lo: f64, hi: f64, bins: usize) -> Result<Histogram> {
    if bins == 0 || !(lo < hi) {
        return Err(Error::Config(format!("histogram needs bins >= 1 and lo < hi, got {bins} bins on [{lo}, {hi})")));
    }
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|i| if i == bins { hi } else { lo + width * i as f64 }).collect();
    let mut counts = vec![0u64; bins];
    let (mut below, mut above) = (0, 0);
    for &v in values {
        if v < lo {
            below += 1;
        } else if v >= hi {
            above += 1;
        } else {
            let mut i = (((v - lo) / width) as usize).min(bins - 1);
            // settle rounding against the stored edges
            if v < edges[i] {
                i -= 1;
            } else if v >= edges[i + 1] {
                i += 1;
            }
            counts[i] += 1;
        }
    }
    Ok(Histogram { edges, counts, below, above })
}

impl Histogram {
    /// `bin_lo,bin_hi,count` rows.
    pub fn to_csv_string(&self) -> String {
        let mut s = String::from("bin_lo,bin_hi,count\n");
        for (w, c) in self.edges.windows(2).zip(&self.counts) {
            let _ = writeln!(s, "{},{},{}", w[0], w[1], c);
        }
        s
    }
}
