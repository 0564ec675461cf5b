//! Significant digits: Benford block probabilities, digit extraction, and
//! digit-block probabilities of a variable given its mod-1 log-density.

use std::fmt;
use std::io::Write;

use num_bigint::BigUint;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::density::{compensated_sum, Mod1Density};
use crate::error::{Error, Result};

/// Longest block accepted anywhere (its value must fit a `u64`).
pub const MAX_BLOCK_LEN: usize = 18;

/// Default cap on the number of blocks in a full distribution (`n ≤ 4`).
pub const DEFAULT_MAX_BLOCKS: usize = 9_000;

/// Residual window (in units of the last digit) that triggers exact extraction.
const GUARD: f64 = 1e-6;

/// Longest block the floating-point extraction path handles by itself.
const FLOAT_PATH_MAX_LEN: usize = 8;

fn pow10(n: usize) -> u64 {
    10u64.pow(n as u32)
}

/// A leading decimal digit sequence `d₁ d₂ … dₙ`, `d₁ ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DigitBlock {
    digits: Vec<u8>,
}

impl DigitBlock {
    pub fn new(digits: Vec<u8>) -> Result<Self> {
        if digits.is_empty() || digits.len() > MAX_BLOCK_LEN {
            return Err(Error::InvalidBlock(format!(
                "block length must be in 1..={MAX_BLOCK_LEN}, got {}",
                digits.len()
            )));
        }
        if digits[0] == 0 || digits[0] > 9 {
            return Err(Error::InvalidBlock(format!("leading digit must be 1..=9, got {}", digits[0])));
        }
        if let Some(d) = digits.iter().find(|&&d| d > 9) {
            return Err(Error::InvalidBlock(format!("digit {d} is not a decimal digit")));
        }
        Ok(DigitBlock { digits })
    }

    /// The `n`-digit block whose integer value is `value`.
    pub fn from_value(value: u64, n: usize) -> Result<Self> {
        if n == 0 || n > MAX_BLOCK_LEN || value < pow10(n - 1) || value >= pow10(n) {
            return Err(Error::InvalidBlock(format!("{value} is not a {n}-digit block value")));
        }
        let mut digits = vec![0u8; n];
        let mut v = value;
        for slot in digits.iter_mut().rev() {
            *slot = (v % 10) as u8;
            v /= 10;
        }
        Ok(DigitBlock { digits })
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `Σ 10^{n−j} d_j`.
    pub fn value(&self) -> u64 {
        self.digits.iter().fold(0u64, |acc, &d| acc * 10 + d as u64)
    }

    /// All blocks of length `n` in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = DigitBlock> {
        let (lo, hi) = if (1..=MAX_BLOCK_LEN).contains(&n) { (pow10(n - 1), pow10(n)) } else { (0, 0) };
        (lo..hi).map(move |v| DigitBlock::from_value(v, n).expect("in range"))
    }
}

impl fmt::Display for DigitBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.digits {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// `log_b(v / b^{n−1})`, the left end of the block `v` on the mantissa-log axis.
pub(crate) fn mantissa_log(value: u64, n: usize, base: u32) -> f64 {
    let first = (base as u64).pow(n as u32 - 1);
    if value == first * base as u64 {
        return 1.0;
    }
    ((value - first) as f64 / first as f64).ln_1p() / (base as f64).ln()
}

/// Benford probability `log₁₀(1 + 1/v)` of a digit block.
pub fn benford_block_prob(block: &DigitBlock) -> f64 {
    benford_value_prob(block.value(), 10)
}

pub(crate) fn benford_value_prob(value: u64, base: u32) -> f64 {
    (1.0 / value as f64).ln_1p() / (base as f64).ln()
}

/// Probability that the first significant digits form `block`, for the
/// variable whose `log₁₀` has mod-1 density `g_dag`.
pub fn digit_prob_from_mod1(g_dag: &Mod1Density, block: &DigitBlock) -> f64 {
    let n = block.len();
    let v = block.value();
    g_dag.integrate(mantissa_log(v, n, 10), mantissa_log(v + 1, n, 10)).expect("mantissa bounds are ordered")
}

/// Exact `floor(y · 10^shift)` for finite positive `y`.
fn exact_scaled_floor(y: f64, shift: i32) -> BigUint {
    let bits = y.to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, exp2) = if exp_bits == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp_bits - 1075) };
    let mut num = BigUint::from(mant);
    let mut den = BigUint::from(1u32);
    if exp2 >= 0 {
        num <<= exp2 as usize;
    } else {
        den <<= (-exp2) as usize;
    }
    if shift >= 0 {
        num *= BigUint::from(10u32).pow(shift as u32);
    } else {
        den *= BigUint::from(10u32).pow((-shift) as u32);
    }
    num / den
}

/// Exact `n`-digit block of `y` given an estimate of its decimal exponent.
fn exact_block(y: f64, n: usize, mut k: i32) -> u64 {
    let lo = BigUint::from(pow10(n - 1));
    let hi = BigUint::from(pow10(n));
    loop {
        let v = exact_scaled_floor(y, n as i32 - 1 - k);
        if v >= hi {
            k += 1;
        } else if v < lo {
            k -= 1;
        } else {
            return u64::try_from(v).expect("block value below 10^18");
        }
    }
}

/// Multiplies by `10^e`, exactly rounded while `|e| ≤ 22`.
fn scale_pow10(y: f64, e: i32) -> f64 {
    if e >= 0 {
        y * 10f64.powi(e)
    } else {
        y / 10f64.powi(-e)
    }
}

/// First `n` significant digits of `y`.
///
/// Normalizes `y` into `[1, 10)` with `k = ⌊log₁₀ y⌋` (corrected by ±1 when
/// rounding lands outside), then peels digits by multiply-by-10-and-floor.
/// If the final residual sits within a tiny window of a digit boundary, the
/// block is settled with exact integer arithmetic on the binary value, so the
/// result always equals the exact decimal expansion of `y`.
pub fn extract_digits(y: f64, n: usize) -> Result<DigitBlock> {
    if !(y.is_finite() && y > 0.0) {
        return Err(Error::Domain(y));
    }
    if n == 0 || n > MAX_BLOCK_LEN {
        return Err(Error::InvalidBlock(format!("block length must be in 1..={MAX_BLOCK_LEN}, got {n}")));
    }
    let mut k = y.log10().floor() as i32;
    if n > FLOAT_PATH_MAX_LEN || k.abs() > 22 {
        return DigitBlock::from_value(exact_block(y, n, k), n);
    }
    let mut m = scale_pow10(y, -k);
    if m < 1.0 {
        k -= 1;
        m = scale_pow10(y, -k);
    } else if m >= 10.0 {
        k += 1;
        m = scale_pow10(y, -k);
    }
    let mut value = 0u64;
    for _ in 0..n {
        let d = m.floor().clamp(0.0, 9.0);
        value = value * 10 + d as u64;
        m = (m - d) * 10.0;
    }
    let near_boundary = !(GUARD..=10.0 - GUARD).contains(&m);
    if near_boundary || !(pow10(n - 1)..pow10(n)).contains(&value) {
        value = exact_block(y, n, k);
    }
    DigitBlock::from_value(value, n)
}

/// Probabilities (or frequencies) over all `n`-digit blocks in base `base`,
/// in lexicographic block order.
#[derive(Clone, Debug, PartialEq)]
pub struct DigitDistribution {
    base: u32,
    len: usize,
    probabilities: Vec<f64>,
    total_count: Option<u64>,
}

/// Tolerance on `Σ p = 1` for a distribution.
pub const DISTRIBUTION_TOLERANCE: f64 = 1e-9;

pub(crate) fn block_count(base: u32, n: usize) -> Option<usize> {
    let b = base as usize;
    let tail = b.checked_pow(n.checked_sub(1)? as u32)?;
    (b - 1).checked_mul(tail)
}

impl DigitDistribution {
    pub fn new(base: u32, len: usize, probabilities: Vec<f64>, total_count: Option<u64>) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidBase(base));
        }
        let expected = block_count(base, len).ok_or_else(|| Error::Config(format!("invalid block length {len}")))?;
        if probabilities.len() != expected {
            return Err(Error::Config(format!(
                "expected {expected} probabilities for {len}-digit base-{base} blocks, got {}",
                probabilities.len()
            )));
        }
        let sum = compensated_sum(probabilities.iter().copied());
        if (sum - 1.0).abs() > DISTRIBUTION_TOLERANCE || probabilities.iter().any(|p| !(*p >= 0.0)) {
            return Err(Error::Config(format!("digit probabilities sum to {sum}, not 1")));
        }
        Ok(DigitDistribution { base, len, probabilities, total_count })
    }

    /// Benford law `log_b(1 + 1/v)` over all `n`-digit base-`b` blocks.
    pub fn benford(base: u32, n: usize) -> Result<Self> {
        let count = block_count(base, n).ok_or_else(|| Error::Config(format!("invalid block length {n}")))?;
        let first = (base as u64).pow(n as u32 - 1);
        let probs = (0..count as u64).map(|i| benford_value_prob(first + i, base)).collect();
        Self::new(base, n, probs, None)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn block_len(&self) -> usize {
        self.len
    }

    pub fn total_count(&self) -> Option<u64> {
        self.total_count
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    fn first_value(&self) -> u64 {
        (self.base as u64).pow(self.len as u32 - 1)
    }

    /// `(block value, probability)` pairs in block order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        let first = self.first_value();
        self.probabilities.iter().enumerate().map(move |(i, &p)| (first + i as u64, p))
    }

    pub fn prob_of_value(&self, value: u64) -> Option<f64> {
        let first = self.first_value();
        value.checked_sub(first).and_then(|i| self.probabilities.get(i as usize).copied())
    }

    /// Probability of a decimal block; `None` for other bases or lengths.
    pub fn get(&self, block: &DigitBlock) -> Option<f64> {
        if self.base != 10 || block.len() != self.len {
            return None;
        }
        self.prob_of_value(block.value())
    }

    /// Human-readable block label: plain digits in bases up to 10, otherwise
    /// the base-`b` digit values joined by `.`.
    pub fn label(&self, value: u64) -> String {
        let b = self.base as u64;
        let mut digits = Vec::with_capacity(self.len);
        let mut v = value;
        for _ in 0..self.len {
            digits.push(v % b);
            v /= b;
        }
        digits.reverse();
        let sep = if self.base <= 10 { "" } else { "." };
        digits.iter().map(u64::to_string).collect::<Vec<_>>().join(sep)
    }

    /// `½ Σ |pᵢ − qᵢ|`.
    pub fn total_variation(&self, other: &DigitDistribution) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(0.5 * compensated_sum(self.probabilities.iter().zip(&other.probabilities).map(|(p, q)| (p - q).abs())))
    }

    pub fn max_abs_diff(&self, other: &DigitDistribution) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self.probabilities.iter().zip(&other.probabilities).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max))
    }

    pub(crate) fn check_compatible(&self, other: &DigitDistribution) -> Result<()> {
        if self.base != other.base || self.len != other.len {
            return Err(Error::Config(format!(
                "distributions differ: base {} / {} digits vs base {} / {} digits",
                self.base, self.len, other.base, other.len
            )));
        }
        Ok(())
    }

    /// Sums out the last digit.
    pub fn marginal(&self) -> Result<DigitDistribution> {
        if self.len < 2 {
            return Err(Error::Config("cannot marginalize a 1-digit distribution".into()));
        }
        let b = self.base as usize;
        let probs = self.probabilities.chunks(b).map(|c| compensated_sum(c.iter().copied())).collect();
        DigitDistribution::new(self.base, self.len - 1, probs, self.total_count)
    }

    /// CSV with columns `block,probability`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["block", "probability"])?;
        for (v, p) in self.iter() {
            w.write_record([self.label(v), p.to_string()])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    /// Two aligned columns, `block` and `probability`.
    pub fn render_text(&self) -> String {
        let mut s = format!("{:>8}  {:>12}\n", "block", "probability");
        for (v, p) in self.iter() {
            s.push_str(&format!("{:>8}  {:>12.6}\n", self.label(v), p));
        }
        s
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("utf-8")
    }
}

#[derive(Serialize)]
struct Entry {
    block: String,
    probability: f64,
}

impl Serialize for DigitDistribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let entries: Vec<Entry> = self.iter().map(|(v, p)| Entry { block: self.label(v), probability: p }).collect();
        let mut s = serializer.serialize_struct("DigitDistribution", 4)?;
        s.serialize_field("base", &self.base)?;
        s.serialize_field("n", &self.len)?;
        s.serialize_field("total_count", &self.total_count)?;
        s.serialize_field("entries", &entries)?;
        s.end()
    }
}

/// Digit-block distribution of length `n` implied by `g_dag`, capped at
/// [`DEFAULT_MAX_BLOCKS`] blocks.
pub fn full_digit_distribution(g_dag: &Mod1Density, n: usize) -> Result<DigitDistribution> {
    full_digit_distribution_with_limit(g_dag, n, DEFAULT_MAX_BLOCKS)
}

pub fn full_digit_distribution_with_limit(
    g_dag: &Mod1Density,
    n: usize,
    max_blocks: usize,
) -> Result<DigitDistribution> {
    base_block_distribution(g_dag, 10, n, max_blocks)
}

/// Integrates `g_dag` over the mantissa-log interval of every base-`b` block.
pub(crate) fn base_block_distribution(
    g_dag: &Mod1Density,
    base: u32,
    n: usize,
    max_blocks: usize,
) -> Result<DigitDistribution> {
    if base < 2 {
        return Err(Error::InvalidBase(base));
    }
    let count = match block_count(base, n) {
        Some(c) if n >= 1 && c <= max_blocks => c,
        Some(c) => return Err(Error::ResourceLimit { what: "digit blocks", requested: c, limit: max_blocks }),
        None if n == 0 => return Err(Error::Config("block length must be at least 1".into())),
        None => return Err(Error::ResourceLimit { what: "digit blocks", requested: usize::MAX, limit: max_blocks }),
    };
    let first = (base as u64).pow(n as u32 - 1);
    let probs = (0..count as u64)
        .map(|i| {
            let v = first + i;
            g_dag.integrate(mantissa_log(v, n, base), mantissa_log(v + 1, n, base))
        })
        .collect::<Result<Vec<_>>>()?;
    DigitDistribution::new(base, n, probs, None)
}
