use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use benford_core::analyze::{
    base_digit_distribution, empirical_digit_distribution, fit_report, histogram, ingest_dataset,
    scale_invariance_report, translation_invariance_report, ColumnSelector, InvarianceReport,
};
use benford_core::construct::{benford_partition, construct_n_digit, verify_n_digit, BumpFamily, NDigitReport};
use benford_core::density::{mod1_project, PiecewiseDensity};
use benford_core::digits::{full_digit_distribution, DigitDistribution};
use benford_core::presets::preset;
use benford_core::sample::{sample_x, sample_y};
use benford_core::{Error, Result};
use serde_json::json;

use crate::args::{Command, DensityArg, Format, SampleFormat};

/// Largest per-block gap between the theoretical and sampled table rows.
pub const TABLE_TOLERANCE: f64 = 0.005;

/// Scale grid used by `invariance` when none is given.
const DEFAULT_SCALE_STEPS: u32 = 100;

pub enum Failure {
    Core(Error),
    Threshold(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::ResourceLimit { .. }
        | Error::InvalidBase(_)
        | Error::InvalidBlock(_)
        | Error::InvalidInterval { .. } => 1,
        _ => 2,
    }
}

pub fn run(command: Command) -> Outcome {
    match command {
        Command::Construct { n, bump, bump_spec, out } => construct(n as usize, bump, bump_spec, out),
        Command::Verify { density, n, format } => verify(&density, n as usize, format),
        Command::Table { preset, n, count, seed, format } => table(&preset, n as usize, count, seed, format),
        Command::Sample { density, count, seed, log, out, format } => sample(&density, count, seed, log, out, format),
        Command::Analyze { file, n, column, skip_invalid, bins, hist_lo, hist_hi, histogram_out, format } => {
            analyze(AnalyzeArgs {
                file,
                n: n as usize,
                column,
                skip_invalid,
                bins: bins as usize,
                hist_lo,
                hist_hi,
                histogram_out,
                format,
            })
        }
        Command::Invariance { density, scales, shifts, n, format } => {
            invariance(&density, scales, shifts, n as usize, format)
        }
        Command::Rebase { density, base, n, format } => rebase(&density, base, n as usize, format),
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn stdout_error(source: io::Error) -> Error {
    Error::Io { path: PathBuf::from("<stdout>"), source }
}

fn print(content: &str) -> Result<()> {
    let mut out = io::stdout().lock();
    out.write_all(content.as_bytes()).and_then(|_| out.flush()).map_err(stdout_error)
}

fn to_json<T: serde::Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// The density and a label for it (preset name or spec path).
fn load_density(arg: &DensityArg) -> Result<(PiecewiseDensity, String)> {
    match (&arg.preset, &arg.spec) {
        (Some(name), _) => Ok((preset(name)?, name.clone())),
        (None, Some(path)) => Ok((PiecewiseDensity::from_json(&read_file(path)?)?, path.display().to_string())),
        (None, None) => Err(Error::Config("one of --preset or --spec is required".into())),
    }
}

fn verify_summary(r: &NDigitReport) -> String {
    format!(
        "n={} max_abs_error={:.3e} worst_block={} n_digit_benford={}\n",
        r.n,
        r.max_abs_error,
        r.worst_block,
        if r.is_n_digit { "yes" } else { "no" }
    )
}

fn construct(n: usize, bump: Option<String>, bump_spec: Option<PathBuf>, out: Option<PathBuf>) -> Outcome {
    let family = match (bump, bump_spec) {
        (Some(name), _) => BumpFamily::named(&name)?,
        (None, Some(path)) => BumpFamily::from_density(&PiecewiseDensity::from_json(&read_file(&path)?)?)?,
        (None, None) => return Err(Error::Config("one of --bump or --bump-spec is required".into()).into()),
    };
    let g_dag = construct_n_digit(&benford_partition(n)?, &family)?;
    let report = verify_n_digit(&g_dag, n)?;
    let mut spec = g_dag.to_json();
    spec.push('\n');
    match out {
        Some(path) => {
            write_file(&path, &spec)?;
            print(&verify_summary(&report))?;
        }
        None => {
            print(&spec)?;
            eprint!("{}", verify_summary(&report));
        }
    }
    Ok(())
}

fn verify(density: &DensityArg, n: usize, format: Format) -> Outcome {
    let (g, _) = load_density(density)?;
    let report = verify_n_digit(&mod1_project(&g), n)?;
    let text = match format {
        Format::Text => verify_summary(&report),
        Format::Json => to_json(&report)?,
        Format::Csv => format!(
            "n,max_abs_error,worst_block,is_n_digit\n{},{},{},{}\n",
            report.n, report.max_abs_error, report.worst_block, report.is_n_digit
        ),
    };
    print(&text)?;
    if report.is_n_digit {
        Ok(())
    } else {
        Err(Failure::Threshold(format!(
            "not {n}-digit Benford: block {} is off by {:.3e}",
            report.worst_block, report.max_abs_error
        )))
    }
}

fn table(name: &str, n: usize, count: u64, seed: u64, format: Format) -> Outcome {
    let g = preset(name)?;
    let theoretical = full_digit_distribution(&mod1_project(&g), n)?;
    let draws = sample_y(&g, count as usize, seed)?;
    let empirical = empirical_digit_distribution(draws.values(), n)?;
    let max_dev = empirical.max_abs_diff(&theoretical)?;
    let text = match format {
        Format::Text => {
            let mut s = String::new();
            let _ = write!(s, "{:<12}", "d");
            for (v, _) in theoretical.iter() {
                let _ = write!(s, " {:>7}", theoretical.label(v));
            }
            for (label, dist) in [("Theoretical", &theoretical), ("Empirical", &empirical)] {
                let _ = write!(s, "\n{label:<12}");
                for (_, p) in dist.iter() {
                    let _ = write!(s, " {p:>7.4}");
                }
            }
            let _ = writeln!(s, "\n\npreset={name} count={count} seed={seed} max_abs_dev={max_dev:.6}");
            s
        }
        Format::Json => to_json(&json!({
            "preset": name,
            "n": n,
            "count": count,
            "seed": seed,
            "theoretical": theoretical,
            "empirical": empirical,
            "max_abs_dev": max_dev,
        }))?,
        Format::Csv => {
            let mut s = String::from("block,theoretical,empirical\n");
            for ((v, t), e) in theoretical.iter().zip(empirical.probabilities()) {
                let _ = writeln!(s, "{},{t},{e}", theoretical.label(v));
            }
            s
        }
    };
    print(&text)?;
    if max_dev > TABLE_TOLERANCE {
        return Err(Failure::Threshold(format!(
            "empirical row deviates from the theoretical row by {max_dev:.6} > {TABLE_TOLERANCE}"
        )));
    }
    Ok(())
}

fn sample(
    density: &DensityArg,
    count: u64,
    seed: u64,
    log: bool,
    out: Option<PathBuf>,
    format: SampleFormat,
) -> Outcome {
    let (g, source) = load_density(density)?;
    let set = if log { sample_x(&g, count as usize, seed)? } else { sample_y(&g, count as usize, seed)? };
    let set = set.with_source(source);
    let write = |w: &mut dyn Write| -> io::Result<()> {
        let mut w = BufWriter::new(w);
        match format {
            SampleFormat::Text => set.write_text(&mut w)?,
            SampleFormat::Csv => set.write_csv(&mut w)?,
        }
        w.flush()
    };
    match out {
        Some(path) => {
            let mut file = fs::File::create(&path).map_err(|source| Error::Io { path: path.clone(), source })?;
            write(&mut file).map_err(|source| Error::Io { path, source })?;
        }
        None => write(&mut io::stdout().lock()).map_err(stdout_error)?,
    }
    Ok(())
}

struct AnalyzeArgs {
    file: PathBuf,
    n: usize,
    column: Option<String>,
    skip_invalid: bool,
    bins: usize,
    hist_lo: f64,
    hist_hi: f64,
    histogram_out: Option<PathBuf>,
    format: Format,
}

fn analyze(a: AnalyzeArgs) -> Outcome {
    let selector = a.column.as_deref().map_or(ColumnSelector::First, ColumnSelector::parse);
    let ingest = ingest_dataset(&a.file, &selector)?;
    let first_rejected = ingest.nonpositive.iter().chain(&ingest.non_numeric).min_by_key(|r| r.line);
    if let Some(row) = first_rejected {
        if !a.skip_invalid {
            let reason = if ingest.nonpositive.iter().any(|r| r.line == row.line) {
                "is not positive"
            } else {
                "is not numeric"
            };
            return Err(Error::Data {
                row: row.line,
                message: format!("value '{}' {reason} (use --skip-invalid to exclude such rows)", row.text),
            }
            .into());
        }
        eprintln!(
            "excluded {} nonpositive and {} non-numeric rows",
            ingest.nonpositive.len(),
            ingest.non_numeric.len()
        );
    }
    let values = ingest.samples.values();
    let empirical = empirical_digit_distribution(values, a.n)?;
    let report = fit_report(&empirical, &DigitDistribution::benford(10, a.n)?)?;
    let hist = histogram(values, a.hist_lo, a.hist_hi, a.bins)?;
    if let Some(path) = &a.histogram_out {
        write_file(path, &hist.to_csv_string())?;
    }
    let text = match a.format {
        Format::Text => {
            let mut s = report.render_text();
            let _ = writeln!(s, "excluded     {}", ingest.excluded());
            let _ = writeln!(
                s,
                "histogram    {} bins on [{}, {}), {} below, {} above",
                a.bins, a.hist_lo, a.hist_hi, hist.below, hist.above
            );
            s
        }
        Format::Json => to_json(&json!({
            "rows_read": ingest.rows_read,
            "excluded": ingest.excluded(),
            "fit": report,
            "histogram": hist,
        }))?,
        Format::Csv => {
            let mut s = String::from("block,empirical,theoretical\n");
            for ((v, o), p) in report.empirical.iter().zip(report.theoretical.probabilities()) {
                let _ = writeln!(s, "{},{o},{p}", report.empirical.label(v));
            }
            s
        }
    };
    print(&text)?;
    Ok(())
}

fn default_scales() -> Vec<f64> {
    (0..DEFAULT_SCALE_STEPS).map(|i| 10f64.powf(i as f64 / DEFAULT_SCALE_STEPS as f64)).collect()
}

fn invariance(
    density: &DensityArg,
    scales: Option<Vec<f64>>,
    shifts: Option<Vec<f64>>,
    n: usize,
    format: Format,
) -> Outcome {
    let (g, _) = load_density(density)?;
    let report: InvarianceReport = match shifts {
        Some(shifts) => translation_invariance_report(&mod1_project(&g), &shifts, n)?,
        None => scale_invariance_report(&g, &scales.unwrap_or_else(default_scales), n)?,
    };
    let text = match format {
        Format::Text => report.render_text(),
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut s = format!("{},deviation\n", report.parameter_kind);
            for (p, d) in report.parameters.iter().zip(&report.deviations) {
                let _ = writeln!(s, "{p},{d}");
            }
            s
        }
    };
    print(&text)?;
    Ok(())
}

fn rebase(density: &DensityArg, base: u32, n: usize, format: Format) -> Outcome {
    let (g, _) = load_density(density)?;
    let dist = base_digit_distribution(&g, base, n)?;
    let benford = DigitDistribution::benford(base, n)?;
    let max_dev = dist.max_abs_diff(&benford)?;
    let text = match format {
        Format::Text => {
            let mut s = format!("{:>10}  {:>12}  {:>12}\n", "block", "probability", "benford");
            for ((v, p), b) in dist.iter().zip(benford.probabilities()) {
                let _ = writeln!(s, "{:>10}  {p:>12.6}  {b:>12.6}", dist.label(v));
            }
            let _ = writeln!(s, "\nbase={base} n={n} max_abs_dev={max_dev:.3e}");
            s
        }
        Format::Json => to_json(&json!({
            "base": base,
            "n": n,
            "distribution": dist,
            "benford": benford,
            "max_abs_dev": max_dev,
        }))?,
        Format::Csv => {
            let mut s = String::from("block,probability,benford\n");
            for ((v, p), b) in dist.iter().zip(benford.probabilities()) {
                let _ = writeln!(s, "{},{p},{b}", dist.label(v));
            }
            s
        }
    };
    print(&text)?;
    Ok(())
}
