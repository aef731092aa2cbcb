use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use mmrx_core::chart::ChartDocument;
use mmrx_core::montecarlo::{run_sweep, Scenario};
use mmrx_core::tradeoff::uniform_alpha_grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl OutputFormat {
    /// `csv` for a `.csv` path, `json` otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => OutputFormat::Csv,
            _ => OutputFormat::Json,
        }
    }
}

/// Write `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("cannot create a temporary file in {}", dir.display()))?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// Apply command-line overrides to a scenario.
pub fn with_overrides(mut scenario: Scenario, seed: Option<u64>, trials: Option<u64>) -> Result<Scenario> {
    if let Some(seed) = seed {
        scenario.channel.seed = seed;
    }
    if let Some(trials) = trials {
        scenario.trials = trials;
    }
    scenario.validate()?;
    Ok(scenario)
}

pub fn evaluate(scenario: &Scenario) -> Result<ChartDocument> {
    let sweep = run_sweep(scenario)?;
    Ok(ChartDocument::from_sweep(scenario, &sweep))
}

pub fn render(doc: &ChartDocument, format: OutputFormat) -> Result<String> {
    Ok(match format {
        OutputFormat::Json => doc.to_canonical_json(),
        OutputFormat::Csv => doc.to_csv()?,
    })
}

/// `grid` for eleven evenly spaced weights, otherwise one number in `[0, 1]`.
pub fn parse_alphas(spec: &str) -> Result<Vec<f64>> {
    if spec.eq_ignore_ascii_case("grid") {
        return Ok(uniform_alpha_grid(11));
    }
    let mut out = Vec::new();
    for part in spec.split(',') {
        let a: f64 = part
            .trim()
            .parse()
            .with_context(|| format!("alpha {part:?} is not a number"))?;
        if !(0.0..=1.0).contains(&a) {
            bail!("alpha {a} is outside [0, 1]");
        }
        out.push(a);
    }
    Ok(out)
}

pub fn utility_table(doc: &ChartDocument, alphas: &[f64]) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "{:>6}  {:<6} {:>4} {:>4} {:>10} {:>12} {:>10}", "alpha", "scheme", "n_rf", "bits", "SE", "EE", "P_tot")?;
    writeln!(out, "{:>6}  {:<6} {:>4} {:>4} {:>10} {:>12} {:>10}", "", "", "", "", "bit/s/Hz", "Gbit/J", "W")?;
    for &a in alphas {
        let p = &doc.points[doc.select(a)?];
        writeln!(
            out,
            "{a:>6.2}  {:<6} {:>4} {:>4} {:>10.4} {:>12.4} {:>10.4}",
            format!("{:?}", p.scheme),
            p.n_rf,
            p.bits,
            p.se,
            p.ee / 1e9,
            p.p_tot
        )?;
    }
    Ok(out)
}

pub fn load_chart(path: &Path) -> Result<ChartDocument> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(ChartDocument::from_json_str(&text)?)
}
