use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::optimizer::{compare, fraction_grid, split_grid, sweep_prepared, ComparisonReport, SweepResult, SweepSpec};
use crate::scenarios::{PreparedScenario, Scenario};

use super::{RunConfig, RunError};

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const CSV_HEADER: &str =
    "scenario,fraction,split,feasible,p_ul,p_dl,p_relay,p_terr,p_storage,total_weighted,required_snr_db";

/// Formats a real like C's `%.12e` (`1.500000000000e+00`).
pub fn format_sci(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn opt(x: Option<f64>) -> String {
    x.map(format_sci).unwrap_or_default()
}

/// Writes one sweep as CSV; infeasible points keep their row with empty
/// numeric fields.
pub fn write_sweep_csv<W: Write>(mut out: W, result: &SweepResult) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for p in &result.points {
        let b = p.breakdown;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            result.scenario,
            format_sci(p.fraction),
            opt(p.split_used),
            p.feasible(),
            opt(b.map(|b| b.p_ul)),
            opt(b.map(|b| b.p_dl)),
            opt(b.map(|b| b.p_relay)),
            opt(b.map(|b| b.p_terr)),
            opt(b.map(|b| b.p_storage)),
            opt(b.map(|b| b.total_weighted)),
            opt(p.required_snr_db),
        )?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'a str,
    version: &'a str,
    seed: u64,
    config_sha256: &'a str,
    scenarios: Vec<&'a str>,
    fraction_steps: usize,
    split_steps: usize,
    mc_samples: usize,
    outputs: Vec<String>,
}

#[derive(Debug)]
pub struct RunArtifacts {
    pub results: Vec<SweepResult>,
    pub report: ComparisonReport,
    pub csv_paths: Vec<PathBuf>,
    pub report_path: PathBuf,
    pub manifest_path: PathBuf,
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    fs::write(path, bytes).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Sweeps every selected scenario and writes CSVs, the comparison report,
/// and the run manifest into `cfg.out_dir`.
pub fn run(cfg: &RunConfig) -> Result<RunArtifacts, RunError> {
    let prep = PreparedScenario::new(&cfg.scenario, cfg.mc_samples, cfg.seed)?;
    fs::create_dir_all(&cfg.out_dir).map_err(|source| RunError::Io {
        path: cfg.out_dir.clone(),
        source,
    })?;

    let mut results = Vec::with_capacity(cfg.scenarios.len());
    let mut csv_paths = Vec::with_capacity(cfg.scenarios.len());
    for &scenario in &cfg.scenarios {
        let spec = SweepSpec {
            scenario,
            fraction_grid: fraction_grid(cfg.fraction_steps),
            split_grid: split_grid(cfg.split_steps),
            mc_samples: cfg.mc_samples,
            seed: cfg.seed,
        };
        let result = sweep_prepared(&prep, &spec).map_err(|source| RunError::Scenario { scenario, source })?;
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &result).expect("writing to memory");
        let path = cfg.out_dir.join(format!("sweep_{scenario}.csv"));
        write_file(&path, &buf)?;
        csv_paths.push(path);
        results.push(result);
    }

    let report = compare(&results)?;
    let report_path = cfg.out_dir.join("report.txt");
    write_file(&report_path, format!("{report}\n").as_bytes())?;

    let manifest = Manifest {
        tool: TOOL_NAME,
        version: TOOL_VERSION,
        seed: cfg.seed,
        config_sha256: &cfg.config_sha256,
        scenarios: cfg.scenarios.iter().map(Scenario::as_str).collect(),
        fraction_steps: cfg.fraction_steps,
        split_steps: cfg.split_steps,
        mc_samples: cfg.mc_samples,
        outputs: csv_paths
            .iter()
            .chain([&report_path])
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect(),
    };
    let manifest_path = cfg.out_dir.join("manifest.json");
    let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    json.push('\n');
    write_file(&manifest_path, json.as_bytes())?;

    Ok(RunArtifacts {
        results,
        report,
        csv_paths,
        report_path,
        manifest_path,
    })
}
