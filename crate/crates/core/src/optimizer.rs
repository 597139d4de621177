//! Grid search over the satellite share of the data (and, for the
//! relay and store architectures, over the upload/download time split).

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scenarios::{PowerBreakdown, PreparedScenario, Scenario, ScenarioConfig, DEFAULT_MC_SAMPLES};

pub const DEFAULT_FRACTION_STEPS: usize = 100;
pub const DEFAULT_SPLIT_STEPS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub scenario: Scenario,
    /// Satellite shares of the data, ascending within [0, 1].
    pub fraction_grid: Vec<f64>,
    /// Upload shares of the usable slots, ascending within (0, 1).
    pub split_grid: Vec<f64>,
    pub mc_samples: usize,
    pub seed: u64,
}

/// `0, 1/steps, ..., 1`.
pub fn fraction_grid(steps: usize) -> Vec<f64> {
    (0..=steps).map(|i| i as f64 / steps as f64).collect()
}

/// `1/steps, ..., (steps-1)/steps`.
pub fn split_grid(steps: usize) -> Vec<f64> {
    (1..steps).map(|i| i as f64 / steps as f64).collect()
}

impl SweepSpec {
    pub fn new(scenario: Scenario) -> Self {
        Self {
            scenario,
            fraction_grid: fraction_grid(DEFAULT_FRACTION_STEPS),
            split_grid: split_grid(DEFAULT_SPLIT_STEPS),
            mc_samples: DEFAULT_MC_SAMPLES,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let sorted = |g: &[f64]| g.windows(2).all(|w| w[0] < w[1]);
        if self.fraction_grid.is_empty() || !sorted(&self.fraction_grid) {
            return Err(invalid("fraction grid must be non-empty and strictly ascending"));
        }
        if self.fraction_grid.iter().any(|f| !(0.0..=1.0).contains(f)) {
            return Err(invalid("fractions must lie in [0, 1]"));
        }
        if self.split_grid.is_empty() || !sorted(&self.split_grid) {
            return Err(invalid("split grid must be non-empty and strictly ascending"));
        }
        if self.split_grid.iter().any(|s| !(*s > 0.0 && *s < 1.0)) {
            return Err(invalid("splits must lie in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub fraction: f64,
    /// Data units sent over the satellite path, `round(fraction * B)`.
    pub satellite_units: f64,
    pub split_used: Option<f64>,
    pub breakdown: Option<PowerBreakdown>,
    pub required_snr_db: Option<f64>,
    /// Why no split made this point feasible.
    pub infeasible_reason: Option<String>,
}

impl SweepPoint {
    pub fn feasible(&self) -> bool {
        self.breakdown.is_some()
    }

    pub fn total(&self) -> Option<f64> {
        self.breakdown.map(|b| b.total_weighted)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub scenario: Scenario,
    pub points: Vec<SweepPoint>,
    pub argmin_fraction: f64,
    pub argmin_split: Option<f64>,
    pub argmin_total: f64,
    /// Weighted total of pure terrestrial delivery; `None` if that is infeasible.
    pub baseline_total: Option<f64>,
}

fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

fn evaluate_point(prep: &PreparedScenario, scenario: Scenario, fraction: f64, splits: &[f64]) -> SweepPoint {
    let b_s = (fraction * prep.data_units()).round();
    let mut best: Option<(Option<f64>, crate::scenarios::Evaluation)> = None;
    let mut reason = None;
    let candidates: Vec<Option<f64>> = if scenario.uses_split() && b_s > 0.0 {
        splits.iter().copied().map(Some).collect()
    } else {
        vec![None]
    };
    for split in candidates {
        match prep.evaluate(scenario, b_s, split.unwrap_or(0.5)) {
            Ok(eval) => {
                let better = best
                    .as_ref()
                    .is_none_or(|(_, b)| eval.breakdown.total_weighted < b.breakdown.total_weighted);
                if better {
                    best = Some((split, eval));
                }
            }
            Err(e) => reason = Some(e.to_string()),
        }
    }
    match best {
        Some((split, eval)) => SweepPoint {
            fraction,
            satellite_units: b_s,
            split_used: split,
            breakdown: Some(eval.breakdown),
            required_snr_db: Some(to_db(eval.peak_snr)),
            infeasible_reason: None,
        },
        None => SweepPoint {
            fraction,
            satellite_units: b_s,
            split_used: None,
            breakdown: None,
            required_snr_db: None,
            infeasible_reason: reason,
        },
    }
}

/// Cheapest feasible point; the first one in grid order wins ties.
fn argmin_point(points: &[SweepPoint]) -> Option<&SweepPoint> {
    let mut best: Option<&SweepPoint> = None;
    for p in points.iter().filter(|p| p.feasible()) {
        if best.is_none_or(|b| p.total() < b.total()) {
            best = Some(p);
        }
    }
    best
}

/// Sweeps an already-resolved scenario.
pub fn sweep_prepared(prep: &PreparedScenario, spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let fractions: &[f64] = if spec.scenario == Scenario::Baseline {
        &[0.0]
    } else {
        &spec.fraction_grid
    };
    let points: Vec<SweepPoint> = fractions
        .par_iter()
        .map(|&f| evaluate_point(prep, spec.scenario, f, &spec.split_grid))
        .collect();

    let argmin = argmin_point(&points).ok_or(Error::NoFeasiblePoint)?;
    let baseline_total = prep
        .baseline(prep.data_units())
        .ok()
        .map(|e| e.breakdown.total_weighted);
    Ok(SweepResult {
        scenario: spec.scenario,
        argmin_fraction: argmin.fraction,
        argmin_split: argmin.split_used,
        argmin_total: argmin.total().unwrap_or(f64::NAN),
        baseline_total,
        points,
    })
}

pub fn sweep(cfg: &ScenarioConfig, spec: &SweepSpec) -> Result<SweepResult> {
    let prep = PreparedScenario::new(cfg, spec.mc_samples, spec.seed)?;
    sweep_prepared(&prep, spec)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub scenario: Scenario,
    pub argmin_fraction: f64,
    pub argmin_split: Option<f64>,
    pub argmin_total: f64,
    /// `10 log10(argmin_total / baseline_total)`; negative means savings.
    pub delta_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub best: Scenario,
}

fn delta_db(total: f64, baseline: f64) -> f64 {
    if total == baseline {
        0.0
    } else {
        to_db(total / baseline)
    }
}

/// Tabulates sweep minima in scenario order and names the cheapest.
/// Ties go to the scenario listed first (the baseline before any satellite
/// architecture).
pub fn compare(results: &[SweepResult]) -> Result<ComparisonReport> {
    let mut rows: Vec<ComparisonRow> = results
        .iter()
        .map(|r| ComparisonRow {
            scenario: r.scenario,
            argmin_fraction: r.argmin_fraction,
            argmin_split: r.argmin_split,
            argmin_total: r.argmin_total,
            delta_db: r.baseline_total.map(|b| delta_db(r.argmin_total, b)),
        })
        .collect();
    rows.sort_by_key(|r| r.scenario);
    let best = rows
        .iter()
        .reduce(|a, b| if b.argmin_total < a.argmin_total { b } else { a })
        .ok_or_else(|| invalid("nothing to compare"))?
        .scenario;
    Ok(ComparisonReport { rows, best })
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<18} {:>9} {:>6} {:>20} {:>12}",
            "scenario", "fraction", "split", "min_total", "vs_baseline"
        )?;
        for r in &self.rows {
            let split = r.argmin_split.map_or("-".to_string(), |s| format!("{s:.2}"));
            let delta = r.delta_db.map_or("n/a".to_string(), |d| format!("{d:+.3} dB"));
            writeln!(
                f,
                "{:<18} {:>9.2} {:>6} {:>20.6e} {:>12}",
                r.scenario.as_str(),
                r.argmin_fraction,
                split,
                r.argmin_total,
                delta
            )?;
        }
        write!(f, "best: {}", self.best)
    }
}
