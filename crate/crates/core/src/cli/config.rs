//! JSON run configuration in human units (km, ms, dB, km/s).
//!
//! Everything is converted to SI once, here. Out-of-range physical values
//! that are still meaningful produce warnings; broken invariants abort.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::allocation::TimeFrame;
use crate::channel::{ChannelParams, DEFAULT_OUTAGE_EPS};
use crate::geometry::{MediumSpeeds, OrbitConfig, PassWindow, DEFAULT_PASS_SAMPLES, EARTH_RADIUS_M, SPEED_OF_LIGHT_MPS};
use crate::optimizer::{DEFAULT_FRACTION_STEPS, DEFAULT_SPLIT_STEPS};
use crate::scenarios::{Scenario, ScenarioConfig, DEFAULT_CHUNK_BYTES, DEFAULT_MC_SAMPLES};

use super::ConfigError;

/// Operating bands considered typical for LEO links (GHz).
pub const FREQUENCY_BANDS_GHZ: [(f64, f64); 2] = [(1.0, 17.0), (27.0, 75.0)];
pub const POWER_BUDGET_RANGE_WH: (f64, f64) = (10.0, 50.0);

const SPEED_OF_LIGHT_KMS: f64 = SPEED_OF_LIGHT_MPS / 1000.0;

pub fn km_to_m(km: f64) -> f64 {
    km * 1000.0
}

pub fn m_to_km(m: f64) -> f64 {
    m / 1000.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ScenarioSelection {
    Named(String),
    List(Vec<String>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct DataSection {
    chunks: u64,
    #[serde(default = "default_chunk_bytes")]
    chunk_bytes: u64,
}

fn default_chunk_bytes() -> u64 {
    DEFAULT_CHUNK_BYTES
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct FrameSection {
    duration_ms: f64,
    #[serde(default = "default_slot_ms")]
    slot_ms: f64,
}

fn default_slot_ms() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpeedsSection {
    #[serde(default = "default_speed_kms")]
    terrestrial_kms: f64,
    #[serde(default = "default_speed_kms")]
    free_space_kms: f64,
}

fn default_speed_kms() -> f64 {
    SPEED_OF_LIGHT_KMS
}

impl Default for SpeedsSection {
    fn default() -> Self {
        Self {
            terrestrial_kms: SPEED_OF_LIGHT_KMS,
            free_space_kms: SPEED_OF_LIGHT_KMS,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct OrbitSection {
    altitude_km: f64,
    ground_speed_kms: f64,
    #[serde(default = "default_earth_radius_km")]
    earth_radius_km: f64,
}

fn default_earth_radius_km() -> f64 {
    m_to_km(EARTH_RADIUS_M)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelSection {
    #[serde(default)]
    noncentrality: f64,
    #[serde(default)]
    mean_gain_db: f64,
    #[serde(default = "default_noise")]
    noise_power: f64,
    #[serde(default = "default_eps")]
    outage_eps: f64,
    #[serde(default)]
    shadowing_sigma_db: Option<f64>,
    #[serde(default)]
    atmo_loss_db: f64,
    /// No fading: the gain is always the mean gain.
    #[serde(default)]
    line_of_sight: bool,
    /// Documentation only; checked against the usual LEO bands.
    #[serde(default)]
    frequency_ghz: Option<f64>,
}

fn default_noise() -> f64 {
    1.0
}

fn default_eps() -> f64 {
    DEFAULT_OUTAGE_EPS
}

impl ChannelSection {
    fn to_params(&self) -> ChannelParams {
        ChannelParams {
            noncentrality: if self.line_of_sight {
                f64::INFINITY
            } else {
                self.noncentrality
            },
            scale: 10f64.powf(self.mean_gain_db / 10.0),
            noise_power: self.noise_power,
            outage_eps: self.outage_eps,
            shadowing_sigma_db: self.shadowing_sigma_db,
            atmo_loss_db: self.atmo_loss_db,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SatelliteLinkSection {
    /// Central angle between satellite and ground station at t = 0.
    #[serde(default)]
    initial_angle_deg: Option<f64>,
    /// Contact window `[start, end]` in ms; defaults to the whole frame.
    #[serde(default)]
    pass_ms: Option<[f64; 2]>,
    channel: ChannelSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct TerrestrialSection {
    channel: ChannelSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelaySection {
    #[serde(default)]
    density_per_km: f64,
    #[serde(default)]
    power_cost: f64,
    #[serde(default)]
    processing_ms: f64,
}

impl Default for RelaySection {
    fn default() -> Self {
        Self {
            density_per_km: 0.0,
            power_cost: 0.0,
            processing_ms: 0.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    #[serde(default = "default_fraction_steps")]
    fraction_steps: usize,
    #[serde(default = "default_split_steps")]
    split_steps: usize,
    #[serde(default = "default_mc_samples")]
    mc_samples: usize,
    #[serde(default = "default_pass_samples")]
    pass_samples: usize,
}

fn default_fraction_steps() -> usize {
    DEFAULT_FRACTION_STEPS
}
fn default_split_steps() -> usize {
    DEFAULT_SPLIT_STEPS
}
fn default_mc_samples() -> usize {
    DEFAULT_MC_SAMPLES
}
fn default_pass_samples() -> usize {
    DEFAULT_PASS_SAMPLES
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            fraction_steps: DEFAULT_FRACTION_STEPS,
            split_steps: DEFAULT_SPLIT_STEPS,
            mc_samples: DEFAULT_MC_SAMPLES,
            pass_samples: DEFAULT_PASS_SAMPLES,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    scenarios: Option<ScenarioSelection>,
    #[serde(default)]
    seed: Option<u64>,
    data: DataSection,
    frame: FrameSection,
    caches: u64,
    distance_km: f64,
    #[serde(default)]
    speeds: SpeedsSection,
    orbit: OrbitSection,
    uplink: SatelliteLinkSection,
    downlink: SatelliteLinkSection,
    terrestrial: TerrestrialSection,
    #[serde(default)]
    relay: RelaySection,
    alpha: f64,
    #[serde(default)]
    storage_cost: f64,
    #[serde(default = "default_kappa")]
    kappa: f64,
    #[serde(default)]
    sweep: SweepSection,
    /// Energy available onboard (Wh); recorded and range-checked only.
    #[serde(default)]
    power_budget_wh: Option<f64>,
}

fn default_kappa() -> f64 {
    1.0
}

/// A validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenarios: Vec<Scenario>,
    pub scenario: ScenarioConfig,
    pub fraction_steps: usize,
    pub split_steps: usize,
    pub mc_samples: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// SHA-256 of the config file bytes.
    pub config_sha256: String,
    pub warnings: Vec<String>,
}

impl RunConfig {
    pub fn set_scenarios(&mut self, selection: &str) -> Result<(), ConfigError> {
        self.scenarios = parse_selection(&ScenarioSelection::Named(selection.to_string()))?;
        self.warnings = collect_run_warnings(&self.scenario, &self.scenarios, self.scenario.validate()?);
        Ok(())
    }
}

fn parse_selection(sel: &ScenarioSelection) -> Result<Vec<Scenario>, ConfigError> {
    let names = match sel {
        ScenarioSelection::Named(n) if n == "all" => return Ok(Scenario::ALL.to_vec()),
        ScenarioSelection::Named(n) => vec![n.clone()],
        ScenarioSelection::List(v) => v.clone(),
    };
    let mut out = names
        .iter()
        .map(|n| n.parse::<Scenario>().map_err(ConfigError::from))
        .collect::<Result<Vec<_>, _>>()?;
    out.sort();
    out.dedup();
    if out.is_empty() {
        return Err(ConfigError::Invalid("no scenario selected".into()));
    }
    Ok(out)
}

fn check_frequency(link: &str, ch: &ChannelSection, warnings: &mut Vec<String>) {
    if let Some(f) = ch.frequency_ghz {
        if !FREQUENCY_BANDS_GHZ.iter().any(|(lo, hi)| (*lo..=*hi).contains(&f)) {
            warnings.push(format!(
                "{link} frequency {f} GHz is outside the typical LEO bands [1, 17] and [27, 75] GHz"
            ));
        }
    }
}

fn store_forward_note(cfg: &ScenarioConfig) -> Option<String> {
    let travel_s = cfg.kappa * cfg.d_c_m / cfg.orbit_ul.ground_speed_mps;
    let travel_slots = (travel_s / cfg.frame.slot_duration_s).ceil();
    if travel_slots + 2.0 > cfg.frame.total_slots as f64 {
        Some(format!(
            "store_forward: satellite travel of {travel_s:.6} s does not fit the {:.6} s frame; \
             only the all-terrestrial point is feasible (reduce kappa or lengthen the frame)",
            cfg.frame.duration_s()
        ))
    } else {
        None
    }
}

fn collect_run_warnings(cfg: &ScenarioConfig, scenarios: &[Scenario], base: Vec<String>) -> Vec<String> {
    let mut warnings = base;
    if scenarios.contains(&Scenario::StoreForward) {
        warnings.extend(store_forward_note(cfg));
    }
    warnings
}

fn slots_in_frame(frame: &FrameSection) -> Result<TimeFrame, ConfigError> {
    if !(frame.slot_ms > 0.0) || !(frame.duration_ms > 0.0) {
        return Err(ConfigError::Invalid("frame duration and slot length must be positive".into()));
    }
    let ratio = frame.duration_ms / frame.slot_ms;
    let slots = ratio.round();
    if (ratio - slots).abs() > 1e-9 * ratio.max(1.0) || slots < 1.0 {
        return Err(ConfigError::Invalid(format!(
            "frame duration {} ms is not a whole number of {} ms slots",
            frame.duration_ms, frame.slot_ms
        )));
    }
    Ok(TimeFrame {
        total_slots: slots as u64,
        slot_duration_s: frame.slot_ms / 1000.0,
    })
}

fn pass_window(link: &SatelliteLinkSection, frame: &TimeFrame) -> PassWindow {
    match link.pass_ms {
        Some([a, b]) => PassWindow {
            t_start_s: a / 1000.0,
            t_end_s: b / 1000.0,
        },
        None => PassWindow {
            t_start_s: 0.0,
            t_end_s: frame.duration_s(),
        },
    }
}

fn build(raw: RawConfig, text: &str) -> Result<RunConfig, ConfigError> {
    let frame = slots_in_frame(&raw.frame)?;
    let d_c_m = km_to_m(raw.distance_km);
    let earth_radius_m = km_to_m(raw.orbit.earth_radius_km);
    let orbit = OrbitConfig {
        altitude_m: km_to_m(raw.orbit.altitude_km),
        earth_radius_m,
        ground_speed_mps: km_to_m(raw.orbit.ground_speed_kms),
        initial_angle_rad: 0.0,
    };
    let angle = |link: &SatelliteLinkSection, default_rad: f64| {
        link.initial_angle_deg.map_or(default_rad, f64::to_radians)
    };
    let orbit_ul = OrbitConfig {
        initial_angle_rad: angle(&raw.uplink, 0.0),
        ..orbit
    };
    // By default the caches sit d_C further along the ground track.
    let orbit_dl = OrbitConfig {
        initial_angle_rad: angle(&raw.downlink, d_c_m / earth_radius_m),
        ..orbit
    };

    let scenario = ScenarioConfig {
        data_chunks: raw.data.chunks,
        chunk_bytes: raw.data.chunk_bytes,
        frame,
        n_caches: raw.caches,
        d_c_m,
        speeds: MediumSpeeds {
            terrestrial_mps: km_to_m(raw.speeds.terrestrial_kms),
            free_space_mps: km_to_m(raw.speeds.free_space_kms),
        },
        orbit_ul,
        orbit_dl,
        pass_ul: pass_window(&raw.uplink, &frame),
        pass_dl: pass_window(&raw.downlink, &frame),
        ch_ul: raw.uplink.channel.to_params(),
        ch_dl: raw.downlink.channel.to_params(),
        ch_terr: raw.terrestrial.channel.to_params(),
        lambda_per_m: raw.relay.density_per_km / 1000.0,
        pi_relay: raw.relay.power_cost,
        alpha: raw.alpha,
        mu_storage: raw.storage_cost,
        kappa: raw.kappa,
        hop_processing_s: raw.relay.processing_ms / 1000.0,
        pass_samples: raw.sweep.pass_samples,
    };
    let mut warnings = scenario.validate()?;

    if raw.sweep.fraction_steps == 0 || raw.sweep.split_steps < 2 {
        return Err(ConfigError::Invalid(
            "sweep needs fraction_steps >= 1 and split_steps >= 2".into(),
        ));
    }
    check_frequency("uplink", &raw.uplink.channel, &mut warnings);
    check_frequency("downlink", &raw.downlink.channel, &mut warnings);
    check_frequency("terrestrial", &raw.terrestrial.channel, &mut warnings);
    if let Some(wh) = raw.power_budget_wh {
        let (lo, hi) = POWER_BUDGET_RANGE_WH;
        if wh < lo || wh > hi {
            warnings.push(format!(
                "power budget {wh} Wh is outside the typical [10, 50] Wh range"
            ));
        }
    }

    let scenarios = match &raw.scenarios {
        Some(sel) => parse_selection(sel)?,
        None => Scenario::ALL.to_vec(),
    };
    let warnings = collect_run_warnings(&scenario, &scenarios, warnings);

    Ok(RunConfig {
        scenarios,
        scenario,
        fraction_steps: raw.sweep.fraction_steps,
        split_steps: raw.sweep.split_steps,
        mc_samples: raw.sweep.mc_samples,
        seed: raw.seed.unwrap_or(0),
        out_dir: PathBuf::from("out"),
        config_sha256: hex::encode(Sha256::digest(text.as_bytes())),
        warnings,
    })
}

/// Parses and validates a configuration held in memory.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    build(raw, text)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}
