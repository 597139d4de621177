//! Weighted power cost of the terrestrial baseline and the three satellite
//! delivery architectures.
//!
//! Every architecture sends `B_s` units over the satellite path and the
//! remaining `B - B_s` over terrestrial unicast to each of the `N` caches.
//! Satellite-side costs (uplink, downlink, relays, storage) carry weight
//! `alpha`; the data center's terrestrial cost carries `1 - alpha`.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::allocation::{
    baseline_deadline, scenario1_deadline, scenario2_segments, scenario3_segments, uniform_rate,
    Segmentation, TimeFrame,
};
use crate::channel::{design_gain, required_power, ChannelParams};
use crate::error::{invalid, Result};
use crate::geometry::{
    mean_pass_delay, relay_count, travel_time, MediumSpeeds, OrbitConfig, PassWindow,
    DEFAULT_PASS_SAMPLES, EARTH_RADIUS_M,
};

pub const DEFAULT_CHUNK_BYTES: u64 = 1400;
pub const DEFAULT_MC_SAMPLES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Baseline,
    ImmediateForward,
    RelayForward,
    StoreForward,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::Baseline,
        Scenario::ImmediateForward,
        Scenario::RelayForward,
        Scenario::StoreForward,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::Baseline => "baseline",
            Scenario::ImmediateForward => "immediate_forward",
            Scenario::RelayForward => "relay_forward",
            Scenario::StoreForward => "store_forward",
        }
    }

    pub fn uses_split(&self) -> bool {
        matches!(self, Scenario::RelayForward | Scenario::StoreForward)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Scenario {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.as_str() == s)
            .ok_or_else(|| invalid(format!("unknown scenario '{s}'")))
    }
}

/// One problem instance, in SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub data_chunks: u64,
    pub chunk_bytes: u64,
    pub frame: TimeFrame,
    pub n_caches: u64,
    /// Ground distance between the data center and the cache cluster.
    pub d_c_m: f64,
    pub speeds: MediumSpeeds,
    pub orbit_ul: OrbitConfig,
    pub orbit_dl: OrbitConfig,
    pub pass_ul: PassWindow,
    pub pass_dl: PassWindow,
    pub ch_ul: ChannelParams,
    pub ch_dl: ChannelParams,
    pub ch_terr: ChannelParams,
    /// Relay satellites per meter of ground distance.
    pub lambda_per_m: f64,
    /// Power cost per relay satellite.
    pub pi_relay: f64,
    pub alpha: f64,
    /// Power-equivalent cost per chunk held onboard for one slot.
    pub mu_storage: f64,
    /// Store-and-forward travel distance as a multiple of `d_c_m`.
    pub kappa: f64,
    /// Processing latency added to each inter-satellite hop.
    pub hop_processing_s: f64,
    pub pass_samples: usize,
}

impl ScenarioConfig {
    /// 1200 km orbit, two caches 60 km from the data center, 400 chunks in a
    /// 200 ms frame, five relays, 10 km/s ground speed, and identical
    /// Rician links (noncentrality 10, unit mean gain) everywhere.
    pub fn reference() -> Self {
        let d_c_m = 60_000.0;
        let orbit_ul = OrbitConfig::new(1_200_000.0, 10_000.0, 0.0);
        let orbit_dl = OrbitConfig {
            initial_angle_rad: d_c_m / EARTH_RADIUS_M,
            ..orbit_ul
        };
        let frame = TimeFrame {
            total_slots: 200,
            slot_duration_s: 1e-3,
        };
        let pass = PassWindow {
            t_start_s: 0.0,
            t_end_s: frame.duration_s(),
        };
        let link = ChannelParams::rician(10.0, 1.0);
        Self {
            data_chunks: 400,
            chunk_bytes: DEFAULT_CHUNK_BYTES,
            frame,
            n_caches: 2,
            d_c_m,
            speeds: MediumSpeeds::default(),
            orbit_ul,
            orbit_dl,
            pass_ul: pass,
            pass_dl: pass,
            ch_ul: link,
            ch_dl: link,
            ch_terr: link,
            // 0.0834 relays per km: five over 60 km.
            lambda_per_m: 0.0834 / 1000.0,
            pi_relay: 1.0,
            alpha: 0.5,
            mu_storage: 0.01,
            kappa: 1.0,
            hop_processing_s: 0.0,
            pass_samples: DEFAULT_PASS_SAMPLES,
        }
    }

    /// Checks hard invariants; returns soft warnings from the nested types.
    pub fn validate(&self) -> Result<Vec<String>> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(invalid(format!("alpha must lie in [0, 1], got {}", self.alpha)));
        }
        if self.n_caches == 0 {
            return Err(invalid("at least one edge cache is required"));
        }
        for (name, v) in [
            ("pi_relay", self.pi_relay),
            ("mu_storage", self.mu_storage),
            ("lambda", self.lambda_per_m),
            ("d_C", self.d_c_m),
            ("hop processing time", self.hop_processing_s),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(format!("{name} must be non-negative, got {v}")));
            }
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(invalid(format!("kappa must be positive, got {}", self.kappa)));
        }
        if self.pass_samples < 2 {
            return Err(invalid("pass_samples must be at least 2"));
        }
        self.frame.validate()?;
        self.speeds.validate()?;
        self.pass_ul.validate()?;
        self.pass_dl.validate()?;
        let mut warnings = Vec::new();
        for (name, orbit) in [("uplink", &self.orbit_ul), ("downlink", &self.orbit_dl)] {
            warnings.extend(orbit.validate()?.into_iter().map(|w| format!("{name} orbit: {w}")));
        }
        for (name, ch) in [
            ("uplink", &self.ch_ul),
            ("downlink", &self.ch_dl),
            ("terrestrial", &self.ch_terr),
        ] {
            warnings.extend(ch.validate()?.into_iter().map(|w| format!("{name} channel: {w}")));
        }
        Ok(warnings)
    }
}

/// Per-component power costs and their weighted total.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PowerBreakdown {
    pub p_ul: f64,
    pub p_dl: f64,
    pub p_relay: f64,
    pub p_terr: f64,
    pub p_storage: f64,
    pub total_weighted: f64,
}

impl PowerBreakdown {
    pub fn new(p_ul: f64, p_dl: f64, p_relay: f64, p_terr: f64, p_storage: f64, alpha: f64) -> Self {
        Self {
            p_ul,
            p_dl,
            p_relay,
            p_terr,
            p_storage,
            total_weighted: weighted_total(p_ul, p_dl, p_relay, p_terr, p_storage, alpha),
        }
    }

    pub fn satellite_total(&self) -> f64 {
        self.p_ul + self.p_dl + self.p_relay + self.p_storage
    }
}

pub fn weighted_total(p_ul: f64, p_dl: f64, p_relay: f64, p_terr: f64, p_storage: f64, alpha: f64) -> f64 {
    alpha * (p_ul + p_dl + p_relay + p_storage) + (1.0 - alpha) * p_terr
}

/// Cost of one operating point plus what the sweep reports about it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub breakdown: PowerBreakdown,
    pub segmentation: Option<Segmentation>,
    /// Largest per-slot transmit SNR (linear) over the active links; zero
    /// when nothing is sent.
    pub peak_snr: f64,
}

/// Link budget of one active transmitter.
struct Leg {
    energy: f64,
    snr: f64,
}

/// A [`ScenarioConfig`] with its design gains and pass delays resolved.
///
/// Resolving once lets a sweep evaluate thousands of points without
/// recomputing quantiles or pass averages.
#[derive(Debug, Clone)]
pub struct PreparedScenario {
    cfg: ScenarioConfig,
    gain_ul: f64,
    gain_dl: f64,
    gain_terr: f64,
    mean_ul_delay_s: f64,
    mean_dl_delay_s: f64,
    relays: u64,
    per_hop_delay_s: f64,
    travel_time_s: f64,
}

impl PreparedScenario {
    /// Shadowed links draw their design gain from `mc_samples` Monte Carlo
    /// samples on a generator seeded with `seed` (one stream per link).
    pub fn new(cfg: &ScenarioConfig, mc_samples: usize, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let gain = |ch: &ChannelParams, stream: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            design_gain(ch, mc_samples, &mut rng)
        };
        let relays = relay_count(cfg.lambda_per_m, cfg.d_c_m);
        let per_hop_delay_s = if cfg.lambda_per_m > 0.0 {
            (1.0 / cfg.lambda_per_m) / cfg.speeds.free_space_mps + cfg.hop_processing_s
        } else {
            cfg.hop_processing_s
        };
        Ok(Self {
            gain_ul: gain(&cfg.ch_ul, 0)?,
            gain_dl: gain(&cfg.ch_dl, 1)?,
            gain_terr: gain(&cfg.ch_terr, 2)?,
            mean_ul_delay_s: mean_pass_delay(&cfg.orbit_ul, &cfg.pass_ul, &cfg.speeds, cfg.pass_samples)?,
            mean_dl_delay_s: mean_pass_delay(&cfg.orbit_dl, &cfg.pass_dl, &cfg.speeds, cfg.pass_samples)?,
            relays,
            per_hop_delay_s,
            travel_time_s: travel_time(cfg.d_c_m, cfg.orbit_ul.ground_speed_mps, cfg.kappa),
            cfg: cfg.clone(),
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    pub fn data_units(&self) -> f64 {
        self.cfg.data_chunks as f64
    }

    pub fn design_gains(&self) -> (f64, f64, f64) {
        (self.gain_ul, self.gain_dl, self.gain_terr)
    }

    pub fn mean_delays_s(&self) -> (f64, f64) {
        (self.mean_ul_delay_s, self.mean_dl_delay_s)
    }

    pub fn relays(&self) -> u64 {
        self.relays
    }

    pub fn per_hop_delay_s(&self) -> f64 {
        self.per_hop_delay_s
    }

    pub fn travel_time_s(&self) -> f64 {
        self.travel_time_s
    }

    fn leg(&self, data: f64, slots: u64, gain: f64, noise: f64) -> Result<Leg> {
        let rate = uniform_rate(data, slots)?;
        let per_slot = required_power(rate, gain, noise)?;
        Ok(Leg {
            energy: slots as f64 * per_slot,
            snr: per_slot / noise,
        })
    }

    /// Terrestrial unicast of `data` units to every cache.
    fn terrestrial(&self, data: f64) -> Result<Leg> {
        if data == 0.0 {
            return Ok(Leg { energy: 0.0, snr: 0.0 });
        }
        let cfg = &self.cfg;
        let window = baseline_deadline(&cfg.frame, cfg.n_caches, cfg.d_c_m, cfg.speeds.terrestrial_mps)?;
        let leg = self.leg(data, window, self.gain_terr, cfg.ch_terr.noise_power)?;
        Ok(Leg {
            energy: cfg.n_caches as f64 * leg.energy,
            snr: leg.snr,
        })
    }

    fn check_split_amount(&self, b_s: f64) -> Result<()> {
        if !(b_s >= 0.0 && b_s <= self.data_units()) {
            return Err(invalid(format!(
                "satellite share {b_s} must lie in [0, {}]",
                self.data_units()
            )));
        }
        Ok(())
    }

    pub fn baseline(&self, data: f64) -> Result<Evaluation> {
        if !(data >= 0.0) {
            return Err(invalid(format!("data amount must be non-negative, got {data}")));
        }
        let terr = self.terrestrial(data)?;
        Ok(Evaluation {
            breakdown: PowerBreakdown::new(0.0, 0.0, 0.0, terr.energy, 0.0, self.cfg.alpha),
            segmentation: None,
            peak_snr: terr.snr,
        })
    }

    /// Combines satellite legs with the terrestrial residual.
    fn combine(
        &self,
        b_s: f64,
        up: Leg,
        down: Leg,
        p_relay: f64,
        p_storage: f64,
        segmentation: Option<Segmentation>,
    ) -> Result<Evaluation> {
        let terr = self.terrestrial(self.data_units() - b_s)?;
        Ok(Evaluation {
            breakdown: PowerBreakdown::new(up.energy, down.energy, p_relay, terr.energy, p_storage, self.cfg.alpha),
            segmentation,
            peak_snr: up.snr.max(down.snr).max(terr.snr),
        })
    }

    pub fn immediate_forward(&self, b_s: f64) -> Result<Evaluation> {
        self.check_split_amount(b_s)?;
        if b_s == 0.0 {
            return self.baseline(self.data_units());
        }
        let cfg = &self.cfg;
        let slots = scenario1_deadline(&cfg.frame, self.mean_ul_delay_s, self.mean_dl_delay_s)?;
        let up = self.leg(b_s, slots, self.gain_ul, cfg.ch_ul.noise_power)?;
        // One multicast downlink serves every cache.
        let down = self.leg(b_s, slots, self.gain_dl, cfg.ch_dl.noise_power)?;
        self.combine(b_s, up, down, 0.0, 0.0, None)
    }

    pub fn relay_forward(&self, b_s: f64, split: f64) -> Result<Evaluation> {
        self.check_split_amount(b_s)?;
        if b_s == 0.0 {
            return self.baseline(self.data_units());
        }
        let cfg = &self.cfg;
        let seg = scenario2_segments(
            &cfg.frame,
            self.mean_ul_delay_s,
            self.per_hop_delay_s,
            self.relays,
            self.mean_dl_delay_s,
            split,
        )?;
        let up = self.leg(b_s, seg.upload_slots, self.gain_ul, cfg.ch_ul.noise_power)?;
        let down = self.leg(b_s, seg.download_slots, self.gain_dl, cfg.ch_dl.noise_power)?;
        let p_relay = self.relays as f64 * cfg.pi_relay;
        self.combine(b_s, up, down, p_relay, 0.0, Some(seg))
    }

    pub fn store_forward(&self, b_s: f64, split: f64) -> Result<Evaluation> {
        self.check_split_amount(b_s)?;
        if b_s == 0.0 {
            return self.baseline(self.data_units());
        }
        let cfg = &self.cfg;
        let seg = scenario3_segments(
            &cfg.frame,
            self.mean_ul_delay_s,
            self.mean_dl_delay_s,
            self.travel_time_s,
            split,
        )?;
        let up = self.leg(b_s, seg.upload_slots, self.gain_ul, cfg.ch_ul.noise_power)?;
        let down = self.leg(b_s, seg.download_slots, self.gain_dl, cfg.ch_dl.noise_power)?;
        // Chunks sit onboard from the end of upload until broadcast ends.
        let held_slots = (seg.travel_slots + seg.download_slots) as f64;
        let p_storage = cfg.mu_storage * b_s * held_slots;
        self.combine(b_s, up, down, 0.0, p_storage, Some(seg))
    }

    /// Dispatches on `scenario`; `split` is ignored where it does not apply.
    pub fn evaluate(&self, scenario: Scenario, b_s: f64, split: f64) -> Result<Evaluation> {
        match scenario {
            Scenario::Baseline => self.baseline(self.data_units()),
            Scenario::ImmediateForward => self.immediate_forward(b_s),
            Scenario::RelayForward => self.relay_forward(b_s, split),
            Scenario::StoreForward => self.store_forward(b_s, split),
        }
    }
}

fn prepare(cfg: &ScenarioConfig) -> Result<PreparedScenario> {
    PreparedScenario::new(cfg, DEFAULT_MC_SAMPLES, 0)
}

/// Terrestrial unicast of `data` units to each of the `N` caches.
pub fn baseline_cost(cfg: &ScenarioConfig, data: f64) -> Result<PowerBreakdown> {
    Ok(prepare(cfg)?.baseline(data)?.breakdown)
}

/// Immediate forward: one satellite receives and multicasts `b_s` units
/// within the frame left after the mean uplink and downlink delays.
pub fn scenario1_cost(cfg: &ScenarioConfig, b_s: f64) -> Result<PowerBreakdown> {
    Ok(prepare(cfg)?.immediate_forward(b_s)?.breakdown)
}

/// Relay and forward: upload, haul across `floor(lambda * d_C)` relays,
/// then multicast.
pub fn scenario2_cost(cfg: &ScenarioConfig, b_s: f64, split: f64) -> Result<PowerBreakdown> {
    Ok(prepare(cfg)?.relay_forward(b_s, split)?.breakdown)
}

/// Store and forward: upload, carry the data onboard, then multicast.
pub fn scenario3_cost(cfg: &ScenarioConfig, b_s: f64, split: f64) -> Result<PowerBreakdown> {
    Ok(prepare(cfg)?.store_forward(b_s, split)?.breakdown)
}
