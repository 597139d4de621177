//! Circular-orbit geometry over a spherical Earth.
//!
//! The satellite's sub-satellite point moves along a great circle through the
//! ground station at a constant ground speed. The central angle between the
//! two shrinks while the satellite approaches and turns negative once it has
//! passed overhead; slant range only depends on its magnitude.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Mean Earth radius (m).
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;
/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT_MPS: f64 = 299_792_458.0;
/// Typical LEO altitude band (m).
pub const LEO_ALTITUDE_RANGE_M: (f64, f64) = (500_000.0, 2_000_000.0);
/// Samples used by [`mean_pass_delay`] when the caller has no preference.
pub const DEFAULT_PASS_SAMPLES: usize = 1024;

/// Geometry of one LEO satellite relative to one ground station.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitConfig {
    pub altitude_m: f64,
    pub earth_radius_m: f64,
    /// Speed of the sub-satellite point over the ground.
    pub ground_speed_mps: f64,
    /// Central angle between the ground track and the station at t = 0.
    pub initial_angle_rad: f64,
}

impl OrbitConfig {
    pub fn new(altitude_m: f64, ground_speed_mps: f64, initial_angle_rad: f64) -> Self {
        Self {
            altitude_m,
            earth_radius_m: EARTH_RADIUS_M,
            ground_speed_mps,
            initial_angle_rad,
        }
    }

    /// Checks hard invariants and returns soft warnings for values outside
    /// the typical LEO altitude band.
    pub fn validate(&self) -> Result<Vec<String>> {
        if !(self.altitude_m > 0.0) {
            return Err(invalid(format!(
                "altitude must be positive, got {} m",
                self.altitude_m
            )));
        }
        if !(self.earth_radius_m > 0.0) {
            return Err(invalid("earth radius must be positive"));
        }
        if !(self.ground_speed_mps > 0.0) {
            return Err(invalid("ground speed must be positive"));
        }
        if !self.initial_angle_rad.is_finite() {
            return Err(invalid("initial angle must be finite"));
        }
        let mut warnings = Vec::new();
        let (lo, hi) = LEO_ALTITUDE_RANGE_M;
        if self.altitude_m < lo || self.altitude_m > hi {
            warnings.push(format!(
                "altitude {} km is outside the typical LEO range [500, 2000] km",
                self.altitude_m / 1000.0
            ));
        }
        Ok(warnings)
    }
}

/// A contact interval, in seconds from the start of slot 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PassWindow {
    pub t_start_s: f64,
    pub t_end_s: f64,
}

impl PassWindow {
    pub fn new(t_start_s: f64, t_end_s: f64) -> Result<Self> {
        let window = Self { t_start_s, t_end_s };
        window.validate()?;
        Ok(window)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end_s > self.t_start_s) || !self.t_start_s.is_finite() || !self.t_end_s.is_finite()
        {
            return Err(Error::DegeneratePassWindow {
                start_s: self.t_start_s,
                end_s: self.t_end_s,
            });
        }
        Ok(())
    }

    pub fn duration_s(&self) -> f64 {
        self.t_end_s - self.t_start_s
    }
}

/// Signal propagation speeds on the terrestrial and free-space paths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumSpeeds {
    /// Data center to edge-cache cluster medium.
    pub terrestrial_mps: f64,
    /// Free space.
    pub free_space_mps: f64,
}

impl Default for MediumSpeeds {
    fn default() -> Self {
        Self {
            terrestrial_mps: SPEED_OF_LIGHT_MPS,
            free_space_mps: SPEED_OF_LIGHT_MPS,
        }
    }
}

impl MediumSpeeds {
    pub fn validate(&self) -> Result<()> {
        let ok = self.terrestrial_mps > 0.0
            && self.terrestrial_mps <= self.free_space_mps
            && self.free_space_mps <= SPEED_OF_LIGHT_MPS;
        if !ok {
            return Err(invalid(format!(
                "medium speeds must satisfy 0 < terrestrial ({}) <= free space ({}) <= c",
                self.terrestrial_mps, self.free_space_mps
            )));
        }
        Ok(())
    }
}

/// Central angle between satellite and station after `t_s` seconds.
pub fn central_angle_at(orbit: &OrbitConfig, t_s: f64) -> f64 {
    orbit.initial_angle_rad - (orbit.ground_speed_mps / orbit.earth_radius_m) * t_s
}

/// Station-to-satellite distance for a given central angle (law of cosines).
pub fn slant_range(orbit: &OrbitConfig, central_angle_rad: f64) -> f64 {
    let re = orbit.earth_radius_m;
    let rs = re + orbit.altitude_m;
    let cos = central_angle_rad.cos();
    // (rs - re)^2 + 2 re rs (1 - cos) avoids cancellation near overhead.
    let sq = orbit.altitude_m * orbit.altitude_m + 2.0 * re * rs * (1.0 - cos);
    sq.max(0.0).sqrt()
}

pub fn prop_delay(distance_m: f64, speed_mps: f64) -> f64 {
    distance_m / speed_mps
}

/// Mean free-space propagation delay of one link over a pass window.
///
/// The window is split into `n_samples` equal cells and the delay is sampled
/// at each cell midpoint, which makes the result a composite midpoint-rule
/// estimate of the time-averaged delay.
pub fn mean_pass_delay(
    orbit: &OrbitConfig,
    window: &PassWindow,
    speeds: &MediumSpeeds,
    n_samples: usize,
) -> Result<f64> {
    window.validate()?;
    if n_samples < 2 {
        return Err(invalid("mean_pass_delay needs at least 2 samples"));
    }
    let step = window.duration_s() / n_samples as f64;
    let sum: f64 = (0..n_samples)
        .map(|i| {
            let t = window.t_start_s + (i as f64 + 0.5) * step;
            prop_delay(
                slant_range(orbit, central_angle_at(orbit, t)),
                speeds.free_space_mps,
            )
        })
        .sum();
    Ok(sum / n_samples as f64)
}

/// Number of relay satellites needed to haul content over `d_c_m` meters.
pub fn relay_count(lambda_per_m: f64, d_c_m: f64) -> u64 {
    (lambda_per_m * d_c_m).floor().max(0.0) as u64
}

/// Time for a store-and-forward satellite to cover `kappa * d_c_m`.
pub fn travel_time(d_c_m: f64, v_mps: f64, kappa: f64) -> f64 {
    kappa * d_c_m / v_mps
}
