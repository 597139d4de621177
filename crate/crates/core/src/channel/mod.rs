//! Rician fading links and Shannon rate inversion.
//!
//! A link's linear power gain is `scale * X / (2 + noncentrality)` with `X`
//! non-central chi-squared (two degrees of freedom), so the mean gain equals
//! `scale`. Transmit power is sized to the outage quantile of that gain: the
//! target rate is met in at least `1 - outage_eps` of channel states.

mod ncx2;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub use ncx2::{ncx2_cdf, MAX_TERMS, TERM_CUTOFF};

pub const DEFAULT_OUTAGE_EPS: f64 = 0.05;
/// Typical large-scale fading spread (dB).
pub const SHADOWING_SIGMA_RANGE_DB: (f64, f64) = (5.0, 20.0);
/// Typical atmospheric loss band (dB); the hard limit is [0, 40].
pub const ATMO_LOSS_RANGE_DB: (f64, f64) = (5.0, 40.0);
/// Bisection iterations allowed in [`gain_quantile`].
pub const QUANTILE_MAX_ITERATIONS: usize = 400;
/// Accuracy required of `cdf(quantile(eps))`.
pub const QUANTILE_TOLERANCE: f64 = 1e-9;

/// Fading law, noise, and outage target of one link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Non-centrality of the chi-squared law; `f64::INFINITY` removes fading.
    pub noncentrality: f64,
    /// Mean linear power gain.
    pub scale: f64,
    pub noise_power: f64,
    pub outage_eps: f64,
    /// Log-normal shadowing spread in dB, applied only to Monte Carlo draws.
    pub shadowing_sigma_db: Option<f64>,
    pub atmo_loss_db: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            noncentrality: 0.0,
            scale: 1.0,
            noise_power: 1.0,
            outage_eps: DEFAULT_OUTAGE_EPS,
            shadowing_sigma_db: None,
            atmo_loss_db: 0.0,
        }
    }
}

impl ChannelParams {
    pub fn rician(noncentrality: f64, scale: f64) -> Self {
        Self {
            noncentrality,
            scale,
            ..Self::default()
        }
    }

    /// A link whose gain is always `scale`.
    pub fn line_of_sight(scale: f64) -> Self {
        Self::rician(f64::INFINITY, scale)
    }

    /// Rician K-factor (line-of-sight to scattered power ratio).
    pub fn k_factor(&self) -> f64 {
        self.noncentrality / 2.0
    }

    pub fn from_k_factor(k: f64, scale: f64) -> Self {
        Self::rician(2.0 * k, scale)
    }

    pub fn is_deterministic(&self) -> bool {
        self.noncentrality.is_infinite()
    }

    /// Linear factor applied for atmospheric loss.
    pub fn atmo_factor(&self) -> f64 {
        10f64.powf(-self.atmo_loss_db / 10.0)
    }

    /// Maps a raw chi-squared variate onto the link gain (without shadowing).
    fn gain_per_unit(&self) -> f64 {
        self.scale / (2.0 + self.noncentrality) * self.atmo_factor()
    }

    pub fn validate(&self) -> Result<Vec<String>> {
        if !(self.noncentrality >= 0.0) {
            return Err(invalid("noncentrality must be non-negative"));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(invalid("mean gain must be positive and finite"));
        }
        if !(self.noise_power > 0.0 && self.noise_power.is_finite()) {
            return Err(invalid("noise power must be positive"));
        }
        if !(self.outage_eps > 0.0 && self.outage_eps <= 0.5) {
            return Err(invalid(format!(
                "outage probability must lie in (0, 0.5], got {}",
                self.outage_eps
            )));
        }
        if !(0.0..=40.0).contains(&self.atmo_loss_db) {
            return Err(invalid(format!(
                "atmospheric loss must lie in [0, 40] dB, got {}",
                self.atmo_loss_db
            )));
        }
        let mut warnings = Vec::new();
        if self.atmo_loss_db > 0.0 && self.atmo_loss_db < ATMO_LOSS_RANGE_DB.0 {
            warnings.push(format!(
                "atmospheric loss {} dB is below the typical [5, 40] dB band",
                self.atmo_loss_db
            ));
        }
        if let Some(sigma) = self.shadowing_sigma_db {
            if !(sigma >= 0.0 && sigma.is_finite()) {
                return Err(invalid("shadowing spread must be non-negative"));
            }
            let (lo, hi) = SHADOWING_SIGMA_RANGE_DB;
            if sigma < lo || sigma > hi {
                warnings.push(format!(
                    "shadowing spread {sigma} dB is outside the typical [5, 20] dB range"
                ));
            }
        }
        Ok(warnings)
    }
}

/// One draw of a link's linear power gain.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct GainSample {
    pub value: f64,
}

/// Gain `g` with `P[gain <= g] = eps`, found by bisection on [`ncx2_cdf`].
///
/// Shadowing is not part of this law; see [`design_gain`]. A line-of-sight
/// link returns its fixed gain for every `eps`.
pub fn gain_quantile(params: &ChannelParams, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid(format!("quantile level must lie in (0, 1), got {eps}")));
    }
    if params.is_deterministic() {
        return Ok(params.scale * params.atmo_factor());
    }
    let nc = params.noncentrality;
    let mut lo = 0.0;
    let mut hi = 2.0 + nc;
    let mut iterations = 0;
    while ncx2_cdf(hi, nc) < eps {
        hi *= 2.0;
        iterations += 1;
        if iterations > QUANTILE_MAX_ITERATIONS {
            return Err(Error::QuantileNonConvergent { eps, iterations });
        }
    }
    let mut mid = 0.5 * (lo + hi);
    while iterations < QUANTILE_MAX_ITERATIONS {
        mid = 0.5 * (lo + hi);
        let cdf = ncx2_cdf(mid, nc);
        if (cdf - eps).abs() <= 1e-13 {
            break;
        }
        if cdf < eps {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 2.0 * f64::EPSILON * hi {
            mid = 0.5 * (lo + hi);
            break;
        }
        iterations += 1;
    }
    if (ncx2_cdf(mid, nc) - eps).abs() > QUANTILE_TOLERANCE {
        return Err(Error::QuantileNonConvergent { eps, iterations });
    }
    Ok(mid * params.gain_per_unit())
}

/// Draws one gain: `(a + Z1)^2 + (a + Z2)^2` with `a = sqrt(nc / 2)`, rescaled
/// to the link's mean gain, attenuated, and optionally shadowed.
pub fn sample_gain<R: Rng + ?Sized>(params: &ChannelParams, rng: &mut R) -> GainSample {
    let mut value = if params.is_deterministic() {
        params.scale * params.atmo_factor()
    } else {
        let a = (params.noncentrality / 2.0).sqrt();
        let z1: f64 = StandardNormal.sample(rng);
        let z2: f64 = StandardNormal.sample(rng);
        ((a + z1).powi(2) + (a + z2).powi(2)) * params.gain_per_unit()
    };
    if let Some(sigma) = params.shadowing_sigma_db {
        let z: f64 = StandardNormal.sample(rng);
        value *= 10f64.powf(sigma * z / 10.0);
    }
    GainSample { value }
}

/// Gain used to size transmit power: the outage quantile of the link.
///
/// Without shadowing this is exactly [`gain_quantile`]. With shadowing the
/// quantile is the empirical `outage_eps` quantile of `mc_samples` draws.
pub fn design_gain<R: Rng + ?Sized>(
    params: &ChannelParams,
    mc_samples: usize,
    rng: &mut R,
) -> Result<f64> {
    if params.shadowing_sigma_db.is_none() {
        return gain_quantile(params, params.outage_eps);
    }
    if mc_samples == 0 {
        return Err(invalid("shadowed links need at least one Monte Carlo sample"));
    }
    let mut draws: Vec<f64> = (0..mc_samples).map(|_| sample_gain(params, rng).value).collect();
    let rank = ((params.outage_eps * mc_samples as f64).ceil() as usize).clamp(1, mc_samples) - 1;
    let (_, q, _) = draws.select_nth_unstable_by(rank, f64::total_cmp);
    Ok(*q)
}

/// Power that carries `rate` bits per channel use over a link of the given
/// gain: `(2^rate - 1) * noise / gain`.
pub fn required_power(rate: f64, gain: f64, noise_power: f64) -> Result<f64> {
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(invalid(format!("rate must be non-negative, got {rate}")));
    }
    if !(noise_power > 0.0) {
        return Err(invalid("noise power must be positive"));
    }
    if gain == 0.0 {
        return Err(Error::ZeroGainLink);
    }
    if !(gain > 0.0) {
        return Err(invalid(format!("gain must be positive, got {gain}")));
    }
    Ok((rate * std::f64::consts::LN_2).exp_m1() * noise_power / gain)
}

/// [`required_power`] at the link's `outage_eps` gain quantile.
pub fn required_power_outage(rate: f64, params: &ChannelParams) -> Result<f64> {
    let gain = gain_quantile(params, params.outage_eps)?;
    required_power(rate, gain, params.noise_power)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Two-DOF non-central chi-squared density via the I0 power series.
    fn ncx2_pdf(x: f64, nc: f64) -> f64 {
        let z = (nc * x).sqrt() / 2.0;
        let mut term = 1.0;
        let mut i0 = 1.0;
        for k in 1..500 {
            term *= z * z / (k as f64 * k as f64);
            i0 += term;
            if term < 1e-17 * i0 {
                break;
            }
        }
        0.5 * (-(x + nc) / 2.0).exp() * i0
    }

    fn empirical_quantile(params: &ChannelParams, eps: f64, n: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v: Vec<f64> = (0..n).map(|_| sample_gain(params, &mut rng).value).collect();
        let k = (eps * n as f64).ceil() as usize - 1;
        *v.select_nth_unstable_by(k, f64::total_cmp).1
    }

    #[test]
    fn central_median() {
        // scale = 2 with nc = 0 leaves the raw chi-squared variate.
        let p = ChannelParams::rician(0.0, 2.0);
        let q = gain_quantile(&p, 0.5).unwrap();
        assert_relative_eq!(q, 2.0 * std::f64::consts::LN_2, max_relative = 1e-9);
    }

    #[test]
    fn quantile_round_trips() {
        for nc in [0.0, 1.0, 10.0, 100.0] {
            for eps in [0.01, 0.05, 0.5] {
                let p = ChannelParams::rician(nc, 1.0);
                let g = gain_quantile(&p, eps).unwrap();
                let x = g / p.gain_per_unit();
                assert!((ncx2_cdf(x, nc) - eps).abs() <= 1e-9, "nc {nc} eps {eps}");
            }
        }
    }

    #[test]
    fn quantile_ordering() {
        let p = ChannelParams::rician(3.0, 1.0);
        assert!(gain_quantile(&p, 0.1).unwrap() < gain_quantile(&p, 0.9).unwrap());
    }

    #[test]
    fn quantile_matches_monte_carlo_fifth_percentile() {
        let n = 10_000_000;
        let eps = 0.05;
        let p = ChannelParams::rician(10.0, 1.0);
        let q = gain_quantile(&p, eps).unwrap();
        let emp = empirical_quantile(&p, eps, n, 7);
        let s = p.gain_per_unit();
        let density = ncx2_pdf(q / s, 10.0) / s;
        let se = (eps * (1.0 - eps) / n as f64).sqrt() / density;
        assert!((q - emp).abs() <= 3.0 * se, "q {q} emp {emp} se {se}");
    }

    #[test]
    fn atmospheric_loss_scales_quantile() {
        let p = ChannelParams::rician(4.0, 1.0);
        let mut lossy = p;
        lossy.atmo_loss_db = 10.0;
        let a = gain_quantile(&p, 0.05).unwrap();
        let b = gain_quantile(&lossy, 0.05).unwrap();
        assert_relative_eq!(b, a / 10.0, max_relative = 1e-12);
    }

    #[test]
    fn sample_mean_is_scale() {
        for nc in [0.0, 1.0, 10.0] {
            let p = ChannelParams::rician(nc, 1.0);
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let n = 1_000_000;
            let draws: Vec<f64> = (0..n).map(|_| sample_gain(&p, &mut rng).value).collect();
            let mean = draws.iter().sum::<f64>() / n as f64;
            let var = draws.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let se = (var / n as f64).sqrt();
            assert!((mean - 1.0).abs() <= 3.0 * se, "nc {nc}: mean {mean} se {se}");
        }
    }

    #[test]
    fn strong_line_of_sight_is_nearly_deterministic() {
        let p = ChannelParams::rician(1e4, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 100_000;
        let draws: Vec<f64> = (0..n).map(|_| sample_gain(&p, &mut rng).value).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(var < 1e-3);
    }

    #[test]
    fn sampling_is_reproducible() {
        let mut p = ChannelParams::rician(2.0, 1.5);
        p.shadowing_sigma_db = Some(8.0);
        let a = sample_gain(&p, &mut ChaCha8Rng::seed_from_u64(42));
        let b = sample_gain(&p, &mut ChaCha8Rng::seed_from_u64(42));
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        let ga = design_gain(&p, 1000, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let gb = design_gain(&p, 1000, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(ga.to_bits(), gb.to_bits());
    }

    #[test]
    fn design_gain_without_shadowing_is_the_quantile() {
        let p = ChannelParams::rician(5.0, 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(design_gain(&p, 10, &mut rng).unwrap(), gain_quantile(&p, 0.05).unwrap());
    }

    #[test]
    fn shadowing_lowers_design_gain() {
        let p = ChannelParams::rician(10.0, 1.0);
        let mut shadowed = p;
        shadowed.shadowing_sigma_db = Some(10.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = design_gain(&shadowed, 200_000, &mut rng).unwrap();
        assert!(g < gain_quantile(&p, 0.05).unwrap());
    }

    #[test]
    fn required_power_examples() {
        assert_eq!(required_power(2.0, 1.0, 1.0).unwrap(), 3.0);
        assert_eq!(required_power(1.0, 1.0, 1.0).unwrap(), 1.0);
        assert_relative_eq!(required_power(2.0, 3.0, 1.0).unwrap(), 1.0, max_relative = 1e-15);
        assert_eq!(required_power(0.0, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(required_power(1.0, 0.0, 1.0).unwrap_err(), Error::ZeroGainLink);
        assert!(required_power(-1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn outage_power_near_deterministic_limit() {
        let p = ChannelParams::rician(1e9, 1.0);
        let power = required_power_outage(2.0, &p).unwrap();
        assert!((power - 3.0).abs() < 1e-3, "power {power}");
        assert_eq!(required_power_outage(2.0, &ChannelParams::line_of_sight(1.0)).unwrap(), 3.0);
    }

    #[test]
    fn outage_power_follows_dominance() {
        let weak = ChannelParams::rician(10.0, 1.0);
        let strong = ChannelParams::rician(10.0, 2.0);
        let clearer = ChannelParams::rician(40.0, 1.0);
        let base = required_power_outage(2.0, &weak).unwrap();
        assert!(required_power_outage(2.0, &strong).unwrap() <= base);
        assert!(required_power_outage(2.0, &clearer).unwrap() <= base);
    }

    #[test]
    fn outage_power_matches_grid_oracle() {
        // Smallest power on a grid whose Monte Carlo outage is at most eps.
        let p = ChannelParams::rician(10.0, 1.0);
        let (rate, eps) = (2.0, 0.05);
        let n = 2_000_000;
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut gains: Vec<f64> = (0..n).map(|_| sample_gain(&p, &mut rng).value).collect();
        gains.sort_by(f64::total_cmp);
        let outage = |power: f64| {
            let threshold = 3.0 / power;
            gains.partition_point(|&g| g < threshold) as f64 / n as f64
        };
        let step = 1e-3;
        let mut power = 1.0;
        while outage(power) > eps {
            power += step;
        }
        let got = required_power_outage(rate, &p).unwrap();
        // Quantile standard error mapped through p = 3 / g.
        let s = p.gain_per_unit();
        let q = gain_quantile(&p, eps).unwrap();
        let se_gain = (eps * (1.0 - eps) / n as f64).sqrt() / (ncx2_pdf(q / s, 10.0) / s);
        let se_power = 3.0 * se_gain / (q * q);
        assert!((got - power).abs() <= step + 3.0 * se_power, "got {got}, grid {power}");
    }

    #[test]
    fn validation_bounds() {
        let mut p = ChannelParams::default();
        assert!(p.validate().unwrap().is_empty());
        p.outage_eps = 0.7;
        assert!(p.validate().is_err());
        p.outage_eps = 0.05;
        p.atmo_loss_db = 2.0;
        assert_eq!(p.validate().unwrap().len(), 1);
        p.atmo_loss_db = 50.0;
        assert!(p.validate().is_err());
        p.atmo_loss_db = 0.0;
        p.shadowing_sigma_db = Some(30.0);
        assert_eq!(p.validate().unwrap().len(), 1);
    }

    #[test]
    fn k_factor_conversion() {
        let p = ChannelParams::from_k_factor(5.0, 1.0);
        assert_eq!(p.noncentrality, 10.0);
        assert_eq!(p.k_factor(), 5.0);
    }

    proptest! {
        #[test]
        fn power_convex_increasing_in_rate(r in 0.01f64..10.0, dr in 0.01f64..2.0, g in 0.01f64..10.0) {
            let p0 = required_power(r, g, 1.0).unwrap();
            let p1 = required_power(r + dr, g, 1.0).unwrap();
            let p2 = required_power(r + 2.0 * dr, g, 1.0).unwrap();
            prop_assert!(p1 > p0);
            prop_assert!(p2 - p1 >= (p1 - p0) * (1.0 - 1e-12));
        }

        #[test]
        fn halving_gain_doubles_power(r in 0.01f64..10.0, g in 0.01f64..10.0) {
            let a = required_power(r, g, 1.0).unwrap();
            let b = required_power(r, g / 2.0, 1.0).unwrap();
            prop_assert_eq!(b, 2.0 * a);
        }
    }
}
