//! Non-central chi-squared law with two degrees of freedom.
//!
//! With `X = |a + Z|^2` for a complex Gaussian `Z` of unit per-axis variance,
//! `P[X <= x] = 1 - Q1(sqrt(lambda), sqrt(x))`. The Marcum-Q function is
//! evaluated through its Poisson-mixture series:
//!
//! ```text
//! P[X <= x] = sum_j Pois(j; lambda/2) * P[Pois(x/2) > j]
//! ```
//!
//! Both Poisson laws are tabulated outward from their modes with the usual
//! ratio recurrences, so no factorial or gamma function is evaluated and the
//! series stays accurate for very large noncentrality. A table is cut once a
//! term drops below [`TERM_CUTOFF`] times the modal term and is then
//! renormalised; the discarded mass is below 1e-13 for every mean the
//! simulator uses.

/// Relative size at which a Poisson term is dropped from the series.
pub const TERM_CUTOFF: f64 = 1e-15;
/// Upper bound on tabulated terms per Poisson law.
pub const MAX_TERMS: usize = 50_000_000;

/// Normalised Poisson probabilities over `[start, start + pmf.len())`.
struct PoissonTable {
    start: u64,
    pmf: Vec<f64>,
}

impl PoissonTable {
    fn new(mean: f64) -> Self {
        if mean <= 0.0 {
            return Self { start: 0, pmf: vec![1.0] };
        }
        let mode = mean.floor();

        let mut upper = Vec::new();
        let mut w = 1.0;
        let mut j = mode;
        while upper.len() < MAX_TERMS {
            upper.push(w);
            w *= mean / (j + 1.0);
            j += 1.0;
            if w < TERM_CUTOFF {
                break;
            }
        }

        let mut lower = Vec::new();
        let mut w = 1.0;
        let mut j = mode;
        while j > 0.0 && lower.len() < MAX_TERMS {
            w *= j / mean;
            j -= 1.0;
            if w < TERM_CUTOFF {
                break;
            }
            lower.push(w);
        }

        let start = mode as u64 - lower.len() as u64;
        lower.reverse();
        lower.extend(upper);
        let total: f64 = lower.iter().sum();
        for p in &mut lower {
            *p /= total;
        }
        Self { start, pmf: lower }
    }
}

/// CDF of the two-degree-of-freedom non-central chi-squared law.
pub fn ncx2_cdf(x: f64, noncentrality: f64) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    let mixing = PoissonTable::new(noncentrality / 2.0);
    let counting = PoissonTable::new(x / 2.0);

    // tail[i] = P[K >= counting.start + i]
    let mut tail = vec![0.0; counting.pmf.len() + 1];
    for i in (0..counting.pmf.len()).rev() {
        tail[i] = tail[i + 1] + counting.pmf[i];
    }
    let k_start = counting.start;
    let k_end = k_start + counting.pmf.len() as u64;

    let mut cdf = 0.0;
    for (offset, w) in mixing.pmf.iter().enumerate() {
        let j = mixing.start + offset as u64;
        // P[K > j] = P[K >= j + 1]
        let survival = if j + 1 <= k_start {
            1.0
        } else if j + 1 >= k_end {
            0.0
        } else {
            tail[(j + 1 - k_start) as usize]
        };
        cdf += w * survival;
    }
    cdf.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn central_case_is_exponential() {
        let x = 2.0 * std::f64::consts::LN_2;
        assert!((ncx2_cdf(x, 0.0) - 0.5).abs() < 1e-12);
        for x in [0.1, 1.0, 3.0, 10.0, 40.0] {
            let exact = -(-x / 2.0f64).exp_m1();
            assert!((ncx2_cdf(x, 0.0) - exact).abs() < 1e-13, "x = {x}");
        }
    }

    #[test]
    fn zero_argument() {
        for nc in [0.0, 1.0, 10.0, 1e4] {
            assert_eq!(ncx2_cdf(0.0, nc), 0.0);
        }
    }

    #[test]
    fn matches_monte_carlo() {
        let n = 10_000_000usize;
        let (x, nc) = (5.0, 3.0);
        let a = (nc / 2.0f64).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut hits = 0usize;
        for _ in 0..n {
            let z1: f64 = StandardNormal.sample(&mut rng);
            let z2: f64 = StandardNormal.sample(&mut rng);
            if (a + z1).powi(2) + (a + z2).powi(2) <= x {
                hits += 1;
            }
        }
        let p_hat = hits as f64 / n as f64;
        let se = (p_hat * (1.0 - p_hat) / n as f64).sqrt();
        let got = ncx2_cdf(x, nc);
        assert!((got - p_hat).abs() <= 3.0 * se, "cdf {got}, mc {p_hat} ± {se}");
    }

    #[test]
    fn large_noncentrality_is_centred() {
        // Mean 2 + nc, standard deviation sqrt(4 + 4 nc).
        let nc: f64 = 1e8;
        let sd = (4.0 + 4.0 * nc).sqrt();
        let median = ncx2_cdf(2.0 + nc, nc);
        assert!((median - 0.5).abs() < 1e-3);
        assert!(ncx2_cdf(2.0 + nc - 6.0 * sd, nc) < 1e-8);
        assert!(ncx2_cdf(2.0 + nc + 6.0 * sd, nc) > 1.0 - 1e-8);
    }

    #[test]
    fn tends_to_one() {
        assert!(ncx2_cdf(1e3, 10.0) > 1.0 - 1e-14);
        assert_eq!(ncx2_cdf(f64::INFINITY, 10.0), 1.0);
    }

    proptest! {
        #[test]
        fn non_decreasing_in_x(nc in 0.0f64..50.0, x in 0.0f64..80.0, dx in 0.0f64..10.0) {
            prop_assert!(ncx2_cdf(x + dx, nc) + 1e-14 >= ncx2_cdf(x, nc));
        }

        #[test]
        fn non_increasing_in_noncentrality(nc in 0.0f64..50.0, dnc in 0.0f64..10.0, x in 0.0f64..80.0) {
            prop_assert!(ncx2_cdf(x, nc + dnc) <= ncx2_cdf(x, nc) + 1e-14);
        }

        #[test]
        fn within_unit_interval(nc in 0.0f64..1e3, x in 0.0f64..2e3) {
            let c = ncx2_cdf(x, nc);
            prop_assert!((0.0..=1.0).contains(&c));
        }
    }
}
