//! Slot budgets: deadline adjustment and frame segmentation.
//!
//! Usable time is floored and consumed time is ceiled. Both conversions snap
//! values within [`SLOT_SNAP`] of an integer first, so that e.g. `0.01 s /
//! 0.001 s` counts as exactly ten slots.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub const DEFAULT_SLOT_DURATION_S: f64 = 1e-3;
pub const SLOT_SNAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeFrame {
    pub total_slots: u64,
    pub slot_duration_s: f64,
}

impl TimeFrame {
    pub fn new(total_slots: u64, slot_duration_s: f64) -> Result<Self> {
        let frame = Self {
            total_slots,
            slot_duration_s,
        };
        frame.validate()?;
        Ok(frame)
    }

    pub fn validate(&self) -> Result<()> {
        if self.total_slots == 0 {
            return Err(invalid("time frame needs at least one slot"));
        }
        if !(self.slot_duration_s > 0.0 && self.slot_duration_s.is_finite()) {
            return Err(invalid("slot duration must be positive"));
        }
        Ok(())
    }

    pub fn duration_s(&self) -> f64 {
        self.total_slots as f64 * self.slot_duration_s
    }

    fn slots(&self, seconds: f64) -> f64 {
        seconds / self.slot_duration_s
    }
}

/// How a frame is spent on the satellite path.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segmentation {
    pub upload_slots: u64,
    pub relay_slots: u64,
    pub travel_slots: u64,
    pub download_slots: u64,
    /// Slots given up to propagation delay.
    pub prop_adjust_slots: u64,
}

impl Segmentation {
    pub fn total(&self) -> u64 {
        self.upload_slots
            + self.relay_slots
            + self.travel_slots
            + self.download_slots
            + self.prop_adjust_slots
    }
}

fn floor_slots(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= SLOT_SNAP {
        r
    } else {
        x.floor()
    }
}

fn ceil_slots(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= SLOT_SNAP {
        r
    } else {
        x.ceil()
    }
}

fn check_delay(name: &str, seconds: f64) -> Result<()> {
    if !(seconds >= 0.0) || !seconds.is_finite() {
        return Err(invalid(format!("{name} must be a non-negative finite time, got {seconds}")));
    }
    Ok(())
}

fn check_split(split: f64) -> Result<()> {
    if !(split > 0.0 && split < 1.0) {
        return Err(invalid(format!("split must lie in (0, 1), got {split}")));
    }
    Ok(())
}

/// Data per slot when `data` units are spread evenly over `slots`.
pub fn uniform_rate(data: f64, slots: u64) -> Result<f64> {
    if slots == 0 {
        return Err(Error::InfeasibleDeadline("no slots available".into()));
    }
    if !(data >= 0.0) {
        return Err(invalid(format!("data amount must be non-negative, got {data}")));
    }
    Ok(data / slots as f64)
}

/// Per-cache unicast window: `floor(T / N - d_C / s_C)` in slots.
pub fn baseline_deadline(frame: &TimeFrame, n_caches: u64, d_c_m: f64, s_c_mps: f64) -> Result<u64> {
    if n_caches == 0 {
        return Err(invalid("at least one edge cache is required"));
    }
    let delay = frame.slots(d_c_m / s_c_mps);
    let slots = floor_slots(frame.total_slots as f64 / n_caches as f64 - delay);
    if slots < 1.0 {
        return Err(Error::InfeasibleDeadline(format!(
            "terrestrial window T/N - d_C/s_C = {:.4} slots",
            frame.total_slots as f64 / n_caches as f64 - delay
        )));
    }
    Ok(slots as u64)
}

/// Slots left for the immediate-forward path after both mean pass delays.
pub fn scenario1_deadline(frame: &TimeFrame, mean_ul_delay_s: f64, mean_dl_delay_s: f64) -> Result<u64> {
    check_delay("uplink delay", mean_ul_delay_s)?;
    check_delay("downlink delay", mean_dl_delay_s)?;
    let left = frame.total_slots as f64 - frame.slots(mean_ul_delay_s + mean_dl_delay_s);
    let slots = floor_slots(left);
    if slots < 1.0 {
        return Err(Error::InfeasibleDeadline(format!(
            "propagation delays leave {left:.4} slots of the frame"
        )));
    }
    Ok(slots as u64)
}

/// Splits `remaining` slots into upload and download, each at least one slot.
fn split_remaining(remaining: u64, split: f64) -> (u64, u64) {
    let upload = ((split * remaining as f64).floor() as u64).clamp(1, remaining - 1);
    (upload, remaining - upload)
}

/// Relay-and-forward segmentation: upload, relay through `hops`
/// inter-satellite links, then broadcast.
pub fn scenario2_segments(
    frame: &TimeFrame,
    ul_delay_s: f64,
    per_hop_delay_s: f64,
    hops: u64,
    dl_delay_s: f64,
    split: f64,
) -> Result<Segmentation> {
    check_split(split)?;
    check_delay("uplink delay", ul_delay_s)?;
    check_delay("downlink delay", dl_delay_s)?;
    check_delay("per-hop delay", per_hop_delay_s)?;
    let relay_slots = if hops == 0 {
        0
    } else {
        ceil_slots(frame.slots(hops as f64 * per_hop_delay_s)) as u64
    };
    let prop_adjust_slots = ceil_slots(frame.slots(ul_delay_s + dl_delay_s)) as u64;
    let remaining = frame
        .total_slots
        .saturating_sub(relay_slots)
        .saturating_sub(prop_adjust_slots);
    if remaining <= 1 {
        return Err(Error::InfeasibleDeadline(format!(
            "relay ({relay_slots} slots) and propagation ({prop_adjust_slots} slots) leave {remaining} of {} slots",
            frame.total_slots
        )));
    }
    let (upload_slots, download_slots) = split_remaining(remaining, split);
    Ok(Segmentation {
        upload_slots,
        relay_slots,
        travel_slots: 0,
        download_slots,
        prop_adjust_slots,
    })
}

/// Store-and-forward segmentation: upload, carry onboard, then broadcast.
pub fn scenario3_segments(
    frame: &TimeFrame,
    ul_delay_s: f64,
    dl_delay_s: f64,
    travel_time_s: f64,
    split: f64,
) -> Result<Segmentation> {
    check_split(split)?;
    check_delay("uplink delay", ul_delay_s)?;
    check_delay("downlink delay", dl_delay_s)?;
    check_delay("travel time", travel_time_s)?;
    let travel = ceil_slots(frame.slots(travel_time_s));
    let prop_adjust_slots = ceil_slots(frame.slots(ul_delay_s + dl_delay_s)) as u64;
    let remaining = frame.total_slots as f64 - travel - prop_adjust_slots as f64;
    if remaining <= 1.0 {
        return Err(Error::InfeasibleDeadline(format!(
            "satellite travel takes {travel} slots of a {}-slot frame",
            frame.total_slots
        )));
    }
    let (upload_slots, download_slots) = split_remaining(remaining as u64, split);
    Ok(Segmentation {
        upload_slots,
        relay_slots: 0,
        travel_slots: travel as u64,
        download_slots,
        prop_adjust_slots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn frame(t: u64) -> TimeFrame {
        TimeFrame::new(t, 1e-3).unwrap()
    }

    #[test]
    fn uniform_rate_examples() {
        assert_eq!(uniform_rate(400.0, 200).unwrap(), 2.0);
        assert_eq!(uniform_rate(0.0, 100).unwrap(), 0.0);
        assert!((uniform_rate(400.0, 99).unwrap() - 4.040_404_040_404).abs() < 1e-12);
        assert!(matches!(uniform_rate(1.0, 0), Err(Error::InfeasibleDeadline(_))));
    }

    #[test]
    fn baseline_deadline_examples() {
        assert_eq!(baseline_deadline(&frame(200), 2, 60_000.0, 2.998e8).unwrap(), 99);
        assert_eq!(baseline_deadline(&frame(200), 1, 0.0, 2.998e8).unwrap(), 200);
        assert_eq!(baseline_deadline(&frame(200), 2, 0.0, 2.998e8).unwrap(), 100);
        assert!(baseline_deadline(&frame(2), 4, 0.0, 3e8).is_err());
    }

    #[test]
    fn scenario1_deadline_examples() {
        assert_eq!(scenario1_deadline(&frame(200), 0.0, 0.0).unwrap(), 200);
        assert_eq!(scenario1_deadline(&frame(200), 4.003e-3, 4.003e-3).unwrap(), 191);
        let err = scenario1_deadline(&frame(10), 6e-3, 5e-3).unwrap_err();
        assert!(err.to_string().contains("infeasible deadline"));
    }

    #[test]
    fn scenario2_examples() {
        let s = scenario2_segments(&frame(200), 0.0, 0.0, 0, 0.0, 0.5).unwrap();
        assert_eq!((s.upload_slots, s.relay_slots, s.download_slots), (100, 0, 100));

        let s = scenario2_segments(&frame(200), 0.0, 2e-3, 5, 0.0, 0.5).unwrap();
        assert_eq!((s.upload_slots, s.relay_slots, s.download_slots), (95, 10, 95));

        let s = scenario2_segments(&frame(200), 0.0, 2e-3, 5, 0.0, 0.25).unwrap();
        assert_eq!((s.upload_slots, s.download_slots), (47, 143));

        assert!(scenario2_segments(&frame(200), 0.0, 0.1, 2, 0.0, 0.5).is_err());
        assert!(scenario2_segments(&frame(200), 0.0, 0.0, 0, 0.0, 1.0).is_err());
    }

    #[test]
    fn scenario3_examples() {
        let s = scenario3_segments(&frame(200), 0.0, 0.0, 0.0, 0.5).unwrap();
        assert_eq!((s.upload_slots, s.travel_slots, s.download_slots), (100, 0, 100));

        assert!(scenario3_segments(&frame(200), 0.0, 0.0, 6.0, 0.5).is_err());

        let s = scenario3_segments(&frame(200), 0.0, 0.0, 0.05, 0.5).unwrap();
        assert_eq!((s.upload_slots, s.travel_slots, s.download_slots), (75, 50, 75));
    }

    #[test]
    fn tiny_split_keeps_one_upload_slot() {
        let s = scenario2_segments(&frame(10), 0.0, 0.0, 0, 0.0, 0.05).unwrap();
        assert_eq!((s.upload_slots, s.download_slots), (1, 9));
    }

    proptest! {
        #[test]
        fn uniform_rate_recovers_total(b in 0.0f64..1e6, s in 1u64..100_000) {
            let r = uniform_rate(b, s).unwrap();
            prop_assert!((r * s as f64 - b).abs() <= 1e-12 * b.max(1e-300));
        }

        #[test]
        fn baseline_non_increasing(n in 1u64..8, d in 0.0f64..1e5, dd in 0.0f64..1e5) {
            let f = frame(400);
            if let Ok(a) = baseline_deadline(&f, n + 1, d, 2e8) {
                prop_assert!(a <= baseline_deadline(&f, n, d, 2e8).unwrap());
            }
            if let Ok(a) = baseline_deadline(&f, n, d + dd, 2e8) {
                prop_assert!(a <= baseline_deadline(&f, n, d, 2e8).unwrap());
            }
        }

        #[test]
        fn segments_fit_frame(
            t in 2u64..500,
            ul in 0.0f64..0.05,
            dl in 0.0f64..0.05,
            hop in 0.0f64..0.01,
            hops in 0u64..10,
            travel in 0.0f64..0.3,
            split in 0.01f64..0.99,
        ) {
            let f = frame(t);
            if let Ok(s) = scenario2_segments(&f, ul, hop, hops, dl, split) {
                prop_assert!(s.total() <= t);
                prop_assert!(s.upload_slots >= 1 && s.download_slots >= 1);
            }
            if let Ok(s) = scenario3_segments(&f, ul, dl, travel, split) {
                prop_assert!(s.total() <= t);
                prop_assert!(s.upload_slots >= 1 && s.download_slots >= 1);
            }
        }

        #[test]
        fn less_delay_never_fewer_slots(
            ul in 0.0f64..0.05,
            dl in 0.0f64..0.05,
            cut in 0.0f64..1.0,
            travel in 0.0f64..0.1,
            split in 0.01f64..0.99,
        ) {
            let f = frame(200);
            if let Ok(a) = scenario1_deadline(&f, ul, dl) {
                prop_assert!(scenario1_deadline(&f, ul * cut, dl).unwrap() >= a);
            }
            if let Ok(a) = scenario3_segments(&f, ul, dl, travel, split) {
                let b = scenario3_segments(&f, ul, dl, travel * cut, split).unwrap();
                prop_assert!(b.upload_slots >= a.upload_slots);
                prop_assert!(b.download_slots >= a.download_slots);
            }
        }
    }
}
