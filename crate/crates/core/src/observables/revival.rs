//! Revival-center detection.
//!
//! A reproducible stand-in for reading revival times off a plot: the
//! envelope is the moving-window RMS of the mean-subtracted series, and
//! centers are interior local maxima of the envelope that exceed three
//! times the collapse-plateau level (the lower quartile of the envelope).
//! Maxima closer than `min_separation` merge into the strongest one, and
//! the initial Rabi burst is excluded via `skip_initial`.

/// Envelope-based revival-center detector.
///
/// `window` should be of order one tenth of the expected revival spacing
/// (e.g. `revival_time(n, spacing) / 10`).
#[derive(Debug, Clone)]
pub struct RevivalDetector {
    pub window: f64,
    pub plateau_percentile: f64,
    pub threshold_factor: f64,
    pub skip_initial: f64,
    pub min_separation: f64,
}

impl RevivalDetector {
    pub fn new(window: f64) -> Self {
        assert!(window > 0.0, "detector window must be positive");
        Self {
            window,
            plateau_percentile: 25.0,
            threshold_factor: 3.0,
            skip_initial: 2.0 * window,
            min_separation: 5.0 * window,
        }
    }

    /// Moving-window RMS of the mean-subtracted series. Expects a uniform,
    /// strictly increasing grid.
    pub fn envelope(&self, t: &[f64], y: &[f64]) -> Vec<f64> {
        assert_eq!(t.len(), y.len());
        assert!(t.len() >= 2);
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        let dt = t[1] - t[0];
        let half = ((self.window / (2.0 * dt)).round() as usize).max(1);
        let mut csum = Vec::with_capacity(y.len() + 1);
        csum.push(0.0);
        let mut acc = 0.0;
        for &v in y {
            let d = v - mean;
            acc += d * d;
            csum.push(acc);
        }
        (0..y.len())
            .map(|i| {
                let lo = i.saturating_sub(half);
                let hi = (i + half).min(y.len() - 1);
                ((csum[hi + 1] - csum[lo]) / (hi + 1 - lo) as f64).sqrt()
            })
            .collect()
    }

    /// Times of detected revival centers, in increasing order.
    pub fn centers(&self, t: &[f64], y: &[f64]) -> Vec<f64> {
        let env = self.envelope(t, y);
        let plateau = percentile(&env, self.plateau_percentile);
        let threshold = self.threshold_factor * plateau;
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for i in 1..env.len() - 1 {
            if t[i] < self.skip_initial {
                continue;
            }
            if env[i] > env[i - 1] && env[i] >= env[i + 1] && env[i] >= threshold {
                match merged.last_mut() {
                    Some(last) if t[i] - last.0 < self.min_separation => {
                        if env[i] > last.1 {
                            *last = (t[i], env[i]);
                        }
                    }
                    _ => merged.push((t[i], env[i])),
                }
            }
        }
        merged.into_iter().map(|(tc, _)| tc).collect()
    }
}

/// Linear-interpolation percentile of an unsorted slice.
fn percentile(values: &[f64], pct: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-finite envelope value"));
    let rank = pct / 100.0 * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (rank - lo as f64) * (sorted[hi] - sorted[lo])
    }
}
