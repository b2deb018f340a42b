//! Schedules `t(s)` coupling the deformation parameter to the position along the family.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "lowercase", deny_unknown_fields)]
pub enum Schedule {
    /// `t(s) = exp(-s / rate)`.
    Exponential { rate: f64 },
    /// Log-linear interpolation through knots `(s, t)` starting at `(0, 1)`, continued past
    /// the last knot at the slope of the last segment.
    Adaptive { knots: Vec<[f64; 2]> },
}

impl Default for Schedule {
    fn default() -> Self {
        Self::Exponential { rate: 5.0 }
    }
}

impl Schedule {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Exponential { rate } if *rate > 0.0 => Ok(()),
            Self::Exponential { .. } => Err(invalid("schedule rate must be positive")),
            Self::Adaptive { knots } => {
                let ok = knots.first() == Some(&[0.0, 1.0])
                    && knots.len() >= 2
                    && knots
                        .windows(2)
                        .all(|w| w[1][0] > w[0][0] && w[1][1] <= w[0][1] && w[1][1] > 0.0);
                if ok {
                    Ok(())
                } else {
                    Err(invalid("adaptive knots must start at (0, 1) with s increasing and t positive, non-increasing"))
                }
            }
        }
    }

    pub fn t(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(invalid("schedule is defined for s >= 0"));
        }
        Ok(match self {
            Self::Exponential { rate } => (-s / rate).exp(),
            Self::Adaptive { knots } => {
                let i = knots
                    .partition_point(|k| k[0] <= s)
                    .clamp(1, knots.len() - 1);
                let ([s0, t0], [s1, t1]) = (knots[i - 1], knots[i]);
                let mut slope = (t1.ln() - t0.ln()) / (s1 - s0);
                if s > s1 && slope == 0.0 {
                    slope = -1.0 / 5.0;
                }
                (t0.ln() + slope * (s - s0)).exp().min(t0)
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub schedule: Schedule,
    /// Per window `[n, n+1]`: target, chosen `t`, measured discrepancy at that `t`.
    pub windows: Vec<[f64; 3]>,
    /// Windows whose target was not met at the smallest candidate.
    pub unmet: Vec<usize>,
}

/// Builds the adaptive schedule from measured discrepancies `measured[k]` at candidate
/// values `candidates[k]` (decreasing). Window `n` must reach discrepancy `<= 1/(n+2)`; the
/// knot for window `n` sits at `s = n + 1`.
pub fn calibrate_adaptive(
    candidates: &[f64],
    measured: &[f64],
    windows: usize,
) -> Result<Calibration> {
    if candidates.is_empty() || candidates.len() != measured.len() {
        return Err(invalid("need one measurement per candidate"));
    }
    if candidates.windows(2).any(|w| w[1] >= w[0]) || candidates[candidates.len() - 1] <= 0.0 {
        return Err(invalid("candidates must be positive and decreasing"));
    }
    let mut knots = vec![[0.0, 1.0]];
    let mut rows = Vec::with_capacity(windows);
    let mut unmet = Vec::new();
    let mut start = 0;
    for n in 0..windows {
        let target = 1.0 / (n as f64 + 2.0);
        let k = (start..candidates.len())
            .find(|&k| measured[k] <= target)
            .unwrap_or_else(|| {
                unmet.push(n);
                candidates.len() - 1
            });
        start = k;
        let t = candidates[k].min(knots.last().expect("non-empty")[1]);
        knots.push([n as f64 + 1.0, t]);
        rows.push([target, t, measured[k]]);
    }
    let schedule = Schedule::Adaptive { knots };
    schedule.validate()?;
    Ok(Calibration {
        schedule,
        windows: rows,
        unmet,
    })
}
