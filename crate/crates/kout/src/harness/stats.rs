//! Wilson score intervals and monotone-trend verdicts over paired experiment
//! series.

use serde::Serialize;

use super::HarnessError;

/// Wilson score interval for a binomial proportion at confidence `z` (1.96
/// for 95%). Behaves sensibly near 0 and 1, unlike the normal approximation.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    assert!(trials > 0, "interval needs at least one trial");
    assert!(successes <= trials);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// One parameter point of a trend series.
#[derive(Debug, Clone, Copy)]
pub struct TrendPoint {
    /// The swept parameter value (k, n, …).
    pub param: f64,
    pub successes: usize,
    pub trials: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrendRow {
    pub param: f64,
    pub successes: usize,
    pub trials: usize,
    pub frequency: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

/// Verdict on whether a paired-seed success series is non-decreasing, up to
/// two-sided Wilson overlap.
#[derive(Debug, Clone, Serialize)]
pub struct TrendReport {
    pub rows: Vec<TrendRow>,
    pub non_decreasing: bool,
    /// Indices `(i, j)` of the first pair with `param_i < param_j` whose
    /// intervals are disjoint in the decreasing direction.
    pub offending: Option<(usize, usize)>,
}

impl TrendReport {
    /// Plain text table, one row per point.
    pub fn table(&self) -> String {
        let mut out = String::from("param\tfreq\twilson95\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{}\t{:.4}\t[{:.4}, {:.4}]\n",
                r.param, r.frequency, r.wilson_low, r.wilson_high
            ));
        }
        out.push_str(&format!(
            "verdict: {}\n",
            if self.non_decreasing {
                "non-decreasing".to_string()
            } else {
                format!("violated at pair {:?}", self.offending.unwrap())
            }
        ));
        out
    }
}

/// Builds the trend verdict: a later point may dip below an earlier one only
/// while their Wilson intervals still overlap.
pub fn trend_report(points: &[TrendPoint]) -> Result<TrendReport, HarnessError> {
    if points.len() < 2 {
        return Err(HarnessError::Config {
            field: "trend.points".into(),
            msg: "need at least two parameter points".into(),
        });
    }
    if points.iter().any(|p| p.trials != points[0].trials) {
        return Err(HarnessError::Config {
            field: "trend.trials".into(),
            msg: "all points must share the trial count (paired seeds)".into(),
        });
    }
    let rows: Vec<TrendRow> = points
        .iter()
        .map(|p| {
            let (lo, hi) = wilson_interval(p.successes, p.trials, 1.96);
            TrendRow {
                param: p.param,
                successes: p.successes,
                trials: p.trials,
                frequency: p.successes as f64 / p.trials as f64,
                wilson_low: lo,
                wilson_high: hi,
            }
        })
        .collect();
    let mut offending = None;
    'outer: for i in 0..rows.len() {
        for j in (i + 1)..rows.len() {
            if rows[j].wilson_high < rows[i].wilson_low {
                offending = Some((i, j));
                break 'outer;
            }
        }
    }
    Ok(TrendReport {
        non_decreasing: offending.is_none(),
        offending,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_contains_the_point_estimate() {
        for &(s, n) in &[(0usize, 10usize), (10, 10), (5, 10), (97, 100), (1, 1000)] {
            let (lo, hi) = wilson_interval(s, n, 1.96);
            let p = s as f64 / n as f64;
            assert!(lo <= p && p <= hi, "({s}, {n})");
            assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
        }
    }

    #[test]
    fn constant_series_is_non_decreasing() {
        let pts = [
            TrendPoint {
                param: 1.0,
                successes: 50,
                trials: 50,
            },
            TrendPoint {
                param: 2.0,
                successes: 50,
                trials: 50,
            },
            TrendPoint {
                param: 3.0,
                successes: 50,
                trials: 50,
            },
        ];
        let rep = trend_report(&pts).unwrap();
        assert!(rep.non_decreasing);
        assert!(rep.offending.is_none());
    }

    #[test]
    fn sharp_decrease_is_flagged_with_the_pair() {
        let pts = [
            TrendPoint {
                param: 1.0,
                successes: 95,
                trials: 100,
            },
            TrendPoint {
                param: 2.0,
                successes: 10,
                trials: 100,
            },
        ];
        let rep = trend_report(&pts).unwrap();
        assert!(!rep.non_decreasing);
        assert_eq!(rep.offending, Some((0, 1)));
        assert!(rep.table().contains("violated"));
    }

    #[test]
    fn small_dips_within_overlap_pass() {
        let pts = [
            TrendPoint {
                param: 1.0,
                successes: 90,
                trials: 100,
            },
            TrendPoint {
                param: 2.0,
                successes: 87,
                trials: 100,
            },
        ];
        assert!(trend_report(&pts).unwrap().non_decreasing);
    }

    #[test]
    fn trend_rejects_degenerate_input() {
        let one = [TrendPoint {
            param: 1.0,
            successes: 1,
            trials: 2,
        }];
        assert!(trend_report(&one).is_err());
        let uneven = [
            TrendPoint {
                param: 1.0,
                successes: 1,
                trials: 2,
            },
            TrendPoint {
                param: 2.0,
                successes: 1,
                trials: 3,
            },
        ];
        assert!(trend_report(&uneven).is_err());
    }
}
