use serde::{Deserialize, Serialize};

use crate::track::{lap_counter, Track};

use super::trace::RunTrace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// Seconds per completed lap.
    pub lap_times: Vec<f64>,
    /// Seconds spent with the vehicle outside the track bounds.
    pub violation_time: f64,
    /// Mean distance to the raceline (m).
    pub mean_deviation: f64,
    /// Mean wall-clock time per control step (s). Not deterministic, so it is
    /// kept out of the serialized metrics; see [`Timing`].
    #[serde(skip)]
    pub avg_compute_time: f64,
    pub completed: bool,
    pub total_mpc_cost: f64,
    pub steps: usize,
    pub sim_time: f64,
}

impl Metrics {
    pub fn total_lap_time(&self) -> f64 {
        self.lap_times.iter().sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metrics serialize")
    }
}

/// Wall-clock statistics of a run, written next to the metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub avg_compute_time: f64,
    pub median_compute_time: f64,
    pub max_compute_time: f64,
}

impl Timing {
    pub fn from_trace(trace: &RunTrace) -> Self {
        let mut times: Vec<f64> = trace.records.iter().map(|r| r.compute_time).collect();
        times.sort_by(f64::total_cmp);
        let n = times.len();
        let median = match n {
            0 => 0.0,
            _ if n % 2 == 1 => times[n / 2],
            _ => 0.5 * (times[n / 2 - 1] + times[n / 2]),
        };
        Self {
            avg_compute_time: if n == 0 { 0.0 } else { times.iter().sum::<f64>() / n as f64 },
            median_compute_time: median,
            max_compute_time: times.last().copied().unwrap_or(0.0),
        }
    }
}

/// Metrics of a recorded run. Laps are counted where the recorded centerline
/// arc length wraps through the start line; a lap's time runs to the first
/// record past the line.
pub fn compute_metrics(trace: &RunTrace, track: &Track<f64>) -> Metrics {
    let recs = &trace.records;
    let length = track.length();
    let mut lap_times = Vec::new();
    let mut last_cross = recs.first().map_or(0.0, |r| r.t);
    let mut violations = 0usize;
    let mut deviation = 0.0;
    let mut cost = 0.0;
    let mut compute = 0.0;
    for (k, r) in recs.iter().enumerate() {
        if k > 0 && lap_counter(recs[k - 1].s, r.s, length) == 1 {
            lap_times.push(r.t - last_cross);
            last_cross = r.t;
        }
        if r.e_y.abs() > track.half_width_at(r.s, r.e_y) {
            violations += 1;
        }
        deviation += r.deviation.abs();
        cost += r.mpc_cost;
        compute += r.compute_time;
    }
    let n = recs.len().max(1) as f64;
    let completed = !trace.diverged && lap_times.len() as u32 >= trace.laps_target;
    Metrics {
        lap_times,
        violation_time: trace.dt * violations as f64,
        mean_deviation: deviation / n,
        avg_compute_time: compute / n,
        completed,
        total_mpc_cost: cost,
        steps: recs.len(),
        sim_time: trace.dt * recs.len() as f64,
    }
}
