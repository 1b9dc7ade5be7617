use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::config::{Preset, ScenarioConfig};
use super::run::run_scenario;

/// Result of one swept value over all seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    /// Total MPC cost per seed, in seed order.
    pub costs: Vec<f64>,
    pub median_cost: f64,
    /// Runs that finished every lap.
    pub completed: usize,
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn sweep(configs: Vec<(f64, ScenarioConfig)>, seeds: usize) -> Result<Vec<SweepRow>> {
    let jobs: Vec<(usize, u64)> = (0..configs.len()).flat_map(|i| (0..seeds as u64).map(move |s| (i, s))).collect();
    let results: Vec<Result<(f64, bool)>> = jobs
        .par_iter()
        .map(|&(i, seed)| {
            let cfg = configs[i].1.clone().with_seed(seed);
            run_scenario(&cfg).map(|(_, m)| (m.total_mpc_cost, m.completed))
        })
        .collect();
    let mut rows: Vec<SweepRow> =
        configs.iter().map(|(v, _)| SweepRow { value: *v, costs: Vec::new(), median_cost: 0.0, completed: 0 }).collect();
    for (&(i, _), r) in jobs.iter().zip(results) {
        let (cost, done) = r?;
        rows[i].costs.push(cost);
        rows[i].completed += usize::from(done);
    }
    for row in &mut rows {
        row.median_cost = median(&row.costs);
    }
    Ok(rows)
}

fn check_sweep(len: usize, seeds: usize) -> Result<()> {
    if len < 2 {
        return Err(Error::Config(format!("a sweep needs at least two values, got {len}")));
    }
    if seeds < 3 {
        return Err(Error::Config(format!("a sweep needs at least three seeds, got {seeds}")));
    }
    Ok(())
}

fn strip_outputs(cfg: &ScenarioConfig) -> ScenarioConfig {
    let mut c = cfg.clone();
    c.output = Default::default();
    c
}

/// Median total MPC cost per bank size under the gradual-decay schedule,
/// over seeds `0..seeds`.
pub fn sweep_bank_size(cfg: &ScenarioConfig, n_list: &[usize], seeds: usize) -> Result<Vec<SweepRow>> {
    check_sweep(n_list.len(), seeds)?;
    let base = strip_outputs(cfg).with_preset(Preset::Exp1);
    let configs = n_list
        .iter()
        .map(|&n| {
            let mut c = base.clone();
            c.bank.n = n;
            c.validate().map(|_| (n as f64, c))
        })
        .collect::<Result<Vec<_>>>()?;
    sweep(configs, seeds)
}

/// Median total MPC cost per look-back window (seconds) under the
/// sudden-drop schedule, over seeds `0..seeds`.
pub fn sweep_window(cfg: &ScenarioConfig, w_list: &[f64], seeds: usize) -> Result<Vec<SweepRow>> {
    check_sweep(w_list.len(), seeds)?;
    let base = strip_outputs(cfg).with_preset(Preset::Exp2);
    let configs = w_list
        .iter()
        .map(|&w| {
            let mut c = base.clone();
            c.bank.window_s = w;
            c.validate().map(|_| (w, c))
        })
        .collect::<Result<Vec<_>>>()?;
    sweep(configs, seeds)
}
