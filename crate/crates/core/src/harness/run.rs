use std::path::Path;
use std::time::Instant;

use crate::bank::{predict_all_into, sample_bank, select_best, ErrorWindow, ModelBank};
use crate::dynamics::{schedule_eval, ControlInput, Dbm, ParamSchedule, TireSurfaceParams, VehicleState};
use crate::error::{Error, Result};
use crate::estimator::{raw_friction, FrictionEstimate};
use crate::mpc::{oracle_step, MpcSolver, Solution};
use crate::planner::{build_library, min_curvature_raceline, reference, RaceLine, VelocityProfileLibrary};
use crate::track::{dump_track, lap_counter, Track};

use super::config::{Controller, Planting, ScenarioConfig};
use super::metrics::{compute_metrics, Metrics, Timing};
use super::trace::{RunTrace, TraceRecord, NO_SELECTION};

/// Runs end when the vehicle is this many track widths off the centerline.
pub const DIVERGENCE_WIDTHS: f64 = 5.0;

/// Everything built from a config before the loop starts.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub cfg: ScenarioConfig,
    pub track: Track<f64>,
    pub raceline: RaceLine<f64>,
    pub library: VelocityProfileLibrary<f64>,
    pub bank: ModelBank<f64>,
    /// Ground truth, with planting applied.
    pub schedule: ParamSchedule<f64>,
    /// Bank index the plant starts from, if planted.
    pub planted_index: Option<usize>,
    /// Fixed vehicle parameters and nominal tires; also the warm-up model.
    pub nominal_model: Dbm<f64>,
}

impl Scenario {
    pub fn build(cfg: &ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        let track = cfg.track.build()?;
        let p = &cfg.planner;
        let raceline = min_curvature_raceline(&track, p.margin, p.raceline_iters, p.raceline_step)?;
        let library = build_library(&raceline, p.mu_min, p.mu_max, p.n_profiles, &p.limits)?;
        let nominal = cfg.nominal();
        let bank = sample_bank(&nominal, cfg.bank.range_fraction, cfg.bank.n, cfg.bank.seed)?;
        let planted_index = match cfg.plant.planted {
            Planting::None => None,
            Planting::Nearest => Some(bank.nearest(&cfg.plant.schedule.theta_0)),
            Planting::Index { index } => Some(index),
        };
        let mut schedule = cfg.plant.schedule;
        if let Some(j) = planted_index {
            schedule.theta_0 = bank.thetas[j];
        }
        let nominal_model = Dbm::new(cfg.vehicle, nominal, cfg.run.dt);
        Ok(Self { cfg: cfg.clone(), track, raceline, library, bank, schedule, planted_index, nominal_model })
    }

    /// Ground-truth friction coefficient of a parameter vector.
    pub fn friction_of(&self, theta: &TireSurfaceParams<f64>) -> f64 {
        raw_friction(theta.df, theta.dr, self.cfg.vehicle.m, self.cfg.vehicle.g)
    }

    /// Start pose: the first raceline vertex just past the start line, heading
    /// along the raceline, at the configured speed.
    pub fn initial_state(&self) -> VehicleState<f64> {
        let l = self.track.length();
        let path = &self.raceline.path;
        let i = (0..path.len())
            .find(|&i| {
                let s = self.track.project(path.points[i], None).s;
                s > 0.0 && s < 0.1 * l
            })
            .unwrap_or(0);
        VehicleState {
            x: path.points[i][0],
            y: path.points[i][1],
            phi: path.heading[i],
            vx: self.cfg.run.initial_speed,
            ..Default::default()
        }
    }

    pub fn dump_artifacts(&self) -> Result<()> {
        let o = &self.cfg.output;
        if let Some(p) = &o.dump_track {
            dump_track(&self.track, p)?;
        }
        if let Some(p) = &o.dump_library {
            self.library.dump_csv(&self.raceline, std::io::BufWriter::new(std::fs::File::create(p)?))?;
        }
        if let Some(p) = &o.dump_bank {
            self.bank.dump_binary(p)?;
        }
        Ok(())
    }

    /// The closed loop: select a model from the look-back window, update the
    /// friction estimate, plan a reference, solve the MPC, step the plant.
    pub fn run(&self) -> Result<RunTrace> {
        let cfg = &self.cfg;
        let dt = cfg.run.dt;
        let h = cfg.mpc.h_steps;
        let w_steps = cfg.window_steps()?;
        let length = self.track.length();
        let controller = cfg.run.controller;

        let mut window = ErrorWindow::new(w_steps, self.bank.len(), cfg.bank.weights)?;
        let mut estimate = FrictionEstimate::new(cfg.estimator.gamma, cfg.estimator.mu_init)?;
        let nominal_mu = self.friction_of(&self.nominal_model.theta);
        let mut solver = MpcSolver::new(cfg.mpc);
        let mut predictions = Vec::with_capacity(self.bank.len());

        let mut x = self.initial_state();
        let mut x_prev = x;
        let mut u_prev = ControlInput::zero();
        let mut warm: Option<Solution<f64>> = None;
        let mut pose = self.track.curvilinear(x.x, x.y, x.phi, None);
        let mut ref_hint: Option<f64> = None;
        let mut laps = 0u32;
        let mut trace = RunTrace { dt, laps_target: cfg.run.laps, diverged: false, records: Vec::new() };
        let max_steps = (cfg.run.max_time / dt).round() as usize;

        for k in 0..max_steps {
            let t = dt * k as f64;
            let progress = f64::from(laps) + pose.s / length;
            let theta_true = schedule_eval(&self.schedule, t, progress);
            let mu_true = self.friction_of(&theta_true);

            let started = Instant::now();
            if k > 0 && controller == Controller::Lla {
                predict_all_into(&self.bank, &self.nominal_model, &x_prev, &u_prev, dt, &mut predictions);
                window.update(&x, &predictions)?;
            }
            let (model, mu_ref, j_star) = match controller {
                Controller::Lla if window.is_warm() => {
                    let j = select_best(&window)?;
                    let theta = self.bank.thetas[j];
                    let mu = estimate.update(self.friction_of(&theta));
                    (self.nominal_model.with_theta(theta), mu, j as i64)
                }
                Controller::Lla => (self.nominal_model, estimate.mu, NO_SELECTION),
                Controller::Oracle => (self.nominal_model.with_theta(theta_true), mu_true, NO_SELECTION),
                Controller::FixedNominal => (self.nominal_model, nominal_mu, NO_SELECTION),
            };
            let r = reference(&self.raceline, &self.library, mu_ref, &x, h, dt, ref_hint);
            ref_hint = Some(r.s[0]);
            let sol = match controller {
                Controller::Oracle => {
                    oracle_step(&mut solver, &self.nominal_model, &self.schedule, t, progress, &x, &r, u_prev, warm.as_ref(), dt)
                }
                _ => solver.solve(&model, &x, &r, u_prev, warm.as_ref(), dt),
            };
            let u = sol.inputs[0];
            let compute_time = started.elapsed().as_secs_f64();

            let deviation = self.raceline.path.project([x.x, x.y], Some(r.s[0])).e_y.abs();
            trace.records.push(TraceRecord {
                t,
                x: x.x,
                y: x.y,
                phi: x.phi,
                vx: x.vx,
                vy: x.vy,
                omega: x.omega,
                delta: x.delta,
                d: u.d,
                ddelta: u.ddelta,
                mu_true,
                mu_hat: mu_ref,
                j_star,
                s: pose.s,
                e_y: pose.e_y,
                deviation,
                lap: laps,
                mpc_cost: sol.cost,
                compute_time,
            });
            if laps >= cfg.run.laps {
                break;
            }

            let plant = self.nominal_model.with_theta(theta_true);
            let next = match plant.advance(&x, &u, dt, cfg.plant.substeps) {
                Ok(next) => next,
                Err(Error::IntegrationDiverged(_)) => {
                    trace.diverged = true;
                    break;
                }
                Err(e) => return Err(e),
            };
            let next_pose = self.track.curvilinear(next.x, next.y, next.phi, Some(pose.s));
            laps += lap_counter(pose.s, next_pose.s, length);
            x_prev = x;
            x = next;
            pose = next_pose;
            u_prev = u;
            warm = Some(sol);

            let width = self.track.half_width_at(pose.s, 1.0) + self.track.half_width_at(pose.s, -1.0);
            if pose.e_y.abs() > DIVERGENCE_WIDTHS * width {
                trace.diverged = true;
                break;
            }
        }
        Ok(trace)
    }
}

/// Builds and runs a scenario, returning its trace and metrics.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<(RunTrace, Metrics)> {
    let sc = Scenario::build(cfg)?;
    let trace = sc.run()?;
    let metrics = compute_metrics(&trace, &sc.track);
    Ok((trace, metrics))
}

/// Writes `trace.csv`, `metrics.json` and `timing.json` into `dir`.
pub fn save_run(dir: impl AsRef<Path>, trace: &RunTrace, metrics: &Metrics) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    trace.save(dir.join("trace.csv"))?;
    std::fs::write(dir.join("metrics.json"), metrics.to_json())?;
    let timing = serde_json::to_string_pretty(&Timing::from_trace(trace))?;
    std::fs::write(dir.join("timing.json"), timing)?;
    Ok(())
}
