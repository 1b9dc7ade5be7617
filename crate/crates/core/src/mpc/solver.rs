use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::bank::counter_bits;
use crate::dynamics::{schedule_eval, ControlInput, Dbm, ParamSchedule, VehicleState};
use crate::planner::ReferenceTrajectory;
use crate::scalar::Scalar;

use super::cost::Rollout;
use super::{InputBounds, MpcConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct Solution<T> {
    pub inputs: Vec<ControlInput<T>>,
    /// `H + 1` states, starting at the query state.
    pub predicted_states: Vec<VehicleState<T>>,
    pub cost: T,
    /// Best cost seen after each sampler iteration.
    pub iteration_costs: Vec<T>,
}

impl<T: Scalar> Solution<T> {
    /// Warm start for the next period: drop the first input, repeat the last.
    pub fn shifted(&self) -> Vec<ControlInput<T>> {
        let mut out: Vec<_> = self.inputs.iter().skip(1).copied().collect();
        if let Some(last) = self.inputs.last() {
            out.push(*last);
        }
        out
    }
}

/// Sampling-based receding-horizon solver. Each call draws its noise from a
/// stream keyed by the configured seed and the call index.
#[derive(Debug, Clone)]
pub struct MpcSolver {
    pub cfg: MpcConfig,
    calls: u64,
}

fn clamp_input<T: Scalar>(u: ControlInput<T>, b: &InputBounds) -> ControlInput<T> {
    let dd = T::lit(b.ddelta_max);
    ControlInput { d: u.d.max(T::lit(b.d_min)).min(T::lit(b.d_max)), ddelta: u.ddelta.max(-dd).min(dd) }
}

impl MpcSolver {
    pub fn new(cfg: MpcConfig) -> Self {
        Self { cfg, calls: 0 }
    }

    pub fn calls(&self) -> u64 {
        self.calls
    }

    pub fn reset(&mut self) {
        self.calls = 0;
    }

    /// Optimizes `H` inputs for `model` from `x0`. `u_prev` is the input applied
    /// in the last period; `warm_start` is the previous solution, if any.
    pub fn solve<T: Scalar>(
        &mut self,
        model: &Dbm<T>,
        x0: &VehicleState<T>,
        reference: &ReferenceTrajectory<T>,
        u_prev: ControlInput<T>,
        warm_start: Option<&Solution<T>>,
        dt: T,
    ) -> Solution<T> {
        let stream = counter_bits(self.cfg.sampler.seed, self.calls, 0);
        self.calls += 1;
        solve_with_stream(&self.cfg, stream, model, x0, reference, u_prev, warm_start, dt)
    }
}

#[allow(clippy::too_many_arguments)]
fn solve_with_stream<T: Scalar>(
    cfg: &MpcConfig,
    stream: u64,
    model: &Dbm<T>,
    x0: &VehicleState<T>,
    reference: &ReferenceTrajectory<T>,
    u_prev: ControlInput<T>,
    warm_start: Option<&Solution<T>>,
    dt: T,
) -> Solution<T> {
    let h = cfg.h_steps;
    let sc = &cfg.sampler;
    let rollout = Rollout { model, x0, reference, cfg, u_prev, dt };

    let zero = vec![ControlInput::zero(); h];
    let warm: Vec<ControlInput<T>> = match warm_start {
        Some(w) if w.inputs.len() == h => w.shifted().into_iter().map(|u| clamp_input(u, &cfg.bounds)).collect(),
        _ => zero.clone(),
    };

    // All noise is drawn up front so that parallel evaluation cannot change it.
    let mut rng = ChaCha8Rng::seed_from_u64(stream);
    let noise: Vec<[f64; 2]> = (0..sc.iterations * sc.samples * h)
        .map(|_| [StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)])
        .collect();

    let mut mean = warm.clone();
    let mut sigma = [sc.noise_d, sc.noise_ddelta];
    let mut best_cost = T::infinity();
    let mut best = zero.clone();
    let mut iteration_costs = Vec::with_capacity(sc.iterations);
    let mut candidates: Vec<Vec<ControlInput<T>>> = Vec::with_capacity(sc.samples + 3);
    let mut costs: Vec<T> = Vec::new();

    for it in 0..sc.iterations {
        candidates.clear();
        candidates.push(warm.clone());
        candidates.push(zero.clone());
        candidates.push(mean.clone());
        for m in 0..sc.samples {
            let base = (it * sc.samples + m) * h;
            let seq = (0..h)
                .map(|k| {
                    let [nd, ns] = noise[base + k];
                    let u = ControlInput::new(mean[k].d + T::lit(sigma[0] * nd), mean[k].ddelta + T::lit(sigma[1] * ns));
                    clamp_input(u, &cfg.bounds)
                })
                .collect();
            candidates.push(seq);
        }
        candidates.par_iter().with_min_len(4).map(|c| rollout.evaluate(c, None)).collect_into_vec(&mut costs);

        let mut order: Vec<usize> = (0..candidates.len()).collect();
        order.sort_by(|&a, &b| costs[a].partial_cmp(&costs[b]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
        if costs[order[0]] < best_cost {
            best_cost = costs[order[0]];
            best = candidates[order[0]].clone();
        }
        iteration_costs.push(best_cost);

        let elites = &order[..sc.elite_count.min(order.len())];
        let scale = T::lit(1.0 / elites.len() as f64);
        for (k, mk) in mean.iter_mut().enumerate() {
            let (sd, ss) = elites.iter().fold((T::zero(), T::zero()), |(a, b), &e| (a + candidates[e][k].d, b + candidates[e][k].ddelta));
            *mk = clamp_input(ControlInput::new(sd * scale, ss * scale), &cfg.bounds);
        }
        sigma = [sigma[0] * sc.noise_decay, sigma[1] * sc.noise_decay];
    }

    let mut states = Vec::with_capacity(h + 1);
    let cost = rollout.evaluate(&best, Some(&mut states));
    Solution { inputs: best, predicted_states: states, cost, iteration_costs }
}

/// Controller with perfect knowledge: the model uses the plant's current
/// parameters. The caller builds `reference` from the true friction.
#[allow(clippy::too_many_arguments)]
pub fn oracle_step<T: Scalar>(
    solver: &mut MpcSolver,
    template: &Dbm<T>,
    schedule: &ParamSchedule<T>,
    t: f64,
    progress: f64,
    x0: &VehicleState<T>,
    reference: &ReferenceTrajectory<T>,
    u_prev: ControlInput<T>,
    warm_start: Option<&Solution<T>>,
    dt: T,
) -> Solution<T> {
    let model = template.with_theta(schedule_eval(schedule, t, progress));
    solver.solve(&model, x0, reference, u_prev, warm_start, dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{FrictionChange, TireSurfaceParams, VehicleFixedParams};
    use crate::mpc::rollout_cost;

    fn model() -> Dbm<f64> {
        Dbm::new(VehicleFixedParams::default(), TireSurfaceParams::default(), 0.02)
    }

    fn arc_ref(h: usize, v: f64, radius: f64) -> ReferenceTrajectory<f64> {
        let mut r = ReferenceTrajectory {
            s: vec![],
            x: vec![],
            y: vec![],
            phi: vec![],
            v: vec![],
            offset: vec![0.0; h + 1],
            hw_left: vec![0.2; h + 1],
            hw_right: vec![0.2; h + 1],
        };
        for k in 0..=h {
            let s = v * 0.02 * k as f64;
            let a = s / radius;
            r.s.push(s);
            r.x.push(radius * a.sin());
            r.y.push(radius * (1.0 - a.cos()));
            r.phi.push(a);
            r.v.push(v);
        }
        r
    }

    fn x0() -> VehicleState<f64> {
        VehicleState { vx: 1.2, ..Default::default() }
    }

    #[test]
    fn dominates_warm_start_and_zero() {
        let cfg = MpcConfig::default();
        let m = model();
        let r = arc_ref(cfg.h_steps, 1.5, 0.6);
        let mut solver = MpcSolver::new(cfg);
        let first = solver.solve(&m, &x0(), &r, ControlInput::zero(), None, 0.02);
        let next = VehicleState { x: 0.02, y: 0.01, ..x0() };
        let sol = solver.solve(&m, &next, &r, first.inputs[0], Some(&first), 0.02);
        let warm = rollout_cost(&m, &next, &first.shifted(), &r, &cfg, first.inputs[0], 0.02).0;
        let zero = rollout_cost(&m, &next, &vec![ControlInput::zero(); cfg.h_steps], &r, &cfg, first.inputs[0], 0.02).0;
        assert!(sol.cost <= warm && sol.cost <= zero);
        assert!(sol.cost.is_finite());
        assert_eq!(sol.predicted_states[0], next);
        assert_eq!(sol.predicted_states.len(), cfg.h_steps + 1);
        for u in &sol.inputs {
            assert!(u.d >= cfg.bounds.d_min && u.d <= cfg.bounds.d_max);
            assert!(u.ddelta.abs() <= cfg.bounds.ddelta_max);
        }
    }

    #[test]
    fn stationary_reference_prefers_zero_input() {
        let cfg = MpcConfig::default();
        // without rolling resistance a parked car stays put under zero input
        let mut m = model();
        m.theta.cro = 0.0;
        m.theta.cd = 0.0;
        let h = cfg.h_steps;
        let r = ReferenceTrajectory {
            s: vec![0.0; h + 1],
            x: vec![0.0; h + 1],
            y: vec![0.0; h + 1],
            phi: vec![0.0; h + 1],
            v: vec![0.0; h + 1],
            offset: vec![0.0; h + 1],
            hw_left: vec![0.2; h + 1],
            hw_right: vec![0.2; h + 1],
        };
        let x = VehicleState::default();
        let sol = MpcSolver::new(cfg).solve(&m, &x, &r, ControlInput::zero(), None, 0.02);
        let zero = rollout_cost(&m, &x, &vec![ControlInput::zero(); h], &r, &cfg, ControlInput::zero(), 0.02).0;
        assert_eq!(zero, 0.0);
        assert_eq!(sol.cost, 0.0);
        assert!(sol.inputs.iter().all(|u| *u == ControlInput::zero()));
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let cfg = MpcConfig::default();
        let m = model();
        let r = arc_ref(cfg.h_steps, 1.5, 0.6);
        let a = MpcSolver::new(cfg).solve(&m, &x0(), &r, ControlInput::zero(), None, 0.02);
        let b = MpcSolver::new(cfg).solve(&m, &x0(), &r, ControlInput::zero(), None, 0.02);
        assert_eq!(a, b);
    }

    #[test]
    fn iteration_costs_never_increase() {
        let mut cfg = MpcConfig::default();
        cfg.sampler.iterations = 8;
        let m = model();
        let r = arc_ref(cfg.h_steps, 1.8, 0.5);
        let sol = MpcSolver::new(cfg).solve(&m, &x0(), &r, ControlInput::zero(), None, 0.02);
        assert_eq!(sol.iteration_costs.len(), 8);
        assert!(sol.iteration_costs.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*sol.iteration_costs.last().unwrap(), sol.cost);
    }

    #[test]
    fn thread_count_does_not_matter() {
        let cfg = MpcConfig::default();
        let m = model();
        let r = arc_ref(cfg.h_steps, 1.5, 0.6);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| MpcSolver::new(cfg).solve(&m, &x0(), &r, ControlInput::zero(), None, 0.02))
        };
        assert_eq!(run(1), run(8));
    }

    #[test]
    fn oracle_with_constant_schedule_matches_solve() {
        let cfg = MpcConfig::default();
        let m = model();
        let r = arc_ref(cfg.h_steps, 1.5, 0.6);
        let sched = ParamSchedule::constant(TireSurfaceParams::default());
        let a = oracle_step(&mut MpcSolver::new(cfg), &m, &sched, 3.0, 0.4, &x0(), &r, ControlInput::zero(), None, 0.02);
        let b = MpcSolver::new(cfg).solve(&m, &x0(), &r, ControlInput::zero(), None, 0.02);
        assert_eq!(a, b);

        let drop = ParamSchedule { change: FrictionChange::LinearDecay { rate: 0.02 }, ..sched };
        let c = oracle_step(&mut MpcSolver::new(cfg), &m, &drop, 10.0, 0.4, &x0(), &r, ControlInput::zero(), None, 0.02);
        let expect = MpcSolver::new(cfg).solve(&m.with_theta(schedule_eval(&drop, 10.0, 0.4)), &x0(), &r, ControlInput::zero(), None, 0.02);
        assert_eq!(c, expect);
    }

    #[test]
    fn successive_calls_use_fresh_noise() {
        let cfg = MpcConfig::default();
        let m = model();
        let r = arc_ref(cfg.h_steps, 1.5, 0.6);
        let mut s = MpcSolver::new(cfg);
        let a = s.solve(&m, &x0(), &r, ControlInput::zero(), None, 0.02);
        let b = s.solve(&m, &x0(), &r, ControlInput::zero(), None, 0.02);
        assert_eq!(s.calls(), 2);
        assert_ne!(a.inputs, b.inputs);
    }
}
