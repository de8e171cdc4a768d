//! One line per acceptance criterion. Exits non-zero if any criterion fails.

use std::path::{Path, PathBuf};
use std::time::Instant;

use hrom_core::contact::{ground_reaction_force, ContactParams};
use hrom_core::dynamics::{angular_momentum, mechanical_energy};
use hrom_core::gait::{
    build_trot_schedule, inverse_kinematics, leg_forward, sequencer_step, BezierCurve, GaitError, GaitParams, LegWorkspace,
    SequencerState,
};
use hrom_core::integrator::rk4_step;
use hrom_core::linmpc::{discretize, numerical_jacobian, solve_mpc, LinearModel, MpcConfig};
use hrom_core::nalgebra::{DMatrix, DVector, SymmetricEigen};
use hrom_core::sim::{run_simulation, ScenarioConfig, SimLog};
use hrom_core::Vector3;
use hrom_sim::config::load_scenario;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn scenario(name: &str) -> ScenarioConfig {
    let path: PathBuf = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name);
    load_scenario(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display())).config
}

fn simulate(config: &ScenarioConfig) -> SimLog {
    run_simulation(config).unwrap_or_else(|e| panic!("simulation failed: {e}"))
}

fn rk4_order() -> Outcome {
    let error = |steps: usize| {
        let dt = 2.0 * std::f64::consts::PI / steps as f64;
        let f = |x: &[f64; 2], _: &()| Ok::<_, std::convert::Infallible>([x[1], -x[0]]);
        let mut x = [1.0, 0.0];
        for _ in 0..steps {
            x = rk4_step(f, &x, &(), dt).unwrap();
        }
        (x[0] - 1.0).hypot(x[1])
    };
    let ratios: Vec<f64> = [25, 50, 100, 200].iter().map(|&n| error(n) / error(2 * n)).collect();
    let pass = ratios.iter().all(|r| (12.0..=20.0).contains(r));
    outcome(pass, format!("error ratios on halving dt {:.2?}, band [12, 20]", ratios))
}

fn conservation() -> Outcome {
    let config = scenario("free_body.cfg");
    let log = simulate(&config);
    let robot = &config.robot;
    let e0 = mechanical_energy(robot, &log.rows[0].state.body);
    let h0 = angular_momentum(robot, &log.rows[0].state.body).norm();
    let bodies = log.rows.iter().map(|r| r.state.body).chain([log.final_state.body]);
    let (mut de, mut dh): (f64, f64) = (0.0, 0.0);
    for b in bodies {
        de = de.max(((mechanical_energy(robot, &b) - e0) / e0).abs());
        dh = dh.max(((angular_momentum(robot, &b).norm() - h0) / h0).abs());
    }
    let contact = log.rows.iter().any(|r| r.in_contact.iter().any(|&c| c));
    let pass = de < 1e-6 && dh < 1e-6 && !contact && log.steps == 10_000;
    outcome(pass, format!("{} steps, energy drift {de:.2e}, angular momentum drift {dh:.2e} (< 1e-6)", log.steps))
}

fn jacobian_oracle() -> Outcome {
    let (g, l, th) = (9.81, 0.7, 0.3);
    let pend = numerical_jacobian(
        |x: &DVector<f64>, _: &DVector<f64>| Ok::<_, ()>(DVector::from_column_slice(&[x[1], -(g / l) * x[0].sin()])),
        |x: &DVector<f64>| x.clone(),
        &DVector::from_column_slice(&[th, 0.0]),
        &DVector::zeros(0),
        0,
        1e-5,
    )
    .unwrap();
    let exact = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -(g / l) * th.cos(), 0.0]);
    let rel = (&pend.a - &exact).norm() / exact.norm();

    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut lti_err: f64 = 0.0;
    for _ in 0..100 {
        let a = DMatrix::from_fn(4, 4, |_, _| rng.random_range(-5.0..5.0));
        let b = DMatrix::from_fn(4, 3, |_, _| rng.random_range(-5.0..5.0));
        let x0 = DVector::from_fn(4, |_, _| rng.random_range(-2.0..2.0));
        let u0 = DVector::from_fn(3, |_, _| rng.random_range(-2.0..2.0));
        let lin = numerical_jacobian(
            |x: &DVector<f64>, u: &DVector<f64>| Ok::<_, ()>(&a * x + &b * u),
            |x: &DVector<f64>| x.clone(),
            &x0,
            &u0,
            2,
            1e-5,
        )
        .unwrap();
        lti_err = lti_err.max((&lin.a - &a).amax()).max((lin.b() - &b).amax());
    }
    let pass = rel < 1e-6 && lti_err < 1e-9;
    outcome(pass, format!("pendulum relative error {rel:.2e} (< 1e-6), LTI recovery error {lti_err:.2e} (< 1e-9)"))
}

fn scalar_config(horizon: usize, q: f64, r: f64, bound: f64, dt: f64) -> MpcConfig {
    MpcConfig {
        horizon,
        dt,
        q: DVector::from_element(1, q),
        r: DVector::from_element(1, r),
        u_min: DVector::from_element(1, -bound),
        u_max: DVector::from_element(1, bound),
        tolerance: 1e-10,
        ..MpcConfig::default()
    }
}

fn mpc_oracle() -> Outcome {
    let model = LinearModel {
        a: DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]),
        b_e: DMatrix::from_row_slice(2, 1, &[0.0, 1.0]),
        b_j: DMatrix::zeros(2, 0),
        c: DMatrix::from_row_slice(1, 2, &[1.0, 0.0]),
        x0: DVector::zeros(2),
        u0: DVector::zeros(1),
        f0: DVector::zeros(2),
        g0: DVector::zeros(1),
    };
    let cfg = scalar_config(3, 1e3, 1e-2, 1.0, 0.5);
    let x = DVector::from_column_slice(&[1.0, 0.5]);
    let reference = vec![DVector::zeros(1); 3];
    let d = discretize(&model, cfg.dt).unwrap();
    let rollout = |u: &[f64]| {
        let mut xk = x.clone();
        let mut cost = 0.0;
        for &uk in u {
            xk = d.step(&xk, &DVector::from_element(1, uk));
            let y = (&model.c * &xk)[0];
            cost += cfg.q[0] * y * y + cfg.r[0] * uk * uk;
        }
        cost
    };
    let sol = solve_mpc(&x, &reference, &model, &cfg).unwrap();

    let step = 0.05;
    let grid: Vec<f64> = (0..=40).map(|i| -1.0 + step * i as f64).collect();
    let mut best = f64::INFINITY;
    for &a in &grid {
        for &b in &grid {
            for &c in &grid {
                best = best.min(rollout(&[a, b, c]));
            }
        }
    }
    // The cost is quadratic, so second differences give its Hessian exactly
    // up to roundoff; the nearest grid point then lies within this bound.
    let hess = DMatrix::from_fn(3, 3, |i, j| {
        let e = |k: usize, s: f64| {
            let mut u = [0.0; 3];
            u[k] += s;
            u
        };
        let mix = |si: f64, sj: f64| {
            let (a, b) = (e(i, si), e(j, sj));
            rollout(&[a[0] + b[0], a[1] + b[1], a[2] + b[2]])
        };
        (mix(1.0, 1.0) - mix(1.0, -1.0) - mix(-1.0, 1.0) + mix(-1.0, -1.0)) / 4.0
    });
    let lmax = SymmetricEigen::new(hess).eigenvalues.max();
    let bound = 0.5 * lmax * 3.0 * (step / 2.0) * (step / 2.0);
    let grid_ok = sol.cost <= best + 1e-9 && best - sol.cost <= bound && sol.sequence.iter().all(|u| u.abs() <= 1.0);

    let one = LinearModel {
        a: DMatrix::from_element(1, 1, -0.7),
        b_e: DMatrix::from_element(1, 1, 2.0),
        b_j: DMatrix::zeros(1, 0),
        c: DMatrix::from_element(1, 1, 1.5),
        x0: DVector::zeros(1),
        u0: DVector::zeros(1),
        f0: DVector::zeros(1),
        g0: DVector::zeros(1),
    };
    let (q, r, dt, x1, y_ref) = (4.0, 0.3, 0.1, 0.8, 0.25);
    let cfg1 = scalar_config(1, q, r, f64::INFINITY, dt);
    let sol1 = solve_mpc(&DVector::from_element(1, x1), &[DVector::from_element(1, y_ref)], &one, &cfg1).unwrap();
    let (a_d, b_d, c) = (-0.7 * dt, 2.0 * dt, 1.5);
    let exact = -b_d * c * q * (c * (x1 + a_d * x1) - y_ref) / (b_d * c * q * c * b_d + r);
    let closed = (sol1.u_e[0] - exact).abs();

    let pass = grid_ok && closed < 1e-8;
    outcome(
        pass,
        format!(
            "N = 3 cost {:.6} vs grid min {:.6} (gap bound {bound:.2e}); N = 1 closed-form error {closed:.1e} (< 1e-8)",
            sol.cost, best
        ),
    )
}

fn fk_ik() -> Outcome {
    let ws = LegWorkspace { min: 0.2, max: 0.6 };
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut worst: f64 = 0.0;
    let mut n = 0;
    while n < 1000 {
        let d: Vector3<f64> = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..0.0));
        let len = d.norm();
        if !(0.1..=1.0).contains(&len) || d.x.hypot(d.z) < 0.05 * len {
            continue;
        }
        let target = d / len * rng.random_range(ws.min..ws.max);
        let q = inverse_kinematics(&target, &ws).unwrap();
        worst = worst.max((leg_forward(&q) - target).amax());
        n += 1;
    }
    let degenerate = matches!(inverse_kinematics(&Vector3::new(0.0, 0.4, 0.0), &ws), Err(GaitError::DegenerateLeg { .. }));
    outcome(worst < 1e-9 && degenerate, format!("1000 targets, sup error {worst:.1e} (< 1e-9); lateral ray rejected: {degenerate}"))
}

fn bezier() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let mut point = || Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let mut ends_exact = true;
    let mut in_box = true;
    let mut lerp_err: f64 = 0.0;
    for k in 0..1000 {
        let n = 2 + k % 7;
        let curve = BezierCurve::new((0..n).map(|_| point()).collect()).unwrap();
        ends_exact &= curve.eval(0.0).unwrap() == curve.first() && curve.eval(1.0).unwrap() == curve.last();
        let (lo, hi) = curve.bounding_box();
        for j in 0..=16 {
            let p = curve.eval(j as f64 / 16.0).unwrap();
            in_box &= (0..3).all(|a| lo[a] - 1e-12 <= p[a] && p[a] <= hi[a] + 1e-12);
        }
        let (a, b) = (point(), point());
        let line = BezierCurve::new(vec![a, b]).unwrap();
        let s = (k as f64 + 0.5) / 1000.0;
        lerp_err = lerp_err.max((line.eval(s).unwrap() - (a + (b - a) * s)).amax());
    }

    let gait = GaitParams { num_steps: 3, swing_out: 0.03, ..GaitParams::default() };
    let schedule = build_trot_schedule(&gait, &LegWorkspace { min: 0.2, max: 0.6 }).unwrap();
    let blocks = schedule.stages[0].blocks();
    let mut seam: f64 = 0.0;
    for (a, b) in [(&blocks[0], &blocks[1]), (&blocks[1], &blocks[0])] {
        for i in 0..4 {
            seam = seam.max((a.curves()[i].last() - b.curves()[i].first()).amax());
        }
    }
    // Sequenced output crosses every seam without a jump.
    let mut state = SequencerState::new(gait.neutral_foot);
    let mut prev = gait.neutral_foot;
    let mut jump: f64 = 0.0;
    while !state.finished {
        let (out, next) = sequencer_step(&schedule, &state, 1e-3);
        for i in 0..4 {
            jump = jump.max((out.targets[i] - prev[i]).amax());
        }
        prev = out.targets;
        state = next;
    }
    let pass = ends_exact && in_box && lerp_err < 1e-12 && seam < 1e-9 && jump < 2e-3;
    outcome(
        pass,
        format!(
            "endpoints exact: {ends_exact}; lerp error {lerp_err:.1e}; box membership: {in_box}; block seam gap {seam:.1e} (< 1e-9), largest per-step target change {jump:.1e} m"
        ),
    )
}

fn grf() -> Outcome {
    let p = ContactParams { k_gz: 1e4, k_dz: 200.0, mu_c: 0.3, mu_s: 0.5, mu_v: 0.1, v_s: 0.05, ground_height: 0.0 };
    let above = ground_reaction_force(&p, &Vector3::new(0.1, 0.0, 0.002), &Vector3::new(1.0, -1.0, -0.5)).force.amax();
    let depth = 0.003;
    let spring = ground_reaction_force(&p, &Vector3::new(0.0, 0.0, -depth), &Vector3::zeros());
    let spring_err = (spring.force - Vector3::new(0.0, 0.0, p.k_gz * depth)).amax();
    let v = 10.0;
    let slide = ground_reaction_force(&p, &Vector3::new(0.0, 0.0, -depth), &Vector3::new(0.0, -v, 0.0));
    let coulomb = (slide.force.y - (p.mu_c * p.k_gz * depth + p.mu_v * v)).abs();
    let pass = above == 0.0 && spring_err < 1e-12 && coulomb < 1e-12;
    outcome(pass, format!("above ground |F| {above:.1e}, static spring error {spring_err:.1e}, Coulomb asymptote error {coulomb:.1e} (< 1e-12)"))
}

struct TrotRuns {
    pid: SimLog,
    open: SimLog,
    stand: SimLog,
}

fn trot(runs: &TrotRuns) -> Outcome {
    let m = runs.pid.metrics().unwrap();
    let roll_max = runs.pid.rows.iter().map(|r| r.euler.roll.abs()).chain([0.0]).fold(0.0, f64::max);
    let pass = (1.0..=2.2).contains(&m.forward_displacement) && roll_max < 0.3 && m.gait_cycles == 10;
    outcome(
        pass,
        format!(
            "pid_roll: forward {:.3} m in {:.1} s (band [1.0, 2.2]), max |roll| {roll_max:.4} rad (< 0.3), {} gait cycles",
            m.forward_displacement,
            runs.pid.steps as f64 * 1e-3,
            m.gait_cycles
        ),
    )
}

fn ablation(runs: &TrotRuns) -> Outcome {
    let pid = runs.pid.metrics().unwrap();
    let open = runs.open.metrics().unwrap();
    let stand = runs.stand.metrics().unwrap();
    let upright = runs.stand.rows.iter().all(|r| r.euler.roll.abs() < 0.05 && r.euler.pitch.abs() < 0.05);
    let pass = pid.roll_rms < open.roll_rms && open.cone_violations >= 1 && stand.cone_violations == 0 && upright;
    outcome(
        pass,
        format!(
            "roll RMS pid {:.4} < open loop {:.4}; open-loop cone violations {}; static stand violations {}, upright: {upright}",
            pid.roll_rms, open.roll_rms, open.cone_violations, stand.cone_violations
        ),
    )
}

fn narrow() -> Outcome {
    let config = scenario("narrow.cfg");
    let log = simulate(&config);
    let m = log.metrics().unwrap();
    let swing_out = config.gait.swing_out;
    let ratios = m.lateral_excursion.map(|e| e / swing_out);
    let excursion_ok = ratios.iter().all(|r| (0.8..=1.2).contains(r));
    let pass = log.steps == config.step_count()
        && m.forward_displacement > 0.5
        && excursion_ok
        && m.min_foot_separation >= config.foot_clearance;
    outcome(
        pass,
        format!(
            "forward {:.3} m (> 0.5), lateral excursion / swing_out {:.3?} (band [0.8, 1.2]), min foot separation {:.3} m (clearance {})",
            m.forward_displacement, ratios, m.min_foot_separation, config.foot_clearance
        ),
    )
}

fn mpc_regulation() -> Outcome {
    let config = scenario("mpc_regulation.cfg");
    let log = simulate(&config);
    let last_large = log.rows.iter().rposition(|r| r.euler.roll.abs() >= 0.01);
    let settle = last_large.map_or(0.0, |k| log.rows[k].time + config.dt);
    let final_roll = hrom_core::rotation::euler_angles_from_rotation(&log.final_state.body.rotation).roll;
    let contact = log.rows.iter().any(|r| r.in_contact.iter().any(|&c| c));
    let pass = (log.rows[0].euler.roll - 0.1).abs() < 1e-12 && settle <= 2.0 && final_roll.abs() < 0.01 && !contact;
    outcome(
        pass,
        format!(
            "N = {}, dt = {}, Q = {:?}, R = {:?}: |roll| < 0.01 from t = {settle:.3} s, final {final_roll:.1e}, {} solves, {} at iteration cap",
            config.mpc.horizon,
            config.mpc.dt,
            config.mpc.q.as_slice(),
            config.mpc.r.as_slice(),
            log.mpc_solves,
            log.mpc_warnings
        ),
    )
}

fn main() {
    let mut failed = 0;
    let mut report = |id: u32, name: &str, limit: f64, run: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let out = run();
        let secs = start.elapsed().as_secs_f64();
        let pass = out.pass && secs < limit;
        if !pass {
            failed += 1;
        }
        println!("{} {id:>2} {name}: {} [{secs:.2} s, limit {limit:.0} s]", if pass { "PASS" } else { "FAIL" }, out.detail);
    };

    report(1, "RK4 order", 1.0, &mut rk4_order);
    report(2, "free-body conservation", 5.0, &mut conservation);
    report(3, "Jacobian oracle", 10.0, &mut jacobian_oracle);
    report(4, "MPC oracle", 10.0, &mut mpc_oracle);
    report(5, "FK/IK round trip", 10.0, &mut fk_ik);
    report(6, "Bezier properties", 10.0, &mut bezier);
    report(7, "GRF closed forms", 1.0, &mut grf);

    let start = Instant::now();
    let runs = TrotRuns {
        pid: simulate(&scenario("trot.cfg")),
        open: simulate(&scenario("trot_open.cfg")),
        stand: simulate(&scenario("stand.cfg")),
    };
    let sim_secs = start.elapsed().as_secs_f64();
    println!("     trot, open-loop trot and stand simulated in {sim_secs:.2} s");
    report(8, "trot reproduction", 60.0 - sim_secs, &mut || trot(&runs));
    report(9, "ablation ordering", 60.0 - sim_secs, &mut || ablation(&runs));
    report(10, "narrow path", 60.0, &mut narrow);
    report(11, "MPC regulation", 30.0, &mut mpc_regulation);

    println!("{} of 11 criteria passed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
