//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with the measured quantity (run with `--nocapture` to see
//! them).
//!
//! The long directional experiment (criterion 8) is `#[ignore]`d because it
//! trains 2 modes × 5 seeds × 5,000 episodes (hours of CPU); run it with
//!
//! ```text
//! cargo test -p uam-cli --release --test acceptance -- --ignored --nocapture
//! ```
//!
//! It caches finished per-job metrics under `runs/directional/`, so an
//! interrupted run resumes where it left off.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use uam_cli::{summarize_comparison, FullConfig, ModeMetrics, SeedComparison};
use uam_energy::{
    charge, cruise_power, discharge, energy_for_step, hover_power, BatterySpec, BatteryState,
    UamSpec,
};
use uam_net::{masked_softmax_rows, AdamState, CommNetPolicy, CriticNet, DnnPolicy};
use uam_sim::{check_invariants, Action, PassengerStatus, SimConfig, SimState, NUM_ACTIONS};
use uam_train::{actor_update, evaluate, sample_masked, train, Mode, ReplayBuffer, Trainer,
    TrainerConfig, Transition};

fn pass(line: &str) {
    println!("PASS: {line}");
}

// ---------------------------------------------------------------------
// Criterion 1: energy-model oracle equivalence.
// ---------------------------------------------------------------------

#[test]
fn criterion_1_energy_model_oracle_equivalence() {
    // Independent direct evaluation of the hover and cruise formulas,
    // written as one straight-line expression each.
    let spec = UamSpec::joby_s4();
    let (delta, rho, s, area) = (
        spec.profile_drag_coefficient,
        spec.air_density_kg_m3,
        spec.rotor_solidity,
        spec.disc_area_m2,
    );
    let (omega, radius, k, weight) = (
        spec.blade_angular_velocity_rad_s,
        spec.rotor_radius_m,
        spec.induced_power_factor,
        spec.weight_n,
    );
    let (v, v0, tip, d0) = (
        spec.flight_speed_m_s,
        spec.mean_induced_velocity_m_s,
        spec.tip_speed_m_s,
        spec.fuselage_drag_ratio,
    );

    let p0_oracle = delta / 8.0 * rho * s * area * omega * omega * omega * radius * radius * radius;
    let pi_oracle = (1.0 + k) * weight.powf(1.5) / (2.0 * rho * area).sqrt();
    let hover = hover_power(&spec, 0.0).unwrap();
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    assert!(rel(hover.blade_profile_w, p0_oracle) < 1e-12);
    assert!(rel(hover.induced_w, pi_oracle) < 1e-12);

    let pp_oracle = pi_oracle
        * ((1.0 + v.powi(4) / (4.0 * v0.powi(4))).sqrt() - v * v / (2.0 * v0 * v0)).sqrt()
        + p0_oracle * (1.0 + 3.0 * v * v / (tip * tip))
        + 0.5 * d0 * rho * s * area * v * v * v;
    let cruise = cruise_power(&spec, v, 0.0).unwrap();
    assert!(rel(cruise.total_w(), pp_oracle) < 1e-12);

    // v -> 0 identity over 1,000 randomized consistent specs.
    let mut rng = ChaCha8Rng::seed_from_u64(424242);
    for _ in 0..1000 {
        let radius = rng.gen_range(0.5..3.0);
        let blades: u32 = rng.gen_range(2..8);
        let area = std::f64::consts::PI * radius * radius;
        let solidity = 0.2231 * blades as f64 / (std::f64::consts::PI * radius);
        let spec = UamSpec {
            seat_count: 4,
            flight_speed_m_s: rng.gen_range(20.0..150.0),
            mass_kg: 1000.0,
            weight_n: rng.gen_range(5_000.0..40_000.0),
            rotor_radius_m: radius,
            disc_area_m2: area,
            blade_count: blades,
            rotor_solidity: solidity,
            blade_angular_velocity_rad_s: rng.gen_range(20.0..120.0),
            tip_speed_m_s: 0.0, // set below
            air_density_kg_m3: rng.gen_range(0.8..1.3),
            fuselage_drag_ratio: 0.0151 / (solidity * area),
            mean_induced_velocity_m_s: rng.gen_range(5.0..60.0),
            profile_drag_coefficient: rng.gen_range(0.01..0.1),
            induced_power_factor: rng.gen_range(0.01..0.2),
        };
        let spec = UamSpec {
            tip_speed_m_s: spec.blade_angular_velocity_rad_s * spec.rotor_radius_m,
            ..spec
        };
        spec.validate().unwrap();
        let payload = rng.gen_range(0.0..5_000.0);
        let hover = hover_power(&spec, payload).unwrap().total_w();
        let cruise = cruise_power(&spec, 0.0, payload).unwrap().total_w();
        assert!(
            (hover - cruise).abs() / hover <= 1e-9,
            "v->0 identity broke: hover {hover}, cruise {cruise}"
        );
    }
    pass("energy model matches the direct-evaluation oracle within 1e-12; v->0 identity within 1e-9 over 1000 specs");
}

// ---------------------------------------------------------------------
// Criterion 2: battery arithmetic.
// ---------------------------------------------------------------------

#[test]
fn criterion_2_battery_arithmetic() {
    let spec = BatterySpec::joby_s4();
    assert_eq!(energy_for_step(360_000.0, 300.0).unwrap(), 30.0);

    let from_120 = charge(BatteryState { energy_kwh: 120.0 }, &spec, 300.0).unwrap();
    assert_eq!(from_120.energy_kwh, 150.0);
    let from_130 = charge(BatteryState { energy_kwh: 130.0 }, &spec, 300.0).unwrap();
    assert_eq!(from_130.energy_kwh, 150.0, "clamped at capacity");
    let from_100 = charge(BatteryState { energy_kwh: 100.0 }, &spec, 300.0).unwrap();
    assert_eq!(from_100.energy_kwh, 130.0);

    let drained = discharge(BatteryState { energy_kwh: 150.0 }, 30.0).unwrap();
    assert_eq!(drained.state.energy_kwh, 120.0);
    assert!(!drained.depleted);
    pass("5 min at 360 kW charges exactly 30 kWh, clamped at 150 kWh");
}

// ---------------------------------------------------------------------
// Criterion 3: gradient suite (central finite differences, 1e-4).
// ---------------------------------------------------------------------

const FD_STEP: f64 = 1e-5;
const KINK_MARGIN: f64 = 1e-3;

fn grads_close(analytic: &[f64], numeric: &[f64]) -> Result<(), String> {
    for (i, (a, n)) in analytic.iter().zip(numeric).enumerate() {
        let tol = 1e-4 * a.abs().max(n.abs()) + 1e-7;
        if (a - n).abs() > tol {
            return Err(format!("parameter {i}: analytic {a} vs numeric {n}"));
        }
    }
    Ok(())
}

/// FD gradients of J = r·logits(θ) for any CommNet shape.
fn check_commnet_instance(
    m: usize,
    obs_dim: usize,
    hidden: usize,
    blocks: usize,
    seed: u64,
    rng: &mut ChaCha8Rng,
) -> Option<Result<(), String>> {
    let policy = CommNetPolicy::new(m, obs_dim, hidden, blocks, 5, seed).unwrap();
    let obs: Vec<f64> = (0..m * obs_dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let r: Vec<f64> = (0..m * 5).map(|_| rng.gen_range(-1.0..1.0)).collect();

    let (_, cache) = policy.forward_batch_cached(&obs, 1).unwrap();
    if cache.min_abs_pre_activation() < KINK_MARGIN {
        return None; // graze of the rectifier kink; FD invalid, re-draw
    }
    let analytic = policy.backward_batch(&cache, &r).unwrap();

    let params = policy.params_flat();
    let mut probe = policy.clone();
    let mut numeric = vec![0.0; params.len()];
    for i in 0..params.len() {
        let mut plus = params.clone();
        plus[i] += FD_STEP;
        probe.set_params_flat(&plus).unwrap();
        let (lp, _) = probe.forward_batch_cached(&obs, 1).unwrap();
        let jp: f64 = lp.iter().zip(&r).map(|(l, w)| l * w).sum();
        let mut minus = params.clone();
        minus[i] -= FD_STEP;
        probe.set_params_flat(&minus).unwrap();
        let (lm, _) = probe.forward_batch_cached(&obs, 1).unwrap();
        let jm: f64 = lm.iter().zip(&r).map(|(l, w)| l * w).sum();
        numeric[i] = (jp - jm) / (2.0 * FD_STEP);
    }
    Some(grads_close(&analytic, &numeric))
}

#[test]
fn criterion_3_gradient_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(31_337);

    // Encoder + head path (no hidden blocks) and full graphs with 1..3
    // communication blocks: 50 randomized instances each.
    for blocks in 0..=3usize {
        let mut checked = 0;
        let mut attempt = 0u64;
        while checked < 50 {
            attempt += 1;
            assert!(attempt < 600, "too many kink re-draws");
            let m = 2 + (attempt as usize % 3);
            let obs_dim = 3 + (attempt as usize % 4);
            let hidden = 4 + (attempt as usize % 3);
            match check_commnet_instance(m, obs_dim, hidden, blocks, attempt * 71 + blocks as u64, &mut rng)
            {
                None => continue,
                Some(result) => result.unwrap_or_else(|e| {
                    panic!("commnet blocks={blocks} instance {attempt}: {e}")
                }),
            }
            checked += 1;
        }
    }

    // Output head alone: a 0-hidden dense stack.
    let mut checked = 0;
    let mut attempt = 0u64;
    while checked < 50 {
        attempt += 1;
        let obs_dim = 3 + (attempt as usize % 5);
        let net = DnnPolicy::new(obs_dim, 4, 0, 4, attempt);
        let obs: Vec<f64> = (0..obs_dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (_, cache) = net.forward_batch_cached(&obs, 1).unwrap();
        let analytic = net.backward_batch(&cache, &r).unwrap();
        let params = net.params_flat();
        let mut probe = net.clone();
        for i in 0..params.len() {
            let mut plus = params.clone();
            plus[i] += FD_STEP;
            probe.set_params_flat(&plus).unwrap();
            let (op, _) = probe.forward_batch_cached(&obs, 1).unwrap();
            let jp: f64 = op.iter().zip(&r).map(|(o, w)| o * w).sum();
            let mut minus = params.clone();
            minus[i] -= FD_STEP;
            probe.set_params_flat(&minus).unwrap();
            let (om, _) = probe.forward_batch_cached(&obs, 1).unwrap();
            let jm: f64 = om.iter().zip(&r).map(|(o, w)| o * w).sum();
            let numeric = (jp - jm) / (2.0 * FD_STEP);
            let tol = 1e-4 * analytic[i].abs().max(numeric.abs()) + 1e-7;
            assert!((analytic[i] - numeric).abs() <= tol, "head instance {attempt} param {i}");
        }
        checked += 1;
    }

    // Critic graphs: 50 randomized instances.
    let mut checked = 0;
    let mut attempt = 0u64;
    while checked < 50 {
        attempt += 1;
        assert!(attempt < 600, "too many kink re-draws");
        let in_dim = 4 + (attempt as usize % 5);
        let widths = vec![3 + attempt as usize % 3; 1 + attempt as usize % 3];
        let critic = CriticNet::new(in_dim, &widths, attempt);
        let input: Vec<f64> = (0..in_dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (_, cache) = critic.forward_batch_cached(&input, 1).unwrap();
        if cache.min_abs_pre_activation() < KINK_MARGIN {
            continue;
        }
        let analytic = critic.backward_batch(&cache, &[1.0]).unwrap();
        let params = critic.params_flat();
        let mut probe = critic.clone();
        for i in 0..params.len() {
            let mut plus = params.clone();
            plus[i] += FD_STEP;
            probe.set_params_flat(&plus).unwrap();
            let jp = probe.forward(&input).unwrap();
            let mut minus = params.clone();
            minus[i] -= FD_STEP;
            probe.set_params_flat(&minus).unwrap();
            let jm = probe.forward(&input).unwrap();
            let numeric = (jp - jm) / (2.0 * FD_STEP);
            let tol = 1e-4 * analytic[i].abs().max(numeric.abs()) + 1e-7;
            assert!((analytic[i] - numeric).abs() <= tol, "critic instance {attempt} param {i}");
        }
        checked += 1;
    }

    pass("analytic gradients match central finite differences within 1e-4 on 50+ instances per graph family");
}

// ---------------------------------------------------------------------
// Criterion 4: CommNet structure.
// ---------------------------------------------------------------------

#[test]
fn criterion_4_commnet_structure() {
    let mut rng = ChaCha8Rng::seed_from_u64(4040);

    // Softmax rows sum to 1 within 1e-9.
    let policy = CommNetPolicy::new(4, 9, 16, 3, 7, 8).unwrap();
    for _ in 0..50 {
        let obs: Vec<f64> = (0..4 * 9).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let probs = policy.forward(&obs).unwrap();
        for agent in 0..4 {
            let sum: f64 = probs[agent * 7..(agent + 1) * 7].iter().sum();
            assert!((sum - 1.0).abs() <= 1e-9);
        }
    }

    // Agent-permutation equivariance within 1e-9.
    let obs: Vec<f64> = (0..4 * 9).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let base = policy.forward(&obs).unwrap();
    for sigma in [[3usize, 2, 1, 0], [1, 2, 3, 0], [2, 0, 3, 1]] {
        let mut permuted = vec![0.0; obs.len()];
        for (new_pos, old) in sigma.iter().enumerate() {
            permuted[new_pos * 9..(new_pos + 1) * 9].copy_from_slice(&obs[old * 9..(old + 1) * 9]);
        }
        let out = policy.forward(&permuted).unwrap();
        for (new_pos, old) in sigma.iter().enumerate() {
            for a in 0..7 {
                assert!((out[new_pos * 7 + a] - base[old * 7 + a]).abs() <= 1e-9);
            }
        }
    }

    // c^l_m has zero gradient with respect to h^l_m: perturbing only agent
    // m's hidden state leaves c_m exactly unchanged.
    let hidden: Vec<f64> = (0..3 * 4).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let c0 = uam_net::comm_mean(&hidden, 3, 4, 0).unwrap();
    let mut perturbed = hidden.clone();
    for v in perturbed[0..4].iter_mut() {
        *v += 1.0;
    }
    let c0_after = uam_net::comm_mean(&perturbed, 3, 4, 0).unwrap();
    assert_eq!(c0, c0_after);

    // M = 2: c_1 equals h_2 bit-for-bit.
    let h: Vec<f64> = (0..2 * 6).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let c = uam_net::comm_mean(&h, 2, 6, 0).unwrap();
    assert_eq!(c.as_slice(), &h[6..12]);

    pass("softmax rows normalized (1e-9); permutation equivariance (1e-9); exclusion mean has zero own-gradient; M=2 copies the peer");
}

// ---------------------------------------------------------------------
// Criterion 5: simulator invariants over 100 random-policy episodes.
// ---------------------------------------------------------------------

#[test]
fn criterion_5_simulator_invariants() {
    let config = SimConfig::default();
    let uam = UamSpec::joby_s4();
    let battery = BatterySpec::joby_s4();

    let run_episode = |seed: u64, collect: bool| {
        let mut state = SimState::reset(&config, &uam, &battery, seed).unwrap();
        let mut policy_rng = ChaCha8Rng::seed_from_u64(seed ^ 0xFACE);
        let mut log = Vec::new();
        let mut frozen_waits: Vec<(usize, f64)> = Vec::new();
        while !state.done() {
            let mut joint = Vec::new();
            for agent in 0..config.num_agents {
                let mask = state.legal_actions(agent).unwrap();
                let legal: Vec<usize> = (0..NUM_ACTIONS).filter(|a| mask[*a]).collect();
                assert!(!legal.is_empty());
                joint.push(Action::from_index(legal[policy_rng.gen_range(0..legal.len())]).unwrap());
            }
            let outcome = state.step(&joint).unwrap();

            check_invariants(&state).unwrap();
            let mut count = 0;
            for p in &state.passengers {
                count += 1;
                if p.status == PassengerStatus::Delivered
                    && !frozen_waits.iter().any(|(id, _)| *id == p.id)
                {
                    frozen_waits.push((p.id, state.waiting_time_min(p.id)));
                }
            }
            assert_eq!(count, config.num_passengers);
            for (pid, wait) in &frozen_waits {
                assert_eq!(state.waiting_time_min(*pid), *wait, "delivered wait mutated");
            }
            if collect {
                log.push(outcome.events);
            }
        }
        log
    };

    for seed in 0..100u64 {
        run_episode(seed, false);
    }
    // Bit-identical event logs for identical seeds.
    let a = run_episode(7, true);
    let b = run_episode(7, true);
    assert_eq!(a, b);

    pass("conservation, capacity, battery bounds, map bounds, mode coupling, frozen waits hold over 100 random episodes; logs bit-identical per seed");
}

// ---------------------------------------------------------------------
// Criterion 6: replay and target machinery.
// ---------------------------------------------------------------------

#[test]
fn criterion_6_replay_and_target_machinery() {
    // FIFO eviction at the 10k capacity.
    let mut buffer = ReplayBuffer::new(10_000);
    let make = |tag: f64| Transition {
        obs: vec![tag],
        actions: vec![0],
        team_reward: tag,
        agent_rewards: vec![tag],
        next_obs: vec![tag],
        masks: vec![true; NUM_ACTIONS],
        next_masks: vec![true; NUM_ACTIONS],
        done: false,
    };
    for i in 0..10_500 {
        buffer.push(make(i as f64));
    }
    assert_eq!(buffer.len(), 10_000);
    let rewards: Vec<f64> = buffer.iter_in_order().map(|t| t.team_reward).collect();
    assert_eq!(rewards[0], 500.0);
    assert!(rewards.windows(2).all(|w| w[0] < w[1]));

    // Sampling uniformity within 3 sigma over 1e5 draws of 10 items.
    let mut small = ReplayBuffer::new(10);
    for i in 0..10 {
        small.push(make(i as f64));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let draws = 100_000;
    let mut counts = [0usize; 10];
    for t in small.sample(draws, 10, &mut rng).unwrap() {
        counts[t.team_reward as usize] += 1;
    }
    let sigma = (0.1 * 0.9 / draws as f64).sqrt();
    for c in counts {
        assert!((c as f64 / draws as f64 - 0.1).abs() <= 3.0 * sigma);
    }

    // No training before min fill; targets frozen between syncs.
    let sim_config = SimConfig::default();
    let trainer_config = TrainerConfig {
        batch_size: 32,
        min_fill: 150,
        update_period_steps: 1,
        target_sync_period_updates: 1_000_000,
        hidden_width: 8,
        num_layers: 2,
        ..TrainerConfig::default()
    };
    let mut trainer = Trainer::new(
        Mode::Commnet,
        &sim_config,
        &UamSpec::joby_s4(),
        &BatterySpec::joby_s4(),
        &uam_reward::RewardConfig::default(),
        &trainer_config,
        99,
    )
    .unwrap();
    let targets_at_init = trainer.target_snapshot();
    assert_eq!(trainer.bundle(), targets_at_init);
    trainer.run_episode(0, 1).unwrap();
    assert_eq!(trainer.updates_run(), 0, "must not train below min fill");
    trainer.run_episode(1, 2).unwrap();
    assert!(trainer.updates_run() > 0);
    assert_ne!(trainer.bundle(), targets_at_init);
    assert_eq!(trainer.target_snapshot(), targets_at_init, "targets frozen between syncs");

    pass("FIFO eviction at 10k; uniform sampling within 3 sigma over 1e5 draws; no training before min fill; targets frozen between syncs");
}

// ---------------------------------------------------------------------
// Criterion 7: learning sanity on a 2-action bandit.
// ---------------------------------------------------------------------

#[test]
fn criterion_7_bandit_learning_sanity() {
    const M: usize = 2;
    const OBS_LEN: usize = 3;
    let obs: Vec<f64> = vec![0.5, -0.3, 0.8, 0.5, -0.3, 0.8];
    let mut masks = vec![false; M * NUM_ACTIONS];
    for agent in 0..M {
        masks[agent * NUM_ACTIONS] = true;
        masks[agent * NUM_ACTIONS + 1] = true;
    }

    // Q = 2 per agent playing arm 0, 1 per agent playing arm 1.
    let in_dim = M * OBS_LEN + M * NUM_ACTIONS;
    let mut critic = CriticNet::new(in_dim, &[2], 0);
    let mut params = vec![0.0; critic.param_count()];
    params[M * OBS_LEN] = 1.0;
    params[M * OBS_LEN + NUM_ACTIONS] = 1.0;
    params[in_dim + M * OBS_LEN + 1] = 1.0;
    params[in_dim + M * OBS_LEN + NUM_ACTIONS + 1] = 1.0;
    params[2 * in_dim + 2] = 2.0;
    params[2 * in_dim + 2 + 1] = 1.0;
    critic.set_params_flat(&params).unwrap();

    for seed in 1..=5u64 {
        let mut actor = CommNetPolicy::new(M, OBS_LEN, 8, 2, NUM_ACTIONS, seed).unwrap();
        let mut adam = AdamState::new(actor.param_count(), 5e-4);
        let mut rng = ChaCha8Rng::seed_from_u64(seed * 31 + 7);
        let mut solved = false;
        for _ in 0..500 {
            let logits = actor.forward_logits(&obs).unwrap();
            let probs = masked_softmax_rows(&logits, &masks, M, NUM_ACTIONS);
            let batch: Vec<Transition> = (0..64)
                .map(|_| {
                    let actions: Vec<usize> = (0..M)
                        .map(|agent| {
                            sample_masked(
                                &probs[agent * NUM_ACTIONS..(agent + 1) * NUM_ACTIONS],
                                &masks[agent * NUM_ACTIONS..(agent + 1) * NUM_ACTIONS],
                                &mut rng,
                            )
                        })
                        .collect();
                    Transition {
                        obs: obs.clone(),
                        actions,
                        team_reward: 0.0,
                        agent_rewards: vec![0.0; M],
                        next_obs: obs.clone(),
                        masks: masks.clone(),
                        next_masks: masks.clone(),
                        done: false,
                    }
                })
                .collect();
            let refs: Vec<&Transition> = batch.iter().collect();
            actor_update(&refs, &mut actor, &critic, &mut adam).unwrap();

            let logits = actor.forward_logits(&obs).unwrap();
            let probs = masked_softmax_rows(&logits, &masks, M, NUM_ACTIONS);
            if (0..M).all(|agent| probs[agent * NUM_ACTIONS] > 0.9) {
                solved = true;
                break;
            }
        }
        assert!(solved, "seed {seed}: pi(a*) did not reach 0.9 in 500 updates");
    }
    pass("actor update drives pi(a*) above 0.9 within 500 updates on the bandit for 5/5 seeds");
}

// ---------------------------------------------------------------------
// Criterion 9: metrics bounds in every evaluation.
// ---------------------------------------------------------------------

#[test]
fn criterion_9_metrics_bounds() {
    let config = FullConfig {
        trainer: TrainerConfig {
            episodes: 3,
            batch_size: 16,
            min_fill: 16,
            buffer_capacity: 400,
            hidden_width: 8,
            num_layers: 2,
            eval_episodes: 4,
            ..TrainerConfig::default()
        },
        ..FullConfig::default()
    };
    for (mode, seed) in [(Mode::Commnet, 1u64), (Mode::IqlDnn, 2u64)] {
        let run = train(
            mode,
            &config.sim,
            &config.uam,
            &config.battery,
            &config.reward,
            &config.trainer,
            seed,
        )
        .unwrap();
        let (report, _) = evaluate(
            &run.bundle,
            &config.sim,
            &config.uam,
            &config.battery,
            &config.reward,
            config.trainer.eval_episodes,
            seed,
        )
        .unwrap();
        for ep in &report.episodes {
            assert!(ep.serviced_total <= 25);
            for agent in 0..config.sim.num_agents {
                assert!(ep.serviced_per_agent[agent] <= 25, "serviced bound");
                assert!(ep.distinct_vertiports_per_agent[agent] <= 5, "vertiport bound");
            }
        }
    }
    pass("per-agent serviced counts <= N = 25 and distinct vertiports <= K = 5 in every evaluation episode");
}

// ---------------------------------------------------------------------
// Criterion 8: directional reproduction at desk scale (long; ignored by
// default — see the module docs for the invocation).
// ---------------------------------------------------------------------

fn runs_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join("runs/directional")
}

fn job_metrics(config: &FullConfig, mode: Mode, seed: u64) -> anyhow::Result<ModeMetrics> {
    let cache = runs_dir().join(format!("job_{}_s{seed}.json", mode.name()));
    if let Ok(text) = std::fs::read_to_string(&cache) {
        if let Ok(metrics) = serde_json::from_str::<ModeMetrics>(&text) {
            println!("[directional] reusing cached {} seed {seed}", mode.name());
            return Ok(metrics);
        }
    }
    let started = std::time::Instant::now();
    let run = train(
        mode,
        &config.sim,
        &config.uam,
        &config.battery,
        &config.reward,
        &config.trainer,
        seed,
    )?;
    let (report, _) = evaluate(
        &run.bundle,
        &config.sim,
        &config.uam,
        &config.battery,
        &config.reward,
        config.trainer.eval_episodes,
        seed,
    )?;
    let metrics = ModeMetrics {
        serviced_mean: report.serviced_total_mean,
        mean_wait_min: report.mean_wait_min,
        total_reward_mean: report.total_reward_mean,
    };
    std::fs::create_dir_all(runs_dir())?;
    uam_cli::write_atomic(&cache, serde_json::to_string_pretty(&metrics)?.as_bytes())?;
    println!(
        "[directional] finished {} seed {seed} in {:.0} s: serviced {:.2}, wait {:?}",
        mode.name(),
        started.elapsed().as_secs_f64(),
        metrics.serviced_mean,
        metrics.mean_wait_min
    );
    Ok(metrics)
}

/// Desk-scale directional reproduction: 5,000 episodes, 5 paired seeds,
/// reference configuration. Asserts (a) the communication policy's median
/// serviced passengers is at least the baseline's, with a >= 10% per-seed
/// gain in at least 3 of 5 seeds, and (b) its median mean waiting time is
/// no worse. The full table prints regardless of pass/fail.
#[test]
#[ignore = "trains 2 modes x 5 seeds x 5000 episodes (~hours); run with --ignored"]
fn criterion_8_directional_reproduction() {
    let config = FullConfig::default();
    assert_eq!(config.trainer.episodes, 5_000, "desk-scale protocol is pinned");
    assert_eq!(config.trainer.eval_episodes, 5);
    let seeds: Vec<u64> = vec![1, 2, 3, 4, 5];

    let jobs: Vec<(Mode, u64)> = seeds
        .iter()
        .flat_map(|s| [(Mode::Commnet, *s), (Mode::IqlDnn, *s)])
        .collect();
    let results: Vec<anyhow::Result<(Mode, u64, ModeMetrics)>> = jobs
        .par_iter()
        .map(|(mode, seed)| job_metrics(&config, *mode, *seed).map(|m| (*mode, *seed, m)))
        .collect();

    let mut commnet = Vec::new();
    let mut iql = Vec::new();
    for result in results {
        let (mode, seed, metrics) = result.expect("job failed");
        match mode {
            Mode::Commnet => commnet.push((seed, metrics)),
            Mode::IqlDnn => iql.push((seed, metrics)),
        }
    }
    let per_seed: Vec<SeedComparison> = seeds
        .iter()
        .map(|seed| SeedComparison {
            seed: *seed,
            commnet: commnet.iter().find(|(s, _)| s == seed).unwrap().1.clone(),
            iql: iql.iter().find(|(s, _)| s == seed).unwrap().1.clone(),
        })
        .collect();
    let summary = summarize_comparison(per_seed);

    // Full per-seed table, printed before any assertion.
    println!("\nseed | commnet serviced | iql serviced | commnet wait | iql wait");
    for row in &summary.per_seed {
        println!(
            "{:>4} | {:>16.2} | {:>12.2} | {:>12} | {:>8}",
            row.seed,
            row.commnet.serviced_mean,
            row.iql.serviced_mean,
            row.commnet
                .mean_wait_min
                .map(|w| format!("{w:.2}"))
                .unwrap_or_else(|| "n/a".into()),
            row.iql
                .mean_wait_min
                .map(|w| format!("{w:.2}"))
                .unwrap_or_else(|| "n/a".into()),
        );
    }
    println!(
        "medians: serviced {:.2} vs {:.2}; wait {:?} vs {:?}; seeds with >=10% gain: {}/5\n",
        summary.commnet_median_serviced,
        summary.iql_median_serviced,
        summary.commnet_median_wait_min,
        summary.iql_median_wait_min,
        summary.seeds_with_10pct_serviced_gain
    );
    let _ = std::fs::create_dir_all(runs_dir());
    let _ = uam_cli::write_atomic(
        &runs_dir().join("summary.json"),
        serde_json::to_string_pretty(&summary).unwrap().as_bytes(),
    );

    // (a) median serviced at least the baseline's, and >= +10% in >= 3 of 5
    // seeds.
    assert!(
        summary.commnet_median_serviced >= summary.iql_median_serviced,
        "commnet median serviced {} below baseline {}",
        summary.commnet_median_serviced,
        summary.iql_median_serviced
    );
    assert!(
        summary.seeds_with_10pct_serviced_gain >= 3,
        "only {}/5 seeds show a >=10% serviced gain",
        summary.seeds_with_10pct_serviced_gain
    );
    // (b) median mean waiting time no worse than the baseline's (an absent
    // median counts as worst).
    let commnet_wait = summary.commnet_median_wait_min.unwrap_or(f64::INFINITY);
    let iql_wait = summary.iql_median_wait_min.unwrap_or(f64::INFINITY);
    assert!(
        commnet_wait <= iql_wait || (commnet_wait.is_infinite() && iql_wait.is_infinite()),
        "commnet median wait {commnet_wait} exceeds baseline {iql_wait}"
    );
    pass("directional reproduction: commnet >= baseline on serviced medians with >=10% gains in >=3/5 seeds and no worse median wait");
}
