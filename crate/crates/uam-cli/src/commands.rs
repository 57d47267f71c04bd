use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use uam_sim::observation_length;
use uam_train::{
    evaluate, load_bundle, save_bundle, train, EpisodeLog, EvalReport, Mode, TrainRun,
};

use crate::config::FullConfig;
use crate::manifest::RunManifest;
use crate::util::{median, median_wait, write_atomic};

/// Aggregate greedy-evaluation metrics of one trained seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeMetrics {
    /// Mean over evaluation episodes of total serviced passengers.
    pub serviced_mean: f64,
    /// Delivery-weighted mean wait across evaluation episodes, if anyone
    /// was delivered.
    pub mean_wait_min: Option<f64>,
    pub total_reward_mean: f64,
}

impl ModeMetrics {
    fn from_report(report: &EvalReport) -> ModeMetrics {
        ModeMetrics {
            serviced_mean: report.serviced_total_mean,
            mean_wait_min: report.mean_wait_min,
            total_reward_mean: report.total_reward_mean,
        }
    }
}

/// Paired metrics for one seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedComparison {
    pub seed: u64,
    pub commnet: ModeMetrics,
    pub iql: ModeMetrics,
}

/// The comparison table plus the derived acceptance quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSummary {
    pub per_seed: Vec<SeedComparison>,
    pub commnet_median_serviced: f64,
    pub iql_median_serviced: f64,
    pub commnet_median_wait_min: Option<f64>,
    pub iql_median_wait_min: Option<f64>,
    /// Seeds where commnet serviced at least 10% more than the baseline.
    pub seeds_with_10pct_serviced_gain: usize,
    /// (commnet − iql) / iql on median serviced, when the baseline is
    /// non-zero.
    pub serviced_delta_rel: Option<f64>,
    /// (commnet − iql) / iql on median wait, when both medians exist.
    pub wait_delta_rel: Option<f64>,
}

/// Pure summary of paired per-seed metrics.
pub fn summarize_comparison(per_seed: Vec<SeedComparison>) -> ComparisonSummary {
    let mut commnet_serviced: Vec<f64> = per_seed.iter().map(|s| s.commnet.serviced_mean).collect();
    let mut iql_serviced: Vec<f64> = per_seed.iter().map(|s| s.iql.serviced_mean).collect();
    let commnet_median_serviced = median(&mut commnet_serviced);
    let iql_median_serviced = median(&mut iql_serviced);

    let commnet_median_wait_min =
        median_wait(&per_seed.iter().map(|s| s.commnet.mean_wait_min).collect::<Vec<_>>());
    let iql_median_wait_min =
        median_wait(&per_seed.iter().map(|s| s.iql.mean_wait_min).collect::<Vec<_>>());

    let seeds_with_10pct_serviced_gain = per_seed
        .iter()
        .filter(|s| s.commnet.serviced_mean >= 1.1 * s.iql.serviced_mean - 1e-9)
        .count();

    let serviced_delta_rel = if iql_median_serviced > 0.0 {
        Some((commnet_median_serviced - iql_median_serviced) / iql_median_serviced)
    } else {
        None
    };
    let wait_delta_rel = match (commnet_median_wait_min, iql_median_wait_min) {
        (Some(c), Some(i)) if i > 0.0 => Some((c - i) / i),
        _ => None,
    };

    ComparisonSummary {
        per_seed,
        commnet_median_serviced,
        iql_median_serviced,
        commnet_median_wait_min,
        iql_median_wait_min,
        seeds_with_10pct_serviced_gain,
        serviced_delta_rel,
        wait_delta_rel,
    }
}

fn curve_csv(curve: &[EpisodeLog]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["episode", "total_reward", "epsilon", "loss", "serviced"])
        .expect("csv header");
    for row in curve {
        w.write_record([
            row.episode.to_string(),
            row.total_reward.to_string(),
            row.epsilon.to_string(),
            row.loss.map(|l| l.to_string()).unwrap_or_default(),
            row.serviced.to_string(),
        ])
        .expect("csv row");
    }
    w.into_inner().expect("csv buffer")
}

fn train_one_seed(
    config: &FullConfig,
    mode: Mode,
    seed: u64,
    out_dir: &Path,
) -> anyhow::Result<(TrainRun, Vec<PathBuf>)> {
    let run = train(
        mode,
        &config.sim,
        &config.uam,
        &config.battery,
        &config.reward,
        &config.trainer,
        seed,
    )?;
    let mut artifacts = Vec::new();

    let curve_path = out_dir.join(format!("curve_{}_s{seed}.csv", mode.name()));
    write_atomic(&curve_path, &curve_csv(&run.curve))?;
    artifacts.push(curve_path);

    let ckpt_dir = out_dir.join("checkpoints").join(format!("{}_s{seed}", mode.name()));
    artifacts.extend(save_bundle(&ckpt_dir, &run.bundle, seed)?);
    Ok((run, artifacts))
}

/// Train one mode over a list of seeds; writes curves, checkpoints, and a
/// manifest.
pub fn cmd_train(
    config: &FullConfig,
    mode: Mode,
    seeds: &[u64],
    out_dir: &Path,
) -> anyhow::Result<()> {
    let started = Instant::now();
    config.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let mut manifest = RunManifest::new(
        "train",
        vec![mode.name().to_string()],
        seeds.to_vec(),
        config,
    );

    let results: Vec<anyhow::Result<(TrainRun, Vec<PathBuf>)>> = seeds
        .par_iter()
        .map(|seed| train_one_seed(config, mode, *seed, out_dir))
        .collect();
    for result in results {
        let (run, artifacts) = result?;
        println!(
            "trained {} seed {}: final-episode reward {:.3}",
            mode.name(),
            run.seed,
            run.curve.last().map(|r| r.total_reward).unwrap_or(0.0)
        );
        for artifact in artifacts {
            manifest.add_artifact(out_dir, &artifact);
        }
    }
    let manifest_path = manifest.finalize(out_dir, started.elapsed().as_secs_f64())?;
    println!("wrote {}", manifest_path.display());
    Ok(())
}

/// Evaluate a checkpoint greedily; writes the report JSON, per-agent
/// serviced counts, waiting-time summary, and per-agent trajectory CSVs.
#[allow(clippy::too_many_arguments)]
pub fn cmd_eval(
    config: &FullConfig,
    checkpoint_dir: &Path,
    mode: Mode,
    episodes: u32,
    seeds: &[u64],
    out_dir: &Path,
) -> anyhow::Result<()> {
    let started = Instant::now();
    config.validate()?;
    let obs_len = observation_length(
        config.sim.num_agents,
        config.sim.num_vertiports(),
        config.uam.seat_count as usize,
    );
    let bundle = load_bundle(
        checkpoint_dir,
        mode,
        config.sim.num_agents,
        obs_len,
        config.trainer.hidden_width,
        config.trainer.num_layers,
    )
    .with_context(|| format!("cannot load checkpoint from {}", checkpoint_dir.display()))?;

    std::fs::create_dir_all(out_dir)?;
    let mut manifest = RunManifest::new(
        "eval",
        vec![mode.name().to_string()],
        seeds.to_vec(),
        config,
    );

    let mut reports: Vec<(u64, EvalReport)> = Vec::new();
    for seed in seeds {
        let (report, traces) = evaluate(
            &bundle,
            &config.sim,
            &config.uam,
            &config.battery,
            &config.reward,
            episodes,
            *seed,
        )?;

        for (e, trace) in traces.iter().enumerate() {
            let paths = uam_sim::write_trajectories(
                out_dir,
                &format!("traj_s{seed}_e{e}"),
                &trace.positions,
            )?;
            for p in paths {
                manifest.add_artifact(out_dir, &p);
            }
            let event_path = out_dir.join(format!("events_s{seed}_e{e}.csv"));
            uam_sim::write_event_log(&event_path, &trace.events)?;
            manifest.add_artifact(out_dir, &event_path);

            // Per-step reward factorization rows.
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["step", "agent", "common", "service", "energy", "individual", "total"])?;
            for (step, row) in trace.rewards.iter().enumerate() {
                for (agent, b) in row.iter().enumerate() {
                    w.write_record([
                        step.to_string(),
                        agent.to_string(),
                        b.common.to_string(),
                        b.service.to_string(),
                        b.energy.to_string(),
                        b.individual.to_string(),
                        b.total.to_string(),
                    ])?;
                }
            }
            let reward_path = out_dir.join(format!("rewards_s{seed}_e{e}.csv"));
            write_atomic(&reward_path, &w.into_inner()?)?;
            manifest.add_artifact(out_dir, &reward_path);
        }
        reports.push((*seed, report));
    }

    // Per-agent serviced counts, one row per (seed, episode).
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["seed".to_string(), "episode".to_string()];
    header.extend((0..config.sim.num_agents).map(|m| format!("agent{m}_serviced")));
    header.push("total".to_string());
    w.write_record(&header)?;
    for (seed, report) in &reports {
        for (e, ep) in report.episodes.iter().enumerate() {
            let mut row = vec![seed.to_string(), e.to_string()];
            row.extend(ep.serviced_per_agent.iter().map(|c| c.to_string()));
            row.push(ep.serviced_total.to_string());
            w.write_record(&row)?;
        }
    }
    let serviced_path = out_dir.join("serviced_per_agent.csv");
    write_atomic(&serviced_path, &w.into_inner()?)?;
    manifest.add_artifact(out_dir, &serviced_path);

    // Waiting-time summary per (seed, episode); empty cell when undefined.
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["seed", "episode", "mean_wait_min", "serviced_total"])?;
    for (seed, report) in &reports {
        for (e, ep) in report.episodes.iter().enumerate() {
            w.write_record([
                seed.to_string(),
                e.to_string(),
                ep.mean_wait_min.map(|v| v.to_string()).unwrap_or_default(),
                ep.serviced_total.to_string(),
            ])?;
        }
    }
    let wait_path = out_dir.join("waiting_summary.csv");
    write_atomic(&wait_path, &w.into_inner()?)?;
    manifest.add_artifact(out_dir, &wait_path);

    let report_path = out_dir.join("eval_report.json");
    let json: Vec<serde_json::Value> = reports
        .iter()
        .map(|(seed, report)| {
            serde_json::json!({
                "seed": seed,
                "report": report,
            })
        })
        .collect();
    write_atomic(&report_path, serde_json::to_string_pretty(&json)?.as_bytes())?;
    manifest.add_artifact(out_dir, &report_path);

    let manifest_path = manifest.finalize(out_dir, started.elapsed().as_secs_f64())?;
    println!("wrote {}", manifest_path.display());
    Ok(())
}

/// Train and evaluate both modes on identical seeds; writes everything
/// `train` writes for each mode plus the comparison table.
pub fn cmd_compare(config: &FullConfig, seeds: &[u64], out_dir: &Path) -> anyhow::Result<()> {
    let started = Instant::now();
    config.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let mut manifest = RunManifest::new(
        "compare",
        vec![Mode::Commnet.name().to_string(), Mode::IqlDnn.name().to_string()],
        seeds.to_vec(),
        config,
    );

    // All (mode, seed) jobs run independently; results keep job order.
    let jobs: Vec<(Mode, u64)> = seeds
        .iter()
        .flat_map(|s| [(Mode::Commnet, *s), (Mode::IqlDnn, *s)])
        .collect();
    let results: Vec<anyhow::Result<(Mode, u64, ModeMetrics, Vec<PathBuf>)>> = jobs
        .par_iter()
        .map(|(mode, seed)| {
            let (run, artifacts) = train_one_seed(config, *mode, *seed, out_dir)?;
            let (report, _) = evaluate(
                &run.bundle,
                &config.sim,
                &config.uam,
                &config.battery,
                &config.reward,
                config.trainer.eval_episodes,
                *seed,
            )?;
            Ok((*mode, *seed, ModeMetrics::from_report(&report), artifacts))
        })
        .collect();

    let mut commnet: Vec<(u64, ModeMetrics)> = Vec::new();
    let mut iql: Vec<(u64, ModeMetrics)> = Vec::new();
    for result in results {
        let (mode, seed, metrics, artifacts) = result?;
        println!(
            "{} seed {seed}: serviced {:.2}, wait {}",
            mode.name(),
            metrics.serviced_mean,
            metrics
                .mean_wait_min
                .map(|w| format!("{w:.2} min"))
                .unwrap_or_else(|| "n/a".to_string()),
        );
        for artifact in artifacts {
            manifest.add_artifact(out_dir, &artifact);
        }
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

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["mode", "median_serviced", "median_mean_wait_min"])?;
    w.write_record([
        "commnet".to_string(),
        summary.commnet_median_serviced.to_string(),
        summary
            .commnet_median_wait_min
            .map(|v| v.to_string())
            .unwrap_or_default(),
    ])?;
    w.write_record([
        "iql-dnn".to_string(),
        summary.iql_median_serviced.to_string(),
        summary
            .iql_median_wait_min
            .map(|v| v.to_string())
            .unwrap_or_default(),
    ])?;
    w.write_record([
        "delta_rel".to_string(),
        summary
            .serviced_delta_rel
            .map(|v| v.to_string())
            .unwrap_or_default(),
        summary
            .wait_delta_rel
            .map(|v| v.to_string())
            .unwrap_or_default(),
    ])?;
    let table_path = out_dir.join("comparison.csv");
    write_atomic(&table_path, &w.into_inner()?)?;
    manifest.add_artifact(out_dir, &table_path);

    let json_path = out_dir.join("comparison.json");
    write_atomic(&json_path, serde_json::to_string_pretty(&summary)?.as_bytes())?;
    manifest.add_artifact(out_dir, &json_path);

    println!(
        "median serviced: commnet {:.2} vs iql-dnn {:.2}; seeds with >=10% gain: {}/{}",
        summary.commnet_median_serviced,
        summary.iql_median_serviced,
        summary.seeds_with_10pct_serviced_gain,
        seeds.len()
    );
    let manifest_path = manifest.finalize(out_dir, started.elapsed().as_secs_f64())?;
    println!("wrote {}", manifest_path.display());
    Ok(())
}

/// Dump the effective default configuration as TOML.
pub fn cmd_print_config(config: &FullConfig) -> String {
    config.to_toml()
}
