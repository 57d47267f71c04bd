use std::io::Write;
use std::path::Path;

use crate::state::AgentStepEvents;

/// Write the per-agent event log as CSV, one row per agent per step.
pub fn write_event_log(
    path: &Path,
    steps: &[Vec<AgentStepEvents>],
) -> Result<(), std::io::Error> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "step",
        "agent",
        "action",
        "x_m",
        "y_m",
        "z_m",
        "energy_before_kwh",
        "energy_demand_kwh",
        "pickups",
        "dropoffs",
        "links_made",
        "links_broken",
    ])?;
    for (step, events) in steps.iter().enumerate() {
        for e in events {
            w.write_record([
                step.to_string(),
                e.agent.to_string(),
                e.action.name().to_string(),
                e.position_m[0].to_string(),
                e.position_m[1].to_string(),
                e.position_m[2].to_string(),
                e.energy_before_kwh.to_string(),
                e.energy_demand_kwh.to_string(),
                join_ids(&e.pickups),
                join_ids(&e.dropoffs),
                join_ids(&e.links_made),
                join_ids(&e.links_broken),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn join_ids(ids: &[usize]) -> String {
    ids.iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Write one `(t, x, y, z)` CSV per agent from recorded positions
/// (`positions[t][agent]`, including the initial position at t = 0).
pub fn write_trajectories(
    dir: &Path,
    prefix: &str,
    positions: &[Vec<[f64; 3]>],
) -> Result<Vec<std::path::PathBuf>, std::io::Error> {
    std::fs::create_dir_all(dir)?;
    let num_agents = positions.first().map_or(0, |row| row.len());
    let mut paths = Vec::with_capacity(num_agents);
    for agent in 0..num_agents {
        let path = dir.join(format!("{prefix}_agent{agent}.csv"));
        let mut f = std::io::BufWriter::new(std::fs::File::create(&path)?);
        writeln!(f, "t,x_m,y_m,z_m")?;
        for (t, row) in positions.iter().enumerate() {
            let p = row[agent];
            writeln!(f, "{t},{},{},{}", p[0], p[1], p[2])?;
        }
        f.flush()?;
        paths.push(path);
    }
    Ok(paths)
}
