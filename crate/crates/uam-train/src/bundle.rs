use std::path::{Path, PathBuf};

use uam_net::{
    load_checkpoint, save_checkpoint, Checkpoint, CommNetPolicy, CriticNet, DnnPolicy, NetworkKind,
};
use uam_sim::NUM_ACTIONS;

use crate::config::Mode;
use crate::error::TrainError;

/// The trained networks of one run.
#[derive(Debug, Clone, PartialEq)]
pub enum PolicyBundle {
    Commnet {
        actor: CommNetPolicy,
        critic: CriticNet,
    },
    Iql {
        qnets: Vec<DnnPolicy>,
    },
}

impl PolicyBundle {
    pub fn mode(&self) -> Mode {
        match self {
            PolicyBundle::Commnet { .. } => Mode::Commnet,
            PolicyBundle::Iql { .. } => Mode::IqlDnn,
        }
    }
}

/// Write the bundle's checkpoint files into `dir`; returns the paths.
pub fn save_bundle(dir: &Path, bundle: &PolicyBundle, seed: u64) -> Result<Vec<PathBuf>, TrainError> {
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    match bundle {
        PolicyBundle::Commnet { actor, critic } => {
            let actor_path = dir.join("actor.ckpt.json");
            save_checkpoint(
                &actor_path,
                &Checkpoint::new(
                    NetworkKind::CommnetActor,
                    actor.shapes(),
                    seed,
                    actor.params_flat(),
                ),
            )?;
            paths.push(actor_path);
            let critic_path = dir.join("critic.ckpt.json");
            save_checkpoint(
                &critic_path,
                &Checkpoint::new(
                    NetworkKind::Critic,
                    critic.shapes(),
                    seed,
                    critic.params_flat(),
                ),
            )?;
            paths.push(critic_path);
        }
        PolicyBundle::Iql { qnets } => {
            for (agent, net) in qnets.iter().enumerate() {
                let path = dir.join(format!("qnet_agent{agent}.ckpt.json"));
                save_checkpoint(
                    &path,
                    &Checkpoint::new(NetworkKind::DnnQNet, net.shapes(), seed, net.params_flat()),
                )?;
                paths.push(path);
            }
        }
    }
    Ok(paths)
}

/// Load a bundle from `dir`, rejecting shape-mismatched checkpoints against
/// the expected architecture.
pub fn load_bundle(
    dir: &Path,
    mode: Mode,
    num_agents: usize,
    obs_len: usize,
    hidden_width: usize,
    num_layers: usize,
) -> Result<PolicyBundle, TrainError> {
    match mode {
        Mode::Commnet => {
            let mut actor =
                CommNetPolicy::new(num_agents, obs_len, hidden_width, num_layers, NUM_ACTIONS, 0)?;
            let ckpt = load_checkpoint(&dir.join("actor.ckpt.json"))?;
            ckpt.check_shapes(NetworkKind::CommnetActor, &actor.shapes())?;
            actor.set_params_flat(&ckpt.params)?;

            let critic_in = num_agents * obs_len + num_agents * NUM_ACTIONS;
            let mut critic = CriticNet::new(critic_in, &vec![hidden_width; num_layers], 0);
            let ckpt = load_checkpoint(&dir.join("critic.ckpt.json"))?;
            ckpt.check_shapes(NetworkKind::Critic, &critic.shapes())?;
            critic.set_params_flat(&ckpt.params)?;

            Ok(PolicyBundle::Commnet { actor, critic })
        }
        Mode::IqlDnn => {
            let mut qnets = Vec::with_capacity(num_agents);
            for agent in 0..num_agents {
                let mut net = DnnPolicy::new(obs_len, hidden_width, num_layers, NUM_ACTIONS, 0);
                let path = dir.join(format!("qnet_agent{agent}.ckpt.json"));
                let ckpt = load_checkpoint(&path)?;
                ckpt.check_shapes(NetworkKind::DnnQNet, &net.shapes())?;
                net.set_params_flat(&ckpt.params)?;
                qnets.push(net);
            }
            Ok(PolicyBundle::Iql { qnets })
        }
    }
}
