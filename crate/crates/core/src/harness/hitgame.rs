use serde::{Deserialize, Serialize};

use crate::engine::{run, Protocol, RunOptions};
use crate::error::{config, Result};
use crate::lower_bound::{
    build_target_network, engine_receive_events, player_from_algorithm, uniform_player,
    HittingGame, PlayerOutcome, StarLayout,
};
use crate::multi::{Algorithm1, Algorithm1Params, Algorithm2, Algorithm2Params};
use crate::primitives::NodeId;
use crate::rng::{derive_seed, labels, seeded_rng};
use crate::sf::{Setting, SfParams};

/// `algorithm`: win by simulating a broadcast protocol on the target
/// network. `uniform`: guess uniformly at random.
pub const PLAYER_NAMES: &[&str] = &["algorithm", "uniform"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HitgameSpec {
    pub player: String,
    /// `algorithm1` (run at capacity 1) or `algorithm2`.
    pub protocol: String,
    /// Network size and message count of the algorithm player; its game is
    /// `(n - s, s)`.
    pub n: usize,
    pub s: usize,
    /// Game of the uniform player.
    pub alpha: u32,
    pub beta: u32,
    pub trials: usize,
    pub seed: u64,
    pub round_limit: Option<u64>,
    /// Replay each algorithm trial on the ground-truth target network and
    /// compare receive histories.
    pub verify: bool,
}

impl Default for HitgameSpec {
    fn default() -> Self {
        HitgameSpec {
            player: "algorithm".into(),
            protocol: "algorithm2".into(),
            n: 24,
            s: 4,
            alpha: 8,
            beta: 2,
            trials: 1,
            seed: 0,
            round_limit: None,
            verify: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HitgameRow {
    pub trial: usize,
    pub seed: u64,
    pub outcome: String,
    pub rounds: Option<u64>,
    pub guesses: u64,
    pub replay_match: Option<bool>,
}

fn outcome_name(o: PlayerOutcome) -> &'static str {
    match o {
        PlayerOutcome::Won => "won",
        PlayerOutcome::RoundLimit => "round-limit",
        PlayerOutcome::AlgorithmStopped => "algorithm-stopped",
    }
}

fn play<P: Protocol>(
    make: impl Fn(&[NodeId]) -> Result<P>,
    spec: &HitgameSpec,
    trial: usize,
    seed: u64,
) -> Result<HitgameRow>
where
    P::Msg: PartialEq + 'static,
{
    let (n, s) = (spec.n, spec.s);
    let alpha = n
        .checked_sub(s)
        .filter(|&a| a > s)
        .ok_or_else(|| config("need n - s > s"))? as u32;
    let mut game = HittingGame::new(alpha, s as u32, seed)?;
    let layout = StarLayout::new(&game, n, s, seed)?;
    let limit = spec.round_limit.unwrap_or(u64::MAX);
    let mut protocol = make(layout.sources())?;
    let transcript = player_from_algorithm(&mut protocol, &mut game, &layout, 1, seed, limit)?;
    debug_assert_eq!(game.reveal_count(), 0);

    let replay_match = if spec.verify {
        let truth = HittingGame::new(alpha, s as u32, seed)?;
        let (_, mut adversary) = build_target_network(&truth, n, s, seed)?;
        let mut protocol = make(layout.sources())?;
        let out = run(
            &mut protocol,
            &mut adversary,
            &RunOptions::new(seed, transcript.rounds.max(1))
                .capacity(1)
                .traced(),
        )?;
        let mut events = engine_receive_events(out.history.as_ref().expect("traced"));
        events.retain(|e| e.round <= transcript.rounds);
        Some(out.audit.is_clean() && events == transcript.events)
    } else {
        None
    };
    Ok(HitgameRow {
        trial,
        seed,
        outcome: outcome_name(transcript.outcome).into(),
        rounds: Some(transcript.rounds),
        guesses: transcript.guesses,
        replay_match,
    })
}

/// Plays `spec.trials` independent games.
pub fn run_hitgame(spec: &HitgameSpec) -> Result<Vec<HitgameRow>> {
    if !PLAYER_NAMES.contains(&spec.player.as_str()) {
        return Err(config(format!(
            "unknown player {:?}; valid names: {}",
            spec.player,
            PLAYER_NAMES.join(", ")
        )));
    }
    if spec.trials < 1 {
        return Err(config("trials must be at least 1"));
    }
    let n = spec.n;
    let setting = Setting::Harmonic(SfParams::default().harmonic);
    let mut rows = Vec::new();
    for trial in 0..spec.trials {
        let seed = derive_seed(spec.seed, &labels::trial(0, trial));
        let row = match (spec.player.as_str(), spec.protocol.as_str()) {
            ("uniform", _) => {
                let mut game = HittingGame::new(spec.alpha, spec.beta, seed)?;
                let guesses = uniform_player(&mut game, &mut seeded_rng(seed, labels::PROTOCOL))?;
                HitgameRow {
                    trial,
                    seed,
                    outcome: "won".into(),
                    rounds: None,
                    guesses,
                    replay_match: None,
                }
            }
            (_, "algorithm1") => play(
                |src| Algorithm1::new(n, 1, src, setting.clone(), &Algorithm1Params::default()),
                spec,
                trial,
                seed,
            )?,
            (_, "algorithm2") => play(
                |src| Algorithm2::new(n, src, &setting, &Algorithm2Params::default()),
                spec,
                trial,
                seed,
            )?,
            (_, other) => {
                return Err(config(format!(
                    "unknown protocol {other:?}; valid names: algorithm1, algorithm2"
                )))
            }
        };
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_player_wins_and_replays() {
        let spec = HitgameSpec {
            n: 12,
            s: 3,
            trials: 2,
            seed: 4,
            ..HitgameSpec::default()
        };
        for row in run_hitgame(&spec).unwrap() {
            assert_eq!(row.outcome, "won");
            assert_eq!(row.replay_match, Some(true));
            assert!(row.guesses >= 1);
        }
    }

    #[test]
    fn uniform_player_and_bad_names() {
        let spec = HitgameSpec {
            player: "uniform".into(),
            trials: 5,
            ..HitgameSpec::default()
        };
        let rows = run_hitgame(&spec).unwrap();
        assert!(rows.iter().all(|r| r.guesses >= 2));
        let bad = HitgameSpec {
            player: "oracle".into(),
            ..HitgameSpec::default()
        };
        assert!(run_hitgame(&bad)
            .unwrap_err()
            .to_string()
            .contains("algorithm, uniform"));
    }
}
