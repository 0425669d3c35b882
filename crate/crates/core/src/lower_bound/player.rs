use std::collections::HashSet;

use rand::seq::IndexedRandom;
use rand::Rng;

use super::{Guess, HittingGame, StarLayout, Verdict};
use crate::engine::{DynamicHistory, Protocol, Step};
use crate::error::{config, Error, Result};
use crate::primitives::NodeId;
use crate::radio::{Heard, WireMessage};
use crate::rng::{labels, seeded_rng};

/// Guesses uniformly from `A x {1..beta}`, with replacement, until the game
/// is won. Returns the number of guesses.
pub fn uniform_player<R: Rng + ?Sized>(game: &mut HittingGame, rng: &mut R) -> Result<u64> {
    let a = game.a().to_vec();
    let beta = game.beta();
    while !game.is_won() {
        let x = *a.choose(rng).expect("A is non-empty");
        let y = rng.random_range(1..=beta);
        game.guess(Guess { x, y })?;
    }
    Ok(game.guesses())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReceiveEvent<M> {
    pub round: u64,
    pub node: NodeId,
    pub from: NodeId,
    pub message: M,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlayerOutcome {
    Won,
    RoundLimit,
    /// The simulated algorithm terminated before every external received
    /// its message: the algorithm is incorrect.
    AlgorithmStopped,
}

#[derive(Clone, Debug)]
pub struct Transcript<M> {
    pub outcome: PlayerOutcome,
    pub rounds: u64,
    pub guesses: u64,
    pub guess_rounds: Vec<u64>,
    pub events: Vec<ReceiveEvent<M>>,
}

/// Plays the hitting game by simulating `protocol` on the target network.
///
/// The player knows only the public layout. A lone clique transmitter
/// sending message `i` is the one case whose outcome depends on the secret
/// (is it `e_i`'s bridge?); the player asks the referee, at most once per
/// round, and remembers every verdict. The protocol must be driven with the
/// same seed as a ground-truth run to produce the same execution.
pub fn player_from_algorithm<P: Protocol>(
    protocol: &mut P,
    game: &mut HittingGame,
    layout: &StarLayout,
    capacity: usize,
    seed: u64,
    round_limit: u64,
) -> Result<Transcript<P::Msg>> {
    if capacity != 1 {
        return Err(config(format!(
            "the reduction requires capacity 1, got {capacity}"
        )));
    }
    let n = layout.node_count();
    if protocol.node_count() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: protocol.node_count(),
        });
    }
    let mut rng = seeded_rng(seed, labels::PROTOCOL);
    let mut known_bridge: Vec<Option<NodeId>> = vec![None; layout.message_count()];
    let mut misses: HashSet<(NodeId, usize)> = HashSet::new();
    let mut intents: Vec<Option<P::Msg>> = (0..n).map(|_| None).collect();
    let mut senders: Vec<Option<NodeId>> = vec![None; n];
    let mut events = Vec::new();
    let mut guess_rounds = Vec::new();
    let mut round = 0u64;
    let mut outcome = PlayerOutcome::RoundLimit;

    while round < round_limit {
        if game.is_won() {
            outcome = PlayerOutcome::Won;
            break;
        }
        if protocol.is_finished() {
            outcome = PlayerOutcome::AlgorithmStopped;
            break;
        }
        let r = round + 1;
        intents.iter_mut().for_each(|m| *m = None);
        if let Step::Idle(k) = protocol.transmit(r, &mut rng, &mut intents) {
            round += k.max(1).min(round_limit - round);
            continue;
        }

        senders.iter_mut().for_each(|s| *s = None);
        let mut tx = intents
            .iter()
            .enumerate()
            .filter_map(|(v, m)| m.as_ref().map(|m| (v, m)));
        if let (Some((v, m)), None) = (tx.next(), tx.next()) {
            let sender = NodeId::from(v);
            let ids = m.broadcast_ids();
            if ids.len() > 1 {
                return Err(Error::Protocol(format!(
                    "round {r}: {sender} sent {} messages at capacity 1",
                    ids.len()
                )));
            }
            let excluded = match ids.first() {
                None => None,
                Some(&i) => {
                    let i = i as usize;
                    let e = layout.external(i);
                    if sender == e || known_bridge[i] == Some(sender) {
                        None
                    } else if layout.is_external(sender)
                        || known_bridge[i].is_some()
                        || misses.contains(&(sender, i))
                    {
                        Some(e)
                    } else {
                        guess_rounds.push(r);
                        match game.guess(Guess {
                            x: sender.label(),
                            y: i as u32 + 1,
                        })? {
                            Verdict::Hit | Verdict::Won => {
                                known_bridge[i] = Some(sender);
                                None
                            }
                            Verdict::Miss => {
                                misses.insert((sender, i));
                                Some(e)
                            }
                        }
                    }
                }
            };
            for (u, s) in senders.iter_mut().enumerate() {
                if u != v && excluded.is_none_or(|e| e.index() != u) {
                    *s = Some(sender);
                }
            }
        }

        let heard = Heard::new(&intents, &senders);
        protocol.receive(r, &heard);
        for (u, from, m) in heard.iter() {
            events.push(ReceiveEvent {
                round: r,
                node: NodeId::from(u),
                from,
                message: m.clone(),
            });
        }
        round = r;
    }
    if game.is_won() {
        outcome = PlayerOutcome::Won;
    }
    Ok(Transcript {
        outcome,
        rounds: round,
        guesses: guess_rounds.len() as u64,
        guess_rounds,
        events,
    })
}

/// Receive events of a traced engine run, in the transcript's format.
pub fn engine_receive_events<M: Clone>(history: &DynamicHistory<M>) -> Vec<ReceiveEvent<M>> {
    let mut out = Vec::new();
    for rec in &history.records {
        let heard = Heard::new(&rec.intents, &rec.senders);
        for (u, from, m) in heard.iter() {
            out.push(ReceiveEvent {
                round: rec.round,
                node: NodeId::from(u),
                from,
                message: m.clone(),
            });
        }
    }
    out
}
