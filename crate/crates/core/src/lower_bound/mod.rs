//! The hitting-game reduction: a referee hiding a target set, the
//! clique-star network whose bridges encode it, and a player that wins the
//! game by simulating a broadcast algorithm on the target network.

mod game;
mod player;
mod star;

pub use game::{Guess, HittingGame, Verdict};
pub use player::{
    engine_receive_events, player_from_algorithm, uniform_player, PlayerOutcome, ReceiveEvent,
    Transcript,
};
pub use star::{build_target_network, CliqueStar, StarLayout};
