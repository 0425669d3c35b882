use std::cell::Cell;

use rand::seq::{IndexedRandom, SliceRandom};

use crate::error::{domain, Error, Result};
use crate::rng::{labels, seeded_rng};

/// A guess `(x, y)`: element `x` of `A` is the target paired with index `y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Guess {
    pub x: u32,
    pub y: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Hit,
    Miss,
    /// The guess hit the last remaining target.
    Won,
}

/// Referee of the `(alpha, beta)`-hitting game over the ground set
/// `{1, ..., alpha + beta}`. The partition is public; the targets are not.
#[derive(Debug)]
pub struct HittingGame {
    alpha: u32,
    beta: u32,
    a: Vec<u32>,
    b: Vec<u32>,
    /// `targets[y - 1]` is `a_y`.
    targets: Vec<u32>,
    hit: Vec<bool>,
    remaining: u32,
    log: Vec<(Guess, Verdict)>,
    reveals: Cell<u32>,
}

impl HittingGame {
    /// Default partition: `B = {1..beta}`, `A = {beta+1..alpha+beta}`.
    pub fn new(alpha: u32, beta: u32, seed: u64) -> Result<Self> {
        if beta < 1 || beta >= alpha {
            return Err(domain(format!(
                "need 1 <= beta < alpha, got alpha = {alpha}, beta = {beta}"
            )));
        }
        let b: Vec<u32> = (1..=beta).collect();
        let a: Vec<u32> = (beta + 1..=alpha + beta).collect();
        Self::with_partition(a, b, seed)
    }

    pub fn with_partition(a: Vec<u32>, b: Vec<u32>, seed: u64) -> Result<Self> {
        let (alpha, beta) = (a.len() as u32, b.len() as u32);
        if beta < 1 || beta >= alpha {
            return Err(domain(format!(
                "need 1 <= beta < alpha, got alpha = {alpha}, beta = {beta}"
            )));
        }
        let mut all: Vec<u32> = a.iter().chain(&b).copied().collect();
        all.sort_unstable();
        if all != (1..=alpha + beta).collect::<Vec<_>>() {
            return Err(domain("A and B must partition {1, ..., alpha + beta}"));
        }
        let mut rng = seeded_rng(seed, labels::REFEREE);
        let mut targets: Vec<u32> = a
            .choose_multiple(&mut rng, beta as usize)
            .copied()
            .collect();
        targets.shuffle(&mut rng);
        Ok(HittingGame {
            alpha,
            beta,
            a,
            b,
            hit: vec![false; targets.len()],
            targets,
            remaining: beta,
            log: Vec::new(),
            reveals: Cell::new(0),
        })
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    pub fn beta(&self) -> u32 {
        self.beta
    }

    pub fn a(&self) -> &[u32] {
        &self.a
    }

    pub fn b(&self) -> &[u32] {
        &self.b
    }

    pub fn is_won(&self) -> bool {
        self.remaining == 0
    }

    pub fn guesses(&self) -> u64 {
        self.log.len() as u64
    }

    pub fn log(&self) -> &[(Guess, Verdict)] {
        &self.log
    }

    pub fn guess(&mut self, g: Guess) -> Result<Verdict> {
        if self.is_won() {
            return Err(Error::Protocol("guess after the game was won".into()));
        }
        let y = g.y as usize;
        let fresh_hit =
            y >= 1 && y <= self.targets.len() && self.targets[y - 1] == g.x && !self.hit[y - 1];
        let verdict = if !fresh_hit {
            Verdict::Miss
        } else {
            self.hit[y - 1] = true;
            self.remaining -= 1;
            if self.remaining == 0 {
                Verdict::Won
            } else {
                Verdict::Hit
            }
        };
        self.log.push((g, verdict));
        Ok(verdict)
    }

    /// The full target list `a_1..a_beta`, for building the ground-truth
    /// network. Every call is counted; players must never call it.
    pub fn reveal_targets(&self) -> Vec<u32> {
        self.reveals.set(self.reveals.get() + 1);
        self.targets.clone()
    }

    pub fn reveal_count(&self) -> u32 {
        self.reveals.get()
    }
}
