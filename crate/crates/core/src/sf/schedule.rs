use rand::Rng;

/// A transmit probability, kept exact where it is a unit fraction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Prob {
    Never,
    /// `1/k`, drawn as `uniform(0..k) == 0`.
    OneIn(u64),
    Real(f64),
}

impl Prob {
    #[inline]
    pub fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> bool {
        match self {
            Prob::Never => false,
            Prob::OneIn(1) => true,
            Prob::OneIn(k) => rng.random_range(0..k) == 0,
            Prob::Real(p) => rng.random_bool(p),
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Prob::Never => 0.0,
            Prob::OneIn(k) => 1.0 / k as f64,
            Prob::Real(p) => p,
        }
    }
}

/// Per-round transmit rule of an informed node. Rounds are local to the run
/// and 1-based; `wake` is the round the node first received the payload, 0
/// for initiators. Only called for `round > wake`.
#[derive(Clone, Debug, PartialEq)]
pub enum Schedule {
    /// `1 / (1 + floor((round - wake - 1) / period))`.
    Harmonic { period: u64 },
    /// Constant probability.
    Homogeneous { p: f64 },
    /// Constant `1/one_in`.
    Uniform { one_in: u64 },
    /// Phases of `psi` rounds. First half: every informed node uses `1/n`.
    /// Second half: nodes first informed in this phase run a harmonic
    /// schedule restarted at the midpoint; everyone else stays silent.
    PsiPhase { psi: u64, n: u64, period: u64 },
}

#[inline]
fn harmonic(round: u64, wake: u64, period: u64) -> Prob {
    Prob::OneIn(1 + (round - wake - 1) / period)
}

impl Schedule {
    #[inline]
    pub fn prob(&self, round: u64, wake: u64) -> Prob {
        debug_assert!(round > wake);
        match *self {
            Schedule::Harmonic { period } => harmonic(round, wake, period),
            Schedule::Homogeneous { p } => Prob::Real(p),
            Schedule::Uniform { one_in } => Prob::OneIn(one_in),
            Schedule::PsiPhase { psi, n, period } => {
                let start = (round - 1) / psi * psi;
                let mid = start + psi.div_ceil(2);
                if round <= mid {
                    Prob::OneIn(n)
                } else if wake > start || (wake == 0 && start == 0) {
                    harmonic(round, wake.max(mid), period)
                } else {
                    Prob::Never
                }
            }
        }
    }
}
