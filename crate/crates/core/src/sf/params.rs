use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

fn ceil_u64(x: f64) -> u64 {
    x.ceil().max(1.0) as u64
}

pub(crate) fn ln(n: usize) -> f64 {
    (n as f64).ln()
}

pub(crate) fn log2(n: usize) -> f64 {
    (n as f64).log2()
}

/// Harmonic broadcast for infinite-interval connected networks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarmonicParams {
    /// Failure parameter of the k-limited procedure.
    pub epsilon: f64,
    /// Multiplier in the k-limited budget `mult * k * period * (ln n + 1)`.
    pub budget_factor: f64,
    /// Fixed harmonic period instead of `ceil(12 ln(n / epsilon))`.
    pub period: Option<u64>,
    /// Failure parameter of the concurrency-resistant runs; `1/n` if unset.
    pub resistant_epsilon: Option<f64>,
}

impl Default for HarmonicParams {
    fn default() -> Self {
        HarmonicParams {
            epsilon: 0.5,
            budget_factor: 4.0,
            period: None,
            resistant_epsilon: None,
        }
    }
}

impl HarmonicParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(domain(format!(
                "epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        if let Some(e) = self.resistant_epsilon {
            if !(e > 0.0 && e < 1.0) {
                return Err(domain(format!(
                    "resistant epsilon must lie in (0, 1), got {e}"
                )));
            }
        }
        if self.period == Some(0) {
            return Err(domain("harmonic period must be positive"));
        }
        if self.budget_factor <= 0.0 {
            return Err(domain("budget factor must be positive"));
        }
        Ok(())
    }

    pub fn period_for(&self, n: usize, epsilon: f64) -> u64 {
        self.period
            .unwrap_or_else(|| ceil_u64(12.0 * (n as f64 / epsilon).ln()))
    }

    pub fn period(&self, n: usize) -> u64 {
        self.period_for(n, self.epsilon)
    }

    pub fn budget_with_period(&self, n: usize, k: usize, period: u64) -> u64 {
        ceil_u64(self.budget_factor * k as f64 * period as f64 * (ln(n) + 1.0))
    }

    /// Rounds of the k-limited procedure.
    pub fn budget(&self, n: usize, k: usize) -> u64 {
        self.budget_with_period(n, k, self.period(n))
    }

    pub fn resistant_epsilon(&self, n: usize) -> f64 {
        self.resistant_epsilon.unwrap_or(1.0 / n as f64)
    }
}

/// Homogeneous broadcast for 1-interval connected networks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HomogeneousParams {
    /// Budget constant: `kappa * k * n / ln n` rounds for k-limited runs,
    /// `kappa * n^2 / ln n` for full runs.
    pub kappa: f64,
    /// Pairing stage length `pairing_factor * n ln n`.
    pub pairing_factor: f64,
}

impl Default for HomogeneousParams {
    fn default() -> Self {
        HomogeneousParams {
            kappa: 3.0,
            pairing_factor: 3.0,
        }
    }
}

impl HomogeneousParams {
    pub fn validate(&self) -> Result<()> {
        if self.kappa <= 0.0 || self.pairing_factor <= 0.0 {
            return Err(domain("homogeneous constants must be positive"));
        }
        Ok(())
    }

    pub fn probability(n: usize) -> f64 {
        (ln(n) / n as f64).min(1.0)
    }

    pub fn budget(&self, n: usize, k: usize) -> u64 {
        ceil_u64(self.kappa * k as f64 * n as f64 / ln(n))
    }

    pub fn full_budget(&self, n: usize) -> u64 {
        self.budget(n, n)
    }

    pub fn pairing_budget(&self, n: usize) -> u64 {
        ceil_u64(self.pairing_factor * n as f64 * ln(n))
    }
}

/// Phase protocol for T-interval connected networks with `psi = min(tau, T)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsiParams {
    /// Phase-count constant.
    pub kappa: f64,
    /// Harmonic period in the second half of a phase; `ceil(log2 n)` if unset.
    pub period: Option<u64>,
    pub pairing_factor: f64,
}

impl Default for PsiParams {
    fn default() -> Self {
        PsiParams {
            kappa: 8.0,
            period: None,
            pairing_factor: 3.0,
        }
    }
}

impl PsiParams {
    pub fn validate(&self) -> Result<()> {
        if self.kappa <= 0.0 || self.pairing_factor <= 0.0 {
            return Err(domain("phase-protocol constants must be positive"));
        }
        if self.period == Some(0) {
            return Err(domain("phase harmonic period must be positive"));
        }
        Ok(())
    }

    /// Smallest admissible phase length, `ceil(log2(n)^2)`.
    pub fn min_psi(n: usize) -> u64 {
        ceil_u64(log2(n).powi(2))
    }

    pub fn check_band(n: usize, psi: u64) -> Result<()> {
        let lo = Self::min_psi(n);
        if psi < lo || psi > n as u64 {
            return Err(crate::error::Error::Dispatch(format!(
                "psi = {psi} outside [{lo}, {n}] for n = {n}; use the 1-interval protocol below the band \
                 and the harmonic protocol above it"
            )));
        }
        Ok(())
    }

    pub fn period(&self, n: usize) -> u64 {
        self.period.unwrap_or_else(|| ceil_u64(log2(n)))
    }

    /// Number of phases for a k-limited run (full run once `k > n/2`).
    pub fn phases(&self, n: usize, k: usize, psi: u64) -> u64 {
        let psi2 = (psi * psi) as f64;
        let l = log2(n);
        if 2 * k <= n {
            ceil_u64(self.kappa * k as f64 * n as f64 * l * l / psi2)
        } else {
            self.full_phases(n, psi)
        }
    }

    pub fn full_phases(&self, n: usize, psi: u64) -> u64 {
        let l = log2(n);
        ceil_u64(self.kappa * (n * n) as f64 * l * l * l / (psi * psi) as f64)
    }

    pub fn pairing_budget(&self, n: usize) -> u64 {
        ceil_u64(self.pairing_factor * n as f64 * ln(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_period_and_budget() {
        let h = HarmonicParams::default();
        // ceil(12 ln 32) = ceil(41.588) = 42.
        assert_eq!(h.period(16), 42);
        // ceil(4 * 8 * 42 * (ln 16 + 1)) = ceil(5070.05...) = 5071.
        assert_eq!(h.budget(16, 8), 5071);
        assert_eq!(h.period_for(16, 1.0 / 16.0), 67);
    }

    #[test]
    fn psi_band() {
        assert_eq!(PsiParams::min_psi(64), 36);
        assert!(PsiParams::check_band(64, 36).is_ok());
        assert!(PsiParams::check_band(64, 35).is_err());
        assert!(PsiParams::check_band(64, 65).is_err());
    }

    #[test]
    fn validation() {
        assert!(HarmonicParams {
            epsilon: 1.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(HarmonicParams::default().validate().is_ok());
        assert!(HomogeneousParams {
            kappa: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(PsiParams {
            period: Some(0),
            ..Default::default()
        }
        .validate()
        .is_err());
    }
}
