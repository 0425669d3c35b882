use serde::{Deserialize, Serialize};

use super::params::HomogeneousParams as Hom;
use super::{HarmonicParams, HomogeneousParams, PsiParams, ResistantPlan, Schedule};
use crate::error::{Error, Result};
use crate::primitives::Horizon;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SettingKind {
    /// Infinite-interval connectivity, any obliviousness.
    Stable,
    /// 1-interval connectivity against a 1-oblivious adversary.
    OneInterval,
    /// T-interval connectivity with `psi = min(tau, T)` in the phase band.
    Phased,
}

/// A connectivity regime with its protocol constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Setting {
    Harmonic(HarmonicParams),
    Homogeneous(HomogeneousParams),
    PsiPhase { params: PsiParams, psi: u64 },
}

/// Protocol constants for all regimes, as read from configuration.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SfParams {
    pub harmonic: HarmonicParams,
    pub homogeneous: HomogeneousParams,
    pub psi: PsiParams,
}

impl Setting {
    pub fn psi_phase(n: usize, psi: u64, params: PsiParams) -> Result<Self> {
        PsiParams::check_band(n, psi)?;
        Ok(Setting::PsiPhase { params, psi })
    }

    pub fn kind(&self) -> SettingKind {
        match self {
            Setting::Harmonic(_) => SettingKind::Stable,
            Setting::Homogeneous(_) => SettingKind::OneInterval,
            Setting::PsiPhase { .. } => SettingKind::Phased,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Setting::Harmonic(h) => h.validate(),
            Setting::Homogeneous(h) => h.validate(),
            Setting::PsiPhase { params, .. } => params.validate(),
        }
    }

    /// Schedule and round budget of a k-limited broadcast on `n` nodes.
    pub fn limited(&self, n: usize, k: usize) -> (Schedule, u64) {
        match self {
            Setting::Harmonic(h) => (
                Schedule::Harmonic {
                    period: h.period(n),
                },
                h.budget(n, k),
            ),
            Setting::Homogeneous(h) => (
                Schedule::Homogeneous {
                    p: Hom::probability(n),
                },
                h.budget(n, k),
            ),
            Setting::PsiPhase { params, psi } => (
                Schedule::PsiPhase {
                    psi: *psi,
                    n: n as u64,
                    period: params.period(n),
                },
                params.phases(n, k, *psi) * psi,
            ),
        }
    }

    pub fn resistant_plan(&self, n: usize) -> ResistantPlan {
        let (schedule, rounds, pairing) = match self {
            Setting::Harmonic(h) => {
                let period = h.period_for(n, h.resistant_epsilon(n));
                (
                    Schedule::Harmonic { period },
                    h.budget_with_period(n, n, period),
                    None,
                )
            }
            Setting::Homogeneous(h) => (
                Schedule::Homogeneous {
                    p: Hom::probability(n),
                },
                h.full_budget(n),
                Some(h.pairing_budget(n)),
            ),
            Setting::PsiPhase { params, psi } => (
                Schedule::PsiPhase {
                    psi: *psi,
                    n: n as u64,
                    period: params.period(n),
                },
                params.full_phases(n, *psi) * psi,
                Some(params.pairing_budget(n)),
            ),
        };
        ResistantPlan {
            n,
            dissemination: schedule.clone(),
            dissemination_rounds: rounds,
            pairing_rounds: pairing,
            bottom: schedule,
            bottom_rounds: rounds,
        }
    }
}

/// Chooses the regime for interval connectivity `t` and obliviousness `tau`.
///
/// Infinite `T`, or `psi = min(tau, T)` above `n`, uses the harmonic
/// protocol; `psi` below `ceil(log2(n)^2)` uses the homogeneous one; the band
/// in between uses the phase protocol. A 0-oblivious adversary is only
/// supported with infinite `T`.
pub fn dispatch(n: usize, t: Horizon, tau: Horizon, params: &SfParams) -> Result<Setting> {
    if t == Horizon::Finite(0) {
        return Err(Error::Dispatch("T must be at least 1".into()));
    }
    let setting = if t.is_infinite() {
        Setting::Harmonic(params.harmonic.clone())
    } else if tau == Horizon::Finite(0) {
        return Err(Error::Dispatch(
            "a 0-oblivious adversary is only supported with T = inf; use tau >= 1 or T = inf"
                .into(),
        ));
    } else {
        let psi = match (t, tau) {
            (Horizon::Finite(t), Horizon::Finite(tau)) => t.min(tau),
            (Horizon::Finite(t), Horizon::Infinite) => t,
            (Horizon::Infinite, _) => unreachable!(),
        };
        if psi > n as u64 {
            Setting::Harmonic(params.harmonic.clone())
        } else if psi < PsiParams::min_psi(n) {
            Setting::Homogeneous(params.homogeneous.clone())
        } else {
            Setting::PsiPhase {
                params: params.psi.clone(),
                psi,
            }
        }
    };
    setting.validate()?;
    Ok(setting)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Horizon::{Finite, Infinite};

    #[test]
    fn dispatch_by_regime() {
        let p = SfParams::default();
        assert_eq!(
            dispatch(64, Infinite, Infinite, &p).unwrap().kind(),
            SettingKind::Stable
        );
        assert_eq!(
            dispatch(64, Infinite, Finite(0), &p).unwrap().kind(),
            SettingKind::Stable
        );
        assert_eq!(
            dispatch(64, Finite(1), Finite(1), &p).unwrap().kind(),
            SettingKind::OneInterval
        );
        assert_eq!(
            dispatch(64, Finite(36), Infinite, &p).unwrap().kind(),
            SettingKind::Phased
        );
        assert_eq!(
            dispatch(64, Finite(100), Finite(40), &p).unwrap().kind(),
            SettingKind::Phased
        );
        assert_eq!(
            dispatch(64, Finite(100), Finite(35), &p).unwrap().kind(),
            SettingKind::OneInterval
        );
        assert_eq!(
            dispatch(64, Finite(65), Infinite, &p).unwrap().kind(),
            SettingKind::Stable
        );
        assert!(dispatch(64, Finite(5), Finite(0), &p).is_err());
    }

    #[test]
    fn psi_phase_rejects_out_of_band() {
        assert!(matches!(
            Setting::psi_phase(64, 10, PsiParams::default()),
            Err(Error::Dispatch(_))
        ));
    }

    #[test]
    fn phase_budgets() {
        let s = Setting::psi_phase(64, 36, PsiParams::default()).unwrap();
        // k <= n/2: ceil(8 * 32 * 64 * 36 / 1296) = ceil(455.1) = 456 phases.
        assert_eq!(s.limited(64, 32).1, 456 * 36);
        // Full run: ceil(8 * 4096 * 216 / 1296) = 5462 phases.
        assert_eq!(s.limited(64, 33).1, 5462 * 36);
    }
}
