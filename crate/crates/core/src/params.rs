//! Physical parameters of the three-qubit diode.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// Relative tolerance used to decide degeneracy of the crossing condition.
pub const EPS_DEG: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Qubit {
    A,
    B,
    C,
}

impl Qubit {
    pub const ALL: [Qubit; 3] = [Qubit::A, Qubit::B, Qubit::C];
}

/// How the left reservoir attaches to qubits A and C.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DissipationMode {
    /// Common dissipators iff the crossing condition holds.
    #[default]
    Auto,
    /// Two identical but independent left reservoirs, even at degenerate
    /// parameters. This is the comparison case without crossing dissipation.
    ForceIndependent,
    /// Common reservoir; errors unless the crossing condition holds.
    ForceCommon,
}

/// All physical knobs, dimensionless in units of `omega_0 = 1`
/// (`hbar = k_B = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    pub omega_a: f64,
    pub omega_b: f64,
    pub omega_c: f64,
    pub g_ab: f64,
    pub g_bc: f64,
    pub g_ac: f64,
    /// Flat-spectrum dissipation rate kappa.
    pub kappa: f64,
    /// Temperature of the left reservoir (qubits A and C).
    pub t_left: f64,
    /// Temperature of the right reservoir (qubit B).
    pub t_right: f64,
    #[serde(default)]
    pub mode: DissipationMode,
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.omega_a,
            self.omega_b,
            self.omega_c,
            self.g_ab,
            self.g_bc,
            self.g_ac,
            self.kappa,
            self.t_left,
            self.t_right,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        if self.omega_a <= 0.0 || self.omega_b <= 0.0 || self.omega_c <= 0.0 {
            return Err(Error::InvalidParams(
                "qubit frequencies must be positive".into(),
            ));
        }
        if self.kappa <= 0.0 {
            return Err(Error::InvalidParams("kappa must be positive".into()));
        }
        if self.t_left < 0.0 || self.t_right < 0.0 {
            return Err(Error::InvalidParams(
                "temperatures must be non-negative".into(),
            ));
        }
        if self.mode == DissipationMode::ForceCommon && !self.crossing_condition() {
            return Err(Error::CrossingConditionNotMet);
        }
        Ok(())
    }

    /// True iff `omega_A = omega_C` and `g_AB = g_BC` within [`EPS_DEG`]
    /// relative tolerance.
    pub fn crossing_condition(&self) -> bool {
        let w_tol = EPS_DEG * self.omega_a.max(self.omega_c);
        let g_tol = EPS_DEG * self.g_ab.abs().max(self.g_bc.abs()).max(1.0);
        (self.omega_a - self.omega_c).abs() <= w_tol && (self.g_ab - self.g_bc).abs() <= g_tol
    }

    /// Whether the crossing dissipator participates under the configured mode.
    pub fn common_active(&self) -> Result<bool> {
        match self.mode {
            DissipationMode::Auto => Ok(self.crossing_condition()),
            DissipationMode::ForceIndependent => Ok(false),
            DissipationMode::ForceCommon => {
                if self.crossing_condition() {
                    Ok(true)
                } else {
                    Err(Error::CrossingConditionNotMet)
                }
            }
        }
    }

    /// Temperature of the reservoir attached to qubit `mu`.
    pub fn temperature(&self, mu: Qubit) -> f64 {
        match mu {
            Qubit::A | Qubit::C => self.t_left,
            Qubit::B => self.t_right,
        }
    }

    /// Same system with the two reservoir temperatures exchanged.
    pub fn with_swapped_temperatures(&self) -> SystemParams {
        SystemParams {
            t_left: self.t_right,
            t_right: self.t_left,
            ..*self
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> SystemParams {
        SystemParams {
            omega_a: 3.0,
            omega_b: 5.0,
            omega_c: 3.0,
            g_ab: 0.1,
            g_bc: 0.1,
            g_ac: 0.1,
            kappa: 1e-3,
            t_left: 100.0,
            t_right: 21.0,
            mode: DissipationMode::Auto,
        }
    }

    #[test]
    fn crossing_condition_exact_equality() {
        assert!(base().crossing_condition());
    }

    #[test]
    fn crossing_condition_distinct_frequencies() {
        let p = SystemParams {
            omega_a: 3.0,
            omega_c: 2.0,
            ..base()
        };
        assert!(!p.crossing_condition());
    }

    #[test]
    fn crossing_condition_asymmetric_coupling() {
        let p = SystemParams {
            g_ab: 0.1,
            g_bc: 0.2,
            ..base()
        };
        assert!(!p.crossing_condition());
    }

    #[test]
    fn force_common_requires_degeneracy() {
        let p = SystemParams {
            omega_c: 2.0,
            mode: DissipationMode::ForceCommon,
            ..base()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn force_independent_disables_crossing() {
        let p = SystemParams {
            mode: DissipationMode::ForceIndependent,
            ..base()
        };
        assert!(!p.common_active().unwrap());
    }
}
