//! Heat currents, channel decomposition, crossover fractions, and the
//! rectification factor.
//!
//! The numeric route evaluates `Tr{H L_channel[rho]}` directly from the
//! generator; the analytic route evaluates the closed-form steady-state
//! expressions. Both are exposed so each can serve as the other's oracle.
//!
//! Sign convention: a positive current means heat flowing from the
//! reservoir into the system.

use crate::density::DensityMatrix;
use crate::error::Error;
use crate::liouvillian::generator;
use crate::model::{eigenvalues, transition_table};
use crate::params::{Qubit, SystemParams};
use crate::steady::{
    left_gaps, rate_pair, rho1_tilde_weights, rho2_closed_form, rho2_tilde_weights, right_gaps,
    steady_ihr,
};
use crate::{Matrix8, Result};

/// `Tr{H_S m}` for the diagonal Hamiltonian.
pub fn energy_trace(params: &SystemParams, m: &Matrix8) -> f64 {
    let e = eigenvalues(params);
    (0..8).map(|i| e.lambdas[i] * m[(i, i)].re).sum()
}

/// Heat currents through every dissipation channel for a given state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatReport {
    pub qubit_a: f64,
    pub qubit_b: f64,
    pub qubit_c: f64,
    /// Crossing-channel current; zero when the channel is inactive.
    pub crossing: f64,
    pub crossing_active: bool,
    /// Direct left channel: qubit A plus qubit C dissipators.
    pub left_direct: f64,
    pub left: f64,
    pub right: f64,
}

/// Numeric heat currents `Tr{H_S L_channel[rho]}`.
pub fn heat_currents(params: &SystemParams, rho: &DensityMatrix) -> Result<HeatReport> {
    let act = generator(params, rho)?;
    let qubit_a = energy_trace(params, &act.qubit_a);
    let qubit_b = energy_trace(params, &act.qubit_b);
    let qubit_c = energy_trace(params, &act.qubit_c);
    let crossing = act.crossing.as_ref().map(|x| energy_trace(params, x));
    let left_direct = qubit_a + qubit_c;
    Ok(HeatReport {
        qubit_a,
        qubit_b,
        qubit_c,
        crossing: crossing.unwrap_or(0.0),
        crossing_active: crossing.is_some(),
        left_direct,
        left: left_direct + crossing.unwrap_or(0.0),
        right: qubit_b,
    })
}

/// Per-qubit analytic currents for the independent-reservoir steady state:
/// `Q_mu = -sum_ij w_ij Gamma_ij` with
/// `Gamma_ij = 2 [J(-w) rho_ii - J(+w) rho_jj]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IhrCurrents {
    pub qubit_a: f64,
    pub qubit_b: f64,
    pub qubit_c: f64,
    pub left: f64,
    pub right: f64,
}

pub fn analytic_ihr_currents(params: &SystemParams) -> Result<IhrCurrents> {
    let rho = steady_ihr(params)?;
    analytic_currents_for_populations(params, &rho)
}

/// The Gamma-form currents evaluated on an arbitrary diagonal state.
pub fn analytic_currents_for_populations(
    params: &SystemParams,
    rho: &DensityMatrix,
) -> Result<IhrCurrents> {
    let table = transition_table(params);
    let mut q = [0.0_f64; 3];
    for (slot, mu) in [Qubit::A, Qubit::B, Qubit::C].iter().enumerate() {
        for t in table.for_qubit(*mu) {
            let (jm, jp) = rate_pair(params.kappa, t.frequency, params.temperature(*mu))?;
            let gamma = 2.0 * (jm * rho.population(t.source) - jp * rho.population(t.target));
            q[slot] -= t.frequency * gamma;
        }
    }
    Ok(IhrCurrents {
        qubit_a: q[0],
        qubit_b: q[1],
        qubit_c: q[2],
        left: q[0] + q[2],
        right: q[1],
    })
}

/// Left-channel split and totals for a common-reservoir steady component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelCurrents {
    /// Direct dissipation channel (A and C dissipators).
    pub direct: f64,
    /// Crossing dissipation channel.
    pub crossing: f64,
    pub left: f64,
    pub right: f64,
}

/// Bracket terms `w12 J(+w12) - w26 J(-w26)` and
/// `w34 J(+w34) - w48 J(-w48)` shared by the channel expressions.
fn crossing_brackets(params: &SystemParams) -> Result<(f64, f64)> {
    let [w12, w26, w34, w48] = left_gaps(params);
    let (_, j12p) = rate_pair(params.kappa, w12, params.t_left)?;
    let (j26m, _) = rate_pair(params.kappa, w26, params.t_left)?;
    let (_, j34p) = rate_pair(params.kappa, w34, params.t_left)?;
    let (j48m, _) = rate_pair(params.kappa, w48, params.t_left)?;
    Ok((w12 * j12p - w26 * j26m, w34 * j34p - w48 * j48m))
}

/// Channel currents of the heat-resisting state: equal and opposite, zero
/// total in both reservoirs.
pub fn analytic_rho1_channels(params: &SystemParams) -> Result<ChannelCurrents> {
    let [t1, t2] = rho1_tilde_weights(params)?;
    let (b1, b2) = crossing_brackets(params)?;
    let direct = 2.0 * (t1 * b1 + t2 * b2);
    Ok(ChannelCurrents {
        direct,
        crossing: -direct,
        left: 0.0,
        right: 0.0,
    })
}

/// Channel currents of the heat-conducting state.
pub fn analytic_rho2_channels(params: &SystemParams) -> Result<ChannelCurrents> {
    let rho2 = rho2_closed_form(params)?;
    let [w12, w26, w34, w48] = left_gaps(params);
    let pairs = [(w12, 1, 2), (w26, 2, 6), (w34, 3, 4), (w48, 4, 8)];
    let mut x = 0.0;
    for (w, i, j) in pairs {
        let (jm, jp) = rate_pair(params.kappa, w, params.t_left)?;
        let gamma = 2.0 * (jm * rho2.population(i) - jp * rho2.population(j));
        x += w * gamma;
    }
    let direct = -2.0 * x;

    let [_, _, t5, t6, _, _] = rho2_tilde_weights(params)?;
    let (b1, b2) = crossing_brackets(params)?;
    let crossing = 2.0 * (b1 * t5 + b2 * t6);

    let [w13, w24, w68] = right_gaps(params);
    let mut right = 0.0;
    for (w, i, j, mult) in [(w13, 1, 3, 1.0), (w24, 2, 4, 2.0), (w68, 6, 8, 1.0)] {
        let (jm, jp) = rate_pair(params.kappa, w, params.t_right)?;
        let gamma = 2.0 * (jm * rho2.population(i) - jp * rho2.population(j));
        right -= mult * w * gamma;
    }
    Ok(ChannelCurrents {
        direct,
        crossing,
        left: direct + crossing,
        right,
    })
}

/// The fractions at which one of the two left channels changes sign:
/// `p_d` zeroes the direct channel, `p_c` the crossing channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossoverFractions {
    pub p_d: f64,
    pub p_c: f64,
}

pub fn crossover_fractions(params: &SystemParams) -> Result<CrossoverFractions> {
    let c1 = analytic_rho1_channels(params)?;
    let c2 = analytic_rho2_channels(params)?;
    let den_d = c1.direct - c2.direct;
    let den_c = c1.direct + c2.crossing;
    if den_d.abs() < 1e-300 || den_c.abs() < 1e-300 {
        return Err(Error::DegenerateDenominator);
    }
    Ok(CrossoverFractions {
        p_d: c1.direct / den_d,
        p_c: c1.direct / den_c,
    })
}

/// Normalized asymmetry `||f| - |r|| / max(|f|, |r|)`. Undefined (and
/// reported as 0) when both magnitudes are below 1e-16.
pub fn asymmetry_factor(forward: f64, reverse: f64) -> (f64, bool) {
    let m = forward.abs().max(reverse.abs());
    if m < 1e-16 {
        (0.0, false)
    } else {
        (
            ((forward.abs() - reverse.abs()).abs() / m).clamp(0.0, 1.0),
            true,
        )
    }
}

/// Rectification of the steady-state left current under a temperature
/// swap. In common-reservoir mode the current scales linearly with the
/// mixing fraction `p`, so the factor is `p`-independent for `p > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectificationResult {
    pub forward: f64,
    pub reverse: f64,
    pub factor: f64,
    pub defined: bool,
}

pub fn rectification(params: &SystemParams, p: f64) -> Result<RectificationResult> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParams(format!(
            "mixing fraction {p} outside [0, 1]"
        )));
    }
    let forward = steady_left_current(params, p)?;
    let reverse = steady_left_current(&params.with_swapped_temperatures(), p)?;
    let (factor, defined) = asymmetry_factor(forward, reverse);
    Ok(RectificationResult {
        forward,
        reverse,
        factor,
        defined,
    })
}

/// Steady-state left current: `p`-scaled conducting current in
/// common-reservoir mode, the unique steady current otherwise.
pub fn steady_left_current(params: &SystemParams, p: f64) -> Result<f64> {
    if params.common_active()? {
        Ok(p * analytic_rho2_channels(params)?.left)
    } else {
        Ok(analytic_ihr_currents(params)?.left)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::DissipationMode;
    use crate::steady::steady_chr_with_fraction;
    use approx::assert_abs_diff_eq;

    fn crossing_params() -> SystemParams {
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

    fn ihr_params() -> SystemParams {
        SystemParams {
            omega_c: 2.0,
            ..crossing_params()
        }
    }

    #[test]
    fn ihr_analytic_matches_numeric() {
        let p = ihr_params();
        let rho = steady_ihr(&p).unwrap();
        let num = heat_currents(&p, &rho).unwrap();
        let ana = analytic_ihr_currents(&p).unwrap();
        assert_abs_diff_eq!(num.qubit_a, ana.qubit_a, epsilon = 1e-15);
        assert_abs_diff_eq!(num.qubit_b, ana.qubit_b, epsilon = 1e-15);
        assert_abs_diff_eq!(num.qubit_c, ana.qubit_c, epsilon = 1e-15);
        assert!(!num.crossing_active);
    }

    #[test]
    fn ihr_energy_conservation() {
        let ana = analytic_ihr_currents(&ihr_params()).unwrap();
        assert_abs_diff_eq!(ana.left + ana.right, 0.0, epsilon = 1e-15);
        assert!(
            ana.left.abs() > 1e-8,
            "hot-cold gradient must drive current"
        );
    }

    #[test]
    fn rho1_channels_cancel() {
        let p = crossing_params();
        let c = analytic_rho1_channels(&p).unwrap();
        assert_abs_diff_eq!(c.direct + c.crossing, 0.0, epsilon = 1e-18);
        let rho1 = crate::steady::rho1_closed_form(&p).unwrap();
        let num = heat_currents(&p, &rho1).unwrap();
        assert_abs_diff_eq!(num.left_direct, c.direct, epsilon = 1e-15);
        assert_abs_diff_eq!(num.crossing, c.crossing, epsilon = 1e-15);
        assert_abs_diff_eq!(num.right, 0.0, epsilon = 1e-16);
    }

    #[test]
    fn rho2_channels_match_numeric() {
        let p = crossing_params();
        let c = analytic_rho2_channels(&p).unwrap();
        let rho2 = rho2_closed_form(&p).unwrap();
        let num = heat_currents(&p, &rho2).unwrap();
        assert_abs_diff_eq!(num.left_direct, c.direct, epsilon = 1e-15);
        assert_abs_diff_eq!(num.crossing, c.crossing, epsilon = 1e-15);
        assert_abs_diff_eq!(num.right, c.right, epsilon = 1e-15);
        assert_abs_diff_eq!(c.left + c.right, 0.0, epsilon = 1e-16);
    }

    #[test]
    fn current_scales_linearly_with_fraction() {
        let p = crossing_params();
        let full = analytic_rho2_channels(&p).unwrap();
        for frac in [0.0, 0.25, 0.5, 1.0] {
            let mix = steady_chr_with_fraction(&p, frac).unwrap();
            let num = heat_currents(&p, &mix.rho).unwrap();
            assert_abs_diff_eq!(num.left, frac * full.left, epsilon = 1e-15);
            assert_abs_diff_eq!(num.right, frac * full.right, epsilon = 1e-15);
        }
    }

    #[test]
    fn crossover_fractions_zero_their_channels() {
        let p = crossing_params();
        let f = crossover_fractions(&p).unwrap();
        assert!(f.p_d > 0.0 && f.p_d < 1.0);
        assert!(f.p_c > 0.0 && f.p_c < 1.0);
        let c1 = analytic_rho1_channels(&p).unwrap();
        let c2 = analytic_rho2_channels(&p).unwrap();
        let direct_at = |x: f64| (1.0 - x) * c1.direct + x * c2.direct;
        let crossing_at = |x: f64| (1.0 - x) * c1.crossing + x * c2.crossing;
        assert_abs_diff_eq!(direct_at(f.p_d), 0.0, epsilon = 1e-18);
        assert_abs_diff_eq!(crossing_at(f.p_c), 0.0, epsilon = 1e-18);
        // Hot left: the direct channel flips sign first.
        assert!(f.p_d < f.p_c);
    }

    #[test]
    fn crossover_order_swaps_with_gradient() {
        let p = crossing_params().with_swapped_temperatures();
        let f = crossover_fractions(&p).unwrap();
        assert!(f.p_d > f.p_c);
    }

    #[test]
    fn equilibrium_currents_vanish() {
        let p = SystemParams {
            t_left: 21.0,
            ..crossing_params()
        };
        let c = analytic_rho2_channels(&p).unwrap();
        assert_abs_diff_eq!(c.left, 0.0, epsilon = 1e-16);
        assert_abs_diff_eq!(c.right, 0.0, epsilon = 1e-16);
        let i = analytic_ihr_currents(&SystemParams {
            t_left: 21.0,
            ..ihr_params()
        })
        .unwrap();
        assert_abs_diff_eq!(i.left, 0.0, epsilon = 1e-16);
    }

    #[test]
    fn cold_terminal_limits_vanish() {
        let base = crossing_params();
        for p in [
            SystemParams {
                t_left: 0.0,
                ..base
            },
            SystemParams {
                t_right: 0.0,
                ..base
            },
        ] {
            let c = analytic_rho2_channels(&p).unwrap();
            assert_abs_diff_eq!(c.left, 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(c.right, 0.0, epsilon = 1e-15);
        }
        // At T_R = 0 the two channels carry equal and opposite current.
        let p = SystemParams {
            t_right: 0.0,
            ..base
        };
        let c = analytic_rho2_channels(&p).unwrap();
        assert!(c.direct > 1e-6);
        assert_abs_diff_eq!(c.direct, -c.crossing, epsilon = 1e-16);
    }

    #[test]
    fn decoupled_chain_carries_no_current() {
        let p = SystemParams {
            g_ab: 0.0,
            g_bc: 0.0,
            ..crossing_params()
        };
        let c = analytic_rho2_channels(&p).unwrap();
        assert_abs_diff_eq!(c.left, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.right, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn rectification_basics() {
        let p = crossing_params();
        let r = rectification(&p, 1.0).unwrap();
        assert!(r.defined);
        assert!(r.factor > 0.0 && r.factor <= 1.0);
        assert!(r.forward * r.reverse < 0.0, "gradient swap reverses flow");
        // p-independence of the factor.
        let r_half = rectification(&p, 0.5).unwrap();
        assert_abs_diff_eq!(r.factor, r_half.factor, epsilon = 1e-12);
    }

    #[test]
    fn rectification_undefined_at_equilibrium() {
        let p = SystemParams {
            t_left: 21.0,
            ..crossing_params()
        };
        let r = rectification(&p, 1.0).unwrap();
        assert!(!r.defined);
        assert_eq!(r.factor, 0.0);
    }
}
