//! The global master-equation generator: per-qubit dissipators, the
//! crossing dissipator of the common reservoir, the coherent commutator,
//! and a fixed-step integrator used as the brute-force steady-state oracle.
//!
//! Every eigen-operator is a rank-1 jump `|j><i|`, so dissipator terms are
//! applied elementwise in O(d) instead of via dense products.

use crate::density::{hermiticity_defect, min_eigenvalue, DensityMatrix};
use crate::error::Error;
use crate::model::{
    eigenvalues, spectral_density_signed, transition_table, Transition, TransitionTable,
};
use crate::params::{Qubit, SystemParams};
use crate::{Matrix8, Result, C64};

/// Time derivative of the density matrix, split by generating channel.
#[derive(Debug, Clone)]
pub struct GeneratorAction {
    pub commutator: Matrix8,
    pub qubit_a: Matrix8,
    pub qubit_b: Matrix8,
    pub qubit_c: Matrix8,
    /// Present only in common-reservoir mode.
    pub crossing: Option<Matrix8>,
    pub total: Matrix8,
}

impl GeneratorAction {
    pub fn channel(&self, mu: Qubit) -> &Matrix8 {
        match mu {
            Qubit::A => &self.qubit_a,
            Qubit::B => &self.qubit_b,
            Qubit::C => &self.qubit_c,
        }
    }
}

/// Adds `rate * (2 V rho V^dag - {V^dag V, rho})` for the jump
/// `V = |to><from|` (0-based indices).
fn add_jump(out: &mut Matrix8, rho: &Matrix8, rate: f64, from: usize, to: usize) {
    let r = C64::new(rate, 0.0);
    out[(to, to)] += 2.0 * r * rho[(from, from)];
    for b in 0..8 {
        out[(from, b)] -= r * rho[(from, b)];
        out[(b, from)] -= r * rho[(b, from)];
    }
}

/// Adds `rate * (2 P rho Q^dag - {Q^dag P, rho})` for rank-1 operators
/// `P = |p2><p1|`, `Q = |q2><q1|` (0-based).
fn add_cross_term(
    out: &mut Matrix8,
    rho: &Matrix8,
    rate: f64,
    (p1, p2): (usize, usize),
    (q1, q2): (usize, usize),
) {
    let r = C64::new(rate, 0.0);
    out[(p2, q2)] += 2.0 * r * rho[(p1, q1)];
    if p2 == q2 {
        // Q^dag P = |q1><p1|
        for b in 0..8 {
            out[(q1, b)] -= r * rho[(p1, b)];
            out[(b, p1)] -= r * rho[(b, q1)];
        }
    }
}

fn jump_indices(t: &Transition) -> (usize, usize) {
    (t.source - 1, t.target - 1)
}

/// Dissipator of a single qubit's reservoir coupling, Lindblad form summed
/// over the qubit's four eigen-operators. Negative eigenfrequencies swap
/// the absorption/emission roles via the adjoint operator.
///
/// For qubit B, the secular decomposition of the single right-bath
/// coupling groups same-frequency operators collectively: when the 2-4 and
/// 5-7 gaps coincide (g_AB = g_BC) the cross terms between those two
/// operators are part of this dissipator.
pub fn dissipator_single(
    params: &SystemParams,
    table: &TransitionTable,
    rho: &DensityMatrix,
    mu: Qubit,
) -> Result<Matrix8> {
    let t_bath = params.temperature(mu);
    let mut out = Matrix8::zeros();
    let r = rho.elements();
    for tr in table.for_qubit(mu) {
        let (sd, swapped) = spectral_density_signed(params.kappa, tr.frequency, t_bath)?;
        let (i, j) = jump_indices(tr);
        let (upper, lower) = if swapped { (j, i) } else { (i, j) };
        add_jump(&mut out, r, sd.j_minus, upper, lower);
        add_jump(&mut out, r, sd.j_plus, lower, upper);
    }
    if mu == Qubit::B && b_pair_degenerate(params) {
        add_cross_pair(&mut out, r, params, table, t_bath, (2, 4), (5, 7))?;
    }
    Ok(out)
}

/// True iff the 2-4 and 5-7 gaps of qubit B coincide (g_AB = g_BC).
fn b_pair_degenerate(params: &SystemParams) -> bool {
    let tol = crate::params::EPS_DEG * params.g_ab.abs().max(params.g_bc.abs()).max(1.0);
    (params.g_ab - params.g_bc).abs() <= tol
}

/// Adds the full cross-dissipation block between two degenerate
/// transitions `(i1, j1)` and `(i2, j2)` at rate `sqrt(J_1 J_2)`:
/// emission and absorption, both operator orders.
fn add_cross_pair(
    out: &mut Matrix8,
    r: &Matrix8,
    params: &SystemParams,
    table: &TransitionTable,
    t_bath: f64,
    (i1, j1): (usize, usize),
    (i2, j2): (usize, usize),
) -> Result<()> {
    let t1 = table.get(i1, j1).expect("transition present");
    let t2 = table.get(i2, j2).expect("transition present");
    let (sd1, swapped) = spectral_density_signed(params.kappa, t1.frequency, t_bath)?;
    let (sd2, swapped2) = spectral_density_signed(params.kappa, t2.frequency, t_bath)?;
    debug_assert_eq!(swapped, swapped2, "degenerate pair must share sign");
    let j_minus = (sd1.j_minus * sd2.j_minus).sqrt();
    let j_plus = (sd1.j_plus * sd2.j_plus).sqrt();

    let (a, c) = ((i1 - 1, j1 - 1), (i2 - 1, j2 - 1));
    let (a, c) = if swapped {
        ((a.1, a.0), (c.1, c.0))
    } else {
        (a, c)
    };
    let a_dag = (a.1, a.0);
    let c_dag = (c.1, c.0);

    add_cross_term(out, r, j_minus, a, c);
    add_cross_term(out, r, j_minus, c, a);
    add_cross_term(out, r, j_plus, a_dag, c_dag);
    add_cross_term(out, r, j_plus, c_dag, a_dag);
    Ok(())
}

/// The degenerate transition pairs that share a gap under the crossing
/// condition: (A-transition level pair, C-transition level pair).
const CROSSING_PAIRS: [((usize, usize), (usize, usize)); 4] = [
    ((1, 5), (1, 2)),
    ((2, 6), (5, 6)),
    ((3, 7), (3, 4)),
    ((4, 8), (7, 8)),
];

/// The crossing dissipator of the common left reservoir, coupling the
/// degenerate A- and C-transitions with rate `sqrt(J_A J_C)`.
pub fn dissipator_crossing(
    params: &SystemParams,
    table: &TransitionTable,
    rho: &DensityMatrix,
) -> Result<Matrix8> {
    if !params.common_active()? {
        return Err(Error::CommonModeInactive);
    }
    let mut out = Matrix8::zeros();
    let r = rho.elements();
    for (pa, pc) in CROSSING_PAIRS {
        add_cross_pair(&mut out, r, params, table, params.t_left, pa, pc)?;
    }
    Ok(out)
}

/// Full generator `-i[H, rho] + sum_mu L_mu[rho] (+ L_AC[rho])`.
pub fn generator(params: &SystemParams, rho: &DensityMatrix) -> Result<GeneratorAction> {
    let table = transition_table(params);
    generator_with_table(params, &table, rho)
}

/// Same as [`generator`] but reuses a precomputed transition table.
pub fn generator_with_table(
    params: &SystemParams,
    table: &TransitionTable,
    rho: &DensityMatrix,
) -> Result<GeneratorAction> {
    let eig = eigenvalues(params);
    let r = rho.elements();
    let mut commutator = Matrix8::zeros();
    for a in 0..8 {
        for b in 0..8 {
            let gap = eig.lambdas[a] - eig.lambdas[b];
            commutator[(a, b)] = C64::new(0.0, -gap) * r[(a, b)];
        }
    }
    let qubit_a = dissipator_single(params, table, rho, Qubit::A)?;
    let qubit_b = dissipator_single(params, table, rho, Qubit::B)?;
    let qubit_c = dissipator_single(params, table, rho, Qubit::C)?;
    let crossing = if params.common_active()? {
        Some(dissipator_crossing(params, table, rho)?)
    } else {
        None
    };
    let mut total = commutator + qubit_a + qubit_b + qubit_c;
    if let Some(x) = &crossing {
        total += x;
    }
    Ok(GeneratorAction {
        commutator,
        qubit_a,
        qubit_b,
        qubit_c,
        crossing,
        total,
    })
}

/// Max-norm of the generator output; the steady-state residual.
pub fn residual(params: &SystemParams, rho: &DensityMatrix) -> Result<f64> {
    let act = generator(params, rho)?;
    Ok(max_norm(&act.total))
}

pub(crate) fn max_norm(m: &Matrix8) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Default fixed step for the integrator.
pub fn default_step(params: &SystemParams) -> f64 {
    let w_max = params
        .omega_a
        .max(params.omega_b)
        .max(params.omega_c)
        .max(1.0);
    (0.01 / w_max).min(0.1 / params.kappa)
}

#[derive(Debug, Clone)]
pub struct EvolveOutcome {
    pub rho: DensityMatrix,
    /// Most negative eigenvalue encountered in any accepted step (0 if the
    /// trajectory stayed positive).
    pub max_positivity_violation: f64,
    pub steps: usize,
    /// Residual of the returned state; only computed when convergence was
    /// requested.
    pub residual: Option<f64>,
}

struct Integrator<'a> {
    params: &'a SystemParams,
    table: TransitionTable,
}

impl<'a> Integrator<'a> {
    fn new(params: &'a SystemParams) -> Self {
        Self {
            params,
            table: transition_table(params),
        }
    }

    fn derivative(&self, rho: &Matrix8) -> Result<Matrix8> {
        // Same maths as `generator_with_table`, on a raw matrix.
        let wrapped = DensityMatrix::from_valid(*rho);
        Ok(generator_with_table(self.params, &self.table, &wrapped)?.total)
    }

    fn rk4_step(&self, rho: &Matrix8, dt: f64) -> Result<Matrix8> {
        let h = C64::new(dt, 0.0);
        let half = C64::new(0.5, 0.0);
        let k1 = self.derivative(rho)?;
        let k2 = self.derivative(&(rho + k1 * (h * half)))?;
        let k3 = self.derivative(&(rho + k2 * (h * half)))?;
        let k4 = self.derivative(&(rho + k3 * h))?;
        let sixth = C64::new(dt / 6.0, 0.0);
        let two = C64::new(2.0, 0.0);
        Ok(rho + (k1 + k2 * two + k3 * two + k4) * sixth)
    }
}

/// Classical fixed-step RK4 integration of the master equation up to
/// `t_final`. Trace drift above 1e-13 is renormalized each step; a drift
/// beyond 1e-6 aborts as a step-instability error.
pub fn evolve(
    params: &SystemParams,
    rho0: &DensityMatrix,
    t_final: f64,
    dt: f64,
) -> Result<EvolveOutcome> {
    evolve_inner(params, rho0, t_final, dt, None)
}

/// Integrates until the generator residual drops below `tol` (checked
/// every few hundred steps) or `t_max` is reached, whichever comes first.
pub fn evolve_to_steady(
    params: &SystemParams,
    rho0: &DensityMatrix,
    t_max: f64,
    dt: f64,
    tol: f64,
) -> Result<EvolveOutcome> {
    evolve_inner(params, rho0, t_max, dt, Some(tol))
}

fn evolve_inner(
    params: &SystemParams,
    rho0: &DensityMatrix,
    t_final: f64,
    dt: f64,
    tol: Option<f64>,
) -> Result<EvolveOutcome> {
    if dt <= 0.0 {
        return Err(Error::InvalidParams("dt must be positive".into()));
    }
    if t_final < 0.0 {
        return Err(Error::InvalidParams("t_final must be non-negative".into()));
    }
    let integ = Integrator::new(params);
    let mut rho = *rho0.elements();
    let steps_total = (t_final / dt).ceil() as usize;
    let mut worst_eig = 0.0_f64;
    let check_every = 256;
    let mut steps = 0usize;
    let mut res = None;

    while steps < steps_total {
        rho = integ.rk4_step(&rho, dt)?;
        steps += 1;

        let tr = rho.trace();
        let drift = (tr.re - 1.0).abs() + tr.im.abs();
        if drift > 1e-6 {
            return Err(Error::StepInstability(drift));
        }
        if drift > 1e-13 {
            rho /= tr;
        }

        if steps % check_every == 0 {
            worst_eig = worst_eig.min(min_eigenvalue(&rho));
            if let Some(tol) = tol {
                let r = max_norm(&integ.derivative(&rho)?);
                if r <= tol {
                    res = Some(r);
                    break;
                }
            }
        }
    }
    if res.is_none() && tol.is_some() {
        res = Some(max_norm(&integ.derivative(&rho)?));
    }

    // Symmetrize accumulated floating-point skew before handing back.
    let herm = hermiticity_defect(&rho);
    if herm > 1e-9 {
        return Err(Error::StepInstability(herm));
    }
    let rho = (rho + rho.adjoint()) * C64::new(0.5, 0.0);
    Ok(EvolveOutcome {
        rho: DensityMatrix::from_valid(rho),
        max_positivity_violation: worst_eig.min(0.0),
        steps,
        residual: res,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::tilde_population;
    use crate::params::DissipationMode;
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
    fn gibbs_state_is_stationary_at_equal_temperatures() {
        let p = SystemParams {
            t_left: 10.0,
            t_right: 10.0,
            ..ihr_params()
        };
        let rho = DensityMatrix::gibbs(&eigenvalues(&p), 10.0);
        let act = generator(&p, &rho).unwrap();
        assert!(max_norm(&act.total) < 1e-15);
    }

    #[test]
    fn ground_state_dark_at_zero_temperature() {
        let p = SystemParams {
            t_left: 0.0,
            t_right: 0.0,
            ..ihr_params()
        };
        let table = transition_table(&p);
        let rho = DensityMatrix::basis_state(8);
        for mu in Qubit::ALL {
            let d = dissipator_single(&p, &table, &rho, mu).unwrap();
            assert!(max_norm(&d) < 1e-18);
        }
    }

    #[test]
    fn top_level_decays_into_expected_levels() {
        // |1><1| can only emit through the three transitions leaving
        // level 1: to |5> (A), |3> (B), and |2> (C).
        let p = ihr_params();
        let table = transition_table(&p);
        let rho = DensityMatrix::basis_state(1);
        let mut gains = [0.0_f64; 8];
        for mu in Qubit::ALL {
            let d = dissipator_single(&p, &table, &rho, mu).unwrap();
            for i in 0..8 {
                if i != 0 {
                    gains[i] += d[(i, i)].re;
                }
            }
        }
        for (i, gain) in gains.iter().enumerate() {
            let expect_flow = i == 4 || i == 2 || i == 1;
            assert_eq!(*gain > 1e-12, expect_flow, "level {}", i + 1);
        }
    }

    #[test]
    fn crossing_dissipator_requires_common_mode() {
        let p = SystemParams {
            mode: DissipationMode::ForceIndependent,
            ..crossing_params()
        };
        let table = transition_table(&p);
        let rho = DensityMatrix::maximally_mixed();
        assert!(dissipator_crossing(&p, &table, &rho).is_err());
    }

    #[test]
    fn identical_qubits_give_crossing_rate_equal_to_single() {
        // J_AC = sqrt(J_A J_C) = J_A when the paired gaps coincide, which
        // they do under the crossing condition by construction.
        let p = crossing_params();
        let table = transition_table(&p);
        for ((ia, ja), (ic, jc)) in CROSSING_PAIRS {
            let fa = table.get(ia, ja).unwrap().frequency;
            let fc = table.get(ic, jc).unwrap().frequency;
            assert_abs_diff_eq!(fa, fc, epsilon = 1e-12);
        }
    }

    #[test]
    fn diagonal_state_commutes_with_hamiltonian() {
        let p = ihr_params();
        let rho = DensityMatrix::maximally_mixed();
        let act = generator(&p, &rho).unwrap();
        assert!(max_norm(&act.commutator) < 1e-18);
    }

    #[test]
    fn generator_channels_are_traceless_and_hermitian() {
        let p = crossing_params();
        // A state with coherences everywhere: equal superposition.
        let mut m = Matrix8::zeros();
        for i in 0..8 {
            for j in 0..8 {
                m[(i, j)] = C64::new(0.125 / (1.0 + (i as f64 - j as f64).abs()), 0.0);
            }
        }
        let rho = DensityMatrix::from_valid(m);
        let act = generator(&p, &rho).unwrap();
        for ch in [&act.qubit_a, &act.qubit_b, &act.qubit_c, &act.commutator] {
            assert!(ch.trace().norm() < 1e-14);
            assert!(hermiticity_defect(ch) < 1e-13);
        }
        let x = act.crossing.as_ref().unwrap();
        assert!(x.trace().norm() < 1e-14);
        assert!(hermiticity_defect(x) < 1e-13);
        assert!(act.total.trace().norm() < 1e-14);
    }

    #[test]
    fn evolve_zero_time_is_identity() {
        let p = crossing_params();
        let rho = DensityMatrix::basis_state(3);
        let out = evolve(&p, &rho, 0.0, 0.01).unwrap();
        assert_eq!(out.steps, 0);
        assert!(out.rho.max_distance(&rho) == 0.0);
    }

    #[test]
    fn evolution_preserves_trace_and_hermiticity() {
        let p = crossing_params();
        let rho = DensityMatrix::tilde_state(5);
        let out = evolve(&p, &rho, 50.0, 0.01).unwrap();
        assert_abs_diff_eq!(out.rho.trace().re, 1.0, epsilon = 1e-9);
        assert!(hermiticity_defect(out.rho.elements()) < 1e-9);
    }

    #[test]
    fn population_sector_stays_decoupled() {
        // Start in the populations + {25,47} sector; the complementary
        // coherences must stay numerically silent.
        let p = crossing_params();
        let mut m = Matrix8::zeros();
        for (i, pop) in [0.2, 0.15, 0.1, 0.05, 0.15, 0.1, 0.05, 0.2]
            .iter()
            .enumerate()
        {
            m[(i, i)] = C64::new(*pop, 0.0);
        }
        m[(1, 4)] = C64::new(0.05, 0.0);
        m[(4, 1)] = C64::new(0.05, 0.0);
        m[(3, 6)] = C64::new(0.02, 0.0);
        m[(6, 3)] = C64::new(0.02, 0.0);
        let rho = DensityMatrix::from_valid(m);
        let out = evolve(&p, &rho, 200.0, 0.01).unwrap();
        let r = out.rho.elements();
        for i in 0..8 {
            for j in 0..8 {
                let in_sector = i == j
                    || (i == 1 && j == 4)
                    || (i == 4 && j == 1)
                    || (i == 3 && j == 6)
                    || (i == 6 && j == 3);
                if !in_sector {
                    assert!(
                        r[(i, j)].norm() < 1e-12,
                        "leak at ({i},{j}): {:?}",
                        r[(i, j)]
                    );
                }
            }
        }
    }

    #[test]
    fn tilde_one_is_stationary_under_crossing() {
        // |~1><~1| spans the heat-resisting subspace together with |~2>;
        // the long-time state stays inside it.
        let p = crossing_params();
        let rho = DensityMatrix::tilde_state(1);
        let out = evolve_to_steady(&p, &rho, 5e4, 0.02, 1e-11).unwrap();
        let inside = tilde_population(&out.rho, 1) + tilde_population(&out.rho, 2);
        assert_abs_diff_eq!(inside, 1.0, epsilon = 1e-8);
    }
}
