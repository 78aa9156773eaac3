//! Steady states along three independent routes: null space of the
//! population coefficient matrix, closed-form expressions, and (in
//! `liouvillian`) long-time integration.
//!
//! Independent-reservoir case: the eight populations close on themselves
//! and the unique steady state is the null vector of an 8x8 rate matrix
//! assembled from Kronecker products of 2x2 blocks.
//!
//! Common-reservoir case: the closed sector is
//! `[rho_11, rho_22, rho_33, rho_44, rho_66, rho_88, rho_25, rho_47]`
//! (with `rho_55 = rho_22`, `rho_77 = rho_44` throughout), the rate matrix
//! has a two-dimensional null space, and the physical steady state is a
//! mixture `(1-p) rho_1 + p rho_2` fixed by the initial weight outside the
//! heat-resisting subspace.

use nalgebra::{Matrix2, SMatrix};

use crate::density::DensityMatrix;
use crate::error::Error;
use crate::model::{eigenvalues, spectral_density_signed, transition_table};
use crate::params::{Qubit, SystemParams};
use crate::{Matrix8, RMatrix8, Result, C64};

/// `(J(-omega), J(+omega))` for a signed gap, by analytic continuation:
/// for `omega < 0` the two roles exchange.
pub(crate) fn rate_pair(kappa: f64, omega: f64, t: f64) -> Result<(f64, f64)> {
    let (sd, swapped) = spectral_density_signed(kappa, omega, t)?;
    Ok(if swapped {
        (sd.j_plus, sd.j_minus)
    } else {
        (sd.j_minus, sd.j_plus)
    })
}

/// The 2x2 population block `2 [[-J(-w), J(+w)], [J(-w), -J(+w)]]` acting
/// on `(p_upper, p_lower)`.
fn rate_block(kappa: f64, omega: f64, t: f64) -> Result<Matrix2<f64>> {
    let (j_down, j_up) = rate_pair(kappa, omega, t)?;
    Ok(Matrix2::new(
        -2.0 * j_down,
        2.0 * j_up,
        2.0 * j_down,
        -2.0 * j_up,
    ))
}

const PROJ_UP: Matrix2<f64> = Matrix2::new(1.0, 0.0, 0.0, 0.0);
const PROJ_DOWN: Matrix2<f64> = Matrix2::new(0.0, 0.0, 0.0, 1.0);

/// Rate matrix of the population dynamics with independent reservoirs,
/// assembled as `sum_transitions kron(slot_A, slot_B, slot_C)` where the
/// active qubit contributes its 2x2 block and the spectators contribute
/// their state projectors.
pub fn coefficient_matrix_ihr(params: &SystemParams) -> Result<RMatrix8> {
    let table = transition_table(params);
    let mut m = RMatrix8::zeros();
    for t in &table.entries {
        let block = rate_block(params.kappa, t.frequency, params.temperature(t.qubit))?;
        let bits = t.source - 1; // spectator bits shared by source and target
        let pick = |bit: usize| if bit == 0 { PROJ_UP } else { PROJ_DOWN };
        let (sa, sb, sc) = match t.qubit {
            Qubit::A => (block, pick((bits >> 1) & 1), pick(bits & 1)),
            Qubit::B => (pick((bits >> 2) & 1), block, pick(bits & 1)),
            Qubit::C => (pick((bits >> 2) & 1), pick((bits >> 1) & 1), block),
        };
        let k: SMatrix<f64, 8, 8> = sa.kronecker(&sb).kronecker(&sc);
        m += k;
    }
    Ok(m)
}

fn smallest_null_vector(m: &RMatrix8) -> Result<[f64; 8]> {
    let svd = m.svd(true, true);
    let sv = svd.singular_values;
    let scale = sv[0].max(1e-300);
    if sv[6] < 1e-10 * scale {
        return Err(Error::DegenerateNullSpace(format!(
            "second singular value {:.3e} below threshold",
            sv[6]
        )));
    }
    let v_t = svd.v_t.expect("requested");
    let mut v = [0.0_f64; 8];
    for i in 0..8 {
        v[i] = v_t[(7, i)];
    }
    Ok(v)
}

/// Unique steady state with independent reservoirs, from the null space of
/// [`coefficient_matrix_ihr`].
pub fn steady_ihr(params: &SystemParams) -> Result<DensityMatrix> {
    params.validate()?;
    let m = coefficient_matrix_ihr(params)?;
    let mut v = smallest_null_vector(&m)?;
    let sum: f64 = v.iter().sum();
    if sum.abs() < 1e-14 {
        return Err(Error::DegenerateNullSpace(
            "null vector is traceless".into(),
        ));
    }
    for x in &mut v {
        *x /= sum;
    }
    for (i, x) in v.iter().enumerate() {
        if *x < -1e-10 {
            return Err(Error::DegenerateNullSpace(format!(
                "negative steady population {x:.3e} at level {}",
                i + 1
            )));
        }
    }
    let v = v.map(|x| x.max(0.0));
    Ok(DensityMatrix::from_populations(&v))
}

/// Left gaps of the common-reservoir sector, in the shorthand order
/// `(w12, w26, w34, w48)`.
pub(crate) fn left_gaps(params: &SystemParams) -> [f64; 4] {
    let e = eigenvalues(params);
    [
        e.lambda(1) - e.lambda(2),
        e.lambda(2) - e.lambda(6),
        e.lambda(3) - e.lambda(4),
        e.lambda(4) - e.lambda(8),
    ]
}

/// Right gaps `(w13, w24, w68)`.
pub(crate) fn right_gaps(params: &SystemParams) -> [f64; 3] {
    let e = eigenvalues(params);
    [
        e.lambda(1) - e.lambda(3),
        e.lambda(2) - e.lambda(4),
        e.lambda(6) - e.lambda(8),
    ]
}

/// Rate matrix of the closed common-reservoir sector
/// `[rho_11, rho_22, rho_33, rho_44, rho_66, rho_88, rho_25, rho_47]`.
/// Rank 6; its two null directions span the steady-state family.
pub fn coefficient_matrix_chr(params: &SystemParams) -> Result<RMatrix8> {
    if !params.common_active()? {
        return Err(Error::CommonModeInactive);
    }
    let k = params.kappa;
    let tl = params.t_left;
    let [w12, w26, w34, w48] = left_gaps(params);
    let (l12m, l12p) = rate_pair(k, w12, tl)?;
    let (l26m, l26p) = rate_pair(k, w26, tl)?;
    let (l34m, l34p) = rate_pair(k, w34, tl)?;
    let (l48m, l48p) = rate_pair(k, w48, tl)?;

    #[rustfmt::skip]
    let ml = RMatrix8::from_row_slice(&[
        -4.*l12m, 4.*l12p,            0.,       0.,                  0.,      0.,       4.*l12p,            0.,
        2.*l12m,  -2.*l12p - 2.*l26m, 0.,       0.,                  2.*l26p, 0.,       -2.*l12p - 2.*l26m, 0.,
        0.,       0.,                 -4.*l34m, 4.*l34p,             0.,      0.,       0.,                 4.*l34p,
        0.,       0.,                 2.*l34m,  -2.*l34p - 2.*l48m,  0.,      2.*l48p,  0.,                 -2.*l34p - 2.*l48m,
        0.,       4.*l26m,            0.,       0.,                  -4.*l26p, 0.,      4.*l26m,            0.,
        0.,       0.,                 0.,       4.*l48m,             0.,      -4.*l48p, 0.,                 4.*l48m,
        2.*l12m,  -2.*l12p - 2.*l26m, 0.,       0.,                  2.*l26p, 0.,       -2.*l12p - 2.*l26m, 0.,
        0.,       0.,                 2.*l34m,  -2.*l34p - 2.*l48m,  0.,      2.*l48p,  0.,                 -2.*l34p - 2.*l48m,
    ]);

    let [w13, w24, w68] = right_gaps(params);
    let tr = params.t_right;
    let mut mr = RMatrix8::zeros();
    // Right-reservoir pairs inside the sector: (upper, lower) positions.
    for (wi, (u, l)) in [
        (w13, (0usize, 2usize)),
        (w24, (1, 3)),
        (w24, (6, 7)),
        (w68, (4, 5)),
    ] {
        let b = rate_block(k, wi, tr)?;
        mr[(u, u)] += b[(0, 0)];
        mr[(u, l)] += b[(0, 1)];
        mr[(l, u)] += b[(1, 0)];
        mr[(l, l)] += b[(1, 1)];
    }
    Ok(ml + mr)
}

/// Lab-basis state from a sector vector, using `rho_55 = rho_22` and
/// `rho_77 = rho_44`.
fn state_from_sector(v: &[f64; 8]) -> DensityMatrix {
    let mut m = Matrix8::zeros();
    let diag = [v[0], v[1], v[2], v[3], v[1], v[4], v[3], v[5]];
    for (i, d) in diag.iter().enumerate() {
        m[(i, i)] = C64::new(*d, 0.0);
    }
    m[(1, 4)] = C64::new(v[6], 0.0);
    m[(4, 1)] = C64::new(v[6], 0.0);
    m[(3, 6)] = C64::new(v[7], 0.0);
    m[(6, 3)] = C64::new(v[7], 0.0);
    DensityMatrix::from_valid(m)
}

/// Weighted trace of a sector vector (`rho_22` and `rho_44` count twice).
fn sector_trace(v: &[f64; 8]) -> f64 {
    v[0] + 2.0 * v[1] + v[2] + 2.0 * v[3] + v[4] + v[5]
}

/// The two physical null states of [`coefficient_matrix_chr`]: the
/// heat-resisting state (`rho_25 = -rho_22`) and the heat-conducting one
/// (`rho_25 = +rho_22`).
#[derive(Debug, Clone)]
pub struct ChrComponents {
    pub rho1: DensityMatrix,
    pub rho2: DensityMatrix,
}

pub fn chr_null_states(params: &SystemParams) -> Result<ChrComponents> {
    params.validate()?;
    let m = coefficient_matrix_chr(params)?;
    let svd = m.svd(true, true);
    let sv = svd.singular_values;
    let scale = sv[0].max(1e-300);
    let tol = 1e-10 * scale;
    if sv[6] > tol {
        return Err(Error::DegenerateNullSpace(format!(
            "expected 2-dimensional null space, sigma_7 = {:.3e}",
            sv[6]
        )));
    }
    if sv[5] < tol {
        return Err(Error::NullSpaceTooLarge(3));
    }
    let v_t = svd.v_t.expect("requested");
    let mut b1 = [0.0_f64; 8];
    let mut b2 = [0.0_f64; 8];
    for i in 0..8 {
        b1[i] = v_t[(6, i)];
        b2[i] = v_t[(7, i)];
    }

    // The resisting component satisfies rho_22 + rho_25 = 0 and
    // rho_44 + rho_47 = 0; the conducting one rho_22 - rho_25 = 0 and
    // rho_44 - rho_47 = 0. Each 2x2 constraint matrix is rank-deficient on
    // the null plane, so its kernel picks the right combination.
    let pick = |f: &dyn Fn(&[f64; 8]) -> f64| -> [f64; 8] {
        let c = Matrix2::new(f(&b1), f(&b2), 0.0, 0.0);
        // One functional suffices when the second is linearly dependent on
        // the plane; use both for robustness.
        let g1 = f(&b1);
        let g2 = f(&b2);
        let _ = c;
        let (c1, c2) = if g1.abs() > g2.abs() {
            (-g2, g1)
        } else if g2.abs() > 0.0 {
            (g2, -g1)
        } else {
            (1.0, 0.0)
        };
        let mut out = [0.0_f64; 8];
        for i in 0..8 {
            out[i] = c1 * b1[i] + c2 * b2[i];
        }
        out
    };

    let sum_22 = |v: &[f64; 8]| v[1] + v[6];
    let diff_22 = |v: &[f64; 8]| v[1] - v[6];
    let mut v1 = pick(&sum_22); // kernel of rho_22 + rho_25 => resisting
    let mut v2 = pick(&diff_22); // kernel of rho_22 - rho_25 => conducting

    for v in [&mut v1, &mut v2] {
        let n = sector_trace(v);
        if n.abs() < 1e-14 {
            return Err(Error::DegenerateNullSpace(
                "null direction has zero weighted trace".into(),
            ));
        }
        for x in v.iter_mut() {
            *x /= n;
        }
    }
    // Cross-check the second constraint pair held automatically.
    if (v1[3] + v1[7]).abs() > 1e-8 || (v2[3] - v2[7]).abs() > 1e-8 {
        return Err(Error::DegenerateNullSpace(
            "constraint separation failed".into(),
        ));
    }
    Ok(ChrComponents {
        rho1: state_from_sector(&v1),
        rho2: state_from_sector(&v2),
    })
}

/// Tilde-basis populations `(rho~_11, rho~_22)` of the heat-resisting
/// steady state, in closed form.
pub fn rho1_tilde_weights(params: &SystemParams) -> Result<[f64; 2]> {
    if !params.common_active()? {
        return Err(Error::CommonModeInactive);
    }
    let [_, w24, _] = right_gaps(params);
    let (r24m, r24p) = rate_pair(params.kappa, w24, params.t_right)?;
    let denom = r24p + r24m;
    if denom <= 0.0 {
        return Err(Error::DegenerateDenominator);
    }
    Ok([r24p / denom, r24m / denom])
}

/// Heat-resisting steady state `rho_1` in the lab basis, closed form.
pub fn rho1_closed_form(params: &SystemParams) -> Result<DensityMatrix> {
    let [t1, t2] = rho1_tilde_weights(params)?;
    let v = [0.0, t1 / 2.0, 0.0, t2 / 2.0, 0.0, 0.0, -t1 / 2.0, -t2 / 2.0];
    Ok(state_from_sector(&v))
}

/// Unnormalized tilde populations `(rho~_3 .. rho~_8)` of the conducting
/// steady state: spanning-tree expansions over the six-node ladder of
/// tilde levels.
pub fn rho2_tilde_weights_raw(params: &SystemParams) -> Result<[f64; 6]> {
    if !params.common_active()? {
        return Err(Error::CommonModeInactive);
    }
    let k = params.kappa;
    let [w12, w26, w34, w48] = left_gaps(params);
    let [w13, w24, w68] = right_gaps(params);
    // Ladder shorthand: tilde transitions 3-5, 4-6, 5-7, 6-8 are driven by
    // the left reservoir at the gaps w12, w34, w26, w48; 3-4, 5-6, 7-8 by
    // the right reservoir at w13, w24, w68.
    let (l35m, l35p) = rate_pair(k, w12, params.t_left)?;
    let (l46m, l46p) = rate_pair(k, w34, params.t_left)?;
    let (l57m, l57p) = rate_pair(k, w26, params.t_left)?;
    let (l68m, l68p) = rate_pair(k, w48, params.t_left)?;
    let (r34m, r34p) = rate_pair(k, w13, params.t_right)?;
    let (r56m, r56p) = rate_pair(k, w24, params.t_right)?;
    let (r78m, r78p) = rate_pair(k, w68, params.t_right)?;

    let rho3 = 4. * l35p * l46p * l57p * l68p * r34p
        + 4. * l35p * l46m * l57p * l68p * r56p
        + 4. * l35p * l46m * l57p * l68m * r78p
        + 2. * l35p * l46p * l57p * r34p * r78p
        + 2. * l35p * l46m * l57p * r56p * r78p
        + 2. * l35p * l46p * l68p * r34p * r78m
        + 2. * l35p * l46m * l68p * r56p * r78m
        + 2. * l35p * l57p * l68p * r34p * r56p
        + 2. * l35p * l57p * l68m * r34p * r78p
        + 2. * l46p * l57p * l68p * r34p * r56m
        + 2. * l46p * l57m * l68p * r34p * r78m
        + l35p * l57p * r34p * r56p * r78p
        + l35p * l68p * r34p * r56p * r78m
        + l46p * l57p * r34p * r56m * r78p
        + l46p * l68p * r34p * r56m * r78m;

    let rho4 = 4. * l35p * l46p * l57p * l68p * r34m
        + 4. * l35m * l46p * l57p * l68p * r56m
        + 4. * l35m * l46p * l57m * l68p * r78m
        + 2. * l35p * l46p * l57p * r34m * r78p
        + 2. * l35m * l46p * l57p * r56m * r78p
        + 2. * l35p * l46p * l68p * r34m * r78m
        + 2. * l35m * l46p * l68p * r56m * r78m
        + 2. * l35p * l57p * l68p * r34m * r56p
        + 2. * l35p * l57p * l68m * r34m * r78p
        + 2. * l46p * l57p * l68p * r34m * r56m
        + 2. * l46p * l57m * l68p * r34m * r78m
        + l35p * l57p * r34m * r56p * r78p
        + l35p * l68p * r34m * r56p * r78m
        + l46p * l57p * r34m * r56m * r78p
        + l46p * l68p * r34m * r56m * r78m;

    let rho5 = 4. * l35m * l46p * l57p * l68p * r34p
        + 4. * l35m * l46m * l57p * l68p * r56p
        + 4. * l35m * l46m * l57p * l68m * r78p
        + 2. * l35m * l46p * l68p * r34p * r78m
        + 2. * l35m * l46m * l68p * r56p * r78m
        + 2. * l35m * l46p * l57p * r34p * r78p
        + 2. * l35m * l46m * l57p * r56p * r78p
        + 2. * l35m * l57p * l68p * r34p * r56p
        + 2. * l35m * l57p * l68m * r34p * r78p
        + 2. * l46m * l57p * l68p * r34m * r56p
        + 2. * l46m * l57p * l68m * r34m * r78p
        + l35m * l57p * r34p * r56p * r78p
        + l35m * l68p * r34p * r56p * r78m
        + l46m * l57p * r34m * r56p * r78p
        + l46m * l68p * r34m * r56p * r78m;

    let rho6 = 4. * l35p * l46m * l57p * l68p * r34m
        + 4. * l35m * l46m * l57p * l68p * r56m
        + 4. * l35m * l46m * l57m * l68p * r78m
        + 2. * l35p * l46m * l57p * r34m * r78p
        + 2. * l35m * l46m * l57p * r56m * r78p
        + 2. * l35p * l46m * l68p * r34m * r78m
        + 2. * l35m * l46m * l68p * r56m * r78m
        + 2. * l35m * l57p * l68p * r34p * r56m
        + 2. * l35m * l57m * l68p * r34p * r78m
        + 2. * l46m * l57p * l68p * r34m * r56m
        + 2. * l46m * l57m * l68p * r34m * r78m
        + l35m * l57p * r34p * r56m * r78p
        + l35m * l68p * r34p * r56m * r78m
        + l46m * l57p * r34m * r56m * r78p
        + l46m * l68p * r34m * r56m * r78m;

    let rho7 = 4. * l35m * l46p * l57m * l68p * r34p
        + 4. * l35m * l46m * l57m * l68p * r56p
        + 4. * l35m * l46m * l57m * l68m * r78p
        + 2. * l35m * l46p * l57m * r34p * r78p
        + 2. * l35m * l46m * l57m * r56p * r78p
        + 2. * l35p * l46m * l68m * r34m * r78p
        + 2. * l35m * l46m * l68m * r56m * r78p
        + 2. * l35m * l57m * l68p * r34p * r56p
        + 2. * l35m * l57m * l68m * r34p * r78p
        + 2. * l46m * l57m * l68p * r34m * r56p
        + 2. * l46m * l57m * l68m * r34m * r78p
        + l35m * l57m * r34p * r56p * r78p
        + l35m * l68m * r34p * r56m * r78p
        + l46m * l57m * r34m * r56p * r78p
        + l46m * l68m * r34m * r56m * r78p;

    let rho8 = 4. * l35p * l46m * l57p * l68m * r34m
        + 4. * l35m * l46m * l57p * l68m * r56m
        + 4. * l35m * l46m * l57m * l68m * r78m
        + 2. * l35m * l46p * l57m * r34p * r78m
        + 2. * l35m * l46m * l57m * r56p * r78m
        + 2. * l35p * l46m * l68m * r34m * r78m
        + 2. * l35m * l46m * l68m * r56m * r78m
        + 2. * l35m * l57p * l68m * r34p * r56m
        + 2. * l35m * l57m * l68m * r34p * r78m
        + 2. * l46m * l57p * l68m * r34m * r56m
        + 2. * l46m * l57m * l68m * r34m * r78m
        + l35m * l57m * r34p * r56p * r78m
        + l35m * l68m * r34p * r56m * r78m
        + l46m * l57m * r34m * r56p * r78m
        + l46m * l68m * r34m * r56m * r78m;

    Ok([rho3, rho4, rho5, rho6, rho7, rho8])
}

/// Normalized tilde populations `(rho~_33 .. rho~_88)` of the conducting
/// steady state.
pub fn rho2_tilde_weights(params: &SystemParams) -> Result<[f64; 6]> {
    let mut w = rho2_tilde_weights_raw(params)?;
    let n: f64 = w.iter().sum();
    if n <= 0.0 {
        return Err(Error::DegenerateDenominator);
    }
    for x in &mut w {
        *x /= n;
    }
    Ok(w)
}

/// Heat-conducting steady state `rho_2` in the lab basis, closed form.
pub fn rho2_closed_form(params: &SystemParams) -> Result<DensityMatrix> {
    let [t3, t4, t5, t6, t7, t8] = rho2_tilde_weights(params)?;
    let v = [t3, t5 / 2.0, t4, t6 / 2.0, t7, t8, t5 / 2.0, t6 / 2.0];
    Ok(state_from_sector(&v))
}

/// Weight of the initial state outside the heat-resisting subspace; the
/// mixing fraction `p` of the asymptotic state. Conserved exactly by the
/// common-reservoir dynamics.
pub fn extract_fraction(params: &SystemParams, rho0: &DensityMatrix) -> Result<f64> {
    if !params.common_active()? {
        return Err(Error::CommonModeInactive);
    }
    let inside =
        crate::density::tilde_population(rho0, 1) + crate::density::tilde_population(rho0, 2);
    Ok((1.0 - inside).clamp(0.0, 1.0))
}

/// The common-reservoir steady state reached from `rho0`, decomposed into
/// its resisting and conducting components.
#[derive(Debug, Clone)]
pub struct SteadyDecomposition {
    pub p: f64,
    pub rho1: DensityMatrix,
    pub rho2: DensityMatrix,
    pub rho: DensityMatrix,
}

pub fn steady_chr(params: &SystemParams, rho0: &DensityMatrix) -> Result<SteadyDecomposition> {
    let p = extract_fraction(params, rho0)?;
    steady_chr_with_fraction(params, p)
}

pub fn steady_chr_with_fraction(params: &SystemParams, p: f64) -> Result<SteadyDecomposition> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParams(format!(
            "mixing fraction {p} outside [0, 1]"
        )));
    }
    let rho1 = rho1_closed_form(params)?;
    let rho2 = rho2_closed_form(params)?;
    let rho = rho1.mix(&rho2, p);
    Ok(SteadyDecomposition { p, rho1, rho2, rho })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::tilde_population;
    use crate::liouvillian::{generator, max_norm};
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
    fn ihr_matrix_columns_sum_to_zero() {
        let m = coefficient_matrix_ihr(&ihr_params()).unwrap();
        for j in 0..8 {
            let s: f64 = (0..8).map(|i| m[(i, j)]).sum();
            assert_abs_diff_eq!(s, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn ihr_steady_annihilates_generator() {
        let p = ihr_params();
        let rho = steady_ihr(&p).unwrap();
        let act = generator(&p, &rho).unwrap();
        assert!(max_norm(&act.total) < 1e-16, "{}", max_norm(&act.total));
    }

    #[test]
    fn ihr_equal_temperatures_give_gibbs() {
        let p = SystemParams {
            t_left: 21.0,
            ..ihr_params()
        };
        let rho = steady_ihr(&p).unwrap();
        let gibbs = DensityMatrix::gibbs(&eigenvalues(&p), 21.0);
        assert!(rho.max_distance(&gibbs) < 1e-12);
    }

    #[test]
    fn chr_sector_conserves_weighted_trace() {
        let m = coefficient_matrix_chr(&crossing_params()).unwrap();
        // d/dt of the weighted trace must vanish for any sector vector:
        // w^T M = 0 with w = (1,2,1,2,1,1,0,0).
        let w = [1.0, 2.0, 1.0, 2.0, 1.0, 1.0, 0.0, 0.0];
        for j in 0..8 {
            let s: f64 = (0..8).map(|i| w[i] * m[(i, j)]).sum();
            assert_abs_diff_eq!(s, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn chr_null_states_annihilate_generator() {
        let p = crossing_params();
        let c = chr_null_states(&p).unwrap();
        for rho in [&c.rho1, &c.rho2] {
            let act = generator(&p, rho).unwrap();
            assert!(max_norm(&act.total) < 1e-15, "{}", max_norm(&act.total));
        }
    }

    #[test]
    fn rho1_closed_form_matches_null_space() {
        let p = crossing_params();
        let c = chr_null_states(&p).unwrap();
        let r1 = rho1_closed_form(&p).unwrap();
        assert!(c.rho1.max_distance(&r1) < 1e-10);
    }

    #[test]
    fn rho2_closed_form_matches_null_space() {
        let p = crossing_params();
        let c = chr_null_states(&p).unwrap();
        let r2 = rho2_closed_form(&p).unwrap();
        assert!(
            c.rho2.max_distance(&r2) < 1e-10,
            "distance {}",
            c.rho2.max_distance(&r2)
        );
    }

    #[test]
    fn rho2_closed_form_matches_null_space_asymmetric() {
        // Distinct gaps everywhere: exercises every term family.
        let p = SystemParams {
            omega_a: 2.3,
            omega_c: 2.3,
            omega_b: 4.1,
            g_ab: 0.15,
            g_bc: 0.15,
            g_ac: 0.07,
            t_left: 8.0,
            t_right: 30.0,
            ..crossing_params()
        };
        let c = chr_null_states(&p).unwrap();
        let r2 = rho2_closed_form(&p).unwrap();
        assert!(
            c.rho2.max_distance(&r2) < 1e-10,
            "distance {}",
            c.rho2.max_distance(&r2)
        );
        let r1 = rho1_closed_form(&p).unwrap();
        assert!(c.rho1.max_distance(&r1) < 1e-10);
    }

    #[test]
    fn tilde_one_two_subspace_is_resisting() {
        let p = crossing_params();
        let r1 = rho1_closed_form(&p).unwrap();
        let inside = tilde_population(&r1, 1) + tilde_population(&r1, 2);
        assert_abs_diff_eq!(inside, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn extract_fraction_basics() {
        let p = crossing_params();
        assert_abs_diff_eq!(
            extract_fraction(&p, &DensityMatrix::tilde_state(1)).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            extract_fraction(&p, &DensityMatrix::basis_state(8)).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            extract_fraction(&p, &DensityMatrix::maximally_mixed()).unwrap(),
            0.75,
            epsilon = 1e-12
        );
    }

    #[test]
    fn mixture_annihilates_generator() {
        let p = crossing_params();
        let d = steady_chr_with_fraction(&p, 0.37).unwrap();
        let act = generator(&p, &d.rho).unwrap();
        assert!(max_norm(&act.total) < 1e-15);
    }

    #[test]
    fn chr_requires_common_mode() {
        assert!(coefficient_matrix_chr(&ihr_params()).is_err());
        let forced = SystemParams {
            mode: DissipationMode::ForceIndependent,
            ..crossing_params()
        };
        assert!(coefficient_matrix_chr(&forced).is_err());
    }
}
