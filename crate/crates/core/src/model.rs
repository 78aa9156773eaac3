//! Closed-form eigensystem of the triangle Hamiltonian, the twelve
//! transition operators with signed eigenfrequencies, and the flat-spectrum
//! bath rates.
//!
//! The diagonal Hamiltonian is expressed in the computational basis
//! `|1> = |+++>` through `|8> = |--->` (ordering A, B, C).

use crate::error::Error;
use crate::params::{Qubit, SystemParams};
use crate::Result;

/// The eight eigenenergies, assembled from the closed form rather than a
/// numerical diagonalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSystem {
    /// `lambdas[i]` is the energy of level `|i+1>`.
    pub lambdas: [f64; 8],
}

impl EigenSystem {
    /// Energy of level `i` (1-based).
    pub fn lambda(&self, i: usize) -> f64 {
        self.lambdas[i - 1]
    }
}

/// Closed-form eigenvalues of the system Hamiltonian.
pub fn eigenvalues(params: &SystemParams) -> EigenSystem {
    let (wa, wb, wc) = (params.omega_a, params.omega_b, params.omega_c);
    let (gab, gbc, gac) = (params.g_ab, params.g_bc, params.g_ac);
    let lambdas = [
        0.5 * (wa + wb + wc + gab + gbc + gac),
        0.5 * (wa + wb - wc + gab - gbc - gac),
        0.5 * (wa - wb + wc - gab - gbc + gac),
        0.5 * (wa - wb - wc - gab + gbc - gac),
        0.5 * (-wa + wb + wc - gab + gbc - gac),
        0.5 * (-wa + wb - wc - gab - gbc + gac),
        0.5 * (-wa - wb + wc + gab - gbc - gac),
        0.5 * (-wa - wb - wc + gab + gbc + gac),
    ];
    EigenSystem { lambdas }
}

/// One eigen-operator `V_ij = |j><i|` of qubit `mu`, with the signed
/// eigenfrequency `omega_ij = lambda_i - lambda_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub qubit: Qubit,
    /// Source level `i` (1-based).
    pub source: usize,
    /// Target level `j` (1-based).
    pub target: usize,
    /// Signed eigenfrequency `lambda_i - lambda_j`; positivity is not
    /// assumed.
    pub frequency: f64,
}

/// The twelve transitions of the secular master equation, four per qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionTable {
    pub entries: [Transition; 12],
}

/// Level pairs of the twelve eigen-operators: `(qubit, i, j)`.
pub const TRANSITION_PAIRS: [(Qubit, usize, usize); 12] = [
    (Qubit::A, 1, 5),
    (Qubit::A, 2, 6),
    (Qubit::A, 3, 7),
    (Qubit::A, 4, 8),
    (Qubit::B, 1, 3),
    (Qubit::B, 2, 4),
    (Qubit::B, 5, 7),
    (Qubit::B, 6, 8),
    (Qubit::C, 1, 2),
    (Qubit::C, 3, 4),
    (Qubit::C, 5, 6),
    (Qubit::C, 7, 8),
];

/// Builds the twelve eigen-operators with their signed eigenfrequencies.
pub fn transition_table(params: &SystemParams) -> TransitionTable {
    let eig = eigenvalues(params);
    let entries = TRANSITION_PAIRS.map(|(qubit, i, j)| Transition {
        qubit,
        source: i,
        target: j,
        frequency: eig.lambda(i) - eig.lambda(j),
    });
    TransitionTable { entries }
}

impl TransitionTable {
    pub fn for_qubit(&self, mu: Qubit) -> impl Iterator<Item = &Transition> {
        self.entries.iter().filter(move |t| t.qubit == mu)
    }

    /// Lookup by level pair, any qubit.
    pub fn get(&self, i: usize, j: usize) -> Option<&Transition> {
        self.entries.iter().find(|t| t.source == i && t.target == j)
    }

    /// True if any eigenfrequency is non-positive (strong-coupling regime
    /// where the absorption/emission roles of an operator pair are swapped).
    pub fn has_nonpositive_frequency(&self) -> bool {
        self.entries.iter().any(|t| t.frequency <= 0.0)
    }
}

/// Bath rates at one transition frequency: `j_plus = J(+omega)` drives
/// absorption, `j_minus = J(-omega)` drives emission.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralDensity {
    pub j_plus: f64,
    pub j_minus: f64,
}

/// Mean thermal occupation `1/(exp(omega/T) - 1)`; exactly 0 at `T = 0`.
pub fn mean_occupation(omega: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    // exp_m1 keeps precision at small omega/T and underflows cleanly to
    // +inf (giving n = 0) at large omega/T.
    1.0 / (omega / t).exp_m1()
}

/// Flat-spectrum rates `J(+omega) = kappa n(omega)` and
/// `J(-omega) = kappa (n(omega) + 1)` for `omega > 0`.
pub fn spectral_density(kappa: f64, omega: f64, t: f64) -> Result<SpectralDensity> {
    if !(omega > 0.0) {
        return Err(Error::NonPositiveFrequency(omega));
    }
    let n = mean_occupation(omega, t);
    Ok(SpectralDensity {
        j_plus: kappa * n,
        j_minus: kappa * (n + 1.0),
    })
}

/// Rates for a signed eigenfrequency. For `omega < 0` the magnitude is used
/// and `swapped` is set; the caller applies the rates to the adjoint
/// operator pair so the Lindblad form stays valid.
pub fn spectral_density_signed(kappa: f64, omega: f64, t: f64) -> Result<(SpectralDensity, bool)> {
    if omega == 0.0 {
        return Err(Error::NonPositiveFrequency(omega));
    }
    let sd = spectral_density(kappa, omega.abs(), t)?;
    Ok((sd, omega < 0.0))
}
