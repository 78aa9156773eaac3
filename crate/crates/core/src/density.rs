//! Density matrices on the 8-dimensional eigenbasis, plus the alternative
//! (tilde) basis that splits the degenerate sectors.

use nalgebra::SymmetricEigen;

use crate::error::Error;
use crate::model::EigenSystem;
use crate::{Matrix8, Result, Vector8, C64};

pub const HERMITICITY_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const POSITIVITY_TOL: f64 = -1e-10;

/// An 8x8 Hermitian, unit-trace, positive-semidefinite complex matrix in
/// the `|1>..|8>` eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    elements: Matrix8,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace, and positivity before wrapping.
    pub fn new(elements: Matrix8) -> Result<Self> {
        let herm = hermiticity_defect(&elements);
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "hermiticity defect {herm:.3e}"
            )));
        }
        let tr = elements.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "trace {tr} differs from 1"
            )));
        }
        let min_eig = min_eigenvalue(&elements);
        if min_eig < POSITIVITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self { elements })
    }

    /// Wraps without validation; for internal construction of states that
    /// are valid by construction.
    pub(crate) fn from_valid(elements: Matrix8) -> Self {
        Self { elements }
    }

    pub fn elements(&self) -> &Matrix8 {
        &self.elements
    }

    pub fn into_elements(self) -> Matrix8 {
        self.elements
    }

    /// Matrix element with 1-based level indices.
    pub fn elem(&self, i: usize, j: usize) -> C64 {
        self.elements[(i - 1, j - 1)]
    }

    /// Population of level `i` (1-based).
    pub fn population(&self, i: usize) -> f64 {
        self.elements[(i - 1, i - 1)].re
    }

    /// Pure state `|i><i|` in the computational eigenbasis (1-based).
    pub fn basis_state(i: usize) -> Self {
        let mut m = Matrix8::zeros();
        m[(i - 1, i - 1)] = C64::new(1.0, 0.0);
        Self { elements: m }
    }

    /// Pure state `|~i><~i|` in the tilde basis (1-based).
    pub fn tilde_state(i: usize) -> Self {
        let v = tilde_vector(i);
        Self {
            elements: v * v.adjoint(),
        }
    }

    pub fn maximally_mixed() -> Self {
        Self {
            elements: Matrix8::identity() * C64::new(0.125, 0.0),
        }
    }

    /// Gibbs state `exp(-H/T)/Z` of the diagonal Hamiltonian. At `T = 0`
    /// the population collapses onto the (possibly degenerate) ground
    /// levels.
    pub fn gibbs(eig: &EigenSystem, t: f64) -> Self {
        let mut pops = [0.0_f64; 8];
        if t <= 0.0 {
            let min = eig.lambdas.iter().cloned().fold(f64::INFINITY, f64::min);
            let mut count = 0usize;
            for (i, &l) in eig.lambdas.iter().enumerate() {
                if l - min <= 1e-12 {
                    pops[i] = 1.0;
                    count += 1;
                }
            }
            for p in &mut pops {
                *p /= count as f64;
            }
        } else {
            let min = eig.lambdas.iter().cloned().fold(f64::INFINITY, f64::min);
            let mut z = 0.0;
            for (i, &l) in eig.lambdas.iter().enumerate() {
                pops[i] = (-(l - min) / t).exp();
                z += pops[i];
            }
            for p in &mut pops {
                *p /= z;
            }
        }
        Self::from_populations(&pops)
    }

    /// Diagonal state from populations (must sum to 1).
    pub fn from_populations(pops: &[f64; 8]) -> Self {
        let mut m = Matrix8::zeros();
        for (i, &p) in pops.iter().enumerate() {
            m[(i, i)] = C64::new(p, 0.0);
        }
        Self { elements: m }
    }

    pub fn trace(&self) -> C64 {
        self.elements.trace()
    }

    /// Convex combination `(1-p) self + p other`.
    pub fn mix(&self, other: &DensityMatrix, p: f64) -> Self {
        Self {
            elements: self.elements * C64::new(1.0 - p, 0.0) + other.elements * C64::new(p, 0.0),
        }
    }

    /// Largest off-diagonal magnitude.
    pub fn max_coherence(&self) -> f64 {
        let mut max = 0.0_f64;
        for i in 0..8 {
            for j in 0..8 {
                if i != j {
                    max = max.max(self.elements[(i, j)].norm());
                }
            }
        }
        max
    }

    /// Elementwise max-norm distance to another state.
    pub fn max_distance(&self, other: &DensityMatrix) -> f64 {
        let mut max = 0.0_f64;
        for i in 0..8 {
            for j in 0..8 {
                max = max.max((self.elements[(i, j)] - other.elements[(i, j)]).norm());
            }
        }
        max
    }
}

/// Tilde basis vector `|~i>` (1-based), the alternative eigenbasis that
/// diagonalizes the degenerate sectors:
/// `|~1> = (|5>-|2>)/sqrt2`, `|~2> = (|7>-|4>)/sqrt2`, `|~3> = |1>`,
/// `|~4> = |3>`, `|~5> = (|2>+|5>)/sqrt2`, `|~6> = (|4>+|7>)/sqrt2`,
/// `|~7> = |6>`, `|~8> = |8>`.
pub fn tilde_vector(i: usize) -> Vector8 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = Vector8::zeros();
    let one = C64::new(1.0, 0.0);
    let sq = C64::new(s, 0.0);
    match i {
        1 => {
            v[4] = sq;
            v[1] = -sq;
        }
        2 => {
            v[6] = sq;
            v[3] = -sq;
        }
        3 => v[0] = one,
        4 => v[2] = one,
        5 => {
            v[1] = sq;
            v[4] = sq;
        }
        6 => {
            v[3] = sq;
            v[6] = sq;
        }
        7 => v[5] = one,
        8 => v[7] = one,
        _ => panic!("tilde index out of range: {i}"),
    }
    v
}

/// Population `<~i| rho |~i>` in the tilde basis.
pub fn tilde_population(rho: &DensityMatrix, i: usize) -> f64 {
    let v = tilde_vector(i);
    (v.adjoint() * rho.elements() * v)[(0, 0)].re
}

pub fn hermiticity_defect(m: &Matrix8) -> f64 {
    let mut max = 0.0_f64;
    for i in 0..8 {
        for j in 0..8 {
            max = max.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    max
}

/// Smallest eigenvalue of a (near-)Hermitian matrix.
pub fn min_eigenvalue(m: &Matrix8) -> f64 {
    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    eig.eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn basis_state_is_valid() {
        let rho = DensityMatrix::basis_state(3);
        assert!(DensityMatrix::new(*rho.elements()).is_ok());
        assert_abs_diff_eq!(rho.population(3), 1.0);
    }

    #[test]
    fn tilde_basis_is_orthonormal() {
        for i in 1..=8 {
            for j in 1..=8 {
                let dot = (tilde_vector(i).adjoint() * tilde_vector(j))[(0, 0)];
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(dot.re, expect, epsilon = 1e-15);
                assert_abs_diff_eq!(dot.im, 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn rejects_trace_violation() {
        let m = Matrix8::identity();
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = Matrix8::zeros();
        m[(0, 0)] = C64::new(1.0, 0.0);
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn mixing_preserves_trace() {
        let a = DensityMatrix::basis_state(1);
        let b = DensityMatrix::maximally_mixed();
        let m = a.mix(&b, 0.3);
        assert_abs_diff_eq!(m.trace().re, 1.0, epsilon = 1e-15);
    }
}
