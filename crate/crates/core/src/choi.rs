//! Choi and dual-Choi states.

use crate::channel::{apply_to_half_pure, dual, KrausChannel};
use crate::error::{Error, Result};
use crate::linalg::{conj_vec, hermitian_eig, inner, phi_plus, swap, swap_conjugate, EigenDecomposition, Mat4, Vec4};
use crate::tolerances::{DEGENERACY_GAP, HERMITIAN_TOL, PSD_TOL, TRACE_TOL};

/// `(I ⊗ Λ)|Φ⁺⟩⟨Φ⁺|` with its spectrum cached.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiState {
    matrix: Mat4,
    eig: EigenDecomposition<4>,
    source: Option<String>,
}

impl ChoiState {
    /// Wrap a two-qubit density matrix. Checks Hermiticity, PSD and unit trace.
    pub fn from_matrix(matrix: Mat4, source: Option<String>) -> Result<Self> {
        let eig = hermitian_eig(&matrix, HERMITIAN_TOL)?;
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        if eig.min() < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {:e}", eig.min())));
        }
        Ok(ChoiState { matrix, eig, source })
    }

    fn build(matrix: Mat4, source: Option<String>) -> Self {
        let matrix = matrix.hermitian_part();
        let eig = crate::linalg::eig_hermitized(&matrix);
        ChoiState { matrix, eig, source }
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.matrix
    }

    pub fn eig(&self) -> &EigenDecomposition<4> {
        &self.eig
    }

    pub fn source(&self) -> Option<&str> {
        self.source.as_deref()
    }

    pub fn lambda_max(&self) -> f64 {
        self.eig.max()
    }
}

/// Choi state of a channel.
pub fn choi(c: &KrausChannel) -> ChoiState {
    ChoiState::build(apply_to_half_pure(c, &phi_plus()), c.label().map(str::to_string))
}

/// Choi state of the dual map, built from the dagger Kraus operators.
///
/// Its Bob marginal is always `I/2`; the Alice marginal is `I/2` only for
/// unital channels.
pub fn dual_choi(c: &KrausChannel) -> ChoiState {
    let d = dual(c);
    let m = apply_to_half_pure(&d, &phi_plus());
    debug_assert!(m.max_abs_diff(&swap_conjugate(&apply_to_half_pure(c, &phi_plus()))) < 1e-12);
    ChoiState::build(m, d.label().map(str::to_string))
}

/// Result of comparing the eigenvectors of the Choi and dual Choi states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Correspondence {
    /// Largest residual over eigenpairs (or eigenspaces).
    pub residual: f64,
    /// True when at least one cluster of tied eigenvalues was compared by projector.
    pub subspace_mode: bool,
}

/// Checks that the dual-Choi eigenvectors are `(V|ψ_k⟩)*`.
///
/// Eigenvalues closer than the degeneracy gap are compared as spectral
/// projectors (Frobenius distance) instead of vector by vector.
pub fn eigenvector_correspondence_check(c: &KrausChannel) -> Correspondence {
    let j = choi(c);
    let d = dual_choi(c);
    let v = swap();
    // map dual eigenvectors back: (V†ψ')*
    let mapped: Vec<Vec4> = d.eig.vectors.iter().map(|w| conj_vec(&v.adjoint().mul_vec(w))).collect();
    let mut residual: f64 = 0.0;
    let mut subspace_mode = false;
    for range in j.eig.clusters(DEGENERACY_GAP) {
        if range.len() == 1 {
            let k = range.start;
            let a = &j.eig.vectors[k];
            let b = &mapped[k];
            let ov = inner(b, a);
            let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { crate::linalg::ONE };
            let diff: f64 = (0..4).map(|i| (a[i] - b[i] * phase).norm_sqr()).sum::<f64>().sqrt();
            residual = residual.max(diff);
        } else {
            subspace_mode = true;
            let p: Mat4 = range.clone().map(|k| Mat4::outer(&j.eig.vectors[k])).sum();
            let q: Mat4 = range.map(|k| Mat4::outer(&mapped[k])).sum();
            residual = residual.max((p - q).frobenius_norm());
        }
    }
    Correspondence { residual, subspace_mode }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::validate;
    use crate::entmetrics::schmidt_of;
    use crate::linalg::{partial_trace_first, partial_trace_second, Mat2};

    #[test]
    fn identity_choi_is_phi_plus() {
        let j = choi(&KrausChannel::identity());
        assert!(j.matrix().max_abs_diff(&Mat4::outer(&phi_plus())) < 1e-15);
        assert!(dual_choi(&KrausChannel::identity()).matrix().max_abs_diff(j.matrix()) < 1e-15);
    }

    #[test]
    fn depolarizing_choi() {
        let p = 0.4;
        let j = choi(&KrausChannel::depolarizing(p).unwrap());
        let expected = Mat4::outer(&phi_plus()).scale_real(1.0 - p) + Mat4::identity().scale_real(p / 4.0);
        assert!(j.matrix().max_abs_diff(&expected) < 1e-15);
        assert!((j.lambda_max() - 0.7).abs() < 1e-14);
    }

    #[test]
    fn amplitude_damping_spectra_and_input() {
        let c = KrausChannel::amplitude_damping(0.5).unwrap();
        let j = choi(&c);
        let d = dual_choi(&c);
        assert!((j.lambda_max() - 0.75).abs() < 1e-14);
        assert!((d.lambda_max() - 0.75).abs() < 1e-14);
        let s = schmidt_of(&d.eig().vectors[0]);
        assert!((s.coefficients[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((s.coefficients[1] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn dual_matches_swap_conjugate() {
        for seed in 0..20 {
            let c = KrausChannel::random(seed, 1 + (seed as usize % 4)).unwrap();
            let j = choi(&c);
            let d = dual_choi(&c);
            assert!(d.matrix().max_abs_diff(&swap_conjugate(j.matrix())) < 1e-12);
            for k in 0..4 {
                assert!((j.eig().values[k] - d.eig().values[k]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn marginals() {
        let c = KrausChannel::amplitude_damping(0.3).unwrap();
        let half = Mat2::identity().scale_real(0.5);
        assert!(partial_trace_second(choi(&c).matrix()).max_abs_diff(&half) < 1e-15);
        let d = dual_choi(&c);
        assert!(partial_trace_first(d.matrix()).max_abs_diff(&half) < 1e-15);
        assert!(partial_trace_second(d.matrix()).max_abs_diff(&half) > 0.1);
    }

    #[test]
    fn correspondence_examples() {
        let id = eigenvector_correspondence_check(&KrausChannel::identity());
        assert!(id.residual < 1e-12);
        let ad = eigenvector_correspondence_check(&KrausChannel::amplitude_damping(0.3).unwrap());
        assert!(ad.residual < 1e-9);
        let dep = eigenvector_correspondence_check(&KrausChannel::depolarizing(0.4).unwrap());
        assert!(dep.subspace_mode);
        assert!(dep.residual < 1e-9);
    }

    #[test]
    fn from_matrix_validates() {
        assert!(ChoiState::from_matrix(Mat4::identity(), None).is_err());
        assert!(ChoiState::from_matrix(Mat4::diag_real([1.5, -0.5, 0.0, 0.0]), None).is_err());
        assert!(ChoiState::from_matrix(Mat4::identity().scale_real(0.25), None).is_ok());
        assert!(validate(&KrausChannel::identity(), 1e-9).ok);
    }
}
