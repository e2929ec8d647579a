//! Two-qubit entanglement quantities.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitized, hermitian_eig, hermitian_eigenvalues, magic_basis, magic_real_part, norm, partial_trace_second,
    partial_transpose, su2_euler, symmetric_eigenvalues, tensor_vec, to_magic_basis, Mat2, Mat4, Subsystem, Vec2, Vec4,
    C64, ZERO,
};
use crate::optimize::CoordinateSearch;
use crate::tolerances::{HERMITIAN_TOL, MES_TOL, NORM_TOL, PSD_TOL, PT_EXTREMES_MARGINAL_TOL, TRACE_TOL};

/// A validated two-qubit density matrix (Hermitian, PSD, unit trace).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix(Mat4);

impl DensityMatrix {
    pub fn new(m: Mat4) -> Result<Self> {
        let eig = hermitian_eig(&m, HERMITIAN_TOL)?;
        let tr = m.trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        if eig.min() < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {:e}", eig.min())));
        }
        Ok(DensityMatrix(m.hermitian_part()))
    }

    pub fn from_pure(psi: &PureState) -> Self {
        DensityMatrix(Mat4::outer(&psi.0))
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }
}

/// A unit vector on `C² ⊗ C²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PureState(Vec4);

impl PureState {
    pub fn new(v: Vec4) -> Result<Self> {
        let n = norm(&v);
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("state norm {n} differs from 1")));
        }
        Ok(PureState(v))
    }

    /// Normalises `v`; fails on the zero vector.
    pub fn normalized(v: Vec4) -> Result<Self> {
        let n = norm(&v);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidState("cannot normalise a zero vector".into()));
        }
        Ok(PureState(v.map(|z| z / n)))
    }

    pub fn vector(&self) -> &Vec4 {
        &self.0
    }
}

/// `√λ₁|e₁f₁⟩ + √λ₂|e₂f₂⟩` with `λ₁ ≥ λ₂`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchmidtData {
    /// Squared Schmidt coefficients, descending, summing to 1.
    pub coefficients: [f64; 2],
    /// Columns of `local_bases[0]` are `e_k`, columns of `local_bases[1]` are `f_k`.
    pub local_bases: [Mat2; 2],
}

impl SchmidtData {
    /// The larger squared coefficient.
    pub fn lambda(&self) -> f64 {
        self.coefficients[0]
    }

    pub fn is_maximally_entangled(&self) -> bool {
        (self.coefficients[0] - 0.5).abs() < MES_TOL
    }

    pub fn reconstruct(&self) -> Vec4 {
        let mut out = [ZERO; 4];
        for k in 0..2 {
            let v = tensor_vec(&self.local_bases[0].column(k), &self.local_bases[1].column(k));
            let w = self.coefficients[k].max(0.0).sqrt();
            for i in 0..4 {
                out[i] += v[i] * w;
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Singlet fraction

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingletFraction {
    pub value: f64,
    /// A maximally entangled state attaining the value.
    pub state: Vec4,
}

/// Fully entangled fraction `max_Φ ⟨Φ|ρ|Φ⟩` over maximally entangled `Φ`.
pub fn singlet_fraction(rho: &DensityMatrix) -> SingletFraction {
    singlet_fraction_of(rho.matrix())
}

/// Same as [`singlet_fraction`] for any Hermitian operator (no validation).
///
/// Maximally entangled states are the real unit vectors in the magic basis,
/// so the maximum is the top eigenvalue of `Re(M†ρM)`.
pub fn singlet_fraction_of(m: &Mat4) -> SingletFraction {
    let eig = eig_hermitized(&to_magic_basis(m).real_part());
    let x = eig.vectors[0].map(|z| C64::new(z.re, 0.0));
    let state = magic_basis().mul_vec(&crate::linalg::normalize(&x));
    SingletFraction { value: eig.max(), state }
}

/// Value only, for inner loops.
pub fn singlet_fraction_value(m: &Mat4) -> f64 {
    symmetric_eigenvalues(magic_real_part(m))[0]
}

/// Grid and refined values of the brute-force singlet-fraction search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleValue {
    /// Best value on the Euler grid.
    pub grid: f64,
    /// After coordinate refinement from the best grid points.
    pub refined: f64,
}

/// `⟨Φ⁺|(I⊗W†) m (I⊗W)|Φ⁺⟩` for `W = su2_euler(α, β, γ)`.
///
/// `(U⊗V)|Φ⁺⟩ = (I⊗VUᵀ)|Φ⁺⟩`, so one local unitary covers every maximally
/// entangled state.
fn mes_overlap(m: &Mat4, alpha: f64, beta: f64, gamma: f64) -> f64 {
    let w = su2_euler(alpha, beta, gamma);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let v = [w.0[0][0] * h, w.0[1][0] * h, w.0[0][1] * h, w.0[1][1] * h];
    hermitian_form(m, &v)
}

/// Brute-force maximum overlap with maximally entangled states.
///
/// Scans `α, γ ∈ [0, 2π)`, `β ∈ [0, π]` at `step_deg`, then refines the best
/// grid points by coordinate search down to 1e-6 rad. Both values are lower
/// bounds on [`singlet_fraction`]. `parallel` spreads the grid over threads.
pub fn singlet_fraction_oracle(rho: &DensityMatrix, step_deg: f64, parallel: bool) -> OracleValue {
    let m = *rho.matrix();
    let step = step_deg.to_radians();
    let n_ag = ((TAU / step).round() as usize).max(1);
    let n_b = ((PI / step).round() as usize).max(1) + 1;
    let ag = TAU / n_ag as f64;
    let bs = PI / (n_b - 1) as f64;
    // e^{-ia/2} for the outer angles, (cos, sin)(b/2) for the middle one
    let half_phase: Vec<C64> = (0..n_ag).map(|k| C64::from_polar(1.0, -0.5 * k as f64 * ag)).collect();
    let half_trig: Vec<(f64, f64)> = (0..n_b).map(|j| (0.5 * j as f64 * bs).sin_cos()).collect();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let scan_alpha = |i: usize| -> Vec<(f64, [f64; 3])> {
        let ea = half_phase[i];
        let mut local: Vec<(f64, [f64; 3])> = Vec::with_capacity(4);
        for (j, &(sb, cb)) in half_trig.iter().enumerate() {
            for (k, eg) in half_phase.iter().enumerate() {
                let p = ea * eg;
                let q = ea * eg.conj();
                // columns of su2_euler, read as (I⊗W)|Φ⁺⟩
                let v = [p * (cb * h), q.conj() * (sb * h), -q * (sb * h), p.conj() * (cb * h)];
                let val = hermitian_form(&m, &v);
                keep_top(&mut local, (val, [i as f64 * ag, j as f64 * bs, k as f64 * ag]), 4);
            }
        }
        local
    };
    let per_alpha: Vec<Vec<(f64, [f64; 3])>> = if parallel {
        (0..n_ag).into_par_iter().map(scan_alpha).collect()
    } else {
        (0..n_ag).map(scan_alpha).collect()
    };
    let mut top: Vec<(f64, [f64; 3])> = Vec::new();
    for cands in per_alpha {
        for c in cands {
            keep_top(&mut top, c, 4);
        }
    }
    let grid = top.first().map(|c| c.0).unwrap_or(f64::NEG_INFINITY);
    let search = CoordinateSearch::new(step, 1e-6, 20_000);
    let refined =
        top.iter().map(|(_, x)| search.maximize(|p| mes_overlap(&m, p[0], p[1], p[2]), x).value).fold(grid, f64::max);
    OracleValue { grid, refined }
}

/// `Re ⟨v|m|v⟩` for Hermitian `m`, using the upper triangle only.
fn hermitian_form(m: &Mat4, v: &Vec4) -> f64 {
    let mut diag = 0.0;
    let mut off = C64::new(0.0, 0.0);
    for i in 0..4 {
        diag += m.0[i][i].re * v[i].norm_sqr();
        for j in (i + 1)..4 {
            off += v[i].conj() * m.0[i][j] * v[j];
        }
    }
    diag + 2.0 * off.re
}

/// Keeps the `cap` largest entries, sorted descending; earlier entries win ties.
pub(crate) fn keep_top<T>(list: &mut Vec<(f64, T)>, item: (f64, T), cap: usize) {
    if list.len() == cap && item.0 <= list[cap - 1].0 {
        return;
    }
    let pos = list.iter().position(|c| item.0 > c.0).unwrap_or(list.len());
    list.insert(pos, item);
    list.truncate(cap);
}

/// Average teleportation fidelity `(dF + 1)/(d + 1)`.
pub fn teleportation_fidelity(f: f64, d: u32) -> Result<f64> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::ParameterOutOfRange { name: "F".into(), value: f, range: "[0, 1]" });
    }
    if d < 2 {
        return Err(Error::ParameterOutOfRange { name: "d".into(), value: d as f64, range: "d >= 2" });
    }
    let d = d as f64;
    Ok((d * f + 1.0) / (d + 1.0))
}

// ---------------------------------------------------------------------------
// Negativity and the partial-transpose spectrum

/// `max(0, −2 λ_min(ρ^Γ))`
pub fn negativity(rho: &DensityMatrix) -> f64 {
    negativity_of(rho.matrix())
}

pub fn negativity_of(m: &Mat4) -> f64 {
    let lmin = hermitian_eigenvalues(&partial_transpose(m, Subsystem::Second))[3];
    (-2.0 * lmin).max(0.0)
}

/// `λ_min(σ^Γ) + λ_max(σ) − ½`, defined when `Tr_B σ = I/2`.
pub fn pt_extremes_residual(sigma: &DensityMatrix) -> Result<f64> {
    pt_extremes_residual_with(sigma.matrix(), |m| partial_transpose(m, Subsystem::Second))
}

/// [`pt_extremes_residual`] with a caller-supplied partial transpose.
pub fn pt_extremes_residual_with(sigma: &Mat4, pt: impl Fn(&Mat4) -> Mat4) -> Result<f64> {
    let marginal = partial_trace_second(sigma);
    let dev = marginal.max_abs_diff(&Mat2::identity().scale_real(0.5));
    if dev > PT_EXTREMES_MARGINAL_TOL {
        return Err(Error::InvalidInput(format!("Tr_B deviates from I/2 by {dev:e}")));
    }
    let lmin = hermitian_eigenvalues(&pt(sigma))[3];
    let lmax = hermitian_eigenvalues(sigma)[0];
    Ok(lmin + lmax - 0.5)
}

/// How close a state comes to `F = ½(1 + N)`, and whether the negative
/// eigenvector of `ρ^Γ` is maximally entangled.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NegativityDiagnostic {
    pub singlet_fraction: f64,
    /// `½(1 + N)`
    pub bound: f64,
    /// Larger squared Schmidt coefficient of the eigenvector of `λ_min(ρ^Γ)`.
    pub negative_vector_lambda: f64,
    pub negative_vector_mes: bool,
    pub saturated: bool,
}

pub fn negativity_bound_diagnostic(rho: &DensityMatrix) -> NegativityDiagnostic {
    let m = rho.matrix();
    let f = singlet_fraction_of(m).value;
    let pt = eig_hermitized(&partial_transpose(m, Subsystem::Second));
    let n = (-2.0 * pt.min()).max(0.0);
    let s = schmidt_of(&pt.vectors[3]);
    let bound = 0.5 * (1.0 + n);
    NegativityDiagnostic {
        singlet_fraction: f,
        bound,
        negative_vector_lambda: s.lambda(),
        negative_vector_mes: s.is_maximally_entangled(),
        saturated: (bound - f).abs() < 1e-9,
    }
}

// ---------------------------------------------------------------------------
// Schmidt decomposition

pub fn schmidt(psi: &PureState) -> SchmidtData {
    schmidt_of(psi.vector())
}

/// Schmidt decomposition of any nonzero vector (normalised internally).
///
/// SVD of the coefficient matrix `C_ij = ψ_{2i+j}`: `e_k` are eigenvectors of
/// `CC†`, `f_k = Cᵀ e_k* / σ_k`.
pub fn schmidt_of(psi: &Vec4) -> SchmidtData {
    let n = norm(psi);
    let psi = psi.map(|z| z / n);
    let c = Mat2::from_rows([[psi[0], psi[1]], [psi[2], psi[3]]]);
    let eig = eig_hermitized(&(c * c.adjoint()));
    let l1 = eig.values[0].clamp(0.0, 1.0);
    let coefficients = [l1, (1.0 - l1).max(0.0)];
    let e = [eig.vectors[0], eig.vectors[1]];
    let f_of = |ek: &Vec2| -> Vec2 {
        let ec = [ek[0].conj(), ek[1].conj()];
        [c.0[0][0] * ec[0] + c.0[1][0] * ec[1], c.0[0][1] * ec[0] + c.0[1][1] * ec[1]]
    };
    let f0 = crate::linalg::normalize(&f_of(&e[0]));
    let f1_raw = f_of(&e[1]);
    let f1 = if norm(&f1_raw) > 1e-7 {
        crate::linalg::normalize(&f1_raw)
    } else {
        // the partner of a vanishing coefficient only needs to be orthogonal
        [-f0[1].conj(), f0[0].conj()]
    };
    SchmidtData { coefficients, local_bases: [Mat2::from_columns(&[e[0], e[1]]), Mat2::from_columns(&[f0, f1])] }
}

/// `√λ|00⟩ + √(1−λ)|11⟩`
pub fn schmidt_state(lambda: f64) -> Vec4 {
    let l = lambda.clamp(0.0, 1.0);
    [C64::new(l.sqrt(), 0.0), ZERO, ZERO, C64::new((1.0 - l).sqrt(), 0.0)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{apply_to_half, KrausChannel};
    use crate::choi::choi;
    use crate::linalg::{phi_plus, tensor_product};
    use crate::sampling::{random_density_matrix, random_pure_state, random_su2};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dm(m: Mat4) -> DensityMatrix {
        DensityMatrix::new(m).unwrap()
    }

    fn bell() -> DensityMatrix {
        dm(Mat4::outer(&phi_plus()))
    }

    fn mixed() -> DensityMatrix {
        dm(Mat4::identity().scale_real(0.25))
    }

    #[test]
    fn singlet_fraction_examples() {
        let b = singlet_fraction(&bell());
        assert!((b.value - 1.0).abs() < 1e-14);
        assert!((crate::linalg::inner(&b.state, &phi_plus()).norm() - 1.0).abs() < 1e-12);
        assert!((singlet_fraction(&mixed()).value - 0.25).abs() < 1e-15);

        let p = 0.5;
        let c = KrausChannel::amplitude_damping(p).unwrap();
        let chi = schmidt_state(1.0 / (2.0 - p));
        let out = dm(apply_to_half(&c, &Mat4::outer(&chi)));
        let sf = singlet_fraction(&out);
        assert!((sf.value - 0.75).abs() < 1e-12);
        assert!((out.matrix().expectation(&sf.state).re - sf.value).abs() < 1e-10);
    }

    #[test]
    fn oracle_examples() {
        let b = singlet_fraction_oracle(&bell(), 2.0, false);
        assert!((b.grid - 1.0).abs() < 1e-6);
        let m = singlet_fraction_oracle(&mixed(), 10.0, false);
        assert!((m.grid - 0.25).abs() < 1e-15);
        assert!((m.refined - 0.25).abs() < 1e-15);
    }

    #[test]
    fn oracle_agrees_on_random_choi() {
        for seed in 0..3 {
            let j = choi(&KrausChannel::random(seed, 3).unwrap());
            let rho = dm(*j.matrix());
            let exact = singlet_fraction(&rho).value;
            let o = singlet_fraction_oracle(&rho, 2.0, false);
            assert!(o.grid <= exact + 1e-12 && exact - o.grid < 1e-3, "{exact} {o:?}");
            assert!(o.refined <= exact + 1e-12 && exact - o.refined < 1e-8, "{exact} {o:?}");
        }
    }

    #[test]
    fn teleportation_examples() {
        assert_eq!(teleportation_fidelity(1.0, 2).unwrap(), 1.0);
        assert!((teleportation_fidelity(0.5, 2).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((teleportation_fidelity(0.75, 2).unwrap() - 5.0 / 6.0).abs() < 1e-15);
        assert!(teleportation_fidelity(1.2, 2).is_err());
        assert!(teleportation_fidelity(0.5, 1).is_err());
    }

    #[test]
    fn negativity_examples() {
        assert!((negativity(&bell()) - 1.0).abs() < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = crate::sampling::random_qubit_state(&mut rng);
        let b = crate::sampling::random_qubit_state(&mut rng);
        assert!(negativity(&dm(Mat4::outer(&tensor_vec(&a, &b)))) < 1e-14);
        let p: f64 = 0.5;
        let j = dm(*choi(&KrausChannel::amplitude_damping(p).unwrap()).matrix());
        let expected = (p * p / 4.0 + 1.0 - p).sqrt() - p / 2.0;
        assert!((negativity(&j) - expected).abs() < 1e-14);
    }

    #[test]
    fn schmidt_examples() {
        let s = schmidt(&PureState::new(phi_plus()).unwrap());
        assert!((s.coefficients[0] - 0.5).abs() < 1e-14);
        assert!(s.is_maximally_entangled());
        let zero = [C64::new(1.0, 0.0), ZERO, ZERO, ZERO];
        let s = schmidt(&PureState::new(zero).unwrap());
        assert_eq!(s.coefficients, [1.0, 0.0]);
        let chi = schmidt_state(2.0 / 3.0);
        let s = schmidt_of(&chi);
        assert!((s.coefficients[0] - 2.0 / 3.0).abs() < 1e-14);
        assert!((s.coefficients[1] - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn schmidt_reconstructs_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let psi = random_pure_state(&mut rng);
            let s = schmidt_of(&psi);
            let r = s.reconstruct();
            let err: f64 = (0..4).map(|i| (r[i] - psi[i]).norm_sqr()).sum::<f64>().sqrt();
            assert!(err < 1e-10, "{err}");
            assert!(s.local_bases[0].is_unitary(1e-10) && s.local_bases[1].is_unitary(1e-10));
        }
    }

    #[test]
    fn pt_extremes_examples() {
        assert!(pt_extremes_residual(&bell()).unwrap().abs() < 1e-14);
        assert!(pt_extremes_residual(&mixed()).unwrap().abs() < 1e-15);
        let skewed = dm(Mat4::diag_real([0.7, 0.1, 0.1, 0.1]));
        assert!(pt_extremes_residual(&skewed).is_err());
    }

    #[test]
    fn local_unitary_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let rho = random_density_matrix(&mut rng, 2);
            let k = tensor_product(&random_su2(&mut rng), &random_su2(&mut rng));
            let rotated = k * rho * k.adjoint();
            assert!((singlet_fraction_value(&rho) - singlet_fraction_value(&rotated)).abs() < 1e-10);
            assert!((negativity_of(&rho) - negativity_of(&rotated)).abs() < 1e-10);
        }
    }

    #[test]
    fn diagnostic_on_bell_diagonal() {
        let j = dm(*choi(&KrausChannel::depolarizing(0.3).unwrap()).matrix());
        let d = negativity_bound_diagnostic(&j);
        assert!(d.negative_vector_mes && d.saturated);
    }
}
