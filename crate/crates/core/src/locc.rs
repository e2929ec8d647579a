//! Singlet fraction reachable by trace-preserving LOCC (`F*`).

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::channel::KrausChannel;
use crate::choi::choi;
use crate::entmetrics::{keep_top, singlet_fraction_value, DensityMatrix};
use crate::linalg::{
    eig_hermitized, magic_basis, magic_real_part, partial_transpose, sphere_unitary, su2_euler, symmetric_eigenvalues,
    tensor_product, to_magic_basis, Mat2, Mat4, Subsystem, C64,
};
use crate::oneshot::optimal_singlet_fraction;
use crate::optimize::{multistart, CoordinateSearch};
use crate::tolerances::STRICT_GAP;

/// Optimum of the rank-one program with the attaining witness.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FstarSolution {
    pub value: f64,
    /// `X = |β⟩⟨β|`, feasible for `0 ≤ X ≤ I` and `−I/2 ≤ X^Γ ≤ I/2`;
    /// zero when the separable value ½ is optimal.
    pub witness: Mat4,
    /// `(θ, φ, s)` of the Alice-side operator `sphere_unitary(θ, φ)·diag(1, s)`.
    pub params: [f64; 3],
}

/// `F*(ρ) = ½ − min Tr(X ρ^Γ)` over the program's feasible set.
///
/// The minimum is attained on rank-one `X = |β⟩⟨β|`, `β = (B ⊗ I)|Φ⟩` with `Φ`
/// maximally entangled and `‖B‖ = 1`. Writing `B = U diag(1, s)` (the right
/// unitary is absorbed into `Φ`), the inner minimum over `Φ` is the smallest
/// eigenvalue of a real symmetric matrix in the magic basis, leaving three
/// real parameters that are scanned on a grid and refined.
pub fn fstar(rho: &DensityMatrix) -> f64 {
    fstar_of(rho.matrix()).value
}

pub fn fstar_solution(rho: &DensityMatrix) -> FstarSolution {
    fstar_of(rho.matrix())
}

fn filtered_pt(pt: &Mat4, theta: f64, phi: f64, s: f64) -> Mat4 {
    let b = sphere_unitary(theta, phi) * Mat2::diag_real([1.0, s]);
    let k = tensor_product(&b, &Mat2::identity());
    k.adjoint() * *pt * k
}

fn min_overlap(pt: &Mat4, theta: f64, phi: f64, s: f64) -> f64 {
    symmetric_eigenvalues(magic_real_part(&filtered_pt(pt, theta, phi, s)))[3]
}

pub(crate) fn fstar_of(m: &Mat4) -> FstarSolution {
    fstar_with(m, [13, 24, 11], 8)
}

fn fstar_with(m: &Mat4, grid: [usize; 3], keep: usize) -> FstarSolution {
    let pt = partial_transpose(m, Subsystem::Second);
    let [nt, np, ns] = grid;
    // s = 1 makes the filter unitary, so every (θ, φ) gives the same value;
    // it enters once so the candidate list is not flooded with copies
    let mut top: Vec<(f64, [f64; 3])> = vec![(-min_overlap(&pt, 0.0, 0.0, 1.0), [0.0, 0.0, 1.0])];
    for i in 0..nt {
        let theta = PI * i as f64 / (nt - 1) as f64;
        for j in 0..np {
            let phi = TAU * j as f64 / np as f64;
            for k in 0..ns - 1 {
                let s = 1.0 - (1.0 - k as f64 / (ns - 1) as f64).powi(2);
                keep_top(&mut top, (-min_overlap(&pt, theta, phi, s), [theta, phi, s]), keep);
            }
        }
    }
    let search = CoordinateSearch::new(PI / 24.0, 1e-10, 6000).with_bounds(vec![None, None, Some((0.0, 1.0))]);
    let mut best = (f64::NEG_INFINITY, [0.0; 3]);
    for (_, x0) in &top {
        let r = search.maximize(|x| -min_overlap(&pt, x[0], x[1], x[2]), x0);
        if r.value > best.0 {
            best = (r.value, [r.x[0], r.x[1], r.x[2]]);
        }
    }
    let value = 0.5 + best.0;
    if value <= 0.5 {
        return FstarSolution { value: 0.5, witness: Mat4::zeros(), params: best.1 };
    }
    let [theta, phi, s] = best.1;
    let eig = eig_hermitized(&to_magic_basis(&filtered_pt(&pt, theta, phi, s)).real_part());
    let x = eig.vectors[3].map(|z| C64::new(z.re, 0.0));
    let mes = magic_basis().mul_vec(&crate::linalg::normalize(&x));
    let b = sphere_unitary(theta, phi) * Mat2::diag_real([1.0, s]);
    let beta = tensor_product(&b, &Mat2::identity()).mul_vec(&mes);
    FstarSolution { value: value.min(1.0), witness: Mat4::outer(&beta), params: best.1 }
}

// ---------------------------------------------------------------------------

/// One-way filtering protocol: Alice applies `A`; on success the pair is kept,
/// on failure it is replaced by a separable state with overlap ½.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FilterProtocol {
    pub filter: Mat2,
    /// `Tr[(A†A ⊗ I)ρ]`; zero for the trivial "prepare separable" protocol.
    pub success_probability: f64,
    pub success_state: Option<DensityMatrix>,
    /// `p·F(ρ₁) + (1 − p)/2`
    pub fstar_value: f64,
}

pub const DEFAULT_FILTER_RESTARTS: usize = 32;

fn filter_of(x: &[f64]) -> Mat2 {
    Mat2::diag_real([1.0, x[3]]) * su2_euler(x[0], x[1], x[2]).adjoint()
}

fn filter_value(m: &Mat4, x: &[f64]) -> f64 {
    let k = tensor_product(&filter_of(x), &Mat2::identity());
    let t = k * *m * k.adjoint();
    singlet_fraction_value(&t) + 0.5 * (1.0 - t.trace().re)
}

/// Direct search over filters `A = diag(1, s)·V†` maximising `p·F(ρ₁) + (1−p)/2`.
///
/// A unitary applied after the filter leaves the singlet fraction unchanged,
/// so `V ∈ SU(2)` and `s ∈ [0, 1]` cover every one-way filter up to that
/// freedom. Restart 0 starts at `A = I`; the rest start at seeded random points.
pub fn fstar_filter_oracle(rho: &DensityMatrix, restarts: usize, seed: u64) -> FilterProtocol {
    let m = *rho.matrix();
    let search = CoordinateSearch::new(0.4, 1e-6, 4000).with_bounds(vec![None, None, None, Some((0.0, 1.0))]);
    let start = |k: usize, rng: &mut ChaCha8Rng| -> Vec<f64> {
        if k == 0 {
            return vec![0.0, 0.0, 0.0, 1.0];
        }
        let mut x: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..TAU)).collect();
        x.push(rng.random_range(0.0..1.0));
        x
    };
    let best = multistart(&search, restarts, seed, false, start, |x| filter_value(&m, x));
    if best.value <= 0.5 {
        return FilterProtocol {
            filter: Mat2::zeros(),
            success_probability: 0.0,
            success_state: None,
            fstar_value: 0.5,
        };
    }
    let a = filter_of(&best.x);
    let k = tensor_product(&a, &Mat2::identity());
    let t = k * m * k.adjoint();
    let p = t.trace().re;
    let rho1 = DensityMatrix::new(t.scale_real(1.0 / p)).ok();
    let value = p * rho1.map(|r| singlet_fraction_value(r.matrix())).unwrap_or(0.5) + 0.5 * (1.0 - p);
    FilterProtocol { filter: a, success_probability: p, success_state: rho1, fstar_value: value }
}

// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoccGap {
    /// `F(Λ) − F*(J)`; `None` for entanglement-breaking channels.
    pub gap: Option<f64>,
    pub strict: bool,
    pub entanglement_breaking: bool,
}

/// Gap between the optimal one-shot singlet fraction and what TP-LOCC can
/// extract from the Choi state.
pub fn locc_gap(c: &KrausChannel) -> LoccGap {
    let opt = optimal_singlet_fraction(c);
    if opt.entanglement_breaking {
        return LoccGap { gap: None, strict: false, entanglement_breaking: true };
    }
    let gap = opt.lambda_max - fstar_of(choi(c).matrix()).value;
    LoccGap { gap: Some(gap), strict: gap > STRICT_GAP, entanglement_breaking: false }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entmetrics::{negativity_of, singlet_fraction_of};
    use crate::linalg::hermitian_eigenvalues;
    use crate::linalg::{phi_plus, tensor_vec};
    use crate::sampling::{random_density_matrix, random_qubit_state};
    use rand::SeedableRng;

    fn dm(m: Mat4) -> DensityMatrix {
        DensityMatrix::new(m).unwrap()
    }

    #[test]
    fn bell_state() {
        let b = dm(Mat4::outer(&phi_plus()));
        assert!((fstar(&b) - 1.0).abs() < 1e-12);
        let o = fstar_filter_oracle(&b, 4, 1);
        assert!((o.fstar_value - 1.0).abs() < 1e-12);
        assert!((o.success_probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn separable_is_half() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_qubit_state(&mut rng);
        let b = random_qubit_state(&mut rng);
        let prod = dm(Mat4::outer(&tensor_vec(&a, &b)));
        assert!((fstar(&prod) - 0.5).abs() < 1e-14);
        assert_eq!(fstar(&dm(Mat4::identity().scale_real(0.25))), 0.5);
    }

    #[test]
    fn amplitude_damping_choi_strictly_below() {
        let c = KrausChannel::amplitude_damping(0.5).unwrap();
        let j = dm(*choi(&c).matrix());
        let f = fstar(&j);
        assert!(f < 0.75 - 1e-6, "{f}");
        let o = fstar_filter_oracle(&j, 8, 3);
        assert!((o.fstar_value - f).abs() < 1e-6, "{} {f}", o.fstar_value);
        let g = locc_gap(&c);
        assert!(g.strict);
    }

    #[test]
    fn witness_is_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let rho = random_density_matrix(&mut rng, 2);
            let sol = fstar_of(&rho);
            let x = sol.witness;
            let ev = hermitian_eigenvalues(&x);
            assert!(ev[3] > -1e-12 && ev[0] < 1.0 + 1e-12);
            let evp = hermitian_eigenvalues(&partial_transpose(&x, Subsystem::Second));
            assert!(evp[3] > -0.5 - 1e-12 && evp[0] < 0.5 + 1e-12);
            if sol.value > 0.5 {
                let attained = 0.5 - (x * partial_transpose(&rho, Subsystem::Second)).trace().re;
                assert!((attained - sol.value).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bounds_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..20 {
            let rho = random_density_matrix(&mut rng, 2);
            let f = fstar_of(&rho).value;
            assert!(f >= 0.5);
            assert!(f >= singlet_fraction_of(&rho).value - 1e-10);
            assert!(f <= 0.5 * (1.0 + negativity_of(&rho)) + 1e-10);
        }
    }

    #[test]
    fn unital_gap_vanishes() {
        for c in [KrausChannel::depolarizing(0.4).unwrap(), KrausChannel::identity()] {
            let g = locc_gap(&c);
            assert!(g.gap.unwrap().abs() < 1e-9);
            assert!(!g.strict);
        }
        let eb = locc_gap(&KrausChannel::depolarizing(1.0).unwrap());
        assert!(eb.entanglement_breaking && eb.gap.is_none());
    }
}
