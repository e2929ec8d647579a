//! Seeded random states, unitaries and channels for property suites.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::channel::{random_isometry_kraus, KrausChannel};
use crate::linalg::{paulis, Mat2, Mat4, Vec2, Vec4, C64};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Haar-random element of SU(2).
pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    let mut q = [0.0f64; 4];
    loop {
        for v in q.iter_mut() {
            *v = StandardNormal.sample(rng);
        }
        let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 1e-12 {
            q.iter_mut().for_each(|v| *v /= n);
            break;
        }
    }
    let a = C64::new(q[0], q[1]);
    let b = C64::new(q[2], q[3]);
    Mat2::from_rows([[a, -b.conj()], [b, a.conj()]])
}

/// Haar-random pure state on `C² ⊗ C²`.
pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R) -> Vec4 {
    let v: Vec4 = [gaussian(rng), gaussian(rng), gaussian(rng), gaussian(rng)];
    crate::linalg::normalize(&v)
}

pub fn random_qubit_state<R: Rng + ?Sized>(rng: &mut R) -> Vec2 {
    crate::linalg::normalize(&[gaussian(rng), gaussian(rng)])
}

/// `GG†/Tr(GG†)` with `G` a 4×`rank` Ginibre matrix.
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R, rank: usize) -> Mat4 {
    let rank = rank.clamp(1, 4);
    let mut m = Mat4::zeros();
    for _ in 0..rank {
        let v: Vec4 = [gaussian(rng), gaussian(rng), gaussian(rng), gaussian(rng)];
        m = m + Mat4::outer(&v);
    }
    let tr = m.trace().re;
    m.scale_real(1.0 / tr).hermitian_part()
}

/// Random channel of the given Kraus rank (Gaussian isometry).
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, rank: usize) -> KrausChannel {
    KrausChannel::unchecked(random_isometry_kraus(rng, rank.clamp(1, 4))).with_label("random_channel")
}

/// Random unital channel `ρ ↦ Σ q_i (Uσ_iV) ρ (Uσ_iV)†` with flat Dirichlet
/// weights on `{I, X, Y, Z}` and Haar `U`, `V`.
pub fn random_unital_channel<R: Rng + ?Sized>(rng: &mut R) -> KrausChannel {
    let mut q = [0.0f64; 4];
    for v in q.iter_mut() {
        *v = Exp1.sample(rng);
    }
    let total: f64 = q.iter().sum();
    let u = random_su2(rng);
    let v = random_su2(rng);
    let [x, y, z] = paulis();
    let ops = [Mat2::identity(), x, y, z];
    let kraus = ops.iter().zip(q).map(|(s, w)| (u * *s * v).scale_real((w / total).sqrt())).collect();
    KrausChannel::unchecked(kraus).with_label("random_unital")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{is_unital, validate};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for rank in 1..=4 {
            let rho = random_density_matrix(&mut rng, rank);
            assert!((rho.trace().re - 1.0).abs() < 1e-12);
            assert!(rho.is_psd(1e-12));
            assert!(validate(&random_channel(&mut rng, rank), 1e-9).ok);
        }
        let u = random_su2(&mut rng);
        assert!(u.is_unitary(1e-12));
        let c = random_unital_channel(&mut rng);
        assert!(validate(&c, 1e-9).ok);
        assert!(is_unital(&c, 1e-9).unital);
    }
}
