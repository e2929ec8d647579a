//! Qubit channels in Kraus form.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::choi::{choi, ChoiState};
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitized, partial_trace_second, paulis, tensor_product, Mat2, Mat3, Mat4, C64};
use crate::tolerances::{CHANNEL_TOL, KRAUS_RANK_CUTOFF, MARGINAL_TOL, UNITAL_TOL};

/// Maximum number of Kraus operators kept for a qubit channel (Choi rank bound).
pub const MAX_KRAUS: usize = 4;

/// A qubit channel `ρ ↦ Σ A_i ρ A_i†`.
///
/// The Kraus list is not required to be trace preserving at construction
/// (the dual of a nonunital channel is not); use [`validate`] to check.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    kraus: Vec<Mat2>,
    label: Option<String>,
    params: BTreeMap<String, f64>,
}

impl KrausChannel {
    /// Build from raw Kraus operators.
    ///
    /// Lists longer than four are compressed through the Choi state, which
    /// requires them to describe a trace-preserving map.
    pub fn new(kraus: Vec<Mat2>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::InvalidChannel("at least one Kraus operator is required".into()));
        }
        if kraus.iter().any(|k| k.0.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite())) {
            return Err(Error::InvalidChannel("non-finite Kraus entry".into()));
        }
        let raw = KrausChannel { kraus, label: None, params: BTreeMap::new() };
        if raw.kraus.len() <= MAX_KRAUS {
            return Ok(raw);
        }
        let compressed = kraus_from_choi(&choi(&raw))?;
        Ok(KrausChannel { kraus: compressed.kraus, ..raw })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn with_param(mut self, name: impl Into<String>, value: f64) -> Self {
        self.params.insert(name.into(), value);
        self
    }

    pub fn kraus(&self) -> &[Mat2] {
        &self.kraus
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn identity() -> Self {
        Self::unchecked(vec![Mat2::identity()]).with_label("identity")
    }

    /// The unitary channel `ρ ↦ UρU†`.
    pub fn unitary(u: Mat2) -> Result<Self> {
        if !u.is_unitary(CHANNEL_TOL) {
            return Err(Error::InvalidChannel("operator is not unitary".into()));
        }
        Ok(Self::unchecked(vec![u]).with_label("unitary"))
    }

    /// `ρ ↦ (1−p)ρ + p·I/2`
    pub fn depolarizing(p: f64) -> Result<Self> {
        check_probability("p", p)?;
        let [x, y, z] = paulis();
        let a = (1.0 - 0.75 * p).sqrt();
        let b = (0.25 * p).sqrt();
        Ok(Self::unchecked(vec![Mat2::identity().scale_real(a), x.scale_real(b), y.scale_real(b), z.scale_real(b)])
            .with_label("depolarizing")
            .with_param("p", p))
    }

    /// `K₀ = diag(1, √(1−p))`, `K₁ = √p |0⟩⟨1|`.
    pub fn amplitude_damping(p: f64) -> Result<Self> {
        check_probability("p", p)?;
        let k0 = Mat2::from_real([[1.0, 0.0], [0.0, (1.0 - p).sqrt()]]);
        let k1 = Mat2::from_real([[0.0, p.sqrt()], [0.0, 0.0]]);
        Ok(Self::unchecked(vec![k0, k1]).with_label("amplitude_damping").with_param("p", p))
    }

    /// `K₀ = diag(1, √(1−p))`, `K₁ = diag(0, √p)`.
    pub fn phase_damping(p: f64) -> Result<Self> {
        check_probability("p", p)?;
        let k0 = Mat2::from_real([[1.0, 0.0], [0.0, (1.0 - p).sqrt()]]);
        let k1 = Mat2::from_real([[0.0, 0.0], [0.0, p.sqrt()]]);
        Ok(Self::unchecked(vec![k0, k1]).with_label("phase_damping").with_param("p", p))
    }

    /// `ρ ↦ (1−p)ρ + p XρX`
    pub fn bit_flip(p: f64) -> Result<Self> {
        check_probability("p", p)?;
        let [x, _, _] = paulis();
        Ok(Self::unchecked(vec![Mat2::identity().scale_real((1.0 - p).sqrt()), x.scale_real(p.sqrt())])
            .with_label("bit_flip")
            .with_param("p", p))
    }

    /// Random channel from a Gaussian isometry `C² → C² ⊗ C^rank`.
    ///
    /// The isometry columns are orthonormalised Gaussian vectors; Kraus
    /// operator `k` is the `k`-th environment slice. Deterministic in `seed`.
    pub fn random(seed: u64, kraus_rank: usize) -> Result<Self> {
        if !(1..=MAX_KRAUS).contains(&kraus_rank) {
            return Err(Error::ParameterOutOfRange {
                name: "kraus_rank".into(),
                value: kraus_rank as f64,
                range: "{1, 2, 3, 4}",
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kraus = random_isometry_kraus(&mut rng, kraus_rank);
        Ok(Self::unchecked(kraus)
            .with_label("random_channel")
            .with_param("seed", seed as f64)
            .with_param("kraus_rank", kraus_rank as f64))
    }

    /// Look up a named constructor.
    ///
    /// Known names: `identity`, `depolarizing(p)`, `amplitude_damping(p)`,
    /// `phase_damping(p)`, `bit_flip(p)`, `random_channel(seed, kraus_rank)`,
    /// `unitary(theta, phi, lambda)`.
    pub fn from_name(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let get = |key: &str| -> Result<f64> {
            params
                .get(key)
                .copied()
                .ok_or_else(|| Error::InvalidInput(format!("channel `{name}` requires parameter `{key}`")))
        };
        let allowed: &[&str] = match name {
            "identity" => &[],
            "depolarizing" | "amplitude_damping" | "phase_damping" | "bit_flip" => &["p"],
            "random_channel" => &["seed", "kraus_rank"],
            "unitary" => &["theta", "phi", "lambda"],
            other => return Err(Error::UnknownChannel(other.to_string())),
        };
        if let Some(extra) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::InvalidInput(format!("channel `{name}` has no parameter `{extra}`")));
        }
        match name {
            "identity" => Ok(Self::identity()),
            "depolarizing" => Self::depolarizing(get("p")?),
            "amplitude_damping" => Self::amplitude_damping(get("p")?),
            "phase_damping" => Self::phase_damping(get("p")?),
            "bit_flip" => Self::bit_flip(get("p")?),
            "random_channel" => {
                let seed = get("seed")?;
                let rank = params.get("kraus_rank").copied().unwrap_or(4.0);
                if seed < 0.0 || seed.fract() != 0.0 || rank.fract() != 0.0 {
                    return Err(Error::InvalidInput("seed and kraus_rank must be non-negative integers".into()));
                }
                Self::random(seed as u64, rank as usize)
            }
            "unitary" => {
                let (theta, phi, lambda) = (get("theta")?, get("phi")?, get("lambda")?);
                Ok(Self::unitary(u3(theta, phi, lambda))?
                    .with_param("theta", theta)
                    .with_param("phi", phi)
                    .with_param("lambda", lambda))
            }
            _ => unreachable!(),
        }
    }

    pub(crate) fn unchecked(kraus: Vec<Mat2>) -> Self {
        KrausChannel { kraus, label: None, params: BTreeMap::new() }
    }

    /// Display name: label plus parameters.
    pub fn describe(&self) -> String {
        let base = self.label.clone().unwrap_or_else(|| "kraus".to_string());
        if self.params.is_empty() {
            base
        } else {
            let ps: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            format!("{base}({})", ps.join(", "))
        }
    }
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange { name: name.to_string(), value: p, range: "[0, 1]" })
    }
}

/// `U3(θ, φ, λ)` single-qubit gate.
pub fn u3(theta: f64, phi: f64, lambda: f64) -> Mat2 {
    let (s, c) = (0.5 * theta).sin_cos();
    Mat2::from_rows([
        [C64::new(c, 0.0), -C64::from_polar(s, lambda)],
        [C64::from_polar(s, phi), C64::from_polar(c, phi + lambda)],
    ])
}

pub(crate) fn random_isometry_kraus<R: rand::Rng + ?Sized>(rng: &mut R, rank: usize) -> Vec<Mat2> {
    let dim = 2 * rank;
    let gauss = |rng: &mut R| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im) * FRAC_1_SQRT_2
    };
    // two orthonormal columns of length 2·rank (Gram–Schmidt, re-orthogonalised)
    let mut cols: [Vec<C64>; 2] = [Vec::new(), Vec::new()];
    for j in 0..2 {
        loop {
            let mut v: Vec<C64> = (0..dim).map(|_| gauss(rng)).collect();
            for _ in 0..2 {
                for prev in cols.iter().take(j) {
                    let ov: C64 = prev.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                    for (x, a) in v.iter_mut().zip(prev) {
                        *x -= ov * a;
                    }
                }
            }
            let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if n > 1e-8 {
                v.iter_mut().for_each(|z| *z /= n);
                cols[j] = v;
                break;
            }
        }
    }
    (0..rank)
        .map(|k| {
            let mut a = Mat2::zeros();
            for i in 0..2 {
                for j in 0..2 {
                    a.0[i][j] = cols[j][2 * k + i];
                }
            }
            a
        })
        .collect()
}

// ---------------------------------------------------------------------------

/// Trace preservation and complete positivity diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidationReport {
    /// `‖Σ A†A − I‖_F`
    pub tp_residual: f64,
    /// `λ_min` of the Choi matrix.
    pub cp_min_eigenvalue: f64,
    pub ok: bool,
}

pub fn validate(c: &KrausChannel, tol: f64) -> ValidationReport {
    let effect: Mat2 = c.kraus.iter().map(|a| a.adjoint() * *a).sum();
    let tp_residual = (effect - Mat2::identity()).frobenius_norm();
    let cp_min_eigenvalue = eig_hermitized(&choi_matrix(c)).min();
    ValidationReport { tp_residual, cp_min_eigenvalue, ok: tp_residual <= tol && cp_min_eigenvalue >= -tol }
}

/// The dual (Hilbert–Schmidt adjoint) map with Kraus operators `A_i†`.
pub fn dual(c: &KrausChannel) -> KrausChannel {
    let label = c.label.as_ref().map(|l| format!("dual({l})"));
    KrausChannel { kraus: c.kraus.iter().map(Mat2::adjoint).collect(), label, params: c.params.clone() }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unitality {
    pub unital: bool,
    /// `‖Λ(I) − I‖_F`
    pub deviation: f64,
}

pub fn is_unital(c: &KrausChannel, tol: f64) -> Unitality {
    let deviation = (apply(c, &Mat2::identity()) - Mat2::identity()).frobenius_norm();
    Unitality { unital: deviation < tol, deviation }
}

/// Unitality at the crate's standard tolerance.
pub fn unitality(c: &KrausChannel) -> Unitality {
    is_unital(c, UNITAL_TOL)
}

/// `Λ(ρ) = Σ A_i ρ A_i†`
pub fn apply(c: &KrausChannel, rho: &Mat2) -> Mat2 {
    c.kraus.iter().map(|a| *a * *rho * a.adjoint()).sum()
}

/// `(I ⊗ Λ)(ρ)` on a two-qubit operator.
pub fn apply_to_half(c: &KrausChannel, rho: &Mat4) -> Mat4 {
    c.kraus
        .iter()
        .map(|a| {
            let k = tensor_product(&Mat2::identity(), a);
            k * *rho * k.adjoint()
        })
        .sum()
}

/// `(I ⊗ Λ)(|ψ⟩⟨ψ|)` for a pure input, without forming the 4×4 projector product.
pub fn apply_to_half_pure(c: &KrausChannel, psi: &[C64; 4]) -> Mat4 {
    c.kraus
        .iter()
        .map(|a| {
            let v = [
                a.0[0][0] * psi[0] + a.0[0][1] * psi[1],
                a.0[1][0] * psi[0] + a.0[1][1] * psi[1],
                a.0[0][0] * psi[2] + a.0[0][1] * psi[3],
                a.0[1][0] * psi[2] + a.0[1][1] * psi[3],
            ];
            Mat4::outer(&v)
        })
        .sum()
}

pub(crate) fn choi_matrix(c: &KrausChannel) -> Mat4 {
    apply_to_half_pure(c, &crate::linalg::phi_plus())
}

// ---------------------------------------------------------------------------
// Bloch-sphere picture

/// Affine action `r ↦ T r + t` on Bloch vectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochRepresentation {
    pub t_matrix: [[f64; 3]; 3],
    pub translation: [f64; 3],
}

impl BlochRepresentation {
    pub fn apply_vector(&self, r: &[f64; 3]) -> [f64; 3] {
        let mut out = self.translation;
        for (i, o) in out.iter_mut().enumerate() {
            for j in 0..3 {
                *o += self.t_matrix[i][j] * r[j];
            }
        }
        out
    }
}

/// Bloch vector `r_i = Tr(σ_i ρ)`.
pub fn bloch_vector(rho: &Mat2) -> [f64; 3] {
    let s = paulis();
    [(s[0] * *rho).trace().re, (s[1] * *rho).trace().re, (s[2] * *rho).trace().re]
}

/// `(r₀ I + r·σ)/2`
pub fn from_bloch(r0: f64, r: &[f64; 3]) -> Mat2 {
    let s = paulis();
    (Mat2::identity().scale_real(r0) + s[0].scale_real(r[0]) + s[1].scale_real(r[1]) + s[2].scale_real(r[2]))
        .scale_real(0.5)
}

/// `T_ij = ½Tr(σ_i Λ(σ_j))`, `t_i = ½Tr(σ_i Λ(I))`.
pub fn bloch_representation(c: &KrausChannel) -> BlochRepresentation {
    let s = paulis();
    let mut t_matrix = [[0.0; 3]; 3];
    for j in 0..3 {
        let out = apply(c, &s[j]);
        for i in 0..3 {
            t_matrix[i][j] = 0.5 * (s[i] * out).trace().re;
        }
    }
    let img = apply(c, &Mat2::identity());
    let mut translation = [0.0; 3];
    for i in 0..3 {
        translation[i] = 0.5 * (s[i] * img).trace().re;
    }
    BlochRepresentation { t_matrix, translation }
}

/// `Λ = U₁ ∘ Λ' ∘ U₂` with `Λ'` diagonal in the Bloch picture.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CanonicalForm {
    pub u1: Mat2,
    pub u2: Mat2,
    /// Signed singular values of `T`; a reflection shows up as a negative `λ₃`.
    pub lambdas: [f64; 3],
    /// Translation in the canonical frame (`R₁ᵀ t`).
    pub translation: [f64; 3],
    pub r1: [[f64; 3]; 3],
    pub r2: [[f64; 3]; 3],
}

impl CanonicalForm {
    /// Evaluate `U₁ ∘ Λ' ∘ U₂` on a Hermitian operator.
    pub fn apply(&self, rho: &Mat2) -> Mat2 {
        let rotated = self.u2 * *rho * self.u2.adjoint();
        let r0 = rotated.trace().re;
        let r = bloch_vector(&rotated);
        let mut out = [0.0; 3];
        for i in 0..3 {
            out[i] = self.lambdas[i] * r[i] + r0 * self.translation[i];
        }
        let canon = from_bloch(r0, &out);
        self.u1 * canon * self.u1.adjoint()
    }
}

pub fn canonical_form(c: &KrausChannel) -> CanonicalForm {
    let bloch = bloch_representation(c);
    let t = bloch.t_matrix;
    let (mut u, mut sigma, mut v) = real_svd3(&t);
    if det3(&u) < 0.0 {
        for row in u.iter_mut() {
            row[2] = -row[2];
        }
        sigma[2] = -sigma[2];
    }
    if det3(&v) < 0.0 {
        for row in v.iter_mut() {
            row[2] = -row[2];
        }
        sigma[2] = -sigma[2];
    }
    let r1 = u;
    let r2 = transpose3(&v);
    let mut translation = [0.0; 3];
    for i in 0..3 {
        for k in 0..3 {
            translation[i] += r1[k][i] * bloch.translation[k];
        }
    }
    CanonicalForm { u1: su2_from_rotation(&r1), u2: su2_from_rotation(&r2), lambdas: sigma, translation, r1, r2 }
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn transpose3(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = m[j][i];
        }
    }
    t
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn unit_orthogonal(a: &[f64; 3]) -> [f64; 3] {
    // pick the axis least aligned with a
    let idx = (0..3).min_by(|&i, &j| a[i].abs().total_cmp(&a[j].abs())).unwrap_or(0);
    let mut e = [0.0; 3];
    e[idx] = 1.0;
    let c = cross(a, &e);
    let n = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    [c[0] / n, c[1] / n, c[2] / n]
}

/// `T = U diag(σ) Vᵀ` with σ descending, via the eigenproblem of `TᵀT`.
/// Returned `U`, `V` hold singular vectors as columns.
fn real_svd3(t: &[[f64; 3]; 3]) -> ([[f64; 3]; 3], [f64; 3], [[f64; 3]; 3]) {
    let mut ttt = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            ttt[i][j] = (0..3).map(|k| t[k][i] * t[k][j]).sum();
        }
    }
    let eig = eig_hermitized(&Mat3::from_real(ttt));
    let mut v = [[0.0; 3]; 3];
    let mut sigma = [0.0; 3];
    let mut ucols: Vec<[f64; 3]> = Vec::new();
    let scale = eig.values[0].max(0.0).sqrt().max(1.0);
    for k in 0..3 {
        let vk = [eig.vectors[k][0].re, eig.vectors[k][1].re, eig.vectors[k][2].re];
        for i in 0..3 {
            v[i][k] = vk[i];
        }
        let tv = [
            (0..3).map(|j| t[0][j] * vk[j]).sum::<f64>(),
            (0..3).map(|j| t[1][j] * vk[j]).sum::<f64>(),
            (0..3).map(|j| t[2][j] * vk[j]).sum::<f64>(),
        ];
        let s = (tv[0] * tv[0] + tv[1] * tv[1] + tv[2] * tv[2]).sqrt();
        sigma[k] = s;
        if s > 1e-12 * scale {
            ucols.push([tv[0] / s, tv[1] / s, tv[2] / s]);
        }
    }
    // complete U for (near) zero singular values, then re-orthonormalise
    match ucols.len() {
        0 => {
            ucols = vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        }
        1 => {
            let e2 = unit_orthogonal(&ucols[0]);
            let e3 = cross(&ucols[0], &e2);
            ucols.push(e2);
            ucols.push(e3);
        }
        2 => {
            let e3 = cross(&ucols[0], &ucols[1]);
            let n = (e3[0] * e3[0] + e3[1] * e3[1] + e3[2] * e3[2]).sqrt();
            ucols.push([e3[0] / n, e3[1] / n, e3[2] / n]);
        }
        _ => {}
    }
    let mut u = [[0.0; 3]; 3];
    for k in 0..3 {
        for i in 0..3 {
            u[i][k] = ucols[k][i];
        }
    }
    (u, sigma, v)
}

/// SU(2) element `U` with `U σ_j U† = Σ_i R_ij σ_i` for a proper rotation `R`.
pub fn su2_from_rotation(r: &[[f64; 3]; 3]) -> Mat2 {
    // Shepperd's method for the unit quaternion (w, x, y, z)
    let tr = r[0][0] + r[1][1] + r[2][2];
    let (w, x, y, z);
    if tr > 0.0 {
        let s = (tr + 1.0).sqrt() * 2.0;
        w = 0.25 * s;
        x = (r[2][1] - r[1][2]) / s;
        y = (r[0][2] - r[2][0]) / s;
        z = (r[1][0] - r[0][1]) / s;
    } else if r[0][0] > r[1][1] && r[0][0] > r[2][2] {
        let s = (1.0 + r[0][0] - r[1][1] - r[2][2]).sqrt() * 2.0;
        w = (r[2][1] - r[1][2]) / s;
        x = 0.25 * s;
        y = (r[0][1] + r[1][0]) / s;
        z = (r[0][2] + r[2][0]) / s;
    } else if r[1][1] > r[2][2] {
        let s = (1.0 + r[1][1] - r[0][0] - r[2][2]).sqrt() * 2.0;
        w = (r[0][2] - r[2][0]) / s;
        x = (r[0][1] + r[1][0]) / s;
        y = 0.25 * s;
        z = (r[1][2] + r[2][1]) / s;
    } else {
        let s = (1.0 + r[2][2] - r[0][0] - r[1][1]).sqrt() * 2.0;
        w = (r[1][0] - r[0][1]) / s;
        x = (r[0][2] + r[2][0]) / s;
        y = (r[1][2] + r[2][1]) / s;
        z = 0.25 * s;
    }
    let n = (w * w + x * x + y * y + z * z).sqrt();
    let (w, x, y, z) = (w / n, x / n, y / n, z / n);
    // U = w I − i (x σx + y σy + z σz)
    Mat2::from_rows([[C64::new(w, -z), C64::new(-y, -x)], [C64::new(y, -x), C64::new(w, z)]])
}

// ---------------------------------------------------------------------------

/// Trace-orthogonal Kraus operators `A_k = √p_k G_k` read off the spectral
/// decomposition of a Choi state, `|ψ_k⟩ = (I ⊗ G_k)|Φ⁺⟩`.
pub fn kraus_from_choi(choi: &ChoiState) -> Result<KrausChannel> {
    let marginal = partial_trace_second(choi.matrix());
    let dev = marginal.max_abs_diff(&Mat2::identity().scale_real(0.5));
    if dev > MARGINAL_TOL {
        return Err(Error::InvalidInput(format!("Choi marginal Tr_B deviates from I/2 by {dev:e}")));
    }
    let eig = choi.eig();
    let mut kraus = Vec::new();
    for k in 0..4 {
        let p = eig.values[k];
        if p <= KRAUS_RANK_CUTOFF {
            continue;
        }
        let psi = eig.vectors[k];
        let scale = (2.0 * p).sqrt();
        let mut a = Mat2::zeros();
        for i in 0..2 {
            for j in 0..2 {
                // ψ_{2i+j} = G_{ji}/√2
                a.0[j][i] = psi[2 * i + j] * scale;
            }
        }
        kraus.push(a);
    }
    if kraus.is_empty() {
        return Err(Error::InvalidInput("Choi matrix has no positive eigenvalue".into()));
    }
    let mut out = KrausChannel::unchecked(kraus);
    out.label = choi.source().map(str::to_string);
    Ok(out)
}

/// `max_{k,l} |Tr(A_k†A_l) − 2√(p_k p_l)δ_kl|` for Kraus operators extracted
/// from `choi`, with `p_k` the Choi eigenvalues in order.
pub fn trace_orthogonality_residual(choi: &ChoiState, kraus: &KrausChannel) -> f64 {
    let p: Vec<f64> = choi.eig().values.iter().copied().filter(|v| *v > KRAUS_RANK_CUTOFF).collect();
    if p.len() != kraus.kraus.len() {
        return f64::INFINITY;
    }
    let mut worst: f64 = 0.0;
    for (k, ak) in kraus.kraus.iter().enumerate() {
        for (l, al) in kraus.kraus.iter().enumerate() {
            let g = (ak.adjoint() * *al).trace();
            let expected = if k == l { 2.0 * (p[k] * p[l]).sqrt() } else { 0.0 };
            worst = worst.max((g - C64::new(expected, 0.0)).norm());
        }
    }
    worst
}
