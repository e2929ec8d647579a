//! Fixed-size dense complex linear algebra for qubit (2×2) and two-qubit
//! (4×4) operators.
//!
//! Basis ordering is `|00⟩, |01⟩, |10⟩, |11⟩` everywhere: the first tensor
//! factor (Alice) is the most significant index. Nothing in the crate uses a
//! different ordering.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerances::{EIGEN_TIE_TOL, JACOBI_OFF_TOL};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense square complex matrix stored row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix<const N: usize>(pub [[C64; N]; N]);

pub type Mat2 = Matrix<2>;
pub type Mat3 = Matrix<3>;
pub type Mat4 = Matrix<4>;

/// Complex column vector.
pub type Vector<const N: usize> = [C64; N];
pub type Vec2 = Vector<2>;
pub type Vec4 = Vector<4>;

impl<const N: usize> Default for Matrix<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> Matrix<N> {
    pub const fn zeros() -> Self {
        Matrix([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_rows(rows: [[C64; N]; N]) -> Self {
        Matrix(rows)
    }

    pub fn from_real(rows: [[f64; N]; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = C64::new(rows[i][j], 0.0);
            }
        }
        m
    }

    pub fn diag_real(d: [f64; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = C64::new(d[i], 0.0);
        }
        m
    }

    /// `|v⟩⟨v|`
    pub fn outer(v: &Vector<N>) -> Self {
        Self::outer2(v, v)
    }

    /// `|a⟩⟨b|`
    pub fn outer2(a: &Vector<N>, b: &Vector<N>) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = a[i] * b[j].conj();
            }
        }
        m
    }

    pub const fn dim(&self) -> usize {
        N
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[j][i];
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for z in row.iter_mut() {
                *z = f(*z);
            }
        }
        m
    }

    /// Entrywise real part, as a complex matrix with zero imaginary parts.
    pub fn real_part(&self) -> Self {
        self.map(|z| C64::new(z.re, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().flat_map(|r| r.iter()).map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..N {
            for j in 0..N {
                d = d.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        d
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// Hermitian and every eigenvalue `≥ −tol`.
    pub fn is_psd(&self, tol: f64) -> bool {
        match hermitian_eig(self, tol) {
            Ok(e) => e.min() >= -tol,
            Err(_) => false,
        }
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (self.adjoint() * *self).max_abs_diff(&Self::identity()) <= tol
    }

    /// `½(M + M†)`
    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale_real(0.5)
    }

    pub fn mul_vec(&self, v: &Vector<N>) -> Vector<N> {
        let mut out = [ZERO; N];
        for i in 0..N {
            let mut acc = ZERO;
            for j in 0..N {
                acc += self.0[i][j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// `⟨v|M|v⟩`
    pub fn expectation(&self, v: &Vector<N>) -> C64 {
        inner(v, &self.mul_vec(v))
    }

    pub fn column(&self, j: usize) -> Vector<N> {
        let mut c = [ZERO; N];
        for i in 0..N {
            c[i] = self.0[i][j];
        }
        c
    }

    pub fn from_columns(cols: &[Vector<N>; N]) -> Self {
        let mut m = Self::zeros();
        for j in 0..N {
            for i in 0..N {
                m.0[i][j] = cols[j][i];
            }
        }
        m
    }
}

impl<const N: usize> Index<(usize, usize)> for Matrix<N> {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for Matrix<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl<const N: usize> Mul for Matrix<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..N {
                    m.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        m
    }
}

impl<const N: usize> Add for Matrix<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut m = self;
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] += rhs.0[i][j];
            }
        }
        m
    }
}

impl<const N: usize> Sub for Matrix<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut m = self;
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] -= rhs.0[i][j];
            }
        }
        m
    }
}

impl<const N: usize> Neg for Matrix<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|z| -z)
    }
}

impl<const N: usize> std::iter::Sum for Matrix<N> {
    fn sum<It: Iterator<Item = Self>>(iter: It) -> Self {
        iter.fold(Self::zeros(), |a, b| a + b)
    }
}

/// `⟨a|b⟩`
pub fn inner<const N: usize>(a: &Vector<N>, b: &Vector<N>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm<const N: usize>(v: &Vector<N>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalize<const N: usize>(v: &Vector<N>) -> Vector<N> {
    let n = norm(v);
    let mut out = *v;
    for z in out.iter_mut() {
        *z /= n;
    }
    out
}

pub fn conj_vec<const N: usize>(v: &Vector<N>) -> Vector<N> {
    let mut out = *v;
    for z in out.iter_mut() {
        *z = z.conj();
    }
    out
}

// ---------------------------------------------------------------------------
// Fixed operators

pub fn pauli_x() -> Mat2 {
    Mat2::from_real([[0.0, 1.0], [1.0, 0.0]])
}

pub fn pauli_y() -> Mat2 {
    Mat2::from_rows([[ZERO, -I], [I, ZERO]])
}

pub fn pauli_z() -> Mat2 {
    Mat2::from_real([[1.0, 0.0], [0.0, -1.0]])
}

/// `[σ_x, σ_y, σ_z]`
pub fn paulis() -> [Mat2; 3] {
    [pauli_x(), pauli_y(), pauli_z()]
}

/// `|Φ⁺⟩ = (|00⟩ + |11⟩)/√2`
pub fn phi_plus() -> Vec4 {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    [h, ZERO, ZERO, h]
}

/// The swap operator `V|ij⟩ = |ji⟩`.
pub fn swap() -> Mat4 {
    let mut v = Mat4::zeros();
    for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        v.0[i][j] = ONE;
    }
    v
}

/// Unitary whose columns are `|Φ⁺⟩, i|Φ⁻⟩, i|Ψ⁺⟩, |Ψ⁻⟩`.
pub fn magic_basis() -> Mat4 {
    let h = FRAC_1_SQRT_2;
    let r = |x: f64| C64::new(x, 0.0);
    let im = |x: f64| C64::new(0.0, x);
    Mat4::from_rows([
        [r(h), im(h), ZERO, ZERO],
        [ZERO, ZERO, im(h), r(h)],
        [ZERO, ZERO, im(h), r(-h)],
        [r(h), im(-h), ZERO, ZERO],
    ])
}

// ---------------------------------------------------------------------------
// Two-qubit structure

/// Kronecker product `a ⊗ b` in computational-basis ordering.
pub fn tensor_product(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut m = Mat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    m.0[2 * i + k][2 * j + l] = a.0[i][j] * b.0[k][l];
                }
            }
        }
    }
    m
}

pub fn tensor_vec(a: &Vec2, b: &Vec2) -> Vec4 {
    [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
}

/// Tensor factor a partial operation acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Block-wise transpose on one tensor factor.
pub fn partial_transpose(m: &Mat4, subsystem: Subsystem) -> Mat4 {
    let mut out = Mat4::zeros();
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for d in 0..2 {
                    let v = m.0[2 * a + b][2 * c + d];
                    match subsystem {
                        Subsystem::First => out.0[2 * c + b][2 * a + d] = v,
                        Subsystem::Second => out.0[2 * a + d][2 * c + b] = v,
                    }
                }
            }
        }
    }
    out
}

/// `Tr_B(m)`: the reduced operator on the first factor.
pub fn partial_trace_second(m: &Mat4) -> Mat2 {
    let mut out = Mat2::zeros();
    for a in 0..2 {
        for c in 0..2 {
            out.0[a][c] = m.0[2 * a][2 * c] + m.0[2 * a + 1][2 * c + 1];
        }
    }
    out
}

/// `Tr_A(m)`: the reduced operator on the second factor.
pub fn partial_trace_first(m: &Mat4) -> Mat2 {
    let mut out = Mat2::zeros();
    for b in 0..2 {
        for d in 0..2 {
            out.0[b][d] = m.0[b][d] + m.0[2 + b][2 + d];
        }
    }
    out
}

/// `(V† m V)*` with `V` the swap, conjugation in the computational basis.
pub fn swap_conjugate(m: &Mat4) -> Mat4 {
    const PERM: [usize; 4] = [0, 2, 1, 3];
    let mut out = Mat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            out.0[i][j] = m.0[PERM[i]][PERM[j]].conj();
        }
    }
    out
}

/// `M† m M` for the magic basis `M`.
pub fn to_magic_basis(m: &Mat4) -> Mat4 {
    let b = magic_basis();
    b.adjoint() * *m * b
}

/// `Re(M† m M)` as a real matrix, using the two-entry sparsity of each
/// magic-basis column.
pub fn magic_real_part(m: &Mat4) -> [[f64; 4]; 4] {
    let h = FRAC_1_SQRT_2;
    let cols: [[(usize, C64); 2]; 4] = [
        [(0, C64::new(h, 0.0)), (3, C64::new(h, 0.0))],
        [(0, C64::new(0.0, h)), (3, C64::new(0.0, -h))],
        [(1, C64::new(0.0, h)), (2, C64::new(0.0, h))],
        [(1, C64::new(h, 0.0)), (2, C64::new(-h, 0.0))],
    ];
    let mut out = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in a..4 {
            let mut acc = ZERO;
            for &(i, ci) in &cols[a] {
                for &(j, cj) in &cols[b] {
                    acc += ci.conj() * m.0[i][j] * cj;
                }
            }
            out[a][b] = acc.re;
            out[b][a] = acc.re;
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Parameterised unitaries

/// `R_z(α) R_y(β) R_z(γ)` with `R_z(a) = diag(e^{−ia/2}, e^{ia/2})`.
pub fn su2_euler(alpha: f64, beta: f64, gamma: f64) -> Mat2 {
    let (sb, cb) = (0.5 * beta).sin_cos();
    let p = C64::from_polar(1.0, -0.5 * (alpha + gamma));
    let q = C64::from_polar(1.0, -0.5 * (alpha - gamma));
    Mat2::from_rows([[p * cb, -q * sb], [q.conj() * sb, p.conj() * cb]])
}

/// Unitary whose first column is the Bloch-sphere point `(θ, φ)`.
///
/// Every `U ∈ U(2)` equals `sphere_unitary(θ, φ)` times a diagonal phase.
pub fn sphere_unitary(theta: f64, phi: f64) -> Mat2 {
    let (s, c) = (0.5 * theta).sin_cos();
    let e = C64::from_polar(1.0, phi);
    Mat2::from_rows([[C64::new(c, 0.0), -e.conj() * s], [e * s, C64::new(c, 0.0)]])
}

// ---------------------------------------------------------------------------
// Hermitian eigensolver

/// Spectral decomposition with eigenvalues sorted descending.
///
/// `vectors[k]` is the unit eigenvector for `values[k]`; its largest-magnitude
/// component is real and non-negative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenDecomposition<const N: usize> {
    pub values: [f64; N],
    pub vectors: [Vector<N>; N],
}

impl<const N: usize> EigenDecomposition<N> {
    pub fn max(&self) -> f64 {
        self.values[0]
    }

    pub fn min(&self) -> f64 {
        self.values[N - 1]
    }

    /// `Σ λ_k v_k v_k†`
    pub fn reconstruct(&self) -> Matrix<N> {
        (0..N).map(|k| Matrix::outer(&self.vectors[k]).scale_real(self.values[k])).sum()
    }

    /// Eigenvalues grouped into runs whose consecutive gaps are below `gap`.
    pub fn clusters(&self, gap: f64) -> Vec<std::ops::Range<usize>> {
        let mut out = Vec::new();
        let mut start = 0;
        for k in 1..=N {
            if k == N || self.values[k - 1] - self.values[k] >= gap {
                out.push(start..k);
                start = k;
            }
        }
        out
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Rejects inputs whose Hermiticity deviation exceeds `tol`. Output is a pure
/// function of the input bits.
pub fn hermitian_eig<const N: usize>(m: &Matrix<N>, tol: f64) -> Result<EigenDecomposition<N>> {
    let deviation = m.hermiticity_deviation();
    if !(deviation <= tol) {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(eig_hermitized(m))
}

/// Eigendecomposition of `½(m + m†)` without the Hermiticity check.
pub(crate) fn eig_hermitized<const N: usize>(m: &Matrix<N>) -> EigenDecomposition<N> {
    let (a, v) = jacobi(m.hermitian_part(), true);
    let mut vectors = [[ZERO; N]; N];
    let mut values = [0.0; N];
    for k in 0..N {
        values[k] = a.0[k][k].re;
        vectors[k] = fix_phase(&v.column(k));
    }
    sort_spectrum(values, vectors)
}

/// Eigenvalues only, sorted descending.
pub fn hermitian_eigenvalues<const N: usize>(m: &Matrix<N>) -> [f64; N] {
    let (a, _) = jacobi(m.hermitian_part(), false);
    let mut values = [0.0; N];
    for k in 0..N {
        values[k] = a.0[k][k].re;
    }
    values.sort_by(|x, y| y.total_cmp(x));
    values
}

fn off_norm<const N: usize>(a: &Matrix<N>) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        for j in 0..N {
            if i != j {
                s += a.0[i][j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi<const N: usize>(mut a: Matrix<N>, want_vectors: bool) -> (Matrix<N>, Matrix<N>) {
    let mut v = Matrix::<N>::identity();
    let scale = a.frobenius_norm().max(1.0);
    for _sweep in 0..64 {
        if off_norm(&a) < JACOBI_OFF_TOL * scale {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a.0[p][q];
                let r = apq.norm();
                if r < 1e-300 {
                    continue;
                }
                // J = diag(1, e^{-iφ}) · [[c, s], [−s, c]] zeroes a_pq.
                let phase = apq / r;
                let theta = (a.0[q][q].re - a.0[p][p].re) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let jpp = C64::new(c, 0.0);
                let jpq = C64::new(s, 0.0);
                let jqp = -phase.conj() * s;
                let jqq = phase.conj() * c;
                for k in 0..N {
                    let akp = a.0[k][p];
                    let akq = a.0[k][q];
                    a.0[k][p] = akp * jpp + akq * jqp;
                    a.0[k][q] = akp * jpq + akq * jqq;
                }
                for k in 0..N {
                    let apk = a.0[p][k];
                    let aqk = a.0[q][k];
                    a.0[p][k] = jpp.conj() * apk + jqp.conj() * aqk;
                    a.0[q][k] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a.0[p][q] = ZERO;
                a.0[q][p] = ZERO;
                a.0[p][p].im = 0.0;
                a.0[q][q].im = 0.0;
                if want_vectors {
                    for k in 0..N {
                        let vkp = v.0[k][p];
                        let vkq = v.0[k][q];
                        v.0[k][p] = vkp * jpp + vkq * jqp;
                        v.0[k][q] = vkp * jpq + vkq * jqq;
                    }
                }
            }
        }
    }
    (a, v)
}

/// Rotate the global phase so the largest-magnitude component is real ≥ 0.
pub fn fix_phase<const N: usize>(v: &Vector<N>) -> Vector<N> {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return *v;
    }
    // first index within rounding of the maximum, so near-ties are stable
    let idx = v.iter().position(|z| z.norm() >= max - 1e-12).unwrap_or(0);
    let ph = v[idx].conj() / v[idx].norm();
    let mut out = *v;
    for z in out.iter_mut() {
        *z *= ph;
    }
    out
}

fn rounded_key<const N: usize>(v: &Vector<N>) -> Vec<i64> {
    v.iter().flat_map(|z| [(z.re * 1e9).round() as i64, (z.im * 1e9).round() as i64]).collect()
}

fn sort_spectrum<const N: usize>(values: [f64; N], vectors: [Vector<N>; N]) -> EigenDecomposition<N> {
    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    // within runs of tied eigenvalues, descending lexicographic key
    let mut start = 0;
    while start < N {
        let mut end = start + 1;
        while end < N && values[order[end - 1]] - values[order[end]] <= EIGEN_TIE_TOL {
            end += 1;
        }
        order[start..end].sort_by(|&i, &j| rounded_key(&vectors[j]).cmp(&rounded_key(&vectors[i])));
        start = end;
    }
    let mut out = EigenDecomposition { values: [0.0; N], vectors: [[ZERO; N]; N] };
    for (k, &i) in order.iter().enumerate() {
        out.values[k] = values[i];
        out.vectors[k] = vectors[i];
    }
    out
}

/// Eigenvalues of a real symmetric matrix (cyclic Jacobi), sorted descending.
pub fn symmetric_eigenvalues<const N: usize>(mut a: [[f64; N]; N]) -> [f64; N] {
    let scale = a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
    for _sweep in 0..64 {
        let off: f64 = (0..N)
            .flat_map(|i| (0..N).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off < JACOBI_OFF_TOL * scale {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a[p][q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..N {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..N {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                a[p][q] = 0.0;
                a[q][p] = 0.0;
            }
        }
    }
    let mut values = [0.0; N];
    for k in 0..N {
        values[k] = a[k][k];
    }
    values.sort_by(|x, y| y.total_cmp(x));
    values
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_tensor_identity() {
        assert_eq!(tensor_product(&Mat2::identity(), &Mat2::identity()), Mat4::identity());
    }

    #[test]
    fn sigma_z_tensor_identity_is_diagonal() {
        let m = tensor_product(&pauli_z(), &Mat2::identity());
        assert_eq!(m, Mat4::diag_real([1.0, 1.0, -1.0, -1.0]));
    }

    #[test]
    fn xx_fixes_phi_plus() {
        let xx = tensor_product(&pauli_x(), &pauli_x());
        let out = xx.mul_vec(&phi_plus());
        for (a, b) in out.iter().zip(phi_plus().iter()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn diagonal_eig_keeps_order() {
        let m = Mat4::diag_real([0.7, 0.1, 0.1, 0.1]);
        let e = hermitian_eig(&m, 1e-12).unwrap();
        assert_eq!(e.values, [0.7, 0.1, 0.1, 0.1]);
        for k in 0..4 {
            assert!((e.vectors[k][k] - ONE).norm() < 1e-15);
        }
    }

    #[test]
    fn bell_projector_eig() {
        let p = Mat4::outer(&phi_plus());
        let e = hermitian_eig(&p, 1e-12).unwrap();
        let expected = [1.0, 0.0, 0.0, 0.0];
        for k in 0..4 {
            assert!((e.values[k] - expected[k]).abs() < 1e-14);
        }
        assert!((inner(&e.vectors[0], &phi_plus()).norm() - 1.0).abs() < 1e-14);
        assert!(e.vectors[0][0].im.abs() < 1e-15 && e.vectors[0][0].re > 0.0);
    }

    #[test]
    fn amplitude_damping_choi_top_eigenvalue() {
        // ½{{1,0,0,√½},{0,0,0,0},{0,0,½,0},{√½,0,0,½}}
        let s = 0.5f64.sqrt();
        let j = Mat4::from_real([
            [0.5, 0.0, 0.0, 0.5 * s],
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.25, 0.0],
            [0.5 * s, 0.0, 0.0, 0.25],
        ]);
        let e = hermitian_eig(&j, 1e-12).unwrap();
        // characteristic polynomial of ½{{1,√½},{√½,½}}: λ² − ¾λ + 0 → λ = ¾
        assert!((e.max() - 0.75).abs() < 1e-14);
        assert!((partial_transpose_min(&j) + 0.25).abs() < 1e-14);
    }

    fn partial_transpose_min(m: &Mat4) -> f64 {
        hermitian_eig(&partial_transpose(m, Subsystem::First), 1e-12).unwrap().min()
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = Mat2::from_rows([[ONE, ONE], [ZERO, ONE]]);
        assert!(matches!(hermitian_eig(&m, 1e-9), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn complex_hermitian_2x2() {
        // σ_y has eigenvalues ±1 with eigenvectors (1, ±i)/√2
        let e = hermitian_eig(&pauli_y(), 1e-12).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-15);
        assert!((e.values[1] + 1.0).abs() < 1e-15);
        let r = e.reconstruct();
        assert!(r.max_abs_diff(&pauli_y()) < 1e-15);
    }

    #[test]
    fn partial_transpose_examples() {
        let mixed = Mat4::identity().scale_real(0.25);
        assert_eq!(partial_transpose(&mixed, Subsystem::First), mixed);

        let p = Mat4::outer(&phi_plus());
        let e = hermitian_eig(&partial_transpose(&p, Subsystem::First), 1e-12).unwrap();
        let expected = [0.5, 0.5, 0.5, -0.5];
        for k in 0..4 {
            assert!((e.values[k] - expected[k]).abs() < 1e-14);
        }
        // same spectrum on the other side
        let e2 = hermitian_eig(&partial_transpose(&p, Subsystem::Second), 1e-12).unwrap();
        assert_eq!(e.values, e2.values);
    }

    #[test]
    fn swap_conjugate_fixed_points() {
        assert_eq!(swap_conjugate(&Mat4::identity()), Mat4::identity());
        let p = Mat4::outer(&phi_plus());
        assert!(swap_conjugate(&p).max_abs_diff(&p) < 1e-16);
    }

    #[test]
    fn swap_conjugate_matches_definition() {
        let mut m = Mat4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = c((i * 4 + j) as f64, (j as f64) - (i as f64) * 0.5);
            }
        }
        let v = swap();
        let direct = (v.adjoint() * m * v).conj();
        assert_eq!(swap_conjugate(&m), direct);
    }

    #[test]
    fn magic_basis_is_unitary() {
        assert!(magic_basis().is_unitary(1e-15));
        assert!(to_magic_basis(&Mat4::identity()).max_abs_diff(&Mat4::identity()) < 1e-15);
        let m = to_magic_basis(&Mat4::outer(&phi_plus()));
        assert!(m.max_abs_diff(&Mat4::diag_real([1.0, 0.0, 0.0, 0.0])) < 1e-15);
    }

    #[test]
    fn su2_euler_is_special_unitary() {
        let u = su2_euler(0.3, 1.1, -2.0);
        assert!(u.is_unitary(1e-14));
        let det = u.0[0][0] * u.0[1][1] - u.0[0][1] * u.0[1][0];
        assert!((det - ONE).norm() < 1e-14);
        assert!(sphere_unitary(0.7, 2.5).is_unitary(1e-14));
    }

    #[test]
    fn partial_traces() {
        let a = Mat2::from_real([[0.3, 0.1], [0.1, 0.7]]);
        let b = Mat2::from_real([[0.6, 0.0], [0.0, 0.4]]);
        let m = tensor_product(&a, &b);
        assert!(partial_trace_second(&m).max_abs_diff(&a) < 1e-15);
        assert!(partial_trace_first(&m).max_abs_diff(&b) < 1e-15);
    }

    #[test]
    fn magic_real_part_matches_dense() {
        let m = Mat4::from_rows([
            [c(0.3, 0.0), c(0.1, 0.2), c(-0.05, 0.1), c(0.2, -0.1)],
            [c(0.1, -0.2), c(0.2, 0.0), c(0.03, 0.0), c(0.0, 0.07)],
            [c(-0.05, -0.1), c(0.03, 0.0), c(0.25, 0.0), c(0.1, 0.1)],
            [c(0.2, 0.1), c(0.0, -0.07), c(0.1, -0.1), c(0.25, 0.0)],
        ]);
        let dense = to_magic_basis(&m);
        let sparse = magic_real_part(&m);
        for i in 0..4 {
            for j in 0..4 {
                assert!((dense.0[i][j].re - sparse[i][j]).abs() < 1e-15);
            }
        }
        let a = hermitian_eigenvalues(&dense.real_part());
        let b = symmetric_eigenvalues(sparse);
        for k in 0..4 {
            assert!((a[k] - b[k]).abs() < 1e-13);
        }
    }
}
