//! Fixed-size complex linear algebra for one- and two-qubit operators.
//!
//! Everything here works on stack arrays: `Mat<2>`/`Mat<4>` and `Ket<2>`/`Ket<4>`.
//! The Hermitian eigensolver is a cyclic complex Jacobi iteration, which is
//! plenty accurate (and fully deterministic) at these sizes. Matrix functions,
//! range-restricted pseudo-inverses and the partial transpose are all built
//! on top of it.
//!
//! Basis order for two qubits is `|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩` with `σ_z|↑⟩ = +|↑⟩`,
//! i.e. index `2·a + b` for qubit values `a, b ∈ {0, 1}`.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;
use thiserror::Error;

pub type C64 = Complex64;

/// Relative threshold below which an eigenvalue is treated as zero in every
/// rank decision of the crate.
pub const RANK_TOL: f64 = 1e-9;

/// Eigenvalues in `[-CLAMP_TOL, 0)` are clamped to zero by the PSD matrix functions.
pub const CLAMP_TOL: f64 = 1e-10;

/// Default relative Hermiticity tolerance used by the PSD matrix functions.
pub const HERMITIAN_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatError {
    #[error("matrix is not Hermitian (relative anti-Hermitian part {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("matrix has eigenvalue {value:.3e} below the PSD clamp window")]
    NegativeEigenvalue { value: f64 },
    #[error("vector has zero norm")]
    ZeroNorm,
    #[error("non-finite entry")]
    NonFinite,
}

#[inline]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub(crate) fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Dense `N×N` complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat<const N: usize>(pub [[C64; N]; N]);

pub type Mat2 = Mat<2>;
pub type Mat4 = Mat<4>;

/// Unit-norm complex amplitude vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ket<const N: usize>([C64; N]);

pub type Ket2 = Ket<2>;
pub type Ket4 = Ket<4>;

impl<const N: usize> Mat<N> {
    pub fn zeros() -> Self {
        Mat([[C64::new(0.0, 0.0); N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = cr(1.0);
        }
        m
    }

    pub fn from_real_diag(d: [f64; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = cr(d[i]);
        }
        m
    }

    pub fn from_real(rows: [[f64; N]; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = cr(rows[i][j]);
            }
        }
        m
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
        let mut m = *self;
        for row in m.0.iter_mut() {
            for z in row.iter_mut() {
                *z = z.conj();
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        self.scale_c(cr(s))
    }

    pub fn scale_c(&self, s: C64) -> Self {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for z in row.iter_mut() {
                *z *= s;
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flat_map(|r| r.iter()).all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `‖m − m†‖_F / ‖m‖_F` (zero for the zero matrix).
    pub fn hermiticity_residual(&self) -> f64 {
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            return 0.0;
        }
        (*self - self.adjoint()).frobenius_norm() / norm
    }

    /// `(m + m†)/2`.
    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale(0.5)
    }

    pub fn mul_ket(&self, v: &Ket<N>) -> [C64; N] {
        let mut out = [C64::new(0.0, 0.0); N];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..N).map(|j| self.0[i][j] * v.0[j]).sum();
        }
        out
    }

    /// `⟨a|M|b⟩`.
    pub fn sandwich(&self, a: &Ket<N>, b: &Ket<N>) -> C64 {
        let mb = self.mul_ket(b);
        (0..N).map(|i| a.0[i].conj() * mb[i]).sum()
    }

    /// `⟨v|M|v⟩`, real part only (exact for Hermitian `M`).
    pub fn expectation(&self, v: &Ket<N>) -> f64 {
        self.sandwich(v, v).re
    }

    /// `U M U†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        *u * *self * u.adjoint()
    }
}

impl<const N: usize> Default for Mat<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> Index<(usize, usize)> for Mat<N> {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for Mat<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl<const N: usize> Add for Mat<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl<const N: usize> AddAssign for Mat<N> {
    fn add_assign(&mut self, rhs: Self) {
        for i in 0..N {
            for j in 0..N {
                self.0[i][j] += rhs.0[i][j];
            }
        }
    }
}

impl<const N: usize> Sub for Mat<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.0[i][j] -= rhs.0[i][j];
            }
        }
        self
    }
}

impl<const N: usize> Neg for Mat<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl<const N: usize> Mul for Mat<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a.re == 0.0 && a.im == 0.0 {
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

impl<const N: usize> Serialize for Mat<N> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(N))?;
        for row in &self.0 {
            let r: Vec<[f64; 2]> = row.iter().map(|z| [z.re, z.im]).collect();
            seq.serialize_element(&r)?;
        }
        seq.end()
    }
}

impl<const N: usize> Ket<N> {
    /// Normalizes `amps` to unit norm.
    pub fn new(amps: [C64; N]) -> Result<Self, MatError> {
        if amps.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(MatError::NonFinite);
        }
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(MatError::ZeroNorm);
        }
        Ok(Ket(amps.map(|z| z / norm)))
    }

    pub fn from_real(amps: [f64; N]) -> Result<Self, MatError> {
        Self::new(amps.map(cr))
    }

    /// Computational basis vector `|k⟩`.
    pub fn basis(k: usize) -> Self {
        let mut a = [C64::new(0.0, 0.0); N];
        a[k] = cr(1.0);
        Ket(a)
    }

    /// Wraps amplitudes already known to be normalized.
    pub(crate) fn from_unit(amps: [C64; N]) -> Self {
        Ket(amps)
    }

    pub fn amplitudes(&self) -> &[C64; N] {
        &self.0
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C64 {
        (0..N).map(|i| self.0[i].conj() * other.0[i]).sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Projector `|v⟩⟨v|`.
    pub fn projector(&self) -> Mat<N> {
        self.outer(self)
    }

    /// `|self⟩⟨other|`.
    pub fn outer(&self, other: &Self) -> Mat<N> {
        let mut m = Mat::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[i] * other.0[j].conj();
            }
        }
        m
    }

    /// Applies `m` and renormalizes.
    pub fn apply(&self, m: &Mat<N>) -> Result<Self, MatError> {
        Self::new(m.mul_ket(self))
    }

    pub fn scale_phase(&self, phase: C64) -> Self {
        Ket(self.0.map(|z| z * phase))
    }
}

impl Ket4 {
    /// Twice the modulus of the 2×2 coefficient determinant; zero iff the
    /// ket is a product state (Schmidt rank 1).
    pub fn concurrence(&self) -> f64 {
        let a = &self.0;
        2.0 * (a[0] * a[3] - a[1] * a[2]).norm()
    }

    pub fn is_product(&self, tol: f64) -> bool {
        self.concurrence() <= tol
    }
}

impl<const N: usize> Serialize for Ket<N> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(N))?;
        for z in &self.0 {
            seq.serialize_element(&[z.re, z.im])?;
        }
        seq.end()
    }
}

pub fn pauli_x() -> Mat2 {
    Mat::from_real([[0.0, 1.0], [1.0, 0.0]])
}

pub fn pauli_y() -> Mat2 {
    Mat([[cr(0.0), c(0.0, -1.0)], [c(0.0, 1.0), cr(0.0)]])
}

pub fn pauli_z() -> Mat2 {
    Mat::from_real([[1.0, 0.0], [0.0, -1.0]])
}

/// `[σ_x, σ_y, σ_z]`.
pub fn paulis() -> [Mat2; 3] {
    [pauli_x(), pauli_y(), pauli_z()]
}

/// `n·σ` for a real 3-vector `n`.
pub fn pauli_dot(n: [f64; 3]) -> Mat2 {
    let [x, y, z] = paulis();
    x.scale(n[0]) + y.scale(n[1]) + z.scale(n[2])
}

/// Kronecker product `a ⊗ b` in the `|ab⟩ = 2a + b` ordering.
pub fn tensor(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut m = Mat4::zeros();
    for ia in 0..2 {
        for ja in 0..2 {
            for ib in 0..2 {
                for jb in 0..2 {
                    m.0[2 * ia + ib][2 * ja + jb] = a.0[ia][ja] * b.0[ib][jb];
                }
            }
        }
    }
    m
}

pub fn tensor_ket(a: &Ket2, b: &Ket2) -> Ket4 {
    let (a, b) = (a.0, b.0);
    Ket::from_unit([a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]])
}

/// Transpose on the second tensor factor.
pub fn partial_transpose_b(m: &Mat4) -> Mat4 {
    let mut out = Mat4::zeros();
    for ia in 0..2 {
        for ib in 0..2 {
            for ja in 0..2 {
                for jb in 0..2 {
                    out.0[2 * ia + ib][2 * ja + jb] = m.0[2 * ia + jb][2 * ja + ib];
                }
            }
        }
    }
    out
}

/// Spectral decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone, Copy)]
pub struct HermEigen<const N: usize> {
    pub values: [f64; N],
    pub vectors: [Ket<N>; N],
}

impl<const N: usize> HermEigen<N> {
    /// `Σ f(λ_k) |v_k⟩⟨v_k|`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Mat<N> {
        let mut m = Mat::zeros();
        for k in 0..N {
            let w = f(self.values[k]);
            if w != 0.0 {
                m += self.vectors[k].projector().scale(w);
            }
        }
        m
    }

    pub fn reconstruct(&self) -> Mat<N> {
        self.map(|x| x)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }
}

/// Hermitian eigendecomposition; rejects inputs whose anti-Hermitian part
/// exceeds `tol` relative to `‖m‖_F`.
pub fn herm_eigen<const N: usize>(m: &Mat<N>, tol: f64) -> Result<HermEigen<N>, MatError> {
    if !m.is_finite() {
        return Err(MatError::NonFinite);
    }
    let residual = m.hermiticity_residual();
    if residual > tol {
        return Err(MatError::NotHermitian { residual });
    }
    Ok(eigh(&m.hermitian_part()))
}

/// Eigendecomposition of a matrix already known to be Hermitian.
pub(crate) fn eigh<const N: usize>(m: &Mat<N>) -> HermEigen<N> {
    let mut a = m.0;
    let mut v = Mat::<N>::identity().0;
    jacobi(&mut a, Some(&mut v));
    let mut order: [usize; N] = std::array::from_fn(|i| i);
    order.sort_by(|&i, &j| a[i][i].re.total_cmp(&a[j][j].re));
    let values = order.map(|k| a[k][k].re);
    let vectors = order.map(|k| Ket(std::array::from_fn(|i| v[i][k])));
    HermEigen { values, vectors }
}

/// Eigenvalues only, ascending. Skips eigenvector accumulation.
pub fn eigvalsh<const N: usize>(m: &Mat<N>) -> [f64; N] {
    let mut a = m.hermitian_part().0;
    jacobi(&mut a, None);
    let mut vals: [f64; N] = std::array::from_fn(|i| a[i][i].re);
    vals.sort_by(f64::total_cmp);
    vals
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue<const N: usize>(m: &Mat<N>) -> f64 {
    eigvalsh(m)[0]
}

// Cyclic complex Jacobi. Each rotation J = D·R·D† with D a diagonal phase and
// R a real plane rotation zeroes a[p][q]; A ← J†AJ, V ← VJ.
fn jacobi<const N: usize>(a: &mut [[C64; N]; N], mut v: Option<&mut [[C64; N]; N]>) {
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt();
    if scale == 0.0 {
        return;
    }
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..N {
            for q in (p + 1)..N {
                off += a[p][q].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-20 * scale {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a[p][q];
                let g = apq.norm();
                if g <= 1e-300 {
                    continue;
                }
                let phase = apq / g;
                let theta = (a[q][q].re - a[p][p].re) / (2.0 * g);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                let jpq = phase * sn;
                let jqp = -phase.conj() * sn;
                // columns: A ← A J
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = akp * cs + akq * jqp;
                    row[q] = akp * jpq + akq * cs;
                }
                // rows: A ← J† A
                for k in 0..N {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = apk * cs + aqk * jqp.conj();
                    a[q][k] = apk * jpq.conj() + aqk * cs;
                }
                a[p][q] = C64::new(0.0, 0.0);
                a[q][p] = C64::new(0.0, 0.0);
                a[p][p].im = 0.0;
                a[q][q].im = 0.0;
                if let Some(v) = v.as_deref_mut() {
                    for row in v.iter_mut() {
                        let (vkp, vkq) = (row[p], row[q]);
                        row[p] = vkp * cs + vkq * jqp;
                        row[q] = vkp * jpq + vkq * cs;
                    }
                }
            }
        }
    }
}

fn psd_eigen<const N: usize>(m: &Mat<N>) -> Result<HermEigen<N>, MatError> {
    let mut e = herm_eigen(m, HERMITIAN_TOL)?;
    if e.values[0] < -CLAMP_TOL {
        return Err(MatError::NegativeEigenvalue { value: e.values[0] });
    }
    for v in e.values.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(e)
}

/// Principal square root of a PSD matrix.
pub fn mat_sqrt_psd<const N: usize>(m: &Mat<N>) -> Result<Mat<N>, MatError> {
    Ok(psd_eigen(m)?.map(f64::sqrt))
}

/// Natural logarithm restricted to the support of a PSD matrix: eigenvalues
/// at or below `RANK_TOL · λ_max` map to zero.
pub fn mat_log_psd<const N: usize>(m: &Mat<N>) -> Result<Mat<N>, MatError> {
    let e = psd_eigen(m)?;
    let cutoff = RANK_TOL * e.values[N - 1];
    Ok(e.map(|x| if x > cutoff && x > 0.0 { x.ln() } else { 0.0 }))
}

/// Spectral view of a PSD matrix split into range and kernel.
#[derive(Debug, Clone, Copy)]
pub struct RangeSplit<const N: usize> {
    pub eigen: HermEigen<N>,
    pub rank: usize,
    /// Eigenvalues above this are in the range.
    pub cutoff: f64,
}

impl<const N: usize> RangeSplit<N> {
    /// Eigenvalues at or below `rank_tol · λ_max` are treated as zero.
    pub fn new(m: &Mat<N>, rank_tol: f64) -> Self {
        Self::from_eigen(eigh(&m.hermitian_part()), rank_tol)
    }

    pub fn from_eigen(eigen: HermEigen<N>, rank_tol: f64) -> Self {
        let top = eigen.values[N - 1];
        let cutoff = if top > 0.0 { rank_tol * top } else { f64::INFINITY };
        let rank = eigen.values.iter().filter(|&&x| x > cutoff).count();
        RangeSplit { eigen, rank, cutoff }
    }

    fn in_range(&self, k: usize) -> bool {
        self.eigen.values[k] > self.cutoff
    }

    /// Moore–Penrose pseudo-inverse.
    pub fn pinv(&self) -> Mat<N> {
        let cutoff = self.cutoff;
        self.eigen.map(|x| if x > cutoff { 1.0 / x } else { 0.0 })
    }

    /// Orthogonal projector onto the range.
    pub fn projector(&self) -> Mat<N> {
        let mut m = Mat::zeros();
        for k in 0..N {
            if self.in_range(k) {
                m += self.eigen.vectors[k].projector();
            }
        }
        m
    }

    /// Orthonormal basis of the range, largest eigenvalue first.
    pub fn range_basis(&self) -> Vec<Ket<N>> {
        (0..N).rev().filter(|&k| self.in_range(k)).map(|k| self.eigen.vectors[k]).collect()
    }

    /// Eigenvector of smallest eigenvalue.
    pub fn lowest(&self) -> Ket<N> {
        self.eigen.vectors[0]
    }

    /// Norm of the component of `v` orthogonal to the range.
    pub fn outside_norm(&self, v: &Ket<N>) -> f64 {
        (0..N)
            .filter(|&k| !self.in_range(k))
            .map(|k| self.eigen.vectors[k].inner(v).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Kernel eigenvectors, smallest eigenvalue first.
    pub fn kernel_basis(&self) -> Vec<Ket<N>> {
        (0..N).filter(|&k| !self.in_range(k)).map(|k| self.eigen.vectors[k]).collect()
    }
}

/// Range-restricted pseudo-inverse of a Hermitian PSD matrix and its rank.
pub fn pinv_on_range<const N: usize>(m: &Mat<N>, rank_tol: f64) -> (Mat<N>, usize) {
    let split = RangeSplit::new(m, rank_tol);
    (split.pinv(), split.rank)
}
