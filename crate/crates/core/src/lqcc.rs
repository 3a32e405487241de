//! Local filtering `ρ ↦ (A⊗B)ρ(A⊗B)†/t(ρ)` and its action on decompositions.
//!
//! Each local operator is `U f` with `U` unitary and `f = μ(I + a m·σ)` a
//! filtration, invertible for `|a| < 1`. Concurrence scales by
//! `|det A||det B|/t(ρ) = μ²ν²(1−a²)(1−b²)/t(ρ)`, and so does the weight of
//! the entangled part of a decomposition, so the transformed decomposition
//! keeps saturating `(1 − λ)C(ψ) = C(ρ)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bdstate::PauliFrame;
use crate::lsd::{EnsembleTerm, LsDecomposition, LsSplit};
use crate::matcore::{c, pauli_dot, paulis, tensor, Ket4, Mat2, Mat4, MatError};
use crate::measures::{wootters_concurrence, MeasureError};
use crate::optimality::{verify_bsa, OptimalityError, VerificationReport};

/// `|a|` must stay below `1 − A_MARGIN`.
pub const A_MARGIN: f64 = 1e-9;

/// Smallest admissible `t(ρ)`.
pub const NORM_FLOOR: f64 = 1e-12;

/// Frobenius tolerance for deciding `A = B` up to a global phase.
pub const SAME_OP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LqccError {
    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),
    #[error("invalid unitary: {0}")]
    InvalidUnitary(String),
    #[error("transformed state has vanishing norm {norm:.3e}")]
    VanishingNorm { norm: f64 },
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Optimality(#[from] OptimalityError),
    #[error(transparent)]
    Mat(#[from] MatError),
}

fn unit3(v: [f64; 3]) -> Option<[f64; 3]> {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    (n > 0.0 && n.is_finite()).then(|| v.map(|x| x / n))
}

#[derive(Deserialize)]
struct FiltrationRepr {
    #[serde(default = "one")]
    mu: f64,
    #[serde(default)]
    a: f64,
    #[serde(default = "z_axis")]
    m: [f64; 3],
}

fn one() -> f64 {
    1.0
}

fn z_axis() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

/// `f = μ(I + a m·σ)` with `μ > 0`, `|a| < 1`, `|m| = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FiltrationRepr")]
pub struct Filtration {
    pub mu: f64,
    pub a: f64,
    pub m: [f64; 3],
}

impl TryFrom<FiltrationRepr> for Filtration {
    type Error = LqccError;
    fn try_from(r: FiltrationRepr) -> Result<Self, LqccError> {
        Filtration::new(r.mu, r.a, r.m)
    }
}

impl Filtration {
    /// Validates the parameters and normalizes `m`.
    pub fn new(mu: f64, a: f64, m: [f64; 3]) -> Result<Self, LqccError> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(LqccError::InvalidFiltration(format!("mu = {mu} must be positive")));
        }
        if !(a.is_finite() && a.abs() < 1.0 - A_MARGIN) {
            return Err(LqccError::InvalidFiltration(format!("|a| = {} must be below 1", a.abs())));
        }
        let m = unit3(m).ok_or_else(|| LqccError::InvalidFiltration("m must be a nonzero vector".into()))?;
        Ok(Filtration { mu, a, m })
    }

    pub fn identity() -> Self {
        Filtration { mu: 1.0, a: 0.0, m: z_axis() }
    }

    pub fn operator(&self) -> Mat2 {
        (Mat2::identity() + pauli_dot(self.m).scale(self.a)).scale(self.mu)
    }

    /// `det f = μ²(1 − a²)`.
    pub fn det(&self) -> f64 {
        self.mu * self.mu * (1.0 - self.a * self.a)
    }
}

#[derive(Deserialize)]
struct UnitaryRepr {
    #[serde(default = "z_axis")]
    axis: [f64; 3],
    #[serde(default)]
    angle: f64,
    #[serde(default)]
    phase: f64,
}

/// `U = e^{iφ}(cos(θ/2) I − i sin(θ/2) n·σ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "UnitaryRepr")]
pub struct UnitarySpec {
    pub axis: [f64; 3],
    pub angle: f64,
    pub phase: f64,
}

impl TryFrom<UnitaryRepr> for UnitarySpec {
    type Error = LqccError;
    fn try_from(r: UnitaryRepr) -> Result<Self, LqccError> {
        UnitarySpec::new(r.axis, r.angle, r.phase)
    }
}

impl UnitarySpec {
    pub fn new(axis: [f64; 3], angle: f64, phase: f64) -> Result<Self, LqccError> {
        if !(angle.is_finite() && phase.is_finite()) {
            return Err(LqccError::InvalidUnitary("angle and phase must be finite".into()));
        }
        let axis = unit3(axis).ok_or_else(|| LqccError::InvalidUnitary("axis must be a nonzero vector".into()))?;
        Ok(UnitarySpec { axis, angle, phase })
    }

    pub fn identity() -> Self {
        UnitarySpec { axis: z_axis(), angle: 0.0, phase: 0.0 }
    }

    pub fn operator(&self) -> Mat2 {
        let h = 0.5 * self.angle;
        let rot = Mat2::identity().scale(h.cos()) - pauli_dot(self.axis).scale_c(c(0.0, h.sin()));
        rot.scale_c(c(self.phase.cos(), self.phase.sin()))
    }

    pub fn inverse(&self) -> Self {
        UnitarySpec { axis: self.axis, angle: -self.angle, phase: -self.phase }
    }

    /// `self · other`, via the quaternion product of the two rotations.
    pub fn compose(&self, other: &UnitarySpec) -> Self {
        let (a0, a) = self.quaternion();
        let (b0, b) = other.quaternion();
        let c0 = a0 * b0 - (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]);
        let cross = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
        let v: [f64; 3] = std::array::from_fn(|k| a0 * b[k] + b0 * a[k] + cross[k]);
        let s = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        UnitarySpec {
            axis: unit3(v).unwrap_or_else(z_axis),
            angle: 2.0 * s.atan2(c0),
            phase: self.phase + other.phase,
        }
    }

    fn quaternion(&self) -> (f64, [f64; 3]) {
        let h = 0.5 * self.angle;
        (h.cos(), self.axis.map(|x| x * h.sin()))
    }

    /// `σ_k = i(−i σ_k)`, a rotation by π about axis `k` with phase π/2.
    pub fn pauli(frame: PauliFrame) -> Self {
        let axis = match frame {
            PauliFrame::Identity => return UnitarySpec::identity(),
            PauliFrame::X => [1.0, 0.0, 0.0],
            PauliFrame::Y => [0.0, 1.0, 0.0],
            PauliFrame::Z => [0.0, 0.0, 1.0],
        };
        UnitarySpec { axis, angle: std::f64::consts::PI, phase: std::f64::consts::FRAC_PI_2 }
    }

    /// The rotation `m ↦ Rm` with `U(m·σ)U† = (Rm)·σ`.
    pub fn rotate(&self, m: [f64; 3]) -> [f64; 3] {
        let u = self.operator();
        let conj = pauli_dot(m).conjugate_by(&u);
        paulis().map(|s| 0.5 * (s * conj).trace().re)
    }
}

/// One party's operator `U f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalOperation {
    #[serde(default = "UnitarySpec::identity")]
    pub unitary: UnitarySpec,
    #[serde(default = "Filtration::identity")]
    pub filtration: Filtration,
}

impl LocalOperation {
    pub fn identity() -> Self {
        LocalOperation { unitary: UnitarySpec::identity(), filtration: Filtration::identity() }
    }

    pub fn filter(f: Filtration) -> Self {
        LocalOperation { unitary: UnitarySpec::identity(), filtration: f }
    }

    pub fn operator(&self) -> Mat2 {
        self.unitary.operator() * self.filtration.operator()
    }

    /// `(U f)⁻¹ = f⁻¹U† = U† f′` with `f′ = (1/(μ(1−a²)), −a, Rm)`.
    pub fn inverse(&self) -> Self {
        let f = self.filtration;
        let mu = 1.0 / (f.mu * (1.0 - f.a * f.a));
        let m = unit3(self.unitary.rotate(f.m)).unwrap_or(f.m);
        LocalOperation {
            unitary: self.unitary.inverse(),
            filtration: Filtration { mu, a: -f.a, m },
        }
    }
}

/// `A⊗B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LqccPair {
    #[serde(rename = "A")]
    pub a: LocalOperation,
    #[serde(rename = "B")]
    pub b: LocalOperation,
}

impl LqccPair {
    pub fn identity() -> Self {
        LqccPair { a: LocalOperation::identity(), b: LocalOperation::identity() }
    }

    /// `A = B = op`.
    pub fn symmetric(op: LocalOperation) -> Self {
        LqccPair { a: op, b: op }
    }

    /// `A = op`, `B = op·S` with `S` the Pauli of `frame`. These pairs act
    /// identically on both sides of the canonical state.
    pub fn symmetric_in(op: LocalOperation, frame: PauliFrame) -> Self {
        let s = UnitarySpec::pauli(frame);
        let f = op.filtration;
        let m = unit3(s.inverse().rotate(f.m)).unwrap_or(f.m);
        let b = LocalOperation {
            unitary: op.unitary.compose(&s),
            filtration: Filtration { mu: f.mu, a: f.a, m },
        };
        LqccPair { a: op, b }
    }

    pub fn operator(&self) -> Mat4 {
        tensor(&self.a.operator(), &self.b.operator())
    }

    pub fn inverse(&self) -> Self {
        LqccPair { a: self.a.inverse(), b: self.b.inverse() }
    }

    /// `|det A||det B| = μ²ν²(1−a²)(1−b²)`.
    pub fn det_factor(&self) -> f64 {
        self.a.filtration.det() * self.b.filtration.det()
    }

    /// Whether `A·S` equals `B` up to a global phase, with `S` the local
    /// Pauli on party A of `frame`. For the identity frame this is `A = B`.
    pub fn symmetric_in_frame(&self, frame: PauliFrame) -> bool {
        same_up_to_phase(&(self.a.operator() * frame.local()), &self.b.operator())
    }
}

fn same_up_to_phase(x: &Mat2, y: &Mat2) -> bool {
    let overlap = (x.adjoint() * *y).trace();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { c(1.0, 0.0) };
    (x.scale_c(phase) - *y).frobenius_norm() <= SAME_OP_TOL
}

/// `(A⊗B)ρ(A⊗B)†` normalized, and the normalization `t(ρ)`.
pub fn apply_lqcc(rho: &Mat4, pair: &LqccPair) -> Result<(Mat4, f64), LqccError> {
    let k = pair.operator();
    let m = rho.conjugate_by(&k);
    let norm = m.trace().re;
    if !(norm > NORM_FLOOR) {
        return Err(LqccError::VanishingNorm { norm });
    }
    Ok((m.scale(1.0 / norm), norm))
}

/// `μ²ν²(1−a²)(1−b²)/t(ρ) · C(ρ)`.
pub fn predict_concurrence(rho: &Mat4, pair: &LqccPair) -> Result<f64, LqccError> {
    let (_, norm) = apply_lqcc(rho, pair)?;
    let c0 = wootters_concurrence(rho)?.value;
    Ok(pair.det_factor() / norm * c0)
}

/// Image of a decomposition under a filtering pair. The separable part is no
/// longer Bell-diagonal, so it is kept as a matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformedDecomposition {
    pub lambda: f64,
    pub rho_s: Mat4,
    pub pure_part: Ket4,
    pub ensemble: Vec<EnsembleTerm>,
    /// `t(ρ)`.
    pub norm: f64,
    /// The transformed state.
    pub rho: Mat4,
    /// Frame of the source decomposition.
    #[serde(skip)]
    pub source_frame: crate::bdstate::PauliFrame,
}

impl LsSplit for TransformedDecomposition {
    fn lambda(&self) -> f64 {
        self.lambda
    }
    fn ensemble(&self) -> &[EnsembleTerm] {
        &self.ensemble
    }
    fn pure_ket(&self) -> Ket4 {
        self.pure_part
    }
}

/// `Λ′_α = t(P_α)/t(ρ)·Λ_α` with kets `K|e_α f_α⟩/√t(P_α)`, pure part
/// `K|ψ⟩` normalized, and `λ′ = tr(Kρ_sK†)/t(ρ)·λ`, where `K = A⊗B` and
/// `t(X) = tr(K X K†)`.
pub fn transform_decomposition(d: &LsDecomposition, pair: &LqccPair) -> Result<TransformedDecomposition, LqccError> {
    let k = pair.operator();
    let kk = k.adjoint() * k;
    let rho = crate::lsd::reconstruct(d);
    let (rho_t, norm) = apply_lqcc(&rho, pair)?;

    let ensemble = d
        .ensemble
        .iter()
        .map(|e| {
            let tp = kk.expectation(&e.ket);
            let ket = Ket4::new(k.mul_ket(&e.ket))?;
            Ok(EnsembleTerm { weight: tp / norm * e.weight, ket })
        })
        .collect::<Result<Vec<_>, MatError>>()?;

    let rho_s0 = d.rho_s.density_matrix();
    let (rho_s, ts) = apply_lqcc(&rho_s0, pair)?;
    let lambda = ts / norm * d.lambda;
    let pure_part = Ket4::new(k.mul_ket(&d.pure_part()))?;

    Ok(TransformedDecomposition {
        lambda,
        rho_s,
        pure_part,
        ensemble,
        norm,
        rho: rho_t,
        source_frame: d.frame,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformedVerification {
    pub report: VerificationReport,
    /// The pair is symmetric in the source's canonical frame, so the
    /// transformed decomposition is provably optimal and `report` must pass.
    pub guaranteed: bool,
}

/// Re-runs the optimality checks on a transformed decomposition. Outside
/// the symmetric case the outcome is informational.
pub fn verify_transformed_optimality(
    td: &TransformedDecomposition,
    pair: &LqccPair,
) -> Result<TransformedVerification, LqccError> {
    let report = verify_bsa(&td.rho, td)?;
    Ok(TransformedVerification { report, guaranteed: pair.symmetric_in_frame(td.source_frame) })
}
