//! Concurrence and relative entropy of two-qubit states.

use serde::Serialize;
use thiserror::Error;

use crate::bdstate::{BdState, PauliFrame};
use crate::matcore::{
    eigh, eigvalsh, herm_eigen, mat_sqrt_psd, pauli_y, tensor, HermEigen, Mat4, MatError, RangeSplit,
    RANK_TOL,
};

/// Tolerance on Hermiticity, trace and negative eigenvalues of an input
/// density matrix.
pub const DENSITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),
    #[error("pure Bell state: the closest separable state formula divides by zero")]
    DegenerateVertex,
}

impl From<MatError> for MeasureError {
    fn from(e: MatError) -> Self {
        MeasureError::NotDensityMatrix(e.to_string())
    }
}

/// Checks Hermiticity, unit trace and positivity within `tol`; returns the
/// spectrum on success.
pub fn validate_density_matrix(m: &Mat4, tol: f64) -> Result<HermEigen<4>, MeasureError> {
    let e = herm_eigen(m, tol)?;
    let tr = m.trace();
    if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
        return Err(MeasureError::NotDensityMatrix(format!("trace is {tr}, not 1")));
    }
    if e.values[0] < -tol {
        return Err(MeasureError::NotDensityMatrix(format!(
            "eigenvalue {:.3e} is negative",
            e.values[0]
        )));
    }
    Ok(e)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConcurrenceResult {
    pub value: f64,
    /// Square roots of the eigenvalues of `ρρ̃`, descending.
    pub sqrt_eigs: [f64; 4],
}

/// `(σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`.
pub fn spin_flip(rho: &Mat4) -> Mat4 {
    let y = pauli_y();
    let yy = tensor(&y, &y);
    yy * rho.conj() * yy
}

/// Wootters concurrence via the Hermitian form `√ρ ρ̃ √ρ`, which shares its
/// spectrum with `ρρ̃`.
pub fn wootters_concurrence(rho: &Mat4) -> Result<ConcurrenceResult, MeasureError> {
    validate_density_matrix(rho, DENSITY_TOL)?;
    let r = mat_sqrt_psd(rho)?;
    let h = r * spin_flip(rho) * r;
    let vals = eigvalsh(&h);
    let mut s = vals.map(|v| v.max(0.0).sqrt());
    s.reverse();
    let value = (s[0] - s[1] - s[2] - s[3]).max(0.0);
    Ok(ConcurrenceResult { value, sqrt_eigs: s })
}

/// `max(0, 2·max p − 1)`.
pub fn concurrence_bd(s: &BdState) -> f64 {
    (2.0 * s.max_p().1 - 1.0).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelEntropyResult {
    /// Nats; `+∞` when the support condition fails.
    pub value: f64,
    pub support_ok: bool,
}

impl RelEntropyResult {
    fn infinite() -> Self {
        RelEntropyResult { value: f64::INFINITY, support_ok: false }
    }
}

/// `Σ p_i ln(p_i/q_i)` with `0 ln 0 = 0`; `+∞` if some `p_i > 0` meets a
/// `q_i` below the rank cutoff.
pub fn relative_entropy_bd(p: &[f64; 4], q: &[f64; 4]) -> RelEntropyResult {
    let qmax = q.iter().cloned().fold(0.0, f64::max);
    let cutoff = RANK_TOL * qmax;
    let mut value = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi <= 0.0 {
            continue;
        }
        if qi <= cutoff {
            if pi > RANK_TOL {
                return RelEntropyResult::infinite();
            }
            continue;
        }
        value += pi * (pi / qi).ln();
    }
    RelEntropyResult { value, support_ok: true }
}

/// `tr ρ ln ρ − tr ρ ln σ` with both logarithms taken on their supports.
pub fn relative_entropy(rho: &Mat4, sigma: &Mat4) -> Result<RelEntropyResult, MeasureError> {
    validate_density_matrix(rho, DENSITY_TOL)?;
    validate_density_matrix(sigma, DENSITY_TOL)?;
    if let (Ok(a), Ok(b)) = (BdState::from_density_matrix(rho), BdState::from_density_matrix(sigma)) {
        return Ok(relative_entropy_bd(&a.p(), &b.p()));
    }
    Ok(relative_entropy_matrix(rho, sigma))
}

/// The general spectral route of [`relative_entropy`], without the
/// Bell-diagonal shortcut or input validation.
pub fn relative_entropy_matrix(rho: &Mat4, sigma: &Mat4) -> RelEntropyResult {
    let er = eigh(&rho.hermitian_part());
    let rho_log_rho: f64 = er.values.iter().filter(|v| **v > 0.0).map(|v| v * v.ln()).sum();

    let split = RangeSplit::new(sigma, RANK_TOL);
    let mut cross = 0.0;
    let mut leak = 0.0;
    for k in 0..4 {
        let w = rho.expectation(&split.eigen.vectors[k]);
        let s = split.eigen.values[k];
        if s > split.cutoff {
            cross += w * s.ln();
        } else {
            leak += w;
        }
    }
    if leak > RANK_TOL {
        return RelEntropyResult::infinite();
    }
    RelEntropyResult { value: rho_log_rho - cross, support_ok: true }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosestSeparable {
    pub state: BdState,
    /// The input was already separable and is returned unchanged.
    pub separable_input: bool,
}

/// Separable Bell-diagonal state nearest in relative entropy:
/// `q_i = p_i / (2(1 − p_max))` off the dominant label and `½` on it.
pub fn closest_separable_bd(s: &BdState) -> Result<ClosestSeparable, MeasureError> {
    let (canon, frame): (BdState, PauliFrame) = match s.canonicalize() {
        Ok(x) => x,
        Err(_) => return Ok(ClosestSeparable { state: *s, separable_input: true }),
    };
    let p = canon.p();
    if p[3] >= 1.0 - crate::bdstate::BD_TOL {
        return Err(MeasureError::DegenerateVertex);
    }
    let d = 2.0 * (1.0 - p[3]);
    let q = BdState::from_p([p[0] / d, p[1] / d, p[2] / d, 0.5])
        .expect("projected weights are a probability vector");
    Ok(ClosestSeparable { state: q.in_frame(frame), separable_input: false })
}
