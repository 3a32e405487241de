//! Optimality checks for a given decomposition `ρ = Σ Λ_α P_α + (1 − λ)|ψ⟩⟨ψ|`.
//!
//! A decomposition is the best separable approximation iff every single
//! weight `Λ_α` is maximal with respect to `ρ_α = ρ − Σ_{γ≠α} Λ_γ P_γ`, and
//! every pair `(Λ_α, Λ_β)` is maximal with respect to
//! `ρ_{αβ} = ρ − Σ_{γ≠α,β} Λ_γ P_γ`. Maximal weights come from the range
//! pseudo-inverse of those matrices. The rank criterion on `ρ_s^{T_B}` is
//! reported alongside as an independent diagnostic.

use serde::Serialize;
use thiserror::Error;

use crate::lsd::{reconstruct, LsSplit};
use crate::matcore::{herm_eigen, partial_transpose_b, Ket4, Mat4, RangeSplit, HERMITIAN_TOL, RANK_TOL};

/// A ket is in the range of `ρ` when its component outside has norm at most this.
pub const RANGE_TOL: f64 = 1e-8;

/// Default tolerance on every residual of a verification.
pub const VERIFY_TOL: f64 = 1e-8;

/// Eigenvalues of a subtracted matrix below `−SUBTRACTION_CLAMP` mean the
/// subtraction left the PSD cone.
pub const SUBTRACTION_CLAMP: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimalityError {
    #[error("degenerate pair: Gram determinant {det:.3e} vanishes")]
    DegeneratePair { det: f64 },
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("rank of the partially transposed separable part is {rank}, not 3")]
    RankNotThree { rank: usize },
    #[error("matrix is not Hermitian")]
    NotHermitian,
}

/// Which branch of the two-vector maximality lemma applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairCase {
    /// Neither ket in the range.
    A,
    /// Exactly one ket in the range.
    B,
    /// Both in the range, vanishing cross term.
    C,
    /// Both in the range, nonzero cross term.
    D,
}

/// Weighted rank-one projector of an ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectorEntry {
    pub weight: f64,
    pub ket: Ket4,
    pub projector: Mat4,
}

impl ProjectorEntry {
    pub fn new(weight: f64, ket: Ket4) -> Self {
        ProjectorEntry { weight, ket, projector: ket.projector() }
    }
}

fn range_of(rho: &Mat4) -> RangeSplit<4> {
    RangeSplit::new(rho, RANK_TOL)
}

fn lemma1_on(split: &RangeSplit<4>, psi: &Ket4) -> f64 {
    if split.rank == 0 || split.outside_norm(psi) > RANGE_TOL {
        return 0.0;
    }
    let q = split.pinv().expectation(psi);
    if q > 0.0 {
        1.0 / q
    } else {
        0.0
    }
}

/// Largest `Λ` with `ρ − Λ|ψ⟩⟨ψ|` positive: `1/⟨ψ|ρ⁺|ψ⟩` when `ψ` is in the
/// range of `ρ`, else zero.
pub fn lemma1_max(rho: &Mat4, psi: &Ket4) -> f64 {
    lemma1_on(&range_of(rho), psi)
}

fn lemma2_on(split: &RangeSplit<4>, psi1: &Ket4, psi2: &Ket4) -> Result<(f64, f64, PairCase), OptimalityError> {
    let in1 = split.rank > 0 && split.outside_norm(psi1) <= RANGE_TOL;
    let in2 = split.rank > 0 && split.outside_norm(psi2) <= RANGE_TOL;
    match (in1, in2) {
        (false, false) => return Ok((0.0, 0.0, PairCase::A)),
        (true, false) => return Ok((lemma1_on(split, psi1), 0.0, PairCase::B)),
        (false, true) => return Ok((0.0, lemma1_on(split, psi2), PairCase::B)),
        (true, true) => {}
    }
    let inv = split.pinv();
    let g11 = inv.expectation(psi1);
    let g22 = inv.expectation(psi2);
    let x = inv.sandwich(psi1, psi2).norm();
    if x <= RANK_TOL * (g11 * g22).sqrt() {
        return Ok((1.0 / g11, 1.0 / g22, PairCase::C));
    }
    let det = g11 * g22 - x * x;
    if det <= RANK_TOL * g11 * g22 {
        return Err(OptimalityError::DegeneratePair { det });
    }
    Ok(((g22 - x) / det, (g11 - x) / det, PairCase::D))
}

/// Maximal pair `(Λ₁, Λ₂)` such that `ρ − Λ₁|ψ₁⟩⟨ψ₁| − Λ₂|ψ₂⟩⟨ψ₂|` stays
/// positive with `Λ₁ + Λ₂` largest, and the case that produced it.
pub fn lemma2_pair(rho: &Mat4, psi1: &Ket4, psi2: &Ket4) -> Result<(f64, f64, PairCase), OptimalityError> {
    lemma2_on(&range_of(rho), psi1, psi2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma1Check {
    pub alpha: usize,
    pub expected: f64,
    pub computed: f64,
    pub residual: f64,
    /// Smallest eigenvalue of `ρ_α` before clamping.
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairCheck {
    pub alpha: usize,
    pub beta: usize,
    pub case: Option<PairCase>,
    pub expected: [f64; 2],
    pub computed: [f64; 2],
    pub residual: f64,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionI {
    pub alpha: f64,
    /// Norm of the part of `(|φ⟩⟨φ|)^{T_B}|ψ⟩` orthogonal to `|ψ⟩`.
    pub residual: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionII {
    /// Kernel vector of `ρ_s`.
    pub kernel: Ket4,
    pub nu: f64,
    pub alpha: f64,
    pub residual: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankReport {
    /// Eigenvalues of `ρ_s^{T_B}`, ascending.
    pub pt_eigenvalues: [f64; 4],
    pub pt_rank: usize,
    /// Kernel vector `|φ⟩` of `ρ_s^{T_B}`.
    pub kernel: Ket4,
    /// The eigenvalue belonging to `|φ⟩`.
    pub kernel_eigenvalue: f64,
    pub rho_s_rank: usize,
    pub condition_i: ConditionI,
    /// Present when `ρ_s` has rank three.
    pub condition_ii: Option<ConditionII>,
    pub holds: bool,
}

/// Outcome of the rank criterion inside a verification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RankCheck {
    Report(RankReport),
    RankNotThree { rank: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub tolerance: f64,
    pub reconstruction_residual: f64,
    pub lemma1_checks: Vec<Lemma1Check>,
    pub pair_checks: Vec<PairCheck>,
    /// Only for `0 < λ < 1`. Reported, not part of `passed`.
    pub rank_check: Option<RankCheck>,
    pub max_residual: f64,
    pub passed: bool,
}

fn check_structure<D: LsSplit + ?Sized>(d: &D, tol: f64) -> Result<(), OptimalityError> {
    let lambda = d.lambda();
    if !(lambda.is_finite() && (-tol..=1.0 + tol).contains(&lambda)) {
        return Err(OptimalityError::InvalidDecomposition(format!("lambda = {lambda} outside [0, 1]")));
    }
    let mut sum = 0.0;
    for (k, e) in d.ensemble().iter().enumerate() {
        if !(e.weight.is_finite() && e.weight >= -tol) {
            return Err(OptimalityError::InvalidDecomposition(format!(
                "weight {} is {}",
                k + 1,
                e.weight
            )));
        }
        sum += e.weight;
    }
    if (sum - lambda).abs() > tol {
        return Err(OptimalityError::InvalidDecomposition(format!(
            "weights sum to {sum}, lambda is {lambda}"
        )));
    }
    Ok(())
}

/// [`verify_bsa_with_tol`] at [`VERIFY_TOL`].
pub fn verify_bsa<D: LsSplit + ?Sized>(rho: &Mat4, d: &D) -> Result<VerificationReport, OptimalityError> {
    verify_bsa_with_tol(rho, d, VERIFY_TOL)
}

/// Runs every single and pair maximality check of `d` against `rho`.
///
/// `passed` requires all residuals, the reconstruction residual and every
/// subtraction's negative part to be within `tol`.
pub fn verify_bsa_with_tol<D: LsSplit + ?Sized>(
    rho: &Mat4,
    d: &D,
    tol: f64,
) -> Result<VerificationReport, OptimalityError> {
    if rho.hermiticity_residual() > HERMITIAN_TOL {
        return Err(OptimalityError::NotHermitian);
    }
    check_structure(d, tol)?;
    let entries: Vec<ProjectorEntry> =
        d.ensemble().iter().map(|e| ProjectorEntry::new(e.weight, e.ket)).collect();
    let total = entries.iter().fold(Mat4::zeros(), |acc, e| acc + e.projector.scale(e.weight));
    let reconstruction_residual = (reconstruct(d) - *rho).frobenius_norm();

    let mut ok = reconstruction_residual <= tol;
    let mut max_residual = reconstruction_residual;

    let mut lemma1_checks = Vec::with_capacity(entries.len());
    for (a, e) in entries.iter().enumerate() {
        let rho_a = *rho - total + e.projector.scale(e.weight);
        let split = range_of(&rho_a);
        let min_eigenvalue = split.eigen.values[0];
        let computed = lemma1_on(&split, &e.ket);
        let residual = (computed - e.weight).abs();
        ok &= residual <= tol && min_eigenvalue >= -SUBTRACTION_CLAMP;
        max_residual = max_residual.max(residual);
        lemma1_checks.push(Lemma1Check { alpha: a + 1, expected: e.weight, computed, residual, min_eigenvalue });
    }

    let mut pair_checks = Vec::new();
    for a in 0..entries.len() {
        for b in (a + 1)..entries.len() {
            let (ea, eb) = (&entries[a], &entries[b]);
            let rho_ab = *rho - total + ea.projector.scale(ea.weight) + eb.projector.scale(eb.weight);
            let split = range_of(&rho_ab);
            let min_eigenvalue = split.eigen.values[0];
            let (case, computed, residual) = match lemma2_on(&split, &ea.ket, &eb.ket) {
                Ok((l1, l2, case)) => {
                    let r = (l1 - ea.weight).abs().max((l2 - eb.weight).abs());
                    (Some(case), [l1, l2], r)
                }
                Err(_) => (None, [f64::NAN, f64::NAN], f64::INFINITY),
            };
            ok &= residual <= tol && min_eigenvalue >= -SUBTRACTION_CLAMP;
            max_residual = max_residual.max(residual);
            pair_checks.push(PairCheck {
                alpha: a + 1,
                beta: b + 1,
                case,
                expected: [ea.weight, eb.weight],
                computed,
                residual,
                min_eigenvalue,
            });
        }
    }

    let lambda = d.lambda();
    let rank_check = if lambda > tol && lambda < 1.0 - tol {
        let rho_s = total.scale(1.0 / lambda);
        Some(match rank_conditions(&rho_s, &d.pure_ket()) {
            Ok(r) => RankCheck::Report(r),
            Err(OptimalityError::RankNotThree { rank }) => RankCheck::RankNotThree { rank },
            Err(e) => return Err(e),
        })
    } else {
        None
    };

    Ok(VerificationReport {
        tolerance: tol,
        reconstruction_residual,
        lemma1_checks,
        pair_checks,
        rank_check,
        max_residual,
        passed: ok,
    })
}

const NU_MAX: f64 = 10.0;
const NU_GRID: usize = 101;

// Component of m|ψ⟩ orthogonal to |ψ⟩, and −⟨ψ|m|ψ⟩.
fn alignment(m: &Mat4, psi: &Ket4) -> (f64, f64) {
    let v = m.mul_ket(psi);
    let along = m.sandwich(psi, psi);
    let a = psi.amplitudes();
    let perp: f64 = (0..4).map(|k| (v[k] - a[k] * along).norm_sqr()).sum::<f64>().sqrt();
    (perp, -along.re)
}

/// Rank criterion: `ρ_s^{T_B}` must have a one-dimensional kernel `|φ⟩`, and
/// either (i) `(|φ⟩⟨φ|)^{T_B}|ψ⟩ = −α|ψ⟩` with `α > 0`, or (ii) `ρ_s` has a
/// kernel vector `|φ̃⟩` and `(ν|φ̃⟩⟨φ̃| + (|φ⟩⟨φ|)^{T_B})|ψ⟩ = −α|ψ⟩` with
/// `α, ν ≥ 0`. Condition (ii) is searched on a `ν` grid over `[0, 10]` and
/// refined by golden section.
pub fn rank_conditions(rho_s: &Mat4, psi: &Ket4) -> Result<RankReport, OptimalityError> {
    let pt = partial_transpose_b(rho_s);
    let e = herm_eigen(&pt, HERMITIAN_TOL).map_err(|_| OptimalityError::NotHermitian)?;
    let scale = e.max_abs();
    let pt_rank = e.values.iter().filter(|v| v.abs() > RANK_TOL * scale).count();
    if pt_rank != 3 {
        return Err(OptimalityError::RankNotThree { rank: pt_rank });
    }
    let k = (0..4)
        .min_by(|&i, &j| e.values[i].abs().total_cmp(&e.values[j].abs()))
        .expect("four eigenvalues");
    let kernel = e.vectors[k];
    let phi_pt = partial_transpose_b(&kernel.projector());

    let (residual, alpha) = alignment(&phi_pt, psi);
    let condition_i = ConditionI { alpha, residual, holds: residual <= VERIFY_TOL && alpha > VERIFY_TOL };

    let s_split = RangeSplit::new(rho_s, RANK_TOL);
    let condition_ii = (s_split.rank == 3).then(|| {
        let tilde = s_split.lowest();
        let tilde_p = tilde.projector();
        let score = |nu: f64| alignment(&(tilde_p.scale(nu) + phi_pt), psi).0;
        let mut best = (0.0, score(0.0));
        for i in 1..NU_GRID {
            let nu = NU_MAX * i as f64 / (NU_GRID - 1) as f64;
            let r = score(nu);
            if r < best.1 {
                best = (nu, r);
            }
        }
        let step = NU_MAX / (NU_GRID - 1) as f64;
        let (mut lo, mut hi) = ((best.0 - step).max(0.0), (best.0 + step).min(NU_MAX));
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let m1 = hi - g * (hi - lo);
            let m2 = lo + g * (hi - lo);
            if score(m1) <= score(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        let mid = 0.5 * (lo + hi);
        let nu = if score(mid) < best.1 { mid } else { best.0 };
        let (residual, alpha) = alignment(&(tilde_p.scale(nu) + phi_pt), psi);
        ConditionII { kernel: tilde, nu, alpha, residual, holds: residual <= VERIFY_TOL && alpha >= -VERIFY_TOL }
    });

    let holds = condition_i.holds || condition_ii.is_some_and(|c| c.holds);
    Ok(RankReport {
        pt_eigenvalues: e.values,
        pt_rank,
        kernel,
        kernel_eigenvalue: e.values[k],
        rho_s_rank: s_split.rank,
        condition_i,
        condition_ii,
        holds,
    })
}
