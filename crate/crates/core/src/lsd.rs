//! Closed-form best separable approximation of Bell-diagonal states.
//!
//! For a state in the singlet tetrahedron (`p₄ > ½`) the optimal split is
//! `ρ = λ ρ_s + (1 − λ)|ψ⁻⟩⟨ψ⁻|` where `ρ_s` is the point where the ray from
//! the singlet vertex through `t` leaves the octahedron, i.e. the face
//! `t₁ + t₂ + t₃ = −1`, and `λ = (3 + t₁ + t₂ + t₃)/2 = 1 − C`. Every point
//! of that face is a mixture of the three octahedron vertices `O_i⁻`, each of
//! which is an equal mixture of two product states. States in the other
//! three tetrahedra are handled by a local Pauli relabeling.

use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;
use thiserror::Error;

use crate::bdstate::{separability_lhs, BdError, BdState, BellLabel, PauliFrame, BD_TOL};
use crate::matcore::{c, cr, tensor_ket, Ket2, Ket4, Mat4};

/// Absolute tolerance for face membership and collinearity.
pub const FACE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LsdError {
    #[error("t is not in the singlet tetrahedron (1 + t1 + t2 + t3 = {excess:.3e} > 0)")]
    NotInSingletTetra { excess: f64 },
    #[error("t is the singlet vertex; the face projection is undefined")]
    DegenerateVertex,
    #[error("state is not separable, so it has no product ensemble (max p = {max_p})")]
    NotOnFace { max_p: f64 },
    #[error(transparent)]
    Bd(#[from] BdError),
}

/// One weighted product state `Λ |e, f⟩⟨e, f|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleTerm {
    pub weight: f64,
    pub ket: Ket4,
}

impl EnsembleTerm {
    pub fn matrix(&self) -> Mat4 {
        self.ket.projector().scale(self.weight)
    }
}

/// Anything of the form `Σ Λ_α P_α + (1 − λ)|ψ⟩⟨ψ|`.
pub trait LsSplit {
    fn lambda(&self) -> f64;
    fn ensemble(&self) -> &[EnsembleTerm];
    fn pure_ket(&self) -> Ket4;

    /// `Σ Λ_α P_α`, the unnormalized separable part.
    fn separable_sum(&self) -> Mat4 {
        self.ensemble().iter().fold(Mat4::zeros(), |acc, e| acc + e.matrix())
    }
}

/// An optimal decomposition of a Bell-diagonal state.
#[derive(Debug, Clone, PartialEq)]
pub struct LsDecomposition {
    pub lambda: f64,
    pub rho_s: BdState,
    pub pure_label: BellLabel,
    pub ensemble: Vec<EnsembleTerm>,
    /// Pauli frame that maps the source state into the singlet tetrahedron.
    pub frame: PauliFrame,
    /// Set for a pure Bell input, where `rho_s` is the face centroid by convention.
    pub degenerate: bool,
}

impl LsDecomposition {
    pub fn pure_part(&self) -> Ket4 {
        self.pure_label.ket()
    }

    /// The same decomposition conjugated by `frame`. The recorded frame is
    /// updated so that [`canonical`](Self::canonical) still lands in the
    /// singlet tetrahedron.
    pub fn in_frame(&self, frame: PauliFrame) -> LsDecomposition {
        LsDecomposition {
            lambda: self.lambda,
            rho_s: self.rho_s.in_frame(frame),
            pure_label: BellLabel::from_index(frame.permute(self.pure_label.index())),
            ensemble: self
                .ensemble
                .iter()
                .map(|e| EnsembleTerm { weight: e.weight, ket: frame.apply_ket(&e.ket) })
                .collect(),
            frame: self.frame.compose(frame),
            degenerate: self.degenerate,
        }
    }

    /// The decomposition in the singlet-tetrahedron frame.
    pub fn canonical(&self) -> LsDecomposition {
        self.in_frame(self.frame)
    }
}

impl LsSplit for LsDecomposition {
    fn lambda(&self) -> f64 {
        self.lambda
    }
    fn ensemble(&self) -> &[EnsembleTerm] {
        &self.ensemble
    }
    fn pure_ket(&self) -> Ket4 {
        self.pure_part()
    }
}

impl Serialize for LsDecomposition {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("LsDecomposition", 6)?;
        st.serialize_field("lambda", &self.lambda)?;
        st.serialize_field("rho_s", &self.rho_s)?;
        st.serialize_field("pure_part", &self.pure_label)?;
        st.serialize_field("ensemble", &self.ensemble)?;
        st.serialize_field("frame", &self.frame)?;
        st.serialize_field("degenerate", &self.degenerate)?;
        st.end()
    }
}

/// Eigenket of `σ_axis` (0 = x, 1 = y, 2 = z) with eigenvalue `±1`.
pub fn pauli_eigenket(axis: usize, plus: bool) -> Ket2 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let sign = if plus { 1.0 } else { -1.0 };
    let amps = match axis {
        0 => [cr(s), cr(sign * s)],
        1 => [cr(s), c(0.0, sign * s)],
        2 if plus => [cr(1.0), cr(0.0)],
        2 => [cr(0.0), cr(1.0)],
        _ => panic!("axis must be 0, 1 or 2"),
    };
    Ket2::new(amps).expect("unit amplitudes")
}

/// `|i± i∓⟩` (anti-aligned) or `|i± i±⟩` (aligned).
fn axis_pair(axis: usize, aligned: bool) -> [Ket4; 2] {
    let plus = pauli_eigenket(axis, true);
    let minus = pauli_eigenket(axis, false);
    if aligned {
        [tensor_ket(&plus, &plus), tensor_ket(&minus, &minus)]
    } else {
        [tensor_ket(&plus, &minus), tensor_ket(&minus, &plus)]
    }
}

/// The six product kets spanning the singlet face, in the order
/// `x₊x₋, x₋x₊, y₊y₋, y₋y₊, z₊z₋, z₋z₊`.
pub fn face_kets() -> [Ket4; 6] {
    let [a, b] = axis_pair(0, false);
    let [c2, d] = axis_pair(1, false);
    let [e, f] = axis_pair(2, false);
    [a, b, c2, d, e, f]
}

/// Weights `λ_i⁻` of the three face vertices `O_i⁻` in `λ ρ_s`, from the
/// correlation vector of the source state. They sum to `(3 + Σt)/2`.
pub fn lambda_minus(t: &[f64; 3]) -> [f64; 3] {
    [
        0.5 * (1.0 - t[0] + t[1] + t[2]),
        0.5 * (1.0 + t[0] - t[1] + t[2]),
        0.5 * (1.0 + t[0] + t[1] - t[2]),
    ]
}

/// Distances from a face point to the three triangle sides; side `i` is
/// opposite `O_i⁻`. They sum to `√(3/2)`.
pub fn face_heights(t_face: &[f64; 3]) -> [f64; 3] {
    let k = 1.5_f64.sqrt();
    t_face.map(|x| -k * x)
}

/// Projection from the singlet vertex through `t` onto the face `Σt = −1`.
pub fn project_to_face(t: &[f64; 3]) -> Result<[f64; 3], LsdError> {
    crate::bdstate::t_to_p(t)?;
    let excess = 1.0 + t[0] + t[1] + t[2];
    if excess > BD_TOL {
        return Err(LsdError::NotInSingletTetra { excess });
    }
    if t.iter().all(|x| (x + 1.0).abs() <= BD_TOL) {
        return Err(LsdError::DegenerateVertex);
    }
    let d = 3.0 + t[0] + t[1] + t[2];
    Ok([
        (-1.0 + t[0] - t[1] - t[2]) / d,
        (-1.0 - t[0] + t[1] - t[2]) / d,
        (-1.0 - t[0] - t[1] + t[2]) / d,
    ])
}

/// Product ensemble of a separable Bell-diagonal state; weights sum to one.
///
/// On the singlet face the six kets of [`face_kets`] are returned with weights
/// `λ_i⁻/2` (zeros kept). Elsewhere in the octahedron `t` is split over the
/// six vertices `±e_i` with weights `½(w_i ± t_i)`,
/// `w_i = |t_i| + (1 − Σ|t_j|)/3`, and each vertex over two product kets;
/// terms of exactly zero weight are dropped.
pub fn product_ensemble(s: &BdState) -> Result<Vec<EnsembleTerm>, LsdError> {
    if !s.is_separable() {
        return Err(LsdError::NotOnFace { max_p: s.max_p().1 });
    }
    let t = s.t();
    let on_singlet_face =
        (1.0 + t[0] + t[1] + t[2]).abs() <= FACE_TOL && t.iter().all(|x| *x <= FACE_TOL);
    if on_singlet_face {
        return Ok(face_ensemble(&lambda_minus(&t)));
    }
    let l1: f64 = t.iter().map(|x| x.abs()).sum();
    let slack = ((1.0 - l1) / 3.0).max(0.0);
    let mut out = Vec::with_capacity(12);
    for (axis, &ti) in t.iter().enumerate() {
        let w = ti.abs() + slack;
        for (aligned, weight) in [(true, 0.5 * (w + ti)), (false, 0.5 * (w - ti))] {
            if weight == 0.0 {
                continue;
            }
            for ket in axis_pair(axis, aligned) {
                out.push(EnsembleTerm { weight: 0.5 * weight, ket });
            }
        }
    }
    Ok(out)
}

fn face_ensemble(lm: &[f64; 3]) -> Vec<EnsembleTerm> {
    face_kets()
        .iter()
        .enumerate()
        .map(|(k, ket)| EnsembleTerm { weight: 0.5 * lm[k / 2], ket: *ket })
        .collect()
}

/// Optimal decomposition of any Bell-diagonal state, in the state's own frame.
///
/// Separable input gives `λ = 1`, `ρ_s = s` and the pure part set to the
/// Bell state of largest weight (which then carries weight zero). A pure Bell
/// state gives `λ = 0` with `ρ_s` set to the face centroid.
pub fn bsa_bd(s: &BdState) -> LsDecomposition {
    let (canon, frame) = match s.canonicalize() {
        Ok(x) => x,
        Err(_) => {
            let ensemble = product_ensemble(s).expect("separable input");
            return LsDecomposition {
                lambda: 1.0,
                rho_s: *s,
                pure_label: BellLabel::from_index(s.max_p().0),
                ensemble,
                frame: PauliFrame::Identity,
                degenerate: false,
            };
        }
    };
    canonical_bsa(&canon).in_frame(frame)
}

// Decomposition of a state in the singlet tetrahedron.
fn canonical_bsa(c: &BdState) -> LsDecomposition {
    let t = c.t();
    let p = c.p();
    let (lambda, rho_s, ensemble, degenerate) = match project_to_face(&t) {
        Ok(_) => {
            let d = 2.0 * (1.0 - p[3]);
            let rho_s = BdState::from_p([p[0] / d, p[1] / d, p[2] / d, 0.5])
                .expect("face state is physical");
            let lambda = 0.5 * (3.0 + t[0] + t[1] + t[2]);
            (lambda, rho_s, face_ensemble(&lambda_minus(&t)), false)
        }
        Err(_) => {
            let rho_s = BdState::from_t([-1.0 / 3.0; 3]).expect("centroid is physical");
            (0.0, rho_s, face_ensemble(&[0.0; 3]), true)
        }
    };
    LsDecomposition {
        lambda,
        rho_s,
        pure_label: BellLabel::PsiMinus,
        ensemble,
        frame: PauliFrame::Identity,
        degenerate,
    }
}

/// `Σ Λ_α P_α + (1 − λ)|ψ⟩⟨ψ|`.
pub fn reconstruct<D: LsSplit + ?Sized>(d: &D) -> Mat4 {
    d.separable_sum() + d.pure_ket().projector().scale(1.0 - d.lambda())
}

/// Number of octahedron faces through `t` (separability expressions that
/// vanish within [`FACE_TOL`]).
pub fn tight_faces(t: &[f64; 3]) -> usize {
    separability_lhs(t).iter().filter(|v| v.abs() <= FACE_TOL).count()
}
