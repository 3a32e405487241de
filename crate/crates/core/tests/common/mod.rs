#![allow(dead_code)]

use bsa_lab_core::lqcc::{Filtration, LocalOperation, LqccPair, UnitarySpec};
use bsa_lab_core::matcore::{Mat4, C64};
use bsa_lab_core::{BdState, PauliFrame};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const FRAMES: [PauliFrame; 4] = [PauliFrame::Identity, PauliFrame::X, PauliFrame::Y, PauliFrame::Z];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point of the probability simplex.
pub fn simplex<R: Rng>(rng: &mut R) -> [f64; 4] {
    let e: [f64; 4] = std::array::from_fn(|_| -(1.0 - rng.gen::<f64>()).ln());
    let s: f64 = e.iter().sum();
    e.map(|x| x / s)
}

/// Uniform over the singlet tetrahedron `p₄ ≥ ½`, which is the simplex
/// with vertices `e₄` and `(eᵢ + e₄)/2`.
pub fn singlet_tetra<R: Rng>(rng: &mut R) -> BdState {
    let q = simplex(rng);
    BdState::from_p([q[0] / 2.0, q[1] / 2.0, q[2] / 2.0, q[3] / 2.0 + 0.5]).unwrap()
}

/// Strictly entangled singlet-tetrahedron state, away from the face and the
/// vertex by `margin`.
pub fn entangled_singlet<R: Rng>(rng: &mut R, margin: f64) -> BdState {
    loop {
        let s = singlet_tetra(rng);
        let p4 = s.p()[3];
        if p4 > 0.5 + margin && p4 < 1.0 - margin {
            return s;
        }
    }
}

/// Entangled state in a uniformly chosen tetrahedron.
pub fn entangled_any<R: Rng>(rng: &mut R, margin: f64) -> BdState {
    let s = entangled_singlet(rng, margin);
    s.in_frame(FRAMES[rng.gen_range(0..4)])
}

pub fn unit_vector<R: Rng>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.1 && n <= 1.0 {
            return v.map(|x| x / n);
        }
    }
}

pub fn local_op<R: Rng>(rng: &mut R, max_a: f64) -> LocalOperation {
    LocalOperation {
        unitary: UnitarySpec::new(unit_vector(rng), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)).unwrap(),
        filtration: Filtration::new(rng.gen_range(0.3..2.0), rng.gen_range(-max_a..max_a), unit_vector(rng)).unwrap(),
    }
}

pub fn pair<R: Rng>(rng: &mut R, max_a: f64) -> LqccPair {
    LqccPair { a: local_op(rng, max_a), b: local_op(rng, max_a) }
}

/// The separable part written out entrywise in the correlation vector.
pub fn rho_s_explicit(t: [f64; 3]) -> Mat4 {
    let [t1, t2, t3] = t;
    let k = 1.0 / (2.0 * (3.0 + t1 + t2 + t3));
    let d = 1.0 + t3;
    let m = 2.0 + t1 + t2;
    let o = t1 - t2;
    let x = -1.0 - t3;
    Mat4::from_real([[d, 0.0, 0.0, o], [0.0, m, x, 0.0], [0.0, x, m, 0.0], [o, 0.0, 0.0, d]]).scale(k)
}

pub fn max_entry_diff(a: &Mat4, b: &Mat4) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            let d: C64 = a[(i, j)] - b[(i, j)];
            worst = worst.max(d.norm());
        }
    }
    worst
}
