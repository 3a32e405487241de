//! Numerical cross-checks by direct optimization.
//!
//! [`bsa_numeric`] searches for the best separable approximation of an
//! arbitrary two-qubit state: for each trial pure state `ψ` it finds the
//! largest `λ` such that `ρ − (1−λ)|ψ⟩⟨ψ|` is positive and PPT, and it
//! climbs over `ψ` with a random-restart coordinate search.
//! [`rel_entropy_min_numeric`] minimizes the relative entropy over the
//! separable Bell-diagonal octahedron by grid search and Nelder–Mead.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bdstate::{positivity_lhs, BdState};
use crate::matcore::{c, min_eigenvalue, partial_transpose_b, Ket4, Mat4, RangeSplit, C64, RANK_TOL};
use crate::measures::{relative_entropy_bd, validate_density_matrix, MeasureError, DENSITY_TOL};

/// A trial `μ = 1−λ` is feasible when both minimum eigenvalues are at least
/// `−FEAS_SLACK`.
pub const FEAS_SLACK: f64 = 1e-12;

/// Bisection depth for the feasibility boundary.
pub const BISECTION_STEPS: usize = 40;

const GOLDEN_STEPS: usize = 80;
const MIN_STEP: f64 = 1e-7;
const INITIAL_STEP: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),
    #[error("no feasible decomposition found in {restarts} restarts")]
    NonConvergence { restarts: usize },
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
}

impl From<MeasureError> for OracleError {
    fn from(e: MeasureError) -> Self {
        OracleError::NotDensityMatrix(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BsaSearchConfig {
    pub restarts: usize,
    /// Cap on coordinate sweeps per restart.
    pub max_iters: usize,
    pub step_shrink: f64,
    pub seed: u64,
    pub lambda_tol: f64,
}

impl Default for BsaSearchConfig {
    fn default() -> Self {
        BsaSearchConfig { restarts: 32, max_iters: 400, step_shrink: 0.5, seed: 0, lambda_tol: 1e-12 }
    }
}

impl BsaSearchConfig {
    pub fn validate(&self) -> Result<(), OracleError> {
        if self.restarts < 1 {
            return Err(OracleError::InvalidConfig("restarts must be at least 1".into()));
        }
        if self.max_iters < 1 {
            return Err(OracleError::InvalidConfig("max_iters must be at least 1".into()));
        }
        if !(self.step_shrink > 0.0 && self.step_shrink < 1.0) {
            return Err(OracleError::InvalidConfig("step_shrink must lie in (0, 1)".into()));
        }
        if !(self.lambda_tol > 0.0 && self.lambda_tol.is_finite()) {
            return Err(OracleError::InvalidConfig("lambda_tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub lambda_star: f64,
    pub sigma_star: Mat4,
    pub psi_star: Ket4,
    /// Best score after each sweep of the winning restart. Scores are `λ`
    /// once a feasible point is found and below −1 before that.
    pub objective_history: Vec<f64>,
}

/// SplitMix64 finalizer, used to derive per-restart seeds.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// The PRNG of restart `index`.
pub fn restart_rng(seed: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ index as u64))
}

struct Problem {
    rho: Mat4,
    rho_pt: Mat4,
    basis: Vec<Ket4>,
}

#[derive(Debug, Clone, Copy)]
struct Eval {
    /// `λ` if feasible, otherwise `−1 + max_μ h(μ)` which is below −1.
    score: f64,
    mu: f64,
}

impl Problem {
    fn dim(&self) -> usize {
        2 * self.basis.len() - 2
    }

    // Hyperspherical angles → point on the unit sphere of R^{2r−1} → ket in
    // the range with the first coefficient real.
    fn ket(&self, angles: &[f64]) -> Ket4 {
        let n = angles.len() + 1;
        let mut x = vec![0.0; n];
        let mut s = 1.0;
        for (k, a) in angles.iter().enumerate() {
            x[k] = s * a.cos();
            s *= a.sin();
        }
        x[n - 1] = s;
        let mut amps = [C64::new(0.0, 0.0); 4];
        for (k, v) in self.basis.iter().enumerate() {
            let coef = if k == 0 { c(x[0], 0.0) } else { c(x[2 * k - 1], x[2 * k]) };
            for (a, b) in amps.iter_mut().zip(v.amplitudes()) {
                *a += coef * b;
            }
        }
        Ket4::new(amps).unwrap_or_else(|_| self.basis[0])
    }

    // min(eigmin(ρ − μP), eigmin((ρ − μP)^{T_B})), concave in μ.
    fn h(&self, p: &Mat4, p_pt: &Mat4, mu: f64) -> f64 {
        let a = min_eigenvalue(&(self.rho - p.scale(mu)));
        let b = min_eigenvalue(&(self.rho_pt - p_pt.scale(mu)));
        a.min(b)
    }

    fn evaluate(&self, psi: &Ket4) -> Eval {
        let p = psi.projector();
        let p_pt = partial_transpose_b(&p);
        let h = |mu: f64| self.h(&p, &p_pt, mu);
        if h(0.0) >= -FEAS_SLACK {
            return Eval { score: 1.0, mu: 0.0 };
        }
        // Golden-section ascent on [0, 1] until a feasible μ shows up.
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let (mut lo, mut hi) = (0.0, 1.0);
        let mut x1 = hi - g * (hi - lo);
        let mut x2 = lo + g * (hi - lo);
        let (mut f1, mut f2) = (h(x1), h(x2));
        if h(1.0) >= -FEAS_SLACK {
            return self.bisect(&h, 1.0);
        }
        let mut best = f1.max(f2);
        for _ in 0..GOLDEN_STEPS {
            if f1 >= -FEAS_SLACK {
                return self.bisect(&h, x1);
            }
            if f2 >= -FEAS_SLACK {
                return self.bisect(&h, x2);
            }
            if f1 < f2 {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = h(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = h(x1);
            }
            best = best.max(f1).max(f2);
        }
        Eval { score: -1.0 + best, mu: f64::NAN }
    }

    // h(0) < 0 ≤ h(feasible); by concavity there is one crossing between.
    fn bisect(&self, h: &impl Fn(f64) -> f64, feasible: f64) -> Eval {
        let (mut lo, mut hi) = (0.0, feasible);
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if h(mid) >= -FEAS_SLACK {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Eval { score: 1.0 - hi, mu: hi }
    }
}

struct RestartOutcome {
    eval: Eval,
    psi: Ket4,
    history: Vec<f64>,
}

fn run_restart(problem: &Problem, cfg: &BsaSearchConfig, index: usize) -> RestartOutcome {
    let dim = problem.dim();
    let mut rng = restart_rng(cfg.seed, index);
    let mut angles: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
    let mut psi = problem.ket(&angles);
    let mut best = problem.evaluate(&psi);
    let mut history = vec![best.score];
    if dim == 0 {
        return RestartOutcome { eval: best, psi, history };
    }
    let mut step = INITIAL_STEP;
    for _ in 0..cfg.max_iters {
        let mut improved = false;
        for k in 0..dim {
            for sign in [1.0, -1.0] {
                let mut trial = angles.clone();
                trial[k] += sign * step;
                let cand = problem.ket(&trial);
                let e = problem.evaluate(&cand);
                if e.score > best.score {
                    best = e;
                    angles = trial;
                    psi = cand;
                    improved = true;
                    break;
                }
            }
        }
        history.push(best.score);
        if !improved {
            step *= cfg.step_shrink;
            if step < MIN_STEP {
                break;
            }
        }
    }
    RestartOutcome { eval: best, psi, history }
}

/// Maximal `λ` with `ρ = λσ + (1−λ)|ψ⟩⟨ψ|`, `σ` positive and PPT.
///
/// `ψ` ranges over the unit sphere of `range(ρ)` with the first coordinate
/// real, which is six real parameters for a full-rank state. Restarts run in
/// parallel; the best `λ` wins and ties go to the lowest restart index.
pub fn bsa_numeric(rho: &Mat4, cfg: &BsaSearchConfig) -> Result<OracleResult, OracleError> {
    cfg.validate()?;
    let eigen = validate_density_matrix(rho, DENSITY_TOL)?;
    let rho = rho.hermitian_part();
    let basis = RangeSplit::from_eigen(eigen, RANK_TOL).range_basis();
    if basis.is_empty() {
        return Err(OracleError::NotDensityMatrix("zero matrix".into()));
    }
    let problem = Problem { rho, rho_pt: partial_transpose_b(&rho), basis };

    let outcomes: Vec<RestartOutcome> =
        (0..cfg.restarts).into_par_iter().map(|i| run_restart(&problem, cfg, i)).collect();
    let mut winner = 0;
    for (i, o) in outcomes.iter().enumerate() {
        if o.eval.score > outcomes[winner].eval.score {
            winner = i;
        }
    }
    let o = &outcomes[winner];
    if o.eval.score < 0.0 {
        return Err(OracleError::NonConvergence { restarts: cfg.restarts });
    }

    let mut lambda = 1.0 - o.eval.mu;
    let sigma = if lambda <= cfg.lambda_tol {
        lambda = 0.0;
        Mat4::identity().scale(0.25)
    } else {
        (problem.rho - o.psi.projector().scale(o.eval.mu)).scale(1.0 / lambda)
    };
    Ok(OracleResult {
        lambda_star: lambda,
        sigma_star: sigma,
        psi_star: o.psi,
        objective_history: running_max(&o.history),
    })
}

fn running_max(xs: &[f64]) -> Vec<f64> {
    let mut best = f64::NEG_INFINITY;
    xs.iter()
        .map(|&x| {
            best = best.max(x);
            best
        })
        .collect()
}

// Radial map of R³ onto the octahedron |t₁|+|t₂|+|t₃| ≤ 1.
fn to_octahedron(u: [f64; 3]) -> [f64; 3] {
    let l1 = u.iter().map(|x| x.abs()).sum::<f64>();
    if l1 > 1.0 {
        u.map(|x| x / l1)
    } else {
        u
    }
}

fn q_of(t: [f64; 3]) -> [f64; 4] {
    positivity_lhs(&t).map(|x| (0.25 * x).max(0.0))
}

/// Minimizes `S(ρ‖σ)` over separable Bell-diagonal `σ`. A grid of
/// `grid_n` points per axis seeds a Nelder–Mead refinement. Separable input
/// is its own minimizer with value 0.
pub fn rel_entropy_min_numeric(s: &BdState, grid_n: usize) -> (BdState, f64) {
    if s.is_separable() {
        return (*s, 0.0);
    }
    let p = s.p();
    let f = |u: [f64; 3]| relative_entropy_bd(&p, &q_of(to_octahedron(u))).value;

    let n = grid_n.max(2);
    let node = |k: usize| -1.0 + 2.0 * k as f64 / (n - 1) as f64;
    let mut start = [0.0; 3];
    let mut fstart = f(start);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let u = [node(i), node(j), node(k)];
                if u.iter().map(|x| x.abs()).sum::<f64>() > 1.0 + 1e-12 {
                    continue;
                }
                let v = f(u);
                if v < fstart {
                    start = u;
                    fstart = v;
                }
            }
        }
    }

    let mut size = 2.0 / (n - 1) as f64;
    let mut x = start;
    let mut fx = fstart;
    for _ in 0..8 {
        let (nx, nf) = nelder_mead(&f, x, size);
        let done = fx - nf <= 1e-15;
        x = nx;
        fx = nf;
        if done {
            break;
        }
        size = 1e-3;
    }
    let t = to_octahedron(x);
    let sigma = BdState::from_p(q_of(t)).expect("octahedron points are physical");
    (sigma, fx)
}

fn nelder_mead(f: &impl Fn([f64; 3]) -> f64, x0: [f64; 3], size: f64) -> ([f64; 3], f64) {
    let mut pts = vec![x0];
    for k in 0..3 {
        let mut v = x0;
        v[k] += size;
        pts.push(v);
    }
    let mut vals: Vec<f64> = pts.iter().map(|&v| f(v)).collect();
    let lerp = |a: [f64; 3], b: [f64; 3], s: f64| -> [f64; 3] { std::array::from_fn(|i| a[i] + s * (b[i] - a[i])) };

    for _ in 0..20_000 {
        let mut order = [0usize, 1, 2, 3];
        order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
        pts = order.iter().map(|&i| pts[i]).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let diam = pts[1..]
            .iter()
            .map(|v| (0..3).map(|i| (v[i] - pts[0][i]).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if diam < 1e-13 || (vals[3] - vals[0]).abs() < 1e-17 && diam < 1e-9 {
            break;
        }

        let centroid: [f64; 3] = std::array::from_fn(|i| (pts[0][i] + pts[1][i] + pts[2][i]) / 3.0);
        let refl = lerp(centroid, pts[3], -1.0);
        let fr = f(refl);
        if fr < vals[0] {
            let exp = lerp(centroid, pts[3], -2.0);
            let fe = f(exp);
            if fe < fr {
                pts[3] = exp;
                vals[3] = fe;
            } else {
                pts[3] = refl;
                vals[3] = fr;
            }
            continue;
        }
        if fr < vals[2] {
            pts[3] = refl;
            vals[3] = fr;
            continue;
        }
        let (con, fc) = if fr < vals[3] {
            let v = lerp(centroid, refl, 0.5);
            (v, f(v))
        } else {
            let v = lerp(centroid, pts[3], 0.5);
            (v, f(v))
        };
        if fc < vals[3].min(fr) {
            pts[3] = con;
            vals[3] = fc;
            continue;
        }
        for k in 1..4 {
            pts[k] = lerp(pts[0], pts[k], 0.5);
            vals[k] = f(pts[k]);
        }
    }
    let best = (0..4).min_by(|&i, &j| vals[i].total_cmp(&vals[j])).unwrap();
    (pts[best], vals[best])
}
