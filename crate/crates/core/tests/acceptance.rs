//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use bsa_lab_core::lqcc::{
    apply_lqcc, predict_concurrence, transform_decomposition, verify_transformed_optimality, LqccPair,
};
use bsa_lab_core::lsd::{face_kets, lambda_minus};
use bsa_lab_core::matcore::{eigvalsh, partial_transpose_b};
use bsa_lab_core::measures::{closest_separable_bd, relative_entropy_bd, wootters_concurrence};
use bsa_lab_core::optimality::{rank_conditions, verify_bsa, RankCheck};
use bsa_lab_core::oracle::{bsa_numeric, rel_entropy_min_numeric, BsaSearchConfig};
use bsa_lab_core::{bsa_bd, reconstruct, BdState, BellLabel, LsDecomposition, LsSplit};
use common::*;
use rand::Rng;

struct Outcome {
    id: usize,
    pass: bool,
    detail: String,
}

fn report(id: usize, pass: bool, detail: String) -> Outcome {
    Outcome { id, pass, detail }
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn lambda_identity(sample: &[BdState]) -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for s in sample {
        let d = bsa_bd(s);
        let c = wootters_concurrence(&s.density_matrix()).unwrap().value;
        worst = worst.max((d.lambda - (1.0 - c)).abs());
    }
    let elapsed = start.elapsed();
    report(
        1,
        worst <= 1e-10 && elapsed <= Duration::from_secs(10),
        format!("lambda = 1 - C on {} states: max |diff| {worst:.3e} (<= 1e-10), {:.2}s (<= 10s)", sample.len(), secs(elapsed)),
    )
}

fn reconstruction(sample: &[BdState]) -> Outcome {
    let worst = sample
        .iter()
        .map(|s| {
            let d = bsa_bd(s);
            let pure = BellLabel::PsiMinus.ket().projector().scale(1.0 - d.lambda);
            let a = (d.rho_s.density_matrix().scale(d.lambda) + pure - s.density_matrix()).frobenius_norm();
            let b = (reconstruct(&d) - s.density_matrix()).frobenius_norm();
            a.max(b)
        })
        .fold(0.0, f64::max);
    report(2, worst <= 1e-12, format!("reconstruction on {} states: max residual {worst:.3e} (<= 1e-12)", sample.len()))
}

fn face_geometry(sample: &[BdState]) -> Outcome {
    let mut face = 0.0f64;
    let mut min_pt = f64::INFINITY;
    for s in sample {
        let d = bsa_bd(s);
        let t = d.rho_s.t();
        face = face.max((t[0] + t[1] + t[2] + 1.0).abs());
        min_pt = min_pt.min(eigvalsh(&partial_transpose_b(&d.rho_s.density_matrix()))[0]);
    }
    let mut entry = 0.0f64;
    for s in &sample[..100] {
        let d = bsa_bd(s);
        entry = entry.max(max_entry_diff(&d.rho_s.density_matrix(), &rho_s_explicit(s.t())));
    }
    report(
        3,
        face <= 1e-10 && min_pt >= -1e-10 && entry <= 1e-12,
        format!(
            "rho_s on face: max |t'1+t'2+t'3+1| {face:.3e} (<= 1e-10), min PT eig {min_pt:.3e} (>= -1e-10), explicit form on 100 states {entry:.3e} (<= 1e-12)"
        ),
    )
}

fn ensemble(sample: &[BdState]) -> Outcome {
    let mut weight = 0.0f64;
    let mut sum = 0.0f64;
    for s in sample {
        let d = bsa_bd(s);
        let total: f64 = d.ensemble.iter().map(|e| e.weight).sum();
        weight = weight.max((total - d.lambda).abs());
        sum = sum.max((d.separable_sum() - d.rho_s.density_matrix().scale(d.lambda)).frobenius_norm());
    }
    let worked = BdState::from_p([0.1, 0.1, 0.1, 0.7]).unwrap();
    let lm = lambda_minus(&worked.t());
    let worked_ok = lm.iter().all(|x| (x - 0.2).abs() <= 1e-12);
    let kets_ok = face_kets().iter().all(|k| k.is_product(1e-12));
    report(
        4,
        weight <= 1e-12 && sum <= 1e-12 && worked_ok && kets_ok,
        format!(
            "ensemble: max |sum L - lambda| {weight:.3e}, max |sum L P - lambda rho_s| {sum:.3e} (<= 1e-12), worked lambda_i^- = {lm:?}"
        ),
    )
}

fn perturbed(d: &LsDecomposition, alpha: usize, eps: f64) -> LsDecomposition {
    let mut out = d.clone();
    out.ensemble[alpha].weight += eps;
    out.lambda += eps;
    out
}

fn optimality() -> Outcome {
    let mut rng = rng(5);
    let start = Instant::now();
    let mut passed = 0;
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let s = entangled_any(&mut rng, 1e-6);
        let r = verify_bsa(&s.density_matrix(), &bsa_bd(&s)).unwrap();
        worst = worst.max(r.max_residual);
        passed += r.passed as usize;
    }
    let mut caught = 0;
    for _ in 0..100 {
        // Keep λ + ε ≤ 1 so the perturbed weights stay structurally valid.
        let (s, d) = loop {
            let s = entangled_any(&mut rng, 1e-3);
            let d = bsa_bd(&s);
            if d.lambda + 1e-2 <= 1.0 {
                break (s, d);
            }
        };
        let alpha = rng.gen_range(0..d.ensemble.len());
        let r = verify_bsa(&s.density_matrix(), &perturbed(&d, alpha, 1e-2)).unwrap();
        let lemma_flag = r.lemma1_checks.iter().any(|c| c.residual > r.tolerance || c.min_eigenvalue < -1e-9);
        caught += (!r.passed && lemma_flag) as usize;
    }
    let elapsed = start.elapsed();
    report(
        5,
        passed == 1000 && worst <= 1e-8 && caught == 100 && elapsed <= Duration::from_secs(60),
        format!(
            "verify_bsa: {passed}/1000 pass, max residual {worst:.3e} (<= 1e-8); eps=1e-2 perturbation rejected {caught}/100; {:.2}s (<= 60s)",
            secs(elapsed)
        ),
    )
}

fn rank_conditions_check() -> Outcome {
    let mut rng = rng(6);
    let phi_plus = BellLabel::PhiPlus.ket();
    let mut kernel_eig = 0.0f64;
    let mut fidelity = 1.0f64;
    let mut cond_i = 0;
    for _ in 0..1000 {
        let s = entangled_singlet(&mut rng, 1e-6);
        let d = bsa_bd(&s);
        let r = rank_conditions(&d.rho_s.density_matrix(), &d.pure_part()).unwrap();
        kernel_eig = kernel_eig.max(r.kernel_eigenvalue.abs());
        fidelity = fidelity.min(r.kernel.fidelity(&phi_plus));
        cond_i += r.condition_i.holds as usize;
    }
    // Face-boundary states: one of p₁..p₃ vanishes, so ρ_s has rank 3.
    let mut engaged = 0;
    let mut ii_holds = 0;
    for k in 0..100 {
        let mut p = entangled_singlet(&mut rng, 1e-3).p();
        let zero = k % 3;
        let moved = p[zero];
        p[zero] = 0.0;
        p[(zero + 1) % 3] += moved;
        let s = BdState::from_p(p).unwrap();
        let d = bsa_bd(&s);
        if let Some(RankCheck::Report(r)) = verify_bsa(&s.density_matrix(), &d).unwrap().rank_check {
            if let Some(c2) = r.condition_ii {
                engaged += 1;
                ii_holds += c2.holds as usize;
            }
        }
    }
    report(
        6,
        kernel_eig <= 1e-10 && fidelity >= 1.0 - 1e-10 && cond_i == 1000 && engaged == 100,
        format!(
            "rank: max |kernel eig| {kernel_eig:.3e} (<= 1e-10), min fidelity with phi+ {fidelity:.12} (>= 1-1e-10), condition (i) {cond_i}/1000; face-boundary: condition (ii) engaged {engaged}/100 (holds {ii_holds}/100)"
        ),
    )
}

fn oracle_agreement() -> Outcome {
    let mut rng = rng(7);
    let cfg = BsaSearchConfig { seed: 2024, ..Default::default() };
    let psi_minus = BellLabel::PsiMinus.ket();
    let mut worst_lambda = 0.0f64;
    let mut worst_fid = 1.0f64;
    let mut slowest = Duration::ZERO;
    let n = 20;
    for _ in 0..n {
        let s = entangled_singlet(&mut rng, 1e-2);
        let start = Instant::now();
        let r = bsa_numeric(&s.density_matrix(), &cfg).unwrap();
        slowest = slowest.max(start.elapsed());
        worst_lambda = worst_lambda.max((r.lambda_star - bsa_bd(&s).lambda).abs());
        worst_fid = worst_fid.min(r.psi_star.fidelity(&psi_minus));
    }
    report(
        7,
        worst_lambda <= 1e-4 && worst_fid >= 1.0 - 1e-4 && slowest <= Duration::from_secs(60),
        format!(
            "oracle on {n} states: max |lambda* - lambda| {worst_lambda:.3e} (<= 1e-4), min fidelity {worst_fid:.8} (>= 1-1e-4), slowest {:.2}s (<= 60s)",
            secs(slowest)
        ),
    )
}

fn entropy_minimizer() -> Outcome {
    let mut rng = rng(8);
    let mut arg = 0.0f64;
    let mut val = 0.0f64;
    let n = 24;
    for _ in 0..n {
        let s = entangled_any(&mut rng, 1e-2);
        let (sigma, v) = rel_entropy_min_numeric(&s, 21);
        let closed = closest_separable_bd(&s).unwrap().state;
        let dt = sigma.t().iter().zip(closed.t()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        arg = arg.max(dt);
        val = val.max((v - relative_entropy_bd(&s.p(), &closed.p()).value).abs());
    }
    report(
        8,
        arg <= 1e-4 && val <= 1e-6,
        format!("relative-entropy minimizer on {n} states: max argmin distance {arg:.3e} (<= 1e-4), max value diff {val:.3e} (<= 1e-6)"),
    )
}

fn lqcc_law() -> Outcome {
    let mut rng = rng(9);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let s = entangled_any(&mut rng, 1e-6);
        let pair = pair(&mut rng, 0.9);
        let rho = s.density_matrix();
        let predicted = predict_concurrence(&rho, &pair).unwrap();
        let (out, _) = apply_lqcc(&rho, &pair).unwrap();
        let measured = wootters_concurrence(&out).unwrap().value;
        worst = worst.max((predicted - measured).abs());
    }
    report(9, worst <= 1e-10, format!("LQCC concurrence law on 1000 samples: max |pred - measured| {worst:.3e} (<= 1e-10)"))
}

fn transformed() -> Outcome {
    let mut rng = rng(10);
    let mut recon = 0.0f64;
    let mut cov = 0.0f64;
    for _ in 0..1000 {
        let s = entangled_any(&mut rng, 1e-6);
        let pair = pair(&mut rng, 0.9);
        let td = transform_decomposition(&bsa_bd(&s), &pair).unwrap();
        recon = recon.max((reconstruct(&td) - td.rho).frobenius_norm());
        let c = wootters_concurrence(&td.rho).unwrap().value;
        cov = cov.max(((1.0 - td.lambda) * td.pure_part.concurrence() - c).abs());
    }
    let mut same = 0;
    for _ in 0..100 {
        let s = entangled_singlet(&mut rng, 1e-3);
        let pair = LqccPair::symmetric(local_op(&mut rng, 0.9));
        let td = transform_decomposition(&bsa_bd(&s), &pair).unwrap();
        let v = verify_transformed_optimality(&td, &pair).unwrap();
        same += (v.guaranteed && v.report.passed) as usize;
    }
    let mut framed = 0;
    for _ in 0..100 {
        let s = entangled_any(&mut rng, 1e-3);
        let d = bsa_bd(&s);
        let pair = LqccPair::symmetric_in(local_op(&mut rng, 0.9), d.frame);
        let td = transform_decomposition(&d, &pair).unwrap();
        let v = verify_transformed_optimality(&td, &pair).unwrap();
        framed += (v.guaranteed && v.report.passed) as usize;
    }
    report(
        10,
        recon <= 1e-12 && cov <= 1e-10 && same == 100 && framed == 100,
        format!(
            "transformed decomposition: max reconstruction {recon:.3e} (<= 1e-12), max covariance diff {cov:.3e} (<= 1e-10), A=B verified {same}/100, A.S=B verified {framed}/100"
        ),
    )
}

fn main() {
    let mut rng = rng(1);
    let sample: Vec<BdState> = (0..10_000).map(|_| entangled_singlet(&mut rng, 0.0)).collect();

    let outcomes = vec![
        lambda_identity(&sample),
        reconstruction(&sample),
        face_geometry(&sample),
        ensemble(&sample),
        optimality(),
        rank_conditions_check(),
        oracle_agreement(),
        entropy_minimizer(),
        lqcc_law(),
        transformed(),
    ];
    let mut failed = 0;
    for o in &outcomes {
        println!("criterion {:>2}: {}  {}", o.id, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += (!o.pass) as usize;
    }
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
