use std::path::Path;
use std::time::Instant;

use bsa_lab_core::bdstate::positivity_lhs;
use bsa_lab_core::lqcc::{
    apply_lqcc, predict_concurrence, transform_decomposition, verify_transformed_optimality, Filtration, LocalOperation,
    LqccPair, TransformedVerification, UnitarySpec,
};
use bsa_lab_core::matcore::{Ket4, Mat4};
use bsa_lab_core::measures::{closest_separable_bd, relative_entropy, relative_entropy_bd, wootters_concurrence};
use bsa_lab_core::optimality::{verify_bsa_with_tol, VerificationReport, VERIFY_TOL};
use bsa_lab_core::oracle::{bsa_numeric, rel_entropy_min_numeric, BsaSearchConfig, OracleError, OracleResult};
use bsa_lab_core::{bsa_bd, reconstruct, BdState, BellLabel, EnsembleTerm, PauliFrame};
use serde::Serialize;

use crate::report::{to_json, Report};
use crate::state::StateSpec;
use crate::{Cli, CliError, Command, FrameChoice, GeometryFormat, OpArgs, StateArgs};

pub struct CommandOutput {
    pub text: String,
    /// Set when the command ran but its check failed (exit code 1).
    pub failure: Option<String>,
}

fn ok(text: String) -> CommandOutput {
    CommandOutput { text, failure: None }
}

pub fn run(cli: &Cli) -> Result<CommandOutput, CliError> {
    let started = Instant::now();
    match &cli.command {
        Command::Decompose { state, frame } => decompose(state, *frame, cli.seed, started),
        Command::Verify { state, strict, perturb, perturb_term } => {
            verify(state, *strict, *perturb, *perturb_term, cli.seed, started)
        }
        Command::Lqcc { state, pair_file, op, check } => {
            lqcc(state, pair_file.as_deref(), op, *check, cli.seed, started)
        }
        Command::Entropy { state, grid } => entropy(state, *grid, cli.seed, started),
        Command::Oracle { state, config_file, restarts, max_iters, step_shrink, lambda_tol, grid } => {
            let mut cfg = match config_file {
                Some(path) => read_json::<BsaSearchConfig>(path)?,
                None => BsaSearchConfig::default(),
            };
            cfg.seed = cli.seed.unwrap_or(cfg.seed);
            cfg.restarts = restarts.unwrap_or(cfg.restarts);
            cfg.max_iters = max_iters.unwrap_or(cfg.max_iters);
            cfg.step_shrink = step_shrink.unwrap_or(cfg.step_shrink);
            cfg.lambda_tol = lambda_tol.unwrap_or(cfg.lambda_tol);
            oracle(state, cfg, *grid, started)
        }
        Command::Geometry { resolution, format } => geometry(*resolution, *format, cli.seed, started),
    }
}

fn spec(s: &StateArgs) -> Result<StateSpec, CliError> {
    StateSpec::from_args(s.p.as_deref(), s.t.as_deref(), s.matrix_file.as_deref())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct StateInputs {
    state: StateSpec,
}

#[derive(Serialize)]
struct SepPart {
    p: [f64; 4],
    t: [f64; 3],
    matrix: Mat4,
}

impl SepPart {
    fn of(s: &BdState) -> Self {
        SepPart { p: s.p(), t: s.t(), matrix: s.density_matrix() }
    }
}

#[derive(Serialize)]
struct PurePart {
    label: BellLabel,
    ket: Ket4,
}

#[derive(Serialize)]
struct DecomposeOutputs {
    frame: &'static str,
    pauli_frame: PauliFrame,
    separable: bool,
    tetra_id: Option<BellLabel>,
    lambda: f64,
    rho_s: SepPart,
    pure_part: PurePart,
    ensemble: Vec<EnsembleTerm>,
    concurrence: f64,
    degenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'static str>,
}

#[derive(Serialize)]
struct DecomposeResiduals {
    lambda_vs_concurrence: f64,
    reconstruction: f64,
}

#[derive(Serialize)]
struct WithResiduals<O: Serialize, R: Serialize> {
    #[serde(flatten)]
    outputs: O,
    residuals: R,
}

fn decompose(
    args: &StateArgs,
    frame: FrameChoice,
    seed: Option<u64>,
    started: Instant,
) -> Result<CommandOutput, CliError> {
    let spec = spec(args)?;
    let s = spec.bd_state()?;
    let full = bsa_bd(&s);
    let (d, shown) = match frame {
        FrameChoice::Original => (full.clone(), s),
        FrameChoice::Canonical => (full.canonical(), s.in_frame(full.frame)),
    };
    let rho = shown.density_matrix();
    let concurrence = wootters_concurrence(&rho).map_err(|e| CliError::Input(e.to_string()))?.value;
    let note = if d.degenerate {
        Some("pure Bell state: lambda is 0 and rho_s is the centroid of the separability face by convention")
    } else if s.is_separable() {
        Some("separable state: lambda is 1 and the pure part has weight 0")
    } else {
        None
    };
    let outputs = DecomposeOutputs {
        frame: match frame {
            FrameChoice::Original => "original",
            FrameChoice::Canonical => "canonical",
        },
        pauli_frame: full.frame,
        separable: s.is_separable(),
        tetra_id: s.tetra_id(),
        lambda: d.lambda,
        rho_s: SepPart::of(&d.rho_s),
        pure_part: PurePart { label: d.pure_label, ket: d.pure_part() },
        ensemble: d.ensemble.clone(),
        concurrence,
        degenerate: d.degenerate,
        note,
    };
    let residuals = DecomposeResiduals {
        lambda_vs_concurrence: (d.lambda - (1.0 - concurrence)).abs(),
        reconstruction: (reconstruct(&d) - rho).frobenius_norm(),
    };
    let r = Report::new("decompose", seed, StateInputs { state: spec }, WithResiduals { outputs, residuals }, started);
    Ok(ok(to_json(&r)))
}

#[derive(Serialize)]
struct VerifyInputs {
    state: StateSpec,
    strict: bool,
    tolerance: f64,
    perturb: Option<f64>,
    perturb_term: usize,
}

#[derive(Serialize)]
struct VerifyOutputs {
    lambda: f64,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<VerificationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn verify(
    args: &StateArgs,
    strict: bool,
    perturb: Option<f64>,
    perturb_term: usize,
    seed: Option<u64>,
    started: Instant,
) -> Result<CommandOutput, CliError> {
    let spec = spec(args)?;
    let s = spec.bd_state()?;
    let tol = if strict { VERIFY_TOL / 10.0 } else { VERIFY_TOL };
    let mut d = bsa_bd(&s);
    if let Some(eps) = perturb {
        if perturb_term == 0 || perturb_term > d.ensemble.len() {
            return Err(CliError::Input(format!(
                "--perturb-term must be in 1..={}, got {perturb_term}",
                d.ensemble.len()
            )));
        }
        d.ensemble[perturb_term - 1].weight += eps;
        d.lambda += eps;
    }
    // A perturbed split can be structurally invalid; that is a failed check.
    let (report, error) = match verify_bsa_with_tol(&s.density_matrix(), &d, tol) {
        Ok(r) => (Some(r), None),
        Err(e) if perturb.is_some() => (None, Some(e.to_string())),
        Err(e) => return Err(CliError::Input(e.to_string())),
    };
    let passed = report.as_ref().is_some_and(|r| r.passed);
    let outputs = VerifyOutputs { lambda: d.lambda, passed, report, error };
    let inputs = VerifyInputs { state: spec, strict, tolerance: tol, perturb, perturb_term };
    let text = to_json(&Report::new("verify", seed, inputs, outputs, started));
    let failure = (!passed).then(|| "verification failed".to_string());
    Ok(CommandOutput { text, failure })
}

fn axis(s: &str) -> Result<[f64; 3], CliError> {
    match s.trim().to_ascii_lowercase().as_str() {
        "x" => return Ok([1.0, 0.0, 0.0]),
        "y" => return Ok([0.0, 1.0, 0.0]),
        "z" => return Ok([0.0, 0.0, 1.0]),
        _ => {}
    }
    let v: Result<Vec<f64>, _> = s.split(',').map(|x| x.trim().parse::<f64>()).collect();
    match v {
        Ok(v) if v.len() == 3 => Ok([v[0], v[1], v[2]]),
        _ => Err(CliError::Input(format!("axis {s:?} is not x, y, z or three comma-separated numbers"))),
    }
}

fn local_op(mu: f64, a: f64, m: &str, rot: &str, angle: f64, phase: f64) -> Result<LocalOperation, CliError> {
    let input = |e: bsa_lab_core::lqcc::LqccError| CliError::Input(e.to_string());
    Ok(LocalOperation {
        unitary: UnitarySpec::new(axis(rot)?, angle, phase).map_err(input)?,
        filtration: Filtration::new(mu, a, axis(m)?).map_err(input)?,
    })
}

fn pair_from(op: &OpArgs, file: Option<&Path>) -> Result<LqccPair, CliError> {
    if let Some(path) = file {
        return read_json(path);
    }
    let a = local_op(op.mu, op.a, &op.axis, &op.rot_axis, op.angle, op.phase)?;
    if op.same_ab {
        return Ok(LqccPair::symmetric(a));
    }
    let b = local_op(op.mu_b, op.b, &op.axis_b, &op.rot_axis_b, op.angle_b, op.phase_b)?;
    Ok(LqccPair { a, b })
}

#[derive(Serialize)]
struct LqccInputs {
    state: StateSpec,
    pair: LqccPair,
    check: bool,
}

#[derive(Serialize)]
struct ConcurrenceCheck {
    source: f64,
    predicted: f64,
    measured: f64,
}

#[derive(Serialize)]
struct LqccOutputs {
    norm: f64,
    rho: Mat4,
    lambda: f64,
    rho_s: Mat4,
    pure_part: Ket4,
    ensemble: Vec<EnsembleTerm>,
    concurrence: ConcurrenceCheck,
    /// `A·S = B` up to phase in the source's canonical frame.
    symmetric: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    optimality: Option<TransformedVerification>,
}

#[derive(Serialize)]
struct LqccResiduals {
    concurrence_law: f64,
    covariance: f64,
    reconstruction: f64,
}

fn lqcc(
    args: &StateArgs,
    pair_file: Option<&Path>,
    op: &OpArgs,
    check: bool,
    seed: Option<u64>,
    started: Instant,
) -> Result<CommandOutput, CliError> {
    let spec = spec(args)?;
    let s = spec.bd_state()?;
    let pair = pair_from(op, pair_file)?;
    let input = |e: bsa_lab_core::lqcc::LqccError| CliError::Input(e.to_string());
    let rho = s.density_matrix();
    let d = bsa_bd(&s);
    let td = transform_decomposition(&d, &pair).map_err(input)?;
    let source = wootters_concurrence(&rho).map_err(|e| CliError::Input(e.to_string()))?.value;
    let predicted = predict_concurrence(&rho, &pair).map_err(input)?;
    // The image of the input itself, not of its reconstruction.
    let (rho_t, _) = apply_lqcc(&rho, &pair).map_err(input)?;
    let measured = wootters_concurrence(&rho_t).map_err(|e| CliError::Input(e.to_string()))?.value;
    let symmetric = pair.symmetric_in_frame(d.frame);
    let optimality = if symmetric || check {
        Some(verify_transformed_optimality(&td, &pair).map_err(input)?)
    } else {
        None
    };
    let failure = optimality
        .as_ref()
        .filter(|v| v.guaranteed && !v.report.passed)
        .map(|_| "transformed decomposition failed verification for a symmetric pair".to_string());
    let residuals = LqccResiduals {
        concurrence_law: (predicted - measured).abs(),
        covariance: ((1.0 - td.lambda) * td.pure_part.concurrence() - measured).abs(),
        reconstruction: (reconstruct(&td) - rho_t).frobenius_norm(),
    };
    let outputs = LqccOutputs {
        norm: td.norm,
        rho: rho_t,
        lambda: td.lambda,
        rho_s: td.rho_s,
        pure_part: td.pure_part,
        ensemble: td.ensemble.clone(),
        concurrence: ConcurrenceCheck { source, predicted, measured },
        symmetric,
        optimality,
    };
    let inputs = LqccInputs { state: spec, pair, check };
    let text = to_json(&Report::new("lqcc", seed, inputs, WithResiduals { outputs, residuals }, started));
    Ok(CommandOutput { text, failure })
}

#[derive(Serialize)]
struct NumericEntropy {
    grid: usize,
    argmin: BdState,
    value: f64,
    argmin_distance: f64,
    value_difference: f64,
}

#[derive(Serialize)]
struct EntropyOutputs {
    closest_separable: BdState,
    separable_input: bool,
    /// Nats; null if infinite.
    value: f64,
    support_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    numeric: Option<NumericEntropy>,
}

#[derive(Serialize)]
struct GridInputs {
    state: StateSpec,
    grid: Option<usize>,
}

fn numeric_entropy(s: &BdState, closest: &BdState, value: f64, grid: usize) -> NumericEntropy {
    let (argmin, v) = rel_entropy_min_numeric(s, grid);
    let argmin_distance = argmin.t().iter().zip(closest.t()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    NumericEntropy { grid, argmin, value: v, argmin_distance, value_difference: (v - value).abs() }
}

fn entropy(args: &StateArgs, grid: Option<usize>, seed: Option<u64>, started: Instant) -> Result<CommandOutput, CliError> {
    let spec = spec(args)?;
    let s = spec.bd_state()?;
    let closest = closest_separable_bd(&s).map_err(|e| CliError::Input(e.to_string()))?;
    let rel = relative_entropy(&s.density_matrix(), &closest.state.density_matrix())
        .map_err(|e| CliError::Input(e.to_string()))?;
    let numeric = grid.map(|g| numeric_entropy(&s, &closest.state, rel.value, g));
    let outputs = EntropyOutputs {
        closest_separable: closest.state,
        separable_input: closest.separable_input,
        value: rel.value,
        support_ok: rel.support_ok,
        numeric,
    };
    let text = to_json(&Report::new("entropy", seed, GridInputs { state: spec, grid }, outputs, started));
    Ok(ok(text))
}

#[derive(Serialize)]
struct OracleInputs {
    state: StateSpec,
    config: BsaSearchConfig,
    grid: Option<usize>,
}

#[derive(Serialize)]
struct ClosedForm {
    lambda: f64,
    lambda_difference: f64,
    psi_fidelity: f64,
}

#[derive(Serialize)]
struct OracleOutputs {
    result: OracleResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form: Option<ClosedForm>,
    #[serde(skip_serializing_if = "Option::is_none")]
    entropy: Option<NumericEntropy>,
}

fn oracle(args: &StateArgs, cfg: BsaSearchConfig, grid: Option<usize>, started: Instant) -> Result<CommandOutput, CliError> {
    let spec = spec(args)?;
    let rho = spec.matrix()?;
    let result = bsa_numeric(&rho, &cfg).map_err(|e| match e {
        OracleError::NonConvergence { .. } => CliError::NonConvergence(e.to_string()),
        other => CliError::Input(other.to_string()),
    })?;
    let bd = BdState::from_density_matrix(&rho).ok();
    let closed_form = bd.map(|s| {
        let d = bsa_bd(&s);
        ClosedForm {
            lambda: d.lambda,
            lambda_difference: (result.lambda_star - d.lambda).abs(),
            psi_fidelity: result.psi_star.fidelity(&d.pure_part()),
        }
    });
    let entropy = match (bd, grid) {
        (Some(s), Some(g)) if !s.is_separable() => closest_separable_bd(&s).ok().map(|c| {
            let v = relative_entropy_bd(&s.p(), &c.state.p()).value;
            numeric_entropy(&s, &c.state, v, g)
        }),
        _ => None,
    };
    let outputs = OracleOutputs { result, closed_form, entropy };
    let inputs = OracleInputs { state: spec, config: cfg, grid };
    Ok(ok(to_json(&Report::new("oracle", Some(cfg.seed), inputs, outputs, started))))
}

#[derive(Serialize)]
struct Vertex {
    name: String,
    t: [f64; 3],
}

#[derive(Serialize)]
struct TetraFace {
    /// Bell state at the opposite vertex.
    opposite: BellLabel,
    vertices: [BellLabel; 3],
}

#[derive(Serialize)]
struct OctaFace {
    /// The face is `normal · t = 1`.
    normal: [f64; 3],
    vertices: [String; 3],
    /// Entangled tetrahedron whose separable parts lie on this face.
    separability_face_of: Option<BellLabel>,
}

#[derive(Serialize)]
struct Point {
    t: [f64; 3],
    region: String,
}

#[derive(Serialize)]
struct GeometryOutputs {
    tetrahedron: Vec<Vertex>,
    tetrahedron_faces: Vec<TetraFace>,
    octahedron: Vec<Vertex>,
    octahedron_faces: Vec<OctaFace>,
    points: Vec<Point>,
}

#[derive(Serialize)]
struct GeometryInputs {
    resolution: usize,
}

fn octa_name(axis: usize, plus: bool) -> String {
    format!("O{}{}", axis + 1, if plus { '+' } else { '-' })
}

fn region(t: [f64; 3]) -> String {
    if positivity_lhs(&t).iter().any(|&x| x < -1e-12) {
        return "unphysical".into();
    }
    match BdState::from_t(t) {
        Ok(s) => match s.tetra_id() {
            None => "separable".into(),
            Some(label) => format!("entangled_{}", label.name()),
        },
        Err(_) => "unphysical".into(),
    }
}

fn grid_points(n: usize) -> Vec<Point> {
    if n == 0 {
        return Vec::new();
    }
    let x = |k: usize| -1.0 + 2.0 * k as f64 / n as f64;
    let mut out = Vec::with_capacity((n + 1).pow(3));
    for i in 0..=n {
        for j in 0..=n {
            for k in 0..=n {
                let t = [x(i), x(j), x(k)];
                out.push(Point { t, region: region(t) });
            }
        }
    }
    out
}

fn geometry(n: usize, format: GeometryFormat, seed: Option<u64>, started: Instant) -> Result<CommandOutput, CliError> {
    let points = grid_points(n);
    if format == GeometryFormat::Csv {
        let mut text = String::from("t1,t2,t3,region\n");
        for p in &points {
            text.push_str(&format!("{:.16e},{:.16e},{:.16e},{}\n", p.t[0], p.t[1], p.t[2], p.region));
        }
        return Ok(ok(text));
    }
    let tetrahedron = BellLabel::ALL.iter().map(|l| Vertex { name: l.name().into(), t: l.vertex() }).collect();
    let tetrahedron_faces = BellLabel::ALL
        .iter()
        .map(|&opp| {
            let mut rest = BellLabel::ALL.iter().copied().filter(|&l| l != opp);
            let vertices = [rest.next().unwrap(), rest.next().unwrap(), rest.next().unwrap()];
            TetraFace { opposite: opp, vertices }
        })
        .collect();
    let mut octahedron = Vec::new();
    for axis in 0..3 {
        for plus in [true, false] {
            let mut t = [0.0; 3];
            t[axis] = if plus { 1.0 } else { -1.0 };
            octahedron.push(Vertex { name: octa_name(axis, plus), t });
        }
    }
    let mut octahedron_faces = Vec::new();
    for code in 0..8 {
        let normal: [f64; 3] = std::array::from_fn(|i| if code >> (2 - i) & 1 == 0 { 1.0 } else { -1.0 });
        let vertices = std::array::from_fn(|i| octa_name(i, normal[i] > 0.0));
        let separability_face_of = BellLabel::ALL.iter().copied().find(|l| l.vertex() == normal);
        octahedron_faces.push(OctaFace { normal, vertices, separability_face_of });
    }
    let outputs = GeometryOutputs { tetrahedron, tetrahedron_faces, octahedron, octahedron_faces, points };
    Ok(ok(to_json(&Report::new("geometry", seed, GeometryInputs { resolution: n }, outputs, started))))
}
