use std::path::Path;

use super::model::{parse_model, ModelFile, ModelKind};
use super::report::{Field, NamedMatrix, Num, Value};
use super::{CareCommand, CliError, Command, Context, NiCommand, QuantumCommand};
use crate::coherent_hinf::{
    check_assumptions, realize_controller, synthesize_hinf, HinfError, QuantumPlant, ARE_TOL, AXIS_ZERO_TOL, PSD_TOL,
    STRUCTURE_TOL,
};
use crate::ni::{
    interconnection_stability_with, ni_frequency_oracle_with, ni_riccati_test_with, NiClass, NiError, NiVerdict,
    RealStateSpace, Witness,
};
use crate::ni_synth::{synthesize_ni_feedback_with, NiSynthError, UncertainPlant};
use crate::numlin::{solve_care, CMat, LinalgError, RMat};
use crate::qlin::{
    build_qsde, extract_physreal, physreal_are_test_with, physreal_construct, quadrature_transform, PhysRealSpec,
    QlinError, QuantumSpec, SkewAreOptions,
};

/// What a command contributes to its report.
#[derive(Debug, Default)]
pub(super) struct Body {
    pub verdict: String,
    pub fields: Vec<Field>,
    pub tolerances: Vec<Field>,
    pub matrices: Vec<NamedMatrix>,
    pub warnings: Vec<String>,
}

impl Body {
    fn new(verdict: &str) -> Self {
        Self { verdict: verdict.into(), ..Self::default() }
    }

    fn field(&mut self, name: &str, value: impl Into<Value>) {
        self.fields.push(Field { name: name.into(), value: value.into() });
    }

    fn tol(&mut self, name: &str, value: f64) {
        self.tolerances.push(Field { name: name.into(), value: Value::Num(Num(value)) });
    }

    fn real(&mut self, name: &str, m: &RMat) {
        self.matrices.push(NamedMatrix::real(name, m));
    }

    fn complex(&mut self, name: &str, m: &CMat) {
        self.matrices.push(NamedMatrix::complex(name, m));
    }
}

fn load(path: &Path) -> Result<ModelFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Malformed(format!("cannot read {}: {e}", path.display())))?;
    parse_model(&text).map_err(|e| match e {
        CliError::Malformed(m) => CliError::Malformed(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn linalg(e: LinalgError) -> CliError {
    match e {
        LinalgError::DimensionMismatch(m) => CliError::Dimension(m),
        LinalgError::NonSquare { rows, cols } => CliError::Dimension(format!("matrix is not square ({rows}x{cols})")),
        other => CliError::Numerical(other.to_string()),
    }
}

fn ni_error(e: NiError) -> CliError {
    match e {
        NiError::DimensionMismatch(m) => CliError::Dimension(m),
        NiError::GridEmpty | NiError::InvalidGrid(_) => CliError::Malformed(e.to_string()),
        NiError::Linalg(l) => linalg(l),
        other => CliError::Numerical(other.to_string()),
    }
}

fn real_system(model: &ModelFile) -> Result<RealStateSpace, CliError> {
    model.expect_kind(&[ModelKind::RealSs])?;
    let (a, b, c) = (model.real("A")?, model.real("B")?, model.real("C")?);
    let d = model.real_or_zeros("D", c.nrows(), b.ncols())?;
    RealStateSpace::new(a, b, c, d).map_err(ni_error)
}

pub(super) fn dispatch(cmd: &Command, ctx: &Context) -> Result<Body, CliError> {
    match cmd {
        Command::Ni { cmd: NiCommand::Check { model } } => ni_check(&load(model)?, ctx),
        Command::Ni { cmd: NiCommand::Stability { m, n } } => ni_stability(&load(m)?, &load(n)?, ctx),
        Command::Ni { cmd: NiCommand::Synth { plant } } => ni_synth(&load(plant)?, ctx),
        Command::Care { cmd: CareCommand::Solve { model } } => care_solve(&load(model)?, ctx),
        Command::Quantum { cmd: QuantumCommand::Build { spec } } => quantum_build(&load(spec)?, ctx),
        Command::Quantum { cmd: QuantumCommand::Hinf { plant, gamma, realize } } => {
            quantum_hinf(&load(plant)?, *gamma, *realize, ctx)
        }
        Command::Quantum { cmd: QuantumCommand::Physreal { model } } => quantum_physreal(&load(model)?, ctx),
    }
}

fn witness_text(w: &Witness) -> String {
    match w {
        Witness::Pole(p) => format!("pole at {} {:+}j", p.re, p.im),
        Witness::Frequency { omega, min_eigenvalue } => {
            format!("frequency {omega:e} with eigenvalue {min_eigenvalue:e}")
        }
        Witness::Residue { pole, min_eigenvalue, asymmetry } => format!(
            "axis pole at {:+}j with residue eigenvalue {min_eigenvalue:e}, asymmetry {asymmetry:e}",
            pole.im
        ),
        Witness::Feedthrough { asymmetry } => format!("D is not symmetric (asymmetry {asymmetry:e})"),
        Witness::RiccatiSolution { min_eigenvalue } => {
            format!("maximal Riccati solution has eigenvalue {min_eigenvalue:e}")
        }
        Witness::HamiltonianAxis { frequency } => format!("Hamiltonian eigenvalue at {frequency:e}j"),
    }
}

fn record_verdict(body: &mut Body, prefix: &str, v: &NiVerdict) {
    body.field(&format!("{prefix}.classification"), v.classification.label());
    if let Some(w) = &v.witness {
        body.field(&format!("{prefix}.witness"), witness_text(w));
    }
    if let Some(g) = &v.grid {
        body.field(&format!("{prefix}.grid_min_eigenvalue"), g.min_eigenvalue);
        body.field(&format!("{prefix}.grid_argmin"), g.argmin);
        body.field(&format!("{prefix}.grid_points"), g.base_points + g.refined_points);
        body.field(&format!("{prefix}.grid_skipped"), g.skipped);
    }
    if let Some(r) = &v.riccati {
        body.field(&format!("{prefix}.residual"), r.residual);
        body.field(&format!("{prefix}.relative_residual"), r.relative_residual);
        body.field(&format!("{prefix}.min_eigenvalue"), r.min_eigenvalue);
        body.field(&format!("{prefix}.axis_eigenvalues"), r.axis_eigenvalues);
    }
    for r in &v.residues {
        body.field(&format!("{prefix}.residue_at_{:e}", r.pole.im), r.min_eigenvalue);
    }
    if let Some(p) = &v.certificate {
        body.real(&format!("{prefix}.P"), p);
    }
    body.warnings.extend(v.warnings.iter().map(|w| format!("{prefix}: {w}")));
}

fn ni_check(model: &ModelFile, ctx: &Context) -> Result<Body, CliError> {
    let sys = real_system(model)?;
    let mut body = Body::default();
    body.tol("predicate", ctx.tol.predicate);
    body.tol("axis", ctx.tol.axis);
    body.tol("are_residual", ctx.tol.are_residual);
    let freq = match ni_frequency_oracle_with(&sys, &ctx.grid, &ctx.tol) {
        Ok(v) => {
            record_verdict(&mut body, "frequency", &v);
            Some(v.classification)
        }
        Err(e @ (NiError::NonSimplePoleOnAxis { .. } | NiError::OriginPoleOrderTooHigh { .. })) => {
            body.field("frequency.classification", "NotNI");
            body.field("frequency.witness", e.to_string());
            Some(NiClass::NotNi)
        }
        Err(e) => return Err(ni_error(e)),
    };
    let riccati = match ni_riccati_test_with(&sys, &ctx.tol) {
        Ok(v) => {
            record_verdict(&mut body, "riccati", &v);
            Some(v.classification)
        }
        Err(
            e @ (NiError::PreconditionRViolated { .. }
            | NiError::NotMinimal(_)
            | NiError::DNotSymmetric { .. }
            | NiError::NonSimplePoleOnAxis { .. }
            | NiError::OriginPoleOrderTooHigh { .. }),
        ) => {
            body.field("riccati.classification", "inapplicable");
            body.warnings.push(format!("riccati test not applicable: {e}"));
            None
        }
        Err(e) => return Err(ni_error(e)),
    };
    let decisive = |c: NiClass| matches!(c, NiClass::Ni | NiClass::Sni | NiClass::NotNi);
    let is_ni = |c: NiClass| matches!(c, NiClass::Ni | NiClass::Sni);
    let verdict = match (freq, riccati) {
        (Some(f), Some(r)) if decisive(f) && decisive(r) && is_ni(f) != is_ni(r) => {
            body.warnings.push("frequency and riccati tests disagree".into());
            NiClass::Indeterminate
        }
        (Some(f), _) if decisive(f) => f,
        (_, Some(r)) if decisive(r) => r,
        _ => NiClass::Indeterminate,
    };
    body.verdict = verdict.label().into();
    Ok(body)
}

fn ni_stability(m: &ModelFile, n: &ModelFile, ctx: &Context) -> Result<Body, CliError> {
    let (m, n) = (real_system(m)?, real_system(n)?);
    let mut body = Body::default();
    body.tol("predicate", ctx.tol.predicate);
    body.tol("axis", ctx.tol.axis);
    match interconnection_stability_with(&m, &n, &ctx.grid, &ctx.tol) {
        Ok(r) => {
            body.verdict = if r.stable { "stable" } else { "unstable" }.into();
            body.field("lambda_max", r.lambda_max);
            body.field("closed_loop_hurwitz", r.closed_loop_hurwitz);
            body.field("agrees", r.agrees);
            body.matrices.push(NamedMatrix::list("dc_eigenvalues", &r.dc_eigenvalues));
            body.matrices.push(NamedMatrix::list("closed_loop_eigenvalues", &r.closed_loop_eigenvalues));
            body.real("closed_loop_A", &r.closed_loop);
            body.warnings.extend(r.warnings);
        }
        Err(
            e @ (NiError::HypothesisViolation(_)
            | NiError::NonSimplePoleOnAxis { .. }
            | NiError::OriginPoleOrderTooHigh { .. }),
        ) => {
            body.verdict = "hypotheses-violated".into();
            body.field("reason", e.to_string());
        }
        Err(e) => return Err(ni_error(e)),
    }
    Ok(body)
}

fn ni_synth(model: &ModelFile, ctx: &Context) -> Result<Body, CliError> {
    model.expect_kind(&[ModelKind::UncertainPlant])?;
    let plant = UncertainPlant::new(model.real("A")?, model.real("B1")?, model.real("B2")?, model.real("C1")?)
        .map_err(|e| match e {
            NiSynthError::DimensionMismatch(m) => CliError::Dimension(m),
            other => CliError::Numerical(other.to_string()),
        })?;
    let mut body = Body::default();
    body.tol("predicate", ctx.tol.predicate);
    match synthesize_ni_feedback_with(&plant, &ctx.grid, &ctx.tol) {
        Ok(res) => {
            body.verdict = if res.verified() { "verified" } else { "unverified" }.into();
            body.tol("are_residual", res.are_tolerance);
            body.field("degenerate", res.degenerate);
            body.field("gap_min_eigenvalue", res.gap_min_eigenvalue);
            body.field("t_residual", res.t_residual);
            body.field("s_residual", res.s_residual);
            body.field("are_residual", res.are_residual);
            body.field("closed_loop_abscissa", res.closed_loop_abscissa);
            body.field("anti_stable_stabilized", res.anti_stable_stabilized);
            body.field("anti_stable_dim", res.split.a22.nrows());
            record_verdict(&mut body, "closed_loop", &res.closed_loop_verdict);
            body.real("K", &res.k);
            body.real("P", &res.p);
            body.real("T", &res.t);
            body.real("S", &res.s);
        }
        Err(NiSynthError::DimensionMismatch(m)) => return Err(CliError::Dimension(m)),
        Err(NiSynthError::Linalg(e)) => return Err(linalg(e)),
        Err(NiSynthError::Ni(e)) => return Err(ni_error(e)),
        Err(e) => {
            body.verdict = "synthesis-failed".into();
            body.field("reason", e.to_string());
        }
    }
    Ok(body)
}

fn care_solve(model: &ModelFile, ctx: &Context) -> Result<Body, CliError> {
    model.expect_kind(&[ModelKind::RealSs, ModelKind::ComplexSs])?;
    let (a, b, c) = (model.complex("A")?, model.complex("B")?, model.complex("C")?);
    let q = match model.get("Q") {
        Some(q) => q.clone(),
        None => c.adjoint() * &c,
    };
    let r = match model.get("R") {
        Some(r) => r.clone(),
        None => CMat::identity(b.ncols(), b.ncols()),
    };
    let sol = solve_care(&a, &b, &q, &r).map_err(linalg)?;
    let mut body = Body::new("solved");
    body.tol("are_residual", ctx.tol.are_residual);
    body.field("residual", sol.residual);
    body.field("relative_residual", sol.relative_residual);
    body.field("closed_loop_abscissa", sol.closed_loop_abscissa);
    body.field("refinement_steps", sol.refinement_steps);
    if model.kind == ModelKind::RealSs {
        body.real("X", &sol.x.map(|z| z.re));
    } else {
        body.complex("X", &sol.x);
    }
    Ok(body)
}

fn qlin_error(e: QlinError) -> CliError {
    match e {
        QlinError::DimensionMismatch(m) => CliError::Dimension(m),
        QlinError::SpecInvariantViolated(m) | QlinError::StructureViolated(m) => CliError::Dimension(m),
        QlinError::Linalg(l) => linalg(l),
        other => CliError::Numerical(other.to_string()),
    }
}

fn quantum_build(model: &ModelFile, ctx: &Context) -> Result<Body, CliError> {
    model.expect_kind(&[ModelKind::QuantumSpec])?;
    let spec = QuantumSpec {
        m1: model.complex("M1")?,
        m2: model.complex("M2")?,
        n1: model.complex("N1")?,
        n2: model.complex("N2")?,
        s: model.complex("S")?,
    };
    let sys = build_qsde(&spec).map_err(qlin_error)?;
    let quad = quadrature_transform(&sys).map_err(qlin_error)?;
    let mut body = Body::new("built");
    body.tol("predicate", ctx.tol.predicate);
    body.field("modes", sys.modes());
    body.field("fields", sys.fields());
    body.complex("F", &sys.f);
    body.complex("G", &sys.g);
    body.complex("H", &sys.h);
    body.complex("K", &sys.k);
    body.real("A", &quad.a);
    body.real("B", &quad.b);
    body.real("C", &quad.c);
    body.real("D", &quad.d);
    Ok(body)
}

fn hinf_error(e: HinfError) -> CliError {
    match e {
        HinfError::DimensionMismatch(m) => CliError::Dimension(m),
        HinfError::StructureViolated(m) => CliError::Dimension(format!("{m} is not in doubled-up form")),
        HinfError::Linalg(l) => linalg(l),
        HinfError::Qlin(q) => qlin_error(q),
        other => CliError::Numerical(other.to_string()),
    }
}

fn skew_options(ctx: &Context) -> SkewAreOptions {
    SkewAreOptions { seed: ctx.seed, ..SkewAreOptions::default() }
}

fn quantum_hinf(model: &ModelFile, gamma: f64, realize: bool, ctx: &Context) -> Result<Body, CliError> {
    model.expect_kind(&[ModelKind::QuantumPlant])?;
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(CliError::Malformed(format!("--gamma must be positive, got {gamma}")));
    }
    let m = |n: &str| model.complex(n);
    let plant = QuantumPlant::new(m("F")?, m("G0")?, m("G1")?, m("G2")?, m("H1")?, m("H2")?, m("K12")?, m("K20")?, m("K21")?)
        .map_err(hinf_error)?;
    let mut body = Body::default();
    body.tol("structure", STRUCTURE_TOL);
    body.tol("psd", PSD_TOL);
    body.tol("axis_zero", AXIS_ZERO_TOL);
    body.tol("are_residual", ARE_TOL);
    body.field("gamma", gamma);
    let scaled = if gamma == 1.0 { plant.clone() } else { plant.scaled(gamma) };
    let assumptions = check_assumptions(&scaled).map_err(hinf_error)?;
    body.field("e1_min_eigenvalue", assumptions.e1_min_eigenvalue);
    body.field("e2_min_eigenvalue", assumptions.e2_min_eigenvalue);
    body.matrices.push(NamedMatrix::list("control_zeros", &assumptions.control_zeros));
    body.matrices.push(NamedMatrix::list("filter_zeros", &assumptions.filter_zeros));
    if !assumptions.all_pass() {
        body.verdict = "assumptions-failed".into();
        if let Some(w) = assumptions.control_axis_witness {
            body.field("control_axis_zero", w);
        }
        if let Some(w) = assumptions.filter_axis_witness {
            body.field("filter_axis_zero", w);
        }
        return Ok(body);
    }
    let design = match synthesize_hinf(&plant, gamma) {
        Ok(d) => d,
        Err(e @ (HinfError::NoStabilizingX(_) | HinfError::NoStabilizingY(_))) => {
            body.verdict = "no-stabilizing-solution".into();
            body.field("reason", e.to_string());
            return Ok(body);
        }
        Err(HinfError::CouplingViolated { rho }) => {
            body.verdict = "coupling-violated".into();
            body.field("rho_xy", rho);
            return Ok(body);
        }
        Err(e) => return Err(hinf_error(e)),
    };
    let (r, v) = (&design.riccatis, &design.verification);
    body.verdict = if v.verified { "verified" } else { "unverified" }.into();
    body.field("x_residual", r.x_residual);
    body.field("y_residual", r.y_residual);
    body.field("x_min_eigenvalue", r.x_min_eigenvalue);
    body.field("y_min_eigenvalue", r.y_min_eigenvalue);
    body.field("rho_xy", design.controller.rho_xy);
    body.field("closed_loop_abscissa", v.abscissa);
    body.field("closed_loop_hurwitz", v.hurwitz);
    if let Some(n) = &v.norm {
        body.field("closed_loop_hinf_norm", n.value);
        body.field("closed_loop_hinf_upper", n.upper);
        body.field("peak_frequency", n.peak_frequency);
    }
    body.field("controller_doubled_up", v.structure.all());
    body.complex("X", &r.x);
    body.complex("Y", &r.y);
    body.complex("Fc", &design.controller.fc);
    body.complex("Gc", &design.controller.gc);
    body.complex("Hc", &design.controller.hc);
    if realize {
        match realize_controller(&design.controller, &skew_options(ctx)) {
            Ok(res) => {
                body.field("controller_realizable", true);
                body.field("controller_pr_residual", res.pr_residual);
                body.real("controller_X", &res.x);
            }
            Err(e) => {
                body.field("controller_realizable", false);
                body.warnings.push(format!("controller realization: {e}"));
            }
        }
    }
    Ok(body)
}

fn quantum_physreal(model: &ModelFile, ctx: &Context) -> Result<Body, CliError> {
    model.expect_kind(&[ModelKind::RealSs, ModelKind::PhysrealSpec])?;
    let (a, b_u, c) = if model.kind == ModelKind::PhysrealSpec {
        let n_y = model
            .parameter("n_y")
            .ok_or_else(|| CliError::Malformed("physreal_spec needs parameter n_y".into()))?;
        if !(n_y >= 0.0 && n_y.fract() == 0.0) {
            return Err(CliError::Malformed(format!("n_y must be a non-negative integer, got {n_y}")));
        }
        let spec = PhysRealSpec { r: model.real("R")?, lambda: model.complex("Lambda")?, n_y: n_y as usize };
        let sys = physreal_construct(&spec).map_err(qlin_error)?;
        extract_physreal(&sys).map_err(qlin_error)?;
        let n_y = spec.n_y;
        (sys.a.clone(), sys.b.columns(n_y, sys.b.ncols() - n_y).into_owned(), sys.c.clone())
    } else {
        (model.real("A")?, model.real("B")?, model.real("C")?)
    };
    let opts = skew_options(ctx);
    let mut body = Body::default();
    body.tol("newton", opts.tol);
    body.tol("rcond_min", opts.rcond_min);
    body.tol("transfer", opts.transfer_tol);
    body.real("A", &a);
    body.real("B_u", &b_u);
    body.real("C", &c);
    match physreal_are_test_with(&a, &b_u, &c, &opts) {
        Ok(res) => {
            body.verdict = "realizable".into();
            body.field("residual", res.residual);
            body.field("skewness", res.skewness);
            body.field("rcond", res.rcond);
            body.field("transfer_error", res.transfer_error);
            body.field("pr_residual", res.pr_residual);
            body.field("start", format!("{:?}", res.start));
            body.field("starts_tried", res.starts_tried);
            body.real("X", &res.x);
            body.real("T", &res.t);
            body.real("A_realized", &res.a);
            body.real("B_v1", &res.b_v1);
        }
        Err(QlinError::NoSkewSolutionFound { starts, best_residual }) => {
            body.verdict = "no-solution-found".into();
            body.field("starts_tried", starts);
            body.field("best_residual", best_residual);
        }
        Err(QlinError::SingularX { rcond }) => {
            body.verdict = "singular-solution".into();
            body.field("rcond", rcond);
        }
        Err(e) => return Err(qlin_error(e)),
    }
    Ok(body)
}
