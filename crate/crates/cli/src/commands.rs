use std::fs;
use std::path::PathBuf;

use clap::Args;
use num_complex::Complex;
use serde::Serialize;
use serde_json::json;

use seqmeas::criteria::{criteria_report, no_go_certificate, CriteriaReport};
use seqmeas::instances::{canonical_example_theta, truncated_shift};
use seqmeas::linalg::hermitian_eig;
use seqmeas::measurement::{conditional_final_prob, sequence_joint_prob, InstancePairRecord};
use seqmeas::search::{feasibility_report, optimize, SearchProblem};
use seqmeas::suites::{run_all, SuiteConfig};
use seqmeas::{ComplexVector, Tolerances};

use crate::parse::{parse_complex, parse_constraints, parse_theta, ConstraintList};
use crate::{CliError, GlobalOpts, Outcome};

fn to_json<T: Serialize>(v: &T) -> Result<serde_json::Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Io(e.to_string()))
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Override the sample count of every suite
    #[arg(long, env = "SEQMEAS_SAMPLES")]
    pub samples: Option<usize>,
}

pub fn verify(
    global: &GlobalOpts,
    tol: &Tolerances<f64>,
    args: &VerifyArgs,
) -> Result<Outcome, CliError> {
    let mut cfg = SuiteConfig::with_seed(global.seed);
    if let Some(n) = args.samples {
        cfg = SuiteConfig {
            seed: global.seed,
            theorem1_samples: n,
            theorem2_samples: n,
            lemma2_samples: n,
            canonical_samples: n,
            order_effect_samples: n,
            structural_samples: n,
            no_go_samples: n,
            shift_samples: n,
        };
    }
    let report = run_all(&cfg, tol);
    let mut csv = vec![vec![
        "suite".to_string(),
        "samples".into(),
        "failures".into(),
        "passed".into(),
        "worstResidual".into(),
        "threshold".into(),
    ]];
    for s in &report.suites {
        csv.push(vec![
            to_json(&s.suite)?.as_str().unwrap_or_default().to_string(),
            s.samples.to_string(),
            s.failures.to_string(),
            s.passed.to_string(),
            num(s.worst_residual),
            num(s.threshold),
        ]);
    }
    let failed: Vec<String> = report
        .suites
        .iter()
        .filter(|s| !s.passed)
        .map(|s| format!("{:?}", s.suite))
        .collect();
    let summary = if failed.is_empty() {
        format!("verify: all {} suites passed", report.suites.len())
    } else {
        format!("verify: failed suites: {}", failed.join(", "))
    };
    Ok(Outcome {
        json: to_json(&json!({ "config": cfg, "suites": report.suites }))?,
        csv,
        passed: report.passed,
        summary,
    })
}

#[derive(Args, Debug)]
pub struct ExampleArgs {
    /// Rotation angle in radians, or a fraction of pi such as pi/4
    #[arg(long, env = "SEQMEAS_THETA", default_value = "pi/4", value_parser = parse_theta, allow_hyphen_values = true)]
    pub theta: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ExampleReport {
    theta: f64,
    criteria: CriteriaReport,
    /// `p_{A-B}(e₂)`.
    #[serde(rename = "pAB")]
    p_ab: f64,
    #[serde(rename = "pBA")]
    p_ba: f64,
    /// `p(A | A, B)` from `e₂`; absent when the prefix has probability zero.
    aba_conditional: Option<f64>,
    bab_conditional: Option<f64>,
    instance: seqmeas::InstancePair,
}

pub fn example(tol: &Tolerances<f64>, args: &ExampleArgs) -> Result<Outcome, CliError> {
    let pair = canonical_example_theta(args.theta);
    let e2 = ComplexVector::basis(4, 1);
    let report = ExampleReport {
        theta: args.theta,
        criteria: criteria_report(&pair, tol),
        p_ab: sequence_joint_prob(&[&pair.a, &pair.b], &e2),
        p_ba: sequence_joint_prob(&[&pair.b, &pair.a], &e2),
        aba_conditional: conditional_final_prob(&[&pair.a, &pair.b], &pair.a, &e2, tol).ok(),
        bab_conditional: conditional_final_prob(&[&pair.b, &pair.a], &pair.b, &e2, tol).ok(),
        instance: pair,
    };
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    let mut csv = vec![vec!["quantity".to_string(), "value".into()]];
    csv.push(vec!["theta".into(), num(report.theta)]);
    csv.push(vec!["pAB".into(), num(report.p_ab)]);
    csv.push(vec!["pBA".into(), num(report.p_ba)]);
    csv.push(vec!["abaConditional".into(), opt(report.aba_conditional)]);
    csv.push(vec!["babConditional".into(), opt(report.bab_conditional)]);
    csv.extend(criteria_rows(&report.criteria));
    let summary = format!(
        "example: theta = {}, pAB = {:.6}, pBA = {:.6}, magnitude = {:.6}",
        report.theta, report.p_ab, report.p_ba, report.criteria.order_effect_magnitude
    );
    Ok(Outcome {
        json: to_json(&report)?,
        csv,
        passed: true,
        summary,
    })
}

fn criteria_rows(c: &CriteriaReport) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for (name, check) in [
        ("aaA", c.aa_a),
        ("aaB", c.aa_b),
        ("aba", c.aba),
        ("bab", c.bab),
        ("projectorsCommute", c.projectors_commute),
        ("perpendicular", c.perpendicular),
    ] {
        rows.push(vec![format!("{name}.holds"), check.holds.to_string()]);
        rows.push(vec![format!("{name}.residual"), num(check.residual)]);
    }
    rows.push(vec![
        "orderEffectMagnitude".into(),
        num(c.order_effect_magnitude),
    ]);
    rows.push(vec![
        "intersectionDim".into(),
        c.intersection_dim.to_string(),
    ]);
    rows
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// Instance file: {"dim": n, "A": {"P": .., "U": ..}, "B": {..}}
    #[arg(env = "SEQMEAS_INPUT")]
    pub input: PathBuf,
}

pub fn check(tol: &Tolerances<f64>, args: &CheckArgs) -> Result<Outcome, CliError> {
    let text = fs::read_to_string(&args.input)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", args.input.display())))?;
    let record: InstancePairRecord<f64> = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.input.display())))?;
    let pair = record
        .validate(tol)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.input.display())))?;
    let criteria = criteria_report(&pair, tol);
    let certificate = no_go_certificate(&pair, tol).ok();
    let mut csv = vec![vec!["quantity".to_string(), "value".into()]];
    csv.extend(criteria_rows(&criteria));
    if let Some(c) = &certificate {
        csv.push(vec!["noGoCertificate.passed".into(), c.passed.to_string()]);
    }
    let summary = format!(
        "check: aaA {}, aaB {}, aba {}, bab {}, magnitude {:e}",
        criteria.aa_a.holds,
        criteria.aa_b.holds,
        criteria.aba.holds,
        criteria.bab.holds,
        criteria.order_effect_magnitude
    );
    Ok(Outcome {
        json: to_json(&json!({ "criteria": criteria, "noGoCertificate": certificate }))?,
        csv,
        passed: true,
        summary,
    })
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(long, env = "SEQMEAS_DIM", default_value_t = 4)]
    pub dim: usize,

    /// Comma-separated subset of aa-a,aa-b,aba,bab (or "none")
    #[arg(long, env = "SEQMEAS_CONSTRAINTS", default_value = "aa-a,aa-b,aba,bab", value_parser = parse_constraints)]
    pub constraints: ConstraintList,

    #[arg(long, env = "SEQMEAS_RESTARTS", default_value_t = SearchProblem::<f64>::DEFAULT_RESTARTS)]
    pub restarts: usize,

    /// Simplex iterations per restart
    #[arg(long, env = "SEQMEAS_MAX_ITERS", default_value_t = SearchProblem::<f64>::DEFAULT_MAX_ITERS)]
    pub max_iters: usize,

    #[arg(long, env = "SEQMEAS_PENALTY_WEIGHT", default_value_t = SearchProblem::<f64>::DEFAULT_PENALTY)]
    pub penalty_weight: f64,

    /// Search projector orientations too, with the given ranks
    #[arg(long, env = "SEQMEAS_FREE_PROJECTORS")]
    pub free_projectors: bool,

    #[arg(
        long,
        env = "SEQMEAS_RANK1",
        default_value_t = 1,
        requires = "free_projectors"
    )]
    pub rank1: usize,

    #[arg(
        long,
        env = "SEQMEAS_RANK2",
        default_value_t = 1,
        requires = "free_projectors"
    )]
    pub rank2: usize,

    /// Also write the trace as CSV (iter, restart, objective, totalPenalty)
    #[arg(long, env = "SEQMEAS_TRACE")]
    pub trace: Option<PathBuf>,
}

fn trace_rows(result: &seqmeas::SearchResult) -> Vec<Vec<String>> {
    let mut rows = vec![vec![
        "iter".to_string(),
        "restart".into(),
        "objective".into(),
        "totalPenalty".into(),
    ]];
    for t in &result.trace {
        rows.push(vec![
            t.iter.to_string(),
            t.restart.to_string(),
            num(t.objective),
            num(t.total_penalty),
        ]);
    }
    rows
}

pub fn search(
    global: &GlobalOpts,
    tol: &Tolerances<f64>,
    args: &SearchArgs,
) -> Result<Outcome, CliError> {
    let constraints = args.constraints.0.clone();
    let mut problem = if args.free_projectors {
        SearchProblem::free(args.dim, args.rank1, args.rank2, constraints, global.seed)?
    } else {
        SearchProblem::canonical(args.dim, constraints, global.seed).map_err(|e| {
            CliError::Input(format!(
                "{e} (use --free-projectors for smaller dimensions)"
            ))
        })?
    };
    problem.restarts = args.restarts;
    problem.max_iters = args.max_iters;
    problem.penalty_weight = args.penalty_weight;
    let result = optimize(&problem)?;
    let report = feasibility_report(&result, tol);

    let rows = trace_rows(&result);
    if let Some(path) = &args.trace {
        let mut w = csv::Writer::from_path(path)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        for row in &rows {
            w.write_record(row)
                .map_err(|e| CliError::Io(e.to_string()))?;
        }
        w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    }
    let summary = format!(
        "search: best restart {} objective {:e}, feasible {}",
        result.best_restart, result.objective, result.feasible
    );
    Ok(Outcome {
        json: to_json(&json!({
            "problem": problem,
            "result": result,
            "feasibilityReport": report,
        }))?,
        csv: rows,
        passed: true,
        summary,
    })
}

#[derive(Args, Debug)]
pub struct ShiftArgs {
    /// Amplitude a as re or re,im
    #[arg(long, env = "SEQMEAS_A", default_value = "0.5", value_parser = parse_complex, allow_hyphen_values = true)]
    pub a: (f64, f64),

    /// Truncation dimension (at least 3)
    #[arg(long, env = "SEQMEAS_N", default_value_t = 6)]
    pub n: usize,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ShiftReport {
    /// `‖EM − M‖_F` over all columns.
    em_residual: f64,
    /// Same, excluding the boundary column `e_{n−1}` whose image `e_n` the
    /// truncation sends to zero.
    em_residual_interior: f64,
    eigenvalues: Vec<f64>,
    is_projector: bool,
    instance: seqmeas::ShiftInstance,
}

pub fn shift_demo(tol: &Tolerances<f64>, args: &ShiftArgs) -> Result<Outcome, CliError> {
    let inst = truncated_shift(Complex::new(args.a.0, args.a.1), args.n)?;
    let report = ShiftReport {
        em_residual: inst.em_residual(),
        em_residual_interior: inst.em_residual_interior(),
        eigenvalues: hermitian_eig(&inst.e, tol)?.values,
        is_projector: inst.is_projector(tol),
        instance: inst,
    };
    let mut csv = vec![vec!["quantity".to_string(), "value".into()]];
    csv.push(vec!["emResidual".into(), num(report.em_residual)]);
    csv.push(vec![
        "emResidualInterior".into(),
        num(report.em_residual_interior),
    ]);
    csv.push(vec!["isProjector".into(), report.is_projector.to_string()]);
    for (i, v) in report.eigenvalues.iter().enumerate() {
        csv.push(vec![format!("eigenvalue.{i}"), num(*v)]);
    }
    let summary = format!(
        "shift-demo: |a|² = {}, E projector: {}, ‖EM − M‖ = {:e} ({:e} off the boundary column)",
        args.a.0 * args.a.0 + args.a.1 * args.a.1,
        report.is_projector,
        report.em_residual,
        report.em_residual_interior
    );
    Ok(Outcome {
        json: to_json(&report)?,
        csv,
        passed: true,
        summary,
    })
}
