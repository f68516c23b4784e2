//! Penalized search over pairs of unitaries (and optionally projector
//! orientations) for the largest order effect compatible with a chosen set of
//! repeatability constraints.
//!
//! Each restart runs an adaptive Nelder–Mead ascent on
//! `magnitude − w·Σ residual²` from a seeded random start, then a
//! Levenberg–Marquardt pass that pushes the constraint residuals to zero.
//! Restarts run in parallel; the merge only looks at restart indices, so the
//! result does not depend on scheduling.

mod nelder_mead;
mod objective;
mod param;
mod restore;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::{
    aba_repeatability, adjacent_repeatability, bab_repeatability, no_go_certificate,
    order_effect_magnitude, Check, NoGoCertificate, DERIVED_TOL_FACTOR,
};
use crate::instances::SeededRng;
use crate::linalg::{is_projector, Matrix};
use crate::measurement::InstancePair;
use crate::scalar::{Real, Tolerances};
use crate::{Error, Result};

pub use nelder_mead::{maximize, Improvement, SimplexConfig, SimplexOutcome};
pub use objective::{evaluate, penalized_objective, Evaluation};
pub use param::{
    parameter_len, parametrize, params_from_skew, skew_from_params, unitary_from_params,
};

/// Largest supported Hilbert space dimension.
pub const MAX_DIM: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Constraint {
    /// `P₁U₁P₁ = U₁P₁`.
    #[serde(rename = "AA_A")]
    AaA,
    /// `P₂U₂P₂ = U₂P₂`.
    #[serde(rename = "AA_B")]
    AaB,
    /// `P₁U₂P₂U₁P₁ = U₂P₂U₁P₁`.
    #[serde(rename = "ABA")]
    Aba,
    /// `P₂U₁P₁U₂P₂ = U₁P₁U₂P₂`.
    #[serde(rename = "BAB")]
    Bab,
}

impl Constraint {
    pub const ALL: [Constraint; 4] = [Self::AaA, Self::AaB, Self::Aba, Self::Bab];

    pub fn name(self) -> &'static str {
        match self {
            Self::AaA => "AA_A",
            Self::AaB => "AA_B",
            Self::Aba => "ABA",
            Self::Bab => "BAB",
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Constraint {
    type Err = Error;
    /// Accepts `aa-a`, `AA_A`, `aaa` and so on, case-insensitively.
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| !matches!(c, '-' | '_'))
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "aaa" => Ok(Self::AaA),
            "aab" => Ok(Self::AaB),
            "aba" => Ok(Self::Aba),
            "bab" => Ok(Self::Bab),
            _ => Err(Error::InvalidProblem(format!("unknown constraint {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", rename_all = "camelCase")]
pub struct SearchProblem<T: Real> {
    pub dim: usize,
    pub rank1: usize,
    pub rank2: usize,
    pub constraints: Vec<Constraint>,
    /// `(P₁, P₂)`; when absent the projector orientations are searched too.
    pub fix_projectors: Option<(Matrix<T>, Matrix<T>)>,
    pub penalty_weight: T,
    pub restarts: usize,
    /// Simplex iteration budget per restart.
    pub max_iters: usize,
    pub seed: u64,
}

impl<T: Real> SearchProblem<T> {
    pub const DEFAULT_RESTARTS: usize = 16;
    pub const DEFAULT_PENALTY: f64 = 100.0;
    pub const DEFAULT_MAX_ITERS: usize = 6000;

    /// Fixed commuting projectors `P₁ = P₁₂ + L₁`, `P₂ = P₁₂ + L₂` with
    /// one-dimensional `L₁`, `L₂` laid out on coordinate axes; for `dim = 4`
    /// these are the projectors of the canonical example.
    pub fn canonical(dim: usize, constraints: Vec<Constraint>, seed: u64) -> Result<Self> {
        if !(3..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidProblem(format!(
                "canonical geometry needs 3 ≤ dim ≤ {MAX_DIM}, got {dim}"
            )));
        }
        let d12 = (dim - 2).min(2);
        let mut p1 = vec![T::zero(); dim];
        let mut p2 = vec![T::zero(); dim];
        for k in 0..d12 {
            p1[k] = T::one();
            p2[k] = T::one();
        }
        p1[d12] = T::one();
        p2[d12 + 1] = T::one();
        let problem = Self {
            dim,
            rank1: d12 + 1,
            rank2: d12 + 1,
            constraints,
            fix_projectors: Some((Matrix::diag_real(&p1), Matrix::diag_real(&p2))),
            penalty_weight: T::lit(Self::DEFAULT_PENALTY),
            restarts: Self::DEFAULT_RESTARTS,
            max_iters: Self::DEFAULT_MAX_ITERS,
            seed,
        };
        problem.validate()?;
        Ok(problem)
    }

    /// Projector orientations are optimized alongside the unitaries.
    pub fn free(
        dim: usize,
        rank1: usize,
        rank2: usize,
        constraints: Vec<Constraint>,
        seed: u64,
    ) -> Result<Self> {
        let problem = Self {
            dim,
            rank1,
            rank2,
            constraints,
            fix_projectors: None,
            penalty_weight: T::lit(Self::DEFAULT_PENALTY),
            restarts: Self::DEFAULT_RESTARTS,
            max_iters: Self::DEFAULT_MAX_ITERS,
            seed,
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidProblem(msg));
        if !(1..=MAX_DIM).contains(&self.dim) {
            return bad(format!("dim must be in 1..={MAX_DIM}, got {}", self.dim));
        }
        if self.rank1 > self.dim || self.rank2 > self.dim {
            return bad(format!(
                "ranks ({}, {}) exceed dim {}",
                self.rank1, self.rank2, self.dim
            ));
        }
        if !(self.penalty_weight > T::zero() && self.penalty_weight.is_finite()) {
            return bad(format!(
                "penaltyWeight must be positive, got {}",
                self.penalty_weight
            ));
        }
        if self.restarts == 0 {
            return bad("restarts must be at least 1".into());
        }
        let mut seen = self.constraints.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.constraints.len() {
            return bad("duplicate constraint".into());
        }
        if let Some((p1, p2)) = &self.fix_projectors {
            let tol = Tolerances::default();
            for (name, p, rank) in [("P1", p1, self.rank1), ("P2", p2, self.rank2)] {
                if p.dim() != self.dim {
                    return bad(format!("{name} has dim {}, expected {}", p.dim(), self.dim));
                }
                if !is_projector(p, &tol) {
                    return bad(format!("{name} is not an orthogonal projector"));
                }
                let tr = p.trace().re.as_f64();
                if (tr - rank as f64).abs() > 0.5 {
                    return bad(format!("{name} has rank {tr:.0}, expected {rank}"));
                }
            }
        }
        Ok(())
    }

    fn feas_tol() -> T {
        T::lit(T::FEAS_TOL)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", rename_all = "camelCase")]
pub struct TraceEntry<T: Real> {
    pub restart: usize,
    pub iter: usize,
    /// Penalized objective of the incumbent.
    pub objective: T,
    pub total_penalty: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", rename_all = "camelCase")]
pub struct ConstraintResidual<T: Real> {
    pub constraint: Constraint,
    pub residual: T,
}

/// Final state of one restart after restoration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", rename_all = "camelCase")]
pub struct RestartSummary<T: Real> {
    pub restart: usize,
    pub iterations: usize,
    /// Order-effect magnitude after restoration.
    pub objective: T,
    pub total_penalty: T,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", rename_all = "camelCase")]
pub struct SearchResult<T: Real> {
    pub best_pair: InstancePair<T>,
    /// Order-effect magnitude of `best_pair`.
    pub objective: T,
    pub residuals: Vec<ConstraintResidual<T>>,
    /// Every selected residual is at most the feasibility tolerance.
    pub feasible: bool,
    pub feas_tol: T,
    pub best_restart: usize,
    pub parameters: Vec<T>,
    pub restarts: Vec<RestartSummary<T>>,
    /// Incumbent improvements of the simplex phase, restart by restart.
    pub trace: Vec<TraceEntry<T>>,
}

struct RestartOutcome<T: Real> {
    x: Vec<T>,
    eval: Evaluation<T>,
    feasible: bool,
    iterations: usize,
    trace: Vec<TraceEntry<T>>,
}

fn is_feasible<T: Real>(eval: &Evaluation<T>, feas_tol: T) -> bool {
    eval.residuals.iter().all(|(_, r)| *r <= feas_tol)
}

fn run_restart<T: Real>(problem: &SearchProblem<T>, restart: usize) -> Result<RestartOutcome<T>> {
    let mut rng = SeededRng::for_stream(problem.seed, restart as u64);
    let x0: Vec<T> = (0..parameter_len(problem)).map(|_| rng.normal()).collect();
    let cfg = SimplexConfig {
        max_iters: problem.max_iters,
        initial_step: T::lit(0.5),
        ftol: T::epsilon() * T::lit(100.0),
        xtol: T::epsilon().sqrt(),
        max_rebuilds: 8,
    };
    let outcome = maximize(
        |x: &[T]| match evaluate(x, problem) {
            Ok(e) => (e.objective, e.total_penalty),
            Err(_) => (T::nan(), T::nan()),
        },
        &x0,
        &cfg,
    );
    let trace = outcome
        .improvements
        .iter()
        .map(|imp| TraceEntry {
            restart,
            iter: imp.iteration,
            objective: imp.value,
            total_penalty: imp.payload,
        })
        .collect();

    let mut x = outcome.x;
    if !problem.constraints.is_empty() {
        restore::restore(&mut x, problem, &restore::RestoreConfig::default())?;
    }
    let eval = evaluate(&x, problem)?;
    Ok(RestartOutcome {
        feasible: is_feasible(&eval, SearchProblem::<T>::feas_tol()),
        x,
        eval,
        iterations: outcome.iterations,
        trace,
    })
}

/// Runs `problem.restarts` seeded local searches and returns the best by
/// feasibility first, then magnitude (penalized objective when no restart is
/// feasible); ties go to the lower restart index.
pub fn optimize<T: Real>(problem: &SearchProblem<T>) -> Result<SearchResult<T>> {
    problem.validate()?;
    let outcomes: Vec<RestartOutcome<T>> = (0..problem.restarts)
        .into_par_iter()
        .map(|r| run_restart(problem, r))
        .collect::<Result<_>>()?;

    let score = |o: &RestartOutcome<T>| {
        if o.feasible {
            o.eval.magnitude
        } else {
            o.eval.objective
        }
    };
    let mut best = 0;
    for (i, o) in outcomes.iter().enumerate().skip(1) {
        let b = &outcomes[best];
        let better = match (o.feasible, b.feasible) {
            (true, false) => true,
            (false, true) => false,
            _ => score(o) > score(b),
        };
        if better {
            best = i;
        }
    }

    let winner = &outcomes[best];
    Ok(SearchResult {
        best_pair: parametrize(&winner.x, problem)?,
        objective: winner.eval.magnitude,
        residuals: winner
            .eval
            .residuals
            .iter()
            .map(|&(constraint, residual)| ConstraintResidual {
                constraint,
                residual,
            })
            .collect(),
        feasible: winner.feasible,
        feas_tol: SearchProblem::<T>::feas_tol(),
        best_restart: best,
        parameters: winner.x.clone(),
        restarts: outcomes
            .iter()
            .enumerate()
            .map(|(restart, o)| RestartSummary {
                restart,
                iterations: o.iterations,
                objective: o.eval.magnitude,
                total_penalty: o.eval.total_penalty,
                feasible: o.feasible,
            })
            .collect(),
        trace: outcomes
            .iter()
            .flat_map(|o| o.trace.iter().copied())
            .collect(),
    })
}

/// One constraint as seen by the search and by `criteria`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConstraintAgreement {
    pub constraint: Constraint,
    /// Absent for constraints the search did not select.
    pub search_residual: Option<f64>,
    pub criteria: Check,
    /// The two residuals coincide within the derived tolerance.
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub objective: f64,
    pub order_effect_magnitude: f64,
    pub objective_agrees: bool,
    pub constraints: Vec<ConstraintAgreement>,
    /// Unselected conditions, evaluated for information.
    pub others: Vec<ConstraintAgreement>,
    pub no_go_certificate: Option<NoGoCertificate>,
    /// Why the certificate is absent.
    pub certificate_skipped: Option<String>,
}

/// Re-evaluates `result.best_pair` through `criteria` and compares with the
/// residuals the search recorded.
pub fn feasibility_report<T: Real>(
    result: &SearchResult<T>,
    tol: &Tolerances<T>,
) -> FeasibilityReport {
    let pair = &result.best_pair;
    let slack = (tol.eq_tol * T::lit(DERIVED_TOL_FACTOR)).as_f64();
    let check = |c: Constraint| match c {
        Constraint::AaA => adjacent_repeatability(&pair.a, tol),
        Constraint::AaB => adjacent_repeatability(&pair.b, tol),
        Constraint::Aba => aba_repeatability(pair, tol),
        Constraint::Bab => bab_repeatability(pair, tol),
    };
    let selected: Vec<Constraint> = result.residuals.iter().map(|r| r.constraint).collect();
    let constraints: Vec<ConstraintAgreement> = result
        .residuals
        .iter()
        .map(|r| {
            let criteria = check(r.constraint);
            ConstraintAgreement {
                constraint: r.constraint,
                search_residual: Some(r.residual.as_f64()),
                criteria,
                agrees: (criteria.residual - r.residual.as_f64()).abs() <= slack,
            }
        })
        .collect();
    let others = Constraint::ALL
        .iter()
        .filter(|c| !selected.contains(c))
        .map(|&c| {
            let criteria = check(c);
            ConstraintAgreement {
                constraint: c,
                search_residual: None,
                criteria,
                agrees: true,
            }
        })
        .collect();
    let magnitude = order_effect_magnitude(pair).as_f64();
    let objective = result.objective.as_f64();

    let all_four = Constraint::ALL.iter().all(|c| selected.contains(c));
    let (no_go_certificate, certificate_skipped) = if !all_four {
        (None, Some("not all four constraints selected".to_string()))
    } else if !result.feasible {
        (None, Some("result is infeasible".to_string()))
    } else {
        match no_go_certificate(pair, tol) {
            Ok(cert) => (Some(cert), None),
            Err(e) => (None, Some(e.to_string())),
        }
    };

    FeasibilityReport {
        feasible: result.feasible,
        objective,
        order_effect_magnitude: magnitude,
        objective_agrees: (objective - magnitude).abs() <= 1e-9_f64.max(slack),
        constraints,
        others,
        no_go_certificate,
        certificate_skipped,
    }
}
