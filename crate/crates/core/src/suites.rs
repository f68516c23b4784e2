//! Seeded property suites behind `seqmeas verify`. Each suite samples
//! instances that satisfy a result's hypotheses and checks its conclusion,
//! recording the worst residual seen.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::{
    aba_repeatability, adjacent_repeatability, bab_repeatability, no_go_certificate,
    order_effect_magnitude, order_effect_operator, structural_consequences, theorem1_certificate,
    theorem2_check, DERIVED_TOL_FACTOR,
};
use crate::instances::{
    aba_generator, canonical_example, canonical_example_theta, no_go_generator, random_contraction,
    random_effect_with_unit_eigenspace, random_projector, random_unit_vector_in, random_unitary,
    random_unitary_preserving, truncated_shift, PartDims, SeededRng,
};
use crate::linalg::{hermitian_eig_unchecked, Subspace, C};
use crate::measurement::{
    conditional_final_prob, extract_unitary_factor, sequence_joint_prob, InstancePair, Measurement,
};
use crate::scalar::{Real, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Suite {
    Theorem1,
    Theorem2,
    Lemma2,
    Canonical,
    OrderEffect,
    Structural,
    NoGo,
    Shift,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Self::Theorem1,
        Self::Theorem2,
        Self::Lemma2,
        Self::Canonical,
        Self::OrderEffect,
        Self::Structural,
        Self::NoGo,
        Self::Shift,
    ];

    fn stream_base(self) -> u64 {
        (self as u64 + 1) << 32
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SuiteConfig {
    pub seed: u64,
    pub theorem1_samples: usize,
    pub theorem2_samples: usize,
    pub lemma2_samples: usize,
    pub canonical_samples: usize,
    pub order_effect_samples: usize,
    pub structural_samples: usize,
    pub no_go_samples: usize,
    pub shift_samples: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            theorem1_samples: 500,
            theorem2_samples: 500,
            lemma2_samples: 200,
            canonical_samples: 50,
            order_effect_samples: 200,
            structural_samples: 200,
            no_go_samples: 100,
            shift_samples: 100,
        }
    }
}

impl SuiteConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn samples(&self, suite: Suite) -> usize {
        match suite {
            Suite::Theorem1 => self.theorem1_samples,
            Suite::Theorem2 => self.theorem2_samples,
            Suite::Lemma2 => self.lemma2_samples,
            Suite::Canonical => self.canonical_samples,
            Suite::OrderEffect => self.order_effect_samples,
            Suite::Structural => self.structural_samples,
            Suite::NoGo => self.no_go_samples,
            Suite::Shift => self.shift_samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SuiteReport {
    pub suite: Suite,
    pub description: String,
    pub samples: usize,
    pub failures: usize,
    pub passed: bool,
    pub worst_residual: f64,
    pub threshold: f64,
    /// Sample index and reason of the first failure.
    pub first_failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifyReport {
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

/// Outcome of one sample: the residual compared against the suite threshold,
/// plus an explanation when a non-residual condition failed.
struct Sample {
    residual: f64,
    failure: Option<String>,
}

impl Sample {
    fn residual(residual: f64) -> Self {
        Self {
            residual,
            failure: None,
        }
    }

    fn fail(residual: f64, why: impl Into<String>) -> Self {
        Self {
            residual,
            failure: Some(why.into()),
        }
    }
}

fn aggregate(suite: Suite, description: &str, threshold: f64, samples: Vec<Sample>) -> SuiteReport {
    let mut failures = 0;
    let mut first_failure = None;
    let mut worst = 0.0_f64;
    for (i, s) in samples.iter().enumerate() {
        // NaN counts as a failure and poisons the worst residual.
        worst = if s.residual.is_nan() {
            f64::NAN
        } else {
            worst.max(s.residual)
        };
        let why = s.failure.clone().or_else(|| {
            (s.residual.is_nan() || s.residual > threshold)
                .then(|| format!("residual {:e} above {:e}", s.residual, threshold))
        });
        if let Some(why) = why {
            failures += 1;
            first_failure.get_or_insert_with(|| format!("sample {i}: {why}"));
        }
    }
    SuiteReport {
        suite,
        description: description.to_string(),
        samples: samples.len(),
        failures,
        passed: failures == 0,
        worst_residual: worst,
        threshold,
        first_failure,
    }
}

fn sample_all<F>(suite: Suite, cfg: &SuiteConfig, f: F) -> Vec<Sample>
where
    F: Fn(usize, &mut SeededRng) -> Sample + Sync,
{
    (0..cfg.samples(suite))
        .into_par_iter()
        .map(|i| {
            let mut rng = SeededRng::for_stream(cfg.seed, suite.stream_base() + i as u64);
            f(i, &mut rng)
        })
        .collect()
}

fn in_range(rng: &mut SeededRng, lo: usize, hi: usize) -> usize {
    lo + rng.below(hi - lo + 1)
}

/// Splits `dim` into `(d₁₂, l₁, l₂, t)` with `d₁₂ ≥ min_d12`.
fn random_parts(dim: usize, min_d12: usize, rng: &mut SeededRng) -> PartDims {
    let d12 = in_range(rng, min_d12, dim);
    let l1 = rng.below(dim - d12 + 1);
    let l2 = rng.below(dim - d12 - l1 + 1);
    (d12, l1, l2, dim - d12 - l1 - l2)
}

fn theorem1<T: Real>(cfg: &SuiteConfig, tol: &Tolerances<T>) -> SuiteReport {
    let samples = sample_all(Suite::Theorem1, cfg, |_, rng| {
        let dim = in_range(rng, 2, 8);
        let k = in_range(rng, 1, dim);
        let (e, eig1) = match random_effect_with_unit_eigenspace::<T>(dim, k, rng) {
            Ok(v) => v,
            Err(err) => return Sample::fail(f64::NAN, err.to_string()),
        };
        let phi = random_unit_vector_in(&eig1, rng);
        match theorem1_certificate(&e, &phi, tol) {
            Ok(c) if c.holds => Sample::residual(c.residual),
            Ok(c) => Sample::fail(c.residual, "certificate false"),
            Err(err) => Sample::fail(f64::NAN, err.to_string()),
        }
    });
    aggregate(
        Suite::Theorem1,
        "⟨Eφ,φ⟩ = 1 for an effect E implies Eφ = φ",
        tol.eq_tol.as_f64(),
        samples,
    )
}

fn theorem2<T: Real>(cfg: &SuiteConfig, tol: &Tolerances<T>) -> SuiteReport {
    let samples = sample_all(Suite::Theorem2, cfg, |i, rng| {
        let dim = in_range(rng, 2, 8);
        let m = if i % 2 == 0 {
            let rank = rng.below(dim + 1);
            let p = match random_projector::<T>(dim, rank, rng) {
                Ok(p) => p,
                Err(err) => return Sample::fail(f64::NAN, err.to_string()),
            };
            let sub = match Subspace::from_projector(&p, tol) {
                Ok(s) => s,
                Err(err) => return Sample::fail(f64::NAN, err.to_string()),
            };
            &random_unitary_preserving(&sub, rng) * &p
        } else {
            random_contraction::<T>(dim, rng)
        };
        let c = theorem2_check(&m, tol);
        if c.em_equals_m == c.gram_is_projector {
            // Only the structured half is expected to have EM = M.
            Sample::residual(if i % 2 == 0 { c.em_residual } else { 0.0 })
        } else {
            Sample::fail(
                c.em_residual,
                format!(
                    "EM = M is {} but M*M projector is {}",
                    c.em_equals_m, c.gram_is_projector
                ),
            )
        }
    });
    aggregate(
        Suite::Theorem2,
        "EM = M iff E = M*M is a projector (UP-form and generic contractions)",
        tol.eq_tol.as_f64(),
        samples,
    )
}

fn lemma2<T: Real>(cfg: &SuiteConfig, tol: &Tolerances<T>) -> SuiteReport {
    let samples = sample_all(Suite::Lemma2, cfg, |_, rng| {
        let dim = in_range(rng, 2, 6);
        let rank = rng.below(dim + 1);
        let u0 = random_unitary::<T>(dim, rng);
        let p = match random_projector::<T>(dim, rank, rng) {
            Ok(p) => p,
            Err(err) => return Sample::fail(f64::NAN, err.to_string()),
        };
        let m = &u0 * &p;
        match extract_unitary_factor(&m, tol) {
            Ok((u, gram)) => Sample::residual((&u * &gram).distance(&m).as_f64()),
            Err(err) => Sample::fail(f64::NAN, err.to_string()),
        }
    });
    aggregate(
        Suite::Lemma2,
        "a transformer with projector Gram factors as M = UP",
        tol.eq_tol.as_f64(),
        samples,
    )
}

fn canonical<T: Real>(cfg: &SuiteConfig, tol: &Tolerances<T>) -> SuiteReport {
    let thetas = [0.0, PI / 6.0, PI / 4.0, PI / 3.0, PI / 2.0];
    let e2 = crate::linalg::Vector::<T>::basis(4, 1);
    let mut samples: Vec<Sample> = thetas
        .iter()
        .map(|&theta| {
            let pair = canonical_example_theta(T::lit(theta));
            let p_ab = sequence_joint_prob(&[&pair.a, &pair.b], &e2).as_f64();
            let p_ba = sequence_joint_prob(&[&pair.b, &pair.a], &e2).as_f64();
            let cos2 = theta.cos().powi(2);
            let conditions = three_conditions(&pair, tol);
            let residual = conditions
                .0
                .max((p_ab - cos2).abs())
                .max((p_ba - 1.0).abs());
            match conditions.1 {
                Some(why) => Sample::fail(residual, format!("θ = {theta}: {why}")),
                None => Sample::residual(residual),
            }
        })
        .collect();

    // θ = π/4 witnesses the one-sidedness: A-B-A holds, B-A-B does not.
    let witness = canonical_example_theta(T::lit(PI / 4.0));
    let bab = bab_repeatability(&witness, tol);
    let magnitude = order_effect_magnitude(&witness).as_f64();
    let aba_conditional = conditional_final_prob(&[&witness.a, &witness.b], &witness.a, &e2, tol)
        .map(|v| (v.as_f64() - 1.0).abs())
        .unwrap_or(f64::NAN);
    samples.push(if bab.holds || bab.residual < 0.1 || magnitude < 0.5 {
        Sample::fail(
            aba_conditional,
            format!(
                "θ = π/4: B-A-B residual {:e}, magnitude {magnitude}",
                bab.residual
            ),
        )
    } else {
        Sample::residual(aba_conditional)
    });

    samples.extend(sample_all(Suite::Canonical, cfg, |_, rng| {
        let u = random_unitary::<T>(3, rng);
        match canonical_example(&u) {
            Ok(pair) => {
                let (residual, failure) = three_conditions(&pair, tol);
                match failure {
                    Some(why) => Sample::fail(residual, why),
                    None => Sample::residual(residual),
                }
            }
            Err(err) => Sample::fail(f64::NAN, err.to_string()),
        }
    }));
    aggregate(
        Suite::Canonical,
        "four-dimensional example: A-A, B-B, A-B-A hold, p_AB(e₂) = cos²θ, B-A-B fails",
        tol.eq_tol.as_f64(),
        samples,
    )
}

/// Worst residual of A-A, B-B, A-B-A and the first condition that fails.
fn three_conditions<T: Real>(pair: &InstancePair<T>, tol: &Tolerances<T>) -> (f64, Option<String>) {
    let checks = [
        ("A-A", adjacent_repeatability(&pair.a, tol)),
        ("B-B", adjacent_repeatability(&pair.b, tol)),
        ("A-B-A", aba_repeatability(pair, tol)),
    ];
    let worst = checks.iter().map(|(_, c)| c.residual).fold(0.0, f64::max);
    let failure = checks
        .iter()
        .find(|(_, c)| !c.holds)
        .map(|(name, c)| format!("{name} residual {:e}", c.residual));
    (worst, failure)
}

fn order_effect<T: Real>(cfg: &SuiteConfig, tol: &Tolerances<T>) -> SuiteReport {
    let prob_tol = tol.prob_tol.as_f64();
    let samples = sample_all(Suite::OrderEffect, cfg, |_, rng| {
        let dim = in_range(rng, 2, 6);
        let make = |label: &str, rng: &mut SeededRng| {
            let rank = in_range(rng, 1, dim);
            let p = random_projector::<T>(dim, rank, rng)?;
            Measurement::new(label, p, random_unitary(dim, rng), tol)
        };
        let pair = match make("A", rng).and_then(|a| InstancePair::new(a, make("B", rng)?)) {
            Ok(p) => p,
            Err(err) => return Sample::fail(f64::NAN, err.to_string()),
        };
        let d = order_effect_operator(&pair);
        let hermitian = d.distance(&d.adjoint()).as_f64();
        let magnitude = hermitian_eig_unchecked(&d).spectral_norm().as_f64();
        let psi = rng.unit_vector::<T>(dim);
        // Global phase must not matter.
        let phased = psi.scale(C::from_polar(
            T::one(),
            T::lit(2.0 * PI) * rng.uniform::<T>(),
        ));
        let p_ab = sequence_joint_prob(&[&pair.a, &pair.b], &psi).as_f64();
        let p_ba = sequence_joint_prob(&[&pair.b, &pair.a], &psi).as_f64();
        let p_ab_phased = sequence_joint_prob(&[&pair.a, &pair.b], &phased).as_f64();
        if magnitude < (p_ab - p_ba).abs() - prob_tol {
            return Sample::fail(
                hermitian,
                format!("magnitude {magnitude} < gap {}", (p_ab - p_ba).abs()),
            );
        }
        if (p_ab - p_ab_phased).abs() > prob_tol {
            return Sample::fail(hermitian, "joint probability depends on global phase");
        }
        if !(-prob_tol..=1.0 + prob_tol).contains(&p_ab) {
            return Sample::fail(hermitian, format!("p_AB = {p_ab} outside [0, 1]"));
        }
        Sample::residual(hermitian)
    });
    aggregate(
        Suite::OrderEffect,
        "D is Hermitian and its spectral norm bounds |p_AB − p_BA|",
        tol.eq_tol.as_f64(),
        samples,
    )
}

fn structural<T: Real>(cfg: &SuiteConfig, tol: &Tolerances<T>) -> SuiteReport {
    let samples = sample_all(Suite::Structural, cfg, |_, rng| {
        let dim = in_range(rng, 2, 8);
        let pair = match aba_generator::<T>(random_parts(dim, 0, rng), rng) {
            Ok(p) => p,
            Err(err) => return Sample::fail(f64::NAN, err.to_string()),
        };
        if let (_, Some(why)) = three_conditions(&pair, tol) {
            return Sample::fail(f64::NAN, format!("generator broke hypothesis: {why}"));
        }
        let s = structural_consequences(&pair, tol);
        Sample::residual(s.projectors_commute.residual.max(s.perpendicular.residual))
    });
    aggregate(
        Suite::Structural,
        "A-A, B-B and A-B-A force commuting projectors with L₁ ⊥ L₂",
        tol.eq_tol.as_f64() * DERIVED_TOL_FACTOR,
        samples,
    )
}

fn no_go<T: Real>(cfg: &SuiteConfig, tol: &Tolerances<T>) -> SuiteReport {
    let samples = sample_all(Suite::NoGo, cfg, |_, rng| {
        let dim = in_range(rng, 3, 6);
        let pair = match no_go_generator::<T>(random_parts(dim, 1, rng), rng) {
            Ok(p) => p,
            Err(err) => return Sample::fail(f64::NAN, err.to_string()),
        };
        match no_go_certificate(&pair, tol) {
            Ok(cert) if cert.passed => Sample::residual(cert.order_effect_magnitude.residual),
            Ok(cert) => Sample::fail(cert.order_effect_magnitude.residual, format!("{cert:?}")),
            Err(err) => Sample::fail(f64::NAN, err.to_string()),
        }
    });
    aggregate(
        Suite::NoGo,
        "all four repeatability conditions leave no order effect",
        tol.eq_tol.as_f64() * DERIVED_TOL_FACTOR,
        samples,
    )
}

fn shift<T: Real>(cfg: &SuiteConfig, tol: &Tolerances<T>) -> SuiteReport {
    let eq = tol.eq_tol.as_f64();
    let samples = sample_all(Suite::Shift, cfg, |i, rng| {
        let n = in_range(rng, 3, 8);
        let modulus = match i {
            0 => 0.0,
            1 => 1.0,
            _ => rng.uniform::<f64>(),
        };
        let a = C::from_polar(T::lit(modulus), T::lit(2.0 * PI) * rng.uniform::<T>());
        let inst = match truncated_shift(a, n) {
            Ok(s) => s,
            Err(err) => return Sample::fail(f64::NAN, err.to_string()),
        };
        let residual = inst.em_residual_interior().as_f64();
        let a2 = modulus * modulus;
        let has_eigenvalue = hermitian_eig_unchecked(&inst.e)
            .values
            .iter()
            .any(|v| (v.as_f64() - a2).abs() <= eq);
        if !has_eigenvalue {
            return Sample::fail(residual, format!("|a|² = {a2} is not an eigenvalue of E"));
        }
        let expect_projector = a2 * (1.0 - a2) <= eq;
        if inst.is_projector(tol) != expect_projector {
            return Sample::fail(
                residual,
                format!("projector verdict wrong for |a| = {modulus}"),
            );
        }
        Sample::residual(residual)
    });
    aggregate(
        Suite::Shift,
        "truncated shift: EM = M away from the boundary column, E a projector iff |a| ∈ {0, 1}",
        eq,
        samples,
    )
}

pub fn run_suite<T: Real>(suite: Suite, cfg: &SuiteConfig, tol: &Tolerances<T>) -> SuiteReport {
    match suite {
        Suite::Theorem1 => theorem1(cfg, tol),
        Suite::Theorem2 => theorem2(cfg, tol),
        Suite::Lemma2 => lemma2(cfg, tol),
        Suite::Canonical => canonical(cfg, tol),
        Suite::OrderEffect => order_effect(cfg, tol),
        Suite::Structural => structural(cfg, tol),
        Suite::NoGo => no_go(cfg, tol),
        Suite::Shift => shift(cfg, tol),
    }
}

pub fn run_all<T: Real>(cfg: &SuiteConfig, tol: &Tolerances<T>) -> VerifyReport {
    let suites: Vec<SuiteReport> = Suite::ALL.iter().map(|&s| run_suite(s, cfg, tol)).collect();
    VerifyReport {
        passed: suites.iter().all(|s| s.passed),
        suites,
    }
}
