//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed; exits non-zero if any fails.

mod support;

use std::f64::consts::FRAC_PI_4;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex;
use seqmeas::criteria::{
    aba_repeatability, adjacent_repeatability, bab_repeatability, no_go_certificate,
    order_effect_magnitude, structural_consequences, theorem1_certificate, theorem2_check,
};
use seqmeas::instances::{
    aba_generator, canonical_example_theta, no_go_generator, random_contraction,
    random_effect_with_unit_eigenspace, random_projector, random_unit_vector_in, random_unitary,
    random_unitary_preserving, truncated_shift, SeededRng,
};
use seqmeas::linalg::{hermitian_eig, Subspace};
use seqmeas::measurement::{conditional_final_prob, extract_unitary_factor, sequence_joint_prob};
use seqmeas::search::{optimize, Constraint, SearchProblem};
use seqmeas::{ComplexVector, Tolerances};

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        ok,
        detail: detail.into(),
    }
}

fn tol() -> Tolerances<f64> {
    Tolerances::default()
}

fn dims(rng: &mut SeededRng, lo: usize, hi: usize) -> usize {
    lo + rng.below(hi - lo + 1)
}

fn parts(dim: usize, min_d12: usize, rng: &mut SeededRng) -> (usize, usize, usize, usize) {
    let d12 = min_d12 + rng.below(dim - min_d12 + 1);
    let l1 = rng.below(dim - d12 + 1);
    let l2 = rng.below(dim - d12 - l1 + 1);
    (d12, l1, l2, dim - d12 - l1 - l2)
}

fn theorem1() -> Verdict {
    let start = Instant::now();
    let mut rng = SeededRng::new(1);
    let (mut passed, mut worst) = (0, 0.0_f64);
    for _ in 0..500 {
        let dim = dims(&mut rng, 2, 8);
        let k = dims(&mut rng, 1, dim);
        let (e, eig1) = random_effect_with_unit_eigenspace::<f64>(dim, k, &mut rng).unwrap();
        let phi = random_unit_vector_in(&eig1, &mut rng);
        let residual = (&e.mul_vec(&phi) - &phi).norm();
        let cert = theorem1_certificate(&e, &phi, &tol())
            .map(|c| c.holds)
            .unwrap_or(false);
        worst = worst.max(residual);
        if cert && residual <= 1e-9 {
            passed += 1;
        }
    }
    let elapsed = start.elapsed();
    verdict(
        passed == 500 && elapsed < Duration::from_secs(5),
        format!("{passed}/500 with ‖Eφ − φ‖ ≤ 1e-9 (worst {worst:e}), {elapsed:?}"),
    )
}

fn theorem2() -> Verdict {
    let start = Instant::now();
    let mut rng = SeededRng::new(2);
    let mut agree = 0;
    let (mut up_true, mut generic_false) = (0, 0);
    for i in 0..500 {
        let dim = dims(&mut rng, 2, 8);
        let m = if i % 2 == 0 {
            let rank = rng.below(dim + 1);
            let p = random_projector::<f64>(dim, rank, &mut rng).unwrap();
            let sub = Subspace::from_projector(&p, &tol()).unwrap();
            &random_unitary_preserving(&sub, &mut rng) * &p
        } else {
            random_contraction::<f64>(dim, &mut rng)
        };
        let c = theorem2_check(&m, &tol());
        if c.em_equals_m == c.gram_is_projector {
            agree += 1;
        }
        if i % 2 == 0 && c.em_equals_m {
            up_true += 1;
        }
        if i % 2 == 1 && !c.gram_is_projector {
            generic_false += 1;
        }
    }
    let elapsed = start.elapsed();
    verdict(
        agree == 500 && elapsed < Duration::from_secs(5),
        format!(
            "{agree}/500 agree (UP-form with EM = M: {up_true}/250, generic non-projector Gram: {generic_false}/250), {elapsed:?}"
        ),
    )
}

fn lemma2() -> Verdict {
    let mut rng = SeededRng::new(3);
    let (mut passed, mut worst) = (0, 0.0_f64);
    for _ in 0..200 {
        let dim = dims(&mut rng, 2, 6);
        let rank = rng.below(dim + 1);
        let u0 = random_unitary::<f64>(dim, &mut rng);
        let p = random_projector(dim, rank, &mut rng).unwrap();
        let m = &u0 * &p;
        if let Ok((u, gram)) = extract_unitary_factor(&m, &tol()) {
            let r = (&u * &gram).distance(&m);
            worst = worst.max(r);
            if r <= 1e-9 {
                passed += 1;
            }
        }
    }
    verdict(
        passed == 200,
        format!("{passed}/200 with ‖UP − M‖_F ≤ 1e-9 (worst {worst:e})"),
    )
}

fn canonical() -> Verdict {
    let pair = canonical_example_theta(FRAC_PI_4);
    let t = tol();
    let e2 = ComplexVector::basis(4, 1);
    let aa_a = adjacent_repeatability(&pair.a, &t).residual;
    let aa_b = adjacent_repeatability(&pair.b, &t).residual;
    let aba = aba_repeatability(&pair, &t).residual;
    let bab = bab_repeatability(&pair, &t).residual;
    let p_ab = sequence_joint_prob(&[&pair.a, &pair.b], &e2);
    let p_ba = sequence_joint_prob(&[&pair.b, &pair.a], &e2);
    let aba_cond =
        conditional_final_prob(&[&pair.a, &pair.b], &pair.a, &e2, &t).unwrap_or(f64::NAN);

    let reference = support::canonical(FRAC_PI_4);
    let psi = support::basis(4, 1);
    let r_ab = reference.p_ab(&psi);
    let r_ba = reference.p_ba(&psi);
    let r_cond = reference.conditional(&[&reference.m1(), &reference.m2()], &reference.p1, &psi);
    let cross = (p_ab - r_ab)
        .abs()
        .max((p_ba - r_ba).abs())
        .max((aba_cond - r_cond).abs());

    let ok = aa_a <= 1e-10
        && aa_b <= 1e-10
        && aba <= 1e-10
        && bab >= 0.1
        && (p_ab - 0.5).abs() <= 1e-10
        && (p_ba - 1.0).abs() <= 1e-10
        && (aba_cond - 1.0).abs() <= 1e-10
        && cross <= 1e-12;
    verdict(
        ok,
        format!(
            "residuals aaA {aa_a:e} aaB {aa_b:e} aba {aba:e} bab {bab:.4}; pAB {p_ab} pBA {p_ba} ABA conditional {aba_cond}; reference gap {cross:e}"
        ),
    )
}

fn structural() -> Verdict {
    let mut rng = SeededRng::new(5);
    let t = tol();
    let (mut passed, mut worst) = (0, 0.0_f64);
    for _ in 0..200 {
        let dim = dims(&mut rng, 2, 8);
        let pair = aba_generator::<f64>(parts(dim, 0, &mut rng), &mut rng).unwrap();
        let hypotheses = adjacent_repeatability(&pair.a, &t).holds
            && adjacent_repeatability(&pair.b, &t).holds
            && aba_repeatability(&pair, &t).holds;
        let s = structural_consequences(&pair, &t);
        let r = s.projectors_commute.residual.max(s.perpendicular.residual);
        worst = worst.max(r);
        if hypotheses && r <= 1e-8 {
            passed += 1;
        }
    }
    verdict(
        passed == 200,
        format!("{passed}/200 with ‖[P₁,P₂]‖_F and L₁⊥L₂ residual ≤ 1e-8 (worst {worst:e})"),
    )
}

fn no_go() -> Verdict {
    let start = Instant::now();
    let mut rng = SeededRng::new(6);
    let (mut certified, mut worst) = (0, 0.0_f64);
    for _ in 0..100 {
        let dim = dims(&mut rng, 3, 6);
        let pair = no_go_generator::<f64>(parts(dim, 1, &mut rng), &mut rng).unwrap();
        let magnitude = order_effect_magnitude(&pair);
        worst = worst.max(magnitude);
        if no_go_certificate(&pair, &tol())
            .map(|c| c.passed)
            .unwrap_or(false)
            && magnitude <= 1e-8
        {
            certified += 1;
        }
    }
    let mut searches = Vec::new();
    for seed in 0..5 {
        let p = SearchProblem::<f64>::canonical(4, Constraint::ALL.to_vec(), seed).unwrap();
        let r = optimize(&p).unwrap();
        searches.push((r.feasible, r.objective));
    }
    let elapsed = start.elapsed();
    let search_ok = searches.iter().all(|(f, o)| *f && *o <= 1e-5);
    let worst_search = searches.iter().map(|s| s.1).fold(0.0, f64::max);
    verdict(
        certified == 100 && search_ok && elapsed < Duration::from_secs(120),
        format!(
            "(a) {certified}/100 certified, worst magnitude {worst:e}; (b) 5 seeds x 16 restarts feasible {}, worst objective {worst_search:e}; {elapsed:?}",
            searches.iter().all(|s| s.0)
        ),
    )
}

fn feasibility_contrast() -> Verdict {
    let start = Instant::now();
    let three = vec![Constraint::AaA, Constraint::AaB, Constraint::Aba];
    let mut objectives = Vec::new();
    let mut all_feasible = true;
    for seed in 0..5 {
        let p = SearchProblem::<f64>::canonical(4, three.clone(), seed).unwrap();
        let r = optimize(&p).unwrap();
        all_feasible &= r.feasible;
        objectives.push(r.objective);
    }
    let elapsed = start.elapsed();
    let worst = objectives.iter().copied().fold(f64::INFINITY, f64::min);
    verdict(
        all_feasible && worst >= 0.9 && elapsed < Duration::from_secs(120),
        format!(
            "feasible {all_feasible}, objectives {objectives:.6?} (min {worst:.6}), {elapsed:?}"
        ),
    )
}

fn shift() -> Verdict {
    let t = tol();
    let inst = truncated_shift(Complex::new(0.5, 0.0), 6).unwrap();
    let em = inst.em_residual();
    let eig = hermitian_eig(&inst.e, &t).unwrap().values;
    let has_quarter = eig.iter().any(|v| (v - 0.25).abs() <= 1e-12);
    let not_projector = !inst.is_projector(&t);
    let boundary = [0.0, 1.0].iter().all(|&m| {
        truncated_shift(Complex::new(m, 0.0), 6)
            .map(|s| s.is_projector(&t))
            .unwrap_or(false)
    });
    verdict(
        em == 0.0 && has_quarter && not_projector && boundary,
        format!(
            "‖EM − M‖_F = {em:e} (required 0; off the boundary column {:e}); eigenvalue 0.25 {has_quarter}; non-projector {not_projector}; |a| ∈ {{0,1}} projectors {boundary}",
            inst.em_residual_interior()
        ),
    )
}

/// Criteria that cannot hold as stated. Criterion 8 asks for `‖EM − M‖_F = 0`
/// on a finite truncation of the shift, but the boundary column `e_{n−1}`
/// always leaves a residual of 1: in finite dimension `EM = M` forces `E` to be
/// a projector.
const KNOWN_FAILURES: &[usize] = &[8];

type Criterion = (&'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("theorem 1 suite", theorem1),
        ("theorem 2 biconditional", theorem2),
        ("unitary factor round trip", lemma2),
        ("canonical example", canonical),
        ("structural consequences", structural),
        ("no-go", no_go),
        ("feasibility contrast", feasibility_contrast),
        ("truncated shift", shift),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        println!(
            "{} criterion {}: {name}: {}",
            if v.ok { "PASS" } else { "FAIL" },
            i + 1,
            v.detail
        );
        if !v.ok {
            failed.push(i + 1);
        }
    }
    println!(
        "acceptance: {} passed, {} failed {failed:?} (expected failures {KNOWN_FAILURES:?})",
        criteria.len() - failed.len(),
        failed.len()
    );
    // The target fails on any unexpected FAIL, and also if a known failure
    // starts passing, so the list cannot go stale.
    if failed == KNOWN_FAILURES {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
