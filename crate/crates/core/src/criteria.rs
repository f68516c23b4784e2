//! Executable repeatability and order-effect predicates.
//!
//! Every checker returns the residual alongside the verdict so callers can
//! assert theorems with a margin and the search can reuse residuals as
//! penalties.

use serde::{Deserialize, Serialize};

use crate::linalg::{
    block_decompose, commutator_norm, four_way_decomposition, hermitian_eig_unchecked, is_effect,
    is_projector, subspace_intersection, BlockDecomposition, Matrix, Subspace, Vector,
};
use crate::measurement::{InstancePair, Measurement};
use crate::scalar::{Real, Tolerances};
use crate::{Error, Result};

/// Slack applied to identities derived through several matrix products.
pub const DERIVED_TOL_FACTOR: f64 = 10.0;

/// A verdict with its residual; `holds` iff `residual ≤ threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub holds: bool,
    pub residual: f64,
}

impl Check {
    pub fn new<T: Real>(residual: T, threshold: T) -> Self {
        Self {
            holds: residual <= threshold,
            residual: residual.as_f64(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CriteriaReport {
    pub aa_a: Check,
    pub aa_b: Check,
    pub aba: Check,
    pub bab: Check,
    pub order_effect_magnitude: f64,
    pub projectors_commute: Check,
    pub perpendicular: Check,
    pub intersection_dim: usize,
}

/// `φ` with `⟨Eφ, φ⟩ = 1` must satisfy `Eφ = φ` for an effect `E`.
pub fn theorem1_certificate<T: Real>(
    e: &Matrix<T>,
    phi: &Vector<T>,
    tol: &Tolerances<T>,
) -> Result<Check> {
    if !is_effect(e, tol) {
        return Err(Error::PreconditionUnmet("E is not an effect".into()));
    }
    if (phi.norm() - T::one()).abs() > tol.prob_tol {
        return Err(Error::NotNormalized {
            norm: phi.norm().as_f64(),
        });
    }
    let expectation = e.expectation(phi);
    if expectation < T::one() - tol.prob_tol {
        return Err(Error::PreconditionUnmet(format!(
            "<E phi, phi> = {expectation} < 1"
        )));
    }
    Ok(Check::new(e.mul_vec(phi).distance(phi), tol.eq_tol))
}

/// `‖PUP − UP‖_F`: zero iff an immediate repeat answers "yes" with
/// certainty, equivalently iff `U` leaves `range(P)` invariant.
pub fn adjacent_repeatability<T: Real>(m: &Measurement<T>, tol: &Tolerances<T>) -> Check {
    let up = m.transformer();
    Check::new((&m.p * &up).distance(&up), tol.eq_tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Theorem2Check {
    pub em_equals_m: bool,
    pub gram_is_projector: bool,
    pub em_residual: f64,
}

/// Evaluates both sides of "`(M*M)M = M` iff `M*M` is a projector".
pub fn theorem2_check<T: Real>(m: &Matrix<T>, tol: &Tolerances<T>) -> Theorem2Check {
    let e = &m.adjoint() * m;
    let residual = (&e * m).distance(m);
    Theorem2Check {
        em_equals_m: residual <= tol.eq_tol,
        gram_is_projector: is_projector(&e, tol),
        em_residual: residual.as_f64(),
    }
}

/// `P₁U₁*P₂U₁P₁ − P₂U₂*P₁U₂P₂`, whose quadratic form at `ψ` is
/// `p_{A-B}(ψ) − p_{B-A}(ψ)`.
pub fn order_effect_operator<T: Real>(pair: &InstancePair<T>) -> Matrix<T> {
    let compress = |first: &Measurement<T>, second: &Measurement<T>| {
        let m = first.transformer();
        &(&m.adjoint() * &second.p) * &m
    };
    &compress(&pair.a, &pair.b) - &compress(&pair.b, &pair.a)
}

/// Spectral norm of [`order_effect_operator`]: the largest order gap over
/// all unit states.
pub fn order_effect_magnitude<T: Real>(pair: &InstancePair<T>) -> T {
    hermitian_eig_unchecked(&order_effect_operator(pair)).spectral_norm()
}

/// `‖P₁U₂P₂U₁P₁ − U₂P₂U₁P₁‖_F`.
pub fn aba_repeatability<T: Real>(pair: &InstancePair<T>, tol: &Tolerances<T>) -> Check {
    let nm = &pair.b.transformer() * &pair.a.transformer();
    Check::new((&pair.a.p * &nm).distance(&nm), tol.eq_tol)
}

/// `‖P₂U₁P₁U₂P₂ − U₁P₁U₂P₂‖_F`.
pub fn bab_repeatability<T: Real>(pair: &InstancePair<T>, tol: &Tolerances<T>) -> Check {
    aba_repeatability(&pair.swapped(), tol)
}

/// Geometric consequences of the repeatability conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StructuralReport {
    pub projectors_commute: Check,
    /// `P₂H₁ = H₁₂`.
    pub p2_h1_is_h12: Check,
    /// `P₁H₂ = H₁₂`.
    pub p1_h2_is_h12: Check,
    pub u1_preserves_h12: Check,
    pub u2_preserves_h12: Check,
    pub perpendicular: Check,
    pub intersection_dim: usize,
}

fn intersection_or_zero<T: Real>(pair: &InstancePair<T>, tol: &Tolerances<T>) -> Subspace<T> {
    // Measurements are validated on construction, so this cannot fail.
    subspace_intersection(&pair.a.p, &pair.b.p, tol).unwrap_or_else(|_| Subspace::zero(pair.dim))
}

pub fn structural_consequences<T: Real>(
    pair: &InstancePair<T>,
    tol: &Tolerances<T>,
) -> StructuralReport {
    let (p1, p2) = (&pair.a.p, &pair.b.p);
    let h12 = intersection_or_zero(pair, tol);
    let image_check = |outer: &Matrix<T>, inner: &Matrix<T>| {
        let image = Subspace::range_of(&(outer * inner), tol);
        Check::new(image.projector.distance(&h12.projector), tol.eq_tol)
    };
    let l1 = p1 - &h12.projector;
    let l2 = p2 - &h12.projector;
    StructuralReport {
        projectors_commute: Check::new(commutator_norm(p1, p2), tol.eq_tol),
        p2_h1_is_h12: image_check(p2, p1),
        p1_h2_is_h12: image_check(p1, p2),
        u1_preserves_h12: Check::new(h12.invariance_residual(&pair.a.u), tol.eq_tol),
        u2_preserves_h12: Check::new(h12.invariance_residual(&pair.b.u), tol.eq_tol),
        perpendicular: Check::new((&l1 * &l2).frobenius_norm(), tol.eq_tol),
        intersection_dim: h12.dim(),
    }
}

pub fn criteria_report<T: Real>(pair: &InstancePair<T>, tol: &Tolerances<T>) -> CriteriaReport {
    let s = structural_consequences(pair, tol);
    CriteriaReport {
        aa_a: adjacent_repeatability(&pair.a, tol),
        aa_b: adjacent_repeatability(&pair.b, tol),
        aba: aba_repeatability(pair, tol),
        bab: bab_repeatability(pair, tol),
        order_effect_magnitude: order_effect_magnitude(pair).as_f64(),
        projectors_commute: s.projectors_commute,
        perpendicular: s.perpendicular,
        intersection_dim: s.intersection_dim,
    }
}

/// Evidence that a pair satisfying all four repeatability conditions has no
/// order effect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NoGoCertificate {
    pub passed: bool,
    pub order_effect_magnitude: Check,
    /// `‖P₁U₁*P₂U₁P₁ − P₁₂‖_F`.
    pub ab_compression_is_h12: Check,
    /// `‖P₂U₂*P₁U₂P₂ − P₁₂‖_F`.
    pub ba_compression_is_h12: Check,
    /// Off-block mass of `U₁` against `(H₁₂, L₁, H₁^⊥)`.
    pub u1_block_diagonal: Check,
    /// Off-block mass of `U₂` against `(H₁₂, L₂, H₂^⊥)`.
    pub u2_block_diagonal: Check,
    /// `(dim H₁₂, dim L₁, dim L₂, dim H̃)`.
    pub dims: (usize, usize, usize, usize),
}

pub fn no_go_certificate<T: Real>(
    pair: &InstancePair<T>,
    tol: &Tolerances<T>,
) -> Result<NoGoCertificate> {
    let conditions = [
        ("aaA", adjacent_repeatability(&pair.a, tol)),
        ("aaB", adjacent_repeatability(&pair.b, tol)),
        ("aba", aba_repeatability(pair, tol)),
        ("bab", bab_repeatability(pair, tol)),
    ];
    let failed: Vec<String> = conditions
        .iter()
        .filter(|(_, c)| !c.holds)
        .map(|(name, c)| format!("{name} residual {:e}", c.residual))
        .collect();
    if !failed.is_empty() {
        return Err(Error::PreconditionUnmet(failed.join(", ")));
    }

    let loose = tol.scaled(T::lit(DERIVED_TOL_FACTOR));
    let decomposition = four_way_decomposition(&pair.a.p, &pair.b.p, &loose)?;
    let p12 = &decomposition.h12.projector;

    let compression = |first: &Measurement<T>, second: &Measurement<T>| {
        let m = first.transformer();
        let c = &(&m.adjoint() * &second.p) * &m;
        Check::new(c.distance(p12), loose.eq_tol)
    };
    let block_check = |u: &Matrix<T>, j: usize| -> Result<Check> {
        let own = if j == 1 {
            &decomposition.l1
        } else {
            &decomposition.l2
        };
        let outside = decomposition.outside(j);
        let mass = match block_decompose(u, &[&decomposition.h12, own, &outside], &loose)? {
            BlockDecomposition::Blocks(_) => T::zero(),
            BlockDecomposition::Violation { off_block_mass, .. } => T::lit(off_block_mass),
        };
        Ok(Check::new(mass, loose.eq_tol))
    };

    let magnitude = Check::new(order_effect_magnitude(pair), loose.eq_tol);
    let ab = compression(&pair.a, &pair.b);
    let ba = compression(&pair.b, &pair.a);
    let u1 = block_check(&pair.a.u, 1)?;
    let u2 = block_check(&pair.b.u, 2)?;
    Ok(NoGoCertificate {
        passed: magnitude.holds && ab.holds && ba.holds && u1.holds && u2.holds,
        order_effect_magnitude: magnitude,
        ab_compression_is_h12: ab,
        ba_compression_is_h12: ba,
        u1_block_diagonal: u1,
        u2_block_diagonal: u2,
        dims: decomposition.dims(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{block_diag, planar_rotation, C};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    fn canonical(theta: f64) -> InstancePair<f64> {
        let t = tol();
        let a = Measurement::new(
            "A",
            Matrix::diag_real(&[1.0, 1.0, 1.0, 0.0]),
            planar_rotation(4, 1, 2, theta),
            &t,
        )
        .unwrap();
        let b = Measurement::luders("B", Matrix::diag_real(&[1.0, 1.0, 0.0, 1.0]), &t).unwrap();
        InstancePair::new(a, b).unwrap()
    }

    #[test]
    fn theorem1_on_diagonal_effect() {
        let e = Matrix::<f64>::diag_real(&[1.0, 0.5]);
        assert!(
            theorem1_certificate(&e, &Vector::basis(2, 0), &tol())
                .unwrap()
                .holds
        );
        assert!(matches!(
            theorem1_certificate(&e, &Vector::basis(2, 1), &tol()),
            Err(Error::PreconditionUnmet(_))
        ));
        let not_effect = Matrix::<f64>::diag_real(&[1.5, 0.0]);
        assert!(theorem1_certificate(&not_effect, &Vector::basis(2, 0), &tol()).is_err());
    }

    #[test]
    fn adjacent_repeatability_cases() {
        let t = tol();
        let block = block_diag(&[
            &planar_rotation::<f64>(2, 0, 1, 0.4),
            &planar_rotation::<f64>(2, 0, 1, 1.3),
        ]);
        let m = Measurement::new("A", Matrix::diag_real(&[1.0, 1.0, 0.0, 0.0]), block, &t).unwrap();
        assert!(adjacent_repeatability(&m, &t).holds);
        assert!(adjacent_repeatability(&canonical(FRAC_PI_4).a, &t).holds);

        let s = 0.5f64.sqrt();
        let hadamard = Matrix::from_real_rows(&[&[s, s], &[s, -s]]).unwrap();
        let m = Measurement::new("A", Matrix::diag_real(&[1.0, 0.0]), hadamard, &t).unwrap();
        let c = adjacent_repeatability(&m, &t);
        assert!(!c.holds && c.residual > 0.1);
        assert!((c.residual - s).abs() < 1e-15);
    }

    #[test]
    fn theorem2_examples() {
        let t = tol();
        let m = &planar_rotation::<f64>(3, 0, 2, 0.8) * &Matrix::diag_real(&[1.0, 0.0, 1.0]);
        let r = theorem2_check(&m, &t);
        assert!(r.em_equals_m && r.gram_is_projector);
        let r = theorem2_check(&Matrix::<f64>::diag_real(&[1.0, 0.5]), &t);
        assert!(!r.em_equals_m && !r.gram_is_projector);
        assert!((r.em_residual - 0.375).abs() < 1e-15);
        let r = theorem2_check(&Matrix::<f64>::zeros(3), &t);
        assert!(r.em_equals_m && r.gram_is_projector);
    }

    #[test]
    fn commuting_luders_pair_has_no_order_effect() {
        let t = tol();
        let a = Measurement::luders("A", Matrix::diag_real(&[1.0, 1.0, 0.0]), &t).unwrap();
        let b = Measurement::luders("B", Matrix::diag_real(&[0.0, 1.0, 1.0]), &t).unwrap();
        let pair = InstancePair::new(a, b).unwrap();
        assert_eq!(order_effect_operator(&pair).frobenius_norm(), 0.0);
        assert_eq!(order_effect_magnitude(&pair), 0.0);
    }

    #[test]
    fn canonical_order_effect() {
        let pair = canonical(FRAC_PI_4);
        let d = order_effect_operator(&pair);
        let e2 = Vector::basis(4, 1);
        assert!((d.expectation(&e2) + 0.5).abs() < 1e-15);
        assert!(d.distance(&d.adjoint()) < 1e-15);
        assert!((order_effect_magnitude(&pair) - 0.5f64.sqrt()).abs() < 1e-14);
        assert!((order_effect_magnitude(&canonical(FRAC_PI_2)) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn canonical_separated_repeatability() {
        let t = tol();
        for theta in [0.0, 0.3, FRAC_PI_4, 2.0] {
            assert!(aba_repeatability(&canonical(theta), &t).holds);
        }
        let bab = bab_repeatability(&canonical(FRAC_PI_4), &t);
        assert!(!bab.holds && bab.residual > 0.1);
    }

    #[test]
    fn identical_luders_measurements_are_repeatable() {
        let t = tol();
        let p = Matrix::diag_real(&[1.0, 0.0, 1.0]);
        let a = Measurement::luders("A", p.clone(), &t).unwrap();
        let b = Measurement::luders("B", p, &t).unwrap();
        let pair = InstancePair::new(a, b).unwrap();
        assert!(aba_repeatability(&pair, &t).holds);
        assert!(bab_repeatability(&pair, &t).holds);
    }

    #[test]
    fn structural_report_for_canonical_example() {
        let s = structural_consequences(&canonical(FRAC_PI_4), &tol());
        assert!(s.projectors_commute.holds);
        assert!(s.perpendicular.holds);
        assert!(s.p2_h1_is_h12.holds && s.p1_h2_is_h12.holds);
        assert!(s.u2_preserves_h12.holds);
        assert!(!s.u1_preserves_h12.holds);
        assert_eq!(s.intersection_dim, 2);
        let s = structural_consequences(&canonical(std::f64::consts::PI), &tol());
        assert!(s.u1_preserves_h12.holds);
    }

    #[test]
    fn oblique_lines_do_not_commute() {
        let t = tol();
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let a = Vector::from_real(&[1.0, 0.0]);
        let b = Vector::from_real(&[c, s]);
        let pair = InstancePair::new(
            Measurement::luders("A", Matrix::outer(&a, &a), &t).unwrap(),
            Measurement::luders("B", Matrix::outer(&b, &b), &t).unwrap(),
        )
        .unwrap();
        let r = structural_consequences(&pair, &t);
        assert!(!r.projectors_commute.holds && r.projectors_commute.residual > 0.0);
        assert!(order_effect_magnitude(&pair) > 0.0);
    }

    #[test]
    fn no_go_certificate_for_equal_measurements() {
        let t = tol();
        let p = Matrix::diag_real(&[1.0, 1.0, 0.0, 0.0]);
        let v = Matrix::from_rows(vec![
            vec![C::new(0.0, 1.0), C::new(0.0, 0.0)],
            vec![C::new(0.0, 0.0), C::new(1.0, 0.0)],
        ])
        .unwrap();
        let u = block_diag(&[&v, &planar_rotation(2, 0, 1, 0.9)]);
        let pair = InstancePair::new(
            Measurement::new("A", p.clone(), u.clone(), &t).unwrap(),
            Measurement::new("B", p, u, &t).unwrap(),
        )
        .unwrap();
        let cert = no_go_certificate(&pair, &t).unwrap();
        assert!(cert.passed, "{cert:?}");
        assert_eq!(cert.dims, (2, 0, 0, 2));
    }

    #[test]
    fn no_go_precondition_names_failed_condition() {
        match no_go_certificate(&canonical(FRAC_PI_4), &tol()) {
            Err(Error::PreconditionUnmet(msg)) => {
                assert!(msg.contains("bab") && !msg.contains("aba"), "{msg}")
            }
            other => panic!("expected PreconditionUnmet, got {other:?}"),
        }
    }

    #[test]
    fn report_json_shape() {
        let r = criteria_report(&canonical(FRAC_PI_4), &tol());
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["aaA"]["holds"], true);
        assert_eq!(v["bab"]["holds"], false);
        assert_eq!(v["intersectionDim"], 2);
        assert!(v["orderEffectMagnitude"].as_f64().unwrap() > 0.7);
    }
}
