use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, PI};

use bargmann_retrieval::factorization::{poly_roots, roots_to_poly, ZeroMultiset};
use bargmann_retrieval::fock_core::FockPolynomial;
use bargmann_retrieval::lattice_geometry::{canonical_progressions, RigidMotion, ShiftedLattice, StructuredSet};
use bargmann_retrieval::retrieval::{
    forward_sample, interpolate_squared_modulus, phase_equivalent, reconstruct, sharpness_witness,
};
use bargmann_retrieval::Complex64;
use proptest::prelude::*;

fn unit_disc() -> impl Strategy<Value = Complex64> {
    (0.0..1.0f64, 0.0..(2.0 * PI)).prop_map(|(r, t)| Complex64::from_polar(r.sqrt(), t))
}

fn min_separation(p: &FockPolynomial) -> f64 {
    if p.degree() < 2 {
        return f64::INFINITY;
    }
    let roots = poly_roots(p).unwrap().expanded();
    let mut best = f64::INFINITY;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            best = best.min((roots[i] - roots[j]).norm());
        }
    }
    best
}

fn polynomial(max_degree: usize) -> impl Strategy<Value = FockPolynomial> {
    prop::collection::vec(unit_disc(), 1..=max_degree + 1)
        .prop_map(FockPolynomial::new)
        .prop_filter("root separation", |p| min_separation(p) >= 0.05)
}

/// Progressions `ℤ` and `i + ℤ` of the unit lattice.
fn unit_progressions(truncation: usize) -> StructuredSet {
    let lattice = ShiftedLattice::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0)).unwrap();
    canonical_progressions(&lattice, truncation).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn round_trip_up_to_phase(p in polynomial(8)) {
        let d = p.degree();
        let set = unit_progressions(2 * d + 6);
        let res = reconstruct(&forward_sample(&p, &set), &set, d + 2).unwrap();
        prop_assert_eq!(res.detected_degree, d);
        prop_assert!(phase_equivalent(&res.recovered, &p, 1e-7).0, "{:?}", res.recovered);
        let scale = forward_sample(&p, &set).max_magnitude();
        prop_assert!(res.residual <= 1e-8 * scale);
    }

    #[test]
    fn canonical_output_ignores_global_phase(p in polynomial(5)) {
        let set = unit_progressions(2 * p.degree() + 6);
        let base = reconstruct(&forward_sample(&p, &set), &set, 5).unwrap().recovered;
        for k in 0..12 {
            let rotated = p.scale(Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 12.0));
            let got = reconstruct(&forward_sample(&rotated, &set), &set, 5).unwrap().recovered;
            prop_assert_eq!(got.degree(), base.degree());
            for (a, b) in got.coeffs().iter().zip(base.coeffs()) {
                prop_assert!((a - b).norm() <= 1e-10 * base.max_coeff());
            }
        }
    }

    #[test]
    fn squared_modulus_fit_is_nonnegative(p in polynomial(6)) {
        let q = p.degree();
        let nodes: Vec<(i64, f64)> = (-12..=12).map(|n| (n, p.eval(Complex64::new(n as f64, 0.0)).norm())).collect();
        let fit = interpolate_squared_modulus(&nodes, 1.0, q).unwrap();
        prop_assert!(fit.min_fitted >= -1e-9 * fit.scale);
        prop_assert!(fit.poly().coeffs().iter().all(|c| c.im == 0.0));
    }
}

#[test]
fn rigid_motion_equivariance() {
    let zeros = [Complex64::new(0.5, 0.3), Complex64::new(-1.2, 0.8), Complex64::new(2.0, -0.4)];
    let p = roots_to_poly(&ZeroMultiset::from_points(&zeros).unwrap(), Complex64::new(0.7, -0.2));
    for theta in [0.0, FRAC_PI_6, FRAC_PI_2] {
        let motion = RigidMotion::new(theta, Complex64::new(1.5, -0.75));
        let set = StructuredSet::new(
            motion.apply(Complex64::new(0.0, 0.0)),
            motion.apply(Complex64::new(0.0, 1.0)),
            theta,
            1.0,
            1.0,
            vec![motion.apply(Complex64::new(0.5, 0.5)), motion.apply(Complex64::new(-3.0, 2.5))],
            12,
        )
        .unwrap();
        // p transported by the motion: z ↦ p(e^{−iθ}(z − z₁))
        let back = motion.rotation().conj();
        let transported = p.compose_affine(back, -back * motion.translation);
        let res = reconstruct(&forward_sample(&transported, &set), &set, 5).unwrap();
        assert_eq!(res.frame, motion);
        assert!(
            phase_equivalent(&res.recovered, &transported, 1e-8).0,
            "θ = {theta}: {:?}",
            res.recovered
        );
    }
}

#[test]
fn counterexample_identity_on_integers() {
    for k in -100i32..=100 {
        // sin has period 4 in k; reduce exactly before evaluating.
        let s = (FRAC_PI_4 + FRAC_PI_2 * k.rem_euclid(4) as f64).sin();
        assert!((s * s - 0.5).abs() <= 1e-15, "k = {k}");
        // Unreduced evaluation differs only by argument rounding, ~|k|·ε.
        let raw = (FRAC_PI_4 + FRAC_PI_2 * k as f64).sin();
        assert!((raw * raw - 0.5).abs() <= 4.0 * f64::EPSILON * (1.0 + k.abs() as f64 * FRAC_PI_2));
    }
}

#[test]
fn sharpness_at_the_threshold() {
    for kappa in [1.0, FRAC_PI_2, 2.5] {
        let spacing = PI / (2.0 * kappa);
        let lattice =
            ShiftedLattice::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.5), Complex64::new(spacing, 0.0))
                .unwrap();
        let report = sharpness_witness(&lattice, kappa, 1e-9).unwrap();
        assert!(!report.conditions.spacing_ok);
        let w = report.witness.expect("witness");
        assert!(w.type_within_kappa);
        assert!(w.check.verdict, "κ = {kappa}: {:?}", w.check);
    }
}

#[test]
fn mirror_partner_triggers_fallback_end_to_end() {
    // Zeros w and w + 2i on the unit progressions (second line Im z = 1).
    let w = Complex64::new(0.4, 0.3);
    let p = roots_to_poly(
        &ZeroMultiset::from_points(&[w, w + Complex64::new(0.0, 2.0)]).unwrap(),
        Complex64::new(1.0, 0.0),
    );
    let set = unit_progressions(10).with_extra(vec![Complex64::new(0.5, 3.0), Complex64::new(-2.0, -1.5)]).unwrap();
    let res = reconstruct(&forward_sample(&p, &set), &set, 3).unwrap();
    assert!(res.ambiguity_flag);
    assert!(phase_equivalent(&res.recovered, &p, 1e-8).0);
}

