//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! run with `--nocapture` to see them.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use bargmann_retrieval::factorization::{hadamard_eval, poly_roots, HadamardData, ZeroMultiset};
use bargmann_retrieval::fock_core::{
    bargmann_quadrature, hermite_function, hermite_to_fock, ClosedFormFunction, FockPolynomial, HermiteExpansion,
};
use bargmann_retrieval::lattice_geometry::{
    canonical_progressions, check_lattice_conditions, enumerate, estimate_lower_density, ShiftedLattice,
};
use bargmann_retrieval::retrieval::{
    counterexample_pair, earl_bound_check, forward_sample, gabor_sample, phase_equivalent, reconstruct,
    reconstruct_from_gabor, sharpness_witness, verify_counterexample, GrowthScale,
};
use bargmann_retrieval::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn report(id: u32, pass: bool, seconds: f64, detail: String) -> bool {
    println!(
        "ACCEPTANCE {id} {} ({seconds:.2}s): {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}

fn unit_disc(rng: &mut ChaCha8Rng) -> Complex64 {
    loop {
        let z = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if z.norm() < 1.0 {
            return z;
        }
    }
}

fn min_root_separation(p: &FockPolynomial) -> f64 {
    if p.degree() < 2 {
        return f64::INFINITY;
    }
    let roots = poly_roots(p).unwrap();
    if roots.total_multiplicity() != roots.entries().len() {
        return 0.0;
    }
    let pts = roots.expanded();
    let mut best = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            best = best.min((pts[i] - pts[j]).norm());
        }
    }
    best
}

/// Random polynomials with coefficients in the unit disc, degree ≤ 8,
/// roots at least 0.05 apart.
fn random_polynomials(count: usize, seed: u64) -> Vec<FockPolynomial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let degree = rng.random_range(0..=8usize);
        let p = FockPolynomial::new((0..=degree).map(|_| unit_disc(&mut rng)).collect());
        if p.degree() == degree && min_root_separation(&p) >= 0.05 {
            out.push(p);
        }
    }
    out
}

fn criterion_1() -> bool {
    let start = Instant::now();
    let lattice = ShiftedLattice::square(1.0).unwrap();
    let set = canonical_progressions(&lattice, 22).unwrap();
    let mut failures = Vec::new();
    let mut worst_residual: f64 = 0.0;
    for (i, p) in random_polynomials(50, 0x5eed).iter().enumerate() {
        match reconstruct(&forward_sample(p, &set), &set, 8) {
            Ok(res) => {
                worst_residual = worst_residual.max(res.residual / p.max_coeff());
                if !phase_equivalent(&res.recovered, p, 1e-7).0 {
                    failures.push(format!("#{i} not phase-equivalent"));
                }
            }
            Err(e) => failures.push(format!("#{i} {e}")),
        }
    }
    let seconds = start.elapsed().as_secs_f64();
    report(
        1,
        failures.is_empty() && seconds < 30.0,
        seconds,
        format!("50 random polynomials, worst relative residual {worst_residual:.2e}, failures {failures:?}"),
    )
}

fn criterion_2() -> bool {
    let start = Instant::now();
    let signal = HermiteExpansion::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 2.0)]);
    let lattice = ShiftedLattice::square(0.9).unwrap();
    let set = canonical_progressions(&lattice, 12).unwrap();
    let samples = gabor_sample(&signal, &set);
    let truth = hermite_to_fock(&signal);
    let outcome = reconstruct_from_gabor(&samples, &set, 4);
    let seconds = start.elapsed().as_secs_f64();
    let (pass, detail) = match outcome {
        Ok(res) => {
            let (ok, tau) = phase_equivalent(&res.recovered, &truth, 1e-6);
            (
                ok && res.detected_degree == 3,
                format!("density {:.4}, degree {}, tau {tau:?}", lattice.exact_lower_density(), res.detected_degree),
            )
        }
        Err(e) => (false, e.to_string()),
    };
    report(2, pass && seconds < 5.0 && lattice.exact_lower_density() > 1.0, seconds, detail)
}

fn criterion_3() -> bool {
    let start = Instant::now();
    let pair = counterexample_pair(1.0).unwrap();
    let r = verify_counterexample(&pair, 1.0, 1000, 1e-12).unwrap();
    let seconds = start.elapsed().as_secs_f64();
    report(
        3,
        r.online_points == 1000 && r.online_max_gap <= 1e-12 && r.offline_min_sup > 0.1 && seconds < 1.0,
        seconds,
        format!("on-line gap {:.2e}, off-line min sup {:.4}", r.online_max_gap, r.offline_min_sup),
    )
}

fn criterion_4() -> bool {
    let start = Instant::now();
    let kappa = FRAC_PI_2;
    let lattice = ShiftedLattice::new(c(0.0, 0.0), c(0.0, 1.0), c(PI / (2.0 * kappa), 0.0)).unwrap();
    let conditions = check_lattice_conditions(&lattice, 0.0, kappa).unwrap();
    let r = sharpness_witness(&lattice, kappa, 1e-12).unwrap();
    let seconds = start.elapsed().as_secs_f64();
    let (pass, detail) = match &r.witness {
        Some(w) => (
            !conditions.spacing_ok && w.check.verdict && w.type_within_kappa,
            format!(
                "spacing_ok {}, witness type {:.6}, lattice points {}, gap {:.2e}, off-line {:.4}",
                conditions.spacing_ok, w.witness_type, w.check.online_points, w.check.online_max_gap, w.check.offline_min_sup
            ),
        ),
        None => (false, "no witness produced".into()),
    };
    report(4, pass && seconds < 1.0, seconds, detail)
}

fn criterion_5() -> bool {
    let start = Instant::now();
    let radii = [50.0, 100.0, 200.0];
    let mut detail = Vec::new();
    let mut pass = true;
    for (lattice, exact) in [
        (ShiftedLattice::square(1.0).unwrap(), 1.0),
        (ShiftedLattice::new(c(0.0, 0.0), c(2.0, 0.0), c(1.0, 1.0)).unwrap(), 0.5),
    ] {
        let points = enumerate(&lattice, 300.0).unwrap();
        let estimate = estimate_lower_density(&points, &radii, 0.5).unwrap();
        pass &= (estimate - exact).abs() <= 0.05 * exact;
        detail.push(format!("{estimate:.4} vs {exact}"));
    }
    let seconds = start.elapsed().as_secs_f64();
    report(5, pass && seconds < 10.0, seconds, detail.join(", "))
}

fn criterion_6() -> bool {
    let start = Instant::now();
    let mut worst_quadrature: f64 = 0.0;
    let grid = [-1.4, -0.7, 0.0, 0.7, 1.4];
    for n in 0..=4usize {
        let mut basis = vec![0.0; n + 1];
        basis[n] = 1.0;
        let e_n = hermite_to_fock(&HermiteExpansion::from_real(&basis));
        for &x in &grid {
            for &y in &grid {
                let z = c(x, y);
                let got = bargmann_quadrature(|t| c(hermite_function(n, t), 0.0), z).unwrap();
                worst_quadrature = worst_quadrature.max((got - e_n.eval(z)).norm());
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut violations = 0usize;
    let mut worst_ratio: f64 = 0.0;
    for _ in 0..20 {
        let degree = rng.random_range(0..=12usize);
        let raw: Vec<Complex64> = (0..=degree).map(|_| unit_disc(&mut rng)).collect();
        let norm = raw.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let p = hermite_to_fock(&HermiteExpansion::new(raw.iter().map(|v| v / norm).collect()));
        for _ in 0..10_000 {
            let z = c(rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0));
            let ratio = p.eval(z).norm() / (FRAC_PI_2 * z.norm_sqr()).exp();
            worst_ratio = worst_ratio.max(ratio);
            if ratio > 1.0 + 1e-12 {
                violations += 1;
            }
        }
    }
    let seconds = start.elapsed().as_secs_f64();
    report(
        6,
        worst_quadrature <= 1e-6 && violations == 0 && seconds < 10.0,
        seconds,
        format!("quadrature error {worst_quadrature:.2e}, growth ratio max {worst_ratio:.4}, violations {violations}"),
    )
}

fn criterion_7() -> bool {
    let start = Instant::now();
    let n = 10_000;
    let zeros: Vec<Complex64> = (1..=n).flat_map(|k| [c(k as f64, 0.0), c(-(k as f64), 0.0)]).collect();
    let data = HadamardData::new(1, vec![c(PI.ln(), 0.0)], &ZeroMultiset::from_points(&zeros).unwrap(), 1).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..=20 {
        for j in 0..=20 {
            let z = c(-2.0 + 0.2 * i as f64, -2.0 + 0.2 * j as f64);
            if z.norm() > 2.0 {
                continue;
            }
            let exact = (PI * z).sin();
            let got = hadamard_eval(&data, z, 2 * n, None).unwrap().value;
            worst = worst.max((got - exact).norm() / exact.norm().max(1.0));
        }
    }
    let seconds = start.elapsed().as_secs_f64();
    report(
        7,
        worst <= 1e-3 && seconds < 5.0,
        seconds,
        format!("max |Δ|/max(1,|sin πz|) = {worst:.2e} on |z| ≤ 2"),
    )
}

fn criterion_8() -> bool {
    let start = Instant::now();
    let lattice = ShiftedLattice::square(1.0).unwrap();
    let sine = earl_bound_check(&ClosedFormFunction::ScaledSine { scale: 1.0 }, &lattice, GrowthScale::Linear, 50.0)
        .unwrap();
    let poly = FockPolynomial::new(vec![c(0.3, -0.1), c(-0.7, 0.2), c(0.1, 0.9), c(0.5, 0.0), c(-0.2, 0.4), c(0.8, -0.3)]);
    let poly = earl_bound_check(&ClosedFormFunction::polynomial(poly), &lattice, GrowthScale::Log1p, 50.0).unwrap();
    let seconds = start.elapsed().as_secs_f64();
    let within = |v: f64| (v - 5.0).abs() <= 0.5;
    report(
        8,
        sine.kappa_global <= 1.15 * sine.kappa_lattice
            && within(poly.kappa_lattice)
            && within(poly.kappa_global)
            && seconds < 10.0,
        seconds,
        format!(
            "sine κ_Λ {:.4} κ_global {:.4}; degree-5 κ_Λ {:.4} κ_global {:.4}",
            sine.kappa_lattice, sine.kappa_global, poly.kappa_lattice, poly.kappa_global
        ),
    )
}

#[test]
fn acceptance() {
    let results = [
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, ok)| !**ok).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
