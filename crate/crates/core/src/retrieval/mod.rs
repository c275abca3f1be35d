//! Reconstruction up to a global phase from magnitudes on two parallel
//! progressions, counterexamples to uniqueness, and growth diagnostics.

mod counterexample;
mod disambiguate;
mod fit;
mod growth;
mod refine;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factorization::ZeroMultiset;
use crate::fock_core::{gabor_magnitude, gabor_to_fock_magnitude, FockPolynomial, HermiteExpansion, TimeFreqPoint};
use crate::lattice_geometry::{Line, PointSet, RigidMotion, StructuredSet};

pub use counterexample::{
    counterexample_pair, offline_test_points, online_test_points, sharpness_witness, verify_counterexample,
    verify_functions, CounterexampleReport, SharpnessReport, SharpnessWitness, TAU_GRID, UNIQUENESS_GAP,
};
pub use disambiguate::{disambiguate_zeros, Disambiguation, MATCH_RELATIVE, MAX_AMBIGUOUS_PAIRS};
pub use fit::{interpolate_squared_modulus, zero_pairs_from_line, SquaredModulusFit, HOLDOUT_RELATIVE, MAX_FIT_DEGREE};
pub use growth::{earl_bound_check, growth_type_estimate, EarlReport, GrowthEstimate, GrowthScale, EARL_SLACK};
pub use refine::{canonical_phase, refine};

/// One magnitude measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MagnitudeSample {
    pub point: Complex64,
    pub magnitude: f64,
}

/// Magnitude measurements at pairwise distinct points.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnitudeSamples {
    records: Vec<MagnitudeSample>,
    frame: Option<RigidMotion>,
}

impl MagnitudeSamples {
    pub fn new(records: Vec<MagnitudeSample>, frame: Option<RigidMotion>) -> Result<Self> {
        if let Some(r) = records.iter().find(|r| !(r.magnitude >= 0.0 && r.magnitude.is_finite())) {
            return Err(Error::InvalidInput(format!(
                "magnitude {} at {} is not a nonnegative number",
                r.magnitude, r.point
            )));
        }
        // Validates finiteness and distinctness of the points.
        PointSet::new(records.iter().map(|r| r.point).collect())?;
        Ok(Self { records, frame })
    }

    pub fn records(&self) -> &[MagnitudeSample] {
        &self.records
    }

    pub fn frame(&self) -> Option<RigidMotion> {
        self.frame
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn max_magnitude(&self) -> f64 {
        self.records.iter().map(|r| r.magnitude).fold(0.0, f64::max)
    }

    /// Largest deviation `| |p(z)| − magnitude |` over every record.
    pub fn residual(&self, p: &FockPolynomial) -> f64 {
        self.records
            .iter()
            .map(|r| (p.eval(r.point).norm() - r.magnitude).abs())
            .fold(0.0, f64::max)
    }
}

/// A point configuration that can be sampled.
pub trait SamplingGeometry {
    fn sample_points(&self) -> Vec<Complex64>;

    /// Rigid motion from the normalized frame to raw coordinates, if any.
    fn frame(&self) -> Option<RigidMotion>;
}

impl SamplingGeometry for StructuredSet {
    fn sample_points(&self) -> Vec<Complex64> {
        self.points()
    }

    fn frame(&self) -> Option<RigidMotion> {
        Some(StructuredSet::frame(self))
    }
}

impl SamplingGeometry for PointSet {
    fn sample_points(&self) -> Vec<Complex64> {
        self.points().to_vec()
    }

    fn frame(&self) -> Option<RigidMotion> {
        None
    }
}

/// `|p(z)|` at every point of `set`.
pub fn forward_sample<S: SamplingGeometry + ?Sized>(p: &FockPolynomial, set: &S) -> MagnitudeSamples {
    MagnitudeSamples {
        records: set
            .sample_points()
            .into_iter()
            .map(|point| MagnitudeSample {
                point,
                magnitude: p.eval(point).norm(),
            })
            .collect(),
        frame: set.frame(),
    }
}

/// Gabor magnitudes of `h` at the points `x + iω` of a time-frequency set.
pub fn gabor_sample(h: &HermiteExpansion, set: &StructuredSet) -> Vec<(TimeFreqPoint, f64)> {
    set.points()
        .into_iter()
        .map(|z| {
            let pt = TimeFreqPoint::new(z.re, z.im);
            (pt, gabor_magnitude(h, pt))
        })
        .collect()
}

/// Reconstruction with its diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalResult {
    /// Canonical representative: highest nonzero coefficient real positive.
    pub recovered: FockPolynomial,
    /// `max | |recovered(z)| − magnitude |` over every supplied sample.
    pub residual: f64,
    pub ambiguity_flag: bool,
    pub detected_degree: usize,
    /// Rigid motion from the normalized frame to raw coordinates.
    pub frame: RigidMotion,
}

struct Progressions {
    line1: Vec<(i64, f64)>,
    line2: Vec<(i64, f64)>,
    /// All samples in the normalized frame.
    normalized: Vec<(Complex64, f64)>,
    anchor2: Complex64,
}

fn classify(samples: &MagnitudeSamples, set: &StructuredSet) -> Progressions {
    let frame = set.frame();
    let anchor2 = frame.invert(set.z2());
    let (rho1, rho2) = (set.rho1(), set.rho2());
    let mut line1 = Vec::new();
    let mut line2 = Vec::new();
    let mut normalized = Vec::with_capacity(samples.len());
    for r in samples.records() {
        let w = frame.invert(r.point);
        normalized.push((w, r.magnitude));
        let near = |d: Complex64| d.norm() <= 1e-9 * (1.0 + w.norm());
        let n1 = (w.re / rho1).round();
        if near(w - n1 * rho1) {
            line1.push((n1 as i64, r.magnitude));
            continue;
        }
        let n2 = ((w - anchor2).re / rho2).round();
        if near(w - anchor2 - n2 * rho2) {
            line2.push((n2 as i64, r.magnitude));
        }
    }
    Progressions {
        line1,
        line2,
        normalized,
        anchor2,
    }
}

/// Recovers a polynomial of degree at most `q_max` up to a global phase from
/// its magnitudes on the two progressions of `set` (extra samples are used
/// for disambiguation, refinement and the residual).
pub fn reconstruct(samples: &MagnitudeSamples, set: &StructuredSet, q_max: usize) -> Result<RetrievalResult> {
    if q_max > MAX_FIT_DEGREE {
        return Err(Error::Conditioning {
            degree: q_max,
            limit: MAX_FIT_DEGREE,
        });
    }
    let frame = set.frame();
    let prog = classify(samples, set);
    let needed = 2 * q_max + 2;
    for line in [&prog.line1, &prog.line2] {
        if line.len() < needed {
            return Err(Error::TooFewPoints {
                needed,
                got: line.len(),
            });
        }
    }
    if samples.max_magnitude() == 0.0 {
        return Ok(RetrievalResult {
            recovered: FockPolynomial::constant(Complex64::new(0.0, 0.0)),
            residual: 0.0,
            ambiguity_flag: false,
            detected_degree: 0,
            frame,
        });
    }

    let mut detected = None;
    for q in 0..=q_max {
        match interpolate_squared_modulus(&prog.line1, set.rho1(), q) {
            Ok(fit) => {
                detected = Some(fit);
                break;
            }
            Err(Error::DegreeMismatch { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    let fit1 = detected.ok_or(Error::DegreeOverflow { q_max })?;
    let q = fit1.degree_bound();
    let leading_abs = fit1.leading().abs().sqrt() / set.rho1().powi(q as i32);
    if !(leading_abs > 0.0) {
        return Err(Error::DegreeMismatch {
            degree: q,
            residual: fit1.holdout_residual,
            tolerance: fit1.tolerance,
        });
    }

    let (zeros, ambiguity_flag) = if q == 0 {
        (ZeroMultiset::empty(), false)
    } else {
        let s1 = zero_pairs_from_line(&fit1)?;
        let fit2 = interpolate_squared_modulus(&prog.line2, set.rho2(), q)?;
        let s2 = zero_pairs_from_line(&fit2)?.map(|x| x + prog.anchor2);
        let line2 = Line::new(prog.anchor2, 0.0);
        let d = disambiguate_zeros(&s1, &s2, &line2, &prog.normalized, q, leading_abs)?;
        (d.zeros, d.ambiguous)
    };

    let normalized = disambiguate::assemble(&zeros, leading_abs);
    // f(z) = f̃(e^{−iθ}(z − z₁))
    let back = frame.rotation().conj();
    let raw = canonical_phase(&normalized.compose_affine(back, -back * frame.translation));
    let raw_samples: Vec<(Complex64, f64)> = samples.records().iter().map(|r| (r.point, r.magnitude)).collect();
    let recovered = canonical_phase(&refine(&raw, &raw_samples)?);
    Ok(RetrievalResult {
        residual: samples.residual(&recovered),
        recovered,
        ambiguity_flag,
        detected_degree: q,
        frame,
    })
}

/// Reconstruction from Gabor magnitudes on a time-frequency structured set.
///
/// The Fock-side samples sit at `x − iω` with magnitudes rescaled by
/// `e^{π|z|²/2}`; the result is the Fock polynomial of the signal.
pub fn reconstruct_from_gabor(
    gabor: &[(TimeFreqPoint, f64)],
    set: &StructuredSet,
    q_max: usize,
) -> Result<RetrievalResult> {
    let records = gabor
        .iter()
        .map(|&(pt, g)| {
            let (point, magnitude) = gabor_to_fock_magnitude(pt, g);
            MagnitudeSample { point, magnitude }
        })
        .collect();
    let reflected = set.reflected()?;
    let samples = MagnitudeSamples::new(records, Some(reflected.frame()))?;
    reconstruct(&samples, &reflected, q_max)
}

/// Whether `a = τ b` for a unit scalar `τ`, judged relative to the largest
/// coefficient of `b`.
pub fn phase_equivalent(a: &FockPolynomial, b: &FockPolynomial, tol: f64) -> (bool, Option<Complex64>) {
    let one = Complex64::new(1.0, 0.0);
    if a.is_zero() && b.is_zero() {
        return (true, Some(one));
    }
    if a.degree() != b.degree() || a.is_zero() || b.is_zero() {
        return (false, None);
    }
    let (k, scale) = b
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| (k, c.norm()))
        .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
    let tau = a.coeffs()[k] / b.coeffs()[k];
    if (tau.norm() - 1.0).abs() > tol {
        return (false, None);
    }
    let ok = a
        .coeffs()
        .iter()
        .zip(b.coeffs())
        .all(|(x, y)| (x - tau * y).norm() <= tol * scale);
    if ok {
        (true, Some(tau))
    } else {
        (false, None)
    }
}
