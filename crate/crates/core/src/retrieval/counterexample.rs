//! Pairs of exponential-type functions whose moduli agree on `aℤ + iℝ` but
//! which differ by more than a global phase.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock_core::ClosedFormFunction;
use crate::lattice_geometry::{check_lattice_conditions, enumerate, ConditionReport, RigidMotion, ShiftedLattice};

/// Number of unit scalars tried when ruling out a global phase.
pub const TAU_GRID: usize = 360;

/// Off-line sup-difference above which no global phase is deemed to work.
pub const UNIQUENESS_GAP: f64 = 0.1;

/// On-line test points have `|Im z| ≤` this value.
const ONLINE_HEIGHT: f64 = 5.0;
const ONLINE_COLUMNS: i64 = 10;

/// `f_± = sin(π/4 ± πz/(2a))`, both of exponential type `π/(2a)`.
pub fn counterexample_pair(a: f64) -> Result<(ClosedFormFunction, ClosedFormFunction)> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidInput(format!("spacing must be positive, got {a}")));
    }
    let scale = FRAC_PI_2 / a;
    Ok((
        ClosedFormFunction::ShiftedSine { scale, offset: FRAC_PI_4 },
        ClosedFormFunction::ShiftedSine {
            scale: -scale,
            offset: FRAC_PI_4,
        },
    ))
}

/// `n_points` points `ak + iy`, `|k| ≤ 10`, `y` evenly spread over `[−5, 5]`.
pub fn online_test_points(a: f64, n_points: usize) -> Vec<Complex64> {
    let columns = (2 * ONLINE_COLUMNS + 1) as usize;
    let rows = n_points.div_ceil(columns).max(2);
    let mut out = Vec::with_capacity(rows * columns);
    for j in 0..rows {
        let y = -ONLINE_HEIGHT + 2.0 * ONLINE_HEIGHT * j as f64 / (rows - 1) as f64;
        for k in -ONLINE_COLUMNS..=ONLINE_COLUMNS {
            out.push(Complex64::new(a * k as f64, y));
        }
    }
    out.truncate(n_points);
    out
}

/// Midpoints `a(k + ½) + iy` between the vertical lines.
pub fn offline_test_points(a: f64) -> Vec<Complex64> {
    let mut out = Vec::new();
    for k in -3..=3 {
        for y in [-1.0, -0.5, 0.0, 0.5, 1.0] {
            out.push(Complex64::new(a * (k as f64 + 0.5), y));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub online_points: usize,
    pub offline_points: usize,
    /// `max | |f₊| − |f₋| |` over the on-line points.
    pub online_max_gap: f64,
    /// `min_τ max |f₊ − τ f₋|` over the off-line points.
    pub offline_min_sup: f64,
    pub best_tau: Complex64,
    pub online_ok: bool,
    pub offline_ok: bool,
    pub verdict: bool,
}

/// Modulus agreement on `online` within `tol`, and failure of every unit
/// scalar on a 360-point grid to relate the functions on `offline`.
pub fn verify_functions<F, G>(f: F, g: G, online: &[Complex64], offline: &[Complex64], tol: f64) -> CounterexampleReport
where
    F: Fn(Complex64) -> Complex64,
    G: Fn(Complex64) -> Complex64,
{
    let online_max_gap = online
        .iter()
        .map(|&z| (f(z).norm() - g(z).norm()).abs())
        .fold(0.0, f64::max);
    let values: Vec<(Complex64, Complex64)> = offline.iter().map(|&z| (f(z), g(z))).collect();
    let mut offline_min_sup = f64::INFINITY;
    let mut best_tau = Complex64::new(1.0, 0.0);
    for j in 0..TAU_GRID {
        let tau = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / TAU_GRID as f64);
        let sup = values.iter().map(|(a, b)| (a - tau * b).norm()).fold(0.0, f64::max);
        if sup < offline_min_sup {
            offline_min_sup = sup;
            best_tau = tau;
        }
    }
    let online_ok = online_max_gap <= tol;
    let offline_ok = offline_min_sup > UNIQUENESS_GAP;
    CounterexampleReport {
        online_points: online.len(),
        offline_points: offline.len(),
        online_max_gap,
        offline_min_sup,
        best_tau,
        online_ok,
        offline_ok,
        verdict: online_ok && offline_ok,
    }
}

pub fn verify_counterexample(
    pair: &(ClosedFormFunction, ClosedFormFunction),
    a: f64,
    n_points: usize,
    tol: f64,
) -> Result<CounterexampleReport> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidInput(format!("spacing must be positive, got {a}")));
    }
    let (f, g) = pair;
    Ok(verify_functions(
        |z| f.eval(z),
        |z| g.eval(z),
        &online_test_points(a, n_points),
        &offline_test_points(a),
        tol,
    ))
}

/// A counterexample transported onto a lattice whose spacing or line
/// distance violates the `π/(2κ)` bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpnessWitness {
    /// Which condition failed: `"spacing"` or `"distance"`.
    pub violated: &'static str,
    /// Distance `a` between the parallel lattice lines carrying the points.
    pub line_spacing: f64,
    /// Maps the counterexample frame (lines `aℤ + iℝ`) to raw coordinates.
    pub motion: RigidMotion,
    /// Exponential type `π/(2a)` of the pair.
    pub witness_type: f64,
    pub type_within_kappa: bool,
    /// Largest `|Re u − a·round(Re u/a)|` over the transported lattice points.
    pub max_line_offset: f64,
    pub check: CounterexampleReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpnessReport {
    pub conditions: ConditionReport,
    pub witness: Option<SharpnessWitness>,
}

/// Radius of the lattice window used for the on-line check.
const WITNESS_RADIUS: f64 = 12.0;

/// Checks the conditions for `kappa` and, when the spacing or distance test
/// fails, exhibits a pair agreeing in modulus on every lattice point.
pub fn sharpness_witness(lattice: &ShiftedLattice, kappa: f64, tol: f64) -> Result<SharpnessReport> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidInput(format!("kappa must be positive, got {kappa}")));
    }
    let conditions = check_lattice_conditions(lattice, 0.0, kappa)?;
    let (violated, v) = if !conditions.spacing_ok {
        ("spacing", lattice.omega1())
    } else if !conditions.distance_ok {
        ("distance", lattice.omega2())
    } else {
        return Ok(SharpnessReport {
            conditions,
            witness: None,
        });
    };
    // Lines parallel to v become vertical lines aℤ + iℝ under u = e^{−iφ}(z − z0).
    let a = lattice.covolume() / v.norm();
    let motion = RigidMotion::new((Complex64::new(0.0, -1.0) * v).arg(), lattice.z0());
    let online: Vec<Complex64> = enumerate(lattice, WITNESS_RADIUS)?
        .points()
        .iter()
        .map(|&z| motion.invert(z))
        .filter(|u| u.im.abs() <= ONLINE_HEIGHT)
        .collect();
    let max_line_offset = online
        .iter()
        .map(|u| (u.re - a * (u.re / a).round()).abs())
        .fold(0.0, f64::max);
    let (f, g) = counterexample_pair(a)?;
    let check = verify_functions(|z| f.eval(z), |z| g.eval(z), &online, &offline_test_points(a), tol);
    let witness_type = FRAC_PI_2 / a;
    Ok(SharpnessReport {
        conditions,
        witness: Some(SharpnessWitness {
            violated,
            line_spacing: a,
            motion,
            witness_type,
            type_within_kappa: witness_type <= kappa * (1.0 + 1e-12),
            max_line_offset,
            check,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pair_values() {
        let (p, m) = counterexample_pair(1.0).unwrap();
        assert!((p.eval(c(0.0, 0.0)).re - SQRT_2 / 2.0).abs() < 1e-15);
        assert!((m.eval(c(0.0, 0.0)).re - SQRT_2 / 2.0).abs() < 1e-15);
        assert!((p.eval(c(1.0, 0.0)).re - SQRT_2 / 2.0).abs() < 1e-15);
        assert!((m.eval(c(1.0, 0.0)).re + SQRT_2 / 2.0).abs() < 1e-15);
        assert!((p.magnitude(c(0.5, 0.0)) - 1.0).abs() < 1e-15);
        assert!(m.magnitude(c(0.5, 0.0)) < 1e-15);
        assert_eq!(p.exponential_type(), Some(FRAC_PI_2));
        assert!(counterexample_pair(0.0).is_err());
    }

    #[test]
    fn unit_pair_verifies() {
        let pair = counterexample_pair(1.0).unwrap();
        let r = verify_counterexample(&pair, 1.0, 1000, 1e-12).unwrap();
        assert_eq!(r.online_points, 1000);
        assert!(r.online_max_gap < 1e-12);
        assert!(r.offline_min_sup >= 1.0 - 1e-12);
        assert!(r.verdict);
    }

    #[test]
    fn common_phase_leaves_verdicts() {
        let (p, m) = counterexample_pair(0.8).unwrap();
        // |f| reaches ~10⁴ at |y| = 5, so rounding alone is ~10⁻¹²
        let base = verify_counterexample(&(p.clone(), m.clone()), 0.8, 400, 1e-10).unwrap();
        let rot = Complex64::from_polar(1.0, 1.234);
        let rotated = verify_functions(
            |z| rot * p.eval(z),
            |z| rot * m.eval(z),
            &online_test_points(0.8, 400),
            &offline_test_points(0.8),
            1e-10,
        );
        assert_eq!(base.verdict, rotated.verdict);
        assert!((base.offline_min_sup - rotated.offline_min_sup).abs() < 1e-12);
    }

    #[test]
    fn unit_lattice_sharpness() {
        let lattice = ShiftedLattice::new(c(0.0, 0.0), c(0.0, 1.0), c(1.0, 0.0)).unwrap();
        let r = sharpness_witness(&lattice, FRAC_PI_2, 1e-12).unwrap();
        assert!(!r.conditions.spacing_ok);
        let w = r.witness.unwrap();
        assert_eq!(w.violated, "spacing");
        assert!((w.line_spacing - 1.0).abs() < 1e-15);
        assert!(w.type_within_kappa);
        assert!(w.max_line_offset < 1e-12);
        assert!(w.check.verdict, "{:?}", w.check);
    }

    #[test]
    fn rotated_lattice_sharpness() {
        let rot = Complex64::from_polar(1.0, 0.4);
        let lattice = ShiftedLattice::new(c(0.3, -0.2), rot * c(0.2, 1.1), rot * c(1.0, 0.0)).unwrap();
        let r = sharpness_witness(&lattice, FRAC_PI_2, 1e-10).unwrap();
        let w = r.witness.unwrap();
        assert!(w.max_line_offset < 1e-12);
        assert!(w.check.verdict, "{:?}", w.check);
    }

    #[test]
    fn dense_lattice_has_no_witness() {
        let lattice = ShiftedLattice::square(0.5).unwrap();
        let r = sharpness_witness(&lattice, 1.0, 1e-12).unwrap();
        assert!(r.conditions.spacing_ok && r.conditions.distance_ok);
        assert!(r.witness.is_none());
    }
}
