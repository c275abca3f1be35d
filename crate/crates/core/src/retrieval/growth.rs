//! Finite-radius growth-type estimates and the Earl-type comparison between
//! growth along a lattice and growth in the whole plane.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock_core::ClosedFormFunction;
use crate::lattice_geometry::{enumerate, ShiftedLattice};

/// Relative slack of the finite-radius comparison `κ_global ≤ κ_Λ(1 + slack)`.
pub const EARL_SLACK: f64 = 0.15;

/// Angles sampled on the comparison circle.
const EARL_ANGLES: usize = 4096;

/// Lattice points closer to the origin than this are skipped.
const EARL_MIN_RADIUS: f64 = 2.0;

/// Growth scale `H(r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthScale {
    /// `H(r) = r`.
    Linear,
    /// `H(r) = log(1 + r)`.
    Log1p,
}

impl GrowthScale {
    pub fn eval(self, r: f64) -> f64 {
        match self {
            Self::Linear => r,
            Self::Log1p => r.ln_1p(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Linear => "r",
            Self::Log1p => "log(1+r)",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthEstimate {
    pub order_used: f64,
    /// Value at the largest radius.
    pub type_estimate: f64,
    /// `(r, max_θ log|f(re^{iθ})| / r^ρ)`.
    pub per_radius: Vec<(f64, f64)>,
    /// Whether the last three values are monotone.
    pub tail_monotone: bool,
}

fn circle_max(f: &ClosedFormFunction, r: f64, angles: usize) -> f64 {
    (0..angles)
        .map(|k| f.log_magnitude(Complex64::from_polar(r, 2.0 * PI * k as f64 / angles as f64)))
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn growth_type_estimate(
    f: &ClosedFormFunction,
    rho: f64,
    radii: &[f64],
    angle_count: usize,
) -> Result<GrowthEstimate> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidInput(format!("order must be positive, got {rho}")));
    }
    if radii.len() < 3 {
        return Err(Error::InvalidInput("at least three radii are required".into()));
    }
    if radii[0] <= 0.0 || radii.windows(2).any(|w| !(w[1] > w[0])) || !radii.iter().all(|r| r.is_finite()) {
        return Err(Error::InvalidInput("radii must be positive and strictly increasing".into()));
    }
    if angle_count < 360 {
        return Err(Error::InvalidInput(format!("angle count {angle_count} is below 360")));
    }
    let mut per_radius = Vec::with_capacity(radii.len());
    for &r in radii {
        let v = circle_max(f, r, angle_count) / r.powf(rho);
        if !v.is_finite() {
            return Err(Error::InvalidInput(format!("log-modulus is not finite on |z| = {r}")));
        }
        per_radius.push((r, v));
    }
    let tail: Vec<f64> = per_radius[per_radius.len() - 3..].iter().map(|p| p.1).collect();
    let tail_monotone = (tail[0] <= tail[1] && tail[1] <= tail[2]) || (tail[0] >= tail[1] && tail[1] >= tail[2]);
    Ok(GrowthEstimate {
        order_used: rho,
        type_estimate: per_radius[per_radius.len() - 1].1,
        per_radius,
        tail_monotone,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EarlReport {
    pub scale: GrowthScale,
    pub radius: f64,
    /// `max log|f(λ)| / H(|λ|)` over lattice points with `2 ≤ |λ| ≤ radius`.
    pub kappa_lattice: f64,
    /// `max log|f| / H(radius)` on the circle `|z| = radius`.
    pub kappa_global: f64,
    pub lattice_points_used: usize,
    pub slack: f64,
    pub bound_holds: bool,
    pub density: f64,
    pub required_density: f64,
}

pub fn earl_bound_check(
    f: &ClosedFormFunction,
    lattice: &ShiftedLattice,
    scale: GrowthScale,
    radius: f64,
) -> Result<EarlReport> {
    if !(radius > EARL_MIN_RADIUS && radius.is_finite()) {
        return Err(Error::InvalidInput(format!("radius must exceed {EARL_MIN_RADIUS}, got {radius}")));
    }
    let density = lattice.exact_lower_density();
    let required_density = 2.0 * f.quadratic_growth_floor() / PI;
    if density <= required_density {
        return Err(Error::DensityHypothesis {
            density,
            required: required_density,
        });
    }
    let mut kappa_lattice = f64::NEG_INFINITY;
    let mut used = 0;
    for &z in enumerate(lattice, radius)?.points() {
        let r = z.norm();
        if r < EARL_MIN_RADIUS {
            continue;
        }
        let v = f.log_magnitude(z);
        if v == f64::NEG_INFINITY {
            continue;
        }
        kappa_lattice = kappa_lattice.max(v / scale.eval(r));
        used += 1;
    }
    if used == 0 {
        return Err(Error::InsufficientCoverage("no usable lattice points inside the radius".into()));
    }
    let kappa_global = circle_max(f, radius, EARL_ANGLES) / scale.eval(radius);
    Ok(EarlReport {
        scale,
        radius,
        kappa_lattice,
        kappa_global,
        lattice_points_used: used,
        slack: EARL_SLACK,
        bound_holds: kappa_global <= kappa_lattice + EARL_SLACK * kappa_lattice.abs(),
        density,
        required_density,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorization::{roots_to_poly, ZeroMultiset};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit() -> ShiftedLattice {
        ShiftedLattice::square(1.0).unwrap()
    }

    #[test]
    fn scaled_sine_type() {
        let f = ClosedFormFunction::ScaledSine { scale: 2.0 };
        let est = growth_type_estimate(&f, 1.0, &[10.0, 20.0, 30.0, 40.0, 50.0], 720).unwrap();
        // log|sin 2z| = 2r − ln 2 + O(e^{−4r}) at z = ir
        let oracle = 2.0 - std::f64::consts::LN_2 / 50.0;
        assert!((1.8..=2.05).contains(&est.type_estimate));
        assert!((est.type_estimate - oracle).abs() < 1e-6);
        assert!(est.tail_monotone);
    }

    #[test]
    fn exp_quadratic_type() {
        let f = ClosedFormFunction::exp_quadratic(c(PI / 2.0, 0.0));
        let est = growth_type_estimate(&f, 2.0, &[5.0, 10.0, 20.0], 360).unwrap();
        assert!((est.type_estimate - PI / 2.0).abs() < 0.01 * PI / 2.0);
    }

    #[test]
    fn polynomial_type_decays() {
        let f = ClosedFormFunction::polynomial(crate::fock_core::FockPolynomial::from_real(&[1.0, 2.0, 3.0]));
        let est = growth_type_estimate(&f, 1.0, &[10.0, 100.0, 1000.0, 10000.0], 360).unwrap();
        let values: Vec<f64> = est.per_radius.iter().map(|p| p.1).collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]));
        assert!(est.type_estimate < 0.01);
    }

    #[test]
    fn rejects_bad_grids() {
        let f = ClosedFormFunction::ScaledSine { scale: 1.0 };
        assert!(growth_type_estimate(&f, 1.0, &[1.0, 2.0], 360).is_err());
        assert!(growth_type_estimate(&f, 1.0, &[1.0, 3.0, 2.0], 360).is_err());
        assert!(growth_type_estimate(&f, 1.0, &[1.0, 2.0, 3.0], 100).is_err());
    }

    #[test]
    fn earl_sine() {
        let r = earl_bound_check(&ClosedFormFunction::ScaledSine { scale: 1.0 }, &unit(), GrowthScale::Linear, 50.0)
            .unwrap();
        assert!((r.kappa_lattice - 1.0).abs() < 0.05, "{r:?}");
        assert!((r.kappa_global - 1.0).abs() < 0.05, "{r:?}");
        assert!(r.bound_holds);
    }

    #[test]
    fn earl_polynomial() {
        let zeros: Vec<Complex64> = (0..5).map(|k| c(0.3 * k as f64 - 0.6, 0.1 * k as f64)).collect();
        let p = roots_to_poly(&ZeroMultiset::from_points(&zeros).unwrap(), c(1.0, 0.0));
        let r = earl_bound_check(&ClosedFormFunction::polynomial(p), &unit(), GrowthScale::Log1p, 50.0).unwrap();
        assert!((r.kappa_lattice - 5.0).abs() < 0.5, "{r:?}");
        assert!((r.kappa_global - 5.0).abs() < 0.5, "{r:?}");
    }

    #[test]
    fn earl_density_hypothesis() {
        let f = ClosedFormFunction::exp_quadratic(c(PI, 0.0));
        let err = earl_bound_check(&f, &unit(), GrowthScale::Linear, 50.0).unwrap_err();
        assert_eq!(err.code(), "density-hypothesis");
    }
}
