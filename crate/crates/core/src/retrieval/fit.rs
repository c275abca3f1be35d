//! Squared-modulus fitting on one progression and the zero pairs it yields.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::factorization::{multiset_match, poly_roots, ZeroMultiset};
use crate::fock_core::FockPolynomial;
use crate::linalg::lstsq;

/// Largest `q` accepted by [`interpolate_squared_modulus`].
pub const MAX_FIT_DEGREE: usize = 15;

/// Held-out residual tolerance, relative to the largest squared magnitude.
pub const HOLDOUT_RELATIVE: f64 = 1e-8;

/// Conjugate-closure tolerance for fitted roots, relative to `1 + |x|`.
pub const CLOSURE_RELATIVE: f64 = 1e-6;

/// Relative floor on the row weights `1 / value`; bounds the weight spread so
/// that nodes at exact zeros do not swamp the normwise-stable solve.
const WEIGHT_FLOOR: f64 = 1e-8;

/// Fit of `F₁(x) = |f(ρx)|²` on integer nodes `x = n`.
///
/// The fit is stored in the scaled variable `s = (x − center) / half_width`,
/// where the coefficients stay balanced; [`Self::poly`] expands it in `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct SquaredModulusFit {
    scaled: FockPolynomial,
    center: f64,
    half_width: f64,
    rho: f64,
    degree_bound: usize,
    /// Largest deviation at the held-out nodes.
    pub holdout_residual: f64,
    /// Acceptance threshold for `holdout_residual`.
    pub tolerance: f64,
    /// Largest squared magnitude.
    pub scale: f64,
    /// Smallest fitted value over the nodes.
    pub min_fitted: f64,
}

impl SquaredModulusFit {
    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `F₁` in the node variable `x`.
    pub fn poly(&self) -> FockPolynomial {
        let h = self.half_width;
        self.scaled
            .compose_affine(Complex64::new(1.0 / h, 0.0), Complex64::new(-self.center / h, 0.0))
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.scaled
            .eval(Complex64::new((x - self.center) / self.half_width, 0.0))
            .re
    }

    /// Leading coefficient of `F₁` in `x`; zero when the fit lost degree.
    pub fn leading(&self) -> f64 {
        let d = 2 * self.degree_bound;
        match self.scaled.coeffs().get(d) {
            Some(c) if self.scaled.degree() == d => c.re / self.half_width.powi(d as i32),
            _ => 0.0,
        }
    }

    /// Roots of `F₁` in `x`.
    pub fn roots(&self) -> Result<ZeroMultiset> {
        if self.degree_bound == 0 {
            return Ok(ZeroMultiset::empty());
        }
        if self.scaled.degree() != 2 * self.degree_bound {
            return Err(Error::DegreeMismatch {
                degree: self.degree_bound,
                residual: self.holdout_residual,
                tolerance: self.tolerance,
            });
        }
        let (c, h) = (self.center, self.half_width);
        Ok(poly_roots(&self.scaled)?.map(|s| s * h + c))
    }
}

/// Weighted least-squares fit of degree `2q` to `magnitude²` at the nodes.
///
/// Rows carry relative weights `1 / value`, so small values near zeros of `f`
/// are fitted as accurately as large ones. The extreme nodes are held out
/// for the degree test, then the final fit uses every node.
pub fn interpolate_squared_modulus(
    samples: &[(i64, f64)],
    rho: f64,
    q: usize,
) -> Result<SquaredModulusFit> {
    if q > MAX_FIT_DEGREE {
        return Err(Error::Conditioning {
            degree: q,
            limit: MAX_FIT_DEGREE,
        });
    }
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidInput(format!("spacing must be positive, got {rho}")));
    }
    if let Some(&(_, m)) = samples.iter().find(|(_, m)| !(*m >= 0.0 && m.is_finite())) {
        return Err(Error::InvalidInput(format!("magnitude {m} is not a nonnegative number")));
    }
    let needed = 2 * q + 2;
    if samples.len() < needed {
        return Err(Error::TooFewPoints {
            needed,
            got: samples.len(),
        });
    }
    let mut nodes: Vec<(f64, f64)> = samples.iter().map(|&(n, m)| (n as f64, m * m)).collect();
    nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
    if nodes.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::InvalidInput("repeated progression node".into()));
    }
    let scale = nodes.iter().map(|n| n.1).fold(0.0, f64::max);
    let tolerance = HOLDOUT_RELATIVE * scale;
    let (lo, hi) = (nodes[0].0, nodes[nodes.len() - 1].0);
    let center = 0.5 * (lo + hi);
    let half_width = (0.5 * (hi - lo)).max(0.5);

    let fit = |rows: &[(f64, f64)]| -> Result<FockPolynomial> {
        if scale == 0.0 {
            return Ok(FockPolynomial::constant(Complex64::new(0.0, 0.0)));
        }
        let cols = 2 * q + 1;
        let mut a = DMatrix::<f64>::zeros(rows.len(), cols);
        let mut b = DVector::<f64>::zeros(rows.len());
        for (r, &(x, v)) in rows.iter().enumerate() {
            let w = 1.0 / v.max(WEIGHT_FLOOR * scale);
            let s = (x - center) / half_width;
            let mut p = w;
            for k in 0..cols {
                a[(r, k)] = p;
                p *= s;
            }
            b[r] = v * w;
        }
        let coeffs = lstsq(a, b)?;
        Ok(FockPolynomial::from_real(coeffs.as_slice()))
    };
    let eval = |p: &FockPolynomial, x: f64| p.eval(Complex64::new((x - center) / half_width, 0.0)).re;

    let held_out = if nodes.len() > needed { 2 } else { 1 };
    let (train, test): (Vec<_>, Vec<_>) = if held_out == 2 {
        (nodes[1..nodes.len() - 1].to_vec(), vec![nodes[0], nodes[nodes.len() - 1]])
    } else {
        (nodes[..nodes.len() - 1].to_vec(), vec![nodes[nodes.len() - 1]])
    };
    let trial = fit(&train)?;
    let holdout_residual = test
        .iter()
        .map(|&(x, v)| (eval(&trial, x) - v).abs())
        .fold(0.0, f64::max);
    if !(holdout_residual <= tolerance) {
        return Err(Error::DegreeMismatch {
            degree: q,
            residual: holdout_residual,
            tolerance,
        });
    }
    let scaled = fit(&nodes)?;
    let min_fitted = nodes.iter().map(|&(x, _)| eval(&scaled, x)).fold(f64::INFINITY, f64::min);
    Ok(SquaredModulusFit {
        scaled,
        center,
        half_width,
        rho,
        degree_bound: q,
        holdout_residual,
        tolerance,
        scale,
        min_fitted,
    })
}

/// Roots of `F₁` scaled by `ρ`: zeros of `f` together with their conjugates,
/// in the frame where the progression lies on `ℝ`.
pub fn zero_pairs_from_line(fit: &SquaredModulusFit) -> Result<ZeroMultiset> {
    let rho = fit.rho();
    let roots = fit.roots()?.map(|x| x * rho);
    check_conjugate_closure(&roots)?;
    Ok(roots)
}

fn check_conjugate_closure(roots: &ZeroMultiset) -> Result<()> {
    let reach = roots.entries().iter().map(|z| z.z.norm()).fold(0.0, f64::max);
    let tol = CLOSURE_RELATIVE * (1.0 + reach);
    if multiset_match(roots, &roots.map(|w| w.conj()), tol).is_perfect() {
        Ok(())
    } else {
        Err(Error::ConjugateClosure)
    }
}
