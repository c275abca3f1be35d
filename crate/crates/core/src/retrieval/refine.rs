//! Gauss–Newton refinement of a polynomial against magnitude samples.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::Result;
use crate::fock_core::FockPolynomial;
use crate::linalg::lstsq;

const MAX_ITERATIONS: usize = 30;

/// Weight floor for `1 / y²`, relative to the largest `y²`.
const WEIGHT_FLOOR: f64 = 1e-16;

/// Multiplies by the unit scalar making the highest nonzero coefficient
/// real and positive.
pub fn canonical_phase(p: &FockPolynomial) -> FockPolynomial {
    let lead = p.leading();
    if lead.norm() == 0.0 {
        return p.clone();
    }
    let unit = lead.conj() / lead.norm();
    let mut coeffs: Vec<Complex64> = p.coeffs().iter().map(|c| c * unit).collect();
    let last = coeffs.len() - 1;
    coeffs[last] = Complex64::new(coeffs[last].norm(), 0.0);
    FockPolynomial::new(coeffs)
}

/// Minimises `Σ ((|p(z)|² − y²) / y²)²` over the coefficients of `p`, with
/// the leading coefficient kept real. The degree is fixed; the input must be
/// in canonical phase.
pub fn refine(p: &FockPolynomial, samples: &[(Complex64, f64)]) -> Result<FockPolynomial> {
    let q = p.degree();
    let top = samples.iter().map(|s| s.1 * s.1).fold(0.0, f64::max);
    if p.is_zero() || top == 0.0 || samples.len() < 2 * q + 1 {
        return Ok(p.clone());
    }
    let floor = WEIGHT_FLOOR * top;
    let weights: Vec<f64> = samples.iter().map(|s| 1.0 / (s.1 * s.1).max(floor)).collect();
    let cost = |coeffs: &[Complex64]| -> f64 {
        samples
            .iter()
            .zip(&weights)
            .map(|(&(z, y), w)| {
                let r = (horner(coeffs, z).norm_sqr() - y * y) * w;
                r * r
            })
            .sum()
    };

    let mut coeffs = p.coeffs().to_vec();
    let mut current = cost(&coeffs);
    let params = 2 * q + 1;
    for _ in 0..MAX_ITERATIONS {
        let mut jac = DMatrix::<f64>::zeros(samples.len(), params);
        let mut rhs = DVector::<f64>::zeros(samples.len());
        for (row, (&(z, y), w)) in samples.iter().zip(&weights).enumerate() {
            let f = horner(&coeffs, z);
            let fc = f.conj();
            let mut power = Complex64::new(1.0, 0.0);
            for k in 0..=q {
                let x = fc * power;
                // ∂|f|²/∂Re c_k = 2 Re(f̄ z^k), ∂|f|²/∂Im c_k = −2 Im(f̄ z^k)
                jac[(row, k)] = 2.0 * x.re * w;
                if k < q {
                    jac[(row, q + 1 + k)] = -2.0 * x.im * w;
                }
                power *= z;
            }
            rhs[row] = -(f.norm_sqr() - y * y) * w;
        }
        let step = lstsq(jac, rhs)?;
        let mut accepted = false;
        let mut factor = 1.0;
        for _ in 0..8 {
            let trial: Vec<Complex64> = (0..=q)
                .map(|k| {
                    let im = if k < q { step[q + 1 + k] } else { 0.0 };
                    coeffs[k] + Complex64::new(step[k], im) * factor
                })
                .collect();
            let c = cost(&trial);
            if c < current {
                coeffs = trial;
                current = c;
                accepted = true;
                break;
            }
            factor *= 0.5;
        }
        let size = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if !accepted || step.norm() * factor <= 1e-15 * size {
            break;
        }
    }
    Ok(FockPolynomial::new(coeffs))
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}
