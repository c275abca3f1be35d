//! Signals on both sides of the Bargmann transform.
//!
//! A finite Hermite expansion `Σ λ_n h_n` on the time side corresponds to the
//! polynomial `Σ λ_n e_n` on the Fock side, where `e_n(z) = (πⁿ/n!)^{1/2} zⁿ`
//! is the monomial orthonormal basis of the Fock space. The Gabor magnitude
//! at `(x, ω)` is the Fock magnitude at the reflected point `x − iω`, damped
//! by `exp(−π(x² + ω²)/2)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative threshold below which trailing coefficients are dropped.
pub const TRIM_RELATIVE: f64 = 1e-13;

/// Largest `|z|` accepted by [`bargmann_quadrature`].
pub const QUADRATURE_WINDOW: f64 = 10.0;

const QUADRATURE_NODES: usize = 200;
const QUADRATURE_SUPPORT: f64 = 8.0;

fn trim(mut coeffs: Vec<Complex64>) -> Vec<Complex64> {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    while coeffs.len() > 1 {
        let last = coeffs[coeffs.len() - 1].norm();
        if last <= TRIM_RELATIVE * scale {
            coeffs.pop();
        } else {
            break;
        }
    }
    if coeffs.is_empty() || scale == 0.0 {
        return vec![Complex64::new(0.0, 0.0)];
    }
    coeffs
}

/// `(πⁿ/n!)^{1/2}` for `n = 0..len`.
fn monomial_norms(len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut s = 1.0;
    for n in 0..len {
        if n > 0 {
            s *= (PI / n as f64).sqrt();
        }
        out.push(s);
    }
    out
}

/// Finite expansion `Σ λ_n h_n` in the Hermite basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermiteExpansion {
    coeffs: Vec<Complex64>,
}

impl HermiteExpansion {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self {
            coeffs: trim(coeffs),
        }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == Complex64::new(0.0, 0.0))
    }

    /// L² norm of the signal, which equals the Euclidean norm of the coefficients.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn to_fock(&self) -> FockPolynomial {
        hermite_to_fock(self)
    }

    /// Time-domain value `Σ λ_n h_n(t)`.
    pub fn eval_time(&self, t: f64) -> Complex64 {
        let values = hermite_functions(self.degree(), t);
        self.coeffs
            .iter()
            .zip(values)
            .map(|(c, h)| c * h)
            .sum()
    }
}

/// Polynomial `Σ c_n zⁿ` in the monomial basis of the Fock space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockPolynomial {
    coeffs: Vec<Complex64>,
}

impl FockPolynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self {
            coeffs: trim(coeffs),
        }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == Complex64::new(0.0, 0.0))
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs[self.coeffs.len() - 1]
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let mut p = zero;
        let mut dp = zero;
        for c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `Σ |c_n| |z|ⁿ`, the rounding-error scale of [`Self::eval`].
    pub fn eval_abs_bound(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    /// `log |p(z)|` without overflow for large `|z|`.
    pub fn log_abs(&self, z: Complex64) -> f64 {
        let r = z.norm();
        if r <= 1.0 || self.degree() == 0 {
            return self.eval(z).norm().ln();
        }
        let u = z.inv();
        let tail: Complex64 = self
            .coeffs
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * u + c);
        self.degree() as f64 * r.ln() + tail.norm().ln()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Coefficients of `z ↦ p(αz + β)`.
    pub fn compose_affine(&self, alpha: Complex64, beta: Complex64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let mut acc = vec![zero; self.coeffs.len()];
        for (len, c) in self.coeffs.iter().rev().enumerate() {
            // acc ← acc·(αz + β) + c
            let mut next = vec![zero; self.coeffs.len()];
            for k in 0..len {
                next[k] += acc[k] * beta;
                next[k + 1] += acc[k] * alpha;
            }
            next[0] += c;
            acc = next;
        }
        Self::new(acc)
    }

    pub fn to_hermite(&self) -> HermiteExpansion {
        fock_to_hermite(self)
    }
}

/// `c_n = λ_n (πⁿ/n!)^{1/2}`.
pub fn hermite_to_fock(h: &HermiteExpansion) -> FockPolynomial {
    let norms = monomial_norms(h.coeffs.len());
    FockPolynomial {
        coeffs: h.coeffs.iter().zip(norms).map(|(c, s)| c * s).collect(),
    }
}

pub fn fock_to_hermite(p: &FockPolynomial) -> HermiteExpansion {
    let norms = monomial_norms(p.coeffs.len());
    HermiteExpansion {
        coeffs: p.coeffs.iter().zip(norms).map(|(c, s)| c / s).collect(),
    }
}

pub fn eval_poly(p: &FockPolynomial, z: Complex64) -> Complex64 {
    p.eval(z)
}

/// A point `(x, ω)` of the time-frequency plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeFreqPoint {
    pub x: f64,
    pub omega: f64,
}

impl TimeFreqPoint {
    pub fn new(x: f64, omega: f64) -> Self {
        Self { x, omega }
    }

    /// The point `x − iω` at which the Bargmann transform is evaluated.
    pub fn reflected(&self) -> Complex64 {
        Complex64::new(self.x, -self.omega)
    }
}

/// `|𝒢f(x, ω)| = |𝓑f(x − iω)| · exp(−π(x² + ω²)/2)`.
pub fn gabor_magnitude(h: &HermiteExpansion, pt: TimeFreqPoint) -> f64 {
    let p = hermite_to_fock(h);
    p.eval(pt.reflected()).norm() * (-0.5 * PI * (pt.x * pt.x + pt.omega * pt.omega)).exp()
}

/// Converts a Gabor magnitude at `(x, ω)` into the Fock magnitude at `x − iω`.
pub fn gabor_to_fock_magnitude(pt: TimeFreqPoint, gabor: f64) -> (Complex64, f64) {
    let r2 = pt.x * pt.x + pt.omega * pt.omega;
    let mag = if gabor > 0.0 {
        (gabor.ln() + 0.5 * PI * r2).exp()
    } else {
        0.0
    };
    (pt.reflected(), mag)
}

/// Values `h_0(t), …, h_n(t)` of the Hermite functions normalised so that
/// `𝓑h_k = e_k`.
///
/// Uses the orthonormal three-term recurrence in `s = √(2π)·t`.
pub fn hermite_functions(n: usize, t: f64) -> Vec<f64> {
    let s = (2.0 * PI).sqrt() * t;
    let scale = (2.0 * PI).powf(0.25);
    let mut out = Vec::with_capacity(n + 1);
    let phi0 = PI.powf(-0.25) * (-0.5 * s * s).exp();
    out.push(scale * phi0);
    if n == 0 {
        return out;
    }
    let mut prev = phi0;
    let mut cur = 2f64.sqrt() * s * phi0;
    out.push(scale * cur);
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * s * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        out.push(scale * cur);
    }
    out
}

pub fn hermite_function(n: usize, t: f64) -> f64 {
    hermite_functions(n, t)[n]
}

/// Numerical Bargmann transform `2^{1/4} ∫ f(t) e^{2πtz − πt² − (π/2)z²} dt`.
///
/// Trapezoidal rule with 200 nodes on `|t| ≤ 8`; exponentially accurate for
/// Gaussian-decaying analytic integrands. Intended as a test oracle.
pub fn bargmann_quadrature<F>(f_time: F, z: Complex64) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let modulus = z.norm();
    if !(modulus <= QUADRATURE_WINDOW) {
        return Err(Error::OutsideQuadratureWindow {
            modulus,
            limit: QUADRATURE_WINDOW,
        });
    }
    let h = 2.0 * QUADRATURE_SUPPORT / (QUADRATURE_NODES - 1) as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..QUADRATURE_NODES {
        let t = -QUADRATURE_SUPPORT + h * j as f64;
        let w = if j == 0 || j == QUADRATURE_NODES - 1 {
            0.5
        } else {
            1.0
        };
        let exponent = 2.0 * PI * t * z - PI * t * t - 0.5 * PI * z * z;
        acc += f_time(t) * exponent.exp() * w;
    }
    Ok(acc * h * 2f64.powf(0.25))
}

/// Entire functions with closed forms, used for counterexamples and growth
/// diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClosedFormFunction {
    Polynomial { poly: FockPolynomial },
    /// `z ↦ sin(offset + scale·z)`.
    ShiftedSine { scale: f64, offset: f64 },
    /// `z ↦ sin(scale·z)`.
    ScaledSine { scale: f64 },
    /// `z ↦ exp(a2·z² + a1·z + a0)`.
    ExpQuadratic {
        a2: Complex64,
        a1: Complex64,
        a0: Complex64,
    },
}

/// `log |sin(w)|`, using the asymptotic form once `|Im w| > 20`.
fn log_abs_sin(w: Complex64) -> f64 {
    let y = w.im.abs();
    if y > 20.0 {
        let correction = -2.0 * (2.0 * w.re).cos() * (-2.0 * y).exp() + (-4.0 * y).exp();
        y - std::f64::consts::LN_2 + 0.5 * correction.ln_1p()
    } else {
        let s = w.re.sin();
        let sh = w.im.sinh();
        0.5 * (s * s + sh * sh).ln()
    }
}

fn abs_sin(w: Complex64) -> f64 {
    let s = w.re.sin();
    let sh = w.im.sinh();
    (s * s + sh * sh).sqrt()
}

impl ClosedFormFunction {
    pub fn polynomial(poly: FockPolynomial) -> Self {
        Self::Polynomial { poly }
    }

    pub fn exp_quadratic(a2: Complex64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self::ExpQuadratic { a2, a1: zero, a0: zero }
    }

    fn sine_argument(&self, z: Complex64) -> Option<Complex64> {
        match *self {
            Self::ShiftedSine { scale, offset } => Some(offset + scale * z),
            Self::ScaledSine { scale } => Some(scale * z),
            _ => None,
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            Self::Polynomial { poly } => poly.eval(z),
            Self::ShiftedSine { .. } | Self::ScaledSine { .. } => {
                self.sine_argument(z).map(|w| w.sin()).unwrap_or_default()
            }
            Self::ExpQuadratic { a2, a1, a0 } => (a2 * z * z + a1 * z + a0).exp(),
        }
    }

    /// `|f(z)|`; sines use `(sin²(Re w) + sinh²(Im w))^{1/2}`.
    pub fn magnitude(&self, z: Complex64) -> f64 {
        match self.sine_argument(z) {
            Some(w) => abs_sin(w),
            None => self.eval(z).norm(),
        }
    }

    /// `log |f(z)|`, `-∞` at exact zeros.
    pub fn log_magnitude(&self, z: Complex64) -> f64 {
        match self {
            Self::Polynomial { poly } => poly.log_abs(z),
            Self::ExpQuadratic { a2, a1, a0 } => (a2 * z * z + a1 * z + a0).re,
            _ => log_abs_sin(self.sine_argument(z).unwrap_or_default()),
        }
    }

    /// `liminf log max_{|z|=r} |f| / r²`, known analytically per variant.
    pub fn quadratic_growth_floor(&self) -> f64 {
        match self {
            Self::ExpQuadratic { a2, .. } => a2.norm(),
            _ => 0.0,
        }
    }

    /// Exponential type; `None` when the function has order two.
    pub fn exponential_type(&self) -> Option<f64> {
        match self {
            Self::Polynomial { .. } => Some(0.0),
            Self::ShiftedSine { scale, .. } | Self::ScaledSine { scale } => Some(scale.abs()),
            Self::ExpQuadratic { a2, a1, .. } => {
                if a2.norm() == 0.0 {
                    Some(a1.norm())
                } else {
                    None
                }
            }
        }
    }
}

pub fn eval_log_magnitude(f: &ClosedFormFunction, z: Complex64) -> f64 {
    f.log_magnitude(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hermite_to_fock_basis_constants() {
        let p = hermite_to_fock(&HermiteExpansion::from_real(&[1.0]));
        assert_eq!(p.coeffs(), &[c(1.0, 0.0)]);
        let p = hermite_to_fock(&HermiteExpansion::from_real(&[0.0, 1.0]));
        assert!((p.coeffs()[1].re - PI.sqrt()).abs() < 1e-15);
        let p = hermite_to_fock(&HermiteExpansion::from_real(&[0.0, 0.0, 1.0]));
        assert!((p.coeffs()[2].re - PI / 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(p.degree(), 2);
    }

    #[test]
    fn fock_to_hermite_inverts() {
        let h = fock_to_hermite(&FockPolynomial::new(vec![c(0.0, 0.0), c(PI.sqrt(), 0.0)]));
        assert!((h.coeffs()[1] - c(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(fock_to_hermite(&FockPolynomial::from_real(&[1.0])).coeffs(), &[c(1.0, 0.0)]);
    }

    #[test]
    fn trimming_drops_negligible_tail() {
        let p = FockPolynomial::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(1e-14, 0.0)]);
        assert_eq!(p.degree(), 1);
        let z = FockPolynomial::new(vec![c(0.0, 0.0); 4]);
        assert!(z.is_zero());
        assert_eq!(z.degree(), 0);
    }

    #[test]
    fn horner_examples() {
        let p = FockPolynomial::from_real(&[0.0, 0.0, 1.0]);
        assert_eq!(eval_poly(&p, c(2.0, 1.0)), c(3.0, 4.0));
        let one = FockPolynomial::from_real(&[1.0]);
        assert_eq!(eval_poly(&one, c(-7.0, 3.5)), c(1.0, 0.0));
    }

    #[test]
    fn compose_affine_matches_pointwise() {
        let p = FockPolynomial::new(vec![c(1.0, 2.0), c(-0.5, 0.3), c(0.0, 1.0), c(2.0, -1.0)]);
        let (a, b) = (c(0.6, 0.8), c(-1.0, 2.5));
        let q = p.compose_affine(a, b);
        for z in [c(0.3, -0.2), c(2.0, 1.0), c(-1.5, 0.7)] {
            assert!((q.eval(z) - p.eval(a * z + b)).norm() < 1e-12 * p.eval(a * z + b).norm().max(1.0));
        }
    }

    #[test]
    fn gabor_magnitude_of_gaussian() {
        let h0 = HermiteExpansion::from_real(&[1.0]);
        assert!((gabor_magnitude(&h0, TimeFreqPoint::new(0.0, 0.0)) - 1.0).abs() < 1e-15);
        let v = gabor_magnitude(&h0, TimeFreqPoint::new(1.0, 0.0));
        assert!((v - 0.207_879_576_350_761_9).abs() < 1e-12);
    }

    #[test]
    fn gabor_to_fock_inverts_damping() {
        let h = HermiteExpansion::new(vec![c(0.3, 0.1), c(0.0, 0.0), c(-1.0, 0.5)]);
        let pt = TimeFreqPoint::new(1.2, -2.3);
        let (z, mag) = gabor_to_fock_magnitude(pt, gabor_magnitude(&h, pt));
        assert_eq!(z, c(1.2, 2.3));
        let direct = h.to_fock().eval(z).norm();
        assert!((mag - direct).abs() < 1e-12 * direct);
    }

    #[test]
    fn hermite_functions_are_orthonormal() {
        // Riemann sum on a fine grid; the integrands decay like e^{-2πt²}.
        let dt = 1e-3;
        let n = 6;
        let mut gram = vec![vec![0.0; n + 1]; n + 1];
        let mut t = -8.0;
        while t <= 8.0 {
            let v = hermite_functions(n, t);
            for i in 0..=n {
                for j in 0..=n {
                    gram[i][j] += v[i] * v[j] * dt;
                }
            }
            t += dt;
        }
        for i in 0..=n {
            for j in 0..=n {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((gram[i][j] - expected).abs() < 1e-9, "{i} {j} {}", gram[i][j]);
            }
        }
    }

    #[test]
    fn quadrature_reproduces_monomial_basis() {
        // Validates the normalisation of the time-domain Hermite functions:
        // 𝓑h_n / e_n must be 1.
        for n in 0..=6 {
            let norm = monomial_norms(n + 1)[n];
            for z in [c(1.0, 0.0), c(0.0, 1.0), c(1.0, 1.0), c(-1.5, 0.5), c(0.3, -1.8)] {
                let b = bargmann_quadrature(|t| c(hermite_function(n, t), 0.0), z).unwrap();
                let e = norm * z.powu(n as u32);
                assert!((b - e).norm() < 1e-8 * e.norm().max(1.0), "n={n} z={z} {b} {e}");
            }
        }
    }

    #[test]
    fn quadrature_of_gaussian() {
        let h0 = |t: f64| c(2f64.powf(0.25) * (-PI * t * t).exp(), 0.0);
        assert!((bargmann_quadrature(h0, c(0.0, 0.0)).unwrap() - 1.0).norm() < 1e-8);
        assert!((bargmann_quadrature(h0, c(1.0, 1.0)).unwrap() - 1.0).norm() < 1e-8);
    }

    #[test]
    fn quadrature_rejects_outside_window() {
        let err = bargmann_quadrature(|_| c(0.0, 0.0), c(10.5, 0.0)).unwrap_err();
        assert_eq!(err.code(), "domain");
    }

    #[test]
    fn log_magnitude_examples() {
        let eq = ClosedFormFunction::exp_quadratic(c(1.0, 0.0));
        assert_eq!(eval_log_magnitude(&eq, c(0.0, 10.0)), -100.0);

        let s = ClosedFormFunction::ScaledSine { scale: PI };
        let y = 40.0;
        let expected = (PI * y).sinh().ln();
        assert!((eval_log_magnitude(&s, c(0.0, y)) - expected).abs() < 1e-10);
        assert!((eval_log_magnitude(&s, c(0.0, y)) - (PI * y - 2f64.ln())).abs() < 1e-10);

        let p = ClosedFormFunction::polynomial(FockPolynomial::new(vec![c(0.0, 0.0), c(3.0, 4.0)]));
        let v = eval_log_magnitude(&p, c(1e8, 0.0));
        assert!((v - (1e8f64.ln() + 5f64.ln())).abs() < 1e-12);

        assert_eq!(eval_log_magnitude(&s, c(0.0, 0.0)), f64::NEG_INFINITY);
    }

    #[test]
    fn log_magnitude_matches_direct_evaluation() {
        let funcs = [
            ClosedFormFunction::ShiftedSine { scale: 1.3, offset: 0.4 },
            ClosedFormFunction::ScaledSine { scale: -0.7 },
            ClosedFormFunction::ExpQuadratic { a2: c(0.2, 0.1), a1: c(-0.5, 1.0), a0: c(0.3, 0.0) },
            ClosedFormFunction::polynomial(FockPolynomial::new(vec![c(1.0, -1.0), c(0.0, 2.0), c(0.5, 0.5)])),
        ];
        for f in &funcs {
            for k in 0..400 {
                let a = k as f64 * 0.37;
                let r = 30.0 * ((k * 7919) % 400) as f64 / 400.0;
                let z = Complex64::from_polar(r, a);
                let direct = f.eval(z).norm();
                if direct > 1e-300 && direct < 1e300 {
                    let lm = f.log_magnitude(z);
                    assert!((lm - direct.ln()).abs() < 1e-10 * direct.ln().abs().max(1.0), "{f:?} {z}");
                }
            }
        }
    }

    #[test]
    fn growth_floors() {
        assert_eq!(ClosedFormFunction::exp_quadratic(c(0.0, PI)).quadratic_growth_floor(), PI);
        assert_eq!(ClosedFormFunction::ScaledSine { scale: 2.0 }.quadratic_growth_floor(), 0.0);
        assert_eq!(ClosedFormFunction::ScaledSine { scale: -2.0 }.exponential_type(), Some(2.0));
    }
}
