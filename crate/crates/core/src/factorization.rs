//! Zero multisets and numerical factorisation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock_core::FockPolynomial;
use crate::lattice_geometry::Line;

/// Roots closer than `CLUSTER_RELATIVE · (1 + |z|)` are one root.
pub const CLUSTER_RELATIVE: f64 = 1e-7;

/// Sweep cap of the simultaneous root iteration.
pub const MAX_SWEEPS: usize = 500;

/// A zero location with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Zero {
    pub z: Complex64,
    pub m: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct ZeroMultisetRepr {
    zeros: Vec<Zero>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "ZeroMultisetRepr")]
pub struct ZeroMultiset {
    zeros: Vec<Zero>,
}

impl TryFrom<ZeroMultisetRepr> for ZeroMultiset {
    type Error = Error;

    fn try_from(r: ZeroMultisetRepr) -> Result<Self> {
        ZeroMultiset::new(r.zeros)
    }
}

fn clustered(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= CLUSTER_RELATIVE * (1.0 + a.norm().max(b.norm()))
}

impl ZeroMultiset {
    /// Validates the entries and merges locations within the clustering
    /// tolerance; merged locations are multiplicity-weighted means.
    pub fn new(zeros: Vec<Zero>) -> Result<Self> {
        for z in &zeros {
            if z.m == 0 {
                return Err(Error::InvalidInput("multiplicities must be at least 1".into()));
            }
            if !(z.z.re.is_finite() && z.z.im.is_finite()) {
                return Err(Error::InvalidInput(format!("non-finite zero {}", z.z)));
            }
        }
        if zeros.iter().map(|z| z.m as u64).sum::<u64>() > u32::MAX as u64 {
            return Err(Error::InvalidInput("total multiplicity overflows".into()));
        }
        Ok(Self::merged(zeros))
    }

    pub fn empty() -> Self {
        Self { zeros: Vec::new() }
    }

    /// Simple zeros at the given locations.
    pub fn from_points(points: &[Complex64]) -> Result<Self> {
        Self::new(points.iter().map(|&z| Zero { z, m: 1 }).collect())
    }

    fn merged(zeros: Vec<Zero>) -> Self {
        let n = zeros.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        let reach = CLUSTER_RELATIVE * (1.0 + zeros.iter().map(|z| z.z.norm()).fold(0.0, f64::max));
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| zeros[i].z.re.total_cmp(&zeros[j].z.re));
        for (pos, &i) in order.iter().enumerate() {
            for &j in &order[pos + 1..] {
                if zeros[j].z.re - zeros[i].z.re > reach {
                    break;
                }
                if clustered(zeros[i].z, zeros[j].z) {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[b.max(a)] = a.min(b);
                    }
                }
            }
        }
        // (weighted sum, multiplicity, member count, first member)
        let mut out: Vec<(Complex64, u32, usize, usize)> = Vec::new();
        let mut slot = vec![usize::MAX; n];
        for i in 0..n {
            let root = find(&mut parent, i);
            if slot[root] == usize::MAX {
                slot[root] = out.len();
                out.push((Complex64::new(0.0, 0.0), 0, 0, i));
            }
            let e = &mut out[slot[root]];
            e.0 += zeros[i].z * zeros[i].m as f64;
            e.1 += zeros[i].m;
            e.2 += 1;
        }
        let zeros = out
            .into_iter()
            .map(|(sum, m, members, first)| {
                // Single entries stay bit-exact.
                let z = if members == 1 { zeros[first].z } else { sum / m as f64 };
                Zero { z, m }
            })
            .collect();
        Self { zeros }
    }

    pub fn entries(&self) -> &[Zero] {
        &self.zeros
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.zeros.iter().map(|z| z.m as usize).sum()
    }

    /// Locations repeated by multiplicity.
    pub fn expanded(&self) -> Vec<Complex64> {
        self.zeros
            .iter()
            .flat_map(|z| std::iter::repeat_n(z.z, z.m as usize))
            .collect()
    }

    pub fn multiplicity_near(&self, w: Complex64, tol: f64) -> u32 {
        self.zeros
            .iter()
            .filter(|z| (z.z - w).norm() <= tol)
            .map(|z| z.m)
            .sum()
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Self {
        Self {
            zeros: self.zeros.iter().map(|z| Zero { z: f(z.z), m: z.m }).collect(),
        }
    }

    /// Multiset union without re-clustering.
    pub fn union(&self, other: &Self) -> Self {
        let mut zeros = self.zeros.clone();
        zeros.extend_from_slice(&other.zeros);
        Self { zeros }
    }
}

/// `E(u; p) = (1 − u) exp(u + u²/2 + … + u^p/p)`.
pub fn primary_factor(u: Complex64, p: u32) -> Complex64 {
    let mut exponent = Complex64::new(0.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0);
    for j in 1..=p {
        power *= u;
        exponent += power / j as f64;
    }
    (1.0 - u) * exponent.exp()
}

/// `log E(u; p)`; the imaginary part is a phase, defined modulo 2π.
///
/// Small arguments use `−Σ_{j>p} u^j/j`, which keeps full relative precision
/// where `log(1 − u)` and the polynomial part cancel.
pub fn log_primary_factor(u: Complex64, p: u32) -> Complex64 {
    let r = u.norm();
    if r < 0.25 {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut power = u.powu(p + 1);
        let mut j = p + 1;
        loop {
            let term = power / j as f64;
            acc -= term;
            if term.norm() <= 1e-18 * acc.norm() || j > p + 200 {
                break;
            }
            power *= u;
            j += 1;
        }
        return acc;
    }
    let mut acc = (1.0 - u).ln();
    let mut power = Complex64::new(1.0, 0.0);
    for j in 1..=p {
        power *= u;
        acc += power / j as f64;
    }
    acc
}

/// Data of a Hadamard product `z^k e^{P(z)} ∏ E(z/z_j; p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HadamardData {
    order_at_origin: u32,
    exponent: Vec<Complex64>,
    zeros: Vec<Complex64>,
    genus: u32,
}

impl HadamardData {
    /// Nonzero zeros are expanded by multiplicity and sorted by modulus.
    /// The genus is declared by the caller; a finite list cannot decide it.
    pub fn new(order_at_origin: u32, exponent: Vec<Complex64>, zeros: &ZeroMultiset, genus: u32) -> Result<Self> {
        if exponent.len() > 3 {
            return Err(Error::InvalidInput("the exponent polynomial has degree at most 2".into()));
        }
        if genus > 2 {
            return Err(Error::InvalidInput("genus must be 0, 1 or 2".into()));
        }
        let mut list = zeros.expanded();
        if list.iter().any(|z| z.norm() == 0.0) {
            return Err(Error::InvalidInput("zeros at the origin belong in the order k".into()));
        }
        list.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
        Ok(Self {
            order_at_origin,
            exponent,
            zeros: list,
            genus,
        })
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }
}

/// Value of a truncated Hadamard product with a crude tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HadamardValue {
    pub value: Complex64,
    pub log_magnitude: f64,
    /// `Σ_{j>N} |z/z_j|^{p+1}` over the listed zeros beyond the truncation.
    pub tail_estimate: f64,
}

/// Evaluates with the first `truncation` zeros, accumulating in log form.
pub fn hadamard_eval(
    data: &HadamardData,
    z: Complex64,
    truncation: usize,
    tolerance: Option<f64>,
) -> Result<HadamardValue> {
    if truncation > data.zeros.len() {
        return Err(Error::InvalidInput(format!(
            "truncation {truncation} exceeds the {} listed zeros",
            data.zeros.len()
        )));
    }
    let p = data.genus;
    let tail_estimate: f64 = data.zeros[truncation..]
        .iter()
        .map(|zj| (z / zj).norm().powi(p as i32 + 1))
        .sum();
    if let Some(tol) = tolerance {
        if tail_estimate > tol {
            return Err(Error::TruncationTooShort {
                estimate: tail_estimate,
                tolerance: tol,
            });
        }
    }
    let zero_value = HadamardValue {
        value: Complex64::new(0.0, 0.0),
        log_magnitude: f64::NEG_INFINITY,
        tail_estimate,
    };
    if data.order_at_origin > 0 && z.norm() == 0.0 {
        return Ok(zero_value);
    }
    let mut log = data
        .exponent
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c);
    if data.order_at_origin > 0 {
        log += z.ln() * data.order_at_origin as f64;
    }
    for zj in &data.zeros[..truncation] {
        let u = z / zj;
        if u == Complex64::new(1.0, 0.0) || z == *zj {
            return Ok(zero_value);
        }
        log += log_primary_factor(u, p);
    }
    Ok(HadamardValue {
        value: log.exp(),
        log_magnitude: log.re,
        tail_estimate,
    })
}

/// All roots with multiplicity, by Aberth–Ehrlich iteration polished with
/// Newton steps.
pub fn poly_roots(p: &FockPolynomial) -> Result<ZeroMultiset> {
    if p.is_zero() || p.degree() == 0 {
        return Err(Error::InvalidInput("root finding needs degree at least 1".into()));
    }
    let coeffs = p.coeffs();
    let zero_roots = coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    let reduced = FockPolynomial::new(coeffs[zero_roots..].to_vec());
    let mut roots: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); zero_roots];
    let d = reduced.degree();
    match d {
        0 => {}
        1 => {
            let c = reduced.coeffs();
            roots.push(-c[0] / c[1]);
        }
        _ => roots.extend(aberth(&reduced)?),
    }
    ZeroMultiset::new(roots.into_iter().map(|z| Zero { z, m: 1 }).collect())
}

fn aberth(p: &FockPolynomial) -> Result<Vec<Complex64>> {
    let c = p.coeffs();
    let d = p.degree();
    let lead = c[d];
    let mut radius = (c[0] / lead).norm().powf(1.0 / d as f64);
    if !(radius > 0.0 && radius.is_finite()) {
        radius = 1.0;
    }
    let mut z: Vec<Complex64> = (0..d)
        .map(|j| {
            let angle = 2.0 * std::f64::consts::PI * j as f64 / d as f64 + 0.4;
            Complex64::from_polar(radius * (1.0 + 0.1 * j as f64), angle)
        })
        .collect();
    let eps = f64::EPSILON;
    let mut done = vec![false; d];
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        for k in 0..d {
            if done[k] {
                continue;
            }
            let (v, dv) = p.eval_with_derivative(z[k]);
            if v.norm() <= 4.0 * eps * p.eval_abs_bound(z[k].norm()) {
                done[k] = true;
                continue;
            }
            let ratio = if dv.norm() == 0.0 {
                Complex64::new(1e-8 * (1.0 + z[k].norm()), 0.0)
            } else {
                v / dv
            };
            let repulsion: Complex64 = (0..d)
                .filter(|&j| j != k)
                .map(|j| {
                    let diff = z[k] - z[j];
                    if diff.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        diff.inv()
                    }
                })
                .sum();
            let denom = 1.0 - ratio * repulsion;
            let step = if denom.norm() == 0.0 { ratio } else { ratio / denom };
            z[k] -= step;
            if !(z[k].re.is_finite() && z[k].im.is_finite()) {
                return Err(Error::NonConvergence { sweeps: MAX_SWEEPS });
            }
            if step.norm() <= eps * (1.0 + z[k].norm()) {
                done[k] = true;
            }
        }
        if done.iter().all(|&x| x) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence { sweeps: MAX_SWEEPS });
    }
    for root in z.iter_mut() {
        for _ in 0..3 {
            let (v, dv) = p.eval_with_derivative(*root);
            if dv.norm() == 0.0 || v.norm() == 0.0 {
                break;
            }
            let candidate = *root - v / dv;
            if p.eval(candidate).norm() < v.norm() {
                *root = candidate;
            } else {
                break;
            }
        }
    }
    Ok(z)
}

/// Coefficients of `leading · ∏ (z − z_j)^{m_j}`.
pub fn roots_to_poly(zeros: &ZeroMultiset, leading: Complex64) -> FockPolynomial {
    let mut coeffs = vec![leading];
    for r in zeros.expanded() {
        let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
        for (k, c) in coeffs.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * r;
        }
        coeffs = next;
    }
    FockPolynomial::new(coeffs)
}

/// Mirror image of every zero across `line`.
pub fn reflect_conjugate(zeros: &ZeroMultiset, line: &Line) -> ZeroMultiset {
    if line.angle == 0.0 && line.anchor.im == 0.0 {
        return zeros.map(|w| w.conj());
    }
    zeros.map(|w| line.reflect(w))
}

/// One matched location pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatchedPair {
    pub a: Complex64,
    pub b: Complex64,
    pub count: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchReport {
    pub pairs: Vec<MatchedPair>,
    pub unmatched_a: ZeroMultiset,
    pub unmatched_b: ZeroMultiset,
}

impl MatchReport {
    pub fn is_perfect(&self) -> bool {
        self.unmatched_a.is_empty() && self.unmatched_b.is_empty()
    }

    pub fn max_distance(&self) -> f64 {
        self.pairs.iter().map(|p| (p.a - p.b).norm()).fold(0.0, f64::max)
    }
}

/// Greedy nearest-pair matching under the distance `tol`, with
/// multiplicity accounting.
pub fn multiset_match(a: &ZeroMultiset, b: &ZeroMultiset, tol: f64) -> MatchReport {
    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for (i, x) in a.zeros.iter().enumerate() {
        for (j, y) in b.zeros.iter().enumerate() {
            let d = (x.z - y.z).norm();
            if d <= tol {
                candidates.push((d, i, j));
            }
        }
    }
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut left_a: Vec<u32> = a.zeros.iter().map(|z| z.m).collect();
    let mut left_b: Vec<u32> = b.zeros.iter().map(|z| z.m).collect();
    let mut pairs = Vec::new();
    for (_, i, j) in candidates {
        let count = left_a[i].min(left_b[j]);
        if count > 0 {
            left_a[i] -= count;
            left_b[j] -= count;
            pairs.push(MatchedPair {
                a: a.zeros[i].z,
                b: b.zeros[j].z,
                count,
            });
        }
    }
    let leftovers = |set: &ZeroMultiset, left: &[u32]| ZeroMultiset {
        zeros: set
            .zeros
            .iter()
            .zip(left)
            .filter(|(_, &m)| m > 0)
            .map(|(z, &m)| Zero { z: z.z, m })
            .collect(),
    };
    MatchReport {
        unmatched_a: leftovers(a, &left_a),
        unmatched_b: leftovers(b, &left_b),
        pairs,
    }
}
