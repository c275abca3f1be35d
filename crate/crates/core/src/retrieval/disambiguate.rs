//! Choosing one member of every conjugate zero pair using the second line.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::factorization::{multiset_match, roots_to_poly, Zero, ZeroMultiset};
use crate::lattice_geometry::Line;

/// Both members of a pair matching within this tolerance, relative to
/// `1 + |w|`, makes the pair ambiguous. It sits above the root error of the
/// squared-modulus fits, which reaches 1e-4 for clustered zeros.
pub const MATCH_RELATIVE: f64 = 1e-3;

/// A pair member is accepted locally when its score is below this, relative
/// to `1 + |w|`, and smaller than the other member's by [`DECISIVE_RATIO`].
pub const ACCEPT_RELATIVE: f64 = 1e-2;
pub const DECISIVE_RATIO: f64 = 10.0;

/// Largest number of unresolved pairs the fallback enumerates.
pub const MAX_AMBIGUOUS_PAIRS: usize = 12;

/// Candidates whose RMS relative residual exceeds this are inconsistent.
pub const CONSISTENCY_LIMIT: f64 = 0.1;

/// Outcome of [`disambiguate_zeros`].
#[derive(Debug, Clone, PartialEq)]
pub struct Disambiguation {
    pub zeros: ZeroMultiset,
    /// True when the fallback enumerated more than one candidate.
    pub ambiguous: bool,
    pub candidates: usize,
    /// RMS relative residual of the chosen candidate.
    pub residual: f64,
    /// Whether the chosen zeros reproduce the second-line multiset exactly.
    pub consistent_with_line2: bool,
}

fn tol(w: Complex64) -> f64 {
    MATCH_RELATIVE * (1.0 + w.norm())
}

/// Selects the zeros of `f` from `s1 = Z ⊎ conj Z` (first line on `ℝ`) and
/// `s2 = Z ⊎ reflect(Z, line2)`.
///
/// Each member `w` of a pair is scored by its distance to the `s2` points it
/// requires (`w` and its mirror image across `line2`). A pair is ambiguous
/// when both members match within [`MATCH_RELATIVE`]; otherwise a member
/// that is clearly closer is accepted. Undecided pairs are resolved by
/// enumerating every choice and minimising the relative residual of
/// `leading_abs · ∏|z − w|` against `samples`.
pub fn disambiguate_zeros(
    s1: &ZeroMultiset,
    s2: &ZeroMultiset,
    line2: &Line,
    samples: &[(Complex64, f64)],
    q: usize,
    leading_abs: f64,
) -> Result<Disambiguation> {
    for (set, name) in [(s1, "first"), (s2, "second")] {
        if set.total_multiplicity() != 2 * q {
            return Err(Error::InvalidInput(format!(
                "{name} line multiset has multiplicity {}, expected {}",
                set.total_multiplicity(),
                2 * q
            )));
        }
    }
    let (fixed, pairs) = split_pairs(s1)?;
    let s2_points = s2.expanded();
    // Distance from `w` to the s2 points it needs: `w` and its mirror image,
    // or two copies of `w` when it lies on line2.
    let score = |w: Complex64| {
        let mut d: Vec<f64> = s2_points.iter().map(|&p| (p - w).norm()).collect();
        d.sort_by(f64::total_cmp);
        let m = line2.reflect(w);
        if (m - w).norm() <= tol(w) {
            d.get(1).copied().unwrap_or(f64::INFINITY)
        } else {
            let dm = s2_points.iter().map(|&p| (p - m).norm()).fold(f64::INFINITY, f64::min);
            d[0].max(dm)
        }
    };

    let mut chosen: Vec<Complex64> = fixed.clone();
    let mut open: Vec<Complex64> = Vec::new();
    for &w in &pairs {
        let (a, b) = (score(w), score(w.conj()));
        let (best, other, pick) = if a <= b { (a, b, w) } else { (b, a, w.conj()) };
        let both_match = other <= tol(w);
        if !both_match && best <= ACCEPT_RELATIVE * (1.0 + w.norm()) && other >= DECISIVE_RATIO * best {
            chosen.push(pick);
        } else {
            open.push(w);
        }
    }

    let first = enumerate(&chosen, &open, s2, line2, samples, leading_abs)?;
    let best = if first.residual <= CONSISTENCY_LIMIT || open.len() == pairs.len() {
        first
    } else {
        // A local decision may have been wrong; reopen every pair.
        enumerate(&fixed, &pairs, s2, line2, samples, leading_abs)?
    };
    if !(best.residual <= CONSISTENCY_LIMIT) {
        return Err(Error::NoConsistentAssignment {
            best_residual: best.residual,
        });
    }
    Ok(best)
}

/// Real zeros (halved multiplicities) and upper-half representatives of the
/// conjugate pairs of `s1`.
fn split_pairs(s1: &ZeroMultiset) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let mut real = Vec::new();
    let mut upper = Vec::new();
    let mut lower = 0usize;
    for w in s1.expanded() {
        if w.im.abs() <= tol(w) {
            real.push(w.re);
        } else if w.im > 0.0 {
            upper.push(w);
        } else {
            lower += 1;
        }
    }
    if lower != upper.len() || real.len() % 2 != 0 {
        return Err(Error::ConjugateClosure);
    }
    real.sort_by(f64::total_cmp);
    let fixed = real
        .chunks(2)
        .map(|p| Complex64::new(0.5 * (p[0] + p[1]), 0.0))
        .collect();
    Ok((fixed, upper))
}

fn enumerate(
    chosen: &[Complex64],
    open: &[Complex64],
    s2: &ZeroMultiset,
    line2: &Line,
    samples: &[(Complex64, f64)],
    leading_abs: f64,
) -> Result<Disambiguation> {
    if open.len() > MAX_AMBIGUOUS_PAIRS {
        return Err(Error::TooManyAmbiguousPairs {
            count: open.len(),
            cap: MAX_AMBIGUOUS_PAIRS,
        });
    }
    let candidates = 1usize << open.len();
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    for mask in 0..candidates {
        let mut zeros = chosen.to_vec();
        zeros.extend(open.iter().enumerate().map(|(j, &w)| {
            if mask >> j & 1 == 0 {
                w
            } else {
                w.conj()
            }
        }));
        let r = relative_residual(&zeros, samples, leading_abs);
        // Strict comparison keeps the lowest index among ties.
        if best.as_ref().is_none_or(|(b, _)| r < *b) {
            best = Some((r, zeros));
        }
    }
    let (residual, zeros) = best.expect("at least one candidate");
    let zeros = ZeroMultiset::new(zeros.into_iter().map(|z| Zero { z, m: 1 }).collect())?;
    let mirrored = zeros.union(&zeros.map(|w| line2.reflect(w)));
    let reach = s2.entries().iter().map(|z| z.z.norm()).fold(0.0, f64::max);
    let consistent_with_line2 = multiset_match(&mirrored, s2, tol(Complex64::new(reach, 0.0))).is_perfect();
    Ok(Disambiguation {
        zeros,
        ambiguous: candidates > 1,
        candidates,
        residual,
        consistent_with_line2,
    })
}

/// RMS over samples of the relative error, each term clipped at 1.
fn relative_residual(zeros: &[Complex64], samples: &[(Complex64, f64)], leading_abs: f64) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let top = samples.iter().map(|s| s.1).fold(0.0, f64::max);
    let floor = 1e-12 * top;
    let sum: f64 = samples
        .iter()
        .map(|&(z, y)| {
            let model = leading_abs * zeros.iter().map(|w| (z - w).norm()).product::<f64>();
            let e = ((model - y).abs() / y.max(floor).max(f64::MIN_POSITIVE)).min(1.0);
            e * e
        })
        .sum();
    (sum / samples.len() as f64).sqrt()
}

/// `leading · ∏ (z − w)` for the selected zeros.
pub fn assemble(zeros: &ZeroMultiset, leading: f64) -> crate::fock_core::FockPolynomial {
    roots_to_poly(zeros, Complex64::new(leading, 0.0))
}
