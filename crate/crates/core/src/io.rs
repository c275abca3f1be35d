//! Text formats: JSON for signals, geometry, zero multisets and results; CSV
//! for point sets and magnitude samples.
//!
//! Parsers validate through the same constructors as the library, so domain
//! errors keep their codes. Non-finite numbers are rejected everywhere.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::factorization::{ZeroMultiset, ZeroMultisetRepr};
use crate::fock_core::{hermite_to_fock, ClosedFormFunction, FockPolynomial, HermiteExpansion};
use crate::lattice_geometry::{LatticeRepr, PointSet, ShiftedLattice, StructuredSet, StructuredSetRepr};
use crate::retrieval::{MagnitudeSample, MagnitudeSamples, RetrievalResult};

/// Version tag written into every JSON report.
pub const SCHEMA_VERSION: u32 = 1;

/// Coefficient basis of a serialized signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    Hermite,
    Monomial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SignalRepr {
    basis: Basis,
    coeffs: Vec<Complex64>,
}

/// A signal read from JSON, in the basis it was written in.
#[derive(Debug, Clone, PartialEq)]
pub enum Signal {
    Hermite(HermiteExpansion),
    Monomial(FockPolynomial),
}

impl Signal {
    /// The Fock-side polynomial.
    pub fn to_fock(&self) -> FockPolynomial {
        match self {
            Self::Hermite(h) => hermite_to_fock(h),
            Self::Monomial(p) => p.clone(),
        }
    }
}

fn parse_json<'a, T: Deserialize<'a>>(text: &'a str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

fn check_finite(values: &[Complex64], what: &str) -> Result<()> {
    match values.iter().find(|z| !(z.re.is_finite() && z.im.is_finite())) {
        Some(z) => Err(Error::Parse(format!("{what}: non-finite value {z}"))),
        None => Ok(()),
    }
}

/// `{"basis": "hermite"|"monomial", "coeffs": [[re, im], ...]}`.
pub fn parse_signal(text: &str) -> Result<Signal> {
    let repr: SignalRepr = parse_json(text, "signal")?;
    if repr.coeffs.is_empty() {
        return Err(Error::Parse("signal: empty coefficient list".into()));
    }
    check_finite(&repr.coeffs, "signal")?;
    Ok(match repr.basis {
        Basis::Hermite => Signal::Hermite(HermiteExpansion::new(repr.coeffs)),
        Basis::Monomial => Signal::Monomial(FockPolynomial::new(repr.coeffs)),
    })
}

pub fn signal_to_json(signal: &Signal) -> Value {
    let (basis, coeffs) = match signal {
        Signal::Hermite(h) => (Basis::Hermite, h.coeffs().to_vec()),
        Signal::Monomial(p) => (Basis::Monomial, p.coeffs().to_vec()),
    };
    serde_json::to_value(SignalRepr { basis, coeffs }).expect("signal serializes")
}

/// Either a closed-form function (`{"kind": ...}`) or a signal, read as its
/// Fock polynomial.
pub fn parse_function(text: &str) -> Result<ClosedFormFunction> {
    let value: Value = parse_json(text, "function")?;
    if value.get("kind").is_none() {
        return Ok(ClosedFormFunction::polynomial(parse_signal(text)?.to_fock()));
    }
    let f: ClosedFormFunction = serde_json::from_value(value).map_err(|e| Error::Parse(format!("function: {e}")))?;
    let finite = match &f {
        ClosedFormFunction::Polynomial { poly } => check_finite(poly.coeffs(), "function").is_ok(),
        ClosedFormFunction::ShiftedSine { scale, offset } => scale.is_finite() && offset.is_finite(),
        ClosedFormFunction::ScaledSine { scale } => scale.is_finite(),
        ClosedFormFunction::ExpQuadratic { a2, a1, a0 } => check_finite(&[*a2, *a1, *a0], "function").is_ok(),
    };
    if !finite {
        return Err(Error::Parse("function: non-finite parameter".into()));
    }
    Ok(f)
}

/// `{"z0": [re,im], "omega1": [re,im], "omega2": [re,im]}`.
pub fn parse_lattice(text: &str) -> Result<ShiftedLattice> {
    ShiftedLattice::try_from(parse_json::<LatticeRepr>(text, "lattice")?)
}

pub fn lattice_to_json(lattice: &ShiftedLattice) -> Value {
    serde_json::to_value(lattice).expect("lattice serializes")
}

/// `{"z1", "z2", "theta", "rho1", "rho2", "extra" (optional), "truncation"}`.
pub fn parse_structured_set(text: &str) -> Result<StructuredSet> {
    StructuredSet::try_from(parse_json::<StructuredSetRepr>(text, "structured set")?)
}

pub fn structured_set_to_json(set: &StructuredSet) -> Value {
    serde_json::to_value(set).expect("structured set serializes")
}

/// `{"zeros": [{"z": [re,im], "m": k}, ...]}`.
pub fn parse_zero_multiset(text: &str) -> Result<ZeroMultiset> {
    ZeroMultiset::try_from(parse_json::<ZeroMultisetRepr>(text, "zero multiset")?)
}

pub fn zero_multiset_to_json(zeros: &ZeroMultiset) -> Value {
    json!({ "zeros": zeros.entries() })
}

/// Rows of `columns` numbers; a first row equal to `header` is skipped and
/// lines starting with `#` are comments.
fn parse_rows(text: &str, header: &[&str], what: &str) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(format!("{what}: {e}")))?;
        if i == 0 && record.iter().eq(header.iter().copied()) {
            continue;
        }
        if record.len() != header.len() {
            return Err(Error::Parse(format!(
                "{what}: line {} has {} fields, expected {}",
                record.position().map_or(0, |p| p.line()),
                record.len(),
                header.len()
            )));
        }
        let row = record
            .iter()
            .map(|field| match field.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Error::Parse(format!(
                    "{what}: line {}: {field:?} is not a finite number",
                    record.position().map_or(0, |p| p.line())
                ))),
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// One `re,im` pair per line, optional `re,im` header.
pub fn parse_point_set(text: &str) -> Result<PointSet> {
    let rows = parse_rows(text, &["re", "im"], "point set")?;
    PointSet::new(rows.into_iter().map(|r| Complex64::new(r[0], r[1])).collect())
}

pub fn point_set_to_csv(points: &PointSet) -> String {
    let mut out = String::from("re,im\n");
    for z in points.points() {
        out.push_str(&format!("{:?},{:?}\n", z.re, z.im));
    }
    out
}

/// One `re,im,magnitude` row per sample, optional header.
pub fn parse_samples(text: &str) -> Result<MagnitudeSamples> {
    let rows = parse_rows(text, &["re", "im", "magnitude"], "samples")?;
    MagnitudeSamples::new(
        rows.into_iter()
            .map(|r| MagnitudeSample {
                point: Complex64::new(r[0], r[1]),
                magnitude: r[2],
            })
            .collect(),
        None,
    )
}

/// Shortest round-trip representation of every value.
pub fn samples_to_csv(samples: &MagnitudeSamples) -> String {
    let mut out = String::from("re,im,magnitude\n");
    for r in samples.records() {
        out.push_str(&format!("{:?},{:?},{:?}\n", r.point.re, r.point.im, r.magnitude));
    }
    out
}

pub fn retrieval_result_to_json(result: &RetrievalResult) -> Value {
    json!({
        "coefficients": result.recovered.coeffs(),
        "residual": result.residual,
        "detected_degree": result.detected_degree,
        "ambiguity_flag": result.ambiguity_flag,
        "frame": {
            "angle": result.frame.angle,
            "translation": result.frame.translation,
        },
    })
}

/// `{"schema": 1, "report": ...}` wrapper shared by all reports.
pub fn versioned(report: Value) -> Value {
    json!({ "schema": SCHEMA_VERSION, "report": report })
}
