//! Sampling geometries: shifted lattices, pairs of arithmetic progressions on
//! parallel lines, and finite point sets, together with the density and
//! spacing tests that decide whether magnitudes on them determine a function
//! up to a global phase.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Half-width of the square of window centres scanned by
/// [`estimate_lower_density`].
pub const DEFAULT_SCAN_HALF_WIDTH: f64 = 2.0;

/// Upper bound on the progression truncation of a [`StructuredSet`].
pub const MAX_TRUNCATION: usize = 1_000_000;

fn finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Oriented line `anchor + e^{iθ}ℝ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub anchor: Complex64,
    pub angle: f64,
}

impl Line {
    pub fn new(anchor: Complex64, angle: f64) -> Self {
        Self { anchor, angle }
    }

    pub fn real_axis() -> Self {
        Self::new(Complex64::new(0.0, 0.0), 0.0)
    }

    pub fn direction(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.angle)
    }

    /// Mirror image across the line.
    pub fn reflect(&self, w: Complex64) -> Complex64 {
        let e = self.direction();
        self.anchor + e * (e.conj() * (w - self.anchor)).conj()
    }

    /// Signed distance from the line, positive to the left of the direction.
    pub fn signed_distance(&self, w: Complex64) -> f64 {
        (self.direction().conj() * (w - self.anchor)).im
    }
}

/// Rigid motion `w ↦ e^{iθ}w + t` from a normalised frame to raw coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigidMotion {
    pub angle: f64,
    pub translation: Complex64,
}

impl RigidMotion {
    pub fn identity() -> Self {
        Self {
            angle: 0.0,
            translation: Complex64::new(0.0, 0.0),
        }
    }

    pub fn new(angle: f64, translation: Complex64) -> Self {
        Self { angle, translation }
    }

    pub fn rotation(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.angle)
    }

    pub fn apply(&self, w: Complex64) -> Complex64 {
        self.rotation() * w + self.translation
    }

    pub fn invert(&self, z: Complex64) -> Complex64 {
        self.rotation().conj() * (z - self.translation)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct LatticeRepr {
    z0: Complex64,
    omega1: Complex64,
    omega2: Complex64,
}

/// `z0 + ω₁ℤ + ω₂ℤ` with `ω₁/ω₂ ∉ ℝ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LatticeRepr")]
pub struct ShiftedLattice {
    z0: Complex64,
    omega1: Complex64,
    omega2: Complex64,
}

impl TryFrom<LatticeRepr> for ShiftedLattice {
    type Error = Error;

    fn try_from(r: LatticeRepr) -> Result<Self> {
        ShiftedLattice::new(r.z0, r.omega1, r.omega2)
    }
}

impl ShiftedLattice {
    pub fn new(z0: Complex64, omega1: Complex64, omega2: Complex64) -> Result<Self> {
        if !(finite(z0) && finite(omega1) && finite(omega2)) {
            return Err(Error::InvalidInput("lattice parameters must be finite".into()));
        }
        let cross = (omega1 * omega2.conj()).im;
        if cross == 0.0 || !cross.is_finite() {
            return Err(Error::DegenerateLattice);
        }
        Ok(Self { z0, omega1, omega2 })
    }

    /// Square lattice `aℤ + iaℤ`.
    pub fn square(a: f64) -> Result<Self> {
        Self::new(
            Complex64::new(0.0, 0.0),
            Complex64::new(a, 0.0),
            Complex64::new(0.0, a),
        )
    }

    pub fn z0(&self) -> Complex64 {
        self.z0
    }

    pub fn omega1(&self) -> Complex64 {
        self.omega1
    }

    pub fn omega2(&self) -> Complex64 {
        self.omega2
    }

    pub fn point(&self, m: i64, n: i64) -> Complex64 {
        self.z0 + self.omega1 * m as f64 + self.omega2 * n as f64
    }

    pub fn covolume(&self) -> f64 {
        (self.omega1 * self.omega2.conj()).im.abs()
    }

    pub fn exact_lower_density(&self) -> f64 {
        1.0 / self.covolume()
    }

    /// Distance between the lines `z0 + ω₂ℝ` and `z0 + ω₁ + ω₂ℝ`.
    pub fn line_distance(&self) -> f64 {
        self.covolume() / self.omega2.norm()
    }

    /// Applies `z ↦ e^{iθ}z + t` to the whole lattice.
    pub fn transformed(&self, motion: &RigidMotion) -> Self {
        let r = motion.rotation();
        Self {
            z0: motion.apply(self.z0),
            omega1: r * self.omega1,
            omega2: r * self.omega2,
        }
    }
}

pub fn covolume(lattice: &ShiftedLattice) -> f64 {
    lattice.covolume()
}

pub fn exact_lower_density(lattice: &ShiftedLattice) -> f64 {
    lattice.exact_lower_density()
}

/// Finite set of pairwise distinct points.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Vec<Complex64>,
}

impl PointSet {
    pub fn new(points: Vec<Complex64>) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| !finite(**p)) {
            return Err(Error::InvalidInput(format!("non-finite point {p}")));
        }
        let mut seen = std::collections::HashSet::with_capacity(points.len());
        for p in &points {
            // -0.0 and 0.0 are the same point.
            let key = ((p.re + 0.0).to_bits(), (p.im + 0.0).to_bits());
            if !seen.insert(key) {
                return Err(Error::NotDiscrete(format!("duplicate point {p}")));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn into_points(self) -> Vec<Complex64> {
        self.points
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct StructuredSetRepr {
    z1: Complex64,
    z2: Complex64,
    theta: f64,
    rho1: f64,
    rho2: f64,
    #[serde(default)]
    extra: Vec<Complex64>,
    truncation: usize,
}

/// Two arithmetic progressions `z_k + ρ_k e^{iθ} n`, `|n| ≤ N`, on parallel
/// lines, plus filler points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StructuredSetRepr")]
pub struct StructuredSet {
    z1: Complex64,
    z2: Complex64,
    theta: f64,
    rho1: f64,
    rho2: f64,
    extra: Vec<Complex64>,
    truncation: usize,
}

impl TryFrom<StructuredSetRepr> for StructuredSet {
    type Error = Error;

    fn try_from(r: StructuredSetRepr) -> Result<Self> {
        StructuredSet::new(r.z1, r.z2, r.theta, r.rho1, r.rho2, r.extra, r.truncation)
    }
}

impl StructuredSet {
    pub fn new(
        z1: Complex64,
        z2: Complex64,
        theta: f64,
        rho1: f64,
        rho2: f64,
        extra: Vec<Complex64>,
        truncation: usize,
    ) -> Result<Self> {
        if !(finite(z1) && finite(z2) && theta.is_finite()) {
            return Err(Error::InvalidInput("anchors and angle must be finite".into()));
        }
        if !(theta > -PI && theta <= PI) {
            return Err(Error::InvalidInput(format!("angle {theta} outside (-π, π]")));
        }
        if !(rho1 > 0.0 && rho2 > 0.0 && rho1.is_finite() && rho2.is_finite()) {
            return Err(Error::InvalidInput("spacings must be positive and finite".into()));
        }
        if truncation == 0 || truncation > MAX_TRUNCATION {
            return Err(Error::InvalidInput(format!(
                "truncation must lie in 1..={MAX_TRUNCATION}"
            )));
        }
        let set = Self {
            z1,
            z2,
            theta,
            rho1,
            rho2,
            extra,
            truncation,
        };
        let offset = set.line_distance();
        if !(offset > 0.0) || offset <= 1e-12 * (z2 - z1).norm() {
            return Err(Error::CoincidentLines);
        }
        // Validates finiteness and distinctness of every enumerated point.
        PointSet::new(set.points())?;
        Ok(set)
    }

    pub fn z1(&self) -> Complex64 {
        self.z1
    }

    pub fn z2(&self) -> Complex64 {
        self.z2
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn rho1(&self) -> f64 {
        self.rho1
    }

    pub fn rho2(&self) -> f64 {
        self.rho2
    }

    pub fn extra(&self) -> &[Complex64] {
        &self.extra
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn with_extra(mut self, extra: Vec<Complex64>) -> Result<Self> {
        self.extra = extra;
        Self::new(
            self.z1,
            self.z2,
            self.theta,
            self.rho1,
            self.rho2,
            self.extra,
            self.truncation,
        )
    }

    pub fn direction(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.theta)
    }

    pub fn line1(&self) -> Line {
        Line::new(self.z1, self.theta)
    }

    pub fn line2(&self) -> Line {
        Line::new(self.z2, self.theta)
    }

    pub fn line_distance(&self) -> f64 {
        self.line1().signed_distance(self.z2).abs()
    }

    /// Motion taking the normalised frame (first line on ℝ, first anchor at
    /// the origin) to raw coordinates.
    pub fn frame(&self) -> RigidMotion {
        RigidMotion::new(self.theta, self.z1)
    }

    pub fn progression1(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let n = self.truncation as i64;
        let step = self.direction() * self.rho1;
        (-n..=n).map(move |k| (k, self.z1 + step * k as f64))
    }

    pub fn progression2(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let n = self.truncation as i64;
        let step = self.direction() * self.rho2;
        (-n..=n).map(move |k| (k, self.z2 + step * k as f64))
    }

    /// Every point: first progression, second progression, then filler.
    pub fn points(&self) -> Vec<Complex64> {
        self.progression1()
            .map(|(_, z)| z)
            .chain(self.progression2().map(|(_, z)| z))
            .chain(self.extra.iter().copied())
            .collect()
    }

    /// The complex-conjugated set. Gabor samples at `x + iω` are Fock
    /// samples at `x − iω`.
    pub fn reflected(&self) -> Result<Self> {
        let theta = if self.theta == PI { PI } else { -self.theta };
        Self::new(
            self.z1.conj(),
            self.z2.conj(),
            theta,
            self.rho1,
            self.rho2,
            self.extra.iter().map(|z| z.conj()).collect(),
            self.truncation,
        )
    }
}

/// Outcome of the density, spacing and distance tests on a shifted lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub covolume: f64,
    pub exact_density: f64,
    pub spacing: f64,
    pub line_distance: f64,
    pub density_ok: bool,
    pub spacing_ok: bool,
    pub distance_ok: bool,
    pub verdict: bool,
    pub tau_lower: f64,
    pub kappa: f64,
}

/// Strict comparison `value < π/(2·parameter)`, vacuous when the parameter is 0.
fn below_quarter_period(value: f64, parameter: f64) -> bool {
    if parameter == 0.0 {
        true
    } else {
        value < PI / (2.0 * parameter)
    }
}

pub fn check_lattice_conditions(
    lattice: &ShiftedLattice,
    tau_lower: f64,
    kappa: f64,
) -> Result<ConditionReport> {
    if !(tau_lower >= 0.0 && kappa >= 0.0) || !tau_lower.is_finite() || !kappa.is_finite() {
        return Err(Error::InvalidInput(
            "growth parameters must be finite and nonnegative".into(),
        ));
    }
    let covol = lattice.covolume();
    let spacing = lattice.omega2.norm();
    let line_distance = lattice.line_distance();
    let density_ok = below_quarter_period(covol, tau_lower);
    let spacing_ok = below_quarter_period(spacing, kappa);
    let distance_ok = below_quarter_period(line_distance, kappa);
    Ok(ConditionReport {
        covolume: covol,
        exact_density: 1.0 / covol,
        spacing,
        line_distance,
        density_ok,
        spacing_ok,
        distance_ok,
        verdict: density_ok && spacing_ok && distance_ok,
        tau_lower,
        kappa,
    })
}

/// The progressions `z0 + ω₂ℤ` and `z0 + ω₁ + ω₂ℤ`, truncated to `|n| ≤ N`.
pub fn canonical_progressions(lattice: &ShiftedLattice, truncation: usize) -> Result<StructuredSet> {
    let spacing = lattice.omega2.norm();
    StructuredSet::new(
        lattice.z0,
        lattice.z0 + lattice.omega1,
        lattice.omega2.arg(),
        spacing,
        spacing,
        Vec::new(),
        truncation,
    )
}

/// All lattice points in the closed disc `|z| ≤ radius`.
pub fn enumerate(lattice: &ShiftedLattice, radius: f64) -> Result<PointSet> {
    if !(radius >= 0.0 && radius.is_finite()) {
        return Err(Error::InvalidInput("radius must be finite and nonnegative".into()));
    }
    let (a, b) = (lattice.omega1.re, lattice.omega2.re);
    let (c, d) = (lattice.omega1.im, lattice.omega2.im);
    let det = a * d - b * c;
    // Rows of the inverse generator matrix.
    let row_m = (d / det, -b / det);
    let row_n = (-c / det, a / det);
    let v = -lattice.z0;
    let m_centre = row_m.0 * v.re + row_m.1 * v.im;
    let n_centre = row_n.0 * v.re + row_n.1 * v.im;
    let m_half = (row_m.0.hypot(row_m.1)) * radius;
    let n_half = (row_n.0.hypot(row_n.1)) * radius;
    let count = (2.0 * m_half + 3.0) * (2.0 * n_half + 3.0);
    if !(count < 5e8) {
        return Err(Error::InvalidInput(format!(
            "enumeration of about {count:.0} candidates is too large"
        )));
    }
    let r2 = radius * radius;
    let mut points = Vec::new();
    for m in ((m_centre - m_half).floor() as i64)..=((m_centre + m_half).ceil() as i64) {
        for n in ((n_centre - n_half).floor() as i64)..=((n_centre + n_half).ceil() as i64) {
            let z = lattice.point(m, n);
            if z.norm_sqr() <= r2 {
                points.push(z);
            }
        }
    }
    PointSet::new(points)
}

/// Parameters of the window scan in [`estimate_lower_density_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityScan {
    pub radii: Vec<f64>,
    pub grid_step: f64,
    /// Window centres range over a square of this half-width around the
    /// centre of the bounding box.
    pub scan_half_width: f64,
}

pub fn estimate_lower_density(points: &PointSet, radii: &[f64], grid_step: f64) -> Result<f64> {
    estimate_lower_density_with(
        points,
        &DensityScan {
            radii: radii.to_vec(),
            grid_step,
            scan_half_width: DEFAULT_SCAN_HALF_WIDTH,
        },
    )
}

/// `min_r min_{z₀} |P ∩ (rK + z₀)| / r²` over a finite grid of translates,
/// `K` the closed axis-aligned unit square centred at the origin.
pub fn estimate_lower_density_with(points: &PointSet, scan: &DensityScan) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    if scan.radii.is_empty()
        || scan.radii.iter().any(|r| !(*r > 0.0 && r.is_finite()))
        || scan.radii.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(Error::InvalidInput("radii must be positive and increasing".into()));
    }
    if !(scan.grid_step > 0.0 && scan.grid_step.is_finite()) {
        return Err(Error::InvalidInput("grid step must be positive".into()));
    }
    if !(scan.scan_half_width >= 0.0 && scan.scan_half_width.is_finite()) {
        return Err(Error::InvalidInput("scan half-width must be nonnegative".into()));
    }
    let pts = points.points();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in pts {
        x0 = x0.min(p.re);
        x1 = x1.max(p.re);
        y0 = y0.min(p.im);
        y1 = y1.max(p.im);
    }
    // A set inside a line has zero density: every large window misses it.
    if x1 - x0 == 0.0 || y1 - y0 == 0.0 {
        return Ok(0.0);
    }
    let centre = Complex64::new(0.5 * (x0 + x1), 0.5 * (y0 + y1));
    let w = scan.scan_half_width;
    let r_max = scan.radii[scan.radii.len() - 1];
    let reach = w + 0.5 * r_max;
    if centre.re - reach < x0 || centre.re + reach > x1 || centre.im - reach < y0 || centre.im + reach > y1 {
        return Err(Error::InsufficientCoverage(format!(
            "windows of side {r_max} around the scan region exceed the bounding box"
        )));
    }
    let steps = (2.0 * w / scan.grid_step).floor() as usize;
    if steps > 100_000 {
        return Err(Error::InvalidInput("grid step too small for the scan region".into()));
    }
    let offsets: Vec<f64> = (0..=steps).map(|k| -w + k as f64 * scan.grid_step).collect();

    let mut by_y: Vec<Complex64> = pts.to_vec();
    by_y.sort_by(|a, b| a.im.total_cmp(&b.im));

    let mut best = f64::INFINITY;
    let mut strip: Vec<f64> = Vec::with_capacity(by_y.len());
    for &r in &scan.radii {
        let half = 0.5 * r;
        let mut min_count = usize::MAX;
        for &ox in &offsets {
            let (lo, hi) = (centre.re + ox - half, centre.re + ox + half);
            strip.clear();
            strip.extend(by_y.iter().filter(|p| p.re >= lo && p.re <= hi).map(|p| p.im));
            for &oy in &offsets {
                let (ylo, yhi) = (centre.im + oy - half, centre.im + oy + half);
                let start = strip.partition_point(|&y| y < ylo);
                let end = strip.partition_point(|&y| y <= yhi);
                min_count = min_count.min(end - start);
            }
        }
        best = best.min(min_count as f64 / (r * r));
    }
    Ok(best)
}

/// Minimum pairwise distance, by grid bucketing with cell doubling.
pub fn separation(points: &PointSet) -> Result<f64> {
    let pts = points.points();
    if pts.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: pts.len(),
        });
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in pts {
        x0 = x0.min(p.re);
        x1 = x1.max(p.re);
        y0 = y0.min(p.im);
        y1 = y1.max(p.im);
    }
    let n = pts.len() as f64;
    let area = (x1 - x0) * (y1 - y0);
    let mut cell = if area > 0.0 {
        (area / n).sqrt()
    } else {
        (x1 - x0).max(y1 - y0) / n
    };
    if !(cell > 0.0) || !cell.is_finite() {
        cell = 1.0;
    }
    loop {
        let key = |p: &Complex64| ((p.re / cell).floor() as i64, (p.im / cell).floor() as i64);
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::with_capacity(pts.len());
        for (i, p) in pts.iter().enumerate() {
            buckets.entry(key(p)).or_default().push(i);
        }
        let mut best = f64::INFINITY;
        for (i, p) in pts.iter().enumerate() {
            let (cx, cy) = key(p);
            for dx in -1..=1i64 {
                for dy in -1..=1i64 {
                    let k = (cx.saturating_add(dx), cy.saturating_add(dy));
                    if let Some(ids) = buckets.get(&k) {
                        for &j in ids {
                            if j > i {
                                best = best.min((pts[j] - p).norm());
                            }
                        }
                    }
                }
            }
        }
        // Pairs closer than one cell always share a 3×3 neighbourhood.
        if best <= cell {
            return Ok(best);
        }
        cell *= 2.0;
    }
}
