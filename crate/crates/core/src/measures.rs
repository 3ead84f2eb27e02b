//! Jump measures supported on the closed unit ball and their truncated
//! second-moment functionals.
//!
//! Three families are supported:
//!
//! * [`AtomMeasure`] — finitely many atoms at explicit `f64` positions;
//! * [`RadialPowerMeasure`] — density `c · u^{-1-alpha} du` along finitely
//!   many fixed directions, `u ∈ (0, 1]`;
//! * [`NestedAtomMeasure`] — atoms whose radii and masses are
//!   [`NestedLogNumber`]s, far outside `f64` range; all arithmetic on them
//!   happens on logarithms.
//!
//! The central functionals: the *inclusive truncated second moment*
//! `M(t) = ∫_{|y| <= t} y yᵀ dΠ`, its largest eigenvalue (written
//! `variance_sup` here), the direction-wise *projected* variant
//! `sup_{|z|=1} ∫_{|<y,z>| <= t} <y,z>² dΠ`, the tail mass `Π{|y| > x}`,
//! the truncated third absolute moment, and the drift compensator.

use nalgebra::{DMatrix, DVector};

use crate::logdomain::{log_diff_exp, LogSumAcc};
use crate::nested::NestedLogNumber;
use crate::search;
use crate::{ensure_domain, Error, Result};

/// Relative slack applied to truncation thresholds when evaluating candidate
/// directions that sit exactly on an activity boundary `|<y,z>| = t`: the
/// supremum is attained *inclusively*, and floating-point rounding must not
/// drop the boundary atom.
const BOUNDARY_TOLERANCE: f64 = 4e-12;

// ---------------------------------------------------------------------------
// Moment matrices
// ---------------------------------------------------------------------------

/// A symmetric positive semi-definite moment matrix at truncation level `t`.
#[derive(Debug, Clone)]
pub struct MomentMatrix {
    level: f64,
    matrix: DMatrix<f64>,
}

impl MomentMatrix {
    pub fn new(level: f64, matrix: DMatrix<f64>) -> Result<Self> {
        ensure_domain(level > 0.0, || format!("truncation level must be positive, got {level}"))?;
        ensure_domain(matrix.is_square(), || "moment matrix must be square".into())?;
        let scale = matrix.amax().max(1e-300);
        for i in 0..matrix.nrows() {
            for j in 0..i {
                if (matrix[(i, j)] - matrix[(j, i)]).abs() > 1e-9 * scale {
                    return Err(Error::Invariant(format!(
                        "moment matrix not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::Range("moment matrix has non-finite entries".into()));
        }
        Ok(MomentMatrix { level, matrix })
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    /// Largest eigenvalue (the variance functional) and its direction.
    pub fn top_eigenpair(&self) -> (f64, DVector<f64>) {
        search::top_eigenpair(&self.matrix)
    }

    /// Symmetric PSD square root. Eigenvalues slightly negative from rounding
    /// (within `1e-12` of the top one) are clamped to zero; anything worse is
    /// an error.
    pub fn sqrt_psd(&self) -> Result<MomentMatrix> {
        let sym = nalgebra::SymmetricEigen::new(self.matrix.clone());
        let top = sym.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
        let tol = 1e-12 * top.max(1e-300);
        let mut vals = sym.eigenvalues.clone();
        for v in vals.iter_mut() {
            if *v < -tol {
                return Err(Error::Invariant(format!(
                    "matrix is not positive semi-definite: eigenvalue {v}"
                )));
            }
            *v = v.max(0.0).sqrt();
        }
        let root = &sym.eigenvectors * DMatrix::from_diagonal(&vals) * sym.eigenvectors.transpose();
        // Symmetrize to kill rounding asymmetry before revalidation.
        let root = (&root + root.transpose()) * 0.5;
        MomentMatrix::new(self.level, root)
    }
}

/// A moment matrix represented as `exp(log_scale) * matrix`, for measures
/// whose magnitudes overflow `f64`.
#[derive(Debug, Clone)]
pub struct ScaledMatrix {
    pub log_scale: f64,
    pub matrix: DMatrix<f64>,
}

impl ScaledMatrix {
    /// Log of the largest eigenvalue, with its direction.
    pub fn log_top_eigenpair(&self) -> (f64, DVector<f64>) {
        let (lam, v) = search::top_eigenpair(&self.matrix);
        (self.log_scale + lam.max(0.0).ln(), v)
    }

    pub fn log_trace(&self) -> f64 {
        self.log_scale + self.matrix.trace().max(0.0).ln()
    }
}

// ---------------------------------------------------------------------------
// Measure variants
// ---------------------------------------------------------------------------

/// A point mass of the jump measure.
#[derive(Debug, Clone)]
pub struct Atom {
    pub position: DVector<f64>,
    pub mass: f64,
}

/// Finitely many atoms inside the closed unit ball (origin excluded).
#[derive(Debug, Clone)]
pub struct AtomMeasure {
    dim: usize,
    atoms: Vec<Atom>,
}

impl AtomMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        ensure_domain(!atoms.is_empty(), || "measure needs at least one atom".into())?;
        let dim = atoms[0].position.len();
        for (i, a) in atoms.iter().enumerate() {
            ensure_domain(a.position.len() == dim, || {
                format!("atom {i} has dimension {} != {dim}", a.position.len())
            })?;
            let r = a.position.norm();
            ensure_domain(r.is_finite() && r > 0.0 && r <= 1.0, || {
                format!("atom {i} must lie in the punctured unit ball, |y| = {r}")
            })?;
            ensure_domain(a.mass.is_finite() && a.mass > 0.0, || {
                format!("atom {i} must have positive finite mass, got {}", a.mass)
            })?;
        }
        Ok(AtomMeasure { dim, atoms })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }
}

/// One direction of a radial power-law measure.
#[derive(Debug, Clone)]
pub struct Ray {
    pub direction: DVector<f64>,
    pub weight: f64,
}

/// Measure with density `weight · c · u^{-1-alpha} du` on each ray
/// `{u · direction : 0 < u <= 1}`.
#[derive(Debug, Clone)]
pub struct RadialPowerMeasure {
    dim: usize,
    alpha: f64,
    coefficient: f64,
    rays: Vec<Ray>,
}

impl RadialPowerMeasure {
    pub fn new(alpha: f64, coefficient: f64, rays: Vec<Ray>) -> Result<Self> {
        ensure_domain(alpha > 0.0 && alpha < 2.0, || {
            format!("radial exponent must lie in (0, 2), got {alpha}")
        })?;
        ensure_domain(coefficient.is_finite() && coefficient > 0.0, || {
            format!("radial coefficient must be positive, got {coefficient}")
        })?;
        ensure_domain(!rays.is_empty(), || "radial measure needs at least one ray".into())?;
        let dim = rays[0].direction.len();
        let mut normed = Vec::with_capacity(rays.len());
        for (i, r) in rays.into_iter().enumerate() {
            ensure_domain(r.direction.len() == dim, || {
                format!("ray {i} has dimension {} != {dim}", r.direction.len())
            })?;
            let n = r.direction.norm();
            ensure_domain(n.is_finite() && n > 1e-12, || format!("ray {i} direction is null"))?;
            ensure_domain(r.weight.is_finite() && r.weight > 0.0, || {
                format!("ray {i} weight must be positive, got {}", r.weight)
            })?;
            normed.push(Ray {
                direction: r.direction / n,
                weight: r.weight,
            });
        }
        Ok(RadialPowerMeasure {
            dim,
            alpha,
            coefficient,
            rays: normed,
        })
    }

    /// Symmetric one-dimensional measure `c |u|^{-1-alpha} du` on `[-1, 1] \ {0}`.
    pub fn symmetric_line(alpha: f64, coefficient: f64) -> Result<Self> {
        Self::new(
            alpha,
            coefficient,
            vec![
                Ray {
                    direction: DVector::from_vec(vec![1.0]),
                    weight: 1.0,
                },
                Ray {
                    direction: DVector::from_vec(vec![-1.0]),
                    weight: 1.0,
                },
            ],
        )
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    /// `Σ_rays w · dir dirᵀ` — the angular part of all moment integrals.
    fn angular_matrix(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in &self.rays {
            m += &r.direction * r.direction.transpose() * r.weight;
        }
        m
    }

    fn total_weight(&self) -> f64 {
        self.rays.iter().map(|r| r.weight).sum()
    }
}

/// An atom with radius and mass outside `f64` range.
#[derive(Debug, Clone)]
pub struct NestedAtom {
    pub direction: DVector<f64>,
    pub radius: NestedLogNumber,
    pub mass: NestedLogNumber,
}

/// Atomic measure with nested-log radii/masses; all moment arithmetic is
/// performed on logarithms. Requires `ln(radius)` and `ln(mass)` to be finite
/// `f64`s (radii are representable up to iterated-log coordinates ~709.8).
///
/// Precision contract: the cached `ln` coordinates are `f64`s, i.e. carry
/// *relative* precision ~1e-16. At astronomic magnitudes the absolute slack
/// in a log coordinate can dwarf O(1) structure, so any identity that relies
/// on exact cancellation between atoms (telescoping sums, sharp variance
/// bounds) must be evaluated by the construction that produced the atoms,
/// from its O(1)-scale internal quantities — not by re-combining these logs.
#[derive(Debug, Clone)]
pub struct NestedAtomMeasure {
    dim: usize,
    atoms: Vec<NestedAtom>,
    /// Cached `(ln radius, ln mass)` per atom, sorted by decreasing radius.
    logs: Vec<(f64, f64)>,
}

impl NestedAtomMeasure {
    pub fn new(mut atoms: Vec<NestedAtom>) -> Result<Self> {
        ensure_domain(!atoms.is_empty(), || "measure needs at least one atom".into())?;
        let dim = atoms[0].direction.len();
        for (i, a) in atoms.iter_mut().enumerate() {
            ensure_domain(a.direction.len() == dim, || {
                format!("atom {i} has dimension {} != {dim}", a.direction.len())
            })?;
            let n = a.direction.norm();
            ensure_domain(n.is_finite() && n > 1e-12, || format!("atom {i} direction is null"))?;
            a.direction /= n;
            ensure_domain(a.radius.ln_value() <= 0.0, || {
                format!("atom {i} radius must be <= 1")
            })?;
            ensure_domain(a.radius.ln_value().is_finite(), || {
                format!(
                    "atom {i} radius has non-representable logarithm (iterated-log coordinate beyond ~709.8)"
                )
            })?;
            ensure_domain(a.mass.ln_value().is_finite(), || {
                format!("atom {i} mass has non-representable logarithm")
            })?;
        }
        atoms.sort_by(|a, b| b.radius.total_cmp(&a.radius));
        for w in atoms.windows(2) {
            ensure_domain(
                w[0].radius.ln_value() > w[1].radius.ln_value(),
                || "atom radii must be strictly distinct".into(),
            )?;
        }
        let logs = atoms
            .iter()
            .map(|a| (a.radius.ln_value(), a.mass.ln_value()))
            .collect();
        Ok(NestedAtomMeasure { dim, atoms, logs })
    }

    pub fn atoms(&self) -> &[NestedAtom] {
        &self.atoms
    }
}

/// A jump measure on the closed unit ball.
#[derive(Debug, Clone)]
pub enum LevyMeasure {
    Atoms(AtomMeasure),
    RadialPower(RadialPowerMeasure),
    NestedAtoms(NestedAtomMeasure),
}

/// Log-coordinate view of one point mass: `(direction, ln radius, ln mass)`.
#[derive(Debug, Clone)]
pub struct LogAtom {
    pub direction: DVector<f64>,
    pub log_radius: f64,
    pub log_mass: f64,
}

impl LevyMeasure {
    pub fn dim(&self) -> usize {
        match self {
            LevyMeasure::Atoms(m) => m.dim,
            LevyMeasure::RadialPower(m) => m.dim,
            LevyMeasure::NestedAtoms(m) => m.dim,
        }
    }

    /// Atom-like measures expose their point masses in log coordinates.
    pub fn log_atoms(&self) -> Option<Vec<LogAtom>> {
        match self {
            LevyMeasure::Atoms(m) => Some(
                m.atoms
                    .iter()
                    .map(|a| {
                        let r = a.position.norm();
                        LogAtom {
                            direction: &a.position / r,
                            log_radius: r.ln(),
                            log_mass: a.mass.ln(),
                        }
                    })
                    .collect(),
            ),
            LevyMeasure::NestedAtoms(m) => Some(
                m.atoms
                    .iter()
                    .zip(&m.logs)
                    .map(|(a, &(lr, lm))| LogAtom {
                        direction: a.direction.clone(),
                        log_radius: lr,
                        log_mass: lm,
                    })
                    .collect(),
            ),
            LevyMeasure::RadialPower(_) => None,
        }
    }

    // -- tail mass ----------------------------------------------------------

    /// `Π{ |y| > x }` for `x > 0`. May overflow to `+inf` for nested measures.
    pub fn tail_mass(&self, x: f64) -> f64 {
        assert!(x > 0.0, "tail mass needs a positive threshold");
        match self.log_tail_mass(x.ln()) {
            Some(l) => l.exp(),
            None => 0.0,
        }
    }

    /// `ln Π{ |y| > e^(log_x) }`, or `None` when the tail is empty.
    pub fn log_tail_mass(&self, log_x: f64) -> Option<f64> {
        match self {
            LevyMeasure::Atoms(_) | LevyMeasure::NestedAtoms(_) => {
                let mut acc = LogSumAcc::new();
                for a in self.log_atoms().unwrap() {
                    if a.log_radius > log_x {
                        acc.add(a.log_mass);
                    }
                }
                acc.is_positive().then(|| acc.log_total())
            }
            LevyMeasure::RadialPower(m) => {
                if log_x >= 0.0 {
                    return None;
                }
                // Σ w (c/alpha) (x^{-alpha} - 1), in logs.
                let lead = (m.total_weight() * m.coefficient / m.alpha).ln();
                Some(lead + log_diff_exp(-m.alpha * log_x, 0.0))
            }
        }
    }

    // -- truncated second moment ---------------------------------------------

    /// Inclusive truncated second-moment matrix `M(t) = ∫_{|y| <= t} y yᵀ dΠ`
    /// in plain `f64`. Errors when entries cannot be represented.
    pub fn trunc_second_moment(&self, t: f64) -> Result<MomentMatrix> {
        ensure_domain(t > 0.0 && t.is_finite(), || {
            format!("truncation level must be positive and finite, got {t}")
        })?;
        match self.log_second_moment_scaled(t.ln()) {
            None => MomentMatrix::new(t, DMatrix::zeros(self.dim(), self.dim())),
            Some(s) => {
                let factor = s.log_scale.exp();
                if !factor.is_finite() {
                    return Err(Error::Range(format!(
                        "second moment at t={t} has log-scale {}, not representable in f64",
                        s.log_scale
                    )));
                }
                MomentMatrix::new(t, s.matrix * factor)
            }
        }
    }

    /// Scaled form of `M(e^(log_t))`: works for any magnitude. `None` when
    /// there is no mass at radii `<= e^(log_t)`.
    pub fn log_second_moment_scaled(&self, log_t: f64) -> Option<ScaledMatrix> {
        match self {
            LevyMeasure::Atoms(_) | LevyMeasure::NestedAtoms(_) => {
                let view = self.log_atoms().unwrap();
                let included: Vec<&LogAtom> =
                    view.iter().filter(|a| a.log_radius <= log_t).collect();
                if included.is_empty() {
                    return None;
                }
                let log_scale = included
                    .iter()
                    .map(|a| a.log_mass + 2.0 * a.log_radius)
                    .fold(f64::NEG_INFINITY, f64::max);
                let dim = self.dim();
                let mut m = DMatrix::zeros(dim, dim);
                for a in included {
                    let w = (a.log_mass + 2.0 * a.log_radius - log_scale).exp();
                    if w > 0.0 {
                        m += &a.direction * a.direction.transpose() * w;
                    }
                }
                Some(ScaledMatrix {
                    log_scale,
                    matrix: m,
                })
            }
            LevyMeasure::RadialPower(m) => {
                // M(t) = min(t,1)^{2-alpha} · (c/(2-alpha)) Σ w dir dirᵀ.
                let cap = log_t.min(0.0);
                let log_scale = (2.0 - m.alpha) * cap + (m.coefficient / (2.0 - m.alpha)).ln();
                Some(ScaledMatrix {
                    log_scale,
                    matrix: m.angular_matrix(),
                })
            }
        }
    }

    /// Largest eigenvalue of `M(t)` (plain `f64`; underflows/overflows honestly).
    pub fn variance_sup(&self, t: f64) -> f64 {
        match self.log_variance_sup(t.ln()) {
            Some(l) => l.exp(),
            None => 0.0,
        }
    }

    /// `ln` of the largest eigenvalue of `M(e^(log_t))`; `None` when `M = 0`.
    pub fn log_variance_sup(&self, log_t: f64) -> Option<f64> {
        self.log_second_moment_scaled(log_t)
            .map(|s| s.log_top_eigenpair().0)
    }

    /// Trace of `M(t)` (the full truncated second moment of `|y|`).
    pub fn second_moment_trace(&self, t: f64) -> f64 {
        match self.log_second_moment_trace(t.ln()) {
            Some(l) => l.exp(),
            None => 0.0,
        }
    }

    pub fn log_second_moment_trace(&self, log_t: f64) -> Option<f64> {
        self.log_second_moment_scaled(log_t).map(|s| s.log_trace())
    }

    // -- third moment ---------------------------------------------------------

    /// `∫_{|y| <= t} |y|³ dΠ` in plain `f64`.
    pub fn third_moment_ball(&self, t: f64) -> f64 {
        match self.log_third_moment_ball(t.ln()) {
            Some(l) => l.exp(),
            None => 0.0,
        }
    }

    pub fn log_third_moment_ball(&self, log_t: f64) -> Option<f64> {
        match self {
            LevyMeasure::Atoms(_) | LevyMeasure::NestedAtoms(_) => {
                let mut acc = LogSumAcc::new();
                for a in self.log_atoms().unwrap() {
                    if a.log_radius <= log_t {
                        acc.add(a.log_mass + 3.0 * a.log_radius);
                    }
                }
                acc.is_positive().then(|| acc.log_total())
            }
            LevyMeasure::RadialPower(m) => {
                // Σ w c min(t,1)^{3-alpha} / (3-alpha).
                let cap = log_t.min(0.0);
                Some(
                    (m.total_weight() * m.coefficient / (3.0 - m.alpha)).ln()
                        + (3.0 - m.alpha) * cap,
                )
            }
        }
    }

    // -- drift compensator -----------------------------------------------------

    /// `gamma - ∫_{b < |y| <= 1} y dΠ`: the deterministic drift of the process
    /// once jumps above `b` are removed. Errors when the integral overflows.
    pub fn drift_compensator(&self, gamma: &DVector<f64>, b: f64) -> Result<DVector<f64>> {
        ensure_domain(gamma.len() == self.dim(), || {
            format!("drift has dimension {}, measure has {}", gamma.len(), self.dim())
        })?;
        ensure_domain(b > 0.0 && b <= 1.0, || {
            format!("cutoff must lie in (0, 1], got {b}")
        })?;
        let mut out = gamma.clone();
        match self {
            LevyMeasure::Atoms(_) | LevyMeasure::NestedAtoms(_) => {
                let log_b = b.ln();
                for a in self.log_atoms().unwrap() {
                    if a.log_radius > log_b {
                        let term = (a.log_mass + a.log_radius).exp();
                        if !term.is_finite() {
                            return Err(Error::Range(format!(
                                "compensator term overflows: ln(m·r) = {}",
                                a.log_mass + a.log_radius
                            )));
                        }
                        out -= &a.direction * term;
                    }
                }
            }
            LevyMeasure::RadialPower(m) => {
                // ∫_b^1 u · c u^{-1-alpha} du per unit weight.
                let integral = if (m.alpha - 1.0).abs() < 1e-12 {
                    m.coefficient * (1.0 / b).ln()
                } else {
                    m.coefficient * (1.0 - b.powf(1.0 - m.alpha)) / (1.0 - m.alpha)
                };
                for r in &m.rays {
                    out -= &r.direction * (r.weight * integral);
                }
            }
        }
        Ok(out)
    }

    /// Symmetric PSD square root of `M(t)`.
    pub fn second_moment_sqrt(&self, t: f64) -> Result<MomentMatrix> {
        self.trunc_second_moment(t)?.sqrt_psd()
    }
}

// ---------------------------------------------------------------------------
// Projected variance supremum
// ---------------------------------------------------------------------------

/// Options for the projected-variance direction search.
#[derive(Debug, Clone)]
pub struct ProjectedSupOptions {
    /// Seed directions on the sphere (per antipodal pair).
    pub seeds: usize,
    /// Local refinement rounds per retained seed.
    pub refine_rounds: usize,
    /// Retained top seeds for refinement.
    pub top_seeds: usize,
}

impl Default for ProjectedSupOptions {
    fn default() -> Self {
        ProjectedSupOptions {
            seeds: 4096,
            refine_rounds: 120,
            top_seeds: 16,
        }
    }
}

/// Result of the projected-variance search, in log form.
#[derive(Debug, Clone)]
pub struct ProjectedSup {
    /// `ln sup_z ∫_{|<y,z>| <= t} <y,z>² dΠ`; `-inf` when the measure
    /// projects to zero everywhere (impossible for valid measures).
    pub log_value: f64,
    /// A maximizing unit direction.
    pub direction: DVector<f64>,
}

impl ProjectedSup {
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }
}

impl LevyMeasure {
    /// Direction-wise truncated second moment supremum
    /// `sup_{|z|=1} ∫_{|<y,z>| <= t} <y,z>² dΠ` (plain scale).
    pub fn projected_variance_sup(&self, t: f64, opts: &ProjectedSupOptions) -> Result<ProjectedSup> {
        ensure_domain(t > 0.0 && t.is_finite(), || {
            format!("truncation level must be positive and finite, got {t}")
        })?;
        self.log_projected_variance_sup(t.ln(), opts)
    }

    /// Same functional with the truncation level given as `ln t`.
    pub fn log_projected_variance_sup(
        &self,
        log_t: f64,
        opts: &ProjectedSupOptions,
    ) -> Result<ProjectedSup> {
        let dim = self.dim();
        if dim == 1 {
            // On the line the projection is the identity: the functional
            // coincides with the truncated second moment itself.
            let log_value = self.log_variance_sup(log_t).unwrap_or(f64::NEG_INFINITY);
            return Ok(ProjectedSup {
                log_value,
                direction: DVector::from_vec(vec![1.0]),
            });
        }

        let mut best = self.generic_direction_search(log_t, opts);

        if dim == 2 {
            if let LevyMeasure::Atoms(m) = self {
                let exact = exact_planar_sweep(m, log_t);
                if exact.log_value > best.log_value {
                    best = exact;
                }
            }
        }
        Ok(best)
    }

    /// Log objective `z -> ln ∫_{|<y,z>| <= t} <y,z>² dΠ` with the inclusive
    /// boundary tolerance.
    fn log_projection_objective(&self, z: &DVector<f64>, log_t: f64) -> f64 {
        let tol = BOUNDARY_TOLERANCE.ln_1p();
        match self {
            LevyMeasure::Atoms(_) | LevyMeasure::NestedAtoms(_) => {
                let mut acc = LogSumAcc::new();
                for a in self.log_atoms().unwrap() {
                    let p = a.direction.dot(z).abs();
                    if p == 0.0 {
                        continue;
                    }
                    let log_proj = a.log_radius + p.ln();
                    if log_proj <= log_t + tol {
                        acc.add(a.log_mass + 2.0 * log_proj);
                    }
                }
                acc.log_total()
            }
            LevyMeasure::RadialPower(m) => {
                // Per ray with projection p = |<dir,z>|:
                //   contribution = (c/(2-alpha)) p² min(1, t/p)^{2-alpha}
                // (radial truncation at u0 = min(1, t/p), so that |<y,z>| <= t).
                let mut acc = LogSumAcc::new();
                for r in &m.rays {
                    let p = r.direction.dot(z).abs();
                    if p == 0.0 {
                        continue;
                    }
                    let lp = p.ln();
                    let log_u0 = (log_t - lp).min(0.0);
                    acc.add(
                        (r.weight * m.coefficient / (2.0 - m.alpha)).ln()
                            + 2.0 * lp
                            + (2.0 - m.alpha) * log_u0,
                    );
                }
                acc.log_total()
            }
        }
    }

    fn generic_direction_search(&self, log_t: f64, opts: &ProjectedSupOptions) -> ProjectedSup {
        let dim = self.dim();
        let objective = |z: &DVector<f64>| self.log_projection_objective(z, log_t);

        // Seed set: sphere grid, the top eigen-direction of the matrix form
        // (guarantees the result dominates the plain variance functional),
        // and every atom/ray direction.
        let mut seeds = search::seed_grid(dim, opts.seeds);
        if let Some(s) = self.log_second_moment_scaled(log_t) {
            seeds.push(s.log_top_eigenpair().1);
        }
        match self {
            LevyMeasure::RadialPower(m) => {
                for r in &m.rays {
                    seeds.push(r.direction.clone());
                }
            }
            _ => {
                for a in self.log_atoms().unwrap() {
                    seeds.push(a.direction.clone());
                }
            }
        }

        let mut scored: Vec<(f64, DVector<f64>)> =
            seeds.into_iter().map(|z| (objective(&z), z)).collect();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0));
        scored.truncate(opts.top_seeds.max(1));

        let mut best_val = f64::NEG_INFINITY;
        let mut best_dir = scored[0].1.clone();
        for (_, seed) in &scored {
            let (z, v) = search::pattern_search_sphere(&objective, seed, 0.25, opts.refine_rounds);
            if v > best_val {
                best_val = v;
                best_dir = z;
            }
        }

        // Snap onto nearby activity boundaries: the maximum of a truncated
        // quadratic frequently sits exactly where an atom enters/leaves.
        let snap_targets: Vec<(DVector<f64>, f64)> = match self {
            LevyMeasure::RadialPower(m) => {
                if log_t < 0.0 {
                    m.rays
                        .iter()
                        .map(|r| (r.direction.clone(), log_t.exp()))
                        .collect()
                } else {
                    Vec::new()
                }
            }
            _ => self
                .log_atoms()
                .unwrap()
                .iter()
                .filter(|a| a.log_radius > log_t)
                .map(|a| (a.direction.clone(), (log_t - a.log_radius).exp()))
                .collect(),
        };
        for (dir, tau) in snap_targets {
            if !(tau > 0.0 && tau < 1.0) {
                continue;
            }
            for cand in search::snap_to_boundary(&best_dir, &dir, tau) {
                let v = objective(&cand);
                if v > best_val {
                    best_val = v;
                    best_dir = cand;
                }
            }
        }

        ProjectedSup {
            log_value: best_val,
            direction: best_dir,
        }
    }
}

/// Exact planar maximization for plain atomic measures: between consecutive
/// activity boundaries the active set is constant and the objective is a
/// second-order trigonometric polynomial whose maximum is closed-form.
fn exact_planar_sweep(m: &AtomMeasure, log_t: f64) -> ProjectedSup {
    let t = log_t.exp();
    let polar: Vec<(f64, f64, f64)> = m
        .atoms
        .iter()
        .map(|a| {
            let r = a.position.norm();
            (a.position[1].atan2(a.position[0]), r, a.mass)
        })
        .collect();

    // Activity boundaries |r cos(theta - phi)| = t for atoms with r > t.
    let tau = std::f64::consts::TAU;
    let mut events: Vec<f64> = Vec::new();
    for &(phi, r, _) in &polar {
        if r > t {
            let a = (t / r).clamp(-1.0, 1.0).acos();
            for cand in [phi + a, phi - a, phi + std::f64::consts::PI - a, phi - std::f64::consts::PI + a]
            {
                events.push(cand.rem_euclid(tau));
            }
        }
    }
    events.sort_by(f64::total_cmp);
    events.dedup_by(|a, b| (*a - *b).abs() < 1e-13);

    let eval = |theta: f64| -> f64 {
        let mut sum = 0.0;
        for &(phi, r, mass) in &polar {
            let proj = r * (theta - phi).cos();
            if proj.abs() <= t * (1.0 + BOUNDARY_TOLERANCE) {
                sum += mass * proj * proj;
            }
        }
        sum
    };

    let mut candidates: Vec<f64> = events.clone();
    let arcs: Vec<(f64, f64)> = if events.is_empty() {
        vec![(0.0, tau)]
    } else {
        let mut v: Vec<(f64, f64)> = events.windows(2).map(|w| (w[0], w[1])).collect();
        v.push((*events.last().unwrap(), events[0] + tau));
        v
    };
    for (lo, hi) in arcs {
        let mid = 0.5 * (lo + hi);
        candidates.push(mid);
        // Active set on the open arc, decided at the midpoint with a strict
        // comparison (boundaries only occur at arc endpoints).
        let mut a0 = 0.0;
        let mut c2 = 0.0;
        let mut s2 = 0.0;
        for &(phi, r, mass) in &polar {
            if (r * (mid - phi).cos()).abs() <= t {
                let w = mass * r * r * 0.5;
                a0 += w;
                c2 += w * (2.0 * phi).cos();
                s2 += w * (2.0 * phi).sin();
            }
        }
        let _ = a0;
        // Interior stationary maxima of A0 + C cos 2θ + S sin 2θ.
        let psi = s2.atan2(c2);
        for k in -2..=2 {
            let theta = 0.5 * (psi + (k as f64) * tau);
            if theta > lo && theta < hi {
                candidates.push(theta);
            }
        }
    }

    let mut best_theta = 0.0;
    let mut best = f64::NEG_INFINITY;
    for theta in candidates {
        let v = eval(theta);
        if v > best {
            best = v;
            best_theta = theta;
        }
    }
    ProjectedSup {
        log_value: best.ln(),
        direction: DVector::from_vec(vec![best_theta.cos(), best_theta.sin()]),
    }
}

#[cfg(test)]
#[path = "measures_tests.rs"]
mod tests;
