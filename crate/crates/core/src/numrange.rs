//! Numerical-range geometry over pairs (B, B^Gamma) of symmetric matrices:
//! support evaluations, boundary sweeps, and the two endpoint searches that
//! certify where the diagonal line meets W(B + iB^Gamma). A projected
//! subgradient method covers the multipartite affine generalization.
//!
//! Everything here is real arithmetic: for symmetric B and B^Gamma the
//! Hermitian part of e^{i theta} (B + iB^Gamma) equals
//! cos(theta) B - sin(theta) B^Gamma, a real symmetric matrix, so every
//! support function value is an extremal eigenvalue of a real matrix.

use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::eigen::{extreme_eigenpair, EigenPair, SolverConfig, Which};
use crate::error::{Error, Result};
use crate::matrix::RealMatrix;
use crate::shape::{SubsystemSet, TensorShape};
use crate::tensor::{bipartite_partial_transpose, partial_transpose};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Min,
    Max,
}

/// Endpoint algorithm selector used by applications and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Angle,
    Ternary,
    Auto,
}

#[derive(Debug, Clone, Serialize)]
pub struct RangeConfig {
    pub eigen: SolverConfig,
    /// Stop the angle bisection once the bracketing tangent normals differ
    /// by no more than this (radians).
    pub angle_tol: f64,
    /// Stop any endpoint search once outer - inner drops below this times
    /// the matrix scale.
    pub value_tol: f64,
    /// Largest admissible |p| during bracket expansion; beyond it the search
    /// reports an unbounded-direction suspicion.
    pub p_limit: f64,
    /// Relative agreement required between quadratic forms before a joint
    /// witness is accepted as an inner point.
    pub agree_tol: f64,
    /// Subgradient iteration cap per matrix in the affine family.
    pub subgradient_iters: usize,
}

impl Default for RangeConfig {
    fn default() -> Self {
        Self {
            eigen: SolverConfig::default(),
            angle_tol: 1e-12,
            value_tol: 1e-9,
            p_limit: 1e6,
            agree_tol: 1e-8,
            subgradient_iters: 500,
        }
    }
}

/// One boundary probe of W(B + iB^Gamma): the support value at angle theta,
/// the witness vector, and the boundary point it generates.
#[derive(Debug, Clone, Serialize)]
pub struct SupportEvaluation {
    pub theta: f64,
    pub support_value: f64,
    pub witness: Vec<f64>,
    /// (x^T B x, x^T B^Gamma x).
    pub point: (f64, f64),
    pub certified: bool,
}

/// A certified endpoint of W^{1+i}(B) (or of its multipartite analogue).
///
/// `outer` is the certificate: no admissible value lies beyond it. `inner`
/// is attained by a concrete witness (directly on the diagonal or by a chord
/// between two boundary points), hence lies inside the set; it is absent
/// when no witness met the agreement tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct DiagonalBound {
    pub kind: BoundKind,
    pub inner: Option<f64>,
    pub outer: f64,
    /// outer - inner for max, inner - outer for min; None without an inner.
    pub gap: Option<f64>,
    /// Number of eigenproblems solved.
    pub evaluations: usize,
    /// False when any eigensolve returned a non-converged iterate.
    pub certified: bool,
    /// False when a search guard (p_limit, iteration cap) was hit.
    pub converged: bool,
}

impl DiagonalBound {
    fn negated(self) -> Self {
        Self {
            kind: match self.kind {
                BoundKind::Max => BoundKind::Min,
                BoundKind::Min => BoundKind::Max,
            },
            inner: self.inner.map(|v| -v),
            outer: -self.outer,
            gap: self.gap,
            evaluations: self.evaluations,
            certified: self.certified,
            converged: self.converged,
        }
    }
}

/// Symmetric matrices Gamma_{S_j}(B) with affine weights summing to one.
#[derive(Debug, Clone)]
pub struct AffineFamily {
    matrices: Vec<RealMatrix>,
    weights: Vec<f64>,
}

impl AffineFamily {
    pub fn new(matrices: Vec<RealMatrix>, weights: Vec<f64>) -> Result<Self> {
        if matrices.is_empty() || matrices.len() != weights.len() {
            return Err(Error::InvalidArgument(
                "affine family needs one weight per matrix".into(),
            ));
        }
        let dim = matrices[0].dim();
        if matrices.iter().any(|m| m.dim() != dim) {
            return Err(Error::InvalidArgument(
                "affine family matrices must share dimension".into(),
            ));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-14 {
            return Err(Error::InvalidArgument(format!(
                "affine weights sum to {sum}, expected 1"
            )));
        }
        Ok(Self { matrices, weights })
    }

    pub fn matrices(&self) -> &[RealMatrix] {
        &self.matrices
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn combine(&self) -> RealMatrix {
        let terms: Vec<(f64, &RealMatrix)> = self
            .weights
            .iter()
            .copied()
            .zip(self.matrices.iter())
            .collect();
        RealMatrix::linear_combination(&terms).expect("validated dimensions")
    }
}

/// Boundary sweep: inner polygon vertices (the evaluations, in angle order)
/// and the vertices of the outer polygon cut out by the supporting lines.
#[derive(Debug, Clone, Serialize)]
pub struct BoundarySweep {
    pub evaluations: Vec<SupportEvaluation>,
    pub outer_polygon: Vec<(f64, f64)>,
}

/// Eigenvalue intervals of B and of each single-factor partial transpose.
#[derive(Debug, Clone, Serialize)]
pub struct TrivialBounds {
    /// (lambda_min, lambda_max) of B itself.
    pub base: (f64, f64),
    /// (factor, lambda_min, lambda_max) for each single-subsystem transpose.
    pub transposed: Vec<(usize, f64, f64)>,
}

fn scale_of(mats: &[&RealMatrix]) -> f64 {
    mats.iter().map(|m| m.norm_max()).fold(1.0, f64::max)
}

/// Solves for the top eigenpair, downgrading non-convergence into a usable
/// but non-certified iterate.
fn solve_max(m: &RealMatrix, cfg: &SolverConfig) -> Result<(EigenPair, bool)> {
    match extreme_eigenpair(m, Which::Max, cfg) {
        Ok(pair) => Ok((pair, true)),
        Err(Error::SolverDidNotConverge { best, .. }) => Ok((*best, false)),
        Err(e) => Err(e),
    }
}

/// Evaluates one support probe of the pair (b1, b2) at angle theta.
fn probe_angle(
    b1: &RealMatrix,
    b2: &RealMatrix,
    theta: f64,
    cfg: &RangeConfig,
) -> Result<SupportEvaluation> {
    let m = RealMatrix::linear_combination(&[(theta.cos(), b1), (-theta.sin(), b2)])?;
    let (pair, certified) = solve_max(&m, &cfg.eigen)?;
    let a = b1.quadratic_form(&pair.vector);
    let b = b2.quadratic_form(&pair.vector);
    Ok(SupportEvaluation {
        theta,
        // The certificate side absorbs the eigensolver residual so that the
        // supporting half-plane provably contains the range.
        support_value: pair.value + pair.residual,
        witness: pair.vector,
        point: (a, b),
        certified,
    })
}

/// Boundary point of W(B + iB^Gamma) whose supporting line has normal angle
/// `theta`: the support value is lambda_max(cos(theta) B - sin(theta) B^Gamma)
/// and the point is the witness's pair of quadratic forms.
pub fn support_point(
    b: &RealMatrix,
    bg: &RealMatrix,
    theta: f64,
    cfg: &RangeConfig,
) -> Result<SupportEvaluation> {
    if b.dim() != bg.dim() {
        return Err(Error::InvalidArgument(
            "B and B^Gamma must share dimension".into(),
        ));
    }
    b.require_symmetric()?;
    bg.require_symmetric()?;
    probe_angle(b, bg, theta, cfg)
}

/// Tracks the running certificate (outer) and witness-backed estimate
/// (inner) for the maximal ray coordinate. Chords between the two boundary
/// points closest to the ray from either side stay inside the convex range,
/// so their ray crossing is a valid inner value.
struct EndpointTracker {
    on_tol: f64,
    best_outer: f64,
    best_on: Option<f64>,
    neg: Option<(f64, f64)>,
    pos: Option<(f64, f64)>,
    evaluations: usize,
    certified: bool,
}

impl EndpointTracker {
    fn new(on_tol: f64) -> Self {
        Self {
            on_tol,
            best_outer: f64::INFINITY,
            best_on: None,
            neg: None,
            pos: None,
            evaluations: 0,
            certified: true,
        }
    }

    /// `cross` is the signed offset of the boundary point from the ray,
    /// `ray_coord` its projection onto the ray, `bound` the upper bound on
    /// the endpoint implied by the supporting line (when its normal has a
    /// positive component along the ray).
    fn record(&mut self, cross: f64, ray_coord: f64, bound: Option<f64>, certified: bool) {
        self.evaluations += 1;
        self.certified &= certified;
        if let Some(b) = bound {
            if b < self.best_outer {
                self.best_outer = b;
            }
        }
        if cross.abs() <= self.on_tol {
            self.best_on = Some(match self.best_on {
                Some(v) => v.max(ray_coord),
                None => ray_coord,
            });
        }
        if cross < 0.0 && self.neg.is_none_or(|(c, _)| cross > c) {
            self.neg = Some((cross, ray_coord));
        }
        if cross > 0.0 && self.pos.is_none_or(|(c, _)| cross < c) {
            self.pos = Some((cross, ray_coord));
        }
    }

    fn inner(&self) -> Option<f64> {
        let chord = match (self.neg, self.pos) {
            (Some((c1, r1)), Some((c2, r2))) => {
                let t = c1 / (c1 - c2);
                Some(r1 + t * (r2 - r1))
            }
            _ => None,
        };
        match (self.best_on, chord) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (Some(a), None) => Some(a),
            (None, Some(b)) => Some(b),
            (None, None) => None,
        }
    }

    fn gap(&self) -> f64 {
        match self.inner() {
            Some(i) => self.best_outer - i,
            None => f64::INFINITY,
        }
    }

    fn finish(&self, kind_max: bool, converged: bool) -> DiagonalBound {
        // An inner estimate may poke past the outer certificate by float
        // noise; lowering it is always sound.
        let inner = self.inner().map(|i| i.min(self.best_outer));
        let gap = inner.map(|i| self.best_outer - i);
        let b = DiagonalBound {
            kind: BoundKind::Max,
            inner,
            outer: self.best_outer,
            gap,
            evaluations: self.evaluations,
            certified: self.certified,
            converged,
        };
        if kind_max {
            b
        } else {
            b.negated()
        }
    }
}

/// Maximal c such that c*(u, v) lies in the joint range of (b1, b2), found
/// by bisecting the supporting-line normal angle. The bracket covers the
/// half-circle of normals with positive component along the ray; the sign
/// of the witness point's offset from the ray is monotone across it.
fn angle_endpoint_max(
    b1: &RealMatrix,
    b2: &RealMatrix,
    u: f64,
    v: f64,
    cfg: &RangeConfig,
) -> Result<DiagonalBound> {
    let scale = scale_of(&[b1, b2]);
    let r = u.hypot(v);
    let ray_norm2 = u * u + v * v;

    // Degenerate: the whole range lies on the ray; both endpoints are plain
    // eigenvalues of the ray-projected matrix.
    let off_ray = RealMatrix::linear_combination(&[(v, b1), (-u, b2)])?;
    if off_ray.norm_max() <= 1e-12 * scale * r {
        let m = RealMatrix::linear_combination(&[(u / ray_norm2, b1), (v / ray_norm2, b2)])?;
        let (pair, certified) = solve_max(&m, &cfg.eigen)?;
        return Ok(DiagonalBound {
            kind: BoundKind::Max,
            inner: Some(pair.value),
            outer: pair.value + pair.residual,
            gap: Some(pair.residual),
            evaluations: 1,
            certified,
            converged: true,
        });
    }

    let phi = f64::atan2(-v, u);
    let mut tracker = EndpointTracker::new(1e-10 * scale * r);
    let eval = |theta: f64, tracker: &mut EndpointTracker| -> Result<f64> {
        let e = probe_angle(b1, b2, theta, cfg)?;
        let (a, b) = e.point;
        let cross = a * v - b * u;
        let ray_coord = (a * u + b * v) / ray_norm2;
        // Normals nearly perpendicular to the ray give unusable quotients
        // (rounding in the gain dominates); skip their outer constraint.
        let gain = u * theta.cos() - v * theta.sin();
        let bound = (gain > 1e-9 * r).then(|| e.support_value / gain);
        tracker.record(cross, ray_coord, bound, e.certified);
        Ok(cross)
    };

    let mut lo = phi - FRAC_PI_2;
    let mut hi = phi + FRAC_PI_2;
    // Seed with the perpendicular ends (which fix the bracket sides) and
    // three interior normals including the pure-matrix directions.
    let mut lo_best = lo;
    let mut hi_best = hi;
    for theta in [lo, phi - FRAC_PI_4, phi, phi + FRAC_PI_4, hi] {
        let cross = eval(theta, &mut tracker)?;
        if cross < 0.0 && theta > lo_best && theta < hi_best {
            lo_best = theta;
        }
        if cross >= 0.0 && theta < hi_best && theta > lo_best {
            hi_best = theta;
        }
    }
    lo = lo_best;
    hi = hi_best;

    let mut iterations = 0usize;
    while hi - lo > cfg.angle_tol && tracker.gap() > cfg.value_tol * scale && iterations < 120 {
        let mid = 0.5 * (lo + hi);
        let cross = eval(mid, &mut tracker)?;
        if cross < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    Ok(tracker.finish(true, true))
}

const INVPHI: f64 = 0.618_033_988_749_894_9;

/// Maximal ray coordinate via the eigenvalue optimization: minimizes
/// f(p) = lambda_max(p A1 + (1-p) A2), a convex function of p, by bracket
/// expansion followed by golden-section search.
fn pair_endpoint_max_golden(
    a1: &RealMatrix,
    a2: &RealMatrix,
    cfg: &RangeConfig,
) -> Result<DiagonalBound> {
    let scale = scale_of(&[a1, a2]);

    let off_ray = RealMatrix::linear_combination(&[(1.0, a1), (-1.0, a2)])?;
    if off_ray.norm_max() <= 1e-12 * scale {
        let m = RealMatrix::linear_combination(&[(0.5, a1), (0.5, a2)])?;
        let (pair, certified) = solve_max(&m, &cfg.eigen)?;
        return Ok(DiagonalBound {
            kind: BoundKind::Max,
            inner: Some(pair.value),
            outer: pair.value + pair.residual,
            gap: Some(pair.residual),
            evaluations: 1,
            certified,
            converged: true,
        });
    }

    let mut tracker = EndpointTracker::new(1e-10 * scale);
    let eval = |p: f64, tracker: &mut EndpointTracker| -> Result<f64> {
        let m = RealMatrix::linear_combination(&[(p, a1), (1.0 - p, a2)])?;
        let (pair, certified) = solve_max(&m, &cfg.eigen)?;
        let a = a1.quadratic_form(&pair.vector);
        let b = a2.quadratic_form(&pair.vector);
        tracker.record(a - b, 0.5 * (a + b), Some(pair.value + pair.residual), certified);
        Ok(pair.value)
    };

    let mut a = -1.0;
    let mut b = 2.0;
    let mut fa = eval(a, &mut tracker)?;
    let mut fb = eval(b, &mut tracker)?;
    let mut converged = true;

    // Double the bracket away from whichever end undercuts the interior;
    // convexity keeps the true minimizer inside once both ends dominate.
    let mut x1 = b - INVPHI * (b - a);
    let mut x2 = a + INVPHI * (b - a);
    let mut f1 = eval(x1, &mut tracker)?;
    let mut f2 = eval(x2, &mut tracker)?;
    loop {
        let interior = f1.min(f2);
        if fa < interior && fb < interior {
            break; // flat within noise; golden will settle it
        }
        if fa < interior {
            if a <= -cfg.p_limit {
                converged = false;
                break;
            }
            let w = b - a;
            a -= w;
            fa = eval(a, &mut tracker)?;
        } else if fb < interior {
            if b >= cfg.p_limit {
                converged = false;
                break;
            }
            let w = b - a;
            b += w;
            fb = eval(b, &mut tracker)?;
        } else {
            break;
        }
        x1 = b - INVPHI * (b - a);
        x2 = a + INVPHI * (b - a);
        f1 = eval(x1, &mut tracker)?;
        f2 = eval(x2, &mut tracker)?;
    }

    let mut iterations = 0usize;
    while b - a > 1e-12 * a.abs().max(b.abs()).max(1.0)
        && tracker.gap() > cfg.value_tol * scale
        && iterations < 200
    {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INVPHI * (b - a);
            f1 = eval(x1, &mut tracker)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INVPHI * (b - a);
            f2 = eval(x2, &mut tracker)?;
        }
        iterations += 1;
    }
    Ok(tracker.finish(true, converged))
}

fn endpoint_via(
    engine: impl Fn(&RealMatrix, &RealMatrix, &RangeConfig) -> Result<DiagonalBound>,
    b: &RealMatrix,
    bg: &RealMatrix,
    kind: BoundKind,
    cfg: &RangeConfig,
) -> Result<DiagonalBound> {
    match kind {
        BoundKind::Max => engine(b, bg, cfg),
        BoundKind::Min => {
            let nb = b.scaled(-1.0);
            let nbg = bg.scaled(-1.0);
            Ok(engine(&nb, &nbg, cfg)?.negated())
        }
    }
}

fn bipartite_pair(b: &RealMatrix, shape: &TensorShape) -> Result<RealMatrix> {
    if !shape.is_bipartite() {
        return Err(Error::NotBipartite {
            factors: shape.num_factors(),
        });
    }
    if b.dim() != shape.total_dim() {
        return Err(Error::ShapeMismatch {
            matrix_dim: b.dim(),
            shape_dim: shape.total_dim(),
        });
    }
    b.require_symmetric()?;
    bipartite_partial_transpose(b, shape)
}

/// Endpoint of W^{1+i}(B) by binary search on supporting-line angles,
/// maintaining one boundary point on each side of the diagonal.
pub fn w_diag_angle(
    b: &RealMatrix,
    shape: &TensorShape,
    kind: BoundKind,
    cfg: &RangeConfig,
) -> Result<DiagonalBound> {
    let bg = bipartite_pair(b, shape)?;
    endpoint_via(|x, y, c| angle_endpoint_max(x, y, 1.0, 1.0, c), b, &bg, kind, cfg)
}

/// Endpoint of W^{1+i}(B) by golden-section search over the eigenvalue
/// optimization in p.
pub fn w_diag_ternary(
    b: &RealMatrix,
    shape: &TensorShape,
    kind: BoundKind,
    cfg: &RangeConfig,
) -> Result<DiagonalBound> {
    let bg = bipartite_pair(b, shape)?;
    endpoint_via(pair_endpoint_max_golden, b, &bg, kind, cfg)
}

/// Endpoint computation with the diagonal replaced by the ray {c (y, z)} and
/// the pair scaled to (yB, zB^Gamma); for nonzero y, z the endpoints agree
/// with [`w_diag_angle`].
pub fn w_diag_scaled(
    b: &RealMatrix,
    shape: &TensorShape,
    kind: BoundKind,
    y: f64,
    z: f64,
    cfg: &RangeConfig,
) -> Result<DiagonalBound> {
    if y == 0.0 || z == 0.0 {
        return Err(Error::InvalidArgument(
            "ray components must be nonzero; a zero component collapses to the trivial bounds"
                .into(),
        ));
    }
    let bg = bipartite_pair(b, shape)?;
    let b1 = b.scaled(y);
    let b2 = bg.scaled(z);
    match kind {
        BoundKind::Max => angle_endpoint_max(&b1, &b2, y, z, cfg),
        BoundKind::Min => {
            Ok(angle_endpoint_max(&b1.scaled(-1.0), &b2.scaled(-1.0), y, z, cfg)?.negated())
        }
    }
}

/// Dispatches on the method selector; `Auto` resolves to the ternary search.
pub fn w_diag(
    b: &RealMatrix,
    shape: &TensorShape,
    kind: BoundKind,
    method: Method,
    cfg: &RangeConfig,
) -> Result<DiagonalBound> {
    match method {
        Method::Angle => w_diag_angle(b, shape, kind, cfg),
        _ => w_diag_ternary(b, shape, kind, cfg),
    }
}

/// Evenly spaced support evaluations over the full circle plus the outer
/// polygon obtained by intersecting the supporting half-planes.
pub fn boundary(
    b: &RealMatrix,
    shape: &TensorShape,
    n_angles: usize,
    cfg: &RangeConfig,
) -> Result<BoundarySweep> {
    if n_angles < 3 {
        return Err(Error::InvalidArgument(
            "boundary needs at least 3 angles".into(),
        ));
    }
    let bg = bipartite_pair(b, shape)?;
    // Evaluations at distinct angles are independent.
    let evaluations: Vec<SupportEvaluation> = (0..n_angles)
        .into_par_iter()
        .map(|k| probe_angle(b, &bg, 2.0 * PI * k as f64 / n_angles as f64, cfg))
        .collect::<Result<_>>()?;

    // Clip a generous bounding box by every supporting half-plane
    // {(x, y) : x cos(t) - y sin(t) <= h(t)}.
    let half_width = 1.0 + b.norm_frobenius() + bg.norm_frobenius();
    let mut poly = vec![
        (-half_width, -half_width),
        (half_width, -half_width),
        (half_width, half_width),
        (-half_width, half_width),
    ];
    for e in &evaluations {
        let (nx, ny) = (e.theta.cos(), -e.theta.sin());
        poly = clip_half_plane(&poly, nx, ny, e.support_value);
        if poly.is_empty() {
            break;
        }
    }
    Ok(BoundarySweep {
        evaluations,
        outer_polygon: poly,
    })
}

fn clip_half_plane(poly: &[(f64, f64)], nx: f64, ny: f64, h: f64) -> Vec<(f64, f64)> {
    let inside = |p: (f64, f64)| nx * p.0 + ny * p.1 <= h;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for (i, &p) in poly.iter().enumerate() {
        let q = poly[(i + 1) % poly.len()];
        let (pin, qin) = (inside(p), inside(q));
        if pin {
            out.push(p);
        }
        if pin != qin {
            let dp = nx * p.0 + ny * p.1 - h;
            let dq = nx * q.0 + ny * q.1 - h;
            let t = dp / (dp - dq);
            out.push((p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1)));
        }
    }
    out
}

/// Endpoint of the multipartite set W^{P,1}(B): optimizes
/// lambda_max(sum_j p_j Gamma_{S_j}(B)) over affine weights. Complementary
/// subsets are removed first (they generate the same matrix on symmetric
/// input); k = 1 is an eigenvalue interval, k = 2 runs the golden-section
/// pair search, and k >= 3 runs a projected subgradient method with
/// Polyak-style steps.
pub fn w_joint_diag(
    b: &RealMatrix,
    shape: &TensorShape,
    subsets: &[SubsystemSet],
    kind: BoundKind,
    cfg: &RangeConfig,
) -> Result<DiagonalBound> {
    if subsets.is_empty() {
        return Err(Error::InvalidArgument("empty subset family".into()));
    }
    if b.dim() != shape.total_dim() {
        return Err(Error::ShapeMismatch {
            matrix_dim: b.dim(),
            shape_dim: shape.total_dim(),
        });
    }
    b.require_symmetric()?;
    let p = shape.num_factors();
    let mut canonical: Vec<SubsystemSet> = Vec::new();
    for s in subsets {
        s.validate(p)?;
        let c = s.canonical(p);
        if !canonical.contains(&c) {
            canonical.push(c);
        }
    }
    let mats: Vec<RealMatrix> = canonical
        .iter()
        .map(|s| partial_transpose(b, shape, s))
        .collect::<Result<_>>()?;

    match kind {
        BoundKind::Max => joint_endpoint_max(&mats, cfg),
        BoundKind::Min => {
            let neg: Vec<RealMatrix> = mats.iter().map(|m| m.scaled(-1.0)).collect();
            Ok(joint_endpoint_max(&neg, cfg)?.negated())
        }
    }
}

fn joint_endpoint_max(mats: &[RealMatrix], cfg: &RangeConfig) -> Result<DiagonalBound> {
    match mats.len() {
        1 => {
            let (pair, certified) = solve_max(&mats[0], &cfg.eigen)?;
            Ok(DiagonalBound {
                kind: BoundKind::Max,
                inner: Some(pair.value),
                outer: pair.value + pair.residual,
                gap: Some(pair.residual),
                evaluations: 1,
                certified,
                converged: true,
            })
        }
        2 => pair_endpoint_max_golden(&mats[0], &mats[1], cfg),
        _ => joint_subgradient_max(mats, cfg),
    }
}

fn joint_subgradient_max(mats: &[RealMatrix], cfg: &RangeConfig) -> Result<DiagonalBound> {
    let k = mats.len();
    let refs: Vec<&RealMatrix> = mats.iter().collect();
    let scale = scale_of(&refs);
    // Standard basis vectors are product vectors whose quadratic forms agree
    // across all partial transposes, so the largest diagonal entry is a
    // certified floor for the optimum.
    let mut floor = f64::NEG_INFINITY;
    let dim = mats[0].dim();
    for i in 0..dim {
        floor = floor.max(mats[0].get(i, i));
    }

    let probe = |w: &[f64]| -> Result<(f64, f64, Vec<f64>, bool)> {
        let terms: Vec<(f64, &RealMatrix)> =
            w.iter().copied().zip(mats.iter()).collect();
        let m = RealMatrix::linear_combination(&terms)?;
        let (pair, certified) = solve_max(&m, &cfg.eigen)?;
        let forms: Vec<f64> = mats.iter().map(|a| a.quadratic_form(&pair.vector)).collect();
        Ok((pair.value, pair.value + pair.residual, forms, certified))
    };

    let mut weights = vec![1.0 / k as f64; k];
    let (mut f_cur, mut cert_cur, mut forms_cur, ok) = {
        let (f, c, forms, ok) = probe(&weights)?;
        (f, c, forms, ok)
    };
    let mut evaluations = 1usize;
    let mut certified = ok;
    let mut converged = true;

    let mut outer = cert_cur;
    let mut f_best = f_cur;
    let mut best_forms = forms_cur.clone();

    let mut delta = (0.25 * (f_best - floor)).max(10.0 * cfg.value_tol * scale);
    let mut patience = 0u32;
    let max_iters = cfg.subgradient_iters * k;

    for _ in 0..max_iters {
        // Projected subgradient: the witness forms, centered to preserve
        // the affine constraint.
        let mean: f64 = forms_cur.iter().sum::<f64>() / k as f64;
        let g: Vec<f64> = forms_cur.iter().map(|c| c - mean).collect();
        let gn2: f64 = g.iter().map(|x| x * x).sum();
        if gn2.sqrt() <= 1e-12 * scale {
            break; // all forms agree at the witness: affinely optimal
        }
        let target = (f_best - delta).max(floor);
        let step = (f_cur - target).max(0.0) / gn2;
        for (wi, gi) in weights.iter_mut().zip(&g) {
            *wi -= step * gi;
        }
        if weights.iter().any(|w| w.abs() > cfg.p_limit) {
            converged = false;
            break;
        }
        let (f, c, forms, okp) = probe(&weights)?;
        evaluations += 1;
        certified &= okp;
        f_cur = f;
        cert_cur = c;
        forms_cur = forms;
        if cert_cur < outer {
            outer = cert_cur;
        }
        if f_cur < f_best - 0.25 * delta {
            f_best = f_cur;
            best_forms = forms_cur.clone();
            patience = 0;
        } else {
            if f_cur < f_best {
                f_best = f_cur;
                best_forms = forms_cur.clone();
            }
            patience += 1;
            if patience >= 40 {
                delta *= 0.5;
                patience = 0;
                if delta <= 0.5 * cfg.value_tol * scale {
                    break;
                }
            }
        }
    }

    let spread = best_forms
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max)
        - best_forms.iter().cloned().fold(f64::INFINITY, f64::min);
    let inner = if spread <= cfg.agree_tol * scale {
        let mean = best_forms.iter().sum::<f64>() / k as f64;
        Some(mean.min(outer))
    } else {
        None
    };
    Ok(DiagonalBound {
        kind: BoundKind::Max,
        inner,
        outer,
        gap: inner.map(|i| outer - i),
        evaluations,
        certified,
        converged,
    })
}

/// The eigenvalue-interval baselines for B and for every single-subsystem
/// partial transpose.
pub fn trivial_bounds(
    b: &RealMatrix,
    shape: &TensorShape,
    cfg: &RangeConfig,
) -> Result<TrivialBounds> {
    if b.dim() != shape.total_dim() {
        return Err(Error::ShapeMismatch {
            matrix_dim: b.dim(),
            shape_dim: shape.total_dim(),
        });
    }
    b.require_symmetric()?;
    let base = crate::eigen::eigenvalue_interval(b, &cfg.eigen)?;
    let mut transposed = Vec::new();
    for j in 1..=shape.num_factors() {
        let s = SubsystemSet::from_factors(&[j], shape.num_factors())?;
        let g = partial_transpose(b, shape, &s)?;
        let (lo, hi) = crate::eigen::eigenvalue_interval(&g, &cfg.eigen)?;
        transposed.push((j, lo, hi));
    }
    Ok(TrivialBounds { base, transposed })
}
