//! Application-level certificates: rank-one-avoiding subspaces, positivity
//! of transpose-preserving maps through their Choi matrices, entanglement
//! witnesses, and the randomized subspace detection study.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::eigen::{extreme_eigenpair, Which};
use crate::error::{Error, Result};
use crate::matrix::{RealMatrix, RectMatrix};
use crate::numrange::{trivial_bounds, w_diag, BoundKind, DiagonalBound, Method, RangeConfig};
use crate::shape::TensorShape;
use crate::tensor::{full_symmetrize, is_transpose_preserving, projector_onto_subspace, symmetrize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// Rank-one-avoiding subspace or entanglement witness confirmed.
    #[serde(rename = "certified")]
    Certified,
    /// Map confirmed positive (and decomposable).
    #[serde(rename = "certified-positive")]
    CertifiedPositive,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

/// Outcome of a certificate check with every number that fed the verdict.
#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub verdict: Verdict,
    /// The decisive numerical-range bound.
    pub headline_value: f64,
    /// Trivial eigenvalue baselines for comparison.
    pub baselines: BTreeMap<String, f64>,
    /// Intermediate scalars, counts, and the thresholds the verdict used.
    pub details: Map<String, Value>,
    /// Dimensions and content hash of the inputs.
    pub inputs_digest: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertConfig {
    pub range: RangeConfig,
    /// Absolute margin on headline comparisons; an order above the
    /// eigensolver tolerance so numerical noise cannot flip a verdict.
    pub margin: f64,
    pub method: Method,
}

impl Default for CertConfig {
    fn default() -> Self {
        Self {
            range: RangeConfig::default(),
            margin: 1e-8,
            method: Method::Auto,
        }
    }
}

fn digest_of(mat: &RealMatrix, extra: &str) -> String {
    format!("dim={};{}fnv1a={:016x}", mat.dim(), extra, mat.digest())
}

fn bound_details(b: &DiagonalBound, cfg: &CertConfig) -> Map<String, Value> {
    let mut d = Map::new();
    d.insert("inner".into(), json!(b.inner));
    d.insert("outer".into(), json!(b.outer));
    d.insert("gap".into(), json!(b.gap));
    d.insert("evaluations".into(), json!(b.evaluations));
    d.insert("certified".into(), json!(b.certified));
    d.insert("converged".into(), json!(b.converged));
    d.insert("margin".into(), json!(cfg.margin));
    d.insert("method".into(), json!(format!("{:?}", cfg.method).to_lowercase()));
    d
}

/// Certifies that span{Y_i} contains no rank-one matrix: builds the
/// orthogonal projection P onto the vectorized subspace and checks that the
/// maximal diagonal numerical-range value stays below one. Also reports the
/// implied bound on the subspace's largest operator norm over unit
/// Frobenius-norm elements.
pub fn certify_rank_one_avoiding(basis: &[RectMatrix], cfg: &CertConfig) -> Result<CertificateReport> {
    let first = basis.first().ok_or(Error::ZeroBasis)?;
    let (m, n) = (first.rows(), first.cols());
    let p = projector_onto_subspace(basis)?;
    // vec stacks columns, so the projector acts on R^n (x) R^m.
    let shape = TensorShape::bipartite(n, m)?;
    let hi = w_diag(&p, &shape, BoundKind::Max, cfg.method, &cfg.range)?;
    let trivial = trivial_bounds(&p, &shape, &cfg.range)?;

    let w = hi.outer;
    let verdict = if w < 1.0 - cfg.margin {
        Verdict::Certified
    } else {
        Verdict::Inconclusive
    };
    let mut baselines = BTreeMap::new();
    baselines.insert("lambda_max".into(), trivial.base.1);
    baselines.insert("lambda_max_partial_transpose".into(), trivial.transposed[1].2);
    let mut details = bound_details(&hi, cfg);
    details.insert("m".into(), json!(m));
    details.insert("n".into(), json!(n));
    details.insert("subspace_dim".into(), json!(p.trace().round() as i64));
    details.insert("operator_norm_bound".into(), json!(w.max(0.0).sqrt()));
    Ok(CertificateReport {
        verdict,
        headline_value: w,
        baselines,
        details,
        inputs_digest: digest_of(&p, &format!("m={m};n={n};k={};", basis.len())),
    })
}

/// Certifies positivity (in decomposable form) of a transpose-preserving
/// map given its Choi matrix: the map is positive whenever the minimal
/// diagonal numerical-range value of the Choi matrix is nonnegative.
pub fn certify_positive_map(
    choi: &RealMatrix,
    m: usize,
    n: usize,
    cfg: &CertConfig,
) -> Result<CertificateReport> {
    if choi.dim() != m * n {
        return Err(Error::ShapeMismatch {
            matrix_dim: choi.dim(),
            shape_dim: m * n,
        });
    }
    let (preserving, defect) = is_transpose_preserving(choi);
    if !preserving {
        return Err(Error::NotSymmetric {
            defect,
            tolerance: crate::matrix::SYMMETRY_REL_TOL * choi.norm_max().max(1.0),
        });
    }
    let shape = TensorShape::bipartite(m, n)?;
    let lo = w_diag(choi, &shape, BoundKind::Min, cfg.method, &cfg.range)?;
    let trivial = trivial_bounds(choi, &shape, &cfg.range)?;

    let w = lo.outer;
    let verdict = if w >= -cfg.margin {
        Verdict::CertifiedPositive
    } else {
        Verdict::Inconclusive
    };
    let mut baselines = BTreeMap::new();
    baselines.insert("lambda_min".into(), trivial.base.0);
    baselines.insert("lambda_min_partial_transpose".into(), trivial.transposed[1].1);
    let mut details = bound_details(&lo, cfg);
    details.insert("m".into(), json!(m));
    details.insert("n".into(), json!(n));
    details.insert("transpose_preserving_defect".into(), json!(defect));
    Ok(CertificateReport {
        verdict,
        headline_value: w,
        baselines,
        details,
        inputs_digest: digest_of(choi, &format!("m={m};n={n};")),
    })
}

/// Certifies that the full symmetrization X of B is an entanglement
/// witness: the complex product-vector minimum of X is bounded below by the
/// minimal diagonal numerical-range value of B, and X must not itself be
/// positive semidefinite. Reports the shift threshold c* such that X + cI
/// is certified for every c >= c*.
pub fn certify_entanglement_witness(
    b: &RealMatrix,
    shape: &TensorShape,
    cfg: &CertConfig,
) -> Result<CertificateReport> {
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
    // Transpose-symmetrizing keeps the product-vector optima and the full
    // symmetrization unchanged; the partial-transpose asymmetry is what the
    // bound feeds on, so it stays untouched.
    let symmetrized = !b.is_symmetric_within(crate::matrix::SYMMETRY_REL_TOL);
    let bs = if symmetrized { symmetrize(b) } else { b.clone() };

    let lo = w_diag(&bs, shape, BoundKind::Min, cfg.method, &cfg.range)?;
    let x = full_symmetrize(b, shape)?;
    let lambda_min_x = extreme_eigenpair(&x, Which::Min, &cfg.range.eigen)?.value;

    let w = lo.outer;
    let c_star = -w;
    let verdict = if w >= -cfg.margin && lambda_min_x < -cfg.margin {
        Verdict::Certified
    } else {
        Verdict::Inconclusive
    };
    let mut baselines = BTreeMap::new();
    baselines.insert("lambda_min_symmetrized".into(), lambda_min_x);
    baselines.insert("eigenvalue_shift_threshold".into(), -lambda_min_x);
    let mut details = bound_details(&lo, cfg);
    details.insert("c_star".into(), json!(c_star));
    details.insert("not_psd_below".into(), json!(-lambda_min_x));
    details.insert("symmetrized".into(), json!(symmetrized));
    Ok(CertificateReport {
        verdict,
        headline_value: w,
        baselines,
        details,
        inputs_digest: digest_of(b, ""),
    })
}

/// Detection study over Haar-random subspaces.
#[derive(Debug, Clone, Serialize)]
pub struct StudyReport {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    pub detected: usize,
    pub detection_probability: f64,
    /// Headline value per trial, in trial order.
    pub headline_values: Vec<f64>,
}

/// Samples k-dimensional subspaces of the m x n matrices by orthonormalizing
/// standard Gaussian matrices (orthogonal invariance gives the Haar measure
/// on the Grassmannian) and runs the rank-one-avoidance certificate on each.
/// Per-trial RNG streams split deterministically from the seed, so parallel
/// and serial runs agree bit for bit.
pub fn random_subspace_study(
    m: usize,
    n: usize,
    k: usize,
    trials: usize,
    seed: u64,
    cfg: &CertConfig,
) -> Result<StudyReport> {
    if k == 0 || k > m * n {
        return Err(Error::InvalidArgument(format!(
            "subspace dimension {k} must lie in 1..={}",
            m * n
        )));
    }
    let outcomes: Vec<(f64, bool)> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(f64, bool)> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let basis: Vec<RectMatrix> = (0..k)
                .map(|_| {
                    let data: Vec<f64> = (0..m * n)
                        .map(|_| StandardNormal.sample(&mut rng))
                        .collect();
                    RectMatrix::new(m, n, data).expect("gaussian entries are finite")
                })
                .collect();
            let report = certify_rank_one_avoiding(&basis, cfg)?;
            Ok((
                report.headline_value,
                report.verdict == Verdict::Certified,
            ))
        })
        .collect::<Result<_>>()?;
    let detected = outcomes.iter().filter(|&&(_, d)| d).count();
    Ok(StudyReport {
        m,
        n,
        k,
        trials,
        seed,
        detected,
        detection_probability: detected as f64 / trials.max(1) as f64,
        headline_values: outcomes.into_iter().map(|(v, _)| v).collect(),
    })
}
