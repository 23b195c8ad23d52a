//! Independent inner estimators of the product-vector optima: random
//! sphere sampling, cyclic alternating ascent over the tensor factors, and
//! an exhaustive angular grid for the 2 (x) 2 case. Everything here bounds
//! the optimum from the inside, which makes these routines the natural
//! counterweight to the certified outer bounds.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::eigen::{extreme_eigenpair, SolverConfig, Which};
use crate::error::{Error, Result};
use crate::matrix::{normalize, RealMatrix, RectMatrix};
use crate::shape::TensorShape;
use crate::tensor::kron;

/// A unit tensor-product vector, stored factor by factor.
#[derive(Debug, Clone, Serialize)]
pub struct ProductVector {
    factors: Vec<Vec<f64>>,
}

impl ProductVector {
    /// Normalizes every factor; fails on a zero factor or on a factor count
    /// or length mismatch with the shape.
    pub fn new(factors: Vec<Vec<f64>>, shape: &TensorShape) -> Result<Self> {
        if factors.len() != shape.num_factors() {
            return Err(Error::InvalidArgument(format!(
                "expected {} factors, got {}",
                shape.num_factors(),
                factors.len()
            )));
        }
        let mut out = factors;
        for (f, &d) in out.iter_mut().zip(shape.factor_dims()) {
            if f.len() != d {
                return Err(Error::InvalidArgument(
                    "factor length does not match shape".into(),
                ));
            }
            if normalize(f) == 0.0 {
                return Err(Error::InvalidArgument("zero factor".into()));
            }
        }
        Ok(Self { factors: out })
    }

    pub fn random(shape: &TensorShape, rng: &mut impl Rng) -> Self {
        let factors = shape
            .factor_dims()
            .iter()
            .map(|&d| {
                let mut f: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                if normalize(&mut f) == 0.0 {
                    f[0] = 1.0;
                }
                f
            })
            .collect();
        Self { factors }
    }

    pub fn factors(&self) -> &[Vec<f64>] {
        &self.factors
    }

    /// The full Kronecker vector v_1 (x) ... (x) v_p.
    pub fn assemble(&self) -> Vec<f64> {
        let mut out = self.factors[0].clone();
        for f in &self.factors[1..] {
            out = kron(&out, f);
        }
        out
    }

    pub fn value(&self, b: &RealMatrix) -> f64 {
        b.quadratic_form(&self.assemble())
    }
}

/// An objective value attained by a concrete product vector.
#[derive(Debug, Clone, Serialize)]
pub struct MuEstimate {
    pub value: f64,
    pub vector: ProductVector,
}

/// Draws `samples` product vectors with independent Gaussian factors
/// (uniform on the spheres after normalization) and tracks both extremes.
/// The per-sample RNG streams are split from the seed, so parallel and
/// serial runs return identical results.
pub fn sample_mu(
    b: &RealMatrix,
    shape: &TensorShape,
    samples: usize,
    seed: u64,
) -> Result<(MuEstimate, MuEstimate)> {
    if b.dim() != shape.total_dim() {
        return Err(Error::ShapeMismatch {
            matrix_dim: b.dim(),
            shape_dim: shape.total_dim(),
        });
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be positive".into()));
    }
    let draw = |i: usize| -> ProductVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        ProductVector::random(shape, &mut rng)
    };
    let (min_pair, max_pair) = (0..samples)
        .into_par_iter()
        .map(|i| {
            let v = draw(i).value(b);
            ((v, i), (v, i))
        })
        .reduce(
            || ((f64::INFINITY, usize::MAX), (f64::NEG_INFINITY, usize::MAX)),
            |(amin, amax), (bmin, bmax)| {
                (
                    if (bmin.0, bmin.1) < (amin.0, amin.1) { bmin } else { amin },
                    if (bmax.0, usize::MAX - bmax.1) > (amax.0, usize::MAX - amax.1) {
                        bmax
                    } else {
                        amax
                    },
                )
            },
        );
    let best_min = MuEstimate {
        value: min_pair.0,
        vector: draw(min_pair.1),
    };
    let best_max = MuEstimate {
        value: max_pair.0,
        vector: draw(max_pair.1),
    };
    Ok((best_min, best_max))
}

/// Contracts B against every factor except `skip`, producing the symmetric
/// matrix of the quadratic form seen by that factor alone.
fn contracted_matrix(
    b: &RealMatrix,
    shape: &TensorShape,
    factors: &[Vec<f64>],
    skip: usize,
) -> RectMatrix {
    let d = shape.factor_dims()[skip];
    let mut m = RectMatrix::zeros(d, d);
    b.for_each_entry(|row, col, v| {
        let mut w = v;
        for (k, f) in factors.iter().enumerate() {
            if k == skip {
                continue;
            }
            w *= f[shape.digit(row, k)] * f[shape.digit(col, k)];
            if w == 0.0 {
                return;
            }
        }
        let r = shape.digit(row, skip);
        let c = shape.digit(col, skip);
        m.set(r, c, m.get(r, c) + w);
    });
    m
}

/// Cyclic local refinement: fixes all factors but one, replaces the free
/// factor by the extremal eigenvector of its contracted quadratic form, and
/// repeats. The objective is monotone along the iteration.
pub fn alternating_ascent(
    b: &RealMatrix,
    shape: &TensorShape,
    start: &ProductVector,
    direction: Which,
    iters: usize,
    tol: f64,
) -> Result<(ProductVector, f64)> {
    if b.dim() != shape.total_dim() {
        return Err(Error::ShapeMismatch {
            matrix_dim: b.dim(),
            shape_dim: shape.total_dim(),
        });
    }
    let p = shape.num_factors();
    let mut factors = start.factors.clone();
    let mut current = ProductVector {
        factors: factors.clone(),
    }
    .value(b);
    let eig_cfg = SolverConfig::default();
    for _ in 0..iters {
        let before = current;
        for j in 0..p {
            let m = contracted_matrix(b, shape, &factors, j);
            let d = m.rows();
            let sym = RealMatrix::from_dense(d, {
                let mut data = vec![0.0; d * d];
                for r in 0..d {
                    for c in 0..d {
                        data[r * d + c] = 0.5 * (m.get(r, c) + m.get(c, r));
                    }
                }
                data
            })?;
            let pair = extreme_eigenpair(&sym, direction, &eig_cfg)?;
            let keep = match direction {
                Which::Max => pair.value >= current - 1e-15,
                Which::Min => pair.value <= current + 1e-15,
            };
            if keep {
                factors[j] = pair.vector;
                current = pair.value;
            }
        }
        let improvement = match direction {
            Which::Max => current - before,
            Which::Min => before - current,
        };
        if improvement.abs() <= tol * current.abs().max(1.0) {
            break;
        }
    }
    Ok((ProductVector { factors }, current))
}

/// Grid values for the 2 (x) 2 case together with a Lipschitz error bound.
#[derive(Debug, Clone, Serialize)]
pub struct GridEstimate {
    pub mu_min: f64,
    pub mu_max: f64,
    /// The true optimum lies within this distance of the grid optimum.
    pub error_bound: f64,
}

/// Exhaustive sweep of v = (cos a, sin a), w = (cos b, sin b) over an
/// angular grid on [0, pi)^2; sign flips leave the objective unchanged, so
/// the half-open square covers every product vector.
pub fn grid_mu_2x2(b: &RealMatrix, resolution: usize) -> Result<GridEstimate> {
    if b.dim() != 4 {
        return Err(Error::ShapeMismatch {
            matrix_dim: b.dim(),
            shape_dim: 4,
        });
    }
    if resolution < 8 {
        return Err(Error::InvalidArgument("resolution must be at least 8".into()));
    }
    let h = std::f64::consts::PI / resolution as f64;
    let mut mu_min = f64::INFINITY;
    let mut mu_max = f64::NEG_INFINITY;
    for i in 0..resolution {
        let a = i as f64 * h;
        let v = [a.cos(), a.sin()];
        for j in 0..resolution {
            let bb = j as f64 * h;
            let w = [bb.cos(), bb.sin()];
            let x = [v[0] * w[0], v[0] * w[1], v[1] * w[0], v[1] * w[1]];
            let val = b.quadratic_form(&x);
            mu_min = mu_min.min(val);
            mu_max = mu_max.max(val);
        }
    }
    // |d objective / d angle| <= 2 ||B||_2 <= 2 ||B||_F per parameter; the
    // nearest grid point is within h/2 in each coordinate.
    let error_bound = 2.0 * b.norm_frobenius() * h;
    Ok(GridEstimate {
        mu_min,
        mu_max,
        error_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numrange::{w_diag_ternary, BoundKind, RangeConfig};
    use crate::tensor::symmetrize;

    fn antidiagonal_involution() -> RealMatrix {
        RealMatrix::from_rows(&[
            vec![0.0, 0.0, 0.0, 1.0],
            vec![0.0, 0.0, -1.0, 0.0],
            vec![0.0, -1.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0, 0.0],
        ])
        .unwrap()
    }

    fn random_symmetric(dim: usize, seed: u64) -> RealMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<f64> = (0..dim * dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        symmetrize(&RealMatrix::from_dense(dim, data).unwrap())
    }

    #[test]
    fn sampling_identity_gives_one() {
        let shape = TensorShape::bipartite(2, 2).unwrap();
        let id = RealMatrix::identity(4);
        let (lo, hi) = sample_mu(&id, &shape, 100, 1).unwrap();
        assert!((lo.value - 1.0).abs() < 1e-12);
        assert!((hi.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sampling_degenerate_segment_gives_zero() {
        let shape = TensorShape::bipartite(2, 2).unwrap();
        let b = antidiagonal_involution();
        let (lo, hi) = sample_mu(&b, &shape, 500, 2).unwrap();
        assert!(lo.value.abs() < 1e-13);
        assert!(hi.value.abs() < 1e-13);
    }

    #[test]
    fn sampling_is_deterministic_and_order_free() {
        let shape = TensorShape::bipartite(3, 3).unwrap();
        let b = random_symmetric(9, 7);
        let (lo1, hi1) = sample_mu(&b, &shape, 2000, 9).unwrap();
        let (lo2, hi2) = sample_mu(&b, &shape, 2000, 9).unwrap();
        assert_eq!(lo1.value.to_bits(), lo2.value.to_bits());
        assert_eq!(hi1.value.to_bits(), hi2.value.to_bits());
        // The reported vectors reproduce the reported values.
        assert!((lo1.vector.value(&b) - lo1.value).abs() < 1e-15);
        assert!((hi1.vector.value(&b) - hi1.value).abs() < 1e-15);
    }

    #[test]
    fn sampling_diagonal_matrix_stays_below_diagonal_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let shape = TensorShape::bipartite(2, 3).unwrap();
        let d: Vec<f64> = (0..6).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let b = RealMatrix::from_triplets(6, d.iter().enumerate().map(|(i, &v)| (i, i, v)).collect())
            .unwrap();
        // Diagonal matrices attain their optimum at basis product vectors.
        let scan_max = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let (_, hi) = sample_mu(&b, &shape, 5000, 12).unwrap();
        assert!(hi.value <= scan_max + 1e-14);
        assert!(hi.value >= scan_max - 0.5);
    }

    #[test]
    fn ascent_fixed_point_and_monotonicity() {
        let shape = TensorShape::bipartite(2, 3).unwrap();
        let d: Vec<f64> = vec![0.4, -1.0, 2.0, 0.3, -0.2, 1.1];
        let b = RealMatrix::from_triplets(6, d.iter().enumerate().map(|(i, &v)| (i, i, v)).collect())
            .unwrap();
        // Start at the global optimizer e_1 (x) e_3 (value 2.0).
        let start = ProductVector::new(vec![vec![1.0, 0.0], vec![0.0, 0.0, 1.0]], &shape).unwrap();
        let (refined, value) = alternating_ascent(&b, &shape, &start, Which::Max, 10, 1e-12).unwrap();
        assert!((value - 2.0).abs() < 1e-12);
        assert!((refined.value(&b) - 2.0).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let bsym = random_symmetric(6, 22);
        for _ in 0..10 {
            let s = ProductVector::random(&shape, &mut rng);
            let v0 = s.value(&bsym);
            let (_, v1) = alternating_ascent(&bsym, &shape, &s, Which::Max, 25, 1e-12).unwrap();
            assert!(v1 >= v0 - 1e-12);
            let (_, v2) = alternating_ascent(&bsym, &shape, &s, Which::Min, 25, 1e-12).unwrap();
            assert!(v2 <= v0 + 1e-12);
        }
    }

    #[test]
    fn ascent_on_projector_stays_at_or_below_half() {
        let h = 0.5;
        let p = RealMatrix::from_rows(&[
            vec![h, 0.0, 0.0, h],
            vec![0.0, h, -h, 0.0],
            vec![0.0, -h, h, 0.0],
            vec![h, 0.0, 0.0, h],
        ])
        .unwrap();
        let shape = TensorShape::bipartite(2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut best = f64::NEG_INFINITY;
        for _ in 0..20 {
            let s = ProductVector::random(&shape, &mut rng);
            let (_, v) = alternating_ascent(&p, &shape, &s, Which::Max, 40, 1e-12).unwrap();
            assert!(v <= 0.5 + 1e-10);
            best = best.max(v);
        }
        assert!(best >= 0.5 - 1e-8);
    }

    #[test]
    fn ascent_on_choi_matrix_stays_above_certificate_and_finds_zero() {
        // The map behind this Choi matrix is positive, so the product
        // minimum is exactly 0 (attained at e_1 (x) e_3); the certified
        // floor 1 - 2/sqrt(3) is strictly below it.
        let shape = TensorShape::bipartite(3, 3).unwrap();
        let c = crate::tensor::choi_from_blocks(&crate::tensor::generalized_choi_map(0.0));
        let floor = 1.0 - 2.0 / 3.0_f64.sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let mut best = f64::INFINITY;
        for _ in 0..50 {
            let s = ProductVector::random(&shape, &mut rng);
            let (_, v) = alternating_ascent(&c, &shape, &s, Which::Min, 40, 1e-12).unwrap();
            assert!(v >= floor - 1e-6);
            best = best.min(v);
        }
        assert!(best.abs() <= 1e-9, "best {best}");
    }

    #[test]
    fn grid_on_degenerate_segment_is_zero() {
        let b = antidiagonal_involution();
        let g = grid_mu_2x2(&b, 64).unwrap();
        assert!(g.mu_min.abs() < 1e-12);
        assert!(g.mu_max.abs() < 1e-12);
    }

    #[test]
    fn grid_diagonal_attains_basis_value() {
        let b = RealMatrix::from_triplets(
            4,
            vec![(0, 0, 1.0), (1, 1, 2.0), (2, 2, 3.0), (3, 3, 4.0)],
        )
        .unwrap();
        let g = grid_mu_2x2(&b, 200).unwrap();
        assert!((g.mu_max - 4.0).abs() <= g.error_bound);
        assert!((g.mu_min - 1.0).abs() <= g.error_bound);
        assert!(grid_mu_2x2(&b, 4).is_err());
    }

    #[test]
    fn grid_respects_certified_interval() {
        let cfg = RangeConfig::default();
        let shape = TensorShape::bipartite(2, 2).unwrap();
        for seed in 0..10 {
            let b = random_symmetric(4, 60 + seed);
            let hi = w_diag_ternary(&b, &shape, BoundKind::Max, &cfg).unwrap();
            let lo = w_diag_ternary(&b, &shape, BoundKind::Min, &cfg).unwrap();
            let g = grid_mu_2x2(&b, 64).unwrap();
            assert!(g.mu_max <= hi.outer + 1e-9);
            assert!(g.mu_min >= lo.outer - 1e-9);
        }
    }

    #[test]
    fn sign_flip_of_a_factor_leaves_value_unchanged() {
        let shape = TensorShape::new(vec![2, 2, 2]).unwrap();
        let b = random_symmetric(8, 70);
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..10 {
            let v = ProductVector::random(&shape, &mut rng);
            let mut flipped = v.factors().to_vec();
            for x in flipped[1].iter_mut() {
                *x = -*x;
            }
            let w = ProductVector::new(flipped, &shape).unwrap();
            assert!((v.value(&b) - w.value(&b)).abs() < 1e-14);
        }
    }
}
