//! Tensor-structure bookkeeping: partial transposes over subsystem subsets,
//! symmetrizations, column vectorization, subspace projectors, and Choi
//! matrices of linear maps.

use crate::error::{Error, Result};
use crate::matrix::{dot, normalize, RealMatrix, RectMatrix, Storage};
use crate::shape::{SubsystemSet, TensorShape};

/// Residual threshold below which an orthogonalized basis vector counts as
/// linearly dependent and is dropped, relative to its original norm.
const DEPENDENT_REL_TOL: f64 = 1e-10;

fn check_dims(b: &RealMatrix, shape: &TensorShape) -> Result<()> {
    if b.dim() != shape.total_dim() {
        return Err(Error::ShapeMismatch {
            matrix_dim: b.dim(),
            shape_dim: shape.total_dim(),
        });
    }
    Ok(())
}

/// Partial transpose over the factors in `subset`: the entry at multi-index
/// ((i_1..i_p), (j_1..j_p)) moves to the index pair with i_k and j_k swapped
/// for every k in the subset. An index permutation, so sparse stays sparse.
pub fn partial_transpose(
    b: &RealMatrix,
    shape: &TensorShape,
    subset: &SubsystemSet,
) -> Result<RealMatrix> {
    check_dims(b, shape)?;
    subset.validate(shape.num_factors())?;
    if subset.is_empty() {
        return Ok(b.clone());
    }
    let members: Vec<usize> = subset
        .members(shape.num_factors())
        .iter()
        .map(|j| j - 1)
        .collect();
    let strides = shape.strides();
    let swap = |row: usize, col: usize| -> (usize, usize) {
        let mut r = row;
        let mut c = col;
        for &k in &members {
            let rk = shape.digit(row, k);
            let ck = shape.digit(col, k);
            let delta = (ck as isize - rk as isize) * strides[k] as isize;
            r = (r as isize + delta) as usize;
            c = (c as isize - delta) as usize;
        }
        (r, c)
    };
    match b.storage() {
        Storage::Dense(data) => {
            let n = b.dim();
            let mut out = vec![0.0; n * n];
            for row in 0..n {
                for col in 0..n {
                    let (r, c) = swap(row, col);
                    out[r * n + c] = data[row * n + col];
                }
            }
            RealMatrix::from_dense(n, out)
        }
        Storage::Sparse(trips) => {
            let moved: Vec<(usize, usize, f64)> = trips
                .iter()
                .map(|&(row, col, v)| {
                    let (r, c) = swap(row, col);
                    (r, c, v)
                })
                .collect();
            RealMatrix::from_triplets(b.dim(), moved)
        }
    }
}

/// Partial transpose of the last factor in the bipartite case.
pub fn bipartite_partial_transpose(b: &RealMatrix, shape: &TensorShape) -> Result<RealMatrix> {
    if !shape.is_bipartite() {
        return Err(Error::NotBipartite {
            factors: shape.num_factors(),
        });
    }
    let second = SubsystemSet::from_factors(&[2], 2)?;
    partial_transpose(b, shape, &second)
}

/// (B + B^T) / 2, exactly symmetric entrywise.
pub fn symmetrize(b: &RealMatrix) -> RealMatrix {
    let t = b.transpose();
    RealMatrix::linear_combination(&[(0.5, b), (0.5, &t)]).expect("same dimension")
}

/// Splits a symmetric bipartite matrix into X with X^Gamma = X and Y with
/// Y^Gamma = -Y, so that X + Y reproduces B.
pub fn partial_symmetrize(b: &RealMatrix, shape: &TensorShape) -> Result<(RealMatrix, RealMatrix)> {
    check_dims(b, shape)?;
    if !shape.is_bipartite() {
        return Err(Error::NotBipartite {
            factors: shape.num_factors(),
        });
    }
    b.require_symmetric()?;
    let bg = bipartite_partial_transpose(b, shape)?;
    let x = RealMatrix::linear_combination(&[(0.5, b), (0.5, &bg)])?;
    let y = RealMatrix::linear_combination(&[(1.0, b), (-1.0, &x)])?;
    Ok((x, y))
}

/// (B + B^T + B^Gamma + (B^T)^Gamma) / 4: symmetric and equal to its own
/// partial transpose.
pub fn full_symmetrize(b: &RealMatrix, shape: &TensorShape) -> Result<RealMatrix> {
    check_dims(b, shape)?;
    if !shape.is_bipartite() {
        return Err(Error::NotBipartite {
            factors: shape.num_factors(),
        });
    }
    let s = symmetrize(b);
    let sg = bipartite_partial_transpose(&s, shape)?;
    RealMatrix::linear_combination(&[(0.5, &s), (0.5, &sg)])
}

/// Column-by-column vectorization: stacks the columns of an m x n matrix
/// into a vector of length n*m, so that `b^T Y a = vec(Y)^T (a (x) b)` for
/// a of length n and b of length m.
pub fn vectorize(y: &RectMatrix) -> Vec<f64> {
    let (m, n) = (y.rows(), y.cols());
    let mut out = vec![0.0; m * n];
    for j in 0..n {
        for i in 0..m {
            out[j * m + i] = y.get(i, j);
        }
    }
    out
}

/// Kronecker product of two vectors; the first factor varies slowest.
pub fn kron(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x * y);
        }
    }
    out
}

/// Orthogonal projection onto span{vec(Y_i)} as a dense matrix on
/// R^n (x) R^m. Uses modified Gram-Schmidt with a second orthogonalization
/// pass; numerically dependent vectors are dropped.
pub fn projector_onto_subspace(basis: &[RectMatrix]) -> Result<RealMatrix> {
    let Some(first) = basis.first() else {
        return Err(Error::ZeroBasis);
    };
    let (m, n) = (first.rows(), first.cols());
    if basis.iter().any(|y| y.rows() != m || y.cols() != n) {
        return Err(Error::InvalidMatrix(
            "basis matrices must share dimensions".into(),
        ));
    }
    let dim = m * n;
    let mut q: Vec<Vec<f64>> = Vec::new();
    for y in basis {
        let mut v = vectorize(y);
        let original = dot(&v, &v).sqrt();
        if original == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for base in &q {
                let c = dot(base, &v);
                for (vi, bi) in v.iter_mut().zip(base) {
                    *vi -= c * bi;
                }
            }
        }
        let residual = normalize(&mut v);
        if residual > DEPENDENT_REL_TOL * original {
            q.push(v);
        }
    }
    if q.is_empty() {
        return Err(Error::ZeroBasis);
    }
    let mut data = vec![0.0; dim * dim];
    for base in &q {
        for r in 0..dim {
            if base[r] == 0.0 {
                continue;
            }
            for c in 0..dim {
                data[r * dim + c] += base[r] * base[c];
            }
        }
    }
    RealMatrix::from_dense(dim, data)
}

/// A linear map from m x m to n x n matrices, recorded as the grid of its
/// values on the matrix units: block (i, j) = Phi(E_ij).
#[derive(Debug, Clone)]
pub struct MapBlocks {
    m: usize,
    n: usize,
    blocks: Vec<RectMatrix>,
}

impl MapBlocks {
    pub fn new(m: usize, n: usize, blocks: Vec<RectMatrix>) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidMatrix("dimensions must be positive".into()));
        }
        if blocks.len() != m * m {
            return Err(Error::InvalidMatrix(format!(
                "expected {} blocks, got {}",
                m * m,
                blocks.len()
            )));
        }
        if blocks.iter().any(|b| b.rows() != n || b.cols() != n) {
            return Err(Error::InvalidMatrix("every block must be n x n".into()));
        }
        Ok(Self { m, n, blocks })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn block(&self, i: usize, j: usize) -> &RectMatrix {
        &self.blocks[i * self.m + j]
    }

    /// Applies the map to an m x m matrix by linearity over the matrix units.
    pub fn apply(&self, x: &RectMatrix) -> Result<RectMatrix> {
        if x.rows() != self.m || x.cols() != self.m {
            return Err(Error::InvalidMatrix(format!(
                "expected a {0}x{0} input",
                self.m
            )));
        }
        let mut out = RectMatrix::zeros(self.n, self.n);
        for i in 0..self.m {
            for j in 0..self.m {
                let w = x.get(i, j);
                if w == 0.0 {
                    continue;
                }
                let blk = self.block(i, j);
                for r in 0..self.n {
                    for c in 0..self.n {
                        out.set(r, c, out.get(r, c) + w * blk.get(r, c));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Choi matrix sum_{i,j} E_ij (x) Phi(E_ij) as a dense mn x mn matrix whose
/// (i, j) block is Phi(E_ij).
pub fn choi_from_blocks(map: &MapBlocks) -> RealMatrix {
    let (m, n) = (map.m, map.n);
    let dim = m * n;
    let mut data = vec![0.0; dim * dim];
    for i in 0..m {
        for j in 0..m {
            let blk = map.block(i, j);
            for k in 0..n {
                for l in 0..n {
                    data[(i * n + k) * dim + (j * n + l)] = blk.get(k, l);
                }
            }
        }
    }
    RealMatrix::from_dense(dim, data).expect("finite blocks")
}

/// The one-parameter family of maps on 3 x 3 matrices whose diagonal output
/// weights cycle (1, c, 1) patterns and whose off-diagonal entries are
/// negated; c = 0 gives the classic positive-but-not-decomposable map.
pub fn generalized_choi_map(c: f64) -> MapBlocks {
    let n = 3;
    let diag = |a: f64, b: f64, d: f64| {
        RectMatrix::new(n, n, vec![a, 0.0, 0.0, 0.0, b, 0.0, 0.0, 0.0, d]).unwrap()
    };
    let mut blocks = Vec::with_capacity(9);
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                blocks.push(match i {
                    0 => diag(1.0, 1.0, c),
                    1 => diag(c, 1.0, 1.0),
                    _ => diag(1.0, c, 1.0),
                });
            } else {
                let mut blk = RectMatrix::zeros(n, n);
                blk.set(i, j, -1.0);
                blocks.push(blk);
            }
        }
    }
    MapBlocks::new(3, 3, blocks).unwrap()
}

/// A map is transpose-preserving iff its Choi matrix is symmetric. Returns
/// the verdict together with the symmetry defect `||C - C^T||_max`.
pub fn is_transpose_preserving(c: &RealMatrix) -> (bool, f64) {
    let defect = c.symmetry_defect();
    let tol = crate::matrix::SYMMETRY_REL_TOL * c.norm_max().max(1.0);
    (defect <= tol, defect)
}
