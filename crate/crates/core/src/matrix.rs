//! Square real matrices with dense or sparse storage, plus the rectangular
//! matrices used for subspace bases and map blocks.
//!
//! Sparse storage is a sorted, deduplicated triplet list; dense storage is a
//! row-major array. Both reject NaN and infinite entries at construction.

use crate::error::{Error, Result};

/// Relative tolerance accepting a matrix as symmetric:
/// `||B - B^T||_max <= tol * max(1, ||B||_max)`. Inputs read from text files
/// carry rounding, so exact equality is not required.
pub const SYMMETRY_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum Storage {
    /// Row-major `dim * dim` array.
    Dense(Vec<f64>),
    /// Sorted by (row, col), unique keys, finite values.
    Sparse(Vec<(usize, usize, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    dim: usize,
    storage: Storage,
}

impl RealMatrix {
    pub fn from_dense(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidMatrix("dimension must be positive".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        Ok(Self {
            dim,
            storage: Storage::Dense(data),
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::InvalidMatrix("matrix must be square".into()));
            }
            data.extend_from_slice(row);
        }
        Self::from_dense(dim, data)
    }

    /// Builds sparse storage. Duplicate (row, col) entries are summed,
    /// exact zeros are dropped, and the triplets are sorted.
    pub fn from_triplets(dim: usize, triplets: Vec<(usize, usize, f64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidMatrix("dimension must be positive".into()));
        }
        let mut t = triplets;
        for &(r, c, v) in &t {
            if r >= dim || c >= dim {
                return Err(Error::InvalidMatrix(format!(
                    "triplet ({r}, {c}) out of bounds for dimension {dim}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidMatrix("non-finite entry".into()));
            }
        }
        t.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(t.len());
        for (r, c, v) in t {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|&(_, _, v)| v != 0.0);
        Ok(Self {
            dim,
            storage: Storage::Sparse(merged),
        })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            storage: Storage::Sparse(Vec::new()),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            storage: Storage::Sparse((0..dim).map(|i| (i, i, 1.0)).collect()),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    pub fn nnz(&self) -> usize {
        match &self.storage {
            Storage::Dense(d) => d.iter().filter(|&&v| v != 0.0).count(),
            Storage::Sparse(t) => t.len(),
        }
    }

    pub fn density(&self) -> f64 {
        match &self.storage {
            Storage::Dense(_) => 1.0,
            Storage::Sparse(t) => t.len() as f64 / (self.dim as f64 * self.dim as f64),
        }
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        match &self.storage {
            Storage::Dense(d) => d[row * self.dim + col],
            Storage::Sparse(t) => t
                .binary_search_by_key(&(row, col), |&(r, c, _)| (r, c))
                .map(|i| t[i].2)
                .unwrap_or(0.0),
        }
    }

    /// Visits every stored entry (sparse skips structural zeros).
    pub fn for_each_entry(&self, mut f: impl FnMut(usize, usize, f64)) {
        match &self.storage {
            Storage::Dense(d) => {
                for r in 0..self.dim {
                    for c in 0..self.dim {
                        f(r, c, d[r * self.dim + c]);
                    }
                }
            }
            Storage::Sparse(t) => {
                for &(r, c, v) in t {
                    f(r, c, v);
                }
            }
        }
    }

    pub fn transpose(&self) -> Self {
        match &self.storage {
            Storage::Dense(d) => {
                let n = self.dim;
                let mut out = vec![0.0; n * n];
                for r in 0..n {
                    for c in 0..n {
                        out[c * n + r] = d[r * n + c];
                    }
                }
                Self {
                    dim: n,
                    storage: Storage::Dense(out),
                }
            }
            Storage::Sparse(t) => {
                let mut out: Vec<(usize, usize, f64)> =
                    t.iter().map(|&(r, c, v)| (c, r, v)).collect();
                out.sort_unstable_by_key(|&(r, c, _)| (r, c));
                Self {
                    dim: self.dim,
                    storage: Storage::Sparse(out),
                }
            }
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        match &self.storage {
            Storage::Dense(d) => Self {
                dim: self.dim,
                storage: Storage::Dense(d.iter().map(|v| s * v).collect()),
            },
            Storage::Sparse(t) => Self {
                dim: self.dim,
                storage: Storage::Sparse(t.iter().map(|&(r, c, v)| (r, c, s * v)).collect()),
            },
        }
    }

    /// Linear combination of matrices of equal dimension. The result is
    /// sparse iff every term is sparse.
    pub fn linear_combination(terms: &[(f64, &RealMatrix)]) -> Result<Self> {
        let Some(&(_, first)) = terms.first() else {
            return Err(Error::InvalidArgument("empty linear combination".into()));
        };
        let dim = first.dim;
        if terms.iter().any(|&(_, m)| m.dim != dim) {
            return Err(Error::InvalidArgument(
                "linear combination of mismatched dimensions".into(),
            ));
        }
        let all_sparse = terms.iter().all(|&(_, m)| m.is_sparse());
        if all_sparse {
            let total: usize = terms.iter().map(|&(_, m)| m.nnz()).sum();
            let mut trips = Vec::with_capacity(total);
            for &(s, m) in terms {
                if s == 0.0 {
                    continue;
                }
                if let Storage::Sparse(t) = &m.storage {
                    trips.extend(t.iter().map(|&(r, c, v)| (r, c, s * v)));
                }
            }
            Self::from_triplets(dim, trips)
        } else {
            let mut data = vec![0.0; dim * dim];
            for &(s, m) in terms {
                if s == 0.0 {
                    continue;
                }
                m.for_each_entry(|r, c, v| data[r * dim + c] += s * v);
            }
            Self::from_dense(dim, data)
        }
    }

    pub fn to_dense_data(&self) -> Vec<f64> {
        match &self.storage {
            Storage::Dense(d) => d.clone(),
            Storage::Sparse(t) => {
                let mut data = vec![0.0; self.dim * self.dim];
                for &(r, c, v) in t {
                    data[r * self.dim + c] = v;
                }
                data
            }
        }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        y.fill(0.0);
        match &self.storage {
            Storage::Dense(d) => {
                for (r, yr) in y.iter_mut().enumerate() {
                    let row = &d[r * self.dim..(r + 1) * self.dim];
                    let mut acc = 0.0;
                    for (a, b) in row.iter().zip(x) {
                        acc += a * b;
                    }
                    *yr = acc;
                }
            }
            Storage::Sparse(t) => {
                for &(r, c, v) in t {
                    y[r] += v * x[c];
                }
            }
        }
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        match &self.storage {
            Storage::Dense(_) => {
                let mut y = vec![0.0; self.dim];
                self.matvec(x, &mut y);
                dot(x, &y)
            }
            Storage::Sparse(t) => t.iter().map(|&(r, c, v)| v * x[r] * x[c]).sum(),
        }
    }

    pub fn norm_max(&self) -> f64 {
        let mut m: f64 = 0.0;
        self.for_each_entry(|_, _, v| m = m.max(v.abs()));
        m
    }

    pub fn norm_frobenius(&self) -> f64 {
        let mut s = 0.0;
        self.for_each_entry(|_, _, v| s += v * v);
        s.sqrt()
    }

    pub fn trace(&self) -> f64 {
        match &self.storage {
            Storage::Dense(d) => (0..self.dim).map(|i| d[i * self.dim + i]).sum(),
            Storage::Sparse(t) => t.iter().filter(|&&(r, c, _)| r == c).map(|&(_, _, v)| v).sum(),
        }
    }

    /// `||B - B^T||_max`.
    pub fn symmetry_defect(&self) -> f64 {
        match &self.storage {
            Storage::Dense(d) => {
                let n = self.dim;
                let mut m: f64 = 0.0;
                for r in 0..n {
                    for c in (r + 1)..n {
                        m = m.max((d[r * n + c] - d[c * n + r]).abs());
                    }
                }
                m
            }
            Storage::Sparse(t) => {
                let tt = self.transpose();
                let Storage::Sparse(u) = &tt.storage else { unreachable!() };
                // Two-pointer walk over the sorted triplet lists.
                let mut m: f64 = 0.0;
                let (mut i, mut j) = (0, 0);
                while i < t.len() || j < u.len() {
                    let ka = t.get(i).map(|&(r, c, _)| (r, c));
                    let kb = u.get(j).map(|&(r, c, _)| (r, c));
                    match (ka, kb) {
                        (Some(a), Some(b)) if a == b => {
                            m = m.max((t[i].2 - u[j].2).abs());
                            i += 1;
                            j += 1;
                        }
                        (Some(a), Some(b)) if a < b => {
                            m = m.max(t[i].2.abs());
                            i += 1;
                        }
                        (Some(_), Some(_)) => {
                            m = m.max(u[j].2.abs());
                            j += 1;
                        }
                        (Some(_), None) => {
                            m = m.max(t[i].2.abs());
                            i += 1;
                        }
                        (None, Some(_)) => {
                            m = m.max(u[j].2.abs());
                            j += 1;
                        }
                        (None, None) => break,
                    }
                }
                m
            }
        }
    }

    pub fn is_symmetric_within(&self, rel_tol: f64) -> bool {
        self.symmetry_defect() <= rel_tol * self.norm_max().max(1.0)
    }

    /// Fails with the measured defect when the matrix is not symmetric
    /// within [`SYMMETRY_REL_TOL`].
    pub fn require_symmetric(&self) -> Result<()> {
        let defect = self.symmetry_defect();
        let tol = SYMMETRY_REL_TOL * self.norm_max().max(1.0);
        if defect > tol {
            return Err(Error::NotSymmetric { defect, tolerance: tol });
        }
        Ok(())
    }

    /// FNV-1a hash over the dimension and stored entries; used to tag
    /// reports with an input fingerprint.
    pub fn digest(&self) -> u64 {
        let mut h = Fnv1a::new();
        h.write_u64(self.dim as u64);
        match &self.storage {
            Storage::Dense(d) => {
                h.write_u64(0);
                for v in d {
                    h.write_u64(v.to_bits());
                }
            }
            Storage::Sparse(t) => {
                h.write_u64(1);
                for &(r, c, v) in t {
                    h.write_u64(r as u64);
                    h.write_u64(c as u64);
                    h.write_u64(v.to_bits());
                }
            }
        }
        h.finish()
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn normalize(x: &mut [f64]) -> f64 {
    let n = norm2(x);
    if n > 0.0 {
        for v in x.iter_mut() {
            *v /= n;
        }
    }
    n
}

struct Fnv1a(u64);

impl Fnv1a {
    fn new() -> Self {
        Fnv1a(0xcbf2_9ce4_8422_2325)
    }

    fn write_u64(&mut self, v: u64) {
        for b in v.to_le_bytes() {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    fn finish(&self) -> u64 {
        self.0
    }
}

/// Rectangular real matrix, row-major. Carrier for subspace basis elements
/// and linear-map blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct RectMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RectMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidMatrix("dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::InvalidMatrix("ragged rows".into()));
            }
            data.extend_from_slice(row);
        }
        Self::new(r, c, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn norm_frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_are_merged_sorted_and_zero_free() {
        let m = RealMatrix::from_triplets(3, vec![(2, 1, 0.5), (0, 0, 1.0), (2, 1, -0.5), (1, 2, 3.0)])
            .unwrap();
        let Storage::Sparse(t) = m.storage() else { panic!() };
        assert_eq!(t, &vec![(0, 0, 1.0), (1, 2, 3.0)]);
        assert_eq!(m.get(2, 1), 0.0);
        assert_eq!(m.get(1, 2), 3.0);
    }

    #[test]
    fn rejects_non_finite_and_out_of_bounds() {
        assert!(RealMatrix::from_dense(2, vec![1.0, f64::NAN, 0.0, 1.0]).is_err());
        assert!(RealMatrix::from_triplets(2, vec![(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn quadratic_form_matches_dense_and_sparse() {
        let d = RealMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, -1.0]]).unwrap();
        let s = RealMatrix::from_triplets(2, vec![(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, -1.0)])
            .unwrap();
        let x = [0.6, -0.8];
        assert!((d.quadratic_form(&x) - s.quadratic_form(&x)).abs() < 1e-15);
    }

    #[test]
    fn symmetry_defect_detects_asymmetry() {
        let m = RealMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!((m.symmetry_defect() - 2.0).abs() < 1e-15);
        let s = RealMatrix::from_triplets(2, vec![(0, 1, 1.0)]).unwrap();
        assert!((s.symmetry_defect() - 1.0).abs() < 1e-15);
        let sym = RealMatrix::from_triplets(2, vec![(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        assert_eq!(sym.symmetry_defect(), 0.0);
        assert!(sym.require_symmetric().is_ok());
    }

    #[test]
    fn linear_combination_preserves_sparsity_kind() {
        let a = RealMatrix::identity(3);
        let b = RealMatrix::from_triplets(3, vec![(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        let c = RealMatrix::linear_combination(&[(2.0, &a), (-1.0, &b)]).unwrap();
        assert!(c.is_sparse());
        assert_eq!(c.get(0, 0), 2.0);
        assert_eq!(c.get(0, 1), -1.0);
        let d = RealMatrix::from_dense(3, vec![0.0; 9]).unwrap();
        let e = RealMatrix::linear_combination(&[(1.0, &a), (1.0, &d)]).unwrap();
        assert!(!e.is_sparse());
    }

    #[test]
    fn digest_is_storage_sensitive_and_deterministic() {
        let a = RealMatrix::identity(4);
        let b = RealMatrix::identity(4);
        assert_eq!(a.digest(), b.digest());
        let c = RealMatrix::from_triplets(4, vec![(0, 0, 1.0 + 1e-12)]).unwrap();
        assert_ne!(a.digest(), c.digest());
    }
}
