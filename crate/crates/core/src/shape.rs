//! Tensor product structure: factor dimensions and subsystem subsets.

use crate::error::{Error, Result};

/// Factor dimensions (n_1, ..., n_p) of a tensor product space, with the
/// row-major strides used to translate between flat and multi-indices.
///
/// The first factor is the slowest-varying index, matching the Kronecker
/// product convention: `e_j (x) e_k` hits flat index `j*n_2 + k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorShape {
    factor_dims: Vec<usize>,
    strides: Vec<usize>,
    total_dim: usize,
}

impl TensorShape {
    pub fn new(factor_dims: Vec<usize>) -> Result<Self> {
        if factor_dims.is_empty() {
            return Err(Error::InvalidShape("at least one factor required".into()));
        }
        if factor_dims.contains(&0) {
            return Err(Error::InvalidShape(
                "every factor dimension must be at least 1".into(),
            ));
        }
        let mut total: usize = 1;
        for &d in &factor_dims {
            total = total
                .checked_mul(d)
                .ok_or_else(|| Error::InvalidShape("total dimension overflows usize".into()))?;
        }
        let strides = Self::strides_for(&factor_dims);
        Ok(Self {
            factor_dims,
            strides,
            total_dim: total,
        })
    }

    pub fn bipartite(m: usize, n: usize) -> Result<Self> {
        Self::new(vec![m, n])
    }

    fn strides_for(dims: &[usize]) -> Vec<usize> {
        let p = dims.len();
        let mut strides = vec![1usize; p];
        for k in (0..p.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        strides
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn num_factors(&self) -> usize {
        self.factor_dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn is_bipartite(&self) -> bool {
        self.factor_dims.len() == 2
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    /// Component of `index` along factor `k` (0-based factor position).
    #[inline]
    pub fn digit(&self, index: usize, k: usize) -> usize {
        (index / self.strides[k]) % self.factor_dims[k]
    }

    /// Flat index from multi-index components.
    pub fn compose(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.strides)
            .map(|(d, s)| d * s)
            .sum()
    }

    pub fn decompose(&self, index: usize) -> Vec<usize> {
        (0..self.num_factors()).map(|k| self.digit(index, k)).collect()
    }
}

/// A subset S of the factors {1, ..., p}, stored as a bitmask (bit j-1 set
/// means factor j is a member).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubsystemSet {
    mask: u64,
}

impl SubsystemSet {
    pub fn empty() -> Self {
        Self { mask: 0 }
    }

    /// Builds a subset from 1-based factor indices, validated against `p`.
    pub fn from_factors(members: &[usize], p: usize) -> Result<Self> {
        if p > 64 {
            return Err(Error::InvalidShape("more than 64 factors unsupported".into()));
        }
        let mut mask = 0u64;
        for &j in members {
            if j == 0 || j > p {
                return Err(Error::SubsystemOutOfRange { index: j, factors: p });
            }
            mask |= 1 << (j - 1);
        }
        Ok(Self { mask })
    }

    pub fn contains(&self, factor: usize) -> bool {
        (1..=64).contains(&factor) && (self.mask >> (factor - 1)) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn members(&self, p: usize) -> Vec<usize> {
        (1..=p).filter(|&j| self.contains(j)).collect()
    }

    pub fn complement(&self, p: usize) -> Self {
        let full = if p == 64 { u64::MAX } else { (1u64 << p) - 1 };
        Self { mask: full & !self.mask }
    }

    pub fn symmetric_difference(&self, other: &Self) -> Self {
        Self { mask: self.mask ^ other.mask }
    }

    /// Canonical representative of {S, complement(S)}: transposing the
    /// complement instead of S leaves every quadratic form of a symmetric
    /// matrix unchanged, so the smaller bitmask stands for both.
    pub fn canonical(&self, p: usize) -> Self {
        let c = self.complement(p);
        if c.mask < self.mask {
            c
        } else {
            *self
        }
    }

    pub fn validate(&self, p: usize) -> Result<()> {
        let full = if p >= 64 { u64::MAX } else { (1u64 << p) - 1 };
        if self.mask & !full != 0 {
            let bad = (64 - self.mask.leading_zeros()) as usize;
            return Err(Error::SubsystemOutOfRange { index: bad, factors: p });
        }
        Ok(())
    }
}
