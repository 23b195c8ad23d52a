//! Shared instance generators for the benchmark suite.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use tensorange::tensor::symmetrize;
use tensorange::RealMatrix;

pub fn random_symmetric_dense(dim: usize, seed: u64) -> RealMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<f64> = (0..dim * dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    symmetrize(&RealMatrix::from_dense(dim, data).unwrap())
}

pub fn random_symmetric_sparse(dim: usize, nnz_pairs: usize, seed: u64) -> RealMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trips = Vec::with_capacity(2 * nnz_pairs);
    for _ in 0..nnz_pairs {
        let r = rng.gen_range(0..dim);
        let c = rng.gen_range(0..dim);
        let v: f64 = rng.sample(StandardNormal);
        trips.push((r, c, 0.5 * v));
        trips.push((c, r, 0.5 * v));
    }
    RealMatrix::from_triplets(dim, trips).unwrap()
}
