//! Seeded workloads shared by the benchmarks under `benches/`.

use alexsheaf::random::{random_matrix, random_poset, random_sheaf};
use alexsheaf::{CellularSheaf, Field, Matrix};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A random sheaf on a random poset with `n` elements and stalks of
/// dimension at most `max_dim`.
pub fn sheaf(n: usize, max_dim: usize, seed: u64) -> CellularSheaf {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = random_poset(&mut rng, n, 0.4);
    random_sheaf(&mut rng, &base, Field::Rationals, max_dim)
}

/// A random square matrix over `field`.
pub fn matrix(field: Field, n: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_matrix(&mut rng, field, n, n)
}
