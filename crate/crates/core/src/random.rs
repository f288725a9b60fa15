//! Deterministic seeded generators for validation suites.
//!
//! Blocks are built as `G G*` from seeded complex standard Gaussians, so
//! every family is Hermitian PSD by construction, then scaled to unit total
//! trace. The same seed always reproduces the same family.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::assembly::{BigBlockFamily, SmallBlockFamily};
use crate::dense::{ComplexMatrix, DimsProfile, C64};
use crate::error::Result;
use crate::geometry::Scheme;

fn gaussian_matrix(size: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let normal = StandardNormal;
    let data: Vec<C64> = (0..size * size)
        .map(|_| {
            let re: f64 = normal.sample(rng);
            let im: f64 = normal.sample(rng);
            C64::new(re, im)
        })
        .collect();
    ComplexMatrix::new(size, size, data).expect("square data")
}

/// A random PSD matrix `G G*` of the given size.
pub fn random_psd_matrix(size: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let g = gaussian_matrix(size, rng);
    g.matmul(&g.dagger()).expect("square product")
}

/// A random Hermitian (not necessarily PSD) matrix `(G + G*) / 2`.
pub fn random_hermitian_matrix(size: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let g = gaussian_matrix(size, rng);
    g.add(&g.dagger()).expect("same shape").scaled(0.5)
}

/// Seeded convenience wrapper around [`random_hermitian_matrix`].
pub fn random_hermitian(size: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_hermitian_matrix(size, &mut rng)
}

/// A seeded small family with PSD blocks and unit total trace.
pub fn random_small_family(dims: DimsProfile, seed: u64) -> Result<SmallBlockFamily> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = dims.total() / dims.d();
    let blocks: Vec<ComplexMatrix> = (0..count)
        .map(|_| random_psd_matrix(dims.d(), &mut rng))
        .collect();
    let trace: f64 = blocks.iter().map(|b| b.trace().re).sum();
    let blocks = blocks.into_iter().map(|b| b.scaled(1.0 / trace)).collect();
    SmallBlockFamily::new(dims, blocks)
}

/// A seeded big family with PSD blocks and unit total trace.
pub fn random_big_family(dims: DimsProfile, scheme: Scheme, seed: u64) -> Result<BigBlockFamily> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = dims.total() / dims.d();
    let blocks: Vec<ComplexMatrix> = (0..dims.d())
        .map(|_| random_psd_matrix(size, &mut rng))
        .collect();
    let trace: f64 = blocks.iter().map(|b| b.trace().re).sum();
    let blocks = blocks.into_iter().map(|b| b.scaled(1.0 / trace)).collect();
    BigBlockFamily::new(dims, scheme, blocks)
}
