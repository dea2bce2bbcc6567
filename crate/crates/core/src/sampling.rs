//! Seeded random inputs for sweeps and tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::markoff::{HalfTraceCoords, MarkoffTriple};
use crate::real::{self, Vec3};

pub use rand_chacha::ChaCha8Rng as SampleRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries uniform in `(2.05, 20)`, rejected until `K < 2`.
pub fn geometric_triple<R: Rng>(rng: &mut R, bits: u32) -> Result<MarkoffTriple> {
    loop {
        let [a, b, c] = [(); 3].map(|_| rng.gen_range(2.05..20.0));
        let t = MarkoffTriple::from_f64(bits, a, b, c)?;
        if t.commutator_trace() < 2 {
            return Ok(t);
        }
    }
}

pub fn geometric_triples(seed: u64, count: usize, bits: u32) -> Result<Vec<MarkoffTriple>> {
    let mut r = rng(seed);
    (0..count).map(|_| geometric_triple(&mut r, bits)).collect()
}

/// `ℓ ∈ [0.3, 1.5]`, `x ∈ [−1, 1]`, `y ∈ [1.1, 3]`.
pub fn half_trace_coords<R: Rng>(rng: &mut R, bits: u32) -> Result<HalfTraceCoords> {
    let ell = rng.gen_range(0.3..=1.5);
    let x = rng.gen_range(-1.0..=1.0);
    let y = rng.gen_range(1.1..=3.0);
    HalfTraceCoords::from_f64(bits, ell, x, y)
}

pub fn coords_list(seed: u64, count: usize, bits: u32) -> Result<Vec<HalfTraceCoords>> {
    let mut r = rng(seed);
    (0..count).map(|_| half_trace_coords(&mut r, bits)).collect()
}

/// A linear form with entries uniform in `[−1, 1]`.
pub fn linear_form<R: Rng>(rng: &mut R, bits: u32) -> Vec3 {
    real::vec3(bits, [(); 3].map(|_| rng.gen_range(-1.0..=1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_reproducible_and_geometric() {
        let a = geometric_triples(7, 20, 128).unwrap();
        let b = geometric_triples(7, 20, 128).unwrap();
        assert_eq!(a, b);
        for t in &a {
            assert!(t.require_geometric().is_ok());
            assert!(t.values().iter().all(|v| **v > 2.05 && **v < 20));
        }
    }
}
