//! Deterministic sampling of small Gaussian integers.
//!
//! Several algorithms need "a few generic residues": validation samples for
//! image points, generic directions for fiber classification, fresh residues
//! after a boundary ambiguity.  Genericity here only requires avoiding finitely
//! many bad values, so small Gaussian integers drawn from a seeded stream (with
//! an exclusion list) are enough, keep the arithmetic cheap, and make every run
//! reproducible byte for byte.

use crate::coeff::{Backend, Coeff};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Sampler {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Next nonzero small Gaussian integer a+bi with |a|,|b| ≤ 9, skipping
    /// anything equal (up to backend tolerance) to an excluded value.
    pub fn next_label(&mut self, backend: &Backend, exclude: &[Coeff]) -> Coeff {
        loop {
            let a: i64 = self.rng.gen_range(-9..=9);
            let b: i64 = self.rng.gen_range(-9..=9);
            if a == 0 && b == 0 {
                continue;
            }
            let c = Coeff::from_i64(a, backend).add(
                &Coeff::from_i64(b, backend).mul(&Coeff::from_q_pair(
                    &num::Zero::zero(),
                    &num::One::one(),
                    backend,
                )),
            );
            if exclude.iter().any(|e| e.eq_c_quiet(&c)) {
                continue;
            }
            return c;
        }
    }

    /// Next nonzero rational integer in 1..=9 as a coefficient (real direction).
    pub fn next_real(&mut self, backend: &Backend, exclude: &[Coeff]) -> Coeff {
        loop {
            let a: i64 = self.rng.gen_range(1..=9);
            let c = Coeff::from_i64(a, backend);
            if exclude.iter().any(|e| e.eq_c_quiet(&c)) {
                continue;
            }
            return c;
        }
    }

    /// A raw integer, for shifting exponents/denominators deterministically.
    pub fn next_u32(&mut self, hi: u32) -> u32 {
        self.rng.gen_range(0..hi)
    }
}
