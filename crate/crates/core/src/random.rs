//! Seeded random polynomials and forms for property checks.
//!
//! Coefficients are drawn from `{−3, …, 3}` and supports are small, so the
//! same seed always reproduces the same sample on every platform.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::forms::{omega_basis, LogDer, LogForm};
use crate::locq::{Ambient, LocQ};
use crate::poly::{Monomial, Poly};
use crate::rat::Rat;
use crate::saito::MatrixFamily;

pub const DEFAULT_SEED: u64 = 20_240_229;

pub struct Sampler {
    rng: ChaCha8Rng,
}

/// All exponent vectors of total degree `d` in `n` variables.
fn exponent_vectors(n: usize, d: u32) -> Vec<Vec<u32>> {
    if n == 1 {
        return vec![vec![d]];
    }
    (0..=d)
        .rev()
        .flat_map(|a| {
            exponent_vectors(n - 1, d - a).into_iter().map(move |mut rest| {
                rest.insert(0, a);
                rest
            })
        })
        .collect()
}

impl Sampler {
    pub fn new(seed: u64) -> Sampler {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// A fresh sampler whose stream depends only on `(seed, label)`.
    pub fn for_label(seed: u64, label: &str) -> Sampler {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in label.bytes() {
            h = (h ^ b as u64).wrapping_mul(0x0100_0000_01b3);
        }
        Sampler::new(seed ^ h)
    }

    pub fn coefficient(&mut self) -> Rat {
        Rat::from_int(self.rng.gen_range(-3..=3))
    }

    pub fn nonzero_coefficient(&mut self) -> Rat {
        let c: i64 = self.rng.gen_range(1..=3);
        Rat::from_int(if self.rng.gen_bool(0.5) { c } else { -c })
    }

    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.gen_bool(0.5)
    }

    /// Up to `terms` terms of total degree `≤ max_degree`.
    pub fn poly(&mut self, nvars: usize, max_degree: u32, terms: usize) -> Poly {
        let parts = (0..terms).map(|_| {
            let d = self.rng.gen_range(0..=max_degree);
            let e = exponent_vectors(nvars, d).choose(&mut self.rng).unwrap().clone();
            (Monomial::from_exponents(&e), self.coefficient())
        });
        Poly::from_terms(nvars, parts.collect::<Vec<_>>())
    }

    /// Up to `terms` terms, all of total degree `d`.
    pub fn homogeneous(&mut self, nvars: usize, d: u32, terms: usize) -> Poly {
        let all = exponent_vectors(nvars, d);
        let parts: Vec<_> = (0..terms)
            .map(|_| (Monomial::from_exponents(all.choose(&mut self.rng).unwrap()), self.coefficient()))
            .collect();
        Poly::from_terms(nvars, parts)
    }

    /// `Σ_j f_j b_j` with small random polynomial `f_j`.
    pub fn combination(&mut self, amb: &Arc<Ambient>, basis: &[LogForm], max_degree: u32) -> LogForm {
        basis.iter().fold(LogForm::zero(amb), |acc, b| {
            let f = amb.poly(self.poly(amb.nvars(), max_degree, 3));
            &acc + &b.scale(&f)
        })
    }

    /// `Σ_j f_j b_j` for derivations.
    pub fn combination_der(&mut self, amb: &Arc<Ambient>, basis: &[LogDer], max_degree: u32) -> LogDer {
        basis.iter().fold(LogDer::zero(amb), |acc, b| {
            let f = amb.poly(self.poly(amb.nvars(), max_degree, 3));
            &acc + &b.scale(&f)
        })
    }

    /// A random element of `Ω(𝒜, m)`: an `S`-combination of `ω^(−m)`.
    pub fn member_form(&mut self, family: &MatrixFamily, m: i64, max_degree: u32) -> Result<LogForm> {
        Ok(self.combination(family.ambient(), &omega_basis(family, -m)?, max_degree))
    }

    /// `f/Q^e · dx_i` for random `f` and `i`.
    pub fn monomial_form(&mut self, amb: &Arc<Ambient>, e: u32, max_degree: u32) -> LogForm {
        let l = amb.nvars();
        let i = self.rng.gen_range(0..l);
        let mut coeffs = vec![amb.zero(); l];
        coeffs[i] = amb.frac(self.poly(l, max_degree, 3), e);
        LogForm::new(coeffs)
    }

    pub fn locq(&mut self, amb: &Arc<Ambient>, max_degree: u32, max_q: u32) -> LocQ {
        let e = self.rng.gen_range(0..=max_q);
        amb.frac(self.poly(amb.nvars(), max_degree, 3), e)
    }
}
