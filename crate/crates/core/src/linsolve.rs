//! Exact linear systems over ℚ.
//!
//! Small systems are reduced directly over ℚ. Large ones are solved modulo
//! word-size primes and lifted by rational reconstruction, then checked
//! exactly, which avoids the coefficient growth of elimination over ℚ.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rat::Rat;

/// Reduced row echelon form built incrementally.
#[derive(Clone, Debug)]
pub struct IncrementalSolver {
    n: usize,
    /// (pivot column, row with 1 at the pivot and 0 at every other pivot, rhs)
    rows: Vec<(usize, Vec<Rat>, Rat)>,
}

/// Result of adding an equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Added {
    /// The equation raised the rank.
    Independent,
    /// The equation follows from the earlier ones.
    Redundant,
    /// The equation contradicts the earlier ones.
    Inconsistent,
}

impl IncrementalSolver {
    pub fn new(unknowns: usize) -> IncrementalSolver {
        IncrementalSolver { n: unknowns, rows: Vec::new() }
    }

    pub fn unknowns(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rows.len() == self.n
    }

    pub fn add(&mut self, mut coeffs: Vec<Rat>, mut rhs: Rat) -> Added {
        assert_eq!(coeffs.len(), self.n);
        for (p, row, r) in &self.rows {
            if coeffs[*p].is_zero() {
                continue;
            }
            let f = coeffs[*p].clone();
            for (c, v) in coeffs.iter_mut().zip(row) {
                if !v.is_zero() {
                    *c -= &(&f * v);
                }
            }
            rhs -= &(&f * r);
        }
        let Some(p) = coeffs.iter().position(|c| !c.is_zero()) else {
            return if rhs.is_zero() { Added::Redundant } else { Added::Inconsistent };
        };
        let inv = coeffs[p].recip().unwrap();
        for c in coeffs.iter_mut() {
            *c *= &inv;
        }
        rhs *= &inv;
        for (_, row, r) in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (c, v) in row.iter_mut().zip(&coeffs) {
                if !v.is_zero() {
                    *c -= &(&f * v);
                }
            }
            *r -= &(&f * &rhs);
        }
        self.rows.push((p, coeffs, rhs));
        Added::Independent
    }

    /// The unique solution, once the system has full rank.
    pub fn solution(&self) -> Option<Vec<Rat>> {
        if !self.is_full_rank() {
            return None;
        }
        let mut x = vec![Rat::zero(); self.n];
        for (p, _, r) in &self.rows {
            x[*p] = r.clone();
        }
        Some(x)
    }
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

/// Inverse modulo a prime `p`.
pub(crate) fn inv_mod(a: u64, p: u64) -> Option<u64> {
    (a % p != 0).then(|| pow_mod(a, p - 2, p))
}

/// Deterministic Miller–Rabin for 64-bit integers.
fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for b in BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for b in BASES {
        let mut x = pow_mod(b, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

const MAX_PRIMES: usize = 512;

/// Primes below `2^62`, largest first.
pub(crate) fn primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut out = Vec::with_capacity(MAX_PRIMES);
        let mut n = (1u64 << 62) - 1;
        while out.len() < MAX_PRIMES {
            if is_prime(n) {
                out.push(n);
            }
            n -= 2;
        }
        out
    })
}

/// Reduced row echelon form over `ℤ/p`, fed one equation at a time.
#[derive(Clone, Debug)]
pub struct ModSolver {
    p: u64,
    n: usize,
    rows: Vec<(usize, Vec<u64>, u64)>,
}

impl ModSolver {
    pub fn new(unknowns: usize, p: u64) -> ModSolver {
        ModSolver { p, n: unknowns, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rows.len() == self.n
    }

    pub fn add(&mut self, mut coeffs: Vec<u64>, mut rhs: u64) -> Added {
        assert_eq!(coeffs.len(), self.n);
        let p = self.p;
        for (piv, row, r) in &self.rows {
            let f = coeffs[*piv];
            if f == 0 {
                continue;
            }
            for (c, v) in coeffs.iter_mut().zip(row) {
                if *v != 0 {
                    *c = (*c + p - mul_mod(f, *v, p)) % p;
                }
            }
            rhs = (rhs + p - mul_mod(f, *r, p)) % p;
        }
        let Some(piv) = coeffs.iter().position(|&c| c != 0) else {
            return if rhs == 0 { Added::Redundant } else { Added::Inconsistent };
        };
        let inv = inv_mod(coeffs[piv], p).expect("nonzero");
        for c in coeffs.iter_mut() {
            *c = mul_mod(*c, inv, p);
        }
        rhs = mul_mod(rhs, inv, p);
        for (_, row, r) in self.rows.iter_mut() {
            let f = row[piv];
            if f == 0 {
                continue;
            }
            for (c, v) in row.iter_mut().zip(&coeffs) {
                if *v != 0 {
                    *c = (*c + p - mul_mod(f, *v, p)) % p;
                }
            }
            *r = (*r + p - mul_mod(f, rhs, p)) % p;
        }
        self.rows.push((piv, coeffs, rhs));
        Added::Independent
    }

    pub fn solution(&self) -> Option<Vec<u64>> {
        if !self.is_full_rank() {
            return None;
        }
        let mut x = vec![0; self.n];
        for (piv, _, r) in &self.rows {
            x[*piv] = *r;
        }
        Some(x)
    }
}

/// Chinese remaindering of solution vectors over several primes, followed by
/// rational reconstruction.
#[derive(Clone, Debug)]
pub struct RationalLifter {
    modulus: BigInt,
    acc: Vec<BigInt>,
}

impl RationalLifter {
    pub fn new(n: usize) -> RationalLifter {
        RationalLifter { modulus: BigInt::one(), acc: vec![BigInt::zero(); n] }
    }

    /// Folds in the residues `x` modulo a new prime `p` and returns the
    /// rational reconstruction, if every entry has one. The caller has to
    /// check the candidate; it is only correct once the modulus is large
    /// enough.
    pub fn add(&mut self, p: u64, x: &[u64]) -> Option<Vec<Rat>> {
        let minv = inv_mod((&self.modulus % p).to_u64().expect("reduced"), p).expect("distinct primes");
        let big_p = BigInt::from(p);
        for (c, xi) in self.acc.iter_mut().zip(x) {
            let ci = c.mod_floor(&big_p).to_u64().expect("reduced");
            let t = mul_mod((xi + p - ci) % p, minv, p);
            *c += &self.modulus * t;
        }
        self.modulus *= &big_p;
        self.acc.iter().map(|c| rational_reconstruction(c, &self.modulus)).collect()
    }
}

/// Solves `a x = b` modulo `p`; `None` if `a` is singular mod `p` or `p`
/// divides a denominator.
fn solve_mod(a: &[Vec<Rat>], b: &[Rat], p: u64) -> Option<Vec<u64>> {
    let n = a.len();
    let mut m: Vec<Vec<u64>> = a
        .iter()
        .zip(b)
        .map(|(row, r)| row.iter().chain(std::iter::once(r)).map(|c| c.residue(p)).collect())
        .collect::<Option<_>>()?;
    for col in 0..n {
        let piv = (col..n).find(|&r| m[r][col] != 0)?;
        m.swap(col, piv);
        let inv = inv_mod(m[col][col], p)?;
        for c in m[col].iter_mut() {
            *c = mul_mod(*c, inv, p);
        }
        let pivot_row = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            let f = row[col];
            if r == col || f == 0 {
                continue;
            }
            for (c, v) in row.iter_mut().zip(&pivot_row).skip(col) {
                if *v != 0 {
                    *c = (*c + p - mul_mod(f, *v, p)) % p;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n]).collect())
}

/// `r/s ≡ a (mod m)` with `|r|, s ≤ √(m/2)`, if such a fraction exists.
fn rational_reconstruction(a: &BigInt, m: &BigInt) -> Option<Rat> {
    let bound = (m >> 1u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        (r0, r1, t0, t1) = (r1, r2, t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(Rat::from_big(BigRational::new(r1, t1)))
}

fn satisfies(a: &[Vec<Rat>], b: &[Rat], x: &[Rat]) -> bool {
    a.iter().zip(b).all(|(row, r)| {
        let lhs = row.iter().zip(x).filter(|(c, _)| !c.is_zero()).fold(Rat::zero(), |acc, (c, v)| acc + c * v);
        &lhs == r
    })
}

/// The solution of a nonsingular square system, computed modulo a sequence of
/// primes and lifted by Chinese remaindering and rational reconstruction. The
/// result is checked exactly; `None` if the matrix looks singular.
pub fn solve_nonsingular(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    assert!(a.iter().all(|r| r.len() == n) && b.len() == n);
    let mut lifter = RationalLifter::new(n);
    let mut singular = 0;
    for &p in primes() {
        let Some(x) = solve_mod(a, b, p) else {
            singular += 1;
            if singular > 3 {
                return None;
            }
            continue;
        };
        if let Some(cand) = lifter.add(p, &x) {
            if satisfies(a, b, &cand) {
                return Some(cand);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(v: i64) -> Rat {
        Rat::from_int(v)
    }

    #[test]
    fn small_system() {
        let mut s = IncrementalSolver::new(2);
        assert_eq!(s.add(vec![r(1), r(1)], r(3)), Added::Independent);
        assert_eq!(s.add(vec![r(2), r(2)], r(6)), Added::Redundant);
        assert_eq!(s.add(vec![r(2), r(2)], r(7)), Added::Inconsistent);
        assert!(s.solution().is_none());
        assert_eq!(s.add(vec![r(1), r(-1)], r(1)), Added::Independent);
        assert_eq!(s.solution().unwrap(), vec![r(2), r(1)]);
    }

    #[test]
    fn primes_and_reconstruction() {
        assert!(is_prime(2) && is_prime(97) && !is_prime(91) && !is_prime(1));
        assert!(primes().windows(2).all(|w| w[0] > w[1] && is_prime(w[1])));
        let m = BigInt::from(1_000_003u64);
        let inv7 = BigInt::from(inv_mod(7, 1_000_003).unwrap());
        let a = (BigInt::from(-3) * inv7).mod_floor(&m);
        assert_eq!(rational_reconstruction(&a, &m), Some(Rat::new(-3, 7)));
        assert_eq!(Rat::new(-3, 7).residue(1_000_003).map(BigInt::from), Some(a));
        assert_eq!(Rat::new(1, 5).residue(5), None);
    }

    #[test]
    fn large_entries_lift() {
        let big = Rat::from_big(BigRational::new(BigInt::from(10).pow(40u32) + 1, BigInt::from(3)));
        let a = vec![vec![big.clone(), r(1)], vec![r(2), r(-1)]];
        let x = vec![Rat::new(5, 11), Rat::new(-7, 2)];
        let b: Vec<Rat> = a.iter().map(|row| &(&row[0] * &x[0]) + &(&row[1] * &x[1])).collect();
        assert_eq!(solve_nonsingular(&a, &b), Some(x));
        assert_eq!(solve_nonsingular(&[vec![r(1), r(2)], vec![r(2), r(4)]], &[r(1), r(2)]), None);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn modular_solve_matches_rational(
            x in prop::collection::vec((-20i64..=20, 1i64..=9), 5),
            a in prop::collection::vec(prop::collection::vec(-9i64..=9, 5), 5),
        ) {
            let x: Vec<Rat> = x.into_iter().map(|(n, d)| Rat::new(n, d)).collect();
            let a: Vec<Vec<Rat>> = a.into_iter().map(|row| row.into_iter().map(r).collect()).collect();
            let b: Vec<Rat> = a.iter().map(|row| row.iter().zip(&x).fold(Rat::zero(), |acc, (c, v)| acc + c * v)).collect();
            let mut exact = IncrementalSolver::new(5);
            let p = primes()[0];
            let mut modular = ModSolver::new(5, p);
            let mut lifter = RationalLifter::new(5);
            for (row, rhs) in a.iter().zip(&b) {
                exact.add(row.clone(), rhs.clone());
                let residues = row.iter().map(|c| c.residue(p).unwrap()).collect();
                prop_assert_ne!(modular.add(residues, rhs.residue(p).unwrap()), Added::Inconsistent);
            }
            prop_assert_eq!(exact.rank(), modular.rank());
            if let (Some(sol), Some(xp)) = (exact.solution(), modular.solution()) {
                prop_assert_eq!(lifter.add(p, &xp), Some(sol));
            }
            match exact.solution() {
                Some(sol) => prop_assert_eq!(solve_nonsingular(&a, &b), Some(sol)),
                None => prop_assert_eq!(solve_nonsingular(&a, &b), None),
            }
        }

        #[test]
        fn recovers_planted_solution(
            x in prop::collection::vec(-5i64..=5, 4),
            a in prop::collection::vec(prop::collection::vec(-4i64..=4, 4), 4..10),
        ) {
            let mut s = IncrementalSolver::new(4);
            for row in &a {
                let rhs = row.iter().zip(&x).fold(Rat::zero(), |acc, (c, v)| acc + Rat::from_int(c * v));
                prop_assert_ne!(s.add(row.iter().map(|&c| r(c)).collect(), rhs), Added::Inconsistent);
            }
            if let Some(sol) = s.solution() {
                prop_assert_eq!(sol, x.iter().map(|&v| r(v)).collect::<Vec<_>>());
            }
        }
    }
}
