//! Square matrices over ℚ and over `S[1/Q]`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::locq::{Ambient, LocQ};
use crate::poly::Poly;
use crate::rat::Rat;

/// Dense square matrix with rational entries (Gram matrices, group elements).
#[derive(Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct RatMatrix {
    n: usize,
    entries: Vec<Rat>,
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl RatMatrix {
    pub fn from_rows(rows: Vec<Vec<Rat>>) -> RatMatrix {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix is not square");
        RatMatrix { n, entries: rows.into_iter().flatten().collect() }
    }

    pub fn from_ints(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Rat::from_int(v)).collect())
                .collect(),
        )
    }

    pub fn identity(n: usize) -> RatMatrix {
        RatMatrix::from_fn(n, |i, j| if i == j { Rat::one() } else { Rat::zero() })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Rat) -> RatMatrix {
        let entries = (0..n * n).map(|k| f(k / n, k % n)).collect();
        RatMatrix { n, entries }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<Rat>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> RatMatrix {
        RatMatrix::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.transpose()
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.n, other.n);
        RatMatrix::from_fn(self.n, |i, j| {
            (0..self.n).fold(Rat::zero(), |acc, k| acc + self.get(i, k) * other.get(k, j))
        })
    }

    /// Determinant by Gaussian elimination over ℚ.
    pub fn det(&self) -> Rat {
        let n = self.n;
        let mut a = self.rows();
        let mut det = Rat::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
                return Rat::zero();
            };
            if p != k {
                a.swap(p, k);
                det = -det;
            }
            det = &det * &a[k][k];
            let inv = a[k][k].recip().unwrap();
            for r in k + 1..n {
                if a[r][k].is_zero() {
                    continue;
                }
                let f = &a[r][k] * &inv;
                for c in k..n {
                    let d = &f * &a[k][c];
                    a[r][c] -= &d;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<RatMatrix> {
        let n = self.n;
        let mut a: Vec<Vec<Rat>> = self
            .rows()
            .into_iter()
            .enumerate()
            .map(|(i, mut r)| {
                r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
                r
            })
            .collect();
        for k in 0..n {
            let p = (k..n).find(|&r| !a[r][k].is_zero())?;
            a.swap(p, k);
            let inv = a[k][k].recip().unwrap();
            for c in 0..2 * n {
                a[k][c] *= &inv;
            }
            for r in 0..n {
                if r == k || a[r][k].is_zero() {
                    continue;
                }
                let f = a[r][k].clone();
                for c in 0..2 * n {
                    let d = &f * &a[k][c];
                    a[r][c] -= &d;
                }
            }
        }
        Some(RatMatrix::from_rows(a.into_iter().map(|r| r[n..].to_vec()).collect()))
    }

    /// Positive definite, by Sylvester's criterion on leading principal minors.
    pub fn is_positive_definite(&self) -> bool {
        (1..=self.n).all(|k| {
            let minor = RatMatrix::from_fn(k, |i, j| self.get(i, j).clone());
            minor.det() > Rat::zero()
        })
    }

    /// Images `x_i ↦ Σ_j M_ij x_j` of the coordinate functions.
    pub fn coordinate_images(&self) -> Vec<Poly> {
        (0..self.n)
            .map(|i| Poly::linear(&self.entries[i * self.n..(i + 1) * self.n]))
            .collect()
    }

    pub fn apply(&self, v: &[Rat]) -> Vec<Rat> {
        (0..self.n)
            .map(|i| (0..self.n).fold(Rat::zero(), |acc, j| acc + self.get(i, j) * &v[j]))
            .collect()
    }
}

/// Dense `ℓ × ℓ` matrix over `S[1/Q]`, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct SqMatrix {
    n: usize,
    entries: Vec<LocQ>,
}

impl fmt::Debug for SqMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).to_string()).collect())
            .collect();
        f.debug_list().entries(rows).finish()
    }
}

impl SqMatrix {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> LocQ + Sync) -> SqMatrix {
        let entries = (0..n * n).into_par_iter().map(|k| f(k / n, k % n)).collect();
        SqMatrix { n, entries }
    }

    pub fn from_entries(n: usize, entries: Vec<LocQ>) -> SqMatrix {
        assert_eq!(entries.len(), n * n);
        SqMatrix { n, entries }
    }

    pub fn identity(amb: &Arc<Ambient>, n: usize) -> SqMatrix {
        SqMatrix::from_fn(n, |i, j| if i == j { amb.one() } else { amb.zero() })
    }

    pub fn from_rat(amb: &Arc<Ambient>, m: &RatMatrix) -> SqMatrix {
        SqMatrix::from_fn(m.size(), |i, j| amb.constant(m.get(i, j).clone()))
    }

    pub fn from_polys(amb: &Arc<Ambient>, rows: Vec<Vec<Poly>>) -> SqMatrix {
        let n = rows.len();
        let entries = rows.into_iter().flatten().map(|p| amb.poly(p)).collect();
        SqMatrix::from_entries(n, entries)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn ambient(&self) -> &Arc<Ambient> {
        self.entries[0].ambient()
    }

    pub fn get(&self, i: usize, j: usize) -> &LocQ {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[LocQ] {
        &self.entries
    }

    pub fn column(&self, j: usize) -> Vec<LocQ> {
        (0..self.n).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn from_columns(cols: &[Vec<LocQ>]) -> SqMatrix {
        let n = cols.len();
        SqMatrix::from_fn(n, |i, j| cols[j][i].clone())
    }

    pub fn transpose(&self) -> SqMatrix {
        SqMatrix::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    pub fn map(&self, f: impl Fn(&LocQ) -> LocQ + Sync + Send) -> SqMatrix {
        SqMatrix { n: self.n, entries: self.entries.par_iter().map(f).collect() }
    }

    pub fn scale(&self, c: &Rat) -> SqMatrix {
        self.map(|e| e.scale(c))
    }

    pub fn is_polynomial(&self) -> bool {
        self.entries.iter().all(LocQ::is_regular)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(LocQ::is_zero)
    }

    /// Entries as rationals, if all are constant.
    pub fn as_rat(&self) -> Option<RatMatrix> {
        let vals: Option<Vec<Rat>> = self.entries.iter().map(LocQ::as_constant).collect();
        vals.map(|v| RatMatrix::from_fn(self.n, |i, j| v[i * self.n + j].clone()))
    }

    pub fn max_pole(&self) -> u32 {
        self.entries.iter().map(LocQ::q_exp).max().unwrap_or(0)
    }

    pub fn mul_vec(&self, v: &[LocQ]) -> Vec<LocQ> {
        (0..self.n)
            .into_par_iter()
            .map(|i| {
                (0..self.n).fold(self.ambient().zero(), |acc, k| &acc + &(self.get(i, k) * &v[k]))
            })
            .collect()
    }

    /// Exact determinant by fraction-free (Bareiss) elimination carried out
    /// directly in `S[1/Q]`; every division is exact in that ring.
    pub fn det(&self) -> LocQ {
        locq_bareiss(self.ambient(), self.rows())
    }

    fn rows(&self) -> Vec<Vec<LocQ>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j).clone()).collect()).collect()
    }

    /// Inverse via the adjugate. The determinant must be `c·Q^k` for a nonzero
    /// rational `c` and integer `k`.
    pub fn inverse(&self) -> Result<SqMatrix> {
        let amb = self.ambient().clone();
        let n = self.n;
        let det = self.det();
        if det.as_const_times_q_power().is_none() {
            return Err(Error::NotAUnit(det.to_string()));
        }
        let det_inv = det.try_inverse().expect("c·Q^k is a unit");
        let rows = self.rows();
        let adj = |i: usize, j: usize| -> LocQ {
            // (i,j) entry of adj(M) is the (j,i) cofactor
            let cof = if n == 1 {
                amb.one()
            } else {
                let minor: Vec<Vec<LocQ>> = (0..n)
                    .filter(|&r| r != j)
                    .map(|r| (0..n).filter(|&s| s != i).map(|s| rows[r][s].clone()).collect())
                    .collect();
                locq_bareiss(&amb, minor)
            };
            let c = &cof * &det_inv;
            if (i + j) % 2 == 0 {
                c
            } else {
                -&c
            }
        };
        Ok(SqMatrix::from_fn(n, adj))
    }

    /// Entrywise equality check with a readable mismatch description.
    pub fn diff_report(&self, other: &SqMatrix) -> Option<String> {
        (0..self.n * self.n).find_map(|k| {
            let (a, b) = (&self.entries[k], &other.entries[k]);
            (a != b).then(|| format!("entry ({},{}): {} vs {}", k / self.n, k % self.n, a, b))
        })
    }
}

fn locq_bareiss(amb: &Arc<Ambient>, mut a: Vec<Vec<LocQ>>) -> LocQ {
    let n = a.len();
    let mut negate = false;
    let mut prev = amb.one();
    for k in 0..n.saturating_sub(1) {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    negate = !negate;
                }
                None => return amb.zero(),
            }
        }
        let pivot = a[k][k].clone();
        let updates: Vec<(usize, usize, LocQ)> = (k + 1..n)
            .flat_map(|i| (k + 1..n).map(move |j| (i, j)))
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(i, j)| {
                let num = &(&a[i][j] * &pivot) - &(&a[i][k] * &a[k][j]);
                let q = num.div_exact(&prev).expect("Bareiss step must divide exactly");
                (i, j, q)
            })
            .collect();
        for (i, j, q) in updates {
            a[i][j] = q;
        }
        prev = pivot;
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        -&d
    } else {
        d
    }
}

/// Fraction-free (Bareiss) determinant of a square polynomial matrix.
pub fn bareiss_det(mut a: Vec<Vec<Poly>>) -> Poly {
    let n = a.len();
    assert!(n > 0);
    let nvars = a[0][0].nvars();
    let mut negate = false;
    let mut prev = Poly::one(nvars);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    negate = !negate;
                }
                None => return Poly::zero(nvars),
            }
        }
        let pivot = a[k][k].clone();
        let updates: Vec<(usize, usize, Poly)> = (k + 1..n)
            .flat_map(|i| (k + 1..n).map(move |j| (i, j)))
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(i, j)| {
                let num = &a[i][j].mul_poly(&pivot) - &a[i][k].mul_poly(&a[k][j]);
                let q = num.div_exact(&prev).expect("Bareiss step must divide exactly");
                (i, j, q)
            })
            .collect();
        for (i, j, q) in updates {
            a[i][j] = q;
        }
        prev = pivot;
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        -&d
    } else {
        d
    }
}

fn zip_entries(a: &SqMatrix, b: &SqMatrix, f: impl Fn(&LocQ, &LocQ) -> LocQ + Sync + Send) -> SqMatrix {
    assert_eq!(a.n, b.n);
    let entries = a.entries.par_iter().zip(&b.entries).map(|(x, y)| f(x, y)).collect();
    SqMatrix { n: a.n, entries }
}

impl<'a> Add<&'a SqMatrix> for &'a SqMatrix {
    type Output = SqMatrix;
    fn add(self, rhs: &SqMatrix) -> SqMatrix {
        zip_entries(self, rhs, |x, y| x + y)
    }
}

impl<'a> Sub<&'a SqMatrix> for &'a SqMatrix {
    type Output = SqMatrix;
    fn sub(self, rhs: &SqMatrix) -> SqMatrix {
        zip_entries(self, rhs, |x, y| x - y)
    }
}

impl Neg for &SqMatrix {
    type Output = SqMatrix;
    fn neg(self) -> SqMatrix {
        self.map(|e| -e)
    }
}

impl<'a> Mul<&'a SqMatrix> for &'a SqMatrix {
    type Output = SqMatrix;
    fn mul(self, rhs: &SqMatrix) -> SqMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let amb = self.ambient().clone();
        SqMatrix::from_fn(n, |i, j| {
            // sum over a common denominator, normalizing once
            let terms: Vec<LocQ> = (0..n)
                .map(|k| self.get(i, k) * rhs.get(k, j))
                .filter(|t| !t.is_zero())
                .collect();
            let e = terms.iter().map(LocQ::q_exp).max().unwrap_or(0);
            let num = terms
                .iter()
                .fold(Poly::zero(amb.nvars()), |acc, t| &acc + &t.numerator_over(e));
            amb.frac(num, e)
        })
    }
}

impl Mul<SqMatrix> for SqMatrix {
    type Output = SqMatrix;
    fn mul(self, rhs: SqMatrix) -> SqMatrix {
        &self * &rhs
    }
}

impl<'a> Mul<&'a SqMatrix> for SqMatrix {
    type Output = SqMatrix;
    fn mul(self, rhs: &'a SqMatrix) -> SqMatrix {
        &self * rhs
    }
}
