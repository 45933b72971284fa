//! Sparse multivariate polynomials over ℚ.
//!
//! Terms are kept sorted in descending graded-lex order (`x_1 > x_2 > …`), with
//! no zero coefficients, so two polynomials are equal iff their term vectors
//! are equal.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rustc_hash::FxHashMap;

use crate::linsolve::{inv_mod, mul_mod};
use crate::rat::Rat;

/// Hard limit on the number of variables a [`Monomial`] can carry.
pub const MAX_VARS: usize = 6;

const EXP_BITS: u32 = 16;
const EXP_MASK: u128 = 0xffff;
const DEG_SHIFT: u32 = 96;

/// A monomial packed into a `u128`: the total degree in the top 32 bits, then
/// one 16-bit exponent per variable with `x_1` most significant. Integer order
/// on the packed value is exactly graded-lex order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(u128);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    fn shift(i: usize) -> u32 {
        DEG_SHIFT - EXP_BITS * (i as u32 + 1)
    }

    pub fn from_exponents(exps: &[u32]) -> Monomial {
        assert!(exps.len() <= MAX_VARS, "at most {MAX_VARS} variables");
        let mut packed = 0u128;
        let mut deg = 0u128;
        for (i, &e) in exps.iter().enumerate() {
            assert!(e as u128 <= EXP_MASK, "exponent overflow");
            packed |= (e as u128) << Self::shift(i);
            deg += e as u128;
        }
        assert!(deg <= EXP_MASK, "degree overflow");
        Monomial(packed | (deg << DEG_SHIFT))
    }

    pub fn var(i: usize) -> Monomial {
        assert!(i < MAX_VARS);
        Monomial((1u128 << Self::shift(i)) | (1u128 << DEG_SHIFT))
    }

    pub fn degree(self) -> u32 {
        (self.0 >> DEG_SHIFT) as u32
    }

    pub fn exponent(self, i: usize) -> u32 {
        ((self.0 >> Self::shift(i)) & EXP_MASK) as u32
    }

    pub fn exponents(self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|i| self.exponent(i)).collect()
    }

    /// Product of monomials. Panics if the total degree leaves 16 bits, which
    /// also guarantees no carry between exponent fields.
    pub fn mul(self, other: Monomial) -> Monomial {
        let m = Monomial(self.0 + other.0);
        assert!(m.degree() as u128 <= EXP_MASK, "degree overflow");
        m
    }

    pub fn divides(self, other: Monomial) -> bool {
        (0..MAX_VARS).all(|i| self.exponent(i) <= other.exponent(i))
    }

    /// `other / self`, assuming [`Monomial::divides`].
    fn div_unchecked(self, other: Monomial) -> Monomial {
        Monomial(other.0 - self.0)
    }

    fn with_exponent(self, i: usize, e: u32) -> Monomial {
        let old = self.exponent(i) as u128;
        let deg = self.degree() as u128 - old + e as u128;
        let body = (self.0 & !(EXP_MASK << Self::shift(i)) & !(u128::MAX << DEG_SHIFT))
            | ((e as u128) << Self::shift(i));
        Monomial(body | (deg << DEG_SHIFT))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exponents(MAX_VARS))
    }
}

/// A polynomial in `nvars` variables with rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: Vec<(Monomial, Rat)>,
}

fn sort_desc(terms: &mut [(Monomial, Rat)]) {
    terms.sort_unstable_by_key(|t| std::cmp::Reverse(t.0));
}

impl Poly {
    pub fn zero(nvars: usize) -> Poly {
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} variables");
        Poly { nvars, terms: Vec::new() }
    }

    pub fn constant(nvars: usize, c: Rat) -> Poly {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.push((Monomial::ONE, c));
        }
        p
    }

    pub fn one(nvars: usize) -> Poly {
        Poly::constant(nvars, Rat::one())
    }

    pub fn var(nvars: usize, i: usize) -> Poly {
        assert!(i < nvars);
        Poly { nvars, terms: vec![(Monomial::var(i), Rat::one())] }
    }

    pub fn monomial(nvars: usize, m: Monomial, c: Rat) -> Poly {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.push((m, c));
        }
        p
    }

    /// Linear form `Σ c_i x_i`.
    pub fn linear(coeffs: &[Rat]) -> Poly {
        let n = coeffs.len();
        Poly::from_terms(
            n,
            coeffs.iter().enumerate().map(|(i, c)| (Monomial::var(i), c.clone())),
        )
    }

    /// Builds a polynomial from arbitrary terms, combining duplicates.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Rat)>) -> Poly {
        let mut acc: FxHashMap<Monomial, Rat> = FxHashMap::default();
        for (m, c) in terms {
            *acc.entry(m).or_default() += &c;
        }
        Poly::from_map(nvars, acc)
    }

    fn from_map<S>(nvars: usize, acc: HashMap<Monomial, Rat, S>) -> Poly {
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        sort_desc(&mut terms);
        Poly { nvars, terms }
    }

    /// Trusts the caller that `terms` are sorted, distinct and nonzero.
    fn from_sorted(nvars: usize, terms: Vec<(Monomial, Rat)>) -> Poly {
        debug_assert!(terms.windows(2).all(|w| w[0].0 > w[1].0));
        debug_assert!(terms.iter().all(|(_, c)| !c.is_zero()));
        Poly { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Monomial, Rat)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if the polynomial is constant (zero included).
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.as_slice() {
            [] => Some(Rat::zero()),
            [(m, c)] if *m == Monomial::ONE => Some(c.clone()),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.first().map(|(m, _)| m.degree())
    }

    pub fn leading_term(&self) -> Option<&(Monomial, Rat)> {
        self.terms.first()
    }

    pub fn coeff(&self, m: Monomial) -> Rat {
        self.terms
            .binary_search_by(|(t, _)| m.cmp(t))
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_default()
    }

    pub fn is_homogeneous(&self) -> bool {
        match self.terms.first() {
            None => true,
            Some((m, _)) => self.terms.iter().all(|(t, _)| t.degree() == m.degree()),
        }
    }

    /// Splits into homogeneous components keyed by degree.
    pub fn homogeneous_parts(&self) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Vec<(Monomial, Rat)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degree()).or_default().push((*m, c.clone()));
        }
        out.into_iter()
            .map(|(d, t)| (d, Poly::from_sorted(self.nvars, t)))
            .collect()
    }

    /// Coefficients of a homogeneous linear form, or `None` if `self` is not one.
    pub fn linear_coeffs(&self) -> Option<Vec<Rat>> {
        if self.is_zero() || self.terms.iter().any(|(m, _)| m.degree() != 1) {
            return None;
        }
        let mut v = vec![Rat::zero(); self.nvars];
        for (m, c) in &self.terms {
            let i = (0..self.nvars).find(|&i| m.exponent(i) == 1).unwrap();
            v[i] = c.clone();
        }
        Some(v)
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly::from_sorted(
            self.nvars,
            self.terms.iter().map(|(m, a)| (*m, a * c)).collect(),
        )
    }

    pub fn mul_monomial(&self, m: Monomial, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly::from_sorted(
            self.nvars,
            self.terms.iter().map(|(t, a)| (t.mul(m), a * c)).collect(),
        )
    }

    fn check_compat(&self, other: &Poly) {
        assert_eq!(self.nvars, other.nvars, "polynomials over different rings");
    }

    fn merge(&self, other: &Poly, negate: bool) -> Poly {
        self.check_compat(other);
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0, c));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        for (m, c) in &b[j..] {
            out.push((*m, if negate { -c } else { c.clone() }));
        }
        Poly::from_sorted(self.nvars, out)
    }

    pub fn mul_poly(&self, other: &Poly) -> Poly {
        self.check_compat(other);
        let (big, small) = if self.len() >= other.len() { (self, other) } else { (other, self) };
        if small.is_zero() {
            return Poly::zero(self.nvars);
        }
        if small.len() <= 4 {
            // shifted copies of a sorted list stay sorted; merge them
            let mut acc = big.mul_monomial(small.terms[0].0, &small.terms[0].1);
            for (m, c) in &small.terms[1..] {
                acc = acc.merge(&big.mul_monomial(*m, c), false);
            }
            return acc;
        }
        let mut acc: FxHashMap<Monomial, Rat> =
            FxHashMap::with_capacity_and_hasher(big.len() * 2, Default::default());
        for (mb, cb) in &big.terms {
            for (ms, cs) in &small.terms {
                let p = cb * cs;
                acc.entry(mb.mul(*ms))
                    .and_modify(|e| *e += &p)
                    .or_insert(p);
            }
        }
        Poly::from_map(self.nvars, acc)
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut result = Poly::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_poly(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_poly(&base);
            }
        }
        result
    }

    /// ∂/∂x_i.
    pub fn partial(&self, i: usize) -> Poly {
        assert!(i < self.nvars);
        let terms = self
            .terms
            .iter()
            .filter_map(|(m, c)| {
                let e = m.exponent(i);
                (e > 0).then(|| (m.with_exponent(i, e - 1), c * &Rat::from_int(e as i64)))
            })
            .collect::<Vec<_>>();
        // lowering one exponent preserves grlex order among the survivors
        Poly::from_sorted(self.nvars, terms)
    }

    pub fn eval(&self, point: &[Rat]) -> Rat {
        assert_eq!(point.len(), self.nvars);
        let mut powers: Vec<Vec<Rat>> = point.iter().map(|x| vec![Rat::one(), x.clone()]).collect();
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, table) in powers.iter_mut().enumerate() {
                let e = m.exponent(i) as usize;
                if e == 0 {
                    continue;
                }
                while table.len() <= e {
                    let next = &table[table.len() - 1] * &point[i];
                    table.push(next);
                }
                t *= &table[e];
            }
            acc += &t;
        }
        acc
    }

    /// Value modulo a prime `p` at a point given by residues; `None` when `p`
    /// divides a coefficient denominator.
    pub fn eval_mod(&self, point: &[u64], p: u64) -> Option<u64> {
        assert_eq!(point.len(), self.nvars);
        let mut powers: Vec<Vec<u64>> = point.iter().map(|&x| vec![1 % p, x % p]).collect();
        let mut acc = 0u64;
        // denominators repeat across terms; invert each one once
        let mut inverses: Vec<(i64, u64)> = Vec::new();
        for (m, c) in &self.terms {
            let mut t = match c.small_parts() {
                Some((n, 1)) => n.rem_euclid(p as i64) as u64,
                Some((n, d)) => {
                    let inv = match inverses.iter().find(|(e, _)| *e == d) {
                        Some(&(_, inv)) => inv,
                        None => {
                            let inv = inv_mod(d as u64 % p, p)?;
                            inverses.push((d, inv));
                            inv
                        }
                    };
                    mul_mod(n.rem_euclid(p as i64) as u64, inv, p)
                }
                None => c.residue(p)?,
            };
            for (i, table) in powers.iter_mut().enumerate() {
                let e = m.exponent(i) as usize;
                if e == 0 {
                    continue;
                }
                while table.len() <= e {
                    let next = mul_mod(table[table.len() - 1], point[i], p);
                    table.push(next);
                }
                t = mul_mod(t, table[e], p);
            }
            acc = (acc + t) % p;
        }
        Some(acc)
    }

    /// Exact quotient by a homogeneous linear form, or `None` if it does not
    /// divide. Synthetic division in the first variable that occurs in `alpha`;
    /// the final remainder is `p` evaluated on the hyperplane `alpha = 0`.
    pub fn div_linear(&self, alpha: &LinearForm) -> Option<Poly> {
        self.check_compat(&alpha.poly);
        if self.is_zero() {
            return Some(self.clone());
        }
        let piv = alpha.pivot;
        let c_inv = alpha.coeffs[piv].recip().unwrap();
        let rest = &alpha.rest;
        // a_k: coefficient of x_piv^k
        let mut slices: BTreeMap<u32, Vec<(Monomial, Rat)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exponent(piv);
            slices.entry(e).or_default().push((m.with_exponent(piv, 0), c.clone()));
        }
        let n = *slices.keys().next_back().unwrap();
        if n == 0 {
            return None;
        }
        let mut slice_of = |k: u32| -> Poly {
            match slices.remove(&k) {
                Some(mut t) => {
                    sort_desc(&mut t);
                    Poly::from_sorted(self.nvars, t)
                }
                None => Poly::zero(self.nvars),
            }
        };
        // b_{n-1} = a_n / c ; b_{k-1} = (a_k - rest*b_k)/c ; remainder a_0 - rest*b_0
        let mut quotient_slices: Vec<Poly> = vec![Poly::zero(self.nvars); n as usize];
        let mut b = slice_of(n).scale(&c_inv);
        for k in (1..n).rev() {
            let next = (&slice_of(k) - &rest.mul_poly(&b)).scale(&c_inv);
            quotient_slices[k as usize] = std::mem::replace(&mut b, next);
        }
        let remainder = &slice_of(0) - &rest.mul_poly(&b);
        if !remainder.is_zero() {
            return None;
        }
        quotient_slices[0] = b;
        let mut terms = Vec::new();
        for (k, s) in quotient_slices.into_iter().enumerate() {
            for (m, c) in s.terms {
                terms.push((m.with_exponent(piv, k as u32), c));
            }
        }
        sort_desc(&mut terms);
        Some(Poly::from_sorted(self.nvars, terms))
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    /// For a single divisor the leading-term reduction leaves remainder zero
    /// exactly when the division is exact, so the first non-divisible leading
    /// term is a certificate of non-divisibility.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        self.check_compat(d);
        assert!(!d.is_zero(), "division by zero polynomial");
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip().unwrap()));
        }
        let (lm, lc) = d.terms[0].clone();
        let lc_inv = lc.recip().unwrap();
        let mut rem: BTreeMap<Monomial, Rat> = self.terms.iter().cloned().collect();
        let mut quot = Vec::new();
        while let Some((m, c)) = rem.pop_last() {
            if !lm.divides(m) {
                return None;
            }
            let qm = lm.div_unchecked(m);
            let qc = &c * &lc_inv;
            for (dm, dc) in &d.terms[1..] {
                let key = qm.mul(*dm);
                let delta = &qc * dc;
                match rem.get_mut(&key) {
                    Some(v) => {
                        *v -= &delta;
                        if v.is_zero() {
                            rem.remove(&key);
                        }
                    }
                    None => {
                        rem.insert(key, -delta);
                    }
                }
            }
            quot.push((qm, qc));
        }
        Some(Poly::from_sorted(self.nvars, quot))
    }

    /// Pullback under the linear substitution `x_i ↦ images[i]`.
    pub fn substitute(&self, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.nvars);
        let n = self.nvars;
        // images that are a single scaled variable act on monomials directly
        let simple: Vec<Option<(usize, Rat)>> = images
            .iter()
            .map(|p| match p.terms.as_slice() {
                [(m, c)] if m.degree() == 1 => {
                    Some(((0..n).find(|&j| m.exponent(j) == 1).unwrap(), c.clone()))
                }
                _ => None,
            })
            .collect();
        let mut pow_cache: Vec<Vec<Poly>> = vec![Vec::new(); n];
        let mut acc: FxHashMap<Monomial, Rat> = FxHashMap::default();
        for (m, c) in &self.terms {
            let mut mono = Monomial::ONE;
            let mut coeff = c.clone();
            let mut factor: Option<Poly> = None;
            for i in 0..n {
                let e = m.exponent(i);
                if e == 0 {
                    continue;
                }
                match &simple[i] {
                    Some((j, s)) => {
                        let mut exps = [0u32; MAX_VARS];
                        exps[*j] = e;
                        mono = mono.mul(Monomial::from_exponents(&exps[..n]));
                        coeff = &coeff * &s.pow(e);
                    }
                    None => {
                        let cache = &mut pow_cache[i];
                        if cache.is_empty() {
                            cache.push(Poly::one(n));
                        }
                        while cache.len() <= e as usize {
                            let next = cache.last().unwrap().mul_poly(&images[i]);
                            cache.push(next);
                        }
                        let pw = &cache[e as usize];
                        factor = Some(match factor {
                            None => pw.clone(),
                            Some(f) => f.mul_poly(pw),
                        });
                    }
                }
            }
            match factor {
                None => {
                    acc.entry(mono).and_modify(|v| *v += &coeff).or_insert(coeff);
                }
                Some(f) => {
                    for (fm, fc) in &f.terms {
                        let v = &coeff * fc;
                        acc.entry(fm.mul(mono)).and_modify(|x| *x += &v).or_insert(v);
                    }
                }
            }
        }
        Poly::from_map(n, acc)
    }

    /// Renders with the given variable names, e.g. `3*x^2*y - 1/2`.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }

    /// Reinterprets in a ring with more variables (new ones unused).
    pub fn extend_vars(&self, nvars: usize) -> Poly {
        assert!(nvars >= self.nvars && nvars <= MAX_VARS);
        Poly { nvars, terms: self.terms.clone() }
    }
}

/// A nonzero homogeneous linear form with its synthetic-division data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearForm {
    poly: Poly,
    coeffs: Vec<Rat>,
    pivot: usize,
    rest: Poly,
}

impl LinearForm {
    pub fn new(coeffs: Vec<Rat>) -> Option<LinearForm> {
        let pivot = coeffs.iter().position(|c| !c.is_zero())?;
        let poly = Poly::linear(&coeffs);
        let mut rest_coeffs = coeffs.clone();
        rest_coeffs[pivot] = Rat::zero();
        let rest = Poly::linear(&rest_coeffs);
        Some(LinearForm { poly, coeffs, pivot, rest })
    }

    pub fn from_poly(p: &Poly) -> Option<LinearForm> {
        LinearForm::new(p.linear_coeffs()?)
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Whether `other` is a nonzero scalar multiple of `self`.
    pub fn proportional(&self, other: &LinearForm) -> bool {
        let p = self.pivot;
        if other.coeffs[p].is_zero() {
            return false;
        }
        let ratio = &other.coeffs[p] / &self.coeffs[p];
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .all(|(a, b)| &(a * &ratio) == b)
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    names: &'a [String],
}

fn write_monomial(f: &mut fmt::Formatter<'_>, m: Monomial, names: &[String], n: usize) -> fmt::Result {
    let mut first = true;
    for i in 0..n {
        let e = m.exponent(i);
        if e == 0 {
            continue;
        }
        if !first {
            write!(f, "*")?;
        }
        first = false;
        write!(f, "{}", names[i])?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.poly;
        if p.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in p.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if *m == Monomial::ONE {
                write!(f, "{a}")?;
            } else {
                if !a.is_one() {
                    write!(f, "{a}*")?;
                }
                write_monomial(f, *m, self.names, p.nvars)?;
            }
        }
        Ok(())
    }
}

/// Default names `x1, x2, …`.
pub fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_names(self.nvars);
        write!(f, "{}", self.display_with(&names))
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.merge(rhs, false)
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.merge(rhs, true)
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.mul_poly(rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::from_sorted(self.nvars, self.terms.iter().map(|(m, c)| (*m, -c)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: usize, i: usize) -> Poly {
        Poly::var(n, i)
    }

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    #[test]
    fn grlex_order_and_display() {
        let (a, b) = (x(2, 0), x(2, 1));
        let p = &(&(&a * &a) + &b) + &(&a * &b);
        let names = vec!["x".to_string(), "y".to_string()];
        assert_eq!(p.display_with(&names).to_string(), "x^2 + x*y + y");
    }

    #[test]
    fn difference_of_fourth_powers() {
        let (a, b) = (x(2, 0), x(2, 1));
        let s = &a.pow(2) + &b.pow(2);
        let d = &a.pow(2) - &b.pow(2);
        assert_eq!(&s * &d, &a.pow(4) - &b.pow(4));
    }

    #[test]
    fn partial_of_quartic() {
        let (a, b) = (x(2, 0), x(2, 1));
        let p = &a.pow(4) + &b.pow(4);
        assert_eq!(p.partial(0), a.pow(3).scale(&r(4)));
        assert!(Poly::constant(2, r(5)).partial(1).is_zero());
    }

    #[test]
    fn divide_by_linear_examples() {
        let (a, b) = (x(2, 0), x(2, 1));
        let alpha = LinearForm::from_poly(&(&a - &b)).unwrap();
        let p = &a.pow(2) - &b.pow(2);
        assert_eq!(p.div_linear(&alpha), Some(&a + &b));
        let p2 = &a.pow(2) + &b.pow(2);
        assert_eq!(p2.div_linear(&alpha), None);
        let q = &(&(&a * &b) * &(&a + &b)) * &(&a - &b);
        let plus = LinearForm::from_poly(&(&a + &b)).unwrap();
        assert_eq!(q.div_linear(&plus), Some(&(&a * &b) * &(&a - &b)));
        // constants are never divisible
        assert_eq!(Poly::one(2).div_linear(&plus), None);
    }

    #[test]
    fn exact_division() {
        let (a, b, c) = (x(3, 0), x(3, 1), x(3, 2));
        let f = &(&a + &(&b * &c)) * &(&(&a * &a) - &c);
        assert_eq!(f.div_exact(&(&a + &(&b * &c))), Some(&(&a * &a) - &c));
        assert_eq!(f.div_exact(&(&a + &b)), None);
    }

    #[test]
    fn substitution_swap_and_general() {
        let (a, b) = (x(2, 0), x(2, 1));
        let p = &a.pow(2) + &b.pow(2);
        assert_eq!(p.substitute(&[b.clone(), a.clone()]), p);
        assert_eq!(a.substitute(&[-&a, b.clone()]), -&a);
        // (x + y)^2 under y -> x + y
        let q = (&a + &b).pow(2);
        let sub = q.substitute(&[a.clone(), &a + &b]);
        assert_eq!(sub, (&a.scale(&r(2)) + &b).pow(2));
    }

    #[test]
    fn eval_matches() {
        let (a, b) = (x(2, 0), x(2, 1));
        let p = &(&a.pow(3) * &b) - &b.scale(&Rat::new(1, 2));
        assert_eq!(p.eval(&[r(2), r(3)]), Rat::new(45, 2));
    }
}
