//! The localization `S[1/Q]` of the polynomial ring at the defining polynomial
//! of an arrangement.
//!
//! Every element is stored as `num / Q^e` with `Q ∤ num` whenever `e > 0`,
//! which makes the representation unique. Because `Q` is a product of distinct
//! linear forms, division by `Q` is carried out as one synthetic division per
//! hyperplane; no multivariate gcd is ever needed.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, RwLock};

use crate::linsolve::{inv_mod, mul_mod};
use crate::poly::{LinearForm, Poly};
use crate::rat::Rat;

/// The ring data shared by every [`LocQ`]: variable names, the hyperplane
/// forms `α_H`, and `Q = ∏ α_H` with a cache of its powers.
pub struct Ambient {
    names: Vec<String>,
    factors: Vec<LinearForm>,
    q: Poly,
    q_powers: RwLock<Vec<Arc<Poly>>>,
}

impl fmt::Debug for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Ambient")
            .field("names", &self.names)
            .field("q", &self.q)
            .finish()
    }
}

impl Ambient {
    pub fn new(names: Vec<String>, factors: Vec<LinearForm>) -> Arc<Ambient> {
        let n = names.len();
        let q = factors
            .iter()
            .fold(Poly::one(n), |acc, f| acc.mul_poly(f.poly()));
        Arc::new(Ambient {
            names,
            factors,
            q_powers: RwLock::new(vec![Arc::new(Poly::one(n)), Arc::new(q.clone())]),
            q,
        })
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn factors(&self) -> &[LinearForm] {
        &self.factors
    }

    pub fn q(&self) -> &Poly {
        &self.q
    }

    pub fn q_degree(&self) -> u32 {
        self.factors.len() as u32
    }

    pub fn q_pow(&self, k: u32) -> Arc<Poly> {
        if let Some(p) = self.q_powers.read().unwrap().get(k as usize) {
            return p.clone();
        }
        let mut cache = self.q_powers.write().unwrap();
        while cache.len() <= k as usize {
            let next = cache.last().unwrap().mul_poly(&self.q);
            cache.push(Arc::new(next));
        }
        cache[k as usize].clone()
    }

    /// `p / Q` when `Q | p`.
    pub fn div_q(&self, p: &Poly) -> Option<Poly> {
        let mut cur = p.clone();
        for f in &self.factors {
            cur = cur.div_linear(f)?;
        }
        Some(cur)
    }

    /// `p / α^k`, by `k` successive linear divisions.
    pub fn div_linear_pow(p: &Poly, alpha: &LinearForm, k: u32) -> Option<Poly> {
        let mut cur = p.clone();
        for _ in 0..k {
            cur = cur.div_linear(alpha)?;
        }
        Some(cur)
    }

    pub fn zero(self: &Arc<Self>) -> LocQ {
        LocQ { num: Poly::zero(self.nvars()), q_exp: 0, amb: self.clone() }
    }

    pub fn one(self: &Arc<Self>) -> LocQ {
        self.constant(Rat::one())
    }

    pub fn constant(self: &Arc<Self>, c: Rat) -> LocQ {
        LocQ { num: Poly::constant(self.nvars(), c), q_exp: 0, amb: self.clone() }
    }

    pub fn poly(self: &Arc<Self>, p: Poly) -> LocQ {
        assert_eq!(p.nvars(), self.nvars());
        LocQ { num: p, q_exp: 0, amb: self.clone() }
    }

    pub fn var(self: &Arc<Self>, i: usize) -> LocQ {
        self.poly(Poly::var(self.nvars(), i))
    }

    /// `num / Q^e`, normalized.
    pub fn frac(self: &Arc<Self>, num: Poly, e: u32) -> LocQ {
        LocQ::normalized(self.clone(), num, e)
    }
}

/// An element `num / Q^q_exp` of `S[1/Q]` in canonical form.
#[derive(Clone)]
pub struct LocQ {
    num: Poly,
    q_exp: u32,
    amb: Arc<Ambient>,
}

impl PartialEq for LocQ {
    fn eq(&self, other: &LocQ) -> bool {
        self.q_exp == other.q_exp && self.num == other.num
    }
}

impl Eq for LocQ {}

impl fmt::Debug for LocQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for LocQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.amb.names();
        match self.q_exp {
            0 => write!(f, "{}", self.num.display_with(names)),
            1 => write!(f, "({})/Q", self.num.display_with(names)),
            e => write!(f, "({})/Q^{e}", self.num.display_with(names)),
        }
    }
}

impl LocQ {
    fn normalized(amb: Arc<Ambient>, mut num: Poly, mut e: u32) -> LocQ {
        while e > 0 && !num.is_zero() {
            match amb.div_q(&num) {
                Some(q) => {
                    num = q;
                    e -= 1;
                }
                None => break,
            }
        }
        if num.is_zero() {
            e = 0;
        }
        LocQ { num, q_exp: e, amb }
    }

    pub fn ambient(&self) -> &Arc<Ambient> {
        &self.amb
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn q_exp(&self) -> u32 {
        self.q_exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// A polynomial (no pole along the arrangement).
    pub fn is_regular(&self) -> bool {
        self.q_exp == 0
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        (self.q_exp == 0).then_some(&self.num)
    }

    pub fn as_constant(&self) -> Option<Rat> {
        self.as_poly().and_then(|p| p.as_constant())
    }

    /// Degree of a homogeneous element as a rational function.
    pub fn degree(&self) -> Option<i64> {
        if !self.num.is_homogeneous() {
            return None;
        }
        self.num
            .degree()
            .map(|d| d as i64 - (self.q_exp * self.amb.q_degree()) as i64)
    }

    /// Writes `self = c · Q^k` if possible.
    pub fn as_const_times_q_power(&self) -> Option<(Rat, i64)> {
        if self.is_zero() {
            return None;
        }
        if self.q_exp > 0 {
            return self.num.as_constant().map(|c| (c, -(self.q_exp as i64)));
        }
        let mut cur = self.num.clone();
        let mut k = 0i64;
        loop {
            if let Some(c) = cur.as_constant() {
                return Some((c, k));
            }
            cur = self.amb.div_q(&cur)?;
            k += 1;
        }
    }

    /// Same element written over `Q^e` (`e ≥ q_exp`): the numerator `num·Q^(e-q_exp)`.
    pub fn numerator_over(&self, e: u32) -> Poly {
        assert!(e >= self.q_exp);
        self.num.mul_poly(&self.amb.q_pow(e - self.q_exp))
    }

    pub fn scale(&self, c: &Rat) -> LocQ {
        if c.is_zero() {
            return self.amb.zero();
        }
        LocQ { num: self.num.scale(c), q_exp: self.q_exp, amb: self.amb.clone() }
    }

    pub fn mul_poly(&self, p: &Poly) -> LocQ {
        LocQ::normalized(self.amb.clone(), self.num.mul_poly(p), self.q_exp)
    }

    /// Multiplies by `Q^k` for any integer `k`.
    pub fn mul_q_power(&self, k: i64) -> LocQ {
        if k >= 0 {
            let k = k as u32;
            let shift = k.min(self.q_exp);
            let num = self.num.mul_poly(&self.amb.q_pow(k - shift));
            LocQ { num, q_exp: self.q_exp - shift, amb: self.amb.clone() }
        } else {
            if self.is_zero() {
                return self.clone();
            }
            LocQ { num: self.num.clone(), q_exp: self.q_exp + (-k) as u32, amb: self.amb.clone() }
        }
    }

    pub fn pow(&self, e: u32) -> LocQ {
        let mut acc = self.amb.one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// ∂/∂x_i by the quotient rule: `∂(n/Q^e) = (∂n·Q − e·n·∂Q) / Q^(e+1)`.
    pub fn partial(&self, i: usize) -> LocQ {
        if self.q_exp == 0 {
            return self.amb.poly(self.num.partial(i));
        }
        let e = self.q_exp;
        let dn = self.num.partial(i).mul_poly(&self.amb.q);
        let dq = self.num.mul_poly(&self.amb.q.partial(i)).scale(&Rat::from_int(e as i64));
        LocQ::normalized(self.amb.clone(), &dn - &dq, e + 1)
    }

    /// Multiplicative inverse when `self` is a unit of `S[1/Q]`, i.e. a nonzero
    /// constant times a product of hyperplane forms (repetition allowed).
    pub fn try_inverse(&self) -> Option<LocQ> {
        if self.is_zero() {
            return None;
        }
        let mut cur = self.num.clone();
        let mut mult = vec![0u32; self.amb.factors.len()];
        for (k, f) in self.amb.factors.iter().enumerate() {
            while let Some(q) = cur.div_linear(f) {
                cur = q;
                mult[k] += 1;
            }
        }
        let c = cur.as_constant()?;
        let r = mult.iter().copied().max().unwrap_or(0);
        // 1/num = (1/c) ∏ α^(r - a_H) / Q^r
        let mut num = Poly::constant(self.amb.nvars(), c.recip().unwrap());
        for (k, f) in self.amb.factors.iter().enumerate() {
            for _ in mult[k]..r {
                num = num.mul_poly(f.poly());
            }
        }
        let inv = LocQ::normalized(self.amb.clone(), num, r);
        Some(inv.mul_q_power(self.q_exp as i64))
    }

    /// Value at a point off the arrangement; `None` where `Q` vanishes.
    pub fn eval(&self, point: &[Rat]) -> Option<Rat> {
        let n = self.num.eval(point);
        if self.q_exp == 0 {
            return Some(n);
        }
        let q = self.amb.q.eval(point).recip()?;
        Some(&n * &q.pow(self.q_exp))
    }

    /// Value modulo a prime `p`; `None` where `Q ≡ 0` or a denominator
    /// vanishes.
    pub fn eval_mod(&self, point: &[u64], p: u64) -> Option<u64> {
        let n = self.num.eval_mod(point, p)?;
        if self.q_exp == 0 {
            return Some(n);
        }
        let q = inv_mod(self.amb.q.eval_mod(point, p)?, p)?;
        let mut qe = 1;
        for _ in 0..self.q_exp {
            qe = mul_mod(qe, q, p);
        }
        Some(mul_mod(n, qe, p))
    }

    /// Exact quotient `self / d` in `S[1/Q]`, or `None` if `d` does not divide.
    pub fn div_exact(&self, d: &LocQ) -> Option<LocQ> {
        assert!(!d.is_zero(), "division by zero");
        if self.is_zero() {
            return Some(self.clone());
        }
        // d.num = u·r with u a product of hyperplane forms; u is a unit
        let mut r = d.num.clone();
        let mut mult = vec![0u32; self.amb.factors.len()];
        for (k, f) in self.amb.factors.iter().enumerate() {
            while let Some(q) = r.div_linear(f) {
                r = q;
                mult[k] += 1;
            }
        }
        let quot = self.num.div_exact(&r)?;
        // quot / u = quot · ∏ α^(t − a_H) / Q^t
        let t = mult.iter().copied().max().unwrap_or(0);
        let mut num = quot;
        for (k, f) in self.amb.factors.iter().enumerate() {
            for _ in mult[k]..t {
                num = num.mul_poly(f.poly());
            }
        }
        let shift = d.q_exp as i64 - self.q_exp as i64 - t as i64;
        let e = if shift < 0 { (-shift) as u32 } else { 0 };
        let base = LocQ::normalized(self.amb.clone(), num, e);
        Some(if shift > 0 { base.mul_q_power(shift) } else { base })
    }

    /// Pullback under a linear substitution `x_i ↦ images[i]` that maps `Q` to
    /// `q_sign · Q`.
    pub fn substitute(&self, images: &[Poly], q_sign: &Rat) -> LocQ {
        let mut num = self.num.substitute(images);
        if self.q_exp > 0 {
            num = num.scale(&q_sign.pow(self.q_exp).recip().expect("zero Q sign"));
        }
        LocQ::normalized(self.amb.clone(), num, self.q_exp)
    }

    fn aligned(&self, other: &LocQ) -> (Poly, Poly, u32) {
        debug_assert!(Arc::ptr_eq(&self.amb, &other.amb), "mixed ambients");
        let e = self.q_exp.max(other.q_exp);
        (self.numerator_over(e), other.numerator_over(e), e)
    }
}

impl<'a> Add<&'a LocQ> for &'a LocQ {
    type Output = LocQ;
    fn add(self, rhs: &LocQ) -> LocQ {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        let (a, b, e) = self.aligned(rhs);
        LocQ::normalized(self.amb.clone(), &a + &b, e)
    }
}

impl<'a> Sub<&'a LocQ> for &'a LocQ {
    type Output = LocQ;
    fn sub(self, rhs: &LocQ) -> LocQ {
        if rhs.is_zero() {
            return self.clone();
        }
        let (a, b, e) = self.aligned(rhs);
        LocQ::normalized(self.amb.clone(), &a - &b, e)
    }
}

impl<'a> Mul<&'a LocQ> for &'a LocQ {
    type Output = LocQ;
    fn mul(self, rhs: &LocQ) -> LocQ {
        debug_assert!(Arc::ptr_eq(&self.amb, &rhs.amb), "mixed ambients");
        if self.is_zero() || rhs.is_zero() {
            return self.amb.zero();
        }
        let num = self.num.mul_poly(&rhs.num);
        let e = self.q_exp + rhs.q_exp;
        // a pole can only cancel if some factor divides the other numerator
        if e == 0 {
            return LocQ { num, q_exp: 0, amb: self.amb.clone() };
        }
        LocQ::normalized(self.amb.clone(), num, e)
    }
}

impl Neg for &LocQ {
    type Output = LocQ;
    fn neg(self) -> LocQ {
        LocQ { num: -&self.num, q_exp: self.q_exp, amb: self.amb.clone() }
    }
}

macro_rules! forward_owned_locq {
    ($tr:ident, $m:ident) => {
        impl $tr<LocQ> for LocQ {
            type Output = LocQ;
            fn $m(self, rhs: LocQ) -> LocQ {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a LocQ> for LocQ {
            type Output = LocQ;
            fn $m(self, rhs: &'a LocQ) -> LocQ {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned_locq!(Add, add);
forward_owned_locq!(Sub, sub);
forward_owned_locq!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    /// B2: Q = x·y·(x+y)·(x−y)
    fn b2() -> Arc<Ambient> {
        let forms = [[1, 0], [0, 1], [1, 1], [1, -1]]
            .iter()
            .map(|c| LinearForm::new(c.iter().map(|&v| Rat::from_int(v)).collect()).unwrap())
            .collect();
        Ambient::new(vec!["x".into(), "y".into()], forms)
    }

    #[test]
    fn q_is_product_of_factors() {
        let amb = b2();
        let (x, y) = (Poly::var(2, 0), Poly::var(2, 1));
        let expect = &(&x * &y) * &(&(&x * &x) - &(&y * &y));
        assert_eq!(amb.q(), &expect);
    }

    #[test]
    fn normalization_examples() {
        let amb = b2();
        let x = Poly::var(2, 0);
        let q2 = amb.q_pow(2);
        let f = amb.frac(x.mul_poly(&q2), 3);
        assert_eq!(f.num(), &x);
        assert_eq!(f.q_exp(), 1);
        let g = amb.frac(x.clone(), 0);
        assert_eq!((g.num(), g.q_exp()), (&x, 0));
        let h = amb.frac(amb.q().clone(), 1);
        assert_eq!(h.as_constant(), Some(Rat::one()));
    }

    #[test]
    fn product_of_poles_normalizes() {
        let amb = b2();
        let (x, y) = (Poly::var(2, 0), Poly::var(2, 1));
        let p = amb.frac(x.clone(), 1);
        let q = amb.frac(y.clone(), 1);
        let prod = &p * &q;
        assert_eq!(prod.q_exp(), 2);
        let qx = amb.frac(amb.q().mul_poly(&x), 1);
        assert_eq!(qx, amb.poly(x.clone()));
        // (Q/x)·(1/Q) = 1/x = (Q/x)/Q stays a pole of order one
        let back = amb.frac(amb.q().div_linear(&amb.factors()[0]).unwrap(), 1);
        assert_eq!(back.try_inverse().unwrap(), amb.poly(x));
    }

    #[test]
    fn quotient_rule() {
        let amb = b2();
        let y = Poly::var(2, 1);
        let f = amb.frac(y.clone(), 1);
        let expect = amb.frac(-&y.mul_poly(&amb.q().partial(0)), 2);
        assert_eq!(f.partial(0), expect);
    }

    #[test]
    fn units_and_non_units() {
        let amb = b2();
        let x = Poly::var(2, 0);
        let unit = amb.poly(x.pow(2).scale(&Rat::from_int(3)));
        let inv = unit.try_inverse().unwrap();
        assert_eq!((&unit * &inv).as_constant(), Some(Rat::one()));
        let non = amb.poly(&x.pow(2) + &Poly::var(2, 1).pow(2));
        assert!(non.try_inverse().is_none());
        assert_eq!(
            amb.frac(Poly::constant(2, Rat::from_int(2)), 3).as_const_times_q_power(),
            Some((Rat::from_int(2), -3))
        );
        assert_eq!(
            amb.poly(amb.q_pow(2).scale(&Rat::from_int(-1))).as_const_times_q_power(),
            Some((Rat::from_int(-1), 2))
        );
    }
}
