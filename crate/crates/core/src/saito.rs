//! The primitive derivation and the matrices `J(P)`, `G`, `B`, `B^(k)`, `R_m`, `Y_m`.

use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use rayon::prelude::*;

use crate::coxeter::CoxeterDatum;
use crate::error::{Error, Result};
use crate::locq::{Ambient, LocQ};
use crate::matrix::SqMatrix;
use crate::poly::Poly;
use crate::rat::Rat;

/// `D = ∂/∂P_ℓ`, stored through its values `D(x_i)` written over a common `Q^c`.
#[derive(Clone, Debug)]
pub struct PrimitiveDerivation {
    amb: Arc<Ambient>,
    dx: Vec<LocQ>,
    /// `D(x_i) = p[i] / Q^c`
    p: Vec<Poly>,
    c: u32,
    /// `Σ_i ∂_i Q · p[i]`
    q1: Poly,
}

impl PrimitiveDerivation {
    /// Reads `D(x_i)` off the last column of `J(P)^{-T}`.
    pub fn new(datum: &CoxeterDatum) -> Result<PrimitiveDerivation> {
        let j_inv = datum.jacobian().inverse()?;
        let l = datum.rank();
        let dx: Vec<LocQ> = (0..l).map(|i| j_inv.get(l - 1, i).clone()).collect();
        Ok(PrimitiveDerivation::from_values(datum.ambient().clone(), dx))
    }

    pub fn from_values(amb: Arc<Ambient>, dx: Vec<LocQ>) -> PrimitiveDerivation {
        let c = dx.iter().map(LocQ::q_exp).max().unwrap_or(0);
        let p: Vec<Poly> = dx.iter().map(|v| v.numerator_over(c)).collect();
        let q1 = p
            .iter()
            .enumerate()
            .fold(Poly::zero(amb.nvars()), |acc, (i, pi)| &acc + &amb.q().partial(i).mul_poly(pi));
        PrimitiveDerivation { amb, dx, p, c, q1 }
    }

    /// `D(x_1), …, D(x_ℓ)`.
    pub fn values(&self) -> &[LocQ] {
        &self.dx
    }

    /// `D f = Σ_i ∂f/∂x_i · D(x_i)`.
    pub fn apply(&self, f: &LocQ) -> LocQ {
        let n = f.num();
        let e = f.q_exp();
        let nv = self.amb.nvars();
        let grad = self
            .p
            .iter()
            .enumerate()
            .fold(Poly::zero(nv), |acc, (i, pi)| &acc + &n.partial(i).mul_poly(pi));
        if e == 0 {
            return self.amb.frac(grad, self.c);
        }
        // D(n/Q^e) = (Q·Σ ∂_i n p_i − e·n·Σ ∂_i Q p_i) / Q^(e+1+c)
        let top = &grad.mul_poly(self.amb.q()) - &n.mul_poly(&self.q1).scale(&Rat::from_int(e as i64));
        self.amb.frac(top, e + 1 + self.c)
    }

    /// Entrywise `D[M]`.
    pub fn apply_matrix(&self, m: &SqMatrix) -> SqMatrix {
        m.map(|f| self.apply(f))
    }

    pub fn apply_vec(&self, v: &[LocQ]) -> Vec<LocQ> {
        v.par_iter().map(|f| self.apply(f)).collect()
    }
}

/// Jacobian `[∂f_j/∂x_i]` of a vector of functions.
pub fn jacobian_of(amb: &Arc<Ambient>, f: &[LocQ]) -> SqMatrix {
    let l = amb.nvars();
    SqMatrix::from_fn(l, |i, j| f[j].partial(i))
}

/// `f ≐ Q^k`: returns the constant `c` with `f = c·Q^k`.
pub fn q_power_constant(f: &LocQ, k: i64) -> Option<Rat> {
    match f.as_const_times_q_power() {
        Some((c, kk)) if kk == k => Some(c),
        _ => None,
    }
}

type Cache = RwLock<BTreeMap<i64, Arc<SqMatrix>>>;

fn cached(cache: &Cache, key: i64, make: impl FnOnce() -> SqMatrix) -> Arc<SqMatrix> {
    if let Some(m) = cache.read().unwrap().get(&key) {
        return m.clone();
    }
    let m = Arc::new(make());
    cache.write().unwrap().entry(key).or_insert(m).clone()
}

/// The matrices attached to one datum, with `R_m` and `R_m^{-1}` cached by index.
pub struct MatrixFamily {
    datum: Arc<CoxeterDatum>,
    d: PrimitiveDerivation,
    a: SqMatrix,
    a_inv: SqMatrix,
    j: SqMatrix,
    j_inv: SqMatrix,
    g: SqMatrix,
    b: SqMatrix,
    b_inv: SqMatrix,
    dg: SqMatrix,
    /// `D^k[J(P)]` for k = 0, 1, …
    dj: RwLock<Vec<Arc<SqMatrix>>>,
    /// `D^k[x]` for k = 0, 1, …
    dkx: RwLock<Vec<Arc<Vec<LocQ>>>>,
    r: Cache,
    r_inv: Cache,
    bk: Cache,
    bk_inv: Cache,
}

impl MatrixFamily {
    pub fn new(datum: Arc<CoxeterDatum>) -> Result<MatrixFamily> {
        let amb = datum.ambient().clone();
        let d = PrimitiveDerivation::new(&datum)?;
        let a = datum.gram_matrix();
        let a_inv = SqMatrix::from_rat(&amb, &datum.gram().inverse().expect("gram is definite"));
        let j = datum.jacobian();
        let j_inv = j.inverse()?;
        let jt = j.transpose();
        let g = &(&jt * &a) * &j;
        let dj1 = d.apply_matrix(&j);
        let b = &(&jt * &a) * &dj1;
        let b_inv = b.inverse().map_err(|e| {
            Error::StructureViolation(format!("B is not invertible over S[1/Q]: {e}"))
        })?;
        if !b.is_polynomial() || !b_inv.is_polynomial() {
            return Err(Error::StructureViolation("B is not in GL(S)".into()));
        }
        let dg = &b + &b.transpose();
        let x: Vec<LocQ> = (0..datum.rank()).map(|i| amb.var(i)).collect();
        Ok(MatrixFamily {
            datum,
            d,
            a,
            a_inv,
            dj: RwLock::new(vec![Arc::new(j.clone()), Arc::new(dj1)]),
            j,
            j_inv,
            g,
            b,
            b_inv,
            dg,
            dkx: RwLock::new(vec![Arc::new(x)]),
            r: Cache::default(),
            r_inv: Cache::default(),
            bk: Cache::default(),
            bk_inv: Cache::default(),
        })
    }

    pub fn datum(&self) -> &Arc<CoxeterDatum> {
        &self.datum
    }

    pub fn ambient(&self) -> &Arc<Ambient> {
        self.datum.ambient()
    }

    pub fn derivation(&self) -> &PrimitiveDerivation {
        &self.d
    }

    pub fn identity(&self) -> SqMatrix {
        SqMatrix::identity(self.ambient(), self.datum.rank())
    }

    pub fn a(&self) -> &SqMatrix {
        &self.a
    }

    pub fn a_inv(&self) -> &SqMatrix {
        &self.a_inv
    }

    /// `J(P)`
    pub fn j(&self) -> &SqMatrix {
        &self.j
    }

    pub fn j_inv(&self) -> &SqMatrix {
        &self.j_inv
    }

    /// `G = J(P)^T A J(P)`
    pub fn g(&self) -> &SqMatrix {
        &self.g
    }

    /// `B = J(P)^T A D[J(P)]`
    pub fn b(&self) -> &SqMatrix {
        &self.b
    }

    pub fn b_inv(&self) -> &SqMatrix {
        &self.b_inv
    }

    /// `D[G]`, computed as `B + B^T`.
    pub fn dg(&self) -> &SqMatrix {
        &self.dg
    }

    /// `B^(k) = k·B + (k−1)·B^T`
    pub fn bk(&self, k: i64) -> Arc<SqMatrix> {
        cached(&self.bk, k, || {
            &self.b.scale(&Rat::from_int(k)) + &self.b.transpose().scale(&Rat::from_int(k - 1))
        })
    }

    pub fn bk_inv(&self, k: i64) -> Result<Arc<SqMatrix>> {
        if let Some(m) = self.bk_inv.read().unwrap().get(&k) {
            return Ok(m.clone());
        }
        let inv = self
            .bk(k)
            .inverse()
            .map_err(|e| Error::StructureViolation(format!("B^({k}) is not invertible: {e}")))?;
        Ok(cached(&self.bk_inv, k, || inv))
    }

    /// `D^k[J(P)]`
    pub fn d_power_j(&self, k: usize) -> Arc<SqMatrix> {
        loop {
            {
                let dj = self.dj.read().unwrap();
                if let Some(m) = dj.get(k) {
                    return m.clone();
                }
            }
            let last = self.dj.read().unwrap().last().unwrap().clone();
            let next = Arc::new(self.d.apply_matrix(&last));
            let mut dj = self.dj.write().unwrap();
            if dj.len() < k + 1 {
                dj.push(next);
            }
        }
    }

    /// `D^k[x] = (D^k x_1, …, D^k x_ℓ)`
    pub fn d_power_x(&self, k: usize) -> Arc<Vec<LocQ>> {
        loop {
            {
                let v = self.dkx.read().unwrap();
                if let Some(m) = v.get(k) {
                    return m.clone();
                }
            }
            let last = self.dkx.read().unwrap().last().unwrap().clone();
            let next = Arc::new(self.d.apply_vec(&last));
            let mut v = self.dkx.write().unwrap();
            if v.len() < k + 1 {
                v.push(next);
            }
        }
    }

    /// `J(D^k[x])`
    pub fn jacobian_d_power_x(&self, k: usize) -> SqMatrix {
        jacobian_of(self.ambient(), &self.d_power_x(k))
    }

    /// `R_m`: closed forms `D^k[J(P)]` and `D^(k+1)[J(P)]·D[J(P)]^{-1}` for
    /// negative indices, the recursions from `R_0 = I`, `R_1 = J(P)` for positive ones.
    pub fn r(&self, m: i64) -> Result<Arc<SqMatrix>> {
        if let Some(r) = self.r.read().unwrap().get(&m) {
            return Ok(r.clone());
        }
        let value = match m {
            0 => self.identity(),
            1 => self.j.clone(),
            m if m < 0 && m % 2 != 0 => (*self.d_power_j(((1 - m) / 2) as usize)).clone(),
            m if m < 0 => {
                // D[J]^{-1} = B^{-1} J^T A
                let k = (-m / 2) as usize;
                let dj_inv = &(&self.b_inv * &self.j.transpose()) * &self.a;
                &*self.d_power_j(k + 1) * &dj_inv
            }
            m if m % 2 == 0 => {
                // (2): R_2k = R_{2k−1} B^{-1} J^T A
                let prev = self.r(m - 1)?;
                &(&(&*prev * &self.b_inv) * &self.j.transpose()) * &self.a
            }
            m => {
                // (3): R_{2k+1} = R_2k J (B^(k+1))^{-1} B
                let k = (m - 1) / 2;
                let prev = self.r(m - 1)?;
                &(&(&*prev * &self.j) * &*self.bk_inv(k + 1)?) * &self.b
            }
        };
        Ok(cached(&self.r, m, || value))
    }

    /// `R_m^{-1}`, built from polynomial factors for `m ≤ 0`.
    pub fn r_inv(&self, m: i64) -> Result<Arc<SqMatrix>> {
        if let Some(r) = self.r_inv.read().unwrap().get(&m) {
            return Ok(r.clone());
        }
        let bt_ja = || &(&self.b_inv * &self.j.transpose()) * &self.a;
        let value = match m {
            0 => self.identity(),
            1 => self.j_inv.clone(),
            -1 => bt_ja(),
            m if m < 0 && m % 2 == 0 => {
                // R_{−2k}^{-1} = J (B^(1−k))^{-1} B R_{1−2k}^{-1}
                let k = -m / 2;
                let prev = self.r_inv(m + 1)?;
                &(&(&self.j * &*self.bk_inv(1 - k)?) * &self.b) * &*prev
            }
            m if m < 0 => {
                // R_{−2k−1}^{-1} = B^{-1} J^T A R_{−2k}^{-1}
                let prev = self.r_inv(m + 1)?;
                &bt_ja() * &*prev
            }
            m if m % 2 == 0 => {
                // R_2k^{-1} = A^{-1} J^{-T} B R_{2k−1}^{-1}
                let prev = self.r_inv(m - 1)?;
                &(&(&self.a_inv * &self.j_inv.transpose()) * &self.b) * &*prev
            }
            m => {
                // R_{2k+1}^{-1} = B^{-1} B^(k+1) J^{-1} R_2k^{-1}
                let k = (m - 1) / 2;
                let prev = self.r_inv(m - 1)?;
                &(&(&self.b_inv * &*self.bk(k + 1)) * &self.j_inv) * &*prev
            }
        };
        Ok(cached(&self.r_inv, m, || value))
    }

    /// The closed form of `R_m` straight from `J(D^k[x])`, used as an oracle.
    pub fn r_closed_form(&self, m: i64) -> Result<SqMatrix> {
        if m <= 1 {
            return self.r(m).map(|r| (*r).clone());
        }
        let k = (m + 1) / 2;
        let sign = Rat::from_int(if k % 2 == 0 { 1 } else { -1 });
        let jdk_inv = self.jacobian_d_power_x(k as usize).inverse()?.scale(&sign);
        Ok(if m % 2 == 0 { jdk_inv } else { &jdk_inv * &*self.d_power_j(1) })
    }

    /// `Y_m = R_{−m}^T A R_m`
    pub fn y(&self, m: i64) -> Result<SqMatrix> {
        Ok(&(&self.r(-m)?.transpose() * &self.a) * &*self.r(m)?)
    }

    /// The expected value of `Y_m`: `(−1)^k A` for `m = 2k`,
    /// `(−1)^(k+1) B^T (B^(k))^{-1} B` for `m = 2k − 1`.
    pub fn y_closed_form(&self, m: i64) -> Result<SqMatrix> {
        let sign = |k: i64| Rat::from_int(if k.rem_euclid(2) == 0 { 1 } else { -1 });
        Ok(if m % 2 == 0 {
            self.a.scale(&sign(m / 2))
        } else {
            let k = (m + 1) / 2;
            (&(&self.b.transpose() * &*self.bk_inv(k)?) * &self.b).scale(&sign(k + 1))
        })
    }
}

fn mismatch(what: &str, lhs: &SqMatrix, rhs: &SqMatrix) -> Option<String> {
    lhs.diff_report(rhs).map(|d| format!("{what}: {d}"))
}

/// Structural checks on `D`, `G`, `B`, `B^(k)` and `R_m`.
impl MatrixFamily {
    /// `D(P_j) = δ_{jℓ}` through the chain rule.
    pub fn check_derivation(&self) -> Result<()> {
        let l = self.datum.rank();
        for (j, p) in self.datum.invariants().iter().enumerate() {
            let v = self.d.apply(&self.ambient().poly(p.clone()));
            let want = if j == l - 1 { self.ambient().one() } else { self.ambient().zero() };
            if v != want {
                return Err(Error::StructureViolation(format!("D(P{}) = {v}", j + 1)));
            }
        }
        Ok(())
    }

    /// `D[G]` polynomial with nonzero constant determinant and `D²[G] = 0`;
    /// `D[G] = D` applied to `G` entrywise.
    pub fn check_dg(&self) -> Result<()> {
        let direct = self.d.apply_matrix(&self.g);
        if let Some(d) = mismatch("D[G] vs B + B^T", &direct, &self.dg) {
            return Err(Error::StructureViolation(d));
        }
        if !self.dg.is_polynomial() {
            return Err(Error::StructureViolation("D[G] has a pole".into()));
        }
        if !self.d.apply_matrix(&self.dg).is_zero() {
            return Err(Error::StructureViolation("D²[G] ≠ 0".into()));
        }
        match self.dg.det().as_constant() {
            Some(c) if !c.is_zero() => Ok(()),
            _ => Err(Error::StructureViolation("det D[G] is not a nonzero constant".into())),
        }
    }

    /// `B^(k)` polynomial, killed by `D`, W-invariant, constant nonzero
    /// determinant; `B^(k+1) − B^(k) = D[G]`; `B^(k) = −(B^(1−k))^T`.
    pub fn check_bk(&self, k: i64) -> Result<()> {
        let bk = self.bk(k);
        let fail = |m: String| Err(Error::StructureViolation(format!("B^({k}): {m}")));
        if !bk.is_polynomial() {
            return fail("has a pole".into());
        }
        if !self.d.apply_matrix(&bk).is_zero() {
            return fail("not killed by D".into());
        }
        if !bk.entries().iter().all(|e| self.datum.is_invariant(e)) {
            return fail("not W-invariant".into());
        }
        match bk.det().as_constant() {
            Some(c) if !c.is_zero() => {}
            _ => return fail("determinant is not a nonzero constant".into()),
        }
        if let Some(d) = mismatch("B^(k+1) − B^(k) vs D[G]", &(&*self.bk(k + 1) - &bk), &self.dg) {
            return fail(d);
        }
        if let Some(d) = mismatch("B^(k) vs −(B^(1−k))^T", &bk, &-&self.bk(1 - k).transpose()) {
            return fail(d);
        }
        Ok(())
    }

    /// `det R_m = c·Q^m`; returns `c`.
    pub fn check_det_r(&self, m: i64) -> Result<Rat> {
        let det = self.r(m)?.det();
        q_power_constant(&det, m)
            .ok_or_else(|| Error::StructureViolation(format!("det R_{m} = {det} is not ≐ Q^{m}")))
    }

    /// The identities tying `R_{2k−1}, R_{2k}, R_{2k+1}` together:
    /// (2) `R_2k = R_{2k−1} B^{-1} J^T A`, (3) `R_{2k+1} = R_2k J (B^(k+1))^{-1} B`,
    /// (4) `R_{2k+1} = R_{2k−1} B^{-1} G (B^(k+1))^{-1} B`, (5) `D[R_{2k+1}] = R_{2k−1}`.
    pub fn check_recursions(&self, k: i64) -> Result<()> {
        let (r_prev, r_mid, r_next) = (self.r(2 * k - 1)?, self.r(2 * k)?, self.r(2 * k + 1)?);
        let bk1_inv = self.bk_inv(k + 1)?;
        let fail = |d: String| Err(Error::CrossCheckFailure(format!("k = {k}: {d}")));
        let two = &(&(&*r_prev * &self.b_inv) * &self.j.transpose()) * &self.a;
        if let Some(d) = mismatch("(2)", &two, &r_mid) {
            return fail(d);
        }
        let three = &(&(&*r_mid * &self.j) * &*bk1_inv) * &self.b;
        if let Some(d) = mismatch("(3)", &three, &r_next) {
            return fail(d);
        }
        let four = &(&(&(&*r_prev * &self.b_inv) * &self.g) * &*bk1_inv) * &self.b;
        if let Some(d) = mismatch("(4)", &four, &r_next) {
            return fail(d);
        }
        if let Some(d) = mismatch("(5)", &self.d.apply_matrix(&r_next), &r_prev) {
            return fail(d);
        }
        Ok(())
    }

    /// `R_m · R_m^{-1} = I`.
    pub fn check_r_inverse(&self, m: i64) -> Result<()> {
        let prod = &*self.r(m)? * &*self.r_inv(m)?;
        match mismatch(&format!("R_{m} R_{m}^-1 vs I"), &prod, &self.identity()) {
            Some(d) => Err(Error::CrossCheckFailure(d)),
            None => Ok(()),
        }
    }

    /// Production `R_m` against the closed form through `J(D^k[x])^{-1}`.
    pub fn check_r_closed_form(&self, m: i64) -> Result<()> {
        let closed = self.r_closed_form(m)?;
        match mismatch(&format!("R_{m} closed form"), &closed, &*self.r(m)?) {
            Some(d) => Err(Error::CrossCheckFailure(d)),
            None => Ok(()),
        }
    }

    /// `Y_m` against its closed form.
    pub fn check_y(&self, m: i64) -> Result<()> {
        match mismatch(&format!("Y_{m}"), &self.y(m)?, &self.y_closed_form(m)?) {
            Some(d) => Err(Error::StructureViolation(d)),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::builtin;
    use crate::expr::{eval_poly, parse};

    fn family(name: &str) -> MatrixFamily {
        MatrixFamily::new(Arc::new(builtin(name).unwrap())).unwrap()
    }

    fn poly(f: &MatrixFamily, s: &str) -> LocQ {
        f.ambient().poly(eval_poly(&parse(s).unwrap(), f.datum().vars()).unwrap())
    }

    fn mat(f: &MatrixFamily, rows: [[&str; 2]; 2]) -> SqMatrix {
        SqMatrix::from_fn(2, |i, j| poly(f, rows[i][j]))
    }

    #[test]
    fn b2_derivation_and_matrices() {
        let f = family("B2");
        let amb = f.ambient().clone();
        // D(x) = y/Q, D(y) = −x/Q with Q = det J / c
        let c = f.datum().jacobian_constant().clone();
        let sign = c.recip().unwrap();
        let over_q = |s: &str| amb.frac(eval_poly(&parse(s).unwrap(), amb.names()).unwrap(), 1);
        assert_eq!(f.derivation().values()[0], over_q("y").scale(&(-&sign)));
        assert_eq!(f.derivation().values()[1], over_q("x").scale(&sign));
        f.check_derivation().unwrap();
        assert_eq!(f.g(), &mat(&f, [["x^2+y^2", "x^4+y^4"], ["x^4+y^4", "x^6+y^6"]]));
        assert_eq!(f.b(), &mat(&f, [["0", "3"], ["1", "3*(x^2+y^2)"]]));
        assert_eq!(f.dg(), &mat(&f, [["0", "4"], ["4", "6*(x^2+y^2)"]]));
        assert_eq!(f.b().det(), amb.constant(Rat::from_int(-3)));
        assert_eq!(*f.bk(0), -&f.b().transpose());
    }

    #[test]
    fn b2_r_minus_one_is_dj() {
        let f = family("B2");
        let r = f.r(-1).unwrap();
        let dj = f.derivation().apply_matrix(f.j());
        assert_eq!(*r, dj);
        assert!(q_power_constant(&r.det(), -1).is_some());
    }

    #[test]
    fn small_rank_structure() {
        for name in ["A2", "B2", "G2"] {
            let f = family(name);
            f.check_derivation().unwrap();
            f.check_dg().unwrap();
            for k in -3..=3 {
                f.check_bk(k).unwrap();
            }
            for m in -4..=4 {
                f.check_det_r(m).unwrap();
                f.check_r_inverse(m).unwrap();
            }
            for k in -2..=2 {
                f.check_recursions(k).unwrap();
            }
            for m in 2..=5 {
                f.check_r_closed_form(m).unwrap();
            }
            for m in -4..=5 {
                f.check_y(m).unwrap();
            }
            assert_eq!(f.y(1).unwrap(), f.b().transpose());
        }
    }

    #[test]
    fn detj_dk_and_lemma() {
        let f = family("B2");
        for k in 1..=3 {
            let det = f.jacobian_d_power_x(k).det();
            assert!(q_power_constant(&det, -2 * k as i64).is_some(), "k = {k}");
        }
        // D[J(P)] = −J(D[x]) J(P)
        let lhs = f.derivation().apply_matrix(f.j());
        let rhs = -&(&f.jacobian_d_power_x(1) * f.j());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn cache_matches_fresh_computation() {
        let f = family("A2");
        let cached = f.r(3).unwrap();
        let fresh = family("A2").r(3).unwrap();
        assert_eq!(*cached, *fresh);
        assert!(Arc::ptr_eq(&cached, &f.r(3).unwrap()));
    }
}
