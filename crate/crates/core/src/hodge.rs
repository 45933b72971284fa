//! Decomposition of W-invariant logarithmic forms and derivations into the
//! levels `F_p = ⊕_j T·ω_j^(2p+1)` (forms) and `G_k = ⊕_j T·η_j^(2k−1)`
//! (derivations), where `T = ℚ[P_1, …, P_(ℓ−1)]`, and the inverse of `∇_D`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::forms::{homogeneous_components, member_omega, omega_basis, saito_ziegler, LogDer, LogForm};
use crate::random::Sampler;
use crate::linsolve::{mul_mod, primes, Added, ModSolver, RationalLifter};
use crate::matrix::SqMatrix;
use crate::locq::LocQ;
use crate::poly::Poly;
use crate::rat::Rat;
use crate::saito::MatrixFamily;

/// Element of `T`, written in the invariants `P_1, …, P_(ℓ−1)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TPoly {
    /// Exponent vectors (length `ℓ − 1`) with nonzero coefficients, sorted.
    terms: Vec<(Vec<u32>, Rat)>,
}

impl TPoly {
    /// Terms with equal exponents are added together.
    pub fn from_terms(terms: Vec<(Vec<u32>, Rat)>) -> TPoly {
        let mut merged: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
        for (e, c) in terms {
            *merged.entry(e).or_insert_with(Rat::zero) += &c;
        }
        let mut terms: Vec<(Vec<u32>, Rat)> = merged.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| b.0.cmp(&a.0))
        });
        TPoly { terms }
    }

    pub fn terms(&self) -> &[(Vec<u32>, Rat)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Expansion in the coordinates `x`.
    pub fn to_poly(&self, invariants: &[Poly]) -> Poly {
        let nv = invariants[0].nvars();
        self.terms.iter().fold(Poly::zero(nv), |acc, (e, c)| {
            let t = e
                .iter()
                .enumerate()
                .fold(Poly::constant(nv, c.clone()), |t, (i, &a)| t.mul_poly(&invariants[i].pow(a)));
            &acc + &t
        })
    }
}

impl fmt::Display for TPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &a)| a > 0)
                .map(|(i, &a)| if a == 1 { format!("P{}", i + 1) } else { format!("P{}^{a}", i + 1) })
                .collect();
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            match (mono.is_empty(), abs.is_one()) {
                (true, _) => write!(f, "{abs}")?,
                (false, true) => write!(f, "{}", mono.join("*"))?,
                (false, false) => write!(f, "{abs}*{}", mono.join("*"))?,
            }
        }
        Ok(())
    }
}

/// Bookkeeping for one homogeneous piece of the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PieceReport {
    pub degree: i64,
    /// Lowest level allowed by the pole order.
    pub min_level: i64,
    pub unknowns: usize,
    pub rank: usize,
    /// Dimension of the graded piece predicted by the Poincaré series.
    pub expected_dimension: usize,
    pub points_used: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Levels `p` with basis `ω^(2p+1)`.
    Form,
    /// Levels `k` with basis `η^(2k−1)`.
    Der,
}

/// `ω = Σ_p Σ_j t_{p,j} · b_j^(p)` with `t_{p,j} ∈ T`.
#[derive(Clone, Debug, PartialEq)]
pub struct HodgeDecomposition {
    pub side: Side,
    /// Only nonzero levels are stored.
    pub levels: BTreeMap<i64, Vec<TPoly>>,
    pub pieces: Vec<PieceReport>,
}

impl HodgeDecomposition {
    /// Index `m` of the basis `R_m` used at a given level.
    pub fn basis_index(side: Side, level: i64) -> i64 {
        match side {
            Side::Form => 2 * level + 1,
            Side::Der => 2 * level - 1,
        }
    }

    /// `Σ t_{p,j} b_j^(p)`, coefficient vector in the `dx` (forms) or `∂x`
    /// (derivations) frame, optionally with every level shifted by `shift`.
    pub fn reconstruct_coeffs(&self, family: &MatrixFamily, shift: i64) -> Result<Vec<LocQ>> {
        let amb = family.ambient();
        let l = family.datum().rank();
        let inv = family.datum().invariants();
        let mut acc = vec![amb.zero(); l];
        for (&level, coeffs) in &self.levels {
            let r = family.r(HodgeDecomposition::basis_index(self.side, level + shift))?;
            let frame = match self.side {
                Side::Form => (*r).clone(),
                Side::Der => family.a() * &*r,
            };
            for (j, t) in coeffs.iter().enumerate() {
                if t.is_zero() {
                    continue;
                }
                let tp = t.to_poly(inv);
                for i in 0..l {
                    acc[i] = &acc[i] + &frame.get(i, j).mul_poly(&tp);
                }
            }
        }
        Ok(acc)
    }

    /// Renders the levels as `{p: [t_1, …, t_ℓ], …}`.
    pub fn summary(&self) -> String {
        let parts: Vec<String> = self
            .levels
            .iter()
            .map(|(p, ts)| {
                let cs: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
                format!("{p}: [{}]", cs.join(", "))
            })
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

/// Number of `(a_1, …, a_n) ≥ 0` with `Σ a_i w_i = total`.
fn count_weighted(weights: &[u32], total: i64) -> usize {
    if total < 0 {
        return 0;
    }
    let t = total as usize;
    let mut ways = vec![0usize; t + 1];
    ways[0] = 1;
    for &w in weights {
        let w = w as usize;
        for s in w..=t {
            ways[s] += ways[s - w];
        }
    }
    ways[t]
}

/// Coefficient of `t^d` in `Σ_j t^(m_j − kh) / ∏_i (1 − t^(d_i))`, the Hilbert
/// series of the invariant forms in `Ω(𝒜, 2k−1)`.
pub fn poincare_count(family: &MatrixFamily, k: i64, d: i64) -> usize {
    let datum = family.datum();
    let h = datum.coxeter_number() as i64;
    datum
        .exponents()
        .iter()
        .map(|&m| count_weighted(datum.degrees(), d - m as i64 + k * h))
        .sum()
}

/// Exponent vectors `a` with `Σ a_i w_i = total`.
fn weighted_monomials(weights: &[u32], total: i64) -> Vec<Vec<u32>> {
    fn rec(weights: &[u32], total: i64, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        match weights.split_first() {
            None => {
                if total == 0 {
                    out.push(prefix.clone());
                }
            }
            Some((&w, rest)) => {
                let mut a = 0;
                while (a * w) as i64 <= total {
                    prefix.push(a);
                    rec(rest, total - (a * w) as i64, prefix, out);
                    prefix.pop();
                    a += 1;
                }
            }
        }
    }
    let mut out = Vec::new();
    if total >= 0 {
        rec(weights, total, &mut Vec::new(), &mut out);
    }
    out
}

#[derive(Clone)]
struct Candidate {
    level: i64,
    j: usize,
    exps: Vec<u32>,
}

const POINT_SEED: u64 = 0x5a17_0d1f;

/// Lowest level `−k`, `k = ⌈e/2⌉`, for a form of pole order `e`; invariant
/// forms in `Ω(𝒜, 2k)` already lie in `Ω(𝒜, 2k − 1)`.
fn min_level(pole: u32) -> i64 {
    -(pole as i64 + 1).div_euclid(2)
}

fn decompose_piece(
    family: &MatrixFamily,
    degree: i64,
    piece: &LogForm,
    lowest: i64,
) -> Result<(Vec<(Candidate, Rat)>, PieceReport)> {
    let datum = family.datum();
    let l = datum.rank();
    let h = datum.coxeter_number() as i64;
    let exps = datum.exponents();
    let t_weights = &datum.degrees()[..l - 1];
    let m1 = exps[0] as i64;
    let highest = (degree - m1).div_euclid(h);

    let mut cands = Vec::new();
    for level in lowest..=highest {
        for (j, &m) in exps.iter().enumerate() {
            for e in weighted_monomials(t_weights, degree - m as i64 - level * h) {
                cands.push(Candidate { level, j, exps: e });
            }
        }
    }
    let n = cands.len();
    let expected = poincare_count(family, -lowest, degree);
    let mut report = PieceReport {
        degree,
        min_level: lowest,
        unknowns: n,
        rank: 0,
        expected_dimension: expected,
        points_used: 0,
    };
    if n == 0 {
        if piece.is_zero() {
            return Ok((Vec::new(), report));
        }
        return Err(Error::Inconsistent(format!("no basis element has degree {degree}")));
    }

    let frames: BTreeMap<i64, Arc<SqMatrix>> = (lowest..=highest)
        .map(|p| Ok((p, family.r(2 * p + 1)?)))
        .collect::<Result<_>>()?;
    let inconsistent =
        || Error::Inconsistent(format!("degree-{degree} piece is not a T-combination of the basis from level {lowest}"));
    let mut points = PointStream::new(datum);
    let budget = 4 * n + 16;
    let mut lifter = RationalLifter::new(n);
    let (mut inconsistent_primes, mut deficient_primes) = (0, 0);
    for (round, &p) in primes().iter().take(MAX_PRIMES_PER_PIECE).enumerate() {
        let mut solver = ModSolver::new(n, p);
        let mut used = 0;
        let mut idx = 0;
        let mut contradiction = false;
        while !solver.is_full_rank() && used < budget && !contradiction {
            let pt = points.get(idx);
            idx += 1;
            let Some(rows) = rows_mod(datum, &cands, &frames, piece, pt, p) else {
                continue;
            };
            used += 1;
            for (row, b) in rows {
                if solver.add(row, b) == Added::Inconsistent {
                    contradiction = true;
                    break;
                }
            }
        }
        if round == 0 {
            report.points_used = used;
            report.rank = solver.rank();
        }
        // A contradiction or a rank drop modulo one prime can be an accident
        // of that prime; two in a row cannot be, in practice.
        if contradiction {
            inconsistent_primes += 1;
            if inconsistent_primes >= 2 {
                return Err(inconsistent());
            }
            continue;
        }
        let Some(x) = solver.solution() else {
            deficient_primes += 1;
            if deficient_primes >= 2 {
                return Err(Error::CrossCheckFailure(format!(
                    "basis elements of degree {degree} look dependent (rank {} of {n})",
                    solver.rank()
                )));
            }
            continue;
        };
        report.rank = n;
        let Some(sol) = lifter.add(p, &x) else {
            continue;
        };
        let terms: Vec<(Candidate, Rat)> =
            cands.iter().cloned().zip(sol).filter(|(_, c)| !c.is_zero()).collect();
        if combine(family, &frames, &terms) == piece.coeffs() {
            return Ok((terms, report));
        }
    }
    Err(inconsistent())
}

const MAX_PRIMES_PER_PIECE: usize = 64;

/// Integer points off the arrangement, drawn from a fixed seed so every call
/// sees the same sequence.
struct PointStream {
    rng: ChaCha8Rng,
    q: Poly,
    l: usize,
    attempts: usize,
    points: Vec<Vec<i64>>,
}

impl PointStream {
    fn new(datum: &crate::coxeter::CoxeterDatum) -> PointStream {
        PointStream {
            rng: ChaCha8Rng::seed_from_u64(POINT_SEED),
            q: datum.q().clone(),
            l: datum.rank(),
            attempts: 0,
            points: Vec::new(),
        }
    }

    fn get(&mut self, i: usize) -> &[i64] {
        while self.points.len() <= i {
            self.attempts += 1;
            let radius = (self.l as i64 + 2) + (self.attempts / 8) as i64;
            let pt: Vec<i64> = (0..self.l).map(|_| self.rng.gen_range(-radius..=radius)).collect();
            let exact: Vec<Rat> = pt.iter().map(|&v| Rat::from_int(v)).collect();
            if !self.q.eval(&exact).is_zero() {
                self.points.push(pt);
            }
        }
        &self.points[i]
    }
}

/// The `ℓ` equations contributed by one point, reduced modulo `p`; `None` if
/// some value is undefined modulo `p` there.
fn rows_mod(
    datum: &crate::coxeter::CoxeterDatum,
    cands: &[Candidate],
    frames: &BTreeMap<i64, Arc<SqMatrix>>,
    piece: &LogForm,
    pt: &[i64],
    p: u64,
) -> Option<Vec<(Vec<u64>, u64)>> {
    let l = datum.rank();
    let ptm: Vec<u64> = pt.iter().map(|&v| v.rem_euclid(p as i64) as u64).collect();
    let pvals: Vec<u64> =
        datum.invariants()[..l - 1].iter().map(|f| f.eval_mod(&ptm, p)).collect::<Option<_>>()?;
    let mut fvals: BTreeMap<i64, Vec<u64>> = BTreeMap::new();
    for (&level, r) in frames {
        fvals.insert(level, r.entries().iter().map(|e| e.eval_mod(&ptm, p)).collect::<Option<_>>()?);
    }
    let rhs: Vec<u64> = piece.coeffs().iter().map(|c| c.eval_mod(&ptm, p)).collect::<Option<_>>()?;
    let tvals: Vec<u64> = cands
        .iter()
        .map(|c| {
            c.exps.iter().enumerate().fold(1 % p, |acc, (i, &a)| {
                (0..a).fold(acc, |t, _| mul_mod(t, pvals[i], p))
            })
        })
        .collect();
    Some(
        rhs.into_iter()
            .enumerate()
            .map(|(i, b)| {
                let row = cands
                    .iter()
                    .zip(&tvals)
                    .map(|(c, &t)| mul_mod(t, fvals[&c.level][i * l + c.j], p))
                    .collect();
                (row, b)
            })
            .collect(),
    )
}

/// `Σ c · t(P) · b_j^(level)` over the given terms, exactly.
fn combine(family: &MatrixFamily, frames: &BTreeMap<i64, Arc<SqMatrix>>, terms: &[(Candidate, Rat)]) -> Vec<LocQ> {
    let amb = family.ambient();
    let l = family.datum().rank();
    let inv = family.datum().invariants();
    let mut acc = vec![amb.zero(); l];
    for (c, v) in terms {
        let t = TPoly::from_terms(vec![(c.exps.clone(), v.clone())]).to_poly(inv);
        let frame = &frames[&c.level];
        for (i, slot) in acc.iter_mut().enumerate() {
            *slot = &*slot + &frame.get(i, c.j).mul_poly(&t);
        }
    }
    acc
}

/// Decomposes a W-invariant logarithmic form into its Hodge levels.
pub fn decompose_form(family: &MatrixFamily, w: &LogForm) -> Result<HodgeDecomposition> {
    let datum = family.datum();
    if !datum.is_invariant_form(w.coeffs()) {
        return Err(Error::NotInvariant("form is moved by a simple reflection".into()));
    }
    let pole = w.pole_order();
    let mem = member_omega(datum, w, pole as i64);
    if !mem.member {
        return Err(Error::NotLogarithmic(mem.certificate));
    }
    let lowest = min_level(pole);
    let l = datum.rank();
    let mut acc: BTreeMap<i64, FxHashMap<(usize, Vec<u32>), Rat>> = BTreeMap::new();
    let mut pieces = Vec::new();
    for (degree, piece) in homogeneous_components(w) {
        let (sol, report) = decompose_piece(family, degree, &piece, lowest)?;
        pieces.push(report);
        for (c, v) in sol {
            let slot = acc.entry(c.level).or_default().entry((c.j, c.exps)).or_insert_with(Rat::zero);
            *slot += &v;
        }
    }
    let mut levels = BTreeMap::new();
    for (p, terms) in acc {
        let mut per_j: Vec<Vec<(Vec<u32>, Rat)>> = vec![Vec::new(); l];
        for ((j, e), c) in terms {
            per_j[j].push((e, c));
        }
        let ts: Vec<TPoly> = per_j.into_iter().map(TPoly::from_terms).collect();
        if ts.iter().any(|t| !t.is_zero()) {
            levels.insert(p, ts);
        }
    }
    let dec = HodgeDecomposition { side: Side::Form, levels, pieces };
    let back = dec.reconstruct_coeffs(family, 0)?;
    if back != w.coeffs() {
        return Err(Error::Inconsistent("the level solution does not reconstruct the form".into()));
    }
    Ok(dec)
}

/// Decomposes a W-invariant logarithmic derivation: `θ = Σ_k Σ_j t_{k,j} η_j^(2k−1)`.
pub fn decompose_der(family: &MatrixFamily, theta: &LogDer) -> Result<HodgeDecomposition> {
    let w = theta.istar_inv(family.a_inv());
    let dec = decompose_form(family, &w)?;
    let levels = dec.levels.into_iter().map(|(p, ts)| (p + 1, ts)).collect();
    let out = HodgeDecomposition { side: Side::Der, levels, pieces: dec.pieces };
    if out.reconstruct_coeffs(family, 0)? != theta.coeffs() {
        return Err(Error::Inconsistent("the level solution does not reconstruct the derivation".into()));
    }
    Ok(out)
}

/// `∇_D^{-1}` on invariant forms: decompose, then move every level up by one.
pub fn nabla_d_inverse_form(family: &MatrixFamily, w: &LogForm) -> Result<LogForm> {
    let dec = decompose_form(family, w)?;
    Ok(LogForm::new(dec.reconstruct_coeffs(family, 1)?))
}

/// `∇_D^{-1}` on invariant derivations.
pub fn nabla_d_inverse_der(family: &MatrixFamily, theta: &LogDer) -> Result<LogDer> {
    let dec = decompose_der(family, theta)?;
    Ok(LogDer::new(dec.reconstruct_coeffs(family, 1)?))
}

/// Every coefficient is W-invariant and killed by `D`, i.e. lies in `T`.
pub fn check_coefficients(family: &MatrixFamily, dec: &HodgeDecomposition) -> Result<()> {
    let datum = family.datum();
    for (p, ts) in &dec.levels {
        for (j, t) in ts.iter().enumerate() {
            let f = family.ambient().poly(t.to_poly(datum.invariants()));
            if !datum.is_invariant(&f) || !family.derivation().apply(&f).is_zero() {
                return Err(Error::CrossCheckFailure(format!("level {p} coefficient {} = {t} is not in T", j + 1)));
            }
        }
    }
    Ok(())
}

/// Symmetrizes random elements of `Ω(𝒜, 2k)` and checks that they land in
/// `Ω(𝒜, 2k − 1)`.
pub fn verify_invariant_parts_equal(family: &MatrixFamily, k: i64, trials: usize, seed: u64) -> Result<String> {
    let datum = family.datum();
    let group = datum.group(crate::coxeter::DEFAULT_GROUP_BOUND)?;
    let mut sampler = Sampler::for_label(seed, &format!("invariant-parts/{}/{k}", datum.name()));
    let mut nonzero = 0;
    for t in 0..trials {
        let w = sampler.member_form(family, 2 * k, 3)?;
        let before = member_omega(datum, &w, 2 * k);
        if !before.member {
            return Err(Error::CrossCheckFailure(format!("sample {t} is not in Ω(𝒜,{}): {}", 2 * k, before.certificate)));
        }
        let sym = LogForm::new(group.reynolds_form(datum, w.coeffs()));
        if !sym.is_zero() {
            nonzero += 1;
        }
        let after = member_omega(datum, &sym, 2 * k - 1);
        if !after.member {
            return Err(Error::CounterexampleFound(format!(
                "symmetrized sample {t} is not in Ω(𝒜,{}): {}",
                2 * k - 1,
                after.certificate
            )));
        }
    }
    Ok(format!("{trials} symmetrized samples ({nonzero} nonzero) lie in Ω(𝒜,{})", 2 * k - 1))
}

/// `ω^(1−2k)` are W-invariant, lie in `Ω(𝒜, 2k − 1)`, have wedge `≐ Q^{1−2k}`,
/// and pair with `η^(2k−1)` through an invertible matrix over `T`.
pub fn verify_free_basis_over_r(family: &MatrixFamily, k: i64) -> Result<String> {
    let datum = family.datum();
    let m = 2 * k - 1;
    let forms = omega_basis(family, -m)?;
    for (j, w) in forms.iter().enumerate() {
        if !datum.is_invariant_form(w.coeffs()) {
            return Err(Error::CrossCheckFailure(format!("ω_{}^({}) is not W-invariant", j + 1, -m)));
        }
    }
    let c = saito_ziegler(datum, &forms, m)?
        .ok_or_else(|| Error::CrossCheckFailure(format!("wedge of ω^({}) is not ≐ Q^{}", -m, -m)))?;
    family.check_y(m)?;
    let y = family.y(m)?;
    let entries_in_t = y.entries().iter().all(|e| e.is_regular() && family.derivation().apply(e).is_zero());
    let det = y.det().as_constant().filter(|d| !d.is_zero());
    match (entries_in_t, det) {
        (true, Some(d)) => Ok(format!("wedge = {c}·Q^{}; det Y_{m} = {d}", -m)),
        _ => Err(Error::CrossCheckFailure(format!("Y_{m} is not invertible over T"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::builtin;
    use crate::expr::{parse, Scope, Value};
    use std::sync::Arc;

    fn family(name: &str) -> MatrixFamily {
        MatrixFamily::new(Arc::new(builtin(name).unwrap())).unwrap()
    }

    fn form(f: &MatrixFamily, s: &str) -> LogForm {
        let scope = Scope { ambient: f.ambient(), invariants: f.datum().invariants() };
        match scope.eval(&parse(s).unwrap()).unwrap() {
            Value::Form(c) => LogForm::new(c),
            other => panic!("not a form: {other:?}"),
        }
    }

    fn tpoly(terms: &[(&[u32], Rat)]) -> TPoly {
        TPoly::from_terms(terms.iter().map(|(e, c)| (e.to_vec(), c.clone())).collect())
    }

    #[test]
    fn b2_example() {
        let f = family("B2");
        let w = form(&f, "(x^4+y^4)*(dx/x + dy/y)");
        let dec = decompose_form(&f, &w).unwrap();
        let mut want = BTreeMap::new();
        want.insert(-1, vec![tpoly(&[(&[3], Rat::from_int(-8))]), tpoly(&[(&[2], Rat::new(8, 3))])]);
        want.insert(0, vec![tpoly(&[(&[1], Rat::from_int(-4))]), tpoly(&[(&[0], Rat::from_int(2))])]);
        assert_eq!(dec.levels, want);
        assert_eq!(dec.summary(), "{-1: [-8*P1^3, 8/3*P1^2], 0: [-4*P1, 2]}");
        for p in &dec.pieces {
            assert_eq!(p.unknowns, p.rank);
            assert_eq!(p.unknowns, p.expected_dimension);
        }
    }

    #[test]
    fn dp_is_level_zero() {
        let f = family("A2");
        for (j, w) in omega_basis(&f, 1).unwrap().iter().enumerate() {
            let dec = decompose_form(&f, w).unwrap();
            assert_eq!(dec.levels.len(), 1);
            let ts = &dec.levels[&0];
            for (i, t) in ts.iter().enumerate() {
                let want = if i == j { tpoly(&[(&[0], Rat::one())]) } else { TPoly::default() };
                assert_eq!(t, &want);
            }
        }
    }

    #[test]
    fn inverse_of_nabla_d() {
        let f = family("B2");
        let d = f.derivation();
        let w = form(&f, "P2*dP1");
        let dec = decompose_form(&f, &w).unwrap();
        assert!(!dec.levels.is_empty());
        let up = nabla_d_inverse_form(&f, &w).unwrap();
        assert_eq!(up.nabla_d(d), w);
        assert_eq!(nabla_d_inverse_form(&f, &w.nabla_d(d)).unwrap(), w);
        let euler = LogDer::euler(f.ambient());
        let up = nabla_d_inverse_der(&f, &euler).unwrap();
        assert_eq!(up.nabla_d(d), euler);
    }

    #[test]
    fn rejects_bad_input() {
        let f = family("B2");
        assert!(matches!(decompose_form(&f, &form(&f, "dx")), Err(Error::NotInvariant(_))));
        // invariant but not logarithmic: pole along the arrangement without the wedge condition
        let bad = form(&f, "(x^2+y^2)^3*(dx/x^2 + dy/y^2)*x*y/Q");
        let r = decompose_form(&f, &bad);
        assert!(matches!(r, Err(Error::NotLogarithmic(_)) | Err(Error::NotInvariant(_))), "{r:?}");
    }

    #[test]
    fn coefficients_lie_in_t() {
        let f = family("B2");
        for s in ["(x^4+y^4)*(dx/x + dy/y)", "P2*dP1", "P1^2*dP2 + P2*dP2"] {
            let dec = decompose_form(&f, &form(&f, s)).unwrap();
            check_coefficients(&f, &dec).unwrap();
        }
    }

    #[test]
    fn invariant_parts() {
        let f = family("B2");
        for k in 0..=1 {
            verify_invariant_parts_equal(&f, k, 5, 1).unwrap();
        }
    }

    #[test]
    fn free_basis() {
        for name in ["A2", "B2"] {
            let f = family(name);
            for k in 0..=2 {
                verify_free_basis_over_r(&f, k).unwrap();
            }
        }
    }

    #[test]
    fn counting_helpers() {
        assert_eq!(count_weighted(&[2, 4], 8), 3);
        assert_eq!(weighted_monomials(&[2, 3], 6), vec![vec![0, 2], vec![3, 0]]);
        assert_eq!(min_level(0), 0);
        assert_eq!(min_level(1), -1);
        assert_eq!(min_level(2), -1);
        assert_eq!(min_level(3), -2);
    }
}
