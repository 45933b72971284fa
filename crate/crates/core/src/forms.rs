//! Rational 1-forms and derivations over `S[1/Q]`, logarithmic membership
//! tests and the bases `ω_j^(m)`, `η_j^(m)`.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use rayon::prelude::*;

use crate::coxeter::CoxeterDatum;
use crate::error::{Error, Result};
use crate::locq::{Ambient, LocQ};
use crate::matrix::SqMatrix;
use crate::poly::{LinearForm, Poly};
use crate::rat::Rat;
use crate::saito::{MatrixFamily, PrimitiveDerivation};

fn combine(a: &[LocQ], b: &[LocQ], f: impl Fn(&LocQ, &LocQ) -> LocQ) -> Vec<LocQ> {
    assert_eq!(a.len(), b.len(), "frames of different rank");
    a.iter().zip(b).map(|(x, y)| f(x, y)).collect()
}

fn homogeneous_degree(coeffs: &[LocQ]) -> Option<i64> {
    let mut deg = None;
    for c in coeffs.iter().filter(|c| !c.is_zero()) {
        let d = c.degree()?;
        match deg {
            None => deg = Some(d),
            Some(e) if e == d => {}
            Some(_) => return None,
        }
    }
    deg
}

fn write_frame(f: &mut fmt::Formatter<'_>, coeffs: &[LocQ], prefix: &str) -> fmt::Result {
    let mut first = true;
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if !first {
            write!(f, " + ")?;
        }
        first = false;
        write!(f, "({c})*{prefix}{}", c.ambient().names()[i])?;
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

/// A rational 1-form `Σ f_i dx_i`.
#[derive(Clone, PartialEq, Eq)]
pub struct LogForm {
    coeffs: Vec<LocQ>,
}

/// A rational vector field `Σ g_i ∂x_i`.
#[derive(Clone, PartialEq, Eq)]
pub struct LogDer {
    coeffs: Vec<LocQ>,
}

impl fmt::Debug for LogForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_frame(f, &self.coeffs, "d")
    }
}

impl fmt::Display for LogForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_frame(f, &self.coeffs, "d")
    }
}

impl fmt::Debug for LogDer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_frame(f, &self.coeffs, "∂")
    }
}

impl fmt::Display for LogDer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_frame(f, &self.coeffs, "∂")
    }
}

macro_rules! frame_common {
    ($t:ident) => {
        impl $t {
            pub fn new(coeffs: Vec<LocQ>) -> $t {
                assert!(!coeffs.is_empty());
                $t { coeffs }
            }

            pub fn zero(amb: &Arc<Ambient>) -> $t {
                $t { coeffs: vec![amb.zero(); amb.nvars()] }
            }

            /// The `i`-th coordinate frame element.
            pub fn unit(amb: &Arc<Ambient>, i: usize) -> $t {
                let mut z = $t::zero(amb);
                z.coeffs[i] = amb.one();
                z
            }

            /// Columns of `m` as coefficient vectors.
            pub fn columns(m: &SqMatrix) -> Vec<$t> {
                (0..m.size()).map(|j| $t { coeffs: m.column(j) }).collect()
            }

            /// Matrix whose columns are the given frames.
            pub fn to_matrix(items: &[$t]) -> SqMatrix {
                let cols: Vec<Vec<LocQ>> = items.iter().map(|x| x.coeffs.clone()).collect();
                SqMatrix::from_columns(&cols)
            }

            pub fn coeffs(&self) -> &[LocQ] {
                &self.coeffs
            }

            pub fn into_coeffs(self) -> Vec<LocQ> {
                self.coeffs
            }

            pub fn ambient(&self) -> &Arc<Ambient> {
                self.coeffs[0].ambient()
            }

            pub fn rank(&self) -> usize {
                self.coeffs.len()
            }

            pub fn is_zero(&self) -> bool {
                self.coeffs.iter().all(LocQ::is_zero)
            }

            pub fn is_regular(&self) -> bool {
                self.coeffs.iter().all(LocQ::is_regular)
            }

            /// Largest power of `Q` in a denominator.
            pub fn pole_order(&self) -> u32 {
                self.coeffs.iter().map(LocQ::q_exp).max().unwrap_or(0)
            }

            /// Common degree of the nonzero coefficients, if there is one.
            pub fn degree(&self) -> Option<i64> {
                homogeneous_degree(&self.coeffs)
            }

            pub fn scale(&self, f: &LocQ) -> $t {
                $t { coeffs: self.coeffs.iter().map(|c| c * f).collect() }
            }

            pub fn scale_rat(&self, c: &Rat) -> $t {
                $t { coeffs: self.coeffs.iter().map(|x| x.scale(c)).collect() }
            }

            /// `∇_D`: apply `D` to every coefficient.
            pub fn nabla_d(&self, d: &PrimitiveDerivation) -> $t {
                $t { coeffs: d.apply_vec(&self.coeffs) }
            }

            /// `∇_θ`: apply the vector field `θ` to every coefficient.
            pub fn nabla_along(&self, theta: &LogDer) -> $t {
                $t { coeffs: self.coeffs.par_iter().map(|c| theta.apply(c)).collect() }
            }

            /// Coefficients written in the frame given by the columns of `m`:
            /// the `c` with `self = m·c`.
            pub fn coordinates_in(&self, m_inv: &SqMatrix) -> Vec<LocQ> {
                m_inv.mul_vec(&self.coeffs)
            }
        }

        impl<'a> Add<&'a $t> for &'a $t {
            type Output = $t;
            fn add(self, rhs: &$t) -> $t {
                $t { coeffs: combine(&self.coeffs, &rhs.coeffs, |x, y| x + y) }
            }
        }

        impl<'a> Sub<&'a $t> for &'a $t {
            type Output = $t;
            fn sub(self, rhs: &$t) -> $t {
                $t { coeffs: combine(&self.coeffs, &rhs.coeffs, |x, y| x - y) }
            }
        }

        impl Neg for &$t {
            type Output = $t;
            fn neg(self) -> $t {
                $t { coeffs: self.coeffs.iter().map(|c| -c).collect() }
            }
        }
    };
}

frame_common!(LogForm);
frame_common!(LogDer);

/// `dx_i ∧ dx_j` coefficients, `i < j`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoForm {
    rank: usize,
    coeffs: Vec<LocQ>,
}

impl TwoForm {
    fn index(rank: usize, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < rank);
        i * rank - i * (i + 1) / 2 + (j - i - 1)
    }

    /// Coefficient of `dx_i ∧ dx_j` for any `i ≠ j`.
    pub fn coeff(&self, i: usize, j: usize) -> LocQ {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.coeffs[TwoForm::index(self.rank, i, j)].clone(),
            std::cmp::Ordering::Greater => -&self.coeffs[TwoForm::index(self.rank, j, i)],
            std::cmp::Ordering::Equal => self.coeffs[0].ambient().zero(),
        }
    }

    /// Coefficients in the order `(0,1), (0,2), …, (ℓ−2,ℓ−1)`.
    pub fn coeffs(&self) -> &[LocQ] {
        &self.coeffs
    }
}

impl LogForm {
    pub fn dx(amb: &Arc<Ambient>, i: usize) -> LogForm {
        LogForm::unit(amb, i)
    }

    /// `df`
    pub fn differential(f: &LocQ) -> LogForm {
        let l = f.ambient().nvars();
        LogForm::new((0..l).map(|i| f.partial(i)).collect())
    }

    /// `dα ∧ ω` for a linear form `α`.
    pub fn wedge_linear(&self, alpha: &LinearForm) -> TwoForm {
        let l = self.rank();
        let a = alpha.coeffs();
        let mut coeffs = Vec::with_capacity(l * (l - 1) / 2);
        for i in 0..l {
            for j in i + 1..l {
                let t = &self.coeffs[j].scale(&a[i]) - &self.coeffs[i].scale(&a[j]);
                coeffs.push(t);
            }
        }
        TwoForm { rank: l, coeffs }
    }

    /// `ω_1 ∧ … ∧ ω_ℓ` as the coefficient of `dx_1 ∧ … ∧ dx_ℓ`.
    pub fn wedge_all(forms: &[LogForm]) -> LocQ {
        LogForm::to_matrix(forms).det()
    }

    /// `I*(ω)`: multiply the coefficient vector by `A`.
    pub fn istar(&self, a: &SqMatrix) -> LogDer {
        LogDer::new(a.mul_vec(&self.coeffs))
    }

    /// `I*(ω, dα) = Σ f_i A_ij a_j`.
    pub fn pair_gram(&self, a: &SqMatrix, alpha: &LinearForm) -> LocQ {
        let amb = self.ambient();
        let v: Vec<LocQ> = alpha.coeffs().iter().map(|c| amb.constant(c.clone())).collect();
        let av = a.mul_vec(&v);
        self.coeffs.iter().zip(&av).fold(amb.zero(), |acc, (f, w)| &acc + &(f * w))
    }

    /// Contraction `⟨θ, ω⟩ = Σ g_i f_i`.
    pub fn contract(&self, theta: &LogDer) -> LocQ {
        let amb = self.ambient();
        self.coeffs.iter().zip(&theta.coeffs).fold(amb.zero(), |acc, (f, g)| &acc + &(f * g))
    }
}

impl LogDer {
    pub fn partial(amb: &Arc<Ambient>, i: usize) -> LogDer {
        LogDer::unit(amb, i)
    }

    /// Euler field `Σ x_i ∂x_i`.
    pub fn euler(amb: &Arc<Ambient>) -> LogDer {
        LogDer::new((0..amb.nvars()).map(|i| amb.var(i)).collect())
    }

    /// `θ(f) = Σ g_i ∂f/∂x_i`.
    pub fn apply(&self, f: &LocQ) -> LocQ {
        let amb = f.ambient();
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, g)| !g.is_zero())
            .fold(amb.zero(), |acc, (i, g)| &acc + &(g * &f.partial(i)))
    }

    /// `θ(α)` for a linear form `α`.
    pub fn apply_linear(&self, alpha: &LinearForm) -> LocQ {
        let amb = self.ambient();
        self.coeffs
            .iter()
            .zip(alpha.coeffs())
            .fold(amb.zero(), |acc, (g, a)| &acc + &g.scale(a))
    }

    /// `I*^{-1}`: multiply the coefficient vector by `A^{-1}`.
    pub fn istar_inv(&self, a_inv: &SqMatrix) -> LogForm {
        LogForm::new(a_inv.mul_vec(&self.coeffs))
    }
}

/// Outcome of a membership test; `certificate` names the first violated
/// condition, or summarises what was verified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membership {
    pub member: bool,
    pub certificate: String,
}

impl Membership {
    fn yes(certificate: impl Into<String>) -> Membership {
        Membership { member: true, certificate: certificate.into() }
    }

    fn no(certificate: impl Into<String>) -> Membership {
        Membership { member: false, certificate: certificate.into() }
    }
}

fn divisible_by_power(f: &LocQ, alpha: &LinearForm, m: u32) -> bool {
    match f.as_poly() {
        Some(p) => Ambient::div_linear_pow(p, alpha, m).is_some(),
        None => false,
    }
}

fn show(alpha: &LinearForm, amb: &Ambient) -> String {
    alpha.poly().display_with(amb.names()).to_string()
}

/// `ω ∈ Ω(𝒜, m)`.
///
/// For `m ≥ 0`: `Q^m ω` is regular and `α_H^m` divides every coefficient of
/// `Q^m (dα_H ∧ ω)` for each `H`. For `m < 0`: `ω` is regular and `α_H^{−m}`
/// divides `I*(ω, dα_H)` for each `H`.
pub fn member_omega(datum: &CoxeterDatum, w: &LogForm, m: i64) -> Membership {
    let amb = datum.ambient();
    if m >= 0 {
        let m = m as u32;
        if w.pole_order() > m {
            return Membership::no(format!("pole order {} exceeds {m}", w.pole_order()));
        }
        for alpha in datum.hyperplanes() {
            let two = w.wedge_linear(alpha);
            for c in two.coeffs() {
                let cleared = c.mul_q_power(m as i64);
                if !divisible_by_power(&cleared, alpha, m) {
                    return Membership::no(format!(
                        "Q^{m}(dα∧ω) not divisible by α^{m} for α = {}",
                        show(alpha, amb)
                    ));
                }
            }
        }
        Membership::yes(format!("Q^{m}ω regular; dα∧ω divisibility holds for all {} hyperplanes", datum.hyperplanes().len()))
    } else {
        let k = (-m) as u32;
        if !w.is_regular() {
            return Membership::no("form has a pole".to_string());
        }
        let a = datum.gram_matrix();
        for alpha in datum.hyperplanes() {
            if !divisible_by_power(&w.pair_gram(&a, alpha), alpha, k) {
                return Membership::no(format!("I*(ω, dα) not divisible by α^{k} for α = {}", show(alpha, amb)));
            }
        }
        Membership::yes(format!("regular; I*(ω, dα) divisible by α^{k} for all hyperplanes"))
    }
}

/// `ω ∈ Ω(𝒜, m)` through the basis `ω^(−m)`: the coordinates `R_{−m}^{-1} ω`
/// must be polynomial.
pub fn member_omega_by_basis(family: &MatrixFamily, w: &LogForm, m: i64) -> Result<Membership> {
    let c = w.coordinates_in(&*family.r_inv(-m)?);
    Ok(match c.iter().position(|x| !x.is_regular()) {
        Some(j) => Membership::no(format!("coordinate {} in the ω^({}) basis has a pole", j + 1, -m)),
        None => Membership::yes(format!("polynomial coordinates in the ω^({}) basis", -m)),
    })
}

/// `θ ∈ D(𝒜, m)`.
///
/// For `m ≥ 0`: `θ` is regular and `α_H^m` divides `θ(α_H)` for each `H`.
/// For `m < 0`: the coordinates of `θ` in the basis `η^(m)` are polynomial.
pub fn member_der(family: &MatrixFamily, theta: &LogDer, m: i64) -> Result<Membership> {
    if m < 0 {
        return member_der_by_basis(family, theta, m);
    }
    let datum = family.datum();
    if !theta.is_regular() {
        return Ok(Membership::no("derivation has a pole"));
    }
    for alpha in datum.hyperplanes() {
        if !divisible_by_power(&theta.apply_linear(alpha), alpha, m as u32) {
            return Ok(Membership::no(format!(
                "θ(α) not divisible by α^{m} for α = {}",
                show(alpha, datum.ambient())
            )));
        }
    }
    Ok(Membership::yes(format!("regular; θ(α) divisible by α^{m} for all hyperplanes")))
}

/// `θ ∈ D(𝒜, m)` through the basis `η^(m) = A R_m`.
pub fn member_der_by_basis(family: &MatrixFamily, theta: &LogDer, m: i64) -> Result<Membership> {
    let m_inv = &*family.r_inv(m)? * family.a_inv();
    let c = theta.coordinates_in(&m_inv);
    Ok(match c.iter().position(|x| !x.is_regular()) {
        Some(j) => Membership::no(format!("coordinate {} in the η^({m}) basis has a pole", j + 1)),
        None => Membership::yes(format!("polynomial coordinates in the η^({m}) basis")),
    })
}

/// Saito–Ziegler criterion: `ℓ` forms in `Ω(𝒜, m)` whose wedge is
/// `c·Q^{−m}·dx_1∧…∧dx_ℓ` with `c ≠ 0` form an `S`-basis of `Ω(𝒜, m)`.
/// Returns the constant `c` when the criterion holds.
pub fn saito_ziegler(datum: &CoxeterDatum, forms: &[LogForm], m: i64) -> Result<Option<Rat>> {
    if forms.len() != datum.rank() {
        return Err(Error::PreconditionViolated(format!("expected {} forms", datum.rank())));
    }
    for (j, w) in forms.iter().enumerate() {
        let r = member_omega(datum, w, m);
        if !r.member {
            return Err(Error::PreconditionViolated(format!("form {} ∉ Ω(𝒜,{m}): {}", j + 1, r.certificate)));
        }
    }
    let wedge = LogForm::wedge_all(forms);
    Ok(crate::saito::q_power_constant(&wedge, -m))
}

/// `ω_j^(m)`: the columns of `R_m` read as `dx` coefficients.
pub fn omega_basis(family: &MatrixFamily, m: i64) -> Result<Vec<LogForm>> {
    Ok(LogForm::columns(&*family.r(m)?))
}

/// `η_j^(m) = I*(ω_j^(m))`: the columns of `A R_m` read as `∂x` coefficients.
pub fn eta_basis(family: &MatrixFamily, m: i64) -> Result<Vec<LogDer>> {
    Ok(LogDer::columns(&(family.a() * &*family.r(m)?)))
}

/// Splits a form into homogeneous pieces by degree (degrees of rational
/// coefficients, which may be negative).
pub fn homogeneous_components(w: &LogForm) -> Vec<(i64, LogForm)> {
    let amb = w.ambient().clone();
    let qd = amb.q_degree() as i64;
    let mut out: std::collections::BTreeMap<i64, Vec<LocQ>> = Default::default();
    for (i, c) in w.coeffs().iter().enumerate() {
        for (d, part) in c.num().homogeneous_parts() {
            let deg = d as i64 - c.q_exp() as i64 * qd;
            let entry = out.entry(deg).or_insert_with(|| vec![amb.zero(); w.rank()]);
            entry[i] = &entry[i] + &amb.frac(part, c.q_exp());
        }
    }
    out.into_iter().map(|(d, c)| (d, LogForm::new(c))).collect()
}

/// Helper for building forms from polynomials.
pub fn form_from_polys(amb: &Arc<Ambient>, coeffs: Vec<Poly>, q_exp: u32) -> LogForm {
    LogForm::new(coeffs.into_iter().map(|p| amb.frac(p, q_exp)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::builtin;
    use crate::expr::{parse, Scope, Value};

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

    fn der(f: &MatrixFamily, s: &str) -> LogDer {
        let scope = Scope { ambient: f.ambient(), invariants: f.datum().invariants() };
        match scope.eval(&parse(s).unwrap()).unwrap() {
            Value::Der(c) => LogDer::new(c),
            other => panic!("not a derivation: {other:?}"),
        }
    }

    #[test]
    fn basis_examples() {
        let f = family("B2");
        let w1 = omega_basis(&f, 1).unwrap();
        assert_eq!(w1, vec![form(&f, "dP1"), form(&f, "dP2")]);
        let w0 = omega_basis(&f, 0).unwrap();
        assert_eq!(w0, vec![form(&f, "dx"), form(&f, "dy")]);
        let wm1 = omega_basis(&f, -1).unwrap();
        assert_eq!(wm1[0], form(&f, "(y*dx - x*dy)/Q"));
        assert_eq!(wm1[1], form(&f, "(3*x^2*y*dx - 3*x*y^2*dy)/Q"));
        assert_eq!(wm1[0].pole_order(), 1);
        let e1 = eta_basis(&f, 1).unwrap();
        assert_eq!(e1[0], der(&f, "x*@x + y*@y"));
        assert_eq!(e1[0], LogDer::euler(f.ambient()));
    }

    #[test]
    fn istar_uses_the_gram_matrix() {
        let f = family("A2");
        let dy1 = LogForm::dx(f.ambient(), 0);
        let t = dy1.istar(f.a());
        assert!(t.coeffs().iter().all(|c| !c.is_zero()));
        assert_eq!(t.istar_inv(f.a_inv()), dy1);
    }

    #[test]
    fn membership_examples() {
        let f = family("B2");
        let d = f.datum();
        let ex = form(&f, "(x^4+y^4)*(dx/x + dy/y)");
        assert!(member_omega(d, &ex, 1).member);
        assert_eq!(ex.pole_order(), 1);
        assert!(!member_omega(d, &ex, 0).member);
        assert!(!member_omega(d, &form(&f, "dx/y"), 1).member);
        assert!(member_omega(d, &form(&f, "dP2"), 0).member);
        assert!(member_der(&f, &LogDer::euler(f.ambient()), 1).unwrap().member);
        assert!(!member_der(&f, &der(&f, "@x"), 1).unwrap().member);
        for k in 1..=2 {
            for eta in eta_basis(&f, 2 * k - 1).unwrap() {
                assert!(member_der(&f, &eta, 2 * k - 1).unwrap().member);
            }
        }
    }

    #[test]
    fn saito_ziegler_examples() {
        let f = family("B2");
        let d = f.datum();
        let dx = omega_basis(&f, 0).unwrap();
        assert!(saito_ziegler(d, &dx, 0).unwrap().is_some());
        let dp = omega_basis(&f, 1).unwrap();
        assert!(saito_ziegler(d, &dp, 0).unwrap().is_none());
        let dup = vec![dx[0].clone(), dx[0].clone()];
        assert!(saito_ziegler(d, &dup, 0).unwrap().is_none());
        assert!(matches!(
            saito_ziegler(d, &omega_basis(&f, -1).unwrap(), 0),
            Err(Error::PreconditionViolated(_))
        ));
        for m in 0..=3 {
            assert!(saito_ziegler(d, &omega_basis(&f, -m).unwrap(), m).unwrap().is_some(), "m = {m}");
        }
    }

    #[test]
    fn nabla_d_on_bases() {
        let f = family("B2");
        let dd = f.derivation();
        for (wp, wm) in omega_basis(&f, 1).unwrap().iter().zip(omega_basis(&f, -1).unwrap()) {
            assert_eq!(wp.nabla_d(dd), wm);
        }
        assert!(LogForm::dx(f.ambient(), 0).nabla_d(dd).is_zero());
    }

    #[test]
    fn wedge_with_linear_form() {
        let f = family("B2");
        let w = form(&f, "x*dx + y^2*dy");
        let alpha = &f.datum().hyperplanes()[2];
        let two = w.wedge_linear(alpha);
        // dα = a_0 dx + a_1 dy, so dα∧ω = (a_0 y^2 − a_1 x) dx∧dy
        let a = alpha.coeffs();
        let want = &f.ambient().poly(Poly::var(2, 1).pow(2)).scale(&a[0]) - &f.ambient().var(0).scale(&a[1]);
        assert_eq!(two.coeff(0, 1), want);
        assert_eq!(two.coeff(1, 0), -&want);
    }

    #[test]
    fn homogeneous_split() {
        let f = family("B2");
        let w = form(&f, "(x^4+y^4)*(dx/x + dy/y) + x*dy");
        let parts = homogeneous_components(&w);
        let degs: Vec<i64> = parts.iter().map(|(d, _)| *d).collect();
        assert_eq!(degs, vec![1, 3]);
        assert_eq!(parts[0].1, form(&f, "x*dy"));
    }
}
