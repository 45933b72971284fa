//! Alternative bases of the logarithmic modules and the identities relating
//! them to `ω^(m)` and `η^(m)`, for `k ≥ 0`.

use std::sync::Arc;

use crate::coxeter::{CoxeterDatum, DatumSpec};
use crate::error::{Error, Result};
use crate::forms::{LogDer, LogForm};
use crate::hodge::nabla_d_inverse_der;
use crate::matrix::SqMatrix;
use crate::poly::Poly;
use crate::rat::Rat;
use crate::saito::MatrixFamily;

/// `ξ^(2k+1) = A J(D^k x)^{-1} J(P)` and `ξ^(2k) = A J(D^k x)^{-1}`, read
/// column by column in the `∂x` frame.
pub fn xi_basis(family: &MatrixFamily, m: i64) -> Result<Vec<LogDer>> {
    if m < 0 {
        return Err(Error::PreconditionViolated(format!("ξ^({m}) needs m ≥ 0")));
    }
    let k = (m / 2) as usize;
    let base = family.a() * &family.jacobian_d_power_x(k).inverse()?;
    let frame = if m % 2 == 1 { &base * family.j() } else { base };
    Ok(LogDer::columns(&frame))
}

/// `∂/∂P_i` in the `∂x` frame: the columns of `J(P)^{-T}`.
pub fn invariant_coordinate_fields(family: &MatrixFamily) -> Vec<LogDer> {
    LogDer::columns(&family.j_inv().transpose())
}

/// `I*(dP_i)`: the columns of `A J(P)`.
pub fn gradient_fields(family: &MatrixFamily) -> Vec<LogDer> {
    LogDer::columns(&(family.a() * family.j()))
}

fn sign(k: i64) -> Rat {
    if k % 2 == 0 {
        Rat::one()
    } else {
        Rat::from_int(-1)
    }
}

fn compare(what: String, lhs: &SqMatrix, rhs: &SqMatrix) -> Result<()> {
    match lhs.diff_report(rhs) {
        Some(d) => Err(Error::IdentityViolation(format!("{what}: {d}"))),
        None => Ok(()),
    }
}

fn need_nonneg(k: i64) -> Result<()> {
    if k < 0 {
        return Err(Error::PreconditionViolated(format!("k = {k} must be ≥ 0")));
    }
    Ok(())
}

/// `ξ^(2k+1) = (−1)^k η^(2k+1) B^{-1} B^(k+1)` and `ξ^(2k) = (−1)^k η^(2k)`.
pub fn verify_relation1(family: &MatrixFamily, k: i64) -> Result<String> {
    need_nonneg(k)?;
    let s = sign(k);
    let odd = LogDer::to_matrix(&xi_basis(family, 2 * k + 1)?);
    let eta_odd = family.a() * &*family.r(2 * k + 1)?;
    let rhs = (&(&eta_odd * family.b_inv()) * &*family.bk(k + 1)).scale(&s);
    compare(format!("ξ^({})", 2 * k + 1), &odd, &rhs)?;
    let even = LogDer::to_matrix(&xi_basis(family, 2 * k)?);
    let rhs = (family.a() * &*family.r(2 * k)?).scale(&s);
    compare(format!("ξ^({})", 2 * k), &even, &rhs)?;
    Ok(format!("ξ^({}) and ξ^({}) match the η frames", 2 * k + 1, 2 * k))
}

fn frame_along<F>(fields: &[LogDer], f: F) -> SqMatrix
where
    F: Fn(&LogDer) -> Vec<crate::locq::LocQ>,
{
    SqMatrix::from_columns(&fields.iter().map(f).collect::<Vec<_>>())
}

/// `[∇_{I*(dP_i)} ∇_D^{-k} θ_E]_i = η^(2k+1) B^{-1} B^(k+1)` and
/// `[∇_{∂x_i} ∇_D^{-k} θ_E]_i = η^(2k) A^{-1}`.
pub fn verify_deri(family: &MatrixFamily, k: i64) -> Result<String> {
    need_nonneg(k)?;
    let amb = family.ambient();
    let mut psi = LogDer::euler(amb);
    for _ in 0..k {
        psi = nabla_d_inverse_der(family, &psi)?;
    }
    let d = family.derivation();
    let mut back = psi.clone();
    for _ in 0..k {
        back = back.nabla_d(d);
    }
    if back != LogDer::euler(amb) {
        return Err(Error::IdentityViolation(format!("∇_D^{k} ∇_D^-{k} θ_E ≠ θ_E")));
    }
    let lhs = frame_along(&gradient_fields(family), |t| psi.nabla_along(t).into_coeffs());
    let rhs = &(&(family.a() * &*family.r(2 * k + 1)?) * family.b_inv()) * &*family.bk(k + 1);
    compare(format!("∇_I*(dP) ∇_D^-{k} θ_E"), &lhs, &rhs)?;
    let partials: Vec<LogDer> = (0..family.datum().rank()).map(|i| LogDer::partial(amb, i)).collect();
    let lhs = frame_along(&partials, |t| psi.nabla_along(t).into_coeffs());
    let rhs = &(family.a() * &*family.r(2 * k)?) * family.a_inv();
    compare(format!("∇_∂x ∇_D^-{k} θ_E"), &lhs, &rhs)?;
    Ok(format!("both frames of ∇_D^-{k} θ_E match η^({}) and η^({})", 2 * k + 1, 2 * k))
}

/// `½ x A^{-1} x^T`.
pub fn normalized_quadratic(datum: &CoxeterDatum) -> Poly {
    let l = datum.rank();
    let a_inv = datum.gram().inverse().expect("gram is definite");
    let half = Rat::new(1, 2);
    let terms = (0..l).flat_map(|i| (0..l).map(move |j| (i, j))).map(|(i, j)| {
        Poly::var(l, i).mul_poly(&Poly::var(l, j)).scale(&(&half * a_inv.get(i, j)))
    });
    terms.fold(Poly::zero(l), |acc, t| &acc + &t)
}

/// The scale `c` with `P_1 = c · ½ x A^{-1} x^T`.
pub fn quadratic_scale(datum: &CoxeterDatum) -> Result<Rat> {
    let q = normalized_quadratic(datum);
    let p1 = &datum.invariants()[0];
    let (m, c) = q.leading_term().expect("nonzero quadratic").clone();
    let scale = p1.coeff(m) / c;
    if scale.is_zero() || &q.scale(&scale) != p1 {
        return Err(Error::NormalizationMismatch(format!(
            "P1 is not proportional to ½ x A^-1 x^T = {}",
            q.display_with(datum.vars())
        )));
    }
    Ok(scale)
}

/// The same arrangement with `P_1` replaced by `½ x A^{-1} x^T`.
pub fn with_normalized_quadratic(family: &MatrixFamily) -> Result<(MatrixFamily, Rat)> {
    let datum = family.datum();
    let scale = quadratic_scale(datum)?;
    if scale.is_one() {
        return Ok((MatrixFamily::new(datum.clone())?, scale));
    }
    let mut spec: DatumSpec = datum.spec().clone();
    spec.invariants[0] = normalized_quadratic(datum);
    Ok((MatrixFamily::new(Arc::new(CoxeterDatum::new(spec)?))?, scale))
}

/// `[∇_{∂P_i} ∇_D^k dP_1]_i = ω^(−2k−1) B^{-1}` and
/// `[∇_{∂x_i} ∇_D^k dP_1]_i = ω^(−2k) A^{-1}`, with `P_1` rescaled to
/// `½ x A^{-1} x^T`; also checks that `∇_{∂P_i}` commutes with `∇_D` on these
/// forms.
pub fn verify_commu(family: &MatrixFamily, k: i64) -> Result<String> {
    need_nonneg(k)?;
    let (fam, scale) = with_normalized_quadratic(family)?;
    let amb = fam.ambient();
    let d = fam.derivation();
    let p1 = amb.poly(fam.datum().invariants()[0].clone());
    let mut w = LogForm::differential(&p1);
    for _ in 0..k {
        w = w.nabla_d(d);
    }
    let fields = invariant_coordinate_fields(&fam);
    for (i, t) in fields.iter().enumerate() {
        if w.nabla_along(t).nabla_d(d) != w.nabla_d(d).nabla_along(t) {
            return Err(Error::IdentityViolation(format!("∇_D and ∇_∂P{} do not commute on ∇_D^{k} dP1", i + 1)));
        }
    }
    let lhs = frame_along(&fields, |t| w.nabla_along(t).into_coeffs());
    let rhs = &*fam.r(-2 * k - 1)? * fam.b_inv();
    compare(format!("∇_∂P ∇_D^{k} dP1"), &lhs, &rhs)?;
    let partials: Vec<LogDer> = (0..fam.datum().rank()).map(|i| LogDer::partial(amb, i)).collect();
    let lhs = frame_along(&partials, |t| w.nabla_along(t).into_coeffs());
    let rhs = &*fam.r(-2 * k)? * fam.a_inv();
    compare(format!("∇_∂x ∇_D^{k} dP1"), &lhs, &rhs)?;
    Ok(format!("both frames of ∇_D^{k} dP1 match ω^({}) and ω^({}) (P1 scale {scale})", -2 * k - 1, -2 * k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::builtin;

    fn family(name: &str) -> MatrixFamily {
        MatrixFamily::new(Arc::new(builtin(name).unwrap())).unwrap()
    }

    #[test]
    fn xi_small_indices() {
        let f = family("B2");
        let xi0 = LogDer::to_matrix(&xi_basis(&f, 0).unwrap());
        assert_eq!(xi0, *f.a());
        let xi1 = LogDer::to_matrix(&xi_basis(&f, 1).unwrap());
        assert_eq!(xi1, f.a() * f.j());
        let xi2 = LogDer::to_matrix(&xi_basis(&f, 2).unwrap());
        let eta2 = f.a() * &*f.r(2).unwrap();
        assert_eq!(xi2, -&eta2);
        assert!(xi_basis(&f, -1).is_err());
    }

    #[test]
    fn relations_hold() {
        for name in ["B2", "A2"] {
            let f = family(name);
            for k in 0..=2 {
                verify_relation1(&f, k).unwrap();
                verify_deri(&f, k).unwrap();
                verify_commu(&f, k).unwrap();
            }
        }
    }

    #[test]
    fn quadratic_normalization() {
        let b2 = builtin("B2").unwrap();
        assert_eq!(quadratic_scale(&b2).unwrap(), Rat::one());
        let a2 = builtin("A2").unwrap();
        let c = quadratic_scale(&a2).unwrap();
        assert!(!c.is_zero());
    }

    #[test]
    fn gradient_of_p1() {
        // ∇_∂x_i dP1 = dx-frame column i of A^{-1} when P1 = ½ x A^{-1} x^T
        let (f, _) = with_normalized_quadratic(&family("A2")).unwrap();
        let amb = f.ambient();
        let dp1 = LogForm::differential(&amb.poly(f.datum().invariants()[0].clone()));
        for i in 0..2 {
            let got = dp1.nabla_along(&LogDer::partial(amb, i));
            assert_eq!(got.coeffs(), f.a_inv().column(i).as_slice());
        }
    }
}
