//! Finite Coxeter arrangements with rational data.

mod builtin;
mod file;
mod group;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::locq::{Ambient, LocQ};
use crate::matrix::{RatMatrix, SqMatrix};
use crate::poly::{LinearForm, Poly, MAX_VARS};
use crate::rat::Rat;

pub use builtin::{builtin, BUILTIN_NAMES};
pub use file::{parse_datum, write_datum};
pub use group::{GroupElement, ReflectionGroup, DEFAULT_GROUP_BOUND};

/// Raw description of an arrangement, before validation.
#[derive(Clone, Debug, PartialEq)]
pub struct DatumSpec {
    pub name: String,
    pub vars: Vec<String>,
    pub gram: RatMatrix,
    pub invariants: Vec<Poly>,
    pub hyperplanes: Vec<Vec<Rat>>,
    pub reflections: Vec<RatMatrix>,
}

/// A validated Coxeter arrangement: reflection group `W` acting on `V = ℚ^ℓ`,
/// Gram matrix `A` of the invariant inner product on `V*`, basic invariants
/// `P_1, …, P_ℓ`, hyperplane forms `α_H` and defining polynomial `Q = ∏ α_H`.
pub struct CoxeterDatum {
    spec: DatumSpec,
    ambient: Arc<Ambient>,
    degrees: Vec<u32>,
    /// `det J(P) = jacobian_constant · Q`.
    jacobian_constant: Rat,
}

impl fmt::Debug for CoxeterDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoxeterDatum")
            .field("name", &self.spec.name)
            .field("rank", &self.rank())
            .field("degrees", &self.degrees)
            .finish()
    }
}

impl PartialEq for CoxeterDatum {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Validation(msg.into()))
}

impl CoxeterDatum {
    /// Checks every structural requirement on the raw data.
    pub fn new(spec: DatumSpec) -> Result<CoxeterDatum> {
        let l = spec.vars.len();
        if l == 0 || l > MAX_VARS {
            return invalid(format!("rank must be between 1 and {MAX_VARS}"));
        }
        let mut seen = spec.vars.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != l {
            return invalid("variable names must be distinct");
        }
        if spec.gram.size() != l {
            return invalid("gram matrix has the wrong size");
        }
        if !spec.gram.is_symmetric() {
            return invalid("gram matrix is not symmetric");
        }
        if !spec.gram.is_positive_definite() {
            return invalid("gram matrix is not positive definite");
        }
        if spec.invariants.len() != l {
            return invalid(format!("expected {l} invariants, found {}", spec.invariants.len()));
        }
        let mut degrees = Vec::with_capacity(l);
        for (j, p) in spec.invariants.iter().enumerate() {
            if p.nvars() != l {
                return invalid(format!("invariant P{} uses the wrong number of variables", j + 1));
            }
            match p.degree() {
                Some(d) if d > 0 && p.is_homogeneous() => degrees.push(d),
                _ => return invalid(format!("invariant P{} is not a nonconstant homogeneous polynomial", j + 1)),
            }
        }
        if degrees.windows(2).any(|w| w[0] > w[1]) {
            return invalid("invariants must be listed by nondecreasing degree");
        }
        if l > 1 && degrees[l - 2] >= degrees[l - 1] {
            return invalid("the top degree must be strictly larger than the others");
        }
        if spec.reflections.is_empty() || spec.reflections.iter().any(|s| s.size() != l) {
            return invalid("reflections must be a nonempty list of rank-by-rank matrices");
        }
        for (k, s) in spec.reflections.iter().enumerate() {
            let images = s.coordinate_images();
            for (j, p) in spec.invariants.iter().enumerate() {
                if p.substitute(&images) != *p {
                    return invalid(format!("P{} is not invariant under reflection {}", j + 1, k + 1));
                }
            }
        }
        let mut factors: Vec<LinearForm> = Vec::with_capacity(spec.hyperplanes.len());
        for (k, h) in spec.hyperplanes.iter().enumerate() {
            if h.len() != l {
                return invalid(format!("hyperplane {} has the wrong number of coefficients", k + 1));
            }
            let Some(f) = LinearForm::new(h.clone()) else {
                return invalid(format!("hyperplane {} is zero", k + 1));
            };
            if factors.iter().any(|g| g.proportional(&f)) {
                return invalid(format!("hyperplane {} repeats an earlier one", k + 1));
            }
            factors.push(f);
        }
        let ambient = Ambient::new(spec.vars.clone(), factors);

        let jac = jacobian_polys(&spec.invariants);
        let det = crate::matrix::bareiss_det(jac);
        if det.is_zero() {
            return invalid("det J(P) not ≐ Q");
        }
        let jacobian_constant = match ambient.div_q(&det).and_then(|c| c.as_constant()) {
            Some(c) => c,
            None => return invalid("Q mismatch"),
        };
        let exp_sum: u32 = degrees.iter().map(|d| d - 1).sum();
        if exp_sum as usize != spec.hyperplanes.len() {
            return invalid(format!(
                "sum of exponents {exp_sum} differs from the number of hyperplanes {}",
                spec.hyperplanes.len()
            ));
        }
        for (k, s) in spec.reflections.iter().enumerate() {
            if s.mul(s) != RatMatrix::identity(l) || s.det() != Rat::from_int(-1) {
                return invalid(format!("reflection {} is not a reflection", k + 1));
            }
            if s.mul(&spec.gram).mul(&s.transpose()) != spec.gram {
                return invalid(format!("reflection {} does not preserve the gram matrix", k + 1));
            }
            let images = s.coordinate_images();
            for (i, f) in ambient.factors().iter().enumerate() {
                let moved = f.poly().substitute(&images);
                let lf = LinearForm::from_poly(&moved).expect("image of a nonzero form");
                if !ambient.factors().iter().any(|g| g.proportional(&lf)) {
                    return invalid(format!(
                        "reflection {} does not permute the hyperplanes (hyperplane {})",
                        k + 1,
                        i + 1
                    ));
                }
            }
        }
        Ok(CoxeterDatum { spec, ambient, degrees, jacobian_constant })
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn spec(&self) -> &DatumSpec {
        &self.spec
    }

    pub fn rank(&self) -> usize {
        self.spec.vars.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.spec.vars
    }

    pub fn ambient(&self) -> &Arc<Ambient> {
        &self.ambient
    }

    pub fn gram(&self) -> &RatMatrix {
        &self.spec.gram
    }

    pub fn invariants(&self) -> &[Poly] {
        &self.spec.invariants
    }

    pub fn hyperplanes(&self) -> &[LinearForm] {
        self.ambient.factors()
    }

    pub fn q(&self) -> &Poly {
        self.ambient.q()
    }

    pub fn reflections(&self) -> &[RatMatrix] {
        &self.spec.reflections
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn exponents(&self) -> Vec<u32> {
        self.degrees.iter().map(|d| d - 1).collect()
    }

    pub fn coxeter_number(&self) -> u32 {
        *self.degrees.last().unwrap()
    }

    pub fn jacobian_constant(&self) -> &Rat {
        &self.jacobian_constant
    }

    /// `J(P)` with entries `∂P_j/∂x_i`.
    pub fn jacobian(&self) -> SqMatrix {
        SqMatrix::from_polys(&self.ambient, jacobian_polys(&self.spec.invariants))
    }

    pub fn gram_matrix(&self) -> SqMatrix {
        SqMatrix::from_rat(&self.ambient, &self.spec.gram)
    }

    /// Pullback of `f` under the substitution `x_i ↦ Σ_j M_ij x_j`.
    pub fn act(&self, m: &RatMatrix, f: &LocQ) -> LocQ {
        let sign = m.det();
        f.substitute(&m.coordinate_images(), &sign)
    }

    /// W-invariance tested on the simple reflections.
    pub fn is_invariant(&self, f: &LocQ) -> bool {
        self.spec.reflections.iter().all(|s| self.act(s, f) == *f)
    }

    /// Pullback of a 1-form given by its `dx` coefficients.
    pub fn act_form(&self, m: &RatMatrix, coeffs: &[LocQ]) -> Vec<LocQ> {
        let moved: Vec<LocQ> = coeffs.iter().map(|f| self.act(m, f)).collect();
        let l = self.rank();
        (0..l)
            .map(|j| {
                (0..l).fold(self.ambient.zero(), |acc, i| {
                    if m.get(i, j).is_zero() {
                        acc
                    } else {
                        &acc + &moved[i].scale(m.get(i, j))
                    }
                })
            })
            .collect()
    }

    pub fn is_invariant_form(&self, coeffs: &[LocQ]) -> bool {
        self.spec.reflections.iter().all(|s| self.act_form(s, coeffs) == coeffs)
    }

    /// Enumerates `W` by closure of the simple reflections.
    pub fn group(&self, bound: usize) -> Result<ReflectionGroup> {
        ReflectionGroup::generate(&self.spec.reflections, bound)
    }
}

fn jacobian_polys(p: &[Poly]) -> Vec<Vec<Poly>> {
    let l = p.len();
    (0..l).map(|i| (0..l).map(|j| p[j].partial(i)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn b2_basic_data() {
        let b2 = builtin("B2").unwrap();
        assert_eq!(b2.rank(), 2);
        assert_eq!(b2.exponents(), vec![1, 3]);
        assert_eq!(b2.coxeter_number(), 4);
        let names = b2.vars().to_vec();
        let q = crate::expr::eval_poly(&crate::expr::parse("x*y*(x+y)*(x-y)").unwrap(), &names).unwrap();
        assert!(b2.q() == &q || b2.q() == &(-&q));
        assert_eq!(b2.gram(), &RatMatrix::identity(2));
        assert_eq!(b2.jacobian().det(), b2.ambient().poly(b2.q().scale(b2.jacobian_constant())));
    }

    #[test]
    fn every_builtin_validates() {
        for name in BUILTIN_NAMES {
            let d = builtin(name).unwrap();
            let expected = d.exponents().iter().sum::<u32>() as usize;
            assert_eq!(d.hyperplanes().len(), expected, "{name}");
        }
        assert_eq!(builtin("B3").unwrap().hyperplanes().len(), 9);
        assert!(matches!(builtin("H3"), Err(Error::UnknownType(_))));
    }

    #[test]
    fn a2_uses_essential_coordinates() {
        let a2 = builtin("A2").unwrap();
        let g = a2.gram();
        assert_eq!(g.get(0, 0), &Rat::new(2, 3));
        assert_eq!(g.get(0, 1), &Rat::new(-1, 3));
        assert_eq!(a2.degrees(), &[2, 3]);
        let coeffs: Vec<Vec<Rat>> = a2.hyperplanes().iter().map(|h| h.coeffs().to_vec()).collect();
        for want in [[1, -1], [2, 1], [1, 2]] {
            let w = LinearForm::new(want.iter().map(|&v| Rat::from_int(v)).collect()).unwrap();
            assert!(coeffs.iter().any(|c| LinearForm::new(c.clone()).unwrap().proportional(&w)));
        }
    }

    fn broken(edit: impl FnOnce(&mut DatumSpec)) -> Error {
        let mut spec = builtin("B2").unwrap().spec().clone();
        edit(&mut spec);
        CoxeterDatum::new(spec).unwrap_err()
    }

    #[test]
    fn validation_names_the_violation() {
        let e = broken(|s| s.invariants[1] = s.invariants[0].pow(2));
        assert_eq!(e, Error::Validation("det J(P) not ≐ Q".into()));
        let e = broken(|s| {
            s.hyperplanes.pop();
        });
        assert_eq!(e, Error::Validation("Q mismatch".into()));
        let e = broken(|s| s.gram = RatMatrix::from_ints(&[&[1, 0], &[0, -1]]));
        assert!(matches!(e, Error::Validation(m) if m.contains("positive definite")));
        let e = broken(|s| s.invariants[1] = Poly::var(2, 0).pow(4));
        assert!(matches!(e, Error::Validation(m) if m.contains("not invariant")));
        let e = broken(|s| s.reflections[0] = RatMatrix::from_ints(&[&[2, 0], &[0, 1]]));
        assert!(matches!(e, Error::Validation(_)));
    }
}
