use std::collections::VecDeque;

use rayon::prelude::*;
use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::locq::LocQ;
use crate::matrix::RatMatrix;
use crate::poly::Poly;
use crate::rat::Rat;

use super::CoxeterDatum;

pub const DEFAULT_GROUP_BOUND: usize = 10_000;

#[derive(Clone, Debug)]
pub struct GroupElement {
    pub matrix: RatMatrix,
    /// `w(Q) = det(w) · Q`.
    pub det: Rat,
}

fn element(matrix: RatMatrix) -> GroupElement {
    let det = matrix.det();
    GroupElement { matrix, det }
}

fn closure(gens: &[RatMatrix], n: usize, bound: usize) -> Result<Vec<RatMatrix>> {
    let id = RatMatrix::identity(n);
    let mut seen: FxHashSet<RatMatrix> = FxHashSet::default();
    seen.insert(id.clone());
    let mut order = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for s in gens {
            let h = g.mul(s);
            if seen.insert(h.clone()) {
                if seen.len() > bound {
                    return Err(Error::GroupTooLarge(bound));
                }
                order.push(h.clone());
                queue.push_back(h);
            }
        }
    }
    Ok(order)
}

/// All elements of a finite group given by generating matrices.
#[derive(Clone, Debug)]
pub struct ReflectionGroup {
    elements: Vec<GroupElement>,
    // coset representatives of W_{i-1} in W_i for W_i = ⟨s_1, …, s_i⟩
    tower: Vec<Vec<GroupElement>>,
}

impl ReflectionGroup {
    /// Breadth-first closure; fails once more than `bound` elements appear.
    pub fn generate(gens: &[RatMatrix], bound: usize) -> Result<ReflectionGroup> {
        let n = gens.first().map(RatMatrix::size).unwrap_or(0);
        let mut tower = Vec::with_capacity(gens.len());
        let mut below = vec![RatMatrix::identity(n)];
        for i in 1..=gens.len() {
            let level = closure(&gens[..i], n, bound)?;
            let mut covered: FxHashSet<RatMatrix> = FxHashSet::default();
            let mut reps = Vec::new();
            for w in &level {
                if covered.contains(w) {
                    continue;
                }
                covered.extend(below.iter().map(|h| h.mul(w)));
                reps.push(element(w.clone()));
            }
            tower.push(reps);
            below = level;
        }
        let elements = below.into_iter().map(element).collect();
        Ok(ReflectionGroup { elements, tower })
    }


    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    /// Average `(1/|W|) Σ_w w·f`.
    pub fn reynolds(&self, datum: &CoxeterDatum, f: &LocQ) -> LocQ {
        self.reynolds_form_like(datum, std::slice::from_ref(f), false).pop().unwrap()
    }

    /// Average of the pullbacks of a 1-form (pulls back coefficients and `dx`).
    pub fn reynolds_form(&self, datum: &CoxeterDatum, coeffs: &[LocQ]) -> Vec<LocQ> {
        self.reynolds_form_like(datum, coeffs, true)
    }

    // Pullbacks fix the power of Q up to sign, so everything is summed over one
    // common denominator. Writing W_i = ⋃ W_{i-1}·k, the average over W is the
    // composite of the averages over the coset representatives k.
    fn reynolds_form_like(&self, datum: &CoxeterDatum, coeffs: &[LocQ], form: bool) -> Vec<LocQ> {
        let amb = datum.ambient();
        let e = coeffs.iter().map(LocQ::q_exp).max().unwrap_or(0);
        let mut cur: Vec<Poly> = coeffs.iter().map(|c| c.numerator_over(e)).collect();
        let tower: Vec<&[GroupElement]> = if self.tower.is_empty() {
            vec![&self.elements]
        } else {
            self.tower.iter().map(Vec::as_slice).collect()
        };
        for reps in tower {
            let zero = || vec![Poly::zero(amb.nvars()); cur.len()];
            let sum = reps
                .par_iter()
                .map(|g| pull_back(g, &cur, e, form))
                .reduce(zero, |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect());
            let c = Rat::new(1, reps.len() as i64);
            cur = sum.iter().map(|p| p.scale(&c)).collect();
        }
        cur.into_iter().map(|p| amb.frac(p, e)).collect()
    }
}

/// Pullback of numerators over `Q^e`, either of functions or of the `dx`
/// coefficients of a 1-form.
fn pull_back(g: &GroupElement, nums: &[Poly], e: u32, form: bool) -> Vec<Poly> {
    let n = g.matrix.size();
    let images = g.matrix.coordinate_images();
    let sign = g.det.pow(e).recip().expect("zero determinant");
    let moved: Vec<Poly> = nums.iter().map(|p| p.substitute(&images).scale(&sign)).collect();
    if !form {
        return moved;
    }
    (0..nums.len())
        .map(|j| {
            (0..nums.len()).fold(Poly::zero(n), |acc, i| {
                let c = g.matrix.get(i, j);
                if c.is_zero() {
                    acc
                } else {
                    &acc + &moved[i].scale(c)
                }
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::builtin;
    use super::*;
    use crate::poly::LinearForm;

    #[test]
    fn group_orders() {
        for (name, order) in [("A2", 6), ("B2", 8), ("G2", 12), ("A3", 24), ("B3", 48), ("D4", 192), ("B4", 384)] {
            let d = builtin(name).unwrap();
            let g = d.group(DEFAULT_GROUP_BOUND).unwrap();
            assert_eq!(g.order(), order, "{name}");
        }
        let b3 = builtin("B3").unwrap();
        assert!(matches!(b3.group(10), Err(Error::GroupTooLarge(10))));
    }

    #[test]
    fn elements_permute_hyperplanes() {
        for name in ["A3", "G2", "D4"] {
            let d = builtin(name).unwrap();
            let g = d.group(DEFAULT_GROUP_BOUND).unwrap();
            for w in g.elements() {
                let images = w.matrix.coordinate_images();
                for h in d.hyperplanes() {
                    let moved = LinearForm::from_poly(&h.poly().substitute(&images)).unwrap();
                    assert!(d.hyperplanes().iter().any(|k| k.proportional(&moved)));
                }
                let q = d.ambient().poly(d.q().clone());
                assert_eq!(d.act(&w.matrix, &q), q.scale(&w.det));
            }
        }
    }

    #[test]
    fn averaging_x_squared_gives_p1() {
        let b2 = builtin("B2").unwrap();
        let g = b2.group(DEFAULT_GROUP_BOUND).unwrap();
        let amb = b2.ambient();
        let x2 = amb.var(0).pow(2);
        let p1 = amb.poly(b2.invariants()[0].clone());
        assert_eq!(g.reynolds(&b2, &x2), p1);
        assert_eq!(g.reynolds(&b2, &p1), p1);
        // 1/Q is anti-invariant, so it averages to zero
        let inv_q = amb.frac(crate::poly::Poly::one(2), 1);
        assert!(g.reynolds(&b2, &inv_q).is_zero());
    }

    #[test]
    fn tower_average_matches_direct_sum() {
        use crate::random::Sampler;
        for name in ["A2", "G2", "A3", "B3"] {
            let d = builtin(name).unwrap();
            let g = d.group(DEFAULT_GROUP_BOUND).unwrap();
            let reps: usize = g.tower.iter().map(Vec::len).product();
            assert_eq!(reps, g.order(), "{name}");
            let mut s = Sampler::for_label(7, name);
            let amb = d.ambient();
            let coeffs: Vec<LocQ> =
                (0..d.rank()).map(|_| amb.frac(s.poly(amb.nvars(), 3, 4), 1)).collect();
            let direct = ReflectionGroup { elements: g.elements.clone(), tower: Vec::new() };
            assert_eq!(g.reynolds_form(&d, &coeffs), direct.reynolds_form(&d, &coeffs), "{name}");
            assert_eq!(g.reynolds(&d, &coeffs[0]), direct.reynolds(&d, &coeffs[0]), "{name}");
        }
    }
}
