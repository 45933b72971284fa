use crate::error::{Error, Result};
use crate::matrix::RatMatrix;
use crate::poly::Poly;
use crate::rat::Rat;

use super::{CoxeterDatum, DatumSpec};

pub const BUILTIN_NAMES: [&str; 7] = ["A2", "B2", "G2", "A3", "B3", "B4", "D4"];

/// One of the shipped arrangements: `A2`, `A3`, `B2`, `B3`, `B4`, `D4`, `G2`.
pub fn builtin(name: &str) -> Result<CoxeterDatum> {
    let spec = match name {
        "A2" => type_a(2),
        "A3" => type_a(3),
        "B2" => type_b(2),
        "B3" => type_b(3),
        "B4" => type_b(4),
        "D4" => type_d4(),
        "G2" => type_g2(),
        _ => return Err(Error::UnknownType(name.to_string())),
    };
    CoxeterDatum::new(spec)
}

fn ints(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&c| Rat::from_int(c)).collect()
}

fn swap(l: usize, i: usize) -> RatMatrix {
    RatMatrix::from_fn(l, |r, c| {
        let src = if r == i { i + 1 } else if r == i + 1 { i } else { r };
        if c == src {
            Rat::one()
        } else {
            Rat::zero()
        }
    })
}

fn power_sum(l: usize, k: u32) -> Poly {
    (0..l).fold(Poly::zero(l), |acc, i| &acc + &Poly::var(l, i).pow(k))
}

fn type_b(l: usize) -> DatumSpec {
    let vars: Vec<String> = if l == 2 {
        vec!["x".into(), "y".into()]
    } else {
        (1..=l).map(|i| format!("x{i}")).collect()
    };
    let invariants = (1..=l as u32)
        .map(|k| power_sum(l, 2 * k).scale(&Rat::new(1, 2 * k as i64)))
        .collect();
    let mut hyperplanes: Vec<Vec<Rat>> = (0..l)
        .map(|i| (0..l).map(|j| Rat::from_int((i == j) as i64)).collect())
        .collect();
    for i in 0..l {
        for j in i + 1..l {
            for s in [1, -1] {
                let mut c = vec![0; l];
                c[i] = 1;
                c[j] = s;
                hyperplanes.push(ints(&c));
            }
        }
    }
    let mut reflections: Vec<RatMatrix> = (0..l - 1).map(|i| swap(l, i)).collect();
    reflections.push(RatMatrix::from_fn(l, |r, c| match (r == c, r == l - 1) {
        (true, true) => Rat::from_int(-1),
        (true, false) => Rat::one(),
        _ => Rat::zero(),
    }));
    DatumSpec {
        name: format!("B{l}"),
        vars,
        gram: RatMatrix::identity(l),
        invariants,
        hyperplanes,
        reflections,
    }
}

fn type_d4() -> DatumSpec {
    let l = 4;
    let vars = (1..=l).map(|i| format!("x{i}")).collect();
    let prod = (0..l).fold(Poly::one(l), |acc, i| &acc * &Poly::var(l, i));
    let invariants = vec![power_sum(l, 2), power_sum(l, 4), prod, power_sum(l, 6)];
    let mut hyperplanes = Vec::new();
    for i in 0..l {
        for j in i + 1..l {
            for s in [1, -1] {
                let mut c = vec![0; l];
                c[i] = 1;
                c[j] = s;
                hyperplanes.push(ints(&c));
            }
        }
    }
    let mut reflections: Vec<RatMatrix> = (0..l - 1).map(|i| swap(l, i)).collect();
    // (x3, x4) ↦ (−x4, −x3)
    reflections.push(RatMatrix::from_ints(&[
        &[1, 0, 0, 0],
        &[0, 1, 0, 0],
        &[0, 0, 0, -1],
        &[0, 0, -1, 0],
    ]));
    DatumSpec {
        name: "D4".into(),
        vars,
        gram: RatMatrix::identity(l),
        invariants,
        hyperplanes,
        reflections,
    }
}

/// Gram matrix of the coordinate functionals `y_i = x_i` restricted to the
/// hyperplane `Σ x = 0` of `ℚ^(ℓ+1)`.
fn type_a_gram(l: usize) -> RatMatrix {
    let n = (l + 1) as i64;
    RatMatrix::from_fn(l, |i, j| {
        let delta = Rat::from_int((i == j) as i64);
        &delta - &Rat::new(1, n)
    })
}

fn elementary_symmetric(vals: &[Poly], k: usize) -> Poly {
    let nv = vals[0].nvars();
    // e[j] = e_j of the prefix processed so far
    let mut e = vec![Poly::zero(nv); k + 1];
    e[0] = Poly::one(nv);
    for v in vals {
        for j in (1..=k).rev() {
            e[j] = &e[j] + &(&e[j - 1] * v);
        }
    }
    e.swap_remove(k)
}

fn type_a(l: usize) -> DatumSpec {
    let vars: Vec<String> = (1..=l).map(|i| format!("y{i}")).collect();
    let mut vals: Vec<Poly> = (0..l).map(|i| Poly::var(l, i)).collect();
    let last = -&(0..l).fold(Poly::zero(l), |acc, i| &acc + &Poly::var(l, i));
    vals.push(last);
    let invariants = (2..=l + 1).map(|k| elementary_symmetric(&vals, k)).collect();
    let mut hyperplanes = Vec::new();
    for i in 0..l {
        for j in i + 1..=l {
            let h = &vals[i] - &vals[j];
            hyperplanes.push(h.linear_coeffs().unwrap());
        }
    }
    let mut reflections: Vec<RatMatrix> = (0..l - 1).map(|i| swap(l, i)).collect();
    // y_ℓ ↦ −Σ y, i.e. x_ℓ ↔ x_(ℓ+1)
    reflections.push(RatMatrix::from_fn(l, |r, c| {
        if r == l - 1 {
            Rat::from_int(-1)
        } else {
            Rat::from_int((r == c) as i64)
        }
    }));
    DatumSpec {
        name: format!("A{l}"),
        vars,
        gram: type_a_gram(l),
        invariants,
        hyperplanes,
        reflections,
    }
}

fn type_g2() -> DatumSpec {
    let l = 2;
    let (y1, y2) = (Poly::var(l, 0), Poly::var(l, 1));
    let s = &y1 + &y2;
    let p1 = &(&y1.pow(2) + &y1.mul_poly(&y2)) + &y2.pow(2);
    let p2 = (&(&y1 * &y2) * &s).pow(2);
    let hyperplanes = [[1, 0], [0, 1], [1, 1], [1, -1], [2, 1], [1, 2]]
        .iter()
        .map(|c| ints(c))
        .collect();
    DatumSpec {
        name: "G2".into(),
        vars: vec!["y1".into(), "y2".into()],
        gram: type_a_gram(2),
        invariants: vec![p1, p2],
        hyperplanes,
        reflections: vec![
            RatMatrix::from_ints(&[&[0, 1], &[1, 0]]),
            RatMatrix::from_ints(&[&[-1, 0], &[1, 1]]),
        ],
    }
}
