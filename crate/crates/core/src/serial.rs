//! JSON views of polynomials, forms and decompositions.
//!
//! Polynomials become term lists in graded lexicographic order (highest
//! first); rationals are `"p/q"` strings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::hodge::{HodgeDecomposition, PieceReport, Side, TPoly};
use crate::locq::LocQ;
use crate::poly::Poly;
use crate::rat::Rat;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exponents: Vec<u32>,
    pub coeff: Rat,
}

pub fn poly_terms(p: &Poly) -> Vec<TermJson> {
    p.terms()
        .iter()
        .map(|(m, c)| TermJson { exponents: m.exponents(p.nvars()), coeff: c.clone() })
        .collect()
}

/// `numerator / Q^q_power`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocQJson {
    pub text: String,
    pub numerator: Vec<TermJson>,
    pub q_power: u32,
}

impl From<&LocQ> for LocQJson {
    fn from(f: &LocQ) -> LocQJson {
        LocQJson { text: f.to_string(), numerator: poly_terms(f.num()), q_power: f.q_exp() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameElementJson {
    pub name: String,
    /// Coefficients of `dx_i` (forms) or `∂x_i` (derivations).
    pub coeffs: Vec<LocQJson>,
}

pub fn frame_element(name: String, coeffs: &[LocQ]) -> FrameElementJson {
    FrameElementJson { name, coeffs: coeffs.iter().map(LocQJson::from).collect() }
}

/// An element of `T`; `exponents` index `P_1, …, P_(ℓ−1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TPolyJson {
    pub text: String,
    pub terms: Vec<TermJson>,
}

impl From<&TPoly> for TPolyJson {
    fn from(t: &TPoly) -> TPolyJson {
        TPolyJson {
            text: t.to_string(),
            terms: t.terms().iter().map(|(e, c)| TermJson { exponents: e.clone(), coeff: c.clone() }).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceJson {
    pub degree: i64,
    pub min_level: i64,
    pub unknowns: usize,
    pub rank: usize,
    pub expected_dimension: usize,
}

impl From<&PieceReport> for PieceJson {
    fn from(p: &PieceReport) -> PieceJson {
        PieceJson {
            degree: p.degree,
            min_level: p.min_level,
            unknowns: p.unknowns,
            rank: p.rank,
            expected_dimension: p.expected_dimension,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionJson {
    /// `"form"`: level `p` uses `ω^(2p+1)`; `"derivation"`: level `k` uses `η^(2k−1)`.
    pub side: String,
    pub levels: BTreeMap<i64, Vec<TPolyJson>>,
    pub pieces: Vec<PieceJson>,
    pub residual: String,
}

pub fn decomposition(dec: &HodgeDecomposition, residual_zero: bool) -> DecompositionJson {
    DecompositionJson {
        side: match dec.side {
            Side::Form => "form",
            Side::Der => "derivation",
        }
        .to_string(),
        levels: dec.levels.iter().map(|(p, ts)| (*p, ts.iter().map(TPolyJson::from).collect())).collect(),
        pieces: dec.pieces.iter().map(PieceJson::from).collect(),
        residual: if residual_zero { "0".into() } else { "nonzero".into() },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terms_in_graded_lex_order() {
        let p = Poly::from_terms(
            2,
            [
                (crate::poly::Monomial::from_exponents(&[0, 1]), Rat::new(1, 2)),
                (crate::poly::Monomial::from_exponents(&[1, 1]), Rat::from_int(-3)),
                (crate::poly::Monomial::from_exponents(&[2, 0]), Rat::one()),
            ],
        );
        let json = serde_json::to_string(&poly_terms(&p)).unwrap();
        assert_eq!(
            json,
            r#"[{"exponents":[2,0],"coeff":"1"},{"exponents":[1,1],"coeff":"-3"},{"exponents":[0,1],"coeff":"1/2"}]"#
        );
    }
}
