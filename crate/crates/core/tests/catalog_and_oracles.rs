use std::path::PathBuf;
use std::sync::Arc;

use saito_hodge::coxeter::{builtin, parse_datum, write_datum, BUILTIN_NAMES};
use saito_hodge::expr::{parse, Scope, Value};
use saito_hodge::forms::LogForm;
use saito_hodge::hodge::decompose_form;
use saito_hodge::saito::MatrixFamily;
use saito_hodge::{Error, Poly, Rat};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn family(name: &str) -> MatrixFamily {
    MatrixFamily::new(Arc::new(builtin(name).unwrap())).unwrap()
}

#[test]
fn shipped_datum_files_match_builtins() {
    for name in BUILTIN_NAMES {
        let text = std::fs::read_to_string(data(&format!("{}.datum", name.to_lowercase()))).unwrap();
        let parsed = parse_datum(&text).unwrap();
        let built = builtin(name).unwrap();
        assert_eq!(write_datum(&parsed), write_datum(&built), "{name}");
        assert_eq!(parsed.degrees(), built.degrees());
    }
}

#[test]
fn unknown_builtin_is_rejected() {
    assert!(matches!(builtin("E9"), Err(Error::UnknownType(_))));
}

#[test]
fn b2_witness_matrices() {
    let f = family("B2");
    let names = f.datum().vars().to_vec();
    let poly = |s: &str| f.ambient().poly(saito_hodge::expr::eval_poly(&parse(s).unwrap(), &names).unwrap());
    let b = [["0", "3"], ["1", "3*(x^2+y^2)"]];
    let dg = [["0", "4"], ["4", "6*(x^2+y^2)"]];
    for i in 0..2 {
        for j in 0..2 {
            assert_eq!(f.b().get(i, j), &poly(b[i][j]), "B[{i}][{j}]");
            assert_eq!(f.dg().get(i, j), &poly(dg[i][j]), "D[G][{i}][{j}]");
        }
    }
    assert_eq!(f.dg().det().as_constant(), Some(Rat::from_int(-16)));
}

#[test]
fn b2_example_form_decomposes() {
    let f = family("B2");
    let text = std::fs::read_to_string(data("b2_example.form")).unwrap();
    let scope = Scope { ambient: f.ambient(), invariants: f.datum().invariants() };
    let Value::Form(c) = scope.eval(&parse(&text).unwrap()).unwrap() else {
        panic!("not a form");
    };
    let dec = decompose_form(&f, &LogForm::new(c)).unwrap();
    assert_eq!(dec.summary(), "{-1: [-8*P1^3, 8/3*P1^2], 0: [-4*P1, 2]}");
}

#[test]
fn det_r_constants_are_nonzero() {
    for name in ["A2", "B2", "G2"] {
        let f = family(name);
        for m in -5..=5 {
            let c = f.check_det_r(m).unwrap();
            assert!(!c.is_zero(), "{name} m={m}");
        }
    }
}

#[test]
fn jacobian_determinant_is_proportional_to_q() {
    for name in BUILTIN_NAMES {
        let f = family(name);
        let det = f.j().det();
        let (c, e) = det.as_const_times_q_power().unwrap();
        assert!(!c.is_zero() && e == 1, "{name}");
        let q: &Poly = f.datum().q();
        assert_eq!(q.degree(), Some(f.datum().hyperplanes().len() as u32));
    }
}
