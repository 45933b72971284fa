//! Plain-text datum files.
//!
//! ```text
//! # comments run to the end of the line
//! name B2
//! rank 2
//! vars x y
//! gram
//! 1 0
//! 0 1
//! invariants
//! (x^2 + y^2)/2
//! (x^4 + y^4)/4
//! hyperplanes
//! x
//! y
//! x + y
//! x - y
//! reflections
//! 0 1
//! 1 0
//!
//! 1 0
//! 0 -1
//! ```
//!
//! `gram` and `reflections` hold rows of rationals (`p` or `p/q`); a
//! reflection `s` listed with rows `M` acts by `s(x_i) = Σ_j M_ij x_j`.
//! `invariants` and `hyperplanes` hold one expression per line.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::expr::{eval_poly, parse_at};
use crate::matrix::RatMatrix;
use crate::poly::Poly;
use crate::rat::Rat;

use super::{CoxeterDatum, DatumSpec};

const SECTIONS: [&str; 7] = ["name", "rank", "vars", "gram", "invariants", "hyperplanes", "reflections"];

struct Line<'a> {
    number: usize,
    /// Column (1-based) of the first character of `text`.
    column: usize,
    text: &'a str,
}

#[derive(Default)]
struct Sections<'a> {
    inline: Vec<(&'static str, Line<'a>)>,
    blocks: Vec<(&'static str, usize, Vec<Line<'a>>)>,
}

fn strip_comment(s: &str) -> &str {
    s.split('#').next().unwrap_or("")
}

fn split_sections(text: &str) -> Result<Sections<'_>> {
    let mut out = Sections::default();
    for (i, raw) in text.lines().enumerate() {
        let number = i + 1;
        let body = strip_comment(raw);
        let trimmed = body.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let column = body.len() - trimmed.len() + 1;
        let head = trimmed.split_whitespace().next().unwrap();
        if let Some(&key) = SECTIONS.iter().find(|&&k| k == head) {
            let rest = trimmed[head.len()..].trim_start();
            let rest_col = column + trimmed.len() - rest.len();
            if out.inline.iter().any(|(k, _)| *k == key) || out.blocks.iter().any(|(k, _, _)| *k == key) {
                return Err(Error::parse(number, column, format!("duplicate section `{key}`")));
            }
            match key {
                "name" | "rank" | "vars" => {
                    if rest.trim().is_empty() {
                        return Err(Error::parse(number, column, format!("`{key}` needs a value")));
                    }
                    out.inline.push((key, Line { number, column: rest_col, text: rest.trim_end() }));
                }
                _ => {
                    if !rest.trim().is_empty() {
                        return Err(Error::parse(number, rest_col, "section header takes no value"));
                    }
                    out.blocks.push((key, number, Vec::new()));
                }
            }
            continue;
        }
        match out.blocks.last_mut() {
            Some((_, _, lines)) => lines.push(Line { number, column, text: trimmed.trim_end() }),
            None => return Err(Error::parse(number, column, format!("unknown section `{head}`"))),
        }
    }
    Ok(out)
}

fn rational_row(line: &Line<'_>, width: usize) -> Result<Vec<Rat>> {
    let mut row = Vec::with_capacity(width);
    let mut offset = 0;
    for tok in line.text.split_whitespace() {
        let at = line.text[offset..].find(tok).unwrap() + offset;
        offset = at + tok.len();
        let col = line.column + line.text[..at].chars().count();
        row.push(tok.parse::<Rat>().map_err(|_| Error::parse(line.number, col, format!("`{tok}` is not a rational")))?);
    }
    if row.len() != width {
        return Err(Error::parse(line.number, line.column, format!("expected {width} entries, found {}", row.len())));
    }
    Ok(row)
}

fn expression(line: &Line<'_>, vars: &[String]) -> Result<Poly> {
    let expr = parse_at(line.text, line.number).map_err(|e| match e {
        Error::Parse { line: l, column, message } => Error::parse(l, column + line.column - 1, message),
        other => other,
    })?;
    eval_poly(&expr, vars).map_err(|e| Error::parse(line.number, line.column, e.to_string()))
}

/// Reads and validates a datum file.
pub fn parse_datum(text: &str) -> Result<CoxeterDatum> {
    CoxeterDatum::new(parse_spec(text)?)
}

fn parse_spec(text: &str) -> Result<DatumSpec> {
    let secs = split_sections(text)?;
    let last_line = text.lines().count().max(1);
    let missing = |key: &str| Error::parse(last_line, 1, format!("missing section `{key}`"));
    let inline = |key: &'static str| secs.inline.iter().find(|(k, _)| *k == key).map(|(_, l)| l);
    let block = |key: &'static str| secs.blocks.iter().find(|(k, _, _)| *k == key);

    let name = inline("name").ok_or_else(|| missing("name"))?.text.to_string();
    let rank_line = inline("rank").ok_or_else(|| missing("rank"))?;
    let rank: usize = rank_line
        .text
        .trim()
        .parse()
        .map_err(|_| Error::parse(rank_line.number, rank_line.column, "rank must be a positive integer"))?;
    let vars_line = inline("vars").ok_or_else(|| missing("vars"))?;
    let vars: Vec<String> = vars_line.text.split_whitespace().map(String::from).collect();
    if vars.len() != rank {
        return Err(Error::parse(vars_line.number, vars_line.column, format!("expected {rank} variable names")));
    }
    for v in &vars {
        let ok = v.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
            && v.chars().all(|c| c.is_alphanumeric() || c == '_')
            && !SECTIONS.contains(&v.as_str());
        if !ok {
            return Err(Error::parse(vars_line.number, vars_line.column, format!("invalid variable name `{v}`")));
        }
    }

    let (_, gram_at, gram_lines) = block("gram").ok_or_else(|| missing("gram"))?;
    if gram_lines.len() != rank {
        return Err(Error::parse(*gram_at, 1, format!("gram needs {rank} rows")));
    }
    let gram = RatMatrix::from_rows(gram_lines.iter().map(|l| rational_row(l, rank)).collect::<Result<_>>()?);

    let (_, inv_at, inv_lines) = block("invariants").ok_or_else(|| missing("invariants"))?;
    if inv_lines.len() != rank {
        return Err(Error::parse(*inv_at, 1, format!("expected {rank} invariants")));
    }
    let invariants = inv_lines.iter().map(|l| expression(l, &vars)).collect::<Result<_>>()?;

    let (_, _, hyp_lines) = block("hyperplanes").ok_or_else(|| missing("hyperplanes"))?;
    let mut hyperplanes = Vec::new();
    for l in hyp_lines {
        let p = expression(l, &vars)?;
        let coeffs = p
            .linear_coeffs()
            .filter(|_| p.is_homogeneous() && p.degree() == Some(1))
            .ok_or_else(|| Error::parse(l.number, l.column, "hyperplane must be a nonzero linear form"))?;
        hyperplanes.push(coeffs);
    }

    let (_, refl_at, refl_lines) = block("reflections").ok_or_else(|| missing("reflections"))?;
    if refl_lines.is_empty() || refl_lines.len() % rank != 0 {
        return Err(Error::parse(*refl_at, 1, format!("reflections need a multiple of {rank} rows")));
    }
    let rows: Vec<Vec<Rat>> = refl_lines.iter().map(|l| rational_row(l, rank)).collect::<Result<_>>()?;
    let reflections = rows.chunks(rank).map(|c| RatMatrix::from_rows(c.to_vec())).collect();

    Ok(DatumSpec { name, vars, gram, invariants, hyperplanes, reflections })
}

/// Canonical text form; `parse_datum(&write_datum(d))` reproduces `d`.
pub fn write_datum(d: &CoxeterDatum) -> String {
    let spec = d.spec();
    let l = d.rank();
    let mut out = String::new();
    let row = |r: &[Rat]| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let _ = writeln!(out, "name {}", spec.name);
    let _ = writeln!(out, "rank {l}");
    let _ = writeln!(out, "vars {}", spec.vars.join(" "));
    out.push_str("gram\n");
    for r in spec.gram.rows() {
        let _ = writeln!(out, "{}", row(&r));
    }
    out.push_str("invariants\n");
    for p in &spec.invariants {
        let _ = writeln!(out, "{}", p.display_with(&spec.vars));
    }
    out.push_str("hyperplanes\n");
    for h in &spec.hyperplanes {
        let _ = writeln!(out, "{}", Poly::linear(h).display_with(&spec.vars));
    }
    out.push_str("reflections\n");
    for (k, s) in spec.reflections.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        for r in s.rows() {
            let _ = writeln!(out, "{}", row(&r));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::{builtin, BUILTIN_NAMES};
    use super::*;

    #[test]
    fn builtins_round_trip() {
        for name in BUILTIN_NAMES {
            let d = builtin(name).unwrap();
            let back = parse_datum(&write_datum(&d)).unwrap();
            assert_eq!(back, d, "{name}");
        }
    }

    #[test]
    fn positions_are_reported() {
        let text = "name X\nrank 2\nvars x y\ngram\n1 0\n0 q\n";
        match parse_datum(text) {
            Err(Error::Parse { line: 6, column: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        let text = "name X\nrank 2\nvars x y\ngram\n1 0\n0 1\ninvariants\nx^2 + y^2\n  x^4 + * y\n";
        match parse_datum(text) {
            Err(Error::Parse { line: 9, column, .. }) => assert_eq!(column, 9),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_datum("bogus 1\n"), Err(Error::Parse { line: 1, .. })));
    }
}
