//! Batch verification of one datum and the JSON report it produces.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::coxeter::{write_datum, CoxeterDatum};
use crate::error::{Error, Result};
use crate::forms::{
    eta_basis, member_der, member_der_by_basis, member_omega, member_omega_by_basis, omega_basis, saito_ziegler,
    LogDer, LogForm,
};
use crate::hodge::{
    check_coefficients, decompose_form, nabla_d_inverse_form, verify_free_basis_over_r, verify_invariant_parts_equal,
    TPoly,
};
use crate::random::Sampler;
use crate::rat::Rat;
use crate::relations::{verify_commu, verify_deri, verify_relation1};
use crate::saito::MatrixFamily;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    /// The statement being checked, in words and formulas.
    pub anchor: String,
    pub status: Status,
    /// Certificate on success, counterexample or error on failure.
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_ms: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatumSummary {
    pub name: String,
    /// SHA-256 of the canonical datum text, hex encoded.
    pub hash: String,
    pub rank: usize,
    pub degrees: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: String,
    pub datum: DatumSummary,
    pub seed: u64,
    pub k_min: i64,
    pub k_max: i64,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<CheckRecord>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn first_failure(&self) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.status == Status::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

pub fn datum_hash(datum: &CoxeterDatum) -> String {
    let digest = Sha256::digest(write_datum(datum).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn datum_summary(datum: &CoxeterDatum) -> DatumSummary {
    DatumSummary {
        name: datum.name().to_string(),
        hash: datum_hash(datum),
        rank: datum.rank(),
        degrees: datum.degrees().to_vec(),
    }
}

type CheckFn = Box<dyn Fn(&MatrixFamily) -> Result<String> + Send + Sync>;

/// One named check.
pub struct Check {
    pub id: String,
    pub anchor: String,
    run: CheckFn,
}

impl Check {
    pub fn new(
        id: impl Into<String>,
        anchor: impl Into<String>,
        run: impl Fn(&MatrixFamily) -> Result<String> + Send + Sync + 'static,
    ) -> Check {
        Check { id: id.into(), anchor: anchor.into(), run: Box::new(run) }
    }

    pub fn run(&self, family: &MatrixFamily, timings: bool) -> CheckRecord {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| (self.run)(family)))
            .unwrap_or_else(|p| {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                Err(Error::CrossCheckFailure(format!("panicked: {msg}")))
            });
        let wall_ms = timings.then(|| start.elapsed().as_millis() as u64);
        let (status, detail, error) = match outcome {
            Ok(d) => (Status::Pass, d, None),
            Err(e) => (Status::Fail, e.to_string(), Some(e.kind().to_string())),
        };
        CheckRecord { id: self.id.clone(), anchor: self.anchor.clone(), status, detail, error, wall_ms }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteOptions {
    pub k_min: i64,
    pub k_max: i64,
    pub seed: u64,
    /// Random samples per randomized check.
    pub trials: usize,
    pub timings: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { k_min: -2, k_max: 2, seed: crate::random::DEFAULT_SEED, trials: 25, timings: false }
    }
}

fn ok_unit(r: Result<()>, msg: impl Into<String>) -> Result<String> {
    r.map(|_| msg.into())
}

pub fn structure_checks(opts: &SuiteOptions) -> Vec<Check> {
    let mut out = vec![
        Check::new("derivation", "D(P_j) = δ_jℓ", |f| ok_unit(f.check_derivation(), "D kills P_1..P_(ℓ−1) and D(P_ℓ) = 1")),
        Check::new("dg", "D[G] = B + B^T ∈ GL_ℓ(T), D²[G] = 0", |f| {
            ok_unit(f.check_dg(), format!("det D[G] = {}", f.dg().det()))
        }),
    ];
    for k in opts.k_min..=opts.k_max {
        out.push(Check::new(
            format!("bk[k={k}]"),
            "B^(k) ∈ GL_ℓ(T); B^(k+1) − B^(k) = D[G]; B^(k) = −(B^(1−k))^T",
            move |f| ok_unit(f.check_bk(k), format!("det B^({k}) = {}", f.bk(k).det())),
        ));
    }
    out
}

fn m_range(opts: &SuiteOptions) -> std::ops::RangeInclusive<i64> {
    (2 * opts.k_min + 1)..=(2 * opts.k_max - 1)
}

pub fn matrix_checks(opts: &SuiteOptions) -> Vec<Check> {
    let mut out = Vec::new();
    for m in m_range(opts) {
        out.push(Check::new(format!("det-r[m={m}]"), "det R_m = c_m·Q^m, c_m ≠ 0", move |f| {
            f.check_det_r(m).map(|c| format!("c = {c}"))
        }));
    }
    for m in m_range(opts) {
        out.push(Check::new(format!("r-inverse[m={m}]"), "R_m · R_m^{-1} = I", move |f| {
            ok_unit(f.check_r_inverse(m), "exact")
        }));
    }
    for k in (opts.k_min + 1)..=(opts.k_max - 1) {
        out.push(Check::new(
            format!("recursions[k={k}]"),
            "R_2k = R_(2k−1)B^{-1}J^T A; R_(2k+1) = R_2k J(B^(k+1))^{-1}B; R_(2k+1) = R_(2k−1)B^{-1}G(B^(k+1))^{-1}B; ∇_D ω^(2k+1) = ω^(2k−1)",
            move |f| ok_unit(f.check_recursions(k), "all four identities exact"),
        ));
    }
    for m in m_range(opts) {
        out.push(Check::new(
            format!("y[m={m}]"),
            "Y_2k = (−1)^k A, Y_(2k−1) = (−1)^(k+1) B^T (B^(k))^{-1} B",
            move |f| ok_unit(f.check_y(m), "matches closed form"),
        ));
    }
    out
}

pub fn basis_checks(opts: &SuiteOptions) -> Vec<Check> {
    let mut out = Vec::new();
    for m in m_range(opts).filter(|&m| m >= 0) {
        out.push(Check::new(
            format!("omega-basis[m={m}]"),
            "ω^(−m) ⊂ Ω(𝒜,m) with wedge ≐ Q^(−m): an S-basis by the Saito–Ziegler criterion",
            move |f| match saito_ziegler(f.datum(), &omega_basis(f, -m)?, m)? {
                Some(c) => Ok(format!("wedge = {c}·Q^{}", -m)),
                None => Err(Error::CrossCheckFailure(format!("wedge of ω^({}) is not ≐ Q^{}", -m, -m))),
            },
        ));
    }
    let trials = opts.trials;
    for m in 1..=3 {
        let seed = opts.seed;
        out.push(Check::new(
            format!("membership[m={m}]"),
            "definition of Ω(𝒜,m) and D(𝒜,m) agrees with polynomial coordinates in ω^(−m), η^(m)",
            move |f| membership_agreement(f, m, trials, seed),
        ));
    }
    out
}

fn membership_agreement(family: &MatrixFamily, m: i64, trials: usize, seed: u64) -> Result<String> {
    let amb = family.ambient();
    let mut sampler = Sampler::for_label(seed, &format!("membership/{}/{m}", family.datum().name()));
    let (mut forms_in, mut ders_in) = (0, 0);
    for t in 0..trials {
        let w = match t % 4 {
            0 => sampler.member_form(family, m, 2)?,
            1 => sampler.member_form(family, m + 1, 2)?,
            2 => &sampler.member_form(family, m, 2)? + &sampler.monomial_form(amb, m as u32, 3),
            _ => &sampler.member_form(family, m - 1, 2)? + &sampler.monomial_form(amb, 0, 2),
        };
        let by_def = member_omega(family.datum(), &w, m);
        let by_basis = member_omega_by_basis(family, &w, m)?;
        if by_def.member != by_basis.member {
            return Err(Error::CrossCheckFailure(format!(
                "form sample {t}: definition says {} ({}), basis says {} ({})",
                by_def.member, by_def.certificate, by_basis.member, by_basis.certificate
            )));
        }
        forms_in += by_def.member as usize;

        let theta = match t % 3 {
            0 => sampler.combination_der(amb, &eta_basis(family, m)?, 2),
            1 => sampler.combination_der(amb, &eta_basis(family, m - 1)?, 2),
            _ => &sampler.combination_der(amb, &eta_basis(family, m)?, 2) + &partial_term(&mut sampler, family),
        };
        let by_def = member_der(family, &theta, m)?;
        let by_basis = member_der_by_basis(family, &theta, m)?;
        if by_def.member != by_basis.member {
            return Err(Error::CrossCheckFailure(format!(
                "derivation sample {t}: definition says {} ({}), basis says {} ({})",
                by_def.member, by_def.certificate, by_basis.member, by_basis.certificate
            )));
        }
        ders_in += by_def.member as usize;
    }
    Ok(format!(
        "{trials} forms ({forms_in} members) and {trials} derivations ({ders_in} members): both tests agree"
    ))
}

fn partial_term(sampler: &mut Sampler, family: &MatrixFamily) -> LogDer {
    let amb = family.ambient();
    let l = amb.nvars();
    let i = sampler.range(0, l as i64 - 1) as usize;
    LogDer::partial(amb, i).scale(&amb.poly(sampler.poly(l, 2, 2)))
}

/// A random element of `⊕_p F_p` with known coefficients.
pub fn planted_invariant_form(
    family: &MatrixFamily,
    sampler: &mut Sampler,
    levels: std::ops::RangeInclusive<i64>,
) -> Result<(LogForm, Vec<(i64, usize, TPoly)>)> {
    let l = family.datum().rank();
    let inv = family.datum().invariants();
    let mut w = LogForm::zero(family.ambient());
    let mut planted = Vec::new();
    let terms = sampler.range(1, 3);
    for _ in 0..terms {
        let p = sampler.range(*levels.start(), *levels.end());
        let j = sampler.range(0, l as i64 - 1) as usize;
        let exps: Vec<u32> = (0..l - 1).map(|_| sampler.range(0, 1) as u32).collect();
        let t = TPoly::from_terms(vec![(exps, sampler.nonzero_coefficient())]);
        let basis = omega_basis(family, 2 * p + 1)?;
        w = &w + &basis[j].scale(&family.ambient().poly(t.to_poly(inv)));
        planted.push((p, j, t));
    }
    Ok((w, planted))
}

pub fn hodge_checks(opts: &SuiteOptions) -> Vec<Check> {
    let mut out = Vec::new();
    let (trials, seed) = (opts.trials, opts.seed);
    let lo = opts.k_min.max(-2);
    let hi = (opts.k_max - 1).clamp(lo, 1);
    out.push(Check::new(
        "hodge-planted",
        "Σ_p Σ_j t_pj ω_j^(2p+1) decomposes back to the same t_pj ∈ T; rank = Poincaré-series dimension",
        move |f| {
            let mut sampler = Sampler::for_label(seed, &format!("planted/{}", f.datum().name()));
            let mut pieces = 0;
            for t in 0..trials {
                let (w, planted) = planted_invariant_form(f, &mut sampler, lo..=hi)?;
                let dec = decompose_form(f, &w)?;
                check_coefficients(f, &dec)?;
                for piece in &dec.pieces {
                    if piece.rank != piece.unknowns || piece.unknowns != piece.expected_dimension {
                        return Err(Error::CrossCheckFailure(format!("sample {t}: degree {} piece {piece:?}", piece.degree)));
                    }
                }
                pieces += dec.pieces.len();
                let l = f.datum().rank();
                let mut expected: std::collections::BTreeMap<i64, Vec<Vec<(Vec<u32>, Rat)>>> = Default::default();
                for (p, j, tp) in planted {
                    expected.entry(p).or_insert_with(|| vec![Vec::new(); l])[j].extend(tp.terms().iter().cloned());
                }
                let expected: std::collections::BTreeMap<i64, Vec<TPoly>> = expected
                    .into_iter()
                    .map(|(p, v)| (p, v.into_iter().map(TPoly::from_terms).collect::<Vec<_>>()))
                    .filter(|(_, v)| v.iter().any(|t| !t.is_zero()))
                    .collect();
                if dec.levels != expected {
                    return Err(Error::CrossCheckFailure(format!("sample {t}: decomposed {}", dec.summary())));
                }
            }
            Ok(format!("{trials} planted forms recovered exactly ({pieces} graded pieces)"))
        },
    ));
    out.push(Check::new(
        "nabla-d-automorphism",
        "∇_D ∘ ∇_D^{-1} = id and ∇_D^{-1} ∘ ∇_D = id on invariant logarithmic forms",
        move |f| {
            let mut sampler = Sampler::for_label(seed, &format!("automorphism/{}", f.datum().name()));
            let d = f.derivation();
            let count = trials.max(20);
            for t in 0..count {
                let (w, _) = planted_invariant_form(f, &mut sampler, lo..=hi)?;
                if nabla_d_inverse_form(f, &w)?.nabla_d(d) != w {
                    return Err(Error::CrossCheckFailure(format!("sample {t}: ∇_D ∇_D^-1 ω ≠ ω")));
                }
                if nabla_d_inverse_form(f, &w.nabla_d(d))? != w {
                    return Err(Error::CrossCheckFailure(format!("sample {t}: ∇_D^-1 ∇_D ω ≠ ω")));
                }
            }
            Ok(format!("{count} invariant forms, both compositions exact"))
        },
    ));
    for k in 0..=opts.k_max.clamp(0, 2) {
        out.push(Check::new(
            format!("invariant-parts[k={k}]"),
            "Ω(𝒜,2k)^W = Ω(𝒜,2k−1)^W: symmetrized elements of Ω(𝒜,2k) lie in Ω(𝒜,2k−1)",
            move |f| verify_invariant_parts_equal(f, k, trials, seed),
        ));
    }
    for k in 0..opts.k_max.max(0) {
        out.push(Check::new(
            format!("free-basis[k={k}]"),
            "Ω(𝒜,2k−1)^W is R-free on ω^(1−2k), dual to η^(2k−1) through Y_(2k−1)",
            move |f| verify_free_basis_over_r(f, k),
        ));
    }
    out
}

pub fn relation_checks(k_max: i64) -> Vec<Check> {
    let mut out = Vec::new();
    for k in 0..=k_max {
        out.push(Check::new(
            format!("relation-xi[k={k}]"),
            "ξ^(2k+1) = (−1)^k η^(2k+1) B^{-1} B^(k+1), ξ^(2k) = (−1)^k η^(2k)",
            move |f| verify_relation1(f, k),
        ));
        out.push(Check::new(
            format!("relation-euler[k={k}]"),
            "[∇_I*(dP_i) ∇_D^{-k} θ_E] = η^(2k+1) B^{-1} B^(k+1), [∇_∂x_i ∇_D^{-k} θ_E] = η^(2k) A^{-1}",
            move |f| verify_deri(f, k),
        ));
        out.push(Check::new(
            format!("relation-dp1[k={k}]"),
            "[∇_∂P_i ∇_D^k dP_1] = ω^(−2k−1) B^{-1}, [∇_∂x_i ∇_D^k dP_1] = ω^(−2k) A^{-1}",
            move |f| verify_commu(f, k),
        ));
    }
    out
}

/// Every check for `verify`, in report order.
pub fn full_suite(opts: &SuiteOptions) -> Vec<Check> {
    let mut out = structure_checks(opts);
    out.extend(matrix_checks(opts));
    out.extend(basis_checks(opts));
    out.extend(hodge_checks(opts));
    out.extend(relation_checks((opts.k_max - 1).clamp(0, 2)));
    out
}

/// Runs `checks` in parallel; records come back in the order given.
pub fn run_checks(family: &MatrixFamily, checks: &[Check], opts: &SuiteOptions) -> Report {
    let records: Vec<CheckRecord> = checks.par_iter().map(|c| c.run(family, opts.timings)).collect();
    let failed = records.iter().filter(|r| r.status == Status::Fail).count();
    Report {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        datum: datum_summary(family.datum()),
        seed: opts.seed,
        k_min: opts.k_min,
        k_max: opts.k_max,
        trials: opts.trials,
        passed: records.len() - failed,
        failed,
        checks: records,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::builtin;
    use std::sync::Arc;

    #[test]
    fn b2_suite_passes_and_is_reproducible() {
        let f = MatrixFamily::new(Arc::new(builtin("B2").unwrap())).unwrap();
        let opts = SuiteOptions { k_min: -1, k_max: 2, trials: 6, ..SuiteOptions::default() };
        let suite = full_suite(&opts);
        let a = run_checks(&f, &suite, &opts);
        for c in &a.checks {
            assert_eq!(c.status, Status::Pass, "{}: {}", c.id, c.detail);
        }
        let b = run_checks(&f, &suite, &opts);
        assert_eq!(a.to_json(), b.to_json());
        assert!(a.to_json().contains("\"schema_version\": 1"));
    }

    #[test]
    fn failures_are_recorded() {
        let f = MatrixFamily::new(Arc::new(builtin("A2").unwrap())).unwrap();
        let checks = vec![
            Check::new("ok", "", |_| Ok("fine".into())),
            Check::new("bad", "", |_| Err(Error::IdentityViolation("nope".into()))),
            Check::new("boom", "", |_| panic!("exploded")),
        ];
        let r = run_checks(&f, &checks, &SuiteOptions::default());
        assert_eq!((r.passed, r.failed), (1, 2));
        assert_eq!(r.first_failure().unwrap().id, "bad");
        assert_eq!(r.checks[2].detail, "cross-check failure: panicked: exploded");
    }
}
