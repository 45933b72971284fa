use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use saito_hodge::coxeter::{builtin, parse_datum, write_datum, CoxeterDatum, BUILTIN_NAMES, DEFAULT_GROUP_BOUND};
use saito_hodge::expr::{parse, Scope, Value};
use saito_hodge::forms::{eta_basis, omega_basis, LogDer, LogForm};
use saito_hodge::hodge::{decompose_der, decompose_form, HodgeDecomposition, Side};
use saito_hodge::saito::MatrixFamily;
use saito_hodge::serial;
use saito_hodge::verify::{self, Report, Status, SuiteOptions};
use saito_hodge::Error;

/// Bases of logarithmic forms and derivations for Coxeter arrangements,
/// Hodge decompositions, and exact verification of their identities.
#[derive(Parser)]
#[command(name = "saito-hodge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Built-in arrangements.
    #[command(subcommand)]
    Catalog(CatalogCommand),
    /// Print ω^(m) (forms) and/or η^(m) (derivations).
    Basis(BasisArgs),
    /// Run the verification suite and write a JSON report.
    Verify(VerifyArgs),
    /// Hodge levels of a W-invariant logarithmic form or derivation.
    Decompose(DecomposeArgs),
    /// Identities between the ξ, ∇-built and ω/η bases for k = 0..=K.
    Relations(RelationsArgs),
}

#[derive(Subcommand)]
enum CatalogCommand {
    /// Names of the built-in arrangements.
    List,
    /// Degrees, exponents and sizes of one arrangement.
    Show {
        #[arg(long)]
        datum: String,
    },
    /// The arrangement in datum-file format.
    Export {
        #[arg(long)]
        datum: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Kind {
    Forms,
    Derivations,
    Both,
}

#[derive(Args)]
struct BasisArgs {
    /// Built-in name or path to a datum file.
    #[arg(long)]
    datum: String,
    #[arg(short = 'm', long = "index", allow_hyphen_values = true)]
    m: i64,
    #[arg(long, value_enum, default_value = "both")]
    kind: Kind,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    datum: String,
    #[arg(long, default_value_t = -2, allow_hyphen_values = true)]
    k_min: i64,
    #[arg(long, default_value_t = 2, allow_hyphen_values = true)]
    k_max: i64,
    #[arg(long, default_value_t = saito_hodge::random::DEFAULT_SEED)]
    seed: u64,
    /// Random samples per randomized check.
    #[arg(long, default_value_t = 25)]
    trials: usize,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record wall time per check (makes reports differ between runs).
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct DecomposeArgs {
    #[arg(long)]
    datum: String,
    /// File holding one expression.
    #[arg(long, conflicts_with = "expr", required_unless_present = "expr")]
    form: Option<PathBuf>,
    /// The expression itself.
    #[arg(long)]
    expr: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct RelationsArgs {
    #[arg(long)]
    datum: String,
    #[arg(long, default_value_t = 2)]
    k: i64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    timings: bool,
}

/// Exit status 1: a check failed or the input has no decomposition.
/// Exit status 2: unusable input (bad file, unknown type, parse error).
enum Failure {
    Check(String),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::Parse { .. } | Error::UnknownType(_) | Error::Validation(_) | Error::Domain(_) => {
                Failure::Input(e.to_string())
            }
            other => Failure::Check(other.to_string()),
        }
    }
}

type CliResult = Result<(), Failure>;

fn load_datum(spec: &str) -> Result<CoxeterDatum, Failure> {
    let path = Path::new(spec);
    if BUILTIN_NAMES.contains(&spec) && !path.exists() {
        return Ok(builtin(spec)?);
    }
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        return parse_datum(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())));
    }
    Ok(builtin(spec)?)
}

fn load_family(spec: &str) -> Result<MatrixFamily, Failure> {
    Ok(MatrixFamily::new(Arc::new(load_datum(spec)?))?)
}

fn write_output(out: &Option<PathBuf>, text: &str) -> CliResult {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn catalog(cmd: CatalogCommand) -> CliResult {
    match cmd {
        CatalogCommand::List => {
            for name in BUILTIN_NAMES {
                println!("{name}");
            }
        }
        CatalogCommand::Show { datum } => {
            let d = load_datum(&datum)?;
            let order = d.group(DEFAULT_GROUP_BOUND)?.order();
            println!("name        {}", d.name());
            println!("rank        {}", d.rank());
            println!("vars        {}", d.vars().join(" "));
            println!("degrees     {:?}", d.degrees());
            println!("exponents   {:?}", d.exponents());
            println!("coxeter h   {}", d.coxeter_number());
            println!("hyperplanes {}", d.hyperplanes().len());
            println!("|W|         {order}");
            println!("Q           {}", d.q().display_with(d.vars()));
            for (i, p) in d.invariants().iter().enumerate() {
                println!("P{}          {}", i + 1, p.display_with(d.vars()));
            }
            println!("hash        {}", verify::datum_hash(&d));
        }
        CatalogCommand::Export { datum } => print!("{}", write_datum(&load_datum(&datum)?)),
    }
    Ok(())
}

fn frame_text(name: &str, coeffs: &[saito_hodge::LocQ], symbols: &[String]) -> String {
    let parts: Vec<String> = coeffs
        .iter()
        .zip(symbols)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, s)| format!("({c})*{s}"))
        .collect();
    format!("{name} = {}", if parts.is_empty() { "0".to_string() } else { parts.join(" + ") })
}

fn basis(args: BasisArgs) -> CliResult {
    let family = load_family(&args.datum)?;
    let m = args.m;
    let vars = family.datum().vars();
    let dx: Vec<String> = vars.iter().map(|v| format!("d{v}")).collect();
    let dd: Vec<String> = vars.iter().map(|v| format!("∂{v}")).collect();
    let forms = if args.kind != Kind::Derivations { omega_basis(&family, m)? } else { Vec::new() };
    let ders = if args.kind != Kind::Forms { eta_basis(&family, m)? } else { Vec::new() };
    match args.format {
        Format::Text => {
            for (j, w) in forms.iter().enumerate() {
                println!("{}", frame_text(&format!("ω_{}^({m})", j + 1), w.coeffs(), &dx));
            }
            for (j, t) in ders.iter().enumerate() {
                println!("{}", frame_text(&format!("η_{}^({m})", j + 1), t.coeffs(), &dd));
            }
        }
        Format::Json => {
            let obj = serde_json::json!({
                "schema_version": verify::SCHEMA_VERSION,
                "datum": verify::datum_summary(family.datum()),
                "vars": vars,
                "m": m,
                "omegaBasis": forms.iter().enumerate()
                    .map(|(j, w)| serial::frame_element(format!("omega_{}^({m})", j + 1), w.coeffs()))
                    .collect::<Vec<_>>(),
                "etaBasis": ders.iter().enumerate()
                    .map(|(j, t)| serial::frame_element(format!("eta_{}^({m})", j + 1), t.coeffs()))
                    .collect::<Vec<_>>(),
            });
            println!("{}", serde_json::to_string_pretty(&obj).expect("serializable"));
        }
    }
    Ok(())
}

fn finish(report: &Report, out: &Option<PathBuf>) -> CliResult {
    write_output(out, &report.to_json())?;
    for c in &report.checks {
        let tag = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        };
        eprintln!("{tag} {}", c.id);
    }
    eprintln!("{} passed, {} failed", report.passed, report.failed);
    match report.first_failure() {
        None => Ok(()),
        Some(c) => Err(Failure::Check(format!("check `{}` failed: {}", c.id, c.detail))),
    }
}

fn run_verify(args: VerifyArgs) -> CliResult {
    if args.k_min > args.k_max {
        return Err(Failure::Input("--k-min must not exceed --k-max".into()));
    }
    let family = load_family(&args.datum)?;
    let opts = SuiteOptions {
        k_min: args.k_min,
        k_max: args.k_max,
        seed: args.seed,
        trials: args.trials,
        timings: args.timings,
    };
    let report = verify::run_checks(&family, &verify::full_suite(&opts), &opts);
    finish(&report, &args.out)
}

fn relations(args: RelationsArgs) -> CliResult {
    if args.k < 0 {
        return Err(Failure::Input("--k must be ≥ 0".into()));
    }
    let family = load_family(&args.datum)?;
    let opts = SuiteOptions { k_min: 0, k_max: args.k, timings: args.timings, ..SuiteOptions::default() };
    let report = verify::run_checks(&family, &verify::relation_checks(args.k), &opts);
    finish(&report, &args.out)
}

fn print_levels(dec: &HodgeDecomposition) {
    let basis = match dec.side {
        Side::Form => "ω",
        Side::Der => "η",
    };
    if dec.levels.is_empty() {
        println!("zero");
    }
    for (p, ts) in &dec.levels {
        let m = HodgeDecomposition::basis_index(dec.side, *p);
        let cs: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
        println!("level {p} ({basis}^({m})): [{}]", cs.join(", "));
    }
}

fn decompose(args: DecomposeArgs) -> CliResult {
    let family = load_family(&args.datum)?;
    let text = match (&args.form, &args.expr) {
        (Some(p), _) => std::fs::read_to_string(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?,
        (None, Some(e)) => e.clone(),
        (None, None) => unreachable!("clap requires one of --form, --expr"),
    };
    let scope = Scope { ambient: family.ambient(), invariants: family.datum().invariants() };
    let value = scope.eval(&parse(&text)?)?;
    let (dec, residual_zero) = match &value {
        Value::Form(c) => {
            let w = LogForm::new(c.clone());
            let dec = decompose_form(&family, &w)?;
            let zero = dec.reconstruct_coeffs(&family, 0)? == w.coeffs();
            (dec, zero)
        }
        Value::Der(c) => {
            let t = LogDer::new(c.clone());
            let dec = decompose_der(&family, &t)?;
            let zero = dec.reconstruct_coeffs(&family, 0)? == t.coeffs();
            (dec, zero)
        }
        Value::Scalar(_) => return Err(Failure::Input("expected a 1-form or a derivation, got a function".into())),
    };
    match args.format {
        Format::Text => {
            print_levels(&dec);
            println!("residual {}", if residual_zero { "0" } else { "nonzero" });
        }
        Format::Json => {
            let obj = serde_json::json!({
                "schema_version": verify::SCHEMA_VERSION,
                "datum": verify::datum_summary(family.datum()),
                "input": text.trim(),
                "decomposition": serial::decomposition(&dec, residual_zero),
            });
            println!("{}", serde_json::to_string_pretty(&obj).expect("serializable"));
        }
    }
    if residual_zero {
        Ok(())
    } else {
        Err(Failure::Check("reconstruction differs from the input".into()))
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("SAITO_HODGE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Input(format!("SAITO_HODGE_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Input(format!("thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| match cli.command {
        Command::Catalog(c) => catalog(c),
        Command::Basis(a) => basis(a),
        Command::Verify(a) => run_verify(a),
        Command::Decompose(a) => decompose(a),
        Command::Relations(a) => relations(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
