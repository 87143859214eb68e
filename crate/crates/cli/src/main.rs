mod report;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use cyclav::cyclicity::classify_isogeny_class;
use cyclav::ingest::{self, FetchConfig};
use cyclav::latimer::{ideal_to_matrix, matrices_conjugate, matrix_to_ideal_default};
use cyclav::weil::{self, check_weil, make_context, parse_coefficients, WeilFilter, DEFAULT_Q_CAP};
use cyclav::{BigInt, BigRational, Equivalence, Error, IdealLattice, IntMatrix, IntPoly, NumberField, WeilContext};
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "cyclav", version, about = "Cyclicity of ordinary simple isogeny classes over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the Weil, ordinary and irreducible flags of a polynomial.
    Validate(ContextArgs),
    /// Classify every variety of an isogeny class as cyclic or not.
    Classify {
        #[command(flatten)]
        ctx: ContextArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert between a Frobenius matrix and a fractional ideal.
    Convert(ConvertArgs),
    /// Classify every ordinary simple isogeny class for (p, r, g).
    Sweep {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        g: usize,
        #[command(flatten)]
        run: RunArgs,
        /// Cross-validate against a JSON-lines fixture of tabulated classes.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        /// Directory for per-context JSON documents and `summary.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_Q_CAP)]
        q_cap: u64,
    },
    /// Download tabulated classes for (q, g) into the cache.
    Fetch {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        g: usize,
        #[arg(long)]
        endpoint: Option<String>,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        /// Allow network access.
        #[arg(long)]
        network: bool,
        /// TOML file with `endpoint`, `cache_dir`, `network`, `timeout_secs`.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct ContextArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    r: u32,
    #[arg(long)]
    g: usize,
    /// Coefficients, highest degree first, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    poly: String,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Integral ideals up to this index; defaults to the certified bound.
    #[arg(long)]
    index_bound: Option<u64>,
    /// Omit the timing field so that output is byte-reproducible.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct ConvertArgs {
    /// Characteristic polynomial, highest degree first.
    #[arg(long, allow_hyphen_values = true)]
    poly: String,
    /// Matrix entries, row-major, comma separated.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "ideal")]
    matrix: Option<String>,
    /// Ideal basis rows separated by `;`, entries may be fractions.
    #[arg(long, allow_hyphen_values = true)]
    ideal: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    endpoint: Option<String>,
    cache_dir: Option<PathBuf>,
    network: Option<bool>,
    timeout_secs: Option<u64>,
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    doc: Value,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Refused(_) | Error::CharpolyMismatch | Error::NotAlphaStable | Error::NotPointCountDivisor => 1,
            Error::Internal(_) => 3,
            _ => 2,
        };
        let message = match &e {
            Error::Refused(r) => r.to_string(),
            other => other.to_string(),
        };
        Failure { code, doc: report::error(e.code(), &message) }
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Validate(ctx) => cmd_validate(&ctx),
        Command::Classify { ctx, run, out } => cmd_classify(&ctx, &run, out.as_deref()),
        Command::Convert(args) => cmd_convert(&args),
        Command::Sweep { p, r, g, run, fixtures, out, q_cap } => {
            cmd_sweep(p, r, g, &run, fixtures.as_deref(), out.as_deref(), q_cap)
        }
        Command::Fetch { q, g, endpoint, cache_dir, network, config } => {
            cmd_fetch(q, g, endpoint, cache_dir, network, config.as_deref())
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            print!("{}", report::render(&f.doc));
            if let Some(msg) = f.doc.get("message").and_then(Value::as_str) {
                eprintln!("error: {msg}");
            }
            ExitCode::from(f.code)
        }
    }
}

fn build_context(a: &ContextArgs) -> Result<WeilContext, Error> {
    let coeffs = parse_coefficients(&a.poly)?;
    make_context(a.p, a.r, a.g, &coeffs)
}

fn cmd_validate(a: &ContextArgs) -> CmdResult {
    let ctx = build_context(a)?;
    let mut doc = json!({ "schema_version": report::SCHEMA_VERSION, "context": report::context(&ctx) });
    let flags = report::flags(&ctx);
    for (k, v) in flags.as_object().into_iter().flatten() {
        doc[k] = v.clone();
    }
    doc["weil_violation"] = match check_weil(&ctx.f, &ctx.q) {
        Ok(()) => Value::Null,
        Err(v) => v.code().into(),
    };
    print!("{}", report::render(&doc));
    Ok(if ctx.is_ordinary_simple() { 0 } else { 1 })
}

fn classify_doc(ctx: &WeilContext, run: &RunArgs) -> Result<(Value, bool), Error> {
    let start = Instant::now();
    let rep = classify_isogeny_class(ctx, run.index_bound)?;
    let seconds = (!run.no_timing).then(|| start.elapsed().as_secs_f64());
    let healthy = rep.summary.oracle_agreement && rep.summary.sigma_agreement;
    Ok((report::classification(ctx, &rep, seconds), healthy))
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => ingest::write_atomic(path, text.as_bytes()),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn cmd_classify(a: &ContextArgs, run: &RunArgs, out: Option<&Path>) -> CmdResult {
    let ctx = build_context(a)?;
    let (doc, healthy) = classify_doc(&ctx, run)?;
    write_or_print(out, &report::render(&doc))?;
    if !healthy {
        eprintln!("error: oracle disagreement, see the report");
        return Ok(3);
    }
    Ok(0)
}

fn parse_matrix(s: &str) -> Result<IntMatrix, Error> {
    let entries = parse_coefficients(s)?;
    let n = (1..=entries.len()).find(|n| n * n >= entries.len()).unwrap_or(0);
    if n * n != entries.len() || n == 0 {
        return Err(Error::DimensionMismatch(format!("{} entries do not form a square matrix", entries.len())));
    }
    IntMatrix::new(n, entries)
}

fn parse_ideal(s: &str) -> Result<Vec<Vec<BigRational>>, Error> {
    s.split(';')
        .map(|row| {
            row.split(',')
                .map(|t| {
                    let t = t.trim();
                    let (num, den) = t.split_once('/').unwrap_or((t, "1"));
                    let num: BigInt = num.trim().parse().map_err(|_| Error::Parse(format!("invalid entry {t:?}")))?;
                    let den: BigInt = den.trim().parse().map_err(|_| Error::Parse(format!("invalid entry {t:?}")))?;
                    if den == BigInt::from(0) {
                        return Err(Error::DivisionByZero);
                    }
                    Ok(BigRational::new(num, den))
                })
                .collect()
        })
        .collect()
}

/// Field of `f`, with complex conjugation when `f` is a Weil polynomial.
fn field_for(f: &IntPoly) -> Result<NumberField, Error> {
    let n = f.degree();
    if n.is_multiple_of(2) && n > 0 {
        let c0 = f.coeff(0);
        if c0 > BigInt::from(0) {
            let q = c0.nth_root((n / 2) as u32);
            if cyclav::weil::validate_weil(f, &q) && q.pow((n / 2) as u32) == c0 {
                return NumberField::with_conjugation(f, &q);
            }
        }
    }
    NumberField::new(f)
}

fn cmd_convert(a: &ConvertArgs) -> CmdResult {
    let f = IntPoly::from_descending(&parse_coefficients(&a.poly)?);
    if !f.is_monic() {
        return Err(Error::NotMonic.into());
    }
    let k = field_for(&f)?;
    let doc = match (&a.matrix, &a.ideal) {
        (Some(m), None) => {
            let m = parse_matrix(m)?;
            let ideal = matrix_to_ideal_default(&k, &m)?;
            let back = ideal_to_matrix(&k, &ideal)?;
            let conj = matrices_conjugate(&k, &m, &back.rep)?;
            let (verified, u) = match conj {
                cyclav::Conjugacy::Conjugate(u) => (Value::Bool(true), report::matrix(&u)),
                cyclav::Conjugacy::NotConjugate => (Value::Bool(false), Value::Null),
                cyclav::Conjugacy::Indeterminate => ("indeterminate".into(), Value::Null),
            };
            json!({
                "schema_version": report::SCHEMA_VERSION,
                "f": report::ints(&f.to_descending()),
                "matrix": report::matrix(&m),
                "ideal": report::ideal(&ideal),
                "round_trip": { "matrix": report::matrix(&back.rep), "conjugate": verified, "u": u },
            })
        }
        (None, Some(rows)) => {
            let ideal = IdealLattice::from_rows(&parse_ideal(rows)?)?;
            let mc = ideal_to_matrix(&k, &ideal)?;
            let back = matrix_to_ideal_default(&k, &mc.rep)?;
            let equivalent = match k.ideal_equivalent(&ideal, &back)? {
                Equivalence::Equivalent(_) => Value::Bool(true),
                Equivalence::NotEquivalent => Value::Bool(false),
                Equivalence::Indeterminate(_) => "indeterminate".into(),
            };
            json!({
                "schema_version": report::SCHEMA_VERSION,
                "f": report::ints(&f.to_descending()),
                "ideal": report::ideal(&ideal),
                "matrix": report::matrix(&mc.rep),
                "round_trip": { "ideal": report::ideal(&back), "equivalent": equivalent },
            })
        }
        _ => return Err(Error::InvalidParameter("give exactly one of --matrix and --ideal".into()).into()),
    };
    print!("{}", report::render(&doc));
    Ok(0)
}

fn csv_row(ctx: &WeilContext, doc: Option<&Value>, err: Option<&Error>) -> Vec<String> {
    let f = ctx.f.to_descending().iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
    let field = |k: &str| doc.and_then(|d| d["summary"][k].as_str()).unwrap_or("").to_string();
    vec![
        ctx.q.to_string(),
        f,
        field("classes"),
        field("cyclic"),
        field("not_cyclic"),
        doc.and_then(|d| d["completeness"].as_str()).unwrap_or("").to_string(),
        err.map(|e| e.code().to_string()).unwrap_or_default(),
    ]
}

fn cmd_sweep(
    p: u64,
    r: u32,
    g: usize,
    run: &RunArgs,
    fixtures: Option<&Path>,
    out: Option<&Path>,
    q_cap: u64,
) -> CmdResult {
    let filter = WeilFilter { q_cap, ..WeilFilter::ORDINARY_SIMPLE };
    let contexts = weil::enumerate_weil_contexts(p, r, g, filter)?;
    // order of results follows the enumeration regardless of scheduling
    let results: Vec<Result<(Value, bool), Error>> = contexts.par_iter().map(|c| classify_doc(c, run)).collect();

    let mut wtr = csv::Writer::from_writer(Vec::new());
    let header = ["q", "f", "classes", "cyclic", "not_cyclic", "completeness", "error"];
    wtr.write_record(header).map_err(|e| Error::Io(e.to_string()))?;
    let mut healthy = true;
    let mut failures = 0;
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(Error::from)?;
    }
    for (ctx, res) in contexts.iter().zip(&results) {
        let row = match res {
            Ok((doc, ok)) => {
                healthy &= *ok;
                if let Some(dir) = out {
                    ingest::write_atomic(&dir.join(document_name(ctx)), report::render(doc).as_bytes())?;
                }
                csv_row(ctx, Some(doc), None)
            }
            Err(e) => {
                failures += 1;
                if matches!(e, Error::Internal(_)) {
                    healthy = false;
                }
                eprintln!("error: q={} f={}: {e}", ctx.q, ctx.f);
                csv_row(ctx, None, Some(e))
            }
        };
        wtr.write_record(&row).map_err(|e| Error::Io(e.to_string()))?;
    }
    let csv_bytes = wtr.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    let mut text = String::from_utf8(csv_bytes).map_err(|e| Error::Io(e.to_string()))?;
    if let Some(dir) = out {
        ingest::write_atomic(&dir.join("summary.csv"), text.as_bytes())?;
    }
    if let Some(path) = fixtures {
        let fx = ingest::load_fixture(path)?;
        let report = ingest::cross_validate(&fx.records);
        text.push_str("\n# cross-validation\n");
        for line in report.to_text().lines() {
            text.push_str("# ");
            text.push_str(line);
            text.push('\n');
        }
        for rej in &fx.rejected {
            text.push_str(&format!("# rejected line {}: {}\n", rej.line, rej.reason));
        }
        if let Some(dir) = out {
            ingest::write_atomic(&dir.join("cross_validation.json"), report::render(&report::validation(&report)).as_bytes())?;
        }
    }
    write_or_print(None, &text)?;
    if !healthy {
        return Ok(3);
    }
    Ok(if failures > 0 { 1 } else { 0 })
}

fn document_name(ctx: &WeilContext) -> String {
    let f = ctx.f.to_descending().iter().map(ToString::to_string).collect::<Vec<_>>().join("_");
    format!("q{}_g{}_{}.json", ctx.q, ctx.g, f)
}

fn cmd_fetch(
    q: u64,
    g: usize,
    endpoint: Option<String>,
    cache_dir: Option<PathBuf>,
    network: bool,
    config: Option<&Path>,
) -> CmdResult {
    let file: FileConfig = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            toml::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };
    let cfg = FetchConfig {
        network_enabled: network || file.network.unwrap_or(false),
        endpoint: endpoint.or(file.endpoint),
        cache_dir: cache_dir.or(file.cache_dir),
        timeout_secs: file.timeout_secs,
    }
    .with_env();
    let records = ingest::fetch_remote(q, g, &cfg)?;
    print!("{}", ingest::render_fixture(&records));
    Ok(0)
}
