//! Argument handling for the `shimura-local` binary. `run` is the whole
//! program minus process exit, so tests can drive it in-process.

use std::io::Write;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};
use shimura_local::classpoly::{hilbert_classpoly, roots_mod};
use shimura_local::json::{emit, parse, Document};
use shimura_local::local::{
    decide_place, everywhere_local, replay, verify_witnesses, GlobalReport, Place, PlaceVerdict, TwistSpec, CLAUSES,
};
use shimura_local::scan::{find_family, load_families, scan};
use shimura_local::trace::Curve;
use shimura_local::{cache, Error};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_ENGINE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "shimura-local", version, about = "Local points on Atkin-Lehner twists of Shimura curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide local solubility at one place or everywhere.
    Decide(DecideArgs),
    /// Count F_p-points of X^D_0(N), or of its twist by w_m.
    Count(CountArgs),
    /// Trace of the Hecke operator T_n on weight-2 cusp forms.
    Trace(TraceArgs),
    /// Hilbert class polynomial, or its factorization pattern mod p.
    Classpoly(ClasspolyArgs),
    /// Primes passing a family's congruences, each with its global report.
    Scan(ScanArgs),
    /// Re-check a JSON report: replay each certificate and recompute its witnesses.
    Check(CheckArgs),
    /// List every certificate clause id.
    Clauses,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
struct CurveArgs {
    /// Quaternion discriminant: squarefree, even number of prime factors.
    #[arg(long = "D")]
    big_d: u64,
    /// Level: squarefree, coprime to D.
    #[arg(long = "N")]
    big_n: u64,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("where").required(true).args(["p", "all"])))]
struct DecideArgs {
    #[command(flatten)]
    curve: CurveArgs,
    /// Squarefree d, not 0 or 1: the twisting field is Q(sqrt d).
    #[arg(long = "d", allow_hyphen_values = true)]
    d: i64,
    /// Atkin-Lehner index, a positive divisor of DN.
    #[arg(long = "m")]
    m: u64,
    /// A single prime, or "real".
    #[arg(long = "p")]
    p: Option<String>,
    /// Every place, with an overall verdict.
    #[arg(long)]
    all: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args, Debug)]
struct CountArgs {
    #[command(flatten)]
    curve: CurveArgs,
    #[arg(long = "p")]
    p: u64,
    #[arg(long = "m")]
    m: Option<u64>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args, Debug)]
struct TraceArgs {
    #[command(flatten)]
    curve: CurveArgs,
    #[arg(long = "n")]
    n: u64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args, Debug)]
struct ClasspolyArgs {
    /// A negative discriminant.
    #[arg(long, allow_hyphen_values = true)]
    disc: i64,
    #[arg(long = "mod")]
    modulus: Option<u64>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    pmax: u64,
    /// A TOML family file to use instead of the built-in one.
    #[arg(long)]
    families: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// A document written by `decide --format json`.
    report: PathBuf,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) | Error::OutOfRange(..) => EXIT_USAGE,
        _ => EXIT_ENGINE,
    }
}

/// Integers above 2^53 in magnitude become decimal strings.
fn big_json(v: &BigInt) -> Value {
    let limit = BigInt::from(1u64 << 53);
    if v.magnitude() <= limit.magnitude() {
        json!(i64::try_from(v).expect("fits"))
    } else {
        json!(v.to_string())
    }
}

fn json_line(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn verdict_line(v: &PlaceVerdict) -> String {
    let mut line = format!("{:<8} {:<9} {}", v.place.to_string(), v.status.as_str(), v.certificate.clause);
    for (k, w) in &v.certificate.witnesses {
        line.push_str(&format!("  {k}={w}"));
    }
    line
}

fn report_text(r: &GlobalReport) -> String {
    let mut s = format!("{}: {}", r.spec, r.overall.name());
    if let shimura_local::local::Overall::FailsAt(ps) = &r.overall {
        let ps: Vec<String> = ps.iter().map(Place::to_string).collect();
        s.push_str(&format!(" [{}]", ps.join(", ")));
    }
    s.push('\n');
    for v in &r.verdicts {
        s.push_str("  ");
        s.push_str(&verdict_line(v));
        s.push('\n');
    }
    s
}

fn decide(a: &DecideArgs) -> Result<String, Error> {
    let spec = TwistSpec::new(a.curve.big_d, a.curve.big_n, a.d, a.m)?;
    if a.all {
        let r = everywhere_local(&spec)?;
        return Ok(match a.format {
            Format::Text => report_text(&r),
            Format::Json => emit(&Document::from(&r)),
        });
    }
    let place: Place = a.p.as_deref().unwrap_or_default().parse()?;
    if matches!(place, Place::Rest { .. }) {
        return Err(Error::InvalidInput("--p takes a prime or \"real\"".into()));
    }
    let v = decide_place(&spec, place)?;
    Ok(match a.format {
        Format::Text => {
            let mut line = format!("{spec} at {}: {} [{}]", v.place, v.status.as_str(), v.certificate.clause);
            for (k, w) in &v.certificate.witnesses {
                line.push_str(&format!("  {k}={w}"));
            }
            line + "\n"
        }
        Format::Json => emit(&Document::single(spec, vec![v])),
    })
}

fn count(a: &CountArgs) -> Result<String, Error> {
    let c = Curve::new(a.curve.big_d, a.curve.big_n)?;
    let (what, value) = match a.m {
        None => ("X", c.count_x(a.p)?),
        Some(m) => ("twist", c.count_twist(m, a.p)?),
    };
    Ok(match a.format {
        Format::Text => match a.m {
            None => format!("#X^{}_0({})(F_{}) = {value}\n", c.d(), c.n(), a.p),
            Some(m) => format!("#C^{}({}, d, {m})(F_{}) = {value}  (p inert in Q(sqrt d))\n", c.d(), c.n(), a.p),
        },
        Format::Json => json_line(&json!({
            "D": c.d(), "N": c.n(), "p": a.p, "m": a.m.unwrap_or(1), "of": what, "count": value,
        })),
    })
}

fn trace(a: &TraceArgs) -> Result<String, Error> {
    let c = Curve::new(a.curve.big_d, a.curve.big_n)?;
    let t = c.trace_hecke(a.n)?;
    Ok(match a.format {
        Format::Text => format!("tr T_{} on X^{}_0({}) = {t}\n", a.n, c.d(), c.n()),
        Format::Json => json_line(&json!({ "D": c.d(), "N": c.n(), "n": a.n, "trace": t, "genus": c.genus() })),
    })
}

fn classpoly(a: &ClasspolyArgs) -> Result<String, Error> {
    match a.modulus {
        None => {
            let h = hilbert_classpoly(a.disc)?;
            Ok(match a.format {
                Format::Text => format!("{h}\n"),
                Format::Json => json_line(&json!({
                    "disc": a.disc,
                    "coeffs": h.coeffs().iter().map(big_json).collect::<Vec<_>>(),
                })),
            })
        }
        Some(p) => {
            let r = roots_mod(a.disc, p)?;
            Ok(match a.format {
                Format::Text => format!("{r}\n"),
                Format::Json => json_line(&json!({
                    "disc": a.disc,
                    "p": p,
                    "factors": r.to_string(),
                    "roots": r.roots.iter().map(|&(x, k)| json!({ "root": x, "multiplicity": k })).collect::<Vec<_>>(),
                })),
            })
        }
    }
}

fn scan_cmd(a: &ScanArgs) -> Result<String, Error> {
    let family = match &a.families {
        Some(path) => load_families(path)?
            .into_iter()
            .find(|f| f.name == a.family)
            .ok_or_else(|| Error::InvalidInput(format!("no family {:?} in {}", a.family, path.display())))?,
        None => find_family(&a.family)?,
    };
    let hits = scan(&family, a.pmax)?;
    Ok(match a.format {
        Format::Text => hits.iter().map(|h| format!("{}\t{}\n", h.p, h.report.overall.name())).collect(),
        Format::Json => json_line(&json!({
            "family": family.name,
            "q": family.q,
            "pmax": a.pmax,
            "hits": hits.iter().map(|h| json!({ "p": h.p, "overall": h.report.overall.name() })).collect::<Vec<_>>(),
        })),
    })
}

fn check(a: &CheckArgs) -> Result<String, Error> {
    let text = std::fs::read_to_string(&a.report)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", a.report.display())))?;
    let doc = parse(&text)?;
    for v in &doc.verdicts {
        replay(&doc.spec, v)?;
        verify_witnesses(v)?;
    }
    Ok(format!("{}: {} certificate(s) replayed and verified\n", doc.spec, doc.verdicts.len()))
}

fn clauses() -> String {
    CLAUSES.iter().map(|(id, what)| format!("{id:<24} {what}\n")).collect()
}

/// Parse `argv` (program name first), run, write to `out` / `err`, return the exit code.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let cache_dir = cache::dir_from_env();
    if let Some(dir) = &cache_dir {
        if let Err(e) = cache::load(dir) {
            let _ = writeln!(err, "warning: ignoring cache: {e}");
        }
    }
    let result = match &cli.command {
        Command::Decide(a) => decide(a),
        Command::Count(a) => count(a),
        Command::Trace(a) => trace(a),
        Command::Classpoly(a) => classpoly(a),
        Command::Scan(a) => scan_cmd(a),
        Command::Check(a) => check(a),
        Command::Clauses => Ok(clauses()),
    };
    if let Some(dir) = &cache_dir {
        if let Err(e) = cache::save(dir) {
            let _ = writeln!(err, "warning: cache not saved: {e}");
        }
    }
    match result {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
