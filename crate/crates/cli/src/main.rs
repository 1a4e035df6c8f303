//! `chansup`: validate channels, measure their superposition, emit bases,
//! run protocol scenarios and classify bipartite channels.
//!
//! Exit codes: 0 success, 2 semantic negative, 64 usage or parse error,
//! 65 data mismatch.

mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chansup::bases::{non_unitary_basis, schwinger_basis, BasisKind, BasisSet};
use chansup::bipartite::{classify, correlation_witness, gamma_state};
use chansup::channels::{kraus_choi, to_choi, validate_choi, validate_kraus, ChoiMatrix};
use chansup::io::{basis_from_json, basis_to_json, channel_input_from_json, choi_from_json, parse_json, LoadError};
use chansup::random::rng;
use chansup::scenario::{format_state, run_scenario, Scalar, ScenarioError};
use chansup::superposition::{
    choi_coefficients, is_superposition_free_tol, measure_l1, measure_rel_entropy_tol, random_free_search,
};
use chansup::{Error, Tolerances};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;
use sha2::{Digest, Sha256};

use report::{Report, Val};

const EXIT_NEGATIVE: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;

#[derive(Parser, Debug)]
#[command(name = "chansup", version, about = "Superposition between quantum evolutions")]
struct Cli {
    /// Emit a JSON report instead of key=value lines.
    #[arg(long, global = true)]
    json: bool,
    /// Positivity tolerance.
    #[arg(long, global = true, default_value_t = Tolerances::DEFAULT.psd)]
    tol_psd: f64,
    /// Off-diagonal tolerance of the free set.
    #[arg(long, global = true, default_value_t = Tolerances::DEFAULT.free)]
    tol_free: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check complete positivity and trace conditions of a channel or Choi file.
    Validate { path: PathBuf },
    /// Superposition measures of a channel relative to a reference basis.
    Measure {
        path: PathBuf,
        /// nonunitary, schwinger or file:PATH
        #[arg(long, default_value = "schwinger", value_parser = parse_basis)]
        basis: BasisChoice,
        #[arg(long, value_enum, default_value_t = MeasureChoice::Both)]
        measure: MeasureChoice,
        /// Also search N random free Choi matrices (seeded by CHANSUP_SEED).
        #[arg(long)]
        search: Option<usize>,
    },
    /// Generate a reference basis and print its Gram residual.
    Bases {
        #[arg(long, value_parser = parse_kind)]
        kind: BasisKind,
        #[arg(long)]
        dim: usize,
        /// Write the basis file here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a protocol scenario file, or every *.json file in a directory.
    Demo { path: PathBuf },
    /// Classify a bipartite channel file (needs "dims").
    Classify {
        path: PathBuf,
        #[arg(long, default_value = "schwinger", value_parser = parse_basis)]
        basis: BasisChoice,
    },
}

#[derive(Debug, Clone)]
enum BasisChoice {
    Kind(BasisKind),
    File(PathBuf),
}

impl BasisChoice {
    fn label(&self) -> String {
        match self {
            BasisChoice::Kind(k) => k.name().to_string(),
            BasisChoice::File(p) => format!("file:{}", p.display()),
        }
    }
}

fn parse_kind(s: &str) -> Result<BasisKind, String> {
    match BasisKind::parse(s) {
        Some(k) if k != BasisKind::Custom => Ok(k),
        _ => Err(format!("unknown basis kind {s:?} (expected nonunitary or schwinger)")),
    }
}

fn parse_basis(s: &str) -> Result<BasisChoice, String> {
    match s.strip_prefix("file:") {
        Some(p) if !p.is_empty() => Ok(BasisChoice::File(PathBuf::from(p))),
        Some(_) => Err("file: needs a path".into()),
        None => parse_kind(s).map(BasisChoice::Kind),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MeasureChoice {
    L1,
    Relent,
    Both,
}

impl MeasureChoice {
    fn name(self) -> &'static str {
        match self {
            MeasureChoice::L1 => "l1",
            MeasureChoice::Relent => "relent",
            MeasureChoice::Both => "both",
        }
    }
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn data(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_DATA,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ZeroProbability { .. } => EXIT_NEGATIVE,
            _ => EXIT_DATA,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Data(e) => e.into(),
            other => Failure::usage(other.to_string()),
        }
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Load(l) => l.into(),
            other => Failure::usage(other.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

struct Ctx {
    tol: Tolerances,
}

/// Reads a file, echoes its path and digest, and parses it as JSON.
fn load(path: &Path, r: &mut Report) -> Result<Value, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    r.echo("input", path.display().to_string());
    r.echo("input_sha256", format!("{:x}", Sha256::digest(&bytes)));
    let text = String::from_utf8(bytes).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    parse_json(&text).map_err(|e| match e {
        LoadError::Syntax { .. } => Failure::usage(format!("{}: {e}", path.display())),
        other => other.into(),
    })
}

fn echo_tolerances(r: &mut Report, tol: &Tolerances) {
    r.echo("tol_psd", Val::Sci(tol.psd));
    r.echo("tol_free", Val::Sci(tol.free));
}

fn canonical_basis(kind: BasisKind, d: usize) -> chansup::Result<BasisSet> {
    match kind {
        BasisKind::NonUnitary => non_unitary_basis(d),
        _ => schwinger_basis(d),
    }
}

fn resolve_basis(choice: &BasisChoice, d: usize) -> Result<BasisSet, Failure> {
    match choice {
        BasisChoice::Kind(k) => Ok(canonical_basis(*k, d)?),
        BasisChoice::File(p) => {
            let text = fs::read_to_string(p).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?;
            let b = basis_from_json(parse_json(&text)?)?;
            if b.dim() != d {
                return Err(Failure::data(format!(
                    "basis {} has dim {}, input has dim {d}",
                    p.display(),
                    b.dim()
                )));
            }
            Ok(b)
        }
    }
}

fn joined(xs: &[f64]) -> String {
    xs.iter().map(|x| chansup::scenario::fixed(*x)).collect::<Vec<_>>().join(",")
}

fn cmd_validate(ctx: &Ctx, path: &Path, r: &mut Report) -> Outcome {
    echo_tolerances(r, &ctx.tol);
    let v = load(path, r)?;
    let rep = if v.get("choi").is_some() {
        validate_choi(&choi_from_json(v)?, &ctx.tol)?
    } else {
        let input = channel_input_from_json(v)?;
        match validate_kraus(&input.kraus, &ctx.tol) {
            Ok(rep) => rep,
            // Σ E†E > I: still report the flags from the Choi matrix
            Err(Error::InvalidChannel(_)) => validate_choi(&kraus_choi(&input.kraus)?, &ctx.tol)?,
            Err(e) => return Err(e.into()),
        }
    };
    r.row(vec![("cp", rep.cp.into()), ("tp", rep.tp.into()), ("tni", rep.tni.into())]);
    r.row(vec![
        ("defect_norm", rep.defect_norm.into()),
        ("defect_min_eig", rep.defect_min_eig.into()),
        ("choi_min_eig", rep.choi_min_eig.into()),
    ]);
    if !(rep.cp && rep.tni) {
        r.status = EXIT_NEGATIVE;
    }
    Ok(())
}

fn load_choi(v: Value) -> Result<ChoiMatrix, Failure> {
    if v.get("choi").is_some() {
        Ok(choi_from_json(v)?)
    } else {
        Ok(to_choi(&channel_input_from_json(v)?.channel()?))
    }
}

fn seed_from_env() -> Result<u64, Failure> {
    match std::env::var("CHANSUP_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("CHANSUP_SEED={s:?} is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn cmd_measure(
    ctx: &Ctx,
    path: &Path,
    basis: &BasisChoice,
    which: MeasureChoice,
    search: Option<usize>,
    r: &mut Report,
) -> Outcome {
    r.echo("basis", basis.label());
    r.echo("measure", which.name());
    echo_tolerances(r, &ctx.tol);
    let seed = match search {
        Some(n) => {
            let seed = seed_from_env()?;
            r.echo("search", n);
            r.echo("seed", Val::Int(seed as i64));
            Some((n, seed))
        }
        None => None,
    };
    let c = load_choi(load(path, r)?)?;
    let b = resolve_basis(basis, c.dim())?;
    r.row(vec![("dim", c.dim().into()), ("trace", c.trace().into())]);
    let free = is_superposition_free_tol(&c, &b, ctx.tol.free)?.is_some();
    r.line("free", free);
    if matches!(which, MeasureChoice::L1 | MeasureChoice::Both) {
        r.line("l1", measure_l1(&c, &b)?.value);
    }
    if matches!(which, MeasureChoice::Relent | MeasureChoice::Both) {
        r.line("relent", measure_rel_entropy_tol(&c, &b, &ctx.tol)?.value);
    }
    let coeffs = choi_coefficients(&c, &b)?;
    let weights: Vec<f64> = (0..b.len()).map(|i| coeffs[(i, i)].re).collect();
    r.line("weights", joined(&weights));
    if let Some((n, seed)) = seed {
        let best = random_free_search(&mut rng(seed), &c, &b, n, c.trace())?;
        r.line("search_min_relent", best);
    }
    Ok(())
}

fn cmd_bases(kind: BasisKind, dim: usize, out: Option<&Path>, r: &mut Report) -> Outcome {
    r.echo("kind", kind.name());
    r.echo("dim", dim);
    let b = canonical_basis(kind, dim).map_err(|e| Failure::usage(e.to_string()))?;
    r.row(vec![("count", b.len().into()), ("gram_residual", b.gram_residual().into())]);
    if let Some(p) = out {
        let text = serde_json::to_string_pretty(&basis_to_json(&b)).expect("serializable");
        fs::write(p, text + "\n").map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?;
        r.line("output", p.display().to_string());
    }
    Ok(())
}

fn cmd_demo_file(path: &Path, r: &mut Report) -> Outcome {
    let doc = load(path, r)?;
    if let Some(p) = doc.get("protocol").and_then(Value::as_str) {
        r.echo("protocol", p);
    }
    let rep = run_scenario(doc)?;
    for (i, b) in rep.branches.iter().enumerate() {
        r.row(vec![
            ("branch", i.into()),
            ("label", b.label.as_str().into()),
            ("probability", b.probability.into()),
            ("post", format_state(&b.post_state).into()),
        ]);
    }
    for (k, v) in rep.summary {
        let v = match v {
            Scalar::Real(x) => Val::Real(x),
            Scalar::Bool(b) => Val::Bool(b),
            Scalar::Text(s) => Val::Str(s),
        };
        r.line(&k, v);
    }
    Ok(())
}

fn demo_inputs(path: &Path) -> Result<Vec<PathBuf>, Failure> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let entries = fs::read_dir(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Failure::usage(format!("{}: no *.json scenario files", path.display())));
    }
    Ok(files)
}

fn cmd_classify(path: &Path, basis: &BasisChoice, r: &mut Report) -> Outcome {
    r.echo("basis", basis.label());
    let input = channel_input_from_json(load(path, r)?)?;
    let ch = input.bipartite()?;
    let (da, db) = ch.dims();
    let (ba, bb) = (resolve_basis(basis, da)?, resolve_basis(basis, db)?);
    let class = classify(&ch, &ba, &bb)?;
    r.echo("dims", format!("{da}x{db}"));
    let gamma = if da * db <= 4 { Some(gamma_state(&ch)?) } else { None };
    match gamma {
        Some(g) => {
            let w = correlation_witness(&g, da * da, db * db)?;
            r.row(vec![("class", class.label.name().into()), ("negativity", w.negativity.into())]);
            let mut row = vec![
                ("product", w.product.into()),
                ("ppt", w.ppt.into()),
                ("classical_diag", w.classical_diag.into()),
                ("product_residual", w.product_residual.into()),
            ];
            if let Some(s) = w.pure_entropy {
                row.push(("pure_entropy", s.into()));
            }
            r.row(row);
        }
        None => r.line("class", class.label.name()),
    }
    for d in &class.diagnostics {
        let row = d
            .split_whitespace()
            .map(|tok| match tok.split_once('=') {
                Some((k, v)) => (k.to_string(), Val::Str(v.to_string())),
                None => ("note".to_string(), Val::Str(tok.to_string())),
            })
            .collect();
        r.push_row(row);
    }
    Ok(())
}

fn finish(mut r: Report, out: Outcome) -> Report {
    if let Err(f) = out {
        eprintln!("chansup: {}", f.message);
        r.fail(f.code, f.message);
    }
    r
}

fn run(cli: Cli) -> (Vec<Report>, bool) {
    let ctx = Ctx {
        tol: Tolerances {
            psd: cli.tol_psd,
            free: cli.tol_free,
            ..Tolerances::DEFAULT
        },
    };
    let reports = match &cli.command {
        Command::Validate { path } => {
            let mut r = Report::new("validate");
            let out = cmd_validate(&ctx, path, &mut r);
            vec![finish(r, out)]
        }
        Command::Measure {
            path,
            basis,
            measure,
            search,
        } => {
            let mut r = Report::new("measure");
            let out = cmd_measure(&ctx, path, basis, *measure, *search, &mut r);
            vec![finish(r, out)]
        }
        Command::Bases { kind, dim, out } => {
            let mut r = Report::new("bases");
            let res = cmd_bases(*kind, *dim, out.as_deref(), &mut r);
            vec![finish(r, res)]
        }
        Command::Demo { path } => match demo_inputs(path) {
            Ok(files) => files
                .iter()
                .map(|f| {
                    let mut r = Report::new("demo");
                    let out = cmd_demo_file(f, &mut r);
                    finish(r, out)
                })
                .collect(),
            Err(f) => vec![finish(Report::new("demo"), Err(f))],
        },
        Command::Classify { path, basis } => {
            let mut r = Report::new("classify");
            let out = cmd_classify(path, basis, &mut r);
            vec![finish(r, out)]
        }
    };
    let many = matches!(&cli.command, Command::Demo { path } if path.is_dir());
    (reports, many)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let json = cli.json;
    let (reports, many) = run(cli);
    if json {
        let v = if many {
            Value::Array(reports.iter().map(|r| r.to_json()).collect())
        } else {
            reports[0].to_json()
        };
        println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
    } else {
        let texts: Vec<String> = reports.iter().map(|r| r.to_text()).collect();
        print!("{}", texts.join("\n"));
    }
    let status = reports.iter().map(|r| r.status).max().unwrap_or(0);
    ExitCode::from(status)
}
