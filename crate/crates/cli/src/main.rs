mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pir_array_codes::bounds::{
    self, catalog_for_s, catalog_for_td, compare_with_prior, modified_rate, ub_asymptotic,
    ub_large_s, ub_small_s, ServerCounts,
};
use pir_array_codes::constructions::{
    be_server_counts, construct_be, construct_modified, construct_small_s, intro_example,
    modified_server_counts, small_s_params, BuildOptions, DEFAULT_MAX_COLUMNS,
};
use pir_array_codes::format::{deserialize, serialize};
use pir_array_codes::rational::{ratio, Rational};
use pir_array_codes::verifier::{max_k, verify_witness, DEFAULT_BRUTE_FORCE_CAP};
use pir_array_codes::{ArrayCode, Error, PrimeField, Witness};
use serde_json::json;

use render::{decimal, exact, Table};

const EXIT_VALIDATION: u8 = 1;
const EXIT_VERIFICATION: u8 = 2;
const EXIT_DRY_RUN: u8 = 3;

/// Built-in code name accepted by `verify` in place of a path.
const INTRO_NAME: &str = "intro-example";

#[derive(Parser)]
#[command(name = "pir", version, about = "Construct and check PIR array codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code with its witness and report its size and rate.
    Construct(ConstructArgs),
    /// Check a code file's witness, or compute k exactly by exhaustive search.
    Verify(VerifyArgs),
    /// Tabulate rate bounds and construction rates.
    Bounds(BoundsArgs),
    /// Compare the modified construction with earlier constructions.
    Compare(CompareArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    SmallS,
    Be,
    Modified,
    IntroExample,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Mode {
    Witness,
    Brute,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Table,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Grid {
    SmallS,
    LargeS,
}

#[derive(Args)]
struct ConstructArgs {
    kind: Kind,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    /// Prime field modulus.
    #[arg(long, default_value_t = 2)]
    q: u32,
    /// Where to write the code and witness.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Refuse to build codes with more columns than this.
    #[arg(long, env = "PIR_MAX_COLUMNS", default_value_t = DEFAULT_MAX_COLUMNS)]
    max_columns: u64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Code file, or `intro-example` for the built-in example.
    input: String,
    #[arg(long, value_enum, default_value_t = Mode::Witness)]
    mode: Mode,
    /// Largest number of columns the exhaustive search accepts.
    #[arg(long, default_value_t = DEFAULT_BRUTE_FORCE_CAP)]
    cap: usize,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, conflicts_with_all = ["t", "d", "grid"])]
    s: Option<u64>,
    #[arg(long, requires = "d", conflicts_with = "grid")]
    t: Option<u64>,
    #[arg(long, requires = "t")]
    d: Option<u64>,
    #[arg(long, value_enum)]
    grid: Option<Grid>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    s: u64,
    #[arg(long)]
    t: u64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

/// Failure of a command, mapped to an exit code.
enum Failure {
    Validation(String),
    Verification(String),
    DryRun(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Validation(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Construct(a) => cmd_construct(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Bounds(a) => cmd_bounds(&a),
        Command::Compare(a) => cmd_compare(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(EXIT_VERIFICATION)
        }
        Err(Failure::DryRun(msg)) => {
            println!("{msg}");
            ExitCode::from(EXIT_DRY_RUN)
        }
    }
}

fn need(value: Option<usize>, flag: &str, kind: &str) -> Result<usize, Failure> {
    value.ok_or_else(|| Failure::Validation(format!("{kind} needs --{flag}")))
}

/// Closed-form `(m, k, rate)` of a construction, for the dry-run summary.
fn planned(kind: Kind, a: &ConstructArgs) -> Result<(String, Rational, Rational), Error> {
    let counts = |c: ServerCounts| (c.m().to_string(), c.k(), c.rate());
    Ok(match kind {
        Kind::SmallS => {
            let sp = small_s_params(a.t.unwrap_or(0), a.d.unwrap_or(0))?;
            (
                sp.m.to_string(),
                ratio(sp.k as u64, 1),
                ratio(sp.k as u64, sp.m as u64),
            )
        }
        Kind::Be => counts(be_server_counts(a.s.unwrap_or(0), a.t.unwrap_or(0))?),
        Kind::Modified => counts(modified_server_counts(a.s.unwrap_or(0), a.t.unwrap_or(0))?),
        Kind::IntroExample => ("6".into(), ratio(4, 1), ratio(2, 3)),
    })
}

fn cmd_construct(a: &ConstructArgs) -> CmdResult {
    let field = PrimeField::new(a.q)?;
    let opts = BuildOptions::default()
        .with_field(field)
        .with_max_columns(a.max_columns);
    let built = match a.kind {
        Kind::SmallS => construct_small_s(
            need(a.t, "t", "small-s")?,
            need(a.d, "d", "small-s")?,
            &opts,
        ),
        Kind::Be => construct_be(need(a.s, "s", "be")?, need(a.t, "t", "be")?, &opts),
        Kind::Modified => construct_modified(
            need(a.s, "s", "modified")?,
            need(a.t, "t", "modified")?,
            &opts,
        ),
        Kind::IntroExample => {
            if a.q != 2 {
                return Err(Failure::Validation(
                    "the intro example is defined over GF(2)".into(),
                ));
            }
            Ok(intro_example())
        }
    };
    let (code, witness) = match built {
        Ok(pair) => pair,
        Err(Error::SizeGuard { required, limit }) => {
            let (m, k, rate) = planned(a.kind, a)?;
            return Err(Failure::DryRun(format!(
                "dry run: construction needs {required} columns, above the limit of {limit}\n\
                 planned m = {m}\nplanned k = {}\nplanned rate = {} ~ {}\n\
                 raise --max-columns or PIR_MAX_COLUMNS to build it",
                exact(&k),
                exact(&rate),
                decimal(&rate)
            )));
        }
        Err(e) => return Err(e.into()),
    };

    let report = verify_witness(&code, &witness);
    if !report.is_valid() {
        return Err(Failure::Verification(format!(
            "constructed witness has {} failures",
            report.failures.len()
        )));
    }
    if let Some(path) = &a.out {
        fs::write(path, serialize(&code, Some(&witness)))
            .map_err(|e| Failure::Validation(format!("cannot write {}: {e}", path.display())))?;
    }

    let rate = ratio(report.k as u64, code.m() as u64);
    println!(
        "t = {}, p = {}, q = {}",
        code.t(),
        code.p(),
        code.field().modulus()
    );
    println!("m = {}", code.m());
    println!("k = {}", report.k);
    println!("rate = {} ~ {}", exact(&rate), decimal(&rate));
    for (name, bound) in applicable_bounds(&code)? {
        let relation = if rate == bound { "tight" } else { "rate below" };
        println!(
            "bound ({name}) = {} ~ {} ({relation})",
            exact(&bound),
            decimal(&bound)
        );
    }
    if let Some(path) = &a.out {
        println!("wrote {}", path.display());
    }
    Ok(())
}

/// The upper bounds that apply to a code with its `t` and `p`.
fn applicable_bounds(code: &ArrayCode) -> Result<Vec<(&'static str, Rational)>, Error> {
    let (t, p) = (code.t() as u64, code.p() as u64);
    let mut out = Vec::new();
    if t >= 2 && p > t {
        let d = p - t;
        if d > t {
            out.push(("large-s", ub_large_s(t, d)?));
        } else {
            out.push(("small-s", ub_small_s(t, d)?));
        }
    }
    if p > t {
        out.push(("asymptotic", ub_asymptotic(&code.storage_ratio())?));
    }
    Ok(out)
}

fn load(input: &str) -> Result<(ArrayCode, Option<Witness>), Failure> {
    if input == INTRO_NAME && !Path::new(input).exists() {
        let (code, witness) = intro_example();
        return Ok((code, Some(witness)));
    }
    let text = fs::read_to_string(input)
        .map_err(|e| Failure::Validation(format!("cannot read {input}: {e}")))?;
    Ok(deserialize(&text)?)
}

fn cmd_verify(a: &VerifyArgs) -> CmdResult {
    let (code, witness) = load(&a.input)?;
    match a.mode {
        Mode::Witness => {
            let witness =
                witness.ok_or_else(|| Failure::Validation("the file has no witness".into()))?;
            let report = verify_witness(&code, &witness);
            if a.format == Format::Json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("report serializes")
                );
            } else {
                println!("m = {}, p = {}, t = {}", code.m(), code.p(), code.t());
                println!("k = {}", report.k);
                let rate = ratio(report.k as u64, code.m() as u64);
                println!("rate = {} ~ {}", exact(&rate), decimal(&rate));
                let lo = report.per_item.iter().min().copied().unwrap_or(0);
                let hi = report.per_item.iter().max().copied().unwrap_or(0);
                println!("per-item k: min {lo}, max {hi}");
                for f in &report.failures {
                    println!(
                        "failure: item {} subset {} {:?}: {:?}",
                        f.item,
                        f.subset_index.map_or("-".to_string(), |i| i.to_string()),
                        f.subset,
                        f.reason
                    );
                }
                println!("failures = {}", report.failures.len());
            }
            if report.is_valid() {
                Ok(())
            } else {
                Err(Failure::Verification(format!(
                    "{} witness failures",
                    report.failures.len()
                )))
            }
        }
        Mode::Brute => {
            let declared = witness.map_or(0, |w| verify_witness(&code, &w).k);
            let k = max_k(&code, a.cap)?;
            if a.format == Format::Json {
                println!(
                    "{}",
                    json!({ "m": code.m(), "p": code.p(), "k": k, "declared_k": declared })
                );
            } else {
                println!("m = {}, p = {}, t = {}", code.m(), code.p(), code.t());
                println!("k = {k} (exhaustive)");
                println!("declared k = {declared}");
            }
            if k >= declared {
                Ok(())
            } else {
                Err(Failure::Verification(format!(
                    "exhaustive k = {k} is below declared k = {declared}"
                )))
            }
        }
    }
}

fn cmd_bounds(a: &BoundsArgs) -> CmdResult {
    if let Some(grid) = a.grid {
        let table = match grid {
            Grid::SmallS => small_s_grid()?,
            Grid::LargeS => large_s_grid()?,
        };
        return emit(&table, a.format);
    }
    let rows = match (a.s, a.t, a.d) {
        (Some(s), _, _) => catalog_for_s(s)?,
        (None, Some(t), Some(d)) => catalog_for_td(t, d)?,
        _ => {
            return Err(Failure::Validation(
                "give --s, or --t and --d, or --grid".into(),
            ))
        }
    };
    let mut table = Table::new(&["kind", "source", "params", "value", "decimal"]);
    for row in &rows {
        let kind = match row.kind {
            bounds::BoundKind::Upper => "upper",
            bounds::BoundKind::Lower => "lower",
        };
        table.push(vec![
            kind.into(),
            row.source.clone(),
            row.params.clone(),
            exact(&row.value),
            decimal(&row.value),
        ]);
    }
    emit(&table, a.format)
}

fn small_s_grid() -> Result<Table, Failure> {
    let mut table = Table::new(&["t", "d", "upper", "construction", "tight"]);
    for d in 1..=5u64 {
        for t in d.max(2)..=30 {
            let bound = ub_small_s(t, d)?;
            let (rate, tight) = match small_s_params(t as usize, d as usize) {
                Ok(sp) => {
                    let r = ratio(sp.k as u64, sp.m as u64);
                    let mark = if r == bound { "=" } else { "<" };
                    (exact(&r), mark.to_string())
                }
                Err(_) => ("-".into(), "-".into()),
            };
            table.push(vec![
                t.to_string(),
                d.to_string(),
                exact(&bound),
                rate,
                tight,
            ]);
        }
    }
    Ok(table)
}

fn large_s_grid() -> Result<Table, Failure> {
    let mut table = Table::new(&["t", "d", "large-s", "small-s", "improves", "modified"]);
    for p in 5..=30u64 {
        for t in 2..p {
            let d = p - t;
            if d <= t {
                continue;
            }
            let large = ub_large_s(t, d)?;
            let small = ub_small_s(t, d)?;
            let modified = ServerCounts::modified(p as usize, t as usize)?.rate();
            table.push(vec![
                t.to_string(),
                d.to_string(),
                exact(&large),
                exact(&small),
                if large < small { "<" } else { ">=" }.into(),
                exact(&modified),
            ]);
        }
    }
    Ok(table)
}

fn emit(table: &Table, format: Format) -> CmdResult {
    match format {
        Format::Table => print!("{}", table.render()),
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&table.to_json()).expect("json")
        ),
    }
    Ok(())
}

fn cmd_compare(a: &CompareArgs) -> CmdResult {
    let report = compare_with_prior(a.s, a.t)?;
    let modified = modified_rate(a.s, a.t)?;
    let strict = report.all_strict();
    let mut table = Table::new(&["check", "ours", "other", "margin", "strict"]);
    let mut push = |name: String, ours: &Rational, other: &Rational, holds: bool| {
        table.push(vec![
            name,
            exact(ours),
            exact(other),
            exact(&(ours - other)),
            if holds { "yes" } else { "NO" }.into(),
        ]);
    };
    push(
        "above (ts+t-1)/(2ts)".into(),
        &modified,
        &report.floor,
        modified > report.floor,
    );
    if let Some(u) = &report.upper {
        push("below large-s bound".into(), u, &modified, modified < *u);
    }
    if let Some(be) = &report.be_rate {
        push("layered vs modified".into(), be, &modified, *be >= modified);
    }
    for c in &report.comparisons {
        push(
            format!("beats {}", c.family),
            &modified,
            &c.prior_rate,
            c.is_strict(),
        );
    }
    if let Some(improves) = report.upper_improves {
        let small = ub_small_s(a.t, (a.s - 1) * a.t)?;
        let large = report.upper.clone().expect("present with improves");
        push(
            "large-s below small-s bound".into(),
            &small,
            &large,
            improves,
        );
    }
    match a.format {
        Format::Table => {
            println!("s = {}, t = {}, p = {}", a.s, a.t, report.p);
            println!(
                "modified rate = {} ~ {}",
                exact(&modified),
                decimal(&modified)
            );
            print!("{}", table.render());
            for note in &report.notes {
                println!("note: {note}");
            }
            println!("all strict: {}", if strict { "yes" } else { "no" });
        }
        Format::Json => {
            let mut value = table.to_json();
            value["all_strict"] = json!(strict);
            value["notes"] = json!(report.notes);
            println!("{}", serde_json::to_string_pretty(&value).expect("json"));
        }
    }
    if strict {
        Ok(())
    } else {
        Err(Failure::Verification("a comparison is not strict".into()))
    }
}
