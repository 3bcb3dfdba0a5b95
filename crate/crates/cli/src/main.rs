use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use delpezzo_core::acceptance::{self, AcceptanceConfig};
use delpezzo_core::coxring::{self, GradedDimensionTable, HilbertOptions};
use delpezzo_core::nagata::{self, PointConfiguration};
use delpezzo_core::picard::{self, PicClass, DEFAULT_ORBIT_CAP};
use delpezzo_core::Error;

const ORBIT_CAP_VAR: &str = "DELPEZZO_ORBIT_CAP";

#[derive(Parser)]
#[command(name = "delpezzo", version, about = "Cox rings of Del Pezzo surfaces in exact arithmetic")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Tsv, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Brute,
    Weyl,
}

#[derive(Subcommand)]
enum Command {
    /// List the exceptional classes of X_r.
    Exceptional {
        #[arg(long)]
        r: i64,
        #[arg(long, value_enum, default_value_t = Method::Weyl)]
        method: Method,
    },
    /// h0 of a class from the lattice algorithm.
    H0 {
        #[command(flatten)]
        class: ClassArg,
    },
    /// h0 of a class by plane interpolation at sampled or given points.
    OracleH0 {
        #[command(flatten)]
        class: ClassArg,
        /// Points file; overrides sampling.
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Effective classes and Cox ring dimensions by anticanonical degree.
    Effective {
        #[arg(long)]
        r: i64,
        #[arg(long, default_value_t = 3)]
        max_degree: u32,
    },
    /// Hilbert series numerator of the Cox ring.
    Hilbert(HilbertArgs),
    /// Hilbert numerator with palindromy and a-invariant checks.
    Gorenstein(HilbertArgs),
    /// Sample or validate point configurations.
    Points {
        #[command(subcommand)]
        action: PointsCommand,
    },
    /// Check that the w-forms and section bases are fixed by the unipotent action.
    NagataVerify {
        #[command(flatten)]
        points: PointsArg,
        #[arg(long, default_value_t = 2)]
        max_degree: u32,
    },
    /// Count quadratic relations among the degree-one generators.
    Relations {
        #[command(flatten)]
        points: PointsArg,
        /// Largest r attempted.
        #[arg(long, default_value_t = coxring::DEFAULT_RELATION_MAX_R)]
        max_r: u8,
    },
    /// Compare h0 of a class on X_{r-1} with h0 of its pullback to X_r.
    ChartCheck {
        #[arg(long)]
        r: i64,
        /// Class on X_{r-1} (r entries).
        #[arg(long)]
        class: String,
        /// Exceptional class of X_r that is contracted; defaults to l_r.
        #[arg(long)]
        exceptional: Option<String>,
        #[arg(long, default_value_t = 3)]
        max_k: u32,
    },
    /// Compare the subring generated by exceptional sections with the full component (r = 8).
    GapProbe {
        #[arg(long)]
        class: String,
        #[command(flatten)]
        points: PointsArg,
        #[arg(long, default_value_t = 4)]
        max_degree: u32,
    },
    /// Run the acceptance suite.
    Acceptance {
        #[arg(long, default_value_t = AcceptanceConfig::default().seed)]
        seed: u64,
        /// Time box in seconds for the r = 7 Hilbert numerator.
        #[arg(long, default_value_t = 300)]
        r7_time_box: u64,
        /// Skip the r = 7 Hilbert numerator.
        #[arg(long)]
        skip_r7: bool,
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

#[derive(Subcommand)]
enum PointsCommand {
    /// Sample a configuration in general position.
    Sample {
        #[arg(long)]
        r: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Draw every coordinate at random instead of fixing the first four points.
        #[arg(long)]
        free: bool,
        /// Write the points file here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a points file for general position.
    Validate {
        #[arg(long)]
        points: PathBuf,
    },
}

#[derive(Args)]
struct ClassArg {
    #[arg(long)]
    r: i64,
    /// Class as a_0,a_1,...,a_r.
    #[arg(long, allow_hyphen_values = true)]
    class: String,
}

#[derive(Args)]
struct PointsArg {
    /// Points file; overrides sampling.
    #[arg(long)]
    points: Option<PathBuf>,
    #[arg(long)]
    r: Option<i64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct HilbertArgs {
    #[arg(long)]
    r: i64,
    /// Permit the (slow) r = 7 computation.
    #[arg(long)]
    allow_r7: bool,
    /// Give up after this many seconds.
    #[arg(long)]
    time_box: Option<u64>,
}

/// Malformed input caught by the CLI itself (exit code 2).
#[derive(Debug)]
struct InputError(String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

enum Status {
    Ok,
    CheckFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let result = run(cli, &mut out);
    print!("{out}");
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.chain().any(|c| c.is::<InputError>() || c.is::<std::io::Error>() || c.is::<serde_json::Error>()) {
        return 2;
    }
    match e.chain().find_map(|c| c.downcast_ref::<Error>()) {
        Some(
            Error::RankOutOfRange(_)
            | Error::ContextMismatch { .. }
            | Error::NotARoot(_)
            | Error::NotExceptional(_)
            | Error::InvalidInput(_)
            | Error::Degenerate(_)
            | Error::NotValidated
            | Error::Unsupported(_),
        ) => 2,
        _ => 1,
    }
}

fn input(msg: impl Into<String>) -> anyhow::Error {
    InputError(msg.into()).into()
}

fn parse_r(r: i64) -> Result<u8> {
    Ok(picard::check_r(r)?)
}

fn parse_class(r: u8, s: &str) -> Result<PicClass> {
    let d: PicClass = s.parse().with_context(|| format!("malformed class {s:?}"))?;
    if d.r() != r {
        return Err(input(format!("class {s:?} has {} entries, expected {} for r = {r}", d.r() + 1, r + 1)));
    }
    Ok(d)
}

fn orbit_cap() -> Result<usize> {
    match std::env::var(ORBIT_CAP_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| input(format!("{ORBIT_CAP_VAR}={v:?} is not a count"))),
        Err(_) => Ok(DEFAULT_ORBIT_CAP),
    }
}

fn read_points(path: &Path) -> Result<PointConfiguration> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(PointConfiguration::from_json(&text).with_context(|| format!("parsing {}", path.display()))?)
}

/// Points from a file when given, otherwise sampled from the seed; in both
/// cases validated for general position.
fn load_points(arg: &PointsArg) -> Result<PointConfiguration> {
    let pts = match &arg.points {
        Some(path) => {
            let pts = read_points(path)?;
            if let Some(r) = arg.r {
                if pts.r() as i64 != r {
                    return Err(input(format!("points file has r = {}, but --r {r} was given", pts.r())));
                }
            }
            pts
        }
        None => {
            let r = arg.r.ok_or_else(|| input("either --points or --r is required"))?;
            nagata::sample_points(parse_r(r)?, arg.seed)?
        }
    };
    Ok(pts.validated()?)
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn hilbert(args: &HilbertArgs) -> Result<coxring::HilbertData> {
    let r = parse_r(args.r)?;
    let opts = HilbertOptions { allow_r7: args.allow_r7, time_box: args.time_box.map(Duration::from_secs) };
    Ok(coxring::hilbert_numerator(r, opts)?)
}

fn run(cli: Cli, out: &mut String) -> Result<Status> {
    let json = cli.format == Format::Json;
    match cli.command {
        Command::Exceptional { r, method } => {
            let r = parse_r(r)?;
            let classes = match method {
                Method::Brute => picard::exceptional_curves(r)?,
                Method::Weyl => picard::weyl_orbit(&PicClass::basis(r, r as usize), orbit_cap()?)?,
            };
            if json {
                let v = json!({ "r": r, "count": classes.len(), "classes": classes });
                writeln!(out, "{v}")?;
            } else {
                writeln!(out, "count\t{}", classes.len())?;
                for c in &classes {
                    writeln!(out, "{c}")?;
                }
            }
        }
        Command::H0 { class } => {
            let r = parse_r(class.r)?;
            let d = parse_class(r, &class.class)?;
            let h = picard::h0(&d);
            if json {
                writeln!(out, "{}", json!({ "class": d, "h0": h }))?;
            } else {
                writeln!(out, "{h}")?;
            }
        }
        Command::OracleH0 { class, points, seed } => {
            let r = parse_r(class.r)?;
            let d = parse_class(r, &class.class)?;
            let pts = load_points(&PointsArg { points, r: Some(r as i64), seed })?;
            let h = nagata::component_dimension(&pts, &d)?;
            if json {
                writeln!(out, "{}", json!({ "class": d, "h0": h }))?;
            } else {
                writeln!(out, "{h}")?;
            }
        }
        Command::Effective { r, max_degree } => {
            let table = GradedDimensionTable::compute(parse_r(r)?, max_degree)?;
            if json {
                writeln!(out, "{}", table.to_json())?;
            } else {
                out.push_str(&table.to_tsv());
            }
        }
        Command::Hilbert(args) => {
            let h = hilbert(&args)?;
            if json {
                writeln!(out, "{}", serde_json::to_string(&h)?)?;
            } else {
                writeln!(out, "dims\t{}", join(&h.dims))?;
                writeln!(out, "numerator\t{}", join(&h.numerator))?;
                writeln!(out, "a_invariant\t{}", h.a_invariant)?;
            }
        }
        Command::Gorenstein(args) => {
            let h = hilbert(&args)?;
            let palindromic = coxring::gorenstein_palindrome_check(&h);
            let a_ok = coxring::a_invariant_check(&h);
            if json {
                let v = json!({ "numerator": h.numerator, "a_invariant": h.a_invariant, "palindromic": palindromic });
                writeln!(out, "{v}")?;
            } else {
                writeln!(out, "numerator\t{}", join(&h.numerator))?;
                writeln!(out, "a_invariant\t{}", h.a_invariant)?;
                writeln!(out, "palindromic\t{palindromic}")?;
            }
            if !(palindromic && a_ok) {
                return Ok(Status::CheckFailed);
            }
        }
        Command::Points { action } => return points(action, json, out),
        Command::NagataVerify { points, max_degree } => {
            let pts = load_points(&points)?;
            let us = nagata::constraint_basis(&pts);
            let mut elements = nagata::w_forms(&pts)?.to_vec();
            let mut classes = 0;
            for d in coxring::effective_classes_by_degree(pts.r(), max_degree)?.concat() {
                elements.extend(nagata::section_basis(&pts, &d)?.basis);
                classes += 1;
            }
            let mut failures = 0;
            for p in &elements {
                for u in &us {
                    if !nagata::is_u_invariant(&pts, p, u)? {
                        failures += 1;
                    }
                }
            }
            if json {
                let v = json!({
                    "r": pts.r(),
                    "directions": us.len(),
                    "classes": classes,
                    "polynomials": elements.len(),
                    "failures": failures,
                });
                writeln!(out, "{v}")?;
            } else {
                writeln!(out, "directions\t{}", us.len())?;
                writeln!(out, "classes\t{classes}")?;
                writeln!(out, "polynomials\t{}", elements.len())?;
                writeln!(out, "failures\t{failures}")?;
            }
            if failures > 0 {
                return Ok(Status::CheckFailed);
            }
        }
        Command::Relations { points, max_r } => {
            let pts = load_points(&points)?;
            let c = coxring::quadratic_relation_count(&pts, max_r)?;
            if json {
                writeln!(out, "{}", serde_json::to_string(&c)?)?;
            } else {
                writeln!(out, "generators\t{}", c.generators)?;
                writeln!(out, "symmetric_square\t{}", c.symmetric_square)?;
                writeln!(out, "product_span\t{}", c.product_span)?;
                writeln!(out, "relations\t{}", c.relations)?;
            }
        }
        Command::ChartCheck { r, class, exceptional, max_k } => {
            let r = parse_r(r)?;
            let small = parse_r(r as i64 - 1).map_err(|_| input(format!("chart-check needs r >= 4, got {r}")))?;
            let d2 = parse_class(small, &class)?;
            let e = match exceptional {
                Some(s) => parse_class(r, &s)?,
                None => PicClass::basis(r, r as usize),
            };
            let c = coxring::chart_check(r, &e, &d2, max_k)?;
            if json {
                let mut v = serde_json::to_value(&c)?;
                v["holds"] = json!(c.holds());
                writeln!(out, "{v}")?;
            } else {
                writeln!(out, "exceptional\t{}", c.exceptional)?;
                writeln!(out, "base_class\t{}", c.base_class)?;
                writeln!(out, "pullback\t{}", c.pullback)?;
                writeln!(out, "base_h0\t{}", c.base_h0)?;
                writeln!(out, "pullback_h0\t{}", c.pullback_h0)?;
                writeln!(out, "saturation_h0\t{}", join(&c.saturation_h0))?;
                writeln!(out, "holds\t{}", c.holds())?;
            }
            if !c.holds() {
                return Ok(Status::CheckFailed);
            }
        }
        Command::GapProbe { class, points, max_degree } => {
            let pts = load_points(&PointsArg { r: Some(points.r.unwrap_or(8)), ..points })?;
            let d = parse_class(pts.r(), &class)?;
            let g = coxring::gap_probe(&pts, &d, max_degree)?;
            if json {
                writeln!(out, "{}", serde_json::to_string(&g)?)?;
            } else {
                writeln!(out, "class\t{}", g.class)?;
                writeln!(out, "factorizations\t{}", g.factorizations)?;
                writeln!(out, "subring_dim\t{}", g.subring_dim)?;
                writeln!(out, "full_dim\t{}", g.full_dim)?;
            }
        }
        Command::Acceptance { seed, r7_time_box, skip_r7, only } => {
            let config = AcceptanceConfig {
                seed,
                r7_time_box: (!skip_r7).then(|| Duration::from_secs(r7_time_box)),
            };
            let ids: Vec<u8> = if only.is_empty() { acceptance::CRITERIA.iter().map(|c| c.0).collect() } else { only };
            let mut failed = false;
            for id in ids {
                let o = acceptance::run(id, &config).ok_or_else(|| input(format!("no criterion {id}")))?;
                failed |= !o.passed;
                if json {
                    let v = json!({
                        "id": o.id,
                        "name": o.name,
                        "passed": o.passed,
                        "detail": o.detail,
                        "seconds": o.elapsed.as_secs_f64(),
                    });
                    println!("{v}");
                } else {
                    println!("{o}");
                }
            }
            if failed {
                return Ok(Status::CheckFailed);
            }
        }
    }
    Ok(Status::Ok)
}

fn points(action: PointsCommand, json: bool, out: &mut String) -> Result<Status> {
    match action {
        PointsCommand::Sample { r, seed, free, out: path } => {
            let r = parse_r(r)?;
            let pts = if free { nagata::sample_points_free(r, seed)? } else { nagata::sample_points(r, seed)? };
            match path {
                Some(p) => std::fs::write(&p, pts.to_json()).with_context(|| format!("writing {}", p.display()))?,
                None => out.push_str(&pts.to_json()),
            }
            Ok(Status::Ok)
        }
        PointsCommand::Validate { points } => {
            let pts = read_points(&points)?;
            let result = nagata::validate_general_position(&pts);
            if json {
                let v = match &result {
                    Ok(cert) => json!({ "valid": true, "certificate": cert }),
                    Err(v) => json!({ "valid": false, "violation": v }),
                };
                writeln!(out, "{v}")?;
            } else {
                match &result {
                    Ok(c) => {
                        writeln!(out, "valid\ttrue")?;
                        writeln!(out, "lines_checked\t{}", c.lines_checked)?;
                        writeln!(out, "conics_checked\t{}", c.conics_checked)?;
                        writeln!(out, "cubics_checked\t{}", c.cubics_checked)?;
                    }
                    Err(v) => {
                        writeln!(out, "valid\tfalse")?;
                        writeln!(out, "violation\t{v}")?;
                    }
                }
            }
            Ok(if result.is_ok() { Status::Ok } else { Status::CheckFailed })
        }
    }
}

#[cfg(test)]
mod tests {
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        super::Cli::command().debug_assert();
    }
}
