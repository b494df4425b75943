//! `toricode`: build toric surface codes from lattice polygons, compute their
//! parameters and bounds, and rerun the published numeric claims.
//!
//! Exit codes: 0 success, 1 a reproduced claim mismatched, 2 bad input,
//! 3 an internal invariant was violated.

mod render;
mod reproduce;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use toricode::bounds::{full_report, BoundsError, ReportOptions, SECTION_BUDGET};
use toricode::code::search_size;
use toricode::decomp::DEFAULT_BUDGET;
use toricode::{
    best_subpolygon_decomposition, build_code, min_distance_exact, CodeError, FieldSpec, LatticePolygon, SearchOptions,
};

#[derive(Parser, Debug)]
#[command(name = "toricode", version, about = "Toric surface codes from lattice polygons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: RunConfig,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Lattice point counts, genus and box fit of a polygon.
    Info,
    /// Dimensions and generator matrix of C_P(F_q).
    Code,
    /// Exact minimum distance by exhaustive search.
    Mindist,
    /// Closed forms and decomposition bounds on the minimum distance.
    Bounds,
    /// Subpolygons with the most Minkowski summands.
    Decompose,
    /// Recompute the published numeric claims.
    Reproduce,
}

#[derive(clap::Args, Debug, Clone)]
struct RunConfig {
    /// Field order (a prime power).
    #[arg(long, global = true)]
    q: Option<u32>,
    /// Field modulus coefficients c0,c1,...,ce (lowest degree first, monic).
    #[arg(long, global = true, value_delimiter = ',')]
    modulus: Option<Vec<u32>>,
    /// Polygon JSON file `{"vertices": [[x, y], ...]}`; `-` reads stdin.
    #[arg(long, global = true)]
    polygon: Option<PathBuf>,
    /// Worker threads for exhaustive searches (0 = all cores).
    #[arg(long, global = true, env = "TORICODE_THREADS", default_value_t = 0)]
    threads: usize,
    /// Give up an exhaustive search after this many seconds.
    #[arg(long, global = true)]
    deadline: Option<f64>,
    /// Candidate budget for the subpolygon search.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Allow runs estimated to take over a minute.
    #[arg(long, global = true)]
    long: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    output: Format,
    /// Progress file for resumable `mindist` runs.
    #[arg(long, global = true)]
    checkpoint: Option<PathBuf>,
    /// Include the exhaustive distance in `bounds`.
    #[arg(long, global = true)]
    exact: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
    Text,
}

/// A failure mapped to an exit code.
#[derive(Debug)]
enum Failure {
    Input(String),
    Invariant(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Invariant(_) => 3,
        }
    }
}

impl From<CodeError> for Failure {
    fn from(e: CodeError) -> Self {
        match e {
            CodeError::RankDeficient { .. } => Failure::Invariant(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<BoundsError> for Failure {
    fn from(e: BoundsError) -> Self {
        match e {
            BoundsError::Code(c) => c.into(),
            other => Failure::Input(other.to_string()),
        }
    }
}

/// Symbol operations per second assumed when estimating search time.
const SEARCH_RATE: f64 = 1.5e9;

fn estimate_secs(size: u64, n: usize) -> f64 {
    size as f64 * n as f64 / SEARCH_RATE
}

fn read_polygon(cfg: &RunConfig) -> Result<LatticePolygon, Failure> {
    let path = cfg
        .polygon
        .as_ref()
        .ok_or_else(|| Failure::Input("--polygon is required".into()))?;
    let text = if path.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(|e| Failure::Input(e.to_string()))?
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?
    };
    LatticePolygon::from_json(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_field(cfg: &RunConfig) -> Result<FieldSpec, Failure> {
    let q = cfg.q.ok_or_else(|| Failure::Input("--q is required".into()))?;
    if q < 3 {
        return Err(Failure::Input("q must be at least 3".into()));
    }
    FieldSpec::with_order(q, cfg.modulus.as_deref()).map_err(|e| Failure::Input(e.to_string()))
}

fn search_options(cfg: &RunConfig) -> SearchOptions {
    SearchOptions {
        threads: cfg.threads,
        deadline: cfg.deadline.map(Duration::from_secs_f64),
        checkpoint: cfg.checkpoint.clone(),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn cmd_info(cfg: &RunConfig) -> Result<Value, Failure> {
    let p = read_polygon(cfg)?;
    let c = p.counts();
    let genus = p.genus().ok();
    let scott = p.scott_check().ok();
    let qs: Vec<u32> = match cfg.q {
        Some(q) => vec![q],
        None => (3..=32)
            .filter(|&q| toricode::field::prime_power(q).is_some())
            .collect(),
    };
    let fits: Vec<Value> = qs
        .iter()
        .map(|&q| json!({"q": q, "fits": p.fits_in_box(q).is_some()}))
        .collect();
    let smallest = (3..=toricode::field::MAX_ORDER)
        .find(|&q| toricode::field::prime_power(q).is_some() && p.fits_in_box(q).is_some());
    Ok(json!({
        "polygon": p,
        "vertices": p.vertices().len(),
        "dimension": p.dim(),
        "twice_area": c.volume2,
        "points": c.total,
        "boundary": c.boundary,
        "interior": c.interior,
        "genus": genus,
        "scott_holds": scott,
        "box_fit": fits,
        "smallest_q": smallest,
    }))
}

fn cmd_code(cfg: &RunConfig) -> Result<Value, Failure> {
    let p = read_polygon(cfg)?;
    let f = read_field(cfg)?;
    let code = build_code(&p, &f)?;
    let generator: Vec<Vec<u32>> = (0..code.k())
        .map(|r| code.row(r).iter().map(|v| v.value()).collect())
        .collect();
    Ok(json!({
        "polygon": p,
        "q": f.order(),
        "modulus": f.modulus(),
        "n": code.n(),
        "k": code.k(),
        "translation": code.translation(),
        "monomials": code.monomials(),
        "generator": generator,
    }))
}

fn cmd_mindist(cfg: &RunConfig) -> Result<(Value, Option<String>), Failure> {
    let p = read_polygon(cfg)?;
    let f = read_field(cfg)?;
    let code = build_code(&p, &f)?;
    let size = search_size(&code);
    let est = estimate_secs(size, code.n());
    if est > 60.0 && !cfg.long {
        return Err(Failure::Input(format!(
            "search of {size} codewords is estimated at {est:.0}s; pass --long to run it"
        )));
    }
    match min_distance_exact(&code, &search_options(cfg)) {
        Ok(md) => {
            let section = code.section_of(&md.witness);
            if md.witness.is_empty() {
                return Ok((
                    json!({"polygon": p, "q": f.order(), "n": code.n(), "k": code.k(),
                           "d": md.distance, "codewords": md.codewords, "complete": true,
                           "witness": Value::Null}),
                    None,
                ));
            }
            let section = section.ok_or_else(|| Failure::Invariant("witness is not a codeword".into()))?;
            let dump = code.dump_codeword(&md.witness);
            Ok((
                json!({
                    "polygon": p,
                    "q": f.order(),
                    "n": code.n(),
                    "k": code.k(),
                    "d": md.distance,
                    "codewords": md.codewords,
                    "complete": true,
                    "witness": section,
                }),
                Some(dump),
            ))
        }
        Err(CodeError::DeadlineExceeded { best_upper, codewords }) => Ok((
            json!({
                "polygon": p,
                "q": f.order(),
                "n": code.n(),
                "k": code.k(),
                "d": Value::Null,
                "best_upper": best_upper,
                "codewords": codewords,
                "complete": false,
                "witness": Value::Null,
            }),
            None,
        )),
        Err(e) => Err(e.into()),
    }
}

fn cmd_bounds(cfg: &RunConfig) -> Result<(Value, bool), Failure> {
    let p = read_polygon(cfg)?;
    let f = read_field(cfg)?;
    if cfg.exact {
        let code = build_code(&p, &f)?;
        let est = estimate_secs(search_size(&code), code.n());
        if est > 60.0 && !cfg.long {
            return Err(Failure::Input(format!(
                "exact search is estimated at {est:.0}s; pass --long to run it"
            )));
        }
    }
    let options = ReportOptions {
        exact: cfg.exact,
        decomposition_budget: cfg.budget,
        section_budget: SECTION_BUDGET,
        search: SearchOptions {
            checkpoint: None,
            ..search_options(cfg)
        },
    };
    let report = full_report(&p, &f, &options)?;
    let coherent = report.violations.is_empty();
    Ok((to_value(&report), coherent))
}

fn cmd_decompose(cfg: &RunConfig) -> Result<Value, Failure> {
    let p = read_polygon(cfg)?;
    if p.dim() == 0 {
        return Err(Failure::Input("a single point has no nontrivial summands".into()));
    }
    let decs = best_subpolygon_decomposition(&p, cfg.budget).map_err(|e| Failure::Input(e.to_string()))?;
    let rows: Vec<Value> = decs
        .iter()
        .map(|d| {
            json!({
                "subpolygon": d.subpolygon,
                "summands": d.summands,
                "translation": d.translation,
                "ell": d.ell,
                "exhaustive": d.exhaustive,
            })
        })
        .collect();
    Ok(json!({
        "polygon": p,
        "ell": decs.first().map_or(0, |d| d.ell),
        "exhaustive": decs.iter().all(|d| d.exhaustive),
        "decompositions": rows,
    }))
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let cfg = &cli.opts;
    let mut status = 0u8;
    let (value, extra) = match cli.command {
        Command::Info => (cmd_info(cfg)?, None),
        Command::Code => (cmd_code(cfg)?, None),
        Command::Mindist => cmd_mindist(cfg)?,
        Command::Bounds => {
            let (v, coherent) = cmd_bounds(cfg)?;
            if !coherent {
                status = 3;
            }
            (v, None)
        }
        Command::Decompose => (cmd_decompose(cfg)?, None),
        Command::Reproduce => {
            let rows = reproduce::run(cfg.long, &search_options(cfg));
            if rows.iter().any(|r| !r.matched) {
                status = 1;
            }
            (json!({ "rows": rows }), None)
        }
    };
    let mut text = render::render(&value, cfg.output);
    if cfg.output == Format::Text {
        if let Some(dump) = extra {
            text.push_str("codeword (i j value):\n");
            text.push_str(&dump);
        }
    }
    print!("{text}");
    Ok(status)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(status) => ExitCode::from(status),
        Err(f) => {
            match &f {
                Failure::Input(m) => eprintln!("error: {m}"),
                Failure::Invariant(m) => eprintln!("invariant violated: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
