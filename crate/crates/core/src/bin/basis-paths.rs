use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use basis_paths::doc::{self, GraphStats, PathList, Representation};
use basis_paths::hbps::{hbps_scheduled, HbpsError, HbpsResult, Schedule, SHARED_EDGES_MESSAGE};
use basis_paths::netgraph::{NetworkGraph, NetworkSpec, DEFAULT_PATH_LIMIT};
use basis_paths::subroutine::{subroutine_basis, SubroutineError};
use basis_paths::tiebreak::Overrides;
use basis_paths::verify::{verify_basis, PathSpan, VerificationReport, VerifyOptions};
use basis_paths::{BasisPathSet, TieBreak};

const EXIT_USAGE: u8 = 1;
const EXIT_REJECTED: u8 = 2;
const EXIT_VERIFY_FAILED: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "basis-paths",
    version,
    about = "Basis path sets of layered networks with layer-skip blocks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a network spec and print its statistics.
    Build(Common),
    /// List every input-to-output path in lexicographic order.
    Enumerate(Common),
    /// Skip-free construction; refuses networks with layer-skip blocks.
    Basis(Common),
    /// Hierarchical construction for networks with layer-skip blocks.
    Hbps(Common),
    /// Check coverage, independence, cardinality and spanning of a basis.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Basis or hbps document to check; computed with hbps when omitted.
        #[arg(long, value_name = "FILE")]
        basis: Option<PathBuf>,
        /// Paths drawn when the network has more than --max-paths paths.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        sample_seed: u64,
        /// Include wall-clock timings (output is then not reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Express a path as a combination of basis paths.
    Represent {
        #[command(flatten)]
        common: Common,
        /// Path as a file or inline JSON, e.g. '[[0,1],[1,1],[2,2]]'.
        #[arg(long, value_name = "FILE|JSON")]
        path: String,
        /// Basis or hbps document; computed with hbps when omitted.
        #[arg(long, value_name = "FILE")]
        basis: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Network spec (JSON).
    input: PathBuf,
    /// Write the result here instead of standard output.
    #[arg(long, short, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Fixed tie-breaks (the default).
    #[arg(long, group = "tiebreak")]
    deterministic: bool,
    /// Seeded random tie-breaks.
    #[arg(long, value_name = "N", group = "tiebreak")]
    seed: Option<u64>,
    /// Explicit tie-break choices (JSON).
    #[arg(long = "override", value_name = "FILE", group = "tiebreak")]
    override_file: Option<PathBuf>,
    #[arg(long, value_name = "N", default_value_t = DEFAULT_PATH_LIMIT)]
    max_paths: u128,
    #[arg(long, value_enum, default_value_t = Format::Structured)]
    format: Format,
    /// Worker threads for per-substructure work; output is unaffected.
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum Format {
    Structured,
    Summary,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_USAGE,
            message: format!("error: {message}"),
        }
    }
}

impl From<HbpsError> for Failure {
    fn from(e: HbpsError) -> Self {
        match e {
            HbpsError::RejectedSharedEdges(_) => Self {
                code: EXIT_REJECTED,
                message: SHARED_EDGES_MESSAGE.to_string(),
            },
            other => Self::usage(other),
        }
    }
}

struct Output {
    text: String,
    code: u8,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("{first}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let common = match &cli.command {
        Command::Build(c) | Command::Enumerate(c) | Command::Basis(c) | Command::Hbps(c) => c,
        Command::Verify { common, .. } | Command::Represent { common, .. } => common,
    };
    match run(&cli.command, common) {
        Ok(out) => match emit(common, &out.text) {
            Ok(()) => ExitCode::from(out.code),
            Err(f) => {
                eprintln!("{}", f.message);
                ExitCode::from(f.code)
            }
        },
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn emit(common: &Common, text: &str) -> Result<(), Failure> {
    match &common.output {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| Failure::usage(format!("stdout: {e}")))
        }
    }
}

fn read(path: &std::path::Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_graph(common: &Common) -> Result<NetworkGraph, Failure> {
    let text = read(&common.input)?;
    let spec = NetworkSpec::from_json(&text)
        .map_err(|e| Failure::usage(format!("{}: {e}", common.input.display())))?;
    NetworkGraph::build(&spec)
        .map_err(|e| Failure::usage(format!("{}: {e}", common.input.display())))
}

fn tie_break(common: &Common) -> Result<TieBreak, Failure> {
    if let Some(seed) = common.seed {
        return Ok(TieBreak::Seeded(seed));
    }
    if let Some(path) = &common.override_file {
        let text = read(path)?;
        let o: Overrides = serde_json::from_str(&text)
            .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        if o.format_version.is_some_and(|v| v != doc::FORMAT_VERSION) {
            return Err(Failure::usage(format!(
                "{}: unsupported format_version",
                path.display()
            )));
        }
        return Ok(TieBreak::Overrides(o));
    }
    Ok(TieBreak::Deterministic)
}

fn schedule(common: &Common) -> Schedule {
    match common.jobs {
        Some(n) if n > 1 => Schedule::Parallel(n),
        _ => Schedule::Sequential,
    }
}

fn load_basis(path: &std::path::Path) -> Result<BasisPathSet, Failure> {
    let text = read(path)?;
    doc::parse_basis(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn basis_for(
    common: &Common,
    g: &NetworkGraph,
    file: Option<&PathBuf>,
) -> Result<BasisPathSet, Failure> {
    match file {
        Some(path) => load_basis(path),
        None => Ok(hbps_scheduled(g, &tie_break(common)?, schedule(common))?.basis),
    }
}

fn run(command: &Command, common: &Common) -> Result<Output, Failure> {
    let g = load_graph(common)?;
    let tb = tie_break(common)?;
    let summary = common.format == Format::Summary;
    let ok = |text: String| Ok(Output { text, code: 0 });
    match command {
        Command::Build(_) => {
            let stats = GraphStats::of(&g);
            ok(if summary {
                stats_summary(&stats)
            } else {
                doc::render(&stats)
            })
        }
        Command::Enumerate(_) => {
            let paths = g
                .enumerate_paths(common.max_paths)
                .map_err(Failure::usage)?;
            let list = PathList {
                count: paths.len(),
                paths,
            };
            ok(if summary {
                lines_summary(&list.paths)
            } else {
                doc::render(&list)
            })
        }
        Command::Basis(_) => {
            let b = subroutine_basis(&g, &tb).map_err(|e| match e {
                SubroutineError::HasSkipEdges { from, to } => Failure::usage(format!(
                    "network has layer-skip block {from}->{to}; the basis verb handles skip-free networks only, use hbps"
                )),
                other => Failure::usage(other),
            })?;
            ok(if summary {
                basis_summary(&b)
            } else {
                doc::render(&b)
            })
        }
        Command::Hbps(_) => {
            let r = hbps_scheduled(&g, &tb, schedule(common))?;
            ok(if summary {
                hbps_summary(&r)
            } else {
                doc::render(&r)
            })
        }
        Command::Verify {
            basis,
            samples,
            sample_seed,
            timings,
            ..
        } => {
            let b = basis_for(common, &g, basis.as_ref())?;
            let opts = VerifyOptions {
                max_paths: common.max_paths,
                samples: *samples,
                sample_seed: *sample_seed,
                record_timings: *timings,
            };
            let report = verify_basis(&g, &b, &opts).map_err(Failure::usage)?;
            let code = if report.all_ok() {
                0
            } else {
                EXIT_VERIFY_FAILED
            };
            let text = if summary {
                report_summary(&report)
            } else {
                doc::render(&report)
            };
            Ok(Output { text, code })
        }
        Command::Represent { path, basis, .. } => {
            let b = basis_for(common, &g, basis.as_ref())?;
            let text = match fs::read_to_string(path) {
                Ok(t) => t,
                Err(_) if path.trim_start().starts_with(['[', '{']) => path.clone(),
                Err(e) => return Err(Failure::usage(format!("{path}: {e}"))),
            };
            let target =
                doc::parse_path(&text).map_err(|e| Failure::usage(format!("path: {e}")))?;
            target
                .validate(&g)
                .map_err(|e| Failure::usage(format!("path {target}: {e}")))?;
            for p in b.paths() {
                p.validate(&g)
                    .map_err(|e| Failure::usage(format!("basis path {p}: {e}")))?;
            }
            let membership = PathSpan::new(&g, b.paths()).represent(&target);
            let rep = Representation::new(&target, &b, &membership);
            ok(if summary {
                represent_summary(&rep)
            } else {
                doc::render(&rep)
            })
        }
    }
}

fn stats_summary(s: &GraphStats) -> String {
    let mut out = String::new();
    let blocks: Vec<String> = s
        .blocks
        .iter()
        .map(|b| format!("{}->{}", b.from, b.to))
        .collect();
    let layers: Vec<String> = s.layers.iter().map(usize::to_string).collect();
    let _ = writeln!(out, "layers      {}", layers.join(" "));
    let _ = writeln!(out, "blocks      {}", blocks.join(" "));
    let _ = writeln!(out, "L           {}", s.last_layer);
    let _ = writeln!(out, "m           {}", s.m);
    let _ = writeln!(out, "H           {}", s.h);
    let _ = writeln!(
        out,
        "skip edges  {}",
        if s.has_skip_edges { "yes" } else { "no" }
    );
    let _ = writeln!(out, "paths       {}", s.path_count);
    out
}

fn lines_summary(paths: &[basis_paths::Path]) -> String {
    let mut out = String::new();
    for p in paths {
        let _ = writeln!(out, "{p}");
    }
    let _ = writeln!(out, "{} paths", paths.len());
    out
}

fn basis_summary(b: &BasisPathSet) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<6} {:<8} path", "sub", "origin");
    for e in b.entries() {
        let origin = serde_json::to_value(e.origin)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default();
        let _ = writeln!(out, "{:<6} {:<8} {}", e.substructure, origin, e.path);
    }
    let _ = writeln!(out, "cardinality {}", b.len());
    out
}

fn hbps_summary(r: &HbpsResult) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<4} {:<16} {:>6} {:>6} {:>6} {:>6}",
        "id", "layers", "m", "H", "m-H", "paths"
    );
    for (id, s) in r.per_substructure.iter().enumerate() {
        let layers: Vec<String> = s.path.layers.iter().map(usize::to_string).collect();
        let _ = writeln!(
            out,
            "{:<4} {:<16} {:>6} {:>6} {:>6} {:>6}",
            id,
            layers.join("-"),
            s.m,
            s.h,
            s.m - s.h,
            s.basis.len()
        );
    }
    let _ = writeln!(out, "cardinality {}", r.cardinality);
    out
}

fn report_summary(r: &VerificationReport) -> String {
    let mut out = String::new();
    let mark = |b: bool| if b { "ok" } else { "FAIL" };
    let _ = writeln!(
        out,
        "coverage      {:<4} ({} uncovered edges)",
        mark(r.coverage_ok),
        r.uncovered_edges.len()
    );
    let expected = r
        .expected_cardinality
        .map_or_else(|| "n/a".to_string(), |e| e.to_string());
    let _ = writeln!(
        out,
        "cardinality   {:<4} (actual {}, expected {})",
        mark(r.cardinality_ok),
        r.actual_cardinality,
        expected
    );
    let _ = writeln!(
        out,
        "independence  {:<4} (rank {})",
        mark(r.independent_ok),
        r.rank
    );
    let _ = writeln!(
        out,
        "span          {:<4} ({} of {} paths checked, {} failures)",
        mark(r.span_failures.is_empty()),
        r.span_checked,
        r.total_paths,
        r.span_failures.len()
    );
    let _ = writeln!(out, "result        {}", mark(r.all_ok()));
    out
}

fn represent_summary(r: &Representation) -> String {
    let mut out = String::new();
    if !r.in_span {
        let _ = writeln!(out, "{} is not in the span of the basis", r.path);
        return out;
    }
    let _ = writeln!(out, "{} =", r.path);
    for t in &r.terms {
        let _ = writeln!(out, "  {:>6} * {}", t.coefficient, t.path);
    }
    let _ = writeln!(
        out,
        "integer coefficients: {}",
        if r.integer { "yes" } else { "no" }
    );
    out
}
