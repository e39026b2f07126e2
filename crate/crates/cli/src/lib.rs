//! The `symprep` command: read a colored graph, reduce it, and write the
//! reduced graph, generators and a stats report.

use std::collections::HashSet;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use clap::Parser;
use serde::Serialize;
use symprep::io::{parse_dimacs, write_dimacs, write_generators};
use symprep::reductions::Counters;
use symprep::solver::{brute_force_aut, group_closure, ir_solve, SolverError, DEFAULT_ORACLE_LIMIT};
use symprep::{preprocess, reconstruct_group, Coloring, ColoredGraph, ScheduleConfig, SparseAutomorphism};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;
pub const EXIT_ORACLE_LIMIT: i32 = 3;

#[derive(Parser, Debug, Clone)]
#[command(name = "symprep", version, about = "Symmetry-preserving graph reduction")]
pub struct Args {
    /// Input graph in DIMACS format; `-` or absent reads stdin.
    #[arg(long = "in", value_name = "FILE", conflicts_with = "batch")]
    pub input: Option<String>,
    /// Write the reduced graph here (`-` for stdout).
    #[arg(long, value_name = "FILE")]
    pub out_graph: Option<String>,
    /// Write generators here (`-` for stdout).
    #[arg(long, value_name = "FILE")]
    pub out_gens: Option<String>,
    /// Solve the reduced graph and emit a generating set of the full group.
    #[arg(long)]
    pub solve: bool,
    /// Cross-check against brute force (small graphs only).
    #[arg(long)]
    pub oracle: bool,
    #[arg(long)]
    pub disable_deg01: bool,
    #[arg(long)]
    pub disable_deg2: bool,
    #[arg(long)]
    pub disable_probe: bool,
    #[arg(long)]
    pub disable_flip: bool,
    #[arg(long)]
    pub disable_components: bool,
    /// Largest cell probed without a depth bound.
    #[arg(long, value_name = "B", default_value_t = 8)]
    pub probe_bound: usize,
    /// Minimum fraction of vertices an iteration must remove to repeat.
    #[arg(long, value_name = "F", default_value_t = 0.25, value_parser = parse_fraction)]
    pub shrink: f64,
    /// Write a JSON run report here (`-` for stdout).
    #[arg(long, value_name = "FILE")]
    pub stats: Option<String>,
    /// Recorded in the stats; the pipeline itself is deterministic.
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// Include elapsed time in the stats.
    #[arg(long)]
    pub timing: bool,
    /// Process every file in a directory.
    #[arg(long, value_name = "DIR", requires = "out_dir")]
    pub batch: Option<PathBuf>,
    /// Output directory for `--batch`.
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
}

fn parse_fraction(s: &str) -> Result<f64, String> {
    let f: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if f > 0.0 && f < 1.0 {
        Ok(f)
    } else {
        Err("must lie strictly between 0 and 1".into())
    }
}

impl Args {
    pub fn config(&self) -> ScheduleConfig {
        let on = |disabled: bool| !disabled;
        ScheduleConfig {
            deg0: on(self.disable_deg01),
            deg1: on(self.disable_deg01),
            deg2_unique: on(self.disable_deg2),
            deg2_match: on(self.disable_deg2),
            deg2_flip: on(self.disable_deg2),
            edge_flip: on(self.disable_flip),
            probe_1ir: on(self.disable_probe),
            probe_size2: on(self.disable_probe),
            probe_size_b: on(self.disable_probe),
            components: on(self.disable_components),
            probe_bound: self.probe_bound,
            shrink_threshold: self.shrink,
            ..ScheduleConfig::default()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Stats {
    pub input_n: usize,
    pub input_m: usize,
    pub reduced_n: usize,
    pub reduced_m: usize,
    pub iterations: usize,
    pub vertices_removed: usize,
    #[serde(flatten)]
    pub counters: Counters,
    pub generators: usize,
    pub solved: bool,
    pub oracle_checked: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Outputs {
    pub reduced: ColoredGraph,
    pub generators: Vec<SparseAutomorphism>,
    pub stats: Stats,
}

impl Outputs {
    pub fn graph_text(&self) -> String {
        write_dimacs(&self.reduced)
    }

    pub fn gens_text(&self) -> String {
        write_generators(&self.generators)
    }

    pub fn stats_text(&self) -> String {
        serde_json::to_string_pretty(&self.stats).expect("stats serialize") + "\n"
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

fn failure(code: i32, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

/// Runs the pipeline on one graph text.
pub fn process(text: &str, args: &Args) -> Result<Outputs, Failure> {
    let g = parse_dimacs(text).map_err(|e| failure(EXIT_PARSE, e.to_string()))?;
    if args.oracle && g.n() > DEFAULT_ORACLE_LIMIT {
        return Err(failure(
            EXIT_ORACLE_LIMIT,
            SolverError::TooLarge { n: g.n(), limit: DEFAULT_ORACLE_LIMIT }.to_string(),
        ));
    }
    let start = Instant::now();
    let report = preprocess(&g, &args.config());
    let generators = if args.solve {
        let reduced_gens = ir_solve(&report.reduced, &Coloring::of_graph(&report.reduced));
        reconstruct_group(&report, &reduced_gens).map_err(|e| failure(EXIT_INTERNAL, e.to_string()))?
    } else {
        report.generators().cloned().collect()
    };
    if let Some(i) = generators.iter().position(|s| !s.is_automorphism_of(&g)) {
        return Err(failure(EXIT_INTERNAL, format!("generator {} is not an automorphism", i + 1)));
    }
    if args.oracle {
        check_oracle(&g, &generators, args.solve)?;
    }
    let elapsed = start.elapsed();
    let stats = Stats {
        input_n: report.input_n,
        input_m: report.input_m,
        reduced_n: report.reduced.n(),
        reduced_m: report.reduced.m(),
        iterations: report.iterations,
        vertices_removed: report.counters.vertices_removed(),
        counters: report.counters.clone(),
        generators: generators.len(),
        solved: args.solve,
        oracle_checked: args.oracle,
        seed: args.seed,
        elapsed_ms: args.timing.then_some(elapsed.as_secs_f64() * 1000.0),
    };
    Ok(Outputs { reduced: report.reduced, generators, stats })
}

fn check_oracle(g: &ColoredGraph, gens: &[SparseAutomorphism], complete: bool) -> Result<(), Failure> {
    let oracle: HashSet<Vec<usize>> = brute_force_aut(g, DEFAULT_ORACLE_LIMIT)
        .map_err(|e| failure(EXIT_ORACLE_LIMIT, e.to_string()))?
        .into_iter()
        .collect();
    let closure = group_closure(gens, g.n(), oracle.len())
        .map_err(|_| failure(EXIT_INTERNAL, "generators exceed the automorphism group"))?;
    let ok = if complete { closure == oracle } else { closure.is_subset(&oracle) };
    if ok {
        Ok(())
    } else {
        Err(failure(EXIT_INTERNAL, "generated group disagrees with brute force"))
    }
}

fn write_target(target: &str, content: &str, stdout: &mut dyn Write) -> std::io::Result<()> {
    if target == "-" {
        stdout.write_all(content.as_bytes())
    } else {
        fs::write(target, content)
    }
}

/// Entry point shared by the binary and the tests. Returns the exit code.
pub fn run<I, T>(argv: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    if let Some(dir) = &args.batch {
        let out_dir = args.out_dir.as_deref().expect("clap enforces --out-dir");
        return run_batch(dir, out_dir, &args, stderr);
    }
    let text = match args.input.as_deref() {
        None | Some("-") => {
            let mut s = String::new();
            stdin.read_to_string(&mut s).map(|_| s)
        }
        Some(path) => fs::read_to_string(path),
    };
    let text = match text {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot read input: {e}");
            return EXIT_PARSE;
        }
    };
    let out = match process(&text, &args) {
        Ok(o) => o,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            return f.code;
        }
    };
    let targets = [
        (&args.out_graph, out.graph_text()),
        (&args.out_gens, out.gens_text()),
        (&args.stats, out.stats_text()),
    ];
    for (target, content) in targets {
        if let Some(t) = target {
            if let Err(e) = write_target(t, &content, stdout) {
                let _ = writeln!(stderr, "error: cannot write {t}: {e}");
                return EXIT_INTERNAL;
            }
        }
    }
    EXIT_OK
}

/// Processes every regular file of `dir` (sorted by name) on a small worker
/// pool, writing `<stem>.graph`, `<stem>.gens` and `<stem>.json` into
/// `out_dir`. Returns the largest exit code seen.
pub fn run_batch(dir: &Path, out_dir: &Path, args: &Args, stderr: &mut dyn Write) -> i32 {
    let listing = fs::read_dir(dir).and_then(|it| it.map(|e| e.map(|e| e.path())).collect::<Result<Vec<_>, _>>());
    let mut files: Vec<PathBuf> = match listing {
        Ok(paths) => paths.into_iter().filter(|p| p.is_file()).collect(),
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot list {}: {e}", dir.display());
            return EXIT_PARSE;
        }
    };
    files.sort();
    if let Err(e) = fs::create_dir_all(out_dir) {
        let _ = writeln!(stderr, "error: cannot create {}: {e}", out_dir.display());
        return EXIT_INTERNAL;
    }
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).clamp(1, 4).min(files.len().max(1));
    let next = AtomicUsize::new(0);
    let results: Vec<Mutex<Option<Result<(), Failure>>>> = files.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(path) = files.get(i) else { break };
                *results[i].lock().unwrap() = Some(batch_one(path, out_dir, args));
            });
        }
    });
    let mut code = EXIT_OK;
    for (path, result) in files.iter().zip(results) {
        if let Some(Err(f)) = result.into_inner().unwrap() {
            let _ = writeln!(stderr, "{}: {}", path.display(), f.message);
            code = code.max(f.code);
        }
    }
    code
}

fn batch_one(path: &Path, out_dir: &Path, args: &Args) -> Result<(), Failure> {
    let text = fs::read_to_string(path).map_err(|e| failure(EXIT_PARSE, e.to_string()))?;
    let out = process(&text, args)?;
    let stem = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
    let write = |ext: &str, content: String| {
        fs::write(out_dir.join(format!("{stem}.{ext}")), content).map_err(|e| failure(EXIT_INTERNAL, e.to_string()))
    };
    write("graph", out.graph_text())?;
    write("gens", out.gens_text())?;
    write("json", out.stats_text())
}
