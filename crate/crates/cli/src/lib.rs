//! Command-line front end for `median-core`.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use median_core::testkit::{
    brute_ecc, brute_median_set, djokovic_partition, generate, oracle_limit, verify_structure, GeneratorSpec,
};
use median_core::{
    bfs_distances, build_oracle, compute_theta_classes, halfspace_sizes_all, label_size_bits, median_set, morse,
    query, Graph, LabelTable, Validation, VertexWeights,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Header row of the `bench` CSV output.
pub const BENCH_HEADER: &str = "n,m,t_morse_ms,t_brute_ms_or_NA,t_build_ms,t_query_us_mean,max_label_bits";

/// `oracle verify` checks every pair up to this many vertices and samples above.
pub const EXHAUSTIVE_PAIRS_LIMIT: usize = 512;

const FORMATS: &str = "\
FILE FORMATS:
  graph    line 1 \"n m\", then m lines \"u v\" with 0 <= u < v < n, sorted,
           single spaces, LF line endings. The graph must be a connected
           median graph.
  weights  n lines, line i holds the nonnegative integer weight of vertex i
           (at most 2^40).
  labels   header \"MEDDO 1 n\", then for every vertex a line \"vid k\"
           followed by k record lines:
             B sub cls side gate dist
             U sub center dist Lsize c1..cL Tcount (c gate dist)*
             C sub
             L sub partner|-

GENERATOR SPECS:
  path:10  tree:n=100,seed=3  grid:4x6  hypercube:5
  closure:k=10,p=40,seed=7  product:A*B

EXIT CODES:
  0 ok, 1 verification mismatch, 2 usage or I/O error, 3 invalid input";

#[derive(Debug, Parser)]
#[command(name = "median", version, about = "Eccentricities and distance labels for median graphs", after_help = FORMATS)]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a median graph from a spec string.
    Gen {
        spec: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print "class_id size sizeH1 sizeH2" for every Theta-class.
    Theta { graph: PathBuf },
    /// Print the median set, one vertex per line.
    Median { graph: PathBuf },
    /// Print "vertex eccentricity" for every vertex.
    Ecc {
        graph: PathBuf,
        #[arg(short, long)]
        weights: Option<PathBuf>,
        /// Cross-check against brute force.
        #[arg(long)]
        verify: bool,
    },
    /// Build, query or verify distance labels.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Check that a graph is median and its Theta-classes are well formed.
    Verify { graph: PathBuf },
    /// Time the algorithms on a family and print CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    Build {
        graph: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    Query { labels: PathBuf, u: usize, v: usize },
    Verify {
        graph: PathBuf,
        labels: PathBuf,
        /// Pairs to sample on graphs above 512 vertices.
        #[arg(long, default_value_t = 100_000)]
        pairs: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Path,
    Tree,
    /// Square grids; size is the side length.
    Grid,
    /// Size is the dimension.
    Hypercube,
    /// Closures in a 16-cube; size is the number of points.
    Closure,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    pub family: Family,
    /// Comma-separated sizes.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Vec<usize>,
    /// Random queries timed per size.
    #[arg(long, default_value_t = 1000)]
    pub queries: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{context}: {source}")]
    Input {
        context: String,
        source: median_core::Error,
    },
    #[error("writing output: {0}")]
    Output(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input { .. } => 3,
            _ => 2,
        }
    }
}

/// Result of a successful run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Mismatch,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Mismatch => 1,
        }
    }
}

pub fn parse_args<I, T>(argv: I) -> Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    Cli::try_parse_from(argv)
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn input<T>(context: &Path, r: median_core::Result<T>) -> Result<T, CliError> {
    r.map_err(|source| CliError::Input {
        context: context.display().to_string(),
        source,
    })
}

pub fn load_graph(path: &Path) -> Result<Graph, CliError> {
    let g = input(path, Graph::parse(&read(path)?, Validation::Check))?;
    if let Some(w) = g.sparsity_warning() {
        log::warn!("{}: {w}", path.display());
    }
    Ok(g)
}

fn load_weights(path: Option<&Path>, g: &Graph) -> Result<VertexWeights, CliError> {
    match path {
        None => Ok(VertexWeights::zeros(g.n())),
        Some(p) => input(p, VertexWeights::parse(&read(p)?).and_then(|w| w.for_graph(g))),
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<Status, CliError> {
    match &cli.command {
        Command::Gen { spec, output } => {
            let parsed: GeneratorSpec = spec.parse().map_err(|e: median_core::Error| CliError::Usage(e.to_string()))?;
            let g = input(Path::new(spec), generate(&parsed))?;
            match output {
                Some(p) => write_file(p, &g.to_text())?,
                None => out.write_all(g.to_text().as_bytes())?,
            }
            Ok(Status::Ok)
        }
        Command::Theta { graph } => {
            let g = load_graph(graph)?;
            let t = input(graph, compute_theta_classes(&g))?;
            let sizes = input(graph, halfspace_sizes_all(&g, &t))?;
            for i in 0..t.q() {
                let (a, b) = sizes.get(i);
                writeln!(out, "{i} {} {a} {b}", t.class_size(i))?;
            }
            Ok(Status::Ok)
        }
        Command::Median { graph } => {
            let g = load_graph(graph)?;
            let t = input(graph, compute_theta_classes(&g))?;
            let sizes = input(graph, halfspace_sizes_all(&g, &t))?;
            for v in median_set(&g, &t, &sizes) {
                writeln!(out, "{v}")?;
            }
            Ok(Status::Ok)
        }
        Command::Ecc { graph, weights, verify } => {
            let g = load_graph(graph)?;
            let w = load_weights(weights.as_deref(), &g)?;
            let ecc = input(graph, morse(&g, &w))?;
            for (v, e) in ecc.iter().enumerate() {
                writeln!(out, "{v} {e}")?;
            }
            if *verify {
                let expected = input(graph, brute_ecc(&g, &w))?;
                if let Some(v) = (0..g.n()).find(|&v| ecc[v] != expected[v]) {
                    log::error!("vertex {v}: computed {} but brute force gives {}", ecc[v], expected[v]);
                    return Ok(Status::Mismatch);
                }
            }
            Ok(Status::Ok)
        }
        Command::Oracle(OracleCommand::Build { graph, output }) => {
            let g = load_graph(graph)?;
            let table = input(graph, build_oracle(&g))?;
            write_file(output, &table.to_text())?;
            Ok(Status::Ok)
        }
        Command::Oracle(OracleCommand::Query { labels, u, v }) => {
            let table = input(labels, LabelTable::parse(&read(labels)?))?;
            let d = query(&table, *u, *v).map_err(|e| CliError::Usage(e.to_string()))?;
            writeln!(out, "{d}")?;
            Ok(Status::Ok)
        }
        Command::Oracle(OracleCommand::Verify { graph, labels, pairs }) => {
            let g = load_graph(graph)?;
            let table = input(labels, LabelTable::parse(&read(labels)?))?;
            Ok(verify_labels(&g, &table, *pairs, cli.seed, out)?)
        }
        Command::Verify { graph } => {
            let g = load_graph(graph)?;
            verify_graph(graph, &g, out)
        }
        Command::Bench(args) => {
            let csv = run_bench(args.family, &args.sizes, args.queries, cli.seed);
            match &args.output {
                Some(p) => write_file(p, &csv)?,
                None => out.write_all(csv.as_bytes())?,
            }
            Ok(Status::Ok)
        }
    }
}

fn verify_labels(g: &Graph, table: &LabelTable, pairs: usize, seed: u64, out: &mut dyn Write) -> io::Result<Status> {
    if table.n() != g.n() {
        writeln!(out, "label table has {} vertices, graph has {}", table.n(), g.n())?;
        return Ok(Status::Mismatch);
    }
    let n = g.n();
    let mut checked = 0usize;
    let mut check = |u: usize, dist: &[u32], v: usize, out: &mut dyn Write| -> io::Result<bool> {
        checked += 1;
        match query(table, u, v) {
            Ok(d) if d == dist[v] as u64 => Ok(true),
            Ok(d) => {
                writeln!(out, "mismatch: d({u},{v}) = {} but labels give {d}", dist[v])?;
                Ok(false)
            }
            Err(e) => {
                writeln!(out, "mismatch: query ({u},{v}) failed: {e}")?;
                Ok(false)
            }
        }
    };
    let mut ok = true;
    if n <= EXHAUSTIVE_PAIRS_LIMIT {
        for u in 0..n {
            let dist = bfs_distances(g, u).expect("vertex in range");
            for v in 0..n {
                ok &= check(u, &dist, v, out)?;
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sources = pairs.div_ceil(1000).max(1);
        let mut left = pairs;
        for s in 0..sources {
            let u = rng.gen_range(0..n);
            let dist = bfs_distances(g, u).expect("vertex in range");
            let take = left / (sources - s);
            left -= take;
            for _ in 0..take {
                let v = rng.gen_range(0..n);
                ok &= check(u, &dist, v, out)?;
            }
        }
    }
    writeln!(out, "{checked} pairs checked")?;
    Ok(if ok { Status::Ok } else { Status::Mismatch })
}

fn verify_graph(path: &Path, g: &Graph, out: &mut dyn Write) -> Result<Status, CliError> {
    let t = input(path, compute_theta_classes(g))?;
    let mut problems = Vec::new();
    match djokovic_partition(g) {
        Ok(labels) if labels.as_slice() != t.class_of_edges() => {
            problems.push("Theta-classes differ from the Djokovic relation".to_string())
        }
        Ok(_) => writeln!(out, "Djokovic partition: match")?,
        Err(e) => writeln!(out, "Djokovic partition: skipped ({e})")?,
    }
    let report = verify_structure(g, &t);
    writeln!(
        out,
        "{} classes checked, convexity {}, {} median triples checked",
        report.classes_checked,
        if report.convexity_checked { "checked" } else { "skipped" },
        report.triples_checked
    )?;
    problems.extend(report.violations);
    let sizes = input(path, halfspace_sizes_all(g, &t))?;
    match brute_median_set(g) {
        Ok(m) if m != median_set(g, &t, &sizes) => problems.push("median set differs from brute force".into()),
        Ok(_) => writeln!(out, "median set: match")?,
        Err(e) => writeln!(out, "median set: skipped ({e})")?,
    }
    for p in &problems {
        writeln!(out, "violation: {p}")?;
    }
    Ok(if problems.is_empty() { Status::Ok } else { Status::Mismatch })
}

fn bench_graph(family: Family, size: usize, seed: u64) -> median_core::Result<Graph> {
    let spec = match family {
        Family::Path => GeneratorSpec::Path(size),
        Family::Tree => GeneratorSpec::Tree { n: size, seed },
        Family::Grid => GeneratorSpec::Grid(vec![size, size]),
        Family::Hypercube => GeneratorSpec::Hypercube(size),
        Family::Closure => GeneratorSpec::Closure {
            k: 16,
            points: size,
            seed,
        },
    };
    generate(&spec)
}

fn millis(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// One CSV row per size. Sizes that fail to generate are skipped with a warning.
pub fn run_bench(family: Family, sizes: &[usize], queries: usize, seed: u64) -> String {
    let mut csv = format!("{BENCH_HEADER}\n");
    for &size in sizes {
        let g = match bench_graph(family, size, seed) {
            Ok(g) => g,
            Err(e) => {
                log::warn!("skipping size {size}: {e}");
                continue;
            }
        };
        let w = VertexWeights::zeros(g.n());
        let start = Instant::now();
        let ecc = morse(&g, &w).expect("generated graphs are median");
        let t_morse = millis(start);
        let t_brute = if g.n() <= oracle_limit() {
            let start = Instant::now();
            let expected = brute_ecc(&g, &w).expect("within guard");
            assert_eq!(ecc, expected, "morse disagrees with brute force on {family:?} size {size}");
            format!("{:.3}", millis(start))
        } else {
            "NA".to_string()
        };
        let start = Instant::now();
        let table = build_oracle(&g).expect("generated graphs are median");
        let t_build = millis(start);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pairs: Vec<(usize, usize)> = (0..queries)
            .map(|_| (rng.gen_range(0..g.n()), rng.gen_range(0..g.n())))
            .collect();
        let start = Instant::now();
        for &(u, v) in &pairs {
            std::hint::black_box(query(&table, u, v).expect("vertices in range"));
        }
        let t_query = if pairs.is_empty() {
            0.0
        } else {
            start.elapsed().as_secs_f64() * 1e6 / pairs.len() as f64
        };
        let (max_bits, _) = label_size_bits(&table);
        csv.push_str(&format!(
            "{},{},{t_morse:.3},{t_brute},{t_build:.3},{t_query:.3},{max_bits}\n",
            g.n(),
            g.m()
        ));
    }
    csv
}
