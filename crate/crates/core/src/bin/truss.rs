use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use truss_core::bench::{
    batch_bench, clique_law, labelled_truss, stream_bench, verify_sweep, BatchAlgorithm,
    BatchBenchConfig, BenchReport, DatasetSource, StreamAlgorithm, StreamBenchConfig,
    VerifyConfig,
};
use truss_core::stream::{build_prefix, write_temporal_edges, Fraction, SyntheticModel};
use truss_core::{truss_decompose, TrussError, Variant};

#[derive(Parser)]
#[command(name = "truss", version, about = "Truss decomposition under streaming edge insertions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a whole edge list and print "u v K" per edge.
    Decompose(DecomposeArgs),
    /// Replay single-edge insertions after a prefix of the stream.
    StreamBench(StreamArgs),
    /// Insert batches after a prefix, batched and one edge at a time.
    BatchBench(BatchArgs),
    /// Fuzz insertions and check every step against a full recompute.
    Verify(VerifyArgs),
    /// Write a synthetic temporal edge list.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct Source {
    /// Temporal edge list: "SRC DST [TIMESTAMP]" per line, '#' comments.
    #[arg(long, conflicts_with = "synthetic")]
    input: Option<PathBuf>,
    /// uniform:N:P or preferential:N:M
    #[arg(long)]
    synthetic: Option<SyntheticModel>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Source {
    fn resolve(&self) -> Result<DatasetSource, TrussError> {
        match (&self.input, self.synthetic) {
            (Some(path), _) => Ok(DatasetSource::File(path.clone())),
            (None, Some(model)) => Ok(DatasetSource::Synthetic {
                model,
                seed: self.seed,
            }),
            (None, None) => Err(TrussError::InvalidParameter(
                "one of --input or --synthetic is required".into(),
            )),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct DecomposeArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Stdout format; also the report file format when it is csv.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Report file (JSON unless --format csv).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct StreamArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value = "0.05")]
    fraction: Fraction,
    /// Effective insertions to replay.
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// hcqty, jk-inc or non-incremental
    #[arg(long, default_value = "jk-inc")]
    algorithm: StreamAlgorithm,
    #[arg(long)]
    verify: bool,
    /// Also time a full recompute per insertion.
    #[arg(long)]
    baseline: bool,
    #[arg(long)]
    parallel_levels: bool,
    #[command(flatten)]
    out: ReportArgs,
}

#[derive(Args)]
struct BatchArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value = "0.05")]
    fraction: Fraction,
    #[arg(long, default_value_t = 100)]
    batch_size: usize,
    /// Consecutive batches.
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// jk-batch or jk-inc-sequential (both always run; this picks the headline time)
    #[arg(long, default_value = "jk-batch")]
    algorithm: BatchAlgorithm,
    #[arg(long)]
    verify: bool,
    /// Timed runs per batch; the fastest is kept.
    #[arg(long, default_value_t = 1)]
    repeat: usize,
    #[command(flatten)]
    out: ReportArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: Source,
    /// Prefix decomposed from scratch before fuzzing.
    #[arg(long, default_value = "0.5")]
    fraction: Fraction,
    /// Insertions to fuzz.
    #[arg(long, default_value_t = 300)]
    count: usize,
    /// Largest clique built edge by edge.
    #[arg(long, default_value_t = 10)]
    max_clique: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct GenerateArgs {
    /// uniform:N:P or preferential:N:M
    #[arg(long)]
    synthetic: SyntheticModel,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Verification,
}

impl From<TrussError> for Failure {
    fn from(e: TrussError) -> Failure {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Failure {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let outcome = match cli.command {
        Command::Decompose(a) => decompose(a),
        Command::StreamBench(a) => stream(a),
        Command::BatchBench(a) => batch(a),
        Command::Verify(a) => verify(a),
        Command::Generate(a) => generate(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(2),
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|source| {
            TrussError::Io {
                path: p.to_path_buf(),
                source,
            }
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn decompose(a: DecomposeArgs) -> Result<(), Failure> {
    let ds = a.source.resolve()?.load()?;
    let prefix = build_prefix(&ds, Fraction::whole());
    let st = truss_decompose(&prefix.graph);
    let rows = labelled_truss(&prefix.graph, &st, |v| ds.label(v));

    eprintln!(
        "{} vertices, {} edges, ktmax {}",
        ds.stats().vertex_count,
        prefix.graph.edge_count(),
        st.ktmax()
    );
    for (k, n) in st.histogram() {
        eprintln!("  K={k}: {n}");
    }

    let mut out = sink(a.output.as_deref())?;
    match a.format {
        Format::Text => {
            for (u, v, k) in &rows {
                writeln!(out, "{u} {v} {k}")?;
            }
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                ktmax: u32,
                histogram: std::collections::BTreeMap<u32, usize>,
                edges: &'a [(u64, u64, u32)],
            }
            let doc = Doc {
                ktmax: st.ktmax(),
                histogram: st.histogram(),
                edges: &rows,
            };
            serde_json::to_writer_pretty(&mut out, &doc).map_err(TrussError::from)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(["u", "v", "k"]).map_err(TrussError::from)?;
            for row in &rows {
                w.serialize(row).map_err(TrussError::from)?;
            }
            w.flush()?;
        }
    }
    out.flush()?;
    Ok(())
}

fn emit(report: &BenchReport, out: &ReportArgs) -> Result<(), Failure> {
    {
        let mut stdout = io::stdout().lock();
        match out.format {
            Format::Text => report.write_text(&mut stdout)?,
            Format::Json => writeln!(stdout, "{}", report.to_json()?)?,
            Format::Csv => report.write_csv(&mut stdout)?,
        }
    }
    if let Some(path) = &out.report {
        let mut w = sink(Some(path))?;
        if out.format == Format::Csv {
            report.write_csv(&mut w)?;
        } else {
            writeln!(w, "{}", report.to_json()?)?;
        }
        w.flush()?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn stream(a: StreamArgs) -> Result<(), Failure> {
    let source = a.source.resolve()?;
    let ds = source.load()?;
    let cfg = StreamBenchConfig {
        dataset: source.to_string(),
        fraction: a.fraction,
        count: a.count,
        algorithm: a.algorithm,
        verify: a.verify,
        baseline: a.baseline,
        parallel_levels: a.parallel_levels,
    };
    emit(&stream_bench(&ds, &cfg), &a.out)
}

fn batch(a: BatchArgs) -> Result<(), Failure> {
    let source = a.source.resolve()?;
    let ds = source.load()?;
    if a.batch_size == 0 {
        return Err(Failure::Usage("--batch-size must be positive".into()));
    }
    let cfg = BatchBenchConfig {
        dataset: source.to_string(),
        fraction: a.fraction,
        batch_size: a.batch_size,
        batches: a.count,
        algorithm: a.algorithm,
        verify: a.verify,
        repeats: a.repeat,
    };
    emit(&batch_bench(&ds, &cfg), &a.out)
}

fn verify(a: VerifyArgs) -> Result<(), Failure> {
    let source = a.source.resolve()?;
    let ds = source.load()?;
    let cfg = VerifyConfig {
        dataset: source.to_string(),
        fraction: a.fraction,
        insertions: a.count,
        seed: a.source.seed,
    };
    let report = verify_sweep(&ds, &cfg);
    let bad_cliques: Vec<u32> = (3..=a.max_clique)
        .filter(|&n| !(clique_law(n, Variant::JkInc) && clique_law(n, Variant::Hcqty)))
        .collect();

    let mut stdout = io::stdout().lock();
    match a.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                sweep: &'a truss_core::bench::VerifyReport,
                failed_cliques: &'a [u32],
            }
            let doc = Doc {
                sweep: &report,
                failed_cliques: &bad_cliques,
            };
            writeln!(stdout, "{}", serde_json::to_string_pretty(&doc).map_err(TrussError::from)?)?;
        }
        _ => {
            writeln!(
                stdout,
                "{} insertions, {} duplicates, {} levels checked ({} insertions over several levels)",
                report.insertions,
                report.duplicates_checked,
                report.levels_checked,
                report.multi_level_insertions
            )?;
            writeln!(
                stdout,
                "explored: hcqty {}, jk-inc {}",
                report.hcqty_explored, report.jk_explored
            )?;
            writeln!(stdout, "cliques 3..={}: {}", a.max_clique, if bad_cliques.is_empty() {
                "ok".to_string()
            } else {
                format!("failed for {bad_cliques:?}")
            })?;
        }
    }
    if let Some(cx) = &report.counterexample {
        eprint!("{cx}");
    }
    if report.passed() && bad_cliques.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn generate(a: GenerateArgs) -> Result<(), Failure> {
    let ds = truss_core::stream::generate_synthetic(a.synthetic, a.seed)?;
    let mut out = sink(a.output.as_deref())?;
    writeln!(out, "# {} seed {}", a.synthetic, a.seed)?;
    write_temporal_edges(&mut out, ds.events())?;
    Ok(())
}
