use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stream_bench::{
    generate_stream, read_stream, render_report, run_bench, write_stream, BenchError, DeltaMode,
    Engine, KeyDistribution, ReportFormat, StreamSpec,
};
use wordsketch::{KernelKind, SketchConfig, UpdateRecord};

/// Generate turnstile streams and compare sketch update engines by counted steps.
#[derive(Parser)]
#[command(name = "stream-bench", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a synthetic stream file (16-byte little-endian records).
    Gen {
        #[command(flatten)]
        stream: StreamArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run engines over a stream and emit a report.
    Run(RunArgs),
    /// Check that the engines end with identical counters.
    Verify(RunArgs),
}

#[derive(Args)]
struct StreamArgs {
    /// Universe size.
    #[arg(long, default_value_t = 1 << 20)]
    n: u64,
    #[arg(long, default_value_t = 100_000)]
    len: usize,
    /// uniform, zipf:S or planted:H:MASS.
    #[arg(long, default_value = "uniform")]
    dist: KeyDistribution,
    /// nonneg, signed or insert-delete.
    #[arg(long, default_value = "signed")]
    delta: DeltaMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    stream: StreamArgs,
    /// Read the stream from a file instead of generating it.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 2)]
    c: usize,
    #[arg(long = "T", default_value_t = 64)]
    t: usize,
    /// Buffer size; defaults to W unless --theta is given.
    #[arg(long = "B", conflicts_with = "theta")]
    b: Option<usize>,
    /// Buffer size W^theta.
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long = "W", default_value_t = 64)]
    w: u32,
    #[arg(long, default_value_t = KernelKind::default())]
    kernel: KernelKind,
    /// Sketch seed; defaults to the stream seed.
    #[arg(long)]
    sketch_seed: Option<u64>,
    /// Engines to run, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = Engine::ALL)]
    engine: Vec<Engine>,
    /// Updates between periodic point queries; 0 disables them.
    #[arg(long, default_value_t = 1000)]
    query_every: usize,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: ReportFormat,
}

impl StreamArgs {
    fn spec(&self) -> StreamSpec {
        StreamSpec::new(self.n, self.len, self.dist, self.seed).with_delta_mode(self.delta)
    }
}

impl RunArgs {
    fn config(&self) -> Result<SketchConfig, BenchError> {
        let b = match (self.b, self.theta) {
            (Some(b), _) => b,
            (None, Some(theta)) => SketchConfig::buffer_for_theta(self.w, self.t, theta),
            (None, None) => self.w as usize,
        };
        let cfg = SketchConfig::new(
            self.k,
            self.c,
            self.t,
            b,
            self.sketch_seed.unwrap_or(self.stream.seed),
        )
        .with_width(self.w)
        .with_kernel(self.kernel);
        cfg.validate()?;
        Ok(cfg)
    }

    fn stream(&self) -> Result<Vec<UpdateRecord>, BenchError> {
        match &self.input {
            Some(path) => read_stream(BufReader::new(File::open(path)?)),
            None => generate_stream(&self.stream.spec()),
        }
    }
}

/// Exit codes: 0 counters match, 1 mismatch, 2 usage or input error.
fn execute(cmd: Cmd) -> Result<bool, BenchError> {
    match cmd {
        Cmd::Gen { stream, out } => {
            let records = generate_stream(&stream.spec())?;
            let mut w = BufWriter::new(File::create(&out)?);
            write_stream(&mut w, &records)?;
            w.flush()?;
            Ok(true)
        }
        Cmd::Run(args) => {
            let report = run_bench(
                &args.stream()?,
                &args.config()?,
                &args.engine,
                args.query_every,
            )?;
            let text = render_report(&report, args.format)?;
            match &args.out {
                Some(path) => std::fs::write(path, text)?,
                None => print!("{text}"),
            }
            Ok(report.counters_match)
        }
        Cmd::Verify(args) => {
            let report = run_bench(
                &args.stream()?,
                &args.config()?,
                &args.engine,
                args.query_every,
            )?;
            if let Some(path) = &args.out {
                std::fs::write(path, render_report(&report, args.format)?)?;
            }
            let engines: Vec<&str> = report.engines.iter().map(|e| e.engine.name()).collect();
            let verdict = if report.counters_match {
                "match"
            } else {
                "mismatch"
            };
            println!(
                "{verdict}: {} updates, engines {}",
                report.stream_length,
                engines.join(",")
            );
            Ok(report.counters_match)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("stream-bench: {e}");
            ExitCode::from(2)
        }
    }
}
