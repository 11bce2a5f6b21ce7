use std::fs::{self, File};
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use bosonsim::harness::{
    cmd_exact, cmd_permanent, cmd_sample, cmd_validate, run_bench, Algorithm, BenchConfig, Kernel,
    RunConfig,
};
use bosonsim::photonics::CircuitSpec;
use bosonsim::Result;
use clap::{Args, Parser, Subcommand};

/// Boson sampling simulator.
#[derive(Parser)]
#[command(name = "bosonsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw samples and write them as JSON lines.
    Sample(RunArgs),
    /// Write the exact output distribution as CSV.
    Exact(RunArgs),
    /// Compare sampled frequencies with the reference distribution.
    /// Exits with status 1 when the total variation distance is too large.
    Validate(RunArgs),
    /// Evaluate a permanent with one or all kernels.
    Permanent {
        /// Matrix file: `rows cols` then row-major `re im` pairs. Reads
        /// stdin when omitted.
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// naive, glynn or tree. All applicable kernels are compared when
        /// omitted.
        #[arg(long)]
        kernel: Option<Kernel>,
    },
    /// Time the shallow sampler against CC-C with `m = n²`.
    Bench(BenchArgs),
}

#[derive(Args)]
struct RunArgs {
    /// cc-a, cc-b, cc-c, shallow or uniform.
    #[arg(long, default_value = "cc-c")]
    algorithm: Algorithm,
    #[arg(long, default_value_t = 7)]
    m: usize,
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Use a random layered circuit of this depth instead of a Haar unitary.
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long, default_value_t = 200_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Circuit description in JSON. Overrides --m and --depth.
    #[arg(long)]
    circuit: Option<PathBuf>,
    /// Pass threshold on the total variation distance.
    #[arg(long, default_value_t = 0.03)]
    threshold: f64,
    /// Output file, stdout by default.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 2)]
    depth: usize,
    /// Photon numbers for the shallow sampler, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "4,5,6,7,8,9,10,11,12,13,14,15,16"
    )]
    shallow_ns: Vec<usize>,
    /// Photon numbers for CC-C, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "10,11,12,13,14,15,16,17,18,19,20,21,22"
    )]
    cc_c_ns: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    min_samples: usize,
    #[arg(long, default_value_t = 0.02)]
    min_seconds: f64,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output file, stdout by default.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig> {
        let circuit = match &self.circuit {
            Some(path) => Some(CircuitSpec::from_json(&fs::read_to_string(path)?)?),
            None => None,
        };
        Ok(RunConfig {
            algorithm: self.algorithm,
            m: self.m,
            n: self.n,
            depth: self.depth,
            samples: self.samples,
            seed: self.seed,
            circuit,
            threshold: self.threshold,
        })
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Sample(args) => {
            let mut out = output(&args.out)?;
            cmd_sample(&args.config()?, &mut out)?;
            out.flush()?;
        }
        Command::Exact(args) => {
            let mut out = output(&args.out)?;
            cmd_exact(&args.config()?, &mut out)?;
            out.flush()?;
        }
        Command::Validate(args) => {
            let report = cmd_validate(&args.config()?)?;
            let mut out = output(&args.out)?;
            writeln!(out, "{}", report.to_json())?;
            out.flush()?;
            eprintln!(
                "{}: tvd {:.5} (threshold {}) {}",
                report.algorithm,
                report.tvd,
                report.threshold,
                if report.pass { "PASS" } else { "FAIL" }
            );
            return Ok(report.pass);
        }
        Command::Permanent { matrix, kernel } => {
            let text = match matrix {
                Some(p) => fs::read_to_string(p)?,
                None => {
                    let mut s = String::new();
                    io::stdin().read_to_string(&mut s)?;
                    s
                }
            };
            print!("{}", cmd_permanent(&text, kernel)?.render());
        }
        Command::Bench(args) => {
            let cfg = BenchConfig {
                depth: args.depth,
                shallow_ns: args.shallow_ns,
                cc_c_ns: args.cc_c_ns,
                min_samples: args.min_samples,
                min_seconds: args.min_seconds,
                repeats: args.repeats,
                seed: args.seed,
            };
            let report = run_bench(&cfg)?;
            let mut out = output(&args.out)?;
            out.write_all(report.to_csv().as_bytes())?;
            out.flush()?;
            eprint!("{}", report.summary());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
