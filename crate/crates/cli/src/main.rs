use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use cclm::report::{self, ReportConfig, Sequence};
use cclm::synth::{self, Ar1Params};
use cclm::{read_frame, write_frame, CsvTable, DerivationMethod, PredictionMode, YuvSpec};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "cclm",
    version,
    about = "Cross-component linear model analysis on raw 4:2:0 video"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Per-block model parameters and prediction SSE.
    Derive(AnalysisArgs),
    /// Mean correlation change under reference sub-sampling.
    Correlation(AnalysisArgs),
    /// Static operation counts and reductions against Max-Min.
    Complexity(ComplexityArgs),
    /// Parameter deviation of Max-Min and sub-sampled models from least squares.
    Sensitivity(AnalysisArgs),
    /// Write a synthetic raw 4:2:0 sequence.
    Synth(SynthArgs),
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Raw planar 4:2:0 file (little-endian above 8 bits).
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    width: usize,
    #[arg(long)]
    height: usize,
    #[arg(long, default_value_t = 8)]
    bit_depth: u8,
    /// Frames to read; defaults to every whole frame in the file.
    #[arg(long)]
    frames: Option<usize>,
}

#[derive(Args, Debug)]
struct AnalysisArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Square chroma block sizes.
    #[arg(long, value_delimiter = ',', default_values_t = [4usize, 8, 16, 32])]
    block_sizes: Vec<usize>,
    /// LM, LM-Above, LM-Left.
    #[arg(long, value_delimiter = ',', value_parser = parse_mode)]
    modes: Vec<PredictionMode>,
    /// LSR, MaxMin, Subsampled4.
    #[arg(long, value_delimiter = ',', value_parser = parse_method)]
    methods: Vec<DerivationMethod>,
    /// Largest sub-sampling exponent for the correlation sweep.
    #[arg(long, default_value_t = 5)]
    s_max: u32,
    /// Directory for the CSV report; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ComplexityArgs {
    /// Reference pair counts.
    #[arg(long = "pairs", value_delimiter = ',', default_values_t = [64u64])]
    pairs: Vec<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SynthKind {
    Constant,
    Linear,
    Ar1,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long, value_enum, default_value_t = SynthKind::Linear)]
    kind: SynthKind,
    #[arg(long, default_value_t = 64)]
    width: usize,
    #[arg(long, default_value_t = 64)]
    height: usize,
    #[arg(long, default_value_t = 8)]
    bit_depth: u8,
    #[arg(long, default_value_t = 1)]
    frames: usize,
    /// Seed of the first frame; frame k uses seed + k.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.9)]
    rho_x: f64,
    #[arg(long, default_value_t = 0.9)]
    rho_y: f64,
    /// Output .yuv file.
    #[arg(long)]
    out: PathBuf,
}

fn parse_mode(s: &str) -> Result<PredictionMode, String> {
    s.parse().map_err(|e: cclm::Error| e.to_string())
}

fn parse_method(s: &str) -> Result<DerivationMethod, String> {
    s.parse().map_err(|e: cclm::Error| e.to_string())
}

fn load(args: &InputArgs) -> anyhow::Result<Sequence> {
    let path = &args.input;
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let len = file
        .metadata()
        .with_context(|| format!("cannot stat {}", path.display()))?
        .len();
    let count = match args.frames {
        Some(n) => n,
        None => YuvSpec::frames_in(args.width, args.height, args.bit_depth, len),
    };
    if count == 0 {
        return Err(cclm::Error::TruncatedFile {
            needed: YuvSpec::new(args.width, args.height, args.bit_depth, 1)?.frame_size() as u64,
            available: len,
        })
        .with_context(|| format!("{} holds no whole frame", path.display()));
    }
    let spec = YuvSpec::new(args.width, args.height, args.bit_depth, count)?;
    let mut reader = BufReader::new(file);
    let frames = (0..count)
        .map(|i| read_frame(&mut reader, &spec, i))
        .collect::<Result<Vec<_>, _>>()
        .with_context(|| format!("reading {}", path.display()))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(Sequence { name, frames })
}

fn config(args: &AnalysisArgs) -> ReportConfig {
    let mut cfg = ReportConfig {
        block_sizes: args.block_sizes.clone(),
        s_max: args.s_max,
        ..ReportConfig::default()
    };
    if !args.modes.is_empty() {
        cfg.modes = args.modes.clone();
    }
    if !args.methods.is_empty() {
        cfg.methods = args.methods.clone();
    }
    cfg
}

fn emit(tables: &[(&str, &CsvTable)], out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .with_context(|| format!("cannot create {}", dir.display()))?;
            for (name, table) in tables {
                let path = dir.join(format!("{name}.csv"));
                std::fs::write(&path, table.to_bytes()?)
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
        }
        None => {
            let mut stdout = io::stdout().lock();
            for (i, (_, table)) in tables.iter().enumerate() {
                if i > 0 {
                    stdout.write_all(b"\n")?;
                }
                stdout.write_all(&table.to_bytes()?)?;
            }
            stdout.flush()?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Derive(a) => {
            let cfg = config(&a);
            cfg.validate()?;
            let t = report::derive_report(&load(&a.input)?, &cfg)?;
            emit(&[("derive", &t)], a.out.as_deref())
        }
        Command::Correlation(a) => {
            let cfg = config(&a);
            cfg.validate()?;
            let t = report::correlation_report(&load(&a.input)?, &cfg)?;
            emit(&[("correlation", &t)], a.out.as_deref())
        }
        Command::Sensitivity(a) => {
            let cfg = config(&a);
            cfg.validate()?;
            let r = report::sensitivity_report(&load(&a.input)?, &cfg)?;
            emit(
                &[
                    ("sensitivity", &r.records),
                    ("sensitivity_summary", &r.summary),
                ],
                a.out.as_deref(),
            )
        }
        Command::Complexity(a) => {
            let t = report::complexity_report(&a.pairs)?;
            emit(&[("complexity", &t)], a.out.as_deref())
        }
        Command::Synth(a) => synth_cmd(&a),
    }
}

fn synth_cmd(a: &SynthArgs) -> anyhow::Result<()> {
    if a.frames == 0 {
        bail!(cclm::Error::InvalidArgument(
            "frames must be at least 1".into()
        ));
    }
    let params = Ar1Params {
        rho_x: a.rho_x,
        rho_y: a.rho_y,
        ..Ar1Params::default()
    };
    let mid = 1u16 << (a.bit_depth.saturating_sub(1));
    let mut bytes = Vec::new();
    for k in 0..a.frames {
        let frame = match a.kind {
            SynthKind::Constant => synth::constant(a.width, a.height, a.bit_depth, mid, mid, mid)?,
            SynthKind::Linear => synth::exact_linear(a.width, a.height, a.bit_depth)?,
            SynthKind::Ar1 => synth::ar1(
                a.width,
                a.height,
                a.bit_depth,
                params,
                a.seed.wrapping_add(k as u64),
            )?,
        };
        write_frame(&frame, &mut bytes)?;
    }
    std::fs::write(&a.out, bytes).with_context(|| format!("cannot write {}", a.out.display()))?;
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<io::Error>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<cclm::Error>() {
            return if e.is_io() { 2 } else { 1 };
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
