use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use tvdehaze::dehaze::SolverConfig;
use tvdehaze::synth::{DepthKind, SynthSpec};
use tvdehaze_cli::{run, CliError, Mode, RunManifest};

/// Single-image dehazing by constrained total-variation optimization, with
/// a forward haze synthesizer and an evaluation harness.
#[derive(Parser, Debug)]
#[command(name = "tvdehaze", version)]
struct Cli {
    /// Input images (PNG, PPM or PGM). Synthesize mode generates a test
    /// pattern suite when no inputs are given.
    inputs: Vec<PathBuf>,

    #[arg(long, value_enum, default_value_t = ModeArg::Dehaze)]
    mode: ModeArg,

    /// Directory all outputs are written to.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,

    /// Ground-truth images paired with the inputs (evaluate mode).
    #[arg(long, num_args = 1..)]
    truth: Vec<PathBuf>,

    /// TV weight of the log-transmission subproblem.
    #[arg(long, default_value_t = 100.0)]
    alpha: f64,

    /// TV weight of the log-reflection subproblem.
    #[arg(long, default_value_t = 0.1)]
    beta: f64,

    /// Transmission floor used in radiance recovery.
    #[arg(long, default_value_t = 0.4)]
    t0: f64,

    /// Exponent of the final gamma correction.
    #[arg(long, default_value_t = 0.7)]
    gamma_correction: f64,

    /// Outer iteration cap.
    #[arg(long, default_value_t = 100)]
    n1: usize,

    /// Inner (dual) iteration cap.
    #[arg(long, default_value_t = 100)]
    n2: usize,

    /// Relative-change tolerance of the outer loop.
    #[arg(long, default_value_t = 0.1)]
    eps: f64,

    /// Per-channel atmospheric light: a number, or "auto" for
    /// max(channel) + c0.
    #[arg(long = "A", default_value = "255", value_parser = parse_atmospheric)]
    a: Atmospheric,

    /// Offset added to the channel maximum when the atmospheric light is
    /// estimated ("auto").
    #[arg(long, default_value_t = 0.0)]
    c0: f64,

    /// Diagnostic: run the solver without the box constraints.
    #[arg(long)]
    no_constraint: bool,

    /// Write per-channel transmission maps.
    #[arg(long)]
    emit_transmission: bool,

    /// Write per-channel depth/reflection field maps plus a sidecar with
    /// their encoding.
    #[arg(long)]
    emit_fields: bool,

    /// Write per-channel energy traces as CSV.
    #[arg(long)]
    emit_energy: bool,

    /// Depth map shape (synthesize mode).
    #[arg(long, value_enum, default_value_t = DepthKindArg::LinearVertical)]
    depth_kind: DepthKindArg,

    /// Scattering coefficient of the forward haze model.
    #[arg(long, default_value_t = 1.0)]
    beta_scatter: f64,

    /// Transmission at the nearest scene point (synthesize mode).
    #[arg(long, default_value_t = 0.9)]
    t_max: f64,

    /// Transmission at the farthest scene point (synthesize mode).
    #[arg(long, default_value_t = 0.3)]
    t_min: f64,

    /// Seed for generated test patterns (synthesize mode without inputs).
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Dehaze,
    Synthesize,
    Evaluate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DepthKindArg {
    LinearVertical,
    LinearHorizontal,
    Radial,
    Constant,
}

#[derive(Debug, Clone, Copy)]
enum Atmospheric {
    Auto,
    Fixed(f64),
}

fn parse_atmospheric(s: &str) -> Result<Atmospheric, String> {
    if s.eq_ignore_ascii_case("auto") {
        Ok(Atmospheric::Auto)
    } else {
        s.parse::<f64>()
            .map(Atmospheric::Fixed)
            .map_err(|_| format!("expected a number or \"auto\", got {s:?}"))
    }
}

fn build_manifest(cli: Cli) -> Result<RunManifest, CliError> {
    let config = SolverConfig {
        alpha: cli.alpha,
        beta_reg: cli.beta,
        lambda: 0.0,
        n1: cli.n1,
        n2: cli.n2,
        eps: cli.eps,
        t0: cli.t0,
        gamma_correction: cli.gamma_correction,
        c0: cli.c0,
        a_override: match cli.a {
            Atmospheric::Auto => None,
            Atmospheric::Fixed(v) => Some(v),
        },
        box_constraint: !cli.no_constraint,
    };

    let mode = match cli.mode {
        ModeArg::Dehaze => Mode::Dehaze,
        ModeArg::Synthesize => Mode::Synthesize,
        ModeArg::Evaluate => Mode::Evaluate,
    };

    let synth = if mode == Mode::Synthesize {
        if !(cli.t_min > 0.0 && cli.t_min <= cli.t_max && cli.t_max <= 1.0) {
            return Err(CliError::Config(format!(
                "transmission range must satisfy 0 < t-min <= t-max <= 1, got [{}, {}]",
                cli.t_min, cli.t_max
            )));
        }
        let (depth_min, depth_max) =
            SynthSpec::depth_range_for_transmission(cli.beta_scatter, cli.t_min, cli.t_max);
        Some(SynthSpec {
            depth_kind: match cli.depth_kind {
                DepthKindArg::LinearVertical => DepthKind::LinearVertical,
                DepthKindArg::LinearHorizontal => DepthKind::LinearHorizontal,
                DepthKindArg::Radial => DepthKind::Radial,
                DepthKindArg::Constant => DepthKind::Constant,
            },
            beta_scatter: cli.beta_scatter,
            depth_min,
            depth_max,
            a: 255.0,
        })
    } else {
        None
    };

    Ok(RunManifest {
        inputs: cli.inputs,
        truths: cli.truth,
        out_dir: cli.out_dir,
        mode,
        config,
        synth,
        emit_transmission: cli.emit_transmission,
        emit_fields: cli.emit_fields,
        emit_energy: cli.emit_energy,
        emit_metrics: mode == Mode::Evaluate,
        seed: cli.seed,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match build_manifest(cli).and_then(|manifest| run(&manifest)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
