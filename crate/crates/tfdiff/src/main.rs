use clap::Parser;
use tfdiff::config::{ConstantsConvention, ExampleId, GradingMode, OutputFormat, OutputSpec, RunConfig};
use tfdiff::driver::{emit, sweep, to_csv, to_json};

/// Time-fractional diffusion: L1/P1 solver with a posteriori error estimators.
#[derive(Parser, Debug)]
#[command(name = "tfdiff", version, about)]
struct Cli {
    /// Built-in experiment: 1 = smooth, 2 = nonsmooth (uniform), 3 = nonsmooth (graded)
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    example: Option<u8>,

    /// Fractional order(s); repeat the flag to sweep several
    #[arg(long = "alpha", num_args = 1.., default_values_t = vec![0.25, 0.5, 0.75])]
    alpha: Vec<f64>,

    /// Time-step count(s); repeat to sweep, doubling entries get orders
    #[arg(long = "N", num_args = 1.., default_values_t = vec![16, 32, 64, 128])]
    n: Vec<usize>,

    /// Spatial element count
    #[arg(long = "M", default_value_t = 512)]
    m: usize,

    /// Time grading: "uniform", "auto", or an explicit exponent r >= 1
    #[arg(long, default_value = "uniform")]
    grading: String,

    /// Angle parameter of the pointwise bounds, in radians
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
    theta: f64,

    /// Output format
    #[arg(long, value_enum, default_value_t = CliFormat::Csv)]
    format: CliFormat,

    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<String>,

    /// Read the run configuration from a JSON file instead of flags
    #[arg(long, conflicts_with_all = ["example", "alpha", "n", "m", "grading"])]
    config: Option<String>,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum CliFormat {
    Csv,
    Json,
}

fn parse_grading(s: &str) -> Result<GradingMode, String> {
    match s {
        "uniform" => Ok(GradingMode::Uniform),
        "auto" => Ok(GradingMode::Auto),
        other => other
            .parse::<f64>()
            .map(GradingMode::Explicit)
            .map_err(|_| format!("grading must be uniform, auto, or a number, got `{other}`")),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> tfdiff::Result<()> {
    let cfg = if let Some(path) = &cli.config {
        let doc = std::fs::read_to_string(path)?;
        RunConfig::from_json(&doc)?
    } else {
        let (example_id, grading) = match cli.example {
            Some(1) | None => (ExampleId::Smooth, parse_grading(&cli.grading)),
            Some(2) => (ExampleId::Nonsmooth, parse_grading(&cli.grading)),
            Some(3) => (ExampleId::Nonsmooth, Ok(GradingMode::Auto)),
            Some(_) => unreachable!("clap range"),
        };
        let grading_mode = grading.map_err(tfdiff::Error::InvalidConfig)?;
        let format = match cli.format {
            CliFormat::Csv => OutputFormat::Csv,
            CliFormat::Json => OutputFormat::Json,
        };
        RunConfig {
            example_id,
            alphas: cli.alpha.clone(),
            n_list: cli.n.clone(),
            m: cli.m,
            grading_mode,
            output: cli.out.clone().map(|path| OutputSpec { format, path }),
            constants_convention: ConstantsConvention::Unit,
            theta: cli.theta,
        }
    };

    let rows = sweep(&cfg)?;
    match &cfg.output {
        Some(spec) => {
            emit(&rows, spec.format, &spec.path)?;
            eprintln!("wrote {} rows to {}", rows.len(), spec.path);
        }
        None => {
            let format = cfg
                .output
                .as_ref()
                .map(|o| o.format)
                .unwrap_or(match cli.format {
                    CliFormat::Csv => OutputFormat::Csv,
                    CliFormat::Json => OutputFormat::Json,
                });
            let body = match format {
                OutputFormat::Csv => to_csv(&rows),
                OutputFormat::Json => to_json(&rows)?,
            };
            print!("{body}");
        }
    }
    Ok(())
}
