use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cecp::ranking::Metric;
use cecp::stats::Method;
use cecp::{Layout, MissingPolicy};
use cecp_cli::{cmd_analyze, cmd_correlate, cmd_envelope, cmd_shuffle_test, run_to_exit_code, Format, RunConfig};

#[derive(Parser)]
#[command(name = "cecp", version, about = "Complexity-entropy causality plane analysis of time series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plane points, efficiency ranking and group summaries.
    Analyze(Common),
    /// Maximum and minimum complexity curves.
    Envelope(Common),
    /// Original versus shuffled-surrogate plane points.
    ShuffleTest(Common),
    /// Rank correlations between quantifiers and series attributes.
    Correlate(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum LayoutArg {
    Wide,
    Long,
}

#[derive(Clone, Copy, ValueEnum)]
enum MissingArg {
    Drop,
    Fail,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Euclidean,
    EntropyOnly,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Spearman,
    Kendall,
}

#[derive(Args)]
struct Common {
    /// Input CSV file; repeat for several.
    #[arg(long, short)]
    input: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "wide")]
    layout: LayoutArg,
    #[arg(long, default_value = ",")]
    delimiter: char,
    #[arg(long, value_enum, default_value = "drop")]
    missing: MissingArg,
    /// Embedding dimensions, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "3,4,5")]
    dims: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    tau: usize,
    #[arg(long, default_value_t = 1)]
    shuffles: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV with `name,label` rows.
    #[arg(long)]
    groups: Option<PathBuf>,
    /// CSV with a `name` column followed by numeric attributes.
    #[arg(long)]
    attributes: Option<PathBuf>,
    #[arg(long, short, default_value = ".")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Envelope grid intervals along the entropy axis.
    #[arg(long, default_value_t = cecp::bounds::DEFAULT_RESOLUTION)]
    resolution: usize,
    /// Envelope state count, instead of D!.
    #[arg(long)]
    states: Option<usize>,
    #[arg(long, value_enum, default_value = "euclidean")]
    metric: MetricArg,
    #[arg(long, value_enum, default_value = "spearman")]
    method: MethodArg,
}

impl Common {
    fn into_config(self) -> Result<RunConfig, String> {
        if !self.delimiter.is_ascii() {
            return Err(format!("delimiter `{}` is not ASCII", self.delimiter));
        }
        Ok(RunConfig {
            inputs: self.input,
            layout: match self.layout {
                LayoutArg::Wide => Layout::Wide,
                LayoutArg::Long => Layout::Long,
            },
            delimiter: self.delimiter as u8,
            missing: match self.missing {
                MissingArg::Drop => MissingPolicy::Drop,
                MissingArg::Fail => MissingPolicy::Fail,
            },
            dims: self.dims,
            tau: self.tau,
            shuffles: self.shuffles,
            seed: self.seed,
            groups: self.groups,
            attributes: self.attributes,
            out: self.out,
            format: match self.format {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            },
            resolution: self.resolution,
            states: self.states,
            metric: match self.metric {
                MetricArg::Euclidean => Metric::Euclidean,
                MetricArg::EntropyOnly => Metric::EntropyOnly,
            },
            method: match self.method {
                MethodArg::Spearman => Method::Spearman,
                MethodArg::Kendall => Method::Kendall,
            },
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, run): (Common, fn(&RunConfig) -> anyhow::Result<cecp_cli::Outcome>) = match cli.command {
        Command::Analyze(c) => (c, cmd_analyze),
        Command::Envelope(c) => (c, cmd_envelope),
        Command::ShuffleTest(c) => (c, cmd_shuffle_test),
        Command::Correlate(c) => (c, cmd_correlate),
    };
    let code = match common.into_config() {
        Ok(config) => run_to_exit_code(|| run(&config)),
        Err(msg) => {
            eprintln!("error: {msg}");
            cecp_cli::EXIT_FATAL
        }
    };
    ExitCode::from(code as u8)
}
