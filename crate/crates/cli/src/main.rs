use clap::{Parser, Subcommand, ValueEnum};

use profdyn_cli::run::{
    analyze_command, orbit_command, AnalyzeOptions, OrbitOptions, OutputFormat,
};

/// Exact analysis of dynamics on finite-quotient towers.
#[derive(Parser)]
#[command(name = "profdyn", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a spec: measure preservation, ergodicity, the equivalence
    /// report, and optional metric/cylinder sections.
    Analyze {
        /// Spec string, e.g. `"zp 2 depth 8; poly [1,1]"`.
        spec: String,
        /// Also run the exhaustive isometry check against the tower metric.
        #[arg(long)]
        metric: bool,
        /// Replace the depth of every cyclic tower component.
        #[arg(long, value_name = "N")]
        depth_override: Option<usize>,
        /// Output format.
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Include exact word frequencies at this word length.
        #[arg(long, value_name = "W")]
        cylinders: Option<usize>,
    },
    /// Print an orbit as CSV rows "step,symbol".
    Orbit {
        /// Spec string, e.g. `"zp 2 depth 4; shift"`.
        spec: String,
        /// Starting element.
        #[arg(long)]
        x: u64,
        /// Level whose projections are emitted.
        #[arg(long)]
        level: usize,
        /// Number of symbols to emit.
        #[arg(long)]
        length: usize,
        /// Precision level of the starting element (default: tower depth).
        #[arg(long, value_name = "J")]
        input_level: Option<usize>,
        /// Replace the depth of every cyclic tower component.
        #[arg(long, value_name = "N")]
        depth_override: Option<usize>,
    },
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze {
            spec,
            metric,
            depth_override,
            format,
            cylinders,
        } => analyze_command(
            &spec,
            &AnalyzeOptions {
                metric,
                depth_override,
                format: match format {
                    Format::Json => OutputFormat::Json,
                    Format::Text => OutputFormat::Text,
                },
                cylinders,
            },
        ),
        Command::Orbit {
            spec,
            x,
            level,
            length,
            input_level,
            depth_override,
        } => orbit_command(
            &spec,
            &OrbitOptions {
                x,
                level,
                length,
                input_level,
                depth_override,
            },
        ),
    };
    match result {
        Ok(output) => {
            println!("{}", output.trim_end_matches('\n'));
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
