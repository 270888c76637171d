use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qudit_phase::scenario::commands::{self, Options};
use qudit_phase::scenario::record::Format;
use qudit_phase::scenario::{exit, Split};

#[derive(Parser)]
#[command(
    name = "qudit-phase",
    version,
    about = "Phase traces of qudits under local unitary evolutions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file (or a preset name) and emit its trace
    Run {
        config: String,
        #[command(flatten)]
        common: Common,
    },
    /// Print a preset scenario as TOML; with --output, run it
    Figure {
        name: String,
        #[command(flatten)]
        common: Common,
    },
    /// Print the fractional phase values for two dimensions
    Lattice { d_a: usize, d_b: usize },
    /// Compare a scenario against its closed form and check invariants
    Verify {
        config: String,
        #[command(flatten)]
        common: Common,
    },
    /// Run every *.toml in a directory concurrently
    Batch {
        dir: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SplitArg {
    Half,
    AOnly,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long, value_enum, default_value = "a-only")]
    split: SplitArg,
}

impl From<Common> for Options {
    fn from(c: Common) -> Self {
        Options {
            output: c.output,
            format: match c.format {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            },
            steps: c.steps,
            tolerance: c.tolerance,
            split: match c.split {
                SplitArg::Half => Split::Half,
                SplitArg::AOnly => Split::AOnly,
            },
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                exit::CONFIG as u8
            } else {
                0
            });
        }
    };
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr();
    let result = match cli.command {
        Command::Run { config, common } => {
            commands::run(&config, &common.into(), &mut out, &mut err)
        }
        Command::Figure { name, common } => {
            commands::figure(&name, &common.into(), &mut out, &mut err)
        }
        Command::Lattice { d_a, d_b } => commands::lattice(d_a, d_b, &mut out),
        Command::Verify { config, common } => {
            commands::verify(&config, &common.into(), &mut out, &mut err)
        }
        Command::Batch { dir, common } => commands::batch(&dir, &common.into(), &mut out),
    };
    let code = match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
