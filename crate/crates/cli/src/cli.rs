use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use biharmonic_core::assembly::assemble;
use biharmonic_core::cases::SinSquaredCase;
use biharmonic_core::harness::StudyPlan;
use biharmonic_core::time::{report_counts, SchemeKind};
use clap::{Parser, Subcommand, ValueEnum};

use crate::config::ScenarioConfig;
use crate::scenario::run_scenario;
use crate::study::{format_table, run_converge, write_eoc_csv};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "biharmonic", version, about = "Space-time finite elements for the biharmonic wave equation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convergence study on a manufactured solution.
    Converge {
        #[arg(long, value_parser = parse_scheme)]
        scheme: SchemeKind,
        /// Number of levels; level j uses τ₀/2ʲ and (n₀ 2ʲ)² cells.
        #[arg(long, default_value_t = 4)]
        levels: usize,
        #[arg(long, value_enum, default_value_t = Case::Fct2)]
        case: Case,
        #[arg(long, default_value_t = 0.1)]
        tau0: f64,
        #[arg(long, default_value_t = 5)]
        cells0: usize,
        /// Directory for `eoc_<scheme>.csv`; the table is always printed.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs a scenario file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Prints the size of the per-step system for every scheme.
    Info {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Case {
    /// u = sin(2πt) sin²(πx) sin²(πy) on the unit square, T = 1.
    Fct2,
}

fn parse_scheme(s: &str) -> Result<SchemeKind, String> {
    s.parse().map_err(|e: biharmonic_core::Error| e.to_string())
}

pub fn main<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let stdout = std::io::stdout();
    match execute(&cli.command, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn execute(command: &Command, out: &mut dyn Write) -> Result<(), CliError> {
    let print = |out: &mut dyn Write, text: &str| out.write_all(text.as_bytes()).map_err(|e| CliError::Output(e.to_string()));
    match command {
        Command::Converge { scheme, levels, case: Case::Fct2, tau0, cells0, out: dir } => {
            if *levels == 0 || *cells0 == 0 || !(*tau0 > 0.0) {
                return Err(CliError::Input("levels, cells0 and tau0 must be positive".into()));
            }
            let plan = StudyPlan { tau0: *tau0, cells0: *cells0, levels: *levels };
            let table = run_converge(*scheme, &SinSquaredCase::default(), &plan)?;
            if let Some(dir) = dir {
                std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
                let path = dir.join(format!("eoc_{scheme}.csv"));
                let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
                write_eoc_csv(BufWriter::new(file), &table).map_err(|e| CliError::Output(e.to_string()))?;
            }
            print(out, &format_table(&table))
        }
        Command::Run { config, out: dir } => {
            let config = ScenarioConfig::load(config)?;
            let run = run_scenario(&config)?;
            for path in run.write(&config, dir)? {
                print(out, &format!("wrote {}\n", path.display()))?;
            }
            Ok(())
        }
        Command::Info { config } => {
            let config = ScenarioConfig::load(config)?;
            let mesh = config.mesh()?;
            let ops = assemble(&mesh, &config.coefficient_field())?;
            print(out, &format!("cells: {}\n", mesh.num_cells()))?;
            for scheme in SchemeKind::ALL {
                let c = report_counts(&ops, scheme)?;
                print(out, &format!("{scheme}: {} dof ({} free), nnz {}\n", c.dof_total, c.dof_free, c.nnz))?;
            }
            Ok(())
        }
    }
}
