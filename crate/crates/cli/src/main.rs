//! `scc`: check, compile, graph and simulate SCC designs.

mod console;
mod simulate;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use scc_core::CheckedSpec;

#[derive(Parser)]
#[command(name = "scc", version, about = "Sense/Compute/Control design compiler and robot simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and check a design; print its diagnostics.
    Check { file: PathBuf },
    /// Check a design and generate its programming framework.
    Compile {
        file: PathBuf,
        /// Directory receiving `generated/` and `manifest.json`.
        #[arg(short, long)]
        out: PathBuf,
        /// Also write developer stubs here, leaving existing files alone.
        #[arg(long)]
        scaffold: Option<PathBuf>,
    },
    /// Write the component graph in DOT format.
    Graph {
        file: PathBuf,
        /// Output file; standard output if omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run the case-study robot on a map.
    Simulate(simulate::SimulateArgs),
}

/// A failed run: diagnostics exit with 1, everything else with 2.
#[derive(Debug)]
pub enum CliError {
    Diagnostics(Vec<String>),
    Usage(String),
}

impl CliError {
    pub fn io(path: &Path, e: impl fmt::Display) -> Self {
        CliError::Usage(format!("{}: {e}", path.display()))
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Diagnostics(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Diagnostics(lines) => {
                for l in lines {
                    writeln!(f, "{l}")?;
                }
                write!(f, "{} error(s)", lines.len())
            }
            CliError::Usage(m) => write!(f, "error: {m}"),
        }
    }
}

/// Reads, parses and checks `file`, printing warnings.
pub fn load(file: &Path) -> Result<CheckedSpec, CliError> {
    let text = fs::read_to_string(file).map_err(|e| CliError::io(file, e))?;
    let name = file.display().to_string();
    let spec = scc_core::parse(&text, &name)
        .map_err(|ds| CliError::Diagnostics(ds.iter().map(ToString::to_string).collect()))?;
    let checked = scc_core::check(&spec)
        .map_err(|vs| CliError::Diagnostics(vs.iter().map(ToString::to_string).collect()))?;
    for w in checked.warnings() {
        eprintln!("{w}");
    }
    Ok(checked)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Check { file } => {
            let checked = load(&file)?;
            println!(
                "{}: ok ({} components, {} connections)",
                file.display(),
                checked.graph().node_count(),
                checked.graph().edge_count()
            );
        }
        Command::Compile { file, out, scaffold } => {
            let checked = load(&file)?;
            let fw = scc_core::generate(&checked, &out).map_err(|e| CliError::Usage(e.to_string()))?;
            println!(
                "generated {} units and {} implementation points in {}",
                fw.units.len(),
                fw.manifest.len(),
                out.display()
            );
            if let Some(dir) = scaffold {
                let report =
                    scc_core::codegen::scaffold(&checked, &dir).map_err(|e| CliError::Usage(e.to_string()))?;
                for p in &report.skipped {
                    eprintln!("kept existing {}", p.display());
                }
                println!("scaffolded {} files in {}", report.written.len(), dir.display());
            }
        }
        Command::Graph { file, out } => {
            let dot = scc_core::export_graph(&load(&file)?);
            match out {
                Some(path) => fs::write(&path, dot).map_err(|e| CliError::io(&path, e))?,
                None => print!("{dot}"),
            }
        }
        Command::Simulate(args) => simulate::run(args)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
