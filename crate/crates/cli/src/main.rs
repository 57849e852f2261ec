//! Command-line driver: single runs of the manufactured problem, convergence
//! studies and mesh inspection.

mod commands;
mod config;
mod error;

use clap::{Parser, Subcommand};
use config::{MeshSpec, Overrides, RunConfig};
use error::{CliError, Result};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "mhdvem", version, about = "Virtual element solver for incompressible resistive MHD")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run implicit Euler time stepping and write the per-step CSV
    Run(Overrides),
    /// Run the manufactured problem on several refinement levels
    Convergence(Overrides),
    /// Print entity counts, mesh size and quality metrics
    MeshInfo {
        /// cube:N, tet:N or file:PATH
        #[arg(value_name = "MESH")]
        mesh: Option<String>,
        #[arg(long = "mesh", value_name = "MESH", conflicts_with = "mesh")]
        mesh_flag: Option<String>,
    },
}

fn set_threads(n: Option<usize>) -> Result<()> {
    if let Some(n) = n {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("threads: {e}")))?;
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(flags) => {
            let config = RunConfig::resolve(&flags)?;
            set_threads(config.threads)?;
            commands::run(&config)
        }
        Command::Convergence(flags) => {
            let config = RunConfig::resolve(&flags)?;
            set_threads(config.threads)?;
            commands::convergence(&config)
        }
        Command::MeshInfo { mesh, mesh_flag } => {
            let text = mesh.or(mesh_flag).ok_or_else(|| CliError::Config("mesh-info needs a mesh".into()))?;
            let spec = text.parse::<MeshSpec>().map_err(|e| CliError::Config(format!("mesh: {e}")))?;
            commands::mesh_info(&spec)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("MHDVEM_LOG", "warn")).init();
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::debug!("{e:?}");
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
