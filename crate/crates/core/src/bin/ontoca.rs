use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ontoca::experiment::{self, ExperimentConfig, Kind, Overrides};
use ontoca::gup::Boundary;
use ontoca::io::Format;

/// Exact simulation and verification of Hamiltonian cellular automata.
///
/// Set ONTOCA_LOG (error, warn, info, debug, trace) for diagnostics on stderr.
#[derive(Parser)]
#[command(name = "ontoca", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate the second-order update and write the trajectory.
    Evolve(Common),
    /// Test every pair of basis vectors for permutation dynamics.
    OntologyScan(Common),
    /// Propagate a bipartite product solution line by line.
    Multitime(Common),
    /// Run Model A under an external flip schedule.
    IsingA(Common),
    /// Run Model B with an edge-spin rule.
    IsingB(Common),
    /// Uncertainty relations on the position/momentum lattice.
    Gup(GupArgs),
    /// Dispersion relation and stationary modes of a model.
    Dispersion(Common),
    /// Run the invariant suite; exits nonzero if any check fails.
    VerifyAll(Common),
    /// Run the experiment named by the config's `kind`.
    Run {
        config: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Experiment config (JSON, schema_version 1).
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Args, Clone, Default)]
struct Flags {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Output file; written atomically. Without it the artifact goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<Format>,
}

#[derive(Args, Clone)]
struct GupArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    sites: Option<usize>,
    #[arg(long)]
    scale: Option<f64>,
    /// periodic or open.
    #[arg(long)]
    boundary: Option<Boundary>,
    #[arg(long)]
    samples: Option<usize>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        self.flags.overrides()
    }
}

impl Flags {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            steps: self.steps,
            out: self.out.clone(),
            format: self.format,
            ..Overrides::default()
        }
    }
}

fn load(kind: Option<Kind>, config: Option<&PathBuf>, overrides: &Overrides) -> ontoca::Result<ExperimentConfig> {
    match (config, kind) {
        (Some(path), kind) => {
            let c = experiment::load_config(path, overrides)?;
            if let Some(k) = kind.filter(|&k| k != c.kind) {
                return Err(ontoca::Error::ConfigInvalid {
                    path: format!("{}:$.kind", path.display()),
                    message: format!("config is for {}, not {}", c.kind.name(), k.name()),
                });
            }
            Ok(c)
        }
        (None, Some(kind)) => experiment::default_config(kind, overrides),
        (None, None) => unreachable!("run always has a config"),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("ONTOCA_LOG")).init();
    let cli = Cli::parse();
    let (kind, common, overrides) = match &cli.command {
        Command::Evolve(c) => (Some(Kind::Evolve), c, c.overrides()),
        Command::OntologyScan(c) => (Some(Kind::OntologyScan), c, c.overrides()),
        Command::Multitime(c) => (Some(Kind::Multitime), c, c.overrides()),
        Command::IsingA(c) => (Some(Kind::IsingA), c, c.overrides()),
        Command::IsingB(c) => (Some(Kind::IsingB), c, c.overrides()),
        Command::Dispersion(c) => (Some(Kind::Dispersion), c, c.overrides()),
        Command::VerifyAll(c) => (Some(Kind::VerifyAll), c, c.overrides()),
        Command::Gup(g) => (
            Some(Kind::Gup),
            &g.common,
            Overrides {
                sites: g.sites,
                scale: g.scale,
                boundary: g.boundary,
                samples: g.samples,
                ..g.common.overrides()
            },
        ),
        Command::Run { config, flags } => {
            let overrides = flags.overrides();
            return finish(load(None, Some(config), &overrides));
        }
    };
    finish(load(kind, common.config.as_ref(), &overrides))
}

fn finish(config: ontoca::Result<ExperimentConfig>) -> ExitCode {
    let result = config.and_then(|c| experiment::execute(&c).map(|r| (c, r)));
    match result {
        Ok((config, (outcome, bytes))) => {
            let mut stdout = std::io::stdout().lock();
            if config.output.is_none() {
                let _ = stdout.write_all(&bytes);
            }
            let _ = writeln!(stdout, "{}", outcome.summary());
            if outcome.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            log::debug!("{e:?}");
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
