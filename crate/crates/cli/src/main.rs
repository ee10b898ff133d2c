use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod config;
mod report;

use config::Config;
use report::{Report, EXIT_STRUCTURAL};

/// Exact verification of monads, abstract Kleisli structures and their
/// 2-dimensional analogues on finite data. Prints a JSON report.
#[derive(Parser)]
#[command(name = "kleislikit", version)]
struct Cli {
    /// Largest naive search space any enumeration may visit. Overrides
    /// KLEISLIKIT_GUARD and the config file.
    #[arg(long, global = true)]
    guard: Option<u128>,

    /// Config file [default: config/kleislikit.toml if present].
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Pretty-print the report.
    #[arg(long, global = true)]
    pretty: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a JSON document against the laws of its kind.
    Validate {
        file: PathBuf,
        /// Skip shape-based detection.
        #[arg(long, value_enum)]
        kind: Option<InputKind>,
    },
    /// Build the Kleisli category of a monad and its abstract Kleisli structure.
    Kleisli {
        monad: PathBuf,
        /// Also write the abstract Kleisli structure as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the category of algebras of a monad.
    Em { monad: PathBuf },
    /// Is a morphism of an abstract Kleisli structure thunkable?
    Thunkable { abskl: PathBuf, morphism: String },
    /// Decide codescent for a monad.
    Check {
        /// Compute all five characterisations and compare them.
        #[arg(long)]
        profile: bool,
        monad: PathBuf,
    },
    /// Reflect a monad through its abstract Kleisli structure.
    Reflect {
        monad: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decide whether the comparison 2-functor is a local equivalence.
    Check2 {
        /// Compute all three characterisations and compare them.
        #[arg(long)]
        profile: bool,
        pseudomonad: PathBuf,
    },
    /// List descent cones between two objects of a pseudomonad's base.
    Cones { pseudomonad: PathBuf, x: String, y: String },
    /// Decide isobidescent for a pseudomonad.
    Isobidescent { pseudomonad: PathBuf },
    /// Lift a Kleisli extension morphism, or verify the hom bijection when
    /// the input carries only `source` and `target`.
    Lift { input: PathBuf },
    /// Generate or check the instance corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    /// Write the corpus as JSON lines.
    Generate {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-run every instance and compare against its expected record.
    Check { file: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InputKind {
    Category,
    Fin2cat,
    Monad,
    Comonad,
    Abskl1,
    Pseudomonad,
    Abskl2,
    Comorphism,
    Instance,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = run(&cli);
    let out = if cli.pretty {
        serde_json::to_string_pretty(&report)
    } else {
        serde_json::to_string(&report)
    };
    println!("{}", out.expect("reports serialize"));
    if let Some(e) = &report.error {
        eprintln!("kleislikit: {e}");
    }
    ExitCode::from(report.exit)
}

fn run(cli: &Cli) -> Report {
    let name = commands::name(&cli.command);
    let setup = Config::load(cli.config.as_deref()).and_then(|c| {
        let g = c.guard(cli.guard)?;
        Ok((c, g))
    });
    let (config, guard) = match setup {
        Ok(s) => s,
        Err(e) => {
            let mut r = Report::new(name);
            r.error = Some(e);
            r.exit = EXIT_STRUCTURAL;
            return r;
        }
    };
    match commands::dispatch(&cli.command, &config, &guard) {
        Ok(r) => r,
        Err(e) => Report::failed(name, e),
    }
}
