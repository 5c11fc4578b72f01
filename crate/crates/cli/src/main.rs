use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gprox::gaction::Property;
use gprox_cli::commands::{self, CmdError, CmdResult, Output, What};
use gprox_cli::doc;
use gprox_cli::suite::{Mutation, SuiteOptions};

/// Equivariant proximities on finite G-spaces and the rationals model.
#[derive(Parser)]
#[command(name = "gprox", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance: basis, proximity axioms, action properties.
    Validate {
        file: PathBuf,
        /// Action properties that must hold, e.g. pi_uniform.
        #[arg(long, value_delimiter = ',')]
        require: Vec<String>,
        #[arg(long)]
        json: bool,
    },
    /// The saturated uniformity U^G.
    Ug(ComputeArgs),
    /// The proximity nu.
    Nu(ComputeArgs),
    /// The proximity beta_G.
    Betag(ComputeArgs),
    /// Whether beta_G is a proximity separating pi-disjoint pairs.
    Equinormal(ComputeArgs),
    /// Whether U^G is totally bounded.
    Massive(ComputeArgs),
    /// The rationals under order automorphisms.
    Rat {
        #[command(subcommand)]
        command: RatCommand,
    },
    /// Run the property suites.
    Suite {
        #[arg(long, default_value_t = SuiteOptions::default().max_n)]
        max_n: usize,
        #[arg(long, default_value_t = SuiteOptions::default().max_group)]
        max_group: usize,
        #[arg(long, default_value_t = SuiteOptions::default().seed)]
        seed: u64,
        /// Run only invariants whose name contains this text.
        #[arg(long)]
        filter: Option<String>,
        /// Inject a known defect: bracket, betag-table or nu-top.
        #[arg(long)]
        mutate: Option<String>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(clap::Args)]
struct ComputeArgs {
    file: PathBuf,
    /// Decide a single pair; each set is a subset name or a list like a,b.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    sets: Option<Vec<String>>,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum RatCommand {
    /// Decide farness of two sets of rationals.
    Far {
        a: String,
        b: String,
        #[arg(long)]
        json: bool,
    },
    /// The tower of orbit spaces over the given chains, as DOT.
    Tower {
        chains: Vec<String>,
        /// Write the DOT text here instead of standard output.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Find F with St_F.A inside the convex set O.
    Claim {
        a: String,
        o: String,
        #[arg(long)]
        json: bool,
    },
}

fn load(path: &PathBuf) -> Result<doc::Instance, CmdError> {
    let source = std::fs::read_to_string(path)
        .map_err(|e| CmdError::input(format!("{}: {e}", path.display())))?;
    doc::load_str(&source).map_err(|e| {
        let e: CmdError = e.into();
        CmdError {
            message: format!("{}:{}", path.display(), e.message),
            ..e
        }
    })
}

fn compute(args: &ComputeArgs, what: What) -> CmdResult {
    let inst = load(&args.file)?;
    let sets = args.sets.as_ref().map(|s| (s[0].as_str(), s[1].as_str()));
    commands::compute(&inst, what, sets, args.json)
}

fn dispatch(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Validate {
            file,
            require,
            json,
        } => {
            let require = require
                .iter()
                .map(|r| {
                    Property::parse(r).ok_or_else(|| {
                        let known: Vec<String> =
                            Property::ALL.iter().map(|p| p.to_string()).collect();
                        CmdError::input(format!(
                            "unknown property `{r}`; expected one of {}",
                            known.join(", ")
                        ))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            commands::validate(&load(&file)?, &require, json)
        }
        Command::Ug(a) => compute(&a, What::Ug),
        Command::Nu(a) => compute(&a, What::Nu),
        Command::Betag(a) => compute(&a, What::Betag),
        Command::Equinormal(a) => compute(&a, What::Equinormal),
        Command::Massive(a) => compute(&a, What::Massive),
        Command::Rat { command } => match command {
            RatCommand::Far { a, b, json } => commands::rat_far(&a, &b, json),
            RatCommand::Claim { a, o, json } => commands::rat_claim(&a, &o, json),
            RatCommand::Tower { chains, dot } => {
                let (tower, text) = commands::rat_tower(&chains)?;
                match dot {
                    None => Ok(Output { text, code: 0 }),
                    Some(path) => {
                        std::fs::write(&path, text)
                            .map_err(|e| CmdError::input(format!("{}: {e}", path.display())))?;
                        Ok(Output {
                            text: commands::tower_summary(&tower),
                            code: 0,
                        })
                    }
                }
            }
        },
        Command::Suite {
            max_n,
            max_group,
            seed,
            filter,
            mutate,
            json,
        } => {
            let mutation = mutate
                .map(|m| {
                    Mutation::parse(&m)
                        .ok_or_else(|| CmdError::input(format!("unknown mutation `{m}`")))
                })
                .transpose()?;
            let opts = SuiteOptions {
                max_n,
                max_group,
                seed,
                filter,
                mutation,
            };
            commands::run_suite(&opts, json)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
