use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lambda0_core::scenario::{emit, load_scenario, run_probe, Format, GalleryName, Kind, Section};
use lambda0_core::{run_scenario, Error, Outcome, Scenario};

#[derive(Parser)]
#[command(name = "lambda0", version, about = "Bottom of the spectrum of graphs, coverings and hyperbolic quotients")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// λ₀ and λ_ess estimates of a probe scenario.
    Spectra(Common),
    /// Covering checks of a probe scenario: cycles, pushdown trials.
    Cover(Common),
    /// Cheeger constants and inequalities of a probe scenario.
    Cheeger(Common),
    /// Følner search and return probabilities of a probe scenario.
    Folner(Common),
    /// Model-space constants, Poincaré series and critical exponents.
    Hyperbolic(Common),
    /// Theorem harnesses: monotonicity, tame, name and stability scenarios.
    Verify(Common),
    /// Built-in examples, by scenario file or by `--name`.
    Gallery {
        #[command(flatten)]
        common: Common,
        /// exa00-chain, exabcd-tree or salpha.
        #[arg(long)]
        name: Option<String>,
    },
}

#[derive(Args)]
struct Common {
    /// Scenario file; may be repeated.
    #[arg(long = "scenario", value_name = "FILE")]
    scenarios: Vec<PathBuf>,
    /// Overrides the seed of every scenario.
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for reports; without it reports go to stdout.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

const USAGE: u8 = 3;

struct Usage(String);

fn accepts(command: &Command, kind: Kind) -> bool {
    match command {
        Command::Spectra(_) | Command::Cover(_) | Command::Cheeger(_) | Command::Folner(_) => kind == Kind::Probe,
        Command::Hyperbolic(_) => kind == Kind::Hyperbolic,
        Command::Verify(_) => matches!(kind, Kind::Monotonicity | Kind::Tame | Kind::Name | Kind::Stability),
        Command::Gallery { .. } => kind == Kind::Gallery,
    }
}

fn section(command: &Command) -> Option<Section> {
    match command {
        Command::Spectra(_) => Some(Section::Spectra),
        Command::Cover(_) => Some(Section::Cover),
        Command::Cheeger(_) => Some(Section::Cheeger),
        Command::Folner(_) => Some(Section::Folner),
        _ => None,
    }
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Spectra(_) => "spectra",
        Command::Cover(_) => "cover",
        Command::Cheeger(_) => "cheeger",
        Command::Folner(_) => "folner",
        Command::Hyperbolic(_) => "hyperbolic",
        Command::Verify(_) => "verify",
        Command::Gallery { .. } => "gallery",
    }
}

fn input_error(context: &str, e: &Error) -> Usage {
    Usage(format!("{context}: {e}"))
}

fn run(cli: Cli) -> Result<Vec<Outcome>, Usage> {
    let command = &cli.command;
    let (common, gallery_name) = match command {
        Command::Spectra(c)
        | Command::Cover(c)
        | Command::Cheeger(c)
        | Command::Folner(c)
        | Command::Hyperbolic(c)
        | Command::Verify(c) => (c, None),
        Command::Gallery { common, name } => (common, name.as_deref()),
    };
    let mut scenarios: Vec<(String, Scenario)> = Vec::new();
    if let Some(name) = gallery_name {
        let example = GalleryName::parse(name).map_err(|e| input_error("--name", &e))?;
        scenarios.push((format!("--name {name}"), Scenario::gallery(example, 0)));
    }
    for path in &common.scenarios {
        let label = path.display().to_string();
        let s = load_scenario(path).map_err(|e| input_error(&label, &e))?;
        if !accepts(command, s.kind) {
            return Err(Usage(format!(
                "{label}: `{}` does not run {} scenarios",
                command_name(command),
                s.kind.as_str()
            )));
        }
        scenarios.push((label, s));
    }
    if scenarios.is_empty() {
        return Err(Usage(format!("`{}` needs at least one --scenario", command_name(command))));
    }
    let format = match common.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    };
    let mut outcomes = Vec::new();
    for (label, mut s) in scenarios {
        if let Some(seed) = common.seed {
            s.seed = seed;
        }
        let result = match section(command) {
            Some(sec) => run_probe(&s, sec),
            None => run_scenario(&s),
        };
        let report = match result {
            Ok(r) => r,
            Err(e) if e.is_input() => return Err(input_error(&label, &e)),
            Err(e) => {
                eprintln!("{}: inconclusive ({e})", s.name);
                outcomes.push(Outcome::Inconclusive);
                continue;
            }
        };
        match &common.out {
            Some(dir) => {
                let path = emit(&report, dir, format).map_err(|e| input_error(&dir.display().to_string(), &e))?;
                eprintln!("{}: {} -> {}", report.scenario, report.outcome.as_str(), path.display());
            }
            None => {
                let body = match format {
                    Format::Json => report.to_json(),
                    Format::Csv => report.to_csv(),
                };
                print!("{body}");
                eprintln!("{}: {}", report.scenario, report.outcome.as_str());
            }
        }
        outcomes.push(report.outcome);
    }
    Ok(outcomes)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(outcomes) => ExitCode::from(Outcome::combined_exit_code(&outcomes) as u8),
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(USAGE)
        }
    }
}
