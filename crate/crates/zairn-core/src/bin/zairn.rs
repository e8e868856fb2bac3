//! Command-line driver: regenerates every decision table from the
//! deterministic simulator and self-checks against the committed copies.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use zairn_core::deploy::VenueDensity;
use zairn_core::report::{
    ablation_report, boundary_report, default_venues, drift_report, epoch_vuln_report,
    games_report, geo_accuracy_report, matrix_report, same_policy_report, sensitivity_report,
    venue_sim_report, OutputFormat, Report,
};

/// Trial count baked into the committed games table.
const GOLDEN_TRIALS: u32 = 100;

/// Committed CSV renders, in the order `all` checks them.
const GOLDENS: [(&str, &str); 10] = [
    ("matrix", include_str!("../../goldens/matrix.csv")),
    ("ablation", include_str!("../../goldens/ablation.csv")),
    ("boundary-sweep", include_str!("../../goldens/boundary-sweep.csv")),
    ("geo-accuracy", include_str!("../../goldens/geo-accuracy.csv")),
    ("games", include_str!("../../goldens/games.csv")),
    ("venue-sim", include_str!("../../goldens/venue-sim.csv")),
    ("epoch-vuln", include_str!("../../goldens/epoch-vuln.csv")),
    ("sensitivity", include_str!("../../goldens/sensitivity.csv")),
    ("same-policy", include_str!("../../goldens/same-policy.csv")),
    ("drift", include_str!("../../goldens/drift.csv")),
];

#[derive(Parser)]
#[command(
    name = "zairn",
    version,
    about = "Deterministic simulator for context-bound proximity proofs"
)]
struct Cli {
    /// Seed for every simulation (table values are seed-invariant)
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write to a file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// JSON array of venue densities overriding the built-in set
    /// (fields: name, station_name, k50, k100)
    #[arg(long, global = true)]
    venues: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Markdown,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Markdown => OutputFormat::Markdown,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Strategy x scenario verdict matrix
    Matrix,
    /// Context-mutation ablation (prototype vs full-context relation)
    Ablation,
    /// Accept/reject sweep across a 50 m fence at two latitudes
    BoundarySweep,
    /// Worst-case fixed-point deviation grid (8 latitudes x 5 radii)
    GeoAccuracy,
    /// Security-game win rates (binding + transcript transfer)
    Games {
        /// Trials per configuration
        #[arg(long, default_value_t = GOLDEN_TRIALS)]
        trials: u32,
    },
    /// Multi-drop venue simulation with a shared epoch nonce
    VenueSim,
    /// Epoch-window exposure at built-in venue densities
    EpochVuln,
    /// Latency threshold sensitivity plus the venue density panel
    Sensitivity,
    /// Controlled strategy comparison under matched nonce policies
    SamePolicy,
    /// Honest-claim verdicts under desynchronized context encoders
    Drift,
    /// Regenerate every table and diff against the committed copies
    /// (always uses the built-in venues and the committed trial count)
    All,
}

fn load_venues(path: Option<&PathBuf>) -> Result<Vec<VenueDensity>, String> {
    match path {
        None => Ok(default_venues()),
        Some(p) => {
            let raw = fs::read_to_string(p)
                .map_err(|e| format!("cannot read venues file {}: {e}", p.display()))?;
            let venues: Vec<VenueDensity> = serde_json::from_str(&raw)
                .map_err(|e| format!("invalid venues JSON in {}: {e}", p.display()))?;
            if venues.is_empty() {
                return Err(format!("venues file {} is empty", p.display()));
            }
            for v in &venues {
                if v.k50 > v.k100 {
                    return Err(format!("venue {}: k50 {} exceeds k100 {}", v.name, v.k50, v.k100));
                }
            }
            Ok(venues)
        }
    }
}

fn first_diff(expected: &str, actual: &str) -> Option<String> {
    if expected == actual {
        return None;
    }
    for (i, (e, a)) in expected.lines().zip(actual.lines()).enumerate() {
        if e != a {
            return Some(format!("line {}: committed `{e}` vs regenerated `{a}`", i + 1));
        }
    }
    Some(format!(
        "line counts differ: committed {} vs regenerated {}",
        expected.lines().count(),
        actual.lines().count()
    ))
}

fn emit(report: &Report, format: OutputFormat, out: Option<&PathBuf>) -> Result<(), String> {
    let rendered = report.render(format);
    match out {
        None => {
            print!("{rendered}");
            Ok(())
        }
        Some(path) => fs::write(path, &rendered)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
    }
}

fn run(cli: &Cli) -> Result<bool, String> {
    let seed = cli.seed;
    let report = match &cli.command {
        Command::Matrix => matrix_report(seed),
        Command::Ablation => ablation_report(seed),
        Command::BoundarySweep => boundary_report(),
        Command::GeoAccuracy => geo_accuracy_report(),
        Command::Games { trials } => {
            if *trials == 0 {
                return Err("--trials must be at least 1".into());
            }
            games_report(seed, *trials)
        }
        Command::VenueSim => venue_sim_report(seed),
        Command::EpochVuln => epoch_vuln_report(&load_venues(cli.venues.as_ref())?),
        Command::Sensitivity => sensitivity_report(&load_venues(cli.venues.as_ref())?),
        Command::SamePolicy => same_policy_report(seed),
        Command::Drift => drift_report(seed),
        Command::All => {
            let venues = default_venues();
            let regenerated = [
                matrix_report(seed),
                ablation_report(seed),
                boundary_report(),
                geo_accuracy_report(),
                games_report(seed, GOLDEN_TRIALS),
                venue_sim_report(seed),
                epoch_vuln_report(&venues),
                sensitivity_report(&venues),
                same_policy_report(seed),
                drift_report(seed),
            ];
            let mut all_ok = true;
            for ((slug, golden), report) in GOLDENS.iter().zip(&regenerated) {
                assert_eq!(*slug, report.slug, "golden order matches report order");
                let rendered = report.render(OutputFormat::Csv);
                match first_diff(golden, &rendered) {
                    None => println!("table {slug}: ok"),
                    Some(diff) => {
                        all_ok = false;
                        println!("table {slug}: MISMATCH ({diff})");
                    }
                }
            }
            println!(
                "{}",
                if all_ok {
                    "all tables match the committed copies"
                } else {
                    "some tables diverged from the committed copies"
                }
            );
            return Ok(all_ok);
        }
    };
    emit(&report, cli.format.into(), cli.out.as_ref())?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
