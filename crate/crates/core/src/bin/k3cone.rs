use clap::{Parser, Subcommand, ValueEnum};
use k3cone::coxgen::Battery;
use k3cone::lattice::{catalog, NSLattice};
use k3cone::report::{self, AnalyzeOptions};
use k3cone::tables::reference_tables;
use k3cone::vinberg::DEFAULT_MAX_LEVEL;
use k3cone::Error;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "k3cone", version, about = "Curves, cones and Cox ring degrees of K3 surfaces from their Néron–Severi lattice")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum BatteryArg {
    Full,
    Reduced,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the full pipeline on a catalog lattice or a Gram file.
    Analyze {
        /// catalog name (V1..V14) or block expression such as "U(2)+2A1"
        #[arg(required_unless_present = "gram", conflicts_with = "gram")]
        name: Option<String>,
        /// JSON file {"name": str, "gram": [[int]]}
        #[arg(long)]
        gram: Option<std::path::PathBuf>,
        /// base class for Vinberg's algorithm, e.g. 1,0,0,0
        #[arg(long, allow_hyphen_values = true)]
        base: Option<String>,
        #[arg(long, default_value_t = DEFAULT_MAX_LEVEL)]
        max_level: u32,
        /// write the report here instead of stdout
        #[arg(long)]
        out: Option<std::path::PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// skip the Cox ring stage
        #[arg(long)]
        no_cox: bool,
        /// elimination tests to run (default: reduced for V14, full otherwise)
        #[arg(long, value_enum)]
        battery: Option<BatteryArg>,
    },
    /// Check the algorithms against the embedded tables.
    Verify {
        /// restrict to one family
        #[arg(long)]
        lattice: Option<String>,
        /// comma-separated subset of 1-5 or tables,vinberg,cones,fibrations,cox
        #[arg(long)]
        checks: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// List the fourteen catalog lattices with headline counts.
    Catalog {
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

fn load_lattice(name: Option<String>, gram: Option<std::path::PathBuf>) -> Result<NSLattice, Error> {
    match (name, gram) {
        (_, Some(path)) => {
            let text = std::fs::read_to_string(&path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
            report::parse_gram_json(&text)
        }
        (Some(n), None) => catalog(&n),
        (None, None) => Err(Error::Input("give a lattice name or --gram".into())),
    }
}

fn emit(text: String, out: Option<std::path::PathBuf>) -> Result<(), Error> {
    match out {
        Some(p) => std::fs::write(&p, text).map_err(|e| Error::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_checks(s: Option<String>) -> Result<Vec<u8>, Error> {
    let Some(s) = s else { return Ok(vec![1, 2, 3, 4, 5]) };
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<u8>()
                .ok()
                .filter(|k| (1..=5).contains(k))
                .or_else(|| report::CHECK_NAMES.iter().position(|n| *n == t).map(|i| i as u8 + 1))
                .ok_or_else(|| Error::Input(format!("unknown check {t:?}")))
        })
        .collect()
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.cmd {
        Cmd::Analyze { name, gram, base, max_level, out, format, no_cox, battery } => {
            let lat = load_lattice(name, gram)?;
            let base = base.map(|b| report::parse_class(&b)).transpose()?;
            if let Some(b) = &base {
                lat.check_class(b)?;
            }
            let opts = AnalyzeOptions {
                base,
                max_level,
                cox: !no_cox,
                battery: battery.map(|b| match b {
                    BatteryArg::Full => Battery::Full,
                    BatteryArg::Reduced => Battery::PairsAndMinimal,
                }),
            };
            let r = report::analyze(&lat, &opts)?;
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&r).expect("report serializes") + "\n",
                Format::Text => report::render_text(&r),
            };
            emit(text, out)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify { lattice, checks, format } => {
            let checks = parse_checks(checks)?;
            let tables = reference_tables();
            let fams: Vec<_> = match &lattice {
                Some(n) => vec![tables.family(n).ok_or_else(|| Error::Lookup(n.clone()))?],
                None => tables.families.iter().collect(),
            };
            let outcomes = report::verify(&fams, &checks);
            match format {
                Format::Json => println!("{}", serde_json::json!({ "schema": report::SCHEMA_VERSION, "checks": outcomes })),
                Format::Text => {
                    for o in &outcomes {
                        println!("{:<4} {} {:<11} {}", o.family, o.check, o.name, if o.passed { "PASS" } else { "FAIL" });
                        for d in &o.diffs {
                            println!("       {d}");
                        }
                    }
                }
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            eprintln!("{} checks, {} failed", outcomes.len(), failed);
            Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Catalog { format } => {
            let rows = report::catalog_rows()?;
            match format {
                Format::Json => println!("{}", serde_json::json!({ "schema": report::SCHEMA_VERSION, "lattices": rows })),
                Format::Text => print!("{}", report::render_catalog(&rows)),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("k3cone: {e}");
            ExitCode::from(report::exit_code(&e) as u8)
        }
    }
}
