use clap::{Parser, Subcommand, ValueEnum};
use conecyl::constructions::{generate, Family};
use conecyl::expr::{parse_immersion_spec, ImmersionSpec};
use conecyl::report::{analyze_grid, csv, mesh, verify, Grid};
use conecyl::Tolerances;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "conecyl", version, about = "Invariants and classification of submanifolds of the light-like hypercylinder")]
struct Cli {
    /// TOML file with tolerance defaults.
    #[arg(long, global = true, env = "CONECYL_CONFIG")]
    config: Option<PathBuf>,
    /// Pointwise algebraic tolerance.
    #[arg(long, global = true)]
    tol_alg: Option<f64>,
    /// Tolerance for predicates involving finite differences.
    #[arg(long, global = true)]
    tol_class: Option<f64>,
    /// Offset into the isotropy direction sequence.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Analyze a spec on a parameter grid and print a JSON report.
    Analyze {
        spec: PathBuf,
        #[arg(long, default_value = "16x16")]
        grid: String,
        /// Parameter box `lo:hi,lo:hi,...` inside the declared domain.
        #[arg(long)]
        domain: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the verification suite; exits 1 if any check fails.
    Verify {
        /// Also write the suite result as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the DSL spec of a generated family member.
    Generate {
        family: String,
        /// Family options as `key=value`.
        options: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export a grid analysis as mesh, CSV or JSON.
    Export {
        spec: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
        #[arg(long, default_value = "16x16")]
        grid: String,
        #[arg(long)]
        domain: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Mesh,
    Csv,
    Json,
}

enum Failure {
    Usage(String),
    Checks,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn tolerances(cli: &Cli) -> Result<Tolerances, Failure> {
    let mut t = match &cli.config {
        Some(p) => Tolerances::from_file(p).map_err(Failure::Usage)?,
        None => Tolerances::default(),
    };
    if let Some(x) = cli.tol_alg {
        t.alg = x;
    }
    if let Some(x) = cli.tol_class {
        t.class = x;
    }
    if !(t.alg > 0.0 && t.class > 0.0) {
        return Err(Failure::Usage("tolerances must be positive".into()));
    }
    Ok(t)
}

fn load(path: &Path) -> Result<ImmersionSpec, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_immersion_spec(&text).map_err(|e| Failure::Usage(format!("{}:{e}", path.display())))
}

fn grid_for(spec: &ImmersionSpec, grid: &str, domain: Option<&str>) -> Result<Grid, Failure> {
    let n = spec.n_params();
    let counts = Grid::parse_counts(grid, n)?;
    let domain = domain.map(|d| Grid::parse_domain(d, n)).transpose()?;
    Ok(Grid::new(spec, counts, domain)?)
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn families_usage() -> String {
    let mut s = String::from("families and their options:\n");
    for f in Family::ALL {
        s.push_str(&format!("  {:<26} {}\n", f.name(), f.option_keys().join(" ")));
    }
    s
}

fn run(cli: Cli) -> Result<(), Failure> {
    let tol = tolerances(&cli)?;
    match &cli.cmd {
        Cmd::Analyze { spec, grid, domain, out } => {
            let spec = load(spec)?;
            let grid = grid_for(&spec, grid, domain.as_deref())?;
            let report = analyze_grid(&spec, grid, &tol, cli.seed);
            write_or_print(out.as_deref(), &report.to_json())
        }
        Cmd::Verify { out } => {
            let suite = verify::run_suite(&tol, cli.seed)?;
            print!("{}", suite.to_text());
            if let Some(p) = out {
                write_or_print(Some(p), &suite.to_json())?;
            }
            if suite.all_passed() {
                Ok(())
            } else {
                Err(Failure::Checks)
            }
        }
        Cmd::Generate { family, options, out } => {
            let Some(fam) = Family::from_name(family) else {
                return Err(Failure::Usage(format!("unknown family `{family}`\n{}", families_usage())));
            };
            let mut opts = BTreeMap::new();
            for o in options {
                let Some((k, v)) = o.split_once('=') else {
                    return Err(Failure::Usage(format!("option `{o}` is not key=value\n{}", families_usage())));
                };
                opts.insert(k.trim().to_string(), v.trim().to_string());
            }
            let spec = generate(fam, &opts).map_err(|e| Failure::Usage(format!("{e}\n{}", families_usage())))?;
            write_or_print(out.as_deref(), &spec.to_dsl())
        }
        Cmd::Export { spec, format, grid, domain, out } => {
            let spec = load(spec)?;
            let grid = grid_for(&spec, grid, domain.as_deref())?;
            match format {
                Format::Mesh => {
                    let m = mesh::to_mesh(&spec, &grid)
                        .map_err(|e| Failure::Usage(format!("mesh export needs a surface: {e}")))?;
                    write_or_print(Some(out), &m.text)?;
                    let mut side = out.clone().into_os_string();
                    side.push(".x1");
                    write_or_print(Some(Path::new(&side)), &m.x1)
                }
                Format::Csv => write_or_print(Some(out), &csv::to_csv(&analyze_grid(&spec, grid, &tol, cli.seed))),
                Format::Json => write_or_print(Some(out), &analyze_grid(&spec, grid, &tol, cli.seed).to_json()),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
