use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use germcalc::scenarios::{generic_inputs, shift_pair, DEFAULT_ORDER};
use germcalc::{generate_random_jet, run_scenario, HarnessError, Options, HEURISTIC_NOTICE};
use germcalc_core::blowup::{blow_up_jet, reconstruct_from_chart, Chart};
use germcalc_core::calculus::{apply_expr, classify, parse_expr, Env};
use germcalc_core::implicit::{
    check_solution, closure_compose, closure_derivative, closure_implicit, closure_schwarz,
    reduce_linear_relation, ImplicitSolution, ImplicitSystem, LinearRelation,
};
use germcalc_core::json::{
    jet_from_json, jet_to_json, solution_from_json, solution_to_json, system_from_json,
    system_to_json,
};
use germcalc_core::{GaussianRational, Jet};
use serde_json::{json, Value};

type Result<T> = std::result::Result<T, HarnessError>;

#[derive(Parser)]
#[command(
    name = "germcalc",
    version,
    about = "Exact germ calculus on truncated Taylor series"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an operator expression on input jets.
    Apply {
        #[arg(long)]
        expr: String,
        /// Order of the output jet.
        #[arg(long)]
        order: usize,
        /// Binds an input germ, `NAME=FILE`; the base point comes from the file.
        #[arg(long = "germ", value_name = "NAME=FILE")]
        germs: Vec<String>,
    },
    /// Structural upper bound and certified lower bound of the shift at `n`.
    Shift {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        n: usize,
        /// Unbound germs are replaced by seeded generic jets.
        #[arg(long = "germ", value_name = "NAME=FILE")]
        germs: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Operator class of an expression.
    Classify {
        #[arg(long)]
        expr: String,
    },
    /// Exponential-polynomial implicit systems.
    Implicit {
        #[command(subcommand)]
        op: ImplicitOp,
    },
    /// Jet of `f ∘ π_λ` in a blow-up chart.
    Blowup {
        #[arg(long)]
        jet: PathBuf,
        /// `λ` as a Gaussian rational, or `inf`.
        #[arg(long, default_value = "0")]
        chart: String,
        #[arg(long)]
        order: usize,
    },
    /// Recover `f` of order `k` from a chart jet of order `2k`.
    Blowdown {
        #[arg(long)]
        jet: PathBuf,
        #[arg(long, default_value = "0")]
        chart: String,
        #[arg(long)]
        order: usize,
    },
    /// Run a verification scenario.
    Verify {
        scenario: String,
        #[arg(long, env = "GERMCALC_ORDER", default_value_t = DEFAULT_ORDER)]
        order: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Polynomial degree for `blowdown-roundtrip`.
        #[arg(long, default_value_t = 6)]
        degree: usize,
    },
    /// Seeded random jet at the origin.
    Generate {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        order: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
        bound: u32,
    },
}

#[derive(Subcommand)]
enum ImplicitOp {
    /// Residual and Jacobian check of a solution.
    Check {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        /// Defaults to the order of the solution.
        #[arg(long)]
        order: Option<usize>,
    },
    Schwarz {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    Derivative {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        /// 1-based coordinate.
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        axis: u32,
    },
    /// Implicit function of the defined germ along the last coordinate.
    Extract {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    /// `f ∘ g` from systems for `g` (inner) and `f` (outer).
    Compose {
        #[arg(long)]
        inner_system: PathBuf,
        #[arg(long)]
        inner_solution: PathBuf,
        #[arg(long)]
        outer_system: PathBuf,
        #[arg(long)]
        outer_solution: PathBuf,
    },
    /// Eliminate the last unknown with `d·ψ_n = Σ a_i ψ_i + K`.
    Reduce {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        #[arg(long)]
        d: u32,
        /// `a_0,…,a_{n-1}`, where `ψ_0` is the coordinate.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        coeffs: Vec<i64>,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        constant: String,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn read_jet(path: &Path) -> Result<Jet> {
    Ok(jet_from_json(&read(path)?)?)
}

fn read_system(path: &Path) -> Result<ImplicitSystem> {
    Ok(system_from_json(&read(path)?)?)
}

fn read_solution(path: &Path) -> Result<ImplicitSolution> {
    Ok(solution_from_json(&read(path)?)?)
}

fn bind_germs(env: &mut Env, germs: &[String]) -> Result<()> {
    for spec in germs {
        let (name, file) = spec
            .split_once('=')
            .ok_or_else(|| HarnessError::Usage(format!("expected NAME=FILE, found `{spec}`")))?;
        env.bind(name, read_jet(Path::new(file))?);
    }
    Ok(())
}

fn value(text: &str) -> Value {
    serde_json::from_str(text).expect("library documents are valid JSON")
}

fn closure_doc(system: &ImplicitSystem, solution: &ImplicitSolution) -> String {
    let doc = json!({
        "system": value(&system_to_json(system)),
        "solution": value(&solution_to_json(solution)),
    });
    serde_json::to_string_pretty(&doc).expect("serializable")
}

fn chart(text: &str) -> Result<Chart> {
    Ok(text.parse()?)
}

/// Runs a command, returning its standard output and whether it succeeded.
fn run(command: Command) -> Result<(String, bool)> {
    match command {
        Command::Apply { expr, order, germs } => {
            let e = parse_expr(&expr)?;
            let mut env = Env::new();
            bind_germs(&mut env, &germs)?;
            Ok((jet_to_json(&apply_expr(&e, &env, order)?), true))
        }
        Command::Shift {
            expr,
            n,
            germs,
            seed,
        } => {
            let e = parse_expr(&expr)?;
            let mut env = generic_inputs(&e, n, seed)?;
            let given = germs.len();
            bind_germs(&mut env, &germs)?;
            if given < e.inputs().len() {
                eprintln!("{HEURISTIC_NOTICE}");
            }
            let (upper, lower) = shift_pair(&e, &env, n)?;
            Ok((format!("upper: {upper}, certified lower: {lower}"), true))
        }
        Command::Classify { expr } => Ok((classify(&parse_expr(&expr)?).to_string(), true)),
        Command::Implicit { op } => run_implicit(op),
        Command::Blowup {
            jet,
            chart: c,
            order,
        } => {
            let g = blow_up_jet(&read_jet(&jet)?, &chart(&c)?, order)?;
            Ok((jet_to_json(&g), true))
        }
        Command::Blowdown {
            jet,
            chart: c,
            order,
        } => {
            let f = reconstruct_from_chart(&read_jet(&jet)?, &chart(&c)?, order)?;
            Ok((jet_to_json(&f), true))
        }
        Command::Verify {
            scenario,
            order,
            seed,
            degree,
        } => {
            let report = run_scenario(
                &scenario,
                &Options {
                    order,
                    seed,
                    degree,
                },
            )?;
            Ok((report.to_string(), report.passed()))
        }
        Command::Generate {
            dim,
            order,
            seed,
            bound,
        } => {
            if dim == 0 {
                return Err(HarnessError::Usage("dim must be at least 1".into()));
            }
            eprintln!("{HEURISTIC_NOTICE}");
            Ok((
                jet_to_json(&generate_random_jet(dim, order, seed, bound)),
                true,
            ))
        }
    }
}

fn run_implicit(op: ImplicitOp) -> Result<(String, bool)> {
    match op {
        ImplicitOp::Check {
            system,
            solution,
            order,
        } => {
            let f = read_system(&system)?;
            let psi = read_solution(&solution)?;
            let c = check_solution(&f, &psi, order.unwrap_or(psi.order()))?;
            let doc = json!({
                "residual_zero": c.residual_zero,
                "jacobian_invertible": c.jacobian_invertible,
            });
            Ok((
                serde_json::to_string_pretty(&doc).expect("serializable"),
                true,
            ))
        }
        ImplicitOp::Schwarz { system, solution } => {
            let (f, psi) = closure_schwarz(&read_system(&system)?, &read_solution(&solution)?)?;
            Ok((closure_doc(&f, &psi), true))
        }
        ImplicitOp::Derivative {
            system,
            solution,
            axis,
        } => {
            let (f, psi) = closure_derivative(
                &read_system(&system)?,
                &read_solution(&solution)?,
                axis as usize - 1,
            )?;
            Ok((closure_doc(&f, &psi), true))
        }
        ImplicitOp::Extract { system, solution } => {
            let (f, psi) = closure_implicit(&read_system(&system)?, &read_solution(&solution)?)?;
            Ok((closure_doc(&f, &psi), true))
        }
        ImplicitOp::Compose {
            inner_system,
            inner_solution,
            outer_system,
            outer_solution,
        } => {
            let (f, psi) = closure_compose(
                &read_system(&inner_system)?,
                &read_solution(&inner_solution)?,
                &read_system(&outer_system)?,
                &read_solution(&outer_solution)?,
            )?;
            Ok((closure_doc(&f, &psi), true))
        }
        ImplicitOp::Reduce {
            system,
            solution,
            d,
            coeffs,
            constant,
        } => {
            let constant: GaussianRational = constant.parse()?;
            let relation = LinearRelation {
                d,
                coeffs,
                constant,
            };
            let r = reduce_linear_relation(
                &read_system(&system)?,
                &read_solution(&solution)?,
                &relation,
            )?;
            let doc = json!({
                "system": value(&system_to_json(&r.system)),
                "solution": value(&solution_to_json(&r.solution)),
                "rows": r.rows,
                "verified_order": r.verified_order,
            });
            Ok((
                serde_json::to_string_pretty(&doc).expect("serializable"),
                true,
            ))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Format::Json = cli.format;
    match run(cli.command) {
        Ok((out, ok)) => {
            println!("{out}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
