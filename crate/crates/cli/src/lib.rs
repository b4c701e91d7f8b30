//! Command-line front end. Exit codes: 0 success, 1 negative verdict,
//! 2 usage, input or evaluation error.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use csa::cr;
use csa::numeric::{self, Grid};
use csa::symmetry::{self, Generator};
use csa::system::{DifferentialSystem, ScalarODE, SplitVariant};
use csa::CsaError;
use num_complex::Complex64;

#[derive(Parser, Debug)]
#[command(name = "csa", version, about = "Complex splitting of second-order ODEs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Split a scalar equation into a real system.
    Split {
        #[arg(long)]
        variant: SplitVariant,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate the Cauchy-Riemann conditions of a split system.
    CheckCr {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Recover the scalar equation a split system came from.
    Reconstruct {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Point symmetries.
    Symmetry {
        #[command(subcommand)]
        action: SymmetryAction,
    },
    /// Dimension of the Lie algebra generated by a set of generators.
    Closure {
        #[arg(long)]
        gens: PathBuf,
        /// Degree bound for brackets; defaults to the largest input degree.
        #[arg(long)]
        degree: Option<u32>,
    },
    /// Integrate the base equation and an ODE split and compare them.
    Xcheck {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        sys: PathBuf,
        #[arg(long)]
        r0: f64,
        #[arg(long)]
        r1: f64,
        #[arg(long)]
        step: f64,
        /// Lines `u = re, im` and `u' = re, im`.
        #[arg(long)]
        init: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Compare the derived conditions with the printed transcriptions.
    Audit {
        #[arg(long)]
        group: Option<String>,
    },
    /// Print a system file in canonical form.
    Fmt {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum SymmetryAction {
    /// Check each generator against the system.
    Verify {
        #[arg(long)]
        gen: PathBuf,
        #[arg(long)]
        sys: PathBuf,
    },
    /// Solve the determining equations under a polynomial ansatz.
    Solve {
        #[arg(long)]
        degree: u32,
        #[arg(long)]
        sys: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Verdict(String),
    Error(String),
}

impl From<CsaError> for Failure {
    fn from(e: CsaError) -> Self {
        Failure::Error(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Error(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::Error(format!("{}: {e}", path.display())))
}

fn load_system(path: &Path) -> std::result::Result<DifferentialSystem, Failure> {
    DifferentialSystem::parse(&read(path)?)
        .map_err(|e| Failure::Error(format!("{}: {e}", path.display())))
}

fn load_generators(path: &Path, ctx: Option<&csa::JetContext>) -> std::result::Result<Vec<Generator>, Failure> {
    symmetry::parse_generators(&read(path)?, ctx)
        .map_err(|e| Failure::Error(format!("{}: {e}", path.display())))
}

fn parse_init(text: &str) -> std::result::Result<BTreeMap<String, Complex64>, Failure> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = || Failure::Error(format!("init line {}: expected `name = re, im`", n + 1));
        let (name, value) = line.split_once('=').ok_or_else(bad)?;
        let parts: Vec<f64> = value
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        let z = match parts[..] {
            [re] => Complex64::new(re, 0.0),
            [re, im] => Complex64::new(re, im),
            _ => return Err(bad()),
        };
        out.insert(name.trim().to_string(), z);
    }
    Ok(out)
}

fn execute(cli: Cli, out: &mut dyn Write) -> Outcome {
    let mut say = |s: String| {
        let _ = writeln!(out, "{s}");
    };
    match cli.command {
        Command::Split {
            variant,
            input,
            out: dest,
        } => {
            let ode = ScalarODE::from_system(&load_system(&input)?)?;
            let result = csa::split(&ode, variant)?;
            write_file(&dest, &result.system.to_string())?;
            say(format!(
                "split {} into {} equations ({})",
                ode,
                result.system.equations.len(),
                variant
            ));
            for (k, r) in result.residuals.iter().enumerate() {
                say(format!("recipe residual {}: {r}", k + 1));
            }
            Ok(())
        }
        Command::CheckCr { input, json } => {
            let sys = load_system(&input)?;
            let report = cr::check_all(&sys)?;
            say(report.to_string().trim_end().to_string());
            if let Some(path) = json {
                let text = serde_json::to_string_pretty(&report.view())
                    .map_err(|e| Failure::Error(e.to_string()))?;
                write_file(&path, &(text + "\n"))?;
            }
            if report.verdict {
                Ok(())
            } else {
                Err(Failure::Verdict(format!(
                    "failing conditions: {}",
                    report.failures().join("; ")
                )))
            }
        }
        Command::Reconstruct { input, out: dest } => {
            let sys = load_system(&input)?;
            let report = cr::check_all(&sys)?;
            if !report.verdict {
                return Err(Failure::Verdict(format!(
                    "not a split system; failing conditions: {}",
                    report.failures().join("; ")
                )));
            }
            let ode = cr::reconstruct_base(&sys)?;
            write_file(&dest, &ode.to_system().to_string())?;
            say(format!("base equation: {ode}"));
            Ok(())
        }
        Command::Symmetry { action } => match action {
            SymmetryAction::Verify { gen, sys } => {
                let sys = load_system(&sys)?;
                let gens = load_generators(&gen, Some(&sys.ctx))?;
                let mut all = true;
                for g in &gens {
                    let v = symmetry::symmetry_residual(g, &sys)?;
                    all &= v.is_symmetry;
                    let res: Vec<String> = v.residuals.iter().map(|r| r.to_string()).collect();
                    say(format!(
                        "{}: {} [{}]",
                        g,
                        if v.is_symmetry { "symmetry" } else { "not a symmetry" },
                        res.join(", ")
                    ));
                }
                if all {
                    Ok(())
                } else {
                    Err(Failure::Verdict("some generators are not symmetries".into()))
                }
            }
            SymmetryAction::Solve {
                degree,
                sys,
                out: dest,
            } => {
                let sys = load_system(&sys)?;
                let gens = symmetry::solve_determining(&sys, degree)?;
                say(format!("{} generators", gens.len()));
                for g in &gens {
                    say(g.to_string());
                }
                if let Some(path) = dest {
                    write_file(&path, &symmetry::format_generators(&gens))?;
                }
                Ok(())
            }
        },
        Command::Closure { gens, degree } => {
            let gens = load_generators(&gens, None)?;
            let bound = degree.unwrap_or_else(|| gens.iter().map(Generator::degree).max().unwrap_or(0));
            let d = symmetry::closure_dimension(&gens, bound)?;
            say(format!("closure dimension {d}"));
            Ok(())
        }
        Command::Xcheck {
            base,
            sys,
            r0,
            r1,
            step,
            init,
            tol,
            csv,
        } => {
            let ode = ScalarODE::from_system(&load_system(&base)?)?;
            let sys = load_system(&sys)?;
            let variant = sys
                .variant()
                .ok_or_else(|| Failure::Error("system kind must be a split variant".into()))?;
            let init = parse_init(&read(&init)?)?;
            let pick = |name: String| {
                init.get(&name)
                    .copied()
                    .ok_or_else(|| Failure::Error(format!("init lacks `{name}`")))
            };
            let u0 = pick(ode.dep().name().to_string())?;
            let du0 = pick(ode.first_jet().name().to_string())?;
            let grid = Grid::span(r0, r1, step)?;
            let bt = numeric::integrate_base_complex(&ode, u0, du0, &grid)?;
            let start = numeric::matched_initial(&sys, variant, u0, du0)?;
            let st = numeric::integrate_system(&sys, &start, &grid)?;
            let deps: Vec<String> = sys.ctx.deps().iter().map(|d| d.name().to_string()).collect();
            let cons = (!sys.constraints.is_empty()).then_some(&sys.constraints);
            let report = numeric::correspondence_report(&bt, &st, variant, &deps, cons)?;
            for (name, d) in &report.deviations {
                say(format!("{name}: max deviation {d:.3e}"));
            }
            if let Some(d) = report.constraint_drift {
                say(format!("constraint drift {d:.3e}"));
            }
            if let Some(path) = csv {
                write_file(&path, &st.to_csv(sys.ctx.indep(0).name()))?;
            }
            if report.max_deviation < tol {
                Ok(())
            } else {
                Err(Failure::Verdict(format!(
                    "deviation {:.3e} exceeds {tol:e}",
                    report.max_deviation
                )))
            }
        }
        Command::Audit { group } => {
            let groups: Vec<_> = match group {
                Some(id) => vec![csa::printed::group(&id)
                    .ok_or_else(|| Failure::Error(format!("unknown group `{id}`")))?],
                None => csa::printed::GROUPS.iter().collect(),
            };
            let mut exact = true;
            for g in groups {
                let a = cr::audit_group(g)?;
                exact &= a.is_exact();
                say(format!("{}: {}", a.group, if a.is_exact() { "exact" } else { "deviates" }));
                for d in a.deviations() {
                    say(format!("  {d}"));
                }
            }
            if exact {
                Ok(())
            } else {
                Err(Failure::Verdict("printed and derived sets differ".into()))
            }
        }
        Command::Fmt { input } => {
            let sys = load_system(&input)?;
            let _ = write!(out, "{sys}");
            Ok(())
        }
    }
}

/// Runs the tool on `args` (including the program name), writing reports
/// to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = if code == 0 {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return if code == 0 { 0 } else { 2 };
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(Failure::Verdict(m)) => {
            let _ = writeln!(err, "{m}");
            1
        }
        Err(Failure::Error(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
    }
}
