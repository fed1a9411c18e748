//! The `perivar` command line. Each command returns the text for stdout and
//! writes its files; the binary maps errors to exit codes.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::energy::{assemble, functional};
use crate::error::{Error, Result};
use crate::exhaustive::resolve_cap;
use crate::experiments::{run_named, write_scenario};
use crate::grid::CellSet;
use crate::ic::{
    capacity, divergence_certificate, small_volume_profile, strong_excess, DivergenceOutcome,
    ICVariant,
};
use crate::io::pgm::{read_mask, write_mask};
use crate::io::problem::{FaceRef, Problem, ProblemFile, ProblemKind};
use crate::io::svg;
use crate::solve::{solve_dirichlet, solve_energy, solve_obstacle, solve_volume};
use crate::{parse_rational, Rational};

#[derive(Debug, Parser)]
#[command(name = "perivar", version, about = "Exact lattice perimeter functionals with measure data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON problem file.
    #[arg(long, short)]
    pub problem: PathBuf,
    /// Cell cap for exhaustive search; overrides PERIVAR_EXHAUSTIVE_CAP and the file.
    #[arg(long)]
    pub cap: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the functional value of a set and its terms.
    Eval {
        #[command(flatten)]
        common: Common,
        /// PGM mask of the set.
        #[arg(long)]
        set: PathBuf,
    },
    /// Solve a free, obstacle, Dirichlet or volume problem.
    Minimize {
        #[command(flatten)]
        common: Common,
        /// Output directory for minimizer.pgm and result.json.
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Isoperimetric tests of mu_minus.
    Ic {
        #[command(subcommand)]
        test: IcCommand,
    },
    /// Run a scripted scenario.
    Experiment {
        /// Scenario name.
        name: String,
        /// Parameter as key=value; repeatable.
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Draw a problem's measures, optionally with a set, as SVG.
    Render {
        #[arg(long, short)]
        problem: PathBuf,
        #[arg(long)]
        set: Option<PathBuf>,
        #[arg(long, short)]
        out: PathBuf,
        #[arg(long, default_value = "")]
        title: String,
    },
}

#[derive(Debug, Args)]
pub struct IcArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, short)]
    pub out: PathBuf,
    /// Isoperimetric constant; overrides the file option.
    #[arg(long)]
    pub c: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum IcCommand {
    /// Maximum excess over nonempty test sets.
    Strong(IcArgs),
    /// Small-volume excess profile.
    Profile {
        #[command(flatten)]
        args: IcArgs,
        #[arg(long)]
        v_max: Option<usize>,
    },
    /// Bounded flux field with divergence mu, or a violating set.
    Divcert(IcArgs),
    /// Least perimeter of a set covering the target.
    Capacity {
        #[command(flatten)]
        common: Common,
        #[arg(long, short)]
        out: PathBuf,
    },
}

fn load(common: &Common) -> Result<(Problem, usize)> {
    let problem = ProblemFile::read(&common.problem)?.to_problem()?;
    let cap = resolve_cap(common.cap, problem.file_cap);
    Ok((problem, cap))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

fn prepare(out: &Path) -> Result<()> {
    fs::create_dir_all(out)?;
    Ok(())
}

pub fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Eval { common, set } => cmd_eval(&common, &set),
        Command::Minimize { common, out } => cmd_minimize(&common, &out),
        Command::Ic { test } => cmd_ic(test),
        Command::Experiment { name, params, out } => cmd_experiment(&name, &params, &out),
        Command::Render {
            problem,
            set,
            out,
            title,
        } => cmd_render(&problem, set.as_deref(), &out, &title),
    }
}

pub fn cmd_eval(common: &Common, set: &Path) -> Result<String> {
    let (problem, _) = load(common)?;
    let a = read_mask(&fs::read_to_string(set)?, &problem.domain)?;
    let f = functional(&problem.pair, &problem.mode(), &a)?;
    Ok(format!(
        "{}\nperimeter {}\nmu_plus {}\nmu_minus {}\n",
        f.value, f.perimeter, f.mu_plus, f.mu_minus
    ))
}

pub fn cmd_minimize(common: &Common, out: &Path) -> Result<String> {
    let (problem, cap) = load(common)?;
    let result = match &problem.kind {
        ProblemKind::Free => solve_energy(&assemble(&problem.pair, &problem.mode())?, cap)?,
        ProblemKind::Obstacle { inner, outer } => {
            let outer = outer.intersection(problem.region.mask())?;
            solve_obstacle(inner, &outer, &problem.pair, cap)?
        }
        ProblemKind::Dirichlet { a0, omega } => solve_dirichlet(a0, omega, &problem.pair, cap)?,
        ProblemKind::Volume { v } => solve_volume(*v, &problem.pair, &problem.region, cap)?,
        ProblemKind::Ic(_) | ProblemKind::Capacity(_) => {
            return Err(Error::Validation(
                "ic and capacity problems are solved by `perivar ic`".into(),
            ))
        }
    };
    prepare(out)?;
    fs::write(out.join("minimizer.pgm"), write_mask(&result.minimizer))?;
    write_json(&out.join("result.json"), &result)?;
    Ok(format!("{}\n", result.value))
}

fn ic_variant(problem: &Problem) -> Result<ICVariant> {
    if !problem.pair.plus.is_zero() {
        return Err(Error::Validation("isoperimetric tests read mu_minus; mu_plus must be empty".into()));
    }
    match &problem.kind {
        ProblemKind::Ic(v) => Ok(v.clone()),
        _ => Err(Error::Validation("expected a problem of kind \"ic\"".into())),
    }
}

fn constant(flag: &Option<String>, problem: &Problem) -> Result<Rational> {
    match flag {
        Some(s) => {
            let c = parse_rational(s)?;
            if num_traits::Signed::is_negative(&c) {
                return Err(Error::NegativeWeight(format!("constant c = {c}")));
            }
            Ok(c)
        }
        None => Ok(problem.c.clone()),
    }
}

pub fn cmd_ic(test: IcCommand) -> Result<String> {
    match test {
        IcCommand::Strong(args) => {
            let (problem, cap) = load(&args.common)?;
            let variant = ic_variant(&problem)?;
            let c = constant(&args.c, &problem)?;
            let r = strong_excess(&problem.pair.minus, &c, &variant, cap)?;
            prepare(&args.out)?;
            fs::write(args.out.join("witness.pgm"), write_mask(&r.witness))?;
            write_json(
                &args.out.join("report.json"),
                &json!({
                    "variant": variant.name(),
                    "c": c.to_string(),
                    "excess": r.excess.to_string(),
                    "holds": r.holds(),
                    "method": r.method,
                    "witness_volume": r.witness.volume(),
                }),
            )?;
            Ok(format!("{}\n", r.excess))
        }
        IcCommand::Profile { args, v_max } => {
            let (problem, cap) = load(&args.common)?;
            let variant = ic_variant(&problem)?;
            let c = constant(&args.c, &problem)?;
            let v_max = v_max.or(problem.v_max).unwrap_or(problem.domain.cell_count());
            let p = small_volume_profile(&problem.pair.minus, &c, &variant, v_max, cap)?;
            prepare(&args.out)?;
            write_json(&args.out.join("report.json"), &p)?;
            let mut w = csv::Writer::from_path(args.out.join("profile.csv"))?;
            w.write_record(["v", "phi", "method"])?;
            for e in &p.entries {
                let method = serde_json::to_value(e.method)?;
                w.write_record([
                    e.v.to_string(),
                    e.phi.to_string(),
                    method.as_str().unwrap_or_default().to_string(),
                ])?;
            }
            w.flush()?;
            Ok(match p.first_positive() {
                Some(v) => format!("first positive at v = {v}\n"),
                None => "no positive entry\n".into(),
            })
        }
        IcCommand::Divcert(args) => {
            let (problem, _) = load(&args.common)?;
            let variant = ic_variant(&problem)?;
            if !matches!(variant, ICVariant::Plain) {
                return Err(Error::Validation("divergence certificates use the plain variant".into()));
            }
            let c = constant(&args.c, &problem)?;
            prepare(&args.out)?;
            match divergence_certificate(&problem.pair.minus, &c)? {
                DivergenceOutcome::Feasible(cert) => {
                    write_json(&args.out.join("certificate.json"), &cert)?;
                    write_json(
                        &args.out.join("report.json"),
                        &json!({"feasible": true, "c": c.to_string()}),
                    )?;
                    Ok("feasible\n".into())
                }
                DivergenceOutcome::Infeasible(inf) => {
                    fs::write(args.out.join("witness.pgm"), write_mask(&inf.witness))?;
                    let heavy: Vec<FaceRef> =
                        inf.heavy_faces.iter().map(|&f| FaceRef::of(&problem.domain, f)).collect();
                    write_json(
                        &args.out.join("report.json"),
                        &json!({
                            "feasible": false,
                            "c": c.to_string(),
                            "excess": inf.excess.to_string(),
                            "routed": inf.routed.to_string(),
                            "supply": inf.supply.to_string(),
                            "heavy_faces": heavy,
                        }),
                    )?;
                    Ok(format!("infeasible, excess {}\n", inf.excess))
                }
            }
        }
        IcCommand::Capacity { common, out } => {
            let (problem, _) = load(&common)?;
            let ProblemKind::Capacity(target) = &problem.kind else {
                return Err(Error::Validation("expected a problem of kind \"capacity\"".into()));
            };
            let r = capacity(target)?;
            prepare(&out)?;
            fs::write(out.join("witness.pgm"), write_mask(&r.witness))?;
            write_json(
                &out.join("report.json"),
                &json!({"value": r.value.to_string(), "nodes": r.nodes}),
            )?;
            Ok(format!("{}\n", r.value))
        }
    }
}

pub fn cmd_experiment(name: &str, params: &[String], out: &Path) -> Result<String> {
    let mut map = BTreeMap::new();
    for p in params {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| Error::Validation(format!("parameter {p:?} is not key=value")))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    let mut report = run_named(name, &map)?;
    write_scenario(&mut report, out)?;
    let mut text = String::new();
    for (k, v) in &report.verdicts {
        text.push_str(&format!("{k}: {v}\n"));
    }
    Ok(text)
}

pub fn cmd_render(problem: &Path, set: Option<&Path>, out: &Path, title: &str) -> Result<String> {
    let problem = ProblemFile::read(problem)?.to_problem()?;
    let set: Option<CellSet> = match set {
        Some(p) => Some(read_mask(&fs::read_to_string(p)?, &problem.domain)?),
        None => None,
    };
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(out, svg::render(set.as_ref(), &problem.pair, title))?;
    Ok(String::new())
}

/// Machine-readable error detail for stderr, when there is any.
pub fn error_detail(e: &Error) -> Option<String> {
    match e {
        Error::NonSubmodular(report) => serde_json::to_string_pretty(report).ok(),
        _ => None,
    }
}
