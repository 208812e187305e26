//! `depsplit` command line. [`run`] returns the process exit code: 0 when the
//! question asked is answered "yes" (satisfied, satisfiable), 1 for "no", 2
//! for usage and input errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use depsplit::bench::{run_suite, run_suite_sizes, Suite};
use depsplit::coherence::search::{search_coherence_level, DEFAULT_MAX_RANGE, DEFAULT_MAX_ROWS};
use depsplit::coherence::{counterexample_team, incoherence_family, family_formula};
use depsplit::generate::{generate_team, GeneratorConfig};
use depsplit::io::{load_cnf, load_mtdf, load_team, load_ufa, save_team, team_to_csv_string, TeamFormat};
use depsplit::reductions::{
    mtdf_to_team, solve_mtdf, team_to_mtdf, twosat_to_team_chain, twosat_to_team_disjoint,
    twosat_to_team_shared_target, ufa_complement_to_team,
};
use depsplit::report::{check_with_report, CheckOptions};
use depsplit::{classify, DisjunctionFormula, DispatchOptions, EngineSelection, FormulaPattern, Team};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "depsplit", version)]
#[command(about = "Decide, certify and classify disjunctions of two dependence atoms", long_about = None)]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Machine-readable JSON output
    #[arg(long, global = true)]
    json: bool,

    /// Engine override for `check`
    #[arg(long, global = true, value_enum, default_value_t = EngineArg::Auto)]
    engine: EngineArg,

    /// Also run the 2SAT engine and fail if it disagrees
    #[arg(long, global = true)]
    verify: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum EngineArg {
    Auto,
    Brute,
    #[value(name = "2sat")]
    TwoSat,
    Graph,
    Coherent,
}

impl From<EngineArg> for EngineSelection {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Auto => EngineSelection::Auto,
            EngineArg::Brute => EngineSelection::Brute,
            EngineArg::TwoSat => EngineSelection::TwoSat,
            EngineArg::Graph => EngineSelection::Graph,
            EngineArg::Coherent => EngineSelection::Coherent,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for TeamFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => TeamFormat::Csv,
            FormatArg::Json => TeamFormat::Json,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ReduceKind {
    #[value(name = "2sat-shared")]
    TwoSatShared,
    #[value(name = "2sat-chain")]
    TwoSatChain,
    #[value(name = "2sat-disjoint")]
    TwoSatDisjoint,
    Ufa,
    MtdfToTeam,
    TeamToMtdf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Model-check a team against a formula
    Check {
        team: PathBuf,
        formula: String,
        /// Team file format; defaults to the extension
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Complexity, coherence and engine for a formula
    Classify { formula: String },
    /// Translate an instance along one of the hardness reductions
    Reduce {
        #[arg(value_enum)]
        kind: ReduceKind,
        instance: PathBuf,
        /// Write the result here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve an mtdf-2SAT instance (JSON clique form)
    MtdfSat { instance: PathBuf },
    /// Emit a coherence counterexample, or an incoherence family member with --n
    Witness {
        pattern: String,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Search for the coherence level of a formula
    Coherence {
        formula: String,
        #[arg(long, default_value_t = DEFAULT_MAX_ROWS)]
        max_rows: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_RANGE)]
        max_range: usize,
    },
    /// Generate a team from a JSON GeneratorConfig
    Gen {
        config: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a scaling suite: mutual-scaling, 2sat-scaling or coherent-scaling
    Bench {
        suite: String,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated row counts replacing the suite's defaults
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_YES };
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match execute(&cli, &mut out) {
        Ok(code) => code,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}

fn parse_formula_arg(text: &str) -> Result<DisjunctionFormula> {
    text.parse().with_context(|| format!("parsing formula `{text}`"))
}

fn emit_json(out: &mut impl Write, value: &impl serde::Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn emit_team(out: &mut impl Write, team: &Team, dest: Option<&Path>, json: bool) -> Result<()> {
    match dest {
        Some(p) => {
            let format = json.then_some(TeamFormat::Json);
            save_team(team, p, format).with_context(|| format!("writing {}", p.display()))?;
            log::info!("wrote {} rows to {}", team.len(), p.display());
        }
        None if json => {
            let rows: Vec<Vec<String>> = (0..team.len()).map(|r| team.row_text(r)).collect();
            emit_json(out, &json!({ "vars": team.vars(), "rows": rows }))?;
        }
        None => out.write_all(team_to_csv_string(team).as_bytes())?,
    }
    Ok(())
}

fn execute(cli: &Cli, out: &mut impl Write) -> Result<i32> {
    let g = &cli.global;
    match &cli.command {
        Command::Check { team, formula, format } => {
            let f = parse_formula_arg(formula)?;
            let t = load_team(team, format.map(Into::into)).with_context(|| format!("loading {}", team.display()))?;
            let opts = CheckOptions {
                dispatch: DispatchOptions {
                    engine: g.engine.into(),
                    brute_cap: None,
                },
                cross_check: g.verify,
                source: Some(team.display().to_string()),
            };
            let report = check_with_report(&t, &f, &opts)?;
            if g.json {
                writeln!(out, "{}", report.to_json())?;
            } else {
                write!(out, "{}", report.render_text())?;
            }
            Ok(if report.satisfied { EXIT_YES } else { EXIT_NO })
        }
        Command::Classify { formula } => {
            let f = parse_formula_arg(formula)?;
            let c = classify(&f);
            if g.json {
                emit_json(out, &json!({ "formula": f.to_string(), "classification": c }))?;
            } else {
                writeln!(out, "{c}")?;
            }
            Ok(EXIT_YES)
        }
        Command::Reduce { kind, instance, output } => {
            let ctx = || format!("loading {}", instance.display());
            let team = match kind {
                ReduceKind::TwoSatShared => twosat_to_team_shared_target(&load_cnf(instance).with_context(ctx)?)?,
                ReduceKind::TwoSatChain => twosat_to_team_chain(&load_cnf(instance).with_context(ctx)?)?,
                ReduceKind::TwoSatDisjoint => twosat_to_team_disjoint(&load_cnf(instance).with_context(ctx)?)?,
                ReduceKind::Ufa => ufa_complement_to_team(&load_ufa(instance).with_context(ctx)?)?,
                ReduceKind::MtdfToTeam => mtdf_to_team(&load_mtdf(instance).with_context(ctx)?)?,
                ReduceKind::TeamToMtdf => {
                    let m = team_to_mtdf(&load_team(instance, None).with_context(ctx)?)?;
                    let text = serde_json::to_string_pretty(&m)?;
                    match output {
                        Some(p) => std::fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))?,
                        None => writeln!(out, "{text}")?,
                    }
                    return Ok(EXIT_YES);
                }
            };
            emit_team(out, &team, output.as_deref(), g.json)?;
            Ok(EXIT_YES)
        }
        Command::MtdfSat { instance } => {
            let m = load_mtdf(instance).with_context(|| format!("loading {}", instance.display()))?;
            let sol = solve_mtdf(&m)?;
            if g.json {
                emit_json(out, &sol)?;
            } else if let Some(a) = &sol.assignment {
                let bits: Vec<String> = a.iter().enumerate().map(|(i, &b)| format!("{i}={}", u8::from(b))).collect();
                writeln!(out, "satisfiable\n{}", bits.join(" "))?;
            } else {
                writeln!(out, "unsatisfiable")?;
            }
            Ok(if sol.satisfiable { EXIT_YES } else { EXIT_NO })
        }
        Command::Witness { pattern, n } => {
            let p: FormulaPattern = pattern.parse()?;
            let (team, f) = match n {
                Some(n) => (incoherence_family(p, *n)?, family_formula(p)?),
                None => {
                    let w = counterexample_team(p)?;
                    (w.team, w.formula)
                }
            };
            log::info!("{} rows for {f}", team.len());
            emit_team(out, &team, None, g.json)?;
            Ok(EXIT_YES)
        }
        Command::Coherence {
            formula,
            max_rows,
            max_range,
        } => {
            let f = parse_formula_arg(formula)?;
            let r = search_coherence_level(&f, *max_rows, *max_range)?;
            if g.json {
                emit_json(out, &json!({ "formula": f.to_string(), "search": r }))?;
            } else {
                writeln!(out, "{f}: {} ({})", r.estimate, r.bounds())?;
                writeln!(out, "critical sizes: {:?}", r.critical_sizes)?;
                if let Some(w) = &r.witness {
                    writeln!(out, "largest critical team:")?;
                    out.write_all(team_to_csv_string(w).as_bytes())?;
                }
            }
            Ok(EXIT_YES)
        }
        Command::Gen { config, output } => {
            let text = std::fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
            let cfg: GeneratorConfig = serde_json::from_str(&text).context("parsing generator config")?;
            let team = generate_team(&cfg)?;
            emit_team(out, &team, output.as_deref(), g.json)?;
            Ok(EXIT_YES)
        }
        Command::Bench { suite, reps, seed, sizes } => {
            let s: Suite = suite.parse()?;
            if *reps == 0 {
                bail!("--reps must be at least 1");
            }
            let report = if sizes.is_empty() {
                run_suite(s, *reps, *seed)?
            } else {
                run_suite_sizes(s, sizes, *reps, *seed)?
            };
            if g.json {
                emit_json(out, &report)?;
            } else {
                write!(out, "{}", report.render_text())?;
            }
            Ok(EXIT_YES)
        }
    }
}
