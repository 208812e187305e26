//! Scaling runs over generated instances.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engines::coherent::{check_coherent_case, check_coherent_naive};
use crate::engines::graph::check_mutual_unary;
use crate::engines::twosat::check_via_2sat;
use crate::engines::{EngineStats, Verdict};
use crate::error::{Error, Result};
use crate::formula::DisjunctionFormula;
use crate::generate::{generate_team, Bias, GeneratorConfig};
use crate::team::{Team, TeamBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    MutualScaling,
    #[serde(rename = "2sat-scaling")]
    TwoSatScaling,
    CoherentScaling,
}

impl Suite {
    pub const ALL: [Suite; 3] = [Suite::MutualScaling, Suite::TwoSatScaling, Suite::CoherentScaling];

    pub fn name(self) -> &'static str {
        match self {
            Suite::MutualScaling => "mutual-scaling",
            Suite::TwoSatScaling => "2sat-scaling",
            Suite::CoherentScaling => "coherent-scaling",
        }
    }

    /// Row counts, doubling.
    pub fn sizes(self) -> Vec<usize> {
        match self {
            Suite::MutualScaling => (0..7).map(|i| 15_625 << i).collect(),
            Suite::TwoSatScaling => vec![100, 200, 400, 800, 1600, 3000],
            Suite::CoherentScaling => vec![8, 16, 32, 64],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown bench suite `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchPoint {
    pub rows: usize,
    pub engine: String,
    /// Median over the repetitions.
    pub millis: f64,
    pub satisfied: bool,
    pub stats: EngineStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub suite: Suite,
    pub repetitions: usize,
    pub points: Vec<BenchPoint>,
}

impl BenchReport {
    /// `time(2n) / time(n)` for consecutive points of one engine whose sizes
    /// exactly double.
    pub fn doubling_ratios(&self, engine: &str) -> Vec<f64> {
        let pts: Vec<&BenchPoint> = self.points.iter().filter(|p| p.engine == engine).collect();
        pts.windows(2)
            .filter(|w| w[1].rows == 2 * w[0].rows && w[0].millis > 0.0)
            .map(|w| w[1].millis / w[0].millis)
            .collect()
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("{} (median of {})\n", self.suite, self.repetitions);
        for p in &self.points {
            out.push_str(&format!(
                "{:>9} rows  {:<14} {:>12.3} ms  {}\n",
                p.rows,
                p.engine,
                p.millis,
                if p.satisfied { "sat" } else { "unsat" }
            ));
        }
        out
    }
}

fn median(mut v: Vec<Duration>) -> Duration {
    v.sort();
    v[v.len() / 2]
}

type Job<'a> = (usize, &'static str, Box<dyn FnMut() -> Result<Verdict> + 'a>);

/// Warms every job up once, then times `reps` rounds, each round running
/// every job once. Interleaving spreads machine noise evenly over the sizes
/// instead of letting a slow patch land on one of them.
fn measure(jobs: &mut [Job<'_>], reps: usize) -> Result<Vec<BenchPoint>> {
    let mut last = Vec::with_capacity(jobs.len());
    for (_, _, run) in jobs.iter_mut() {
        last.push(run()?);
    }
    let mut times = vec![Vec::with_capacity(reps); jobs.len()];
    for _ in 0..reps.max(1) {
        for (i, (_, _, run)) in jobs.iter_mut().enumerate() {
            let start = Instant::now();
            last[i] = run()?;
            times[i].push(start.elapsed());
        }
    }
    Ok(jobs
        .iter()
        .zip(last)
        .zip(times)
        .map(|(((rows, engine, _), v), t)| BenchPoint {
            rows: *rows,
            engine: engine.to_string(),
            millis: median(t).as_secs_f64() * 1e3,
            satisfied: v.satisfied,
            stats: v.stats,
        })
        .collect())
}

fn formula(s: &str) -> DisjunctionFormula {
    s.parse().expect("built-in formula parses")
}

/// Two-column team for `dep(x,y) ∨ dep(z,y)`-style 2SAT load: `√n` x- and
/// z-groups make violating pairs plentiful but far from all pairs.
fn twosat_team(rows: usize, seed: u64) -> Result<Team> {
    let g = (rows as f64).sqrt().ceil() as usize + 1;
    generate_team(&GeneratorConfig::uniform(rows, vec![g, 8, g], seed))
}

/// Satisfiable team for `dep(x,y) ∨ dep(x,z)`: each row follows `y = f(x)`
/// or `z = h(x)`, the other column random.
pub fn planted_same_source(rows: usize, seed: u64) -> Result<Team> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let groups = (rows / 8).max(1);
    let mut b = TeamBuilder::new(["x", "y", "z"])?;
    while b.len() < rows {
        let x = rng.gen_range(0..groups);
        let free = rng.gen_range(0..1_000_000u32).to_string();
        let row = if rng.gen_bool(0.5) {
            [x.to_string(), format!("f{x}"), free]
        } else {
            [x.to_string(), free, format!("h{x}")]
        };
        b.push_row(row)?;
    }
    Ok(b.build())
}

pub fn run_suite(suite: Suite, reps: usize, seed: u64) -> Result<BenchReport> {
    run_suite_sizes(suite, &suite.sizes(), reps, seed)
}

pub fn run_suite_sizes(suite: Suite, sizes: &[usize], reps: usize, seed: u64) -> Result<BenchReport> {
    let f = formula(match suite {
        Suite::MutualScaling => "dep(x,y) | dep(y,x)",
        Suite::TwoSatScaling => "dep(x,y) | dep(z,y)",
        Suite::CoherentScaling => "dep(x,y) | dep(x,z)",
    });
    let teams = sizes
        .iter()
        .map(|&n| match suite {
            Suite::MutualScaling => generate_team(&GeneratorConfig::planted(
                n,
                Bias::PlantedSatisfiable { unicyclic: true },
                seed,
            )),
            Suite::TwoSatScaling => twosat_team(n, seed),
            Suite::CoherentScaling => planted_same_source(n, seed),
        })
        .collect::<Result<Vec<Team>>>()?;
    log::info!("{suite}: {} instances generated", teams.len());
    let f = &f;
    let mut jobs: Vec<Job<'_>> = Vec::new();
    for (&n, t) in sizes.iter().zip(&teams) {
        match suite {
            Suite::MutualScaling => jobs.push((n, "graph", Box::new(move || check_mutual_unary(t, f)))),
            Suite::TwoSatScaling => jobs.push((n, "2sat", Box::new(move || check_via_2sat(t, f)))),
            Suite::CoherentScaling => {
                jobs.push((n, "coherent", Box::new(move || check_coherent_case(t, f, 4))));
                jobs.push((n, "coherent-naive", Box::new(move || check_coherent_naive(t, f, 4))));
                jobs.push((n, "2sat", Box::new(move || check_via_2sat(t, f))));
            }
        }
    }
    Ok(BenchReport {
        suite,
        repetitions: reps.max(1),
        points: measure(&mut jobs, reps)?,
    })
}
