//! Seeded random teams, with planted instances for the mutual formula.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::team::{Team, TeamBuilder};

const NAMES: [&str; 6] = ["x", "y", "z", "u", "v", "w"];

/// Expected number of edges per tree in planted instances.
const MEAN_TREE_EDGES: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bias {
    /// Team graph is a forest; with `unicyclic`, some trees get one extra
    /// edge closing a cycle. Every component keeps `|E| ≤ |V|`.
    PlantedSatisfiable {
        #[serde(default)]
        unicyclic: bool,
    },
    /// A satisfiable forest plus one `K_{2,3}` component (two independent
    /// cycles, so `|E| > |V|`).
    PlantedUnsatisfiable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub rows: usize,
    /// Values per column; a single entry applies to every column. Ignored by
    /// planted modes, which allocate node values as needed.
    #[serde(default)]
    pub ranges: Vec<usize>,
    #[serde(default = "default_columns")]
    pub columns: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bias: Option<Bias>,
}

fn default_columns() -> usize {
    2
}

impl GeneratorConfig {
    pub fn uniform(rows: usize, ranges: Vec<usize>, seed: u64) -> Self {
        Self {
            rows,
            columns: ranges.len(),
            ranges,
            seed,
            bias: None,
        }
    }

    pub fn planted(rows: usize, bias: Bias, seed: u64) -> Self {
        Self {
            rows,
            ranges: Vec::new(),
            columns: 2,
            seed,
            bias: Some(bias),
        }
    }

    fn column_ranges(&self) -> Result<Vec<usize>> {
        match self.ranges.len() {
            1 => Ok(vec![self.ranges[0]; self.columns]),
            n if n == self.columns => Ok(self.ranges.clone()),
            n => Err(Error::Config(format!("{n} ranges given for {} columns", self.columns))),
        }
    }
}

pub fn column_names(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| NAMES.get(i).map_or_else(|| format!("c{i}"), |s| s.to_string()))
        .collect()
}

/// Deterministic for a fixed config.
pub fn generate_team(cfg: &GeneratorConfig) -> Result<Team> {
    if cfg.columns == 0 {
        return Err(Error::Config("at least one column is required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    match cfg.bias {
        None => uniform(cfg, &mut rng),
        Some(bias) => {
            if cfg.columns != 2 {
                return Err(Error::Config("planted modes produce two-column teams".into()));
            }
            planted(cfg.rows, bias, &mut rng)
        }
    }
}

fn uniform(cfg: &GeneratorConfig, rng: &mut ChaCha8Rng) -> Result<Team> {
    let ranges = cfg.column_ranges()?;
    let space = ranges.iter().try_fold(1usize, |acc, &r| acc.checked_mul(r));
    if space.is_some_and(|s| cfg.rows > s) {
        return Err(Error::Config(format!(
            "{} distinct rows requested but the ranges allow only {}",
            cfg.rows,
            space.unwrap_or(0)
        )));
    }
    let mut b = TeamBuilder::new(column_names(cfg.columns))?;
    let dense = space.is_some_and(|s| s <= 2 * cfg.rows.max(1) && s <= 1 << 20);
    if dense {
        let space = space.unwrap_or(0);
        let mut all: Vec<usize> = (0..space).collect();
        all.shuffle(rng);
        for code in all.into_iter().take(cfg.rows) {
            let mut rest = code;
            let row: Vec<String> = ranges
                .iter()
                .map(|&r| {
                    let v = rest % r;
                    rest /= r;
                    v.to_string()
                })
                .collect();
            b.push_row(row)?;
        }
    } else {
        let mut added = 0;
        while added < cfg.rows {
            let row: Vec<String> = ranges.iter().map(|&r| rng.gen_range(0..r).to_string()).collect();
            if b.push_row(row)? {
                added += 1;
            }
        }
    }
    let mut t = b.build();
    // Rejection sampling counts its retries as duplicates; they are not input.
    t = t.subteam(&(0..t.len()).collect::<Vec<_>>());
    Ok(t)
}

fn planted(rows: usize, bias: Bias, rng: &mut ChaCha8Rng) -> Result<Team> {
    let (forest_rows, inject) = match bias {
        Bias::PlantedSatisfiable { .. } => (rows, false),
        Bias::PlantedUnsatisfiable => {
            if rows < 6 {
                return Err(Error::Config("planted-unsatisfiable needs at least 6 rows".into()));
            }
            (rows - 6, true)
        }
    };
    let unicyclic = matches!(bias, Bias::PlantedSatisfiable { unicyclic: true });

    // Separate id counters for the x side and the y side.
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(rows);
    let mut next = [0u32, 0u32];
    let mut fresh = |side: usize| {
        next[side] += 1;
        next[side] - 1
    };
    let mut tree_x: Vec<u32> = Vec::new();
    let mut tree_y: Vec<u32> = Vec::new();
    let mut tree_edges: HashSet<(u32, u32)> = HashSet::new();
    while edges.len() < forest_rows {
        let new_tree = tree_x.is_empty() || rng.gen_ratio(1, MEAN_TREE_EDGES);
        if new_tree {
            if unicyclic && tree_x.len() >= 2 && tree_y.len() >= 2 {
                // Close one cycle in the finished tree, if some pair is free.
                for _ in 0..8 {
                    let e = (*tree_x.choose(rng).unwrap(), *tree_y.choose(rng).unwrap());
                    if !tree_edges.contains(&e) {
                        edges.push(e);
                        break;
                    }
                }
                if edges.len() >= forest_rows {
                    break;
                }
            }
            tree_x.clear();
            tree_y.clear();
            tree_edges.clear();
            let e = (fresh(0), fresh(1));
            tree_x.push(e.0);
            tree_y.push(e.1);
            if unicyclic {
                tree_edges.insert(e);
            }
            edges.push(e);
            continue;
        }
        let e = if rng.gen_bool(0.5) {
            let x = fresh(0);
            tree_x.push(x);
            (x, *tree_y.choose(rng).unwrap())
        } else {
            let y = fresh(1);
            tree_y.push(y);
            (*tree_x.choose(rng).unwrap(), y)
        };
        if unicyclic {
            tree_edges.insert(e);
        }
        edges.push(e);
    }
    if inject {
        let xs = [fresh(0), fresh(0)];
        let ys = [fresh(1), fresh(1), fresh(1)];
        for &x in &xs {
            for &y in &ys {
                edges.push((x, y));
            }
        }
    }
    edges.shuffle(rng);
    let mut b = TeamBuilder::new(["x", "y"])?;
    for (x, y) in edges {
        b.push_row([format!("a{x}"), format!("b{y}")])?;
    }
    Ok(b.build())
}
