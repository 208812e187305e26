//! One PASS/FAIL line per acceptance criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` are reported as FAIL without failing
//! the test run; each entry says why the expected value cannot be met. Any
//! other failure fails the test.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::*;
use depsplit::bench::{run_suite_sizes, Suite};
use depsplit::coherence::search::{search_coherence_level, LevelEstimate, DEFAULT_MAX_RANGE, DEFAULT_MAX_ROWS};
use depsplit::coherence::{counterexample_team, family_formula, incoherence_family, verify_incoherence_witness};
use depsplit::io::{load_mtdf, load_team};
use depsplit::reductions::{
    chain_formula, disjoint_formula, mtdf_to_team, shared_target_formula, solve_mtdf, team_to_mtdf,
    twosat_to_team_chain, twosat_to_team_disjoint, twosat_to_team_shared_target, ufa_complement_to_team,
    UfaInstance,
};
use depsplit::{
    check_bruteforce, check_via_2sat, classify, dispatch, verify_split, Coherence, Complexity, ConstancyMixKind,
    FormulaPattern, Team, TeamBuilder,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KNOWN_FAILURES: &[(usize, &str)] = &[(
    5,
    "dep(x)|dep(y,z), dep(y)|dep(x,y) and dep(x,z)|dep(x,y,u) have 6-row critical teams; \
     the stated level 4 is refuted by an oracle-checked witness",
)];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn mutual() -> depsplit::DisjunctionFormula {
    formula("dep(x,y) | dep(y,x)")
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0001);
    let mut seen = std::collections::HashSet::new();
    let mut disagreements = Vec::new();
    let mut bad_certs = 0;
    let total = 2400;
    for i in 0..total {
        let f = if i % 2 == 0 {
            formula(PATTERN_FORMULAS[(i / 2) % PATTERN_FORMULAS.len()])
        } else {
            random_formula(&mut rng, &VARS)
        };
        let cols = rng.gen_range(1..=4);
        let mut vars = f.free_variables();
        for v in VARS {
            if vars.len() < cols && !vars.contains(&v) {
                vars.push(v);
            }
        }
        let team = random_team(&mut rng, &vars, 12, 4);
        seen.insert(classify(&f).pattern);
        let plain = Plain::of(&team);
        let expected = plain.satisfies(&f);
        let brute = check_bruteforce(&team, &f).unwrap();
        let twosat = check_via_2sat(&team, &f).unwrap();
        let auto = dispatch(&team, &f).unwrap();
        for v in [&brute, &twosat, &auto] {
            if v.satisfied != expected {
                disagreements.push(format!("{f} on {} rows: {} says {}", team.len(), v.engine, v.satisfied));
            }
            if let Some(c) = &v.certificate {
                if !plain.split_valid(&f, &c.left_rows, &c.right_rows) {
                    bad_certs += 1;
                }
            }
        }
    }
    let all = FormulaPattern::ALL.len();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        disagreements.is_empty() && bad_certs == 0 && seen.len() == all && secs < 120.0,
        format!(
            "{total} instances, {}/{all} patterns, {} disagreements, {bad_certs} invalid certificates, {secs:.1}s{}",
            seen.len(),
            disagreements.len(),
            disagreements.first().map(|d| format!("; first: {d}")).unwrap_or_default()
        ),
    )
}

fn table_regression() -> Outcome {
    use Complexity::*;
    let rows: [(&str, Complexity, Coherence); 6] = [
        ("dep(x,y) | dep(z,u)", NlComplete, Coherence::Incoherent),
        ("dep(x,z) | dep(y,z)", NlComplete, Coherence::Incoherent),
        ("dep(x,y) | dep(y,z)", NlComplete, Coherence::Incoherent),
        ("dep(x,y) | dep(y,x)", LComplete, Coherence::Incoherent),
        ("dep(x,y) | dep(x,y)", FoDefinable, Coherence::Level(3)),
        ("dep(x,y) | dep(x,z)", FoDefinable, Coherence::Level(4)),
    ];
    let mut wrong = Vec::new();
    for (text, complexity, coherence) in rows {
        let c = classify(&formula(text));
        if c.complexity != complexity || c.coherence != coherence {
            wrong.push(format!("{text}: {c}"));
        }
    }
    let shown = classify(&formula("dep(x,z)|dep(y,z)")).to_string();
    if shown != "NL-complete, incoherent, engine=2sat" {
        wrong.push(format!("display `{shown}`"));
    }
    outcome(wrong.is_empty(), format!("6 rows, mismatches: {wrong:?}"))
}

/// Fails on the whole team, holds on every 3-row subteam (oracle only).
fn is_three_counterexample(team: &Team, f: &depsplit::DisjunctionFormula) -> bool {
    let p = Plain::of(team);
    !p.satisfies(f)
        && !dispatch(team, f).unwrap().satisfied
        && subsets(p.len(), 3).iter().all(|s| p.splits(f, s))
}

fn fixture_verdicts() -> Outcome {
    let gt = load_team(fixture("gt.csv"), None).unwrap();
    let v = dispatch(&gt, &mutual()).unwrap();
    let cert = v.certificate.clone().unwrap_or_default();
    let gt_ok = v.satisfied
        && verify_split(&gt, &cert, &mutual()).unwrap()
        && Plain::of(&gt).split_valid(&mutual(), &cert.left_rows, &cert.right_rows);

    let figs = [
        ("team_a.csv", "dep(x,y) | dep(x,z)", FormulaPattern::SameSourceUnary),
        ("team_b.csv", "dep(x) | dep(y,z)", FormulaPattern::ConstancyMix(ConstancyMixKind::Disjoint)),
        ("team_c.csv", "dep(x) | dep(x,y)", FormulaPattern::ConstancyMix(ConstancyMixKind::OnDeterminer)),
    ];
    let mut bad = Vec::new();
    for (file, text, pattern) in figs {
        let t = load_team(fixture(file), None).unwrap();
        let f = formula(text);
        if !is_three_counterexample(&t, &f) || !counterexample_team(pattern).unwrap().team.same_rows(&t) {
            bad.push(file);
        }
    }
    // Team (d) is printed with its column headers swapped: as printed, x is
    // a key and dep(x,y) alone covers it.
    let f_d = formula("dep(y) | dep(x,y)");
    let printed = load_team(fixture("team_d.csv"), None).unwrap();
    let printed_sat = oracle(&printed, &f_d);
    let swapped = {
        let p = Plain::of(&printed);
        let mut b = TeamBuilder::new(["y", "x"]).unwrap();
        for r in 0..p.len() {
            b.push_row(printed.row_text(r)).unwrap();
        }
        b.build()
    };
    if !is_three_counterexample(&swapped, &f_d) {
        bad.push("team_d.csv (headers swapped)");
    }
    outcome(
        gt_ok && bad.is_empty(),
        format!(
            "G_T split {}; (a)-(c) counterexamples{}; (d) counterexample with x/y headers swapped (as printed it is {})",
            if gt_ok { "verified" } else { "INVALID" },
            if bad.is_empty() { String::new() } else { format!(", failing: {bad:?}") },
            if printed_sat { "satisfied" } else { "unsatisfied" }
        ),
    )
}

fn incoherence_families() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for p in [FormulaPattern::MutualUnary, FormulaPattern::ChainUnary, FormulaPattern::SharedTargetUnary] {
        let start = Instant::now();
        let f = family_formula(p).unwrap();
        for n in [4, 6, 8, 10] {
            let t = incoherence_family(p, n).unwrap();
            let plain = Plain::of(&t);
            let full_fails = !plain.satisfies(&f) && !dispatch(&t, &f).unwrap().satisfied;
            let subs = subsets(t.len(), n);
            let subs_pass = subs.iter().all(|s| plain.splits(&f, s));
            let w = depsplit::coherence::CoherenceWitness {
                team: t.clone(),
                formula: f.clone(),
                k: n,
            };
            let lib_ok = verify_incoherence_witness(&w).unwrap();
            if !(full_fails && subs_pass && lib_ok) {
                ok = false;
                notes.push(format!("{p} n={n}: full fails {full_fails}, subteams pass {subs_pass}"));
            }
        }
        let secs = start.elapsed().as_secs_f64();
        ok &= secs < 60.0;
        notes.push(format!("{p} {secs:.2}s"));
    }
    outcome(ok, format!("n=4,6,8,10: {}", notes.join(", ")))
}

/// The witness fails and each one-row-smaller subteam passes, by oracle.
fn critical_by_oracle(team: &Team, f: &depsplit::DisjunctionFormula) -> bool {
    let p = Plain::of(team);
    !p.satisfies(f) && subsets(p.len(), p.len() - 1).iter().all(|s| p.splits(f, s))
}

fn coherence_levels() -> Outcome {
    let expected: [(&str, usize); 7] = [
        ("dep(x,y) | dep(x,y)", 3),
        ("dep(x,y) | dep(x,z)", 4),
        ("dep(y) | dep(z)", 4),
        ("dep(x) | dep(y,z)", 4),
        ("dep(x) | dep(x,y)", 4),
        ("dep(y) | dep(x,y)", 4),
        ("dep(x,z) | dep(x,y,u)", 4),
    ];
    let mut mismatches = Vec::new();
    for (text, level) in expected {
        let f = formula(text);
        let r = search_coherence_level(&f, DEFAULT_MAX_ROWS, DEFAULT_MAX_RANGE).unwrap();
        if r.estimate != LevelEstimate::Level(level) {
            let refuted = r
                .witness
                .as_ref()
                .is_some_and(|w| w.len() > level && critical_by_oracle(w, &f));
            mismatches.push(format!(
                "{text}: expected {level}, found {}{}",
                r.estimate,
                if refuted { " (critical witness oracle-verified)" } else { "" }
            ));
        }
    }
    outcome(
        mismatches.is_empty(),
        if mismatches.is_empty() {
            "all 7 levels match".to_string()
        } else {
            mismatches.join("; ")
        },
    )
}

fn reduction_soundness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0006);
    let mut wrong = Vec::new();
    let (fs, fc, fd) = (shared_target_formula(), chain_formula(), disjoint_formula());
    let mut sat_count = 0;
    for i in 0..500 {
        let cnf = random_cnf(&mut rng, 12, 20);
        let expected = cnf_satisfiable(cnf.num_props(), cnf.clauses());
        sat_count += usize::from(expected);
        let verdicts = [
            dispatch(&twosat_to_team_shared_target(&cnf).unwrap(), &fs).unwrap().satisfied,
            dispatch(&twosat_to_team_chain(&cnf).unwrap(), &fc).unwrap().satisfied,
            dispatch(&twosat_to_team_disjoint(&cnf).unwrap(), &fd).unwrap().satisfied,
        ];
        if verdicts.iter().any(|&v| v != expected) {
            wrong.push(format!("cnf #{i}: sat {expected}, teams {verdicts:?}"));
        }
    }
    let mut connected_count = 0;
    for i in 0..200 {
        let nodes = rng.gen_range(2..=40);
        let edges = random_forest(&mut rng, nodes);
        let u = rng.gen_range(0..nodes);
        let v = (u + rng.gen_range(1..nodes)) % nodes;
        let g = UfaInstance {
            nodes: (0..nodes).map(|k| format!("n{k}")).collect(),
            edges: edges.clone(),
            u: format!("n{u}"),
            v: format!("n{v}"),
        };
        let connected = bfs_connected(&edges, &g.u, &g.v);
        connected_count += usize::from(connected);
        let refuted = !dispatch(&ufa_complement_to_team(&g).unwrap(), &mutual()).unwrap().satisfied;
        if refuted != connected {
            wrong.push(format!("forest #{i}: connected {connected}, refuted {refuted}"));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        wrong.is_empty() && secs < 120.0,
        format!(
            "500 CNFs ({sat_count} satisfiable), 200 forests ({connected_count} connected), {} mismatches, {secs:.1}s",
            wrong.len()
        ),
    )
}

fn mtdf_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0007);
    let mut wrong = 0;
    let mut sat_count = 0;
    let trials = 1000;
    for _ in 0..trials {
        let team = random_team(&mut rng, &["x", "y"], 12, 5);
        let m = team_to_mtdf(&team).unwrap();
        let clauses = mtdf_clauses(&m.pos_cliques, &m.neg_cliques);
        let expected = cnf_satisfiable(m.num_vars, &clauses);
        let sol = solve_mtdf(&m).unwrap();
        let assignment_ok = sol.assignment.as_ref().map_or(true, |a| {
            clauses
                .iter()
                .all(|&(p, q)| a[p.var()] == p.is_positive() || a[q.var()] == q.is_positive())
        });
        sat_count += usize::from(expected);
        if sol.satisfiable != expected || !assignment_ok {
            wrong += 1;
        }
    }

    // The sample instance.
    let team = load_team(fixture("mtdf_sample.csv"), None).unwrap();
    let stored = load_mtdf(fixture("mtdf_sample.json")).unwrap();
    let from_team = team_to_mtdf(&team).unwrap();
    let round_trip = team_to_mtdf(&mtdf_to_team(&stored).unwrap()).unwrap();
    let same = from_team.canonical() == stored.canonical() && round_trip.canonical() == stored.canonical();
    let clauses = mtdf_clauses(&stored.pos_cliques, &stored.neg_cliques);
    let sol = solve_mtdf(&stored).unwrap();
    let holds = |a: &[bool]| {
        clauses
            .iter()
            .all(|&(p, q)| a[p.var()] == p.is_positive() || a[q.var()] == q.is_positive())
    };
    let engine_ok = sol.assignment.as_deref().is_some_and(holds);
    // The caption's split: s1, s3, s5 on the dep(x,y) side. A variable is
    // true when its row is on the dep(y,x) side.
    let plain = Plain::of(&team);
    let caption_split = plain.split_valid(&mutual(), &[1, 3, 5], &[0, 2, 4]);
    let caption_assignment = [true, false, true, false, true, false];
    let caption_ok = caption_split && holds(&caption_assignment);
    let engine_split = sol.verdict.certificate.as_ref().is_some_and(|c| {
        plain.split_valid(&mutual(), &c.left_rows, &c.right_rows)
    });
    let solutions = (0u32..64)
        .filter(|m| holds(&(0..6).map(|i| m >> i & 1 == 1).collect::<Vec<_>>()))
        .count();
    outcome(
        wrong == 0 && same && engine_ok && engine_split && caption_ok,
        format!(
            "{trials} instances ({sat_count} satisfiable), {wrong} mismatches; sample instance round trip {}, \
             engine assignment {}, caption split {} ({solutions} satisfying assignments in total)",
            if same { "exact" } else { "DIFFERS" },
            if engine_ok && engine_split { "valid" } else { "INVALID" },
            if caption_ok { "consistent" } else { "INCONSISTENT" },
        ),
    )
}

fn performance() -> Outcome {
    let sizes = [125_000, 250_000, 500_000, 1_000_000];
    let r = run_suite_sizes(Suite::MutualScaling, &sizes, 9, 11).unwrap();
    let all_sat = r.points.iter().all(|p| p.satisfied);
    let last = r.points.last().unwrap().millis;
    let ratios = r.doubling_ratios("graph");
    let ratios_ok = ratios.len() == 3 && ratios.iter().all(|x| (1.5..=3.0).contains(x));

    let t = run_suite_sizes(Suite::TwoSatScaling, &[3000], 1, 11).unwrap();
    let p = &t.points[0];
    let pairs = p.stats.pairs_scanned.unwrap_or(0);
    let twosat_ok = p.millis < 30_000.0 && pairs == 3000 * 2999 / 2;
    outcome(
        all_sat && last < 10_000.0 && ratios_ok && twosat_ok,
        format!(
            "mutual 10^6 rows {last:.0}ms, doubling ratios {:?}; 2sat 3000 rows {:.0}ms over {pairs} pairs",
            ratios.iter().map(|x| (x * 100.0).round() / 100.0).collect::<Vec<_>>(),
            p.millis
        ),
    )
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0009);
    let mut closure_violations = 0;
    let mut satisfied_cases = 0;
    for i in 0..1000 {
        let f = if i % 3 == 0 {
            formula(PATTERN_FORMULAS[i % PATTERN_FORMULAS.len()])
        } else {
            random_formula(&mut rng, &VARS)
        };
        let team = random_team(&mut rng, &VARS, 10, 3);
        if !dispatch(&team, &f).unwrap().satisfied {
            continue;
        }
        satisfied_cases += 1;
        let keep: Vec<usize> = (0..team.len()).filter(|_| rng.gen_bool(0.6)).collect();
        let mut subteams = vec![keep];
        subteams.extend((0..team.len()).map(|r| (0..team.len()).filter(|&s| s != r).collect()));
        for rows in subteams {
            let sub = team.subteam(&rows);
            if !dispatch(&sub, &f).unwrap().satisfied || !oracle(&sub, &f) {
                closure_violations += 1;
            }
        }
    }

    let mut locality_violations = 0;
    let wide = ["x", "y", "z", "u", "v", "w"];
    for i in 0..1000 {
        let f = if i % 3 == 0 {
            formula(PATTERN_FORMULAS[i % PATTERN_FORMULAS.len()])
        } else {
            random_formula(&mut rng, &VARS)
        };
        let team = random_team(&mut rng, &wide, 12, 3);
        let free = f.free_variables();
        let verdicts = [
            dispatch(&team, &f).unwrap().satisfied,
            dispatch(&team.restrict(&free).unwrap(), &f).unwrap().satisfied,
            dispatch(&team.restrict(&VARS).unwrap(), &f).unwrap().satisfied,
        ];
        if verdicts.iter().any(|&v| v != verdicts[0]) {
            locality_violations += 1;
        }
    }
    outcome(
        closure_violations == 0 && locality_violations == 0 && satisfied_cases > 0,
        format!(
            "downward closure: 1000 cases ({satisfied_cases} satisfied), {closure_violations} violations; \
             locality: 1000 cases, {locality_violations} violations"
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("oracle equivalence", oracle_equivalence),
        ("classification table", table_regression),
        ("stored teams", fixture_verdicts),
        ("incoherence families", incoherence_families),
        ("coherence levels by search", coherence_levels),
        ("reduction soundness", reduction_soundness),
        ("mtdf equivalence", mtdf_equivalence),
        ("performance", performance),
        ("downward closure and locality", property_suites),
    ];
    let mut unexpected = Vec::new();
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let id = i + 1;
        let start = Instant::now();
        let o = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let known = KNOWN_FAILURES.iter().find(|(k, _)| *k == id);
        println!(
            "criterion {id} [{name}]: {} ({:.1}s) — {}",
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
        match (o.pass, known) {
            (false, Some((_, why))) => println!("    known failure: {why}"),
            (false, None) => unexpected.push(id),
            (true, Some(_)) => println!("    listed as a known failure but passed"),
            (true, None) => {}
        }
    }
    if !unexpected.is_empty() {
        eprintln!("criteria failed: {unexpected:?}");
        std::process::exit(1);
    }
}
