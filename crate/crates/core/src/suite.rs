//! The twelve acceptance checks, shared by the `paper-suite` command and the
//! acceptance test target.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::complex::{independence_complex, matching_complex, SimplicialComplex};
use crate::graph::families::*;
use crate::graph::{find_claw_units, Graph};
use crate::homology::{betti, BettiProfile, SphereWedge};
use crate::morse::{
    claw_induced_matching, euler_consistent, morse_vector, toggle_labels, verify_acyclic,
    wheel_m2_matching, MorseMatching,
};
use crate::mta::{nu, post_cancel, run_mta, wheel_cancel_pair, wheel_policy};
use crate::predictions::*;

/// Torsion of H₁(M₁(K₇)) as computed by this crate's Smith normal form.
pub const K7_H1_TORSION: &[u64] = &[3];

pub const DEFAULT_SEED: u64 = 20240917;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub pass: bool,
    pub detail: Value,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "{} [{:>2}] {} ({:.2}s)",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64()
        )
    }
}

type Check = Result<(bool, Value), String>;

fn run(id: u32, name: &str, f: impl FnOnce() -> Check) -> CriterionResult {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let (pass, detail) = match out {
        Ok(v) => v,
        Err(e) => (false, json!({ "error": e })),
    };
    CriterionResult { id, name: name.to_string(), pass, detail, elapsed }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn timed<T>(f: impl FnOnce() -> Result<T, String>) -> Result<(T, Duration), String> {
    let s = Instant::now();
    let v = f()?;
    Ok((v, s.elapsed()))
}

fn m2_profile(g: &Graph) -> Result<BettiProfile, String> {
    betti(&matching_complex(g, 2).map_err(e)?).map_err(e)
}

fn is_sphere(p: &BettiProfile, d: i32) -> bool {
    *p == SphereWedge::sphere(d).profile()
}

pub fn five_edge_tree_example() -> CriterionResult {
    run(1, "two-matching example is a 2-sphere", || {
        let (p, t) = timed(|| m2_profile(&five_edge_tree()))?;
        let ok = p == BettiProfile::from_betti(&[(2, 1)]) && p.is_torsion_free();
        Ok((ok && t < Duration::from_secs(1), json!({ "profile": p.to_json() })))
    })
}

pub fn clawed_paths() -> CriterionResult {
    run(2, "clawed paths CP_0..CP_3 are spheres of dimension 2n+1", || {
        let mut ok = true;
        let mut rows = Vec::new();
        for n in 0..=3 {
            let (p, t) = timed(|| m2_profile(&clawed_path(n)))?;
            let good = is_sphere(&p, 2 * n as i32 + 1) && t < Duration::from_secs(30);
            ok &= good;
            rows.push(json!({ "n": n, "profile": p.to_json(), "match": good }));
        }
        Ok((ok, Value::Array(rows)))
    })
}

pub fn clawed_cycles() -> CriterionResult {
    run(3, "clawed cycles CC_3, CC_4 match S^5, S^7 and CP_2, CP_3", || {
        let mut ok = true;
        let mut rows = Vec::new();
        for n in [3usize, 4] {
            let cc = m2_profile(&clawed_cycle(n).map_err(e)?)?;
            let cp = m2_profile(&clawed_path(n - 1))?;
            let good = is_sphere(&cc, 2 * n as i32 - 1) && cc == cp;
            ok &= good;
            rows.push(json!({ "n": n, "cycle": cc.to_json(), "path": cp.to_json(), "match": good }));
        }
        Ok((ok, Value::Array(rows)))
    })
}

/// Leaf-edge toggles for the whiskered n-cycle: x_{i,i+1} for odd i < n, and
/// for odd n a final toggle on x_{n−1,n}.
pub fn whiskered_toggles(n: usize) -> Vec<String> {
    let mut t: Vec<String> =
        (1..n).step_by(2).map(|i| format!("x{i},{}", i + 1)).collect();
    if n % 2 == 1 {
        t.push(format!("x{},{}", n - 1, n));
    }
    t
}

pub fn whiskered_matching(n: usize) -> Result<(SimplicialComplex, MorseMatching), String> {
    let cx = matching_complex(&whiskered_cycle(n).map_err(e)?, 2).map_err(e)?;
    let t = whiskered_toggles(n);
    let refs: Vec<&str> = t.iter().map(String::as_str).collect();
    let m = toggle_labels(&cx, &refs).map_err(e)?;
    Ok((cx, m))
}

pub fn whiskered_cycles() -> CriterionResult {
    run(4, "whiskered 6-, 3- and 5-cycles: spheres with the single critical cell {1..n}", || {
        let mut ok = true;
        let mut rows = Vec::new();
        for n in [6usize, 3, 5] {
            let (cx, m) = whiskered_matching(n)?;
            let p = betti(&cx).map_err(e)?;
            let labels: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
            let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
            let want = cx.mask_of(&refs).map_err(e)?;
            let crit = m.critical(&cx);
            let good = is_sphere(&p, n as i32 - 1) && crit == vec![want];
            ok &= good;
            rows.push(json!({
                "n": n,
                "profile": p.to_json(),
                "critical": crit.iter().map(|&f| cx.face_labels(f)).collect::<Vec<_>>(),
                "match": good,
            }));
        }
        Ok((ok, Value::Array(rows)))
    })
}

/// Expected critical-cell count of the wheel policy tree before cancellation.
fn wheel_tree_count(n: usize) -> usize {
    if n % 3 == 1 {
        2
    } else {
        n
    }
}

pub fn wheel_m1() -> CriterionResult {
    run(5, "wheel M1 for n = 4..9: wedge counts, tree counts, cancellation", || {
        let mut ok = true;
        let mut rows = Vec::new();
        for n in 4..=9 {
            let ((good, row), t) = timed(|| {
                let g = wheel(n).map_err(e)?;
                let p = betti(&matching_complex(&g, 1).map_err(e)?).map_err(e)?;
                let pred = predict("wheel-M1", &[n]).profile().ok_or("no prediction")?;
                let lw = g.line_graph();
                let tree = run_mta(&lw, &wheel_policy(n).map_err(e)?).map_err(e)?;
                let cells = tree.critical_cells();
                let tree_ok = cells.len() == wheel_tree_count(n)
                    && cells.iter().all(|c| c.count_ones() as i32 - 1 == nu(n) || n % 3 == 2);
                let pairs: Vec<(u64, u64)> = wheel_cancel_pair(&lw, &tree, n).into_iter().collect();
                let c = post_cancel(&lw, &tree, &pairs).map_err(e)?;
                let after_ok = c.after.get(nu(n)) == p.total() && c.after.total() == p.total();
                let good = p == pred && tree_ok && after_ok;
                Ok((
                    good,
                    json!({
                        "n": n,
                        "profile": p.to_json(),
                        "tree_cells": cells.len(),
                        "after_cancel": c.after.describe(),
                        "match": good,
                    }),
                ))
            })?;
            ok &= good && t < Duration::from_secs(10);
            rows.push(row);
        }
        Ok((ok, Value::Array(rows)))
    })
}

pub fn wheel_m2() -> CriterionResult {
    run(6, "wheel M2 for n = 4..8 with the strata matching vectors", || {
        let mut ok = true;
        let mut rows = Vec::new();
        for n in 4..=8 {
            let run = wheel_m2_matching(n).map_err(e)?;
            let p = betti(&run.complex).map_err(e)?;
            let pred = predict("wheel-M2", &[n]).profile().ok_or("no prediction")?;
            let want: Vec<(i32, u64)> = match n {
                4 => vec![(2, 3)],
                5 => vec![(3, 2)],
                _ => vec![],
            };
            let vec_ok = run.vector.counts == want.into_iter().collect();
            let acyclic = verify_acyclic(&run.complex, &run.matching).map_err(e)?.is_acyclic();
            let good = p == pred && vec_ok && acyclic;
            ok &= good;
            rows.push(json!({
                "n": n,
                "profile": p.to_json(),
                "vector": run.vector.describe(),
                "variant": format!("{:?}", run.variant),
                "match": good,
            }));
        }
        Ok((ok, Value::Array(rows)))
    })
}

pub fn bridge_graphs(seed: u64) -> CriterionResult {
    run(7, "200 random graphs with a bridge edge have acyclic M2", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut failures = Vec::new();
        for i in 0..200 {
            let g = random_bridge_graph(&mut rng, 14);
            if !m2_profile(&g)?.is_acyclic() {
                failures.push(json!({ "index": i, "graph": g.to_json() }));
            }
        }
        Ok((failures.is_empty(), json!({ "seed": seed, "instances": 200, "failures": failures })))
    })
}

/// Random clawed graphs used by the clawed-graph and soundness checks.
pub fn random_clawed_graphs(seed: u64, count: usize) -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc1a5);
    (0..count)
        .map(|_| random_cubic_base(&mut rng, 5).claw().expect("max degree 3"))
        .collect()
}

pub fn clawed_graphs(seed: u64) -> CriterionResult {
    run(8, "10 random clawed graphs: one sphere, one critical cell of dimension 2|E|/3-1", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ok = true;
        let mut rows = Vec::new();
        for g in random_clawed_graphs(seed, 10) {
            let c = check_clawed_graph(&g, &mut rng).map_err(e)?;
            let d = c.predicted_dimension;
            let good = c.complete
                && is_sphere(&c.profile, d)
                && c.vector.total() == 1
                && c.vector.get(d) == 1;
            ok &= good;
            rows.push(json!({
                "edges": c.edges,
                "profile": c.profile.to_json(),
                "vector": c.vector.describe(),
                "match": good,
            }));
        }
        Ok((ok, json!({ "seed": seed, "instances": rows })))
    })
}

/// Toggle choice of the site figures: drawn toggles, and the smallest edge
/// label for claws drawn without one.
pub fn figure_toggles(g: &Graph, drawn: &[String]) -> Vec<(String, String)> {
    find_claw_units(g)
        .into_iter()
        .map(|u| {
            let t = drawn.iter().find(|d| u.contains_edge(d)).cloned().unwrap_or(u.edges[0].clone());
            (u.center, t)
        })
        .collect()
}

pub fn attaching_sites() -> CriterionResult {
    run(9, "attaching sites: 5 = T, fewer than T, and the leaf dichotomy", || {
        let mut ok = true;
        let mut rows = Vec::new();
        for (name, g, drawn) in [
            ("five-claw", five_claw_graph(), five_claw_toggles()),
            ("seven-claw", seven_claw_graph(), seven_claw_toggles()),
        ] {
            let a = attaching_site_analysis(&g, &figure_toggles(&g, &drawn)).map_err(e)?;
            let count_ok = if name == "five-claw" {
                a.site_count == 5 && a.claws == 5
            } else {
                a.site_count < a.claws
            };
            let failures = check_site_dichotomy(&g, &a).map_err(e)?;
            ok &= count_ok && failures.is_empty();
            rows.push(json!({
                "graph": name,
                "sites": a.site_count,
                "claws": a.claws,
                "count_match": count_ok,
                "dichotomy_failures": failures,
            }));
        }
        Ok((ok, Value::Array(rows)))
    })
}

pub fn caterpillars() -> CriterionResult {
    run(10, "caterpillars m in {2,3}, n in {1,2,3}: tables, towers, closed forms", || {
        let mut ok = true;
        let mut rows = Vec::new();
        for m in [2usize, 3] {
            let t = caterpillar_tables(m, 3);
            for n in 1..=3 {
                let g = caterpillar(n, m).map_err(e)?;
                let m2 = m2_profile(&g)?;
                let m1 = betti(&matching_complex(&g, 1).map_err(e)?).map_err(e)?;
                let bd = betti(&caterpillar_bd(&g, n).map_err(e)?).map_err(e)?;
                let (tbd, tm2) = bd_m2_towers(m, n);
                let m1_pred = predict("caterpillar-M1", &[n, m]).profile().ok_or("no prediction")?;
                let good = m2.total() as i128 == t.b_total[n - 1]
                    && m1 == m1_pred
                    && tbd == bd
                    && tm2 == m2;
                ok &= good;
                rows.push(json!({
                    "m": m, "n": n,
                    "m2": m2.to_json(), "bd": bd.to_json(), "m1": m1.to_json(),
                    "match": good,
                }));
            }
        }
        let report = compare_closed_forms(&caterpillar_tables(3, 6));
        let flagged = report.a_minus_sign_agrees != report.a_plus_sign_agrees;
        ok &= flagged;
        Ok((ok, json!({ "instances": rows, "closed_forms": report })))
    })
}

/// Every (complex, matching) pair produced by the other checks.
pub fn soundness_instances(seed: u64) -> Result<Vec<(String, SimplicialComplex, MorseMatching)>, String> {
    let mut out = Vec::new();
    let claw = |name: String, g: &Graph, toggles: Vec<(String, String)>, out: &mut Vec<_>| -> Result<(), String> {
        let cx = matching_complex(g, 2).map_err(e)?;
        let m = claw_induced_matching(g, &cx, &toggles).map_err(e)?.matching;
        out.push((name, cx, m));
        Ok(())
    };
    for n in 0..=3 {
        let g = clawed_path(n);
        claw(format!("CP{n}"), &g, leaf_edge_toggles(&g), &mut out)?;
    }
    for n in [3usize, 4] {
        let g = clawed_cycle(n).map_err(e)?;
        claw(format!("CC{n}"), &g, leaf_edge_toggles(&g), &mut out)?;
    }
    for n in [6usize, 3, 5] {
        let (cx, m) = whiskered_matching(n)?;
        out.push((format!("whiskered-{n}"), cx, m));
    }
    for n in 4..=9 {
        let lw = wheel(n).map_err(e)?.line_graph();
        let tree = run_mta(&lw, &wheel_policy(n).map_err(e)?).map_err(e)?;
        let pairs: Vec<(u64, u64)> = wheel_cancel_pair(&lw, &tree, n).into_iter().collect();
        let c = post_cancel(&lw, &tree, &pairs).map_err(e)?;
        out.push((format!("wheel-M1-{n}"), independence_complex(&lw).map_err(e)?, c.matching));
    }
    for n in 4..=8 {
        let r = wheel_m2_matching(n).map_err(e)?;
        out.push((format!("wheel-M2-{n}"), r.complex, r.matching));
    }
    for (name, g, drawn) in [("five-claw", five_claw_graph(), five_claw_toggles()), ("seven-claw", seven_claw_graph(), seven_claw_toggles())] {
        let t = figure_toggles(&g, &drawn);
        claw(name.to_string(), &g, t, &mut out)?;
    }
    for (i, g) in random_clawed_graphs(seed, 10).into_iter().enumerate() {
        claw(format!("random-clawed-{i}"), &g, leaf_edge_toggles(&g), &mut out)?;
    }
    Ok(out)
}

pub fn morse_soundness(seed: u64) -> CriterionResult {
    run(11, "Morse soundness: acyclic, weak inequalities, Euler characteristic", || {
        let mut ok = true;
        let mut rows = Vec::new();
        for (name, cx, m) in soundness_instances(seed)? {
            let acyclic = verify_acyclic(&cx, &m).map_err(e)?.is_acyclic();
            let v = morse_vector(&cx, &m).map_err(e)?;
            let p = betti(&cx).map_err(e)?;
            let good = acyclic && v.dominates(&p) && euler_consistent(&cx, &m, &v);
            ok &= good;
            rows.push(json!({ "instance": name, "vector": v.describe(), "match": good }));
        }
        Ok((ok, Value::Array(rows)))
    })
}

pub fn k7_torsion() -> CriterionResult {
    run(12, "M1(K7) has torsion in H1", || {
        let (p, t) = timed(|| betti(&matching_complex(&complete(7), 1).map_err(e)?).map_err(e))?;
        let tors = p.torsion.get(&1).cloned().unwrap_or_default();
        let ok = !tors.is_empty() && tors == K7_H1_TORSION && t < Duration::from_secs(60);
        Ok((ok, json!({ "profile": p.to_json(), "h1_torsion": tors })))
    })
}

/// Run all twelve checks in order.
pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    vec![
        five_edge_tree_example(),
        clawed_paths(),
        clawed_cycles(),
        whiskered_cycles(),
        wheel_m1(),
        wheel_m2(),
        bridge_graphs(seed),
        clawed_graphs(seed),
        attaching_sites(),
        caterpillars(),
        morse_soundness(seed),
        k7_torsion(),
    ]
}

pub fn report(seed: u64, results: &[CriterionResult], timing: bool) -> Value {
    let criteria: Vec<Value> = results
        .iter()
        .map(|r| {
            let mut v = serde_json::to_value(r).expect("serializable");
            if timing {
                v["seconds"] = json!(r.elapsed.as_secs_f64());
            }
            v
        })
        .collect();
    json!({
        "seed": seed,
        "match": results.iter().all(|r| r.pass),
        "passed": results.iter().filter(|r| r.pass).count(),
        "total": results.len(),
        "criteria": criteria,
    })
}
