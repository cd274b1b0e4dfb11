//! The Matching Tree Algorithm on independence complexes.
//!
//! A node Σ(A, B) stands for the independent sets containing `A` and missing
//! `B`. Vertex sets are `u64` masks over the host graph's vertex indices,
//! which coincide with the vertex bits of [`independence_complex`].

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::complex::{independence_complex, ComplexError, SimplicialComplex};
use crate::graph::{natural_cmp, Graph};
use crate::morse::{morse_vector, verify_acyclic, MorseError, MorseMatching, MorseVector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MtaError {
    #[error("graph has {0} vertices; at most 64 are supported")]
    TooManyVertices(usize),
    #[error("wheel policy needs n >= 4, got {0}")]
    WheelTooSmall(usize),
    #[error("policy returned `{0}`, which is not eligible for the rule")]
    BadChoice(String),
    #[error("cells {0:?} and {1:?} are not both critical")]
    NotCritical(Vec<String>, Vec<String>),
    #[error("node invariant violated at A={0:?}, B={1:?}: {2}")]
    Invariant(Vec<String>, Vec<String>, String),
    #[error("extended matching has a closed gradient path")]
    Cyclic,
    #[error(transparent)]
    Morse(#[from] MorseError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeKind {
    Root,
    /// Child of a free-vertex step; stands for the empty family.
    FreeLeaf,
    PivotChild,
    TentativeLeft,
    TentativeRight,
}

/// The step applied at an internal node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    Free { v: usize },
    Pivot { v: usize, w: usize },
    Tentative { v: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaNode {
    pub a: u64,
    pub b: u64,
    pub kind: NodeKind,
    pub rule: Option<Rule>,
    pub children: Vec<usize>,
}

impl SigmaNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// A leaf with Σ(A,B) = {A}.
    pub fn is_critical_leaf(&self) -> bool {
        self.is_leaf() && self.kind != NodeKind::FreeLeaf
    }
}

/// Vertex choice at a node. Candidates are never empty and are given in
/// increasing vertex index (natural label order).
pub trait PivotPolicy {
    fn name(&self) -> String;

    fn free(&self, _g: &Graph, _a: u64, _b: u64, candidates: &[usize]) -> usize {
        candidates[0]
    }

    /// Candidates are `(v, w)` with `w` the single remaining neighbor of `v`.
    fn pivot(&self, _g: &Graph, _a: u64, _b: u64, candidates: &[(usize, usize)]) -> (usize, usize) {
        candidates[0]
    }

    fn tentative(&self, g: &Graph, a: u64, b: u64, candidates: &[usize]) -> usize;
}

/// Minimum label for rules (1) and (2); rule (3) takes the minimum label among
/// vertices of minimum remaining degree.
#[derive(Clone, Copy, Debug, Default)]
pub struct DefaultPolicy;

impl PivotPolicy for DefaultPolicy {
    fn name(&self) -> String {
        "default".into()
    }

    fn tentative(&self, g: &Graph, a: u64, b: u64, candidates: &[usize]) -> usize {
        let rest = !(a | b);
        *candidates
            .iter()
            .min_by_key(|&&v| (remaining_degree(g, v, rest), v))
            .expect("nonempty")
    }
}

/// Policy for L(W_n): tentative pivots l0, l1, ... then c0; forced pivots walk
/// the rim in steps of three starting two past the branch's spoke index.
#[derive(Clone, Debug)]
pub struct WheelPolicy {
    n: usize,
}

pub fn wheel_policy(n: usize) -> Result<WheelPolicy, MtaError> {
    if n < 4 {
        return Err(MtaError::WheelTooSmall(n));
    }
    Ok(WheelPolicy { n })
}

fn parse_idx(name: &str, prefix: char) -> Option<usize> {
    name.strip_prefix(prefix)?.parse().ok()
}

impl PivotPolicy for WheelPolicy {
    fn name(&self) -> String {
        format!("wheel:{}", self.n)
    }

    fn pivot(&self, g: &Graph, a: u64, _b: u64, candidates: &[(usize, usize)]) -> (usize, usize) {
        let m = self.n - 1;
        let j = (0..g.vertex_count())
            .filter(|&i| a >> i & 1 == 1)
            .find_map(|i| parse_idx(g.name(i), 'l'))
            .unwrap_or(self.n - 2);
        let start = (j + 2) % m;
        *candidates
            .iter()
            .min_by_key(|&&(v, _)| match parse_idx(g.name(v), 'c') {
                Some(i) => ((i + m - start) % m, v),
                None => (usize::MAX, v),
            })
            .expect("nonempty")
    }

    fn tentative(&self, g: &Graph, a: u64, b: u64, candidates: &[usize]) -> usize {
        let spoke = candidates
            .iter()
            .filter_map(|&v| parse_idx(g.name(v), 'l').map(|i| (i, v)))
            .min();
        if let Some((_, v)) = spoke {
            return v;
        }
        candidates
            .iter()
            .copied()
            .find(|&v| g.name(v) == "c0")
            .unwrap_or_else(|| DefaultPolicy.tentative(g, a, b, candidates))
    }
}

fn nbr_mask(g: &Graph, v: usize) -> u64 {
    g.neighbors(v).iter().fold(0u64, |m, &j| m | 1 << j)
}

fn remaining_degree(g: &Graph, v: usize, rest: u64) -> u32 {
    (nbr_mask(g, v) & rest).count_ones()
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[derive(Clone, Debug)]
pub struct MatchingTree {
    pub nodes: Vec<SigmaNode>,
    pub policy: String,
}

impl MatchingTree {
    pub fn root(&self) -> &SigmaNode {
        &self.nodes[0]
    }

    /// A-sets of critical leaves, in tree order (depth first, left child first).
    pub fn critical_cells(&self) -> Vec<u64> {
        let mut out = Vec::new();
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            let n = &self.nodes[i];
            if n.is_critical_leaf() {
                out.push(n.a);
            }
            for &c in n.children.iter().rev() {
                stack.push(c);
            }
        }
        out
    }

    pub fn leaf_counts(&self) -> (usize, usize) {
        let crit = self.nodes.iter().filter(|n| n.is_critical_leaf()).count();
        let empty = self.nodes.iter().filter(|n| n.kind == NodeKind::FreeLeaf).count();
        (crit, empty)
    }

    pub fn critical_vector(&self) -> MorseVector {
        MorseVector::from_cells(self.critical_cells(), true, 0)
    }

    /// Route every face of Ind(g) down the tree and pair it according to the
    /// rule at the node where it is matched.
    pub fn materialize(&self, cx: &SimplicialComplex) -> Result<MorseMatching, MtaError> {
        let mut pairs = Vec::new();
        for &f in cx.faces() {
            let mut i = 0usize;
            loop {
                let node = &self.nodes[i];
                match node.rule {
                    None => break,
                    Some(Rule::Free { v }) => {
                        if f >> v & 1 == 0 {
                            pairs.push((f, f | 1 << v));
                        }
                        break;
                    }
                    Some(Rule::Pivot { v, w }) => {
                        if f >> w & 1 == 1 {
                            i = node.children[0];
                        } else {
                            if f >> v & 1 == 0 {
                                pairs.push((f, f | 1 << v));
                            }
                            break;
                        }
                    }
                    Some(Rule::Tentative { v }) => {
                        i = if f >> v & 1 == 1 { node.children[1] } else { node.children[0] };
                    }
                }
            }
        }
        Ok(MorseMatching::from_pairs(cx, &pairs, true)?)
    }

    /// Check node invariants and that the materialized matching leaves exactly
    /// the critical leaves' A-sets unmatched.
    pub fn verify(&self, g: &Graph, cx: &SimplicialComplex) -> Result<MorseMatching, MtaError> {
        let names = |m: u64| mask_names(g, m);
        for n in &self.nodes {
            let fail = |why: &str| MtaError::Invariant(names(n.a), names(n.b), why.to_string());
            if n.a & n.b != 0 {
                return Err(fail("A and B intersect"));
            }
            let mut na = 0u64;
            for v in 0..g.vertex_count() {
                if n.a >> v & 1 == 1 {
                    na |= nbr_mask(g, v);
                }
            }
            if na & n.a != 0 {
                return Err(fail("A is not independent"));
            }
            if na & !n.b != 0 {
                return Err(fail("N(A) is not inside B"));
            }
            if n.is_critical_leaf() && (n.a | n.b) != full_mask(g.vertex_count()) {
                return Err(fail("critical leaf does not decide every vertex"));
            }
        }
        let m = self.materialize(cx)?;
        let mut crit = m.critical(cx);
        let mut want = self.critical_cells();
        crit.sort_unstable();
        want.sort_unstable();
        if crit != want {
            return Err(MtaError::Invariant(
                Vec::new(),
                Vec::new(),
                "unmatched faces differ from critical leaves".into(),
            ));
        }
        Ok(m)
    }

    pub fn to_json(&self, g: &Graph) -> Value {
        fn node(t: &MatchingTree, g: &Graph, i: usize) -> Value {
            let n = &t.nodes[i];
            let rule = match n.rule {
                None => Value::Null,
                Some(Rule::Free { v }) => json!({"rule": "free", "v": g.name(v)}),
                Some(Rule::Pivot { v, w }) => json!({"rule": "pivot", "v": g.name(v), "w": g.name(w)}),
                Some(Rule::Tentative { v }) => json!({"rule": "tentative", "v": g.name(v)}),
            };
            let mut obj = json!({
                "A": mask_names(g, n.a),
                "B": mask_names(g, n.b),
                "kind": n.kind,
                "rule": rule,
            });
            if n.is_leaf() {
                obj["leaf"] = json!(if n.is_critical_leaf() { "critical" } else { "empty" });
            } else {
                obj["children"] = Value::Array(n.children.iter().map(|&c| node(t, g, c)).collect());
            }
            obj
        }
        json!({ "policy": self.policy, "root": node(self, g, 0) })
    }
}

pub fn mask_names(g: &Graph, m: u64) -> Vec<String> {
    let mut v: Vec<String> =
        (0..g.vertex_count()).filter(|&i| m >> i & 1 == 1).map(|i| g.name(i).to_string()).collect();
    v.sort_by(|a, b| natural_cmp(a, b));
    v
}

/// Build the full matching tree of Ind(g).
pub fn run_mta(g: &Graph, policy: &dyn PivotPolicy) -> Result<MatchingTree, MtaError> {
    let n = g.vertex_count();
    if n > 64 {
        return Err(MtaError::TooManyVertices(n));
    }
    let all = full_mask(n);
    let mut nodes = vec![SigmaNode { a: 0, b: 0, kind: NodeKind::Root, rule: None, children: vec![] }];
    let mut stack = vec![0usize];
    let bad = |v: usize| MtaError::BadChoice(g.name(v).to_string());
    while let Some(i) = stack.pop() {
        let (a, b) = (nodes[i].a, nodes[i].b);
        let rest = all & !(a | b);
        if rest == 0 {
            continue;
        }
        let open: Vec<usize> = (0..n).filter(|&v| rest >> v & 1 == 1).collect();
        let free: Vec<usize> =
            open.iter().copied().filter(|&v| nbr_mask(g, v) & rest == 0).collect();
        let mut kids = Vec::new();
        if !free.is_empty() {
            let v = policy.free(g, a, b, &free);
            if !free.contains(&v) {
                return Err(bad(v));
            }
            nodes[i].rule = Some(Rule::Free { v });
            kids.push(SigmaNode { a, b, kind: NodeKind::FreeLeaf, rule: None, children: vec![] });
        } else {
            let pivots: Vec<(usize, usize)> = open
                .iter()
                .filter_map(|&v| {
                    let r = nbr_mask(g, v) & rest;
                    (r.count_ones() == 1).then(|| (v, r.trailing_zeros() as usize))
                })
                .collect();
            if !pivots.is_empty() {
                let (v, w) = policy.pivot(g, a, b, &pivots);
                if !pivots.contains(&(v, w)) {
                    return Err(bad(v));
                }
                nodes[i].rule = Some(Rule::Pivot { v, w });
                kids.push(SigmaNode {
                    a: a | 1 << w,
                    b: b | nbr_mask(g, w),
                    kind: NodeKind::PivotChild,
                    rule: None,
                    children: vec![],
                });
            } else {
                let v = policy.tentative(g, a, b, &open);
                if !open.contains(&v) {
                    return Err(bad(v));
                }
                nodes[i].rule = Some(Rule::Tentative { v });
                kids.push(SigmaNode {
                    a,
                    b: b | 1 << v,
                    kind: NodeKind::TentativeLeft,
                    rule: None,
                    children: vec![],
                });
                kids.push(SigmaNode {
                    a: a | 1 << v,
                    b: b | nbr_mask(g, v),
                    kind: NodeKind::TentativeRight,
                    rule: None,
                    children: vec![],
                });
            }
        }
        let mut ids = Vec::new();
        for k in kids {
            let is_free = k.kind == NodeKind::FreeLeaf;
            nodes.push(k);
            let id = nodes.len() - 1;
            ids.push(id);
            if !is_free {
                stack.push(id);
            }
        }
        nodes[i].children = ids;
    }
    Ok(MatchingTree { nodes, policy: policy.name() })
}

/// Outcome of extending a tree's matching by extra pairs of critical cells.
#[derive(Clone, Debug)]
pub struct Cancellation {
    pub before: MorseVector,
    pub after: MorseVector,
    pub matching: MorseMatching,
}

/// Pair up critical cells of the tree's matching and re-verify acyclicity.
pub fn post_cancel(
    g: &Graph,
    tree: &MatchingTree,
    pairs: &[(u64, u64)],
) -> Result<Cancellation, MtaError> {
    let cx = independence_complex(g)?;
    let base = tree.verify(g, &cx)?;
    let before = morse_vector(&cx, &base)?;
    let mut all = base.pairs(&cx);
    for &(x, y) in pairs {
        if !base.is_critical(&cx, x) || !base.is_critical(&cx, y) {
            return Err(MtaError::NotCritical(mask_names(g, x), mask_names(g, y)));
        }
        all.push((x, y));
    }
    let matching = MorseMatching::from_pairs(&cx, &all, true)?;
    if !verify_acyclic(&cx, &matching)?.is_acyclic() {
        return Err(MtaError::Cyclic);
    }
    let after = morse_vector(&cx, &matching)?;
    Ok(Cancellation { before, after, matching })
}

/// ν_n = ⌈(n − 4)/3⌉.
pub fn nu(n: usize) -> i32 {
    (n as i32 - 4 + 2).div_euclid(3)
}

/// The α/β pair for W_n with n ≡ 2 (mod 3): β is the critical cell of the
/// cycle branch, α = β ∪ {l_{n−2}}.
pub fn wheel_cancel_pair(lw: &Graph, tree: &MatchingTree, n: usize) -> Option<(u64, u64)> {
    if n % 3 != 2 {
        return None;
    }
    let spokes: u64 = (0..lw.vertex_count())
        .filter(|&i| lw.name(i).starts_with('l'))
        .fold(0, |m, i| m | 1 << i);
    let last = lw.vertex_index(&format!("l{}", n - 2))?;
    let cells = tree.critical_cells();
    let beta = cells.iter().copied().find(|&c| {
        c & spokes == 0 && c.count_ones() as i32 == nu(n) && cells.contains(&(c | 1 << last))
    })?;
    Some((beta, beta | 1 << last))
}

/// Critical-cell sizes of the tree, as a histogram.
pub fn cell_size_histogram(tree: &MatchingTree) -> BTreeMap<u32, usize> {
    let mut h = BTreeMap::new();
    for c in tree.critical_cells() {
        *h.entry(c.count_ones()).or_insert(0) += 1;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::matching_complex;
    use crate::graph::families::*;
    use crate::homology::betti;

    fn sizes(t: &MatchingTree) -> Vec<u32> {
        let mut v: Vec<u32> = t.critical_cells().iter().map(|c| c.count_ones()).collect();
        v.sort_unstable();
        v
    }

    #[test]
    fn cycles() {
        let t6 = run_mta(&cycle(6).unwrap(), &DefaultPolicy).unwrap();
        assert_eq!(sizes(&t6), vec![2, 2]);
        let t4 = run_mta(&cycle(4).unwrap(), &DefaultPolicy).unwrap();
        assert_eq!(sizes(&t4), vec![1]);
    }

    #[test]
    fn k2_single_cell() {
        // each endpoint has exactly one open neighbor, so the pivot rule fires first
        let g = path(1);
        let t = run_mta(&g, &DefaultPolicy).unwrap();
        assert!(matches!(t.root().rule, Some(Rule::Pivot { v: 0, w: 1 })));
        assert_eq!(sizes(&t), vec![1]);
        let cx = independence_complex(&g).unwrap();
        t.verify(&g, &cx).unwrap();
    }

    #[test]
    fn verify_and_dominate() {
        for g in [cycle(7).unwrap(), wheel(5).unwrap().line_graph(), paw(), five_edge_tree()] {
            let cx = independence_complex(&g).unwrap();
            let t = run_mta(&g, &DefaultPolicy).unwrap();
            let m = t.verify(&g, &cx).unwrap();
            assert!(verify_acyclic(&cx, &m).unwrap().is_acyclic());
            assert!(t.critical_vector().dominates(&betti(&cx).unwrap()));
        }
    }

    #[test]
    fn wheel_counts() {
        for n in 4..=9 {
            let lw = wheel(n).unwrap().line_graph();
            let t = run_mta(&lw, &wheel_policy(n).unwrap()).unwrap();
            let want = match n % 3 {
                0 => n,
                1 => 2,
                _ => n,
            };
            assert_eq!(t.critical_cells().len(), want, "n={n}");
            let m1 = matching_complex(&wheel(n).unwrap(), 1).unwrap();
            let cx = independence_complex(&lw).unwrap();
            assert!(cx.same_faces_as(&m1));
        }
    }

    #[test]
    fn wheel_cancel() {
        let n = 5;
        let lw = wheel(n).unwrap().line_graph();
        let t = run_mta(&lw, &wheel_policy(n).unwrap()).unwrap();
        let (b, a) = wheel_cancel_pair(&lw, &t, n).unwrap();
        assert_eq!(mask_names(&lw, b), ["c2"]);
        assert_eq!(mask_names(&lw, a), ["c2", "l3"]);
        let c = post_cancel(&lw, &t, &[(b, a)]).unwrap();
        assert_eq!(c.before.total(), 5);
        assert_eq!(c.after.counts, BTreeMap::from([(1, 3)]));
        let same = post_cancel(&lw, &t, &[]).unwrap();
        assert_eq!(same.after, same.before);
    }

    #[test]
    fn cancel_rejects_non_cover() {
        let n = 5;
        let lw = wheel(n).unwrap().line_graph();
        let t = run_mta(&lw, &wheel_policy(n).unwrap()).unwrap();
        let two: Vec<u64> =
            t.critical_cells().into_iter().filter(|c| c.count_ones() == 2).take(2).collect();
        let r = post_cancel(&lw, &t, &[(two[0], two[1])]);
        assert!(matches!(r, Err(MtaError::Morse(MorseError::NotACover(..)))));
    }

    #[test]
    fn deterministic_json() {
        let g = cycle(5).unwrap();
        let a = run_mta(&g, &DefaultPolicy).unwrap().to_json(&g);
        let b = run_mta(&g, &DefaultPolicy).unwrap().to_json(&g);
        assert_eq!(a, b);
        assert_eq!(a["root"]["A"], json!([]));
    }

    #[test]
    fn wheel_policy_small() {
        assert!(matches!(wheel_policy(3), Err(MtaError::WheelTooSmall(3))));
        assert_eq!(nu(4), 0);
        assert_eq!(nu(5), 1);
        assert_eq!(nu(7), 1);
        assert_eq!(nu(8), 2);
    }
}
