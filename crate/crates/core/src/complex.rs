//! Simplicial complexes stored as explicit face families.
//!
//! A face is a `u64` bitmask over the complex's vertex list, so complexes have
//! at most 64 vertices. Faces are kept sorted by (cardinality, mask) and always
//! include the empty face.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{natural_cmp, Graph};

pub type Face = u64;

pub const DEFAULT_BUDGET: u64 = 1 << 24;
pub const BUDGET_ENV: &str = "KMATCH_BUDGET";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("enumeration budget exceeded: limit {limit} candidate subsets, search space 2^{bits}")]
    BudgetExceeded { limit: u64, bits: usize },
    #[error("complex has {0} vertices; at most 64 are supported")]
    TooManyVertices(usize),
    #[error("vertex label `{0}` appears in both join factors")]
    LabelCollision(String),
    #[error("face family is not closed under subsets (missing {0:?})")]
    NotDownwardClosed(Vec<String>),
    #[error("unknown vertex label `{0}`")]
    UnknownLabel(String),
    #[error("degree bound is missing vertex `{0}`")]
    MissingCap(String),
    #[error("k must be at least 1")]
    ZeroK,
    #[error("malformed complex json: {0}")]
    Json(String),
}

/// Cap on the number of candidate subsets an enumeration may visit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub limit: u64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit }
    }

    /// Reads `KMATCH_BUDGET`, falling back to 2^24.
    pub fn from_env() -> Self {
        let limit = std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<u64>().ok())
            .filter(|&l| l > 0)
            .unwrap_or(DEFAULT_BUDGET);
        Budget { limit }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::from_env()
    }
}

#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    labels: Vec<String>,
    faces: Vec<Face>,
    index: HashMap<Face, u32>,
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.faces == other.faces
    }
}
impl Eq for SimplicialComplex {}

fn face_order(a: &Face, b: &Face) -> std::cmp::Ordering {
    a.count_ones().cmp(&b.count_ones()).then(a.cmp(b))
}

impl SimplicialComplex {
    /// Build from an explicit face list; the list must be downward closed
    /// (the empty face is added if absent).
    pub fn from_faces(labels: Vec<String>, faces: Vec<Face>) -> Result<Self, ComplexError> {
        if labels.len() > 64 {
            return Err(ComplexError::TooManyVertices(labels.len()));
        }
        let cx = Self::assemble(labels, faces);
        cx.check_closed()?;
        Ok(cx)
    }

    fn assemble(labels: Vec<String>, mut faces: Vec<Face>) -> Self {
        faces.push(0);
        faces.sort_unstable_by(face_order);
        faces.dedup();
        let index = faces.iter().enumerate().map(|(i, &f)| (f, i as u32)).collect();
        SimplicialComplex { labels, faces, index }
    }

    /// Downward closure of the given facets.
    pub fn from_facets(labels: Vec<String>, facets: &[Face]) -> Result<Self, ComplexError> {
        if labels.len() > 64 {
            return Err(ComplexError::TooManyVertices(labels.len()));
        }
        let mut set = std::collections::HashSet::new();
        let mut stack: Vec<Face> = facets.to_vec();
        while let Some(f) = stack.pop() {
            if set.insert(f) {
                let mut rest = f;
                while rest != 0 {
                    let bit = rest & rest.wrapping_neg();
                    rest ^= bit;
                    stack.push(f ^ bit);
                }
            }
        }
        Ok(Self::assemble(labels, set.into_iter().collect()))
    }

    /// Exhaustive closure check: every codimension-one face of every face is present.
    pub fn check_closed(&self) -> Result<(), ComplexError> {
        for &f in &self.faces {
            let mut rest = f;
            while rest != 0 {
                let bit = rest & rest.wrapping_neg();
                rest ^= bit;
                if !self.index.contains_key(&(f ^ bit)) {
                    return Err(ComplexError::NotDownwardClosed(self.face_labels(f ^ bit)));
                }
            }
        }
        Ok(())
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn mask_of(&self, labels: &[&str]) -> Result<Face, ComplexError> {
        let mut m = 0;
        for l in labels {
            let i = self.label_index(l).ok_or_else(|| ComplexError::UnknownLabel(l.to_string()))?;
            m |= 1 << i;
        }
        Ok(m)
    }

    /// Faces sorted by cardinality, then mask. Includes the empty face.
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn contains(&self, f: Face) -> bool {
        self.index.contains_key(&f)
    }

    pub fn face_id(&self, f: Face) -> Option<usize> {
        self.index.get(&f).map(|&i| i as usize)
    }

    /// Dimension of the complex (`-1` for the void complex {∅}).
    pub fn dim(&self) -> i32 {
        self.faces.last().map(|f| f.count_ones() as i32 - 1).unwrap_or(-1)
    }

    pub fn is_void(&self) -> bool {
        self.faces.len() == 1
    }

    pub fn face_labels(&self, f: Face) -> Vec<String> {
        (0..self.labels.len())
            .filter(|&i| f >> i & 1 == 1)
            .map(|i| self.labels[i].clone())
            .collect()
    }

    /// Number of faces per dimension, starting at dimension -1.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut out = vec![0usize; (self.dim() + 2) as usize];
        for &f in &self.faces {
            out[f.count_ones() as usize] += 1;
        }
        out
    }

    /// Σ (-1)^dim over all faces, the empty face counting in dimension -1.
    pub fn reduced_euler(&self) -> i64 {
        self.faces
            .iter()
            .map(|f| if f.count_ones() % 2 == 1 { 1 } else { -1 })
            .sum()
    }

    pub fn facets(&self) -> Vec<Face> {
        let mut out: Vec<Face> = self
            .faces
            .iter()
            .copied()
            .filter(|&f| {
                (0..self.labels.len()).all(|i| f >> i & 1 == 1 || !self.contains(f | 1 << i))
            })
            .collect();
        out.sort_unstable_by(|a, b| self.cmp_faces(*a, *b));
        out
    }

    /// Order faces by their label lists (natural order within each).
    pub fn cmp_faces(&self, a: Face, b: Face) -> std::cmp::Ordering {
        let la = self.sorted_labels(a);
        let lb = self.sorted_labels(b);
        for (x, y) in la.iter().zip(lb.iter()) {
            let o = natural_cmp(x, y);
            if o != std::cmp::Ordering::Equal {
                return o;
            }
        }
        la.len().cmp(&lb.len())
    }

    fn sorted_labels(&self, f: Face) -> Vec<String> {
        let mut v = self.face_labels(f);
        v.sort_by(|a, b| natural_cmp(a, b));
        v
    }

    /// Whether `v` is a cone point.
    pub fn is_cone_with(&self, v: usize) -> bool {
        self.faces.iter().all(|&f| self.contains(f | 1 << v))
    }

    /// Same complex with vertices renamed by `f` (face family unchanged).
    pub fn relabeled(&self, f: impl Fn(&str) -> String) -> Self {
        SimplicialComplex {
            labels: self.labels.iter().map(|l| f(l)).collect(),
            faces: self.faces.clone(),
            index: self.index.clone(),
        }
    }

    /// Same complex with vertex order permuted: new vertex `i` is old `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.labels.len();
        assert_eq!(perm.len(), n);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let labels = perm.iter().map(|&o| self.labels[o].clone()).collect();
        let faces = self
            .faces
            .iter()
            .map(|&f| (0..n).filter(|&i| f >> i & 1 == 1).fold(0u64, |acc, i| acc | 1 << inv[i]))
            .collect();
        Self::assemble(labels, faces)
    }

    /// Face families compared by label sets, ignoring vertex order.
    pub fn same_faces_as(&self, other: &Self) -> bool {
        if self.faces.len() != other.faces.len() {
            return false;
        }
        let mut map = Vec::with_capacity(self.labels.len());
        for l in &self.labels {
            match other.label_index(l) {
                Some(j) => map.push(j),
                None => return false,
            }
        }
        self.faces.iter().all(|&f| {
            let g = (0..self.labels.len())
                .filter(|&i| f >> i & 1 == 1)
                .fold(0u64, |acc, i| acc | 1 << map[i]);
            other.contains(g)
        })
    }

    pub fn is_subcomplex_of(&self, other: &Self) -> bool {
        let map: Option<Vec<usize>> = self.labels.iter().map(|l| other.label_index(l)).collect();
        let Some(map) = map else { return false };
        self.faces.iter().all(|&f| {
            let g = (0..self.labels.len())
                .filter(|&i| f >> i & 1 == 1)
                .fold(0u64, |acc, i| acc | 1 << map[i]);
            other.contains(g)
        })
    }

    pub fn to_json(&self) -> ComplexJson {
        ComplexJson {
            vertices: self.labels.clone(),
            facets: self.facets().into_iter().map(|f| self.sorted_labels(f)).collect(),
        }
    }

    pub fn from_json(j: &ComplexJson) -> Result<Self, ComplexError> {
        let labels = j.vertices.clone();
        let mut facets = Vec::new();
        for facet in &j.facets {
            let mut m = 0u64;
            for l in facet {
                let i = labels
                    .iter()
                    .position(|x| x == l)
                    .ok_or_else(|| ComplexError::UnknownLabel(l.clone()))?;
                m |= 1 << i;
            }
            facets.push(m);
        }
        Self::from_facets(labels, &facets)
    }

    pub fn from_json_str(s: &str) -> Result<Self, ComplexError> {
        let j: ComplexJson =
            serde_json::from_str(s).map_err(|e| ComplexError::Json(e.to_string()))?;
        Self::from_json(&j)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ComplexJson {
    pub vertices: Vec<String>,
    pub facets: Vec<Vec<String>>,
}

/// Per-vertex degree caps for bounded degree complexes.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DegreeBound {
    pub caps: BTreeMap<String, usize>,
}

impl DegreeBound {
    pub fn uniform(g: &Graph, k: usize) -> Self {
        DegreeBound { caps: g.vertices().iter().map(|v| (v.clone(), k)).collect() }
    }

    pub fn with(mut self, v: &str, cap: usize) -> Self {
        self.caps.insert(v.to_string(), cap);
        self
    }
}

/// Depth-first enumeration of subsets of `0..n` with pruning.
///
/// `admit(state, i)` decides whether item `i` may be added; `push`/`pop`
/// maintain the caller's state.
fn enumerate<S>(
    n: usize,
    state: &mut S,
    admit: &dyn Fn(&S, usize) -> bool,
    push: &dyn Fn(&mut S, usize),
    pop: &dyn Fn(&mut S, usize),
    budget: Budget,
) -> Result<Vec<Face>, ComplexError> {
    if n > 64 {
        return Err(ComplexError::TooManyVertices(n));
    }
    let mut out = Vec::new();
    let mut visited: u64 = 0;
    // Iterative DFS: each frame holds the current face and the next item to try.
    let mut stack: Vec<(Face, usize)> = vec![(0, 0)];
    out.push(0);
    while let Some(&mut (face, ref mut next)) = stack.last_mut() {
        if *next >= n {
            stack.pop();
            if face != 0 {
                let top = 63 - face.leading_zeros() as usize;
                pop(state, top);
            }
            continue;
        }
        let i = *next;
        *next += 1;
        visited += 1;
        if visited > budget.limit {
            return Err(ComplexError::BudgetExceeded { limit: budget.limit, bits: n });
        }
        if admit(state, i) {
            push(state, i);
            let f = face | 1 << i;
            out.push(f);
            stack.push((f, i + 1));
        }
    }
    Ok(out)
}

fn check_graph_size(g: &Graph) -> Result<(), ComplexError> {
    if g.edge_count() > 64 {
        return Err(ComplexError::TooManyVertices(g.edge_count()));
    }
    Ok(())
}

/// M_k(G): edge subsets in which every vertex has degree at most `k`.
pub fn matching_complex(g: &Graph, k: usize) -> Result<SimplicialComplex, ComplexError> {
    matching_complex_with(g, k, Budget::from_env())
}

pub fn matching_complex_with(
    g: &Graph,
    k: usize,
    budget: Budget,
) -> Result<SimplicialComplex, ComplexError> {
    if k == 0 {
        return Err(ComplexError::ZeroK);
    }
    bounded_degree_complex_with(g, &DegreeBound::uniform(g, k), budget)
}

/// BD^λ(G): edge subsets respecting the per-vertex caps.
pub fn bounded_degree_complex(
    g: &Graph,
    bound: &DegreeBound,
) -> Result<SimplicialComplex, ComplexError> {
    bounded_degree_complex_with(g, bound, Budget::from_env())
}

pub fn bounded_degree_complex_with(
    g: &Graph,
    bound: &DegreeBound,
    budget: Budget,
) -> Result<SimplicialComplex, ComplexError> {
    check_graph_size(g)?;
    let mut caps = Vec::with_capacity(g.vertex_count());
    for v in g.vertices() {
        caps.push(*bound.caps.get(v).ok_or_else(|| ComplexError::MissingCap(v.clone()))?);
    }
    let ends: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.u, e.v)).collect();
    let mut deg = vec![0usize; g.vertex_count()];
    let faces = enumerate(
        ends.len(),
        &mut deg,
        &|d: &Vec<usize>, i| {
            let (u, v) = ends[i];
            d[u] < caps[u] && d[v] < caps[v]
        },
        &|d: &mut Vec<usize>, i| {
            d[ends[i].0] += 1;
            d[ends[i].1] += 1;
        },
        &|d: &mut Vec<usize>, i| {
            d[ends[i].0] -= 1;
            d[ends[i].1] -= 1;
        },
        budget,
    )?;
    Ok(SimplicialComplex::assemble(g.edge_labels(), faces))
}

/// Ind(G): independent vertex sets.
pub fn independence_complex(g: &Graph) -> Result<SimplicialComplex, ComplexError> {
    independence_complex_with(g, Budget::from_env())
}

pub fn independence_complex_with(
    g: &Graph,
    budget: Budget,
) -> Result<SimplicialComplex, ComplexError> {
    let n = g.vertex_count();
    if n > 64 {
        return Err(ComplexError::TooManyVertices(n));
    }
    let nbr: Vec<u64> = (0..n)
        .map(|i| g.neighbors(i).iter().fold(0u64, |m, &j| m | 1 << j))
        .collect();
    // State: set of blocked vertices as a count per vertex.
    let mut blocked = vec![0u32; n];
    let faces = enumerate(
        n,
        &mut blocked,
        &|b: &Vec<u32>, i| b[i] == 0,
        &|b: &mut Vec<u32>, i| {
            let mut m = nbr[i];
            while m != 0 {
                let j = m.trailing_zeros() as usize;
                m &= m - 1;
                b[j] += 1;
            }
        },
        &|b: &mut Vec<u32>, i| {
            let mut m = nbr[i];
            while m != 0 {
                let j = m.trailing_zeros() as usize;
                m &= m - 1;
                b[j] -= 1;
            }
        },
        budget,
    )?;
    Ok(SimplicialComplex::assemble(g.vertices().to_vec(), faces))
}

/// Join of complexes on disjoint vertex labels.
pub fn join(a: &SimplicialComplex, b: &SimplicialComplex) -> Result<SimplicialComplex, ComplexError> {
    if let Some(l) = a.labels.iter().find(|l| b.labels.contains(l)) {
        return Err(ComplexError::LabelCollision(l.clone()));
    }
    let na = a.labels.len();
    if na + b.labels.len() > 64 {
        return Err(ComplexError::TooManyVertices(na + b.labels.len()));
    }
    let mut labels = a.labels.clone();
    labels.extend(b.labels.iter().cloned());
    let mut faces = Vec::with_capacity(a.faces.len() * b.faces.len());
    for &x in &a.faces {
        for &y in &b.faces {
            faces.push(x | y << na);
        }
    }
    Ok(SimplicialComplex::assemble(labels, faces))
}

/// `m` isolated points named `prefix0..`.
pub fn discrete_points(m: usize, prefix: &str) -> SimplicialComplex {
    let labels: Vec<String> = (0..m).map(|i| format!("{prefix}{i}")).collect();
    let faces = (0..m).map(|i| 1u64 << i).collect();
    SimplicialComplex::assemble(labels, faces)
}

/// Join with `m` discrete points (m = 2 is the suspension, m = 1 the cone).
pub fn m_point_suspension(
    a: &SimplicialComplex,
    m: usize,
    prefix: &str,
) -> Result<SimplicialComplex, ComplexError> {
    join(a, &discrete_points(m, prefix))
}

/// Full simplex on the given labels.
pub fn simplex(labels: Vec<String>) -> Result<SimplicialComplex, ComplexError> {
    let n = labels.len();
    if n > 20 {
        return Err(ComplexError::TooManyVertices(n));
    }
    let full = if n == 0 { 0 } else { u64::MAX >> (64 - n) };
    SimplicialComplex::from_facets(labels, &[full])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::*;

    fn facet_labels(cx: &SimplicialComplex) -> Vec<Vec<String>> {
        cx.to_json().facets
    }

    #[test]
    fn five_edge_tree_m2_facets() {
        let cx = matching_complex(&five_edge_tree(), 2).unwrap();
        let mut f = facet_labels(&cx);
        f.sort();
        let expect: Vec<Vec<String>> = [
            vec!["a", "b", "d", "e"],
            vec!["a", "c", "d"],
            vec!["a", "c", "e"],
            vec!["b", "c", "d"],
            vec!["b", "c", "e"],
        ]
        .iter()
        .map(|v| v.iter().map(|s| s.to_string()).collect())
        .collect();
        assert_eq!(f, expect);
    }

    #[test]
    fn claw_m2_is_triangle_boundary() {
        let cx = matching_complex(&star(3), 2).unwrap();
        assert_eq!(cx.f_vector(), vec![1, 3, 3]);
    }

    #[test]
    fn k2_m1() {
        let cx = matching_complex(&complete(2), 1).unwrap();
        assert_eq!(cx.f_vector(), vec![1, 1]);
    }

    #[test]
    fn bd_caterpillar_base() {
        let g = caterpillar(1, 4).unwrap();
        let bd = DegreeBound::uniform(&g, 2).with(&caterpillar_end(1), 1);
        let cx = bounded_degree_complex(&g, &bd).unwrap();
        assert_eq!(cx.f_vector(), vec![1, 4]);
        let zero = bounded_degree_complex(&g, &DegreeBound::uniform(&g, 0)).unwrap();
        assert!(zero.is_void());
    }

    #[test]
    fn ind_of_line_graph_is_m1() {
        let w = wheel(5).unwrap();
        let a = independence_complex(&w.line_graph()).unwrap();
        let b = matching_complex(&w, 1).unwrap();
        assert_eq!(a, b);
        let c3 = independence_complex(&cycle(3).unwrap()).unwrap();
        assert_eq!(c3.f_vector(), vec![1, 3]);
    }

    #[test]
    fn join_of_claw_complexes_is_cp1() {
        let cp0a = matching_complex(&clawed_path(0).with_prefix("a"), 2).unwrap();
        let cp0b = matching_complex(&clawed_path(0).with_prefix("b"), 2).unwrap();
        let j = join(&cp0a, &cp0b).unwrap();
        // CP1 as the wedge of two claws at leaves
        let cp1 = clawed_path(0)
            .with_prefix("a")
            .wedge_at(&clawed_path(0).with_prefix("b"), "aleaf:0:0", "bleaf:0:0")
            .unwrap();
        let m = matching_complex(&cp1, 2).unwrap();
        assert!(j.same_faces_as(&m));
        assert!(m.is_isomorphic_faces(&matching_complex(&clawed_path(1), 2).unwrap()));
        assert!(matches!(join(&cp0a, &cp0a), Err(ComplexError::LabelCollision(_))));
    }

    #[test]
    fn budget_is_enforced() {
        let g = complete(8);
        let r = matching_complex_with(&g, 2, Budget::new(100));
        assert!(matches!(r, Err(ComplexError::BudgetExceeded { limit: 100, bits: 28 })));
    }

    #[test]
    fn json_round_trip() {
        let cx = matching_complex(&five_edge_tree(), 2).unwrap();
        let s = serde_json::to_string(&cx.to_json()).unwrap();
        assert_eq!(SimplicialComplex::from_json_str(&s).unwrap(), cx);
    }

    #[test]
    fn from_faces_rejects_open_family() {
        let r = SimplicialComplex::from_faces(vec!["a".into(), "b".into()], vec![0b11, 0b01]);
        assert!(matches!(r, Err(ComplexError::NotDownwardClosed(_))));
    }
}

impl SimplicialComplex {
    /// Face-family isomorphism under some vertex bijection, by brute force on
    /// vertex degree classes. Intended for small complexes in tests.
    pub fn is_isomorphic_faces(&self, other: &Self) -> bool {
        if self.f_vector() != other.f_vector() || self.labels.len() != other.labels.len() {
            return false;
        }
        let n = self.labels.len();
        let count = |cx: &Self, i: usize| cx.faces.iter().filter(|&&f| f >> i & 1 == 1).count();
        let ca: Vec<usize> = (0..n).map(|i| count(self, i)).collect();
        let cb: Vec<usize> = (0..n).map(|i| count(other, i)).collect();
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        fn go(
            a: &SimplicialComplex,
            b: &SimplicialComplex,
            ca: &[usize],
            cb: &[usize],
            i: usize,
            map: &mut Vec<usize>,
            used: &mut Vec<bool>,
        ) -> bool {
            let n = ca.len();
            if i == n {
                return a.faces.iter().all(|&f| {
                    let g = (0..n).filter(|&j| f >> j & 1 == 1).fold(0u64, |m, j| m | 1 << map[j]);
                    b.contains(g)
                });
            }
            for c in 0..n {
                if used[c] || ca[i] != cb[c] {
                    continue;
                }
                map[i] = c;
                used[c] = true;
                // prune on edges among assigned vertices
                let ok = (0..i).all(|j| {
                    a.contains(1 << i | 1 << j) == b.contains(1 << c | 1 << map[j])
                });
                if ok && go(a, b, ca, cb, i + 1, map, used) {
                    return true;
                }
                used[c] = false;
            }
            false
        }
        go(self, other, &ca, &cb, 0, &mut map, &mut used)
    }
}
