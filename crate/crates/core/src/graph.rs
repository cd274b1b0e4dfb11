//! Finite simple graphs with string vertex ids and labeled edges.
//!
//! Vertices are kept in natural order (digit runs compare numerically, so
//! `c2 < c10`). Edges carry a label because matching complexes use edges as
//! their vertices; unlabeled edges get the label `u-v`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("loop at `{0}`")]
    Loop(String),
    #[error("parallel edge between `{0}` and `{1}`")]
    ParallelEdge(String, String),
    #[error("edge label `{0}` used twice")]
    DuplicateEdgeLabel(String),
    #[error("`{0}` is not a leaf")]
    NotALeaf(String),
    #[error("vertex sets are not disjoint (shared `{0}`)")]
    NotDisjoint(String),
    #[error("vertex `{0}` has degree {1} > 3")]
    DegreeTooLarge(String, usize),
    #[error("unknown graph family `{0}`")]
    UnknownFamily(String),
    #[error("parameter out of range: {0}")]
    BadParameter(String),
    #[error("malformed graph json: {0}")]
    Json(String),
}

/// Compare two labels treating maximal digit runs as numbers.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (ab, bb) = (a.as_bytes(), b.as_bytes());
    let (mut i, mut j) = (0, 0);
    while i < ab.len() && j < bb.len() {
        let (ca, cb) = (ab[i], bb[j]);
        if ca.is_ascii_digit() && cb.is_ascii_digit() {
            let si = i;
            while i < ab.len() && ab[i].is_ascii_digit() {
                i += 1;
            }
            let sj = j;
            while j < bb.len() && bb[j].is_ascii_digit() {
                j += 1;
            }
            let na = a[si..i].trim_start_matches('0');
            let nb = b[sj..j].trim_start_matches('0');
            let ord = na
                .len()
                .cmp(&nb.len())
                .then_with(|| na.cmp(nb))
                .then_with(|| (i - si).cmp(&(j - sj)));
            if ord != Ordering::Equal {
                return ord;
            }
        } else {
            if ca != cb {
                return ca.cmp(&cb);
            }
            i += 1;
            j += 1;
        }
    }
    (ab.len() - i).cmp(&(bb.len() - j))
}

/// String wrapper ordered by [`natural_cmp`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NatKey(pub String);

impl Ord for NatKey {
    fn cmp(&self, other: &Self) -> Ordering {
        natural_cmp(&self.0, &other.0)
    }
}

impl PartialOrd for NatKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    /// Smaller endpoint index.
    pub u: usize,
    pub v: usize,
    pub label: String,
}

#[derive(Clone, Debug)]
pub struct Graph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<Edge>,
    edge_index: HashMap<String, usize>,
    adj: Vec<Vec<usize>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.edges == other.edges
    }
}
impl Eq for Graph {}

pub fn default_edge_label(a: &str, b: &str) -> String {
    if natural_cmp(a, b) == Ordering::Greater {
        format!("{b}-{a}")
    } else {
        format!("{a}-{b}")
    }
}

/// Accumulates vertices and edges; validation happens in [`GraphBuilder::build`].
#[derive(Default, Clone, Debug)]
pub struct GraphBuilder {
    vertices: Vec<String>,
    edges: Vec<(String, String, Option<String>)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self, v: impl Into<String>) -> &mut Self {
        self.vertices.push(v.into());
        self
    }

    pub fn edge(&mut self, u: impl Into<String>, v: impl Into<String>) -> &mut Self {
        self.edges.push((u.into(), v.into(), None));
        self
    }

    pub fn labeled_edge(
        &mut self,
        u: impl Into<String>,
        v: impl Into<String>,
        label: impl Into<String>,
    ) -> &mut Self {
        self.edges.push((u.into(), v.into(), Some(label.into())));
        self
    }

    pub fn build(&self) -> Result<Graph, GraphError> {
        Graph::from_parts(self.vertices.iter().cloned(), self.edges.iter().cloned())
    }
}

impl Graph {
    pub fn from_parts(
        vertices: impl IntoIterator<Item = String>,
        edges: impl IntoIterator<Item = (String, String, Option<String>)>,
    ) -> Result<Graph, GraphError> {
        let mut set = BTreeSet::new();
        for v in vertices {
            if !set.insert(NatKey(v.clone())) {
                return Err(GraphError::DuplicateVertex(v));
            }
        }
        let names: Vec<String> = set.into_iter().map(|k| k.0).collect();
        let index: HashMap<String, usize> =
            names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();

        let mut seen_pairs = BTreeSet::new();
        let mut by_label: BTreeMap<NatKey, (usize, usize)> = BTreeMap::new();
        for (a, b, label) in edges {
            let ia = *index.get(&a).ok_or_else(|| GraphError::UnknownVertex(a.clone()))?;
            let ib = *index.get(&b).ok_or_else(|| GraphError::UnknownVertex(b.clone()))?;
            if ia == ib {
                return Err(GraphError::Loop(a));
            }
            let (u, v) = (ia.min(ib), ia.max(ib));
            if !seen_pairs.insert((u, v)) {
                return Err(GraphError::ParallelEdge(names[u].clone(), names[v].clone()));
            }
            let label = label.unwrap_or_else(|| default_edge_label(&names[u], &names[v]));
            if by_label.insert(NatKey(label.clone()), (u, v)).is_some() {
                return Err(GraphError::DuplicateEdgeLabel(label));
            }
        }
        let edges: Vec<Edge> = by_label
            .into_iter()
            .map(|(l, (u, v))| Edge { u, v, label: l.0 })
            .collect();
        let edge_index = edges.iter().enumerate().map(|(i, e)| (e.label.clone(), i)).collect();
        let mut adj = vec![Vec::new(); names.len()];
        for e in &edges {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph { names, index, edges, edge_index, adj })
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.names
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn require_vertex(&self, name: &str) -> Result<usize, GraphError> {
        self.vertex_index(name).ok_or_else(|| GraphError::UnknownVertex(name.to_string()))
    }

    pub fn edge_by_label(&self, label: &str) -> Option<usize> {
        self.edge_index.get(label).copied()
    }

    pub fn edge_labels(&self) -> Vec<String> {
        self.edges.iter().map(|e| e.label.clone()).collect()
    }

    /// Index of the edge joining two vertex indices.
    pub fn find_edge(&self, a: usize, b: usize) -> Option<usize> {
        let (u, v) = (a.min(b), a.max(b));
        self.edges.iter().position(|e| e.u == u && e.v == v)
    }

    pub fn edge_names(&self, e: usize) -> (&str, &str) {
        let ed = &self.edges[e];
        (&self.names[ed.u], &self.names[ed.v])
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn degree_of(&self, name: &str) -> Result<usize, GraphError> {
        Ok(self.degree(self.require_vertex(name)?))
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_leaf(&self, i: usize) -> bool {
        self.adj[i].len() == 1
    }

    pub fn leaves(&self) -> Vec<String> {
        (0..self.vertex_count())
            .filter(|&i| self.is_leaf(i))
            .map(|i| self.names[i].clone())
            .collect()
    }

    /// Edges incident to vertex `i`, as edge indices.
    pub fn incident_edges(&self, i: usize) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| self.edges[e].u == i || self.edges[e].v == i)
            .collect()
    }

    fn parts(&self) -> (Vec<String>, Vec<(String, String, Option<String>)>) {
        let vs = self.names.clone();
        let es = self
            .edges
            .iter()
            .map(|e| (self.names[e.u].clone(), self.names[e.v].clone(), Some(e.label.clone())))
            .collect();
        (vs, es)
    }

    /// Copy with every vertex id and edge label prefixed.
    pub fn with_prefix(&self, prefix: &str) -> Graph {
        let (vs, es) = self.parts();
        Graph::from_parts(
            vs.into_iter().map(|v| format!("{prefix}{v}")),
            es.into_iter().map(|(a, b, l)| {
                (format!("{prefix}{a}"), format!("{prefix}{b}"), l.map(|l| format!("{prefix}{l}")))
            }),
        )
        .expect("prefixing preserves validity")
    }

    /// Same graph with default `u-v` edge labels.
    pub fn with_default_labels(&self) -> Graph {
        let (vs, es) = self.parts();
        Graph::from_parts(vs, es.into_iter().map(|(a, b, _)| (a, b, None)))
            .expect("relabeling preserves validity")
    }

    fn fresh_name(&self, base: &str, taken: &BTreeSet<String>) -> String {
        let mut k = 0;
        loop {
            let cand = format!("{base}:{k}");
            if !self.index.contains_key(&cand) && !taken.contains(&cand) {
                return cand;
            }
            k += 1;
        }
    }

    /// Replace edge `{u,v}` by a path through the new vertex `sub:u:v`.
    pub fn subdivide(&self, u: &str, v: &str) -> Result<Graph, GraphError> {
        let (iu, iv) = (self.require_vertex(u)?, self.require_vertex(v)?);
        let e = self
            .find_edge(iu, iv)
            .ok_or_else(|| GraphError::UnknownEdge(default_edge_label(u, v)))?;
        let (a, b) = (self.names[self.edges[e].u].clone(), self.names[self.edges[e].v].clone());
        let mid = format!("sub:{a}:{b}");
        if self.index.contains_key(&mid) {
            return Err(GraphError::DuplicateVertex(mid));
        }
        let (mut vs, mut es) = self.parts();
        es.remove(e);
        vs.push(mid.clone());
        es.push((a, mid.clone(), None));
        es.push((mid, b, None));
        Graph::from_parts(vs, es)
    }

    /// Add a new vertex `leaf:v:k` adjacent to `v`.
    pub fn attach_leaf(&self, v: &str) -> Result<Graph, GraphError> {
        self.require_vertex(v)?;
        let leaf = self.fresh_name(&format!("leaf:{v}"), &BTreeSet::new());
        let (mut vs, mut es) = self.parts();
        vs.push(leaf.clone());
        es.push((v.to_string(), leaf, None));
        Graph::from_parts(vs, es)
    }

    /// Identify two leaves; the merged vertex keeps the name `u`.
    pub fn identify_leaves(&self, u: &str, v: &str) -> Result<Graph, GraphError> {
        let (iu, iv) = (self.require_vertex(u)?, self.require_vertex(v)?);
        for (i, n) in [(iu, u), (iv, v)] {
            if !self.is_leaf(i) {
                return Err(GraphError::NotALeaf(n.to_string()));
            }
        }
        if iu == iv {
            return Err(GraphError::BadParameter("cannot identify a leaf with itself".into()));
        }
        if self.adj[iu][0] == iv {
            return Err(GraphError::Loop(u.to_string()));
        }
        let (vs, es) = self.parts();
        let vs = vs.into_iter().filter(|x| x != v);
        let es = es.into_iter().map(|(a, b, l)| {
            let a = if a == v { u.to_string() } else { a };
            let b = if b == v { u.to_string() } else { b };
            (a, b, l)
        });
        Graph::from_parts(vs, es)
    }

    /// Union with a vertex-disjoint `other`, gluing `v2 ∈ other` onto `v1 ∈ self`.
    pub fn wedge_at(&self, other: &Graph, v1: &str, v2: &str) -> Result<Graph, GraphError> {
        self.require_vertex(v1)?;
        other.require_vertex(v2)?;
        if let Some(shared) = other.names.iter().find(|n| self.index.contains_key(*n)) {
            return Err(GraphError::NotDisjoint(shared.clone()));
        }
        let (mut vs, mut es) = self.parts();
        let (ovs, oes) = other.parts();
        let ren = |x: String| if x == v2 { v1.to_string() } else { x };
        vs.extend(ovs.into_iter().filter(|x| x != v2));
        es.extend(oes.into_iter().map(|(a, b, l)| (ren(a), ren(b), l)));
        Graph::from_parts(vs, es)
    }

    /// Attach one leaf to every vertex.
    pub fn whisker_all(&self) -> Graph {
        let (mut vs, mut es) = self.parts();
        let mut taken = BTreeSet::new();
        for v in &self.names {
            let leaf = self.fresh_name(&format!("leaf:{v}"), &taken);
            taken.insert(leaf.clone());
            vs.push(leaf.clone());
            es.push((v.clone(), leaf, None));
        }
        Graph::from_parts(vs, es).expect("whiskering preserves validity")
    }

    /// Subdivide every edge and pad every original vertex with leaves up to degree 3.
    pub fn claw(&self) -> Result<Graph, GraphError> {
        for (i, n) in self.names.iter().enumerate() {
            if self.degree(i) > 3 {
                return Err(GraphError::DegreeTooLarge(n.clone(), self.degree(i)));
            }
        }
        let mut vs = self.names.clone();
        let mut es = Vec::new();
        for e in &self.edges {
            let (a, b) = (&self.names[e.u], &self.names[e.v]);
            let mid = format!("sub:{a}:{b}");
            vs.push(mid.clone());
            es.push((a.clone(), mid.clone(), None));
            es.push((mid, b.clone(), None));
        }
        let mut taken = BTreeSet::new();
        for (i, v) in self.names.iter().enumerate() {
            for _ in self.degree(i)..3 {
                let leaf = self.fresh_name(&format!("leaf:{v}"), &taken);
                taken.insert(leaf.clone());
                vs.push(leaf.clone());
                es.push((v.clone(), leaf, None));
            }
        }
        Graph::from_parts(vs, es)
    }

    /// Line graph; its vertices are this graph's edge labels.
    pub fn line_graph(&self) -> Graph {
        let vs = self.edges.iter().map(|e| e.label.clone());
        let mut es = Vec::new();
        for i in 0..self.edges.len() {
            for j in i + 1..self.edges.len() {
                let (a, b) = (&self.edges[i], &self.edges[j]);
                if a.u == b.u || a.u == b.v || a.v == b.u || a.v == b.v {
                    es.push((a.label.clone(), b.label.clone(), None));
                }
            }
        }
        Graph::from_parts(vs, es).expect("line graph is simple")
    }

    /// Delete a vertex and its incident edges.
    pub fn remove_vertex(&self, v: &str) -> Result<Graph, GraphError> {
        self.require_vertex(v)?;
        let (vs, es) = self.parts();
        Graph::from_parts(
            vs.into_iter().filter(|x| x != v),
            es.into_iter().filter(|(a, b, _)| a != v && b != v),
        )
    }

    /// Delete edges by label.
    pub fn remove_edges(&self, labels: &[&str]) -> Result<Graph, GraphError> {
        for l in labels {
            if self.edge_by_label(l).is_none() {
                return Err(GraphError::UnknownEdge(l.to_string()));
            }
        }
        let (vs, es) = self.parts();
        Graph::from_parts(
            vs,
            es.into_iter().filter(|(_, _, l)| !labels.contains(&l.as_deref().unwrap_or(""))),
        )
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            vertices: self.names.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| [self.names[e.u].clone(), self.names[e.v].clone()])
                .collect(),
            labels: Some(self.edge_labels()),
        }
    }

    pub fn from_json(j: &GraphJson) -> Result<Graph, GraphError> {
        if let Some(ls) = &j.labels {
            if ls.len() != j.edges.len() {
                return Err(GraphError::Json("labels and edges differ in length".into()));
            }
        }
        let es = j.edges.iter().enumerate().map(|(i, [a, b])| {
            (a.clone(), b.clone(), j.labels.as_ref().map(|ls| ls[i].clone()))
        });
        Graph::from_parts(j.vertices.iter().cloned(), es)
    }

    pub fn from_json_str(s: &str) -> Result<Graph, GraphError> {
        let j: GraphJson = serde_json::from_str(s).map_err(|e| GraphError::Json(e.to_string()))?;
        Graph::from_json(&j)
    }

    /// Brute-force isomorphism test (ignores labels); fine for desk-scale graphs.
    pub fn is_isomorphic(&self, other: &Graph) -> bool {
        let n = self.vertex_count();
        if n != other.vertex_count() || self.edge_count() != other.edge_count() {
            return false;
        }
        let mut da: Vec<usize> = (0..n).map(|i| self.degree(i)).collect();
        let mut db: Vec<usize> = (0..n).map(|i| other.degree(i)).collect();
        da.sort_unstable();
        db.sort_unstable();
        if da != db {
            return false;
        }
        let adj_b: BTreeSet<(usize, usize)> = other.edges.iter().map(|e| (e.u, e.v)).collect();
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        fn go(
            a: &Graph,
            b: &Graph,
            adj_b: &BTreeSet<(usize, usize)>,
            i: usize,
            map: &mut Vec<usize>,
            used: &mut Vec<bool>,
        ) -> bool {
            if i == a.vertex_count() {
                return true;
            }
            for c in 0..b.vertex_count() {
                if used[c] || a.degree(i) != b.degree(c) {
                    continue;
                }
                let ok = a.neighbors(i).iter().filter(|&&j| j < i).all(|&j| {
                    let (x, y) = (map[j].min(c), map[j].max(c));
                    adj_b.contains(&(x, y))
                }) && (0..i).filter(|j| !a.neighbors(i).contains(j)).all(|j| {
                    let (x, y) = (map[j].min(c), map[j].max(c));
                    !adj_b.contains(&(x, y))
                });
                if ok {
                    map[i] = c;
                    used[c] = true;
                    if go(a, b, adj_b, i + 1, map, used) {
                        return true;
                    }
                    used[c] = false;
                }
            }
            false
        }
        go(self, other, &adj_b, 0, &mut map, &mut used)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GraphJson {
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

/// An induced claw: a degree-3 center whose three neighbors have degree at most 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClawUnit {
    pub center: String,
    /// Labels of the three incident edges, in natural order.
    pub edges: [String; 3],
}

impl ClawUnit {
    pub fn contains_edge(&self, label: &str) -> bool {
        self.edges.iter().any(|e| e == label)
    }
}

pub fn find_claw_units(g: &Graph) -> Vec<ClawUnit> {
    let mut out = Vec::new();
    for c in 0..g.vertex_count() {
        if g.degree(c) != 3 || g.neighbors(c).iter().any(|&w| g.degree(w) > 2) {
            continue;
        }
        let mut labels: Vec<String> = g
            .incident_edges(c)
            .into_iter()
            .map(|e| g.edges()[e].label.clone())
            .collect();
        labels.sort_by(|a, b| natural_cmp(a, b));
        out.push(ClawUnit {
            center: g.name(c).to_string(),
            edges: [labels[0].clone(), labels[1].clone(), labels[2].clone()],
        });
    }
    out
}

/// Whether the induced claw units partition the edge set.
pub fn decomposes_into_claws(g: &Graph) -> bool {
    let units = find_claw_units(g);
    let mut covered = BTreeSet::new();
    for u in &units {
        for e in &u.edges {
            if !covered.insert(e.clone()) {
                return false;
            }
        }
    }
    covered.len() == g.edge_count()
}

pub mod families {
    //! Named graph families and fixed example graphs.
    use super::*;

    fn err(msg: &str) -> GraphError {
        GraphError::BadParameter(msg.to_string())
    }

    /// P_n: `n` edges on vertices `0..=n`.
    pub fn path(n: usize) -> Graph {
        let mut b = GraphBuilder::new();
        for i in 0..=n {
            b.vertex(i.to_string());
        }
        for i in 0..n {
            b.edge(i.to_string(), (i + 1).to_string());
        }
        b.build().expect("path")
    }

    pub fn cycle(n: usize) -> Result<Graph, GraphError> {
        if n < 3 {
            return Err(err("cycle needs n >= 3"));
        }
        let mut b = GraphBuilder::new();
        for i in 0..n {
            b.vertex(i.to_string());
            b.edge(i.to_string(), ((i + 1) % n).to_string());
        }
        b.build()
    }

    /// St_m: hub `h` with `m` leaves.
    pub fn star(m: usize) -> Graph {
        let mut b = GraphBuilder::new();
        b.vertex("h");
        for i in 0..m {
            b.vertex(i.to_string()).edge("h", i.to_string());
        }
        b.build().expect("star")
    }

    pub fn complete(n: usize) -> Graph {
        let mut b = GraphBuilder::new();
        for i in 0..n {
            b.vertex(i.to_string());
            for j in 0..i {
                b.edge(j.to_string(), i.to_string());
            }
        }
        b.build().expect("complete")
    }

    pub fn complete_bipartite(m: usize, n: usize) -> Graph {
        let mut b = GraphBuilder::new();
        for i in 0..m {
            b.vertex(format!("a{i}"));
        }
        for j in 0..n {
            b.vertex(format!("b{j}"));
            for i in 0..m {
                b.edge(format!("a{i}"), format!("b{j}"));
            }
        }
        b.build().expect("complete bipartite")
    }

    pub fn edgeless(n: usize) -> Graph {
        let mut b = GraphBuilder::new();
        for i in 0..n {
            b.vertex(i.to_string());
        }
        b.build().expect("edgeless")
    }

    /// W_n: rim `r0..r{n-2}`, hub `h`; `c{i} = {r(i-1), r(i)}`, `l{i} = {h, r(i)}`.
    pub fn wheel(n: usize) -> Result<Graph, GraphError> {
        if n < 4 {
            return Err(err("wheel needs n >= 4"));
        }
        let m = n - 1;
        let mut b = GraphBuilder::new();
        b.vertex("h");
        for i in 0..m {
            b.vertex(format!("r{i}"));
        }
        for i in 0..m {
            let prev = (i + m - 1) % m;
            b.labeled_edge(format!("r{prev}"), format!("r{i}"), format!("c{i}"));
            b.labeled_edge("h", format!("r{i}"), format!("l{i}"));
        }
        b.build()
    }

    /// G_n^m: spine `s0..s{n-1}`, legs `t{i}.{k}`.
    pub fn caterpillar(n: usize, m: usize) -> Result<Graph, GraphError> {
        if n < 1 || m < 1 {
            return Err(err("caterpillar needs n >= 1 and m >= 1"));
        }
        let mut b = GraphBuilder::new();
        for i in 0..n {
            b.vertex(format!("s{i}"));
            if i > 0 {
                b.edge(format!("s{}", i - 1), format!("s{i}"));
            }
            for k in 0..m {
                b.vertex(format!("t{i}.{k}")).edge(format!("s{i}"), format!("t{i}.{k}"));
            }
        }
        b.build()
    }

    /// Name of the spine vertex whose cap is 1 in BD(G_n).
    pub fn caterpillar_end(n: usize) -> String {
        format!("s{}", n - 1)
    }

    pub fn clawed_path(n: usize) -> Graph {
        path(n).claw().expect("paths have max degree 2")
    }

    pub fn clawed_cycle(n: usize) -> Result<Graph, GraphError> {
        Ok(cycle(n)?.claw().expect("cycles have max degree 2"))
    }

    /// Fully whiskered n-cycle with cycle edges `1..n` and leaf edges `x{i},{i+1}`.
    ///
    /// Vertex `v{i}` joins cycle edges `i` and `i+1` (`v{n}` joins `n` and `1`).
    pub fn whiskered_cycle(n: usize) -> Result<Graph, GraphError> {
        if n < 3 {
            return Err(err("whiskered cycle needs n >= 3"));
        }
        let mut b = GraphBuilder::new();
        for i in 1..=n {
            b.vertex(format!("v{i}")).vertex(format!("u{i}"));
            let prev = if i == 1 { n } else { i - 1 };
            b.labeled_edge(format!("v{prev}"), format!("v{i}"), i.to_string());
            let next = if i == n { 1 } else { i + 1 };
            b.labeled_edge(format!("v{i}"), format!("u{i}"), format!("x{i},{next}"));
        }
        b.build()
    }

    /// The five-edge graph with edges a..e used for the first 2-matching example.
    pub fn five_edge_tree() -> Graph {
        let mut b = GraphBuilder::new();
        for v in ["A", "B", "C", "D", "E", "F"] {
            b.vertex(v);
        }
        b.labeled_edge("A", "C", "a")
            .labeled_edge("B", "C", "b")
            .labeled_edge("C", "D", "c")
            .labeled_edge("D", "E", "d")
            .labeled_edge("D", "F", "e");
        b.build().expect("five-edge tree")
    }

    /// Triangle with a pendant edge: pendant `x`, claw edges `y`, `z`, opposite edge `e`.
    pub fn paw() -> Graph {
        let mut b = GraphBuilder::new();
        for v in ["p", "q", "r", "s"] {
            b.vertex(v);
        }
        b.labeled_edge("q", "p", "x")
            .labeled_edge("q", "r", "y")
            .labeled_edge("q", "s", "z")
            .labeled_edge("r", "s", "e");
        b.build().expect("paw")
    }

    /// The five-vertex core used to illustrate clawing.
    pub fn spider_core() -> Graph {
        let mut b = GraphBuilder::new();
        for v in ["(-1,5)", "(-1,3)", "(0,4)", "(2,4)", "(4,4)"] {
            b.vertex(v);
        }
        b.edge("(-1,5)", "(0,4)")
            .edge("(-1,3)", "(0,4)")
            .edge("(0,4)", "(2,4)")
            .edge("(2,4)", "(4,4)");
        b.build().expect("spider core")
    }

    fn from_coords(edges: &[((i32, i32), (i32, i32))]) -> Graph {
        let name = |p: (i32, i32)| format!("({},{})", p.0, p.1);
        let mut b = GraphBuilder::new();
        let mut vs = BTreeSet::new();
        for &(p, q) in edges {
            vs.insert(name(p));
            vs.insert(name(q));
        }
        for v in vs {
            b.vertex(v);
        }
        for &(p, q) in edges {
            b.edge(name(p), name(q));
        }
        b.build().expect("coordinate graph")
    }

    /// Clawed non-separable graph with five claws and five attaching sites.
    /// Vertex ids are the drawing coordinates.
    pub fn five_claw_graph() -> Graph {
        from_coords(&FIVE_CLAW_EDGES)
    }

    /// Edges drawn solid in the five-site example (the toggle edges).
    pub fn five_claw_toggles() -> Vec<String> {
        FIVE_CLAW_TOGGLES.iter().map(|&(p, q)| coord_label(p, q)).collect()
    }

    /// Clawed non-separable graph with seven claws whose sites fall short of the bound.
    pub fn seven_claw_graph() -> Graph {
        from_coords(&SEVEN_CLAW_EDGES)
    }

    /// Solid toggle edges of the seven-claw example. The two claws drawn dashed
    /// have no toggle in the drawing; callers pick one.
    pub fn seven_claw_toggles() -> Vec<String> {
        SEVEN_CLAW_TOGGLES.iter().map(|&(p, q)| coord_label(p, q)).collect()
    }

    fn coord_label(p: (i32, i32), q: (i32, i32)) -> String {
        default_edge_label(&format!("({},{})", p.0, p.1), &format!("({},{})", q.0, q.1))
    }

    type Seg = ((i32, i32), (i32, i32));

    const FIVE_CLAW_EDGES: [Seg; 15] = [
        ((0, 7), (5, 7)),
        ((5, 7), (4, 2)),
        ((4, 2), (1, 2)),
        ((1, 2), (-1, -1)),
        ((-1, -1), (-5, -1)),
        ((-5, -1), (-7, 2)),
        ((-7, 2), (-5, 5)),
        ((-5, 5), (-7, 7)),
        ((-7, 7), (-4, 9)),
        ((-4, 9), (0, 7)),
        ((-4, 9), (-4, 12)),
        ((5, 7), (7, 9)),
        ((-5, 5), (-1, 5)),
        ((-1, 5), (1, 2)),
        ((-5, -1), (-7, -3)),
    ];

    const FIVE_CLAW_TOGGLES: [Seg; 5] = [
        ((-4, 9), (-4, 12)),
        ((5, 7), (7, 9)),
        ((-5, 5), (-1, 5)),
        ((-1, 5), (1, 2)),
        ((-5, -1), (-7, -3)),
    ];

    // Coordinates doubled so that the half-unit positions are integers.
    const SEVEN_CLAW_EDGES: [Seg; 21] = [
        ((28, 19), (22, 20)),
        ((22, 20), (20, 14)),
        ((20, 14), (26, 12)),
        ((26, 12), (26, 8)),
        ((26, 8), (29, 4)),
        ((29, 4), (33, 4)),
        ((36, 18), (33, 16)),
        ((33, 16), (36, 12)),
        ((32, 26), (44, 12)),
        ((44, 12), (40, 4)),
        ((26, 12), (29, 16)),
        ((29, 16), (33, 16)),
        ((29, 4), (26, 0)),
        ((22, 20), (20, 24)),
        ((44, 12), (48, 15)),
        ((32, 26), (32, 22)),
        ((32, 22), (36, 18)),
        ((32, 22), (28, 19)),
        ((36, 12), (36, 8)),
        ((36, 8), (40, 4)),
        ((36, 8), (33, 4)),
    ];

    const SEVEN_CLAW_TOGGLES: [Seg; 5] = [
        ((26, 12), (29, 16)),
        ((29, 16), (33, 16)),
        ((29, 4), (26, 0)),
        ((22, 20), (20, 24)),
        ((44, 12), (48, 15)),
    ];

    /// Centers of the two claws drawn dashed in the seven-claw example.
    pub fn seven_claw_untoggled_centers() -> [String; 2] {
        ["(32,22)".to_string(), "(36,8)".to_string()]
    }

    /// Build a graph from a family name and integer parameters.
    pub fn build_named(family: &str, params: &[usize]) -> Result<Graph, GraphError> {
        let need = |k: usize| -> Result<(), GraphError> {
            if params.len() == k {
                Ok(())
            } else {
                Err(err(&format!("{family} takes {k} parameter(s), got {}", params.len())))
            }
        };
        match family {
            "path" => {
                need(1)?;
                Ok(path(params[0]))
            }
            "cycle" => {
                need(1)?;
                cycle(params[0])
            }
            "star" => {
                need(1)?;
                Ok(star(params[0]))
            }
            "complete" => {
                need(1)?;
                Ok(complete(params[0]))
            }
            "complete-bipartite" => {
                need(2)?;
                Ok(complete_bipartite(params[0], params[1]))
            }
            "wheel" => {
                need(1)?;
                wheel(params[0])
            }
            "caterpillar" => {
                need(2)?;
                caterpillar(params[0], params[1])
            }
            "edgeless" => {
                need(1)?;
                Ok(edgeless(params[0]))
            }
            "clawed-path" => {
                need(1)?;
                Ok(clawed_path(params[0]))
            }
            "clawed-cycle" => {
                need(1)?;
                clawed_cycle(params[0])
            }
            "whiskered-cycle" => {
                need(1)?;
                whiskered_cycle(params[0])
            }
            "spider-core" => {
                need(0)?;
                Ok(spider_core())
            }
            "five-edge-tree" => {
                need(0)?;
                Ok(five_edge_tree())
            }
            "paw" => {
                need(0)?;
                Ok(paw())
            }
            "five-claw" => {
                need(0)?;
                Ok(five_claw_graph())
            }
            "seven-claw" => {
                need(0)?;
                Ok(seven_claw_graph())
            }
            other => Err(GraphError::UnknownFamily(other.to_string())),
        }
    }

    /// Parse a builder string such as `wheel:5` or `caterpillar:3:2`.
    /// A leading `:` is ignored.
    pub fn parse_builder(s: &str) -> Result<Graph, GraphError> {
        let s = s.strip_prefix(':').unwrap_or(s);
        let mut parts = s.split(':');
        let family = parts.next().unwrap_or_default();
        let params = parts
            .map(|p| p.parse::<usize>().map_err(|_| err(&format!("bad integer `{p}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        build_named(family, &params)
    }
}

/// Recipe for a clawed non-separable graph.
///
/// Each step glues a clawed path with `claws` claw units (the clawed graph of a
/// path on `claws` vertices) between two current leaves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClawedBuildScript {
    pub n: usize,
    pub steps: Vec<ClawedStep>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClawedStep {
    pub v1: String,
    pub v2: String,
    pub claws: usize,
}

/// Replay result, with the leaves consumed at every step.
#[derive(Clone, Debug)]
pub struct ClawedBuild {
    pub graph: Graph,
    /// Per step: centers of the two chosen leaf-claws and the centers of the new claws.
    pub history: Vec<StepRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepRecord {
    pub chosen: [String; 2],
    pub new_centers: Vec<String>,
}

pub fn build_clawed_nonseparable(script: &ClawedBuildScript) -> Result<ClawedBuild, GraphError> {
    let mut g = families::clawed_cycle(script.n)?;
    let mut history = Vec::new();
    for (k, step) in script.steps.iter().enumerate() {
        if step.claws == 0 {
            return Err(GraphError::BadParameter("a step needs at least one claw".into()));
        }
        let i1 = g.require_vertex(&step.v1)?;
        let i2 = g.require_vertex(&step.v2)?;
        for (i, n) in [(i1, &step.v1), (i2, &step.v2)] {
            if !g.is_leaf(i) {
                return Err(GraphError::NotALeaf(n.clone()));
            }
        }
        if i1 == i2 {
            return Err(GraphError::BadParameter("step needs two distinct leaves".into()));
        }
        let chosen = [g.name(g.neighbors(i1)[0]).to_string(), g.name(g.neighbors(i2)[0]).to_string()];
        let p = step.claws - 1;
        let prefix = format!("s{k}/");
        let cp = families::clawed_path(p).with_prefix(&prefix);
        let a = format!("{prefix}leaf:0:0");
        let b = if p == 0 { format!("{prefix}leaf:0:1") } else { format!("{prefix}leaf:{p}:0") };
        let merged = g.wedge_at(&cp, &step.v1, &a)?;
        g = merged.identify_leaves(&step.v2, &b)?;
        let new_centers = (0..=p).map(|i| format!("{prefix}{i}")).collect();
        history.push(StepRecord { chosen, new_centers });
    }
    Ok(ClawedBuild { graph: g, history })
}

/// Claw units containing a leaf.
pub fn leaf_claws(g: &Graph) -> Vec<ClawUnit> {
    find_claw_units(g)
        .into_iter()
        .filter(|u| {
            let c = g.vertex_index(&u.center).expect("unit center exists");
            g.neighbors(c).iter().any(|&w| g.is_leaf(w))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::families::*;
    use super::*;

    #[test]
    fn natural_order() {
        let mut v = vec!["c10", "c2", "c1", "l0", "a", "10", "9"];
        v.sort_by(|a, b| natural_cmp(a, b));
        assert_eq!(v, ["9", "10", "a", "c1", "c2", "c10", "l0"]);
        assert_eq!(natural_cmp("x01", "x1"), Ordering::Greater);
    }

    #[test]
    fn wheel_labels() {
        let w = wheel(5).unwrap();
        assert_eq!((w.vertex_count(), w.edge_count()), (5, 8));
        assert_eq!(w.edge_labels(), ["c0", "c1", "c2", "c3", "l0", "l1", "l2", "l3"]);
        // c1 meets l0 and l1
        let lg = w.line_graph();
        let c1 = lg.require_vertex("c1").unwrap();
        let nb: Vec<&str> = lg.neighbors(c1).iter().map(|&i| lg.name(i)).collect();
        assert_eq!(nb, ["c0", "c2", "l0", "l1"]);
    }

    #[test]
    fn path_zero_and_caterpillar() {
        let p = path(0);
        assert_eq!((p.vertex_count(), p.edge_count()), (1, 0));
        let c = caterpillar(2, 3).unwrap();
        assert_eq!((c.vertex_count(), c.edge_count()), (8, 7));
    }

    #[test]
    fn surgeries_change_counts() {
        let p = path(2);
        let s = p.subdivide("0", "1").unwrap();
        assert_eq!((s.vertex_count(), s.edge_count()), (4, 3));
        assert!(s.vertex_index("sub:0:1").is_some());
        let l = p.attach_leaf("1").unwrap();
        assert!(l.is_isomorphic(&star(3)));
        assert!(l.vertex_index("leaf:1:0").is_some());
        let q = path(3);
        let id = q.identify_leaves("0", "3").unwrap();
        assert_eq!((id.vertex_count(), id.edge_count()), (3, 3));
        assert!(matches!(q.identify_leaves("0", "1"), Err(GraphError::NotALeaf(_))));
    }

    #[test]
    fn claw_counts_on_spider_core() {
        let g = spider_core();
        let c = g.claw().unwrap();
        assert_eq!(c.vertex_count() - g.vertex_count(), 11);
        assert_eq!(c.edge_count() - 2 * g.edge_count(), 7);
        assert!(decomposes_into_claws(&c));
    }

    #[test]
    fn claw_of_point_is_k13() {
        assert!(clawed_path(0).is_isomorphic(&star(3)));
        assert!(matches!(complete(5).claw(), Err(GraphError::DegreeTooLarge(_, 4))));
    }

    #[test]
    fn cp2_ends_identified_is_cc3() {
        let cp = clawed_path(2);
        let cc = cp.identify_leaves("leaf:0:0", "leaf:2:0").unwrap();
        assert!(cc.is_isomorphic(&clawed_cycle(3).unwrap()));
        assert_eq!(clawed_cycle(3).unwrap().vertex_count(), 9);
    }

    #[test]
    fn whiskered_c6() {
        let w = cycle(6).unwrap().whisker_all();
        assert_eq!((w.vertex_count(), w.edge_count()), (12, 12));
        assert!(w.is_isomorphic(&whiskered_cycle(6).unwrap()));
    }

    #[test]
    fn claw_units() {
        let u = find_claw_units(&paw());
        assert_eq!(u.len(), 1);
        assert_eq!(u[0].edges, ["x", "y", "z"]);
        assert!(find_claw_units(&cycle(6).unwrap()).is_empty());
        assert_eq!(find_claw_units(&clawed_path(2)).len(), 3);
        assert!(!decomposes_into_claws(&whiskered_cycle(3).unwrap()));
    }

    #[test]
    fn line_graphs() {
        assert_eq!(path(2).line_graph().edge_count(), 1);
        let c = cycle(7).unwrap();
        assert!(c.line_graph().is_isomorphic(&c));
    }

    #[test]
    fn example_graphs() {
        let g8 = five_claw_graph();
        assert_eq!((g8.vertex_count(), g8.edge_count()), (14, 15));
        assert_eq!(find_claw_units(&g8).len(), 5);
        assert!(decomposes_into_claws(&g8));
        let g9 = seven_claw_graph();
        assert_eq!((g9.vertex_count(), g9.edge_count()), (19, 21));
        assert_eq!(find_claw_units(&g9).len(), 7);
        assert!(decomposes_into_claws(&g9));
        for t in five_claw_toggles() {
            assert!(g8.edge_by_label(&t).is_some(), "{t}");
        }
        for t in seven_claw_toggles() {
            assert!(g9.edge_by_label(&t).is_some(), "{t}");
        }
    }

    #[test]
    fn script_replays_five_claw() {
        let script = ClawedBuildScript {
            n: 3,
            steps: vec![ClawedStep { v1: "leaf:0:0".into(), v2: "leaf:1:0".into(), claws: 2 }],
        };
        let b = build_clawed_nonseparable(&script).unwrap();
        assert!(b.graph.is_isomorphic(&five_claw_graph()));
        assert_eq!(b.history[0].chosen, ["0", "1"]);
    }

    #[test]
    fn wedge_requires_disjoint() {
        let a = path(1);
        assert!(matches!(a.wedge_at(&a, "0", "1"), Err(GraphError::NotDisjoint(_))));
        let b = path(1).with_prefix("b");
        let w = a.wedge_at(&b, "1", "b0").unwrap();
        assert!(w.is_isomorphic(&path(2)));
    }

    #[test]
    fn json_round_trip() {
        let g = wheel(6).unwrap();
        let s = serde_json::to_string(&g.to_json()).unwrap();
        assert_eq!(Graph::from_json_str(&s).unwrap(), g);
    }

    #[test]
    fn builder_strings() {
        assert_eq!(families::parse_builder("wheel:5").unwrap().edge_count(), 8);
        assert_eq!(families::parse_builder(":edgeless:3").unwrap().edge_count(), 0);
        assert_eq!(families::parse_builder("caterpillar:3:2").unwrap().edge_count(), 8);
        assert!(families::parse_builder("moebius:3").is_err());
        assert!(families::parse_builder("wheel:3").is_err());
    }
}
