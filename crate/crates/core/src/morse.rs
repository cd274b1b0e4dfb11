//! Discrete Morse matchings on face posets.
//!
//! The poset is the face family of a [`SimplicialComplex`], covers being
//! one-vertex extensions. The empty face takes part unless a matching is built
//! with `include_empty = false`; in that case it is neither matched nor critical.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{matching_complex, ComplexError, Face, SimplicialComplex};
use crate::graph::{families, find_claw_units, ClawUnit, Graph, GraphError};
use crate::homology::BettiProfile;

const NONE: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MorseError {
    #[error("face {0:?} is not in the complex")]
    UnknownFace(Vec<String>),
    #[error("pair {0:?} / {1:?} is not a cover relation")]
    NotACover(Vec<String>, Vec<String>),
    #[error("face {0:?} is matched twice")]
    DoublyMatched(Vec<String>),
    #[error("matching is not acyclic")]
    NotAcyclic,
    #[error("edge `{edge}` is not in the claw unit centered at `{center}`")]
    NotAUnitEdge { center: String, edge: String },
    #[error("`{0}` is not the center of an induced claw unit")]
    NotAUnit(String),
    #[error("strata are not order compatible: {0:?} lies below {1:?}")]
    StrataOrder(Vec<String>, Vec<String>),
    #[error("unknown vertex label `{0}`")]
    UnknownLabel(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A partial matching on the face poset of a fixed complex, stored as a
/// partner table indexed by face id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorseMatching {
    partner: Vec<u32>,
    include_empty: bool,
}

impl MorseMatching {
    pub fn new(cx: &SimplicialComplex, include_empty: bool) -> Self {
        MorseMatching { partner: vec![NONE; cx.face_count()], include_empty }
    }

    /// Validate and build from explicit pairs.
    pub fn from_pairs(
        cx: &SimplicialComplex,
        pairs: &[(Face, Face)],
        include_empty: bool,
    ) -> Result<Self, MorseError> {
        let mut m = Self::new(cx, include_empty);
        for &(a, b) in pairs {
            let (lo, hi) = if a.count_ones() <= b.count_ones() { (a, b) } else { (b, a) };
            let ia = cx.face_id(lo).ok_or_else(|| MorseError::UnknownFace(cx.face_labels(lo)))?;
            let ib = cx.face_id(hi).ok_or_else(|| MorseError::UnknownFace(cx.face_labels(hi)))?;
            if lo & !hi != 0 || hi.count_ones() != lo.count_ones() + 1 || (!include_empty && lo == 0)
            {
                return Err(MorseError::NotACover(cx.face_labels(lo), cx.face_labels(hi)));
            }
            for (i, f) in [(ia, lo), (ib, hi)] {
                if m.partner[i] != NONE {
                    return Err(MorseError::DoublyMatched(cx.face_labels(f)));
                }
            }
            m.partner[ia] = ib as u32;
            m.partner[ib] = ia as u32;
        }
        Ok(m)
    }

    pub fn include_empty(&self) -> bool {
        self.include_empty
    }

    /// Partner table by face id; `u32::MAX` marks unmatched faces.
    pub fn partner_table(&self) -> &[u32] {
        &self.partner
    }

    fn participates(&self, f: Face) -> bool {
        self.include_empty || f != 0
    }

    pub fn is_matched_id(&self, i: usize) -> bool {
        self.partner[i] != NONE
    }

    pub fn is_critical(&self, cx: &SimplicialComplex, f: Face) -> bool {
        match cx.face_id(f) {
            Some(i) => self.partner[i] == NONE && self.participates(f),
            None => false,
        }
    }

    pub fn pair_count(&self) -> usize {
        self.partner.iter().filter(|&&p| p != NONE).count() / 2
    }

    /// Pairs as (lower, upper), in face order of the lower face.
    pub fn pairs(&self, cx: &SimplicialComplex) -> Vec<(Face, Face)> {
        let faces = cx.faces();
        (0..faces.len())
            .filter(|&i| self.partner[i] != NONE && (self.partner[i] as usize) > i)
            .map(|i| (faces[i], faces[self.partner[i] as usize]))
            .collect()
    }

    pub fn critical(&self, cx: &SimplicialComplex) -> Vec<Face> {
        cx.faces()
            .iter()
            .enumerate()
            .filter(|&(i, &f)| self.partner[i] == NONE && self.participates(f))
            .map(|(_, &f)| f)
            .collect()
    }

    /// Merge another matching on the same complex; faces may not overlap.
    pub fn union(&self, cx: &SimplicialComplex, other: &MorseMatching) -> Result<Self, MorseError> {
        let mut out = self.clone();
        for (i, &p) in other.partner.iter().enumerate() {
            if p == NONE {
                continue;
            }
            if out.partner[i] != NONE && out.partner[i] != p {
                return Err(MorseError::DoublyMatched(cx.face_labels(cx.faces()[i])));
            }
            out.partner[i] = p;
        }
        Ok(out)
    }

    /// Add one cover pair between two currently unmatched faces.
    pub fn add_pair(&mut self, cx: &SimplicialComplex, a: Face, b: Face) -> Result<(), MorseError> {
        let pairs = self.pairs(cx);
        let mut all = pairs;
        all.push((a, b));
        *self = MorseMatching::from_pairs(cx, &all, self.include_empty)?;
        Ok(())
    }

    pub fn to_json(&self, cx: &SimplicialComplex) -> MatchingJson {
        MatchingJson {
            pairs: self
                .pairs(cx)
                .into_iter()
                .map(|(a, b)| [cx.face_labels(a), cx.face_labels(b)])
                .collect(),
            critical: self.critical(cx).into_iter().map(|f| cx.face_labels(f)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingJson {
    pub pairs: Vec<[Vec<String>; 2]>,
    pub critical: Vec<Vec<String>>,
}

/// Toggle on vertex `v` among currently unmatched faces satisfying `allowed`:
/// pair `a` with `a ∪ {v}` whenever both qualify. Returns the number of new pairs.
pub fn toggle_within(
    cx: &SimplicialComplex,
    m: &mut MorseMatching,
    v: usize,
    allowed: impl Fn(Face) -> bool,
) -> usize {
    let bit = 1u64 << v;
    let faces = cx.faces();
    let mut added = 0;
    for i in 0..faces.len() {
        let f = faces[i];
        if f & bit != 0 || m.partner[i] != NONE || !m.participates(f) || !allowed(f) {
            continue;
        }
        if let Some(j) = cx.face_id(f | bit) {
            if m.partner[j] == NONE && allowed(f | bit) {
                m.partner[i] = j as u32;
                m.partner[j] = i as u32;
                added += 1;
            }
        }
    }
    added
}

pub fn toggle(cx: &SimplicialComplex, v: usize) -> MorseMatching {
    toggle_sequence(cx, &[v])
}

/// Toggle on `vs[0]`, then on `vs[1]` over what remains unmatched, and so on.
pub fn toggle_sequence(cx: &SimplicialComplex, vs: &[usize]) -> MorseMatching {
    let mut m = MorseMatching::new(cx, true);
    for &v in vs {
        toggle_within(cx, &mut m, v, |_| true);
    }
    m
}

pub fn vertex_ids(cx: &SimplicialComplex, labels: &[&str]) -> Result<Vec<usize>, MorseError> {
    labels
        .iter()
        .map(|l| cx.label_index(l).ok_or_else(|| MorseError::UnknownLabel(l.to_string())))
        .collect()
}

pub fn toggle_labels(cx: &SimplicialComplex, labels: &[&str]) -> Result<MorseMatching, MorseError> {
    Ok(toggle_sequence(cx, &vertex_ids(cx, labels)?))
}

/// No two critical faces form a cover, so no further pair can be added.
pub fn is_complete(cx: &SimplicialComplex, m: &MorseMatching) -> bool {
    let crit: BTreeSet<Face> = m.critical(cx).into_iter().collect();
    for &f in &crit {
        let mut rest = f;
        while rest != 0 {
            let b = rest.trailing_zeros();
            rest &= rest - 1;
            let g = f & !(1u64 << b);
            if crit.contains(&g) {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Debug)]
pub struct ClawMatching {
    pub matching: MorseMatching,
    pub complete: bool,
}

/// Sequential toggles on one chosen edge per claw unit, in the given order.
/// `choice` pairs a unit center with its toggle edge label.
pub fn claw_induced_matching(
    g: &Graph,
    cx: &SimplicialComplex,
    choice: &[(String, String)],
) -> Result<ClawMatching, MorseError> {
    let units: HashMap<String, ClawUnit> =
        find_claw_units(g).into_iter().map(|u| (u.center.clone(), u)).collect();
    let mut vs = Vec::with_capacity(choice.len());
    for (center, edge) in choice {
        let unit = units.get(center).ok_or_else(|| MorseError::NotAUnit(center.clone()))?;
        if !unit.contains_edge(edge) {
            return Err(MorseError::NotAUnitEdge { center: center.clone(), edge: edge.clone() });
        }
        vs.push(cx.label_index(edge).ok_or_else(|| MorseError::UnknownLabel(edge.clone()))?);
    }
    let matching = toggle_sequence(cx, &vs);
    let complete = is_complete(cx, &matching);
    Ok(ClawMatching { matching, complete })
}

/// Outcome of [`verify_acyclic`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// Every face in an order refining inclusion, matched pairs adjacent.
    Acyclic { extension: Vec<Face> },
    /// Closed gradient path `a1 ≺ u(a1) ≻ a2 ≺ u(a2) ≻ ... ≻ a1`, as (a_i, u(a_i)).
    Cycle { witness: Vec<(Face, Face)> },
}

impl Certificate {
    pub fn is_acyclic(&self) -> bool {
        matches!(self, Certificate::Acyclic { .. })
    }
}

/// Topologically sort the poset with matched pairs contracted to single nodes.
pub fn verify_acyclic(cx: &SimplicialComplex, m: &MorseMatching) -> Result<Certificate, MorseError> {
    let faces = cx.faces();
    let nf = faces.len();
    if m.partner.len() != nf {
        return Err(MorseError::NotAcyclic);
    }
    // validate
    for i in 0..nf {
        let p = m.partner[i];
        if p == NONE {
            continue;
        }
        let j = p as usize;
        if j >= nf || m.partner[j] as usize != i {
            return Err(MorseError::DoublyMatched(cx.face_labels(faces[i])));
        }
        let (a, b) = (faces[i], faces[j]);
        let (lo, hi) = if a.count_ones() < b.count_ones() { (a, b) } else { (b, a) };
        if lo & !hi != 0 || hi.count_ones() != lo.count_ones() + 1 {
            return Err(MorseError::NotACover(cx.face_labels(lo), cx.face_labels(hi)));
        }
    }
    // block id per face: the smaller face id of its pair
    let block = |i: usize| -> usize {
        let p = m.partner[i];
        if p == NONE {
            i
        } else {
            i.min(p as usize)
        }
    };
    let facet_ids = |i: usize, out: &mut Vec<usize>| {
        out.clear();
        let f = faces[i];
        let mut rest = f;
        while rest != 0 {
            let b = rest.trailing_zeros();
            rest &= rest - 1;
            out.push(cx.face_id(f & !(1u64 << b)).expect("closed"));
        }
    };
    // in-degree per block over covers joining distinct blocks
    let mut indeg = vec![0u32; nf];
    let mut ups: Vec<Vec<u32>> = vec![Vec::new(); nf];
    let mut buf = Vec::new();
    for t in 0..nf {
        facet_ids(t, &mut buf);
        for &s in &buf {
            if block(s) != block(t) {
                indeg[block(t)] += 1;
                ups[s].push(t as u32);
            }
        }
    }
    let mut queue: Vec<usize> = (0..nf).filter(|&i| block(i) == i && indeg[i] == 0).collect();
    let mut head = 0;
    let mut extension = Vec::with_capacity(nf);
    while head < queue.len() {
        let b = queue[head];
        head += 1;
        let members: Vec<usize> = if m.partner[b] == NONE {
            vec![b]
        } else {
            vec![b, m.partner[b] as usize]
        };
        let mut members = members;
        members.sort_by_key(|&i| faces[i].count_ones());
        for &i in &members {
            extension.push(faces[i]);
        }
        for &i in &members {
            for &t in &ups[i] {
                let bt = block(t as usize);
                indeg[bt] -= 1;
                if indeg[bt] == 0 {
                    queue.push(bt);
                }
            }
        }
    }
    if extension.len() == nf {
        return Ok(Certificate::Acyclic { extension });
    }
    // Every remaining block has a predecessor that also remains; walking
    // predecessors must revisit a block.
    let remaining: Vec<bool> = {
        let mut done = vec![false; nf];
        for &b in &queue {
            done[b] = true;
        }
        (0..nf).map(|i| !done[block(i)]).collect()
    };
    let start = (0..nf).find(|&i| remaining[i]).expect("some block remains");
    let mut order: Vec<usize> = Vec::new();
    let mut seen: HashMap<usize, usize> = HashMap::new();
    let mut cur = block(start);
    loop {
        if let Some(&pos) = seen.get(&cur) {
            order.drain(..pos);
            break;
        }
        seen.insert(cur, order.len());
        order.push(cur);
        let members: Vec<usize> = if m.partner[cur] == NONE {
            vec![cur]
        } else {
            vec![cur, m.partner[cur] as usize]
        };
        let mut next = None;
        'find: for &i in &members {
            facet_ids(i, &mut buf);
            for &s in &buf {
                if block(s) != cur && remaining[s] {
                    next = Some(block(s));
                    break 'find;
                }
            }
        }
        cur = next.expect("remaining blocks have remaining predecessors");
    }
    let witness = order
        .into_iter()
        .map(|b| {
            let (x, y) = (faces[b], faces[m.partner[b] as usize]);
            if x.count_ones() < y.count_ones() {
                (x, y)
            } else {
                (y, x)
            }
        })
        .collect();
    Ok(Certificate::Cycle { witness })
}

/// Union of per-stratum toggle sequences. `stratum(f)` indexes a chain of
/// strata; covers may only go from a stratum to itself or a later one.
/// `stages[s]` lists the vertices toggled inside stratum `s`, in order.
pub fn patchwork(
    cx: &SimplicialComplex,
    stratum: impl Fn(Face) -> usize,
    stages: &[Vec<usize>],
) -> Result<MorseMatching, MorseError> {
    check_strata(cx, &stratum)?;
    let mut m = MorseMatching::new(cx, true);
    for (s, vs) in stages.iter().enumerate() {
        for &v in vs {
            toggle_within(cx, &mut m, v, |f| stratum(f) == s);
        }
    }
    Ok(m)
}

/// Order compatibility of a stratification with a chain.
pub fn check_strata(cx: &SimplicialComplex, stratum: &impl Fn(Face) -> usize) -> Result<(), MorseError> {
    for &t in cx.faces() {
        let st = stratum(t);
        let mut rest = t;
        while rest != 0 {
            let b = rest.trailing_zeros();
            rest &= rest - 1;
            let s = t & !(1u64 << b);
            if stratum(s) > st {
                return Err(MorseError::StrataOrder(cx.face_labels(s), cx.face_labels(t)));
            }
        }
    }
    Ok(())
}

/// Critical face counts by dimension (the empty face has dimension -1).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorseVector {
    pub counts: BTreeMap<i32, u64>,
    /// Whether the empty face belongs to the poset and is matched.
    pub empty_matched: bool,
    pub pairs: usize,
}

impl MorseVector {
    pub fn get(&self, d: i32) -> u64 {
        self.counts.get(&d).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn euler(&self) -> i64 {
        self.counts
            .iter()
            .map(|(&d, &c)| if d.rem_euclid(2) == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    /// Morse inequalities c_i ≥ β̃_i.
    pub fn dominates(&self, p: &BettiProfile) -> bool {
        p.betti.iter().all(|(&d, &b)| self.get(d) >= b)
    }

    pub fn from_cells(cells: impl IntoIterator<Item = Face>, empty_matched: bool, pairs: usize) -> Self {
        let mut counts = BTreeMap::new();
        for f in cells {
            *counts.entry(f.count_ones() as i32 - 1).or_insert(0) += 1;
        }
        MorseVector { counts, empty_matched, pairs }
    }

    /// Remove `k` critical cells of dimension `d`.
    pub fn without(&self, d: i32, k: u64) -> Self {
        let mut out = self.clone();
        let e = out.counts.entry(d).or_insert(0);
        *e = e.saturating_sub(k);
        out.counts.retain(|_, v| *v > 0);
        out
    }

    pub fn describe(&self) -> String {
        if self.counts.is_empty() {
            return "none".into();
        }
        self.counts.iter().map(|(d, c)| format!("c{d}={c}")).collect::<Vec<_>>().join(",")
    }
}

pub fn morse_vector(cx: &SimplicialComplex, m: &MorseMatching) -> Result<MorseVector, MorseError> {
    if !verify_acyclic(cx, m)?.is_acyclic() {
        return Err(MorseError::NotAcyclic);
    }
    let empty_matched = m.include_empty && m.partner[0] != NONE;
    Ok(MorseVector::from_cells(m.critical(cx), empty_matched, m.pair_count()))
}

/// The Euler relation for a matching: with the empty face in the poset the
/// alternating count equals the reduced Euler characteristic, otherwise the
/// unreduced one.
pub fn euler_consistent(cx: &SimplicialComplex, m: &MorseMatching, v: &MorseVector) -> bool {
    let target = if m.include_empty { cx.reduced_euler() } else { cx.reduced_euler() + 1 };
    v.euler() == target
}

/// Which defining family of the top stratum to use in the wheel 2-matching pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WheelRVariant {
    /// Sets listed verbatim (n = 4) or the generators as written in the
    /// definition (n ≥ 5, fourth generator `{c_{n-2}, l_{n-2}, l_2}`).
    Literal,
    /// Upward closure of the listed sets (n = 4) or the fourth generator
    /// `{c_{n-2}, l_{n-2}, c_3, l_2}` (n ≥ 5).
    Closed,
}

#[derive(Clone, Debug)]
pub struct WheelM2Run {
    pub n: usize,
    pub variant: WheelRVariant,
    pub complex: SimplicialComplex,
    pub matching: MorseMatching,
    pub vector: MorseVector,
    pub strata_sizes: [usize; 3],
    /// Whether the lower two stage toggles matched their strata perfectly.
    pub lower_strata_perfect: bool,
    pub critical: Vec<Vec<String>>,
    pub r_toggles: Vec<String>,
}

/// Toggle order used inside the top stratum.
pub fn wheel_r_toggles(n: usize) -> Vec<String> {
    match n {
        4 => vec!["c1".into()],
        5 => vec!["c1".into(), "c3".into()],
        6 => vec!["c1".into(), "c3".into(), "c4".into()],
        _ => vec!["c4".into()],
    }
}

fn wheel_r_generators(n: usize, variant: WheelRVariant) -> Vec<Vec<String>> {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let c_last = format!("c{}", n - 2);
    let l_last = format!("l{}", n - 2);
    if n == 4 {
        return vec![
            s(&["c1", "c2", "l2"]),
            s(&["c2", "l2"]),
            s(&["c2", "l2", "l0"]),
            s(&["c1", "l0", "l1"]),
            s(&["c2", "l1", "l2"]),
        ];
    }
    let fourth = match variant {
        WheelRVariant::Literal => vec![c_last.clone(), l_last.clone(), "l2".into()],
        WheelRVariant::Closed => vec![c_last.clone(), l_last.clone(), "c3".into(), "l2".into()],
    };
    vec![
        s(&["c1", "l0", "l1"]),
        s(&["c1", "l0", "c3", "l2"]),
        vec![c_last, l_last, "c1".into(), "l1".into()],
        fourth,
    ]
}

/// The three-stratum patchwork matching on M_2(W_n): toggle `c0` on the bottom
/// stratum, `c2` on the middle one, then [`wheel_r_toggles`] on the top.
pub fn wheel_m2_pipeline(n: usize, variant: WheelRVariant) -> Result<WheelM2Run, MorseError> {
    let g = families::wheel(n)?;
    let cx = matching_complex(&g, 2)?;
    let mask = |ls: &[String]| -> Result<Face, MorseError> {
        let refs: Vec<&str> = ls.iter().map(String::as_str).collect();
        Ok(cx.mask_of(&refs)?)
    };
    let gens: Vec<Face> =
        wheel_r_generators(n, variant).iter().map(|g| mask(g)).collect::<Result<_, _>>()?;
    let listed: BTreeSet<Face> = gens.iter().copied().collect();
    let in_r = |f: Face| -> bool {
        if n == 4 && variant == WheelRVariant::Literal {
            listed.contains(&f)
        } else {
            gens.iter().any(|&gm| f & gm == gm)
        }
    };
    let lo = [mask(&["c1".into(), "l0".into()])?, mask(&[format!("c{}", n - 2), format!("l{}", n - 2)])?];
    let stratum = |f: Face| -> usize {
        if in_r(f) {
            2
        } else if lo.iter().any(|&p| f & p == p) {
            1
        } else {
            0
        }
    };
    let c0 = cx.label_index("c0").expect("wheel edge");
    let c2 = cx.label_index("c2").expect("wheel edge");
    let r_toggles = wheel_r_toggles(n);
    let r_ids: Vec<usize> =
        r_toggles.iter().map(|l| cx.label_index(l).expect("wheel edge")).collect();
    let matching = patchwork(&cx, stratum, &[vec![c0], vec![c2], r_ids])?;
    let mut sizes = [0usize; 3];
    let mut lower_strata_perfect = true;
    for (i, &f) in cx.faces().iter().enumerate() {
        let s = stratum(f);
        sizes[s] += 1;
        if s < 2 && !matching.is_matched_id(i) {
            lower_strata_perfect = false;
        }
    }
    let vector = morse_vector(&cx, &matching)?;
    let critical = matching.critical(&cx).into_iter().map(|f| cx.face_labels(f)).collect();
    Ok(WheelM2Run {
        n,
        variant,
        complex: cx,
        matching,
        vector,
        strata_sizes: sizes,
        lower_strata_perfect,
        critical,
        r_toggles,
    })
}

/// Try the literal top stratum first and fall back to the closed variant when
/// the literal one is not order compatible.
pub fn wheel_m2_matching(n: usize) -> Result<WheelM2Run, MorseError> {
    match wheel_m2_pipeline(n, WheelRVariant::Literal) {
        Err(MorseError::StrataOrder(..)) => wheel_m2_pipeline(n, WheelRVariant::Closed),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::*;
    use crate::graph::families::*;
    use crate::homology::betti;

    fn tri() -> SimplicialComplex {
        matching_complex(&star(3), 2).unwrap()
    }

    #[test]
    fn triangle_toggle() {
        let cx = tri();
        let x = cx.labels()[0].clone();
        let m = toggle_labels(&cx, &[&x]).unwrap();
        assert!(verify_acyclic(&cx, &m).unwrap().is_acyclic());
        let v = morse_vector(&cx, &m).unwrap();
        assert_eq!(v.counts, BTreeMap::from([(1, 1)]));
        assert!(v.empty_matched);
        let crit = m.critical(&cx);
        assert_eq!(crit.len(), 1);
        assert_eq!(crit[0].count_ones(), 2);
        assert_eq!(crit[0] & 1, 0);
        // without the empty face the unpaired vertex shows up as a 0-cell
        let mut m2 = MorseMatching::new(&cx, false);
        toggle_within(&cx, &mut m2, 0, |_| true);
        let v2 = morse_vector(&cx, &m2).unwrap();
        assert_eq!(v2.counts, BTreeMap::from([(0, 1), (1, 1)]));
        assert!(euler_consistent(&cx, &m2, &v2));
    }

    #[test]
    fn simplex_collapses() {
        let cx = simplex(vec!["a".into(), "b".into()]).unwrap();
        let m = toggle_labels(&cx, &["a"]).unwrap();
        assert!(m.critical(&cx).is_empty());
    }

    #[test]
    fn paw_toggle_leaves_upper_ideal() {
        let g = paw();
        let cx = matching_complex(&g, 2).unwrap();
        let m = toggle_labels(&cx, &["x"]).unwrap();
        let yz = cx.mask_of(&["y", "z"]).unwrap();
        let crit: BTreeSet<Face> = m.critical(&cx).into_iter().collect();
        let ideal: BTreeSet<Face> = cx.faces().iter().copied().filter(|f| f & yz == yz).collect();
        assert_eq!(crit, ideal);
    }

    #[test]
    fn double_match_rejected() {
        let cx = tri();
        let a = 1u64;
        let ab = 0b011;
        let b = 0b010;
        assert!(matches!(
            MorseMatching::from_pairs(&cx, &[(a, ab), (b, ab)], true),
            Err(MorseError::DoublyMatched(_))
        ));
        assert!(matches!(
            MorseMatching::from_pairs(&cx, &[(0, ab)], true),
            Err(MorseError::NotACover(..))
        ));
    }

    #[test]
    fn square_cycle_witness() {
        // boundary of a square: vertices a,b,c,d; edges ab,bc,cd,da
        let labels: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
        let sq = SimplicialComplex::from_facets(labels, &[0b0011, 0b0110, 0b1100, 0b1001]).unwrap();
        let (a, b, c, d) = (1u64, 2u64, 4u64, 8u64);
        // a -> ab, b -> bc, c -> cd, d -> da is a closed gradient path
        let m = MorseMatching::from_pairs(&sq, &[(a, a | b), (b, b | c), (c, c | d), (d, d | a)], true)
            .unwrap();
        match verify_acyclic(&sq, &m).unwrap() {
            Certificate::Cycle { witness } => {
                assert_eq!(witness.len(), 4);
                for k in 0..witness.len() {
                    let (_, up) = witness[k];
                    let (next, _) = witness[(k + 1) % witness.len()];
                    assert_eq!(next & !up, 0);
                }
            }
            c => panic!("expected a cycle, got {c:?}"),
        }
        assert_eq!(morse_vector(&sq, &m), Err(MorseError::NotAcyclic));
    }

    #[test]
    fn cp1_claw_sequence() {
        let g = clawed_path(1);
        let cx = matching_complex(&g, 2).unwrap();
        let choice: Vec<(String, String)> =
            find_claw_units(&g).into_iter().map(|u| (u.center, u.edges[0].clone())).collect();
        let cm = claw_induced_matching(&g, &cx, &choice).unwrap();
        assert!(cm.complete);
        let v = morse_vector(&cx, &cm.matching).unwrap();
        assert_eq!(v.counts, BTreeMap::from([(3, 1)]));
    }

    #[test]
    fn bad_claw_choice() {
        let g = clawed_path(0);
        let cx = matching_complex(&g, 2).unwrap();
        let err = claw_induced_matching(&g, &cx, &[("0".into(), "nope".into())]);
        assert!(matches!(err, Err(MorseError::NotAUnitEdge { .. })));
    }

    #[test]
    fn whiskered_even_cycle() {
        let g = whiskered_cycle(6).unwrap();
        let cx = matching_complex(&g, 2).unwrap();
        let m = toggle_labels(&cx, &["x1,2", "x3,4", "x5,6"]).unwrap();
        let crit = m.critical(&cx);
        assert_eq!(crit, vec![cx.mask_of(&["1", "2", "3", "4", "5", "6"]).unwrap()]);
        assert!(verify_acyclic(&cx, &m).unwrap().is_acyclic());
    }

    #[test]
    fn single_stratum_patchwork_is_plain_toggling() {
        let cx = matching_complex(&wheel(5).unwrap(), 2).unwrap();
        let a = patchwork(&cx, |_| 0, &[vec![0, 3]]).unwrap();
        assert_eq!(a, toggle_sequence(&cx, &[0, 3]));
    }

    #[test]
    fn strata_order_rejected() {
        let cx = tri();
        let r = patchwork(&cx, |f| if f == 0 { 1 } else { 0 }, &[vec![], vec![]]);
        assert!(matches!(r, Err(MorseError::StrataOrder(..))));
    }

    #[test]
    fn wheel_pipeline_vectors() {
        let expect = [(4, vec![(2, 3)]), (5, vec![(3, 2)]), (6, vec![]), (7, vec![]), (8, vec![])];
        assert!(matches!(
            wheel_m2_pipeline(4, WheelRVariant::Literal),
            Err(MorseError::StrataOrder(..))
        ));
        for (n, want) in expect {
            let run = wheel_m2_matching(n).unwrap();
            let closed = wheel_m2_pipeline(n, WheelRVariant::Closed).unwrap();
            assert_eq!(closed.vector, run.vector);
            // the four-spoke middle stratum has odd size and cannot be perfect
            assert_eq!(run.lower_strata_perfect, n >= 5, "n={n}");
            assert_eq!(run.vector.counts, want.into_iter().collect::<BTreeMap<_, _>>(), "n={n}");
            let p = betti(&run.complex).unwrap();
            assert!(run.vector.dominates(&p));
        }
    }

    #[test]
    fn union_of_disjoint_matchings() {
        let cx = tri();
        let a = MorseMatching::from_pairs(&cx, &[(0, 1)], true).unwrap();
        let b = MorseMatching::from_pairs(&cx, &[(2, 6)], true).unwrap();
        let u = a.union(&cx, &b).unwrap();
        assert_eq!(u.pair_count(), 2);
        assert!(u.critical(&cx).len() == 3);
    }

    #[test]
    fn matching_json_lists_pairs_and_critical() {
        let cx = tri();
        let m = toggle(&cx, 0);
        let j = m.to_json(&cx);
        assert_eq!(j.pairs.len(), 3);
        assert_eq!(j.critical.len(), 1);
    }
}
