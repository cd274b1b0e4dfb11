//! Reduced integral simplicial homology.
//!
//! Chain groups are augmented (the empty face sits in dimension -1) and faces
//! are oriented by sorted vertex order, so the boundary sign of dropping the
//! vertex in position `p` is `(-1)^p`. Invariant factors come from exact Smith
//! normal form: unit pivots are eliminated sparsely, the remainder is reduced
//! densely over arbitrary-precision integers with full pivoting.
//!
//! Large complexes are first shrunk with an acyclic matching (iterated element
//! toggling); the Morse complex has the same integral homology and its
//! boundary is computed exactly by following gradient paths.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::complex::{ComplexError, Face, SimplicialComplex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("integer overflow during sparse elimination")]
    Overflow,
    #[error("boundary of boundary is nonzero in dimension {0}")]
    BoundarySquare(i32),
    #[error("matching has a closed gradient path")]
    CyclicMatching,
    #[error("torsion present in {0}; the check assumes torsion-free inputs")]
    Torsion(String),
    #[error("torsion coefficient too large to report: {0}")]
    HugeTorsion(String),
}

/// Sparse integer matrix stored by columns: `cols[j]` lists `(row, value)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: Vec<Vec<(u32, i64)>>,
}

impl SparseMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols: vec![Vec::new(); cols] }
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut d = vec![vec![BigInt::zero(); self.cols.len()]; self.rows];
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                d[i as usize][j] += v;
            }
        }
        d
    }

    /// `self * other`, exact.
    pub fn mul(&self, other: &SparseMatrix) -> Result<SparseMatrix, HomologyError> {
        let mut out = SparseMatrix::zero(self.rows, other.ncols());
        for (j, col) in other.cols.iter().enumerate() {
            let mut acc: BTreeMap<u32, i64> = BTreeMap::new();
            for &(k, b) in col {
                for &(i, a) in &self.cols[k as usize] {
                    let e = acc.entry(i).or_insert(0);
                    *e = a
                        .checked_mul(b)
                        .and_then(|p| e.checked_add(p))
                        .ok_or(HomologyError::Overflow)?;
                }
            }
            out.cols[j] = acc.into_iter().filter(|&(_, v)| v != 0).collect();
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.iter().all(|&(_, v)| v == 0))
    }
}

/// Sign of the codimension-one face `f \ {bit i}` in the boundary of `f`.
pub fn boundary_sign(f: Face, i: usize) -> i64 {
    let below = (f & ((1u64 << i) - 1)).count_ones();
    if below % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Augmented chain complex with explicit cells per dimension.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    /// `cells[d + 1]` lists the cells of dimension `d`, from `d = -1`.
    pub cells: Vec<Vec<Face>>,
    /// `boundary[d + 1]` maps dimension `d` to `d - 1`; `boundary[0]` is empty.
    pub boundary: Vec<SparseMatrix>,
}

impl ChainComplex {
    /// The augmented simplicial chain complex of `cx`.
    pub fn augmented(cx: &SimplicialComplex) -> Self {
        let top = (cx.dim() + 2) as usize;
        let mut cells: Vec<Vec<Face>> = vec![Vec::new(); top];
        for &f in cx.faces() {
            cells[f.count_ones() as usize].push(f);
        }
        let pos: Vec<HashMap<Face, u32>> = cells
            .iter()
            .map(|c| c.iter().enumerate().map(|(i, &f)| (f, i as u32)).collect())
            .collect();
        let mut boundary = vec![SparseMatrix::zero(0, cells[0].len())];
        for k in 1..top {
            let mut m = SparseMatrix::zero(cells[k - 1].len(), cells[k].len());
            for (j, &f) in cells[k].iter().enumerate() {
                let mut rest = f;
                while rest != 0 {
                    let i = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    let g = f & !(1u64 << i);
                    m.cols[j].push((pos[k - 1][&g], boundary_sign(f, i)));
                }
                m.cols[j].sort_unstable();
            }
            boundary.push(m);
        }
        ChainComplex { cells, boundary }
    }

    /// Morse complex of `cx` under the iterated element matching on vertices
    /// `0, 1, ...`. Homology is unchanged; cell counts usually drop sharply.
    pub fn morse_reduced(cx: &SimplicialComplex) -> Result<Self, HomologyError> {
        let n = cx.vertex_count();
        let faces = cx.faces();
        const NONE: u32 = u32::MAX;
        let mut partner = vec![NONE; faces.len()];
        for v in 0..n {
            let bit = 1u64 << v;
            for (i, &f) in faces.iter().enumerate() {
                if partner[i] != NONE || f & bit != 0 {
                    continue;
                }
                if let Some(j) = cx.face_id(f | bit) {
                    if partner[j] == NONE {
                        partner[i] = j as u32;
                        partner[j] = i as u32;
                    }
                }
            }
        }
        Self::from_matching(cx, &partner)
    }

    /// Morse complex for an arbitrary acyclic matching given as a partner table
    /// over face ids (`u32::MAX` marks critical faces).
    pub fn from_matching(cx: &SimplicialComplex, partner: &[u32]) -> Result<Self, HomologyError> {
        const NONE: u32 = u32::MAX;
        let faces = cx.faces();
        let top = (cx.dim() + 2) as usize;
        let size = |i: usize| faces[i].count_ones() as usize;
        // lower-matched: matched with a larger face
        let lower = |i: usize| partner[i] != NONE && size(partner[i] as usize) > size(i);

        let mut cells: Vec<Vec<Face>> = vec![Vec::new(); top];
        let mut crit_pos: HashMap<usize, u32> = HashMap::new();
        for (i, &f) in faces.iter().enumerate() {
            if partner[i] == NONE {
                let k = size(i);
                crit_pos.insert(i, cells[k].len() as u32);
                cells[k].push(f);
            }
        }

        // Topological rank of lower-matched faces: f precedes every other
        // lower-matched facet of u(f).
        let mut rank = vec![u32::MAX; faces.len()];
        {
            let mut indeg = vec![0u32; faces.len()];
            let succ = |i: usize, out: &mut Vec<usize>| {
                out.clear();
                let up = faces[partner[i] as usize];
                let mut rest = up;
                while rest != 0 {
                    let b = rest.trailing_zeros();
                    rest &= rest - 1;
                    let g = up & !(1u64 << b);
                    let gi = cx.face_id(g).expect("closed");
                    if gi != i && lower(gi) {
                        out.push(gi);
                    }
                }
            };
            let mut buf = Vec::new();
            for i in 0..faces.len() {
                if lower(i) {
                    succ(i, &mut buf);
                    for &g in &buf {
                        indeg[g] += 1;
                    }
                }
            }
            let mut queue: Vec<usize> = (0..faces.len()).filter(|&i| lower(i) && indeg[i] == 0).collect();
            let mut next = 0u32;
            let mut head = 0;
            while head < queue.len() {
                let i = queue[head];
                head += 1;
                rank[i] = next;
                next += 1;
                succ(i, &mut buf);
                for &g in &buf {
                    indeg[g] -= 1;
                    if indeg[g] == 0 {
                        queue.push(g);
                    }
                }
            }
            let lower_count = (0..faces.len()).filter(|&i| lower(i)).count();
            if queue.len() != lower_count {
                return Err(HomologyError::CyclicMatching);
            }
        }

        let mut boundary = vec![SparseMatrix::zero(0, cells[0].len())];
        for k in 1..top {
            let mut m = SparseMatrix::zero(cells[k - 1].len(), cells[k].len());
            for (j, &c) in cells[k].iter().enumerate() {
                let mut out: BTreeMap<u32, i64> = BTreeMap::new();
                let mut work: BTreeMap<u32, (usize, i64)> = BTreeMap::new();
                let push = |g: usize,
                                a: i64,
                                out: &mut BTreeMap<u32, i64>,
                                work: &mut BTreeMap<u32, (usize, i64)>|
                 -> Result<(), HomologyError> {
                    if partner[g] == NONE {
                        let e = out.entry(crit_pos[&g]).or_insert(0);
                        *e = e.checked_add(a).ok_or(HomologyError::Overflow)?;
                    } else if lower(g) {
                        let e = work.entry(rank[g]).or_insert((g, 0));
                        e.1 = e.1.checked_add(a).ok_or(HomologyError::Overflow)?;
                    }
                    Ok(())
                };
                let mut rest = c;
                while rest != 0 {
                    let b = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    let g = cx.face_id(c & !(1u64 << b)).expect("closed");
                    push(g, boundary_sign(c, b), &mut out, &mut work)?;
                }
                while let Some((_, (f, a))) = work.pop_first() {
                    if a == 0 {
                        continue;
                    }
                    let up = faces[partner[f] as usize];
                    let fb = (up ^ faces[f]).trailing_zeros() as usize;
                    let s = boundary_sign(up, fb);
                    let mut rest = up;
                    while rest != 0 {
                        let b = rest.trailing_zeros() as usize;
                        rest &= rest - 1;
                        if b == fb {
                            continue;
                        }
                        let g = cx.face_id(up & !(1u64 << b)).expect("closed");
                        let coef = a
                            .checked_mul(s * boundary_sign(up, b))
                            .ok_or(HomologyError::Overflow)?;
                        push(g, -coef, &mut out, &mut work)?;
                    }
                }
                m.cols[j] = out.into_iter().filter(|&(_, v)| v != 0).collect();
            }
            boundary.push(m);
        }
        Ok(ChainComplex { cells, boundary })
    }

    pub fn cell_counts(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }

    /// Exact check that consecutive boundaries compose to zero.
    pub fn check_dd_zero(&self) -> Result<(), HomologyError> {
        for k in 2..self.boundary.len() {
            let p = self.boundary[k - 1].mul(&self.boundary[k])?;
            if !p.is_zero() {
                return Err(HomologyError::BoundarySquare(k as i32 - 1));
            }
        }
        Ok(())
    }

    /// Reduced Betti numbers and torsion via Smith normal form.
    pub fn homology(&self) -> Result<BettiProfile, HomologyError> {
        let top = self.cells.len();
        let mut ranks = vec![0usize; top + 1];
        let mut factors: Vec<Vec<BigInt>> = vec![Vec::new(); top + 1];
        for k in 1..top {
            let inv = invariant_factors(&self.boundary[k])?;
            ranks[k] = inv.len();
            factors[k] = inv;
        }
        let mut profile = BettiProfile::default();
        for k in 0..top {
            let d = k as i32 - 1;
            let b = self.cells[k].len() - ranks[k] - ranks[k + 1];
            if b > 0 {
                profile.betti.insert(d, b as u64);
            }
            let tors: Vec<u64> = factors[k + 1]
                .iter()
                .filter(|x| !x.is_one())
                .map(|x| x.to_u64().ok_or_else(|| HomologyError::HugeTorsion(x.to_string())))
                .collect::<Result<_, _>>()?;
            if !tors.is_empty() {
                profile.torsion.insert(d, tors);
            }
        }
        Ok(profile)
    }

    /// Betti numbers over the rationals (fraction-free elimination).
    pub fn rational_betti(&self) -> BTreeMap<i32, u64> {
        let top = self.cells.len();
        let mut ranks = vec![0usize; top + 1];
        for k in 1..top {
            ranks[k] = rational_rank(&self.boundary[k]);
        }
        let mut out = BTreeMap::new();
        for k in 0..top {
            let b = self.cells[k].len() - ranks[k] - ranks[k + 1];
            if b > 0 {
                out.insert(k as i32 - 1, b as u64);
            }
        }
        out
    }
}

/// Nonzero invariant factors (all positive, each dividing the next).
pub fn invariant_factors(m: &SparseMatrix) -> Result<Vec<BigInt>, HomologyError> {
    let (units, rest) = eliminate_units(m)?;
    let mut out = vec![BigInt::one(); units];
    out.extend(dense_snf(rest));
    Ok(out)
}

/// Sparse elimination of ±1 pivots. Returns the number of unit pivots and
/// the remaining dense block.
fn eliminate_units(m: &SparseMatrix) -> Result<(usize, Vec<Vec<BigInt>>), HomologyError> {
    let mut cols: Vec<BTreeMap<u32, i64>> =
        m.cols.iter().map(|c| c.iter().copied().filter(|&(_, v)| v != 0).collect()).collect();
    let mut row_cols: Vec<std::collections::BTreeSet<u32>> = vec![Default::default(); m.rows];
    for (j, c) in cols.iter().enumerate() {
        for &r in c.keys() {
            row_cols[r as usize].insert(j as u32);
        }
    }
    let mut alive_col = vec![true; cols.len()];
    let mut alive_row = vec![true; m.rows];
    let mut units = 0;
    loop {
        // pick a unit entry minimizing (row count) * (column length)
        let mut best: Option<(usize, u32, usize)> = None;
        for (j, c) in cols.iter().enumerate() {
            if !alive_col[j] {
                continue;
            }
            for (&r, &v) in c {
                if v.abs() == 1 {
                    let cost = (row_cols[r as usize].len() - 1) * (c.len() - 1);
                    if best.map_or(true, |b| cost < b.2) {
                        best = Some((j, r, cost));
                    }
                }
            }
            if matches!(best, Some((_, _, 0))) {
                break;
            }
        }
        let Some((pj, pr, _)) = best else { break };
        let u = cols[pj][&pr];
        let pivot_col = cols[pj].clone();
        let others: Vec<u32> =
            row_cols[pr as usize].iter().copied().filter(|&c| c as usize != pj).collect();
        for cj in others {
            let cj = cj as usize;
            let a = cols[cj][&pr];
            let factor = a.checked_mul(u).ok_or(HomologyError::Overflow)?;
            for (&r, &v) in &pivot_col {
                let delta = factor.checked_mul(v).ok_or(HomologyError::Overflow)?;
                let cur = cols[cj].get(&r).copied().unwrap_or(0);
                let nv = cur.checked_sub(delta).ok_or(HomologyError::Overflow)?;
                if nv == 0 {
                    cols[cj].remove(&r);
                    row_cols[r as usize].remove(&(cj as u32));
                } else {
                    if cur == 0 {
                        row_cols[r as usize].insert(cj as u32);
                    }
                    cols[cj].insert(r, nv);
                }
            }
        }
        for &r in pivot_col.keys() {
            row_cols[r as usize].remove(&(pj as u32));
        }
        alive_col[pj] = false;
        alive_row[pr as usize] = false;
        cols[pj].clear();
        // row pr now only met column pj; drop it from every column
        units += 1;
    }
    let live_rows: Vec<usize> = (0..m.rows).filter(|&r| alive_row[r] && !row_cols[r].is_empty()).collect();
    let live_cols: Vec<usize> = (0..cols.len()).filter(|&j| alive_col[j] && !cols[j].is_empty()).collect();
    let rpos: HashMap<usize, usize> = live_rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let mut dense = vec![vec![BigInt::zero(); live_cols.len()]; live_rows.len()];
    for (jj, &j) in live_cols.iter().enumerate() {
        for (&r, &v) in &cols[j] {
            if let Some(&ii) = rpos.get(&(r as usize)) {
                dense[ii][jj] = BigInt::from(v);
            }
        }
    }
    Ok((units, dense))
}

/// Smith normal form diagonal of a dense integer matrix (nonzero entries only).
pub fn dense_snf(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // full pivoting: smallest nonzero magnitude in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero()
                    && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                for j in t..cols {
                    let sub = &q * &a[t][j];
                    a[i][j] -= sub;
                }
                if !a[i][t].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for i in t..rows {
                    let sub = &q * &a[i][t];
                    a[i][j] -= sub;
                }
                if !a[t][j].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // move the smallest remainder in row/column t to the pivot
                let mut best = (t, t);
                for i in t..rows {
                    if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t..cols {
                    if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                a.swap(t, best.0);
                for row in a.iter_mut() {
                    row.swap(t, best.1);
                }
                continue;
            }
            // divisibility: pivot must divide the whole trailing block
            let mut bad = None;
            'scan: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(&a[i][j] % &a[t][t]).is_zero() {
                        bad = Some(i);
                        break 'scan;
                    }
                }
            }
            match bad {
                Some(i) => {
                    for j in t..cols {
                        let v = a[i][j].clone();
                        a[t][j] += v;
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    diag
}

/// Rank over the rationals via Bareiss elimination.
pub fn rational_rank(m: &SparseMatrix) -> usize {
    let mut a = m.to_dense();
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut rank = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(rank, p);
        for r in rank + 1..rows {
            for j in c + 1..cols {
                let v = (&a[rank][c] * &a[r][j] - &a[r][c] * &a[rank][j]) / &prev;
                a[r][j] = v;
            }
            a[r][c] = BigInt::zero();
        }
        prev = a[rank][c].clone();
        rank += 1;
    }
    rank
}

/// Reduced homology summary. Missing keys mean zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiProfile {
    pub betti: BTreeMap<i32, u64>,
    pub torsion: BTreeMap<i32, Vec<u64>>,
}

impl BettiProfile {
    pub fn get(&self, d: i32) -> u64 {
        self.betti.get(&d).copied().unwrap_or(0)
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion.is_empty()
    }

    /// All reduced Betti numbers and torsion vanish.
    pub fn is_acyclic(&self) -> bool {
        self.betti.is_empty() && self.torsion.is_empty()
    }

    /// The void complex {∅} has a single class in dimension -1.
    pub fn is_void(&self) -> bool {
        self.get(-1) == 1 && self.betti.len() == 1
    }

    pub fn euler(&self) -> i64 {
        self.betti
            .iter()
            .map(|(&d, &b)| if d.rem_euclid(2) == 0 { b as i64 } else { -(b as i64) })
            .sum()
    }

    pub fn total(&self) -> u64 {
        self.betti.values().sum()
    }

    /// Lowest dimension with nonzero reduced homology.
    pub fn lowest_nonzero(&self) -> Option<i32> {
        let b = self.betti.keys().next().copied();
        let t = self.torsion.keys().next().copied();
        match (b, t) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        }
    }

    pub fn from_betti(pairs: &[(i32, u64)]) -> Self {
        BettiProfile {
            betti: pairs.iter().copied().filter(|&(_, b)| b > 0).collect(),
            torsion: BTreeMap::new(),
        }
    }

    pub fn to_json(&self) -> Value {
        let betti: serde_json::Map<String, Value> =
            self.betti.iter().map(|(d, b)| (d.to_string(), json!(b))).collect();
        let torsion: serde_json::Map<String, Value> =
            self.torsion.iter().map(|(d, t)| (d.to_string(), json!(t))).collect();
        json!({ "betti": betti, "torsion": torsion })
    }

    /// Homology of the join, assuming torsion-free factors.
    pub fn join(&self, other: &BettiProfile) -> BettiProfile {
        let mut out: BTreeMap<i32, u64> = BTreeMap::new();
        for (&i, &a) in &self.betti {
            for (&j, &b) in &other.betti {
                *out.entry(i + j + 1).or_insert(0) += a * b;
            }
        }
        out.retain(|_, v| *v > 0);
        BettiProfile { betti: out, torsion: BTreeMap::new() }
    }

    /// Homology of the join with `m` discrete points.
    pub fn m_suspension(&self, m: u64) -> BettiProfile {
        self.join(&BettiProfile::from_betti(&[(0, m.saturating_sub(1))]))
    }

    /// Degreewise sum (homology of a wedge).
    pub fn wedge(&self, other: &BettiProfile) -> BettiProfile {
        let mut out = self.betti.clone();
        for (&d, &b) in &other.betti {
            *out.entry(d).or_insert(0) += b;
        }
        BettiProfile { betti: out, torsion: BTreeMap::new() }
    }
}

/// Reduced homology of a complex (Morse-reduced, then Smith normal form).
pub fn betti(cx: &SimplicialComplex) -> Result<BettiProfile, HomologyError> {
    ChainComplex::morse_reduced(cx)?.homology()
}

/// Reduced homology from the unreduced augmented chain complex.
pub fn betti_direct(cx: &SimplicialComplex) -> Result<BettiProfile, HomologyError> {
    ChainComplex::augmented(cx).homology()
}

/// Homology together with the internal consistency checks: ∂∂ = 0 on the
/// reduced complex, rational ranks agree when torsion-free, and the Euler
/// characteristic matches the face count.
#[derive(Clone, Debug)]
pub struct CheckedHomology {
    pub profile: BettiProfile,
    pub reduced_cells: Vec<usize>,
    pub rational_agrees: bool,
    pub euler_agrees: bool,
}

pub fn betti_checked(cx: &SimplicialComplex) -> Result<CheckedHomology, HomologyError> {
    let cc = ChainComplex::morse_reduced(cx)?;
    cc.check_dd_zero()?;
    let profile = cc.homology()?;
    let rational = cc.rational_betti();
    let rational_agrees = !profile.is_torsion_free() || rational == profile.betti;
    let euler_agrees = profile.euler() == cx.reduced_euler();
    Ok(CheckedHomology { profile, reduced_cells: cc.cell_counts(), rational_agrees, euler_agrees })
}

/// Multiset of sphere dimensions; empty means a point.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereWedge {
    pub dims: Vec<i32>,
}

impl SphereWedge {
    pub fn new(mut dims: Vec<i32>) -> Self {
        dims.sort_unstable();
        SphereWedge { dims }
    }

    pub fn point() -> Self {
        SphereWedge { dims: Vec::new() }
    }

    pub fn sphere(d: i32) -> Self {
        SphereWedge { dims: vec![d] }
    }

    pub fn repeated(count: u64, d: i32) -> Self {
        SphereWedge { dims: vec![d; count as usize] }
    }

    pub fn profile(&self) -> BettiProfile {
        let mut b: BTreeMap<i32, u64> = BTreeMap::new();
        for &d in &self.dims {
            *b.entry(d).or_insert(0) += 1;
        }
        BettiProfile { betti: b, torsion: BTreeMap::new() }
    }

    pub fn describe(&self) -> String {
        if self.dims.is_empty() {
            return "pt".into();
        }
        let mut parts = Vec::new();
        for (d, c) in self.profile().betti {
            if c == 1 {
                parts.push(format!("S^{d}"));
            } else {
                parts.push(format!("{c}*S^{d}"));
            }
        }
        parts.join(" v ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatchReport {
    pub matches: bool,
    pub mismatches: Vec<String>,
}

pub fn profile_matches(profile: &BettiProfile, claim: &SphereWedge) -> MatchReport {
    let want = claim.profile();
    let mut mismatches = Vec::new();
    for (d, t) in &profile.torsion {
        mismatches.push(format!("torsion {t:?} in dimension {d}"));
    }
    let dims: std::collections::BTreeSet<i32> =
        profile.betti.keys().chain(want.betti.keys()).copied().collect();
    for d in dims {
        let (got, exp) = (profile.get(d), want.get(d));
        if got != exp {
            mismatches.push(format!("dimension {d}: computed {got}, claimed {exp}"));
        }
    }
    MatchReport { matches: mismatches.is_empty(), mismatches }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinCheck {
    pub predicted: BettiProfile,
    pub computed: BettiProfile,
    pub holds: bool,
}

/// Compare the homology of `a * b` with the shifted convolution of the factors.
pub fn join_shift_check(
    a: &SimplicialComplex,
    b: &SimplicialComplex,
) -> Result<JoinCheck, HomologyError> {
    let pa = betti(a)?;
    let pb = betti(b)?;
    for (name, p) in [("first factor", &pa), ("second factor", &pb)] {
        if !p.is_torsion_free() {
            return Err(HomologyError::Torsion(name.into()));
        }
    }
    let computed = betti(&crate::complex::join(a, b)?)?;
    let predicted = pa.join(&pb);
    let holds = computed == predicted;
    Ok(JoinCheck { predicted, computed, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::*;
    use crate::graph::families::*;

    #[test]
    fn five_edge_tree_is_s2() {
        let cx = matching_complex(&five_edge_tree(), 2).unwrap();
        let p = betti(&cx).unwrap();
        assert_eq!(p, BettiProfile::from_betti(&[(2, 1)]));
        assert_eq!(betti_direct(&cx).unwrap(), p);
    }

    #[test]
    fn triangle_boundary() {
        let cx = matching_complex(&star(3), 2).unwrap();
        assert_eq!(betti(&cx).unwrap(), BettiProfile::from_betti(&[(1, 1)]));
    }

    #[test]
    fn void_and_point() {
        let v = matching_complex(&edgeless(3), 2).unwrap();
        assert!(betti(&v).unwrap().is_void());
        let p = simplex(vec!["a".into()]).unwrap();
        assert!(betti(&p).unwrap().is_acyclic());
    }

    #[test]
    fn snf_known_matrix() {
        let m = vec![
            vec![BigInt::from(2), BigInt::from(4), BigInt::from(4)],
            vec![BigInt::from(-6), BigInt::from(6), BigInt::from(12)],
            vec![BigInt::from(10), BigInt::from(-4), BigInt::from(-16)],
        ];
        let d = dense_snf(m);
        assert_eq!(d, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
    }

    #[test]
    fn projective_plane_torsion() {
        // six-vertex triangulation of RP^2
        let tri = [
            [0, 1, 3], [0, 1, 4], [0, 2, 3], [0, 2, 5], [0, 4, 5],
            [1, 2, 4], [1, 2, 5], [1, 3, 5], [2, 3, 4], [3, 4, 5],
        ];
        let facets: Vec<u64> = tri.iter().map(|t| t.iter().fold(0, |m, &i| m | 1 << i)).collect();
        let labels = (0..6).map(|i| i.to_string()).collect();
        let cx = SimplicialComplex::from_facets(labels, &facets).unwrap();
        let p = betti(&cx).unwrap();
        assert!(p.betti.is_empty());
        assert_eq!(p.torsion.get(&1), Some(&vec![2]));
        assert_eq!(betti_direct(&cx).unwrap(), p);
    }

    #[test]
    fn dd_zero_and_checked() {
        let cx = matching_complex(&wheel(6).unwrap(), 2).unwrap();
        ChainComplex::augmented(&cx).check_dd_zero().unwrap();
        let c = betti_checked(&cx).unwrap();
        assert!(c.rational_agrees && c.euler_agrees);
    }

    #[test]
    fn profile_matching() {
        let p = BettiProfile::from_betti(&[(3, 2)]);
        assert!(profile_matches(&p, &SphereWedge::new(vec![3, 3])).matches);
        assert!(profile_matches(&BettiProfile::default(), &SphereWedge::point()).matches);
        let r = profile_matches(&BettiProfile::from_betti(&[(1, 1)]), &SphereWedge::sphere(2));
        assert!(!r.matches);
        assert_eq!(r.mismatches.len(), 2);
    }

    #[test]
    fn join_shift() {
        let a = matching_complex(&star(3).with_prefix("a"), 2).unwrap();
        let b = matching_complex(&star(3).with_prefix("b"), 2).unwrap();
        let j = join_shift_check(&a, &b).unwrap();
        assert!(j.holds);
        assert_eq!(j.computed, BettiProfile::from_betti(&[(3, 1)]));
        let s0 = discrete_points(2, "p");
        let s = m_point_suspension(&s0, 3, "q").unwrap();
        assert_eq!(betti(&s).unwrap(), BettiProfile::from_betti(&[(1, 2)]));
        let pt = discrete_points(1, "p");
        let sp = m_point_suspension(&pt, 2, "q").unwrap();
        assert!(betti(&sp).unwrap().is_acyclic());
    }

    #[test]
    fn square_is_circle() {
        let a = discrete_points(2, "a");
        let b = discrete_points(2, "b");
        let j = join(&a, &b).unwrap();
        assert_eq!(betti_direct(&j).unwrap(), BettiProfile::from_betti(&[(1, 1)]));
    }
}
