//! Bipartite (Tanner) graph representations of a polar code and the
//! pruning that turns the unrolled factor graph into something a
//! conventional LDPC decoder can run on.
//!
//! The unrolled encoder graph has `log2(N)` stages of butterflies. Each
//! butterfly contributes one degree-3 check (upper output = XOR of its two
//! inputs) while its lower output is the same variable as the lower input,
//! realized by node identification rather than an equality check. Variable
//! nodes at the channel side are `channel` kind; every other surviving
//! node is a `punctured` variable: it participates in checks but has no
//! channel observation.
//!
//! Pruning applies four rules to fixpoint, in a fixed deterministic order,
//! so the same code always yields the same graph:
//!
//! * R1 — a degree-1 check pins its variable to zero.
//! * R2 — a degree-2 check identifies its two variables (neighborhoods
//!   combine by symmetric difference so that GF(2) cancellation is
//!   honored). Two channel variables are never identified; such a check
//!   is a genuine repetition constraint and stays.
//! * R3 — a punctured variable of degree ≤ 1 is unconstrained and leaves,
//!   taking its check along when it has one; a punctured variable of
//!   degree 2 is eliminated by adding its two checks.
//! * R4 — degree-0 checks and degree-0 punctured variables are dropped.
//!
//! Channel variables are never deleted; one that is forced to zero is kept
//! and flagged so the codeword position survives.

//! The unreduced size baseline for the reduction claims is
//! [`unrolled_factor_graph`]: the same graph before node identification,
//! with the equality constraints materialized as degree-2 checks.

mod alist;
mod stats;

pub use alist::{export_alist, export_punctured, import_alist, parse_punctured};
pub use stats::GraphStats;
pub use stats::{girth, girth_and_cycles};

use crate::gf2::BitMatrix;
use crate::polar::{kron_generator, PolarCode};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TannerError {
    #[error("cycle census supports max_len in {{4, 6, 8}}, got {0}")]
    InvalidMaxCycleLen(usize),
    #[error("alist, line {line}: {msg}")]
    AlistParse { line: usize, msg: String },
    #[error("cannot export an empty graph")]
    EmptyGraph,
    #[error("punctured sidecar, line {line}: {msg}")]
    PuncturedParse { line: usize, msg: String },
}

/// Dense parity-check matrix of a polar code: one row per frozen index,
/// equal to that column of the generator matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseParityCheck {
    matrix: BitMatrix,
}

impl DenseParityCheck {
    pub fn num_checks(&self) -> usize {
        self.matrix.rows()
    }

    pub fn block_len(&self) -> usize {
        self.matrix.cols()
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    pub fn row_support(&self, r: usize) -> Vec<usize> {
        self.matrix.row_support(r)
    }

    /// True iff `H · xᵀ = 0`.
    pub fn is_codeword(&self, x: &[u8]) -> bool {
        self.matrix.mul_vec(x).iter().all(|&b| b == 0)
    }
}

/// Rows are the frozen-indexed columns of `G_N`, ordered by ascending
/// frozen index.
pub fn dense_parity_check(code: &PolarCode) -> DenseParityCheck {
    let n = code.block_len();
    let g = kron_generator(code.stages());
    let mut matrix = BitMatrix::zero(code.frozen_set().len(), n);
    for (r, &f) in code.frozen_set().iter().enumerate() {
        for i in 0..n {
            if g.matrix().get(i, f) {
                matrix.set(r, i, true);
            }
        }
    }
    DenseParityCheck { matrix }
}

/// Node counts of a graph before frozen-variable deletion; kept as
/// provenance on graphs built from a code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PreFreezeCounts {
    pub vns: usize,
    pub cns: usize,
    pub edges: usize,
}

/// Provenance of a graph built from a code: which surviving variable node
/// (if any) owns each coordinate of the unrolled factor graph.
#[derive(Debug, Clone)]
pub struct FactorOrigin {
    pub stages: usize,
    pub block_len: usize,
    /// Indexed by `stage * block_len + position`.
    pub coord_owner: Vec<Option<usize>>,
}

/// A bipartite graph of variable nodes and check nodes.
///
/// Variable ids and check ids are dense (0-based). Channel variables come
/// first, ordered by codeword position, followed by punctured variables.
#[derive(Debug, Clone)]
pub struct TannerGraph {
    vn_cns: Vec<Vec<usize>>,
    cn_vns: Vec<Vec<usize>>,
    punctured: Vec<bool>,
    forced_zero: Vec<bool>,
    /// Codeword position -> variable id.
    channel_order: Vec<usize>,
    pub origin: Option<FactorOrigin>,
    pub pre_freeze: Option<PreFreezeCounts>,
}

impl PartialEq for TannerGraph {
    fn eq(&self, other: &Self) -> bool {
        self.vn_cns == other.vn_cns
            && self.cn_vns == other.cn_vns
            && self.punctured == other.punctured
            && self.forced_zero == other.forced_zero
            && self.channel_order == other.channel_order
    }
}

impl TannerGraph {
    pub fn num_vns(&self) -> usize {
        self.vn_cns.len()
    }

    pub fn num_cns(&self) -> usize {
        self.cn_vns.len()
    }

    pub fn num_edges(&self) -> usize {
        self.cn_vns.iter().map(Vec::len).sum()
    }

    pub fn num_punctured(&self) -> usize {
        self.punctured.iter().filter(|&&p| p).count()
    }

    pub fn vn_checks(&self, v: usize) -> &[usize] {
        &self.vn_cns[v]
    }

    pub fn cn_vars(&self, c: usize) -> &[usize] {
        &self.cn_vns[c]
    }

    pub fn is_punctured(&self, v: usize) -> bool {
        self.punctured[v]
    }

    pub fn is_forced_zero(&self, v: usize) -> bool {
        self.forced_zero[v]
    }

    /// Codeword position -> variable id map (length = number of channel
    /// variables).
    pub fn channel_order(&self) -> &[usize] {
        &self.channel_order
    }

    pub fn vn_degree(&self, v: usize) -> usize {
        self.vn_cns[v].len()
    }

    pub fn cn_degree(&self, c: usize) -> usize {
        self.cn_vns[c].len()
    }

    /// All checks satisfied (even parity) and forced-zero variables zero.
    pub fn check_assignment(&self, vals: &[u8]) -> bool {
        assert_eq!(vals.len(), self.num_vns());
        if self.forced_zero.iter().zip(vals).any(|(&f, &v)| f && v & 1 == 1) {
            return false;
        }
        self.cn_vns
            .iter()
            .all(|vs| vs.iter().fold(0u8, |acc, &v| acc ^ (vals[v] & 1)) == 0)
    }

    /// Parity-check system the assignments must satisfy: one row per
    /// check plus a unit row per forced-zero variable.
    pub fn solution_space_matrix(&self) -> BitMatrix {
        let extra = self.forced_zero.iter().filter(|&&f| f).count();
        let mut m = BitMatrix::zero(self.num_cns() + extra, self.num_vns());
        for (c, vs) in self.cn_vns.iter().enumerate() {
            for &v in vs {
                m.set(c, v, true);
            }
        }
        let mut r = self.num_cns();
        for (v, &f) in self.forced_zero.iter().enumerate() {
            if f {
                m.set(r, v, true);
                r += 1;
            }
        }
        m
    }

    /// Map the stage values of the unrolled factor graph onto surviving
    /// variable nodes. Returns `None` for imported graphs without origin
    /// data, and panics if the values disagree within a merged node (that
    /// would mean `stage_values` was not produced by the owning code).
    pub fn assignment_from_stage_values(&self, stage_values: &[Vec<u8>]) -> Option<Vec<u8>> {
        let origin = self.origin.as_ref()?;
        let n = origin.block_len;
        let mut vals = vec![None; self.num_vns()];
        for (coord, owner) in origin.coord_owner.iter().enumerate() {
            let Some(v) = *owner else { continue };
            let (s, i) = (coord / n, coord % n);
            let bit = stage_values[s][i] & 1;
            match vals[v] {
                None => vals[v] = Some(bit),
                Some(prev) => assert_eq!(prev, bit, "inconsistent merge for vn {v}"),
            }
        }
        Some(vals.into_iter().map(|v| v.expect("every vn owns a coordinate")).collect())
    }

    fn from_mut(g: MutGraph, origin_meta: Option<(usize, usize)>, pre: Option<PreFreezeCounts>) -> TannerGraph {
        // channel variables first (by position), then punctured by old id
        let mut vn_map = vec![usize::MAX; g.vn_cns.len()];
        let mut next = 0;
        let mut channel_order = Vec::new();
        let mut order: Vec<usize> = Vec::new();
        let mut by_pos: Vec<(usize, usize)> = g
            .channel_pos
            .iter()
            .enumerate()
            .filter_map(|(v, &p)| p.map(|p| (p, v)))
            .collect();
        by_pos.sort_unstable();
        for &(_, v) in &by_pos {
            debug_assert!(g.vn_alive[v], "channel vns are never deleted");
            vn_map[v] = next;
            channel_order.push(next);
            order.push(v);
            next += 1;
        }
        for v in 0..g.vn_cns.len() {
            if g.vn_alive[v] && g.channel_pos[v].is_none() {
                vn_map[v] = next;
                order.push(v);
                next += 1;
            }
        }
        let mut cn_map = vec![usize::MAX; g.cn_vns.len()];
        let mut cn_next = 0;
        for c in 0..g.cn_vns.len() {
            if g.cn_alive[c] {
                cn_map[c] = cn_next;
                cn_next += 1;
            }
        }
        let vn_cns: Vec<Vec<usize>> = order
            .iter()
            .map(|&v| g.vn_cns[v].iter().map(|&c| cn_map[c]).collect())
            .collect();
        let cn_vns: Vec<Vec<usize>> = (0..g.cn_vns.len())
            .filter(|&c| g.cn_alive[c])
            .map(|c| g.cn_vns[c].iter().map(|&v| vn_map[v]).collect::<Vec<_>>())
            .map(|mut vs| {
                vs.sort_unstable();
                vs
            })
            .collect();
        let punctured = order.iter().map(|&v| g.channel_pos[v].is_none()).collect();
        let forced_zero = order.iter().map(|&v| g.forced_zero[v]).collect();
        let origin = origin_meta.map(|(stages, block_len)| FactorOrigin {
            stages,
            block_len,
            coord_owner: g
                .coord_owner
                .iter()
                .map(|&o| o.and_then(|v| if g.vn_alive[v] { Some(vn_map[v]) } else { None }))
                .collect(),
        });
        TannerGraph {
            vn_cns,
            cn_vns,
            punctured,
            forced_zero,
            channel_order,
            origin,
            pre_freeze: pre,
        }
    }

    /// Construct a graph directly from adjacency lists (used by alist
    /// import and tests). `punctured[v]` marks hidden variables; channel
    /// positions are assigned to non-punctured variables in id order.
    pub fn from_adjacency(num_vns: usize, checks: &[Vec<usize>], punctured: &[bool]) -> TannerGraph {
        assert_eq!(punctured.len(), num_vns);
        let mut vn_cns: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); num_vns];
        let mut cn_vns: Vec<Vec<usize>> = Vec::with_capacity(checks.len());
        for (c, vs) in checks.iter().enumerate() {
            let set: BTreeSet<usize> = vs.iter().copied().collect();
            assert_eq!(set.len(), vs.len(), "parallel edges are not allowed");
            for &v in &set {
                assert!(v < num_vns, "check {c} references vn {v} out of range");
                vn_cns[v].insert(c);
            }
            cn_vns.push(set.into_iter().collect());
        }
        let channel_order = (0..num_vns).filter(|&v| !punctured[v]).collect();
        TannerGraph {
            vn_cns: vn_cns.into_iter().map(|s| s.into_iter().collect()).collect(),
            cn_vns,
            punctured: punctured.to_vec(),
            forced_zero: vec![false; num_vns],
            channel_order,
            origin: None,
            pre_freeze: None,
        }
    }
}

/// Working representation during construction and pruning.
struct MutGraph {
    vn_cns: Vec<BTreeSet<usize>>,
    cn_vns: Vec<BTreeSet<usize>>,
    vn_alive: Vec<bool>,
    cn_alive: Vec<bool>,
    channel_pos: Vec<Option<usize>>,
    forced_zero: Vec<bool>,
    coord_owner: Vec<Option<usize>>,
}

impl MutGraph {
    fn from_graph(g: &TannerGraph) -> MutGraph {
        let num_vns = g.num_vns();
        let coord_owner = g
            .origin
            .as_ref()
            .map(|o| o.coord_owner.clone())
            .unwrap_or_default();
        MutGraph {
            vn_cns: g.vn_cns.iter().map(|cs| cs.iter().copied().collect()).collect(),
            cn_vns: g.cn_vns.iter().map(|vs| vs.iter().copied().collect()).collect(),
            vn_alive: vec![true; num_vns],
            cn_alive: vec![true; g.num_cns()],
            channel_pos: {
                let mut pos = vec![None; num_vns];
                for (p, &v) in g.channel_order.iter().enumerate() {
                    pos[v] = Some(p);
                }
                pos
            },
            forced_zero: g.forced_zero.clone(),
            coord_owner,
        }
    }

    fn cn_degree(&self, c: usize) -> usize {
        self.cn_vns[c].len()
    }

    fn remove_edge(&mut self, v: usize, c: usize) {
        self.vn_cns[v].remove(&c);
        self.cn_vns[c].remove(&v);
    }

    fn delete_cn(&mut self, c: usize) {
        let members: Vec<usize> = self.cn_vns[c].iter().copied().collect();
        for v in members {
            self.vn_cns[v].remove(&c);
        }
        self.cn_vns[c].clear();
        self.cn_alive[c] = false;
    }

    /// Assign zero to a variable: it drops out of every check. A channel
    /// variable stays, flagged; a punctured one is deleted.
    fn pin_zero(&mut self, v: usize) {
        let checks: Vec<usize> = self.vn_cns[v].iter().copied().collect();
        for c in checks {
            self.remove_edge(v, c);
        }
        if self.channel_pos[v].is_some() {
            self.forced_zero[v] = true;
        } else {
            self.vn_alive[v] = false;
        }
    }

    /// R1: degree-1 checks pin their variable to zero.
    fn sweep_r1(&mut self) -> bool {
        let mut changed = false;
        for c in 0..self.cn_vns.len() {
            if !self.cn_alive[c] || self.cn_degree(c) != 1 {
                continue;
            }
            let v = *self.cn_vns[c].iter().next().expect("degree 1");
            self.pin_zero(v); // also empties c
            self.cn_alive[c] = false;
            changed = true;
        }
        changed
    }

    /// R2: degree-2 checks identify their two variables. GF(2)
    /// cancellation: a check shared by both loses both edges.
    fn sweep_r2(&mut self) -> bool {
        let mut changed = false;
        for c in 0..self.cn_vns.len() {
            if !self.cn_alive[c] || self.cn_degree(c) != 2 {
                continue;
            }
            let mut it = self.cn_vns[c].iter();
            let a = *it.next().expect("degree 2");
            let b = *it.next().expect("degree 2");
            let (survivor, absorbed) = match (self.channel_pos[a], self.channel_pos[b]) {
                (Some(_), Some(_)) => continue, // repetition check between channel vns stays
                (Some(_), None) => (a, b),
                (None, Some(_)) => (b, a),
                (None, None) => (a.min(b), a.max(b)),
            };
            self.delete_cn(c);
            let moved: Vec<usize> = self.vn_cns[absorbed].iter().copied().collect();
            for d in moved {
                self.remove_edge(absorbed, d);
                if self.cn_vns[d].contains(&survivor) {
                    self.remove_edge(survivor, d); // x ⊕ x cancels
                } else {
                    self.cn_vns[d].insert(survivor);
                    self.vn_cns[survivor].insert(d);
                }
            }
            self.vn_alive[absorbed] = false;
            for owner in self.coord_owner.iter_mut() {
                if *owner == Some(absorbed) {
                    *owner = Some(survivor);
                }
            }
            changed = true;
        }
        changed
    }

    /// R3: punctured variables of degree ≤ 2 are eliminated.
    fn sweep_r3(&mut self) -> bool {
        let mut changed = false;
        for v in 0..self.vn_cns.len() {
            if !self.vn_alive[v] || self.channel_pos[v].is_some() {
                continue;
            }
            match self.vn_cns[v].len() {
                0 => {
                    self.vn_alive[v] = false;
                    changed = true;
                }
                1 => {
                    // the check is satisfiable by choice of v; both leave
                    let c = *self.vn_cns[v].iter().next().expect("degree 1");
                    self.delete_cn(c);
                    self.vn_alive[v] = false;
                    changed = true;
                }
                2 => {
                    // v is determined by either check; their sum no longer
                    // involves v and replaces both
                    let mut it = self.vn_cns[v].iter();
                    let c1 = *it.next().expect("degree 2");
                    let c2 = *it.next().expect("degree 2");
                    let sum: BTreeSet<usize> = self.cn_vns[c1]
                        .symmetric_difference(&self.cn_vns[c2])
                        .copied()
                        .collect();
                    debug_assert!(!sum.contains(&v));
                    self.delete_cn(c1);
                    self.delete_cn(c2);
                    self.vn_alive[v] = false;
                    for &w in &sum {
                        self.vn_cns[w].insert(c1);
                    }
                    self.cn_vns[c1] = sum;
                    self.cn_alive[c1] = true;
                    changed = true;
                }
                _ => {}
            }
        }
        changed
    }

    /// R4: degree-0 checks and degree-0 punctured variables leave.
    fn sweep_r4(&mut self) -> bool {
        let mut changed = false;
        for c in 0..self.cn_vns.len() {
            if self.cn_alive[c] && self.cn_degree(c) == 0 {
                self.cn_alive[c] = false;
                changed = true;
            }
        }
        for v in 0..self.vn_cns.len() {
            if self.vn_alive[v]
                && self.channel_pos[v].is_none()
                && self.vn_cns[v].is_empty()
            {
                self.vn_alive[v] = false;
                changed = true;
            }
        }
        changed
    }
}

/// Unroll the encoder factor graph of `code` into a bipartite graph.
///
/// The result has the N channel variables plus the surviving left-stage
/// and interior variables, all punctured; frozen left-stage variables are
/// known zeros and have already been deleted.
pub fn full_bipartite(code: &PolarCode) -> TannerGraph {
    let n = code.block_len();
    let stages = code.stages();
    let coords = (stages + 1) * n;

    // union-find over coordinates: lower butterfly wires are identified
    let mut parent: Vec<usize> = (0..coords).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut c = x;
        while parent[c] != r {
            let next = parent[c];
            parent[c] = r;
            c = next;
        }
        r
    }
    for s in 0..stages {
        for i in 0..n {
            if (i >> s) & 1 == 1 {
                let a = find(&mut parent, s * n + i);
                let b = find(&mut parent, (s + 1) * n + i);
                parent[a] = b;
            }
        }
    }

    // allocate one vn per class, scanning coordinates in (stage, index) order
    let mut class_vn: Vec<Option<usize>> = vec![None; coords];
    let mut coord_owner: Vec<Option<usize>> = vec![None; coords];
    let mut num_vns = 0;
    for coord in 0..coords {
        let root = find(&mut parent, coord);
        let v = *class_vn[root].get_or_insert_with(|| {
            let v = num_vns;
            num_vns += 1;
            v
        });
        coord_owner[coord] = Some(v);
    }
    let mut channel_pos: Vec<Option<usize>> = vec![None; num_vns];
    for i in 0..n {
        let v = coord_owner[stages * n + i].expect("channel coord");
        channel_pos[v] = Some(i);
    }

    // one degree-3 check per butterfly: out_upper = in_upper ⊕ in_lower
    let mut vn_cns: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); num_vns];
    let mut cn_vns: Vec<BTreeSet<usize>> = Vec::with_capacity(stages * n / 2);
    for s in 0..stages {
        let stride = 1 << s;
        for i in 0..n {
            if (i >> s) & 1 == 0 {
                let members = [
                    coord_owner[s * n + i].expect("coord"),
                    coord_owner[s * n + i + stride].expect("coord"),
                    coord_owner[(s + 1) * n + i].expect("coord"),
                ];
                let c = cn_vns.len();
                let set: BTreeSet<usize> = members.iter().copied().collect();
                debug_assert_eq!(set.len(), 3, "butterfly members are distinct classes");
                for &v in &set {
                    vn_cns[v].insert(c);
                }
                cn_vns.push(set);
            }
        }
    }

    let pre = PreFreezeCounts {
        vns: num_vns,
        cns: cn_vns.len(),
        edges: cn_vns.iter().map(BTreeSet::len).sum(),
    };

    let mut g = MutGraph {
        vn_cns,
        cn_vns,
        vn_alive: vec![true; num_vns],
        cn_alive: vec![true; pre.cns],
        channel_pos,
        forced_zero: vec![false; num_vns],
        coord_owner,
    };

    // frozen left-stage variables are zero: delete (or flag, for the one
    // chain that reaches the channel side)
    for &f in code.frozen_set() {
        let v = g.coord_owner[f].expect("left coord");
        g.pin_zero(v);
        if !g.vn_alive[v] {
            for owner in g.coord_owner.iter_mut() {
                if *owner == Some(v) {
                    *owner = None;
                }
            }
        }
    }

    TannerGraph::from_mut(g, Some((stages, n)), Some(pre))
}

/// Unrolled factor graph before any reduction: every stage value is its
/// own variable and each butterfly contributes a degree-3 check plus a
/// degree-2 equality check. This is the size baseline the reduction
/// claims are measured against; frozen positions are still present.
pub fn unrolled_factor_graph(code: &PolarCode) -> TannerGraph {
    let n = code.block_len();
    let stages = code.stages();
    let num_vns = (stages + 1) * n;
    let coord = |s: usize, i: usize| s * n + i;
    let mut checks = Vec::with_capacity(stages * n);
    for s in 0..stages {
        let stride = 1 << s;
        for i in 0..n {
            if (i >> s) & 1 == 0 {
                checks.push(vec![coord(s, i), coord(s, i + stride), coord(s + 1, i)]);
                checks.push(vec![coord(s, i + stride), coord(s + 1, i + stride)]);
            }
        }
    }
    let punctured: Vec<bool> = (0..num_vns).map(|v| v < stages * n).collect();
    TannerGraph::from_adjacency(num_vns, &checks, &punctured)
}

/// Apply the pruning rules to fixpoint. Deterministic: sweeps run in the
/// fixed order R1, R2, R3, R4 over ascending node ids until none changes
/// the graph.
pub fn prune(graph: &TannerGraph) -> TannerGraph {
    let mut g = MutGraph::from_graph(graph);
    loop {
        let mut changed = g.sweep_r1();
        changed |= g.sweep_r2();
        changed |= g.sweep_r3();
        changed |= g.sweep_r4();
        if !changed {
            break;
        }
    }
    let origin_meta = graph.origin.as_ref().map(|o| (o.stages, o.block_len));
    TannerGraph::from_mut(g, origin_meta, graph.pre_freeze)
}

/// Fraction of edges removed going from `before` to `after`.
pub fn reduction_factor(before: &TannerGraph, after: &TannerGraph) -> f64 {
    let eb = before.num_edges();
    if eb == 0 {
        return 0.0;
    }
    1.0 - after.num_edges() as f64 / eb as f64
}

/// Stage-by-stage values of the unrolled factor graph for a given
/// u-vector: `values[0] = u`, `values[stages]` is the codeword.
pub fn stage_values(code: &PolarCode, u: &[u8]) -> Vec<Vec<u8>> {
    let n = code.block_len();
    assert_eq!(u.len(), n);
    let mut values = vec![u.to_vec()];
    for s in 0..code.stages() {
        let stride = 1 << s;
        let prev = &values[s];
        let mut next = prev.clone();
        for i in 0..n {
            if (i >> s) & 1 == 0 {
                next[i] = prev[i] ^ prev[i + stride];
            }
        }
        values.push(next);
    }
    values
}
