//! Structural diagnostics: girth, short-cycle census, degree histograms.

use super::{TannerError, TannerGraph};
use std::collections::BTreeMap;
use std::collections::VecDeque;

/// Summary statistics of a Tanner graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphStats {
    pub num_vns: usize,
    pub num_cns: usize,
    pub num_edges: usize,
    pub num_punctured: usize,
    /// `None` encodes infinite girth (a forest).
    pub girth: Option<usize>,
    /// Cycle length -> number of distinct simple cycles of that length.
    pub cycle_counts: BTreeMap<usize, u64>,
    pub vn_degree_histogram: BTreeMap<usize, usize>,
    pub cn_degree_histogram: BTreeMap<usize, usize>,
}

/// Unified node id space: variables are 0..num_vns, checks follow.
fn neighbors(graph: &TannerGraph, node: usize) -> &[usize] {
    if node < graph.num_vns() {
        graph.vn_checks(node)
    } else {
        graph.cn_vars(node - graph.num_vns())
    }
}

fn node_count(graph: &TannerGraph) -> usize {
    graph.num_vns() + graph.num_cns()
}

fn to_unified(graph: &TannerGraph, node: usize, is_vn: bool) -> usize {
    if is_vn {
        node
    } else {
        node + graph.num_vns()
    }
}

/// Exact girth by BFS from every node; `None` for forests. Even for any
/// bipartite graph.
pub fn girth(graph: &TannerGraph) -> Option<usize> {
    let n = node_count(graph);
    let mut best: Option<usize> = None;
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    for start in 0..n {
        for d in dist.iter_mut() {
            *d = usize::MAX;
        }
        dist[start] = 0;
        parent[start] = usize::MAX;
        let mut q = VecDeque::from([start]);
        while let Some(u) = q.pop_front() {
            for &w0 in neighbors(graph, u) {
                let w = if u < graph.num_vns() {
                    to_unified(graph, w0, false)
                } else {
                    to_unified(graph, w0, true)
                };
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    q.push_back(w);
                } else if parent[u] != w {
                    // non-tree edge: cycle through start of length ≤ d(u)+d(w)+1
                    let len = dist[u] + dist[w] + 1;
                    if best.is_none_or(|b| len < b) {
                        best = Some(len);
                    }
                }
            }
        }
    }
    best
}

/// Girth and a census of simple cycles up to `max_len` (4, 6 or 8).
///
/// Lengths 4 and 6 use closed-form counts on the check co-incidence
/// matrix; length 8 is counted by bounded DFS enumeration.
pub fn girth_and_cycles(graph: &TannerGraph, max_len: usize) -> Result<GraphStats, TannerError> {
    if !matches!(max_len, 4 | 6 | 8) {
        return Err(TannerError::InvalidMaxCycleLen(max_len));
    }
    let mut cycle_counts = BTreeMap::new();
    cycle_counts.insert(4, count_4_cycles(graph));
    if max_len >= 6 {
        cycle_counts.insert(6, count_6_cycles(graph));
    }
    if max_len >= 8 {
        cycle_counts.insert(8, count_cycles_dfs(graph, 8));
    }
    let mut vn_hist = BTreeMap::new();
    for v in 0..graph.num_vns() {
        *vn_hist.entry(graph.vn_degree(v)).or_insert(0) += 1;
    }
    let mut cn_hist = BTreeMap::new();
    for c in 0..graph.num_cns() {
        *cn_hist.entry(graph.cn_degree(c)).or_insert(0) += 1;
    }
    Ok(GraphStats {
        num_vns: graph.num_vns(),
        num_cns: graph.num_cns(),
        num_edges: graph.num_edges(),
        num_punctured: graph.num_punctured(),
        girth: girth(graph),
        cycle_counts,
        vn_degree_histogram: vn_hist,
        cn_degree_histogram: cn_hist,
    })
}

/// Pairwise check co-incidence counts: for checks `c1 < c2`, how many
/// variables they share.
fn co_incidence(graph: &TannerGraph) -> BTreeMap<(usize, usize), u64> {
    let mut m = BTreeMap::new();
    for v in 0..graph.num_vns() {
        let cs = graph.vn_checks(v);
        for (a, &c1) in cs.iter().enumerate() {
            for &c2 in &cs[a + 1..] {
                *m.entry((c1, c2)).or_insert(0u64) += 1;
            }
        }
    }
    m
}

/// A 4-cycle is an unordered pair of variables sharing an unordered pair
/// of checks: sum of C(λ, 2) over the co-incidence counts λ.
fn count_4_cycles(graph: &TannerGraph) -> u64 {
    co_incidence(graph).values().map(|&l| l * (l - 1) / 2).sum()
}

/// 6-cycles visit three distinct checks i, j, k through three distinct
/// shared variables. With m_xy the pairwise co-incidence and t the number
/// of variables common to all three, inclusion-exclusion over the shared
/// variables being equal gives
/// `m_ij·m_jk·m_ki − t·(m_ij + m_jk + m_ki) + 2t` per check triple.
fn count_6_cycles(graph: &TannerGraph) -> u64 {
    let co = co_incidence(graph);
    // adjacency over checks that share at least one variable
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(c1, c2) in co.keys() {
        adj.entry(c1).or_default().push(c2);
        adj.entry(c2).or_default().push(c1);
    }
    let m = |a: usize, b: usize| -> u64 {
        let key = (a.min(b), a.max(b));
        co.get(&key).copied().unwrap_or(0)
    };
    let mut total: i64 = 0;
    for (&i, js) in &adj {
        for &j in js.iter().filter(|&&j| j > i) {
            for &k in js.iter().filter(|&&k| k > j) {
                let (mij, mjk, mki) = (m(i, j), m(j, k), m(k, i));
                if mjk == 0 {
                    continue;
                }
                let t = common_triple(graph, i, j, k);
                total += (mij * mjk * mki) as i64 - (t * (mij + mjk + mki)) as i64
                    + 2 * t as i64;
            }
        }
    }
    debug_assert!(total >= 0);
    total as u64
}

fn common_triple(graph: &TannerGraph, i: usize, j: usize, k: usize) -> u64 {
    let (a, b, c) = (graph.cn_vars(i), graph.cn_vars(j), graph.cn_vars(k));
    // sorted lists: three-way merge count
    let (mut x, mut y, mut z) = (0, 0, 0);
    let mut count = 0;
    while x < a.len() && y < b.len() && z < c.len() {
        let m = a[x].max(b[y]).max(c[z]);
        if a[x] == m && b[y] == m && c[z] == m {
            count += 1;
            x += 1;
            y += 1;
            z += 1;
        } else {
            if a[x] < m {
                x += 1;
            }
            if y < b.len() && b[y] < m {
                y += 1;
            }
            if z < c.len() && c[z] < m {
                z += 1;
            }
        }
    }
    count
}

/// Count simple cycles of exactly `len` edges by DFS. Each cycle is
/// counted once: only paths whose minimal node is the start are explored,
/// and the two traversal directions are halved at the end.
pub(crate) fn count_cycles_dfs(graph: &TannerGraph, len: usize) -> u64 {
    fn walk(
        graph: &TannerGraph,
        start: usize,
        u: usize,
        depth: usize,
        len: usize,
        on_path: &mut Vec<bool>,
        count: &mut u64,
    ) {
        let base = graph.num_vns();
        let nbrs: Vec<usize> = if u < base {
            graph.vn_checks(u).iter().map(|&c| c + base).collect()
        } else {
            graph.cn_vars(u - base).to_vec()
        };
        for w in nbrs {
            if w == start && depth == len {
                *count += 1;
                continue;
            }
            if depth < len && w > start && !on_path[w] {
                on_path[w] = true;
                walk(graph, start, w, depth + 1, len, on_path, count);
                on_path[w] = false;
            }
        }
    }

    let n = node_count(graph);
    let mut count = 0u64;
    let mut on_path = vec![false; n];
    for start in 0..n {
        on_path[start] = true;
        walk(graph, start, start, 1, len, &mut on_path, &mut count);
        on_path[start] = false;
    }
    count / 2
}
