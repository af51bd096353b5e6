//! alist interchange format (MacKay's convention) plus a `.punct`
//! sidecar carrying the punctured-variable flags that alist itself has no
//! field for.
//!
//! Layout: line 1 `n_vn n_cn`; line 2 the maximum variable and check
//! degrees; then per-variable and per-check degree lists; then one
//! neighbor list per variable (1-based check ids) and one per check
//! (1-based variable ids), zero-padded to the maximum degree.

use super::{TannerError, TannerGraph};

/// Serialize a graph. Variables keep their ids (channel variables first,
/// by codeword position), so a round trip through
/// [`import_alist`] + [`parse_punctured`] reproduces the same adjacency.
pub fn export_alist(graph: &TannerGraph) -> Result<String, TannerError> {
    if graph.num_vns() == 0 {
        return Err(TannerError::EmptyGraph);
    }
    let nv = graph.num_vns();
    let nc = graph.num_cns();
    let max_vd = (0..nv).map(|v| graph.vn_degree(v)).max().unwrap_or(0);
    let max_cd = (0..nc).map(|c| graph.cn_degree(c)).max().unwrap_or(0);
    let mut out = String::new();
    out.push_str(&format!("{} {}\n", nv, nc));
    out.push_str(&format!("{} {}\n", max_vd, max_cd));
    let vn_degs: Vec<String> = (0..nv).map(|v| graph.vn_degree(v).to_string()).collect();
    out.push_str(&vn_degs.join(" "));
    out.push('\n');
    let cn_degs: Vec<String> = (0..nc).map(|c| graph.cn_degree(c).to_string()).collect();
    out.push_str(&cn_degs.join(" "));
    out.push('\n');
    for v in 0..nv {
        let mut ids: Vec<usize> = graph.vn_checks(v).iter().map(|&c| c + 1).collect();
        ids.resize(max_vd, 0);
        let line: Vec<String> = ids.iter().map(|i| i.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    for c in 0..nc {
        let mut ids: Vec<usize> = graph.cn_vars(c).iter().map(|&v| v + 1).collect();
        ids.resize(max_cd, 0);
        let line: Vec<String> = ids.iter().map(|i| i.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    Ok(out)
}

/// Sidecar text: one 1-based punctured variable id per line.
pub fn export_punctured(graph: &TannerGraph) -> String {
    let mut out = String::new();
    for v in 0..graph.num_vns() {
        if graph.is_punctured(v) {
            out.push_str(&(v + 1).to_string());
            out.push('\n');
        }
    }
    out
}

struct LineReader<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> LineReader<'a> {
    fn new(text: &'a str) -> Self {
        LineReader { lines: text.lines().enumerate() }
    }

    fn next_numbers(&mut self) -> Result<(usize, Vec<usize>), TannerError> {
        for (idx, raw) in self.lines.by_ref() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut nums = Vec::new();
            for tok in line.split_whitespace() {
                let v: usize = tok.parse().map_err(|_| TannerError::AlistParse {
                    line: idx + 1,
                    msg: format!("expected an integer, got {tok:?}"),
                })?;
                nums.push(v);
            }
            return Ok((idx + 1, nums));
        }
        Err(TannerError::AlistParse { line: 0, msg: "unexpected end of file".into() })
    }
}

/// Parse alist text into a graph without puncture information (every
/// variable is treated as a channel variable). Zero padding is accepted
/// and ignored; both padded and unpadded files parse.
pub fn import_alist(text: &str) -> Result<TannerGraph, TannerError> {
    let mut r = LineReader::new(text);
    let (line, header) = r.next_numbers()?;
    if header.len() != 2 {
        return Err(TannerError::AlistParse { line, msg: "expected `n_vn n_cn`".into() });
    }
    let (nv, nc) = (header[0], header[1]);
    if nv == 0 {
        return Err(TannerError::AlistParse { line, msg: "graph has no variable nodes".into() });
    }
    let (line, maxes) = r.next_numbers()?;
    if maxes.len() != 2 {
        return Err(TannerError::AlistParse { line, msg: "expected `max_vn_deg max_cn_deg`".into() });
    }
    let (line, vn_degs) = r.next_numbers()?;
    if vn_degs.len() != nv {
        return Err(TannerError::AlistParse {
            line,
            msg: format!("expected {nv} variable degrees, got {}", vn_degs.len()),
        });
    }
    let (line, cn_degs) = r.next_numbers()?;
    if cn_degs.len() != nc {
        return Err(TannerError::AlistParse {
            line,
            msg: format!("expected {nc} check degrees, got {}", cn_degs.len()),
        });
    }
    // per-variable lists are redundant with the per-check lists; read and
    // cross-validate
    let mut vn_cns: Vec<Vec<usize>> = Vec::with_capacity(nv);
    for (v, &deg) in vn_degs.iter().enumerate() {
        let (line, mut ids) = r.next_numbers()?;
        ids.retain(|&x| x != 0);
        if ids.len() != deg {
            return Err(TannerError::AlistParse {
                line,
                msg: format!("variable {} lists {} neighbors, degree says {deg}", v + 1, ids.len()),
            });
        }
        for &c in &ids {
            if c > nc {
                return Err(TannerError::AlistParse {
                    line,
                    msg: format!("check id {c} out of range 1..={nc}"),
                });
            }
        }
        vn_cns.push(ids.iter().map(|&c| c - 1).collect());
    }
    let mut checks: Vec<Vec<usize>> = Vec::with_capacity(nc);
    for (c, &deg) in cn_degs.iter().enumerate() {
        let (line, mut ids) = r.next_numbers()?;
        ids.retain(|&x| x != 0);
        if ids.len() != deg {
            return Err(TannerError::AlistParse {
                line,
                msg: format!("check {} lists {} neighbors, degree says {deg}", c + 1, ids.len()),
            });
        }
        for &v in &ids {
            if v == 0 || v > nv {
                return Err(TannerError::AlistParse {
                    line,
                    msg: format!("variable id {v} out of range 1..={nv}"),
                });
            }
        }
        checks.push(ids.iter().map(|&v| v - 1).collect());
    }
    let graph = TannerGraph::from_adjacency(nv, &checks, &vec![false; nv]);
    // consistency between the two adjacency encodings
    for (v, cs) in vn_cns.iter().enumerate() {
        let mut sorted = cs.clone();
        sorted.sort_unstable();
        if sorted != graph.vn_checks(v) {
            return Err(TannerError::AlistParse {
                line: 0,
                msg: format!("variable {} adjacency disagrees with check lists", v + 1),
            });
        }
    }
    Ok(graph)
}

/// Parse a `.punct` sidecar and apply it: flagged variables become
/// punctured, the rest become the channel variables in id order.
pub fn parse_punctured(graph: &TannerGraph, text: &str) -> Result<TannerGraph, TannerError> {
    let mut punctured = vec![false; graph.num_vns()];
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: usize = line.parse().map_err(|_| TannerError::PuncturedParse {
            line: idx + 1,
            msg: format!("expected a variable id, got {line:?}"),
        })?;
        if v == 0 || v > graph.num_vns() {
            return Err(TannerError::PuncturedParse {
                line: idx + 1,
                msg: format!("variable id {v} out of range 1..={}", graph.num_vns()),
            });
        }
        punctured[v - 1] = true;
    }
    let checks: Vec<Vec<usize>> = (0..graph.num_cns()).map(|c| graph.cn_vars(c).to_vec()).collect();
    Ok(TannerGraph::from_adjacency(graph.num_vns(), &checks, &punctured))
}
