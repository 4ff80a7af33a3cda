//! Graph families used to build instances, and the d-regularity check.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::instance::{boundary, NetworkInstance};
use crate::subset::Subset;

/// Largest node count for which [`regularity`] brute-forces vertex connectivity.
pub const REGULARITY_NODE_LIMIT: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Topology {
    Complete,
    Line,
    Cycle,
    /// Node `i` is adjacent to `i ± o (mod n)` for each offset `o`.
    Circulant(Vec<usize>),
    /// `rows x cols` grid with wrap-around; `n` must equal `rows * cols`.
    Torus { rows: usize, cols: usize },
}

impl Topology {
    /// 0-based undirected edges `(a, b)` with `a < b`, deduplicated.
    pub fn edges(&self, n: usize) -> Result<Vec<(usize, usize)>> {
        let mut edges = Vec::new();
        let mut push = |a: usize, b: usize| {
            if a != b {
                edges.push((a.min(b), a.max(b)));
            }
        };
        match self {
            Topology::Complete => {
                for a in 0..n {
                    for b in a + 1..n {
                        push(a, b);
                    }
                }
            }
            Topology::Line => {
                for a in 1..n {
                    push(a - 1, a);
                }
            }
            Topology::Cycle => {
                if n < 3 {
                    return Err(Error::InvalidParameter("a cycle needs n >= 3".into()));
                }
                for a in 0..n {
                    push(a, (a + 1) % n);
                }
            }
            Topology::Circulant(offsets) => {
                if offsets.iter().any(|&o| o == 0 || o >= n) {
                    return Err(Error::InvalidParameter(format!(
                        "circulant offsets {offsets:?} must lie in 1..{n}"
                    )));
                }
                for a in 0..n {
                    for &o in offsets {
                        push(a, (a + o) % n);
                    }
                }
            }
            Topology::Torus { rows, cols } => {
                if rows * cols != n {
                    return Err(Error::InvalidParameter(format!(
                        "torus {rows}x{cols} does not have {n} nodes"
                    )));
                }
                for r in 0..*rows {
                    for c in 0..*cols {
                        let at = |r: usize, c: usize| (r % rows) * cols + (c % cols);
                        push(at(r, c), at(r + 1, c));
                        push(at(r, c), at(r, c + 1));
                    }
                }
            }
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(edges)
    }
}

impl FromStr for Topology {
    type Err = Error;

    /// Accepts `clique`/`complete`, `line`, `cycle`, `circulant:1,2` and
    /// `torus:3x4`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unknown topology '{s}'"));
        let (name, arg) = match s.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (s, None),
        };
        match (name, arg) {
            ("clique" | "complete", None) => Ok(Topology::Complete),
            ("line", None) => Ok(Topology::Line),
            ("cycle", None) => Ok(Topology::Cycle),
            ("circulant", Some(list)) => list
                .split(',')
                .map(|o| o.trim().parse::<usize>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()
                .map(Topology::Circulant),
            ("torus", Some(dims)) => {
                let (r, c) = dims.split_once('x').ok_or_else(bad)?;
                Ok(Topology::Torus {
                    rows: r.parse().map_err(|_| bad())?,
                    cols: c.parse().map_err(|_| bad())?,
                })
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Topology::Complete => write!(f, "clique"),
            Topology::Line => write!(f, "line"),
            Topology::Cycle => write!(f, "cycle"),
            Topology::Circulant(o) => {
                let list: Vec<String> = o.iter().map(ToString::to_string).collect();
                write!(f, "circulant:{}", list.join(","))
            }
            Topology::Torus { rows, cols } => write!(f, "torus:{rows}x{cols}"),
        }
    }
}

/// Returns `Some(d)` when every node has degree `d` and every nonempty
/// `S` with `|S| <= n - d` has `|∂(S)| >= d`.
pub fn regularity(inst: &NetworkInstance) -> Result<Option<usize>> {
    let n = inst.n();
    if n > REGULARITY_NODE_LIMIT {
        return Err(Error::TooLarge {
            what: "node count for regularity check",
            value: n,
            limit: REGULARITY_NODE_LIMIT,
        });
    }
    let d = inst.degree(0);
    if (0..n).any(|i| inst.degree(i) != d) {
        return Ok(None);
    }
    let connected = inst
        .nodes()
        .subsets()
        .filter(|s| !s.is_empty() && s.len() <= n - d)
        .all(|s: Subset| boundary(inst, s).len() >= d);
    Ok(connected.then_some(d))
}
