//! Deterministic constructors for the explicit digraph families, each paired
//! with the structural certificate the rest of the crate checks against.

mod dk;
mod flat;
mod wall;

pub use dk::{forward_arc_table, gen_d, ForwardArc, ForwardArcKind, ForwardArcTable, LayeredDigraph};
pub use flat::{gen_flat_instance, gen_nonstrong_instance, FlatCase, FlatInstance};
pub use wall::{
    elementary_arcs, gen_equal_length_wall, gen_wall, gen_wall_uniform, BranchVertex, Brick, Coord,
    EqualLengthWall, SubdivisionPath, WallIndex, WallModel,
};

use serde::{Deserialize, Serialize};

use crate::digraph::{Arc, DiCycle, DiPath, Digraph, VertexId};
use crate::dtd::DirectedTreeDecomposition;
use crate::error::{Error, Result};

/// The complete digraph on `t` vertices (every ordered pair is an arc).
pub fn gen_complete(t: usize) -> Result<Digraph> {
    if t == 0 {
        return Err(Error::InvalidArgument("complete digraph needs t >= 1".into()));
    }
    let mut arcs = Vec::with_capacity(t * (t - 1));
    for a in 0..t {
        for b in 0..t {
            if a != b {
                arcs.push((a, b));
            }
        }
    }
    Digraph::build(t, &arcs)
}

/// A cylindrical grid with its defining cycles and paths.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CylindricalGrid {
    pub order: usize,
    pub digraph: Digraph,
    pub cycles: Vec<DiCycle>,
    pub paths: Vec<DiPath>,
    /// Order 1: each path is a single vertex and the whole grid is perimeter.
    pub degenerate: bool,
}

impl CylindricalGrid {
    /// Vertex on cycle `c` (1-based) and path `p` (1-based).
    pub fn vertex(order: usize, c: usize, p: usize) -> VertexId {
        (c - 1) * 2 * order + (p - 1)
    }
}

/// Cylindrical grid of order `k`: `k` concentric cycles of length `2k`
/// crossed by `2k` paths alternating outward and inward.
pub fn gen_grid(k: usize) -> Result<CylindricalGrid> {
    if k == 0 {
        return Err(Error::InvalidArgument("grid order must be >= 1".into()));
    }
    let v = |c, p| CylindricalGrid::vertex(k, c, p);
    let mut arcs: Vec<Arc> = Vec::new();
    let mut cycles = Vec::new();
    for c in 1..=k {
        let cyc: Vec<VertexId> = (1..=2 * k).map(|p| v(c, p)).collect();
        for p in 1..=2 * k {
            arcs.push((v(c, p), v(c, p % (2 * k) + 1)));
        }
        cycles.push(DiCycle::new(cyc));
    }
    let mut paths = Vec::new();
    for p in 1..=2 * k {
        let order: Vec<usize> = if p % 2 == 1 {
            (1..=k).collect()
        } else {
            (1..=k).rev().collect()
        };
        let trace: Vec<VertexId> = order.iter().map(|&c| v(c, p)).collect();
        for w in trace.windows(2) {
            arcs.push((w[0], w[1]));
        }
        paths.push(DiPath::new(trace));
    }
    let digraph = Digraph::build(2 * k * k, &arcs)?;
    Ok(CylindricalGrid {
        order: k,
        digraph,
        cycles,
        paths,
        degenerate: k == 1,
    })
}

/// The `k`-ary out-arborescence of depth `k` in which every leaf also
/// points at all of its ancestors, with the width-1 decomposition that uses
/// singleton bags and the tail of each tree arc as its guard.
pub fn gen_f(k: usize) -> Result<(Digraph, DirectedTreeDecomposition)> {
    if k == 0 {
        return Err(Error::InvalidArgument("F_k needs k >= 1".into()));
    }
    let branching = vec![k; k];
    back_arc_tree(&branching, false)
}

/// Rooted tree where the nodes at depth `i` have `branching[i]` children
/// (ids in BFS order). Leaves point back at every ancestor; with
/// `all_back_arcs` every non-root vertex does. Any such digraph has the
/// singleton-bag decomposition with tail guards, of width 1.
pub fn back_arc_tree(
    branching: &[usize],
    all_back_arcs: bool,
) -> Result<(Digraph, DirectedTreeDecomposition)> {
    let mut parent: Vec<Option<usize>> = vec![None];
    let mut depth = vec![0usize];
    let mut frontier = vec![0usize];
    for (level, &b) in branching.iter().enumerate() {
        let mut next = Vec::new();
        for &v in &frontier {
            for _ in 0..b {
                let id = parent.len();
                parent.push(Some(v));
                depth.push(level + 1);
                next.push(id);
            }
        }
        frontier = next;
    }
    let n = parent.len();
    let mut arcs = Vec::new();
    let mut is_leaf = vec![true; n];
    for (v, p) in parent.iter().enumerate() {
        if let Some(p) = *p {
            arcs.push((p, v));
            is_leaf[p] = false;
        }
    }
    for v in 0..n {
        if v == 0 || !(is_leaf[v] || all_back_arcs) {
            continue;
        }
        let mut a = parent[v];
        while let Some(x) = a {
            arcs.push((v, x));
            a = parent[x];
        }
    }
    let d = Digraph::build(n, &arcs)?;
    let bags = (0..n).map(|v| vec![v]).collect();
    let guards = (0..n)
        .filter_map(|v| parent[v].map(|p| (v, vec![p])))
        .collect();
    Ok((d, DirectedTreeDecomposition::new(parent, bags, guards)))
}
