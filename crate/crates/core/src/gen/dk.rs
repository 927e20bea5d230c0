//! The layered digraphs with no two arc-disjoint cycles of equal length.
//!
//! `2N` layers of `k` vertices each. Every vertex of layer `l >= 2` points at
//! every vertex of layer `l - 1`; the only upward arcs are the `2k^2`
//! forward arcs, whose spans are powers of two offset by `N`, so every
//! cycle length identifies the set of forward arcs it uses.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::digraph::{Arc, Digraph, VertexId};
use crate::error::{Error, Result};

/// Largest vertex count `gen_d` will materialize.
const MAX_VERTICES: usize = 20_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ForwardArcKind {
    /// Leaves the bottom layer at `u_i`.
    E,
    /// Enters the top layer at `w_i`.
    F,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForwardArc {
    pub kind: ForwardArcKind,
    pub i: usize,
    pub j: usize,
    /// 1-based layer indices.
    pub tail_layer: BigUint,
    pub head_layer: BigUint,
    /// `head_layer - tail_layer + 1`.
    pub length: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForwardArcTable {
    pub k: usize,
    pub n_layers_half: BigUint,
    pub arcs: Vec<ForwardArc>,
}

impl ForwardArcTable {
    /// `a(l) = N + 2^(l-1)`.
    pub fn a(&self, l: usize) -> BigUint {
        &self.n_layers_half + (BigUint::one() << (l - 1))
    }

    /// `b(l) = N + 2^(k^2 + l - 1)`.
    pub fn b(&self, l: usize) -> BigUint {
        &self.n_layers_half + (BigUint::one() << (self.k * self.k + l - 1))
    }

    pub fn lengths(&self) -> Vec<BigUint> {
        self.arcs.iter().map(|a| a.length.clone()).collect()
    }

    /// Checks the length formulas and, for at most 20 arcs, that all subset
    /// sums differ. Larger tables rely on the binary-expansion argument:
    /// any subset of size `s` sums to `sN` plus a sum of distinct powers
    /// of two below `N`, and both parts are recoverable.
    pub fn check(&self) -> Result<()> {
        let k = self.k;
        if self.arcs.len() != 2 * k * k {
            return Err(Error::InvalidArgument("forward-arc table has wrong size".into()));
        }
        for a in &self.arcs {
            let l = k * (a.i - 1) + a.j;
            let want = match a.kind {
                ForwardArcKind::E => self.a(l),
                ForwardArcKind::F => self.b(l),
            };
            if a.length != want {
                return Err(Error::InvalidArgument(format!(
                    "forward arc {:?}({},{}) has length {} instead of {}",
                    a.kind, a.i, a.j, a.length, want
                )));
            }
            if &a.head_layer + 1u32 != &a.tail_layer + &a.length {
                return Err(Error::InvalidArgument("layer span disagrees with length".into()));
            }
        }
        let lens = self.lengths();
        if lens.len() <= 20 {
            let mut sums: Vec<BigUint> = Vec::with_capacity(1 << lens.len());
            for mask in 0u32..(1u32 << lens.len()) {
                let mut s = BigUint::default();
                for (b, l) in lens.iter().enumerate() {
                    if mask >> b & 1 == 1 {
                        s += l;
                    }
                }
                sums.push(s);
            }
            sums.sort();
            if sums.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidArgument("two subsets share a sum".into()));
            }
        } else {
            let bound = BigUint::one() << (2 * k * k);
            if self.n_layers_half < bound {
                return Err(Error::InvalidArgument("N too small for the power-of-two argument".into()));
            }
        }
        Ok(())
    }
}

/// Pure arithmetic table of forward arcs for parameters `k` and `N`.
pub fn forward_arc_table(k: usize, n: &BigUint) -> Result<ForwardArcTable> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    let min = BigUint::one() << (2 * k * k - 1);
    if *n < min {
        return Err(Error::InvalidArgument(format!(
            "N = {n} is below 2^{} = {min}",
            2 * k * k - 1
        )));
    }
    let mut table = ForwardArcTable {
        k,
        n_layers_half: n.clone(),
        arcs: Vec::with_capacity(2 * k * k),
    };
    let top = n * 2u32;
    for i in 1..=k {
        for j in 1..=k {
            let len = table.a(k * (i - 1) + j);
            table.arcs.push(ForwardArc {
                kind: ForwardArcKind::E,
                i,
                j,
                tail_layer: BigUint::one(),
                head_layer: len.clone(),
                length: len,
            });
        }
    }
    for i in 1..=k {
        for j in 1..=k {
            let len = table.b(k * (i - 1) + j);
            table.arcs.push(ForwardArc {
                kind: ForwardArcKind::F,
                i,
                j,
                tail_layer: &top - &len + 1u32,
                head_layer: top.clone(),
                length: len,
            });
        }
    }
    Ok(table)
}

/// A materialized layered digraph with its forward arcs in vertex ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayeredDigraph {
    pub digraph: Digraph,
    pub table: ForwardArcTable,
    /// Vertex-id form of `table.arcs`, same order.
    pub forward: Vec<Arc>,
}

impl LayeredDigraph {
    /// Vertex `index` (0-based) of layer `layer` (1-based).
    pub fn vertex(&self, layer: usize, index: usize) -> VertexId {
        (layer - 1) * self.table.k + index
    }

    pub fn layer_of(&self, v: VertexId) -> usize {
        v / self.table.k + 1
    }

    pub fn layers(&self) -> usize {
        self.digraph.n() / self.table.k
    }
}

/// Builds the layered digraph; `n` defaults to `4^(k^2)`. Forward arcs go
/// to (or leave from) the lowest-id vertex of their far layer.
pub fn gen_d(k: usize, n: Option<u64>) -> Result<LayeredDigraph> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    let n_big = match n {
        Some(n) => BigUint::from(n),
        None => BigUint::one() << (2 * k * k),
    };
    let table = forward_arc_table(k, &n_big)?;
    let half = n_big
        .to_usize()
        .filter(|&h| h.checked_mul(2 * k).is_some_and(|t| t <= MAX_VERTICES))
        .ok_or_else(|| Error::TooLarge(format!("2Nk vertices with N = {n_big}, k = {k}")))?;
    let layers = 2 * half;
    let total = layers * k;
    let v = |layer: usize, idx: usize| (layer - 1) * k + idx;
    let mut arcs = Vec::with_capacity((layers - 1) * k * k + 2 * k * k);
    for l in 2..=layers {
        for a in 0..k {
            for b in 0..k {
                arcs.push((v(l, a), v(l - 1, b)));
            }
        }
    }
    let mut forward = Vec::with_capacity(2 * k * k);
    for fa in &table.arcs {
        let arc = match fa.kind {
            ForwardArcKind::E => (v(1, fa.i - 1), v(fa.head_layer.to_usize().unwrap_or(0), 0)),
            ForwardArcKind::F => (v(fa.tail_layer.to_usize().unwrap_or(0), 0), v(layers, fa.i - 1)),
        };
        forward.push(arc);
    }
    arcs.extend_from_slice(&forward);
    let digraph = Digraph::build(total, &arcs)?;
    Ok(LayeredDigraph {
        digraph,
        table,
        forward,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_instance() {
        let d = gen_d(1, Some(2)).unwrap();
        assert_eq!(d.digraph.n(), 4);
        let lens: Vec<u64> = d.table.lengths().iter().map(|l| l.to_u64().unwrap()).collect();
        assert_eq!(lens, vec![3, 4]);
        assert_eq!(d.forward, vec![(0, 2), (0, 3)]);
        d.table.check().unwrap();
    }

    #[test]
    fn k2_lengths() {
        let d = gen_d(2, Some(256)).unwrap();
        assert_eq!(d.digraph.n(), 1024);
        let lens: Vec<u64> = d.table.lengths().iter().map(|l| l.to_u64().unwrap()).collect();
        assert_eq!(lens, vec![257, 258, 260, 264, 272, 288, 320, 384]);
        d.table.check().unwrap();
        // default N = 4^(k^2) = 256 for k = 2
        assert_eq!(gen_d(2, None).unwrap().digraph.n(), 1024);
    }

    #[test]
    fn n_below_bound_rejected() {
        assert!(gen_d(2, Some(100)).is_err());
        assert!(gen_d(2, Some(128)).is_ok());
    }

    #[test]
    fn big_tables_stay_exact() {
        let n = BigUint::one() << 72u32;
        let t = forward_arc_table(6, &n).unwrap();
        t.check().unwrap();
        assert_eq!(t.arcs.len(), 72);
        assert!(t.arcs.iter().all(|a| a.length > BigUint::from(u64::MAX)));
        assert!(matches!(gen_d(4, None), Err(Error::TooLarge(_))));
    }

    #[test]
    fn layer_helpers() {
        let d = gen_d(2, Some(128)).unwrap();
        assert_eq!(d.layers(), 256);
        assert_eq!(d.vertex(3, 1), 5);
        assert_eq!(d.layer_of(5), 3);
    }
}
