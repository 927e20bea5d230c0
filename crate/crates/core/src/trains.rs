//! k-trains: a directed path `u_0 .. u_l` plus `k` arcs from `u_l` back to
//! path vertices, the first of them to `u_0`. The back arcs close `k`
//! cycles of pairwise distinct lengths.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::digraph::{DiCycle, DiPath, Digraph, VertexId};
use crate::error::{Error, Result};
use crate::verdict::Verdict;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KTrain {
    pub spine: DiPath,
    /// Spine positions hit by the back arcs, strictly increasing from 0.
    pub back: Vec<usize>,
    /// All arcs point the other way in the host.
    #[serde(default)]
    pub reversed: bool,
}

impl KTrain {
    pub fn k(&self) -> usize {
        self.back.len()
    }

    pub fn end(&self) -> VertexId {
        *self.spine.vertices.last().expect("non-empty spine")
    }

    /// Lengths of the cycles closed by the back arcs, descending.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let l = self.spine.vertices.len() - 1;
        self.back.iter().map(|&p| l - p + 1).collect()
    }

    pub fn vertex_set(&self) -> BTreeSet<VertexId> {
        self.spine.vertices.iter().copied().collect()
    }

    /// The same train viewed in the reversed host.
    pub fn flipped(&self) -> KTrain {
        KTrain {
            reversed: !self.reversed,
            ..self.clone()
        }
    }

    pub fn map(&self, f: impl Fn(VertexId) -> VertexId) -> KTrain {
        KTrain {
            spine: DiPath::new(self.spine.vertices.iter().map(|&v| f(v)).collect()),
            back: self.back.clone(),
            reversed: self.reversed,
        }
    }
}

fn has(d: &Digraph, reversed: bool, t: VertexId, h: VertexId) -> bool {
    if reversed {
        d.has_arc(h, t)
    } else {
        d.has_arc(t, h)
    }
}

/// Full invariant check of `t` against `d` (or against the reversal of `d`
/// when the train is marked reversed).
pub fn is_train(d: &Digraph, t: &KTrain) -> Verdict {
    let vs = &t.spine.vertices;
    if vs.is_empty() {
        return Verdict::fail("empty spine");
    }
    if let Some(&v) = vs.iter().find(|&&v| v >= d.n()) {
        return Verdict::fail(format!("vertex {v} out of range"));
    }
    let distinct: BTreeSet<_> = vs.iter().collect();
    if distinct.len() != vs.len() {
        return Verdict::fail("spine not a path: repeated vertex");
    }
    for w in vs.windows(2) {
        if !has(d, t.reversed, w[0], w[1]) {
            return Verdict::fail(format!("spine not a path: missing arc ({}, {})", w[0], w[1]));
        }
    }
    if t.back.is_empty() {
        return Verdict::fail("no back arcs");
    }
    if t.back[0] != 0 {
        return Verdict::fail("first back arc does not reach the spine start");
    }
    let l = vs.len() - 1;
    for w in t.back.windows(2) {
        if w[0] >= w[1] {
            return Verdict::fail("back-arc positions not strictly increasing");
        }
    }
    for &p in &t.back {
        if p >= l {
            return Verdict::fail(format!("back-arc position {p} not before the end {l}"));
        }
        if !has(d, t.reversed, vs[l], vs[p]) {
            return Verdict::fail(format!("missing arc ({}, {})", vs[l], vs[p]));
        }
    }
    Verdict::pass()
}

/// The `k` cycles of `t`, in host orientation, lengths descending.
pub fn train_cycles(t: &KTrain) -> Vec<DiCycle> {
    let vs = &t.spine.vertices;
    t.back
        .iter()
        .map(|&p| {
            let c = DiCycle::new(vs[p..].to_vec());
            if t.reversed {
                c.reversed()
            } else {
                c
            }
        })
        .collect()
}

/// Greedy maximal path from `start`, stepping to the lowest-id unvisited
/// out-neighbour, closed into a train at the earliest `k` out-neighbours of
/// its endpoint. `None` when the endpoint has fewer than `k` out-neighbours.
pub fn greedy_train_from(d: &Digraph, k: usize, start: VertexId) -> Option<KTrain> {
    let mut on_path = vec![usize::MAX; d.n()];
    let mut path = vec![start];
    on_path[start] = 0;
    loop {
        let last = *path.last().expect("non-empty");
        match d.out_neighbors(last).iter().find(|&&w| on_path[w] == usize::MAX) {
            Some(&w) => {
                on_path[w] = path.len();
                path.push(w);
            }
            None => break,
        }
    }
    let last = *path.last().expect("non-empty");
    let mut hits: Vec<usize> = d.out_neighbors(last).iter().map(|&w| on_path[w]).collect();
    hits.sort_unstable();
    if k == 0 || hits.len() < k {
        return None;
    }
    let root = hits[0];
    Some(KTrain {
        spine: DiPath::new(path[root..].to_vec()),
        back: hits[..k].iter().map(|&p| p - root).collect(),
        reversed: false,
    })
}

/// A k-train of `d`, which must have minimum out-degree at least `k`.
pub fn find_k_train(d: &Digraph, k: usize) -> Result<KTrain> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    match d.min_out_degree_vertex() {
        None => Err(Error::Precondition("empty digraph".into())),
        Some((v, deg)) if deg < k => Err(Error::DegreeDeficit {
            vertex: v,
            degree: deg,
            required: k,
        }),
        Some(_) => greedy_train_from(d, k, 0)
            .ok_or_else(|| Error::Defect("maximal path endpoint below degree k".into())),
    }
}

/// [`find_k_train`] on `d[within]`, reported in the ids of `d`.
pub fn find_k_train_within(d: &Digraph, k: usize, within: &[VertexId]) -> Result<KTrain> {
    let (sub, map) = d.induced(within)?;
    let t = find_k_train(&sub, k).map_err(|e| match e {
        Error::DegreeDeficit {
            vertex,
            degree,
            required,
        } => Error::DegreeDeficit {
            vertex: map[vertex],
            degree,
            required,
        },
        other => other,
    })?;
    Ok(t.map(|v| map[v]))
}

/// One cycle per menu, each avoiding the lengths already chosen, taking the
/// shortest available length every time.
pub fn select_distinct_menus(menus: &[Vec<DiCycle>]) -> Result<Vec<DiCycle>> {
    let mut used = BTreeSet::new();
    let mut out = Vec::with_capacity(menus.len());
    for (i, menu) in menus.iter().enumerate() {
        let pick = menu
            .iter()
            .filter(|c| !used.contains(&c.len()))
            .min_by_key(|c| c.len())
            .ok_or_else(|| Error::Defect(format!("menu {i} has no unused length")))?;
        used.insert(pick.len());
        out.push(pick.clone());
    }
    Ok(out)
}

/// `k` disjoint cycles of distinct lengths from `k` pairwise disjoint
/// k-trains of `d`, where `k` is the back-arc count of the first train.
pub fn select_distinct(d: &Digraph, trains: &[KTrain]) -> Result<Vec<DiCycle>> {
    let k = trains
        .first()
        .map(KTrain::k)
        .ok_or_else(|| Error::InvalidArgument("no trains given".into()))?;
    if trains.len() < k {
        return Err(Error::InvalidArgument(format!(
            "{} trains offered, {k} needed",
            trains.len()
        )));
    }
    let mut seen = BTreeSet::new();
    for (i, t) in trains.iter().enumerate() {
        let v = is_train(d, t);
        if !v.ok {
            return Err(Error::InvalidArgument(format!(
                "train {i} invalid: {}",
                v.violation.unwrap_or_default()
            )));
        }
        if t.k() < k {
            return Err(Error::InvalidArgument(format!("train {i} has fewer than {k} back arcs")));
        }
        for &v in &t.spine.vertices {
            if !seen.insert(v) {
                return Err(Error::InvalidArgument(format!("trains overlap at vertex {v}")));
            }
        }
    }
    let menus: Vec<Vec<DiCycle>> = trains[..k].iter().map(train_cycles).collect();
    select_distinct_menus(&menus)
}
