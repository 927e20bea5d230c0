//! Simple loopless digraphs with both adjacency orientations, plus the
//! elementary reachability and decomposition routines the rest of the crate
//! is built on.
//!
//! Vertices are dense ids `0..n`. Arcs are kept sorted lexicographically and
//! every neighbour list is sorted ascending, so every traversal below is
//! deterministic.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type Arc = (VertexId, VertexId);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DigraphDoc", into = "DigraphDoc")]
pub struct Digraph {
    n: usize,
    arcs: Vec<Arc>,
    out: Vec<Vec<VertexId>>,
    inn: Vec<Vec<VertexId>>,
    labels: BTreeMap<VertexId, String>,
}

/// Wire form of a digraph: `{"n": .., "arcs": [[t,h],..], "labels": {..}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DigraphDoc {
    pub n: usize,
    pub arcs: Vec<[VertexId; 2]>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<VertexId, String>,
}

impl TryFrom<DigraphDoc> for Digraph {
    type Error = Error;

    fn try_from(doc: DigraphDoc) -> Result<Self> {
        let arcs: Vec<Arc> = doc.arcs.iter().map(|a| (a[0], a[1])).collect();
        let mut d = Digraph::build(doc.n, &arcs)?;
        for (v, label) in doc.labels {
            d.set_label(v, label)?;
        }
        Ok(d)
    }
}

impl From<Digraph> for DigraphDoc {
    fn from(d: Digraph) -> Self {
        DigraphDoc {
            n: d.n,
            arcs: d.arcs.iter().map(|&(t, h)| [t, h]).collect(),
            labels: d.labels,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

impl Digraph {
    /// Builds a digraph, rejecting loops, repeated arcs and out-of-range ids.
    pub fn build(n: usize, arcs: &[Arc]) -> Result<Self> {
        let mut sorted = Vec::with_capacity(arcs.len());
        for &(t, h) in arcs {
            for v in [t, h] {
                if v >= n {
                    return Err(Error::OutOfRange { vertex: v, n });
                }
            }
            if t == h {
                return Err(Error::Loop(t));
            }
            sorted.push((t, h));
        }
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateArc(w[0].0, w[0].1));
        }
        Ok(Self::from_sorted(n, sorted))
    }

    /// Builds from arcs that may repeat; duplicates are merged. Loops and
    /// range errors are still rejected.
    pub fn build_dedup(n: usize, arcs: &[Arc]) -> Result<Self> {
        let set: BTreeSet<Arc> = arcs.iter().copied().collect();
        let v: Vec<Arc> = set.into_iter().collect();
        Self::build(n, &v)
    }

    fn from_sorted(n: usize, arcs: Vec<Arc>) -> Self {
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        for &(t, h) in &arcs {
            out[t].push(h);
            inn[h].push(t);
        }
        for l in &mut inn {
            l.sort_unstable();
        }
        Digraph {
            n,
            arcs,
            out,
            inn,
            labels: BTreeMap::new(),
        }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted(n, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn vertices(&self) -> std::ops::Range<VertexId> {
        0..self.n
    }

    pub fn out_neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.out[v]
    }

    pub fn in_neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.inn[v]
    }

    pub fn neighbors(&self, v: VertexId, dir: Direction) -> &[VertexId] {
        match dir {
            Direction::Forward => &self.out[v],
            Direction::Backward => &self.inn[v],
        }
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.out[v].len()
    }

    pub fn in_degree(&self, v: VertexId) -> usize {
        self.inn[v].len()
    }

    pub fn has_arc(&self, t: VertexId, h: VertexId) -> bool {
        t < self.n && self.out[t].binary_search(&h).is_ok()
    }

    /// Minimum out-degree, `None` on the empty digraph.
    pub fn min_out_degree(&self) -> Option<usize> {
        self.out.iter().map(Vec::len).min()
    }

    pub fn min_in_degree(&self) -> Option<usize> {
        self.inn.iter().map(Vec::len).min()
    }

    /// A vertex of minimum out-degree (lowest id among ties).
    pub fn min_out_degree_vertex(&self) -> Option<(VertexId, usize)> {
        self.vertices()
            .map(|v| (v, self.out_degree(v)))
            .min_by_key(|&(v, d)| (d, v))
    }

    pub fn labels(&self) -> &BTreeMap<VertexId, String> {
        &self.labels
    }

    pub fn label(&self, v: VertexId) -> Option<&str> {
        self.labels.get(&v).map(String::as_str)
    }

    pub fn set_label(&mut self, v: VertexId, label: impl Into<String>) -> Result<()> {
        self.check_vertex(v)?;
        self.labels.insert(v, label.into());
        Ok(())
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                vertex: v,
                n: self.n,
            })
        }
    }

    /// Every arc flipped. Labels are kept.
    pub fn reverse(&self) -> Digraph {
        let arcs: Vec<Arc> = self.arcs.iter().map(|&(t, h)| (h, t)).collect();
        let mut sorted = arcs;
        sorted.sort_unstable();
        let mut d = Self::from_sorted(self.n, sorted);
        d.labels = self.labels.clone();
        d
    }

    /// `D[X]` together with the map from new ids to old ids. The map is
    /// increasing, so relative vertex order is preserved.
    pub fn induced(&self, keep: &[VertexId]) -> Result<(Digraph, Vec<VertexId>)> {
        let mut members: Vec<VertexId> = keep.to_vec();
        members.sort_unstable();
        members.dedup();
        for &v in &members {
            self.check_vertex(v)?;
        }
        let pos = |v: VertexId| members.binary_search(&v).ok();
        let mut arcs = Vec::new();
        for (i, &t) in members.iter().enumerate() {
            for &h in &self.out[t] {
                if let Some(j) = pos(h) {
                    arcs.push((i, j));
                }
            }
        }
        let mut d = Self::from_sorted(members.len(), arcs);
        if !self.labels.is_empty() {
            for (i, &v) in members.iter().enumerate() {
                if let Some(l) = self.labels.get(&v) {
                    d.labels.insert(i, l.clone());
                }
            }
        }
        Ok((d, members))
    }

    /// `D - X`, with the surviving-vertex map.
    pub fn remove_vertices(&self, removed: &[VertexId]) -> Result<(Digraph, Vec<VertexId>)> {
        let mut gone = vec![false; self.n];
        for &v in removed {
            self.check_vertex(v)?;
            gone[v] = true;
        }
        let keep: Vec<VertexId> = self.vertices().filter(|&v| !gone[v]).collect();
        self.induced(&keep)
    }

    /// Disjoint union; returns the union and the id offset of each part.
    pub fn disjoint_union(parts: &[&Digraph]) -> (Digraph, Vec<usize>) {
        let mut offsets = Vec::with_capacity(parts.len());
        let mut n = 0;
        let mut arcs = Vec::new();
        let mut labels = BTreeMap::new();
        for p in parts {
            offsets.push(n);
            arcs.extend(p.arcs.iter().map(|&(t, h)| (t + n, h + n)));
            for (&v, l) in &p.labels {
                labels.insert(v + n, l.clone());
            }
            n += p.n;
        }
        arcs.sort_unstable();
        let mut d = Self::from_sorted(n, arcs);
        d.labels = labels;
        (d, offsets)
    }

    /// Adds arcs (which must be new) and returns the enlarged digraph.
    pub fn with_extra(&self, extra_vertices: usize, extra_arcs: &[Arc]) -> Result<Digraph> {
        let mut arcs = self.arcs.clone();
        arcs.extend_from_slice(extra_arcs);
        let mut d = Digraph::build(self.n + extra_vertices, &arcs)?;
        d.labels = self.labels.clone();
        Ok(d)
    }

    /// Strong components in topological order of the condensation (a
    /// component only has arcs into later components). Each component is
    /// sorted ascending.
    pub fn strong_components(&self) -> Vec<Vec<VertexId>> {
        let comp = self.component_index();
        let count = comp.iter().copied().max().map_or(0, |m| m + 1);
        let mut classes = vec![Vec::new(); count];
        for v in self.vertices() {
            classes[comp[v]].push(v);
        }
        classes
    }

    /// Component id per vertex; ids follow the topological order used by
    /// [`Digraph::strong_components`].
    pub fn component_index(&self) -> Vec<usize> {
        // Iterative Tarjan. Components are emitted sinks first.
        let n = self.n;
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut comp = vec![usize::MAX; n];
        let mut emitted = 0usize;
        let mut next = 0usize;
        let mut call: Vec<(VertexId, usize)> = Vec::new();
        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            call.push((root, 0));
            index[root] = next;
            low[root] = next;
            next += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut pos)) = call.last_mut() {
                if *pos < self.out[v].len() {
                    let w = self.out[v][*pos];
                    *pos += 1;
                    if index[w] == usize::MAX {
                        index[w] = next;
                        low[w] = next;
                        next += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == index[v] {
                        loop {
                            let w = stack.pop().expect("tarjan stack");
                            on_stack[w] = false;
                            comp[w] = emitted;
                            if w == v {
                                break;
                            }
                        }
                        emitted += 1;
                    }
                }
            }
        }
        // Tarjan numbers sinks first; flip to sources first.
        comp.iter().map(|&c| emitted - 1 - c).collect()
    }

    pub fn is_strongly_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let all = |dir| {
            let mut seen = vec![false; self.n];
            seen[0] = true;
            let mut queue = VecDeque::from([0]);
            let mut count = 1;
            while let Some(v) = queue.pop_front() {
                for &w in self.neighbors(v, dir) {
                    if !seen[w] {
                        seen[w] = true;
                        count += 1;
                        queue.push_back(w);
                    }
                }
            }
            count == self.n
        };
        all(Direction::Forward) && all(Direction::Backward)
    }

    /// Vertices reachable from `sources` (or reaching them, for
    /// [`Direction::Backward`]) by walks that never enter `forbidden`.
    /// Sources appear in the result only when a walk re-enters them.
    pub fn reach_set(
        &self,
        sources: &[VertexId],
        forbidden: &[VertexId],
        dir: Direction,
    ) -> Result<BTreeSet<VertexId>> {
        let mut blocked = vec![false; self.n];
        for &v in forbidden {
            self.check_vertex(v)?;
            blocked[v] = true;
        }
        for &s in sources {
            self.check_vertex(s)?;
            if blocked[s] {
                return Err(Error::Precondition(format!(
                    "source {s} is also forbidden"
                )));
            }
        }
        let mut reached = vec![false; self.n];
        let mut queue: VecDeque<VertexId> = sources.iter().copied().collect();
        let mut expanded = vec![false; self.n];
        for &s in sources {
            expanded[s] = true;
        }
        while let Some(v) = queue.pop_front() {
            for &w in self.neighbors(v, dir) {
                if blocked[w] || reached[w] {
                    continue;
                }
                reached[w] = true;
                if !expanded[w] {
                    expanded[w] = true;
                    queue.push_back(w);
                }
            }
        }
        Ok(self.vertices().filter(|&v| reached[v]).collect())
    }

    /// Shortest `from`-`to` dipath whose inner vertices avoid `forbidden`.
    pub fn find_path(
        &self,
        from: VertexId,
        to: VertexId,
        forbidden: &[VertexId],
    ) -> Result<Option<DiPath>> {
        self.check_vertex(from)?;
        self.check_vertex(to)?;
        if from == to {
            return Err(Error::InvalidArgument(
                "path endpoints must differ".into(),
            ));
        }
        let mut blocked = vec![false; self.n];
        for &v in forbidden {
            self.check_vertex(v)?;
            blocked[v] = true;
        }
        if blocked[from] || blocked[to] {
            return Err(Error::Precondition(
                "path endpoints must not be forbidden".into(),
            ));
        }
        let mut pred = vec![usize::MAX; self.n];
        pred[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            for &w in &self.out[v] {
                if blocked[w] || pred[w] != usize::MAX {
                    continue;
                }
                pred[w] = v;
                if w == to {
                    let mut vertices = vec![to];
                    let mut cur = to;
                    while cur != from {
                        cur = pred[cur];
                        vertices.push(cur);
                    }
                    vertices.reverse();
                    return Ok(Some(DiPath { vertices }));
                }
                queue.push_back(w);
            }
        }
        Ok(None)
    }

    /// Graphviz rendering; labels become node labels.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph G {\n");
        for v in self.vertices() {
            match self.labels.get(&v) {
                Some(l) => s.push_str(&format!("  {v} [label=\"{}\"];\n", l.replace('"', "\\\""))),
                None => s.push_str(&format!("  {v};\n")),
            }
        }
        for &(t, h) in &self.arcs {
            s.push_str(&format!("  {t} -> {h};\n"));
        }
        s.push_str("}\n");
        s
    }
}

/// A directed path given by its vertex trace.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DiPath {
    pub vertices: Vec<VertexId>,
}

impl DiPath {
    pub fn new(vertices: Vec<VertexId>) -> Self {
        DiPath { vertices }
    }

    pub fn first(&self) -> Option<VertexId> {
        self.vertices.first().copied()
    }

    pub fn last(&self) -> Option<VertexId> {
        self.vertices.last().copied()
    }

    /// Number of arcs.
    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn position(&self, v: VertexId) -> Option<usize> {
        self.vertices.iter().position(|&x| x == v)
    }

    /// Sub-path between two vertices of the path, in path order.
    pub fn segment(&self, from: VertexId, to: VertexId) -> Option<DiPath> {
        let i = self.position(from)?;
        let j = self.position(to)?;
        (i <= j).then(|| DiPath::new(self.vertices[i..=j].to_vec()))
    }

    pub fn validate(&self, d: &Digraph) -> Result<()> {
        if self.vertices.is_empty() {
            return Err(Error::InvalidArgument("empty path".into()));
        }
        let mut seen = BTreeSet::new();
        for &v in &self.vertices {
            d.check_vertex(v)?;
            if !seen.insert(v) {
                return Err(Error::InvalidArgument(format!(
                    "path repeats vertex {v}"
                )));
            }
        }
        for (t, h) in self.arcs() {
            if !d.has_arc(t, h) {
                return Err(Error::MissingArc(t, h));
            }
        }
        Ok(())
    }

    pub fn reversed(&self) -> DiPath {
        let mut v = self.vertices.clone();
        v.reverse();
        DiPath::new(v)
    }
}

/// A directed cycle given by its cyclic vertex sequence; the closing arc
/// runs from the last vertex back to the first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DiCycle {
    pub vertices: Vec<VertexId>,
}

impl DiCycle {
    pub fn new(vertices: Vec<VertexId>) -> Self {
        DiCycle { vertices }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    /// Rotated so the minimum vertex comes first.
    pub fn canonical(&self) -> DiCycle {
        match self.vertices.iter().enumerate().min_by_key(|&(_, v)| *v) {
            Some((i, _)) => {
                let mut v = self.vertices[i..].to_vec();
                v.extend_from_slice(&self.vertices[..i]);
                DiCycle::new(v)
            }
            None => self.clone(),
        }
    }

    pub fn reversed(&self) -> DiCycle {
        let mut v = self.vertices.clone();
        v.reverse();
        DiCycle::new(v)
    }

    /// The segment of the cycle running from `from` to `to`.
    pub fn segment(&self, from: VertexId, to: VertexId) -> Option<DiPath> {
        let n = self.vertices.len();
        let i = self.vertices.iter().position(|&x| x == from)?;
        self.vertices.iter().position(|&x| x == to)?;
        let mut out = Vec::new();
        let mut j = i;
        loop {
            out.push(self.vertices[j]);
            if self.vertices[j] == to {
                break;
            }
            j = (j + 1) % n;
        }
        Some(DiPath::new(out))
    }

    pub fn validate(&self, d: &Digraph) -> Result<()> {
        if self.vertices.len() < 2 {
            return Err(Error::InvalidArgument(
                "a directed cycle has at least two vertices".into(),
            ));
        }
        let mut seen = BTreeSet::new();
        for &v in &self.vertices {
            d.check_vertex(v)?;
            if !seen.insert(v) {
                return Err(Error::InvalidArgument(format!(
                    "cycle repeats vertex {v}"
                )));
            }
        }
        for (t, h) in self.arcs() {
            if !d.has_arc(t, h) {
                return Err(Error::MissingArc(t, h));
            }
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(VertexId) -> VertexId) -> DiCycle {
        DiCycle::new(self.vertices.iter().map(|&v| f(v)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Digraph {
        Digraph::build(3, &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    #[test]
    fn build_rejects_bad_arcs() {
        assert_eq!(Digraph::build(1, &[(0, 0)]), Err(Error::Loop(0)));
        assert_eq!(
            Digraph::build(2, &[(0, 1), (0, 1)]),
            Err(Error::DuplicateArc(0, 1))
        );
        assert_eq!(
            Digraph::build(2, &[(0, 2)]),
            Err(Error::OutOfRange { vertex: 2, n: 2 })
        );
        let digon = Digraph::build(2, &[(1, 0), (0, 1)]).unwrap();
        assert_eq!(digon.arcs(), &[(0, 1), (1, 0)]);
    }

    #[test]
    fn reverse_triangle_and_digon() {
        let r = triangle().reverse();
        assert_eq!(r.arcs(), &[(0, 2), (1, 0), (2, 1)]);
        let digon = Digraph::build(2, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(digon.reverse(), digon);
    }

    #[test]
    fn induced_subgraphs() {
        let (d, map) = triangle().induced(&[0, 1]).unwrap();
        assert_eq!(d.arcs(), &[(0, 1)]);
        assert_eq!(map, vec![0, 1]);
        let t = triangle();
        assert_eq!(t.induced(&[0, 1, 2]).unwrap().0, t);
        let mut k4 = Vec::new();
        for a in 0..4 {
            for b in 0..4 {
                if a != b {
                    k4.push((a, b));
                }
            }
        }
        let k4 = Digraph::build(4, &k4).unwrap();
        assert_eq!(k4.induced(&[0, 2, 3]).unwrap().0.arc_count(), 6);
        assert!(k4.induced(&[7]).is_err());
    }

    #[test]
    fn strong_components_examples() {
        let path = Digraph::build(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(path.strong_components(), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(triangle().strong_components(), vec![vec![0, 1, 2]]);
        let pendant = Digraph::build(4, &[(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap();
        assert_eq!(pendant.strong_components(), vec![vec![0, 1, 2], vec![3]]);
        // topological order: pendant source feeding into a triangle
        let into = Digraph::build(4, &[(3, 0), (0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(into.strong_components(), vec![vec![3], vec![0, 1, 2]]);
    }

    #[test]
    fn reach_set_examples() {
        let path = Digraph::build(3, &[(0, 1), (1, 2)]).unwrap();
        let r = path.reach_set(&[0], &[], Direction::Forward).unwrap();
        assert_eq!(r.into_iter().collect::<Vec<_>>(), vec![1, 2]);
        let r = path.reach_set(&[0], &[1], Direction::Forward).unwrap();
        assert!(r.is_empty());
        let digon = Digraph::build(2, &[(0, 1), (1, 0)]).unwrap();
        let r = digon.reach_set(&[0], &[], Direction::Forward).unwrap();
        assert_eq!(r.into_iter().collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn find_path_examples() {
        let t = triangle();
        assert_eq!(t.find_path(0, 2, &[]).unwrap().unwrap().vertices, vec![0, 1, 2]);
        assert_eq!(t.find_path(0, 2, &[1]).unwrap(), None);
        assert!(t.find_path(1, 1, &[]).is_err());
    }

    #[test]
    fn cycle_segment_wraps() {
        let c = DiCycle::new(vec![4, 5, 6, 7]);
        assert_eq!(c.segment(6, 5).unwrap().vertices, vec![6, 7, 4, 5]);
        assert_eq!(c.canonical(), c);
        assert_eq!(DiCycle::new(vec![6, 7, 4, 5]).canonical(), c);
    }

    #[test]
    fn json_round_trip() {
        let mut d = triangle();
        d.set_label(1, "mid").unwrap();
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(s, r#"{"n":3,"arcs":[[0,1],[1,2],[2,0]],"labels":{"1":"mid"}}"#);
        let back: Digraph = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
        assert!(serde_json::from_str::<Digraph>(r#"{"n":1,"arcs":[[0,0]]}"#).is_err());
    }
}
