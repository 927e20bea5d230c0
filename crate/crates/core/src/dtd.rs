//! Directed tree decompositions: validation, havens, the pack-or-hit
//! recursion over k-trains, and the bounded-width distinct-length packer.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::digraph::{DiCycle, Digraph, Direction, VertexId};
use crate::error::{Error, Result};
use crate::oracle::{brute_find_train, out_degree_core, SearchCaps, TrainSearch};
use crate::trains::{find_k_train_within, is_train, select_distinct, KTrain};

/// Out-arborescence `parent`, bags `beta` and guards `gamma`. The guard
/// of the tree arc `(parent(c), c)` is stored under the child `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedTreeDecomposition {
    pub parent: Vec<Option<usize>>,
    pub bags: Vec<Vec<VertexId>>,
    pub guards: BTreeMap<usize, Vec<VertexId>>,
}

#[derive(Serialize, Deserialize)]
struct NodeDoc {
    id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parent: Option<usize>,
    bag: Vec<VertexId>,
}

#[derive(Serialize, Deserialize)]
struct GuardDoc {
    arc: [usize; 2],
    set: Vec<VertexId>,
}

#[derive(Serialize, Deserialize)]
struct DecompositionDoc {
    nodes: Vec<NodeDoc>,
    guards: Vec<GuardDoc>,
}

impl Serialize for DirectedTreeDecomposition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let doc = DecompositionDoc {
            nodes: (0..self.len())
                .map(|t| NodeDoc { id: t, parent: self.parent[t], bag: self.bags[t].clone() })
                .collect(),
            guards: self
                .guards
                .iter()
                .map(|(&c, set)| GuardDoc { arc: [self.parent[c].unwrap_or(c), c], set: set.clone() })
                .collect(),
        };
        doc.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DirectedTreeDecomposition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let doc = DecompositionDoc::deserialize(d)?;
        let n = doc.nodes.len();
        let mut parent = vec![None; n];
        let mut bags = vec![Vec::new(); n];
        let mut seen = vec![false; n];
        for node in doc.nodes {
            if node.id >= n || seen[node.id] {
                return Err(D::Error::custom(format!("node ids must be 0..{n} without repeats")));
            }
            seen[node.id] = true;
            parent[node.id] = node.parent;
            bags[node.id] = node.bag;
        }
        let mut guards = BTreeMap::new();
        for g in doc.guards {
            let [p, c] = g.arc;
            if c >= n || parent[c] != Some(p) {
                return Err(D::Error::custom(format!("guard on ({p}, {c}) is not a tree arc")));
            }
            guards.insert(c, g.set);
        }
        Ok(DirectedTreeDecomposition::new(parent, bags, guards))
    }
}

impl DirectedTreeDecomposition {
    /// Normalizes bags and guards to sorted, duplicate-free lists.
    pub fn new(
        parent: Vec<Option<usize>>,
        bags: Vec<Vec<VertexId>>,
        guards: BTreeMap<usize, Vec<VertexId>>,
    ) -> Self {
        let norm = |mut v: Vec<VertexId>| {
            v.sort_unstable();
            v.dedup();
            v
        };
        DirectedTreeDecomposition {
            parent,
            bags: bags.into_iter().map(norm).collect(),
            guards: guards.into_iter().map(|(c, g)| (c, norm(g))).collect(),
        }
    }

    /// One node holding every vertex.
    pub fn trivial(d: &Digraph) -> Self {
        Self::new(vec![None], vec![d.vertices().collect()], BTreeMap::new())
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn root(&self) -> Option<usize> {
        self.parent.iter().position(|p| p.is_none())
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.len()];
        for (c, p) in self.parent.iter().enumerate() {
            if let Some(p) = *p {
                ch[p].push(c);
            }
        }
        ch
    }

    pub fn guard(&self, child: usize) -> &[VertexId] {
        self.guards.get(&child).map_or(&[], |g| g.as_slice())
    }

    /// Depth of every node (root 0); errors when `parent` is not a tree.
    pub fn depths(&self) -> Result<Vec<usize>> {
        let n = self.len();
        let roots = self.parent.iter().filter(|p| p.is_none()).count();
        if n == 0 || roots != 1 {
            return Err(Error::InvalidDecomposition(format!("{roots} roots among {n} nodes")));
        }
        let ch = self.children();
        let root = self.root().expect("one root");
        let mut depth = vec![usize::MAX; n];
        depth[root] = 0;
        let mut stack = vec![root];
        while let Some(t) = stack.pop() {
            for &c in &ch[t] {
                if c >= n || depth[c] != usize::MAX {
                    return Err(Error::InvalidDecomposition(format!("node {c} reached twice")));
                }
                depth[c] = depth[t] + 1;
                stack.push(c);
            }
        }
        if let Some(t) = depth.iter().position(|&d| d == usize::MAX) {
            return Err(Error::InvalidDecomposition(format!("node {t} not below the root")));
        }
        Ok(depth)
    }

    /// `beta(>= t)` for every node.
    pub fn subtree_unions(&self) -> Result<Vec<Vec<VertexId>>> {
        let depth = self.depths()?;
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&t| std::cmp::Reverse(depth[t]));
        let mut acc: Vec<BTreeSet<VertexId>> = self.bags.iter().map(|b| b.iter().copied().collect()).collect();
        for t in order {
            if let Some(p) = self.parent[t] {
                let mine = acc[t].clone();
                acc[p].extend(mine);
            }
        }
        Ok(acc.into_iter().map(|s| s.into_iter().collect()).collect())
    }

    /// `Gamma(t)`: the bag plus the guards of all incident tree arcs.
    pub fn gamma(&self, t: usize) -> Vec<VertexId> {
        let kids: Vec<usize> = (0..self.len()).filter(|&c| self.parent[c] == Some(t)).collect();
        self.gamma_with(t, &kids)
    }

    fn gamma_with(&self, t: usize, kids: &[usize]) -> Vec<VertexId> {
        let mut s: BTreeSet<VertexId> = self.bags[t].iter().copied().collect();
        s.extend(self.guard(t).iter().copied());
        for &c in kids {
            s.extend(self.guard(c).iter().copied());
        }
        s.into_iter().collect()
    }

    pub fn width_unchecked(&self) -> usize {
        let ch = self.children();
        (0..self.len())
            .map(|t| self.gamma_with(t, &ch[t]).len())
            .max()
            .unwrap_or(1)
            .saturating_sub(1)
    }

    /// The decomposition induced on `d[keep]`, in the ids of the induced
    /// digraph (`map[new] = old`). Bags and guards are intersected with
    /// `keep`; empty leaves are pruned and an empty internal node is
    /// merged into its parent when that does not raise the width.
    /// Remaining empty bags are legal for [`validate_dtd_relaxed`].
    pub fn restrict(&self, map: &[VertexId]) -> Result<DirectedTreeDecomposition> {
        let depth = self.depths()?;
        let new_id: BTreeMap<VertexId, VertexId> = map.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let cut = |s: &[VertexId]| -> Vec<VertexId> { s.iter().filter_map(|v| new_id.get(v).copied()).collect() };
        let mut parent = self.parent.clone();
        let mut bags: Vec<Vec<VertexId>> = self.bags.iter().map(|b| cut(b)).collect();
        let mut guards: BTreeMap<usize, Vec<VertexId>> = self.guards.iter().map(|(&c, g)| (c, cut(g))).collect();
        let mut alive = vec![true; self.len()];
        let width_before = self.width_unchecked();
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&t| std::cmp::Reverse(depth[t]));
        for t in order {
            if !bags[t].is_empty() {
                continue;
            }
            let kids: Vec<usize> = (0..parent.len()).filter(|&c| alive[c] && parent[c] == Some(t)).collect();
            match parent[t] {
                Some(p) if kids.is_empty() => {
                    alive[t] = false;
                    parent[t] = None;
                    guards.remove(&t);
                    let _ = p;
                }
                Some(p) => {
                    let mut trial_parent = parent.clone();
                    for &c in &kids {
                        trial_parent[c] = Some(p);
                    }
                    trial_parent[t] = None;
                    let mut trial_guards = guards.clone();
                    trial_guards.remove(&t);
                    let trial = compact(&trial_parent, &bags, &trial_guards, &alive_without(&alive, t));
                    if trial.width_unchecked() <= width_before {
                        parent = trial_parent;
                        guards = trial_guards;
                        alive[t] = false;
                    }
                }
                None if kids.len() == 1 => {
                    // an empty root with one child hands the root role down
                    let c = kids[0];
                    parent[c] = None;
                    guards.remove(&c);
                    alive[t] = false;
                }
                None => {}
            }
        }
        bags.iter_mut().for_each(|b| b.sort_unstable());
        Ok(compact(&parent, &bags, &guards, &alive))
    }
}

fn alive_without(alive: &[bool], t: usize) -> Vec<bool> {
    let mut a = alive.to_vec();
    a[t] = false;
    a
}

/// Drops dead nodes and renumbers the rest.
fn compact(
    parent: &[Option<usize>],
    bags: &[Vec<VertexId>],
    guards: &BTreeMap<usize, Vec<VertexId>>,
    alive: &[bool],
) -> DirectedTreeDecomposition {
    let ids: Vec<usize> = (0..parent.len()).filter(|&t| alive[t]).collect();
    let pos: BTreeMap<usize, usize> = ids.iter().enumerate().map(|(i, &t)| (t, i)).collect();
    DirectedTreeDecomposition::new(
        ids.iter().map(|&t| parent[t].map(|p| pos[&p])).collect(),
        ids.iter().map(|&t| bags[t].clone()).collect(),
        guards
            .iter()
            .filter(|(c, _)| pos.contains_key(c))
            .map(|(c, g)| (pos[c], g.clone()))
            .collect(),
    )
}

/// No directed walk in `d - z` leaves `s` and comes back.
pub fn z_normal(d: &Digraph, s: &[VertexId], z: &[VertexId]) -> Result<bool> {
    let zs: BTreeSet<VertexId> = z.iter().copied().collect();
    if let Some(v) = s.iter().find(|v| zs.contains(v)) {
        return Err(Error::Precondition(format!("vertex {v} is in both S and Z")));
    }
    let inside: BTreeSet<VertexId> = s.iter().copied().collect();
    let fwd = d.reach_set(s, z, Direction::Forward)?;
    let bwd = d.reach_set(s, z, Direction::Backward)?;
    Ok(fwd.iter().all(|v| inside.contains(v) || !bwd.contains(v)))
}

fn validate_inner(d: &Digraph, dec: &DirectedTreeDecomposition, allow_empty: bool) -> Result<usize> {
    let bad = |s: String| Err(Error::InvalidDecomposition(s));
    dec.depths()?;
    if dec.bags.len() != dec.len() {
        return bad("bag count differs from node count".into());
    }
    let mut owner = vec![usize::MAX; d.n()];
    for (t, bag) in dec.bags.iter().enumerate() {
        if bag.is_empty() && !allow_empty {
            return bad(format!("node {t} has an empty bag"));
        }
        for &v in bag {
            d.check_vertex(v)?;
            if owner[v] != usize::MAX {
                return bad(format!("vertex {v} in bags {} and {t}", owner[v]));
            }
            owner[v] = t;
        }
    }
    if let Some(v) = owner.iter().position(|&o| o == usize::MAX) {
        return bad(format!("vertex {v} in no bag"));
    }
    for (&c, g) in &dec.guards {
        if c >= dec.len() || dec.parent[c].is_none() {
            return bad(format!("guard stored on non-arc node {c}"));
        }
        for &v in g {
            d.check_vertex(v)?;
        }
    }
    let below = dec.subtree_unions()?;
    let mut probe = NormalityProbe::new(d.n());
    for c in 0..dec.len() {
        let Some(p) = dec.parent[c] else { continue };
        let g = dec.guard(c);
        let s = &below[c];
        if let Some(v) = g.iter().find(|v| s.binary_search(v).is_ok()) {
            return bad(format!("guard of arc ({p}, {c}) contains {v}, which lies below {c}"));
        }
        if !probe.normal(d, s, g) {
            return bad(format!("subtree of {c} is not normal for the guard of arc ({p}, {c})"));
        }
    }
    Ok(dec.width_unchecked())
}

/// Reusable scratch space for repeated normality tests on one digraph.
struct NormalityProbe {
    stamp: u32,
    mark: Vec<u32>,
    inside: Vec<u32>,
    blocked: Vec<u32>,
    queue: Vec<VertexId>,
}

impl NormalityProbe {
    fn new(n: usize) -> Self {
        NormalityProbe { stamp: 0, mark: vec![0; n], inside: vec![0; n], blocked: vec![0; n], queue: Vec::new() }
    }

    /// Same answer as [`z_normal`] for disjoint `s` and `z`: searches
    /// forward from the out-neighbours of `s` outside `s` and fails as soon
    /// as `s` is re-entered.
    fn normal(&mut self, d: &Digraph, s: &[VertexId], z: &[VertexId]) -> bool {
        self.stamp += 1;
        let st = self.stamp;
        for &v in s {
            self.inside[v] = st;
        }
        for &v in z {
            self.blocked[v] = st;
        }
        self.queue.clear();
        for &v in s {
            for &u in d.out_neighbors(v) {
                if self.inside[u] != st && self.blocked[u] != st && self.mark[u] != st {
                    self.mark[u] = st;
                    self.queue.push(u);
                }
            }
        }
        while let Some(v) = self.queue.pop() {
            for &u in d.out_neighbors(v) {
                if self.inside[u] == st {
                    return false;
                }
                if self.blocked[u] != st && self.mark[u] != st {
                    self.mark[u] = st;
                    self.queue.push(u);
                }
            }
        }
        true
    }
}

/// Checks the partition, the arborescence and guard normality of every
/// tree arc; returns the width.
pub fn validate_dtd(d: &Digraph, dec: &DirectedTreeDecomposition) -> Result<usize> {
    validate_inner(d, dec, false)
}

/// As [`validate_dtd`] but tolerating empty bags, which restriction to an
/// induced subdigraph may leave behind.
pub fn validate_dtd_relaxed(d: &Digraph, dec: &DirectedTreeDecomposition) -> Result<usize> {
    validate_inner(d, dec, true)
}

/// A haven of order `k`: for each `X` with `|X| < k`, a strong component
/// `h(X)` of `d - X`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HavenCertificate {
    pub order: usize,
    pub entries: BTreeMap<Vec<VertexId>, Vec<VertexId>>,
}

impl HavenCertificate {
    /// Tabulates `h` over every set of fewer than `k` vertices.
    pub fn from_fn(d: &Digraph, k: usize, h: impl Fn(&[VertexId]) -> Vec<VertexId>) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for x in small_subsets(d.n(), k)? {
            let mut hx = h(&x);
            hx.sort_unstable();
            entries.insert(x, hx);
        }
        Ok(HavenCertificate { order: k, entries })
    }
}

const HAVEN_LIMIT: u128 = 1_000_000;

fn small_subsets(n: usize, k: usize) -> Result<Vec<Vec<VertexId>>> {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for s in 0..k.min(n + 1) {
        if s > 0 {
            binom = binom * (n - s + 1) as u128 / s as u128;
        }
        total += binom;
        if total > HAVEN_LIMIT {
            return Err(Error::TooLarge(format!("more than {HAVEN_LIMIT} subsets of size < {k}")));
        }
    }
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 1..k {
        let mut next = Vec::new();
        for s in &frontier {
            let start = s.last().map_or(0, |&v: &usize| v + 1);
            for v in start..n {
                let mut t = s.clone();
                t.push(v);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    Ok(out)
}

/// Exhaustive check of both haven axioms. On success the certificate
/// implies directed tree-width at least `order - 1`.
pub fn verify_haven(d: &Digraph, cert: &HavenCertificate) -> Result<bool> {
    let k = cert.order;
    let sets = small_subsets(d.n(), k)?;
    for x in &sets {
        let Some(hx) = cert.entries.get(x) else {
            return Ok(false);
        };
        if hx.is_empty() || hx.iter().any(|v| x.binary_search(v).is_ok() || *v >= d.n()) {
            return Ok(false);
        }
        let (rest, map) = d.remove_vertices(x)?;
        let comp = rest.component_index();
        let local: Vec<usize> = hx.iter().map(|v| map.binary_search(v).expect("kept")).collect();
        let c0 = comp[local[0]];
        let size = comp.iter().filter(|&&c| c == c0).count();
        if local.iter().any(|&v| comp[v] != c0) || size != hx.len() {
            return Ok(false);
        }
        // monotonicity against every one-smaller subset suffices
        for i in 0..x.len() {
            let mut y = x.clone();
            y.remove(i);
            let hy = &cert.entries[&y];
            if hx.iter().any(|v| hy.binary_search(v).is_err()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Answer of a k-train containment oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TrainAnswer {
    Found(KTrain),
    Absent,
    /// The oracle cannot decide.
    Unknown,
}

pub trait TrainOracle {
    fn query(&self, d: &Digraph, k: usize) -> Result<TrainAnswer>;
    /// Whether `Absent` and `Unknown` answers are both exact.
    fn complete(&self) -> bool;
}

/// Exhaustive spine search, exact within its caps.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExactOracle {
    pub caps: SearchCaps,
}

impl TrainOracle for ExactOracle {
    fn query(&self, d: &Digraph, k: usize) -> Result<TrainAnswer> {
        match brute_find_train(d, k, self.caps) {
            TrainSearch::Found(t) => Ok(TrainAnswer::Found(t)),
            TrainSearch::Absent => Ok(TrainAnswer::Absent),
            TrainSearch::Inconclusive => Err(Error::Oracle(format!(
                "exhaustive search exceeded its caps on {} vertices",
                d.n()
            ))),
        }
    }

    fn complete(&self) -> bool {
        true
    }
}

/// Sound only: a non-empty out-degree-`k` core yields a train; an empty
/// core proves nothing.
#[derive(Clone, Copy, Debug, Default)]
pub struct PeelingOracle;

impl TrainOracle for PeelingOracle {
    fn query(&self, d: &Digraph, k: usize) -> Result<TrainAnswer> {
        let core = out_degree_core(d, k);
        if core.is_empty() {
            return Ok(TrainAnswer::Unknown);
        }
        Ok(TrainAnswer::Found(find_k_train_within(d, k, &core)?))
    }

    fn complete(&self) -> bool {
        false
    }
}

fn found(oracle: &dyn TrainOracle, d: &Digraph, k: usize) -> Result<Option<KTrain>> {
    Ok(match oracle.query(d, k)? {
        TrainAnswer::Found(t) => Some(t),
        TrainAnswer::Absent | TrainAnswer::Unknown => None,
    })
}

/// Deepest node whose subtree union contains a k-train according to the
/// oracle (ties to the lowest node id), with that train in `d`'s ids.
pub fn deepest_bag_subtree_with_train(
    d: &Digraph,
    dec: &DirectedTreeDecomposition,
    k: usize,
    oracle: &dyn TrainOracle,
) -> Result<Option<(usize, KTrain)>> {
    let depth = dec.depths()?;
    let below = dec.subtree_unions()?;
    let mut order: Vec<usize> = (0..dec.len()).collect();
    order.sort_by_key(|&t| (std::cmp::Reverse(depth[t]), t));
    for t in order {
        if below[t].is_empty() {
            continue;
        }
        let (sub, map) = d.induced(&below[t])?;
        if let Some(tr) = found(oracle, &sub, k)? {
            return Ok(Some((t, tr.map(|v| map[v]))));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "lowercase")]
pub enum PackOrHit {
    Pack { trains: Vec<KTrain> },
    Hit { set: Vec<VertexId> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackOrHitResult {
    #[serde(flatten)]
    pub outcome: PackOrHit,
    /// False when a sound-only oracle was used, so a hit set is not
    /// guaranteed to meet every k-train.
    pub exact: bool,
}

/// Either `l` disjoint k-trains or a set of at most `(width + 1)(l - 1)`
/// vertices meeting every k-train. Recurses on `d - beta(>= t0)` for the
/// deepest node `t0` whose subtree holds a train, adding `Gamma(t0)` to
/// the hitting set on the way back.
pub fn ep_pack_or_hit(
    d: &Digraph,
    dec: &DirectedTreeDecomposition,
    k: usize,
    l: usize,
    oracle: &dyn TrainOracle,
) -> Result<PackOrHitResult> {
    if k == 0 || l == 0 {
        return Err(Error::InvalidArgument("k and l must be >= 1".into()));
    }
    let width = validate_dtd_relaxed(d, dec)?;
    let outcome = pack_or_hit_rec(d, dec, k, l, oracle)?;
    match &outcome {
        PackOrHit::Pack { trains } => {
            let mut seen = BTreeSet::new();
            for t in trains {
                let v = is_train(d, t);
                if !v.ok {
                    return Err(Error::Defect(format!("packed train invalid: {:?}", v.violation)));
                }
                for &x in &t.spine.vertices {
                    if !seen.insert(x) {
                        return Err(Error::Defect(format!("packed trains meet at {x}")));
                    }
                }
            }
        }
        PackOrHit::Hit { set } => {
            if set.len() > (width + 1) * (l - 1) {
                return Err(Error::Defect(format!(
                    "hitting set of size {} exceeds {}",
                    set.len(),
                    (width + 1) * (l - 1)
                )));
            }
            if oracle.complete() {
                let (rest, _) = d.remove_vertices(set)?;
                if found(oracle, &rest, k)?.is_some() {
                    return Err(Error::Defect("hitting set misses a train".into()));
                }
            }
        }
    }
    Ok(PackOrHitResult { outcome, exact: oracle.complete() })
}

fn pack_or_hit_rec(
    d: &Digraph,
    dec: &DirectedTreeDecomposition,
    k: usize,
    l: usize,
    oracle: &dyn TrainOracle,
) -> Result<PackOrHit> {
    let Some((t0, train)) = deepest_bag_subtree_with_train(d, dec, k, oracle)? else {
        return Ok(PackOrHit::Hit { set: Vec::new() });
    };
    if l == 1 {
        return Ok(PackOrHit::Pack { trains: vec![train] });
    }
    let below = dec.subtree_unions()?;
    let gamma = dec.gamma(t0);
    let (rest, map) = d.remove_vertices(&below[t0])?;
    let sub_dec = dec.restrict(&map)?;
    if rest.n() == 0 {
        return Ok(PackOrHit::Hit { set: gamma });
    }
    match pack_or_hit_rec(&rest, &sub_dec, k, l - 1, oracle)? {
        PackOrHit::Pack { trains } => {
            let mut all: Vec<KTrain> = trains.into_iter().map(|t| t.map(|v| map[v])).collect();
            all.push(train);
            Ok(PackOrHit::Pack { trains: all })
        }
        PackOrHit::Hit { set } => {
            let mut x: BTreeSet<VertexId> = set.into_iter().map(|v| map[v]).collect();
            x.extend(gamma);
            Ok(PackOrHit::Hit { set: x.into_iter().collect() })
        }
    }
}

/// `k` disjoint cycles of distinct lengths in a digraph of width `d` with
/// minimum out-degree above `(d + 2)(k - 1)`.
pub fn bounded_width_pack(d: &Digraph, dec: &DirectedTreeDecomposition, k: usize) -> Result<Vec<DiCycle>> {
    let width = validate_dtd(d, dec)?;
    let need = (width + 2) * (k.max(1) - 1);
    match d.min_out_degree_vertex() {
        None => return Err(Error::Precondition("empty digraph".into())),
        Some((v, deg)) if deg <= need => {
            return Err(Error::Precondition(format!(
                "vertex {v} has out-degree {deg}, not above (width + 2)(k - 1) = {need}"
            )))
        }
        _ => {}
    }
    let res = ep_pack_or_hit(d, dec, k, k, &PeelingOracle)?;
    match res.outcome {
        PackOrHit::Pack { trains } => select_distinct(d, &trains),
        PackOrHit::Hit { set } => Err(Error::Defect(format!(
            "hit branch reached with {} vertices despite the degree bound",
            set.len()
        ))),
    }
}
