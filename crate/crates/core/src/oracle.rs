//! Brute-force ground truth: cycle enumeration, vertex connectivity,
//! packing verification and exhaustive k-train search.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::digraph::{Arc, DiCycle, DiPath, Digraph, VertexId};
use crate::error::{Error, Result};
use crate::gen::{EqualLengthWall, LayeredDigraph};
use crate::minors::ArcWeighting;
use crate::trains::KTrain;
use crate::verdict::Verdict;

/// Result of a bounded enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Enumeration<T> {
    Complete(Vec<T>),
    Overflow,
}

impl<T> Enumeration<T> {
    pub fn complete(self) -> Option<Vec<T>> {
        match self {
            Enumeration::Complete(v) => Some(v),
            Enumeration::Overflow => None,
        }
    }
}

/// All simple directed cycles (Johnson's algorithm), each rooted at its
/// minimum vertex, roots ascending and extensions in neighbour order.
pub fn enum_cycles(d: &Digraph, limit: usize) -> Enumeration<DiCycle> {
    let mut out = Vec::new();
    for s in d.vertices() {
        let keep: Vec<VertexId> = (s..d.n()).collect();
        let (sub, map) = d.induced(&keep).expect("in range");
        let comp = sub.component_index();
        let local: Vec<VertexId> = sub.vertices().filter(|&v| comp[v] == comp[0]).collect();
        if local.len() < 2 {
            continue;
        }
        let (scc, smap) = sub.induced(&local).expect("in range");
        // vertex 0 of `scc` is `s`
        let mut st = Johnson {
            d: &scc,
            blocked: vec![false; scc.n()],
            bset: vec![BTreeSet::new(); scc.n()],
            stack: Vec::new(),
            found: Vec::new(),
            limit: limit.saturating_sub(out.len()),
            overflow: false,
        };
        st.circuit(0);
        if st.overflow {
            return Enumeration::Overflow;
        }
        for c in st.found {
            out.push(DiCycle::new(c.iter().map(|&v| map[smap[v]]).collect()));
        }
    }
    Enumeration::Complete(out)
}

struct Johnson<'a> {
    d: &'a Digraph,
    blocked: Vec<bool>,
    bset: Vec<BTreeSet<VertexId>>,
    stack: Vec<VertexId>,
    found: Vec<Vec<VertexId>>,
    limit: usize,
    overflow: bool,
}

impl Johnson<'_> {
    fn unblock(&mut self, u: VertexId) {
        let mut work = vec![u];
        while let Some(x) = work.pop() {
            if !self.blocked[x] {
                continue;
            }
            self.blocked[x] = false;
            let waiting = std::mem::take(&mut self.bset[x]);
            work.extend(waiting);
        }
    }

    fn circuit(&mut self, v: VertexId) -> bool {
        if self.overflow {
            return false;
        }
        let mut closed = false;
        self.stack.push(v);
        self.blocked[v] = true;
        for &w in self.d.out_neighbors(v) {
            if w == 0 {
                if self.found.len() == self.limit {
                    self.overflow = true;
                    return false;
                }
                self.found.push(self.stack.clone());
                closed = true;
            } else if !self.blocked[w] && self.circuit(w) {
                closed = true;
            }
            if self.overflow {
                return false;
            }
        }
        if closed {
            self.unblock(v);
        } else {
            for &w in self.d.out_neighbors(v) {
                self.bset[w].insert(v);
            }
        }
        self.stack.pop();
        closed
    }
}

/// Largest `c <= upto` such that `d` has more than `c` vertices and stays
/// strongly connected after deleting any fewer than `c` vertices, via
/// vertex-disjoint path counts between every non-adjacent ordered pair.
pub fn vertex_connectivity(d: &Digraph, upto: usize) -> usize {
    let n = d.n();
    if n == 0 {
        return 0;
    }
    let mut best = upto.min(n - 1);
    for u in d.vertices() {
        for v in d.vertices() {
            if best == 0 {
                return 0;
            }
            if u == v || d.has_arc(u, v) {
                continue;
            }
            best = best.min(disjoint_paths(d, u, v, best));
        }
    }
    best
}

/// Number of internally vertex-disjoint `s`-`t` paths, capped at `cap`.
/// Unit-capacity max flow on the split digraph (`x_in = 2x`, `x_out = 2x+1`).
fn disjoint_paths(d: &Digraph, s: VertexId, t: VertexId, cap: usize) -> usize {
    let n2 = 2 * d.n();
    let mut head: Vec<usize> = Vec::new();
    let mut capv: Vec<i32> = Vec::new();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n2];
    let mut add = |a: usize, b: usize, c: i32, head: &mut Vec<usize>, capv: &mut Vec<i32>| {
        adj[a].push(head.len());
        head.push(b);
        capv.push(c);
        adj[b].push(head.len());
        head.push(a);
        capv.push(0);
    };
    let big = i32::MAX / 4;
    for x in d.vertices() {
        let c = if x == s || x == t { big } else { 1 };
        add(2 * x, 2 * x + 1, c, &mut head, &mut capv);
    }
    for &(a, b) in d.arcs() {
        add(2 * a + 1, 2 * b, 1, &mut head, &mut capv);
    }
    let (src, dst) = (2 * s + 1, 2 * t);
    let mut flow = 0;
    while flow < cap {
        let mut pred = vec![usize::MAX; n2];
        let mut seen = vec![false; n2];
        seen[src] = true;
        let mut q = VecDeque::from([src]);
        while let Some(x) = q.pop_front() {
            if x == dst {
                break;
            }
            for &e in &adj[x] {
                let y = head[e];
                if capv[e] > 0 && !seen[y] {
                    seen[y] = true;
                    pred[y] = e;
                    q.push_back(y);
                }
            }
        }
        if !seen[dst] {
            break;
        }
        let mut y = dst;
        while y != src {
            let e = pred[y];
            capv[e] -= 1;
            capv[e ^ 1] += 1;
            y = head[e ^ 1];
        }
        flow += 1;
    }
    flow
}

/// Subset-deletion cross-check of [`vertex_connectivity`] for tiny inputs.
pub fn vertex_connectivity_brute(d: &Digraph, upto: usize) -> Result<usize> {
    if d.n() > 12 {
        return Err(Error::TooLarge(format!("{} vertices", d.n())));
    }
    let n = d.n();
    let mut c = 0;
    while c < upto && n >= c + 2 {
        // c + 1 holds iff every deletion of exactly c vertices leaves a
        // strongly connected digraph (smaller deletions were checked before)
        let mut ok = true;
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != c {
                continue;
            }
            let gone: Vec<VertexId> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            let (rest, _) = d.remove_vertices(&gone)?;
            if !rest.is_strongly_connected() {
                ok = false;
                break;
            }
        }
        if !ok {
            break;
        }
        c += 1;
    }
    Ok(c)
}

/// Strong connectivity after every single-vertex deletion.
pub fn strong_after_single_deletions(d: &Digraph) -> Verdict {
    if !d.is_strongly_connected() {
        return Verdict::fail("not strongly connected");
    }
    for v in d.vertices() {
        let (rest, _) = d.remove_vertices(&[v]).expect("in range");
        if !rest.is_strongly_connected() {
            return Verdict::fail(format!("deleting {v} breaks strong connectivity"));
        }
    }
    Verdict::pass()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PackingClaim {
    DistinctLengths,
    DistinctWeights { weights: ArcWeighting },
    /// Pairwise arc-disjoint with pairwise distinct lengths.
    EqualLengthForbidden,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CyclePacking {
    pub cycles: Vec<DiCycle>,
    pub claim: PackingClaim,
}

/// Validates each cycle, disjointness and the claim.
pub fn verify_packing(d: &Digraph, p: &CyclePacking) -> Verdict {
    for (i, c) in p.cycles.iter().enumerate() {
        if let Err(e) = c.validate(d) {
            return Verdict::fail(format!("cycle {i}: {e}"));
        }
    }
    if p.claim == PackingClaim::EqualLengthForbidden {
        let mut arcs = BTreeSet::new();
        for c in &p.cycles {
            for a in c.arcs() {
                if !arcs.insert(a) {
                    return Verdict::fail(format!("arc overlap at ({}, {})", a.0, a.1));
                }
            }
        }
    } else {
        let mut seen = BTreeSet::new();
        for c in &p.cycles {
            for &v in &c.vertices {
                if !seen.insert(v) {
                    return Verdict::fail(format!("overlap at {v}"));
                }
            }
        }
    }
    match &p.claim {
        PackingClaim::DistinctLengths | PackingClaim::EqualLengthForbidden => {
            let mut lens = BTreeSet::new();
            for c in &p.cycles {
                if !lens.insert(c.len()) {
                    return Verdict::fail(format!("length collision at {}", c.len()));
                }
            }
        }
        PackingClaim::DistinctWeights { weights } => {
            let mut ws = BTreeSet::new();
            for c in &p.cycles {
                match weights.cycle_weight(c) {
                    Ok(w) => {
                        if !ws.insert(w.clone()) {
                            return Verdict::fail(format!("weight collision at {w}"));
                        }
                    }
                    Err(e) => return Verdict::fail(e.to_string()),
                }
            }
        }
    }
    Verdict::pass()
}

/// Outcome of the search for two arc-disjoint cycles of equal length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "lowercase")]
pub enum EqualLengthAudit {
    Verified { cycles: usize },
    Refuted { first: DiCycle, second: DiCycle },
    Inconclusive { reason: String },
}

/// Enumerates up to `budget` cycles and tests every equal-length pair for
/// arc-disjointness.
pub fn no_equal_length_arcdisjoint(d: &Digraph, budget: usize) -> EqualLengthAudit {
    let cycles = match enum_cycles(d, budget) {
        Enumeration::Complete(c) => c,
        Enumeration::Overflow => {
            return EqualLengthAudit::Inconclusive {
                reason: format!("more than {budget} cycles"),
            }
        }
    };
    let mut by_len: BTreeMap<usize, Vec<(usize, BTreeSet<Arc>)>> = BTreeMap::new();
    for (i, c) in cycles.iter().enumerate() {
        by_len.entry(c.len()).or_default().push((i, c.arcs().collect()));
    }
    for class in by_len.values() {
        for a in 0..class.len() {
            for b in a + 1..class.len() {
                if class[a].1.is_disjoint(&class[b].1) {
                    return EqualLengthAudit::Refuted {
                        first: cycles[class[a].0].clone(),
                        second: cycles[class[b].0].clone(),
                    };
                }
            }
        }
    }
    EqualLengthAudit::Verified {
        cycles: cycles.len(),
    }
}

/// Samples a cycle by walking along uniformly random out-arcs from a random
/// start until a vertex repeats, returning the closed loop.
pub fn sample_cycle<R: Rng>(d: &Digraph, rng: &mut R) -> Option<DiCycle> {
    if d.n() == 0 {
        return None;
    }
    let mut pos: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut walk = Vec::new();
    let mut v = rng.gen_range(0..d.n());
    loop {
        if let Some(&p) = pos.get(&v) {
            return Some(DiCycle::new(walk[p..].to_vec()));
        }
        pos.insert(v, walk.len());
        walk.push(v);
        let outs = d.out_neighbors(v);
        if outs.is_empty() {
            return None;
        }
        v = outs[rng.gen_range(0..outs.len())];
    }
}

/// Structural audit of a layered digraph: the forward-arc table checks out
/// and every sampled cycle has length equal to the summed lengths of the
/// forward arcs it uses.
pub fn layered_structure_check<R: Rng>(ld: &LayeredDigraph, samples: usize, rng: &mut R) -> Verdict {
    if let Err(e) = ld.table.check() {
        return Verdict::fail(e.to_string());
    }
    let lengths: BTreeMap<Arc, BigUint> = ld
        .forward
        .iter()
        .zip(ld.table.arcs.iter())
        .map(|(&a, f)| (a, f.length.clone()))
        .collect();
    let mut got = 0;
    let mut attempts = 0;
    while got < samples {
        attempts += 1;
        if attempts > samples * 100 + 100 {
            return Verdict::fail("could not sample enough cycles");
        }
        let Some(c) = sample_cycle(&ld.digraph, rng) else {
            continue;
        };
        if c.validate(&ld.digraph).is_err() {
            return Verdict::fail("sampled walk is not a cycle");
        }
        let mut sum = BigUint::default();
        for a in c.arcs() {
            if let Some(l) = lengths.get(&a) {
                sum += l;
            } else if ld.layer_of(a.0) != ld.layer_of(a.1) + 1 {
                return Verdict::fail(format!("arc ({}, {}) is neither forward nor descending", a.0, a.1));
            }
        }
        if sum != BigUint::from(c.len()) {
            return Verdict::fail(format!("cycle of length {} has forward sum {sum}", c.len()));
        }
        got += 1;
    }
    Verdict::pass()
}

/// Every cycle through a wrap arc has the target length: removing the
/// wrap paths leaves an acyclic digraph, and from the head to the tail of
/// each wrap path the shortest and the longest remaining path both have
/// length `L - |wrap path|`. A simple cycle on the cylinder winds at most
/// once, so it uses exactly one wrap path.
pub fn check_equal_length_wall(e: &EqualLengthWall) -> Verdict {
    let w = &e.wall;
    let wraps: Vec<&DiPath> = w
        .subdiv
        .iter()
        .filter(|s| e.wrap_arcs.contains(&(s.from, s.to)))
        .map(|s| &s.path)
        .collect();
    let cut: BTreeSet<Arc> = wraps.iter().flat_map(|p| p.arcs()).collect();
    let keep: Vec<Arc> = w.host.arcs().iter().copied().filter(|a| !cut.contains(a)).collect();
    let dag = Digraph::build(w.host.n(), &keep).expect("subset of a digraph");
    let comps = dag.strong_components();
    if comps.iter().any(|c| c.len() > 1) {
        return Verdict::fail("wall minus wrap paths has a cycle");
    }
    // strong_components lists singletons in topological order
    let order: Vec<VertexId> = comps.into_iter().map(|c| c[0]).collect();
    for p in wraps {
        let (u, v) = (p.first().expect("path"), p.last().expect("path"));
        let need = match e.target_length.checked_sub(p.len()) {
            Some(x) => x,
            None => return Verdict::fail("wrap path longer than target"),
        };
        let mut lo = vec![usize::MAX; dag.n()];
        let mut hi = vec![0usize; dag.n()];
        lo[v] = 0;
        let mut reach = vec![false; dag.n()];
        reach[v] = true;
        for &x in &order {
            if !reach[x] {
                continue;
            }
            for &y in dag.out_neighbors(x) {
                reach[y] = true;
                lo[y] = lo[y].min(lo[x] + 1);
                hi[y] = hi[y].max(hi[x] + 1);
            }
        }
        if !reach[u] {
            return Verdict::fail(format!("wrap path into {v} cannot be closed"));
        }
        if lo[u] != need || hi[u] != need {
            return Verdict::fail(format!(
                "closing paths {v} -> {u} range over [{}, {}], expected {need}",
                lo[u], hi[u]
            ));
        }
    }
    Verdict::pass()
}

/// Caps for the exhaustive k-train search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchCaps {
    pub max_vertices: usize,
    pub max_steps: u64,
}

impl Default for SearchCaps {
    fn default() -> Self {
        SearchCaps {
            max_vertices: 14,
            max_steps: 10_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TrainSearch {
    Found(KTrain),
    Absent,
    Inconclusive,
}

/// Exhaustive search over spines inside each strong component: a k-train
/// exists iff some path `u_0 .. u_l` has its end adjacent to `u_0` and to
/// at least `k - 1` further earlier path vertices.
pub fn brute_find_train(d: &Digraph, k: usize, caps: SearchCaps) -> TrainSearch {
    if k == 0 {
        return TrainSearch::Absent;
    }
    if d.n() > caps.max_vertices {
        return TrainSearch::Inconclusive;
    }
    let comp = d.component_index();
    let mut steps = 0u64;
    for s in d.vertices() {
        let mut on = vec![false; d.n()];
        let mut path = vec![s];
        on[s] = true;
        match extend(d, k, &comp, &mut path, &mut on, &mut steps, caps.max_steps) {
            Some(Some(t)) => return TrainSearch::Found(t),
            Some(None) => {}
            None => return TrainSearch::Inconclusive,
        }
    }
    TrainSearch::Absent
}

/// `None` on step overflow, `Some(None)` when no train extends `path`.
fn extend(
    d: &Digraph,
    k: usize,
    comp: &[usize],
    path: &mut Vec<VertexId>,
    on: &mut [bool],
    steps: &mut u64,
    max: u64,
) -> Option<Option<KTrain>> {
    *steps += 1;
    if *steps > max {
        return None;
    }
    let s = path[0];
    let last = *path.last().expect("non-empty");
    if path.len() >= 2 && d.has_arc(last, s) {
        let pos: Vec<usize> = (1..path.len() - 1)
            .filter(|&i| d.has_arc(last, path[i]))
            .collect();
        if pos.len() + 1 >= k {
            let mut back = vec![0];
            back.extend_from_slice(&pos[..k - 1]);
            return Some(Some(KTrain {
                spine: DiPath::new(path.clone()),
                back,
                reversed: false,
            }));
        }
    }
    for &w in d.out_neighbors(last) {
        if on[w] || comp[w] != comp[s] {
            continue;
        }
        on[w] = true;
        path.push(w);
        let r = extend(d, k, comp, path, on, steps, max);
        path.pop();
        on[w] = false;
        match r {
            Some(None) => {}
            other => return other,
        }
    }
    Some(None)
}

pub fn brute_train_exists(d: &Digraph, k: usize, caps: SearchCaps) -> Option<bool> {
    match brute_find_train(d, k, caps) {
        TrainSearch::Found(_) => Some(true),
        TrainSearch::Absent => Some(false),
        TrainSearch::Inconclusive => None,
    }
}

/// Vertices surviving repeated deletion of vertices with out-degree below
/// `k`; non-empty means a k-train exists.
pub fn out_degree_core(d: &Digraph, k: usize) -> Vec<VertexId> {
    let mut alive = vec![true; d.n()];
    let mut deg: Vec<usize> = d.vertices().map(|v| d.out_degree(v)).collect();
    let mut queue: Vec<VertexId> = d.vertices().filter(|&v| deg[v] < k).collect();
    for &v in &queue {
        alive[v] = false;
    }
    while let Some(v) = queue.pop() {
        for &u in d.in_neighbors(v) {
            if alive[u] {
                deg[u] -= 1;
                if deg[u] < k {
                    alive[u] = false;
                    queue.push(u);
                }
            }
        }
    }
    d.vertices().filter(|&v| alive[v]).collect()
}
