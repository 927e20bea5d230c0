//! Acceptance criteria 1-10. Pipelines come from the library; every claim
//! about their output is rechecked here with naive, independent code.
//! Each test prints one `criterion N: PASS|FAIL` line.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::io::Write;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cyclepack::dtd::{bounded_width_pack, ep_pack_or_hit, DirectedTreeDecomposition, ExactOracle, PackOrHit};
use cyclepack::flatwall::{nonstrong_case_pack, strong_case_pack, weak_flat_check, FlatContext};
use cyclepack::gen::{gen_complete, gen_d, gen_equal_length_wall, gen_f};
use cyclepack::minors::{
    complete_base_cycles, contract_with, expand_model, lift_pack, random_weighting, ArcWeighting, ExpansionMix, MinorOp,
};
use cyclepack::oracle::{brute_train_exists, SearchCaps};
use cyclepack::selftest::{bounded_width_fixture, ep_corpus, flat_fixtures};
use cyclepack::trains::{find_k_train, KTrain};
use cyclepack::{DiCycle, Digraph, VertexId};

/// Writes straight to the stderr handle so the line shows up even when the
/// harness captures test output.
fn report(id: usize, start: Instant, res: Result<String, String>) {
    let secs = start.elapsed().as_secs_f64();
    let line = match &res {
        Ok(detail) => format!("criterion {id}: PASS ({detail}; {secs:.1} s)\n"),
        Err(why) => format!("criterion {id}: FAIL ({why}; {secs:.1} s)\n"),
    };
    let _ = std::io::stderr().write_all(line.as_bytes());
    if let Err(why) = res {
        panic!("criterion {id} failed: {why}");
    }
}

// ---- naive oracles ----

/// Every simple cycle, found by DFS from each start through larger ids.
fn naive_cycles(d: &Digraph, limit: usize) -> Option<Vec<Vec<VertexId>>> {
    fn dfs(
        d: &Digraph,
        s: VertexId,
        path: &mut Vec<VertexId>,
        on: &mut [bool],
        out: &mut Vec<Vec<VertexId>>,
        limit: usize,
    ) -> bool {
        let v = *path.last().unwrap();
        for &u in d.out_neighbors(v) {
            if u == s {
                out.push(path.clone());
                if out.len() > limit {
                    return false;
                }
            } else if u > s && !on[u] {
                on[u] = true;
                path.push(u);
                let ok = dfs(d, s, path, on, out, limit);
                path.pop();
                on[u] = false;
                if !ok {
                    return false;
                }
            }
        }
        true
    }
    let mut out = Vec::new();
    let mut on = vec![false; d.n()];
    for s in d.vertices() {
        on[s] = true;
        if !dfs(d, s, &mut vec![s], &mut on, &mut out, limit) {
            return None;
        }
        on[s] = false;
    }
    Some(out)
}

fn cycle_ok(d: &Digraph, c: &[VertexId]) -> bool {
    let distinct: BTreeSet<_> = c.iter().collect();
    c.len() >= 2 && distinct.len() == c.len() && (0..c.len()).all(|i| d.has_arc(c[i], c[(i + 1) % c.len()]))
}

/// Valid, pairwise vertex-disjoint cycles of pairwise distinct lengths.
fn naive_distinct_packing(d: &Digraph, cycles: &[DiCycle], count: usize) -> Result<(), String> {
    if cycles.len() != count {
        return Err(format!("{} cycles instead of {count}", cycles.len()));
    }
    let mut seen = BTreeSet::new();
    let mut lens = BTreeSet::new();
    for c in cycles {
        if !cycle_ok(d, &c.vertices) {
            return Err(format!("{:?} is not a cycle", c.vertices));
        }
        if !c.vertices.iter().all(|v| seen.insert(*v)) {
            return Err("cycles overlap".into());
        }
        if !lens.insert(c.vertices.len()) {
            return Err(format!("length {} repeats", c.vertices.len()));
        }
    }
    Ok(())
}

fn weight(w: &ArcWeighting, c: &[VertexId]) -> Option<BigRational> {
    let mut s = BigRational::zero();
    for i in 0..c.len() {
        s += w.get((c[i], c[(i + 1) % c.len()]))?.clone();
    }
    Some(s)
}

fn reach(d: &Digraph, from: VertexId, blocked: &[bool], forward: bool) -> Vec<bool> {
    let mut seen = vec![false; d.n()];
    seen[from] = true;
    let mut q = VecDeque::from([from]);
    while let Some(v) = q.pop_front() {
        let nb = if forward { d.out_neighbors(v) } else { d.in_neighbors(v) };
        for &u in nb {
            if !blocked[u] && !seen[u] {
                seen[u] = true;
                q.push_back(u);
            }
        }
    }
    seen
}

fn strongly_connected_without(d: &Digraph, blocked: &[bool]) -> bool {
    let Some(s) = d.vertices().find(|&v| !blocked[v]) else { return true };
    let f = reach(d, s, blocked, true);
    let b = reach(d, s, blocked, false);
    d.vertices().all(|v| blocked[v] || (f[v] && b[v]))
}

/// Checks the decomposition directly from the definition and returns its
/// width.
fn naive_width(d: &Digraph, dec: &DirectedTreeDecomposition) -> Result<usize, String> {
    let mut owner = vec![usize::MAX; d.n()];
    for (t, bag) in dec.bags.iter().enumerate() {
        for &v in bag {
            if v >= d.n() || owner[v] != usize::MAX {
                return Err(format!("vertex {v} is not in exactly one bag"));
            }
            owner[v] = t;
        }
    }
    if owner.contains(&usize::MAX) {
        return Err("some vertex is in no bag".into());
    }
    let below = |c: usize| -> Vec<bool> {
        let mut inside = vec![false; d.n()];
        for v in d.vertices() {
            let mut t = Some(owner[v]);
            while let Some(x) = t {
                if x == c {
                    inside[v] = true;
                    break;
                }
                t = dec.parent[x];
            }
        }
        inside
    };
    for c in 0..dec.bags.len() {
        let Some(_) = dec.parent[c] else { continue };
        let s = below(c);
        let mut z = vec![false; d.n()];
        for &v in dec.guards.get(&c).map(Vec::as_slice).unwrap_or(&[]) {
            z[v] = true;
        }
        // outside vertices reachable from S in D - Z, then any arc back
        let mut seen = vec![false; d.n()];
        let mut q = VecDeque::new();
        for v in d.vertices().filter(|&v| s[v] && !z[v]) {
            for &u in d.out_neighbors(v) {
                if !s[u] && !z[u] && !seen[u] {
                    seen[u] = true;
                    q.push_back(u);
                }
            }
        }
        while let Some(v) = q.pop_front() {
            for &u in d.out_neighbors(v) {
                if z[u] {
                    continue;
                }
                if s[u] {
                    return Err(format!("a walk leaves and re-enters the subtree of node {c}"));
                }
                if !seen[u] {
                    seen[u] = true;
                    q.push_back(u);
                }
            }
        }
    }
    let mut width = 0;
    for t in 0..dec.bags.len() {
        let mut g: BTreeSet<VertexId> = dec.bags[t].iter().copied().collect();
        for (c, p) in dec.parent.iter().enumerate() {
            if c == t || *p == Some(t) {
                g.extend(dec.guards.get(&c).into_iter().flatten().copied());
            }
        }
        width = width.max(g.len().saturating_sub(1));
    }
    Ok(width)
}

fn naive_train(d: &Digraph, t: &KTrain, k: usize) -> Result<(), String> {
    let sp = &t.spine.vertices;
    let has = |a: VertexId, b: VertexId| if t.reversed { d.has_arc(b, a) } else { d.has_arc(a, b) };
    if t.back.len() != k || t.back.first() != Some(&0) || t.back.windows(2).any(|w| w[0] >= w[1]) {
        return Err(format!("back positions {:?}", t.back));
    }
    if sp.iter().collect::<BTreeSet<_>>().len() != sp.len() || !sp.windows(2).all(|w| has(w[0], w[1])) {
        return Err("spine is not a path".into());
    }
    let end = *sp.last().unwrap();
    if !t.back.iter().all(|&p| p + 1 < sp.len() && has(end, sp[p])) {
        return Err("missing back arc".into());
    }
    Ok(())
}

// ---- criteria ----

#[test]
fn criterion_01_equal_length_wall() {
    let start = Instant::now();
    let res = (|| {
        let w2 = gen_equal_length_wall(2).map_err(|e| e.to_string())?;
        let cycles = naive_cycles(&w2.wall.host, 1_000_000).ok_or("too many cycles")?;
        if let Some(c) = cycles.iter().find(|c| c.len() != 16) {
            return Err(format!("k = 2 cycle of length {}", c.len()));
        }
        // k = 3: every path closing a wrap path has the same length
        let w3 = gen_equal_length_wall(3).map_err(|e| e.to_string())?;
        let d = &w3.wall.host;
        let wraps: Vec<&Vec<VertexId>> = w3
            .wall
            .subdiv
            .iter()
            .filter(|s| w3.wrap_arcs.contains(&(s.from, s.to)))
            .map(|s| &s.path.vertices)
            .collect();
        let cut: BTreeSet<(VertexId, VertexId)> =
            wraps.iter().flat_map(|p| p.windows(2).map(|w| (w[0], w[1]))).collect();
        let mut indeg = vec![0; d.n()];
        for &(t, h) in d.arcs() {
            if !cut.contains(&(t, h)) {
                indeg[h] += 1;
            }
        }
        let mut order = Vec::new();
        let mut q: VecDeque<VertexId> = d.vertices().filter(|&v| indeg[v] == 0).collect();
        while let Some(v) = q.pop_front() {
            order.push(v);
            for &u in d.out_neighbors(v) {
                if !cut.contains(&(v, u)) {
                    indeg[u] -= 1;
                    if indeg[u] == 0 {
                        q.push_back(u);
                    }
                }
            }
        }
        if order.len() != d.n() {
            return Err("k = 3 wall minus wrap paths is cyclic".into());
        }
        for p in &wraps {
            let (u, v) = (p[0], *p.last().unwrap());
            let mut lens: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); d.n()];
            lens[v].insert(0);
            for &x in &order {
                let here: Vec<usize> = lens[x].iter().copied().collect();
                for &y in d.out_neighbors(x) {
                    if !cut.contains(&(x, y)) {
                        lens[y].extend(here.iter().map(|l| l + 1));
                    }
                }
            }
            let closing: Vec<usize> = lens[u].iter().map(|l| l + p.len() - 1).collect();
            if closing != [36] {
                return Err(format!("k = 3 cycles through wrap path at {u} have lengths {closing:?}"));
            }
        }
        Ok(format!("{} cycles of length 16; {} wrap paths close only at 36", cycles.len(), wraps.len()))
    })();
    report(1, start, res);
}

#[test]
fn criterion_02_layered_digraph() {
    let start = Instant::now();
    let res = (|| {
        let d1 = gen_d(1, Some(2)).map_err(|e| e.to_string())?;
        let cycles = naive_cycles(&d1.digraph, 1_000_000).ok_or("too many cycles")?;
        for (i, a) in cycles.iter().enumerate() {
            let arcs_a: BTreeSet<_> = (0..a.len()).map(|j| (a[j], a[(j + 1) % a.len()])).collect();
            for b in &cycles[i + 1..] {
                let disjoint = (0..b.len()).all(|j| !arcs_a.contains(&(b[j], b[(j + 1) % b.len()])));
                if a.len() == b.len() && disjoint {
                    return Err(format!("D_1 has arc-disjoint cycles of length {}", a.len()));
                }
            }
        }
        if !strongly_connected_without(&d1.digraph, &vec![false; d1.digraph.n()]) {
            return Err("D_1 is not strongly connected".into());
        }
        let d2 = gen_d(2, Some(256)).map_err(|e| e.to_string())?;
        let g = &d2.digraph;
        if g.n() != 1024 {
            return Err(format!("D_2 has {} vertices", g.n()));
        }
        let mut blocked = vec![false; g.n()];
        for v in g.vertices() {
            blocked[v] = true;
            if !strongly_connected_without(g, &blocked) {
                return Err(format!("D_2 - {v} is not strongly connected"));
            }
            blocked[v] = false;
        }
        let lens: Vec<u128> = d2.table.arcs.iter().map(|a| a.length.to_u128().unwrap()).collect();
        let mut sums: Vec<u128> = (0u32..1 << lens.len())
            .map(|m| (0..lens.len()).filter(|b| m >> b & 1 == 1).map(|b| lens[b]).sum())
            .collect();
        sums.sort_unstable();
        if sums.windows(2).any(|w| w[0] == w[1]) {
            return Err("two forward-arc subsets share a sum".into());
        }
        let fwd: BTreeMap<(VertexId, VertexId), u128> = d2.forward.iter().copied().zip(lens.iter().copied()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let mut sampled = 0;
        while sampled < 1000 {
            let mut pos = BTreeMap::new();
            let mut walk = Vec::new();
            let mut v = rng.gen_range(0..g.n());
            while !pos.contains_key(&v) {
                pos.insert(v, walk.len());
                walk.push(v);
                let nb = g.out_neighbors(v);
                v = nb[rng.gen_range(0..nb.len())];
            }
            let c = &walk[pos[&v]..];
            let sum: u128 = (0..c.len()).filter_map(|i| fwd.get(&(c[i], c[(i + 1) % c.len()]))).sum();
            if sum != c.len() as u128 {
                return Err(format!("cycle of length {} has forward sum {sum}", c.len()));
            }
            sampled += 1;
        }
        Ok(format!("D_1 {} cycles; 1024 deletions; {} subset sums; 1000 samples", cycles.len(), sums.len()))
    })();
    report(2, start, res);
}

#[test]
fn criterion_03_f_k() {
    let start = Instant::now();
    let res = (|| {
        for k in 1..=3 {
            let (d, dec) = gen_f(k).map_err(|e| e.to_string())?;
            let deg = d.vertices().map(|v| d.out_neighbors(v).len()).min().unwrap();
            if deg != k {
                return Err(format!("F_{k} minimum out-degree {deg}"));
            }
            let w = naive_width(&d, &dec)?;
            if w != 1 {
                return Err(format!("F_{k} width {w}"));
            }
        }
        Ok("min out-degree k, width 1 for k = 1, 2, 3".into())
    })();
    report(3, start, res);
}

#[test]
fn criterion_04_complete_minor_packing() {
    let start = Instant::now();
    let res = (|| {
        let k5 = gen_complete(5).map_err(|e| e.to_string())?;
        let all = naive_cycles(&k5, 1_000_000).unwrap();
        for seed in 0..100 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w = random_weighting(&k5, &mut rng);
            let got = complete_base_cycles(5, &w, 2).map_err(|e| e.to_string())?;
            if got.len() != 2 {
                return Err(format!("seed {seed}: {} cycles", got.len()));
            }
            // the pair must be one of K_5's disjoint pairs with distinct weights
            let canon = |c: &[VertexId]| {
                let i = (0..c.len()).min_by_key(|&i| c[i]).unwrap();
                [&c[i..], &c[..i]].concat()
            };
            let (a, b) = (canon(&got[0].vertices), canon(&got[1].vertices));
            let mut found = false;
            for x in &all {
                for y in &all {
                    if *x == a && *y == b && x.iter().all(|v| !y.contains(v)) {
                        found = weight(&w, x) != weight(&w, y);
                    }
                }
            }
            if !found {
                return Err(format!("seed {seed}: {a:?}, {b:?} is not a disjoint pair of distinct weight"));
            }
        }
        let k9 = gen_complete(9).map_err(|e| e.to_string())?;
        let got = complete_base_cycles(9, &ArcWeighting::unit(&k9), 3).map_err(|e| e.to_string())?;
        naive_distinct_packing(&k9, &got, 3)?;
        Ok(format!("100 weightings against {} cycles of K_5; K_9 unit weights", all.len()))
    })();
    report(4, start, res);
}

/// Replays a model step by step with single contractions and plain
/// deletions, projecting the lifted cycles along and checking that each
/// keeps its weight after every step.
fn replay_weights(m: &cyclepack::minors::MinorModel, w: &ArcWeighting, cycles: &[DiCycle]) -> Result<(), String> {
    let mut g = m.source.clone();
    let mut wt = w.clone();
    let mut map: Vec<Option<VertexId>> = (0..g.n()).map(Some).collect();
    let targets: Vec<BigRational> = cycles.iter().map(|c| weight(w, &c.vertices).unwrap()).collect();
    let rekey = |wt: &ArcWeighting, f: &dyn Fn(VertexId) -> Option<VertexId>, skip: Option<(VertexId, VertexId)>| {
        let mut out = ArcWeighting::new();
        for (&(a, b), x) in wt.iter() {
            if Some((a, b)) == skip {
                continue;
            }
            if let (Some(a), Some(b)) = (f(a), f(b)) {
                out.insert((a, b), x.clone()).unwrap();
            }
        }
        out
    };
    for (step, op) in m.ops.iter().enumerate() {
        let cur = |v: VertexId| map[v].ok_or(format!("step {step}: vertex {v} already gone"));
        match *op {
            MinorOp::DeleteVertex(v) => {
                let x = cur(v)?;
                let (g2, back) = g.remove_vertices(&[x]).map_err(|e| e.to_string())?;
                let mut fwd = vec![None; g.n()];
                for (new, &old) in back.iter().enumerate() {
                    fwd[old] = Some(new);
                }
                wt = rekey(&wt, &|v| fwd[v], None);
                for slot in map.iter_mut() {
                    *slot = slot.and_then(|v| fwd[v]);
                }
                g = g2;
            }
            MinorOp::DeleteArc(a, b) => {
                let (x, y) = (cur(a)?, cur(b)?);
                let arcs: Vec<_> = g.arcs().iter().copied().filter(|&e| e != (x, y)).collect();
                g = Digraph::build(g.n(), &arcs).map_err(|e| e.to_string())?;
                wt = rekey(&wt, &|v| Some(v), Some((x, y)));
            }
            MinorOp::Contract(a, b, witness) => {
                let (g2, w2, _, fwd) =
                    contract_with(&g, (cur(a)?, cur(b)?), witness, Some(&wt)).map_err(|e| e.to_string())?;
                for slot in map.iter_mut() {
                    *slot = slot.and_then(|v| fwd[v]);
                }
                g = g2;
                wt = w2.unwrap();
            }
        }
        for (c, target) in cycles.iter().zip(&targets) {
            let proj: Vec<VertexId> = c.vertices.iter().filter_map(|&v| map[v]).collect();
            if !cycle_ok(&g, &proj) {
                return Err(format!("step {step}: projected cycle {proj:?} is not a cycle"));
            }
            if weight(&wt, &proj).as_ref() != Some(target) {
                return Err(format!("step {step}: weight of {proj:?} changed"));
            }
        }
    }
    Ok(())
}

#[test]
fn criterion_05_butterfly_lifting() {
    let start = Instant::now();
    let res = (|| {
        let mut ops = 0;
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(500 + seed);
            let steps = rng.gen_range(5..=30);
            let m = expand_model(5, steps, ExpansionMix::ALL, &mut rng).map_err(|e| e.to_string())?;
            if m.ops.len() > 30 {
                return Err(format!("seed {seed}: {} ops", m.ops.len()));
            }
            ops += m.ops.len();
            let w = random_weighting(&m.source, &mut rng);
            let cycles = lift_pack(&m, &w, 2).map_err(|e| format!("seed {seed}: {e}"))?;
            if cycles.len() != 2 || !cycles.iter().all(|c| cycle_ok(&m.source, &c.vertices)) {
                return Err(format!("seed {seed}: invalid lifted cycles"));
            }
            if cycles[0].vertices.iter().any(|v| cycles[1].vertices.contains(v)) {
                return Err(format!("seed {seed}: lifted cycles overlap"));
            }
            if weight(&w, &cycles[0].vertices) == weight(&w, &cycles[1].vertices) {
                return Err(format!("seed {seed}: equal weights"));
            }
            replay_weights(&m, &w, &cycles).map_err(|e| format!("seed {seed}: {e}"))?;
        }
        Ok(format!("50 models, {ops} ops, weights fixed at every step"))
    })();
    report(5, start, res);
}

#[test]
fn criterion_06_pack_or_hit() {
    let start = Instant::now();
    let res = (|| {
        let corpus = ep_corpus(6);
        let oracle = ExactOracle::default();
        let (mut packs, mut hits) = (0, 0);
        for (i, (d, dec)) in corpus.iter().enumerate() {
            if d.n() > 14 {
                return Err(format!("digraph {i} has {} vertices", d.n()));
            }
            let width = naive_width(d, dec)?;
            if width > 2 {
                return Err(format!("digraph {i} has width {width}"));
            }
            for k in 1..=2 {
                for l in 1..=3 {
                    let tag = format!("digraph {i}, k = {k}, l = {l}");
                    let r = ep_pack_or_hit(d, dec, k, l, &oracle).map_err(|e| format!("{tag}: {e}"))?;
                    match r.outcome {
                        PackOrHit::Pack { trains } => {
                            if trains.len() != l {
                                return Err(format!("{tag}: {} trains", trains.len()));
                            }
                            let mut seen = BTreeSet::new();
                            for t in &trains {
                                naive_train(d, t, k).map_err(|e| format!("{tag}: {e}"))?;
                                if !t.spine.vertices.iter().all(|v| seen.insert(*v)) {
                                    return Err(format!("{tag}: trains overlap"));
                                }
                            }
                            packs += 1;
                        }
                        PackOrHit::Hit { set } => {
                            if set.len() > (width + 1) * (l - 1) {
                                return Err(format!("{tag}: hitting set of {}", set.len()));
                            }
                            let (rest, _) = d.remove_vertices(&set).map_err(|e| e.to_string())?;
                            if brute_train_exists(&rest, k, SearchCaps::default()) != Some(false) {
                                return Err(format!("{tag}: a train survives"));
                            }
                            hits += 1;
                        }
                    }
                }
            }
        }
        Ok(format!("{} digraphs x 6 runs: {packs} packs, {hits} hits", corpus.len()))
    })();
    report(6, start, res);
}

#[test]
fn criterion_07_bounded_width() {
    let start = Instant::now();
    let res = (|| {
        let mut sizes = Vec::new();
        for k in [2, 3] {
            let (d, dec) = bounded_width_fixture(k).map_err(|e| e.to_string())?;
            let deg = d.vertices().map(|v| d.out_neighbors(v).len()).min().unwrap();
            if deg <= 3 * (k - 1) {
                return Err(format!("k = {k}: minimum out-degree {deg}"));
            }
            if k == 2 {
                let w = naive_width(&d, &dec)?;
                if w != 1 {
                    return Err(format!("k = 2 fixture has width {w}"));
                }
            }
            let cycles = bounded_width_pack(&d, &dec, k).map_err(|e| format!("k = {k}: {e}"))?;
            naive_distinct_packing(&d, &cycles, k).map_err(|e| format!("k = {k}: {e}"))?;
            sizes.push(d.n());
        }
        Ok(format!("width-1 fixtures on {sizes:?} vertices"))
    })();
    report(7, start, res);
}

#[test]
fn criterion_08_flat_wall() {
    let start = Instant::now();
    let res = (|| {
        let mut runs = 0;
        for inst in flat_fixtures().map_err(|e| e.to_string())? {
            let tag = format!("k = {}, case {}, order {}", inst.k, inst.case, inst.wall.order);
            let ctx = FlatContext::new(inst.digraph.clone(), inst.wall.clone()).map_err(|e| e.to_string())?;
            if !weak_flat_check(&ctx).ok {
                return Err(format!("{tag}: not weakly flat"));
            }
            let pack = if inst.wall.order == 3 * inst.k + 2 {
                strong_case_pack(&ctx, inst.k)
            } else {
                nonstrong_case_pack(&ctx)
            }
            .map_err(|e| format!("{tag}: {e}"))?;
            naive_distinct_packing(&inst.digraph, &pack.cycles, inst.k).map_err(|e| format!("{tag}: {e}"))?;
            runs += 1;
        }
        Ok(format!("{runs} fixtures (k = 1..3 x 7 cases, order 8 x 7 cases)"))
    })();
    report(8, start, res);
}

#[test]
fn criterion_09_reach_intersections() {
    let start = Instant::now();
    let res = (|| {
        let mut meeting = 0;
        for inst in flat_fixtures().map_err(|e| e.to_string())? {
            let d = &inst.digraph;
            let w = &inst.wall;
            let mut in_wall = vec![false; d.n()];
            let mut interior = vec![false; d.n()];
            for &(t, h) in w.host.arcs() {
                in_wall[t] = true;
                in_wall[h] = true;
            }
            for &v in &w.interior {
                interior[v] = true;
            }
            let mut bricks_of: BTreeMap<VertexId, Vec<usize>> = BTreeMap::new();
            for (i, b) in w.bricks.iter().enumerate() {
                for &v in &b.vertices {
                    bricks_of.entry(v).or_default().push(i);
                }
            }
            let dist = |x: VertexId, y: VertexId| -> Option<usize> {
                let mut seen = BTreeMap::from([(x, 0usize)]);
                let mut q = VecDeque::from([x]);
                while let Some(v) = q.pop_front() {
                    if v == y {
                        return Some(seen[&v]);
                    }
                    for &b in bricks_of.get(&v).into_iter().flatten() {
                        for &u in &w.bricks[b].vertices {
                            if interior[u] && !seen.contains_key(&u) {
                                seen.insert(u, seen[&v] + 1);
                                q.push_back(u);
                            }
                        }
                    }
                }
                None
            };
            let sets = |x: VertexId, forward: bool| -> BTreeSet<VertexId> {
                let mut seen = BTreeSet::new();
                let mut q = VecDeque::from([x]);
                while let Some(v) = q.pop_front() {
                    let nb = if forward { d.out_neighbors(v) } else { d.in_neighbors(v) };
                    for &u in nb {
                        if !interior[u] && seen.insert(u) && !in_wall[u] {
                            q.push_back(u);
                        }
                    }
                }
                seen
            };
            let strong = strongly_connected_without(d, &vec![false; d.n()]);
            let mut plus: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
            let mut minus: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
            for &x in &w.interior {
                for v in sets(x, true) {
                    plus.entry(v).or_default().push(x);
                }
                for v in sets(x, false) {
                    minus.entry(v).or_default().push(x);
                }
            }
            let mut pairs = BTreeSet::new();
            for (v, xs) in &plus {
                for &x in xs {
                    for &y in minus.get(v).into_iter().flatten() {
                        if x != y && pairs.insert((x, y, 0)) && dist(x, y).map_or(true, |t| t >= 2) {
                            return Err(format!("R+[{x}] and R-[{y}] meet at {v}"));
                        }
                    }
                    if strong {
                        for &y in xs {
                            if x < y && pairs.insert((x, y, 1)) && dist(x, y).map_or(true, |t| t >= 3) {
                                return Err(format!("R+[{x}] and R+[{y}] meet at {v}"));
                            }
                        }
                    }
                }
            }
            meeting += pairs.len();
        }
        Ok(format!("0 violations over {meeting} meeting pairs"))
    })();
    report(9, start, res);
}

#[test]
fn criterion_10_train_extraction() {
    let start = Instant::now();
    let res = (|| {
        for k in 1..=5 {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + k as u64);
            for i in 0..200 {
                let n = rng.gen_range(k + 1..=k + 20);
                let mut arcs = Vec::new();
                for v in 0..n {
                    let deg = rng.gen_range(k..=(k + 2).min(n - 1));
                    let mut heads = BTreeSet::new();
                    while heads.len() < deg {
                        let u = rng.gen_range(0..n);
                        if u != v {
                            heads.insert(u);
                        }
                    }
                    arcs.extend(heads.into_iter().map(|u| (v, u)));
                }
                let d = Digraph::build(n, &arcs).unwrap();
                let t = find_k_train(&d, k).map_err(|e| format!("k = {k}, digraph {i}: {e}"))?;
                naive_train(&d, &t, k).map_err(|e| format!("k = {k}, digraph {i}: {e}"))?;
                let last = t.spine.vertices.len() - 1;
                let lens: BTreeSet<usize> = t.back.iter().map(|&p| last - p + 1).collect();
                if lens.len() != k {
                    return Err(format!("k = {k}, digraph {i}: repeated cycle length"));
                }
            }
        }
        Ok("1000 digraphs, all trains valid with distinct lengths".into())
    })();
    report(10, start, res);
}
