//! The acceptance suite, runnable from the binary as `cyclepack selftest`.
//! Every criterion builds its fixtures from fixed seeds and checks the
//! pipeline outputs with the brute-force verifiers.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::digraph::{Arc, Digraph, VertexId};
use crate::dtd::{
    bounded_width_pack, ep_pack_or_hit, validate_dtd, DirectedTreeDecomposition, ExactOracle, PackOrHit,
};
use crate::error::{Error, Result};
use crate::flatwall::{
    brick_distance, nonstrong_case_pack, strong_case_pack, wall_reach, weak_flat_check, FlatContext, Sign,
};
use crate::gen::{
    back_arc_tree, gen_complete, gen_d, gen_equal_length_wall, gen_f, gen_flat_instance, gen_nonstrong_instance,
    FlatCase, FlatInstance,
};
use crate::minors::{complete_base_cycles, expand_model, lift_pack, random_weighting, ArcWeighting, ExpansionMix};
use crate::oracle::{
    brute_train_exists, check_equal_length_wall, enum_cycles, layered_structure_check, no_equal_length_arcdisjoint,
    strong_after_single_deletions, vertex_connectivity, verify_packing, CyclePacking, EqualLengthAudit,
    PackingClaim, SearchCaps,
};
use crate::trains::{find_k_train, is_train, train_cycles};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: usize,
    pub name: String,
    pub ok: bool,
    pub detail: String,
    pub elapsed_ms: u128,
}

pub const CRITERIA: [(usize, &str); 10] = [
    (1, "equal-length wall"),
    (2, "layered digraph D_k"),
    (3, "F_k out-degree and width"),
    (4, "complete-digraph packing"),
    (5, "butterfly lifting"),
    (6, "pack-or-hit dichotomy"),
    (7, "bounded-width packing"),
    (8, "flat-wall pipelines"),
    (9, "reach-set intersections"),
    (10, "train extraction"),
];

pub fn run_criterion(id: usize) -> Result<CriterionReport> {
    let name = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .ok_or_else(|| Error::InvalidArgument(format!("no criterion {id}")))?
        .1;
    let start = Instant::now();
    let res = match id {
        1 => equal_length_wall(),
        2 => layered(),
        3 => f_k(),
        4 => complete_packing(),
        5 => lifting(),
        6 => pack_or_hit(),
        7 => bounded_width(),
        8 => flat_pipelines(),
        9 => intersections(),
        _ => train_extraction(),
    };
    let (ok, detail) = match res {
        Ok(d) => (true, d),
        Err(e) => (false, e.to_string()),
    };
    Ok(CriterionReport { id, name: name.to_string(), ok, detail, elapsed_ms: start.elapsed().as_millis() })
}

pub fn run_all() -> Vec<CriterionReport> {
    CRITERIA.iter().map(|&(id, _)| run_criterion(id).expect("listed criterion")).collect()
}

fn fail(msg: impl Into<String>) -> Error {
    Error::Defect(msg.into())
}

fn check(d: &Digraph, cycles: &[crate::DiCycle], claim: PackingClaim) -> Result<()> {
    let v = verify_packing(d, &CyclePacking { cycles: cycles.to_vec(), claim });
    if v.ok {
        Ok(())
    } else {
        Err(fail(v.violation.unwrap_or_default()))
    }
}

fn equal_length_wall() -> Result<String> {
    let w2 = gen_equal_length_wall(2)?;
    let cycles = enum_cycles(&w2.wall.host, 1_000_000)
        .complete()
        .ok_or_else(|| fail("k = 2 enumeration overflowed"))?;
    if let Some(c) = cycles.iter().find(|c| c.len() != 16) {
        return Err(fail(format!("k = 2 cycle of length {}", c.len())));
    }
    for k in [2, 3] {
        let e = gen_equal_length_wall(k)?;
        let v = check_equal_length_wall(&e);
        if !v.ok {
            return Err(fail(format!("k = {k}: {}", v.violation.unwrap_or_default())));
        }
    }
    Ok(format!("{} cycles of length 16 at k = 2; wrap-path check passed at k = 2, 3", cycles.len()))
}

fn layered() -> Result<String> {
    let d1 = gen_d(1, Some(2))?;
    match no_equal_length_arcdisjoint(&d1.digraph, 1_000_000) {
        EqualLengthAudit::Verified { .. } => {}
        other => return Err(fail(format!("D_1: {other:?}"))),
    }
    if vertex_connectivity(&d1.digraph, 1) < 1 {
        return Err(fail("D_1 is not strongly connected"));
    }
    let d2 = gen_d(2, Some(256))?;
    if d2.digraph.n() != 1024 {
        return Err(fail(format!("D_2 has {} vertices", d2.digraph.n())));
    }
    let v = strong_after_single_deletions(&d2.digraph);
    if !v.ok {
        return Err(fail(format!("D_2: {}", v.violation.unwrap_or_default())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let v = layered_structure_check(&d2, 1000, &mut rng);
    if !v.ok {
        return Err(fail(format!("D_2: {}", v.violation.unwrap_or_default())));
    }
    Ok("D_1 exhaustive, D_2 1024 deletions, 256 subset sums, 1000 samples".into())
}

fn f_k() -> Result<String> {
    for k in 1..=3 {
        let (d, dec) = gen_f(k)?;
        let deg = d.min_out_degree().unwrap_or(0);
        if deg != k {
            return Err(fail(format!("F_{k} has minimum out-degree {deg}")));
        }
        let w = validate_dtd(&d, &dec)?;
        if w != 1 {
            return Err(fail(format!("F_{k} decomposition has width {w}")));
        }
    }
    Ok("k = 1, 2, 3".into())
}

fn complete_packing() -> Result<String> {
    let k5 = gen_complete(5)?;
    for seed in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_weighting(&k5, &mut rng);
        let cycles = complete_base_cycles(5, &w, 2)?;
        if cycles.len() != 2 {
            return Err(fail(format!("seed {seed}: {} cycles", cycles.len())));
        }
        check(&k5, &cycles, PackingClaim::DistinctWeights { weights: w })?;
    }
    let k9 = gen_complete(9)?;
    let cycles = complete_base_cycles(9, &ArcWeighting::unit(&k9), 3)?;
    if cycles.len() != 3 {
        return Err(fail(format!("K_9: {} cycles", cycles.len())));
    }
    check(&k9, &cycles, PackingClaim::DistinctLengths)?;
    Ok("100 weightings of K_5, unit K_9".into())
}

fn lifting() -> Result<String> {
    let mut total = 0;
    for seed in 0..50 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let steps = rng.gen_range(5..=30);
        let m = expand_model(5, steps, ExpansionMix::ALL, &mut rng)?;
        if m.ops.len() > 30 {
            return Err(fail(format!("seed {seed}: {} ops", m.ops.len())));
        }
        total += m.ops.len();
        let w = random_weighting(&m.source, &mut rng);
        let cycles = lift_pack(&m, &w, 2)?;
        check(&m.source, &cycles, PackingClaim::DistinctWeights { weights: w })?;
    }
    Ok(format!("50 models, {total} ops replayed"))
}

/// Small digraphs with decompositions of width at most 2: back-arc trees
/// with a random subset of back arcs, and chains of blocks of size at most
/// 2 where only the first vertex of a block has arcs into the next block.
pub fn ep_corpus(seed: u64) -> Vec<(Digraph, DirectedTreeDecomposition)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let shapes: [&[usize]; 6] = [&[2, 2], &[3, 1], &[2, 1, 1], &[3, 3], &[2, 2, 1], &[2, 1, 2]];
    for shape in shapes {
        for _ in 0..3 {
            let (full, dec) = back_arc_tree(shape, true).expect("small tree");
            let arcs: Vec<Arc> = full
                .arcs()
                .iter()
                .copied()
                .filter(|&(t, h)| h > t || rng.gen_bool(0.5))
                .collect();
            out.push((Digraph::build(full.n(), &arcs).expect("subset"), dec));
        }
    }
    for _ in 0..18 {
        out.push(block_chain(&mut rng));
    }
    out.retain(|(d, dec)| validate_dtd(d, dec).is_ok_and(|w| w <= 2));
    out
}

fn block_chain(rng: &mut ChaCha8Rng) -> (Digraph, DirectedTreeDecomposition) {
    let mut blocks: Vec<Vec<VertexId>> = Vec::new();
    let mut n = 0;
    let target = rng.gen_range(3..=14);
    while n < target {
        let size = rng.gen_range(1..=2).min(target - n);
        blocks.push((n..n + size).collect());
        n += size;
    }
    let mut arcs = BTreeSet::new();
    for (i, b) in blocks.iter().enumerate() {
        for &x in b {
            for &y in b {
                if x != y && rng.gen_bool(0.7) {
                    arcs.insert((x, y));
                }
            }
            for earlier in &blocks[..i] {
                for &y in earlier {
                    if rng.gen_bool(0.3) {
                        arcs.insert((x, y));
                    }
                }
            }
        }
        if let Some(next) = blocks.get(i + 1) {
            for &y in next {
                if rng.gen_bool(0.8) {
                    arcs.insert((b[0], y));
                }
            }
        }
    }
    let arcs: Vec<Arc> = arcs.into_iter().collect();
    let d = Digraph::build(n, &arcs).expect("simple by construction");
    let parent = (0..blocks.len()).map(|i| i.checked_sub(1)).collect();
    let guards: BTreeMap<usize, Vec<VertexId>> = (1..blocks.len()).map(|i| (i, vec![blocks[i - 1][0]])).collect();
    (d, DirectedTreeDecomposition::new(parent, blocks, guards))
}

fn pack_or_hit() -> Result<String> {
    let corpus = ep_corpus(6);
    let oracle = ExactOracle::default();
    let (mut packs, mut hits) = (0, 0);
    for (i, (d, dec)) in corpus.iter().enumerate() {
        let width = validate_dtd(d, dec)?;
        for k in 1..=2 {
            for l in 1..=3 {
                let tag = format!("digraph {i}, k = {k}, l = {l}");
                match ep_pack_or_hit(d, dec, k, l, &oracle)?.outcome {
                    PackOrHit::Pack { trains } => {
                        if trains.len() != l {
                            return Err(fail(format!("{tag}: {} trains", trains.len())));
                        }
                        let mut seen = BTreeSet::new();
                        for t in &trains {
                            if t.k() != k || !is_train(d, t).ok {
                                return Err(fail(format!("{tag}: invalid train")));
                            }
                            if !t.spine.vertices.iter().all(|&v| seen.insert(v)) {
                                return Err(fail(format!("{tag}: trains overlap")));
                            }
                        }
                        packs += 1;
                    }
                    PackOrHit::Hit { set } => {
                        if set.len() > (width + 1) * (l - 1) {
                            return Err(fail(format!("{tag}: hitting set of size {}", set.len())));
                        }
                        let (rest, _) = d.remove_vertices(&set)?;
                        if brute_train_exists(&rest, k, SearchCaps::default()) != Some(false) {
                            return Err(fail(format!("{tag}: a train survives the hitting set")));
                        }
                        hits += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{} digraphs, {packs} packs, {hits} hits", corpus.len()))
}

/// Width-1 back-arc trees with every back arc, minimum out-degree above
/// `3(k - 1)`.
pub fn bounded_width_fixture(k: usize) -> Result<(Digraph, DirectedTreeDecomposition)> {
    let branching: Vec<usize> = (1..=3 * k - 2).rev().collect();
    back_arc_tree(&branching, true)
}

fn bounded_width() -> Result<String> {
    let mut sizes = Vec::new();
    for k in [2, 3] {
        let (d, dec) = bounded_width_fixture(k)?;
        let deg = d.min_out_degree().unwrap_or(0);
        if deg <= 3 * (k - 1) {
            return Err(fail(format!("k = {k}: minimum out-degree {deg}")));
        }
        let cycles = bounded_width_pack(&d, &dec, k)?;
        if cycles.len() != k {
            return Err(fail(format!("k = {k}: {} cycles", cycles.len())));
        }
        check(&d, &cycles, PackingClaim::DistinctLengths)?;
        sizes.push(d.n());
    }
    Ok(format!("fixtures on {sizes:?} vertices"))
}

/// Every flat fixture used by the flat-wall criteria: cases 1..6 and dense
/// for k = 1, 2, 3, then the order-8 fixture for each case.
pub fn flat_fixtures() -> Result<Vec<FlatInstance>> {
    let mut out = Vec::new();
    for k in 1..=3 {
        for case in FlatCase::ALL {
            out.push(gen_flat_instance(k, case, 8 + k as u64)?);
        }
    }
    for case in FlatCase::ALL {
        out.push(gen_nonstrong_instance(case, 8, false)?);
    }
    Ok(out)
}

fn flat_pipelines() -> Result<String> {
    let mut runs = 0;
    for inst in flat_fixtures()? {
        let tag = format!("k = {}, case {}, order {}", inst.k, inst.case, inst.wall.order);
        let ctx = FlatContext::new(inst.digraph.clone(), inst.wall.clone())?;
        let flat = weak_flat_check(&ctx);
        if !flat.ok {
            return Err(fail(format!("{tag}: not weakly flat at {:?}", flat.pair)));
        }
        let pack = if inst.wall.order == 3 * inst.k + 2 {
            strong_case_pack(&ctx, inst.k)
        } else {
            nonstrong_case_pack(&ctx)
        }
        .map_err(|e| fail(format!("{tag}: {e}")))?;
        if pack.cycles.len() != inst.k {
            return Err(fail(format!("{tag}: {} cycles", pack.cycles.len())));
        }
        check(&inst.digraph, &pack.cycles, PackingClaim::DistinctLengths)?;
        runs += 1;
    }
    Ok(format!("{runs} fixtures packed"))
}

fn intersections() -> Result<String> {
    let mut pairs = 0;
    for inst in flat_fixtures()? {
        let ctx = FlatContext::new(inst.digraph.clone(), inst.wall.clone())?;
        let strong = ctx.digraph.is_strongly_connected();
        let mut plus: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        let mut minus: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        for &x in &ctx.wall.interior {
            for v in wall_reach(&ctx, x, Sign::Plus)? {
                plus.entry(v).or_default().push(x);
            }
            for v in wall_reach(&ctx, x, Sign::Minus)? {
                minus.entry(v).or_default().push(x);
            }
        }
        let mut checked = BTreeSet::new();
        for (v, xs) in &plus {
            let ys = minus.get(v).map(Vec::as_slice).unwrap_or(&[]);
            for &x in xs {
                for &y in ys {
                    if x != y && checked.insert((x, y, Sign::Minus)) {
                        pairs += 1;
                        if brick_distance(&ctx, x, y)?.map_or(true, |dist| dist >= 2) {
                            return Err(fail(format!("R+[{x}] and R-[{y}] meet at {v}")));
                        }
                    }
                }
                if strong {
                    for &y in xs {
                        if x < y && checked.insert((x, y, Sign::Plus)) {
                            pairs += 1;
                            if brick_distance(&ctx, x, y)?.map_or(true, |dist| dist >= 3) {
                                return Err(fail(format!("R+[{x}] and R+[{y}] meet at {v}")));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{pairs} meeting pairs, all close in the brick graph"))
}

fn random_min_degree(rng: &mut ChaCha8Rng, k: usize) -> Digraph {
    let n = rng.gen_range(k + 1..=k + 20);
    let mut arcs = Vec::new();
    for v in 0..n {
        let mut others: Vec<VertexId> = (0..n).filter(|&u| u != v).collect();
        others.shuffle(rng);
        let deg = rng.gen_range(k..=(k + 2).min(n - 1));
        arcs.extend(others[..deg].iter().map(|&u| (v, u)));
    }
    Digraph::build(n, &arcs).expect("distinct heads")
}

fn train_extraction() -> Result<String> {
    for k in 1..=5 {
        let mut rng = ChaCha8Rng::seed_from_u64(10 + k as u64);
        for i in 0..200 {
            let d = random_min_degree(&mut rng, k);
            let t = find_k_train(&d, k)?;
            let v = is_train(&d, &t);
            if !v.ok || t.k() != k {
                return Err(fail(format!("k = {k}, digraph {i}: {}", v.violation.unwrap_or_default())));
            }
            let lens: BTreeSet<usize> = train_cycles(&t).iter().map(|c| c.len()).collect();
            if lens.len() != k {
                return Err(fail(format!("k = {k}, digraph {i}: repeated cycle length")));
            }
        }
    }
    Ok("1000 digraphs".into())
}
