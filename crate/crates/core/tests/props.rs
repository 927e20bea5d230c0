use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cyclepack::dtd::{validate_dtd_relaxed, ExactOracle, PeelingOracle, TrainAnswer, TrainOracle};
use cyclepack::gen::back_arc_tree;
use cyclepack::minors::{contract, distinct_length_pack_via_minor, expand_model, required_order, ArcWeighting, ExpansionMix};
use cyclepack::oracle::{enum_cycles, verify_packing, CyclePacking, PackingClaim};
use cyclepack::trains::{is_train, select_distinct, KTrain};
use cyclepack::{DiCycle, DiPath, Digraph, Direction, VertexId};

fn digraph(max_n: usize) -> impl Strategy<Value = Digraph> {
    (2..=max_n).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n), 0..n * n).prop_map(move |pairs| {
            let arcs: Vec<_> = pairs.into_iter().filter(|(a, b)| a != b).collect();
            Digraph::build_dedup(n, &arcs).unwrap()
        })
    })
}

/// `reach[a][b]`: a non-empty walk from `a` to `b` avoiding `blocked`
/// after its start.
fn closure(d: &Digraph, blocked: &[bool]) -> Vec<Vec<bool>> {
    let n = d.n();
    let mut r = vec![vec![false; n]; n];
    for &(a, b) in d.arcs() {
        if !blocked[b] {
            r[a][b] = true;
        }
    }
    for m in 0..n {
        if blocked[m] {
            continue;
        }
        for a in 0..n {
            if r[a][m] {
                for b in 0..n {
                    if r[m][b] {
                        r[a][b] = true;
                    }
                }
            }
        }
    }
    r
}

fn mask(n: usize, vs: &BTreeSet<VertexId>) -> Vec<bool> {
    (0..n).map(|v| vs.contains(&v)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reverse_is_an_involution(d in digraph(8)) {
        let r = d.reverse();
        prop_assert_eq!(r.arc_count(), d.arc_count());
        for &(a, b) in d.arcs() {
            prop_assert!(r.has_arc(b, a));
        }
        prop_assert_eq!(r.reverse(), d);
    }

    #[test]
    fn reach_sets_match_the_closure(d in digraph(8), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut vs: Vec<VertexId> = d.vertices().collect();
        vs.shuffle(&mut rng);
        let split = rng.gen_range(1..=vs.len());
        let cut = rng.gen_range(split..=vs.len());
        let sources = &vs[..split];
        let forbidden = &vs[split..cut];
        let fwd = d.reach_set(sources, forbidden, Direction::Forward).unwrap();
        let back = d.reverse().reach_set(sources, forbidden, Direction::Backward).unwrap();
        prop_assert_eq!(&fwd, &back);
        let blocked = mask(d.n(), &forbidden.iter().copied().collect());
        let r = closure(&d, &blocked);
        let expected: BTreeSet<VertexId> = d.vertices().filter(|&v| sources.iter().any(|&s| r[s][v])).collect();
        prop_assert_eq!(fwd, expected);
    }

    #[test]
    fn strong_components_partition_by_mutual_reachability(d in digraph(9)) {
        let comps = d.strong_components();
        let mut seen = vec![usize::MAX; d.n()];
        for (i, c) in comps.iter().enumerate() {
            for &v in c {
                prop_assert_eq!(seen[v], usize::MAX, "vertex {} listed twice", v);
                seen[v] = i;
            }
        }
        prop_assert!(seen.iter().all(|&c| c != usize::MAX));
        let r = closure(&d, &vec![false; d.n()]);
        for a in d.vertices() {
            for b in d.vertices() {
                if a != b {
                    prop_assert_eq!(seen[a] == seen[b], r[a][b] && r[b][a]);
                }
            }
        }
        prop_assert_eq!(d.is_strongly_connected(), comps.len() == 1);
    }

    #[test]
    fn found_paths_are_valid_and_exist_exactly_when_reachable(d in digraph(8), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut vs: Vec<VertexId> = d.vertices().collect();
        vs.shuffle(&mut rng);
        let (from, to) = (vs[0], vs[1]);
        let cut = rng.gen_range(2..=vs.len());
        let forbidden = &vs[2..cut];
        let blocked = mask(d.n(), &forbidden.iter().copied().collect());
        let reachable = closure(&d, &blocked)[from][to];
        match d.find_path(from, to, forbidden).unwrap() {
            Some(p) => {
                prop_assert!(reachable);
                prop_assert!(p.validate(&d).is_ok());
                prop_assert_eq!(p.first(), Some(from));
                prop_assert_eq!(p.last(), Some(to));
                prop_assert!(p.vertices.iter().all(|v| !blocked[*v]));
            }
            None => prop_assert!(!reachable),
        }
    }

    #[test]
    fn disjoint_trains_yield_a_distinct_length_packing(k in 1usize..=4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut arcs = Vec::new();
        let mut trains = Vec::new();
        let mut next = 0;
        for _ in 0..k {
            let len = rng.gen_range(k + 1..=k + 5);
            let spine: Vec<VertexId> = (next..next + len).collect();
            next += len;
            let mut inner: Vec<usize> = (1..len - 1).collect();
            inner.shuffle(&mut rng);
            let mut back = vec![0];
            back.extend_from_slice(&inner[..k - 1]);
            back.sort_unstable();
            arcs.extend(spine.windows(2).map(|w| (w[0], w[1])));
            arcs.extend(back.iter().map(|&p| (spine[len - 1], spine[p])));
            trains.push(KTrain { spine: DiPath::new(spine), back, reversed: false });
        }
        trains.shuffle(&mut rng);
        let d = Digraph::build_dedup(next, &arcs).unwrap();
        for t in &trains {
            prop_assert!(is_train(&d, t).ok);
        }
        let cycles = select_distinct(&d, &trains).unwrap();
        prop_assert_eq!(cycles.len(), k);
        let v = verify_packing(&d, &CyclePacking { cycles, claim: PackingClaim::DistinctLengths });
        prop_assert!(v.ok, "{:?}", v.violation);
    }

    #[test]
    fn restriction_keeps_a_valid_decomposition_no_wider(
        branching in prop::collection::vec(1usize..=3, 1..=3),
        all_back in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let (d, dec) = back_arc_tree(&branching, all_back).unwrap();
        let width = validate_dtd_relaxed(&d, &dec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let keep: Vec<VertexId> = d.vertices().filter(|_| rng.gen_bool(0.6)).collect();
        prop_assume!(!keep.is_empty());
        let (sub, map) = d.induced(&keep).unwrap();
        let r = dec.restrict(&map).unwrap();
        let w = validate_dtd_relaxed(&sub, &r).unwrap();
        prop_assert!(w <= width, "restricted width {} > {}", w, width);
    }

    #[test]
    fn clean_contractions_preserve_cycle_weights(d in digraph(7), weights in prop::collection::vec(1i64..=6, 49)) {
        let e = d.arcs().iter().copied().find(|&(u, v)| d.out_degree(u) == 1 || d.in_degree(v) == 1);
        prop_assume!(e.is_some());
        let mut w = ArcWeighting::new();
        for (i, &a) in d.arcs().iter().enumerate() {
            w.insert(a, BigRational::from_integer(BigInt::from(weights[i % weights.len()]))).unwrap();
        }
        let (g, gw, rec, fwd) = contract(&d, e.unwrap(), Some(&w)).unwrap();
        let gw = gw.unwrap();
        prop_assert!(gw.check_on(&g).is_ok());
        prop_assert_eq!(fwd[rec.removed], None);
        // a digon on the arc or a parallel redirected arc loses more than one arc
        if g.arc_count() + 1 != d.arc_count() {
            return Ok(());
        }
        let before = enum_cycles(&d, 5000).complete().unwrap();
        let after = enum_cycles(&g, 5000).complete().unwrap();
        prop_assert_eq!(before.len(), after.len());
        for c in &before {
            let proj = DiCycle::new(c.vertices.iter().filter_map(|&v| fwd[v]).collect());
            prop_assert!(proj.validate(&g).is_ok(), "{:?} -> {:?}", c, proj);
            prop_assert_eq!(w.cycle_weight(c).unwrap(), gw.cycle_weight(&proj).unwrap());
        }
    }

    #[test]
    fn peeling_oracle_is_sound(d in digraph(7), k in 1usize..=3) {
        match PeelingOracle.query(&d, k).unwrap() {
            TrainAnswer::Found(t) => {
                prop_assert!(t.k() >= k);
                prop_assert!(is_train(&d, &t).ok);
                prop_assert!(matches!(ExactOracle::default().query(&d, k).unwrap(), TrainAnswer::Found(_)));
            }
            TrainAnswer::Absent => prop_assert!(false, "peeling never claims absence"),
            TrainAnswer::Unknown => prop_assert!(d.min_out_degree().unwrap_or(0) < k),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn minor_pipeline_output_verifies(k in 1usize..=3, steps in 0usize..=8, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = expand_model(required_order(k), steps, ExpansionMix::ALL, &mut rng).unwrap();
        let cycles = distinct_length_pack_via_minor(&m.source, &m, k).unwrap();
        prop_assert_eq!(cycles.len(), k);
        let v = verify_packing(&m.source, &CyclePacking { cycles, claim: PackingClaim::DistinctLengths });
        prop_assert!(v.ok, "{:?}", v.violation);
    }
}
