//! Seeded fixtures for the flat-wall pipelines: a uniformly subdivided wall
//! with a small gadget hanging off each designated branch vertex, shaped so
//! that the in-or-out dichotomy lands in a chosen case.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::wall::{gen_wall_uniform, WallIndex, WallModel};
use crate::digraph::{Arc, Digraph, VertexId};
use crate::error::{Error, Result};
use crate::flatwall::{anchors, Orientation};

/// Which branch of the dichotomy the gadget forces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum FlatCase {
    /// An outside vertex whose interior out-neighbours crowd anchor path
    /// `P_j`, `j` in `1..=6`.
    Path(usize),
    /// A bidirected complete digraph on `2k + 1` vertices hanging off `w`.
    Dense,
}

impl fmt::Display for FlatCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlatCase::Path(j) => write!(f, "{j}"),
            FlatCase::Dense => f.write_str("dense"),
        }
    }
}

impl FromStr for FlatCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(FlatCase::Dense),
            _ => match s.parse::<usize>() {
                Ok(j) if (1..=6).contains(&j) => Ok(FlatCase::Path(j)),
                _ => Err(Error::InvalidArgument(format!("case must be 1..6 or dense, got {s:?}"))),
            },
        }
    }
}

impl From<FlatCase> for String {
    fn from(c: FlatCase) -> String {
        c.to_string()
    }
}

impl TryFrom<String> for FlatCase {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FlatCase {
    pub const ALL: [FlatCase; 7] = [
        FlatCase::Path(1),
        FlatCase::Path(2),
        FlatCase::Path(3),
        FlatCase::Path(4),
        FlatCase::Path(5),
        FlatCase::Path(6),
        FlatCase::Dense,
    ];
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatInstance {
    pub k: usize,
    pub case: FlatCase,
    pub digraph: Digraph,
    /// The wall on the id space of `digraph`.
    pub wall: WallModel,
    pub designated: Vec<VertexId>,
    pub orientations: Vec<Orientation>,
}

struct Builder {
    next: VertexId,
    arcs: Vec<Arc>,
    base: Digraph,
}

impl Builder {
    fn fresh(&mut self) -> VertexId {
        self.next += 1;
        self.next - 1
    }

    fn has(&self, a: Arc) -> bool {
        (a.0 < self.base.n() && a.1 < self.base.n() && self.base.has_arc(a.0, a.1)) || self.arcs.contains(&a)
    }
}

/// Arcs of one gadget at `w`, in the orientation of `wall` (which is the
/// reversed wall for reverse gadgets).
fn gadget(
    b: &mut Builder,
    wall: &WallModel,
    idx: &WallIndex,
    w: VertexId,
    k: usize,
    case: FlatCase,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Arc>> {
    let anc = anchors(wall, idx, w)?;
    let need = 7 * k - 5;
    let mut arcs = Vec::new();
    let inner = |j: usize| -> Vec<VertexId> {
        anc.paths[j].vertices.iter().copied().filter(|&v| idx.coord(v).is_none()).collect()
    };
    let mut brick: Vec<VertexId> = idx
        .bricks_of(w)
        .iter()
        .flat_map(|&i| wall.bricks[i].vertices.iter().copied())
        .filter(|&v| v != w && idx.is_interior(v))
        .collect();
    brick.sort_unstable();
    brick.dedup();
    match case {
        FlatCase::Path(j) => {
            if !(1..=6).contains(&j) {
                return Err(Error::InvalidArgument(format!("case {j} is not in 1..=6")));
            }
            let x = b.fresh();
            arcs.push((w, x));
            // a few stray targets on other paths, never k on one of them
            let mut others: Vec<usize> = (0..6).filter(|&i| i != j - 1).collect();
            others.shuffle(rng);
            let noise = (k - 1).min(5);
            let mut targets: Vec<VertexId> = others[..noise]
                .iter()
                .map(|&i| *inner(i).choose(rng).expect("subdivided link"))
                .collect();
            let main = inner(j - 1);
            if main.len() < need - noise {
                return Err(Error::Defect(format!("path P_{j} has only {} inner vertices", main.len())));
            }
            targets.extend(main.choose_multiple(rng, need - noise).copied());
            arcs.extend(targets.into_iter().map(|t| (x, t)));
        }
        FlatCase::Dense => {
            let g: Vec<VertexId> = (0..2 * k + 1).map(|_| b.fresh()).collect();
            arcs.push((w, g[0]));
            for &s in &g {
                for &t in &g {
                    if s != t {
                        arcs.push((s, t));
                    }
                }
                let back = (need - 2 * k).max(1);
                arcs.extend(brick.choose_multiple(rng, back).map(|&t| (s, t)));
            }
        }
    }
    // chords inside the bricks at w lift its out-degree
    let have = wall.host.out_degree(w) + 1;
    let mut pool = brick.clone();
    pool.shuffle(rng);
    let mut added = 0;
    for t in pool {
        if have + added >= need {
            break;
        }
        if !wall.host.has_arc(w, t) {
            arcs.push((w, t));
            added += 1;
        }
    }
    if have + added < need {
        return Err(Error::Defect(format!("not enough brick vertices around {w} for chords")));
    }
    Ok(arcs)
}

fn attach(
    b: &mut Builder,
    wall: &WallModel,
    reversed: &WallModel,
    w: VertexId,
    k: usize,
    case: FlatCase,
    orientation: Orientation,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    let arcs = match orientation {
        Orientation::Forward => gadget(b, wall, &wall.index(), w, k, case, rng)?,
        Orientation::Reverse => gadget(b, reversed, &reversed.index(), w, k, case, rng)?
            .into_iter()
            .map(|(t, h)| (h, t))
            .collect(),
    };
    for a in arcs {
        if !b.has(a) {
            b.arcs.push(a);
        }
    }
    Ok(())
}

fn finish(b: Builder, wall: WallModel) -> Result<(Digraph, WallModel)> {
    let extra = b.next - b.base.n();
    let d = b.base.with_extra(extra, &b.arcs)?;
    let wall = wall.relabel(&|v| Some(v), d.n())?;
    Ok((d, wall))
}

/// Wall of order `3k + 2`, subdivided uniformly with links of length
/// `7k - 4`, with a gadget of the requested case at each `(6i - 1, 2)`.
pub fn gen_flat_instance(k: usize, case: FlatCase, seed: u64) -> Result<FlatInstance> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    let wall = gen_wall_uniform(3 * k + 2, 7 * k - 4)?;
    let reversed = wall.reversed();
    let idx = wall.index();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = Builder { next: wall.host.n(), arcs: Vec::new(), base: wall.host.clone() };
    let designated: Vec<VertexId> = (1..=k).map(|i| idx.at((6 * i - 1, 2))).collect();
    for &w in &designated {
        attach(&mut b, &wall, &reversed, w, k, case, Orientation::Forward, &mut rng)?;
    }
    let (digraph, wall) = finish(b, wall)?;
    Ok(FlatInstance {
        k,
        case,
        digraph,
        wall,
        orientations: vec![Orientation::Forward; k],
        designated,
    })
}

/// Wall of order 8 with a forward gadget at `(5, 2)` and a reverse gadget
/// at `(11, 3)`, both for `k = 3`. `skip_first` leaves `(5, 2)` bare.
pub fn gen_nonstrong_instance(case: FlatCase, seed: u64, skip_first: bool) -> Result<FlatInstance> {
    let k = 3;
    let wall = gen_wall_uniform(8, 7 * k - 4)?;
    let reversed = wall.reversed();
    let idx = wall.index();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = Builder { next: wall.host.n(), arcs: Vec::new(), base: wall.host.clone() };
    let w1 = idx.at((5, 2));
    let w2 = idx.at((11, 3));
    if !skip_first {
        attach(&mut b, &wall, &reversed, w1, k, case, Orientation::Forward, &mut rng)?;
    }
    attach(&mut b, &wall, &reversed, w2, k, case, Orientation::Reverse, &mut rng)?;
    let (digraph, wall) = finish(b, wall)?;
    Ok(FlatInstance {
        k,
        case,
        digraph,
        wall,
        designated: vec![w1, w2],
        orientations: vec![Orientation::Forward, Orientation::Reverse],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_names_round_trip() {
        for c in FlatCase::ALL {
            assert_eq!(c.to_string().parse::<FlatCase>().unwrap(), c);
        }
        assert!("7".parse::<FlatCase>().is_err());
        assert_eq!(serde_json::to_string(&FlatCase::Dense).unwrap(), "\"dense\"");
    }

    #[test]
    fn designated_degrees() {
        for case in [FlatCase::Path(4), FlatCase::Dense] {
            let inst = gen_flat_instance(3, case, 11).unwrap();
            assert_eq!(inst.wall.order, 11);
            for &w in &inst.designated {
                assert!(inst.digraph.out_degree(w) >= 16);
            }
        }
    }

    #[test]
    fn same_seed_same_instance() {
        let a = gen_flat_instance(2, FlatCase::Path(3), 5).unwrap();
        let b = gen_flat_instance(2, FlatCase::Path(3), 5).unwrap();
        assert_eq!(a, b);
    }
}
