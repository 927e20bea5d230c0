//! Walls inside a host digraph: reach sets relative to the wall interior,
//! brick distance, weak flatness, the in-or-out dichotomy, k-trains built
//! in a six-column strip around a designated branch vertex, and the
//! packing pipelines on top of them.
//!
//! Paths "through the outside world" have all inner vertices outside
//! `V(W)`; perimeter vertices may only be endpoints.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::digraph::{DiCycle, DiPath, Digraph, VertexId};
use crate::dtd::{bounded_width_pack, DirectedTreeDecomposition};
use crate::error::{Error, Result};
use crate::gen::{Coord, WallIndex, WallModel};
use crate::minors::{distinct_length_pack_via_minor, required_order, MinorModel};
use crate::oracle::{verify_packing, CyclePacking, PackingClaim};
use crate::trains::{find_k_train_within, is_train, select_distinct, select_distinct_menus, train_cycles, KTrain};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Forward,
    Reverse,
}

/// A digraph together with a wall it contains.
#[derive(Clone, Debug)]
pub struct FlatContext {
    pub digraph: Digraph,
    pub wall: WallModel,
    index: WallIndex,
}

impl FlatContext {
    /// Checks the wall certificate and that every wall arc is in `d`.
    /// A wall on a smaller id space is widened to `d`'s.
    pub fn new(d: Digraph, wall: WallModel) -> Result<FlatContext> {
        let wall = match wall.host.n().cmp(&d.n()) {
            std::cmp::Ordering::Equal => wall,
            std::cmp::Ordering::Less => wall.relabel(&|v| Some(v), d.n())?,
            std::cmp::Ordering::Greater => {
                return Err(Error::Precondition(format!(
                    "wall lives on {} vertices, host has {}",
                    wall.host.n(),
                    d.n()
                )))
            }
        };
        wall.validate()?;
        if let Some(&(t, h)) = wall.host.arcs().iter().find(|&&(t, h)| !d.has_arc(t, h)) {
            return Err(Error::Precondition(format!("wall arc ({t}, {h}) missing from the host")));
        }
        let index = wall.index();
        Ok(FlatContext { digraph: d, wall, index })
    }

    pub fn index(&self) -> &WallIndex {
        &self.index
    }

    /// The reversed host with the reversed wall.
    pub fn reversed(&self) -> FlatContext {
        let wall = self.wall.reversed();
        let index = wall.index();
        FlatContext { digraph: self.digraph.reverse(), wall, index }
    }

    fn require_interior(&self, v: VertexId) -> Result<()> {
        if self.index.is_interior(v) {
            Ok(())
        } else {
            Err(Error::Precondition(format!("vertex {v} is not in the wall interior")))
        }
    }

    /// Brick-graph neighbours of an interior vertex.
    pub fn brick_neighbors(&self, v: VertexId) -> BTreeSet<VertexId> {
        let mut out = BTreeSet::new();
        for &b in self.index.bricks_of(v) {
            for &u in &self.wall.bricks[b].vertices {
                if u != v && self.index.is_interior(u) {
                    out.insert(u);
                }
            }
        }
        out
    }

    fn share_brick(&self, x: VertexId, y: VertexId) -> bool {
        x == y || self.index.bricks_of(x).iter().any(|b| self.index.bricks_of(y).contains(b))
    }
}

/// `R_W^+[w]` (or `R_W^-[w]`): vertices outside the interior reached from
/// (or reaching) `w` through the outside world.
pub fn wall_reach(ctx: &FlatContext, w: VertexId, sign: Sign) -> Result<BTreeSet<VertexId>> {
    ctx.require_interior(w)?;
    let d = &ctx.digraph;
    let idx = &ctx.index;
    let step = |v: VertexId| match sign {
        Sign::Plus => d.out_neighbors(v),
        Sign::Minus => d.in_neighbors(v),
    };
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([w]);
    while let Some(v) = queue.pop_front() {
        for &u in step(v) {
            if idx.is_interior(u) || !seen.insert(u) {
                continue;
            }
            if !idx.in_wall(u) {
                queue.push_back(u);
            }
        }
    }
    Ok(seen)
}

/// Distance in the brick graph on the interior; `None` if disconnected.
pub fn brick_distance(ctx: &FlatContext, x: VertexId, y: VertexId) -> Result<Option<usize>> {
    ctx.require_interior(x)?;
    ctx.require_interior(y)?;
    if x == y {
        return Ok(Some(0));
    }
    let mut dist = BTreeMap::from([(x, 0usize)]);
    let mut queue = VecDeque::from([x]);
    while let Some(v) = queue.pop_front() {
        let dv = dist[&v];
        for u in ctx.brick_neighbors(v) {
            if dist.contains_key(&u) {
                continue;
            }
            if u == y {
                return Ok(Some(dv + 1));
            }
            dist.insert(u, dv + 1);
            queue.push_back(u);
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatnessReport {
    pub ok: bool,
    /// Interior endpoints of an outside path that share no brick.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<(VertexId, VertexId)>,
}

/// Every path between interior vertices whose inner vertices avoid the
/// wall must join two vertices of a common brick.
pub fn weak_flat_check(ctx: &FlatContext) -> FlatnessReport {
    let d = &ctx.digraph;
    let idx = &ctx.index;
    for &x in &ctx.wall.interior {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        for &u in d.out_neighbors(x) {
            if idx.is_interior(u) {
                if !ctx.share_brick(x, u) {
                    return FlatnessReport { ok: false, pair: Some((x, u)) };
                }
            } else if !idx.in_wall(u) && seen.insert(u) {
                queue.push_back(u);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &u in d.out_neighbors(v) {
                if idx.is_interior(u) {
                    if !ctx.share_brick(x, u) {
                        return FlatnessReport { ok: false, pair: Some((x, u)) };
                    }
                } else if !idx.in_wall(u) && seen.insert(u) {
                    queue.push_back(u);
                }
            }
        }
    }
    FlatnessReport { ok: true, pair: None }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "branch", rename_all = "lowercase")]
pub enum InOrOut {
    /// `path` runs from `w` to `x` meeting the interior only in `w`, and
    /// `neighbors` are `a` interior out-neighbours of `x` other than `w`.
    Path {
        x: VertexId,
        path: DiPath,
        neighbors: Vec<VertexId>,
    },
    /// `D[core]` has minimum out-degree at least `b`.
    Core { core: Vec<VertexId> },
}

/// The in-or-out dichotomy at `w`. The degree hypothesis is checked only
/// on `R_W^+[w]` and `w`.
pub fn in_or_out(ctx: &FlatContext, w: VertexId, a: usize, b: usize) -> Result<InOrOut> {
    let d = &ctx.digraph;
    let idx = &ctx.index;
    let reach = wall_reach(ctx, w, Sign::Plus)?;
    for &v in std::iter::once(&w).chain(reach.iter()) {
        if d.out_degree(v) < a + b {
            return Err(Error::DegreeDeficit { vertex: v, degree: d.out_degree(v), required: a + b });
        }
    }
    let interior_nbrs = |x: VertexId| -> Vec<VertexId> {
        d.out_neighbors(x).iter().copied().filter(|&u| u != w && idx.is_interior(u)).collect()
    };
    if reach.is_empty() {
        let mut nb = interior_nbrs(w);
        nb.truncate(a);
        return Ok(InOrOut::Path { x: w, path: DiPath::new(vec![w]), neighbors: nb });
    }
    let mut thin = None;
    for &x in &reach {
        let inner = d.out_neighbors(x).iter().filter(|u| reach.contains(u)).count();
        if inner >= b {
            continue;
        }
        let nb = interior_nbrs(x);
        if nb.len() < a {
            thin.get_or_insert(x);
            continue;
        }
        let forbidden: Vec<VertexId> = ctx.wall.wall_vertices().into_iter().filter(|&v| v != w && v != x).collect();
        let path = d
            .find_path(w, x, &forbidden)?
            .ok_or_else(|| Error::Defect(format!("{x} is in the reach set of {w} but no outside path exists")))?;
        let mut nb = nb;
        nb.truncate(a);
        return Ok(InOrOut::Path { x, path, neighbors: nb });
    }
    if let Some(x) = thin {
        // only a perimeter vertex can land here: its wall out-neighbours
        // are outside the interior without being reachable through it
        return Err(Error::Precondition(format!(
            "vertex {x} of the reach set has fewer than {b} out-neighbours there and fewer than {a} in the interior"
        )));
    }
    Ok(InOrOut::Core { core: reach.into_iter().collect() })
}

/// Branch vertices and paths around a branch vertex `w` at `(c1, c2)`
/// with `c1` odd and `c2` even. `u[i]` is `u_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Anchors {
    pub w: VertexId,
    pub coord: Coord,
    pub u: [VertexId; 16],
    /// `P_1 .. P_6`.
    pub paths: Vec<DiPath>,
    /// The vertical cycle through `w`.
    pub cycle: DiCycle,
    /// Branch vertices in columns `c1 - 2 ..= c1 + 3` and the inner
    /// vertices of subdivision paths between them.
    pub strip: BTreeSet<VertexId>,
}

const ANCHOR_OFFSETS: [(isize, usize); 16] = [
    (-1, 1), (0, 1), (1, 1),
    (-2, 2), (-1, 2), (1, 2), (2, 2),
    (-2, 3), (-1, 3), (0, 3), (1, 3), (2, 3), (3, 3),
    (1, 4), (2, 4), (3, 4),
];

fn concat(parts: &[DiPath]) -> Result<DiPath> {
    let mut out: Vec<VertexId> = Vec::new();
    for p in parts {
        match (out.last(), p.vertices.first()) {
            (Some(&a), Some(&b)) if a != b => {
                return Err(Error::Defect(format!("path pieces do not meet: {a} then {b}")))
            }
            (Some(_), _) => out.extend_from_slice(&p.vertices[1..]),
            (None, _) => out.extend_from_slice(&p.vertices),
        }
    }
    Ok(DiPath::new(out))
}

/// Geometry around `w` derived from the wall coordinates.
pub fn anchors(wall: &WallModel, index: &WallIndex, w: VertexId) -> Result<Anchors> {
    let m = wall.order;
    let (c1, c2) = index
        .coord(w)
        .ok_or_else(|| Error::Precondition(format!("{w} is not a branch vertex")))?;
    if c1 % 2 == 0 || c2 % 2 == 1 {
        return Err(Error::Precondition(format!("({c1}, {c2}) needs an odd column and an even row")));
    }
    if c1 < 5 || c1 + 3 > 2 * m - 2 {
        return Err(Error::Precondition(format!(
            "strip of columns {}..={} around ({c1}, {c2}) meets the perimeter",
            c1 as isize - 2,
            c1 + 3
        )));
    }
    let shift = c2 - 2;
    let mut u = [0; 16];
    for (i, &(dc, r)) in ANCHOR_OFFSETS.iter().enumerate() {
        u[i] = index.at(((c1 as isize + dc) as usize, r + shift));
    }
    let at = |v: VertexId| index.coord(v).expect("anchor is a branch vertex");
    let link = |s: VertexId, t: VertexId| -> Result<DiPath> {
        let i = index
            .link(at(s), at(t))
            .ok_or_else(|| Error::Defect(format!("no wall link {:?} -> {:?}", at(s), at(t))))?;
        Ok(wall.subdiv[i].path.clone())
    };
    let chain = |vs: &[VertexId]| -> Result<DiPath> {
        let parts = vs.windows(2).map(|p| link(p[0], p[1])).collect::<Result<Vec<_>>>()?;
        concat(&parts)
    };
    let un = |i: usize| u[i - 1];
    let paths = vec![
        chain(&[un(1), un(2), un(3), un(6), w])?,
        chain(&[un(1), un(5)])?,
        chain(&[w, un(5), un(4), un(8), un(9), un(10)])?,
        chain(&[w, un(10), un(11), un(12)])?,
        chain(&[un(7), un(6)])?,
        chain(&[un(7), un(12)])?,
    ];
    let cycle = wall.vertical_cycles[(c1 + 1) / 2 - 1].clone();
    let cols = c1 - 2..=c1 + 3;
    let mut strip = BTreeSet::new();
    for b in &wall.branch {
        if cols.contains(&b.col) {
            strip.insert(b.vertex);
        }
    }
    for s in &wall.subdiv {
        if cols.contains(&s.from.0) && cols.contains(&s.to.0) {
            strip.extend(s.path.vertices.iter().copied());
        }
    }
    Ok(Anchors { w, coord: (c1, c2), u, paths, cycle, strip })
}

/// Which part of the in-or-out dichotomy produced a train.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrainCase {
    /// Taken inside the reach set, which has large minimum out-degree.
    Core,
    /// Built along anchor path `P_j` (1-based).
    Path(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TechnicalTrain {
    pub train: KTrain,
    pub case: TrainCase,
    /// The strip together with the reach set on the relevant side.
    pub support: Vec<VertexId>,
}

/// A k-train (reverse-k-train for [`Orientation::Reverse`]) inside the
/// strip around `w` plus `R_W^+[w]` (resp. `R_W^-[w]`).
pub fn technical_train(ctx: &FlatContext, w: VertexId, k: usize, orientation: Orientation) -> Result<TechnicalTrain> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    match orientation {
        Orientation::Forward => technical_train_forward(ctx, w, k),
        Orientation::Reverse => {
            let rev = ctx.reversed();
            let mut t = technical_train_forward(&rev, w, k)?;
            t.train = t.train.flipped();
            let v = is_train(&ctx.digraph, &t.train);
            if !v.ok {
                return Err(Error::Defect(format!("reverse train invalid: {}", v.violation.unwrap_or_default())));
            }
            Ok(t)
        }
    }
}

fn technical_train_forward(ctx: &FlatContext, w: VertexId, k: usize) -> Result<TechnicalTrain> {
    let d = &ctx.digraph;
    let anc = anchors(&ctx.wall, &ctx.index, w)?;
    let reach = wall_reach(ctx, w, Sign::Plus)?;
    let mut support: BTreeSet<VertexId> = anc.strip.clone();
    support.extend(reach.iter().copied());
    let (train, case) = match in_or_out(ctx, w, 6 * k - 5, k)? {
        InOrOut::Core { core } => (find_k_train_within(d, k, &core)?, TrainCase::Core),
        InOrOut::Path { x, path, neighbors } => {
            let counts: Vec<Vec<VertexId>> = anc
                .paths
                .iter()
                .map(|p| p.vertices.iter().copied().filter(|v| neighbors.contains(v)).collect())
                .collect();
            let j = (0..6)
                .find(|&j| counts[j].len() >= k)
                .ok_or_else(|| Error::Defect(format!("no anchor path holds {k} out-neighbours of {x}")))?;
            let ys = &counts[j][..k];
            let spine = assemble_spine(ctx, &anc, j + 1, ys[0], &path)?;
            let back = ys
                .iter()
                .map(|&y| spine.position(y).ok_or_else(|| Error::Defect(format!("{y} missing from the spine"))))
                .collect::<Result<Vec<_>>>()?;
            (KTrain { spine, back, reversed: false }, TrainCase::Path(j + 1))
        }
    };
    let v = is_train(d, &train);
    if !v.ok {
        return Err(Error::Defect(format!("assembled train invalid: {}", v.violation.unwrap_or_default())));
    }
    if let Some(v) = train.spine.vertices.iter().find(|v| !support.contains(v)) {
        return Err(Error::Defect(format!("train leaves the strip and reach set at {v}")));
    }
    Ok(TechnicalTrain { train, case, support: support.into_iter().collect() })
}

fn assemble_spine(ctx: &FlatContext, anc: &Anchors, j: usize, y1: VertexId, to_x: &DiPath) -> Result<DiPath> {
    let u = |i: usize| anc.u[i - 1];
    let w = anc.w;
    let seg = |p: &DiPath, a: VertexId, b: VertexId| {
        p.segment(a, b).ok_or_else(|| Error::Defect(format!("segment {a}..{b} not on anchor path")))
    };
    let on_q = |a: VertexId, b: VertexId| {
        anc.cycle.segment(a, b).ok_or_else(|| Error::Defect(format!("segment {a}..{b} not on the vertical cycle")))
    };
    let wp = |s: VertexId, t: VertexId| -> Result<DiPath> {
        let idx = &ctx.index;
        let i = idx
            .link(idx.coord(s).expect("branch"), idx.coord(t).expect("branch"))
            .ok_or_else(|| Error::Defect(format!("no wall link {s} -> {t}")))?;
        Ok(ctx.wall.subdiv[i].path.clone())
    };
    let p = &anc.paths;
    let around = |start: DiPath| -> Result<Vec<DiPath>> {
        Ok(vec![
            start,
            wp(u(12), u(13))?,
            wp(u(13), u(16))?,
            wp(u(16), u(15))?,
            wp(u(15), u(14))?,
            on_q(u(14), w)?,
        ])
    };
    let mut parts = match j {
        1 => vec![seg(&p[0], y1, w)?],
        2 => vec![seg(&p[1], y1, u(5))?, seg(&p[2], u(5), u(10))?, on_q(u(10), w)?],
        3 => vec![seg(&p[2], y1, u(10))?, on_q(u(10), w)?],
        4 => around(seg(&p[3], y1, u(12))?)?,
        5 => vec![seg(&p[4], y1, u(6))?, wp(u(6), w)?],
        6 => around(seg(&p[5], y1, u(12))?)?,
        _ => return Err(Error::InvalidArgument(format!("case {j} is not in 1..=6"))),
    };
    parts.push(to_x.clone());
    concat(&parts)
}

fn check_disjoint(sets: &[(&str, &BTreeSet<VertexId>)]) -> Result<()> {
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            if let Some(v) = sets[i].1.intersection(sets[j].1).next() {
                return Err(Error::Defect(format!("{} and {} share vertex {v}", sets[i].0, sets[j].0)));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallPack {
    pub cycles: Vec<DiCycle>,
    pub trains: Vec<TechnicalTrain>,
    /// Designated branch vertices, in order.
    pub anchors: Vec<VertexId>,
}

fn require_flat(ctx: &FlatContext) -> Result<()> {
    let r = weak_flat_check(ctx);
    match r.pair {
        None => Ok(()),
        Some((x, y)) => Err(Error::Precondition(format!(
            "wall not weakly flat: an outside path joins {x} and {y}, which share no brick"
        ))),
    }
}

/// `k` disjoint cycles of distinct lengths from a weakly flat wall of
/// order `3k + 2` in a strongly connected host, using k-trains at the
/// branch vertices `(6i - 1, 2)`.
pub fn strong_case_pack(ctx: &FlatContext, k: usize) -> Result<WallPack> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    if ctx.wall.order != 3 * k + 2 {
        return Err(Error::Precondition(format!("wall order {} is not 3k + 2 = {}", ctx.wall.order, 3 * k + 2)));
    }
    if !ctx.digraph.is_strongly_connected() {
        return Err(Error::Precondition("host is not strongly connected".into()));
    }
    require_flat(ctx)?;
    let ws: Vec<VertexId> = (1..=k).map(|i| ctx.index.at((6 * i - 1, 2))).collect();
    for i in 0..k {
        for j in i + 1..k {
            match brick_distance(ctx, ws[i], ws[j])? {
                Some(dist) if dist < 3 => {
                    return Err(Error::Defect(format!("anchors {} and {} at brick distance {dist}", ws[i], ws[j])))
                }
                _ => {}
            }
        }
    }
    let trains = ws
        .iter()
        .map(|&w| technical_train(ctx, w, k, Orientation::Forward))
        .collect::<Result<Vec<_>>>()?;
    let supports: Vec<BTreeSet<VertexId>> = trains.iter().map(|t| t.support.iter().copied().collect()).collect();
    let names: Vec<String> = (1..=k).map(|i| format!("support {i}")).collect();
    let named: Vec<(&str, &BTreeSet<VertexId>)> = names.iter().map(|s| s.as_str()).zip(supports.iter()).collect();
    check_disjoint(&named)?;
    let plain: Vec<KTrain> = trains.iter().map(|t| t.train.clone()).collect();
    let cycles = select_distinct(&ctx.digraph, &plain)?;
    Ok(WallPack { cycles, trains, anchors: ws })
}

/// Three disjoint cycles of distinct lengths from a weakly flat wall of
/// order 8: the first vertical cycle, a 3-train at `(5, 2)` and a
/// reverse-3-train at `(11, 3)`.
pub fn nonstrong_case_pack(ctx: &FlatContext) -> Result<WallPack> {
    if ctx.wall.order != 8 {
        return Err(Error::Precondition(format!("wall order {} is not 8", ctx.wall.order)));
    }
    require_flat(ctx)?;
    let w1 = ctx.index.at((5, 2));
    let w2 = ctx.index.at((11, 3));
    let t1 = technical_train(ctx, w1, 3, Orientation::Forward)?;
    let t2 = technical_train(ctx, w2, 3, Orientation::Reverse)?;
    let q1 = ctx.wall.vertical_cycles[0].clone();
    let qset: BTreeSet<VertexId> = q1.vertices.iter().copied().collect();
    let s1: BTreeSet<VertexId> = t1.support.iter().copied().collect();
    let s2: BTreeSet<VertexId> = t2.support.iter().copied().collect();
    check_disjoint(&[("the first vertical cycle", &qset), ("the forward support", &s1), ("the reverse support", &s2)])?;
    let menus = vec![vec![q1], train_cycles(&t1.train), train_cycles(&t2.train)];
    let cycles = select_distinct_menus(&menus)?;
    Ok(WallPack { cycles, trains: vec![t1, t2], anchors: vec![w1, w2] })
}

/// One outcome of the flat wall theorem for `D`, supplied as input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CaseCertificate {
    /// A decomposition of bounded width.
    Dtd { decomposition: DirectedTreeDecomposition },
    /// A butterfly-minor model of a complete digraph with source `D`.
    Minor { model: MinorModel },
    /// A set `removed` and a wall in `D - removed`, given in the ids of
    /// `D - removed` (remaining vertices renumbered in increasing order).
    Flat { removed: Vec<VertexId>, wall: WallModel },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "theorem", rename_all = "lowercase")]
pub enum TheoremMode {
    /// `k` cycles under high strong connectivity.
    MainConn { k: usize },
    /// Three cycles under high minimum in- and out-degree.
    MainSem,
}

impl TheoremMode {
    pub fn k(&self) -> usize {
        match self {
            TheoremMode::MainConn { k } => *k,
            TheoremMode::MainSem => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    BoundedWidth,
    Minor,
    StrongWall,
    NonstrongWall,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DispatchOutcome {
    pub route: Route,
    pub cycles: Vec<DiCycle>,
}

/// Routes a case certificate to the matching packing procedure and checks
/// the resulting cycles in `d`.
pub fn theorem_dispatch(d: &Digraph, cert: &CaseCertificate, mode: TheoremMode) -> Result<DispatchOutcome> {
    let k = mode.k();
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    let (route, cycles) = match cert {
        CaseCertificate::Dtd { decomposition } => (Route::BoundedWidth, bounded_width_pack(d, decomposition, k)?),
        CaseCertificate::Minor { model } => {
            if &model.source != d {
                return Err(Error::Precondition("minor model source differs from the digraph".into()));
            }
            let t = model.terminal_order();
            if t < required_order(k) {
                return Err(Error::Precondition(format!(
                    "model of a complete digraph on {t} vertices; {} needed for k = {k}",
                    required_order(k)
                )));
            }
            (Route::Minor, distinct_length_pack_via_minor(d, model, k)?)
        }
        CaseCertificate::Flat { removed, wall } => {
            let (rest, map) = d.remove_vertices(removed)?;
            let ctx = FlatContext::new(rest, wall.clone())?;
            let (route, pack) = match mode {
                TheoremMode::MainConn { k } => (Route::StrongWall, strong_case_pack(&ctx, k)?),
                TheoremMode::MainSem => (Route::NonstrongWall, nonstrong_case_pack(&ctx)?),
            };
            (route, pack.cycles.iter().map(|c| c.map(|v| map[v])).collect())
        }
    };
    let verdict = verify_packing(d, &CyclePacking { cycles: cycles.clone(), claim: PackingClaim::DistinctLengths });
    if !verdict.ok {
        return Err(Error::Defect(format!("dispatched packing rejected: {}", verdict.violation.unwrap_or_default())));
    }
    if cycles.len() != k {
        return Err(Error::Defect(format!("{} cycles returned, {k} expected", cycles.len())));
    }
    Ok(DispatchOutcome { route, cycles })
}
