//! Cylindrical walls with full coordinate certificates.
//!
//! Branch vertices carry coordinates `(col, row)` with both in `1..=2m`.
//! Odd rows run left to right, even rows right to left, and the vertical
//! links between row `r` and `r + 1` (row `2m` wraps to row 1) sit on the
//! even columns when `r` is odd and on the odd columns when `r` is even.
//! Columns `2c - 1` and `2c` together carry the vertical cycle `Q_c`.

use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};
use std::cmp::Reverse;

use serde::{Deserialize, Serialize};

use crate::digraph::{Arc, DiCycle, DiPath, Digraph, VertexId};
use crate::error::{Error, Result};

/// `(col, row)`, both 1-based.
pub type Coord = (usize, usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchVertex {
    pub col: usize,
    pub row: usize,
    pub vertex: VertexId,
}

/// The subdivided image of the elementary arc `from -> to`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubdivisionPath {
    pub from: Coord,
    pub to: Coord,
    pub path: DiPath,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Brick {
    /// The six branch corners.
    pub branch: Vec<Coord>,
    /// All wall vertices on the face boundary, sorted.
    pub vertices: Vec<VertexId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallModel {
    pub order: usize,
    /// The wall itself, on the ambient vertex-id space (only wall arcs).
    pub host: Digraph,
    pub branch: Vec<BranchVertex>,
    pub subdiv: Vec<SubdivisionPath>,
    pub vertical_cycles: Vec<DiCycle>,
    /// Row `r` is `horizontal_paths[r - 1]`; `P_i^1` is row `2i - 1` and
    /// `P_i^2` is row `2i`.
    pub horizontal_paths: Vec<DiPath>,
    pub bricks: Vec<Brick>,
    pub perimeter: Vec<VertexId>,
    pub interior: Vec<VertexId>,
}

fn wrap_row(m: usize, r: usize) -> usize {
    (r - 1) % (2 * m) + 1
}

/// Arcs of the elementary wall of order `m` in coordinates, horizontal
/// arcs first (row by row) and then the vertical links.
pub fn elementary_arcs(m: usize) -> Vec<(Coord, Coord)> {
    let w = 2 * m;
    let mut arcs = Vec::with_capacity(6 * m * m);
    for r in 1..=w {
        for j in 1..w {
            if r % 2 == 1 {
                arcs.push(((j, r), (j + 1, r)));
            } else {
                arcs.push(((j + 1, r), (j, r)));
            }
        }
    }
    for r in 1..=w {
        let next = r % w + 1;
        let first = if r % 2 == 1 { 2 } else { 1 };
        for c in (first..=w).step_by(2) {
            arcs.push(((c, r), (c, next)));
        }
    }
    arcs
}

/// Branch corners of every brick: for each row pair `(r, r+1)` and each pair
/// of consecutive link columns `a, a + 2`.
fn brick_corners(m: usize) -> Vec<Vec<Coord>> {
    let w = 2 * m;
    let mut out = Vec::new();
    for r in 1..=w {
        let next = r % w + 1;
        let first = if r % 2 == 1 { 2 } else { 1 };
        let mut a = first;
        while a + 2 <= w {
            out.push(vec![
                (a, r),
                (a + 1, r),
                (a + 2, r),
                (a, next),
                (a + 1, next),
                (a + 2, next),
            ]);
            a += 2;
        }
    }
    out
}

fn vertical_cycle_coords(m: usize, c: usize) -> Vec<Coord> {
    let mut out = Vec::with_capacity(4 * m);
    for r in 1..=2 * m {
        if r % 2 == 1 {
            out.push((2 * c - 1, r));
            out.push((2 * c, r));
        } else {
            out.push((2 * c, r));
            out.push((2 * c - 1, r));
        }
    }
    out
}

fn row_coords(m: usize, r: usize) -> Vec<Coord> {
    if r % 2 == 1 {
        (1..=2 * m).map(|j| (j, r)).collect()
    } else {
        (1..=2 * m).rev().map(|j| (j, r)).collect()
    }
}

/// Elementary wall of order `m`.
pub fn gen_wall_uniform(m: usize, len: usize) -> Result<WallModel> {
    let lengths: BTreeMap<(Coord, Coord), usize> =
        elementary_arcs(m).into_iter().map(|a| (a, len)).collect();
    gen_wall(m, Some(&lengths))
}

/// Wall of order `m` in which each elementary arc is replaced by a path
/// with the given number of arcs (missing entries mean 1). Branch vertex
/// `(col, row)` gets id `(row - 1) * 2m + col - 1`; subdivision vertices
/// follow in elementary-arc order.
pub fn gen_wall(m: usize, lengths: Option<&BTreeMap<(Coord, Coord), usize>>) -> Result<WallModel> {
    if m < 2 {
        return Err(Error::InvalidArgument("wall order must be >= 2".into()));
    }
    let w = 2 * m;
    let branch_id = |(c, r): Coord| (r - 1) * w + (c - 1);
    let mut next = w * w;
    let mut subdiv = Vec::new();
    let mut arcs: Vec<Arc> = Vec::new();
    for (s, t) in elementary_arcs(m) {
        let len = lengths.and_then(|l| l.get(&(s, t)).copied()).unwrap_or(1);
        if len == 0 {
            return Err(Error::InvalidArgument(format!(
                "subdivision length 0 for arc {s:?} -> {t:?}"
            )));
        }
        let mut trace = vec![branch_id(s)];
        for _ in 1..len {
            trace.push(next);
            next += 1;
        }
        trace.push(branch_id(t));
        for p in trace.windows(2) {
            arcs.push((p[0], p[1]));
        }
        subdiv.push(SubdivisionPath {
            from: s,
            to: t,
            path: DiPath::new(trace),
        });
    }
    let mut host = Digraph::build(next, &arcs)?;
    let mut branch = Vec::with_capacity(w * w);
    for r in 1..=w {
        for c in 1..=w {
            let v = branch_id((c, r));
            branch.push(BranchVertex { col: c, row: r, vertex: v });
            host.set_label(v, format!("({c},{r})"))?;
        }
    }
    branch.sort_by_key(|b| b.vertex);
    WallModel::assemble(m, host, branch, subdiv)
}

impl WallModel {
    /// Fills cycles, rows, bricks and the perimeter from the branch map and
    /// subdivision paths.
    fn assemble(
        m: usize,
        host: Digraph,
        branch: Vec<BranchVertex>,
        subdiv: Vec<SubdivisionPath>,
    ) -> Result<WallModel> {
        let mut model = WallModel {
            order: m,
            host,
            branch,
            subdiv,
            vertical_cycles: Vec::new(),
            horizontal_paths: Vec::new(),
            bricks: Vec::new(),
            perimeter: Vec::new(),
            interior: Vec::new(),
        };
        let index = model.index();
        let trace = |coords: &[Coord], closed: bool| -> Result<Vec<VertexId>> {
            let mut out = vec![index.at(coords[0])];
            let steps = if closed { coords.len() } else { coords.len() - 1 };
            for i in 0..steps {
                let a = coords[i];
                let b = coords[(i + 1) % coords.len()];
                let p = index
                    .link(a, b)
                    .ok_or_else(|| Error::Defect(format!("no link {a:?} -> {b:?}")))?;
                out.extend_from_slice(&model.subdiv[p].path.vertices[1..]);
            }
            if closed {
                out.pop();
            }
            Ok(out)
        };
        let mut cycles = Vec::new();
        for c in 1..=m {
            cycles.push(DiCycle::new(trace(&vertical_cycle_coords(m, c), true)?));
        }
        let mut rows = Vec::new();
        for r in 1..=2 * m {
            rows.push(DiPath::new(trace(&row_coords(m, r), false)?));
        }
        let bricks = model.compute_bricks(&index)?;
        let mut per: BTreeSet<VertexId> = cycles[0].vertices.iter().copied().collect();
        per.extend(cycles[m - 1].vertices.iter().copied());
        let interior = model
            .wall_vertices()
            .into_iter()
            .filter(|v| !per.contains(v))
            .collect();
        model.vertical_cycles = cycles;
        model.horizontal_paths = rows;
        model.bricks = bricks;
        model.perimeter = per.into_iter().collect();
        model.interior = interior;
        Ok(model)
    }

    fn compute_bricks(&self, index: &WallIndex) -> Result<Vec<Brick>> {
        let mut out = Vec::new();
        for corners in brick_corners(self.order) {
            let (top, bottom) = corners.split_at(3);
            let mut links = vec![(top[0], top[1]), (top[1], top[2])];
            links.push((bottom[0], bottom[1]));
            links.push((bottom[1], bottom[2]));
            links.push((top[0], bottom[0]));
            links.push((top[2], bottom[2]));
            let mut verts = BTreeSet::new();
            for (a, b) in links {
                let p = index
                    .link(a, b)
                    .or_else(|| index.link(b, a))
                    .ok_or_else(|| Error::Defect(format!("brick side {a:?}-{b:?} missing")))?;
                verts.extend(self.subdiv[p].path.vertices.iter().copied());
            }
            out.push(Brick {
                branch: corners,
                vertices: verts.into_iter().collect(),
            });
        }
        Ok(out)
    }

    /// All vertices of the wall, sorted.
    pub fn wall_vertices(&self) -> Vec<VertexId> {
        let mut set = BTreeSet::new();
        for s in &self.subdiv {
            set.extend(s.path.vertices.iter().copied());
        }
        set.into_iter().collect()
    }

    pub fn index(&self) -> WallIndex {
        WallIndex::new(self)
    }

    /// Same wall inside the reversed host: every arc flips and row `r`
    /// becomes row `2m + 1 - r`, which again satisfies the coordinate rules.
    pub fn reversed(&self) -> WallModel {
        let m = self.order;
        let flip = |(c, r): Coord| (c, 2 * m + 1 - r);
        let branch = self
            .branch
            .iter()
            .map(|b| BranchVertex {
                col: b.col,
                row: 2 * m + 1 - b.row,
                vertex: b.vertex,
            })
            .collect();
        let subdiv = self
            .subdiv
            .iter()
            .map(|s| SubdivisionPath {
                from: flip(s.to),
                to: flip(s.from),
                path: s.path.reversed(),
            })
            .collect();
        let horizontal_paths = (1..=2 * m)
            .map(|r| self.horizontal_paths[2 * m - r].reversed())
            .collect();
        let mut rev = WallModel {
            order: m,
            host: self.host.reverse(),
            branch,
            subdiv,
            vertical_cycles: self.vertical_cycles.iter().map(|c| c.reversed()).collect(),
            horizontal_paths,
            bricks: Vec::new(),
            perimeter: self.perimeter.clone(),
            interior: self.interior.clone(),
        };
        let index = rev.index();
        rev.bricks = rev.compute_bricks(&index).expect("reversed wall keeps its faces");
        rev
    }

    /// Moves the wall into another id space: `map[v]` is the new id of
    /// wall vertex `v`, and `n` is the size of the new ambient space.
    pub fn relabel(&self, map: &dyn Fn(VertexId) -> Option<VertexId>, n: usize) -> Result<WallModel> {
        let f = |v: VertexId| {
            map(v).ok_or_else(|| Error::Precondition(format!("wall vertex {v} has no image")))
        };
        let mut arcs = Vec::new();
        for &(t, h) in self.host.arcs() {
            arcs.push((f(t)?, f(h)?));
        }
        let mut host = Digraph::build(n, &arcs)?;
        for (&v, l) in self.host.labels() {
            host.set_label(f(v)?, l.clone())?;
        }
        let mp = |p: &DiPath| -> Result<DiPath> {
            Ok(DiPath::new(p.vertices.iter().map(|&v| f(v)).collect::<Result<_>>()?))
        };
        let mut branch = Vec::new();
        for b in &self.branch {
            branch.push(BranchVertex { vertex: f(b.vertex)?, ..*b });
        }
        let mut subdiv = Vec::new();
        for s in &self.subdiv {
            subdiv.push(SubdivisionPath { from: s.from, to: s.to, path: mp(&s.path)? });
        }
        let mut cycles = Vec::new();
        for c in &self.vertical_cycles {
            cycles.push(DiCycle::new(c.vertices.iter().map(|&v| f(v)).collect::<Result<_>>()?));
        }
        let mut rows = Vec::new();
        for p in &self.horizontal_paths {
            rows.push(mp(p)?);
        }
        let mset = |s: &[VertexId]| -> Result<Vec<VertexId>> {
            let mut v: Vec<VertexId> = s.iter().map(|&x| f(x)).collect::<Result<_>>()?;
            v.sort_unstable();
            Ok(v)
        };
        let mut bricks = Vec::new();
        for b in &self.bricks {
            bricks.push(Brick { branch: b.branch.clone(), vertices: mset(&b.vertices)? });
        }
        Ok(WallModel {
            order: self.order,
            host,
            branch,
            subdiv,
            vertical_cycles: cycles,
            horizontal_paths: rows,
            bricks,
            perimeter: mset(&self.perimeter)?,
            interior: mset(&self.interior)?,
        })
    }

    /// Checks every structural invariant of the certificate.
    pub fn validate(&self) -> Result<()> {
        let m = self.order;
        let w = 2 * m;
        let bad = |s: String| Err(Error::InvalidArgument(format!("wall certificate: {s}")));
        if m < 2 {
            return bad("order below 2".into());
        }
        if self.branch.len() != w * w {
            return bad(format!("{} branch vertices, expected {}", self.branch.len(), w * w));
        }
        let mut coords = BTreeSet::new();
        let mut branch_set = BTreeSet::new();
        for b in &self.branch {
            if b.col < 1 || b.col > w || b.row < 1 || b.row > w {
                return bad(format!("coordinate ({},{}) out of range", b.col, b.row));
            }
            self.host.check_vertex(b.vertex)?;
            if !coords.insert((b.col, b.row)) || !branch_set.insert(b.vertex) {
                return bad(format!("branch map not a bijection at ({},{})", b.col, b.row));
            }
        }
        let index = self.index();
        let expected: BTreeSet<(Coord, Coord)> = elementary_arcs(m).into_iter().collect();
        let present: BTreeSet<(Coord, Coord)> = self.subdiv.iter().map(|s| (s.from, s.to)).collect();
        if expected != present || self.subdiv.len() != expected.len() {
            return bad("subdivision paths do not match the elementary arcs".into());
        }
        let mut inner_seen = BTreeSet::new();
        let mut arc_union = BTreeSet::new();
        for s in &self.subdiv {
            let p = &s.path;
            p.validate(&self.host)?;
            if p.first() != Some(index.at(s.from)) || p.last() != Some(index.at(s.to)) {
                return bad(format!("path for {:?} -> {:?} has wrong ends", s.from, s.to));
            }
            for &v in &p.vertices[1..p.vertices.len() - 1] {
                if branch_set.contains(&v) || !inner_seen.insert(v) {
                    return bad(format!("subdivision vertex {v} shared or branch"));
                }
            }
            arc_union.extend(p.arcs());
        }
        let host_arcs: BTreeSet<Arc> = self.host.arcs().iter().copied().collect();
        if host_arcs != arc_union {
            return bad("host arcs differ from the union of subdivision paths".into());
        }
        if self.horizontal_paths.len() != w || self.vertical_cycles.len() != m {
            return bad("wrong number of rows or vertical cycles".into());
        }
        for (i, p) in self.horizontal_paths.iter().enumerate() {
            let r = i + 1;
            p.validate(&self.host)?;
            let seen: Vec<Coord> = p.vertices.iter().filter_map(|&v| index.coord(v)).collect();
            if seen != row_coords(m, r) {
                return bad(format!("row {r} violates the coordinate rule"));
            }
        }
        for (i, q) in self.vertical_cycles.iter().enumerate() {
            let c = i + 1;
            q.validate(&self.host)?;
            let cols: BTreeSet<usize> = q
                .vertices
                .iter()
                .filter_map(|&v| index.coord(v))
                .map(|(col, _)| col)
                .collect();
            if cols != [2 * c - 1, 2 * c].into_iter().collect() {
                return bad(format!("Q_{c} leaves its two columns"));
            }
        }
        let mut per: BTreeSet<VertexId> = self.vertical_cycles[0].vertices.iter().copied().collect();
        per.extend(self.vertical_cycles[m - 1].vertices.iter().copied());
        let per_v: Vec<VertexId> = per.iter().copied().collect();
        if per_v != self.perimeter {
            return bad("perimeter is not V(Q_1) + V(Q_m)".into());
        }
        let int_v: Vec<VertexId> = self
            .wall_vertices()
            .into_iter()
            .filter(|v| !per.contains(v))
            .collect();
        if int_v != self.interior {
            return bad("interior is not the complement of the perimeter".into());
        }
        let recomputed = self.compute_bricks(&index)?;
        if recomputed != self.bricks {
            return bad("bricks differ from the face structure".into());
        }
        for b in &self.bricks {
            let nb = b.vertices.iter().filter(|v| branch_set.contains(v)).count();
            if nb != 6 {
                return bad(format!("brick with {nb} branch vertices"));
            }
        }
        Ok(())
    }
}

/// Lookup tables over a [`WallModel`].
#[derive(Clone, Debug)]
pub struct WallIndex {
    pub order: usize,
    coord: HashMap<VertexId, Coord>,
    at: HashMap<Coord, VertexId>,
    link: HashMap<(Coord, Coord), usize>,
    in_wall: Vec<bool>,
    interior: Vec<bool>,
    bricks_of: HashMap<VertexId, Vec<usize>>,
}

impl WallIndex {
    fn new(w: &WallModel) -> WallIndex {
        let n = w.host.n();
        let mut in_wall = vec![false; n];
        let mut interior = vec![false; n];
        for s in &w.subdiv {
            for &v in &s.path.vertices {
                in_wall[v] = true;
            }
        }
        for &v in &w.interior {
            interior[v] = true;
        }
        let mut bricks_of: HashMap<VertexId, Vec<usize>> = HashMap::new();
        for (i, b) in w.bricks.iter().enumerate() {
            for &v in &b.vertices {
                bricks_of.entry(v).or_default().push(i);
            }
        }
        WallIndex {
            order: w.order,
            coord: w.branch.iter().map(|b| (b.vertex, (b.col, b.row))).collect(),
            at: w.branch.iter().map(|b| ((b.col, b.row), b.vertex)).collect(),
            link: w.subdiv.iter().enumerate().map(|(i, s)| ((s.from, s.to), i)).collect(),
            in_wall,
            interior,
            bricks_of,
        }
    }

    /// Branch vertex at `(col, row)`; rows wrap modulo `2m`.
    pub fn at(&self, (c, r): Coord) -> VertexId {
        self.at[&(c, wrap_row(self.order, r))]
    }

    pub fn try_at(&self, (c, r): Coord) -> Option<VertexId> {
        if r == 0 {
            return None;
        }
        self.at.get(&(c, wrap_row(self.order, r))).copied()
    }

    pub fn coord(&self, v: VertexId) -> Option<Coord> {
        self.coord.get(&v).copied()
    }

    /// Index of the subdivision path for the elementary arc `a -> b`.
    pub fn link(&self, a: Coord, b: Coord) -> Option<usize> {
        let m = self.order;
        self.link
            .get(&((a.0, wrap_row(m, a.1)), (b.0, wrap_row(m, b.1))))
            .copied()
    }

    pub fn in_wall(&self, v: VertexId) -> bool {
        self.in_wall.get(v).copied().unwrap_or(false)
    }

    pub fn is_interior(&self, v: VertexId) -> bool {
        self.interior.get(v).copied().unwrap_or(false)
    }

    pub fn is_perimeter(&self, v: VertexId) -> bool {
        self.in_wall(v) && !self.is_interior(v)
    }

    pub fn bricks_of(&self, v: VertexId) -> &[usize] {
        self.bricks_of.get(&v).map_or(&[], |b| b.as_slice())
    }

    pub fn ambient_len(&self) -> usize {
        self.in_wall.len()
    }
}

/// A wall whose subdivision makes every directed cycle the same length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EqualLengthWall {
    pub wall: WallModel,
    pub target_length: usize,
    /// Weight (subdivision length) per elementary arc.
    pub weights: Vec<(Coord, Coord, usize)>,
    /// The arcs from the last row back to the first.
    pub wrap_arcs: Vec<(Coord, Coord)>,
}

/// Subdivides `W_k` so that every directed cycle has length `4k^2`: arcs
/// off the wrap set get the position difference in a topological order of
/// the remaining acyclic wall, and each wrap arc tops its cycle up to `L`.
pub fn gen_equal_length_wall(k: usize) -> Result<EqualLengthWall> {
    if k < 2 {
        return Err(Error::InvalidArgument("equal-length wall needs k >= 2".into()));
    }
    let w = 2 * k;
    let target = 4 * k * k;
    let id = |(c, r): Coord| (r - 1) * w + (c - 1);
    let arcs = elementary_arcs(k);
    let is_wrap = |&(s, t): &(Coord, Coord)| s.1 == w && t.1 == 1;
    let mut indeg = vec![0usize; w * w];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); w * w];
    for a in arcs.iter().filter(|a| !is_wrap(a)) {
        indeg[id(a.1)] += 1;
        out[id(a.0)].push(id(a.1));
    }
    let mut heap: BinaryHeap<Reverse<usize>> =
        (0..w * w).filter(|&v| indeg[v] == 0).map(Reverse).collect();
    let mut pos = vec![usize::MAX; w * w];
    let mut next = 0;
    while let Some(Reverse(v)) = heap.pop() {
        pos[v] = next;
        next += 1;
        for &x in &out[v] {
            indeg[x] -= 1;
            if indeg[x] == 0 {
                heap.push(Reverse(x));
            }
        }
    }
    if next != w * w {
        return Err(Error::Defect("wall minus wrap arcs is not acyclic".into()));
    }
    let mut lengths = BTreeMap::new();
    let mut weights = Vec::new();
    let mut wrap_arcs = Vec::new();
    for a in &arcs {
        let (pt, ph) = (pos[id(a.0)], pos[id(a.1)]);
        let wt = if is_wrap(a) {
            wrap_arcs.push(*a);
            target - (pt - ph)
        } else {
            ph - pt
        };
        lengths.insert(*a, wt);
        weights.push((a.0, a.1, wt));
    }
    Ok(EqualLengthWall {
        wall: gen_wall(k, Some(&lengths))?,
        target_length: target,
        weights,
        wrap_arcs,
    })
}
