//! Butterfly-minor models as replayable operation traces, weighted
//! contraction, and lifting of distinct-weight cycle packings from a
//! complete digraph back to the host.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::digraph::{Arc, DiCycle, Digraph, VertexId};
use crate::error::{Error, Result};

/// Strictly positive exact weights on arcs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ArcWeighting {
    map: BTreeMap<Arc, BigRational>,
}

impl ArcWeighting {
    pub fn new() -> Self {
        Self::default()
    }

    /// Weight 1 on every arc of `d`.
    pub fn unit(d: &Digraph) -> Self {
        ArcWeighting {
            map: d.arcs().iter().map(|&a| (a, BigRational::one())).collect(),
        }
    }

    pub fn insert(&mut self, arc: Arc, w: BigRational) -> Result<()> {
        if !w.is_positive() {
            return Err(Error::InvalidArgument(format!(
                "weight {w} on ({}, {}) is not positive",
                arc.0, arc.1
            )));
        }
        self.map.insert(arc, w);
        Ok(())
    }

    pub fn get(&self, arc: Arc) -> Option<&BigRational> {
        self.map.get(&arc)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Arc, &BigRational)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    fn weight(&self, a: Arc) -> Result<&BigRational> {
        self.map
            .get(&a)
            .ok_or_else(|| Error::InvalidArgument(format!("arc ({}, {}) has no weight", a.0, a.1)))
    }

    pub fn cycle_weight(&self, c: &DiCycle) -> Result<BigRational> {
        let mut s = BigRational::zero();
        for a in c.arcs() {
            s += self.weight(a)?;
        }
        Ok(s)
    }

    /// Every arc of `d` carries a weight and nothing else does.
    pub fn check_on(&self, d: &Digraph) -> Result<()> {
        if self.map.len() != d.arc_count() || d.arcs().iter().any(|a| !self.map.contains_key(a)) {
            return Err(Error::InvalidArgument("weighting does not match the arc set".into()));
        }
        Ok(())
    }
}

fn int_value(i: &BigInt) -> Value {
    match i64::try_from(i) {
        Ok(x) => Value::from(x),
        Err(_) => Value::from(i.to_string()),
    }
}

fn parse_int(v: &Value) -> std::result::Result<BigInt, String> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| format!("not an integer: {n}")),
        Value::String(s) => s.parse().map_err(|_| format!("not an integer: {s}")),
        other => Err(format!("not an integer: {other}")),
    }
}

/// Serialized as `[[t, h, num, den], ...]`; big parts become strings.
impl Serialize for ArcWeighting {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Value> = self
            .map
            .iter()
            .map(|(&(t, h), w)| {
                Value::Array(vec![t.into(), h.into(), int_value(w.numer()), int_value(w.denom())])
            })
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ArcWeighting {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let rows: Vec<Vec<Value>> = Vec::deserialize(d)?;
        let mut out = ArcWeighting::new();
        for r in rows {
            if r.len() != 4 {
                return Err(D::Error::custom("weight rows are [t, h, num, den]"));
            }
            let t = r[0].as_u64().ok_or_else(|| D::Error::custom("bad tail"))? as usize;
            let h = r[1].as_u64().ok_or_else(|| D::Error::custom("bad head"))? as usize;
            let num = parse_int(&r[2]).map_err(D::Error::custom)?;
            let den = parse_int(&r[3]).map_err(D::Error::custom)?;
            if den.is_zero() {
                return Err(D::Error::custom("zero denominator"));
            }
            out.insert((t, h), BigRational::new(num, den))
                .map_err(D::Error::custom)?;
        }
        Ok(out)
    }
}

/// Which degree condition makes the arc `(u, v)` contractible.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Witness {
    /// `d^+(u) = 1`: `u` disappears, its in-arcs are redirected to `v`.
    Tail,
    /// `d^-(v) = 1`: `v` disappears, its out-arcs now leave `u`.
    Head,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MinorOp {
    DeleteVertex(VertexId),
    DeleteArc(VertexId, VertexId),
    Contract(VertexId, VertexId, Witness),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct OpDoc {
    op: String,
    args: Vec<VertexId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    witness: Option<Witness>,
}

impl Serialize for MinorOp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let doc = match *self {
            MinorOp::DeleteVertex(v) => OpDoc { op: "dv".into(), args: vec![v], witness: None },
            MinorOp::DeleteArc(a, b) => OpDoc { op: "da".into(), args: vec![a, b], witness: None },
            MinorOp::Contract(a, b, w) => OpDoc { op: "ca".into(), args: vec![a, b], witness: Some(w) },
        };
        doc.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MinorOp {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let doc = OpDoc::deserialize(d)?;
        match (doc.op.as_str(), doc.args.as_slice(), doc.witness) {
            ("dv", &[v], _) => Ok(MinorOp::DeleteVertex(v)),
            ("da", &[a, b], _) => Ok(MinorOp::DeleteArc(a, b)),
            ("ca", &[a, b], Some(w)) => Ok(MinorOp::Contract(a, b, w)),
            _ => Err(D::Error::custom(format!("malformed op {:?}", doc.op))),
        }
    }
}

/// A butterfly-minor certificate: replaying `ops` on `source` leaves a
/// bidirected complete digraph whose vertices `iso` maps onto `0..t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorModel {
    pub source: Digraph,
    pub ops: Vec<MinorOp>,
    #[serde(with = "iso_keys")]
    pub iso: BTreeMap<VertexId, VertexId>,
}

/// JSON object keys are strings; parse them back whatever path the
/// deserializer took (buffered content in tagged enums keeps them as text).
mod iso_keys {
    use std::collections::BTreeMap;

    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::digraph::VertexId;

    pub fn serialize<S: Serializer>(m: &BTreeMap<VertexId, VertexId>, s: S) -> Result<S::Ok, S::Error> {
        m.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<VertexId, VertexId>, D::Error> {
        BTreeMap::<String, VertexId>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| k.parse().map(|k| (k, v)).map_err(|_| D::Error::custom(format!("bad vertex id {k:?}"))))
            .collect()
    }
}

impl MinorModel {
    /// The empty-trace model of a complete digraph on itself.
    pub fn identity(t: usize) -> Result<MinorModel> {
        Ok(MinorModel {
            source: crate::gen::gen_complete(t)?,
            ops: Vec::new(),
            iso: (0..t).map(|v| (v, v)).collect(),
        })
    }

    pub fn terminal_order(&self) -> usize {
        self.iso.len()
    }
}

/// What one contraction did, enough to undo it on cycles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractRecord {
    pub arc: Arc,
    pub witness: Witness,
    pub removed: VertexId,
    pub kept: VertexId,
    /// New arcs, each realized by a 2-path through `removed`.
    pub synthesized: BTreeSet<Arc>,
    /// Arcs that would have been synthesized but already existed; the
    /// existing arc and its weight were kept.
    pub collisions: Vec<Arc>,
}

/// Mutable digraph with stable vertex ids, used for replay.
#[derive(Clone, Debug)]
struct WorkGraph {
    alive: Vec<bool>,
    out: Vec<BTreeSet<VertexId>>,
    inn: Vec<BTreeSet<VertexId>>,
    w: Option<BTreeMap<Arc, BigRational>>,
}

impl WorkGraph {
    fn new(d: &Digraph, w: Option<&ArcWeighting>) -> Self {
        WorkGraph {
            alive: vec![true; d.n()],
            out: d.vertices().map(|v| d.out_neighbors(v).iter().copied().collect()).collect(),
            inn: d.vertices().map(|v| d.in_neighbors(v).iter().copied().collect()).collect(),
            w: w.map(|w| w.map.clone()),
        }
    }

    fn has_arc(&self, a: VertexId, b: VertexId) -> bool {
        a < self.alive.len() && self.out[a].contains(&b)
    }

    fn remove_arc(&mut self, a: VertexId, b: VertexId) {
        self.out[a].remove(&b);
        self.inn[b].remove(&a);
        if let Some(w) = &mut self.w {
            w.remove(&(a, b));
        }
    }

    fn remove_vertex(&mut self, v: VertexId) {
        for b in std::mem::take(&mut self.out[v]) {
            self.inn[b].remove(&v);
            if let Some(w) = &mut self.w {
                w.remove(&(v, b));
            }
        }
        for a in std::mem::take(&mut self.inn[v]) {
            self.out[a].remove(&v);
            if let Some(w) = &mut self.w {
                w.remove(&(a, v));
            }
        }
        self.alive[v] = false;
    }

    fn apply(&mut self, op: &MinorOp) -> std::result::Result<Option<ContractRecord>, String> {
        let live = |s: &Self, v: VertexId| v < s.alive.len() && s.alive[v];
        match *op {
            MinorOp::DeleteVertex(v) => {
                if !live(self, v) {
                    return Err(format!("vertex {v} is not present"));
                }
                self.remove_vertex(v);
                Ok(None)
            }
            MinorOp::DeleteArc(a, b) => {
                if !self.has_arc(a, b) {
                    return Err(format!("arc ({a}, {b}) is not present"));
                }
                self.remove_arc(a, b);
                Ok(None)
            }
            MinorOp::Contract(u, v, witness) => {
                if !self.has_arc(u, v) {
                    return Err(format!("arc ({u}, {v}) is not present"));
                }
                let through = self.w.as_ref().map(|w| w[&(u, v)].clone());
                let mut rec = ContractRecord {
                    arc: (u, v),
                    witness,
                    removed: 0,
                    kept: 0,
                    synthesized: BTreeSet::new(),
                    collisions: Vec::new(),
                };
                let mut new_arcs: Vec<(Arc, Option<BigRational>)> = Vec::new();
                match witness {
                    Witness::Tail => {
                        if self.out[u].len() != 1 {
                            return Err(format!("({u}, {v}) not contractible: d+({u}) = {}", self.out[u].len()));
                        }
                        rec.removed = u;
                        rec.kept = v;
                        for &x in &self.inn[u] {
                            if x != v {
                                let wt = self.w.as_ref().map(|w| &w[&(x, u)] + through.as_ref().expect("weighted"));
                                new_arcs.push(((x, v), wt));
                            }
                        }
                    }
                    Witness::Head => {
                        if self.inn[v].len() != 1 {
                            return Err(format!("({u}, {v}) not contractible: d-({v}) = {}", self.inn[v].len()));
                        }
                        rec.removed = v;
                        rec.kept = u;
                        for &y in &self.out[v] {
                            if y != u {
                                let wt = self.w.as_ref().map(|w| through.as_ref().expect("weighted") + &w[&(v, y)]);
                                new_arcs.push(((u, y), wt));
                            }
                        }
                    }
                }
                self.remove_vertex(rec.removed);
                for ((a, b), wt) in new_arcs {
                    if self.has_arc(a, b) {
                        rec.collisions.push((a, b));
                        continue;
                    }
                    self.out[a].insert(b);
                    self.inn[b].insert(a);
                    if let (Some(w), Some(wt)) = (&mut self.w, wt) {
                        w.insert((a, b), wt);
                    }
                    rec.synthesized.insert((a, b));
                }
                Ok(Some(rec))
            }
        }
    }

    fn live_vertices(&self) -> Vec<VertexId> {
        (0..self.alive.len()).filter(|&v| self.alive[v]).collect()
    }

    fn arc_count(&self) -> usize {
        self.live_vertices().iter().map(|&v| self.out[v].len()).sum()
    }
}

/// Contracts `e = (u, v)`, using the tail condition when `d^+(u) = 1` and
/// the head condition otherwise. The surviving vertices are renumbered
/// densely; the returned map sends old ids to new ids.
pub fn contract(
    d: &Digraph,
    e: Arc,
    w: Option<&ArcWeighting>,
) -> Result<(Digraph, Option<ArcWeighting>, ContractRecord, Vec<Option<VertexId>>)> {
    let (u, v) = e;
    if !d.has_arc(u, v) {
        return Err(Error::MissingArc(u, v));
    }
    let witness = if d.out_degree(u) == 1 {
        Witness::Tail
    } else if d.in_degree(v) == 1 {
        Witness::Head
    } else {
        return Err(Error::NotContractible(u, v));
    };
    contract_with(d, e, witness, w)
}

/// [`contract`] under a given witness, which decides the vertex removed.
pub fn contract_with(
    d: &Digraph,
    e: Arc,
    witness: Witness,
    w: Option<&ArcWeighting>,
) -> Result<(Digraph, Option<ArcWeighting>, ContractRecord, Vec<Option<VertexId>>)> {
    let (u, v) = e;
    if !d.has_arc(u, v) {
        return Err(Error::MissingArc(u, v));
    }
    if let Some(w) = w {
        w.check_on(d)?;
    }
    let mut g = WorkGraph::new(d, w);
    let rec = g
        .apply(&MinorOp::Contract(u, v, witness))
        .map_err(|_| Error::NotContractible(u, v))?
        .expect("contraction record");
    let (out, map, weights) = g.freeze();
    Ok((out, weights, rec, map))
}

impl WorkGraph {
    fn freeze(&self) -> (Digraph, Vec<Option<VertexId>>, Option<ArcWeighting>) {
        let live = self.live_vertices();
        let mut map = vec![None; self.alive.len()];
        for (i, &v) in live.iter().enumerate() {
            map[v] = Some(i);
        }
        let mut arcs = Vec::new();
        for &a in &live {
            for &b in &self.out[a] {
                arcs.push((map[a].expect("live"), map[b].expect("live")));
            }
        }
        let d = Digraph::build(live.len(), &arcs).expect("work graph stays simple");
        let weights = self.w.as_ref().map(|w| ArcWeighting {
            map: w
                .iter()
                .map(|(&(a, b), x)| ((map[a].expect("live"), map[b].expect("live")), x.clone()))
                .collect(),
        });
        (d, map, weights)
    }
}

/// Step-level replay report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelReport {
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

struct Replay {
    graph: WorkGraph,
    records: Vec<Option<ContractRecord>>,
}

fn replay(m: &MinorModel, w: Option<&ArcWeighting>) -> std::result::Result<Replay, (usize, String)> {
    let mut g = WorkGraph::new(&m.source, w);
    let mut records = Vec::with_capacity(m.ops.len());
    for (i, op) in m.ops.iter().enumerate() {
        records.push(g.apply(op).map_err(|r| (i, r))?);
    }
    let step = m.ops.len();
    let live = g.live_vertices();
    let keys: Vec<VertexId> = m.iso.keys().copied().collect();
    if live != keys {
        return Err((step, format!("terminal vertices {live:?} differ from the isomorphism domain")));
    }
    let t = live.len();
    let images: BTreeSet<VertexId> = m.iso.values().copied().collect();
    if images.len() != t || images.iter().any(|&x| x >= t) {
        return Err((step, "isomorphism is not a bijection onto 0..t".into()));
    }
    if g.arc_count() != t * t.saturating_sub(1) {
        return Err((step, format!("terminal has {} arcs, expected {}", g.arc_count(), t * (t - 1))));
    }
    Ok(Replay { graph: g, records })
}

pub fn validate_model(m: &MinorModel) -> ModelReport {
    match replay(m, None) {
        Ok(_) => ModelReport { ok: true, step: None, reason: None },
        Err((step, reason)) => ModelReport { ok: false, step: Some(step), reason: Some(reason) },
    }
}

/// Smallest complete digraph order that carries `k` disjoint cycles of
/// distinct weight under every weighting: `(k^2 + 3k) / 2`.
pub fn required_order(k: usize) -> usize {
    (k * k + 3 * k) / 2
}

/// `k` disjoint cycles of pairwise distinct weight in the complete digraph
/// on `0..t`. Block `i` (sizes 2, 3, .., k+1, ascending ids) offers `i`
/// nested cycles of strictly increasing weight around its lowest vertex;
/// one per block is chosen greedily.
pub fn complete_base_cycles(t: usize, w: &ArcWeighting, k: usize) -> Result<Vec<DiCycle>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    if t < required_order(k) {
        return Err(Error::Precondition(format!(
            "complete digraph of order {t} below {}",
            required_order(k)
        )));
    }
    let kt = crate::gen::gen_complete(t)?;
    w.check_on(&kt)?;
    let mut used: BTreeSet<BigRational> = BTreeSet::new();
    let mut out = Vec::with_capacity(k);
    let mut start = 0;
    for i in 1..=k {
        let block: Vec<VertexId> = (start..start + i + 1).collect();
        start += i + 1;
        let pivot = block[0];
        let mut others: Vec<VertexId> = block[1..].to_vec();
        others.sort_by(|&a, &b| w.weight((a, pivot)).expect("complete").cmp(w.weight((b, pivot)).expect("complete")).then(a.cmp(&b)));
        let mut chosen = None;
        for j in 1..=i {
            let mut vs = vec![pivot];
            vs.extend_from_slice(&others[..j]);
            let c = DiCycle::new(vs);
            let cw = w.cycle_weight(&c)?;
            if !used.contains(&cw) {
                chosen = Some((c, cw));
                break;
            }
        }
        let (c, cw) = chosen.ok_or_else(|| Error::Defect(format!("block {i} offers no fresh weight")))?;
        used.insert(cw);
        out.push(c);
    }
    Ok(out)
}

/// Lifts a distinct-weight packing of the terminal complete digraph back
/// to `m.source`. Weights are pushed forward through the trace, so every
/// lifted cycle keeps its terminal weight exactly.
pub fn lift_pack(m: &MinorModel, w: &ArcWeighting, k: usize) -> Result<Vec<DiCycle>> {
    w.check_on(&m.source)?;
    let rp = replay(m, Some(w)).map_err(|(step, reason)| Error::InvalidModel { step, reason })?;
    let t = m.terminal_order();
    let tw = rp.graph.w.as_ref().expect("weighted replay");
    let mut kw = ArcWeighting::new();
    for (&(a, b), x) in tw {
        kw.insert((m.iso[&a], m.iso[&b]), x.clone())?;
    }
    let base = complete_base_cycles(t, &kw, k)?;
    let inv: BTreeMap<VertexId, VertexId> = m.iso.iter().map(|(&s, &x)| (x, s)).collect();
    let targets: Vec<BigRational> = base.iter().map(|c| kw.cycle_weight(c)).collect::<Result<_>>()?;
    let mut cycles: Vec<Vec<VertexId>> = base.iter().map(|c| c.vertices.iter().map(|x| inv[x]).collect()).collect();
    for (step, rec) in rp.records.iter().enumerate().rev() {
        let Some(rec) = rec else { continue };
        let mut changed = 0;
        for c in cycles.iter_mut() {
            let n = c.len();
            let hit = (0..n).find(|&i| rec.synthesized.contains(&(c[i], c[(i + 1) % n])));
            if let Some(i) = hit {
                changed += 1;
                c.insert(i + 1, rec.removed);
            }
        }
        if changed > 1 {
            return Err(Error::Defect(format!(
                "step {step}: {changed} cycles pass through the contracted vertex {}",
                rec.removed
            )));
        }
    }
    let out: Vec<DiCycle> = cycles.into_iter().map(DiCycle::new).collect();
    let mut seen = BTreeSet::new();
    for (c, target) in out.iter().zip(&targets) {
        c.validate(&m.source)?;
        if &w.cycle_weight(c)? != target {
            return Err(Error::Defect("lifted cycle changed weight".into()));
        }
        for &v in &c.vertices {
            if !seen.insert(v) {
                return Err(Error::Defect(format!("lifted cycles meet at {v}")));
            }
        }
    }
    Ok(out)
}

/// Unit weights turn distinct weights into distinct lengths.
pub fn distinct_length_pack_via_minor(d: &Digraph, m: &MinorModel, k: usize) -> Result<Vec<DiCycle>> {
    if &m.source != d {
        return Err(Error::InvalidArgument("model source differs from the digraph".into()));
    }
    lift_pack(m, &ArcWeighting::unit(d), k)
}

/// Random positive weights `p/q` with `1 <= p <= 60`, `1 <= q <= 12`.
pub fn random_weighting<R: Rng>(d: &Digraph, rng: &mut R) -> ArcWeighting {
    let mut w = ArcWeighting::new();
    for &a in d.arcs() {
        let p: i64 = rng.gen_range(1..=60);
        let q: i64 = rng.gen_range(1..=12);
        w.insert(a, BigRational::new(p.into(), q.into())).expect("positive");
    }
    w
}

/// Which expansions [`expand_model`] may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExpansionMix {
    pub subdivide: bool,
    pub split: bool,
    pub junk: bool,
}

impl ExpansionMix {
    pub const ALL: ExpansionMix = ExpansionMix { subdivide: true, split: true, junk: true };
    pub const SUBDIVIDE: ExpansionMix = ExpansionMix { subdivide: true, split: false, junk: false };
}

/// Builds a larger digraph together with a valid model of the complete
/// digraph on `t` vertices by applying `steps` random expansions
/// (subdivision, in/out split, junk vertex, junk arc), recording the
/// inverse operation of each, and finally shuffling the vertex ids.
pub fn expand_model<R: Rng>(t: usize, steps: usize, mix: ExpansionMix, rng: &mut R) -> Result<MinorModel> {
    let base = crate::gen::gen_complete(t)?;
    let mut out: Vec<BTreeSet<VertexId>> = base.vertices().map(|v| base.out_neighbors(v).iter().copied().collect()).collect();
    let mut undo: Vec<MinorOp> = Vec::new();
    let arcs_of = |out: &Vec<BTreeSet<VertexId>>| -> Vec<Arc> {
        out.iter().enumerate().flat_map(|(a, s)| s.iter().map(move |&b| (a, b))).collect()
    };
    let mut kinds = Vec::new();
    if mix.subdivide {
        kinds.push(0);
    }
    if mix.split {
        kinds.extend([1, 2]);
    }
    if mix.junk {
        kinds.extend([3, 4]);
    }
    if kinds.is_empty() {
        return Err(Error::InvalidArgument("empty expansion mix".into()));
    }
    for _ in 0..steps {
        let n = out.len();
        match *kinds.choose(rng).expect("non-empty") {
            0 => {
                let arcs = arcs_of(&out);
                let &(a, b) = arcs.choose(rng).expect("arcs exist");
                let x = n;
                out[a].remove(&b);
                out[a].insert(x);
                out.push(BTreeSet::from([b]));
                undo.push(MinorOp::Contract(x, b, Witness::Tail));
            }
            1 => {
                // out-split: v keeps some out-arcs, v' takes the rest
                let v = rng.gen_range(0..n);
                let x = n;
                let moved: BTreeSet<VertexId> = out[v].iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
                for y in &moved {
                    out[v].remove(y);
                }
                out[v].insert(x);
                out.push(moved);
                undo.push(MinorOp::Contract(v, x, Witness::Head));
            }
            2 => {
                // in-split: v' takes some in-arcs and feeds v
                let v = rng.gen_range(0..n);
                let x = n;
                let preds: Vec<VertexId> = (0..n).filter(|&a| out[a].contains(&v)).collect();
                for a in preds {
                    if rng.gen_bool(0.5) {
                        out[a].remove(&v);
                        out[a].insert(x);
                    }
                }
                out.push(BTreeSet::from([v]));
                undo.push(MinorOp::Contract(x, v, Witness::Tail));
            }
            3 => {
                let x = n;
                let mut s = BTreeSet::new();
                for y in 0..n {
                    if rng.gen_bool(0.2) {
                        s.insert(y);
                    }
                    if rng.gen_bool(0.2) {
                        out[y].insert(x);
                    }
                }
                out.push(s);
                undo.push(MinorOp::DeleteVertex(x));
            }
            _ => {
                let missing: Vec<Arc> = (0..n)
                    .flat_map(|a| (0..n).map(move |b| (a, b)))
                    .filter(|&(a, b)| a != b && !out[a].contains(&b))
                    .collect();
                if let Some(&(a, b)) = missing.choose(rng) {
                    out[a].insert(b);
                    undo.push(MinorOp::DeleteArc(a, b));
                }
            }
        }
    }
    let n = out.len();
    let mut perm: Vec<VertexId> = (0..n).collect();
    perm.shuffle(rng);
    let arcs: Vec<Arc> = arcs_of(&out).into_iter().map(|(a, b)| (perm[a], perm[b])).collect();
    let source = Digraph::build(n, &arcs)?;
    let ops = undo
        .into_iter()
        .rev()
        .map(|op| match op {
            MinorOp::DeleteVertex(v) => MinorOp::DeleteVertex(perm[v]),
            MinorOp::DeleteArc(a, b) => MinorOp::DeleteArc(perm[a], perm[b]),
            MinorOp::Contract(a, b, w) => MinorOp::Contract(perm[a], perm[b], w),
        })
        .collect();
    let iso = (0..t).map(|v| (perm[v], v)).collect();
    Ok(MinorModel { source, ops, iso })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::gen_complete;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(p: i64, r: i64) -> BigRational {
        BigRational::new(p.into(), r.into())
    }

    #[test]
    fn contract_path() {
        let d = Digraph::build(3, &[(0, 1), (1, 2)]).unwrap();
        let (c, _, rec, _) = contract(&d, (0, 1), None).unwrap();
        assert_eq!(c.n(), 2);
        assert_eq!(c.arc_count(), 1);
        assert_eq!(rec.witness, Witness::Tail);
    }

    #[test]
    fn contract_digon_with_in_arc() {
        // u = 0, v = 1, x = 2
        let d = Digraph::build(3, &[(0, 1), (1, 0), (2, 0)]).unwrap();
        let mut w = ArcWeighting::new();
        w.insert((0, 1), q(2, 1)).unwrap();
        w.insert((1, 0), q(5, 1)).unwrap();
        w.insert((2, 0), q(1, 1)).unwrap();
        let (c, cw, rec, map) = contract(&d, (0, 1), Some(&w)).unwrap();
        assert_eq!(rec.synthesized, BTreeSet::from([(2, 1)]));
        let (v, x) = (map[1].unwrap(), map[2].unwrap());
        assert!(c.has_arc(x, v));
        assert_eq!(cw.unwrap().get((x, v)), Some(&q(3, 1)));
    }

    #[test]
    fn non_contractible_rejected() {
        let d = gen_complete(3).unwrap();
        assert_eq!(contract(&d, (0, 1), None).unwrap_err(), Error::NotContractible(0, 1));
    }

    #[test]
    fn collision_keeps_existing_arc() {
        // 0 -> 1 -> 2 and 0 -> 2 already present: contracting (1, 2) would
        // synthesize (0, 2) again
        let d = Digraph::build(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let mut w = ArcWeighting::new();
        w.insert((0, 1), q(1, 1)).unwrap();
        w.insert((1, 2), q(1, 1)).unwrap();
        w.insert((0, 2), q(7, 1)).unwrap();
        let (c, cw, rec, map) = contract(&d, (1, 2), Some(&w)).unwrap();
        assert_eq!(rec.collisions, vec![(0, 2)]);
        assert!(rec.synthesized.is_empty());
        assert_eq!(c.arc_count(), 1);
        assert_eq!(cw.unwrap().get((map[0].unwrap(), map[2].unwrap())), Some(&q(7, 1)));
    }

    #[test]
    fn identity_and_bad_models() {
        assert!(validate_model(&MinorModel::identity(3).unwrap()).ok);
        let mut m = MinorModel::identity(3).unwrap();
        m.ops.push(MinorOp::Contract(0, 1, Witness::Tail));
        let r = validate_model(&m);
        assert!(!r.ok);
        assert_eq!(r.step, Some(0));
    }

    #[test]
    fn expansion_models_replay() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let m = expand_model(5, 25, ExpansionMix::ALL, &mut rng).unwrap();
            let r = validate_model(&m);
            assert!(r.ok, "{r:?}");
        }
    }

    #[test]
    fn base_cycles_unit_weights() {
        let k5 = gen_complete(5).unwrap();
        let cs = complete_base_cycles(5, &ArcWeighting::unit(&k5), 2).unwrap();
        assert_eq!(cs.iter().map(|c| c.len()).collect::<Vec<_>>(), vec![2, 3]);
        let k2 = gen_complete(2).unwrap();
        let cs = complete_base_cycles(2, &ArcWeighting::unit(&k2), 1).unwrap();
        assert_eq!(cs, vec![DiCycle::new(vec![0, 1])]);
        assert!(complete_base_cycles(4, &ArcWeighting::unit(&gen_complete(4).unwrap()), 2).is_err());
    }

    #[test]
    fn lift_through_subdivision_keeps_weight() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = expand_model(5, 6, ExpansionMix::SUBDIVIDE, &mut rng).unwrap();
        let cs = distinct_length_pack_via_minor(&m.source, &m, 2).unwrap();
        let w = ArcWeighting::unit(&m.source);
        let ws: BTreeSet<_> = cs.iter().map(|c| w.cycle_weight(c).unwrap()).collect();
        assert_eq!(ws.len(), 2);
    }

    #[test]
    fn weighting_json_round_trip() {
        let mut w = ArcWeighting::new();
        w.insert((0, 1), q(3, 4)).unwrap();
        let big = BigInt::from(10).pow(30);
        w.insert((1, 0), BigRational::new(big, 7.into())).unwrap();
        let s = serde_json::to_string(&w).unwrap();
        assert!(s.starts_with("[[0,1,3,4],[1,0,\""));
        let back: ArcWeighting = serde_json::from_str(&s).unwrap();
        assert_eq!(back, w);
        assert!(w.clone().insert((0, 1), q(0, 1)).is_err());
    }

    #[test]
    fn model_json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = expand_model(3, 5, ExpansionMix::ALL, &mut rng).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        let back: MinorModel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
