//! File formats: JSON bundles pairing a digraph with its certificate,
//! pipeline results, and run manifests.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::digraph::{DiCycle, Digraph};
use crate::dtd::DirectedTreeDecomposition;
use crate::error::{Error, Result};
use crate::flatwall::{CaseCertificate, Route, TheoremMode};
use crate::gen::WallModel;
use crate::oracle::PackingClaim;
use crate::verdict::Verdict;

/// A digraph with a directed tree decomposition of it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecomposedDigraph {
    pub digraph: Digraph,
    pub decomposition: DirectedTreeDecomposition,
}

/// A digraph with a wall inside it; `designated` optionally lists
/// branch vertices of interest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatBundle {
    pub digraph: Digraph,
    pub wall: WallModel,
    #[serde(default)]
    pub designated: Vec<usize>,
}

/// Input of `pack --mode dispatch`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DispatchBundle {
    pub digraph: Digraph,
    pub certificate: CaseCertificate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<TheoremMode>,
}

/// Output of every packing pipeline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackResult {
    pub pipeline: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub route: Option<Route>,
    pub cycles: Vec<DiCycle>,
    pub lengths: Vec<usize>,
    pub claim: PackingClaim,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Vec<String>,
    /// SHA-256 of each input file.
    pub inputs: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    pub verdicts: Vec<Verdict>,
    pub wall_clock_ms: u128,
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json(value)?).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

/// The digraph carried by any bundle: a bare digraph, or the `digraph`,
/// `wall.host` or `source` member of a larger document.
pub fn extract_digraph(v: &Value) -> Result<Digraph> {
    if v.get("n").is_some() && v.get("arcs").is_some() {
        return Ok(serde_json::from_value(v.clone())?);
    }
    for key in ["digraph", "source"] {
        if let Some(inner) = v.get(key) {
            return extract_digraph(inner);
        }
    }
    if let Some(w) = v.get("wall") {
        if let Some(h) = w.get("host") {
            return extract_digraph(h);
        }
        return extract_digraph(w);
    }
    if let Some(h) = v.get("host") {
        return extract_digraph(h);
    }
    Err(Error::Format("no digraph found in document".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{gen_f, gen_wall};

    #[test]
    fn digraph_found_in_bundles() {
        let (d, dec) = gen_f(2).unwrap();
        let v = serde_json::to_value(DecomposedDigraph { digraph: d.clone(), decomposition: dec }).unwrap();
        assert_eq!(extract_digraph(&v).unwrap(), d);
        let w = gen_wall(2, None).unwrap();
        let v = serde_json::to_value(&w).unwrap();
        assert_eq!(extract_digraph(&v).unwrap(), w.host);
        assert!(extract_digraph(&serde_json::json!({"x": 1})).is_err());
    }

    #[test]
    fn digests_are_stable() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.json");
        write_json(&p, &serde_json::json!({"n": 2, "arcs": [[0, 1]]})).unwrap();
        let a = sha256_file(&p).unwrap();
        assert_eq!(a.len(), 64);
        assert_eq!(a, sha256_file(&p).unwrap());
    }
}
