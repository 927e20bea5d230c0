use serde::{Deserialize, Serialize};

/// Outcome of a checker: pass, or fail with the first violation found.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violation: Option<String>,
}

impl Verdict {
    pub fn pass() -> Self {
        Verdict { ok: true, violation: None }
    }

    pub fn fail(msg: impl Into<String>) -> Self {
        Verdict { ok: false, violation: Some(msg.into()) }
    }

    pub fn from_result<E: std::fmt::Display>(r: Result<(), E>) -> Self {
        match r {
            Ok(()) => Self::pass(),
            Err(e) => Self::fail(e.to_string()),
        }
    }
}
