//! Check outcomes and their JSON form.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

/// Default absolute tolerance for closed-form identities.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    /// Process exit status for this verdict.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Randomized,
}

/// The concrete data behind a failure, or behind the smallest slack seen.
/// Point indices refer to the materialized point list; marginal indices and
/// subsets are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Two entries of a sampled graph.
    GraphPair {
        first: usize,
        second: usize,
        #[serde(serialize_with = "finite_or_null")]
        value: f64,
    },
    /// Two points of Γ and the selector K for which ⟨Σ_K z, Σ_{I∖K} z⟩ was evaluated.
    PointPair {
        first: usize,
        second: usize,
        subset: Vec<usize>,
        #[serde(serialize_with = "finite_or_null")]
        value: f64,
    },
    /// An n-tuple of points of Γ and the permutation applied to each marginal
    /// (0-based positions within the tuple).
    Cycle {
        points: Vec<usize>,
        permutations: Vec<Vec<usize>>,
        #[serde(serialize_with = "finite_or_null")]
        slack: f64,
    },
    /// A two-marginal projection Γ_{i,j} that is not monotone.
    Projection {
        marginals: [usize; 2],
        first: usize,
        second: usize,
        #[serde(serialize_with = "finite_or_null")]
        value: f64,
    },
    /// A probe location in H with the offending residual.
    Probe {
        point: Vec<f64>,
        #[serde(serialize_with = "finite_or_null")]
        residual: f64,
    },
    /// A point of X (grid node or sample) with the offending slack.
    Node {
        point: Vec<Vec<f64>>,
        #[serde(serialize_with = "finite_or_null")]
        slack: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub verdict: Verdict,
    /// Smallest slack over everything tested (+∞ when nothing was tested).
    #[serde(serialize_with = "finite_or_null")]
    pub margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", serialize_with = "finite_map")]
    pub metrics: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(check: impl Into<String>, verdict: Verdict, margin: f64) -> Self {
        Self {
            check: check.into(),
            verdict,
            margin,
            witness: None,
            seed: None,
            mode: None,
            metrics: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn inconclusive(check: impl Into<String>, note: impl Into<String>) -> Self {
        Self::new(check, Verdict::Inconclusive, f64::INFINITY).with_note(note)
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn with_metric(mut self, key: &str, value: f64) -> Self {
        self.metrics.insert(key.to_string(), value);
        self
    }

    pub fn metric(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).copied()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Running minimum of slacks together with the witness of the first minimum.
pub(crate) struct SlackTracker<W> {
    pub min: f64,
    pub witness: Option<W>,
    pub count: u64,
}

impl<W> SlackTracker<W> {
    pub fn new() -> Self {
        Self { min: f64::INFINITY, witness: None, count: 0 }
    }

    pub fn observe(&mut self, slack: f64, witness: impl FnOnce() -> W) {
        self.count += 1;
        // Strict comparison keeps the first minimizer; NaN counts as a violation.
        if slack < self.min || (slack.is_nan() && !self.min.is_nan()) {
            self.min = slack;
            self.witness = Some(witness());
        }
    }

    pub fn violated(&self, tol: f64) -> bool {
        self.min.is_nan() || self.min < -tol
    }
}

impl SlackTracker<Witness> {
    /// pass iff every slack ≥ −tol; the witness is attached on failure only.
    pub fn into_report(self, check: &str, tol: f64) -> CheckReport {
        let fail = self.violated(tol);
        let mut r = CheckReport::new(check, if fail { Verdict::Fail } else { Verdict::Pass }, self.min);
        if fail {
            r.witness = self.witness;
        }
        r.metrics.insert("tested".into(), self.count as f64);
        r
    }
}

fn finite_or_null<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

fn finite_map<S: Serializer>(m: &BTreeMap<String, f64>, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(m.len()))?;
    for (k, v) in m {
        if v.is_finite() {
            map.serialize_entry(k, v)?;
        } else {
            map.serialize_entry(k, &Option::<f64>::None)?;
        }
    }
    map.end()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let mut t = SlackTracker::new();
        t.observe(1.0, || Witness::GraphPair { first: 0, second: 1, value: 1.0 });
        t.observe(-0.5, || Witness::GraphPair { first: 0, second: 2, value: -0.5 });
        let mut r = t.into_report("graph_monotone", 1e-9);
        r.seed = Some(12345);
        r.mode = Some(Mode::Exhaustive);
        let j = r.to_json();
        assert_eq!(j["verdict"], "fail");
        assert_eq!(j["margin"], -0.5);
        assert_eq!(j["witness"]["kind"], "graph_pair");
        assert_eq!(j["seed"], 12345);
        assert_eq!(j["mode"], "exhaustive");
    }

    #[test]
    fn empty_margin_is_null() {
        let r = SlackTracker::<Witness>::new().into_report("x", 0.0);
        assert!(r.passed());
        assert!(r.to_json()["margin"].is_null());
    }

    #[test]
    fn first_minimizer_kept() {
        let mut t = SlackTracker::new();
        t.observe(-1.0, || 1);
        t.observe(-1.0, || 2);
        assert_eq!(t.witness, Some(1));
    }
}
