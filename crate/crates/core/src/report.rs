//! Machine-readable verdicts with concrete counterexample witnesses.

use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::tolerance::Tolerance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The enumeration space was too large; a seeded sample passed.
    /// Sampled runs certify nothing.
    SampledPass,
}

/// A concrete counterexample: the violating tuple plus both sides of the
/// violated relation. Slot names are check-specific ("A", "B", "C" for
/// subsets, "x", "y", "z" for points) and values are canonical keys or
/// labels, so a witness can be re-evaluated independently of the checker.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub relation: String,
    pub slots: Vec<(String, String)>,
    pub lhs: f64,
    pub rhs: f64,
    /// The violation sits inside `(0, eps]`: a strict inequality failed
    /// only by the tolerance margin. Flagged rather than silently decided.
    pub boundary: bool,
}

impl Witness {
    pub fn new(
        relation: impl Into<String>,
        slots: Vec<(String, String)>,
        lhs: f64,
        rhs: f64,
    ) -> Self {
        Witness {
            relation: relation.into(),
            slots,
            lhs,
            rhs,
            boundary: false,
        }
    }

    pub fn boundary(mut self) -> Self {
        self.boundary = true;
        self
    }

    pub fn slot(&self, name: &str) -> Option<&str> {
        self.slots
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_str())
    }
}

impl Serialize for Witness {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let extra = 3 + usize::from(self.boundary);
        let mut map = serializer.serialize_map(Some(self.slots.len() + extra))?;
        for (name, value) in &self.slots {
            map.serialize_entry(name, value)?;
        }
        map.serialize_entry("lhs", &self.lhs)?;
        map.serialize_entry("rhs", &self.rhs)?;
        map.serialize_entry("relation", &self.relation)?;
        if self.boundary {
            map.serialize_entry("boundary", &true)?;
        }
        map.end()
    }
}

/// Outcome of one checker run.
///
/// Invariants: a `fail` verdict always carries a witness that reproduces the
/// violation under the same tolerance; a `pass` verdict from an exhaustive
/// run has `triples_examined` equal to the full enumeration count of the
/// check.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub check: String,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub triples_examined: u64,
    pub epsilon: f64,
    pub note: Option<String>,
}

impl CheckReport {
    pub fn pass(check: impl Into<String>, examined: u64, tol: Tolerance) -> Self {
        CheckReport {
            check: check.into(),
            verdict: Verdict::Pass,
            witness: None,
            triples_examined: examined,
            epsilon: tol.eps(),
            note: None,
        }
    }

    pub fn sampled_pass(
        check: impl Into<String>,
        examined: u64,
        tol: Tolerance,
        note: impl Into<String>,
    ) -> Self {
        CheckReport {
            check: check.into(),
            verdict: Verdict::SampledPass,
            witness: None,
            triples_examined: examined,
            epsilon: tol.eps(),
            note: Some(note.into()),
        }
    }

    pub fn fail(
        check: impl Into<String>,
        witness: Witness,
        examined: u64,
        tol: Tolerance,
    ) -> Self {
        CheckReport {
            check: check.into(),
            verdict: Verdict::Fail,
            witness: Some(witness),
            triples_examined: examined,
            epsilon: tol.eps(),
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// True for `pass` and `sampled-pass` (exit-code 0 outcomes).
    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    pub fn render_text(&self) -> String {
        let mut out = format!(
            "check: {}\nverdict: {}\nrelations examined: {}\nepsilon: {}\n",
            self.check,
            match self.verdict {
                Verdict::Pass => "pass",
                Verdict::Fail => "fail",
                Verdict::SampledPass => "sampled-pass",
            },
            self.triples_examined,
            self.epsilon
        );
        if let Some(w) = &self.witness {
            out.push_str("witness:\n");
            for (name, value) in &w.slots {
                out.push_str(&format!("  {name} = {value}\n"));
            }
            out.push_str(&format!(
                "  violated: {} (lhs {} vs rhs {})\n",
                w.relation, w.lhs, w.rhs
            ));
            if w.boundary {
                out.push_str("  note: violation is inside the tolerance band\n");
            }
        }
        if let Some(n) = &self.note {
            out.push_str(&format!("note: {n}\n"));
        }
        out
    }
}

impl Serialize for CheckReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut n = 4;
        if self.witness.is_some() {
            n += 1;
        }
        if self.note.is_some() {
            n += 1;
        }
        let mut st = serializer.serialize_struct("CheckReport", n)?;
        st.serialize_field("check", &self.check)?;
        st.serialize_field("verdict", &self.verdict)?;
        if let Some(w) = &self.witness {
            st.serialize_field("witness", w)?;
        }
        st.serialize_field("triples_examined", &self.triples_examined)?;
        st.serialize_field("epsilon", &self.epsilon)?;
        if let Some(note) = &self.note {
            st.serialize_field("note", note)?;
        }
        st.end()
    }
}
