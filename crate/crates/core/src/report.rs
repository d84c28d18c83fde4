//! Structured pass/fail records with witnesses.

use std::time::Instant;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Status::Pass
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InstanceTag {
    pub d: u32,
    pub l: u32,
    pub gauge: String,
}

/// One sub-check inside a report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Entry {
    pub label: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub got: Option<String>,
    /// Complex residual as `[re, im]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Entry {
    pub fn pass(label: impl Into<String>) -> Self {
        Entry {
            label: label.into(),
            status: Status::Pass,
            witness: None,
            expected: None,
            got: None,
            residual: None,
            note: None,
        }
    }

    pub fn fail(label: impl Into<String>, witness: impl Into<String>) -> Self {
        Entry { status: Status::Fail, witness: Some(witness.into()), ..Entry::pass(label) }
    }

    /// Pass iff `ok`; a failing entry gets `witness` (evaluated lazily).
    pub fn check(label: impl Into<String>, ok: bool, witness: impl FnOnce() -> String) -> Self {
        if ok {
            Entry::pass(label)
        } else {
            Entry::fail(label, witness())
        }
    }

    /// Numeric comparison: pass iff `|residual| < tol`.
    pub fn numeric(label: impl Into<String>, residual: num_complex::Complex64, tol: f64) -> Self {
        let r = residual.norm();
        let mut e =
            if r < tol { Entry::pass(label) } else { Entry::fail(label, format!("residual {r:.3e} ≥ {tol:.1e}")) };
        e.residual = Some([residual.re, residual.im]);
        e
    }

    pub fn with_expected(mut self, expected: impl Into<String>, got: impl Into<String>) -> Self {
        self.expected = Some(expected.into());
        self.got = Some(got.into());
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub check: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<InstanceTag>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub got: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub elapsed_ms: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub entries: Vec<Entry>,
}

impl VerificationReport {
    /// Passes iff every entry passes; the first failing entry is the witness.
    pub fn from_entries(check: impl Into<String>, entries: Vec<Entry>) -> Self {
        let failing = entries.iter().find(|e| !e.status.is_pass());
        let witness = failing.map(|e| match &e.witness {
            Some(w) => format!("{}: {}", e.label, w),
            None => e.label.clone(),
        });
        VerificationReport {
            check: check.into(),
            instance: None,
            status: Status::from_bool(failing.is_none()),
            witness,
            expected: failing.and_then(|e| e.expected.clone()),
            got: failing.and_then(|e| e.got.clone()),
            note: None,
            elapsed_ms: 0,
            entries,
        }
    }

    /// A failed report for a computation that returned an error.
    pub fn errored(check: impl Into<String>, err: &crate::Error) -> Self {
        Self::from_entries(check, vec![Entry::fail("computation", err.to_string())])
    }

    pub fn with_instance(mut self, tag: InstanceTag) -> Self {
        self.instance = Some(tag);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status.is_pass()
    }

    pub fn summary_line(&self) -> String {
        let mut s = format!("{} {}", self.status.label(), self.check);
        if let Some(t) = &self.instance {
            s.push_str(&format!(" [d={} l={} gauge={}]", t.d, t.l, t.gauge));
        }
        s.push_str(&format!(" ({} ms)", self.elapsed_ms));
        if let Some(n) = &self.note {
            s.push_str(&format!(" [{n}]"));
        }
        if let Some(w) = &self.witness {
            s.push_str(&format!(" witness: {w}"));
        }
        s
    }
}

/// Runs `f` and stamps the wall time onto its report.
pub fn timed<F: FnOnce() -> VerificationReport>(f: F) -> VerificationReport {
    let start = Instant::now();
    let mut r = f();
    r.elapsed_ms = start.elapsed().as_millis() as u64;
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_failure_is_witness() {
        let r = VerificationReport::from_entries(
            "demo",
            vec![Entry::pass("a"), Entry::fail("b", "x != y"), Entry::fail("c", "z")],
        );
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.witness.as_deref(), Some("b: x != y"));
        assert!(VerificationReport::from_entries("ok", vec![Entry::pass("a")]).passed());
    }

    #[test]
    fn json_key_order_is_fixed() {
        let r = VerificationReport::from_entries("demo", vec![Entry::pass("a")]).with_instance(InstanceTag {
            d: 1,
            l: 2,
            gauge: "e8".into(),
        });
        let s = serde_json::to_string(&r).unwrap();
        assert!(
            s.starts_with(r#"{"check":"demo","instance":{"d":1,"l":2,"gauge":"e8"},"status":"pass","elapsed_ms":0"#)
        );
    }
}
