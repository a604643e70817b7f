//! Structured pass/fail reports. Field order is fixed by struct order so a
//! given config always serializes to byte-identical JSON; timings are the
//! one nondeterministic part and live behind an `Option`.

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// One named check with a human-readable witness (exact values or ball
/// endpoints rendered as strings).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub witness: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckSet {
    pub checks: Vec<Check>,
}

impl CheckSet {
    pub fn new() -> Self {
        CheckSet { checks: Vec::new() }
    }

    pub fn push(&mut self, name: impl Into<String>, pass: bool, witness: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            pass,
            witness: witness.into(),
        });
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.pass)
    }

    pub fn merge(&mut self, mut other: CheckSet) {
        self.checks.append(&mut other.checks);
    }

    pub fn len(&self) -> usize {
        self.checks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.checks.is_empty()
    }
}

/// Ordered key/value config echo; insertion order is serialization order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigEntry {
    pub key: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timing {
    pub name: String,
    pub millis: u64,
}

/// Full report for one command run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub config: Vec<ConfigEntry>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Vec<Timing>>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            config: Vec::new(),
            checks: Vec::new(),
            timings: None,
        }
    }

    pub fn config(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.config.push(ConfigEntry {
            key: key.into(),
            value: value.to_string(),
        });
        self
    }

    pub fn extend_checks(&mut self, set: CheckSet) -> &mut Self {
        self.checks.extend(set.checks);
        self
    }

    pub fn timing(&mut self, name: impl Into<String>, millis: u64) -> &mut Self {
        self.timings.get_or_insert_with(Vec::new).push(Timing {
            name: name.into(),
            millis,
        });
        self
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// 0 when every check passed, 1 otherwise. Usage errors (exit 2) never
    /// get as far as a report.
    pub fn exit_code(&self) -> i32 {
        if self.all_pass() {
            0
        } else {
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_field_order() {
        let mut r = Report::new("demo");
        r.config("r", 2).config("eps0", "1/2");
        let mut set = CheckSet::new();
        set.push("alpha", true, "1 <= 2");
        set.push("beta", false, "3 > 2");
        r.extend_checks(set);

        let json = serde_json::to_string(&r).unwrap();
        // No timings field at all when none were recorded.
        assert!(!json.contains("timings"));
        // Struct order is serialization order.
        let ka = json.find("schema_version").unwrap();
        let kb = json.find("command").unwrap();
        let kc = json.find("config").unwrap();
        let kd = json.find("checks").unwrap();
        assert!(ka < kb && kb < kc && kc < kd);

        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        assert!(!back.all_pass());
        assert_eq!(back.exit_code(), 1);
        assert_eq!(back.checks[1].name, "beta");
    }

    #[test]
    fn serialization_is_deterministic() {
        let build = || {
            let mut r = Report::new("demo");
            r.config("D", 20).config("M", 4);
            let mut set = CheckSet::new();
            set.push("x", true, "ok");
            r.extend_checks(set);
            serde_json::to_string(&r).unwrap()
        };
        assert_eq!(build(), build());
    }

    #[test]
    fn timings_are_optional_and_excluded_from_identity() {
        let mut a = Report::new("demo");
        let mut b = Report::new("demo");
        b.timing("solve", 12);
        let ja = serde_json::to_string(&a).unwrap();
        a.timing("solve", 99);
        let jb = serde_json::to_string(&b).unwrap();
        assert_ne!(ja, jb);
        // Stripping timings restores byte identity.
        a.timings = None;
        b.timings = None;
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn first_failure_and_merge() {
        let mut a = CheckSet::new();
        a.push("one", true, "");
        let mut b = CheckSet::new();
        b.push("two", false, "bad");
        a.merge(b);
        assert_eq!(a.len(), 2);
        assert_eq!(a.first_failure().unwrap().name, "two");
        assert!(!a.all_pass());
    }
}
