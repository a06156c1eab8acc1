//! JSON documents for instances (`.inst.json`), schedules (`.sched.json`) and
//! scenarios (`.scen.json`).
//!
//! Each document opens with a `"format"` field naming the format version on its
//! first line, followed by one field per line.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Instance, Scenario, ScenarioLabel, Schedule, Time};
use crate::{Error, Result};

pub const INSTANCE_FORMAT: &str = "rupm.instance.v1";
pub const SCHEDULE_FORMAT: &str = "rupm.schedule.v1";
pub const SCENARIO_FORMAT: &str = "rupm.scenario.v1";

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    #[serde(default)]
    format: Option<String>,
    n: usize,
    m: usize,
    setup: Vec<Vec<Vec<Time>>>,
    p_lo: Vec<Vec<Time>>,
    p_hi: Vec<Vec<Time>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleDoc {
    #[serde(default)]
    format: Option<String>,
    n: usize,
    m: usize,
    sequences: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    #[serde(default)]
    format: Option<String>,
    n: usize,
    m: usize,
    #[serde(default)]
    label: Option<ScenarioLabel>,
    p: Vec<Vec<Time>>,
}

fn check_format(found: Option<String>, expected: &'static str) -> Result<()> {
    match found {
        Some(f) if f != expected => Err(Error::Format { found: f, expected }),
        _ => Ok(()),
    }
}

/// Writes `fields` as a JSON object, one field per line.
fn write_doc(format: &str, fields: &[(&str, Value)]) -> String {
    let mut out = format!("{{\"format\": \"{format}\"");
    for (name, value) in fields {
        out.push_str(",\n \"");
        out.push_str(name);
        out.push_str("\": ");
        out.push_str(&value.to_string());
    }
    out.push_str("}\n");
    out
}

fn to_value<T: Serialize>(v: T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

impl Instance {
    pub fn to_json(&self) -> String {
        let w = self.num_jobs() + 1;
        write_doc(
            INSTANCE_FORMAT,
            &[
                ("n", to_value(self.num_jobs())),
                ("m", to_value(self.num_machines())),
                ("setup", to_value(self.setup_nested())),
                ("p_lo", to_value(Instance::rows(self.p_lo_flat(), w))),
                ("p_hi", to_value(Instance::rows(self.p_hi_flat(), w))),
            ],
        )
    }

    /// Parses and validates an instance document.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: InstanceDoc = serde_json::from_str(text)?;
        check_format(doc.format, INSTANCE_FORMAT)?;
        let inst = Instance::from_nested(doc.n, doc.m, doc.setup, doc.p_lo, doc.p_hi)?;
        inst.check()?;
        Ok(inst)
    }
}

impl Schedule {
    pub fn to_json(&self) -> String {
        write_doc(
            SCHEDULE_FORMAT,
            &[
                ("n", to_value(self.num_jobs())),
                ("m", to_value(self.num_machines())),
                ("sequences", to_value(self.sequences())),
            ],
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ScheduleDoc = serde_json::from_str(text)?;
        check_format(doc.format, SCHEDULE_FORMAT)?;
        if doc.sequences.len() != doc.m {
            return Err(Error::Shape {
                field: "sequences",
                detail: format!("expected {} machine sequences, found {}", doc.m, doc.sequences.len()),
            });
        }
        Schedule::new(doc.n, doc.sequences)
    }
}

impl Scenario {
    pub fn to_json(&self) -> String {
        let w = self.num_jobs() + 1;
        write_doc(
            SCENARIO_FORMAT,
            &[
                ("n", to_value(self.num_jobs())),
                ("m", to_value(self.num_machines())),
                ("label", to_value(self.label())),
                ("p", to_value(Instance::rows(self.matrix(), w))),
            ],
        )
    }

    /// Parses a scenario; bounds are checked separately with
    /// [`Scenario::check`] once the instance is known.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ScenarioDoc = serde_json::from_str(text)?;
        check_format(doc.format, SCENARIO_FORMAT)?;
        if doc.p.len() != doc.m || doc.p.iter().any(|r| r.len() != doc.n + 1) {
            return Err(Error::Shape {
                field: "p",
                detail: format!("expected {} rows of {} entries", doc.m, doc.n + 1),
            });
        }
        Scenario::from_raw(
            doc.n,
            doc.m,
            doc.p.into_iter().flatten().collect(),
            doc.label.unwrap_or(ScenarioLabel::Custom),
        )
    }
}
