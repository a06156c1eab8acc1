//! Problem data: instances, scenarios and schedules.
//!
//! Job index 0 is the dummy job that opens and closes every machine sequence.
//! Public APIs take 1-based job indices (`1..=n`) and 0-based machine indices
//! (`0..m`).

mod generate;
mod io;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, MAX_JOBS};

pub use generate::{generate_instance, GeneratorConfig};
pub use io::{INSTANCE_FORMAT, SCENARIO_FORMAT, SCHEDULE_FORMAT};

/// Time unit. All data are non-negative integers.
pub type Time = i64;

/// Unrelated parallel machine instance with sequence-dependent setups and
/// interval processing times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    n: usize,
    m: usize,
    // [machine][pred 0..=n][succ 0..=n]
    setup: Vec<Time>,
    // [machine][job 0..=n]
    p_lo: Vec<Time>,
    p_hi: Vec<Time>,
}

/// One violated instance invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    IntervalInverted { machine: usize, job: usize },
    SelfSetupNonzero { machine: usize, job: usize },
    ClosingSetupNonzero { machine: usize, job: usize },
    DummyProcessingNonzero { machine: usize },
    NegativeSetup { machine: usize, pred: usize, succ: usize },
    NegativeProcessing { machine: usize, job: usize },
    Empty,
    TooManyJobs { n: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::IntervalInverted { machine, job } => {
                write!(f, "interval inverted at ({machine},{job})")
            }
            Violation::SelfSetupNonzero { machine, job } => {
                write!(f, "self-setup nonzero at machine {machine}, job {job}")
            }
            Violation::ClosingSetupNonzero { machine, job } => {
                write!(f, "closing setup to dummy nonzero at machine {machine}, job {job}")
            }
            Violation::DummyProcessingNonzero { machine } => {
                write!(f, "dummy job processing time nonzero on machine {machine}")
            }
            Violation::NegativeSetup { machine, pred, succ } => {
                write!(f, "negative setup at ({machine},{pred},{succ})")
            }
            Violation::NegativeProcessing { machine, job } => {
                write!(f, "negative processing time at ({machine},{job})")
            }
            Violation::Empty => write!(f, "instance needs at least one job and one machine"),
            Violation::TooManyJobs { n } => {
                write!(f, "{n} jobs exceeds the supported maximum of {MAX_JOBS}")
            }
        }
    }
}

impl Instance {
    /// Builds an instance from nested arrays that include the dummy index 0.
    ///
    /// Only shapes are checked here; see [`Instance::validate`] for the
    /// invariants.
    pub fn from_nested(
        n: usize,
        m: usize,
        setup: Vec<Vec<Vec<Time>>>,
        p_lo: Vec<Vec<Time>>,
        p_hi: Vec<Vec<Time>>,
    ) -> Result<Self> {
        let shape = |field, detail: String| Error::Shape { field, detail };
        if setup.len() != m {
            return Err(shape("setup", format!("expected {m} machines, found {}", setup.len())));
        }
        for (i, rows) in setup.iter().enumerate() {
            if rows.len() != n + 1 || rows.iter().any(|r| r.len() != n + 1) {
                return Err(shape(
                    "setup",
                    format!("machine {i} must be a {0}x{0} matrix (dummy included)", n + 1),
                ));
            }
        }
        for (field, mat) in [("p_lo", &p_lo), ("p_hi", &p_hi)] {
            if mat.len() != m || mat.iter().any(|r| r.len() != n + 1) {
                return Err(shape(field, format!("expected {m} rows of {} entries", n + 1)));
            }
        }
        Ok(Instance {
            n,
            m,
            setup: setup.into_iter().flatten().flatten().collect(),
            p_lo: p_lo.into_iter().flatten().collect(),
            p_hi: p_hi.into_iter().flatten().collect(),
        })
    }

    /// Builds an instance from closures over 1-based jobs; dummy entries are
    /// filled in to satisfy the invariants.
    pub fn from_fn(
        n: usize,
        m: usize,
        mut setup: impl FnMut(usize, usize, usize) -> Time,
        mut interval: impl FnMut(usize, usize) -> (Time, Time),
    ) -> Self {
        let w = n + 1;
        let mut s = vec![0; m * w * w];
        let mut lo = vec![0; m * w];
        let mut hi = vec![0; m * w];
        for i in 0..m {
            for j in 0..w {
                for k in 1..w {
                    if j != k {
                        s[(i * w + j) * w + k] = setup(i, j, k);
                    }
                }
            }
            for j in 1..w {
                let (a, b) = interval(i, j);
                lo[i * w + j] = a;
                hi[i * w + j] = b;
            }
        }
        Instance { n, m, setup: s, p_lo: lo, p_hi: hi }
    }

    pub fn num_jobs(&self) -> usize {
        self.n
    }

    pub fn num_machines(&self) -> usize {
        self.m
    }

    /// Setup time of `succ` directly after `pred` on `machine` (0 = dummy).
    #[inline]
    pub fn setup(&self, machine: usize, pred: usize, succ: usize) -> Time {
        let w = self.n + 1;
        self.setup[(machine * w + pred) * w + succ]
    }

    #[inline]
    pub fn p_lo(&self, machine: usize, job: usize) -> Time {
        self.p_lo[machine * (self.n + 1) + job]
    }

    #[inline]
    pub fn p_hi(&self, machine: usize, job: usize) -> Time {
        self.p_hi[machine * (self.n + 1) + job]
    }

    /// Jobs `1..=n`.
    pub fn jobs(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.n
    }

    /// Returns every violated invariant; empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.n == 0 || self.m == 0 {
            out.push(Violation::Empty);
        }
        if self.n > MAX_JOBS {
            out.push(Violation::TooManyJobs { n: self.n });
        }
        let w = self.n + 1;
        for i in 0..self.m {
            for j in 0..w {
                for k in 0..w {
                    let s = self.setup(i, j, k);
                    if s < 0 {
                        out.push(Violation::NegativeSetup { machine: i, pred: j, succ: k });
                    } else if j == k && s != 0 {
                        out.push(Violation::SelfSetupNonzero { machine: i, job: j });
                    } else if k == 0 && j != 0 && s != 0 {
                        out.push(Violation::ClosingSetupNonzero { machine: i, job: j });
                    }
                }
            }
            if self.p_lo(i, 0) != 0 || self.p_hi(i, 0) != 0 {
                out.push(Violation::DummyProcessingNonzero { machine: i });
            }
            for j in 1..w {
                if self.p_lo(i, j) < 0 || self.p_hi(i, j) < 0 {
                    out.push(Violation::NegativeProcessing { machine: i, job: j });
                }
                if self.p_lo(i, j) > self.p_hi(i, j) {
                    out.push(Violation::IntervalInverted { machine: i, job: j });
                }
            }
        }
        out
    }

    /// `Ok` iff [`Instance::validate`] finds nothing.
    pub fn check(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidInstance(v))
        }
    }

    /// Copy with every setup time and interval bound multiplied by `factor`.
    pub fn scaled(&self, factor: Time) -> Instance {
        Instance {
            n: self.n,
            m: self.m,
            setup: self.setup.iter().map(|s| s * factor).collect(),
            p_lo: self.p_lo.iter().map(|p| p * factor).collect(),
            p_hi: self.p_hi.iter().map(|p| p * factor).collect(),
        }
    }

    pub(crate) fn setup_nested(&self) -> Vec<Vec<Vec<Time>>> {
        let w = self.n + 1;
        self.setup
            .chunks(w * w)
            .map(|mach| mach.chunks(w).map(<[Time]>::to_vec).collect())
            .collect()
    }

    pub(crate) fn rows(flat: &[Time], w: usize) -> Vec<Vec<Time>> {
        flat.chunks(w).map(<[Time]>::to_vec).collect()
    }

    pub(crate) fn p_lo_flat(&self) -> &[Time] {
        &self.p_lo
    }

    pub(crate) fn p_hi_flat(&self) -> &[Time] {
        &self.p_hi
    }
}

/// Where a scenario came from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioLabel {
    Mid,
    Lower,
    Upper,
    /// Extreme scenario for the machine with this 0-based index.
    Extreme(usize),
    Random(u64),
    Custom,
}

/// One realisation of all processing times.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scenario {
    n: usize,
    m: usize,
    // [machine][job 0..=n], dummy column zero
    p: Vec<Time>,
    label: ScenarioLabel,
}

impl Scenario {
    /// Builds a scenario from an `m x (n+1)` flat matrix and checks it against
    /// the instance intervals.
    pub fn new(inst: &Instance, p: Vec<Time>, label: ScenarioLabel) -> Result<Self> {
        let s = Scenario::from_raw(inst.n, inst.m, p, label)?;
        s.check(inst)?;
        Ok(s)
    }

    pub(crate) fn from_raw(n: usize, m: usize, p: Vec<Time>, label: ScenarioLabel) -> Result<Self> {
        if p.len() != m * (n + 1) {
            return Err(Error::Shape {
                field: "p",
                detail: format!("expected {m} rows of {} entries", n + 1),
            });
        }
        Ok(Scenario { n, m, p, label })
    }

    /// Builds from a closure over (machine, 1-based job) without checks.
    pub(crate) fn from_fn(
        inst: &Instance,
        label: ScenarioLabel,
        mut f: impl FnMut(usize, usize) -> Time,
    ) -> Self {
        let w = inst.n + 1;
        let mut p = vec![0; inst.m * w];
        for i in 0..inst.m {
            for j in 1..w {
                p[i * w + j] = f(i, j);
            }
        }
        Scenario { n: inst.n, m: inst.m, p, label }
    }

    /// Checks `p_lo <= p <= p_hi` and a zero dummy column.
    pub fn check(&self, inst: &Instance) -> Result<()> {
        if self.n != inst.n || self.m != inst.m {
            return Err(Error::InvalidScenario(format!(
                "dimensions {}x{} do not match instance {}x{}",
                self.m, self.n, inst.m, inst.n
            )));
        }
        for i in 0..self.m {
            if self.p(i, 0) != 0 {
                return Err(Error::InvalidScenario(format!("dummy entry nonzero on machine {i}")));
            }
            for j in 1..=self.n {
                let v = self.p(i, j);
                if v < inst.p_lo(i, j) || v > inst.p_hi(i, j) {
                    return Err(Error::InvalidScenario(format!(
                        "p[{i}][{j}] = {v} outside [{}, {}]",
                        inst.p_lo(i, j),
                        inst.p_hi(i, j)
                    )));
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn p(&self, machine: usize, job: usize) -> Time {
        self.p[machine * (self.n + 1) + job]
    }

    pub fn label(&self) -> &ScenarioLabel {
        &self.label
    }

    pub fn num_jobs(&self) -> usize {
        self.n
    }

    pub fn num_machines(&self) -> usize {
        self.m
    }

    /// The raw processing-time matrix; identical matrices are the same
    /// scenario regardless of label.
    pub fn matrix(&self) -> &[Time] {
        &self.p
    }

    pub fn with_label(mut self, label: ScenarioLabel) -> Self {
        self.label = label;
        self
    }
}

/// Per-machine ordered job sequences covering every job exactly once.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Schedule {
    sequences: Vec<Vec<usize>>,
}

impl Schedule {
    /// Validates that `sequences` (one per machine) partition `1..=n`.
    pub fn new(n: usize, sequences: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n + 1];
        for (i, seq) in sequences.iter().enumerate() {
            for &j in seq {
                if j == 0 || j > n {
                    return Err(Error::InvalidSchedule(format!(
                        "job {j} on machine {i} is outside 1..={n}"
                    )));
                }
                if std::mem::replace(&mut seen[j], true) {
                    return Err(Error::InvalidSchedule(format!("job {j} appears twice")));
                }
            }
        }
        if let Some(j) = (1..=n).find(|&j| !seen[j]) {
            return Err(Error::InvalidSchedule(format!("job {j} is not scheduled")));
        }
        Ok(Schedule { sequences })
    }

    /// Checks the schedule's shape against an instance.
    pub fn check(&self, inst: &Instance) -> Result<()> {
        let n = self.num_jobs();
        if self.sequences.len() != inst.num_machines() || n != inst.num_jobs() {
            return Err(Error::Mismatch {
                n: inst.num_jobs(),
                m: inst.num_machines(),
                sched_n: n,
                sched_m: self.sequences.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn from_sequences_unchecked(sequences: Vec<Vec<usize>>) -> Self {
        Schedule { sequences }
    }

    pub fn num_machines(&self) -> usize {
        self.sequences.len()
    }

    pub fn num_jobs(&self) -> usize {
        self.sequences.iter().map(Vec::len).sum()
    }

    pub fn sequence(&self, machine: usize) -> &[usize] {
        &self.sequences[machine]
    }

    pub fn sequences(&self) -> &[Vec<usize>] {
        &self.sequences
    }

    /// Machine holding `job`.
    pub fn machine_of(&self, job: usize) -> Option<usize> {
        self.sequences.iter().position(|s| s.contains(&job))
    }

    /// Job set of each machine as a bitmask (bit `j` = job `j`).
    pub fn masks(&self) -> Vec<u64> {
        self.sequences
            .iter()
            .map(|s| s.iter().fold(0u64, |acc, &j| acc | (1 << j)))
            .collect()
    }

    /// `assignment[j]` = machine of job `j` (index 0 unused).
    pub fn assignment(&self) -> Vec<usize> {
        let mut a = vec![usize::MAX; self.num_jobs() + 1];
        for (i, seq) in self.sequences.iter().enumerate() {
            for &j in seq {
                a[j] = i;
            }
        }
        a
    }
}

impl<'de> Deserialize<'de> for Schedule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let sequences = Vec::<Vec<usize>>::deserialize(d)?;
        let n = sequences.iter().map(Vec::len).sum();
        Schedule::new(n, sequences).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, seq) in self.sequences.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            let jobs: Vec<String> = seq.iter().map(ToString::to_string).collect();
            write!(f, "{}", jobs.join(" "))?;
        }
        Ok(())
    }
}

/// Iterates the set bits of a job mask in increasing order.
pub(crate) fn mask_jobs(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let j = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(j)
        }
    })
}
