//! Brute-force reference for the scheduler.
//!
//! [`Reference`] is a from-scratch readers-writer admission model over tiny
//! instances: two commitments clash when they name the same target and at
//! least one writes. It shares no decision logic with [`crate::scheduler`].
//! [`enumerate_outcomes`] walks every interleaving of submissions and
//! completions of an instance and records each step, so the scheduler and
//! the reference can be compared path by path and every reachable state can
//! be checked for safety.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::ids::{DetailKey, ServiceId};
use crate::model::{
    AccessClass, CommitmentFactory, CommitmentSpec, ContentAction, DetailDirectory, Kind, Privacy, Responsibility,
    Tick,
};
use crate::scheduler::{Decision, Outcome as Finish, Policy, Scheduler};

pub const MAX_COMMITMENTS: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MiniCommitment {
    pub id: String,
    pub access: AccessClass,
    pub target: String,
    pub priority: u32,
    pub arrival: Tick,
}

/// Commitments are submitted in list order (arrivals non-decreasing).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MiniInstance {
    pub commitments: Vec<MiniCommitment>,
    pub completion_order: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance has {0} commitments; at most {MAX_COMMITMENTS} are supported")]
    InstanceTooLarge(usize),
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("arrivals must be non-decreasing in list order (at {0})")]
    ArrivalOrder(String),
    #[error("{0} is not active when its completion is due")]
    NotActive(String),
    #[error("completion order leaves {0} unfinished")]
    Unfinished(String),
}

impl MiniInstance {
    pub fn validate(&self) -> Result<(), OracleError> {
        let n = self.commitments.len();
        if n > MAX_COMMITMENTS {
            return Err(OracleError::InstanceTooLarge(n));
        }
        let mut seen = BTreeSet::new();
        let mut last = 0;
        for c in &self.commitments {
            if !seen.insert(c.id.as_str()) {
                return Err(OracleError::DuplicateId(c.id.clone()));
            }
            if c.arrival < last {
                return Err(OracleError::ArrivalOrder(c.id.clone()));
            }
            last = c.arrival;
        }
        Ok(())
    }

    /// Instance whose completion order finishes the longest-running active
    /// commitment first, as computed by the reference model.
    pub fn fifo(commitments: Vec<MiniCommitment>, policy: Policy) -> Result<Self, OracleError> {
        let mut inst = MiniInstance {
            commitments,
            completion_order: Vec::new(),
        };
        inst.validate()?;
        let mut model = Reference::new(policy);
        for c in &inst.commitments {
            model.submit(c);
        }
        while let Some(first) = model.active_ids().into_iter().next() {
            model.complete(&first);
            inst.completion_order.push(first);
        }
        Ok(inst)
    }
}

/// Something that admits mini commitments.
pub trait AdmissionModel {
    fn submit(&mut self, c: &MiniCommitment) -> Decision;
    /// `None` when `id` is not active.
    fn complete(&mut self, id: &str) -> Option<Vec<String>>;
    /// Active ids in activation order.
    fn active_ids(&self) -> Vec<String>;
    /// Waiting ids in submission order.
    fn queued_ids(&self) -> Vec<String>;
}

/// Independent readers-writer admission with the no-barging rule and the
/// documented tie-break chain.
#[derive(Debug, Clone)]
pub struct Reference {
    policy: Policy,
    active: Vec<MiniCommitment>,
    /// (submission number, commitment)
    waiting: Vec<(usize, MiniCommitment)>,
    submitted: usize,
}

impl Reference {
    pub fn new(policy: Policy) -> Self {
        Self {
            policy,
            active: Vec::new(),
            waiting: Vec::new(),
            submitted: 0,
        }
    }

    fn clash(x: &MiniCommitment, y: &MiniCommitment) -> bool {
        x.target == y.target && (x.access == AccessClass::Writer || y.access == AccessClass::Writer)
    }

    /// Is `a` served before `b`?
    fn ahead(&self, a: &(usize, MiniCommitment), b: &(usize, MiniCommitment)) -> bool {
        let (sa, ca) = a;
        let (sb, cb) = b;
        match self.policy {
            Policy::Fcfs => (ca.arrival, *sa) < (cb.arrival, *sb),
            Policy::Priority => {
                if ca.priority != cb.priority {
                    ca.priority > cb.priority
                } else if ca.arrival != cb.arrival {
                    ca.arrival < cb.arrival
                } else {
                    ca.id < cb.id
                }
            }
        }
    }

    fn eligible(&self, w: &(usize, MiniCommitment)) -> bool {
        for a in &self.active {
            if Self::clash(a, &w.1) {
                return false;
            }
        }
        for other in &self.waiting {
            if other.0 != w.0 && self.ahead(other, w) && Self::clash(&other.1, &w.1) {
                return false;
            }
        }
        true
    }
}

impl AdmissionModel for Reference {
    fn submit(&mut self, c: &MiniCommitment) -> Decision {
        let mut blockers = Vec::new();
        for a in &self.active {
            if Self::clash(a, c) {
                blockers.push(a.id.as_str().into());
            }
        }
        for (_, w) in &self.waiting {
            if Self::clash(w, c) {
                blockers.push(w.id.as_str().into());
            }
        }
        self.submitted += 1;
        if blockers.is_empty() {
            self.active.push(c.clone());
            Decision::Execute
        } else {
            self.waiting.push((self.submitted, c.clone()));
            Decision::Wait(blockers)
        }
    }

    fn complete(&mut self, id: &str) -> Option<Vec<String>> {
        let pos = self.active.iter().position(|c| c.id == id)?;
        self.active.remove(pos);
        let mut started = Vec::new();
        loop {
            // the best-ranked eligible waiter, if any
            let mut best: Option<usize> = None;
            for i in 0..self.waiting.len() {
                if !self.eligible(&self.waiting[i]) {
                    continue;
                }
                best = match best {
                    Some(b) if self.ahead(&self.waiting[b], &self.waiting[i]) => Some(b),
                    _ => Some(i),
                };
            }
            let Some(i) = best else { break };
            let (_, c) = self.waiting.remove(i);
            started.push(c.id.clone());
            self.active.push(c);
        }
        Some(started)
    }

    fn active_ids(&self) -> Vec<String> {
        self.active.iter().map(|c| c.id.clone()).collect()
    }

    fn queued_ids(&self) -> Vec<String> {
        self.waiting.iter().map(|(_, c)| c.id.clone()).collect()
    }
}

struct AllPublic;

const ORACLE_OWNER: &str = "oracle-owner";

impl DetailDirectory for AllPublic {
    fn privacy(&self, _key: &DetailKey) -> Option<Privacy> {
        Some(Privacy::Public)
    }

    fn owner(&self, _key: &DetailKey) -> Option<&ServiceId> {
        None
    }
}

/// Drives the real scheduler: readers become collects, writers posts.
#[derive(Debug, Clone)]
pub struct SchedulerModel {
    scheduler: Scheduler,
    factory: CommitmentFactory,
}

impl SchedulerModel {
    pub fn new(policy: Policy) -> Self {
        Self {
            scheduler: Scheduler::new(policy),
            factory: CommitmentFactory::new(),
        }
    }

    pub fn scheduler(&self) -> &Scheduler {
        &self.scheduler
    }
}

impl AdmissionModel for SchedulerModel {
    fn submit(&mut self, c: &MiniCommitment) -> Decision {
        let (responsibility, content) = match c.access {
            AccessClass::Reader => (
                Responsibility::Resp1,
                ContentAction::Collect {
                    detail: c.target.as_str().into(),
                    owner: ORACLE_OWNER.into(),
                    purpose: "oracle".into(),
                },
            ),
            AccessClass::Writer => (
                Responsibility::Resp2,
                ContentAction::Post {
                    detail: c.target.as_str().into(),
                    veracity: true,
                    value: None,
                },
            ),
        };
        let spec = CommitmentSpec {
            id: c.id.as_str().into(),
            kind: Kind::Social,
            responsibility,
            debtor: "oracle-svc".into(),
            creditor: "oracle-net".into(),
            content,
            condition: None,
            explicit_priority: Some(c.priority),
        };
        let commitment = self
            .factory
            .new_commitment(spec, &AllPublic, c.arrival)
            .expect("validated mini instance");
        self.scheduler.submit(commitment).expect("validated mini instance")
    }

    fn complete(&mut self, id: &str) -> Option<Vec<String>> {
        let started = self.scheduler.on_complete(id, Finish::Completed).ok()?;
        Some(started.iter().map(|c| c.id().to_string()).collect())
    }

    fn active_ids(&self) -> Vec<String> {
        self.scheduler.active().iter().map(|c| c.id().to_string()).collect()
    }

    fn queued_ids(&self) -> Vec<String> {
        self.scheduler.queue().iter().map(|c| c.id().to_string()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Submit { id: String, decision: Decision },
    Complete { id: String, activated: Vec<String> },
}

/// Decisions at submission and activations at each completion, in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceRun {
    pub decisions: Vec<Decision>,
    pub activations: Vec<Vec<String>>,
}

/// Submits every commitment, then completes them in `completion_order`.
pub fn replay(instance: &MiniInstance, model: &mut impl AdmissionModel) -> Result<ReferenceRun, OracleError> {
    instance.validate()?;
    let decisions = instance.commitments.iter().map(|c| model.submit(c)).collect();
    let mut activations = Vec::new();
    for id in &instance.completion_order {
        activations.push(model.complete(id).ok_or_else(|| OracleError::NotActive(id.clone()))?);
    }
    if let Some(left) = model.active_ids().into_iter().next() {
        return Err(OracleError::Unfinished(left));
    }
    Ok(ReferenceRun {
        decisions,
        activations,
    })
}

pub fn reference_admission(instance: &MiniInstance, policy: Policy) -> Result<ReferenceRun, OracleError> {
    replay(instance, &mut Reference::new(policy))
}

/// One complete interleaving.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub steps: Vec<Step>,
    /// States along the path where a writer shared a target with another
    /// active commitment.
    pub unsafe_states: usize,
    /// Queue and active set both empty at the end.
    pub drained: bool,
}

fn unsafe_state(instance: &MiniInstance, active: &[String]) -> bool {
    let active: Vec<&MiniCommitment> = active
        .iter()
        .filter_map(|id| instance.commitments.iter().find(|c| &c.id == id))
        .collect();
    active.iter().enumerate().any(|(i, a)| {
        active[i + 1..]
            .iter()
            .any(|b| a.target == b.target && (a.access == AccessClass::Writer || b.access == AccessClass::Writer))
    })
}

/// Every interleaving of in-order submissions with completions of active
/// commitments, driving the real scheduler.
pub fn enumerate_outcomes(instance: &MiniInstance, policy: Policy) -> Result<Vec<Outcome>, OracleError> {
    enumerate_outcomes_with(instance, SchedulerModel::new(policy))
}

pub fn enumerate_outcomes_with<M: AdmissionModel + Clone>(
    instance: &MiniInstance,
    model: M,
) -> Result<Vec<Outcome>, OracleError> {
    instance.validate()?;
    let mut out = Vec::new();
    explore(instance, model, 0, Vec::new(), 0, &mut out);
    Ok(out)
}

fn explore<M: AdmissionModel + Clone>(
    instance: &MiniInstance,
    model: M,
    next: usize,
    steps: Vec<Step>,
    unsafe_states: usize,
    out: &mut Vec<Outcome>,
) {
    let active = model.active_ids();
    if next == instance.commitments.len() && active.is_empty() {
        out.push(Outcome {
            steps,
            unsafe_states,
            drained: model.queued_ids().is_empty(),
        });
        return;
    }
    if next < instance.commitments.len() {
        let c = &instance.commitments[next];
        let mut m = model.clone();
        let decision = m.submit(c);
        let bad = unsafe_state(instance, &m.active_ids()) as usize;
        let mut s = steps.clone();
        s.push(Step::Submit {
            id: c.id.clone(),
            decision,
        });
        explore(instance, m, next + 1, s, unsafe_states + bad, out);
    }
    let mut ids = active;
    ids.sort();
    for id in ids {
        let mut m = model.clone();
        let activated = m.complete(&id).expect("id taken from the active set");
        let bad = unsafe_state(instance, &m.active_ids()) as usize;
        let mut s = steps.clone();
        s.push(Step::Complete { id, activated });
        explore(instance, m, next, s, unsafe_states + bad, out);
    }
}

/// Totals from walking two models through every interleaving together.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Lockstep {
    /// Complete interleavings.
    pub outcomes: usize,
    /// Distinct reachable states.
    pub states: usize,
    /// Distinct states where a writer shared a target with another active
    /// commitment.
    pub unsafe_states: usize,
    /// Interleavings that ended with commitments still queued.
    pub undrained: usize,
    /// The models disagreed somewhere; the walk stops there.
    pub diverged: bool,
}

type StateKey = (usize, Vec<String>, Vec<String>);

/// Drives `a` and `b` through the same interleavings as
/// [`enumerate_outcomes_with`], comparing every decision, activation list,
/// active set and queue. Paths that reach an already explored state reuse
/// its counts. Safety is judged on `a`.
pub fn lockstep<A, B>(instance: &MiniInstance, a: A, b: B) -> Result<Lockstep, OracleError>
where
    A: AdmissionModel + Clone,
    B: AdmissionModel + Clone,
{
    instance.validate()?;
    let mut tally = Lockstep::default();
    let mut memo = HashMap::new();
    let (outcomes, undrained) = walk(instance, a, b, 0, &mut tally, &mut memo);
    tally.outcomes = outcomes;
    tally.undrained = undrained;
    Ok(tally)
}

fn walk<A, B>(
    instance: &MiniInstance,
    a: A,
    b: B,
    next: usize,
    tally: &mut Lockstep,
    memo: &mut HashMap<StateKey, (usize, usize)>,
) -> (usize, usize)
where
    A: AdmissionModel + Clone,
    B: AdmissionModel + Clone,
{
    if tally.diverged {
        return (0, 0);
    }
    let active = a.active_ids();
    let queued = a.queued_ids();
    if active != b.active_ids() || queued != b.queued_ids() {
        tally.diverged = true;
        return (0, 0);
    }
    let key = (next, active, queued);
    if let Some(&counts) = memo.get(&key) {
        return counts;
    }
    tally.states += 1;
    tally.unsafe_states += unsafe_state(instance, &key.1) as usize;
    let counts = if next == instance.commitments.len() && key.1.is_empty() {
        (1, !key.2.is_empty() as usize)
    } else {
        let mut counts = (0, 0);
        let mut add = |(o, u): (usize, usize)| {
            counts.0 += o;
            counts.1 += u;
        };
        if next < instance.commitments.len() {
            let c = &instance.commitments[next];
            let (mut a2, mut b2) = (a.clone(), b.clone());
            if a2.submit(c) != b2.submit(c) {
                tally.diverged = true;
                return (0, 0);
            }
            add(walk(instance, a2, b2, next + 1, tally, memo));
        }
        let mut ids = key.1.clone();
        ids.sort();
        for id in ids {
            let (mut a2, mut b2) = (a.clone(), b.clone());
            if a2.complete(&id) != b2.complete(&id) {
                tally.diverged = true;
                return (0, 0);
            }
            add(walk(instance, a2, b2, next, tally, memo));
        }
        counts
    };
    memo.insert(key, counts);
    counts
}

/// Arrival layout of generated instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arrivals {
    /// Ticks 0, 1, 2, …; ids ascending.
    Staggered,
    /// One time slice; ids descending so the id tie-break is exercised.
    Simultaneous,
}

/// Every combination of access class, target in `{d, e}` and priority in
/// `{0, 10}` for `n` commitments.
pub fn instances(n: usize, arrivals: Arrivals) -> Vec<Vec<MiniCommitment>> {
    const TARGETS: [&str; 2] = ["d", "e"];
    const PRIORITIES: [u32; 2] = [0, 10];
    let choices = 8usize.pow(n as u32);
    (0..choices)
        .map(|mut code| {
            (0..n)
                .map(|i| {
                    let digit = code % 8;
                    code /= 8;
                    let (id, arrival) = match arrivals {
                        Arrivals::Staggered => (format!("c{i}"), i as Tick),
                        Arrivals::Simultaneous => (format!("c{}", n - 1 - i), 0),
                    };
                    MiniCommitment {
                        id,
                        access: if digit & 1 == 0 { AccessClass::Reader } else { AccessClass::Writer },
                        target: TARGETS[(digit >> 1) & 1].to_owned(),
                        priority: PRIORITIES[(digit >> 2) & 1],
                        arrival,
                    }
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GridReport {
    /// (instance, policy) pairs checked.
    pub cases: usize,
    pub passed: usize,
    pub failed: usize,
    pub outcomes: usize,
    pub states: usize,
    pub unsafe_states: usize,
    pub undrained: usize,
    /// First few mismatches, for diagnostics.
    pub failures: Vec<String>,
}

impl GridReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0 && self.unsafe_states == 0 && self.undrained == 0
    }
}

/// Compares scheduler and reference on every instance of up to `max_n`
/// commitments under both policies: FIFO replay and every interleaving.
pub fn run_grid(max_n: usize) -> Result<GridReport, OracleError> {
    if max_n > MAX_COMMITMENTS {
        return Err(OracleError::InstanceTooLarge(max_n));
    }
    let mut report = GridReport::default();
    for n in 1..=max_n {
        for arrivals in [Arrivals::Staggered, Arrivals::Simultaneous] {
            for commitments in instances(n, arrivals) {
                for policy in [Policy::Fcfs, Policy::Priority] {
                    let inst = MiniInstance::fifo(commitments.clone(), policy)?;
                    let expected = reference_admission(&inst, policy)?;
                    let actual = replay(&inst, &mut SchedulerModel::new(policy));
                    let walked = lockstep(&inst, SchedulerModel::new(policy), Reference::new(policy))?;

                    report.cases += 1;
                    report.outcomes += walked.outcomes;
                    report.states += walked.states;
                    report.unsafe_states += walked.unsafe_states;
                    report.undrained += walked.undrained;
                    if actual.as_ref() == Ok(&expected) && !walked.diverged {
                        report.passed += 1;
                    } else {
                        report.failed += 1;
                        if report.failures.len() < 5 {
                            report.failures.push(format!("{policy} {:?}", inst.commitments));
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}
