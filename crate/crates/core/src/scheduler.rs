//! Admission control for commitments.
//!
//! A submitted commitment executes at once when it contends with no active
//! commitment and no queued one in its scope; otherwise it waits. Queued
//! conflicts block new arrivals too, so a stream of readers cannot starve a
//! waiting writer. When a commitment finishes, waiters are activated one at
//! a time in policy order until none is eligible.
//!
//! A waiter is eligible when it contends neither with an active commitment
//! nor with any same-scope waiter ahead of it in policy order. Under
//! [`Policy::Fcfs`] "ahead" means earlier arrival (ties in submission
//! order); under [`Policy::Priority`] it means higher priority, then earlier
//! arrival, then smaller id.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::compatibility::contends;
use crate::ids::{CommitmentId, ServiceId};
use crate::model::{Commitment, LifecycleEvent, LifecycleState, Tick};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Policy {
    #[default]
    Fcfs,
    Priority,
}

impl Policy {
    pub fn token(self) -> &'static str {
        match self {
            Policy::Fcfs => "fcfs",
            Policy::Priority => "priority",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision {
    Execute,
    /// Ids of the active and earlier-queued commitments in the way.
    Wait(Vec<CommitmentId>),
}

impl Decision {
    pub fn is_execute(&self) -> bool {
        matches!(self, Decision::Execute)
    }

    pub fn blockers(&self) -> &[CommitmentId] {
        match self {
            Decision::Execute => &[],
            Decision::Wait(b) => b,
        }
    }
}

/// How an active commitment left the active set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Completed,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchedulerError {
    #[error("commitment {0} already submitted")]
    DuplicateId(CommitmentId),
    #[error("commitment {id} is {state}, expected Pending")]
    IllegalState { id: CommitmentId, state: LifecycleState },
    #[error("commitment {0} is not active")]
    UnknownId(CommitmentId),
    #[error("cannot change policy while {0} commitment(s) are queued")]
    NonEmptyQueue(usize),
    #[error("arrival {arrival} precedes scheduler clock {clock}")]
    ClockRegression { arrival: Tick, clock: Tick },
}

/// Per-state commitment counts for one service.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StateCounts {
    pub pending: usize,
    pub waiting: usize,
    pub active: usize,
    pub completed: usize,
    pub failed: usize,
    pub violated: usize,
}

impl StateCounts {
    pub fn get(&self, state: LifecycleState) -> usize {
        match state {
            LifecycleState::Pending => self.pending,
            LifecycleState::Waiting => self.waiting,
            LifecycleState::Active => self.active,
            LifecycleState::Completed => self.completed,
            LifecycleState::Failed => self.failed,
            LifecycleState::Violated => self.violated,
        }
    }

    pub fn bump(&mut self, state: LifecycleState) {
        let slot = match state {
            LifecycleState::Pending => &mut self.pending,
            LifecycleState::Waiting => &mut self.waiting,
            LifecycleState::Active => &mut self.active,
            LifecycleState::Completed => &mut self.completed,
            LifecycleState::Failed => &mut self.failed,
            LifecycleState::Violated => &mut self.violated,
        };
        *slot += 1;
    }

    pub fn total(&self) -> usize {
        LifecycleState::ALL.iter().map(|s| self.get(*s)).sum()
    }
}

/// What the monitoring panel shows: counts per debtor service and the queue.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MonitoringReport {
    pub services: BTreeMap<ServiceId, StateCounts>,
    pub queue: Vec<CommitmentId>,
}

impl MonitoringReport {
    pub fn counts(&self, service: &str) -> StateCounts {
        self.services.get(service).copied().unwrap_or_default()
    }
}

#[derive(Debug, Clone, Default)]
pub struct Scheduler {
    policy: Policy,
    /// In activation order.
    active: Vec<Commitment>,
    /// In submission order, which is also arrival order.
    queue: Vec<Commitment>,
    retired: Vec<Commitment>,
    seen: BTreeSet<CommitmentId>,
    clock: Tick,
}

impl Scheduler {
    pub fn new(policy: Policy) -> Self {
        Self {
            policy,
            ..Self::default()
        }
    }

    pub fn policy(&self) -> Policy {
        self.policy
    }

    pub fn clock(&self) -> Tick {
        self.clock
    }

    pub fn active(&self) -> &[Commitment] {
        &self.active
    }

    pub fn queue(&self) -> &[Commitment] {
        &self.queue
    }

    /// Commitments that reached a terminal state, in retirement order.
    pub fn retired(&self) -> &[Commitment] {
        &self.retired
    }

    pub fn is_idle(&self) -> bool {
        self.active.is_empty() && self.queue.is_empty()
    }

    pub fn find(&self, id: &str) -> Option<&Commitment> {
        self.active
            .iter()
            .chain(&self.queue)
            .chain(&self.retired)
            .find(|c| c.id().as_str() == id)
    }

    pub fn set_policy(&mut self, policy: Policy) -> Result<(), SchedulerError> {
        if !self.queue.is_empty() {
            return Err(SchedulerError::NonEmptyQueue(self.queue.len()));
        }
        self.policy = policy;
        Ok(())
    }

    pub fn submit(&mut self, c: Commitment) -> Result<Decision, SchedulerError> {
        if c.state() != LifecycleState::Pending {
            return Err(SchedulerError::IllegalState {
                id: c.id().clone(),
                state: c.state(),
            });
        }
        if self.seen.contains(c.id()) {
            return Err(SchedulerError::DuplicateId(c.id().clone()));
        }
        if c.arrival() < self.clock {
            return Err(SchedulerError::ClockRegression {
                arrival: c.arrival(),
                clock: self.clock,
            });
        }
        self.clock = c.arrival();
        self.seen.insert(c.id().clone());

        let blockers: Vec<CommitmentId> = self
            .active
            .iter()
            .chain(&self.queue)
            .filter(|x| contends(&c, x))
            .map(|x| x.id().clone())
            .collect();
        if blockers.is_empty() {
            self.active.push(advance(&c, LifecycleEvent::Activate));
            Ok(Decision::Execute)
        } else {
            self.queue.push(advance(&c, LifecycleEvent::Enqueue));
            Ok(Decision::Wait(blockers))
        }
    }

    /// Retires an active commitment and activates every waiter that became
    /// eligible, returning them in activation order.
    pub fn on_complete(
        &mut self,
        id: &str,
        outcome: Outcome,
    ) -> Result<Vec<Commitment>, SchedulerError> {
        let event = match outcome {
            Outcome::Completed => LifecycleEvent::Complete,
            Outcome::Failed => LifecycleEvent::Fail,
        };
        self.retire(id, event)
    }

    /// Retires an active commitment whose action breached its
    /// responsibility. Releases its scope exactly like completion.
    pub fn on_violation(&mut self, id: &str) -> Result<Vec<Commitment>, SchedulerError> {
        self.retire(id, LifecycleEvent::Violate)
    }

    fn retire(&mut self, id: &str, event: LifecycleEvent) -> Result<Vec<Commitment>, SchedulerError> {
        let pos = self
            .active
            .iter()
            .position(|c| c.id().as_str() == id)
            .ok_or_else(|| SchedulerError::UnknownId(id.into()))?;
        let done = self.active.remove(pos);
        self.retired.push(advance(&done, event));

        let mut activated = Vec::new();
        while let Some(i) = select_next(&self.queue, &self.active, self.policy) {
            let next = advance(&self.queue.remove(i), LifecycleEvent::Activate);
            self.active.push(next.clone());
            activated.push(next);
        }
        Ok(activated)
    }

    pub fn snapshot(&self) -> MonitoringReport {
        let mut report = MonitoringReport {
            queue: self.queue.iter().map(|c| c.id().clone()).collect(),
            ..MonitoringReport::default()
        };
        for c in self.active.iter().chain(&self.queue).chain(&self.retired) {
            report
                .services
                .entry(c.debtor().clone())
                .or_default()
                .bump(c.state());
        }
        report
    }
}

fn advance(c: &Commitment, event: LifecycleEvent) -> Commitment {
    c.transition(event)
        .expect("scheduler only applies legal lifecycle moves")
}

/// Queue indices in policy order.
pub fn policy_order(queue: &[Commitment], policy: Policy) -> Vec<usize> {
    let mut order: Vec<usize> = (0..queue.len()).collect();
    match policy {
        // queue is already in arrival order; sort is stable
        Policy::Fcfs => order.sort_by_key(|&i| queue[i].arrival()),
        Policy::Priority => order.sort_by(|&a, &b| {
            let (x, y) = (&queue[a], &queue[b]);
            (Reverse(x.priority()), x.arrival(), x.id()).cmp(&(Reverse(y.priority()), y.arrival(), y.id()))
        }),
    }
    order
}

/// Index of the next waiter to activate, if any is eligible.
pub fn select_next(queue: &[Commitment], active: &[Commitment], policy: Policy) -> Option<usize> {
    let order = policy_order(queue, policy);
    order.iter().enumerate().find_map(|(rank, &i)| {
        let c = &queue[i];
        let blocked = active.iter().any(|a| contends(a, c))
            || order[..rank].iter().any(|&j| contends(&queue[j], c));
        (!blocked).then_some(i)
    })
}
