//! Scenario driver: authority gate, scheduler and governance on one clock.
//!
//! The clock only moves on `tick`; every command between two ticks shares a
//! tick and is applied in file order. A commitment's governance action runs
//! the moment it becomes active. When the action breaches a responsibility
//! the commitment is retired as violated and its scope released at once.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::governance::{GovernanceError, Verdict, Violation, ViolationReason, WorldState};
use crate::ids::{CommitmentId, NetworkId, ServiceId};
use crate::model::{
    derive_access_class, Commitment, CommitmentFactory, CommitmentSpec, ContentAction, Kind, LifecycleState,
    ModelError, Responsibility, Tick,
};
use crate::scenario::{self, ActionSpec, Command, Scenario, SubmitCommand};
use crate::scheduler::{Decision, MonitoringReport, Outcome, Policy, Scheduler, SchedulerError};
use crate::trace::{EventKind, ScheduleEvent, Trace};

/// Bundled four-network application scenario.
pub const DEMO_SCENARIO: &str = include_str!("../scenarios/four_networks.scn");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Scheduler(#[from] SchedulerError),
    #[error(transparent)]
    Governance(#[from] GovernanceError),
    #[error("{0} was never accepted by the authority component")]
    NotRegistered(ServiceId),
    #[error("{service} has not been assigned {responsibility}")]
    NotAssigned {
        service: ServiceId,
        responsibility: Responsibility,
    },
    #[error("commitment id {0} already used")]
    DuplicateId(CommitmentId),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{source_name}:{line}: {error}")]
pub struct RuntimeError {
    pub source_name: String,
    pub line: usize,
    pub error: SimError,
    /// Events emitted before the failure, closed with `ok=false`.
    pub trace: Box<Trace>,
}

/// Final state of a completed run.
#[derive(Debug, Clone)]
pub struct Run {
    pub trace: Trace,
    pub world: WorldState,
    pub scheduler: Scheduler,
}

#[derive(Debug, Clone)]
struct Held {
    submit: SubmitCommand,
    guard: String,
}

#[derive(Debug, Clone, Default)]
pub struct Simulator {
    world: WorldState,
    scheduler: Scheduler,
    factory: CommitmentFactory,
    clock: Tick,
    registered: BTreeSet<ServiceId>,
    duties: BTreeMap<ServiceId, BTreeSet<Responsibility>>,
    guards: BTreeMap<String, bool>,
    held: Vec<Held>,
    policy_override: Option<Policy>,
    events: Vec<ScheduleEvent>,
}

impl Simulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_world(world: WorldState) -> Self {
        Self {
            world,
            ..Self::default()
        }
    }

    /// Fixes the policy for the whole run; `policy` commands are ignored.
    pub fn with_policy_override(mut self, policy: Policy) -> Self {
        self.scheduler = Scheduler::new(policy);
        self.policy_override = Some(policy);
        self
    }

    pub fn world(&self) -> &WorldState {
        &self.world
    }

    pub fn scheduler(&self) -> &Scheduler {
        &self.scheduler
    }

    pub fn clock(&self) -> Tick {
        self.clock
    }

    pub fn events(&self) -> &[ScheduleEvent] {
        &self.events
    }

    pub fn trace(&self, ok: bool) -> Trace {
        Trace {
            events: self.events.clone(),
            end_clock: self.clock,
            ok,
        }
    }

    /// Monitoring view including commitments held on a false guard.
    pub fn report(&self) -> MonitoringReport {
        let mut report = self.scheduler.snapshot();
        for h in &self.held {
            report
                .services
                .entry(h.submit.service.clone())
                .or_default()
                .bump(LifecycleState::Pending);
        }
        report
    }

    fn emit(&mut self, kind: EventKind, subject: impl std::fmt::Display) {
        self.events.push(ScheduleEvent::new(self.clock, kind, subject));
    }

    fn push(&mut self, event: ScheduleEvent) {
        self.events.push(event);
    }

    pub fn run_scenario(&mut self, scenario: &Scenario) -> Result<(), RuntimeError> {
        for located in &scenario.commands {
            self.apply(&located.command).map_err(|error| RuntimeError {
                source_name: scenario.source.clone(),
                line: located.line,
                error,
                trace: Box::new(self.trace(false)),
            })?;
        }
        Ok(())
    }

    pub fn into_run(self) -> Run {
        Run {
            trace: self.trace(true),
            world: self.world,
            scheduler: self.scheduler,
        }
    }

    pub fn apply(&mut self, command: &Command) -> Result<(), SimError> {
        match command {
            Command::Policy(p) => {
                if self.policy_override.is_none() {
                    self.scheduler.set_policy(*p)?;
                }
            }
            Command::Network(n) => self.world.add_network(n.clone())?,
            Command::Purpose { network, token } => self.world.add_purpose(network, token.clone())?,
            Command::Signup { service, network, accept } => self.signup(service, network, *accept)?,
            Command::Assign { service, responsibility } => {
                if !self.registered.contains(service) {
                    return Err(SimError::NotRegistered(service.clone()));
                }
                self.duties.entry(service.clone()).or_default().insert(*responsibility);
                let ev = ScheduleEvent::new(self.clock, EventKind::Assigned, service).with("resp", responsibility);
                self.push(ev);
            }
            Command::Assignment { id, service } => self.world.add_assignment(id.clone(), service.clone())?,
            Command::FinishAssignment { id, status } => self.world.finish_assignment(id, *status)?,
            Command::Detail {
                key,
                owner,
                network,
                privacy,
                value,
            } => self.world.add_detail(crate::governance::Detail {
                key: key.clone(),
                owner: owner.clone(),
                network: network.clone(),
                privacy: *privacy,
                value: value.clone(),
                veracity: true,
            })?,
            Command::Ttl(n) => self.world.set_reveal_ttl(*n),
            Command::Submit(s) => self.submit(s)?,
            Command::Guard { name, value } => {
                self.guards.insert(name.clone(), *value);
                if *value {
                    self.release_guard(name)?;
                }
            }
            Command::Complete { id, failed } => {
                let outcome = if *failed { Outcome::Failed } else { Outcome::Completed };
                let activated = self.scheduler.on_complete(id.as_str(), outcome)?;
                let kind = if *failed { EventKind::Failed } else { EventKind::Completed };
                self.emit(kind, id);
                self.execute_all(activated)?;
            }
            Command::Tick(n) => self.clock += n,
            Command::Snapshot => self.snapshot(),
        }
        Ok(())
    }

    /// Authority component: an accepted service joins the network.
    pub fn signup(&mut self, service: &ServiceId, network: &NetworkId, accept: bool) -> Result<(), SimError> {
        if !self.world.has_network(network) {
            return Err(GovernanceError::UnknownNetwork(network.clone()).into());
        }
        if self.world.is_member(service, network) {
            return Err(GovernanceError::AlreadyMember {
                service: service.clone(),
                network: network.clone(),
            }
            .into());
        }
        let kind = if accept {
            self.world.join(service.clone(), network.clone())?;
            self.registered.insert(service.clone());
            EventKind::Registered
        } else {
            EventKind::Rejected
        };
        let ev = ScheduleEvent::new(self.clock, kind, service).with("network", network);
        self.push(ev);
        Ok(())
    }

    fn submit(&mut self, s: &SubmitCommand) -> Result<(), SimError> {
        if !self.registered.contains(&s.service) {
            return Err(SimError::NotRegistered(s.service.clone()));
        }
        let responsibility = Responsibility::for_verb(s.action.verb());
        if !self.duties.get(&s.service).is_some_and(|d| d.contains(&responsibility)) {
            return Err(SimError::NotAssigned {
                service: s.service.clone(),
                responsibility,
            });
        }
        if self.factory.is_used(&s.id) || self.held.iter().any(|h| h.submit.id == s.id) {
            return Err(SimError::DuplicateId(s.id.clone()));
        }
        match &s.guard {
            Some(g) if !self.guards.get(g).copied().unwrap_or(false) => {
                let content = self.content_for(s)?;
                let ev = ScheduleEvent::new(self.clock, EventKind::Submitted, &s.id)
                    .with("service", &s.service)
                    .with("verb", s.action.verb())
                    .with("target", s.action.target())
                    .with("access", derive_access_class(&content))
                    .with("guard", g)
                    .with("held", true);
                self.push(ev);
                self.held.push(Held {
                    submit: s.clone(),
                    guard: g.clone(),
                });
                Ok(())
            }
            _ => self.admit(s),
        }
    }

    fn release_guard(&mut self, name: &str) -> Result<(), SimError> {
        let (ready, rest): (Vec<Held>, Vec<Held>) = std::mem::take(&mut self.held)
            .into_iter()
            .partition(|h| h.guard == name);
        self.held = rest;
        for h in ready {
            self.admit(&h.submit)?;
        }
        Ok(())
    }

    fn content_for(&self, s: &SubmitCommand) -> Result<ContentAction, SimError> {
        let detail_of = |key| {
            self.world
                .detail(key)
                .ok_or_else(|| SimError::Model(ModelError::UnknownDetail(key.clone())))
        };
        Ok(match &s.action {
            ActionSpec::Collect { detail, purpose } => ContentAction::Collect {
                detail: detail.clone(),
                owner: detail_of(detail)?.owner.clone(),
                purpose: purpose.clone(),
            },
            ActionSpec::Post { detail, veracity, value } => ContentAction::Post {
                detail: detail.clone(),
                veracity: *veracity,
                value: value.clone(),
            },
            ActionSpec::Tamper { detail, value } => ContentAction::Tamper {
                detail: detail.clone(),
                value: value.clone(),
            },
            ActionSpec::Signoff { service, network } => {
                let network = match network {
                    Some(n) => n.clone(),
                    None => {
                        let mut nets = self.world.memberships(service);
                        let first = nets
                            .next()
                            .cloned()
                            .ok_or_else(|| GovernanceError::UnknownService(service.clone()))?;
                        if nets.next().is_some() {
                            return Err(GovernanceError::AmbiguousNetwork {
                                service: service.clone(),
                            }
                            .into());
                        }
                        first
                    }
                };
                ContentAction::Signoff {
                    service: service.clone(),
                    network: Some(network),
                }
            }
            ActionSpec::Reveal { detail, requester } => ContentAction::Reveal {
                detail: detail.clone(),
                requester: requester.clone(),
            },
        })
    }

    fn admit(&mut self, s: &SubmitCommand) -> Result<(), SimError> {
        let content = self.content_for(s)?;
        let creditor = match (&s.business, &content) {
            (Some(composition), _) => composition.clone(),
            (None, ContentAction::Signoff { network, .. }) => {
                network.as_ref().map(|n| n.to_string()).unwrap_or_default()
            }
            (None, other) => other
                .detail()
                .and_then(|k| self.world.detail(k))
                .map(|d| d.network.to_string())
                .unwrap_or_default(),
        };
        let spec = CommitmentSpec {
            id: s.id.clone(),
            kind: if s.business.is_some() { Kind::Business } else { Kind::Social },
            responsibility: Responsibility::for_verb(s.action.verb()),
            debtor: s.service.clone(),
            creditor,
            content,
            condition: s.guard.clone(),
            explicit_priority: s.priority,
        };
        let c = self.factory.new_commitment(spec, &self.world, self.clock)?;
        let mut ev = ScheduleEvent::new(self.clock, EventKind::Submitted, c.id())
            .with("service", c.debtor())
            .with("verb", c.content().verb())
            .with("target", c.target())
            .with("access", c.access())
            .with("prio", c.priority());
        if let Some(g) = c.condition() {
            ev = ev.with("guard", g);
        }
        self.push(ev);

        match self.scheduler.submit(c.clone())? {
            Decision::Execute => {
                let active = self
                    .scheduler
                    .find(c.id().as_str())
                    .cloned()
                    .expect("executed commitment is active");
                self.execute_all(vec![active])
            }
            Decision::Wait(blockers) => {
                let ev = ScheduleEvent::new(self.clock, EventKind::Waiting, c.id()).with_list("blockers", blockers);
                self.push(ev);
                Ok(())
            }
        }
    }

    /// Runs the governance action of each newly active commitment in order.
    /// Violations release their scope, which may activate more.
    fn execute_all(&mut self, activated: Vec<Commitment>) -> Result<(), SimError> {
        let mut work: VecDeque<Commitment> = activated.into();
        while let Some(c) = work.pop_front() {
            if let Some(v) = self.execute(&c)? {
                let mut ev = ScheduleEvent::new(self.clock, EventKind::Violation, c.id())
                    .with("resp", v.responsibility)
                    .with("reason", v.reason.token());
                if let ViolationReason::OngoingAssignments(ids) = &v.reason {
                    ev = ev.with_list("ids", ids);
                }
                self.push(ev);
                work.extend(self.scheduler.on_violation(c.id().as_str())?);
            }
        }
        Ok(())
    }

    fn execute(&mut self, c: &Commitment) -> Result<Option<Violation>, SimError> {
        let t = self.clock;
        let debtor = c.debtor().clone();
        let mut activated = ScheduleEvent::new(t, EventKind::Activated, c.id());
        let mut after = None;
        let violation = match c.content() {
            ContentAction::Collect { detail, owner, purpose } => {
                match self.world.exec_collect(&debtor, detail, owner, purpose, t)? {
                    Verdict::Complied(rec) => {
                        activated = activated.with("snapshot", rec.snapshot());
                        None
                    }
                    Verdict::Violated(v) => Some(v),
                }
            }
            ContentAction::Post { detail, veracity, value } => {
                let value = value.clone().unwrap_or_else(|| c.id().to_string());
                match self.world.exec_post(&debtor, detail, None, *veracity, &value, t)? {
                    Verdict::Complied(()) => {
                        activated = activated.with("value", value);
                        None
                    }
                    Verdict::Violated(v) => Some(v),
                }
            }
            ContentAction::Tamper { detail, value } => match self.world.exec_tamper_guard(&debtor, detail, t) {
                Ok(v) => Some(v),
                // nothing collected yet: an ordinary write under Resp2
                Err(GovernanceError::NoCollectionRecord(_)) => {
                    let value = value.clone().unwrap_or_else(|| c.id().to_string());
                    match self.world.exec_post(&debtor, detail, None, true, &value, t)? {
                        Verdict::Complied(()) => {
                            activated = activated.with("value", value);
                            None
                        }
                        Verdict::Violated(v) => Some(v),
                    }
                }
                Err(e) => return Err(e.into()),
            },
            ContentAction::Signoff { service, network } => {
                match self.world.exec_signoff(service, network.as_ref(), t)? {
                    Verdict::Complied(net) => {
                        after = Some(ScheduleEvent::new(t, EventKind::SignedOff, service).with("network", net));
                        None
                    }
                    Verdict::Violated(v) => Some(v),
                }
            }
            ContentAction::Reveal { detail, requester } => {
                match self.world.exec_reveal(&debtor, detail, requester, t)? {
                    Verdict::Complied(value) => {
                        activated = activated.with("value", value);
                        None
                    }
                    Verdict::Violated(v) => Some(v),
                }
            }
        };
        self.push(activated);
        if let Some(ev) = after {
            self.push(ev);
        }
        Ok(violation)
    }

    fn snapshot(&mut self) {
        let report = self.report();
        let summary = ScheduleEvent::new(self.clock, EventKind::Snapshot, "monitor")
            .with("services", report.services.len())
            .with_list("queue", &report.queue);
        self.push(summary);
        for (service, n) in &report.services {
            let ev = ScheduleEvent::new(self.clock, EventKind::Snapshot, service)
                .with("pending", n.pending)
                .with("waiting", n.waiting)
                .with("active", n.active)
                .with("completed", n.completed)
                .with("failed", n.failed)
                .with("violated", n.violated);
            self.push(ev);
        }
    }
}

/// Runs `scenario` from the seed world to completion.
pub fn run(scenario: &Scenario, seed: WorldState) -> Result<Run, RuntimeError> {
    let mut sim = Simulator::with_world(seed);
    sim.run_scenario(scenario)?;
    Ok(sim.into_run())
}

/// The bundled four-network application: a hub network and three
/// satellites exercising every relation and one breach per responsibility.
pub fn four_network_demo() -> Scenario {
    scenario::parse_named("four_networks.scn", DEMO_SCENARIO).expect("bundled demo scenario parses")
}
