//! Simulated network state and the five responsibilities.
//!
//! Each `exec_*` method runs the content action of an active commitment.
//! A breach is reported as [`Verdict::Violated`] and leaves the world
//! untouched; `Err` is reserved for references to things that do not exist.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::ids::{AssignmentId, DetailKey, NetworkId, ServiceId};
use crate::model::{DetailDirectory, Privacy, Responsibility, Tick};

pub const DEFAULT_REVEAL_TTL: Tick = 100;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Detail {
    pub key: DetailKey,
    pub owner: ServiceId,
    pub network: NetworkId,
    pub privacy: Privacy,
    pub value: String,
    pub veracity: bool,
}

/// Approved collection of a detail. Immutable once created.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollectionRecord {
    detail: DetailKey,
    collector: ServiceId,
    purpose: String,
    approved_at: Tick,
    snapshot: String,
}

impl CollectionRecord {
    pub fn detail(&self) -> &DetailKey {
        &self.detail
    }

    pub fn collector(&self) -> &ServiceId {
        &self.collector
    }

    pub fn purpose(&self) -> &str {
        &self.purpose
    }

    pub fn approved_at(&self) -> Tick {
        self.approved_at
    }

    pub fn snapshot(&self) -> &str {
        &self.snapshot
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssignmentStatus {
    Ongoing,
    Complete,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub id: AssignmentId,
    pub service: ServiceId,
    pub status: AssignmentStatus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationReason {
    InvalidPurpose,
    /// The purpose was indicated to someone other than the detail's owner.
    WrongOwner,
    NotMember,
    FalseVeracity,
    Tampered,
    OngoingAssignments(Vec<AssignmentId>),
    PrivateDisclosure,
    AuthorizationExpired,
    NoAuthorization,
}

impl ViolationReason {
    pub fn token(&self) -> &'static str {
        match self {
            ViolationReason::InvalidPurpose => "invalid-purpose",
            ViolationReason::WrongOwner => "wrong-owner",
            ViolationReason::NotMember => "not-member",
            ViolationReason::FalseVeracity => "false-veracity",
            ViolationReason::Tampered => "tampered",
            ViolationReason::OngoingAssignments(_) => "ongoing-assignments",
            ViolationReason::PrivateDisclosure => "private-disclosure",
            ViolationReason::AuthorizationExpired => "authorization-expired",
            ViolationReason::NoAuthorization => "no-authorization",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub responsibility: Responsibility,
    pub reason: ViolationReason,
}

impl Violation {
    fn of(responsibility: Responsibility, reason: ViolationReason) -> Self {
        Self { responsibility, reason }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} breached: {}", self.responsibility, self.reason.token())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict<T> {
    Complied(T),
    Violated(Violation),
}

impl<T> Verdict<T> {
    pub fn violation(&self) -> Option<&Violation> {
        match self {
            Verdict::Complied(_) => None,
            Verdict::Violated(v) => Some(v),
        }
    }

    pub fn is_violation(&self) -> bool {
        matches!(self, Verdict::Violated(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GovernanceError {
    #[error("unknown network {0}")]
    UnknownNetwork(NetworkId),
    #[error("network {0} already exists")]
    DuplicateNetwork(NetworkId),
    #[error("unknown detail {0}")]
    UnknownDetail(DetailKey),
    #[error("detail {0} already exists")]
    DuplicateDetail(DetailKey),
    #[error("{0} is not a member of any matching network")]
    UnknownService(ServiceId),
    #[error("{service} belongs to several networks; name one to sign off from")]
    AmbiguousNetwork { service: ServiceId },
    #[error("{service} is already a member of {network}")]
    AlreadyMember { service: ServiceId, network: NetworkId },
    #[error("owner {owner} is not a member of {network}")]
    OwnerNotMember { owner: ServiceId, network: NetworkId },
    #[error("unknown assignment {0}")]
    UnknownAssignment(AssignmentId),
    #[error("assignment {0} already exists")]
    DuplicateAssignment(AssignmentId),
    #[error("assignment {0} is no longer ongoing")]
    AssignmentFinished(AssignmentId),
    #[error("assignments cannot move back to ongoing")]
    AssignmentReopened,
    #[error("detail {0} has no approved collection")]
    NoCollectionRecord(DetailKey),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldState {
    networks: BTreeSet<NetworkId>,
    members: BTreeSet<(ServiceId, NetworkId)>,
    details: BTreeMap<DetailKey, Detail>,
    collections: Vec<CollectionRecord>,
    assignments: BTreeMap<ServiceId, Vec<Assignment>>,
    purposes: BTreeMap<NetworkId, BTreeSet<String>>,
    reveal_ttl: Tick,
}

impl Default for WorldState {
    fn default() -> Self {
        Self {
            networks: BTreeSet::new(),
            members: BTreeSet::new(),
            details: BTreeMap::new(),
            collections: Vec::new(),
            assignments: BTreeMap::new(),
            purposes: BTreeMap::new(),
            reveal_ttl: DEFAULT_REVEAL_TTL,
        }
    }
}

impl DetailDirectory for WorldState {
    fn privacy(&self, key: &DetailKey) -> Option<Privacy> {
        self.details.get(key).map(|d| d.privacy)
    }

    fn owner(&self, key: &DetailKey) -> Option<&ServiceId> {
        self.details.get(key).map(|d| &d.owner)
    }
}

impl WorldState {
    pub fn new() -> Self {
        Self::default()
    }

    // ---- seeding ----

    pub fn add_network(&mut self, network: NetworkId) -> Result<(), GovernanceError> {
        if !self.networks.insert(network.clone()) {
            return Err(GovernanceError::DuplicateNetwork(network));
        }
        self.purposes.entry(network).or_default();
        Ok(())
    }

    pub fn add_purpose(&mut self, network: &NetworkId, purpose: impl Into<String>) -> Result<(), GovernanceError> {
        self.require_network(network)?;
        self.purposes
            .entry(network.clone())
            .or_default()
            .insert(purpose.into());
        Ok(())
    }

    pub fn join(&mut self, service: ServiceId, network: NetworkId) -> Result<(), GovernanceError> {
        self.require_network(&network)?;
        if self.is_member(&service, &network) {
            return Err(GovernanceError::AlreadyMember { service, network });
        }
        self.members.insert((service, network));
        Ok(())
    }

    pub fn add_detail(&mut self, detail: Detail) -> Result<(), GovernanceError> {
        self.require_network(&detail.network)?;
        if self.details.contains_key(&detail.key) {
            return Err(GovernanceError::DuplicateDetail(detail.key));
        }
        if !self.is_member(&detail.owner, &detail.network) {
            return Err(GovernanceError::OwnerNotMember {
                owner: detail.owner,
                network: detail.network,
            });
        }
        self.details.insert(detail.key.clone(), detail);
        Ok(())
    }

    pub fn add_assignment(&mut self, id: AssignmentId, service: ServiceId) -> Result<(), GovernanceError> {
        if self.find_assignment(&id).is_some() {
            return Err(GovernanceError::DuplicateAssignment(id));
        }
        self.assignments.entry(service.clone()).or_default().push(Assignment {
            id,
            service,
            status: AssignmentStatus::Ongoing,
        });
        Ok(())
    }

    pub fn finish_assignment(&mut self, id: &AssignmentId, status: AssignmentStatus) -> Result<(), GovernanceError> {
        if status == AssignmentStatus::Ongoing {
            return Err(GovernanceError::AssignmentReopened);
        }
        let a = self
            .assignments
            .values_mut()
            .flatten()
            .find(|a| a.id == *id)
            .ok_or_else(|| GovernanceError::UnknownAssignment(id.clone()))?;
        if a.status != AssignmentStatus::Ongoing {
            return Err(GovernanceError::AssignmentFinished(id.clone()));
        }
        a.status = status;
        Ok(())
    }

    pub fn set_reveal_ttl(&mut self, ttl: Tick) {
        self.reveal_ttl = ttl;
    }

    // ---- queries ----

    pub fn reveal_ttl(&self) -> Tick {
        self.reveal_ttl
    }

    pub fn has_network(&self, network: &NetworkId) -> bool {
        self.networks.contains(network)
    }

    pub fn is_member(&self, service: &ServiceId, network: &NetworkId) -> bool {
        self.members.contains(&(service.clone(), network.clone()))
    }

    pub fn memberships<'a>(&'a self, service: &'a ServiceId) -> impl Iterator<Item = &'a NetworkId> + 'a {
        self.members
            .iter()
            .filter(move |(s, _)| s == service)
            .map(|(_, n)| n)
    }

    pub fn detail(&self, key: &DetailKey) -> Option<&Detail> {
        self.details.get(key)
    }

    pub fn collections(&self) -> &[CollectionRecord] {
        &self.collections
    }

    pub fn assignments_of(&self, service: &ServiceId) -> &[Assignment] {
        self.assignments.get(service).map(Vec::as_slice).unwrap_or(&[])
    }

    fn find_assignment(&self, id: &AssignmentId) -> Option<&Assignment> {
        self.assignments.values().flatten().find(|a| a.id == *id)
    }

    fn require_network(&self, network: &NetworkId) -> Result<(), GovernanceError> {
        if self.networks.contains(network) {
            Ok(())
        } else {
            Err(GovernanceError::UnknownNetwork(network.clone()))
        }
    }

    fn require_detail(&self, key: &DetailKey) -> Result<&Detail, GovernanceError> {
        self.details
            .get(key)
            .ok_or_else(|| GovernanceError::UnknownDetail(key.clone()))
    }

    /// Most recent approved collection of `key`.
    pub fn collection(&self, key: &DetailKey) -> Option<&CollectionRecord> {
        self.collections.iter().rev().find(|r| r.detail == *key)
    }

    // ---- responsibilities ----

    /// Whether `purpose` is an accepted collection purpose on `network`.
    pub fn valid(&self, network: &NetworkId, purpose: &str) -> Result<bool, GovernanceError> {
        self.require_network(network)?;
        Ok(self
            .purposes
            .get(network)
            .is_some_and(|set| set.contains(purpose)))
    }

    pub fn status(&self, id: &AssignmentId) -> Result<AssignmentStatus, GovernanceError> {
        self.find_assignment(id)
            .map(|a| a.status)
            .ok_or_else(|| GovernanceError::UnknownAssignment(id.clone()))
    }

    /// Resp1: collection needs a valid purpose, indicated to the owner, by a
    /// member of the detail's network.
    pub fn exec_collect(
        &mut self,
        collector: &ServiceId,
        key: &DetailKey,
        owner: &ServiceId,
        purpose: &str,
        t: Tick,
    ) -> Result<Verdict<CollectionRecord>, GovernanceError> {
        let detail = self.require_detail(key)?;
        let breach = |reason| Ok(Verdict::Violated(Violation::of(Responsibility::Resp1, reason)));
        if !self.is_member(collector, &detail.network) {
            return breach(ViolationReason::NotMember);
        }
        if detail.owner != *owner {
            return breach(ViolationReason::WrongOwner);
        }
        if !self.valid(&detail.network, purpose)? {
            return breach(ViolationReason::InvalidPurpose);
        }
        let record = CollectionRecord {
            detail: key.clone(),
            collector: collector.clone(),
            purpose: purpose.to_owned(),
            approved_at: t,
            snapshot: detail.value.clone(),
        };
        self.collections.push(record.clone());
        Ok(Verdict::Complied(record))
    }

    /// Resp2: posts must be truthful and come from a member. A post to a
    /// missing detail creates it (owned by the poster, public) on
    /// `network`; without a network the detail must exist.
    pub fn exec_post(
        &mut self,
        poster: &ServiceId,
        key: &DetailKey,
        network: Option<&NetworkId>,
        veracity: bool,
        value: &str,
        _t: Tick,
    ) -> Result<Verdict<()>, GovernanceError> {
        let home = match (self.details.get(key), network) {
            (Some(d), _) => d.network.clone(),
            (None, Some(n)) => {
                self.require_network(n)?;
                n.clone()
            }
            (None, None) => return Err(GovernanceError::UnknownDetail(key.clone())),
        };
        let breach = |reason| Ok(Verdict::Violated(Violation::of(Responsibility::Resp2, reason)));
        if !self.is_member(poster, &home) {
            return breach(ViolationReason::NotMember);
        }
        if !veracity {
            return breach(ViolationReason::FalseVeracity);
        }
        let detail = self.details.entry(key.clone()).or_insert_with(|| Detail {
            key: key.clone(),
            owner: poster.clone(),
            network: home,
            privacy: Privacy::Public,
            value: String::new(),
            veracity: true,
        });
        detail.value = value.to_owned();
        detail.veracity = true;
        Ok(Verdict::Complied(()))
    }

    /// Resp3: any attempt to alter a collected detail is a breach. Nothing is
    /// written.
    pub fn exec_tamper_guard(&self, _actor: &ServiceId, key: &DetailKey, _t: Tick) -> Result<Violation, GovernanceError> {
        self.require_detail(key)?;
        if self.collection(key).is_none() {
            return Err(GovernanceError::NoCollectionRecord(key.clone()));
        }
        Ok(Violation::of(Responsibility::Resp3, ViolationReason::Tampered))
    }

    /// Resp4: sign-off needs every assignment of the service finished.
    /// Returns the network left.
    pub fn exec_signoff(
        &mut self,
        service: &ServiceId,
        network: Option<&NetworkId>,
        _t: Tick,
    ) -> Result<Verdict<NetworkId>, GovernanceError> {
        let network = match network {
            Some(n) => {
                self.require_network(n)?;
                if !self.is_member(service, n) {
                    return Err(GovernanceError::UnknownService(service.clone()));
                }
                n.clone()
            }
            None => {
                let mut nets = self.memberships(service);
                let first = nets
                    .next()
                    .cloned()
                    .ok_or_else(|| GovernanceError::UnknownService(service.clone()))?;
                if nets.next().is_some() {
                    return Err(GovernanceError::AmbiguousNetwork {
                        service: service.clone(),
                    });
                }
                first
            }
        };
        let ongoing: Vec<AssignmentId> = self
            .assignments_of(service)
            .iter()
            .filter(|a| a.status == AssignmentStatus::Ongoing)
            .map(|a| a.id.clone())
            .collect();
        if !ongoing.is_empty() {
            return Ok(Verdict::Violated(Violation::of(
                Responsibility::Resp4,
                ViolationReason::OngoingAssignments(ongoing),
            )));
        }
        self.members.remove(&(service.clone(), network.clone()));
        Ok(Verdict::Complied(network))
    }

    /// Resp5: members may always see a detail. Non-members never see private
    /// details, and see public ones only within `reveal_ttl` ticks of the
    /// latest approved collection.
    pub fn exec_reveal(
        &self,
        _revealer: &ServiceId,
        key: &DetailKey,
        requester: &ServiceId,
        t: Tick,
    ) -> Result<Verdict<String>, GovernanceError> {
        let detail = self.require_detail(key)?;
        if self.is_member(requester, &detail.network) {
            return Ok(Verdict::Complied(detail.value.clone()));
        }
        let breach = |reason| Ok(Verdict::Violated(Violation::of(Responsibility::Resp5, reason)));
        if detail.privacy == Privacy::Private {
            return breach(ViolationReason::PrivateDisclosure);
        }
        match self.collection(key) {
            None => breach(ViolationReason::NoAuthorization),
            Some(r) if t.saturating_sub(r.approved_at) > self.reveal_ttl => {
                breach(ViolationReason::AuthorizationExpired)
            }
            Some(_) => Ok(Verdict::Complied(detail.value.clone())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn world() -> WorldState {
        let mut w = WorldState::new();
        w.add_network("fb".into()).unwrap();
        w.add_network("yt".into()).unwrap();
        w.add_purpose(&"fb".into(), "analytics").unwrap();
        for (s, n) in [("svcA", "fb"), ("svcB", "fb"), ("svcY", "yt")] {
            w.join(s.into(), n.into()).unwrap();
        }
        for (key, owner, privacy) in [("email", "svcB", Privacy::Public), ("phone", "svcB", Privacy::Private)] {
            w.add_detail(Detail {
                key: key.into(),
                owner: owner.into(),
                network: "fb".into(),
                privacy,
                value: format!("{key}-v0"),
                veracity: true,
            })
            .unwrap();
        }
        w
    }

    fn svc(s: &str) -> ServiceId {
        s.into()
    }

    fn key(s: &str) -> DetailKey {
        s.into()
    }

    #[test]
    fn valid_purpose() {
        let w = world();
        assert_eq!(w.valid(&"fb".into(), "analytics"), Ok(true));
        assert_eq!(w.valid(&"fb".into(), "spam"), Ok(false));
        assert_eq!(
            w.valid(&"mars".into(), "analytics"),
            Err(GovernanceError::UnknownNetwork("mars".into()))
        );
    }

    #[test]
    fn seeding_rules() {
        let mut w = world();
        assert!(matches!(w.add_network("fb".into()), Err(GovernanceError::DuplicateNetwork(_))));
        assert!(matches!(
            w.join("svcA".into(), "fb".into()),
            Err(GovernanceError::AlreadyMember { .. })
        ));
        let orphan = Detail {
            key: "x".into(),
            owner: "svcY".into(),
            network: "fb".into(),
            privacy: Privacy::Public,
            value: "v".into(),
            veracity: true,
        };
        assert!(matches!(w.add_detail(orphan), Err(GovernanceError::OwnerNotMember { .. })));
    }

    #[test]
    fn collect_with_valid_purpose_records_snapshot() {
        let mut w = world();
        let v = w.exec_collect(&svc("svcA"), &key("email"), &svc("svcB"), "analytics", 3).unwrap();
        let Verdict::Complied(rec) = v else { panic!("{v:?}") };
        assert_eq!(rec.snapshot(), "email-v0");
        assert_eq!(rec.approved_at(), 3);
        assert_eq!(w.collections().len(), 1);
    }

    #[test]
    fn collect_breaches() {
        let mut w = world();
        let before = w.clone();
        let invalid = w.exec_collect(&svc("svcA"), &key("email"), &svc("svcB"), "spam", 0).unwrap();
        assert_eq!(invalid.violation().unwrap().reason, ViolationReason::InvalidPurpose);
        let outsider = w.exec_collect(&svc("svcY"), &key("email"), &svc("svcB"), "analytics", 0).unwrap();
        assert_eq!(
            outsider.violation().unwrap(),
            &Violation::of(Responsibility::Resp1, ViolationReason::NotMember)
        );
        let owner = w.exec_collect(&svc("svcA"), &key("email"), &svc("svcA"), "analytics", 0).unwrap();
        assert_eq!(owner.violation().unwrap().reason, ViolationReason::WrongOwner);
        assert_eq!(w, before);
        assert_eq!(
            w.exec_collect(&svc("svcA"), &key("nope"), &svc("svcB"), "analytics", 0),
            Err(GovernanceError::UnknownDetail("nope".into()))
        );
    }

    #[test]
    fn post_rules() {
        let mut w = world();
        assert_eq!(
            w.exec_post(&svc("svcA"), &key("video1"), Some(&"fb".into()), true, "clip", 0),
            Ok(Verdict::Complied(()))
        );
        let d = w.detail(&key("video1")).unwrap();
        assert_eq!((d.owner.as_str(), d.value.as_str(), d.veracity), ("svcA", "clip", true));

        let before = w.clone();
        let lie = w.exec_post(&svc("svcA"), &key("video1"), None, false, "fake", 1).unwrap();
        assert_eq!(lie.violation().unwrap().reason, ViolationReason::FalseVeracity);
        let outsider = w.exec_post(&svc("svcY"), &key("video1"), None, true, "x", 1).unwrap();
        assert_eq!(
            outsider.violation().unwrap(),
            &Violation::of(Responsibility::Resp2, ViolationReason::NotMember)
        );
        assert_eq!(w, before);
        assert_eq!(
            w.exec_post(&svc("svcA"), &key("new"), Some(&"mars".into()), true, "x", 1),
            Err(GovernanceError::UnknownNetwork("mars".into()))
        );
    }

    #[test]
    fn tamper_guard() {
        let mut w = world();
        assert_eq!(
            w.exec_tamper_guard(&svc("svcA"), &key("email"), 0),
            Err(GovernanceError::NoCollectionRecord("email".into()))
        );
        w.exec_collect(&svc("svcA"), &key("email"), &svc("svcB"), "analytics", 1).unwrap();
        let before = w.clone();
        for t in [2, 3] {
            assert_eq!(
                w.exec_tamper_guard(&svc("svcA"), &key("email"), t).unwrap().responsibility,
                Responsibility::Resp3
            );
        }
        assert_eq!(w, before);
        assert_eq!(w.collection(&key("email")).unwrap().snapshot(), "email-v0");
    }

    #[test]
    fn signoff_rules() {
        let mut w = world();
        w.add_assignment("a1".into(), svc("svcA")).unwrap();
        w.add_assignment("a2".into(), svc("svcA")).unwrap();
        let before = w.clone();
        let blocked = w.exec_signoff(&svc("svcA"), None, 0).unwrap();
        assert_eq!(
            blocked.violation().unwrap().reason,
            ViolationReason::OngoingAssignments(vec!["a1".into(), "a2".into()])
        );
        assert_eq!(w, before);

        w.finish_assignment(&"a1".into(), AssignmentStatus::Complete).unwrap();
        w.finish_assignment(&"a2".into(), AssignmentStatus::Failed).unwrap();
        assert_eq!(w.exec_signoff(&svc("svcA"), None, 1), Ok(Verdict::Complied("fb".into())));
        assert!(!w.is_member(&svc("svcA"), &"fb".into()));
        assert_eq!(
            w.exec_signoff(&svc("svcA"), None, 2),
            Err(GovernanceError::UnknownService("svcA".into()))
        );
    }

    #[test]
    fn signoff_needs_network_when_ambiguous() {
        let mut w = world();
        w.join(svc("svcA"), "yt".into()).unwrap();
        assert!(matches!(
            w.exec_signoff(&svc("svcA"), None, 0),
            Err(GovernanceError::AmbiguousNetwork { .. })
        ));
        assert_eq!(
            w.exec_signoff(&svc("svcA"), Some(&"yt".into()), 0),
            Ok(Verdict::Complied("yt".into()))
        );
        assert!(w.is_member(&svc("svcA"), &"fb".into()));
    }

    #[test]
    fn assignment_status() {
        let mut w = world();
        w.add_assignment("a1".into(), svc("svcA")).unwrap();
        assert_eq!(w.status(&"a1".into()), Ok(AssignmentStatus::Ongoing));
        w.finish_assignment(&"a1".into(), AssignmentStatus::Complete).unwrap();
        assert_eq!(w.status(&"a1".into()), Ok(AssignmentStatus::Complete));
        assert_eq!(
            w.finish_assignment(&"a1".into(), AssignmentStatus::Failed),
            Err(GovernanceError::AssignmentFinished("a1".into()))
        );
        assert_eq!(
            w.status(&"zz".into()),
            Err(GovernanceError::UnknownAssignment("zz".into()))
        );
    }

    #[test]
    fn reveal_rules() {
        let mut w = world();
        w.set_reveal_ttl(10);
        let r = |w: &WorldState, k: &str, who: &str, t| w.exec_reveal(&svc("svcA"), &key(k), &svc(who), t).unwrap();
        assert_eq!(r(&w, "phone", "svcB", 0), Verdict::Complied("phone-v0".into()));
        assert_eq!(r(&w, "email", "svcY", 0).violation().unwrap().reason, ViolationReason::NoAuthorization);
        w.exec_collect(&svc("svcA"), &key("email"), &svc("svcB"), "analytics", 5).unwrap();
        assert_eq!(r(&w, "email", "svcY", 15), Verdict::Complied("email-v0".into()));
        assert_eq!(
            r(&w, "email", "svcY", 16).violation().unwrap(),
            &Violation::of(Responsibility::Resp5, ViolationReason::AuthorizationExpired)
        );
        assert_eq!(r(&w, "phone", "svcY", 0).violation().unwrap().reason, ViolationReason::PrivateDisclosure);
    }

    #[derive(Debug, Clone)]
    enum Op {
        Collect(usize, usize, bool),
        Post(usize, usize, bool),
        Tamper(usize),
        Reveal(usize, usize),
        Tick(u64),
    }

    const SERVICES: [&str; 3] = ["svcA", "svcB", "svcY"];
    const KEYS: [&str; 2] = ["email", "phone"];

    fn op() -> impl Strategy<Value = Op> {
        prop_oneof![
            (0..3usize, 0..2usize, any::<bool>()).prop_map(|(s, k, v)| Op::Collect(s, k, v)),
            (0..3usize, 0..2usize, any::<bool>()).prop_map(|(s, k, v)| Op::Post(s, k, v)),
            (0..2usize).prop_map(Op::Tamper),
            (0..3usize, 0..2usize).prop_map(|(s, k)| Op::Reveal(s, k)),
            (0..40u64).prop_map(Op::Tick),
        ]
    }

    proptest! {
        // Violations never change the world, and collection snapshots
        // keep the value seen at approval time.
        #[test]
        fn violations_are_atomic_and_snapshots_frozen(ops in prop::collection::vec(op(), 1..40)) {
            let mut w = world();
            w.set_reveal_ttl(20);
            let mut t = 0;
            let mut frozen: Vec<(DetailKey, String)> = Vec::new();
            for (i, o) in ops.into_iter().enumerate() {
                let before = w.clone();
                let violated = match o {
                    Op::Collect(s, k, ok) => {
                        let purpose = if ok { "analytics" } else { "spam" };
                        let v = w.exec_collect(&svc(SERVICES[s]), &key(KEYS[k]), &svc("svcB"), purpose, t).unwrap();
                        if let Verdict::Complied(rec) = &v {
                            frozen.push((rec.detail().clone(), rec.snapshot().to_owned()));
                        }
                        v.is_violation()
                    }
                    Op::Post(s, k, ok) => w
                        .exec_post(&svc(SERVICES[s]), &key(KEYS[k]), None, ok, &format!("v{i}"), t)
                        .unwrap()
                        .is_violation(),
                    Op::Tamper(k) => w.exec_tamper_guard(&svc("svcA"), &key(KEYS[k]), t).is_ok(),
                    Op::Reveal(s, k) => w
                        .exec_reveal(&svc("svcA"), &key(KEYS[k]), &svc(SERVICES[s]), t)
                        .unwrap()
                        .is_violation(),
                    Op::Tick(n) => { t += n; false }
                };
                if violated {
                    prop_assert_eq!(&w, &before);
                }
                prop_assert_eq!(w.collections().len(), frozen.len());
                for (rec, (k, snap)) in w.collections().iter().zip(&frozen) {
                    prop_assert_eq!(rec.detail(), k);
                    prop_assert_eq!(rec.snapshot(), snap.as_str());
                }
            }
        }

        #[test]
        fn reveal_expiry_is_monotone(approved in 0..50u64, ttl in 0..30u64, probe in 0..200u64, later in 0..200u64) {
            let mut w = world();
            w.set_reveal_ttl(ttl);
            w.exec_collect(&svc("svcA"), &key("email"), &svc("svcB"), "analytics", approved).unwrap();
            let t = approved + probe;
            let first = w.exec_reveal(&svc("svcA"), &key("email"), &svc("svcY"), t).unwrap();
            if first.is_violation() {
                let again = w.exec_reveal(&svc("svcA"), &key("email"), &svc("svcY"), t + later).unwrap();
                prop_assert!(again.is_violation());
            }
        }
    }
}
