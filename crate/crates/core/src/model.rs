//! Commitments, their content actions and lifecycle.
//!
//! A commitment is made by a debtor service to a creditor (a network, or a
//! composition for business commitments) under one of the five
//! responsibilities. Its access class and default priority are derived from
//! the content action and are never set directly.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::ids::{CommitmentId, DetailKey, NetworkId, ServiceId};

/// Logical clock tick.
pub type Tick = u64;

/// Priority given to commitments on private details when none is explicit.
pub const PRIVATE_PRIORITY: u32 = 10;
/// Priority given to commitments on public details or non-detail targets.
pub const PUBLIC_PRIORITY: u32 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    /// Proper use of the networks a service signs up to.
    Social,
    /// Proper development of composite services; creditor is a composition.
    Business,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Responsibility {
    Resp1,
    Resp2,
    Resp3,
    Resp4,
    Resp5,
}

impl Responsibility {
    pub const ALL: [Responsibility; 5] = [
        Responsibility::Resp1,
        Responsibility::Resp2,
        Responsibility::Resp3,
        Responsibility::Resp4,
        Responsibility::Resp5,
    ];

    /// The action verb each responsibility governs.
    pub fn verb(self) -> Verb {
        match self {
            Responsibility::Resp1 => Verb::Collect,
            Responsibility::Resp2 => Verb::Post,
            Responsibility::Resp3 => Verb::Tamper,
            Responsibility::Resp4 => Verb::Signoff,
            Responsibility::Resp5 => Verb::Reveal,
        }
    }

    pub fn for_verb(verb: Verb) -> Self {
        match verb {
            Verb::Collect => Responsibility::Resp1,
            Verb::Post => Responsibility::Resp2,
            Verb::Tamper => Responsibility::Resp3,
            Verb::Signoff => Responsibility::Resp4,
            Verb::Reveal => Responsibility::Resp5,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Responsibility::Resp1 => "resp1",
            Responsibility::Resp2 => "resp2",
            Responsibility::Resp3 => "resp3",
            Responsibility::Resp4 => "resp4",
            Responsibility::Resp5 => "resp5",
        }
    }
}

impl fmt::Display for Responsibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verb {
    Collect,
    Post,
    Tamper,
    Signoff,
    Reveal,
}

impl Verb {
    pub const ALL: [Verb; 5] = [Verb::Collect, Verb::Post, Verb::Tamper, Verb::Signoff, Verb::Reveal];

    pub fn token(self) -> &'static str {
        match self {
            Verb::Collect => "collect",
            Verb::Post => "post",
            Verb::Tamper => "tamper",
            Verb::Signoff => "signoff",
            Verb::Reveal => "reveal",
        }
    }
}

impl fmt::Display for Verb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AccessClass {
    Reader,
    Writer,
}

impl AccessClass {
    pub fn token(self) -> &'static str {
        match self {
            AccessClass::Reader => "reader",
            AccessClass::Writer => "writer",
        }
    }
}

impl fmt::Display for AccessClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Privacy {
    Public,
    Private,
}

/// The resource a content action touches.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    Detail(DetailKey),
    Service(ServiceId),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Detail(key) => write!(f, "{key}"),
            Target::Service(svc) => write!(f, "{svc}"),
        }
    }
}

/// What a commitment promises to do. Each variant carries exactly the
/// arguments its verb needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContentAction {
    /// Collect detail `detail` owned by `owner` for `purpose`.
    Collect {
        detail: DetailKey,
        owner: ServiceId,
        purpose: String,
    },
    /// Post `detail` with the given veracity. Without a value the
    /// commitment id is written.
    Post {
        detail: DetailKey,
        veracity: bool,
        value: Option<String>,
    },
    /// Attempt to alter a collected detail.
    Tamper {
        detail: DetailKey,
        value: Option<String>,
    },
    /// Sign `service` off from `network` (or its only network).
    Signoff {
        service: ServiceId,
        network: Option<NetworkId>,
    },
    /// Reveal `detail` to `requester`.
    Reveal {
        detail: DetailKey,
        requester: ServiceId,
    },
}

impl ContentAction {
    pub fn verb(&self) -> Verb {
        match self {
            ContentAction::Collect { .. } => Verb::Collect,
            ContentAction::Post { .. } => Verb::Post,
            ContentAction::Tamper { .. } => Verb::Tamper,
            ContentAction::Signoff { .. } => Verb::Signoff,
            ContentAction::Reveal { .. } => Verb::Reveal,
        }
    }

    pub fn target(&self) -> Target {
        match self {
            ContentAction::Collect { detail, .. }
            | ContentAction::Post { detail, .. }
            | ContentAction::Tamper { detail, .. }
            | ContentAction::Reveal { detail, .. } => Target::Detail(detail.clone()),
            ContentAction::Signoff { service, .. } => Target::Service(service.clone()),
        }
    }

    pub fn detail(&self) -> Option<&DetailKey> {
        match self {
            ContentAction::Collect { detail, .. }
            | ContentAction::Post { detail, .. }
            | ContentAction::Tamper { detail, .. }
            | ContentAction::Reveal { detail, .. } => Some(detail),
            ContentAction::Signoff { .. } => None,
        }
    }
}

/// Lookup of detail metadata needed when a commitment is built.
pub trait DetailDirectory {
    fn privacy(&self, key: &DetailKey) -> Option<Privacy>;
    fn owner(&self, key: &DetailKey) -> Option<&ServiceId>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LifecycleState {
    Pending,
    Waiting,
    Active,
    Completed,
    Failed,
    Violated,
}

impl LifecycleState {
    pub const ALL: [LifecycleState; 6] = [
        LifecycleState::Pending,
        LifecycleState::Waiting,
        LifecycleState::Active,
        LifecycleState::Completed,
        LifecycleState::Failed,
        LifecycleState::Violated,
    ];

    pub fn is_terminal(self) -> bool {
        matches!(
            self,
            LifecycleState::Completed | LifecycleState::Failed | LifecycleState::Violated
        )
    }

    /// The state reached from `self` on `event`, if that move is legal.
    pub fn next(self, event: LifecycleEvent) -> Option<LifecycleState> {
        use LifecycleEvent as E;
        use LifecycleState as S;
        match (self, event) {
            (S::Pending, E::Enqueue) => Some(S::Waiting),
            (S::Pending | S::Waiting, E::Activate) => Some(S::Active),
            (S::Pending | S::Waiting | S::Active, E::Violate) => Some(S::Violated),
            (S::Active, E::Complete) => Some(S::Completed),
            (S::Active, E::Fail) => Some(S::Failed),
            _ => None,
        }
    }
}

impl fmt::Display for LifecycleState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LifecycleEvent {
    Activate,
    Enqueue,
    Complete,
    Fail,
    Violate,
}

impl LifecycleEvent {
    pub const ALL: [LifecycleEvent; 5] = [
        LifecycleEvent::Activate,
        LifecycleEvent::Enqueue,
        LifecycleEvent::Complete,
        LifecycleEvent::Fail,
        LifecycleEvent::Violate,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("responsibility {responsibility} does not govern verb {verb}")]
    MismatchedResponsibility {
        responsibility: Responsibility,
        verb: Verb,
    },
    #[error("commitment id {0} already used")]
    DuplicateId(CommitmentId),
    #[error("unknown detail {0}")]
    UnknownDetail(DetailKey),
    #[error("sign-off of {target} cannot be committed by {debtor}")]
    ForeignSignoff { debtor: ServiceId, target: ServiceId },
    #[error("illegal transition from {from} on {event:?}")]
    IllegalTransition {
        from: LifecycleState,
        event: LifecycleEvent,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Commitment {
    id: CommitmentId,
    kind: Kind,
    responsibility: Responsibility,
    debtor: ServiceId,
    creditor: String,
    content: ContentAction,
    condition: Option<String>,
    access: AccessClass,
    priority: u32,
    state: LifecycleState,
    arrival: Tick,
    /// Owner of the target detail, resolved at submission.
    target_owner: Option<ServiceId>,
}

impl Commitment {
    pub fn id(&self) -> &CommitmentId {
        &self.id
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn responsibility(&self) -> Responsibility {
        self.responsibility
    }

    pub fn debtor(&self) -> &ServiceId {
        &self.debtor
    }

    pub fn creditor(&self) -> &str {
        &self.creditor
    }

    pub fn content(&self) -> &ContentAction {
        &self.content
    }

    pub fn condition(&self) -> Option<&str> {
        self.condition.as_deref()
    }

    pub fn is_conditional(&self) -> bool {
        self.condition.is_some()
    }

    pub fn access(&self) -> AccessClass {
        self.access
    }

    pub fn priority(&self) -> u32 {
        self.priority
    }

    pub fn state(&self) -> LifecycleState {
        self.state
    }

    pub fn arrival(&self) -> Tick {
        self.arrival
    }

    pub fn target(&self) -> Target {
        self.content.target()
    }

    pub fn target_owner(&self) -> Option<&ServiceId> {
        self.target_owner.as_ref()
    }

    /// Applies a lifecycle event, leaving `self` untouched.
    pub fn transition(&self, event: LifecycleEvent) -> Result<Commitment, ModelError> {
        let next = self
            .state
            .next(event)
            .ok_or(ModelError::IllegalTransition { from: self.state, event })?;
        Ok(Commitment {
            state: next,
            ..self.clone()
        })
    }
}

/// Everything the caller chooses about a new commitment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommitmentSpec {
    pub id: CommitmentId,
    pub kind: Kind,
    pub responsibility: Responsibility,
    pub debtor: ServiceId,
    pub creditor: String,
    pub content: ContentAction,
    pub condition: Option<String>,
    pub explicit_priority: Option<u32>,
}

/// Collect and Reveal only read; everything else mutates a detail or the
/// membership registry.
pub fn derive_access_class(content: &ContentAction) -> AccessClass {
    match content.verb() {
        Verb::Collect | Verb::Reveal => AccessClass::Reader,
        Verb::Post | Verb::Tamper | Verb::Signoff => AccessClass::Writer,
    }
}

pub fn derive_priority(
    content: &ContentAction,
    explicit: Option<u32>,
    details: &impl DetailDirectory,
) -> Result<u32, ModelError> {
    let privacy = match content.detail() {
        Some(key) => Some(
            details
                .privacy(key)
                .ok_or_else(|| ModelError::UnknownDetail(key.clone()))?,
        ),
        None => None,
    };
    if let Some(p) = explicit {
        return Ok(p);
    }
    Ok(match privacy {
        Some(Privacy::Private) => PRIVATE_PRIORITY,
        _ => PUBLIC_PRIORITY,
    })
}

/// Issues commitments and remembers every id handed out.
#[derive(Debug, Clone, Default)]
pub struct CommitmentFactory {
    used: BTreeSet<CommitmentId>,
}

impl CommitmentFactory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_used(&self, id: &CommitmentId) -> bool {
        self.used.contains(id)
    }

    /// Builds a `Pending` commitment arriving at `clock`.
    pub fn new_commitment(
        &mut self,
        spec: CommitmentSpec,
        details: &impl DetailDirectory,
        clock: Tick,
    ) -> Result<Commitment, ModelError> {
        let verb = spec.content.verb();
        if spec.responsibility.verb() != verb {
            return Err(ModelError::MismatchedResponsibility {
                responsibility: spec.responsibility,
                verb,
            });
        }
        if self.used.contains(&spec.id) {
            return Err(ModelError::DuplicateId(spec.id));
        }
        if let ContentAction::Signoff { service, .. } = &spec.content {
            if *service != spec.debtor {
                return Err(ModelError::ForeignSignoff {
                    debtor: spec.debtor,
                    target: service.clone(),
                });
            }
        }
        let priority = derive_priority(&spec.content, spec.explicit_priority, details)?;
        let target_owner = spec.content.detail().and_then(|k| details.owner(k)).cloned();
        self.used.insert(spec.id.clone());
        Ok(Commitment {
            access: derive_access_class(&spec.content),
            id: spec.id,
            kind: spec.kind,
            responsibility: spec.responsibility,
            debtor: spec.debtor,
            creditor: spec.creditor,
            content: spec.content,
            condition: spec.condition,
            priority,
            state: LifecycleState::Pending,
            arrival: clock,
            target_owner,
        })
    }
}
