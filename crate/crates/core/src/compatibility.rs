//! Friend / family / strange relation between commitments.

use std::fmt;

use crate::model::{AccessClass, Commitment, ContentAction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    /// Both read: they may run together.
    Friend,
    /// Both write.
    Family,
    /// One reads, the other writes.
    Strange,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Whether `a` and `b` touch the same resource. A sign-off contends with
/// every commitment on a detail owned by the signing-off service.
pub fn same_scope(a: &Commitment, b: &Commitment) -> bool {
    a.target() == b.target() || signs_off_owner_of(a, b) || signs_off_owner_of(b, a)
}

fn signs_off_owner_of(signoff: &Commitment, other: &Commitment) -> bool {
    match signoff.content() {
        ContentAction::Signoff { service, .. } => other.target_owner() == Some(service),
        _ => false,
    }
}

/// Only meaningful for same-scope pairs.
pub fn classify(a: &Commitment, b: &Commitment) -> Relation {
    relation_of(a.access(), b.access())
}

pub fn relation_of(a: AccessClass, b: AccessClass) -> Relation {
    match (a, b) {
        (AccessClass::Reader, AccessClass::Reader) => Relation::Friend,
        (AccessClass::Writer, AccessClass::Writer) => Relation::Family,
        _ => Relation::Strange,
    }
}

/// Family and strange commitments must wait for each other.
pub fn conflicts(relation: Relation) -> bool {
    match relation {
        Relation::Friend => false,
        Relation::Family | Relation::Strange => true,
    }
}

/// Shorthand for `same_scope(a, b) && conflicts(classify(a, b))`.
pub fn contends(a: &Commitment, b: &Commitment) -> bool {
    same_scope(a, b) && conflicts(classify(a, b))
}
