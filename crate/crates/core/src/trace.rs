//! Canonical event trace.
//!
//! One event per line: `t=<tick> <Kind> <subject>[ key=value...]`. Keys
//! appear in a fixed order per kind:
//!
//! | kind       | subject  | keys                                              |
//! |------------|----------|---------------------------------------------------|
//! | Registered | service  | `network`                                         |
//! | Rejected   | service  | `network`                                         |
//! | Assigned   | service  | `resp`                                            |
//! | Submitted  | id       | `service verb target access [prio] [guard] [held]`|
//! | Activated  | id       | `[snapshot]` (collect) or `[value]` (post, reveal)|
//! | Waiting    | id       | `blockers`                                        |
//! | Completed  | id       |                                                   |
//! | Failed     | id       |                                                   |
//! | Violation  | id       | `resp reason [ids]`                               |
//! | SignedOff  | service  | `network`                                         |
//! | Snapshot   | `monitor`| `services queue`                                  |
//! | Snapshot   | service  | `pending waiting active completed failed violated`|
//!
//! Lists are comma-separated; an empty list is written `-`. The trace
//! closes with `t=<tick> END ok=<bool>`.

use std::fmt;

use crate::model::Tick;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    Registered,
    Rejected,
    Assigned,
    Submitted,
    Activated,
    Waiting,
    Completed,
    Failed,
    Violation,
    Snapshot,
    SignedOff,
}

impl EventKind {
    pub fn name(self) -> &'static str {
        match self {
            EventKind::Registered => "Registered",
            EventKind::Rejected => "Rejected",
            EventKind::Assigned => "Assigned",
            EventKind::Submitted => "Submitted",
            EventKind::Activated => "Activated",
            EventKind::Waiting => "Waiting",
            EventKind::Completed => "Completed",
            EventKind::Failed => "Failed",
            EventKind::Violation => "Violation",
            EventKind::Snapshot => "Snapshot",
            EventKind::SignedOff => "SignedOff",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleEvent {
    pub clock: Tick,
    pub kind: EventKind,
    pub subject: String,
    pub attrs: Vec<(&'static str, String)>,
}

impl ScheduleEvent {
    pub fn new(clock: Tick, kind: EventKind, subject: impl fmt::Display) -> Self {
        Self {
            clock,
            kind,
            subject: subject.to_string(),
            attrs: Vec::new(),
        }
    }

    pub fn with(mut self, key: &'static str, value: impl fmt::Display) -> Self {
        self.attrs.push((key, value.to_string()));
        self
    }

    pub fn with_list<T: fmt::Display>(self, key: &'static str, items: impl IntoIterator<Item = T>) -> Self {
        let joined = join(items);
        self.with(key, joined)
    }

    pub fn attr(&self, key: &str) -> Option<&str> {
        self.attrs.iter().find(|(k, _)| *k == key).map(|(_, v)| v.as_str())
    }
}

/// Comma-joins `items`, `-` when empty.
pub fn join<T: fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    let parts: Vec<String> = items.into_iter().map(|i| i.to_string()).collect();
    if parts.is_empty() {
        "-".to_owned()
    } else {
        parts.join(",")
    }
}

impl fmt::Display for ScheduleEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t={} {} {}", self.clock, self.kind, self.subject)?;
        for (k, v) in &self.attrs {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub events: Vec<ScheduleEvent>,
    pub end_clock: Tick,
    pub ok: bool,
}

impl Trace {
    pub fn of_kind(&self, kind: EventKind) -> impl Iterator<Item = &ScheduleEvent> {
        self.events.iter().filter(move |e| e.kind == kind)
    }

    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.events {
            writeln!(f, "{e}")?;
        }
        writeln!(f, "t={} END ok={}", self.end_clock, self.ok)
    }
}
