// The same queue served first-come-first-served and by priority.
//
// A public write holds `pub`; behind it wait another public write, the
// owner's sign-off and a write to the private detail.

use std::error::Error;

use commitments::governance::{Detail, WorldState};
use commitments::model::{CommitmentFactory, CommitmentSpec, ContentAction, Kind, Privacy, Responsibility};
use commitments::scheduler::{Outcome, Policy, Scheduler};

fn world() -> Result<WorldState, Box<dyn Error>> {
    let mut w = WorldState::new();
    w.add_network("net".into())?;
    w.join("owner".into(), "net".into())?;
    w.join("poster".into(), "net".into())?;
    for (key, privacy) in [("pub", Privacy::Public), ("priv", Privacy::Private)] {
        w.add_detail(Detail {
            key: key.into(),
            owner: "owner".into(),
            network: "net".into(),
            privacy,
            value: "v0".into(),
            veracity: true,
        })?;
    }
    Ok(w)
}

fn post(id: &str, detail: &str) -> CommitmentSpec {
    CommitmentSpec {
        id: id.into(),
        kind: Kind::Social,
        responsibility: Responsibility::Resp2,
        debtor: "poster".into(),
        creditor: "net".into(),
        content: ContentAction::Post {
            detail: detail.into(),
            veracity: true,
            value: None,
        },
        condition: None,
        explicit_priority: None,
    }
}

fn signoff(id: &str) -> CommitmentSpec {
    CommitmentSpec {
        id: id.into(),
        responsibility: Responsibility::Resp4,
        debtor: "owner".into(),
        content: ContentAction::Signoff {
            service: "owner".into(),
            network: Some("net".into()),
        },
        ..post(id, "pub")
    }
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let world = world()?;
    for policy in [Policy::Fcfs, Policy::Priority] {
        let mut factory = CommitmentFactory::new();
        let mut scheduler = Scheduler::new(policy);
        let specs = [post("c1", "pub"), post("c2", "pub"), signoff("c3"), post("c4", "priv")];
        for (t, spec) in specs.into_iter().enumerate() {
            let c = factory.new_commitment(spec, &world, t as u64)?;
            let label = format!("{} prio={}", c.id(), c.priority());
            println!("{policy}: {label} -> {:?}", scheduler.submit(c)?);
        }
        let mut order = Vec::new();
        while let Some(next) = scheduler.active().first().map(|c| c.id().to_string()) {
            order.extend(scheduler.on_complete(&next, Outcome::Completed)?.iter().map(|c| c.id().to_string()));
        }
        println!("{policy}: activation order after c1: {}", order.join(" "));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
