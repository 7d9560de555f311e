// Each responsibility checked directly against a world state.

use std::error::Error;

use commitments::governance::{AssignmentStatus, Detail, Verdict, WorldState};
use commitments::model::Privacy;

fn show<T: std::fmt::Debug>(label: &str, v: &Verdict<T>) {
    match v {
        Verdict::Complied(x) => println!("{label:<28} ok {x:?}"),
        Verdict::Violated(breach) => println!("{label:<28} {} {}", breach.responsibility, breach.reason.token()),
    }
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut w = WorldState::new();
    w.add_network("net".into())?;
    w.add_purpose(&"net".into(), "analytics")?;
    w.set_reveal_ttl(5);
    w.join("owner".into(), "net".into())?;
    w.join("agent".into(), "net".into())?;
    w.add_detail(Detail {
        key: "email".into(),
        owner: "owner".into(),
        network: "net".into(),
        privacy: Privacy::Public,
        value: "a@example.org".into(),
        veracity: true,
    })?;
    w.add_assignment("job".into(), "agent".into())?;

    let (agent, owner, email) = (&"agent".into(), &"owner".into(), &"email".into());
    show("collect for analytics", &w.exec_collect(agent, email, owner, "analytics", 1)?);
    show("collect for spying", &w.exec_collect(agent, email, owner, "spying", 1)?);
    show("post a true value", &w.exec_post(agent, email, None, true, "b@example.org", 2)?);
    show("post a false value", &w.exec_post(agent, email, None, false, "lie", 2)?);
    let breach = w.exec_tamper_guard(agent, email, 2)?;
    println!("{:<28} {} {}", "tamper a collected detail", breach.responsibility, breach.reason.token());
    show("reveal at t=6", &w.exec_reveal(agent, email, &"outsider".into(), 6)?);
    show("reveal at t=7", &w.exec_reveal(agent, email, &"outsider".into(), 7)?);
    show("sign off while busy", &w.exec_signoff(agent, None, 8)?);
    w.finish_assignment(&"job".into(), AssignmentStatus::Complete)?;
    show("sign off when done", &w.exec_signoff(agent, None, 9)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
