// Scheduler against the brute-force reference on small instances.

use std::error::Error;

use commitments::model::AccessClass;
use commitments::oracle::{enumerate_outcomes, run_grid, MiniCommitment, MiniInstance};
use commitments::scheduler::Policy;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mini = |id: &str, access, arrival| MiniCommitment {
        id: id.into(),
        access,
        target: "d".into(),
        priority: 0,
        arrival,
    };
    let inst = MiniInstance::fifo(
        vec![
            mini("r1", AccessClass::Reader, 0),
            mini("w", AccessClass::Writer, 1),
            mini("r2", AccessClass::Reader, 2),
        ],
        Policy::Fcfs,
    )?;
    let outcomes = enumerate_outcomes(&inst, Policy::Fcfs)?;
    println!("{} interleavings of r1 w r2", outcomes.len());
    for step in &outcomes[0].steps {
        println!("  {step:?}");
    }

    let report = run_grid(3)?;
    println!(
        "grid n<=3: {} cases, {} passed, {} interleavings, {} unsafe",
        report.cases, report.passed, report.outcomes, report.unsafe_states
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
