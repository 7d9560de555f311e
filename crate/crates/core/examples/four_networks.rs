// The bundled four-network application and its monitoring panel.

use std::error::Error;

use commitments::governance::WorldState;
use commitments::simulator::{four_network_demo, run};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let done = run(&four_network_demo(), WorldState::new())?;
    print!("{}", done.trace);
    let report = done.scheduler.snapshot();
    println!("{:<10} {:>9} {:>9} {:>8}", "service", "completed", "violated", "failed");
    for (svc, n) in &report.services {
        println!("{svc:<10} {:>9} {:>9} {:>8}", n.completed, n.violated, n.failed);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
