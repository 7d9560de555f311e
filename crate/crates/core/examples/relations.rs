// Friend, family and strange commitments on one detail.

use std::error::Error;

use commitments::scenario;
use commitments::simulator::Simulator;

const SETUP: &str = "
network net
purpose net analytics
signup owner net accept
signup a net accept
signup b net accept
assign a resp1
assign a resp2
assign b resp1
assign b resp2
detail email owner net public a@example.org
";

const CASES: [(&str, &str); 3] = [
    ("friend", "submit c1 a collect email analytics\nsubmit c2 b collect email analytics\n"),
    ("family", "submit c1 a post email true x\nsubmit c2 b post email true y\n"),
    ("strange", "submit c1 a post email true x\nsubmit c2 b collect email analytics\n"),
];

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for (name, body) in CASES {
        let text = format!("{SETUP}{body}complete c1\n");
        let mut sim = Simulator::new();
        sim.run_scenario(&scenario::parse_named(name, &text)?)?;
        println!("-- {name}");
        for e in sim.events().iter().filter(|e| e.subject == "c2") {
            println!("{e}");
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
