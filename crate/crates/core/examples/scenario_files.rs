// Parsing, printing and error locations for scenario text.

use std::error::Error;

use commitments::scenario::{parse, parse_named, GRAMMAR};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    print!("{GRAMMAR}");
    let s = parse("network net  # hub\nsubmit c1 svc post feed true hello prio=3 if=launch\ntick 2\n")?;
    print!("{s}");
    match parse_named("typo.scn", "network net\nsubmit c1 svc publish feed\n") {
        Err(e) => println!("{e}"),
        Ok(_) => unreachable!("publish is not a verb"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
