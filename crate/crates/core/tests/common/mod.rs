#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use commitments::governance::WorldState;
use commitments::ids::{CommitmentId, ServiceId};
use commitments::model::{AccessClass, Commitment, ContentAction, Responsibility};
use commitments::scenario::{self, ActionSpec, Command, SubmitCommand};
use commitments::scheduler::Policy;
use commitments::simulator::Simulator;

pub fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

/// Bundled scenario names, sorted.
pub fn bundled() -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(scenario_dir())
        .expect("scenario dir")
        .filter_map(|e| {
            let name = e.ok()?.file_name().into_string().ok()?;
            name.strip_suffix(".scn").map(str::to_owned)
        })
        .collect();
    names.sort();
    names
}

pub fn golden(name: &str) -> String {
    fs::read_to_string(scenario_dir().join(format!("{name}.trace"))).expect("golden trace")
}

pub fn run_named(name: &str) -> String {
    let path = scenario_dir().join(format!("{name}.scn"));
    let text = fs::read_to_string(&path).expect("scenario file");
    let parsed = scenario::parse_named(&format!("{name}.scn"), &text).expect("scenario parses");
    let mut sim = Simulator::new();
    sim.run_scenario(&parsed).expect("scenario runs");
    sim.into_run().trace.render()
}

/// `(kind, subject, attrs)` for every event line.
pub fn events(trace: &str) -> Vec<(String, String, BTreeMap<String, String>)> {
    trace
        .lines()
        .filter_map(|line| {
            let mut parts = line.split(' ');
            parts.next()?;
            let kind = parts.next()?.to_owned();
            let subject = parts.next().unwrap_or_default().to_owned();
            let attrs = parts
                .filter_map(|kv| kv.split_once('='))
                .map(|(k, v)| (k.to_owned(), v.to_owned()))
                .collect();
            Some((kind, subject, attrs))
        })
        .collect()
}

pub type Counts = [u64; 6];
const PENDING: usize = 0;
const WAITING: usize = 1;
const ACTIVE: usize = 2;
const COMPLETED: usize = 3;
const FAILED: usize = 4;
const VIOLATED: usize = 5;

/// Rebuilds per-service state counts from lifecycle events alone.
pub fn fold(events: &[(String, String, BTreeMap<String, String>)]) -> BTreeMap<String, Counts> {
    let mut owner: BTreeMap<&str, &str> = BTreeMap::new();
    let mut state: BTreeMap<&str, usize> = BTreeMap::new();
    let mut counts: BTreeMap<String, Counts> = BTreeMap::new();
    for (kind, id, attrs) in events {
        let next = match kind.as_str() {
            "Submitted" => {
                owner.insert(id, &attrs["service"]);
                if attrs.get("held").map(String::as_str) == Some("true") {
                    Some(PENDING)
                } else {
                    None
                }
            }
            "Activated" => Some(ACTIVE),
            "Waiting" => Some(WAITING),
            "Completed" => Some(COMPLETED),
            "Failed" => Some(FAILED),
            "Violation" => Some(VIOLATED),
            _ => None,
        };
        let released = kind == "Submitted" && next.is_none();
        if next.is_none() && !released {
            continue;
        }
        let svc = owner[id.as_str()].to_owned();
        let c = counts.entry(svc).or_default();
        if let Some(prev) = state.remove(id.as_str()) {
            c[prev] -= 1;
        }
        if let Some(s) = next {
            c[s] += 1;
            state.insert(id, s);
        }
    }
    counts
}

/// Per-service counts of the last snapshot block, with the index of its
/// summary line.
pub fn last_snapshot(events: &[(String, String, BTreeMap<String, String>)]) -> Option<(usize, BTreeMap<String, Counts>)> {
    let start = events.iter().rposition(|(k, s, _)| k == "Snapshot" && s == "monitor")?;
    let mut out = BTreeMap::new();
    for (kind, svc, attrs) in &events[start + 1..] {
        if kind != "Snapshot" {
            break;
        }
        let get = |k: &str| attrs[k].parse::<u64>().expect("count");
        out.insert(
            svc.clone(),
            [
                get("pending"),
                get("waiting"),
                get("active"),
                get("completed"),
                get("failed"),
                get("violated"),
            ],
        );
    }
    Some((start, out))
}

/// Scope overlap recomputed from scratch: same target, or a sign-off of the
/// service that owns the other's detail.
fn overlap(a: &Commitment, b: &Commitment) -> bool {
    let signs_off_owner = |x: &Commitment, y: &Commitment| match x.content() {
        ContentAction::Signoff { service, .. } => y.target_owner() == Some(service),
        _ => false,
    };
    a.target() == b.target() || signs_off_owner(a, b) || signs_off_owner(b, a)
}

pub fn unsafe_pairs(active: &[Commitment]) -> usize {
    let mut n = 0;
    for (i, a) in active.iter().enumerate() {
        for b in &active[i + 1..] {
            if overlap(a, b) && (a.access() == AccessClass::Writer || b.access() == AccessClass::Writer) {
                n += 1;
            }
        }
    }
    n
}

#[derive(Debug, Default)]
pub struct RandomRun {
    pub steps: usize,
    pub submitted: usize,
    pub unsafe_steps: usize,
    pub waits: usize,
    pub violations: usize,
    pub drained: bool,
}

const DETAILS: [&str; 4] = ["d0", "d1", "d2", "d3"];
const OWNERS: [&str; 2] = ["o0", "o1"];
const AGENTS: [&str; 3] = ["a0", "a1", "a2"];

fn seed_world(sim: &mut Simulator) {
    let mut setup = vec![
        "network net".to_owned(),
        "purpose net analytics".to_owned(),
        "ttl 3".to_owned(),
    ];
    for svc in OWNERS.iter().chain(&AGENTS) {
        setup.push(format!("signup {svc} net accept"));
        for r in Responsibility::ALL {
            setup.push(format!("assign {svc} {}", r.token()));
        }
    }
    for (i, d) in DETAILS.iter().enumerate() {
        let privacy = if i % 2 == 0 { "public" } else { "private" };
        setup.push(format!("detail {d} {} net {privacy} v-{d}", OWNERS[i / 2]));
    }
    let parsed = scenario::parse(&setup.join("\n")).expect("setup parses");
    sim.run_scenario(&parsed).expect("setup runs");
}

fn random_action(rng: &mut ChaCha8Rng, signed_off: &mut BTreeSet<&'static str>) -> (ServiceId, ActionSpec) {
    let detail = (*DETAILS.choose(rng).expect("details")).into();
    let roll = rng.gen_range(0..100);
    let svc: ServiceId = AGENTS[rng.gen_range(0..AGENTS.len())].into();
    match roll {
        0..=39 => (
            svc,
            ActionSpec::Collect {
                detail,
                purpose: if rng.gen_bool(0.9) { "analytics" } else { "spying" }.to_owned(),
            },
        ),
        40..=74 => (
            svc,
            ActionSpec::Post {
                detail,
                veracity: rng.gen_bool(0.9),
                value: Some(format!("v{}", rng.gen_range(0..1000))),
            },
        ),
        75..=84 => (svc, ActionSpec::Tamper { detail, value: None }),
        85..=94 => (
            svc,
            ActionSpec::Reveal {
                detail,
                requester: AGENTS[rng.gen_range(0..AGENTS.len())].into(),
            },
        ),
        _ => {
            let owner = OWNERS[rng.gen_range(0..OWNERS.len())];
            if signed_off.insert(owner) {
                (
                    owner.into(),
                    ActionSpec::Signoff {
                        service: owner.into(),
                        network: Some("net".into()),
                    },
                )
            } else {
                (svc, ActionSpec::Collect { detail, purpose: "analytics".to_owned() })
            }
        }
    }
}

/// One seeded randomized run of up to `max_commitments` submissions over
/// four details, completing every activation before it ends.
pub fn random_run(seed: u64, policy: Policy, max_commitments: usize) -> RandomRun {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sim = Simulator::with_world(WorldState::new()).with_policy_override(policy);
    seed_world(&mut sim);
    let total = rng.gen_range(1..=max_commitments);
    let mut signed_off = BTreeSet::new();
    let mut run = RandomRun::default();
    let check = |sim: &Simulator, run: &mut RandomRun| {
        run.steps += 1;
        if unsafe_pairs(sim.scheduler().active()) > 0 {
            run.unsafe_steps += 1;
        }
    };

    loop {
        let active: Vec<CommitmentId> = sim.scheduler().active().iter().map(|c| c.id().clone()).collect();
        let can_submit = run.submitted < total;
        if !can_submit && active.is_empty() {
            break;
        }
        let roll = rng.gen_range(0..10);
        let command = if can_submit && (roll < 5 || active.is_empty()) {
            run.submitted += 1;
            let (service, action) = random_action(&mut rng, &mut signed_off);
            Command::Submit(SubmitCommand {
                id: format!("c{}", run.submitted).into(),
                service,
                action,
                priority: None,
                guard: None,
                business: None,
            })
        } else if roll == 9 {
            Command::Tick(rng.gen_range(1..=2))
        } else {
            Command::Complete {
                id: active.choose(&mut rng).expect("non-empty").clone(),
                failed: rng.gen_bool(0.1),
            }
        };
        sim.apply(&command).unwrap_or_else(|e| panic!("seed {seed}: {command}: {e}"));
        check(&sim, &mut run);
    }
    run.waits = sim.events().iter().filter(|e| e.kind.name() == "Waiting").count();
    run.violations = sim.events().iter().filter(|e| e.kind.name() == "Violation").count();
    run.drained = sim.scheduler().queue().is_empty() && sim.scheduler().active().is_empty();
    run
}
