use proptest::prelude::*;

use commitments::model::AccessClass;
use commitments::oracle::{
    enumerate_outcomes, lockstep, reference_admission, replay, run_grid, MiniCommitment, MiniInstance, Reference,
    SchedulerModel,
};
use commitments::scheduler::Policy;

fn policy() -> impl Strategy<Value = Policy> {
    prop_oneof![Just(Policy::Fcfs), Just(Policy::Priority)]
}

/// Up to six commitments over three targets with non-decreasing arrivals.
fn commitments() -> impl Strategy<Value = Vec<MiniCommitment>> {
    prop::collection::vec((any::<bool>(), 0..3usize, prop::sample::select(vec![0u32, 5, 10]), 0..2u64), 1..=6)
        .prop_map(|raw| {
            let mut arrival = 0;
            raw.into_iter()
                .enumerate()
                .map(|(i, (write, target, priority, gap))| {
                    arrival += gap;
                    MiniCommitment {
                        id: format!("k{}", (i * 7) % 10),
                        access: if write { AccessClass::Writer } else { AccessClass::Reader },
                        target: ["x", "y", "z"][target].to_owned(),
                        priority,
                        arrival,
                    }
                })
                .collect::<Vec<_>>()
        })
        .prop_filter("ids unique", |cs| {
            let mut ids: Vec<_> = cs.iter().map(|c| &c.id).collect();
            ids.sort();
            ids.windows(2).all(|w| w[0] != w[1])
        })
}

#[test]
fn grid_up_to_three() {
    let r = run_grid(3).unwrap();
    assert_eq!(r.cases, (8 + 64 + 512) * 2 * 2);
    assert!(r.all_passed(), "{:?}", r.failures);
    assert!(r.outcomes >= r.cases);
}

#[test]
fn cli_oracle_reports_grid() {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_commitments"))
        .args(["oracle", "2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("cases=288 passed=288 failed=0 "), "{text}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn scheduler_agrees_with_reference_beyond_grid(cs in commitments(), p in policy()) {
        let inst = MiniInstance::fifo(cs, p).unwrap();
        let expected = reference_admission(&inst, p).unwrap();
        prop_assert_eq!(replay(&inst, &mut SchedulerModel::new(p)).unwrap(), expected);
        let walked = lockstep(&inst, SchedulerModel::new(p), Reference::new(p)).unwrap();
        prop_assert!(!walked.diverged);
        prop_assert_eq!(walked.unsafe_states, 0);
        prop_assert_eq!(walked.undrained, 0);
    }

    #[test]
    fn every_interleaving_submits_everything_in_order(cs in commitments(), p in policy()) {
        prop_assume!(cs.len() <= 4);
        let inst = MiniInstance::fifo(cs, p).unwrap();
        for outcome in enumerate_outcomes(&inst, p).unwrap() {
            let submitted: Vec<_> = outcome
                .steps
                .iter()
                .filter_map(|s| match s {
                    commitments::oracle::Step::Submit { id, .. } => Some(id.clone()),
                    _ => None,
                })
                .collect();
            let ids: Vec<_> = inst.commitments.iter().map(|c| c.id.clone()).collect();
            prop_assert_eq!(submitted, ids);
            prop_assert_eq!(outcome.steps.len(), 2 * inst.commitments.len());
        }
    }
}
