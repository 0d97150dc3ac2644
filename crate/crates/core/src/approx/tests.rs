use std::collections::BTreeSet;

use proptest::prelude::*;

use super::*;
use crate::machine::{parse_program, reference, Program, ProgramId, OUTPUT, SCRATCH};
use crate::oracle::{enumerate_programs, jump_lightface, ProgramSource};
use crate::ordinal::{encode_order, Ordinal};
use crate::real::Real;
use crate::runner::{simulate, BudgetPolicy, Config};

fn budget() -> BudgetPolicy {
    BudgetPolicy::new(3, 64).unwrap()
}

fn o(s: &str) -> Ordinal {
    s.parse().unwrap()
}

fn r(s: &str) -> Real {
    s.parse().unwrap()
}

fn listed(ps: Vec<Program>) -> ProgramSource {
    ProgramSource::Listed(ps)
}

/// Toggles output cell 0 forever; the limit state then keeps it at 1.
fn limit_keeper() -> Program {
    let mut t = String::from("tracks: 3\nstart: s\nlimit: l\nhalt: h\n");
    for v in 0..8u8 {
        let bits = format!("{v:03b}");
        let flipped = format!("{}{}", &bits[..2], if &bits[2..] == "1" { "0" } else { "1" });
        t.push_str(&format!("s {bits} -> s {flipped} S\n"));
        t.push_str(&format!("l {bits} -> l {bits} S\n"));
    }
    parse_program(&t).unwrap()
}

/// Like [`reference::p_flip`], with the output track mirroring scratch.
fn mirrored_flip() -> Program {
    let mut t = String::from("tracks: 3\nstart: s\nlimit: s\nhalt: h\n");
    for v in 0..8u8 {
        let bits = format!("{v:03b}");
        let next = if &bits[1..2] == "1" { "0" } else { "1" };
        t.push_str(&format!("s {bits} -> s {}{next}{next} S\n", &bits[..1]));
    }
    parse_program(&t).unwrap()
}

#[test]
fn universal_run_examples() {
    let log = universal_run(&listed(vec![reference::p_halt()]), &budget());
    let one = r("1(0)*");
    assert_eq!(log.first_stage_of(&one), Some(&o("1")));
    assert!(log.records.iter().any(|x| x.track == OUTPUT && x.real == one));

    let log = universal_run(&listed(vec![]), &budget());
    assert!(log.records.is_empty() && log.first_appearance.is_empty());

    let ps = listed(vec![reference::p_halt(), reference::p_flip()]);
    let log = universal_run(&ps, &budget());
    let flip = log
        .records
        .iter()
        .find(|x| x.program == ProgramId(1) && x.track == SCRATCH && x.real == one)
        .unwrap();
    assert_eq!(flip.stage, o("1"));
    assert_eq!(log, universal_run(&ps, &budget()));
    assert!(log.records.windows(2).all(|w| w[0].stage <= w[1].stage));
}

#[test]
fn diagonal_examples() {
    assert_eq!(diagonal(&[]), Real::zero());
    assert_eq!(diagonal(&[r("0(0)*"), r("1(0)*")]), r("11(0)*"));
    let log = AppearanceLog::default();
    assert_eq!(diagonalize_appearances(&log, &o("w")).unwrap(), Real::zero());
}

#[test]
fn diagonalization_refuses_incomplete_logs() {
    let ps = listed(vec![reference::p_sweep()]);
    let log = universal_run(&ps, &budget());
    let from = log.incomplete_from.clone().expect("translation blocks are open");
    assert!(matches!(
        diagonalize_appearances(&log, &from.successor()),
        Err(ApproxError::Truncated { .. })
    ));
    let d = diagonalize_appearances(&log, &from).unwrap();
    assert!(log.distinct_below(&from).unwrap().iter().all(|x| x != &d));
}

#[test]
fn stabilization_examples() {
    let b = budget();
    assert_eq!(
        stabilization_stage(&reference::p_halt(), OUTPUT, 0, &b).unwrap(),
        Stabilization::Stage(o("1"))
    );
    assert_eq!(
        stabilization_stage(&reference::p_flip(), SCRATCH, 0, &b).unwrap(),
        Stabilization::Unstable
    );
    assert_eq!(
        stabilization_stage(&reference::p_sweep(), SCRATCH, 5, &b).unwrap(),
        Stabilization::Stage(o("6"))
    );
}

#[test]
fn stabilization_holds_four_times_past() {
    let p = reference::p_sweep();
    for cell in 0..10 {
        let Stabilization::Stage(s) = stabilization_stage(&p, SCRATCH, cell, &budget()).unwrap() else {
            panic!("sweep cells settle")
        };
        let n = s.as_finite().unwrap();
        let start = Config::initial(&p, &Real::zero(), None);
        let at = simulate(&p, None, &start, n).unwrap().tracks[SCRATCH].bit(cell);
        for k in n..=4 * n {
            assert_eq!(simulate(&p, None, &start, k).unwrap().tracks[SCRATCH].bit(cell), at);
        }
    }
}

#[test]
fn eventual_write_examples() {
    let b = budget();
    let w = eventually_written(&reference::p_halt(), &b).unwrap();
    assert_eq!(w.written(), Some((&r("1(0)*"), &o("1"))));
    let w = eventually_written(&limit_keeper(), &b).unwrap();
    assert_eq!(w.written(), Some((&r("1(0)*"), &o("w"))));
    assert_eq!(eventually_written(&mirrored_flip(), &b).unwrap(), EventualWrite::Unstable);
}

#[test]
fn approximate_jump_examples() {
    let b = budget();
    let s = approximate_jump(&listed(vec![reference::p_halt(), reference::p_flip()]), None, &b);
    assert_eq!(s.events, vec![(o("1"), ProgramId(0))]);
    assert!(s.snapshot(&o("0")).is_empty());
    assert_eq!(s.snapshot(&o("2")), BTreeSet::from([ProgramId(0)]));
    assert!(s.is_monotone());

    assert!(approximate_jump(&listed(vec![]), None, &b).events.is_empty());

    let more = approximate_jump(
        &listed(vec![reference::p_halt(), reference::p_flip(), reference::p_sweep()]),
        None,
        &b,
    );
    assert_eq!(more.events, s.events);
}

#[test]
fn approximate_jump_matches_lightface() {
    let b = budget();
    let ps = ProgramSource::Enumerated(enumerate_programs(1, 3).unwrap());
    let s = approximate_jump(&ps, None, &b);
    let j = jump_lightface(&ps, None, &b);
    assert!(s.is_monotone());
    assert_eq!(s.final_h, j.halted.iter().map(|(p, _)| *p).collect::<Vec<_>>());
}

#[test]
fn matrix_examples() {
    let b = budget();
    let ps = listed(vec![reference::p_halt(), reference::p_flip()]);

    let m = iterated_matrix(&encode_order(&o("1"), 64), &ps, &b).unwrap();
    assert_eq!(m.rows.len(), 1);
    assert!(m.rows[0].value.is_zero());
    assert!(m.log.is_empty());

    let m = iterated_matrix(&encode_order(&o("2"), 64), &ps, &b).unwrap();
    assert_eq!(m.row(&o("1")).unwrap().value, Real::characteristic([0]));
    assert!(m.check(&ps).ok());

    let m = iterated_matrix(&encode_order(&o("3"), 64), &ps, &b).unwrap();
    let first_change = m
        .log
        .iter()
        .find_map(|e| match e {
            MatrixEvent::RowChange { stage, row, .. } if row == &o("1") => Some(stage.clone()),
            _ => None,
        })
        .unwrap();
    assert!(m.log.contains(&MatrixEvent::Erasure {
        stage: first_change,
        row: o("2"),
        cause: ErasureCause::LowerRowChange,
    }));
    assert!(m.check(&ps).ok());
}

#[test]
fn matrix_with_limit_row() {
    let b = budget();
    let ps = ProgramSource::Enumerated(enumerate_programs(0, 3).unwrap());
    let m = iterated_matrix(&encode_order(&o("w+2"), 64), &ps, &b).unwrap();
    assert!(!m.partial);
    assert!(m.rows.iter().any(|r| r.kind == RowKind::Limit));
    let c = m.check(&ps);
    assert!(c.ok(), "{c:?}");
}

#[test]
fn matrix_rejects_large_orders() {
    let b = BudgetPolicy::new(1, 64).unwrap();
    let ps = listed(vec![reference::p_halt()]);
    assert!(iterated_matrix(&encode_order(&o("w"), 64), &ps, &b).is_err());
}

#[test]
fn erasure_checker_rejects_unjustified_entries() {
    let log = vec![
        MatrixEvent::Erasure {
            stage: o("3"),
            row: o("2"),
            cause: ErasureCause::LowerRowChange,
        },
        MatrixEvent::Erasure {
            stage: o("w"),
            row: o("2"),
            cause: ErasureCause::LimitOfErasures,
        },
        MatrixEvent::RowChange {
            stage: o("5"),
            row: o("1"),
            added: vec![ProgramId(0)],
        },
        MatrixEvent::Erasure {
            stage: o("5"),
            row: o("2"),
            cause: ErasureCause::LowerRowChange,
        },
        MatrixEvent::Erasure {
            stage: o("5"),
            row: o("1"),
            cause: ErasureCause::LowerRowChange,
        },
    ];
    assert_eq!(check_erasures(&log), vec![0, 1, 4]);
}

proptest! {
    #[test]
    fn diagonal_avoids_its_inputs(raw in proptest::collection::vec(("[01]{0,6}", "[01]{1,3}"), 0..8)) {
        let reals: Vec<Real> = raw.iter().map(|(p, t)| r(&format!("{p}({t})*"))).collect();
        let mut distinct = Vec::new();
        for x in reals {
            if !distinct.contains(&x) {
                distinct.push(x);
            }
        }
        let d = diagonal(&distinct);
        prop_assert!(!distinct.contains(&d));
    }
}
