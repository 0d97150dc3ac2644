use super::*;
use crate::machine::{parse_program, reference, Program};
use crate::oracle::enumerate_programs;

fn budget() -> BudgetPolicy {
    BudgetPolicy::new(3, 64).unwrap()
}

fn o(s: &str) -> Ordinal {
    s.parse().unwrap()
}

fn r(s: &str) -> Real {
    s.parse().unwrap()
}

/// Walks right for two steps, then halts with all-zero output at time 3.
fn slow_zero() -> Program {
    let mut t = String::from("tracks: 4\nstart: s\nlimit: l\nhalt: h\nquery: q\nyes: y\nno: n\nstates: a b\n");
    for v in 0..16u8 {
        let rd = format!("{v:04b}");
        t.push_str(&format!("s {rd} -> a {rd} R\n"));
        t.push_str(&format!("a {rd} -> b {rd} R\n"));
        t.push_str(&format!("b {rd} -> h {}0{} S\n", &rd[..2], &rd[3..]));
        for st in ["y", "n", "l"] {
            t.push_str(&format!("{st} {rd} -> h {rd} S\n"));
        }
    }
    parse_program(&t).unwrap()
}

fn scripted(ps: Vec<Program>, reqs: &[(ReqKind, usize)]) -> FmInput {
    FmInput::scripted(
        ProgramSource::Listed(ps),
        reqs.iter().map(|&(k, p)| (k, ProgramId(p))).collect(),
    )
}

fn count(events: &[FmEvent], f: impl Fn(&FmEvent) -> bool) -> usize {
    events.iter().filter(|e| f(e)).count()
}

#[test]
fn fresh_witness_examples() {
    assert_eq!(witness_avoiding([]), Real::zero());
    let w = witness_avoiding([[r("0(0)*")].as_slice()]);
    assert!(w.bit(0));
    let st = FmState::new(scripted(vec![], &[]), &budget());
    assert!(st.segment().unwrap().is_empty());

    let sets = [vec![r("0(0)*"), r("1(0)*")], vec![r("1(0)*"), r("01(0)*")]];
    let w = witness_avoiding(sets.iter().map(|s| s.as_slice()));
    assert!(sets.iter().flatten().all(|x| x != &w));
}

#[test]
fn attention_examples() {
    let ps = vec![reference::zero_halter(), reference::p_flip(), reference::one_halter(), reference::query_looper()];
    let reqs: Vec<(ReqKind, usize)> = (0..4).map(|i| (ReqKind::R, i)).collect();
    let mut st = FmState::new(scripted(ps, &reqs), &budget());
    for i in 0..4 {
        st.assign(i, WitnessReason::Initial).unwrap();
    }
    let c = st.check_attention(0).unwrap();
    assert_eq!(c.time, o("1"));
    assert!(c.log.is_empty());
    assert!(st.check_attention(1).is_none());
    assert!(st.check_attention(2).is_none());
    assert!(st.check_attention(3).is_none());
}

#[test]
fn empty_enumeration() {
    let out = fm_construct(FmInput::interleaved(ProgramSource::Listed(vec![])), &budget());
    assert!(out.state.a.is_empty() && out.state.b.is_empty());
    assert!(out.state.events.is_empty());
    assert!(out.report.unwrap().requirements.is_empty());
}

#[test]
fn zero_halter_serves_both_sides_in_priority_order() {
    let out = fm_construct(
        FmInput::interleaved(ProgramSource::Listed(vec![reference::zero_halter()])),
        &budget(),
    );
    let attn: Vec<(Ordinal, usize)> = out
        .state
        .events
        .iter()
        .filter_map(|e| match e {
            FmEvent::Attention { stage, req, .. } => Some((stage.clone(), *req)),
            _ => None,
        })
        .collect();
    assert_eq!(attn, vec![(o("1"), 0), (o("2"), 1)]);
    let rep = out.report.unwrap();
    assert!(rep.requirements.iter().all(|r| r.classification == Classification::SatisfiedByWitness));
    assert!(rep.all_rechecks_passed());
    assert_eq!((rep.a_size, rep.b_size), (1, 1));
    assert!(out.state.check().ok());
}

#[test]
fn loopers_only() {
    let ps = vec![reference::query_looper(), reference::query_looper()];
    let out = fm_construct(FmInput::interleaved(ProgramSource::Listed(ps)), &budget());
    let ev = &out.state.events;
    assert!(ev.iter().all(|e| matches!(e, FmEvent::Witness { .. })));
    let rep = out.report.unwrap();
    assert!(rep
        .requirements
        .iter()
        .all(|r| r.classification == Classification::SatisfiedByDivergenceAtBudget && r.recheck_passed));
    assert!(out.state.check().ok());
}

#[test]
fn first_attention_reassigns_everything_below() {
    let ps = vec![reference::zero_halter(), reference::query_looper()];
    let out = fm_construct(scripted(ps, &[(ReqKind::R, 0), (ReqKind::S, 1), (ReqKind::R, 1)]), &budget());
    let st = &out.state;
    assert_eq!(st.members(Side::A).count(), 1);
    assert_eq!(st.restraints.iter().flatten().count(), 1);
    let at1 = |f: &dyn Fn(&FmEvent) -> bool| count(&st.events, |e| e.stage() == &o("1") && f(e));
    assert_eq!(
        at1(&|e| matches!(e, FmEvent::Witness { reason: WitnessReason::Reassigned, .. })),
        2
    );
    assert!(st.check().ok());
}

#[test]
fn lowest_priority_attention_reassigns_nothing() {
    let ps = vec![reference::query_looper(), reference::zero_halter()];
    let out = fm_construct(scripted(ps, &[(ReqKind::R, 0), (ReqKind::S, 1)]), &budget());
    let st = &out.state;
    assert_eq!(st.members(Side::B).count(), 1);
    assert_eq!(count(&st.events, |e| matches!(e, FmEvent::Witness { .. })), 2);
    assert!(st.check().ok());
}

#[test]
fn injury_then_second_attention() {
    let ps = vec![slow_zero(), reference::zero_halter()];
    let out = fm_construct(scripted(ps, &[(ReqKind::R, 0), (ReqKind::S, 1)]), &budget());
    let st = &out.state;
    let s = &st.requirements[1];
    assert_eq!(s.attentions, 2);
    assert_eq!(s.injuries, vec![Injury { stage: o("4"), by: 0 }]);
    let pos = |f: &dyn Fn(&FmEvent) -> bool| st.events.iter().position(f).unwrap();
    let injury = pos(&|e| matches!(e, FmEvent::Injury { req: 1, .. }));
    let second = st
        .events
        .iter()
        .rposition(|e| matches!(e, FmEvent::Attention { req: 1, .. }))
        .unwrap();
    assert!(injury < second);
    assert_eq!(st.events[second].stage(), &o("5"));
    assert_eq!(count(&st.events, |e| matches!(e, FmEvent::Restraint { req: 1, .. })), 2);
    assert_eq!(st.restraints[1].as_ref().unwrap().stage, o("5"));
    assert!(st.check().ok());
    assert!(out.report.unwrap().all_rechecks_passed());
}

#[test]
fn asking_requirements_keep_restraints() {
    let ps = vec![
        reference::zero_halter(),
        reference::input_asker(),
        reference::one_halter(),
        reference::query_looper(),
    ];
    let out = fm_construct(FmInput::interleaved(ProgramSource::Listed(ps)), &budget());
    assert!(out.state.partial.is_none(), "{:?}", out.state.partial);
    assert!(out.state.check().ok(), "{:?}", out.state.check());
    let rep = out.report.unwrap();
    assert!(rep.all_rechecks_passed(), "{rep:?}");
}

#[test]
fn log_checker_catches_violations() {
    let w = r("1(0)*");
    let log = vec![
        FmEvent::Restraint {
            stage: o("1"),
            req: 0,
            guards: Side::B,
            preserved: vec![w.clone()],
        },
        FmEvent::Addition {
            stage: o("2"),
            req: 1,
            side: Side::B,
            row: ProgramId(1),
            real: w.clone(),
        },
        FmEvent::Injury {
            stage: o("2"),
            req: 0,
            by: 1,
        },
        FmEvent::Witness {
            stage: o("3"),
            req: 2,
            witness: w,
            reason: WitnessReason::Initial,
        },
    ];
    let v = check_log(&log, &AppearanceLog::default());
    assert_eq!(v.restraint, vec![1]);
    assert_eq!(v.additions, vec![1]);
    assert_eq!(v.injury_bound, vec![0]);
    assert!(v.hygiene.is_empty());
}

#[test]
fn construction_is_deterministic() {
    let ps = ProgramSource::Enumerated(enumerate_programs(0, 4).unwrap().take(24));
    let a = fm_construct(FmInput::interleaved(ps.clone()), &budget());
    let b = fm_construct(FmInput::interleaved(ps), &budget());
    assert_eq!(a.state.events, b.state.events);
    assert_eq!(a.report, b.report);
    if a.state.partial.is_none() {
        assert!(a.state.check().ok(), "{:?}", a.state.check());
    }
}
