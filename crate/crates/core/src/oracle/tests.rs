use super::*;
use crate::machine::{parse_program, reference, Program, ProgramId, ORACLE, OUTPUT};
use crate::ordinal::Ordinal;
use crate::real::Real;
use crate::runner::{clockable_time, BudgetPolicy, Clockable, Snapshot};

fn budget() -> BudgetPolicy {
    BudgetPolicy::new(3, 64).unwrap()
}

fn all_reads(tracks: usize) -> impl Iterator<Item = String> {
    (0..1u32 << tracks).map(move |v| format!("{v:0width$b}", width = tracks))
}

/// Writes 1, 0, 1 on the oracle track, asks, then halts with output 1 on
/// `yes` and 0 on `no`, at cell 2 where the head ends up.
fn writer_asker() -> Program {
    let mut t = String::from("tracks: 4\nstart: s\nlimit: l\nhalt: h\nquery: q\nyes: y\nno: n\nstates: a b\n");
    for r in all_reads(4) {
        let keep = &r[..3];
        let io = &r[..2];
        let rest = &r[2..];
        t.push_str(&format!("s {r} -> a {keep}1 R\n"));
        t.push_str(&format!("a {r} -> b {keep}0 R\n"));
        t.push_str(&format!("b {r} -> q {keep}1 S\n"));
        t.push_str(&format!("y {r} -> h {io}1{} S\n", &rest[1..]));
        t.push_str(&format!("n {r} -> h {io}0{} S\n", &rest[1..]));
        t.push_str(&format!("l {r} -> h {r} S\n"));
    }
    parse_program(&t).unwrap()
}

/// Copies oracle bit 0 to output bit 0 and halts.
fn oracle_copier() -> Program {
    let mut t = String::from("tracks: 4\nstart: s\nlimit: s\nhalt: h\n");
    for r in all_reads(4) {
        let o = &r[3..];
        t.push_str(&format!("s {r} -> h {}{o}{o} S\n", &r[..2]));
    }
    parse_program(&t).unwrap()
}

#[test]
fn set_oracle_answers_membership() {
    let p = writer_asker();
    let member: Real = "101(0)*".parse().unwrap();
    let yes = OracleSpec::Set(SetOracle::new([member.clone()], 64));
    let (r, log) = run_with_oracle(&p, &Real::zero(), &yes, &budget()).unwrap();
    assert_eq!(r.halted().unwrap().1, &"001(0)*".parse::<Real>().unwrap());
    assert_eq!(log.entries.len(), 1);
    assert_eq!((log.entries[0].real.clone(), log.entries[0].answer), (member, true));
    assert_eq!(log.entries[0].stage, Ordinal::finite(3));
    assert!(log.replays_against(&yes));

    let none = OracleSpec::empty_set(64);
    let (r, log) = run_with_oracle(&p, &Real::zero(), &none, &budget()).unwrap();
    assert_eq!(r.halted().unwrap().1, &Real::zero());
    assert!(!log.entries[0].answer);
    assert!(!log.replays_against(&yes));
}

#[test]
fn real_oracle_is_read_only_and_visible() {
    let p = oracle_copier();
    let o = OracleSpec::Real("1(0)*".parse().unwrap());
    let (r, log) = run_with_oracle(&p, &Real::zero(), &o, &budget()).unwrap();
    assert_eq!(r.halted().unwrap().1, &"1(0)*".parse::<Real>().unwrap());
    assert!(log.is_empty());
    for rec in r.trace(true) {
        for s in [rec.start, rec.end].into_iter().flatten() {
            assert_eq!(s.tracks[ORACLE], "1(0)*".parse().unwrap());
        }
    }
    // the copier writes the oracle bit back; the track must not change
    let s0 = Snapshot::initial(&p, &Real::zero(), Some(&o));
    let s1 = crate::runner::step(&s0, &p, Some(&o)).unwrap();
    assert_eq!(s1.tracks[ORACLE], s0.tracks[ORACLE]);
    assert!(s1.tracks[OUTPUT].bit(0));
}

#[test]
fn protocol_mismatch_is_rejected() {
    let set = OracleSpec::empty_set(8);
    assert!(matches!(
        run_with_oracle(&reference::p_halt(), &Real::zero(), &set, &budget()),
        Err(crate::runner::RunError::ProtocolMismatch)
    ));
    let real = OracleSpec::Real(Real::zero());
    assert!(matches!(
        run_with_oracle(&writer_asker(), &Real::zero(), &real, &budget()),
        Err(crate::runner::RunError::ProtocolMismatch)
    ));
}

#[test]
fn trimming_cuts_long_queries() {
    let s = SetOracle::new([Real::from_bits(&[true, false, true])], 3);
    assert!(s.answer(&"101(0)*".parse().unwrap()));
    assert!(s.answer(&"1011(0)*".parse().unwrap()));
    assert!(!s.answer(&"111(0)*".parse().unwrap()));
    // short periodic reals are kept whole
    assert_eq!(s.canonical_query(&"(10)*".parse().unwrap()), "(10)*".parse().unwrap());
}

#[test]
fn lightface_examples() {
    let src = ProgramSource::Listed(vec![reference::p_halt(), reference::p_flip()]);
    let j = jump_lightface(&src, None, &budget());
    assert_eq!(j.halted, vec![(ProgramId(0), Ordinal::finite(1))]);
    assert_eq!(j.looping, vec![ProgramId(1)]);
    assert!(j.exceeded.is_empty());

    let empty = jump_lightface(&ProgramSource::Listed(vec![]), None, &budget());
    assert!(empty.halted.is_empty() && empty.exceeded.is_empty() && empty.bound == 0);
}

#[test]
fn empty_set_oracle_matches_no_oracle_on_askless_programs() {
    use crate::machine::family::{build, Action, FamilyKind};
    let e = enumerate_programs(0, 4).unwrap();
    let askless: Vec<Program> = (0..e.len())
        .step_by(37)
        .map(|i| e.genome(i))
        .filter(|(_, g)| !g.contains(&Action::Ask))
        .map(|(w, g)| build(FamilyKind::Query, w, &g))
        .collect();
    let src = ProgramSource::Listed(askless);
    let a = jump_lightface(&src, Some(&OracleSpec::empty_set(64)), &budget());
    let b = jump_lightface(&src, None, &budget());
    assert!(!a.halted.is_empty());
    assert_eq!(a.halted, b.halted);
    assert_eq!(a.looping, b.looping);
}

#[test]
fn lightface_agrees_with_clockable_times() {
    let e = enumerate_programs(0, 3).unwrap().take(600);
    let j = jump_lightface(&ProgramSource::Enumerated(e.clone()), None, &budget());
    for (id, p) in e.iter() {
        match clockable_time(&p, &budget()).unwrap() {
            Clockable::Halts(t) => assert!(j.halted.contains(&(id, t))),
            Clockable::Diverges => assert!(j.looping.contains(&id)),
            Clockable::Unknown(_) => assert!(j.exceeded.contains(&id)),
        }
    }
}

#[test]
fn joined_real_interleaves_oracle_and_jump() {
    let src = ProgramSource::Listed(vec![reference::p_halt(), reference::p_flip()]);
    let a: Real = "(1)*".parse().unwrap();
    let j = jump_lightface(&src, Some(&OracleSpec::Real(a)), &budget());
    let joined = j.joined().unwrap();
    assert_eq!(joined.bits(6), vec![true, true, true, false, true, false]);
}

#[test]
fn boldface_examples() {
    let halt = ProgramSource::Listed(vec![reference::p_halt()]);
    let b = jump_boldface(&halt, &[Real::zero()], None, &budget());
    assert_eq!(b.triples(), vec![(ProgramId(0), Real::zero(), Ordinal::finite(1))]);
    assert!(b.code().bit(0));

    let flip = ProgramSource::Listed(vec![reference::p_flip()]);
    let inputs: Vec<Real> = ["(0)*", "(1)*", "10(01)*"].iter().map(|s| s.parse().unwrap()).collect();
    assert!(jump_boldface(&flip, &inputs, None, &budget()).halted.is_empty());
    assert!(jump_boldface(&halt, &[], None, &budget()).halted.is_empty());
}
