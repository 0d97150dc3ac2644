use super::profile::{watch, Profile, Watch};
use super::*;
use crate::machine::{parse_program, reference, SCRATCH};

fn budget(d: u32, b: u64) -> BudgetPolicy {
    BudgetPolicy::new(d, b).unwrap()
}

fn o(s: &str) -> Ordinal {
    s.parse().unwrap()
}

fn r(s: &str) -> Real {
    s.parse().unwrap()
}

#[test]
fn step_examples() {
    let p = reference::p_halt();
    let s = step(&Snapshot::initial(&p, &Real::zero(), None), &p, None).unwrap();
    assert_eq!(s.state, p.halt());
    assert!(s.tracks[OUTPUT].bit(0));
    assert_eq!(s.stage, o("1"));
    assert_eq!(step(&s, &p, None), Err(RunError::StepFromHalt));

    let p = reference::p_flip();
    let s = step(&Snapshot::initial(&p, &Real::zero(), None), &p, None).unwrap();
    assert!(s.tracks[SCRATCH].bit(0));
    assert_eq!(s.stage, o("1"));
}

#[test]
fn left_move_at_edge_stays() {
    let mut text = String::from("tracks: 3\nstart: a\nlimit: a\nhalt: h\n");
    for v in 0..8 {
        let bits = format!("{v:03b}");
        text.push_str(&format!("a {bits} -> a {bits} L\n"));
    }
    let p = parse_program(&text).unwrap();
    let s = step(&Snapshot::initial(&p, &Real::zero(), None), &p, None).unwrap();
    assert_eq!(s.head, 0);
}

#[test]
fn block_examples() {
    let b = budget(3, 64);
    let p = reference::p_flip();
    let blk = run_block(&Snapshot::initial(&p, &Real::zero(), None), &p, &b, None).unwrap();
    assert_eq!(blk.certificate, Certificate::Repeat { mu: 0, pi: 2 });
    let lim = blk.limit.unwrap();
    assert!(lim.tracks[SCRATCH].bit(0));
    assert_eq!((lim.state, lim.head, lim.stage.clone()), (p.limit(), 0, o("w")));

    let p = reference::p_halt();
    let blk = run_block(&Snapshot::initial(&p, &Real::zero(), None), &p, &b, None).unwrap();
    assert_eq!(blk.certificate, Certificate::HaltAt(1));
    assert!(blk.limit.is_none());

    let p = reference::p_sweep();
    let blk = run_block(&Snapshot::initial(&p, &Real::zero(), None), &p, &b, None).unwrap();
    assert!(matches!(blk.certificate, Certificate::Translation { shift: 1, .. }));
    assert_eq!(blk.limit.unwrap().tracks[SCRATCH], Real::ones());
}

#[test]
fn block_needs_a_block_start() {
    let p = reference::p_flip();
    let s = step(&Snapshot::initial(&p, &Real::zero(), None), &p, None).unwrap();
    assert!(matches!(
        run_block(&s, &p, &budget(3, 64), None),
        Err(RunError::Precondition(_))
    ));
}

#[test]
fn level_limit_examples() {
    let b = budget(3, 64);
    let p = reference::p_flip();
    let b0 = run_block(&Snapshot::initial(&p, &Real::zero(), None), &p, &b, None).unwrap();
    let s_w = b0.limit.clone().unwrap();
    let b1 = run_block(&s_w, &p, &b, None).unwrap();
    assert_eq!(b1.limit.as_ref().unwrap().config(), s_w.config());
    let mut b2 = run_block(&b1.limit.clone().unwrap(), &p, &b, None).unwrap();
    b2.start.stage = o("w*2");
    let lim = limit_of_level(&[b1.clone(), b2], 2, &b).unwrap();
    assert_eq!(lim.config(), s_w.config());
    assert_eq!(lim.stage, o("w^2"));

    // a halted block has no limit to take
    let p = reference::p_halt();
    let h = run_block(&Snapshot::initial(&p, &Real::zero(), None), &p, &b, None).unwrap();
    assert!(matches!(limit_of_level(&[h], 2, &b), Err(RunError::Precondition(_))));
}

#[test]
fn synthetic_two_cycle_takes_cofinal_ones() {
    let zero3 = vec![Real::zero(); 3];
    let snap = |tag: bool, stage: &str| Snapshot {
        state: 1,
        head: 0,
        tracks: vec![Real::from_bits(&[tag]), Real::zero(), Real::zero()],
        stage: o(stage),
    };
    let block = |start: Snapshot, next: Snapshot, ever: Vec<Real>| BlockSummary {
        start,
        certificate: Certificate::Repeat { mu: 0, pi: 1 },
        ever_one: ever,
        limit: Some(next),
        halted: None,
    };
    let c = 7;
    let mut odd = zero3.clone();
    odd[SCRATCH] = Real::characteristic([c]);
    let a = snap(false, "w");
    let bb = snap(true, "w*2");
    let mut ever_a = zero3.clone();
    ever_a[0] = Real::zero();
    let mut ever_b = odd.clone();
    ever_b[0] = Real::from_bits(&[true]);
    let blocks = [
        block(a.clone(), bb.clone(), ever_a),
        block(bb.clone(), snap(false, "w*3"), ever_b.clone()),
        block(snap(false, "w*3"), snap(true, "w*4"), zero3.clone()),
    ];
    let lim = limit_of_level(&blocks, 2, &budget(3, 64)).unwrap();
    assert!(lim.tracks[SCRATCH].bit(c));
    assert!(!lim.tracks[SCRATCH].bit(c + 1));
    assert!(lim.tracks[0].bit(0));
}

#[test]
fn transfinite_examples() {
    let b = budget(3, 64);
    let run = run_transfinite(&reference::p_halt(), &Real::zero(), &b, None).unwrap();
    assert_eq!(run.halted(), Some((&o("1"), &r("1(0)*"))));

    let run = run_transfinite(&reference::p_flip_lh(), &Real::zero(), &b, None).unwrap();
    assert_eq!(run.halted().unwrap().0, &o("w+1"));

    let run = run_transfinite(&reference::p_flip(), &Real::zero(), &b, None).unwrap();
    match &run.outcome {
        Outcome::Loops(c) => {
            assert_eq!((c.level, c.first.clone(), c.recur.clone()), (1, o("w"), o("w*2")));
        }
        other => panic!("expected a loop, got {other}"),
    }
}

#[test]
fn depth_one_cannot_see_a_loop() {
    let run = run_transfinite(&reference::p_flip(), &Real::zero(), &budget(1, 64), None).unwrap();
    assert_eq!(
        run.outcome,
        Outcome::Exceeded {
            reason: ExceedReason::OrdinalCap
        }
    );
}

#[test]
fn clockable_examples() {
    let b = budget(3, 64);
    assert_eq!(clockable_time(&reference::p_halt(), &b).unwrap(), Clockable::Halts(o("1")));
    assert_eq!(clockable_time(&reference::p_flip_lh(), &b).unwrap(), Clockable::Halts(o("w+1")));
    assert_eq!(clockable_time(&reference::p_flip(), &b).unwrap(), Clockable::Diverges);
}

#[test]
fn certificates_reverify_from_their_snapshot() {
    let b = budget(3, 64);
    for p in [reference::p_flip(), reference::p_sweep(), reference::p_halt()] {
        let run = run_transfinite(&p, &Real::zero(), &b, None).unwrap();
        for blk in run.blocks() {
            let mu = match blk.certificate {
                Certificate::Repeat { mu, .. } | Certificate::Translation { mu, .. } => mu,
                _ => 0,
            };
            let at_mu = simulate(&p, None, &blk.start.config(), mu).unwrap();
            assert!(verify_certificate(&p, None, &at_mu, &blk.certificate), "{}", blk.certificate);
        }
    }
}

#[test]
fn sweep_stabilization() {
    let run = run_transfinite(&reference::p_sweep(), &Real::zero(), &budget(3, 64), None).unwrap();
    let w = Watch::Cell { track: SCRATCH, cell: 5 };
    assert_eq!(
        watch(&run, w),
        Ok(Profile::Settles {
            at: o("6"),
            value: Real::from_bits(&[true])
        })
    );
    let flip = run_transfinite(&reference::p_flip(), &Real::zero(), &budget(3, 64), None).unwrap();
    assert_eq!(watch(&flip, Watch::Cell { track: SCRATCH, cell: 0 }), Ok(Profile::Oscillates));
    assert_eq!(
        watch(&flip, Watch::Cell { track: SCRATCH, cell: 1 }),
        Ok(Profile::Constant(Real::zero()))
    );
}

#[test]
fn traces_are_deterministic_json_lines() {
    let b = budget(3, 64);
    let a = run_transfinite(&reference::p_flip_lh(), &Real::zero(), &b, None).unwrap();
    let c = run_transfinite(&reference::p_flip_lh(), &Real::zero(), &b, None).unwrap();
    let t = a.trace_jsonl(true);
    assert_eq!(t, c.trace_jsonl(true));
    for line in t.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["schema"], 1);
    }
}
