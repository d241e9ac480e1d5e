use ifc_core::surface::{parse_cg_expr, parse_cg_type, parse_fg_expr, parse_fg_type};
use ifc_core::Lattice;
use ifc_harness::ni::*;

fn setup() -> (Lattice, NiConfig) {
    let l = Lattice::two_point();
    let cfg = NiConfig::new(l.top(), l.bot());
    (l, cfg)
}

#[test]
fn reading_the_secret_directly_fails_the_precondition() {
    let (l, cfg) = setup();
    let e = parse_fg_expr(&l, "x").unwrap();
    let t = parse_fg_type(&l, "bool@H").unwrap();
    match ni_check_fg(&l, &e, "x", &t, l.bot(), &cfg) {
        Err(NiError::Precondition(err)) => assert_eq!(err.rule, "FG-sub"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn constant_programs_pass() {
    let (l, cfg) = setup();
    let e = parse_fg_expr(&l, "true").unwrap();
    let t = parse_fg_type(&l, "(bool@L * unit@L)@H").unwrap();
    assert!(matches!(ni_check_fg(&l, &e, "x", &t, l.bot(), &cfg), Ok(Verdict::Pass { pairs: 50, .. })));
    let e = parse_cg_expr(&l, "(ret true)").unwrap();
    let t = parse_cg_type(&l, "bool").unwrap();
    assert!(matches!(ni_check_cg(&l, &e, "x", &t, &cfg), Ok(Verdict::Pass { pairs: 50, .. })));
}

#[test]
fn case_on_a_secret_is_type_rejected() {
    let (l, cfg) = setup();
    let e = parse_fg_expr(&l, "(case x (y true) (z false))").unwrap();
    let t = parse_fg_type(&l, "(unit@L + unit@L)@H").unwrap();
    match ni_check_fg(&l, &e, "x", &t, l.bot(), &cfg) {
        Err(NiError::Precondition(err)) => assert_eq!(err.rule, "FG-sub"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn unlabeling_a_secret_taints_the_result() {
    let (l, cfg) = setup();
    let e = parse_cg_expr(&l, "(bind (unlabel x) (y (ret y)))").unwrap();
    let t = parse_cg_type(&l, "bool").unwrap();
    match ni_check_cg(&l, &e, "x", &t, &cfg) {
        Err(NiError::Precondition(err)) => assert_eq!(err.rule, "CG-sub"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn stateful_laundering_attempt_passes() {
    let (l, cfg) = setup();
    // The secret is written into a high cell and read back under toLabeled,
    // so the observer only sees a constant.
    let src = "(bind (new (label H false)) (r \
                 (bind (toLabeled (bind (unlabel x) (s (assign r (label H s))))) (u \
                   (ret true)))))";
    let e = parse_cg_expr(&l, src).unwrap();
    let t = parse_cg_type(&l, "bool").unwrap();
    assert!(matches!(ni_check_cg(&l, &e, "x", &t, &cfg), Ok(Verdict::Pass { .. })));
}

#[test]
fn observer_must_not_see_the_secret() {
    let l = Lattice::two_point();
    let cfg = NiConfig::new(l.bot(), l.top());
    let e = parse_fg_expr(&l, "true").unwrap();
    let t = parse_fg_type(&l, "bool@L").unwrap();
    assert!(matches!(ni_check_fg(&l, &e, "x", &t, l.bot(), &cfg), Err(NiError::Config(..))));
}

#[test]
fn implicit_flow_through_if_is_rejected() {
    // Bypass the precondition by handing the judge a leaky program through
    // the mutation-free API: the typechecker must reject it first.
    let (l, cfg) = setup();
    let e = parse_fg_expr(&l, "(if x true false)").unwrap();
    let t = parse_fg_type(&l, "bool@H").unwrap();
    assert!(matches!(ni_check_fg(&l, &e, "x", &t, l.bot(), &cfg), Err(NiError::Precondition(_))));
}

#[test]
fn generated_subjects_satisfy_noninterference_and_transfer() {
    for l in [Lattice::two_point(), Lattice::powerset(["a", "b"]).unwrap()] {
        let secret = l.elements().find(|s| !l.flows(*s, l.bot())).unwrap();
        let cfg = NiConfig { samples: 10, ..NiConfig::new(secret, l.bot()) };
        for seed in 0..60 {
            let s = gen_fg_subject(&l, &cfg, 25, seed).expect("subject");
            let pairs = fg_secret_pairs(&l, &s.secret, cfg.samples, seed);
            let v = ni_check_fg_with(&l, &s.program, &s.var, &s.secret, s.pc, &cfg, &pairs).unwrap();
            assert!(!v.is_counterexample(), "{v}");
            let cg = fg_ni_to_cg(&l, &s.program, &s.var, &s.secret, s.pc).unwrap();
            let cg_pairs = fg_secrets_to_cg(&l, &pairs).unwrap();
            let payload = ifc_core::fg2cg::fg2cg_unlabeled(&s.secret.body);
            let v = ni_check_cg_with(&l, &cg, &s.var, &payload, &cfg, &cg_pairs).unwrap();
            assert!(!v.is_counterexample(), "{v}");

            let s = gen_cg_subject(&l, &cfg, 25, seed).expect("subject");
            let pairs = cg_secret_pairs(&l, secret, &s.payload, cfg.samples, seed);
            let v = ni_check_cg_with(&l, &s.program, &s.var, &s.payload, &cfg, &pairs).unwrap();
            assert!(!v.is_counterexample(), "{v}");
            let fg = cg_ni_to_fg(&l, &s.program, &s.var, &s.payload, secret).unwrap();
            let fg_pairs = cg_secrets_to_fg(&l, &pairs).unwrap();
            let t = ifc_core::cg2fg::cg2fg_type(&l, &ifc_core::cg::CgType::labeled(secret, s.payload.clone()));
            let v = ni_check_fg_with(&l, &fg, &s.var, &t, l.bot(), &cfg, &fg_pairs).unwrap();
            assert!(!v.is_counterexample(), "{v}");
        }
    }
}
