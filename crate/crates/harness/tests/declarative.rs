use ifc_core::cg::{cg_subtype, CgCtx, CgExpr, CgType};
use ifc_core::fg::{fg_subtype, FgCtx, FgExpr, FgType};
use ifc_core::surface::{parse_cg_expr, parse_fg_expr};
use ifc_core::Lattice;
use ifc_harness::declarative::cg::{cg_agreement, CgOracle};
use ifc_harness::declarative::fg::{fg_agreement, FgOracle};
use ifc_harness::declarative::{mask_leq, Agreement};
use ifc_harness::gen::{CgGen, FgGen};
use proptest::prelude::*;

fn fg(lat: &Lattice, text: &str) -> FgExpr {
    parse_fg_expr(lat, text).unwrap()
}

fn cg(lat: &Lattice, text: &str) -> CgExpr {
    parse_cg_expr(lat, text).unwrap()
}

#[test]
fn fg_examples_agree() {
    let lat = Lattice::two_point();
    let (l, h) = (lat.bot(), lat.top());
    for (pc, text) in [
        (l, "(lam (x bool@H) [L] x)"),
        (l, "(if true false true)"),
        (h, "(new true bool@H)"),
        (l, "(app (lam (x bool@H) [L] x) true)"),
        (l, "(case (inl () (unit@L + bool@L)) (a true) (b b))"),
        (l, "(fst (pair true ()))"),
    ] {
        assert_eq!(fg_agreement(&lat, &FgCtx::new(), pc, &fg(&lat, text)), Agreement::Principal, "{text}");
    }
    for (pc, text) in [(h, "(new true bool@L)"), (l, "(app true ())"), (l, "(if () true false)")] {
        assert_eq!(fg_agreement(&lat, &FgCtx::new(), pc, &fg(&lat, text)), Agreement::BothReject, "{text}");
    }
}

#[test]
fn fg_open_terms_agree() {
    let lat = Lattice::two_point();
    let h = lat.top();
    let ctx: FgCtx =
        [("x".to_string(), FgType::bool(h)), ("r".to_string(), FgType::reference(FgType::bool(lat.bot()), lat.bot()))]
            .into_iter()
            .collect();
    for text in ["(if x true false)", "(assign r x)", "(if x (assign r true) ())", "(deref r)", "(and x (not x))"] {
        let a = fg_agreement(&lat, &ctx, lat.bot(), &fg(&lat, text));
        assert!(matches!(a, Agreement::Principal | Agreement::BothReject), "{text}: {a:?}");
    }
    assert_eq!(fg_agreement(&lat, &ctx, lat.bot(), &fg(&lat, "(assign r x)")), Agreement::BothReject);
}

#[test]
fn cg_examples_agree() {
    let lat = Lattice::two_point();
    for text in [
        "(ret true)",
        "(label H true)",
        "(unlabel (label H true))",
        "(bind (unlabel (label H true)) (x (ret x)))",
        "(toLabeled (unlabel (label H true)))",
        "(bind (new (label L true) (Labeled L bool)) (r (deref r)))",
        "(bind (new (label H true)) (r (assign r (label H false))))",
    ] {
        assert_eq!(cg_agreement(&lat, &CgCtx::new(), &cg(&lat, text)), Agreement::Principal, "{text}");
    }
    for text in [
        "(bind (unlabel (label H true)) (x (new (label L x) (Labeled L bool))))",
        "(bind (new (label L true) (Labeled L bool)) (r (assign r (label H false))))",
        "(unlabel true)",
    ] {
        assert_eq!(cg_agreement(&lat, &CgCtx::new(), &cg(&lat, text)), Agreement::BothReject, "{text}");
    }
}

/// Without an annotation the cell label of `new` can be raised at the cost
/// of the pc, and references are invariant, so no least type exists.
#[test]
fn unannotated_new_has_only_a_minimal_type() {
    let lat = Lattice::two_point();
    let e = cg(&lat, "(bind (new (label L true)) (r (deref r)))");
    let a = cg_agreement(&lat, &CgCtx::new(), &e);
    assert!(matches!(a, Agreement::Minimal(_)), "{a:?}");
}

/// The algorithmic rule takes the cell label from the initializer, so a term
/// that needs a higher cell is rejected; the annotation recovers it.
#[test]
fn unannotated_new_is_incomplete() {
    let lat = Lattice::two_point();
    let plain = cg(&lat, "(bind (unlabel (label H true)) (x (new (label L x))))");
    assert!(cg_agreement(&lat, &CgCtx::new(), &plain).is_failure());
    let annotated = cg(&lat, "(bind (unlabel (label H true)) (x (new (label L x) (Labeled H bool))))");
    assert_eq!(cg_agreement(&lat, &CgCtx::new(), &annotated), Agreement::Principal);

    let ctx: FgCtx = [("x".to_string(), FgType::bool(lat.top()))].into_iter().collect();
    let plain = fg(&lat, "(assign (new false) x)");
    assert!(fg_agreement(&lat, &ctx, lat.bot(), &plain).is_failure());
    let annotated = fg(&lat, "(assign (new false bool@H) x)");
    assert_eq!(fg_agreement(&lat, &ctx, lat.bot(), &annotated), Agreement::Principal);
}

#[test]
fn generated_fg_programs_are_principal() {
    let lat = Lattice::two_point();
    let mut checked = 0;
    for seed in 0..400u64 {
        let mut g = FgGen::new(&lat, seed);
        let goal = g.random_type(1, true);
        let pc = g.src.label();
        let Some(e) = g.program(&FgCtx::new(), pc, &goal, 16) else { continue };
        match fg_agreement(&lat, &FgCtx::new(), pc, &e) {
            Agreement::Principal => checked += 1,
            Agreement::OutOfBounds => {}
            other => panic!("seed {seed}: {other:?}"),
        }
    }
    assert!(checked > 200, "only {checked} programs checked");
}

#[test]
fn generated_cg_programs_are_principal() {
    let lat = Lattice::two_point();
    let mut checked = 0;
    for seed in 0..400u64 {
        let mut g = CgGen::new(&lat, seed);
        let goal = g.random_type(1, true);
        let Some(e) = g.program(&CgCtx::new(), &goal, 16) else { continue };
        match cg_agreement(&lat, &CgCtx::new(), &e) {
            Agreement::Principal => checked += 1,
            Agreement::OutOfBounds => {}
            other => panic!("seed {seed}: {other:?}"),
        }
    }
    assert!(checked > 200, "only {checked} programs checked");
}

fn fg_shape() -> impl Strategy<Value = FgType> {
    let lat = Lattice::two_point();
    let leaf = prop_oneof![Just(FgType::bool(lat.bot())), Just(FgType::unit(lat.bot()))];
    leaf.prop_recursive(3, 12, 2, move |inner| {
        let l = lat.bot();
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(move |(a, b)| FgType::fun(a, l, b, l)),
            (inner.clone(), inner.clone()).prop_map(move |(a, b)| FgType::prod(a, b, l)),
            (inner.clone(), inner.clone()).prop_map(move |(a, b)| FgType::sum(a, b, l)),
            inner.prop_map(move |a| FgType::reference(a, l)),
        ]
    })
}

fn cg_shape() -> impl Strategy<Value = CgType> {
    let lat = Lattice::two_point();
    let leaf = prop_oneof![Just(CgType::Bool), Just(CgType::Unit)];
    leaf.prop_recursive(3, 12, 2, move |inner| {
        let l = lat.bot();
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| CgType::fun(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| CgType::prod(a, b)),
            inner.clone().prop_map(move |a| CgType::reference(l, a)),
            inner.clone().prop_map(move |a| CgType::labeled(l, a)),
            inner.prop_map(move |a| CgType::slio(l, l, a)),
        ]
    })
}

proptest! {
    #[test]
    fn fg_mask_order_is_subtyping(t in fg_shape(), a in any::<usize>(), b in any::<usize>()) {
        let lat = Lattice::two_point();
        let mut oracle = FgOracle::new(&lat);
        let shape = oracle.shape_of(&t).unwrap();
        let n = shape.pols.len();
        let (a, b) = (a & ((1 << n) - 1), b & ((1 << n) - 1));
        let (ta, tb) = (oracle.decode(&shape, a), oracle.decode(&shape, b));
        prop_assert_eq!(oracle.encode(&ta), a);
        prop_assert_eq!(mask_leq(a, b, &shape.pols), fg_subtype(&lat, &ta, &tb));
    }

    #[test]
    fn cg_mask_order_is_subtyping(t in cg_shape(), a in any::<usize>(), b in any::<usize>()) {
        let lat = Lattice::two_point();
        let mut oracle = CgOracle::new(&lat);
        let shape = oracle.shape_of(&t).unwrap();
        let n = shape.pols.len();
        let (a, b) = (a & ((1 << n) - 1), b & ((1 << n) - 1));
        let (ta, tb) = (oracle.decode(&shape, a), oracle.decode(&shape, b));
        prop_assert_eq!(oracle.encode(&ta), a);
        prop_assert_eq!(mask_leq(a, b, &shape.pols), cg_subtype(&lat, &ta, &tb));
    }
}
