use ifc_core::cg::{cg_run, cg_typecheck, CgCtx, CgExpr, CgType, CgValue};
use ifc_core::cg2fg::{cg2fg_expr, cg2fg_type, check_cg2fg, Cg2Fg};
use ifc_core::ctx::Ctx;
use ifc_core::fg::{fg_eval, FgCtx, FgExpr, FgMachine};
use ifc_core::fg2cg::{check_fg2cg, coerce_taint_wrap, fg2cg_expr, fg2cg_type, Fg2Cg};
use ifc_core::heap::Heap;
use ifc_core::surface::{parse_cg_expr, parse_cg_type, parse_fg_expr, parse_fg_type, Printer};
use ifc_core::{Fresh, Lattice, Mutation, TranslateError, DEFAULT_FUEL};

fn lat() -> Lattice {
    Lattice::two_point()
}

#[test]
fn fg_type_translation_examples() {
    let l = lat();
    let p = Printer::new(&l);
    let tr = |s: &str| p.cg_type(&fg2cg_type(&parse_fg_type(&l, s).unwrap()));
    assert_eq!(tr("bool@H"), "(Labeled H bool)");
    assert_eq!(tr("(bool@L ->[H] bool@L)@L"), "(Labeled L ((Labeled L bool) -> (SLIO H L (Labeled L bool))))");
    assert_eq!(tr("(ref bool@H)@L"), "(Labeled L (ref H bool))");
}

#[test]
fn cg_type_translation_examples() {
    let l = lat();
    let p = Printer::new(&l);
    let tr = |s: &str| p.fg_type(&cg2fg_type(&l, &parse_cg_type(&l, s).unwrap()));
    assert_eq!(tr("(Labeled H bool)"), "(bool@L + unit@L)@H");
    assert_eq!(tr("(SLIO L H bool)"), "(unit@L ->[L] (bool@L + unit@L)@H)@L");
    assert_eq!(tr("(ref L bool)"), "(ref (bool@L + unit@L)@L)@L");
    assert_eq!(tr("(bool -> unit)"), "(bool@L ->[H] unit@L)@L");
}

#[test]
fn coerce_taint_examples() {
    let l = lat();
    let (lo, hi) = (l.bot(), l.top());
    let mut fresh = Fresh::avoiding(Default::default());
    let m = parse_cg_expr(&l, "(unlabel (label H (label H true)))").unwrap();
    let payload = parse_cg_type(&l, "(Labeled H bool)").unwrap();
    let wrapped = coerce_taint_wrap(&l, m, lo, hi, &payload, &mut fresh).unwrap();
    let t = cg_typecheck(&l, &Ctx::new(), &wrapped).unwrap();
    assert_eq!(Printer::new(&l).cg_type(&t), "(SLIO L L (Labeled H bool))");

    let m = parse_cg_expr(&l, "(ret (label L true))").unwrap();
    let payload = parse_cg_type(&l, "(Labeled L bool)").unwrap();
    let wrapped = coerce_taint_wrap(&l, m, lo, lo, &payload, &mut fresh).unwrap();
    let t = cg_typecheck(&l, &Ctx::new(), &wrapped).unwrap();
    assert_eq!(Printer::new(&l).cg_type(&t), "(SLIO L L (Labeled L bool))");

    let err = coerce_taint_wrap(&l, CgExpr::ret(CgExpr::Bool(true)), lo, lo, &CgType::Bool, &mut fresh);
    assert!(matches!(err, Err(TranslateError::Invariant(_))));
    let err = coerce_taint_wrap(
        &l,
        CgExpr::ret(CgExpr::Bool(true)),
        lo,
        hi,
        &parse_cg_type(&l, "(Labeled L bool)").unwrap(),
        &mut fresh,
    );
    assert!(matches!(err, Err(TranslateError::Invariant(_))));
}

fn fg_ctx(l: &Lattice, entries: &[(&str, &str)]) -> FgCtx {
    entries.iter().map(|(x, t)| (*x, parse_fg_type(l, t).unwrap())).collect()
}

#[test]
fn fg2cg_examples() {
    let l = lat();
    let p = Printer::new(&l);
    let c = fg_ctx(&l, &[("x", "bool@H")]);
    let r = fg2cg_expr(&l, &c, l.bot(), &parse_fg_expr(&l, "x").unwrap()).unwrap();
    assert_eq!(p.cg_expr_flat(&r.target), "(ret x)");

    let e = parse_fg_expr(&l, "(lam (x bool@L) [L] x)").unwrap();
    let r = fg2cg_expr(&l, &Ctx::new(), l.bot(), &e).unwrap();
    assert_eq!(p.cg_expr_flat(&r.target), "(ret (label L (lam (x (Labeled L bool)) (ret x))))");
    assert_eq!(p.cg_type(&r.target_type), "(SLIO L L (Labeled L ((Labeled L bool) -> (SLIO L L (Labeled L bool)))))");
    check_fg2cg(&l, &Ctx::new(), &r).unwrap();

    let c = fg_ctx(&l, &[("f", "(bool@L ->[L] bool@L)@L")]);
    let e = parse_fg_expr(&l, "(app f true)").unwrap();
    let r = fg2cg_expr(&l, &c, l.bot(), &e).unwrap();
    assert_eq!(
        p.cg_expr_flat(&r.target),
        "(app (lam (x4 (SLIO L L (Labeled L bool))) (toLabeled (bind x4 (y5 (unlabel y5))))) \
         (bind (ret f) (a1 (bind (ret (label L true)) (b2 (bind (unlabel a1) (c3 (app c3 b2))))))))"
    );
    check_fg2cg(&l, &c, &r).unwrap();
}

#[test]
fn fg2cg_preserves_typing_on_effects() {
    let l = lat();
    let c = fg_ctx(&l, &[("s", "bool@H"), ("r", "(ref bool@H)@L"), ("q", "(unit@L + unit@L)@H")]);
    for src in [
        "(if s (assign r true) ())",
        "(case q (u (assign r false)) (v (assign r true)))",
        "(deref (new (deref r)))",
        "(and s (not (deref r)))",
        "(snd (pair s (case q (u true) (v false))))",
        "(app (lam (z bool@H) [H] (assign r z)) s)",
    ] {
        let e = parse_fg_expr(&l, src).unwrap();
        let r = fg2cg_expr(&l, &c, l.bot(), &e).unwrap();
        check_fg2cg(&l, &c, &r).unwrap_or_else(|err| panic!("{src}: {err}"));
    }
}

#[test]
fn fg2cg_semantics_agree() {
    let l = lat();
    for (src, want) in [
        ("(app (lam (x bool@L) [top] x) false)", false),
        ("(app (lam (r (ref bool@L)@L) [L] (app (lam (u unit@L) [L] (deref r)) (assign r true))) (new false))", true),
        ("(case (inr () (bool@L + unit@L)) (x x) (y (not false)))", true),
    ] {
        let e = parse_fg_expr(&l, src).unwrap();
        let fg = fg_eval(Heap::new(), &e, &Default::default(), DEFAULT_FUEL).unwrap();
        assert_eq!(fg.value.as_bool(), Some(want));
        let r = fg2cg_expr(&l, &Ctx::new(), l.bot(), &e).unwrap();
        let cg = cg_run(Heap::new(), &r.target, &Default::default(), DEFAULT_FUEL).unwrap();
        let CgValue::Labeled(v) = &cg.value else { panic!("expected a labeled result, got {}", cg.value) };
        assert_eq!(v.as_bool(), Some(want), "{src}");
    }
}

#[test]
fn mutations_are_observable() {
    let l = lat();
    let c = fg_ctx(&l, &[("s", "bool@H")]);
    let e = parse_fg_expr(&l, "(if s true false)").unwrap();
    let r = Fg2Cg::new(&l, &c, &e).with_mutation(Mutation::DropCoerce).run(&c, l.bot(), &e).unwrap();
    assert!(check_fg2cg(&l, &c, &r).is_err());

    let e = parse_fg_expr(&l, "(if true true false)").unwrap();
    let r = Fg2Cg::new(&l, &Ctx::new(), &e).with_mutation(Mutation::SwapCase).run(&Ctx::new(), l.bot(), &e).unwrap();
    let cg = cg_run(Heap::new(), &r.target, &Default::default(), DEFAULT_FUEL).unwrap();
    assert_eq!(cg.value.to_string(), "(labeled false)");
}

fn run_thunk(l: &Lattice, src: &str) -> (String, usize) {
    let e = parse_cg_expr(l, src).unwrap();
    let r = cg2fg_expr(l, &Ctx::new(), &e).unwrap();
    check_cg2fg(l, &Ctx::new(), &r).unwrap_or_else(|err| panic!("{src}: {err}"));
    let call = FgExpr::app(r.target.clone(), FgExpr::Unit);
    let mut m = FgMachine::new(DEFAULT_FUEL);
    m.watch_binders(&r.dead_binders);
    let v = m.eval(&Default::default(), &call).unwrap().to_string();
    (v, m.dead_hits())
}

#[test]
fn cg2fg_examples() {
    let l = lat();
    let p = Printer::new(&l);
    let r = cg2fg_expr(&l, &Ctx::new(), &parse_cg_expr(&l, "(label H true)").unwrap()).unwrap();
    assert_eq!(p.fg_expr_flat(&r.target), "(inl true (bool@L + unit@L))");
    assert_eq!(p.fg_type(&r.target_type), "(bool@L + unit@L)@H");

    let r = cg2fg_expr(&l, &Ctx::new(), &parse_cg_expr(&l, "(ret true)").unwrap()).unwrap();
    assert_eq!(p.fg_expr_flat(&r.target), "(lam (_ unit@L) [H] (inl true (bool@L + unit@L)))");

    assert_eq!(run_thunk(&l, "(bind (ret true) (x (ret x)))"), ("(inl true)".into(), 0));
    assert_eq!(run_thunk(&l, "(toLabeled (unlabel (label H false)))"), ("(inl (inl false))".into(), 0));
    assert_eq!(
        run_thunk(&l, "(bind (new (label L false)) (r (bind (assign r (label L true)) (u (deref r)))))"),
        ("(inl (inl true))".into(), 0)
    );
}

#[test]
fn cg2fg_preserves_typing_with_context() {
    let l = lat();
    let c: CgCtx =
        [("s", parse_cg_type(&l, "(Labeled H bool)").unwrap()), ("r", parse_cg_type(&l, "(ref H bool)").unwrap())]
            .into_iter()
            .collect();
    for src in [
        "(bind (unlabel s) (x (assign r (label H x))))",
        "(bind (toLabeled (unlabel s)) (y (ret true)))",
        "(bind (deref r) (v (unlabel v)))",
        "(new s)",
    ] {
        let e = parse_cg_expr(&l, src).unwrap();
        let r = Cg2Fg::new(&l, &c, &e).run(&c, &e).unwrap();
        check_cg2fg(&l, &c, &r).unwrap_or_else(|err| panic!("{src}: {err}"));
    }
}

#[test]
fn translation_rejects_ill_typed_sources() {
    let l = lat();
    let e = parse_fg_expr(&l, "(fst true)").unwrap();
    assert!(matches!(fg2cg_expr(&l, &Ctx::new(), l.bot(), &e), Err(TranslateError::Source(_))));
    let e = parse_cg_expr(&l, "(unlabel true)").unwrap();
    assert!(matches!(cg2fg_expr(&l, &Ctx::new(), &e), Err(TranslateError::Source(_))));
}
