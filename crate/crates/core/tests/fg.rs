use ifc_core::ctx::Ctx;
use ifc_core::fg::{fg_eval, fg_subtype, fg_typecheck, protected, FgCtx, FgValue};
use ifc_core::heap::Heap;
use ifc_core::surface::{parse_fg_expr, parse_fg_type, parse_label, Printer};
use ifc_core::{EvalError, Lattice, TypeErrorKind, DEFAULT_FUEL};

fn lat() -> Lattice {
    Lattice::two_point()
}

fn ty(l: &Lattice, s: &str) -> ifc_core::fg::FgType {
    parse_fg_type(l, s).unwrap()
}

fn ctx(l: &Lattice, entries: &[(&str, &str)]) -> FgCtx {
    entries.iter().map(|(x, t)| (*x, ty(l, t))).collect()
}

fn typecheck(l: &Lattice, c: &FgCtx, pc: &str, e: &str) -> Result<String, ifc_core::TypeError> {
    let pc = parse_label(l, pc).unwrap();
    let e = parse_fg_expr(l, e).unwrap();
    fg_typecheck(l, c, pc, &e).map(|t| Printer::new(l).fg_type(&t))
}

#[test]
fn protected_examples() {
    let l = lat();
    let (lo, hi) = (l.bot(), l.top());
    assert!(protected(&l, &ty(&l, "bool@H"), lo));
    assert!(!protected(&l, &ty(&l, "bool@L"), hi));
    for t in ["bool@L", "unit@H", "(ref bool@H)@L"] {
        assert!(protected(&l, &ty(&l, t), l.bot()));
    }
}

#[test]
fn subtype_examples() {
    let l = lat();
    let sub = |a: &str, b: &str| fg_subtype(&l, &ty(&l, a), &ty(&l, b));
    assert!(sub("bool@L", "bool@H"));
    assert!(!sub("bool@H", "bool@L"));
    assert!(!sub("(ref bool@L)@L", "(ref bool@H)@L"));
    assert!(sub("(bool@H ->[L] bool@L)@L", "(bool@L ->[L] bool@H)@H"));
    assert!(!sub("(bool@L ->[L] bool@L)@L", "(bool@H ->[L] bool@L)@L"));
    // Latent labels are contravariant.
    assert!(sub("(bool@L ->[H] bool@L)@L", "(bool@L ->[L] bool@L)@L"));
    assert!(!sub("(bool@L ->[L] bool@L)@L", "(bool@L ->[H] bool@L)@L"));
}

#[test]
fn typecheck_examples() {
    let l = lat();
    let empty = Ctx::new();
    assert_eq!(typecheck(&l, &empty, "L", "(lam (x bool@H) [L] x)").unwrap(), "(bool@H ->[L] bool@H)@L");
    assert_eq!(typecheck(&l, &empty, "top", "()").unwrap(), "unit@L");

    let c = ctx(&l, &[("x", "bool@H"), ("r", "(ref unit@L)@L")]);
    // A read under a secret guard is typable; the result is raised to H.
    assert_eq!(typecheck(&l, &c, "L", "(if x (deref r) ())").unwrap(), "unit@H");
    // A write under a secret guard is an implicit flow.
    let err = typecheck(&l, &c, "L", "(if x (assign r ()) ())").unwrap_err();
    assert_eq!(err.rule, "FG-assign");
    assert_eq!(err.kind, TypeErrorKind::PcViolation);
}

#[test]
fn case_raises_result_by_scrutinee_label() {
    let l = lat();
    let c = ctx(&l, &[("x", "(unit@L + unit@L)@H")]);
    assert_eq!(typecheck(&l, &c, "L", "(case x (y true) (z false))").unwrap(), "bool@H");
}

#[test]
fn application_checks_latent_label() {
    let l = lat();
    let c = ctx(&l, &[("f", "(bool@L ->[L] bool@L)@H")]);
    let err = typecheck(&l, &c, "L", "(app f true)").unwrap_err();
    assert_eq!((err.rule, err.kind), ("FG-app", TypeErrorKind::LabelEscalation));
    let c = ctx(&l, &[("f", "(bool@L ->[H] bool@L)@H")]);
    assert_eq!(typecheck(&l, &c, "L", "(app f true)").unwrap(), "bool@H");
}

#[test]
fn allocation_respects_pc() {
    let l = lat();
    let empty = Ctx::new();
    assert_eq!(typecheck(&l, &empty, "H", "(new false)").unwrap(), "(ref bool@H)@L");
    let err = typecheck(&l, &empty, "H", "(new false bool@L)").unwrap_err();
    assert_eq!((err.rule, err.kind), ("FG-ref", TypeErrorKind::PcViolation));
}

#[test]
fn unbound_and_mismatch_errors() {
    let l = lat();
    let empty = Ctx::new();
    let err = typecheck(&l, &empty, "L", "(not y)").unwrap_err();
    assert_eq!(err.kind, TypeErrorKind::UnboundVariable);
    let err = typecheck(&l, &empty, "L", "(fst true)").unwrap_err();
    assert_eq!((err.rule, err.kind), ("FG-fst", TypeErrorKind::Mismatch));
}

#[test]
fn anti_monotone_in_pc() {
    let l = lat();
    let c = ctx(&l, &[("r", "(ref bool@H)@L")]);
    let e = "(assign r true)";
    assert_eq!(typecheck(&l, &c, "H", e).unwrap(), typecheck(&l, &c, "L", e).unwrap());
}

fn eval(e: &str) -> (Result<String, EvalError>, usize, u64) {
    let l = lat();
    let e = parse_fg_expr(&l, e).unwrap();
    let result = match fg_eval(Heap::new(), &e, &Default::default(), DEFAULT_FUEL) {
        Ok(out) => (Ok(out.value.to_string()), out.heap.len(), out.steps),
        Err(err) => (Err(err), 0, 0),
    };
    result
}

#[test]
fn eval_examples() {
    assert_eq!(eval("(app (lam (x bool@L) [top] x) true)"), (Ok("true".into()), 0, 2));
    let (v, cells, _) = eval("(deref (new false))");
    assert_eq!((v.unwrap().as_str(), cells), ("false", 1));
    let prog = "(app (lam (r (ref bool@L)@L) [L] (app (lam (u unit@L) [L] (deref r)) (assign r true))) (new false))";
    assert_eq!(eval(prog).0.unwrap(), "true");
}

#[test]
fn eval_heap_contents() {
    let l = lat();
    let e = parse_fg_expr(&l, "(deref (new false))").unwrap();
    let out = fg_eval(Heap::new(), &e, &Default::default(), 10).unwrap();
    let cells: Vec<_> = out.heap.iter().map(|(_, v)| v.as_bool()).collect();
    assert_eq!(cells, vec![Some(false)]);
    assert!(matches!(out.value, FgValue::Bool(false)));
}

#[test]
fn heap_knot_times_out() {
    let l = lat();
    // Landin's knot: a cell holding a function that calls whatever the cell holds.
    let src = "(app (lam (r (ref (unit@L ->[L] unit@L)@L)@L) [L] \
                 (app (lam (u unit@L) [L] (app (deref r) ())) \
                      (assign r (lam (v unit@L) [L] (app (deref r) ()))))) \
               (new (lam (w unit@L) [L] w)))";
    let e = parse_fg_expr(&l, src).unwrap();
    assert!(fg_typecheck(&l, &Ctx::new(), l.bot(), &e).is_ok());
    // The knot recurses without tail calls, so this also exercises deep
    // evaluator recursion.
    let err = fg_eval(Heap::new(), &e, &Default::default(), DEFAULT_FUEL).err().unwrap();
    assert_eq!(err, EvalError::Timeout(DEFAULT_FUEL));
}

#[test]
fn deep_recursion_does_not_overflow() {
    let l = lat();
    let mut src = String::from("true");
    for _ in 0..4_000 {
        src = format!("(not {src})");
    }
    let e = parse_fg_expr(&l, &src).unwrap();
    assert_eq!(fg_typecheck(&l, &Ctx::new(), l.bot(), &e).unwrap(), ty(&l, "bool@L"));
    let out = fg_eval(Heap::new(), &e, &Default::default(), DEFAULT_FUEL).unwrap();
    assert_eq!(out.value.as_bool(), Some(true));
    assert_eq!(out.steps, 4_000);
}
