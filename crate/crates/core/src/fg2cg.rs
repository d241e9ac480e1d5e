//! Translation from FG to CG.
//!
//! A source judgment `Γ ⊢_pc e : τ` is mapped to a target term of type
//! `SLIO pc ⊥ ⟦τ⟧` under `⟦Γ⟧`. The translation re-runs FG type synthesis on
//! subterms instead of consuming a derivation: the algorithmic rules are
//! syntax-directed, so the term determines its derivation.

use std::collections::BTreeSet;

use crate::cg::{CgChecker, CgCtx, CgExpr, CgType};
use crate::error::TranslateError;
use crate::fg::{FgChecker, FgCtx, FgExpr, FgType, FgUnlabeled};
use crate::fresh::Fresh;
use crate::lattice::{Label, Lattice};
use crate::surface::Printer;
use crate::Mutation;

/// `⟦·⟧` on labeled types: `⟦A^ℓ⟧ = Labeled ℓ ⟦A⟧`.
pub fn fg2cg_type(t: &FgType) -> CgType {
    CgType::labeled(t.label, fg2cg_unlabeled(&t.body))
}

/// `⟦·⟧` on unlabeled types.
pub fn fg2cg_unlabeled(body: &FgUnlabeled) -> CgType {
    match body {
        FgUnlabeled::Bool => CgType::Bool,
        FgUnlabeled::Unit => CgType::Unit,
        FgUnlabeled::Fun(a, latent, r) => {
            let bot = r.label.bottom_like();
            CgType::fun(fg2cg_type(a), CgType::slio(*latent, bot, fg2cg_type(r)))
        }
        FgUnlabeled::Prod(a, b) => CgType::prod(fg2cg_type(a), fg2cg_type(b)),
        FgUnlabeled::Sum(a, b) => CgType::sum(fg2cg_type(a), fg2cg_type(b)),
        FgUnlabeled::Ref(a) => CgType::reference(a.label, fg2cg_unlabeled(&a.body)),
    }
}

pub fn fg2cg_ctx(ctx: &FgCtx) -> CgCtx {
    ctx.map(fg2cg_type)
}

/// `(λx. toLabeled (bind x (y. unlabel y))) m`, turning `m : SLIO pc ℓ τ`
/// into a computation of type `SLIO pc ⊥ τ`. Requires `τ = Labeled ℓ′ τ′`
/// with `ℓ ⊑ ℓ′`.
pub fn coerce_taint_wrap(
    lattice: &Lattice,
    m: CgExpr,
    pc: Label,
    taint: Label,
    payload: &CgType,
    fresh: &mut Fresh,
) -> Result<CgExpr, TranslateError> {
    match payload {
        CgType::Labeled(l, _) if lattice.flows(taint, *l) => {}
        CgType::Labeled(l, _) => {
            return Err(TranslateError::Invariant(format!(
                "coerce_taint: taint {} is not below payload label {}",
                lattice.show(taint),
                lattice.show(*l)
            )))
        }
        other => {
            return Err(TranslateError::Invariant(format!(
                "coerce_taint: payload {} is not a labeled type",
                Printer::new(lattice).cg_type(other)
            )))
        }
    }
    let x = fresh.name("x");
    let y = fresh.name("y");
    let body = CgExpr::to_labeled(CgExpr::bind(CgExpr::var(&x), &y, CgExpr::unlabel(CgExpr::var(&y))));
    let arg_ty = CgType::slio(pc, taint, payload.clone());
    Ok(CgExpr::app(CgExpr::lam(x, arg_ty, body), m))
}

/// Output of [`fg2cg_expr`].
#[derive(Debug, Clone, PartialEq)]
pub struct Fg2CgResult {
    pub target: CgExpr,
    /// The source program's principal FG type.
    pub source_type: FgType,
    /// `SLIO pc ⊥ ⟦source_type⟧`.
    pub target_type: CgType,
}

pub struct Fg2Cg<'l> {
    lattice: &'l Lattice,
    checker: FgChecker<'l>,
    fresh: Fresh,
    mutation: Mutation,
}

impl<'l> Fg2Cg<'l> {
    pub fn new(lattice: &'l Lattice, ctx: &FgCtx, e: &FgExpr) -> Self {
        let mut names = BTreeSet::new();
        e.names(&mut names);
        names.extend(ctx.iter().map(|(x, _)| x.to_string()));
        Fg2Cg { lattice, checker: FgChecker::new(lattice), fresh: Fresh::avoiding(names), mutation: Mutation::None }
    }

    pub fn with_mutation(mut self, mutation: Mutation) -> Self {
        self.mutation = mutation;
        self
    }

    pub fn run(mut self, ctx: &FgCtx, pc: Label, e: &FgExpr) -> Result<Fg2CgResult, TranslateError> {
        let source_type = self.checker.check_program(ctx, pc, e)?;
        let mut ctx = ctx.clone();
        let target = self.tr(&mut ctx, pc, e)?;
        let target_type = CgType::slio(pc, self.lattice.bot(), fg2cg_type(&source_type));
        Ok(Fg2CgResult { target, source_type, target_type })
    }

    fn synth(&self, ctx: &mut FgCtx, pc: Label, e: &FgExpr) -> Result<FgType, TranslateError> {
        Ok(self.checker.synth(ctx, pc, e)?)
    }

    /// `ret (label ⊥ v)`.
    fn ret_bot(&self, v: CgExpr) -> CgExpr {
        CgExpr::ret(CgExpr::label(self.lattice.bot(), v))
    }

    /// Wrap an elimination whose computation is tainted by `taint`; `whole`
    /// is the elimination's source term, whose principal type fixes the payload.
    fn coerce(
        &mut self,
        ctx: &mut FgCtx,
        pc: Label,
        whole: &FgExpr,
        m: CgExpr,
        taint: Label,
    ) -> Result<CgExpr, TranslateError> {
        if self.mutation == Mutation::DropCoerce {
            return Ok(m);
        }
        let payload = fg2cg_type(&self.synth(ctx, pc, whole)?);
        coerce_taint_wrap(self.lattice, m, pc, taint, &payload, &mut self.fresh)
    }

    /// `bind e (a. bind (unlabel a) (b. k b))` for an elimination of `e`.
    fn eliminate(&mut self, et: CgExpr, k: impl FnOnce(CgExpr) -> CgExpr) -> CgExpr {
        let a = self.fresh.name("a");
        let b = self.fresh.name("b");
        let inner = CgExpr::bind(CgExpr::unlabel(CgExpr::var(&a)), &b, k(CgExpr::var(&b)));
        CgExpr::bind(et, a, inner)
    }

    fn tr(&mut self, ctx: &mut FgCtx, pc: Label, e: &FgExpr) -> Result<CgExpr, TranslateError> {
        let lat = self.lattice;
        let bot = lat.bot();
        Ok(match e {
            FgExpr::Var(x) => CgExpr::ret(CgExpr::var(x)),
            FgExpr::Unit => self.ret_bot(CgExpr::Unit),
            FgExpr::Bool(b) => self.ret_bot(CgExpr::Bool(*b)),
            FgExpr::Lam { param, param_ty, latent, body } => {
                let bt = ctx.with(param, param_ty.clone(), |ctx| self.tr(ctx, *latent, body))?;
                self.ret_bot(CgExpr::lam(param, fg2cg_type(param_ty), bt))
            }
            FgExpr::App(f, arg) => {
                let taint = self.synth(ctx, pc, f)?.label;
                let ft = self.tr(ctx, pc, f)?;
                let at = self.tr(ctx, pc, arg)?;
                let a = self.fresh.name("a");
                let b = self.fresh.name("b");
                let c = self.fresh.name("c");
                let call = CgExpr::app(CgExpr::var(&c), CgExpr::var(&b));
                let m = CgExpr::bind(
                    ft,
                    &a,
                    CgExpr::bind(at, &b, CgExpr::bind(CgExpr::unlabel(CgExpr::var(&a)), &c, call)),
                );
                self.coerce(ctx, pc, e, m, taint)?
            }
            FgExpr::Pair(x, y) => {
                let xt = self.tr(ctx, pc, x)?;
                let yt = self.tr(ctx, pc, y)?;
                let a = self.fresh.name("a");
                let b = self.fresh.name("b");
                let pair = self.ret_bot(CgExpr::pair(CgExpr::var(&a), CgExpr::var(&b)));
                CgExpr::bind(xt, a, CgExpr::bind(yt, b, pair))
            }
            FgExpr::Fst(p) | FgExpr::Snd(p) => {
                let taint = self.synth(ctx, pc, p)?.label;
                let pt = self.tr(ctx, pc, p)?;
                let first = matches!(e, FgExpr::Fst(_));
                let m = self.eliminate(pt, |b| CgExpr::ret(if first { CgExpr::fst(b) } else { CgExpr::snd(b) }));
                self.coerce(ctx, pc, e, m, taint)?
            }
            FgExpr::Inl { left, right, expr } | FgExpr::Inr { left, right, expr } => {
                let et = self.tr(ctx, pc, expr)?;
                let a = self.fresh.name("a");
                let (l, r) = (fg2cg_type(left), fg2cg_type(right));
                let inj = if matches!(e, FgExpr::Inl { .. }) {
                    CgExpr::inl(l, r, CgExpr::var(&a))
                } else {
                    CgExpr::inr(l, r, CgExpr::var(&a))
                };
                CgExpr::bind(et, a, self.ret_bot(inj))
            }
            FgExpr::Case { scrut, left, right } => {
                let ts = self.synth(ctx, pc, scrut)?;
                let FgUnlabeled::Sum(ta, tb) = &ts.body else {
                    return Err(TranslateError::Invariant("case scrutinee is not a sum".into()));
                };
                let inner = lat.lub(pc, ts.label);
                let st = self.tr(ctx, pc, scrut)?;
                let lt = ctx.with(&left.0, (**ta).clone(), |ctx| self.tr(ctx, inner, &left.1))?;
                let rt = ctx.with(&right.0, (**tb).clone(), |ctx| self.tr(ctx, inner, &right.1))?;
                let (lt, rt) = if self.mutation == Mutation::SwapCase { (rt, lt) } else { (lt, rt) };
                let (x, y) = (left.0.clone(), right.0.clone());
                let m = self.eliminate(st, |b| CgExpr::case(b, x, lt, y, rt));
                self.coerce(ctx, pc, e, m, ts.label)?
            }
            FgExpr::If(c, t, f) => {
                let taint = self.synth(ctx, pc, c)?.label;
                let inner = lat.lub(pc, taint);
                let ct = self.tr(ctx, pc, c)?;
                let tt = self.tr(ctx, inner, t)?;
                let ft = self.tr(ctx, inner, f)?;
                let (tt, ft) = if self.mutation == Mutation::SwapCase { (ft, tt) } else { (tt, ft) };
                let m = self.eliminate(ct, |b| CgExpr::if_(b, tt, ft));
                self.coerce(ctx, pc, e, m, taint)?
            }
            FgExpr::New { init, .. } => {
                let FgUnlabeled::Ref(cell) = self.synth(ctx, pc, e)?.body else {
                    return Err(TranslateError::Invariant("allocation is not a reference".into()));
                };
                let it = self.tr(ctx, pc, init)?;
                let a = self.fresh.name("a");
                let r = self.fresh.name("r");
                let alloc = CgExpr::new_ref(CgExpr::var(&a), cell.label, fg2cg_unlabeled(&cell.body));
                CgExpr::bind(it, a, CgExpr::bind(alloc, &r, self.ret_bot(CgExpr::var(&r))))
            }
            FgExpr::Deref(r) => {
                let taint = self.synth(ctx, pc, r)?.label;
                let rt = self.tr(ctx, pc, r)?;
                let m = self.eliminate(rt, CgExpr::deref);
                self.coerce(ctx, pc, e, m, taint)?
            }
            FgExpr::Assign(r, v) => {
                let rt = self.tr(ctx, pc, r)?;
                let vt = self.tr(ctx, pc, v)?;
                let a = self.fresh.name("a");
                let b = self.fresh.name("b");
                let c = self.fresh.name("c");
                let d = self.fresh.name("d");
                let write = CgExpr::assign(CgExpr::var(&c), CgExpr::var(&b));
                let m = CgExpr::bind(
                    rt,
                    &a,
                    CgExpr::bind(vt, &b, CgExpr::bind(CgExpr::unlabel(CgExpr::var(&a)), &c, write)),
                );
                // The result is `ret (label ⊥ ())` rather than `ret ()`, since the
                // source result `unit^⊥` translates to `Labeled ⊥ unit`.
                CgExpr::bind(CgExpr::to_labeled(m), d, self.ret_bot(CgExpr::Unit))
            }
            FgExpr::BoolOp(op, x, y) => {
                let xt = self.tr(ctx, pc, x)?;
                let yt = self.tr(ctx, pc, y)?;
                let taint = lat.lub(self.synth(ctx, pc, x)?.label, self.synth(ctx, pc, y)?.label);
                let [a, b, c, d] = ["a", "b", "c", "d"].map(|n| self.fresh.name(n));
                let op_expr = CgExpr::BoolOp(*op, Box::new(CgExpr::var(&c)), Box::new(CgExpr::var(&d)));
                let unlabel_both = CgExpr::bind(
                    CgExpr::unlabel(CgExpr::var(&a)),
                    &c,
                    CgExpr::bind(CgExpr::unlabel(CgExpr::var(&b)), &d, self.ret_bot(op_expr)),
                );
                let m = CgExpr::bind(xt, a, CgExpr::bind(yt, b, unlabel_both));
                self.coerce(ctx, pc, e, m, taint)?
            }
            FgExpr::Not(x) => {
                let taint = self.synth(ctx, pc, x)?.label;
                let xt = self.tr(ctx, pc, x)?;
                let ret = |b| CgExpr::ret(CgExpr::label(bot, CgExpr::not(b)));
                let m = self.eliminate(xt, ret);
                self.coerce(ctx, pc, e, m, taint)?
            }
        })
    }
}

/// Translate `e` typed as `Γ ⊢_pc e : τ`.
pub fn fg2cg_expr(lattice: &Lattice, ctx: &FgCtx, pc: Label, e: &FgExpr) -> Result<Fg2CgResult, TranslateError> {
    Fg2Cg::new(lattice, ctx, e).run(ctx, pc, e)
}

/// Typecheck a translation's target and confirm its type is below the
/// expected `SLIO pc ⊥ ⟦τ⟧`; returns the target's synthesized type.
pub fn check_fg2cg(lattice: &Lattice, ctx: &FgCtx, result: &Fg2CgResult) -> Result<CgType, TranslateError> {
    let checker = CgChecker::new(lattice);
    let got = checker
        .check_program(&fg2cg_ctx(ctx), &result.target)
        .map_err(|e| TranslateError::Invariant(format!("target is ill-typed: {e}")))?;
    if checker.subtype(&got, &result.target_type) {
        Ok(got)
    } else {
        let p = Printer::new(lattice);
        Err(TranslateError::Invariant(format!(
            "target has type {}, expected a subtype of {}",
            p.cg_type(&got),
            p.cg_type(&result.target_type)
        )))
    }
}
