//! Typechecker for `Γ ⊢ e : τ`.
//!
//! Subsumption is applied at argument, injection, allocation and assignment
//! sites. `bind` picks the best pc and taint for the free labels of its
//! rule: the meet of the two pc-labels and the join of the two taints.

use crate::cg::syntax::{CgExpr, CgType};
use crate::ctx::Ctx;
use crate::error::{TypeError, TypeErrorKind};
use crate::fg::BoolOp;
use crate::lattice::Lattice;
use crate::surface::Printer;

pub type CgCtx = Ctx<CgType>;

#[derive(Clone, Copy)]
pub struct CgChecker<'l> {
    lattice: &'l Lattice,
}

impl<'l> CgChecker<'l> {
    pub fn new(lattice: &'l Lattice) -> Self {
        CgChecker { lattice }
    }

    pub fn lattice(&self) -> &'l Lattice {
        self.lattice
    }

    pub fn subtype(&self, a: &CgType, b: &CgType) -> bool {
        use CgType::*;
        let lat = self.lattice;
        match (a, b) {
            (Bool, Bool) | (Unit, Unit) => true,
            (Fun(a1, r1), Fun(a2, r2)) => self.subtype(a2, a1) && self.subtype(r1, r2),
            (Prod(a1, b1), Prod(a2, b2)) | (Sum(a1, b1), Sum(a2, b2)) => self.subtype(a1, a2) && self.subtype(b1, b2),
            (Ref(l1, t1), Ref(l2, t2)) => l1 == l2 && t1 == t2,
            (Labeled(l1, t1), Labeled(l2, t2)) => lat.flows(*l1, *l2) && self.subtype(t1, t2),
            (Slio(p1, t1, a1), Slio(p2, t2, a2)) => lat.flows(*p2, *p1) && lat.flows(*t1, *t2) && self.subtype(a1, a2),
            _ => false,
        }
    }

    pub fn join(&self, a: &CgType, b: &CgType) -> Option<CgType> {
        use CgType::*;
        let lat = self.lattice;
        Some(match (a, b) {
            (Bool, Bool) => Bool,
            (Unit, Unit) => Unit,
            (Fun(a1, r1), Fun(a2, r2)) => CgType::fun(self.meet(a1, a2)?, self.join(r1, r2)?),
            (Prod(a1, b1), Prod(a2, b2)) => CgType::prod(self.join(a1, a2)?, self.join(b1, b2)?),
            (Sum(a1, b1), Sum(a2, b2)) => CgType::sum(self.join(a1, a2)?, self.join(b1, b2)?),
            (Ref(l1, t1), Ref(l2, t2)) if l1 == l2 && t1 == t2 => a.clone(),
            (Labeled(l1, t1), Labeled(l2, t2)) => CgType::labeled(lat.lub(*l1, *l2), self.join(t1, t2)?),
            (Slio(p1, t1, a1), Slio(p2, t2, a2)) => {
                CgType::slio(lat.glb(*p1, *p2), lat.lub(*t1, *t2), self.join(a1, a2)?)
            }
            _ => return None,
        })
    }

    pub fn meet(&self, a: &CgType, b: &CgType) -> Option<CgType> {
        use CgType::*;
        let lat = self.lattice;
        Some(match (a, b) {
            (Bool, Bool) => Bool,
            (Unit, Unit) => Unit,
            (Fun(a1, r1), Fun(a2, r2)) => CgType::fun(self.join(a1, a2)?, self.meet(r1, r2)?),
            (Prod(a1, b1), Prod(a2, b2)) => CgType::prod(self.meet(a1, a2)?, self.meet(b1, b2)?),
            (Sum(a1, b1), Sum(a2, b2)) => CgType::sum(self.meet(a1, a2)?, self.meet(b1, b2)?),
            (Ref(l1, t1), Ref(l2, t2)) if l1 == l2 && t1 == t2 => a.clone(),
            (Labeled(l1, t1), Labeled(l2, t2)) => CgType::labeled(lat.glb(*l1, *l2), self.meet(t1, t2)?),
            (Slio(p1, t1, a1), Slio(p2, t2, a2)) => {
                CgType::slio(lat.lub(*p1, *p2), lat.glb(*t1, *t2), self.meet(a1, a2)?)
            }
            _ => return None,
        })
    }

    pub fn check_program(&self, ctx: &CgCtx, e: &CgExpr) -> Result<CgType, TypeError> {
        let mut labels = Vec::new();
        for (_, t) in ctx.iter() {
            t.labels(&mut labels);
        }
        e.labels(&mut labels);
        if let Some(bad) = labels.iter().find(|l| !self.lattice.contains(**l)) {
            return Err(TypeError::new(
                "lattice",
                TypeErrorKind::Lattice,
                format!("label {:?} is not an element of {}", bad, self.lattice),
            ));
        }
        let mut ctx = ctx.clone();
        self.synth(&mut ctx, e)
    }

    fn show(&self, t: &CgType) -> String {
        Printer::new(self.lattice).cg_type(t)
    }

    fn show_expr(&self, e: &CgExpr) -> String {
        let text = Printer::new(self.lattice).cg_expr_flat(e);
        if text.len() > 60 {
            format!("{}...", &text[..text.char_indices().nth(57).map_or(text.len(), |(i, _)| i)])
        } else {
            text
        }
    }

    fn mismatch(&self, rule: &'static str, e: &CgExpr, msg: String) -> TypeError {
        TypeError::new(rule, TypeErrorKind::Mismatch, format!("{msg} in `{}`", self.show_expr(e)))
    }

    fn expect_sub(&self, rule: &'static str, e: &CgExpr, got: &CgType, want: &CgType) -> Result<(), TypeError> {
        if self.subtype(got, want) {
            Ok(())
        } else {
            Err(self.mismatch(rule, e, format!("expected a subtype of {}, found {}", self.show(want), self.show(got))))
        }
    }

    fn expect_bool(&self, rule: &'static str, e: &CgExpr, t: &CgType) -> Result<(), TypeError> {
        if *t == CgType::Bool {
            Ok(())
        } else {
            Err(self.mismatch(rule, e, format!("expected bool, found {}", self.show(t))))
        }
    }

    pub fn synth(&self, ctx: &mut CgCtx, e: &CgExpr) -> Result<CgType, TypeError> {
        stacker::maybe_grow(crate::RED_ZONE, crate::STACK_CHUNK, || self.synth_inner(ctx, e))
    }

    fn synth_inner(&self, ctx: &mut CgCtx, e: &CgExpr) -> Result<CgType, TypeError> {
        let lat = self.lattice;
        let (bot, top) = (lat.bot(), lat.top());
        match e {
            CgExpr::Var(x) => ctx.lookup(x).cloned().ok_or_else(|| {
                TypeError::new("CG-var", TypeErrorKind::UnboundVariable, format!("unbound variable `{x}`"))
            }),
            CgExpr::Unit => Ok(CgType::Unit),
            CgExpr::Bool(_) => Ok(CgType::Bool),
            CgExpr::Lam { param, param_ty, body } => {
                let result = ctx.with(param, param_ty.clone(), |ctx| self.synth(ctx, body))?;
                Ok(CgType::fun(param_ty.clone(), result))
            }
            CgExpr::App(f, a) => {
                let tf = self.synth(ctx, f)?;
                let CgType::Fun(param, result) = tf else {
                    return Err(self.mismatch("CG-app", e, format!("expected a function, found {}", self.show(&tf))));
                };
                let ta = self.synth(ctx, a)?;
                self.expect_sub("CG-app", e, &ta, &param)?;
                Ok(*result)
            }
            CgExpr::Pair(a, b) => Ok(CgType::prod(self.synth(ctx, a)?, self.synth(ctx, b)?)),
            CgExpr::Fst(p) | CgExpr::Snd(p) => {
                let rule = if matches!(e, CgExpr::Fst(_)) { "CG-fst" } else { "CG-snd" };
                let tp = self.synth(ctx, p)?;
                let CgType::Prod(a, b) = tp else {
                    return Err(self.mismatch(rule, e, format!("expected a pair, found {}", self.show(&tp))));
                };
                Ok(if matches!(e, CgExpr::Fst(_)) { *a } else { *b })
            }
            CgExpr::Inl { left, right, expr } | CgExpr::Inr { left, right, expr } => {
                let (rule, want) = match e {
                    CgExpr::Inl { .. } => ("CG-inl", left),
                    _ => ("CG-inr", right),
                };
                let t = self.synth(ctx, expr)?;
                self.expect_sub(rule, e, &t, want)?;
                Ok(CgType::sum(left.clone(), right.clone()))
            }
            CgExpr::Case { scrut, left, right } => {
                let ts = self.synth(ctx, scrut)?;
                let CgType::Sum(ta, tb) = ts else {
                    return Err(self.mismatch("CG-case", e, format!("expected a sum, found {}", self.show(&ts))));
                };
                let t1 = ctx.with(&left.0, *ta, |ctx| self.synth(ctx, &left.1))?;
                let t2 = ctx.with(&right.0, *tb, |ctx| self.synth(ctx, &right.1))?;
                self.branch_join("CG-case", e, &t1, &t2)
            }
            CgExpr::If(c, t, f) => {
                let tc = self.synth(ctx, c)?;
                self.expect_bool("CG-if", e, &tc)?;
                let t1 = self.synth(ctx, t)?;
                let t2 = self.synth(ctx, f)?;
                self.branch_join("CG-if", e, &t1, &t2)
            }
            CgExpr::BoolOp(op, a, b) => {
                let rule = match op {
                    BoolOp::And => "CG-and",
                    BoolOp::Or => "CG-or",
                };
                let ta = self.synth(ctx, a)?;
                self.expect_bool(rule, e, &ta)?;
                let tb = self.synth(ctx, b)?;
                self.expect_bool(rule, e, &tb)?;
                Ok(CgType::Bool)
            }
            CgExpr::Not(a) => {
                let ta = self.synth(ctx, a)?;
                self.expect_bool("CG-not", e, &ta)?;
                Ok(CgType::Bool)
            }
            CgExpr::Label(l, inner) => Ok(CgType::labeled(*l, self.synth(ctx, inner)?)),
            CgExpr::Unlabel(inner) => match self.synth(ctx, inner)? {
                CgType::Labeled(l, t) => Ok(CgType::Slio(top, l, t)),
                other => Err(self.mismatch(
                    "CG-unlabel",
                    e,
                    format!("expected a labeled value, found {}", self.show(&other)),
                )),
            },
            CgExpr::ToLabeled(inner) => match self.synth(ctx, inner)? {
                CgType::Slio(pc, taint, t) => Ok(CgType::slio(pc, bot, CgType::Labeled(taint, t))),
                other => Err(self.mismatch(
                    "CG-toLabeled",
                    e,
                    format!("expected a computation, found {}", self.show(&other)),
                )),
            },
            CgExpr::Ret(inner) => Ok(CgType::slio(top, bot, self.synth(ctx, inner)?)),
            CgExpr::Bind { first, var, body } => {
                let t1 = self.synth(ctx, first)?;
                let CgType::Slio(pc1, taint1, payload) = t1 else {
                    return Err(self.mismatch(
                        "CG-bind",
                        e,
                        format!("expected a computation, found {}", self.show(&t1)),
                    ));
                };
                let t2 = ctx.with(var, *payload, |ctx| self.synth(ctx, body))?;
                let CgType::Slio(pc2, taint2, result) = t2 else {
                    return Err(self.mismatch(
                        "CG-bind",
                        e,
                        format!("continuation must be a computation, found {}", self.show(&t2)),
                    ));
                };
                // ℓ₂ ⊑ ℓ₃: the first computation's taint may not leak through the
                // continuation's writes.
                if !lat.flows(taint1, pc2) {
                    return Err(TypeError::new(
                        "CG-bind",
                        TypeErrorKind::TaintViolation,
                        format!(
                            "taint {} of the first computation is not below the continuation's pc {} in `{}`",
                            lat.show(taint1),
                            lat.show(pc2),
                            self.show_expr(e)
                        ),
                    ));
                }
                Ok(CgType::Slio(lat.glb(pc1, pc2), lat.lub(taint1, taint2), result))
            }
            CgExpr::New { init, cell } => {
                let t = self.synth(ctx, init)?;
                let (label, payload) = match cell {
                    Some((l, payload)) => {
                        self.expect_sub("CG-ref", e, &t, &CgType::labeled(*l, payload.clone()))?;
                        (*l, payload.clone())
                    }
                    None => match t {
                        CgType::Labeled(l, payload) => (l, *payload),
                        other => {
                            return Err(self.mismatch(
                                "CG-ref",
                                e,
                                format!("expected a labeled initializer, found {}", self.show(&other)),
                            ))
                        }
                    },
                };
                Ok(CgType::slio(label, bot, CgType::reference(label, payload)))
            }
            CgExpr::Deref(r) => match self.synth(ctx, r)? {
                CgType::Ref(l, t) => Ok(CgType::slio(top, bot, CgType::Labeled(l, t))),
                other => {
                    Err(self.mismatch("CG-deref", e, format!("expected a reference, found {}", self.show(&other))))
                }
            },
            CgExpr::Assign(r, v) => {
                let tr = self.synth(ctx, r)?;
                let CgType::Ref(l, payload) = tr else {
                    return Err(self.mismatch(
                        "CG-assign",
                        e,
                        format!("expected a reference, found {}", self.show(&tr)),
                    ));
                };
                let tv = self.synth(ctx, v)?;
                let cell = CgType::Labeled(l, payload);
                if !self.subtype(&tv, &cell) {
                    let kind = match &tv {
                        CgType::Labeled(lv, _) if !lat.flows(*lv, l) => TypeErrorKind::AssignLabel,
                        _ => TypeErrorKind::Mismatch,
                    };
                    return Err(TypeError::new(
                        "CG-assign",
                        kind,
                        format!(
                            "cannot store {} in a cell of type {} in `{}`",
                            self.show(&tv),
                            self.show(&cell),
                            self.show_expr(e)
                        ),
                    ));
                }
                Ok(CgType::slio(l, bot, CgType::Unit))
            }
        }
    }

    fn branch_join(&self, rule: &'static str, e: &CgExpr, t1: &CgType, t2: &CgType) -> Result<CgType, TypeError> {
        self.join(t1, t2).ok_or_else(|| {
            self.mismatch(rule, e, format!("branches have no common type: {} and {}", self.show(t1), self.show(t2)))
        })
    }
}

pub fn cg_typecheck(lattice: &Lattice, ctx: &CgCtx, e: &CgExpr) -> Result<CgType, TypeError> {
    CgChecker::new(lattice).check_program(ctx, e)
}

pub fn cg_subtype(lattice: &Lattice, a: &CgType, b: &CgType) -> bool {
    CgChecker::new(lattice).subtype(a, b)
}
