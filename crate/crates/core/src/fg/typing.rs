//! Algorithmic typechecker for `Γ ⊢_pc e : τ`.
//!
//! Subsumption is folded into the elimination forms: arguments, injected
//! values, stored values and allocation payloads are checked against their
//! expected type with [`FgChecker::subtype`], and the "protected at ℓ"
//! premises of the elimination rules (`τ ↘ ℓ`) are realized by raising the
//! result's top label with ℓ. Each synthesized type is the least type the
//! declarative rules can derive.

use crate::ctx::Ctx;
use crate::error::{TypeError, TypeErrorKind};
use crate::fg::syntax::{BoolOp, FgExpr, FgType, FgUnlabeled};
use crate::lattice::{Label, Lattice};
use crate::surface::Printer;

pub type FgCtx = Ctx<FgType>;

#[derive(Clone, Copy)]
pub struct FgChecker<'l> {
    lattice: &'l Lattice,
}

impl<'l> FgChecker<'l> {
    pub fn new(lattice: &'l Lattice) -> Self {
        FgChecker { lattice }
    }

    pub fn lattice(&self) -> &'l Lattice {
        self.lattice
    }

    /// `τ ↘ ℓ`: the top-level label of `t` is at least `l`.
    pub fn protected(&self, t: &FgType, l: Label) -> bool {
        self.lattice.flows(l, t.label)
    }

    /// `t` with its top-level label joined with `l`.
    pub fn raise(&self, t: &FgType, l: Label) -> FgType {
        t.with_label(self.lattice.lub(t.label, l))
    }

    pub fn subtype(&self, a: &FgType, b: &FgType) -> bool {
        self.lattice.flows(a.label, b.label) && self.subtype_body(&a.body, &b.body)
    }

    fn subtype_body(&self, a: &FgUnlabeled, b: &FgUnlabeled) -> bool {
        use FgUnlabeled::*;
        match (a, b) {
            (Bool, Bool) | (Unit, Unit) => true,
            (Fun(a1, e1, r1), Fun(a2, e2, r2)) => {
                self.subtype(a2, a1) && self.lattice.flows(*e2, *e1) && self.subtype(r1, r2)
            }
            (Prod(a1, b1), Prod(a2, b2)) | (Sum(a1, b1), Sum(a2, b2)) => self.subtype(a1, a2) && self.subtype(b1, b2),
            (Ref(a), Ref(b)) => a == b,
            _ => false,
        }
    }

    /// Least common supertype, if any.
    pub fn join(&self, a: &FgType, b: &FgType) -> Option<FgType> {
        use FgUnlabeled::*;
        let body = match (&a.body, &b.body) {
            (Bool, Bool) => Bool,
            (Unit, Unit) => Unit,
            (Fun(a1, e1, r1), Fun(a2, e2, r2)) => {
                Fun(Box::new(self.meet(a1, a2)?), self.lattice.glb(*e1, *e2), Box::new(self.join(r1, r2)?))
            }
            (Prod(a1, b1), Prod(a2, b2)) => Prod(Box::new(self.join(a1, a2)?), Box::new(self.join(b1, b2)?)),
            (Sum(a1, b1), Sum(a2, b2)) => Sum(Box::new(self.join(a1, a2)?), Box::new(self.join(b1, b2)?)),
            (Ref(x), Ref(y)) if x == y => Ref(x.clone()),
            _ => return None,
        };
        Some(FgType::new(body, self.lattice.lub(a.label, b.label)))
    }

    /// Greatest common subtype, if any.
    pub fn meet(&self, a: &FgType, b: &FgType) -> Option<FgType> {
        use FgUnlabeled::*;
        let body = match (&a.body, &b.body) {
            (Bool, Bool) => Bool,
            (Unit, Unit) => Unit,
            (Fun(a1, e1, r1), Fun(a2, e2, r2)) => {
                Fun(Box::new(self.join(a1, a2)?), self.lattice.lub(*e1, *e2), Box::new(self.meet(r1, r2)?))
            }
            (Prod(a1, b1), Prod(a2, b2)) => Prod(Box::new(self.meet(a1, a2)?), Box::new(self.meet(b1, b2)?)),
            (Sum(a1, b1), Sum(a2, b2)) => Sum(Box::new(self.meet(a1, a2)?), Box::new(self.meet(b1, b2)?)),
            (Ref(x), Ref(y)) if x == y => Ref(x.clone()),
            _ => return None,
        };
        Some(FgType::new(body, self.lattice.glb(a.label, b.label)))
    }

    /// Typecheck a whole program, first making sure every label belongs to
    /// this checker's lattice.
    pub fn check_program(&self, ctx: &FgCtx, pc: Label, e: &FgExpr) -> Result<FgType, TypeError> {
        let mut labels = vec![pc];
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
        self.synth(&mut ctx, pc, e)
    }

    fn show(&self, t: &FgType) -> String {
        Printer::new(self.lattice).fg_type(t)
    }

    fn show_expr(&self, e: &FgExpr) -> String {
        let text = Printer::new(self.lattice).fg_expr_flat(e);
        if text.len() > 60 {
            format!("{}...", &text[..text.char_indices().nth(57).map_or(text.len(), |(i, _)| i)])
        } else {
            text
        }
    }

    fn mismatch(&self, rule: &'static str, e: &FgExpr, msg: String) -> TypeError {
        TypeError::new(rule, TypeErrorKind::Mismatch, format!("{msg} in `{}`", self.show_expr(e)))
    }

    fn expect_sub(&self, rule: &'static str, e: &FgExpr, got: &FgType, want: &FgType) -> Result<(), TypeError> {
        if self.subtype(got, want) {
            Ok(())
        } else {
            Err(self.mismatch(rule, e, format!("expected a subtype of {}, found {}", self.show(want), self.show(got))))
        }
    }

    /// Synthesize the least type of `e` under `ctx` at program counter `pc`.
    pub fn synth(&self, ctx: &mut FgCtx, pc: Label, e: &FgExpr) -> Result<FgType, TypeError> {
        stacker::maybe_grow(crate::RED_ZONE, crate::STACK_CHUNK, || self.synth_inner(ctx, pc, e))
    }

    fn synth_inner(&self, ctx: &mut FgCtx, pc: Label, e: &FgExpr) -> Result<FgType, TypeError> {
        let lat = self.lattice;
        let bot = lat.bot();
        match e {
            FgExpr::Var(x) => ctx.lookup(x).cloned().ok_or_else(|| {
                TypeError::new("FG-var", TypeErrorKind::UnboundVariable, format!("unbound variable `{x}`"))
            }),
            // Introduction forms produce values labeled ⊥.
            FgExpr::Unit => Ok(FgType::unit(bot)),
            FgExpr::Bool(_) => Ok(FgType::bool(bot)),
            FgExpr::Lam { param, param_ty, latent, body } => {
                let result = ctx.with(param, param_ty.clone(), |ctx| self.synth(ctx, *latent, body))?;
                Ok(FgType::fun(param_ty.clone(), *latent, result, bot))
            }
            FgExpr::Pair(a, b) => {
                let ta = self.synth(ctx, pc, a)?;
                let tb = self.synth(ctx, pc, b)?;
                Ok(FgType::prod(ta, tb, bot))
            }
            FgExpr::Inl { left, right, expr } | FgExpr::Inr { left, right, expr } => {
                let (rule, want) = match e {
                    FgExpr::Inl { .. } => ("FG-inl", left),
                    _ => ("FG-inr", right),
                };
                let t = self.synth(ctx, pc, expr)?;
                self.expect_sub(rule, e, &t, want)?;
                Ok(FgType::sum(left.clone(), right.clone(), bot))
            }
            FgExpr::App(f, arg) => {
                let tf = self.synth(ctx, pc, f)?;
                let FgUnlabeled::Fun(param, latent, result) = &tf.body else {
                    return Err(self.mismatch("FG-app", e, format!("expected a function, found {}", self.show(&tf))));
                };
                let targ = self.synth(ctx, pc, arg)?;
                self.expect_sub("FG-app", e, &targ, param)?;
                // ℓ ⊔ pc ⊑ ℓe
                let needed = lat.lub(tf.label, pc);
                if !lat.flows(needed, *latent) {
                    return Err(TypeError::new(
                        "FG-app",
                        TypeErrorKind::LabelEscalation,
                        format!(
                            "function with latent label {} applied at pc ⊔ ℓ = {} in `{}`",
                            lat.show(*latent),
                            lat.show(needed),
                            self.show_expr(e)
                        ),
                    ));
                }
                Ok(self.raise(result, tf.label))
            }
            FgExpr::Fst(p) | FgExpr::Snd(p) => {
                let rule = if matches!(e, FgExpr::Fst(_)) { "FG-fst" } else { "FG-snd" };
                let tp = self.synth(ctx, pc, p)?;
                let FgUnlabeled::Prod(a, b) = &tp.body else {
                    return Err(self.mismatch(rule, e, format!("expected a pair, found {}", self.show(&tp))));
                };
                let component = if matches!(e, FgExpr::Fst(_)) { a } else { b };
                Ok(self.raise(component, tp.label))
            }
            FgExpr::Case { scrut, left, right } => {
                let ts = self.synth(ctx, pc, scrut)?;
                let FgUnlabeled::Sum(ta, tb) = &ts.body else {
                    return Err(self.mismatch("FG-case", e, format!("expected a sum, found {}", self.show(&ts))));
                };
                let inner = lat.lub(pc, ts.label);
                let t1 = ctx.with(&left.0, (**ta).clone(), |ctx| self.synth(ctx, inner, &left.1))?;
                let t2 = ctx.with(&right.0, (**tb).clone(), |ctx| self.synth(ctx, inner, &right.1))?;
                self.branch_join("FG-case", e, &t1, &t2, ts.label)
            }
            FgExpr::If(c, t, f) => {
                let tc = self.synth(ctx, pc, c)?;
                if tc.body != FgUnlabeled::Bool {
                    return Err(self.mismatch("FG-if", e, format!("expected a boolean, found {}", self.show(&tc))));
                }
                let inner = lat.lub(pc, tc.label);
                let t1 = self.synth(ctx, inner, t)?;
                let t2 = self.synth(ctx, inner, f)?;
                self.branch_join("FG-if", e, &t1, &t2, tc.label)
            }
            // Reconstructed: allocation is a write at the new cell's label, so
            // the cell type must be protected at pc. An unannotated cell takes
            // the initializer's type raised to pc, the least such choice up to
            // the invariance of references.
            FgExpr::New { init, cell } => {
                let t = self.synth(ctx, pc, init)?;
                let cell = match cell {
                    Some(cell) => {
                        self.expect_sub("FG-ref", e, &t, cell)?;
                        cell.clone()
                    }
                    None => self.raise(&t, pc),
                };
                let cell = &cell;
                if !self.protected(cell, pc) {
                    return Err(TypeError::new(
                        "FG-ref",
                        TypeErrorKind::PcViolation,
                        format!(
                            "cell type {} is not protected at pc {} in `{}`",
                            self.show(cell),
                            lat.show(pc),
                            self.show_expr(e)
                        ),
                    ));
                }
                Ok(FgType::reference(cell.clone(), bot))
            }
            FgExpr::Deref(r) => {
                let tr = self.synth(ctx, pc, r)?;
                let FgUnlabeled::Ref(payload) = &tr.body else {
                    return Err(self.mismatch(
                        "FG-deref",
                        e,
                        format!("expected a reference, found {}", self.show(&tr)),
                    ));
                };
                Ok(self.raise(payload, tr.label))
            }
            FgExpr::Assign(r, v) => {
                let tr = self.synth(ctx, pc, r)?;
                let FgUnlabeled::Ref(payload) = &tr.body else {
                    return Err(self.mismatch(
                        "FG-assign",
                        e,
                        format!("expected a reference, found {}", self.show(&tr)),
                    ));
                };
                let tv = self.synth(ctx, pc, v)?;
                self.expect_sub("FG-assign", e, &tv, payload)?;
                let bound = lat.lub(pc, tr.label);
                if !self.protected(payload, bound) {
                    return Err(TypeError::new(
                        "FG-assign",
                        TypeErrorKind::PcViolation,
                        format!(
                            "write of {} below pc ⊔ ℓ = {} in `{}`",
                            self.show(payload),
                            lat.show(bound),
                            self.show_expr(e)
                        ),
                    ));
                }
                Ok(FgType::unit(bot))
            }
            // Reconstructed: boolean primitives join their operands' labels.
            FgExpr::BoolOp(op, a, b) => {
                let rule = match op {
                    BoolOp::And => "FG-and",
                    BoolOp::Or => "FG-or",
                };
                let ta = self.synth(ctx, pc, a)?;
                let tb = self.synth(ctx, pc, b)?;
                for t in [&ta, &tb] {
                    if t.body != FgUnlabeled::Bool {
                        return Err(self.mismatch(rule, e, format!("expected a boolean, found {}", self.show(t))));
                    }
                }
                Ok(FgType::bool(lat.lub(ta.label, tb.label)))
            }
            FgExpr::Not(a) => {
                let ta = self.synth(ctx, pc, a)?;
                if ta.body != FgUnlabeled::Bool {
                    return Err(self.mismatch("FG-not", e, format!("expected a boolean, found {}", self.show(&ta))));
                }
                Ok(ta)
            }
        }
    }

    fn branch_join(
        &self,
        rule: &'static str,
        e: &FgExpr,
        t1: &FgType,
        t2: &FgType,
        scrut_label: Label,
    ) -> Result<FgType, TypeError> {
        match self.join(t1, t2) {
            Some(t) => Ok(self.raise(&t, scrut_label)),
            None => Err(self.mismatch(
                rule,
                e,
                format!("branches have no common type: {} and {}", self.show(t1), self.show(t2)),
            )),
        }
    }
}

pub fn fg_typecheck(lattice: &Lattice, ctx: &FgCtx, pc: Label, e: &FgExpr) -> Result<FgType, TypeError> {
    FgChecker::new(lattice).check_program(ctx, pc, e)
}

pub fn fg_subtype(lattice: &Lattice, a: &FgType, b: &FgType) -> bool {
    FgChecker::new(lattice).subtype(a, b)
}

pub fn protected(lattice: &Lattice, t: &FgType, l: Label) -> bool {
    FgChecker::new(lattice).protected(t, l)
}
