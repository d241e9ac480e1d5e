//! Type-directed program generators.
//!
//! Generation works downward from a goal type: each step picks a typing rule
//! whose conclusion can be made a subtype of the goal and recursively
//! generates the premises. The node budget is split among the premises; once
//! it runs out the generator closes the derivation with the smallest
//! inhabitant of the goal. Every output is re-checked by the caller-facing
//! entry points, so a generator bug shows up as a typing failure rather than
//! a silently wrong corpus.

use ifc_core::cg::{CgChecker, CgCtx, CgExpr, CgType};
use ifc_core::fg::{FgChecker, FgCtx, FgExpr, FgType, FgUnlabeled};
use ifc_core::{Label, Lattice};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// How many times the entry points retry before giving up on a seed.
pub const ATTEMPTS: usize = 30;

/// Shared randomness and label helpers.
pub struct Source<'l> {
    pub lattice: &'l Lattice,
    pub rng: ChaCha8Rng,
    labels: Vec<Label>,
    counter: usize,
}

impl<'l> Source<'l> {
    pub fn new(lattice: &'l Lattice, seed: u64) -> Self {
        Source { lattice, rng: ChaCha8Rng::seed_from_u64(seed), labels: lattice.elements().collect(), counter: 0 }
    }

    pub fn label(&mut self) -> Label {
        *self.labels.choose(&mut self.rng).expect("lattices are nonempty")
    }

    /// A random label `l` with `l ⊑ upper`.
    pub fn label_below(&mut self, upper: Label) -> Label {
        let lat = self.lattice;
        let below: Vec<Label> = self.labels.iter().copied().filter(|l| lat.flows(*l, upper)).collect();
        *below.choose(&mut self.rng).expect("bottom is below everything")
    }

    /// A random label `l` with `lower ⊑ l`.
    pub fn label_above(&mut self, lower: Label) -> Label {
        let lat = self.lattice;
        let above: Vec<Label> = self.labels.iter().copied().filter(|l| lat.flows(lower, *l)).collect();
        *above.choose(&mut self.rng).expect("top is above everything")
    }

    /// Usually bottom, for a mix of public and secret data.
    fn label_skewed(&mut self) -> Label {
        if self.rng.random_bool(0.4) {
            self.lattice.bot()
        } else {
            self.label()
        }
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.random_bool(p)
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn fresh(&mut self, base: &str) -> String {
        self.counter += 1;
        format!("{base}{}", self.counter)
    }

    /// Split `budget` nodes into `k` nonempty parts, randomly.
    fn split(&mut self, budget: usize, k: usize) -> Vec<usize> {
        let mut parts = vec![1; k];
        for _ in k..budget.max(k) {
            let i = self.below(k);
            parts[i] += 1;
        }
        parts
    }
}

// ---------------------------------------------------------------------------
// FG
// ---------------------------------------------------------------------------

pub struct FgGen<'l> {
    pub src: Source<'l>,
    checker: FgChecker<'l>,
    /// Whether `new`, `deref` and `assign` may be chosen.
    pub stateful: bool,
}

#[derive(Clone, Copy)]
enum FgRule {
    Var,
    Intro,
    Let,
    App,
    If,
    Case,
    Proj,
    Deref,
    Assign,
    BoolOp,
    Not,
}

impl<'l> FgGen<'l> {
    pub fn new(lattice: &'l Lattice, seed: u64) -> Self {
        FgGen { src: Source::new(lattice, seed), checker: FgChecker::new(lattice), stateful: true }
    }

    /// A random type whose constructor depth is at most `depth + 1`.
    pub fn random_type(&mut self, depth: usize, refs: bool) -> FgType {
        let l = self.src.label_skewed();
        let pick = if depth == 0 { self.src.below(2) } else { self.src.below(if refs { 7 } else { 6 }) };
        match pick {
            0 => FgType::bool(l),
            1 => FgType::unit(l),
            2 => FgType::bool(l),
            3 => {
                let a = self.random_type(depth - 1, refs);
                let latent = self.src.label();
                let r = self.random_type(depth - 1, refs);
                FgType::fun(a, latent, r, l)
            }
            4 => FgType::prod(self.random_type(depth - 1, refs), self.random_type(depth - 1, refs), l),
            5 => FgType::sum(self.random_type(depth - 1, refs), self.random_type(depth - 1, refs), l),
            _ => FgType::reference(self.random_type(depth - 1, false), l),
        }
    }

    /// A random type for secrets: no references.
    pub fn secret_type(&mut self, depth: usize) -> FgType {
        self.random_type(depth, false)
    }

    fn vars(&self, ctx: &FgCtx, goal: &FgType) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for (x, _) in ctx.iter() {
            let visible = ctx.lookup(x).expect("bound");
            if self.checker.subtype(visible, goal) && !out.iter().any(|y| y == x) {
                out.push(x.to_string());
            }
        }
        out
    }

    /// Smallest term we know of with a principal type below `goal`.
    pub fn minimal(&mut self, ctx: &mut FgCtx, pc: Label, goal: &FgType) -> Option<FgExpr> {
        let vars = self.vars(ctx, goal);
        if let Some(x) = vars.choose(&mut self.src.rng) {
            if self.src.chance(0.7) {
                return Some(FgExpr::var(x));
            }
        }
        self.intro(ctx, pc, goal, 0)
    }

    /// An introduction form for `goal`'s constructor.
    fn intro(&mut self, ctx: &mut FgCtx, pc: Label, goal: &FgType, budget: usize) -> Option<FgExpr> {
        let lat = self.src.lattice;
        match &goal.body {
            FgUnlabeled::Bool => Some(FgExpr::Bool(self.src.chance(0.5))),
            FgUnlabeled::Unit => Some(FgExpr::Unit),
            FgUnlabeled::Fun(a, latent, r) => {
                let x = self.src.fresh("x");
                let body = ctx.with(&x, (**a).clone(), |ctx| self.expr(ctx, *latent, r, budget.saturating_sub(1)))?;
                Some(FgExpr::lam(x, (**a).clone(), *latent, body))
            }
            FgUnlabeled::Prod(a, b) => {
                let parts = self.src.split(budget.saturating_sub(1), 2);
                Some(FgExpr::pair(self.expr(ctx, pc, a, parts[0])?, self.expr(ctx, pc, b, parts[1])?))
            }
            FgUnlabeled::Sum(a, b) => {
                let n = budget.saturating_sub(1);
                if self.src.chance(0.5) {
                    Some(FgExpr::inl((**a).clone(), (**b).clone(), self.expr(ctx, pc, a, n)?))
                } else {
                    Some(FgExpr::inr((**a).clone(), (**b).clone(), self.expr(ctx, pc, b, n)?))
                }
            }
            FgUnlabeled::Ref(cell) => {
                if !self.stateful || !lat.flows(pc, cell.label) {
                    return None;
                }
                let init = self.expr(ctx, pc, cell, budget.saturating_sub(1))?;
                Some(FgExpr::new_ref(init, (**cell).clone()))
            }
        }
    }

    /// A term of at most roughly `budget` nodes whose type is below `goal`.
    pub fn expr(&mut self, ctx: &mut FgCtx, pc: Label, goal: &FgType, budget: usize) -> Option<FgExpr> {
        if budget <= 1 {
            return self.minimal(ctx, pc, goal);
        }
        for _ in 0..2 {
            let rule = self.pick_rule(goal);
            if let Some(e) = self.apply(rule, ctx, pc, goal, budget) {
                return Some(e);
            }
        }
        self.minimal(ctx, pc, goal)
    }

    fn pick_rule(&mut self, goal: &FgType) -> FgRule {
        let mut table: Vec<(FgRule, u32)> = vec![
            (FgRule::Var, 3),
            (FgRule::Intro, 3),
            (FgRule::Let, 3),
            (FgRule::App, 1),
            (FgRule::If, 2),
            (FgRule::Case, 2),
            (FgRule::Proj, 1),
        ];
        if self.stateful {
            table.push((FgRule::Deref, 2));
            if goal.body == FgUnlabeled::Unit {
                table.push((FgRule::Assign, 6));
            }
        }
        if goal.body == FgUnlabeled::Bool {
            table.push((FgRule::BoolOp, 2));
            table.push((FgRule::Not, 1));
        }
        let total: u32 = table.iter().map(|(_, w)| w).sum();
        let mut roll = self.src.rng.random_range(0..total);
        for (rule, w) in table {
            if roll < w {
                return rule;
            }
            roll -= w;
        }
        unreachable!()
    }

    fn apply(&mut self, rule: FgRule, ctx: &mut FgCtx, pc: Label, goal: &FgType, budget: usize) -> Option<FgExpr> {
        let lat = self.src.lattice;
        let n = budget - 1;
        match rule {
            FgRule::Var => self.vars(ctx, goal).choose(&mut self.src.rng).map(FgExpr::var),
            FgRule::Intro => self.intro(ctx, pc, goal, budget),
            FgRule::Let => {
                let t = self.random_type(1, self.stateful);
                let latent = self.src.label_above(pc);
                let x = self.src.fresh("x");
                let parts = self.src.split(n.saturating_sub(1), 2);
                let arg = self.expr(ctx, pc, &t, parts[0])?;
                let body = ctx.with(&x, t.clone(), |ctx| self.expr(ctx, latent, goal, parts[1]))?;
                Some(FgExpr::app(FgExpr::lam(x, t, latent, body), arg))
            }
            FgRule::App => {
                let arg_ty = self.random_type(1, self.stateful);
                let fl = self.src.label_below(goal.label);
                let latent = self.src.label_above(lat.lub(pc, fl));
                let fun_ty = FgType::fun(arg_ty.clone(), latent, goal.clone(), fl);
                let parts = self.src.split(n, 2);
                Some(FgExpr::app(self.expr(ctx, pc, &fun_ty, parts[0])?, self.expr(ctx, pc, &arg_ty, parts[1])?))
            }
            FgRule::If => {
                let lc = self.src.label_below(goal.label);
                let inner = lat.lub(pc, lc);
                let parts = self.src.split(n, 3);
                let c = self.expr(ctx, pc, &FgType::bool(lc), parts[0])?;
                let t = self.expr(ctx, inner, goal, parts[1])?;
                let f = self.expr(ctx, inner, goal, parts[2])?;
                Some(FgExpr::if_(c, t, f))
            }
            FgRule::Case => {
                let ls = self.src.label_below(goal.label);
                let (a, b) = (self.random_type(1, self.stateful), self.random_type(1, self.stateful));
                let sum = FgType::sum(a.clone(), b.clone(), ls);
                let inner = lat.lub(pc, ls);
                let parts = self.src.split(n, 3);
                let scrut = self.expr(ctx, pc, &sum, parts[0])?;
                let (x, y) = (self.src.fresh("x"), self.src.fresh("y"));
                let left = ctx.with(&x, a, |ctx| self.expr(ctx, inner, goal, parts[1]))?;
                let right = ctx.with(&y, b, |ctx| self.expr(ctx, inner, goal, parts[2]))?;
                Some(FgExpr::case(scrut, x, left, y, right))
            }
            FgRule::Proj => {
                let lp = self.src.label_below(goal.label);
                let other = self.random_type(1, self.stateful);
                if self.src.chance(0.5) {
                    let p = self.expr(ctx, pc, &FgType::prod(goal.clone(), other, lp), n)?;
                    Some(FgExpr::fst(p))
                } else {
                    let p = self.expr(ctx, pc, &FgType::prod(other, goal.clone(), lp), n)?;
                    Some(FgExpr::snd(p))
                }
            }
            FgRule::Deref => {
                let lr = self.src.label_below(goal.label);
                let cell = goal.with_label(self.src.label_below(goal.label));
                if cell.contains_ref() {
                    return None;
                }
                let r = self.expr(ctx, pc, &FgType::reference(cell, lr), n)?;
                Some(FgExpr::deref(r))
            }
            FgRule::Assign => {
                let lr = self.src.label_skewed();
                let cell = self.random_type(1, false);
                let cell = cell.with_label(self.src.label_above(lat.lub(pc, lr)));
                let parts = self.src.split(n, 2);
                let r = self.expr(ctx, pc, &FgType::reference(cell.clone(), lr), parts[0])?;
                let v = self.expr(ctx, pc, &cell, parts[1])?;
                Some(FgExpr::assign(r, v))
            }
            FgRule::BoolOp => {
                let parts = self.src.split(n, 2);
                let a = self.expr(ctx, pc, goal, parts[0])?;
                let b = self.expr(ctx, pc, goal, parts[1])?;
                Some(if self.src.chance(0.5) { FgExpr::and(a, b) } else { FgExpr::or(a, b) })
            }
            FgRule::Not => Some(FgExpr::not(self.expr(ctx, pc, goal, n)?)),
        }
    }

    /// Generate a program of at most `size` nodes whose principal type under
    /// `(ctx, pc)` is below `goal`; `None` if every attempt failed.
    pub fn program(&mut self, ctx: &FgCtx, pc: Label, goal: &FgType, size: usize) -> Option<FgExpr> {
        for _ in 0..ATTEMPTS {
            let mut c = ctx.clone();
            let target = 1 + self.src.below(size.max(1));
            let Some(e) = self.expr(&mut c, pc, goal, target) else { continue };
            if e.size() > size {
                continue;
            }
            match self.checker.check_program(ctx, pc, &e) {
                Ok(t) if self.checker.subtype(&t, goal) => return Some(e),
                Ok(_) | Err(_) => panic!(
                    "generator produced an ill-typed program: {}",
                    ifc_core::surface::Printer::new(self.src.lattice).fg_expr_flat(&e)
                ),
            }
        }
        None
    }

    /// A closed value expression of type `t` (which must be reference-free).
    pub fn value(&mut self, t: &FgType) -> FgExpr {
        match &t.body {
            FgUnlabeled::Bool => FgExpr::Bool(self.src.chance(0.5)),
            FgUnlabeled::Unit => FgExpr::Unit,
            FgUnlabeled::Prod(a, b) => FgExpr::pair(self.value(a), self.value(b)),
            FgUnlabeled::Sum(a, b) => {
                if self.src.chance(0.5) {
                    FgExpr::inl((**a).clone(), (**b).clone(), self.value(a))
                } else {
                    FgExpr::inr((**a).clone(), (**b).clone(), self.value(b))
                }
            }
            FgUnlabeled::Fun(a, latent, r) => {
                let x = self.src.fresh("s");
                let mut ctx = FgCtx::new();
                ctx.push(x.clone(), (**a).clone());
                let stateful = std::mem::replace(&mut self.stateful, false);
                let budget = 1 + self.src.below(6);
                let body = self.expr(&mut ctx, *latent, r, budget).unwrap_or_else(|| self.value(r));
                self.stateful = stateful;
                FgExpr::lam(x, (**a).clone(), *latent, body)
            }
            FgUnlabeled::Ref(_) => panic!("secret values must be reference-free"),
        }
    }
}

// ---------------------------------------------------------------------------
// CG
// ---------------------------------------------------------------------------

pub struct CgGen<'l> {
    pub src: Source<'l>,
    checker: CgChecker<'l>,
    pub stateful: bool,
}

#[derive(Clone, Copy)]
enum CgRule {
    Var,
    Intro,
    Let,
    App,
    If,
    Case,
    Proj,
    Bind,
    Unlabel,
    ToLabeled,
    Deref,
    Assign,
    BoolOp,
}

impl<'l> CgGen<'l> {
    pub fn new(lattice: &'l Lattice, seed: u64) -> Self {
        CgGen { src: Source::new(lattice, seed), checker: CgChecker::new(lattice), stateful: true }
    }

    pub fn random_type(&mut self, depth: usize, refs: bool) -> CgType {
        let pick = if depth == 0 { self.src.below(2) } else { self.src.below(if refs { 9 } else { 8 }) };
        let sub = |g: &mut Self| g.random_type(depth - 1, refs);
        match pick {
            0 => CgType::Bool,
            1 => CgType::Unit,
            2 => CgType::fun(sub(self), sub(self)),
            3 => CgType::prod(sub(self), sub(self)),
            4 => CgType::sum(sub(self), sub(self)),
            5 | 6 => {
                let l = self.src.label_skewed();
                CgType::labeled(l, sub(self))
            }
            7 => {
                let (p, t) = (self.src.label(), self.src.label_skewed());
                CgType::slio(p, t, sub(self))
            }
            _ => {
                let l = self.src.label_skewed();
                CgType::reference(l, self.random_type(depth - 1, false))
            }
        }
    }

    /// Reference-free payloads for secrets.
    pub fn secret_type(&mut self, depth: usize) -> CgType {
        self.random_type(depth, false)
    }

    fn vars(&self, ctx: &CgCtx, goal: &CgType) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for (x, _) in ctx.iter() {
            let visible = ctx.lookup(x).expect("bound");
            if self.checker.subtype(visible, goal) && !out.iter().any(|y| y == x) {
                out.push(x.to_string());
            }
        }
        out
    }

    pub fn minimal(&mut self, ctx: &mut CgCtx, goal: &CgType) -> Option<CgExpr> {
        let vars = self.vars(ctx, goal);
        if let Some(x) = vars.choose(&mut self.src.rng) {
            if self.src.chance(0.7) {
                return Some(CgExpr::var(x));
            }
        }
        self.intro(ctx, goal, 0)
    }

    fn intro(&mut self, ctx: &mut CgCtx, goal: &CgType, budget: usize) -> Option<CgExpr> {
        let lat = self.src.lattice;
        let n = budget.saturating_sub(1);
        match goal {
            CgType::Bool => Some(CgExpr::Bool(self.src.chance(0.5))),
            CgType::Unit => Some(CgExpr::Unit),
            CgType::Fun(a, r) => {
                let x = self.src.fresh("x");
                let body = ctx.with(&x, (**a).clone(), |ctx| self.expr(ctx, r, n))?;
                Some(CgExpr::lam(x, (**a).clone(), body))
            }
            CgType::Prod(a, b) => {
                let parts = self.src.split(n, 2);
                Some(CgExpr::pair(self.expr(ctx, a, parts[0])?, self.expr(ctx, b, parts[1])?))
            }
            CgType::Sum(a, b) => {
                if self.src.chance(0.5) {
                    Some(CgExpr::inl((**a).clone(), (**b).clone(), self.expr(ctx, a, n)?))
                } else {
                    Some(CgExpr::inr((**a).clone(), (**b).clone(), self.expr(ctx, b, n)?))
                }
            }
            CgType::Labeled(l, t) => {
                let l2 = self.src.label_below(*l);
                Some(CgExpr::label(l2, self.expr(ctx, t, n)?))
            }
            CgType::Ref(..) => None,
            CgType::Slio(pc, _, payload) => match &**payload {
                CgType::Ref(l, cell) if self.stateful && lat.flows(*pc, *l) => {
                    let init = self.expr(ctx, &CgType::labeled(*l, (**cell).clone()), n)?;
                    Some(CgExpr::new_ref(init, *l, (**cell).clone()))
                }
                CgType::Ref(..) => None,
                _ => Some(CgExpr::ret(self.expr(ctx, payload, n)?)),
            },
        }
    }

    pub fn expr(&mut self, ctx: &mut CgCtx, goal: &CgType, budget: usize) -> Option<CgExpr> {
        if budget <= 1 {
            return self.minimal(ctx, goal);
        }
        for _ in 0..2 {
            let rule = self.pick_rule(goal);
            if let Some(e) = self.apply(rule, ctx, goal, budget) {
                return Some(e);
            }
        }
        self.minimal(ctx, goal)
    }

    fn pick_rule(&mut self, goal: &CgType) -> CgRule {
        let mut table: Vec<(CgRule, u32)> = vec![
            (CgRule::Var, 3),
            (CgRule::Intro, 3),
            (CgRule::Let, 2),
            (CgRule::App, 1),
            (CgRule::If, 1),
            (CgRule::Case, 1),
            (CgRule::Proj, 1),
        ];
        if let CgType::Slio(_, _, payload) = goal {
            table.push((CgRule::Bind, 6));
            table.push((CgRule::Unlabel, 3));
            if matches!(**payload, CgType::Labeled(..)) {
                table.push((CgRule::ToLabeled, 3));
            }
            if self.stateful {
                table.push((CgRule::Deref, 2));
                if **payload == CgType::Unit {
                    table.push((CgRule::Assign, 5));
                }
            }
        }
        if *goal == CgType::Bool {
            table.push((CgRule::BoolOp, 2));
        }
        let total: u32 = table.iter().map(|(_, w)| w).sum();
        let mut roll = self.src.rng.random_range(0..total);
        for (rule, w) in table {
            if roll < w {
                return rule;
            }
            roll -= w;
        }
        unreachable!()
    }

    fn apply(&mut self, rule: CgRule, ctx: &mut CgCtx, goal: &CgType, budget: usize) -> Option<CgExpr> {
        let lat = self.src.lattice;
        let n = budget - 1;
        match rule {
            CgRule::Var => self.vars(ctx, goal).choose(&mut self.src.rng).map(CgExpr::var),
            CgRule::Intro => self.intro(ctx, goal, budget),
            CgRule::Let => {
                let t = self.random_type(1, self.stateful);
                let x = self.src.fresh("x");
                let parts = self.src.split(n.saturating_sub(1), 2);
                let arg = self.expr(ctx, &t, parts[0])?;
                let body = ctx.with(&x, t.clone(), |ctx| self.expr(ctx, goal, parts[1]))?;
                Some(CgExpr::app(CgExpr::lam(x, t, body), arg))
            }
            CgRule::App => {
                let arg_ty = self.random_type(1, self.stateful);
                let parts = self.src.split(n, 2);
                let f = self.expr(ctx, &CgType::fun(arg_ty.clone(), goal.clone()), parts[0])?;
                Some(CgExpr::app(f, self.expr(ctx, &arg_ty, parts[1])?))
            }
            CgRule::If => {
                let parts = self.src.split(n, 3);
                let c = self.expr(ctx, &CgType::Bool, parts[0])?;
                Some(CgExpr::if_(c, self.expr(ctx, goal, parts[1])?, self.expr(ctx, goal, parts[2])?))
            }
            CgRule::Case => {
                let (a, b) = (self.random_type(1, self.stateful), self.random_type(1, self.stateful));
                let parts = self.src.split(n, 3);
                let scrut = self.expr(ctx, &CgType::sum(a.clone(), b.clone()), parts[0])?;
                let (x, y) = (self.src.fresh("x"), self.src.fresh("y"));
                let left = ctx.with(&x, a, |ctx| self.expr(ctx, goal, parts[1]))?;
                let right = ctx.with(&y, b, |ctx| self.expr(ctx, goal, parts[2]))?;
                Some(CgExpr::case(scrut, x, left, y, right))
            }
            CgRule::Proj => {
                let other = self.random_type(1, self.stateful);
                if self.src.chance(0.5) {
                    Some(CgExpr::fst(self.expr(ctx, &CgType::prod(goal.clone(), other), n)?))
                } else {
                    Some(CgExpr::snd(self.expr(ctx, &CgType::prod(other, goal.clone()), n)?))
                }
            }
            CgRule::Bind => {
                let CgType::Slio(pc, taint, payload) = goal else { return None };
                let t1 = self.src.label_below(*taint);
                let p1 = self.src.label_above(*pc);
                let p3 = self.src.label_above(lat.lub(*pc, t1));
                let t3 = self.src.label_below(*taint);
                let mid = self.random_type(1, self.stateful);
                let parts = self.src.split(n, 2);
                let first = self.expr(ctx, &CgType::slio(p1, t1, mid.clone()), parts[0])?;
                let x = self.src.fresh("x");
                let second = CgType::slio(p3, t3, (**payload).clone());
                let body = ctx.with(&x, mid, |ctx| self.expr(ctx, &second, parts[1]))?;
                Some(CgExpr::bind(first, x, body))
            }
            CgRule::Unlabel => {
                let CgType::Slio(_, taint, payload) = goal else { return None };
                let l = self.src.label_below(*taint);
                Some(CgExpr::unlabel(self.expr(ctx, &CgType::labeled(l, (**payload).clone()), n)?))
            }
            CgRule::ToLabeled => {
                let CgType::Slio(pc, _, payload) = goal else { return None };
                let CgType::Labeled(l, inner) = &**payload else { return None };
                let m = self.expr(ctx, &CgType::slio(*pc, *l, (**inner).clone()), n)?;
                Some(CgExpr::to_labeled(m))
            }
            CgRule::Deref => {
                let CgType::Slio(_, _, payload) = goal else { return None };
                let CgType::Labeled(l, cell) = &**payload else { return None };
                if cell.contains_ref() {
                    return None;
                }
                let lr = self.src.label_below(*l);
                Some(CgExpr::deref(self.expr(ctx, &CgType::reference(lr, (**cell).clone()), n)?))
            }
            CgRule::Assign => {
                let CgType::Slio(pc, _, _) = goal else { return None };
                let l = self.src.label_above(*pc);
                let cell = self.random_type(1, false);
                let parts = self.src.split(n, 2);
                let r = self.expr(ctx, &CgType::reference(l, cell.clone()), parts[0])?;
                let v = self.expr(ctx, &CgType::labeled(l, cell), parts[1])?;
                Some(CgExpr::assign(r, v))
            }
            CgRule::BoolOp => {
                let parts = self.src.split(n, 2);
                let a = self.expr(ctx, goal, parts[0])?;
                let b = self.expr(ctx, goal, parts[1])?;
                Some(match self.src.below(3) {
                    0 => CgExpr::and(a, b),
                    1 => CgExpr::or(a, b),
                    _ => CgExpr::not(a),
                })
            }
        }
    }

    pub fn program(&mut self, ctx: &CgCtx, goal: &CgType, size: usize) -> Option<CgExpr> {
        for _ in 0..ATTEMPTS {
            let mut c = ctx.clone();
            let target = 1 + self.src.below(size.max(1));
            let Some(e) = self.expr(&mut c, goal, target) else { continue };
            if e.size() > size {
                continue;
            }
            match self.checker.check_program(ctx, &e) {
                Ok(t) if self.checker.subtype(&t, goal) => return Some(e),
                Ok(_) | Err(_) => panic!(
                    "generator produced an ill-typed program: {}",
                    ifc_core::surface::Printer::new(self.src.lattice).cg_expr_flat(&e)
                ),
            }
        }
        None
    }

    /// A closed, pure value expression of type `t` (reference-free).
    pub fn value(&mut self, t: &CgType) -> CgExpr {
        match t {
            CgType::Bool => CgExpr::Bool(self.src.chance(0.5)),
            CgType::Unit => CgExpr::Unit,
            CgType::Prod(a, b) => CgExpr::pair(self.value(a), self.value(b)),
            CgType::Sum(a, b) => {
                if self.src.chance(0.5) {
                    CgExpr::inl((**a).clone(), (**b).clone(), self.value(a))
                } else {
                    CgExpr::inr((**a).clone(), (**b).clone(), self.value(b))
                }
            }
            CgType::Labeled(l, a) => CgExpr::label(*l, self.value(a)),
            CgType::Fun(..) | CgType::Slio(..) => {
                let stateful = std::mem::replace(&mut self.stateful, false);
                let budget = 1 + self.src.below(6);
                let e = self.expr(&mut CgCtx::new(), t, budget);
                self.stateful = stateful;
                match e {
                    Some(e) => e,
                    None => self.value_fallback(t),
                }
            }
            CgType::Ref(..) => panic!("secret values must be reference-free"),
        }
    }

    fn value_fallback(&mut self, t: &CgType) -> CgExpr {
        match t {
            CgType::Fun(a, r) => {
                let x = self.src.fresh("s");
                CgExpr::lam(x, (**a).clone(), self.value_fallback(r))
            }
            CgType::Slio(_, _, a) => CgExpr::ret(self.value_fallback(a)),
            other => self.value(other),
        }
    }
}

/// Generate one closed or open FG program (see [`FgGen::program`]).
pub fn gen_fg_program(
    lattice: &Lattice,
    ctx: &FgCtx,
    pc: Label,
    goal: &FgType,
    size: usize,
    seed: u64,
) -> Option<FgExpr> {
    FgGen::new(lattice, seed).program(ctx, pc, goal, size)
}

pub fn gen_cg_program(lattice: &Lattice, ctx: &CgCtx, goal: &CgType, size: usize, seed: u64) -> Option<CgExpr> {
    CgGen::new(lattice, seed).program(ctx, goal, size)
}
