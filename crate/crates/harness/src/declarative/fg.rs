//! Declarative derivation search for FG over the two-point lattice.

use std::collections::HashMap;
use std::rc::Rc;

use ifc_core::fg::{BoolOp, FgChecker, FgCtx, FgExpr, FgType, FgUnlabeled};
use ifc_core::surface::Printer;
use ifc_core::{Label, Lattice};

use super::{close_up, standing, Agreement, BitSet, Pol, Standing, MAX_POSITIONS};

pub type Id = u32;

/// A hash-consed FG expression node; children are arena ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FgNode {
    Var(String),
    Unit,
    Bool(bool),
    Lam { param: String, ty: FgType, latent: Label, body: Id },
    App(Id, Id),
    Pair(Id, Id),
    Fst(Id),
    Snd(Id),
    Inl { left: FgType, right: FgType, expr: Id },
    Inr { left: FgType, right: FgType, expr: Id },
    Case { scrut: Id, x: String, left: Id, y: String, right: Id },
    If(Id, Id, Id),
    New { init: Id, cell: Option<FgType> },
    Deref(Id),
    Assign(Id, Id),
    Op(BoolOp, Id, Id),
    Not(Id),
}

#[derive(Default)]
pub struct FgArena {
    nodes: Vec<FgNode>,
    sizes: Vec<u32>,
    index: HashMap<FgNode, Id>,
}

impl FgArena {
    pub fn new() -> Self {
        FgArena::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn get(&self, id: Id) -> &FgNode {
        &self.nodes[id as usize]
    }

    pub fn size(&self, id: Id) -> usize {
        self.sizes[id as usize] as usize
    }

    pub fn intern(&mut self, node: FgNode) -> Id {
        if let Some(id) = self.index.get(&node) {
            return *id;
        }
        let s = |i: &Id| self.sizes[*i as usize];
        let size = 1 + match &node {
            FgNode::Var(_) | FgNode::Unit | FgNode::Bool(_) => 0,
            FgNode::Lam { body: a, .. }
            | FgNode::Fst(a)
            | FgNode::Snd(a)
            | FgNode::Inl { expr: a, .. }
            | FgNode::Inr { expr: a, .. }
            | FgNode::New { init: a, .. }
            | FgNode::Deref(a)
            | FgNode::Not(a) => s(a),
            FgNode::App(a, b) | FgNode::Pair(a, b) | FgNode::Assign(a, b) | FgNode::Op(_, a, b) => s(a) + s(b),
            FgNode::If(a, b, c) | FgNode::Case { scrut: a, left: b, right: c, .. } => s(a) + s(b) + s(c),
        };
        let id = self.nodes.len() as Id;
        self.nodes.push(node.clone());
        self.sizes.push(size);
        self.index.insert(node, id);
        id
    }

    pub fn from_expr(&mut self, e: &FgExpr) -> Id {
        let node = match e {
            FgExpr::Var(x) => FgNode::Var(x.clone()),
            FgExpr::Unit => FgNode::Unit,
            FgExpr::Bool(b) => FgNode::Bool(*b),
            FgExpr::Lam { param, param_ty, latent, body } => {
                let body = self.from_expr(body);
                FgNode::Lam { param: param.clone(), ty: param_ty.clone(), latent: *latent, body }
            }
            FgExpr::App(a, b) => FgNode::App(self.from_expr(a), self.from_expr(b)),
            FgExpr::Pair(a, b) => FgNode::Pair(self.from_expr(a), self.from_expr(b)),
            FgExpr::Fst(a) => FgNode::Fst(self.from_expr(a)),
            FgExpr::Snd(a) => FgNode::Snd(self.from_expr(a)),
            FgExpr::Inl { left, right, expr } => {
                FgNode::Inl { left: left.clone(), right: right.clone(), expr: self.from_expr(expr) }
            }
            FgExpr::Inr { left, right, expr } => {
                FgNode::Inr { left: left.clone(), right: right.clone(), expr: self.from_expr(expr) }
            }
            FgExpr::Case { scrut, left, right } => FgNode::Case {
                scrut: self.from_expr(scrut),
                x: left.0.clone(),
                left: self.from_expr(&left.1),
                y: right.0.clone(),
                right: self.from_expr(&right.1),
            },
            FgExpr::If(a, b, c) => FgNode::If(self.from_expr(a), self.from_expr(b), self.from_expr(c)),
            FgExpr::New { init, cell } => FgNode::New { init: self.from_expr(init), cell: cell.clone() },
            FgExpr::Deref(a) => FgNode::Deref(self.from_expr(a)),
            FgExpr::Assign(a, b) => FgNode::Assign(self.from_expr(a), self.from_expr(b)),
            FgExpr::BoolOp(op, a, b) => FgNode::Op(*op, self.from_expr(a), self.from_expr(b)),
            FgExpr::Not(a) => FgNode::Not(self.from_expr(a)),
        };
        self.intern(node)
    }

    pub fn to_expr(&self, id: Id) -> FgExpr {
        let e = |i: &Id| Box::new(self.to_expr(*i));
        match self.get(id) {
            FgNode::Var(x) => FgExpr::Var(x.clone()),
            FgNode::Unit => FgExpr::Unit,
            FgNode::Bool(b) => FgExpr::Bool(*b),
            FgNode::Lam { param, ty, latent, body } => {
                FgExpr::Lam { param: param.clone(), param_ty: ty.clone(), latent: *latent, body: e(body) }
            }
            FgNode::App(a, b) => FgExpr::App(e(a), e(b)),
            FgNode::Pair(a, b) => FgExpr::Pair(e(a), e(b)),
            FgNode::Fst(a) => FgExpr::Fst(e(a)),
            FgNode::Snd(a) => FgExpr::Snd(e(a)),
            FgNode::Inl { left, right, expr } => {
                FgExpr::Inl { left: left.clone(), right: right.clone(), expr: e(expr) }
            }
            FgNode::Inr { left, right, expr } => {
                FgExpr::Inr { left: left.clone(), right: right.clone(), expr: e(expr) }
            }
            FgNode::Case { scrut, x, left, y, right } => {
                FgExpr::Case { scrut: e(scrut), left: (x.clone(), e(left)), right: (y.clone(), e(right)) }
            }
            FgNode::If(a, b, c) => FgExpr::If(e(a), e(b), e(c)),
            FgNode::New { init, cell } => FgExpr::New { init: e(init), cell: cell.clone() },
            FgNode::Deref(a) => FgExpr::Deref(e(a)),
            FgNode::Assign(a, b) => FgExpr::Assign(e(a), e(b)),
            FgNode::Op(op, a, b) => FgExpr::BoolOp(*op, e(a), e(b)),
            FgNode::Not(a) => FgExpr::Not(e(a)),
        }
    }
}

/// A type shape: a type with every label erased to ⊥, its label positions
/// and their variances.
#[derive(Debug)]
pub struct Shape {
    pub skeleton: FgType,
    pub pols: Vec<Pol>,
}

/// The set of types a term can be given, as masks over its shape.
#[derive(Debug)]
pub struct Derivable {
    pub shape: Rc<Shape>,
    pub set: BitSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutOfBounds;

type Found = Result<Option<Rc<Derivable>>, OutOfBounds>;

fn pols(t: &FgType, p: Pol, out: &mut Vec<Pol>) {
    out.push(p);
    match &t.body {
        FgUnlabeled::Bool | FgUnlabeled::Unit => {}
        FgUnlabeled::Fun(a, _, b) => {
            pols(a, p.flip(), out);
            out.push(p.flip());
            pols(b, p, out);
        }
        FgUnlabeled::Prod(a, b) | FgUnlabeled::Sum(a, b) => {
            pols(a, p, out);
            pols(b, p, out);
        }
        FgUnlabeled::Ref(a) => pols(a, Pol::Inv, out),
    }
}

pub struct FgOracle<'l> {
    lattice: &'l Lattice,
    bot: Label,
    top: Label,
    shapes: HashMap<FgType, Rc<Shape>>,
    ctxs: HashMap<Vec<(String, FgType)>, u32>,
    ctx_list: Vec<Vec<(String, FgType)>>,
    memo: HashMap<(Id, u32, Label), Found>,
}

impl<'l> FgOracle<'l> {
    /// Panics unless `lattice` has exactly two elements.
    pub fn new(lattice: &'l Lattice) -> Self {
        assert_eq!(lattice.size(), 2, "the declarative oracle works over the two-point lattice");
        FgOracle {
            lattice,
            bot: lattice.bot(),
            top: lattice.top(),
            shapes: HashMap::new(),
            ctxs: HashMap::new(),
            ctx_list: Vec::new(),
            memo: HashMap::new(),
        }
    }

    /// Forget memoized results.
    pub fn clear(&mut self) {
        self.memo.clear();
    }

    fn erase(&self, t: &FgType) -> FgType {
        let body = match &t.body {
            FgUnlabeled::Bool => FgUnlabeled::Bool,
            FgUnlabeled::Unit => FgUnlabeled::Unit,
            FgUnlabeled::Fun(a, _, b) => FgUnlabeled::Fun(Box::new(self.erase(a)), self.bot, Box::new(self.erase(b))),
            FgUnlabeled::Prod(a, b) => FgUnlabeled::Prod(Box::new(self.erase(a)), Box::new(self.erase(b))),
            FgUnlabeled::Sum(a, b) => FgUnlabeled::Sum(Box::new(self.erase(a)), Box::new(self.erase(b))),
            FgUnlabeled::Ref(a) => FgUnlabeled::Ref(Box::new(self.erase(a))),
        };
        FgType::new(body, self.bot)
    }

    pub fn shape_of(&mut self, t: &FgType) -> Result<Rc<Shape>, OutOfBounds> {
        let skeleton = self.erase(t);
        if let Some(s) = self.shapes.get(&skeleton) {
            return Ok(s.clone());
        }
        let mut p = Vec::new();
        pols(&skeleton, Pol::Co, &mut p);
        if p.len() > MAX_POSITIONS {
            return Err(OutOfBounds);
        }
        let s = Rc::new(Shape { skeleton: skeleton.clone(), pols: p });
        self.shapes.insert(skeleton, s.clone());
        Ok(s)
    }

    pub fn encode(&self, t: &FgType) -> usize {
        let mut labels = Vec::new();
        t.labels(&mut labels);
        labels.iter().enumerate().filter(|(_, l)| **l == self.top).map(|(i, _)| 1 << i).sum()
    }

    pub fn decode(&self, shape: &Shape, mask: usize) -> FgType {
        let mut i = 0;
        self.relabel(&shape.skeleton, mask, &mut i)
    }

    fn relabel(&self, t: &FgType, mask: usize, i: &mut usize) -> FgType {
        let mut next = || {
            let l = if mask >> *i & 1 == 1 { self.top } else { self.bot };
            *i += 1;
            l
        };
        let label = next();
        let body = match &t.body {
            FgUnlabeled::Bool => FgUnlabeled::Bool,
            FgUnlabeled::Unit => FgUnlabeled::Unit,
            FgUnlabeled::Fun(a, _, b) => {
                let a = self.relabel(a, mask, i);
                let latent = if mask >> *i & 1 == 1 { self.top } else { self.bot };
                *i += 1;
                FgUnlabeled::Fun(Box::new(a), latent, Box::new(self.relabel(b, mask, i)))
            }
            FgUnlabeled::Prod(a, b) => {
                let a = self.relabel(a, mask, i);
                FgUnlabeled::Prod(Box::new(a), Box::new(self.relabel(b, mask, i)))
            }
            FgUnlabeled::Sum(a, b) => {
                let a = self.relabel(a, mask, i);
                FgUnlabeled::Sum(Box::new(a), Box::new(self.relabel(b, mask, i)))
            }
            FgUnlabeled::Ref(a) => FgUnlabeled::Ref(Box::new(self.relabel(a, mask, i))),
        };
        FgType::new(body, label)
    }

    fn members<'a>(&'a self, d: &'a Derivable) -> impl Iterator<Item = FgType> + 'a {
        d.set.iter().map(move |m| self.decode(&d.shape, m))
    }

    fn contains(&self, d: &Derivable, t: &FgType) -> bool {
        self.erase(t) == d.shape.skeleton && d.set.contains(self.encode(t))
    }

    /// Build the upward-closed set generated by `types`, which must share a
    /// shape.
    fn collect(&mut self, types: Vec<FgType>) -> Found {
        let Some(first) = types.first() else { return Ok(None) };
        let shape = self.shape_of(first)?;
        let mut set = BitSet::new(1 << shape.pols.len());
        for t in &types {
            debug_assert_eq!(self.erase(t), shape.skeleton);
            set.insert(self.encode(t));
        }
        close_up(&mut set, &shape.pols);
        Ok(Some(Rc::new(Derivable { shape, set })))
    }

    fn ctx_id(&mut self, ctx: &[(String, FgType)]) -> u32 {
        if let Some(id) = self.ctxs.get(ctx) {
            return *id;
        }
        let id = self.ctx_list.len() as u32;
        self.ctx_list.push(ctx.to_vec());
        self.ctxs.insert(ctx.to_vec(), id);
        id
    }

    fn extend(&mut self, ctx: u32, x: &str, t: FgType) -> u32 {
        let mut c = self.ctx_list[ctx as usize].clone();
        c.push((x.to_string(), t));
        self.ctx_id(&c)
    }

    fn flows(&self, a: Label, b: Label) -> bool {
        self.lattice.flows(a, b)
    }

    fn lub(&self, a: Label, b: Label) -> Label {
        self.lattice.lub(a, b)
    }

    /// Every type `e` can be given under `ctx` at `pc`, or `None` if none.
    pub fn derive(&mut self, arena: &FgArena, id: Id, ctx: &FgCtx, pc: Label) -> Found {
        let entries: Vec<(String, FgType)> = ctx.iter().map(|(x, t)| (x.to_string(), t.clone())).collect();
        let c = self.ctx_id(&entries);
        self.go(arena, id, c, pc)
    }

    fn go(&mut self, arena: &FgArena, id: Id, ctx: u32, pc: Label) -> Found {
        if let Some(r) = self.memo.get(&(id, ctx, pc)) {
            return r.clone();
        }
        let r = self.rule(arena, id, ctx, pc);
        self.memo.insert((id, ctx, pc), r.clone());
        r
    }

    fn rule(&mut self, arena: &FgArena, id: Id, ctx: u32, pc: Label) -> Found {
        let bot = self.bot;
        let mut out: Vec<FgType> = Vec::new();
        match arena.get(id).clone() {
            FgNode::Var(x) => {
                if let Some((_, t)) = self.ctx_list[ctx as usize].iter().rev().find(|(y, _)| *y == x) {
                    out.push(t.clone());
                }
            }
            FgNode::Unit => out.push(FgType::unit(bot)),
            FgNode::Bool(_) => out.push(FgType::bool(bot)),
            FgNode::Lam { param, ty, latent, body } => {
                let inner = self.extend(ctx, &param, ty.clone());
                if let Some(d) = self.go(arena, body, inner, latent)? {
                    out.extend(self.members(&d).map(|r| FgType::fun(ty.clone(), latent, r, bot)));
                }
            }
            FgNode::App(f, a) => {
                if let (Some(df), Some(da)) = (self.go(arena, f, ctx, pc)?, self.go(arena, a, ctx, pc)?) {
                    for tf in self.members(&df) {
                        if let FgUnlabeled::Fun(p, le, r) = &tf.body {
                            if self.flows(self.lub(tf.label, pc), *le)
                                && self.flows(tf.label, r.label)
                                && self.contains(&da, p)
                            {
                                out.push((**r).clone());
                            }
                        }
                    }
                }
            }
            FgNode::Pair(a, b) => {
                if let (Some(da), Some(db)) = (self.go(arena, a, ctx, pc)?, self.go(arena, b, ctx, pc)?) {
                    for ta in self.members(&da) {
                        for tb in self.members(&db) {
                            out.push(FgType::prod(ta.clone(), tb, bot));
                        }
                    }
                }
            }
            FgNode::Fst(p) | FgNode::Snd(p) => {
                let first = matches!(arena.get(id), FgNode::Fst(_));
                if let Some(dp) = self.go(arena, p, ctx, pc)? {
                    for t in self.members(&dp) {
                        if let FgUnlabeled::Prod(a, b) = &t.body {
                            let c = if first { a } else { b };
                            if self.flows(t.label, c.label) {
                                out.push((**c).clone());
                            }
                        }
                    }
                }
            }
            FgNode::Inl { left, right, expr } | FgNode::Inr { left, right, expr } => {
                let is_left = matches!(arena.get(id), FgNode::Inl { .. });
                if let Some(d) = self.go(arena, expr, ctx, pc)? {
                    if self.contains(&d, if is_left { &left } else { &right }) {
                        out.push(FgType::sum(left, right, bot));
                    }
                }
            }
            FgNode::Case { scrut, x, left, y, right } => {
                if let Some(ds) = self.go(arena, scrut, ctx, pc)? {
                    let mut acc = None;
                    for t in self.members(&ds).collect::<Vec<_>>() {
                        let FgUnlabeled::Sum(a, b) = &t.body else { continue };
                        let inner = self.lub(pc, t.label);
                        let cl = self.extend(ctx, &x, (**a).clone());
                        let cr = self.extend(ctx, &y, (**b).clone());
                        let (Some(d1), Some(d2)) =
                            (self.go(arena, left, cl, inner)?, self.go(arena, right, cr, inner)?)
                        else {
                            continue;
                        };
                        self.branches(&d1, &d2, t.label, &mut acc);
                    }
                    return Ok(finish(acc));
                }
            }
            FgNode::If(c, t, f) => {
                if let Some(dc) = self.go(arena, c, ctx, pc)? {
                    let mut acc = None;
                    for tc in self.members(&dc).collect::<Vec<_>>() {
                        if tc.body != FgUnlabeled::Bool {
                            continue;
                        }
                        let inner = self.lub(pc, tc.label);
                        let (Some(d1), Some(d2)) = (self.go(arena, t, ctx, inner)?, self.go(arena, f, ctx, inner)?)
                        else {
                            continue;
                        };
                        self.branches(&d1, &d2, tc.label, &mut acc);
                    }
                    return Ok(finish(acc));
                }
            }
            FgNode::New { init, cell } => {
                if let Some(d) = self.go(arena, init, ctx, pc)? {
                    match cell {
                        Some(cell) => {
                            if self.contains(&d, &cell) && self.flows(pc, cell.label) {
                                out.push(FgType::reference(cell, bot));
                            }
                        }
                        None => {
                            for t in self.members(&d) {
                                if self.flows(pc, t.label) {
                                    out.push(FgType::reference(t, bot));
                                }
                            }
                        }
                    }
                }
            }
            FgNode::Deref(r) => {
                if let Some(d) = self.go(arena, r, ctx, pc)? {
                    for t in self.members(&d).collect::<Vec<_>>() {
                        let FgUnlabeled::Ref(payload) = &t.body else { continue };
                        // Every supertype of the payload protected at the
                        // reference's label.
                        let shape = self.shape_of(payload)?;
                        let mut up = BitSet::new(1 << shape.pols.len());
                        up.insert(self.encode(payload));
                        close_up(&mut up, &shape.pols);
                        for m in up.iter() {
                            let candidate = self.decode(&shape, m);
                            if self.flows(t.label, candidate.label) {
                                out.push(candidate);
                            }
                        }
                    }
                }
            }
            FgNode::Assign(r, v) => {
                if let (Some(dr), Some(dv)) = (self.go(arena, r, ctx, pc)?, self.go(arena, v, ctx, pc)?) {
                    let ok = self.members(&dr).any(|t| match &t.body {
                        FgUnlabeled::Ref(payload) => {
                            self.contains(&dv, payload) && self.flows(self.lub(pc, t.label), payload.label)
                        }
                        _ => false,
                    });
                    if ok {
                        out.push(FgType::unit(bot));
                    }
                }
            }
            FgNode::Op(_, a, b) => {
                if let (Some(da), Some(db)) = (self.go(arena, a, ctx, pc)?, self.go(arena, b, ctx, pc)?) {
                    for l in [self.bot, self.top] {
                        let t = FgType::bool(l);
                        if self.contains(&da, &t) && self.contains(&db, &t) {
                            out.push(t);
                        }
                    }
                }
            }
            FgNode::Not(a) => {
                if let Some(d) = self.go(arena, a, ctx, pc)? {
                    for l in [self.bot, self.top] {
                        let t = FgType::bool(l);
                        if self.contains(&d, &t) {
                            out.push(t);
                        }
                    }
                }
            }
        }
        self.collect(out)
    }

    /// Add the types both branches admit that are protected at `l`.
    fn branches(&self, d1: &Derivable, d2: &Derivable, l: Label, acc: &mut Option<(Rc<Shape>, BitSet)>) {
        if !Rc::ptr_eq(&d1.shape, &d2.shape) {
            return;
        }
        let mut both = d1.set.intersect(&d2.set);
        if l == self.top {
            // Position 0 is the top-level label.
            let mut protected = BitSet::new(1 << d1.shape.pols.len());
            for m in both.iter().filter(|m| m & 1 == 1) {
                protected.insert(m);
            }
            both = protected;
        }
        match acc {
            Some((shape, set)) if Rc::ptr_eq(shape, &d1.shape) => set.union_with(&both),
            Some(_) => {}
            None => *acc = Some((d1.shape.clone(), both)),
        }
    }

    /// Compare the algorithmic checker with the search on one term.
    pub fn compare(&mut self, arena: &FgArena, id: Id, ctx: &FgCtx, pc: Label) -> Agreement {
        let e = arena.to_expr(id);
        let algorithmic = FgChecker::new(self.lattice).check_program(ctx, pc, &e);
        let found = match self.derive(arena, id, ctx, pc) {
            Ok(f) => f,
            Err(OutOfBounds) => return Agreement::OutOfBounds,
        };
        let p = Printer::new(self.lattice);
        match (algorithmic, found) {
            (Err(_), None) => Agreement::BothReject,
            (Err(err), Some(d)) => Agreement::Disagree(format!(
                "{} rejected ({err}) but derivable at {}",
                p.fg_expr_flat(&e),
                p.fg_type(&self.decode(&d.shape, d.set.iter().next().expect("nonempty")))
            )),
            (Ok(t), None) => {
                Agreement::Disagree(format!("{} : {} but no derivation", p.fg_expr_flat(&e), p.fg_type(&t)))
            }
            (Ok(t), Some(d)) => {
                if self.erase(&t) != d.shape.skeleton {
                    return Agreement::Disagree(format!(
                        "{} : {} has the wrong shape",
                        p.fg_expr_flat(&e),
                        p.fg_type(&t)
                    ));
                }
                let mask = self.encode(&t);
                let show = |m: usize| p.fg_type(&self.decode(&d.shape, m));
                let (e, t) = (p.fg_expr_flat(&e), p.fg_type(&t));
                match standing(&d.set, &d.shape.pols, mask) {
                    Standing::Least => Agreement::Principal,
                    Standing::Minimal(m) => {
                        Agreement::Minimal(format!("{e} : {t} is incomparable to derivable {}", show(m)))
                    }
                    Standing::NotDerivable => Agreement::Disagree(format!("{e} : {t} is not derivable")),
                    Standing::NotMinimal(m) => Agreement::Disagree(format!("{e} : {t} is above derivable {}", show(m))),
                }
            }
        }
    }
}

fn finish(acc: Option<(Rc<Shape>, BitSet)>) -> Option<Rc<Derivable>> {
    let (shape, set) = acc?;
    (!set.is_empty()).then(|| Rc::new(Derivable { shape, set }))
}

/// Compare both checkers on a single expression.
pub fn fg_agreement(lattice: &Lattice, ctx: &FgCtx, pc: Label, e: &FgExpr) -> Agreement {
    let mut arena = FgArena::new();
    let id = arena.from_expr(e);
    FgOracle::new(lattice).compare(&arena, id, ctx, pc)
}
