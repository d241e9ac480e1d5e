//! Declarative derivation search for CG over the two-point lattice.

use std::collections::HashMap;
use std::rc::Rc;

use ifc_core::cg::{CgChecker, CgCtx, CgExpr, CgType};
use ifc_core::fg::BoolOp;
use ifc_core::surface::Printer;
use ifc_core::{Label, Lattice};

use super::{close_up, standing, Agreement, BitSet, Pol, Standing, MAX_POSITIONS};

pub type Id = u32;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CgNode {
    Var(String),
    Unit,
    Bool(bool),
    Lam { param: String, ty: CgType, body: Id },
    App(Id, Id),
    Pair(Id, Id),
    Fst(Id),
    Snd(Id),
    Inl { left: CgType, right: CgType, expr: Id },
    Inr { left: CgType, right: CgType, expr: Id },
    Case { scrut: Id, x: String, left: Id, y: String, right: Id },
    If(Id, Id, Id),
    Op(BoolOp, Id, Id),
    Not(Id),
    Label(Label, Id),
    Unlabel(Id),
    ToLabeled(Id),
    Ret(Id),
    Bind { first: Id, var: String, body: Id },
    New { init: Id, cell: Option<(Label, CgType)> },
    Deref(Id),
    Assign(Id, Id),
}

impl CgNode {
    fn children(&self) -> Vec<Id> {
        match self {
            CgNode::Var(_) | CgNode::Unit | CgNode::Bool(_) => vec![],
            CgNode::Lam { body: a, .. }
            | CgNode::Fst(a)
            | CgNode::Snd(a)
            | CgNode::Inl { expr: a, .. }
            | CgNode::Inr { expr: a, .. }
            | CgNode::Not(a)
            | CgNode::Label(_, a)
            | CgNode::Unlabel(a)
            | CgNode::ToLabeled(a)
            | CgNode::Ret(a)
            | CgNode::New { init: a, .. }
            | CgNode::Deref(a) => vec![*a],
            CgNode::App(a, b)
            | CgNode::Pair(a, b)
            | CgNode::Op(_, a, b)
            | CgNode::Assign(a, b)
            | CgNode::Bind { first: a, body: b, .. } => vec![*a, *b],
            CgNode::If(a, b, c) | CgNode::Case { scrut: a, left: b, right: c, .. } => vec![*a, *b, *c],
        }
    }
}

#[derive(Default)]
pub struct CgArena {
    nodes: Vec<CgNode>,
    sizes: Vec<u32>,
    index: HashMap<CgNode, Id>,
}

impl CgArena {
    pub fn new() -> Self {
        CgArena::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn get(&self, id: Id) -> &CgNode {
        &self.nodes[id as usize]
    }

    pub fn size(&self, id: Id) -> usize {
        self.sizes[id as usize] as usize
    }

    pub fn intern(&mut self, node: CgNode) -> Id {
        if let Some(id) = self.index.get(&node) {
            return *id;
        }
        let size = 1 + node.children().iter().map(|c| self.sizes[*c as usize]).sum::<u32>();
        let id = self.nodes.len() as Id;
        self.nodes.push(node.clone());
        self.sizes.push(size);
        self.index.insert(node, id);
        id
    }

    pub fn from_expr(&mut self, e: &CgExpr) -> Id {
        let node = match e {
            CgExpr::Var(x) => CgNode::Var(x.clone()),
            CgExpr::Unit => CgNode::Unit,
            CgExpr::Bool(b) => CgNode::Bool(*b),
            CgExpr::Lam { param, param_ty, body } => {
                CgNode::Lam { param: param.clone(), ty: param_ty.clone(), body: self.from_expr(body) }
            }
            CgExpr::App(a, b) => CgNode::App(self.from_expr(a), self.from_expr(b)),
            CgExpr::Pair(a, b) => CgNode::Pair(self.from_expr(a), self.from_expr(b)),
            CgExpr::Fst(a) => CgNode::Fst(self.from_expr(a)),
            CgExpr::Snd(a) => CgNode::Snd(self.from_expr(a)),
            CgExpr::Inl { left, right, expr } => {
                CgNode::Inl { left: left.clone(), right: right.clone(), expr: self.from_expr(expr) }
            }
            CgExpr::Inr { left, right, expr } => {
                CgNode::Inr { left: left.clone(), right: right.clone(), expr: self.from_expr(expr) }
            }
            CgExpr::Case { scrut, left, right } => CgNode::Case {
                scrut: self.from_expr(scrut),
                x: left.0.clone(),
                left: self.from_expr(&left.1),
                y: right.0.clone(),
                right: self.from_expr(&right.1),
            },
            CgExpr::If(a, b, c) => CgNode::If(self.from_expr(a), self.from_expr(b), self.from_expr(c)),
            CgExpr::BoolOp(op, a, b) => CgNode::Op(*op, self.from_expr(a), self.from_expr(b)),
            CgExpr::Not(a) => CgNode::Not(self.from_expr(a)),
            CgExpr::Label(l, a) => CgNode::Label(*l, self.from_expr(a)),
            CgExpr::Unlabel(a) => CgNode::Unlabel(self.from_expr(a)),
            CgExpr::ToLabeled(a) => CgNode::ToLabeled(self.from_expr(a)),
            CgExpr::Ret(a) => CgNode::Ret(self.from_expr(a)),
            CgExpr::Bind { first, var, body } => {
                CgNode::Bind { first: self.from_expr(first), var: var.clone(), body: self.from_expr(body) }
            }
            CgExpr::New { init, cell } => CgNode::New { init: self.from_expr(init), cell: cell.clone() },
            CgExpr::Deref(a) => CgNode::Deref(self.from_expr(a)),
            CgExpr::Assign(a, b) => CgNode::Assign(self.from_expr(a), self.from_expr(b)),
        };
        self.intern(node)
    }

    pub fn to_expr(&self, id: Id) -> CgExpr {
        let e = |i: &Id| Box::new(self.to_expr(*i));
        match self.get(id) {
            CgNode::Var(x) => CgExpr::Var(x.clone()),
            CgNode::Unit => CgExpr::Unit,
            CgNode::Bool(b) => CgExpr::Bool(*b),
            CgNode::Lam { param, ty, body } => {
                CgExpr::Lam { param: param.clone(), param_ty: ty.clone(), body: e(body) }
            }
            CgNode::App(a, b) => CgExpr::App(e(a), e(b)),
            CgNode::Pair(a, b) => CgExpr::Pair(e(a), e(b)),
            CgNode::Fst(a) => CgExpr::Fst(e(a)),
            CgNode::Snd(a) => CgExpr::Snd(e(a)),
            CgNode::Inl { left, right, expr } => {
                CgExpr::Inl { left: left.clone(), right: right.clone(), expr: e(expr) }
            }
            CgNode::Inr { left, right, expr } => {
                CgExpr::Inr { left: left.clone(), right: right.clone(), expr: e(expr) }
            }
            CgNode::Case { scrut, x, left, y, right } => {
                CgExpr::Case { scrut: e(scrut), left: (x.clone(), e(left)), right: (y.clone(), e(right)) }
            }
            CgNode::If(a, b, c) => CgExpr::If(e(a), e(b), e(c)),
            CgNode::Op(op, a, b) => CgExpr::BoolOp(*op, e(a), e(b)),
            CgNode::Not(a) => CgExpr::Not(e(a)),
            CgNode::Label(l, a) => CgExpr::Label(*l, e(a)),
            CgNode::Unlabel(a) => CgExpr::Unlabel(e(a)),
            CgNode::ToLabeled(a) => CgExpr::ToLabeled(e(a)),
            CgNode::Ret(a) => CgExpr::Ret(e(a)),
            CgNode::Bind { first, var, body } => CgExpr::Bind { first: e(first), var: var.clone(), body: e(body) },
            CgNode::New { init, cell } => CgExpr::New { init: e(init), cell: cell.clone() },
            CgNode::Deref(a) => CgExpr::Deref(e(a)),
            CgNode::Assign(a, b) => CgExpr::Assign(e(a), e(b)),
        }
    }
}

#[derive(Debug)]
pub struct Shape {
    pub skeleton: CgType,
    pub pols: Vec<Pol>,
}

#[derive(Debug)]
pub struct Derivable {
    pub shape: Rc<Shape>,
    pub set: BitSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutOfBounds;

type Found = Result<Option<Rc<Derivable>>, OutOfBounds>;

fn pols(t: &CgType, p: Pol, out: &mut Vec<Pol>) {
    match t {
        CgType::Bool | CgType::Unit => {}
        CgType::Fun(a, b) => {
            pols(a, p.flip(), out);
            pols(b, p, out);
        }
        CgType::Prod(a, b) | CgType::Sum(a, b) => {
            pols(a, p, out);
            pols(b, p, out);
        }
        CgType::Ref(_, a) => {
            out.push(Pol::Inv);
            pols(a, Pol::Inv, out);
        }
        CgType::Labeled(_, a) => {
            out.push(p);
            pols(a, p, out);
        }
        CgType::Slio(_, _, a) => {
            out.push(p.flip());
            out.push(p);
            pols(a, p, out);
        }
    }
}

pub struct CgOracle<'l> {
    lattice: &'l Lattice,
    bot: Label,
    top: Label,
    shapes: HashMap<CgType, Rc<Shape>>,
    ctxs: HashMap<Vec<(String, CgType)>, u32>,
    ctx_list: Vec<Vec<(String, CgType)>>,
    memo: HashMap<(Id, u32), Found>,
}

impl<'l> CgOracle<'l> {
    pub fn new(lattice: &'l Lattice) -> Self {
        assert_eq!(lattice.size(), 2, "the declarative oracle works over the two-point lattice");
        CgOracle {
            lattice,
            bot: lattice.bot(),
            top: lattice.top(),
            shapes: HashMap::new(),
            ctxs: HashMap::new(),
            ctx_list: Vec::new(),
            memo: HashMap::new(),
        }
    }

    pub fn clear(&mut self) {
        self.memo.clear();
    }

    fn erase(&self, t: &CgType) -> CgType {
        let bot = self.bot;
        match t {
            CgType::Bool => CgType::Bool,
            CgType::Unit => CgType::Unit,
            CgType::Fun(a, b) => CgType::fun(self.erase(a), self.erase(b)),
            CgType::Prod(a, b) => CgType::prod(self.erase(a), self.erase(b)),
            CgType::Sum(a, b) => CgType::sum(self.erase(a), self.erase(b)),
            CgType::Ref(_, a) => CgType::reference(bot, self.erase(a)),
            CgType::Labeled(_, a) => CgType::labeled(bot, self.erase(a)),
            CgType::Slio(_, _, a) => CgType::slio(bot, bot, self.erase(a)),
        }
    }

    pub fn shape_of(&mut self, t: &CgType) -> Result<Rc<Shape>, OutOfBounds> {
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

    pub fn encode(&self, t: &CgType) -> usize {
        let mut labels = Vec::new();
        t.labels(&mut labels);
        labels.iter().enumerate().filter(|(_, l)| **l == self.top).map(|(i, _)| 1 << i).sum()
    }

    pub fn decode(&self, shape: &Shape, mask: usize) -> CgType {
        let mut i = 0;
        self.relabel(&shape.skeleton, mask, &mut i)
    }

    fn relabel(&self, t: &CgType, mask: usize, i: &mut usize) -> CgType {
        let next = |i: &mut usize| {
            let l = if mask >> *i & 1 == 1 { self.top } else { self.bot };
            *i += 1;
            l
        };
        match t {
            CgType::Bool => CgType::Bool,
            CgType::Unit => CgType::Unit,
            CgType::Fun(a, b) => {
                let a = self.relabel(a, mask, i);
                CgType::fun(a, self.relabel(b, mask, i))
            }
            CgType::Prod(a, b) => {
                let a = self.relabel(a, mask, i);
                CgType::prod(a, self.relabel(b, mask, i))
            }
            CgType::Sum(a, b) => {
                let a = self.relabel(a, mask, i);
                CgType::sum(a, self.relabel(b, mask, i))
            }
            CgType::Ref(_, a) => {
                let l = next(i);
                CgType::reference(l, self.relabel(a, mask, i))
            }
            CgType::Labeled(_, a) => {
                let l = next(i);
                CgType::labeled(l, self.relabel(a, mask, i))
            }
            CgType::Slio(_, _, a) => {
                let p = next(i);
                let t = next(i);
                CgType::slio(p, t, self.relabel(a, mask, i))
            }
        }
    }

    fn members(&self, d: &Derivable) -> Vec<CgType> {
        d.set.iter().map(|m| self.decode(&d.shape, m)).collect()
    }

    fn contains(&self, d: &Derivable, t: &CgType) -> bool {
        self.erase(t) == d.shape.skeleton && d.set.contains(self.encode(t))
    }

    fn collect(&mut self, types: Vec<CgType>) -> Found {
        let Some(first) = types.first() else { return Ok(None) };
        let shape = self.shape_of(first)?;
        let mut set = BitSet::new(1 << shape.pols.len());
        for t in &types {
            set.insert(self.encode(t));
        }
        close_up(&mut set, &shape.pols);
        Ok(Some(Rc::new(Derivable { shape, set })))
    }

    fn ctx_id(&mut self, ctx: &[(String, CgType)]) -> u32 {
        if let Some(id) = self.ctxs.get(ctx) {
            return *id;
        }
        let id = self.ctx_list.len() as u32;
        self.ctx_list.push(ctx.to_vec());
        self.ctxs.insert(ctx.to_vec(), id);
        id
    }

    fn extend(&mut self, ctx: u32, x: &str, t: CgType) -> u32 {
        let mut c = self.ctx_list[ctx as usize].clone();
        c.push((x.to_string(), t));
        self.ctx_id(&c)
    }

    fn flows(&self, a: Label, b: Label) -> bool {
        self.lattice.flows(a, b)
    }

    pub fn derive(&mut self, arena: &CgArena, id: Id, ctx: &CgCtx) -> Found {
        let entries: Vec<(String, CgType)> = ctx.iter().map(|(x, t)| (x.to_string(), t.clone())).collect();
        let c = self.ctx_id(&entries);
        self.go(arena, id, c)
    }

    fn go(&mut self, arena: &CgArena, id: Id, ctx: u32) -> Found {
        if let Some(r) = self.memo.get(&(id, ctx)) {
            return r.clone();
        }
        let r = self.rule(arena, id, ctx);
        self.memo.insert((id, ctx), r.clone());
        r
    }

    fn labels(&self) -> [Label; 2] {
        [self.bot, self.top]
    }

    fn rule(&mut self, arena: &CgArena, id: Id, ctx: u32) -> Found {
        let (bot, top) = (self.bot, self.top);
        let mut out: Vec<CgType> = Vec::new();
        match arena.get(id).clone() {
            CgNode::Var(x) => {
                if let Some((_, t)) = self.ctx_list[ctx as usize].iter().rev().find(|(y, _)| *y == x) {
                    out.push(t.clone());
                }
            }
            CgNode::Unit => out.push(CgType::Unit),
            CgNode::Bool(_) => out.push(CgType::Bool),
            CgNode::Lam { param, ty, body } => {
                let inner = self.extend(ctx, &param, ty.clone());
                if let Some(d) = self.go(arena, body, inner)? {
                    out.extend(self.members(&d).into_iter().map(|r| CgType::fun(ty.clone(), r)));
                }
            }
            CgNode::App(f, a) => {
                if let (Some(df), Some(da)) = (self.go(arena, f, ctx)?, self.go(arena, a, ctx)?) {
                    for tf in self.members(&df) {
                        if let CgType::Fun(p, r) = tf {
                            if self.contains(&da, &p) {
                                out.push(*r);
                            }
                        }
                    }
                }
            }
            CgNode::Pair(a, b) => {
                if let (Some(da), Some(db)) = (self.go(arena, a, ctx)?, self.go(arena, b, ctx)?) {
                    let tb = self.members(&db);
                    for ta in self.members(&da) {
                        for tb in &tb {
                            out.push(CgType::prod(ta.clone(), tb.clone()));
                        }
                    }
                }
            }
            CgNode::Fst(p) | CgNode::Snd(p) => {
                let first = matches!(arena.get(id), CgNode::Fst(_));
                if let Some(dp) = self.go(arena, p, ctx)? {
                    for t in self.members(&dp) {
                        if let CgType::Prod(a, b) = t {
                            out.push(if first { *a } else { *b });
                        }
                    }
                }
            }
            CgNode::Inl { left, right, expr } | CgNode::Inr { left, right, expr } => {
                let is_left = matches!(arena.get(id), CgNode::Inl { .. });
                if let Some(d) = self.go(arena, expr, ctx)? {
                    if self.contains(&d, if is_left { &left } else { &right }) {
                        out.push(CgType::sum(left, right));
                    }
                }
            }
            CgNode::Case { scrut, x, left, y, right } => {
                if let Some(ds) = self.go(arena, scrut, ctx)? {
                    let mut acc: Option<(Rc<Shape>, BitSet)> = None;
                    for t in self.members(&ds) {
                        let CgType::Sum(a, b) = t else { continue };
                        let cl = self.extend(ctx, &x, *a);
                        let cr = self.extend(ctx, &y, *b);
                        if let (Some(d1), Some(d2)) = (self.go(arena, left, cl)?, self.go(arena, right, cr)?) {
                            merge(&d1, &d2, &mut acc);
                        }
                    }
                    return Ok(finish(acc));
                }
            }
            CgNode::If(c, t, f) => {
                if let Some(dc) = self.go(arena, c, ctx)? {
                    if self.contains(&dc, &CgType::Bool) {
                        let mut acc = None;
                        if let (Some(d1), Some(d2)) = (self.go(arena, t, ctx)?, self.go(arena, f, ctx)?) {
                            merge(&d1, &d2, &mut acc);
                        }
                        return Ok(finish(acc));
                    }
                }
            }
            CgNode::Op(_, a, b) => {
                if let (Some(da), Some(db)) = (self.go(arena, a, ctx)?, self.go(arena, b, ctx)?) {
                    if self.contains(&da, &CgType::Bool) && self.contains(&db, &CgType::Bool) {
                        out.push(CgType::Bool);
                    }
                }
            }
            CgNode::Not(a) => {
                if let Some(d) = self.go(arena, a, ctx)? {
                    if self.contains(&d, &CgType::Bool) {
                        out.push(CgType::Bool);
                    }
                }
            }
            CgNode::Label(l, a) => {
                if let Some(d) = self.go(arena, a, ctx)? {
                    out.extend(self.members(&d).into_iter().map(|t| CgType::labeled(l, t)));
                }
            }
            CgNode::Unlabel(a) => {
                if let Some(d) = self.go(arena, a, ctx)? {
                    for t in self.members(&d) {
                        if let CgType::Labeled(l, t) = t {
                            out.push(CgType::Slio(top, l, t));
                        }
                    }
                }
            }
            CgNode::ToLabeled(a) => {
                if let Some(d) = self.go(arena, a, ctx)? {
                    for t in self.members(&d) {
                        if let CgType::Slio(p, taint, t) = t {
                            out.push(CgType::slio(p, bot, CgType::Labeled(taint, t)));
                        }
                    }
                }
            }
            CgNode::Ret(a) => {
                if let Some(d) = self.go(arena, a, ctx)? {
                    out.extend(self.members(&d).into_iter().map(|t| CgType::slio(top, bot, t)));
                }
            }
            CgNode::Bind { first, var, body } => {
                if let Some(d1) = self.go(arena, first, ctx)? {
                    for t1 in self.members(&d1) {
                        let CgType::Slio(l1, l2, tau) = t1 else { continue };
                        let inner = self.extend(ctx, &var, *tau);
                        let Some(d2) = self.go(arena, body, inner)? else { continue };
                        for t2 in self.members(&d2) {
                            let CgType::Slio(l3, l4, result) = t2 else { continue };
                            if !(self.flows(l2, l3) && self.flows(l2, l4)) {
                                continue;
                            }
                            for l in self.labels() {
                                if self.flows(l, l1) && self.flows(l, l3) {
                                    out.push(CgType::slio(l, l4, (*result).clone()));
                                }
                            }
                        }
                    }
                }
            }
            CgNode::New { init, cell } => {
                if let Some(d) = self.go(arena, init, ctx)? {
                    match cell {
                        Some((l, payload)) => {
                            if self.contains(&d, &CgType::labeled(l, payload.clone())) {
                                out.push(CgType::slio(l, bot, CgType::reference(l, payload)));
                            }
                        }
                        None => {
                            for t in self.members(&d) {
                                if let CgType::Labeled(l, payload) = t {
                                    out.push(CgType::slio(l, bot, CgType::Ref(l, payload)));
                                }
                            }
                        }
                    }
                }
            }
            CgNode::Deref(a) => {
                if let Some(d) = self.go(arena, a, ctx)? {
                    for t in self.members(&d) {
                        if let CgType::Ref(l, payload) = t {
                            out.push(CgType::slio(top, bot, CgType::Labeled(l, payload)));
                        }
                    }
                }
            }
            CgNode::Assign(r, v) => {
                if let (Some(dr), Some(dv)) = (self.go(arena, r, ctx)?, self.go(arena, v, ctx)?) {
                    for t in self.members(&dr) {
                        if let CgType::Ref(l, payload) = t {
                            if self.contains(&dv, &CgType::Labeled(l, payload)) {
                                out.push(CgType::slio(l, bot, CgType::Unit));
                            }
                        }
                    }
                }
            }
        }
        self.collect(out)
    }

    pub fn compare(&mut self, arena: &CgArena, id: Id, ctx: &CgCtx) -> Agreement {
        let e = arena.to_expr(id);
        let algorithmic = CgChecker::new(self.lattice).check_program(ctx, &e);
        let found = match self.derive(arena, id, ctx) {
            Ok(f) => f,
            Err(OutOfBounds) => return Agreement::OutOfBounds,
        };
        let p = Printer::new(self.lattice);
        match (algorithmic, found) {
            (Err(_), None) => Agreement::BothReject,
            (Err(err), Some(d)) => Agreement::Disagree(format!(
                "{} rejected ({err}) but derivable at {}",
                p.cg_expr_flat(&e),
                p.cg_type(&self.decode(&d.shape, d.set.iter().next().expect("nonempty")))
            )),
            (Ok(t), None) => {
                Agreement::Disagree(format!("{} : {} but no derivation", p.cg_expr_flat(&e), p.cg_type(&t)))
            }
            (Ok(t), Some(d)) => {
                if self.erase(&t) != d.shape.skeleton {
                    return Agreement::Disagree(format!(
                        "{} : {} has the wrong shape",
                        p.cg_expr_flat(&e),
                        p.cg_type(&t)
                    ));
                }
                let mask = self.encode(&t);
                let show = |m: usize| p.cg_type(&self.decode(&d.shape, m));
                let (e, t) = (p.cg_expr_flat(&e), p.cg_type(&t));
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

/// Add the types both branches admit.
fn merge(d1: &Derivable, d2: &Derivable, acc: &mut Option<(Rc<Shape>, BitSet)>) {
    if !Rc::ptr_eq(&d1.shape, &d2.shape) {
        return;
    }
    let both = d1.set.intersect(&d2.set);
    match acc {
        Some((shape, set)) if Rc::ptr_eq(shape, &d1.shape) => set.union_with(&both),
        Some(_) => {}
        None => *acc = Some((d1.shape.clone(), both)),
    }
}

fn finish(acc: Option<(Rc<Shape>, BitSet)>) -> Option<Rc<Derivable>> {
    let (shape, set) = acc?;
    (!set.is_empty()).then(|| Rc::new(Derivable { shape, set }))
}

pub fn cg_agreement(lattice: &Lattice, ctx: &CgCtx, e: &CgExpr) -> Agreement {
    let mut arena = CgArena::new();
    let id = arena.from_expr(e);
    CgOracle::new(lattice).compare(&arena, id, ctx)
}
