//! Exhaustive enumeration of small closed terms, checked against the
//! declarative oracles.
//!
//! Terms are built bottom-up by size (node count) and binder depth. The
//! variable bound at depth `d` is `v{d}`, so alpha-equivalent terms are
//! generated once. Subterms are hash-consed, which lets the oracle's memo
//! table do the work for every subterm exactly once.

use std::collections::HashMap;
use std::rc::Rc;

use ifc_core::cg::{CgCtx, CgType};
use ifc_core::fg::{FgCtx, FgType};
use ifc_core::Lattice;

use crate::declarative::cg::{CgArena, CgNode, CgOracle};
use crate::declarative::fg::{FgArena, FgNode, FgOracle, Id};
use crate::declarative::Agreement;

/// Counts of each outcome over an enumeration run.
#[derive(Debug, Default, Clone)]
pub struct Tally {
    pub terms: u64,
    pub checks: u64,
    pub principal: u64,
    pub minimal: u64,
    pub both_reject: u64,
    pub out_of_bounds: u64,
    pub disagreements: u64,
    /// The first few disagreements, rendered.
    pub examples: Vec<String>,
}

impl Tally {
    fn record(&mut self, a: Agreement) {
        self.checks += 1;
        match a {
            Agreement::Principal => self.principal += 1,
            Agreement::BothReject => self.both_reject += 1,
            Agreement::OutOfBounds => self.out_of_bounds += 1,
            Agreement::Minimal(m) => {
                self.minimal += 1;
                if self.examples.len() < 5 {
                    self.examples.push(m);
                }
            }
            Agreement::Disagree(m) => {
                self.disagreements += 1;
                if self.examples.len() < 5 {
                    self.examples.push(m);
                }
            }
        }
    }

    pub fn typable(&self) -> u64 {
        self.principal + self.minimal
    }

    /// Checks where the algorithmic checker is not exactly principal.
    pub fn failures(&self) -> u64 {
        self.disagreements + self.minimal
    }
}

fn var(d: usize) -> String {
    format!("v{d}")
}

/// Ordered splits of `n` into `k` positive parts.
fn splits(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 1 {
        return if n >= 1 { vec![vec![n]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..n {
        for mut rest in splits(n - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

pub struct FgEnumerator<'l> {
    lattice: &'l Lattice,
    pub arena: FgArena,
    table: HashMap<(usize, usize), Rc<Vec<Id>>>,
}

impl<'l> FgEnumerator<'l> {
    pub fn new(lattice: &'l Lattice) -> Self {
        FgEnumerator { lattice, arena: FgArena::new(), table: HashMap::new() }
    }

    /// All terms of exactly `size` nodes whose free variables are among the
    /// first `depth` binders.
    pub fn terms(&mut self, size: usize, depth: usize) -> Rc<Vec<Id>> {
        if let Some(t) = self.table.get(&(size, depth)) {
            return t.clone();
        }
        let (l, h) = (self.lattice.bot(), self.lattice.top());
        let mut nodes = Vec::new();
        if size == 1 {
            nodes.push(FgNode::Unit);
            nodes.push(FgNode::Bool(true));
            nodes.extend((0..depth).map(|i| FgNode::Var(var(i))));
        } else {
            for &a in self.terms(size - 1, depth).iter() {
                nodes.push(FgNode::Fst(a));
                nodes.push(FgNode::Snd(a));
                nodes.push(FgNode::Deref(a));
                nodes.push(FgNode::Not(a));
                nodes.push(FgNode::Inl { left: FgType::bool(l), right: FgType::unit(l), expr: a });
                nodes.push(FgNode::New { init: a, cell: Some(FgType::bool(h)) });
            }
            for &body in self.terms(size - 1, depth + 1).iter() {
                nodes.push(FgNode::Lam { param: var(depth), ty: FgType::bool(l), latent: h, body });
                nodes.push(FgNode::Lam { param: var(depth), ty: FgType::bool(h), latent: l, body });
            }
            for s in splits(size - 1, 2) {
                let (xs, ys) = (self.terms(s[0], depth), self.terms(s[1], depth));
                for &a in xs.iter() {
                    for &b in ys.iter() {
                        nodes.push(FgNode::App(a, b));
                        nodes.push(FgNode::Pair(a, b));
                        nodes.push(FgNode::Assign(a, b));
                    }
                }
            }
            for s in splits(size - 1, 3) {
                let (xs, ys, zs) = (self.terms(s[0], depth), self.terms(s[1], depth), self.terms(s[2], depth));
                let (bs, cs) = (self.terms(s[1], depth + 1), self.terms(s[2], depth + 1));
                for &a in xs.iter() {
                    for &b in ys.iter() {
                        for &c in zs.iter() {
                            nodes.push(FgNode::If(a, b, c));
                        }
                    }
                    for &b in bs.iter() {
                        for &c in cs.iter() {
                            nodes.push(FgNode::Case { scrut: a, x: var(depth), left: b, y: var(depth), right: c });
                        }
                    }
                }
            }
        }
        let ids = Rc::new(nodes.into_iter().map(|n| self.arena.intern(n)).collect::<Vec<_>>());
        self.table.insert((size, depth), ids.clone());
        ids
    }
}

pub struct CgEnumerator<'l> {
    lattice: &'l Lattice,
    pub arena: CgArena,
    table: HashMap<(usize, usize), Rc<Vec<Id>>>,
}

impl<'l> CgEnumerator<'l> {
    pub fn new(lattice: &'l Lattice) -> Self {
        CgEnumerator { lattice, arena: CgArena::new(), table: HashMap::new() }
    }

    pub fn terms(&mut self, size: usize, depth: usize) -> Rc<Vec<Id>> {
        if let Some(t) = self.table.get(&(size, depth)) {
            return t.clone();
        }
        let h = self.lattice.top();
        let mut nodes = Vec::new();
        if size == 1 {
            nodes.push(CgNode::Unit);
            nodes.push(CgNode::Bool(true));
            nodes.extend((0..depth).map(|i| CgNode::Var(var(i))));
        } else {
            for &a in self.terms(size - 1, depth).iter() {
                nodes.push(CgNode::Ret(a));
                nodes.push(CgNode::Unlabel(a));
                nodes.push(CgNode::ToLabeled(a));
                nodes.push(CgNode::Label(h, a));
                nodes.push(CgNode::Deref(a));
                nodes.push(CgNode::Fst(a));
                nodes.push(CgNode::New { init: a, cell: Some((h, CgType::Bool)) });
            }
            for &body in self.terms(size - 1, depth + 1).iter() {
                nodes.push(CgNode::Lam { param: var(depth), ty: CgType::Bool, body });
                nodes.push(CgNode::Lam { param: var(depth), ty: CgType::labeled(h, CgType::Bool), body });
            }
            for s in splits(size - 1, 2) {
                let (xs, ys) = (self.terms(s[0], depth), self.terms(s[1], depth));
                let bodies = self.terms(s[1], depth + 1);
                for &a in xs.iter() {
                    for &b in ys.iter() {
                        nodes.push(CgNode::App(a, b));
                        nodes.push(CgNode::Pair(a, b));
                        nodes.push(CgNode::Assign(a, b));
                    }
                    for &b in bodies.iter() {
                        nodes.push(CgNode::Bind { first: a, var: var(depth), body: b });
                    }
                }
            }
            for s in splits(size - 1, 3) {
                let (xs, ys, zs) = (self.terms(s[0], depth), self.terms(s[1], depth), self.terms(s[2], depth));
                for &a in xs.iter() {
                    for &b in ys.iter() {
                        for &c in zs.iter() {
                            nodes.push(CgNode::If(a, b, c));
                        }
                    }
                }
            }
        }
        let ids = Rc::new(nodes.into_iter().map(|n| self.arena.intern(n)).collect::<Vec<_>>());
        self.table.insert((size, depth), ids.clone());
        ids
    }
}

/// Check every closed FG term of size at most `max_size`, at both pcs of the
/// two-point lattice.
pub fn exhaustive_fg(lattice: &Lattice, max_size: usize) -> Tally {
    let mut en = FgEnumerator::new(lattice);
    let mut oracle = FgOracle::new(lattice);
    let mut tally = Tally::default();
    for size in 1..=max_size {
        for &id in en.terms(size, 0).iter() {
            tally.terms += 1;
            for pc in [lattice.bot(), lattice.top()] {
                tally.record(oracle.compare(&en.arena, id, &FgCtx::new(), pc));
            }
        }
    }
    tally
}

/// Check every closed CG term of size at most `max_size`.
pub fn exhaustive_cg(lattice: &Lattice, max_size: usize) -> Tally {
    let mut en = CgEnumerator::new(lattice);
    let mut oracle = CgOracle::new(lattice);
    let mut tally = Tally::default();
    for size in 1..=max_size {
        for &id in en.terms(size, 0).iter() {
            tally.terms += 1;
            tally.record(oracle.compare(&en.arena, id, &CgCtx::new()));
        }
    }
    tally
}
