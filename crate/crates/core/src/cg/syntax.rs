//! Abstract syntax of the coarse-grained language.

use crate::fg::BoolOp;
use crate::lattice::Label;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CgType {
    Bool,
    Unit,
    Fun(Box<CgType>, Box<CgType>),
    Prod(Box<CgType>, Box<CgType>),
    Sum(Box<CgType>, Box<CgType>),
    /// `ref ℓ τ` holds values of type `Labeled ℓ τ`.
    Ref(Label, Box<CgType>),
    Labeled(Label, Box<CgType>),
    /// `SLIO pc taint τ`.
    Slio(Label, Label, Box<CgType>),
}

impl CgType {
    pub fn fun(a: CgType, b: CgType) -> Self {
        CgType::Fun(Box::new(a), Box::new(b))
    }

    pub fn prod(a: CgType, b: CgType) -> Self {
        CgType::Prod(Box::new(a), Box::new(b))
    }

    pub fn sum(a: CgType, b: CgType) -> Self {
        CgType::Sum(Box::new(a), Box::new(b))
    }

    pub fn reference(l: Label, t: CgType) -> Self {
        CgType::Ref(l, Box::new(t))
    }

    pub fn labeled(l: Label, t: CgType) -> Self {
        CgType::Labeled(l, Box::new(t))
    }

    pub fn slio(pc: Label, taint: Label, t: CgType) -> Self {
        CgType::Slio(pc, taint, Box::new(t))
    }

    pub fn depth(&self) -> usize {
        match self {
            CgType::Bool | CgType::Unit => 1,
            CgType::Fun(a, b) | CgType::Prod(a, b) | CgType::Sum(a, b) => 1 + a.depth().max(b.depth()),
            CgType::Ref(_, a) | CgType::Labeled(_, a) | CgType::Slio(_, _, a) => 1 + a.depth(),
        }
    }

    pub fn contains_ref(&self) -> bool {
        match self {
            CgType::Bool | CgType::Unit => false,
            CgType::Fun(a, b) | CgType::Prod(a, b) | CgType::Sum(a, b) => a.contains_ref() || b.contains_ref(),
            CgType::Ref(..) => true,
            CgType::Labeled(_, a) | CgType::Slio(_, _, a) => a.contains_ref(),
        }
    }

    pub fn labels(&self, out: &mut Vec<Label>) {
        match self {
            CgType::Bool | CgType::Unit => {}
            CgType::Fun(a, b) | CgType::Prod(a, b) | CgType::Sum(a, b) => {
                a.labels(out);
                b.labels(out);
            }
            CgType::Ref(l, a) | CgType::Labeled(l, a) => {
                out.push(*l);
                a.labels(out);
            }
            CgType::Slio(p, t, a) => {
                out.push(*p);
                out.push(*t);
                a.labels(out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CgExpr {
    Var(String),
    Unit,
    Bool(bool),
    Lam {
        param: String,
        param_ty: CgType,
        body: Box<CgExpr>,
    },
    App(Box<CgExpr>, Box<CgExpr>),
    Pair(Box<CgExpr>, Box<CgExpr>),
    Fst(Box<CgExpr>),
    Snd(Box<CgExpr>),
    Inl {
        left: CgType,
        right: CgType,
        expr: Box<CgExpr>,
    },
    Inr {
        left: CgType,
        right: CgType,
        expr: Box<CgExpr>,
    },
    Case {
        scrut: Box<CgExpr>,
        left: (String, Box<CgExpr>),
        right: (String, Box<CgExpr>),
    },
    If(Box<CgExpr>, Box<CgExpr>, Box<CgExpr>),
    BoolOp(BoolOp, Box<CgExpr>, Box<CgExpr>),
    Not(Box<CgExpr>),
    Label(Label, Box<CgExpr>),
    Unlabel(Box<CgExpr>),
    ToLabeled(Box<CgExpr>),
    Ret(Box<CgExpr>),
    Bind {
        first: Box<CgExpr>,
        var: String,
        body: Box<CgExpr>,
    },
    /// Allocation of a cell; `cell` is `(ℓ, τ)` for a cell holding
    /// `Labeled ℓ τ`, or absent to use the initializer's type.
    New {
        init: Box<CgExpr>,
        cell: Option<(Label, CgType)>,
    },
    Deref(Box<CgExpr>),
    Assign(Box<CgExpr>, Box<CgExpr>),
}

impl CgExpr {
    pub fn var(x: impl Into<String>) -> Self {
        CgExpr::Var(x.into())
    }

    pub fn lam(param: impl Into<String>, param_ty: CgType, body: CgExpr) -> Self {
        CgExpr::Lam { param: param.into(), param_ty, body: Box::new(body) }
    }

    pub fn app(f: CgExpr, a: CgExpr) -> Self {
        CgExpr::App(Box::new(f), Box::new(a))
    }

    pub fn pair(a: CgExpr, b: CgExpr) -> Self {
        CgExpr::Pair(Box::new(a), Box::new(b))
    }

    pub fn fst(e: CgExpr) -> Self {
        CgExpr::Fst(Box::new(e))
    }

    pub fn snd(e: CgExpr) -> Self {
        CgExpr::Snd(Box::new(e))
    }

    pub fn inl(left: CgType, right: CgType, e: CgExpr) -> Self {
        CgExpr::Inl { left, right, expr: Box::new(e) }
    }

    pub fn inr(left: CgType, right: CgType, e: CgExpr) -> Self {
        CgExpr::Inr { left, right, expr: Box::new(e) }
    }

    pub fn case(scrut: CgExpr, x: impl Into<String>, left: CgExpr, y: impl Into<String>, right: CgExpr) -> Self {
        CgExpr::Case { scrut: Box::new(scrut), left: (x.into(), Box::new(left)), right: (y.into(), Box::new(right)) }
    }

    pub fn if_(c: CgExpr, t: CgExpr, e: CgExpr) -> Self {
        CgExpr::If(Box::new(c), Box::new(t), Box::new(e))
    }

    pub fn and(a: CgExpr, b: CgExpr) -> Self {
        CgExpr::BoolOp(BoolOp::And, Box::new(a), Box::new(b))
    }

    pub fn or(a: CgExpr, b: CgExpr) -> Self {
        CgExpr::BoolOp(BoolOp::Or, Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: CgExpr) -> Self {
        CgExpr::Not(Box::new(e))
    }

    pub fn label(l: Label, e: CgExpr) -> Self {
        CgExpr::Label(l, Box::new(e))
    }

    pub fn unlabel(e: CgExpr) -> Self {
        CgExpr::Unlabel(Box::new(e))
    }

    pub fn to_labeled(e: CgExpr) -> Self {
        CgExpr::ToLabeled(Box::new(e))
    }

    pub fn ret(e: CgExpr) -> Self {
        CgExpr::Ret(Box::new(e))
    }

    pub fn bind(first: CgExpr, var: impl Into<String>, body: CgExpr) -> Self {
        CgExpr::Bind { first: Box::new(first), var: var.into(), body: Box::new(body) }
    }

    pub fn new_ref(init: CgExpr, label: Label, payload: CgType) -> Self {
        CgExpr::New { init: Box::new(init), cell: Some((label, payload)) }
    }

    pub fn new_plain(init: CgExpr) -> Self {
        CgExpr::New { init: Box::new(init), cell: None }
    }

    pub fn deref(e: CgExpr) -> Self {
        CgExpr::Deref(Box::new(e))
    }

    pub fn assign(r: CgExpr, v: CgExpr) -> Self {
        CgExpr::Assign(Box::new(r), Box::new(v))
    }

    fn children(&self) -> Vec<&CgExpr> {
        match self {
            CgExpr::Var(_) | CgExpr::Unit | CgExpr::Bool(_) => vec![],
            CgExpr::Lam { body: e, .. }
            | CgExpr::Fst(e)
            | CgExpr::Snd(e)
            | CgExpr::Inl { expr: e, .. }
            | CgExpr::Inr { expr: e, .. }
            | CgExpr::Not(e)
            | CgExpr::Label(_, e)
            | CgExpr::Unlabel(e)
            | CgExpr::ToLabeled(e)
            | CgExpr::Ret(e)
            | CgExpr::New { init: e, .. }
            | CgExpr::Deref(e) => vec![e],
            CgExpr::App(a, b)
            | CgExpr::Pair(a, b)
            | CgExpr::BoolOp(_, a, b)
            | CgExpr::Assign(a, b)
            | CgExpr::Bind { first: a, body: b, .. } => vec![a, b],
            CgExpr::If(a, b, c) => vec![a, b, c],
            CgExpr::Case { scrut, left, right } => vec![scrut, &left.1, &right.1],
        }
    }

    /// Number of expression nodes; annotations are not counted.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(CgExpr::size).sum::<usize>()
    }

    /// Every identifier mentioned (bound or free).
    pub fn names(&self, out: &mut std::collections::BTreeSet<String>) {
        match self {
            CgExpr::Var(x) => {
                out.insert(x.clone());
            }
            CgExpr::Lam { param, .. } => {
                out.insert(param.clone());
            }
            CgExpr::Bind { var, .. } => {
                out.insert(var.clone());
            }
            CgExpr::Case { left, right, .. } => {
                out.insert(left.0.clone());
                out.insert(right.0.clone());
            }
            _ => {}
        }
        for c in self.children() {
            c.names(out);
        }
    }

    /// Every label occurring in annotations.
    pub fn labels(&self, out: &mut Vec<Label>) {
        match self {
            CgExpr::Lam { param_ty, .. } => param_ty.labels(out),
            CgExpr::Inl { left, right, .. } | CgExpr::Inr { left, right, .. } => {
                left.labels(out);
                right.labels(out);
            }
            CgExpr::Label(l, _) => out.push(*l),
            CgExpr::New { cell: Some((label, payload)), .. } => {
                out.push(*label);
                payload.labels(out);
            }
            _ => {}
        }
        for c in self.children() {
            c.labels(out);
        }
    }
}
