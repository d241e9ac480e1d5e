//! Abstract syntax of the fine-grained language.

use crate::lattice::Label;

/// Type constructor of an FG type, without its outer label.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FgUnlabeled {
    Bool,
    Unit,
    /// `τ₁ →[ℓe] τ₂`; `ℓe` bounds the body's write effects from below.
    Fun(Box<FgType>, Label, Box<FgType>),
    Prod(Box<FgType>, Box<FgType>),
    Sum(Box<FgType>, Box<FgType>),
    Ref(Box<FgType>),
}

/// A labeled type `A^ℓ`. Every FG type, nested or not, carries a label.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FgType {
    pub body: FgUnlabeled,
    pub label: Label,
}

impl FgType {
    pub fn new(body: FgUnlabeled, label: Label) -> Self {
        FgType { body, label }
    }

    pub fn bool(label: Label) -> Self {
        FgType::new(FgUnlabeled::Bool, label)
    }

    pub fn unit(label: Label) -> Self {
        FgType::new(FgUnlabeled::Unit, label)
    }

    pub fn fun(arg: FgType, latent: Label, result: FgType, label: Label) -> Self {
        FgType::new(FgUnlabeled::Fun(Box::new(arg), latent, Box::new(result)), label)
    }

    pub fn prod(a: FgType, b: FgType, label: Label) -> Self {
        FgType::new(FgUnlabeled::Prod(Box::new(a), Box::new(b)), label)
    }

    pub fn sum(a: FgType, b: FgType, label: Label) -> Self {
        FgType::new(FgUnlabeled::Sum(Box::new(a), Box::new(b)), label)
    }

    pub fn reference(payload: FgType, label: Label) -> Self {
        FgType::new(FgUnlabeled::Ref(Box::new(payload)), label)
    }

    pub fn with_label(&self, label: Label) -> Self {
        FgType { body: self.body.clone(), label }
    }

    /// Number of type constructors.
    pub fn depth(&self) -> usize {
        match &self.body {
            FgUnlabeled::Bool | FgUnlabeled::Unit => 1,
            FgUnlabeled::Fun(a, _, b) | FgUnlabeled::Prod(a, b) | FgUnlabeled::Sum(a, b) => {
                1 + a.depth().max(b.depth())
            }
            FgUnlabeled::Ref(a) => 1 + a.depth(),
        }
    }

    pub fn contains_ref(&self) -> bool {
        match &self.body {
            FgUnlabeled::Bool | FgUnlabeled::Unit => false,
            FgUnlabeled::Fun(a, _, b) | FgUnlabeled::Prod(a, b) | FgUnlabeled::Sum(a, b) => {
                a.contains_ref() || b.contains_ref()
            }
            FgUnlabeled::Ref(_) => true,
        }
    }

    pub fn labels(&self, out: &mut Vec<Label>) {
        out.push(self.label);
        match &self.body {
            FgUnlabeled::Bool | FgUnlabeled::Unit => {}
            FgUnlabeled::Fun(a, l, b) => {
                a.labels(out);
                out.push(*l);
                b.labels(out);
            }
            FgUnlabeled::Prod(a, b) | FgUnlabeled::Sum(a, b) => {
                a.labels(out);
                b.labels(out);
            }
            FgUnlabeled::Ref(a) => a.labels(out),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoolOp {
    And,
    Or,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FgExpr {
    Var(String),
    Unit,
    Bool(bool),
    Lam {
        param: String,
        param_ty: FgType,
        latent: Label,
        body: Box<FgExpr>,
    },
    App(Box<FgExpr>, Box<FgExpr>),
    Pair(Box<FgExpr>, Box<FgExpr>),
    Fst(Box<FgExpr>),
    Snd(Box<FgExpr>),
    /// Injections carry both components of the sum they inject into.
    Inl {
        left: FgType,
        right: FgType,
        expr: Box<FgExpr>,
    },
    Inr {
        left: FgType,
        right: FgType,
        expr: Box<FgExpr>,
    },
    Case {
        scrut: Box<FgExpr>,
        left: (String, Box<FgExpr>),
        right: (String, Box<FgExpr>),
    },
    If(Box<FgExpr>, Box<FgExpr>, Box<FgExpr>),
    /// Allocation, annotated with the type of the new cell's contents.
    /// `cell` is the stored type; when absent the initializer's type is used.
    New {
        init: Box<FgExpr>,
        cell: Option<FgType>,
    },
    Deref(Box<FgExpr>),
    Assign(Box<FgExpr>, Box<FgExpr>),
    BoolOp(BoolOp, Box<FgExpr>, Box<FgExpr>),
    Not(Box<FgExpr>),
}

impl FgExpr {
    pub fn var(name: impl Into<String>) -> Self {
        FgExpr::Var(name.into())
    }

    pub fn lam(param: impl Into<String>, param_ty: FgType, latent: Label, body: FgExpr) -> Self {
        FgExpr::Lam { param: param.into(), param_ty, latent, body: Box::new(body) }
    }

    pub fn app(f: FgExpr, a: FgExpr) -> Self {
        FgExpr::App(Box::new(f), Box::new(a))
    }

    pub fn pair(a: FgExpr, b: FgExpr) -> Self {
        FgExpr::Pair(Box::new(a), Box::new(b))
    }

    pub fn fst(e: FgExpr) -> Self {
        FgExpr::Fst(Box::new(e))
    }

    pub fn snd(e: FgExpr) -> Self {
        FgExpr::Snd(Box::new(e))
    }

    pub fn inl(left: FgType, right: FgType, e: FgExpr) -> Self {
        FgExpr::Inl { left, right, expr: Box::new(e) }
    }

    pub fn inr(left: FgType, right: FgType, e: FgExpr) -> Self {
        FgExpr::Inr { left, right, expr: Box::new(e) }
    }

    pub fn case(scrut: FgExpr, x: impl Into<String>, left: FgExpr, y: impl Into<String>, right: FgExpr) -> Self {
        FgExpr::Case { scrut: Box::new(scrut), left: (x.into(), Box::new(left)), right: (y.into(), Box::new(right)) }
    }

    pub fn if_(c: FgExpr, t: FgExpr, e: FgExpr) -> Self {
        FgExpr::If(Box::new(c), Box::new(t), Box::new(e))
    }

    pub fn new_ref(init: FgExpr, cell: FgType) -> Self {
        FgExpr::New { init: Box::new(init), cell: Some(cell) }
    }

    pub fn new_plain(init: FgExpr) -> Self {
        FgExpr::New { init: Box::new(init), cell: None }
    }

    pub fn deref(e: FgExpr) -> Self {
        FgExpr::Deref(Box::new(e))
    }

    pub fn assign(r: FgExpr, v: FgExpr) -> Self {
        FgExpr::Assign(Box::new(r), Box::new(v))
    }

    pub fn and(a: FgExpr, b: FgExpr) -> Self {
        FgExpr::BoolOp(BoolOp::And, Box::new(a), Box::new(b))
    }

    pub fn or(a: FgExpr, b: FgExpr) -> Self {
        FgExpr::BoolOp(BoolOp::Or, Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: FgExpr) -> Self {
        FgExpr::Not(Box::new(e))
    }

    /// Number of expression nodes; annotations are not counted.
    pub fn size(&self) -> usize {
        match self {
            FgExpr::Var(_) | FgExpr::Unit | FgExpr::Bool(_) => 1,
            FgExpr::Lam { body, .. } => 1 + body.size(),
            FgExpr::Fst(e)
            | FgExpr::Snd(e)
            | FgExpr::Deref(e)
            | FgExpr::Not(e)
            | FgExpr::Inl { expr: e, .. }
            | FgExpr::Inr { expr: e, .. }
            | FgExpr::New { init: e, .. } => 1 + e.size(),
            FgExpr::App(a, b) | FgExpr::Pair(a, b) | FgExpr::Assign(a, b) | FgExpr::BoolOp(_, a, b) => {
                1 + a.size() + b.size()
            }
            FgExpr::If(a, b, c) => 1 + a.size() + b.size() + c.size(),
            FgExpr::Case { scrut, left, right } => 1 + scrut.size() + left.1.size() + right.1.size(),
        }
    }

    /// Every identifier mentioned (bound or free).
    pub fn names(&self, out: &mut std::collections::BTreeSet<String>) {
        match self {
            FgExpr::Var(x) => {
                out.insert(x.clone());
            }
            FgExpr::Unit | FgExpr::Bool(_) => {}
            FgExpr::Lam { param, body, .. } => {
                out.insert(param.clone());
                body.names(out);
            }
            FgExpr::Fst(e)
            | FgExpr::Snd(e)
            | FgExpr::Deref(e)
            | FgExpr::Not(e)
            | FgExpr::Inl { expr: e, .. }
            | FgExpr::Inr { expr: e, .. }
            | FgExpr::New { init: e, .. } => e.names(out),
            FgExpr::App(a, b) | FgExpr::Pair(a, b) | FgExpr::Assign(a, b) | FgExpr::BoolOp(_, a, b) => {
                a.names(out);
                b.names(out);
            }
            FgExpr::If(a, b, c) => {
                a.names(out);
                b.names(out);
                c.names(out);
            }
            FgExpr::Case { scrut, left, right } => {
                scrut.names(out);
                out.insert(left.0.clone());
                left.1.names(out);
                out.insert(right.0.clone());
                right.1.names(out);
            }
        }
    }

    /// Every label occurring in annotations.
    pub fn labels(&self, out: &mut Vec<Label>) {
        match self {
            FgExpr::Var(_) | FgExpr::Unit | FgExpr::Bool(_) => {}
            FgExpr::Lam { param_ty, latent, body, .. } => {
                param_ty.labels(out);
                out.push(*latent);
                body.labels(out);
            }
            FgExpr::Inl { left, right, expr } | FgExpr::Inr { left, right, expr } => {
                left.labels(out);
                right.labels(out);
                expr.labels(out);
            }
            FgExpr::New { init, cell } => {
                if let Some(cell) = cell {
                    cell.labels(out);
                }
                init.labels(out);
            }
            FgExpr::Fst(e) | FgExpr::Snd(e) | FgExpr::Deref(e) | FgExpr::Not(e) => e.labels(out),
            FgExpr::App(a, b) | FgExpr::Pair(a, b) | FgExpr::Assign(a, b) | FgExpr::BoolOp(_, a, b) => {
                a.labels(out);
                b.labels(out);
            }
            FgExpr::If(a, b, c) => {
                a.labels(out);
                b.labels(out);
                c.labels(out);
            }
            FgExpr::Case { scrut, left, right } => {
                scrut.labels(out);
                left.1.labels(out);
                right.1.labels(out);
            }
        }
    }
}
