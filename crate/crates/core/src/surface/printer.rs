use crate::cg::{CgCtx, CgExpr, CgType};
use crate::fg::{BoolOp, FgCtx, FgExpr, FgType, FgUnlabeled};
use crate::lattice::{Label, Lattice};
use crate::surface::parser::{Program, SourceFile};

pub const WIDTH: usize = 80;

/// Layout tree: a list keeps its first `keep` items on the opening line
/// when it has to be broken.
enum Doc {
    Atom(String),
    List { items: Vec<Doc>, keep: usize },
}

fn atom(s: impl Into<String>) -> Doc {
    Doc::Atom(s.into())
}

fn list(keep: usize, items: Vec<Doc>) -> Doc {
    Doc::List { items, keep }
}

impl Doc {
    fn flat(&self, out: &mut String) {
        match self {
            Doc::Atom(s) => out.push_str(s),
            Doc::List { items, .. } => {
                out.push('(');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    item.flat(out);
                }
                out.push(')');
            }
        }
    }

    fn flat_string(&self) -> String {
        let mut s = String::new();
        self.flat(&mut s);
        s
    }

    fn render(&self, indent: usize, col: usize, out: &mut String) {
        let flat = self.flat_string();
        let Doc::List { items, keep } = self else {
            out.push_str(&flat);
            return;
        };
        if col + flat.len() <= WIDTH || items.len() <= *keep {
            out.push_str(&flat);
            return;
        }
        out.push('(');
        let mut col = col + 1;
        for (i, item) in items[..*keep].iter().enumerate() {
            if i > 0 {
                out.push(' ');
                col += 1;
            }
            let start = out.len();
            item.render(indent + 2, col, out);
            col += out.len() - start;
        }
        for item in &items[*keep..] {
            out.push('\n');
            out.push_str(&" ".repeat(indent + 2));
            item.render(indent + 2, indent + 2, out);
        }
        out.push(')');
    }
}

/// Canonical printer for labels, types, expressions and files.
pub struct Printer<'l> {
    lattice: &'l Lattice,
}

impl<'l> Printer<'l> {
    pub fn new(lattice: &'l Lattice) -> Self {
        Printer { lattice }
    }

    pub fn label(&self, l: Label) -> String {
        self.lattice.show(l)
    }

    pub fn fg_type(&self, t: &FgType) -> String {
        format!("{}@{}", self.fg_body(&t.body), self.label(t.label))
    }

    fn fg_body(&self, b: &FgUnlabeled) -> String {
        match b {
            FgUnlabeled::Bool => "bool".into(),
            FgUnlabeled::Unit => "unit".into(),
            FgUnlabeled::Fun(a, l, r) => format!("({} ->[{}] {})", self.fg_type(a), self.label(*l), self.fg_type(r)),
            FgUnlabeled::Prod(a, b) => format!("({} * {})", self.fg_type(a), self.fg_type(b)),
            FgUnlabeled::Sum(a, b) => format!("({} + {})", self.fg_type(a), self.fg_type(b)),
            FgUnlabeled::Ref(a) => format!("(ref {})", self.fg_type(a)),
        }
    }

    pub fn cg_type(&self, t: &CgType) -> String {
        match t {
            CgType::Bool => "bool".into(),
            CgType::Unit => "unit".into(),
            CgType::Fun(a, b) => format!("({} -> {})", self.cg_type(a), self.cg_type(b)),
            CgType::Prod(a, b) => format!("({} * {})", self.cg_type(a), self.cg_type(b)),
            CgType::Sum(a, b) => format!("({} + {})", self.cg_type(a), self.cg_type(b)),
            CgType::Ref(l, a) => format!("(ref {} {})", self.label(*l), self.cg_type(a)),
            CgType::Labeled(l, a) => format!("(Labeled {} {})", self.label(*l), self.cg_type(a)),
            CgType::Slio(p, t, a) => format!("(SLIO {} {} {})", self.label(*p), self.label(*t), self.cg_type(a)),
        }
    }

    fn fg_doc(&self, e: &FgExpr) -> Doc {
        let d = |e: &FgExpr| self.fg_doc(e);
        match e {
            FgExpr::Var(x) => atom(x.clone()),
            FgExpr::Unit => atom("()"),
            FgExpr::Bool(b) => atom(b.to_string()),
            FgExpr::Lam { param, param_ty, latent, body } => list(
                3,
                vec![
                    atom("lam"),
                    atom(format!("({param} {})", self.fg_type(param_ty))),
                    atom(format!("[{}]", self.label(*latent))),
                    d(body),
                ],
            ),
            FgExpr::App(f, a) => list(1, vec![atom("app"), d(f), d(a)]),
            FgExpr::Pair(a, b) => list(1, vec![atom("pair"), d(a), d(b)]),
            FgExpr::Fst(a) => list(1, vec![atom("fst"), d(a)]),
            FgExpr::Snd(a) => list(1, vec![atom("snd"), d(a)]),
            FgExpr::Inl { left, right, expr } | FgExpr::Inr { left, right, expr } => {
                let head = if matches!(e, FgExpr::Inl { .. }) { "inl" } else { "inr" };
                let ann = format!("({} + {})", self.fg_type(left), self.fg_type(right));
                list(1, vec![atom(head), d(expr), atom(ann)])
            }
            FgExpr::Case { scrut, left, right } => list(
                2,
                vec![
                    atom("case"),
                    d(scrut),
                    list(1, vec![atom(left.0.clone()), d(&left.1)]),
                    list(1, vec![atom(right.0.clone()), d(&right.1)]),
                ],
            ),
            FgExpr::If(c, t, f) => list(2, vec![atom("if"), d(c), d(t), d(f)]),
            FgExpr::New { init, cell } => {
                let mut items = vec![atom("new"), d(init)];
                if let Some(cell) = cell {
                    items.push(atom(self.fg_type(cell)));
                }
                list(1, items)
            }
            FgExpr::Deref(a) => list(1, vec![atom("deref"), d(a)]),
            FgExpr::Assign(a, b) => list(1, vec![atom("assign"), d(a), d(b)]),
            FgExpr::BoolOp(op, a, b) => list(1, vec![atom(op_name(*op)), d(a), d(b)]),
            FgExpr::Not(a) => list(1, vec![atom("not"), d(a)]),
        }
    }

    fn cg_doc(&self, e: &CgExpr) -> Doc {
        let d = |e: &CgExpr| self.cg_doc(e);
        match e {
            CgExpr::Var(x) => atom(x.clone()),
            CgExpr::Unit => atom("()"),
            CgExpr::Bool(b) => atom(b.to_string()),
            CgExpr::Lam { param, param_ty, body } => {
                list(2, vec![atom("lam"), atom(format!("({param} {})", self.cg_type(param_ty))), d(body)])
            }
            CgExpr::App(f, a) => list(1, vec![atom("app"), d(f), d(a)]),
            CgExpr::Pair(a, b) => list(1, vec![atom("pair"), d(a), d(b)]),
            CgExpr::Fst(a) => list(1, vec![atom("fst"), d(a)]),
            CgExpr::Snd(a) => list(1, vec![atom("snd"), d(a)]),
            CgExpr::Inl { left, right, expr } | CgExpr::Inr { left, right, expr } => {
                let head = if matches!(e, CgExpr::Inl { .. }) { "inl" } else { "inr" };
                let ann = format!("({} + {})", self.cg_type(left), self.cg_type(right));
                list(1, vec![atom(head), d(expr), atom(ann)])
            }
            CgExpr::Case { scrut, left, right } => list(
                2,
                vec![
                    atom("case"),
                    d(scrut),
                    list(1, vec![atom(left.0.clone()), d(&left.1)]),
                    list(1, vec![atom(right.0.clone()), d(&right.1)]),
                ],
            ),
            CgExpr::If(c, t, f) => list(2, vec![atom("if"), d(c), d(t), d(f)]),
            CgExpr::BoolOp(op, a, b) => list(1, vec![atom(op_name(*op)), d(a), d(b)]),
            CgExpr::Not(a) => list(1, vec![atom("not"), d(a)]),
            CgExpr::Label(l, a) => list(2, vec![atom("label"), atom(self.label(*l)), d(a)]),
            CgExpr::Unlabel(a) => list(1, vec![atom("unlabel"), d(a)]),
            CgExpr::ToLabeled(a) => list(1, vec![atom("toLabeled"), d(a)]),
            CgExpr::Ret(a) => list(1, vec![atom("ret"), d(a)]),
            CgExpr::Bind { first, var, body } => {
                list(2, vec![atom("bind"), d(first), list(1, vec![atom(var.clone()), d(body)])])
            }
            CgExpr::New { init, cell } => {
                let mut items = vec![atom("new"), d(init)];
                if let Some((l, payload)) = cell {
                    items.push(atom(self.cg_type(&CgType::labeled(*l, payload.clone()))));
                }
                list(1, items)
            }
            CgExpr::Deref(a) => list(1, vec![atom("deref"), d(a)]),
            CgExpr::Assign(a, b) => list(1, vec![atom("assign"), d(a), d(b)]),
        }
    }

    pub fn fg_expr_flat(&self, e: &FgExpr) -> String {
        self.fg_doc(e).flat_string()
    }

    pub fn cg_expr_flat(&self, e: &CgExpr) -> String {
        self.cg_doc(e).flat_string()
    }

    /// Pretty-print, breaking lines that would exceed [`WIDTH`] columns.
    pub fn fg_expr(&self, e: &FgExpr) -> String {
        let mut out = String::new();
        self.fg_doc(e).render(0, 0, &mut out);
        out
    }

    pub fn cg_expr(&self, e: &CgExpr) -> String {
        let mut out = String::new();
        self.cg_doc(e).render(0, 0, &mut out);
        out
    }

    fn fg_ctx(&self, ctx: &FgCtx) -> String {
        let entries: Vec<String> = ctx.iter().map(|(x, t)| format!("({x} {})", self.fg_type(t))).collect();
        format!("(ctx {})", entries.join(" "))
    }

    fn cg_ctx(&self, ctx: &CgCtx) -> String {
        let entries: Vec<String> = ctx.iter().map(|(x, t)| format!("({x} {})", self.cg_type(t))).collect();
        format!("(ctx {})", entries.join(" "))
    }

    pub fn source_file(&self, file: &SourceFile) -> String {
        let mut out = format!("({} (lattice {})", file.program.language(), self.lattice.describe());
        let (ctx, body) = match &file.program {
            Program::Fg { ctx, body } => {
                let c = (!ctx.is_empty()).then(|| self.fg_ctx(ctx));
                (c, self.fg_doc(body))
            }
            Program::Cg { ctx, body } => {
                let c = (!ctx.is_empty()).then(|| self.cg_ctx(ctx));
                (c, self.cg_doc(body))
            }
        };
        if let Some(ctx) = ctx {
            out.push_str("\n  ");
            out.push_str(&ctx);
        }
        out.push_str("\n  ");
        body.render(2, 2, &mut out);
        out.push_str(")\n");
        out
    }
}

fn op_name(op: BoolOp) -> &'static str {
    match op {
        BoolOp::And => "and",
        BoolOp::Or => "or",
    }
}
