use crate::cg::{CgCtx, CgExpr, CgType};
use crate::ctx::Ctx;
use crate::fg::{BoolOp, FgCtx, FgExpr, FgType, FgUnlabeled};
use crate::lattice::{Label, LabelTerm, Lattice};
use crate::surface::lexer::{lex, ParseError, Pos, Tok};

/// A parsed `.ifc` file.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceFile {
    pub lattice: Lattice,
    pub program: Program,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Program {
    Fg { ctx: FgCtx, body: FgExpr },
    Cg { ctx: CgCtx, body: CgExpr },
}

impl Program {
    pub fn language(&self) -> &'static str {
        match self {
            Program::Fg { .. } => "fg",
            Program::Cg { .. } => "cg",
        }
    }
}

const KEYWORDS: &[&str] = &[
    "lam",
    "app",
    "pair",
    "fst",
    "snd",
    "inl",
    "inr",
    "case",
    "if",
    "new",
    "deref",
    "assign",
    "and",
    "or",
    "not",
    "label",
    "unlabel",
    "toLabeled",
    "ret",
    "bind",
    "true",
    "false",
    "fg",
    "cg",
    "lattice",
    "ctx",
];

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        && !KEYWORDS.contains(&s)
}

pub struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
    lattice: Option<Lattice>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    pub fn new(text: &str) -> PResult<Self> {
        Ok(Parser { toks: lex(text)?, i: 0, lattice: None })
    }

    pub fn with_lattice(text: &str, lattice: &Lattice) -> PResult<Self> {
        let mut p = Parser::new(text)?;
        p.lattice = Some(lattice.clone());
        Ok(p)
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(ParseError::new(self.pos(), message))
    }

    fn unexpected<T>(&self, wanted: &str) -> PResult<T> {
        self.error(format!("expected {wanted}, found {}", self.peek()))
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if *self.peek() == tok {
            self.next();
            Ok(())
        } else {
            self.unexpected(&tok.to_string())
        }
    }

    fn atom(&mut self, wanted: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Atom(a) => {
                self.next();
                Ok(a)
            }
            _ => self.unexpected(wanted),
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<()> {
        match self.peek() {
            Tok::Atom(a) if a == kw => {
                self.next();
                Ok(())
            }
            _ => self.unexpected(&format!("`{kw}`")),
        }
    }

    fn peek_atom(&self) -> Option<&str> {
        match self.peek() {
            Tok::Atom(a) => Some(a),
            _ => None,
        }
    }

    pub fn finish(&mut self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.unexpected("end of input")
        }
    }

    fn ident(&mut self) -> PResult<String> {
        let pos = self.pos();
        let name = self.atom("an identifier")?;
        if is_identifier(&name) {
            Ok(name)
        } else {
            Err(ParseError::new(pos, format!("`{name}` is not a valid identifier")))
        }
    }

    fn lattice(&self) -> &Lattice {
        self.lattice.as_ref().expect("lattice is set before labels are parsed")
    }

    // ---- lattices and labels ----

    pub fn lattice_decl(&mut self) -> PResult<Lattice> {
        let pos = self.pos();
        let result = match self.peek().clone() {
            Tok::Atom(a) if a == "2pt" => {
                self.next();
                Ok(Lattice::two_point())
            }
            Tok::LParen => {
                self.next();
                let kind = self.atom("`powerset` or `product`")?;
                let l = match kind.as_str() {
                    "powerset" => {
                        let mut atoms = Vec::new();
                        while let Tok::Atom(_) = self.peek() {
                            atoms.push(self.ident()?);
                        }
                        Lattice::powerset(atoms)
                    }
                    "product" => {
                        let a = self.lattice_decl()?;
                        let b = self.lattice_decl()?;
                        Lattice::product(a, b)
                    }
                    other => return Err(ParseError::new(pos, format!("unknown lattice `{other}`"))),
                };
                self.expect(Tok::RParen)?;
                l
            }
            _ => return self.unexpected("a lattice"),
        };
        result.map_err(|e| ParseError::new(pos, e.to_string()))
    }

    fn label_term(&mut self) -> PResult<LabelTerm> {
        match self.peek().clone() {
            Tok::Atom(a) => {
                self.next();
                Ok(LabelTerm::Named(a))
            }
            Tok::LBrace => {
                self.next();
                let mut atoms = Vec::new();
                if *self.peek() != Tok::RBrace {
                    atoms.push(self.atom("an atom")?);
                    while *self.peek() == Tok::Comma {
                        self.next();
                        atoms.push(self.atom("an atom")?);
                    }
                }
                self.expect(Tok::RBrace)?;
                Ok(LabelTerm::Set(atoms))
            }
            Tok::LParen => {
                self.next();
                let a = self.label_term()?;
                self.expect(Tok::Comma)?;
                let b = self.label_term()?;
                self.expect(Tok::RParen)?;
                Ok(LabelTerm::Pair(Box::new(a), Box::new(b)))
            }
            _ => self.unexpected("a label"),
        }
    }

    pub fn label(&mut self) -> PResult<Label> {
        let pos = self.pos();
        let term = self.label_term()?;
        self.lattice().resolve(&term).map_err(|e| ParseError::new(pos, e.to_string()))
    }

    fn bracket_label(&mut self) -> PResult<Label> {
        self.expect(Tok::LBrack)?;
        let l = self.label()?;
        self.expect(Tok::RBrack)?;
        Ok(l)
    }

    // ---- FG types ----

    pub fn fg_type(&mut self) -> PResult<FgType> {
        let body = self.fg_body()?;
        self.expect(Tok::At)?;
        let label = self.label()?;
        Ok(FgType::new(body, label))
    }

    fn fg_body(&mut self) -> PResult<FgUnlabeled> {
        match self.peek().clone() {
            Tok::Atom(a) if a == "bool" => {
                self.next();
                Ok(FgUnlabeled::Bool)
            }
            Tok::Atom(a) if a == "unit" => {
                self.next();
                Ok(FgUnlabeled::Unit)
            }
            Tok::LParen => {
                self.next();
                let body = if self.peek_atom() == Some("ref") {
                    self.next();
                    FgUnlabeled::Ref(Box::new(self.fg_type()?))
                } else {
                    let a = Box::new(self.fg_type()?);
                    let op = self.atom("`->`, `*` or `+`")?;
                    match op.as_str() {
                        "->" => {
                            let latent = self.bracket_label()?;
                            FgUnlabeled::Fun(a, latent, Box::new(self.fg_type()?))
                        }
                        "*" => FgUnlabeled::Prod(a, Box::new(self.fg_type()?)),
                        "+" => FgUnlabeled::Sum(a, Box::new(self.fg_type()?)),
                        other => return self.error(format!("unknown type operator `{other}`")),
                    }
                };
                self.expect(Tok::RParen)?;
                Ok(body)
            }
            _ => self.unexpected("a type"),
        }
    }

    fn fg_sum_annotation(&mut self) -> PResult<(FgType, FgType)> {
        let pos = self.pos();
        match self.fg_body()? {
            FgUnlabeled::Sum(a, b) => Ok((*a, *b)),
            _ => Err(ParseError::new(pos, "expected a sum type annotation")),
        }
    }

    // ---- CG types ----

    pub fn cg_type(&mut self) -> PResult<CgType> {
        match self.peek().clone() {
            Tok::Atom(a) if a == "bool" => {
                self.next();
                Ok(CgType::Bool)
            }
            Tok::Atom(a) if a == "unit" => {
                self.next();
                Ok(CgType::Unit)
            }
            Tok::LParen => {
                self.next();
                let t = match self.peek_atom() {
                    Some("ref") => {
                        self.next();
                        let l = self.label()?;
                        CgType::reference(l, self.cg_type()?)
                    }
                    Some("Labeled") => {
                        self.next();
                        let l = self.label()?;
                        CgType::labeled(l, self.cg_type()?)
                    }
                    Some("SLIO") => {
                        self.next();
                        let pc = self.label()?;
                        let taint = self.label()?;
                        CgType::slio(pc, taint, self.cg_type()?)
                    }
                    _ => {
                        let a = self.cg_type()?;
                        let op = self.atom("`->`, `*` or `+`")?;
                        let b = self.cg_type()?;
                        match op.as_str() {
                            "->" => CgType::fun(a, b),
                            "*" => CgType::prod(a, b),
                            "+" => CgType::sum(a, b),
                            other => return self.error(format!("unknown type operator `{other}`")),
                        }
                    }
                };
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            _ => self.unexpected("a type"),
        }
    }

    fn cg_sum_annotation(&mut self) -> PResult<(CgType, CgType)> {
        let pos = self.pos();
        match self.cg_type()? {
            CgType::Sum(a, b) => Ok((*a, *b)),
            _ => Err(ParseError::new(pos, "expected a sum type annotation")),
        }
    }

    // ---- expressions ----

    fn binder<E>(&mut self, body: impl FnOnce(&mut Self) -> PResult<E>) -> PResult<(String, Box<E>)> {
        self.expect(Tok::LParen)?;
        let x = self.ident()?;
        let e = body(self)?;
        self.expect(Tok::RParen)?;
        Ok((x, Box::new(e)))
    }

    /// Common handling of atoms and `()`; returns `None` at an application form.
    fn leaf<E>(&mut self, unit: E, lit: impl Fn(bool) -> E, var: impl Fn(String) -> E) -> PResult<Option<E>> {
        match self.peek().clone() {
            Tok::Atom(a) if a == "true" || a == "false" => {
                self.next();
                Ok(Some(lit(a == "true")))
            }
            Tok::Atom(a) if a == "_" => self.error("`_` may only appear as a binder"),
            Tok::Atom(_) => Ok(Some(var(self.ident()?))),
            Tok::LParen if *self.peek_at(1) == Tok::RParen => {
                self.next();
                self.next();
                Ok(Some(unit))
            }
            Tok::LParen => Ok(None),
            _ => self.unexpected("an expression"),
        }
    }

    pub fn fg_expr(&mut self) -> PResult<FgExpr> {
        stacker::maybe_grow(crate::RED_ZONE, crate::STACK_CHUNK, || self.fg_expr_inner())
    }

    fn fg_expr_inner(&mut self) -> PResult<FgExpr> {
        if let Some(e) = self.leaf(FgExpr::Unit, FgExpr::Bool, FgExpr::Var)? {
            return Ok(e);
        }
        self.expect(Tok::LParen)?;
        let pos = self.pos();
        let head = self.atom("a keyword")?;
        let e = match head.as_str() {
            "lam" => {
                self.expect(Tok::LParen)?;
                let param = self.ident()?;
                let param_ty = self.fg_type()?;
                self.expect(Tok::RParen)?;
                let latent = self.bracket_label()?;
                FgExpr::lam(param, param_ty, latent, self.fg_expr()?)
            }
            "app" => FgExpr::app(self.fg_expr()?, self.fg_expr()?),
            "pair" => FgExpr::pair(self.fg_expr()?, self.fg_expr()?),
            "fst" => FgExpr::fst(self.fg_expr()?),
            "snd" => FgExpr::snd(self.fg_expr()?),
            "inl" | "inr" => {
                let e = self.fg_expr()?;
                let (left, right) = self.fg_sum_annotation()?;
                if head == "inl" {
                    FgExpr::inl(left, right, e)
                } else {
                    FgExpr::inr(left, right, e)
                }
            }
            "case" => {
                let scrut = Box::new(self.fg_expr()?);
                let left = self.binder(Self::fg_expr)?;
                let right = self.binder(Self::fg_expr)?;
                FgExpr::Case { scrut, left, right }
            }
            "if" => FgExpr::if_(self.fg_expr()?, self.fg_expr()?, self.fg_expr()?),
            "new" => {
                let init = self.fg_expr()?;
                if *self.peek() == Tok::RParen {
                    FgExpr::new_plain(init)
                } else {
                    FgExpr::new_ref(init, self.fg_type()?)
                }
            }
            "deref" => FgExpr::deref(self.fg_expr()?),
            "assign" => FgExpr::assign(self.fg_expr()?, self.fg_expr()?),
            "and" => FgExpr::BoolOp(BoolOp::And, Box::new(self.fg_expr()?), Box::new(self.fg_expr()?)),
            "or" => FgExpr::BoolOp(BoolOp::Or, Box::new(self.fg_expr()?), Box::new(self.fg_expr()?)),
            "not" => FgExpr::not(self.fg_expr()?),
            other => return Err(ParseError::new(pos, format!("unknown fg expression form `{other}`"))),
        };
        self.expect(Tok::RParen)?;
        Ok(e)
    }

    pub fn cg_expr(&mut self) -> PResult<CgExpr> {
        stacker::maybe_grow(crate::RED_ZONE, crate::STACK_CHUNK, || self.cg_expr_inner())
    }

    fn cg_expr_inner(&mut self) -> PResult<CgExpr> {
        if let Some(e) = self.leaf(CgExpr::Unit, CgExpr::Bool, CgExpr::Var)? {
            return Ok(e);
        }
        self.expect(Tok::LParen)?;
        let pos = self.pos();
        let head = self.atom("a keyword")?;
        let e = match head.as_str() {
            "lam" => {
                self.expect(Tok::LParen)?;
                let param = self.ident()?;
                let param_ty = self.cg_type()?;
                self.expect(Tok::RParen)?;
                CgExpr::lam(param, param_ty, self.cg_expr()?)
            }
            "app" => CgExpr::app(self.cg_expr()?, self.cg_expr()?),
            "pair" => CgExpr::pair(self.cg_expr()?, self.cg_expr()?),
            "fst" => CgExpr::fst(self.cg_expr()?),
            "snd" => CgExpr::snd(self.cg_expr()?),
            "inl" | "inr" => {
                let e = self.cg_expr()?;
                let (left, right) = self.cg_sum_annotation()?;
                if head == "inl" {
                    CgExpr::inl(left, right, e)
                } else {
                    CgExpr::inr(left, right, e)
                }
            }
            "case" => {
                let scrut = Box::new(self.cg_expr()?);
                let left = self.binder(Self::cg_expr)?;
                let right = self.binder(Self::cg_expr)?;
                CgExpr::Case { scrut, left, right }
            }
            "if" => CgExpr::if_(self.cg_expr()?, self.cg_expr()?, self.cg_expr()?),
            "and" => CgExpr::and(self.cg_expr()?, self.cg_expr()?),
            "or" => CgExpr::or(self.cg_expr()?, self.cg_expr()?),
            "not" => CgExpr::not(self.cg_expr()?),
            "label" => {
                let l = self.label()?;
                CgExpr::label(l, self.cg_expr()?)
            }
            "unlabel" => CgExpr::unlabel(self.cg_expr()?),
            "toLabeled" => CgExpr::to_labeled(self.cg_expr()?),
            "ret" => CgExpr::ret(self.cg_expr()?),
            "bind" => {
                let first = Box::new(self.cg_expr()?);
                let (var, body) = self.binder(Self::cg_expr)?;
                CgExpr::Bind { first, var, body }
            }
            "new" => {
                let init = self.cg_expr()?;
                if *self.peek() == Tok::RParen {
                    CgExpr::new_plain(init)
                } else {
                    let pos = self.pos();
                    match self.cg_type()? {
                        CgType::Labeled(l, payload) => CgExpr::new_ref(init, l, *payload),
                        _ => return Err(ParseError::new(pos, "a cell annotation must be a Labeled type")),
                    }
                }
            }
            "deref" => CgExpr::deref(self.cg_expr()?),
            "assign" => CgExpr::assign(self.cg_expr()?, self.cg_expr()?),
            other => return Err(ParseError::new(pos, format!("unknown cg expression form `{other}`"))),
        };
        self.expect(Tok::RParen)?;
        Ok(e)
    }

    // ---- files ----

    /// Parse a whole file. `lattice_override` replaces the declared lattice.
    pub fn source_file(&mut self, lattice_override: Option<&Lattice>) -> PResult<SourceFile> {
        self.expect(Tok::LParen)?;
        let pos = self.pos();
        let lang = self.atom("`fg` or `cg`")?;
        if lang != "fg" && lang != "cg" {
            return Err(ParseError::new(pos, format!("unknown language `{lang}`, expected `fg` or `cg`")));
        }
        self.expect(Tok::LParen)?;
        self.keyword("lattice")?;
        let declared = self.lattice_decl()?;
        self.expect(Tok::RParen)?;
        let lattice = lattice_override.cloned().unwrap_or(declared);
        self.lattice = Some(lattice.clone());
        let has_ctx = *self.peek() == Tok::LParen && self.peek_at(1) == &Tok::Atom("ctx".into());
        let program = if lang == "fg" {
            let ctx = if has_ctx { self.ctx(Self::fg_type)? } else { Ctx::new() };
            Program::Fg { ctx, body: self.fg_expr()? }
        } else {
            let ctx = if has_ctx { self.ctx(Self::cg_type)? } else { Ctx::new() };
            Program::Cg { ctx, body: self.cg_expr()? }
        };
        self.expect(Tok::RParen)?;
        self.finish()?;
        Ok(SourceFile { lattice, program })
    }

    fn ctx<T>(&mut self, ty: impl Fn(&mut Self) -> PResult<T>) -> PResult<Ctx<T>> {
        self.expect(Tok::LParen)?;
        self.keyword("ctx")?;
        let mut ctx = Ctx::new();
        while *self.peek() == Tok::LParen {
            self.next();
            let x = self.ident()?;
            let t = ty(self)?;
            self.expect(Tok::RParen)?;
            ctx.push(x, t);
        }
        self.expect(Tok::RParen)?;
        Ok(ctx)
    }
}

fn whole<T>(text: &str, lattice: &Lattice, f: impl FnOnce(&mut Parser) -> PResult<T>) -> PResult<T> {
    let mut p = Parser::with_lattice(text, lattice)?;
    let out = f(&mut p)?;
    p.finish()?;
    Ok(out)
}

pub fn parse_source(text: &str) -> PResult<SourceFile> {
    Parser::new(text)?.source_file(None)
}

pub fn parse_source_with(text: &str, lattice_override: Option<&Lattice>) -> PResult<SourceFile> {
    Parser::new(text)?.source_file(lattice_override)
}

pub fn parse_lattice(text: &str) -> PResult<Lattice> {
    let mut p = Parser::new(text)?;
    let l = p.lattice_decl()?;
    p.finish()?;
    Ok(l)
}

pub fn parse_label(lattice: &Lattice, text: &str) -> PResult<Label> {
    whole(text, lattice, Parser::label)
}

pub fn parse_fg_type(lattice: &Lattice, text: &str) -> PResult<FgType> {
    whole(text, lattice, Parser::fg_type)
}

pub fn parse_cg_type(lattice: &Lattice, text: &str) -> PResult<CgType> {
    whole(text, lattice, Parser::cg_type)
}

pub fn parse_fg_expr(lattice: &Lattice, text: &str) -> PResult<FgExpr> {
    whole(text, lattice, Parser::fg_expr)
}

pub fn parse_cg_expr(lattice: &Lattice, text: &str) -> PResult<CgExpr> {
    whole(text, lattice, Parser::cg_expr)
}
