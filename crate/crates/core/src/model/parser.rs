//! Recursive-descent parser followed by a name-resolution and type-checking
//! pass. Parsing keeps names as written; resolution turns them into indices.

use std::collections::HashMap;

use super::lexer::{Tok, Token};
use super::{
    Assign, BinOp, Channel, DiagCode, Diagnostic, Expr, Model, Pos, Process, Sync, Transition,
    UnOp, VarDecl, VarRef, VarType,
};

const KEYWORDS: &[&str] = &[
    "byte", "int", "channel", "process", "state", "init", "accept", "trans", "guard", "sync",
    "effect", "system", "async", "property", "true", "false",
];

const MAX_LOCATIONS: usize = 256;
const MAX_CAPACITY: usize = 255;

type Name = (String, Pos);

struct RawVar {
    ty: VarType,
    name: Name,
    init: Option<(i64, Pos)>,
}

enum RawExprKind {
    Int(i64),
    Bool(bool),
    Name(String),
    Qualified(String, String),
    Unary(UnOp, Box<RawExpr>),
    Binary(BinOp, Box<RawExpr>, Box<RawExpr>),
}

struct RawExpr {
    kind: RawExprKind,
    pos: Pos,
}

enum RawSync {
    Send(Name, RawExpr),
    Receive(Name, Name),
}

struct RawTrans {
    from: Name,
    to: Name,
    pos: Pos,
    guard: Option<RawExpr>,
    sync: Option<(RawSync, Pos)>,
    effects: Vec<(Name, RawExpr)>,
}

struct RawProcess {
    name: Name,
    locals: Vec<RawVar>,
    states: Vec<Name>,
    init: Name,
    accept: Vec<Name>,
    trans: Vec<RawTrans>,
}

#[derive(Default)]
struct RawModel {
    globals: Vec<RawVar>,
    channels: Vec<(Name, Option<(i64, Pos)>)>,
    processes: Vec<RawProcess>,
    property: Option<Name>,
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
}

fn syntax(pos: Pos, msg: impl Into<String>) -> Diagnostic {
    Diagnostic::new(DiagCode::Syntax, pos, msg)
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Int(v) => format!("`{v}`"),
        Tok::Sym(s) => format!("`{s}`"),
        Tok::Eof => "end of input".into(),
    }
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.i]
    }

    fn peek_tok(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn at_sym(&self, s: &str) -> bool {
        matches!(self.peek_tok(), Tok::Sym(x) if *x == s)
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek_tok(), Tok::Ident(x) if x == kw)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        let hit = self.at_sym(s);
        if hit {
            self.bump();
        }
        hit
    }

    fn expect_sym(&mut self, s: &str) -> Result<Pos, Diagnostic> {
        let t = self.peek().clone();
        if self.eat_sym(s) {
            Ok(t.pos)
        } else {
            Err(syntax(t.pos, format!("expected `{s}`, found {}", describe(&t.tok))))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<Pos, Diagnostic> {
        let t = self.peek().clone();
        if self.at_kw(kw) {
            self.bump();
            Ok(t.pos)
        } else {
            Err(syntax(t.pos, format!("expected `{kw}`, found {}", describe(&t.tok))))
        }
    }

    fn expect_name(&mut self) -> Result<Name, Diagnostic> {
        let t = self.bump();
        match t.tok {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => Ok((s, t.pos)),
            other => Err(syntax(t.pos, format!("expected a name, found {}", describe(&other)))),
        }
    }

    fn name_list(&mut self) -> Result<Vec<Name>, Diagnostic> {
        let mut names = vec![self.expect_name()?];
        while self.eat_sym(",") {
            names.push(self.expect_name()?);
        }
        Ok(names)
    }

    fn signed_int(&mut self) -> Result<(i64, Pos), Diagnostic> {
        let pos = self.peek().pos;
        let neg = self.eat_sym("-");
        let t = self.bump();
        match t.tok {
            Tok::Int(v) => Ok((if neg { -v } else { v }, pos)),
            other => Err(syntax(t.pos, format!("expected an integer, found {}", describe(&other)))),
        }
    }

    fn var_decl(&mut self) -> Result<RawVar, Diagnostic> {
        let ty = if self.at_kw("byte") { VarType::Byte } else { VarType::Int };
        self.bump();
        let name = self.expect_name()?;
        let init = if self.eat_sym("=") { Some(self.signed_int()?) } else { None };
        self.expect_sym(";")?;
        Ok(RawVar { ty, name, init })
    }

    fn model(&mut self) -> Result<RawModel, Diagnostic> {
        let mut m = RawModel::default();
        let mut system_seen = false;
        loop {
            let t = self.peek().clone();
            match &t.tok {
                Tok::Eof => break,
                Tok::Ident(kw) if kw == "byte" || kw == "int" => m.globals.push(self.var_decl()?),
                Tok::Ident(kw) if kw == "channel" => {
                    self.bump();
                    let name = self.expect_name()?;
                    let cap = if self.eat_sym("[") {
                        let c = self.signed_int()?;
                        self.expect_sym("]")?;
                        Some(c)
                    } else {
                        None
                    };
                    self.expect_sym(";")?;
                    m.channels.push((name, cap));
                }
                Tok::Ident(kw) if kw == "process" => m.processes.push(self.process()?),
                Tok::Ident(kw) if kw == "system" => {
                    self.bump();
                    self.expect_kw("async")?;
                    self.expect_sym(";")?;
                    if system_seen {
                        return Err(syntax(t.pos, "duplicate `system` declaration"));
                    }
                    system_seen = true;
                }
                Tok::Ident(kw) if kw == "property" => {
                    self.bump();
                    let name = self.expect_name()?;
                    self.expect_sym(";")?;
                    if m.property.is_some() {
                        return Err(syntax(t.pos, "duplicate `property` declaration"));
                    }
                    m.property = Some(name);
                }
                other => {
                    return Err(syntax(t.pos, format!("expected a declaration, found {}", describe(other))))
                }
            }
        }
        Ok(m)
    }

    fn process(&mut self) -> Result<RawProcess, Diagnostic> {
        self.expect_kw("process")?;
        let name = self.expect_name()?;
        self.expect_sym("{")?;
        let mut locals = Vec::new();
        while self.at_kw("byte") || self.at_kw("int") {
            locals.push(self.var_decl()?);
        }
        self.expect_kw("state")?;
        let states = self.name_list()?;
        self.expect_sym(";")?;
        self.expect_kw("init")?;
        let init = self.expect_name()?;
        self.expect_sym(";")?;
        let mut accept = Vec::new();
        if self.at_kw("accept") {
            self.bump();
            accept = self.name_list()?;
            self.expect_sym(";")?;
        }
        let mut trans = Vec::new();
        while self.at_kw("trans") {
            trans.push(self.transition()?);
        }
        self.expect_sym("}")?;
        Ok(RawProcess {
            name,
            locals,
            states,
            init,
            accept,
            trans,
        })
    }

    fn transition(&mut self) -> Result<RawTrans, Diagnostic> {
        let pos = self.expect_kw("trans")?;
        let from = self.expect_name()?;
        self.expect_sym("->")?;
        let to = self.expect_name()?;
        self.expect_sym("{")?;
        let mut guard = None;
        let mut sync = None;
        let mut effects = Vec::new();
        if self.at_kw("guard") {
            self.bump();
            guard = Some(self.expr()?);
            self.expect_sym(";")?;
        }
        if self.at_kw("sync") {
            let spos = self.bump().pos;
            let chan = self.expect_name()?;
            let s = if self.eat_sym("!") {
                RawSync::Send(chan, self.expr()?)
            } else if self.eat_sym("?") {
                RawSync::Receive(chan, self.expect_name()?)
            } else {
                let t = self.peek();
                return Err(syntax(t.pos, format!("expected `!` or `?`, found {}", describe(&t.tok))));
            };
            self.expect_sym(";")?;
            sync = Some((s, spos));
        }
        if self.at_kw("effect") {
            self.bump();
            loop {
                let target = self.expect_name()?;
                self.expect_sym("=")?;
                effects.push((target, self.expr()?));
                if !self.eat_sym(",") {
                    break;
                }
            }
            self.expect_sym(";")?;
        }
        self.expect_sym("}")?;
        Ok(RawTrans {
            from,
            to,
            pos,
            guard,
            sync,
            effects,
        })
    }

    fn expr(&mut self) -> Result<RawExpr, Diagnostic> {
        self.binary(0)
    }

    fn binary(&mut self, level: usize) -> Result<RawExpr, Diagnostic> {
        const LEVELS: &[&[(&str, BinOp)]] = &[
            &[("||", BinOp::Or)],
            &[("&&", BinOp::And)],
            &[("==", BinOp::Eq), ("!=", BinOp::Ne)],
            &[("<=", BinOp::Le), (">=", BinOp::Ge), ("<", BinOp::Lt), (">", BinOp::Gt)],
            &[("+", BinOp::Add), ("-", BinOp::Sub)],
            &[("*", BinOp::Mul), ("/", BinOp::Div), ("%", BinOp::Rem)],
        ];
        if level == LEVELS.len() {
            return self.unary();
        }
        let mut lhs = self.binary(level + 1)?;
        'outer: loop {
            for &(sym, op) in LEVELS[level] {
                if self.at_sym(sym) {
                    let pos = self.bump().pos;
                    let rhs = self.binary(level + 1)?;
                    lhs = RawExpr {
                        kind: RawExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
                        pos,
                    };
                    continue 'outer;
                }
            }
            return Ok(lhs);
        }
    }

    fn unary(&mut self) -> Result<RawExpr, Diagnostic> {
        let pos = self.peek().pos;
        for (sym, op) in [("!", UnOp::Not), ("-", UnOp::Neg)] {
            if self.eat_sym(sym) {
                let inner = self.unary()?;
                return Ok(RawExpr {
                    kind: RawExprKind::Unary(op, Box::new(inner)),
                    pos,
                });
            }
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<RawExpr, Diagnostic> {
        let t = self.bump();
        let kind = match t.tok {
            Tok::Int(v) => RawExprKind::Int(v),
            Tok::Sym("(") => {
                let e = self.expr()?;
                self.expect_sym(")")?;
                return Ok(e);
            }
            Tok::Ident(ref s) if s == "true" => RawExprKind::Bool(true),
            Tok::Ident(ref s) if s == "false" => RawExprKind::Bool(false),
            Tok::Ident(ref s) if !KEYWORDS.contains(&s.as_str()) => {
                if self.eat_sym(".") {
                    let (member, _) = self.expect_name()?;
                    RawExprKind::Qualified(s.clone(), member)
                } else {
                    RawExprKind::Name(s.clone())
                }
            }
            other => {
                return Err(syntax(t.pos, format!("expected an expression, found {}", describe(&other))))
            }
        };
        Ok(RawExpr { kind, pos: t.pos })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ty {
    Int,
    Bool,
}

impl Ty {
    fn name(self) -> &'static str {
        match self {
            Ty::Int => "int",
            Ty::Bool => "bool",
        }
    }
}

/// Name tables used during resolution.
struct Scope<'a> {
    globals: HashMap<&'a str, usize>,
    channels: HashMap<&'a str, usize>,
    processes: HashMap<&'a str, usize>,
    locals: Vec<HashMap<&'a str, usize>>,
    locations: Vec<HashMap<&'a str, usize>>,
}

fn unknown(pos: Pos, what: &str, name: &str) -> Diagnostic {
    Diagnostic::new(DiagCode::UnknownIdentifier, pos, format!("unknown {what} `{name}`"))
}

fn mismatch(pos: Pos, expected: Ty, found: Ty) -> Diagnostic {
    Diagnostic::new(
        DiagCode::TypeMismatch,
        pos,
        format!("expected {} expression, found {}", expected.name(), found.name()),
    )
}

impl<'a> Scope<'a> {
    fn variable(&self, process: usize, name: &str, pos: Pos) -> Result<VarRef, Diagnostic> {
        if let Some(&var) = self.locals[process].get(name) {
            Ok(VarRef::Local { process, var })
        } else if let Some(&g) = self.globals.get(name) {
            Ok(VarRef::Global(g))
        } else {
            Err(unknown(pos, "variable", name))
        }
    }

    fn channel(&self, name: &Name) -> Result<usize, Diagnostic> {
        self.channels
            .get(name.0.as_str())
            .copied()
            .ok_or_else(|| unknown(name.1, "channel", &name.0))
    }

    fn expr(&self, process: usize, e: &RawExpr) -> Result<(Expr, Ty), Diagnostic> {
        Ok(match &e.kind {
            RawExprKind::Int(v) => {
                let v = i32::try_from(*v).map_err(|_| {
                    Diagnostic::new(DiagCode::InvalidDeclaration, e.pos, format!("literal {v} out of range"))
                })?;
                (Expr::Const(v), Ty::Int)
            }
            RawExprKind::Bool(b) => (Expr::Const(*b as i32), Ty::Bool),
            RawExprKind::Name(n) => (Expr::Var(self.variable(process, n, e.pos)?), Ty::Int),
            RawExprKind::Qualified(p, member) => {
                let &pi = self
                    .processes
                    .get(p.as_str())
                    .ok_or_else(|| unknown(e.pos, "process", p))?;
                if let Some(&location) = self.locations[pi].get(member.as_str()) {
                    (Expr::AtLocation { process: pi, location }, Ty::Bool)
                } else if let Some(&var) = self.locals[pi].get(member.as_str()) {
                    (Expr::Var(VarRef::Local { process: pi, var }), Ty::Int)
                } else {
                    return Err(unknown(e.pos, &format!("location or variable of `{p}`"), member));
                }
            }
            RawExprKind::Unary(op, inner) => {
                let (x, ty) = self.expr(process, inner)?;
                let want = if *op == UnOp::Not { Ty::Bool } else { Ty::Int };
                if ty != want {
                    return Err(mismatch(inner.pos, want, ty));
                }
                (Expr::Unary(*op, Box::new(x)), want)
            }
            RawExprKind::Binary(op, a, b) => {
                let (x, tx) = self.expr(process, a)?;
                let (y, ty) = self.expr(process, b)?;
                let (operand, result) = match op {
                    BinOp::And | BinOp::Or => (Some(Ty::Bool), Ty::Bool),
                    BinOp::Eq | BinOp::Ne => (None, Ty::Bool),
                    BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => (Some(Ty::Int), Ty::Bool),
                    _ => (Some(Ty::Int), Ty::Int),
                };
                let operand = operand.unwrap_or(tx);
                if tx != operand {
                    return Err(mismatch(a.pos, operand, tx));
                }
                if ty != operand {
                    return Err(mismatch(b.pos, operand, ty));
                }
                (Expr::Binary(*op, Box::new(x), Box::new(y)), result)
            }
        })
    }

    fn typed(&self, process: usize, e: &RawExpr, want: Ty) -> Result<Expr, Diagnostic> {
        let (x, ty) = self.expr(process, e)?;
        if ty != want {
            return Err(mismatch(e.pos, want, ty));
        }
        Ok(x)
    }
}

fn unique<'a>(
    names: impl IntoIterator<Item = &'a Name>,
    table: &mut HashMap<&'a str, usize>,
    what: &str,
) -> Result<(), Diagnostic> {
    for (i, (name, pos)) in names.into_iter().enumerate() {
        if table.insert(name.as_str(), i).is_some() {
            return Err(Diagnostic::new(
                DiagCode::DuplicateName,
                *pos,
                format!("duplicate {what} `{name}`"),
            ));
        }
    }
    Ok(())
}

fn var_decl(v: &RawVar) -> Result<VarDecl, Diagnostic> {
    let init = match v.init {
        None => 0,
        Some((value, pos)) => {
            let (lo, hi) = v.ty.range();
            if value < lo as i64 || value > hi as i64 {
                return Err(Diagnostic::new(
                    DiagCode::InvalidDeclaration,
                    pos,
                    format!("initializer {value} of `{}` outside {lo}..={hi}", v.name.0),
                ));
            }
            value as i32
        }
    };
    Ok(VarDecl {
        name: v.name.0.clone(),
        ty: v.ty,
        init,
    })
}

fn resolve(raw: RawModel) -> Result<Model, Diagnostic> {
    // one namespace for globals, channels and processes
    let mut top: HashMap<&str, usize> = HashMap::new();
    unique(
        raw.globals
            .iter()
            .map(|g| &g.name)
            .chain(raw.channels.iter().map(|c| &c.0))
            .chain(raw.processes.iter().map(|p| &p.name)),
        &mut top,
        "name",
    )?;

    let mut scope = Scope {
        globals: raw.globals.iter().enumerate().map(|(i, g)| (g.name.0.as_str(), i)).collect(),
        channels: raw.channels.iter().enumerate().map(|(i, c)| (c.0 .0.as_str(), i)).collect(),
        processes: raw.processes.iter().enumerate().map(|(i, p)| (p.name.0.as_str(), i)).collect(),
        locals: Vec::new(),
        locations: Vec::new(),
    };
    for p in &raw.processes {
        let mut names = HashMap::new();
        unique(p.locals.iter().map(|l| &l.name).chain(&p.states), &mut names, "name")?;
        scope.locals.push(p.locals.iter().enumerate().map(|(i, l)| (l.name.0.as_str(), i)).collect());
        scope.locations.push(p.states.iter().enumerate().map(|(i, s)| (s.0.as_str(), i)).collect());
        if p.states.len() > MAX_LOCATIONS {
            return Err(Diagnostic::new(
                DiagCode::InvalidDeclaration,
                p.states[MAX_LOCATIONS].1,
                format!("process `{}` has more than {MAX_LOCATIONS} locations", p.name.0),
            ));
        }
    }

    let globals = raw.globals.iter().map(var_decl).collect::<Result<Vec<_>, _>>()?;
    let mut channels = Vec::new();
    for (name, cap) in &raw.channels {
        let capacity = match *cap {
            None => 0,
            Some((c, pos)) => {
                if !(0..=MAX_CAPACITY as i64).contains(&c) {
                    return Err(Diagnostic::new(
                        DiagCode::InvalidDeclaration,
                        pos,
                        format!("channel capacity {c} outside 0..={MAX_CAPACITY}"),
                    ));
                }
                c as usize
            }
        };
        channels.push(Channel {
            name: name.0.clone(),
            capacity,
        });
    }

    let property = match &raw.property {
        None => None,
        Some((name, pos)) => Some(
            scope
                .processes
                .get(name.as_str())
                .copied()
                .ok_or_else(|| unknown(*pos, "process", name))?,
        ),
    };

    let mut processes = Vec::new();
    for (pi, p) in raw.processes.iter().enumerate() {
        let loc = |n: &Name| -> Result<usize, Diagnostic> {
            scope.locations[pi]
                .get(n.0.as_str())
                .copied()
                .ok_or_else(|| unknown(n.1, &format!("location of `{}`", p.name.0), &n.0))
        };
        let is_property = property == Some(pi);
        if is_property {
            if let Some(l) = p.locals.first() {
                return Err(Diagnostic::new(
                    DiagCode::PropertyAction,
                    l.name.1,
                    "property process cannot declare variables",
                ));
            }
        }
        let init = loc(&p.init)?;
        let mut accept = vec![false; p.states.len()];
        for a in &p.accept {
            accept[loc(a)?] = true;
        }
        let mut transitions = Vec::new();
        let mut outgoing = vec![Vec::new(); p.states.len()];
        for t in &p.trans {
            let from = loc(&t.from)?;
            let to = loc(&t.to)?;
            if is_property {
                let bad = t.sync.as_ref().map(|s| s.1).or(t.effects.first().map(|e| e.0 .1));
                if let Some(pos) = bad {
                    return Err(Diagnostic::new(
                        DiagCode::PropertyAction,
                        pos,
                        "property process transitions may only have guards",
                    ));
                }
            }
            let guard = t.guard.as_ref().map(|g| scope.typed(pi, g, Ty::Bool)).transpose()?;
            let sync = match &t.sync {
                None => None,
                Some((RawSync::Send(chan, value), _)) => Some(Sync::Send {
                    channel: scope.channel(chan)?,
                    value: scope.typed(pi, value, Ty::Int)?,
                }),
                Some((RawSync::Receive(chan, target), _)) => Some(Sync::Receive {
                    channel: scope.channel(chan)?,
                    target: scope.variable(pi, &target.0, target.1)?,
                }),
            };
            let effects = t
                .effects
                .iter()
                .map(|((name, pos), value)| {
                    Ok(Assign {
                        target: scope.variable(pi, name, *pos)?,
                        value: scope.typed(pi, value, Ty::Int)?,
                    })
                })
                .collect::<Result<Vec<_>, Diagnostic>>()?;
            outgoing[from].push(transitions.len());
            transitions.push(Transition {
                from,
                to,
                guard,
                sync,
                effects,
                line: t.pos.line,
            });
        }
        processes.push(Process {
            name: p.name.0.clone(),
            locals: p.locals.iter().map(var_decl).collect::<Result<_, _>>()?,
            states: p.states.iter().map(|s| s.0.clone()).collect(),
            init,
            accept,
            transitions,
            outgoing,
        });
    }

    Ok(Model {
        globals,
        channels,
        processes,
        property,
    })
}

pub(crate) fn parse(tokens: Vec<Token>) -> Result<Model, Diagnostic> {
    let mut p = Parser { toks: tokens, i: 0 };
    let raw = p.model()?;
    resolve(raw)
}
