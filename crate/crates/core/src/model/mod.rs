//! A small modeling language for asynchronous networks of communicating
//! finite automata, in the spirit of DVE.
//!
//! A model declares global variables, channels and processes. Processes have
//! local variables, named locations and guarded transitions that may
//! communicate over a channel and update variables. One process can be named
//! as the property (never-claim) automaton; it observes the system and moves
//! synchronously with every system step.
//!
//! ```text
//! byte x = 0;
//! channel c;            // rendezvous
//! channel q[2];         // buffered, capacity 2
//! process P {
//!   byte a;
//!   state idle, busy;
//!   init idle;
//!   trans idle -> busy { guard x < 3; sync c!x + 1; effect x = x + 1; }
//!   trans busy -> idle {}
//! }
//! process Never {
//!   state q0, q1;
//!   init q0;
//!   accept q1;
//!   trans q0 -> q0 {}
//!   trans q0 -> q1 { guard P.busy; }
//!   trans q1 -> q1 { guard P.busy; }
//! }
//! system async;
//! property Never;
//! ```
//!
//! Dialect conventions:
//! - `P.loc` is true when process `P` is at location `loc`; `P.v` reads the
//!   local variable `v` of `P`.
//! - Arithmetic is 32-bit signed; overflow and division by zero are runtime
//!   errors, as is assigning a value outside a variable's type range
//!   (`byte` 0..=255, `int` -32768..=32767). Channels carry `int` values.
//! - Property guards are evaluated on the state *before* the system step.
//!   A system step for which no property transition is enabled produces no
//!   product successor.
//! - In a rendezvous the sent value is stored into the receiver's target
//!   first; then the sender's effects run, then the receiver's.

mod eval;
mod lexer;
mod parser;
mod relevance;
mod semantics;
mod state;

use std::fmt;

use thiserror::Error;

pub use eval::{BinOp, EvalError, Expr, UnOp, VarRef};
pub use relevance::property_relevance;
pub use state::{State, Valuation};

/// Source position, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiagCode {
    Syntax,
    UnknownIdentifier,
    TypeMismatch,
    DuplicateName,
    /// The property process has a channel action, an effect or locals.
    PropertyAction,
    /// Structurally invalid declaration: out-of-range initializer or
    /// literal, too many locations, oversized channel.
    InvalidDeclaration,
}

impl DiagCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagCode::Syntax => "syntax",
            DiagCode::UnknownIdentifier => "unknown-identifier",
            DiagCode::TypeMismatch => "type-mismatch",
            DiagCode::DuplicateName => "duplicate-name",
            DiagCode::PropertyAction => "property-action",
            DiagCode::InvalidDeclaration => "invalid-declaration",
        }
    }
}

impl fmt::Display for DiagCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: error[{code}]: {message}")]
pub struct Diagnostic {
    pub code: DiagCode,
    pub pos: Pos,
    pub message: String,
}

impl Diagnostic {
    pub(crate) fn new(code: DiagCode, pos: Pos, message: impl Into<String>) -> Self {
        Diagnostic {
            code,
            pos,
            message: message.into(),
        }
    }
}

/// A modeling error hit while executing a transition.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("model runtime error in {process} (line {line}): {message}; state: {state_text}")]
pub struct RuntimeError {
    pub process: String,
    pub line: usize,
    pub message: String,
    pub state: State,
    pub state_text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarType {
    Byte,
    Int,
}

impl VarType {
    pub fn range(self) -> (i32, i32) {
        match self {
            VarType::Byte => (0, 255),
            VarType::Int => (-32768, 32767),
        }
    }

    pub fn contains(self, v: i32) -> bool {
        let (lo, hi) = self.range();
        (lo..=hi).contains(&v)
    }

    pub fn width(self) -> usize {
        match self {
            VarType::Byte => 1,
            VarType::Int => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub ty: VarType,
    pub init: i32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Channel {
    pub name: String,
    /// 0 means rendezvous.
    pub capacity: usize,
}

impl Channel {
    pub fn is_rendezvous(&self) -> bool {
        self.capacity == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sync {
    Send { channel: usize, value: Expr },
    Receive { channel: usize, target: VarRef },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assign {
    pub target: VarRef,
    pub value: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    pub guard: Option<Expr>,
    pub sync: Option<Sync>,
    pub effects: Vec<Assign>,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Process {
    pub name: String,
    pub locals: Vec<VarDecl>,
    pub states: Vec<String>,
    pub init: usize,
    pub accept: Vec<bool>,
    pub transitions: Vec<Transition>,
    /// Transition indices per source location, in declaration order.
    outgoing: Vec<Vec<usize>>,
}

impl Process {
    pub fn outgoing(&self, location: usize) -> impl Iterator<Item = &Transition> + '_ {
        self.outgoing[location].iter().map(|&t| &self.transitions[t])
    }

    pub fn location_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub globals: Vec<VarDecl>,
    pub channels: Vec<Channel>,
    pub processes: Vec<Process>,
    /// Index into `processes` of the property automaton.
    pub property: Option<usize>,
}

impl Model {
    pub fn process_index(&self, name: &str) -> Option<usize> {
        self.processes.iter().position(|p| p.name == name)
    }

    pub fn transition_count(&self) -> usize {
        self.processes.iter().map(|p| p.transitions.len()).sum()
    }

    pub fn property_process(&self) -> Option<&Process> {
        self.property.map(|p| &self.processes[p])
    }

    /// Processes that make up the system, i.e. everything but the property.
    pub fn system_processes(&self) -> impl Iterator<Item = (usize, &Process)> + '_ {
        self.processes
            .iter()
            .enumerate()
            .filter(move |(i, _)| Some(*i) != self.property)
    }
}

pub fn parse_model(text: &str) -> Result<Model, Diagnostic> {
    parse_model_with_consts(text, &[])
}

/// Parses after replacing every identifier named in `consts` by its value.
pub fn parse_model_with_consts(text: &str, consts: &[(String, i64)]) -> Result<Model, Diagnostic> {
    let mut tokens = lexer::lex(text)?;
    lexer::substitute(&mut tokens, consts);
    parser::parse(tokens)
}
