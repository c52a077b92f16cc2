//! Canonical state encoding.
//!
//! Layout, in order:
//! 1. globals in declaration order (`byte`: 1 byte, `int`: 2 bytes LE);
//! 2. for each system process in declaration order, its location index
//!    (1 byte) followed by its locals;
//! 3. for each buffered channel, the element count (1 byte) followed by the
//!    queued values front to back (2 bytes LE each);
//! 4. the property location index (1 byte), when a property is declared.
//!
//! Every component is either fixed width or length-prefixed, so the encoding
//! is injective.

use std::collections::VecDeque;
use std::fmt::Write as _;

use super::{Model, VarRef, VarType};

/// Canonical serialized product state.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State(pub Vec<u8>);

impl State {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl std::fmt::Debug for State {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "State({:02x?})", self.0)
    }
}

/// Decoded, mutable form of a state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Valuation {
    pub globals: Vec<i32>,
    /// Location per process, property included, indexed like `Model::processes`.
    pub locations: Vec<usize>,
    pub locals: Vec<Vec<i32>>,
    /// Queue per channel; always empty for rendezvous channels.
    pub buffers: Vec<VecDeque<i32>>,
}

impl Valuation {
    #[inline]
    pub fn read(&self, r: VarRef) -> i32 {
        match r {
            VarRef::Global(g) => self.globals[g],
            VarRef::Local { process, var } => self.locals[process][var],
        }
    }

    #[inline]
    pub fn write(&mut self, r: VarRef, v: i32) {
        match r {
            VarRef::Global(g) => self.globals[g] = v,
            VarRef::Local { process, var } => self.locals[process][var] = v,
        }
    }
}

fn put(out: &mut Vec<u8>, ty: VarType, v: i32) {
    debug_assert!(ty.contains(v));
    match ty {
        VarType::Byte => out.push(v as u8),
        VarType::Int => out.extend_from_slice(&(v as i16).to_le_bytes()),
    }
}

fn take(bytes: &[u8], at: &mut usize, ty: VarType) -> i32 {
    match ty {
        VarType::Byte => {
            let v = bytes[*at] as i32;
            *at += 1;
            v
        }
        VarType::Int => {
            let v = i16::from_le_bytes([bytes[*at], bytes[*at + 1]]) as i32;
            *at += 2;
            v
        }
    }
}

impl Model {
    pub fn var_type(&self, r: VarRef) -> VarType {
        match r {
            VarRef::Global(g) => self.globals[g].ty,
            VarRef::Local { process, var } => self.processes[process].locals[var].ty,
        }
    }

    pub fn initial_valuation(&self) -> Valuation {
        Valuation {
            globals: self.globals.iter().map(|g| g.init).collect(),
            locations: self.processes.iter().map(|p| p.init).collect(),
            locals: self
                .processes
                .iter()
                .map(|p| p.locals.iter().map(|l| l.init).collect())
                .collect(),
            buffers: vec![VecDeque::new(); self.channels.len()],
        }
    }

    pub fn initial_state(&self) -> State {
        self.encode(&self.initial_valuation())
    }

    /// Byte offset of global `g` in every encoded state.
    pub fn global_offset(&self, g: usize) -> usize {
        self.globals[..g].iter().map(|d| d.ty.width()).sum()
    }

    pub fn encode(&self, val: &Valuation) -> State {
        let mut out = Vec::with_capacity(32);
        for (decl, &v) in self.globals.iter().zip(&val.globals) {
            put(&mut out, decl.ty, v);
        }
        for (i, p) in self.system_processes() {
            out.push(val.locations[i] as u8);
            for (decl, &v) in p.locals.iter().zip(&val.locals[i]) {
                put(&mut out, decl.ty, v);
            }
        }
        for (c, chan) in self.channels.iter().enumerate() {
            if chan.is_rendezvous() {
                continue;
            }
            out.push(val.buffers[c].len() as u8);
            for &v in &val.buffers[c] {
                put(&mut out, VarType::Int, v);
            }
        }
        if let Some(p) = self.property {
            out.push(val.locations[p] as u8);
        }
        State(out)
    }

    /// Inverse of [`Model::encode`]. Panics on bytes that were not produced
    /// by `encode` for this model.
    pub fn decode(&self, state: &State) -> Valuation {
        let bytes = &state.0;
        let mut at = 0;
        let mut val = self.initial_valuation();
        for (g, decl) in self.globals.iter().enumerate() {
            val.globals[g] = take(bytes, &mut at, decl.ty);
        }
        for (i, p) in self.system_processes() {
            val.locations[i] = bytes[at] as usize;
            at += 1;
            for (l, decl) in p.locals.iter().enumerate() {
                val.locals[i][l] = take(bytes, &mut at, decl.ty);
            }
        }
        for (c, chan) in self.channels.iter().enumerate() {
            if chan.is_rendezvous() {
                continue;
            }
            let len = bytes[at] as usize;
            at += 1;
            for _ in 0..len {
                val.buffers[c].push_back(take(bytes, &mut at, VarType::Int));
            }
        }
        if let Some(p) = self.property {
            val.locations[p] = bytes[at] as usize;
            at += 1;
        }
        assert_eq!(at, bytes.len(), "trailing bytes in encoded state");
        val
    }

    /// Human-readable rendering, e.g. `x=1 P@busy(a=0) q=[3] Never@q0`.
    pub fn describe(&self, state: &State) -> String {
        let val = self.decode(state);
        let mut s = String::new();
        for (g, decl) in self.globals.iter().enumerate() {
            let _ = write!(s, "{}={} ", decl.name, val.globals[g]);
        }
        for (i, p) in self.processes.iter().enumerate() {
            let _ = write!(s, "{}@{}", p.name, p.states[val.locations[i]]);
            if !p.locals.is_empty() {
                let locals: Vec<String> = p
                    .locals
                    .iter()
                    .zip(&val.locals[i])
                    .map(|(d, v)| format!("{}={v}", d.name))
                    .collect();
                let _ = write!(s, "({})", locals.join(","));
            }
            s.push(' ');
        }
        for (c, chan) in self.channels.iter().enumerate() {
            if !chan.is_rendezvous() {
                let _ = write!(s, "{}={:?} ", chan.name, val.buffers[c]);
            }
        }
        s.trim_end().to_string()
    }
}
