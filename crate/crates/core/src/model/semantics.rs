//! Interleaving semantics and the synchronous product with the property.

use super::{
    Assign, EvalError, Expr, Model, Process, RuntimeError, State, Sync, Transition, Valuation,
    VarRef, VarType,
};

/// Error context: which transition was executing.
struct Site<'a> {
    process: &'a Process,
    transition: &'a Transition,
}

impl Model {
    fn fail(&self, site: &Site<'_>, pre: &State, message: String) -> RuntimeError {
        RuntimeError {
            process: site.process.name.clone(),
            line: site.transition.line,
            message,
            state: pre.clone(),
            state_text: self.describe(pre),
        }
    }

    fn eval_at(&self, site: &Site<'_>, pre: &State, e: &Expr, val: &Valuation) -> Result<i32, RuntimeError> {
        e.eval(val).map_err(|err: EvalError| self.fail(site, pre, err.to_string()))
    }

    fn enabled(&self, site: &Site<'_>, pre: &State, val: &Valuation) -> Result<bool, RuntimeError> {
        match &site.transition.guard {
            None => Ok(true),
            Some(g) => Ok(self.eval_at(site, pre, g, val)? != 0),
        }
    }

    fn store(&self, site: &Site<'_>, pre: &State, val: &mut Valuation, target: VarRef, v: i32) -> Result<(), RuntimeError> {
        let ty = self.var_type(target);
        if !ty.contains(v) {
            let name = match target {
                VarRef::Global(g) => self.globals[g].name.clone(),
                VarRef::Local { process, var } => {
                    format!("{}.{}", self.processes[process].name, self.processes[process].locals[var].name)
                }
            };
            let (lo, hi) = ty.range();
            return Err(self.fail(site, pre, format!("assignment {name} = {v} outside {lo}..={hi}")));
        }
        val.write(target, v);
        Ok(())
    }

    fn effects(&self, site: &Site<'_>, pre: &State, val: &mut Valuation) -> Result<(), RuntimeError> {
        for Assign { target, value } in &site.transition.effects {
            let v = self.eval_at(site, pre, value, val)?;
            self.store(site, pre, val, *target, v)?;
        }
        Ok(())
    }

    /// System steps from `val`, in process, transition, partner order.
    fn system_steps(&self, pre: &State, val: &Valuation) -> Result<Vec<Valuation>, RuntimeError> {
        let mut out = Vec::new();
        for (pi, p) in self.system_processes() {
            for t in p.outgoing(val.locations[pi]) {
                let site = Site { process: p, transition: t };
                if !self.enabled(&site, pre, val)? {
                    continue;
                }
                match &t.sync {
                    None => {
                        let mut post = val.clone();
                        post.locations[pi] = t.to;
                        self.effects(&site, pre, &mut post)?;
                        out.push(post);
                    }
                    Some(Sync::Send { channel, value }) if !self.channels[*channel].is_rendezvous() => {
                        if val.buffers[*channel].len() >= self.channels[*channel].capacity {
                            continue;
                        }
                        let v = self.eval_at(&site, pre, value, val)?;
                        if !VarType::Int.contains(v) {
                            return Err(self.fail(&site, pre, format!("sent value {v} outside int range")));
                        }
                        let mut post = val.clone();
                        post.buffers[*channel].push_back(v);
                        post.locations[pi] = t.to;
                        self.effects(&site, pre, &mut post)?;
                        out.push(post);
                    }
                    Some(Sync::Receive { channel, target }) if !self.channels[*channel].is_rendezvous() => {
                        let Some(&v) = val.buffers[*channel].front() else {
                            continue;
                        };
                        let mut post = val.clone();
                        post.buffers[*channel].pop_front();
                        post.locations[pi] = t.to;
                        self.store(&site, pre, &mut post, *target, v)?;
                        self.effects(&site, pre, &mut post)?;
                        out.push(post);
                    }
                    Some(Sync::Send { channel, value }) => {
                        self.rendezvous(pi, &site, *channel, value, pre, val, &mut out)?;
                    }
                    // a rendezvous receive only fires together with a send
                    Some(Sync::Receive { .. }) => {}
                }
            }
        }
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn rendezvous(
        &self,
        sender: usize,
        send: &Site<'_>,
        channel: usize,
        value: &Expr,
        pre: &State,
        val: &Valuation,
        out: &mut Vec<Valuation>,
    ) -> Result<(), RuntimeError> {
        let mut sent = None;
        for (qi, q) in self.system_processes() {
            if qi == sender {
                continue;
            }
            for r in q.outgoing(val.locations[qi]) {
                let Some(Sync::Receive { channel: c, target }) = &r.sync else {
                    continue;
                };
                if *c != channel {
                    continue;
                }
                let recv = Site { process: q, transition: r };
                if !self.enabled(&recv, pre, val)? {
                    continue;
                }
                let v = match sent {
                    Some(v) => v,
                    None => *sent.insert(self.eval_at(send, pre, value, val)?),
                };
                let mut post = val.clone();
                post.locations[sender] = send.transition.to;
                post.locations[qi] = r.to;
                self.store(&recv, pre, &mut post, *target, v)?;
                self.effects(send, pre, &mut post)?;
                self.effects(&recv, pre, &mut post)?;
                out.push(post);
            }
        }
        Ok(())
    }

    /// Successor states of `state` in deterministic order.
    pub fn successors(&self, state: &State) -> Result<Vec<State>, RuntimeError> {
        let val = self.decode(state);
        let steps = self.system_steps(state, &val)?;
        let Some(prop) = self.property else {
            return Ok(steps.iter().map(|v| self.encode(v)).collect());
        };
        let p = &self.processes[prop];
        let mut moves = Vec::new();
        for t in p.outgoing(val.locations[prop]) {
            let site = Site { process: p, transition: t };
            if self.enabled(&site, state, &val)? {
                moves.push(t.to);
            }
        }
        let mut out = Vec::with_capacity(steps.len() * moves.len());
        for mut post in steps {
            for &to in &moves {
                post.locations[prop] = to;
                out.push(self.encode(&post));
            }
        }
        Ok(out)
    }

    /// Accepting iff the property sits in an accept location; without a
    /// property, iff any process does.
    pub fn is_accepting(&self, state: &State) -> bool {
        let val = self.decode(state);
        self.is_accepting_valuation(&val)
    }

    pub fn is_accepting_valuation(&self, val: &Valuation) -> bool {
        match self.property {
            Some(p) => self.processes[p].accept[val.locations[p]],
            None => self
                .processes
                .iter()
                .enumerate()
                .any(|(i, p)| p.accept[val.locations[i]]),
        }
    }

    /// Location of the property process in `state`, if there is one.
    pub fn property_location(&self, state: &State) -> Option<usize> {
        // encoded last
        self.property.map(|_| *state.0.last().expect("state has a property byte") as usize)
    }
}
