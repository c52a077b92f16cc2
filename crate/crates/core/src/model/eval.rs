use thiserror::Error;

use super::Valuation;

/// A resolved variable reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarRef {
    Global(usize),
    Local { process: usize, var: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

/// A resolved, type-checked expression. Booleans evaluate to 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Const(i32),
    Var(VarRef),
    AtLocation { process: usize, location: usize },
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("arithmetic overflow")]
    Overflow,
}

impl Expr {
    pub fn eval(&self, val: &Valuation) -> Result<i32, EvalError> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var(r) => val.read(*r),
            Expr::AtLocation { process, location } => (val.locations[*process] == *location) as i32,
            Expr::Unary(UnOp::Not, e) => (e.eval(val)? == 0) as i32,
            Expr::Unary(UnOp::Neg, e) => e.eval(val)?.checked_neg().ok_or(EvalError::Overflow)?,
            Expr::Binary(BinOp::And, a, b) => (a.eval(val)? != 0 && b.eval(val)? != 0) as i32,
            Expr::Binary(BinOp::Or, a, b) => (a.eval(val)? != 0 || b.eval(val)? != 0) as i32,
            Expr::Binary(op, a, b) => {
                let (x, y) = (a.eval(val)?, b.eval(val)?);
                match op {
                    BinOp::Add => x.checked_add(y).ok_or(EvalError::Overflow)?,
                    BinOp::Sub => x.checked_sub(y).ok_or(EvalError::Overflow)?,
                    BinOp::Mul => x.checked_mul(y).ok_or(EvalError::Overflow)?,
                    BinOp::Div | BinOp::Rem if y == 0 => return Err(EvalError::DivisionByZero),
                    BinOp::Div => x.checked_div(y).ok_or(EvalError::Overflow)?,
                    BinOp::Rem => x.checked_rem(y).ok_or(EvalError::Overflow)?,
                    BinOp::Eq => (x == y) as i32,
                    BinOp::Ne => (x != y) as i32,
                    BinOp::Lt => (x < y) as i32,
                    BinOp::Le => (x <= y) as i32,
                    BinOp::Gt => (x > y) as i32,
                    BinOp::Ge => (x >= y) as i32,
                    BinOp::And | BinOp::Or => unreachable!(),
                }
            }
        })
    }

    pub fn holds(&self, val: &Valuation) -> Result<bool, EvalError> {
        Ok(self.eval(val)? != 0)
    }
}
