//! A small expression language for declaring sampled functions.
//!
//! ```text
//! expr    := additive
//! additive:= term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := ("-" | "+") unary | power
//! power   := primary ("^" unary)?          (right-associative)
//! primary := number | "inf" | "x" | "y" | "z"
//!          | func "(" expr ("," expr)* ")"
//!          | "if" expr cmp expr "then" expr "else" expr
//!          | "(" expr ")"
//! cmp     := "==" | "<" | "<=" | ">" | ">="
//! func    := "abs" | "exp" | "sqrt" | "min" | "max"
//! ```
//!
//! Values are extended reals. `c / 0` is `+inf` for `c > 0`; anything that
//! would produce `-inf` or NaN is an [`EvalError`].

mod eval;
mod parser;

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use parser::parse;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Abs,
    Exp,
    Sqrt,
    Min,
    Max,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Abs => "abs",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "abs" => Func::Abs,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            "min" => Func::Min,
            "max" => Func::Max,
            _ => return None,
        })
    }
}

/// A comparison; only appears as the condition of an `if`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cond {
    pub op: CmpOp,
    pub lhs: Expr,
    pub rhs: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Inf,
    /// 0 = x, 1 = y, 2 = z.
    Var(usize),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
    If(Box<Cond>, Box<Expr>, Box<Expr>),
}

impl Expr {
    /// Number of coordinates the expression reads (1 + highest variable index).
    pub fn dimension_needed(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::Inf => 0,
            Expr::Var(i) => i + 1,
            Expr::Neg(e) => e.dimension_needed(),
            Expr::Bin(_, a, b) => a.dimension_needed().max(b.dimension_needed()),
            Expr::Call(_, args) => args.iter().map(Expr::dimension_needed).max().unwrap_or(0),
            Expr::If(c, a, b) => c
                .lhs
                .dimension_needed()
                .max(c.rhs.dimension_needed())
                .max(a.dimension_needed())
                .max(b.dimension_needed()),
        }
    }
}

const VAR_NAMES: [&str; 3] = ["x", "y", "z"];

/// Canonical form: every operator application is parenthesized, so the
/// printed text parses back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) if *v < 0.0 => write!(f, "(-{:?})", -v),
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Inf => f.write_str("inf"),
            Expr::Var(i) => f.write_str(VAR_NAMES[*i]),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Expr::If(c, a, b) => write!(
                f,
                "(if {} {} {} then {a} else {b})",
                c.lhs,
                c.op.symbol(),
                c.rhs
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown identifier `{name}` at line {line}, column {column}")]
    UnknownIdentifier {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("`{name}` takes {expected} argument(s), got {found} (line {line}, column {column})")]
    Arity {
        name: &'static str,
        expected: &'static str,
        found: usize,
        line: usize,
        column: usize,
    },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("evaluation error: {0}")]
pub struct EvalError(pub String);
