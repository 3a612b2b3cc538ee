use alloc::format;

use super::{BinOp, CmpOp, EvalError, Expr, Func};
use crate::ext::ExtReal;

type R = Result<f64, EvalError>;

fn err(msg: &str) -> EvalError {
    EvalError(msg.into())
}

/// Rejects NaN and `-inf`, the values outside `(-inf, +inf]`.
fn check(v: f64, what: &str) -> R {
    if v.is_nan() {
        Err(EvalError(format!("{what} is undefined")))
    } else if v == f64::NEG_INFINITY {
        Err(EvalError(format!("{what} is -inf")))
    } else {
        Ok(v)
    }
}

fn binary(op: BinOp, a: f64, b: f64) -> R {
    let inf = f64::INFINITY;
    match op {
        BinOp::Add => check(a + b, "sum"),
        BinOp::Sub => {
            if b == inf {
                Err(err("subtracting inf"))
            } else {
                check(a - b, "difference")
            }
        }
        BinOp::Mul => {
            if a == inf || b == inf {
                let other = if a == inf { b } else { a };
                if other > 0.0 {
                    Ok(inf)
                } else {
                    Err(err("inf times a non-positive number"))
                }
            } else {
                check(a * b, "product")
            }
        }
        BinOp::Div => {
            if b == 0.0 {
                if a > 0.0 {
                    Ok(inf)
                } else {
                    Err(err("division of a non-positive number by zero"))
                }
            } else if b == inf {
                if a == inf {
                    Err(err("inf / inf"))
                } else {
                    Ok(0.0)
                }
            } else if a == inf {
                if b > 0.0 {
                    Ok(inf)
                } else {
                    Err(err("inf divided by a negative number"))
                }
            } else {
                check(a / b, "quotient")
            }
        }
        BinOp::Pow => {
            if b == inf {
                Err(err("infinite exponent"))
            } else if a == inf {
                Ok(if b > 0.0 {
                    inf
                } else if b == 0.0 {
                    1.0
                } else {
                    0.0
                })
            } else if a < 0.0 && b != libm::trunc(b) {
                Err(err("fractional power of a negative number"))
            } else {
                check(libm::pow(a, b), "power")
            }
        }
    }
}

pub(super) fn eval(e: &Expr, point: &[f64]) -> R {
    match e {
        Expr::Num(v) => Ok(*v),
        Expr::Inf => Ok(f64::INFINITY),
        Expr::Var(i) => point.get(*i).copied().ok_or_else(|| {
            EvalError(format!(
                "variable index {i} needs a {}-dimensional point, got {}",
                i + 1,
                point.len()
            ))
        }),
        Expr::Neg(a) => {
            let v = eval(a, point)?;
            if v == f64::INFINITY {
                Err(err("negating inf"))
            } else {
                Ok(-v)
            }
        }
        Expr::Bin(op, a, b) => binary(*op, eval(a, point)?, eval(b, point)?),
        Expr::Call(f, args) => match f {
            Func::Abs => Ok(eval(&args[0], point)?.abs()),
            Func::Exp => Ok(libm::exp(eval(&args[0], point)?)),
            Func::Sqrt => {
                let v = eval(&args[0], point)?;
                if v < 0.0 {
                    Err(err("square root of a negative number"))
                } else {
                    Ok(libm::sqrt(v))
                }
            }
            Func::Min | Func::Max => {
                let mut acc = eval(&args[0], point)?;
                for a in &args[1..] {
                    let v = eval(a, point)?;
                    acc = if *f == Func::Min { acc.min(v) } else { acc.max(v) };
                }
                Ok(acc)
            }
        },
        Expr::If(c, a, b) => {
            let l = eval(&c.lhs, point)?;
            let r = eval(&c.rhs, point)?;
            let holds = match c.op {
                CmpOp::Eq => l == r,
                CmpOp::Lt => l < r,
                CmpOp::Le => l <= r,
                CmpOp::Gt => l > r,
                CmpOp::Ge => l >= r,
            };
            if holds {
                eval(a, point)
            } else {
                eval(b, point)
            }
        }
    }
}

impl Expr {
    /// Evaluates at `point` (coordinates x, y, z in order).
    pub fn eval(&self, point: &[f64]) -> Result<ExtReal, EvalError> {
        let v = eval(self, point)?;
        ExtReal::new(v).ok_or_else(|| err("result outside (-inf, inf]"))
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse, ParseError};
    use super::*;
    use alloc::string::ToString;

    fn at(src: &str, x: f64) -> Result<ExtReal, EvalError> {
        parse(src).unwrap().eval(&[x])
    }

    #[test]
    fn polynomial_root() {
        assert_eq!(at("(x^2-1)^2", 1.0).unwrap(), ExtReal::ZERO);
        assert_eq!(at("(x^2-1)^2", 0.0).unwrap(), ExtReal::finite(1.0));
    }

    #[test]
    fn conditional_branches() {
        let src = "if x==0 then 1 else x^2";
        assert_eq!(at(src, 0.0).unwrap(), ExtReal::finite(1.0));
        assert_eq!(at(src, 0.5).unwrap(), ExtReal::finite(0.25));
    }

    #[test]
    fn malformed_input_reports_position() {
        let e = parse("2*+*3").unwrap_err();
        assert!(matches!(e, ParseError::Syntax { .. }));
        assert_eq!(e.position(), (1, 4));
    }

    #[test]
    fn infinity_and_conventions() {
        assert_eq!(at("inf", 3.0).unwrap(), ExtReal::INFINITY);
        assert_eq!(at("min(abs(x),1)", -3.0).unwrap(), ExtReal::finite(1.0));
        assert_eq!(at("1/x", 0.0).unwrap(), ExtReal::INFINITY);
        assert!(at("-1/x", 0.0).is_err());
        assert!(at("0/x", 0.0).is_err());
        assert!(at("sqrt(x)", -1.0).is_err());
        assert!(at("x^0.5", -4.0).is_err());
        assert!(at("-inf", 0.0).is_err());
        assert!(at("x - inf", 0.0).is_err());
        assert_eq!(at("inf + x", 2.0).unwrap(), ExtReal::INFINITY);
        assert_eq!(at("if x < 0.5 then inf else 0", 0.25).unwrap(), ExtReal::INFINITY);
        assert_eq!(at("(-2)^3", 0.0).unwrap(), ExtReal::finite(-8.0));
    }

    #[test]
    fn precedence() {
        assert_eq!(at("-x^2", 3.0).unwrap(), ExtReal::finite(-9.0));
        assert_eq!(at("2^3^2", 0.0).unwrap(), ExtReal::finite(512.0));
        assert_eq!(at("1 - 2 - 3", 0.0).unwrap(), ExtReal::finite(-4.0));
        assert_eq!(at("2 * 3 + 4 / 2", 0.0).unwrap(), ExtReal::finite(8.0));
        assert_eq!(at("2^-1", 0.0).unwrap(), ExtReal::finite(0.5));
        assert_eq!(at("-2 * 3", 0.0).unwrap(), ExtReal::finite(-6.0));
    }

    #[test]
    fn identifier_and_arity_errors() {
        assert!(matches!(
            parse("cos(x)"),
            Err(ParseError::UnknownIdentifier { .. })
        ));
        assert!(matches!(parse("w + 1"), Err(ParseError::UnknownIdentifier { .. })));
        assert!(matches!(parse("min(x)"), Err(ParseError::Arity { .. })));
        assert!(matches!(parse("abs(x, y)"), Err(ParseError::Arity { .. })));
        assert!(matches!(parse("x <= 1"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("(x"), Err(ParseError::Syntax { .. })));
        let e = parse("1 +\n  foo").unwrap_err();
        assert_eq!(e.position(), (2, 3));
    }

    #[test]
    fn missing_coordinate_is_an_eval_error() {
        let e = parse("x + y").unwrap();
        assert_eq!(e.dimension_needed(), 2);
        assert!(e.eval(&[1.0]).is_err());
        assert_eq!(e.eval(&[1.0, 2.0]).unwrap(), ExtReal::finite(3.0));
    }

    #[test]
    fn printed_form_reparses() {
        for src in [
            "(x^2-1)^2",
            "if x==0 then 1 else x^2",
            "-x^-2 + max(x, y, 1e-7) * 2.5e3",
            "if x < 0.5 then inf else (x - 0.75)^2",
            "1 + if x >= y then abs(x) else sqrt(y)",
        ] {
            let e = parse(src).unwrap();
            let printed = e.to_string();
            assert_eq!(parse(&printed).unwrap(), e, "{src} -> {printed}");
        }
    }
}
