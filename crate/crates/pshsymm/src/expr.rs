//! Expression AST for closed-form function bodies.
//!
//! Expressions are functions of the coordinate moduli `|z_1|, ..., |z_n|`,
//! which makes every expressible function toric by construction. The JSON
//! encoding is nested arrays:
//!
//! ```text
//! ["log", e]          ["abs_coord", k]     ["max", e1, e2, ...]
//! ["+", e1, e2, ...]  ["*", c, e]          ["*", e1, e2]
//! ["pow", e, c]       ["const", c]
//! ```
//!
//! `abs_coord` indices are 1-based. `["*", ...]` accepts either a leading
//! constant or two general factors; the latter is needed for products such as
//! `(-log|z_1|)^(1/2) * (|z_2|^2 - 1)`.

use serde_json::Value;

use crate::numeric::ExtendedValue;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// `|z_k|`, 1-based coordinate index.
    AbsCoord(usize),
    Const(f64),
    Log(Box<Expr>),
    Max(Vec<Expr>),
    Sum(Vec<Expr>),
    /// General product of factors (a leading JSON constant parses into a
    /// `Const` factor).
    Prod(Vec<Expr>),
    /// `base^exponent` with a constant exponent.
    Pow(Box<Expr>, f64),
}

impl Expr {
    /// Evaluates at the modulus vector `r = (|z_1|, ..., |z_n|)`, entries in
    /// `[0, +inf)`.
    pub fn eval_moduli(&self, r: &[f64]) -> ExtendedValue {
        match self {
            Expr::AbsCoord(k) => r[*k - 1],
            Expr::Const(c) => *c,
            Expr::Log(e) => {
                let v = e.eval_moduli(r);
                if v <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    v.ln()
                }
            }
            Expr::Max(es) => es
                .iter()
                .map(|e| e.eval_moduli(r))
                .fold(f64::NEG_INFINITY, f64::max),
            Expr::Sum(es) => es.iter().map(|e| e.eval_moduli(r)).sum(),
            Expr::Prod(es) => {
                let mut acc = 1.0f64;
                for e in es {
                    let v = e.eval_moduli(r);
                    // -inf * 0 would be NaN; an exact zero factor annihilates.
                    if v == 0.0 {
                        return 0.0;
                    }
                    acc *= v;
                }
                acc
            }
            Expr::Pow(base, p) => {
                let v = base.eval_moduli(r);
                if v == f64::INFINITY {
                    f64::INFINITY
                } else if v < 0.0 && p.fract() != 0.0 {
                    f64::NAN // caught by load-time validation
                } else {
                    v.powf(*p)
                }
            }
        }
    }

    /// Largest 1-based coordinate index referenced, or 0 for constant
    /// expressions.
    pub fn max_coord(&self) -> usize {
        match self {
            Expr::AbsCoord(k) => *k,
            Expr::Const(_) => 0,
            Expr::Log(e) => e.max_coord(),
            Expr::Pow(e, _) => e.max_coord(),
            Expr::Max(es) | Expr::Sum(es) | Expr::Prod(es) => {
                es.iter().map(Expr::max_coord).max().unwrap_or(0)
            }
        }
    }

    /// Parses the nested-array JSON encoding.
    pub fn from_json(v: &Value) -> Result<Expr, String> {
        let arr = v
            .as_array()
            .ok_or_else(|| format!("expression node must be an array, got {v}"))?;
        let head = arr
            .first()
            .and_then(Value::as_str)
            .ok_or_else(|| "expression node must start with an operator string".to_string())?;
        let args = &arr[1..];
        let need = |n: usize| -> Result<(), String> {
            if args.len() == n {
                Ok(())
            } else {
                Err(format!("operator {head:?} expects {n} argument(s), got {}", args.len()))
            }
        };
        match head {
            "abs_coord" => {
                need(1)?;
                let k = args[0]
                    .as_u64()
                    .ok_or_else(|| "abs_coord index must be a positive integer".to_string())?;
                if k == 0 {
                    return Err("abs_coord indices are 1-based".to_string());
                }
                Ok(Expr::AbsCoord(k as usize))
            }
            "const" => {
                need(1)?;
                Ok(Expr::Const(number(&args[0])?))
            }
            "log" => {
                need(1)?;
                Ok(Expr::Log(Box::new(Expr::from_json(&args[0])?)))
            }
            "pow" => {
                need(2)?;
                Ok(Expr::Pow(
                    Box::new(Expr::from_json(&args[0])?),
                    number(&args[1])?,
                ))
            }
            "max" => {
                if args.len() < 2 {
                    return Err("max needs at least two arguments".to_string());
                }
                Ok(Expr::Max(parse_all(args)?))
            }
            "+" => {
                if args.is_empty() {
                    return Err("+ needs at least one argument".to_string());
                }
                Ok(Expr::Sum(parse_all(args)?))
            }
            "*" => {
                if args.len() < 2 {
                    return Err("* needs at least two arguments".to_string());
                }
                let mut factors = Vec::with_capacity(args.len());
                for a in args {
                    if let Some(c) = a.as_f64() {
                        factors.push(Expr::Const(c));
                    } else {
                        factors.push(Expr::from_json(a)?);
                    }
                }
                Ok(Expr::Prod(factors))
            }
            other => Err(format!("unknown operator {other:?}")),
        }
    }
}

fn parse_all(args: &[Value]) -> Result<Vec<Expr>, String> {
    args.iter().map(Expr::from_json).collect()
}

fn number(v: &Value) -> Result<f64, String> {
    v.as_f64()
        .ok_or_else(|| format!("expected a number, got {v}"))
}
