//! Immutable expression trees over jet coordinates, parameters and reals.

use super::point::JetPoint;
use super::variable::{JetVariable, Wrt};
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Unary functions available in the expression language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Arctan,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Ln,
        Func::Sqrt,
        Func::Arctan,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Arctan => "arctan",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.iter().copied().find(|f| f.name() == name)
    }
}

/// An immutable symbolic expression. Clones are cheap (shared subtrees).
#[derive(Debug, Clone, PartialEq)]
pub enum JetExpr {
    Const(f64),
    Param(String),
    Var(JetVariable),
    Neg(Arc<JetExpr>),
    Add(Arc<JetExpr>, Arc<JetExpr>),
    Sub(Arc<JetExpr>, Arc<JetExpr>),
    Mul(Arc<JetExpr>, Arc<JetExpr>),
    Div(Arc<JetExpr>, Arc<JetExpr>),
    /// Power with a constant real exponent.
    Pow(Arc<JetExpr>, f64),
    Fun(Func, Arc<JetExpr>),
}

/// Evaluation failure: a missing assignment or a domain violation, reported
/// with the offending subexpression.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum EvalError {
    #[error("no value assigned to jet coordinate `{0}`")]
    MissingVariable(JetVariable),
    #[error("no value assigned to parameter `{0}`")]
    MissingParameter(String),
    #[error("domain violation ({what}) in `{expr}`")]
    Domain { what: String, expr: String },
}

impl JetExpr {
    pub const ZERO: JetExpr = JetExpr::Const(0.0);
    pub const ONE: JetExpr = JetExpr::Const(1.0);

    pub fn num(v: f64) -> JetExpr {
        JetExpr::Const(v)
    }

    pub fn param(name: &str) -> JetExpr {
        JetExpr::Param(name.to_string())
    }

    pub fn var(v: JetVariable) -> JetExpr {
        JetExpr::Var(v)
    }

    /// The dependent variable `z`.
    pub fn z() -> JetExpr {
        JetExpr::Var(JetVariable::Z0)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, JetExpr::Const(c) if *c == 0.0)
    }

    pub fn is_one(&self) -> bool {
        matches!(self, JetExpr::Const(c) if *c == 1.0)
    }

    pub fn pow(self, exponent: f64) -> JetExpr {
        if exponent == 1.0 {
            self
        } else if let JetExpr::Const(c) = self {
            JetExpr::Const(c.powf(exponent))
        } else {
            JetExpr::Pow(Arc::new(self), exponent)
        }
    }

    pub fn apply(self, f: Func) -> JetExpr {
        JetExpr::Fun(f, Arc::new(self))
    }

    pub fn sin(self) -> JetExpr {
        self.apply(Func::Sin)
    }

    pub fn cos(self) -> JetExpr {
        self.apply(Func::Cos)
    }

    pub fn tan(self) -> JetExpr {
        self.apply(Func::Tan)
    }

    pub fn exp(self) -> JetExpr {
        self.apply(Func::Exp)
    }

    pub fn ln(self) -> JetExpr {
        self.apply(Func::Ln)
    }

    pub fn sqrt(self) -> JetExpr {
        self.apply(Func::Sqrt)
    }

    pub fn arctan(self) -> JetExpr {
        self.apply(Func::Arctan)
    }

    /// Evaluates the expression at a point.
    pub fn evaluate(&self, p: &JetPoint) -> Result<f64, EvalError> {
        match self {
            JetExpr::Const(c) => Ok(*c),
            JetExpr::Param(name) => p
                .param(name)
                .ok_or_else(|| EvalError::MissingParameter(name.clone())),
            JetExpr::Var(v) => p.var(*v).ok_or(EvalError::MissingVariable(*v)),
            JetExpr::Neg(e) => Ok(-e.evaluate(p)?),
            JetExpr::Add(a, b) => Ok(a.evaluate(p)? + b.evaluate(p)?),
            JetExpr::Sub(a, b) => Ok(a.evaluate(p)? - b.evaluate(p)?),
            JetExpr::Mul(a, b) => Ok(a.evaluate(p)? * b.evaluate(p)?),
            JetExpr::Div(a, b) => {
                let num = a.evaluate(p)?;
                let den = b.evaluate(p)?;
                if den == 0.0 {
                    return Err(EvalError::Domain {
                        what: "division by zero".into(),
                        expr: self.to_string(),
                    });
                }
                Ok(num / den)
            }
            JetExpr::Pow(base, exponent) => {
                let b = base.evaluate(p)?;
                if b == 0.0 && *exponent < 0.0 {
                    return Err(EvalError::Domain {
                        what: "zero raised to a negative power".into(),
                        expr: self.to_string(),
                    });
                }
                if b < 0.0 && exponent.fract() != 0.0 {
                    return Err(EvalError::Domain {
                        what: "negative base with non-integer exponent".into(),
                        expr: self.to_string(),
                    });
                }
                Ok(b.powf(*exponent))
            }
            JetExpr::Fun(f, e) => {
                let v = e.evaluate(p)?;
                match f {
                    Func::Sin => Ok(v.sin()),
                    Func::Cos => Ok(v.cos()),
                    Func::Tan => Ok(v.tan()),
                    Func::Exp => Ok(v.exp()),
                    Func::Arctan => Ok(v.atan()),
                    Func::Ln => {
                        if v <= 0.0 {
                            Err(EvalError::Domain {
                                what: format!("ln of non-positive value {v}"),
                                expr: self.to_string(),
                            })
                        } else {
                            Ok(v.ln())
                        }
                    }
                    Func::Sqrt => {
                        if v < 0.0 {
                            Err(EvalError::Domain {
                                what: format!("sqrt of negative value {v}"),
                                expr: self.to_string(),
                            })
                        } else {
                            Ok(v.sqrt())
                        }
                    }
                }
            }
        }
    }

    /// Evaluates the expression and returns `(value, scale)`, where `scale`
    /// is the largest absolute value seen at any subexpression. The scale is
    /// what the probabilistic zero test normalizes residuals by.
    pub fn evaluate_scaled(&self, p: &JetPoint) -> Result<(f64, f64), EvalError> {
        fn walk(e: &JetExpr, p: &JetPoint, scale: &mut f64) -> Result<f64, EvalError> {
            let domain = |what: String| EvalError::Domain {
                what,
                expr: e.to_string(),
            };
            let v = match e {
                JetExpr::Const(c) => *c,
                JetExpr::Param(name) => p
                    .param(name)
                    .ok_or_else(|| EvalError::MissingParameter(name.clone()))?,
                JetExpr::Var(var) => p.var(*var).ok_or(EvalError::MissingVariable(*var))?,
                JetExpr::Neg(a) => -walk(a, p, scale)?,
                JetExpr::Add(a, b) => walk(a, p, scale)? + walk(b, p, scale)?,
                JetExpr::Sub(a, b) => walk(a, p, scale)? - walk(b, p, scale)?,
                JetExpr::Mul(a, b) => walk(a, p, scale)? * walk(b, p, scale)?,
                JetExpr::Div(a, b) => {
                    let num = walk(a, p, scale)?;
                    let den = walk(b, p, scale)?;
                    if den == 0.0 {
                        return Err(domain("division by zero".into()));
                    }
                    num / den
                }
                JetExpr::Pow(base, exponent) => {
                    let b = walk(base, p, scale)?;
                    if b == 0.0 && *exponent < 0.0 {
                        return Err(domain("zero raised to a negative power".into()));
                    }
                    if b < 0.0 && exponent.fract() != 0.0 {
                        return Err(domain("negative base with non-integer exponent".into()));
                    }
                    b.powf(*exponent)
                }
                JetExpr::Fun(f, a) => {
                    let v = walk(a, p, scale)?;
                    match f {
                        Func::Sin => v.sin(),
                        Func::Cos => v.cos(),
                        Func::Tan => v.tan(),
                        Func::Exp => v.exp(),
                        Func::Arctan => v.atan(),
                        Func::Ln if v <= 0.0 => {
                            return Err(domain(format!("ln of non-positive value {v}")))
                        }
                        Func::Ln => v.ln(),
                        Func::Sqrt if v < 0.0 => {
                            return Err(domain(format!("sqrt of negative value {v}")))
                        }
                        Func::Sqrt => v.sqrt(),
                    }
                }
            };
            if v.abs() > *scale {
                *scale = v.abs();
            }
            Ok(v)
        }
        let mut scale = 0.0;
        let value = walk(self, p, &mut scale)?;
        Ok((value, scale))
    }

    /// Collects every jet coordinate appearing in the expression.
    pub fn variables(&self) -> BTreeSet<JetVariable> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let JetExpr::Var(v) = e {
                out.insert(*v);
            }
        });
        out
    }

    /// Collects every parameter name appearing in the expression.
    pub fn parameters(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let JetExpr::Param(p) = e {
                out.insert(p.clone());
            }
        });
        out
    }

    /// Everything the expression depends on, as `Wrt` entries.
    pub fn dependencies(&self) -> BTreeSet<Wrt> {
        let mut out: BTreeSet<Wrt> = self.variables().into_iter().map(Wrt::Var).collect();
        out.extend(self.parameters().into_iter().map(Wrt::Param));
        out
    }

    /// Highest jet order among the coordinates of the expression.
    pub fn jet_order(&self) -> u8 {
        self.variables().iter().map(|v| v.order()).max().unwrap_or(0)
    }

    fn visit(&self, f: &mut impl FnMut(&JetExpr)) {
        f(self);
        match self {
            JetExpr::Const(_) | JetExpr::Param(_) | JetExpr::Var(_) => {}
            JetExpr::Neg(a) | JetExpr::Pow(a, _) | JetExpr::Fun(_, a) => a.visit(f),
            JetExpr::Add(a, b) | JetExpr::Sub(a, b) | JetExpr::Mul(a, b) | JetExpr::Div(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    /// Replaces every occurrence of a jet coordinate by an expression.
    pub fn replace_var(&self, v: JetVariable, replacement: &JetExpr) -> JetExpr {
        match self {
            JetExpr::Var(w) if *w == v => replacement.clone(),
            JetExpr::Const(_) | JetExpr::Param(_) | JetExpr::Var(_) => self.clone(),
            JetExpr::Neg(a) => -a.replace_var(v, replacement),
            JetExpr::Add(a, b) => a.replace_var(v, replacement) + b.replace_var(v, replacement),
            JetExpr::Sub(a, b) => a.replace_var(v, replacement) - b.replace_var(v, replacement),
            JetExpr::Mul(a, b) => a.replace_var(v, replacement) * b.replace_var(v, replacement),
            JetExpr::Div(a, b) => a.replace_var(v, replacement) / b.replace_var(v, replacement),
            JetExpr::Pow(a, c) => JetExpr::Pow(Arc::new(a.replace_var(v, replacement)), *c),
            JetExpr::Fun(f, a) => JetExpr::Fun(*f, Arc::new(a.replace_var(v, replacement))),
        }
    }

    /// Simultaneously replaces several jet coordinates.
    pub fn replace_vars(&self, table: &[(JetVariable, JetExpr)]) -> JetExpr {
        match self {
            JetExpr::Var(w) => table
                .iter()
                .find(|(v, _)| v == w)
                .map(|(_, e)| e.clone())
                .unwrap_or_else(|| self.clone()),
            JetExpr::Const(_) | JetExpr::Param(_) => self.clone(),
            JetExpr::Neg(a) => -a.replace_vars(table),
            JetExpr::Add(a, b) => a.replace_vars(table) + b.replace_vars(table),
            JetExpr::Sub(a, b) => a.replace_vars(table) - b.replace_vars(table),
            JetExpr::Mul(a, b) => a.replace_vars(table) * b.replace_vars(table),
            JetExpr::Div(a, b) => a.replace_vars(table) / b.replace_vars(table),
            JetExpr::Pow(a, c) => JetExpr::Pow(Arc::new(a.replace_vars(table)), *c),
            JetExpr::Fun(f, a) => JetExpr::Fun(*f, Arc::new(a.replace_vars(table))),
        }
    }
}

// Operator overloads with light constant folding. Folds never change the
// value of the expression: constants combine, additive zeros and
// multiplicative ones drop.
impl std::ops::Add for JetExpr {
    type Output = JetExpr;
    fn add(self, rhs: JetExpr) -> JetExpr {
        match (&self, &rhs) {
            (JetExpr::Const(a), JetExpr::Const(b)) => JetExpr::Const(a + b),
            (JetExpr::Const(c), _) if *c == 0.0 => rhs,
            (_, JetExpr::Const(c)) if *c == 0.0 => self,
            _ => JetExpr::Add(Arc::new(self), Arc::new(rhs)),
        }
    }
}

impl std::ops::Sub for JetExpr {
    type Output = JetExpr;
    fn sub(self, rhs: JetExpr) -> JetExpr {
        match (&self, &rhs) {
            (JetExpr::Const(a), JetExpr::Const(b)) => JetExpr::Const(a - b),
            (JetExpr::Const(c), _) if *c == 0.0 => -rhs,
            (_, JetExpr::Const(c)) if *c == 0.0 => self,
            _ => JetExpr::Sub(Arc::new(self), Arc::new(rhs)),
        }
    }
}

impl std::ops::Mul for JetExpr {
    type Output = JetExpr;
    fn mul(self, rhs: JetExpr) -> JetExpr {
        match (&self, &rhs) {
            (JetExpr::Const(a), JetExpr::Const(b)) => JetExpr::Const(a * b),
            (JetExpr::Const(c), _) if *c == 1.0 => rhs,
            (_, JetExpr::Const(c)) if *c == 1.0 => self,
            _ => JetExpr::Mul(Arc::new(self), Arc::new(rhs)),
        }
    }
}

impl std::ops::Div for JetExpr {
    type Output = JetExpr;
    fn div(self, rhs: JetExpr) -> JetExpr {
        match (&self, &rhs) {
            (JetExpr::Const(a), JetExpr::Const(b)) if *b != 0.0 => JetExpr::Const(a / b),
            (_, JetExpr::Const(c)) if *c == 1.0 => self,
            _ => JetExpr::Div(Arc::new(self), Arc::new(rhs)),
        }
    }
}

impl std::ops::Neg for JetExpr {
    type Output = JetExpr;
    fn neg(self) -> JetExpr {
        match self {
            JetExpr::Const(c) => JetExpr::Const(-c),
            JetExpr::Neg(inner) => inner.as_ref().clone(),
            other => JetExpr::Neg(Arc::new(other)),
        }
    }
}

impl std::ops::Mul<f64> for JetExpr {
    type Output = JetExpr;
    fn mul(self, rhs: f64) -> JetExpr {
        JetExpr::Const(rhs) * self
    }
}

// Printing. The printed form parses back to a structurally equal tree; the
// parenthesization below exists to keep that property for nested operators.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Sum,
    Term,
    Factor,
    Atom,
}

impl JetExpr {
    fn prec(&self) -> Prec {
        match self {
            JetExpr::Add(..) | JetExpr::Sub(..) => Prec::Sum,
            JetExpr::Mul(..) | JetExpr::Div(..) => Prec::Term,
            JetExpr::Pow(..) | JetExpr::Neg(..) => Prec::Factor,
            JetExpr::Const(c) if *c < 0.0 => Prec::Factor,
            _ => Prec::Atom,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, min: Prec) -> fmt::Result {
        let needs_parens = self.prec() < min;
        if needs_parens {
            write!(f, "(")?;
        }
        match self {
            JetExpr::Const(c) => write!(f, "{c}")?,
            JetExpr::Param(p) => write!(f, "{p}")?,
            JetExpr::Var(v) => write!(f, "{v}")?,
            JetExpr::Neg(a) => {
                write!(f, "-")?;
                // a bare literal would fold into the sign when reparsed
                if matches!(a.as_ref(), JetExpr::Const(_)) {
                    write!(f, "(")?;
                    a.write(f, Prec::Sum)?;
                    write!(f, ")")?;
                } else {
                    a.write(f, Prec::Atom)?;
                }
            }
            JetExpr::Add(a, b) => {
                a.write(f, Prec::Sum)?;
                write!(f, " + ")?;
                b.write(f, Prec::Term)?;
            }
            JetExpr::Sub(a, b) => {
                a.write(f, Prec::Sum)?;
                write!(f, " - ")?;
                b.write(f, Prec::Term)?;
            }
            JetExpr::Mul(a, b) => {
                a.write(f, Prec::Term)?;
                write!(f, " * ")?;
                b.write(f, Prec::Factor)?;
            }
            JetExpr::Div(a, b) => {
                a.write(f, Prec::Term)?;
                write!(f, " / ")?;
                b.write(f, Prec::Factor)?;
            }
            JetExpr::Pow(base, exp) => {
                // the grammar allows a leading '-' on a power base, but a bare
                // number or another power must be wrapped to reparse uniquely
                match base.as_ref() {
                    JetExpr::Param(_) | JetExpr::Var(_) | JetExpr::Fun(..) => {
                        base.write(f, Prec::Atom)?
                    }
                    _ => {
                        write!(f, "(")?;
                        base.write(f, Prec::Sum)?;
                        write!(f, ")")?;
                    }
                }
                write!(f, "^{exp}")?;
            }
            JetExpr::Fun(func, a) => {
                write!(f, "{}(", func.name())?;
                a.write(f, Prec::Sum)?;
                write!(f, ")")?;
            }
        }
        if needs_parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for JetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, Prec::Sum)
    }
}
