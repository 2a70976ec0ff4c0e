//! Jet coordinates: the independent variables and the formal derivatives of
//! the dependent variable `z`.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Highest derivative order representable as a jet coordinate.
pub const MAX_ORDER: u8 = 4;

/// A coordinate on jet space: `x`, `t`, or `z_(i,j)` standing for
/// ∂^{i+j} z / ∂x^i ∂t^j (with `z` itself being `z_(0,0)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum JetVariable {
    X,
    T,
    /// Derivative of `z`: `xs` differentiations in x, `ts` in t.
    Z { xs: u8, ts: u8 },
}

impl JetVariable {
    /// The dependent variable itself, `z_(0,0)`.
    pub const Z0: JetVariable = JetVariable::Z { xs: 0, ts: 0 };
    /// `z_x`
    pub const ZX: JetVariable = JetVariable::Z { xs: 1, ts: 0 };
    /// `z_t`
    pub const ZT: JetVariable = JetVariable::Z { xs: 0, ts: 1 };
    /// `z_xx`
    pub const ZXX: JetVariable = JetVariable::Z { xs: 2, ts: 0 };
    /// `z_xt`
    pub const ZXT: JetVariable = JetVariable::Z { xs: 1, ts: 1 };
    /// `z_tt`
    pub const ZTT: JetVariable = JetVariable::Z { xs: 0, ts: 2 };

    /// Builds `z_(i,j)`, checking the order cap.
    pub fn z(xs: u8, ts: u8) -> Option<JetVariable> {
        if xs + ts <= MAX_ORDER {
            Some(JetVariable::Z { xs, ts })
        } else {
            None
        }
    }

    /// Total derivative order (0 for `x`, `t` and `z`).
    pub fn order(&self) -> u8 {
        match self {
            JetVariable::X | JetVariable::T => 0,
            JetVariable::Z { xs, ts } => xs + ts,
        }
    }

    /// True for `z_(i,j)` with both i ≥ 1 and j ≥ 1.
    pub fn is_mixed(&self) -> bool {
        matches!(self, JetVariable::Z { xs, ts } if *xs >= 1 && *ts >= 1)
    }

    /// The coordinate one x-derivative up, if it stays within the order cap.
    pub fn raise_x(&self) -> Option<JetVariable> {
        match self {
            JetVariable::Z { xs, ts } => JetVariable::z(xs + 1, *ts),
            _ => None,
        }
    }

    /// The coordinate one t-derivative up, if it stays within the order cap.
    pub fn raise_t(&self) -> Option<JetVariable> {
        match self {
            JetVariable::Z { xs, ts } => JetVariable::z(*xs, ts + 1),
            _ => None,
        }
    }

    /// Parses a canonical coordinate name (`x`, `t`, `z`, `z_x`, `z_xxt`, ...).
    ///
    /// Returns `Err(true)` when the name looks like a derivative of `z` but
    /// exceeds the order cap, `Err(false)` for anything else.
    pub fn from_name(name: &str) -> Result<JetVariable, bool> {
        match name {
            "x" => return Ok(JetVariable::X),
            "t" => return Ok(JetVariable::T),
            "z" => return Ok(JetVariable::Z0),
            _ => {}
        }
        let suffix = name.strip_prefix("z_").ok_or(false)?;
        if suffix.is_empty() {
            return Err(false);
        }
        let mut xs: u8 = 0;
        let mut ts: u8 = 0;
        for c in suffix.chars() {
            match c {
                // canonical order: every x before every t
                'x' if ts == 0 => xs += 1,
                't' => ts += 1,
                _ => return Err(false),
            }
        }
        JetVariable::z(xs, ts).ok_or(true)
    }

    /// All `z`-derivatives up to (and including) the given order, in
    /// (order, xs-descending) order.
    pub fn derivatives_up_to(order: u8) -> Vec<JetVariable> {
        let mut out = Vec::new();
        for n in 0..=order.min(MAX_ORDER) {
            for ts in 0..=n {
                out.push(JetVariable::Z { xs: n - ts, ts });
            }
        }
        out
    }
}

impl fmt::Display for JetVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JetVariable::X => write!(f, "x"),
            JetVariable::T => write!(f, "t"),
            JetVariable::Z { xs: 0, ts: 0 } => write!(f, "z"),
            JetVariable::Z { xs, ts } => {
                write!(f, "z_")?;
                for _ in 0..*xs {
                    write!(f, "x")?;
                }
                for _ in 0..*ts {
                    write!(f, "t")?;
                }
                Ok(())
            }
        }
    }
}

/// What a partial derivative is taken with respect to: a jet coordinate or a
/// named parameter.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Wrt {
    Var(JetVariable),
    Param(String),
}

impl From<JetVariable> for Wrt {
    fn from(v: JetVariable) -> Self {
        Wrt::Var(v)
    }
}

impl From<&str> for Wrt {
    fn from(name: &str) -> Self {
        Wrt::Param(name.to_string())
    }
}

impl fmt::Display for Wrt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Wrt::Var(v) => v.fmt(f),
            Wrt::Param(p) => write!(f, "{p}"),
        }
    }
}
