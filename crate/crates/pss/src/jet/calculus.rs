//! Derivatives on jet space: partials with respect to single coordinates,
//! total derivatives through the contact structure, and reduction of an
//! expression modulo an equation in solved form.

use super::expr::{Func, JetExpr};
use super::variable::{JetVariable, Wrt, MAX_ORDER};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CalculusError {
    #[error("total derivative of `{coordinate}` exceeds the order-{MAX_ORDER} cap")]
    OrderOverflow { coordinate: JetVariable },
    #[error("substitution did not eliminate mixed derivatives (the equation couples z_xx and z_tt consequences)")]
    SubstitutionDiverged,
}

/// Direction of a total derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    X,
    T,
}

/// An equation in solved form `target = rhs`, with `target` a mixed
/// derivative (by default `z_xt`) and `rhs` free of the target and of any
/// mixed derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct EquationRule {
    pub target: JetVariable,
    pub rhs: JetExpr,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum RuleError {
    #[error("rule target must be a mixed derivative of z, got `{0}`")]
    BadTarget(JetVariable),
    #[error("rule right-hand side depends on `{0}`, which is not allowed in solved form")]
    BadRhsDependency(JetVariable),
}

impl EquationRule {
    /// Builds a rule `z_xt = rhs`, checking that the right-hand side stays in
    /// second-order solved form (x, t, z, z_x, z_t, z_xx, z_tt only).
    pub fn new(rhs: JetExpr) -> Result<EquationRule, RuleError> {
        EquationRule::with_target(JetVariable::ZXT, rhs)
    }

    pub fn with_target(target: JetVariable, rhs: JetExpr) -> Result<EquationRule, RuleError> {
        if !target.is_mixed() {
            return Err(RuleError::BadTarget(target));
        }
        for v in rhs.variables() {
            let ok = matches!(
                v,
                JetVariable::X
                    | JetVariable::T
                    | JetVariable::Z { xs: 0, ts: 0 }
                    | JetVariable::Z { xs: 1, ts: 0 }
                    | JetVariable::Z { xs: 0, ts: 1 }
                    | JetVariable::Z { xs: 2, ts: 0 }
                    | JetVariable::Z { xs: 0, ts: 2 }
            );
            if !ok {
                return Err(RuleError::BadRhsDependency(v));
            }
        }
        Ok(EquationRule { target, rhs })
    }
}

/// Symbolic partial derivative with respect to a single jet coordinate or
/// parameter, all other coordinates held fixed.
pub fn partial(e: &JetExpr, wrt: &Wrt) -> JetExpr {
    match e {
        JetExpr::Const(_) => JetExpr::ZERO,
        JetExpr::Param(p) => match wrt {
            Wrt::Param(q) if p == q => JetExpr::ONE,
            _ => JetExpr::ZERO,
        },
        JetExpr::Var(v) => match wrt {
            Wrt::Var(w) if v == w => JetExpr::ONE,
            _ => JetExpr::ZERO,
        },
        JetExpr::Neg(a) => {
            let da = partial(a, wrt);
            if da.is_zero() {
                JetExpr::ZERO
            } else {
                -da
            }
        }
        JetExpr::Add(a, b) => sum2(partial(a, wrt), partial(b, wrt)),
        JetExpr::Sub(a, b) => {
            let da = partial(a, wrt);
            let db = partial(b, wrt);
            if db.is_zero() {
                da
            } else if da.is_zero() {
                -db
            } else {
                da - db
            }
        }
        JetExpr::Mul(a, b) => {
            let da = partial(a, wrt);
            let db = partial(b, wrt);
            let left = prod2(da, b.as_ref().clone());
            let right = prod2(a.as_ref().clone(), db);
            sum2(left, right)
        }
        JetExpr::Div(a, b) => {
            let da = partial(a, wrt);
            let db = partial(b, wrt);
            if da.is_zero() && db.is_zero() {
                return JetExpr::ZERO;
            }
            if db.is_zero() {
                // a'/b
                return da / b.as_ref().clone();
            }
            let num = sum2(
                prod2(da, b.as_ref().clone()),
                match prod2(a.as_ref().clone(), db) {
                    z if z.is_zero() => JetExpr::ZERO,
                    nz => -nz,
                },
            );
            num / b.as_ref().clone().pow(2.0)
        }
        JetExpr::Pow(base, c) => {
            let db = partial(base, wrt);
            if db.is_zero() {
                return JetExpr::ZERO;
            }
            let inner = if *c == 1.0 {
                JetExpr::ONE
            } else {
                JetExpr::Const(*c) * base.as_ref().clone().pow(c - 1.0)
            };
            prod2(inner, db)
        }
        JetExpr::Fun(f, a) => {
            let da = partial(a, wrt);
            if da.is_zero() {
                return JetExpr::ZERO;
            }
            let u = a.as_ref().clone();
            let outer = match f {
                Func::Sin => u.cos(),
                Func::Cos => -u.sin(),
                Func::Tan => JetExpr::ONE + u.tan().pow(2.0),
                Func::Exp => u.exp(),
                Func::Ln => JetExpr::ONE / u,
                Func::Sqrt => JetExpr::ONE / (JetExpr::num(2.0) * u.sqrt()),
                Func::Arctan => JetExpr::ONE / (JetExpr::ONE + u.pow(2.0)),
            };
            prod2(outer, da)
        }
    }
}

fn sum2(a: JetExpr, b: JetExpr) -> JetExpr {
    if a.is_zero() {
        b
    } else if b.is_zero() {
        a
    } else {
        a + b
    }
}

fn prod2(a: JetExpr, b: JetExpr) -> JetExpr {
    if a.is_zero() || b.is_zero() {
        JetExpr::ZERO
    } else {
        a * b
    }
}

/// Total derivative on jet space:
/// `D_x e = e_x + Σ e_{z_(i,j)} · z_(i+1,j)` (and symmetrically in t).
///
/// Fails if a coordinate of order 4 appears (the result would need order 5).
pub fn total_derivative(e: &JetExpr, dir: Direction) -> Result<JetExpr, CalculusError> {
    let base = match dir {
        Direction::X => JetVariable::X,
        Direction::T => JetVariable::T,
    };
    let mut acc = partial(e, &Wrt::Var(base));
    for v in e.variables() {
        if let JetVariable::Z { .. } = v {
            let raised = match dir {
                Direction::X => v.raise_x(),
                Direction::T => v.raise_t(),
            }
            .ok_or(CalculusError::OrderOverflow { coordinate: v })?;
            let dv = partial(e, &Wrt::Var(v));
            acc = sum2(acc, prod2(dv, JetExpr::Var(raised)));
        }
    }
    Ok(acc)
}

/// `D_x^p D_t^q` applied in sequence.
pub fn iterated_derivative(e: &JetExpr, px: u8, pt: u8) -> Result<JetExpr, CalculusError> {
    let mut out = e.clone();
    for _ in 0..px {
        out = total_derivative(&out, Direction::X)?;
    }
    for _ in 0..pt {
        out = total_derivative(&out, Direction::T)?;
    }
    Ok(out)
}

/// Replaces the rule's target derivative and all of its differential
/// consequences: with target `z_xt`, any `z_(i,j)` with i,j ≥ 1 becomes
/// `D_x^{i-1} D_t^{j-1}(rhs)`, highest order first, repeated until no such
/// derivative remains.
///
/// When the right-hand side involves both `z_xx` and `z_tt`, the third-order
/// consequences couple and textual rewriting cannot eliminate them; that case
/// is reported as an error after a bounded number of passes.
pub fn substitute_equation(e: &JetExpr, rule: &EquationRule) -> Result<JetExpr, CalculusError> {
    let (tx, tt) = match rule.target {
        JetVariable::Z { xs, ts } => (xs, ts),
        _ => unreachable!("rule targets are validated as mixed derivatives"),
    };
    let mut current = e.clone();
    // Each rewrite removes the currently highest-ranked consequence of the
    // target but may reintroduce others; the bound catches coupled cases.
    for _ in 0..64 {
        let reducible = current
            .variables()
            .into_iter()
            .filter(|v| matches!(v, JetVariable::Z { xs, ts } if *xs >= tx && *ts >= tt))
            .max_by_key(|v| match v {
                JetVariable::Z { xs, ts } => (xs + ts, *xs),
                _ => unreachable!(),
            });
        let Some(v) = reducible else {
            return Ok(current);
        };
        let (xs, ts) = match v {
            JetVariable::Z { xs, ts } => (xs, ts),
            _ => unreachable!(),
        };
        let consequence = iterated_derivative(&rule.rhs, xs - tx, ts - tt)?;
        current = current.replace_var(v, &consequence);
    }
    Err(CalculusError::SubstitutionDiverged)
}

// Convenience forwarding so `JetExpr` reads naturally at call sites.
impl JetExpr {
    pub fn partial(&self, wrt: impl Into<Wrt>) -> JetExpr {
        partial(self, &wrt.into())
    }

    pub fn d_x(&self) -> Result<JetExpr, CalculusError> {
        total_derivative(self, Direction::X)
    }

    pub fn d_t(&self) -> Result<JetExpr, CalculusError> {
        total_derivative(self, Direction::T)
    }

    pub fn reduce(&self, rule: &EquationRule) -> Result<JetExpr, CalculusError> {
        substitute_equation(self, rule)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::parse::parse;
    use crate::jet::point::JetPoint;
    use crate::jet::variable::JetVariable as V;

    fn point(pairs: &[(V, f64)]) -> JetPoint {
        let mut p = JetPoint::new();
        for (v, x) in pairs {
            p.set_var(*v, *x);
        }
        p
    }

    #[test]
    fn partial_of_monomial() {
        // ∂(z z_x²)/∂z_x = 2 z z_x
        let e = parse("z*z_x^2").unwrap();
        let d = e.partial(V::ZX);
        let p = point(&[(V::Z0, 3.0), (V::ZX, 5.0)]);
        assert_eq!(d.evaluate(&p).unwrap(), 30.0);
    }

    #[test]
    fn partial_of_sqrt_matches_closed_form() {
        // ∂ sqrt(2 m1 z + m2)/∂z = m1 / sqrt(2 m1 z + m2)
        let e = parse("sqrt(2*m1*z + m2)").unwrap();
        let d = e.partial(V::Z0);
        let mut p = point(&[(V::Z0, 2.0)]);
        p.set_param("m1", 1.0);
        p.set_param("m2", 0.0);
        let got = d.evaluate(&p).unwrap();
        assert!((got - 0.5).abs() < 1e-15, "got {got}");
    }

    #[test]
    fn total_derivative_of_z_is_z_x() {
        let e = JetExpr::z();
        assert_eq!(e.d_x().unwrap(), JetExpr::Var(V::ZX));
        assert_eq!(e.d_t().unwrap(), JetExpr::Var(V::ZT));
    }

    #[test]
    fn total_derivative_expands_first_order_function() {
        // D_t ℓ(z, z_x, z_t) = ℓ_z z_t + ℓ_zx z_xt + ℓ_zt z_tt
        let l = parse("z^2 * z_x + sin(z_t)").unwrap();
        let d = l.d_t().unwrap();
        let p = point(&[
            (V::Z0, 1.2),
            (V::ZX, 0.7),
            (V::ZT, 0.3),
            (V::ZXT, 0.4),
            (V::ZTT, -0.9),
        ]);
        let by_hand = 2.0 * 1.2 * 0.7 * 0.3 + 1.2f64.powi(2) * 0.4 + 0.3f64.cos() * (-0.9);
        assert!((d.evaluate(&p).unwrap() - by_hand).abs() < 1e-14);
    }

    #[test]
    fn order_overflow_is_detected() {
        let e = JetExpr::Var(V::z(4, 0).unwrap());
        assert!(matches!(
            e.d_x(),
            Err(CalculusError::OrderOverflow { .. })
        ));
    }

    #[test]
    fn substitute_replaces_target() {
        let rule = EquationRule::new(parse("sin(z)").unwrap()).unwrap();
        let e = JetExpr::Var(V::ZXT);
        let r = e.reduce(&rule).unwrap();
        let p = point(&[(V::Z0, 0.5)]);
        assert_eq!(r.evaluate(&p).unwrap(), 0.5f64.sin());
    }

    #[test]
    fn substitute_leaves_pure_derivatives_alone() {
        let rule = EquationRule::new(parse("sin(z)").unwrap()).unwrap();
        let e = JetExpr::Var(V::ZXX);
        assert_eq!(e.reduce(&rule).unwrap(), e);
    }

    #[test]
    fn substitute_expands_consequences_by_chain_rule() {
        // z_xxt with z_xt = F(z, z_x) becomes F_z z_x + F_zx z_xx
        let rule = EquationRule::new(parse("z^2 + z_x^3").unwrap()).unwrap();
        let e = JetExpr::Var(V::z(2, 1).unwrap());
        let r = e.reduce(&rule).unwrap();
        let p = point(&[(V::Z0, 1.1), (V::ZX, 0.6), (V::ZXX, -0.8)]);
        let by_hand = 2.0 * 1.1 * 0.6 + 3.0 * 0.6f64.powi(2) * (-0.8);
        assert!((r.evaluate(&p).unwrap() - by_hand).abs() < 1e-14);
        assert!(r.variables().iter().all(|v| !v.is_mixed()));
    }

    #[test]
    fn rule_rejects_mixed_rhs() {
        let rhs = JetExpr::Var(V::ZXT);
        assert!(EquationRule::new(rhs).is_err());
        let rhs = JetExpr::Var(V::z(3, 0).unwrap());
        assert!(EquationRule::new(rhs).is_err());
    }
}
