//! The central objects: triples of 1-forms with an equation in solved form,
//! and the immersion data `{a, b, c}` with its derived 1-forms.

use crate::jet::{
    parse, Constraint, EquationRule, JetExpr, JetVariable, ParseError, RuleError, Sampler,
};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// A 1-form `f dx + g dt` with jet-expression coefficients.
///
/// Coefficients are always stored as (dx, dt) regardless of the order any
/// source material lists them in.
#[derive(Debug, Clone, PartialEq)]
pub struct OneForm {
    pub dx: JetExpr,
    pub dt: JetExpr,
}

impl OneForm {
    pub fn new(dx: JetExpr, dt: JetExpr) -> Self {
        OneForm { dx, dt }
    }

    /// dx∧dt coefficient of the wedge `self ∧ other`:
    /// `(f dx + g dt) ∧ (p dx + q dt) = (f q − g p) dx∧dt`.
    pub fn wedge(&self, other: &OneForm) -> JetExpr {
        self.dx.clone() * other.dt.clone() - self.dt.clone() * other.dx.clone()
    }

    /// dx∧dt coefficient of the exterior derivative: `D_x g − D_t f`.
    pub fn exterior_derivative(&self) -> Result<JetExpr, crate::jet::CalculusError> {
        Ok(self.dt.d_x()? - self.dx.d_t()?)
    }

    /// Pointwise linear combination `a·self + b·other`.
    pub fn combine(a: &JetExpr, first: &OneForm, b: &JetExpr, second: &OneForm) -> OneForm {
        OneForm {
            dx: a.clone() * first.dx.clone() + b.clone() * second.dx.clone(),
            dt: a.clone() * first.dt.clone() + b.clone() * second.dt.clone(),
        }
    }

    pub fn negate(&self) -> OneForm {
        OneForm {
            dx: -self.dx.clone(),
            dt: -self.dt.clone(),
        }
    }
}

/// A triple of 1-forms together with the equation they encode, the
/// parameters involved, and the inequality constraints cutting out the
/// admissible set.
#[derive(Debug, Clone, PartialEq)]
pub struct PssSystem {
    pub name: String,
    pub omega1: OneForm,
    pub omega2: OneForm,
    pub omega3: OneForm,
    pub rule: EquationRule,
    /// Parameter name → value; `None` leaves the parameter symbolic.
    pub parameters: BTreeMap<String, Option<f64>>,
    pub admissibility: Vec<Constraint>,
}

impl PssSystem {
    /// A sampler honouring this system's pinned parameters and admissibility
    /// constraints.
    pub fn sampler(&self) -> Sampler {
        let mut s = Sampler::default().with_constraints(self.admissibility.clone());
        for (name, value) in &self.parameters {
            if let Some(v) = *value {
                s = s.pin(name, v);
            }
        }
        s
    }

    pub fn forms(&self) -> [&OneForm; 3] {
        [&self.omega1, &self.omega2, &self.omega3]
    }
}

/// Immersion data `{a, b, c}` and the derived 1-forms
/// `ω₁₃ = a ω₁ + b ω₂`, `ω₂₃ = b ω₁ + c ω₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImmersionData {
    pub a: JetExpr,
    pub b: JetExpr,
    pub c: JetExpr,
    pub omega13: OneForm,
    pub omega23: OneForm,
}

impl ImmersionData {
    /// Derives the 1-forms from `{a, b, c}` and the system's `ω₁`, `ω₂`.
    /// The invariant `a c − b² = −1` is the caller's job to verify (it is
    /// checked by [`crate::verify::gauss_codazzi_residuals`]).
    pub fn new(a: JetExpr, b: JetExpr, c: JetExpr, omega1: &OneForm, omega2: &OneForm) -> Self {
        let omega13 = OneForm::combine(&a, omega1, &b, omega2);
        let omega23 = OneForm::combine(&b, omega1, &c, omega2);
        ImmersionData {
            a,
            b,
            c,
            omega13,
            omega23,
        }
    }
}

// ---------------------------------------------------------------------------
// JSON document form. Expressions travel as DSL text, which round-trips
// losslessly through the parser.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemDoc {
    pub name: String,
    pub parameters: BTreeMap<String, Option<f64>>,
    pub forms: FormsDoc,
    pub rule: RuleDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub immersion: Option<ImmersionDoc>,
    pub admissibility: Vec<ConstraintDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FormsDoc {
    pub omega1: FormDoc,
    pub omega2: FormDoc,
    pub omega3: FormDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FormDoc {
    pub dx: String,
    pub dt: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuleDoc {
    pub target: String,
    pub rhs: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImmersionDoc {
    pub a: String,
    pub b: String,
    pub c: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstraintDoc {
    pub expr: String,
    pub kind: ConstraintKindDoc,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKindDoc {
    Positive,
    Nonzero,
}

#[derive(Debug, Error)]
pub enum DocError {
    #[error("invalid expression in `{field}`: {source}")]
    Expr {
        field: &'static str,
        #[source]
        source: ParseError,
    },
    #[error("invalid jet coordinate name `{0}` for rule target")]
    Target(String),
    #[error("invalid rule: {0}")]
    Rule(#[from] RuleError),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

fn parse_field(field: &'static str, text: &str) -> Result<JetExpr, DocError> {
    parse(text).map_err(|source| DocError::Expr { field, source })
}

impl SystemDoc {
    pub fn from_system(sys: &PssSystem, imm: Option<&ImmersionData>) -> SystemDoc {
        let form = |f: &OneForm| FormDoc {
            dx: f.dx.to_string(),
            dt: f.dt.to_string(),
        };
        SystemDoc {
            name: sys.name.clone(),
            parameters: sys.parameters.clone(),
            forms: FormsDoc {
                omega1: form(&sys.omega1),
                omega2: form(&sys.omega2),
                omega3: form(&sys.omega3),
            },
            rule: RuleDoc {
                target: sys.rule.target.to_string(),
                rhs: sys.rule.rhs.to_string(),
            },
            immersion: imm.map(|i| ImmersionDoc {
                a: i.a.to_string(),
                b: i.b.to_string(),
                c: i.c.to_string(),
            }),
            admissibility: sys
                .admissibility
                .iter()
                .map(|c| match c {
                    Constraint::Positive(e) => ConstraintDoc {
                        expr: e.to_string(),
                        kind: ConstraintKindDoc::Positive,
                    },
                    Constraint::Nonzero(e) => ConstraintDoc {
                        expr: e.to_string(),
                        kind: ConstraintKindDoc::Nonzero,
                    },
                })
                .collect(),
        }
    }

    pub fn into_system(self) -> Result<(PssSystem, Option<ImmersionData>), DocError> {
        let form = |field: &'static str, f: &FormDoc| -> Result<OneForm, DocError> {
            Ok(OneForm::new(
                parse_field(field, &f.dx)?,
                parse_field(field, &f.dt)?,
            ))
        };
        let omega1 = form("forms.omega1", &self.forms.omega1)?;
        let omega2 = form("forms.omega2", &self.forms.omega2)?;
        let omega3 = form("forms.omega3", &self.forms.omega3)?;
        let target = JetVariable::from_name(&self.rule.target)
            .map_err(|_| DocError::Target(self.rule.target.clone()))?;
        let rule = EquationRule::with_target(target, parse_field("rule.rhs", &self.rule.rhs)?)?;
        let admissibility = self
            .admissibility
            .iter()
            .map(|c| {
                let e = parse_field("admissibility", &c.expr)?;
                Ok(match c.kind {
                    ConstraintKindDoc::Positive => Constraint::Positive(e),
                    ConstraintKindDoc::Nonzero => Constraint::Nonzero(e),
                })
            })
            .collect::<Result<Vec<_>, DocError>>()?;
        let system = PssSystem {
            name: self.name,
            omega1,
            omega2,
            omega3,
            rule,
            parameters: self.parameters,
            admissibility,
        };
        let immersion = match self.immersion {
            Some(doc) => Some(ImmersionData::new(
                parse_field("immersion.a", &doc.a)?,
                parse_field("immersion.b", &doc.b)?,
                parse_field("immersion.c", &doc.c)?,
                &system.omega1,
                &system.omega2,
            )),
            None => None,
        };
        Ok((system, immersion))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("system documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<SystemDoc, DocError> {
        Ok(serde_json::from_str(text)?)
    }
}
