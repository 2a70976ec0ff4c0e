//! Construction of curvature −1 systems: the four-function generator, its
//! one-function specialization, the catalog of built-in systems, the
//! reducibility test for equations of the form
//! `z_xt = a₁ z_xx + a₂ z_x z_t + a₃ z_x² + a₄`, and dependent-variable
//! changes.

use crate::jet::{
    partial, probe_zero, CalculusError, Constraint, EquationRule, JetExpr, JetPoint, JetVariable,
    RuleError, SampleError, Sampler, Verdict, Wrt,
};
use crate::system::{ImmersionData, OneForm, PssSystem};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("hypothesis violated: {hypothesis} ({detail})")]
    HypothesisViolation { hypothesis: String, detail: String },
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),
    #[error("construction self-check failed: {0}")]
    SelfCheck(String),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Sample(#[from] SampleError),
}

fn zv(v: JetVariable) -> JetExpr {
    JetExpr::Var(v)
}

fn require_not_identically_zero(
    expr: &JetExpr,
    sampler: &Sampler,
    hypothesis: &str,
) -> Result<(), GenerateError> {
    match probe_zero(expr, sampler)?.verdict {
        Verdict::Nonzero { .. } => Ok(()),
        Verdict::Zero => Err(GenerateError::HypothesisViolation {
            hypothesis: hypothesis.to_string(),
            detail: "identically zero on the sampled box".to_string(),
        }),
    }
}

fn require_identically_zero(
    expr: &JetExpr,
    sampler: &Sampler,
    what: &str,
) -> Result<(), GenerateError> {
    match probe_zero(expr, sampler)?.verdict {
        Verdict::Zero => Ok(()),
        Verdict::Nonzero { witness, value } => Err(GenerateError::SelfCheck(format!(
            "{what} has residual {value} at {:?}",
            witness.named_values()
        ))),
    }
}

// ---------------------------------------------------------------------------
// Four-function generator
// ---------------------------------------------------------------------------

/// Input quartet ψ₂₁, ψ₂₂, ψ₃₁, ψ₃₂: differentiable functions of `z` (and
/// parameters) subject to
///   (ψ₃₁′)² + (ψ₃₂′)² ≢ 0,
///   Δ₀ = ψ₃₂ψ₂₁ − ψ₃₁ψ₂₂ ≢ 0,
///   G′ ≢ 0 with G = ψ₂₁ψ₂₂ − ψ₃₁ψ₃₂.
#[derive(Debug, Clone)]
pub struct Prop1Input {
    pub psi21: JetExpr,
    pub psi22: JetExpr,
    pub psi31: JetExpr,
    pub psi32: JetExpr,
    /// Parameter values to pin while checking hypotheses and afterwards in
    /// the generated system. Parameters not listed stay symbolic.
    pub parameters: BTreeMap<String, f64>,
}

impl Prop1Input {
    pub fn new(psi21: JetExpr, psi22: JetExpr, psi31: JetExpr, psi32: JetExpr) -> Self {
        Prop1Input {
            psi21,
            psi22,
            psi31,
            psi32,
            parameters: BTreeMap::new(),
        }
    }

    pub fn pin(mut self, name: &str, value: f64) -> Self {
        self.parameters.insert(name.to_string(), value);
        self
    }

    fn sampler(&self) -> Sampler {
        let mut s = Sampler::default();
        for (name, value) in &self.parameters {
            s = s.pin(name, *value);
        }
        s
    }
}

/// Builds the system
/// `z_xt = (A z_tt + B z_xx − C)/G′` with
/// `ω₁ = ℓ dx + h dt`, `ω₂ = ψ₂₂ dx + ψ₂₁ dt`, `ω₃ = ψ₃₂ dx + ψ₃₁ dt`,
/// where `(h, ℓ)` comes from the 2×2 matrix product
/// `(1/Δ₀)·[[−ψ₂₁, ψ₃₁], [−ψ₂₂, ψ₃₂]]·[[ψ₂₁′, −ψ₂₂′], [ψ₃₁′, −ψ₃₂′]]·(z_x, z_t)ᵀ`,
/// `A = ψ₂₂ψ₂₂′ − ψ₃₂ψ₃₂′`, `B = ψ₂₁ψ₂₁′ − ψ₃₁ψ₃₁′` and
/// `C = Δ₀(h′ z_x − ℓ′ z_t − Δ₀)` (primes are ∂/∂z).
///
/// The partial derivatives of `ℓ` and `h` with respect to `z_x` and `z_t`
/// have closed forms in the ψ's; they are re-derived here symbolically and
/// compared numerically as a construction-time self-check, which pins the
/// matrix product interpretation.
pub fn prop1(input: &Prop1Input) -> Result<PssSystem, GenerateError> {
    let z = JetVariable::Z0;
    let (p21, p22, p31, p32) = (
        input.psi21.clone(),
        input.psi22.clone(),
        input.psi31.clone(),
        input.psi32.clone(),
    );
    let d21 = partial(&p21, &Wrt::Var(z));
    let d22 = partial(&p22, &Wrt::Var(z));
    let d31 = partial(&p31, &Wrt::Var(z));
    let d32 = partial(&p32, &Wrt::Var(z));

    let delta0 = p32.clone() * p21.clone() - p31.clone() * p22.clone();
    let g = p21.clone() * p22.clone() - p31.clone() * p32.clone();
    let g_z = partial(&g, &Wrt::Var(z));

    let sampler = input.sampler();
    require_not_identically_zero(
        &(d31.clone().pow(2.0) + d32.clone().pow(2.0)),
        &sampler,
        "(psi31')^2 + (psi32')^2 != 0",
    )?;
    require_not_identically_zero(&delta0, &sampler, "Delta0 = psi32 psi21 - psi31 psi22 != 0")?;
    require_not_identically_zero(&g_z, &sampler, "G = psi21 psi22 - psi31 psi32 not constant")?;

    let zx = zv(JetVariable::ZX);
    let zt = zv(JetVariable::ZT);
    // inner product of the derivative matrix with (z_x, z_t)
    let x1 = d21.clone() * zx.clone() - d22.clone() * zt.clone();
    let x2 = d31.clone() * zx.clone() - d32.clone() * zt.clone();
    let h = (-p21.clone() * x1.clone() + p31.clone() * x2.clone()) / delta0.clone();
    let ell = (-p22.clone() * x1 + p32.clone() * x2.clone()) / delta0.clone();

    // construction-time self-check: the four closed-form first-jet partials
    let checks = [
        (
            partial(&ell, &Wrt::Var(JetVariable::ZX))
                - (-p22.clone() * d21.clone() + p32.clone() * d31.clone()) / delta0.clone(),
            "l_{,z_x}",
        ),
        (
            partial(&ell, &Wrt::Var(JetVariable::ZT))
                - (p22.clone() * d22.clone() - p32.clone() * d32.clone()) / delta0.clone(),
            "l_{,z_t}",
        ),
        (
            partial(&h, &Wrt::Var(JetVariable::ZX))
                - (-p21.clone() * d21.clone() + p31.clone() * d31.clone()) / delta0.clone(),
            "h_{,z_x}",
        ),
        (
            partial(&h, &Wrt::Var(JetVariable::ZT))
                - (p21.clone() * d22.clone() - p31.clone() * d32.clone()) / delta0.clone(),
            "h_{,z_t}",
        ),
    ];
    let check_sampler = sampler
        .clone()
        .with_constraint(Constraint::Nonzero(delta0.clone()));
    for (residual, name) in checks {
        require_identically_zero(&residual, &check_sampler, name)?;
    }

    let a_coeff = p22.clone() * d22 - p32.clone() * d32;
    let b_coeff = p21.clone() * d21 - p31.clone() * d31;
    let ell_z = partial(&ell, &Wrt::Var(z));
    let h_z = partial(&h, &Wrt::Var(z));
    let c_coeff = delta0.clone()
        * (h_z * zv(JetVariable::ZX) - ell_z * zv(JetVariable::ZT) - delta0.clone());
    let rhs = (a_coeff * zv(JetVariable::ZTT) + b_coeff * zv(JetVariable::ZXX) - c_coeff)
        / g_z.clone();

    Ok(PssSystem {
        name: "four_function".to_string(),
        omega1: OneForm::new(ell, h),
        omega2: OneForm::new(p22, p21),
        omega3: OneForm::new(p32, p31),
        rule: EquationRule::new(rhs)?,
        parameters: input
            .parameters
            .iter()
            .map(|(k, v)| (k.clone(), Some(*v)))
            .collect(),
        admissibility: vec![
            Constraint::Nonzero(delta0),
            Constraint::Nonzero(g_z),
            // generic-solution condition: the dx∧dt coefficient of ω₁∧ω₂
            Constraint::Nonzero(x2),
        ],
    })
}

// ---------------------------------------------------------------------------
// One-function specialization
// ---------------------------------------------------------------------------

/// Specializes the generator to
/// `ψ₂₁ = λψ + m₁/λ, ψ₂₂ = λ, ψ₃₁ = √(2m₁ψ + m₂), ψ₃₂ = 0`
/// and returns the equation in its closed form
///
/// `z_xt = ψ z_xx − (ψ″/ψ′ − m₁ψ′/(2m₁ψ+m₂)) z_x z_t
///         + [ψψ″/ψ′ + ψ′(m₁ψ+m₂)/(2m₁ψ+m₂)] z_x² + (2m₁ψ+m₂)/ψ′`
///
/// together with the immersion data `a = −2√(2m₁ψ+m₂)/(ψ′ z_x), b = 1,
/// c = 0`, so `ω₁₃ = a ω₁ + ω₂` and `ω₂₃ = ω₁`. The principal curvatures of
/// the resulting immersion depend on the first-order jet through `z_x`,
/// which is the whole point of this family.
pub fn cor1(
    psi: &JetExpr,
    m1: f64,
    m2: f64,
    lambda: f64,
) -> Result<(PssSystem, ImmersionData), GenerateError> {
    if lambda == 0.0 {
        return Err(GenerateError::InvalidParameter {
            name: "lambda",
            value: lambda,
            reason: "must be nonzero",
        });
    }
    if m1 == 0.0 {
        return Err(GenerateError::InvalidParameter {
            name: "m1",
            value: m1,
            reason: "must be nonzero",
        });
    }
    let z = JetVariable::Z0;
    let m1e = JetExpr::param("m1");
    let m2e = JetExpr::param("m2");
    let le = JetExpr::param("lambda");

    let psi1 = partial(psi, &Wrt::Var(z));
    let psi2 = partial(&psi1, &Wrt::Var(z));
    let gate = JetExpr::num(2.0) * m1e.clone() * psi.clone() + m2e.clone();
    let root = gate.clone().sqrt();

    let mut parameters: BTreeMap<String, Option<f64>> = BTreeMap::new();
    parameters.insert("m1".into(), Some(m1));
    parameters.insert("m2".into(), Some(m2));
    parameters.insert("lambda".into(), Some(lambda));
    for p in psi.parameters() {
        parameters.entry(p).or_insert(None);
    }

    let mut sampler = Sampler::default()
        .pin("m1", m1)
        .pin("m2", m2)
        .pin("lambda", lambda)
        .with_constraint(Constraint::Positive(gate.clone()));
    for (name, value) in &parameters {
        if let Some(v) = value {
            sampler = sampler.pin(name, *v);
        }
    }
    require_not_identically_zero(
        &(m1e.clone() * psi1.clone()),
        &sampler,
        "m1 psi' != 0",
    )?;
    // feasibility of 2 m1 psi + m2 > 0 on the box: drawing one admissible
    // point either succeeds or reports exhaustion
    sampler.point(&[&gate], 0)?;

    let zx = zv(JetVariable::ZX);
    let zt = zv(JetVariable::ZT);
    let rhs = psi.clone() * zv(JetVariable::ZXX)
        - (psi2.clone() / psi1.clone()
            - m1e.clone() * psi1.clone() / gate.clone())
            * zx.clone()
            * zt
        + (psi.clone() * psi2.clone() / psi1.clone()
            + psi1.clone() * (m1e.clone() * psi.clone() + m2e.clone()) / gate.clone())
            * zx.clone().pow(2.0)
        + gate.clone() / psi1.clone();

    let omega1 = OneForm::new(
        le.clone() * psi1.clone() * zx.clone() / root.clone(),
        le.clone() * psi1.clone() * zx.clone() * psi.clone() / root.clone(),
    );
    let omega2 = OneForm::new(
        le.clone(),
        le.clone() * psi.clone() + m1e.clone() / le.clone(),
    );
    let omega3 = OneForm::new(JetExpr::ZERO, root.clone());

    let a = -(JetExpr::num(2.0) * root) / (psi1.clone() * zx);
    let immersion = ImmersionData::new(a, JetExpr::ONE, JetExpr::ZERO, &omega1, &omega2);

    let system = PssSystem {
        name: "one_function".to_string(),
        omega1,
        omega2,
        omega3,
        rule: EquationRule::new(rhs)?,
        parameters,
        admissibility: vec![
            Constraint::Positive(gate),
            Constraint::Nonzero(psi1),
            Constraint::Nonzero(zv(JetVariable::ZX)),
        ],
    };
    Ok((system, immersion))
}

/// The specialization quartet fed to [`prop1`] to reproduce [`cor1`]:
/// `ψ₂₁ = λψ + m₁/λ, ψ₂₂ = λ, ψ₃₁ = √(2m₁ψ+m₂), ψ₃₂ = 0`.
pub fn cor1_quartet(psi: &JetExpr, m1: f64, m2: f64, lambda: f64) -> Prop1Input {
    let m1e = JetExpr::param("m1");
    let m2e = JetExpr::param("m2");
    let le = JetExpr::param("lambda");
    Prop1Input::new(
        le.clone() * psi.clone() + m1e.clone() / le.clone(),
        le,
        (JetExpr::num(2.0) * m1e * psi.clone() + m2e).sqrt(),
        JetExpr::ZERO,
    )
    .pin("m1", m1)
    .pin("m2", m2)
    .pin("lambda", lambda)
}

// ---------------------------------------------------------------------------
// Reducibility test
// ---------------------------------------------------------------------------

/// Coefficients of `z_xt = a₁(z) z_xx + a₂(z) z_x z_t + a₃(z) z_x² + a₄(z)`
/// with candidate constants m₁ ≠ 0, m₂.
#[derive(Debug, Clone)]
pub struct ReducibilityInput {
    pub a1: JetExpr,
    pub a2: JetExpr,
    pub a3: JetExpr,
    pub a4: JetExpr,
    pub m1: f64,
    pub m2: f64,
}

/// Which equation of the reducibility system failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReducibilityEquation {
    A2,
    A3,
    A4,
}

#[derive(Debug, Clone)]
pub enum Reducibility {
    /// All conditions hold: the substitution `z̄ = a₁(z)` reduces the
    /// equation to the normal form with these constants.
    Reducible { m1: f64, m2: f64, psi: JetExpr },
    /// The necessary condition `a₃a₄ = 2m₁a₁ − a₁a₂a₄ + m₂` fails.
    NecessaryConditionFails { witness: JetPoint, value: f64 },
    /// The necessary condition holds but one of the three defining
    /// equations fails.
    SystemFails {
        equation: ReducibilityEquation,
        witness: JetPoint,
        value: f64,
    },
}

impl Reducibility {
    pub fn is_reducible(&self) -> bool {
        matches!(self, Reducibility::Reducible { .. })
    }
}

/// Tests whether the equation reduces to the normal form. The necessary
/// condition is checked first; only if it passes is the full three-equation
/// system examined, reporting which equation fails.
pub fn check_reducibility(input: &ReducibilityInput) -> Result<Reducibility, GenerateError> {
    let z = JetVariable::Z0;
    let m1 = JetExpr::num(input.m1);
    let m2 = JetExpr::num(input.m2);
    let a1p = partial(&input.a1, &Wrt::Var(z));
    let a1pp = partial(&a1p, &Wrt::Var(z));
    let gate = JetExpr::num(2.0) * m1.clone() * input.a1.clone() + m2.clone();

    let sampler = Sampler::default();
    require_not_identically_zero(&a1p, &sampler, "a1'(z) != 0")?;
    require_not_identically_zero(&input.a4, &sampler, "a4(z) != 0")?;
    if input.m1 == 0.0 {
        return Err(GenerateError::InvalidParameter {
            name: "m1",
            value: 0.0,
            reason: "must be nonzero",
        });
    }

    let probe_sampler = sampler
        .with_constraint(Constraint::Positive(gate.clone()))
        .with_constraint(Constraint::Nonzero(a1p.clone()));

    // necessary condition: a3 a4 − 2 m1 a1 + a1 a2 a4 − m2 = 0
    let necessary = input.a3.clone() * input.a4.clone()
        - JetExpr::num(2.0) * m1.clone() * input.a1.clone()
        + input.a1.clone() * input.a2.clone() * input.a4.clone()
        - m2.clone();
    if let Verdict::Nonzero { witness, value } = probe_zero(&necessary, &probe_sampler)?.verdict {
        return Ok(Reducibility::NecessaryConditionFails { witness, value });
    }

    let system = [
        (
            ReducibilityEquation::A2,
            input.a2.clone()
                - (-(a1pp.clone() / a1p.clone()) + m1.clone() * a1p.clone() / gate.clone()),
        ),
        (
            ReducibilityEquation::A3,
            input.a3.clone()
                - (input.a1.clone() * a1pp.clone() / a1p.clone()
                    + a1p.clone() * (m1.clone() * input.a1.clone() + m2.clone()) / gate.clone()),
        ),
        (
            ReducibilityEquation::A4,
            input.a4.clone() - gate / a1p,
        ),
    ];
    for (equation, residual) in system {
        if let Verdict::Nonzero { witness, value } =
            probe_zero(&residual, &probe_sampler)?.verdict
        {
            return Ok(Reducibility::SystemFails {
                equation,
                witness,
                value,
            });
        }
    }
    Ok(Reducibility::Reducible {
        m1: input.m1,
        m2: input.m2,
        psi: input.a1.clone(),
    })
}

// ---------------------------------------------------------------------------
// Built-in systems
// ---------------------------------------------------------------------------

/// Catalog of ready-made systems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Builtin {
    /// `z_xt = sin z` with the classical 1-forms; `sign` selects the
    /// immersion branch `a = ±2/tan z, b = ∓1, c = 0`.
    SineGordon { eta: f64, sign: f64 },
    /// `z_xt = z + z z_x² + (z²/2) z_xx`
    ShortPulse { lambda: f64 },
    /// `z_xt = m₁[z + z z_x² + (z²/2) z_xx] − (m₂/2m₁) z_xx`
    FamilySp { m1: f64, m2: f64, lambda: f64 },
    /// The four-parameter family
    /// `z_xt = [(m₁αz+β)²−m₂]/(2m₁) z_xx + α(m₁αz+β) z_x² + (m₁αz+β)/α`
    Example4Param {
        alpha: f64,
        beta: f64,
        m1: f64,
        m2: f64,
        lambda: f64,
    },
}

impl Builtin {
    pub const NAMES: [&'static str; 4] =
        ["sine_gordon", "short_pulse", "family_sp", "example_4param"];

    pub fn name(&self) -> &'static str {
        match self {
            Builtin::SineGordon { .. } => "sine_gordon",
            Builtin::ShortPulse { .. } => "short_pulse",
            Builtin::FamilySp { .. } => "family_sp",
            Builtin::Example4Param { .. } => "example_4param",
        }
    }
}

/// Constructs a built-in system together with its immersion data.
pub fn builtin(which: Builtin) -> Result<(PssSystem, ImmersionData), GenerateError> {
    match which {
        Builtin::SineGordon { eta, sign } => sine_gordon(eta, sign),
        Builtin::ShortPulse { lambda } => short_pulse(lambda),
        Builtin::FamilySp { m1, m2, lambda } => family_sp(m1, m2, lambda),
        Builtin::Example4Param {
            alpha,
            beta,
            m1,
            m2,
            lambda,
        } => example_4param(alpha, beta, m1, m2, lambda),
    }
}

fn sine_gordon(eta: f64, sign: f64) -> Result<(PssSystem, ImmersionData), GenerateError> {
    if eta == 0.0 {
        return Err(GenerateError::InvalidParameter {
            name: "eta",
            value: eta,
            reason: "must be nonzero",
        });
    }
    if sign != 1.0 && sign != -1.0 {
        return Err(GenerateError::InvalidParameter {
            name: "s",
            value: sign,
            reason: "must be +1 or -1",
        });
    }
    let etae = JetExpr::param("eta");
    let se = JetExpr::param("s");
    let omega1 = OneForm::new(JetExpr::ZERO, JetExpr::z().sin() / etae.clone());
    let omega2 = OneForm::new(etae.clone(), JetExpr::z().cos() / etae);
    let omega3 = OneForm::new(zv(JetVariable::ZX), JetExpr::ZERO);
    let a = se.clone() * JetExpr::num(2.0) / JetExpr::z().tan();
    let immersion = ImmersionData::new(a, -se, JetExpr::ZERO, &omega1, &omega2);
    let system = PssSystem {
        name: "sine_gordon".to_string(),
        omega1,
        omega2,
        omega3,
        rule: EquationRule::new(JetExpr::z().sin())?,
        parameters: [
            ("eta".to_string(), Some(eta)),
            ("s".to_string(), Some(sign)),
        ]
        .into_iter()
        .collect(),
        admissibility: vec![Constraint::Nonzero(JetExpr::z().sin())],
    };
    Ok((system, immersion))
}

fn short_pulse(lambda: f64) -> Result<(PssSystem, ImmersionData), GenerateError> {
    if lambda == 0.0 {
        return Err(GenerateError::InvalidParameter {
            name: "lambda",
            value: lambda,
            reason: "must be nonzero",
        });
    }
    let le = JetExpr::param("lambda");
    let zx = zv(JetVariable::ZX);
    // z + (1/6)(z³)_xx expanded through the contact structure
    let rhs = JetExpr::z()
        + JetExpr::z() * zx.clone().pow(2.0)
        + JetExpr::z().pow(2.0) / JetExpr::num(2.0) * zv(JetVariable::ZXX);
    let omega1 = OneForm::new(
        le.clone() * zx.clone(),
        le.clone() / JetExpr::num(2.0) * zx.clone() * JetExpr::z().pow(2.0),
    );
    let omega2 = OneForm::new(
        le.clone(),
        le.clone() / JetExpr::num(2.0) * JetExpr::z().pow(2.0) + JetExpr::ONE / le,
    );
    let omega3 = OneForm::new(JetExpr::ZERO, JetExpr::z());
    let a = -(JetExpr::num(2.0) / zx);
    let immersion = ImmersionData::new(a, JetExpr::ONE, JetExpr::ZERO, &omega1, &omega2);
    let system = PssSystem {
        name: "short_pulse".to_string(),
        omega1,
        omega2,
        omega3,
        rule: EquationRule::new(rhs)?,
        parameters: [("lambda".to_string(), Some(lambda))].into_iter().collect(),
        admissibility: vec![Constraint::Nonzero(zv(JetVariable::ZX))],
    };
    Ok((system, immersion))
}

fn family_sp(m1: f64, m2: f64, lambda: f64) -> Result<(PssSystem, ImmersionData), GenerateError> {
    if m1 == 0.0 {
        return Err(GenerateError::InvalidParameter {
            name: "m1",
            value: m1,
            reason: "must be nonzero",
        });
    }
    let m1e = JetExpr::param("m1");
    let m2e = JetExpr::param("m2");
    // the four-parameter family's ψ at α = 1, β = 0
    let psi = m1e.clone() * JetExpr::z().pow(2.0) / JetExpr::num(2.0)
        - m2e.clone() / (JetExpr::num(2.0) * m1e.clone());
    let (mut system, immersion) = cor1(&psi, m1, m2, lambda)?;
    // replace the rule by the expanded evolution form (valuewise equal)
    let zx = zv(JetVariable::ZX);
    let rhs = m1e.clone()
        * (JetExpr::z()
            + JetExpr::z() * zx.clone().pow(2.0)
            + JetExpr::z().pow(2.0) / JetExpr::num(2.0) * zv(JetVariable::ZXX))
        - m2e / (JetExpr::num(2.0) * m1e) * zv(JetVariable::ZXX);
    system.rule = EquationRule::new(rhs)?;
    system.name = "family_sp".to_string();
    Ok((system, immersion))
}

fn example_4param(
    alpha: f64,
    beta: f64,
    m1: f64,
    m2: f64,
    lambda: f64,
) -> Result<(PssSystem, ImmersionData), GenerateError> {
    if m1 * alpha == 0.0 {
        return Err(GenerateError::InvalidParameter {
            name: "m1*alpha",
            value: m1 * alpha,
            reason: "must be nonzero",
        });
    }
    if lambda == 0.0 {
        return Err(GenerateError::InvalidParameter {
            name: "lambda",
            value: lambda,
            reason: "must be nonzero",
        });
    }
    let m1e = JetExpr::param("m1");
    let m2e = JetExpr::param("m2");
    let ae = JetExpr::param("alpha");
    let be = JetExpr::param("beta");
    let le = JetExpr::param("lambda");
    let u = m1e.clone() * ae.clone() * JetExpr::z() + be;
    let squared = u.clone().pow(2.0) - m2e;
    let zx = zv(JetVariable::ZX);

    let rhs = squared.clone() / (JetExpr::num(2.0) * m1e.clone()) * zv(JetVariable::ZXX)
        + ae.clone() * u.clone() * zx.clone().pow(2.0)
        + u.clone() / ae.clone();
    let omega1 = OneForm::new(
        le.clone() * ae.clone() * zx.clone(),
        le.clone() * ae.clone() * zx.clone() / (JetExpr::num(2.0) * m1e.clone())
            * squared.clone(),
    );
    let omega2 = OneForm::new(
        le.clone(),
        le.clone() / (JetExpr::num(2.0) * m1e.clone()) * squared + m1e / le,
    );
    let omega3 = OneForm::new(JetExpr::ZERO, u.clone());
    let a = -(JetExpr::num(2.0) / (ae * zx));
    let immersion = ImmersionData::new(a, JetExpr::ONE, JetExpr::ZERO, &omega1, &omega2);
    let system = PssSystem {
        name: "example_4param".to_string(),
        omega1,
        omega2,
        omega3,
        rule: EquationRule::new(rhs)?,
        parameters: [
            ("alpha".to_string(), Some(alpha)),
            ("beta".to_string(), Some(beta)),
            ("m1".to_string(), Some(m1)),
            ("m2".to_string(), Some(m2)),
            ("lambda".to_string(), Some(lambda)),
        ]
        .into_iter()
        .collect(),
        admissibility: vec![
            Constraint::Nonzero(zv(JetVariable::ZX)),
            Constraint::Nonzero(u),
        ],
    };
    Ok((system, immersion))
}

// ---------------------------------------------------------------------------
// Change of dependent variable
// ---------------------------------------------------------------------------

/// Rewrites a system in the new dependent variable `z̄ = ψ(z)`.
///
/// Symbolic inversion of ψ is out of scope, so the caller supplies the
/// inverse `φ` (as an expression in `z`); `ψ(φ(z)) = z` is checked by
/// sampling before anything is rewritten. In the output, the new variable is
/// again called `z` and the old jets are expressed through the chain rule:
/// `z_old = φ(z)`, `z_x_old = z_x/ψ′(φ(z))`, and so on through second order.
pub fn change_of_variable(
    sys: &PssSystem,
    psi: &JetExpr,
    phi: &JetExpr,
) -> Result<PssSystem, GenerateError> {
    let z = JetVariable::Z0;
    let psi1 = partial(psi, &Wrt::Var(z));
    let psi2 = partial(&psi1, &Wrt::Var(z));

    let mut sampler = Sampler::default();
    for (name, value) in &sys.parameters {
        if let Some(v) = value {
            sampler = sampler.pin(name, *v);
        }
    }
    require_not_identically_zero(&psi1, &sampler, "psi' nonvanishing")?;
    let roundtrip = psi.replace_var(z, phi) - JetExpr::z();
    if let Verdict::Nonzero { witness, value } = probe_zero(&roundtrip, &sampler)?.verdict {
        return Err(GenerateError::SelfCheck(format!(
            "phi is not the inverse of psi: psi(phi(z)) - z = {value} at {:?}",
            witness.named_values()
        )));
    }

    // everything below is evaluated at the old variable u = φ(z)
    let at_u = |e: &JetExpr| e.replace_var(z, phi);
    let psi1u = at_u(&psi1);
    let psi2u = at_u(&psi2);
    let zx = zv(JetVariable::ZX);
    let zt = zv(JetVariable::ZT);

    let old_zx = zx.clone() / psi1u.clone();
    let old_zt = zt.clone() / psi1u.clone();
    let old_zxx = zv(JetVariable::ZXX) / psi1u.clone()
        - psi2u.clone() * zx.clone().pow(2.0) / psi1u.clone().pow(3.0);
    let old_ztt = zv(JetVariable::ZTT) / psi1u.clone()
        - psi2u.clone() * zt.clone().pow(2.0) / psi1u.clone().pow(3.0);

    let first_order: Vec<(JetVariable, JetExpr)> = vec![
        (JetVariable::Z0, phi.clone()),
        (JetVariable::ZX, old_zx.clone()),
        (JetVariable::ZT, old_zt.clone()),
    ];
    let mut second_order = first_order.clone();
    second_order.push((JetVariable::ZXX, old_zxx));
    second_order.push((JetVariable::ZTT, old_ztt));

    // z̄_xt = ψ″ z_x_old z_t_old + ψ′ · rhs_old
    let new_rhs = psi2u * old_zx * old_zt + psi1u.clone() * sys.rule.rhs.replace_vars(&second_order);

    let transform_form = |f: &OneForm| OneForm {
        dx: f.dx.replace_vars(&first_order),
        dt: f.dt.replace_vars(&first_order),
    };
    let mut admissibility: Vec<Constraint> = sys
        .admissibility
        .iter()
        .map(|c| match c {
            Constraint::Positive(e) => Constraint::Positive(e.replace_vars(&second_order)),
            Constraint::Nonzero(e) => Constraint::Nonzero(e.replace_vars(&second_order)),
        })
        .collect();
    admissibility.push(Constraint::Nonzero(psi1u));

    Ok(PssSystem {
        name: format!("{}_transformed", sys.name),
        omega1: transform_form(&sys.omega1),
        omega2: transform_form(&sys.omega2),
        omega3: transform_form(&sys.omega3),
        rule: EquationRule::new(new_rhs)?,
        parameters: sys.parameters.clone(),
        admissibility,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{is_identically_zero, parse};

    /// Valuewise equality of two expressions over a system's admissible set.
    fn agree(sys: &PssSystem, a: &JetExpr, b: &JetExpr, tol: f64) -> bool {
        let sampler = sys.sampler().with_tolerance(tol);
        is_identically_zero(&(a.clone() - b.clone()), &sampler)
            .unwrap()
            .is_zero()
    }

    #[test]
    fn one_function_identity_psi_matches_normal_form() {
        // ψ = z, m1 = 1, m2 = 0, λ = 1:
        // z_xt = z z_xx + z_x z_t/(2z) + z_x²/2 + 2z
        let (sys, _) = cor1(&JetExpr::z(), 1.0, 0.0, 1.0).unwrap();
        let expected = parse("z*z_xx + z_x*z_t/(2*z) + z_x^2/2 + 2*z").unwrap();
        assert!(agree(&sys, &sys.rule.rhs, &expected, 1e-9));
    }

    #[test]
    fn four_function_generator_reproduces_the_specialization() {
        let (sys_cor, _) = cor1(&JetExpr::z(), 1.0, 0.0, 1.0).unwrap();
        let sys_prop = prop1(&cor1_quartet(&JetExpr::z(), 1.0, 0.0, 1.0)).unwrap();
        assert!(agree(&sys_cor, &sys_cor.rule.rhs, &sys_prop.rule.rhs, 1e-10));
        for (a, b) in sys_cor.forms().iter().zip(sys_prop.forms().iter()) {
            assert!(agree(&sys_cor, &a.dx, &b.dx, 1e-10));
            assert!(agree(&sys_cor, &a.dt, &b.dt, 1e-10));
        }
    }

    #[test]
    fn degenerate_quartet_is_rejected() {
        // constant ψ₃₁, ψ₃₂ violate (ψ₃₁′)² + (ψ₃₂′)² ≠ 0
        let input = Prop1Input::new(
            parse("z^2").unwrap(),
            JetExpr::ONE,
            JetExpr::ONE,
            JetExpr::ZERO,
        );
        match prop1(&input) {
            Err(GenerateError::HypothesisViolation { hypothesis, .. }) => {
                assert!(hypothesis.contains("psi31'"));
            }
            other => panic!("expected hypothesis violation, got {other:?}"),
        }
    }

    #[test]
    fn four_parameter_family_matches_its_specialized_psi() {
        // ψ = [(m1 α z + β)² − m2]/(2 m1) reduces the closed form to the
        // four-parameter display, including a = −2/(α z_x)
        let (alpha, beta, m1, m2, lambda) = (2.0, 1.0, 1.0, 0.5, 1.0);
        let psi = parse("((m1*alpha*z + beta)^2 - m2)/(2*m1)").unwrap();
        let (sys_cor, imm_cor) = cor1(&psi, m1, m2, lambda).unwrap();
        let mut sys_cor = sys_cor;
        sys_cor
            .parameters
            .insert("alpha".to_string(), Some(alpha));
        sys_cor.parameters.insert("beta".to_string(), Some(beta));

        let (sys_lit, imm_lit) = builtin(Builtin::Example4Param {
            alpha,
            beta,
            m1,
            m2,
            lambda,
        })
        .unwrap();
        assert!(agree(&sys_cor, &sys_cor.rule.rhs, &sys_lit.rule.rhs, 1e-9));
        assert!(agree(&sys_cor, &imm_cor.a, &imm_lit.a, 1e-9));
        for (a, b) in sys_cor.forms().iter().zip(sys_lit.forms().iter()) {
            assert!(agree(&sys_cor, &a.dx, &b.dx, 1e-9));
            assert!(agree(&sys_cor, &a.dt, &b.dt, 1e-9));
        }
    }

    #[test]
    fn short_pulse_rule_is_the_expanded_cubic() {
        let (sys, _) = builtin(Builtin::ShortPulse { lambda: 1.0 }).unwrap();
        let expected = parse("z + z*z_x^2 + (z^2/2)*z_xx").unwrap();
        assert!(agree(&sys, &sys.rule.rhs, &expected, 1e-12));
    }

    #[test]
    fn family_sp_at_unit_parameters_is_short_pulse() {
        let (family, imm_f) = builtin(Builtin::FamilySp {
            m1: 1.0,
            m2: 0.0,
            lambda: 1.0,
        })
        .unwrap();
        let (sp, imm_sp) = builtin(Builtin::ShortPulse { lambda: 1.0 }).unwrap();
        assert!(agree(&family, &family.rule.rhs, &sp.rule.rhs, 1e-10));
        for (a, b) in family.forms().iter().zip(sp.forms().iter()) {
            assert!(agree(&family, &a.dx, &b.dx, 1e-10));
            assert!(agree(&family, &a.dt, &b.dt, 1e-10));
        }
        assert!(agree(&family, &imm_f.a, &imm_sp.a, 1e-10));
    }

    #[test]
    fn invalid_builtin_parameters_are_rejected() {
        assert!(matches!(
            builtin(Builtin::SineGordon { eta: 0.0, sign: 1.0 }),
            Err(GenerateError::InvalidParameter { name: "eta", .. })
        ));
        assert!(matches!(
            builtin(Builtin::ShortPulse { lambda: 0.0 }),
            Err(GenerateError::InvalidParameter { name: "lambda", .. })
        ));
        assert!(matches!(
            builtin(Builtin::FamilySp { m1: 0.0, m2: 1.0, lambda: 1.0 }),
            Err(GenerateError::InvalidParameter { name: "m1", .. })
        ));
        assert!(matches!(
            builtin(Builtin::SineGordon { eta: 1.0, sign: 0.5 }),
            Err(GenerateError::InvalidParameter { name: "s", .. })
        ));
    }

    #[test]
    fn normal_form_coefficients_are_reducible() {
        // coefficients of the normal form itself, m1 = 1, m2 = 0
        let input = ReducibilityInput {
            a1: parse("z").unwrap(),
            a2: parse("1/(2*z)").unwrap(),
            a3: parse("1/2").unwrap(),
            a4: parse("2*z").unwrap(),
            m1: 1.0,
            m2: 0.0,
        };
        assert!(check_reducibility(&input).unwrap().is_reducible());
    }

    #[test]
    fn perturbed_a4_fails_the_necessary_condition() {
        let input = ReducibilityInput {
            a1: parse("z").unwrap(),
            a2: parse("1/(2*z)").unwrap(),
            a3: parse("1/2").unwrap(),
            a4: parse("2*z + 1").unwrap(),
            m1: 1.0,
            m2: 0.0,
        };
        match check_reducibility(&input).unwrap() {
            Reducibility::NecessaryConditionFails { value, .. } => {
                assert!(value.abs() > 1e-6);
            }
            other => panic!("expected necessary-condition failure, got {other:?}"),
        }
    }

    #[test]
    fn short_pulse_written_in_z_form_is_reducible() {
        // (1/6)(z³)_xx expanded gives a1 = z²/2, a2 = 0, a3 = z, a4 = z
        let input = ReducibilityInput {
            a1: parse("z^2/2").unwrap(),
            a2: JetExpr::ZERO,
            a3: parse("z").unwrap(),
            a4: parse("z").unwrap(),
            m1: 1.0,
            m2: 0.0,
        };
        assert!(check_reducibility(&input).unwrap().is_reducible());
    }

    #[test]
    fn change_of_variable_identity_is_a_no_op_valuewise() {
        let (sys, _) = cor1(&JetExpr::z(), 1.0, 0.0, 1.0).unwrap();
        let mapped = change_of_variable(&sys, &JetExpr::z(), &JetExpr::z()).unwrap();
        assert!(agree(&sys, &sys.rule.rhs, &mapped.rule.rhs, 1e-10));
    }

    #[test]
    fn change_of_variable_reduces_exp_psi_to_normal_form() {
        // the ψ = e^z system, pushed through z̄ = e^z, is the normal form
        let psi = JetExpr::z().exp();
        let (sys, _) = cor1(&psi, 1.0, 1.0, 1.0).unwrap();
        let mapped = change_of_variable(&sys, &psi, &JetExpr::z().ln()).unwrap();
        let (normal, _) = cor1(&JetExpr::z(), 1.0, 1.0, 1.0).unwrap();
        assert!(agree(&normal, &mapped.rule.rhs, &normal.rule.rhs, 1e-9));
    }

    #[test]
    fn change_of_variable_rejects_a_wrong_inverse() {
        let psi = JetExpr::z().exp();
        let (sys, _) = cor1(&psi, 1.0, 1.0, 1.0).unwrap();
        assert!(matches!(
            change_of_variable(&sys, &psi, &JetExpr::z()),
            Err(GenerateError::SelfCheck(_))
        ));
    }

    #[test]
    fn gauging_out_the_affine_shift_recovers_the_family() {
        // the 4-parameter equation at α = 2, β = 1, m1 = 1, m2 = 0, mapped
        // by z̄ = m1 α z + β, lands on the short-pulse family
        let (sys4, _) = builtin(Builtin::Example4Param {
            alpha: 2.0,
            beta: 1.0,
            m1: 1.0,
            m2: 0.0,
            lambda: 1.0,
        })
        .unwrap();
        let psi = parse("2*z + 1").unwrap();
        let phi = parse("(z - 1)/2").unwrap();
        let mapped = change_of_variable(&sys4, &psi, &phi).unwrap();
        let (family, _) = builtin(Builtin::FamilySp {
            m1: 1.0,
            m2: 0.0,
            lambda: 1.0,
        })
        .unwrap();
        // the mapped system still carries α, β pinned; compare under its sampler
        assert!(agree(&mapped, &mapped.rule.rhs, &family.rule.rhs, 1e-9));
    }

    #[test]
    fn curvature_depends_on_the_gradient() {
        // evaluate a at two points identical except z_x = 1 vs 2: ratio 2
        let (_, imm) = builtin(Builtin::FamilySp {
            m1: 1.0,
            m2: 0.0,
            lambda: 1.0,
        })
        .unwrap();
        let base = JetPoint::new()
            .with_var(JetVariable::Z0, 1.3)
            .with_param("m1", 1.0)
            .with_param("m2", 0.0)
            .with_param("lambda", 1.0);
        let p1 = base.clone().with_var(JetVariable::ZX, 1.0);
        let p2 = base.with_var(JetVariable::ZX, 2.0);
        let a1 = imm.a.evaluate(&p1).unwrap();
        let a2 = imm.a.evaluate(&p2).unwrap();
        assert!((a1 / a2 - 2.0).abs() < 1e-12);
    }
}
