//! Residual engines: structure equations, Gauss–Codazzi system, 2×2 and 3×3
//! zero-curvature representations, and the aggregated verification report.

use crate::jet::{
    probe_zero, CalculusError, EquationRule, JetExpr, SampleError, Sampler, Verdict,
};
use crate::system::{ImmersionData, PssSystem};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error(transparent)]
    Sample(#[from] SampleError),
}

/// The three structure residual dx∧dt coefficients, in order:
/// `dω₁ − ω₃∧ω₂`, `dω₂ − ω₁∧ω₃`, `dω₃ − ω₁∧ω₂`.
///
/// With `substitute = true` (the default everywhere downstream) each
/// coefficient is reduced modulo the system's equation; the unsubstituted
/// variant exists because two of the three identities hold off-equation for
/// generated systems.
pub fn structure_residuals(
    sys: &PssSystem,
    substitute: bool,
) -> Result<[JetExpr; 3], VerifyError> {
    let w = [&sys.omega1, &sys.omega2, &sys.omega3];
    let raw = [
        w[0].exterior_derivative()? - w[2].wedge(w[1]),
        w[1].exterior_derivative()? - w[0].wedge(w[2]),
        w[2].exterior_derivative()? - w[0].wedge(w[1]),
    ];
    if !substitute {
        return Ok(raw);
    }
    let mut out = Vec::with_capacity(3);
    for r in raw {
        out.push(r.reduce(&sys.rule)?);
    }
    Ok(out.try_into().expect("three residuals"))
}

/// Gauss–Codazzi residuals: `a c − b² + 1` and the dx∧dt coefficients of
/// `dω₁₃ − ω₁₂∧ω₂₃` and `dω₂₃ − ω₂₁∧ω₁₃`, the last two reduced modulo the
/// equation. Here `ω₁₂ = ω₃` and `ω₂₁ = −ω₃`.
pub fn gauss_codazzi_residuals(
    sys: &PssSystem,
    imm: &ImmersionData,
) -> Result<[JetExpr; 3], VerifyError> {
    let algebraic =
        imm.a.clone() * imm.c.clone() - imm.b.clone().pow(2.0) + JetExpr::ONE;
    let omega12 = &sys.omega3;
    let omega21 = sys.omega3.negate();
    let codazzi1 =
        (imm.omega13.exterior_derivative()? - omega12.wedge(&imm.omega23)).reduce(&sys.rule)?;
    let codazzi2 =
        (imm.omega23.exterior_derivative()? - omega21.wedge(&imm.omega13)).reduce(&sys.rule)?;
    Ok([algebraic, codazzi1, codazzi2])
}

/// Mean curvature of the immersion, `H = (a + c)/2`.
pub fn mean_curvature(imm: &ImmersionData) -> JetExpr {
    (imm.a.clone() + imm.c.clone()) / JetExpr::num(2.0)
}

/// A linear problem `V_x = X V`, `V_t = T V` assembled from the 1-form
/// coefficients.
#[derive(Debug, Clone)]
pub struct LaxPair {
    pub size: usize,
    pub x: Vec<Vec<JetExpr>>,
    pub t: Vec<Vec<JetExpr>>,
}

/// Assembles the 2×2 or 3×3 pair from the dx-coefficients `f_i1` and
/// dt-coefficients `f_i2` of the three forms:
///
/// 2×2: `X = ½ [[f₂₁, f₁₁ − f₃₁], [f₁₁ + f₃₁, −f₂₁]]` (same shape for T with
/// the dt-coefficients).
///
/// 3×3: `X = [[0, f₁₁, f₂₁], [f₁₁, 0, f₃₁], [f₂₁, −f₃₁, 0]]`: entries (1,2)
/// and (1,3) symmetric, (2,3) antisymmetric.
pub fn lax_pair(sys: &PssSystem, size: usize) -> LaxPair {
    assert!(size == 2 || size == 3, "linear problems come in sizes 2 and 3");
    let assemble = |f1: &JetExpr, f2: &JetExpr, f3: &JetExpr| -> Vec<Vec<JetExpr>> {
        let half = |e: JetExpr| e / JetExpr::num(2.0);
        if size == 2 {
            vec![
                vec![half(f2.clone()), half(f1.clone() - f3.clone())],
                vec![half(f1.clone() + f3.clone()), half(-f2.clone())],
            ]
        } else {
            vec![
                vec![JetExpr::ZERO, f1.clone(), f2.clone()],
                vec![f1.clone(), JetExpr::ZERO, f3.clone()],
                vec![f2.clone(), -f3.clone(), JetExpr::ZERO],
            ]
        }
    };
    LaxPair {
        size,
        x: assemble(&sys.omega1.dx, &sys.omega2.dx, &sys.omega3.dx),
        t: assemble(&sys.omega1.dt, &sys.omega2.dt, &sys.omega3.dt),
    }
}

/// Entrywise residual of the compatibility condition
/// `D_t X − D_x T + X T − T X = 0`, reduced modulo the rule.
pub fn zero_curvature_residual(
    pair: &LaxPair,
    rule: &EquationRule,
) -> Result<Vec<Vec<JetExpr>>, VerifyError> {
    let n = pair.size;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let mut commutator = JetExpr::ZERO;
            for k in 0..n {
                commutator = commutator + pair.x[i][k].clone() * pair.t[k][j].clone()
                    - pair.t[i][k].clone() * pair.x[k][j].clone();
            }
            let entry = pair.x[i][j].d_t()? - pair.t[i][j].d_x()? + commutator;
            row.push(entry.reduce(rule)?);
        }
        out.push(row);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Aggregated report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualEntry {
    pub name: String,
    pub pass: bool,
    /// max over samples of |residual| / (1 + local magnitude)
    pub max_relative: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessDoc {
    pub point: BTreeMap<String, f64>,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub system: String,
    pub seed: u64,
    pub samples: usize,
    pub substituted: bool,
    pub residuals: Vec<ResidualEntry>,
    pub all_pass: bool,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

fn entry(
    name: impl Into<String>,
    expr: &JetExpr,
    sampler: &Sampler,
) -> Result<ResidualEntry, VerifyError> {
    let probe = probe_zero(expr, sampler)?;
    let (pass, witness) = match probe.verdict {
        Verdict::Zero => (true, None),
        Verdict::Nonzero { witness, value } => (
            false,
            Some(WitnessDoc {
                point: witness.named_values(),
                value,
            }),
        ),
    };
    Ok(ResidualEntry {
        name: name.into(),
        pass,
        max_relative: probe.max_relative,
        witness,
    })
}

/// Runs the full battery: structure residuals, Gauss–Codazzi (when immersion
/// data is given), and the zero-curvature residuals of both linear-problem
/// sizes. Deterministic for a fixed sampler seed.
pub fn verify_pss(
    sys: &PssSystem,
    imm: Option<&ImmersionData>,
    sampler: &Sampler,
    substitute: bool,
) -> Result<VerificationReport, VerifyError> {
    if sampler.samples == 0 {
        return Err(VerifyError::Sample(SampleError::Empty));
    }
    let sampler = sampler
        .clone()
        .with_constraints(sys.admissibility.clone());
    let mut sampler = sampler;
    for (name, value) in &sys.parameters {
        if let Some(v) = value {
            sampler = sampler.pin(name, *v);
        }
    }

    let mut residuals = Vec::new();
    let structure = structure_residuals(sys, substitute)?;
    for (i, r) in structure.iter().enumerate() {
        residuals.push(entry(format!("structure_{}", i + 1), r, &sampler)?);
    }
    if let Some(imm) = imm {
        let gc = gauss_codazzi_residuals(sys, imm)?;
        residuals.push(entry("immersion_algebraic", &gc[0], &sampler)?);
        residuals.push(entry("codazzi_1", &gc[1], &sampler)?);
        residuals.push(entry("codazzi_2", &gc[2], &sampler)?);
    }
    for size in [2usize, 3] {
        let pair = lax_pair(sys, size);
        let residual = zero_curvature_residual(&pair, &sys.rule)?;
        // aggregate the matrix entrywise: worst relative residual wins
        let mut worst = ResidualEntry {
            name: format!("zero_curvature_{size}x{size}"),
            pass: true,
            max_relative: 0.0,
            witness: None,
        };
        for row in &residual {
            for e in row {
                let sub = entry("", e, &sampler)?;
                if sub.max_relative > worst.max_relative {
                    worst.max_relative = sub.max_relative;
                    worst.witness = sub.witness.clone();
                }
                worst.pass &= sub.pass;
            }
        }
        residuals.push(worst);
    }
    let all_pass = residuals.iter().all(|r| r.pass);
    Ok(VerificationReport {
        system: sys.name.clone(),
        seed: sampler.seed,
        samples: sampler.samples,
        substituted: substitute,
        residuals,
        all_pass,
    })
}
