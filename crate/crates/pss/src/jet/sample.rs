//! Deterministic rejection sampling of admissible jet points, and the
//! probabilistic identity-zero test built on it.
//!
//! All expressions handled by this crate are real-analytic on the admissible
//! box, so vanishing on a random sample of an open set decides identities in
//! practice. Each sample index draws from its own stream, seeded by
//! `mix(master_seed, index)`, so results do not depend on evaluation order.

use super::expr::JetExpr;
use super::point::JetPoint;
use super::variable::{JetVariable, Wrt};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Default master seed for all sampling.
pub const DEFAULT_SEED: u64 = 0x5EED;
/// Default number of sample points.
pub const DEFAULT_SAMPLES: usize = 64;
/// Default relative tolerance for the zero test.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Rejection-sampling retry budget per point.
pub const DEFAULT_MAX_RETRIES: usize = 10_000;

/// Floor used when enforcing `expr != 0` constraints by rejection.
const NONZERO_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SampleError {
    #[error("sampler is configured with zero sample points")]
    Empty,
    #[error("could not find an admissible point after {retries} retries (sample {sample})")]
    Exhausted { sample: usize, retries: usize },
}

/// Inequality constraint carried by a system and enforced during sampling.
#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    /// `expr > 0` on the admissible set.
    Positive(JetExpr),
    /// `expr != 0` on the admissible set (enforced as `|expr| >= 1e-3`).
    Nonzero(JetExpr),
}

impl Constraint {
    pub fn expr(&self) -> &JetExpr {
        match self {
            Constraint::Positive(e) | Constraint::Nonzero(e) => e,
        }
    }

    fn admits(&self, p: &JetPoint) -> bool {
        match self {
            Constraint::Positive(e) => matches!(e.evaluate(p), Ok(v) if v > 0.0),
            Constraint::Nonzero(e) => matches!(e.evaluate(p), Ok(v) if v.abs() >= NONZERO_FLOOR),
        }
    }
}

/// Sampler over the admissible box.
#[derive(Debug, Clone)]
pub struct Sampler {
    pub seed: u64,
    pub samples: usize,
    pub tolerance: f64,
    pub max_retries: usize,
    /// Parameters pinned to fixed values (never sampled).
    pub pinned: BTreeMap<String, f64>,
    /// Range overrides, keyed by canonical coordinate or parameter name.
    pub ranges: BTreeMap<String, (f64, f64)>,
    /// Extra admissibility constraints, enforced by rejection.
    pub constraints: Vec<Constraint>,
}

impl Default for Sampler {
    fn default() -> Self {
        Sampler {
            seed: DEFAULT_SEED,
            samples: DEFAULT_SAMPLES,
            tolerance: DEFAULT_TOLERANCE,
            max_retries: DEFAULT_MAX_RETRIES,
            pinned: BTreeMap::new(),
            ranges: BTreeMap::new(),
            constraints: Vec::new(),
        }
    }
}

impl Sampler {
    pub fn new(seed: u64, samples: usize) -> Self {
        Sampler {
            seed,
            samples,
            ..Sampler::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn pin(mut self, name: &str, value: f64) -> Self {
        self.pinned.insert(name.to_string(), value);
        self
    }

    pub fn with_range(mut self, name: &str, lo: f64, hi: f64) -> Self {
        self.ranges.insert(name.to_string(), (lo, hi));
        self
    }

    pub fn with_constraint(mut self, c: Constraint) -> Self {
        self.constraints.push(c);
        self
    }

    pub fn with_constraints(mut self, cs: impl IntoIterator<Item = Constraint>) -> Self {
        self.constraints.extend(cs);
        self
    }

    fn default_range(&self, wrt: &Wrt) -> (f64, f64) {
        if let Some(r) = self.ranges.get(&wrt.to_string()) {
            return *r;
        }
        match wrt {
            Wrt::Var(JetVariable::X) | Wrt::Var(JetVariable::T) => (-1.0, 1.0),
            Wrt::Var(JetVariable::Z { xs: 0, ts: 0 }) => (0.5, 2.0),
            Wrt::Var(_) => (-2.0, 2.0),
            Wrt::Param(p) => match p.as_str() {
                "m2" | "beta" => (0.0, 1.0),
                _ => (0.5, 2.0), // lambda, m1, alpha, eta and any other parameter
            },
        }
    }

    /// Variables the sampler must assign to evaluate `targets` and the
    /// constraints.
    fn needed(&self, targets: &[&JetExpr]) -> BTreeSet<Wrt> {
        let mut needed: BTreeSet<Wrt> = BTreeSet::new();
        for e in targets {
            needed.extend(e.dependencies());
        }
        for c in &self.constraints {
            needed.extend(c.expr().dependencies());
        }
        needed
    }

    /// Draws the k-th admissible point for the given target expressions.
    pub fn point(&self, targets: &[&JetExpr], k: usize) -> Result<JetPoint, SampleError> {
        let needed = self.needed(targets);
        let mut rng = ChaCha8Rng::seed_from_u64(mix(self.seed, k as u64));
        'retry: for _ in 0..self.max_retries {
            let mut p = JetPoint::new();
            for (name, value) in &self.pinned {
                p.set_param(name, *value);
            }
            for wrt in &needed {
                match wrt {
                    Wrt::Param(name) if self.pinned.contains_key(name) => {}
                    _ => {
                        let (lo, hi) = self.default_range(wrt);
                        let v = rng.gen_range(lo..=hi);
                        match wrt {
                            Wrt::Var(var) => {
                                // keep z_x bounded away from zero by default
                                if *var == JetVariable::ZX && v.abs() < 0.1 {
                                    continue 'retry;
                                }
                                p.set_var(*var, v);
                            }
                            Wrt::Param(name) => p.set_param(name, v),
                        }
                    }
                }
            }
            if self.constraints.iter().all(|c| c.admits(&p)) {
                return Ok(p);
            }
        }
        Err(SampleError::Exhausted {
            sample: k,
            retries: self.max_retries,
        })
    }

    /// All sample points, in index order.
    pub fn points(&self, targets: &[&JetExpr]) -> Result<Vec<JetPoint>, SampleError> {
        if self.samples == 0 {
            return Err(SampleError::Empty);
        }
        (0..self.samples).map(|k| self.point(targets, k)).collect()
    }
}

/// Sample-index seed derivation (splitmix64 over master ^ golden·k).
fn mix(master: u64, k: u64) -> u64 {
    let mut x = master ^ k.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Outcome of the probabilistic zero test.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Zero,
    Nonzero { witness: JetPoint, value: f64 },
}

impl Verdict {
    pub fn is_zero(&self) -> bool {
        matches!(self, Verdict::Zero)
    }
}

/// Full statistics of a zero probe: the verdict plus the worst relative
/// residual seen, for reporting.
#[derive(Debug, Clone)]
pub struct ZeroProbe {
    pub verdict: Verdict,
    /// max over samples of |value| / (1 + scale)
    pub max_relative: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Evaluates `e` at admissible sample points; declares it identically zero
/// iff every |e(p)| ≤ tol · (1 + local expression magnitude).
///
/// Points where evaluation hits a domain violation count as rejections, so
/// the probe itself never fails on partial functions like `1/z_x` as long as
/// the constraints carve out their domain.
pub fn probe_zero(e: &JetExpr, sampler: &Sampler) -> Result<ZeroProbe, SampleError> {
    if sampler.samples == 0 {
        return Err(SampleError::Empty);
    }
    let mut max_relative: f64 = 0.0;
    let mut worst: Option<(JetPoint, f64)> = None;
    for k in 0..sampler.samples {
        // retry within the sample stream until the expression evaluates
        let mut evaluated = None;
        let mut sub = sampler.clone();
        for attempt in 0..16 {
            sub.seed = if attempt == 0 {
                sampler.seed
            } else {
                mix(sampler.seed, 0xD0E5 + attempt as u64)
            };
            let p = sub.point(&[e], k)?;
            if let Ok((value, scale)) = e.evaluate_scaled(&p) {
                evaluated = Some((p, value, scale));
                break;
            }
        }
        let Some((p, value, scale)) = evaluated else {
            return Err(SampleError::Exhausted {
                sample: k,
                retries: sampler.max_retries,
            });
        };
        let rel = value.abs() / (1.0 + scale);
        if rel > max_relative {
            max_relative = rel;
            worst = Some((p, value));
        }
    }
    let verdict = if max_relative <= sampler.tolerance {
        Verdict::Zero
    } else {
        let (witness, value) = worst.expect("nonzero residual must have a witness");
        Verdict::Nonzero { witness, value }
    };
    Ok(ZeroProbe {
        verdict,
        max_relative,
        samples: sampler.samples,
        seed: sampler.seed,
    })
}

/// Convenience wrapper returning just the verdict.
pub fn is_identically_zero(e: &JetExpr, sampler: &Sampler) -> Result<Verdict, SampleError> {
    probe_zero(e, sampler).map(|p| p.verdict)
}
