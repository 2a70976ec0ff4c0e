//! Expression language over jet coordinates.
//!
//! Everything downstream (equation generation, residual verification,
//! immersion) moves through this module: parsing of the text form,
//! evaluation at jet points, symbolic partial and total derivatives,
//! reduction modulo an equation in solved form, and the sampled zero test
//! used to decide identities.
//!
//! Expressions are immutable values with shared subtrees; they are safe to
//! clone, share and send across threads.

mod calculus;
mod expr;
mod parse;
mod point;
mod sample;
mod variable;

pub use calculus::{
    iterated_derivative, partial, substitute_equation, total_derivative, CalculusError, Direction,
    EquationRule, RuleError,
};
pub use expr::{EvalError, Func, JetExpr};
pub use parse::{parse, ParseError, PARAMETER_NAMES};
pub use point::JetPoint;
pub use sample::{
    is_identically_zero, probe_zero, Constraint, SampleError, Sampler, Verdict, ZeroProbe,
    DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TOLERANCE,
};
pub use variable::{JetVariable, Wrt, MAX_ORDER};

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_point(rng: &mut ChaCha8Rng, e: &JetExpr) -> JetPoint {
        let mut p = JetPoint::new();
        for dep in e.dependencies() {
            match dep {
                Wrt::Var(JetVariable::Z { xs: 0, ts: 0 }) => {
                    p.set_var(JetVariable::Z0, rng.gen_range(0.5..2.0))
                }
                Wrt::Var(v) => p.set_var(v, rng.gen_range(0.3..1.7)),
                Wrt::Param(name) => {
                    let v = rng.gen_range(0.5..2.0);
                    p.set_param(&name, v);
                }
            }
        }
        p
    }

    /// Central finite difference of `e` in direction `wrt` at `p`.
    fn central_difference(e: &JetExpr, wrt: &Wrt, p: &JetPoint, h: f64) -> f64 {
        let mut plus = p.clone();
        let mut minus = p.clone();
        match wrt {
            Wrt::Var(v) => {
                let v0 = p.var(*v).unwrap();
                plus.set_var(*v, v0 + h);
                minus.set_var(*v, v0 - h);
            }
            Wrt::Param(name) => {
                let v0 = p.param(name).unwrap();
                plus.set_param(name, v0 + h);
                minus.set_param(name, v0 - h);
            }
        }
        (e.evaluate(&plus).unwrap() - e.evaluate(&minus).unwrap()) / (2.0 * h)
    }

    const SAMPLE_EXPRS: [&str; 6] = [
        "z*z_x^2 + z",
        "sqrt(2*m1*z + m2 + 1)",
        "sin(z)*cos(z_t) + exp(z_x/4)",
        "(z^2 - z_t)/(1 + z_x^2)",
        "arctan(z*z_x) + ln(1 + z^2)",
        "tan(z/4) + (2*m1*z + 1)^1.5",
    ];

    #[test]
    fn partial_matches_central_difference() {
        // oracle: symmetric difference with step 1e-5, relative error < 1e-6
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for src in SAMPLE_EXPRS {
            let e = parse(src).unwrap();
            for dep in e.dependencies() {
                let d = partial(&e, &dep);
                for _ in 0..20 {
                    let p = random_point(&mut rng, &e);
                    let exact = d.evaluate(&p).unwrap();
                    let fd = central_difference(&e, &dep, &p, 1e-5);
                    let denom = 1.0f64.max(exact.abs());
                    assert!(
                        (exact - fd).abs() / denom < 1e-6,
                        "{src} d/d{dep}: exact {exact} vs fd {fd}"
                    );
                }
            }
        }
    }

    #[test]
    fn total_derivative_is_a_derivation() {
        // D(e1·e2) = D(e1)·e2 + e1·D(e2), valuewise to 1e-10
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let e1 = parse("z*sin(z_x)").unwrap();
        let e2 = parse("z_t^2 + z").unwrap();
        for dir in [Direction::X, Direction::T] {
            let product = e1.clone() * e2.clone();
            let lhs = total_derivative(&product, dir).unwrap();
            let rhs = total_derivative(&e1, dir).unwrap() * e2.clone()
                + e1.clone() * total_derivative(&e2, dir).unwrap();
            let probe = lhs.clone() - rhs.clone();
            for _ in 0..20 {
                let p = random_point(&mut rng, &probe);
                assert!(probe.evaluate(&p).unwrap().abs() < 1e-10);
            }
        }
    }

    #[test]
    fn total_derivatives_commute_on_low_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for src in ["z*z_x*z_t", "sin(z_xx) + z_tt^2", "z^3/6"] {
            let e = parse(src).unwrap();
            let xt = total_derivative(&total_derivative(&e, Direction::X).unwrap(), Direction::T)
                .unwrap();
            let tx = total_derivative(&total_derivative(&e, Direction::T).unwrap(), Direction::X)
                .unwrap();
            let probe = xt - tx;
            for _ in 0..20 {
                let p = random_point(&mut rng, &probe);
                assert!(probe.evaluate(&p).unwrap().abs() < 1e-10, "{src}");
            }
        }
    }

    #[test]
    fn second_x_derivative_of_cubic_matches_expansion() {
        // D_x D_x (z³/6) = z z_x² + (z²/2) z_xx
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let cubic = parse("z^3/6").unwrap();
        let twice = total_derivative(
            &total_derivative(&cubic, Direction::X).unwrap(),
            Direction::X,
        )
        .unwrap();
        let expansion = parse("z*z_x^2 + (z^2/2)*z_xx").unwrap();
        let probe = twice - expansion;
        for _ in 0..20 {
            let p = random_point(&mut rng, &probe);
            assert!(probe.evaluate(&p).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn substitution_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let rule = EquationRule::new(parse("sin(z) + z*z_xx").unwrap()).unwrap();
        for src in ["z_xt^2 + z_xxt", "z_xt * z_x - z_xtt", "z + z_xx"] {
            let e = parse(src).unwrap();
            let once = substitute_equation(&e, &rule).unwrap();
            let twice = substitute_equation(&once, &rule).unwrap();
            let probe = once.clone() - twice;
            for _ in 0..20 {
                let p = random_point(&mut rng, &probe);
                assert!(probe.evaluate(&p).unwrap().abs() < 1e-10, "{src}");
            }
            assert!(once.variables().iter().all(|v| !v.is_mixed()));
        }
    }
}
