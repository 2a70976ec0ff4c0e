//! Tests which equations of the shape
//! `z_xt = a1(z) z_xx + a2(z) z_x z_t + a3(z) z_x^2 + a4(z)`
//! reduce to the normal form by the substitution `z -> a1(z)`.
//!
//! ```bash
//! cargo run -p pss --example reducibility
//! ```

use pss::generate::{check_reducibility, Reducibility, ReducibilityInput};
use pss::jet::{parse, JetExpr};

fn show(label: &str, input: &ReducibilityInput) {
    print!("{label}: ");
    match check_reducibility(input).unwrap() {
        Reducibility::Reducible { m1, m2, psi } => {
            println!("reducible with m1 = {m1}, m2 = {m2}, substitution {psi}");
        }
        Reducibility::NecessaryConditionFails { value, witness } => {
            println!(
                "necessary condition fails (residual {value:.3e} at z = {:.4})",
                witness.var(pss::jet::JetVariable::Z0).unwrap()
            );
        }
        Reducibility::SystemFails { equation, value, .. } => {
            println!("necessary condition holds but {equation:?} fails (residual {value:.3e})");
        }
    }
}

fn main() {
    // the short pulse equation written out: z_xt = (z^2/2) z_xx + z z_x^2 + z
    show(
        "short pulse",
        &ReducibilityInput {
            a1: parse("z^2/2").unwrap(),
            a2: JetExpr::ZERO,
            a3: parse("z").unwrap(),
            a4: parse("z").unwrap(),
            m1: 1.0,
            m2: 0.0,
        },
    );

    // the normal form's own coefficients at m1 = 1, m2 = 0
    show(
        "normal form",
        &ReducibilityInput {
            a1: parse("z").unwrap(),
            a2: parse("1/(2*z)").unwrap(),
            a3: parse("1/2").unwrap(),
            a4: parse("2*z").unwrap(),
            m1: 1.0,
            m2: 0.0,
        },
    );

    // shifting a4 breaks the necessary condition
    show(
        "perturbed a4",
        &ReducibilityInput {
            a1: parse("z").unwrap(),
            a2: parse("1/(2*z)").unwrap(),
            a3: parse("1/2").unwrap(),
            a4: parse("2*z + 1").unwrap(),
            m1: 1.0,
            m2: 0.0,
        },
    );
}
