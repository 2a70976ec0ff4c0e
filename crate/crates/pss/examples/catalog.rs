//! Prints the built-in system catalog: equation, 1-forms and immersion data
//! of each system, in the expression language's text form.
//!
//! ```bash
//! cargo run -p pss --example catalog
//! ```

use pss::generate::{builtin, Builtin};

fn main() {
    let catalog = [
        Builtin::SineGordon { eta: 1.0, sign: 1.0 },
        Builtin::ShortPulse { lambda: 1.0 },
        Builtin::FamilySp { m1: 2.0, m2: 1.0, lambda: 1.0 },
        Builtin::Example4Param {
            alpha: 2.0,
            beta: 1.0,
            m1: 1.0,
            m2: 1.0,
            lambda: 1.0,
        },
    ];
    for which in catalog {
        let (sys, imm) = builtin(which).expect("catalog parameters are valid");
        println!("== {}", sys.name);
        println!("   z_xt = {}", sys.rule.rhs);
        for (i, form) in sys.forms().iter().enumerate() {
            println!("   omega{} = ({}) dx + ({}) dt", i + 1, form.dx, form.dt);
        }
        println!("   immersion: a = {}, b = {}, c = {}", imm.a, imm.b, imm.c);
        let params: Vec<String> = sys
            .parameters
            .iter()
            .map(|(k, v)| match v {
                Some(v) => format!("{k} = {v}"),
                None => format!("{k} (symbolic)"),
            })
            .collect();
        println!("   parameters: {}", params.join(", "));
        println!();
    }
}
