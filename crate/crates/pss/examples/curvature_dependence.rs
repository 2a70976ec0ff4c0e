//! The headline property of the short-pulse family: the immersion data, and
//! with it the mean curvature of the surface, depends on the first-order jet
//! of the solution, not just on the base point. Doubling z_x halves a and H.
//!
//! ```bash
//! cargo run -p pss --example curvature_dependence
//! ```

use pss::generate::{builtin, Builtin};
use pss::jet::{JetPoint, JetVariable};
use pss::verify::mean_curvature;

fn main() {
    let (_, imm) = builtin(Builtin::FamilySp { m1: 1.0, m2: 0.0, lambda: 1.0 }).unwrap();
    let h = mean_curvature(&imm);
    println!("immersion data: a = {}, b = {}, c = {}", imm.a, imm.b, imm.c);
    println!("mean curvature: H = {h}");
    println!();

    let base = JetPoint::new()
        .with_var(JetVariable::Z0, 1.3)
        .with_param("m1", 1.0)
        .with_param("m2", 0.0)
        .with_param("lambda", 1.0);
    println!("at z = 1.3, varying only the gradient:");
    println!("  z_x        a            H");
    for zx in [0.5, 1.0, 2.0, 4.0] {
        let p = base.clone().with_var(JetVariable::ZX, zx);
        println!(
            "  {:4}   {:10.6}   {:10.6}",
            zx,
            imm.a.evaluate(&p).unwrap(),
            h.evaluate(&p).unwrap()
        );
    }
    println!();

    let p1 = base.clone().with_var(JetVariable::ZX, 1.0);
    let p2 = base.with_var(JetVariable::ZX, 2.0);
    println!(
        "ratio a(z_x=1)/a(z_x=2) = {} (exactly 2: curvature sees the jet)",
        imm.a.evaluate(&p1).unwrap() / imm.a.evaluate(&p2).unwrap()
    );
}
