//! Dependent-variable changes: the one-function system built from psi = e^z
//! collapses to the normal form under z -> e^z, and the affine substitution
//! gauges the four-parameter family down to the short-pulse family.
//!
//! ```bash
//! cargo run -p pss --example change_of_variable
//! ```

use pss::generate::{builtin, change_of_variable, cor1, Builtin};
use pss::jet::{is_identically_zero, parse, JetExpr};

fn main() {
    // psi = e^z: an exotic-looking member of the family...
    let psi = JetExpr::z().exp();
    let (sys, _) = cor1(&psi, 1.0, 1.0, 1.0).unwrap();
    println!("psi = e^z system:");
    println!("  z_xt = {}", sys.rule.rhs);

    // ...that the substitution z -> e^z (inverse ln) maps onto the normal form
    let mapped = change_of_variable(&sys, &psi, &JetExpr::z().ln()).unwrap();
    let (normal, _) = cor1(&JetExpr::z(), 1.0, 1.0, 1.0).unwrap();
    let sampler = normal.sampler().with_tolerance(1e-9);
    let same = is_identically_zero(
        &(mapped.rule.rhs.clone() - normal.rule.rhs.clone()),
        &sampler,
    )
    .unwrap()
    .is_zero();
    println!("  after z -> e^z it equals the normal form: {same}");
    println!("  normal form: z_xt = {}", normal.rule.rhs);
    println!();

    // the affine change z -> m1*alpha*z + beta absorbs alpha and beta
    let (sys4, _) = builtin(Builtin::Example4Param {
        alpha: 2.0,
        beta: 1.0,
        m1: 1.0,
        m2: 0.0,
        lambda: 1.0,
    })
    .unwrap();
    println!("four-parameter equation (alpha = 2, beta = 1):");
    println!("  z_xt = {}", sys4.rule.rhs);
    let gauged = change_of_variable(
        &sys4,
        &parse("2*z + 1").unwrap(),
        &parse("(z - 1)/2").unwrap(),
    )
    .unwrap();
    let (family, _) = builtin(Builtin::FamilySp { m1: 1.0, m2: 0.0, lambda: 1.0 }).unwrap();
    let sampler = gauged.sampler().with_tolerance(1e-9);
    let same = is_identically_zero(
        &(gauged.rule.rhs.clone() - family.rule.rhs.clone()),
        &sampler,
    )
    .unwrap()
    .is_zero();
    println!("  after z -> 2z + 1 it equals the short-pulse family: {same}");
    println!("  family: z_xt = {}", family.rule.rhs);
}
