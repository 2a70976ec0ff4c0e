//! Runs both generators: the four-function construction on a custom
//! coefficient quartet, and the one-function specialization, then
//! cross-checks that the specialization agrees with the general machinery.
//!
//! ```bash
//! cargo run -p pss --example generate_systems
//! ```

use pss::generate::{cor1, cor1_quartet, prop1, Prop1Input};
use pss::jet::{is_identically_zero, parse, JetExpr};
use pss::system::SystemDoc;

fn main() {
    // a polynomial quartet that satisfies the generator's hypotheses
    let input = Prop1Input::new(
        parse("z^2").unwrap(),
        JetExpr::ONE,
        parse("z").unwrap(),
        parse("0.5").unwrap(),
    );
    let sys = prop1(&input).expect("hypotheses hold");
    println!("four-function generator on (z^2, 1, z, 1/2):");
    println!("  z_xt = {}", sys.rule.rhs);
    println!("  omega1 = ({}) dx + ({}) dt", sys.omega1.dx, sys.omega1.dt);
    println!();

    // the one-function family with psi = z^2/2 (the short-pulse shape)
    let psi = parse("z^2/2").unwrap();
    let (family, imm) = cor1(&psi, 1.0, 0.0, 1.0).expect("psi admissible");
    println!("one-function generator on psi = z^2/2, m1 = 1, m2 = 0:");
    println!("  z_xt = {}", family.rule.rhs);
    println!("  a = {}", imm.a);
    println!();

    // the specialization quartet reproduces the closed form, valuewise
    let via_quartet = prop1(&cor1_quartet(&psi, 1.0, 0.0, 1.0)).unwrap();
    let difference = family.rule.rhs.clone() - via_quartet.rule.rhs.clone();
    let sampler = family.sampler().with_tolerance(1e-10);
    let verdict = is_identically_zero(&difference, &sampler).unwrap();
    println!("closed form == general construction: {}", verdict.is_zero());

    // the JSON document form used by the CLI
    println!();
    println!("{}", SystemDoc::from_system(&family, Some(&imm)).to_json());
}
