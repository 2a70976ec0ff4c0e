//! Second-order PDEs whose generic solutions carry metrics of constant
//! Gaussian curvature −1, together with the machinery to do something with
//! them: generate such equations from coefficient data, verify the structure
//! equations, Gauss–Codazzi system and zero-curvature representations by
//! sampled residuals, solve the generalized short-pulse family numerically,
//! and rebuild the immersed surfaces in Euclidean 3-space as meshes.
//!
//! The crate is organized as a pipeline:
//!
//! - [`jet`]: expression language over jet coordinates (parse, evaluate,
//!   differentiate, reduce modulo an equation).
//! - [`system`]: 1-form triples, equations in solved form, immersion data.
//! - [`generate`]: the coefficient-driven generator, its one-function
//!   specialization, built-in systems, reducibility test, change of variable.
//! - [`verify`]: residual engines and machine-readable reports.
//! - [`solve`]: pseudo-spectral solver for the short-pulse family, the
//!   exact kink field, finite-difference jet access.
//! - [`immerse`]: moving-frame integration, discrete curvature, OBJ export.
//! - [`cli`]: the `pss` command-line front end.
//!
//! See the `examples/` directory for one runnable example per capability.

pub mod cli;
pub mod generate;
pub mod immerse;
pub mod jet;
pub mod solve;
pub mod system;
pub mod verify;

pub use generate::{builtin, Builtin};
pub use jet::{parse, JetExpr, JetPoint, JetVariable, Sampler};
pub use system::{ImmersionData, OneForm, PssSystem};
