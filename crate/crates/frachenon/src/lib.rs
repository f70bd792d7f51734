//! Numerical toolkit for the fractional Hardy-Henon equation
//! `(-Delta)^s u = |x|^l |u|^{p-1} u` on `R^N`:
//!
//! * gamma-based constants (the spectral constant `lambda(alpha)`, `C_{N,s}`,
//!   `kappa_s`, the Poisson normalizer) — [`special`];
//! * critical exponents, the Joseph-Lundgren-type threshold and regime
//!   classification — [`regimes`];
//! * singularity-aware quadrature — [`quadrature`];
//! * the Poisson extension to the upper half-space, the homogeneous model
//!   family and the principal-value fractional Laplacian — [`extension`];
//! * blow-down energy functionals, Pohozaev identities and stability
//!   comparisons — [`energetics`].
//!
//! The `examples/` directory holds one runnable example per capability; the
//! `frachenon` binary exposes the same operations as subcommands.

pub mod cli;
pub mod energetics;
pub mod error;
pub mod extension;
pub mod interp;
pub mod ode;
pub mod quadrature;
pub mod regimes;
pub mod special;

pub use error::{Error, Result};
pub use extension::{ExtensionField, HalfSpacePoint, RadialProfile};
pub use regimes::{ProblemParams, Regime, RegimeReport};
pub use special::FracParams;
