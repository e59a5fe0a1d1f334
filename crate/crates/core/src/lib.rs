//! Ginzburg–Landau-type energies with manifold-valued vacuum sets.
//!
//! * [`homotopy`]: conjugacy-class algebra and the norm on free homotopy classes.
//! * [`manifold`]: built-in vacuum manifolds, nearest-point projection, potentials.
//! * [`loops`]: discrete loops, their Dirichlet energy, geodesic relaxation.
//! * [`gl`]: grid fields, discrete energy, minimization, competitors, boundary data.
//! * [`analysis`]: monotonicity, Pohozaev and stress-energy residuals, energy
//!   measures, singular-set extraction, densities and quantization.

pub mod analysis;
pub mod gl;
pub mod homotopy;
pub mod loops;
pub mod manifold;
