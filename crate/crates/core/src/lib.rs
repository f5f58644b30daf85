//! Weyl deformation quantization over finite-dimensional pre-symplectic spaces.
//!
//! The crate realizes the twisted convolution algebras `(M(E), ⋆_ħ)` of finite
//! complex measures on a lattice-truncated test-function space, their Poisson
//! structure, Fourier transforms to phase-space functions, Schrödinger-type
//! representations on a periodic grid, and sweep harnesses checking the Dirac,
//! von Neumann and Rieffel conditions as `ħ → 0`.
//!
//! Layout:
//!
//! - [`space`]: the pre-symplectic form, semi-norms, Darboux decomposition and
//!   the `ħ`-scaling maps `T_ħ`.
//! - [`measure`]: discrete and gridded measures with involution, twisted
//!   product, moment norms and brackets.
//! - [`phase_space`]: Fourier evaluation, deformed products, differentials and
//!   sup-norm estimates.
//! - [`representation`]: grid Schrödinger representation, operator norms,
//!   states, gauge twists and well-matched families.
//! - [`verify`]: `ħ`-sweeps and slope fits.
//! - [`io`] and [`cli`]: JSON formats and the command-line front end.

pub mod cli;
pub mod error;
pub mod io;
pub mod measure;
pub mod phase_space;
pub mod representation;
pub mod sampling;
pub mod space;
pub mod verify;

pub use error::{Result, WeylError};
pub use measure::{DiscreteMeasure, GridDensity, Measure, MomentProfile};
pub use phase_space::{PhasePoint, PhaseSpaceFunction};
pub use space::{DarbouxDecomposition, HbarScaler, PreSymplecticSpace, ScalingKind, SeminormSpec};

pub use num_complex::Complex64 as C64;
