//! Sampling, spectra and exact formulas for three non-Hermitian tridiagonal
//! β-ensembles: the general ensemble `T`, the complex-symmetric ensemble `S`
//! and the normal form `T̃` (unit super-diagonal), together with their
//! low-temperature limits `D_n` and `G_n`.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`], [`quad`] – special functions and quadrature.
//! * [`randsrc`] – reproducible per-realization random streams.
//! * [`ensembles`] – the tridiagonal matrix type and samplers.
//! * [`charpoly`] – characteristic-polynomial coefficients, variances, Q-polynomials.
//! * [`eigensolve`] – Hessenberg QR and Aberth–Ehrlich solvers, eigenvectors, κ(R).
//! * [`spectralmap`] – the bijection between matrix entries and spectral data.
//! * [`density`] – limiting density, radial statistics, KS distances.
//! * [`pseudospectrum`] – s_min grids and the analytic pseudospectrum disc.
//! * [`lowtemp`] – coupled β → ∞ convergence and first-order perturbation.
//! * [`exact_n2`] – closed-form jpdfs and densities for 2×2 matrices.
//! * [`ginibre`] – dense Ginibre reference ensemble.
//! * [`cli`] – the batch front end behind the `tribeta` binary.

pub mod charpoly;
pub mod cli;
pub mod density;
pub mod eigensolve;
pub mod ensembles;
pub mod error;
pub mod exact_n2;
pub mod ginibre;
pub mod linalg;
pub mod lowtemp;
pub mod pseudospectrum;
pub mod quad;
pub mod randsrc;
pub mod specfun;
pub mod spectralmap;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
