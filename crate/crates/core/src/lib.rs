//! Spectral toolkit for weakly interacting diffusions on the torus.
//!
//! The crate simulates the N-particle system
//! `dX^i = (1/N) Σ_j K(X^i, X^j) dt + sqrt(2σ) dW^i` on `(T^d)`, solves the
//! mean-field density and its O(1/N) pair correction with a spectral
//! exponential integrator, and estimates correlation functions `g_[m]`
//! ("size of chaos") from particle snapshots via U-statistics together with
//! the set-partition calculus connecting marginals, correlations, moments
//! and cumulants.

pub mod audit;
pub mod clt;
pub mod estimator;
pub mod fourier;
pub mod mckean;
pub mod partitions;
pub mod sim;

pub use fourier::{FreqVec, KernelSpec, SpectralField};
pub use partitions::SetPartition;
