//! Finite-horizon experiments on ideals of subsets of the positive integers:
//! densities, ideal membership, ideal cluster points, random subsequences
//! and Monte Carlo checks of almost-everywhere invariance.

pub mod densities;
pub mod experiments;
pub mod ideals;
pub mod numeric;
pub mod rng;
pub mod sampler;
pub mod sequences;
pub mod subsets;
