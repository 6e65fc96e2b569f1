//! Classification and numerical study of periodic semilinear Schrödinger
//! equations `∂ₜu + (i−ε)∂ₓ²u = F(u, ∂ₓu, ū, ∂ₓū)` with polynomial `F`.

pub mod classifier;
pub mod cli;
pub mod energy;
pub mod experiments;
pub mod gauge;
pub mod nonlin_poly;
pub mod solver;
pub mod spectral;
