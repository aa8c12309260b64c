//! Mixed Nash equilibria for the adversarial-examples game over a finite
//! set of classifiers.
//!
//! The classifier picks a mixture `λ` over `L` fixed classifiers, the
//! adversary moves every data point inside its `ε`-ball (possibly at
//! random). Restricting the adversary to finite per-point candidate sets
//! turns the game into a finite zero-sum game whose primal value
//! `Σ_i w_i max_j ⟨λ, ℓ_ij⟩` and dual value `min_k E_q ℓ_k` can be computed
//! exactly, certified by a duality gap, and optimized with a projected
//! subgradient oracle method or an entropic (log-sum-exp) smoothing solved
//! by accelerated projected gradient.
//!
//! Module map:
//!
//! * [`model`]: datasets, classifiers, losses, mixtures, standard risk.
//! * [`attack`]: candidate attack sets, best responses, PGD for mixtures.
//! * [`game`]: loss tensors, primal/dual values, equilibrium certificates.
//! * [`solvers`]: simplex projection, oracle subgradient, entropic FISTA.
//! * [`bounds`]: statistical and approximation error bounds.
//! * [`trainer`]: alternating adversarial training of logistic mixtures.
//! * [`datagen`]: synthetic data, random classifiers and games, CSV I/O.
//! * [`experiments`]: the desk-scale experiment drivers used by the CLI.

pub mod attack;
pub mod bounds;
pub mod datagen;
pub mod error;
pub mod experiments;
pub mod game;
pub mod model;
pub mod rng;
pub mod solvers;
pub mod trainer;

pub use error::{Error, Result};
