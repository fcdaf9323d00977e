//! randfront: a numerical laboratory for random transition fronts of the
//! nonlocal Fisher-KPP equation
//!
//! ```text
//! u_t(t,x) = int_R J(t, y) [u(t, x-y) - u(t, x)] dy + a(t) u (1 - u)
//! ```
//!
//! with bounded time-heterogeneous (deterministic, quasiperiodic or random)
//! coefficient `a` and dispersal kernel `J`. The crate builds the classical
//! constructive objects of the theory at desk scale: coefficient paths and
//! their least/upper means, exponential moments of kernels, the wave-speed
//! functional and its critical exponent, explicit sub/super solution
//! profiles, fronts constructed by a limiting Cauchy procedure, and the
//! ratio-contraction stability experiment — together with independent
//! oracles (comparison principle, residual operator, Lipschitz bounds) that
//! double-check every run.
//!
//! See the `book/` guide for a narrative walkthrough; its code snippets are
//! compiled as doc-tests through [`guide`].

pub mod driver;
pub mod error;
pub mod kernel;
pub mod quad;
pub mod solver;
pub mod speed;
pub mod stability;
pub mod verify;
pub mod wave;

pub mod config;
pub mod output;

pub mod guide;

pub use error::{Error, Result};
