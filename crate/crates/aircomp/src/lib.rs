//! Over-the-air computation (AirComp) with a reconfigurable intelligent
//! surface (RIS): channel simulation and joint optimization of the receive
//! beamformer and the RIS phase shifts.
//!
//! An access point with `M` antennas aggregates analog transmissions from
//! `K` single-antenna devices, assisted by an RIS with `N` passive
//! reflecting elements. After a zero-forcing transmit design, the
//! aggregation distortion reduces to
//!
//! ```text
//! MSE(m, v) = sigma^2 ||m||^2 / (P * min_k |m^H h_k(v)|^2)
//! ```
//!
//! with composite channels `h_k(v) = h_dk + G diag(h_rk) v` and unit-modulus
//! phase shifts `v`. Minimizing the MSE is a nonconvex min-max problem; this
//! crate solves it by alternating minimization over `v` and `m`, building a
//! linear majorant of each subproblem (successive convex approximation) and
//! solving the resulting piecewise-linear programs with a Mirror-Prox
//! saddle-point method whose updates are all closed form.
//!
//! Module map:
//! - [`channel`]: random network realizations (path loss, Rayleigh/Rician
//!   fading, array steering).
//! - [`model`]: composite channels, zero-forcing scalars, MSE, and the
//!   complex-to-real lifting of both alternation subproblems.
//! - [`saddle`]: the Mirror-Prox solver for `min_x max_k (p_k^T x + q_k)`
//!   over disk-product or ball domains, plus a projected-subgradient
//!   reference solver.
//! - [`altermin`]: the alternating SCA driver with descent safeguards and
//!   the final unit-modulus projection.
//! - [`config`]: scenario configuration files.

pub mod altermin;
pub mod channel;
pub mod config;
pub mod error;
pub mod model;
pub mod saddle;

pub use altermin::{altermin, AlterMinResult, AlterMinSettings, ConvergenceLog};
pub use channel::{generate_scenario, ChannelRealization, Geometry, SystemConfig};
pub use error::{Error, Result};
pub use model::{Beamformer, PhaseShiftVector};
pub use saddle::{solve_saddle, DomainKind, SaddlePoint, SurrogateData};
