//! Fixed-point amplitude amplification with an optimal number of oracle queries.
//!
//! The crate builds the phase schedules `(α_j, β_j)` of generalized Grover
//! sequences whose success probability follows the Dolph-Chebyshev law
//!
//! ```text
//! P_L(λ) = 1 - δ² T_L(T_{1/L}(1/δ) √(1-λ))²
//! ```
//!
//! so that `P_L >= 1 - δ²` for every overlap `λ` above the width `w`, and it
//! checks that law by exact simulation:
//!
//! - [`cheb`]: Chebyshev polynomials, the fractional order `T_{1/L}` and the
//!   generalized polynomials `a_L^(γ)`.
//! - [`schedule`]: analytic phase schedules, composite-pulse phases and nesting.
//! - [`model2d`]: two-level simulation, closed forms, Grover and π/3 references.
//! - [`qsim`]: dense statevector engine with direct and ancilla-based reflections.
//! - [`verify`]: invariant suites over the grids in [`config`].
//!
//! ```
//! use fpsearch::{fixed_point_phases, apply_sequence, success_prob_closed, Mode, SearchParams};
//!
//! let delta = 0.1f64.sqrt();
//! let sched = fixed_point_phases(2, delta, Mode::Amplify).unwrap();
//! let params = SearchParams::new(0.25, delta).unwrap();
//! let p = apply_sequence(&sched, &params).success_prob();
//! assert!((p - success_prob_closed(5, delta, 0.25)).abs() < 1e-12);
//! ```

pub mod cheb;
pub mod config;
pub mod error;
pub mod model2d;
pub mod qsim;
pub mod schedule;
pub mod verify;

pub use cheb::{cheb_t, cheb_t_frac, gamma_of, gen_cheb_a};
pub use error::{Error, Result};
pub use model2d::{apply_sequence, min_queries, success_prob_closed, width, SearchParams, TwoLevelState};
pub use qsim::{Engine, ProblemInstance, StateVector};
pub use schedule::{fixed_point_phases, nest, nest_chain, Mode, PhaseSchedule, ZetaSequence};
