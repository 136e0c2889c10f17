//! Exact solver for single-station bike repositioning.
//!
//! A station with integer capacity holds a stock of bikes that a demand
//! sequence pushes up and down; stock clamps to `[0, capacity]` and every
//! clamped bike counts as one unit of lost demand. A fixed schedule of
//! capacitated vehicle visits may add or remove bikes. The solver picks the
//! transfer for each visit that minimizes total lost demand, in time linear
//! in the horizon.
//!
//! ```
//! use osbrp_core::global_solver::solve;
//! use osbrp_core::model::{Instance, Visit};
//!
//! let instance = Instance::new(
//!     5,                  // station capacity
//!     0,                  // initial stock
//!     vec![7, 0, -6, 0],  // net demand per epoch, positive adds bikes
//!     vec![Visit::new(1, 0, 10), Visit::new(3, 0, 10)],
//! )?;
//! let solution = solve(&instance);
//! assert_eq!(solution.interventions, vec![-2, 0]);
//! assert_eq!(solution.total_loss, 1);
//! # Ok::<(), osbrp_core::model::InstanceError>(())
//! ```
//!
//! Module map:
//! - [`model`]: validated instances, stock dynamics, trajectory simulation.
//! - [`one_intervention`]: linear scan for the optimal transfer of a single
//!   visit, plus the full set of optimal transfers.
//! - [`global_solver`]: backward pass combining the per-visit scans into an
//!   optimal plan for the whole schedule.
//! - [`oracle`]: brute-force and sweep searches used to cross-check the
//!   solver on small instances.
//! - [`instance_io`]: JSON instance documents, CSV trajectory dumps, seeded
//!   random instance generation.
//! - [`milp_export`]: LP-format export of the equivalent integer program.

pub mod model;
pub mod one_intervention;
pub mod global_solver;
pub mod oracle;
pub mod instance_io;
pub mod milp_export;
