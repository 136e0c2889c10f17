//! Exhaustive reference optimizer.
//!
//! Deliberately exponential: enumerates every integer intervention vector in
//! a box and simulates each one. The fast solvers are validated against this
//! module on small instances, and the frozen expected values in the test
//! suite were produced by it.

use std::collections::BTreeMap;
use std::error::Error;
use std::fmt;

use crate::model::{self, Instance};

/// Most optimal vectors retained per search; beyond this only the flag is set.
pub const BEST_VECTOR_CAP: usize = 64;

/// Outcome of an exhaustive search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    /// Exact minimum full-horizon loss over the searched box.
    pub best_loss: i64,
    /// Vectors attaining `best_loss`, in lexicographic order, capped at
    /// [`BEST_VECTOR_CAP`] entries.
    pub best_vectors: Vec<Vec<i64>>,
    /// True when more optima exist than `best_vectors` retains.
    pub best_vectors_truncated: bool,
    /// Number of vectors enumerated.
    pub search_space_size: u128,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    /// The box holds more vectors than the caller allowed.
    SearchSpaceTooLarge { size: u128, limit: u128 },
    /// A bounds override does not match the schedule.
    BadOverride { reason: String },
    /// `sweep_1d` requires exactly one visit.
    NotSingleVisit { visits: usize },
    /// An empty sweep bracket.
    EmptyBracket { lower: i64, upper: i64 },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::SearchSpaceTooLarge { size, limit } => write!(
                f,
                "search space holds {size} vectors, above the limit {limit}"
            ),
            OracleError::BadOverride { reason } => write!(f, "bad bounds override: {reason}"),
            OracleError::NotSingleVisit { visits } => write!(
                f,
                "sweep requires exactly one scheduled visit, instance has {visits}"
            ),
            OracleError::EmptyBracket { lower, upper } => {
                write!(f, "sweep bracket [{lower}, {upper}] is empty")
            }
        }
    }
}

impl Error for OracleError {}

/// Enumerates every integer vector in the feasible box `[q_i - Q_i, q_i]`
/// (or in `bounds_override` when given, which may step outside feasibility)
/// and returns the exact minimum of the simulated full-horizon loss.
///
/// Refuses to run when the box holds more than `limit` vectors.
pub fn brute_force(
    instance: &Instance,
    bounds_override: Option<&[(i64, i64)]>,
    limit: u128,
) -> Result<OracleResult, OracleError> {
    let boxes = search_box(instance, bounds_override)?;
    let size: u128 = boxes
        .iter()
        .map(|&(lo, hi)| (hi - lo + 1) as u128)
        .product();
    if size > limit {
        return Err(OracleError::SearchSpaceTooLarge { size, limit });
    }

    let mut current: Vec<i64> = boxes.iter().map(|&(lo, _)| lo).collect();
    let mut best_loss = i64::MAX;
    let mut best_vectors: Vec<Vec<i64>> = Vec::new();
    let mut truncated = false;
    loop {
        let loss = model::loss_of(instance, &current);
        if loss < best_loss {
            best_loss = loss;
            best_vectors.clear();
            best_vectors.push(current.clone());
            truncated = false;
        } else if loss == best_loss {
            if best_vectors.len() < BEST_VECTOR_CAP {
                best_vectors.push(current.clone());
            } else {
                truncated = true;
            }
        }
        if !advance(&mut current, &boxes) {
            break;
        }
    }

    Ok(OracleResult {
        best_loss,
        best_vectors,
        best_vectors_truncated: truncated,
        search_space_size: size,
    })
}

fn search_box(
    instance: &Instance,
    bounds_override: Option<&[(i64, i64)]>,
) -> Result<Vec<(i64, i64)>, OracleError> {
    match bounds_override {
        None => Ok(instance
            .visits()
            .iter()
            .map(|v| v.intervention_bounds())
            .collect()),
        Some(bounds) => {
            if bounds.len() != instance.visit_count() {
                return Err(OracleError::BadOverride {
                    reason: format!(
                        "{} intervals for {} visits",
                        bounds.len(),
                        instance.visit_count()
                    ),
                });
            }
            if let Some(&(lo, hi)) = bounds.iter().find(|&&(lo, hi)| lo > hi) {
                return Err(OracleError::BadOverride {
                    reason: format!("empty interval [{lo}, {hi}]"),
                });
            }
            Ok(bounds.to_vec())
        }
    }
}

/// Lexicographic odometer step; false once the box is exhausted.
fn advance(current: &mut [i64], boxes: &[(i64, i64)]) -> bool {
    for i in (0..current.len()).rev() {
        if current[i] < boxes[i].1 {
            current[i] += 1;
            return true;
        }
        current[i] = boxes[i].0;
    }
    false
}

/// Loss profile of a single-visit instance: maps each transfer `x` in the
/// bracket to the simulated loss on the epochs from the visit to the end of
/// the horizon (losses before the visit are constant in `x` and excluded).
pub fn sweep_1d(
    instance: &Instance,
    bracket: (i64, i64),
) -> Result<BTreeMap<i64, i64>, OracleError> {
    if instance.visit_count() != 1 {
        return Err(OracleError::NotSingleVisit {
            visits: instance.visit_count(),
        });
    }
    let (lower, upper) = bracket;
    if lower > upper {
        return Err(OracleError::EmptyBracket { lower, upper });
    }
    let visit_epoch = instance.visits()[0].epoch;
    let horizon = instance.horizon();
    let mut profile = BTreeMap::new();
    for x in lower..=upper {
        profile.insert(x, model::loss_of_in(instance, &[x], visit_epoch, horizon));
    }
    Ok(profile)
}

/// Symmetric intervention bracket wide enough to contain every useful
/// transfer: no optimum ever moves more bikes than the station capacity plus
/// the total demand magnitude.
pub fn uncapacitated_bracket(instance: &Instance) -> (i64, i64) {
    let reach = instance.capacity() + instance.demand().iter().map(|d| d.abs()).sum::<i64>();
    (-reach, reach)
}
