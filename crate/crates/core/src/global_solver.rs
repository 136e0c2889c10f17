//! Exact optimization over the whole visit schedule.
//!
//! The horizon splits at the visit epochs: visit `i` is the only vehicle that
//! can affect the epochs from `e_i` to the epoch before the next visit.
//! Working backwards from the last visit, each stage plans its own interval
//! with a single scan. When a stage's unconstrained optimum does not fit the
//! vehicle's load window, the shortfall is not paid on the spot: it is
//! delegated to the previous stage as a fictitious loss planted one epoch
//! after that stage's interval, which the earlier vehicle may be able to
//! cover by moving bikes early. The first stage has nobody to delegate to
//! and pays its constrained loss. Losses before the first visit cannot be
//! influenced at all and are accounted separately.
//!
//! The whole pass costs one null-trajectory simulation plus one scan over
//! each interval: linear in the horizon.

use std::error::Error;
use std::fmt;

use crate::model::{self, BaseTrajectory, Instance};
use crate::one_intervention::{
    vehicle_intervention, AugmentationOverride, LoadWindow, LocalResult,
};

/// Diagnostic record of one backward stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StagePlan {
    /// 1-based visit index.
    pub stage: usize,
    /// First epoch the stage's vehicle controls (its visit epoch).
    pub interval_start: usize,
    /// Last epoch before the next visit (the horizon end at the last stage).
    pub interval_end: usize,
    /// Scan outcome for the stage's interval.
    pub local: LocalResult,
    /// Unconstrained minus constrained transfer; planted as a fictitious
    /// loss in the previous stage's scan.
    pub delegated_delta: i64,
}

/// Optimal plan for a full instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    /// Optimal transfer per visit, in schedule order.
    pub interventions: Vec<i64>,
    /// Minimal total loss over the whole horizon.
    pub total_loss: i64,
    /// Loss at epochs before the first visit; no plan can touch it.
    pub systemic_pre_visit_loss: i64,
    /// Loss of the all-zero plan.
    pub null_loss: i64,
    /// `null_loss - total_loss`.
    pub recovered_loss: i64,
    /// Minimal loss if every vehicle were unbounded, same schedule.
    pub uncapacitated_loss: i64,
    /// Per-stage diagnostics, in schedule order.
    pub stage_plans: Vec<StagePlan>,
}

/// Computes the loss-minimizing transfer vector for the instance.
///
/// Every returned transfer is feasible for its vehicle, and no feasible
/// vector attains a smaller total loss.
pub fn solve(instance: &Instance) -> Solution {
    let base = model::null_trajectory(instance);
    let null_loss = base.total_loss();
    let visit_count = instance.visit_count();

    if visit_count == 0 {
        return Solution {
            interventions: Vec::new(),
            total_loss: null_loss,
            systemic_pre_visit_loss: null_loss,
            null_loss,
            recovered_loss: 0,
            uncapacitated_loss: null_loss,
            stage_plans: Vec::new(),
        };
    }

    let systemic = pre_visit_loss(instance, &base);
    let (uncapacitated_loss, _) = uncapacitated_pass(instance, &base, systemic);

    let mut interventions = vec![0i64; visit_count];
    let mut stage_plans = Vec::with_capacity(visit_count);
    let mut delegated = 0i64;
    let mut accumulated = 0i64;

    for stage in (1..=visit_count).rev() {
        let visit = instance.visits()[stage - 1];
        let interval_start = visit.epoch;
        let next_epoch = next_visit_epoch(instance, stage);
        // A pending delegation extends the scan onto the next visit's epoch,
        // where the fictitious loss replaces the real entries.
        let scan_end = if delegated == 0 {
            next_epoch - 1
        } else {
            next_epoch
        };
        let local = vehicle_intervention(
            &base,
            instance.capacity(),
            interval_start,
            scan_end,
            LoadWindow::for_visit(&visit),
            AugmentationOverride::new(delegated),
        )
        .expect("stage intervals lie inside the horizon");

        interventions[stage - 1] = local.x_constrained;
        accumulated += if stage > 1 {
            // The shortfall moves to the previous stage instead of being paid.
            local.loss_unconstrained
        } else {
            local.loss_constrained
        };
        delegated = local.x_unconstrained - local.x_constrained;
        stage_plans.push(StagePlan {
            stage,
            interval_start,
            interval_end: next_epoch - 1,
            local,
            delegated_delta: delegated,
        });
    }
    stage_plans.reverse();

    let total_loss = accumulated + systemic;
    Solution {
        interventions,
        total_loss,
        systemic_pre_visit_loss: systemic,
        null_loss,
        recovered_loss: null_loss - total_loss,
        uncapacitated_loss,
        stage_plans,
    }
}

/// Minimal loss when every vehicle may move any number of bikes.
///
/// With no load windows nothing is ever delegated, so the stages decouple
/// into independent interval plans.
pub fn solve_uncapacitated(instance: &Instance) -> (i64, Vec<i64>) {
    let base = model::null_trajectory(instance);
    if instance.visit_count() == 0 {
        return (base.total_loss(), Vec::new());
    }
    let systemic = pre_visit_loss(instance, &base);
    uncapacitated_pass(instance, &base, systemic)
}

fn uncapacitated_pass(
    instance: &Instance,
    base: &BaseTrajectory,
    systemic: i64,
) -> (i64, Vec<i64>) {
    let visit_count = instance.visit_count();
    let mut interventions = vec![0i64; visit_count];
    let mut loss = systemic;
    for stage in 1..=visit_count {
        let interval_start = instance.visits()[stage - 1].epoch;
        let interval_end = next_visit_epoch(instance, stage) - 1;
        let local = vehicle_intervention(
            base,
            instance.capacity(),
            interval_start,
            interval_end,
            LoadWindow::Unbounded,
            AugmentationOverride::NONE,
        )
        .expect("stage intervals lie inside the horizon");
        interventions[stage - 1] = local.x_unconstrained;
        loss += local.loss_unconstrained;
    }
    (loss, interventions)
}

/// Epoch of visit `stage + 1`, or one past the horizon at the last stage.
fn next_visit_epoch(instance: &Instance, stage: usize) -> usize {
    if stage == instance.visit_count() {
        instance.horizon() + 1
    } else {
        instance.visits()[stage].epoch
    }
}

fn pre_visit_loss(instance: &Instance, base: &BaseTrajectory) -> i64 {
    let first_epoch = instance.visits()[0].epoch;
    if first_epoch > 1 {
        base.loss_in(1, first_epoch - 1)
    } else {
        0
    }
}

/// Why [`prefix_loss`] rejected its arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrefixLossError {
    NoVisits,
    StageOutOfRange { stage: usize, visit_count: usize },
    LengthMismatch { expected: usize, got: usize },
}

impl fmt::Display for PrefixLossError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PrefixLossError::NoVisits => write!(f, "instance schedules no visits"),
            PrefixLossError::StageOutOfRange { stage, visit_count } => {
                write!(f, "stage {stage} outside [1, {visit_count}]")
            }
            PrefixLossError::LengthMismatch { expected, got } => write!(
                f,
                "intervention vector has {got} entries but the instance schedules {expected} visits"
            ),
        }
    }
}

impl Error for PrefixLossError {}

/// Loss of `interventions` on the epochs controlled by the first
/// `upto_stage` visits: from the first visit epoch to the epoch before visit
/// `upto_stage + 1` (the horizon end when `upto_stage` is the last visit).
pub fn prefix_loss(
    instance: &Instance,
    interventions: &[i64],
    upto_stage: usize,
) -> Result<i64, PrefixLossError> {
    let visit_count = instance.visit_count();
    if visit_count == 0 {
        return Err(PrefixLossError::NoVisits);
    }
    if upto_stage < 1 || upto_stage > visit_count {
        return Err(PrefixLossError::StageOutOfRange {
            stage: upto_stage,
            visit_count,
        });
    }
    if interventions.len() != visit_count {
        return Err(PrefixLossError::LengthMismatch {
            expected: visit_count,
            got: interventions.len(),
        });
    }
    let from = instance.visits()[0].epoch;
    let to = next_visit_epoch(instance, upto_stage) - 1;
    Ok(model::loss_of_in(instance, interventions, from, to))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{simulate, Visit};

    fn instance(capacity: i64, initial_stock: i64, demand: &[i64], visits: &[Visit]) -> Instance {
        Instance::new(capacity, initial_stock, demand.to_vec(), visits.to_vec()).unwrap()
    }

    #[test]
    fn zero_demand_needs_no_transfers() {
        let visits = [Visit::new(1, 2, 4), Visit::new(3, 1, 3)];
        let inst = instance(6, 3, &[0, 0, 0, 0], &visits);
        let solution = solve(&inst);
        assert_eq!(solution.interventions, vec![0, 0]);
        assert_eq!(solution.total_loss, 0);
        assert_eq!(solution.null_loss, 0);
    }

    #[test]
    fn no_visits_returns_the_null_loss() {
        let inst = instance(10, 5, &[7, -13, 2], &[]);
        let solution = solve(&inst);
        assert!(solution.interventions.is_empty());
        assert_eq!(solution.total_loss, 5);
        assert_eq!(solution.systemic_pre_visit_loss, 5);
        assert_eq!(solution.uncapacitated_loss, 5);
    }

    #[test]
    fn recovers_the_surplus_but_not_the_late_stockout() {
        let visits = [Visit::new(1, 0, 10), Visit::new(3, 0, 10)];
        let inst = instance(5, 0, &[7, 0, -6, 0], &visits);
        let solution = solve(&inst);
        assert_eq!(solution.interventions, vec![-2, 0]);
        assert_eq!(solution.total_loss, 1);
        assert_eq!(solution.null_loss, 3);
        assert_eq!(solution.recovered_loss, 2);
        assert_eq!(solution.systemic_pre_visit_loss, 0);
        // Unbounded vehicles also cover the late stockout at the visit itself.
        assert_eq!(solution.uncapacitated_loss, 0);
    }

    #[test]
    fn delegation_moves_the_shortfall_to_the_earlier_vehicle() {
        let visits = [Visit::new(1, 5, 10), Visit::new(3, 0, 10)];
        let inst = instance(10, 5, &[0, 0, -8, 0], &visits);
        let solution = solve(&inst);
        assert_eq!(solution.interventions, vec![3, 0]);
        assert_eq!(solution.total_loss, 0);
        // Stage 2 wanted 3 bikes it could not carry; stage 1 unloaded them.
        assert_eq!(solution.stage_plans[1].delegated_delta, 3);
        assert_eq!(solution.stage_plans[1].local.x_unconstrained, 3);
        assert_eq!(solution.stage_plans[1].local.x_constrained, 0);
    }

    #[test]
    fn pre_visit_losses_are_systemic() {
        let visits = [Visit::new(3, 2, 4)];
        let inst = instance(5, 0, &[-2, 0, -1, 0], &visits);
        let solution = solve(&inst);
        assert_eq!(solution.systemic_pre_visit_loss, 2);
        assert_eq!(solution.total_loss, 2);
        assert_eq!(solution.interventions, vec![1]);
    }

    #[test]
    fn replay_matches_the_reported_loss() {
        let visits = [Visit::new(2, 1, 3), Visit::new(4, 0, 2)];
        let inst = instance(4, 2, &[5, -3, -4, 2, 1], &visits);
        let solution = solve(&inst);
        let (_, replayed) = simulate(&inst, &solution.interventions).unwrap();
        assert_eq!(replayed, solution.total_loss);
    }

    #[test]
    fn uncapacitated_matches_the_relaxed_instance() {
        let visits = [Visit::new(1, 0, 2), Visit::new(3, 1, 2)];
        let inst = instance(5, 0, &[6, -2, -7, 1], &visits);
        let (loss, xs) = solve_uncapacitated(&inst);
        // Same schedule, effectively unbounded vehicles.
        let relaxed_visits = [Visit::new(1, 500, 1_000), Visit::new(3, 500, 1_000)];
        let relaxed = instance(5, 0, &[6, -2, -7, 1], &relaxed_visits);
        assert_eq!(solve(&relaxed).total_loss, loss);
        assert_eq!(xs.len(), 2);
        assert!(loss <= solve(&inst).total_loss);
    }

    #[test]
    fn stage_plans_cover_the_horizon_in_order() {
        let visits = [Visit::new(2, 1, 3), Visit::new(4, 0, 2)];
        let inst = instance(4, 2, &[5, -3, -4, 2, 1], &visits);
        let solution = solve(&inst);
        assert_eq!(solution.stage_plans.len(), 2);
        assert_eq!(solution.stage_plans[0].stage, 1);
        assert_eq!(solution.stage_plans[0].interval_start, 2);
        assert_eq!(solution.stage_plans[0].interval_end, 3);
        assert_eq!(solution.stage_plans[1].interval_start, 4);
        assert_eq!(solution.stage_plans[1].interval_end, 5);
        for plan in &solution.stage_plans {
            assert_eq!(
                plan.delegated_delta,
                plan.local.x_unconstrained - plan.local.x_constrained
            );
        }
    }

    #[test]
    fn prefix_loss_splits_at_visit_boundaries() {
        let visits = [Visit::new(1, 0, 10), Visit::new(3, 0, 10)];
        let inst = instance(5, 0, &[7, 0, -6, 0], &visits);
        let solution = solve(&inst);
        assert_eq!(prefix_loss(&inst, &solution.interventions, 1).unwrap(), 0);
        assert_eq!(
            prefix_loss(&inst, &solution.interventions, 2).unwrap(),
            solution.total_loss - solution.systemic_pre_visit_loss
        );
        assert_eq!(prefix_loss(&inst, &[0, 0], 2).unwrap(), 3);
    }

    #[test]
    fn prefix_loss_validates_its_arguments() {
        let inst = instance(5, 0, &[0], &[]);
        assert_eq!(prefix_loss(&inst, &[], 1), Err(PrefixLossError::NoVisits));

        let visits = [Visit::new(1, 0, 1)];
        let inst = instance(5, 0, &[0, 0], &visits);
        assert!(matches!(
            prefix_loss(&inst, &[0], 2),
            Err(PrefixLossError::StageOutOfRange { .. })
        ));
        assert!(matches!(
            prefix_loss(&inst, &[0, 0], 1),
            Err(PrefixLossError::LengthMismatch { .. })
        ));
    }
}
