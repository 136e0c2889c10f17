//! Single-transfer planning on an epoch interval.
//!
//! Given the null-intervention trajectory, [`vehicle_intervention`] answers:
//! which single transfer at the interval's first epoch minimizes the loss
//! accumulated over the interval, and what does that minimum cost? It answers
//! for an unconstrained transfer and for one confined to the vehicle's
//! feasible range, in one linear scan and without re-simulating.
//!
//! The scan walks the interval keeping two trackers: `alpha`, how many bikes
//! could still be removed at the start without driving the stock negative
//! anywhere scanned so far, and `beta`, the highest stock seen (shifted by
//! recoveries), which bounds how many bikes can still be added without
//! overflowing. Each surplus loss is recovered up to `alpha` by removing
//! bikes at the start; each stockout loss up to `capacity - beta` by adding
//! them. Whatever cannot be recovered is paid. The resulting transfer is the
//! minimum-modulus optimum: interval losses grow by exactly one per unit of
//! distance from the optimal set, so clamping into the feasible range costs
//! the distance clamped over.

use std::fmt;

use crate::model::{check_range, BaseTrajectory, EpochRangeError, Visit};

/// Replaces the loss/stock entries at the last scanned epoch with a
/// fictitious loss, used by the global solver to delegate a shortfall from a
/// later interval to an earlier vehicle. Positive `delta` plants a stockout
/// of `delta` with the stock pinned at 0; negative plants a surplus of
/// `-delta` with the stock pinned at the capacity; zero changes nothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AugmentationOverride {
    pub delta: i64,
}

impl AugmentationOverride {
    pub const NONE: AugmentationOverride = AugmentationOverride { delta: 0 };

    pub fn new(delta: i64) -> Self {
        AugmentationOverride { delta }
    }
}

/// Feasible transfer range of the vehicle performing the intervention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoadWindow {
    /// Transfers confined to `[load - vehicle_capacity, load]`.
    Capacitated { load: i64, vehicle_capacity: i64 },
    /// No restriction in either direction.
    Unbounded,
}

impl LoadWindow {
    pub fn for_visit(visit: &Visit) -> Self {
        LoadWindow::Capacitated {
            load: visit.load,
            vehicle_capacity: visit.vehicle_capacity,
        }
    }

    /// Inclusive bounds, None when unbounded.
    pub fn bounds(self) -> Option<(i64, i64)> {
        match self {
            LoadWindow::Capacitated {
                load,
                vehicle_capacity,
            } => Some((load - vehicle_capacity, load)),
            LoadWindow::Unbounded => None,
        }
    }

    /// Nearest feasible transfer to `x`.
    pub fn clamp(self, x: i64) -> i64 {
        match self.bounds() {
            Some((lower, upper)) => x.clamp(lower, upper),
            None => x,
        }
    }

    pub fn contains(self, x: i64) -> bool {
        self.clamp(x) == x
    }
}

impl fmt::Display for LoadWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.bounds() {
            Some((lower, upper)) => write!(f, "[{lower}, {upper}]"),
            None => write!(f, "unbounded"),
        }
    }
}

/// Minimum-modulus optimal transfers and losses for one interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalResult {
    /// Optimal transfer with no vehicle restriction.
    pub x_unconstrained: i64,
    /// Interval loss under `x_unconstrained`.
    pub loss_unconstrained: i64,
    /// Optimal transfer inside the load window.
    pub x_constrained: i64,
    /// Interval loss under `x_constrained`; always
    /// `loss_unconstrained + |x_unconstrained - x_constrained|`.
    pub loss_constrained: i64,
}

/// Closed integer interval of transfers attaining the minimal interval loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OptimalInterval {
    pub lower: i64,
    pub upper: i64,
}

impl OptimalInterval {
    pub fn singleton(x: i64) -> Self {
        OptimalInterval { lower: x, upper: x }
    }

    pub fn contains(&self, x: i64) -> bool {
        self.lower <= x && x <= self.upper
    }

    /// Distance from `x` to the interval; zero inside.
    pub fn distance(&self, x: i64) -> i64 {
        if x < self.lower {
            self.lower - x
        } else if x > self.upper {
            x - self.upper
        } else {
            0
        }
    }

    /// Optimal set under a load window: the intersection when it is
    /// non-empty, otherwise the window endpoint nearest the interval.
    pub fn constrain(&self, window: LoadWindow) -> OptimalInterval {
        match window.bounds() {
            None => *self,
            Some((lower, upper)) => {
                if self.lower > upper {
                    OptimalInterval::singleton(upper)
                } else if self.upper < lower {
                    OptimalInterval::singleton(lower)
                } else {
                    OptimalInterval {
                        lower: self.lower.max(lower),
                        upper: self.upper.min(upper),
                    }
                }
            }
        }
    }

    /// The minimum-modulus element.
    pub fn min_modulus(&self) -> i64 {
        if self.lower > 0 {
            self.lower
        } else if self.upper < 0 {
            self.upper
        } else {
            0
        }
    }
}

/// Plans the optimal single transfer at epoch `from_epoch` against the loss
/// accumulated on `[from_epoch, to_epoch]` of the null trajectory `base`.
///
/// `base` must be the null-intervention trajectory of the instance; the scan
/// reads only its loss and stock sequences. When `augmentation.delta != 0`
/// the entries at `to_epoch` are replaced by the fictitious loss described on
/// [`AugmentationOverride`].
pub fn vehicle_intervention(
    base: &BaseTrajectory,
    capacity: i64,
    from_epoch: usize,
    to_epoch: usize,
    window: LoadWindow,
    augmentation: AugmentationOverride,
) -> Result<LocalResult, EpochRangeError> {
    check_range(from_epoch, to_epoch, base.len())?;

    let mut x = 0i64;
    let mut loss = 0i64;
    // Sentinels: alpha unbounded-high, beta unbounded-low. Both collapse to
    // the scanned stock on the first epoch; saturating arithmetic keeps the
    // sentinel semantics until then.
    let mut alpha = i64::MAX;
    let mut beta = i64::MIN;

    for epoch in from_epoch..=to_epoch {
        let (surplus, stockout, stock) = if epoch == to_epoch && augmentation.delta != 0 {
            if augmentation.delta > 0 {
                (0, augmentation.delta, 0)
            } else {
                (-augmentation.delta, 0, capacity)
            }
        } else {
            let i = epoch - 1;
            (
                base.surplus_loss[i],
                base.stockout_loss[i],
                base.stock[i],
            )
        };

        // Recover as much of this epoch's loss as the trackers allow; the
        // remainder is paid.
        let removed = surplus.min(alpha);
        let added = stockout.min(capacity.saturating_sub(beta));
        x += added - removed;
        loss += (surplus - removed) + (stockout - added);
        alpha = alpha.saturating_sub(removed).min(stock);
        beta = beta.saturating_add(added).max(stock);
    }

    let x_constrained = window.clamp(x);
    let loss_constrained = loss + (x - x_constrained).abs();
    Ok(LocalResult {
        x_unconstrained: x,
        loss_unconstrained: loss,
        x_constrained,
        loss_constrained,
    })
}

/// The whole set of unconstrained optimal transfers for the interval
/// `[from_epoch, to_epoch]`, given the scan result `local` for that range.
///
/// When the minimal loss is positive the optimum is unique. When it is zero
/// the set is an interval: bounded below by how far the stock induced by the
/// optimum can still drop toward 0, and above by how far it can still rise
/// toward the capacity. The induced stock is reconstructed from the null
/// trajectory as `stock + cumulative(surplus - stockout) + x`, which is exact
/// because a zero-loss transfer removes every clamp in the range.
pub fn optimal_interval(
    base: &BaseTrajectory,
    capacity: i64,
    from_epoch: usize,
    to_epoch: usize,
    local: &LocalResult,
) -> Result<OptimalInterval, EpochRangeError> {
    check_range(from_epoch, to_epoch, base.len())?;
    if local.loss_unconstrained > 0 {
        return Ok(OptimalInterval::singleton(local.x_unconstrained));
    }

    let mut cumulative = 0i64;
    let mut min_stock = i64::MAX;
    let mut max_stock = i64::MIN;
    for epoch in from_epoch..=to_epoch {
        let i = epoch - 1;
        cumulative += base.surplus_loss[i] - base.stockout_loss[i];
        let induced = base.stock[i] + cumulative + local.x_unconstrained;
        min_stock = min_stock.min(induced);
        max_stock = max_stock.max(induced);
    }
    Ok(OptimalInterval {
        lower: local.x_unconstrained - min_stock,
        upper: local.x_unconstrained + capacity - max_stock,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{null_trajectory, Instance};

    fn null_base(capacity: i64, initial_stock: i64, demand: &[i64]) -> BaseTrajectory {
        let inst = Instance::new(capacity, initial_stock, demand.to_vec(), vec![]).unwrap();
        null_trajectory(&inst)
    }

    fn window(load: i64, vehicle_capacity: i64) -> LoadWindow {
        LoadWindow::Capacitated {
            load,
            vehicle_capacity,
        }
    }

    #[test]
    fn loss_free_interval_needs_no_transfer() {
        let base = null_base(10, 5, &[2, -3, 1]);
        let local = vehicle_intervention(
            &base,
            10,
            1,
            3,
            window(4, 6),
            AugmentationOverride::NONE,
        )
        .unwrap();
        assert_eq!(
            local,
            LocalResult {
                x_unconstrained: 0,
                loss_unconstrained: 0,
                x_constrained: 0,
                loss_constrained: 0,
            }
        );
    }

    #[test]
    fn clamping_pays_the_distance_to_the_window() {
        let base = null_base(10, 10, &[2, 0, 0]);
        let local = vehicle_intervention(
            &base,
            10,
            1,
            3,
            window(0, 1),
            AugmentationOverride::NONE,
        )
        .unwrap();
        assert_eq!(
            local,
            LocalResult {
                x_unconstrained: -2,
                loss_unconstrained: 0,
                x_constrained: -1,
                loss_constrained: 1,
            }
        );
    }

    #[test]
    fn early_empty_stock_blocks_surplus_recovery() {
        let base = null_base(5, 1, &[-1, 6]);
        let local = vehicle_intervention(
            &base,
            5,
            1,
            2,
            window(5, 5),
            AugmentationOverride::NONE,
        )
        .unwrap();
        assert_eq!(
            local,
            LocalResult {
                x_unconstrained: 0,
                loss_unconstrained: 1,
                x_constrained: 0,
                loss_constrained: 1,
            }
        );
    }

    #[test]
    fn stockout_recovery_adds_bikes_up_front() {
        let base = null_base(10, 0, &[-3, 0]);
        let local = vehicle_intervention(
            &base,
            10,
            1,
            2,
            window(5, 5),
            AugmentationOverride::NONE,
        )
        .unwrap();
        assert_eq!(
            local,
            LocalResult {
                x_unconstrained: 3,
                loss_unconstrained: 0,
                x_constrained: 3,
                loss_constrained: 0,
            }
        );
    }

    #[test]
    fn unbounded_window_never_clamps() {
        let base = null_base(10, 10, &[2, 0, 0]);
        let local = vehicle_intervention(
            &base,
            10,
            1,
            3,
            LoadWindow::Unbounded,
            AugmentationOverride::NONE,
        )
        .unwrap();
        assert_eq!(local.x_constrained, local.x_unconstrained);
        assert_eq!(local.loss_constrained, local.loss_unconstrained);
    }

    #[test]
    fn positive_augmentation_plants_a_stockout() {
        // No real losses; delta = 3 at the final epoch asks for 3 extra bikes.
        let base = null_base(10, 5, &[0, 0, 0]);
        let local = vehicle_intervention(
            &base,
            10,
            1,
            3,
            window(5, 10),
            AugmentationOverride::new(3),
        )
        .unwrap();
        assert_eq!(local.x_unconstrained, 3);
        assert_eq!(local.loss_unconstrained, 0);
        assert_eq!(local.x_constrained, 3);
    }

    #[test]
    fn negative_augmentation_plants_a_surplus() {
        let base = null_base(10, 5, &[0, 0, 0]);
        let local = vehicle_intervention(
            &base,
            10,
            1,
            3,
            window(5, 10),
            AugmentationOverride::new(-3),
        )
        .unwrap();
        assert_eq!(local.x_unconstrained, -3);
        assert_eq!(local.loss_unconstrained, 0);
    }

    #[test]
    fn augmentation_respects_the_stock_ceiling() {
        // Stock sits at the capacity before the fictitious stockout: nothing
        // can be added early, the delegated loss is paid.
        let base = null_base(5, 5, &[0, 0]);
        let local = vehicle_intervention(
            &base,
            5,
            1,
            2,
            LoadWindow::Unbounded,
            AugmentationOverride::new(2),
        )
        .unwrap();
        assert_eq!(local.x_unconstrained, 0);
        assert_eq!(local.loss_unconstrained, 2);
    }

    #[test]
    fn scan_rejects_bad_ranges() {
        let base = null_base(5, 0, &[0, 0]);
        assert!(vehicle_intervention(
            &base,
            5,
            2,
            1,
            LoadWindow::Unbounded,
            AugmentationOverride::NONE
        )
        .is_err());
        assert!(vehicle_intervention(
            &base,
            5,
            1,
            3,
            LoadWindow::Unbounded,
            AugmentationOverride::NONE
        )
        .is_err());
    }

    #[test]
    fn flat_stock_interval_is_forced_by_the_clamps() {
        let base = null_base(10, 5, &[0]);
        let local = vehicle_intervention(
            &base,
            10,
            1,
            1,
            LoadWindow::Unbounded,
            AugmentationOverride::NONE,
        )
        .unwrap();
        let interval = optimal_interval(&base, 10, 1, 1, &local).unwrap();
        assert_eq!(interval, OptimalInterval { lower: -5, upper: 5 });
    }

    #[test]
    fn recovered_surplus_shifts_the_interval() {
        let base = null_base(10, 10, &[2, 0, 0]);
        let local = vehicle_intervention(
            &base,
            10,
            1,
            3,
            LoadWindow::Unbounded,
            AugmentationOverride::NONE,
        )
        .unwrap();
        let interval = optimal_interval(&base, 10, 1, 3, &local).unwrap();
        assert_eq!(
            interval,
            OptimalInterval {
                lower: -12,
                upper: -2
            }
        );
        assert_eq!(interval.min_modulus(), -2);
        assert_eq!(local.x_unconstrained, -2);
    }

    #[test]
    fn positive_residual_loss_pins_a_singleton() {
        let base = null_base(5, 1, &[-1, 6]);
        let local = vehicle_intervention(
            &base,
            5,
            1,
            2,
            LoadWindow::Unbounded,
            AugmentationOverride::NONE,
        )
        .unwrap();
        assert!(local.loss_unconstrained > 0);
        let interval = optimal_interval(&base, 5, 1, 2, &local).unwrap();
        assert_eq!(interval, OptimalInterval::singleton(local.x_unconstrained));
    }

    #[test]
    fn constraining_snaps_to_the_nearest_window_edge() {
        let interval = OptimalInterval {
            lower: -12,
            upper: -2,
        };
        assert_eq!(
            interval.constrain(window(0, 1)),
            OptimalInterval::singleton(-1)
        );
        assert_eq!(
            interval.constrain(window(0, 5)),
            OptimalInterval {
                lower: -5,
                upper: -2
            }
        );
        let right = OptimalInterval { lower: 3, upper: 8 };
        assert_eq!(
            right.constrain(window(1, 1)),
            OptimalInterval::singleton(1)
        );
        assert_eq!(right.constrain(LoadWindow::Unbounded), right);
    }

    #[test]
    fn min_modulus_picks_the_latest_possible_move() {
        assert_eq!(OptimalInterval { lower: 2, upper: 7 }.min_modulus(), 2);
        assert_eq!(
            OptimalInterval {
                lower: -7,
                upper: -2
            }
            .min_modulus(),
            -2
        );
        assert_eq!(
            OptimalInterval {
                lower: -3,
                upper: 4
            }
            .min_modulus(),
            0
        );
    }
}
