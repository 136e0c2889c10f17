//! Problem data and the clamped stock dynamics every solver in this crate
//! shares.
//!
//! A station with `capacity` stands starts at `initial_stock` bikes. Each
//! epoch `h` applies a signed net demand `d^(h)`: positive demand returns
//! bikes to the station, negative demand takes bikes out. At scheduled
//! epochs a vehicle additionally transfers `x_i` bikes (positive unloads
//! vehicle to station, negative loads station to vehicle). The resulting
//! virtual stock is clamped to `[0, capacity]`; the clamped-away overflow is
//! surplus loss (returns turned away at a full station) and the shortfall is
//! stockout loss (rentals turned away at an empty station). The objective
//! everything else minimizes is the total loss over the horizon.

use std::error::Error;
use std::fmt;

/// One scheduled vehicle visit.
///
/// A transfer `x` at this visit is feasible iff it keeps the on-board count
/// inside `[0, vehicle_capacity]`, i.e. `x ∈ [load - vehicle_capacity, load]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Visit {
    /// 1-based epoch at which the vehicle is at the station.
    pub epoch: usize,
    /// Bikes on board when the vehicle arrives.
    pub load: i64,
    /// Total bike capacity of the vehicle.
    pub vehicle_capacity: i64,
}

impl Visit {
    pub fn new(epoch: usize, load: i64, vehicle_capacity: i64) -> Self {
        Visit {
            epoch,
            load,
            vehicle_capacity,
        }
    }

    /// Inclusive bounds `[load - vehicle_capacity, load]` of a feasible transfer.
    pub fn intervention_bounds(&self) -> (i64, i64) {
        (self.load - self.vehicle_capacity, self.load)
    }
}

/// A validated problem instance.
///
/// Invariants enforced by [`Instance::new`]:
/// - `0 <= initial_stock <= capacity`
/// - at least one epoch of demand
/// - visit epochs strictly increasing, each inside `[1, m]`
/// - every visit satisfies `0 <= load <= vehicle_capacity`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    capacity: i64,
    initial_stock: i64,
    demand: Vec<i64>,
    visits: Vec<Visit>,
}

impl Instance {
    pub fn new(
        capacity: i64,
        initial_stock: i64,
        demand: Vec<i64>,
        visits: Vec<Visit>,
    ) -> Result<Self, InstanceError> {
        if capacity < 0 {
            return Err(InstanceError::NegativeCapacity { capacity });
        }
        if initial_stock < 0 || initial_stock > capacity {
            return Err(InstanceError::InitialStockOutOfRange {
                initial_stock,
                capacity,
            });
        }
        if demand.is_empty() {
            return Err(InstanceError::EmptyHorizon);
        }
        let horizon = demand.len();
        let mut previous_epoch = 0usize;
        for (index, visit) in visits.iter().enumerate() {
            if visit.epoch < 1 || visit.epoch > horizon {
                return Err(InstanceError::VisitEpochOutOfRange {
                    index,
                    epoch: visit.epoch,
                    horizon,
                });
            }
            if visit.epoch <= previous_epoch {
                return Err(InstanceError::VisitEpochsNotIncreasing {
                    index,
                    epoch: visit.epoch,
                    previous: previous_epoch,
                });
            }
            previous_epoch = visit.epoch;
            if visit.load < 0 {
                return Err(InstanceError::NegativeLoad {
                    index,
                    load: visit.load,
                });
            }
            if visit.vehicle_capacity < 0 {
                return Err(InstanceError::NegativeVehicleCapacity {
                    index,
                    vehicle_capacity: visit.vehicle_capacity,
                });
            }
            if visit.load > visit.vehicle_capacity {
                return Err(InstanceError::LoadExceedsVehicleCapacity {
                    index,
                    load: visit.load,
                    vehicle_capacity: visit.vehicle_capacity,
                });
            }
        }
        Ok(Instance {
            capacity,
            initial_stock,
            demand,
            visits,
        })
    }

    pub fn capacity(&self) -> i64 {
        self.capacity
    }

    pub fn initial_stock(&self) -> i64 {
        self.initial_stock
    }

    pub fn demand(&self) -> &[i64] {
        &self.demand
    }

    /// Demand at a 1-based epoch.
    pub fn demand_at(&self, epoch: usize) -> i64 {
        self.demand[epoch - 1]
    }

    pub fn visits(&self) -> &[Visit] {
        &self.visits
    }

    /// Number of epochs `m`.
    pub fn horizon(&self) -> usize {
        self.demand.len()
    }

    /// Number of scheduled visits `w`.
    pub fn visit_count(&self) -> usize {
        self.visits.len()
    }
}

/// Why an [`Instance`] could not be constructed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstanceError {
    NegativeCapacity {
        capacity: i64,
    },
    InitialStockOutOfRange {
        initial_stock: i64,
        capacity: i64,
    },
    EmptyHorizon,
    VisitEpochOutOfRange {
        index: usize,
        epoch: usize,
        horizon: usize,
    },
    VisitEpochsNotIncreasing {
        index: usize,
        epoch: usize,
        previous: usize,
    },
    NegativeLoad {
        index: usize,
        load: i64,
    },
    NegativeVehicleCapacity {
        index: usize,
        vehicle_capacity: i64,
    },
    LoadExceedsVehicleCapacity {
        index: usize,
        load: i64,
        vehicle_capacity: i64,
    },
}

impl fmt::Display for InstanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            InstanceError::NegativeCapacity { capacity } => {
                write!(f, "station capacity must be non-negative, got {capacity}")
            }
            InstanceError::InitialStockOutOfRange {
                initial_stock,
                capacity,
            } => write!(
                f,
                "initial stock {initial_stock} outside the station range [0, {capacity}]"
            ),
            InstanceError::EmptyHorizon => {
                write!(f, "demand horizon must contain at least one epoch")
            }
            InstanceError::VisitEpochOutOfRange {
                index,
                epoch,
                horizon,
            } => write!(
                f,
                "visit {index}: epoch {epoch} outside the horizon [1, {horizon}]"
            ),
            InstanceError::VisitEpochsNotIncreasing {
                index,
                epoch,
                previous,
            } => write!(
                f,
                "visit {index}: epoch {epoch} must be greater than the previous visit epoch {previous}"
            ),
            InstanceError::NegativeLoad { index, load } => {
                write!(f, "visit {index}: load must be non-negative, got {load}")
            }
            InstanceError::NegativeVehicleCapacity {
                index,
                vehicle_capacity,
            } => write!(
                f,
                "visit {index}: vehicle capacity must be non-negative, got {vehicle_capacity}"
            ),
            InstanceError::LoadExceedsVehicleCapacity {
                index,
                load,
                vehicle_capacity,
            } => write!(
                f,
                "visit {index}: load {load} exceeds vehicle capacity {vehicle_capacity}"
            ),
        }
    }
}

impl Error for InstanceError {}

/// Per-epoch trajectory induced by an intervention vector.
///
/// All four sequences are indexed by epoch (entry `h - 1` holds epoch `h`).
/// At every epoch at most one of the two losses is positive, and
/// `stock = virtual_stock - surplus_loss + stockout_loss` stays in `[0, C]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseTrajectory {
    /// Pre-clamp stock; may be negative or exceed the station capacity.
    pub virtual_stock: Vec<i64>,
    /// Bikes turned away because the station was full.
    pub surplus_loss: Vec<i64>,
    /// Rentals turned away because the station was empty.
    pub stockout_loss: Vec<i64>,
    /// Post-clamp stock, always in `[0, C]`.
    pub stock: Vec<i64>,
}

impl BaseTrajectory {
    /// Number of epochs covered.
    pub fn len(&self) -> usize {
        self.stock.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stock.is_empty()
    }

    /// Stock after a 1-based epoch.
    pub fn stock_at(&self, epoch: usize) -> i64 {
        self.stock[epoch - 1]
    }

    /// Stock after the last epoch.
    pub fn terminal_stock(&self) -> i64 {
        *self.stock.last().expect("trajectory covers at least one epoch")
    }

    /// Total loss over the whole horizon.
    pub fn total_loss(&self) -> i64 {
        self.loss_in(1, self.len())
    }

    /// Loss summed over the 1-based inclusive epoch range `[from, to]`.
    pub fn loss_in(&self, from: usize, to: usize) -> i64 {
        debug_assert!(1 <= from && from <= to && to <= self.len());
        self.surplus_loss[from - 1..to]
            .iter()
            .chain(&self.stockout_loss[from - 1..to])
            .sum()
    }
}

/// Why a simulation request was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimulationError {
    LengthMismatch {
        expected: usize,
        got: usize,
    },
    /// The transfer at `visit` leaves the vehicle outside `[0, Q]`.
    InfeasibleIntervention {
        visit: usize,
        value: i64,
        lower: i64,
        upper: i64,
    },
}

impl fmt::Display for SimulationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SimulationError::LengthMismatch { expected, got } => write!(
                f,
                "intervention vector has {got} entries but the instance schedules {expected} visits"
            ),
            SimulationError::InfeasibleIntervention {
                visit,
                value,
                lower,
                upper,
            } => write!(
                f,
                "intervention {value} at visit {visit} outside the feasible range [{lower}, {upper}]"
            ),
        }
    }
}

impl Error for SimulationError {}

/// Runs the stock dynamics under `interventions`, rejecting transfers outside
/// each visit's feasible range. Returns the trajectory and its total loss.
pub fn simulate(
    instance: &Instance,
    interventions: &[i64],
) -> Result<(BaseTrajectory, i64), SimulationError> {
    check_length(instance, interventions)?;
    for (visit_index, (visit, &x)) in instance.visits().iter().zip(interventions).enumerate() {
        let (lower, upper) = visit.intervention_bounds();
        if x < lower || x > upper {
            return Err(SimulationError::InfeasibleIntervention {
                visit: visit_index,
                value: x,
                lower,
                upper,
            });
        }
    }
    Ok(run_dynamics(instance, interventions))
}

/// Like [`simulate`] but accepts transfers outside the vehicle's feasible
/// range. The dynamics are total functions of any integer vector; this is the
/// evaluation path for exhaustive searches and sweeps that deliberately step
/// outside `[q - Q, q]`.
pub fn simulate_unchecked(
    instance: &Instance,
    interventions: &[i64],
) -> Result<(BaseTrajectory, i64), SimulationError> {
    check_length(instance, interventions)?;
    Ok(run_dynamics(instance, interventions))
}

/// Trajectory of the all-zero intervention vector.
pub fn null_trajectory(instance: &Instance) -> BaseTrajectory {
    let zeros = vec![0i64; instance.visit_count()];
    run_dynamics(instance, &zeros).0
}

fn check_length(instance: &Instance, interventions: &[i64]) -> Result<(), SimulationError> {
    if interventions.len() != instance.visit_count() {
        return Err(SimulationError::LengthMismatch {
            expected: instance.visit_count(),
            got: interventions.len(),
        });
    }
    Ok(())
}

fn run_dynamics(instance: &Instance, interventions: &[i64]) -> (BaseTrajectory, i64) {
    let horizon = instance.horizon();
    let capacity = instance.capacity();
    let mut virtual_stock = Vec::with_capacity(horizon);
    let mut surplus_loss = Vec::with_capacity(horizon);
    let mut stockout_loss = Vec::with_capacity(horizon);
    let mut stock_series = Vec::with_capacity(horizon);

    let mut stock = instance.initial_stock();
    let mut total_loss = 0i64;
    let mut next_visit = 0usize;
    let visits = instance.visits();

    for (index, &demand) in instance.demand().iter().enumerate() {
        let epoch = index + 1;
        let mut virt = stock + demand;
        if next_visit < visits.len() && visits[next_visit].epoch == epoch {
            virt += interventions[next_visit];
            next_visit += 1;
        }
        let surplus = (virt - capacity).max(0);
        let stockout = (-virt).max(0);
        stock = virt - surplus + stockout;
        total_loss += surplus + stockout;

        virtual_stock.push(virt);
        surplus_loss.push(surplus);
        stockout_loss.push(stockout);
        stock_series.push(stock);
    }

    (
        BaseTrajectory {
            virtual_stock,
            surplus_loss,
            stockout_loss,
            stock: stock_series,
        },
        total_loss,
    )
}

/// Allocation-free loss of `interventions` over the 1-based inclusive epoch
/// range `[from, to]`. Hot path of the exhaustive searches.
pub(crate) fn loss_of_in(instance: &Instance, interventions: &[i64], from: usize, to: usize) -> i64 {
    debug_assert_eq!(interventions.len(), instance.visit_count());
    debug_assert!(1 <= from && from <= to && to <= instance.horizon());
    let capacity = instance.capacity();
    let visits = instance.visits();
    let mut stock = instance.initial_stock();
    let mut loss = 0i64;
    let mut next_visit = 0usize;
    for (index, &demand) in instance.demand()[..to].iter().enumerate() {
        let epoch = index + 1;
        let mut virt = stock + demand;
        if next_visit < visits.len() && visits[next_visit].epoch == epoch {
            virt += interventions[next_visit];
            next_visit += 1;
        }
        let surplus = (virt - capacity).max(0);
        let stockout = (-virt).max(0);
        stock = virt - surplus + stockout;
        if epoch >= from {
            loss += surplus + stockout;
        }
    }
    loss
}

/// Full-horizon variant of [`loss_of_in`].
pub(crate) fn loss_of(instance: &Instance, interventions: &[i64]) -> i64 {
    loss_of_in(instance, interventions, 1, instance.horizon())
}

/// First-loss epochs and stock envelope over an epoch range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrajectoryDiagnostics {
    /// Least epoch in the range with positive surplus loss, if any.
    pub first_surplus_epoch: Option<usize>,
    /// Least epoch in the range with positive stockout loss, if any.
    pub first_stockout_epoch: Option<usize>,
    /// Minimum stock over the range.
    pub running_min_stock: i64,
    /// Maximum stock over the range.
    pub running_max_stock: i64,
}

/// An epoch range outside the trajectory's horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EpochRangeError {
    pub from: usize,
    pub to: usize,
    pub horizon: usize,
}

impl fmt::Display for EpochRangeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "epoch range [{}, {}] is not a sub-range of [1, {}]",
            self.from, self.to, self.horizon
        )
    }
}

impl Error for EpochRangeError {}

/// Scans the 1-based inclusive range `[from, to]` of a trajectory.
pub fn diagnostics(
    trajectory: &BaseTrajectory,
    from: usize,
    to: usize,
) -> Result<TrajectoryDiagnostics, EpochRangeError> {
    check_range(from, to, trajectory.len())?;
    let mut first_surplus_epoch = None;
    let mut first_stockout_epoch = None;
    let mut running_min_stock = i64::MAX;
    let mut running_max_stock = i64::MIN;
    for epoch in from..=to {
        let i = epoch - 1;
        if first_surplus_epoch.is_none() && trajectory.surplus_loss[i] > 0 {
            first_surplus_epoch = Some(epoch);
        }
        if first_stockout_epoch.is_none() && trajectory.stockout_loss[i] > 0 {
            first_stockout_epoch = Some(epoch);
        }
        running_min_stock = running_min_stock.min(trajectory.stock[i]);
        running_max_stock = running_max_stock.max(trajectory.stock[i]);
    }
    Ok(TrajectoryDiagnostics {
        first_surplus_epoch,
        first_stockout_epoch,
        running_min_stock,
        running_max_stock,
    })
}

pub(crate) fn check_range(from: usize, to: usize, horizon: usize) -> Result<(), EpochRangeError> {
    if from < 1 || from > to || to > horizon {
        return Err(EpochRangeError { from, to, horizon });
    }
    Ok(())
}
