//! Instance files, trajectory export, and reproducible instance generation.
//!
//! Instance files are JSON:
//!
//! ```json
//! {
//!   "capacity": 5,
//!   "initial_stock": 0,
//!   "demand": [7, 0, -6, 0],
//!   "visits": [
//!     { "epoch": 1, "load": 0, "capacity": 10 },
//!     { "epoch": 3, "load": 0, "capacity": 10 }
//!   ]
//! }
//! ```
//!
//! Validation failures name the offending field path, e.g.
//! `visits[1].epoch`. Trajectory exports are comma-separated text with the
//! fixed header `epoch,demand,intervention,virtual_stock,surplus_loss,stockout_loss,stock`.
//!
//! Generation is reproducible: the generator draws from a ChaCha8 stream
//! cipher RNG (`rand_chacha::ChaCha8Rng`) seeded via `seed_from_u64`, a
//! named, portable algorithm whose streams are stable across platforms and
//! releases. Draw order: initial stock (when the policy is `Uniform`), then
//! the demands in epoch order, then the visit epochs (a uniform random
//! strictly increasing subset), then per visit in schedule order the vehicle
//! capacity followed by its load.

use std::error::Error;
use std::fmt;
use std::io;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{BaseTrajectory, Instance, InstanceError, Visit};

/// On-disk mirror of [`Instance`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub capacity: i64,
    pub initial_stock: i64,
    pub demand: Vec<i64>,
    pub visits: Vec<VisitDocument>,
}

/// On-disk mirror of [`Visit`]; `capacity` is the vehicle capacity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VisitDocument {
    pub epoch: i64,
    pub load: i64,
    pub capacity: i64,
}

impl From<&Instance> for InstanceDocument {
    fn from(instance: &Instance) -> Self {
        InstanceDocument {
            capacity: instance.capacity(),
            initial_stock: instance.initial_stock(),
            demand: instance.demand().to_vec(),
            visits: instance
                .visits()
                .iter()
                .map(|v| VisitDocument {
                    epoch: v.epoch as i64,
                    load: v.load,
                    capacity: v.vehicle_capacity,
                })
                .collect(),
        }
    }
}

/// Why an instance file was rejected.
#[derive(Debug)]
pub enum ReadError {
    /// Not valid JSON in the expected shape.
    Parse(serde_json::Error),
    /// Parsed, but violates an instance invariant at `path`.
    Invalid { path: String, message: String },
}

impl fmt::Display for ReadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReadError::Parse(e) => write!(f, "parse error: {e}"),
            ReadError::Invalid { path, message } => {
                write!(f, "invalid instance at {path}: {message}")
            }
        }
    }
}

impl Error for ReadError {
    fn source(&self) -> Option<&(dyn Error + 'static)> {
        match self {
            ReadError::Parse(e) => Some(e),
            ReadError::Invalid { .. } => None,
        }
    }
}

/// Parses and validates an instance document.
pub fn read_instance(text: &str) -> Result<Instance, ReadError> {
    let document: InstanceDocument = serde_json::from_str(text).map_err(ReadError::Parse)?;
    let mut visits = Vec::with_capacity(document.visits.len());
    for (index, visit) in document.visits.iter().enumerate() {
        if visit.epoch < 1 {
            return Err(ReadError::Invalid {
                path: format!("visits[{index}].epoch"),
                message: format!("epoch {} must be at least 1", visit.epoch),
            });
        }
        visits.push(Visit::new(visit.epoch as usize, visit.load, visit.capacity));
    }
    Instance::new(
        document.capacity,
        document.initial_stock,
        document.demand,
        visits,
    )
    .map_err(|e| ReadError::Invalid {
        path: field_path(&e),
        message: e.to_string(),
    })
}

/// Renders an instance back to its document form (pretty JSON, trailing
/// newline).
pub fn write_instance(instance: &Instance) -> String {
    let document = InstanceDocument::from(instance);
    let mut text =
        serde_json::to_string_pretty(&document).expect("instance documents always serialize");
    text.push('\n');
    text
}

fn field_path(error: &InstanceError) -> String {
    match *error {
        InstanceError::NegativeCapacity { .. } => "capacity".into(),
        InstanceError::InitialStockOutOfRange { .. } => "initial_stock".into(),
        InstanceError::EmptyHorizon => "demand".into(),
        InstanceError::VisitEpochOutOfRange { index, .. }
        | InstanceError::VisitEpochsNotIncreasing { index, .. } => {
            format!("visits[{index}].epoch")
        }
        InstanceError::NegativeLoad { index, .. }
        | InstanceError::LoadExceedsVehicleCapacity { index, .. } => {
            format!("visits[{index}].load")
        }
        InstanceError::NegativeVehicleCapacity { index, .. } => {
            format!("visits[{index}].capacity")
        }
    }
}

/// Exact header of a trajectory export.
pub const TRAJECTORY_HEADER: &str =
    "epoch,demand,intervention,virtual_stock,surplus_loss,stockout_loss,stock";

/// Writes one row per epoch of the trajectory induced on `instance` by
/// `interventions` (which must have one entry per scheduled visit; epochs
/// without a visit show intervention 0).
pub fn write_trajectory<W: io::Write>(
    instance: &Instance,
    interventions: &[i64],
    trajectory: &BaseTrajectory,
    mut sink: W,
) -> io::Result<()> {
    debug_assert_eq!(interventions.len(), instance.visit_count());
    debug_assert_eq!(trajectory.len(), instance.horizon());
    writeln!(sink, "{TRAJECTORY_HEADER}")?;
    let mut next_visit = 0usize;
    let visits = instance.visits();
    for epoch in 1..=instance.horizon() {
        let mut intervention = 0i64;
        if next_visit < visits.len() && visits[next_visit].epoch == epoch {
            intervention = interventions[next_visit];
            next_visit += 1;
        }
        let i = epoch - 1;
        writeln!(
            sink,
            "{epoch},{},{intervention},{},{},{},{}",
            instance.demand()[i],
            trajectory.virtual_stock[i],
            trajectory.surplus_loss[i],
            trajectory.stockout_loss[i],
            trajectory.stock[i],
        )?;
    }
    Ok(())
}

/// How the generator chooses the initial stock.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialStockPolicy {
    Fixed(i64),
    /// Uniform on `[0, station_capacity]`.
    Uniform,
}

/// Parameters of [`generate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub epochs: usize,
    pub visit_count: usize,
    pub station_capacity: i64,
    /// Inclusive range the per-epoch demands are drawn from.
    pub demand_range: (i64, i64),
    /// Inclusive range the vehicle capacities are drawn from; each load is
    /// then uniform on `[0, capacity]`.
    pub vehicle_capacity_range: (i64, i64),
    pub seed: u64,
    pub initial_stock_policy: InitialStockPolicy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenerateError {
    ZeroEpochs,
    TooManyVisits { visits: usize, epochs: usize },
    NegativeStationCapacity { capacity: i64 },
    EmptyDemandRange { low: i64, high: i64 },
    BadVehicleCapacityRange { low: i64, high: i64 },
    FixedStockOutOfRange { stock: i64, capacity: i64 },
}

impl fmt::Display for GenerateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GenerateError::ZeroEpochs => write!(f, "at least one epoch is required"),
            GenerateError::TooManyVisits { visits, epochs } => {
                write!(f, "{visits} visits do not fit into {epochs} epochs")
            }
            GenerateError::NegativeStationCapacity { capacity } => {
                write!(f, "station capacity must be non-negative, got {capacity}")
            }
            GenerateError::EmptyDemandRange { low, high } => {
                write!(f, "demand range [{low}, {high}] is empty")
            }
            GenerateError::BadVehicleCapacityRange { low, high } => write!(
                f,
                "vehicle capacity range [{low}, {high}] must satisfy 0 <= low <= high"
            ),
            GenerateError::FixedStockOutOfRange { stock, capacity } => {
                write!(f, "fixed initial stock {stock} outside [0, {capacity}]")
            }
        }
    }
}

impl Error for GenerateError {}

/// Draws a random instance, a pure function of the seed.
pub fn generate(config: &GeneratorConfig) -> Result<Instance, GenerateError> {
    if config.epochs == 0 {
        return Err(GenerateError::ZeroEpochs);
    }
    if config.visit_count > config.epochs {
        return Err(GenerateError::TooManyVisits {
            visits: config.visit_count,
            epochs: config.epochs,
        });
    }
    if config.station_capacity < 0 {
        return Err(GenerateError::NegativeStationCapacity {
            capacity: config.station_capacity,
        });
    }
    let (demand_low, demand_high) = config.demand_range;
    if demand_low > demand_high {
        return Err(GenerateError::EmptyDemandRange {
            low: demand_low,
            high: demand_high,
        });
    }
    let (vehicle_low, vehicle_high) = config.vehicle_capacity_range;
    if vehicle_low < 0 || vehicle_low > vehicle_high {
        return Err(GenerateError::BadVehicleCapacityRange {
            low: vehicle_low,
            high: vehicle_high,
        });
    }
    if let InitialStockPolicy::Fixed(stock) = config.initial_stock_policy {
        if stock < 0 || stock > config.station_capacity {
            return Err(GenerateError::FixedStockOutOfRange {
                stock,
                capacity: config.station_capacity,
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let initial_stock = match config.initial_stock_policy {
        InitialStockPolicy::Fixed(stock) => stock,
        InitialStockPolicy::Uniform => rng.gen_range(0..=config.station_capacity),
    };
    let demand: Vec<i64> = (0..config.epochs)
        .map(|_| rng.gen_range(demand_low..=demand_high))
        .collect();

    let mut epochs: Vec<usize> =
        rand::seq::index::sample(&mut rng, config.epochs, config.visit_count)
            .into_iter()
            .map(|i| i + 1)
            .collect();
    epochs.sort_unstable();

    let visits: Vec<Visit> = epochs
        .into_iter()
        .map(|epoch| {
            let vehicle_capacity = rng.gen_range(vehicle_low..=vehicle_high);
            let load = rng.gen_range(0..=vehicle_capacity);
            Visit::new(epoch, load, vehicle_capacity)
        })
        .collect();

    Ok(
        Instance::new(config.station_capacity, initial_stock, demand, visits)
            .expect("generated instances satisfy the model invariants"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::simulate;

    #[test]
    fn minimal_document_round_trips() {
        let inst =
            read_instance(r#"{"capacity":1,"initial_stock":0,"demand":[0],"visits":[]}"#).unwrap();
        assert_eq!(inst.horizon(), 1);
        assert_eq!(inst.visit_count(), 0);
        let text = write_instance(&inst);
        assert_eq!(read_instance(&text).unwrap(), inst);
    }

    #[test]
    fn duplicate_epochs_name_the_field() {
        let err = read_instance(
            r#"{"capacity":5,"initial_stock":0,"demand":[0,0,0],
                "visits":[{"epoch":3,"load":0,"capacity":1},{"epoch":3,"load":0,"capacity":1}]}"#,
        )
        .unwrap_err();
        match err {
            ReadError::Invalid { path, .. } => assert_eq!(path, "visits[1].epoch"),
            other => panic!("expected a validation error, got {other}"),
        }
    }

    #[test]
    fn overloaded_vehicle_names_the_field() {
        let err = read_instance(
            r#"{"capacity":5,"initial_stock":0,"demand":[0],
                "visits":[{"epoch":1,"load":7,"capacity":5}]}"#,
        )
        .unwrap_err();
        match err {
            ReadError::Invalid { path, message } => {
                assert_eq!(path, "visits[0].load");
                assert!(message.contains("exceeds vehicle capacity"));
            }
            other => panic!("expected a validation error, got {other}"),
        }
    }

    #[test]
    fn excessive_initial_stock_names_the_field() {
        let err =
            read_instance(r#"{"capacity":3,"initial_stock":4,"demand":[0],"visits":[]}"#)
                .unwrap_err();
        match err {
            ReadError::Invalid { path, .. } => assert_eq!(path, "initial_stock"),
            other => panic!("expected a validation error, got {other}"),
        }
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        assert!(matches!(
            read_instance("{"),
            Err(ReadError::Parse(_))
        ));
        assert!(matches!(
            read_instance(r#"{"capacity":1,"initial_stock":0,"demand":[0],"visits":[],"extra":1}"#),
            Err(ReadError::Parse(_))
        ));
    }

    #[test]
    fn trajectory_rows_carry_the_interventions() {
        let inst = Instance::new(
            10,
            5,
            vec![1, -2, 0],
            vec![Visit::new(2, 4, 6)],
        )
        .unwrap();
        let (traj, _) = simulate(&inst, &[4]).unwrap();
        let mut out = Vec::new();
        write_trajectory(&inst, &[4], &traj, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], TRAJECTORY_HEADER);
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1], "1,1,0,6,0,0,6");
        assert_eq!(lines[2], "2,-2,4,8,0,0,8");
        assert_eq!(lines[3], "3,0,0,8,0,0,8");
    }

    #[test]
    fn same_seed_reproduces_the_instance() {
        let config = GeneratorConfig {
            epochs: 40,
            visit_count: 7,
            station_capacity: 12,
            demand_range: (-9, 9),
            vehicle_capacity_range: (0, 5),
            seed: 1234,
            initial_stock_policy: InitialStockPolicy::Uniform,
        };
        let a = generate(&config).unwrap();
        let b = generate(&config).unwrap();
        assert_eq!(a, b);
        assert_eq!(write_instance(&a), write_instance(&b));

        let other = generate(&GeneratorConfig {
            seed: 1235,
            ..config
        })
        .unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn generated_instances_are_always_valid() {
        for seed in 0..50 {
            let config = GeneratorConfig {
                epochs: 1 + (seed as usize % 13),
                visit_count: seed as usize % 4,
                station_capacity: (seed % 7) as i64,
                demand_range: (-8, 8),
                vehicle_capacity_range: (0, 4),
                seed,
                initial_stock_policy: InitialStockPolicy::Uniform,
            };
            let config = GeneratorConfig {
                visit_count: config.visit_count.min(config.epochs),
                ..config
            };
            // Instance::new re-validates everything; generate unwraps it.
            let inst = generate(&config).unwrap();
            assert!(inst.visit_count() <= 3);
        }
    }

    #[test]
    fn zero_visits_and_flat_demand_are_expressible() {
        let config = GeneratorConfig {
            epochs: 5,
            visit_count: 0,
            station_capacity: 3,
            demand_range: (0, 0),
            vehicle_capacity_range: (0, 2),
            seed: 9,
            initial_stock_policy: InitialStockPolicy::Fixed(2),
        };
        let inst = generate(&config).unwrap();
        assert_eq!(inst.visit_count(), 0);
        assert!(inst.demand().iter().all(|&d| d == 0));
        assert_eq!(inst.initial_stock(), 2);
    }

    #[test]
    fn config_validation_rejects_bad_parameters() {
        let base = GeneratorConfig {
            epochs: 5,
            visit_count: 0,
            station_capacity: 3,
            demand_range: (-1, 1),
            vehicle_capacity_range: (0, 2),
            seed: 0,
            initial_stock_policy: InitialStockPolicy::Uniform,
        };
        assert_eq!(
            generate(&GeneratorConfig {
                epochs: 0,
                ..base.clone()
            }),
            Err(GenerateError::ZeroEpochs)
        );
        assert_eq!(
            generate(&GeneratorConfig {
                visit_count: 6,
                ..base.clone()
            }),
            Err(GenerateError::TooManyVisits {
                visits: 6,
                epochs: 5
            })
        );
        assert_eq!(
            generate(&GeneratorConfig {
                demand_range: (2, -2),
                ..base.clone()
            }),
            Err(GenerateError::EmptyDemandRange { low: 2, high: -2 })
        );
        assert_eq!(
            generate(&GeneratorConfig {
                initial_stock_policy: InitialStockPolicy::Fixed(9),
                ..base
            }),
            Err(GenerateError::FixedStockOutOfRange {
                stock: 9,
                capacity: 3
            })
        );
    }
}
