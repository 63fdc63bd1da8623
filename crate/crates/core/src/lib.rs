pub mod arborescence;
pub mod config_model;
pub mod count;
pub mod det;
pub mod error;
pub mod euler;
pub mod experiments;
pub mod graph;
pub mod naive;
pub mod report;
pub mod rng;
pub mod stats;
pub mod verify;

pub use arborescence::{count_arbs_rooted, count_arbs_total, enumerate_arbs, sample_arb_uniform, Arborescence};
pub use config_model::{
    enumerate_configurations, forest_config_count_bruteforce, forest_config_count_formula, is_simple, project,
    sample_configuration, sample_simple_eulerian, Configuration, PartialConfig,
};
pub use count::{Count, Ratio};
pub use error::{Error, Result};
pub use euler::{best_count, enumerate_tours, tour_to_ts, ts_to_tour, sample_tour_uniform, EulerTour, TransitionSystem};
pub use graph::{count_double_arcs, count_loops, count_short_cycles, is_eulerian, Arc, DegreeSequence, Multigraph};
pub use naive::{acceptance_probability_exact, approximate, sample_naive};
