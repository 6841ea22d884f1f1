//! Exact and approximate real-zero counting.

mod descartes;
pub(crate) mod interval_arith;
mod interval;
mod kac;
pub(crate) mod sturm;
mod subdivision;

pub use descartes::{descartes_positive_bound, DescartesBound};
pub use interval::{Endpoint, Interval, Region};
pub use interval_arith::Iv;
pub use kac::kac_estimate;
pub use sturm::{
    cauchy_bound, make_primitive, sturm_count, sturm_count_regions, CountMethod, RegionCounts,
    SturmSequence, ZeroCount,
};
pub use subdivision::{
    circuit_enclosure, subdivision_count, subdivision_count_regions, DEFAULT_SUBDIVISION_TOL,
};
