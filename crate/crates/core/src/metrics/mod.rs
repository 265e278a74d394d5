//! Regions, conformal metrics, derivative norms and infimum scans.

mod metric;
mod region;
mod sampler;
mod scan;

pub use metric::{deriv_norm, deriv_norm_composite, ConformalMetric, MetricKind};
pub use region::{Disc, Region};
pub use sampler::SamplerConfig;
pub(crate) use scan::run_scan;
pub use scan::{eta_omega_scan, eta_scan, poly_decay_scan, spherical_expansion_scan, ScanReport};
