//! Fixtures shared by the benchmarks.

use tefdyn::raster::{Classifier, RasterConfig, Viewport};
use tefdyn::{EntireMap, SamplerConfig, C64};

/// Points on a spiral through the region where the catalog maps are evaluated.
pub fn spiral(n: usize) -> Vec<C64> {
    (0..n)
        .map(|k| {
            let t = k as f64 / n as f64;
            C64::from_polar(0.1 + 40.0 * t, 37.0 * t)
        })
        .collect()
}

/// The figure viewport for `f2` at a reduced size.
pub fn basin_render(size: usize) -> RasterConfig {
    let mut cfg = RasterConfig::new(EntireMap::f2(), Viewport::new(-3.0, 9.0, -13.0, 13.0), size, size);
    cfg.classifier = Classifier::FixedPointBasins;
    cfg
}

/// A coarser sampler than the default, for per-iteration timings.
pub fn light_sampler() -> SamplerConfig {
    SamplerConfig {
        angles: 64,
        steps_per_octave: 4,
        probes: 16,
        ..SamplerConfig::default()
    }
}
