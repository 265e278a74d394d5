use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::catalog::CriticalFamily;
use crate::{EntireMap, C64};

/// Sample-set configuration shared by the infimum scans.
///
/// The base set is an exponential annular grid (radii `r_min·2^(k/steps_per_octave)`,
/// `angles` equally spaced arguments starting on the positive real axis) plus
/// targeted probes at critical points, plus local refinement patches around
/// the current witnesses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub r_min: f64,
    pub r_max: f64,
    pub steps_per_octave: u32,
    pub angles: u32,
    /// Critical-point probes per threshold (and per sign of the lattice index).
    pub probes: usize,
    pub refine_rounds: u32,
    pub use_grid: bool,
    /// Asymptotic curves are traced until `|z|` reaches this modulus.
    pub curve_modulus: f64,
    /// Number of tracts over the singular value whose asymptotic curves are sampled.
    pub curve_tracts: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            r_min: 1e-2,
            r_max: 1e3,
            steps_per_octave: 8,
            angles: 256,
            probes: 64,
            refine_rounds: 3,
            use_grid: true,
            curve_modulus: 60.0,
            curve_tracts: 2,
        }
    }
}

impl SamplerConfig {
    pub fn radial_factor(&self) -> f64 {
        2f64.powf(1.0 / self.steps_per_octave as f64)
    }

    pub fn angle_step(&self) -> f64 {
        TAU / self.angles as f64
    }

    pub fn grid(&self) -> Vec<C64> {
        if !self.use_grid {
            return Vec::new();
        }
        let mut points = Vec::new();
        let factor = self.radial_factor();
        let mut k = 0;
        loop {
            let r = self.r_min * factor.powi(k);
            if r > self.r_max * (1.0 + 1e-12) {
                break;
            }
            points.extend((0..self.angles).map(|j| C64::from_polar(r, self.angle_step() * j as f64)));
            k += 1;
        }
        points
    }

    /// Critical points whose critical values have modulus above `min_value_modulus`.
    ///
    /// For the `2πin` lattice this returns the `probes` smallest such `|n|` of
    /// each sign; finite families are returned whole.
    pub fn critical_probes(&self, map: &EntireMap, min_value_modulus: f64) -> Vec<C64> {
        match map.singular_values().critical_points {
            CriticalFamily::None => Vec::new(),
            CriticalFamily::Finite(points) => points,
            CriticalFamily::TwoPiLattice => {
                let spacing = TAU * map.lambda.norm();
                let v0 = map.critical_value(0).norm();
                let n0 = ((min_value_modulus - v0) / spacing).floor().max(0.0) as i64;
                (n0..n0 + self.probes as i64)
                    .flat_map(|n| [n, -n])
                    .filter(|&n| map.critical_value(n).norm() > min_value_modulus)
                    .map(|n| C64::new(0.0, TAU * n as f64))
                    .collect()
            }
        }
    }

    /// Local polar patch around `z` at refinement level `round`.
    pub(crate) fn patch(&self, z: C64, round: u32) -> Vec<C64> {
        let (r, theta) = z.to_polar();
        if r == 0.0 {
            return Vec::new();
        }
        let shrink = 8f64.powi(round as i32);
        let log_factor = self.radial_factor().ln() / shrink;
        let dtheta = self.angle_step() / shrink;
        let mut points = Vec::with_capacity(17 * 17);
        for i in -8..=8 {
            let radius = r * (log_factor * i as f64 / 8.0).exp();
            for j in -8..=8 {
                points.push(C64::from_polar(radius, theta + dtheta * j as f64 / 8.0));
            }
        }
        points
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_covers_the_configured_annulus() {
        let cfg = SamplerConfig::default();
        let grid = cfg.grid();
        // 1e-2 .. 1e3 is log2(1e5) ≈ 16.6 octaves at 8 steps each
        assert_eq!(grid.len(), 133 * 256);
        let max = grid.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(max <= 1e3 && max > 900.0);
        assert!(grid.contains(&C64::new(1e-2, 0.0)));
    }

    #[test]
    fn lattice_probes_have_large_critical_values() {
        let cfg = SamplerConfig::default();
        let f1 = EntireMap::f1();
        let probes = cfg.critical_probes(&f1, 1e4);
        assert!(!probes.is_empty());
        for c in &probes {
            assert!(f1.evaluate(*c).finite().unwrap().norm() > 1e4);
        }
        // n = 1592 is the first index with |2 + 2πin| > 1e4
        assert!(probes.contains(&C64::new(0.0, TAU * 1592.0)));
        assert!(!probes.contains(&C64::new(0.0, TAU * 1591.0)));
    }
}
