//! Tracts over a disc tangent to an asymptotic value.
//!
//! For a disc `D` tangent to `s` the preimage components of `D` are mapped
//! univalently onto `D`. Near `s` the values `f(z)` under- or overflow long
//! before the tract geometry gets interesting, so membership and inverse
//! branches are computed in logarithmic coordinates `u = log(w - s)`. In
//! these coordinates `D` is the convex set `Re u < log(2r cos(Im u - α))`,
//! where `α` is the direction from `s` to the centre of `D`.

use std::f64::consts::{FRAC_PI_2, TAU};

use rayon::prelude::*;

use super::continuation::{polyline_csv, AsymptoticCurve};
use super::track::newton_solve;
use crate::catalog::MapKind;
use crate::{Disc, EntireMap, Error, Result, C64};

const ANGULAR_SAMPLES: usize = 4096;
const BOUNDARY_SAMPLES: usize = 128;
const MAX_TRACK_STEPS: usize = 100_000;

/// The disc of radius `dist(s, ∂U)/2` with `s` on its boundary, lying on the
/// side of `s` facing the centre of `U` (the positive real side when `s` is the centre).
pub fn tangent_disc(s: C64, u: &Disc) -> Disc {
    let radius = 0.5 * (u.radius - (s - u.center).norm());
    let offset = u.center - s;
    let direction = if offset.norm() > 0.0 {
        offset / offset.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    Disc::new(s + direction * radius, radius)
}

/// Branch labels passed to [`EntireMap::tract_seeds`] that land on distinct tracts.
pub fn tract_branch_indices(map: &EntireMap, count: usize) -> Vec<i64> {
    let count = count as i64;
    match map.kind {
        MapKind::ModelF1 | MapKind::ModelF2 => (1..=count).collect(),
        _ => (0..count).collect(),
    }
}

/// `log(f(z) - s)` (imaginary part modulo 2π) and its derivative.
fn log_offset(map: &EntireMap, s: C64, z: C64) -> Option<(C64, C64)> {
    if s == C64::new(0.0, 0.0) {
        if let Some(v) = map.log_value(z) {
            return Some(v);
        }
    }
    let fz = map.evaluate(z).finite()?;
    let dz = map.derivative(z).finite()?;
    let gap = fz - s;
    if gap.norm() == 0.0 {
        return None;
    }
    Some((gap.ln(), dz / gap))
}

fn wrap_imag(u: C64) -> C64 {
    C64::new(u.re, u.im - TAU * (u.im / TAU).round())
}

/// Newton on `log(f(z) - s) = u`, ignoring multiples of 2πi.
fn log_newton(map: &EntireMap, s: C64, u: C64, guess: C64) -> Option<C64> {
    let mut z = guess;
    for _ in 0..12 {
        let (value, slope) = log_offset(map, s, z)?;
        if slope.norm() == 0.0 {
            return None;
        }
        let step = wrap_imag(value - u) / slope;
        z -= step;
        if !z.is_finite() {
            return None;
        }
        if step.norm() <= 1e-14 * (1.0 + z.norm()) {
            return Some(z);
        }
    }
    None
}

/// Predictor-corrector continuation of `z` with `log(f(z) - s) = path(t)`.
fn track_log(map: &EntireMap, s: C64, z0: C64, path: impl Fn(f64) -> C64) -> Option<C64> {
    let mut t = 0.0;
    let mut z = z0;
    let mut h: f64 = 1.0 / 16.0;
    let mut steps = 0;
    while t < 1.0 {
        h = h.min(1.0 - t);
        let t_next = if h >= 1.0 - t { 1.0 } else { t + h };
        let (_, slope) = log_offset(map, s, z)?;
        let predicted = z + (path(t_next) - path(t)) / slope;
        let accepted = log_newton(map, s, path(t_next), predicted).filter(|&zn| {
            (zn - predicted).norm() <= 0.1 * (zn - z).norm() + 1e-13 * (1.0 + zn.norm())
                && log_offset(map, s, zn).is_some_and(|(_, d)| (d - slope).norm() <= 0.5 * slope.norm())
        });
        steps += 1;
        if steps > MAX_TRACK_STEPS {
            return None;
        }
        match accepted {
            Some(zn) => {
                z = zn;
                t = t_next;
                h = (h * 1.5).min(0.125);
            }
            None => {
                h *= 0.5;
                if h < 1e-14 {
                    return None;
                }
            }
        }
    }
    Some(z)
}

/// One preimage component of a disc tangent to an asymptotic value.
#[derive(Debug, Clone, PartialEq)]
pub struct Tract {
    pub map: EntireMap,
    pub disc: Disc,
    /// The asymptotic value where `disc` touches.
    pub tangency: C64,
    pub branch_index: i64,
    /// Preimage of the disc centre in this tract.
    pub seed: C64,
    /// Image of `∂disc` minus a small arc at the tangency point.
    pub boundary: Vec<C64>,
    /// Angle of each boundary point as seen from the tangency point, relative to the disc direction.
    pub boundary_params: Vec<f64>,
    /// Smallest modulus accepted by [`tract_angular_measure`].
    pub min_radius: f64,
}

impl Tract {
    fn direction(&self) -> f64 {
        (self.disc.center - self.tangency).arg()
    }

    fn u_center(&self) -> C64 {
        C64::new(self.disc.radius.ln(), self.direction())
    }

    /// Logarithmic coordinate of `w - s`, branch continuous on the disc.
    fn u_of_log(&self, log: C64) -> C64 {
        let alpha = self.direction();
        C64::new(
            log.re,
            alpha + (log.im - alpha) - TAU * ((log.im - alpha) / TAU).round(),
        )
    }

    fn u_in_disc(&self, u: C64) -> bool {
        let phi = u.im - self.direction();
        phi.abs() < FRAC_PI_2 && u.re < (2.0 * self.disc.radius * phi.cos()).ln()
    }

    fn branch_log(&self, u: C64) -> Option<C64> {
        let u0 = self.u_center();
        track_log(&self.map, self.tangency, self.seed, |t| u0 + (u - u0) * t)
    }

    /// The inverse branch of this tract at `w ∈ disc`.
    pub fn branch(&self, w: C64) -> Option<C64> {
        if !self.disc.contains(w) {
            return None;
        }
        self.branch_log(self.u_of_log((w - self.tangency).ln()))
    }

    pub fn contains(&self, z: C64) -> bool {
        let Some((log, _)) = log_offset(&self.map, self.tangency, z) else {
            return false;
        };
        let u = self.u_of_log(log);
        if !self.u_in_disc(u) {
            return false;
        }
        self.branch_log(u)
            .is_some_and(|back| (back - z).norm() <= 1e-8 * (1.0 + z.norm()))
    }

    pub fn boundary_csv(&self) -> String {
        polyline_csv(&self.boundary_params, &self.boundary)
    }
}

fn boundary_u(disc: &Disc, alpha: f64, phi: f64) -> C64 {
    C64::new((2.0 * disc.radius * phi.cos()).ln(), alpha + phi)
}

fn trace_boundary(map: &EntireMap, s: C64, disc: &Disc, seed: C64) -> Option<(Vec<f64>, Vec<C64>)> {
    let alpha = (disc.center - s).arg();
    let u0 = C64::new(disc.radius.ln(), alpha);
    let far = boundary_u(disc, alpha, 0.0);
    let antipode = track_log(map, s, seed, |t| u0 + (far - u0) * t)?;
    let phi_max = FRAC_PI_2 - 1e-3;
    let mut sides = Vec::new();
    for sign in [-1.0, 1.0] {
        let mut z = antipode;
        let mut side = vec![(0.0, antipode)];
        for j in 1..=BOUNDARY_SAMPLES {
            let (a, b) = (
                phi_max * (j - 1) as f64 / BOUNDARY_SAMPLES as f64,
                phi_max * j as f64 / BOUNDARY_SAMPLES as f64,
            );
            z = track_log(map, s, z, |t| boundary_u(disc, alpha, sign * (a + (b - a) * t)))?;
            side.push((sign * b, z));
        }
        sides.push(side);
    }
    let mut points: Vec<(f64, C64)> = sides[0].iter().rev().copied().collect();
    points.extend(sides[1].iter().skip(1));
    Some(points.into_iter().unzip())
}

/// `count` disjoint tracts over the disc tangent to `s` inside `u`.
pub fn discs_of_univalence(map: &EntireMap, s: C64, u: Disc, count: usize) -> Result<Vec<Tract>> {
    if count == 0 {
        return Err(Error::precondition("tract count must be at least 1"));
    }
    if !u.contains(s) {
        return Err(Error::precondition(format!("{s} is not inside the disc U")));
    }
    let data = map.singular_values();
    if let Some(&v) = data.critical_values_in_disc(u.center, u.radius).first() {
        return Err(Error::UContainsCriticalValues(v));
    }
    if !data.is_asymptotic_value(s, 1e-12) {
        return Err(Error::NotIsolatedSingularValue(s));
    }
    let disc = tangent_disc(s, &u);
    let indices = tract_branch_indices(map, count);
    let seeds = map
        .tract_seeds(disc.center, indices.iter().copied())
        .ok_or_else(|| Error::precondition(format!("{map} has no logarithmic tracts")))?;
    indices
        .into_par_iter()
        .zip(seeds)
        .map(|(branch_index, guess)| {
            let seed = newton_solve(map, disc.center, guess, 50).ok_or(Error::NonConvergence(guess))?;
            let (boundary_params, boundary) = trace_boundary(map, s, &disc, seed).ok_or(Error::NonConvergence(seed))?;
            Ok(Tract {
                map: *map,
                disc,
                tangency: s,
                branch_index,
                seed,
                boundary,
                boundary_params,
                min_radius: seed.norm(),
            })
        })
        .collect()
}

/// Angular measure of `{θ : x e^{iθ} ∈ tract}`.
///
/// Membership is sampled at `2π/4096`; every change of membership between
/// neighbouring samples is then located by bisection.
pub fn tract_angular_measure(tract: &Tract, x: f64) -> Result<f64> {
    if !(x >= tract.min_radius) {
        return Err(Error::RadiusTooSmall {
            radius: x,
            min_radius: tract.min_radius,
        });
    }
    let step = TAU / ANGULAR_SAMPLES as f64;
    let inside = |theta: f64| tract.contains(C64::from_polar(x, theta));
    let flags: Vec<bool> = (0..ANGULAR_SAMPLES)
        .into_par_iter()
        .map(|j| inside(j as f64 * step))
        .collect();
    if flags.iter().all(|&f| f) {
        return Ok(TAU);
    }
    // (angle, entering) for each membership change, in increasing angle.
    let mut changes: Vec<(f64, bool)> = (0..ANGULAR_SAMPLES)
        .into_par_iter()
        .filter_map(|j| {
            let k = (j + 1) % ANGULAR_SAMPLES;
            if flags[j] == flags[k] {
                return None;
            }
            let (mut lo, mut hi) = (j as f64 * step, (j + 1) as f64 * step);
            for _ in 0..40 {
                let mid = 0.5 * (lo + hi);
                if inside(mid) == flags[j] {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Some((0.5 * (lo + hi), !flags[j]))
        })
        .collect();
    if let Some(&(theta, false)) = changes.first() {
        changes.remove(0);
        changes.push((theta + TAU, false));
    }
    Ok(changes
        .chunks(2)
        .map(|pair| if pair.len() == 2 { pair[1].0 - pair[0].0 } else { 0.0 })
        .sum())
}

/// `(|z|, (1+|z|^τ)|f'(z)|)` along the curve; samples where `f'` overflows are skipped.
pub fn decay_along_curve(map: &EntireMap, curve: &AsymptoticCurve, tau: f64) -> Vec<(f64, f64)> {
    curve
        .samples
        .iter()
        .filter_map(|&z| {
            let d = map.derivative(z).finite()?;
            let r = z.norm();
            Some((r, (1.0 + r.powf(tau)) * d.norm()))
        })
        .collect()
}

/// Smallest distance between boundary samples of distinct tracts.
pub fn min_pairwise_boundary_distance(tracts: &[Tract]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in tracts.iter().enumerate() {
        for b in &tracts[i + 1..] {
            for p in &a.boundary {
                for q in &b.boundary {
                    best = best.min((p - q).norm());
                }
            }
        }
    }
    best
}
