//! Predictor-corrector tracking of a preimage along a path of values.

use crate::{EntireMap, C64};

#[derive(Debug, Clone, Copy)]
pub(crate) struct TrackConfig {
    pub min_derivative: f64,
    pub divergence_modulus: f64,
    pub max_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum TrackFailure {
    /// Step size collapsed; the last good preimage is attached.
    Stalled(C64),
    SmallDerivative(C64),
    Diverged(C64),
    Overflow(C64),
    Budget,
}

/// One Newton solve of `f(z) = target` from `guess`.
pub(crate) fn newton_solve(map: &EntireMap, target: C64, guess: C64, max_iter: usize) -> Option<C64> {
    let mut z = guess;
    for _ in 0..max_iter {
        let fz = map.evaluate(z).finite()?;
        let dz = map.derivative(z).finite()?;
        if dz.norm() == 0.0 {
            return None;
        }
        let step = (fz - target) / dz;
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

/// Follows the preimage of `path(t)`, `t ∈ [0, 1]`, starting from `z0` with
/// `f(z0) = path(0)`.  Every accepted sample is passed to `visit`.
pub(crate) fn track_with(
    map: &EntireMap,
    z0: C64,
    path: impl Fn(f64) -> C64,
    cfg: &TrackConfig,
    steps: &mut usize,
    mut visit: impl FnMut(f64, C64, C64),
) -> Result<C64, TrackFailure> {
    let mut t = 0.0;
    let mut z = z0;
    let mut h: f64 = 1.0 / 16.0;
    while t < 1.0 {
        h = h.min(1.0 - t);
        let t_next = if h >= 1.0 - t { 1.0 } else { t + h };
        let (w_old, w_new) = (path(t), path(t_next));
        let slope = map.derivative(z).finite().ok_or(TrackFailure::Overflow(z))?;
        if slope.norm() < cfg.min_derivative {
            return Err(TrackFailure::SmallDerivative(z));
        }
        let predicted = z + (w_new - w_old) / slope;
        // Accept only steps over which f' is nearly constant; otherwise
        // Newton may settle on a neighbouring preimage.
        let accepted = newton_solve(map, w_new, predicted, 12).filter(|&zn| {
            (zn - predicted).norm() <= 0.1 * (zn - z).norm() + 1e-13 * (1.0 + zn.norm())
                && map
                    .derivative(zn)
                    .finite()
                    .is_some_and(|d| (d - slope).norm() <= 0.5 * slope.norm())
        });
        *steps += 1;
        if *steps > cfg.max_steps {
            return Err(TrackFailure::Budget);
        }
        match accepted {
            Some(zn) => {
                z = zn;
                t = t_next;
                if z.norm() > cfg.divergence_modulus {
                    return Err(TrackFailure::Diverged(z));
                }
                visit(t, w_new, z);
                h = (h * 1.5).min(0.125);
            }
            None => {
                h *= 0.5;
                if h < 1e-14 {
                    return Err(TrackFailure::Stalled(z));
                }
            }
        }
    }
    let slope = map.derivative(z).finite().ok_or(TrackFailure::Overflow(z))?;
    if slope.norm() < cfg.min_derivative {
        return Err(TrackFailure::SmallDerivative(z));
    }
    Ok(z)
}

pub(crate) fn track(
    map: &EntireMap,
    z0: C64,
    path: impl Fn(f64) -> C64,
    cfg: &TrackConfig,
    steps: &mut usize,
) -> Result<C64, TrackFailure> {
    track_with(map, z0, path, cfg, steps, |_, _, _| {})
}

/// Tracks along the straight segment from `from` to `to`.
pub(crate) fn track_segment(
    map: &EntireMap,
    z0: C64,
    from: C64,
    to: C64,
    cfg: &TrackConfig,
    steps: &mut usize,
) -> Result<C64, TrackFailure> {
    track(map, z0, |t| from + (to - from) * t, cfg, steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const CFG: TrackConfig = TrackConfig {
        min_derivative: 1e-10,
        divergence_modulus: 1e6,
        max_steps: 1_000_000,
    };

    #[test]
    fn tracks_the_logarithm_around_a_half_circle() {
        let exp = EntireMap::lambda_exp(C64::new(1.0, 0.0));
        let mut steps = 0;
        let z = track(
            &exp,
            C64::new(0.0, 0.0),
            |t| C64::from_polar(1.0, PI * t),
            &CFG,
            &mut steps,
        )
        .unwrap();
        assert!((z - C64::new(0.0, PI)).norm() < 1e-12);
    }

    #[test]
    fn full_loop_around_zero_exposes_monodromy() {
        let exp = EntireMap::lambda_exp(C64::new(1.0, 0.0));
        let mut steps = 0;
        let z = track(
            &exp,
            C64::new(0.0, 0.0),
            |t| C64::from_polar(1.0, 2.0 * PI * t),
            &CFG,
            &mut steps,
        )
        .unwrap();
        assert!((z - C64::new(0.0, 2.0 * PI)).norm() < 1e-12);
    }

    #[test]
    fn budget_is_enforced() {
        let exp = EntireMap::lambda_exp(C64::new(1.0, 0.0));
        let cfg = TrackConfig { max_steps: 3, ..CFG };
        let mut steps = 0;
        let r = track(
            &exp,
            C64::new(0.0, 0.0),
            |t| C64::from_polar(1.0, 2.0 * PI * t),
            &cfg,
            &mut steps,
        );
        assert_eq!(r, Err(TrackFailure::Budget));
    }
}
