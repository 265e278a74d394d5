//! Parameters `λ` near 1 at which a critical point of `λf_p` lands on a
//! repelling fixed point after two steps.
//!
//! For `f_λ = λf_p` the points `z_n = 2πin` are critical. The repelling fixed
//! point `φ(λ)` of `f_λ` is continued from `λ = 1`, and roots of
//! `g(λ) = f_λ²(z_n) - φ(λ)` are counted with the argument principle and then
//! refined by a finite-difference Newton iteration.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{newton_fixed_point, FixedPointClass};
use crate::{EntireMap, Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPointSample {
    pub lambda: C64,
    pub phi: C64,
    pub multiplier: C64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPointPath {
    pub p: u8,
    pub samples: Vec<FixedPointSample>,
}

fn breakdown(lambda: C64, reason: impl Into<String>) -> Error {
    Error::ContinuationBreakdown {
        lambda,
        reason: reason.into(),
    }
}

/// Newton for a fixed point of `λf_p` seeded at `guess`, with the checks that
/// keep the continuation on one analytic branch.
fn corrector(p: u8, lambda: C64, guess: C64) -> Result<FixedPointSample> {
    let map = EntireMap::scaled_f(p, lambda)?;
    let phi = newton_fixed_point(&map, guess).map_err(|_| breakdown(lambda, "Newton corrector did not converge"))?;
    if (phi - guess).norm() > 0.5 {
        return Err(breakdown(lambda, format!("corrector jumped from {guess} to {phi}")));
    }
    let image = map.evaluate(phi).finite().ok_or(Error::OverflowAtPoint(phi))?;
    let residual = (image - phi).norm();
    if residual >= 1e-11 {
        return Err(breakdown(lambda, format!("fixed-point residual {residual:e}")));
    }
    let multiplier = map.derivative(phi).finite().ok_or(Error::OverflowAtPoint(phi))?;
    if (multiplier - 1.0).norm() <= 1e-3 {
        return Err(breakdown(lambda, "multiplier too close to 1"));
    }
    if multiplier.norm() <= 1.0 {
        return Err(breakdown(lambda, "fixed point stopped repelling"));
    }
    Ok(FixedPointSample {
        lambda,
        phi,
        multiplier,
    })
}

/// Continues the fixed point `start` of `f_p` along the parameters in `path`.
pub fn continue_fixed_point(p: u8, start: C64, path: &[C64]) -> Result<FixedPointPath> {
    let base = EntireMap::scaled_f(p, C64::new(1.0, 0.0))?;
    let image = base.evaluate(start).finite().ok_or(Error::OverflowAtPoint(start))?;
    if (image - start).norm() > 1e-8 {
        return Err(Error::precondition(format!("{start} is not a fixed point of f{p}")));
    }
    let m = base.derivative(start).finite().ok_or(Error::OverflowAtPoint(start))?;
    if (m - 1.0).norm() <= 1e-3 {
        return Err(Error::precondition("start multiplier is too close to 1"));
    }
    let mut phi = start;
    let mut samples = Vec::with_capacity(path.len());
    for &lambda in path {
        let sample = corrector(p, lambda, phi)?;
        phi = sample.phi;
        samples.push(sample);
    }
    Ok(FixedPointPath { p, samples })
}

/// The repelling fixed point of `f_p` continued by the instability search.
pub fn repelling_start(p: u8) -> Result<C64> {
    match p {
        1 => Ok(C64::new(0.0, PI)),
        // e^{-z} = 1 - 2πi, multiplier 2πi
        3 => Ok(-C64::new(1.0, -TAU).ln()),
        2 => Err(Error::precondition("every fixed point of f2 is superattracting")),
        _ => Err(Error::precondition(format!("no map f{p}"))),
    }
}

/// `φ(λ)` by continuation along the segment from 1.
pub fn phi(p: u8, lambda: C64) -> Result<FixedPointSample> {
    let one = C64::new(1.0, 0.0);
    let steps = ((lambda - one).norm() / 1e-3).ceil().max(4.0) as usize;
    let path: Vec<C64> = (1..=steps)
        .map(|k| one + (lambda - one) * (k as f64 / steps as f64))
        .collect();
    let run = continue_fixed_point(p, repelling_start(p)?, &path)?;
    Ok(*run.samples.last().expect("non-empty path"))
}

/// `f_λ²(2πin)`.
pub fn psi2(p: u8, n: i64, lambda: C64) -> Result<C64> {
    let map = EntireMap::scaled_f(p, lambda)?;
    let z = C64::new(0.0, TAU * n as f64);
    let w = map.evaluate(z).finite().ok_or(Error::OverflowInChain(z))?;
    map.evaluate(w).finite().ok_or(Error::OverflowInChain(z))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindingResult {
    pub center: C64,
    pub radius: f64,
    pub winding: i64,
    pub min_boundary_modulus: f64,
    /// Boundary samples `(λ, g(λ))` in contour order, closed (last = first).
    #[serde(skip)]
    pub samples: Vec<(C64, C64)>,
}

impl WindingResult {
    /// `(1/2πi)∮ λ g'/g dλ`, i.e. the sum of the zeros inside, by the
    /// midpoint rule on the tracked logarithm.
    pub fn zero_sum(&self) -> C64 {
        let mut sum = C64::new(0.0, 0.0);
        for pair in self.samples.windows(2) {
            let ((a, ga), (b, gb)) = (pair[0], pair[1]);
            let dlog = (gb / ga).ln();
            sum += 0.5 * (a + b) * dlog;
        }
        sum / C64::new(0.0, TAU)
    }
}

const MAX_CONTOUR_POINTS: usize = 1 << 20;

/// Winding number of `g` around 0 along `|λ - center| = radius`.
///
/// Starting from `min_steps` equally spaced points, each arc is halved until
/// the argument of `g` changes by less than π/2 along it and along both of
/// its halves.
pub fn winding_number(
    g: &(dyn Fn(C64) -> Result<C64> + Sync),
    center: C64,
    radius: f64,
    min_steps: usize,
) -> Result<WindingResult> {
    if !(radius > 0.0) {
        return Err(Error::precondition("contour radius must be positive"));
    }
    let point = |t: f64| center + C64::from_polar(radius, TAU * t);
    let eval = |t: f64| -> Result<(f64, C64, C64)> {
        let lambda = point(t);
        let value = g(lambda)?;
        if value.norm() < 1e-12 {
            return Err(Error::ZeroOnContour(lambda));
        }
        Ok((t, lambda, value))
    };
    let n0 = min_steps.max(8);
    let initial: Vec<(f64, C64, C64)> = (0..=n0)
        .into_par_iter()
        .map(|k| eval(k as f64 / n0 as f64))
        .collect::<Result<_>>()?;
    let mut accepted: Vec<(f64, C64, C64)> = vec![initial[0]];
    let mut count = initial.len();
    let mut total = 0.0;
    for pair in initial.windows(2) {
        // Depth-first refinement of one initial arc, in contour order.
        let mut stack = vec![pair[1]];
        let mut left = pair[0];
        while let Some(right) = stack.pop() {
            if count >= MAX_CONTOUR_POINTS || right.0 - left.0 < 1e-15 {
                return Err(Error::StepLimitExceeded(count));
            }
            let mid = eval(0.5 * (left.0 + right.0))?;
            count += 1;
            let step = (right.2 / left.2).arg();
            let (first, second) = ((mid.2 / left.2).arg(), (right.2 / mid.2).arg());
            // The midpoint guards against aliasing: both halves must turn less
            // than a quarter and add up to the whole.
            let resolved = step.abs() < FRAC_PI_2
                && first.abs() < FRAC_PI_2
                && second.abs() < FRAC_PI_2
                && (first + second - step).abs() < 1e-9;
            if resolved {
                total += first + second;
                accepted.push(mid);
                accepted.push(right);
                left = right;
            } else {
                stack.push(right);
                stack.push(mid);
            }
        }
    }
    let winding = (total / TAU).round() as i64;
    let min_boundary_modulus = accepted.iter().map(|s| s.2.norm()).fold(f64::INFINITY, f64::min);
    Ok(WindingResult {
        center,
        radius,
        winding,
        min_boundary_modulus,
        samples: accepted.into_iter().map(|(_, l, v)| (l, v)).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstabilityResult {
    pub p: u8,
    pub n: i64,
    /// Radius of the contour actually used (after overflow retries).
    pub delta: f64,
    pub lambda0: C64,
    /// `|f_λ0²(z_n) - φ(λ0)|`
    pub residual: f64,
    /// Winding number of `g` on `∂B(1, delta)`.
    pub winding: i64,
    pub fixed_point: C64,
    pub multiplier: C64,
    pub fixed_point_class: FixedPointClass,
}

impl InstabilityResult {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "p": self.p,
            "n": self.n,
            "delta": self.delta,
            "lambda0_re": self.lambda0.re,
            "lambda0_im": self.lambda0.im,
            "residual": self.residual,
            "winding": self.winding,
        })
    }
}

const CONTOUR_STEPS: usize = 256;

/// Finds `λ0` near 1 with `f_λ0²(2πin) = φ(λ0)`.
///
/// The disc `B(1, δ)` may contain many roots; the one closest to 1 is
/// isolated by bisecting the contour radius down to the smallest circle
/// around 1 with positive winding number.
pub fn find_instability_parameter(p: u8, n: i64, delta: f64) -> Result<InstabilityResult> {
    if !(delta > 0.0 && delta < 0.1) {
        return Err(Error::precondition("delta must lie in (0, 0.1)"));
    }
    repelling_start(p)?;
    let one = C64::new(1.0, 0.0);
    let g = |lambda: C64| -> Result<C64> { Ok(psi2(p, n, lambda)? - phi(p, lambda)?.phi) };

    let mut radius = delta;
    let mut retries = 0;
    let outer = loop {
        match winding_number(&g, one, radius, CONTOUR_STEPS) {
            Err(Error::OverflowInChain(_)) if retries < 5 => {
                radius *= 0.8;
                retries += 1;
            }
            other => break other?,
        }
    };
    if outer.winding <= 0 {
        return Err(Error::NoRootInDisc(radius));
    }

    let (mut lo, mut hi) = (0.0, radius);
    let mut inner = outer.clone();
    for _ in 0..24 {
        let mid = 0.5 * (lo + hi);
        let w = winding_number(&g, one, mid, CONTOUR_STEPS)?;
        if w.winding >= 1 {
            hi = mid;
            inner = w;
        } else {
            lo = mid;
        }
    }
    // A circle a little wider than the nearest root, for a well-resolved centroid.
    let guess_circle = winding_number(&g, one, hi * (1.0 + 1e-3), 4096).unwrap_or(inner);
    let mut lambda = guess_circle.zero_sum() / guess_circle.winding.max(1) as f64;

    for _ in 0..60 {
        let value = g(lambda)?;
        let h = 1e-7 * (1.0 + lambda.norm());
        let slope = (g(lambda + h)? - value) / h;
        if slope.norm() == 0.0 {
            break;
        }
        let step = value / slope;
        lambda -= step;
        if step.norm() <= 1e-16 * lambda.norm() {
            break;
        }
    }
    let fixed = phi(p, lambda)?;
    let residual = (psi2(p, n, lambda)? - fixed.phi).norm();
    if !(residual < 1e-8) {
        return Err(Error::NonConvergence(lambda));
    }
    Ok(InstabilityResult {
        p,
        n,
        delta: radius,
        lambda0: lambda,
        residual,
        winding: outer.winding,
        fixed_point: fixed.phi,
        multiplier: fixed.multiplier,
        fixed_point_class: FixedPointClass::of_multiplier(fixed.multiplier),
    })
}

#[derive(Debug)]
pub struct ZeroSearch {
    /// Distinct roots in increasing imaginary part.
    pub roots: Vec<C64>,
    pub failures: Vec<(C64, Error)>,
}

/// Zeros of `f_1(z) = z + 1 + e^-z` with imaginary part in `im_range`,
/// Newton-seeded at `-log y + iy` for `per_strip` values of `y` per period `2π`.
pub fn zeros_of_f1(im_range: (f64, f64), per_strip: usize) -> Result<ZeroSearch> {
    let (a, b) = im_range;
    if !(a >= TAU && b > a) {
        return Err(Error::precondition("imaginary range must lie in (2π, ∞)"));
    }
    let per_strip = per_strip.max(1);
    let count = (((b - a) / TAU) * per_strip as f64).ceil() as usize;
    let f1 = EntireMap::f1();
    let results: Vec<(C64, Result<C64>)> = (0..count)
        .into_par_iter()
        .map(|j| {
            let y = a + (j as f64 + 0.5) * TAU / per_strip as f64;
            let seed = C64::new(-y.ln(), y);
            (seed, newton_root(&f1, seed))
        })
        .collect();
    let mut roots: Vec<C64> = Vec::new();
    let mut failures = Vec::new();
    for (seed, result) in results {
        match result {
            Ok(z) if z.im >= a && z.im <= b => {
                if roots.iter().all(|r| (r - z).norm() > 1e-8) {
                    roots.push(z);
                }
            }
            Ok(_) => {}
            Err(e) => failures.push((seed, e)),
        }
    }
    roots.sort_by(|x, y| x.im.total_cmp(&y.im));
    Ok(ZeroSearch { roots, failures })
}

fn newton_root(map: &EntireMap, seed: C64) -> Result<C64> {
    let mut z = seed;
    for _ in 0..100 {
        let value = map.evaluate(z).finite().ok_or(Error::OverflowAtPoint(z))?;
        let slope = map.derivative(z).finite().ok_or(Error::OverflowAtPoint(z))?;
        if slope.norm() == 0.0 {
            break;
        }
        let step = value / slope;
        z -= step;
        if step.norm() <= 1e-15 * (1.0 + z.norm()) {
            break;
        }
    }
    let value = map.evaluate(z).finite().ok_or(Error::OverflowAtPoint(z))?;
    if value.norm() < 1e-10 {
        Ok(z)
    } else {
        Err(Error::NonConvergence(seed))
    }
}
