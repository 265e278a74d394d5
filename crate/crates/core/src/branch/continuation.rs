//! Maximal-disc continuation of an inverse branch.
//!
//! Starting from `z0`, the branch `φ` of `f⁻¹` with `φ(f(z0)) = z0` is
//! continued over discs `B(f(z0), r)` of geometrically growing radius. A
//! radius is accepted when `φ` can be tracked along the radius to the circle
//! and once around the circle, returning to its starting value, with `|f'|`
//! staying above a floor. The first failing radius is bisected against the
//! last success. The point `s` where the circle meets the obstruction is then
//! approached radially: a Cauchy sequence of preimages converging to a zero of
//! `f'` is a critical obstruction, preimages escaping to ∞ an asymptotic one.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use serde::Serialize;

use super::track::{track_segment, track_with, TrackConfig, TrackFailure};
use crate::catalog::CriticalFamily;
use crate::{EntireMap, Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchConfig {
    pub growth: f64,
    pub initial_radius: f64,
    pub resolution: f64,
    pub min_derivative: f64,
    /// `|φ|` above this counts as divergence to ∞.
    pub divergence_modulus: f64,
    /// Total predictor-corrector steps per run.
    pub max_steps: usize,
}

impl Default for BranchConfig {
    fn default() -> Self {
        Self {
            growth: 1.05,
            initial_radius: 1e-3,
            resolution: 1e-6,
            min_derivative: 1e-10,
            divergence_modulus: 1e6,
            max_steps: 5_000_000,
        }
    }
}

impl BranchConfig {
    fn track_config(&self) -> TrackConfig {
        TrackConfig {
            min_derivative: self.min_derivative,
            divergence_modulus: self.divergence_modulus,
            max_steps: self.max_steps,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ObstructionKind {
    /// The preimages converge to the critical point `limit`.
    Critical {
        limit: C64,
    },
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Obstruction {
    /// Singular value on the boundary circle.
    pub s: C64,
    pub kind: ObstructionKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchState {
    pub map: EntireMap,
    pub basepoint: C64,
    pub center: C64,
    pub radius: f64,
    pub obstruction: Option<Obstruction>,
    pub config: BranchConfig,
}

fn budget(what: &str) -> Error {
    Error::BudgetExhausted(what.to_string())
}

impl BranchState {
    /// `φ(w)` for `w` in the certified disc, by continuation along the radius.
    pub fn eval(&self, w: C64) -> Result<C64> {
        if (w - self.center).norm() >= self.radius {
            return Err(Error::precondition(format!("{w} is outside the certified disc")));
        }
        let mut steps = 0;
        track_segment(
            &self.map,
            self.basepoint,
            self.center,
            w,
            &self.config.track_config(),
            &mut steps,
        )
        .map_err(|e| match e {
            TrackFailure::Budget => budget("branch evaluation"),
            _ => Error::NonConvergence(w),
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let obstruction = self.obstruction.map(|o| {
            let (kind, limit) = match o.kind {
                ObstructionKind::Critical { limit } => ("critical", Some([limit.re, limit.im])),
                ObstructionKind::Asymptotic => ("asymptotic", None),
            };
            serde_json::json!({ "s": [o.s.re, o.s.im], "kind": kind, "limit": limit })
        });
        serde_json::json!({
            "map": self.map.to_string(),
            "basepoint": [self.basepoint.re, self.basepoint.im],
            "center": [self.center.re, self.center.im],
            "radius": self.radius,
            "obstruction": obstruction,
        })
    }
}

struct Continuation<'a> {
    map: &'a EntireMap,
    z0: C64,
    center: C64,
    cfg: &'a BranchConfig,
    track: TrackConfig,
    steps: usize,
}

/// Samples `(w, φ(w), |f'(φ(w))|)` along one ring.
type RingTrace = Vec<(C64, C64, f64)>;

impl Continuation<'_> {
    /// Whether `φ` continues over the closed ring of radius `r`; records the
    /// ring samples when it does.
    fn ring(&mut self, r: f64, trace: Option<&mut RingTrace>) -> Result<bool> {
        let start = self.center + r;
        let z_start = match track_segment(self.map, self.z0, self.center, start, &self.track, &mut self.steps) {
            Ok(z) => z,
            Err(TrackFailure::Budget) => return Err(budget("radial continuation")),
            Err(_) => return Ok(false),
        };
        let center = self.center;
        let mut local = Vec::new();
        let record = trace.is_some();
        let map = self.map;
        let result = track_with(
            map,
            z_start,
            |t| center + C64::from_polar(r, TAU * t),
            &self.track,
            &mut self.steps,
            |_, w, z| {
                if record {
                    let d = map.derivative(z).finite().map_or(0.0, |d| d.norm());
                    local.push((w, z, d));
                }
            },
        );
        let closes = match result {
            Ok(z_end) => (z_end - z_start).norm() <= 1e-8 * (1.0 + z_start.norm()),
            Err(TrackFailure::Budget) => return Err(budget("ring continuation")),
            Err(_) => false,
        };
        if let Some(trace) = trace {
            *trace = local;
        }
        Ok(closes)
    }

    /// Largest successful radius and smallest failing one, or `None` when the
    /// whole of `max_radius` is reached.
    fn bracket(&mut self, max_radius: f64) -> Result<Option<(f64, f64)>> {
        let first = self.cfg.initial_radius.min(max_radius);
        if !self.ring(first, None)? {
            return Ok(Some((0.0, first)));
        }
        let mut r = first;
        loop {
            let next = r * self.cfg.growth;
            if next >= max_radius {
                return if self.ring(max_radius, None)? {
                    Ok(None)
                } else {
                    Ok(Some((r, max_radius)))
                };
            }
            if !self.ring(next, None)? {
                return Ok(Some((r, next)));
            }
            r = next;
        }
    }

    /// The known singular value on the circle `|w - center| = radius` closest to `near`.
    fn singular_value_on_circle(&self, radius: f64, near: C64) -> Option<C64> {
        let tol = 1e-5 * (1.0 + radius) + 2.0 * self.cfg.resolution;
        let data = self.map.singular_values();
        let mut candidates = data.known_singular_values.clone();
        if data.critical_points == CriticalFamily::TwoPiLattice {
            candidates.extend(data.critical_values_in_disc(self.center, radius + tol));
        }
        candidates
            .into_iter()
            .filter(|v| ((v - self.center).norm() - radius).abs() <= tol)
            .min_by(|a, b| (a - near).norm().total_cmp(&(b - near).norm()))
    }

    fn classify(&mut self, radius: f64) -> Result<Obstruction> {
        let mut trace = Vec::new();
        if radius > 0.0 {
            self.ring(radius, Some(&mut trace))?;
        }
        // The obstruction sits where the branch is steepest on the last good ring.
        let s_estimate = match trace.iter().min_by(|a, b| a.2.total_cmp(&b.2)) {
            Some(&(w, _, _)) if w != self.center => self.center + (w - self.center) / (w - self.center).norm() * radius,
            _ => self.center,
        };
        let s = self.singular_value_on_circle(radius, s_estimate).unwrap_or(s_estimate);

        // Radial approach w_k = s + (center - s)·2^-k.
        let mut preimages = Vec::new();
        let mut z = self.z0;
        let mut w_prev = self.center;
        let mut failure = None;
        for k in 1..=60 {
            let w = s + (self.center - s) * 0.5f64.powi(k);
            if (w - s).norm() <= 1e-14 * (1.0 + s.norm()) {
                break;
            }
            match track_segment(self.map, z, w_prev, w, &self.track, &mut self.steps) {
                Ok(next) => {
                    z = next;
                    w_prev = w;
                    preimages.push(z);
                }
                Err(TrackFailure::Budget) => return Err(budget("obstruction classification")),
                Err(e) => {
                    failure = Some(e);
                    break;
                }
            }
        }
        if matches!(
            failure,
            Some(TrackFailure::Diverged(_)) | Some(TrackFailure::Overflow(_))
        ) {
            return Ok(Obstruction {
                s,
                kind: ObstructionKind::Asymptotic,
            });
        }
        let last = match failure {
            Some(TrackFailure::Stalled(z)) | Some(TrackFailure::SmallDerivative(z)) => z,
            _ => *preimages.last().unwrap_or(&self.z0),
        };

        // Critical: Newton on f' = 0 from the last preimage.
        if let Some(c) = critical_point_near(self.map, last) {
            let fc = self.map.evaluate(c).finite();
            let slope = self.map.derivative(c).finite().map_or(f64::INFINITY, |d| d.norm());
            if let Some(fc) = fc {
                if slope < 1e-8 && (fc - s).norm() < 1e-5 * (1.0 + s.norm()) && (c - last).norm() < 0.1 {
                    return Ok(Obstruction {
                        s: fc,
                        kind: ObstructionKind::Critical { limit: c },
                    });
                }
            }
        }
        let tail: Vec<f64> = preimages.iter().rev().take(11).map(|z| z.norm()).collect();
        let escaping = tail.len() == 11 && tail.windows(2).all(|p| p[0] > p[1]);
        if escaping || last.norm() > self.cfg.divergence_modulus {
            return Ok(Obstruction {
                s,
                kind: ObstructionKind::Asymptotic,
            });
        }
        Err(budget("obstruction is neither critical nor asymptotic"))
    }
}

/// Newton iteration for a zero of `f'` starting at `z`.
fn critical_point_near(map: &EntireMap, z: C64) -> Option<C64> {
    let mut c = z;
    for _ in 0..50 {
        let d1 = map.derivative(c).finite()?;
        let d2 = map.second_derivative(c).finite()?;
        if d2.norm() == 0.0 {
            return None;
        }
        let step = d1 / d2;
        c -= step;
        if step.norm() <= 1e-15 * (1.0 + c.norm()) {
            return Some(c);
        }
    }
    None
}

pub fn continue_branch(map: &EntireMap, z0: C64, max_radius: f64) -> Result<BranchState> {
    continue_branch_with(map, z0, max_radius, &BranchConfig::default())
}

pub fn continue_branch_with(map: &EntireMap, z0: C64, max_radius: f64, cfg: &BranchConfig) -> Result<BranchState> {
    if !(max_radius > 0.0) {
        return Err(Error::precondition("max radius must be positive"));
    }
    let slope = map.derivative(z0).finite().ok_or(Error::OverflowAtPoint(z0))?;
    if slope.norm() <= 1e-10 {
        return Err(Error::CriticalBasepoint(z0));
    }
    let center = map.evaluate(z0).finite().ok_or(Error::OverflowAtPoint(z0))?;
    let mut run = Continuation {
        map,
        z0,
        center,
        cfg,
        track: cfg.track_config(),
        steps: 0,
    };
    let Some((mut lo, mut hi)) = run.bracket(max_radius)? else {
        return Ok(BranchState {
            map: *map,
            basepoint: z0,
            center,
            radius: max_radius,
            obstruction: None,
            config: *cfg,
        });
    };
    while hi - lo > cfg.resolution {
        let mid = 0.5 * (lo + hi);
        if run.ring(mid, None)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let obstruction = run.classify(lo)?;
    Ok(BranchState {
        map: *map,
        basepoint: z0,
        center,
        radius: lo,
        obstruction: Some(obstruction),
        config: *cfg,
    })
}

/// `γ = φ(L)` for the radius `L` of the maximal disc ending at an asymptotic
/// obstruction `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticCurve {
    /// Curve parameter of each sample: `w = center + (s - center)·t`.
    pub params: Vec<f64>,
    pub samples: Vec<C64>,
    /// The straight segment `f(γ)` runs from `image_segment.0` towards `image_segment.1`.
    pub image_segment: (C64, C64),
    pub target_value: C64,
}

impl AsymptoticCurve {
    pub fn to_csv(&self) -> String {
        polyline_csv(&self.params, &self.samples)
    }
}

pub(crate) fn polyline_csv(params: &[f64], points: &[C64]) -> String {
    let mut out = String::from("t,re,im\n");
    for (t, z) in params.iter().zip(points) {
        let _ = writeln!(out, "{t:e},{:e},{:e}", z.re, z.im);
    }
    out
}

pub fn trace_asymptotic_curve(state: &BranchState, target_modulus: f64) -> Result<AsymptoticCurve> {
    let s = match state.obstruction {
        Some(Obstruction {
            s,
            kind: ObstructionKind::Asymptotic,
        }) => s,
        _ => return Err(Error::precondition("branch does not end at an asymptotic obstruction")),
    };
    let center = state.center;
    // |f'| → 0 along the curve is expected here.
    let track = TrackConfig {
        divergence_modulus: f64::INFINITY,
        min_derivative: 0.0,
        ..state.config.track_config()
    };
    let mut steps = 0;
    let mut z = state.basepoint;
    let mut w_prev = center;
    let mut params = vec![0.0];
    let mut samples = vec![z];
    for k in 1..=20_000 {
        let gap = 0.8f64.powi(k);
        let w = s + (center - s) * gap;
        if w == w_prev || (w - s).norm() <= f64::EPSILON * s.norm() {
            break;
        }
        z = track_segment(&state.map, z, w_prev, w, &track, &mut steps).map_err(|e| match e {
            TrackFailure::Budget => budget("asymptotic curve"),
            _ => Error::NonConvergence(w),
        })?;
        w_prev = w;
        params.push(1.0 - gap);
        samples.push(z);
        if z.norm() >= target_modulus {
            return Ok(AsymptoticCurve {
                params,
                samples,
                image_segment: (center, s),
                target_value: s,
            });
        }
    }
    Err(budget("asymptotic curve did not reach the target modulus"))
}
