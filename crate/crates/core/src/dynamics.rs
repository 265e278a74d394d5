//! Orbits, fixed points, postsingular sets and hyperbolicity certificates.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::Serialize;

use crate::metrics::{deriv_norm, run_scan, ConformalMetric, Disc, Region, SamplerConfig};
use crate::{EntireMap, Error, MapKind, OverflowDirection, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscapePolicy {
    /// `Re z` above this counts as escape to the right.
    pub escape_re: f64,
    pub tolerance: f64,
    /// Iterate `g(u) = f(u) - c` instead of `f`, where `c` is the map's drift.
    pub compensate_drift: bool,
}

impl Default for EscapePolicy {
    fn default() -> Self {
        Self {
            escape_re: 50.0,
            tolerance: 1e-9,
            compensate_drift: false,
        }
    }
}

pub const DEFAULT_ORBIT_BUDGET: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum OrbitStatus {
    Converged { limit: C64, residual: f64 },
    EscapedRight,
    ExpOverflow(OverflowDirection),
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitResult {
    pub points: Vec<C64>,
    pub status: OrbitStatus,
    /// Whether `k·drift` was subtracted from the `k`-th iterate.
    pub drift_compensated: bool,
}

/// One step of `f`, or of `f - drift` when compensating.
fn step(map: &EntireMap, z: C64, drift: C64) -> std::result::Result<C64, OverflowDirection> {
    match map.evaluate(z) {
        crate::EvalResult::Finite(w) => Ok(w - drift),
        crate::EvalResult::ExpOverflow(dir) => Err(dir),
    }
}

pub fn iterate(map: &EntireMap, z0: C64, budget: usize, policy: &EscapePolicy) -> Result<OrbitResult> {
    if budget == 0 {
        return Err(Error::precondition("orbit budget must be at least 1"));
    }
    let drift_compensated = policy.compensate_drift && map.drift_per_iterate() != C64::new(0.0, 0.0);
    let drift = if drift_compensated {
        map.drift_per_iterate()
    } else {
        C64::new(0.0, 0.0)
    };
    let mut points = vec![z0];
    let mut z = z0;
    let done = |points, status| {
        Ok(OrbitResult {
            points,
            status,
            drift_compensated,
        })
    };
    for _ in 0..budget {
        if z.re > policy.escape_re {
            return done(points, OrbitStatus::EscapedRight);
        }
        let next = match step(map, z, drift) {
            Ok(w) => w,
            Err(dir) => return done(points, OrbitStatus::ExpOverflow(dir)),
        };
        points.push(next);
        if (next - z).norm() < policy.tolerance {
            if let Ok(after) = step(map, next, drift) {
                let residual = (after - next).norm();
                if residual < policy.tolerance {
                    return done(points, OrbitStatus::Converged { limit: next, residual });
                }
            }
        }
        z = next;
    }
    done(points, OrbitStatus::BudgetExhausted)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FixedPointClass {
    Superattracting,
    Attracting,
    Repelling,
    Indifferent,
}

impl FixedPointClass {
    pub fn of_multiplier(m: C64) -> Self {
        let a = m.norm();
        if a < 1e-8 {
            Self::Superattracting
        } else if a < 1.0 - 1e-8 {
            Self::Attracting
        } else if a > 1.0 + 1e-8 {
            Self::Repelling
        } else {
            Self::Indifferent
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPointRecord {
    pub location: C64,
    pub multiplier: C64,
    pub class: FixedPointClass,
}

#[derive(Debug)]
pub struct FixedPointSearch {
    /// Distinct fixed points, in order of the first seed that found each.
    pub records: Vec<FixedPointRecord>,
    /// Seeds from which Newton failed, with the reason.
    pub failures: Vec<(C64, Error)>,
}

/// Damped Newton iteration for `f(z) = z`.
pub fn newton_fixed_point(map: &EntireMap, seed: C64) -> Result<C64> {
    let residual = |z: C64| map.evaluate(z).finite().map(|w| w - z);
    let mut z = seed;
    let mut h = residual(z).ok_or(Error::OverflowAtPoint(z))?;
    for _ in 0..200 {
        let slope = map.derivative(z).finite().ok_or(Error::OverflowAtPoint(z))? - 1.0;
        if slope.norm() == 0.0 {
            return Err(Error::NonConvergence(seed));
        }
        let full = h / slope;
        let mut damping = 1.0;
        let (next, h_next) = loop {
            let candidate = z - full * damping;
            match residual(candidate) {
                Some(hc) if hc.norm() <= h.norm() || damping < 1e-6 => break (candidate, hc),
                _ if damping < 1e-6 => return Err(Error::NonConvergence(seed)),
                _ => damping *= 0.5,
            }
        };
        let moved = (next - z).norm();
        z = next;
        h = h_next;
        if moved <= 1e-14 * (1.0 + z.norm()) && h.norm() < 1e-10 {
            return Ok(z);
        }
        if h.norm() < 1e-15 * (1.0 + z.norm()) {
            return Ok(z);
        }
    }
    if h.norm() < 1e-10 {
        Ok(z)
    } else {
        Err(Error::NonConvergence(seed))
    }
}

pub fn find_fixed_points(map: &EntireMap, seeds: &[C64]) -> FixedPointSearch {
    let results: Vec<Result<FixedPointRecord>> = seeds
        .par_iter()
        .map(|&seed| {
            let location = newton_fixed_point(map, seed)?;
            let multiplier = map
                .derivative(location)
                .finite()
                .ok_or(Error::OverflowAtPoint(location))?;
            Ok(FixedPointRecord {
                location,
                multiplier,
                class: FixedPointClass::of_multiplier(multiplier),
            })
        })
        .collect();
    let mut records: Vec<FixedPointRecord> = Vec::new();
    let mut failures = Vec::new();
    for (seed, result) in seeds.iter().zip(results) {
        match result {
            Ok(r) => {
                if records.iter().all(|k| (k.location - r.location).norm() >= 1e-6) {
                    records.push(r);
                }
            }
            Err(e) => failures.push((*seed, e)),
        }
    }
    FixedPointSearch { records, failures }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PostsingularStatus {
    Bounded,
    /// Some orbit overflowed.
    Unbounded,
    FailedUnboundedS,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PostsingularOrbit {
    pub status: PostsingularStatus,
    /// Orbits of the singular values, each starting at the value itself.
    pub orbits: Vec<Vec<C64>>,
    pub max_modulus: f64,
}

pub fn postsingular_orbit(map: &EntireMap, depth: usize) -> PostsingularOrbit {
    let data = map.singular_values();
    if !data.bounded_singular_set {
        return PostsingularOrbit {
            status: PostsingularStatus::FailedUnboundedS,
            orbits: Vec::new(),
            max_modulus: f64::NAN,
        };
    }
    let mut status = PostsingularStatus::Bounded;
    let mut orbits = Vec::new();
    for &v in &data.known_singular_values {
        let mut orbit = vec![v];
        let mut z = v;
        for _ in 0..depth {
            match map.evaluate(z).finite() {
                Some(w) => {
                    z = w;
                    orbit.push(z);
                }
                None => {
                    status = PostsingularStatus::Unbounded;
                    break;
                }
            }
        }
        orbits.push(orbit);
    }
    let max_modulus = orbits.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    PostsingularOrbit {
        status,
        orbits,
        max_modulus,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CertificateStatus {
    Certified,
    FailedUnboundedS,
    FailedNoAbsorbingSet,
}

/// A compact `K` with `f(K) ∪ S(f) ⊂ int K`.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperbolicityCertificate {
    /// `K` as a union of closed discs; empty unless certified.
    pub discs: Vec<Disc>,
    /// Upper bound for `|f|` on `K`.
    pub sup_bound: Option<f64>,
    /// Distance by which `f(K) ∪ S(f)` stays inside `K`.
    pub margin: Option<f64>,
    pub singular_values: Vec<C64>,
    pub status: CertificateStatus,
}

const CERTIFICATE_SLACK: f64 = 1e-9;

impl HyperbolicityCertificate {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "radius": self.discs.first().map(|d| d.radius),
            "supBound": self.sup_bound,
            "singularValues": self.singular_values.iter().map(|v| [v.re, v.im]).collect::<Vec<_>>(),
            "status": match self.status {
                CertificateStatus::Certified => "Certified",
                CertificateStatus::FailedUnboundedS => "FailedUnboundedS",
                CertificateStatus::FailedNoAbsorbingSet => "FailedNoAbsorbingSet",
            },
        })
    }
}

/// Tries the closed discs `B(0, r)` in the given order.
pub fn certify_hyperbolic(map: &EntireMap, radii: &[f64]) -> HyperbolicityCertificate {
    let data = map.singular_values();
    let failed = |status| HyperbolicityCertificate {
        discs: Vec::new(),
        sup_bound: None,
        margin: None,
        singular_values: data.known_singular_values.clone(),
        status,
    };
    if !data.bounded_singular_set {
        return failed(CertificateStatus::FailedUnboundedS);
    }
    let origin = C64::new(0.0, 0.0);
    for &r in radii.iter().filter(|r| **r > 0.0) {
        let sup = data.sup_modulus_on_disc(origin, r);
        let largest_value = data.known_singular_values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if sup < r - CERTIFICATE_SLACK && largest_value < r - CERTIFICATE_SLACK {
            return HyperbolicityCertificate {
                discs: vec![Disc::new(origin, r)],
                sup_bound: Some(sup),
                margin: Some(r - sup.max(largest_value)),
                singular_values: data.known_singular_values.clone(),
                status: CertificateStatus::Certified,
            };
        }
    }
    failed(CertificateStatus::FailedNoAbsorbingSet)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum BakerPoint {
    /// `Re z ≤ 0`: nothing is claimed.
    OutOfDomain,
    Checked {
        /// `Re f(z) - Re z`.
        increment: f64,
        /// `1 - e^{-Re z}`.
        lower_bound: f64,
        /// Iterations until `Re > 50`, if within the default budget.
        escape_steps: Option<usize>,
    },
}

fn require_kind(map: &EntireMap, kind: MapKind) -> Result<()> {
    if map.kind == kind {
        Ok(())
    } else {
        Err(Error::precondition(format!("expected {kind:?}, got {map}")))
    }
}

pub fn baker_point_check(map: &EntireMap, z: C64) -> Result<BakerPoint> {
    require_kind(map, MapKind::F1Fatou)?;
    if !(z.re > 0.0) {
        return Ok(BakerPoint::OutOfDomain);
    }
    let w = map.evaluate(z).finite().ok_or(Error::OverflowAtPoint(z))?;
    let orbit = iterate(map, z, DEFAULT_ORBIT_BUDGET, &EscapePolicy::default())?;
    let escape_steps = (orbit.status == OrbitStatus::EscapedRight).then(|| orbit.points.len() - 1);
    Ok(BakerPoint::Checked {
        increment: w.re - z.re,
        lower_bound: 1.0 - (-z.re).exp(),
        escape_steps,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BakerReport {
    pub samples: usize,
    /// Samples with `Re f(z) < Re z + 1 - e^{-Re z}` or `Re f(z) ≤ Re z`.
    pub bound_violations: usize,
    pub escaped: usize,
    pub max_escape_steps: usize,
    pub min_increment: f64,
}

/// Checks the right half-plane as an invariant escaping domain of `f_1` on
/// `samples` points near its boundary and `samples` points inside.
pub fn baker_domain_check(map: &EntireMap, samples: usize) -> Result<BakerReport> {
    require_kind(map, MapKind::F1Fatou)?;
    let n = samples.max(1);
    let points: Vec<C64> = (0..n)
        .flat_map(|k| {
            let t = (k as f64 + 0.5) / n as f64;
            let im = -100.0 + 200.0 * t;
            let re = 20.0 * ((k * 7919) % n) as f64 / n as f64 + 1e-3;
            [C64::new(0.01, im), C64::new(re, im)]
        })
        .collect();
    let checks: Vec<BakerPoint> = points
        .par_iter()
        .map(|&z| baker_point_check(map, z))
        .collect::<Result<_>>()?;
    let mut report = BakerReport {
        samples: points.len(),
        bound_violations: 0,
        escaped: 0,
        max_escape_steps: 0,
        min_increment: f64::INFINITY,
    };
    for check in checks {
        if let BakerPoint::Checked {
            increment,
            lower_bound,
            escape_steps,
        } = check
        {
            if increment < lower_bound - 1e-12 || !(increment > 0.0) {
                report.bound_violations += 1;
            }
            report.min_increment = report.min_increment.min(increment);
            if let Some(k) = escape_steps {
                report.escaped += 1;
                report.max_escape_steps = report.max_escape_steps.max(k);
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WanderingReport {
    /// `max |f_3(z_n) - z_{n+1}|` for `z_n = 2πin`.
    pub max_shift_error: f64,
    /// `max |f_2(z_n) - z_n|`.
    pub max_fixed_residual: f64,
    /// `max |f_2'(z_n)|`.
    pub max_multiplier: f64,
    /// Whether the drift-compensated orbit of `z_n + 0.05` returns to `z_n`, per `n`.
    pub basin_returns: Vec<bool>,
}

impl WanderingReport {
    pub fn holds(&self) -> bool {
        self.max_shift_error <= 1e-12
            && self.max_fixed_residual <= 1e-12
            && self.max_multiplier < 1e-8
            && self.basin_returns.iter().all(|&b| b)
    }
}

pub fn wandering_orbit_check(map: &EntireMap, n0: i64, count: usize) -> Result<WanderingReport> {
    require_kind(map, MapKind::F3Herman)?;
    let f2 = EntireMap::f2();
    let z = |n: i64| C64::new(0.0, TAU * n as f64);
    let mut report = WanderingReport {
        max_shift_error: 0.0,
        max_fixed_residual: 0.0,
        max_multiplier: 0.0,
        basin_returns: Vec::new(),
    };
    let policy = EscapePolicy {
        compensate_drift: true,
        ..EscapePolicy::default()
    };
    for n in n0..=n0 + count as i64 {
        let zn = z(n);
        let shifted = map.evaluate(zn).finite().ok_or(Error::OverflowAtPoint(zn))?;
        report.max_shift_error = report.max_shift_error.max((shifted - z(n + 1)).norm());
        let fixed = f2.evaluate(zn).finite().ok_or(Error::OverflowAtPoint(zn))?;
        report.max_fixed_residual = report.max_fixed_residual.max((fixed - zn).norm());
        let m = f2.derivative(zn).finite().ok_or(Error::OverflowAtPoint(zn))?;
        report.max_multiplier = report.max_multiplier.max(m.norm());
        let orbit = iterate(map, zn + 0.05, DEFAULT_ORBIT_BUDGET, &policy)?;
        let returns = matches!(orbit.status, OrbitStatus::Converged { limit, .. } if (limit - zn).norm() < 1e-6);
        report.basin_returns.push(returns);
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpansionReport {
    pub sampled_inf: f64,
    pub witness: C64,
    pub sample_count: usize,
}

/// `min ‖Df(z)‖_ρ` over sampled `z ∈ W` with `f(z) ∈ W`.
pub fn expansion_report(
    map: &EntireMap,
    w: &Region,
    metric: &ConformalMetric,
    cfg: &SamplerConfig,
) -> Result<ExpansionReport> {
    if metric.region != *w {
        return Err(Error::precondition("metric must live on the region W"));
    }
    let mut points: Vec<C64> = cfg.grid().into_iter().filter(|&z| w.contains(z)).collect();
    points.extend(
        cfg.critical_probes(map, 0.0)
            .into_iter()
            .filter_map(|c| w.nudge_inside(c, 1e-3)),
    );
    let quantity = |z: C64, _: C64, _: C64| deriv_norm(map, z, metric, metric).ok();
    let constraint = |z: C64, fz: C64, _: f64| w.contains(z) && w.contains(fz);
    let report = run_scan(map, &[1.0], &points, cfg, &quantity, &constraint).map_err(|e| match e {
        Error::NoSampleSatisfiesConstraint(_) => Error::NoSampleSatisfiesConstraint(f64::NAN),
        other => other,
    })?;
    Ok(ExpansionReport {
        sampled_inf: report.infima[0],
        witness: report.witnesses[0],
        sample_count: report.sample_count,
    })
}
