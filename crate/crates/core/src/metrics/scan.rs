use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::branch;
use crate::metrics::{deriv_norm, ConformalMetric, Disc, Region, SamplerConfig};
use crate::{EntireMap, Error, Result, C64};

/// Sampled infima of a scan quantity, one per threshold.
///
/// Each infimum is the exact minimum over the final sample set and hence an
/// upper bound for the true infimum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub thresholds: Vec<f64>,
    pub infima: Vec<f64>,
    pub witnesses: Vec<C64>,
    pub sample_count: usize,
}

impl ScanReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("R,infimum,witness_re,witness_im,samples\n");
        for ((r, v), w) in self.thresholds.iter().zip(&self.infima).zip(&self.witnesses) {
            let _ = writeln!(out, "{r:e},{v:e},{:e},{:e},{}", w.re, w.im, self.sample_count);
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    z: C64,
    image: C64,
    value: f64,
}

/// Evaluation of a scan quantity from `(z, f(z), f'(z))`.
type Quantity<'a> = dyn Fn(C64, C64, C64) -> Option<f64> + Sync + 'a;
/// Whether a sample `(z, f(z))` counts towards threshold `R`.
type Constraint<'a> = dyn Fn(C64, C64, f64) -> bool + Sync + 'a;

fn evaluate_samples(map: &EntireMap, points: &[C64], quantity: &Quantity) -> Vec<Sample> {
    points
        .par_iter()
        .filter_map(|&z| {
            let image = map.evaluate(z).finite()?;
            let slope = map.derivative(z).finite()?;
            let value = quantity(z, image, slope)?;
            value.is_finite().then_some(Sample { z, image, value })
        })
        .collect()
}

/// Minimum with a total tie-break on the witness, so the result does not
/// depend on sample order.
fn arg_min<'s>(samples: impl Iterator<Item = &'s Sample>) -> Option<&'s Sample> {
    samples.min_by(|a, b| {
        a.value
            .total_cmp(&b.value)
            .then(a.z.re.total_cmp(&b.z.re))
            .then(a.z.im.total_cmp(&b.z.im))
    })
}

/// Drops the low 16 mantissa bits, merging values equal up to rounding.
fn coarse(value: f64) -> u64 {
    value.to_bits() >> 16
}

/// Centre for the next refinement patch. Near-ties (for instance a whole
/// ring of grid points with the same `|z|`) go to the sample with the largest
/// `|f(z)|`, the one deepest inside the threshold constraint.
fn refinement_centre<'s>(samples: impl Iterator<Item = &'s Sample>) -> Option<&'s Sample> {
    samples.min_by(|a, b| {
        coarse(a.value)
            .cmp(&coarse(b.value))
            .then(b.image.norm().total_cmp(&a.image.norm()))
            .then(a.z.re.total_cmp(&b.z.re))
            .then(a.z.im.total_cmp(&b.z.im))
    })
}

pub(crate) fn run_scan(
    map: &EntireMap,
    thresholds: &[f64],
    base_points: &[C64],
    cfg: &SamplerConfig,
    quantity: &Quantity,
    constraint: &Constraint,
) -> Result<ScanReport> {
    let mut samples = evaluate_samples(map, base_points, quantity);
    for round in 0..cfg.refine_rounds {
        let mut witnesses: Vec<C64> = thresholds
            .iter()
            .filter_map(|&r| refinement_centre(samples.iter().filter(|s| constraint(s.z, s.image, r))))
            .map(|s| s.z)
            .collect();
        witnesses.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        witnesses.dedup();
        let patch: Vec<C64> = witnesses.iter().flat_map(|&w| cfg.patch(w, round)).collect();
        samples.extend(evaluate_samples(map, &patch, quantity));
    }
    let mut infima = Vec::with_capacity(thresholds.len());
    let mut witnesses = Vec::with_capacity(thresholds.len());
    for &r in thresholds {
        let best = arg_min(samples.iter().filter(|s| constraint(s.z, s.image, r)))
            .ok_or(Error::NoSampleSatisfiesConstraint(r))?;
        infima.push(best.value);
        witnesses.push(best.z);
    }
    Ok(ScanReport {
        thresholds: thresholds.to_vec(),
        infima,
        witnesses,
        sample_count: samples.len(),
    })
}

fn check_thresholds(thresholds: &[f64]) -> Result<()> {
    if thresholds.is_empty() {
        return Err(Error::precondition("at least one threshold is required"));
    }
    if thresholds.iter().any(|&r| !(r > 0.0) || !r.is_finite()) {
        return Err(Error::precondition("thresholds must be positive and finite"));
    }
    if thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::precondition("thresholds must be strictly increasing"));
    }
    Ok(())
}

fn probes_for(map: &EntireMap, thresholds: &[f64], cfg: &SamplerConfig) -> Vec<C64> {
    let mut probes: Vec<C64> = thresholds.iter().flat_map(|&r| cfg.critical_probes(map, r)).collect();
    probes.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    probes.dedup();
    probes
}

/// `min |z f'(z)/f(z)|` over samples with `|f(z)| > R`, for each `R`.
pub fn eta_scan(map: &EntireMap, thresholds: &[f64], cfg: &SamplerConfig) -> Result<ScanReport> {
    check_thresholds(thresholds)?;
    let mut points = cfg.grid();
    points.extend(probes_for(map, thresholds, cfg));
    let quantity =
        |z: C64, fz: C64, dz: C64| (z.norm() > 0.0 && fz.norm() > 0.0).then(|| z.norm() * (dz.norm() / fz.norm()));
    let constraint = |_: C64, fz: C64, r: f64| fz.norm() > r;
    run_scan(map, thresholds, &points, cfg, &quantity, &constraint)
}

/// `(1+|z|²)/(1+|f|²)` without overflowing `|f|²`.
fn spherical_ratio(z: C64, fz: C64) -> f64 {
    let (a, b) = (z.norm(), fz.norm());
    if b <= 1.0 {
        (1.0 + a * a) / (1.0 + b * b)
    } else {
        let (t, u) = (1.0 / b, a / b);
        (t * t + u * u) / (1.0 + t * t)
    }
}

/// `min |f'(z)|(1+|z|²)/(1+|f(z)|²)` over samples with `|f(z)| > R`.
pub fn spherical_expansion_scan(map: &EntireMap, threshold: f64, cfg: &SamplerConfig) -> Result<ScanReport> {
    let thresholds = [threshold];
    check_thresholds(&thresholds)?;
    let mut points = cfg.grid();
    points.extend(probes_for(map, &thresholds, cfg));
    let quantity = |z: C64, fz: C64, dz: C64| Some(dz.norm() * spherical_ratio(z, fz));
    let constraint = |_: C64, fz: C64, r: f64| fz.norm() > r;
    run_scan(map, &thresholds, &points, cfg, &quantity, &constraint)
}

/// Samples along asymptotic curves over the asymptotic value `s`, one per tract.
fn asymptotic_curve_samples(map: &EntireMap, s: C64, u: &Disc, cfg: &SamplerConfig) -> Vec<C64> {
    if cfg.curve_tracts == 0 || !map.singular_values().is_asymptotic_value(s, 1e-12) {
        return Vec::new();
    }
    let disc = branch::tangent_disc(s, u);
    let Some(seeds) = map.tract_seeds(disc.center, branch::tract_branch_indices(map, cfg.curve_tracts)) else {
        return Vec::new();
    };
    let mut points = Vec::new();
    for seed in seeds {
        let Ok(state) = branch::continue_branch(map, seed, 1.5 * disc.radius) else {
            continue;
        };
        if let Ok(curve) = branch::trace_asymptotic_curve(&state, cfg.curve_modulus) {
            points.extend(curve.samples);
        }
    }
    points
}

/// `min (1+|z|^τ)|f'(z)|` over samples with `f(z) ∈ U`, where `U` is a disc
/// around the singular value `s`.
///
/// Besides the grid, the sample set contains points along asymptotic curves
/// traced by inverse-branch continuation over `s`.
pub fn poly_decay_scan(map: &EntireMap, s: C64, u: Disc, tau: f64, cfg: &SamplerConfig) -> Result<ScanReport> {
    if !map.singular_values().is_singular_value(s, 1e-12) {
        return Err(Error::precondition(format!("{s} is not a singular value of {map}")));
    }
    if !u.contains(s) || !(u.radius > 0.0) {
        return Err(Error::precondition("U must be a disc containing s"));
    }
    if !(tau > 0.0) {
        return Err(Error::precondition("tau must be positive"));
    }
    let mut points = cfg.grid();
    points.extend(cfg.critical_probes(map, 0.0));
    points.extend(asymptotic_curve_samples(map, s, &u, cfg));
    let quantity = |z: C64, _: C64, dz: C64| Some((1.0 + z.norm().powf(tau)) * dz.norm());
    let constraint = |_: C64, fz: C64, _: f64| u.contains(fz);
    run_scan(map, &[u.radius], &points, cfg, &quantity, &constraint)
}

/// Hyperbolic-to-cylindrical derivative norm minimised over samples `z ∈ Ω`
/// with `|f(z)| > R`.
pub fn eta_omega_scan(map: &EntireMap, omega: Region, thresholds: &[f64], cfg: &SamplerConfig) -> Result<ScanReport> {
    check_thresholds(thresholds)?;
    let hyperbolic = ConformalMetric::hyperbolic_exact(omega.clone())?;
    let cylindrical = ConformalMetric::cylindrical();
    let mut points: Vec<C64> = cfg.grid().into_iter().filter(|&z| omega.contains(z)).collect();
    // Critical points on ∂Ω are pushed just inside.
    points.extend(
        probes_for(map, thresholds, cfg)
            .into_iter()
            .filter_map(|c| omega.nudge_inside(c, 1e-3)),
    );
    let quantity = |z: C64, _: C64, _: C64| deriv_norm(map, z, &hyperbolic, &cylindrical).ok();
    let constraint = |z: C64, fz: C64, r: f64| omega.contains(z) && fz.norm() > r;
    run_scan(map, thresholds, &points, cfg, &quantity, &constraint)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::E;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eta_of_lambda_exp_tracks_log_r_over_lambda() {
        let map = EntireMap::lambda_exp(c(0.25, 0.0));
        let report = eta_scan(&map, &[1e4], &SamplerConfig::default()).unwrap();
        let expected = (4e4f64).ln();
        assert!((report.infima[0] - expected).abs() / expected < 0.05, "{report:?}");
        assert!((report.witnesses[0].im).abs() < 0.5, "{report:?}");
    }

    #[test]
    fn eta_of_exp_at_e2_e4() {
        let map = EntireMap::lambda_exp(c(1.0, 0.0));
        let r = eta_scan(&map, &[E.powi(2), E.powi(4)], &SamplerConfig::default()).unwrap();
        assert!(
            (r.infima[0] - 2.0).abs() < 0.1 && (r.infima[1] - 4.0).abs() < 0.2,
            "{r:?}"
        );
        assert!(r.infima[0] < r.infima[1]);
    }

    #[test]
    fn eta_of_f1_hits_critical_points() {
        let r = eta_scan(&EntireMap::f1(), &[1e4], &SamplerConfig::default()).unwrap();
        assert!(r.infima[0] <= 1e-8, "{r:?}");
        let w = r.witnesses[0];
        assert!(w.re.abs() < 1e-12 && EntireMap::f1().evaluate(w).finite().unwrap().norm() > 1e4);
    }

    #[test]
    fn eta_infima_nondecreasing_for_class_b_maps() {
        let thresholds = [1.0, 10.0, 1e2, 1e3, 1e5, 1e8];
        for map in [
            EntireMap::lambda_exp(c(0.25, 0.0)),
            EntireMap::lambda_exp(c(1.0, 0.3)),
            EntireMap::model_f1(),
        ] {
            let r = eta_scan(&map, &thresholds, &SamplerConfig::default()).unwrap();
            assert!(r.infima.windows(2).all(|w| w[0] <= w[1]), "{map}: {:?}", r.infima);
        }
    }

    #[test]
    fn eta_scan_rejects_bad_thresholds() {
        let map = EntireMap::f1();
        let cfg = SamplerConfig::default();
        assert!(eta_scan(&map, &[10.0, 5.0], &cfg).is_err());
        assert!(eta_scan(&map, &[0.0], &cfg).is_err());
        assert!(eta_scan(&map, &[], &cfg).is_err());
    }

    #[test]
    fn spherical_scan_examples() {
        let exp = EntireMap::lambda_exp(c(1.0, 0.0));
        let r = spherical_expansion_scan(&exp, 1e6, &SamplerConfig::default()).unwrap();
        assert!(r.infima[0] < 1e-6);
        // at the stated witness z = 20 the quantity is 401·e^{-20}
        let z = c(20.0, 0.0);
        let v = exp.derivative(z).finite().unwrap().norm() * spherical_ratio(z, exp.evaluate(z).finite().unwrap());
        assert!((v - 401.0 * (-20f64).exp()).abs() / v < 1e-6);

        let r = spherical_expansion_scan(&EntireMap::f1(), 1e4, &SamplerConfig::default()).unwrap();
        assert!(r.infima[0] <= 1e-6);

        let err = spherical_expansion_scan(&exp, 1e306, &SamplerConfig::default());
        assert!(matches!(err, Err(Error::NoSampleSatisfiesConstraint(_))));
    }

    #[test]
    fn spherical_ratio_survives_huge_images() {
        let z = c(700.0, 0.0);
        let fz = c(1e303, 0.0);
        let direct = (1.0 + 700.0f64 * 700.0) / 1e303 / 1e303;
        assert!((spherical_ratio(z, fz) - direct).abs() <= 1e-12 * direct);
        assert!((spherical_ratio(c(2.0, 0.0), c(3.0, 0.0)) - 0.5).abs() < 1e-15);
        assert!((spherical_ratio(c(0.0, 0.0), c(2.0, 0.0)) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn poly_decay_examples() {
        let cfg = SamplerConfig::default();
        let u = Disc::new(c(0.0, 0.0), 0.1);
        let r = poly_decay_scan(&EntireMap::model_f1(), c(0.0, 0.0), u, 4.0, &cfg).unwrap();
        assert!(r.infima[0] < 1e-6, "{r:?}");

        let exp = EntireMap::lambda_exp(c(1.0, 0.0));
        let r = poly_decay_scan(&exp, c(0.0, 0.0), u, 2.0, &cfg).unwrap();
        assert!(r.infima[0] <= 401.0 * (-20f64).exp());

        let err = poly_decay_scan(
            &EntireMap::model_f1(),
            c(0.5, 0.0),
            Disc::new(c(0.5, 0.0), 0.1),
            4.0,
            &cfg,
        );
        assert!(matches!(err, Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn poly_decay_curve_only_sampling_finds_witness() {
        let cfg = SamplerConfig {
            use_grid: false,
            ..SamplerConfig::default()
        };
        let u = Disc::new(c(0.0, 0.0), 0.1);
        let r = poly_decay_scan(&EntireMap::model_f1(), c(0.0, 0.0), u, 4.0, &cfg).unwrap();
        assert!(r.infima[0] < 1e-6, "{r:?}");
        assert!(r.witnesses[0].re < -20.0);
    }

    #[test]
    fn eta_omega_examples() {
        let cfg = SamplerConfig::default();
        let exp = EntireMap::lambda_exp(c(1.0, 0.0));
        let r = eta_omega_scan(&exp, Region::RightHalfPlane(0.0), &[E.powi(10)], &cfg).unwrap();
        assert!((r.infima[0] - 10.0).abs() < 1.0, "{r:?}");

        let r = eta_omega_scan(&EntireMap::f1(), Region::RightHalfPlane(0.0), &[1e4], &cfg).unwrap();
        assert!(r.infima[0] <= 1e-6, "{r:?}");

        let err = eta_omega_scan(&exp, Region::WholePlane, &[10.0], &cfg);
        assert!(matches!(err, Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn csv_layout() {
        let report = ScanReport {
            thresholds: vec![100.0],
            infima: vec![0.5],
            witnesses: vec![c(1.0, -2.0)],
            sample_count: 7,
        };
        assert_eq!(
            report.to_csv(),
            "R,infimum,witness_re,witness_im,samples\n1e2,5e-1,1e0,-2e0,7\n"
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn scan_minima_ignore_sample_order(seed in any::<u64>()) {
            use rand::{seq::SliceRandom, SeedableRng};
            let map = EntireMap::lambda_exp(c(0.5, 0.2));
            let cfg = SamplerConfig { r_max: 50.0, angles: 32, ..SamplerConfig::default() };
            let mut points = cfg.grid();
            // duplicates of the minimum value must not break the tie-break
            points.push(c(3.0, 0.0));
            points.push(c(3.0, 0.0));
            let quantity = |z: C64, fz: C64, dz: C64| Some(z.norm() * dz.norm() / fz.norm());
            let constraint = |_: C64, fz: C64, r: f64| fz.norm() > r;
            let thresholds = [1.0, 100.0];
            let a = run_scan(&map, &thresholds, &points, &cfg, &quantity, &constraint).unwrap();
            points.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let b = run_scan(&map, &thresholds, &points, &cfg, &quantity, &constraint).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
