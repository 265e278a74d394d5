//! The acceptance suite as library code, shared by the `acceptance` test
//! target and the `report` subcommand.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::branch::{
    continue_branch, discs_of_univalence, min_pairwise_boundary_distance, tract_angular_measure, ObstructionKind,
};
use crate::catalog::{semiconjugacy_residual, MODEL_F1_CRITICAL_VALUE};
use crate::dynamics::{certify_hyperbolic, iterate, CertificateStatus, EscapePolicy, FixedPointClass, OrbitStatus};
use crate::instability::{find_instability_parameter, phi, zeros_of_f1};
use crate::metrics::{eta_scan, poly_decay_scan, spherical_expansion_scan};
use crate::raster::{render, Classifier, RasterConfig, Viewport};
use crate::{Disc, EntireMap, Result, SamplerConfig, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    /// Measured quantities, formatted deterministically.
    pub detail: String,
}

impl CriterionOutcome {
    pub fn status(&self) -> &'static str {
        if self.passed {
            "PASS"
        } else {
            "FAIL"
        }
    }
}

pub const CRITERIA: [(u8, &str); 12] = [
    (1, "fixed-point identities"),
    (2, "semiconjugacy"),
    (3, "eta dichotomy"),
    (4, "spherical expansion"),
    (5, "polynomial decay"),
    (6, "hyperbolicity certificate"),
    (7, "inverse branch"),
    (8, "tract geometry"),
    (9, "instability search"),
    (10, "basin render consistency"),
    (11, "baker and wandering orbits"),
    (12, "zeros asymptotics"),
];

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Runs criterion `id` (1 to 12). Library errors become failures with the
/// error in the detail.
pub fn run_criterion(id: u8) -> Option<CriterionOutcome> {
    let title = CRITERIA.iter().find(|(k, _)| *k == id)?.1;
    let result = match id {
        1 => fixed_point_identities(),
        2 => semiconjugacy(),
        3 => eta_dichotomy(),
        4 => spherical_expansion(),
        5 => polynomial_decay(),
        6 => hyperbolicity(),
        7 => inverse_branch(),
        8 => tract_geometry(),
        9 => instability_search(),
        10 => render_consistency(),
        11 => baker_and_wandering(),
        12 => zeros_asymptotics(),
        _ => return None,
    };
    let (passed, detail) = match result {
        Ok(pair) => pair,
        Err(e) => (false, format!("error kind={} {e}", e.kind())),
    };
    Some(CriterionOutcome {
        id,
        title,
        passed,
        detail,
    })
}

pub fn run_all() -> Vec<CriterionOutcome> {
    CRITERIA.iter().filter_map(|&(id, _)| run_criterion(id)).collect()
}

/// `criterion,title,status,detail`, one row per outcome. Details hold no
/// timings, so reruns give identical bytes.
pub fn summary_csv(outcomes: &[CriterionOutcome]) -> String {
    let mut out = String::from("criterion,title,status,detail\n");
    for o in outcomes {
        let detail = o.detail.replace('"', "'");
        let _ = writeln!(out, "{},{},{},\"{}\"", o.id, o.title, o.status(), detail);
    }
    out
}

type Check = Result<(bool, String)>;

fn fixed_point_identities() -> Check {
    let f1 = EntireMap::f1();
    let f2 = EntireMap::f2();
    let mut worst_value = 0.0f64;
    let mut worst_slope = 0.0f64;
    for n in -5..=5 {
        let z = c(0.0, TAU * n as f64);
        let w = f2.evaluate(z).finite().ok_or(crate::Error::OverflowAtPoint(z))?;
        let m = f2.derivative(z).finite().ok_or(crate::Error::OverflowAtPoint(z))?;
        worst_value = worst_value.max((w - z).norm());
        worst_slope = worst_slope.max(m.norm());
    }
    let z = c(0.0, PI);
    let w = f1.evaluate(z).finite().ok_or(crate::Error::OverflowAtPoint(z))?;
    let m = f1.derivative(z).finite().ok_or(crate::Error::OverflowAtPoint(z))?;
    let class = FixedPointClass::of_multiplier(m);
    let passed = worst_value <= 1e-10
        && worst_slope <= 1e-10
        && (w - z).norm() <= 1e-10
        && (m - 2.0).norm() <= 1e-10
        && class == FixedPointClass::Repelling;
    let detail = format!(
        "max|f2(zn)-zn|={worst_value:.3e} max|f2'(zn)|={worst_slope:.3e} |f1(ipi)-ipi|={:.3e} m={:.12} {class:?}",
        (w - z).norm(),
        m.re
    );
    Ok((passed, detail))
}

const SEMICONJUGACY_SAMPLES: usize = 10_000;
const SEMICONJUGACY_SEED: u64 = 0x5eed;

/// Share of samples with residual below `1e-10`, over non-overflowing samples.
pub fn semiconjugacy_fraction(map: &EntireMap, model: &EntireMap, seed: u64) -> Result<(f64, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut good = 0usize;
    let mut counted = 0usize;
    for _ in 0..SEMICONJUGACY_SAMPLES {
        let z = c(rng.gen_range(-20.0..=20.0), rng.gen_range(-20.0..=20.0));
        match semiconjugacy_residual(map, model, z) {
            Ok(r) => {
                counted += 1;
                if r < 1e-10 {
                    good += 1;
                }
            }
            Err(crate::Error::OverflowInChain(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok((good as f64 / counted.max(1) as f64, counted))
}

fn semiconjugacy() -> Check {
    let (a, na) = semiconjugacy_fraction(&EntireMap::f1(), &EntireMap::model_f1(), SEMICONJUGACY_SEED)?;
    let (b, nb) = semiconjugacy_fraction(&EntireMap::f2(), &EntireMap::model_f2(), SEMICONJUGACY_SEED)?;
    let detail = format!("f1/F1 {:.4} of {na}; f2/F2 {:.4} of {nb}; need 0.95", a, b);
    Ok((a >= 0.95 && b >= 0.95, detail))
}

const ETA_THRESHOLDS: [f64; 3] = [1e2, 1e4, 1e8];

fn eta_dichotomy() -> Check {
    let cfg = SamplerConfig::default();
    let lambda = 0.25;
    let exp = eta_scan(&EntireMap::lambda_exp(c(lambda, 0.0)), &ETA_THRESHOLDS, &cfg)?;
    let increasing = exp.infima.windows(2).all(|w| w[0] < w[1]);
    let close = ETA_THRESHOLDS.iter().zip(&exp.infima).all(|(r, v)| {
        let expected = (r / lambda).ln();
        ((v - expected) / expected).abs() <= 0.1
    });
    let f1 = eta_scan(&EntireMap::f1(), &ETA_THRESHOLDS, &cfg)?;
    let small = f1.infima.iter().all(|&v| v <= 1e-8);
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.4e}")).collect::<Vec<_>>().join(" ");
    let detail = format!(
        "lambda-exp infima [{}]; f1 infima [{}]",
        fmt(&exp.infima),
        fmt(&f1.infima)
    );
    Ok((increasing && close && small, detail))
}

fn spherical_expansion() -> Check {
    let report = spherical_expansion_scan(&EntireMap::lambda_exp(c(1.0, 0.0)), 1e6, &SamplerConfig::default())?;
    let v = report.infima[0];
    let w = report.witnesses[0];
    Ok((v < 1e-6, format!("infimum {v:.4e} at {:.6}{:+.6}i", w.re, w.im)))
}

fn polynomial_decay() -> Check {
    // Only curve samples, so the witness lies on a traced asymptotic curve.
    let cfg = SamplerConfig {
        use_grid: false,
        probes: 0,
        refine_rounds: 0,
        ..SamplerConfig::default()
    };
    let report = poly_decay_scan(
        &EntireMap::model_f1(),
        c(0.0, 0.0),
        Disc::new(c(0.0, 0.0), 0.1),
        4.0,
        &cfg,
    )?;
    let v = report.infima[0];
    let w = report.witnesses[0];
    Ok((
        v < 1e-6,
        format!("infimum {v:.4e} at {:.6}{:+.6}i on an asymptotic curve", w.re, w.im),
    ))
}

fn hyperbolicity() -> Check {
    let model = certify_hyperbolic(&EntireMap::model_f1(), &[0.5]);
    let exp = certify_hyperbolic(&EntireMap::lambda_exp(c(0.25, 0.0)), &[1.0]);
    let f1 = certify_hyperbolic(&EntireMap::f1(), &[1.0]);
    let within = |cert: &crate::dynamics::HyperbolicityCertificate, lo: f64, hi: f64| {
        cert.status == CertificateStatus::Certified && cert.sup_bound.is_some_and(|s| (lo..=hi).contains(&s))
    };
    let passed =
        within(&model, 0.303, 0.304) && within(&exp, 0.679, 0.680) && f1.status == CertificateStatus::FailedUnboundedS;
    let sup =
        |cert: &crate::dynamics::HyperbolicityCertificate| cert.sup_bound.map_or("none".into(), |s| format!("{s:.6}"));
    let detail = format!(
        "model-F1 {:?} sup {}; lambda-exp {:?} sup {}; f1 {:?}",
        model.status,
        sup(&model),
        exp.status,
        sup(&exp),
        f1.status
    );
    Ok((passed, detail))
}

fn inverse_branch() -> Check {
    let exp = continue_branch(&EntireMap::lambda_exp(c(1.0, 0.0)), c(0.0, 0.0), 1e3)?;
    let exp_ok = (exp.radius - 1.0).abs() <= 1e-4
        && matches!(exp.obstruction, Some(o) if o.kind == ObstructionKind::Asymptotic && o.s.norm() < 1e-6);
    let model = continue_branch(&EntireMap::model_f1(), c(1.0, 0.0), 1e3)?;
    let limit = match model.obstruction.map(|o| (o.s, o.kind)) {
        Some((s, ObstructionKind::Critical { limit })) if (s - MODEL_F1_CRITICAL_VALUE).norm() < 1e-6 => Some(limit),
        _ => None,
    };
    let model_ok = (model.radius - 1.1353).abs() <= 1e-3 && limit.is_some_and(|l| (l - c(-1.0, 0.0)).norm() <= 1e-6);
    let detail = format!(
        "exp radius {:.8} {:?}; model-F1 radius {:.8} limit {}",
        exp.radius,
        exp.obstruction.map(|o| o.kind),
        model.radius,
        limit.map_or("none".into(), |l| format!("{:.9}{:+.9}i", l.re, l.im))
    );
    Ok((exp_ok && model_ok, detail))
}

fn tract_geometry() -> Check {
    let k = 8usize;
    let tracts = discs_of_univalence(
        &EntireMap::lambda_exp(c(1.0, 0.0)),
        c(0.0, 0.0),
        Disc::new(c(0.0, 0.0), 0.1),
        k,
    )?;
    let mut passed = tracts.len() == k;
    let mut detail = String::new();
    for x in [1e2, 1e3] {
        let thetas = tracts
            .iter()
            .map(|t| tract_angular_measure(t, x))
            .collect::<Result<Vec<f64>>>()?;
        let sum: f64 = thetas.iter().sum();
        let inverse: f64 = thetas.iter().map(|t| 1.0 / t).sum();
        let bound = (k * k) as f64 / TAU;
        passed &= sum <= TAU && inverse >= bound;
        let _ = write!(detail, "x={x:e}: sum {sum:.6} inv-sum {inverse:.4} (>= {bound:.4}); ");
    }
    let distance = min_pairwise_boundary_distance(&tracts);
    passed &= distance > 0.0;
    let _ = write!(detail, "min boundary distance {distance:.4e}");
    Ok((passed, detail))
}

fn instability_search() -> Check {
    let r = find_instability_parameter(1, 1000, 0.01)?;
    let sample = phi(1, r.lambda0)?;
    let class = FixedPointClass::of_multiplier(sample.multiplier);
    let passed = r.winding >= 1
        && r.residual < 1e-8
        && (r.lambda0 - c(1.00025, 0.00171)).norm() < 5e-4
        && class == FixedPointClass::Repelling;
    let detail = format!(
        "lambda0 {:.10}{:+.10}i winding {} residual {:.2e} phi {class:?}",
        r.lambda0.re, r.lambda0.im, r.winding, r.residual
    );
    Ok((passed, detail))
}

fn render_consistency() -> Check {
    let viewport = Viewport::new(-3.0, 9.0, -13.0, 13.0);
    let mut f2 = RasterConfig::new(EntireMap::f2(), viewport, 800, 800);
    f2.classifier = Classifier::FixedPointBasins;
    let mut f3 = RasterConfig::new(EntireMap::f3(), viewport, 800, 800);
    f3.classifier = Classifier::DriftCompensatedBasins;
    let a1 = render(&f2, Some(1))?;
    let a8 = render(&f2, Some(8))?;
    let b1 = render(&f3, Some(1))?;
    let b8 = render(&f3, Some(8))?;
    let agreement = a8.mask_agreement(&b8);
    let identical = a1 == a8 && b1 == b8;
    let detail = format!(
        "class-0 agreement {agreement:.5}; f2 class-0 {} f3 class-0 {}; 1 vs 8 workers identical {identical}",
        a8.class_zero_count(),
        b8.class_zero_count()
    );
    Ok((agreement >= 0.99 && identical, detail))
}

fn baker_and_wandering() -> Check {
    let f1 = EntireMap::f1();
    let orbit = iterate(&f1, c(1.0, 0.0), 200, &EscapePolicy::default())?;
    let escaped = orbit.status == OrbitStatus::EscapedRight;
    let min_step = orbit
        .points
        .windows(2)
        .filter(|w| (1.0..=50.0).contains(&w[0].re))
        .map(|w| w[1].re - w[0].re)
        .fold(f64::INFINITY, f64::min);
    let f3 = EntireMap::f3();
    let mut shift = 0.0f64;
    for n in 0..=5 {
        let z = c(0.0, TAU * n as f64);
        let w = f3.evaluate(z).finite().ok_or(crate::Error::OverflowAtPoint(z))?;
        shift = shift.max((w - c(0.0, TAU * (n + 1) as f64)).norm());
    }
    let passed = escaped && min_step >= 0.63 && shift <= 1e-12;
    let detail = format!(
        "f1 orbit of 1: {:?} after {} steps, min Re step {min_step:.6}; max|f3(zn)-zn+1|={shift:.3e}",
        orbit.status,
        orbit.points.len() - 1
    );
    Ok((passed, detail))
}

fn zeros_asymptotics() -> Check {
    let search = zeros_of_f1((900.0, 1100.0), 2)?;
    let f1 = EntireMap::f1();
    let best = search
        .roots
        .iter()
        .filter_map(|&xi| {
            let value = f1.evaluate(xi).finite()?.norm();
            let log_y = xi.im.ln();
            Some((xi, value, (xi.re + log_y).abs() / log_y))
        })
        .find(|&(_, value, ratio)| value < 1e-10 && ratio < 0.1);
    let detail = match best {
        Some((xi, value, ratio)) => {
            format!(
                "{} roots; xi {:.9}{:+.9}i |f1|={value:.2e} ratio {ratio:.5}",
                search.roots.len(),
                xi.re,
                xi.im
            )
        }
        None => format!("{} roots, none satisfying both bounds", search.roots.len()),
    };
    Ok((best.is_some(), detail))
}
