use std::f64::consts::TAU;

use proptest::prelude::*;
use tefdyn::catalog::semiconjugacy_residual;
use tefdyn::raster::{render, Classifier, RasterConfig, Viewport};
use tefdyn::reproduce::{run_criterion, summary_csv};
use tefdyn::{EntireMap, C64};

proptest! {
    // Relative to the size of the images the identity holds to rounding.
    #[test]
    fn semiconjugacy_holds_relatively(re in -20.0..20.0f64, im in -20.0..20.0f64) {
        for (map, model) in [(EntireMap::f1(), EntireMap::model_f1()), (EntireMap::f2(), EntireMap::model_f2()), (EntireMap::f3(), EntireMap::model_f2())] {
            let z = C64::new(re, im);
            if let Ok(r) = semiconjugacy_residual(&map, &model, z) {
                let fz = map.evaluate(z).finite().unwrap();
                let scale = 1.0 + (-fz).exp().norm();
                prop_assert!(r <= 1e-10 * scale, "{z}: {r}");
            }
        }
    }

    #[test]
    fn f3_is_f2_shifted(re in -5.0..5.0f64, im in -30.0..30.0f64) {
        let z = C64::new(re, im);
        let a = EntireMap::f3().evaluate(z).finite().unwrap();
        let b = EntireMap::f2().evaluate(z).finite().unwrap();
        prop_assert!((a - b - C64::new(0.0, TAU)).norm() < 1e-9 * (1.0 + b.norm()));
    }
}

#[test]
fn f2_and_f3_basins_share_their_boundary() {
    let viewport = Viewport::new(-3.0, 9.0, -13.0, 13.0);
    let mut a = RasterConfig::new(EntireMap::f2(), viewport, 120, 120);
    a.classifier = Classifier::FixedPointBasins;
    let mut b = RasterConfig::new(EntireMap::f3(), viewport, 120, 120);
    b.classifier = Classifier::DriftCompensatedBasins;
    let (a, b) = (render(&a, Some(2)).unwrap(), render(&b, Some(3)).unwrap());
    assert!(a.mask_agreement(&b) >= 0.99);
    assert!(a.class_zero_count() > 0);
}

#[test]
fn summary_is_reproducible() {
    let run = || summary_csv(&[1, 6, 11].map(|id| run_criterion(id).unwrap()));
    let first = run();
    assert_eq!(first, run());
    assert_eq!(first.lines().count(), 4);
    assert!(first.lines().skip(1).all(|l| l.contains(",PASS,")));
}
