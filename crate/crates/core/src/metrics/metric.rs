use crate::metrics::Region;
use crate::{EntireMap, Error, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub enum MetricKind {
    Euclidean,
    /// `1/|z|`
    Cylindrical,
    /// `1/(1+|z|²)`
    Spherical,
    /// `1/(1+|z|^τ)`
    PolyDecay(f64),
    /// Curvature −1 hyperbolic density of the region (disc, half-plane, or
    /// exterior of a disc).
    HyperbolicExact,
    /// `1/(2·dist(z, ∂Ω))`
    HyperbolicLowerEstimate,
    /// `σ(f(z))·|f'(z)|`
    Pullback {
        base: Box<ConformalMetric>,
        map: EntireMap,
    },
}

/// A conformal density `ρ(z)|dz|` on a region.
///
/// Completeness at infinity is a per-variant analytic fact (Euclidean and
/// cylindrical are complete at ∞, `PolyDecay` with `τ > 1` is not) and is not
/// tested numerically.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalMetric {
    pub kind: MetricKind,
    pub region: Region,
}

impl ConformalMetric {
    pub fn euclidean(region: Region) -> Self {
        Self {
            kind: MetricKind::Euclidean,
            region,
        }
    }

    /// Cylindrical metric on the punctured plane.
    pub fn cylindrical() -> Self {
        Self {
            kind: MetricKind::Cylindrical,
            region: Region::punctured_plane(),
        }
    }

    pub fn cylindrical_on(region: Region) -> Self {
        Self {
            kind: MetricKind::Cylindrical,
            region,
        }
    }

    pub fn spherical() -> Self {
        Self {
            kind: MetricKind::Spherical,
            region: Region::WholePlane,
        }
    }

    pub fn poly_decay(tau: f64) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::precondition(format!(
                "poly-decay exponent must be positive, got {tau}"
            )));
        }
        Ok(Self {
            kind: MetricKind::PolyDecay(tau),
            region: Region::WholePlane,
        })
    }

    pub fn hyperbolic_exact(region: Region) -> Result<Self> {
        match region {
            Region::UnitDisc | Region::ExteriorOfRadius(_) | Region::RightHalfPlane(_) => Ok(Self {
                kind: MetricKind::HyperbolicExact,
                region,
            }),
            other => Err(Error::precondition(format!(
                "no closed-form hyperbolic density on {other:?}"
            ))),
        }
    }

    pub fn hyperbolic_lower_estimate(region: Region) -> Result<Self> {
        if region == Region::WholePlane {
            return Err(Error::precondition("the plane carries no hyperbolic metric"));
        }
        Ok(Self {
            kind: MetricKind::HyperbolicLowerEstimate,
            region,
        })
    }

    pub fn pullback(base: ConformalMetric, map: EntireMap, region: Region) -> Self {
        Self {
            kind: MetricKind::Pullback {
                base: Box::new(base),
                map,
            },
            region,
        }
    }

    pub fn density(&self, z: C64) -> Result<f64> {
        if !self.region.contains(z) {
            return Err(Error::OutsideRegion(z));
        }
        let r = z.norm();
        Ok(match &self.kind {
            MetricKind::Euclidean => 1.0,
            MetricKind::Cylindrical => {
                if r == 0.0 {
                    return Err(Error::OutsideRegion(z));
                }
                1.0 / r
            }
            MetricKind::Spherical => 1.0 / (1.0 + r * r),
            MetricKind::PolyDecay(tau) => 1.0 / (1.0 + r.powf(*tau)),
            MetricKind::HyperbolicExact => match self.region {
                Region::UnitDisc => 2.0 / (1.0 - r * r),
                Region::RightHalfPlane(a) => 1.0 / (z.re - a),
                Region::ExteriorOfRadius(radius) => 1.0 / (r * (r.ln() - radius.ln())),
                _ => unreachable!("checked at construction"),
            },
            MetricKind::HyperbolicLowerEstimate => 0.5 / self.region.boundary_distance(z),
            MetricKind::Pullback { base, map } => {
                let fz = map.evaluate(z).finite().ok_or(Error::OverflowAtPoint(z))?;
                let dz = map.derivative(z).finite().ok_or(Error::OverflowAtPoint(z))?;
                base.density(fz)? * dz.norm()
            }
        })
    }
}

/// `‖Df(z)‖ = |f'(z)|·σ(f(z))/ρ(z)` for domain metric `ρ` and range metric `σ`.
pub fn deriv_norm(map: &EntireMap, z: C64, domain: &ConformalMetric, range: &ConformalMetric) -> Result<f64> {
    deriv_norm_composite(std::slice::from_ref(map), z, domain, range)
}

/// Derivative norm of the composition `maps[n-1] ∘ … ∘ maps[0]`, evaluated
/// sequentially.
pub fn deriv_norm_composite(
    maps: &[EntireMap],
    z: C64,
    domain: &ConformalMetric,
    range: &ConformalMetric,
) -> Result<f64> {
    let rho = domain.density(z)?;
    let mut w = z;
    let mut slope = 1.0;
    for map in maps {
        let d = map.derivative(w).finite().ok_or(Error::OverflowAtPoint(z))?;
        slope *= d.norm();
        w = map.evaluate(w).finite().ok_or(Error::OverflowAtPoint(z))?;
    }
    let sigma = range.density(w)?;
    Ok(slope * sigma / rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{E, TAU};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn density_examples() {
        assert_eq!(ConformalMetric::cylindrical().density(c(2.0, 0.0)).unwrap(), 0.5);
        assert_eq!(ConformalMetric::spherical().density(c(0.0, 0.0)).unwrap(), 1.0);
        let ext = ConformalMetric::hyperbolic_exact(Region::ExteriorOfRadius(1.0)).unwrap();
        assert!((ext.density(c(E, 0.0)).unwrap() - 1.0 / E).abs() < 1e-15);
        assert!(matches!(
            ConformalMetric::cylindrical().density(c(0.0, 0.0)),
            Err(Error::OutsideRegion(_))
        ));
        assert!(ext.density(c(0.5, 0.0)).is_err());
        assert!(ConformalMetric::hyperbolic_exact(Region::WholePlane).is_err());
        assert!(ConformalMetric::poly_decay(0.0).is_err());
    }

    #[test]
    fn deriv_norm_examples() {
        let exp = EntireMap::lambda_exp(c(1.0, 0.0));
        let cyl = ConformalMetric::cylindrical();
        let v = deriv_norm(&exp, c(2.0, 0.0), &cyl, &cyl).unwrap();
        assert!((v - 2.0).abs() < 1e-14);

        let rhp = ConformalMetric::hyperbolic_exact(Region::RightHalfPlane(0.0)).unwrap();
        let v = deriv_norm(&exp, c(3.0, 0.0), &rhp, &cyl).unwrap();
        assert!((v - 3.0).abs() < 1e-13);
        // e^{Re z}·e^{-Re z}·Re z = Re z off the axis too
        let v = deriv_norm(&exp, c(3.0, 1.7), &rhp, &cyl).unwrap();
        assert!((v - 3.0).abs() < 1e-13);
    }

    #[test]
    fn pullback_norm_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for map in [
            EntireMap::f1(),
            EntireMap::model_f1(),
            EntireMap::lambda_exp(c(0.25, 0.0)),
        ] {
            let sigma = ConformalMetric::spherical();
            let pull = ConformalMetric::pullback(sigma.clone(), map, Region::WholePlane);
            for _ in 0..200 {
                let z = c(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
                let v = deriv_norm(&map, z, &pull, &sigma).unwrap();
                assert!((v - 1.0).abs() <= 1e-12, "{map} {z} {v}");
            }
        }
    }

    #[test]
    fn chain_rule_for_sequential_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = EntireMap::model_f1();
        let f = EntireMap::lambda_exp(c(0.5, 0.1));
        let rho = ConformalMetric::spherical();
        let tau = ConformalMetric::poly_decay(1.5).unwrap();
        let sigma = ConformalMetric::euclidean(Region::WholePlane);
        for _ in 0..1000 {
            let z = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let whole = deriv_norm_composite(&[g, f], z, &rho, &sigma).unwrap();
            let gz = g.evaluate(z).finite().unwrap();
            let split = deriv_norm(&f, gz, &tau, &sigma).unwrap() * deriv_norm(&g, z, &rho, &tau).unwrap();
            assert!((whole - split).abs() <= 1e-10 * whole.abs().max(1e-300), "{z}");
        }
    }

    #[test]
    fn hyperbolic_sandwich() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let disc = ConformalMetric::hyperbolic_exact(Region::UnitDisc).unwrap();
        let half = ConformalMetric::hyperbolic_exact(Region::RightHalfPlane(-1.0)).unwrap();
        for _ in 0..1000 {
            let z = C64::from_polar(rng.gen::<f64>().sqrt() * 0.999_999, rng.gen_range(0.0..TAU));
            let d = disc.region.boundary_distance(z);
            let rho = disc.density(z).unwrap();
            assert!(0.5 / d <= rho && rho <= 2.0 / d);
            let z = c(rng.gen_range(-0.999..50.0), rng.gen_range(-50.0..50.0));
            let d = half.region.boundary_distance(z);
            let rho = half.density(z).unwrap();
            assert!(0.5 / d <= rho && rho <= 2.0 / d);
        }
    }
}
