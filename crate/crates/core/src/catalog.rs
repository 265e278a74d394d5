//! The closed catalog of entire maps.
//!
//! Every map is one of
//!
//! * `f_p(z) = z + c_p + e^-z` with `c_1 = 1`, `c_2 = -1`, `c_3 = -1 + 2πi`,
//!   optionally scaled as `λ·f_p`,
//! * `λ·e^z`,
//! * the logarithmic models `w·e^(w-1)` and `w·e^(w+1)` to which `f_1` and
//!   `f_2`/`f_3` are semiconjugate via `w = -e^-z`.
//!
//! Evaluation never produces non-finite values silently: once the real part of
//! the exponent of the exponential subterm exceeds [`OVERFLOW_EXPONENT`] the
//! result is reported as [`EvalResult::ExpOverflow`].

use std::f64::consts::{E, PI, TAU};
use std::fmt;
use std::str::FromStr;

use crate::{Error, Result, C64};

/// Real exponent above which an exponential subterm is treated as overflow.
pub const OVERFLOW_EXPONENT: f64 = 700.0;

pub const TWO_PI_I: C64 = C64::new(0.0, TAU);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MapKind {
    /// `z + 1 + e^-z`
    F1Fatou,
    /// `z - 1 + e^-z`, Newton's method for `e^z = 1`
    F2Newton,
    /// `z - 1 + 2πi + e^-z`
    F3Herman,
    /// `λ·f_p` for `p ∈ {1, 2, 3}`
    ScaledF(u8),
    /// `λ·e^z`
    LambdaExp,
    /// `w·e^w / e`
    ModelF1,
    /// `e·w·e^w`
    ModelF2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum OverflowDirection {
    /// The overflowing term points into the right half-plane.
    PositiveRealDominant,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvalResult {
    Finite(C64),
    ExpOverflow(OverflowDirection),
}

impl EvalResult {
    pub fn finite(self) -> Option<C64> {
        match self {
            EvalResult::Finite(v) => Some(v),
            EvalResult::ExpOverflow(_) => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, EvalResult::Finite(_))
    }
}

/// Critical points of a catalog map.
#[derive(Debug, Clone, PartialEq)]
pub enum CriticalFamily {
    None,
    Finite(Vec<C64>),
    /// `z_n = 2πin` for all integers `n`.
    TwoPiLattice,
}

/// Singular-value metadata of a catalog map.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularData {
    map: EntireMap,
    pub bounded_singular_set: bool,
    /// Finite singular values; empty for maps with an unbounded critical family.
    pub known_singular_values: Vec<C64>,
    pub critical_points: CriticalFamily,
    pub asymptotic_values: Vec<C64>,
}

impl SingularData {
    /// Certified upper bound of `|f|` on the closed disc `B(center, radius)`.
    pub fn sup_modulus_on_disc(&self, center: C64, radius: f64) -> f64 {
        self.map.sup_modulus_on_disc(center, radius)
    }

    /// Critical values lying in the open disc `B(center, radius)`.
    pub fn critical_values_in_disc(&self, center: C64, radius: f64) -> Vec<C64> {
        match &self.critical_points {
            CriticalFamily::None => Vec::new(),
            CriticalFamily::Finite(points) => points
                .iter()
                .filter_map(|&c| self.map.evaluate(c).finite())
                .filter(|v| (v - center).norm() < radius)
                .collect(),
            CriticalFamily::TwoPiLattice => {
                // Values λ(2πin + c + 1) lie on a vertical lattice of spacing 2π|λ|.
                let scale = self.map.lambda.norm() * TAU;
                let v0 = self.map.critical_value(0);
                let n_mid = ((center - v0) / (self.map.lambda * TWO_PI_I)).re.round() as i64;
                let span = (radius / scale).ceil() as i64 + 1;
                (n_mid - span..=n_mid + span)
                    .map(|n| self.map.critical_value(n))
                    .filter(|v| (v - center).norm() < radius)
                    .collect()
            }
        }
    }

    /// Whether `s` is a singular value (listed, or a member of the critical family).
    pub fn is_singular_value(&self, s: C64, tol: f64) -> bool {
        self.known_singular_values.iter().any(|v| (v - s).norm() <= tol)
            || !self.critical_values_in_disc(s, tol.max(1e-300)).is_empty()
    }

    pub fn is_asymptotic_value(&self, s: C64, tol: f64) -> bool {
        self.asymptotic_values.iter().any(|v| (v - s).norm() <= tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntireMap {
    pub kind: MapKind,
    pub lambda: C64,
}

fn cexp_checked(exponent: C64, prefactor_phase: f64) -> std::result::Result<C64, OverflowDirection> {
    if exponent.re > OVERFLOW_EXPONENT {
        let phase = prefactor_phase + exponent.im;
        if phase.cos() > 1e-6 {
            Err(OverflowDirection::PositiveRealDominant)
        } else {
            Err(OverflowDirection::Unknown)
        }
    } else {
        Ok(exponent.exp())
    }
}

impl EntireMap {
    pub fn f1() -> Self {
        Self {
            kind: MapKind::F1Fatou,
            lambda: C64::new(1.0, 0.0),
        }
    }

    pub fn f2() -> Self {
        Self {
            kind: MapKind::F2Newton,
            lambda: C64::new(1.0, 0.0),
        }
    }

    pub fn f3() -> Self {
        Self {
            kind: MapKind::F3Herman,
            lambda: C64::new(1.0, 0.0),
        }
    }

    pub fn scaled_f(p: u8, lambda: C64) -> Result<Self> {
        if !(1..=3).contains(&p) {
            return Err(Error::precondition(format!("scaled family index p={p} not in 1..=3")));
        }
        Ok(Self {
            kind: MapKind::ScaledF(p),
            lambda,
        })
    }

    pub fn lambda_exp(lambda: C64) -> Self {
        Self {
            kind: MapKind::LambdaExp,
            lambda,
        }
    }

    pub fn model_f1() -> Self {
        Self {
            kind: MapKind::ModelF1,
            lambda: C64::new(1.0, 0.0),
        }
    }

    pub fn model_f2() -> Self {
        Self {
            kind: MapKind::ModelF2,
            lambda: C64::new(1.0, 0.0),
        }
    }

    /// `(λ, c)` for maps of the form `λ(z + c + e^-z)`.
    fn fatou_form(&self) -> Option<(C64, C64)> {
        let offset = |p: u8| match p {
            1 => C64::new(1.0, 0.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(-1.0, TAU),
        };
        match self.kind {
            MapKind::F1Fatou => Some((C64::new(1.0, 0.0), offset(1))),
            MapKind::F2Newton => Some((C64::new(1.0, 0.0), offset(2))),
            MapKind::F3Herman => Some((C64::new(1.0, 0.0), offset(3))),
            MapKind::ScaledF(p) => Some((self.lambda, offset(p))),
            _ => None,
        }
    }

    /// Index `p` of the underlying `f_p`, if the map is one of the `f_p` family.
    pub fn family_index(&self) -> Option<u8> {
        match self.kind {
            MapKind::F1Fatou => Some(1),
            MapKind::F2Newton => Some(2),
            MapKind::F3Herman => Some(3),
            MapKind::ScaledF(p) => Some(p),
            _ => None,
        }
    }

    /// Model exponent shift: `w·e^(w + shift)`.
    fn model_shift(&self) -> Option<f64> {
        match self.kind {
            MapKind::ModelF1 => Some(-1.0),
            MapKind::ModelF2 => Some(1.0),
            _ => None,
        }
    }

    pub fn evaluate(&self, z: C64) -> EvalResult {
        if let Some((lambda, c)) = self.fatou_form() {
            return match cexp_checked(-z, lambda.arg()) {
                Ok(e) => EvalResult::Finite(lambda * (z + c + e)),
                Err(dir) => EvalResult::ExpOverflow(dir),
            };
        }
        if let Some(shift) = self.model_shift() {
            return match cexp_checked(z + shift, z.arg()) {
                Ok(e) => EvalResult::Finite(z * e),
                Err(dir) => EvalResult::ExpOverflow(dir),
            };
        }
        match cexp_checked(z, self.lambda.arg()) {
            Ok(e) => EvalResult::Finite(self.lambda * e),
            Err(dir) => EvalResult::ExpOverflow(dir),
        }
    }

    pub fn derivative(&self, z: C64) -> EvalResult {
        if let Some((lambda, _)) = self.fatou_form() {
            return match cexp_checked(-z, lambda.arg() + PI) {
                Ok(e) => EvalResult::Finite(lambda * (1.0 - e)),
                Err(dir) => EvalResult::ExpOverflow(dir),
            };
        }
        if let Some(shift) = self.model_shift() {
            return match cexp_checked(z + shift, (1.0 + z).arg()) {
                Ok(e) => EvalResult::Finite((1.0 + z) * e),
                Err(dir) => EvalResult::ExpOverflow(dir),
            };
        }
        self.evaluate(z)
    }

    pub fn second_derivative(&self, z: C64) -> EvalResult {
        if let Some((lambda, _)) = self.fatou_form() {
            return match cexp_checked(-z, lambda.arg()) {
                Ok(e) => EvalResult::Finite(lambda * e),
                Err(dir) => EvalResult::ExpOverflow(dir),
            };
        }
        if let Some(shift) = self.model_shift() {
            return match cexp_checked(z + shift, (2.0 + z).arg()) {
                Ok(e) => EvalResult::Finite((2.0 + z) * e),
                Err(dir) => EvalResult::ExpOverflow(dir),
            };
        }
        self.evaluate(z)
    }

    /// A logarithm of `f(z)` and its derivative `f'/f`, for maps omitting 0.
    ///
    /// The imaginary part is only defined modulo 2π. Stays finite where
    /// `f(z)` itself under- or overflows.
    pub(crate) fn log_value(&self, z: C64) -> Option<(C64, C64)> {
        if let Some(shift) = self.model_shift() {
            if z == C64::new(0.0, 0.0) {
                return None;
            }
            return Some((z.ln() + z + shift, 1.0 + 1.0 / z));
        }
        match self.kind {
            MapKind::LambdaExp => Some((self.lambda.ln() + z, C64::new(1.0, 0.0))),
            _ => None,
        }
    }

    /// Translation drift `c` with `f^n(z) = g^n(z) + nc`; nonzero only for `f_3`.
    pub fn drift_per_iterate(&self) -> C64 {
        match self.kind {
            MapKind::F3Herman => TWO_PI_I,
            _ => C64::new(0.0, 0.0),
        }
    }

    /// Value at the critical point `2πin`, for maps of the `f_p` family.
    pub(crate) fn critical_value(&self, n: i64) -> C64 {
        let (lambda, c) = self
            .fatou_form()
            .expect("critical lattice only exists for the f_p family");
        // e^{-2πin} = 1 exactly.
        lambda * (C64::new(0.0, TAU * n as f64) + c + 1.0)
    }

    pub fn singular_values(&self) -> SingularData {
        let zero = C64::new(0.0, 0.0);
        match self.kind {
            MapKind::F1Fatou | MapKind::F2Newton | MapKind::F3Herman | MapKind::ScaledF(_) => SingularData {
                map: *self,
                bounded_singular_set: false,
                known_singular_values: Vec::new(),
                critical_points: CriticalFamily::TwoPiLattice,
                asymptotic_values: Vec::new(),
            },
            MapKind::LambdaExp => SingularData {
                map: *self,
                bounded_singular_set: true,
                known_singular_values: vec![zero],
                critical_points: CriticalFamily::None,
                asymptotic_values: vec![zero],
            },
            MapKind::ModelF1 | MapKind::ModelF2 => {
                let c = C64::new(-1.0, 0.0);
                let cv = self.evaluate(c).finite().expect("finite at -1");
                SingularData {
                    map: *self,
                    bounded_singular_set: true,
                    known_singular_values: vec![zero, cv],
                    critical_points: CriticalFamily::Finite(vec![c]),
                    asymptotic_values: vec![zero],
                }
            }
        }
    }

    /// Certified upper bound of `|f|` on the closed disc `B(center, radius)`.
    ///
    /// Exact (attained) for origin-centred discs of `λe^z` and the models.
    pub fn sup_modulus_on_disc(&self, center: C64, radius: f64) -> f64 {
        let max_abs = center.norm() + radius;
        if let Some((lambda, c)) = self.fatou_form() {
            // |e^-z| ≤ e^{r - Re c}
            return lambda.norm() * (max_abs + c.norm() + (radius - center.re).exp());
        }
        if let Some(shift) = self.model_shift() {
            return max_abs * (center.re + radius + shift).exp();
        }
        self.lambda.norm() * (center.re + radius).exp()
    }

    /// Pre-images of `zeta` on the logarithmic tracts over the asymptotic value 0,
    /// one per branch index `k ∈ ks`.
    ///
    /// Returns `None` for maps without a finite asymptotic value.
    pub fn tract_seeds(&self, zeta: C64, ks: impl IntoIterator<Item = i64>) -> Option<Vec<C64>> {
        match self.kind {
            MapKind::LambdaExp => {
                let base = (zeta / self.lambda).ln();
                Some(ks.into_iter().map(|k| base + TWO_PI_I * k as f64).collect())
            }
            MapKind::ModelF1 | MapKind::ModelF2 => {
                let shift = self.model_shift().unwrap();
                // w + shift + ln w = ln ζ (+2πik): the Lambert-W branch k.
                let log_zeta = zeta.ln();
                Some(
                    ks.into_iter()
                        .map(|k| {
                            let target = log_zeta - shift + TWO_PI_I * k as f64;
                            let mut w = target;
                            for _ in 0..60 {
                                let next = target - w.ln();
                                if (next - w).norm() < 1e-15 * (1.0 + w.norm()) {
                                    w = next;
                                    break;
                                }
                                w = next;
                            }
                            w
                        })
                        .collect(),
                )
            }
            _ => None,
        }
    }
}

impl fmt::Display for EntireMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            MapKind::F1Fatou => write!(f, "f1"),
            MapKind::F2Newton => write!(f, "f2"),
            MapKind::F3Herman => write!(f, "f3"),
            MapKind::ScaledF(p) => write!(f, "scaled-f{p}:{},{}", self.lambda.re, self.lambda.im),
            MapKind::LambdaExp => write!(f, "lambda-exp:{},{}", self.lambda.re, self.lambda.im),
            MapKind::ModelF1 => write!(f, "model-F1"),
            MapKind::ModelF2 => write!(f, "model-F2"),
        }
    }
}

/// Parses `RE,IM` into a complex number.
pub fn parse_complex(s: &str) -> Option<C64> {
    let (re, im) = s.split_once(',')?;
    let re: f64 = re.trim().parse().ok()?;
    let im: f64 = im.trim().parse().ok()?;
    (re.is_finite() && im.is_finite()).then(|| C64::new(re, im))
}

impl FromStr for EntireMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownMap(s.to_string());
        match s {
            "f1" => return Ok(Self::f1()),
            "f2" => return Ok(Self::f2()),
            "f3" => return Ok(Self::f3()),
            "model-F1" => return Ok(Self::model_f1()),
            "model-F2" => return Ok(Self::model_f2()),
            _ => {}
        }
        let (head, arg) = s.split_once(':').ok_or_else(unknown)?;
        let lambda = parse_complex(arg).ok_or_else(unknown)?;
        match head {
            "lambda-exp" => Ok(Self::lambda_exp(lambda)),
            "scaled-f1" => Self::scaled_f(1, lambda),
            "scaled-f2" => Self::scaled_f(2, lambda),
            "scaled-f3" => Self::scaled_f(3, lambda),
            _ => Err(unknown()),
        }
    }
}

/// `|-e^{-f(z)} - F(-e^{-z})|` for a map and its logarithmic model.
///
/// The semiconjugacy holds for `(f1, model-F1)`, `(f2, model-F2)` and `(f3, model-F2)`.
pub fn semiconjugacy_residual(map: &EntireMap, model: &EntireMap, z: C64) -> Result<f64> {
    let valid = matches!(
        (map.kind, model.kind),
        (MapKind::F1Fatou, MapKind::ModelF1)
            | (MapKind::F2Newton, MapKind::ModelF2)
            | (MapKind::F3Herman, MapKind::ModelF2)
    );
    if !valid {
        return Err(Error::precondition(format!("{map} is not semiconjugate to {model}")));
    }
    let overflow = || Error::OverflowInChain(z);
    let fz = map.evaluate(z).finite().ok_or_else(overflow)?;
    let lhs = -cexp_checked(-fz, 0.0).map_err(|_| overflow())?;
    let w = -cexp_checked(-z, 0.0).map_err(|_| overflow())?;
    let rhs = model.evaluate(w).finite().ok_or_else(overflow)?;
    Ok((lhs - rhs).norm())
}

/// `-e^{-2}`, the critical value of the model `w·e^(w-1)`.
pub const MODEL_F1_CRITICAL_VALUE: f64 = -1.0 / (E * E);

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn all_maps() -> Vec<EntireMap> {
        vec![
            EntireMap::f1(),
            EntireMap::f2(),
            EntireMap::f3(),
            EntireMap::scaled_f(1, c(1.0002, 0.0017)).unwrap(),
            EntireMap::scaled_f(2, c(0.9, -0.1)).unwrap(),
            EntireMap::scaled_f(3, c(1.1, 0.2)).unwrap(),
            EntireMap::lambda_exp(c(0.25, 0.0)),
            EntireMap::lambda_exp(c(1.0, 0.5)),
            EntireMap::model_f1(),
            EntireMap::model_f2(),
        ]
    }

    #[test]
    fn fixed_points_from_the_catalog() {
        let ipi = c(0.0, PI);
        let v = EntireMap::f1().evaluate(ipi).finite().unwrap();
        assert!((v - ipi).norm() < 1e-14);
        let z1 = c(0.0, TAU);
        let v = EntireMap::f2().evaluate(z1).finite().unwrap();
        assert!((v - z1).norm() < 1e-14);
        assert_eq!(
            EntireMap::f1().evaluate(c(-800.0, 0.0)),
            EvalResult::ExpOverflow(OverflowDirection::PositiveRealDominant)
        );
    }

    #[test]
    fn derivative_examples() {
        let d = EntireMap::f1().derivative(c(0.0, PI)).finite().unwrap();
        assert!((d - 2.0).norm() < 1e-14);
        let d = EntireMap::f2().derivative(c(0.0, TAU)).finite().unwrap();
        assert!(d.norm() < 1e-14);
        let d = EntireMap::model_f2().derivative(c(0.0, 0.0)).finite().unwrap();
        assert!((d - E).norm() < 1e-15);
    }

    #[test]
    fn overflow_status_tracks_exponent_threshold() {
        let f = EntireMap::f1();
        assert!(f.evaluate(c(-699.9, 3.0)).is_finite());
        assert!(!f.evaluate(c(-700.1, 3.0)).is_finite());
        // e^{-z} at z = -800 + iπ points along the negative real axis
        assert_eq!(
            f.evaluate(c(-800.0, PI)),
            EvalResult::ExpOverflow(OverflowDirection::Unknown)
        );
        let e = EntireMap::lambda_exp(c(1.0, 0.0));
        assert!(!e.evaluate(c(700.5, 0.0)).is_finite());
        assert!(!EntireMap::model_f1().evaluate(c(702.0, 0.0)).is_finite());
        assert!(EntireMap::model_f1().evaluate(c(700.5, 0.0)).is_finite());
    }

    #[test]
    fn finite_difference_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = 1e-6;
        for map in all_maps() {
            for _ in 0..1000 {
                let r = 20.0 * rng.gen::<f64>().sqrt();
                let z = C64::from_polar(r, rng.gen_range(0.0..TAU));
                let (Some(fp), Some(a), Some(b)) = (
                    map.derivative(z).finite(),
                    map.evaluate(z + h).finite(),
                    map.evaluate(z - h).finite(),
                ) else {
                    continue;
                };
                let fd = (a - b) / (2.0 * h);
                let scale = fp.norm().max(1.0).max(a.norm() * 1e-4);
                assert!((fp - fd).norm() / scale < 1e-6, "{map} at {z}: {fp} vs {fd}");
            }
        }
    }

    #[test]
    fn f2_translation_symmetry_and_f3_drift() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (f2, f3) = (EntireMap::f2(), EntireMap::f3());
        for _ in 0..1000 {
            let z = c(rng.gen_range(-5.0..20.0), rng.gen_range(-20.0..20.0));
            let a = f2.evaluate(z + TWO_PI_I).finite().unwrap();
            let b = f2.evaluate(z).finite().unwrap() + TWO_PI_I;
            assert!((a - b).norm() <= 1e-12 * (1.0 + b.norm()), "{z}");
            let a = f3.evaluate(z).finite().unwrap();
            let b = f2.evaluate(z).finite().unwrap() + TWO_PI_I;
            assert!((a - b).norm() <= 1e-12 * (1.0 + b.norm()));
        }
        assert_eq!(f3.drift_per_iterate(), TWO_PI_I);
        assert_eq!(f2.drift_per_iterate(), c(0.0, 0.0));
    }

    #[test]
    fn scaled_maps_compose_as_products() {
        let lambda = c(0.97, 0.13);
        for p in 1..=3u8 {
            let base = match p {
                1 => EntireMap::f1(),
                2 => EntireMap::f2(),
                _ => EntireMap::f3(),
            };
            let scaled = EntireMap::scaled_f(p, lambda).unwrap();
            for z in [c(0.3, 0.7), c(-2.0, 5.0), c(4.0, -1.0)] {
                let a = scaled.evaluate(z).finite().unwrap();
                let b = lambda * base.evaluate(z).finite().unwrap();
                assert_eq!(a, b);
            }
        }
        assert!(EntireMap::scaled_f(4, lambda).is_err());
    }

    #[test]
    fn singular_metadata() {
        let m = EntireMap::model_f1().singular_values();
        assert!(m.bounded_singular_set);
        assert_eq!(m.known_singular_values.len(), 2);
        assert!((m.known_singular_values[1].re - MODEL_F1_CRITICAL_VALUE).abs() < 1e-15);
        for map in all_maps() {
            let data = map.singular_values();
            let bounded = matches!(map.kind, MapKind::LambdaExp | MapKind::ModelF1 | MapKind::ModelF2);
            assert_eq!(data.bounded_singular_set, bounded, "{map}");
            let crit: Vec<C64> = match &data.critical_points {
                CriticalFamily::None => vec![],
                CriticalFamily::Finite(v) => v.clone(),
                CriticalFamily::TwoPiLattice => (-5..=5).map(|n| c(0.0, TAU * n as f64)).collect(),
            };
            for cp in crit {
                assert!(map.derivative(cp).finite().unwrap().norm() < 1e-12, "{map} {cp}");
            }
        }
        let f2 = EntireMap::f2().singular_values();
        let found = f2.critical_values_in_disc(c(0.0, TAU * 40.0), 0.5);
        assert_eq!(found.len(), 1);
        assert!((found[0] - c(0.0, TAU * 40.0)).norm() < 1e-12);
        let f1 = EntireMap::f1().singular_values();
        assert!(f1.is_singular_value(c(2.0, TAU), 1e-9));
        assert!(!f1.is_singular_value(c(2.0, 3.0), 1e-9));
        let e = EntireMap::lambda_exp(c(0.25, 0.0)).singular_values();
        assert_eq!(e.known_singular_values, vec![c(0.0, 0.0)]);
    }

    #[test]
    fn sup_modulus_is_sound_on_boundary_samples() {
        let discs = [
            (c(0.0, 0.0), 0.5),
            (c(0.0, 0.0), 1.0),
            (c(1.0, -2.0), 0.7),
            (c(-3.0, 4.0), 2.0),
        ];
        for map in all_maps() {
            for &(center, r) in &discs {
                let bound = map.sup_modulus_on_disc(center, r);
                let max = (0..10_000)
                    .map(|k| {
                        let z = center + C64::from_polar(r, TAU * k as f64 / 10_000.0);
                        map.evaluate(z).finite().unwrap().norm()
                    })
                    .fold(0.0, f64::max);
                assert!(bound >= max, "{map}: {bound} < {max}");
            }
        }
        let b = EntireMap::model_f1().sup_modulus_on_disc(c(0.0, 0.0), 0.5);
        assert!((b - 0.5 * (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn semiconjugacy_examples() {
        let r = semiconjugacy_residual(&EntireMap::f1(), &EntireMap::model_f1(), c(0.3, 0.7)).unwrap();
        assert!(r < 1e-10);
        let r = semiconjugacy_residual(&EntireMap::f2(), &EntireMap::model_f2(), c(0.0, PI)).unwrap();
        assert!(r < 1e-10);
        let r = semiconjugacy_residual(&EntireMap::f3(), &EntireMap::model_f2(), c(1.5, -2.0)).unwrap();
        assert!(r < 1e-10);
        let err = semiconjugacy_residual(&EntireMap::f1(), &EntireMap::model_f1(), c(-800.0, 0.0));
        assert!(matches!(err, Err(Error::OverflowInChain(_))));
        assert!(semiconjugacy_residual(&EntireMap::f1(), &EntireMap::model_f2(), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn identifiers_round_trip() {
        for id in [
            "f1",
            "f2",
            "f3",
            "model-F1",
            "model-F2",
            "lambda-exp:0.25,0",
            "scaled-f1:1.00025,0.00171",
        ] {
            let map: EntireMap = id.parse().unwrap();
            let again: EntireMap = map.to_string().parse().unwrap();
            assert_eq!(map, again);
        }
        for bad in ["bogus", "scaled-f4:1,0", "lambda-exp:1", "lambda-exp:a,b", "F1"] {
            assert!(bad.parse::<EntireMap>().is_err(), "{bad}");
        }
    }

    #[test]
    fn tract_seeds_solve_the_equation() {
        let zeta = c(0.05, 0.0);
        for map in [
            EntireMap::lambda_exp(c(1.0, 0.0)),
            EntireMap::model_f1(),
            EntireMap::model_f2(),
        ] {
            let seeds = map.tract_seeds(zeta, 1..=4).unwrap();
            for s in seeds {
                let v = map.evaluate(s).finite().unwrap();
                assert!((v - zeta).norm() < 1e-12, "{map}: {s} -> {v}");
            }
        }
        assert!(EntireMap::f1().tract_seeds(zeta, 0..1).is_none());
    }
}
