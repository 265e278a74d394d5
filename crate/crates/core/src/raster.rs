//! Deterministic rasters of Fatou/Julia classifications.
//!
//! Each pixel centre is iterated and assigned a class: 0 for pixels whose
//! orbit is unresolved within the budget (the Julia set approximation),
//! `k > 0` for a Fatou behaviour. Rows are computed in parallel into disjoint
//! slices, so the bytes do not depend on the number of workers.

use std::f64::consts::TAU;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{EntireMap, Error, EvalResult, OverflowDirection, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Viewport {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Viewport {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Self {
            re_min,
            re_max,
            im_min,
            im_max,
        }
    }

    pub fn translate(&self, by: C64) -> Self {
        Self::new(
            self.re_min + by.re,
            self.re_max + by.re,
            self.im_min + by.im,
            self.im_max + by.im,
        )
    }
}

impl FromStr for Viewport {
    type Err = Error;

    /// `re_min,re_max,im_min,im_max`
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::precondition(format!("bad viewport {s:?}")))?;
        match parts[..] {
            [a, b, c, d] => Ok(Self::new(a, b, c, d)),
            _ => Err(Error::precondition(format!("viewport needs four numbers, got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classifier {
    /// Class 1 for orbits escaping to the right, as in a Baker domain.
    EscapeRight,
    /// One class per limit `2πin`.
    FixedPointBasins,
    /// As `FixedPointBasins`, after removing the drift `k·c` from the `k`-th iterate.
    DriftCompensatedBasins,
}

impl FromStr for Classifier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "escape-right" => Ok(Self::EscapeRight),
            "basins" => Ok(Self::FixedPointBasins),
            "drift-basins" => Ok(Self::DriftCompensatedBasins),
            _ => Err(Error::precondition(format!("unknown classifier {s:?}"))),
        }
    }
}

impl Classifier {
    pub fn id(&self) -> &'static str {
        match self {
            Self::EscapeRight => "escape-right",
            Self::FixedPointBasins => "basins",
            Self::DriftCompensatedBasins => "drift-basins",
        }
    }

    /// The natural classifier for a catalog map.
    pub fn default_for(map: &EntireMap) -> Self {
        match map.family_index() {
            Some(2) => Self::FixedPointBasins,
            Some(3) => Self::DriftCompensatedBasins,
            _ => Self::EscapeRight,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RasterConfig {
    pub map: EntireMap,
    pub viewport: Viewport,
    pub width: usize,
    pub height: usize,
    pub budget: usize,
    pub classifier: Classifier,
    pub convergence: f64,
    pub escape_re: f64,
}

impl RasterConfig {
    pub fn new(map: EntireMap, viewport: Viewport, width: usize, height: usize) -> Self {
        Self {
            map,
            viewport,
            width,
            height,
            budget: 500,
            classifier: Classifier::default_for(&map),
            convergence: 1e-6,
            escape_re: 50.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 || self.width.saturating_mul(self.height) > 100_000_000 {
            return Err(Error::precondition(
                "raster size must be positive with at most 1e8 pixels",
            ));
        }
        let v = &self.viewport;
        let finite = [v.re_min, v.re_max, v.im_min, v.im_max].iter().all(|x| x.is_finite());
        if !finite || !(v.re_max > v.re_min) || !(v.im_max > v.im_min) {
            return Err(Error::precondition("viewport is degenerate"));
        }
        if self.budget == 0 {
            return Err(Error::precondition("iteration budget must be at least 1"));
        }
        Ok(())
    }

    /// Centre of pixel `(x, y)`; row 0 is the top of the viewport.
    pub fn pixel_center(&self, x: usize, y: usize) -> C64 {
        let v = &self.viewport;
        C64::new(
            v.re_min + (x as f64 + 0.5) * (v.re_max - v.re_min) / self.width as f64,
            v.im_max - (y as f64 + 0.5) * (v.im_max - v.im_min) / self.height as f64,
        )
    }

    pub fn to_json(&self) -> serde_json::Value {
        let v = &self.viewport;
        serde_json::json!({
            "map": self.map.to_string(),
            "viewport": [v.re_min, v.re_max, v.im_min, v.im_max],
            "size": [self.width, self.height],
            "budget": self.budget,
            "classifier": self.classifier.id(),
            "convergence": self.convergence,
            "escapeRe": self.escape_re,
        })
    }
}

fn basin_class(limit: C64) -> u8 {
    let n = (limit.im / TAU).round() as i64;
    1 + n.rem_euclid(255) as u8
}

/// Final state of a pixel orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PixelOrbit {
    Converged { limit: C64, residual: f64 },
    EscapedRight,
    Overflow(OverflowDirection),
    Unresolved,
}

pub fn pixel_orbit(cfg: &RasterConfig, z0: C64) -> PixelOrbit {
    let drift = match cfg.classifier {
        Classifier::DriftCompensatedBasins => cfg.map.drift_per_iterate(),
        _ => C64::new(0.0, 0.0),
    };
    let step = |z: C64| match cfg.map.evaluate(z) {
        EvalResult::Finite(w) => Ok(w - drift),
        EvalResult::ExpOverflow(dir) => Err(dir),
    };
    let mut z = z0;
    for _ in 0..cfg.budget {
        if z.re > cfg.escape_re {
            return PixelOrbit::EscapedRight;
        }
        let next = match step(z) {
            Ok(w) => w,
            Err(dir) => return PixelOrbit::Overflow(dir),
        };
        if (next - z).norm() < cfg.convergence {
            if let Ok(after) = step(next) {
                let residual = (after - next).norm();
                if residual < cfg.convergence {
                    return PixelOrbit::Converged { limit: next, residual };
                }
            }
        }
        z = next;
    }
    PixelOrbit::Unresolved
}

pub fn classify_pixel(cfg: &RasterConfig, z: C64) -> u8 {
    let orbit = pixel_orbit(cfg, z);
    match cfg.classifier {
        Classifier::EscapeRight => match orbit {
            PixelOrbit::EscapedRight | PixelOrbit::Overflow(OverflowDirection::PositiveRealDominant) => 1,
            _ => 0,
        },
        Classifier::FixedPointBasins | Classifier::DriftCompensatedBasins => match orbit {
            PixelOrbit::Converged { limit, .. } => basin_class(limit),
            _ => 0,
        },
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    /// Row-major class indices.
    pub pixels: Vec<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Pgm,
    Png,
}

impl ImageFormat {
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("png") => Self::Png,
            _ => Self::Pgm,
        }
    }
}

/// Gray level of a class: black for class 0, light distinct grays otherwise.
pub fn palette_gray(class: u8) -> u8 {
    if class == 0 {
        0
    } else {
        255 - ((class as u16 - 1) * 53 % 160) as u8
    }
}

impl Image {
    pub fn class_zero_count(&self) -> usize {
        self.pixels.iter().filter(|&&p| p == 0).count()
    }

    /// Fraction of pixels on which the class-0 masks of two equally sized images agree.
    pub fn mask_agreement(&self, other: &Image) -> f64 {
        assert_eq!((self.width, self.height), (other.width, other.height));
        let same = self
            .pixels
            .iter()
            .zip(&other.pixels)
            .filter(|(a, b)| (**a == 0) == (**b == 0))
            .count();
        same as f64 / self.pixels.len() as f64
    }

    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend(self.pixels.iter().map(|&c| palette_gray(c)));
        out
    }

    pub fn to_png(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        {
            let mut encoder = png::Encoder::new(&mut out, self.width as u32, self.height as u32);
            encoder.set_color(png::ColorType::Indexed);
            encoder.set_depth(png::BitDepth::Eight);
            encoder.set_palette((0..=255u8).flat_map(|c| [palette_gray(c); 3]).collect::<Vec<u8>>());
            let mut writer = encoder.write_header()?;
            writer.write_image_data(&self.pixels)?;
        }
        Ok(out)
    }

    pub fn write(&self, path: &Path, format: ImageFormat) -> Result<()> {
        let bytes = match format {
            ImageFormat::Pgm => self.to_pgm(),
            ImageFormat::Png => self.to_png()?,
        };
        let mut file = BufWriter::new(File::create(path)?);
        file.write_all(&bytes)?;
        file.flush()?;
        Ok(())
    }
}

fn render_rows(cfg: &RasterConfig) -> Vec<u8> {
    let mut pixels = vec![0u8; cfg.width * cfg.height];
    pixels.par_chunks_mut(cfg.width).enumerate().for_each(|(y, row)| {
        for (x, p) in row.iter_mut().enumerate() {
            *p = classify_pixel(cfg, cfg.pixel_center(x, y));
        }
    });
    pixels
}

/// Renders on the global thread pool, or on a dedicated pool of `threads` workers.
pub fn render(cfg: &RasterConfig, threads: Option<usize>) -> Result<Image> {
    cfg.validate()?;
    let pixels = match threads {
        None => render_rows(cfg),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::precondition(format!("thread pool: {e}")))?
            .install(|| render_rows(cfg)),
    };
    Ok(Image {
        width: cfg.width,
        height: cfg.height,
        pixels,
    })
}

/// Writes `image` to `path` and the config sidecar next to it as `<stem>.meta.json`.
pub fn write_with_sidecar(image: &Image, cfg: &RasterConfig, path: &Path) -> Result<()> {
    image.write(path, ImageFormat::from_path(path))?;
    let sidecar = path.with_extension("meta.json");
    std::fs::write(sidecar, serde_json::to_vec_pretty(&cfg.to_json())?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn fig1(map: EntireMap, size: usize) -> RasterConfig {
        RasterConfig::new(map, Viewport::new(-3.0, 9.0, -13.0, 13.0), size, size)
    }

    #[test]
    fn pixel_examples() {
        let f2 = fig1(EntireMap::f2(), 10);
        assert_eq!(classify_pixel(&f2, c(0.0, TAU)), basin_class(c(0.0, TAU)));
        assert_eq!(basin_class(c(0.0, TAU)), 2);
        let f1 = fig1(EntireMap::f1(), 10);
        assert_eq!(classify_pixel(&f1, c(5.0, 0.0)), 1);
        let f3 = fig1(EntireMap::f3(), 10);
        assert_eq!(f3.classifier, Classifier::DriftCompensatedBasins);
        assert_eq!(classify_pixel(&f3, c(0.05, 0.0)), basin_class(c(0.0, 0.0)));
        // Far left, f_1 overflows towards the right half-plane.
        assert_eq!(classify_pixel(&f1, c(-800.0, 0.0)), 1);
    }

    #[test]
    fn basin_pixels_have_small_residual() {
        for map in [EntireMap::f2(), EntireMap::f3()] {
            let cfg = fig1(map, 60);
            for y in 0..cfg.height {
                for x in 0..cfg.width {
                    let z = cfg.pixel_center(x, y);
                    if classify_pixel(&cfg, z) > 0 {
                        match pixel_orbit(&cfg, z) {
                            PixelOrbit::Converged { residual, .. } => assert!(residual < cfg.convergence),
                            other => panic!("{other:?}"),
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn output_is_independent_of_worker_count() {
        let cfg = fig1(EntireMap::f2(), 64);
        let one = render(&cfg, Some(1)).unwrap();
        let eight = render(&cfg, Some(8)).unwrap();
        assert_eq!(one.to_pgm(), eight.to_pgm());
        assert_eq!(one.to_png().unwrap(), eight.to_png().unwrap());
    }

    #[test]
    fn f2_and_f3_share_the_julia_set() {
        let a = render(&fig1(EntireMap::f2(), 160), None).unwrap();
        let b = render(&fig1(EntireMap::f3(), 160), None).unwrap();
        assert!(a.mask_agreement(&b) >= 0.99);
        assert!(a.class_zero_count() > 0);
    }

    #[test]
    fn f2_mask_is_periodic() {
        let cfg = fig1(EntireMap::f2(), 120);
        let shifted = RasterConfig {
            viewport: cfg.viewport.translate(c(0.0, TAU)),
            ..cfg.clone()
        };
        let a = render(&cfg, None).unwrap();
        let b = render(&shifted, None).unwrap();
        assert!(a.mask_agreement(&b) >= 0.99);
        assert_ne!(a.pixels, b.pixels);
    }

    #[test]
    fn pgm_header() {
        let image = Image {
            width: 1,
            height: 1,
            pixels: vec![0],
        };
        assert_eq!(image.to_pgm(), b"P5\n1 1\n255\n\0".to_vec());
    }

    #[test]
    fn png_round_trip() {
        let cfg = RasterConfig::new(EntireMap::f2(), Viewport::new(-3.0, 9.0, -13.0, 13.0), 23, 17);
        let image = render(&cfg, None).unwrap();
        let bytes = image.to_png().unwrap();
        let decoder = png::Decoder::new(std::io::Cursor::new(bytes));
        let mut reader = decoder.read_info().unwrap();
        let mut buf = vec![0; reader.output_buffer_size().unwrap()];
        let info = reader.next_frame(&mut buf).unwrap();
        assert_eq!((info.width, info.height), (23, 17));
        assert_eq!(&buf[..info.buffer_size()], &image.pixels[..]);
    }

    #[test]
    fn write_errors_and_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = fig1(EntireMap::f1(), 8);
        let image = render(&cfg, None).unwrap();
        let path = dir.path().join("f1.pgm");
        write_with_sidecar(&image, &cfg, &path).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), image.to_pgm());
        let meta: serde_json::Value =
            serde_json::from_slice(&std::fs::read(dir.path().join("f1.meta.json")).unwrap()).unwrap();
        assert_eq!(meta["classifier"], "escape-right");
        assert_eq!(meta["budget"], 500);
        let bad = dir.path().join("missing").join("x.pgm");
        assert!(matches!(image.write(&bad, ImageFormat::Pgm), Err(Error::Io(_))));
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = fig1(EntireMap::f1(), 8);
        cfg.viewport = Viewport::new(1.0, 1.0, 0.0, 1.0);
        assert!(render(&cfg, None).is_err());
        assert!("1,2,3".parse::<Viewport>().is_err());
        assert_eq!(
            "-3,9,-13,13".parse::<Viewport>().unwrap(),
            Viewport::new(-3.0, 9.0, -13.0, 13.0)
        );
    }
}
