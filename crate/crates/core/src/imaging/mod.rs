//! 8-bit grayscale images and the atomic operations of the demo pipeline.
//!
//! Every 3×3 operation pads by replicating border pixels, so output size
//! equals input size. Results are clamped to [0, 255], then rounded half up.

use std::any::Any;

use crate::error::{Error, Result};
use crate::value::{ObjectValue, Value};

mod pgm;

pub use pgm::{decode_pgm, encode_pgm, load_pgm, save_pgm};

/// Object kind name; `TypeExpr::object(IMAGE_KIND)` matches images.
pub const IMAGE_KIND: &str = "image";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    /// Row-major pixels; `pixels.len()` must equal `width * height`.
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Format(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if width.checked_mul(height) != Some(pixels.len()) {
            return Err(Error::Format(format!(
                "{width}x{height} image needs {} pixels, got {}",
                width * height,
                pixels.len()
            )));
        }
        Ok(GrayImage { width, height, pixels })
    }

    pub fn constant(width: usize, height: usize, level: u8) -> Self {
        GrayImage::new(width, height, vec![level; width * height]).expect("positive dimensions")
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> u8) -> Self {
        let pixels = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        GrayImage::new(width, height, pixels).expect("positive dimensions")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    /// Pixel lookup with replicate padding outside the frame.
    pub fn get_clamped(&self, x: isize, y: isize) -> u8 {
        let cx = x.clamp(0, self.width as isize - 1) as usize;
        let cy = y.clamp(0, self.height as isize - 1) as usize;
        self.get(cx, cy)
    }

    pub fn to_value(self) -> Value {
        Value::object(self)
    }

    pub fn from_value(v: &Value) -> Result<&GrayImage> {
        v.downcast_ref::<GrayImage>()
            .ok_or_else(|| Error::body("TypeError", format!("expected image, got {}", v.category())))
    }
}

impl ObjectValue for GrayImage {
    fn kind(&self) -> &str {
        IMAGE_KIND
    }

    fn as_any(&self) -> &dyn Any {
        self
    }

    fn dyn_eq(&self, other: &dyn ObjectValue) -> bool {
        other.as_any().downcast_ref::<GrayImage>() == Some(self)
    }

    fn summary(&self) -> String {
        format!("image {}x{}", self.width, self.height)
    }
}

/// Square kernel applied centred on each pixel: response = Σ w·p / normalizer.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    size: usize,
    weights: Vec<f64>,
    normalizer: f64,
}

impl Kernel {
    pub fn new(size: usize, weights: Vec<f64>, normalizer: f64) -> Result<Self> {
        if size.is_multiple_of(2) {
            return Err(Error::Config(format!("kernel size must be odd, got {size}")));
        }
        if weights.len() != size * size {
            return Err(Error::Config(format!(
                "{size}x{size} kernel needs {} weights",
                size * size
            )));
        }
        if normalizer == 0.0 || !normalizer.is_finite() {
            return Err(Error::Config("kernel normalizer must be finite and non-zero".into()));
        }
        Ok(Kernel {
            size,
            weights,
            normalizer,
        })
    }

    fn fixed(weights: [f64; 9], normalizer: f64) -> Self {
        Kernel::new(3, weights.to_vec(), normalizer).expect("valid 3x3 kernel")
    }

    pub fn mean() -> Self {
        Kernel::fixed([1.0; 9], 9.0)
    }

    pub fn gaussian3() -> Self {
        Kernel::fixed([1., 2., 1., 2., 4., 2., 1., 2., 1.], 16.0)
    }

    pub fn prewitt_x() -> Self {
        Kernel::fixed([-1., 0., 1., -1., 0., 1., -1., 0., 1.], 1.0)
    }

    pub fn prewitt_y() -> Self {
        Kernel::fixed([-1., -1., -1., 0., 0., 0., 1., 1., 1.], 1.0)
    }

    pub fn laplacian() -> Self {
        Kernel::fixed([0., 1., 0., 1., -4., 1., 0., 1., 0.], 1.0)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// Raw response at every pixel, row-major.
    pub fn respond(&self, img: &GrayImage) -> Vec<f64> {
        let r = (self.size / 2) as isize;
        let mut out = Vec::with_capacity(img.pixels.len());
        for y in 0..img.height as isize {
            for x in 0..img.width as isize {
                let mut acc = 0.0;
                let mut w = self.weights.iter();
                for dy in -r..=r {
                    for dx in -r..=r {
                        acc += w.next().expect("size*size weights") * f64::from(img.get_clamped(x + dx, y + dy));
                    }
                }
                out.push(acc / self.normalizer);
            }
        }
        out
    }
}

/// Clamp to [0, 255], then round half up.
pub fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 255.0) + 0.5).floor() as u8
}

fn map_response(img: &GrayImage, values: impl Iterator<Item = f64>) -> GrayImage {
    GrayImage::new(img.width, img.height, values.map(quantize).collect()).expect("same dimensions")
}

pub const DENOISE_METHODS: [&str; 2] = ["mean", "gaussian3"];
pub const EDGE_METHODS: [&str; 2] = ["prewitt", "laplacian"];

/// Copies the rectangle at (x0, y0) of size w×h.
pub fn crop(img: &GrayImage, x0: usize, y0: usize, w: usize, h: usize) -> Result<GrayImage> {
    if w == 0 || h == 0 || x0 + w > img.width || y0 + h > img.height {
        return Err(Error::Config(format!(
            "box ({x0}, {y0}, {w}, {h}) does not fit a {}x{} image",
            img.width, img.height
        )));
    }
    let mut pixels = Vec::with_capacity(w * h);
    for y in y0..y0 + h {
        let start = y * img.width + x0;
        pixels.extend_from_slice(&img.pixels[start..start + w]);
    }
    GrayImage::new(w, h, pixels)
}

pub fn denoise(img: &GrayImage, method: &str) -> Result<GrayImage> {
    let k = match method {
        "mean" => Kernel::mean(),
        "gaussian3" => Kernel::gaussian3(),
        other => return Err(Error::UnknownMethod(other.to_owned())),
    };
    Ok(map_response(img, k.respond(img).into_iter()))
}

/// Nearest-neighbour resampling; output side = max(1, floor(side × scale)).
pub fn resample(img: &GrayImage, scale: f64) -> Result<GrayImage> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Config(format!(
            "scale must be a positive finite number, got {scale}"
        )));
    }
    let dim = |d: usize| ((d as f64 * scale).floor() as usize).max(1);
    let src = |i: usize, d: usize| ((i as f64 / scale).floor() as usize).min(d - 1);
    let (w, h) = (dim(img.width), dim(img.height));
    Ok(GrayImage::from_fn(w, h, |x, y| {
        img.get(src(x, img.width), src(y, img.height))
    }))
}

pub fn edge(img: &GrayImage, method: &str) -> Result<GrayImage> {
    match method {
        "prewitt" => {
            let gx = Kernel::prewitt_x().respond(img);
            let gy = Kernel::prewitt_y().respond(img);
            Ok(map_response(img, gx.into_iter().zip(gy).map(|(a, b)| a.hypot(b))))
        }
        "laplacian" => Ok(map_response(
            img,
            Kernel::laplacian().respond(img).into_iter().map(f64::abs),
        )),
        other => Err(Error::UnknownMethod(other.to_owned())),
    }
}

/// Bundled 64×64 test image: a diagonal gradient with a bright disk.
pub fn synthetic64() -> GrayImage {
    GrayImage::from_fn(64, 64, |x, y| {
        let (dx, dy) = (x as i64 - 36, y as i64 - 28);
        if dx * dx + dy * dy <= 14 * 14 {
            224
        } else {
            ((2 * x + y) * 160 / 189) as u8
        }
    })
}
