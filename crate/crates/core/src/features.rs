//! Image patches and the per-cell feature channels extracted from them:
//! 31-channel FHOG, 11-channel color names and (for grayscale input) a
//! cell-averaged intensity channel.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::spectral::{ensure_same_dims, RealPlane};

pub const HOG_CHANNELS: usize = 31;
pub const CN_CHANNELS: usize = 11;
pub const CN_TABLE_ROWS: usize = 32768;

/// A decoded video frame. Grayscale frames keep the flag so that color-only
/// features can be skipped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
    grayscale: bool,
}

impl Frame {
    pub fn from_rgb(width: usize, height: usize, data: &[u8]) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid("empty image"));
        }
        if data.len() != width * height * 3 {
            return Err(Error::invalid(format!(
                "rgb buffer has {} bytes, expected {}",
                data.len(),
                width * height * 3
            )));
        }
        let pixels = data.chunks_exact(3).map(|p| [p[0], p[1], p[2]]).collect();
        Ok(Self { width, height, pixels, grayscale: false })
    }

    pub fn from_gray(width: usize, height: usize, data: &[u8]) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid("empty image"));
        }
        if data.len() != width * height {
            return Err(Error::invalid(format!("gray buffer has {} bytes, expected {}", data.len(), width * height)));
        }
        let pixels = data.iter().map(|&v| [v, v, v]).collect();
        Ok(Self { width, height, pixels, grayscale: true })
    }

    pub fn from_fn(width: usize, height: usize, grayscale: bool, mut f: impl FnMut(usize, usize) -> [u8; 3]) -> Self {
        assert!(width > 0 && height > 0, "frame dims must be positive");
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                let p = f(x, y);
                pixels.push(if grayscale { [p[0]; 3] } else { p });
            }
        }
        Self { width, height, pixels, grayscale }
    }

    pub fn from_dynamic(img: image::DynamicImage) -> Result<Self> {
        use image::ColorType;
        let grayscale = matches!(img.color(), ColorType::L8 | ColorType::L16 | ColorType::La8 | ColorType::La16);
        let rgb = img.to_rgb8();
        let (w, h) = rgb.dimensions();
        let mut frame = Self::from_rgb(w as usize, h as usize, rgb.as_raw())?;
        frame.grayscale = grayscale;
        Ok(frame)
    }

    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let img = image::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_dynamic(img)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn is_grayscale(&self) -> bool {
        self.grayscale
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        self.pixels[y * self.width + x]
    }

    #[inline]
    fn pixel_clamped(&self, x: i64, y: i64) -> [u8; 3] {
        let x = x.clamp(0, self.width as i64 - 1) as usize;
        let y = y.clamp(0, self.height as i64 - 1) as usize;
        self.pixel(x, y)
    }
}

/// Integer pixel rectangle in frame coordinates; may extend past the frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PixelRect {
    pub x: i64,
    pub y: i64,
    pub width: usize,
    pub height: usize,
}

#[derive(Clone, Debug)]
pub struct ImagePatch {
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
    grayscale: bool,
    source: PixelRect,
}

impl ImagePatch {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn is_grayscale(&self) -> bool {
        self.grayscale
    }

    pub fn source(&self) -> PixelRect {
        self.source
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        self.pixels[y * self.width + x]
    }

    /// Patch rotated by 180 degrees (same source rectangle).
    pub fn rotated_180(&self) -> Self {
        let mut pixels = self.pixels.clone();
        pixels.reverse();
        Self { pixels, ..self.clone() }
    }

    /// Bilinear resize to `width x height` with pixel-centre alignment.
    pub fn resized(&self, width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid("resize target must be non-empty"));
        }
        if width == self.width && height == self.height {
            return Ok(self.clone());
        }
        let sx = self.width as f64 / width as f64;
        let sy = self.height as f64 / height as f64;
        let max_x = self.width as i64 - 1;
        let max_y = self.height as i64 - 1;
        let mut pixels = Vec::with_capacity(width * height);
        for j in 0..height {
            let fy = ((j as f64 + 0.5) * sy - 0.5).max(0.0);
            let y0 = fy.floor() as i64;
            let ty = fy - y0 as f64;
            let y0c = y0.min(max_y) as usize;
            let y1c = (y0 + 1).min(max_y) as usize;
            for i in 0..width {
                let fx = ((i as f64 + 0.5) * sx - 0.5).max(0.0);
                let x0 = fx.floor() as i64;
                let tx = fx - x0 as f64;
                let x0c = x0.min(max_x) as usize;
                let x1c = (x0 + 1).min(max_x) as usize;
                let p00 = self.pixel(x0c, y0c);
                let p01 = self.pixel(x1c, y0c);
                let p10 = self.pixel(x0c, y1c);
                let p11 = self.pixel(x1c, y1c);
                let mut out = [0u8; 3];
                for k in 0..3 {
                    let top = p00[k] as f64 * (1.0 - tx) + p01[k] as f64 * tx;
                    let bottom = p10[k] as f64 * (1.0 - tx) + p11[k] as f64 * tx;
                    out[k] = (top * (1.0 - ty) + bottom * ty).round().clamp(0.0, 255.0) as u8;
                }
                pixels.push(out);
            }
        }
        Ok(Self { width, height, pixels, grayscale: self.grayscale, source: self.source })
    }
}

/// Pixel size of the search region for a target of `target` pixels: each
/// side scaled by `factor`, so the area grows by `factor^2`.
pub fn search_size(target: (f64, f64), factor: f64) -> (f64, f64) {
    (target.0 * factor, target.1 * factor)
}

/// Crops `size` pixels (width, height) centred at `center` (x, y),
/// replicating border pixels wherever the rectangle leaves the frame.
pub fn extract_patch(frame: &Frame, center: (f64, f64), size: (usize, usize)) -> Result<ImagePatch> {
    if frame.width == 0 || frame.height == 0 {
        return Err(Error::invalid("empty image"));
    }
    let (w, h) = size;
    if w == 0 || h == 0 {
        return Err(Error::invalid("patch size must be at least one pixel"));
    }
    let x0 = (center.0 - w as f64 / 2.0).round() as i64;
    let y0 = (center.1 - h as f64 / 2.0).round() as i64;
    let mut pixels = Vec::with_capacity(w * h);
    for dy in 0..h as i64 {
        for dx in 0..w as i64 {
            pixels.push(frame.pixel_clamped(x0 + dx, y0 + dy));
        }
    }
    Ok(ImagePatch {
        width: w,
        height: h,
        pixels,
        grayscale: frame.grayscale,
        source: PixelRect { x: x0, y: y0, width: w, height: h },
    })
}

/// Resamples the `extent` (width, height) pixel window centred at `center`
/// onto an `out` pixel grid in one step. Samples are bilinear; when the
/// window shrinks by two or more pixels per output pixel, each output is
/// the mean of a `floor(scale)`-per-axis grid of samples. With unit scale and
/// a window aligned to pixel boundaries this is an exact crop.
pub fn sample_patch(frame: &Frame, center: (f64, f64), extent: (f64, f64), out: (usize, usize)) -> Result<ImagePatch> {
    if frame.width == 0 || frame.height == 0 {
        return Err(Error::invalid("empty image"));
    }
    let (w, h) = out;
    if w == 0 || h == 0 {
        return Err(Error::invalid("patch size must be at least one pixel"));
    }
    if !(extent.0 > 0.0 && extent.1 > 0.0) || !extent.0.is_finite() || !extent.1.is_finite() {
        return Err(Error::invalid(format!("sampling window must be positive, got {extent:?}")));
    }
    if !center.0.is_finite() || !center.1.is_finite() {
        return Err(Error::invalid("sampling centre must be finite"));
    }
    let (sx, sy) = (extent.0 / w as f64, extent.1 / h as f64);
    let (nx, ny) = (sx.floor().max(1.0) as usize, sy.floor().max(1.0) as usize);
    let (left, top) = (center.0 - extent.0 / 2.0, center.1 - extent.1 / 2.0);
    let bilinear = |fx: f64, fy: f64| -> [f64; 3] {
        let (x0, y0) = (fx.floor(), fy.floor());
        let (tx, ty) = (fx - x0, fy - y0);
        let (x0, y0) = (x0 as i64, y0 as i64);
        let p = [
            frame.pixel_clamped(x0, y0),
            frame.pixel_clamped(x0 + 1, y0),
            frame.pixel_clamped(x0, y0 + 1),
            frame.pixel_clamped(x0 + 1, y0 + 1),
        ];
        let mut v = [0.0; 3];
        for (k, slot) in v.iter_mut().enumerate() {
            let t = p[0][k] as f64 * (1.0 - tx) + p[1][k] as f64 * tx;
            let b = p[2][k] as f64 * (1.0 - tx) + p[3][k] as f64 * tx;
            *slot = t * (1.0 - ty) + b * ty;
        }
        v
    };
    let mut pixels = Vec::with_capacity(w * h);
    for j in 0..h {
        for i in 0..w {
            let mut acc = [0.0; 3];
            for b in 0..ny {
                for a in 0..nx {
                    // Continuous position, then shift so pixel k's centre is k.
                    let fx = left + (i as f64 + (a as f64 + 0.5) / nx as f64) * sx - 0.5;
                    let fy = top + (j as f64 + (b as f64 + 0.5) / ny as f64) * sy - 0.5;
                    let v = bilinear(fx, fy);
                    for k in 0..3 {
                        acc[k] += v[k];
                    }
                }
            }
            let n = (nx * ny) as f64;
            pixels.push(acc.map(|v| (v / n).round().clamp(0.0, 255.0) as u8));
        }
    }
    let source = PixelRect {
        x: left.floor() as i64,
        y: top.floor() as i64,
        width: extent.0.ceil() as usize,
        height: extent.1.ceil() as usize,
    };
    Ok(ImagePatch { width: w, height: h, pixels, grayscale: frame.grayscale, source })
}

/// A d-channel feature tensor on an M x N cell grid.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureSample {
    channels: Vec<RealPlane>,
    cell_size: usize,
}

impl FeatureSample {
    pub fn new(channels: Vec<RealPlane>, cell_size: usize) -> Result<Self> {
        let first = channels.first().ok_or_else(|| Error::invalid("feature sample needs a channel"))?;
        let dims = first.dims();
        for ch in &channels {
            ensure_same_dims(dims, ch.dims())?;
            if !ch.is_finite() {
                return Err(Error::invalid("feature channel contains non-finite values"));
            }
        }
        Ok(Self { channels, cell_size })
    }

    pub fn channels(&self) -> &[RealPlane] {
        &self.channels
    }

    pub fn into_channels(self) -> Vec<RealPlane> {
        self.channels
    }

    pub fn d(&self) -> usize {
        self.channels.len()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.channels[0].dims()
    }

    pub fn cell_size(&self) -> usize {
        self.cell_size
    }

    /// Moves the patch centre cell `(M/2, N/2)` to the grid origin, the layout
    /// used by training and detection.
    pub fn centered_at_origin(&self) -> Self {
        let (m, n) = self.dims();
        let (dr, dc) = (-((m / 2) as isize), -((n / 2) as isize));
        Self { channels: self.channels.iter().map(|c| c.circshift(dr, dc)).collect(), cell_size: self.cell_size }
    }
}

#[inline]
fn intensity(p: [u8; 3], k: usize) -> f64 {
    p[k] as f64 / 255.0
}

/// 31-channel FHOG: 18 contrast-sensitive and 9 contrast-insensitive
/// orientation channels plus 4 texture-energy channels, with each cell
/// normalized against its four surrounding 2x2 blocks and clipped at 0.2.
pub fn compute_hog(patch: &ImagePatch, cell_size: usize) -> Result<FeatureSample> {
    if cell_size == 0 {
        return Err(Error::invalid("cell size must be positive"));
    }
    let rows = patch.height / cell_size;
    let cols = patch.width / cell_size;
    if rows == 0 || cols == 0 {
        return Err(Error::invalid(format!(
            "patch {}x{} smaller than one {cell_size}px cell",
            patch.width, patch.height
        )));
    }
    let (w, h) = (patch.width as i64, patch.height as i64);
    let px = |x: i64, y: i64| patch.pixel(x.clamp(0, w - 1) as usize, y.clamp(0, h - 1) as usize);

    let unit: Vec<(f64, f64)> = (0..9).map(|o| ((o as f64 * PI / 9.0).cos(), (o as f64 * PI / 9.0).sin())).collect();
    let mut hist = vec![[0.0f64; 18]; rows * cols];
    let cs = cell_size as f64;

    for y in 0..(rows * cell_size) as i64 {
        for x in 0..(cols * cell_size) as i64 {
            let (l, r, u, d) = (px(x - 1, y), px(x + 1, y), px(x, y - 1), px(x, y + 1));
            let mut best = (0.0, 0.0, -1.0);
            let channels = if patch.grayscale { 1 } else { 3 };
            for k in 0..channels {
                let dx = intensity(r, k) - intensity(l, k);
                let dy = intensity(d, k) - intensity(u, k);
                let v = dx * dx + dy * dy;
                if v > best.2 {
                    best = (dx, dy, v);
                }
            }
            let (dx, dy, v) = best;
            if v <= 0.0 {
                continue;
            }
            let mag = v.sqrt();
            let mut best_dot = 0.0;
            let mut bin = 0usize;
            for (o, &(ux, uy)) in unit.iter().enumerate() {
                let dot = ux * dx + uy * dy;
                if dot > best_dot {
                    best_dot = dot;
                    bin = o;
                } else if -dot > best_dot {
                    best_dot = -dot;
                    bin = o + 9;
                }
            }

            let xp = (x as f64 + 0.5) / cs - 0.5;
            let yp = (y as f64 + 0.5) / cs - 0.5;
            let ix = xp.floor();
            let iy = yp.floor();
            let vx1 = xp - ix;
            let vy1 = yp - iy;
            let (ix, iy) = (ix as i64, iy as i64);
            for (cy, wy) in [(iy, 1.0 - vy1), (iy + 1, vy1)] {
                if cy < 0 || cy >= rows as i64 {
                    continue;
                }
                for (cx, wx) in [(ix, 1.0 - vx1), (ix + 1, vx1)] {
                    if cx < 0 || cx >= cols as i64 {
                        continue;
                    }
                    hist[cy as usize * cols + cx as usize][bin] += wy * wx * mag;
                }
            }
        }
    }

    let energy: Vec<f64> = hist.iter().map(|h| (0..9).map(|o| (h[o] + h[o + 9]).powi(2)).sum()).collect();
    let e_at =
        |r: i64, c: i64| energy[r.clamp(0, rows as i64 - 1) as usize * cols + c.clamp(0, cols as i64 - 1) as usize];
    let block = |r: i64, c: i64| e_at(r, c) + e_at(r + 1, c) + e_at(r, c + 1) + e_at(r + 1, c + 1);

    const EPS: f64 = 1e-4;
    const CLIP: f64 = 0.2;
    const TEXTURE_WEIGHT: f64 = 0.2357;
    let mut channels = vec![RealPlane::zeros(rows, cols); HOG_CHANNELS];
    for r in 0..rows {
        for c in 0..cols {
            let (ri, ci) = (r as i64, c as i64);
            let norms = [
                1.0 / (block(ri, ci) + EPS).sqrt(),
                1.0 / (block(ri - 1, ci) + EPS).sqrt(),
                1.0 / (block(ri, ci - 1) + EPS).sqrt(),
                1.0 / (block(ri - 1, ci - 1) + EPS).sqrt(),
            ];
            let h = &hist[r * cols + c];
            let mut texture = [0.0; 4];
            for o in 0..18 {
                let mut acc = 0.0;
                for (k, n) in norms.iter().enumerate() {
                    let v = (h[o] * n).min(CLIP);
                    acc += v;
                    texture[k] += v;
                }
                channels[o].set(r, c, 0.5 * acc);
            }
            for o in 0..9 {
                let s = h[o] + h[o + 9];
                let acc: f64 = norms.iter().map(|n| (s * n).min(CLIP)).sum();
                channels[18 + o].set(r, c, 0.5 * acc);
            }
            for k in 0..4 {
                channels[27 + k].set(r, c, TEXTURE_WEIGHT * texture[k]);
            }
        }
    }
    FeatureSample::new(channels, cell_size)
}

/// RGB to color-name probability lookup table (11 names per quantized color).
#[derive(Clone, Debug)]
pub struct ColorNames {
    table: Vec<[f64; CN_CHANNELS]>,
}

impl ColorNames {
    /// Builds a table from rows of 11 probabilities; each row is renormalized
    /// to sum to one.
    pub fn from_rows(rows: Vec<[f64; CN_CHANNELS]>) -> Result<Self> {
        if rows.len() != CN_TABLE_ROWS {
            return Err(Error::config(format!("color-name table has {} rows, expected {CN_TABLE_ROWS}", rows.len())));
        }
        let mut table = rows;
        for (i, row) in table.iter_mut().enumerate() {
            if row.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::config(format!("color-name row {i} has a negative or non-finite entry")));
            }
            let s: f64 = row.iter().sum();
            if !(s > 0.0) {
                return Err(Error::config(format!("color-name row {i} sums to zero")));
            }
            for v in row.iter_mut() {
                *v /= s;
            }
        }
        Ok(Self { table })
    }

    /// Loads either a text table (32768 lines of 11 values, or 14 values
    /// where the first three are the RGB bin centres) or a raw little-endian
    /// f32 dump of exactly 32768 x 11 values.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
        if bytes.len() == CN_TABLE_ROWS * CN_CHANNELS * 4 {
            let rows = bytes
                .chunks_exact(CN_CHANNELS * 4)
                .map(|chunk| {
                    let mut row = [0.0; CN_CHANNELS];
                    for (k, b) in chunk.chunks_exact(4).enumerate() {
                        row[k] = f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64;
                    }
                    row
                })
                .collect();
            return Self::from_rows(rows);
        }
        let text = String::from_utf8(bytes)
            .map_err(|_| Error::config(format!("{}: not a text or f32 table", path.display())))?;
        let mut rows = Vec::with_capacity(CN_TABLE_ROWS);
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let vals: Vec<f64> = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::config(format!("{}:{}: {e}", path.display(), ln + 1)))?;
            let probs = match vals.len() {
                11 => &vals[..],
                14 => &vals[3..],
                n => {
                    return Err(Error::config(format!(
                        "{}:{}: expected 11 or 14 values, got {n}",
                        path.display(),
                        ln + 1
                    )))
                }
            };
            let mut row = [0.0; CN_CHANNELS];
            row.copy_from_slice(probs);
            rows.push(row);
        }
        Self::from_rows(rows)
    }

    #[inline]
    pub fn index(rgb: [u8; 3]) -> usize {
        (rgb[0] as usize >> 3) + 32 * (rgb[1] as usize >> 3) + 1024 * (rgb[2] as usize >> 3)
    }

    #[inline]
    pub fn lookup(&self, rgb: [u8; 3]) -> &[f64; CN_CHANNELS] {
        &self.table[Self::index(rgb)]
    }
}

/// Cell-averaged color-name probabilities on the same grid as [`compute_hog`].
pub fn compute_colornames(patch: &ImagePatch, table: &ColorNames, cell_size: usize) -> Result<FeatureSample> {
    if patch.grayscale {
        return Err(Error::config("color names need a color patch"));
    }
    if cell_size == 0 {
        return Err(Error::invalid("cell size must be positive"));
    }
    let rows = patch.height / cell_size;
    let cols = patch.width / cell_size;
    if rows == 0 || cols == 0 {
        return Err(Error::invalid("patch smaller than one cell"));
    }
    let mut channels = vec![RealPlane::zeros(rows, cols); CN_CHANNELS];
    let norm = 1.0 / (cell_size * cell_size) as f64;
    for r in 0..rows {
        for c in 0..cols {
            let mut acc = [0.0; CN_CHANNELS];
            for y in r * cell_size..(r + 1) * cell_size {
                for x in c * cell_size..(c + 1) * cell_size {
                    for (a, p) in acc.iter_mut().zip(table.lookup(patch.pixel(x, y))) {
                        *a += p;
                    }
                }
            }
            for (k, a) in acc.iter().enumerate() {
                channels[k].set(r, c, a * norm);
            }
        }
    }
    FeatureSample::new(channels, cell_size)
}

/// Cell-averaged intensity in `[-0.5, 0.5]`, used in place of color names
/// for grayscale input.
pub fn compute_intensity(patch: &ImagePatch, cell_size: usize) -> Result<FeatureSample> {
    let rows = patch.height / cell_size.max(1);
    let cols = patch.width / cell_size.max(1);
    if cell_size == 0 || rows == 0 || cols == 0 {
        return Err(Error::invalid("patch smaller than one cell"));
    }
    let norm = 1.0 / (cell_size * cell_size) as f64;
    let plane = RealPlane::from_fn(rows, cols, |r, c| {
        let mut acc = 0.0;
        for y in r * cell_size..(r + 1) * cell_size {
            for x in c * cell_size..(c + 1) * cell_size {
                let p = patch.pixel(x, y);
                acc += (p[0] as f64 + p[1] as f64 + p[2] as f64) / (3.0 * 255.0);
            }
        }
        acc * norm - 0.5
    });
    FeatureSample::new(vec![plane], cell_size)
}

/// Concatenates channels and multiplies each by `window`.
pub fn assemble_sample(
    hog: &FeatureSample,
    extra: Option<&FeatureSample>,
    window: &RealPlane,
) -> Result<FeatureSample> {
    ensure_same_dims(hog.dims(), window.dims())?;
    if let Some(e) = extra {
        ensure_same_dims(hog.dims(), e.dims())?;
    }
    let channels = hog
        .channels
        .iter()
        .chain(extra.into_iter().flat_map(|e| e.channels.iter()))
        .map(|c| c.hadamard(window))
        .collect::<Result<Vec<_>>>()?;
    FeatureSample::new(channels, hog.cell_size)
}

/// Feature pipeline used by the tracker: HOG, plus color names for color
/// frames when a table is available, or intensity for grayscale frames.
#[derive(Clone, Debug)]
pub struct FeatureExtractor {
    cell_size: usize,
    color_names: Option<Arc<ColorNames>>,
}

impl FeatureExtractor {
    pub fn new(cell_size: usize, color_names: Option<Arc<ColorNames>>) -> Self {
        Self { cell_size, color_names }
    }

    pub fn cell_size(&self) -> usize {
        self.cell_size
    }

    pub fn has_color_names(&self) -> bool {
        self.color_names.is_some()
    }

    pub fn extract(&self, patch: &ImagePatch, window: &RealPlane) -> Result<FeatureSample> {
        let hog = compute_hog(patch, self.cell_size)?;
        let extra = if patch.is_grayscale() {
            Some(compute_intensity(patch, self.cell_size)?)
        } else if let Some(table) = &self.color_names {
            Some(compute_colornames(patch, table, self.cell_size)?)
        } else {
            None
        };
        assemble_sample(&hog, extra.as_ref(), window)
    }
}
