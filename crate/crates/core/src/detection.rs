//! Detection: filter response, peak localisation and the scale pyramid.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::{sample_patch, FeatureExtractor, FeatureSample, Frame};
use crate::solver::FilterBank;
use crate::spectral::{ensure_same_dims, idft2, signed_offset, ComplexPlane, RealPlane};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalePyramidConfig {
    /// Scale increment between neighbouring levels.
    pub a: f64,
    /// Number of levels, odd.
    pub s: usize,
}

impl Default for ScalePyramidConfig {
    fn default() -> Self {
        Self { a: 1.02, s: 5 }
    }
}

impl ScalePyramidConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.a > 1.0) || !self.a.is_finite() {
            return Err(Error::config(format!("scale increment must exceed 1, got {}", self.a)));
        }
        if self.s == 0 || self.s.is_multiple_of(2) {
            return Err(Error::config(format!("number of scales must be odd, got {}", self.s)));
        }
        Ok(())
    }

    /// Level exponents `r`, from `floor((1-s)/2)` to `floor((s-1)/2)`.
    pub fn exponents(&self) -> Vec<i32> {
        let half = (self.s as i32 - 1) / 2;
        (-half..=half).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Detection {
    /// Refined peak offset from the origin in cells, `(rows, cols)`.
    pub displacement: (f64, f64),
    pub scale_index: i32,
    pub peak: f64,
    pub response: RealPlane,
}

/// `S = sum_l z_l * (c.w_l)`, using the filter's cached effective spectra.
pub fn respond(z: &FeatureSample, filter: &FilterBank) -> Result<RealPlane> {
    if z.d() != filter.d() {
        return Err(Error::invalid(format!("sample has {} channels, filter has {}", z.d(), filter.d())));
    }
    ensure_same_dims(z.dims(), filter.dims())?;
    let (m, n) = z.dims();
    let gain = ((m * n) as f64).sqrt();
    let mut acc = ComplexPlane::zeros(m, n);
    for (zl, fl) in z.channels().iter().zip(filter.effective_spectrum()) {
        let zh = crate::spectral::dft2(zl)?;
        let prod = zh.zip_map(fl, |a, b| a * b)?;
        acc = acc.lincomb(1.0, &prod, gain)?;
    }
    Ok(idft2(&acc)?.re())
}

/// Integer argmax plus a 3x3 quadratic refinement.
///
/// Ties go to the smallest wrapped displacement, then to row-major order.
/// A flat response yields zero displacement.
pub fn locate(response: &RealPlane) -> Result<Detection> {
    if response.is_empty() {
        return Err(Error::invalid("empty response"));
    }
    if !response.is_finite() {
        return Err(Error::invalid("response contains non-finite values"));
    }
    let (m, n) = response.dims();
    let data = response.as_slice();
    let max = data.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = data.iter().copied().fold(f64::INFINITY, f64::min);
    if max == min {
        return Ok(Detection { displacement: (0.0, 0.0), scale_index: 0, peak: max, response: response.clone() });
    }
    let mut best: Option<(isize, isize, isize)> = None;
    for r in 0..m {
        for c in 0..n {
            if response.get(r, c) != max {
                continue;
            }
            let (dr, dc) = (signed_offset(r, m), signed_offset(c, n));
            let d2 = dr * dr + dc * dc;
            if best.is_none_or(|(_, _, b)| d2 < b) {
                best = Some((dr, dc, d2));
            }
        }
    }
    let (pr, pc, _) = best.expect("maximum is attained");
    let (fr, fc, peak) = refine(response, pr, pc);
    Ok(Detection { displacement: (pr as f64 + fr, pc as f64 + fc), scale_index: 0, peak, response: response.clone() })
}

/// Least-squares fit of `f = k + b u + c v + d u^2 + e v^2 + g uv` to the
/// wrapped 3x3 neighbourhood; `u` runs along rows, `v` along columns.
/// Returns the clamped offset of the fitted maximum and the fitted value
/// there. Degenerate axes (a single row or column) stay unrefined.
fn refine(response: &RealPlane, pr: isize, pc: isize) -> (f64, f64, f64) {
    let (m, n) = response.dims();
    let f = |u: isize, v: isize| response.get_wrapped(pr + u, pc + v);
    let center = f(0, 0);
    let (mut su, mut sv, mut suv) = (0.0, 0.0, 0.0);
    let mut row_sum = [0.0; 3];
    let mut col_sum = [0.0; 3];
    for u in -1..=1isize {
        for v in -1..=1isize {
            let val = f(u, v);
            su += u as f64 * val;
            sv += v as f64 * val;
            suv += (u * v) as f64 * val;
            row_sum[(u + 1) as usize] += val;
            col_sum[(v + 1) as usize] += val;
        }
    }
    let b = if m >= 3 { su / 6.0 } else { 0.0 };
    let c = if n >= 3 { sv / 6.0 } else { 0.0 };
    let d = if m >= 3 { (row_sum[0] + row_sum[2] - 2.0 * row_sum[1]) / 6.0 } else { 0.0 };
    let e = if n >= 3 { (col_sum[0] + col_sum[2] - 2.0 * col_sum[1]) / 6.0 } else { 0.0 };
    let g = if m >= 3 && n >= 3 { suv / 4.0 } else { 0.0 };

    let det = 4.0 * d * e - g * g;
    let (mut du, mut dv) = if d < 0.0 && e < 0.0 && det > 0.0 {
        ((-2.0 * e * b + g * c) / det, (-2.0 * d * c + g * b) / det)
    } else {
        (if d < 0.0 { -b / (2.0 * d) } else { 0.0 }, if e < 0.0 { -c / (2.0 * e) } else { 0.0 })
    };
    du = du.clamp(-0.5, 0.5);
    dv = dv.clamp(-0.5, 0.5);
    // Fitted value relative to the sample at the peak, so the returned peak
    // never drops below the integer maximum.
    let gain = b * du + c * dv + d * du * du + e * dv * dv + g * du * dv;
    (du, dv, center + gain.max(0.0))
}

/// Where to search and at what size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchRegion {
    /// Search centre in image pixels, `(x, y)`.
    pub center: (f64, f64),
    /// Search window in image pixels at `kappa = 1`, `(width, height)`.
    pub base_size: (f64, f64),
    /// Fiducial patch size that every level is resized to, `(width, height)`.
    pub fiducial: (usize, usize),
    pub kappa: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScaleDetection {
    pub detection: Detection,
    /// Updated scale change factor.
    pub kappa: f64,
    /// Image pixels per fiducial pixel at the selected level, `(x, y)`.
    pub pixel_ratio: (f64, f64),
    /// New target centre in image pixels, `(x, y)`.
    pub center: (f64, f64),
}

/// Image window covered at scale `factor`, `(width, height)` in pixels.
pub fn level_extent(base: (f64, f64), factor: f64) -> (f64, f64) {
    (base.0 * factor, base.1 * factor)
}

/// Extracts the origin-centred feature sample for one pyramid level.
pub fn level_sample(
    frame: &Frame,
    center: (f64, f64),
    extent: (f64, f64),
    fiducial: (usize, usize),
    extractor: &FeatureExtractor,
    window: &RealPlane,
) -> Result<FeatureSample> {
    let patch = sample_patch(frame, center, extent, fiducial)?;
    Ok(extractor.extract(&patch, window)?.centered_at_origin())
}

/// Evaluates every pyramid level and keeps the one with the highest refined
/// peak. Equal peaks resolve towards the level closest to `r = 0`.
pub fn detect_multiscale(
    frame: &Frame,
    region: &SearchRegion,
    extractor: &FeatureExtractor,
    window: &RealPlane,
    filter: &FilterBank,
    pyramid: &ScalePyramidConfig,
) -> Result<ScaleDetection> {
    pyramid.validate()?;
    if !(region.base_size.0 > 0.0 && region.base_size.1 > 0.0) || !(region.kappa > 0.0) {
        return Err(Error::TrackingState(format!(
            "degenerate search region {:?} at scale {}",
            region.base_size, region.kappa
        )));
    }
    let levels = pyramid
        .exponents()
        .into_par_iter()
        .map(|r| {
            let factor = region.kappa * pyramid.a.powi(r);
            let size = level_extent(region.base_size, factor);
            let z = level_sample(frame, region.center, size, region.fiducial, extractor, window)?;
            let mut det = locate(&respond(&z, filter)?)?;
            det.scale_index = r;
            Ok((det, size))
        })
        .collect::<Result<Vec<_>>>()?;
    let (det, size) = levels
        .into_iter()
        .reduce(|best, cand| {
            let better = cand.0.peak > best.0.peak
                || (cand.0.peak == best.0.peak && cand.0.scale_index.abs() < best.0.scale_index.abs());
            if better {
                cand
            } else {
                best
            }
        })
        .expect("pyramid has at least one level");
    let ratio = (size.0 / region.fiducial.0 as f64, size.1 / region.fiducial.1 as f64);
    let cell = extractor.cell_size() as f64;
    let center =
        (region.center.0 + det.displacement.1 * cell * ratio.0, region.center.1 + det.displacement.0 * cell * ratio.1);
    Ok(ScaleDetection {
        kappa: region.kappa * pyramid.a.powi(det.scale_index),
        pixel_ratio: ratio,
        center,
        detection: det,
    })
}
