//! Deterministic synthetic sequence: a textured square drifting and zooming
//! over a faintly textured background.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::TrackerConfig;
use crate::error::Result;
use crate::evaluation::{evaluate, iou, Metrics, SequenceResult};
use crate::features::Frame;
use crate::tracker::{run_sequence, BoundingBox, SequenceRun};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyntheticSpec {
    pub frames: usize,
    pub width: usize,
    pub height: usize,
    /// Side length of the square in frame 0, pixels.
    pub size: f64,
    /// Centre in frame 0, `(x, y)`.
    pub start: (f64, f64),
    /// Centre motion per frame, `(x, y)`.
    pub velocity: (f64, f64),
    /// Multiplicative size change per frame.
    pub zoom: f64,
    pub texture: Texture,
    pub seed: u64,
}

/// Surface pattern painted on the square.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Texture {
    /// Hard-edged grid of random colour blocks.
    #[default]
    Blocks,
    /// The same colours interpolated bilinearly between block centres.
    Smooth,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            frames: 30,
            width: 200,
            height: 160,
            size: 36.0,
            start: (70.0, 65.0),
            velocity: (2.0, 1.0),
            zoom: 1.008,
            texture: Texture::Blocks,
            seed: 7,
        }
    }
}

/// Frames plus the scripted box for each one.
#[derive(Clone, Debug)]
pub struct SyntheticSequence {
    pub frames: Vec<Frame>,
    pub ground_truth: Vec<BoundingBox>,
    pub spec: SyntheticSpec,
}

const BLOCKS: usize = 6;
const SUPERSAMPLE: usize = 3;
const BACKGROUND_CELL: f64 = 24.0;

fn hash(x: usize, y: usize, seed: u64) -> u8 {
    let mut h = (x as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (y as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F) ^ seed;
    h ^= h >> 31;
    h = h.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    h ^= h >> 29;
    (h & 0xff) as u8
}

impl SyntheticSpec {
    pub fn box_at(&self, k: usize) -> BoundingBox {
        let s = self.size * self.zoom.powi(k as i32);
        let c = (self.start.0 + self.velocity.0 * k as f64, self.start.1 + self.velocity.1 * k as f64);
        BoundingBox::from_center(c, (s, s))
    }

    pub fn generate(&self) -> SyntheticSequence {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let palette: Vec<[f64; 3]> = (0..BLOCKS * BLOCKS)
            .map(|_| [rng.random_range(0.0..255.0), rng.random_range(0.0..255.0), rng.random_range(0.0..255.0)])
            .collect();
        let frames = (0..self.frames)
            .map(|k| {
                let b = self.box_at(k);
                Frame::from_fn(self.width, self.height, false, |x, y| {
                    // Box-filtered over SUPERSAMPLE^2 points so edges are
                    // anti-aliased like a camera image.
                    let mut acc = [0.0; 3];
                    for sy in 0..SUPERSAMPLE {
                        for sx in 0..SUPERSAMPLE {
                            let px = x as f64 + (sx as f64 + 0.5) / SUPERSAMPLE as f64;
                            let py = y as f64 + (sy as f64 + 0.5) / SUPERSAMPLE as f64;
                            let (u, v) = ((px - b.x) / b.w, (py - b.y) / b.h);
                            let rgb = if (0.0..1.0).contains(&u) && (0.0..1.0).contains(&v) {
                                self.surface(&palette, u, v)
                            } else {
                                let n = self.background(px, py);
                                [100.0 + n, 110.0 + n, 105.0 + n]
                            };
                            for c in 0..3 {
                                acc[c] += rgb[c];
                            }
                        }
                    }
                    acc.map(|v| (v / (SUPERSAMPLE * SUPERSAMPLE) as f64).round().clamp(0.0, 255.0) as u8)
                })
            })
            .collect();
        let ground_truth = (0..self.frames).map(|k| self.box_at(k)).collect();
        SyntheticSequence { frames, ground_truth, spec: *self }
    }

    fn surface(&self, palette: &[[f64; 3]], u: f64, v: f64) -> [f64; 3] {
        let n = BLOCKS as f64;
        match self.texture {
            Texture::Blocks => palette[(v * n) as usize * BLOCKS + (u * n) as usize],
            Texture::Smooth => {
                let (gx, gy) = ((u * n - 0.5).clamp(0.0, n - 1.0), (v * n - 0.5).clamp(0.0, n - 1.0));
                let (ix, iy) = ((gx as usize).min(BLOCKS - 2), (gy as usize).min(BLOCKS - 2));
                let (tx, ty) = (gx - ix as f64, gy - iy as f64);
                let at = |x: usize, y: usize| palette[y * BLOCKS + x];
                let mut out = [0.0; 3];
                for (c, o) in out.iter_mut().enumerate() {
                    let top = at(ix, iy)[c] * (1.0 - tx) + at(ix + 1, iy)[c] * tx;
                    let bottom = at(ix, iy + 1)[c] * (1.0 - tx) + at(ix + 1, iy + 1)[c] * tx;
                    *o = top * (1.0 - ty) + bottom * ty;
                }
                out
            }
        }
    }

    /// Smooth value noise in [0, 32), bilinear between lattice points
    /// `BACKGROUND_CELL` px apart.
    fn background(&self, x: f64, y: f64) -> f64 {
        let (gx, gy) = (x / BACKGROUND_CELL, y / BACKGROUND_CELL);
        let (ix, iy) = (gx.floor(), gy.floor());
        let (tx, ty) = (gx - ix, gy - iy);
        let (ix, iy) = (ix.max(0.0) as usize, iy.max(0.0) as usize);
        let h = |a, b| (hash(a, b, self.seed) / 8) as f64;
        let top = h(ix, iy) * (1.0 - tx) + h(ix + 1, iy) * tx;
        let bottom = h(ix, iy + 1) * (1.0 - tx) + h(ix + 1, iy + 1) * tx;
        top * (1.0 - ty) + bottom * ty
    }
}

/// Outcome of tracking a synthetic sequence against its script.
#[derive(Debug)]
pub struct SyntheticReport {
    pub run: SequenceRun,
    pub metrics: Metrics,
    pub mean_iou: f64,
}

/// Tracks `seq` from its first scripted box and scores the result.
pub fn track_synthetic(seq: &SyntheticSequence, config: &TrackerConfig) -> Result<SyntheticReport> {
    config.validate()?;
    let run = run_sequence(seq.frames.iter().cloned().map(Ok), seq.ground_truth[0], config);
    if let Some((_, e)) = &run.error {
        return Err(e.clone());
    }
    let mean_iou =
        run.boxes.iter().zip(&seq.ground_truth).map(|(p, g)| iou(p, g)).sum::<f64>() / run.boxes.len() as f64;
    let result = SequenceResult::new(
        "synthetic",
        run.boxes.iter().copied().map(Some).collect(),
        seq.ground_truth.iter().copied().map(Some).collect(),
    )?;
    let metrics = evaluate(&[result])?;
    Ok(SyntheticReport { run, metrics, mean_iou })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_sized() {
        let spec = SyntheticSpec { frames: 3, ..Default::default() };
        let a = spec.generate();
        let b = spec.generate();
        assert_eq!(a.frames, b.frames);
        assert_eq!(a.frames.len(), 3);
        assert_eq!(a.ground_truth.len(), 3);
        assert_eq!(a.ground_truth[0], BoundingBox::from_center((70.0, 65.0), (36.0, 36.0)));
    }

    #[test]
    fn square_grows() {
        let spec = SyntheticSpec::default();
        assert!(spec.box_at(29).w > spec.box_at(0).w);
    }
}
