//! One-pass evaluation metrics: precision (center error) and success
//! (overlap) curves.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::tracker::BoundingBox;

/// Precision thresholds 0..=50 px.
pub const PRECISION_THRESHOLDS: usize = 51;
/// Success thresholds 0, 0.05, .., 1.
pub const SUCCESS_THRESHOLDS: usize = 21;

pub fn center_error(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let (ca, cb) = (a.center(), b.center());
    (ca.0 - cb.0).hypot(ca.1 - cb.1)
}

pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let iw = ((a.x + a.w).min(b.x + b.w) - a.x.max(b.x)).max(0.0);
    let ih = ((a.y + a.h).min(b.y + b.h) - a.y.max(b.y)).max(0.0);
    let inter = iw * ih;
    if inter <= 0.0 {
        return 0.0;
    }
    inter / (a.area() + b.area() - inter)
}

pub fn success_threshold(i: usize) -> f64 {
    i as f64 / 20.0
}

/// Predictions against ground truth for one sequence. Ground-truth rows
/// marked `None` (missing or NaN in the file) are skipped.
#[derive(Clone, Debug)]
pub struct SequenceResult {
    pub name: String,
    pub predictions: Vec<Option<BoundingBox>>,
    pub ground_truth: Vec<Option<BoundingBox>>,
}

impl SequenceResult {
    pub fn new(
        name: impl Into<String>,
        predictions: Vec<Option<BoundingBox>>,
        ground_truth: Vec<Option<BoundingBox>>,
    ) -> Result<Self> {
        if predictions.len() != ground_truth.len() {
            return Err(Error::invalid(format!(
                "{} predictions for {} ground-truth rows",
                predictions.len(),
                ground_truth.len()
            )));
        }
        if predictions.is_empty() {
            return Err(Error::invalid("no frames to evaluate"));
        }
        Ok(Self { name: name.into(), predictions, ground_truth })
    }

    /// `(center error, iou)` for every frame with valid ground truth. A
    /// missing prediction counts as infinitely far with zero overlap.
    pub fn frame_scores(&self) -> Vec<(f64, f64)> {
        self.predictions
            .iter()
            .zip(&self.ground_truth)
            .filter_map(|(p, g)| {
                let g = g.as_ref()?;
                Some(match p {
                    Some(p) => (center_error(p, g), iou(p, g)),
                    None => (f64::INFINITY, 0.0),
                })
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Metrics {
    pub precision: Vec<f64>,
    pub success: Vec<f64>,
    pub dp20: f64,
    pub op50: f64,
    pub auc: f64,
    pub frames: usize,
}

/// Fraction of frames with center error `<= t` for t = 0..=50.
pub fn precision_curve(errors: &[f64]) -> Vec<f64> {
    let n = errors.len().max(1) as f64;
    (0..PRECISION_THRESHOLDS).map(|t| errors.iter().filter(|&&e| e <= t as f64).count() as f64 / n).collect()
}

/// Fraction of frames with overlap `>= t` on the 21-point grid.
pub fn success_curve(overlaps: &[f64]) -> Vec<f64> {
    let n = overlaps.len().max(1) as f64;
    (0..SUCCESS_THRESHOLDS)
        .map(|i| overlaps.iter().filter(|&&o| o >= success_threshold(i)).count() as f64 / n)
        .collect()
}

/// Pools all frames of all sequences into one pair of curves.
pub fn evaluate(results: &[SequenceResult]) -> Result<Metrics> {
    let scores: Vec<(f64, f64)> = results.iter().flat_map(|r| r.frame_scores()).collect();
    if scores.is_empty() {
        return Err(Error::invalid("no frames with valid ground truth"));
    }
    let errors: Vec<f64> = scores.iter().map(|s| s.0).collect();
    let overlaps: Vec<f64> = scores.iter().map(|s| s.1).collect();
    let precision = precision_curve(&errors);
    let success = success_curve(&overlaps);
    let auc = success.iter().sum::<f64>() / success.len() as f64;
    Ok(Metrics { dp20: precision[20], op50: success[10], auc, precision, success, frames: scores.len() })
}

impl Metrics {
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "dp20": self.dp20,
            "op50": self.op50,
            "auc": self.auc,
            "precision": self.precision,
            "success": self.success,
        })
        .to_string()
    }
}

/// Parses `x,y,w,h` rows (comma, tab or space separated, 1-indexed) into
/// 0-indexed boxes. Rows with NaN or a non-positive size become `None`.
pub fn parse_boxes(text: &str) -> Result<Vec<Option<BoundingBox>>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        if fields.len() != 4 {
            return Err(Error::invalid(format!("line {}: expected 4 values, got {}", i + 1, fields.len())));
        }
        let mut v = [0.0; 4];
        for (slot, f) in v.iter_mut().zip(&fields) {
            *slot = f.parse::<f64>().map_err(|_| Error::invalid(format!("line {}: bad number `{f}`", i + 1)))?;
        }
        let b = BoundingBox { x: v[0] - 1.0, y: v[1] - 1.0, w: v[2], h: v[3] };
        out.push(b.is_valid().then_some(b));
    }
    Ok(out)
}

pub fn load_boxes(path: impl AsRef<Path>) -> Result<Vec<Option<BoundingBox>>> {
    parse_boxes(&std::fs::read_to_string(path)?)
}

/// Writes boxes back in the 1-indexed `x,y,w,h` format.
pub fn format_boxes(boxes: &[BoundingBox]) -> String {
    let mut s = String::new();
    for b in boxes {
        let _ = writeln!(s, "{:.4},{:.4},{:.4},{:.4}", b.x + 1.0, b.y + 1.0, b.w, b.h);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bx(x: f64, y: f64, w: f64, h: f64) -> BoundingBox {
        BoundingBox::new(x, y, w, h).unwrap()
    }

    #[test]
    fn center_error_cases() {
        let a = bx(0.0, 0.0, 10.0, 10.0);
        assert_eq!(center_error(&a, &a), 0.0);
        let b = bx(3.0, 4.0, 10.0, 10.0);
        assert_eq!(center_error(&a, &b), 5.0);
        assert_eq!(center_error(&b, &a), 5.0);
    }

    #[test]
    fn iou_cases() {
        let a = bx(0.0, 0.0, 10.0, 10.0);
        assert_eq!(iou(&a, &a), 1.0);
        assert_eq!(iou(&a, &bx(20.0, 0.0, 10.0, 10.0)), 0.0);
        assert_eq!(iou(&a, &bx(10.0, 0.0, 10.0, 10.0)), 0.0);
        assert!((iou(&a, &bx(5.0, 0.0, 10.0, 10.0)) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn perfect_tracker() {
        let gt: Vec<_> = (0..7).map(|i| Some(bx(i as f64, 2.0, 8.0, 9.0))).collect();
        let m = evaluate(&[SequenceResult::new("s", gt.clone(), gt).unwrap()]).unwrap();
        assert!(m.precision.iter().all(|&v| v == 1.0));
        assert!(m.success.iter().all(|&v| v == 1.0));
        assert_eq!((m.dp20, m.op50, m.auc), (1.0, 1.0, 1.0));
    }

    #[test]
    fn constant_error_step() {
        let gt = vec![Some(bx(0.0, 0.0, 10.0, 10.0)); 4];
        let pred = vec![Some(bx(15.0, 20.0, 10.0, 10.0)); 4];
        let m = evaluate(&[SequenceResult::new("s", pred, gt).unwrap()]).unwrap();
        assert_eq!(m.dp20, 0.0);
        assert!(m.precision[..25].iter().all(|&v| v == 0.0));
        assert!(m.precision[25..].iter().all(|&v| v == 1.0));
        // Disjoint boxes: only the t = 0 bucket succeeds.
        assert_eq!(m.success[0], 1.0);
        assert!(m.success[1..].iter().all(|&v| v == 0.0));
        assert_eq!(m.op50, 0.0);
        assert_eq!(m.auc, 1.0 / 21.0);
    }

    #[test]
    fn hand_computed_auc() {
        // overlaps 1/3 and 1: curve is 1 up to t=0.30, then 0.5 up to t=1.
        let gt = vec![Some(bx(0.0, 0.0, 10.0, 10.0)); 2];
        let pred = vec![Some(bx(5.0, 0.0, 10.0, 10.0)), Some(bx(0.0, 0.0, 10.0, 10.0))];
        let m = evaluate(&[SequenceResult::new("s", pred, gt).unwrap()]).unwrap();
        assert_eq!(m.auc, (7.0 + 14.0 * 0.5) / 21.0);
        assert_eq!(m.op50, 0.5);
    }

    #[test]
    fn nan_rows_are_skipped() {
        let gt = parse_boxes("1,1,10,10\nNaN,NaN,NaN,NaN\n1,1,10,10\n").unwrap();
        assert_eq!(gt[1], None);
        let pred = vec![Some(bx(0.0, 0.0, 10.0, 10.0)), Some(bx(500.0, 0.0, 1.0, 1.0)), Some(bx(0.0, 0.0, 10.0, 10.0))];
        let m = evaluate(&[SequenceResult::new("s", pred, gt).unwrap()]).unwrap();
        assert_eq!(m.frames, 2);
        assert_eq!(m.auc, 1.0);
    }

    #[test]
    fn parser_separators_and_indexing() {
        let boxes = parse_boxes("1,2,3,4\n5\t6\t7\t8\n9 10  11 12\n\n").unwrap();
        assert_eq!(boxes.len(), 3);
        assert_eq!(boxes[0], Some(bx(0.0, 1.0, 3.0, 4.0)));
        assert_eq!(boxes[2], Some(bx(8.0, 9.0, 11.0, 12.0)));
        assert!(parse_boxes("1,2,3").is_err());
        let text = format_boxes(&[bx(0.0, 1.0, 3.0, 4.0)]);
        assert_eq!(parse_boxes(&text).unwrap()[0], Some(bx(0.0, 1.0, 3.0, 4.0)));
    }

    #[test]
    fn mismatched_lengths_rejected() {
        assert!(SequenceResult::new("s", vec![None], vec![]).is_err());
        assert!(SequenceResult::new("s", vec![], vec![]).is_err());
    }

    #[test]
    fn json_schema() {
        let gt = vec![Some(bx(0.0, 0.0, 10.0, 10.0))];
        let m = evaluate(&[SequenceResult::new("s", gt.clone(), gt).unwrap()]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&m.to_json()).unwrap();
        assert_eq!(v["precision"].as_array().unwrap().len(), 51);
        assert_eq!(v["success"].as_array().unwrap().len(), 21);
        assert_eq!(v["dp20"], 1.0);
    }
}
