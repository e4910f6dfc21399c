//! Per-frame tracking loop: detect, relocate, retrain, merge.

use std::sync::Arc;

use log::{debug, warn};

use crate::config::TrackerConfig;
use crate::detection::{detect_multiscale, level_extent, level_sample, ScaleDetection, SearchRegion};
use crate::error::{Error, Result};
use crate::features::{ColorNames, FeatureExtractor, Frame};
use crate::model_update::merge;
use crate::solver::{train, FilterBank};
use crate::spatial_map::SpatialMap;
use crate::spectral::{gaussian_label, hann_window, RealPlane};

/// Axis-aligned box in 0-indexed pixel coordinates; `(x, y)` is the top-left
/// corner.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundingBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BoundingBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Result<Self> {
        let b = Self { x, y, w, h };
        if !b.is_valid() {
            return Err(Error::invalid(format!("invalid box {x},{y},{w},{h}")));
        }
        Ok(b)
    }

    pub fn from_center(center: (f64, f64), size: (f64, f64)) -> Self {
        Self { x: center.0 - size.0 / 2.0, y: center.1 - size.1 / 2.0, w: size.0, h: size.1 }
    }

    /// Finite coordinates and a positive size.
    pub fn is_valid(&self) -> bool {
        [self.x, self.y, self.w, self.h].iter().all(|v| v.is_finite()) && self.w > 0.0 && self.h > 0.0
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x + self.w / 2.0, self.y + self.h / 2.0)
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }
}

/// Sizes fixed at initialization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Geometry {
    /// Fiducial patch in pixels, `(width, height)`; an even number of cells.
    pub fiducial: (usize, usize),
    /// Feature grid, `(rows, cols)`.
    pub grid: (usize, usize),
    /// Search window in image pixels at unit scale, `(width, height)`.
    pub base_size: (f64, f64),
    /// Target extent on the feature grid, `(rows, cols)`.
    pub target_cells: (f64, f64),
    /// Image pixels per fiducial pixel at unit scale.
    pub downsample: f64,
}

impl Geometry {
    pub fn new(target: (f64, f64), config: &TrackerConfig) -> Result<Self> {
        let cell = config.cell_size as f64;
        let search = (target.0 * config.search_area_scale, target.1 * config.search_area_scale);
        let downsample = (search.0 * search.1 / config.max_search_area).sqrt().max(1.0);
        let even_cells = |px: f64| ((px / downsample / (2.0 * cell)).round().max(1.0) as usize) * 2 * config.cell_size;
        let fiducial = (even_cells(search.0), even_cells(search.1));
        let grid = (fiducial.1 / config.cell_size, fiducial.0 / config.cell_size);
        let base_size = (fiducial.0 as f64 * downsample, fiducial.1 as f64 * downsample);
        let target_cells =
            ((target.1 / downsample / cell).min(grid.0 as f64), (target.0 / downsample / cell).min(grid.1 as f64));
        if !(target_cells.0 > 0.0 && target_cells.1 > 0.0) {
            return Err(Error::Init(format!("target {target:?} is degenerate")));
        }
        Ok(Self { fiducial, grid, base_size, target_cells, downsample })
    }
}

/// What one call to [`Tracker::step`] did.
#[derive(Clone, Debug)]
pub struct StepReport {
    pub bbox: BoundingBox,
    pub detection: ScaleDetection,
    /// Filter trained on this frame before merging.
    pub trained: FilterBank,
}

#[derive(Clone, Debug)]
pub struct Tracker {
    config: TrackerConfig,
    extractor: FeatureExtractor,
    geometry: Geometry,
    window: RealPlane,
    label: RealPlane,
    map: SpatialMap,
    initial_size: (f64, f64),
    bbox: BoundingBox,
    kappa: f64,
    model: FilterBank,
    frame_index: u64,
}

fn load_table(config: &TrackerConfig) -> Result<Option<Arc<ColorNames>>> {
    match &config.cn_table {
        Some(path) => Ok(Some(Arc::new(ColorNames::load(path)?))),
        None => Ok(None),
    }
}

impl Tracker {
    /// Trains the first filter on `frame` around `b1`.
    pub fn init(frame: &Frame, b1: BoundingBox, config: &TrackerConfig) -> Result<Self> {
        let table = load_table(config).map_err(|e| Error::Config(e.to_string()))?;
        Self::init_with_table(frame, b1, config, table)
    }

    /// As [`Tracker::init`] with an already loaded color-name table, which
    /// takes precedence over `config.cn_table`.
    pub fn init_with_table(
        frame: &Frame,
        b1: BoundingBox,
        config: &TrackerConfig,
        table: Option<Arc<ColorNames>>,
    ) -> Result<Self> {
        config.validate()?;
        if !b1.is_valid() {
            return Err(Error::Init(format!("initial box {b1:?} must have finite coordinates and positive size")));
        }
        let (fw, fh) = (frame.width() as f64, frame.height() as f64);
        if b1.x >= fw || b1.y >= fh || b1.x + b1.w <= 0.0 || b1.y + b1.h <= 0.0 {
            return Err(Error::Init(format!("initial box {b1:?} lies outside the {fw}x{fh} frame")));
        }
        if table.is_none() && !frame.is_grayscale() {
            warn!("no color-name table configured, using HOG features only");
        }
        let geometry = Geometry::new((b1.w, b1.h), config)?;
        let (rows, cols) = geometry.grid;
        let sigma = (geometry.target_cells.0 * geometry.target_cells.1).sqrt() * config.output_sigma_factor;
        let label = gaussian_label(rows, cols, sigma)?;
        let map = SpatialMap::build(config.map_kind, geometry.grid, geometry.target_cells, config.map_params)?;
        let window = hann_window(rows, cols)?;
        let extractor = FeatureExtractor::new(config.cell_size, table);
        debug!(
            "fiducial {:?} px, grid {:?}, target {:?} cells",
            geometry.fiducial, geometry.grid, geometry.target_cells
        );

        let x = level_sample(
            frame,
            b1.center(),
            level_extent(geometry.base_size, 1.0),
            geometry.fiducial,
            &extractor,
            &window,
        )?;
        let model = train(&x, &label, &map, &config.solver, None)?;
        Ok(Self {
            config: config.clone(),
            extractor,
            geometry,
            window,
            label,
            map,
            initial_size: (b1.w, b1.h),
            bbox: b1,
            kappa: 1.0,
            model,
            frame_index: 1,
        })
    }

    pub fn step(&mut self, frame: &Frame) -> Result<BoundingBox> {
        Ok(self.step_report(frame)?.bbox)
    }

    pub fn step_report(&mut self, frame: &Frame) -> Result<StepReport> {
        let region = SearchRegion {
            center: self.bbox.center(),
            base_size: self.geometry.base_size,
            fiducial: self.geometry.fiducial,
            kappa: self.kappa,
        };
        let det = detect_multiscale(frame, &region, &self.extractor, &self.window, &self.model, &self.config.pyramid)
            .map_err(|e| match e {
            Error::InvalidInput(m) => Error::TrackingState(m),
            other => other,
        })?;
        let kappa = det.kappa;
        let bbox = BoundingBox::from_center(det.center, (self.initial_size.0 * kappa, self.initial_size.1 * kappa));

        let x = level_sample(
            frame,
            det.center,
            level_extent(self.geometry.base_size, kappa),
            self.geometry.fiducial,
            &self.extractor,
            &self.window,
        )?;
        let trained = train(&x, &self.label, &self.map, &self.config.solver, Some(&self.model))?;
        let k = self.frame_index + 1;
        self.model = merge(&self.model, &trained, &self.config.schedule, k)?;
        self.frame_index = k;
        self.kappa = kappa;
        self.bbox = bbox;
        Ok(StepReport { bbox, detection: det, trained })
    }

    pub fn bbox(&self) -> BoundingBox {
        self.bbox
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn frame_index(&self) -> u64 {
        self.frame_index
    }

    pub fn model(&self) -> &FilterBank {
        &self.model
    }

    pub fn map(&self) -> &SpatialMap {
        &self.map
    }

    pub fn label(&self) -> &RealPlane {
        &self.label
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.config
    }
}

/// Boxes produced for a sequence. When a frame fails, `boxes` holds the
/// results up to the failure and `error` says what went wrong.
#[derive(Debug)]
pub struct SequenceRun {
    pub boxes: Vec<BoundingBox>,
    pub kappas: Vec<f64>,
    pub error: Option<(usize, Error)>,
}

impl SequenceRun {
    pub fn is_complete(&self) -> bool {
        self.error.is_none()
    }
}

/// Echoes `b1` for the first frame and steps through the rest.
pub fn run_sequence<I>(frames: I, b1: BoundingBox, config: &TrackerConfig) -> SequenceRun
where
    I: IntoIterator<Item = Result<Frame>>,
{
    let table = match load_table(config) {
        Ok(t) => t,
        Err(e) => return SequenceRun { boxes: vec![], kappas: vec![], error: Some((0, Error::Config(e.to_string()))) },
    };
    run_sequence_with_table(frames, b1, config, table)
}

pub fn run_sequence_with_table<I>(
    frames: I,
    b1: BoundingBox,
    config: &TrackerConfig,
    table: Option<Arc<ColorNames>>,
) -> SequenceRun
where
    I: IntoIterator<Item = Result<Frame>>,
{
    let mut run = SequenceRun { boxes: vec![], kappas: vec![], error: None };
    let mut tracker: Option<Tracker> = None;
    for (i, frame) in frames.into_iter().enumerate() {
        let result = frame.and_then(|f| match tracker.as_mut() {
            None => {
                tracker = Some(Tracker::init_with_table(&f, b1, config, table.clone())?);
                Ok((b1, 1.0))
            }
            Some(t) => t.step(&f).map(|b| (b, t.kappa())),
        });
        match result {
            Ok((b, k)) => {
                run.boxes.push(b);
                run.kappas.push(k);
            }
            Err(e) => {
                run.error = Some((i, e));
                break;
            }
        }
    }
    if run.boxes.is_empty() && run.error.is_none() {
        run.error = Some((0, Error::invalid("sequence has no frames")));
    }
    run
}
