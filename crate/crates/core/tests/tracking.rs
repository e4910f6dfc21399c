use rfct::detection::ScalePyramidConfig;
use rfct::evaluation::iou;
use rfct::synthetic::{track_synthetic, SyntheticSpec, Texture};
use rfct::{BoundingBox, Tracker, TrackerConfig};

#[test]
fn model_is_the_weighted_sum_of_frame_filters() {
    let seq = SyntheticSpec { frames: 5, ..SyntheticSpec::default() }.generate();
    let cfg = TrackerConfig::default();
    let mut tracker = Tracker::init(&seq.frames[0], seq.ground_truth[0], &cfg).unwrap();
    let mut filters = vec![tracker.model().clone()];
    for f in &seq.frames[1..] {
        filters.push(tracker.step_report(f).unwrap().trained);
    }
    let k = tracker.frame_index();
    assert_eq!(k, 5);
    let coeffs = cfg.schedule.coefficients(k);
    for (l, got) in tracker.model().w().iter().enumerate() {
        let mut want = got.scale(0.0);
        for (c, f) in coeffs.iter().zip(&filters) {
            want = want.lincomb(1.0, &f.w()[l], *c).unwrap();
        }
        assert!(got.lincomb(1.0, &want, -1.0).unwrap().max_abs() < 1e-10);
    }
}

#[test]
fn grid_and_map_are_fixed_after_init() {
    let seq = SyntheticSpec { frames: 6, ..SyntheticSpec::default() }.generate();
    let mut tracker = Tracker::init(&seq.frames[0], seq.ground_truth[0], &TrackerConfig::default()).unwrap();
    let (grid, map) = (tracker.geometry().grid, tracker.map().clone());
    for f in &seq.frames[1..] {
        tracker.step(f).unwrap();
        assert_eq!(tracker.geometry().grid, grid);
        assert_eq!(tracker.map(), &map);
        assert_eq!(tracker.model().dims(), grid);
    }
}

#[test]
fn tracking_is_deterministic() {
    let seq = SyntheticSpec { frames: 10, ..SyntheticSpec::default() }.generate();
    let cfg = TrackerConfig::default();
    let a = track_synthetic(&seq, &cfg).unwrap();
    let b = track_synthetic(&seq, &cfg).unwrap();
    assert_eq!(a.run.boxes, b.run.boxes);
    assert_eq!(a.run.kappas, b.run.kappas);
}

#[test]
fn kappa_never_decreases_under_pure_zoom() {
    for zoom in [1.01, 1.02, 1.03] {
        let spec = SyntheticSpec {
            velocity: (0.0, 0.0),
            zoom,
            frames: 20,
            texture: Texture::Smooth,
            ..SyntheticSpec::default()
        };
        let k = track_synthetic(&spec.generate(), &TrackerConfig::default()).unwrap().run.kappas;
        assert!(k.windows(2).all(|w| w[1] >= w[0]), "zoom {zoom}: {k:?}");
        assert!(*k.last().unwrap() > 1.0);
    }
}

#[test]
fn target_grown_by_one_step_selects_the_next_level_up() {
    let a = TrackerConfig::default().pyramid.a;
    for texture in [Texture::Blocks, Texture::Smooth] {
        let seq =
            SyntheticSpec { velocity: (0.0, 0.0), zoom: a, frames: 2, texture, ..SyntheticSpec::default() }.generate();
        let mut tracker = Tracker::init(&seq.frames[0], seq.ground_truth[0], &TrackerConfig::default()).unwrap();
        let report = tracker.step_report(&seq.frames[1]).unwrap();
        assert_eq!(report.detection.detection.scale_index, 1, "{texture:?}");
    }
}

#[test]
fn every_map_variant_tracks_the_synthetic_square() {
    let seq = SyntheticSpec::default().generate();
    for kind in ["binary", "rquadratic", "ours"] {
        let cfg = TrackerConfig { map_kind: kind.parse().unwrap(), ..TrackerConfig::default() };
        let r = track_synthetic(&seq, &cfg).unwrap();
        assert!(r.mean_iou > 0.5, "{kind}: mean IoU {}", r.mean_iou);
    }
}

#[test]
fn single_scale_pyramid_keeps_kappa() {
    let seq = SyntheticSpec { frames: 8, ..SyntheticSpec::default() }.generate();
    let cfg = TrackerConfig { pyramid: ScalePyramidConfig { a: 1.02, s: 1 }, ..TrackerConfig::default() };
    let r = track_synthetic(&seq, &cfg).unwrap();
    assert!(r.run.kappas.iter().all(|&k| k == 1.0));
}

#[test]
fn grayscale_frames_are_tracked() {
    let seq = SyntheticSpec { frames: 8, ..SyntheticSpec::default() }.generate();
    let gray: Vec<_> = seq
        .frames
        .iter()
        .map(|f| {
            let w = f.width();
            let h = f.height();
            let data: Vec<u8> = (0..h)
                .flat_map(|y| (0..w).map(move |x| (x, y)))
                .map(|(x, y)| {
                    let p = f.pixel(x, y);
                    ((p[0] as u32 + p[1] as u32 + p[2] as u32) / 3) as u8
                })
                .collect();
            rfct::features::Frame::from_gray(w, h, &data).unwrap()
        })
        .collect();
    let run = rfct::run_sequence(gray.into_iter().map(Ok), seq.ground_truth[0], &TrackerConfig::default());
    assert!(run.is_complete());
    let mean: f64 = run.boxes.iter().zip(&seq.ground_truth).map(|(a, b)| iou(a, b)).sum::<f64>() / 8.0;
    assert!(mean > 0.5, "{mean}");
}

#[test]
fn box_partly_outside_frame_is_accepted() {
    let seq = SyntheticSpec { frames: 1, ..SyntheticSpec::default() }.generate();
    let b = BoundingBox::new(-10.0, -10.0, 30.0, 30.0).unwrap();
    assert!(Tracker::init(&seq.frames[0], b, &TrackerConfig::default()).is_ok());
}
