use std::path::Path;
use std::process::{Command, Output};

use rfct::evaluation::{format_boxes, load_boxes};
use rfct::synthetic::SyntheticSpec;

fn rfct(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rfct")).args(args).output().expect("binary runs")
}

fn write_sequence(dir: &Path, frames: usize) -> Vec<rfct::BoundingBox> {
    let seq = SyntheticSpec { frames, ..SyntheticSpec::default() }.generate();
    std::fs::create_dir_all(dir).unwrap();
    for (i, f) in seq.frames.iter().enumerate() {
        let raw: Vec<u8> = (0..f.height()).flat_map(|y| (0..f.width()).flat_map(move |x| f.pixel(x, y))).collect();
        let img = image::RgbImage::from_raw(f.width() as u32, f.height() as u32, raw).unwrap();
        img.save(dir.join(format!("{:04}.png", i + 1))).unwrap();
    }
    seq.ground_truth
}

fn init_arg(b: &rfct::BoundingBox) -> String {
    format_boxes(&[*b]).trim().to_string()
}

#[test]
fn track_writes_one_line_per_frame() {
    let tmp = tempfile::tempdir().unwrap();
    let gt = write_sequence(&tmp.path().join("img"), 12);
    let out = tmp.path().join("pred.txt");
    let log = tmp.path().join("effects.cfg");
    let o = rfct(&[
        "track",
        tmp.path().join("img").to_str().unwrap(),
        "--init",
        &init_arg(&gt[0]),
        "--out",
        out.to_str().unwrap(),
        "--map",
        "rquadratic",
        "--effects-log",
        log.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let boxes = load_boxes(&out).unwrap();
    assert_eq!(boxes.len(), 12);
    assert_eq!(boxes[0].unwrap().w, gt[0].w);
    assert!(std::fs::read_to_string(&log).unwrap().contains("map.kind = rquadratic"));

    // Replaying with the logged config reproduces the run exactly.
    let out2 = tmp.path().join("pred2.txt");
    let o = rfct(&[
        "track",
        tmp.path().join("img").to_str().unwrap(),
        "--init",
        &init_arg(&gt[0]),
        "--out",
        out2.to_str().unwrap(),
        "--config",
        log.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&out2).unwrap());
}

#[test]
fn track_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("pred.txt");
    let empty = tmp.path().join("empty");
    std::fs::create_dir_all(&empty).unwrap();
    let o = rfct(&["track", empty.to_str().unwrap(), "--init", "1,1,10,10", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let bad = tmp.path().join("img");
    std::fs::create_dir_all(&bad).unwrap();
    std::fs::write(bad.join("0001.jpg"), b"not an image").unwrap();
    let o = rfct(&["track", bad.to_str().unwrap(), "--init", "1,1,10,10", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let cfg = tmp.path().join("bad.cfg");
    std::fs::write(&cfg, "iterations = 0\n").unwrap();
    let o = rfct(&[
        "track",
        bad.to_str().unwrap(),
        "--init",
        "1,1,10,10",
        "--out",
        out.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));

    let o = rfct(&[
        "track",
        bad.to_str().unwrap(),
        "--init",
        "1,1,10,10",
        "--out",
        out.to_str().unwrap(),
        "--map",
        "hexagon",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn eval_perfect_and_guards() {
    let tmp = tempfile::tempdir().unwrap();
    let gt = tmp.path().join("gt.txt");
    std::fs::write(&gt, "1,1,10,10\n5\t5\t20\t20\n3 4 8 9\n").unwrap();
    let json = tmp.path().join("m.json");
    let o = rfct(&["eval", gt.to_str().unwrap(), gt.to_str().unwrap(), "--out", json.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!((v["dp20"].as_f64(), v["op50"].as_f64(), v["auc"].as_f64()), (Some(1.0), Some(1.0), Some(1.0)));
    assert_eq!(v["precision"].as_array().unwrap().len(), 51);
    assert_eq!(v["success"].as_array().unwrap().len(), 21);

    let short = tmp.path().join("short.txt");
    std::fs::write(&short, "1,1,10,10\n").unwrap();
    let o = rfct(&["eval", short.to_str().unwrap(), gt.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));

    let empty = tmp.path().join("empty.txt");
    std::fs::write(&empty, "").unwrap();
    let o = rfct(&["eval", empty.to_str().unwrap(), empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn selftest_variants() {
    let o = rfct(&["selftest"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let o = rfct(&["selftest", "--scales", "1"]);
    assert!(o.status.success());
    let o = rfct(&["selftest", "--iterations", "0"]);
    assert_eq!(o.status.code(), Some(3));
}
