use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use skrecon::io::{read_image, write_image, write_mask};
use skrecon::{GapMask, GrayImage};

fn cameraman() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/cameraman.pgm")
}

fn skrecon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skrecon")).args(args).output().expect("run skrecon")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    assert_eq!(
        r.headers().unwrap().iter().collect::<Vec<_>>(),
        ["experiment", "image", "method", "metric", "roi", "value"]
    );
    r.records().map(|rec| rec.unwrap().iter().map(str::to_owned).collect()).collect()
}

fn metric(rows: &[Vec<String>], name: &str, roi: &str) -> String {
    rows.iter()
        .find(|r| r[3] == name && r[4] == roi)
        .unwrap_or_else(|| panic!("no {name} {roi} row"))[5]
        .clone()
}

#[test]
fn rescale_sizes_and_validation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("same.pgm");
    let o = skrecon(&["rescale", s(&cameraman()), s(&out), "--r", "1", "--w", "40", "--kernel", "bspline"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read_image(&out).unwrap().dims(), (256, 256));

    let big = dir.path().join("big.png");
    let o = skrecon(&["rescale", s(&cameraman()), s(&big), "--r", "2", "--paper-defaults"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read_image(&big).unwrap().dims(), (512, 512));

    let o = skrecon(&["rescale", s(&cameraman()), s(&out), "--r", "0", "--paper-defaults"]);
    assert!(!o.status.success());
    assert!(!o.stderr.is_empty());
    assert!(o.stdout.is_empty());
}

#[test]
fn gapfill_with_random_gaps_reports_psnr() {
    let dir = tempfile::tempdir().unwrap();
    let (out, report) = (dir.path().join("filled.pgm"), dir.path().join("report.csv"));
    let input = cameraman();
    let args = [
        "gapfill",
        s(&input),
        s(&out),
        "--fraction",
        "0.0243",
        "--seed",
        "1",
        "--w",
        "40",
        "--s",
        "9",
        "--report",
        s(&report),
    ];
    let o = skrecon(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let psnr: f64 = metric(&csv_rows(&report), "PSNR", "").parse().unwrap();
    assert!(psnr >= 30.0, "{psnr}");
    assert!(dir.path().join("filled_mask.pgm").exists());

    // Same flags, same bytes.
    let first = (std::fs::read(&out).unwrap(), std::fs::read(&report).unwrap());
    assert!(skrecon(&args).status.success());
    assert_eq!(first, (std::fs::read(&out).unwrap(), std::fs::read(&report).unwrap()));
}

#[test]
fn gapfill_with_empty_mask_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let mask = dir.path().join("mask.png");
    write_mask(&GapMask::empty(256, 256), &mask).unwrap();
    let (out, report) = (dir.path().join("out.pgm"), dir.path().join("r.csv"));
    let o = skrecon(&[
        "gapfill",
        s(&cameraman()),
        s(&out),
        "--mask",
        s(&mask),
        "--paper-defaults",
        "--report",
        s(&report),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read_image(&out).unwrap(), read_image(cameraman()).unwrap());
    assert_eq!(metric(&csv_rows(&report), "PSNR", ""), "inf");

    let o = skrecon(&["gapfill", s(&cameraman()), s(&out), "--mask", s(&dir.path().join("none.png")), "--paper-defaults"]);
    assert!(!o.status.success());

    let small = dir.path().join("small.png");
    write_mask(&GapMask::empty(10, 10), &small).unwrap();
    let o = skrecon(&["gapfill", s(&cameraman()), s(&out), "--mask", s(&small), "--paper-defaults"]);
    assert!(!o.status.success());
}

#[test]
fn despeckle_paper_row_has_every_metric() {
    let dir = tempfile::tempdir().unwrap();
    let (out, report, md) = (dir.path().join("d.png"), dir.path().join("d.csv"), dir.path().join("d.md"));
    let o = skrecon(&[
        "despeckle",
        s(&cameraman()),
        s(&out),
        "--variance",
        "0.05",
        "--seed",
        "7",
        "--pipeline",
        "bic,sk",
        "--filter",
        "nlm",
        "--roi",
        "220,200,30,40",
        "--roi",
        "180,50,50,50",
        "--report",
        s(&report),
        "--markdown",
        s(&md),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&report);
    assert!(rows.iter().all(|r| r[2] == "bic+NLM+sk" && r[1] == "cameraman"));
    for (m, roi) in [("PSNR", ""), ("SSIM", "")] {
        metric(&rows, m, roi);
    }
    for m in ["SI", "SSI", "SMPI", "ENL"] {
        for roi in ["ROI1", "ROI2"] {
            metric(&rows, m, roi);
        }
    }
    let table = std::fs::read_to_string(&md).unwrap();
    assert!(table.starts_with("| method | PSNR | SSIM | SI ROI1 | SI ROI2 |"));
}

#[test]
fn despeckle_flat_image_gives_zero_si() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("flat.pgm");
    write_image(&GrayImage::filled(40, 40, 120.0).unwrap(), &input).unwrap();
    let (out, report) = (dir.path().join("o.pgm"), dir.path().join("r.csv"));
    let o = skrecon(&[
        "despeckle",
        s(&input),
        s(&out),
        "--filter",
        "mean",
        "--pipeline",
        "direct",
        "--roi",
        "5,5,10,10",
        "--report",
        s(&report),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&report);
    assert_eq!(metric(&rows, "SI", "ROI1"), "0.000000");
    assert_eq!(metric(&rows, "ENL", "ROI1"), "inf");
}

#[test]
fn despeckle_rejects_bad_rois() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.pgm");
    for rois in [["250,250,30,30", "0,0,5,5"], ["10,10,20,20", "15,15,20,20"]] {
        let o = skrecon(&[
            "despeckle",
            s(&cameraman()),
            s(&out),
            "--filter",
            "lee",
            "--paper-defaults",
            "--roi",
            rois[0],
            "--roi",
            rois[1],
        ]);
        assert!(!o.status.success(), "{rois:?}");
    }
    assert!(!out.exists());
}

#[test]
fn convergence_suites() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rates.csv");
    let slope_of = |suite: &str, case: &str| -> f64 {
        let o = skrecon(&["convergence", "--suite", suite, "--out", s(&out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let mut r = csv::Reader::from_path(&out).unwrap();
        let rec = r.records().map(Result::unwrap).find(|rec| rec[1].contains(case)).unwrap();
        rec[4].parse().unwrap()
    };
    let tent = slope_of("lipschitz", "alpha=1)");
    assert!((tent + 1.0).abs() <= 0.15, "{tent}");
    let cssim = slope_of("cssim", "alpha=1)");
    assert!((cssim + 2.0).abs() <= 0.3, "{cssim}");

    let o = skrecon(&["convergence", "--suite", "quick", "--out", s(&out)]);
    assert!(!o.status.success());
}
