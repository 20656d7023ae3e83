use image::{ImageBuffer, Luma, Rgb};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skrecon::io::{read_image, read_mask, write_image, write_mask};
use skrecon::{Error, GapMask, GrayImage};

fn random_image(w: usize, h: usize, seed: u64) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GrayImage::from_fn(w, h, |_, _| f64::from(rng.gen_range(0u8..=255))).unwrap()
}

#[test]
fn round_trip_is_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let img = random_image(37, 23, 3);
    for name in ["a.pgm", "b.png", "c.PGM"] {
        let path = dir.path().join(name);
        write_image(&img, &path).unwrap();
        assert_eq!(read_image(&path).unwrap(), img, "{name}");
    }
}

#[test]
fn pgm_is_binary_p5() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.pgm");
    write_image(&GrayImage::filled(3, 2, 7.0).unwrap(), &path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    assert!(bytes.starts_with(b"P5"));
    assert!(bytes.ends_with(&[7; 6]));
}

#[test]
fn writing_quantizes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.png");
    let img = GrayImage::new(3, 1, vec![0.4, 127.5, 254.6]).unwrap();
    write_image(&img, &path).unwrap();
    assert_eq!(read_image(&path).unwrap().pixels(), &[0.0, 128.0, 255.0]);
}

#[test]
fn sixteen_bit_input_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("deep.pgm");
    // Maxval above 255 makes a 16-bit PGM.
    let mut bytes = b"P5\n2 2\n65535\n".to_vec();
    bytes.extend_from_slice(&[0, 1, 2, 3, 4, 5, 6, 7]);
    std::fs::write(&path, bytes).unwrap();
    assert!(matches!(read_image(&path), Err(Error::UnsupportedFormat { .. })));

    let png = dir.path().join("deep.png");
    ImageBuffer::<Luma<u16>, _>::from_raw(2, 2, vec![0u16, 300, 600, 900]).unwrap().save(&png).unwrap();
    assert!(matches!(read_image(&png), Err(Error::UnsupportedFormat { .. })));
}

#[test]
fn gray_rgb_reads_as_its_level() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rgb.png");
    ImageBuffer::from_pixel(4, 3, Rgb([100u8, 100, 100])).save(&path).unwrap();
    let img = read_image(&path).unwrap();
    assert_eq!(img.dims(), (4, 3));
    assert!(img.pixels().iter().all(|&v| v == 100.0));
}

#[test]
fn colour_uses_luminance() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("red.png");
    ImageBuffer::from_pixel(2, 2, Rgb([255u8, 0, 0])).save(&path).unwrap();
    // 0.299 * 255 = 76.245
    assert!(read_image(&path).unwrap().pixels().iter().all(|&v| v == 76.0));
}

#[test]
fn corrupt_and_missing_files_fail() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("junk.pgm");
    std::fs::write(&path, b"P5\n4 4\n255\n\x01").unwrap();
    assert!(read_image(&path).is_err());
    assert!(matches!(read_image(dir.path().join("nope.png")), Err(Error::Io(_))));
    assert!(matches!(
        write_image(&GrayImage::filled(2, 2, 0.0).unwrap(), dir.path().join("x.bmp")),
        Err(Error::UnsupportedFormat { .. })
    ));
}

#[test]
fn masks_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.png");
    let mut mask = GapMask::empty(5, 4);
    mask.set_missing(0, 0, true);
    mask.set_missing(3, 2, true);
    write_mask(&mask, &path).unwrap();
    assert_eq!(read_mask(&path).unwrap(), mask);
    // Threshold at 128.
    let gray = dir.path().join("g.pgm");
    write_image(&GrayImage::new(3, 1, vec![127.0, 128.0, 0.0]).unwrap(), &gray).unwrap();
    assert_eq!(read_mask(&gray).unwrap().flags(), &[true, false, true]);
}
