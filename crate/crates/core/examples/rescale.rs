//! Halves Cameraman and enlarges it back with each resampler, then enlarges
//! the original 2x with the SK operator and writes it next to the target dir.
//!
//!     cargo run --release --example rescale

use std::path::Path;

use skrecon::io::{read_image, write_image};
use skrecon::metrics::{psnr, ssim_windowed};
use skrecon::resample::{sk_rescale, RescaleParams, Resampler};
use skrecon::ProductKernel;

fn main() -> skrecon::Result<()> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let img = read_image(root.join("data/cameraman.pgm"))?;
    let (w, h) = img.dims();

    println!("round trip 256 -> 128 -> 256");
    let choices = [
        ("SK Jackson s=12, w=15", Resampler::default_sk()?),
        ("SK B-spline s=3, w=15", Resampler::Sk { w: 15.0, kernel: ProductKernel::bspline(3)? }),
        ("bilinear", Resampler::Bilinear),
        ("bicubic", Resampler::Bicubic),
    ];
    for (name, r) in choices {
        let back = r.resize(&r.resize(&img, w / 2, h / 2)?, w, h)?;
        println!("  {name:<24} PSNR {:.3} dB  SSIM {:.4}", psnr(&img, &back)?, ssim_windowed(&img, &back)?);
    }

    // Larger w sharpens: the operator tends to the image itself.
    println!("r = 1 with the order-3 B-spline");
    for w_rate in [1.0, 2.0, 5.0, 10.0, 40.0] {
        let out = sk_rescale(&img, &RescaleParams::new(w_rate, 1.0, ProductKernel::bspline(3)?)?)?;
        println!("  w = {w_rate:<4} PSNR {:.3} dB", psnr(&img, &out)?);
    }

    let big = sk_rescale(&img, &RescaleParams::new(15.0, 2.0, ProductKernel::jackson(12)?)?)?;
    let dest = std::env::temp_dir().join("cameraman_x2.png");
    write_image(&big, &dest)?;
    println!("wrote {}x{} to {}", big.width(), big.height(), dest.display());
    Ok(())
}
