//! Kernel properties: values, supports, partition of unity, Jackson
//! normalization and the growth of the first discrete absolute moment.
//!
//!     cargo run --release --example kernels

use skrecon::kernels::{discrete_moment_estimate, jackson_normalization, jackson_truncation_radius, partition_of_unity_residual};
use skrecon::UnivariateKernel;

fn main() -> skrecon::Result<()> {
    let grid: Vec<f64> = (0..=200).map(|i| i as f64 / 200.0).collect();

    println!("central B-splines");
    for s in [1, 2, 3, 5, 9] {
        let k = UnivariateKernel::central_bspline(s)?;
        let (lo, hi) = k.support();
        println!(
            "  s = {s}: support [{lo}, {hi}], B(0) = {:.6}, PU residual {:.1e}",
            k.eval(0.0),
            partition_of_unity_residual(&k, &grid, 20)
        );
    }

    let shifted = UnivariateKernel::shifted_bspline(9)?;
    let (lo, hi) = shifted.support();
    println!("shifted B-spline s = 9: support [{lo}, {hi}], shift {}", shifted.shift());

    println!("Jackson kernels");
    for s in [1, 2, 6, 12] {
        let c = jackson_normalization(s)?;
        println!("  s = {s:>2}: c_s = {c:.10}, truncation radius {:.1}", jackson_truncation_radius(s, c));
    }
    println!("  1 / (2 pi) = {:.10}", 1.0 / (2.0 * std::f64::consts::PI));

    // The order-1 Jackson kernel has an infinite first moment: partial sums
    // keep growing like log K.
    let j1 = UnivariateKernel::jackson(1)?;
    println!("first discrete moment of J_1, truncated at K");
    for k in [100, 1_000, 10_000, 100_000] {
        println!("  K = {k:>6}: {:.4}", discrete_moment_estimate(&j1, 1.0, k));
    }
    Ok(())
}
