//! Fits empirical convergence rates of SK operators on synthetic functions.
//!
//!     cargo run --release --example convergence_rates

use skrecon::convergence::{self, Suite};
use skrecon::ProductKernel;

fn main() -> skrecon::Result<()> {
    for suite in [Suite::Lipschitz, Suite::Logw, Suite::Cssim, Suite::Lp] {
        for check in suite.run()? {
            println!(
                "{:<10} {:<55} slope {:>7.3}  r2 {:.4}  expected {:<28} {}",
                suite.name(),
                check.case,
                check.fit.slope,
                check.fit.r_squared,
                check.expected,
                if check.passed { "ok" } else { "MISS" }
            );
            for (w, e) in check.fit.w_values.iter().zip(&check.fit.errors) {
                println!("{:>14} w = {w:<5} error = {e:.4e}", "");
            }
        }
    }

    // Jackson versus B-spline at the same rate: the compact kernel wins on
    // the tent by a wide margin.
    let tent = convergence::SyntheticFunction::lipschitz(1.0, 1.0)?;
    let w = 256.0;
    let jackson = convergence::sup_error(&tent, w, &ProductKernel::jackson(1)?, convergence::SUP_GRID)?;
    let bspline = convergence::sup_error(&tent, w, &ProductKernel::bspline(3)?, convergence::SUP_GRID)?;
    println!("tent at w = {w}: Jackson s=1 {jackson:.4e}, B-spline s=3 {bspline:.4e}");

    let (_, spread) = convergence::verify_logw_rate()?;
    println!("Jackson s=1: max/min of err*w/ln w = {spread:.3}");

    for scale in [1.0, 0.5] {
        let c = convergence::verify_cssim_decay(1.0, scale)?;
        println!("cSSIM tent, stabilizer x{scale}: slope {:.4}", c.fit.slope);
    }
    Ok(())
}
