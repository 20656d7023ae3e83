//! One-dimensional numerical integration.
//!
//! Adaptive Gauss-Kronrod (7/15) for integrands whose behaviour is not known
//! in advance, and fixed eight-point Gauss-Legendre for per-cell means of
//! smooth pieces.

use crate::error::{Error, Result};

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const GAUSS7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];

const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
}

fn kronrod_segment<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = KRONROD_WEIGHTS[7] * fc;
    let mut gauss = GAUSS7_WEIGHTS[3] * fc;
    for (i, (&node, &weight)) in KRONROD_NODES[..7].iter().zip(&KRONROD_WEIGHTS[..7]).enumerate() {
        let dx = half * node;
        let pair = f(center - dx) + f(center + dx);
        kronrod += weight * pair;
        if i % 2 == 1 {
            gauss += GAUSS7_WEIGHTS[i / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Integrates `f` over `[a, b]` by globally adaptive bisection until the
/// summed Kronrod error estimate falls below `tol`.
pub fn adaptive_integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<Integral> {
    const MAX_SEGMENTS: usize = 20_000;
    let (v, e) = kronrod_segment(&f, a, b);
    let mut segments = vec![(a, b, v, e)];
    loop {
        let total_err: f64 = segments.iter().map(|s| s.3).sum();
        if total_err <= tol {
            break;
        }
        if segments.len() >= MAX_SEGMENTS {
            return Err(Error::Quadrature {
                achieved: total_err,
                requested: tol,
            });
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("at least one segment");
        let (lo, hi, _, _) = segments.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = kronrod_segment(&f, lo, mid);
        let (v2, e2) = kronrod_segment(&f, mid, hi);
        segments.push((lo, mid, v1, e1));
        segments.push((mid, hi, v2, e2));
    }
    // Sum in position order so the value does not depend on refinement history.
    segments.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(Integral {
        value: segments.iter().map(|s| s.2).sum(),
        error_estimate: segments.iter().map(|s| s.3).sum(),
    })
}

/// Eight-point Gauss-Legendre rule on `[a, b]`; exact for polynomials of
/// degree up to 15.
pub fn gauss_legendre8<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (&node, &weight) in GL8_NODES.iter().zip(&GL8_WEIGHTS) {
        let dx = half * node;
        acc += weight * (f(center - dx) + f(center + dx));
    }
    acc * half
}

/// Abscissae of the eight-point rule mapped onto `[a, b]`, paired with weights
/// that already include the interval half-length.
pub fn gauss_legendre8_points(a: f64, b: f64) -> [(f64, f64); 8] {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut out = [(0.0, 0.0); 8];
    for (i, (&node, &weight)) in GL8_NODES.iter().zip(&GL8_WEIGHTS).enumerate() {
        out[2 * i] = (center - half * node, weight * half);
        out[2 * i + 1] = (center + half * node, weight * half);
    }
    out
}
