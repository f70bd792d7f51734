//! Poisson extension of radial profiles to the upper half space: trace
//! recovery for a compact bump and the homogeneity law for the power-law
//! model field.

use frachenon::extension::{extend, homogeneity_residual, model_v_alpha};
use frachenon::{FracParams, HalfSpacePoint, RadialProfile};

fn main() {
    let fp = FracParams::new(3, 0.5).unwrap();

    // Compactly supported bump (1 - r^2)_+^3 on a sampled grid.
    let grid: Vec<f64> = (1..=240).map(|k| 1.2 * k as f64 / 240.0).collect();
    let vals: Vec<f64> = grid.iter().map(|&r| (1.0 - r * r).max(0.0).powi(3)).collect();
    let bump = RadialProfile::sampled(grid, vals, f64::INFINITY).unwrap();
    for (r, t) in [(0.0, 0.5), (0.5, 0.25), (1.5, 1.0)] {
        let v = extend(&bump, fp, HalfSpacePoint::new(r, t).unwrap()).unwrap();
        println!("U_bump({r}, {t}) = {v:.10}");
    }
    let near_trace = extend(&bump, fp, HalfSpacePoint::new(0.5, 1e-12).unwrap()).unwrap();
    println!(
        "trace check at r = 0.5: U(0.5, 1e-12) = {near_trace:.10} vs u = {:.10}",
        bump.value(0.5)
    );

    // Model field: the extension of |x|^{-((N-2s)/2 - alpha)}.
    let alpha = 0.3;
    let pt = HalfSpacePoint::new(0.8, 0.6).unwrap();
    println!("\nV_alpha(0.8, 0.6) = {:.12}", model_v_alpha(fp, alpha, pt).unwrap());
    for k in [0.5, 2.0, 4.0] {
        let res = homogeneity_residual(fp, alpha, pt, k).unwrap();
        println!("homogeneity residual at k = {k}: {res:.2e}");
    }
}
