//! Eq. 2.7: the weighted half-space gradient energy of the extension of a
//! compact bump equals kappa_s times the Gagliardo H^s form of its trace.

use frachenon::energetics::{half_space_gradient_energy, hs_bilinear_form};
use frachenon::special::kappa_s;
use frachenon::{ExtensionField, FracParams, RadialProfile};

fn main() {
    let fp = FracParams::new(3, 0.5).unwrap();
    let grid: Vec<f64> = (1..=240).map(|k| 1.2 * k as f64 / 240.0).collect();
    let vals: Vec<f64> = grid.iter().map(|&r| (1.0 - r * r).max(0.0).powi(3)).collect();
    let bump = RadialProfile::sampled(grid, vals, f64::INFINITY).unwrap();

    let field = ExtensionField::poisson_of(fp, bump.clone()).unwrap();
    let lhs = half_space_gradient_energy(&field, 12.0).unwrap();
    let rhs = kappa_s(fp.s).unwrap() * hs_bilinear_form(&bump, &bump, fp).unwrap();
    println!("int t^(1-2s) |grad U|^2      = {lhs:.8}");
    println!("kappa_s * ||u||_{{H^s}}^2      = {rhs:.8}");
    println!("rel difference               = {:.2e}", (lhs - rhs).abs() / rhs);
}
