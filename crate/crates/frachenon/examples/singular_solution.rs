//! The explicit singular solution A |x|^{-gamma/2} and its Pohozaev
//! residuals (Prop. 2.2) at several radii.

use frachenon::energetics::pohozaev_residuals;
use frachenon::regimes::singular_amplitude;
use frachenon::{ExtensionField, ProblemParams, RadialProfile};

fn main() {
    for (n, s, ell, p) in [(5, 0.5, 0.0, 3.0), (5, 0.5, 1.0, 4.0)] {
        let pp = ProblemParams::new(n, s, ell, p).unwrap();
        let amp = singular_amplitude(pp).unwrap();
        println!(
            "N={n} s={s} l={ell} p={p}: gamma/2 = {}, amplitude A = {amp:.12}",
            0.5 * pp.gamma()
        );
        let field = ExtensionField::singular_solution(pp).unwrap();
        let trace = RadialProfile::power_law(0.5 * pp.gamma(), amp);
        for radius in [0.5, 1.0, 2.0] {
            let (scaling, energy) = pohozaev_residuals(&field, &trace, radius, pp).unwrap();
            println!(
                "  R = {radius}: {} rel = {:.2e}; {} rel = {:.2e}",
                scaling.identity_name,
                scaling.rel_residual,
                energy.identity_name,
                energy.rel_residual
            );
        }
    }
}
