//! The blow-down energy E(lambda) = lambda^gamma (D + (gamma/4) H) is
//! constant along the singular solution (Lemma 4.2 degeneracy), and
//! dH/dlambda matches its surface form (Lemma 4.1).

use frachenon::energetics::{dh_dlambda_residual, dh_solution_form_residual, energy_e};
use frachenon::regimes::singular_amplitude;
use frachenon::{ExtensionField, ProblemParams, RadialProfile};

fn main() {
    let pp = ProblemParams::new(5, 0.5, 0.0, 3.0).unwrap();
    let field = ExtensionField::singular_solution(pp).unwrap();
    let amp = singular_amplitude(pp).unwrap();
    let trace = RadialProfile::power_law(0.5 * pp.gamma(), amp);

    println!("N=5 s=0.5 l=0 p=3, gamma = {}", pp.gamma());
    for lambda in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let rep = energy_e(&field, &trace, lambda, pp).unwrap();
        println!(
            "  lambda = {lambda:>4}: D = {:>14.10}, H = {:>14.10}, E = {:.12}",
            rep.d, rep.h, rep.e
        );
    }

    let fd = dh_dlambda_residual(&field, 1.0, pp).unwrap();
    println!("\ndH/dlambda vs surface form: rel residual {:.2e}", fd.rel_residual);
    let sol = dh_solution_form_residual(&field, &trace, 1.0, pp).unwrap();
    println!("dH/dlambda vs solution form: rel residual {:.2e}", sol.rel_residual);
}
