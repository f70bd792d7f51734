//! The eigenvalue identity (-Delta)^s |x|^{-((N-2s)/2 - alpha)}
//! = lambda(alpha) |x|^{-((N-2s)/2 - alpha) - 2s}, checked by evaluating the
//! principal-value integral at r = 1.

use frachenon::extension::frac_laplacian_pv;
use frachenon::special::lambda_alpha;
use frachenon::{FracParams, RadialProfile};

fn main() {
    for (n, s) in [(2, 0.25), (3, 0.5), (5, 0.75)] {
        let fp = FracParams::new(n, s).unwrap();
        let sup = fp.alpha_sup();
        for frac in [0.2, 0.5, 0.8] {
            let alpha = frac * sup;
            let m = sup - alpha;
            let profile = RadialProfile::power_law(m, 1.0);
            let pv = frac_laplacian_pv(&profile, fp, 1.0).unwrap();
            let lam = lambda_alpha(fp, alpha).unwrap();
            println!(
                "N={n} s={s} alpha={alpha:.4}: pv = {pv:.10}, lambda = {lam:.10}, diff = {:.2e}",
                (pv - lam).abs()
            );
        }
    }
}
