//! The spectral constant lambda(alpha) on a grid, with the classical limit
//! (N-2)^2/4 - alpha^2 for comparison at s close to 1.

use frachenon::special::lambda_alpha;
use frachenon::FracParams;

fn main() {
    let fp = FracParams::new(5, 0.75).unwrap();
    let sup = fp.alpha_sup();
    println!("N = {}, s = {}, alpha_sup = {sup}", fp.n, fp.s);
    for k in 0..=10 {
        let alpha = 0.099 * k as f64 * sup;
        println!("  lambda({alpha:.4}) = {:.12}", lambda_alpha(fp, alpha).unwrap());
    }

    let fp = FracParams::new(5, 1.0 - 1e-6).unwrap();
    println!("\nclassical limit at s = 1 - 1e-6:");
    for alpha in [0.0, 0.45, 0.9] {
        let lam = lambda_alpha(fp, alpha).unwrap();
        let classical = 9.0 / 4.0 - alpha * alpha;
        println!(
            "  alpha = {alpha}: lambda = {lam:.8}, (N-2)^2/4 - alpha^2 = {classical:.8}"
        );
    }
}
