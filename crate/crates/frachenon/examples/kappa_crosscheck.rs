//! The extension constant kappa_s: closed gamma form vs the independent
//! ODE shooting + energy quadrature route.

use frachenon::special::{kappa_s, kappa_s_ode_crosscheck};

fn main() {
    println!("{:>4} {:>20} {:>20} {:>10}", "s", "closed", "ode", "rel diff");
    for k in 1..=9 {
        let s = 0.1 * k as f64;
        let closed = kappa_s(s).unwrap();
        let ode = kappa_s_ode_crosscheck(s).unwrap();
        println!(
            "{s:>4.1} {closed:>20.15} {ode:>20.15} {:>10.2e}",
            (ode - closed).abs() / closed
        );
    }
}
