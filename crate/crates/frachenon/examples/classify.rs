//! Regime classification for a few Hardy-Henon parameter tuples.

use frachenon::regimes::{classify, sobolev_exponent};
use frachenon::ProblemParams;

fn main() {
    let cases = [
        (3, 0.5, 0.0, 2.0),
        (3, 0.5, 0.0, 7.0),
        (5, 0.5, 0.0, 3.0),
        (5, 0.5, 1.0, 4.0),
        (11, 0.999, 0.0, 7.5),
        (15, 0.999, 1.0, 11.0),
    ];
    println!(
        "{:>3} {:>6} {:>5} {:>6}  {:>10} {:>12} {:>12}  regime",
        "N", "s", "l", "p", "p_S", "p*l(a~)", "l(0)"
    );
    for (n, s, ell, p) in cases {
        let pp = ProblemParams::new(n, s, ell, p).unwrap();
        let rep = classify(pp).unwrap();
        println!(
            "{:>3} {:>6} {:>5} {:>6}  {:>10.5} {:>12.6} {:>12.6}  {}",
            n,
            s,
            ell,
            p,
            rep.p_sobolev,
            p * rep.lambda_at_alpha_tilde,
            rep.lambda_at_zero,
            rep.regime.as_str()
        );
    }
    // The Sobolev exponent itself, for reference.
    println!(
        "\np_S(5, 0.5, 0) = {}",
        sobolev_exponent(5, 0.5, 0.0).unwrap()
    );
}
