//! Joseph-Lundgren-type thresholds at s close to 1 against the classical
//! closed forms p_c(N) and p_+(N, l).

use frachenon::regimes::{classical_jl, classical_jl_henon, jl_threshold, JL_PROBE_CAP};

fn main() {
    let s = 1.0 - 1e-3;
    for n in [11u32, 12, 15] {
        let frac = jl_threshold(n, s, 0.0).unwrap();
        let class = classical_jl(n);
        println!(
            "N = {n:>2}: jl_threshold(s={s}) = {frac:.6}, classical p_c = {class:.6}, rel diff = {:.2e}",
            (frac - class).abs() / class
        );
    }
    let frac = jl_threshold(15, s, 1.0).unwrap();
    let class = classical_jl_henon(15, 1.0).unwrap();
    println!(
        "N = 15, l = 1: {frac:.6} vs classical p_+ = {class:.6}, rel diff = {:.2e}",
        (frac - class).abs() / class
    );

    // Low dimension: no crossing up to the probe cap.
    let t = jl_threshold(3, 0.5, 0.0).unwrap();
    println!("N = 3, s = 0.5: threshold = {t} (probe cap {JL_PROBE_CAP:e})");
}
