//! Singularity-aware quadrature shared by every verification operation:
//! adaptive Gauss-Legendre panels, power-weight endpoint substitutions,
//! tail inversion for infinite domains, a symmetric-excision principal-value
//! rule and weighted half-sphere integrals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::special::sphere_area;

/// Tolerances and declared endpoint behavior for one integral.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Power-law exponents of the integrand at the (left, right) endpoint;
    /// both must exceed -1 for integrability.
    pub endpoint_exponents: (f64, f64),
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 4000,
            endpoint_exponents: (0.0, 0.0),
        }
    }
}

impl QuadratureSpec {
    pub fn with_tols(abs_tol: f64, rel_tol: f64) -> Self {
        QuadratureSpec {
            abs_tol,
            rel_tol,
            ..Default::default()
        }
    }

    pub fn with_exponents(mut self, left: f64, right: f64) -> Self {
        self.endpoint_exponents = (left, right);
        self
    }
}

/// Value, error estimate and convergence flag of one integral.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions_used: usize,
    pub converged: bool,
}

impl QuadratureResult {
    fn zero() -> Self {
        QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            subdivisions_used: 0,
            converged: true,
        }
    }

    pub fn combine(self, other: QuadratureResult) -> QuadratureResult {
        QuadratureResult {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            subdivisions_used: self.subdivisions_used + other.subdivisions_used,
            converged: self.converged && other.converged,
        }
    }
}

fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    // Newton iteration on P_n with the three-term recurrence.
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0_f64, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0_f64, x);
        for k in 2..=n {
            let kf = k as f64;
            let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

fn gl16() -> &'static [(f64, f64)] {
    static CELL: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    CELL.get_or_init(|| gauss_legendre(16))
}

fn gl32() -> &'static [(f64, f64)] {
    static CELL: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    CELL.get_or_init(|| gauss_legendre(32))
}

fn panel<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64, rule: &[(f64, f64)]) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for &(x, w) in rule {
        sum += w * f(mid + half * x);
    }
    sum * half
}

#[derive(Debug)]
struct Interval {
    err: f64,
    seq: usize,
    a: f64,
    b: f64,
    value: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err && self.seq == other.seq
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Globally adaptive Gauss-Legendre integration of a finite-interval
/// integrand that is smooth except possibly for integrable interior or
/// endpoint singularities.
pub fn integrate_adaptive<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> QuadratureResult {
    if a == b {
        return QuadratureResult::zero();
    }
    let eval = |lo: f64, hi: f64, seq: usize| -> Interval {
        let coarse = panel(f, lo, hi, gl16());
        let fine = panel(f, lo, hi, gl32());
        Interval {
            err: (fine - coarse).abs().max(1e-300),
            seq,
            a: lo,
            b: hi,
            value: fine,
        }
    };
    let mut heap = BinaryHeap::new();
    let mut seq = 0_usize;
    heap.push(eval(a, b, seq));
    let mut used = 1_usize;
    loop {
        let total_val: f64 = heap.iter().map(|iv| iv.value).sum();
        let total_err: f64 = heap.iter().map(|iv| iv.err).sum();
        let target = spec.abs_tol.max(spec.rel_tol * total_val.abs());
        if total_err <= target {
            return QuadratureResult {
                value: total_val,
                error_estimate: total_err,
                subdivisions_used: used,
                converged: true,
            };
        }
        if used >= spec.max_subdivisions {
            return QuadratureResult {
                value: total_val,
                error_estimate: total_err,
                subdivisions_used: used,
                converged: false,
            };
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval at floating-point resolution; freeze it.
            heap.push(Interval { err: 0.0, ..worst });
            continue;
        }
        seq += 1;
        heap.push(eval(worst.a, mid, seq));
        seq += 1;
        heap.push(eval(mid, worst.b, seq));
        used += 1;
    }
}

/// Integral of `f` over `[a, b]` where `f` behaves like a power of the
/// distance to each endpoint, with the exponents declared in the `QuadratureSpec`.
///
/// Each half is mapped by `t = u^{1/(1+exponent)}` onto a bounded
/// integrand before adaptive integration.
pub fn integrate_power_weight<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> QuadratureResult {
    if a == b {
        return QuadratureResult::zero();
    }
    let (ga, gb) = spec.endpoint_exponents;
    assert!(ga > -1.0 && gb > -1.0, "endpoint exponents must exceed -1");
    let mid = 0.5 * (a + b);
    let half_spec = QuadratureSpec {
        abs_tol: 0.5 * spec.abs_tol,
        ..*spec
    };
    let left = integrate_endpoint_mapped(f, a, mid, ga, false, &half_spec);
    let right = integrate_endpoint_mapped(f, b, mid, gb, true, &half_spec);
    left.combine(right)
}

fn integrate_endpoint_mapped<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    endpoint: f64,
    inner: f64,
    exponent: f64,
    mirrored: bool,
    spec: &QuadratureSpec,
) -> QuadratureResult {
    let _ = mirrored;
    let len = (inner - endpoint).abs();
    let dir = if inner > endpoint { 1.0 } else { -1.0 };
    let beta = 1.0 / (1.0 + exponent);
    let g = move |u: f64| {
        let tau = len * u.powf(beta);
        let jac = len * beta * u.powf(beta - 1.0);
        f(endpoint + dir * tau) * jac
    };
    integrate_adaptive(&g, 0.0, 1.0, spec)
}

/// Integral of `f` over `[a, infinity)` for an integrand with a declared
/// power-law tail `f ~ r^{-tail_exponent}`, `tail_exponent > 1`. Mapped by
/// `r = 1/w` onto `(0, 1/a]` with the power weight handled at `w = 0`.
pub fn integrate_tail<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    tail_exponent: f64,
    spec: &QuadratureSpec,
) -> QuadratureResult {
    assert!(a > 0.0, "tail integral needs a positive lower limit");
    assert!(tail_exponent > 1.0, "tail must decay faster than 1/r");
    let g = move |w: f64| f(1.0 / w) / (w * w);
    let tail_spec = QuadratureSpec {
        endpoint_exponents: (tail_exponent - 2.0, 0.0),
        ..*spec
    };
    integrate_power_weight(&g, 0.0, 1.0 / a, &tail_spec)
}

/// Cauchy principal value of `g` over `[a, b]` around an interior
/// non-integrable symmetric singularity at `c`.
///
/// The symmetric window around `c` is excised at the geometric radii
/// `eps_k = delta 2^{-k}` and the partial integrals are extrapolated to
/// `eps -> 0` from the measured geometric decay of their increments.
pub fn integrate_pv_radial<F: Fn(f64) -> f64 + ?Sized>(
    g: &F,
    a: f64,
    b: f64,
    c: f64,
    spec: &QuadratureSpec,
) -> QuadratureResult {
    assert!(a < c && c < b, "singular point must be interior");
    let delta = (c - a).min(b - c);
    let mut outer = QuadratureResult::zero();
    if c - delta > a {
        outer = outer.combine(integrate_adaptive(g, a, c - delta, spec));
    }
    if c + delta < b {
        outer = outer.combine(integrate_adaptive(g, c + delta, b, spec));
    }

    // Folded integrand: the odd part of the singularity cancels exactly.
    let folded = move |h: f64| g(c + h) + g(c - h);
    let levels = 16_usize;
    let mut partial = Vec::with_capacity(levels);
    let mut t = 0.0;
    let mut hi = delta;
    let mut sub_used = 0;
    let mut flag = true;
    for _ in 0..levels {
        let lo = 0.5 * hi;
        let shell = integrate_adaptive(&folded, lo, hi, spec);
        sub_used += shell.subdivisions_used;
        flag &= shell.converged;
        t += shell.value;
        partial.push(t);
        hi = lo;
    }
    // Geometric extrapolation of T(eps_k) from the last increments.
    let k = partial.len() - 1;
    let d1 = partial[k] - partial[k - 1];
    let d0 = partial[k - 1] - partial[k - 2];
    let (limit, extrap_err) = if d0.abs() < 1e-300 || (d1 / d0).abs() >= 1.0 {
        // Increments no longer decay geometrically: either converged to
        // roundoff or the singularity is not symmetric.
        let err = d1.abs().max(d0.abs());
        (partial[k], err)
    } else {
        let rho = d1 / d0;
        (partial[k] + d1 * rho / (1.0 - rho), (d1 * rho / (1.0 - rho)).abs() * 0.5 + d1.abs() * 1e-10)
    };
    let value = outer.value + limit;
    let error = outer.error_estimate + extrap_err;
    let converged =
        flag && limit.is_finite() && error <= spec.abs_tol.max(spec.rel_tol * value.abs());
    QuadratureResult {
        value,
        error_estimate: error,
        subdivisions_used: outer.subdivisions_used + sub_used,
        converged,
    }
}

/// Integral over the unit upper half-sphere in `R^{N+1}` of an axially
/// symmetric integrand `h(theta)` (polar angle from the vertical axis)
/// against the weight `sigma_{N+1}^{weight_exponent} = cos^w(theta)`:
///
/// `|S^{N-1}| int_0^{pi/2} h(theta) cos^w(theta) sin^{N-1}(theta) d(theta)`.
pub fn integrate_half_sphere<F: Fn(f64) -> f64 + ?Sized>(
    h: &F,
    weight_exponent: f64,
    n: u32,
    spec: &QuadratureSpec,
) -> QuadratureResult {
    let nf = n as f64;
    let f = move |theta: f64| {
        h(theta) * theta.cos().powf(weight_exponent) * theta.sin().powf(nf - 1.0)
    };
    let angle_spec = QuadratureSpec {
        endpoint_exponents: (nf - 1.0, weight_exponent),
        ..*spec
    };
    let mut res = integrate_power_weight(&f, 0.0, std::f64::consts::FRAC_PI_2, &angle_spec);
    let area = sphere_area(n);
    res.value *= area;
    res.error_estimate *= area;
    res
}

/// Product-rule integral over the upper half of `S^2` (`N = 2`) of a
/// general integrand `h(theta, phi)`; exists for test purposes, every
/// in-scope profile is axially symmetric.
pub fn integrate_half_sphere_general<F: Fn(f64, f64) -> f64>(
    h: &F,
    weight_exponent: f64,
    spec: &QuadratureSpec,
) -> QuadratureResult {
    let outer = move |theta: f64| {
        let inner = |phi: f64| h(theta, phi);
        let inner_res = integrate_adaptive(&inner, 0.0, 2.0 * std::f64::consts::PI, spec);
        inner_res.value * theta.cos().powf(weight_exponent) * theta.sin()
    };
    let angle_spec = QuadratureSpec {
        endpoint_exponents: (1.0, weight_exponent),
        ..*spec
    };
    integrate_power_weight(&outer, 0.0, std::f64::consts::FRAC_PI_2, &angle_spec)
}
