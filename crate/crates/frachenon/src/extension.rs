//! Radial profiles, the Caffarelli-Silvestre extension to the upper half
//! space, the homogeneous model field built from the singular solution, and
//! a principal-value evaluator for the fractional Laplacian of a radial
//! function.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::interp::{ChebyshevInterpolant, MonotoneCubic};
use crate::quadrature::{integrate_adaptive, integrate_power_weight, integrate_tail, QuadratureSpec};
use crate::regimes::{singular_amplitude, ProblemParams};
use crate::special::{frac_laplacian_constant, poisson_normalizer, sphere_area, FracParams};

/// A radial function on R^N with power-law behavior at both ends.
#[derive(Debug, Clone)]
pub enum RadialProfile {
    /// `u(r) = amplitude r^{-exponent}`.
    PowerLaw { exponent: f64, amplitude: f64 },
    /// Samples on a strictly increasing positive grid, monotone-cubic in
    /// between, power-law extrapolated outside. `tail` is the decay
    /// exponent past the last sample; an infinite tail truncates to zero.
    Sampled {
        grid: Vec<f64>,
        values: Vec<f64>,
        tail: f64,
        interp: MonotoneCubic,
    },
    /// Identically zero.
    Zero,
}

impl RadialProfile {
    pub fn power_law(exponent: f64, amplitude: f64) -> Self {
        RadialProfile::PowerLaw { exponent, amplitude }
    }

    pub fn sampled(grid: Vec<f64>, values: Vec<f64>, tail: f64) -> Result<Self> {
        if grid.len() < 2 || grid.len() != values.len() {
            return Err(Error::InvalidParameter(
                "sampled profile needs at least two matching samples".into(),
            ));
        }
        if grid[0] <= 0.0 || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "sample radii must be positive and strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("sample values must be finite".into()));
        }
        if tail.is_nan() {
            return Err(Error::InvalidParameter("tail exponent must not be NaN".into()));
        }
        let interp = MonotoneCubic::new(grid.clone(), values.clone());
        Ok(RadialProfile::Sampled { grid, values, tail, interp })
    }

    pub fn value(&self, r: f64) -> f64 {
        match self {
            RadialProfile::PowerLaw { exponent, amplitude } => amplitude * r.powf(-exponent),
            RadialProfile::Sampled { grid, values, tail, interp } => {
                let (r0, r_last) = (grid[0], *grid.last().unwrap());
                if r <= r0 {
                    let g = self.head_exponent();
                    if values[0] == 0.0 {
                        0.0
                    } else {
                        values[0] * (r / r0).powf(-g)
                    }
                } else if r >= r_last {
                    let v = *values.last().unwrap();
                    if v == 0.0 || tail.is_infinite() {
                        0.0
                    } else {
                        v * (r / r_last).powf(-tail)
                    }
                } else {
                    interp.eval(r)
                }
            }
            RadialProfile::Zero => 0.0,
        }
    }

    /// Exponent `e` with `u ~ r^{-e}` as `r -> 0`.
    pub fn head_exponent(&self) -> f64 {
        match self {
            RadialProfile::PowerLaw { exponent, .. } => *exponent,
            RadialProfile::Sampled { grid, values, .. } => {
                if values[0] > 0.0 && values[1] > 0.0 {
                    -(values[1] / values[0]).ln() / (grid[1] / grid[0]).ln()
                } else {
                    0.0
                }
            }
            RadialProfile::Zero => 0.0,
        }
    }

    /// Decay exponent at infinity, or `None` when the profile is
    /// identically zero past some radius.
    pub fn tail_exponent(&self) -> Option<f64> {
        match self {
            RadialProfile::PowerLaw { exponent, .. } => Some(*exponent),
            RadialProfile::Sampled { values, tail, .. } => {
                if *values.last().unwrap() == 0.0 || tail.is_infinite() {
                    None
                } else {
                    Some(*tail)
                }
            }
            RadialProfile::Zero => None,
        }
    }

    /// Radius past which the profile vanishes identically, if any.
    pub fn cutoff(&self) -> Option<f64> {
        match self {
            RadialProfile::Sampled { grid, values, tail, .. } => {
                if *values.last().unwrap() == 0.0 || tail.is_infinite() {
                    Some(*grid.last().unwrap())
                } else {
                    None
                }
            }
            RadialProfile::Zero => Some(0.0),
            _ => None,
        }
    }

    /// Reject profiles outside the natural class for the extension:
    /// locally integrable on R^N and integrable against
    /// `(1+|x|)^{-N-2s}`.
    fn check_class(&self, fp: FracParams) -> Result<()> {
        let e = self.head_exponent();
        if e >= fp.n as f64 {
            return Err(Error::DivergentIntegral(format!(
                "profile grows like r^{{-{e}}} at the origin, not integrable in dimension {}",
                fp.n
            )));
        }
        if let Some(te) = self.tail_exponent() {
            if te <= -2.0 * fp.s {
                return Err(Error::DivergentIntegral(format!(
                    "profile tail r^{{-{te}}} grows too fast against the 2s-weight"
                )));
            }
        }
        Ok(())
    }
}

/// Point (|x|, t) of the upper half space R^N x (0, infinity), radially
/// symmetric in x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfSpacePoint {
    pub r: f64,
    pub t: f64,
}

impl HalfSpacePoint {
    pub fn new(r: f64, t: f64) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite() && t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "half-space point needs finite r >= 0, t >= 0, got ({r}, {t})"
            )));
        }
        Ok(HalfSpacePoint { r, t })
    }

    pub fn radius(&self) -> f64 {
        self.r.hypot(self.t)
    }

    /// Polar angle from the t-axis, in [0, pi/2].
    pub fn theta(&self) -> f64 {
        self.r.atan2(self.t)
    }
}

/// Poisson kernel `p_{N,s} t^{2s} (d^2 + t^2)^{-(N+2s)/2}` at horizontal
/// distance `d`; the normalizer is passed in so callers can cache it.
pub fn poisson_kernel(fp: FracParams, normalizer: f64, d: f64, t: f64) -> f64 {
    normalizer * t.powf(2.0 * fp.s) * (d * d + t * t).powf(-0.5 * (fp.n as f64 + 2.0 * fp.s))
}

/// Integral of `(A - B cos(phi))^{-nu/2}` over the unit sphere S^{N-1},
/// with `phi` the polar angle (so the N = 1 sphere is the two points
/// cos(phi) = +-1). Requires `A > |B| >= 0`.
pub fn angular_kernel(n: u32, nu: f64, a_coef: f64, b_coef: f64) -> Result<f64> {
    let b_coef = b_coef.abs();
    if !(a_coef > b_coef) {
        return Err(Error::Domain(format!(
            "angular kernel needs A > |B|, got A={a_coef}, B={b_coef}"
        )));
    }
    angular_kernel_gap(n, nu, a_coef - b_coef, b_coef)
}

/// As `angular_kernel` with the gap `A - B` passed directly; callers that
/// can form the gap without cancellation (e.g. as `(r - rho)^2 + t^2`)
/// keep full precision when it is tiny.
pub fn angular_kernel_gap(n: u32, nu: f64, gap: f64, b_coef: f64) -> Result<f64> {
    if !(gap > 0.0 && b_coef >= 0.0) {
        return Err(Error::Domain(format!(
            "angular kernel needs A - B > 0 and B >= 0, got gap={gap}, B={b_coef}"
        )));
    }
    let q = 0.5 * nu;
    if n == 1 {
        return Ok(gap.powf(-q) + (gap + 2.0 * b_coef).powf(-q));
    }
    if b_coef < gap {
        // b/a < 1/2: the moment series converges geometrically.
        return Ok(angular_kernel_series(n, q, gap + b_coef, b_coef));
    }
    if n % 2 == 1 {
        Ok(angular_kernel_odd(n, q, gap, gap + 2.0 * b_coef))
    } else {
        Ok(angular_kernel_numeric(n, q, gap, b_coef))
    }
}

/// Expansion of `(1 - x cos(phi))^{-q}` in even moments of `cos(phi)`;
/// converges geometrically for `x = B/A < 1/2`.
fn angular_kernel_series(n: u32, q: f64, a: f64, b: f64) -> f64 {
    let x2 = (b / a) * (b / a);
    // moment_0 = |S^{N-1}| / |S^{N-2}|
    let mut moment = sphere_area(n) / sphere_area(n - 1);
    let mut coef = 1.0;
    let mut sum = moment;
    let nf = n as f64;
    for j in 1..400 {
        let jf = j as f64;
        moment *= (2.0 * jf - 1.0) / (2.0 * jf + nf - 2.0);
        coef *= x2 * (q + 2.0 * jf - 2.0) * (q + 2.0 * jf - 1.0) / ((2.0 * jf - 1.0) * (2.0 * jf));
        let term = coef * moment;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sphere_area(n - 1) * a.powf(-q) * sum
}

/// Stable primitive difference `int_a^b z^{c-1} dz`.
fn power_moment(a: f64, b: f64, c: f64) -> f64 {
    let l = (b / a).ln();
    if c == 0.0 {
        return l;
    }
    a.powf(c) * (c * l).exp_m1() / c
}

/// Closed form for odd N >= 3: with `z = A - B cos(phi)` the weight
/// `sin^{N-2}` becomes `((z - a)(b - z))^{(N-3)/2} / B^{N-3}` times
/// `dz / B`, a polynomial against pure power moments of z.
fn angular_kernel_odd(n: u32, q: f64, a: f64, b: f64) -> f64 {
    let b_coef = 0.5 * (b - a);
    let m = ((n - 3) / 2) as usize;
    // Coefficients of ((z - a)(b - z))^m in z: repeated convolution with
    // the base quadratic -z^2 + (a+b) z - ab.
    let base = [-a * b, a + b, -1.0];
    let mut poly = vec![1.0];
    for _ in 0..m {
        let mut next = vec![0.0; poly.len() + 2];
        for (i, &p) in poly.iter().enumerate() {
            for (k, &c) in base.iter().enumerate() {
                next[i + k] += p * c;
            }
        }
        poly = next;
    }
    let mut sum = 0.0;
    for (j, &c) in poly.iter().enumerate() {
        sum += c * power_moment(a, b, j as f64 - q + 1.0);
    }
    sphere_area(n - 1) * sum / b_coef.powi(2 * m as i32 + 1)
}

/// Direct angle quadrature for even N; the adaptive rule resolves the
/// near-endpoint peak at phi = 0 when A - B is small.
fn angular_kernel_numeric(n: u32, q: f64, gap: f64, b_coef: f64) -> f64 {
    let w = (n - 2) as i32;
    // A - B cos(phi) = gap + 2B sin^2(phi/2), stable near phi = 0.
    let f = move |phi: f64| {
        let h = (0.5 * phi).sin();
        phi.sin().powi(w) * (gap + 2.0 * b_coef * h * h).powf(-q)
    };
    let spec = QuadratureSpec {
        abs_tol: 0.0,
        rel_tol: 1e-13,
        max_subdivisions: 6000,
        endpoint_exponents: (0.0, 0.0),
    };
    sphere_area(n - 1) * integrate_adaptive(&f, 0.0, std::f64::consts::PI, &spec).value
}

/// The s-harmonic extension of `profile` evaluated at one point, using a
/// precomputed Poisson normalizer.
fn extend_with_normalizer(
    profile: &RadialProfile,
    fp: FracParams,
    normalizer: f64,
    pt: HalfSpacePoint,
) -> Result<f64> {
    Ok(extend_full(profile, fp, normalizer, pt)?.0)
}

fn extend_full(
    profile: &RadialProfile,
    fp: FracParams,
    normalizer: f64,
    pt: HalfSpacePoint,
) -> Result<(f64, f64)> {
    let scale = pt.radius();
    // At (numerical) height zero the extension reduces to the trace; the
    // Poisson peak of width t would be unresolvable anyway.
    if pt.t <= 1e-9 * scale {
        let trace = profile.value(pt.r);
        let err = trace.abs() * (pt.t / scale).powf((2.0 * fp.s).min(1.0));
        return Ok((trace, err));
    }
    let (r, t) = (pt.r, pt.t);
    let nu = fp.n as f64 + 2.0 * fp.s;
    let kernel = |rho: f64| -> f64 {
        let d = r - rho;
        rho.powi(fp.n as i32 - 1)
            * profile.value(rho)
            * angular_kernel_gap(fp.n, nu, d * d + t * t, 2.0 * r * rho).unwrap_or(f64::NAN)
    };

    let head = profile.head_exponent();
    let spec = QuadratureSpec::with_tols(1e-13, 1e-10);
    let inner = integrate_power_weight(
        &kernel,
        0.0,
        0.5 * scale,
        &spec.with_exponents(fp.n as f64 - 1.0 - head, 0.0),
    );
    let mut mid = integrate_adaptive(&kernel, 0.5 * scale, 2.0 * scale, &spec);
    if r > 0.5 * scale && r < 2.0 * scale {
        // Split at the kernel peak so the adaptive rule locks onto it.
        mid = integrate_adaptive(&kernel, 0.5 * scale, r, &spec)
            .combine(integrate_adaptive(&kernel, r, 2.0 * scale, &spec));
    }
    let outer = match profile.cutoff() {
        Some(cut) if cut <= 2.0 * scale => crate::quadrature::QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            subdivisions_used: 0,
            converged: true,
        },
        Some(cut) => integrate_adaptive(&kernel, 2.0 * scale, cut, &spec),
        None => {
            let te = profile
                .tail_exponent()
                .expect("non-truncated profile has a tail exponent");
            integrate_tail(&kernel, 2.0 * scale, 1.0 + 2.0 * fp.s + te, &spec)
        }
    };

    let total = inner.combine(mid).combine(outer);
    if !total.value.is_finite() {
        return Err(Error::DivergentIntegral(
            "extension integral did not evaluate to a finite value".into(),
        ));
    }
    let scale = normalizer * t.powf(2.0 * fp.s);
    Ok((scale * total.value, scale * total.error_estimate))
}

/// Gradient (d/dr, d/dt) of the extension, by differentiating under the
/// Poisson integral. With `A = r^2 + rho^2 + t^2`, `B = 2 r rho` and
/// `J(nu) = angular_kernel(nu)`:
///
/// `dJ/dA = -(nu/2) J(nu+2)`, `dJ/dB = (nu/2)(A J(nu+2) - J(nu))/B`,
///
/// so each partial costs a single radial quadrature instead of the four
/// extension evaluations of a central difference.
fn extend_gradient(
    profile: &RadialProfile,
    fp: FracParams,
    normalizer: f64,
    pt: HalfSpacePoint,
) -> Result<(f64, f64)> {
    extend_gradient_impl(profile, fp, normalizer, pt, true)
}

fn extend_gradient_impl(
    profile: &RadialProfile,
    fp: FracParams,
    normalizer: f64,
    pt: HalfSpacePoint,
    want_radial: bool,
) -> Result<(f64, f64)> {
    let (r, t) = (pt.r, pt.t);
    let scale = pt.radius();
    if t <= 1e-9 * scale {
        return Err(Error::Domain(
            "extension gradient is not available on the boundary t = 0".into(),
        ));
    }
    let nf = fp.n as f64;
    let nu = nf + 2.0 * fp.s;
    let q = 0.5 * nu;

    // d/dr integrand. The leading A^{-q} orders of (A - 2r^2) J(nu+2) and
    // J(nu) cancel at large rho, so the true tail decays two powers faster
    // than declared; declaring the slower rate is safe for the transform.
    let g_r = |rho: f64| -> f64 {
        let d = r - rho;
        let gap = d * d + t * t;
        let b = 2.0 * r * rho;
        let j0 = angular_kernel_gap(fp.n, nu, gap, b).unwrap_or(f64::NAN);
        let j2 = angular_kernel_gap(fp.n, nu + 2.0, gap, b).unwrap_or(f64::NAN);
        rho.powi(fp.n as i32 - 1)
            * profile.value(rho)
            * ((rho * rho + t * t - r * r) * j2 - j0)
    };
    let g_t = |rho: f64| -> f64 {
        let d = r - rho;
        let gap = d * d + t * t;
        rho.powi(fp.n as i32 - 1)
            * profile.value(rho)
            * angular_kernel_gap(fp.n, nu + 2.0, gap, 2.0 * r * rho).unwrap_or(f64::NAN)
    };

    let quad = |g: &dyn Fn(f64) -> f64, tail_shift: f64| -> Result<f64> {
        let head = profile.head_exponent();
        let spec = QuadratureSpec::with_tols(1e-12, 3e-9);
        let inner = integrate_power_weight(
            g,
            0.0,
            0.5 * scale,
            &spec.with_exponents(nf - 1.0 - head, 0.0),
        );
        let mut mid = integrate_adaptive(g, 0.5 * scale, 2.0 * scale, &spec);
        if r > 0.5 * scale && r < 2.0 * scale {
            mid = integrate_adaptive(g, 0.5 * scale, r, &spec)
                .combine(integrate_adaptive(g, r, 2.0 * scale, &spec));
        }
        let outer = match profile.cutoff() {
            Some(cut) if cut <= 2.0 * scale => 0.0,
            Some(cut) => integrate_adaptive(g, 2.0 * scale, cut, &spec).value,
            None => {
                let te = profile
                    .tail_exponent()
                    .expect("non-truncated profile has a tail exponent");
                integrate_tail(g, 2.0 * scale, 1.0 + 2.0 * fp.s + te + tail_shift, &spec).value
            }
        };
        let total = inner.value + mid.value + outer;
        if !total.is_finite() {
            return Err(Error::DivergentIntegral(
                "extension gradient integral did not evaluate to a finite value".into(),
            ));
        }
        Ok(total)
    };

    let weight = normalizer * t.powf(2.0 * fp.s);
    let i_t = quad(&g_t, 2.0)?;
    let value = extend_full(profile, fp, normalizer, pt)?.0;
    let u_t = 2.0 * fp.s * value / t - 2.0 * t * weight * q * i_t;
    if !want_radial {
        return Ok((f64::NAN, u_t));
    }
    let u_r = if r == 0.0 {
        0.0
    } else {
        weight * q / r * quad(&g_r, 0.0)?
    };
    Ok((u_r, u_t))
}

/// `lim_{t->0} t^{1-2s} dU/dt` for the extension of `profile`, extracted by
/// Richardson extrapolation in the height. The boundary expansion
/// `t^{1-2s} U_t = g0 + c t^{2-2s} + d t^2 + ...` fixes the two exponents
/// eliminated.
pub fn conormal_trace(profile: &RadialProfile, fp: FracParams, r: f64) -> Result<f64> {
    let normalizer = poisson_normalizer(fp)?;
    let h = 0.02 * (1.0 + r);
    let g_at = |t: f64| -> Result<f64> {
        let pt = HalfSpacePoint::new(r, t)?;
        let (_, ut) = extend_gradient_impl(profile, fp, normalizer, pt, false)?;
        Ok(t.powf(1.0 - 2.0 * fp.s) * ut)
    };
    let (g1, g2, g4) = (g_at(h)?, g_at(0.5 * h)?, g_at(0.25 * h)?);
    let e1 = 2.0 - 2.0 * fp.s;
    let w1 = 2.0_f64.powf(e1);
    let a1 = (w1 * g2 - g1) / (w1 - 1.0);
    let a2 = (w1 * g4 - g2) / (w1 - 1.0);
    Ok((4.0 * a2 - a1) / 3.0)
}

/// The s-harmonic extension of a radial profile to the upper half space.
pub fn extend(profile: &RadialProfile, fp: FracParams, pt: HalfSpacePoint) -> Result<f64> {
    profile.check_class(fp)?;
    let normalizer = poisson_normalizer(fp)?;
    extend_with_normalizer(profile, fp, normalizer, pt)
}

/// As `extend`, additionally returning the propagated quadrature error
/// estimate.
pub fn extend_with_error(
    profile: &RadialProfile,
    fp: FracParams,
    pt: HalfSpacePoint,
) -> Result<(f64, f64)> {
    profile.check_class(fp)?;
    let normalizer = poisson_normalizer(fp)?;
    extend_full(profile, fp, normalizer, pt)
}

/// Extension of the pure power `|x|^{-((N-2s)/2 - alpha)}`, the model
/// field whose trace is the alpha-eigenfunction of the spectral constant.
pub fn model_v_alpha(fp: FracParams, alpha: f64, pt: HalfSpacePoint) -> Result<f64> {
    let m = fp.alpha_sup() - alpha;
    if !(m < fp.n as f64 && m > -2.0 * fp.s) {
        return Err(Error::Domain(format!(
            "alpha = {alpha} gives a power outside the admissible class"
        )));
    }
    extend(&RadialProfile::power_law(m, 1.0), fp, pt)
}

/// Relative defect of the homogeneity law `V(k X) = k^{-m} V(X)` for the
/// model field; zero up to quadrature error.
pub fn homogeneity_residual(fp: FracParams, alpha: f64, pt: HalfSpacePoint, k: f64) -> Result<f64> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidParameter(format!("scale k must be positive, got {k}")));
    }
    let m = fp.alpha_sup() - alpha;
    let v = model_v_alpha(fp, alpha, pt)?;
    let scaled = HalfSpacePoint::new(k * pt.r, k * pt.t)?;
    let vk = model_v_alpha(fp, alpha, scaled)?;
    let lhs = vk;
    let rhs = k.powf(-m) * v;
    Ok((lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1e-300))
}

/// Spherical mean of `u(|x + rho w|)` over w in S^{N-1}, times the full
/// sphere measure, at |x| = r.
fn sphere_mean(profile: &RadialProfile, n: u32, r: f64, rho: f64) -> Result<f64> {
    if let RadialProfile::PowerLaw { exponent, amplitude } = profile {
        let gap = (r - rho) * (r - rho);
        return Ok(amplitude * angular_kernel_gap(n, *exponent, gap, 2.0 * r * rho)?);
    }
    if n == 1 {
        return Ok(profile.value((r - rho).abs()) + profile.value(r + rho));
    }
    let w = (n - 2) as i32;
    let gap = (r - rho) * (r - rho);
    let b = 2.0 * r * rho;
    let f = move |phi: f64| {
        let h = (0.5 * phi).sin();
        phi.sin().powi(w) * profile.value((gap + 2.0 * b * h * h).sqrt())
    };
    let spec = QuadratureSpec::with_tols(1e-14, 1e-12);
    Ok(sphere_area(n - 1) * integrate_adaptive(&f, 0.0, std::f64::consts::PI, &spec).value)
}

/// `(-Delta)^s u` at radius `r > 0` for a radial profile, by the
/// symmetrized second-difference form
/// `(C/2) int_0^infty rho^{-1-2s} T(rho) drho` with
/// `T(rho) = 2 (u(r) |S^{N-1}| - mean)`.
///
/// The window `[0, 1e-3 r]` is completed analytically from a three-term
/// even Taylor fit of T, which keeps full accuracy as s -> 1 where the
/// integral concentrates at vanishing rho.
pub fn frac_laplacian_pv(profile: &RadialProfile, fp: FracParams, r: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "fractional Laplacian evaluation needs r > 0, got {r}"
        )));
    }
    profile.check_class(fp)?;
    let omega = sphere_area(fp.n);
    let ur = profile.value(r);
    let s = fp.s;
    let t_diff = |rho: f64| -> Result<f64> {
        Ok(2.0 * (ur * omega - sphere_mean(profile, fp.n, r, rho)?))
    };

    // Analytic completion of [0, h]: T = c2 rho^2 + c4 rho^4 + c6 rho^6
    // fitted at h, 2h, 4h.
    let h = 1e-3 * r;
    let (t1, t2, t4) = (t_diff(h)?, t_diff(2.0 * h)?, t_diff(4.0 * h)?);
    // Solve a k^2 + b k^4 + c k^6 = T(kh) for k = 1, 2, 4, where
    // a = c2 h^2 etc.
    let rows = [
        [1.0, 1.0, 1.0, t1],
        [4.0, 16.0, 64.0, t2],
        [16.0, 256.0, 4096.0, t4],
    ];
    let coeffs = solve3(rows).ok_or_else(|| {
        Error::Convergence("singular fit in the small-shell completion".into())
    })?;
    let head = h.powf(-2.0 * s)
        * (coeffs[0] / (2.0 - 2.0 * s) + coeffs[1] / (4.0 - 2.0 * s) + coeffs[2] / (6.0 - 2.0 * s));

    let g = |rho: f64| rho.powf(-1.0 - 2.0 * s) * t_diff(rho).unwrap_or(f64::NAN);
    let spec = QuadratureSpec::with_tols(1e-13, 1e-11);
    // The sphere mean has a |rho - r|^{N-1-e} kink where the sphere
    // crosses the origin; declare it when it is singular or nearly so.
    let e_head = profile.head_exponent();
    let kink = (fp.n as f64 - 1.0 - e_head).min(1.0).max(-0.999);
    let bulk = integrate_power_weight(&g, h, r, &spec.with_exponents(0.0, kink)).combine(
        integrate_power_weight(&g, r, 2.0 * r, &spec.with_exponents(kink, 0.0)),
    );
    // Past 2r the difference tends to the constant 2 u(r) |S^{N-1}|.
    let tail = integrate_tail(&g, 2.0 * r, 1.0 + 2.0 * s, &spec);

    let total = head + bulk.value + tail.value;
    if !total.is_finite() {
        return Err(Error::DivergentIntegral(
            "principal-value integral did not evaluate to a finite value".into(),
        ));
    }
    Ok(0.5 * frac_laplacian_constant(fp) * total)
}

fn solve3(mut m: [[f64; 4]; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        m.swap(col, piv);
        if m[col][col] == 0.0 {
            return None;
        }
        for row in 0..3 {
            if row != col {
                let f = m[row][col] / m[col][col];
                for k in col..4 {
                    m[row][k] -= f * m[col][k];
                }
            }
        }
    }
    Some([m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]])
}

/// Number of Chebyshev-Lobatto angle nodes used for the model field's
/// angular factor.
const PSI_NODES: usize = 48;

/// A field on the upper half space: the extension of a profile, the
/// homogeneous singular-solution model, or zero.
#[derive(Debug, Clone)]
pub enum ExtensionField {
    Zero {
        params: FracParams,
    },
    PoissonOf {
        params: FracParams,
        profile: RadialProfile,
        normalizer: f64,
    },
    /// `U(X) = amplitude |X|^{-exponent} psi(theta)` with psi the angular
    /// factor of the extended power `|x|^{-exponent}`.
    HomogeneousModel {
        params: FracParams,
        alpha: f64,
        amplitude: f64,
        exponent: f64,
        psi: ChebyshevInterpolant,
    },
}

impl ExtensionField {
    pub fn zero(fp: FracParams) -> Self {
        ExtensionField::Zero { params: fp }
    }

    pub fn poisson_of(fp: FracParams, profile: RadialProfile) -> Result<Self> {
        profile.check_class(fp)?;
        let normalizer = poisson_normalizer(fp)?;
        Ok(ExtensionField::PoissonOf { params: fp, profile, normalizer })
    }

    /// Homogeneous model with a general shift and amplitude; the angular
    /// factor is sampled once on the unit quarter circle.
    pub fn homogeneous(fp: FracParams, alpha: f64, amplitude: f64) -> Result<Self> {
        let m = fp.alpha_sup() - alpha;
        if !(m < fp.n as f64 && m > -2.0 * fp.s) {
            return Err(Error::Domain(format!(
                "alpha = {alpha} gives a power outside the admissible class"
            )));
        }
        let profile = RadialProfile::power_law(m, 1.0);
        let normalizer = poisson_normalizer(fp)?;
        let nodes = ChebyshevInterpolant::lobatto_nodes(0.0, std::f64::consts::FRAC_PI_2, PSI_NODES);
        let mut samples = Vec::with_capacity(nodes.len());
        for &theta in &nodes {
            let pt = HalfSpacePoint::new(theta.sin(), theta.cos())?;
            samples.push(extend_with_normalizer(&profile, fp, normalizer, pt)?);
        }
        let psi = ChebyshevInterpolant::from_samples(0.0, std::f64::consts::FRAC_PI_2, &samples);
        Ok(ExtensionField::HomogeneousModel {
            params: fp,
            alpha,
            amplitude,
            exponent: m,
            psi,
        })
    }

    /// The model field of the explicit singular solution for a
    /// supercritical tuple.
    pub fn singular_solution(pp: ProblemParams) -> Result<Self> {
        let amplitude = singular_amplitude(pp)?;
        ExtensionField::homogeneous(pp.frac(), pp.alpha_tilde(), amplitude)
    }

    pub fn params(&self) -> FracParams {
        match self {
            ExtensionField::Zero { params }
            | ExtensionField::PoissonOf { params, .. }
            | ExtensionField::HomogeneousModel { params, .. } => *params,
        }
    }

    pub fn value(&self, pt: HalfSpacePoint) -> Result<f64> {
        match self {
            ExtensionField::Zero { .. } => Ok(0.0),
            ExtensionField::PoissonOf { params, profile, normalizer } => {
                extend_with_normalizer(profile, *params, *normalizer, pt)
            }
            ExtensionField::HomogeneousModel { amplitude, exponent, psi, .. } => {
                let rr = pt.radius();
                if rr == 0.0 {
                    return Err(Error::Domain(
                        "the homogeneous model is singular at the origin".into(),
                    ));
                }
                Ok(amplitude * rr.powf(-exponent) * psi.eval(pt.theta()))
            }
        }
    }

    /// Boundary trace at height t = 0.
    pub fn trace(&self, r: f64) -> Result<f64> {
        match self {
            ExtensionField::Zero { .. } => Ok(0.0),
            ExtensionField::PoissonOf { profile, .. } => Ok(profile.value(r)),
            ExtensionField::HomogeneousModel { amplitude, exponent, psi, .. } => {
                Ok(amplitude * r.powf(-exponent) * psi.eval(std::f64::consts::FRAC_PI_2))
            }
        }
    }

    /// Gradient (d/dr, d/dt): analytic for the homogeneous model,
    /// Richardson-extrapolated central differences for extensions.
    pub fn gradient(&self, pt: HalfSpacePoint) -> Result<(f64, f64)> {
        match self {
            ExtensionField::Zero { .. } => Ok((0.0, 0.0)),
            ExtensionField::HomogeneousModel { amplitude, exponent, psi, .. } => {
                let rr = pt.radius();
                if rr == 0.0 {
                    return Err(Error::Domain(
                        "the homogeneous model is singular at the origin".into(),
                    ));
                }
                let theta = pt.theta();
                let val_theta = psi.eval(theta);
                let der_theta = psi.deriv(theta);
                let u_rr = -exponent * amplitude * rr.powf(-exponent - 1.0) * val_theta;
                let u_th = amplitude * rr.powf(-exponent) * der_theta;
                let ur = u_rr * pt.r / rr + u_th * pt.t / (rr * rr);
                let ut = u_rr * pt.t / rr - u_th * pt.r / (rr * rr);
                Ok((ur, ut))
            }
            ExtensionField::PoissonOf { params, profile, normalizer } => {
                extend_gradient(profile, *params, *normalizer, pt)
            }
        }
    }

    #[cfg(test)]
    fn central_richardson(&self, pt: HalfSpacePoint, h: f64, radial: bool) -> Result<f64> {
        let eval = |delta: f64| -> Result<f64> {
            let p = if radial {
                HalfSpacePoint { r: (pt.r + delta).max(0.0), t: pt.t }
            } else {
                HalfSpacePoint { r: pt.r, t: (pt.t + delta).max(0.0) }
            };
            self.value(p)
        };
        let d = |hh: f64| -> Result<f64> { Ok((eval(hh)? - eval(-hh)?) / (2.0 * hh)) };
        let coarse = d(h)?;
        let fine = d(0.5 * h)?;
        Ok((4.0 * fine - coarse) / 3.0)
    }
}

/// Load a sampled radial profile from a text file:
/// first line `N=<int> tail=<float>`, then one `<radius> <value>` pair per
/// line; `#` comments and blank lines are skipped.
pub fn load_profile(path: &Path) -> Result<(u32, RadialProfile)> {
    let text = fs::read_to_string(path).map_err(|e| Error::ProfileFormat {
        line: 0,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_profile(&text)
}

pub fn parse_profile(text: &str) -> Result<(u32, RadialProfile)> {
    let mut n: Option<u32> = None;
    let mut tail: Option<f64> = None;
    let mut grid = Vec::new();
    let mut values = Vec::new();
    let mut header_seen = false;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !header_seen {
            for field in line.split_whitespace() {
                if let Some(v) = field.strip_prefix("N=") {
                    n = Some(v.parse().map_err(|_| Error::ProfileFormat {
                        line: lineno,
                        message: format!("invalid dimension '{v}'"),
                    })?);
                } else if let Some(v) = field.strip_prefix("tail=") {
                    tail = Some(v.parse().map_err(|_| Error::ProfileFormat {
                        line: lineno,
                        message: format!("invalid tail exponent '{v}'"),
                    })?);
                } else {
                    return Err(Error::ProfileFormat {
                        line: lineno,
                        message: format!("unexpected header field '{field}'"),
                    });
                }
            }
            if n.is_none() || tail.is_none() {
                return Err(Error::ProfileFormat {
                    line: lineno,
                    message: "header must declare both N= and tail=".into(),
                });
            }
            header_seen = true;
            continue;
        }
        let mut parts = line.split_whitespace();
        let (r_str, v_str) = match (parts.next(), parts.next(), parts.next()) {
            (Some(r), Some(v), None) => (r, v),
            _ => {
                return Err(Error::ProfileFormat {
                    line: lineno,
                    message: "expected '<radius> <value>'".into(),
                })
            }
        };
        let r: f64 = r_str.parse().map_err(|_| Error::ProfileFormat {
            line: lineno,
            message: format!("invalid radius '{r_str}'"),
        })?;
        let v: f64 = v_str.parse().map_err(|_| Error::ProfileFormat {
            line: lineno,
            message: format!("invalid value '{v_str}'"),
        })?;
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::ProfileFormat {
                line: lineno,
                message: format!("radius must be positive and finite, got {r}"),
            });
        }
        if let Some(&prev) = grid.last() {
            if r <= prev {
                return Err(Error::ProfileFormat {
                    line: lineno,
                    message: format!("radii must be strictly increasing ({prev} then {r})"),
                });
            }
        }
        grid.push(r);
        values.push(v);
    }
    if !header_seen {
        return Err(Error::ProfileFormat {
            line: 0,
            message: "empty profile file".into(),
        });
    }
    let profile = RadialProfile::sampled(grid, values, tail.unwrap()).map_err(|e| {
        Error::ProfileFormat {
            line: 0,
            message: e.to_string(),
        }
    })?;
    Ok((n.unwrap(), profile))
}

/// Beta-function value used by kernel-reduction tests.
#[cfg(test)]
fn sin_power_moment(w: u32, k: u32) -> f64 {
    use crate::special::log_gamma;
    // int_0^pi sin^w cos^{2k} = B(k + 1/2, (w+1)/2)
    let a = k as f64 + 0.5;
    let b = 0.5 * (w as f64 + 1.0);
    (log_gamma(a).unwrap() + log_gamma(b).unwrap() - log_gamma(a + b).unwrap()).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::lambda_alpha;
    use approx::assert_relative_eq;

    #[test]
    fn angular_kernel_nu_zero_recovers_area() {
        for n in [1_u32, 2, 3, 4, 5, 7, 8, 11] {
            for &(a, b) in &[(2.0, 0.0), (2.0, 0.7), (2.0, 1.9)] {
                let j = angular_kernel(n, 0.0, a, b).unwrap();
                assert_relative_eq!(j, sphere_area(n), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn angular_kernel_branches_agree() {
        // Series (B/A just below 1/2) vs closed form / numeric just above.
        for n in [3_u32, 5, 7, 9, 2, 4, 6] {
            for nu in [1.3, 3.0, 6.5] {
                let lo = angular_kernel(n, nu, 1.0, 0.4999).unwrap();
                let hi = angular_kernel(n, nu, 1.0, 0.5001).unwrap();
                assert_relative_eq!(lo, hi, max_relative = 2e-3);
                // direct numeric oracle
                let w = (n - 2) as i32;
                let f = move |phi: f64| phi.sin().powi(w) * (1.0 - 0.6 * phi.cos()).powf(-0.5 * nu);
                let spec = QuadratureSpec::with_tols(1e-14, 1e-13);
                let oracle = sphere_area(n - 1)
                    * integrate_adaptive(&f, 0.0, std::f64::consts::PI, &spec).value;
                let j = angular_kernel(n, nu, 1.0, 0.6).unwrap();
                assert_relative_eq!(j, oracle, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn angular_kernel_near_singular_odd() {
        // A - B tiny: dominated by the expm1-stabilized moments.
        let j = angular_kernel_gap(3, 4.0, 1e-10, 1.0).unwrap();
        // N = 3 closed form: (1/B) int_a^b z^{-2} dz = (1/a - 1/b)/B, times 2 pi.
        let (a, b) = (1e-10, 2.0 + 1e-10);
        let oracle = 2.0 * std::f64::consts::PI * (1.0 / a - 1.0 / b) / 1.0;
        assert_relative_eq!(j, oracle, max_relative = 1e-9);
    }

    #[test]
    fn sin_moment_consistency() {
        // spot-check the series moments against the Beta closed form
        let m0 = sphere_area(4) / sphere_area(3);
        assert_relative_eq!(m0, sin_power_moment(2, 0), max_relative = 1e-13);
        let mut m = m0;
        for j in 1..5 {
            m *= (2.0 * j as f64 - 1.0) / (2.0 * j as f64 + 2.0);
            assert_relative_eq!(m, sin_power_moment(2, j), max_relative = 1e-12);
        }
    }

    #[test]
    fn extension_of_constantish_profile_near_kernel_mass() {
        // Slowly varying profile: extension at small t is close to the trace.
        let fp = FracParams::new(3, 0.5).unwrap();
        let profile = RadialProfile::power_law(0.1, 1.0);
        let v = extend(&profile, fp, HalfSpacePoint::new(1.0, 1e-4).unwrap()).unwrap();
        assert_relative_eq!(v, 1.0, max_relative = 1e-3);
    }

    #[test]
    fn extension_trace_is_profile() {
        let fp = FracParams::new(4, 0.7).unwrap();
        let profile = RadialProfile::power_law(1.2, 2.5);
        let v = extend(&profile, fp, HalfSpacePoint::new(0.7, 0.0).unwrap()).unwrap();
        assert_relative_eq!(v, 2.5 * 0.7_f64.powf(-1.2), max_relative = 1e-14);
    }

    #[test]
    fn model_field_homogeneity() {
        let fp = FracParams::new(3, 0.5).unwrap();
        let alpha = 0.4;
        let pt = HalfSpacePoint::new(0.8, 0.6).unwrap();
        for k in [0.5, 2.0, 3.7] {
            let res = homogeneity_residual(fp, alpha, pt, k).unwrap();
            assert!(res < 1e-8, "residual {res} at k = {k}");
        }
    }

    #[test]
    fn eigen_identity_power_law() {
        // (-Delta)^s r^{-m} = lambda(alpha) r^{-2s} r^{-m}, m = (N-2s)/2 - alpha
        let cases = [
            (5_u32, 0.5, 1.5, 5.0 / 6.0),
            (3, 0.5, 0.3, lambda_alpha(FracParams::new(3, 0.5).unwrap(), 0.3).unwrap()),
        ];
        for &(n, s, alpha, lam) in &cases {
            let fp = FracParams::new(n, s).unwrap();
            let m = fp.alpha_sup() - alpha;
            let profile = RadialProfile::power_law(m, 1.0);
            for r in [0.5, 1.0, 2.0] {
                let pv = frac_laplacian_pv(&profile, fp, r).unwrap();
                let expected = lam * r.powf(-2.0 * s - m);
                assert_relative_eq!(pv, expected, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn eigen_identity_near_s_one() {
        let fp = FracParams::new(11, 0.999).unwrap();
        let alpha = 2.0;
        let lam = 16.205701732098277805; // Gamma-product value of lambda(2)
        assert_relative_eq!(lambda_alpha(fp, alpha).unwrap(), lam, max_relative = 1e-12);
        let m = fp.alpha_sup() - alpha;
        let profile = RadialProfile::power_law(m, 1.0);
        let pv = frac_laplacian_pv(&profile, fp, 1.0).unwrap();
        assert_relative_eq!(pv, lam, max_relative = 1e-5);
    }

    #[test]
    fn homogeneous_model_matches_direct_extension() {
        let fp = FracParams::new(5, 0.5).unwrap();
        let field = ExtensionField::homogeneous(fp, 1.5, 2.0).unwrap();
        let m = fp.alpha_sup() - 1.5;
        let profile = RadialProfile::power_law(m, 2.0);
        for &(r, t) in &[(1.0, 0.5), (0.3, 1.1), (2.0, 0.01)] {
            let pt = HalfSpacePoint::new(r, t).unwrap();
            let direct = extend(&profile, fp, pt).unwrap();
            let model = field.value(pt).unwrap();
            assert_relative_eq!(model, direct, max_relative = 1e-8);
        }
    }

    #[test]
    fn homogeneous_model_gradient_matches_fd() {
        let fp = FracParams::new(5, 0.5).unwrap();
        let field = ExtensionField::homogeneous(fp, 1.5, 1.0).unwrap();
        let pt = HalfSpacePoint::new(0.9, 0.7).unwrap();
        let (gr, gt) = field.gradient(pt).unwrap();
        let h = 1e-6;
        let fr = (field.value(HalfSpacePoint::new(0.9 + h, 0.7).unwrap()).unwrap()
            - field.value(HalfSpacePoint::new(0.9 - h, 0.7).unwrap()).unwrap())
            / (2.0 * h);
        let ft = (field.value(HalfSpacePoint::new(0.9, 0.7 + h).unwrap()).unwrap()
            - field.value(HalfSpacePoint::new(0.9, 0.7 - h).unwrap()).unwrap())
            / (2.0 * h);
        assert_relative_eq!(gr, fr, max_relative = 1e-7);
        assert_relative_eq!(gt, ft, max_relative = 1e-7);
    }

    #[test]
    fn poisson_gradient_matches_fd() {
        let fp = FracParams::new(3, 0.5).unwrap();
        let profile = RadialProfile::power_law(0.7, 1.0);
        let field = ExtensionField::poisson_of(fp, profile).unwrap();
        for &(r, t) in &[(0.8, 0.6), (0.0, 1.0), (1.5, 0.2)] {
            let pt = HalfSpacePoint::new(r, t).unwrap();
            let (gr, gt) = field.gradient(pt).unwrap();
            let fr = if r == 0.0 {
                0.0
            } else {
                field.central_richardson(pt, 1e-4, true).unwrap()
            };
            let ft = field.central_richardson(pt, 1e-4, false).unwrap();
            assert_relative_eq!(gr, fr, epsilon = 1e-7, max_relative = 1e-6);
            assert_relative_eq!(gt, ft, epsilon = 1e-7, max_relative = 1e-6);
        }
    }

    #[test]
    fn sampled_bump_profile_round_trip() {
        let grid: Vec<f64> = (1..=200).map(|k| k as f64 / 200.0).collect();
        let values: Vec<f64> = grid.iter().map(|&r| (1.0 - r * r).max(0.0).powi(3)).collect();
        let profile = RadialProfile::sampled(grid, values, f64::INFINITY).unwrap();
        assert!(profile.cutoff().is_some());
        assert_relative_eq!(profile.value(0.5), 0.75_f64.powi(3), max_relative = 1e-5);
        assert_eq!(profile.value(2.0), 0.0);
        let fp = FracParams::new(3, 0.5).unwrap();
        let v = extend(&profile, fp, HalfSpacePoint::new(0.5, 0.2).unwrap()).unwrap();
        assert!(v > 0.0 && v < 1.0);
    }

    #[test]
    fn profile_parser_accepts_and_rejects() {
        let good = "N=3 tail=4.0\n0.1 1.0\n0.2 0.9\n0.4 0.5\n";
        let (n, profile) = parse_profile(good).unwrap();
        assert_eq!(n, 3);
        assert_relative_eq!(profile.value(0.2), 0.9);

        let bad_header = parse_profile("M=3\n0.1 1.0\n");
        match bad_header {
            Err(Error::ProfileFormat { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected format error, got {other:?}"),
        }
        let bad_pair = parse_profile("N=3 tail=2.0\n0.1 1.0\n0.2\n");
        match bad_pair {
            Err(Error::ProfileFormat { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected format error, got {other:?}"),
        }
        let decreasing = parse_profile("N=3 tail=2.0\n0.2 1.0\n0.1 0.5\n");
        match decreasing {
            Err(Error::ProfileFormat { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn class_checks_reject_divergent_profiles() {
        let fp = FracParams::new(3, 0.5).unwrap();
        // grows like r^{-3} at the origin: not locally integrable in R^3
        assert!(extend(
            &RadialProfile::power_law(3.0, 1.0),
            fp,
            HalfSpacePoint::new(1.0, 1.0).unwrap()
        )
        .is_err());
        // grows like r^{1.5} at infinity: beats the 2s-weight
        assert!(extend(
            &RadialProfile::power_law(-1.5, 1.0),
            fp,
            HalfSpacePoint::new(1.0, 1.0).unwrap()
        )
        .is_err());
    }
}
