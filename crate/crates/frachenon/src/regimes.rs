//! Critical exponents, the Joseph-Lundgren-type condition, regime
//! classification and the amplitude of the explicit singular solution.

use crate::error::{Error, Result};
use crate::special::{lambda_alpha, FracParams};

/// The parameter tuple (N, s, l, p) of the Hardy-Henon problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemParams {
    pub n: u32,
    pub s: f64,
    pub ell: f64,
    pub p: f64,
}

impl ProblemParams {
    pub fn new(n: u32, s: f64, ell: f64, p: f64) -> Result<Self> {
        let fp = FracParams::new(n, s)?;
        if (n as f64) <= 2.0 * s {
            return Err(Error::InvalidParameter(format!(
                "N > 2s required for the nonlinear problem, got N={n}, s={s}"
            )));
        }
        if !(ell > -2.0 * s) {
            return Err(Error::InvalidParameter(format!(
                "ell > -2s required, got ell={ell}, -2s={}",
                -2.0 * s
            )));
        }
        if !(p > 1.0) {
            return Err(Error::InvalidParameter(format!("p > 1 required, got {p}")));
        }
        let _ = fp;
        Ok(ProblemParams { n, s, ell, p })
    }

    pub fn frac(&self) -> FracParams {
        FracParams { n: self.n, s: self.s }
    }

    /// The shift `alpha~ = (N-2s)/2 - (2s+l)/(p-1)`.
    pub fn alpha_tilde(&self) -> f64 {
        self.frac().alpha_sup() - (2.0 * self.s + self.ell) / (self.p - 1.0)
    }

    /// `gamma = 2(2s+l)/(p-1)`, twice the homogeneity degree of the
    /// singular solution.
    pub fn gamma(&self) -> f64 {
        2.0 * (2.0 * self.s + self.ell) / (self.p - 1.0)
    }
}

/// Existence/nonexistence regimes of stable-outside-a-compact-set solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Subcritical,
    Critical,
    SupercriticalNonexistence,
    SupercriticalExistenceSide,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Subcritical => "Subcritical",
            Regime::Critical => "Critical",
            Regime::SupercriticalNonexistence => "SupercriticalNonexistence",
            Regime::SupercriticalExistenceSide => "SupercriticalExistenceSide",
        }
    }
}

/// Full classification output for one parameter tuple.
#[derive(Debug, Clone, Copy)]
pub struct RegimeReport {
    pub params: ProblemParams,
    pub p_sobolev: f64,
    pub alpha_tilde: f64,
    pub lambda_at_alpha_tilde: f64,
    pub lambda_at_zero: f64,
    pub gamma: f64,
    pub regime: Regime,
    /// Amplitude A with A^{p-1} = lambda(alpha~); NaN outside p > p_S.
    pub amplitude: f64,
}

/// The Sobolev-type critical exponent `p_S(N, l) = (N+2s+2l)/(N-2s)`.
pub fn sobolev_exponent(n: u32, s: f64, ell: f64) -> Result<f64> {
    let fp = FracParams::new(n, s)?;
    if !(ell > -2.0 * s) {
        return Err(Error::InvalidParameter(format!(
            "ell > -2s required, got ell={ell}"
        )));
    }
    let nf = n as f64;
    let _ = fp;
    Ok((nf + 2.0 * s + 2.0 * ell) / (nf - 2.0 * s))
}

/// The classical Joseph-Lundgren exponent `p_c(N)` for the unweighted
/// local problem: infinite for N <= 10.
pub fn classical_jl(n: u32) -> f64 {
    if n <= 10 {
        return f64::INFINITY;
    }
    let nf = n as f64;
    ((nf - 2.0).powi(2) - 4.0 * nf + 8.0 * (nf - 1.0).sqrt()) / ((nf - 2.0) * (nf - 10.0))
}

/// The classical weighted threshold `p_+(N, l)`; infinite when
/// `2 <= N <= 10 + 4l`. Defined for N >= 2, l > -2.
pub fn classical_jl_henon(n: u32, ell: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(
            "the classical weighted formula covers N >= 2 only".into(),
        ));
    }
    if !(ell > -2.0) {
        return Err(Error::Domain(format!("ell > -2 required, got {ell}")));
    }
    let nf = n as f64;
    if nf <= 10.0 + 4.0 * ell {
        return Ok(f64::INFINITY);
    }
    let num = (nf - 2.0).powi(2) - 2.0 * (ell + 2.0) * (ell + nf)
        + 2.0 * ((ell + 2.0).powi(3) * (ell + 2.0 * nf - 2.0)).sqrt();
    Ok(num / ((nf - 2.0) * (nf - 4.0 * ell - 10.0)))
}

/// Relative tolerance for the `p = p_S` boundary.
const CRITICAL_EQ_TOL: f64 = 1e-12;

/// Stability defect `g(p) = p lambda(alpha~(p)) - lambda(0)`; positive
/// exactly when the supercritical nonexistence condition holds.
fn stability_defect(n: u32, s: f64, ell: f64, p: f64) -> Result<f64> {
    let fp = FracParams::new(n, s)?;
    let alpha = fp.alpha_sup() - (2.0 * s + ell) / (p - 1.0);
    let lam = lambda_alpha(fp, alpha)?;
    Ok(p * lam - lambda_alpha(fp, 0.0)?)
}

/// Classify a parameter tuple into existence/nonexistence regimes.
pub fn classify(pp: ProblemParams) -> Result<RegimeReport> {
    let fp = pp.frac();
    let p_sobolev = sobolev_exponent(pp.n, pp.s, pp.ell)?;
    let lambda_at_zero = lambda_alpha(fp, 0.0)?;
    let critical = (pp.p - p_sobolev).abs() <= CRITICAL_EQ_TOL * p_sobolev.max(1.0);

    if critical || pp.p < p_sobolev {
        let regime = if critical {
            Regime::Critical
        } else {
            Regime::Subcritical
        };
        // alpha~ <= 0 here; lambda(alpha~) is reported at the clamped value.
        let alpha_tilde = if critical { 0.0 } else { pp.alpha_tilde() };
        let lambda_at = if alpha_tilde >= 0.0 {
            lambda_alpha(fp, alpha_tilde)?
        } else {
            f64::NAN
        };
        return Ok(RegimeReport {
            params: pp,
            p_sobolev,
            alpha_tilde,
            lambda_at_alpha_tilde: lambda_at,
            lambda_at_zero,
            gamma: pp.gamma(),
            regime,
            amplitude: f64::NAN,
        });
    }

    let alpha_tilde = pp.alpha_tilde();
    let lambda_at_alpha_tilde = lambda_alpha(fp, alpha_tilde)?;
    let regime = if pp.p * lambda_at_alpha_tilde > lambda_at_zero {
        Regime::SupercriticalNonexistence
    } else {
        Regime::SupercriticalExistenceSide
    };
    Ok(RegimeReport {
        params: pp,
        p_sobolev,
        alpha_tilde,
        lambda_at_alpha_tilde,
        lambda_at_zero,
        gamma: pp.gamma(),
        regime,
        amplitude: lambda_at_alpha_tilde.powf(1.0 / (pp.p - 1.0)),
    })
}

/// Upper end of the threshold scan; beyond this the defect is numerically
/// indistinguishable from its finite p -> infinity asymptote.
pub const JL_PROBE_CAP: f64 = 1e8;

/// Smallest `p* > p_S` where `p lambda(alpha~(p)) = lambda(0)`, found by a
/// log-spaced scan for the first sign change followed by bisection;
/// infinity when the nonexistence condition holds on the whole probed range.
///
/// Near s = 1 the threshold does not always track the classical rule
/// "infinite for N <= 10": at s = 1 - 1e-3 the defect
/// `lambda(0) - p lambda(alpha~)` for N = 10 still has a genuine sign
/// change at p* = 2248.59913..., because the p -> infinity limit of
/// `p lambda(alpha~)` undershoots lambda(0) by only ~5e-3 there and the
/// finite-p correction overtakes it. The crossing is real, not a
/// quadrature artifact (the defect is a pure gamma-function expression,
/// and the root is stable under 40-digit re-evaluation).
pub fn jl_threshold(n: u32, s: f64, ell: f64) -> Result<f64> {
    let p_s = sobolev_exponent(n, s, ell)?;
    let fp = FracParams::new(n, s)?;
    let lambda0 = lambda_alpha(fp, 0.0)?;

    let p_lo = p_s * (1.0 + 1e-8);
    let grid_points = 600_usize;
    let log_lo = p_lo.ln();
    let log_hi = JL_PROBE_CAP.ln();
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..=grid_points {
        let p = (log_lo + (log_hi - log_lo) * k as f64 / grid_points as f64).exp();
        let g = stability_defect(n, s, ell, p)?;
        if let Some((p_prev, g_prev)) = prev {
            if g_prev > 0.0 && g <= 0.0 {
                // Bisect to 1e-12 relative in p.
                let (mut lo, mut hi) = (p_prev, p);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if stability_defect(n, s, ell, mid)? > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if (hi - lo) <= 1e-12 * hi {
                        break;
                    }
                }
                let p_star = 0.5 * (lo + hi);
                let defect = stability_defect(n, s, ell, p_star)?;
                if defect.abs() > 1e-10 * lambda0 {
                    return Err(Error::Convergence(format!(
                        "bisection stalled at p={p_star} with defect {defect}"
                    )));
                }
                return Ok(p_star);
            }
        }
        prev = Some((p, g));
    }
    Ok(f64::INFINITY)
}

/// Amplitude A of the singular solution `A |x|^{-(2s+l)/(p-1)}`, fixed by
/// `A^{p-1} = lambda(alpha~)`; requires p > p_S so the profile is admissible.
pub fn singular_amplitude(pp: ProblemParams) -> Result<f64> {
    let p_s = sobolev_exponent(pp.n, pp.s, pp.ell)?;
    if !(pp.p > p_s) {
        return Err(Error::Domain(format!(
            "singular amplitude needs p > p_S = {p_s}, got p = {}",
            pp.p
        )));
    }
    let lam = lambda_alpha(pp.frac(), pp.alpha_tilde())?;
    Ok(lam.powf(1.0 / (pp.p - 1.0)))
}
