//! Interpolation helpers: Chebyshev series on a bounded interval for the
//! angular trace of homogeneous extensions, and monotone (Fritsch-Carlson)
//! cubic interpolation for sampled radial profiles.

/// Chebyshev interpolant of a smooth function on `[a, b]`, built from
/// Chebyshev-Lobatto samples; supports value and derivative evaluation.
#[derive(Debug, Clone)]
pub struct ChebyshevInterpolant {
    a: f64,
    b: f64,
    coeffs: Vec<f64>,
    deriv_coeffs: Vec<f64>,
}

impl ChebyshevInterpolant {
    /// Lobatto nodes for degree `n` (n+1 points), decreasing from `b` to `a`
    /// as the index grows; `from_samples` expects values in the same order.
    pub fn lobatto_nodes(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..=n)
            .map(|j| {
                let x = (std::f64::consts::PI * j as f64 / n as f64).cos();
                0.5 * (a + b) + 0.5 * (b - a) * x
            })
            .collect()
    }

    pub fn from_samples(a: f64, b: f64, values: &[f64]) -> Self {
        let n = values.len() - 1;
        // Discrete cosine transform on Lobatto points (direct O(n^2) sum).
        let mut coeffs = vec![0.0; n + 1];
        for (k, c) in coeffs.iter_mut().enumerate() {
            let mut sum = 0.0;
            for (j, &v) in values.iter().enumerate() {
                let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                sum += w * v * (std::f64::consts::PI * (j * k) as f64 / n as f64).cos();
            }
            let norm = if k == 0 || k == n { 1.0 } else { 2.0 };
            *c = norm * sum / n as f64;
        }
        let deriv_coeffs = differentiate(&coeffs, a, b);
        ChebyshevInterpolant {
            a,
            b,
            coeffs,
            deriv_coeffs,
        }
    }

    fn clenshaw(&self, coeffs: &[f64], x: f64) -> f64 {
        let u = ((2.0 * x - self.a - self.b) / (self.b - self.a)).clamp(-1.0, 1.0);
        let (mut b1, mut b2) = (0.0_f64, 0.0_f64);
        for &c in coeffs.iter().skip(1).rev() {
            let tmp = 2.0 * u * b1 - b2 + c;
            b2 = b1;
            b1 = tmp;
        }
        u * b1 - b2 + coeffs[0]
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.clenshaw(&self.coeffs, x)
    }

    pub fn deriv(&self, x: f64) -> f64 {
        self.clenshaw(&self.deriv_coeffs, x)
    }

    /// Magnitude of the trailing coefficients, a resolution diagnostic.
    pub fn tail_magnitude(&self) -> f64 {
        let n = self.coeffs.len();
        self.coeffs[n.saturating_sub(3)..]
            .iter()
            .fold(0.0_f64, |acc, c| acc.max(c.abs()))
    }
}

fn differentiate(coeffs: &[f64], a: f64, b: f64) -> Vec<f64> {
    let n = coeffs.len();
    let mut d = vec![0.0; n];
    if n >= 2 {
        d[n - 2] = 2.0 * (n as f64 - 1.0) * coeffs[n - 1];
        for k in (0..n.saturating_sub(2)).rev() {
            d[k] = d.get(k + 2).copied().unwrap_or(0.0) + 2.0 * (k as f64 + 1.0) * coeffs[k + 1];
        }
        d[0] *= 0.5;
    }
    let scale = 2.0 / (b - a);
    d.iter().map(|c| c * scale).collect()
}

/// Fritsch-Carlson monotone cubic Hermite interpolation on a strictly
/// increasing grid; preserves monotonicity of the data between knots.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        assert!(xs.len() >= 2 && xs.len() == ys.len());
        let n = xs.len();
        let mut deltas = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            deltas.push((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]));
        }
        let mut slopes = vec![0.0; n];
        slopes[0] = deltas[0];
        slopes[n - 1] = deltas[n - 2];
        for i in 1..n - 1 {
            if deltas[i - 1] * deltas[i] <= 0.0 {
                slopes[i] = 0.0;
            } else {
                // Weighted harmonic mean keeps the interpolant monotone.
                let w1 = 2.0 * (xs[i + 1] - xs[i]) + (xs[i] - xs[i - 1]);
                let w2 = (xs[i + 1] - xs[i]) + 2.0 * (xs[i] - xs[i - 1]);
                slopes[i] = (w1 + w2) / (w1 / deltas[i - 1] + w2 / deltas[i]);
            }
        }
        // Clamp endpoint slopes that overshoot.
        for i in [0, n - 1] {
            let d = if i == 0 { deltas[0] } else { deltas[n - 2] };
            if slopes[i] * d <= 0.0 {
                slopes[i] = 0.0;
            } else if slopes[i].abs() > 3.0 * d.abs() {
                slopes[i] = 3.0 * d;
            }
        }
        MonotoneCubic { xs, ys, slopes }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().expect("non-empty grid"))
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let i = match self.xs.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => return self.ys[i.min(n - 1)],
            Err(0) => 0,
            Err(i) if i >= n => n - 2,
            Err(i) => i - 1,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let u = (x - self.xs[i]) / h;
        let (h00, h10, h01, h11) = (
            2.0 * u * u * u - 3.0 * u * u + 1.0,
            u * u * u - 2.0 * u * u + u,
            -2.0 * u * u * u + 3.0 * u * u,
            u * u * u - u * u,
        );
        h00 * self.ys[i] + h10 * h * self.slopes[i] + h01 * self.ys[i + 1] + h11 * h * self.slopes[i + 1]
    }
}
