//! Fixed-order Gauss–Legendre quadrature.
//!
//! The equilibrium-measure integrals in [`crate::asymptotics`] are reduced, by
//! a trigonometric change of variables, to integrals of smooth functions over
//! a bounded interval; a single fixed-order Gauss–Legendre rule then converges
//! spectrally fast and comfortably exceeds the 1e-10 accuracy the public API
//! promises. Nodes and weights are computed on first use by Newton iteration
//! on the Legendre polynomial recurrence.

/// A Gauss–Legendre rule of fixed order on [-1, 1].
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Build the `n`-point rule. Accurate to machine precision for the orders
    /// used in this crate (n <= a few hundred).
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "Gauss-Legendre order must be at least 2");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess for the i-th root (descending order).
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                // Evaluate P_n(x) and P_n'(x) by upward recurrence.
                let mut p0 = 1.0;
                let mut p1 = x;
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Integrate `f` over [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut sum = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(mid + half * x);
        }
        half * sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exact_on_low_degree_polynomials() {
        let gl = GaussLegendre::new(8);
        // integral_0^1 x^2 dx = 1/3, degree far below exactness bound 15.
        assert_abs_diff_eq!(gl.integrate(0.0, 1.0, |x| x * x), 1.0 / 3.0, epsilon = 1e-14);
        // integral_{-2}^{3} (x^5 - x) dx computed analytically.
        let exact = (3.0f64.powi(6) - (-2.0f64).powi(6)) / 6.0 - (9.0 - 4.0) / 2.0;
        assert_abs_diff_eq!(gl.integrate(-2.0, 3.0, |x| x.powi(5) - x), exact, epsilon = 1e-11);
    }

    #[test]
    fn spectral_accuracy_on_smooth_functions() {
        let gl = GaussLegendre::new(40);
        assert_abs_diff_eq!(
            gl.integrate(0.0, 1.0, f64::exp),
            std::f64::consts::E - 1.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            gl.integrate(0.0, std::f64::consts::PI, f64::sin),
            2.0,
            epsilon = 1e-13
        );
    }

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [2, 3, 17, 64, 200] {
            let gl = GaussLegendre::new(n);
            let total: f64 = gl.weights.iter().sum();
            assert_abs_diff_eq!(total, 2.0, epsilon = 1e-13);
            // Nodes strictly inside (-1, 1) and ascending.
            for w in gl.nodes.windows(2) {
                assert!(w[0] < w[1]);
            }
            assert!(gl.nodes[0] > -1.0 && gl.nodes[n - 1] < 1.0);
        }
    }
}
