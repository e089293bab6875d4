//! Small barycentric Chebyshev interpolant used to collapse 1-D families
//! of radial integrals inside the Laplace-transform evaluators.

use num_complex::Complex64;

pub struct ChebInterp {
    a: f64,
    b: f64,
    nodes: Vec<f64>,
    values: Vec<Complex64>,
    weights: Vec<f64>,
}

impl ChebInterp {
    /// Samples `f` at `n` Chebyshev points of the second kind on `[a, b]`.
    pub fn build<F>(f: F, a: f64, b: f64, n: usize) -> Self
    where
        F: Fn(f64) -> Complex64,
    {
        assert!(n >= 2 && b > a);
        let mut nodes = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for k in 0..n {
            let theta = std::f64::consts::PI * k as f64 / (n - 1) as f64;
            let x = 0.5 * (a + b) - 0.5 * (b - a) * theta.cos();
            nodes.push(x);
            values.push(f(x));
            let mut w = if k % 2 == 0 { 1.0 } else { -1.0 };
            if k == 0 || k == n - 1 {
                w *= 0.5;
            }
            weights.push(w);
        }
        ChebInterp {
            a,
            b,
            nodes,
            values,
            weights,
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let x = x.clamp(self.a, self.b);
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = 0.0;
        for i in 0..self.nodes.len() {
            let dx = x - self.nodes[i];
            if dx.abs() < 1e-300 {
                return self.values[i];
            }
            let c = self.weights[i] / dx;
            num += self.values[i] * c;
            den += c;
        }
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_smooth_function() {
        let f = |x: f64| Complex64::new((0.3 * x).exp(), (x * 0.7).sin());
        let interp = ChebInterp::build(f, -2.0, 5.0, 24);
        for i in 0..100 {
            let x = -2.0 + 7.0 * i as f64 / 99.0;
            assert!((interp.eval(x) - f(x)).norm() < 1e-10);
        }
    }
}
