use std::ops::{Add, Div, Mul, Neg, Sub};

use super::scalar::Scalar;

/// Second-order forward jet: value, gradient and Hessian with respect to `n`
/// active parameters.
///
/// The Hessian is stored densely (row-major `n x n`) and every operation
/// writes it symmetrically, so `hess(i, j) == hess(j, i)` holds bit for bit.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet2 {
    value: f64,
    grad: Vec<f64>,
    hess: Vec<f64>,
}

impl Jet2 {
    pub fn constant(n: usize, value: f64) -> Self {
        Self {
            value,
            grad: vec![0.0; n],
            hess: vec![0.0; n * n],
        }
    }

    /// The `index`-th coordinate function evaluated at `value`.
    pub fn variable(n: usize, index: usize, value: f64) -> Self {
        assert!(index < n, "variable index {index} out of range for {n} parameters");
        let mut j = Self::constant(n, value);
        j.grad[index] = 1.0;
        j
    }

    /// Seeds one jet per coordinate of `p`.
    pub fn seed(p: &[f64]) -> Vec<Self> {
        let n = p.len();
        p.iter().enumerate().map(|(i, &v)| Self::variable(n, i, v)).collect()
    }

    /// Builds a jet from raw parts; the Hessian is symmetrized.
    pub fn from_parts(value: f64, grad: Vec<f64>, hess: Vec<f64>) -> Self {
        let n = grad.len();
        assert_eq!(hess.len(), n * n, "hessian must be n x n");
        let mut j = Self { value, grad, hess };
        for a in 0..n {
            for b in (a + 1)..n {
                let m = 0.5 * (j.hess[a * n + b] + j.hess[b * n + a]);
                j.hess[a * n + b] = m;
                j.hess[b * n + a] = m;
            }
        }
        j
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn grad(&self) -> &[f64] {
        &self.grad
    }

    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.hess[i * self.dim() + j]
    }

    /// Row-major Hessian.
    pub fn hess_flat(&self) -> &[f64] {
        &self.hess
    }

    /// `∂f/∂u_k` as a first-order jet (its gradient is row `k` of the Hessian).
    pub fn partial(&self, k: usize) -> Jet1 {
        let n = self.dim();
        Jet1::new(self.grad[k], self.hess[k * n..(k + 1) * n].to_vec())
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.grad.iter().all(|v| v.is_finite())
            && self.hess.iter().all(|v| v.is_finite())
    }

    /// Composes with a scalar function given its value and first two
    /// derivatives at `self.value`.
    fn chain(mut self, f0: f64, f1: f64, f2: f64) -> Self {
        let n = self.dim();
        for a in 0..n {
            for b in a..n {
                let h = f1 * self.hess[a * n + b] + f2 * self.grad[a] * self.grad[b];
                self.hess[a * n + b] = h;
                self.hess[b * n + a] = h;
            }
        }
        for g in &mut self.grad {
            *g *= f1;
        }
        self.value = f0;
        self
    }

    fn check_dim(&self, other: &Self) {
        assert_eq!(
            self.dim(),
            other.dim(),
            "jets over different parameter counts cannot be combined"
        );
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(mut self, rhs: Jet2) -> Jet2 {
        self.check_dim(&rhs);
        self.value += rhs.value;
        self.grad.iter_mut().zip(&rhs.grad).for_each(|(a, b)| *a += b);
        self.hess.iter_mut().zip(&rhs.hess).for_each(|(a, b)| *a += b);
        self
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(mut self, rhs: Jet2) -> Jet2 {
        self.check_dim(&rhs);
        self.value -= rhs.value;
        self.grad.iter_mut().zip(&rhs.grad).for_each(|(a, b)| *a -= b);
        self.hess.iter_mut().zip(&rhs.hess).for_each(|(a, b)| *a -= b);
        self
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(mut self, rhs: Jet2) -> Jet2 {
        self.check_dim(&rhs);
        let n = self.dim();
        let (a, b) = (self.value, rhs.value);
        for i in 0..n {
            for j in i..n {
                let h = a * rhs.hess[i * n + j]
                    + b * self.hess[i * n + j]
                    + self.grad[i] * rhs.grad[j]
                    + rhs.grad[i] * self.grad[j];
                self.hess[i * n + j] = h;
                self.hess[j * n + i] = h;
            }
        }
        for (g, gr) in self.grad.iter_mut().zip(&rhs.grad) {
            *g = a * gr + b * *g;
        }
        self.value = a * b;
        self
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet2) -> Jet2 {
        self * rhs.recip()
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(mut self) -> Jet2 {
        self.value = -self.value;
        self.grad.iter_mut().for_each(|g| *g = -*g);
        self.hess.iter_mut().for_each(|h| *h = -*h);
        self
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(mut self, rhs: f64) -> Jet2 {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    fn sub(mut self, rhs: f64) -> Jet2 {
        self.value -= rhs;
        self
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(mut self, rhs: f64) -> Jet2 {
        self.value *= rhs;
        self.grad.iter_mut().for_each(|g| *g *= rhs);
        self.hess.iter_mut().for_each(|h| *h *= rhs);
        self
    }
}

impl Div<f64> for Jet2 {
    type Output = Jet2;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: f64) -> Jet2 {
        self * (1.0 / rhs)
    }
}

impl Scalar for Jet2 {
    fn value(&self) -> f64 {
        self.value
    }

    fn lift(&self, c: f64) -> Self {
        Jet2::constant(self.dim(), c)
    }

    fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.clone().chain(s, c, -s)
    }

    fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.clone().chain(c, -s, -c)
    }

    fn exp(&self) -> Self {
        let e = self.value.exp();
        self.clone().chain(e, e, e)
    }

    fn ln(&self) -> Self {
        let x = self.value;
        self.clone().chain(x.ln(), 1.0 / x, -1.0 / (x * x))
    }

    fn sqrt(&self) -> Self {
        let s = self.value.sqrt();
        self.clone().chain(s, 0.5 / s, -0.25 / (s * self.value))
    }

    fn powi(&self, k: i32) -> Self {
        let x = self.value;
        let kf = f64::from(k);
        let f0 = x.powi(k);
        let f1 = if k == 0 { 0.0 } else { kf * x.powi(k - 1) };
        let f2 = if k == 0 || k == 1 {
            0.0
        } else {
            kf * (kf - 1.0) * x.powi(k - 2)
        };
        self.clone().chain(f0, f1, f2)
    }

    fn atan2(&self, x: &Self) -> Self {
        self.check_dim(x);
        let n = self.dim();
        let (yv, xv) = (self.value, x.value);
        let r2 = xv * xv + yv * yv;
        let zy = xv / r2;
        let zx = -yv / r2;
        let zyy = -2.0 * xv * yv / (r2 * r2);
        let zxx = -zyy;
        let zxy = (yv * yv - xv * xv) / (r2 * r2);
        let (gy, gx) = (&self.grad, &x.grad);
        let mut out = Jet2::constant(n, yv.atan2(xv));
        for i in 0..n {
            out.grad[i] = zy * gy[i] + zx * gx[i];
            for j in i..n {
                let h = zy * self.hess[i * n + j]
                    + zx * x.hess[i * n + j]
                    + zyy * gy[i] * gy[j]
                    + zxx * gx[i] * gx[j]
                    + zxy * (gy[i] * gx[j] + gx[i] * gy[j]);
                out.hess[i * n + j] = h;
                out.hess[j * n + i] = h;
            }
        }
        out
    }

    fn recip(&self) -> Self {
        let x = self.value;
        self.clone().chain(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x))
    }
}

/// First-order forward jet (value and gradient).
///
/// Used where only one derivative of a quantity is needed, e.g. metric
/// entries in the divergence form of the Laplace–Beltrami operator.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet1 {
    value: f64,
    grad: Vec<f64>,
}

impl Jet1 {
    pub fn constant(n: usize, value: f64) -> Self {
        Self {
            value,
            grad: vec![0.0; n],
        }
    }

    pub fn variable(n: usize, index: usize, value: f64) -> Self {
        let mut j = Self::constant(n, value);
        j.grad[index] = 1.0;
        j
    }

    pub fn new(value: f64, grad: Vec<f64>) -> Self {
        Self { value, grad }
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn grad(&self) -> &[f64] {
        &self.grad
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.grad.iter().all(|v| v.is_finite())
    }

    fn chain(mut self, f0: f64, f1: f64) -> Self {
        self.grad.iter_mut().for_each(|g| *g *= f1);
        self.value = f0;
        self
    }
}

impl From<&Jet2> for Jet1 {
    fn from(j: &Jet2) -> Self {
        Jet1::new(j.value, j.grad.clone())
    }
}

impl Add for Jet1 {
    type Output = Jet1;
    fn add(mut self, rhs: Jet1) -> Jet1 {
        self.value += rhs.value;
        self.grad.iter_mut().zip(&rhs.grad).for_each(|(a, b)| *a += b);
        self
    }
}

impl Sub for Jet1 {
    type Output = Jet1;
    fn sub(mut self, rhs: Jet1) -> Jet1 {
        self.value -= rhs.value;
        self.grad.iter_mut().zip(&rhs.grad).for_each(|(a, b)| *a -= b);
        self
    }
}

impl Mul for Jet1 {
    type Output = Jet1;
    fn mul(mut self, rhs: Jet1) -> Jet1 {
        let (a, b) = (self.value, rhs.value);
        for (g, gr) in self.grad.iter_mut().zip(&rhs.grad) {
            *g = a * gr + b * *g;
        }
        self.value = a * b;
        self
    }
}

impl Div for Jet1 {
    type Output = Jet1;
    fn div(mut self, rhs: Jet1) -> Jet1 {
        let (a, b) = (self.value, rhs.value);
        let q = a / b;
        for (g, gr) in self.grad.iter_mut().zip(&rhs.grad) {
            *g = (*g - q * gr) / b;
        }
        self.value = q;
        self
    }
}

impl Neg for Jet1 {
    type Output = Jet1;
    fn neg(mut self) -> Jet1 {
        self.value = -self.value;
        self.grad.iter_mut().for_each(|g| *g = -*g);
        self
    }
}

impl Add<f64> for Jet1 {
    type Output = Jet1;
    fn add(mut self, rhs: f64) -> Jet1 {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for Jet1 {
    type Output = Jet1;
    fn sub(mut self, rhs: f64) -> Jet1 {
        self.value -= rhs;
        self
    }
}

impl Mul<f64> for Jet1 {
    type Output = Jet1;
    fn mul(mut self, rhs: f64) -> Jet1 {
        self.value *= rhs;
        self.grad.iter_mut().for_each(|g| *g *= rhs);
        self
    }
}

impl Div<f64> for Jet1 {
    type Output = Jet1;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: f64) -> Jet1 {
        self * (1.0 / rhs)
    }
}

impl Scalar for Jet1 {
    fn value(&self) -> f64 {
        self.value
    }
    fn lift(&self, c: f64) -> Self {
        Jet1::constant(self.dim(), c)
    }
    fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.clone().chain(s, c)
    }
    fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.clone().chain(c, -s)
    }
    fn exp(&self) -> Self {
        let e = self.value.exp();
        self.clone().chain(e, e)
    }
    fn ln(&self) -> Self {
        let x = self.value;
        self.clone().chain(x.ln(), 1.0 / x)
    }
    fn sqrt(&self) -> Self {
        let s = self.value.sqrt();
        self.clone().chain(s, 0.5 / s)
    }
    fn powi(&self, k: i32) -> Self {
        let x = self.value;
        let f1 = if k == 0 { 0.0 } else { f64::from(k) * x.powi(k - 1) };
        self.clone().chain(x.powi(k), f1)
    }
    fn atan2(&self, x: &Self) -> Self {
        let (yv, xv) = (self.value, x.value);
        let r2 = xv * xv + yv * yv;
        let grad = self
            .grad
            .iter()
            .zip(&x.grad)
            .map(|(gy, gx)| (xv * gy - yv * gx) / r2)
            .collect();
        Jet1::new(yv.atan2(xv), grad)
    }
    fn recip(&self) -> Self {
        let x = self.value;
        self.clone().chain(1.0 / x, -1.0 / (x * x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_of_variable() {
        let u = Jet2::variable(1, 0, 3.0);
        let f = u.clone() * u;
        assert_eq!(f.value(), 9.0);
        assert_eq!(f.grad(), &[6.0]);
        assert_eq!(f.hess(0, 0), 2.0);
    }

    #[test]
    fn sin_cos_product_at_origin() {
        let p = Jet2::seed(&[0.0, 0.0]);
        let f = p[0].sin() * p[1].cos();
        assert_eq!(f.value(), 0.0);
        assert_eq!(f.grad(), &[1.0, 0.0]);
        assert_eq!(f.hess_flat(), &[0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn hessian_is_exactly_symmetric() {
        let p = Jet2::seed(&[0.3, -1.2, 0.7]);
        let f = (p[0].clone() * p[1].exp() + p[2].sin() * p[0].clone()).atan2(&(p[1].square() + 1.0))
            / (p[2].clone() + 3.0).sqrt();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(f.hess(i, j), f.hess(j, i));
            }
        }
    }

    #[test]
    fn quotient_matches_hand_derivative() {
        // f(u, v) = u / v at (2, 4): grad (1/4, -1/8), hess [[0, -1/16], [-1/16, 1/16]]
        let p = Jet2::seed(&[2.0, 4.0]);
        let f = p[0].clone() / p[1].clone();
        assert!((f.value() - 0.5).abs() < 1e-15);
        assert!((f.grad()[0] - 0.25).abs() < 1e-15);
        assert!((f.grad()[1] + 0.125).abs() < 1e-15);
        assert!(f.hess(0, 0).abs() < 1e-15);
        assert!((f.hess(0, 1) + 1.0 / 16.0).abs() < 1e-15);
        assert!((f.hess(1, 1) - 1.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn powi_matches_repeated_product() {
        let p = Jet2::seed(&[1.3, 0.4]);
        let base = p[0].clone() * p[1].clone() + 0.5;
        let a = base.powi(4);
        let b = base.clone() * base.clone() * base.clone() * base;
        assert!((a.value() - b.value()).abs() < 1e-14);
        for (x, y) in a.hess_flat().iter().zip(b.hess_flat()) {
            assert!((x - y).abs() < 1e-13 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn jet1_agrees_with_jet2_gradient() {
        let p2 = Jet2::seed(&[0.9, 0.2]);
        let p1: Vec<Jet1> = p2.iter().map(Jet1::from).collect();
        let f2 = (p2[0].square() - p2[1].square()).atan2(&(p2[0].clone() * p2[1].clone() * 2.0))
            * p2[1].exp()
            / (p2[0].clone() + 2.0).sqrt();
        let f1 = (p1[0].square() - p1[1].square()).atan2(&(p1[0].clone() * p1[1].clone() * 2.0))
            * p1[1].exp()
            / (p1[0].clone() + 2.0).sqrt();
        assert!((f1.value() - f2.value()).abs() < 1e-15);
        for (a, b) in f1.grad().iter().zip(f2.grad()) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
