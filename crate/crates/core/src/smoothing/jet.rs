//! Truncated Taylor series ("jets") for exact higher derivatives of
//! closed-form scalar functions.

use std::ops::{Add, Mul, Neg, Sub};

/// Taylor coefficients `c[k] = f⁽ᵏ⁾(x₀)/k!` up to order `N - 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<const N: usize>(pub [f64; N]);

impl<const N: usize> Jet<N> {
    pub fn constant(c: f64) -> Self {
        let mut a = [0.0; N];
        a[0] = c;
        Jet(a)
    }

    /// The independent variable `x` expanded at `x0` with slope `slope`.
    pub fn variable(x0: f64, slope: f64) -> Self {
        let mut a = [0.0; N];
        a[0] = x0;
        if N > 1 {
            a[1] = slope;
        }
        Jet(a)
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    /// `k`-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> f64 {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        self.0[k] * fact
    }

    pub fn derivatives(&self) -> [f64; N] {
        let mut out = [0.0; N];
        for (k, o) in out.iter_mut().enumerate() {
            *o = self.derivative(k);
        }
        out
    }

    pub fn recip(self) -> Self {
        let a = self.0;
        let mut b = [0.0; N];
        b[0] = 1.0 / a[0];
        for k in 1..N {
            let s: f64 = (1..=k).map(|j| a[j] * b[k - j]).sum();
            b[k] = -s * b[0];
        }
        Jet(b)
    }

    pub fn exp(self) -> Self {
        let a = self.0;
        let mut e = [0.0; N];
        e[0] = a[0].exp();
        for k in 1..N {
            let s: f64 = (1..=k).map(|j| j as f64 * a[j] * e[k - j]).sum();
            e[k] = s / k as f64;
        }
        Jet(e)
    }

    pub fn scale(self, s: f64) -> Self {
        Jet(self.0.map(|c| c * s))
    }
}

impl<const N: usize> Add for Jet<N> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut c = self.0;
        for (x, y) in c.iter_mut().zip(o.0) {
            *x += y;
        }
        Jet(c)
    }
}

impl<const N: usize> Sub for Jet<N> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<const N: usize> Neg for Jet<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl<const N: usize> Mul for Jet<N> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut c = [0.0; N];
        for i in 0..N {
            for j in 0..N - i {
                c[i + j] += self.0[i] * o.0[j];
            }
        }
        Jet(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_linear() {
        // e^(2x) at x = 0.3: k-th derivative is 2^k e^0.6
        let j = Jet::<5>::variable(0.3, 1.0).scale(2.0).exp();
        for k in 0..5 {
            let want = 2f64.powi(k as i32) * 0.6f64.exp();
            assert!((j.derivative(k) - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn recip_matches_power_rule() {
        // 1/x at x = 2: derivatives (-1)^k k! / 2^(k+1)
        let j = Jet::<5>::variable(2.0, 1.0).recip();
        let mut fact = 1.0;
        for k in 0..5 {
            if k > 0 {
                fact *= k as f64;
            }
            let want = (-1f64).powi(k as i32) * fact / 2f64.powi(k as i32 + 1);
            assert!((j.derivative(k) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn product_rule() {
        let x = Jet::<4>::variable(1.5, 1.0);
        let p = x * x * x; // x^3
        assert_eq!(p.derivatives(), [3.375, 6.75, 9.0, 6.0]);
    }
}
