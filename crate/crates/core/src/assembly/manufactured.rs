//! Closed-form smooth solutions `u(x, y) = g(x) s(y)` vanishing to order `m`
//! on the boundary of the unit square, with their right-hand sides.

use crate::scalar::{binomial, falling, ipow, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Manufactured {
    /// `x^2 (1-x)^2 sin^2(pi y)`, paired with `m = 2`.
    Biharmonic,
    /// `x^3 (1-x)^3 sin^3(pi y)`, paired with `m = 3`.
    Triharmonic,
}

impl Manufactured {
    pub fn for_order(m: usize) -> Option<Self> {
        match m {
            2 => Some(Self::Biharmonic),
            3 => Some(Self::Triharmonic),
            _ => None,
        }
    }

    pub fn order(self) -> usize {
        match self {
            Self::Biharmonic => 2,
            Self::Triharmonic => 3,
        }
    }

    fn g_coeffs(self) -> &'static [f64] {
        match self {
            Self::Biharmonic => &[0.0, 0.0, 1.0, -2.0, 1.0],
            Self::Triharmonic => &[0.0, 0.0, 0.0, 1.0, -3.0, 3.0, -1.0],
        }
    }

    fn g<T: Real>(self, k: usize, x: T) -> T {
        let mut acc = T::zero();
        for (p, &c) in self.g_coeffs().iter().enumerate().skip(k) {
            if c != 0.0 {
                acc += T::lit(c) * T::from_count(falling(p, k)) * ipow(x, p - k);
            }
        }
        acc
    }

    fn s<T: Real>(self, k: usize, y: T) -> T {
        let pi = T::PI();
        let quarter_turns = T::from_count(k) * T::FRAC_PI_2();
        match self {
            // sin^2 = (1 - cos 2 pi y) / 2
            Self::Biharmonic => {
                let w = T::lit(2.0) * pi;
                let c = ipow(w, k) * (w * y + quarter_turns).cos() / T::lit(2.0);
                if k == 0 {
                    T::lit(0.5) - c
                } else {
                    -c
                }
            }
            // sin^3 = (3 sin pi y - sin 3 pi y) / 4
            Self::Triharmonic => {
                let w3 = T::lit(3.0) * pi;
                (T::lit(3.0) * ipow(pi, k) * (pi * y + quarter_turns).sin()
                    - ipow(w3, k) * (w3 * y + quarter_turns).sin())
                    / T::lit(4.0)
            }
        }
    }

    pub fn value<T: Real>(self, x: [T; 2]) -> T {
        self.derivative(0, 0, x)
    }

    /// `D^(a,b) u` at `x`.
    pub fn derivative<T: Real>(self, a: usize, b: usize, x: [T; 2]) -> T {
        self.g(a, x[0]) * self.s(b, x[1])
    }

    /// `Delta^k u` at `x`.
    pub fn laplacian_power<T: Real>(self, k: usize, x: [T; 2]) -> T {
        (0..=k)
            .map(|j| {
                T::from_count(binomial(k, j)) * self.g(2 * j, x[0]) * self.s(2 * (k - j), x[1])
            })
            .sum()
    }

    /// `f = (-Delta)^m u`.
    pub fn rhs<T: Real>(self, x: [T; 2]) -> T {
        let m = self.order();
        let l = self.laplacian_power(m, x);
        if m % 2 == 0 {
            l
        } else {
            -l
        }
    }
}
