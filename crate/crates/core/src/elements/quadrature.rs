use crate::scalar::Real;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, ascending.
///
/// Nodes are computed by Newton iteration on the Legendre polynomial in
/// `f64` and then converted.
pub fn gauss_legendre<T: Real>(q: usize) -> (Vec<T>, Vec<T>) {
    assert!(q >= 1, "at least one quadrature point");
    let mut nodes = vec![0.0f64; q];
    let mut weights = vec![0.0f64; q];
    let qf = q as f64;
    for i in 0..q.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (qf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=q {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if q == 1 { x } else { p1 };
            let pm1 = if q == 1 { 1.0 } else { p0 };
            dp = qf * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        if q == 1 {
            x = 0.0;
            dp = 1.0;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[q - 1 - i] = x;
        weights[i] = w;
        weights[q - 1 - i] = w;
    }
    if q % 2 == 1 {
        nodes[q / 2] = 0.0;
    }
    (
        nodes.into_iter().map(T::lit).collect(),
        weights.into_iter().map(T::lit).collect(),
    )
}

/// Tensor Gauss-Legendre rule on `[-1, 1]^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<T> {
    pub points: Vec<[T; 2]>,
    pub weights: Vec<T>,
    pub points_per_axis: usize,
}

impl<T: Real> QuadratureRule<T> {
    /// `q` points per axis; exact for tensor polynomials of degree `2q - 1` per axis.
    pub fn gauss_tensor(q: usize) -> Self {
        let (x, w) = gauss_legendre::<T>(q);
        let mut points = Vec::with_capacity(q * q);
        let mut weights = Vec::with_capacity(q * q);
        for j in 0..q {
            for i in 0..q {
                points.push([x[i], x[j]]);
                weights.push(w[i] * w[j]);
            }
        }
        Self {
            points,
            weights,
            points_per_axis: q,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_exactness() {
        for q in 1..=12 {
            let (x, w) = gauss_legendre::<f64>(q);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            assert!(w.iter().all(|&wi| wi > 0.0));
            assert!(x.windows(2).all(|p| p[0] < p[1]));
            for deg in 0..2 * q {
                let approx: f64 = x
                    .iter()
                    .zip(&w)
                    .map(|(&xi, &wi)| wi * xi.powi(deg as i32))
                    .sum();
                let exact = if deg % 2 == 1 {
                    0.0
                } else {
                    2.0 / (deg as f64 + 1.0)
                };
                assert!((approx - exact).abs() < 1e-14, "q={q} deg={deg}");
            }
            // degree 2q is not integrated exactly
            if q <= 8 {
                let deg = 2 * q;
                let approx: f64 = x
                    .iter()
                    .zip(&w)
                    .map(|(&xi, &wi)| wi * xi.powi(deg as i32))
                    .sum();
                assert!((approx - 2.0 / (deg as f64 + 1.0)).abs() > 1e-9, "q={q}");
            }
        }
    }

    #[test]
    fn tensor_rule() {
        let r = QuadratureRule::<f64>::gauss_tensor(6);
        assert_eq!(r.len(), 36);
        assert!((r.weights.iter().sum::<f64>() - 4.0).abs() < 1e-14);
        // x^10 y^4 exact with 6 points per axis
        let approx: f64 = r
            .points
            .iter()
            .zip(&r.weights)
            .map(|(p, w)| w * p[0].powi(10) * p[1].powi(4))
            .sum();
        assert!((approx - (2.0 / 11.0) * (2.0 / 5.0)).abs() < 1e-14);
        let r32 = QuadratureRule::<f32>::gauss_tensor(4);
        assert!((r32.weights.iter().sum::<f32>() - 4.0).abs() < 1e-5);
    }
}
