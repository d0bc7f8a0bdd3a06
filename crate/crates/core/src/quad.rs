//! Quadrature rules on `[-l, l]` used by the Nystrom discretization and the
//! deflection solvers.

use std::str::FromStr;

use serde::Serialize;

use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QuadratureRule {
    GaussLegendre,
    CompositeSimpson,
}

impl QuadratureRule {
    pub fn id(self) -> &'static str {
        match self {
            QuadratureRule::GaussLegendre => "gauss_legendre",
            QuadratureRule::CompositeSimpson => "composite_simpson",
        }
    }
}

impl FromStr for QuadratureRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gauss_legendre" => Ok(QuadratureRule::GaussLegendre),
            "composite_simpson" => Ok(QuadratureRule::CompositeSimpson),
            other => Err(Error::UnsupportedRule(other.to_string())),
        }
    }
}

/// Nodes and weights of `rule` with `n` points on `[-l, l]`.
///
/// Nodes come back strictly increasing and the weights are all positive.
pub fn nodes_weights<T: Scalar>(rule: QuadratureRule, n: usize, l: T) -> Result<(Vec<T>, Vec<T>)> {
    if !(l > T::zero()) || !l.is_finite() {
        return Err(Error::Domain(format!("l must be finite and > 0 (got {l})")));
    }
    if n < 2 {
        return Err(Error::Domain(format!("need at least 2 nodes (got {n})")));
    }
    match rule {
        QuadratureRule::GaussLegendre => {
            let (mut x, mut w) = gauss_legendre(n)?;
            for v in &mut x {
                *v = *v * l;
            }
            for v in &mut w {
                *v = *v * l;
            }
            Ok((x, w))
        }
        QuadratureRule::CompositeSimpson => Ok(composite_simpson(n, l)),
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on the
/// Legendre recurrence, with the usual `cos` initial guesses.
pub fn gauss_legendre<T: Scalar>(n: usize) -> Result<(Vec<T>, Vec<T>)> {
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = T::of(n as f64);
    // only the lower half needs solving; mirror the rest
    for i in 0..n.div_ceil(2) {
        let theta = T::PI() * (T::of(i as f64) + T::of(0.75)) / (nf + T::of(0.5));
        let mut x = -theta.cos();
        let mut converged = false;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x = x - dx;
            if dx.abs() <= T::epsilon() * (T::one() + x.abs()) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence { iterations: 100, residual: f64::NAN });
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = T::of(2.0) / ((T::one() - x * x) * dp * dp);
        nodes[i] = x;
        weights[i] = w;
        nodes[n - 1 - i] = -x;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        // exact center for odd rules
        let mid = n / 2;
        nodes[mid] = T::zero();
        let (_, dp) = legendre_with_derivative(n, T::zero());
        weights[mid] = T::of(2.0) / (dp * dp);
    }
    Ok((nodes, weights))
}

fn legendre_with_derivative<T: Scalar>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for j in 2..=n {
        let jf = T::of(j as f64);
        let p2 = ((T::of(2.0) * jf - T::one()) * x * p1 - (jf - T::one()) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    // derivative from the standard identity; x = +-1 never arises for nodes
    let dp = T::of(n as f64) * (x * p1 - p0) / (x * x - T::one());
    (p1, dp)
}

/// Uniform-node composite Simpson weights on `[-l, l]` for any `n >= 4`.
///
/// An even interval count uses plain Simpson; an odd count closes with a
/// single 3/8 block over the last three intervals (so the weight vector is
/// asymmetric for even `n`, while the nodes stay symmetric).
fn composite_simpson<T: Scalar>(n: usize, l: T) -> (Vec<T>, Vec<T>) {
    let m = n - 1; // interval count
    let h = T::of(2.0) * l / T::of(m as f64);
    let nodes: Vec<T> = (0..n).map(|i| -l + h * T::of(i as f64)).collect();
    let mut w = vec![T::zero(); n];
    let simpson = |w: &mut [T], start: usize, intervals: usize| {
        let c = h / T::of(3.0);
        for j in 0..=intervals {
            let coeff = if j == 0 || j == intervals {
                T::one()
            } else if j % 2 == 1 {
                T::of(4.0)
            } else {
                T::of(2.0)
            };
            w[start + j] = w[start + j] + c * coeff;
        }
    };
    if m % 2 == 0 {
        simpson(&mut w, 0, m);
    } else {
        if m > 3 {
            simpson(&mut w, 0, m - 3);
        }
        let c = h * T::of(0.375);
        for (j, coeff) in [1.0, 3.0, 3.0, 1.0].into_iter().enumerate() {
            w[m - 3 + j] = w[m - 3 + j] + c * T::of(coeff);
        }
    }
    (nodes, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_five_point() {
        let (x, w) = gauss_legendre::<f64>(5).unwrap();
        let x_ref = [
            -0.906179845938664,
            -0.5384693101056831,
            0.0,
            0.5384693101056831,
            0.906179845938664,
        ];
        let w_ref = [
            0.23692688505618908,
            0.47862867049936647,
            0.5688888888888889,
            0.47862867049936647,
            0.23692688505618908,
        ];
        for i in 0..5 {
            assert!((x[i] - x_ref[i]).abs() < 1e-15);
            assert!((w[i] - w_ref[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn rules_integrate_polynomials() {
        for rule in [QuadratureRule::GaussLegendre, QuadratureRule::CompositeSimpson] {
            for n in [4usize, 5, 6, 7, 8, 31] {
                let (x, w) = nodes_weights(rule, n, 1.5f64).unwrap();
                let total: f64 = w.iter().sum();
                assert!((total - 3.0).abs() < 3.0 * 1e-12, "{rule:?} n={n}");
                // cubics are exact for both rules
                let cubic: f64 = x.iter().zip(&w).map(|(x, w)| w * (x.powi(3) + 2.0 * x)).sum();
                assert!(cubic.abs() < 1e-12, "{rule:?} n={n} cubic={cubic}");
                let sq: f64 =
                    x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
                assert!((sq - 2.25).abs() < 1e-12, "{rule:?} n={n} square={sq}");
            }
        }
    }

    #[test]
    fn nodes_increasing_weights_positive() {
        for rule in [QuadratureRule::GaussLegendre, QuadratureRule::CompositeSimpson] {
            for n in [4usize, 5, 6, 9, 64, 101] {
                let (x, w) = nodes_weights(rule, n, 2.0f64).unwrap();
                for i in 1..n {
                    assert!(x[i] > x[i - 1]);
                }
                assert!(w.iter().all(|&w| w > 0.0));
                assert!(x[0] >= -2.0 && x[n - 1] <= 2.0);
            }
        }
    }

    #[test]
    fn gauss_legendre_high_order_accuracy() {
        // 200-point rule integrates a smooth oscillatory function to near eps
        let (x, w) = gauss_legendre::<f64>(200).unwrap();
        let got: f64 = x.iter().zip(&w).map(|(x, w)| w * (3.0 * x).cos()).sum();
        let expect = 2.0 * (3.0f64).sin() / 3.0;
        assert!((got - expect).abs() < 1e-14);
    }

    #[test]
    fn rule_parsing() {
        assert_eq!("gauss_legendre".parse::<QuadratureRule>().unwrap(), QuadratureRule::GaussLegendre);
        assert_eq!(
            "composite_simpson".parse::<QuadratureRule>().unwrap(),
            QuadratureRule::CompositeSimpson
        );
        assert!(matches!(
            "midpoint".parse::<QuadratureRule>(),
            Err(Error::UnsupportedRule(_))
        ));
    }

    #[test]
    fn invalid_inputs() {
        assert!(nodes_weights::<f64>(QuadratureRule::GaussLegendre, 1, 1.0).is_err());
        assert!(nodes_weights::<f64>(QuadratureRule::GaussLegendre, 8, 0.0).is_err());
        assert!(nodes_weights::<f64>(QuadratureRule::GaussLegendre, 8, -1.0).is_err());
    }
}
