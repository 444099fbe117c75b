//! Quadrature on sample grids and deterministic summation.

use std::ops::{Add, Mul, Sub};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadratureError {
    #[error("{nodes} nodes but {values} integrand samples")]
    LengthMismatch { nodes: usize, values: usize },
    #[error("nodes must be strictly increasing (node {index})")]
    NotIncreasing { index: usize },
}

/// Sums in a fixed binary-tree order, so the result does not depend on how
/// the caller produced the slice.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if values.len() <= LEAF {
        let mut acc = 0.0;
        for &v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Trapezoid rule for a periodic integrand sampled at `values.len()` equally
/// spaced points one `step` apart (the endpoint is not repeated).
pub fn periodic_trapezoid(values: &[f64], step: f64) -> f64 {
    step * pairwise_sum(values)
}

/// Two-point Hermite rule on `[a, a + h]` from the value and first two
/// derivatives at each end. Exact for quintics.
pub fn hermite_panel<T>(h: f64, left: &[T; 3], right: &[T; 3]) -> T
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    (left[0] + right[0]) * (h / 2.0)
        + (left[1] - right[1]) * (h * h / 10.0)
        + (left[2] + right[2]) * (h * h * h / 120.0)
}

/// Running integral over arbitrary increasing `nodes`.
///
/// `jets[i]` holds the integrand and its first two derivatives at `nodes[i]`.
/// The result has one entry per node, starting at `start`.
pub fn cumulative_hermite<T>(nodes: &[f64], jets: &[[T; 3]], start: T) -> Result<Vec<T>, QuadratureError>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    if nodes.len() != jets.len() {
        return Err(QuadratureError::LengthMismatch {
            nodes: nodes.len(),
            values: jets.len(),
        });
    }
    let mut out = Vec::with_capacity(nodes.len());
    if nodes.is_empty() {
        return Ok(out);
    }
    let mut acc = start;
    out.push(acc);
    for i in 1..nodes.len() {
        let h = nodes[i] - nodes[i - 1];
        if h <= 0.0 || !h.is_finite() {
            return Err(QuadratureError::NotIncreasing { index: i });
        }
        acc = acc + hermite_panel(h, &jets[i - 1], &jets[i]);
        out.push(acc);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panel_is_exact_for_quintics() {
        // f = x^5 on [0, 1]
        let left = [0.0, 0.0, 0.0];
        let right = [1.0, 5.0, 20.0];
        assert!((hermite_panel(1.0, &left, &right) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn cumulative_sine_is_one_minus_cosine() {
        let n = 64;
        let nodes: Vec<f64> = (0..=n).map(|i| 0.1 * i as f64).collect();
        let jets: Vec<[f64; 3]> = nodes.iter().map(|&x| [x.sin(), x.cos(), -x.sin()]).collect();
        let table = cumulative_hermite(&nodes, &jets, 0.0).unwrap();
        for (x, f) in nodes.iter().zip(&table) {
            assert!((f - (1.0 - x.cos())).abs() < 2e-10);
        }
    }

    #[test]
    fn rejects_bad_grids() {
        let jets = [[0.0; 3]; 3];
        assert!(matches!(
            cumulative_hermite(&[0.0, 1.0, 1.0], &jets, 0.0),
            Err(QuadratureError::NotIncreasing { index: 2 })
        ));
        assert!(cumulative_hermite(&[0.0, 1.0], &jets, 0.0).is_err());
    }

    #[test]
    fn pairwise_sum_matches_exact_integers() {
        let v: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 500_500.0);
    }
}
