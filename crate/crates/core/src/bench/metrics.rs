use serde::{Deserialize, Serialize};

/// Accuracy of a predicted field against the exact one on a set of points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorMetric {
    /// `| ||pred|| - ||exact|| | / ||exact||`.
    pub relative_error: f64,
    /// `||pred - exact|| / ||exact||`; never smaller than `relative_error`.
    pub l2_relative_error: f64,
    pub max_abs_error: f64,
}

impl ErrorMetric {
    pub fn compute(pred: &[f64], exact: &[f64]) -> Self {
        assert_eq!(pred.len(), exact.len(), "prediction and reference differ in length");
        let norm = |v: &mut dyn Iterator<Item = f64>| v.map(|x| x * x).sum::<f64>().sqrt();
        let pred_norm = norm(&mut pred.iter().copied());
        let exact_norm = norm(&mut exact.iter().copied());
        let diff_norm = norm(&mut pred.iter().zip(exact).map(|(p, e)| p - e));
        let max_abs_error = pred.iter().zip(exact).map(|(p, e)| (p - e).abs()).fold(0.0, f64::max);
        ErrorMetric {
            relative_error: (pred_norm - exact_norm).abs() / exact_norm,
            l2_relative_error: diff_norm / exact_norm,
            max_abs_error,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_prediction_has_zero_error() {
        let v = [1.0, -2.0, 3.5];
        let m = ErrorMetric::compute(&v, &v);
        assert_eq!(m.relative_error, 0.0);
        assert_eq!(m.l2_relative_error, 0.0);
        assert_eq!(m.max_abs_error, 0.0);
    }

    #[test]
    fn zero_prediction_has_unit_error() {
        let m = ErrorMetric::compute(&[0.0; 3], &[1.0, 2.0, 2.0]);
        assert_eq!(m.relative_error, 1.0);
        assert_eq!(m.l2_relative_error, 1.0);
        assert_eq!(m.max_abs_error, 2.0);
    }

    proptest! {
        #[test]
        fn norm_gap_is_bounded_by_l2_error(
            pairs in prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 1..50)
        ) {
            let (pred, exact): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            prop_assume!(exact.iter().any(|e| e.abs() > 1e-3));
            let m = ErrorMetric::compute(&pred, &exact);
            prop_assert!(m.relative_error >= 0.0);
            prop_assert!(m.relative_error <= m.l2_relative_error * (1.0 + 1e-12) + 1e-15);
        }
    }
}
