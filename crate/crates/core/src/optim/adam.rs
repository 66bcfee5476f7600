use serde::{Deserialize, Serialize};

use super::OptimError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub max_iters: usize,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            max_iters: 1000,
        }
    }
}

impl AdamConfig {
    pub fn validate(&self) -> Result<(), OptimError> {
        let bad = |what: &str| Err(OptimError::InvalidConfig(what.to_string()));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("adam.learning_rate must be positive");
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return bad("adam betas must lie in [0, 1)");
        }
        if !(self.epsilon > 0.0) {
            return bad("adam.epsilon must be positive");
        }
        Ok(())
    }
}

/// First and second moment estimates plus the step counter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
}

impl AdamState {
    pub fn new(n: usize) -> Self {
        AdamState {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }
}

/// One bias-corrected Adam update of `theta` in place. The state is left
/// untouched if `grad` has a non-finite entry.
pub fn adam_step(state: &mut AdamState, grad: &[f64], cfg: &AdamConfig, theta: &mut [f64]) -> Result<(), OptimError> {
    let n = theta.len();
    if grad.len() != n || state.m.len() != n || state.v.len() != n {
        return Err(OptimError::Dimension {
            expected: n,
            got: grad.len(),
        });
    }
    if let Some(index) = grad.iter().position(|g| !g.is_finite()) {
        return Err(OptimError::NonFiniteGradient {
            index,
            value: grad[index],
        });
    }
    state.t += 1;
    let t = state.t as i32;
    let bc1 = 1.0 - cfg.beta1.powi(t);
    let bc2 = 1.0 - cfg.beta2.powi(t);
    for i in 0..n {
        let g = grad[i];
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
        let m_hat = state.m[i] / bc1;
        let v_hat = state.v[i] / bc2;
        theta[i] -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_gradient_keeps_theta() {
        let mut theta = vec![1.0, -2.0, 3.0];
        let mut st = AdamState::new(3);
        adam_step(&mut st, &[0.0; 3], &AdamConfig::default(), &mut theta).unwrap();
        assert_eq!(theta, vec![1.0, -2.0, 3.0]);
        assert_eq!(st.t, 1);
    }

    #[test]
    fn first_step_matches_hand_evaluation() {
        let cfg = AdamConfig::default();
        let mut theta = vec![0.5];
        adam_step(&mut AdamState::new(1), &[1.0], &cfg, &mut theta).unwrap();
        // m_hat = 1, v_hat = 1 after bias correction
        let expected = 0.5 - 1e-3 / (1.0 + 1e-8);
        assert!((theta[0] - expected).abs() <= 1e-12);
    }

    #[test]
    fn non_finite_gradient_is_rejected() {
        let mut theta = vec![0.0, 0.0];
        let mut st = AdamState::new(2);
        let err = adam_step(&mut st, &[1.0, f64::NAN], &AdamConfig::default(), &mut theta).unwrap_err();
        assert!(matches!(err, OptimError::NonFiniteGradient { index: 1, .. }));
        assert_eq!(st.t, 0);
        assert_eq!(theta, vec![0.0, 0.0]);
    }

    #[test]
    fn config_validation() {
        assert!(AdamConfig::default().validate().is_ok());
        assert!(AdamConfig {
            learning_rate: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(AdamConfig {
            beta2: 1.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(AdamConfig {
            epsilon: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
    }

    proptest! {
        #[test]
        fn update_commutes_with_permutation(
            data in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0), 2..12),
            shift in 1usize..11,
        ) {
            let n = data.len();
            let theta0: Vec<f64> = data.iter().map(|d| d.0).collect();
            let g1: Vec<f64> = data.iter().map(|d| d.1).collect();
            let g2: Vec<f64> = data.iter().map(|d| d.2).collect();
            let perm: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
            let apply = |v: &[f64]| perm.iter().map(|&p| v[p]).collect::<Vec<f64>>();
            let cfg = AdamConfig::default();

            let mut a = theta0.clone();
            let mut sa = AdamState::new(n);
            let mut b = apply(&theta0);
            let mut sb = AdamState::new(n);
            for g in [&g1, &g2] {
                adam_step(&mut sa, g, &cfg, &mut a).unwrap();
                adam_step(&mut sb, &apply(g), &cfg, &mut b).unwrap();
            }
            prop_assert_eq!(apply(&a), b);
        }
    }
}
