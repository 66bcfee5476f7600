use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::OptimError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LbfgsConfig {
    pub memory: usize,
    pub max_iters: usize,
    pub gradient_tolerance: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Default for LbfgsConfig {
    fn default() -> Self {
        LbfgsConfig {
            memory: 10,
            max_iters: 2000,
            gradient_tolerance: 1e-9,
            c1: 1e-4,
            c2: 0.9,
        }
    }
}

impl LbfgsConfig {
    pub fn validate(&self) -> Result<(), OptimError> {
        if self.memory == 0 {
            return Err(OptimError::InvalidConfig("lbfgs.memory must be at least 1".into()));
        }
        if !(0.0 < self.c1 && self.c1 < self.c2 && self.c2 < 1.0) {
            return Err(OptimError::InvalidConfig(
                "lbfgs Wolfe constants need 0 < c1 < c2 < 1".into(),
            ));
        }
        if !(self.gradient_tolerance >= 0.0) {
            return Err(OptimError::InvalidConfig(
                "lbfgs.gradient_tolerance must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

pub const MAX_LINE_SEARCH_TRIALS: usize = 40;
const CURVATURE_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LbfgsStatus {
    Converged,
    MaxIters,
    LineSearchFailed,
    NonFinite,
}

/// Objective value, gradient and an arbitrary payload carried along for the
/// caller (the loss breakdown during training).
#[derive(Debug, Clone)]
pub struct Evaluation<I> {
    pub f: f64,
    pub grad: Vec<f64>,
    pub info: I,
}

#[derive(Debug, Clone)]
pub struct LbfgsIter<I> {
    /// 1-based count of accepted steps.
    pub iter: usize,
    pub f: f64,
    pub grad_norm: f64,
    pub step: f64,
    pub evaluations: usize,
    pub info: I,
}

#[derive(Debug, Clone)]
pub struct LbfgsResult<I> {
    pub theta: Vec<f64>,
    pub f: f64,
    pub grad: Vec<f64>,
    pub info: I,
    pub status: LbfgsStatus,
    pub iterations: usize,
    pub evaluations: usize,
    pub history: Vec<LbfgsIter<I>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

struct Pair {
    s: Vec<f64>,
    y: Vec<f64>,
    rho: f64,
}

/// `-H g` from the stored curvature pairs, oldest first in `pairs`.
fn two_loop(pairs: &VecDeque<Pair>, g: &[f64]) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alpha = vec![0.0; pairs.len()];
    for (i, p) in pairs.iter().enumerate().rev() {
        alpha[i] = p.rho * dot(&p.s, &q);
        q.iter_mut().zip(&p.y).for_each(|(qj, yj)| *qj -= alpha[i] * yj);
    }
    if let Some(last) = pairs.back() {
        let gamma = dot(&last.s, &last.y) / dot(&last.y, &last.y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for (i, p) in pairs.iter().enumerate() {
        let beta = p.rho * dot(&p.y, &q);
        q.iter_mut()
            .zip(&p.s)
            .for_each(|(qj, sj)| *qj += (alpha[i] - beta) * sj);
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

struct Trial<I> {
    alpha: f64,
    f: f64,
    dphi: f64,
    eval: Option<Evaluation<I>>,
}

impl<I> Trial<I> {
    fn finite(&self) -> bool {
        self.f.is_finite() && self.dphi.is_finite()
    }
}

/// Minimizer of the cubic through two trial points, or `None` when the
/// interpolant has no usable minimum.
fn cubic_min(a: f64, fa: f64, ga: f64, b: f64, fb: f64, gb: f64) -> Option<f64> {
    let d1 = ga + gb - 3.0 * (fa - fb) / (a - b);
    let disc = d1 * d1 - ga * gb;
    if !(disc >= 0.0) {
        return None;
    }
    let d2 = (b - a).signum() * disc.sqrt();
    let x = b - (b - a) * (gb + d2 - d1) / (gb - ga + 2.0 * d2);
    x.is_finite().then_some(x)
}

struct LineSearch<'a, I, F> {
    f_and_grad: &'a mut F,
    x: &'a [f64],
    d: &'a [f64],
    f0: f64,
    dphi0: f64,
    c1: f64,
    c2: f64,
    trials: usize,
    best: Option<Trial<I>>,
}

impl<I: Clone, F> LineSearch<'_, I, F>
where
    F: FnMut(&[f64]) -> Result<Evaluation<I>, OptimError>,
{
    fn eval(&mut self, alpha: f64) -> Result<Trial<I>, OptimError> {
        self.trials += 1;
        let xt: Vec<f64> = self.x.iter().zip(self.d).map(|(x, d)| x + alpha * d).collect();
        let e = (self.f_and_grad)(&xt)?;
        let dphi = dot(&e.grad, self.d);
        let trial = Trial {
            alpha,
            f: e.f,
            dphi,
            eval: Some(e),
        };
        let armijo = trial.finite() && trial.f <= self.f0 + self.c1 * alpha * self.dphi0;
        if armijo && self.best.as_ref().is_none_or(|b| trial.f < b.f) {
            self.best = Some(Trial {
                alpha,
                f: trial.f,
                dphi,
                eval: trial.eval.clone(),
            });
        }
        Ok(trial)
    }

    fn exhausted(&self) -> bool {
        self.trials >= MAX_LINE_SEARCH_TRIALS
    }

    fn strong_wolfe(&self, t: &Trial<I>) -> bool {
        t.dphi.abs() <= -self.c2 * self.dphi0
    }

    fn sufficient(&self, t: &Trial<I>) -> bool {
        t.finite() && t.f <= self.f0 + self.c1 * t.alpha * self.dphi0
    }

    /// Strong-Wolfe bracketing phase. `Ok(Some)` is an acceptable step,
    /// `Ok(None)` means the trial budget ran out.
    fn run(&mut self, alpha_init: f64) -> Result<Option<Trial<I>>, OptimError> {
        let mut prev = Trial {
            alpha: 0.0,
            f: self.f0,
            dphi: self.dphi0,
            eval: None,
        };
        let mut alpha = alpha_init;
        let mut first = true;
        while !self.exhausted() {
            let cur = self.eval(alpha)?;
            if !cur.finite() {
                // step into a region where the objective blows up; back off
                alpha = 0.5 * (prev.alpha + alpha);
                continue;
            }
            if !self.sufficient(&cur) || (!first && cur.f >= prev.f) {
                return self.zoom(prev, cur);
            }
            if self.strong_wolfe(&cur) {
                return Ok(Some(cur));
            }
            if cur.dphi >= 0.0 {
                return self.zoom(cur, prev);
            }
            first = false;
            prev = cur;
            alpha *= 2.0;
        }
        Ok(None)
    }

    fn zoom(&mut self, mut lo: Trial<I>, mut hi: Trial<I>) -> Result<Option<Trial<I>>, OptimError> {
        while !self.exhausted() {
            let (a, b) = (lo.alpha.min(hi.alpha), lo.alpha.max(hi.alpha));
            let width = b - a;
            if width <= f64::EPSILON * b.max(1.0) {
                break;
            }
            let guess = if hi.finite() {
                cubic_min(lo.alpha, lo.f, lo.dphi, hi.alpha, hi.f, hi.dphi)
            } else {
                None
            };
            let alpha = match guess {
                Some(x) if x >= a + 0.1 * width && x <= b - 0.1 * width => x,
                _ => 0.5 * (a + b),
            };
            let cur = self.eval(alpha)?;
            if !self.sufficient(&cur) || cur.f >= lo.f {
                hi = cur;
            } else {
                if self.strong_wolfe(&cur) {
                    return Ok(Some(cur));
                }
                if cur.dphi * (hi.alpha - lo.alpha) >= 0.0 {
                    hi = lo;
                }
                lo = cur;
            }
        }
        Ok(None)
    }
}

/// Limited-memory BFGS with a strong-Wolfe line search.
pub fn lbfgs_minimize<I, F>(f_and_grad: F, theta0: Vec<f64>, cfg: &LbfgsConfig) -> Result<LbfgsResult<I>, OptimError>
where
    I: Clone,
    F: FnMut(&[f64]) -> Result<Evaluation<I>, OptimError>,
{
    lbfgs_minimize_with(f_and_grad, theta0, cfg, |_, _| {})
}

/// As [`lbfgs_minimize`], calling `observer` with each accepted step and
/// the point it reached.
pub fn lbfgs_minimize_with<I, F, O>(
    mut f_and_grad: F,
    theta0: Vec<f64>,
    cfg: &LbfgsConfig,
    mut observer: O,
) -> Result<LbfgsResult<I>, OptimError>
where
    I: Clone,
    F: FnMut(&[f64]) -> Result<Evaluation<I>, OptimError>,
    O: FnMut(&LbfgsIter<I>, &[f64]),
{
    cfg.validate()?;
    let mut x = theta0;
    let first = f_and_grad(&x)?;
    if first.grad.len() != x.len() {
        return Err(OptimError::Dimension {
            expected: x.len(),
            got: first.grad.len(),
        });
    }
    let mut evaluations = 1;
    let Evaluation {
        mut f,
        mut grad,
        mut info,
    } = first;
    let result = |x, f, grad, info, status, iterations, evaluations, history| LbfgsResult {
        theta: x,
        f,
        grad,
        info,
        status,
        iterations,
        evaluations,
        history,
    };
    if !f.is_finite() || grad.iter().any(|g| !g.is_finite()) {
        return Ok(result(
            x,
            f,
            grad,
            info,
            LbfgsStatus::NonFinite,
            0,
            evaluations,
            Vec::new(),
        ));
    }

    let mut pairs: VecDeque<Pair> = VecDeque::with_capacity(cfg.memory);
    let mut history = Vec::new();
    let mut retried = false;
    let mut status = LbfgsStatus::MaxIters;
    let mut iter = 0;
    while iter < cfg.max_iters {
        let gnorm = norm(&grad);
        if gnorm <= cfg.gradient_tolerance {
            status = LbfgsStatus::Converged;
            break;
        }
        let mut d = two_loop(&pairs, &grad);
        let mut dphi0 = dot(&grad, &d);
        if !(dphi0 < 0.0) {
            pairs.clear();
            d = grad.iter().map(|g| -g).collect();
            dphi0 = -gnorm * gnorm;
        }
        let alpha_init = if pairs.is_empty() { (1.0 / gnorm).min(1.0) } else { 1.0 };

        let mut ls = LineSearch {
            f_and_grad: &mut f_and_grad,
            x: &x,
            d: &d,
            f0: f,
            dphi0,
            c1: cfg.c1,
            c2: cfg.c2,
            trials: 0,
            best: None,
        };
        let found = ls.run(alpha_init)?;
        evaluations += ls.trials;
        let (accepted, failed) = match found {
            Some(t) => (Some(t), false),
            None => (ls.best.take().filter(|b| b.f < f), true),
        };

        if let Some(t) = accepted {
            let e = t.eval.expect("accepted trial carries its evaluation");
            let x_new: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + t.alpha * di).collect();
            let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = e.grad.iter().zip(&grad).map(|(a, b)| a - b).collect();
            let sy = dot(&s, &y);
            if sy > CURVATURE_GUARD * norm(&s) * norm(&y) {
                if pairs.len() == cfg.memory {
                    pairs.pop_front();
                }
                pairs.push_back(Pair { s, y, rho: 1.0 / sy });
            }
            x = x_new;
            f = e.f;
            grad = e.grad;
            info = e.info;
            iter += 1;
            let rec = LbfgsIter {
                iter,
                f,
                grad_norm: norm(&grad),
                step: t.alpha,
                evaluations,
                info: info.clone(),
            };
            observer(&rec, &x);
            history.push(rec);
        }
        if failed {
            if !retried && !pairs.is_empty() {
                retried = true;
                pairs.clear();
                continue;
            }
            status = LbfgsStatus::LineSearchFailed;
            break;
        }
        retried = false;
    }
    if status == LbfgsStatus::MaxIters && norm(&grad) <= cfg.gradient_tolerance {
        status = LbfgsStatus::Converged;
    }
    Ok(result(x, f, grad, info, status, iter, evaluations, history))
}
