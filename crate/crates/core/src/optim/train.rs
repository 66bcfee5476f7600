use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{adam_step, lbfgs_minimize_with, AdamConfig, AdamState, Evaluation, LbfgsConfig, LbfgsStatus, OptimError};
use crate::net::NetworkParams;
use crate::physics::{LossProblem, LossReport, MaterialModel};
use crate::sampling::CollocationSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Adam,
    Lbfgs,
}

impl Phase {
    pub fn name(&self) -> &'static str {
        match self {
            Phase::Adam => "adam",
            Phase::Lbfgs => "lbfgs",
        }
    }
}

/// Loss at the parameters an iteration started from (Adam) or arrived at
/// (L-BFGS), with wall-clock milliseconds since training began.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterRecord {
    pub iter: usize,
    pub phase: Phase,
    pub loss: LossReport,
    pub ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    pub records: Vec<IterRecord>,
    pub adam_iters: usize,
    pub lbfgs_iters: usize,
    pub lbfgs_status: Option<LbfgsStatus>,
    /// Loss at the returned parameters.
    pub final_loss: LossReport,
    pub total_ms: f64,
}

impl TrainHistory {
    pub fn phase_changes(&self) -> usize {
        self.records.windows(2).filter(|w| w[0].phase != w[1].phase).count()
    }
}

/// Adam for `adam.max_iters` full-batch steps, then L-BFGS.
pub fn train(
    params: NetworkParams,
    model: &MaterialModel,
    set: &CollocationSet,
    adam: &AdamConfig,
    lbfgs: &LbfgsConfig,
) -> Result<(NetworkParams, TrainHistory), OptimError> {
    train_with(params, model, set, adam, lbfgs, |_, _| {})
}

/// As [`train`], handing every record and the parameters it was measured at
/// to `observer`.
pub fn train_with<O>(
    params: NetworkParams,
    model: &MaterialModel,
    set: &CollocationSet,
    adam: &AdamConfig,
    lbfgs: &LbfgsConfig,
    mut observer: O,
) -> Result<(NetworkParams, TrainHistory), OptimError>
where
    O: FnMut(&IterRecord, &NetworkParams),
{
    adam.validate()?;
    lbfgs.validate()?;
    let problem = LossProblem::new(model, set)?;
    let start = Instant::now();
    let ms = |start: &Instant| start.elapsed().as_secs_f64() * 1e3;
    let mut records = Vec::with_capacity(adam.max_iters + lbfgs.max_iters);
    let mut iter = 0;

    let mut params = params;
    let mut theta = params.to_flat();
    let mut state = AdamState::new(theta.len());
    for _ in 0..adam.max_iters {
        let (loss, grad) = problem.loss_and_grad(&params)?;
        if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(OptimError::NonFiniteLoss {
                iter,
                phase: Phase::Adam,
                last_finite: Box::new(params),
            });
        }
        let rec = IterRecord {
            iter,
            phase: Phase::Adam,
            loss,
            ms: ms(&start),
        };
        observer(&rec, &params);
        records.push(rec);
        iter += 1;
        adam_step(&mut state, &grad, adam, &mut theta)?;
        params = match params.with_flat(&theta) {
            Ok(next) => next,
            Err(_) => {
                return Err(OptimError::NonFiniteLoss {
                    iter,
                    phase: Phase::Adam,
                    last_finite: Box::new(params),
                })
            }
        };
    }
    let adam_iters = records.len();

    let mut lbfgs_status = None;
    if lbfgs.max_iters > 0 {
        let template = params.clone();
        let objective = |x: &[f64]| -> Result<Evaluation<LossReport>, OptimError> {
            let p = template.with_flat(x)?;
            let (loss, grad) = problem.loss_and_grad(&p)?;
            Ok(Evaluation {
                f: loss.total,
                grad,
                info: loss,
            })
        };
        let first = iter;
        let result = lbfgs_minimize_with(objective, params.to_flat(), lbfgs, |it, x| {
            let rec = IterRecord {
                iter: first + it.iter - 1,
                phase: Phase::Lbfgs,
                loss: it.info,
                ms: ms(&start),
            };
            if let Ok(p) = template.with_flat(x) {
                observer(&rec, &p);
            }
            records.push(rec);
        })?;
        if result.status == LbfgsStatus::NonFinite {
            return Err(OptimError::NonFiniteLoss {
                iter,
                phase: Phase::Lbfgs,
                last_finite: Box::new(params),
            });
        }
        iter += result.iterations;
        params = params.with_flat(&result.theta)?;
        lbfgs_status = Some(result.status);
    }
    let lbfgs_iters = records.len() - adam_iters;
    debug_assert_eq!(iter, records.len());

    let final_loss = problem.evaluate(&params);
    Ok((
        params,
        TrainHistory {
            records,
            adam_iters,
            lbfgs_iters,
            lbfgs_status,
            final_loss,
            total_ms: ms(&start),
        },
    ))
}
