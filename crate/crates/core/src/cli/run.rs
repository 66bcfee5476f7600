use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use super::output::{convergence_csv, fields_csv, fields_vtk, num, profile_csv, samples_csv, timing_csv};
use super::{CliError, ConfigDocument, RunConfig};
use crate::bench::{evaluate_case, flux_profile, CaseEvaluation, ErrorMetric, EvalGrid};
use crate::net::{init_params, ActivationKind, NetworkParams, NetworkSpec};
use crate::optim::{train_with, LbfgsStatus, TrainHistory};
use crate::physics::{attach_case_bcs, LossReport};
use crate::sampling::{sample_domain, CollocationSet, SamplerKind};

pub const LOCK_FILE: &str = ".dcm.lock";
const PROFILE_SAMPLES: usize = 101;

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Suppress progress lines on stderr.
    pub quiet: bool,
}

/// Claims an output directory for one run. Files written through it are
/// deleted again unless [`OutputDir::commit`] is called.
struct OutputDir {
    path: PathBuf,
    written: Vec<PathBuf>,
    committed: bool,
}

impl OutputDir {
    fn claim(path: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(path).map_err(|e| CliError::io(path, e))?;
        let lock = path.join(LOCK_FILE);
        match fs::OpenOptions::new().write(true).create_new(true).open(&lock) {
            Ok(_) => Ok(OutputDir {
                path: path.to_path_buf(),
                written: Vec::new(),
                committed: false,
            }),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(CliError::Locked(path.to_path_buf())),
            Err(e) => Err(CliError::io(&lock, e)),
        }
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let file = self.path.join(name);
        fs::write(&file, contents).map_err(|e| CliError::io(&file, e))?;
        self.written.push(file);
        Ok(())
    }

    fn names(&self) -> Vec<String> {
        self.written
            .iter()
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect()
    }

    fn commit(mut self) {
        self.committed = true;
    }
}

impl Drop for OutputDir {
    fn drop(&mut self) {
        if !self.committed {
            for f in &self.written {
                let _ = fs::remove_file(f);
            }
        }
        let _ = fs::remove_file(self.path.join(LOCK_FILE));
    }
}

/// Collocation points of the configured case with boundary data attached.
pub fn collocation_set(cfg: &RunConfig) -> Result<CollocationSet, CliError> {
    let geometry = cfg.case.geometry();
    let raw = sample_domain(cfg.sampler, geometry, cfg.n_interior, cfg.n_per_face)?;
    Ok(attach_case_bcs(cfg.case, raw)?)
}

pub fn network_spec(cfg: &RunConfig) -> NetworkSpec {
    NetworkSpec::scalar_field(cfg.hidden_widths.clone(), cfg.activation, cfg.seed)
}

/// In-memory result of sampling, training and evaluating one config.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub set: CollocationSet,
    pub params: NetworkParams,
    pub history: TrainHistory,
    pub evaluation: CaseEvaluation,
    pub wall_clock_s: f64,
}

/// Samples, trains and evaluates without touching the file system.
pub fn execute(cfg: &RunConfig, opts: RunOptions) -> Result<RunOutcome, CliError> {
    cfg.validate()?;
    let start = Instant::now();
    let set = collocation_set(cfg)?;
    let params = init_params(&network_spec(cfg))?;
    let (params, history) = train_with(params, &cfg.case.material(), &set, &cfg.adam, &cfg.lbfgs, |rec, _| {
        if !opts.quiet && rec.iter % 100 == 0 {
            eprintln!(
                "[{}] {:>5} {:<5} total {:.4e}  pde {:.3e}  dirichlet {:.3e}  neumann {:.3e}",
                cfg.case,
                rec.iter,
                rec.phase.name(),
                rec.loss.total,
                rec.loss.mse_g,
                rec.loss.mse_d,
                rec.loss.mse_n
            );
        }
    })?;
    let evaluation = evaluate_case(cfg.case, &params, EvalGrid::for_case(cfg.case, cfg.eval_grid)?)?;
    Ok(RunOutcome {
        set,
        params,
        history,
        evaluation,
        wall_clock_s: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub case: String,
    pub final_loss: LossReport,
    pub relative_error: f64,
    pub metric: ErrorMetric,
    pub adam_iters: usize,
    pub lbfgs_iters: usize,
    pub lbfgs_status: Option<LbfgsStatus>,
    pub wall_clock_s: f64,
    pub config: ConfigDocument,
    pub files: Vec<String>,
}

/// Full run: writes `config.toml`, `convergence.csv`, `timing.csv`,
/// `fields.csv`, `fields.vtk`, `profile.csv`, `params.txt` and
/// `summary.json` into `cfg.output_dir`.
pub fn run_train(cfg: &RunConfig, opts: RunOptions) -> Result<RunSummary, CliError> {
    cfg.validate()?;
    let mut out = OutputDir::claim(&cfg.output_dir)?;
    out.write("config.toml", &cfg.to_toml())?;
    let outcome = execute(cfg, opts)?;
    let profile = flux_profile(cfg.case, &outcome.params, cfg.case.default_profile(), PROFILE_SAMPLES)?;
    out.write("convergence.csv", &convergence_csv(&outcome.history))?;
    out.write("timing.csv", &timing_csv(&outcome.history))?;
    out.write("fields.csv", &fields_csv(&outcome.evaluation))?;
    out.write("fields.vtk", &fields_vtk(&outcome.evaluation))?;
    out.write("profile.csv", &profile_csv(&profile))?;
    out.write("params.txt", &outcome.params.to_snapshot())?;
    let mut summary = RunSummary {
        case: cfg.case.name().to_string(),
        final_loss: outcome.history.final_loss,
        relative_error: outcome.evaluation.metric.relative_error,
        metric: outcome.evaluation.metric,
        adam_iters: outcome.history.adam_iters,
        lbfgs_iters: outcome.history.lbfgs_iters,
        lbfgs_status: outcome.history.lbfgs_status,
        wall_clock_s: outcome.wall_clock_s,
        config: ConfigDocument::from(cfg),
        files: Vec::new(),
    };
    summary.files = out.names();
    summary.files.push("summary.json".to_string());
    let json = serde_json::to_string_pretty(&summary).map_err(|e| CliError::Invalid(e.to_string()))?;
    out.write("summary.json", &json)?;
    out.commit();
    Ok(summary)
}

/// Writes the collocation set as `samples.csv` and returns its path.
pub fn run_sample(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    cfg.validate()?;
    let set = collocation_set(cfg)?;
    let mut out = OutputDir::claim(&cfg.output_dir)?;
    out.write("samples.csv", &samples_csv(&set))?;
    out.commit();
    Ok(cfg.output_dir.join("samples.csv"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationSummary {
    pub case: String,
    pub metric: ErrorMetric,
    pub grid: EvalGrid,
    pub files: Vec<String>,
}

/// Evaluates a saved parameter snapshot against the configured case.
pub fn run_evaluate(cfg: &RunConfig, snapshot: &Path) -> Result<EvaluationSummary, CliError> {
    cfg.validate()?;
    let text = fs::read_to_string(snapshot).map_err(|e| CliError::io(snapshot, e))?;
    let params = NetworkParams::from_snapshot(&text)?;
    let evaluation = evaluate_case(cfg.case, &params, EvalGrid::for_case(cfg.case, cfg.eval_grid)?)?;
    let profile = flux_profile(cfg.case, &params, cfg.case.default_profile(), PROFILE_SAMPLES)?;
    let mut out = OutputDir::claim(&cfg.output_dir)?;
    out.write("fields.csv", &fields_csv(&evaluation))?;
    out.write("fields.vtk", &fields_vtk(&evaluation))?;
    out.write("profile.csv", &profile_csv(&profile))?;
    let mut summary = EvaluationSummary {
        case: cfg.case.name().to_string(),
        metric: evaluation.metric,
        grid: evaluation.grid,
        files: out.names(),
    };
    summary.files.push("evaluation.json".to_string());
    let json = serde_json::to_string_pretty(&summary).map_err(|e| CliError::Invalid(e.to_string()))?;
    out.write("evaluation.json", &json)?;
    out.commit();
    Ok(summary)
}

/// Configuration axis swept by [`run_matrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VaryAxis {
    Activation,
    Sampler,
    Depth,
    NInterior,
    NPerFace,
    Schedule,
}

impl VaryAxis {
    pub const ALL: [VaryAxis; 6] = [
        VaryAxis::Activation,
        VaryAxis::Sampler,
        VaryAxis::Depth,
        VaryAxis::NInterior,
        VaryAxis::NPerFace,
        VaryAxis::Schedule,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            VaryAxis::Activation => "activation",
            VaryAxis::Sampler => "sampler",
            VaryAxis::Depth => "depth",
            VaryAxis::NInterior => "n_interior",
            VaryAxis::NPerFace => "n_per_face",
            VaryAxis::Schedule => "schedule",
        }
    }
}

impl fmt::Display for VaryAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VaryAxis {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        let key = match key.as_str() {
            "optimizer" | "optimizer_schedule" => "schedule",
            other => other,
        };
        VaryAxis::ALL.into_iter().find(|a| a.name() == key).ok_or_else(|| {
            CliError::Config(super::ConfigError {
                key: "vary".into(),
                message: format!("unknown axis `{s}`"),
            })
        })
    }
}

/// One labelled config in a comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Variant {
    pub label: String,
    pub config: RunConfig,
}

/// Training schedules compared under a common iteration budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    Adam,
    Lbfgs,
    Combined,
}

impl Schedule {
    pub const ALL: [Schedule; 3] = [Schedule::Adam, Schedule::Lbfgs, Schedule::Combined];

    pub fn name(&self) -> &'static str {
        match self {
            Schedule::Adam => "adam",
            Schedule::Lbfgs => "lbfgs",
            Schedule::Combined => "combined",
        }
    }

    /// `base` with its total iteration budget given to one optimizer, or
    /// split as configured for `Combined`.
    pub fn apply(&self, base: &RunConfig) -> RunConfig {
        let mut cfg = base.clone();
        let budget = base.adam.max_iters + base.lbfgs.max_iters;
        match self {
            Schedule::Adam => {
                cfg.adam.max_iters = budget;
                cfg.lbfgs.max_iters = 0;
            }
            Schedule::Lbfgs => {
                cfg.adam.max_iters = 0;
                cfg.lbfgs.max_iters = budget;
            }
            Schedule::Combined => {}
        }
        cfg
    }
}

impl FromStr for Schedule {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.to_ascii_lowercase();
        Schedule::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .ok_or_else(|| CliError::Invalid(format!("unknown schedule `{s}`")))
    }
}

pub const DEFAULT_MAX_DEPTH: usize = 6;
pub const DEFAULT_INTERIOR_COUNTS: [usize; 6] = [500, 1000, 2000, 3000, 4000, 5000];
pub const DEFAULT_FACE_COUNTS: [usize; 6] = [50, 100, 200, 300, 400, 500];

fn variant(label: impl Into<String>, config: RunConfig) -> Variant {
    Variant {
        label: label.into(),
        config,
    }
}

fn parse_count(axis: VaryAxis, v: &str) -> Result<usize, CliError> {
    v.trim()
        .parse::<usize>()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Invalid(format!("{axis} value `{v}` is not a positive integer")))
}

/// Variants for `axis`: the given `values`, or the standard sweep when
/// `values` is empty.
pub fn variants(base: &RunConfig, axis: VaryAxis, values: &[String]) -> Result<Vec<Variant>, CliError> {
    let width = base.hidden_widths.first().copied().unwrap_or(30);
    let out = match axis {
        VaryAxis::Activation => {
            let kinds: Vec<ActivationKind> = if values.is_empty() {
                ActivationKind::ALL.to_vec()
            } else {
                values
                    .iter()
                    .map(|v| v.parse::<ActivationKind>())
                    .collect::<Result<_, _>>()?
            };
            kinds
                .into_iter()
                .map(|k| {
                    variant(
                        k.name(),
                        RunConfig {
                            activation: k,
                            ..base.clone()
                        },
                    )
                })
                .collect()
        }
        VaryAxis::Sampler => {
            let kinds: Vec<SamplerKind> = if values.is_empty() {
                SamplerKind::all(base.seed).to_vec()
            } else {
                values
                    .iter()
                    .map(|v| v.parse::<SamplerKind>().map(|k| k.reseeded(base.seed)))
                    .collect::<Result<_, _>>()?
            };
            kinds
                .into_iter()
                .map(|k| {
                    variant(
                        k.name(),
                        RunConfig {
                            sampler: k,
                            ..base.clone()
                        },
                    )
                })
                .collect()
        }
        VaryAxis::Depth => {
            let depths: Vec<usize> = if values.is_empty() {
                (1..=DEFAULT_MAX_DEPTH).collect()
            } else {
                values.iter().map(|v| parse_count(axis, v)).collect::<Result<_, _>>()?
            };
            depths
                .into_iter()
                .map(|d| {
                    variant(
                        d.to_string(),
                        RunConfig {
                            hidden_widths: vec![width; d],
                            ..base.clone()
                        },
                    )
                })
                .collect()
        }
        VaryAxis::NInterior | VaryAxis::NPerFace => {
            let defaults: &[usize] = if axis == VaryAxis::NInterior {
                &DEFAULT_INTERIOR_COUNTS
            } else {
                &DEFAULT_FACE_COUNTS
            };
            let counts: Vec<usize> = if values.is_empty() {
                defaults.to_vec()
            } else {
                values.iter().map(|v| parse_count(axis, v)).collect::<Result<_, _>>()?
            };
            counts
                .into_iter()
                .map(|n| {
                    let mut cfg = base.clone();
                    if axis == VaryAxis::NInterior {
                        cfg.n_interior = n;
                    } else {
                        cfg.n_per_face = n;
                    }
                    variant(n.to_string(), cfg)
                })
                .collect()
        }
        VaryAxis::Schedule => {
            let kinds: Vec<Schedule> = if values.is_empty() {
                Schedule::ALL.to_vec()
            } else {
                values.iter().map(|v| v.parse::<Schedule>()).collect::<Result<_, _>>()?
            };
            kinds.into_iter().map(|s| variant(s.name(), s.apply(base))).collect()
        }
    };
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixRow {
    pub variant: String,
    pub final_loss: LossReport,
    pub metric: ErrorMetric,
    pub adam_iters: usize,
    pub lbfgs_iters: usize,
    pub wall_clock_s: f64,
}

pub const MATRIX_HEADER: &str =
    "variant,total,mse_g,mse_d,mse_n,relative_error,l2_relative_error,max_abs_error,adam_iters,lbfgs_iters,wall_clock_s";

pub fn matrix_csv(rows: &[MatrixRow]) -> String {
    let mut out = String::from(MATRIX_HEADER);
    out.push('\n');
    for r in rows {
        let l = &r.final_loss;
        let m = &r.metric;
        let floats = [
            l.total,
            l.mse_g,
            l.mse_d,
            l.mse_n,
            m.relative_error,
            m.l2_relative_error,
            m.max_abs_error,
        ];
        let floats: Vec<String> = floats.iter().map(|&v| num(v)).collect();
        out.push_str(&format!(
            "{},{},{},{},{:.3}\n",
            r.variant,
            floats.join(","),
            r.adam_iters,
            r.lbfgs_iters,
            r.wall_clock_s
        ));
    }
    out
}

/// Trains every variant and writes `bench_<axis>.csv` into the base
/// config's output directory.
pub fn run_matrix(
    base: &RunConfig,
    axis: VaryAxis,
    variants: &[Variant],
    opts: RunOptions,
) -> Result<Vec<MatrixRow>, CliError> {
    if variants.is_empty() {
        return Err(CliError::Invalid(format!("no variants to compare along {axis}")));
    }
    let mut out = OutputDir::claim(&base.output_dir)?;
    let mut rows = Vec::with_capacity(variants.len());
    for v in variants {
        if !opts.quiet {
            eprintln!("[{axis}] variant {}", v.label);
        }
        let outcome = execute(&v.config, opts)?;
        rows.push(MatrixRow {
            variant: v.label.clone(),
            final_loss: outcome.history.final_loss,
            metric: outcome.evaluation.metric,
            adam_iters: outcome.history.adam_iters,
            lbfgs_iters: outcome.history.lbfgs_iters,
            wall_clock_s: outcome.wall_clock_s,
        });
    }
    out.write(&format!("bench_{}.csv", axis.name()), &matrix_csv(&rows))?;
    out.commit();
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optim::{AdamConfig, LbfgsConfig};

    fn tiny(dir: &Path) -> RunConfig {
        RunConfig {
            n_interior: 60,
            n_per_face: 8,
            hidden_widths: vec![5],
            adam: AdamConfig {
                max_iters: 6,
                learning_rate: 1e-2,
                ..Default::default()
            },
            lbfgs: LbfgsConfig {
                max_iters: 4,
                ..Default::default()
            },
            eval_grid: 3,
            output_dir: dir.to_path_buf(),
            ..Default::default()
        }
    }

    #[test]
    fn train_writes_every_file_and_releases_the_lock() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = tiny(dir.path());
        let summary = run_train(&cfg, RunOptions { quiet: true }).unwrap();
        for name in [
            "config.toml",
            "convergence.csv",
            "timing.csv",
            "fields.csv",
            "fields.vtk",
            "profile.csv",
            "params.txt",
            "summary.json",
        ] {
            assert!(dir.path().join(name).is_file(), "{name}");
            assert!(summary.files.iter().any(|f| f == name), "{name}");
        }
        assert!(!dir.path().join(LOCK_FILE).exists());
        assert_eq!(summary.adam_iters, 6);
        let echoed = super::super::parse_config(&fs::read_to_string(dir.path().join("config.toml")).unwrap()).unwrap();
        assert_eq!(echoed, cfg);
    }

    #[test]
    fn locked_directory_is_refused_and_left_alone() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join(LOCK_FILE), "").unwrap();
        let err = run_train(&tiny(dir.path()), RunOptions { quiet: true }).unwrap_err();
        assert!(matches!(err, CliError::Locked(_)));
        assert_eq!(err.exit_code(), 4);
        assert!(dir.path().join(LOCK_FILE).exists());
        assert!(!dir.path().join("config.toml").exists());
    }

    #[test]
    fn divergence_removes_partial_output() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = tiny(dir.path());
        cfg.adam.learning_rate = 1e200;
        cfg.adam.max_iters = 40;
        let err = run_train(&cfg, RunOptions { quiet: true }).unwrap_err();
        assert_eq!(err.exit_code(), 3, "{err}");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[test]
    fn evaluate_reproduces_the_trained_metric() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = tiny(&dir.path().join("train"));
        let trained = run_train(&cfg, RunOptions { quiet: true }).unwrap();
        let eval_cfg = RunConfig {
            output_dir: dir.path().join("eval"),
            ..cfg.clone()
        };
        let summary = run_evaluate(&eval_cfg, &cfg.output_dir.join("params.txt")).unwrap();
        assert_eq!(summary.metric, trained.metric);
        assert_eq!(
            fs::read(cfg.output_dir.join("fields.csv")).unwrap(),
            fs::read(eval_cfg.output_dir.join("fields.csv")).unwrap()
        );
    }

    #[test]
    fn sample_table_has_one_row_per_point() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = tiny(dir.path());
        let path = run_sample(&cfg).unwrap();
        let text = fs::read_to_string(path).unwrap();
        assert_eq!(text.lines().count(), 1 + 60 + 6 * 8);
    }

    #[test]
    fn default_sweeps() {
        let base = RunConfig::default();
        let count = |axis| variants(&base, axis, &[]).unwrap().len();
        assert_eq!(count(VaryAxis::Activation), 8);
        assert_eq!(count(VaryAxis::Sampler), 7);
        assert_eq!(count(VaryAxis::Depth), DEFAULT_MAX_DEPTH);
        assert_eq!(count(VaryAxis::Schedule), 3);
        let depth = variants(&base, VaryAxis::Depth, &["3".into()]).unwrap();
        assert_eq!(depth[0].config.hidden_widths, vec![30, 30, 30]);
        assert!(variants(&base, VaryAxis::NInterior, &["0".into()]).is_err());
    }

    #[test]
    fn schedules_share_one_budget() {
        let base = RunConfig::default();
        let budget = base.adam.max_iters + base.lbfgs.max_iters;
        for s in Schedule::ALL {
            let cfg = s.apply(&base);
            assert_eq!(cfg.adam.max_iters + cfg.lbfgs.max_iters, budget);
        }
        assert_eq!(Schedule::Lbfgs.apply(&base).adam.max_iters, 0);
        assert_eq!(Schedule::Adam.apply(&base).lbfgs.max_iters, 0);
    }

    #[test]
    fn axis_names_parse() {
        for a in VaryAxis::ALL {
            assert_eq!(a.name().parse::<VaryAxis>().unwrap(), a);
        }
        assert_eq!("n-interior".parse::<VaryAxis>().unwrap(), VaryAxis::NInterior);
        assert_eq!("width".parse::<VaryAxis>().unwrap_err().exit_code(), 2);
    }

    #[test]
    fn matrix_writes_one_row_per_variant() {
        let dir = tempfile::tempdir().unwrap();
        let base = tiny(dir.path());
        let vs = variants(&base, VaryAxis::Activation, &["tanh".into(), "mish".into()]).unwrap();
        let rows = run_matrix(&base, VaryAxis::Activation, &vs, RunOptions { quiet: true }).unwrap();
        assert_eq!(rows.len(), 2);
        let csv = fs::read_to_string(dir.path().join("bench_activation.csv")).unwrap();
        assert_eq!(csv.lines().next().unwrap(), MATRIX_HEADER);
        assert_eq!(csv.lines().count(), 3);
        assert!(run_matrix(&base, VaryAxis::Activation, &[], RunOptions { quiet: true }).is_err());
    }
}
