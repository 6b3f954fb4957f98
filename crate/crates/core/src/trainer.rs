//! Desk-scale optimizer: predictions are free parameters (grid logits and
//! log-distances) fitted to a label bundle by gradient descent.

use std::io::{self, Write};
use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::labels::LabelBundle;
use crate::losses::{total_loss, LossError, LossReport, LossWeights, Prediction};
use crate::raster::{Grid, SoftGrid};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrainError {
    #[error("loss became non-finite at step {step}")]
    Diverged { step: usize },
    #[error("label bundle has no supervised instance")]
    EmptyLabels,
    #[error("steps must be at least 1")]
    NoSteps,
    #[error("learning rate must be positive and finite, got {0}")]
    InvalidLearningRate(f64),
    #[error("finite-difference step must be in [1e-6, 1e-3], got {0}")]
    InvalidStep(f64),
    #[error(transparent)]
    Loss(#[from] LossError),
}

/// Free parameters standing in for the network heads.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamState {
    pub cm_logits: Grid<f64>,
    pub gap_logits: Grid<f64>,
    pub log_pmd: Vec<f64>,
    pub log_rd: Vec<[f64; 8]>,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl ParamState {
    /// Logits uniform in `(-0.1, 0.1)`; distances at the mean target.
    pub fn init(labels: &LabelBundle, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (h, w) = labels.dims();
        let mut grid = || {
            let cells = (0..h * w).map(|_| rng.random_range(-0.1..0.1)).collect();
            Grid::from_vec(h, w, cells).expect("label dims")
        };
        let cm_logits = grid();
        let gap_logits = grid();
        let n = labels.supervised_count();
        let mean = |it: &mut dyn Iterator<Item = f64>, count: usize| {
            if count == 0 {
                0.0
            } else {
                (it.sum::<f64>() / count as f64).ln()
            }
        };
        let lp = mean(&mut labels.supervised_centers().map(|c| c.pmd), n);
        let lr = mean(
            &mut labels.supervised_centers().flat_map(|c| c.ray_distances),
            8 * n,
        );
        Self {
            cm_logits,
            gap_logits,
            log_pmd: vec![lp; n],
            log_rd: vec![[lr; 8]; n],
        }
    }

    /// Logits uniform in `(-2, 2)`; log-distances within ±0.5 of the target.
    pub fn random(labels: &LabelBundle, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (h, w) = labels.dims();
        let grid = |rng: &mut ChaCha8Rng| {
            let cells = (0..h * w).map(|_| rng.random_range(-2.0..2.0)).collect();
            Grid::from_vec(h, w, cells).expect("label dims")
        };
        let cm_logits = grid(&mut rng);
        let gap_logits = grid(&mut rng);
        let mut log_pmd = Vec::new();
        let mut log_rd = Vec::new();
        for c in labels.supervised_centers() {
            log_pmd.push(c.pmd.ln() + rng.random_range(-0.5..0.5));
            let mut rd = [0.0; 8];
            for (k, v) in rd.iter_mut().enumerate() {
                *v = c.ray_distances[k].ln() + rng.random_range(-0.5..0.5);
            }
            log_rd.push(rd);
        }
        Self {
            cm_logits,
            gap_logits,
            log_pmd,
            log_rd,
        }
    }

    pub fn prediction(&self) -> Prediction {
        let soft = |g: &Grid<f64>| SoftGrid::from_grid(g.map(sigmoid)).expect("sigmoid is in [0, 1]");
        Prediction {
            cm: soft(&self.cm_logits),
            gap: soft(&self.gap_logits),
            pmd: self.log_pmd.iter().map(|v| v.exp()).collect(),
            rd: self.log_rd.iter().map(|r| r.map(f64::exp)).collect(),
        }
    }

    /// Number of scalar parameters.
    pub fn len(&self) -> usize {
        2 * self.cm_logits.len() + self.log_pmd.len() + 8 * self.log_rd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get(&self, i: usize) -> f64 {
        let n = self.cm_logits.len();
        match i {
            _ if i < n => self.cm_logits.cells()[i],
            _ if i < 2 * n => self.gap_logits.cells()[i - n],
            _ if i < 2 * n + self.log_pmd.len() => self.log_pmd[i - 2 * n],
            _ => {
                let j = i - 2 * n - self.log_pmd.len();
                self.log_rd[j / 8][j % 8]
            }
        }
    }

    fn set(&mut self, i: usize, v: f64) {
        let n = self.cm_logits.len();
        let np = self.log_pmd.len();
        if i < n {
            self.cm_logits.cells_mut()[i] = v;
        } else if i < 2 * n {
            self.gap_logits.cells_mut()[i - n] = v;
        } else if i < 2 * n + np {
            self.log_pmd[i - 2 * n] = v;
        } else {
            let j = i - 2 * n - np;
            self.log_rd[j / 8][j % 8] = v;
        }
    }
}

/// Loss and its gradient with respect to every parameter, in the same layout
/// as [`ParamState`].
pub fn evaluate(
    labels: &LabelBundle,
    state: &ParamState,
    weights: &LossWeights,
) -> Result<(LossReport, ParamState), TrainError> {
    let pred = state.prediction();
    let report = total_loss(&pred, labels, weights)?;
    let chain = |dp: &Grid<f64>, p: &SoftGrid| {
        let cells = dp
            .cells()
            .iter()
            .zip(p.cells())
            .map(|(&d, &s)| d * s * (1.0 - s))
            .collect();
        Grid::from_vec(dp.height(), dp.width(), cells).expect("same dims")
    };
    let grad = ParamState {
        cm_logits: chain(&report.grad.cm, &pred.cm),
        gap_logits: chain(&report.grad.gap, &pred.gap),
        log_pmd: report.grad.pmd.iter().zip(&pred.pmd).map(|(d, p)| d * p).collect(),
        log_rd: report
            .grad
            .rd
            .iter()
            .zip(&pred.rd)
            .map(|(d, p)| std::array::from_fn(|k| d[k] * p[k]))
            .collect(),
    };
    Ok((report, grad))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub steps: usize,
    pub lr: f64,
    pub seed: u64,
    pub weights: LossWeights,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            steps: 500,
            lr: 0.5,
            seed: 0,
            weights: LossWeights::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub step: usize,
    pub l_cm: f64,
    pub l_gap: f64,
    pub l_pmd: f64,
    pub l_rd: f64,
    pub total: f64,
}

impl TraceRow {
    fn new(step: usize, r: &LossReport) -> Self {
        Self {
            step,
            l_cm: r.l_cm,
            l_gap: r.l_gap,
            l_pmd: r.l_pmd,
            l_rd: r.l_rd,
            total: r.total,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FitReport {
    /// Losses before the first step and after each step (`steps + 1` rows).
    pub trace: Vec<TraceRow>,
    pub final_report: LossReport,
    pub final_prediction: Prediction,
    pub state: ParamState,
    pub elapsed: Duration,
}

impl FitReport {
    pub fn write_trace_csv(&self, mut out: impl Write) -> io::Result<()> {
        writeln!(out, "step,l_cm,l_gap,l_pmd,l_rd,total")?;
        for r in &self.trace {
            writeln!(out, "{},{},{},{},{},{}", r.step, r.l_cm, r.l_gap, r.l_pmd, r.l_rd, r.total)?;
        }
        Ok(())
    }
}

/// Fits free predictions to `labels` by plain gradient descent.
///
/// Grid logits step by `lr * H * W * grad`: the dice gradient of one cell
/// shrinks with the grid size, so this keeps the per-cell step size-free.
/// Log-distance parameters step by `lr * grad`.
pub fn fit_direct(labels: &LabelBundle, cfg: &FitConfig) -> Result<FitReport, TrainError> {
    if labels.supervised_count() == 0 {
        return Err(TrainError::EmptyLabels);
    }
    if cfg.steps == 0 {
        return Err(TrainError::NoSteps);
    }
    if !(cfg.lr > 0.0 && cfg.lr.is_finite()) {
        return Err(TrainError::InvalidLearningRate(cfg.lr));
    }
    let start = Instant::now();
    let mut state = ParamState::init(labels, cfg.seed);
    let grid_lr = cfg.lr * state.cm_logits.len() as f64;
    let mut trace = Vec::with_capacity(cfg.steps + 1);
    let (mut report, mut grad) = evaluate(labels, &state, &cfg.weights)?;
    trace.push(TraceRow::new(0, &report));
    for step in 1..=cfg.steps {
        let descend = |p: &mut [f64], g: &[f64], lr: f64| p.iter_mut().zip(g).for_each(|(p, g)| *p -= lr * g);
        descend(state.cm_logits.cells_mut(), grad.cm_logits.cells(), grid_lr);
        descend(state.gap_logits.cells_mut(), grad.gap_logits.cells(), grid_lr);
        descend(&mut state.log_pmd, &grad.log_pmd, cfg.lr);
        for (p, g) in state.log_rd.iter_mut().zip(&grad.log_rd) {
            descend(p, g, cfg.lr);
        }
        (report, grad) = evaluate(labels, &state, &cfg.weights).map_err(|e| match e {
            TrainError::Loss(_) => TrainError::Diverged { step },
            other => other,
        })?;
        if !report.total.is_finite() {
            return Err(TrainError::Diverged { step });
        }
        trace.push(TraceRow::new(step, &report));
    }
    Ok(FitReport {
        trace,
        final_prediction: state.prediction(),
        final_report: report,
        state,
        elapsed: start.elapsed(),
    })
}

/// Outcome of a finite-difference gradient check.
#[derive(Debug, Clone, PartialEq)]
pub struct GradCheck {
    pub max_rel_error: f64,
    /// Parameters compared.
    pub checked: usize,
    /// Distance parameters skipped because they sit near the ratio-loss kink.
    pub skipped_kinks: usize,
}

/// Compares analytic gradients against central differences with step `h` on
/// a random subset of up to 64 parameters.
///
/// Relative error is `|a - n| / max(|a|, |n|, 1e-8)`. Distance parameters
/// with `|ln p - ln g| < 1e-3` are excluded, since the ratio loss has a kink
/// at `p = g`.
pub fn grad_check(
    labels: &LabelBundle,
    state: &ParamState,
    h: f64,
    weights: &LossWeights,
    seed: u64,
) -> Result<GradCheck, TrainError> {
    if !(1e-6..=1e-3).contains(&h) {
        return Err(TrainError::InvalidStep(h));
    }
    let (_, grad) = evaluate(labels, state, weights)?;
    let n_grid = 2 * state.cm_logits.len();
    let targets: Vec<f64> = labels
        .supervised_centers()
        .map(|c| c.pmd.ln())
        .chain(labels.supervised_centers().flat_map(|c| c.ray_distances.map(f64::ln)))
        .collect();
    // Targets are laid out pmd-first then rd, matching the parameter order.
    let near_kink = |i: usize| i >= n_grid && (state.get(i) - targets[i - n_grid]).abs() < 1e-3;
    let eligible: Vec<usize> = (0..state.len()).filter(|&i| !near_kink(i)).collect();
    let skipped_kinks = state.len() - eligible.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = sample(&mut rng, eligible.len(), eligible.len().min(64));
    let mut max_rel: f64 = 0.0;
    let mut probe = state.clone();
    for k in picks.iter() {
        let i = eligible[k];
        let x = state.get(i);
        probe.set(i, x + h);
        let fp = evaluate(labels, &probe, weights)?.0.total;
        probe.set(i, x - h);
        let fm = evaluate(labels, &probe, weights)?.0.total;
        probe.set(i, x);
        let num = (fp - fm) / (2.0 * h);
        let an = grad.get(i);
        let rel = (an - num).abs() / an.abs().max(num.abs()).max(1e-8);
        max_rel = max_rel.max(rel);
    }
    Ok(GradCheck {
        max_rel_error: max_rel,
        checked: picks.len(),
        skipped_kinks,
    })
}
