//! Dice, GAP, ratio and combined losses with analytic gradients.

use thiserror::Error;

use crate::labels::LabelBundle;
use crate::raster::{BinaryGrid, Grid, RasterError, SoftGrid};

/// Lower clamp applied to distance predictions before taking logs.
pub const MIN_DISTANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LossError {
    #[error(transparent)]
    Raster(#[from] RasterError),
    #[error("ground-truth distance must be positive, got {0}")]
    NonPositiveInput(f64),
    #[error("expected {expected} center predictions, got {found}")]
    CenterCountMismatch { expected: usize, found: usize },
}

/// Model outputs for one image.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub cm: SoftGrid,
    pub gap: SoftGrid,
    /// One PMD per supervised center, in [`LabelBundle::supervised_centers`] order.
    pub pmd: Vec<f64>,
    /// Eight ray distances per supervised center.
    pub rd: Vec<[f64; 8]>,
}

impl Prediction {
    /// The prediction that reproduces `labels` exactly.
    pub fn perfect(labels: &LabelBundle) -> Self {
        Self {
            cm: SoftGrid::from_binary(&labels.cm),
            gap: SoftGrid::from_binary(&labels.gap),
            pmd: labels.supervised_centers().map(|c| c.pmd).collect(),
            rd: labels.supervised_centers().map(|c| c.ray_distances).collect(),
        }
    }
}

/// Weights of the four loss terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossWeights {
    pub cm: f64,
    pub gap: f64,
    pub pmd: f64,
    pub rd: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            cm: 0.25,
            gap: 0.25,
            pmd: 0.25,
            rd: 0.25,
        }
    }
}

/// Derivatives of the total loss with respect to each prediction value.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub cm: Grid<f64>,
    pub gap: Grid<f64>,
    pub pmd: Vec<f64>,
    pub rd: Vec<[f64; 8]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossReport {
    pub l_cm: f64,
    pub l_gap: f64,
    pub l_pmd: f64,
    pub l_rd: f64,
    pub total: f64,
    pub grad: Gradients,
}

/// Smoothed soft dice loss `1 - (2 sum(p g) + 1) / (sum p + sum g + 1)` and
/// its gradient with respect to every cell of `pred`.
pub fn dice_loss(pred: &SoftGrid, gt: &BinaryGrid) -> Result<(f64, Grid<f64>), LossError> {
    pred.grid().check_dims(gt)?;
    let (mut inter, mut sp, mut sg) = (0.0, 0.0, 0.0);
    for (&p, &g) in pred.cells().iter().zip(gt.cells()) {
        let g = if g { 1.0 } else { 0.0 };
        inter += p * g;
        sp += p;
        sg += g;
    }
    let num = 2.0 * inter + 1.0;
    let den = sp + sg + 1.0;
    let value = 1.0 - num / den;
    let den2 = den * den;
    let grad = gt.map(|g| {
        let g = if g { 1.0 } else { 0.0 };
        -(2.0 * g * den - num) / den2
    });
    Ok((value, grad))
}

/// Keeps `pred` where `gt` is set and zeroes it elsewhere.
pub fn gap_valid(pred: &SoftGrid, gt: &BinaryGrid) -> Result<SoftGrid, LossError> {
    pred.grid().check_dims(gt)?;
    let cells = pred
        .cells()
        .iter()
        .zip(gt.cells())
        .map(|(&p, &g)| if g { p } else { 0.0 })
        .collect();
    Ok(SoftGrid::from_vec(gt.height(), gt.width(), cells)?)
}

/// `ln(max(p, g) / min(p, g))` and its derivative with respect to `p`.
///
/// `p` is clamped to at least [`MIN_DISTANCE`]; the derivative is zero where
/// the clamp is active and at `p == g`.
pub fn ratio_loss(p: f64, g: f64) -> Result<(f64, f64), LossError> {
    if !(g > 0.0) || !g.is_finite() {
        return Err(LossError::NonPositiveInput(g));
    }
    let clamped = !(p >= MIN_DISTANCE);
    let p = if clamped { MIN_DISTANCE } else { p };
    let (hi, lo) = if p >= g { (p, g) } else { (g, p) };
    let value = (hi / lo).ln();
    let d = if clamped || p == g {
        0.0
    } else if p > g {
        1.0 / p
    } else {
        -1.0 / p
    };
    Ok((value, d))
}

/// Weighted sum of the four terms with gradients for every prediction value.
pub fn total_loss(
    pred: &Prediction,
    labels: &LabelBundle,
    w: &LossWeights,
) -> Result<LossReport, LossError> {
    let (l_cm, g_cm) = dice_loss(&pred.cm, &labels.cm)?;
    let masked = gap_valid(&pred.gap, &labels.gap)?;
    let (l_gap, g_masked) = dice_loss(&masked, &labels.gap)?;
    // d(masked_i)/d(pred_i) is 1 on the valid region and 0 elsewhere.
    let g_gap = Grid::from_vec(
        labels.gap.height(),
        labels.gap.width(),
        g_masked
            .cells()
            .iter()
            .zip(labels.gap.cells())
            .map(|(&d, &v)| if v { d } else { 0.0 })
            .collect(),
    )?;

    let n = labels.supervised_count();
    if pred.pmd.len() != n || pred.rd.len() != n {
        return Err(LossError::CenterCountMismatch {
            expected: n,
            found: pred.pmd.len().min(pred.rd.len()),
        });
    }
    let mut l_pmd = 0.0;
    let mut l_rd = 0.0;
    let mut g_pmd = vec![0.0; n];
    let mut g_rd = vec![[0.0; 8]; n];
    if n > 0 {
        let inv = 1.0 / n as f64;
        for (i, c) in labels.supervised_centers().enumerate() {
            let (v, d) = ratio_loss(pred.pmd[i], c.pmd)?;
            l_pmd += v * inv;
            g_pmd[i] = w.pmd * d * inv;
            for k in 0..8 {
                let (v, d) = ratio_loss(pred.rd[i][k], c.ray_distances[k])?;
                l_rd += v * inv / 8.0;
                g_rd[i][k] = w.rd * d * inv / 8.0;
            }
        }
    }

    let total = w.cm * l_cm + w.gap * l_gap + w.pmd * l_pmd + w.rd * l_rd;
    Ok(LossReport {
        l_cm,
        l_gap,
        l_pmd,
        l_rd,
        total,
        grad: Gradients {
            cm: g_cm.map(|d| w.cm * d),
            gap: g_gap.map(|d| w.gap * d),
            pmd: g_pmd,
            rd: g_rd,
        },
    })
}
