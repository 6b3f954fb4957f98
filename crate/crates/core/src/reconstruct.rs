//! Center-mask probabilities to detection polygons, and the pixel-expansion
//! baseline used for speed comparisons.

use log::warn;
use thiserror::Error;

use crate::geometry::{center_point, offset_polygon, polar_min_distance, TextPolygon, DEFAULT_MU};
use crate::raster::{
    connected_components, contour_from_predicate, extract_contour, label_runs, BinaryGrid, Component,
    Grid, RasterError, SoftGrid,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReconstructError {
    #[error("threshold must be in [0, 1], got {0}")]
    InvalidThreshold(f64),
    #[error("min_area must be at least 1")]
    InvalidMinArea,
    #[error("mu must be in (0, 1), got {0}")]
    InvalidMu(f64),
    #[error("scale must be positive and finite, got {0}")]
    InvalidScale(f64),
    #[error(transparent)]
    Raster(#[from] RasterError),
}

/// How far the kernel contour is pushed back out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExpansionMode {
    /// By the kernel's own PMD. Exact for `mu = 0.5`.
    #[default]
    Literal,
    /// By `PMD * mu / (1 - mu)`, exact for any `mu`.
    MuCorrected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructConfig {
    /// Probability at or above which a cell is kernel.
    pub threshold: f64,
    /// Components with fewer cells are dropped.
    pub min_area: usize,
    pub mu: f64,
    /// Factor from grid cells to image pixels.
    pub scale: f64,
    pub expansion: ExpansionMode,
}

impl Default for ReconstructConfig {
    fn default() -> Self {
        Self {
            threshold: 0.5,
            min_area: 16,
            mu: DEFAULT_MU,
            scale: 4.0,
            expansion: ExpansionMode::Literal,
        }
    }
}

impl ReconstructConfig {
    pub fn validate(&self) -> Result<(), ReconstructError> {
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(ReconstructError::InvalidThreshold(self.threshold));
        }
        if self.min_area == 0 {
            return Err(ReconstructError::InvalidMinArea);
        }
        if !(self.mu > 0.0 && self.mu < 1.0) {
            return Err(ReconstructError::InvalidMu(self.mu));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(ReconstructError::InvalidScale(self.scale));
        }
        Ok(())
    }

    fn expansion_distance(&self, pmd: f64) -> f64 {
        match self.expansion {
            ExpansionMode::Literal => pmd,
            ExpansionMode::MuCorrected => pmd * self.mu / (1.0 - self.mu),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    /// Polygon in image coordinates.
    pub polygon: TextPolygon,
    /// Mean kernel probability over the source component.
    pub score: f64,
}

/// Recovers text polygons from a center-mask probability grid.
///
/// Components are processed in `(min_row, min_col)` order. Components whose
/// contour or center point cannot be formed are skipped with a warning.
/// Output polygons are clipped to the image extent `grid size * scale`.
pub fn reconstruct(cm: &SoftGrid, cfg: &ReconstructConfig) -> Result<Vec<Detection>, ReconstructError> {
    cfg.validate()?;
    let (h, w) = cm.dims();
    let cells = cm.cells();
    let t = cfg.threshold;
    let comps = label_runs(h, |row, out| {
        let line = &cells[row * w..(row + 1) * w];
        let mut c = 0;
        while c < w {
            if line[c] >= t {
                let s = c;
                while c < w && line[c] >= t {
                    c += 1;
                }
                out.push((s, c));
            } else {
                c += 1;
            }
        }
    });
    let fg = |r: isize, c: isize| {
        r >= 0 && c >= 0 && (r as usize) < h && (c as usize) < w && cells[r as usize * w + c as usize] >= t
    };
    let (img_w, img_h) = (w as f64 * cfg.scale, h as f64 * cfg.scale);

    let mut out = Vec::new();
    for comp in comps.iter().filter(|c| c.area >= cfg.min_area) {
        let first = comp.runs[0];
        let sum: f64 = comp
            .runs
            .iter()
            .map(|r| cells[r.row * w + r.start..r.row * w + r.end].iter().sum::<f64>())
            .sum();
        let score = sum / comp.area as f64;
        let contour = match contour_from_predicate(fg, (first.row as isize, first.start as isize), comp.area) {
            Ok(p) => p,
            Err(e) => {
                warn!("component at ({}, {}) skipped: {e}", first.row, first.start);
                continue;
            }
        };
        let pmd = match center_point(&contour, 0.5).and_then(|cp| polar_min_distance(&contour, cp)) {
            Ok(d) => d,
            Err(e) => {
                warn!("component at ({}, {}) has no center: {e}", first.row, first.start);
                continue;
            }
        };
        let d = cfg.expansion_distance(pmd);
        let Some(expanded) = offset_polygon(&contour, d).into_iter().next() else {
            warn!("component at ({}, {}) vanished on expansion", first.row, first.start);
            continue;
        };
        let Some(polygon) = expanded.scaled(cfg.scale).clip_to_rect(img_w, img_h) else {
            continue;
        };
        out.push(Detection { polygon, score });
    }
    Ok(out)
}

/// Grows every kernel component over the text mask by level-synchronous
/// breadth-first search (4-connected) until the text foreground is
/// partitioned, then traces each region. A cell reached by several
/// components in the same step goes to the lowest component index.
///
/// Kernel cells outside `text` are ignored. Regions are returned in kernel
/// component order with score 1.0; regions too small to trace are skipped.
pub fn pixel_expand_baseline(kernel: &BinaryGrid, text: &BinaryGrid) -> Result<Vec<Detection>, RasterError> {
    kernel.check_dims(text)?;
    let (h, w) = kernel.dims();
    let seeds = Grid::from_vec(
        h,
        w,
        kernel
            .cells()
            .iter()
            .zip(text.cells())
            .map(|(&k, &t)| k && t)
            .collect(),
    )?;
    let comps = connected_components(&seeds);
    let mut label = vec![0u32; h * w];
    let mut reached = vec![0u32; h * w];
    let mut current: Vec<usize> = Vec::new();
    for c in &comps {
        for &(r, col) in &c.pixels {
            label[r * w + col] = c.label as u32;
            current.push(r * w + col);
        }
    }
    let text_cells = text.cells();
    let mut next: Vec<usize> = Vec::new();
    let mut step = 0u32;
    while !current.is_empty() {
        next.clear();
        step += 1;
        for &i in &current {
            let id = label[i];
            let (r, c) = (i / w, i % w);
            let mut visit = |j: usize| {
                if !text_cells[j] {
                    return;
                }
                let l = label[j];
                if l == 0 {
                    label[j] = id;
                    reached[j] = step;
                    next.push(j);
                } else if l > id && reached[j] == step {
                    // Same-step claim by a higher id; the lower id wins.
                    label[j] = id;
                }
            };
            if r > 0 {
                visit(i - w);
            }
            if r + 1 < h {
                visit(i + w);
            }
            if c > 0 {
                visit(i - 1);
            }
            if c + 1 < w {
                visit(i + 1);
            }
        }
        std::mem::swap(&mut current, &mut next);
    }

    let mut regions: Vec<Vec<(usize, usize)>> = vec![Vec::new(); comps.len()];
    for (i, &l) in label.iter().enumerate() {
        if l > 0 {
            regions[l as usize - 1].push((i / w, i % w));
        }
    }
    let mut out = Vec::with_capacity(regions.len());
    for (k, pixels) in regions.into_iter().enumerate() {
        // A grown region can be split by a competitor; trace its largest part.
        let mut part = Grid::new(h, w, false);
        for &(r, c) in &pixels {
            part.set(r, c, true);
        }
        let Some(main) = connected_components(&part).into_iter().max_by_key(Component::area) else {
            continue;
        };
        match extract_contour(&main) {
            Ok(polygon) => out.push(Detection { polygon, score: 1.0 }),
            Err(e) => warn!("baseline region {} skipped: {e}", k + 1),
        }
    }
    Ok(out)
}
