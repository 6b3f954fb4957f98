//! Ground-truth generation: CM and GAP masks plus per-center PMD/RD targets.

use log::warn;
use thiserror::Error;

use crate::geometry::{
    center_point, offset_polygon, polar_min_distance, ray_distances, sample_centers, CenterSample,
    GeometryError, TextPolygon, DEFAULT_MU,
};
use crate::raster::{gap_from_unions, rasterize_into, BinaryGrid, Grid};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabelError {
    #[error("mu must be in (0, 1), got {0}")]
    InvalidMu(f64),
    #[error("center count must be odd and positive, got {0}")]
    InvalidCenterCount(usize),
    #[error("scale must be at least 1")]
    InvalidScale,
    #[error("image dimensions must be at least 1x1, got {height}x{width}")]
    EmptyImage { height: usize, width: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelConfig {
    /// Shrink factor: the CM is the text polygon offset by `-mu * PMD`.
    pub mu: f64,
    /// Centers sampled per instance (odd).
    pub n_centers: usize,
    /// Downsample factor between image and label grids.
    pub scale: usize,
}

impl Default for LabelConfig {
    fn default() -> Self {
        Self {
            mu: DEFAULT_MU,
            n_centers: 5,
            scale: 4,
        }
    }
}

impl LabelConfig {
    pub fn validate(&self) -> Result<(), LabelError> {
        if !(self.mu > 0.0 && self.mu < 1.0) {
            return Err(LabelError::InvalidMu(self.mu));
        }
        if self.n_centers == 0 || self.n_centers % 2 == 0 {
            return Err(LabelError::InvalidCenterCount(self.n_centers));
        }
        if self.scale == 0 {
            return Err(LabelError::InvalidScale);
        }
        Ok(())
    }
}

/// Supervision for one text instance, in image coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceLabel {
    /// Source polygon after clipping to the image.
    pub polygon: TextPolygon,
    /// Center-mask polygons; usually one, several if the shrink splits it.
    pub cm: Vec<TextPolygon>,
    /// PMD of the polygon at its main center point.
    pub pmd: f64,
    /// Sampled centers with their own PMD and ray-distance targets.
    pub centers: Vec<CenterSample>,
    /// Excluded from masks and regression (don't-care or collapsed).
    pub ignore: bool,
}

impl InstanceLabel {
    fn ignored(polygon: TextPolygon) -> Self {
        Self {
            polygon,
            cm: Vec::new(),
            pmd: 0.0,
            centers: Vec::new(),
            ignore: true,
        }
    }

    /// This instance's CM rasterized on a label grid.
    pub fn cm_mask(&self, height: usize, width: usize, scale: usize) -> BinaryGrid {
        let mut g = Grid::new(height, width, false);
        for p in &self.cm {
            rasterize_into(&mut g, p, scale as f64);
        }
        g
    }
}

/// All supervision for one image.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelBundle {
    /// Union of instance CMs at label scale.
    pub cm: BinaryGrid,
    /// `1 - (text AND NOT cm)` at label scale.
    pub gap: BinaryGrid,
    /// Union of instance text masks at label scale.
    pub text: BinaryGrid,
    pub instances: Vec<InstanceLabel>,
    pub mu: f64,
    pub scale: usize,
    /// Source image `(height, width)`.
    pub image_dims: (usize, usize),
}

impl LabelBundle {
    /// Label grid `(height, width)`.
    pub fn dims(&self) -> (usize, usize) {
        self.cm.dims()
    }

    /// Centers that receive regression supervision, in instance order.
    pub fn supervised_centers(&self) -> impl Iterator<Item = &CenterSample> + '_ {
        self.instances
            .iter()
            .filter(|i| !i.ignore)
            .flat_map(|i| i.centers.iter())
    }

    pub fn supervised_count(&self) -> usize {
        self.supervised_centers().count()
    }

    /// Label-grid cell `(row, col)` nearest to an image-space center.
    pub fn site_cell(&self, c: &CenterSample) -> (usize, usize) {
        let (h, w) = self.dims();
        let s = self.scale as f64;
        let row = ((c.point.y / s).floor().max(0.0) as usize).min(h - 1);
        let col = ((c.point.x / s).floor().max(0.0) as usize).min(w - 1);
        (row, col)
    }
}

/// Builds the supervision for one image of `height x width` pixels.
///
/// Per-instance geometry failures are logged and turn the instance into an
/// ignored one; they never abort the image.
pub fn generate_labels(
    instances: &[TextPolygon],
    height: usize,
    width: usize,
    cfg: &LabelConfig,
) -> Result<LabelBundle, LabelError> {
    cfg.validate()?;
    if height == 0 || width == 0 {
        return Err(LabelError::EmptyImage { height, width });
    }
    let lh = height.div_ceil(cfg.scale);
    let lw = width.div_ceil(cfg.scale);
    let s = cfg.scale as f64;
    let mut cm = Grid::new(lh, lw, false);
    let mut text = Grid::new(lh, lw, false);
    let mut out = Vec::with_capacity(instances.len());

    for (idx, raw) in instances.iter().enumerate() {
        let Some(poly) = raw.clip_to_rect(width as f64, height as f64) else {
            warn!("instance {idx} lies outside the image; ignored");
            out.push(InstanceLabel::ignored(raw.clone()));
            continue;
        };
        if poly.ignore() {
            out.push(InstanceLabel::ignored(poly));
            continue;
        }
        match label_instance(&poly, cfg) {
            Ok(label) => {
                let mask = label.cm_mask(lh, lw, cfg.scale);
                if mask.count_ones() == 0 {
                    warn!("instance {idx}: center mask vanishes at scale {}; ignored", cfg.scale);
                    out.push(InstanceLabel::ignored(poly));
                    continue;
                }
                cm.union_with(&mask).expect("same label dims");
                rasterize_into(&mut text, &poly, s);
                out.push(label);
            }
            Err(e) => {
                warn!("instance {idx}: {e}; ignored");
                out.push(InstanceLabel::ignored(poly));
            }
        }
    }

    let gap = gap_from_unions(&text, &cm).expect("same label dims");
    Ok(LabelBundle {
        cm,
        gap,
        text,
        instances: out,
        mu: cfg.mu,
        scale: cfg.scale,
        image_dims: (height, width),
    })
}

fn label_instance(poly: &TextPolygon, cfg: &LabelConfig) -> Result<InstanceLabel, GeometryError> {
    let cp = center_point(poly, 0.5)?;
    let pmd = polar_min_distance(poly, cp)?;
    let cm = offset_polygon(poly, -cfg.mu * pmd);
    if cm.is_empty() {
        return Err(GeometryError::DegeneratePolygon);
    }
    let mut centers = sample_centers(poly, cfg.n_centers)?;
    for c in &mut centers {
        c.pmd = polar_min_distance(poly, c.point)?;
        c.ray_distances = ray_distances(poly, c.point)?;
    }
    Ok(InstanceLabel {
        polygon: poly.clone(),
        cm,
        pmd,
        centers,
        ignore: false,
    })
}
