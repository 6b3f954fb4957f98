//! Polygon IoU, one-to-one detection matching, P/R/F and the reconstruction
//! speed benchmark.

use std::io::{self, Write};
use std::time::{Duration, Instant};

use geo::{Area, BooleanOps, Coord, LineString, Polygon};
use serde::Serialize;
use thiserror::Error;

use crate::geometry::TextPolygon;
use crate::labels::{generate_labels, LabelConfig, LabelError};
use crate::raster::SoftGrid;
use crate::reconstruct::{pixel_expand_baseline, reconstruct, ReconstructConfig, ReconstructError};
use crate::synth::{generate_scene, SceneConfig, SynthError};

/// IoU at or above which a detection overlapping a don't-care region is dropped.
pub const IGNORE_IOU: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("benchmark needs at least 3 repeats, got {0}")]
    TooFewRepeats(usize),
    #[error("benchmark grid must be at least 64 pixels, got {0}")]
    GridTooSmall(usize),
    #[error("benchmark needs at least one instance")]
    NoInstances,
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Labels(#[from] LabelError),
    #[error(transparent)]
    Reconstruct(#[from] ReconstructError),
}

fn to_geo(p: &TextPolygon) -> Polygon<f64> {
    let coords: Vec<Coord<f64>> = p.vertices().iter().map(|v| Coord { x: v.x, y: v.y }).collect();
    Polygon::new(LineString::from(coords), Vec::new())
}

/// Intersection over union of two polygons.
pub fn polygon_iou(a: &TextPolygon, b: &TextPolygon) -> f64 {
    let (ba, bb) = (a.bbox(), b.bbox());
    if ba.max_x <= bb.min_x || bb.max_x <= ba.min_x || ba.max_y <= bb.min_y || bb.max_y <= ba.min_y {
        return 0.0;
    }
    let inter = to_geo(a).intersection(&to_geo(b)).unsigned_area();
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        return 0.0;
    }
    (inter / union).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Match {
    pub det: usize,
    pub gt: usize,
    pub iou: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalResult {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub matches: Vec<Match>,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    /// Detections dropped for overlapping a don't-care ground truth.
    pub ignored_dets: usize,
    /// Ground truths flagged don't-care.
    pub ignored_gts: usize,
}

/// Precision, recall and F from counts. An empty denominator counts as 1.
pub fn prf(tp: usize, fp: usize, fn_: usize) -> (f64, f64, f64) {
    let p = if tp + fp == 0 { 1.0 } else { tp as f64 / (tp + fp) as f64 };
    let r = if tp + fn_ == 0 { 1.0 } else { tp as f64 / (tp + fn_) as f64 };
    let f = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
    (p, r, f)
}

/// Greedy one-to-one matching by descending IoU; ties go to the lower
/// `(det, gt)` index pair.
///
/// Detections whose IoU with a don't-care ground truth is at least
/// [`IGNORE_IOU`] are removed first and count as neither tp nor fp.
pub fn match_detections(dets: &[TextPolygon], gts: &[TextPolygon], iou_thresh: f64) -> EvalResult {
    let iou: Vec<Vec<f64>> = dets
        .iter()
        .map(|d| gts.iter().map(|g| polygon_iou(d, g)).collect())
        .collect();
    let dropped: Vec<bool> = (0..dets.len())
        .map(|d| (0..gts.len()).any(|g| gts[g].ignore() && iou[d][g] >= IGNORE_IOU))
        .collect();
    let mut pairs: Vec<Match> = Vec::new();
    for (d, row) in iou.iter().enumerate() {
        if dropped[d] {
            continue;
        }
        for (g, &v) in row.iter().enumerate() {
            if !gts[g].ignore() && v >= iou_thresh && v > 0.0 {
                pairs.push(Match { det: d, gt: g, iou: v });
            }
        }
    }
    pairs.sort_by(|a, b| b.iou.total_cmp(&a.iou).then(a.det.cmp(&b.det)).then(a.gt.cmp(&b.gt)));
    let mut det_used = vec![false; dets.len()];
    let mut gt_used = vec![false; gts.len()];
    let mut matches = Vec::new();
    for m in pairs {
        if !det_used[m.det] && !gt_used[m.gt] {
            det_used[m.det] = true;
            gt_used[m.gt] = true;
            matches.push(m);
        }
    }
    let ignored_dets = dropped.iter().filter(|&&x| x).count();
    let ignored_gts = gts.iter().filter(|g| g.ignore()).count();
    let tp = matches.len();
    let fp = dets.len() - ignored_dets - tp;
    let fn_ = gts.len() - ignored_gts - tp;
    let (precision, recall, f_measure) = prf(tp, fp, fn_);
    EvalResult {
        precision,
        recall,
        f_measure,
        matches,
        tp,
        fp,
        fn_,
        ignored_dets,
        ignored_gts,
    }
}

/// Dataset-level counts accumulated over images.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct EvalTotals {
    pub images: usize,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl EvalTotals {
    pub fn add(&mut self, r: &EvalResult) {
        self.images += 1;
        self.tp += r.tp;
        self.fp += r.fp;
        self.fn_ += r.fn_;
    }

    pub fn prf(&self) -> (f64, f64, f64) {
        prf(self.tp, self.fp, self.fn_)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimingStats {
    pub min_ms: f64,
    pub median_ms: f64,
    pub mean_ms: f64,
}

impl TimingStats {
    pub fn from_durations(d: &[Duration]) -> Self {
        let mut ms: Vec<f64> = d.iter().map(|x| x.as_secs_f64() * 1e3).collect();
        ms.sort_by(f64::total_cmp);
        let n = ms.len();
        let median = if n % 2 == 1 {
            ms[n / 2]
        } else {
            0.5 * (ms[n / 2 - 1] + ms[n / 2])
        };
        Self {
            min_ms: ms[0],
            median_ms: median,
            mean_ms: ms.iter().sum::<f64>() / n as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub size: usize,
    pub n_instances: usize,
    pub repeats: usize,
    pub seed: u64,
    pub cm: TimingStats,
    pub baseline: TimingStats,
    /// Median baseline time over median CM time.
    pub ratio: f64,
    pub cm_detections: usize,
    pub baseline_detections: usize,
}

impl BenchReport {
    pub fn write_csv(&self, mut out: impl Write) -> io::Result<()> {
        writeln!(out, "algorithm,size,instances,repeats,min_ms,median_ms,mean_ms,detections")?;
        for (name, t, n) in [
            ("cm", &self.cm, self.cm_detections),
            ("pixel_expand", &self.baseline, self.baseline_detections),
        ] {
            writeln!(
                out,
                "{name},{},{},{},{:.6},{:.6},{:.6},{n}",
                self.size, self.n_instances, self.repeats, t.min_ms, t.median_ms, t.mean_ms
            )?;
        }
        Ok(())
    }

    pub fn summary(&self) -> String {
        format!(
            "grid {0}x{0}, {1} instances, {2} repeats\n  cm reconstruct: median {3:.3} ms (min {4:.3}, mean {5:.3})\n  pixel expand:   median {6:.3} ms (min {7:.3}, mean {8:.3})\n  speed ratio: {9:.2}x",
            self.size,
            self.n_instances,
            self.repeats,
            self.cm.median_ms,
            self.cm.min_ms,
            self.cm.mean_ms,
            self.baseline.median_ms,
            self.baseline.min_ms,
            self.baseline.mean_ms,
            self.ratio
        )
    }
}

/// Times [`reconstruct`] against [`pixel_expand_baseline`] on one seeded
/// `size x size` scene at label scale 1.
///
/// The scene mixes rectangles, rotated rectangles and sectors. Only the
/// algorithms are timed; scene and label construction are not.
pub fn bench_reconstruct(size: usize, n_instances: usize, repeats: usize, seed: u64) -> Result<BenchReport, EvalError> {
    if repeats < 3 {
        return Err(EvalError::TooFewRepeats(repeats));
    }
    if size < 64 {
        return Err(EvalError::GridTooSmall(size));
    }
    if n_instances == 0 {
        return Err(EvalError::NoInstances);
    }
    let mut sc = SceneConfig::new(size, size);
    sc.n_sectors = n_instances / 4;
    sc.n_rotated = n_instances / 4;
    sc.n_rects = n_instances - sc.n_sectors - sc.n_rotated;
    let scene = generate_scene(&sc, seed)?;
    let labels = generate_labels(
        &scene.instances,
        size,
        size,
        &LabelConfig {
            scale: 1,
            ..Default::default()
        },
    )?;
    let soft = SoftGrid::from_binary(&labels.cm);
    let cfg = ReconstructConfig {
        scale: 1.0,
        ..Default::default()
    };

    let mut cm_times = Vec::with_capacity(repeats);
    let mut base_times = Vec::with_capacity(repeats);
    let mut cm_detections = 0;
    let mut baseline_detections = 0;
    for _ in 0..repeats {
        let t = Instant::now();
        let d = reconstruct(&soft, &cfg)?;
        cm_times.push(t.elapsed());
        cm_detections = d.len();

        let t = Instant::now();
        let d = pixel_expand_baseline(&labels.cm, &labels.text).map_err(ReconstructError::from)?;
        base_times.push(t.elapsed());
        baseline_detections = d.len();
    }
    let cm = TimingStats::from_durations(&cm_times);
    let baseline = TimingStats::from_durations(&base_times);
    Ok(BenchReport {
        size,
        n_instances,
        repeats,
        seed,
        ratio: baseline.median_ms / cm.median_ms,
        cm,
        baseline,
        cm_detections,
        baseline_detections,
    })
}
