use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;

use cmtext::eval::{bench_reconstruct, match_detections, EvalError, EvalTotals};
use cmtext::io::{
    read_mask_any, read_ndjson_annotations, read_ndjson_detections, write_gray_pgm, write_ndjson_annotations,
    write_ndjson_detections, write_ndjson_labels, write_pgm, write_softmask, AnnotationInstance, AnnotationRecord,
    DetectionRecord, IoError, LabelRecord,
};
use cmtext::labels::{generate_labels, LabelBundle, LabelConfig};
use cmtext::raster::{rasterize_scaled, Grid, SoftGrid};
use cmtext::reconstruct::{reconstruct as reconstruct_cm, ReconstructConfig};
use cmtext::synth::{generate_scene, SceneConfig, ShapeKind, SynthError};
use cmtext::trainer::{fit_direct, grad_check, FitConfig, ParamState, TrainError};
use cmtext::TextPolygon;

use crate::{BenchArgs, CliError, EvaluateArgs, GradcheckArgs, LabelgenArgs, ReconstructArgs, SynthArgs, TrainArgs};

type CliResult = Result<u8, CliError>;

fn data_at(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path).map(BufReader::new).map_err(|e| data_at(path, e))
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> Result<(), IoError>) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path).map_err(|e| data_at(path, e))?);
    f(&mut w).map_err(|e| data_at(path, e))?;
    w.flush().map_err(|e| data_at(path, e))
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|e| data_at(path, e))
}

fn read_annotations(path: &Path) -> Result<Vec<AnnotationRecord>, CliError> {
    read_ndjson_annotations(open(path)?).map_err(|e| data_at(path, e))
}

/// Image ids become file names; anything unusual in them is replaced.
fn file_stem(image: &str) -> String {
    let s: String = image
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "._-".contains(c) { c } else { '_' })
        .collect();
    if s.is_empty() { "_".to_string() } else { s }
}

fn polygons(rec: &AnnotationRecord) -> Result<Vec<TextPolygon>, CliError> {
    rec.instances
        .iter()
        .enumerate()
        .map(|(i, inst)| {
            inst.polygon()
                .map_err(|e| CliError::Data(format!("image {:?}, instance {i}: {e}", rec.image)))
        })
        .collect()
}

fn labels_for(rec: &AnnotationRecord, cfg: &LabelConfig) -> Result<(Vec<TextPolygon>, LabelBundle), CliError> {
    let polys = polygons(rec)?;
    let bundle = generate_labels(&polys, rec.height, rec.width, cfg)
        .map_err(|e| CliError::Data(format!("image {:?}: {e}", rec.image)))?;
    Ok((polys, bundle))
}

pub fn labelgen(a: LabelgenArgs) -> CliResult {
    let cfg = a.label.config()?;
    let records = read_annotations(&a.input)?;
    create_dir(&a.out)?;
    let labels = records
        .par_iter()
        .map(|rec| {
            let (_, b) = labels_for(rec, &cfg)?;
            let stem = file_stem(&rec.image);
            write_file(&a.out.join(format!("{stem}.cm.pgm")), |w| write_pgm(w, &b.cm))?;
            write_file(&a.out.join(format!("{stem}.gap.pgm")), |w| write_pgm(w, &b.gap))?;
            if a.dump_overlay {
                let (h, w) = b.dims();
                let cells = b
                    .text
                    .cells()
                    .iter()
                    .zip(b.cm.cells())
                    .map(|(&t, &c)| if c { 255 } else if t { 128 } else { 0 })
                    .collect();
                let overlay = Grid::from_vec(h, w, cells).map_err(CliError::data)?;
                write_file(&a.out.join(format!("{stem}.overlay.pgm")), |out| write_gray_pgm(out, &overlay))?;
            }
            Ok(LabelRecord::from_bundle(&rec.image, &b))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let path = a.out.join("labels.ndjson");
    write_file(&path, |w| write_ndjson_labels(w, &labels))?;
    info!("wrote labels for {} images to {}", labels.len(), a.out.display());
    Ok(0)
}

/// Directory scans pick up CM masks only, as written by `labelgen`
/// (`*.cm.pgm`) or `train-desk` (`*.softmask`).
fn is_cm_file(p: &Path) -> bool {
    let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
    name.ends_with(".cm.pgm") || name.ends_with(".softmask")
}

fn mask_inputs(paths: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| data_at(p, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|q| q.is_file() && is_cm_file(q))
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    if out.is_empty() {
        return Err(CliError::Invalid("no mask files found in the given inputs".into()));
    }
    Ok(out)
}

/// `scene.cm.pgm` and `scene.softmask` both name image `scene`.
fn image_id(path: &Path) -> String {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("image");
    stem.strip_suffix(".cm").unwrap_or(stem).to_string()
}

fn detection_overlay(cm: &SoftGrid, polys: &[&TextPolygon], cfg: &ReconstructConfig) -> Result<Grid<u8>, CliError> {
    let (h, w) = cm.dims();
    let on = cm.threshold(cfg.threshold);
    let mut cells: Vec<u8> = on.cells().iter().map(|&c| if c { 255 } else { 0 }).collect();
    for p in polys {
        let region = rasterize_scaled(p, h, w, cfg.scale);
        for (c, &r) in cells.iter_mut().zip(region.cells()) {
            if r && *c == 0 {
                *c = 128;
            }
        }
    }
    Grid::from_vec(h, w, cells).map_err(CliError::data)
}

pub fn reconstruct(a: ReconstructArgs) -> CliResult {
    let cfg = a.recon.config(a.mu, a.scale)?;
    let inputs = mask_inputs(&a.input)?;
    if let Some(dir) = &a.dump_overlay {
        create_dir(dir)?;
    }
    let records = inputs
        .par_iter()
        .map(|path| {
            let cm = read_mask_any(open(path)?).map_err(|e| data_at(path, e))?;
            let dets = reconstruct_cm(&cm, &cfg).map_err(|e| data_at(path, e))?;
            let id = image_id(path);
            if let Some(dir) = &a.dump_overlay {
                let polys: Vec<&TextPolygon> = dets.iter().map(|d| &d.polygon).collect();
                let overlay = detection_overlay(&cm, &polys, &cfg)?;
                write_file(&dir.join(format!("{}.overlay.pgm", file_stem(&id))), |w| write_gray_pgm(w, &overlay))?;
            }
            info!("{}: {} detections", path.display(), dets.len());
            Ok(DetectionRecord::from_detections(&id, &dets))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    write_file(&a.out, |w| write_ndjson_detections(w, &records))?;
    Ok(0)
}

/// Detections per image id. Annotation NDJSON is accepted as a detection
/// file so ground truth can be scored against itself.
fn read_detections(path: &Path) -> Result<BTreeMap<String, Vec<TextPolygon>>, CliError> {
    let bytes = fs::read(path).map_err(|e| data_at(path, e))?;
    let records: Vec<(String, Vec<Vec<cmtext::Point>>)> = match read_ndjson_detections(&bytes[..]) {
        Ok(recs) => recs
            .into_iter()
            .map(|r| (r.image, r.detections.into_iter().map(|d| d.points).collect()))
            .collect(),
        Err(det_err) => match read_ndjson_annotations(&bytes[..]) {
            Ok(recs) => recs
                .into_iter()
                .map(|r| (r.image, r.instances.into_iter().map(|i| i.points).collect()))
                .collect(),
            Err(_) => return Err(data_at(path, det_err)),
        },
    };
    let mut out: BTreeMap<String, Vec<TextPolygon>> = BTreeMap::new();
    for (image, all) in records {
        let entry = out.entry(image.clone()).or_default();
        for (i, pts) in all.into_iter().enumerate() {
            match TextPolygon::new(pts) {
                Ok(p) => entry.push(p),
                Err(e) => warn!("{}: image {image:?}, detection {i} skipped: {e}", path.display()),
            }
        }
    }
    Ok(out)
}

pub fn evaluate(a: EvaluateArgs) -> CliResult {
    if !(a.iou > 0.0 && a.iou <= 1.0) {
        return Err(CliError::Invalid(format!("--iou must be in (0, 1], got {}", a.iou)));
    }
    let gts = read_annotations(&a.gt)?;
    let mut dets = read_detections(&a.dets)?;
    let mut totals = EvalTotals::default();
    for rec in &gts {
        let gt_polys = polygons(rec)?;
        let d = dets.remove(&rec.image).unwrap_or_default();
        totals.add(&match_detections(&d, &gt_polys, a.iou));
    }
    for (image, d) in &dets {
        warn!("image {image:?} has detections but no ground truth; counted as false positives");
        totals.add(&match_detections(d, &[], a.iou));
    }
    let (p, r, f) = totals.prf();
    println!("P={p:.3} R={r:.3} F={f:.3}");
    println!("images={} tp={} fp={} fn={}", totals.images, totals.tp, totals.fp, totals.fn_);
    if let Some(path) = &a.json {
        let doc = serde_json::json!({
            "iou": a.iou,
            "precision": p,
            "recall": r,
            "f_measure": f,
            "totals": totals,
        });
        fs::write(path, format!("{doc}\n")).map_err(|e| data_at(path, e))?;
    }
    Ok(0)
}

pub fn bench(a: BenchArgs) -> CliResult {
    let report = bench_reconstruct(a.size, a.instances, a.repeats, a.seed).map_err(|e| match e {
        EvalError::TooFewRepeats { .. } | EvalError::GridTooSmall { .. } => CliError::invalid(e),
        other => CliError::data(other),
    })?;
    println!("{}", report.summary());
    if let Some(path) = &a.csv {
        let file = File::create(path).map_err(|e| data_at(path, e))?;
        report.write_csv(BufWriter::new(file)).map_err(|e| data_at(path, e))?;
    }
    Ok(0)
}

fn synth_error(e: SynthError) -> CliError {
    match e {
        SynthError::Geometry(_) => CliError::data(e),
        _ => CliError::invalid(e),
    }
}

fn kind_name(k: ShapeKind) -> &'static str {
    match k {
        ShapeKind::Rect => "rect",
        ShapeKind::RotatedRect => "rotated_rect",
        ShapeKind::Sector => "sector",
    }
}

fn scene_record(image: String, cfg: &SceneConfig, seed: u64) -> Result<AnnotationRecord, CliError> {
    let scene = generate_scene(cfg, seed).map_err(synth_error)?;
    Ok(AnnotationRecord {
        image,
        width: scene.width,
        height: scene.height,
        instances: scene
            .instances
            .iter()
            .zip(&scene.kinds)
            .map(|(p, &k)| AnnotationInstance {
                points: p.vertices().to_vec(),
                ignore: false,
                text: Some(kind_name(k).to_string()),
            })
            .collect(),
    })
}

pub fn synth(a: SynthArgs) -> CliResult {
    if a.count == 0 {
        return Err(CliError::Invalid("--count must be at least 1".into()));
    }
    let cfg = SceneConfig {
        width: a.scene.width,
        height: a.scene.height,
        n_rects: a.scene.rects,
        n_rotated: a.scene.rotated,
        n_sectors: a.scene.sectors,
        ..SceneConfig::new(a.scene.width, a.scene.height)
    };
    let records = (0..a.count)
        .map(|i| scene_record(format!("synth_{i:04}"), &cfg, a.seed.wrapping_add(i as u64)))
        .collect::<Result<Vec<_>, _>>()?;
    write_file(&a.out, |w| write_ndjson_annotations(w, &records))?;
    Ok(0)
}

fn train_error(e: TrainError) -> CliError {
    match e {
        TrainError::NoSteps | TrainError::InvalidLearningRate(_) | TrainError::InvalidStep(_) => CliError::invalid(e),
        other => CliError::data(other),
    }
}

pub fn train_desk(a: TrainArgs) -> CliResult {
    let label_cfg = a.label.config()?;
    let weights = a.weights.weights()?;
    let recon_cfg = a.recon.config(label_cfg.mu, label_cfg.scale)?;
    if a.steps == 0 {
        return Err(CliError::Invalid("--steps must be at least 1".into()));
    }
    if !(a.lr > 0.0 && a.lr.is_finite()) {
        return Err(CliError::Invalid(format!("--lr must be positive, got {}", a.lr)));
    }
    let rec = match &a.input {
        Some(path) => {
            let recs = read_annotations(path)?;
            let found = match &a.image {
                Some(id) => recs.into_iter().find(|r| &r.image == id),
                None => recs.into_iter().next(),
            };
            found.ok_or_else(|| data_at(path, "no matching image record"))?
        }
        None => {
            let mut cfg = SceneConfig::new(a.size, a.size);
            cfg.n_rects = 3;
            cfg.n_sectors = 1;
            scene_record("synthetic".into(), &cfg, a.seed)?
        }
    };
    let (polys, labels) = labels_for(&rec, &label_cfg)?;
    let fit = fit_direct(
        &labels,
        &FitConfig {
            steps: a.steps,
            lr: a.lr,
            seed: a.seed,
            weights,
        },
    )
    .map_err(train_error)?;
    let dets = reconstruct_cm(&fit.final_prediction.cm, &recon_cfg).map_err(CliError::data)?;
    let det_polys: Vec<TextPolygon> = dets.iter().map(|d| d.polygon.clone()).collect();
    let result = match_detections(&det_polys, &polys, 0.5);
    let cm_iou = fit
        .final_prediction
        .cm
        .threshold(recon_cfg.threshold)
        .iou(&labels.cm)
        .map_err(CliError::data)?;
    let r = &fit.final_report;
    println!(
        "image {:?}: {} steps in {:.2}s, loss {:.4} -> {:.4} (cm {:.4}, gap {:.4}, pmd {:.4}, rd {:.4})",
        rec.image,
        a.steps,
        fit.elapsed.as_secs_f64(),
        fit.trace[0].total,
        r.total,
        r.l_cm,
        r.l_gap,
        r.l_pmd,
        r.l_rd
    );
    println!(
        "cm_iou={cm_iou:.4} detections={} P={:.3} R={:.3} F={:.3}",
        dets.len(),
        result.precision,
        result.recall,
        result.f_measure
    );
    if let Some(path) = &a.trace {
        let file = File::create(path).map_err(|e| data_at(path, e))?;
        fit.write_trace_csv(BufWriter::new(file)).map_err(|e| data_at(path, e))?;
    }
    if let Some(dir) = &a.out {
        create_dir(dir)?;
        let stem = file_stem(&rec.image);
        write_file(&dir.join(format!("{stem}.softmask")), |w| write_softmask(w, &fit.final_prediction.cm))?;
        let record = DetectionRecord::from_detections(&rec.image, &dets);
        write_file(&dir.join("detections.ndjson"), |w| write_ndjson_detections(w, &[record]))?;
    }
    Ok(0)
}

pub fn gradcheck(a: GradcheckArgs) -> CliResult {
    let label_cfg = a.label.config()?;
    let weights = a.weights.weights()?;
    if !(1e-6..=1e-3).contains(&a.h) {
        return Err(CliError::Invalid(format!("--h must be in [1e-6, 1e-3], got {}", a.h)));
    }
    let records = match &a.input {
        Some(path) => read_annotations(path)?,
        None => {
            let mut cfg = SceneConfig::new(a.size, a.size);
            cfg.n_rects = 2;
            cfg.n_sectors = 0;
            (0..a.scenes)
                .map(|i| scene_record(format!("synth_{i:04}"), &cfg, a.seed.wrapping_add(i as u64)))
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    let (mut worst, mut checked, mut skipped, mut used) = (0.0f64, 0usize, 0usize, 0usize);
    for (i, rec) in records.iter().enumerate() {
        let (_, labels) = labels_for(rec, &label_cfg)?;
        if labels.supervised_count() == 0 {
            warn!("image {:?} has no supervised instance at scale {}; skipped", rec.image, label_cfg.scale);
            continue;
        }
        let seed = a.seed.wrapping_add(i as u64);
        let state = ParamState::random(&labels, seed);
        let g = grad_check(&labels, &state, a.h, &weights, seed).map_err(train_error)?;
        info!("{}: max relative error {:.3e} over {} parameters", rec.image, g.max_rel_error, g.checked);
        worst = worst.max(g.max_rel_error);
        checked += g.checked;
        skipped += g.skipped_kinks;
        used += 1;
    }
    if used == 0 {
        return Err(CliError::Data("no scene had a supervised instance to check".into()));
    }
    let pass = worst <= a.tolerance;
    println!(
        "max relative error {worst:.3e} over {checked} parameters in {used} scenes ({skipped} near-kink skipped): {}",
        if pass { "ok" } else { "FAILED" }
    );
    Ok(if pass { 0 } else { 2 })
}
