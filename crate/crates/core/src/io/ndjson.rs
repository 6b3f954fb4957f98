//! One JSON object per line. Writers emit every real number with four
//! fractional digits, so a value that is already on that grid survives a
//! write/read cycle unchanged.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use serde::{Deserialize, Deserializer};

use super::IoError;
use crate::geometry::{GeometryError, Point, TextPolygon};
use crate::labels::LabelBundle;
use crate::reconstruct::Detection;

fn de_points<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Point>, D::Error> {
    let raw: Vec<[f64; 2]> = Vec::deserialize(d)?;
    Ok(raw.into_iter().map(|[x, y]| Point::new(x, y)).collect())
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct AnnotationInstance {
    #[serde(deserialize_with = "de_points")]
    pub points: Vec<Point>,
    #[serde(default)]
    pub ignore: bool,
    #[serde(default)]
    pub text: Option<String>,
}

impl AnnotationInstance {
    pub fn polygon(&self) -> Result<TextPolygon, GeometryError> {
        TextPolygon::with_ignore(self.points.clone(), self.ignore)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct AnnotationRecord {
    pub image: String,
    pub width: usize,
    pub height: usize,
    pub instances: Vec<AnnotationInstance>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct DetectionEntry {
    #[serde(deserialize_with = "de_points")]
    pub points: Vec<Point>,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct DetectionRecord {
    pub image: String,
    pub detections: Vec<DetectionEntry>,
}

impl DetectionRecord {
    pub fn from_detections(image: &str, dets: &[Detection]) -> Self {
        Self {
            image: image.to_string(),
            detections: dets
                .iter()
                .map(|d| DetectionEntry {
                    points: d.polygon.vertices().to_vec(),
                    score: d.score,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct LabelCenter {
    pub x: f64,
    pub y: f64,
    pub pmd: f64,
    pub rd: [f64; 8],
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct LabelInstance {
    pub pmd: f64,
    pub centers: Vec<LabelCenter>,
    pub ignore: bool,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct LabelRecord {
    pub image: String,
    pub mu: f64,
    pub scale: usize,
    pub instances: Vec<LabelInstance>,
}

impl LabelRecord {
    pub fn from_bundle(image: &str, b: &LabelBundle) -> Self {
        Self {
            image: image.to_string(),
            mu: b.mu,
            scale: b.scale,
            instances: b
                .instances
                .iter()
                .map(|i| LabelInstance {
                    pmd: i.pmd,
                    centers: i
                        .centers
                        .iter()
                        .map(|c| LabelCenter {
                            x: c.point.x,
                            y: c.point.y,
                            pmd: c.pmd,
                            rd: c.ray_distances,
                        })
                        .collect(),
                    ignore: i.ignore,
                })
                .collect(),
        }
    }
}

/// Appends `v` with four fractional digits.
fn num(out: &mut String, v: f64, line: usize, field: &'static str) -> Result<(), IoError> {
    if !v.is_finite() {
        return Err(IoError::NonFinite { line, field });
    }
    write!(out, "{v:.4}").expect("write to String");
    Ok(())
}

fn string(out: &mut String, s: &str) {
    out.push_str(&serde_json::to_string(s).expect("strings always serialize"));
}

fn points(out: &mut String, pts: &[Point], line: usize) -> Result<(), IoError> {
    out.push('[');
    for (i, p) in pts.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push('[');
        num(out, p.x, line, "points")?;
        out.push(',');
        num(out, p.y, line, "points")?;
        out.push(']');
    }
    out.push(']');
    Ok(())
}

pub fn write_ndjson_annotations(mut w: impl Write, records: &[AnnotationRecord]) -> Result<(), IoError> {
    for (k, r) in records.iter().enumerate() {
        let line = k + 1;
        let mut s = String::from("{\"image\":");
        string(&mut s, &r.image);
        write!(s, ",\"width\":{},\"height\":{},\"instances\":[", r.width, r.height).expect("write to String");
        for (i, inst) in r.instances.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str("{\"points\":");
            points(&mut s, &inst.points, line)?;
            write!(s, ",\"ignore\":{},\"text\":", inst.ignore).expect("write to String");
            match &inst.text {
                Some(t) => string(&mut s, t),
                None => s.push_str("null"),
            }
            s.push('}');
        }
        s.push_str("]}\n");
        w.write_all(s.as_bytes())?;
    }
    Ok(())
}

pub fn write_ndjson_detections(mut w: impl Write, records: &[DetectionRecord]) -> Result<(), IoError> {
    for (k, r) in records.iter().enumerate() {
        let line = k + 1;
        let mut s = String::from("{\"image\":");
        string(&mut s, &r.image);
        s.push_str(",\"detections\":[");
        for (i, d) in r.detections.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str("{\"points\":");
            points(&mut s, &d.points, line)?;
            s.push_str(",\"score\":");
            num(&mut s, d.score, line, "score")?;
            s.push('}');
        }
        s.push_str("]}\n");
        w.write_all(s.as_bytes())?;
    }
    Ok(())
}

pub fn write_ndjson_labels(mut w: impl Write, records: &[LabelRecord]) -> Result<(), IoError> {
    for (k, r) in records.iter().enumerate() {
        let line = k + 1;
        let mut s = String::from("{\"image\":");
        string(&mut s, &r.image);
        s.push_str(",\"mu\":");
        num(&mut s, r.mu, line, "mu")?;
        write!(s, ",\"scale\":{},\"instances\":[", r.scale).expect("write to String");
        for (i, inst) in r.instances.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str("{\"pmd\":");
            num(&mut s, inst.pmd, line, "pmd")?;
            s.push_str(",\"centers\":[");
            for (j, c) in inst.centers.iter().enumerate() {
                if j > 0 {
                    s.push(',');
                }
                s.push_str("{\"x\":");
                num(&mut s, c.x, line, "x")?;
                s.push_str(",\"y\":");
                num(&mut s, c.y, line, "y")?;
                s.push_str(",\"pmd\":");
                num(&mut s, c.pmd, line, "pmd")?;
                s.push_str(",\"rd\":[");
                for (m, v) in c.rd.iter().enumerate() {
                    if m > 0 {
                        s.push(',');
                    }
                    num(&mut s, *v, line, "rd")?;
                }
                s.push_str("]}");
            }
            write!(s, "],\"ignore\":{}}}", inst.ignore).expect("write to String");
        }
        s.push_str("]}\n");
        w.write_all(s.as_bytes())?;
    }
    Ok(())
}

fn read_lines<T: for<'de> Deserialize<'de>>(
    r: impl BufRead,
    check: impl Fn(&T) -> Result<(), String>,
) -> Result<Vec<T>, IoError> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: T = serde_json::from_str(&line).map_err(|e| IoError::Json {
            line: i + 1,
            message: e.to_string(),
        })?;
        check(&rec).map_err(|message| IoError::Json { line: i + 1, message })?;
        out.push(rec);
    }
    Ok(out)
}

pub fn read_ndjson_annotations(r: impl BufRead) -> Result<Vec<AnnotationRecord>, IoError> {
    read_lines(r, |rec: &AnnotationRecord| {
        if rec.width == 0 || rec.height == 0 {
            return Err("width and height must be at least 1".into());
        }
        for (i, inst) in rec.instances.iter().enumerate() {
            if inst.points.len() < 3 {
                return Err(format!("instance {i}: `points` needs at least 3 points"));
            }
        }
        Ok(())
    })
}

pub fn read_ndjson_detections(r: impl BufRead) -> Result<Vec<DetectionRecord>, IoError> {
    read_lines(r, |rec: &DetectionRecord| {
        for (i, d) in rec.detections.iter().enumerate() {
            if d.points.len() < 3 {
                return Err(format!("detection {i}: `points` needs at least 3 points"));
            }
        }
        Ok(())
    })
}

pub fn read_ndjson_labels(r: impl BufRead) -> Result<Vec<LabelRecord>, IoError> {
    read_lines(r, |_: &LabelRecord| Ok(()))
}
