use std::fmt;

use super::{AnnotationInstance, AnnotationRecord, IoError};
use crate::geometry::Point;

/// Transcription that marks a don't-care region.
const IGNORE_TEXT: &str = "###";

/// A malformed input line (1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for LineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IcdarParse {
    pub record: AnnotationRecord,
    /// Lines that were skipped.
    pub errors: Vec<LineError>,
}

/// Parses ICDAR-2015 style `x1,y1,...,x4,y4,transcription` lines.
///
/// A UTF-8 byte-order mark and blank lines are skipped, and commas inside
/// the transcription are kept. Malformed lines are reported in
/// [`IcdarParse::errors`]; parsing fails only when the input has content but
/// no valid line.
pub fn parse_icdar_quads(payload: &str, image: &str, width: usize, height: usize) -> Result<IcdarParse, IoError> {
    if width == 0 || height == 0 {
        return Err(IoError::BadDimensions { width, height });
    }
    let payload = payload.strip_prefix('\u{feff}').unwrap_or(payload);
    let mut instances = Vec::new();
    let mut errors = Vec::new();
    for (i, raw) in payload.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        match parse_line(line) {
            Ok(inst) => instances.push(inst),
            Err(message) => errors.push(LineError { line: i + 1, message }),
        }
    }
    if instances.is_empty() && !errors.is_empty() {
        return Err(IoError::NoValidLines {
            count: errors.len(),
            first: errors[0].clone(),
        });
    }
    Ok(IcdarParse {
        record: AnnotationRecord {
            image: image.to_string(),
            width,
            height,
            instances,
        },
        errors,
    })
}

fn parse_line(line: &str) -> Result<AnnotationInstance, String> {
    let fields: Vec<&str> = line.splitn(9, ',').collect();
    if fields.len() < 8 {
        return Err(format!("expected 8 coordinates, found {} fields", fields.len()));
    }
    let mut c = [0.0; 8];
    for (k, f) in fields[..8].iter().enumerate() {
        let v: f64 = f
            .trim()
            .parse()
            .map_err(|_| format!("coordinate {} is not a number: {:?}", k + 1, f.trim()))?;
        if !v.is_finite() {
            return Err(format!("coordinate {} is not finite", k + 1));
        }
        c[k] = v;
    }
    let text = fields.get(8).map(|t| t.trim().to_string());
    let ignore = text.as_deref() == Some(IGNORE_TEXT);
    Ok(AnnotationInstance {
        points: c.chunks_exact(2).map(|p| Point::new(p[0], p[1])).collect(),
        ignore,
        text,
    })
}
