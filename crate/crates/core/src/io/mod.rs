//! Annotation, detection and label records plus mask file formats.

mod icdar;
mod mask;
mod ndjson;

pub use icdar::{parse_icdar_quads, IcdarParse, LineError};
pub use mask::{read_mask_any, read_pgm, read_softmask, write_gray_pgm, write_pgm, write_softmask};
pub use ndjson::{
    read_ndjson_annotations, read_ndjson_detections, read_ndjson_labels, write_ndjson_annotations,
    write_ndjson_detections, write_ndjson_labels, AnnotationInstance, AnnotationRecord, DetectionEntry,
    DetectionRecord, LabelCenter, LabelInstance, LabelRecord,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("bad magic: expected {expected:?}")]
    BadMagic { expected: &'static str },
    #[error("bad header: {0}")]
    BadHeader(String),
    #[error("bad dimensions {width}x{height}")]
    BadDimensions { width: usize, height: usize },
    #[error("value {value} at byte offset {offset} is out of range")]
    ValueOutOfRange { offset: usize, value: f64 },
    #[error("payload truncated: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("line {line}: {message}")]
    Json { line: usize, message: String },
    #[error("line {line}: non-finite number in {field}")]
    NonFinite { line: usize, field: &'static str },
    #[error("no valid annotation line among {count} malformed ones (first: {first})")]
    NoValidLines { count: usize, first: LineError },
}
