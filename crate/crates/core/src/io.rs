//! JSON tensor documents.
//!
//! ```json
//! {"order": 3, "dim": 2, "entries": [{"idx": [1, 1, 1], "val": 4.0}]}
//! {"order": 2, "dim": 2, "dense": [1.0, 0.0, 0.0, 1.0]}
//! ```
//!
//! Indices are one-based. The writer emits the `entries` form with nonzero
//! entries in lexicographic order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::DenseTensor;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub idx: Vec<usize>,
    pub val: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorDocument {
    pub order: usize,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dense: Option<Vec<f64>>,
}

impl TensorDocument {
    pub fn from_tensor(a: &DenseTensor) -> Self {
        let entries = a
            .data()
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(k, v)| Entry { idx: a.unravel(k).iter().map(|i| i + 1).collect(), val: *v })
            .collect();
        TensorDocument { order: a.order(), dim: a.dim(), entries: Some(entries), dense: None }
    }

    pub fn into_tensor(self) -> Result<DenseTensor> {
        match (self.entries, self.dense) {
            (Some(_), Some(_)) => Err(Error::Parse("document has both \"entries\" and \"dense\"".into())),
            (None, None) => Err(Error::Parse("document needs \"entries\" or \"dense\"".into())),
            (None, Some(d)) => DenseTensor::from_dense(self.order, self.dim, d),
            (Some(entries), None) => {
                let mut coords = Vec::with_capacity(entries.len());
                for e in entries {
                    if e.idx.contains(&0) {
                        return Err(Error::IndexOutOfRange { index: 0, dim: self.dim });
                    }
                    coords.push((e.idx.iter().map(|i| i - 1).collect(), e.val));
                }
                DenseTensor::from_coords(self.order, self.dim, coords)
            }
        }
    }
}

/// Parses a tensor document. Syntax errors carry line and column.
pub fn parse_tensor(text: &str) -> Result<DenseTensor> {
    let doc: TensorDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    doc.into_tensor()
}

/// Compact JSON followed by a newline.
pub fn tensor_to_json(a: &DenseTensor) -> String {
    let mut s = serde_json::to_string(&TensorDocument::from_tensor(a)).expect("finite entries serialize");
    s.push('\n');
    s
}
