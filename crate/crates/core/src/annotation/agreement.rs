// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::layers::layer_value;
use crate::model::AnnotatedMention;
use crate::stats::{krippendorff_alpha, AgreementResult, StatsError};

/// Name of the pooled entry.
pub const ALL_LAYERS: &str = "all_layers";

/// How the pooled value is formed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pooling {
    /// Alpha over the layer matrices stacked as one, codes kept apart by layer.
    #[default]
    Concatenate,
    /// Unweighted mean of the defined per-layer values.
    Average,
}

impl fmt::Display for Pooling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pooling::Concatenate => "concatenate",
            Pooling::Average => "average",
        })
    }
}

impl FromStr for Pooling {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "concatenate" => Ok(Pooling::Concatenate),
            "average" => Ok(Pooling::Average),
            other => Err(format!("unknown pooling {other:?}; expected concatenate or average")),
        }
    }
}

/// Agreement for one layer, or why it is undefined.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerAgreement {
    pub layer: String,
    pub result: Option<AgreementResult>,
    pub undefined: Option<String>,
}

impl LayerAgreement {
    fn from(layer: &str, r: Result<AgreementResult, StatsError>) -> Self {
        match r {
            Ok(result) => LayerAgreement {
                layer: layer.to_string(),
                result: Some(result),
                undefined: None,
            },
            Err(e) => LayerAgreement {
                layer: layer.to_string(),
                result: None,
                undefined: Some(e.to_string()),
            },
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        self.result.as_ref().map(|r| r.alpha)
    }
}

/// Annotators in order of first appearance.
pub fn annotators_of(annots: &[AnnotatedMention]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for a in annots.iter().flat_map(|m| &m.annotations) {
        if !out.contains(&a.annotator_id) {
            out.push(a.annotator_id.clone());
        }
    }
    out
}

/// Units × annotators matrix for one layer, units in input order.
pub fn coding_matrix(annots: &[AnnotatedMention], annotators: &[String], layer: &str) -> Vec<Vec<Option<String>>> {
    let col: HashMap<&str, usize> = annotators.iter().enumerate().map(|(i, a)| (a.as_str(), i)).collect();
    annots
        .iter()
        .map(|m| {
            let mut row = vec![None; annotators.len()];
            for a in &m.annotations {
                if let Some(&i) = col.get(a.annotator_id.as_str()) {
                    row[i] = layer_value(a, layer);
                }
            }
            row
        })
        .collect()
}

/// The layer matrices stacked, each code prefixed with its layer name.
pub fn pooled_matrix(annots: &[AnnotatedMention], annotators: &[String], layers: &[String]) -> Vec<Vec<Option<String>>> {
    layers
        .iter()
        .flat_map(|l| {
            coding_matrix(annots, annotators, l)
                .into_iter()
                .map(move |row| row.into_iter().map(|c| c.map(|v| format!("{l}:{v}"))).collect())
        })
        .collect()
}

/// Per-layer alpha plus a pooled entry named [`ALL_LAYERS`].
pub fn agreement(
    annots: &[AnnotatedMention],
    annotators: &[String],
    layers: &[String],
    pooling: Pooling,
) -> Vec<LayerAgreement> {
    let mut out: Vec<LayerAgreement> = layers
        .iter()
        .map(|l| LayerAgreement::from(l, krippendorff_alpha(l, &coding_matrix(annots, annotators, l))))
        .collect();
    let pooled = match pooling {
        Pooling::Concatenate => krippendorff_alpha(ALL_LAYERS, &pooled_matrix(annots, annotators, layers)),
        Pooling::Average => {
            let defined: Vec<&AgreementResult> = out.iter().filter_map(|e| e.result.as_ref()).collect();
            if defined.is_empty() {
                Err(StatsError::AlphaUndefined("no layer has a defined alpha".into()))
            } else {
                Ok(AgreementResult {
                    layer: ALL_LAYERS.into(),
                    alpha: defined.iter().map(|r| r.alpha).sum::<f64>() / defined.len() as f64,
                    n_units: defined.iter().map(|r| r.n_units).sum(),
                    n_annotators: defined.iter().map(|r| r.n_annotators).max().unwrap_or(0),
                    n_missing: defined.iter().map(|r| r.n_missing).sum(),
                })
            }
        }
    };
    out.push(LayerAgreement::from(ALL_LAYERS, pooled));
    out
}
