// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::StatsError;

/// Krippendorff's alpha for one layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgreementResult {
    pub layer: String,
    pub alpha: f64,
    /// Units with at least two codings.
    pub n_units: u64,
    pub n_annotators: u64,
    /// Empty cells in the matrix.
    pub n_missing: u64,
}

/// Units × annotators matrix of optional codes.
pub type CodingMatrix = [Vec<Option<String>>];

/// Observed and expected disagreement of a nominal coding matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Coincidences {
    /// `o_ck`, ordered pairs, keyed by code.
    pub matrix: BTreeMap<(String, String), f64>,
    /// `n_c`.
    pub marginals: BTreeMap<String, f64>,
    /// Number of pairable values.
    pub n: f64,
}

/// Coincidence matrix: each unit with `m >= 2` codings adds
/// `1 / (m - 1)` for every ordered pair of its values from different coders.
pub fn coincidences(matrix: &CodingMatrix) -> Coincidences {
    let mut o: BTreeMap<(String, String), f64> = BTreeMap::new();
    for unit in matrix {
        let values: Vec<&str> = unit.iter().flatten().map(String::as_str).collect();
        let m = values.len();
        if m < 2 {
            continue;
        }
        let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
        for v in &values {
            *counts.entry(v).or_default() += 1;
        }
        let w = 1.0 / (m - 1) as f64;
        for (c, &nc) in &counts {
            for (k, &nk) in &counts {
                let pairs = if c == k { nc * (nc - 1) } else { nc * nk };
                if pairs > 0 {
                    *o.entry((c.to_string(), k.to_string())).or_default() += pairs as f64 * w;
                }
            }
        }
    }
    let mut marginals: BTreeMap<String, f64> = BTreeMap::new();
    for ((c, _), v) in &o {
        *marginals.entry(c.clone()).or_default() += v;
    }
    let n = marginals.values().sum();
    Coincidences {
        matrix: o,
        marginals,
        n,
    }
}

/// Nominal Krippendorff's alpha, `1 - D_o / D_e`.
///
/// Units coded by fewer than two annotators do not contribute. When there is
/// no observed disagreement alpha is 1, including the case where only one
/// code occurs at all.
pub fn krippendorff_alpha(layer: &str, matrix: &CodingMatrix) -> Result<AgreementResult, StatsError> {
    let n_annotators = matrix.iter().map(Vec::len).max().unwrap_or(0) as u64;
    if n_annotators < 2 {
        return Err(StatsError::AlphaUndefined(format!(
            "layer {layer:?}: needs at least 2 annotators"
        )));
    }
    let n_missing = matrix
        .iter()
        .map(|u| u.iter().filter(|c| c.is_none()).count() as u64 + (n_annotators - u.len() as u64))
        .sum();
    let n_units = matrix
        .iter()
        .filter(|u| u.iter().flatten().count() >= 2)
        .count() as u64;

    // D_o counted per unit: disagreeing ordered pairs are m^2 - Σ n_uc^2.
    let mut observed = 0.0;
    for unit in matrix {
        let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
        for v in unit.iter().flatten() {
            *counts.entry(v.as_str()).or_default() += 1;
        }
        let m: u64 = counts.values().sum();
        if m < 2 {
            continue;
        }
        let agreeing: u64 = counts.values().map(|c| c * c).sum();
        observed += (m * m - agreeing) as f64 / (m - 1) as f64;
    }
    let co = coincidences(matrix);
    let n = co.n;
    if n == 0.0 {
        return Err(StatsError::AlphaUndefined(format!(
            "layer {layer:?}: no pairable values"
        )));
    }
    let alpha = if observed == 0.0 {
        1.0
    } else {
        let sum_nc: f64 = co.marginals.values().sum();
        let sum_nc2: f64 = co.marginals.values().map(|v| v * v).sum();
        let expected_pairs = sum_nc * sum_nc - sum_nc2;
        // alpha = 1 - (n - 1) Σ_{c≠k} o_ck / Σ_{c≠k} n_c n_k
        1.0 - (n - 1.0) * observed / expected_pairs
    };
    Ok(AgreementResult {
        layer: layer.to_string(),
        alpha,
        n_units,
        n_annotators,
        n_missing,
    })
}
