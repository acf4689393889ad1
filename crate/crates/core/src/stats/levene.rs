// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::special::f_sf;
use super::StatsError;

/// Where absolute deviations are measured from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Center {
    #[default]
    Mean,
    /// Brown–Forsythe variant.
    Median,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeveneResult {
    #[serde(rename = "F")]
    pub f: f64,
    pub df_between: u64,
    pub df_within: u64,
    pub p: f64,
}

/// Neumaier-compensated sum in slice order.
fn sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    s + c
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Levene's test with mean centering.
pub fn levene_test(groups: &[Vec<f64>]) -> Result<LeveneResult, StatsError> {
    levene_test_with(groups, Center::Mean)
}

/// Levene's test: one-way ANOVA on `|x - center(group)|`.
///
/// If every deviation equals its group mean (up to rounding) the statistic
/// is 0 with p = 1; if only the within-group term vanishes it is infinite
/// with p = 0.
pub fn levene_test_with(groups: &[Vec<f64>], center: Center) -> Result<LeveneResult, StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::InvalidInput("Levene's test needs at least 2 groups".into()));
    }
    for (i, g) in groups.iter().enumerate() {
        if g.len() < 2 {
            return Err(StatsError::InvalidInput(format!("group {i} has fewer than 2 values")));
        }
        if g.iter().any(|x| !x.is_finite()) {
            return Err(StatsError::InvalidInput(format!("group {i} has a non-finite value")));
        }
    }
    let k = groups.len();
    let n: usize = groups.iter().map(Vec::len).sum();

    let devs: Vec<Vec<f64>> = groups
        .iter()
        .map(|g| {
            let c = match center {
                Center::Mean => sum(g.iter().copied()) / g.len() as f64,
                Center::Median => median(g),
            };
            g.iter().map(|x| (x - c).abs()).collect()
        })
        .collect();
    let means: Vec<f64> = devs
        .iter()
        .map(|z| sum(z.iter().copied()) / z.len() as f64)
        .collect();
    let grand = sum(devs.iter().flatten().copied()) / n as f64;

    let between = sum(devs
        .iter()
        .zip(&means)
        .map(|(z, m)| z.len() as f64 * (m - grand) * (m - grand)));
    let within = sum(devs
        .iter()
        .zip(&means)
        .flat_map(|(z, m)| z.iter().map(move |v| (v - m) * (v - m))));

    // Sums of squares below the rounding floor of the deviations are zero:
    // a 2-value group has equal deviations that may differ in the last bit.
    let z_max = devs.iter().flatten().fold(0.0f64, |m, v| m.max(*v));
    let floor = n as f64 * (64.0 * f64::EPSILON * z_max).powi(2);
    let between = if between <= floor { 0.0 } else { between };
    let within = if within <= floor { 0.0 } else { within };

    let (df_between, df_within) = ((k - 1) as u64, (n - k) as u64);
    let (f, p) = if within == 0.0 {
        if between == 0.0 {
            (0.0, 1.0)
        } else {
            (f64::INFINITY, 0.0)
        }
    } else {
        let f = (df_within as f64 / df_between as f64) * (between / within);
        (f, f_sf(f, df_between as f64, df_within as f64))
    };
    Ok(LeveneResult {
        f,
        df_between,
        df_within,
        p,
    })
}
