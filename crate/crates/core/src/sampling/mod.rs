// SPDX-License-Identifier: Apache-2.0

//! Seeded, reproducible samples of mention tables.
//!
//! Sampling happens in two layers. The planners ([`plan_simple`],
//! [`plan_stratified`], [`plan_one_per_software`]) work on population row
//! indices and a [`Strata`] column, so a caller can stream a large table
//! once to collect keys and a second time to copy the chosen rows. The
//! record-level functions wrap them for in-memory populations.
//!
//! Selection without replacement is a partial Fisher–Yates shuffle over the
//! virtual array `0..size`: for step `i`, draw `j = i + below(size - i)`,
//! swap positions `i` and `j`, take position `i`. Stratified and
//! per-software draws visit strata in ascending key order with a single
//! generator. Chosen rows are returned in population order.

mod rng;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use rng::SampleRng;

use crate::model::{normalize_key, MentionRecord, ModelError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SampleError {
    #[error("sample size must be at least 1")]
    ZeroSize,
    #[error("strategy {0} needs a sample size")]
    SizeRequired(Strategy),
    #[error("sample size {n} exceeds population size {population}")]
    TooLarge { n: u64, population: u64 },
    #[error("population is empty")]
    EmptyPopulation,
    #[error("row {row}: {source}")]
    Key { row: u64, source: ModelError },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Strategy {
    Simple,
    StratifiedProportionate,
    OnePerSoftware,
}

impl Strategy {
    pub fn cli_name(self) -> &'static str {
        match self {
            Strategy::Simple => "simple",
            Strategy::StratifiedProportionate => "stratified",
            Strategy::OnePerSoftware => "one-per-software",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Simple => "SIMPLE",
            Strategy::StratifiedProportionate => "STRATIFIED_PROPORTIONATE",
            Strategy::OnePerSoftware => "ONE_PER_SOFTWARE",
        })
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "simple" => Ok(Strategy::Simple),
            "stratified" | "stratified-proportionate" => Ok(Strategy::StratifiedProportionate),
            "one-per-software" => Ok(Strategy::OnePerSoftware),
            other => Err(format!("unknown strategy {other:?}")),
        }
    }
}

/// What to draw. `n` is unused by [`Strategy::OnePerSoftware`], whose size
/// is the number of distinct keys.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub strategy: Strategy,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    pub seed: u64,
}

impl SampleSpec {
    pub fn new(strategy: Strategy, n: Option<u64>, seed: u64) -> Result<Self, SampleError> {
        let spec = SampleSpec { strategy, n, seed };
        spec.check()?;
        Ok(spec)
    }

    pub fn check(&self) -> Result<(), SampleError> {
        match (self.strategy, self.n) {
            (_, Some(0)) => Err(SampleError::ZeroSize),
            (Strategy::OnePerSoftware, _) => Ok(()),
            (s, None) => Err(SampleError::SizeRequired(s)),
            _ => Ok(()),
        }
    }

    /// Name of the stratum key, for strategies that stratify.
    pub fn stratum_key(&self) -> Option<&'static str> {
        match self.strategy {
            Strategy::Simple => None,
            _ => Some("software_key"),
        }
    }
}

/// Interned software keys of a population, one per row.
#[derive(Clone, Debug, Default)]
pub struct Strata {
    names: Vec<String>,
    lookup: HashMap<String, u32>,
    ids: Vec<u32>,
}

impl Strata {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_records(pop: &[MentionRecord]) -> Result<Self, SampleError> {
        let mut s = Strata::new();
        for r in pop {
            s.push(&r.software_raw)?;
        }
        Ok(s)
    }

    /// Appends the next row's software name.
    pub fn push(&mut self, software_raw: &str) -> Result<u32, SampleError> {
        let row = self.ids.len() as u64;
        let key = normalize_key(software_raw).map_err(|source| SampleError::Key { row, source })?;
        let id = match self.lookup.get(&key) {
            Some(&id) => id,
            None => {
                let id = self.names.len() as u32;
                self.names.push(key.clone());
                self.lookup.insert(key, id);
                id
            }
        };
        self.ids.push(id);
        Ok(id)
    }

    /// Number of rows.
    pub fn len(&self) -> u64 {
        self.ids.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn distinct(&self) -> usize {
        self.names.len()
    }

    pub fn key_of(&self, row: u64) -> &str {
        &self.names[self.ids[row as usize] as usize]
    }

    /// Row indices per stratum, strata in ascending key order.
    fn members(&self) -> Vec<(&str, Vec<u64>)> {
        let mut by_id: Vec<Vec<u64>> = vec![Vec::new(); self.names.len()];
        for (row, &id) in self.ids.iter().enumerate() {
            by_id[id as usize].push(row as u64);
        }
        let mut out: Vec<(&str, Vec<u64>)> = self
            .names
            .iter()
            .map(String::as_str)
            .zip(by_id)
            .collect();
        out.sort_unstable_by(|a, b| a.0.cmp(b.0));
        out
    }

    /// Mention counts per key.
    pub fn histogram(&self) -> MentionCountHistogram {
        let mut counts = vec![0u64; self.names.len()];
        for &id in &self.ids {
            counts[id as usize] += 1;
        }
        MentionCountHistogram::from_counts(self.names.iter().cloned().zip(counts))
    }
}

/// Apportionment of one stratum under largest remainder.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Allocation {
    pub key: String,
    pub size: u64,
    /// `floor(n * size / N)`.
    pub floor: u64,
    /// `(n * size) mod N`, the fractional part of the quota times N.
    pub remainder: u64,
    pub allocated: u64,
}

impl Allocation {
    /// The exact quota `n * size / N` as a float.
    pub fn quota(&self, population: u64) -> f64 {
        self.floor as f64 + self.remainder as f64 / population as f64
    }
}

/// Largest-remainder apportionment of `n` over strata of the given sizes.
///
/// Every stratum first gets the floor of its quota. The seats left over go
/// one each to the strata with the largest remainders; equal remainders are
/// ordered by ascending key. Exact integer arithmetic throughout.
pub fn allocate<'a, I>(strata: I, n: u64) -> Vec<Allocation>
where
    I: IntoIterator<Item = (&'a str, u64)>,
{
    let mut out: Vec<Allocation> = strata
        .into_iter()
        .map(|(key, size)| Allocation {
            key: key.to_string(),
            size,
            floor: 0,
            remainder: 0,
            allocated: 0,
        })
        .collect();
    let total: u64 = out.iter().map(|a| a.size).sum();
    if total == 0 {
        return out;
    }
    let n = n.min(total);
    for a in &mut out {
        let q = n as u128 * a.size as u128;
        a.floor = (q / total as u128) as u64;
        a.remainder = (q % total as u128) as u64;
        a.allocated = a.floor;
    }
    let assigned: u64 = out.iter().map(|a| a.floor).sum();
    let mut order: Vec<usize> = (0..out.len()).collect();
    order.sort_by(|&i, &j| {
        out[j]
            .remainder
            .cmp(&out[i].remainder)
            .then_with(|| out[i].key.cmp(&out[j].key))
    });
    for &i in order.iter().take((n - assigned) as usize) {
        out[i].allocated += 1;
    }
    out
}

/// Chosen population rows, ascending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub spec: SampleSpec,
    pub population_size: u64,
    pub indices: Vec<u64>,
    /// Per-stratum apportionment; empty unless stratified.
    pub allocations: Vec<Allocation>,
}

/// `k` distinct positions of `0..size` by partial Fisher–Yates, in draw
/// order. Memory is O(k).
fn choose(rng: &mut SampleRng, size: u64, k: u64) -> Vec<u64> {
    let mut swapped: HashMap<u64, u64> = HashMap::with_capacity(k as usize);
    let mut out = Vec::with_capacity(k as usize);
    for i in 0..k {
        let j = i + rng.below(size - i);
        let at_j = swapped.get(&j).copied().unwrap_or(j);
        let at_i = swapped.get(&i).copied().unwrap_or(i);
        swapped.insert(j, at_i);
        out.push(at_j);
    }
    out
}

fn check_n(n: u64, population: u64) -> Result<(), SampleError> {
    if n == 0 {
        Err(SampleError::ZeroSize)
    } else if n > population {
        Err(SampleError::TooLarge { n, population })
    } else {
        Ok(())
    }
}

pub fn plan_simple(population: u64, n: u64, seed: u64) -> Result<SamplePlan, SampleError> {
    check_n(n, population)?;
    let mut rng = SampleRng::new(seed);
    let mut indices = choose(&mut rng, population, n);
    indices.sort_unstable();
    Ok(SamplePlan {
        spec: SampleSpec {
            strategy: Strategy::Simple,
            n: Some(n),
            seed,
        },
        population_size: population,
        indices,
        allocations: Vec::new(),
    })
}

pub fn plan_stratified(strata: &Strata, n: u64, seed: u64) -> Result<SamplePlan, SampleError> {
    check_n(n, strata.len())?;
    let members = strata.members();
    let allocations = allocate(members.iter().map(|(k, m)| (*k, m.len() as u64)), n);
    let mut rng = SampleRng::new(seed);
    let mut indices = Vec::with_capacity(n as usize);
    for ((_, rows), alloc) in members.iter().zip(&allocations) {
        if alloc.allocated > 0 {
            indices.extend(
                choose(&mut rng, rows.len() as u64, alloc.allocated)
                    .into_iter()
                    .map(|p| rows[p as usize]),
            );
        }
    }
    indices.sort_unstable();
    Ok(SamplePlan {
        spec: SampleSpec {
            strategy: Strategy::StratifiedProportionate,
            n: Some(n),
            seed,
        },
        population_size: strata.len(),
        indices,
        allocations,
    })
}

pub fn plan_one_per_software(strata: &Strata, seed: u64) -> Result<SamplePlan, SampleError> {
    if strata.is_empty() {
        return Err(SampleError::EmptyPopulation);
    }
    let mut rng = SampleRng::new(seed);
    let mut indices: Vec<u64> = strata
        .members()
        .iter()
        .map(|(_, rows)| rows[rng.below(rows.len() as u64) as usize])
        .collect();
    indices.sort_unstable();
    Ok(SamplePlan {
        spec: SampleSpec {
            strategy: Strategy::OnePerSoftware,
            n: None,
            seed,
        },
        population_size: strata.len(),
        indices,
        allocations: Vec::new(),
    })
}

/// Dispatches on `spec.strategy`.
pub fn plan(spec: &SampleSpec, strata: &Strata) -> Result<SamplePlan, SampleError> {
    spec.check()?;
    let mut p = match spec.strategy {
        Strategy::Simple => plan_simple(strata.len(), spec.n.unwrap_or(0), spec.seed)?,
        Strategy::StratifiedProportionate => plan_stratified(strata, spec.n.unwrap_or(0), spec.seed)?,
        Strategy::OnePerSoftware => plan_one_per_software(strata, spec.seed)?,
    };
    p.spec = spec.clone();
    Ok(p)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleResult {
    pub records: Vec<MentionRecord>,
    pub spec: SampleSpec,
    pub population_size: u64,
    /// Population rows of `records`, ascending.
    pub indices: Vec<u64>,
    pub per_stratum_counts: BTreeMap<String, u64>,
}

impl SampleResult {
    fn from_plan(pop: &[MentionRecord], strata: &Strata, plan: SamplePlan) -> Self {
        let mut per_stratum_counts = BTreeMap::new();
        for &i in &plan.indices {
            *per_stratum_counts.entry(strata.key_of(i).to_string()).or_insert(0) += 1;
        }
        SampleResult {
            records: plan.indices.iter().map(|&i| pop[i as usize].clone()).collect(),
            spec: plan.spec,
            population_size: plan.population_size,
            indices: plan.indices,
            per_stratum_counts,
        }
    }
}

pub fn draw_sample(pop: &[MentionRecord], spec: &SampleSpec) -> Result<SampleResult, SampleError> {
    let strata = Strata::from_records(pop)?;
    let p = plan(spec, &strata)?;
    Ok(SampleResult::from_plan(pop, &strata, p))
}

pub fn simple_random_sample(pop: &[MentionRecord], n: u64, seed: u64) -> Result<SampleResult, SampleError> {
    draw_sample(pop, &SampleSpec::new(Strategy::Simple, Some(n), seed)?)
}

pub fn stratified_proportionate_sample(
    pop: &[MentionRecord],
    n: u64,
    seed: u64,
) -> Result<SampleResult, SampleError> {
    draw_sample(pop, &SampleSpec::new(Strategy::StratifiedProportionate, Some(n), seed)?)
}

pub fn one_per_software(pop: &[MentionRecord], seed: u64) -> Result<SampleResult, SampleError> {
    draw_sample(pop, &SampleSpec::new(Strategy::OnePerSoftware, None, seed)?)
}

/// Mentions per software key, most-mentioned first (ties by key).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MentionCountHistogram {
    pub entries: Vec<(String, u64)>,
    pub total_mentions: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkewSummary {
    pub distinct_keys: u64,
    pub total_mentions: u64,
    pub keys_with_one: u64,
    pub keys_over_10: u64,
    pub keys_over_50: u64,
    pub share_one: f64,
    pub share_over_10: f64,
    pub share_over_50: f64,
}

impl MentionCountHistogram {
    pub fn from_counts<I: IntoIterator<Item = (String, u64)>>(counts: I) -> Self {
        let mut entries: Vec<(String, u64)> = counts.into_iter().filter(|(_, c)| *c > 0).collect();
        entries.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let total_mentions = entries.iter().map(|e| e.1).sum();
        MentionCountHistogram {
            entries,
            total_mentions,
        }
    }

    pub fn distinct(&self) -> u64 {
        self.entries.len() as u64
    }

    pub fn count_of(&self, key: &str) -> u64 {
        self.entries
            .iter()
            .find(|e| e.0 == key)
            .map_or(0, |e| e.1)
    }

    pub fn summary(&self) -> SkewSummary {
        let d = self.distinct();
        let count = |f: &dyn Fn(u64) -> bool| self.entries.iter().filter(|e| f(e.1)).count() as u64;
        let share = |c: u64| if d == 0 { 0.0 } else { c as f64 / d as f64 };
        let one = count(&|c| c == 1);
        let over_10 = count(&|c| c > 10);
        let over_50 = count(&|c| c > 50);
        SkewSummary {
            distinct_keys: d,
            total_mentions: self.total_mentions,
            keys_with_one: one,
            keys_over_10: over_10,
            keys_over_50: over_50,
            share_one: share(one),
            share_over_10: share(over_10),
            share_over_50: share(over_50),
        }
    }
}

pub fn mention_count_distribution(pop: &[MentionRecord]) -> Result<MentionCountHistogram, SampleError> {
    Ok(Strata::from_records(pop)?.histogram())
}
