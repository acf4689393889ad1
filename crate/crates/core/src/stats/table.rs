// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::StatsError;

/// A percentage held as a scaled integer: `scaled / 10^decimals` percent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Percent {
    scaled: i64,
    decimals: u8,
}

impl Percent {
    /// `100 * count / total`, rounded half up. `None` when `total` is 0.
    pub fn of(count: u64, total: u64, decimals: u8) -> Option<Percent> {
        if total == 0 {
            return None;
        }
        let scale = 100u128 * 10u128.pow(decimals as u32);
        let scaled = (2 * count as u128 * scale + total as u128) / (2 * total as u128);
        Some(Percent {
            scaled: scaled as i64,
            decimals,
        })
    }

    pub fn from_scaled(scaled: i64, decimals: u8) -> Percent {
        Percent { scaled, decimals }
    }

    pub fn scaled(self) -> i64 {
        self.scaled
    }

    pub fn decimals(self) -> u8 {
        self.decimals
    }

    pub fn as_f64(self) -> f64 {
        self.scaled as f64 / 10f64.powi(self.decimals as i32)
    }

    /// `self - other`, exact; both must share a precision.
    pub fn minus(self, other: Percent) -> Result<Percent, StatsError> {
        if self.decimals != other.decimals {
            return Err(StatsError::Mismatch(format!(
                "percent precision {} vs {}",
                self.decimals, other.decimals
            )));
        }
        Ok(Percent {
            scaled: self.scaled - other.scaled,
            decimals: self.decimals,
        })
    }

    /// Sum of same-precision percents.
    pub fn plus(self, other: Percent) -> Result<Percent, StatsError> {
        self.minus(Percent {
            scaled: -other.scaled,
            decimals: other.decimals,
        })
    }

    /// Rendering with an explicit sign, e.g. `+12.1`.
    pub fn signed(self) -> String {
        if self.scaled > 0 {
            format!("+{self}")
        } else {
            self.to_string()
        }
    }
}

impl fmt::Display for Percent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.decimals as u32;
        let sign = if self.scaled < 0 { "-" } else { "" };
        let abs = self.scaled.unsigned_abs();
        if d == 0 {
            return write!(f, "{sign}{abs}");
        }
        let p = 10u64.pow(d);
        write!(f, "{sign}{}.{:0width$}", abs / p, abs % p, width = d as usize)
    }
}

impl std::str::FromStr for Percent {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("invalid percent {s:?}");
        let (neg, body) = match s.strip_prefix('-') {
            Some(b) => (true, b),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        if int.is_empty() || !int.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{int}{frac}");
        let v: i64 = digits.parse().map_err(|_| bad())?;
        Ok(Percent {
            scaled: if neg { -v } else { v },
            decimals: u8::try_from(frac.len()).map_err(|_| bad())?,
        })
    }
}

impl Serialize for Percent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Percent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// An exact ratio; undefined when the denominator is 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rate {
    pub numerator: u64,
    pub denominator: u64,
}

impl Rate {
    pub fn new(numerator: u64, denominator: u64) -> Rate {
        Rate {
            numerator,
            denominator,
        }
    }

    pub fn value(self) -> Option<f64> {
        (self.denominator > 0).then(|| self.numerator as f64 / self.denominator as f64)
    }

    pub fn percent(self, decimals: u8) -> Option<Percent> {
        Percent::of(self.numerator, self.denominator, decimals)
    }

    /// `7/62 (11.3%)`, or `0/0 (undefined)`.
    pub fn describe(self, decimals: u8) -> String {
        match self.percent(decimals) {
            Some(p) => format!("{}/{} ({p}%)", self.numerator, self.denominator),
            None => format!("{}/{} (undefined)", self.numerator, self.denominator),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistRow {
    pub category: String,
    pub count: u64,
    /// Absent when the table total is 0.
    pub percent: Option<Percent>,
}

/// Counts per category with percents of the total.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionTable {
    /// What the categories are codes of, e.g. a tagset name.
    pub dimension: String,
    pub rows: Vec<DistRow>,
    pub total: u64,
    pub percent_precision: u8,
}

impl DistributionTable {
    /// Builds the table; row order is the order given.
    pub fn from_counts<S: Into<String>>(
        dimension: &str,
        counts: impl IntoIterator<Item = (S, u64)>,
        percent_precision: u8,
    ) -> DistributionTable {
        let counts: Vec<(String, u64)> = counts.into_iter().map(|(c, n)| (c.into(), n)).collect();
        let total = counts.iter().map(|c| c.1).sum();
        DistributionTable {
            dimension: dimension.to_string(),
            rows: counts
                .into_iter()
                .map(|(category, count)| DistRow {
                    percent: Percent::of(count, total, percent_precision),
                    category,
                    count,
                })
                .collect(),
            total,
            percent_precision,
        }
    }

    pub fn row(&self, category: &str) -> Option<&DistRow> {
        self.rows.iter().find(|r| r.category == category)
    }

    pub fn count(&self, category: &str) -> u64 {
        self.row(category).map_or(0, |r| r.count)
    }

    pub fn percent(&self, category: &str) -> Option<Percent> {
        self.row(category).and_then(|r| r.percent)
    }

    pub fn categories(&self) -> impl Iterator<Item = &str> {
        self.rows.iter().map(|r| r.category.as_str())
    }
}

/// Counts over two categorical dimensions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContingencyTable {
    pub row_dimension: String,
    pub column_dimension: String,
    pub row_categories: Vec<String>,
    pub column_categories: Vec<String>,
    /// `cells[r][c]`.
    pub cells: Vec<Vec<u64>>,
    pub row_totals: Vec<u64>,
    pub column_totals: Vec<u64>,
    pub grand_total: u64,
    pub percent_precision: u8,
}

impl ContingencyTable {
    pub fn new(
        row_dimension: &str,
        column_dimension: &str,
        row_categories: Vec<String>,
        column_categories: Vec<String>,
        percent_precision: u8,
    ) -> ContingencyTable {
        let (r, c) = (row_categories.len(), column_categories.len());
        ContingencyTable {
            row_dimension: row_dimension.to_string(),
            column_dimension: column_dimension.to_string(),
            row_categories,
            column_categories,
            cells: vec![vec![0; c]; r],
            row_totals: vec![0; r],
            column_totals: vec![0; c],
            grand_total: 0,
            percent_precision,
        }
    }

    /// Counts one observation.
    pub fn add(&mut self, row: &str, column: &str) -> Result<(), StatsError> {
        let r = self.row_index(row).ok_or_else(|| StatsError::UnknownCategory(row.into()))?;
        let c = self
            .column_index(column)
            .ok_or_else(|| StatsError::UnknownCategory(column.into()))?;
        self.cells[r][c] += 1;
        self.row_totals[r] += 1;
        self.column_totals[c] += 1;
        self.grand_total += 1;
        Ok(())
    }

    pub fn row_index(&self, row: &str) -> Option<usize> {
        self.row_categories.iter().position(|x| x == row)
    }

    pub fn column_index(&self, column: &str) -> Option<usize> {
        self.column_categories.iter().position(|x| x == column)
    }

    pub fn get(&self, row: &str, column: &str) -> Option<u64> {
        Some(self.cells[self.row_index(row)?][self.column_index(column)?])
    }

    pub fn row_total(&self, row: &str) -> Option<u64> {
        self.row_index(row).map(|r| self.row_totals[r])
    }

    /// Cell as a percent of the grand total.
    pub fn cell_percent(&self, row: &str, column: &str) -> Option<Percent> {
        Percent::of(self.get(row, column)?, self.grand_total, self.percent_precision)
    }

    pub fn row_percent(&self, row: &str) -> Option<Percent> {
        Percent::of(self.row_total(row)?, self.grand_total, self.percent_precision)
    }

    /// Marginals agree with the cells.
    pub fn is_consistent(&self) -> bool {
        let rows_ok = self
            .cells
            .iter()
            .zip(&self.row_totals)
            .all(|(r, &t)| r.iter().sum::<u64>() == t);
        let cols_ok = (0..self.column_categories.len())
            .all(|c| self.cells.iter().map(|r| r[c]).sum::<u64>() == self.column_totals[c]);
        rows_ok && cols_ok && self.row_totals.iter().sum::<u64>() == self.grand_total
    }
}
