//! Empirical conditional distributions from CSV tables, and config assembly.
//!
//! A [`ConditionalQuery`] picks the rows whose filter columns equal given
//! values and counts the target column among them. Categories are mapped
//! to integer codes by a [`CategoryCodec`], starting at 1 in order of first
//! appearance unless a codes file fixes them.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dist::{DiscreteDistribution, SystemConfig, UserSpec};
use crate::error::{Error, Result};

/// Category → integer code for one column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryCodec {
    pub column: String,
    pub codes: BTreeMap<String, i64>,
    /// A frozen codec rejects categories it has not seen.
    #[serde(skip, default = "frozen")]
    frozen: bool,
}

fn frozen() -> bool {
    true
}

impl CategoryCodec {
    /// Empty codec that assigns 1, 2, ... to categories as they appear.
    pub fn learning(column: impl Into<String>) -> Self {
        Self {
            column: column.into(),
            codes: BTreeMap::new(),
            frozen: false,
        }
    }

    /// Fixed codes; unseen categories are an error.
    pub fn fixed(column: impl Into<String>, codes: BTreeMap<String, i64>) -> Result<Self> {
        let codec = Self {
            column: column.into(),
            codes,
            frozen: true,
        };
        codec.check_injective()?;
        Ok(codec)
    }

    /// Reads `{"column": "...", "codes": {"White": 1, ...}}`.
    pub fn from_path(path: &Path) -> Result<Self> {
        let codec: Self = serde_json::from_reader(File::open(path)?)?;
        codec.check_injective()?;
        Ok(codec)
    }

    fn check_injective(&self) -> Result<()> {
        let mut seen = BTreeMap::new();
        for (cat, code) in &self.codes {
            if let Some(other) = seen.insert(*code, cat) {
                return Err(Error::InvalidConfig(format!(
                    "code {code} assigned to both {other:?} and {cat:?}"
                )));
            }
        }
        Ok(())
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    pub fn code(&mut self, category: &str) -> Result<i64> {
        if let Some(&c) = self.codes.get(category) {
            return Ok(c);
        }
        if self.frozen {
            return Err(Error::UnknownCategory {
                column: self.column.clone(),
                category: category.to_string(),
            });
        }
        let next = self.codes.values().copied().max().unwrap_or(0) + 1;
        self.codes.insert(category.to_string(), next);
        Ok(next)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionalQuery {
    pub target: String,
    pub filters: Vec<(String, String)>,
}

impl ConditionalQuery {
    pub fn new(target: impl Into<String>, filters: Vec<(String, String)>) -> Result<Self> {
        let target = target.into();
        if filters.iter().any(|(c, _)| *c == target) {
            return Err(Error::InvalidParameter(format!(
                "target column {target:?} also appears as a filter"
            )));
        }
        Ok(Self { target, filters })
    }

    /// Parses `col=val[,col=val...]`. An empty string means no filter.
    pub fn parse_filters(spec: &str) -> Result<Vec<(String, String)>> {
        spec.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|kv| {
                kv.split_once('=')
                    .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                    .ok_or_else(|| Error::InvalidParameter(format!("filter {kv:?} is not col=val")))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct IngestDiagnostics {
    pub rows_read: u64,
    pub rows_matched: u64,
    /// Rows skipped because the target or a filter cell was empty.
    pub rows_dropped_missing: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub distribution: DiscreteDistribution,
    pub diagnostics: IngestDiagnostics,
}

pub fn extract_conditional(
    csv_path: &Path,
    query: &ConditionalQuery,
    codec: &mut CategoryCodec,
) -> Result<Extraction> {
    extract_conditional_from_reader(File::open(csv_path)?, query, codec)
}

pub fn extract_conditional_from_reader<R: Read>(
    reader: R,
    query: &ConditionalQuery,
    codec: &mut CategoryCodec,
) -> Result<Extraction> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let target = column(&query.target)?;
    let filters = query
        .filters
        .iter()
        .map(|(c, v)| Ok((column(c)?, v.as_str())))
        .collect::<Result<Vec<_>>>()?;

    let mut diagnostics = IngestDiagnostics::default();
    let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        diagnostics.rows_read += 1;
        let cell = |i: usize| record.get(i).unwrap_or("");
        if cell(target).is_empty() || filters.iter().any(|&(i, _)| cell(i).is_empty()) {
            diagnostics.rows_dropped_missing += 1;
            continue;
        }
        if filters.iter().all(|&(i, v)| cell(i) == v) {
            diagnostics.rows_matched += 1;
            *counts.entry(codec.code(cell(target))?).or_default() += 1;
        }
    }
    if diagnostics.rows_matched == 0 {
        return Err(Error::EmptyMatch);
    }

    let total = diagnostics.rows_matched as f64;
    let (support, mass) = counts
        .into_iter()
        .map(|(code, n)| (code as f64, n as f64 / total))
        .unzip();
    Ok(Extraction {
        distribution: DiscreteDistribution::new(support, mass)?,
        diagnostics,
    })
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Csv {
        line,
        message: e.to_string(),
    }
}

/// Where a user's distribution comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DistributionSource {
    Inline(DiscreteDistribution),
    Csv {
        csv: PathBuf,
        target: String,
        #[serde(default)]
        filters: Vec<(String, String)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        codes: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserSource {
    pub id: String,
    pub presence: f64,
    pub source: DistributionSource,
}

pub fn build_config(specs: &[UserSource]) -> Result<SystemConfig> {
    let users = specs
        .iter()
        .map(|s| {
            let dist = match &s.source {
                DistributionSource::Inline(d) => d.clone(),
                DistributionSource::Csv {
                    csv,
                    target,
                    filters,
                    codes,
                } => {
                    let query = ConditionalQuery::new(target.clone(), filters.clone())?;
                    let mut codec = match codes {
                        Some(path) => CategoryCodec::from_path(path)?,
                        None => CategoryCodec::learning(target.clone()),
                    };
                    extract_conditional(csv, &query, &mut codec)?.distribution
                }
            };
            Ok(UserSpec::new(s.id.clone(), s.presence, dist))
        })
        .collect::<Result<Vec<_>>>()?;
    SystemConfig::new(users)
}
