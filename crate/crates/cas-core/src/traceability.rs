//! Requirements traceability: manifest and test-report parsing plus matrix
//! generation.
//!
//! The requirements manifest is a checked-in TSV, one requirement per line:
//!
//! ```text
//! <id> <TAB> <comma-joined parent ids> <TAB> <comma-joined implementing ops>
//! ```
//!
//! The test report is a TSV mapping tests to the requirement tags they
//! cover:
//!
//! ```text
//! <test id> <TAB> <comma-joined requirement tags>
//! ```
//!
//! Structural rules: every LLR has at least one parent (an HLR or DHLR),
//! every HLR has at least one SRATS parent, every DHLR has at least one HLR
//! parent, and SRATS entries have none. Any reference to an unknown id is a
//! manifest inconsistency.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::types::{ReqLevel, RequirementId};

/// One requirement with its upward links, implementing operations, and the
/// tests covering it.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceabilityRecord {
    pub requirement: RequirementId,
    pub parents: Vec<RequirementId>,
    pub implementing_ops: Vec<String>,
    pub covering_tests: Vec<String>,
}

#[derive(Debug, Error, PartialEq)]
pub enum ManifestError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("duplicate requirement {id}")]
    Duplicate { id: String },
    #[error("requirement {child} references unknown parent {parent}")]
    DanglingParent { child: String, parent: String },
    #[error("requirement {id} violates the {rule} rule")]
    StructureRule { id: String, rule: String },
}

/// The parsed, structurally validated requirement set.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    records: Vec<TraceabilityRecord>,
}

impl Manifest {
    pub fn records(&self) -> &[TraceabilityRecord] {
        &self.records
    }

    pub fn count_of(&self, level: ReqLevel) -> usize {
        self.records
            .iter()
            .filter(|r| r.requirement.level() == level)
            .count()
    }
}

fn split_list(field: &str) -> Vec<String> {
    field
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

/// Parses and validates a requirements manifest.
pub fn parse_manifest(text: &str) -> Result<Manifest, ManifestError> {
    let mut records: Vec<TraceabilityRecord> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        // Only strip the carriage return; trailing tabs delimit empty fields.
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(ManifestError::Parse {
                line: line_no,
                reason: format!("expected 3 tab-separated fields, got {}", fields.len()),
            });
        }
        let requirement =
            RequirementId::parse(fields[0].trim()).map_err(|e| ManifestError::Parse {
                line: line_no,
                reason: e.to_string(),
            })?;
        if !seen.insert(requirement.tag().to_string()) {
            return Err(ManifestError::Duplicate {
                id: requirement.tag().to_string(),
            });
        }
        let mut parents = Vec::new();
        for p in split_list(fields[1]) {
            parents.push(RequirementId::parse(&p).map_err(|e| ManifestError::Parse {
                line: line_no,
                reason: e.to_string(),
            })?);
        }
        records.push(TraceabilityRecord {
            requirement,
            parents,
            implementing_ops: split_list(fields[2]),
            covering_tests: Vec::new(),
        });
    }

    let ids: BTreeSet<&str> = records.iter().map(|r| r.requirement.tag()).collect();
    for record in &records {
        for parent in &record.parents {
            if !ids.contains(parent.tag()) {
                return Err(ManifestError::DanglingParent {
                    child: record.requirement.tag().to_string(),
                    parent: parent.tag().to_string(),
                });
            }
        }
        let level = record.requirement.level();
        let parent_levels: BTreeSet<ReqLevel> =
            record.parents.iter().map(|p| p.level()).collect();
        let rule_ok = match level {
            ReqLevel::Srats => record.parents.is_empty(),
            ReqLevel::Hlr => {
                !record.parents.is_empty() && parent_levels.iter().all(|&l| l == ReqLevel::Srats)
            }
            ReqLevel::Dhlr => {
                !record.parents.is_empty() && parent_levels.iter().all(|&l| l == ReqLevel::Hlr)
            }
            ReqLevel::Llr => {
                !record.parents.is_empty()
                    && parent_levels
                        .iter()
                        .all(|&l| l == ReqLevel::Hlr || l == ReqLevel::Dhlr)
            }
        };
        if !rule_ok {
            return Err(ManifestError::StructureRule {
                id: record.requirement.tag().to_string(),
                rule: match level {
                    ReqLevel::Srats => "SRATS entries have no parents",
                    ReqLevel::Hlr => "every HLR has at least one SRATS parent",
                    ReqLevel::Dhlr => "every DHLR has at least one HLR parent",
                    ReqLevel::Llr => "every LLR has at least one HLR or DHLR parent",
                }
                .to_string(),
            });
        }
    }

    records.sort_by(|a, b| a.requirement.cmp(&b.requirement));
    Ok(Manifest { records })
}

#[derive(Debug, Error, PartialEq)]
pub enum TestReportError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// Parses a test report into (test id, covered tags) pairs.
pub fn parse_test_report(
    text: &str,
) -> Result<Vec<(String, Vec<RequirementId>)>, TestReportError> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 {
            return Err(TestReportError::Parse {
                line: line_no,
                reason: format!("expected 2 tab-separated fields, got {}", fields.len()),
            });
        }
        let mut tags = Vec::new();
        for tag in split_list(fields[1]) {
            tags.push(
                RequirementId::parse(&tag).map_err(|e| TestReportError::Parse {
                    line: line_no,
                    reason: e.to_string(),
                })?,
            );
        }
        entries.push((fields[0].trim().to_string(), tags));
    }
    Ok(entries)
}

/// The traceability matrix: manifest records annotated with covering tests.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub records: Vec<TraceabilityRecord>,
}

/// Coverage rollup printed alongside the matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixSummary {
    pub counts: BTreeMap<ReqLevel, usize>,
    /// Requirements with zero covering tests (direct or rolled up), by level.
    pub uncovered: BTreeMap<ReqLevel, Vec<String>>,
    pub uncovered_llrs: Vec<String>,
}

/// Joins a manifest with a test report. Tags in the report that name
/// unknown requirements are a manifest/report inconsistency.
pub fn build_matrix(
    manifest: &Manifest,
    report: &[(String, Vec<RequirementId>)],
) -> Result<Matrix, ManifestError> {
    let mut records = manifest.records.clone();
    let index: BTreeMap<String, usize> = records
        .iter()
        .enumerate()
        .map(|(i, r)| (r.requirement.tag().to_string(), i))
        .collect();
    for (test_id, tags) in report {
        for tag in tags {
            let Some(&i) = index.get(tag.tag()) else {
                return Err(ManifestError::DanglingParent {
                    child: format!("test {test_id}"),
                    parent: tag.tag().to_string(),
                });
            };
            records[i].covering_tests.push(test_id.clone());
        }
    }
    for record in &mut records {
        record.covering_tests.sort();
        record.covering_tests.dedup();
    }
    Ok(Matrix { records })
}

impl Matrix {
    /// Direct or descendant-rolled-up coverage per requirement tag.
    fn covered_set(&self) -> BTreeSet<String> {
        let mut covered: BTreeSet<String> = self
            .records
            .iter()
            .filter(|r| !r.covering_tests.is_empty())
            .map(|r| r.requirement.tag().to_string())
            .collect();
        // Propagate upward until stable (children cover their parents).
        loop {
            let mut grew = false;
            for record in &self.records {
                if covered.contains(record.requirement.tag()) {
                    for parent in &record.parents {
                        if covered.insert(parent.tag().to_string()) {
                            grew = true;
                        }
                    }
                }
            }
            if !grew {
                break;
            }
        }
        covered
    }

    pub fn summary(&self) -> MatrixSummary {
        let covered = self.covered_set();
        let mut counts: BTreeMap<ReqLevel, usize> = BTreeMap::new();
        let mut uncovered: BTreeMap<ReqLevel, Vec<String>> = BTreeMap::new();
        let mut uncovered_llrs = Vec::new();
        for record in &self.records {
            let level = record.requirement.level();
            *counts.entry(level).or_insert(0) += 1;
            if !covered.contains(record.requirement.tag()) {
                uncovered
                    .entry(level)
                    .or_default()
                    .push(record.requirement.tag().to_string());
            }
            if level == ReqLevel::Llr && record.covering_tests.is_empty() {
                uncovered_llrs.push(record.requirement.tag().to_string());
            }
        }
        MatrixSummary {
            counts,
            uncovered,
            uncovered_llrs,
        }
    }

    /// Stable CSV rendering: rows sorted by requirement id, multi-valued
    /// cells joined with `;`.
    pub fn to_csv(&self) -> String {
        let covered = self.covered_set();
        let mut out = String::from("requirement,level,parents,ops,tests,covered\n");
        for record in &self.records {
            let parents: Vec<&str> = record.parents.iter().map(|p| p.tag()).collect();
            let ops: Vec<&str> = record
                .implementing_ops
                .iter()
                .map(String::as_str)
                .collect();
            let tests: Vec<&str> = record.covering_tests.iter().map(String::as_str).collect();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                record.requirement.tag(),
                record.requirement.level().as_str(),
                parents.join(";"),
                ops.join(";"),
                tests.join(";"),
                if covered.contains(record.requirement.tag()) {
                    "yes"
                } else {
                    "no"
                },
            );
        }
        out
    }
}
