//! JSON instance and solution files.
//!
//! Both formats carry a `schema_version` and reject unknown fields.
//! Coordinates are written in shortest round-trip decimal form, so a
//! solution read back validates exactly as it was written.

use std::path::Path;

use cbpp_core::model::{self, Metrics};
use cbpp_core::{BinState, Family, Instance, Item, Placement, Solution};
use serde::{Deserialize, Serialize};

use crate::error::{read_text, write_text, CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ItemRecord {
    pub id: usize,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceMetadata {
    pub family: Family,
    pub n0: Option<u32>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub schema_version: u32,
    pub name: String,
    pub bin_radius: f64,
    pub items: Vec<ItemRecord>,
    pub metadata: InstanceMetadata,
}

impl InstanceFile {
    pub fn from_instance(instance: &Instance) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            name: instance.name.clone(),
            bin_radius: instance.bin_radius,
            items: instance
                .items
                .iter()
                .map(|i| ItemRecord {
                    id: i.id,
                    radius: i.radius,
                })
                .collect(),
            metadata: InstanceMetadata {
                family: instance.family,
                n0: instance.n0,
                seed: instance.seed,
            },
        }
    }

    pub fn into_instance(self) -> cbpp_core::Result<Instance> {
        let items = self
            .items
            .into_iter()
            .map(|r| Item {
                id: r.id,
                radius: r.radius,
            })
            .collect();
        Instance::new(
            self.name,
            self.bin_radius,
            items,
            self.metadata.family,
            self.metadata.n0,
            self.metadata.seed,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacementRecord {
    pub item_id: usize,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsRecord {
    #[serde(rename = "K")]
    pub k: usize,
    pub densities: Vec<f64>,
    #[serde(rename = "F")]
    pub f: f64,
}

impl From<&Metrics> for MetricsRecord {
    fn from(m: &Metrics) -> Self {
        Self {
            k: m.k_used,
            densities: m.densities.clone(),
            f: m.f_obj,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub schema_version: u32,
    pub instance_name: String,
    pub bins: Vec<Vec<PlacementRecord>>,
    pub metrics: MetricsRecord,
}

impl SolutionFile {
    pub fn from_solution(solution: &Solution, instance: &Instance) -> cbpp_core::Result<Self> {
        let metrics = model::objective(solution, instance)?;
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            instance_name: solution.instance_name.clone(),
            bins: solution
                .bins
                .iter()
                .map(|b| {
                    b.placements
                        .iter()
                        .map(|p| PlacementRecord {
                            item_id: p.item_id,
                            x: p.x,
                            y: p.y,
                        })
                        .collect()
                })
                .collect(),
            metrics: MetricsRecord::from(&metrics),
        })
    }

    pub fn to_solution(&self) -> Solution {
        Solution::new(
            self.instance_name.clone(),
            self.bins
                .iter()
                .map(|b| {
                    BinState::new(
                        b.iter()
                            .map(|p| Placement {
                                item_id: p.item_id,
                                x: p.x,
                                y: p.y,
                            })
                            .collect(),
                    )
                })
                .collect(),
        )
    }

    /// Differences between the stored metrics and those recomputed from the
    /// geometry, one message per mismatch.
    pub fn metric_mismatches(&self, instance: &Instance) -> Vec<String> {
        let actual = match model::objective(&self.to_solution(), instance) {
            Ok(m) => m,
            Err(e) => return vec![format!("metrics cannot be recomputed: {e}")],
        };
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9;
        let mut out = Vec::new();
        if self.metrics.k != actual.k_used {
            out.push(format!(
                "metrics mismatch: K stored {} recomputed {}",
                self.metrics.k, actual.k_used
            ));
        }
        if self.metrics.densities.len() != actual.densities.len()
            || !self
                .metrics
                .densities
                .iter()
                .zip(&actual.densities)
                .all(|(a, b)| close(*a, *b))
        {
            out.push(format!(
                "metrics mismatch: densities stored {:?} recomputed {:?}",
                self.metrics.densities, actual.densities
            ));
        }
        if !close(self.metrics.f, actual.f_obj) {
            out.push(format!(
                "metrics mismatch: F stored {} recomputed {}",
                self.metrics.f, actual.f_obj
            ));
        }
        out
    }
}

fn check_version(path: &Path, version: u32) -> CliResult<()> {
    if version != SCHEMA_VERSION {
        return Err(CliError::parse(
            path,
            format!("unsupported schema_version {version}, expected {SCHEMA_VERSION}"),
        ));
    }
    Ok(())
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("file types serialize");
    text.push('\n');
    text
}

pub fn read_instance(path: &Path) -> CliResult<Instance> {
    let text = read_text(path)?;
    let file: InstanceFile =
        serde_json::from_str(&text).map_err(|e| CliError::parse(path, e))?;
    check_version(path, file.schema_version)?;
    file.into_instance().map_err(|e| CliError::parse(path, e))
}

pub fn write_instance(path: &Path, instance: &Instance) -> CliResult<()> {
    write_text(path, &to_json(&InstanceFile::from_instance(instance)))
}

pub fn read_solution_file(path: &Path) -> CliResult<SolutionFile> {
    let text = read_text(path)?;
    let file: SolutionFile =
        serde_json::from_str(&text).map_err(|e| CliError::parse(path, e))?;
    check_version(path, file.schema_version)?;
    Ok(file)
}

pub fn write_solution(path: &Path, solution: &Solution, instance: &Instance) -> CliResult<()> {
    let file = SolutionFile::from_solution(solution, instance)?;
    write_text(path, &to_json(&file))
}
