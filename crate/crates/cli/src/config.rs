//! Benchmark configuration files.
//!
//! ```toml
//! [[set]]
//! family = "r_eq_i"
//! mode = "fixed"
//! n0_range = [8, 20]
//!
//! [set.bin_radius]
//! 8 = 16.17
//! 9 = 18.99
//! ```

use std::path::Path;

use cbpp_core::bench::BenchConfig;
use serde::{Deserialize, Serialize};

use crate::error::{read_text, CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchFile {
    #[serde(rename = "set")]
    pub sets: Vec<BenchConfig>,
}

impl BenchFile {
    pub fn parse(path: &Path, text: &str) -> CliResult<Self> {
        let file: BenchFile = toml::from_str(text).map_err(|e| CliError::parse(path, e))?;
        for set in &file.sets {
            set.check().map_err(|e| CliError::parse(path, e))?;
        }
        Ok(file)
    }

    /// Read a config and, when `seed` is given, apply it to every set.
    pub fn load(path: &Path, seed: Option<u64>) -> CliResult<Self> {
        let mut file = Self::parse(path, &read_text(path)?)?;
        if let Some(seed) = seed {
            for set in &mut file.sets {
                set.seed = seed;
            }
        }
        Ok(file)
    }
}
