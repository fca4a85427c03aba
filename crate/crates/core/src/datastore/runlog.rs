use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{StoreError, VariableKey};

/// One stored value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub step_index: u64,
    pub sim_time_s: f64,
    pub value: f64,
    pub wall_time_ms: Option<u64>,
}

impl Sample {
    /// Builds a sample whose simulated time is derived from the step grid.
    pub fn at_step(step_index: u64, step_size_s: f64, value: f64) -> Self {
        Self {
            step_index,
            sim_time_s: step_index as f64 * step_size_s,
            value,
            wall_time_ms: None,
        }
    }

    pub fn with_wall_time(mut self, wall_time_ms: u64) -> Self {
        self.wall_time_ms = Some(wall_time_ms);
        self
    }
}

/// All samples sealed for one step.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Frame {
    pub step_index: u64,
    pub entries: BTreeMap<VariableKey, Sample>,
}

impl Frame {
    pub fn new(step_index: u64) -> Self {
        Self {
            step_index,
            entries: BTreeMap::new(),
        }
    }

    pub fn get(&self, key: &VariableKey) -> Option<&Sample> {
        self.entries.get(key)
    }

    /// Looks a value up by name and source, ignoring the unit.
    pub fn value(&self, name: &str, source: super::Source) -> Option<f64> {
        self.entries
            .iter()
            .find(|(k, _)| k.name() == name && k.source() == source)
            .map(|(_, s)| s.value)
    }
}

/// Run-level metadata that travels next to the exported samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub scenario_id: String,
    pub seed: u64,
    pub step_size_s: f64,
    pub start_wall_time_ms: u64,
}

/// The complete record of a run: metadata plus gap-free sealed frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLog {
    pub metadata: RunMetadata,
    frames: Vec<Frame>,
}

impl RunLog {
    /// Validates that frames start at 0 and increase by exactly one.
    pub fn new(metadata: RunMetadata, frames: Vec<Frame>) -> Result<Self, StoreError> {
        for (i, frame) in frames.iter().enumerate() {
            if frame.step_index != i as u64 {
                return Err(StoreError::FrameGap {
                    expected: i as u64,
                    found: frame.step_index,
                });
            }
            if let Some((k, s)) = frame.entries.iter().find(|(_, s)| s.step_index != frame.step_index) {
                return Err(StoreError::Integrity(format!(
                    "sample for {k} carries step {} inside frame {}",
                    s.step_index, frame.step_index
                )));
            }
        }
        Ok(Self { metadata, frames })
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Every key appearing in any frame.
    pub fn keys(&self) -> BTreeSet<VariableKey> {
        self.frames.iter().flat_map(|f| f.entries.keys().cloned()).collect()
    }

    pub fn find_key(&self, name: &str, source: super::Source) -> Option<VariableKey> {
        self.keys()
            .into_iter()
            .find(|k| k.name() == name && k.source() == source)
    }

    /// Per-step values for a key; `None` where the step has no sample.
    pub fn series(&self, key: &VariableKey) -> Vec<Option<f64>> {
        self.frames.iter().map(|f| f.get(key).map(|s| s.value)).collect()
    }

    /// Dense series for a key addressed by `(name, source)`; errors on gaps.
    pub fn dense_series(&self, name: &str, source: super::Source) -> Result<Vec<f64>, StoreError> {
        let key = self
            .find_key(name, source)
            .ok_or_else(|| StoreError::UnknownKey(format!("{name}:{source}")))?;
        self.series(&key)
            .into_iter()
            .enumerate()
            .map(|(step, v)| v.ok_or_else(|| StoreError::Integrity(format!("{key} missing at step {step}"))))
            .collect()
    }

    /// Total sample count.
    pub fn sample_count(&self) -> usize {
        self.frames.iter().map(|f| f.entries.len()).sum()
    }
}
