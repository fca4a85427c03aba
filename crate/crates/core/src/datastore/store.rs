use std::collections::BTreeMap;
use std::ops::RangeInclusive;
use std::sync::{Arc, Mutex, RwLock};

use super::{Frame, RunLog, RunMetadata, Sample, StoreError, VariableKey};

/// Handle returned by [`DataStore::register_producer`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProducerId(usize);

#[derive(Debug, Clone)]
struct Producer {
    name: String,
    done_through: Option<u64>,
}

/// Samples returned by [`DataStore::query_series`], with steps lacking a
/// sample listed in `gaps`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesQuery {
    pub samples: Vec<Sample>,
    pub gaps: Vec<u64>,
}

/// Per-step keyed store with a write phase / read phase barrier.
///
/// Writes go to unsealed steps and may arrive from several threads. Sealing
/// step `N` requires step `N-1` to be sealed and every registered producer
/// to have reported `N` done; afterwards frame `N` is frozen behind an
/// `Arc` and late writes to it are refused.
#[derive(Debug)]
pub struct DataStore {
    step_size_s: f64,
    keys: RwLock<BTreeMap<(String, super::Source), VariableKey>>,
    pending: Mutex<BTreeMap<u64, BTreeMap<VariableKey, Sample>>>,
    sealed: RwLock<Vec<Arc<Frame>>>,
    producers: Mutex<Vec<Producer>>,
}

impl Clone for DataStore {
    fn clone(&self) -> Self {
        Self {
            step_size_s: self.step_size_s,
            keys: RwLock::new(self.keys.read().unwrap().clone()),
            pending: Mutex::new(self.pending.lock().unwrap().clone()),
            sealed: RwLock::new(self.sealed.read().unwrap().clone()),
            producers: Mutex::new(self.producers.lock().unwrap().clone()),
        }
    }
}

impl DataStore {
    pub fn new(step_size_s: f64) -> Self {
        Self {
            step_size_s,
            keys: RwLock::new(BTreeMap::new()),
            pending: Mutex::new(BTreeMap::new()),
            sealed: RwLock::new(Vec::new()),
            producers: Mutex::new(Vec::new()),
        }
    }

    pub fn step_size_s(&self) -> f64 {
        self.step_size_s
    }

    pub fn register(&self, key: VariableKey) -> Result<(), StoreError> {
        let mut keys = self.keys.write().unwrap();
        let slot = (key.name().to_string(), key.source());
        if keys.contains_key(&slot) {
            return Err(StoreError::DuplicateKey(key.to_string()));
        }
        keys.insert(slot, key);
        Ok(())
    }

    pub fn keys(&self) -> Vec<VariableKey> {
        self.keys.read().unwrap().values().cloned().collect()
    }

    pub fn lookup(&self, name: &str, source: super::Source) -> Option<VariableKey> {
        self.keys.read().unwrap().get(&(name.to_string(), source)).cloned()
    }

    fn check_registered(&self, key: &VariableKey) -> Result<(), StoreError> {
        match self.keys.read().unwrap().get(&(key.name().to_string(), key.source())) {
            Some(k) if k == key => Ok(()),
            Some(k) => Err(StoreError::InvalidKey(format!(
                "{key} registered with unit `{}`, written with `{}`",
                k.unit(),
                key.unit()
            ))),
            None => Err(StoreError::UnknownKey(key.to_string())),
        }
    }

    /// Index of the last sealed step, if any.
    pub fn last_sealed(&self) -> Option<u64> {
        self.sealed.read().unwrap().last().map(|f| f.step_index)
    }

    /// Writes or replaces the sample for `(key, sample.step_index)`.
    pub fn upsert(&self, key: &VariableKey, sample: Sample) -> Result<(), StoreError> {
        if !sample.value.is_finite() {
            return Err(StoreError::NonFinite {
                key: key.to_string(),
                step: sample.step_index,
            });
        }
        self.check_registered(key)?;
        let expected_time = sample.step_index as f64 * self.step_size_s;
        if sample.sim_time_s != expected_time {
            return Err(StoreError::Integrity(format!(
                "{key} at step {} has sim_time_s {} (expected {expected_time})",
                sample.step_index, sample.sim_time_s
            )));
        }
        // Hold the pending lock while checking the seal so a concurrent
        // seal cannot slip between the check and the insert.
        let mut pending = self.pending.lock().unwrap();
        if let Some(last) = self.last_sealed() {
            if sample.step_index <= last {
                return Err(StoreError::OutOfOrder {
                    step: sample.step_index,
                    last_sealed: last,
                });
            }
        }
        pending
            .entry(sample.step_index)
            .or_default()
            .insert(key.clone(), sample);
        Ok(())
    }

    /// Current value for `(key, step)`, whether sealed or still open.
    pub fn read(&self, key: &VariableKey, step: u64) -> Option<f64> {
        if let Some(frame) = self.fetch_frame(step) {
            return frame.get(key).map(|s| s.value);
        }
        self.pending
            .lock()
            .unwrap()
            .get(&step)
            .and_then(|m| m.get(key))
            .map(|s| s.value)
    }

    /// Number of samples held for `(key, step)`; never more than one.
    pub fn count(&self, key: &VariableKey, step: u64) -> usize {
        usize::from(self.read(key, step).is_some())
    }

    pub fn register_producer(&self, name: impl Into<String>) -> ProducerId {
        let mut producers = self.producers.lock().unwrap();
        producers.push(Producer {
            name: name.into(),
            done_through: None,
        });
        ProducerId(producers.len() - 1)
    }

    pub fn producer_done(&self, id: ProducerId, step: u64) {
        let mut producers = self.producers.lock().unwrap();
        let p = &mut producers[id.0];
        p.done_through = Some(p.done_through.map_or(step, |d| d.max(step)));
    }

    /// Freezes step `step`. Fails unless it is the next step after the last
    /// sealed one and all producers reported it done.
    pub fn seal(&self, step: u64) -> Result<Arc<Frame>, StoreError> {
        let waiting: Vec<String> = self
            .producers
            .lock()
            .unwrap()
            .iter()
            .filter(|p| p.done_through.is_none_or(|d| d < step))
            .map(|p| p.name.clone())
            .collect();
        if !waiting.is_empty() {
            return Err(StoreError::ProducersPending { step, waiting });
        }
        let mut pending = self.pending.lock().unwrap();
        let mut sealed = self.sealed.write().unwrap();
        let next = sealed.last().map_or(0, |f| f.step_index + 1);
        if step != next {
            return Err(StoreError::SealOrder { step, expected: next });
        }
        let entries = pending.remove(&step).unwrap_or_default();
        let frame = Arc::new(Frame {
            step_index: step,
            entries,
        });
        sealed.push(Arc::clone(&frame));
        Ok(frame)
    }

    /// The sealed frame for `step`, or `None` when it is not (yet) available.
    pub fn fetch_frame(&self, step: u64) -> Option<Arc<Frame>> {
        let sealed = self.sealed.read().unwrap();
        usize::try_from(step).ok().and_then(|i| sealed.get(i)).cloned()
    }

    /// Samples of `key` over an inclusive step range of sealed steps.
    ///
    /// A reversed range yields an empty result. Steps without a sample are
    /// listed in `gaps` rather than silently skipped.
    pub fn query_series(&self, key: &VariableKey, steps: RangeInclusive<u64>) -> Result<SeriesQuery, StoreError> {
        self.check_registered(key)?;
        let (start, end) = steps.into_inner();
        let mut out = SeriesQuery {
            samples: Vec::new(),
            gaps: Vec::new(),
        };
        if start > end {
            return Ok(out);
        }
        let sealed = self.sealed.read().unwrap();
        let last = sealed.last().map(|f| f.step_index);
        if last.is_none_or(|l| end > l) {
            return Err(StoreError::NotSealed { step: end });
        }
        for frame in &sealed[start as usize..=end as usize] {
            match frame.get(key) {
                Some(s) => out.samples.push(*s),
                None => out.gaps.push(frame.step_index),
            }
        }
        Ok(out)
    }

    /// Copies all sealed frames into a [`RunLog`].
    pub fn to_run_log(&self, metadata: RunMetadata) -> Result<RunLog, StoreError> {
        let frames = self.sealed.read().unwrap().iter().map(|f| (**f).clone()).collect();
        RunLog::new(metadata, frames)
    }
}
