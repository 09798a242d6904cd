//! Read-mostly memo tables keyed by group structure.
//!
//! Series chains and homology groups are cached per (group content, key).
//! Two groups with identical multiplication tables have identical series
//! and homology, so the cache key is the table itself (names and marked
//! generators do not matter). Concurrent readers are fine; a racing fill is
//! resolved by a per-key `OnceLock`, so each value is computed exactly once.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

pub struct Memo<K, V> {
    table: Mutex<HashMap<K, Arc<OnceLock<V>>>>,
}

impl<K: std::hash::Hash + Eq + Clone, V> Memo<K, V> {
    pub fn new() -> Self {
        Memo {
            table: Mutex::new(HashMap::new()),
        }
    }

    /// Returns the cached value for `key`, filling it with `compute` on
    /// first use. `compute` runs outside the table lock.
    pub fn get_or_fill(&self, key: K, compute: impl FnOnce() -> V) -> Arc<OnceLock<V>>
    where
        V: Clone,
    {
        let slot = {
            let mut table = self.table.lock().expect("memo poisoned");
            table.entry(key).or_insert_with(|| Arc::new(OnceLock::new())).clone()
        };
        slot.get_or_init(compute);
        slot
    }
}

impl<K: std::hash::Hash + Eq + Clone, V> Default for Memo<K, V> {
    fn default() -> Self {
        Self::new()
    }
}
