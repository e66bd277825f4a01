use std::collections::HashMap;
use std::sync::RwLock;

use super::bdeu::local_score_unchecked;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::graph::VertexSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalScoreKey {
    pub vertex: usize,
    pub parents: VertexSet,
}

/// Memoized local scores for one `(dataset, ess)` pair.
///
/// Readers may run concurrently; insertions are serialized by the lock.
#[derive(Debug)]
pub struct ScoreCache {
    fingerprint: u64,
    ess: f64,
    map: RwLock<HashMap<LocalScoreKey, f64>>,
}

impl ScoreCache {
    pub fn new(data: &Dataset, ess: f64) -> Result<Self> {
        if !(ess > 0.0) || !ess.is_finite() {
            return Err(Error::InvalidEss(ess));
        }
        Ok(ScoreCache {
            fingerprint: data.fingerprint(),
            ess,
            map: RwLock::new(HashMap::new()),
        })
    }

    pub fn ess(&self) -> f64 {
        self.ess
    }

    pub fn len(&self) -> usize {
        self.map.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Rejects datasets other than the one this cache was created for.
    pub fn check(&self, data: &Dataset) -> Result<()> {
        if data.fingerprint() != self.fingerprint {
            return Err(Error::Data(
                "score cache belongs to a different dataset".into(),
            ));
        }
        Ok(())
    }

    /// `f(v, parents)`, computed on first use.
    pub fn local(&self, data: &Dataset, v: usize, parents: VertexSet) -> f64 {
        debug_assert_eq!(data.fingerprint(), self.fingerprint);
        let key = LocalScoreKey { vertex: v, parents };
        if let Some(&s) = self.map.read().unwrap().get(&key) {
            return s;
        }
        let s = local_score_unchecked(v, parents, data, self.ess);
        *self.map.write().unwrap().entry(key).or_insert(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cached_values_are_bit_identical() {
        let d = Dataset::from_rows(vec![2, 3], &[vec![0, 2], vec![1, 1], vec![1, 2]]).unwrap();
        let cache = ScoreCache::new(&d, 2.5).unwrap();
        let first = cache.local(&d, 1, VertexSet::singleton(0));
        let second = cache.local(&d, 1, VertexSet::singleton(0));
        assert_eq!(first.to_bits(), second.to_bits());
        assert_eq!(
            first.to_bits(),
            local_score_unchecked(1, VertexSet::singleton(0), &d, 2.5).to_bits()
        );
        assert_eq!(cache.len(), 1);
        assert!(ScoreCache::new(&d, -1.0).is_err());
    }
}
