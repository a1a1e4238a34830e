//! Name-keyed registries of interchangeable algorithms.
//!
//! Each family (minimum norm, orbit census, prime selection) is a trait;
//! implementations register under a short name and are looked up at run time
//! from configuration or the command line.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use crate::dcode::{self, MinNormStrategy};
use crate::error::{Error, Result};
use crate::group::{self, CensusStrategy};
use crate::primes::{self, PrimeSelector};

pub struct Registry<T: ?Sized> {
    kind: &'static str,
    entries: BTreeMap<&'static str, Arc<T>>,
}

impl<T: ?Sized> Registry<T> {
    fn new(kind: &'static str) -> Self {
        Registry {
            kind,
            entries: BTreeMap::new(),
        }
    }

    fn register(&mut self, name: &'static str, entry: Arc<T>) {
        self.entries.insert(name, entry);
    }

    pub fn get(&self, name: &str) -> Result<Arc<T>> {
        self.entries
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }
}

pub fn min_norm_strategies() -> &'static Registry<dyn MinNormStrategy> {
    static REGISTRY: OnceLock<Registry<dyn MinNormStrategy>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut r = Registry::new("min-norm");
        let all: [Arc<dyn MinNormStrategy>; 3] = [
            Arc::new(dcode::FullSweep),
            Arc::new(dcode::OrbitReduced),
            Arc::new(dcode::SphereSearch),
        ];
        for s in all {
            r.register(s.name(), s);
        }
        r
    })
}

pub fn census_strategies() -> &'static Registry<dyn CensusStrategy> {
    static REGISTRY: OnceLock<Registry<dyn CensusStrategy>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut r = Registry::new("census");
        let all: [Arc<dyn CensusStrategy>; 2] = [Arc::new(group::FullSweep), Arc::new(group::BallSearch)];
        for s in all {
            r.register(s.name(), s);
        }
        r
    })
}

pub fn prime_selectors() -> &'static Registry<dyn PrimeSelector> {
    static REGISTRY: OnceLock<Registry<dyn PrimeSelector>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut r = Registry::new("prime-selection");
        let all: [Arc<dyn PrimeSelector>; 2] = [Arc::new(primes::DirectScan), Arc::new(primes::Progression)];
        for s in all {
            r.register(s.name(), s);
        }
        r
    })
}
