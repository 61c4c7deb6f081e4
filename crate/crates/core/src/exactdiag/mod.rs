//! Finite-chain reference engine.
//!
//! The Hamiltonian is assembled in the `σz` product basis and diagonalized
//! densely, one conserved block at a time: blocks of fixed total `σz` when
//! `Jx = Jy`, otherwise the two `σz`-parity blocks. Thermal averages use
//! weights `exp(-β(E - E_min))` so low temperatures never overflow.

mod hamiltonian;
mod pair;
mod spectrum;

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

pub use hamiltonian::{build_hamiltonian, build_hamiltonian_capped, HamiltonianMatrix, DEFAULT_SITE_CAP};
pub use pair::{concurrence, reduced_pair_state, PairState, C64};
pub use spectrum::{
    thermal_observables, thermo_consistency, ConsistencyResiduals, CorrelatorTriple, Spectrum,
    ThermalObservables,
};

pub(crate) use spectrum::five_point;

use crate::error::Result;
use crate::model::{Boundary, Family, SignConvention, ValidatedSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct SpecKey {
    family: Family,
    couplings: [u64; 3],
    field: u64,
    n_sites: usize,
    boundary: Boundary,
    sign: SignConvention,
}

impl SpecKey {
    fn of(spec: &ValidatedSpec) -> Result<SpecKey> {
        let c = spec.couplings();
        Ok(SpecKey {
            family: spec.family(),
            couplings: [c.jx.to_bits(), c.jy.to_bits(), c.jz.to_bits()],
            field: spec.field().to_bits(),
            n_sites: spec.finite_sites()?,
            boundary: spec.boundary(),
            sign: spec.sign_convention(),
        })
    }
}

/// Spectra keyed by chain parameters. Readers share the lock; the first
/// writer to insert a key wins and later computations of it are dropped.
#[derive(Debug, Default)]
pub struct SpectrumCache {
    inner: RwLock<HashMap<SpecKey, Arc<Spectrum>>>,
}

impl SpectrumCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_compute(&self, spec: &ValidatedSpec) -> Result<Arc<Spectrum>> {
        let key = SpecKey::of(spec)?;
        if let Some(hit) = self.inner.read().expect("spectrum cache poisoned").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let fresh = Arc::new(Spectrum::compute(spec)?);
        let mut guard = self.inner.write().expect("spectrum cache poisoned");
        Ok(Arc::clone(guard.entry(key).or_insert(fresh)))
    }

    pub fn len(&self) -> usize {
        self.inner.read().expect("spectrum cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_spec, ModelSpec};

    #[test]
    fn cache_returns_shared_spectrum() {
        let cache = SpectrumCache::new();
        let spec = validate_spec(ModelSpec::xxx(1.0, 0.0, 4, Boundary::Periodic)).unwrap();
        let a = cache.get_or_compute(&spec).unwrap();
        let b = std::thread::scope(|s| s.spawn(|| cache.get_or_compute(&spec).unwrap()).join().unwrap());
        assert!(Arc::ptr_eq(&a, &b));
        let other = validate_spec(ModelSpec::xxx(1.0, 0.1, 4, Boundary::Periodic)).unwrap();
        cache.get_or_compute(&other).unwrap();
        assert_eq!(cache.len(), 2);
    }
}
