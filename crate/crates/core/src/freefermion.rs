//! Open XX chain as free fermions.
//!
//! After the Jordan–Wigner mapping, `σxσx + σyσy` on a bond becomes twice a
//! nearest-neighbor hopping and `σz = 2n - 1`. On an open chain there is no
//! boundary string, so the chain decouples exactly into `N` modes and
//! `H = Σ_k ε_k (2n_k - 1)` with
//! `ε_k = -B + 2 s J cos(πk/(N+1))`, `s` the exchange prefactor of the
//! sign convention.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Boundary, Family, SignConvention, ThermalPoint, ValidatedSpec};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSpectrum {
    pub energies: Vec<f64>,
}

impl ModeSpectrum {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn log_partition(&self, beta: f64) -> f64 {
        self.energies.iter().map(|e| ln_2cosh(beta * e)).sum()
    }
}

/// `ln(2 cosh x)` without overflow.
pub(crate) fn ln_2cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p()
}

pub fn jw_modes(n_sites: usize, j: f64, b: f64, sign: SignConvention) -> Result<ModeSpectrum> {
    if n_sites == 0 {
        return Err(Error::InvalidModel("n_sites must be at least 1".into()));
    }
    let s = sign.exchange_prefactor();
    let theta = std::f64::consts::PI / (n_sites as f64 + 1.0);
    let energies = (1..=n_sites).map(|k| -b + 2.0 * s * j * (theta * k as f64).cos()).collect();
    Ok(ModeSpectrum { energies })
}

/// Mode energies of a validated chain; only open XX chains decouple exactly.
pub fn jw_modes_for_spec(spec: &ValidatedSpec) -> Result<ModeSpectrum> {
    if spec.family() != Family::XX {
        return Err(Error::IneligibleFamily(spec.family().to_string()));
    }
    if spec.boundary() != Boundary::Open {
        return Err(Error::InvalidModel("free-fermion oracle needs an open chain".into()));
    }
    jw_modes(spec.finite_sites()?, spec.coupling(), spec.field(), spec.sign_convention())
}

/// Per-site `(U/N, M/N)` of the open XX chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FermionObservables {
    pub energy_per_site: f64,
    pub magnetization_per_site: f64,
    pub log_partition: f64,
}

pub fn jw_observables(n_sites: usize, kt: f64, j: f64, b: f64, sign: SignConvention) -> Result<FermionObservables> {
    let beta = ThermalPoint::new(kt)?.beta();
    let modes = jw_modes(n_sites, j, b, sign)?;
    // each mode is a two-level system with levels ±ε
    let (mut u, mut m) = (0.0, 0.0);
    for &e in &modes.energies {
        let t = (beta * e).tanh();
        u -= e * t;
        m -= t;
    }
    let n = n_sites as f64;
    Ok(FermionObservables {
        energy_per_site: u / n,
        magnetization_per_site: m / n,
        log_partition: modes.log_partition(beta),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactdiag::{build_hamiltonian, thermal_observables};
    use crate::model::{validate_spec, Boundary, ModelSpec};
    use nalgebra::{DMatrix, SymmetricEigen};

    #[test]
    fn single_site_mode() {
        let m = jw_modes(1, 0.7, 0.4, SignConvention::SingletGround).unwrap();
        assert!((m.energies[0] + 0.4).abs() < 1e-15);
    }

    #[test]
    fn spec_wrapper_rejects_other_families() {
        let xxx = validate_spec(ModelSpec::xxx(1.0, 0.0, 4, Boundary::Open)).unwrap();
        assert!(matches!(jw_modes_for_spec(&xxx), Err(Error::IneligibleFamily(_))));
        let ring = validate_spec(ModelSpec::xx(1.0, 0.0, 4, Boundary::Periodic)).unwrap();
        assert!(jw_modes_for_spec(&ring).is_err());
        let open = validate_spec(ModelSpec::xx(1.0, 0.2, 4, Boundary::Open)).unwrap();
        assert_eq!(jw_modes_for_spec(&open).unwrap().len(), 4);
    }

    #[test]
    fn decoupled_spins() {
        let m = jw_modes(9, 0.0, 0.3, SignConvention::SingletGround).unwrap();
        assert!(m.energies.iter().all(|&e| (e + 0.3).abs() < 1e-15));
    }

    #[test]
    fn mode_energies_match_hopping_matrix() {
        // single-particle hopping matrix: amplitude s·J between neighbors, -B on site
        for sign in [SignConvention::SingletGround, SignConvention::AsPrinted] {
            let (n, j, b) = (7, 0.9, 0.25);
            let s = sign.exchange_prefactor();
            let h = DMatrix::from_fn(n, n, |r, c| {
                if r == c {
                    -b
                } else if r.abs_diff(c) == 1 {
                    s * j
                } else {
                    0.0
                }
            });
            let mut expect: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
            let mut got = jw_modes(n, j, b, sign).unwrap().energies;
            expect.sort_by(f64::total_cmp);
            got.sort_by(f64::total_cmp);
            for (a, e) in got.iter().zip(&expect) {
                assert!((a - e).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn two_site_many_body_levels_match_exact_spectrum() {
        let modes = jw_modes(2, 1.0, 0.0, SignConvention::SingletGround).unwrap();
        let (a, b) = (modes.energies[0], modes.energies[1]);
        let mut fermion = vec![a + b, a - b, -a + b, -a - b];
        fermion.sort_by(f64::total_cmp);
        let spec = validate_spec(ModelSpec::xx(1.0, 0.0, 2, Boundary::Open)).unwrap();
        let mut exact: Vec<f64> =
            SymmetricEigen::new(build_hamiltonian(&spec).unwrap().to_dense()).eigenvalues.iter().copied().collect();
        exact.sort_by(f64::total_cmp);
        for (x, y) in fermion.iter().zip(&exact) {
            assert!((x - y).abs() < 1e-12, "{fermion:?} vs {exact:?}");
        }
    }

    #[test]
    fn matches_exact_diagonalization_on_open_chains() {
        for sign in [SignConvention::SingletGround, SignConvention::AsPrinted] {
            let spec = validate_spec(ModelSpec::xx(1.0, 0.5, 10, Boundary::Open).with_sign(sign)).unwrap();
            let ed = thermal_observables(&spec, 1.0).unwrap();
            let ff = jw_observables(10, 1.0, 1.0, 0.5, sign).unwrap();
            assert!((ff.energy_per_site * 10.0 - ed.energy).abs() <= 1e-8 * ed.energy.abs());
            assert!((ff.magnetization_per_site * 10.0 - ed.magnetization).abs() <= 1e-8 * ed.magnetization.abs());
            assert!((ff.log_partition - ed.log_partition).abs() <= 1e-8 * ed.log_partition.abs());
        }
    }

    #[test]
    fn high_temperature_vanishes() {
        let ff = jw_observables(50, 1e7, 1.0, 0.8, SignConvention::SingletGround).unwrap();
        assert!(ff.energy_per_site.abs() < 1e-6 && ff.magnetization_per_site.abs() < 1e-6);
        assert!(jw_observables(5, 0.0, 1.0, 0.0, SignConvention::SingletGround).is_err());
    }
}
