//! Thermodynamical entanglement witness.
//!
//! For XXX and XX chains every separable state satisfies
//! `(1/N)|Σ_bonds ⟨σ_i·σ_{i+1}⟩| ≤ 1` (with only the x and y terms for XX),
//! and that bond sum equals `∓(U + B·M)/J`. A thermal state with
//! `|U + B·M| / (N|J|) > 1` is therefore entangled. The test is one-sided:
//! a value at or below 1 means "not detected", never "separable".

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitSphere};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactdiag::CorrelatorTriple;
use crate::exactdiag::{thermal_observables, ThermalObservables};
use crate::model::{Family, Regime, SiteCount, ValidatedSpec};

pub const WITNESS_THRESHOLD: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessSource {
    FiniteExact,
    ThermodynamicLimit,
    LowtempApprox,
    ExternalMeasurement,
}

/// `U` and `M` are totals for a finite chain and per-site values in the
/// thermodynamic limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessInputs {
    pub energy: f64,
    pub magnetization: f64,
    pub field: f64,
    pub coupling: f64,
    pub n_sites: SiteCount,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessReport {
    pub value: f64,
    pub threshold: f64,
    pub entangled: bool,
    pub source: WitnessSource,
    pub inputs: WitnessInputs,
}

impl WitnessReport {
    fn from_inputs(inputs: WitnessInputs, source: WitnessSource) -> Result<WitnessReport> {
        if inputs.coupling == 0.0 {
            return Err(Error::ZeroCoupling);
        }
        let n = match inputs.n_sites {
            SiteCount::Finite(0) => return Err(Error::InvalidModel("n_sites must be at least 1".into())),
            SiteCount::Finite(n) => n as f64,
            SiteCount::ThermodynamicLimit => 1.0,
        };
        let value = (inputs.energy + inputs.field * inputs.magnetization).abs() / (n * inputs.coupling.abs());
        if !value.is_finite() {
            return Err(Error::Domain(format!("witness evaluated to {value}")));
        }
        Ok(WitnessReport {
            value,
            threshold: WITNESS_THRESHOLD,
            entangled: value > WITNESS_THRESHOLD,
            source,
            inputs,
        })
    }

    pub fn with_source(mut self, source: WitnessSource) -> Self {
        self.source = source;
        self
    }
}

/// `|U + B·M| / (N|J|)` for a chain of `n_sites` with total `U` and `M`,
/// where `U` is measured from the infinite-temperature zero.
pub fn witness_value(u: f64, m: f64, b: f64, j: f64, n_sites: usize) -> Result<WitnessReport> {
    WitnessReport::from_inputs(
        WitnessInputs { energy: u, magnetization: m, field: b, coupling: j, n_sites: SiteCount::Finite(n_sites) },
        WitnessSource::ExternalMeasurement,
    )
}

/// Witness of a finite XXX or XX chain from its exact thermal state.
pub fn finite_witness(spec: &ValidatedSpec, kt: f64) -> Result<(WitnessReport, ThermalObservables)> {
    if !spec.witness_eligible() {
        return Err(Error::IneligibleFamily(spec.family().to_string()));
    }
    let obs = thermal_observables(spec, kt)?;
    let report = witness_value(obs.energy, obs.magnetization, spec.field(), spec.coupling(), spec.finite_sites()?)?
        .with_source(WitnessSource::FiniteExact);
    Ok((report, obs))
}

/// Same witness from per-site `U/N` and `M/N`.
pub fn witness_per_site(u: f64, m: f64, b: f64, j: f64, source: WitnessSource) -> Result<WitnessReport> {
    WitnessReport::from_inputs(
        WitnessInputs { energy: u, magnetization: m, field: b, coupling: j, n_sites: SiteCount::ThermodynamicLimit },
        source,
    )
}

/// `(1/N)|Σ_bonds (xx + yy + zz)|` for XXX, `(1/N)|Σ_bonds (xx + yy)|` for XX.
pub fn witness_from_correlators(bond_correlators: &[CorrelatorTriple], n_sites: usize, family: Family) -> Result<f64> {
    if n_sites == 0 {
        return Err(Error::InvalidModel("n_sites must be at least 1".into()));
    }
    let terms = match family {
        Family::XXX => 3,
        Family::XX => 2,
        Family::GeneralXYZ => return Err(Error::IneligibleFamily(family.to_string())),
    };
    let sum: f64 = bond_correlators.iter().map(|c| c[..terms].iter().sum::<f64>()).sum();
    Ok(sum.abs() / n_sites as f64)
}

/// Witness of a pure product state given one Bloch vector per site; bonds
/// close into a ring when there are at least three sites.
pub fn product_state_witness(bloch: &[[f64; 3]], family: Family) -> Result<f64> {
    let n = bloch.len();
    let dot = |a: &[f64; 3], b: &[f64; 3]| -> CorrelatorTriple { [a[0] * b[0], a[1] * b[1], a[2] * b[2]] };
    let mut corr: Vec<CorrelatorTriple> = bloch.windows(2).map(|w| dot(&w[0], &w[1])).collect();
    if n >= 3 {
        corr.push(dot(&bloch[n - 1], &bloch[0]));
    }
    witness_from_correlators(&corr, n, family)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepResult {
    pub max_witness: f64,
    pub samples: usize,
    /// Best value among the hand-picked states (aligned, Néel, tilted).
    pub corner_max: f64,
}

const SHARD: usize = 4096;

fn corner_states(n: usize) -> Vec<Vec<[f64; 3]>> {
    // unit vector off every coordinate plane
    let tilt = [0.36, -0.48, 0.8];
    let mut out = Vec::new();
    for axis in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], tilt] {
        out.push(vec![axis; n]);
        let neg = [-axis[0], -axis[1], -axis[2]];
        out.push((0..n).map(|i| if i % 2 == 0 { axis } else { neg }).collect());
    }
    out
}

/// Largest witness over `n_samples` uniformly random pure product states of
/// an `n_sites` ring plus the corner states. Shard `k` draws from ChaCha8
/// stream `k` of `seed`, so the result is independent of thread count.
pub fn separable_sweep(n_samples: usize, n_sites: usize, family: Family, seed: u64) -> Result<SweepResult> {
    if n_samples == 0 {
        return Err(Error::Domain("n_samples must be at least 1".into()));
    }
    if n_sites == 0 {
        return Err(Error::InvalidModel("n_sites must be at least 1".into()));
    }
    let corner_max = corner_states(n_sites)
        .iter()
        .map(|s| product_state_witness(s, family))
        .try_fold(0.0f64, |m, w| w.map(|w| m.max(w)))?;

    let shards = n_samples.div_ceil(SHARD);
    let random_max = (0..shards)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let count = SHARD.min(n_samples - k * SHARD);
            let mut state = vec![[0.0; 3]; n_sites];
            let mut best = 0.0f64;
            for _ in 0..count {
                for site in state.iter_mut() {
                    *site = UnitSphere.sample(&mut rng);
                }
                best = best.max(product_state_witness(&state, family)?);
            }
            Ok(best)
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0f64, f64::max);

    Ok(SweepResult { max_witness: random_max.max(corner_max), samples: n_samples, corner_max })
}

/// `C = ½ max(0, |U|/(N|J|) - 1)` for the zero-field antiferromagnet; zero
/// for the ferromagnet.
pub fn concurrence_from_energy(u: f64, n_sites: usize, j: f64, regime: Regime) -> Result<f64> {
    if j == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    if n_sites == 0 {
        return Err(Error::InvalidModel("n_sites must be at least 1".into()));
    }
    Ok(match regime {
        Regime::Ferromagnetic => 0.0,
        Regime::Antiferromagnetic => 0.5 * (u.abs() / (n_sites as f64 * j.abs()) - 1.0).max(0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_spec, Boundary, Couplings, ModelSpec};
    use proptest::prelude::*;

    #[test]
    fn ground_state_anchor_is_detected() {
        let r = witness_per_site(-1.773, 0.0, 0.0, 1.0, WitnessSource::ThermodynamicLimit).unwrap();
        assert!((r.value - 1.773).abs() < 1e-15 && r.entangled);
    }

    #[test]
    fn infinite_temperature_not_detected() {
        let r = witness_value(0.0, 0.0, 0.7, 1.0, 8).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(!r.entangled);
    }

    #[test]
    fn zero_coupling_is_undefined() {
        assert!(matches!(witness_value(1.0, 0.0, 0.0, 0.0, 4), Err(Error::ZeroCoupling)));
        assert!(matches!(concurrence_from_energy(1.0, 4, 0.0, Regime::Antiferromagnetic), Err(Error::ZeroCoupling)));
    }

    #[test]
    fn two_site_open_chain_is_one_and_a_half() {
        let spec = validate_spec(ModelSpec::xxx(1.0, 0.0, 2, Boundary::Open)).unwrap();
        let obs = thermal_observables(&spec, 1e-3).unwrap();
        let r = witness_value(obs.energy, obs.magnetization, 0.0, 1.0, 2).unwrap();
        assert!((r.value - 1.5).abs() < 1e-12 && r.entangled);
        let w = witness_from_correlators(&obs.bond_correlators, 2, Family::XXX).unwrap();
        assert!((w - 1.5).abs() < 1e-12);
    }

    #[test]
    fn finite_witness_rejects_general_xyz() {
        let spec = validate_spec(ModelSpec::xyz(Couplings { jx: 1.0, jy: 2.0, jz: 3.0 }, 0.0, 4, Boundary::Open)).unwrap();
        assert!(matches!(finite_witness(&spec, 1.0), Err(Error::IneligibleFamily(_))));
        let ok = validate_spec(ModelSpec::xxx(1.0, 0.0, 8, Boundary::Periodic)).unwrap();
        let (r, _) = finite_witness(&ok, 0.2).unwrap();
        assert_eq!(r.source, WitnessSource::FiniteExact);
        assert!(r.entangled);
    }

    #[test]
    fn correlator_examples() {
        assert!((witness_from_correlators(&[[-1.0, -1.0, -1.0]], 2, Family::XXX).unwrap() - 1.5).abs() < 1e-15);
        let up_ring = vec![[0.0, 0.0, 1.0]; 6];
        assert_eq!(witness_from_correlators(&up_ring, 6, Family::XXX).unwrap(), 1.0);
        let gs = -1.773 / 3.0;
        let w = witness_from_correlators(&[[gs, gs, gs]], 1, Family::XX).unwrap();
        assert!((w - 1.182).abs() < 1e-12);
        assert!(matches!(
            witness_from_correlators(&up_ring, 6, Family::GeneralXYZ),
            Err(Error::IneligibleFamily(_))
        ));
    }

    #[test]
    fn aligned_states_saturate_the_bound() {
        let aligned = vec![[0.0, 0.0, 1.0]; 8];
        assert_eq!(product_state_witness(&aligned, Family::XXX).unwrap(), 1.0);
        let along_x = vec![[1.0, 0.0, 0.0]; 8];
        assert_eq!(product_state_witness(&along_x, Family::XX).unwrap(), 1.0);
    }

    #[test]
    fn sweep_is_bounded_and_deterministic() {
        for family in [Family::XXX, Family::XX] {
            let a = separable_sweep(10_000, 8, family, 7).unwrap();
            let b = separable_sweep(10_000, 8, family, 7).unwrap();
            assert_eq!(a, b);
            assert!(a.max_witness <= 1.0 + 1e-12);
            assert_eq!(a.corner_max, 1.0);
        }
        assert!(separable_sweep(0, 8, Family::XXX, 1).is_err());
    }

    #[test]
    fn concurrence_from_energy_examples() {
        let c = concurrence_from_energy(-1.773, 1, 1.0, Regime::Antiferromagnetic).unwrap();
        assert!((c - 0.3865).abs() < 1e-12);
        assert_eq!(concurrence_from_energy(-0.9, 1, 1.0, Regime::Antiferromagnetic).unwrap(), 0.0);
        assert_eq!(concurrence_from_energy(-3.0, 1, -1.0, Regime::Ferromagnetic).unwrap(), 0.0);
    }

    proptest! {
        #[test]
        fn sign_invariance(u in -10.0f64..10.0, m in -5.0f64..5.0, b in -3.0f64..3.0, j in 0.1f64..3.0, n in 1usize..20) {
            let base = witness_value(u, m, b, j, n).unwrap().value;
            prop_assert_eq!(base, witness_value(u, m, b, -j, n).unwrap().value);
            prop_assert!((base - witness_value(u, -m, -b, j, n).unwrap().value).abs() <= 1e-15 * base.max(1.0));
        }

        #[test]
        fn random_products_never_exceed_one(
            angles in prop::collection::vec((0.0f64..std::f64::consts::PI, 0.0f64..std::f64::consts::TAU), 1..12),
            xx: bool,
        ) {
            let bloch: Vec<[f64; 3]> = angles.iter()
                .map(|&(t, p)| [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()])
                .collect();
            let family = if xx { Family::XX } else { Family::XXX };
            prop_assert!(product_state_witness(&bloch, family).unwrap() <= 1.0 + 1e-12);
        }
    }
}
