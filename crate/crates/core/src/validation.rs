//! Self-check suite behind `thermowitness validate`.
//!
//! Each check reports its measured residual against a pinned tolerance.
//! Checks that compare two quadrature routes accept a tolerance override;
//! a failure under an override that is tighter than the default is marked
//! as tolerance-induced rather than as a numerical defect.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::exactdiag::{concurrence, five_point, reduced_pair_state, thermal_observables, thermo_consistency};
use crate::freefermion::jw_observables;
use crate::model::{validate_spec, Boundary, Family, ModelSpec, SignConvention};
use crate::thermolimit::{
    low_temperature_critical_field, lowtemp_ferro_witness, xx_internal_energy, xx_log_partition_density,
    xx_magnetization, xx_witness, xx_witness_single_integral, zero_field_critical_temperature,
    zero_temperature_critical_field, LowTempExponent, MagnetizationFormula, TraceConfig, XxOptions,
};
use crate::witness::{concurrence_from_energy, separable_sweep, witness_from_correlators, witness_value};

#[derive(Debug, Clone)]
pub struct ValidationConfig {
    pub options: XxOptions,
    /// Replaces the tolerance of the quadrature identity checks.
    pub identity_tolerance: Option<f64>,
    pub seed: u64,
    pub sweep_samples: usize,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig { options: XxOptions::default(), identity_tolerance: None, seed: 2005, sweep_samples: 100_000 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub tolerance_induced: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
    /// Observations that are reported but never fail the suite.
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

struct Suite<'a> {
    config: &'a ValidationConfig,
    checks: Vec<CheckResult>,
    notes: Vec<String>,
}

impl Suite<'_> {
    fn record(&mut self, name: &str, measured: Result<f64>, tolerance: f64, identity: bool) {
        let effective = match (identity, self.config.identity_tolerance) {
            (true, Some(t)) => t,
            _ => tolerance,
        };
        let (measured, note) = match measured {
            Ok(v) => (v, None),
            Err(e) => (f64::NAN, Some(e.to_string())),
        };
        let passed = measured <= effective;
        self.checks.push(CheckResult {
            name: name.to_string(),
            measured,
            tolerance: effective,
            passed,
            tolerance_induced: !passed && effective < tolerance && measured <= tolerance,
            note,
        });
    }
}

fn energy_correlator_identity(seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let n = rng.random_range(2..=7usize);
        let boundary = if n >= 3 && rng.random_bool(0.5) { Boundary::Periodic } else { Boundary::Open };
        let j = rng.random_range(0.2..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let b = rng.random_range(-2.0..2.0);
        let spec = if rng.random_bool(0.5) {
            ModelSpec::xxx(j, b, n, boundary)
        } else {
            ModelSpec::xx(j, b, n, boundary)
        };
        let spec = validate_spec(spec)?;
        let kt = rng.random_range(0.05..5.0);
        let obs = thermal_observables(&spec, kt)?;
        let w = witness_value(obs.energy, obs.magnetization, b, j, n)?.value;
        let wc = witness_from_correlators(&obs.bond_correlators, n, spec.family())?;
        worst = worst.max((w - wc).abs());
    }
    Ok(worst)
}

fn concurrence_identity(n: usize, kt: f64) -> Result<f64> {
    let spec = validate_spec(ModelSpec::xxx(1.0, 0.0, n, Boundary::Periodic))?;
    let obs = thermal_observables(&spec, kt)?;
    let wootters = concurrence(&reduced_pair_state(&spec, kt, (0, 1))?);
    let from_energy = concurrence_from_energy(obs.energy, n, 1.0, spec.regime())?;
    Ok((wootters - from_energy).abs())
}

fn fermion_vs_exact() -> Result<f64> {
    let mut worst = 0.0f64;
    for n in [2, 5, 8, 10] {
        for &(kt, b) in &[(0.3, 0.0), (1.0, 0.5), (2.0, 1.5)] {
            for sign in [SignConvention::SingletGround, SignConvention::AsPrinted] {
                let spec = validate_spec(ModelSpec::xx(1.0, b, n, Boundary::Open).with_sign(sign))?;
                let ed = thermal_observables(&spec, kt)?;
                let ff = jw_observables(n, kt, 1.0, b, sign)?;
                let nf = n as f64;
                worst = worst.max((ff.energy_per_site * nf - ed.energy).abs() / ed.energy.abs().max(1e-300));
                if b != 0.0 {
                    worst = worst
                        .max((ff.magnetization_per_site * nf - ed.magnetization).abs() / ed.magnetization.abs());
                }
            }
        }
    }
    Ok(worst)
}

fn limit_vs_fermion(opts: &XxOptions) -> Result<f64> {
    let mut worst = 0.0f64;
    for kt in [0.5, 1.0, 2.0] {
        for b in [0.0, 1.0, 2.0] {
            let ff = jw_observables(2000, kt, 1.0, b, SignConvention::SingletGround)?;
            let u = xx_internal_energy(kt, b, 1.0, &opts.quad)?;
            let m = xx_magnetization(kt, b, 1.0, opts)?;
            worst = worst.max((u - ff.energy_per_site).abs()).max((m - ff.magnetization_per_site).abs());
        }
    }
    Ok(worst)
}

fn finite_consistency() -> Result<f64> {
    let mut worst = 0.0f64;
    for &(kt, b) in &[(1.0, 0.5), (0.3, 0.2), (3.0, 1.0)] {
        for spec in [ModelSpec::xxx(1.0, b, 6, Boundary::Periodic), ModelSpec::xx(-0.7, b, 5, Boundary::Open)] {
            let r = thermo_consistency(&validate_spec(spec)?, kt)?;
            worst = worst.max(r.energy_rel).max(r.magnetization_rel);
        }
    }
    Ok(worst)
}

/// Worst relative residual of `U` (or `M`) against finite differences of
/// the limit `ln Z` over a 5×5 grid.
fn limit_consistency(opts: &XxOptions, magnetization: bool) -> Result<f64> {
    let mut worst = 0.0f64;
    for k in [-1.5, -0.5, 0.3, 1.0, 2.0] {
        for c in [-1.0, 0.0, 0.5, 1.2, 2.5] {
            // J = K, B = C at β = 1
            let (j, b, beta) = (k, c, 1.0);
            let lnz = |beta: f64, b: f64| xx_log_partition_density(beta * j, beta * b, &opts.quad);
            let (value, fd) = if magnetization {
                let m = xx_magnetization(1.0 / beta, b, j, opts)?;
                let h = 1e-3;
                let mut vals = [0.0; 4];
                for (v, o) in vals.iter_mut().zip([-2.0, -1.0, 1.0, 2.0]) {
                    *v = lnz(beta, b + o * h)?;
                }
                (m, (vals[0] - 8.0 * vals[1] + 8.0 * vals[2] - vals[3]) / (12.0 * h) / beta)
            } else {
                let u = xx_internal_energy(1.0 / beta, b, j, &opts.quad)?;
                let d = five_point(|x| lnz(x, b).unwrap_or(f64::NAN), beta, 1e-3);
                (u, -d)
            };
            let rel = (value - fd).abs() / value.abs().max(1.0);
            worst = worst.max(if rel.is_nan() { f64::INFINITY } else { rel });
        }
    }
    Ok(worst)
}

fn two_route_witness(opts: &XxOptions) -> Result<f64> {
    let mut worst = 0.0f64;
    for kt in [0.05, 0.3, 1.0, 2.5] {
        for b in [0.0, 0.4, 1.2, 2.6] {
            let two = xx_witness(kt, b, 1.0, opts)?.value;
            let one = xx_witness_single_integral(kt, b, 1.0, &opts.quad)?;
            worst = worst.max((two - one).abs());
        }
    }
    Ok(worst)
}

fn limit_symmetry(opts: &XxOptions) -> Result<f64> {
    let mut worst = 0.0f64;
    for &(kt, b) in &[(0.2, 0.3), (0.9, 1.1), (1.7, 0.05)] {
        let w = xx_witness(kt, b, 1.0, opts)?.value;
        worst = worst
            .max((w - xx_witness(kt, b, -1.0, opts)?.value).abs())
            .max((w - xx_witness(kt, -b, 1.0, opts)?.value).abs());
    }
    Ok(worst)
}

fn finite_field_reversal() -> Result<f64> {
    let mut worst = 0.0f64;
    for spec in [ModelSpec::xxx(1.0, 0.7, 6, Boundary::Periodic), ModelSpec::xx(-1.0, 0.4, 5, Boundary::Open)] {
        let up = validate_spec(spec)?;
        let down = up.with_field(-spec.field)?;
        let n = up.finite_sites()?;
        let a = thermal_observables(&up, 0.6)?;
        let b = thermal_observables(&down, 0.6)?;
        let wa = witness_value(a.energy, a.magnetization, up.field(), up.coupling(), n)?.value;
        let wb = witness_value(b.energy, b.magnetization, down.field(), down.coupling(), n)?.value;
        worst = worst.max((wa - wb).abs());
    }
    Ok(worst)
}

pub fn run_suite(config: &ValidationConfig) -> ValidationReport {
    let opts = config.options;
    let mut suite = Suite { config, checks: Vec::new(), notes: Vec::new() };

    suite.record("energy-correlator-identity", energy_correlator_identity(config.seed), 1e-10, false);

    for family in [Family::XXX, Family::XX] {
        let excess = separable_sweep(config.sweep_samples, 8, family, config.seed).map(|r| (r.max_witness - 1.0).max(0.0));
        suite.record(&format!("separable-bound-{}", family.to_string().to_lowercase()), excess, 1e-12, false);
    }

    let mut worst = Ok(0.0f64);
    'outer: for n in [4, 6, 8] {
        for kt in [0.1, 0.5, 1.0, 2.0] {
            match concurrence_identity(n, kt) {
                Ok(d) => worst = worst.map(|w: f64| w.max(d)),
                Err(e) => {
                    worst = Err(e);
                    break 'outer;
                }
            }
        }
    }
    suite.record("concurrence-identity-even-rings", worst, 1e-8, false);
    for n in [5, 7] {
        if let Ok(d) = concurrence_identity(n, 0.5) {
            suite.notes.push(format!("odd ring N={n}, kT=0.5: |C_wootters - C_energy| = {d:e}"));
        }
    }

    suite.record("free-fermion-vs-exact", fermion_vs_exact(), 1e-8, false);
    suite.record("limit-vs-free-fermion-n2000", limit_vs_fermion(&opts), 1e-3, false);
    suite.record("thermo-consistency-finite", finite_consistency(), 1e-5, false);
    suite.record("thermo-consistency-limit-energy", limit_consistency(&opts, false), 1e-6, true);
    suite.record("thermo-consistency-limit-magnetization", limit_consistency(&opts, true), 1e-6, true);
    if opts.magnetization == MagnetizationFormula::AsPrinted {
        if let Some(check) = suite.checks.last_mut() {
            if !check.passed {
                check.note = Some(
                    "documented discrepancy: the printed magnetization integrand is not the ln Z field derivative"
                        .into(),
                );
            }
        }
    }
    suite.record("two-route-witness", two_route_witness(&opts), 1e-8, true);
    suite.record("symmetry-limit", limit_symmetry(&opts), 1e-12, true);
    suite.record("symmetry-finite-field-reversal", finite_field_reversal(), 1e-12, false);

    let trace = TraceConfig::default();
    let tc = zero_field_critical_temperature(1.0, &trace, &opts).and_then(|t| {
        let t = t.ok_or_else(|| crate::Error::Domain("zero-field boundary not bracketed".into()))?;
        let residual = (xx_witness(t, 0.0, 1.0, &opts)?.value - 1.0).abs();
        suite.notes.push(format!("B=0 critical kT/|J| = {t}"));
        Ok(residual)
    });
    suite.record("boundary-zero-field-root", tc, 1e-6, false);
    let bc = low_temperature_critical_field(1.0, &opts).map(|e| {
        suite.notes.push(format!(
            "kT->0 critical B/|J|: {} at kT=1e-3, {} extrapolated, closed form {}",
            e.at_kt_1e_3, e.extrapolated, e.closed_form
        ));
        (e.at_kt_1e_3 - zero_temperature_critical_field(1.0)).abs() / zero_temperature_critical_field(1.0)
    });
    suite.record("boundary-zero-temperature-field", bc, 0.02, false);

    let lowtemp = lowtemp_ferro_witness(1_000_000, 0.2, 0.4, 1.0, LowTempExponent::Extensive).map(|r| (r.value - 1.0).abs());
    suite.record("lowtemp-ferro-witness-unity", lowtemp, 1e-3, false);

    ValidationReport { checks: suite.checks, notes: suite.notes }
}
