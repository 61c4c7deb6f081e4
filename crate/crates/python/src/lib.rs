//! Python module `thermowitness_py`.

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use thermowitness::exactdiag::{concurrence, reduced_pair_state, thermal_observables};
use thermowitness::thermolimit::{
    boundary_trace as trace, lowtemp_ferro_witness as lowtemp, region_scan as scan, xx_witness as limit_witness,
    zero_temperature_critical_field as zero_t_field, Axis, GridAxes, LowTempExponent, MagnetizationFormula,
    TraceConfig, XxOptions,
};
use thermowitness::validation::{run_suite, ValidationConfig};
use thermowitness::witness::{finite_witness, separable_sweep as sweep, witness_value as measured};
use thermowitness::{validate_spec, Boundary, Couplings, Error, Family, SignConvention, SiteCount, ValidatedSpec};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::QuadratureNonConvergence { .. }
        | Error::StepUnderflow(_)
        | Error::NotPositiveSemidefinite(_)
        | Error::Domain(_) => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn options(printed_magnetization: bool) -> XxOptions {
    XxOptions {
        magnetization: if printed_magnetization { MagnetizationFormula::AsPrinted } else { MagnetizationFormula::default() },
        ..XxOptions::default()
    }
}

/// Witness verdict: `value = |U + B M| / (N |J|)`, entangled iff `value > 1`.
#[pyclass(name = "WitnessReport", frozen, get_all, skip_from_py_object)]
pub struct PyWitnessReport {
    value: f64,
    threshold: f64,
    entangled: bool,
    source: String,
    energy: f64,
    magnetization: f64,
    field: f64,
    coupling: f64,
    /// `None` in the thermodynamic limit, where energy and magnetization are per site.
    n_sites: Option<usize>,
}

impl From<thermowitness::WitnessReport> for PyWitnessReport {
    fn from(r: thermowitness::WitnessReport) -> Self {
        let source = match r.source {
            thermowitness::WitnessSource::FiniteExact => "finite-exact",
            thermowitness::WitnessSource::ThermodynamicLimit => "thermodynamic-limit",
            thermowitness::WitnessSource::LowtempApprox => "lowtemp-approx",
            thermowitness::WitnessSource::ExternalMeasurement => "external-measurement",
        };
        PyWitnessReport {
            value: r.value,
            threshold: r.threshold,
            entangled: r.entangled,
            source: source.to_string(),
            energy: r.inputs.energy,
            magnetization: r.inputs.magnetization,
            field: r.inputs.field,
            coupling: r.inputs.coupling,
            n_sites: r.inputs.n_sites.finite(),
        }
    }
}

#[pymethods]
impl PyWitnessReport {
    fn __repr__(&self) -> String {
        format!("WitnessReport(value={}, entangled={}, source='{}')", self.value, self.entangled, self.source)
    }
}

/// Finite Heisenberg chain.
#[pyclass(name = "ModelSpec", frozen)]
pub struct PyModelSpec {
    inner: ValidatedSpec,
}

#[pymethods]
impl PyModelSpec {
    #[new]
    #[pyo3(signature = (family, n_sites, j=1.0, b=0.0, boundary="periodic", sign="singlet-ground", jy=None, jz=None))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        family: &str,
        n_sites: usize,
        j: f64,
        b: f64,
        boundary: &str,
        sign: &str,
        jy: Option<f64>,
        jz: Option<f64>,
    ) -> PyResult<Self> {
        let family: Family = family.parse().map_err(to_py)?;
        let couplings = match family {
            Family::XXX => Couplings::isotropic(j),
            Family::XX => Couplings::xx(j),
            Family::GeneralXYZ => Couplings { jx: j, jy: jy.unwrap_or(j), jz: jz.unwrap_or(j) },
        };
        if family != Family::GeneralXYZ && (jy.is_some() || jz.is_some()) {
            return Err(PyValueError::new_err("jy and jz only apply to the xyz family"));
        }
        let spec = thermowitness::ModelSpec {
            family,
            couplings,
            field: b,
            n_sites: SiteCount::Finite(n_sites),
            boundary: boundary.parse::<Boundary>().map_err(to_py)?,
            sign_convention: sign.parse::<SignConvention>().map_err(to_py)?,
        };
        Ok(PyModelSpec { inner: validate_spec(spec).map_err(to_py)? })
    }

    #[getter]
    fn n_sites(&self) -> usize {
        self.inner.finite_sites().unwrap_or(0)
    }

    #[getter]
    fn field(&self) -> f64 {
        self.inner.field()
    }

    #[getter]
    fn witness_eligible(&self) -> bool {
        self.inner.witness_eligible()
    }

    /// `(U, M, ln Z)` at temperature `kt`, totals over the chain.
    fn thermal(&self, kt: f64) -> PyResult<(f64, f64, f64)> {
        let obs = thermal_observables(&self.inner, kt).map_err(to_py)?;
        Ok((obs.energy, obs.magnetization, obs.log_partition))
    }

    /// Per-bond `(xx, yy, zz)` correlators at temperature `kt`.
    fn bond_correlators(&self, kt: f64) -> PyResult<Vec<(f64, f64, f64)>> {
        let obs = thermal_observables(&self.inner, kt).map_err(to_py)?;
        Ok(obs.bond_correlators.iter().map(|c| (c[0], c[1], c[2])).collect())
    }

    fn witness(&self, kt: f64) -> PyResult<PyWitnessReport> {
        Ok(finite_witness(&self.inner, kt).map_err(to_py)?.0.into())
    }

    /// Wootters concurrence of the reduced state of sites `a` and `b`.
    fn concurrence(&self, kt: f64, a: usize, b: usize) -> PyResult<f64> {
        Ok(concurrence(&reduced_pair_state(&self.inner, kt, (a, b)).map_err(to_py)?))
    }

    fn __repr__(&self) -> String {
        let s = self.inner.spec();
        format!(
            "ModelSpec(family={}, n_sites={}, couplings=({}, {}, {}), b={}, boundary={:?}, sign={:?})",
            s.family, self.n_sites(), s.couplings.jx, s.couplings.jy, s.couplings.jz, s.field, s.boundary,
            s.sign_convention
        )
    }
}

/// Witness from measured totals `U`, `M` of an `n_sites` chain.
#[pyfunction]
fn witness_value(u: f64, m: f64, b: f64, j: f64, n_sites: usize) -> PyResult<PyWitnessReport> {
    Ok(measured(u, m, b, j, n_sites).map_err(to_py)?.into())
}

/// Thermodynamic-limit XX witness.
#[pyfunction]
#[pyo3(signature = (kt, b, j=1.0, printed_magnetization=false))]
fn xx_witness(kt: f64, b: f64, j: f64, printed_magnetization: bool) -> PyResult<PyWitnessReport> {
    Ok(limit_witness(kt, b, j, &options(printed_magnetization)).map_err(to_py)?.into())
}

/// Low-temperature ferromagnetic XXX witness (`J > 0`, `B > 0`).
#[pyfunction]
#[pyo3(signature = (n_sites, kt, b, j=1.0))]
fn lowtemp_ferro_witness(n_sites: usize, kt: f64, b: f64, j: f64) -> PyResult<PyWitnessReport> {
    Ok(lowtemp(n_sites, kt, b, j, LowTempExponent::default()).map_err(to_py)?.into())
}

/// `(kT/|J|, B/|J|, W or None, entangled)` rows, `B` outer and `kT` inner.
#[pyfunction]
#[pyo3(signature = (kt_min=0.05, kt_max=3.0, kt_count=60, b_min=0.0, b_max=3.0, b_count=60, j=1.0))]
#[allow(clippy::too_many_arguments)]
fn region_scan(
    kt_min: f64,
    kt_max: f64,
    kt_count: usize,
    b_min: f64,
    b_max: f64,
    b_count: usize,
    j: f64,
) -> PyResult<Vec<(f64, f64, Option<f64>, bool)>> {
    let axes = GridAxes {
        kt_over_j: Axis { min: kt_min, max: kt_max, count: kt_count },
        b_over_j: Axis { min: b_min, max: b_max, count: b_count },
        coupling: j,
    };
    let grid = scan(&axes, &XxOptions::default()).map_err(to_py)?;
    Ok(grid.cells.iter().map(|c| (c.kt_over_j, c.b_over_j, c.witness, c.entangled)).collect())
}

/// `(B/|J|, kT_c/|J| or None)` for each field.
#[pyfunction]
#[pyo3(signature = (b_values, j=1.0, kt_min=0.01, kt_max=5.0, tolerance=1e-6))]
fn boundary_trace(b_values: Vec<f64>, j: f64, kt_min: f64, kt_max: f64, tolerance: f64) -> PyResult<Vec<(f64, Option<f64>)>> {
    let config = TraceConfig { kt_min, kt_max, tolerance, ..TraceConfig::default() };
    let curve = trace(&b_values, j, &config, &XxOptions::default()).map_err(to_py)?;
    Ok(curve.points.iter().map(|p| (p.b_over_j, p.critical_kt())).collect())
}

#[pyfunction]
#[pyo3(signature = (j=1.0))]
fn zero_temperature_critical_field(j: f64) -> f64 {
    zero_t_field(j)
}

/// Largest witness over random product states of an `n_sites` ring.
#[pyfunction]
#[pyo3(signature = (n_samples, n_sites, family="xxx", seed=2005))]
fn separable_sweep(n_samples: usize, n_sites: usize, family: &str, seed: u64) -> PyResult<f64> {
    let family: Family = family.parse().map_err(to_py)?;
    Ok(sweep(n_samples, n_sites, family, seed).map_err(to_py)?.max_witness)
}

/// Runs the self-check suite; returns `(all_passed, [(name, measured, tolerance, passed)])`.
#[pyfunction]
#[pyo3(signature = (printed_magnetization=false, tolerance=None, samples=100_000, seed=2005))]
fn validate(
    printed_magnetization: bool,
    tolerance: Option<f64>,
    samples: usize,
    seed: u64,
) -> (bool, Vec<(String, f64, f64, bool)>) {
    let config =
        ValidationConfig { options: options(printed_magnetization), identity_tolerance: tolerance, seed, sweep_samples: samples };
    let report = run_suite(&config);
    let checks = report.checks.iter().map(|c| (c.name.clone(), c.measured, c.tolerance, c.passed)).collect();
    (report.all_passed(), checks)
}

#[pymodule]
pub fn thermowitness_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModelSpec>()?;
    m.add_class::<PyWitnessReport>()?;
    m.add_function(wrap_pyfunction!(witness_value, m)?)?;
    m.add_function(wrap_pyfunction!(xx_witness, m)?)?;
    m.add_function(wrap_pyfunction!(lowtemp_ferro_witness, m)?)?;
    m.add_function(wrap_pyfunction!(region_scan, m)?)?;
    m.add_function(wrap_pyfunction!(boundary_trace, m)?)?;
    m.add_function(wrap_pyfunction!(zero_temperature_critical_field, m)?)?;
    m.add_function(wrap_pyfunction!(separable_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    Ok(())
}
