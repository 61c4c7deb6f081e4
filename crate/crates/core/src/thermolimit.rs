//! Thermodynamic-limit XX chain, the ferromagnetic XXX low-temperature
//! approximation, and the entanglement region in the `(kT/|J|, B/|J|)` plane.
//!
//! With `K = J/kT`, `C = B/kT` and `f = |2K cos ω - C|` the per-site
//! quantities of the infinite XX chain are
//!
//! * `ln Z / N = (1/π) ∫₀^π ln(2 cosh f) dω`
//! * `U / N = -(kT/π) ∫₀^π f tanh f dω`
//! * `M / N = (1/π) ∫₀^π tanh(C - 2K cos ω) dω`
//!
//! All integrands are written through `g = 2K cos ω - C` (even or odd in
//! `g`), which keeps them analytic across the zero of `f`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::freefermion::ln_2cosh;
use crate::model::{to_dimensionless, DimensionlessPoint, ThermalPoint};
use crate::quadrature::{integrate, QuadConfig};
use crate::witness::{witness_per_site, WitnessReport, WitnessSource};

/// `sqrt(2K² + 2K² cos 2ω - 4CK cos ω + C²)`, which equals `|2K cos ω - C|`.
pub fn dispersion_f(k: f64, c: f64, omega: f64) -> f64 {
    let radicand = 2.0 * k * k + 2.0 * k * k * (2.0 * omega).cos() - 4.0 * c * k * omega.cos() + c * c;
    radicand.max(0.0).sqrt()
}

/// Which magnetization integrand to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MagnetizationFormula {
    /// `(1/β) ∂(ln Z)/∂B`.
    #[default]
    LogPartitionDerivative,
    /// `-(1/π) ∫ 4K² cos²ω / f · tanh f dω`, the literal printed integrand.
    /// It is nonzero at `B = 0` and does not depend on the sign of `C`.
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct XxOptions {
    pub quad: QuadConfig,
    pub magnetization: MagnetizationFormula,
}

fn g(p: DimensionlessPoint, omega: f64) -> f64 {
    2.0 * p.k * omega.cos() - p.c
}

/// Breakpoints for the integrals over `[0, π]`: the zero of `g` when it has
/// one, then points at geometric distances from the place where `|g|` is
/// smallest. Near that place `tanh g` turns over within `1/(2|K| sin ω)`
/// (or `1/sqrt|K|` at a band edge), which can be far narrower than the
/// spacing of the Kronrod nodes on the initial panels.
fn omega_breaks(p: DimensionlessPoint) -> Vec<f64> {
    if p.k == 0.0 {
        return Vec::new();
    }
    let ratio = p.c / (2.0 * p.k);
    let center = if ratio.abs() <= 1.0 {
        ratio.acos()
    } else if ratio > 0.0 {
        0.0
    } else {
        PI
    };
    let slope = 2.0 * p.k.abs() * center.sin();
    let widths = [1.0 / slope, 1.0 / p.k.abs().sqrt()];
    let mut breaks = vec![center];
    for width in widths.into_iter().filter(|w| w.is_finite() && *w < 1.0) {
        let mut d = width;
        while d < 1.0 {
            breaks.push(center - d);
            breaks.push(center + d);
            d *= 4.0;
        }
    }
    breaks
}

/// Integral over `[0, π]` with the panels split by [`omega_breaks`].
fn integrate_omega<F: Fn(f64) -> f64>(p: DimensionlessPoint, quad: &QuadConfig, integrand: F) -> Result<f64> {
    Ok(integrate(integrand, 0.0, PI, &omega_breaks(p), quad)?.value)
}

pub fn xx_log_partition_density(k: f64, c: f64, quad: &QuadConfig) -> Result<f64> {
    let p = DimensionlessPoint { k, c };
    Ok(integrate_omega(p, quad, |w| ln_2cosh(g(p, w)))? / PI)
}

pub fn xx_internal_energy(kt: f64, b: f64, j: f64, quad: &QuadConfig) -> Result<f64> {
    let p = to_dimensionless(j, b, kt)?;
    // kT·g·tanh(g), kept O(|J|) so the absolute tolerance stays meaningful
    let integral = integrate_omega(p, quad, |w| (2.0 * j * w.cos() - b) * g(p, w).tanh())?;
    Ok(-integral / PI)
}

pub fn xx_magnetization(kt: f64, b: f64, j: f64, opts: &XxOptions) -> Result<f64> {
    let p = to_dimensionless(j, b, kt)?;
    let integral = match opts.magnetization {
        // tanh(f)·(C - 2K cos ω)/f with the sign of g absorbed into tanh
        MagnetizationFormula::LogPartitionDerivative => integrate_omega(p, &opts.quad, |w| (-g(p, w)).tanh())?,
        MagnetizationFormula::AsPrinted => -integrate_omega(p, &opts.quad, |w| {
            let f = g(p, w).abs();
            let tanh_over_f = if f < 1e-8 { 1.0 - f * f / 3.0 } else { f.tanh() / f };
            4.0 * p.k * p.k * w.cos().powi(2) * tanh_over_f
        })?,
    };
    Ok(integral / PI)
}

/// Witness composed from the energy and magnetization integrals.
pub fn xx_witness(kt: f64, b: f64, j: f64, opts: &XxOptions) -> Result<WitnessReport> {
    if j == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    let u = xx_internal_energy(kt, b, j, &opts.quad)?;
    let m = xx_magnetization(kt, b, j, opts)?;
    witness_per_site(u, m, b, j, WitnessSource::ThermodynamicLimit)
}

/// `(2/π) |∫₀^π cos ω tanh(2K cos ω - C) dω|`, the same witness as one
/// integral (the field terms of `U` and `B·M` cancel).
pub fn xx_witness_single_integral(kt: f64, b: f64, j: f64, quad: &QuadConfig) -> Result<f64> {
    if j == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    let p = to_dimensionless(j, b, kt)?;
    let integral = integrate_omega(p, quad, |w| w.cos() * g(p, w).tanh())?;
    Ok(2.0 * integral.abs() / PI)
}

/// `2|J| sqrt(1 - π²/16)`: the field at which the zero-temperature witness
/// `(4/π) sqrt(1 - B²/4J²)` drops to 1.
pub fn zero_temperature_critical_field(j: f64) -> f64 {
    2.0 * j.abs() * (1.0 - PI * PI / 16.0).sqrt()
}

/// One sampled axis, `count` evenly spaced values from `min` to `max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.min],
            n => (0..n).map(|i| self.min + (self.max - self.min) * i as f64 / (n - 1) as f64).collect(),
        }
    }
}

/// Grid in reduced units `kT/|J|` and `B/|J|`; `coupling` only fixes the sign
/// and scale of `J`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridAxes {
    pub kt_over_j: Axis,
    pub b_over_j: Axis,
    pub coupling: f64,
}

pub const DEFAULT_KT_MIN: f64 = 0.05;

impl Default for GridAxes {
    fn default() -> Self {
        GridAxes {
            kt_over_j: Axis { min: DEFAULT_KT_MIN, max: 3.0, count: 60 },
            b_over_j: Axis { min: 0.0, max: 3.0, count: 60 },
            coupling: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionCell {
    pub kt_over_j: f64,
    pub b_over_j: f64,
    /// `None` when the cell's quadrature failed; see `error`.
    pub witness: Option<f64>,
    pub entangled: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Witness over the grid, row-major with `B` outer and `kT` inner.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionGrid {
    pub axes: GridAxes,
    pub cells: Vec<RegionCell>,
}

impl RegionGrid {
    pub fn cell(&self, b_index: usize, kt_index: usize) -> &RegionCell {
        &self.cells[b_index * self.axes.kt_over_j.count + kt_index]
    }

    pub fn entangled_count(&self) -> usize {
        self.cells.iter().filter(|c| c.entangled).count()
    }
}

pub fn region_scan(axes: &GridAxes, opts: &XxOptions) -> Result<RegionGrid> {
    let (kt_axis, b_axis) = (axes.kt_over_j, axes.b_over_j);
    if axes.coupling == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    if !(kt_axis.min > 0.0 && kt_axis.max >= kt_axis.min) {
        return Err(Error::Domain(format!("kT axis must be positive and increasing, got {kt_axis:?}")));
    }
    if !(b_axis.min >= 0.0 && b_axis.max >= b_axis.min) {
        return Err(Error::Domain(format!("B axis must be non-negative and increasing, got {b_axis:?}")));
    }
    let scale = axes.coupling.abs();
    let kts = kt_axis.values();
    let points: Vec<(f64, f64)> = b_axis.values().into_iter().flat_map(|b| kts.iter().map(move |&t| (t, b))).collect();
    let cells = points
        .into_par_iter()
        .map(|(t, b)| match xx_witness(t * scale, b * scale, axes.coupling, opts) {
            Ok(r) => RegionCell { kt_over_j: t, b_over_j: b, witness: Some(r.value), entangled: r.entangled, error: None },
            Err(e) => RegionCell { kt_over_j: t, b_over_j: b, witness: None, entangled: false, error: Some(e.to_string()) },
        })
        .collect();
    Ok(RegionGrid { axes: *axes, cells })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceConfig {
    pub kt_min: f64,
    pub kt_max: f64,
    /// Target `|W - 1|` at each traced point.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig { kt_min: 0.01, kt_max: 5.0, tolerance: 1e-6, max_iterations: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BoundaryOutcome {
    Crossing { kt_over_j: f64, residual: f64 },
    NoCrossing { w_at_kt_min: f64, w_at_kt_max: f64 },
    Failed { message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryPoint {
    pub b_over_j: f64,
    pub outcome: BoundaryOutcome,
}

impl BoundaryPoint {
    pub fn critical_kt(&self) -> Option<f64> {
        match self.outcome {
            BoundaryOutcome::Crossing { kt_over_j, .. } => Some(kt_over_j),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryCurve {
    pub points: Vec<BoundaryPoint>,
    pub config: TraceConfig,
}

impl BoundaryCurve {
    /// `(B/|J|, kT_c/|J|)` of the points that bracket a crossing.
    pub fn crossings(&self) -> Vec<(f64, f64)> {
        self.points.iter().filter_map(|p| p.critical_kt().map(|t| (p.b_over_j, t))).collect()
    }

    /// Pairs of consecutive crossings where `kT_c` increases with `B`.
    pub fn monotonicity_violations(&self) -> Vec<((f64, f64), (f64, f64))> {
        self.crossings().windows(2).filter(|w| w[1].1 > w[0].1).map(|w| (w[0], w[1])).collect()
    }
}

/// Bisection for `W(x) = 1` on `[lo, hi]`; `None` when the ends do not bracket.
pub(crate) fn bisect_unit_crossing<F: Fn(f64) -> Result<f64>>(
    w: F,
    mut lo: f64,
    mut hi: f64,
    tolerance: f64,
    max_iterations: usize,
) -> Result<std::result::Result<(f64, f64), (f64, f64)>> {
    let (w_lo, w_hi) = (w(lo)?, w(hi)?);
    let (mut f_lo, f_hi) = (w_lo - 1.0, w_hi - 1.0);
    if f_lo.abs() < tolerance {
        return Ok(Ok((lo, f_lo)));
    }
    if f_hi.abs() < tolerance {
        return Ok(Ok((hi, f_hi)));
    }
    if f_lo.signum() == f_hi.signum() {
        return Ok(Err((w_lo, w_hi)));
    }
    for _ in 0..max_iterations {
        let mid = 0.5 * (lo + hi);
        let f_mid = w(mid)? - 1.0;
        if f_mid.abs() < tolerance || mid <= lo || mid >= hi {
            return Ok(Ok((mid, f_mid)));
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Domain(format!("bisection did not reach |W-1| < {tolerance:e} in {max_iterations} steps")))
}

/// Temperature at which the limit witness crosses 1, for each field in
/// reduced units. Non-bracketing fields are reported, not fatal.
pub fn boundary_trace(b_values: &[f64], j: f64, config: &TraceConfig, opts: &XxOptions) -> Result<BoundaryCurve> {
    if j == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    if !(config.kt_min > 0.0 && config.kt_max > config.kt_min) {
        return Err(Error::Domain(format!("invalid temperature bracket [{}, {}]", config.kt_min, config.kt_max)));
    }
    let scale = j.abs();
    let mut sorted = b_values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let points = sorted
        .into_par_iter()
        .map(|b| {
            let w = |t: f64| Ok(xx_witness(t * scale, b * scale, j, opts)?.value);
            let outcome = match bisect_unit_crossing(w, config.kt_min, config.kt_max, config.tolerance, config.max_iterations) {
                Ok(Ok((kt_over_j, residual))) => BoundaryOutcome::Crossing { kt_over_j, residual },
                Ok(Err((w_at_kt_min, w_at_kt_max))) => BoundaryOutcome::NoCrossing { w_at_kt_min, w_at_kt_max },
                Err(e) => BoundaryOutcome::Failed { message: e.to_string() },
            };
            BoundaryPoint { b_over_j: b, outcome }
        })
        .collect();
    Ok(BoundaryCurve { points, config: *config })
}

/// Field (in units of `|J|`) at which the witness crosses 1 at fixed `kT/|J|`.
pub fn critical_field(kt_over_j: f64, j: f64, tolerance: f64, opts: &XxOptions) -> Result<Option<f64>> {
    if j == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    let scale = j.abs();
    let w = |b: f64| Ok(xx_witness(kt_over_j * scale, b * scale, j, opts)?.value);
    Ok(bisect_unit_crossing(w, 0.0, 2.0, tolerance, 200)?.ok().map(|(b, _)| b))
}

/// Root in `kT/|J|` of the zero-field witness.
pub fn zero_field_critical_temperature(j: f64, config: &TraceConfig, opts: &XxOptions) -> Result<Option<f64>> {
    Ok(boundary_trace(&[0.0], j, config, opts)?.points[0].critical_kt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowTemperatureEndpoint {
    pub at_kt_1e_3: f64,
    pub at_kt_1e_2: f64,
    /// Richardson combination assuming a `kT²` approach.
    pub extrapolated: f64,
    pub closed_form: f64,
}

/// The `kT → 0` end of the boundary, evaluated at `kT = 10⁻³|J|` and
/// `10⁻²|J|` and extrapolated; `kT` itself is never zero.
pub fn low_temperature_critical_field(j: f64, opts: &XxOptions) -> Result<LowTemperatureEndpoint> {
    let fine = critical_field(1e-3, j, 1e-9, opts)?
        .ok_or_else(|| Error::Domain("no critical field at kT = 1e-3".into()))?;
    let coarse = critical_field(1e-2, j, 1e-9, opts)?
        .ok_or_else(|| Error::Domain("no critical field at kT = 1e-2".into()))?;
    Ok(LowTemperatureEndpoint {
        at_kt_1e_3: fine,
        at_kt_1e_2: coarse,
        extrapolated: (100.0 * fine - coarse) / 99.0,
        closed_form: zero_temperature_critical_field(1.0),
    })
}

/// Leading exponent of the low-temperature ferromagnetic partition function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LowTempExponent {
    /// `N β (J + B)`: the fully polarized ground level of `N` spins.
    #[default]
    Extensive,
    /// `B β (J + B)` as printed.
    AsPrinted,
}

fn lowtemp_check(n_sites: usize, kt: f64, b: f64, j: f64) -> Result<f64> {
    let beta = ThermalPoint::new(kt)?.beta();
    if j <= 0.0 {
        return Err(Error::Domain(format!(
            "the ferromagnetic approximation takes the coupling magnitude J > 0, got {j}"
        )));
    }
    if b <= 0.0 {
        return Err(Error::Domain(format!("the ferromagnetic approximation needs B > 0, got {b}")));
    }
    if n_sites == 0 {
        return Err(Error::InvalidModel("n_sites must be at least 1".into()));
    }
    Ok(beta)
}

/// `ln Z = E β (J + B) + ln(1 + e^{-2βB} N / sqrt(8πβJ))` with `E = N`
/// (extensive) or `E = B` (as printed). Only the ground level and the
/// one-magnon band are kept, so it is meaningful for `kT ≪ J`.
pub fn lowtemp_ferro_log_partition(n_sites: usize, kt: f64, b: f64, j: f64, exponent: LowTempExponent) -> Result<f64> {
    let beta = lowtemp_check(n_sites, kt, b, j)?;
    let n = n_sites as f64;
    let lead = match exponent {
        LowTempExponent::Extensive => n,
        LowTempExponent::AsPrinted => b,
    };
    let x = (-2.0 * beta * b).exp() * n / (8.0 * PI * beta * j).sqrt();
    Ok(lead * beta * (j + b) + x.ln_1p())
}

/// Total `(U, M)` from `U = -∂lnZ/∂β`, `M = (1/β) ∂lnZ/∂B`, differentiated
/// in closed form.
pub fn lowtemp_ferro_observables(n_sites: usize, kt: f64, b: f64, j: f64, exponent: LowTempExponent) -> Result<(f64, f64)> {
    let beta = lowtemp_check(n_sites, kt, b, j)?;
    let n = n_sites as f64;
    let x = (-2.0 * beta * b).exp() * n / (8.0 * PI * beta * j).sqrt();
    let occupied = x / (1.0 + x);
    // ∂x/∂β = -x (2B + 1/(2β)), ∂x/∂B = -2βx
    let (u_lead, dlead_db) = match exponent {
        LowTempExponent::Extensive => (-n * (j + b), n * beta),
        LowTempExponent::AsPrinted => (-b * (j + b), beta * (j + 2.0 * b)),
    };
    let u = u_lead + occupied * (2.0 * b + 0.5 * kt);
    let m = (dlead_db - 2.0 * beta * occupied) / beta;
    Ok((u, m))
}

pub fn lowtemp_ferro_witness(n_sites: usize, kt: f64, b: f64, j: f64, exponent: LowTempExponent) -> Result<WitnessReport> {
    let (u, m) = lowtemp_ferro_observables(n_sites, kt, b, j, exponent)?;
    Ok(crate::witness::witness_value(u, m, b, j, n_sites)?.with_source(WitnessSource::LowtempApprox))
}
