use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use super::hamiltonian::{build_hamiltonian_capped, sigma_z, HamiltonianMatrix, DEFAULT_SITE_CAP};
use crate::error::{Error, Result};
use crate::model::{ThermalPoint, ValidatedSpec};

/// Per-bond `(⟨σxσx⟩, ⟨σyσy⟩, ⟨σzσz⟩)`.
pub type CorrelatorTriple = [f64; 3];

#[derive(Debug, Clone, Serialize)]
pub struct ThermalObservables {
    pub kt: f64,
    /// Total internal energy `⟨H⟩`.
    pub energy: f64,
    /// Total magnetization `Σ⟨σz_j⟩`.
    pub magnetization: f64,
    pub bonds: Vec<(usize, usize)>,
    pub bond_correlators: Vec<CorrelatorTriple>,
    pub log_partition: f64,
}

#[derive(Debug)]
struct Sector {
    states: Vec<usize>,
    vectors: DMatrix<f64>,
}

/// Full eigendecomposition of a finite chain, with per-eigenstate expectation
/// values cached so thermal averages at any temperature are cheap.
#[derive(Debug)]
pub struct Spectrum {
    n_sites: usize,
    bonds: Vec<(usize, usize)>,
    sectors: Vec<Sector>,
    /// `(sector, column)` of each basis state.
    position: Vec<(usize, usize)>,
    /// `(sector, column)` of each eigenstate, in the order of `energies`.
    eigenstates: Vec<(usize, usize)>,
    energies: Vec<f64>,
    magnetizations: Vec<f64>,
    correlators: Vec<Vec<CorrelatorTriple>>,
    ground_energy: f64,
}

/// Eigenvalues and eigenvector columns of a real symmetric block. faer's
/// solver is several times faster than nalgebra's on the larger sectors;
/// nalgebra is kept as the fallback if it ever reports non-convergence.
fn symmetric_eigen(block: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let k = block.nrows();
    let dense = faer::Mat::<f64>::from_fn(k, k, |i, j| block[(i, j)]);
    match dense.self_adjoint_eigen(faer::Side::Lower) {
        Ok(evd) => {
            let (s, u) = (evd.S(), evd.U());
            ((0..k).map(|i| s[i]).collect(), DMatrix::from_fn(k, k, |i, j| u[(i, j)]))
        }
        Err(_) => {
            let eig = SymmetricEigen::new(block);
            (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
        }
    }
}

impl Spectrum {
    pub fn compute(spec: &ValidatedSpec) -> Result<Spectrum> {
        Self::compute_capped(spec, DEFAULT_SITE_CAP)
    }

    pub fn compute_capped(spec: &ValidatedSpec, cap: usize) -> Result<Spectrum> {
        let h = build_hamiltonian_capped(spec, cap)?;
        Ok(Self::from_hamiltonian(&h))
    }

    pub fn from_hamiltonian(h: &HamiltonianMatrix) -> Spectrum {
        let n = h.n_sites();
        let dim = h.dim();
        let mut grouped = vec![Vec::new(); h.n_sectors()];
        for s in 0..dim {
            grouped[h.sector_label(s)].push(s);
        }
        grouped.retain(|g| !g.is_empty());

        let mut position = vec![(0, 0); dim];
        for (k, states) in grouped.iter().enumerate() {
            for (col, &s) in states.iter().enumerate() {
                position[s] = (k, col);
            }
        }

        let decomposed: Vec<(Sector, Vec<f64>)> = grouped
            .into_par_iter()
            .map(|states| {
                let mut local = vec![usize::MAX; dim];
                for (col, &s) in states.iter().enumerate() {
                    local[s] = col;
                }
                let (values, vectors) = symmetric_eigen(h.block(&states, &local));
                (Sector { states, vectors }, values)
            })
            .collect();

        let mut sectors = Vec::with_capacity(decomposed.len());
        let mut eigenstates = Vec::with_capacity(dim);
        let mut energies = Vec::with_capacity(dim);
        for (k, (sector, values)) in decomposed.into_iter().enumerate() {
            for (col, e) in values.into_iter().enumerate() {
                eigenstates.push((k, col));
                energies.push(e);
            }
            sectors.push(sector);
        }

        let mut spectrum = Spectrum {
            n_sites: n,
            bonds: h.bonds().to_vec(),
            sectors,
            position,
            eigenstates,
            ground_energy: energies.iter().copied().fold(f64::INFINITY, f64::min),
            energies,
            magnetizations: Vec::new(),
            correlators: Vec::new(),
        };
        let per_state: Vec<(f64, Vec<CorrelatorTriple>)> = (0..dim)
            .into_par_iter()
            .map(|idx| spectrum.eigenstate_expectations(idx))
            .collect();
        (spectrum.magnetizations, spectrum.correlators) = per_state.into_iter().unzip();
        spectrum
    }

    fn amplitude(&self, sector: usize, col: usize, state: usize) -> f64 {
        let (k, row) = self.position[state];
        if k == sector {
            self.sectors[sector].vectors[(row, col)]
        } else {
            0.0
        }
    }

    fn eigenstate_expectations(&self, idx: usize) -> (f64, Vec<CorrelatorTriple>) {
        let (k, col) = self.eigenstates[idx];
        let sector = &self.sectors[k];
        let v = sector.vectors.column(col);
        let mut mag = 0.0;
        let mut corr = vec![[0.0; 3]; self.bonds.len()];
        for (row, &s) in sector.states.iter().enumerate() {
            let amp = v[row];
            if amp == 0.0 {
                continue;
            }
            let p = amp * amp;
            mag += p * (0..self.n_sites).map(|i| sigma_z(s, i)).sum::<f64>();
            for (b, &(i, j)) in self.bonds.iter().enumerate() {
                let aligned = (s >> i & 1) == (s >> j & 1);
                let flipped = self.amplitude(k, col, s ^ (1 << i) ^ (1 << j));
                let cross = amp * flipped;
                corr[b][0] += cross;
                corr[b][1] += if aligned { -cross } else { cross };
                corr[b][2] += if aligned { p } else { -p };
            }
        }
        (mag, corr)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn bonds(&self) -> &[(usize, usize)] {
        &self.bonds
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn ground_energy(&self) -> f64 {
        self.ground_energy
    }

    /// Boltzmann weights `exp(-β(E - E_min))` and the log partition function.
    fn weights(&self, beta: f64) -> (Vec<f64>, f64, f64) {
        let w: Vec<f64> = self.energies.iter().map(|e| (-beta * (e - self.ground_energy)).exp()).collect();
        let z: f64 = w.iter().sum();
        let ln_z = -beta * self.ground_energy + z.ln();
        (w, z, ln_z)
    }

    pub fn log_partition(&self, beta: f64) -> f64 {
        self.weights(beta).2
    }

    pub fn thermal(&self, point: ThermalPoint) -> ThermalObservables {
        let (w, z, ln_z) = self.weights(point.beta());
        let mut energy = 0.0;
        let mut magnetization = 0.0;
        let mut corr = vec![[0.0; 3]; self.bonds.len()];
        for (idx, &wi) in w.iter().enumerate() {
            if wi == 0.0 {
                continue;
            }
            energy += wi * self.energies[idx];
            magnetization += wi * self.magnetizations[idx];
            for (acc, c) in corr.iter_mut().zip(&self.correlators[idx]) {
                for a in 0..3 {
                    acc[a] += wi * c[a];
                }
            }
        }
        for acc in &mut corr {
            for a in acc.iter_mut() {
                *a /= z;
            }
        }
        ThermalObservables {
            kt: point.kt(),
            energy: energy / z,
            magnetization: magnetization / z,
            bonds: self.bonds.clone(),
            bond_correlators: corr,
            log_partition: ln_z,
        }
    }

    /// Thermal state traced down to sites `(a, b)`, real entries in the
    /// ordering `|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩` (first index is site `a`).
    pub fn pair_density(&self, point: ThermalPoint, a: usize, b: usize) -> Result<[[f64; 4]; 4]> {
        if a == b || a >= self.n_sites || b >= self.n_sites {
            return Err(Error::InvalidSitePair(a, b));
        }
        let (w, z, _) = self.weights(point.beta());
        let local = |s: usize| 2 * (s >> a & 1) + (s >> b & 1);
        let with_pair = |s: usize, q: usize| {
            let cleared = s & !(1 << a) & !(1 << b);
            cleared | ((q >> 1) << a) | ((q & 1) << b)
        };
        let mut rho = [[0.0; 4]; 4];
        for (idx, &wi) in w.iter().enumerate() {
            if wi == 0.0 {
                continue;
            }
            let (k, col) = self.eigenstates[idx];
            let sector = &self.sectors[k];
            let v = sector.vectors.column(col);
            for (row, &s) in sector.states.iter().enumerate() {
                let amp = v[row];
                if amp == 0.0 {
                    continue;
                }
                let p = local(s);
                for (q, entry) in rho[p].iter_mut().enumerate() {
                    let other = self.amplitude(k, col, with_pair(s, q));
                    *entry += wi * amp * other;
                }
            }
        }
        for row in &mut rho {
            for x in row.iter_mut() {
                *x /= z;
            }
        }
        Ok(rho)
    }
}

pub fn thermal_observables(spec: &ValidatedSpec, kt: f64) -> Result<ThermalObservables> {
    let point = ThermalPoint::new(kt)?;
    Ok(Spectrum::compute(spec)?.thermal(point))
}

/// Finite-difference residuals of `U = -∂lnZ/∂β` and `M = (1/β)∂lnZ/∂B`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConsistencyResiduals {
    pub energy_abs: f64,
    pub energy_rel: f64,
    pub magnetization_abs: f64,
    pub magnetization_rel: f64,
}

/// Five-point central difference.
pub(crate) fn five_point<F: FnMut(f64) -> f64>(mut f: F, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

pub(crate) fn checked_step(x: f64, rel: f64, floor: f64) -> Result<f64> {
    let h = rel * x.abs().max(floor);
    if !(h > 0.0) || x + h == x || !h.is_finite() {
        return Err(Error::StepUnderflow(x));
    }
    Ok(h)
}

pub fn thermo_consistency(spec: &ValidatedSpec, kt: f64) -> Result<ConsistencyResiduals> {
    let point = ThermalPoint::new(kt)?;
    let beta = point.beta();
    let spectrum = Spectrum::compute(spec)?;
    let obs = spectrum.thermal(point);
    let n = spectrum.n_sites() as f64;

    let h_beta = checked_step(beta, 1e-3, 0.0)?;
    let dlnz_dbeta = five_point(|b| spectrum.log_partition(b), beta, h_beta);

    let b0 = spec.field();
    let h_b = checked_step(b0, 1e-3, kt)?;
    let mut shifted = Vec::with_capacity(4);
    for offset in [-2.0, -1.0, 1.0, 2.0] {
        shifted.push(Spectrum::compute(&spec.with_field(b0 + offset * h_b)?)?.log_partition(beta));
    }
    let dlnz_db = (shifted[0] - 8.0 * shifted[1] + 8.0 * shifted[2] - shifted[3]) / (12.0 * h_b);

    let c = spec.couplings();
    let scale = [c.jx, c.jy, c.jz, b0].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let energy_abs = (obs.energy + dlnz_dbeta).abs();
    let magnetization_abs = (obs.magnetization - dlnz_db / beta).abs();
    Ok(ConsistencyResiduals {
        energy_abs,
        energy_rel: energy_abs / obs.energy.abs().max(n * if scale > 0.0 { scale } else { 1.0 }),
        magnetization_abs,
        magnetization_rel: magnetization_abs / obs.magnetization.abs().max(n),
    })
}
