use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::ValidatedSpec;

/// Largest chain the dense engine accepts unless overridden.
pub const DEFAULT_SITE_CAP: usize = 14;

/// Basis index bit `i` set means site `i` points down (`σz = -1`), so
/// `|↑↑…↑⟩` is index 0.
#[inline]
pub(crate) fn sigma_z(state: usize, site: usize) -> f64 {
    if state >> site & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Hamiltonian in the `σz` product basis, stored row-wise.
///
/// The matrix is real symmetric: `σyσy` only has real entries in this basis.
#[derive(Debug, Clone)]
pub struct HamiltonianMatrix {
    n_sites: usize,
    bonds: Vec<(usize, usize)>,
    diagonal: Vec<f64>,
    off_diagonal: Vec<Vec<(usize, f64)>>,
    u1_symmetric: bool,
}

pub fn build_hamiltonian(spec: &ValidatedSpec) -> Result<HamiltonianMatrix> {
    build_hamiltonian_capped(spec, DEFAULT_SITE_CAP)
}

pub fn build_hamiltonian_capped(spec: &ValidatedSpec, cap: usize) -> Result<HamiltonianMatrix> {
    let n = spec.finite_sites()?;
    if n > cap {
        return Err(Error::TooManySites { n_sites: n, cap });
    }
    let bonds = spec.bonds()?;
    let c = spec.couplings();
    let pre = spec.sign_convention().exchange_prefactor();
    let b = spec.field();
    let dim = 1usize << n;

    // σxσx + σyσy on a bond flips both spins with amplitude
    // (Jx - Jy) when they are aligned and (Jx + Jy) when anti-aligned.
    let flip_aligned = pre * (c.jx - c.jy);
    let flip_anti = pre * (c.jx + c.jy);

    let mut diagonal = vec![0.0; dim];
    let mut off_diagonal = vec![Vec::new(); dim];
    for s in 0..dim {
        let mut d = 0.0;
        for site in 0..n {
            d -= b * sigma_z(s, site);
        }
        for &(i, j) in &bonds {
            let aligned = (s >> i & 1) == (s >> j & 1);
            d += pre * c.jz * if aligned { 1.0 } else { -1.0 };
            let amp = if aligned { flip_aligned } else { flip_anti };
            if amp != 0.0 {
                off_diagonal[s].push((s ^ (1 << i) ^ (1 << j), amp));
            }
        }
        diagonal[s] = d;
    }
    Ok(HamiltonianMatrix {
        n_sites: n,
        bonds,
        diagonal,
        off_diagonal,
        u1_symmetric: c.jx == c.jy,
    })
}

impl HamiltonianMatrix {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn bonds(&self) -> &[(usize, usize)] {
        &self.bonds
    }

    /// True when `Jx = Jy`, i.e. total `σz` is conserved.
    pub fn u1_symmetric(&self) -> bool {
        self.u1_symmetric
    }

    /// Iterates the nonzero entries `(column, value)` of one row.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        std::iter::once((r, self.diagonal[r])).chain(self.off_diagonal[r].iter().copied())
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for r in 0..dim {
            for (c, v) in self.row(r) {
                m[(r, c)] += v;
            }
        }
        m
    }

    /// Largest `|H_rc - H_cr|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let dense = self.to_dense();
        (&dense - dense.transpose()).amax()
    }

    /// Largest entry of `[H, Σσz]`.
    pub fn total_sz_commutator_norm(&self) -> f64 {
        let dense = self.to_dense();
        let dim = self.dim();
        let sz: Vec<f64> = (0..dim).map(|s| (0..self.n_sites).map(|i| sigma_z(s, i)).sum()).collect();
        let mut worst: f64 = 0.0;
        for r in 0..dim {
            for c in 0..dim {
                worst = worst.max((dense[(r, c)] * (sz[c] - sz[r])).abs());
            }
        }
        worst
    }

    /// Label of the conserved block a basis state belongs to: the number of
    /// down spins when total `σz` is conserved, otherwise its parity.
    pub(crate) fn sector_label(&self, state: usize) -> usize {
        let downs = state.count_ones() as usize;
        if self.u1_symmetric {
            downs
        } else {
            downs % 2
        }
    }

    pub(crate) fn n_sectors(&self) -> usize {
        if self.u1_symmetric {
            self.n_sites + 1
        } else {
            2.min(self.dim())
        }
    }

    /// Dense block of `H` restricted to the listed basis states.
    pub(crate) fn block(&self, states: &[usize], position: &[usize]) -> DMatrix<f64> {
        let k = states.len();
        let mut m = DMatrix::zeros(k, k);
        for (a, &s) in states.iter().enumerate() {
            for (t, v) in self.row(s) {
                let b = position[t];
                debug_assert!(b != usize::MAX, "hamiltonian leaks out of its sector");
                m[(a, b)] += v;
            }
        }
        m
    }
}
