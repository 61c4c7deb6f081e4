use nalgebra::{Complex, Matrix4, SymmetricEigen};

use super::spectrum::Spectrum;
use crate::error::{Error, Result};
use crate::model::{ThermalPoint, ValidatedSpec};

pub type C64 = Complex<f64>;

const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-12;

/// Two-qubit density matrix in the basis `|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairState {
    rho: Matrix4<C64>,
}

fn singlet_projector() -> Matrix4<C64> {
    let h = C64::new(0.5, 0.0);
    let mut m = Matrix4::zeros();
    m[(1, 1)] = h;
    m[(2, 2)] = h;
    m[(1, 2)] = -h;
    m[(2, 1)] = -h;
    m
}

impl PairState {
    pub fn new(rho: Matrix4<C64>) -> Result<PairState> {
        let herm = (rho - rho.adjoint()).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if herm > TRACE_TOL {
            return Err(Error::Domain(format!("pair state is not Hermitian (defect {herm:e})")));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::Domain(format!("pair state trace is {tr}, expected 1")));
        }
        let min = SymmetricEigen::new(rho).eigenvalues.min();
        if min < -PSD_TOL {
            return Err(Error::NotPositiveSemidefinite(min));
        }
        Ok(PairState { rho })
    }

    pub fn from_real(rho: [[f64; 4]; 4]) -> Result<PairState> {
        PairState::new(Matrix4::from_fn(|r, c| C64::new(rho[r][c], 0.0)))
    }

    pub fn singlet() -> PairState {
        PairState { rho: singlet_projector() }
    }

    pub fn maximally_mixed() -> PairState {
        PairState { rho: Matrix4::identity() * C64::new(0.25, 0.0) }
    }

    /// `p |ψ⁻⟩⟨ψ⁻| + (1 - p) I/4`, `p ∈ [-1/3, 1]`.
    pub fn werner(p: f64) -> Result<PairState> {
        PairState::new(singlet_projector() * C64::new(p, 0.0) + Matrix4::identity() * C64::new((1.0 - p) / 4.0, 0.0))
    }

    /// Pure product of two single-qubit kets `(α, β)` for `α|↑⟩ + β|↓⟩`.
    pub fn product(a: [C64; 2], b: [C64; 2]) -> Result<PairState> {
        let ket = [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]];
        PairState::new(Matrix4::from_fn(|r, c| ket[r] * ket[c].conj()))
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.rho
    }

    /// `U ρ U†`.
    pub fn conjugated(&self, u: &Matrix4<C64>) -> Result<PairState> {
        PairState::new(u * self.rho * u.adjoint())
    }

    pub fn singlet_fidelity(&self) -> f64 {
        (singlet_projector() * self.rho).trace().re
    }

    /// Frobenius distance to the Werner state with the same singlet fidelity.
    pub fn werner_deviation(&self) -> f64 {
        let f = self.singlet_fidelity();
        let p = singlet_projector();
        let werner = p * C64::new(f, 0.0) + (Matrix4::identity() - p) * C64::new((1.0 - f) / 3.0, 0.0);
        (self.rho - werner).norm()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.rho).eigenvalues.min()
    }
}

/// Thermal state of `spec` at `kt` reduced to the two given sites.
pub fn reduced_pair_state(spec: &ValidatedSpec, kt: f64, sites: (usize, usize)) -> Result<PairState> {
    let point = ThermalPoint::new(kt)?;
    let n = spec.finite_sites()?;
    if sites.0 == sites.1 || sites.0 >= n || sites.1 >= n {
        return Err(Error::InvalidSitePair(sites.0, sites.1));
    }
    let spectrum = Spectrum::compute(spec)?;
    PairState::from_real(spectrum.pair_density(point, sites.0, sites.1)?)
}

/// Wootters concurrence.
///
/// The `λ_i` are the square roots of the eigenvalues of `ρ ρ̃` with
/// `ρ̃ = (σy⊗σy) ρ* (σy⊗σy)`; they are obtained from the Hermitian
/// `√ρ ρ̃ √ρ`, which has the same spectrum.
pub fn concurrence(pair: &PairState) -> f64 {
    let eig = SymmetricEigen::new(pair.rho);
    let sqrt_vals = eig.eigenvalues.map(|v| C64::new(v.max(0.0).sqrt(), 0.0));
    let sqrt_rho = eig.eigenvectors * Matrix4::from_diagonal(&sqrt_vals) * eig.eigenvectors.adjoint();

    // σy⊗σy is real: -1 on the |↑↑⟩/|↓↓⟩ corners, +1 on the |↑↓⟩/|↓↑⟩ pair
    let mut yy = Matrix4::<C64>::zeros();
    yy[(0, 3)] = C64::new(-1.0, 0.0);
    yy[(3, 0)] = C64::new(-1.0, 0.0);
    yy[(1, 2)] = C64::new(1.0, 0.0);
    yy[(2, 1)] = C64::new(1.0, 0.0);
    let tilde = yy * pair.rho.map(|z| z.conj()) * yy;

    let m = sqrt_rho * tilde * sqrt_rho;
    let m = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut lambdas: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().map(|v| v.max(0.0).sqrt()).collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).clamp(0.0, 1.0)
}
