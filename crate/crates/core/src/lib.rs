//! Macroscopic thermodynamical entanglement witnesses for 1D Heisenberg
//! spin chains.
//!
//! For isotropic XXX and XX chains, `|U + B·M| / (N|J|) > 1` certifies that
//! the thermal state is entangled. The crate evaluates that witness from
//! exact diagonalization of finite chains, from the free-fermion solution of
//! open XX chains, and from the thermodynamic-limit XX integrals, and maps
//! out the region of temperature and field where it fires.

pub mod error;
pub mod exactdiag;
pub mod freefermion;
pub mod io;
pub mod model;
pub mod quadrature;
pub mod thermolimit;
pub mod validation;
pub mod witness;

pub use error::{Error, Result};
pub use model::{
    to_dimensionless, validate_spec, Boundary, Couplings, DimensionlessPoint, Family, ModelSpec, Regime,
    SignConvention, SiteCount, ThermalPoint, ValidatedSpec,
};
pub use witness::{WitnessReport, WitnessSource};
