//! Chain parameterization and unit conventions.
//!
//! Boltzmann's constant is absorbed into the temperature: every temperature is
//! carried as `kT` in the same energy units as the couplings and the field.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(alias = "xxx")]
    XXX,
    #[serde(alias = "xx")]
    XX,
    #[serde(alias = "xyz", alias = "general-xyz")]
    GeneralXYZ,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::XXX => "XXX",
            Family::XX => "XX",
            Family::GeneralXYZ => "GeneralXYZ",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "xxx" => Ok(Family::XXX),
            "xx" => Ok(Family::XX),
            "xyz" | "generalxyz" | "general-xyz" => Ok(Family::GeneralXYZ),
            other => Err(Error::Config(format!("unknown model family `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    Periodic,
    Open,
}

impl FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "periodic" => Ok(Boundary::Periodic),
            "open" => Ok(Boundary::Open),
            other => Err(Error::Config(format!("unknown boundary `{other}`"))),
        }
    }
}

/// How the sign in front of the exchange sum is read.
///
/// `AsPrinted` takes `H = -Σ (Jx σxσx + Jy σyσy + Jz σzσz) - B Σ σz` literally.
/// `SingletGround` flips the exchange sign so that `J > 0` is the
/// antiferromagnet whose XXX ground state is the total singlet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignConvention {
    AsPrinted,
    #[default]
    SingletGround,
}

impl SignConvention {
    /// Prefactor multiplying `Σ (Jx σxσx + Jy σyσy + Jz σzσz)` in the Hamiltonian.
    pub fn exchange_prefactor(self) -> f64 {
        match self {
            SignConvention::AsPrinted => -1.0,
            SignConvention::SingletGround => 1.0,
        }
    }
}

impl FromStr for SignConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "as-printed" => Ok(SignConvention::AsPrinted),
            "singlet-ground" => Ok(SignConvention::SingletGround),
            other => Err(Error::Config(format!("unknown sign convention `{other}`"))),
        }
    }
}

/// Physical exchange regime, independent of the sign convention used to write it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Antiferromagnetic,
    Ferromagnetic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SiteCount {
    Finite(usize),
    ThermodynamicLimit,
}

impl SiteCount {
    pub fn finite(self) -> Option<usize> {
        match self {
            SiteCount::Finite(n) => Some(n),
            SiteCount::ThermodynamicLimit => None,
        }
    }
}

impl fmt::Display for SiteCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SiteCount::Finite(n) => write!(f, "{n}"),
            SiteCount::ThermodynamicLimit => f.write_str("thermodynamic-limit"),
        }
    }
}

impl Serialize for SiteCount {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SiteCount::Finite(n) => serializer.serialize_u64(*n as u64),
            SiteCount::ThermodynamicLimit => serializer.serialize_str("thermodynamic-limit"),
        }
    }
}

impl<'de> Deserialize<'de> for SiteCount {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            // negative values survive to `validate_spec`, which owns the error
            Raw::Int(n) if n >= 0 => Ok(SiteCount::Finite(n as usize)),
            Raw::Int(_) => Ok(SiteCount::Finite(0)),
            Raw::Text(s) if s == "thermodynamic-limit" => Ok(SiteCount::ThermodynamicLimit),
            Raw::Text(s) => Err(serde::de::Error::custom(format!(
                "n_sites must be an integer or \"thermodynamic-limit\", got `{s}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Couplings {
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
}

impl Couplings {
    pub fn isotropic(j: f64) -> Self {
        Couplings { jx: j, jy: j, jz: j }
    }

    pub fn xx(j: f64) -> Self {
        Couplings { jx: j, jy: j, jz: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: Family,
    pub couplings: Couplings,
    pub field: f64,
    pub n_sites: SiteCount,
    pub boundary: Boundary,
    #[serde(default)]
    pub sign_convention: SignConvention,
}

impl ModelSpec {
    pub fn xxx(j: f64, field: f64, n_sites: usize, boundary: Boundary) -> Self {
        ModelSpec {
            family: Family::XXX,
            couplings: Couplings::isotropic(j),
            field,
            n_sites: SiteCount::Finite(n_sites),
            boundary,
            sign_convention: SignConvention::default(),
        }
    }

    pub fn xx(j: f64, field: f64, n_sites: usize, boundary: Boundary) -> Self {
        ModelSpec {
            family: Family::XX,
            couplings: Couplings::xx(j),
            ..ModelSpec::xxx(j, field, n_sites, boundary)
        }
    }

    pub fn xyz(couplings: Couplings, field: f64, n_sites: usize, boundary: Boundary) -> Self {
        ModelSpec {
            family: Family::GeneralXYZ,
            couplings,
            ..ModelSpec::xxx(0.0, field, n_sites, boundary)
        }
    }

    pub fn with_sign(mut self, sign_convention: SignConvention) -> Self {
        self.sign_convention = sign_convention;
        self
    }

    pub fn with_field(mut self, field: f64) -> Self {
        self.field = field;
        self
    }

    /// Parses the key/value configuration form, e.g.
    ///
    /// ```toml
    /// family = "XXX"
    /// couplings = { jx = 1.0, jy = 1.0, jz = 1.0 }
    /// field = 0.0
    /// n_sites = 8
    /// boundary = "periodic"
    /// sign_convention = "singlet-ground"
    /// ```
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}

/// A spec that passed [`validate_spec`]. Only constructible through validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidatedSpec {
    spec: ModelSpec,
    witness_eligible: bool,
}

impl ValidatedSpec {
    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn family(&self) -> Family {
        self.spec.family
    }

    pub fn couplings(&self) -> Couplings {
        self.spec.couplings
    }

    pub fn field(&self) -> f64 {
        self.spec.field
    }

    pub fn boundary(&self) -> Boundary {
        self.spec.boundary
    }

    pub fn sign_convention(&self) -> SignConvention {
        self.spec.sign_convention
    }

    pub fn n_sites(&self) -> SiteCount {
        self.spec.n_sites
    }

    pub fn finite_sites(&self) -> Result<usize> {
        self.spec.n_sites.finite().ok_or(Error::InfiniteChain)
    }

    /// Only XXX and XX chains carry the separable bound behind the witness.
    pub fn witness_eligible(&self) -> bool {
        self.witness_eligible
    }

    /// The single coupling `J` of an XXX or XX chain (`Jx` for general XYZ).
    pub fn coupling(&self) -> f64 {
        self.spec.couplings.jx
    }

    pub fn regime(&self) -> Regime {
        if self.sign_convention().exchange_prefactor() * self.coupling() > 0.0 {
            Regime::Antiferromagnetic
        } else {
            Regime::Ferromagnetic
        }
    }

    /// Same chain with a different field.
    pub fn with_field(&self, field: f64) -> Result<ValidatedSpec> {
        validate_spec(self.spec.with_field(field))
    }

    /// Nearest-neighbor bonds as ordered site pairs.
    pub fn bonds(&self) -> Result<Vec<(usize, usize)>> {
        let n = self.finite_sites()?;
        let mut bonds: Vec<(usize, usize)> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        if self.spec.boundary == Boundary::Periodic {
            bonds.push((n - 1, 0));
        }
        Ok(bonds)
    }
}

pub fn validate_spec(spec: ModelSpec) -> Result<ValidatedSpec> {
    let Couplings { jx, jy, jz } = spec.couplings;
    for (name, v) in [("jx", jx), ("jy", jy), ("jz", jz), ("field", spec.field)] {
        if !v.is_finite() {
            return Err(Error::InvalidModel(format!("{name} must be finite, got {v}")));
        }
    }
    if let SiteCount::Finite(n) = spec.n_sites {
        if n == 0 {
            return Err(Error::InvalidModel("n_sites must be at least 1".into()));
        }
        if spec.boundary == Boundary::Periodic && n < 3 {
            return Err(Error::InvalidModel(format!(
                "periodic boundary needs at least 3 sites, got {n}"
            )));
        }
    }
    match spec.family {
        Family::XXX if !(jx == jy && jy == jz) => {
            return Err(Error::InvalidModel(format!(
                "family XXX requires Jx = Jy = Jz, got ({jx}, {jy}, {jz})"
            )))
        }
        Family::XX if !(jx == jy && jz == 0.0) => {
            return Err(Error::InvalidModel(format!(
                "family XX requires Jx = Jy and Jz = 0, got ({jx}, {jy}, {jz})"
            )))
        }
        _ => {}
    }

    // normalize signed zeros so equal specs compare and hash equal
    let clean = |v: f64| if v == 0.0 { 0.0 } else { v };
    let spec = ModelSpec {
        couplings: Couplings { jx: clean(jx), jy: clean(jy), jz: clean(jz) },
        field: clean(spec.field),
        ..spec
    };
    Ok(ValidatedSpec {
        spec,
        witness_eligible: matches!(spec.family, Family::XXX | Family::XX),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalPoint {
    kt: f64,
}

impl ThermalPoint {
    pub fn new(kt: f64) -> Result<Self> {
        if kt > 0.0 && kt.is_finite() {
            Ok(ThermalPoint { kt })
        } else {
            Err(Error::NonPositiveTemperature(kt))
        }
    }

    pub fn kt(&self) -> f64 {
        self.kt
    }

    pub fn beta(&self) -> f64 {
        1.0 / self.kt
    }
}

/// `K = J/kT` and `C = B/kT`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessPoint {
    pub k: f64,
    pub c: f64,
}

pub fn to_dimensionless(j: f64, b: f64, kt: f64) -> Result<DimensionlessPoint> {
    let t = ThermalPoint::new(kt)?;
    let point = DimensionlessPoint { k: j * t.beta(), c: b * t.beta() };
    if point.k.is_finite() && point.c.is_finite() {
        Ok(point)
    } else {
        Err(Error::Domain(format!("non-finite dimensionless point for J={j}, B={b}, kT={kt}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn xxx_ring_is_valid_and_eligible() {
        let v = validate_spec(ModelSpec::xxx(1.0, 0.0, 8, Boundary::Periodic)).unwrap();
        assert!(v.witness_eligible());
        assert_eq!(v.bonds().unwrap().len(), 8);
    }

    #[test]
    fn xx_with_zz_coupling_is_rejected() {
        let mut spec = ModelSpec::xx(1.0, 0.0, 6, Boundary::Open);
        spec.couplings.jz = 0.5;
        assert!(matches!(validate_spec(spec), Err(Error::InvalidModel(_))));
    }

    #[test]
    fn xxx_with_unequal_couplings_is_rejected() {
        let mut spec = ModelSpec::xxx(1.0, 0.0, 6, Boundary::Open);
        spec.couplings.jy = 0.9;
        assert!(validate_spec(spec).is_err());
    }

    #[test]
    fn general_xyz_is_valid_but_ineligible() {
        let spec = ModelSpec::xyz(Couplings { jx: 1.0, jy: 2.0, jz: 3.0 }, 0.0, 6, Boundary::Periodic);
        let v = validate_spec(spec).unwrap();
        assert!(!v.witness_eligible());
    }

    #[test]
    fn site_count_errors() {
        assert!(validate_spec(ModelSpec::xxx(1.0, 0.0, 0, Boundary::Open)).is_err());
        assert!(validate_spec(ModelSpec::xxx(1.0, 0.0, 2, Boundary::Periodic)).is_err());
        assert!(validate_spec(ModelSpec::xxx(1.0, 0.0, 2, Boundary::Open)).is_ok());
        assert_eq!(
            validate_spec(ModelSpec::xxx(1.0, 0.0, 5, Boundary::Open)).unwrap().bonds().unwrap().len(),
            4
        );
    }

    #[test]
    fn regime_follows_convention() {
        let afm = validate_spec(ModelSpec::xxx(1.0, 0.0, 4, Boundary::Periodic)).unwrap();
        assert_eq!(afm.regime(), Regime::Antiferromagnetic);
        let printed = validate_spec(
            ModelSpec::xxx(1.0, 0.0, 4, Boundary::Periodic).with_sign(SignConvention::AsPrinted),
        )
        .unwrap();
        assert_eq!(printed.regime(), Regime::Ferromagnetic);
    }

    #[test]
    fn dimensionless_examples() {
        assert_eq!(to_dimensionless(1.0, 0.0, 1.0).unwrap(), DimensionlessPoint { k: 1.0, c: 0.0 });
        assert_eq!(to_dimensionless(2.0, 1.0, 0.5).unwrap(), DimensionlessPoint { k: 4.0, c: 2.0 });
        assert_eq!(to_dimensionless(-1.0, 3.0, 2.0).unwrap(), DimensionlessPoint { k: -0.5, c: 1.5 });
        assert!(matches!(to_dimensionless(1.0, 0.0, 0.0), Err(Error::NonPositiveTemperature(_))));
        assert!(to_dimensionless(1.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn toml_config_round_trip() {
        let text = r#"
            family = "XXX"
            couplings = { jx = 1.0, jy = 1.0, jz = 1.0 }
            field = 0.25
            n_sites = 8
            boundary = "periodic"
            sign_convention = "as-printed"
        "#;
        let spec = ModelSpec::from_toml(text).unwrap();
        assert_eq!(spec.n_sites, SiteCount::Finite(8));
        assert_eq!(spec.sign_convention, SignConvention::AsPrinted);
        let limit = ModelSpec::from_toml(&text.replace("n_sites = 8", "n_sites = \"thermodynamic-limit\"")).unwrap();
        assert_eq!(limit.n_sites, SiteCount::ThermodynamicLimit);
        assert!(ModelSpec::from_toml(&text.replace("n_sites = 8", "n_sites = \"many\"")).is_err());
    }

    proptest! {
        #[test]
        fn dimensionless_is_homogeneous(
            j in -10.0f64..10.0, b in -10.0f64..10.0, kt in 0.01f64..10.0, lambda in 0.01f64..100.0
        ) {
            let p = to_dimensionless(j, b, kt).unwrap();
            let q = to_dimensionless(lambda * j, lambda * b, lambda * kt).unwrap();
            prop_assert!((p.k - q.k).abs() <= 1e-12 * p.k.abs().max(1.0));
            prop_assert!((p.c - q.c).abs() <= 1e-12 * p.c.abs().max(1.0));
        }

        #[test]
        fn validation_is_idempotent(
            family in 0u8..3, j in -3.0f64..3.0, b in -3.0f64..3.0, n in 1usize..12, periodic: bool
        ) {
            let boundary = if periodic { Boundary::Periodic } else { Boundary::Open };
            let spec = match family {
                0 => ModelSpec::xxx(j, b, n, boundary),
                1 => ModelSpec::xx(j, b, n, boundary),
                _ => ModelSpec::xyz(Couplings { jx: j, jy: 0.5 * j, jz: -j }, b, n, boundary),
            };
            if let Ok(once) = validate_spec(spec) {
                let twice = validate_spec(*once.spec()).unwrap();
                prop_assert_eq!(once, twice);
            }
        }
    }
}
