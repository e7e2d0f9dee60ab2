//! Finite cell complexes with integer incidence data.
//!
//! A [`CellComplex`] is a graded family of cells together with, for every cell
//! of dimension `d >= 1`, a finite list of `(face, coefficient)` pairs with
//! faces of dimension exactly `d - 1`. Nothing geometric is stored: handles,
//! quotients, twisted bundles and lens spaces are all expressed through the
//! incidence lists alone.
//!
//! Complexes are immutable after construction and cheap to share between
//! threads; use [`ComplexBuilder`] to assemble one.

mod complex;
mod constructions;
mod simplicial;
mod text;

pub use complex::{
    Cell, CellComplex, CellId, ComplexBuilder, ValidationIssue, ValidationReport,
};
pub use constructions::{
    check_face_closed, collapse_subcomplex, disjoint_union, pair_index, product_complex,
    SubcomplexError,
};
pub use simplicial::{simplicial_product, SimplicialComplex};
pub use text::{parse_complex, write_complex, TextFormatError};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Coefficient system for homology computations.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoefficientSpec {
    /// The field of rational numbers.
    Rationals,
    /// The prime field `F_p`.
    PrimeField(u64),
    /// The ring of integers (Betti numbers plus torsion).
    Integers,
    /// `Z_k` coefficients, `k >= 2`, derived from integral homology by
    /// universal coefficients.
    IntegersMod(u64),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoefficientError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is below 2")]
    ModulusTooSmall(u64),
    #[error("cannot parse coefficient spec {0:?} (expected Q, Fp:<p>, Z or Zk:<k>)")]
    Unparseable(String),
}

impl CoefficientSpec {
    /// Validates the numeric parameters (`p` prime, `k >= 2`).
    pub fn validate(&self) -> Result<(), CoefficientError> {
        match *self {
            CoefficientSpec::PrimeField(p) if !is_prime(p) => {
                Err(CoefficientError::NotPrime(p))
            }
            CoefficientSpec::IntegersMod(k) if k < 2 => {
                Err(CoefficientError::ModulusTooSmall(k))
            }
            _ => Ok(()),
        }
    }

    /// Parses the CLI syntax `Q | Fp:<p> | Z | Zk:<k>`.
    pub fn parse(s: &str) -> Result<Self, CoefficientError> {
        let spec = match s.trim() {
            "Q" | "q" => CoefficientSpec::Rationals,
            "Z" | "z" => CoefficientSpec::Integers,
            other => {
                if let Some(p) = other.strip_prefix("Fp:").or_else(|| other.strip_prefix("F")) {
                    let p: u64 = p
                        .parse()
                        .map_err(|_| CoefficientError::Unparseable(s.to_string()))?;
                    CoefficientSpec::PrimeField(p)
                } else if let Some(k) =
                    other.strip_prefix("Zk:").or_else(|| other.strip_prefix("Z"))
                {
                    let k: u64 = k
                        .parse()
                        .map_err(|_| CoefficientError::Unparseable(s.to_string()))?;
                    CoefficientSpec::IntegersMod(k)
                } else {
                    return Err(CoefficientError::Unparseable(s.to_string()));
                }
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn is_field(&self) -> bool {
        matches!(self, CoefficientSpec::Rationals | CoefficientSpec::PrimeField(_))
    }
}

impl std::fmt::Display for CoefficientSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CoefficientSpec::Rationals => write!(f, "Q"),
            CoefficientSpec::PrimeField(p) => write!(f, "Fp:{p}"),
            CoefficientSpec::Integers => write!(f, "Z"),
            CoefficientSpec::IntegersMod(k) => write!(f, "Zk:{k}"),
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_parsing() {
        assert_eq!(CoefficientSpec::parse("Q").unwrap(), CoefficientSpec::Rationals);
        assert_eq!(CoefficientSpec::parse("Fp:5").unwrap(), CoefficientSpec::PrimeField(5));
        assert_eq!(CoefficientSpec::parse("F2").unwrap(), CoefficientSpec::PrimeField(2));
        assert_eq!(CoefficientSpec::parse("Z").unwrap(), CoefficientSpec::Integers);
        assert_eq!(CoefficientSpec::parse("Zk:4").unwrap(), CoefficientSpec::IntegersMod(4));
        assert!(CoefficientSpec::parse("Fp:4").is_err());
        assert!(CoefficientSpec::parse("Zk:1").is_err());
        assert!(CoefficientSpec::parse("nope").is_err());
    }

    #[test]
    fn display_round_trips_through_parse() {
        for spec in [
            CoefficientSpec::Rationals,
            CoefficientSpec::PrimeField(7),
            CoefficientSpec::Integers,
            CoefficientSpec::IntegersMod(12),
        ] {
            assert_eq!(CoefficientSpec::parse(&spec.to_string()).unwrap(), spec);
        }
    }
}
