//! Normal subgroup lattices of direct products of symmetric groups and the
//! tower of their lattice automorphism groups.
//!
//! ```
//! use lattower::{group_spec::TowerGroupSpec, lattice::Lattice};
//!
//! let spec: TowerGroupSpec = "S3^3".parse().unwrap();
//! let lattice = Lattice::enumerate(&spec).unwrap();
//! assert_eq!(lattice.census().to_string(), "total 38: sub-products 27, sign-parity 4, mixed 7");
//! ```

pub mod autgroup;
pub mod cli;
pub mod gf2;
pub mod group_spec;
pub mod lattice;
pub mod perm_oracle;
pub mod poset;
pub mod tower;

use thiserror::Error;

use crate::autgroup::AutError;
use crate::gf2::Gf2Error;
use crate::group_spec::SpecError;
use crate::lattice::LatticeError;
use crate::perm_oracle::OracleError;
use crate::tower::TowerError;

/// Resource limits shared by the library entry points and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub max_degree: u32,
    /// Largest slot count `T` accepted for enumeration.
    pub max_slots: usize,
    /// Largest `|G|` the permutation oracle will build.
    pub max_order: u128,
    /// Largest lattice the automorphism search will accept.
    pub max_lattice: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_degree: group_spec::DEFAULT_MAX_DEGREE,
            max_slots: lattice::DEFAULT_MAX_SLOTS,
            max_order: perm_oracle::DEFAULT_MAX_ORDER,
            max_lattice: autgroup::DEFAULT_MAX_LATTICE,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Aut(#[from] AutError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error("verification failed: {0}")]
    Mismatch(String),
    #[error("{0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit status: 2 for unparseable or invalid input, 3 for bound
    /// violations, 4 for failed verifications, 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Spec(_) | Error::Usage(_) => 2,
            Error::Lattice(LatticeError::Spec(_)) | Error::Oracle(OracleError::Spec(_)) => 2,
            Error::Oracle(OracleError::BadFactor { .. }) => 2,
            Error::Lattice(LatticeError::TooLarge { .. })
            | Error::Aut(AutError::TooLarge { .. })
            | Error::Aut(AutError::Lattice(LatticeError::TooLarge { .. }))
            | Error::Oracle(OracleError::TooLarge { .. })
            | Error::Oracle(OracleError::Lattice(LatticeError::TooLarge { .. })) => 3,
            Error::Mismatch(_) | Error::Oracle(OracleError::Mismatch { .. }) => 4,
            _ => 1,
        }
    }
}
