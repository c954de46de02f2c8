//! Curvature computations on Eschenburg spaces `SU(3)//S^1` and on their
//! Wilking doubled presentations.
//!
//! The crate is organised bottom-up: integer bookkeeping for the defining
//! triples, matrix algebra in su(3), curvature of the Cheeger-deformed
//! left-invariant metric, and the two zero-curvature analyses built on top.

pub mod curvature;
pub mod error;
pub mod eschenburg;
pub mod rng;
pub mod su3;
pub mod suite;
pub mod tolerance;
pub mod triples;
pub mod wilking;

pub use error::{DomainFlag, Error, Result};
pub use su3::{KElement, Su3Point, Su3Vector, ZVector};
pub use tolerance::Tolerances;
pub use triples::{CurvatureClass, Move, MoveSet, PQPair, Perm3, Triple};
pub use wilking::{AlmposCase, FPoint, HGValues, WilkingCertificate};
