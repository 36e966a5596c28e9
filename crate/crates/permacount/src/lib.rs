//! Modular-arithmetic counting polynomials, randomized identification
//! tests, corrupt-oracle models, and worst-case-to-average-case
//! amplification for clique counting.

pub mod algebra;
pub mod amplify;
pub mod counters;
pub mod error;
pub mod experiments;
pub mod graphs;
pub mod identity;
pub mod oracle;
pub mod perm;

pub use algebra::{FieldElement, PrimeModulus, RandomStream};
pub use amplify::{AmplificationConfig, PipelineStats};
pub use counters::{Classification, SymmetricFamily};
pub use error::{Error, Result};
pub use graphs::{DirectedMultigraph, SimpleGraph, UndirectedMultigraph, Verdict};
pub use identity::TestVerdict;
pub use oracle::{
    CorruptOracle, CorruptionStrategy, GroundTruthFunction, OracleMode, PolynomialMachine,
    TruthKind,
};
pub use perm::{CycleType, Permutation};
