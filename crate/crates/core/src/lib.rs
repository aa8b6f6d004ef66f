//! Exact combinatorics of random Jacobi matrices.
//!
//! The crate computes weight polynomials of lattice paths, the formal
//! Laurent series they generate, closed-form and recursive identities for
//! spectral and empirical moments, colored-tree inversion formulas, and
//! finite-size spectral checks, all in exact rational arithmetic, with a
//! seeded Monte Carlo layer for the probabilistic statements.

pub mod lattice;
pub mod moments;
pub mod polycore;
pub mod series;
pub mod spectra;
pub mod trees;

pub use lattice::{CapError, ClosedForm, Composition, LatticePath, PathKind, Step, WeightKind};
pub use moments::{IdentityFailure, IdentityReport, MomentRow};
pub use polycore::{Family, Monomial, Poly, PolyError, Rat, SymbolId};
pub use series::{
    CoeffSource, LaurentSeries, RelationId, RelationReport, SeriesError, SeriesKind,
};
pub use spectra::{
    AsymptoticRow, Distribution, McEstimate, McStatistic, RowCheck, SpectraError, TauReport,
};
pub use trees::{
    EdgeColor, InversionTarget, LeveledTree, TreeClass, TreeError, TreeVertex,
};
