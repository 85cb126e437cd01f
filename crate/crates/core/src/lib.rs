//! Welded knots as signed Gauss codes: quandle coloring invariants, warping
//! degree, the twist move, and bounded searches for twist-move bounds.

pub mod cli;
pub mod coloring;
pub mod families;
pub mod ffield;
pub mod gauss;
pub mod invariants;
pub mod moves;
pub mod reproduce;
pub mod search;

pub use coloring::{coloring_count, coloring_dim, ColoringSummary};
pub use ffield::{FieldElement, FieldSpec, FqMatrix};
pub use gauss::{CanonicalKey, GaussCode, GaussError, Pass, Sign, Strand};
pub use moves::{apply, enumerate_moves, Move, MoveKind, MoveTrace};
pub use invariants::{triviality, warping_degree, warping_degree_both, Verdict, VerdictValue};
pub use search::{twist_distance_ub, ut_bounds, uw_upper, BoundCertificate, SearchBudget};
