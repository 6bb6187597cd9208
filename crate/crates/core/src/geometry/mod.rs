//! Exact planar geometry of phantoms: shapes, lines, tangency analysis and
//! streak-candidate enumeration.

pub mod candidates;
pub mod library;
pub mod line;
pub mod phantom;
pub mod phantom_file;
pub mod shape;
pub mod tangency;

pub use candidates::{
    enumerate_streak_candidates, enumerate_union_candidates, is_strictly_convex, CandidateSet, StreakLine,
    StreakSource,
};
pub use line::Line;
pub use phantom::{ContrastReport, MetalRegion, Phantom};
pub use phantom_file::{format_phantom, parse_phantom, read_phantom, write_phantom};
pub use shape::{Primitive, Shape};
pub use tangency::{line_tangencies, span_dim, TangencyEvent, TangencyKind, Tolerances};
