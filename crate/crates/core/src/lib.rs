//! Perspective-three-point geometry through its two characteristic conics.
//!
//! Given a control triangle `ABC` and the cosines of the angles it subtends
//! at an unknown optical center `O`, [`solve`] returns every positive triplet
//! of distances `(|OA|, |OB|, |OC|)`. The [`sharing`] module classifies pairs
//! of solutions, [`loci`] describes where those pairs occur in space, and
//! [`lab`] builds scenes and runs randomized checks over them.

pub mod conic;
pub mod error;
pub mod io;
pub mod lab;
pub mod loci;
pub mod mesh;
pub mod poly;
pub mod sharing;
pub mod solver;
pub mod types;

pub use conic::{build_conics, difference_conic, intersect_conics, Conic, ConicPair, IntersectOptions, IntersectionSet};
pub use error::{Error, Result};
pub use sharing::{classify_solution_set, companion_check, PairClassification, SharingKind, SharingLabel};
pub use solver::{recover_centers, solve, Solution, SolutionSet};
pub use types::{
    view_angles_from_center, CanonicalFrame, ControlTriangle, Point3, RatioPair, Sides, SolutionTriplet, Tolerances,
    Vertex, ViewAngles,
};
