//! H-functions, genus regions and 4-genus bounds for L-space links with
//! vanishing pairwise linking numbers, computed exactly from the Alexander
//! polynomials of all sublinks.

pub mod bounds;
pub mod cable;
pub mod hfunction;
pub mod laurent;
pub mod linkcat;
pub mod region;
pub mod render;

pub use bounds::{best_lower_bound, BoundKind, BoundReport, BoundsError};
pub use cable::{cable_alexander, cable_consistency_check, region_via_t, t_transform, CableSpec};
pub use hfunction::{HError, HFunction, HOptions, HTable};
pub use laurent::{Exponent, LaurentPoly};
pub use linkcat::{catalog, catalog_from_spec, validate_descriptor, LinkDescriptor, Subset};
pub use region::{maximal_lattice_points, region_from_h, UpwardClosedRegion};
