//! Cell complexes: cubic lattices with labelled facets, 3-colexes and 2-colexes.

pub mod colex;
pub mod colex2;
pub mod cubic;

pub use colex::{Color, Colex, ColexCell, ColexFace};
pub use colex2::Colex2;
pub use cubic::{
    AxisBoundary, CellComplex, CellRef, Coord, CubicSpec, DistanceKind, Facet, FacetKind, QubitSite,
    SiteKind,
};
