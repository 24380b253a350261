//! Radial profiles, the decreasing cone, radial weights and bi-radial
//! objects on product groups.

pub mod bi;
mod pav;
mod profile;
mod weight;

pub use bi::{log_grid, BiDecreasingProfile, BiRadial, QuadrantTable, Region, SeparableTerm};
pub use pav::{antitonic, cell_measures, project_to_decreasing};
pub use profile::{DecreasingProfile, Radial, RadialProfile};
pub use weight::{polar_table, MassReport, ProductWeight, RadialWeight};

pub(crate) use weight::unit;
