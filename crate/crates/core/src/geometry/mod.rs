pub mod chart;
pub mod fundamental;
pub mod grid;
pub mod stencil;

pub use chart::{CatalogChart, Chart, Domain, GraphFn, PerturbedChart};
pub use fundamental::{fundamental_data, lift_flat, lift_hat, FundamentalData, SurfaceForms, SurfaceJet};
pub use grid::Grid;
pub use stencil::{finite_difference_derivatives, GridStencils};
