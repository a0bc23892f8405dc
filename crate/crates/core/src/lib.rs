pub mod error;
pub mod geometry;
pub mod linalg;
pub mod scalar;
pub mod reference;
pub mod energy;
pub mod volumetric;
pub mod loads;
pub mod convexity;
pub mod minimizer;
pub mod compare;
pub mod io;
pub mod app;
