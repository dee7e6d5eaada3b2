pub mod app;
pub mod config;
pub mod contour;
pub mod error;
pub mod io;
pub mod jet;
pub mod jost;
pub mod kernel;
pub mod marchenko;
pub mod model;
pub mod poles;
pub mod quad;
pub mod special;
pub mod wt;
