pub mod deformations;
pub mod ingest;
pub mod pl;
pub mod profile;
pub mod rational;
pub mod model;
pub mod morse_tree;
pub mod reeb_surface;
pub mod report;
pub mod sphere;
