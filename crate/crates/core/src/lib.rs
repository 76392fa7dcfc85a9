pub mod complex;
pub mod dec;
pub mod filling;
pub mod flow;
pub mod homology;
pub mod lp;
pub mod models;
pub mod sparse;
pub mod spectra;
