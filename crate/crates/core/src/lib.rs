pub mod applications;
pub mod decomposition;
pub mod error;
pub mod finding;
pub mod geometry;
pub mod instances;
pub mod oracle;
pub mod randomized;
pub mod rng;
pub mod scalar;
pub mod selection;
pub mod sorted_matrix;
