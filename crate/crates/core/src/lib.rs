pub mod error;
pub mod graph;
pub mod instance;
pub mod structure;
pub mod value;
pub mod finite;
pub mod mmc;
pub mod asymptotic;
pub mod strategy;
pub mod codes;
pub mod gallery;
pub mod cli;
