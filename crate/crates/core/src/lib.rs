pub mod cartan;
pub mod coxeter;
pub mod field;
pub mod linalg;
pub mod fingroup;
pub mod measure;
pub mod simplicial;
pub mod davis;
pub mod cosheaf;
pub mod builtins;
pub mod laurent;
pub mod hecke;
pub mod cli;
