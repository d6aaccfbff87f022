pub mod disambig;
pub mod modelsem;
pub mod replace;
pub mod rules;
pub mod structure;
pub mod engine;
