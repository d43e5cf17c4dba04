pub mod exact;
pub mod exec;
pub mod graph;
pub mod seed;
pub mod ensembles;
pub mod zeta;
pub mod walks;
pub mod matching;
pub mod ergodic;
pub mod largedev;
pub mod detector;
pub mod cli;
