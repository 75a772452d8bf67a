pub mod bounds;
pub mod cli;
pub mod config;
pub mod hydrogen;
pub mod khnorm;
pub mod output;
pub mod pulses;
pub mod quad;
pub mod scenarios;
pub mod specfun;
