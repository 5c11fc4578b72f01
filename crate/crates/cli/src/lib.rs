//! Command-line front end for `gprox`: instance loading, commands and the
//! property suite.

pub mod commands;
pub mod doc;
pub mod suite;
