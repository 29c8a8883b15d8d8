//! Command-line front end of `lyapbound`.

pub mod args;
pub mod commands;
pub mod exit;
pub mod output;
