//! Front ends for `mmrx-core`: sweep and utility commands, and the HTTP
//! evaluation service.

pub mod commands;
pub mod service;

pub use commands::{write_atomic, OutputFormat};
