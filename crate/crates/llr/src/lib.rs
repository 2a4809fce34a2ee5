//! Command-line tool and HTTP service for living literature reviews.

pub mod config;
pub mod manifest;
pub mod server;
