pub mod blowup;
pub mod bundles;
pub mod chowring;
pub mod error;
pub mod geometry;
pub mod gradedpoly;

pub use error::{Error, Result};
