//! Single-zone room energy simulation under present and morphed future
//! weather, with incremental attribution of annual heating and cooling
//! energy to walls, windows, infiltration and internal gains.

pub mod components;
pub mod error;
pub mod morph;
pub mod psychro;
pub mod reference;
pub mod solar;
pub mod study;
pub mod synth;
pub mod weather;
pub mod zone;

pub use error::{Error, Result};
