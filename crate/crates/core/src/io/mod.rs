//! File formats: numeric CSV tables and PPM frames with a checksum manifest.

pub mod csv;
pub mod raster;
