//! Library half of the `haus` executable: the SVG emitter and the canned
//! example suite, exposed so integration tests can drive them directly.

pub mod suite;
pub mod svg;
