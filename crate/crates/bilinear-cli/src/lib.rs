//! File formats and witness-string parsing for the `bilinear` command-line
//! tool. The binary in `main.rs` is a thin layer over this library and the
//! `bilinear` crate.

pub mod combination;
pub mod format;
