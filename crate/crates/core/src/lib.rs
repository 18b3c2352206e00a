//! Finite fields, classical forms over them, and composition of a form with a
//! trace functional down a field tower, together with a predictor for the
//! type of the composed form and an exhaustive checker for that predictor.

#![allow(clippy::needless_range_loop)]

pub mod gf;
pub mod linalg;
pub mod forms;
pub mod compose;
pub mod predict;
pub mod serial;
pub mod verify;
