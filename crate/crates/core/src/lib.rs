#![no_std]
extern crate alloc;

pub mod asympoly;
pub mod catalog;
pub mod density;
pub mod efficiency;
pub mod error;
pub mod moments;
pub mod quadrature;
pub mod simulate;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
