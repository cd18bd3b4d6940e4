#![allow(dead_code)]

pub mod exprgen;
pub mod fuzz;
pub mod oracle;
