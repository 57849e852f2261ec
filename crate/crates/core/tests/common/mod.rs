#![allow(dead_code)]

pub mod data;
pub mod differentiation;
pub mod oracle;
