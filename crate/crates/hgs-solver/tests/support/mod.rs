#![allow(dead_code)]

pub mod brute_force;
pub mod srex_oracle;
