#![allow(dead_code)]

pub mod mutate;

pub const CORPUS: &[&str] = &[
    oplang::SREX_SOURCE,
    oplang::IDENTITY_SOURCE,
    include_str!("../corpus/nearest_merge.opl"),
    include_str!("../corpus/sweep.opl"),
];
