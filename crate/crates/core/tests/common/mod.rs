//! Shared oracle code for the integration tests. Everything in here is an
//! independent reference model: it computes answers from coordinate
//! geometry or brute-force enumeration, never from the engine's incidence
//! tables, so agreement between the two is evidence rather than tautology.
#![allow(dead_code)]

pub mod grid;
pub mod subsets;
