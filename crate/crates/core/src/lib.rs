//! Infinitesimal bending of closed space curves.

pub mod bending;
pub mod curve;
pub mod energy;
pub mod expr;
pub mod jet;
pub mod mesh;
pub mod quadrature;
pub mod variation;
pub mod cli;
pub mod knotfile;
pub mod report;
