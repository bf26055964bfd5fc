//! Bivariate-bicycle codes with static and shift-automorphism syndrome circuits.

pub mod algebra;
pub mod circuit;
pub mod decode;
pub mod gf2;
pub mod harness;
pub mod noise;
pub mod schedule;
pub mod tableau;
