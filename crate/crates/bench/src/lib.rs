//! Parameter fixtures shared by the benchmarks.

use dimer_core::{SystemParams, ANTI_BRAGG_KAD, BRAGG_KAD};
use std::f64::consts::PI;

pub fn bragg(j: f64) -> SystemParams {
    SystemParams::with_fixed_length(1.0, 0.0, j, BRAGG_KAD, 10.0 * PI)
}

pub fn anti_bragg(j: f64) -> SystemParams {
    SystemParams::with_fixed_length(1.0, 0.0, j, ANTI_BRAGG_KAD, 10.0 * PI)
}
