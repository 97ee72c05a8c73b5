//! Shared inputs for the benchmarks.

use qmw_core::quadric::{deform_net, DeformationSchedule, QuadricNet};
use qmw_core::rational::{rat, ratio};
use qmw_core::transversality::sunset_net;

/// Sunset net with masses (1, 2, 3), deformed at ε = 1/3.
pub fn deformed_sunset(dimension: usize) -> QuadricNet {
    let (g, t, net) = sunset_net(&[rat(1), rat(2), rat(3)], dimension).expect("sunset net");
    deform_net(&net, &t, &g, &ratio(1, 3), DeformationSchedule::Paper).expect("deformation")
}
