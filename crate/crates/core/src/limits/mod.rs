//! Large-`s` behaviour along the ray: density limits against test
//! batteries, rate fits, polarization limits and metric degeneration.

pub mod battery;
pub mod diagnostics;
pub mod fit;
pub mod metric;
pub mod polarization;

pub use battery::{TestBattery, TestFunction};
pub use diagnostics::{
    chord_region, component_means, delta_diagnostic, face_delta_diagnostic, pairing_table, scan_gap, separable_battery,
    uniform_diagnostic, PairingTable, SeparableTest,
};
pub use fit::{decreasing_after, fit, fit_best, RateFit, RateModel};
pub use metric::{metric_length, theta_circumference};
pub use polarization::{
    distance_to_real, mixed_limit_plane, polarization_distance, real_plane, PolarizationError, PolarizationFrame, Subspace,
};
