//! Low-energy quantum scattering for short-range central potentials:
//! phase shifts, scattering length, effective range, and truncation-scan
//! verification of the tail-decay finiteness theorems.

mod error;
mod grid;
mod observables;
mod potential;
mod quadrature;
mod radial;
mod scans;
mod solver;
mod special;
mod validate;

pub use error::{Error, Result};
pub use grid::{GridSpec, RadialGrid};
pub use observables::{
    b_coefficient, barred_coefficients, effective_range, effective_range_direct, levinson,
    low_k_expansion, phase_shift_curve, phase_shift_integral, phase_shift_matching,
    scattering_length, scattering_length_ell, subtracted_phase, BarredCoefficients,
    EffectiveRangeDiagnostics, EffectiveRangeResult, LevinsonReport, MethodTag, ObservableValue,
    PhaseMethod, PhaseShiftCurve, ScatteringLengthReport,
};
pub use potential::{Finiteness, PotentialSpec};
pub use scans::{
    default_cutoffs, theorem_matrix, truncation_scan, ConvergenceScan, ScanQuantity, TheoremCell,
    TheoremMatrix, Verdict,
};
pub use radial::{
    bound_states, count_nodes, solve_regular, solve_zero_bounded, solve_zero_growing,
    solve_zero_regular_volterra, wronskian, zero_energy_report, BoundStateSpectrum, Normalization,
    RadialSolution, WronskianReport, ZeroEnergyReport,
};
pub use special::{double_factorial_odd, riccati_bessel, RiccatiBesselValues, ELL_MAX};
pub use validate::{validation_suite, CheckResult};
