//! Ergodicity of the linear Hamiltonian flow on invariant tori.

mod average;
mod independence;
mod modes;
mod observable;

pub use average::{
    ergodicity_experiment, time_average, time_average_series, torus_average, ErgodicityOptions, ErgodicityReport,
    RunningAverage, DEFAULT_CHECKPOINTS,
};
pub use independence::{check_rational_independence, search_space_size, IndependenceVerdict, DEFAULT_BUDGET};
pub use modes::{
    action_angle_of_modes, modes_from_action_angle, normal_modes, to_action_angle, wrap_angle, ActionAngle,
    NormalModeFrame, DEGENERACY_TOL, ZERO_ACTION,
};
pub use observable::{Monomial, Observable, Polynomial};
