//! Maximum-torque transmissibility analysis for series elastic actuators.
//!
//! A series elastic actuator delivers torque through a spring: output torque
//! is spring stiffness times deflection, and a feedback controller shapes
//! that deflection. The motor drive imposes two hard ceilings — a continuous
//! torque rating and a permissible velocity — and this crate quantifies how
//! those ceilings bound full-scale torque delivery as a function of
//! frequency:
//!
//! * [`lti`] — polynomial / rational transfer-function arithmetic with
//!   complex frequency-response evaluation;
//! * [`model`] — the two-mass actuator plants and closed-loop transfer
//!   functions, for free-load and fixed-load conditions;
//! * [`mtt`] — transmissibility curves, maximum-torque bandwidth search and
//!   design-parameter sweeps;
//! * [`sim`] — a nonlinear fixed-step simulation with torque clamping and
//!   velocity derating, used to cross-check every frequency-domain
//!   prediction in the time domain.
//!
//! The crate is `no_std` (with `alloc`); the companion `sea-mtt` crate
//! carries file formats and the command-line front end.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod lti;
pub mod model;
pub mod mtt;
pub mod sim;

pub use error::{Error, Result};
pub use lti::{feedback, Polynomial, RationalTF};
pub use model::{
    build_plants, closed_loop_tc, closed_loop_vm, ControllerParams, LoadCase, SeaParams,
    SeaPlantSet,
};
pub use mtt::{
    bandwidth, marginal_gain, mtt_curve, mtt_dc_limit, mtt_tau_at, mtt_v_at, mtt_v_dc_limit, sweep,
    Bandwidth, BandwidthReport, BindingFactor, FrequencyGrid, LimitingFactor, MttCurve,
    MttEvaluator, SweepEntry, SweepParam,
};
pub use sim::{
    limit_model, run, steady_state_peak, step, Channel, Reference, SimConfig, SimState, SimTrace,
};
