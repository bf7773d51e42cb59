use core::fmt;

/// Errors produced by model construction, frequency-domain evaluation and
/// time-domain simulation.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates its documented bound. `name` is the short
    /// parameter key (`jm`, `ks`, `kp`, `dt`, ...).
    InvalidParams {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },
    /// `1 + forward * loop` vanishes identically; the closed loop is undefined.
    IdenticallySingular,
    /// The denominator evaluates to exactly zero at the requested frequency.
    PoleAtFrequency { omega: f64 },
    /// The requested quantity exists only for the dynamic load case.
    StaticCaseUnsupported,
    /// A simulation state left the trusted numeric range (instability or bad dt).
    NumericalBlowup { t: f64 },
    /// The trace does not cover the requested steady-state window.
    InsufficientDuration,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParams {
                name,
                value,
                constraint,
            } => write!(f, "invalid parameter `{name}` = {value}: {constraint}"),
            Error::IdenticallySingular => {
                write!(
                    f,
                    "1 + forward*loop is identically zero; feedback loop is singular"
                )
            }
            Error::PoleAtFrequency { omega } => {
                write!(f, "transfer function has a pole at omega = {omega} rad/s")
            }
            Error::StaticCaseUnsupported => {
                write!(f, "not defined for the static load case")
            }
            Error::NumericalBlowup { t } => {
                write!(
                    f,
                    "simulation state exceeded 1e12 at t = {t} s (unstable or dt too large)"
                )
            }
            Error::InsufficientDuration => {
                write!(f, "trace too short for the requested steady-state window")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
