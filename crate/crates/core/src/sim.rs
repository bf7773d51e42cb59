//! Nonlinear time-domain simulation of the two-mass actuator under PD force
//! feedback, with motor torque clamping and permissible-velocity derating.
//!
//! The simulator integrates the same dynamics the frequency-domain models
//! linearize, so unsaturated runs reproduce the transmissibility curves and
//! saturated runs show where full-scale delivery actually breaks down. The
//! controller derivative acts on exact state derivatives (reference rates
//! are analytic), keeping the realized control law equal to `K_p + K_d s`.
//!
//! Identical configurations produce bit-identical traces.

use alloc::vec::Vec;

// With std enabled the inherent f64 methods shadow these; without std the
// trait supplies them via libm.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::model::{ControllerParams, LoadCase, SeaParams};

/// Default integration step, s.
pub const DEFAULT_DT: f64 = 1e-4;
/// Default width of the velocity derating band, as a fraction of `v_p`.
pub const DEFAULT_DERATE_BAND: f64 = 0.05;
/// Default number of trailing cycles used for steady-state extraction.
pub const DEFAULT_LAST_CYCLES: usize = 5;
/// State magnitude beyond which the integration is declared broken.
const BLOWUP_LIMIT: f64 = 1e12;
/// Cap on trace length, so a bad duration/dt pair fails validation instead
/// of exhausting memory.
const MAX_SAMPLES: usize = 20_000_000;

/// Desired-torque reference waveform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reference {
    Sine {
        /// rad/s
        freq: f64,
        /// N·m
        amplitude: f64,
    },
    /// Linear frequency ramp from `f0` to `f1` (both rad/s) over `duration`.
    Chirp {
        f0: f64,
        f1: f64,
        duration: f64,
        amplitude: f64,
    },
}

impl Reference {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Reference::Sine { freq, amplitude } => amplitude * (freq * t).sin(),
            Reference::Chirp {
                f0,
                f1,
                duration,
                amplitude,
            } => amplitude * chirp_phase(f0, f1, duration, t).sin(),
        }
    }

    /// Analytic time derivative of [`Reference::value`].
    pub fn rate(&self, t: f64) -> f64 {
        match *self {
            Reference::Sine { freq, amplitude } => amplitude * freq * (freq * t).cos(),
            Reference::Chirp {
                f0,
                f1,
                duration,
                amplitude,
            } => {
                let inst = f0 + (f1 - f0) * t / duration;
                amplitude * inst * chirp_phase(f0, f1, duration, t).cos()
            }
        }
    }

    pub fn amplitude(&self) -> f64 {
        match *self {
            Reference::Sine { amplitude, .. } => amplitude,
            Reference::Chirp { amplitude, .. } => amplitude,
        }
    }
}

fn chirp_phase(f0: f64, f1: f64, duration: f64, t: f64) -> f64 {
    f0 * t + (f1 - f0) * t * t / (2.0 * duration)
}

/// Full description of one simulation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub params: SeaParams,
    pub controller: ControllerParams,
    pub reference: Reference,
    /// Fixed integration step, s.
    pub dt: f64,
    /// Total simulated time, s.
    pub duration: f64,
    /// Apply the torque clamp and velocity derating.
    pub limits_enabled: bool,
    /// Width of the derating band above `v_p`, as a fraction of `v_p`.
    pub derate_band: f64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.controller.validate()?;
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(Error::InvalidParams {
                name: "dt",
                value: self.dt,
                constraint: "must be finite and > 0",
            });
        }
        if !self.duration.is_finite() || self.duration <= 0.0 {
            return Err(Error::InvalidParams {
                name: "duration",
                value: self.duration,
                constraint: "must be finite and > 0",
            });
        }
        if !self.derate_band.is_finite() || self.derate_band <= 0.0 {
            return Err(Error::InvalidParams {
                name: "derate_band",
                value: self.derate_band,
                constraint: "must be finite and > 0",
            });
        }
        // keep the recorded trace allocatable
        if self.duration / self.dt > MAX_SAMPLES as f64 {
            return Err(Error::InvalidParams {
                name: "duration",
                value: self.duration,
                constraint: "duration/dt must not exceed 2e7 samples",
            });
        }
        match self.reference {
            Reference::Sine { freq, amplitude } => {
                if !freq.is_finite() || freq <= 0.0 {
                    return Err(Error::InvalidParams {
                        name: "freq",
                        value: freq,
                        constraint: "must be finite and > 0",
                    });
                }
                if !amplitude.is_finite() || amplitude <= 0.0 {
                    return Err(Error::InvalidParams {
                        name: "amplitude",
                        value: amplitude,
                        constraint: "must be finite and > 0",
                    });
                }
                // enough cycles to reach and observe steady state
                let min_duration = 10.0 * core::f64::consts::TAU / freq;
                if self.duration < min_duration {
                    return Err(Error::InvalidParams {
                        name: "duration",
                        value: self.duration,
                        constraint: "must cover at least 10 reference cycles",
                    });
                }
            }
            Reference::Chirp {
                f0,
                f1,
                duration,
                amplitude,
            } => {
                if !f0.is_finite() || f0 < 0.0 {
                    return Err(Error::InvalidParams {
                        name: "f0",
                        value: f0,
                        constraint: "must be finite and >= 0",
                    });
                }
                if !f1.is_finite() || f1 <= f0 {
                    return Err(Error::InvalidParams {
                        name: "f1",
                        value: f1,
                        constraint: "must be finite and > f0",
                    });
                }
                if !duration.is_finite() || duration <= 0.0 {
                    return Err(Error::InvalidParams {
                        name: "chirp_duration",
                        value: duration,
                        constraint: "must be finite and > 0",
                    });
                }
                if !amplitude.is_finite() || amplitude <= 0.0 {
                    return Err(Error::InvalidParams {
                        name: "amplitude",
                        value: amplitude,
                        constraint: "must be finite and > 0",
                    });
                }
            }
        }
        Ok(())
    }

    /// Number of trace samples: `floor(duration/dt) + 1`.
    pub fn sample_count(&self) -> usize {
        (self.duration / self.dt).floor() as usize + 1
    }
}

/// Mechanical state. `theta_l`/`v_l` stay pinned to zero in the static case.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SimState {
    pub theta_m: f64,
    pub v_m: f64,
    pub theta_l: f64,
    pub v_l: f64,
}

/// Recorded channels, one entry per sample time.
#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    /// Sample times, s.
    pub t: Vec<f64>,
    /// Desired torque, N·m.
    pub tau_d: Vec<f64>,
    /// Delivered output torque `k_s * theta_d`, N·m.
    pub tau_out: Vec<f64>,
    /// Controller torque demand before limits, N·m.
    pub tau_c_cmd: Vec<f64>,
    /// Motor torque after limits, N·m.
    pub tau_c_app: Vec<f64>,
    /// Motor velocity, rad/s.
    pub v_m: Vec<f64>,
    /// `|tau_c_app| / t_mc`.
    pub norm_torque: Vec<f64>,
    /// `|v_m| / v_p`.
    pub norm_vel: Vec<f64>,
}

/// Channel selector for trace post-processing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    TauD,
    TauOut,
    TauCmd,
    TauApp,
    MotorVelocity,
    NormTorque,
    NormVelocity,
}

impl SimTrace {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn channel(&self, ch: Channel) -> &[f64] {
        match ch {
            Channel::TauD => &self.tau_d,
            Channel::TauOut => &self.tau_out,
            Channel::TauCmd => &self.tau_c_cmd,
            Channel::TauApp => &self.tau_c_app,
            Channel::MotorVelocity => &self.v_m,
            Channel::NormTorque => &self.norm_torque,
            Channel::NormVelocity => &self.norm_vel,
        }
    }

    fn with_capacity(n: usize) -> Self {
        Self {
            t: Vec::with_capacity(n),
            tau_d: Vec::with_capacity(n),
            tau_out: Vec::with_capacity(n),
            tau_c_cmd: Vec::with_capacity(n),
            tau_c_app: Vec::with_capacity(n),
            v_m: Vec::with_capacity(n),
            norm_torque: Vec::with_capacity(n),
            norm_vel: Vec::with_capacity(n),
        }
    }
}

/// Drive limit model: hard clamp to the continuous torque rating, then a
/// linear derating of driving torque when the motor runs above `v_p`.
///
/// The clamp always applies. Derating applies only when the clamped torque
/// drives in the direction of motion (`tau * v_m > 0`) and `|v_m| > v_p`;
/// torque falls linearly to zero across `derate_band * v_p` above the limit.
/// Braking torque is never derated.
pub fn limit_model(tau_cmd: f64, v_m: f64, p: &SeaParams, derate_band: f64) -> f64 {
    let clamped = tau_cmd.clamp(-p.t_mc, p.t_mc);
    if clamped * v_m > 0.0 && v_m.abs() > p.v_p {
        let over = (v_m.abs() - p.v_p) / (derate_band * p.v_p);
        clamped * (1.0 - over).max(0.0)
    } else {
        clamped
    }
}

struct ControlSample {
    tau_cmd: f64,
    tau_app: f64,
}

fn control_at(state: &SimState, cfg: &SimConfig, t: f64) -> ControlSample {
    let p = &cfg.params;
    let theta_d = state.theta_m / p.n_m - state.theta_l;
    let err = cfg.reference.value(t) - p.k_s * theta_d;
    let err_rate = cfg.reference.rate(t) - p.k_s * (state.v_m / p.n_m - state.v_l);
    let tau_cmd = (cfg.controller.k_p * err + cfg.controller.k_d * err_rate) / p.n_m;
    let tau_app = if cfg.limits_enabled {
        limit_model(tau_cmd, state.v_m, p, cfg.derate_band)
    } else {
        tau_cmd
    };
    ControlSample { tau_cmd, tau_app }
}

#[derive(Clone, Copy)]
struct Derivs {
    d_theta_m: f64,
    d_v_m: f64,
    d_theta_l: f64,
    d_v_l: f64,
}

fn derivs(state: &SimState, cfg: &SimConfig, t: f64) -> Derivs {
    let p = &cfg.params;
    let ctl = control_at(state, cfg, t);
    let theta_d = state.theta_m / p.n_m - state.theta_l;
    let d_v_m = (ctl.tau_app - p.b_m * state.v_m - p.k_s * theta_d / p.n_m) / p.j_m;
    let (d_theta_l, d_v_l) = match p.load_case {
        LoadCase::Dynamic => (state.v_l, (p.k_s * theta_d - p.b_l * state.v_l) / p.j_l),
        LoadCase::Static => (0.0, 0.0),
    };
    Derivs {
        d_theta_m: state.v_m,
        d_v_m,
        d_theta_l,
        d_v_l,
    }
}

fn advanced(state: &SimState, d: &Derivs, h: f64) -> SimState {
    SimState {
        theta_m: state.theta_m + h * d.d_theta_m,
        v_m: state.v_m + h * d.d_v_m,
        theta_l: state.theta_l + h * d.d_theta_l,
        v_l: state.v_l + h * d.d_v_l,
    }
}

/// One classical fourth-order Runge-Kutta step of length `cfg.dt` from `t`.
///
/// The control law (including limits, when enabled) is re-evaluated at every
/// stage. Fails with [`Error::NumericalBlowup`] when any state component
/// leaves the trusted range.
pub fn step(state: &SimState, cfg: &SimConfig, t: f64) -> Result<SimState> {
    let dt = cfg.dt;
    let k1 = derivs(state, cfg, t);
    let k2 = derivs(&advanced(state, &k1, 0.5 * dt), cfg, t + 0.5 * dt);
    let k3 = derivs(&advanced(state, &k2, 0.5 * dt), cfg, t + 0.5 * dt);
    let k4 = derivs(&advanced(state, &k3, dt), cfg, t + dt);
    let sixth = dt / 6.0;
    let next = SimState {
        theta_m: state.theta_m
            + sixth * (k1.d_theta_m + 2.0 * k2.d_theta_m + 2.0 * k3.d_theta_m + k4.d_theta_m),
        v_m: state.v_m + sixth * (k1.d_v_m + 2.0 * k2.d_v_m + 2.0 * k3.d_v_m + k4.d_v_m),
        theta_l: state.theta_l
            + sixth * (k1.d_theta_l + 2.0 * k2.d_theta_l + 2.0 * k3.d_theta_l + k4.d_theta_l),
        v_l: state.v_l + sixth * (k1.d_v_l + 2.0 * k2.d_v_l + 2.0 * k3.d_v_l + k4.d_v_l),
    };
    for component in [next.theta_m, next.v_m, next.theta_l, next.v_l] {
        if !component.is_finite() || component.abs() > BLOWUP_LIMIT {
            return Err(Error::NumericalBlowup { t });
        }
    }
    Ok(next)
}

/// Integrates from a zero initial state over `cfg.duration`, recording every
/// channel at each sample time.
pub fn run(cfg: &SimConfig) -> Result<SimTrace> {
    cfg.validate()?;
    let n = cfg.sample_count();
    let p = &cfg.params;
    let mut trace = SimTrace::with_capacity(n);
    let mut state = SimState::default();
    for i in 0..n {
        let t = i as f64 * cfg.dt;
        let ctl = control_at(&state, cfg, t);
        let theta_d = state.theta_m / p.n_m - state.theta_l;
        trace.t.push(t);
        trace.tau_d.push(cfg.reference.value(t));
        trace.tau_out.push(p.k_s * theta_d);
        trace.tau_c_cmd.push(ctl.tau_cmd);
        trace.tau_c_app.push(ctl.tau_app);
        trace.v_m.push(state.v_m);
        trace.norm_torque.push(ctl.tau_app.abs() / p.t_mc);
        trace.norm_vel.push(state.v_m.abs() / p.v_p);
        if i + 1 < n {
            state = step(&state, cfg, t)?;
        }
    }
    Ok(trace)
}

/// Maximum absolute value of a channel over the final `last_cycles` periods
/// of a `freq` rad/s cycle.
pub fn steady_state_peak(
    trace: &SimTrace,
    channel: Channel,
    last_cycles: usize,
    freq: f64,
) -> Result<f64> {
    if trace.is_empty() || last_cycles == 0 || freq <= 0.0 {
        return Err(Error::InsufficientDuration);
    }
    let window = last_cycles as f64 * core::f64::consts::TAU / freq;
    let t_end = *trace.t.last().unwrap();
    if t_end < window * (1.0 - 1e-9) {
        return Err(Error::InsufficientDuration);
    }
    let start = t_end - window;
    let data = trace.channel(channel);
    let mut peak = 0.0f64;
    for (i, &t) in trace.t.iter().enumerate() {
        if t >= start {
            peak = peak.max(data[i].abs());
        }
    }
    Ok(peak)
}
