//! Shared fixtures and an independent oracle for the transmissibility
//! ratios.
//!
//! The oracle evaluates the closed-form ratio expressions directly in raw
//! complex arithmetic — no polynomial arithmetic, no feedback composition —
//! so agreement with the library is a genuine two-route check.

// shared across test targets; not every target uses every helper
#![allow(dead_code)]

use num_complex::Complex64;
use sea_mtt_core::{ControllerParams, LoadCase, SeaParams};

/// Identified bench parameter set used across the test suite.
pub fn bench_params(load_case: LoadCase) -> SeaParams {
    SeaParams {
        j_m: 0.000075,
        j_l: 0.005,
        b_m: 0.0006,
        b_l: 0.08,
        k_s: 1.1,
        n_m: 8.0,
        t_mc: 0.0315,
        v_p: 10.472,
        load_case,
    }
}

/// Default controller used by the design studies.
pub fn default_controller() -> ControllerParams {
    ControllerParams {
        k_p: 0.8,
        k_d: 0.05,
    }
}

fn jw(omega: f64) -> Complex64 {
    Complex64::new(0.0, omega)
}

fn motor(p: &SeaParams, s: Complex64) -> Complex64 {
    Complex64::new(1.0, 0.0) / (p.j_m * s * s + p.b_m * s)
}

fn load(p: &SeaParams, s: Complex64) -> Complex64 {
    Complex64::new(1.0, 0.0) / (p.j_l * s * s + p.b_l * s)
}

fn controller(c: &ControllerParams, s: Complex64) -> Complex64 {
    Complex64::new(c.k_p, 0.0) + c.k_d * s
}

/// Torque ratio from the closed-form expression.
pub fn mtt_tau_direct(p: &SeaParams, c: &ControllerParams, omega: f64) -> f64 {
    let s = jw(omega);
    let pm = motor(p, s);
    let ctrl = controller(c, s);
    let one = Complex64::new(1.0, 0.0);
    let inv_n2 = 1.0 / (p.n_m * p.n_m);
    match p.load_case {
        LoadCase::Dynamic => {
            let pl = load(p, s);
            let num = (one + p.k_s * (pl + inv_n2 * pm)) * ctrl;
            let den = one + p.k_s * (pl + inv_n2 * pm * (one + ctrl));
            (num / den).norm()
        }
        LoadCase::Static => {
            let num = (one + inv_n2 * p.k_s * pm) * ctrl;
            let den = one + inv_n2 * p.k_s * pm * (one + ctrl);
            (num / den).norm()
        }
    }
}

/// Velocity ratio from the closed-form expression.
pub fn mtt_v_direct(p: &SeaParams, c: &ControllerParams, omega: f64) -> f64 {
    let s = jw(omega);
    let pm = motor(p, s);
    let ctrl = controller(c, s);
    let one = Complex64::new(1.0, 0.0);
    let inv_n2 = 1.0 / (p.n_m * p.n_m);
    let ratio = match p.load_case {
        LoadCase::Dynamic => {
            let pl = load(p, s);
            let num = pm * ctrl * (one + p.k_s * pl) * s;
            let den = one + p.k_s * (pl + inv_n2 * pm * (one + ctrl));
            (num / den).norm()
        }
        LoadCase::Static => {
            let num = pm * ctrl * s;
            let den = one + inv_n2 * p.k_s * pm * (one + ctrl);
            (num / den).norm()
        }
    };
    ratio * p.t_mc / p.v_p
}

pub fn rel_err(got: f64, expect: f64) -> f64 {
    (got - expect).abs() / expect.abs().max(f64::MIN_POSITIVE)
}
