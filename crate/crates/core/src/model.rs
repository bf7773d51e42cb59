//! Series-elastic-actuator plant construction.
//!
//! The actuator is a two-mass system: a geared motor coupled to a load
//! through a torsional spring. Output torque is spring stiffness times
//! spring deflection, and force control closes a loop on that deflection.
//! Two load conditions are modeled: a free inertia-damper load (`Dynamic`)
//! and a rigidly fixed load side (`Static`), the latter being the limit of
//! the former as load inertia and damping grow without bound.

use alloc::vec;

use crate::error::{Error, Result};
use crate::lti::{feedback, Polynomial, RationalTF};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoadCase {
    Dynamic,
    Static,
}

/// Mechanical, load and drive-limit parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeaParams {
    /// Motor inertia, kg·m².
    pub j_m: f64,
    /// Load inertia, kg·m². Ignored in the static load case.
    pub j_l: f64,
    /// Motor damping, N·m·s/rad.
    pub b_m: f64,
    /// Load damping, N·m·s/rad. Ignored in the static load case.
    pub b_l: f64,
    /// Spring stiffness, N·m/rad.
    pub k_s: f64,
    /// Total motor-to-spring gear ratio (output torque multiplier).
    pub n_m: f64,
    /// Maximum continuous motor torque, N·m.
    pub t_mc: f64,
    /// Maximum permissible motor velocity, rad/s.
    pub v_p: f64,
    pub load_case: LoadCase,
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() || value <= 0.0 {
        return Err(Error::InvalidParams {
            name,
            value,
            constraint: "must be finite and > 0",
        });
    }
    Ok(())
}

fn check_non_negative(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() || value < 0.0 {
        return Err(Error::InvalidParams {
            name,
            value,
            constraint: "must be finite and >= 0",
        });
    }
    Ok(())
}

impl SeaParams {
    pub fn validate(&self) -> Result<()> {
        check_positive("jm", self.j_m)?;
        check_positive("bm", self.b_m)?;
        check_positive("ks", self.k_s)?;
        check_positive("nm", self.n_m)?;
        check_positive("tmc", self.t_mc)?;
        check_positive("vp", self.v_p)?;
        if self.load_case == LoadCase::Dynamic {
            check_positive("jl", self.j_l)?;
            check_positive("bl", self.b_l)?;
        }
        Ok(())
    }

    /// Largest output torque the actuator can be asked for: gear ratio times
    /// the maximum continuous motor torque.
    pub fn max_output_torque(&self) -> f64 {
        self.n_m * self.t_mc
    }
}

/// Force feedback controller `C(s) = K_p + K_d s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerParams {
    /// Proportional gain, dimensionless.
    pub k_p: f64,
    /// Derivative gain, seconds. Zero gives a pure P controller.
    pub k_d: f64,
}

impl ControllerParams {
    pub fn validate(&self) -> Result<()> {
        check_positive("kp", self.k_p)?;
        check_non_negative("kd", self.k_d)?;
        Ok(())
    }

    pub fn tf(&self) -> RationalTF {
        RationalTF::new(Polynomial::new(vec![self.k_p, self.k_d]), Polynomial::one())
    }
}

/// Every transfer function needed downstream, built from one parameter set.
#[derive(Debug, Clone)]
pub struct SeaPlantSet {
    /// Motor dynamics `1/(J_m s^2 + B_m s)`.
    pub p_m: RationalTF,
    /// Load dynamics `1/(J_l s^2 + B_l s)`; `None` in the static case.
    pub p_l: Option<RationalTF>,
    /// Motor torque to output torque.
    pub p_out: RationalTF,
    /// Motor torque to motor velocity.
    pub p_v: RationalTF,
    /// Feedback controller.
    pub c: RationalTF,
}

/// Builds the open-loop plant set for the given load case.
///
/// Dynamic case:
/// `p_out = n_m^-1 K_s P_m / (1 + K_s P_l + n_m^-2 K_s P_m)` and
/// `p_v = P_m (1 + K_s P_l) s / (1 + K_s P_l + n_m^-2 K_s P_m)`.
/// Static case: the same with the load branch removed
/// (`P_l -> 0`, the infinite-impedance limit).
pub fn build_plants(p: &SeaParams, c: &ControllerParams) -> Result<SeaPlantSet> {
    p.validate()?;
    c.validate()?;

    let p_m = RationalTF::new(Polynomial::one(), Polynomial::new(vec![0.0, p.b_m, p.j_m]));
    let inv_n2_ks = p.k_s / (p.n_m * p.n_m);
    let inv_n_ks = p.k_s / p.n_m;

    let (p_l, p_out, p_v) = match p.load_case {
        LoadCase::Dynamic => {
            let p_l = RationalTF::new(Polynomial::one(), Polynomial::new(vec![0.0, p.b_l, p.j_l]));
            let loop_sum = RationalTF::one() + p_l.scale(p.k_s) + p_m.scale(inv_n2_ks);
            let p_out = p_m.scale(inv_n_ks) / loop_sum.clone();
            let p_v =
                p_m.clone() * RationalTF::s() * (RationalTF::one() + p_l.scale(p.k_s)) / loop_sum;
            (Some(p_l), p_out, p_v)
        }
        LoadCase::Static => {
            let loop_sum = RationalTF::one() + p_m.scale(inv_n2_ks);
            let p_out = p_m.scale(inv_n_ks) / loop_sum.clone();
            let p_v = p_m.clone() * RationalTF::s() / loop_sum;
            (None, p_out, p_v)
        }
    };

    Ok(SeaPlantSet {
        p_m,
        p_l,
        p_out,
        p_v,
        c: c.tf(),
    })
}

/// Closed-loop transfer function from desired torque to motor torque demand:
/// `n_m^-1 C / (1 + n_m^-1 C p_out)`.
pub fn closed_loop_tc(plants: &SeaPlantSet, n_m: f64) -> Result<RationalTF> {
    feedback(&plants.c.scale(1.0 / n_m), &plants.p_out)
}

/// Closed-loop transfer function from desired torque to motor velocity:
/// `p_v` cascaded after [`closed_loop_tc`].
pub fn closed_loop_vm(plants: &SeaPlantSet, n_m: f64) -> Result<RationalTF> {
    Ok(plants.p_v.clone() * closed_loop_tc(plants, n_m)?)
}
