//! Maximum torque transmissibility analysis.
//!
//! Two frequency-dependent ratios decide whether the actuator can deliver
//! its full-scale output torque `n_m * t_mc`:
//!
//! * `MTT_tau(w)` — motor torque demanded for full-scale output, normalized
//!   by the continuous torque rating `t_mc`;
//! * `MTT_V(w)` — motor velocity reached during full-scale delivery,
//!   normalized by the permissible velocity `v_p`.
//!
//! Wherever either ratio exceeds 1, the drive limits clip and full-scale
//! delivery fails. The lowest frequency at which a ratio reaches 1 is that
//! channel's maximum-torque bandwidth; the overall bandwidth is the smaller
//! of the two.

use alloc::vec::Vec;

// With std enabled the inherent f64 methods shadow these; without std the
// trait supplies them via libm.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::lti::RationalTF;
use crate::model::{
    build_plants, closed_loop_tc, closed_loop_vm, ControllerParams, LoadCase, SeaParams,
};

/// Relative tolerance (in frequency) for the bandwidth bisection.
pub const BISECT_REL_TOL: f64 = 1e-6;
/// Iteration cap for the bandwidth bisection.
pub const BISECT_MAX_ITER: usize = 200;

/// Log-spaced frequency grid, rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Log,
}

impl FrequencyGrid {
    pub fn log(omega_min: f64, omega_max: f64, points: usize) -> Self {
        Self {
            omega_min,
            omega_max,
            points,
            spacing: Spacing::Log,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.omega_min.is_finite() || self.omega_min <= 0.0 {
            return Err(Error::InvalidParams {
                name: "omega_min",
                value: self.omega_min,
                constraint: "must be finite and > 0",
            });
        }
        if !self.omega_max.is_finite() || self.omega_max <= self.omega_min {
            return Err(Error::InvalidParams {
                name: "omega_max",
                value: self.omega_max,
                constraint: "must be finite and > omega_min",
            });
        }
        if self.points < 2 {
            return Err(Error::InvalidParams {
                name: "points",
                value: self.points as f64,
                constraint: "must be >= 2",
            });
        }
        if self.points > 10_000_000 {
            return Err(Error::InvalidParams {
                name: "points",
                value: self.points as f64,
                constraint: "must be <= 1e7",
            });
        }
        Ok(())
    }

    /// The `i`-th sample; `i = 0` is `omega_min`, `i = points - 1` is
    /// `omega_max`.
    pub fn sample(&self, i: usize) -> f64 {
        let frac = i as f64 / (self.points - 1) as f64;
        self.omega_min * (self.omega_max / self.omega_min).powf(frac)
    }

    pub fn samples(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(|i| self.sample(i))
    }
}

impl Default for FrequencyGrid {
    /// Two decades of margin on each side of the 0-50 rad/s band of interest.
    fn default() -> Self {
        Self::log(1e-2, 1e3, 2000)
    }
}

/// Which ratio, if any, exceeds 1 at a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitingFactor {
    Torque,
    Velocity,
    None,
}

/// Grid sample skipped because the response has a pole exactly there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkippedSample {
    pub index: usize,
    pub omega: f64,
}

/// Sampled transmissibility magnitudes with limiting-factor labels.
///
/// The four lists share one length. Samples where evaluation hit an exact
/// pole are left out of the lists and recorded in `skipped`; for any
/// physically damped parameter set `skipped` is empty and the lists have one
/// entry per grid point.
#[derive(Debug, Clone)]
pub struct MttCurve {
    pub omega: Vec<f64>,
    pub mtt_tau: Vec<f64>,
    pub mtt_v: Vec<f64>,
    pub limiting: Vec<LimitingFactor>,
    pub skipped: Vec<SkippedSample>,
}

impl MttCurve {
    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }
}

/// A maximum-torque bandwidth value.
///
/// `Zero` means the ratio already exceeds 1 at DC (no frequency delivers
/// full scale); `Unbounded` means no crossing was found below the top of the
/// search grid. The ordering used to combine channels is
/// `Zero < Finite(_) < Unbounded`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    Zero,
    Finite(f64),
    Unbounded,
}

impl Bandwidth {
    fn rank(&self) -> (u8, f64) {
        match *self {
            Bandwidth::Zero => (0, 0.0),
            Bandwidth::Finite(w) => (1, w),
            Bandwidth::Unbounded => (2, 0.0),
        }
    }

    /// Total order with `Zero` below every finite value and `Unbounded`
    /// above. Finite values order by frequency.
    pub fn le(&self, other: &Bandwidth) -> bool {
        let (ra, wa) = self.rank();
        let (rb, wb) = other.rank();
        (ra, wa) <= (rb, wb)
    }

    pub fn as_finite(&self) -> Option<f64> {
        match *self {
            Bandwidth::Finite(w) => Some(w),
            _ => None,
        }
    }
}

/// Which channel sets the overall bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BindingFactor {
    Torque,
    Velocity,
    /// Both channels are unbounded on the search grid.
    Neither,
}

/// Bandwidths of both channels, their combination and scan diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthReport {
    pub omega_mt_tau: Bandwidth,
    pub omega_mt_v: Bandwidth,
    /// The smaller of the two channel bandwidths.
    pub omega_mt: Bandwidth,
    /// Channel achieving `omega_mt`; ties report `Torque`.
    pub binding: BindingFactor,
    /// Sign changes of `MTT_tau - 1` seen on the grid (resonant curves can
    /// re-cross; only the lowest crossing is reported).
    pub tau_sign_changes: usize,
    pub v_sign_changes: usize,
}

/// Precomputed closed-loop responses for repeated evaluation of both ratios.
#[derive(Debug, Clone)]
pub struct MttEvaluator {
    tc: RationalTF,
    vm: RationalTF,
    tau_scale: f64,
    v_scale: f64,
    dc_tau: f64,
    dc_v: f64,
}

impl MttEvaluator {
    pub fn new(p: &SeaParams, c: &ControllerParams) -> Result<Self> {
        let plants = build_plants(p, c)?;
        let tc = closed_loop_tc(&plants, p.n_m)?;
        let vm = closed_loop_vm(&plants, p.n_m)?;
        Ok(Self {
            tc,
            vm,
            tau_scale: p.n_m,
            v_scale: p.n_m * p.t_mc / p.v_p,
            dc_tau: dc_tau_value(p, c),
            dc_v: dc_v_value(p, c),
        })
    }

    /// `MTT_tau` at `omega` (rad/s, > 0).
    pub fn tau_at(&self, omega: f64) -> Result<f64> {
        Ok(self.tc.magnitude_at(omega)? * self.tau_scale)
    }

    /// `MTT_V` at `omega` (rad/s, >= 0). The DC value is the analytic limit.
    pub fn v_at(&self, omega: f64) -> Result<f64> {
        if omega == 0.0 {
            return Ok(self.dc_v);
        }
        Ok(self.vm.magnitude_at(omega)? * self.v_scale)
    }

    /// Analytic `omega -> 0` limit of `MTT_tau`.
    pub fn dc_tau(&self) -> f64 {
        self.dc_tau
    }

    /// Analytic `omega -> 0` limit of `MTT_V`.
    pub fn dc_v(&self) -> f64 {
        self.dc_v
    }
}

fn dc_tau_value(p: &SeaParams, c: &ControllerParams) -> f64 {
    // The derivative gain does not survive the limit.
    match p.load_case {
        LoadCase::Dynamic => {
            let refl_bl = p.b_l / (p.n_m * p.n_m);
            c.k_p * (p.b_m + refl_bl) / (p.b_m + (1.0 + c.k_p) * refl_bl)
        }
        LoadCase::Static => c.k_p / (1.0 + c.k_p),
    }
}

fn dc_v_value(p: &SeaParams, c: &ControllerParams) -> f64 {
    match p.load_case {
        LoadCase::Dynamic => {
            let refl_bl = p.b_l / (p.n_m * p.n_m);
            c.k_p * (p.t_mc / p.v_p) / (p.b_m + (1.0 + c.k_p) * refl_bl)
        }
        // An integrator survives in the denominator: the limit is zero.
        LoadCase::Static => 0.0,
    }
}

/// `MTT_tau` at a single frequency (rad/s, > 0; the DC value comes from
/// [`mtt_dc_limit`]).
pub fn mtt_tau_at(p: &SeaParams, c: &ControllerParams, omega: f64) -> Result<f64> {
    MttEvaluator::new(p, c)?.tau_at(omega)
}

/// `MTT_V` at a single frequency (rad/s, >= 0).
pub fn mtt_v_at(p: &SeaParams, c: &ControllerParams, omega: f64) -> Result<f64> {
    MttEvaluator::new(p, c)?.v_at(omega)
}

/// Closed-form `omega -> 0` limit of `MTT_tau`.
///
/// Dynamic: `K_p (B_m + n_m^-2 B_l) / (B_m + n_m^-2 (1 + K_p) B_l)`.
/// Static: `K_p / (1 + K_p)`. The derivative gain does not enter.
pub fn mtt_dc_limit(p: &SeaParams, c: &ControllerParams) -> Result<f64> {
    p.validate()?;
    c.validate()?;
    Ok(dc_tau_value(p, c))
}

/// Closed-form `omega -> 0` limit of `MTT_V`.
///
/// Dynamic: `K_p (t_mc / v_p) / (B_m + n_m^-2 (1 + K_p) B_l)`; static: 0.
pub fn mtt_v_dc_limit(p: &SeaParams, c: &ControllerParams) -> Result<f64> {
    p.validate()?;
    c.validate()?;
    Ok(dc_v_value(p, c))
}

/// The proportional gain at which the DC value of `MTT_tau` reaches 1 and
/// the maximum-torque bandwidth collapses: `1 + n_m^-2 B_l / B_m`.
///
/// Defined for the dynamic load case only; in the static case the DC value
/// is `K_p / (1 + K_p) < 1` for every gain, so no finite marginal gain
/// exists. Accepts `b_l = 0` (no load damping), where the marginal gain is 1.
pub fn marginal_gain(p: &SeaParams) -> Result<f64> {
    if p.load_case != LoadCase::Dynamic {
        return Err(Error::StaticCaseUnsupported);
    }
    check_marginal_inputs(p)?;
    Ok(1.0 + p.b_l / (p.n_m * p.n_m * p.b_m))
}

fn check_marginal_inputs(p: &SeaParams) -> Result<()> {
    if !p.b_m.is_finite() || p.b_m <= 0.0 {
        return Err(Error::InvalidParams {
            name: "bm",
            value: p.b_m,
            constraint: "must be finite and > 0",
        });
    }
    if !p.n_m.is_finite() || p.n_m <= 0.0 {
        return Err(Error::InvalidParams {
            name: "nm",
            value: p.n_m,
            constraint: "must be finite and > 0",
        });
    }
    if !p.b_l.is_finite() || p.b_l < 0.0 {
        return Err(Error::InvalidParams {
            name: "bl",
            value: p.b_l,
            constraint: "must be finite and >= 0",
        });
    }
    Ok(())
}

/// Samples both ratios over `grid` and labels the limiting factor per sample.
///
/// A pole exactly on a grid frequency is recorded in
/// [`MttCurve::skipped`] instead of aborting the curve.
pub fn mtt_curve(p: &SeaParams, c: &ControllerParams, grid: &FrequencyGrid) -> Result<MttCurve> {
    grid.validate()?;
    let eval = MttEvaluator::new(p, c)?;
    let mut curve = MttCurve {
        omega: Vec::with_capacity(grid.points),
        mtt_tau: Vec::with_capacity(grid.points),
        mtt_v: Vec::with_capacity(grid.points),
        limiting: Vec::with_capacity(grid.points),
        skipped: Vec::new(),
    };
    for (i, w) in grid.samples().enumerate() {
        match (eval.tau_at(w), eval.v_at(w)) {
            (Ok(tau), Ok(v)) => {
                curve.omega.push(w);
                curve.mtt_tau.push(tau);
                curve.mtt_v.push(v);
                curve.limiting.push(limiting_factor(tau, v));
            }
            _ => curve.skipped.push(SkippedSample { index: i, omega: w }),
        }
    }
    Ok(curve)
}

fn limiting_factor(tau: f64, v: f64) -> LimitingFactor {
    if tau >= v && tau > 1.0 {
        LimitingFactor::Torque
    } else if v > tau && v > 1.0 {
        LimitingFactor::Velocity
    } else {
        LimitingFactor::None
    }
}

/// Finds both channel bandwidths on `search` and combines them.
///
/// Per channel: a DC value above 1 reports [`Bandwidth::Zero`]; otherwise the
/// grid is scanned for the first magnitude-1 crossing, refined by bisection
/// to [`BISECT_REL_TOL`] relative in frequency; no crossing below
/// `omega_max` reports [`Bandwidth::Unbounded`].
pub fn bandwidth(
    p: &SeaParams,
    c: &ControllerParams,
    search: &FrequencyGrid,
) -> Result<BandwidthReport> {
    search.validate()?;
    let eval = MttEvaluator::new(p, c)?;
    let (omega_mt_tau, tau_sign_changes) = scan_channel(|w| eval.tau_at(w), eval.dc_tau(), search)?;
    let (omega_mt_v, v_sign_changes) = scan_channel(|w| eval.v_at(w), eval.dc_v(), search)?;

    let (omega_mt, binding) =
        if omega_mt_tau == Bandwidth::Unbounded && omega_mt_v == Bandwidth::Unbounded {
            (Bandwidth::Unbounded, BindingFactor::Neither)
        } else if omega_mt_tau.le(&omega_mt_v) {
            (omega_mt_tau, BindingFactor::Torque)
        } else {
            (omega_mt_v, BindingFactor::Velocity)
        };

    Ok(BandwidthReport {
        omega_mt_tau,
        omega_mt_v,
        omega_mt,
        binding,
        tau_sign_changes,
        v_sign_changes,
    })
}

fn scan_channel<F>(mut m: F, dc: f64, grid: &FrequencyGrid) -> Result<(Bandwidth, usize)>
where
    F: FnMut(f64) -> Result<f64>,
{
    if dc > 1.0 {
        return Ok((Bandwidth::Zero, 0));
    }

    let mut sign_changes = 0usize;
    let mut first: Option<(f64, f64, f64, f64)> = None;
    let mut prev: Option<(f64, f64)> = None;

    for w in grid.samples() {
        let g = match m(w) {
            Ok(v) => v - 1.0,
            // An exact pole on a sample: leave the sample out of the scan.
            Err(Error::PoleAtFrequency { .. }) => continue,
            Err(e) => return Err(e),
        };
        if g == 0.0 {
            // Landed exactly on a crossing.
            sign_changes += 1;
            if first.is_none() {
                first = Some((w, 0.0, w, 0.0));
            }
            prev = Some((w, 1e-300));
            continue;
        }
        match prev {
            None => {
                // The DC limit is below 1; a first sample above 1 means the
                // crossing sits under the grid floor.
                if g > 0.0 {
                    sign_changes += 1;
                    if let Some(bracket) = bracket_below(&mut m, w, g)? {
                        if first.is_none() {
                            first = Some(bracket);
                        }
                    }
                }
            }
            Some((pw, pg)) => {
                if pg * g < 0.0 {
                    sign_changes += 1;
                    if first.is_none() {
                        first = Some((pw, pg, w, g));
                    }
                }
            }
        }
        prev = Some((w, g));
    }

    match first {
        Some((lo, glo, hi, _)) if lo == hi => {
            let _ = glo;
            Ok((Bandwidth::Finite(lo), sign_changes))
        }
        Some((lo, glo, hi, ghi)) => {
            let root = bisect(&mut m, lo, glo, hi, ghi)?;
            Ok((Bandwidth::Finite(root), sign_changes))
        }
        None => Ok((Bandwidth::Unbounded, sign_changes)),
    }
}

/// Expands below the grid floor to find the low end of a bracket when the
/// first grid sample is already above 1.
fn bracket_below<F>(m: &mut F, hi: f64, ghi: f64) -> Result<Option<(f64, f64, f64, f64)>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut lo = hi;
    for _ in 0..60 {
        lo *= 0.5;
        let g = match m(lo) {
            Ok(v) => v - 1.0,
            Err(Error::PoleAtFrequency { .. }) => continue,
            Err(e) => return Err(e),
        };
        if g < 0.0 {
            return Ok(Some((lo, g, hi, ghi)));
        }
    }
    Ok(None)
}

fn bisect<F>(m: &mut F, mut lo: f64, mut glo: f64, mut hi: f64, _ghi: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    for _ in 0..BISECT_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) <= BISECT_REL_TOL * mid {
            return Ok(mid);
        }
        let g = match m(mid) {
            Ok(v) => v - 1.0,
            // A pole inside the bracket behaves as an above-1 excursion.
            Err(Error::PoleAtFrequency { .. }) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        if g == 0.0 {
            return Ok(mid);
        }
        if (g < 0.0) == (glo < 0.0) {
            lo = mid;
            glo = g;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Designable quantity varied by [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Kp,
    Kd,
    Nm,
    Ks,
    Jl,
}

/// One sweep point: the parameter value and the bandwidth report, or the
/// validation error for that value.
#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub value: f64,
    pub report: Result<BandwidthReport>,
}

/// Evaluates [`bandwidth`] at each value of one parameter, all others held
/// fixed. Invalid values report their error per entry without aborting the
/// sweep; entries come back in input order.
pub fn sweep(
    p: &SeaParams,
    c: &ControllerParams,
    param: SweepParam,
    values: &[f64],
    search: &FrequencyGrid,
) -> Vec<SweepEntry> {
    values
        .iter()
        .map(|&value| {
            let mut p2 = *p;
            let mut c2 = *c;
            match param {
                SweepParam::Kp => c2.k_p = value,
                SweepParam::Kd => c2.k_d = value,
                SweepParam::Nm => p2.n_m = value,
                SweepParam::Ks => p2.k_s = value,
                SweepParam::Jl => p2.j_l = value,
            }
            SweepEntry {
                value,
                report: bandwidth(&p2, &c2, search),
            }
        })
        .collect()
}
