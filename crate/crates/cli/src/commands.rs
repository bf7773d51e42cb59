//! Subcommand implementations: analysis tables, bandwidth reports,
//! design-parameter sweeps, simulation runs and the self-verification
//! battery.

use std::fs;
use std::path::Path;

use sea_mtt_core::mtt::MttEvaluator;
use sea_mtt_core::sim::DEFAULT_LAST_CYCLES;
use sea_mtt_core::{
    bandwidth, marginal_gain, mtt_curve, mtt_dc_limit, mtt_v_dc_limit, run, steady_state_peak,
    step, sweep, Bandwidth, BindingFactor, Channel, Error as CoreError, LimitingFactor, LoadCase,
    Reference, SeaParams, SimConfig, SimState, SweepParam,
};

use crate::config::Config;
use crate::svg::{render_loglog, Series};
use crate::table::{fmt_num, Cell, CsvTable};

const TAU: f64 = std::f64::consts::TAU;

/// Command failures carrying the process exit code: input errors exit 2,
/// numerical failures exit 3, a failed verification exits 1.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numerical(String),
    VerifyFailed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerifyFailed => 1,
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn message(&self) -> Option<&str> {
        match self {
            CliError::Input(m) | CliError::Numerical(m) => Some(m),
            CliError::VerifyFailed => None,
        }
    }
}

fn core_err(e: CoreError) -> CliError {
    match e {
        CoreError::InvalidParams { .. } | CoreError::InsufficientDuration => {
            CliError::Input(e.to_string())
        }
        CoreError::PoleAtFrequency { .. }
        | CoreError::IdenticallySingular
        | CoreError::NumericalBlowup { .. }
        | CoreError::StaticCaseUnsupported => CliError::Numerical(e.to_string()),
    }
}

/// Whole-file write via a temporary sibling and rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let file_name = path
        .file_name()
        .ok_or_else(|| CliError::Input(format!("not a file path: {}", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", file_name.to_string_lossy()));
    fs::write(&tmp, contents)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path)
        .map_err(|e| CliError::Input(format!("cannot rename into {}: {e}", path.display())))?;
    Ok(())
}

fn limiting_name(l: LimitingFactor) -> &'static str {
    match l {
        LimitingFactor::Torque => "torque",
        LimitingFactor::Velocity => "velocity",
        LimitingFactor::None => "none",
    }
}

fn binding_name(b: BindingFactor) -> &'static str {
    match b {
        BindingFactor::Torque => "torque",
        BindingFactor::Velocity => "velocity",
        BindingFactor::Neither => "neither",
    }
}

/// Samples both transmissibility ratios over the config grid and writes the
/// CSV table (and optionally an SVG rendering of the curves).
pub fn cmd_analyze(cfg: &Config, out: &Path, svg_out: Option<&Path>) -> Result<(), CliError> {
    let curve = mtt_curve(&cfg.params, &cfg.controller, &cfg.grid).map_err(core_err)?;
    for s in &curve.skipped {
        eprintln!(
            "warning: sample {} at omega = {} rad/s skipped (pole on the imaginary axis)",
            s.index, s.omega
        );
    }
    let mut table = CsvTable::new(["omega_rad_s", "mtt_tau", "mtt_v", "limiting"]);
    for i in 0..curve.len() {
        table.push_row(vec![
            Cell::Num(curve.omega[i]),
            Cell::Num(curve.mtt_tau[i]),
            Cell::Num(curve.mtt_v[i]),
            Cell::str(limiting_name(curve.limiting[i])),
        ]);
    }
    write_atomic(out, &table.render())?;

    if let Some(svg_path) = svg_out {
        let tau_pts: Vec<(f64, f64)> = curve
            .omega
            .iter()
            .zip(curve.mtt_tau.iter())
            .map(|(&w, &m)| (w, m))
            .collect();
        let v_pts: Vec<(f64, f64)> = curve
            .omega
            .iter()
            .zip(curve.mtt_v.iter())
            .map(|(&w, &m)| (w, m))
            .collect();
        let svg_text = render_loglog(
            "Maximum torque transmissibility",
            "omega (rad/s)",
            "magnitude",
            &[
                Series {
                    label: "MTT_tau (torque)",
                    color: "#1e8449",
                    points: &tau_pts,
                },
                Series {
                    label: "MTT_V (velocity)",
                    color: "#2471a3",
                    points: &v_pts,
                },
            ],
            1.0,
        );
        write_atomic(svg_path, &svg_text)?;
    }
    Ok(())
}

fn bandwidth_text(b: &Bandwidth, omega_max: f64) -> String {
    match b {
        Bandwidth::Zero => "zero (DC-limited)".to_string(),
        Bandwidth::Finite(w) => {
            format!("{} rad/s ({} Hz)", fmt_num(*w), fmt_num(*w / TAU))
        }
        Bandwidth::Unbounded => {
            format!("unbounded (no crossing below {} rad/s)", fmt_num(omega_max))
        }
    }
}

fn bandwidth_json(b: &Bandwidth) -> serde_json::Value {
    match b {
        Bandwidth::Zero => serde_json::json!("zero"),
        Bandwidth::Finite(w) => serde_json::json!(w),
        Bandwidth::Unbounded => serde_json::json!("unbounded"),
    }
}

/// Renders the bandwidth report, human-readable or as JSON.
pub fn cmd_bandwidth(cfg: &Config, json: bool) -> Result<String, CliError> {
    let report = bandwidth(&cfg.params, &cfg.controller, &cfg.grid).map_err(core_err)?;
    let marginal = match marginal_gain(&cfg.params) {
        Ok(g) => Some(g),
        Err(CoreError::StaticCaseUnsupported) => None,
        Err(e) => return Err(core_err(e)),
    };
    let omega_max = cfg.grid.omega_max;

    if json {
        let value = serde_json::json!({
            "omega_mt_tau_rad_s": bandwidth_json(&report.omega_mt_tau),
            "omega_mt_v_rad_s": bandwidth_json(&report.omega_mt_v),
            "omega_mt_rad_s": bandwidth_json(&report.omega_mt),
            "omega_mt_hz": match report.omega_mt {
                Bandwidth::Finite(w) => serde_json::json!(w / TAU),
                Bandwidth::Zero => serde_json::json!("zero"),
                Bandwidth::Unbounded => serde_json::json!("unbounded"),
            },
            "binding": binding_name(report.binding),
            "marginal_gain_kp": marginal,
            "tau_sign_changes": report.tau_sign_changes,
            "v_sign_changes": report.v_sign_changes,
        });
        return Ok(format!("{value:#}\n"));
    }

    let marginal_line = match marginal {
        Some(g) => format!("{} (dc-critical kp, dynamic case)", fmt_num(g)),
        None => "n/a (static)".to_string(),
    };
    Ok(format!(
        "omega_mt_tau: {}\n\
         omega_mt_v:   {}\n\
         omega_mt:     {}\n\
         binding:      {}\n\
         marginal_gain: {}\n\
         grid sign changes: tau {}, velocity {}\n",
        bandwidth_text(&report.omega_mt_tau, omega_max),
        bandwidth_text(&report.omega_mt_v, omega_max),
        bandwidth_text(&report.omega_mt, omega_max),
        binding_name(report.binding),
        marginal_line,
        report.tau_sign_changes,
        report.v_sign_changes,
    ))
}

fn bandwidth_csv_value(b: &Bandwidth, omega_max: f64) -> f64 {
    match b {
        Bandwidth::Zero => 0.0,
        Bandwidth::Finite(w) => *w,
        Bandwidth::Unbounded => omega_max,
    }
}

/// Sweeps one design parameter and writes a bandwidth table. Zero
/// bandwidths are encoded as 0 and unbounded ones as the grid top; the
/// `dc_limited` and `unbounded` flag columns describe the torque channel
/// (`omega_mt_tau`), where the DC-limit concept lives.
pub fn cmd_sweep(
    cfg: &Config,
    param: SweepParam,
    from: f64,
    to: f64,
    points: usize,
    log: bool,
    out: &Path,
) -> Result<(), CliError> {
    if points < 2 {
        return Err(CliError::Input(format!(
            "invalid parameter `points` = {points}: must be >= 2"
        )));
    }
    if !(from.is_finite() && to.is_finite() && from < to) {
        return Err(CliError::Input(format!(
            "invalid sweep range: from = {from}, to = {to} (need from < to)"
        )));
    }
    if log && from <= 0.0 {
        return Err(CliError::Input("log spacing requires from > 0".to_string()));
    }

    let values: Vec<f64> = (0..points)
        .map(|i| {
            let f = i as f64 / (points - 1) as f64;
            if log {
                from * (to / from).powf(f)
            } else {
                from + (to - from) * f
            }
        })
        .collect();

    let entries = sweep(&cfg.params, &cfg.controller, param, &values, &cfg.grid);
    let mut table = CsvTable::new([
        "param_value",
        "omega_mt_tau",
        "omega_mt_v",
        "omega_mt",
        "binding",
        "dc_limited",
        "unbounded",
    ]);
    for entry in &entries {
        match &entry.report {
            Ok(r) => {
                table.push_row(vec![
                    Cell::Num(entry.value),
                    Cell::Num(bandwidth_csv_value(&r.omega_mt_tau, cfg.grid.omega_max)),
                    Cell::Num(bandwidth_csv_value(&r.omega_mt_v, cfg.grid.omega_max)),
                    Cell::Num(bandwidth_csv_value(&r.omega_mt, cfg.grid.omega_max)),
                    Cell::str(binding_name(r.binding)),
                    Cell::Int((r.omega_mt_tau == Bandwidth::Zero) as i64),
                    Cell::Int((r.omega_mt_tau == Bandwidth::Unbounded) as i64),
                ]);
            }
            Err(e) => {
                eprintln!("warning: value {} skipped: {e}", entry.value);
            }
        }
    }
    write_atomic(out, &table.render())
}

/// Runs one sinusoidal tracking simulation, writes the trace CSV and returns
/// a steady-state summary.
pub fn cmd_simulate(
    cfg: &Config,
    freq: f64,
    amp_scale: f64,
    duration: Option<f64>,
    limits: bool,
    out: &Path,
) -> Result<String, CliError> {
    if !(amp_scale.is_finite() && amp_scale > 0.0) {
        return Err(CliError::Input(format!(
            "invalid parameter `amp_scale` = {amp_scale}: must be finite and > 0"
        )));
    }
    if !(freq.is_finite() && freq > 0.0) {
        return Err(CliError::Input(format!(
            "invalid parameter `freq` = {freq}: must be finite and > 0"
        )));
    }
    let duration = duration.or(cfg.sim_duration).unwrap_or(20.0 * TAU / freq);
    let amplitude = amp_scale * cfg.params.max_output_torque();
    let sim_cfg = SimConfig {
        params: cfg.params,
        controller: cfg.controller,
        reference: Reference::Sine { freq, amplitude },
        dt: cfg.dt,
        duration,
        limits_enabled: limits,
        derate_band: cfg.derate_band,
    };
    let trace = run(&sim_cfg).map_err(core_err)?;

    let mut table = CsvTable::new([
        "t_s",
        "tau_d",
        "tau_out",
        "tau_c_cmd",
        "tau_c_app",
        "v_m",
        "norm_torque",
        "norm_vel",
    ]);
    for i in 0..trace.len() {
        table.push_row(vec![
            Cell::Num(trace.t[i]),
            Cell::Num(trace.tau_d[i]),
            Cell::Num(trace.tau_out[i]),
            Cell::Num(trace.tau_c_cmd[i]),
            Cell::Num(trace.tau_c_app[i]),
            Cell::Num(trace.v_m[i]),
            Cell::Num(trace.norm_torque[i]),
            Cell::Num(trace.norm_vel[i]),
        ]);
    }
    write_atomic(out, &table.render())?;

    let peak_torque = steady_state_peak(&trace, Channel::NormTorque, DEFAULT_LAST_CYCLES, freq)
        .map_err(core_err)?;
    let peak_vel = steady_state_peak(&trace, Channel::NormVelocity, DEFAULT_LAST_CYCLES, freq)
        .map_err(core_err)?;

    let window_start = *trace.t.last().unwrap() - DEFAULT_LAST_CYCLES as f64 * TAU / freq;
    let mut peak_err = 0.0f64;
    let mut sum_sq = 0.0f64;
    let mut count = 0usize;
    for i in 0..trace.len() {
        if trace.t[i] >= window_start {
            let e = trace.tau_d[i] - trace.tau_out[i];
            peak_err = peak_err.max(e.abs());
            sum_sq += e * e;
            count += 1;
        }
    }
    let rms_err = (sum_sq / count as f64).sqrt();

    Ok(format!(
        "samples: {}\n\
         steady-state peak norm_torque: {}\n\
         steady-state peak norm_vel: {}\n\
         peak tracking error / amplitude: {}\n\
         rms tracking error / amplitude: {}\n",
        trace.len(),
        fmt_num(peak_torque),
        fmt_num(peak_vel),
        fmt_num(peak_err / amplitude),
        fmt_num(rms_err / amplitude),
    ))
}

/// One line of the verification battery.
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        name: name.into(),
        passed,
        detail,
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Runs the frequency-vs-time-domain equivalence battery plus the DC,
/// static-limit, bisection-residual, ordering and convergence checks.
pub fn cmd_verify(cfg: &Config) -> Result<Vec<CheckResult>, CliError> {
    let mut results = Vec::new();
    let p = &cfg.params;
    let c = &cfg.controller;
    let eval = MttEvaluator::new(p, c).map_err(core_err)?;

    // DC limits against near-zero evaluation
    {
        let dc = mtt_dc_limit(p, c).map_err(core_err)?;
        let near = eval.tau_at(1e-6).map_err(core_err)?;
        let err = rel_err(near, dc);
        results.push(check(
            "dc_torque_limit",
            err <= 1e-3,
            format!(
                "closed form {}, eval(1e-6) {}, rel err {:.2e}",
                fmt_num(dc),
                fmt_num(near),
                err
            ),
        ));

        let dc_v = mtt_v_dc_limit(p, c).map_err(core_err)?;
        match p.load_case {
            LoadCase::Static => {
                let at_zero = eval.v_at(0.0).map_err(core_err)?;
                results.push(check(
                    "dc_velocity_limit",
                    at_zero == 0.0,
                    format!("static case: MTT_V(0) = {}", fmt_num(at_zero)),
                ));
            }
            LoadCase::Dynamic => {
                let near = eval.v_at(1e-6).map_err(core_err)?;
                let err = rel_err(near, dc_v);
                results.push(check(
                    "dc_velocity_limit",
                    err <= 1e-3,
                    format!(
                        "closed form {}, eval(1e-6) {}, rel err {:.2e}",
                        fmt_num(dc_v),
                        fmt_num(near),
                        err
                    ),
                ));
            }
        }
    }

    // heavy-load convergence to the static formulas
    if p.j_l > 0.0 && p.b_l > 0.0 {
        let heavy = SeaParams {
            j_l: p.j_l * 1e6,
            b_l: p.b_l * 1e6,
            load_case: LoadCase::Dynamic,
            ..*p
        };
        let stat = SeaParams {
            load_case: LoadCase::Static,
            ..*p
        };
        let heavy_eval = MttEvaluator::new(&heavy, c).map_err(core_err)?;
        let stat_eval = MttEvaluator::new(&stat, c).map_err(core_err)?;
        let mut worst_tau = 0.0f64;
        let mut worst_v = 0.0f64;
        for w in cfg.grid.samples() {
            let (Ok(a), Ok(b)) = (heavy_eval.tau_at(w), stat_eval.tau_at(w)) else {
                continue;
            };
            worst_tau = worst_tau.max(rel_err(a, b));
            let (Ok(a), Ok(b)) = (heavy_eval.v_at(w), stat_eval.v_at(w)) else {
                continue;
            };
            worst_v = worst_v.max(rel_err(a, b));
        }
        results.push(check(
            "static_limit_tau",
            worst_tau <= 1e-3,
            format!("worst rel err over grid {worst_tau:.2e}"),
        ));
        results.push(check(
            "static_limit_v",
            worst_v <= 1e-3,
            format!("worst rel err over grid {worst_v:.2e}"),
        ));
    } else {
        results.push(check(
            "static_limit_tau",
            true,
            "skipped: no positive load inertia/damping in config".to_string(),
        ));
    }

    // combined bandwidth is the smaller channel, binding names it
    let report = bandwidth(p, c, &cfg.grid).map_err(core_err)?;
    {
        let min_ok =
            report.omega_mt.le(&report.omega_mt_tau) && report.omega_mt.le(&report.omega_mt_v);
        let binding_ok = match report.binding {
            BindingFactor::Torque => report.omega_mt == report.omega_mt_tau,
            BindingFactor::Velocity => report.omega_mt == report.omega_mt_v,
            BindingFactor::Neither => {
                report.omega_mt_tau == Bandwidth::Unbounded
                    && report.omega_mt_v == Bandwidth::Unbounded
            }
        };
        results.push(check(
            "bandwidth_ordering",
            min_ok && binding_ok,
            format!(
                "tau {:?}, v {:?}, combined {:?}, binding {}",
                report.omega_mt_tau,
                report.omega_mt_v,
                report.omega_mt,
                binding_name(report.binding)
            ),
        ));
    }

    // residual of the unity crossings
    {
        let mut worst: f64 = 0.0;
        let mut seen = false;
        if let Some(w) = report.omega_mt_tau.as_finite() {
            worst = worst.max((eval.tau_at(w).map_err(core_err)? - 1.0).abs());
            seen = true;
        }
        if let Some(w) = report.omega_mt_v.as_finite() {
            worst = worst.max((eval.v_at(w).map_err(core_err)? - 1.0).abs());
            seen = true;
        }
        let detail = if seen {
            format!("worst |MTT(w*) - 1| = {worst:.2e}")
        } else {
            "no finite crossing on the grid".to_string()
        };
        results.push(check("bisect_residual", worst <= 1e-4, detail));
    }

    // integrator convergence under dt halving
    results.push(rk4_convergence_check(cfg));

    // time-domain reproduction of the frequency-domain ratios
    for freq in [1.0, 5.0, 10.0, 20.0, 40.0] {
        match xvalid_at(cfg, &eval, freq) {
            Ok((tau_err, v_err)) => {
                results.push(check(
                    format!("xvalid_tau_w{freq}"),
                    tau_err <= 0.02,
                    format!("rel err {tau_err:.4}"),
                ));
                results.push(check(
                    format!("xvalid_v_w{freq}"),
                    v_err <= 0.02,
                    format!("rel err {v_err:.4}"),
                ));
            }
            Err(msg) => {
                results.push(check(format!("xvalid_tau_w{freq}"), false, msg.clone()));
                results.push(check(format!("xvalid_v_w{freq}"), false, msg));
            }
        }
    }

    Ok(results)
}

fn rk4_convergence_check(cfg: &Config) -> CheckResult {
    let freq = 5.0;
    let amplitude = 0.05 * cfg.params.max_output_torque();
    let make = |dt: f64| SimConfig {
        params: cfg.params,
        controller: cfg.controller,
        reference: Reference::Sine { freq, amplitude },
        dt,
        duration: 2.0,
        limits_enabled: true,
        derate_band: cfg.derate_band,
    };
    let steps = (2.0 / cfg.dt).round().max(1.0) as usize;

    let integrate = |dt: f64, steps: usize| -> Result<SimState, CoreError> {
        let sim_cfg = make(dt);
        let mut state = SimState::default();
        for i in 0..steps {
            state = step(&state, &sim_cfg, i as f64 * dt)?;
        }
        Ok(state)
    };

    let coarse = match integrate(cfg.dt, steps) {
        Ok(s) => s,
        Err(e) => return check("rk4_convergence", false, format!("coarse run failed: {e}")),
    };
    let fine = match integrate(cfg.dt / 2.0, steps * 2) {
        Ok(s) => s,
        Err(e) => return check("rk4_convergence", false, format!("fine run failed: {e}")),
    };
    let diff = [
        coarse.theta_m - fine.theta_m,
        coarse.v_m - fine.v_m,
        coarse.theta_l - fine.theta_l,
        coarse.v_l - fine.v_l,
    ];
    let num: f64 = diff.iter().map(|d| d * d).sum::<f64>().sqrt();
    let den: f64 = [fine.theta_m, fine.v_m, fine.theta_l, fine.v_l]
        .iter()
        .map(|s| s * s)
        .sum::<f64>()
        .sqrt()
        .max(f64::MIN_POSITIVE);
    let err = num / den;
    check(
        "rk4_convergence",
        err <= 1e-6,
        format!("dt {} vs dt/2: final-state rel diff {err:.2e}", cfg.dt),
    )
}

fn xvalid_at(cfg: &Config, eval: &MttEvaluator, freq: f64) -> Result<(f64, f64), String> {
    let tau_pred = eval.tau_at(freq).map_err(|e| e.to_string())?;
    let v_pred = eval.v_at(freq).map_err(|e| e.to_string())?;
    let scale = 0.5 / tau_pred.max(v_pred).max(1.0);
    let sim_cfg = SimConfig {
        params: cfg.params,
        controller: cfg.controller,
        reference: Reference::Sine {
            freq,
            amplitude: scale * cfg.params.max_output_torque(),
        },
        dt: cfg.dt,
        duration: 20.0 * TAU / freq,
        limits_enabled: true,
        derate_band: cfg.derate_band,
    };
    let trace = run(&sim_cfg).map_err(|e| e.to_string())?;
    let peak_torque = steady_state_peak(&trace, Channel::NormTorque, DEFAULT_LAST_CYCLES, freq)
        .map_err(|e| e.to_string())?;
    let peak_vel = steady_state_peak(&trace, Channel::NormVelocity, DEFAULT_LAST_CYCLES, freq)
        .map_err(|e| e.to_string())?;
    Ok((
        rel_err(peak_torque / scale, tau_pred),
        rel_err(peak_vel / scale, v_pred),
    ))
}
