//! Browser bindings for the interactive demo page in `www/`.
//!
//! Every export returns a JSON string; errors surface as JS exceptions.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use etvbf::harness::{run_sweep, run_trial, ExperimentConfig, FilterId, Sweep, SweepParam};
use etvbf::trigger::{trigger_probability, TriggerConfig};
use etvbf::Vector;

#[derive(Serialize)]
struct TrialView {
    filter: String,
    truth: Vec<[f64; 2]>,
    estimate: Vec<[f64; 2]>,
    gamma: Vec<u8>,
    iterations: Vec<usize>,
    position_error: Vec<f64>,
    rmse: f64,
    comm_rate: f64,
    failure: Option<String>,
}

#[derive(Serialize)]
struct CurvePoint {
    e: f64,
    silent: f64,
}

#[derive(Serialize)]
struct RowView {
    y: f64,
    filter: String,
    rmse: f64,
    comm_rate: f64,
    mean_iterations: f64,
    failures: usize,
}

fn demo_config(seed: u64, steps: usize, y: f64, r: f64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig {
        base_seed: seed,
        n_step: steps,
        ..ExperimentConfig::default()
    };
    cfg.filter.y = y;
    cfg.filter.r = r;
    cfg
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data serializes")
}

/// One closed-loop trial; position tracks, transmissions and per-step error.
pub fn trial_json(filter: &str, y: f64, r: f64, seed: u64, steps: usize) -> etvbf::Result<String> {
    let id: FilterId = filter.parse()?;
    let cfg = demo_config(seed, steps, y, r);
    cfg.validate()?;
    let rec = run_trial(&cfg, id, 0)?;
    let pos = |v: &Vector| [v[0], v[1]];
    let mut sq = 0.0;
    let position_error = rec
        .truth
        .iter()
        .zip(&rec.estimates)
        .map(|(x, xh)| {
            sq += (xh - x).norm_squared();
            ((xh[0] - x[0]).powi(2) + (xh[1] - x[1]).powi(2)).sqrt()
        })
        .collect();
    let n = rec.estimates.len().max(1) as f64;
    let sent: usize = rec.gamma.iter().map(|&g| g as usize).sum();
    Ok(to_json(&TrialView {
        filter: id.to_string(),
        truth: rec.truth.iter().map(pos).collect(),
        estimate: rec.estimates.iter().map(pos).collect(),
        position_error,
        rmse: (sq / (4.0 * n)).sqrt(),
        comm_rate: sent as f64 / n,
        gamma: rec.gamma,
        iterations: rec.iterations,
        failure: rec
            .failure
            .map(|f| format!("step {}: {}", f.step, f.message)),
    }))
}

/// Probability that the sensor stays silent for an innovation of norm `e`
/// along the first axis, sampled at `points` values in [0, max_e].
pub fn trigger_curve_json(y: f64, max_e: f64, points: usize) -> etvbf::Result<String> {
    let cfg = TriggerConfig::isotropic(y, 2)?;
    let points = points.max(2);
    let curve = (0..points)
        .map(|i| {
            let e = max_e * i as f64 / (points - 1) as f64;
            let silent = trigger_probability(&Vector::from_vec(vec![e, 0.0]), &cfg)?;
            Ok(CurvePoint { e, silent })
        })
        .collect::<etvbf::Result<Vec<_>>>()?;
    Ok(to_json(&curve))
}

/// Small Monte Carlo sweep over y for the event-triggered filters and VBF.
pub fn y_sweep_json(
    grid: &[f64],
    r: f64,
    n_mc: usize,
    steps: usize,
    seed: u64,
) -> etvbf::Result<String> {
    let mut cfg = demo_config(seed, steps, grid.first().copied().unwrap_or(0.015), r);
    cfg.n_mc = n_mc;
    cfg.filters = vec![FilterId::Etvbf, FilterId::Vbf, FilterId::ClsetKf];
    cfg.sweep = Some(Sweep {
        param: SweepParam::Y,
        grid: grid.to_vec(),
    });
    let rows: Vec<RowView> = run_sweep(&cfg)?
        .into_iter()
        .map(|r| RowView {
            y: r.sweep_value,
            filter: r.filter.to_string(),
            rmse: r.rmse,
            comm_rate: r.comm_rate,
            mean_iterations: r.mean_iterations,
            failures: r.failures,
        })
        .collect();
    Ok(to_json(&rows))
}

fn js_err(e: etvbf::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

#[wasm_bindgen(js_name = simulateTrial)]
pub fn simulate_trial(
    filter: &str,
    y: f64,
    r: f64,
    seed: u32,
    steps: u32,
) -> Result<String, JsValue> {
    trial_json(filter, y, r, seed as u64, steps as usize).map_err(js_err)
}

#[wasm_bindgen(js_name = triggerCurve)]
pub fn trigger_curve(y: f64, max_e: f64, points: u32) -> Result<String, JsValue> {
    trigger_curve_json(y, max_e, points as usize).map_err(js_err)
}

#[wasm_bindgen(js_name = ySweep)]
pub fn y_sweep(grid: &[f64], r: f64, n_mc: u32, steps: u32, seed: u32) -> Result<String, JsValue> {
    y_sweep_json(grid, r, n_mc as usize, steps as usize, seed as u64).map_err(js_err)
}
