//! Scenario execution: each run produces one [`ResultTable`] and a summary.

use std::f64::consts::PI;

use driven_ising::dynamics::monodromy_spectrum;
use driven_ising::model::{fold_quasienergy, static_levels};
use driven_ising::observables::{
    magnetization_finite, magnetization_rwa_series, sweep_with_curvature, SweepQuantity,
    SweepRecord,
};
use driven_ising::rwa::{EffectiveTheory, PhaseLabel, DEFAULT_PHASE_TOL, DEFAULT_VALIDITY_THRESHOLD};
use driven_ising::specfun::KQuadratureGrid;
use driven_ising::ModelParams;
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::config::{RunConfig, Scenario};
use crate::table::{ResultTable, TableError};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Numerical(#[from] driven_ising::Error),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("{0}")]
    OutsideRwa(String),
}

/// Output of one scenario.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub table: ResultTable,
    pub summary: Map<String, Value>,
    pub warnings: Vec<String>,
}

pub fn run(config: &RunConfig) -> Result<Outcome, RunError> {
    let warnings = check_validity(config)?;
    let (table, mut summary) = match config.scenario {
        Scenario::Spectrum => spectrum(config)?,
        Scenario::PhaseDiagram => phase_diagram(config)?,
        Scenario::Dynamics => dynamics(config)?,
        Scenario::Floquet => floquet(config)?,
        Scenario::Averages => averages(config)?,
        Scenario::Sweep => sweep(config)?,
    };
    summary.insert("extrema".into(), Value::Object(table.extrema()));
    Ok(Outcome {
        table,
        summary,
        warnings,
    })
}

fn validity_problem(params: &ModelParams) -> Result<Option<String>, RunError> {
    let v = EffectiveTheory::new(params)?.validity(DEFAULT_VALIDITY_THRESHOLD);
    Ok((!v.valid).then(|| {
        format!(
            "rotating-wave approximation not reliable at g0/Omega = {}, g1/Omega = {}: \
             max(|delta|, J|J_m|)/Omega = {:.4} exceeds {DEFAULT_VALIDITY_THRESHOLD}",
            params.g0(),
            params.g1(),
            v.ratio
        )
    }))
}

fn check_validity(config: &RunConfig) -> Result<Vec<String>, RunError> {
    let mut problems = Vec::new();
    match config.scenario {
        // the diagram labels invalid points itself
        Scenario::PhaseDiagram => {}
        Scenario::Averages | Scenario::Sweep => {
            for x in sweep_points(config) {
                let p = apply_sweep(config, x)?;
                if let Some(msg) = validity_problem(&p)? {
                    problems.push(msg);
                    break;
                }
            }
        }
        _ => problems.extend(validity_problem(&config.params)?),
    }
    if config.strict_rwa {
        if let Some(first) = problems.into_iter().next() {
            return Err(RunError::OutsideRwa(first));
        }
        return Ok(Vec::new());
    }
    Ok(problems)
}

fn sweep_points(config: &RunConfig) -> impl Iterator<Item = f64> + '_ {
    let s = &config.sweep;
    let step = (s.max - s.min) / (s.points - 1) as f64;
    (0..s.points).map(move |i| s.min + step * i as f64)
}

fn apply_sweep(config: &RunConfig, x: f64) -> Result<ModelParams, RunError> {
    Ok(match config.sweep.variable {
        driven_ising::observables::SweepVariable::G0 => config.params.with_g0(x)?,
        driven_ising::observables::SweepVariable::G1 => config.params.with_g1(x)?,
    })
}

fn k_points(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    (0..n).map(|i| PI * i as f64 / (n - 1) as f64).collect()
}

fn spectrum(config: &RunConfig) -> Result<(ResultTable, Map<String, Value>), RunError> {
    let p = &config.params;
    let theory = EffectiveTheory::new(p)?;
    let mut table = ResultTable::new([
        "k",
        "eps_plus",
        "eps_minus",
        "folded_plus",
        "folded_minus",
        "rwa_plus",
        "rwa_minus",
    ]);
    for k in k_points(config.n_k_nodes) {
        let (hi, lo) = static_levels(p, k);
        let (rp, rm) = theory.branches(k);
        table.push_row(vec![
            k,
            hi,
            lo,
            fold_quasienergy(hi, p.omega()),
            fold_quasienergy(lo, p.omega()),
            rp,
            rm,
        ])?;
    }
    let mut summary = Map::new();
    if let Some(k0) = driven_ising::model::resonance_wavevector(p).ok().flatten() {
        summary.insert("resonance_k0".into(), json!(k0));
    }
    Ok((table, summary))
}

fn phase_diagram(config: &RunConfig) -> Result<(ResultTable, Map<String, Value>), RunError> {
    let n = config.phase_points;
    let centre = f64::from(config.params.m()) / 4.0;
    let g1s: Vec<f64> = (0..n).map(|i| 3.0 * i as f64 / (n - 1) as f64).collect();
    let g0s: Vec<f64> = (0..n)
        .map(|i| centre - 0.015 + 0.03 * i as f64 / (n - 1) as f64)
        .collect();
    let labels: Vec<Vec<PhaseLabel>> = g1s
        .par_iter()
        .map(|&g1| {
            g0s.iter()
                .map(|&g0| {
                    let p = config.params.with_g1(g1)?.with_g0(g0)?;
                    Ok(EffectiveTheory::new(&p)?
                        .classify(DEFAULT_PHASE_TOL, DEFAULT_VALIDITY_THRESHOLD))
                })
                .collect::<Result<Vec<_>, driven_ising::Error>>()
        })
        .collect::<Result<_, _>>()?;

    let mut table = ResultTable::new(["g1_over_omega", "g0_over_omega", "phase_label"]);
    let mut counts = [0usize; 6];
    for (g1, row) in g1s.iter().zip(&labels) {
        for (g0, label) in g0s.iter().zip(row) {
            counts[usize::from(label.code())] += 1;
            table.push_row(vec![*g1, *g0, f64::from(label.code())])?;
        }
    }
    for label in PhaseLabel::ALL {
        table.add_metadata(format!("phase_code.{}", label.code()), label.name());
    }
    let counts: Map<String, Value> = PhaseLabel::ALL
        .iter()
        .map(|l| (l.name().to_string(), json!(counts[usize::from(l.code())])))
        .collect();
    let mut summary = Map::new();
    summary.insert("phase_counts".into(), Value::Object(counts));
    Ok((table, summary))
}

fn dynamics(config: &RunConfig) -> Result<(ResultTable, Map<String, Value>), RunError> {
    let p = &config.params;
    let grid = KQuadratureGrid::gauss_legendre(config.n_k_nodes)?;
    let rwa = magnetization_rwa_series(p, config.t_max_periods, config.n_time_samples, &grid)?;
    let finite = config
        .n_spins
        .map(|n| magnetization_finite(p, n, config.t_max_periods, config.n_time_samples))
        .transpose()?;

    let mut columns = vec!["t_over_T".to_string(), "mx_rwa".to_string()];
    if let Some(f) = &finite {
        columns.push(f.label.clone());
    }
    let mut table = ResultTable::new(columns);
    for i in 0..rwa.times.len() {
        let mut row = vec![rwa.times[i], rwa.values[i]];
        if let Some(f) = &finite {
            row.push(f.values[i]);
        }
        table.push_row(row)?;
    }

    let mut summary = Map::new();
    let tail_from = 0.75 * config.t_max_periods;
    summary.insert("mean_mx_rwa_last_quarter".into(), json!(rwa.mean_after(tail_from)));
    if let Some(f) = &finite {
        summary.insert("rms_finite_vs_rwa".into(), json!(f.rms_difference(&rwa)?));
        summary.insert("mean_mx_finite_last_quarter".into(), json!(f.mean_after(tail_from)));
    }
    Ok((table, summary))
}

fn floquet(config: &RunConfig) -> Result<(ResultTable, Map<String, Value>), RunError> {
    let p = &config.params;
    let w = p.omega();
    let theory = EffectiveTheory::new(p)?;
    let ks = k_points(config.n_k_nodes);
    let exact = monodromy_spectrum(p, &ks)?;
    let dist = |a: f64, b: f64| {
        let d = (a - b).rem_euclid(w);
        d.min(w - d)
    };
    let mut table = ResultTable::new([
        "k",
        "quasienergy_monodromy_plus",
        "quasienergy_monodromy_minus",
        "quasienergy_rwa_plus",
        "quasienergy_rwa_minus",
        "abs_error",
    ]);
    let mut worst = 0.0f64;
    for (k, r) in ks.iter().zip(&exact) {
        let (a, b) = r.quasienergies;
        let (rp, rm) = theory.branches(*k);
        let straight = dist(a, rp).max(dist(b, rm));
        let crossed = dist(a, rm).max(dist(b, rp));
        let (mp, mm, err) = if straight <= crossed {
            (a, b, straight)
        } else {
            (b, a, crossed)
        };
        worst = worst.max(err);
        table.push_row(vec![*k, mp, mm, rp, rm, err])?;
    }
    let mut summary = Map::new();
    summary.insert("max_abs_error".into(), json!(worst));
    Ok((table, summary))
}

fn interior_rows(rec: &SweepRecord) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
    rec.points
        .iter()
        .zip(&rec.second_derivative)
        .filter_map(|(&(x, v), d)| d.map(|d| (x, v, d)))
}

fn run_sweep(config: &RunConfig, quantity: SweepQuantity) -> Result<SweepRecord, RunError> {
    let s = &config.sweep;
    Ok(sweep_with_curvature(
        &config.params,
        s.variable,
        (s.min, s.max),
        s.points,
        quantity,
        config.n_k_nodes,
    )?)
}

fn peaks_json(rec: &SweepRecord) -> Value {
    json!(rec.curvature_peaks(2))
}

fn averages(config: &RunConfig) -> Result<(ResultTable, Map<String, Value>), RunError> {
    let energy = run_sweep(config, SweepQuantity::AveragedEnergyMinus)?;
    let magnet = run_sweep(config, SweepQuantity::AveragedMagnetizationMinus)?;
    let mut table = ResultTable::new([
        config.sweep.variable.name().replace('/', "_over_").to_lowercase().as_str(),
        "energy_minus",
        "energy_minus_d2",
        "magnetization_minus",
        "magnetization_minus_d2",
    ]);
    for ((x, e, ed), (_, mv, md)) in interior_rows(&energy).zip(interior_rows(&magnet)) {
        table.push_row(vec![x, e, ed, mv, md])?;
    }
    let mut summary = Map::new();
    summary.insert("energy_curvature_peaks".into(), peaks_json(&energy));
    summary.insert("magnetization_curvature_peaks".into(), peaks_json(&magnet));
    Ok((table, summary))
}

fn sweep(config: &RunConfig) -> Result<(ResultTable, Map<String, Value>), RunError> {
    let rec = run_sweep(config, config.sweep.quantity)?;
    let mut table = ResultTable::new(["x", "value", "second_derivative"]);
    for (x, v, d) in interior_rows(&rec) {
        table.push_row(vec![x, v, d])?;
    }
    table.add_metadata("sweep_variable", &rec.sweep_variable);
    let mut summary = Map::new();
    summary.insert("curvature_peaks".into(), peaks_json(&rec));
    Ok((table, summary))
}
