//! Physical observables built on the effective theory and on exact
//! finite-size evolution: transverse magnetization dynamics, its
//! periodic/transient decomposition, cycle-averaged energies and
//! magnetizations in Floquet states, and parameter sweeps with curvature.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::{evolve_mode, NambuSpinor};
use crate::error::{domain, Error, Result};
use crate::model::{even_subspace_grid, ModelParams};
use crate::rwa::{Branch, EffectiveTheory};
use crate::specfun::{elliptic_e, integrate_k, second_derivative, KQuadratureGrid};

/// Largest `|δ|/Ω` accepted as exact resonance by [`averaged_energy_resonant`].
pub const RESONANCE_TOL: f64 = 1e-12;

/// A real observable sampled on a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub label: String,
    /// Sample times in units of the drive period.
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub params: ModelParams,
}

impl TimeSeries {
    /// Root-mean-square difference to another series on the same grid.
    pub fn rms_difference(&self, other: &TimeSeries) -> Result<f64> {
        if self.values.len() != other.values.len() || self.values.is_empty() {
            return Err(Error::Precondition {
                op: "rms_difference",
                detail: format!(
                    "series lengths {} and {} differ or are empty",
                    self.values.len(),
                    other.values.len()
                ),
            });
        }
        let sum: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).powi(2))
            .sum();
        Ok((sum / self.values.len() as f64).sqrt())
    }

    /// Mean of the samples with time (in periods) at or after `from`.
    pub fn mean_after(&self, from: f64) -> Option<f64> {
        let tail: Vec<f64> = self
            .times
            .iter()
            .zip(&self.values)
            .filter(|(t, _)| **t >= from)
            .map(|(_, v)| *v)
            .collect();
        if tail.is_empty() {
            None
        } else {
            Some(tail.iter().sum::<f64>() / tail.len() as f64)
        }
    }
}

/// Which parameter a sweep varies (as a ratio over `Ω`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    G0,
    G1,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::G0 => "g0/Omega",
            SweepVariable::G1 => "g1/Omega",
        }
    }

    fn apply(self, template: &ModelParams, x: f64) -> Result<ModelParams> {
        let x = x * template.omega();
        match self {
            SweepVariable::G0 => template.with_g0(x),
            SweepVariable::G1 => template.with_g1(x),
        }
    }
}

/// Cycle-averaged quantity evaluated along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepQuantity {
    AveragedEnergyMinus,
    AveragedMagnetizationMinus,
}

/// A swept curve with its discrete curvature on interior points.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub sweep_variable: String,
    pub points: Vec<(f64, f64)>,
    /// Aligned with `points`; `None` at the two endpoints.
    pub second_derivative: Vec<Option<f64>>,
}

impl SweepRecord {
    /// Positions of the `count` largest local maxima of `|f''|`, largest first.
    pub fn curvature_peaks(&self, count: usize) -> Vec<f64> {
        let abs: Vec<Option<f64>> = self
            .second_derivative
            .iter()
            .map(|d| d.map(f64::abs))
            .collect();
        let mut peaks: Vec<(f64, f64)> = Vec::new();
        for i in 0..abs.len() {
            let Some(c) = abs[i] else { continue };
            let left = if i > 0 { abs[i - 1] } else { None };
            let right = abs.get(i + 1).copied().flatten();
            if left.is_none_or(|l| c >= l) && right.is_none_or(|r| c > r) {
                peaks.push((self.points[i].0, c));
            }
        }
        peaks.sort_by(|a, b| b.1.total_cmp(&a.1));
        peaks.into_iter().take(count).map(|(x, _)| x).collect()
    }
}

/// Composite Gauss–Legendre grid graded geometrically towards the momentum
/// where the quasienergy gap is smallest, so that nearly gapless spectra
/// are still integrated accurately. `base_nodes / 16` nodes per panel
/// (at least 8).
pub fn adapted_grid(params: &ModelParams, base_nodes: usize) -> Result<KQuadratureGrid> {
    let per_panel = (base_nodes / 16).max(8);
    let ratio = (params.detuning() / params.j()).clamp(-1.0, 1.0);
    let centre = ratio.acos();
    let mut cuts = Vec::with_capacity(64);
    let mut width = PI;
    for _ in 0..26 {
        width *= 0.5;
        cuts.push(centre - width);
        cuts.push(centre + width);
    }
    cuts.push(centre);
    KQuadratureGrid::gauss_legendre_panels(per_panel, &cuts)
}

/// `M_x(t) = 1 - 2 ∫_0^π (dk/π) sin²(ε_{k,m} t) sin²(2φ_{k,m})` for the
/// chain prepared fully polarised along `x`.
pub fn magnetization_rwa(params: &ModelParams, t: f64, grid: &KQuadratureGrid) -> Result<f64> {
    let theory = EffectiveTheory::new(params)?;
    magnetization_with(&theory, t, grid)
}

fn magnetization_with(theory: &EffectiveTheory, t: f64, grid: &KQuadratureGrid) -> Result<f64> {
    let integral = integrate_k(
        |k| {
            let s = (theory.dispersion(k) * t).sin();
            let a = (2.0 * theory.angle(k)).sin();
            s * s * a * a
        },
        grid,
    )?;
    Ok(1.0 - 2.0 * integral / PI)
}

/// [`magnetization_rwa`] sampled at `n_samples` times spanning
/// `[0, t_max_periods·T]`.
pub fn magnetization_rwa_series(
    params: &ModelParams,
    t_max_periods: f64,
    n_samples: usize,
    grid: &KQuadratureGrid,
) -> Result<TimeSeries> {
    let times = period_grid(t_max_periods, n_samples)?;
    let theory = EffectiveTheory::new(params)?;
    let period = params.period();
    let values = times
        .par_iter()
        .map(|&tp| magnetization_with(&theory, tp * period, grid))
        .collect::<Result<Vec<_>>>()?;
    Ok(TimeSeries {
        label: "mx_rwa".into(),
        times,
        values,
        params: *params,
    })
}

fn period_grid(t_max_periods: f64, n_samples: usize) -> Result<Vec<f64>> {
    if !(t_max_periods > 0.0 && t_max_periods.is_finite()) || n_samples < 2 {
        return Err(domain(
            "time grid",
            format!("need t_max > 0 and at least two samples (got {t_max_periods}, {n_samples})"),
        ));
    }
    Ok((0..n_samples)
        .map(|i| t_max_periods * i as f64 / (n_samples - 1) as f64)
        .collect())
}

/// Exact transverse magnetization of an `N`-site chain,
/// `M_x(t) = -(2/N) Σ_{k>0} Ψ_k† σᶻ Ψ_k`, each mode evolved from `(0, 1)`.
pub fn magnetization_finite(
    params: &ModelParams,
    n_spins: usize,
    t_max_periods: f64,
    n_samples: usize,
) -> Result<TimeSeries> {
    let ks = even_subspace_grid(n_spins)?;
    let times = period_grid(t_max_periods, n_samples)?;
    let t_end = t_max_periods * params.period();
    let per_mode: Vec<Vec<f64>> = ks
        .par_iter()
        .map(|&k| {
            evolve_mode(params, k, NambuSpinor::vacuum(), t_end, n_samples)
                .map(|tr| tr.states.iter().map(NambuSpinor::sigma_z).collect())
                .map_err(|e| Error::Mode {
                    k,
                    source: Box::new(e),
                })
        })
        .collect::<Result<_>>()?;
    let scale = -2.0 / n_spins as f64;
    let values = (0..n_samples)
        .map(|i| scale * per_mode.iter().map(|m| m[i]).sum::<f64>())
        .collect();
    Ok(TimeSeries {
        label: format!("mx_finite_{n_spins}"),
        times,
        values,
        params: *params,
    })
}

/// Periodic and transient parts of the rotating-wave magnetization,
/// assembled from the Floquet modes with `A₊ = -sin φ`, `A₋ = cos φ` and the
/// observable `O_k = -2σᶻ`.
pub fn periodic_transient_split(
    params: &ModelParams,
    t: f64,
    grid: &KQuadratureGrid,
) -> Result<(f64, f64)> {
    let theory = EffectiveTheory::new(params)?;
    let observable = |a: &NambuSpinor, b: &NambuSpinor| -> Complex64 {
        -2.0 * (a.u.conj() * b.u - a.v.conj() * b.v)
    };
    let periodic = integrate_k(
        |k| {
            let phi = theory.angle(k);
            let plus = theory.mode(k, Branch::Plus, t);
            let minus = theory.mode(k, Branch::Minus, t);
            let (ap, am) = (-phi.sin(), phi.cos());
            ap * ap * observable(&plus, &plus).re + am * am * observable(&minus, &minus).re
        },
        grid,
    )? / (2.0 * PI);
    let transient = integrate_k(
        |k| {
            let phi = theory.angle(k);
            let plus = theory.mode(k, Branch::Plus, t);
            let minus = theory.mode(k, Branch::Minus, t);
            let (ap, am) = (-phi.sin(), phi.cos());
            let phase = Complex64::from_polar(ap * am, -2.0 * theory.dispersion(k) * t);
            (phase * observable(&plus, &minus)).re
        },
        grid,
    )? / PI;
    Ok((periodic, transient))
}

/// Cycle-averaged energy in the Floquet state of `branch`,
/// `±∫_0^π (dk/2π) (ε_{k,m} + (mΩ/2) cos 2φ_{k,m})`.
pub fn averaged_energy(params: &ModelParams, branch: Branch, grid: &KQuadratureGrid) -> Result<f64> {
    let theory = EffectiveTheory::new(params)?;
    let half_m = 0.5 * f64::from(params.m()) * params.omega();
    let integral = integrate_k(
        |k| theory.dispersion(k) + half_m * (2.0 * theory.angle(k)).cos(),
        grid,
    )?;
    Ok(branch.sign() * integral / (2.0 * PI))
}

/// Closed form of [`averaged_energy`] on exact resonance,
/// `±(2J/π) E(1 - J_m(4g1/Ω)²)`, as `(plus, minus)`.
pub fn averaged_energy_resonant(params: &ModelParams) -> Result<(f64, f64)> {
    if params.detuning().abs() > RESONANCE_TOL * params.omega() {
        return Err(Error::Precondition {
            op: "averaged_energy_resonant",
            detail: format!("detuning {} is not zero", params.detuning()),
        });
    }
    let theory = EffectiveTheory::new(params)?;
    let b = theory.bessel_factor();
    let value = 2.0 * params.j() / PI * elliptic_e((1.0 - b * b).clamp(0.0, 1.0))?;
    Ok((value, -value))
}

/// Cycle-averaged transverse magnetization `∓∫_0^π (dk/π) cos 2φ_{k,m}`.
pub fn averaged_magnetization(
    params: &ModelParams,
    branch: Branch,
    grid: &KQuadratureGrid,
) -> Result<f64> {
    let theory = EffectiveTheory::new(params)?;
    let integral = integrate_k(|k| (2.0 * theory.angle(k)).cos(), grid)?;
    Ok(-branch.sign() * integral / PI)
}

/// `∫_0^π (dk/2π) ε^{(±)}_{k,m}` with the unfolded quasienergies.
pub fn averaged_quasienergy(
    params: &ModelParams,
    branch: Branch,
    grid: &KQuadratureGrid,
) -> Result<f64> {
    let theory = EffectiveTheory::new(params)?;
    let integral = integrate_k(
        |k| {
            let (p, m) = theory.unfolded_branches(k);
            match branch {
                Branch::Plus => p,
                Branch::Minus => m,
            }
        },
        grid,
    )?;
    Ok(integral / (2.0 * PI))
}

/// Ground-state energy per site of the XY chain without transverse field,
/// `-(2J/π) E(1 - γ²)`.
pub fn xy_ground_energy(j: f64, gamma: f64) -> Result<f64> {
    if !(j > 0.0 && j.is_finite()) {
        return Err(domain("xy_ground_energy", format!("J = {j} must be positive")));
    }
    if gamma.is_nan() || gamma.abs() > 1.0 {
        return Err(domain("xy_ground_energy", format!("|gamma| = {} > 1", gamma.abs())));
    }
    Ok(-2.0 * j / PI * elliptic_e(1.0 - gamma * gamma)?)
}

/// Evaluates `quantity` at one parameter point on a grid adapted to it.
pub fn evaluate_quantity(params: &ModelParams, quantity: SweepQuantity, base_nodes: usize) -> Result<f64> {
    let grid = adapted_grid(params, base_nodes)?;
    match quantity {
        SweepQuantity::AveragedEnergyMinus => averaged_energy(params, Branch::Minus, &grid),
        SweepQuantity::AveragedMagnetizationMinus => {
            averaged_magnetization(params, Branch::Minus, &grid)
        }
    }
}

/// Sweeps `variable` (in units of `Ω`) over `n_points` equally spaced values
/// in `range` and attaches the three-point curvature on interior points,
/// using the sweep spacing as the difference step.
pub fn sweep_with_curvature(
    template: &ModelParams,
    variable: SweepVariable,
    range: (f64, f64),
    n_points: usize,
    quantity: SweepQuantity,
    base_nodes: usize,
) -> Result<SweepRecord> {
    let (lo, hi) = range;
    if n_points < 5 {
        return Err(domain("sweep", format!("need at least 5 points, got {n_points}")));
    }
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(domain("sweep", format!("range [{lo}, {hi}] is empty")));
    }
    let step = (hi - lo) / (n_points - 1) as f64;
    let xs: Vec<f64> = (0..n_points).map(|i| lo + step * i as f64).collect();
    let eval = |x: f64| -> Result<f64> {
        let p = variable.apply(template, x)?;
        evaluate_quantity(&p, quantity, base_nodes).map_err(|e| Error::Domain {
            op: "sweep",
            detail: format!("{} = {x}: {e}", variable.name()),
        })
    };
    let values = xs.par_iter().map(|&x| eval(x)).collect::<Result<Vec<_>>>()?;
    let second = xs
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            if i == 0 || i + 1 == n_points {
                Ok(None)
            } else {
                second_derivative(eval, x, step).map(Some)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepRecord {
        sweep_variable: variable.name().into(),
        points: xs.into_iter().zip(values).collect(),
        second_derivative: second,
    })
}
