//! Rotating-wave effective theory around the `m`-photon resonance.
//!
//! In the frame rotating with `α_m(t) = mΩt/4 + (g1/Ω) sin Ωt` the chain is,
//! after dropping oscillating terms, an XY chain in a transverse field
//! `δ = g0 - mΩ/4` with anisotropies
//! `J_{z,y} = (J/2)[1 ± (-1)^m J_m(4g1/Ω)]`. Everything in this module is
//! closed form.

use std::fmt;

use num_complex::Complex64;

use crate::dynamics::NambuSpinor;
use crate::error::{domain, Result};
use crate::model::{fold_quasienergy, kinetic, pairing, BdgMatrix, ModelParams};
use crate::specfun::bessel_j;

/// Default tolerance (in units of `J`) for detecting critical lines.
pub const DEFAULT_PHASE_TOL: f64 = 1e-6;
/// Default bound on `max(|δ|, J|J_m|)/Ω` for the effective theory to apply.
pub const DEFAULT_VALIDITY_THRESHOLD: f64 = 0.1;

/// Effective couplings of the rotating-frame XY chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveCouplings {
    pub jz: f64,
    pub jy: f64,
    pub detuning: f64,
    /// `J_m(4 g1 / Ω)`
    pub bessel_factor: f64,
}

/// Branch of the Floquet spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// Nonequilibrium phase of the effective Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseLabel {
    Paramagnetic,
    FerroZ,
    FerroY,
    IsingCritical,
    AnisotropicCritical,
    OutsideRwaValidity,
}

impl PhaseLabel {
    pub const ALL: [PhaseLabel; 6] = [
        PhaseLabel::Paramagnetic,
        PhaseLabel::FerroZ,
        PhaseLabel::FerroY,
        PhaseLabel::IsingCritical,
        PhaseLabel::AnisotropicCritical,
        PhaseLabel::OutsideRwaValidity,
    ];

    /// Stable integer code used in numeric tables.
    pub fn code(self) -> u8 {
        match self {
            PhaseLabel::Paramagnetic => 0,
            PhaseLabel::FerroZ => 1,
            PhaseLabel::FerroY => 2,
            PhaseLabel::IsingCritical => 3,
            PhaseLabel::AnisotropicCritical => 4,
            PhaseLabel::OutsideRwaValidity => 5,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|l| l.code() == code)
    }

    pub fn name(self) -> &'static str {
        match self {
            PhaseLabel::Paramagnetic => "paramagnetic",
            PhaseLabel::FerroZ => "ferro-z",
            PhaseLabel::FerroY => "ferro-y",
            PhaseLabel::IsingCritical => "ising-critical",
            PhaseLabel::AnisotropicCritical => "anisotropic-critical",
            PhaseLabel::OutsideRwaValidity => "outside-rwa-validity",
        }
    }
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Bogoliubov angle and quasienergy of one Floquet mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloquetModeParams {
    pub phi: f64,
    pub branch: Branch,
    /// Folded quasienergy of the branch.
    pub quasienergy: f64,
}

/// Result of the validity check of the effective theory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RwaValidity {
    pub ratio: f64,
    pub valid: bool,
}

/// Parameters together with the precomputed Bessel factor; the per-momentum
/// quantities of the effective theory hang off this.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveTheory {
    params: ModelParams,
    bessel: f64,
}

impl EffectiveTheory {
    pub fn new(params: &ModelParams) -> Result<Self> {
        Ok(Self {
            params: *params,
            bessel: bessel_j(params.m(), params.bessel_argument())?,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// `J_m(4 g1 / Ω)`
    pub fn bessel_factor(&self) -> f64 {
        self.bessel
    }

    /// `(-1)^m J_m(4 g1 / Ω)`, the anisotropy `γ` of the effective XY chain.
    pub fn anisotropy(&self) -> f64 {
        self.params.parity_sign() * self.bessel
    }

    pub fn couplings(&self) -> EffectiveCouplings {
        let j = self.params.j();
        let gamma = self.anisotropy();
        EffectiveCouplings {
            jz: 0.5 * j * (1.0 + gamma),
            jy: 0.5 * j * (1.0 - gamma),
            detuning: self.params.detuning(),
            bessel_factor: self.bessel,
        }
    }

    /// Nambu matrix of the effective Hamiltonian at momentum `k`.
    pub fn bdg(&self, k: f64) -> BdgMatrix {
        let d = self.params.detuning();
        let off = self.anisotropy() * pairing(&self.params, k);
        BdgMatrix {
            h11: 2.0 * d - 2.0 * kinetic(&self.params, k),
            h12: off,
            h21: off,
            h22: -2.0 * d,
        }
    }

    /// `ε_{k,m} = 2 sqrt((δ - J cos k)² + (J J_m sin k)²)`
    pub fn dispersion(&self, k: f64) -> f64 {
        let j = self.params.j();
        let a = self.params.detuning() - j * k.cos();
        let b = j * self.bessel * k.sin();
        2.0 * a.hypot(b)
    }

    /// `-ω_k ± ε_{k,m} + mΩ/2` before folding.
    pub fn unfolded_branches(&self, k: f64) -> (f64, f64) {
        let shift = -kinetic(&self.params, k) + 0.5 * f64::from(self.params.m()) * self.params.omega();
        let e = self.dispersion(k);
        (shift + e, shift - e)
    }

    /// Quasienergies folded into `[-Ω/2, Ω/2)`.
    pub fn branches(&self, k: f64) -> (f64, f64) {
        let (p, m) = self.unfolded_branches(k);
        let w = self.params.omega();
        (fold_quasienergy(p, w), fold_quasienergy(m, w))
    }

    /// Bogoliubov angle with `tan 2φ = -(-1)^m Δ_k J_m / (2δ - ω_k)`,
    /// resolved by quadrant so that `(cos φ, -sin φ)` is the upper eigenvector.
    pub fn angle(&self, k: f64) -> f64 {
        // `+ 0.0` turns -0.0 into +0.0 so that φ stays in (-π/2, π/2]
        let num = -self.anisotropy() * pairing(&self.params, k) + 0.0;
        let den = 2.0 * self.params.detuning() - kinetic(&self.params, k);
        0.5 * num.atan2(den)
    }

    pub fn validity(&self, threshold: f64) -> RwaValidity {
        let p = &self.params;
        let ratio = p.detuning().abs().max(p.j() * self.bessel.abs()) / p.omega();
        RwaValidity {
            ratio,
            valid: ratio <= threshold,
        }
    }

    pub fn classify(&self, tol: f64, validity_threshold: f64) -> PhaseLabel {
        if !self.validity(validity_threshold).valid {
            return PhaseLabel::OutsideRwaValidity;
        }
        let j = self.params.j();
        let d = self.params.detuning().abs();
        if (d - j).abs() <= tol * j {
            PhaseLabel::IsingCritical
        } else if d > j {
            PhaseLabel::Paramagnetic
        } else if self.bessel.abs() <= tol {
            PhaseLabel::AnisotropicCritical
        } else if self.anisotropy() > 0.0 {
            PhaseLabel::FerroZ
        } else {
            PhaseLabel::FerroY
        }
    }

    /// Floquet mode of `branch` at time `t` in the laboratory frame.
    pub fn mode(&self, k: f64, branch: Branch, t: f64) -> NambuSpinor {
        let phi = self.angle(k);
        let p = &self.params;
        let m = f64::from(p.m());
        let alpha = 0.25 * m * p.omega() * t + p.g1() / p.omega() * (p.omega() * t).sin();
        let half_m = 0.5 * m * p.omega() * t;
        let upper = Complex64::from_polar(1.0, -(2.0 * alpha - half_m));
        let lower = Complex64::from_polar(1.0, 2.0 * alpha + half_m);
        let (c, s) = (phi.cos(), phi.sin());
        match branch {
            Branch::Plus => NambuSpinor::new(upper * c, -lower * s),
            Branch::Minus => NambuSpinor::new(upper * s, lower * c),
        }
    }

    pub fn mode_params(&self, k: f64, branch: Branch) -> FloquetModeParams {
        let (p, m) = self.branches(k);
        FloquetModeParams {
            phi: self.angle(k),
            branch,
            quasienergy: match branch {
                Branch::Plus => p,
                Branch::Minus => m,
            },
        }
    }
}

pub fn effective_couplings(params: &ModelParams) -> Result<EffectiveCouplings> {
    Ok(EffectiveTheory::new(params)?.couplings())
}

pub fn quasienergy_dispersion(params: &ModelParams, k: f64) -> Result<f64> {
    Ok(EffectiveTheory::new(params)?.dispersion(k))
}

pub fn quasienergy_branches(params: &ModelParams, k: f64) -> Result<(f64, f64)> {
    Ok(EffectiveTheory::new(params)?.branches(k))
}

pub fn bogoliubov_angle(params: &ModelParams, k: f64) -> Result<f64> {
    Ok(EffectiveTheory::new(params)?.angle(k))
}

pub fn classify_phase(params: &ModelParams, tol: f64) -> Result<PhaseLabel> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(domain("classify_phase", format!("tolerance {tol} must be positive")));
    }
    Ok(EffectiveTheory::new(params)?.classify(tol, DEFAULT_VALIDITY_THRESHOLD))
}

pub fn rwa_validity(params: &ModelParams) -> Result<RwaValidity> {
    Ok(EffectiveTheory::new(params)?.validity(DEFAULT_VALIDITY_THRESHOLD))
}

pub fn floquet_mode(params: &ModelParams, k: f64, branch: Branch, t: f64) -> Result<NambuSpinor> {
    Ok(EffectiveTheory::new(params)?.mode(k, branch, t))
}
