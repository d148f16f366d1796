//! Model parameters and the momentum-resolved Bogoliubov–de Gennes
//! Hamiltonian of the driven chain
//! `H(t) = -g(t) Σ σˣ_i - J Σ σᶻ_i σᶻ_{i+1}`, `g(t) = g0 + g1 cos Ωt`.

use std::f64::consts::PI;

use crate::error::{domain, Result};

/// Physical parameters and the resonance order `m` under study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    j: f64,
    g0: f64,
    g1: f64,
    omega: f64,
    m: u32,
}

impl ModelParams {
    pub fn new(j: f64, g0: f64, g1: f64, omega: f64, m: u32) -> Result<Self> {
        for (name, v) in [("J", j), ("g0", g0), ("g1", g1), ("omega", omega)] {
            if !v.is_finite() {
                return Err(domain("ModelParams", format!("{name} = {v} is not finite")));
            }
        }
        if j <= 0.0 {
            return Err(domain("ModelParams", format!("J = {j} must be positive")));
        }
        if omega <= 0.0 {
            return Err(domain("ModelParams", format!("omega = {omega} must be positive")));
        }
        if g1 < 0.0 {
            return Err(domain("ModelParams", format!("g1 = {g1} must be non-negative")));
        }
        Ok(Self { j, g0, g1, omega, m })
    }

    /// Parameters given as ratios `J/Ω`, `g0/Ω`, `g1/Ω` with `Ω = 1`.
    pub fn in_drive_units(j: f64, g0: f64, g1: f64, m: u32) -> Result<Self> {
        Self::new(j, g0, g1, 1.0, m)
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn g0(&self) -> f64 {
        self.g0
    }

    pub fn g1(&self) -> f64 {
        self.g1
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Drive period `T = 2π/Ω`.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    /// Detuning from the `m`-photon resonance, `g0 - mΩ/4`.
    pub fn detuning(&self) -> f64 {
        self.g0 - f64::from(self.m) * self.omega / 4.0
    }

    /// Argument `4 g1 / Ω` of the Bessel factor.
    pub fn bessel_argument(&self) -> f64 {
        4.0 * self.g1 / self.omega
    }

    /// `(-1)^m`
    pub fn parity_sign(&self) -> f64 {
        if self.m.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    pub fn with_g0(self, g0: f64) -> Result<Self> {
        Self::new(self.j, g0, self.g1, self.omega, self.m)
    }

    pub fn with_g1(self, g1: f64) -> Result<Self> {
        Self::new(self.j, self.g0, g1, self.omega, self.m)
    }

    pub fn with_m(self, m: u32) -> Self {
        Self { m, ..self }
    }
}

/// Real symmetric 2×2 Nambu-space Hamiltonian of one momentum mode, acting
/// on `(u, v)` amplitudes of `|1_{-k} 1_k⟩` and `|0_{-k} 0_k⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BdgMatrix {
    pub h11: f64,
    pub h12: f64,
    pub h21: f64,
    pub h22: f64,
}

impl BdgMatrix {
    pub fn is_hermitian(&self) -> bool {
        self.h12 == self.h21
    }

    pub fn trace(&self) -> f64 {
        self.h11 + self.h22
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let mean = 0.5 * (self.h11 + self.h22);
        let half_diff = 0.5 * (self.h11 - self.h22);
        let r = half_diff.hypot(self.h12);
        [mean - r, mean + r]
    }
}

/// `ω_k = 2J cos k`
pub fn kinetic(params: &ModelParams, k: f64) -> f64 {
    2.0 * params.j * k.cos()
}

/// `Δ_k = 2J sin k`
pub fn pairing(params: &ModelParams, k: f64) -> f64 {
    2.0 * params.j * k.sin()
}

/// `g(t) = g0 + g1 cos Ωt`
pub fn transverse_field(params: &ModelParams, t: f64) -> f64 {
    params.g0 + params.g1 * (params.omega * t).cos()
}

/// `H_k(t) = [[μ(t) - 2ω_k, Δ_k], [Δ_k, -μ(t)]]` with `μ(t) = 2g(t)`.
pub fn bdg_hamiltonian(params: &ModelParams, k: f64, t: f64) -> Result<BdgMatrix> {
    if !(k > 0.0 && k <= PI) {
        return Err(domain("bdg_hamiltonian", format!("k = {k} outside (0, π]")));
    }
    Ok(bdg_unchecked(params, k, t))
}

pub(crate) fn bdg_unchecked(params: &ModelParams, k: f64, t: f64) -> BdgMatrix {
    let mu = 2.0 * transverse_field(params, t);
    let delta = pairing(params, k);
    BdgMatrix {
        h11: mu - 2.0 * kinetic(params, k),
        h12: delta,
        h21: delta,
        h22: -mu,
    }
}

/// Single-particle energy of the undriven chain,
/// `ε_k = 2 sqrt((g0 - J cos k)² + (J sin k)²)`.
pub fn excitation_energy(params: &ModelParams, k: f64) -> f64 {
    let a = params.g0 - params.j * k.cos();
    let b = params.j * k.sin();
    2.0 * a.hypot(b)
}

/// Static spectrum `(-ω_k + ε_k, -ω_k - ε_k)` of `H_k` at `g1 = 0`.
pub fn static_levels(params: &ModelParams, k: f64) -> (f64, f64) {
    let w = kinetic(params, k);
    let e = excitation_energy(params, k);
    (-w + e, -w - e)
}

/// Maps an energy into the quasienergy zone `[-Ω/2, Ω/2)`.
pub fn fold_quasienergy(x: f64, omega: f64) -> f64 {
    let half = 0.5 * omega;
    let mut r = x - omega * ((x + half) / omega).floor();
    if r >= half {
        r -= omega;
    } else if r < -half {
        r += omega;
    }
    r
}

/// Momentum `k0 ∈ [0, π]` where the gap `2ε_k` matches `mΩ`, or `None` when
/// the undriven band never reaches that energy.
pub fn resonance_wavevector(params: &ModelParams) -> Result<Option<f64>> {
    if params.g0 == 0.0 {
        return Err(domain("resonance_wavevector", "g0 = 0"));
    }
    let quarter = f64::from(params.m) * params.omega / 4.0;
    let arg = (params.g0 * params.g0 + params.j * params.j - quarter * quarter)
        / (2.0 * params.g0 * params.j);
    if !(-1.0..=1.0).contains(&arg) {
        return Ok(None);
    }
    Ok(Some(arg.acos()))
}

/// Positive momenta `{π/N, 3π/N, …, (N-1)π/N}` of the even-parity sector with
/// antiperiodic fermion boundary conditions.
pub fn even_subspace_grid(n_spins: usize) -> Result<Vec<f64>> {
    if n_spins == 0 || n_spins % 2 == 1 {
        return Err(domain(
            "even_subspace_grid",
            format!("N = {n_spins} must be even and positive"),
        ));
    }
    let n = n_spins as f64;
    Ok((0..n_spins / 2)
        .map(|i| (2 * i + 1) as f64 * PI / n)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig_params(g0: f64, g1: f64) -> ModelParams {
        ModelParams::in_drive_units(0.01, g0, g1, 2).unwrap()
    }

    #[test]
    fn rejects_invalid_params() {
        assert!(ModelParams::new(0.0, 0.5, 1.0, 1.0, 2).is_err());
        assert!(ModelParams::new(0.01, 0.5, 1.0, 0.0, 2).is_err());
        assert!(ModelParams::new(0.01, f64::NAN, 1.0, 1.0, 2).is_err());
        assert!(ModelParams::new(0.01, 0.5, -1.0, 1.0, 2).is_err());
        assert!(ModelParams::new(0.01, 0.5, 1.0, 1.0, 0).is_ok());
        let p = fig_params(0.505, 1.0);
        assert!((p.period() - 2.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn field_examples() {
        let p = fig_params(0.505, 1.0);
        assert!((transverse_field(&p, 0.0) - 1.505).abs() < 1e-15);
        assert!((transverse_field(&p, p.period() / 4.0) - 0.505).abs() < 1e-15);
        assert!((transverse_field(&p, p.period() / 2.0) + 0.495).abs() < 1e-15);
    }

    #[test]
    fn bdg_examples() {
        let p = fig_params(0.505, 0.0);
        let h = bdg_hamiltonian(&p, PI / 2.0, 0.0).unwrap();
        assert!((h.h11 - 1.01).abs() < 1e-15);
        assert!((h.h12 - 0.02).abs() < 1e-15);
        assert!((h.h21 - 0.02).abs() < 1e-15);
        assert!((h.h22 + 1.01).abs() < 1e-15);
        assert!(h.is_hermitian());

        let driven = fig_params(0.505, 1.0);
        let edge = bdg_hamiltonian(&driven, PI, 0.7).unwrap();
        // sin π is not exactly zero in floating point
        assert!(edge.h12.abs() < 1e-17);
        for t in [0.0, 0.3, 1.9, 5.0] {
            let h = bdg_hamiltonian(&driven, 1.1, t).unwrap();
            assert!((h.trace() + 2.0 * kinetic(&driven, 1.1)).abs() < 1e-14);
        }
        assert!(bdg_hamiltonian(&p, 0.0, 0.0).is_err());
        assert!(bdg_hamiltonian(&p, 3.2, 0.0).is_err());
    }

    #[test]
    fn excitation_energy_examples() {
        let critical = ModelParams::in_drive_units(0.3, 0.3, 0.0, 2).unwrap();
        assert_eq!(excitation_energy(&critical, 0.0), 0.0);
        for g0 in [-0.7, 0.1, 0.505, 2.0] {
            let p = ModelParams::in_drive_units(0.3, g0, 0.0, 2).unwrap();
            assert!((excitation_energy(&p, 0.0) - 2.0 * (g0 - 0.3f64).abs()).abs() < 1e-15);
        }
        let p = fig_params(0.505, 0.0);
        assert!((excitation_energy(&p, PI / 2.0) - 1.010_198_000_3).abs() < 1e-9);
    }

    #[test]
    fn resonance_examples() {
        let p = fig_params(0.505, 0.0);
        let k0 = resonance_wavevector(&p).unwrap().unwrap();
        let expected = ((0.505f64.powi(2) + 1e-4 - 0.25) / (2.0 * 0.505 * 0.01)).acos();
        assert!((k0 - expected).abs() < 1e-14);
        assert!((2.0 * excitation_energy(&p, k0) - 2.0).abs() <= 1e-10 * 2.0);

        assert_eq!(resonance_wavevector(&p.with_m(7)).unwrap(), None);
        let no_field = ModelParams::in_drive_units(0.01, 0.0, 0.0, 2).unwrap();
        assert!(resonance_wavevector(&no_field).is_err());
    }

    #[test]
    fn momentum_grid() {
        let g = even_subspace_grid(4).unwrap();
        assert_eq!(g.len(), 2);
        assert!((g[0] - PI / 4.0).abs() < 1e-15 && (g[1] - 3.0 * PI / 4.0).abs() < 1e-15);
        assert_eq!(even_subspace_grid(2).unwrap(), vec![PI / 2.0]);
        let g = even_subspace_grid(100).unwrap();
        assert_eq!(g.len(), 50);
        assert!((g[49] - 99.0 * PI / 100.0).abs() < 1e-15);
        assert!(even_subspace_grid(5).is_err());
        assert!(even_subspace_grid(0).is_err());
    }

    #[test]
    fn folding() {
        assert_eq!(fold_quasienergy(0.5, 1.0), -0.5);
        assert_eq!(fold_quasienergy(-0.5, 1.0), -0.5);
        assert!((fold_quasienergy(2.3, 1.0) - 0.3).abs() < 1e-15);
        assert!((fold_quasienergy(-1.7, 1.0) - 0.3).abs() < 1e-15);
        for x in [-7.25, -0.49, 0.0, 0.49, 13.1] {
            let f = fold_quasienergy(x, 1.0);
            assert!((-0.5..0.5).contains(&f));
            assert_eq!(fold_quasienergy(f, 1.0), f);
        }
    }
}
