//! Independent reference implementations used only by the test suites.
#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

/// `J_n(z) = (1/2π) ∫_0^{2π} cos(nτ - z sin τ) dτ` by the trapezoid rule,
/// which converges geometrically for this periodic integrand.
pub fn bessel_integral(n: i32, z: f64) -> f64 {
    let m = 2 * (n.unsigned_abs() as usize + z.abs().ceil() as usize) + 128;
    let h = 2.0 * PI / m as f64;
    let nf = f64::from(n);
    let sum: f64 = (0..m)
        .map(|j| {
            let tau = j as f64 * h;
            (nf * tau - z * tau.sin()).cos()
        })
        .sum();
    sum / m as f64
}

/// Root of `f` on `[a, b]` by bisection; `f(a)` and `f(b)` must differ in sign.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    assert!(fa * f(b) <= 0.0, "no sign change on [{a}, {b}]");
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
        if b - a < 1e-15 * mid.abs().max(1.0) {
            break;
        }
    }
    0.5 * (a + b)
}

/// Positive zeros of `J_n` located by scanning the integral oracle on a fine
/// grid and refining each sign change by bisection.
pub fn bessel_zeros(n: i32, count: usize) -> Vec<f64> {
    let mut zeros = Vec::new();
    let step = 0.01;
    let mut x = step;
    let mut prev = bessel_integral(n, x);
    while zeros.len() < count {
        let next = x + step;
        let cur = bessel_integral(n, next);
        if prev * cur < 0.0 {
            zeros.push(bisect(|z| bessel_integral(n, z), x, next));
        }
        prev = cur;
        x = next;
    }
    zeros
}

/// `E(m) = ∫_0^{π/2} sqrt(1 - m sin²θ) dθ` by the trapezoid rule; the
/// integrand is smooth, even and π-periodic so the rule is spectrally
/// accurate for `m < 1`.
pub fn elliptic_e_trapezoid(m: f64) -> f64 {
    let n = 200_000;
    let h = FRAC_PI_2 / n as f64;
    let f = |t: f64| (1.0 - m * t.sin().powi(2)).sqrt();
    let inner: f64 = (1..n).map(|j| f(j as f64 * h)).sum();
    h * (0.5 * f(0.0) + inner + 0.5 * f(FRAC_PI_2))
}

/// Eigen-decomposition of a 2×2 Hermitian matrix: ascending eigenvalues and
/// the matching unit eigenvectors.
pub fn eigh2(h: [[Complex64; 2]; 2]) -> ([f64; 2], [[Complex64; 2]; 2]) {
    let a = h[0][0].re;
    let d = h[1][1].re;
    let b = h[0][1];
    let mean = 0.5 * (a + d);
    let half_diff = 0.5 * (a - d);
    let r = (half_diff * half_diff + b.norm_sqr()).sqrt();
    let vals = [mean - r, mean + r];
    let vecs = vals.map(|lam| {
        // (a - lam) x + b y = 0
        let (x, y) = if (a - lam).abs() + b.norm() < 1e-300 {
            (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
        } else if b.norm() > 1e-300 {
            (b, Complex64::new(lam - a, 0.0))
        } else if (a - lam).abs() < (d - lam).abs() {
            (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
        } else {
            (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
        };
        let n = (x.norm_sqr() + y.norm_sqr()).sqrt();
        [x / n, y / n]
    });
    (vals, vecs)
}

/// `exp(-i H t) ψ` for a constant 2×2 Hermitian `H`, via eigen-decomposition.
pub fn propagate_static(
    h: [[Complex64; 2]; 2],
    t: f64,
    psi: [Complex64; 2],
) -> [Complex64; 2] {
    let (vals, vecs) = eigh2(h);
    let mut out = [Complex64::new(0.0, 0.0); 2];
    for (lam, v) in vals.iter().zip(vecs.iter()) {
        let overlap = v[0].conj() * psi[0] + v[1].conj() * psi[1];
        let phase = Complex64::from_polar(1.0, -lam * t);
        out[0] += phase * overlap * v[0];
        out[1] += phase * overlap * v[1];
    }
    out
}

/// Smallest periodic distance between two angles-like values modulo `period`.
pub fn periodic_distance(a: f64, b: f64, period: f64) -> f64 {
    let d = (a - b).rem_euclid(period);
    d.min(period - d)
}
