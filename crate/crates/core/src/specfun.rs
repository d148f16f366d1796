//! Special functions and small numerical primitives.
//!
//! Everything here is a pure function of its arguments. The Bessel functions
//! cover the integer orders needed for the Jacobi–Anger expansion of the
//! drive, the elliptic integral provides closed forms for the XY ground-state
//! energy, and [`KQuadratureGrid`] carries the momentum integrals over
//! `(0, π)`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{domain, Error, Result};

/// Largest Bessel order accepted by [`bessel_j`].
pub const MAX_BESSEL_ORDER: u32 = 64;
/// Largest `|z|` accepted by [`bessel_j`].
pub const MAX_BESSEL_ARG: f64 = 1e4;

const SERIES_LIMIT: f64 = 12.0;
const RESCALE_ABOVE: f64 = 1e250;

/// Bessel function of the first kind `J_order(z)` for integer order.
///
/// Uses the ascending power series for `|z| <= 12` and Miller's downward
/// recurrence, normalised with `J_0 + 2 Σ J_2k = 1`, beyond that.
pub fn bessel_j(order: u32, z: f64) -> Result<f64> {
    if order > MAX_BESSEL_ORDER {
        return Err(domain(
            "bessel_j",
            format!("order {order} exceeds {MAX_BESSEL_ORDER}"),
        ));
    }
    if !z.is_finite() {
        return Err(domain("bessel_j", format!("argument {z} is not finite")));
    }
    if z.abs() > MAX_BESSEL_ARG {
        return Err(domain(
            "bessel_j",
            format!("|z| = {} exceeds {MAX_BESSEL_ARG}", z.abs()),
        ));
    }

    let x = z.abs();
    let value = if x <= SERIES_LIMIT {
        bessel_series(order, x)
    } else {
        bessel_miller(order, x)
    };
    // J_n(-z) = (-1)^n J_n(z)
    Ok(if z < 0.0 && order % 2 == 1 {
        -value
    } else {
        value
    })
}

/// `J_l(z)` for any signed integer order, via `J_{-l} = (-1)^l J_l`.
pub fn bessel_j_signed(order: i32, z: f64) -> Result<f64> {
    let n = order.unsigned_abs();
    let v = bessel_j(n, z)?;
    Ok(if order < 0 && n % 2 == 1 { -v } else { v })
}

fn bessel_series(order: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for i in 1..=order {
        term *= half / f64::from(i);
    }
    if term == 0.0 {
        return 0.0;
    }
    let q = -half * half;
    let n = f64::from(order);
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (k + n));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && k > half {
            break;
        }
    }
    sum
}

fn bessel_miller(order: u32, x: f64) -> f64 {
    let n = order as usize;
    let reach = (n as f64).max(x);
    let mut start = (reach + 30.0 + 10.0 * reach.cbrt()) as usize;
    if start % 2 == 1 {
        start += 1;
    }

    let two_over_x = 2.0 / x;
    let mut above = 0.0; // j_{k+1}
    let mut current = 1e-300; // j_k
    let mut even_sum = 0.0;
    let mut wanted = 0.0;
    for k in (1..=start).rev() {
        let below = (k as f64) * two_over_x * current - above; // j_{k-1}
        above = current;
        current = below;
        if current.abs() > RESCALE_ABOVE {
            let s = 1.0 / RESCALE_ABOVE;
            current *= s;
            above *= s;
            even_sum *= s;
            wanted *= s;
        }
        let idx = k - 1;
        if idx == n {
            wanted = current;
        }
        if idx % 2 == 0 && idx > 0 {
            even_sum += current;
        }
    }
    let norm = current + 2.0 * even_sum;
    wanted / norm
}

/// Complete elliptic integral of the second kind in the parameter
/// convention, `E(m) = ∫_0^{π/2} sqrt(1 - m sin²θ) dθ`, via the
/// arithmetic–geometric mean.
pub fn elliptic_e(parameter: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&parameter) {
        return Err(domain(
            "elliptic_e",
            format!("parameter {parameter} outside [0, 1]"),
        ));
    }
    if parameter == 1.0 {
        return Ok(1.0);
    }
    if parameter == 0.0 {
        return Ok(FRAC_PI_2);
    }
    let mut a = 1.0;
    let mut b = (1.0 - parameter).sqrt();
    let c0 = parameter.sqrt();
    let mut weight = 0.5;
    let mut sum = weight * c0 * c0;
    for _ in 0..64 {
        let c = 0.5 * (a - b);
        let next_a = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next_a;
        weight *= 2.0;
        sum += weight * c * c;
        if c.abs() <= 1e-17 * a {
            break;
        }
    }
    let k = FRAC_PI_2 / a;
    Ok(k * (1.0 - sum))
}

/// How the nodes of a [`KQuadratureGrid`] were laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureScheme {
    UniformMidpoint,
    GaussLegendre,
}

/// Quadrature nodes and weights on `(0, π)`; the weights sum to `π`.
#[derive(Debug, Clone, PartialEq)]
pub struct KQuadratureGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    scheme: QuadratureScheme,
}

impl KQuadratureGrid {
    /// Midpoint rule with `n` equal cells.
    pub fn uniform_midpoint(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(domain("uniform_midpoint", "need at least one node"));
        }
        let w = PI / n as f64;
        let nodes = (0..n).map(|i| (i as f64 + 0.5) * w).collect();
        Ok(Self {
            nodes,
            weights: vec![w; n],
            scheme: QuadratureScheme::UniformMidpoint,
        })
    }

    /// `n`-point Gauss–Legendre rule mapped onto `(0, π)`.
    pub fn gauss_legendre(n: usize) -> Result<Self> {
        Self::gauss_legendre_panels(n, &[])
    }

    /// Composite Gauss–Legendre rule: `(0, π)` is cut at `breakpoints` and
    /// each panel carries its own `n`-point rule. Breakpoints outside
    /// `(0, π)` or closer than `1e-14` to a neighbour are dropped.
    pub fn gauss_legendre_panels(n: usize, breakpoints: &[f64]) -> Result<Self> {
        if n == 0 {
            return Err(domain("gauss_legendre", "need at least one node"));
        }
        let mut cuts: Vec<f64> = breakpoints
            .iter()
            .copied()
            .filter(|b| b.is_finite() && *b > 0.0 && *b < PI)
            .collect();
        cuts.push(0.0);
        cuts.push(PI);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|b, a| (*b - *a).abs() < 1e-14);
        if let Some(last) = cuts.last_mut() {
            *last = PI;
        }

        let (x, w) = gauss_legendre_reference(n);
        let mut nodes = Vec::with_capacity(n * (cuts.len() - 1));
        let mut weights = Vec::with_capacity(nodes.capacity());
        for pair in cuts.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(mid + half * xi);
                weights.push(half * wi);
            }
        }
        Ok(Self {
            nodes,
            weights,
            scheme: QuadratureScheme::GaussLegendre,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn scheme(&self) -> QuadratureScheme {
        self.scheme
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Iterator over `(node, weight)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Gauss–Legendre nodes (ascending) and weights on `[-1, 1]`.
fn gauss_legendre_reference(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, p_prev) = legendre_pair(n, z);
            dp = nf * (z * p - p_prev) / (z * z - 1.0);
            let step = p / dp;
            z -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (p, p_prev) = legendre_pair(n, z);
        dp = if p.is_finite() {
            nf * (z * p - p_prev) / (z * z - 1.0)
        } else {
            dp
        };
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        // i counts down from the largest root
        x[n - 1 - i] = z;
        x[i] = -z;
        w[n - 1 - i] = weight;
        w[i] = weight;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// `(P_n(z), P_{n-1}(z))` by the three-term recurrence.
fn legendre_pair(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

/// `Σ w_i f(k_i)` over the grid.
pub fn integrate_k<F>(f: F, grid: &KQuadratureGrid) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut acc = 0.0;
    for (k, w) in grid.iter() {
        let v = f(k);
        if !v.is_finite() {
            return Err(Error::NonFinite { at: k, value: v });
        }
        acc += w * v;
    }
    Ok(acc)
}

/// Fallible variant of [`integrate_k`] for integrands that can fail.
pub fn try_integrate_k<F>(f: F, grid: &KQuadratureGrid) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut acc = 0.0;
    for (k, w) in grid.iter() {
        let v = f(k)?;
        if !v.is_finite() {
            return Err(Error::NonFinite { at: k, value: v });
        }
        acc += w * v;
    }
    Ok(acc)
}

/// Central three-point second difference `(f(x+h) - 2f(x) + f(x-h)) / h²`.
pub fn second_derivative<F>(mut f: F, x: f64, h: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(domain("second_derivative", format!("step {h} must be positive")));
    }
    let mut eval = |at: f64| -> Result<f64> {
        let v = f(at)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { at, value: v })
        }
    };
    let plus = eval(x + h)?;
    let centre = eval(x)?;
    let minus = eval(x - h)?;
    Ok((plus - 2.0 * centre + minus) / (h * h))
}
