//! Stable directions and contraction/expansion rates along orbits.

use crate::error::{HenonError, Result};
use crate::linalg::{canonical_phase, line_sin, Mat2C, Point2C, Vec2C};
use crate::map::{in_escape_region, Direction, HenonMap};
use serde::{Deserialize, Serialize};

pub const STABILIZATION_TOL: f64 = 1e-6;
const CAUCHY_LAG: usize = 5;

/// Renormalised products D f^k(z) along `orbit`, with log scales.
fn products(map: &HenonMap, orbit: &[Point2C]) -> Vec<(Mat2C, f64)> {
    let mut out = Vec::with_capacity(orbit.len());
    let mut d = Mat2C::identity();
    let mut log_scale = 0.0;
    out.push((d, log_scale));
    for w in &orbit[..orbit.len() - 1] {
        d = map.differential(*w) * d;
        let s = d.max_abs();
        if s > 0.0 && s.is_finite() {
            d = d.scale(1.0 / s);
            log_scale += s.ln();
        }
        out.push((d, log_scale));
    }
    out
}

fn check_orbit(map: &HenonMap, z: Point2C, steps: usize, radius: f64) -> Result<Vec<Point2C>> {
    if !z.is_finite() {
        return Err(HenonError::Domain(format!("{z:?}")));
    }
    let orbit = map.shadow_orbit(z, steps);
    if let Some(k) = orbit.iter().position(|w| in_escape_region(w, radius, Direction::Forward)) {
        return Err(HenonError::OrbitEscaped { steps: k });
    }
    Ok(orbit)
}

/// Most contracted right singular direction of D f^n(z), accepted when it
/// agrees with the n + 5 step estimate to [`STABILIZATION_TOL`] in angle.
///
/// The orbit must avoid V⁺ for n steps; the extra steps of the Cauchy test
/// only need to stay finite.
pub fn estimate_stable_direction(map: &HenonMap, z: Point2C, n: usize, radius: f64) -> Result<Vec2C> {
    if n == 0 {
        return Err(HenonError::InvalidArgument("direction depth must be ≥ 1".into()));
    }
    check_orbit(map, z, n, radius)?;
    let prods = products(map, &map.shadow_orbit(z, n + CAUCHY_LAG));
    let dir = |k: usize| canonical_phase(prods[k].0.top_right_singular().perp());
    let a = dir(n);
    let b = dir(n + CAUCHY_LAG);
    if !(a.is_finite() && b.is_finite()) {
        return Err(HenonError::NoConvergence("differential product overflowed".into()));
    }
    let angle = line_sin(&a, &b);
    if !(angle < STABILIZATION_TOL) {
        return Err(HenonError::NoConvergence(format!(
            "stable direction moved by {angle:.3e} between depths {n} and {}",
            n + CAUCHY_LAG
        )));
    }
    Ok(a)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub n: usize,
    /// ‖Dfⁿ v‖ for the unit stable direction v at the base point.
    pub stable_norm: f64,
    /// Largest singular value of Dfⁿ.
    pub central_norm: f64,
    /// Smallest singular value, computed as 1/σ_max of the inverse product.
    pub sigma_min: f64,
    /// |σ_max·σ_min/|Jac|ⁿ − 1|.
    pub det_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub base: Point2C,
    pub rows: Vec<RateRow>,
    /// Least-squares slope of log‖Dfⁿ|E^c‖ against n, exponentiated.
    pub central_rate: f64,
    pub stable_rate: f64,
    /// Smallest C with ‖Dfⁿ|E^s‖ ≤ C·stable_rateⁿ for all reported n.
    pub stable_constant: f64,
    pub jacobian_abs: f64,
}

fn fit_rate(ns: &[f64], logs: &[f64]) -> f64 {
    let n = ns.len() as f64;
    let mx = ns.iter().sum::<f64>() / n;
    let my = logs.iter().sum::<f64>() / n;
    let sxy: f64 = ns.iter().zip(logs).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = ns.iter().map(|x| (x - mx) * (x - mx)).sum();
    (sxy / sxx).exp()
}

/// Steps of look-ahead used for the stable direction at each orbit point.
const LOOKAHEAD: usize = 30;

/// Most contracted direction of the longest finite product along `orbit`.
fn contracted_direction(map: &HenonMap, orbit: &[Point2C]) -> Vec2C {
    let prods = products(map, orbit);
    let (d, _) = prods
        .iter()
        .rev()
        .find(|(d, _)| d.max_abs().is_finite())
        .copied()
        .unwrap_or((Mat2C::identity(), 0.0));
    d.top_right_singular().perp().normalized()
}

/// Norms of Dfⁿ on E^s and E^c for n = 1..=N with fitted exponential rates.
pub fn estimate_rates(map: &HenonMap, z: Point2C, n: usize, radius: f64) -> Result<RateReport> {
    if n < 2 {
        return Err(HenonError::InvalidArgument("rate fit needs N ≥ 2".into()));
    }
    let orbit = check_orbit(map, z, n, radius)?;
    estimate_stable_direction(map, z, n, radius)?;
    let prods = products(map, &orbit);
    // ‖Dfⁿ|E^s‖ as a product of one-step factors, each along a freshly
    // estimated E^s; transporting a single vector would let rounding in the
    // unstable component dominate after a few steps.
    let long = map.shadow_orbit(z, n + LOOKAHEAD);
    let mut stable_log = 0.0;
    let jac = map.jacobian().norm();

    let mut inv = Mat2C::identity();
    let mut inv_log = 0.0;
    let mut rows = Vec::with_capacity(n);
    for k in 1..=n {
        let step_inv = map
            .differential(orbit[k - 1])
            .inverse()
            .ok_or(HenonError::NotInvertible)?;
        inv = inv * step_inv;
        let s = inv.max_abs();
        inv = inv.scale(1.0 / s);
        inv_log += s.ln();
        let (d, log_scale) = prods[k];
        let central = d.sigma_max() * log_scale.exp();
        let v = contracted_direction(map, &long[k - 1..k + LOOKAHEAD]);
        stable_log += map.differential(orbit[k - 1]).apply(&v).norm().ln();
        let stable = stable_log.exp();
        let sigma_min = 1.0 / (inv.sigma_max() * inv_log.exp());
        let det_residual = (central * sigma_min / jac.powi(k as i32) - 1.0).abs();
        rows.push(RateRow {
            n: k,
            stable_norm: stable,
            central_norm: central,
            sigma_min,
            det_residual,
        });
    }
    let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let central_rate = fit_rate(&ns, &rows.iter().map(|r| r.central_norm.ln()).collect::<Vec<_>>());
    let stable_rate = fit_rate(&ns, &rows.iter().map(|r| r.stable_norm.ln()).collect::<Vec<_>>());
    let stable_constant = rows
        .iter()
        .map(|r| r.stable_norm / stable_rate.powi(r.n as i32))
        .fold(1.0, f64::max);
    Ok(RateReport {
        base: z,
        rows,
        central_rate,
        stable_rate,
        stable_constant,
        jacobian_abs: jac,
    })
}
