//! One-variable polynomial companion: Julia-set sampling by inverse
//! iteration, distance from critical points to J, the derivative-growth test
//! |(pᴺ)′| ≥ 2 on J, and periodic cycles.
//!
//! Only the checkable consequence of hyperbolicity (uniform derivative growth
//! on sampled J) is implemented; hyperbolic-metric constructions on the
//! Fatou set are not.

use crate::error::{HenonError, Result};
use crate::linalg::{solve_dense, C64, ZERO};
use crate::poly::Poly;
use crate::qrng::Kronecker;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

const EXPANSION_TARGET: f64 = 2.0;
/// Relative slack on the expansion target, so that |(pᴺ)′| = 2 exactly on J
/// (as for z² on the circle) passes despite rounding.
const EXPANSION_SLACK: f64 = 1e-9;
/// Largest order q tested for root-of-unity multipliers of neutral cycles.
const MAX_ROOT_ORDER: u32 = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Poly1D {
    poly: Poly,
}

impl Poly1D {
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        let poly = Poly::new(coeffs);
        if poly.degree() < 2 {
            return Err(HenonError::InvalidMap(format!("degree {} < 2", poly.degree())));
        }
        if !poly.coeffs().iter().all(|c| c.is_finite()) {
            return Err(HenonError::InvalidMap("non-finite coefficient".into()));
        }
        Ok(Poly1D { poly })
    }

    pub fn real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn from_poly(poly: Poly) -> Result<Self> {
        Self::new(poly.coeffs().to_vec())
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.poly.eval(z)
    }

    /// R ≥ 1 with |p(z)| ≥ 2|z| whenever |z| ≥ R, from
    /// |p(z)| ≥ |z|^{d−1}(|a_d||z| − Σ_{k<d}|a_k|).
    pub fn escape_radius(&self) -> f64 {
        let c = self.poly.coeffs();
        let d = self.degree();
        let rest: f64 = c[..d].iter().map(|a| a.norm()).sum();
        ((2.0 + rest) / c[d].norm()).max(1.0)
    }

    pub fn critical_points(&self) -> Vec<C64> {
        self.poly.derivative().roots()
    }

    /// Preimages of w, the roots of p(z) − w.
    pub fn preimages(&self, w: C64) -> Vec<C64> {
        let mut c = self.poly.coeffs().to_vec();
        c[0] -= w;
        Poly::new(c).roots()
    }

    /// |(pⁿ)′(z)|, with the orbit followed until it overflows.
    pub fn iterate_derivative(&self, z: C64, n: usize) -> f64 {
        let mut w = z;
        let mut log = 0.0;
        for _ in 0..n {
            let (v, dv) = self.poly.eval_d(w);
            log += dv.norm().ln();
            w = v;
            if !w.is_finite() {
                return f64::INFINITY;
            }
        }
        log.exp()
    }

    /// Coefficients of p∘q.
    fn compose(&self, q: &Poly) -> Poly {
        let mut acc = vec![ZERO];
        for &a in self.poly.coeffs().iter().rev() {
            let mut next = vec![ZERO; acc.len() + q.degree()];
            for (i, &x) in acc.iter().enumerate() {
                for (j, &y) in q.coeffs().iter().enumerate() {
                    next[i + j] += x * y;
                }
            }
            next[0] += a;
            acc = next;
        }
        Poly::new(acc)
    }
}

/// Points of the cycles of period ≤ 2 with their multipliers.
fn low_cycles(p: &Poly1D) -> Vec<(C64, usize, f64, C64)> {
    let mut out = Vec::new();
    let mut iterate = p.poly.clone();
    for period in 1..=2 {
        let mut g = iterate.coeffs().to_vec();
        g[1] -= C64::new(1.0, 0.0);
        for z in Poly::new(g).roots() {
            let mut m = C64::new(1.0, 0.0);
            let mut w = z;
            for _ in 0..period {
                m *= p.poly.eval_d(w).1;
                w = p.eval(w);
            }
            out.push((z, period, m.norm(), m));
        }
        iterate = p.compose(&iterate);
    }
    out
}

/// A repelling cycle point of smallest period ≤ 2, preferring the largest
/// multiplier. Inverse orbits started at such a point stay on J.
fn repelling_point(cycles: &[(C64, usize, f64, C64)]) -> Option<C64> {
    for period in 1..=2 {
        let best = cycles
            .iter()
            .filter(|c| c.1 == period && c.2 > 1.0 + 1e-6 && c.2.is_finite())
            .max_by(|a, b| a.2.total_cmp(&b.2));
        if let Some(c) = best {
            return Some(c.0);
        }
    }
    None
}

/// Cycle points of period ≤ 2 whose multiplier is a root of unity of order
/// ≤ [`MAX_ROOT_ORDER`]. They lie on J, but random inverse iteration reaches
/// their neighbourhoods only with exponentially small probability.
fn parabolic_points(cycles: &[(C64, usize, f64, C64)]) -> Vec<C64> {
    cycles
        .iter()
        .filter(|c| (1..=MAX_ROOT_ORDER).any(|q| (c.3.powu(q) - C64::new(1.0, 0.0)).norm() < 1e-6))
        .map(|c| c.0)
        .collect()
}

/// Points of J sampled by random backward iteration from a repelling cycle
/// point, discarding the first `burn` steps.
///
/// Consecutive samples satisfy p(s_{k+1}) = s_k, so the cloud is invariant up
/// to root-finding error. Parabolic cycle points of period ≤ 2 come first.
pub fn julia_sample_1d(p: &Poly1D, n_points: usize, burn: usize, seed: u64) -> Result<Vec<C64>> {
    if n_points == 0 {
        return Err(HenonError::InvalidArgument("n_points must be ≥ 1".into()));
    }
    let cycles = low_cycles(p);
    let mut z = repelling_point(&cycles)
        .ok_or_else(|| HenonError::NotFound("no repelling fixed point or 2-cycle".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = p.degree();
    let mut out = parabolic_points(&cycles);
    out.truncate(n_points);
    let chain = n_points - out.len();
    for step in 0..burn + chain {
        let pre = p.preimages(z);
        z = pre[rng.gen_range(0..d)];
        if step >= burn {
            out.push(z);
        }
    }
    Ok(out)
}

/// Distance from the critical set of p to the sampled Julia set.
pub fn critical_distance(p: &Poly1D, julia: &[C64]) -> f64 {
    p.critical_points()
        .iter()
        .flat_map(|c| julia.iter().map(move |z| (z - c).norm()))
        .fold(f64::INFINITY, f64::min)
}

/// Least N ≤ `max_n` with min over samples of |(pᴺ)′| ≥ 2, together with
/// that minimum.
pub fn verify_1d_hyperbolicity(p: &Poly1D, julia: &[C64], max_n: usize) -> Option<(usize, f64)> {
    if julia.is_empty() {
        return None;
    }
    let mut pts = julia.to_vec();
    let mut logs = vec![0.0; julia.len()];
    for n in 1..=max_n {
        for (w, l) in pts.iter_mut().zip(logs.iter_mut()) {
            let (v, dv) = p.poly.eval_d(*w);
            *l += dv.norm().ln();
            *w = v;
        }
        let min = logs.iter().copied().fold(f64::INFINITY, f64::min).exp();
        if min >= EXPANSION_TARGET * (1.0 - EXPANSION_SLACK) {
            return Some((n, min));
        }
    }
    None
}

/// Cycles of exact period n found by Newton's method on the cyclic system
/// p(z_k) = z_{k+1}, from quasi-random seeds in the escape disk. Each cycle
/// is rotated to start at its lexicographically smallest point.
pub fn periodic_cycles_1d(p: &Poly1D, n: usize, seeds: usize, seed: u64) -> Result<Vec<Vec<C64>>> {
    if n == 0 {
        return Err(HenonError::InvalidArgument("period must be ≥ 1".into()));
    }
    let r = p.escape_radius();
    let mut q = Kronecker::with_seed(2 * n, seed);
    let mut cycles: Vec<Vec<C64>> = Vec::new();
    for _ in 0..seeds {
        let u = q.next_point();
        let z0: Vec<C64> = (0..n).map(|k| C64::new(r * (2.0 * u[2 * k] - 1.0), r * (2.0 * u[2 * k + 1] - 1.0))).collect();
        let Some(z) = cyclic_newton(p, z0) else {
            continue;
        };
        if (1..n).any(|m| n % m == 0 && (z[m] - z[0]).norm() < 1e-8 * (1.0 + z[0].norm())) {
            continue;
        }
        let k = (0..n)
            .min_by(|&a, &b| (z[a].re, z[a].im).partial_cmp(&(z[b].re, z[b].im)).unwrap())
            .unwrap_or(0);
        let canon: Vec<C64> = (0..n).map(|j| z[(k + j) % n]).collect();
        if !cycles.iter().any(|c| (c[0] - canon[0]).norm() < 1e-8 * (1.0 + c[0].norm())) {
            cycles.push(canon);
        }
    }
    cycles.sort_by(|a, b| (a[0].re, a[0].im).partial_cmp(&(b[0].re, b[0].im)).unwrap());
    Ok(cycles)
}

fn cyclic_newton(p: &Poly1D, mut z: Vec<C64>) -> Option<Vec<C64>> {
    let n = z.len();
    let residual = |z: &[C64]| -> f64 { (0..n).map(|k| (p.eval(z[k]) - z[(k + 1) % n]).norm()).fold(0.0, f64::max) };
    let mut res = residual(&z);
    for _ in 0..60 {
        let mut a = vec![vec![ZERO; n]; n];
        let mut rhs = vec![ZERO; n];
        for k in 0..n {
            let (v, dv) = p.poly.eval_d(z[k]);
            a[k][k] += dv;
            a[k][(k + 1) % n] -= C64::new(1.0, 0.0);
            rhs[k] = -(v - z[(k + 1) % n]);
        }
        let step = solve_dense(a, rhs)?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let trial: Vec<C64> = z.iter().zip(&step).map(|(a, s)| a + s * t).collect();
            let r = residual(&trial);
            if r < res {
                z = trial;
                res = r;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        let scale = 1.0 + z.iter().map(|w| w.norm()).fold(0.0, f64::max);
        if res < 1e-12 * scale {
            return Some(z);
        }
        if !accepted {
            return None;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_samples() {
        let p = Poly1D::real(&[0.0, 0.0, 1.0]).unwrap();
        let s = julia_sample_1d(&p, 500, 20, 1).unwrap();
        assert!(s.iter().all(|z| (z.norm() - 1.0).abs() < 1e-8));
        assert!((critical_distance(&p, &s) - 1.0).abs() < 1e-8);
        assert_eq!(verify_1d_hyperbolicity(&p, &s, 5).map(|t| t.0), Some(1));
        assert_eq!(s, julia_sample_1d(&p, 500, 20, 1).unwrap());
    }

    #[test]
    fn cantor_samples_are_real_and_expanding() {
        let p = Poly1D::real(&[-6.0, 0.0, 1.0]).unwrap();
        let s = julia_sample_1d(&p, 1000, 20, 3).unwrap();
        assert!(s.iter().all(|z| z.im.abs() < 1e-8 && z.re.abs() <= 3.0 + 1e-8));
        assert!(critical_distance(&p, &s) >= 3f64.sqrt() - 1e-8);
        let (n, m) = verify_1d_hyperbolicity(&p, &s, 5).unwrap();
        assert_eq!(n, 1);
        assert!(m >= 2.0 * 3f64.sqrt() - 1e-6);
    }

    #[test]
    fn chebyshev_critical_point_on_j() {
        let p = Poly1D::real(&[-2.0, 0.0, 1.0]).unwrap();
        let s = julia_sample_1d(&p, 4000, 20, 5).unwrap();
        assert!(critical_distance(&p, &s) < 0.05);
    }

    #[test]
    fn parabolic_fails_expansion() {
        let p = Poly1D::real(&[0.25, 0.0, 1.0]).unwrap();
        let s = julia_sample_1d(&p, 2000, 50, 2).unwrap();
        assert!(verify_1d_hyperbolicity(&p, &s, 20).is_none());
    }

    #[test]
    fn cycle_counts_for_cantor_map() {
        let p = Poly1D::real(&[-6.0, 0.0, 1.0]).unwrap();
        let counts: Vec<usize> = (1..=4)
            .map(|n| periodic_cycles_1d(&p, n, 300 * n * n, 0).unwrap().len())
            .collect();
        assert_eq!(counts, vec![2, 1, 2, 3]);
        for c in periodic_cycles_1d(&p, 3, 2000, 0).unwrap() {
            assert!(c.iter().all(|z| z.im.abs() < 1e-9));
        }
    }

    #[test]
    fn rejects_low_degree() {
        assert!(Poly1D::real(&[1.0, 2.0]).is_err());
        assert!(julia_sample_1d(&Poly1D::real(&[0.0, 0.0, 1.0]).unwrap(), 0, 0, 0).is_err());
    }
}
