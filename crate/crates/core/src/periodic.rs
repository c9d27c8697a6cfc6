//! Periodic orbits: Newton search, multiplier classification, the saddle
//! point cloud, and Hausdorff comparison of point clouds.
//!
//! Orbits are computed by multiple shooting on the x-sequence. A Hénon
//! orbit is determined by its first coordinates, since each component sends
//! (x_j, x_{j-1}) to (x_{j+1}, x_j) with x_{j+1} = p(x_j) − b·x_{j−1}. A cycle
//! of period n for a composition of m components is a cyclic sequence of
//! length n·m satisfying that recurrence, and Newton's method runs on those
//! n·m complex unknowns.

use crate::error::{HenonError, Result};
use crate::linalg::{solve_dense, Point2C, C64, ONE, ZERO};
use crate::map::HenonMap;
use crate::qrng::Kronecker;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrbitType {
    Attracting,
    Saddle,
    SemiParabolic,
    SemiNeutral,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    pub points: Vec<Point2C>,
    pub period: usize,
    /// Multipliers with |lambda1| ≤ |lambda2|.
    pub lambda1: C64,
    pub lambda2: C64,
    #[serde(rename = "type")]
    pub kind: OrbitType,
}

pub const DEFAULT_NEUTRAL_BAND: f64 = 1e-4;
pub const DEDUP_RESOLUTION: f64 = 1e-8;
const MAX_NEWTON_ITERS: usize = 60;

/// Multipliers (eigenvalues of D f^n at the first point), ordered by modulus.
pub fn multipliers(map: &HenonMap, points: &[Point2C]) -> (C64, C64) {
    let n = points.len();
    let (d, log_scale) = map.differential_power(points[0], n);
    let scale = log_scale.exp();
    // det(D f^n) = Jac^n exactly; rescale to match the normalised product.
    let det = map.jacobian().powu(n as u32) / (scale * scale);
    let (l1, l2) = d.eigenvalues_with_det(det);
    (l1 * scale, l2 * scale)
}

/// Type tag from the larger multiplier.
pub fn classify_multipliers(lambda2: C64, neutral_band: f64) -> OrbitType {
    let m = lambda2.norm();
    if m < 1.0 - neutral_band {
        OrbitType::Attracting
    } else if m > 1.0 + neutral_band {
        OrbitType::Saddle
    } else if (lambda2 - ONE).norm() <= neutral_band {
        OrbitType::SemiParabolic
    } else {
        OrbitType::SemiNeutral
    }
}

/// Recomputes the multipliers of `orbit` and classifies it.
pub fn classify_orbit(map: &HenonMap, orbit: &PeriodicOrbit, neutral_band: f64) -> OrbitType {
    let (_, l2) = multipliers(map, &orbit.points);
    classify_multipliers(l2, neutral_band)
}

impl PeriodicOrbit {
    /// Builds an orbit record from its cycle points (first point first).
    pub fn from_cycle(map: &HenonMap, points: Vec<Point2C>, neutral_band: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(HenonError::InvalidArgument("empty cycle".into()));
        }
        let (lambda1, lambda2) = multipliers(map, &points);
        Ok(PeriodicOrbit {
            period: points.len(),
            kind: classify_multipliers(lambda2, neutral_band),
            points,
            lambda1,
            lambda2,
        })
    }

    /// max_k |f(z_k) − z_{k+1}| around the cycle.
    pub fn residual(&self, map: &HenonMap) -> f64 {
        let n = self.points.len();
        (0..n)
            .map(|k| map.apply_unchecked(self.points[k]).dist(&self.points[(k + 1) % n]))
            .fold(0.0, f64::max)
    }

    pub fn contains_point(&self, z: &Point2C, tol: f64) -> bool {
        self.points.iter().any(|p| p.dist(z) <= tol)
    }
}

/// Search parameters for [`find_periodic_orbits`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitSearch {
    pub seed_count: usize,
    pub tol: f64,
    /// Offset into the quasi-random seed sequence; recorded in reports.
    pub seed: u64,
    pub neutral_band: f64,
    /// Seeds are drawn from the square [−R, R]² per coordinate.
    pub radius: f64,
}

impl OrbitSearch {
    pub fn new(map: &HenonMap, seed_count: usize) -> Result<Self> {
        Ok(OrbitSearch {
            seed_count,
            tol: 1e-11,
            seed: 0,
            neutral_band: DEFAULT_NEUTRAL_BAND,
            radius: map.filtration_radius()?.radius,
        })
    }
}

struct ShootingSystem<'a> {
    map: &'a HenonMap,
    len: usize,
}

impl ShootingSystem<'_> {
    fn m(&self) -> usize {
        self.map.components().len()
    }

    fn residual(&self, x: &[C64]) -> Vec<C64> {
        let l = self.len;
        let comps = self.map.components();
        (0..l)
            .map(|j| {
                let c = &comps[j % self.m()];
                x[(j + 1) % l] - c.poly.eval(x[j]) + c.b * x[(j + l - 1) % l]
            })
            .collect()
    }

    fn jacobian(&self, x: &[C64]) -> Vec<Vec<C64>> {
        let l = self.len;
        let comps = self.map.components();
        let mut a = vec![vec![ZERO; l]; l];
        for j in 0..l {
            let c = &comps[j % self.m()];
            let (_, dp) = c.poly.eval_d(x[j]);
            a[j][(j + 1) % l] += ONE;
            a[j][j] -= dp;
            a[j][(j + l - 1) % l] += c.b;
        }
        a
    }

    /// Damped Newton. `Err(true)` signals a singular Jacobian.
    fn newton(&self, mut x: Vec<C64>, tol: f64, bound: f64) -> std::result::Result<Vec<C64>, bool> {
        let norm = |r: &[C64]| r.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut res = norm(&self.residual(&x));
        let mut polish = 0;
        for _ in 0..MAX_NEWTON_ITERS {
            if res < tol {
                polish += 1;
                if polish > 2 {
                    return Ok(x);
                }
            }
            let f = self.residual(&x);
            let step = solve_dense(self.jacobian(&x), f).ok_or(true)?;
            let mut t = 1.0;
            let mut accepted = None;
            for _ in 0..12 {
                let trial: Vec<C64> = x.iter().zip(&step).map(|(a, s)| a - s * t).collect();
                let r = norm(&self.residual(&trial));
                if r.is_finite() && (r <= res || r < tol) {
                    accepted = Some((trial, r));
                    break;
                }
                t *= 0.5;
            }
            match accepted {
                Some((trial, r)) => {
                    x = trial;
                    res = r;
                }
                None => return Err(false),
            }
            if x.iter().any(|z| z.norm() > bound) {
                return Err(false);
            }
        }
        if res < tol {
            Ok(x)
        } else {
            Err(false)
        }
    }
}

/// Cycle points of f from a solved x-sequence.
fn cycle_points(map: &HenonMap, x: &[C64], period: usize) -> Vec<Point2C> {
    let m = map.components().len();
    let l = x.len();
    (0..period)
        .map(|k| Point2C::new(x[k * m], x[(k * m + l - 1) % l]))
        .collect()
}

/// Least q dividing n with z_q = z_0 (within the dedup resolution).
fn exact_period(points: &[Point2C]) -> usize {
    let n = points.len();
    (1..=n)
        .find(|&q| n % q == 0 && (q == n || points[q].dist(&points[0]) <= DEDUP_RESOLUTION))
        .unwrap_or(n)
}

fn lex_key(p: &Point2C) -> [f64; 4] {
    p.to_real4()
}

/// Rotate the cycle so its lexicographically least point comes first.
fn canonical_rotation(mut points: Vec<Point2C>) -> Vec<Point2C> {
    let start = (0..points.len())
        .min_by(|&a, &b| {
            lex_key(&points[a])
                .partial_cmp(&lex_key(&points[b]))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap_or(0);
    points.rotate_left(start);
    points
}

fn seed_sequence(search: &OrbitSearch, len: usize) -> Vec<Vec<C64>> {
    let mut seq = Kronecker::with_seed(2 * len, search.seed);
    let r = search.radius;
    (0..search.seed_count)
        .map(|_| {
            let u = seq.next_point();
            (0..len)
                .map(|j| C64::new(r * (2.0 * u[2 * j] - 1.0), r * (2.0 * u[2 * j + 1] - 1.0)))
                .collect()
        })
        .collect()
}

/// Newton search for cycles of exact period `period`, deduplicated.
///
/// Seeds are independent, so they are processed in parallel on the current
/// rayon pool; the reduction keeps seed order, making the result independent
/// of the worker count.
pub fn find_periodic_orbits(
    map: &HenonMap,
    period: usize,
    search: &OrbitSearch,
) -> Result<Vec<PeriodicOrbit>> {
    if period == 0 {
        return Err(HenonError::InvalidArgument("period must be ≥ 1".into()));
    }
    let len = period * map.components().len();
    let system = ShootingSystem { map, len };
    let bound = 10.0 * search.radius.max(1.0);
    let seeds = seed_sequence(search, len);
    let solved: Vec<Option<Vec<C64>>> = seeds
        .into_par_iter()
        .map(|seed| match system.newton(seed.clone(), search.tol, bound) {
            Ok(x) => Some(x),
            Err(true) => {
                let nudged: Vec<C64> = seed
                    .iter()
                    .enumerate()
                    .map(|(j, z)| z + C64::new(1e-3 * (j as f64 + 1.0), -7e-4))
                    .collect();
                system.newton(nudged, search.tol, bound).ok()
            }
            Err(false) => None,
        })
        .collect();

    let mut orbits: Vec<PeriodicOrbit> = Vec::new();
    for x in solved.into_iter().flatten() {
        let points = cycle_points(map, &x, period);
        if !points.iter().all(|p| p.is_finite()) || exact_period(&points) != period {
            continue;
        }
        if orbits
            .iter()
            .any(|o| o.contains_point(&points[0], DEDUP_RESOLUTION))
        {
            continue;
        }
        let points = canonical_rotation(points);
        orbits.push(PeriodicOrbit::from_cycle(map, points, search.neutral_band)?);
    }
    orbits.sort_by(|a, b| {
        lex_key(&a.points[0])
            .partial_cmp(&lex_key(&b.points[0]))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(orbits)
}

/// Finite point set in C², deduplicated at [`DEDUP_RESOLUTION`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    pub points: Vec<Point2C>,
    pub label: String,
}

impl PointCloud {
    pub fn new(label: impl Into<String>, points: impl IntoIterator<Item = Point2C>) -> Self {
        let mut pts: Vec<Point2C> = points.into_iter().filter(|p| p.is_finite()).collect();
        pts.sort_by(|a, b| {
            lex_key(a)
                .partial_cmp(&lex_key(b))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut kept: Vec<Point2C> = Vec::with_capacity(pts.len());
        for p in pts {
            // Sorted by re x: only a trailing window can hold duplicates.
            let dup = kept
                .iter()
                .rev()
                .take_while(|q| p.x.re - q.x.re <= DEDUP_RESOLUTION)
                .any(|q| q.dist(&p) <= DEDUP_RESOLUTION);
            if !dup {
                kept.push(p);
            }
        }
        PointCloud {
            points: kept,
            label: label.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Union of saddle-orbit points of every period up to `max_period`.
pub fn harvest_saddles(map: &HenonMap, max_period: usize, search: &OrbitSearch) -> Result<PointCloud> {
    let mut pts = Vec::new();
    for n in 1..=max_period {
        for o in find_periodic_orbits(map, n, search)? {
            if o.kind == OrbitType::Saddle {
                pts.extend(o.points);
            }
        }
    }
    Ok(PointCloud::new(format!("saddles(period<={max_period})"), pts))
}

fn directed(a: &PointCloud, b: &PointCloud) -> f64 {
    a.points
        .par_iter()
        .map(|p| {
            b.points
                .iter()
                .map(|q| {
                    let d = *p - *q;
                    d.x.norm_sqr() + d.y.norm_sqr()
                })
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max)
        .sqrt()
}

/// Hausdorff distance in C² ≅ R⁴ with the Euclidean metric.
pub fn hausdorff_distance(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(HenonError::InvalidArgument(
            "Hausdorff distance of an empty cloud".into(),
        ));
    }
    Ok(directed(a, b).max(directed(b, a)))
}

/// For (x² + c − b·y, x): the c giving a fixed point with multipliers (b, 1).
pub fn semi_parabolic_parameter(b: f64) -> f64 {
    (1.0 + b) * (1.0 + b) / 4.0
}
