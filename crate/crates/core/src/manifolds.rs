//! Local strong stable and unstable disks by the graph transform,
//! linearization along stable manifolds, semi-local degree over the second
//! coordinate, transversal heights and holonomy dilatation.
//!
//! A stable disk is a graph over the stable direction at its base point,
//! q(u) = z + u·e_s + h(u)·e_u in the unitary frame (e_s, e_u = e_s^⊥).
//! h(u) is the height whose n-th image lies on the vertical line through
//! fⁿ(z), continued in n until successive heights agree. Offsets from the
//! base orbit are propagated with the exact difference f(z + δ) − f(z), so
//! they keep relative precision however small they get.
//!
//! Unstable disks are stable disks of the conjugate σ∘f⁻¹∘σ, σ(x, y) = (y, x),
//! which is again a Hénon map.

use crate::error::{HenonError, Result};
use crate::linalg::{line_sin, Point2C, Vec2C, C64, ZERO};
use crate::map::{in_escape_region, Direction, HenonMap};
use crate::periodic::{find_periodic_orbits, OrbitSearch, OrbitType};
use crate::qrng::Kronecker;
use crate::splitting::{build_julia_cover, stable_frame_direction, CoverOptions};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Relative agreement of successive graph-transform heights.
const GRAPH_TOL: f64 = 1e-13;
const NEWTON_STEPS: usize = 12;
/// Invariance residual an accepted stable disk must meet.
pub const INVARIANCE_TOL: f64 = 1e-8;
/// Steps of look-ahead for the stable frame at a point.
const FRAME_STEPS: usize = 30;
/// Near-tangency threshold on sin∠(E^s, horizontal).
pub const TANGENCY_THRESHOLD: f64 = 1e-3;
/// Radius of the exclusion balls around semi-parabolic points.
pub const PARABOLIC_EXCLUSION: f64 = 1e-2;
pub const DEFAULT_HEIGHTS: usize = 17;

/// f(z + δ) − f(z) evaluated without cancellation.
fn step_difference(map: &HenonMap, z: Point2C, d: Vec2C) -> Vec2C {
    let mut w = z;
    let mut d = d;
    for c in map.components() {
        let dx = c.poly.difference(w.x, d.x) - c.b * d.y;
        d = Point2C::new(dx, d.x);
        w = Point2C::new(c.poly.eval(w.x) - c.b * w.y, w.x);
    }
    d
}

/// σ∘f⁻¹∘σ: components in reverse order, each (p, b) replaced by (p/b, 1/b).
fn swapped_inverse(map: &HenonMap) -> Result<HenonMap> {
    if !map.is_invertible() {
        return Err(HenonError::NotInvertible);
    }
    let parts = map
        .components()
        .iter()
        .rev()
        .map(|c| (c.poly.coeffs().iter().map(|a| a / c.b).collect(), C64::new(1.0, 0.0) / c.b))
        .collect();
    HenonMap::compose(parts)
}

fn swap(z: Point2C) -> Point2C {
    Point2C::new(z.y, z.x)
}

/// Base orbit with stable frames, shared by all leaf computations.
struct Leaves<'a> {
    map: &'a HenonMap,
    orbit: Vec<Point2C>,
    radius: f64,
}

impl<'a> Leaves<'a> {
    fn new(map: &'a HenonMap, z: Point2C, len: usize, radius: f64) -> Result<Self> {
        if !z.is_finite() {
            return Err(HenonError::Domain(format!("{z:?}")));
        }
        let orbit = map.shadow_orbit(z, len);
        if let Some(k) = orbit.iter().position(|w| in_escape_region(w, radius, Direction::Forward)) {
            return Err(HenonError::OrbitEscaped { steps: k });
        }
        Ok(Leaves { map, orbit, radius })
    }

    fn frame(&self, k: usize) -> (Vec2C, Vec2C) {
        let e = stable_frame_direction(self.map, self.orbit[k], self.radius, FRAME_STEPS);
        (e, e.perp())
    }

    /// x(fⁿ(q)) − x(fⁿ(z_k)) and its derivative in t for q = z_k + u·e_s + t·e_u.
    fn shoot(&self, k: usize, frame: (Vec2C, Vec2C), u: C64, t: C64, n: usize) -> (C64, C64) {
        let (es, eu) = frame;
        let mut d = es.scale(u) + eu.scale(t);
        let mut w = eu;
        for j in 0..n {
            let z = self.orbit[k + j];
            w = self.map.differential(z + d).apply(&w);
            d = step_difference(self.map, z, d);
        }
        (d.x, w.x)
    }

    /// Height t(u) of the stable leaf through z_k over the parameter u.
    fn height(&self, k: usize, frame: (Vec2C, Vec2C), u: C64, t0: C64, iters: usize) -> Result<(C64, usize)> {
        let mut t = t0;
        let mut prev: Option<C64> = None;
        let mut trace = Vec::new();
        let max_n = iters.min(self.orbit.len() - 1 - k);
        for n in 1..=max_n {
            for _ in 0..NEWTON_STEPS {
                let (g, dg) = self.shoot(k, frame, u, t, n);
                let step = g / dg;
                if !step.is_finite() {
                    return Err(HenonError::NoConvergence(format!(
                        "graph transform at u = {u} broke down at depth {n}"
                    )));
                }
                t -= step;
                if step.norm() <= 4.0 * f64::EPSILON * (u.norm() + t.norm()) {
                    break;
                }
            }
            if let Some(p) = prev {
                let change = (t - p).norm();
                trace.push(change);
                if change <= GRAPH_TOL * (u.norm() + t.norm()) {
                    return Ok((t, n));
                }
            }
            prev = Some(t);
        }
        Err(HenonError::NoConvergence(format!(
            "graph transform at u = {u} did not settle in {max_n} steps; successive changes {trace:?}"
        )))
    }

    /// Offset of the leaf point over u, snapped onto the leaf.
    fn leaf_offset(&self, k: usize, frame: (Vec2C, Vec2C), u: C64, t0: C64, iters: usize) -> Result<(Vec2C, usize)> {
        let (t, n) = self.height(k, frame, u, t0, iters)?;
        Ok((frame.0.scale(u) + frame.1.scale(t), n))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskSample {
    pub u: C64,
    pub point: Point2C,
    /// point − base, carried at full relative precision.
    pub offset: Vec2C,
}

/// Discretised local strong stable manifold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StableDisk {
    pub base: Point2C,
    /// Unit E^s at the base.
    pub tangent: Vec2C,
    pub radius: f64,
    pub grid: usize,
    /// Largest graph-transform depth used by any sample.
    pub depth: usize,
    /// samples[0] is the base (u = 0), then `grid` rings of `grid` points.
    pub samples: Vec<DiskSample>,
    /// Largest distance of f(sample) from the disk at f(base), measured
    /// along e_u at f(base).
    pub invariance_residual: f64,
}

fn polar_grid(radius: f64, grid: usize) -> Vec<Vec<C64>> {
    (0..grid)
        .map(|j| {
            let phase = C64::from_polar(1.0, TAU * j as f64 / grid as f64);
            (1..=grid).map(|i| phase * (radius * i as f64 / grid as f64)).collect()
        })
        .collect()
}

fn check_disk_args(radius: f64, grid: usize, iters: usize) -> Result<()> {
    if !(radius > 0.0 && radius.is_finite()) || grid == 0 || iters < 2 {
        return Err(HenonError::InvalidArgument(
            "disk needs radius > 0, grid ≥ 1 and iters ≥ 2".into(),
        ));
    }
    Ok(())
}

fn disk_on(leaves: &Leaves, radius: f64, grid: usize, iters: usize) -> Result<StableDisk> {
    let frame = leaves.frame(0);
    let rays: Vec<Result<Vec<(C64, Vec2C, usize)>>> = polar_grid(radius, grid)
        .into_par_iter()
        .map(|ray| {
            let mut out = Vec::with_capacity(ray.len());
            let mut guess = ZERO;
            for (i, &u) in ray.iter().enumerate() {
                let (d, n) = leaves.leaf_offset(0, frame, u, guess, iters)?;
                let t = frame.1.dot(&d);
                let s = (i + 2) as f64 / (i + 1) as f64;
                guess = t * (s * s);
                out.push((u, d, n));
            }
            Ok(out)
        })
        .collect();
    let base = leaves.orbit[0];
    let mut samples = vec![DiskSample {
        u: ZERO,
        point: base,
        offset: Point2C::new(ZERO, ZERO),
    }];
    let mut depth = 0;
    for ray in rays {
        for (u, d, n) in ray? {
            depth = depth.max(n);
            samples.push(DiskSample { u, point: base + d, offset: d });
        }
    }

    let next = leaves.frame(1);
    let residuals: Vec<Result<f64>> = samples[1..]
        .par_iter()
        .map(|s| {
            let d1 = step_difference(leaves.map, base, s.offset);
            let a = next.0.dot(&d1);
            let b = next.1.dot(&d1);
            let (t, _) = leaves.height(1, next, a, b, iters)?;
            Ok((b - t).norm())
        })
        .collect();
    let mut invariance_residual = 0.0_f64;
    for r in residuals {
        invariance_residual = invariance_residual.max(r?);
    }
    Ok(StableDisk {
        base,
        tangent: frame.0,
        radius,
        grid,
        depth,
        samples,
        invariance_residual,
    })
}

/// Local strong stable disk of parameter radius `radius` through z, on a
/// `grid` × `grid` polar grid, with graph-transform depth at most `iters`.
pub fn local_stable_disk(map: &HenonMap, z: Point2C, radius: f64, grid: usize, iters: usize) -> Result<StableDisk> {
    check_disk_args(radius, grid, iters)?;
    let big = map.filtration_radius()?.radius;
    let leaves = Leaves::new(map, z, iters + 2, big)?;
    let disk = disk_on(&leaves, radius, grid, iters)?;
    if !(disk.invariance_residual < INVARIANCE_TOL) {
        return Err(HenonError::NoConvergence(format!(
            "stable disk invariance residual {:.3e} ≥ {INVARIANCE_TOL:e}",
            disk.invariance_residual
        )));
    }
    Ok(disk)
}

/// Local unstable disk through x with its backward diameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnstableDisk {
    pub base: Point2C,
    /// Unit E^u at the base.
    pub tangent: Vec2C,
    pub radius: f64,
    pub samples: Vec<DiskSample>,
    /// Diameter of f⁻ᵏ(D) over the outer ring, k = 0..=n.
    pub backward_diameters: Vec<f64>,
    pub transversal_height: C64,
}

/// Local unstable disk through x assembled from forward images of
/// horizontal line pieces taken along the backward orbit of x, followed for
/// at most n steps.
///
/// The backward images f⁻ᵏ(D) are snapped back onto the unstable disk at
/// f⁻ᵏ(x) after every step, so transversal rounding never accumulates.
pub fn local_unstable_disk(map: &HenonMap, x: Point2C, n: usize, y0: C64) -> Result<UnstableDisk> {
    local_unstable_disk_with(map, x, n, y0, 0.05, 8)
}

pub fn local_unstable_disk_with(
    map: &HenonMap,
    x: Point2C,
    n: usize,
    y0: C64,
    radius: f64,
    grid: usize,
) -> Result<UnstableDisk> {
    check_disk_args(radius, grid, n.max(2))?;
    let big = map.filtration_radius()?.radius;
    if !(y0.norm() < big) {
        return Err(HenonError::InvalidArgument(format!("transversal height |y0| = {} ≥ R", y0.norm())));
    }
    let g = swapped_inverse(map)?;
    let gbig = g.filtration_radius()?.radius.max(big);
    let iters = n.max(2);
    let leaves = Leaves::new(&g, swap(x), n + iters + 2, gbig)?;
    let disk = disk_on(&leaves, radius, grid, iters)?;

    let ring: Vec<Vec2C> = disk.samples[1..]
        .iter()
        .filter(|s| (s.u.norm() - radius).abs() <= 1e-12 * radius)
        .map(|s| s.offset)
        .collect();
    let diameter = |pts: &[Vec2C]| {
        let mut m = 0.0_f64;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                m = m.max((*a - *b).norm());
            }
        }
        m
    };
    let mut diameters = vec![diameter(&ring)];
    let mut pts = ring;
    for k in 0..n {
        let frame = leaves.frame(k + 1);
        let z = leaves.orbit[k];
        pts = pts
            .par_iter()
            .map(|&d| {
                let d1 = step_difference(&g, z, d);
                let a = frame.0.dot(&d1);
                let b = frame.1.dot(&d1);
                leaves.leaf_offset(k + 1, frame, a, b, iters).map(|r| r.0)
            })
            .collect::<Result<Vec<_>>>()?;
        diameters.push(diameter(&pts));
    }
    let samples = disk
        .samples
        .iter()
        .map(|s| DiskSample {
            u: s.u,
            point: swap(s.point),
            offset: swap(s.offset),
        })
        .collect();
    Ok(UnstableDisk {
        base: x,
        tangent: swap(disk.tangent),
        radius,
        samples,
        backward_diameters: diameters,
        transversal_height: y0,
    })
}

/// Linearizing coordinate of q on the stable manifold of p.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Linearization {
    pub u: C64,
    /// λ_k = ⟨e_s(z_{k+1}), Df(z_k)e_s(z_k)⟩ along the base orbit.
    pub scale_factors: Vec<C64>,
    pub truncation: usize,
}

const LINEARIZE_MAX_STEPS: usize = 64;
const LINEARIZE_ITERS: usize = 40;

/// u = lim ⟨e_s(z_n), fⁿ(q) − fⁿ(p)⟩ / (λ_0⋯λ_{n−1}), truncated once
/// successive values agree to `tol` relative. The image is snapped onto the
/// stable leaf after every step.
pub fn linearize(map: &HenonMap, p: Point2C, q: Point2C, tol: f64) -> Result<Linearization> {
    if !(tol > 0.0) {
        return Err(HenonError::InvalidArgument("tol must be positive".into()));
    }
    let big = map.filtration_radius()?.radius;
    let leaves = Leaves::new(map, p, LINEARIZE_MAX_STEPS + LINEARIZE_ITERS + 2, big)?;
    let mut frame = leaves.frame(0);
    let d0 = q - p;
    if d0.norm() == 0.0 {
        return Ok(Linearization {
            u: ZERO,
            scale_factors: Vec::new(),
            truncation: 0,
        });
    }
    let a = frame.0.dot(&d0);
    let b = frame.1.dot(&d0);
    let (t, _) = leaves.height(0, frame, a, b, LINEARIZE_ITERS)?;
    let off = (b - t).norm();
    if off > 1e-7 * d0.norm().max(1e-3) {
        return Err(HenonError::InvalidArgument(format!(
            "point is {off:.3e} off the stable disk of the base"
        )));
    }
    let mut d = frame.0.scale(a) + frame.1.scale(t);
    let mut lambda = C64::new(1.0, 0.0);
    let mut factors = Vec::new();
    let mut u = a;
    for k in 0..LINEARIZE_MAX_STEPS {
        let next = leaves.frame(k + 1);
        let z = leaves.orbit[k];
        let lk = next.0.dot(&leaves.map.differential(z).apply(&frame.0));
        factors.push(lk);
        lambda *= lk;
        let d1 = step_difference(leaves.map, z, d);
        let a1 = next.0.dot(&d1);
        let b1 = next.1.dot(&d1);
        let (t1, _) = leaves.height(k + 1, next, a1, b1, LINEARIZE_ITERS)?;
        d = next.0.scale(a1) + next.1.scale(t1);
        frame = next;
        let u_new = a1 / lambda;
        if (u_new - u).norm() <= tol * u_new.norm() {
            return Ok(Linearization {
                u: u_new,
                scale_factors: factors,
                truncation: k + 1,
            });
        }
        u = u_new;
    }
    Err(HenonError::NoConvergence(format!(
        "linearization did not settle in {LINEARIZE_MAX_STEPS} steps"
    )))
}

/// λ₁ at p: the one-step stable factor of the linearization.
pub fn stable_factor(map: &HenonMap, p: Point2C) -> Result<C64> {
    let big = map.filtration_radius()?.radius;
    let leaves = Leaves::new(map, p, 2, big)?;
    let (e0, _) = leaves.frame(0);
    let (e1, _) = leaves.frame(1);
    Ok(e1.dot(&map.differential(p).apply(&e0)))
}

#[derive(Clone, Debug)]
pub struct SemilocalOptions {
    /// Parameter radius of the local disk that is pulled back.
    pub local_radius: f64,
    pub heights: usize,
    pub boundary_samples: usize,
    pub max_pullbacks: usize,
    pub iters: usize,
    pub seed: u64,
}

impl Default for SemilocalOptions {
    fn default() -> Self {
        SemilocalOptions {
            local_radius: 0.05,
            heights: DEFAULT_HEIGHTS,
            boundary_samples: 256,
            max_pullbacks: 16,
            iters: 40,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemilocalDegree {
    pub degree: i64,
    /// (c, number of solutions of y = c) per sampled height.
    pub per_height: Vec<(C64, i64)>,
    pub pullbacks: usize,
    /// False when the pulled-back boundary never left the bidisk.
    pub complete: bool,
}

/// Degree of π₂ on the semi-local stable manifold of z in Δ²_R, the largest
/// winding of y − c around the pulled-back disk boundary over sampled c.
pub fn semilocal_degree(map: &HenonMap, z: Point2C, r: f64) -> Result<SemilocalDegree> {
    semilocal_degree_with(map, z, r, &SemilocalOptions::default())
}

pub fn semilocal_degree_with(map: &HenonMap, z: Point2C, r: f64, opts: &SemilocalOptions) -> Result<SemilocalDegree> {
    if !(r > 0.0) || opts.heights == 0 || opts.boundary_samples < 8 {
        return Err(HenonError::InvalidArgument("bad semi-local degree options".into()));
    }
    if !map.is_invertible() {
        return Err(HenonError::NotInvertible);
    }
    let big = map.filtration_radius()?.radius.max(r);
    let leaves = Leaves::new(map, z, opts.max_pullbacks + opts.iters + 2, big)?;
    let boundary = |k: usize, m: usize| -> Result<Vec<C64>> {
        let frame = leaves.frame(k);
        (0..m)
            .into_par_iter()
            .map(|j| {
                let v = C64::from_polar(opts.local_radius, TAU * j as f64 / m as f64);
                let (d, _) = leaves.leaf_offset(k, frame, v, ZERO, opts.iters)?;
                let mut w = leaves.orbit[k] + d;
                for _ in 0..k {
                    w = map.apply_inverse_unchecked(w);
                }
                Ok(w.y)
            })
            .collect()
    };
    let mut k = 0;
    let mut ys = boundary(0, opts.boundary_samples)?;
    let mut complete = ys.iter().all(|y| y.norm() > r);
    while !complete && k < opts.max_pullbacks {
        k += 1;
        ys = boundary(k, opts.boundary_samples)?;
        complete = ys.iter().all(|y| y.norm() > r);
    }
    let mut q = Kronecker::with_seed(2, opts.seed);
    let heights: Vec<C64> = (0..opts.heights)
        .map(|_| {
            let u = q.next_point();
            C64::from_polar(0.9 * r * u[0].sqrt(), TAU * u[1])
        })
        .collect();
    let mut m = opts.boundary_samples;
    loop {
        let max_jump = heights
            .iter()
            .flat_map(|&c| {
                let ys = &ys;
                (0..ys.len()).map(move |j| wrapped((ys[(j + 1) % ys.len()] - c).arg() - (ys[j] - c).arg()).abs())
            })
            .fold(0.0, f64::max);
        if max_jump < 1.0 || m >= 16 * opts.boundary_samples {
            break;
        }
        m *= 2;
        ys = boundary(k, m)?;
    }
    let per_height: Vec<(C64, i64)> = heights
        .iter()
        .map(|&c| {
            let total: f64 = (0..ys.len())
                .map(|j| wrapped((ys[(j + 1) % ys.len()] - c).arg() - (ys[j] - c).arg()))
                .sum();
            (c, (total / TAU).round() as i64)
        })
        .collect();
    let degree = per_height.iter().map(|p| p.1).max().unwrap_or(0);
    Ok(SemilocalDegree {
        degree,
        per_height,
        pullbacks: k,
        complete,
    })
}

fn wrapped(a: f64) -> f64 {
    let mut a = a % TAU;
    if a > std::f64::consts::PI {
        a -= TAU;
    } else if a <= -std::f64::consts::PI {
        a += TAU;
    }
    a
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transversal {
    pub y0: C64,
    pub tangency_count: usize,
    /// Cover points sampled on the returned line.
    pub crossings: usize,
    pub candidates_scanned: usize,
}

/// Scans candidate heights for the line {y = y₀} least tangent to the
/// stable directions of a box cover of J, avoiding semi-parabolic points.
///
/// Candidates alternate between the real segment and the disk |y| < 0.9R.
pub fn select_transversal(map: &HenonMap, r: f64, candidates: usize) -> Result<Transversal> {
    if !(r > 0.0) || candidates == 0 {
        return Err(HenonError::InvalidArgument("need R > 0 and at least one candidate".into()));
    }
    let big = map.filtration_radius()?.radius;
    let cover = build_julia_cover(map, big, &CoverOptions::new(6))?;
    let mut search = OrbitSearch::new(map, 200)?;
    search.radius = big;
    let mut parabolic = Vec::new();
    for n in 1..=2 {
        for o in find_periodic_orbits(map, n, &search)? {
            if o.kind == OrbitType::SemiParabolic {
                parabolic.extend(o.points.iter().map(|p| p.y));
            }
        }
    }
    let mut q = Kronecker::with_seed(2, 7);
    let ys: Vec<C64> = (0..candidates)
        .map(|i| {
            let u = q.next_point();
            if i % 2 == 0 {
                C64::new(0.9 * r * (2.0 * u[0] - 1.0), 0.0)
            } else {
                C64::from_polar(0.9 * r * u[0].sqrt(), TAU * u[1])
            }
        })
        .filter(|y| parabolic.iter().all(|p| (p - y).norm() > PARABOLIC_EXCLUSION))
        .collect();
    let horizontal = Point2C::new(C64::new(1.0, 0.0), ZERO);
    let scored: Vec<(usize, usize)> = ys
        .par_iter()
        .map(|&y0| {
            let mut crossings = 0;
            let mut tangencies = 0;
            for b in &cover.boxes {
                let yi = b.bx.y;
                if yi.re.lo <= y0.re && y0.re <= yi.re.hi && yi.im.lo <= y0.im && y0.im <= yi.im.hi {
                    crossings += 1;
                    let p = Point2C::new(b.bx.center().x, y0);
                    let e = stable_frame_direction(map, p, big, FRAME_STEPS);
                    if line_sin(&e, &horizontal) < TANGENCY_THRESHOLD {
                        tangencies += 1;
                    }
                }
            }
            (tangencies, crossings)
        })
        .collect();
    let best = scored
        .iter()
        .enumerate()
        .filter(|(_, s)| s.1 > 0)
        .min_by_key(|(i, s)| (s.0, *i))
        .map(|(i, s)| (i, *s));
    match best {
        Some((i, (t, c))) if t == 0 => Ok(Transversal {
            y0: ys[i],
            tangency_count: t,
            crossings: c,
            candidates_scanned: ys.len(),
        }),
        Some((_, (t, _))) => Err(HenonError::NotFound(format!(
            "every candidate height meets a near-tangency (fewest: {t})"
        ))),
        None => Err(HenonError::NotFound("no candidate height meets the cover".into())),
    }
}

const HOLONOMY_ANGLES: usize = 32;
const HOLONOMY_MAX_STEPS: usize = 60;
/// Leaves are followed while the circle's images stay this close to the
/// base orbit.
const HOLONOMY_REACH: f64 = 0.1;

/// Dilatation of the holonomy H_z → H_w between horizontal disks of radius r
/// along leaves of f⁻ⁿ(vertical lines), with n the deepest level at which
/// the circle's images stay within reach of the base orbit. Returns
/// max/min of the transported radii.
pub fn holonomy_dilatation(map: &HenonMap, z: Point2C, w: Point2C, r: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(HenonError::InvalidArgument("holonomy radius must be positive".into()));
    }
    let big = map.filtration_radius()?.radius;
    let leaves = Leaves::new(map, z, HOLONOMY_MAX_STEPS, big)?;
    let dw = w - z;
    if dw.norm() == 0.0 {
        return Ok(1.0);
    }
    let circle: Vec<Vec2C> = (0..HOLONOMY_ANGLES)
        .map(|j| Point2C::new(C64::from_polar(r, TAU * j as f64 / HOLONOMY_ANGLES as f64), ZERO))
        .collect();
    // Offsets of the circle's images from the base orbit, step by step.
    let mut tracks: Vec<Vec<Vec2C>> = circle.iter().map(|&d| vec![d]).collect();
    let mut depth = 0;
    for k in 0..HOLONOMY_MAX_STEPS - 1 {
        let next: Vec<Vec2C> = tracks
            .iter()
            .map(|t| step_difference(map, leaves.orbit[k], *t.last().unwrap()))
            .collect();
        if next.iter().any(|d| !(d.norm() <= HOLONOMY_REACH)) {
            break;
        }
        for (t, d) in tracks.iter_mut().zip(next) {
            t.push(d);
        }
        depth = k + 1;
    }
    let depth = depth.max(1);
    // Leaf condition: x-offset of fⁿ(w + (ξ, 0)) equals that of fⁿ(a).
    let transport = |goal: &dyn Fn(usize) -> C64, start: C64| -> Result<C64> {
        let mut xi = start;
        for n in 1..=depth {
            for _ in 0..NEWTON_STEPS {
                let mut d = dw + Point2C::new(xi, ZERO);
                let mut v = Point2C::new(C64::new(1.0, 0.0), ZERO);
                for j in 0..n {
                    let zj = leaves.orbit[j];
                    v = map.differential(zj + d).apply(&v);
                    d = step_difference(map, zj, d);
                }
                let step = (d.x - goal(n)) / v.x;
                if !step.is_finite() {
                    return Err(HenonError::NoConvergence("leaf following broke down".into()));
                }
                xi -= step;
                if step.norm() <= 4.0 * f64::EPSILON * (xi.norm() + r) {
                    break;
                }
            }
        }
        Ok(xi)
    };
    let centre = transport(&|_| ZERO, ZERO)?;
    let radii: Vec<f64> = tracks
        .par_iter()
        .map(|t| {
            let goal = |n: usize| t[n].x;
            transport(&goal, t[0].x).map(|xi| (xi - centre).norm())
        })
        .collect::<Result<Vec<_>>>()?;
    let max = radii.iter().copied().fold(0.0, f64::max);
    let min = radii.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(max / min)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolonomyProfile {
    pub radii: Vec<f64>,
    pub dilatations: Vec<f64>,
    /// Slope of log(dilatation − 1) against log r, when every excess is
    /// positive.
    pub epsilon: Option<f64>,
}

pub fn holonomy_profile(map: &HenonMap, z: Point2C, w: Point2C, radii: &[f64]) -> Result<HolonomyProfile> {
    let dilatations = radii
        .iter()
        .map(|&r| holonomy_dilatation(map, z, w, r))
        .collect::<Result<Vec<_>>>()?;
    let epsilon = if radii.len() >= 2 && dilatations.iter().all(|&d| d > 1.0) {
        let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
        let ys: Vec<f64> = dilatations.iter().map(|d| (d - 1.0).ln()).collect();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        Some(sxy / sxx)
    } else {
        None
    };
    Ok(HolonomyProfile {
        radii: radii.to_vec(),
        dilatations,
        epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// p = x², b = 0.05 has the saddle (1.05, 1.05) with multipliers
    /// 1.05 ± √(1.05² − 0.05) and eigenvectors (λ, 1).
    fn saddle() -> (HenonMap, Point2C, f64, f64) {
        let b = 0.05;
        let f = HenonMap::real(&[0.0, 0.0, 1.0], b).unwrap();
        let s = (1.05f64 * 1.05 - b).sqrt();
        (f, Point2C::real(1.05, 1.05), 1.05 - s, 1.05 + s)
    }

    fn horseshoe_saddle(b: f64) -> (HenonMap, Point2C) {
        let f = HenonMap::real(&[-6.0, 0.0, 1.0], b).unwrap();
        let x = ((1.0 + b) + ((1.0 + b) * (1.0 + b) + 24.0f64).sqrt()) / 2.0;
        (f, Point2C::real(x, x))
    }

    #[test]
    fn saddle_disk_is_tangent_to_eigenvector_and_invariant() {
        let (f, z, ls, _) = saddle();
        let disk = local_stable_disk(&f, z, 0.05, 6, 40).unwrap();
        assert!(line_sin(&disk.tangent, &Point2C::real(ls, 1.0)) < 1e-8);
        assert!(disk.invariance_residual < INVARIANCE_TOL, "{}", disk.invariance_residual);
        assert_eq!(disk.samples[0].point, z);
        assert_eq!(disk.samples.len(), 1 + 36);
        assert_eq!(disk, local_stable_disk(&f, z, 0.05, 6, 40).unwrap());
    }

    #[test]
    fn disk_points_contract_onto_the_base_orbit() {
        let (f, z, ls, _) = saddle();
        let disk = local_stable_disk(&f, z, 0.05, 4, 40).unwrap();
        for s in &disk.samples[1..] {
            let mut d = s.offset;
            for _ in 0..3 {
                d = step_difference(&f, z, d);
            }
            assert!(d.norm() <= 2.0 * ls.powi(3) * s.offset.norm());
        }
    }

    #[test]
    fn nearly_degenerate_disk_is_vertical() {
        let (f, z) = horseshoe_saddle(1e-6);
        let disk = local_stable_disk(&f, z, 0.05, 6, 40).unwrap();
        let dev = disk.samples.iter().map(|s| s.offset.x.norm()).fold(0.0, f64::max);
        assert!(dev < 1e-3, "{dev}");
    }

    #[test]
    fn bad_disk_arguments() {
        let (f, z, _, _) = saddle();
        assert!(matches!(local_stable_disk(&f, z, 0.0, 4, 10), Err(HenonError::InvalidArgument(_))));
        assert!(matches!(local_stable_disk(&f, z, 0.1, 0, 10), Err(HenonError::InvalidArgument(_))));
        assert!(matches!(
            local_stable_disk(&f, Point2C::real(50.0, 0.0), 0.1, 4, 10),
            Err(HenonError::OrbitEscaped { .. })
        ));
    }

    #[test]
    fn linearization_normalisation_and_functional_equation() {
        let (f, z, _, _) = saddle();
        assert_eq!(linearize(&f, z, z, 1e-12).unwrap().u, ZERO);
        let lambda = stable_factor(&f, z).unwrap();

        let near = local_stable_disk(&f, z, 1e-5, 1, 40).unwrap();
        let q = &near.samples[1];
        let u = linearize(&f, z, q.point, 1e-13).unwrap().u;
        assert!((u.norm() / q.offset.norm() - 1.0).abs() < 1e-4);

        let disk = local_stable_disk(&f, z, 0.05, 10, 40).unwrap();
        let fz = f.apply_unchecked(z);
        for s in &disk.samples[1..] {
            let u = linearize(&f, z, s.point, 1e-12).unwrap().u;
            let v = linearize(&f, fz, f.apply_unchecked(s.point), 1e-12).unwrap().u;
            assert!((v - lambda * u).norm() < 1e-8, "{}", (v - lambda * u).norm());
        }
    }

    #[test]
    fn off_manifold_point_is_rejected() {
        let (f, z, _, _) = saddle();
        let e = linearize(&f, z, z + Point2C::real(0.01, 0.0), 1e-12).unwrap_err();
        assert!(matches!(e, HenonError::InvalidArgument(_)));
    }

    #[test]
    fn near_one_dimensional_degree_is_one() {
        let b = 1e-4;
        let f = HenonMap::real(&[0.0, 0.0, 1.0], b).unwrap();
        let r = f.filtration_radius().unwrap().radius;
        let z = Point2C::real(1.0 + b, 1.0 + b);
        let deg = semilocal_degree(&f, z, r).unwrap();
        assert!(deg.complete);
        assert_eq!(deg.degree, 1);
        assert!(deg.per_height.iter().all(|h| h.1 == 1));
        let mut opts = SemilocalOptions::default();
        opts.heights = 40;
        opts.boundary_samples = 512;
        assert_eq!(semilocal_degree_with(&f, z, r, &opts).unwrap().degree, 1);
    }

    #[test]
    fn horseshoe_transversal_has_no_tangencies() {
        let (f, _) = horseshoe_saddle(0.001);
        let r = f.filtration_radius().unwrap().radius;
        let t = select_transversal(&f, r, 8).unwrap();
        assert_eq!(t.tangency_count, 0);
        assert!(t.crossings > 0);
        assert!(t.y0.norm() < r);
        assert_eq!(t, select_transversal(&f, r, 8).unwrap());
    }

    #[test]
    fn holonomy_tends_to_identity() {
        let (f, z) = horseshoe_saddle(0.001);
        assert_eq!(holonomy_dilatation(&f, z, z, 1e-3).unwrap(), 1.0);
        let disk = local_stable_disk(&f, z, 0.02, 1, 40).unwrap();
        let w = disk.samples[1].point;
        let radii = [4e-3, 2e-3, 1e-3, 5e-4, 2.5e-4];
        let prof = holonomy_profile(&f, z, w, &radii).unwrap();
        for d in prof.dilatations.windows(2) {
            assert!(d[1] <= d[0] + 1e-6, "{:?}", prof.dilatations);
        }
        assert!(prof.dilatations.iter().all(|&d| d >= 1.0));
        assert!(prof.epsilon.unwrap() > 0.0, "{:?}", prof);
    }

    #[test]
    fn unstable_disk_at_saddle() {
        let (f, z, _, lu) = saddle();
        let d = local_unstable_disk(&f, z, 40, ZERO).unwrap();
        assert!(line_sin(&d.tangent, &Point2C::real(lu, 1.0)) < 1e-6);
        let diam = &d.backward_diameters;
        assert_eq!(diam.len(), 41);
        assert!(diam[40] / diam[0] < 0.1);
        assert!(diam[2..].windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn horseshoe_unstable_diameters_shrink() {
        let (f, z) = horseshoe_saddle(0.001);
        let d = local_unstable_disk(&f, z, 40, ZERO).unwrap();
        let diam = &d.backward_diameters;
        assert!(diam[40] / diam[0] < 0.1);
        assert!(diam[2..].windows(2).all(|w| w[1] < w[0]));
        let r = f.filtration_radius().unwrap().radius;
        assert!(local_unstable_disk(&f, z, 5, C64::new(2.0 * r, 0.0)).is_err());
    }

    #[test]
    fn conjugate_inverse_is_swapped_inverse() {
        let (f, _, _, _) = saddle();
        let g = swapped_inverse(&f).unwrap();
        let p = Point2C::new(C64::new(0.3, -0.2), C64::new(0.7, 0.1));
        let back = swap(g.apply_unchecked(swap(f.apply_unchecked(p))));
        assert!((back - p).norm() < 1e-12);
    }
}
