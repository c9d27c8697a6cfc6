//! Box covers of J on a dyadic grid of [−R, R]⁴.
//!
//! A level-k box has integer index (i₀, i₁, i₂, i₃) over (re x, im x, re y,
//! im y) and side 2R/2^k. Boxes are refined level by level; a child is
//! discarded when an interval iterate leaves the bidisk (no point of J can
//! do that) or lands in a certified trapping box. The survivors are then
//! pruned of boxes without successors or predecessors in the transition
//! graph, which keeps every box meeting the invariant set.

use crate::error::{HenonError, Result};
use crate::interval::{ComplexBox, Interval, MapEnclosure};
use crate::linalg::Point2C;
use crate::map::HenonMap;
use crate::periodic::{OrbitType, PeriodicOrbit};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

pub const DEFAULT_MAX_BOXES: usize = 4_000_000;
pub const MAX_LEVEL: usize = 24;
pub const MAX_BOXES_ENV: &str = "HENONLAB_MAX_BOXES";

/// Box cap from the environment, or the default.
pub fn max_boxes_from_env() -> usize {
    std::env::var(MAX_BOXES_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_BOXES)
}

#[derive(Clone, Debug)]
pub struct CoverOptions {
    pub depth: usize,
    /// Interval iterates tried in each direction before keeping a box.
    pub escape_iters: usize,
    pub max_boxes: usize,
    /// Boxes known to be forward invariant (subsets of attracting basins).
    pub traps: Vec<ComplexBox>,
}

impl CoverOptions {
    pub fn new(depth: usize) -> Self {
        CoverOptions {
            depth,
            escape_iters: 8,
            max_boxes: max_boxes_from_env(),
            traps: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridBox {
    pub index: [u32; 4],
    pub bx: ComplexBox,
}

/// Box of the grid at `level` with the given index.
pub fn grid_box(radius: f64, level: usize, index: [u32; 4]) -> ComplexBox {
    let w = 2.0 * radius / (1u64 << level) as f64;
    let iv = index.map(|i| Interval::new(-radius + i as f64 * w, -radius + (i as f64 + 1.0) * w));
    ComplexBox::from_intervals(iv)
}

#[derive(Clone, Debug)]
pub struct JuliaCover {
    pub radius: f64,
    pub level: usize,
    pub boxes: Vec<GridBox>,
    /// Set when the box cap stopped refinement early.
    pub truncated: bool,
    lookup: HashMap<[u32; 4], usize>,
}

impl JuliaCover {
    pub fn from_boxes(radius: f64, level: usize, mut boxes: Vec<GridBox>, truncated: bool) -> Self {
        boxes.sort_unstable_by_key(|b| b.index);
        let lookup = boxes.iter().enumerate().map(|(k, b)| (b.index, k)).collect();
        JuliaCover {
            radius,
            level,
            boxes,
            truncated,
            lookup,
        }
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn side(&self) -> f64 {
        2.0 * self.radius / (1u64 << self.level) as f64
    }

    pub fn volume(&self) -> f64 {
        self.boxes.iter().map(|b| b.bx.volume()).sum()
    }

    pub fn index_of(&self, index: &[u32; 4]) -> Option<usize> {
        self.lookup.get(index).copied()
    }

    /// Cover box containing `z`, if any (lowest index on shared faces).
    pub fn locate(&self, z: &Point2C) -> Option<usize> {
        let c = z.to_real4();
        let w = self.side();
        let n = 1i64 << self.level;
        let mut base = [0i64; 4];
        for d in 0..4 {
            base[d] = ((c[d] + self.radius) / w).floor() as i64;
        }
        // Check the neighbouring cells too: the floor can be off by one at faces.
        let mut best: Option<usize> = None;
        for mask in 0..81u32 {
            let mut idx = [0u32; 4];
            let mut ok = true;
            let mut m = mask;
            for d in 0..4 {
                let v = base[d] + (m % 3) as i64 - 1;
                m /= 3;
                if v < 0 || v >= n {
                    ok = false;
                    break;
                }
                idx[d] = v as u32;
            }
            if !ok {
                continue;
            }
            if let Some(k) = self.index_of(&idx) {
                if self.boxes[k].bx.contains(z) && best.is_none_or(|b| k < b) {
                    best = Some(k);
                }
            }
        }
        best
    }

    /// Indices of cover boxes meeting `target`, ascending.
    pub fn intersecting(&self, target: &ComplexBox) -> Vec<u32> {
        if !target.is_finite() {
            return (0..self.boxes.len() as u32).collect();
        }
        let w = self.side();
        let n = (1u64 << self.level) as i64;
        let iv = target.intervals();
        let mut range = [(0i64, 0i64); 4];
        let mut count: f64 = 1.0;
        for d in 0..4 {
            let lo = (((iv[d].lo + self.radius) / w).floor() as i64 - 1).max(0);
            let hi = (((iv[d].hi + self.radius) / w).floor() as i64 + 1).min(n - 1);
            if lo > hi {
                return Vec::new();
            }
            range[d] = (lo, hi);
            count *= (hi - lo + 1) as f64;
        }
        let mut out = Vec::new();
        if count > self.boxes.len() as f64 {
            for (k, b) in self.boxes.iter().enumerate() {
                if b.bx.intersects(target) {
                    out.push(k as u32);
                }
            }
            return out;
        }
        for i0 in range[0].0..=range[0].1 {
            for i1 in range[1].0..=range[1].1 {
                for i2 in range[2].0..=range[2].1 {
                    for i3 in range[3].0..=range[3].1 {
                        let idx = [i0 as u32, i1 as u32, i2 as u32, i3 as u32];
                        if let Some(k) = self.index_of(&idx) {
                            if self.boxes[k].bx.intersects(target) {
                                out.push(k as u32);
                            }
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Successor lists: B → B' when the interval image of B meets B'.
    pub fn transitions(&self, enc: &MapEnclosure) -> Vec<Vec<u32>> {
        self.boxes
            .par_iter()
            .map(|b| self.intersecting(&enc.image(&b.bx)))
            .collect()
    }
}

fn outside_bidisk(bx: &ComplexBox, radius: f64) -> bool {
    bx.x.mig() >= radius || bx.y.mig() >= radius
}

fn survives(enc: &MapEnclosure, invertible: bool, bx: &ComplexBox, radius: f64, opts: &CoverOptions) -> bool {
    if outside_bidisk(bx, radius) {
        return false;
    }
    let limit = 4.0 * radius;
    let mut f = *bx;
    for _ in 0..opts.escape_iters {
        f = enc.image(&f);
        if !f.is_finite() {
            break;
        }
        if outside_bidisk(&f, radius) || opts.traps.iter().any(|t| t.contains_box(&f)) {
            return false;
        }
        if f.width() > limit {
            break;
        }
    }
    if invertible {
        let mut g = *bx;
        for _ in 0..opts.escape_iters {
            g = enc.preimage(&g);
            if !g.is_finite() {
                break;
            }
            if outside_bidisk(&g, radius) {
                return false;
            }
            if g.width() > limit {
                break;
            }
        }
    }
    true
}

/// Removes boxes with no successor or no predecessor until none remain.
pub fn prune(cover: JuliaCover, enc: &MapEnclosure) -> JuliaCover {
    let succ = cover.transitions(enc);
    let n = succ.len();
    let mut out_deg: Vec<usize> = succ.iter().map(|s| s.len()).collect();
    let mut in_deg = vec![0usize; n];
    let mut pred: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (a, s) in succ.iter().enumerate() {
        for &b in s {
            in_deg[b as usize] += 1;
            pred[b as usize].push(a as u32);
        }
    }
    let mut alive = vec![true; n];
    let mut stack: Vec<usize> = (0..n).filter(|&k| out_deg[k] == 0 || in_deg[k] == 0).collect();
    while let Some(k) = stack.pop() {
        if !alive[k] {
            continue;
        }
        alive[k] = false;
        for &b in &succ[k] {
            let b = b as usize;
            if alive[b] {
                in_deg[b] -= 1;
                if in_deg[b] == 0 {
                    stack.push(b);
                }
            }
        }
        for &a in &pred[k] {
            let a = a as usize;
            if alive[a] {
                out_deg[a] -= 1;
                if out_deg[a] == 0 {
                    stack.push(a);
                }
            }
        }
    }
    let kept = cover
        .boxes
        .iter()
        .zip(&alive)
        .filter(|(_, &a)| a)
        .map(|(b, _)| *b)
        .collect();
    JuliaCover::from_boxes(cover.radius, cover.level, kept, cover.truncated)
}

/// The 16 children of a grid box, on the next level.
pub fn children(radius: f64, level: usize, index: [u32; 4]) -> impl Iterator<Item = GridBox> {
    (0..16u32).map(move |k| {
        let idx: [u32; 4] = std::array::from_fn(|d| 2 * index[d] + ((k >> d) & 1));
        GridBox {
            index: idx,
            bx: grid_box(radius, level + 1, idx),
        }
    })
}

/// Subdivides every box once, discards provably non-J children and prunes.
pub fn refine_cover(map: &HenonMap, cover: &JuliaCover, opts: &CoverOptions) -> JuliaCover {
    let enc = MapEnclosure::new(map);
    let r = cover.radius;
    let level = cover.level;
    let kids: Vec<GridBox> = cover
        .boxes
        .par_iter()
        .flat_map_iter(|b| {
            children(r, level, b.index)
                .filter(|c| survives(&enc, map.is_invertible(), &c.bx, r, opts))
                .collect::<Vec<_>>()
        })
        .collect();
    prune(JuliaCover::from_boxes(r, level + 1, kids, cover.truncated), &enc)
}

/// Adaptive cover of J at the requested depth.
///
/// Exceeding the box cap returns the last complete level with `truncated`
/// set and a logged warning.
pub fn build_julia_cover(map: &HenonMap, radius: f64, opts: &CoverOptions) -> Result<JuliaCover> {
    if opts.depth > MAX_LEVEL {
        return Err(HenonError::InvalidArgument(format!(
            "cover depth {} above the limit {MAX_LEVEL}",
            opts.depth
        )));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(HenonError::InvalidArgument("cover radius must be positive".into()));
    }
    let root = GridBox {
        index: [0; 4],
        bx: grid_box(radius, 0, [0; 4]),
    };
    let mut cover = JuliaCover::from_boxes(radius, 0, vec![root], false);
    for level in 0..opts.depth {
        if cover.len().saturating_mul(16) > opts.max_boxes {
            log::warn!(
                "cover cap {} reached at level {level} ({} boxes); returning a partial cover",
                opts.max_boxes,
                cover.len()
            );
            cover.truncated = true;
            break;
        }
        cover = refine_cover(map, &cover, opts);
        log::debug!("cover level {}: {} boxes", cover.level, cover.len());
    }
    Ok(cover)
}

/// Boxes around attracting cycle points that some iterate maps into
/// themselves. Such a box has bounded forward orbits, so it lies in the
/// interior of K⁺ and misses J.
pub fn certify_traps(map: &HenonMap, orbits: &[PeriodicOrbit]) -> Vec<ComplexBox> {
    let enc = MapEnclosure::new(map);
    let mut traps = Vec::new();
    for o in orbits.iter().filter(|o| o.kind == OrbitType::Attracting) {
        for p in &o.points {
            let mut rho = 0.1;
            'sizes: for _ in 0..20 {
                let c = p.to_real4();
                let bx = ComplexBox::from_intervals(c.map(|v| Interval::new(v - rho, v + rho)));
                let mut f = bx;
                for step in 1..=4 * o.period {
                    f = enc.image(&f);
                    if !f.is_finite() {
                        break;
                    }
                    if step % o.period == 0 && bx.contains_box(&f) {
                        traps.push(bx);
                        break 'sizes;
                    }
                }
                rho *= 0.5;
            }
        }
    }
    traps
}
