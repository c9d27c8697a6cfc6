//! Pointwise cross-check of a certificate along actual orbit segments.
//!
//! Every claim a Verified box makes about intervals is re-tested at points:
//! cone images on random boundary vectors, vertical pull-backs, the N-step
//! expansion bound and the domination ratio. A violation means the interval
//! computation was not conservative.

use super::cones::{cone_slope, SplittingCertificate};
use super::cover::{GridBox, JuliaCover};
use crate::interval::ComplexBox;
use crate::linalg::{Mat2C, Point2C, Vec2C, C64};
use crate::map::HenonMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const REL_SLACK: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct OracleOptions {
    pub segments: usize,
    pub seed: u64,
    /// Seed points on J (saddle cycles); every other segment starts near one.
    pub anchors: Vec<Point2C>,
    pub vectors_per_step: usize,
}

impl OracleOptions {
    pub fn new(segments: usize, seed: u64) -> Self {
        OracleOptions {
            segments,
            seed,
            anchors: Vec::new(),
            vectors_per_step: 2,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub segments: usize,
    /// Segments whose whole orbit stayed in the cover.
    pub complete: usize,
    pub step_checks: usize,
    pub centre_checks: usize,
    pub violations: usize,
    pub examples: Vec<String>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    fn merge(mut self, o: OracleReport) -> OracleReport {
        self.segments += o.segments;
        self.complete += o.complete;
        self.step_checks += o.step_checks;
        self.centre_checks += o.centre_checks;
        self.violations += o.violations;
        self.examples.extend(o.examples);
        self.examples.truncate(8);
        self
    }
}

struct Ctx<'a> {
    map: &'a HenonMap,
    cert: &'a SplittingCertificate,
    cover: JuliaCover,
    /// Position in `cert.boxes` of each cover box.
    pos: Vec<usize>,
    frames: Vec<Mat2C>,
    verified_positions: Vec<usize>,
}

fn random_phase(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(1.0, rng.gen::<f64>() * std::f64::consts::TAU)
}

impl Ctx<'_> {
    fn report(&self, k: usize) -> &super::cones::BoxReport {
        &self.cert.boxes[self.pos[k]]
    }

    fn to_frame(&self, k: usize, w: &Vec2C) -> (C64, C64) {
        let c = self.frames[k].adjoint().apply(w);
        (c.x, c.y)
    }

    fn from_frame(&self, k: usize, a: C64, c: C64) -> Vec2C {
        self.frames[k].apply(&Point2C::new(a, c))
    }

    /// Random vector of H_k(α) with |a| = s·t|c|, s ∈ [0, 1].
    fn horizontal(&self, k: usize, rng: &mut ChaCha8Rng, boundary: bool) -> Vec2C {
        let t = 1.0 / cone_slope(self.report(k).alpha);
        let s = if boundary { 1.0 } else { rng.gen::<f64>() };
        let w = self.from_frame(k, random_phase(rng) * (s * t), random_phase(rng));
        w.normalized()
    }

    /// Random vector of C_k(β) with |c| = s·k(β)|a|.
    fn vertical(&self, k: usize, beta: f64, rng: &mut ChaCha8Rng, boundary: bool) -> Vec2C {
        let s = if boundary { 1.0 } else { rng.gen::<f64>() };
        let w = self.from_frame(k, random_phase(rng), random_phase(rng) * (s * cone_slope(beta)));
        w.normalized()
    }

    /// Pointwise cone checks for one step z ∈ B_k ↦ f(z) ∈ B_j.
    fn step_checks(&self, z: &Point2C, k: usize, j: usize, rng: &mut ChaCha8Rng, n: usize) -> Vec<String> {
        let d = self.map.differential(*z);
        let dinv = d.inverse();
        let r = self.cert.params.r;
        let a_k = self.report(k).alpha;
        let a_j = self.report(j).alpha;
        let mut bad = Vec::new();
        for i in 0..n {
            let w = self.horizontal(k, rng, i == 0);
            let (a, c) = self.to_frame(j, &d.apply(&w));
            if !(a.norm() <= c.norm() / cone_slope(r * a_j) * (1.0 + REL_SLACK)) {
                bad.push(format!("horizontal image leaves the cone at {z:?}"));
            }
            if let Some(di) = dinv {
                let u = self.vertical(j, r * a_j, rng, i == 0);
                let (a, c) = self.to_frame(k, &di.apply(&u));
                if !(c.norm() <= cone_slope(a_k) * a.norm() * (1.0 + REL_SLACK)) {
                    bad.push(format!("vertical pull-back leaves the cone at {z:?}"));
                }
            }
        }
        bad
    }

    fn segment(&self, idx: usize, opts: &OracleOptions, n_steps: usize) -> OracleReport {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (idx as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut rep = OracleReport {
            segments: 1,
            ..Default::default()
        };
        let verified: &[usize] = &self.verified_positions;
        let start = if !opts.anchors.is_empty() && idx % 2 == 0 {
            let a = opts.anchors[(idx / 2) % opts.anchors.len()];
            let eps = 1e-3 * self.cover.side();
            let mut v = a.to_real4();
            for c in v.iter_mut() {
                *c += eps * (2.0 * rng.gen::<f64>() - 1.0);
            }
            Point2C::from_real4(v)
        } else {
            if verified.is_empty() {
                return rep;
            }
            let k = verified[rng.gen_range(0..verified.len())];
            self.cover.boxes[k].bx.at(std::array::from_fn(|_| rng.gen::<f64>()))
        };
        let Some(b0) = self.cover.locate(&start) else {
            return rep;
        };
        if !self.report(b0).status.is_verified() {
            return rep;
        }
        let mut z = start;
        let mut b = b0;
        let mut prod = Mat2C::identity();
        for _ in 0..n_steps {
            let next = self.map.apply_unchecked(z);
            let Some(bn) = self.cover.locate(&next) else {
                return rep;
            };
            let bad = self.step_checks(&z, b, bn, &mut rng, opts.vectors_per_step);
            rep.step_checks += 1;
            if !bad.is_empty() {
                rep.violations += bad.len();
                rep.examples.extend(bad);
            }
            prod = self.map.differential(z) * prod;
            z = next;
            b = bn;
        }
        rep.complete = 1;
        let rb = self.report(b0);
        let w = self.horizontal(b0, &mut rng, false);
        let grow = prod.apply(&w).norm();
        if !(grow >= rb.expansion * (1.0 - REL_SLACK)) {
            rep.violations += 1;
            rep.examples.push(format!("expansion {grow:.6e} below bound {:.6e} at {start:?}", rb.expansion));
        }
        if let Some(inv) = prod.inverse() {
            let u = self.vertical(b, self.report(b).alpha, &mut rng, false);
            let v = inv.apply(&u).normalized();
            let q = prod.apply(&v).norm() / grow;
            if !(q <= rb.worst_ratio * (1.0 + REL_SLACK)) {
                rep.violations += 1;
                rep.examples.push(format!("ratio {q:.6e} above bound {:.6e} at {start:?}", rb.worst_ratio));
            }
        }
        rep
    }
}

impl Ctx<'_> {
    fn centre_check(&self, k: usize, rng: &mut ChaCha8Rng, n: usize) -> (usize, Vec<String>) {
        let z = self.cover.boxes[k].bx.center();
        match self.cover.locate(&self.map.apply_unchecked(z)) {
            Some(j) => (1, self.step_checks(&z, k, j, rng, n)),
            None => (0, Vec::new()),
        }
    }

    fn run(&self, opts: &OracleOptions) -> OracleReport {
        let n_steps = self.cert.n;
        let mut rep = (0..opts.segments)
            .into_par_iter()
            .map(|i| self.segment(i, opts, n_steps))
            .collect::<Vec<_>>()
            .into_iter()
            .fold(OracleReport::default(), OracleReport::merge);
        let centres: Vec<(usize, Vec<String>)> = self
            .verified_positions
            .par_iter()
            .map(|&k| {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(k as u64));
                self.centre_check(k, &mut rng, opts.vectors_per_step.max(4))
            })
            .collect();
        for (c, bad) in centres {
            rep.centre_checks += c;
            rep.violations += bad.len();
            rep.examples.extend(bad);
        }
        rep.examples.truncate(8);
        rep
    }
}

/// Runs the pointwise oracle on `opts.segments` segments of length N plus a
/// centre check on every Verified box.
pub fn sampling_oracle(map: &HenonMap, cert: &SplittingCertificate, opts: &OracleOptions) -> OracleReport {
    let boxes: Vec<GridBox> = cert
        .boxes
        .iter()
        .map(|b| GridBox {
            index: b.index,
            bx: ComplexBox::from_bounds(b.bounds),
        })
        .collect();
    let mut order: Vec<usize> = (0..boxes.len()).collect();
    order.sort_by_key(|&k| boxes[k].index);
    let cover = JuliaCover::from_boxes(cert.params.radius, cert.params.level, boxes, false);
    let frames = order
        .iter()
        .map(|&k| {
            let v = cert.boxes[k].frame;
            Mat2C::from_columns(v, v.perp())
        })
        .collect();
    let verified_positions = (0..cover.len())
        .filter(|&k| cert.boxes[order[k]].status.is_verified())
        .collect();
    Ctx {
        map,
        cert,
        cover,
        pos: order,
        frames,
        verified_positions,
    }
    .run(opts)
}
