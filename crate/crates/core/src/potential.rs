//! Green functions, forward/backward membership, slice sampling and the
//! undecided-area bound for J⁺ on a slice.
//!
//! The escape-rate limit d^{-n} log⁺‖f^{±n}(z)‖ uses the sup norm. Once an
//! orbit is in V⁺ the first coordinate grows like L·x^d, where L collects the
//! leading coefficients of the components, so d^{-n}(log‖fⁿz‖ + log|L|/(d−1))
//! converges at a super-exponential rate. Adding that constant changes no
//! limit and lets the tol-based stopping rule fire after a few steps.

use crate::error::{HenonError, Result};
use crate::interval::{CInterval, ComplexBox};
use crate::linalg::{Point2C, C64};
use crate::map::{in_escape_region, Direction, HenonMap, OVERFLOW_MODULUS};
use crate::periodic::{find_periodic_orbits, OrbitSearch, OrbitType};
use crate::splitting::certify_traps;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const DEFAULT_MAX_ITER: usize = 400;
pub const DEFAULT_TOL: f64 = 1e-9;
pub use crate::map::{RECURRENCE_STEPS, RECURRENCE_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for GreenOptions {
    fn default() -> Self {
        GreenOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

/// Forward escape takes precedence over backward escape, so the tags are
/// exclusive. For non-invertible maps only the forward orbit is examined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MembershipTag {
    EscapesForward(usize),
    EscapesBackward(usize),
    BoundedBoth(usize),
}

impl MembershipTag {
    pub fn code(&self) -> &'static str {
        match self {
            MembershipTag::EscapesForward(_) => "escapes_forward",
            MembershipTag::EscapesBackward(_) => "escapes_backward",
            MembershipTag::BoundedBoth(_) => "bounded_both",
        }
    }
}

/// Map together with its filtration radius and the data needed to evaluate
/// potentials.
#[derive(Clone, Debug)]
pub struct Potential {
    map: HenonMap,
    radius: f64,
    degree: f64,
    corr_plus: f64,
    corr_minus: f64,
    attractors: Vec<Point2C>,
    traps: Vec<ComplexBox>,
}

impl Potential {
    pub fn new(map: &HenonMap) -> Result<Self> {
        Ok(Self::with_radius(map, map.filtration_radius()?.radius))
    }

    pub fn with_radius(map: &HenonMap, radius: f64) -> Self {
        let d = map.degree() as f64;
        let comps = map.components();
        let mut lead_plus = C64::new(1.0, 0.0);
        for c in comps {
            lead_plus = c.poly.leading() * lead_plus.powu(c.poly.degree() as u32);
        }
        let mut lead_minus = C64::new(1.0, 0.0);
        for c in comps.iter().rev() {
            lead_minus = c.poly.leading() / c.b * lead_minus.powu(c.poly.degree() as u32);
        }
        let corr = |l: C64| {
            let v = l.norm().ln() / (d - 1.0);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        };
        Potential {
            map: map.clone(),
            radius,
            degree: d,
            corr_plus: corr(lead_plus),
            corr_minus: corr(lead_minus),
            attractors: Vec::new(),
            traps: Vec::new(),
        }
    }

    /// Registers forward-invariant boxes; the area bound treats cells whose
    /// interval image lands in one as decided.
    pub fn with_traps(mut self, traps: Vec<ComplexBox>) -> Self {
        self.traps = traps;
        self
    }

    /// Finds attracting cycles of period ≤ `max_period` and registers them
    /// together with certified trap boxes around their points.
    pub fn detect_attractors(mut self, max_period: usize, seeds: usize) -> Result<Self> {
        let mut search = OrbitSearch::new(&self.map, seeds)?;
        search.radius = self.radius;
        let mut orbits = Vec::new();
        for n in 1..=max_period {
            orbits.extend(
                find_periodic_orbits(&self.map, n, &search)?
                    .into_iter()
                    .filter(|o| o.kind == OrbitType::Attracting),
            );
        }
        self.attractors = orbits.iter().flat_map(|o| o.points.iter().copied()).collect();
        self.traps = certify_traps(&self.map, &orbits);
        Ok(self)
    }

    pub fn map(&self) -> &HenonMap {
        &self.map
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn attractors(&self) -> &[Point2C] {
        &self.attractors
    }

    pub fn traps(&self) -> &[ComplexBox] {
        &self.traps
    }

    fn check_direction(&self, dir: Direction) -> Result<()> {
        if dir == Direction::Backward && !self.map.is_invertible() {
            Err(HenonError::NotInvertible)
        } else {
            Ok(())
        }
    }

    fn corrected_log(&self, w: &Point2C, dir: Direction) -> f64 {
        let c = match dir {
            Direction::Forward => self.corr_plus,
            Direction::Backward => self.corr_minus,
        };
        (w.sup_norm().ln() + c).max(0.0)
    }

    /// G± at `z`; exactly 0 when the orbit never reaches V± within max_iter.
    pub fn green(&self, z: Point2C, dir: Direction, opts: &GreenOptions) -> Result<f64> {
        self.check_direction(dir)?;
        if !z.is_finite() {
            return Err(HenonError::Domain(format!("{z:?}")));
        }
        Ok(self.green_unchecked(z, dir, opts))
    }

    /// Saddle cycles are unstable under floating-point iteration in both
    /// directions, so their orbits drift into V± after a few dozen steps.
    /// A forward return to the start identifies them before the drift.
    pub fn is_recurrent(&self, z: Point2C) -> bool {
        let tol = RECURRENCE_TOL * z.sup_norm().max(1.0);
        let mut w = z;
        for _ in 0..RECURRENCE_STEPS {
            w = self.map.apply_unchecked(w);
            if in_escape_region(&w, self.radius, Direction::Forward) {
                return false;
            }
            if w.dist(&z) <= tol {
                return true;
            }
        }
        false
    }

    fn green_unchecked(&self, z: Point2C, dir: Direction, opts: &GreenOptions) -> f64 {
        if self.is_recurrent(z) {
            return 0.0;
        }
        let mut w = z;
        let mut scale = 1.0;
        let mut prev: Option<f64> = None;
        for n in 0..=opts.max_iter {
            if in_escape_region(&w, self.radius, dir) {
                let g = scale * self.corrected_log(&w, dir);
                if let Some(p) = prev {
                    if (g - p).abs() < opts.tol {
                        return g;
                    }
                }
                prev = Some(g);
            }
            if n == opts.max_iter {
                break;
            }
            let next = self.map.step(w, dir);
            if !next.is_finite() || next.sup_norm() > OVERFLOW_MODULUS {
                return prev.unwrap_or_else(|| scale * w.sup_norm().ln().max(0.0));
            }
            w = next;
            scale /= self.degree;
        }
        prev.unwrap_or(0.0)
    }

    /// The raw approximants d^{∓n} log⁺‖f^{±n}(z)‖ for n = 0..=n_max,
    /// stopping early at overflow.
    pub fn green_sequence(&self, z: Point2C, dir: Direction, n_max: usize) -> Result<Vec<f64>> {
        self.check_direction(dir)?;
        let mut out = Vec::with_capacity(n_max + 1);
        let mut w = z;
        let mut scale = 1.0;
        for _ in 0..=n_max {
            if !w.is_finite() || w.sup_norm() > OVERFLOW_MODULUS {
                break;
            }
            out.push(scale * w.sup_norm().ln().max(0.0));
            w = self.map.step(w, dir);
            scale /= self.degree;
        }
        Ok(out)
    }

    pub fn classify(&self, z: Point2C, depth: usize) -> MembershipTag {
        let m = &self.map;
        if self.is_recurrent(z) {
            return MembershipTag::BoundedBoth(depth);
        }
        if let Some(n) = m.escape_time_unchecked(z, self.radius, depth, Direction::Forward) {
            return MembershipTag::EscapesForward(n);
        }
        if m.is_invertible() {
            if let Some(n) = m.escape_time_unchecked(z, self.radius, depth, Direction::Backward) {
                return MembershipTag::EscapesBackward(n);
            }
        }
        MembershipTag::BoundedBoth(depth)
    }
}

/// G± with a fresh filtration radius; see [`Potential::green`].
pub fn green(map: &HenonMap, z: Point2C, dir: Direction, tol: f64, max_iter: usize) -> Result<f64> {
    Potential::new(map)?.green(z, dir, &GreenOptions { tol, max_iter })
}

pub fn classify_membership(map: &HenonMap, z: Point2C, depth: usize) -> Result<MembershipTag> {
    Ok(Potential::new(map)?.classify(z, depth))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SliceAxis {
    /// {x = value}, y ranges over the window.
    FixX,
    /// {y = value}, x ranges over the window.
    FixY,
}

/// An affine complex line {x = c} or {y = c}, with a rectangular window for
/// the free coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceSpec {
    pub axis: SliceAxis,
    pub value: C64,
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl SliceSpec {
    pub fn horizontal(y0: C64, re: (f64, f64), im: (f64, f64)) -> Self {
        SliceSpec {
            axis: SliceAxis::FixY,
            value: y0,
            re,
            im,
        }
    }

    /// Parses `y=<c>` or `x=<c>`, where `<c>` is `a`, `a+bi` or `a-bi`.
    pub fn parse(text: &str, re: (f64, f64), im: (f64, f64)) -> Result<Self> {
        let bad = || HenonError::InvalidArgument(format!("bad slice {text:?}; expected y=<c> or x=<c>"));
        let (lhs, rhs) = text.split_once('=').ok_or_else(bad)?;
        let axis = match lhs.trim() {
            "y" => SliceAxis::FixY,
            "x" => SliceAxis::FixX,
            _ => return Err(bad()),
        };
        let value = parse_complex_literal(rhs.trim()).ok_or_else(bad)?;
        Ok(SliceSpec { axis, value, re, im })
    }

    pub fn validate(&self) -> Result<()> {
        let w = self.re.1 - self.re.0;
        let h = self.im.1 - self.im.0;
        if !(w > 0.0 && h > 0.0 && w.is_finite() && h.is_finite() && self.value.is_finite()) {
            return Err(HenonError::InvalidArgument("slice window has zero area".into()));
        }
        Ok(())
    }

    pub fn point(&self, u: C64) -> Point2C {
        match self.axis {
            SliceAxis::FixY => Point2C::new(u, self.value),
            SliceAxis::FixX => Point2C::new(self.value, u),
        }
    }

    pub fn area(&self) -> f64 {
        (self.re.1 - self.re.0) * (self.im.1 - self.im.0)
    }

    /// Free coordinate at fractional window position (s, t), t = 0 at the top.
    pub fn at(&self, s: f64, t: f64) -> C64 {
        C64::new(
            self.re.0 + s * (self.re.1 - self.re.0),
            self.im.1 - t * (self.im.1 - self.im.0),
        )
    }

    pub fn describe(&self) -> String {
        let axis = match self.axis {
            SliceAxis::FixX => "x",
            SliceAxis::FixY => "y",
        };
        format!("{axis}={}{:+}i", self.value.re, self.value.im)
    }
}

/// Parses `a`, `a+bi`, `a-bi` or `bi`.
pub fn parse_complex_literal(s: &str) -> Option<C64> {
    let s = s.replace(' ', "");
    if let Some(body) = s.strip_suffix('i') {
        // Split at the last sign that is not an exponent sign or leading.
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        return match split {
            Some(k) => {
                let re = body[..k].parse().ok()?;
                let im_text = &body[k..];
                let im = match im_text {
                    "+" => 1.0,
                    "-" => -1.0,
                    t => t.parse().ok()?,
                };
                Some(C64::new(re, im))
            }
            None => {
                let im = match body {
                    "" | "+" => 1.0,
                    "-" => -1.0,
                    t => t.parse().ok()?,
                };
                Some(C64::new(0.0, im))
            }
        };
    }
    s.parse().ok().map(|re| C64::new(re, 0.0))
}

/// Per-pixel Green values on a slice, row-major with row 0 at the top.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenField {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
    pub slice: SliceSpec,
    pub direction: Direction,
    pub iter_depth: usize,
}

impl GreenField {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.width + i]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SliceSample {
    pub plus: GreenField,
    /// Absent for non-invertible maps.
    pub minus: Option<GreenField>,
    pub tags: Vec<MembershipTag>,
}

impl Potential {
    /// Samples G⁺, G⁻ and membership at pixel centres of a square grid.
    /// Rows are evaluated in parallel and assembled in order.
    pub fn sample_slice(
        &self,
        slice: &SliceSpec,
        resolution: usize,
        depth: usize,
        opts: &GreenOptions,
    ) -> Result<SliceSample> {
        slice.validate()?;
        if resolution == 0 {
            return Err(HenonError::InvalidArgument("resolution must be ≥ 1".into()));
        }
        let n = resolution;
        let invertible = self.map.is_invertible();
        let rows: Vec<Vec<(f64, f64, MembershipTag)>> = (0..n)
            .into_par_iter()
            .map(|j| {
                (0..n)
                    .map(|i| {
                        let u = slice.at((i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64);
                        let z = slice.point(u);
                        let gp = self.green_unchecked(z, Direction::Forward, opts);
                        let gm = if invertible {
                            self.green_unchecked(z, Direction::Backward, opts)
                        } else {
                            f64::NAN
                        };
                        (gp, gm, self.classify(z, depth))
                    })
                    .collect()
            })
            .collect();
        let flat: Vec<(f64, f64, MembershipTag)> = rows.into_iter().flatten().collect();
        let field = |dir, values| GreenField {
            width: n,
            height: n,
            values,
            slice: *slice,
            direction: dir,
            iter_depth: opts.max_iter,
        };
        Ok(SliceSample {
            plus: field(Direction::Forward, flat.iter().map(|t| t.0).collect()),
            minus: invertible.then(|| field(Direction::Backward, flat.iter().map(|t| t.1).collect())),
            tags: flat.iter().map(|t| t.2).collect(),
        })
    }

    /// Area of the undecided pixels at each requested quadtree depth, an
    /// upper bound for the area of J⁺ on the slice window (and, with no
    /// traps registered, for K⁺).
    ///
    /// Depth k grids the window into 2^k × 2^k cells. Only cells undecided at
    /// depth k are split for depth k + 1, so the sequence is non-increasing.
    pub fn area_estimate(
        &self,
        slice: &SliceSpec,
        depths: &[usize],
        opts: &GreenOptions,
    ) -> Result<Vec<f64>> {
        slice.validate()?;
        let max_depth = depths.iter().copied().max().unwrap_or(0);
        if max_depth > 24 {
            return Err(HenonError::InvalidArgument("area depth above 24".into()));
        }
        let mut cells: Vec<(u64, u64)> = vec![(0, 0)];
        let mut areas = vec![0.0; max_depth + 1];
        for depth in 0..=max_depth {
            let scale = (1u64 << depth) as f64;
            cells = cells
                .par_iter()
                .filter(|&&(i, j)| !self.cell_decided(slice, i, j, scale, opts))
                .copied()
                .collect();
            areas[depth] = cells.len() as f64 * slice.area() / (scale * scale);
            if depth < max_depth {
                cells = cells
                    .iter()
                    .flat_map(|&(i, j)| {
                        [(2 * i, 2 * j), (2 * i + 1, 2 * j), (2 * i, 2 * j + 1), (2 * i + 1, 2 * j + 1)]
                    })
                    .collect();
            }
        }
        Ok(depths.iter().map(|&d| areas[d]).collect())
    }

    /// A cell is decided when the disk-arithmetic image of the whole cell
    /// provably enters V⁺ or a trap box within `opts.max_iter` steps.
    fn cell_decided(&self, slice: &SliceSpec, i: u64, j: u64, scale: f64, opts: &GreenOptions) -> bool {
        let a = slice.at(i as f64 / scale, j as f64 / scale);
        let b = slice.at((i + 1) as f64 / scale, (j + 1) as f64 / scale);
        let free = Disk::covering(a, b);
        let fixed = Disk::point(slice.value);
        let (mut x, mut y) = match slice.axis {
            SliceAxis::FixY => (free, fixed),
            SliceAxis::FixX => (fixed, free),
        };
        let limit = 4.0 * self.radius;
        for _ in 0..=opts.max_iter {
            if x.mig() >= self.radius.max(y.mag()) || self.traps.iter().any(|t| x.inside(&t.x) && y.inside(&t.y)) {
                return true;
            }
            if !(x.r <= limit && y.r <= limit) {
                return false;
            }
            for comp in self.map.components() {
                let px = comp
                    .poly
                    .coeffs()
                    .iter()
                    .rev()
                    .fold(Disk::point(C64::new(0.0, 0.0)), |acc, &c| acc.mul(&x).add(&Disk::point(c)));
                let nx = px.add(&y.mul(&Disk::point(-comp.b)));
                y = x;
                x = nx;
            }
        }
        false
    }
}

/// Closed complex disk; the arithmetic widens radii by a relative slack of
/// a few ulps per operation to absorb rounding of the centres.
#[derive(Clone, Copy, Debug)]
struct Disk {
    c: C64,
    r: f64,
}

const DISK_SLACK: f64 = 8.0 * f64::EPSILON;

impl Disk {
    fn point(c: C64) -> Self {
        Disk { c, r: 0.0 }
    }

    fn covering(a: C64, b: C64) -> Self {
        Disk::widen((a + b) * 0.5, 0.5 * (a - b).norm())
    }

    fn widen(c: C64, r: f64) -> Self {
        Disk { c, r: r * (1.0 + DISK_SLACK) + DISK_SLACK * c.norm() }
    }

    fn add(&self, o: &Disk) -> Disk {
        Disk::widen(self.c + o.c, self.r + o.r)
    }

    fn mul(&self, o: &Disk) -> Disk {
        Disk::widen(self.c * o.c, self.c.norm() * o.r + o.c.norm() * self.r + self.r * o.r)
    }

    fn mag(&self) -> f64 {
        self.c.norm() + self.r
    }

    fn mig(&self) -> f64 {
        (self.c.norm() - self.r).max(0.0)
    }

    fn inside(&self, iv: &CInterval) -> bool {
        iv.re.lo <= self.c.re - self.r
            && self.c.re + self.r <= iv.re.hi
            && iv.im.lo <= self.c.im - self.r
            && self.c.im + self.r <= iv.im.hi
    }
}

/// Colours a slice sample: escaping pixels shade by G⁺, backward-only
/// escapes are blue, bounded pixels are black.
pub fn render_rgb(s: &SliceSample) -> Vec<u8> {
    let mut out = Vec::with_capacity(3 * s.tags.len());
    for (k, tag) in s.tags.iter().enumerate() {
        let px = match tag {
            MembershipTag::BoundedBoth(_) => [0, 0, 0],
            MembershipTag::EscapesBackward(_) => [30, 60, 170],
            MembershipTag::EscapesForward(_) => {
                let g = s.plus.values[k];
                let v = (255.0 * (1.0 - (-4.0 * g).exp())).round() as u8;
                [v, (0.85 * v as f64) as u8, (0.55 * v as f64) as u8]
            }
        };
        out.extend_from_slice(&px);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(c: f64, b: f64) -> HenonMap {
        HenonMap::real(&[c, 0.0, 1.0], b).unwrap()
    }

    #[test]
    fn basin_point_has_zero_potential() {
        let f = quad(0.0, 0.05);
        let pot = Potential::new(&f).unwrap();
        let g = pot.green(Point2C::real(0.0, 0.0), Direction::Forward, &GreenOptions::default());
        assert_eq!(g.unwrap(), 0.0);
    }

    #[test]
    fn asymptotic_log() {
        let f = quad(0.0, 0.05);
        let pot = Potential::new(&f).unwrap();
        let g = pot
            .green(Point2C::real(1e6, 0.0), Direction::Forward, &GreenOptions::default())
            .unwrap();
        assert!((g - 1e6f64.ln()).abs() < 1e-3, "{g}");
    }

    #[test]
    fn leading_coefficient_asymptotics() {
        // G⁺(x, 0) − log|x| → log|a|/(d − 1) for leading coefficient a.
        let f = HenonMap::real(&[0.0, 0.0, 3.0], 0.1).unwrap();
        let pot = Potential::new(&f).unwrap();
        let x = 1e5;
        let g = pot
            .green(Point2C::real(x, 0.0), Direction::Forward, &GreenOptions::default())
            .unwrap();
        assert!((g - x.ln() - 3f64.ln()).abs() < 1e-3);
    }

    #[test]
    fn functional_equation_both_directions() {
        let f = quad(-1.0, 0.2);
        let pot = Potential::new(&f).unwrap();
        let o = GreenOptions::default();
        let z = Point2C::new(C64::new(1.3, 0.9), C64::new(-0.4, 0.2));
        let gp = pot.green(z, Direction::Forward, &o).unwrap();
        let gp1 = pot.green(f.apply(z).unwrap(), Direction::Forward, &o).unwrap();
        assert!(gp > 0.0);
        assert!((gp1 - 2.0 * gp).abs() < 1e-6);
        let gm = pot.green(z, Direction::Backward, &o).unwrap();
        let gm1 = pot.green(f.apply(z).unwrap(), Direction::Backward, &o).unwrap();
        assert!(gm > 0.0);
        assert!((gm1 - 0.5 * gm).abs() < 1e-6);
    }

    #[test]
    fn membership_tags() {
        let f = quad(0.0, 0.05);
        let pot = Potential::new(&f).unwrap();
        let r = pot.radius();
        assert_eq!(pot.classify(Point2C::real(r + 1.0, 0.0), 50), MembershipTag::EscapesForward(0));
        assert_eq!(pot.classify(Point2C::real(1.05, 1.05), 200), MembershipTag::BoundedBoth(200));
        let tag = pot.classify(Point2C::real(0.01, 0.02), 200);
        assert!(matches!(tag, MembershipTag::EscapesBackward(n) if n > 0));
    }

    #[test]
    fn degenerate_map_has_no_backward_potential() {
        let f = HenonMap::degenerate(vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)], C64::new(0.0, 0.0)).unwrap();
        let pot = Potential::new(&f).unwrap();
        assert!(pot.green(Point2C::real(0.5, 0.0), Direction::Backward, &GreenOptions::default()).is_err());
        assert_eq!(pot.classify(Point2C::real(0.5, 0.0), 100), MembershipTag::BoundedBoth(100));
    }

    #[test]
    fn slice_parsing() {
        let w = (-1.0, 1.0);
        let s = SliceSpec::parse("y=0", w, w).unwrap();
        assert_eq!(s.axis, SliceAxis::FixY);
        assert_eq!(s.value, C64::new(0.0, 0.0));
        let s = SliceSpec::parse("x=0.5-1e-3i", w, w).unwrap();
        assert_eq!(s.axis, SliceAxis::FixX);
        assert_eq!(s.value, C64::new(0.5, -1e-3));
        assert_eq!(SliceSpec::parse("y=2i", w, w).unwrap().value, C64::new(0.0, 2.0));
        assert!(SliceSpec::parse("z=1", w, w).is_err());
        assert!(SliceSpec::parse("y=0", (1.0, 1.0), w).unwrap().validate().is_err());
    }

    #[test]
    fn area_bound_is_monotone() {
        let f = quad(-6.0, 0.001);
        let pot = Potential::new(&f).unwrap();
        let s = SliceSpec::horizontal(C64::new(0.0, 0.0), (-4.0, 4.0), (-4.0, 4.0));
        let a = pot.area_estimate(&s, &[2, 3, 4, 5, 6], &GreenOptions::default()).unwrap();
        assert!(a.windows(2).all(|w| w[1] <= w[0]), "{a:?}");
    }

    #[test]
    fn area_bound_shrinks_on_circle() {
        let f = HenonMap::degenerate(vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)], C64::new(0.0, 0.0)).unwrap();
        let pot = Potential::new(&f).unwrap().detect_attractors(1, 20).unwrap();
        assert!(!pot.traps().is_empty());
        let s = SliceSpec::horizontal(C64::new(0.0, 0.0), (-2.0, 2.0), (-2.0, 2.0));
        let a = pot.area_estimate(&s, &[4, 6, 8], &GreenOptions::default()).unwrap();
        assert!(a.windows(2).all(|w| w[1] < w[0]), "{a:?}");
        // The annulus of cells meeting |x| = 1 at depth 8 already has area ≈ 0.4.
        assert!(a[2] < 0.6, "{a:?}");
    }
}
