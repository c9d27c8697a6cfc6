//! Outward-rounded interval arithmetic over R and C, boxes in C², and
//! interval enclosures of a Hénon map and its differential.
//!
//! Rounding model: every elementary operation widens its result by
//! [`SLACK_ULPS`] units in the last place on each side instead of switching
//! the FPU rounding mode. Results are rigorous under that slack model.

use crate::linalg::{Mat2C, Point2C, C64};
use crate::map::{HenonComponent, HenonMap};
use crate::poly::Poly;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

pub const SLACK_ULPS: u32 = 4;

#[inline]
fn down(mut x: f64) -> f64 {
    for _ in 0..SLACK_ULPS {
        x = x.next_down();
    }
    x
}

#[inline]
fn up(mut x: f64) -> f64 {
    for _ in 0..SLACK_ULPS {
        x = x.next_up();
    }
    x
}

/// Closed real interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi || lo.is_nan() || hi.is_nan(), "[{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub const fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// Point value widened by the slack model (for rounded constants).
    pub fn rounded(x: f64) -> Self {
        Interval::new(down(x), up(x))
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, o: &Interval) -> bool {
        self.lo <= o.lo && o.hi <= self.hi
    }

    pub fn intersects(&self, o: &Interval) -> bool {
        self.lo <= o.hi && o.lo <= self.hi
    }

    pub fn intersect(&self, o: &Interval) -> Interval {
        Interval::new(self.lo.max(o.lo), self.hi.min(o.hi).max(self.lo.max(o.lo)))
    }

    pub fn hull(&self, o: &Interval) -> Interval {
        Interval::new(self.lo.min(o.lo), self.hi.max(o.hi))
    }

    /// max |x| over the interval.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// min |x| over the interval.
    pub fn mig(&self) -> f64 {
        if self.lo <= 0.0 && 0.0 <= self.hi {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn sqr(&self) -> Interval {
        let a = self.lo * self.lo;
        let b = self.hi * self.hi;
        if self.lo <= 0.0 && 0.0 <= self.hi {
            Interval::new(0.0, up(a.max(b)))
        } else {
            Interval::new(down(a.min(b)), up(a.max(b)))
        }
    }

    pub fn scale(&self, s: f64) -> Interval {
        let a = self.lo * s;
        let b = self.hi * s;
        Interval::new(down(a.min(b)), up(a.max(b)))
    }

    /// Split at the midpoint.
    pub fn bisect(&self) -> (Interval, Interval) {
        let m = self.mid();
        (Interval::new(self.lo, m), Interval::new(m, self.hi))
    }
}

impl Add for Interval {
    type Output = Interval;
    #[inline]
    fn add(self, o: Interval) -> Interval {
        Interval::new(down(self.lo + o.lo), up(self.hi + o.hi))
    }
}

impl Sub for Interval {
    type Output = Interval;
    #[inline]
    fn sub(self, o: Interval) -> Interval {
        Interval::new(down(self.lo - o.hi), up(self.hi - o.lo))
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval::new(-self.hi, -self.lo)
    }
}

impl Mul for Interval {
    type Output = Interval;
    #[inline]
    fn mul(self, o: Interval) -> Interval {
        let p = [
            self.lo * o.lo,
            self.lo * o.hi,
            self.hi * o.lo,
            self.hi * o.hi,
        ];
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval::new(down(lo), up(hi))
    }
}

/// Rectangle `re × i·im` in C.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CInterval {
    pub re: Interval,
    pub im: Interval,
}

impl CInterval {
    pub fn new(re: Interval, im: Interval) -> Self {
        CInterval { re, im }
    }

    pub fn point(z: C64) -> Self {
        CInterval::new(Interval::point(z.re), Interval::point(z.im))
    }

    pub fn rounded(z: C64) -> Self {
        CInterval::new(Interval::rounded(z.re), Interval::rounded(z.im))
    }

    pub fn mid(&self) -> C64 {
        C64::new(self.re.mid(), self.im.mid())
    }

    pub fn width(&self) -> f64 {
        self.re.width().max(self.im.width())
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn contains(&self, z: C64) -> bool {
        self.re.contains(z.re) && self.im.contains(z.im)
    }

    pub fn contains_interval(&self, o: &CInterval) -> bool {
        self.re.contains_interval(&o.re) && self.im.contains_interval(&o.im)
    }

    pub fn intersects(&self, o: &CInterval) -> bool {
        self.re.intersects(&o.re) && self.im.intersects(&o.im)
    }

    pub fn intersect(&self, o: &CInterval) -> CInterval {
        CInterval::new(self.re.intersect(&o.re), self.im.intersect(&o.im))
    }

    /// Upper bound of |z| over the rectangle.
    pub fn mag(&self) -> f64 {
        up(self.re.mag().hypot(self.im.mag()))
    }

    /// Lower bound of |z| over the rectangle.
    pub fn mig(&self) -> f64 {
        down(self.re.mig().hypot(self.im.mig())).max(0.0)
    }

    /// Multiply by a point constant enclosed as an interval.
    pub fn mul_point(&self, c: C64) -> CInterval {
        *self * CInterval::point(c)
    }
}

impl Add for CInterval {
    type Output = CInterval;
    #[inline]
    fn add(self, o: CInterval) -> CInterval {
        CInterval::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for CInterval {
    type Output = CInterval;
    #[inline]
    fn sub(self, o: CInterval) -> CInterval {
        CInterval::new(self.re - o.re, self.im - o.im)
    }
}

impl Neg for CInterval {
    type Output = CInterval;
    fn neg(self) -> CInterval {
        CInterval::new(-self.re, -self.im)
    }
}

impl Mul for CInterval {
    type Output = CInterval;
    #[inline]
    fn mul(self, o: CInterval) -> CInterval {
        CInterval::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

/// Horner evaluation of `p` over the rectangle `x`.
pub fn horner(p: &Poly, x: &CInterval) -> CInterval {
    let mut acc = CInterval::point(p.leading());
    for &c in p.coeffs().iter().rev().skip(1) {
        acc = acc * *x + CInterval::point(c);
    }
    acc
}

/// Complex square with the dependency between factors taken into account.
pub fn csqr(x: &CInterval) -> CInterval {
    CInterval::new(x.re.sqr() - x.im.sqr(), (x.re * x.im).scale(2.0))
}

/// Natural interval extension of `p` over the rectangle `x`.
///
/// Quadratics use the exact complex square; higher degrees use Horner. Both
/// are inclusion isotone, which the refinement properties of box covers
/// rely on. (A centered mean-value form is tighter on wide boxes but is not
/// isotone.)
pub fn enclose_poly(p: &Poly, x: &CInterval) -> CInterval {
    if p.degree() == 2 {
        let c = p.coeffs();
        return csqr(x).mul_point(c[2]) + x.mul_point(c[1]) + CInterval::point(c[0]);
    }
    horner(p, x)
}

/// Axis-aligned box in C²: four real intervals (re x, im x, re y, im y).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexBox {
    pub x: CInterval,
    pub y: CInterval,
}

impl ComplexBox {
    pub fn new(x: CInterval, y: CInterval) -> Self {
        ComplexBox { x, y }
    }

    pub fn from_bounds(b: [[f64; 2]; 4]) -> Self {
        ComplexBox::new(
            CInterval::new(Interval::new(b[0][0], b[0][1]), Interval::new(b[1][0], b[1][1])),
            CInterval::new(Interval::new(b[2][0], b[2][1]), Interval::new(b[3][0], b[3][1])),
        )
    }

    pub fn bounds(&self) -> [[f64; 2]; 4] {
        let iv = self.intervals();
        [
            [iv[0].lo, iv[0].hi],
            [iv[1].lo, iv[1].hi],
            [iv[2].lo, iv[2].hi],
            [iv[3].lo, iv[3].hi],
        ]
    }

    pub fn point(z: Point2C) -> Self {
        ComplexBox::new(CInterval::point(z.x), CInterval::point(z.y))
    }

    /// The closed bidisk-enclosing cube [−r, r]⁴.
    pub fn cube(r: f64) -> Self {
        let i = Interval::new(-r, r);
        ComplexBox::new(CInterval::new(i, i), CInterval::new(i, i))
    }

    pub fn intervals(&self) -> [Interval; 4] {
        [self.x.re, self.x.im, self.y.re, self.y.im]
    }

    pub fn from_intervals(iv: [Interval; 4]) -> Self {
        ComplexBox::new(CInterval::new(iv[0], iv[1]), CInterval::new(iv[2], iv[3]))
    }

    /// Maximum interval width.
    pub fn width(&self) -> f64 {
        self.intervals().iter().map(|i| i.width()).fold(0.0, f64::max)
    }

    /// Euclidean diagonal in R⁴.
    pub fn diagonal(&self) -> f64 {
        self.intervals()
            .iter()
            .map(|i| i.width() * i.width())
            .sum::<f64>()
            .sqrt()
    }

    /// Lebesgue 4-volume.
    pub fn volume(&self) -> f64 {
        self.intervals().iter().map(|i| i.width()).product()
    }

    pub fn center(&self) -> Point2C {
        Point2C::new(self.x.mid(), self.y.mid())
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn contains(&self, z: &Point2C) -> bool {
        self.x.contains(z.x) && self.y.contains(z.y)
    }

    pub fn contains_box(&self, o: &ComplexBox) -> bool {
        self.x.contains_interval(&o.x) && self.y.contains_interval(&o.y)
    }

    pub fn intersects(&self, o: &ComplexBox) -> bool {
        self.x.intersects(&o.x) && self.y.intersects(&o.y)
    }

    /// Point of the box at fractional coordinates `t ∈ [0,1]⁴`.
    pub fn at(&self, t: [f64; 4]) -> Point2C {
        let iv = self.intervals();
        let v: Vec<f64> = iv
            .iter()
            .zip(t)
            .map(|(i, s)| (i.lo + s * i.width()).min(i.hi))
            .collect();
        Point2C::from_real4([v[0], v[1], v[2], v[3]])
    }

    /// The 16 children obtained by halving every coordinate.
    pub fn subdivide(&self) -> [ComplexBox; 16] {
        let halves = self.intervals().map(|i| i.bisect());
        std::array::from_fn(|k| {
            let pick = |d: usize| {
                if (k >> d) & 1 == 0 {
                    halves[d].0
                } else {
                    halves[d].1
                }
            };
            ComplexBox::from_intervals([pick(0), pick(1), pick(2), pick(3)])
        })
    }
}

/// 2×2 matrix of complex rectangles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntervalMatrix2C {
    pub m: [[CInterval; 2]; 2],
}

impl IntervalMatrix2C {
    pub fn point(a: &Mat2C) -> Self {
        IntervalMatrix2C {
            m: [
                [CInterval::point(a.m[0][0]), CInterval::point(a.m[0][1])],
                [CInterval::point(a.m[1][0]), CInterval::point(a.m[1][1])],
            ],
        }
    }

    pub fn identity() -> Self {
        Self::point(&Mat2C::identity())
    }

    pub fn contains(&self, a: &Mat2C) -> bool {
        (0..2).all(|i| (0..2).all(|j| self.m[i][j].contains(a.m[i][j])))
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|z| z.is_finite())
    }
}

impl Mul for IntervalMatrix2C {
    type Output = IntervalMatrix2C;
    fn mul(self, o: IntervalMatrix2C) -> IntervalMatrix2C {
        let a = &self.m;
        let b = &o.m;
        IntervalMatrix2C {
            m: [
                [
                    a[0][0] * b[0][0] + a[0][1] * b[1][0],
                    a[0][0] * b[0][1] + a[0][1] * b[1][1],
                ],
                [
                    a[1][0] * b[0][0] + a[1][1] * b[1][0],
                    a[1][0] * b[0][1] + a[1][1] * b[1][1],
                ],
            ],
        }
    }
}

/// Interval evaluation data for one component: p and p′ enclosures.
#[derive(Clone, Debug)]
struct ComponentEnclosure {
    poly: Poly,
    dpoly: Poly,
    b: C64,
    inv_b: CInterval,
}

/// Precomputed derivative polynomials for interval evaluation of a map.
#[derive(Clone, Debug)]
pub struct MapEnclosure {
    parts: Vec<ComponentEnclosure>,
}

impl MapEnclosure {
    pub fn new(map: &HenonMap) -> Self {
        MapEnclosure {
            parts: map
                .components()
                .iter()
                .map(|c: &HenonComponent| {
                    let dpoly = c.poly.derivative();
                    let inv = if c.b.norm() > 0.0 {
                        CInterval::rounded(1.0 / c.b)
                    } else {
                        CInterval::point(C64::new(f64::NAN, f64::NAN))
                    };
                    ComponentEnclosure {
                        poly: c.poly.clone(),
                        dpoly,
                        b: c.b,
                        inv_b: inv,
                    }
                })
                .collect(),
        }
    }

    /// Interval image of a box.
    pub fn image(&self, bx: &ComplexBox) -> ComplexBox {
        self.parts.iter().fold(*bx, |b, c| {
            let px = enclose_poly(&c.poly, &b.x);
            ComplexBox::new(px - b.y.mul_point(c.b), b.x)
        })
    }

    /// Interval image under the inverse map.
    pub fn preimage(&self, bx: &ComplexBox) -> ComplexBox {
        self.parts.iter().rev().fold(*bx, |b, c| {
            let py = enclose_poly(&c.poly, &b.y);
            ComplexBox::new(b.y, (py - b.x) * c.inv_b)
        })
    }

    /// Image box and an interval matrix containing the differential at every
    /// point of the box.
    pub fn enclose(&self, bx: &ComplexBox) -> (ComplexBox, IntervalMatrix2C) {
        let mut b = *bx;
        let mut d = IntervalMatrix2C::identity();
        for c in &self.parts {
            let dpx = enclose_poly(&c.dpoly, &b.x);
            let local = IntervalMatrix2C {
                m: [
                    [dpx, CInterval::point(-c.b)],
                    [CInterval::point(C64::new(1.0, 0.0)), CInterval::point(C64::new(0.0, 0.0))],
                ],
            };
            d = local * d;
            let px = enclose_poly(&c.poly, &b.x);
            b = ComplexBox::new(px - b.y.mul_point(c.b), b.x);
        }
        (b, d)
    }
}

/// Interval image and differential enclosure of `map` over `bx`.
pub fn enclose(map: &HenonMap, bx: &ComplexBox) -> (ComplexBox, IntervalMatrix2C) {
    MapEnclosure::new(map).enclose(bx)
}
