//! Hénon maps `(x, y) ↦ (p(x) − b·y, x)` and finite compositions of them.
//!
//! The sign convention is fixed to `− b·y`; maps written with `+ b·y` are
//! obtained by negating `b`. Compositions apply their components left to
//! right, so `components[0]` acts first.

use crate::error::{HenonError, Result};
use crate::linalg::{Mat2C, Point2C, C64, ONE, ZERO};
use crate::poly::Poly;
use serde::{Deserialize, Serialize};

/// Coordinates beyond this modulus are counted as escaped.
pub const OVERFLOW_MODULUS: f64 = 1e150;
/// Points returning this close to themselves (relative to max(1, ‖z‖∞))
/// within [`RECURRENCE_STEPS`] forward steps are periodic to working
/// precision.
pub const RECURRENCE_TOL: f64 = 1e-9;
pub const RECURRENCE_STEPS: usize = 64;

/// One factor `(x, y) ↦ (p(x) − b·y, x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HenonComponent {
    pub poly: Poly,
    pub b: C64,
}

impl HenonComponent {
    #[inline]
    pub fn apply(&self, z: Point2C) -> Point2C {
        Point2C::new(self.poly.eval(z.x) - self.b * z.y, z.x)
    }

    #[inline]
    pub fn apply_inverse(&self, z: Point2C) -> Point2C {
        Point2C::new(z.y, (self.poly.eval(z.y) - z.x) / self.b)
    }

    #[inline]
    pub fn differential(&self, z: Point2C) -> Mat2C {
        let (_, dp) = self.poly.eval_d(z.x);
        Mat2C::new(dp, -self.b, ONE, ZERO)
    }

    /// f(z + h) − f(z), accurate relative to |h|.
    #[inline]
    pub fn difference(&self, z: Point2C, h: Point2C) -> Point2C {
        Point2C::new(self.poly.difference(z.x, h.x) - self.b * h.y, h.x)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HenonMap {
    components: Vec<HenonComponent>,
    invertible: bool,
}

/// Which way orbits are followed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Backward,
}

impl HenonMap {
    /// A single Hénon map. Rejects `deg p < 2`, a vanishing leading
    /// coefficient, non-finite coefficients and `b = 0`.
    pub fn new(coeffs: Vec<C64>, b: C64) -> Result<Self> {
        Self::compose(vec![(coeffs, b)])
    }

    /// Real-coefficient shorthand.
    pub fn real(coeffs: &[f64], b: f64) -> Result<Self> {
        Self::new(
            coeffs.iter().map(|&c| C64::new(c, 0.0)).collect(),
            C64::new(b, 0.0),
        )
    }

    /// Finite composition; the first pair acts first.
    pub fn compose(parts: Vec<(Vec<C64>, C64)>) -> Result<Self> {
        let components = Self::validate(parts, false)?;
        Ok(HenonMap {
            components,
            invertible: true,
        })
    }

    /// The degenerate endomorphism obtained by allowing `b = 0`. It supports
    /// forward evaluation only; every inverse operation reports
    /// [`HenonError::NotInvertible`].
    pub fn degenerate(coeffs: Vec<C64>, b: C64) -> Result<Self> {
        let components = Self::validate(vec![(coeffs, b)], true)?;
        let invertible = components.iter().all(|c| c.b != ZERO);
        Ok(HenonMap {
            components,
            invertible,
        })
    }

    fn validate(parts: Vec<(Vec<C64>, C64)>, allow_zero_b: bool) -> Result<Vec<HenonComponent>> {
        if parts.is_empty() {
            return Err(HenonError::InvalidMap("empty composition".into()));
        }
        parts
            .into_iter()
            .map(|(coeffs, b)| {
                if coeffs.iter().any(|c| !c.is_finite()) || !b.is_finite() {
                    return Err(HenonError::InvalidMap("non-finite coefficient".into()));
                }
                let poly = Poly::new(coeffs);
                if poly.degree() < 2 {
                    return Err(HenonError::InvalidMap(format!(
                        "polynomial degree {} < 2",
                        poly.degree()
                    )));
                }
                if b == ZERO && !allow_zero_b {
                    return Err(HenonError::InvalidMap(
                        "b = 0 is not an automorphism".into(),
                    ));
                }
                Ok(HenonComponent { poly, b })
            })
            .collect()
    }

    pub fn components(&self) -> &[HenonComponent] {
        &self.components
    }

    pub fn is_invertible(&self) -> bool {
        self.invertible
    }

    /// Product of the component degrees.
    pub fn degree(&self) -> usize {
        self.components.iter().map(|c| c.poly.degree()).product()
    }

    /// The constant complex Jacobian determinant.
    pub fn jacobian(&self) -> C64 {
        self.components.iter().map(|c| c.b).product()
    }

    /// |Jac f| < 1/(deg f)².
    pub fn substantially_dissipative(&self) -> bool {
        let d = self.degree() as f64;
        self.jacobian().norm() < 1.0 / (d * d)
    }

    /// The single polynomial when the map has one component.
    pub fn single(&self) -> Option<&HenonComponent> {
        match self.components.as_slice() {
            [c] => Some(c),
            _ => None,
        }
    }

    fn check(z: &Point2C) -> Result<()> {
        if z.is_finite() {
            Ok(())
        } else {
            Err(HenonError::Domain(format!("{z:?}")))
        }
    }

    pub fn apply(&self, z: Point2C) -> Result<Point2C> {
        Self::check(&z)?;
        Ok(self.apply_unchecked(z))
    }

    #[inline]
    pub fn apply_unchecked(&self, z: Point2C) -> Point2C {
        self.components.iter().fold(z, |w, c| c.apply(w))
    }

    pub fn apply_inverse(&self, z: Point2C) -> Result<Point2C> {
        Self::check(&z)?;
        if !self.invertible {
            return Err(HenonError::NotInvertible);
        }
        Ok(self.apply_inverse_unchecked(z))
    }

    #[inline]
    pub fn apply_inverse_unchecked(&self, z: Point2C) -> Point2C {
        self.components
            .iter()
            .rev()
            .fold(z, |w, c| c.apply_inverse(w))
    }

    /// The complex derivative at `z` (chain rule over the components).
    pub fn differential(&self, z: Point2C) -> Mat2C {
        let mut w = z;
        let mut d = Mat2C::identity();
        for c in &self.components {
            d = c.differential(w) * d;
            w = c.apply(w);
        }
        d
    }

    /// Derivative of the inverse map at `z`.
    pub fn inverse_differential(&self, z: Point2C) -> Result<Mat2C> {
        let pre = self.apply_inverse(z)?;
        self.differential(pre)
            .inverse()
            .ok_or(HenonError::NotInvertible)
    }

    /// f(z + h) − f(z) evaluated without cancellation.
    pub fn difference(&self, z: Point2C, h: Point2C) -> Point2C {
        let mut base = z;
        let mut delta = h;
        for c in &self.components {
            delta = c.difference(base, delta);
            base = c.apply(base);
        }
        delta
    }

    /// n-th iterate.
    pub fn iterate(&self, z: Point2C, n: usize) -> Point2C {
        (0..n).fold(z, |w, _| self.apply_unchecked(w))
    }

    pub fn step(&self, z: Point2C, dir: Direction) -> Point2C {
        match dir {
            Direction::Forward => self.apply_unchecked(z),
            Direction::Backward => self.apply_inverse_unchecked(z),
        }
    }

    /// Forward orbit `z, f z, …, f^n z`.
    pub fn orbit(&self, z: Point2C, n: usize) -> Vec<Point2C> {
        let mut out = Vec::with_capacity(n + 1);
        let mut w = z;
        out.push(w);
        for _ in 0..n {
            w = self.apply_unchecked(w);
            out.push(w);
        }
        out
    }

    /// Least p ≤ [`RECURRENCE_STEPS`] with ‖f^p(z) − z‖ ≤ [`RECURRENCE_TOL`]·max(1, ‖z‖∞).
    pub fn recurrence_period(&self, z: Point2C) -> Option<usize> {
        let tol = RECURRENCE_TOL * z.sup_norm().max(1.0);
        let mut w = z;
        for p in 1..=RECURRENCE_STEPS {
            w = self.apply_unchecked(w);
            if !w.is_finite() {
                return None;
            }
            if w.dist(&z) <= tol {
                return Some(p);
            }
        }
        None
    }

    /// Forward orbit of length steps + 1. For a recurrent base point the
    /// cycle is repeated exactly, since rounding would otherwise push a
    /// saddle orbit off the cycle.
    pub fn shadow_orbit(&self, z: Point2C, steps: usize) -> Vec<Point2C> {
        match self.recurrence_period(z) {
            Some(p) => {
                let cycle = self.orbit(z, p);
                (0..=steps).map(|k| cycle[k % p]).collect()
            }
            None => self.orbit(z, steps),
        }
    }

    /// Differential of f^n along an orbit, renormalised to avoid overflow.
    /// Returns the normalised product and the log of the dropped scale.
    pub fn differential_power(&self, z: Point2C, n: usize) -> (Mat2C, f64) {
        let mut w = z;
        let mut d = Mat2C::identity();
        let mut log_scale = 0.0;
        for _ in 0..n {
            d = self.differential(w) * d;
            w = self.apply_unchecked(w);
            let s = d.max_abs();
            if s > 1e100 || s < 1e-100 {
                d = d.scale(1.0 / s);
                log_scale += s.ln();
            }
        }
        (d, log_scale)
    }

    /// Least n ≤ `max_iter` with f^n(z) ∈ V⁺ (forward) or f^{-n}(z) ∈ V⁻
    /// (backward). Overflow counts as escape at that step.
    pub fn escape_time(
        &self,
        z: Point2C,
        radius: f64,
        max_iter: usize,
        dir: Direction,
    ) -> Result<Option<usize>> {
        Self::check(&z)?;
        if dir == Direction::Backward && !self.invertible {
            return Err(HenonError::NotInvertible);
        }
        Ok(self.escape_time_unchecked(z, radius, max_iter, dir))
    }

    pub(crate) fn escape_time_unchecked(
        &self,
        z: Point2C,
        radius: f64,
        max_iter: usize,
        dir: Direction,
    ) -> Option<usize> {
        let mut w = z;
        for n in 0..=max_iter {
            if in_escape_region(&w, radius, dir) {
                return Some(n);
            }
            if n == max_iter {
                break;
            }
            w = self.step(w, dir);
        }
        None
    }
}

/// Membership in V⁺ (forward) or V⁻ (backward), overflow included.
#[inline]
pub fn in_escape_region(w: &Point2C, radius: f64, dir: Direction) -> bool {
    if !w.is_finite() || w.sup_norm() > OVERFLOW_MODULUS {
        return true;
    }
    let ax = w.x.norm();
    let ay = w.y.norm();
    match dir {
        Direction::Forward => ax >= radius.max(ay),
        Direction::Backward => ay >= radius.max(ax),
    }
}

/// Filtration radius together with sampling diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiltrationData {
    pub radius: f64,
    /// Closed-form seed the search started from.
    pub seed_radius: f64,
    /// Number of sampled points per predicate.
    pub samples: usize,
}

/// Filtration regions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Bidisk,
    Vplus,
    Vminus,
}

impl FiltrationData {
    pub fn region(&self, z: &Point2C) -> Region {
        if in_escape_region(z, self.radius, Direction::Forward) {
            Region::Vplus
        } else if in_escape_region(z, self.radius, Direction::Backward) {
            Region::Vminus
        } else {
            Region::Bidisk
        }
    }
}

/// Options for the filtration search.
#[derive(Clone, Copy, Debug)]
pub struct FiltrationOptions {
    pub samples: usize,
    pub max_doublings: usize,
}

impl Default for FiltrationOptions {
    fn default() -> Self {
        FiltrationOptions {
            samples: 10_000,
            max_doublings: 40,
        }
    }
}

impl HenonMap {
    /// Closed-form starting radius 2(1 + |b| + Σ|cᵢ|)/|leading|, maximised
    /// over the components.
    pub fn filtration_seed(&self) -> f64 {
        self.components
            .iter()
            .map(|c| 2.0 * (1.0 + c.b.norm() + c.poly.l1_norm()) / c.poly.leading().norm())
            .fold(0.0, f64::max)
    }

    pub fn filtration_radius(&self) -> Result<FiltrationData> {
        self.filtration_radius_with(FiltrationOptions::default())
    }

    /// Smallest radius, up to a factor 2, for which the sampled filtration
    /// predicates hold: doubling of |x| on V⁺ (hence f(V⁺) ⊂ V⁺), doubling
    /// of |y| under f⁻¹ on V⁻, and f(Δ²_R) ⊂ Δ²_R ∪ V⁺.
    pub fn filtration_radius_with(&self, opts: FiltrationOptions) -> Result<FiltrationData> {
        let seed = self.filtration_seed();
        let mut r = seed;
        let mut doublings = 0;
        while !self.filtration_holds(r, opts.samples) {
            r *= 2.0;
            doublings += 1;
            if doublings > opts.max_doublings || !r.is_finite() {
                return Err(HenonError::FiltrationSearch {
                    radius: r,
                    detail: format!("predicates still failing after {doublings} doublings"),
                });
            }
        }
        // Shrink while the predicates keep holding.
        while r > 1e-6 && self.filtration_holds(0.5 * r, opts.samples) {
            r *= 0.5;
        }
        Ok(FiltrationData {
            radius: r,
            seed_radius: seed,
            samples: opts.samples,
        })
    }

    /// Sampled check of every filtration predicate at radius `r`.
    pub fn filtration_holds(&self, r: f64, samples: usize) -> bool {
        let pts = filtration_samples(samples);
        pts.iter().all(|&(s1, t1, s2, t2)| {
            // V⁺ point: |x| = r·(1 + 3 s1), |y| ≤ |x|.
            let ax = r * (1.0 + 3.0 * s1 * s1);
            let x = C64::from_polar(ax, std::f64::consts::TAU * t1);
            let y = C64::from_polar(ax * s2.sqrt(), std::f64::consts::TAU * t2);
            let img = self.apply_unchecked(Point2C::new(x, y));
            if !(img.x.norm() > 2.0 * ax) {
                return false;
            }
            if self.invertible {
                let z = Point2C::new(y, x);
                let pre = self.apply_inverse_unchecked(z);
                if !(pre.y.norm() > 2.0 * ax) {
                    return false;
                }
            }
            // Boundary of the bidisk.
            let bx = C64::from_polar(r * s2.sqrt(), std::f64::consts::TAU * t1);
            let by = C64::from_polar(r, std::f64::consts::TAU * t2);
            for w in [Point2C::new(bx, by), Point2C::new(by, bx)] {
                let img = self.apply_unchecked(w);
                let inside = img.x.norm() <= r && img.y.norm() <= r;
                if !inside && !in_escape_region(&img, r, Direction::Forward) {
                    return false;
                }
            }
            true
        })
    }
}

/// Deterministic low-discrepancy samples in [0,1)⁴ used by the filtration
/// checks; the first samples sit on the worst-case boundary |x| = |y| = R.
fn filtration_samples(n: usize) -> Vec<(f64, f64, f64, f64)> {
    let mut seq = crate::qrng::Kronecker::new(4);
    (0..n)
        .map(|i| {
            let u = seq.next_point();
            if i % 4 == 0 {
                (0.0, u[1], 1.0, u[3])
            } else {
                (u[0], u[1], u[2], u[3])
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(c: f64, b: f64) -> HenonMap {
        HenonMap::real(&[c, 0.0, 1.0], b).unwrap()
    }

    #[test]
    fn apply_examples() {
        let f = quad(0.0, 0.3);
        let w = f.apply(Point2C::real(1.0, 1.0)).unwrap();
        assert!((w.x - C64::new(0.7, 0.0)).norm() < 1e-15 && w.y == ONE);
        assert_eq!(f.apply(Point2C::real(0.0, 0.0)).unwrap(), Point2C::real(0.0, 0.0));
        let g = quad(-6.0, 0.01);
        let w = g.apply(Point2C::real(3.0, 0.0)).unwrap();
        assert_eq!(w, Point2C::real(3.0, 3.0));
    }

    #[test]
    fn inverse_examples() {
        let f = quad(0.0, 0.3);
        let z = f.apply_inverse(Point2C::real(0.7, 1.0)).unwrap();
        assert!(z.dist(&Point2C::real(1.0, 1.0)) < 1e-15);
        let back = f.apply_inverse(f.apply(Point2C::real(1.0, 1.0)).unwrap()).unwrap();
        assert!(back.dist(&Point2C::real(1.0, 1.0)) < 1e-12);
    }

    #[test]
    fn composition_inverse_right_to_left() {
        let f = HenonMap::compose(vec![
            (vec![C64::new(-1.0, 0.0), ZERO, ONE], C64::new(0.2, 0.0)),
            (vec![C64::new(0.3, 0.1), ZERO, ZERO, ONE], C64::new(-0.4, 0.2)),
        ])
        .unwrap();
        let z = Point2C::new(C64::new(0.3, -0.2), C64::new(0.1, 0.5));
        let w = f.components()[1].apply(f.components()[0].apply(z));
        assert_eq!(f.apply(z).unwrap(), w);
        assert!(f.apply_inverse(w).unwrap().dist(&z) < 1e-12);
        assert_eq!(f.degree(), 6);
        assert!((f.jacobian() - C64::new(0.2, 0.0) * C64::new(-0.4, 0.2)).norm() < 1e-16);
    }

    #[test]
    fn differential_example_and_det() {
        let f = quad(0.0, 0.3);
        let d = f.differential(Point2C::real(0.0, 0.0));
        assert_eq!(d, Mat2C::new(ZERO, C64::new(-0.3, 0.0), ONE, ZERO));
        assert!((d.det() - C64::new(0.3, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn chain_rule_for_second_iterate() {
        let f = quad(-0.7, 0.2);
        let z = Point2C::new(C64::new(0.4, 0.1), C64::new(-0.3, 0.2));
        let (d2, s) = f.differential_power(z, 2);
        assert_eq!(s, 0.0);
        let prod = f.differential(f.apply_unchecked(z)) * f.differential(z);
        for i in 0..2 {
            for j in 0..2 {
                assert!((d2.m[i][j] - prod.m[i][j]).norm() < 1e-10);
            }
        }
        // finite-difference check of the chain rule
        let h = 1e-6;
        let dz = Point2C::new(C64::new(h, 0.0), ZERO);
        let fd = (f.iterate(z + dz, 2) - f.iterate(z, 2)).scale(C64::new(1.0 / h, 0.0));
        let col = d2.apply(&Point2C::new(ONE, ZERO));
        assert!((fd - col).norm() < 1e-5);
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert!(HenonMap::real(&[0.0, 1.0], 0.3).is_err());
        assert!(HenonMap::real(&[0.0, 0.0, 1.0], 0.0).is_err());
        assert!(HenonMap::real(&[f64::NAN, 0.0, 1.0], 0.1).is_err());
        let g = HenonMap::degenerate(vec![ZERO, ZERO, ONE], ZERO).unwrap();
        assert!(!g.is_invertible());
        assert!(matches!(
            g.apply_inverse(Point2C::real(0.5, 0.0)),
            Err(HenonError::NotInvertible)
        ));
    }

    #[test]
    fn non_finite_point_is_domain_error() {
        let f = quad(0.0, 0.3);
        let bad = Point2C::new(C64::new(f64::INFINITY, 0.0), ZERO);
        assert!(matches!(f.apply(bad), Err(HenonError::Domain(_))));
        assert!(matches!(f.apply_inverse(bad), Err(HenonError::Domain(_))));
    }

    #[test]
    fn substantial_dissipativity_threshold() {
        assert!(quad(0.0, 0.2).substantially_dissipative());
        assert!(!quad(0.0, 0.3).substantially_dissipative());
    }

    #[test]
    fn escape_time_examples() {
        let f = quad(0.0, 0.05);
        let r = f.filtration_radius().unwrap().radius;
        let z = Point2C::real(r + 1.0, 0.0);
        assert_eq!(f.escape_time(z, r, 10, Direction::Forward).unwrap(), Some(0));
        assert_eq!(
            f.escape_time(Point2C::real(0.0, 0.0), r, 1000, Direction::Forward)
                .unwrap(),
            None
        );
        let g = quad(-6.0, 0.001);
        let rg = g.filtration_radius().unwrap().radius;
        let z = Point2C::real(10.0, 0.0);
        let n = g.escape_time(z, rg, 100, Direction::Forward).unwrap().unwrap();
        // brute iteration
        let mut w = z;
        let mut brute = 0;
        while !(w.x.norm() >= rg.max(w.y.norm())) {
            w = g.apply_unchecked(w);
            brute += 1;
        }
        assert_eq!(n, brute);
        assert!(n <= 1);
    }

    #[test]
    fn overflow_counts_as_escape() {
        let f = quad(0.0, 0.05);
        let z = Point2C::real(0.0, 1e200);
        assert_eq!(f.escape_time(z, 4.0, 5, Direction::Forward).unwrap(), Some(0));
    }

    #[test]
    fn filtration_radius_properties() {
        let f = quad(0.0, 0.05);
        let data = f.filtration_radius().unwrap();
        assert!(f.filtration_holds(data.radius, 10_000));
        assert!(f.filtration_holds(2.0 * data.radius, 10_000));
        assert!(!f.filtration_holds(0.5 * data.radius, 10_000));
        let g = quad(-6.0, 0.001);
        let rg = g.filtration_radius().unwrap().radius;
        assert!(rg >= 3.0, "R = {rg}");
    }

    #[test]
    fn difference_matches_direct_map() {
        let f = quad(-6.0, 0.001);
        let z = Point2C::real(2.1, -1.3);
        let h = Point2C::new(C64::new(1e-4, 2e-5), C64::new(-3e-5, 1e-5));
        let d = f.difference(z, h);
        let direct = f.apply_unchecked(z + h) - f.apply_unchecked(z);
        assert!((d - direct).norm() < 1e-13);
    }
}
