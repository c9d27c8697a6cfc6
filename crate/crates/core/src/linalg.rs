//! Small complex linear algebra: points and vectors of C², 2×2 matrices, and a
//! dense solver for the Newton systems of the periodic-orbit finder.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Sub};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// A point (or tangent vector) of C².
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point2C {
    pub x: C64,
    pub y: C64,
}

/// Tangent vectors share the representation of points.
pub type Vec2C = Point2C;

impl Point2C {
    pub const fn new(x: C64, y: C64) -> Self {
        Point2C { x, y }
    }

    pub fn real(x: f64, y: f64) -> Self {
        Point2C::new(C64::new(x, 0.0), C64::new(y, 0.0))
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Euclidean norm in C² ≅ R⁴.
    pub fn norm(&self) -> f64 {
        (self.x.norm_sqr() + self.y.norm_sqr()).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.x.norm().max(self.y.norm())
    }

    pub fn scale(&self, s: C64) -> Self {
        Point2C::new(self.x * s, self.y * s)
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Point2C::new(self.x / n, self.y / n)
    }

    /// Hermitian inner product ⟨self, other⟩ = conj(self)·other.
    pub fn dot(&self, other: &Point2C) -> C64 {
        self.x.conj() * other.x + self.y.conj() * other.y
    }

    /// Unit vector orthogonal to `self` (assumed unit) completing a unitary frame.
    pub fn perp(&self) -> Self {
        Point2C::new(-self.y.conj(), self.x.conj())
    }

    /// Coordinates as [re x, im x, re y, im y].
    pub fn to_real4(&self) -> [f64; 4] {
        [self.x.re, self.x.im, self.y.re, self.y.im]
    }

    pub fn from_real4(v: [f64; 4]) -> Self {
        Point2C::new(C64::new(v[0], v[1]), C64::new(v[2], v[3]))
    }

    pub fn dist(&self, other: &Point2C) -> f64 {
        (*self - *other).norm()
    }
}

impl Add for Point2C {
    type Output = Point2C;
    fn add(self, o: Point2C) -> Point2C {
        Point2C::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2C {
    type Output = Point2C;
    fn sub(self, o: Point2C) -> Point2C {
        Point2C::new(self.x - o.x, self.y - o.y)
    }
}

/// Sine of the Hermitian angle between the complex lines spanned by `u` and `v`.
pub fn line_sin(u: &Vec2C, v: &Vec2C) -> f64 {
    let det = u.x * v.y - u.y * v.x;
    (det.norm() / (u.norm() * v.norm())).min(1.0)
}

/// 2×2 complex matrix, row major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2C {
    pub m: [[C64; 2]; 2],
}

impl Mat2C {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2C { m: [[a, b], [c, d]] }
    }

    pub fn identity() -> Self {
        Mat2C::new(ONE, ZERO, ZERO, ONE)
    }

    /// Matrix with columns `c0`, `c1`.
    pub fn from_columns(c0: Vec2C, c1: Vec2C) -> Self {
        Mat2C::new(c0.x, c1.x, c0.y, c1.y)
    }

    pub fn det(&self) -> C64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> C64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn apply(&self, v: &Vec2C) -> Vec2C {
        Point2C::new(
            self.m[0][0] * v.x + self.m[0][1] * v.y,
            self.m[1][0] * v.x + self.m[1][1] * v.y,
        )
    }

    pub fn adjoint(&self) -> Self {
        Mat2C::new(
            self.m[0][0].conj(),
            self.m[1][0].conj(),
            self.m[0][1].conj(),
            self.m[1][1].conj(),
        )
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() == 0.0 || !d.is_finite() {
            return None;
        }
        Some(Mat2C::new(
            self.m[1][1] / d,
            -self.m[0][1] / d,
            -self.m[1][0] / d,
            self.m[0][0] / d,
        ))
    }

    pub fn frobenius_sqr(&self) -> f64 {
        self.m.iter().flatten().map(|z| z.norm_sqr()).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        for z in out.m.iter_mut().flatten() {
            *z *= s;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Eigenvalues ordered by modulus, computed without cancellation given
    /// an externally supplied determinant (exact for products of Hénon
    /// differentials).
    pub fn eigenvalues_with_det(&self, det: C64) -> (C64, C64) {
        let tr = self.trace();
        let disc = (tr * tr - det * 4.0).sqrt();
        let plus = tr + disc;
        let minus = tr - disc;
        let big = if plus.norm() >= minus.norm() { plus } else { minus } * 0.5;
        if big.norm() == 0.0 {
            return (ZERO, ZERO);
        }
        let small = det / big;
        (small, big)
    }

    pub fn eigenvalues(&self) -> (C64, C64) {
        self.eigenvalues_with_det(self.det())
    }

    /// Unit eigenvector for eigenvalue `lambda`.
    pub fn eigenvector(&self, lambda: C64) -> Vec2C {
        let a = self.m[0][0] - lambda;
        let b = self.m[0][1];
        let c = self.m[1][0];
        let d = self.m[1][1] - lambda;
        // Null vector of [[a, b], [c, d]] from whichever row is better scaled.
        let v1 = Point2C::new(b, -a);
        let v2 = Point2C::new(d, -c);
        let v = if v1.norm() >= v2.norm() { v1 } else { v2 };
        if v.norm() == 0.0 {
            return Point2C::new(ONE, ZERO);
        }
        canonical_phase(v.normalized())
    }

    /// Dominant right singular vector (unit) of the matrix.
    pub fn top_right_singular(&self) -> Vec2C {
        let s = self.max_abs();
        let a = if s > 0.0 { self.scale(1.0 / s) } else { *self };
        let h = a.adjoint() * a;
        // Hermitian [[p, q], [conj q, r]]
        let p = h.m[0][0].re;
        let q = h.m[0][1];
        let r = h.m[1][1].re;
        let half_diff = 0.5 * (p - r);
        let rad = (half_diff * half_diff + q.norm_sqr()).sqrt();
        let lmax = 0.5 * (p + r) + rad;
        let v1 = Point2C::new(q, C64::new(lmax - p, 0.0));
        let v2 = Point2C::new(C64::new(lmax - r, 0.0), q.conj());
        let v = if v1.norm() >= v2.norm() { v1 } else { v2 };
        if v.norm() == 0.0 {
            return Point2C::new(ONE, ZERO);
        }
        canonical_phase(v.normalized())
    }

    /// Largest singular value via the Frobenius identity.
    pub fn sigma_max(&self) -> f64 {
        let s = self.max_abs();
        if s == 0.0 {
            return 0.0;
        }
        let a = self.scale(1.0 / s);
        let f = a.frobenius_sqr();
        let d = a.det().norm();
        let disc = (f * f - 4.0 * d * d).max(0.0).sqrt();
        s * (0.5 * (f + disc)).sqrt()
    }
}

impl Mul for Mat2C {
    type Output = Mat2C;
    fn mul(self, o: Mat2C) -> Mat2C {
        let a = &self.m;
        let b = &o.m;
        Mat2C::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

/// Fix the phase of a unit vector: the component of larger modulus becomes
/// real and positive. Makes direction estimates reproducible.
pub fn canonical_phase(v: Vec2C) -> Vec2C {
    let pivot = if v.x.norm() >= v.y.norm() { v.x } else { v.y };
    if pivot.norm() == 0.0 {
        return v;
    }
    let phase = pivot.conj() / pivot.norm();
    v.scale(phase)
}

/// Solve the dense complex system `a · x = rhs` by Gaussian elimination with
/// partial pivoting. Returns `None` when a pivot underflows `1e-300` relative
/// to the matrix scale.
pub fn solve_dense(mut a: Vec<Vec<C64>>, mut rhs: Vec<C64>) -> Option<Vec<C64>> {
    let n = rhs.len();
    let scale = a
        .iter()
        .flatten()
        .map(|z| z.norm())
        .fold(0.0_f64, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return None;
    }
    for col in 0..n {
        let (piv, best) = (col..n)
            .map(|r| (r, a[r][col].norm()))
            .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= 1e-14 * scale {
            return None;
        }
        a.swap(col, piv);
        rhs.swap(col, piv);
        let inv = ONE / a[col][col];
        for r in col + 1..n {
            let factor = a[r][col] * inv;
            if factor == ZERO {
                continue;
            }
            for c in col..n {
                let v = a[col][c];
                a[r][c] -= factor * v;
            }
            let v = rhs[col];
            rhs[r] -= factor * v;
        }
    }
    let mut x = vec![ZERO; n];
    for r in (0..n).rev() {
        let mut acc = rhs[r];
        for c in r + 1..n {
            acc -= a[r][c] * x[c];
        }
        x[r] = acc / a[r][r];
    }
    if x.iter().all(|z| z.is_finite()) {
        Some(x)
    } else {
        None
    }
}
