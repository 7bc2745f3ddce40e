//! The ambient flat torus `T^{2n} = (R^2/Z^2)^n` with complexified symplectic
//! form, affine-linear Lagrangian branes and their transverse intersections.
//!
//! Each `T^2` factor carries coordinates `(r, theta)`, the symplectic form
//! `A_j dr ∧ dtheta` and a diagonal B-field `b_j dr ∧ dtheta`. A brane is a
//! product of one embedded circle per factor, each circle being the image of
//! an affine line `c + s·d` with `d` a primitive integer vector. One period of
//! the circle is `Δs = 1`.
//!
//! Everything geometric here is exact rational arithmetic.

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grading;
use crate::rational::{self, frac, Q};

pub type Pt = [Q; 2];

/// Ambient torus data: per-factor area `A_j > 0` and B-coefficient `b_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusAmbient {
    pub n: usize,
    pub area: Vec<f64>,
    #[serde(with = "rational::serde_q::vec")]
    pub b: Vec<Q>,
}

impl TorusAmbient {
    pub fn new(area: Vec<f64>, b: Vec<Q>) -> Result<Self> {
        let amb = TorusAmbient { n: area.len(), area, b };
        amb.validate()?;
        Ok(amb)
    }

    /// Standard torus `ω = Σ dr∧dθ` with `B = 0`.
    pub fn standard(n: usize) -> Self {
        TorusAmbient { n, area: vec![1.0; n], b: vec![Q::zero(); n] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidAmbient("n must be positive".into()));
        }
        if self.area.len() != self.n || self.b.len() != self.n {
            return Err(Error::InvalidAmbient(format!(
                "expected {} area and b entries, got {} and {}",
                self.n,
                self.area.len(),
                self.b.len()
            )));
        }
        if let Some(a) = self.area.iter().find(|a| !(**a > 0.0) || !a.is_finite()) {
            return Err(Error::InvalidAmbient(format!("area {a} is not positive")));
        }
        Ok(())
    }

    /// `τ_j = b_j + i A_j`.
    pub fn tau(&self, j: usize) -> Complex64 {
        Complex64::new(rational::to_f64(self.b[j]), self.area[j])
    }
}

/// A primitive integer direction vector `(u, v)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "[i64; 2]", into = "[i64; 2]")]
pub struct Direction {
    u: i64,
    v: i64,
}

impl Direction {
    pub fn new(u: i64, v: i64) -> Result<Self> {
        if (u == 0 && v == 0) || u.gcd(&v) != 1 {
            return Err(Error::NonPrimitiveDirection(u, v));
        }
        Ok(Direction { u, v })
    }

    /// Direction of `ℓ_k = {θ = -k r}`.
    pub fn slope(k: i64) -> Self {
        Direction { u: 1, v: -k }
    }

    pub fn u(&self) -> i64 {
        self.u
    }

    pub fn v(&self) -> i64 {
        self.v
    }

    pub fn cross(&self, other: &Direction) -> i64 {
        self.u * other.v - self.v * other.u
    }

    pub fn reversed(&self) -> Self {
        Direction { u: -self.u, v: -self.v }
    }

    pub fn as_q(&self) -> Pt {
        [Q::from_integer(self.u as i128), Q::from_integer(self.v as i128)]
    }

    /// Integers `(a, b)` with `a u + b v = 1`.
    fn bezout(&self) -> (i128, i128) {
        let e = (self.u as i128).extended_gcd(&(self.v as i128));
        // gcd is ±1 for primitive vectors.
        if e.gcd == 1 {
            (e.x, e.y)
        } else {
            (-e.x, -e.y)
        }
    }
}

impl TryFrom<[i64; 2]> for Direction {
    type Error = Error;
    fn try_from(d: [i64; 2]) -> Result<Self> {
        Direction::new(d[0], d[1])
    }
}

impl From<Direction> for [i64; 2] {
    fn from(d: Direction) -> Self {
        [d.u, d.v]
    }
}

pub fn cross_q(a: &Pt, b: &Pt) -> Q {
    a[0] * b[1] - a[1] * b[0]
}

pub fn cross_qd(a: &Pt, d: &Direction) -> Q {
    a[0] * Q::from_integer(d.v as i128) - a[1] * Q::from_integer(d.u as i128)
}

pub fn add(a: &Pt, b: &Pt) -> Pt {
    [a[0] + b[0], a[1] + b[1]]
}

pub fn sub(a: &Pt, b: &Pt) -> Pt {
    [a[0] - b[0], a[1] - b[1]]
}

pub fn scale_dir(s: Q, d: &Direction) -> Pt {
    [s * Q::from_integer(d.u as i128), s * Q::from_integer(d.v as i128)]
}

pub fn reduce_point(p: &Pt) -> Pt {
    [frac(p[0]), frac(p[1])]
}

pub fn is_integral(p: &Pt) -> bool {
    p[0].is_integer() && p[1].is_integer()
}

/// For `v` parallel to `d`, the scalar `s` with `v = s·d`.
pub fn scalar_along(v: &Pt, d: &Direction) -> Q {
    if d.u != 0 {
        v[0] / Q::from_integer(d.u as i128)
    } else {
        v[1] / Q::from_integer(d.v as i128)
    }
}

/// An affine line `{c + s·d}` in `R^2`, viewed as an embedded circle in `T^2`.
/// The sign of `d` is the orientation (direction of increasing `s`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineLine {
    pub d: Direction,
    #[serde(with = "rational::serde_q::pair")]
    pub c: Pt,
}

impl AffineLine {
    /// Builds the line with its offset reduced into `[0,1)^2`.
    pub fn new(d: Direction, c: Pt) -> Self {
        AffineLine { d, c: reduce_point(&c) }
    }

    /// `ℓ_k = {θ = -k r}` through the origin.
    pub fn ell(k: i64) -> Self {
        AffineLine::new(Direction::slope(k), [Q::zero(), Q::zero()])
    }

    pub fn point_at(&self, s: Q) -> Pt {
        add(&self.c, &scale_dir(s, &self.d))
    }

    /// Parameter `s` with `lifted_point = c + s·d` for the base lift through `c`.
    pub fn arc_parameter(&self, lifted_point: &Pt) -> Result<Q> {
        let w = sub(lifted_point, &self.c);
        if !cross_qd(&w, &self.d).is_zero() {
            return Err(Error::PointNotOnLine);
        }
        Ok(scalar_along(&w, &self.d))
    }

    /// Whether a torus point (any lift) lies on the circle.
    pub fn contains(&self, p: &Pt) -> bool {
        cross_qd(&sub(p, &self.c), &self.d).is_integer()
    }

    /// Arc parameter of a torus point, modulo 1.
    pub fn arc_parameter_mod1(&self, p: &Pt) -> Result<Q> {
        if !self.contains(p) {
            return Err(Error::PointNotOnLine);
        }
        let (a, b) = self.d.bezout();
        let w = sub(p, &self.c);
        Ok(frac(w[0] * Q::from_integer(a) + w[1] * Q::from_integer(b)))
    }

    /// Intersection points of the two circles in `[0,1)^2`, sorted.
    pub fn intersect(&self, other: &AffineLine) -> Option<Vec<Pt>> {
        let det = self.d.cross(&other.d);
        if det == 0 {
            return None;
        }
        // s·d0 − t·d1 = (c1 − c0) + w  ⇒  s·det = cross(c1 − c0, d1) + cross(w, d1).
        let base = cross_qd(&sub(&other.c, &self.c), &other.d);
        let det_q = Q::from_integer(det as i128);
        let mut pts: Vec<Pt> = (0..det.abs())
            .map(|j| {
                let s = (base + Q::from_integer(j as i128)) / det_q;
                reduce_point(&self.point_at(s))
            })
            .collect();
        pts.sort();
        pts.dedup();
        Some(pts)
    }
}

/// A graded brane: product of circles, grading shifts and flat U(1) holonomies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Brane {
    pub lines: Vec<AffineLine>,
    pub alpha_shift: Vec<i64>,
    #[serde(with = "rational::serde_q::vec")]
    pub holonomy: Vec<Q>,
}

impl Brane {
    pub fn new(lines: Vec<AffineLine>, alpha_shift: Vec<i64>, holonomy: Vec<Q>) -> Result<Self> {
        let b = Brane { lines, alpha_shift, holonomy: holonomy.into_iter().map(frac).collect() };
        b.validate()?;
        Ok(b)
    }

    /// Brane with default grading and trivial holonomy.
    pub fn from_lines(lines: Vec<AffineLine>) -> Self {
        let n = lines.len();
        Brane { lines, alpha_shift: vec![0; n], holonomy: vec![Q::zero(); n] }
    }

    /// `ℓ_k` in every factor of `T^{2n}`.
    pub fn ell(k: i64, n: usize) -> Self {
        Brane::from_lines(vec![AffineLine::ell(k); n])
    }

    pub fn n(&self) -> usize {
        self.lines.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.lines.len();
        if n == 0 {
            return Err(Error::InvalidBrane("a brane needs at least one line".into()));
        }
        if self.alpha_shift.len() != n || self.holonomy.len() != n {
            return Err(Error::InvalidBrane(format!(
                "expected {n} alpha_shift and holonomy entries, got {} and {}",
                self.alpha_shift.len(),
                self.holonomy.len()
            )));
        }
        for l in &self.lines {
            Direction::new(l.d.u, l.d.v)?;
            if l.c.iter().any(|x| x.is_negative() || *x >= Q::from_integer(1)) {
                return Err(Error::InvalidBrane("offsets must lie in [0,1)".into()));
            }
        }
        if self.holonomy.iter().any(|h| h.is_negative() || *h >= Q::from_integer(1)) {
            return Err(Error::InvalidBrane("holonomy must lie in [0,1)".into()));
        }
        Ok(())
    }

    pub fn check_ambient(&self, amb: &TorusAmbient) -> Result<()> {
        if self.n() != amb.n {
            return Err(Error::InvalidBrane(format!(
                "brane has {} factors but the ambient torus has {}",
                self.n(),
                amb.n
            )));
        }
        Ok(())
    }

    /// Whether a torus point lies on the brane.
    pub fn contains(&self, p: &[Pt]) -> bool {
        p.len() == self.n() && self.lines.iter().zip(p).all(|(l, x)| l.contains(x))
    }
}

/// A transverse intersection point with its degree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Generator {
    #[serde(with = "point_serde")]
    pub point: Vec<Pt>,
    pub degree: i64,
}

pub(crate) mod point_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &[Pt], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(p.iter().flat_map(|x| x.iter().map(rational::fmt_q)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Pt>, D::Error> {
        let flat: Vec<String> = Vec::deserialize(d)?;
        if flat.len() % 2 != 0 {
            return Err(serde::de::Error::custom("point needs an even number of coordinates"));
        }
        let qs = flat
            .iter()
            .map(|s| rational::parse_q(s).map_err(serde::de::Error::custom))
            .collect::<std::result::Result<Vec<Q>, _>>()?;
        Ok(qs.chunks(2).map(|c| [frac(c[0]), frac(c[1])]).collect())
    }
}

/// Per-factor intersection points, or `ParallelLines` naming the first bad factor.
pub fn factor_intersections(b0: &Brane, b1: &Brane) -> Result<Vec<Vec<Pt>>> {
    if b0.n() != b1.n() {
        return Err(Error::InvalidBrane("branes live in tori of different dimension".into()));
    }
    b0.lines
        .iter()
        .zip(&b1.lines)
        .enumerate()
        .map(|(f, (l0, l1))| l0.intersect(l1).ok_or(Error::ParallelLines { factor: f }))
        .collect()
}

/// All intersection points of two branes, lexicographically sorted, with degrees.
pub fn intersect(b0: &Brane, b1: &Brane) -> Result<Vec<Generator>> {
    let per_factor = factor_intersections(b0, b1)?;
    let degree = grading::brane_degree(b0, b1)?;
    let mut points: Vec<Vec<Pt>> = vec![Vec::new()];
    for pts in &per_factor {
        points = points
            .into_iter()
            .flat_map(|prefix| {
                pts.iter().map(move |p| {
                    let mut v = prefix.clone();
                    v.push(*p);
                    v
                })
            })
            .collect();
    }
    points.sort();
    Ok(points.into_iter().map(|point| Generator { point, degree }).collect())
}

/// Arc parameter of a lifted point on `l` (base lift through the offset).
pub fn arc_parameter(l: &AffineLine, lifted_point: &Pt) -> Result<Q> {
    l.arc_parameter(lifted_point)
}
