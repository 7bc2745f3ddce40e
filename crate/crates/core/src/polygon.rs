//! Homotopy classes of boundary-punctured polygons, realized as closed lifted
//! polygons in the universal cover `R^2` of each `T^2` factor.
//!
//! The boundary of a `(k+1)`-gon with corners `g_1, …, g_k` (inputs) and
//! `g_0` (output) runs counterclockwise through the lifted corners
//! `p̃_0, p̃_1, …, p̃_k`. The edge from `p̃_j` to `p̃_{j+1}` lies on a lift of
//! `L_j`, with indices taken mod `k+1`. A class is pinned down by the lift of
//! `p̃_1` (the canonical representative of `g_1`) and integers `m_2, …, m_k`:
//!
//! ```text
//! p̃_{j+1} = p̃_j + (σ_j + m_{j+1})·d_j,   j = 1, …, k-1,
//! ```
//!
//! where `σ_j ∈ (0, 1)` is the arc offset from `g_j` to `g_{j+1}` along `L_j`.
//! The last corner `p̃_0` is the meeting point of the lift of `L_k` through
//! `p̃_k` and the lift of `L_0` through `p̃_1`, and the class closes when it
//! is a lift of `g_0`.
//!
//! With three corners the signed area is `κ(σ_1 + m)^2`, so classes come in
//! arithmetic families of the lift index and areas grow quadratically. With
//! more corners the search box is bounded by a convexity estimate: adjacent
//! edges of a convex polygon of area `≤ C` satisfy `|s_j|·|s_{j+1}| ≤ 2C`.
//!
//! On `T^{2n}` with `n > 1` the class is a tuple of per-factor classes. This
//! is only valid when the domain has no moduli, so `n > 1` is limited to
//! `k ≤ 2`.

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::flat_torus::{
    add, cross_q, cross_qd, is_integral, scalar_along, scale_dir, sub, Brane, Direction, Generator, Pt,
};
use crate::rational::{self, dist_to_int, frac, Q};

/// Exact quadratic `a j^2 + b j + c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Quadratic {
    #[serde(serialize_with = "ser_q")]
    pub a: Q,
    #[serde(serialize_with = "ser_q")]
    pub b: Q,
    #[serde(serialize_with = "ser_q")]
    pub c: Q,
}

fn ser_q<S: serde::Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    rational::serde_q::serialize(x, s)
}

impl Quadratic {
    pub fn new(a: Q, b: Q, c: Q) -> Self {
        Quadratic { a, b, c }
    }

    pub fn eval(&self, j: i64) -> Q {
        let j = Q::from_integer(j as i128);
        (self.a * j + self.b) * j + self.c
    }

    /// Interpolates through the values at `0, 1, 2`.
    pub fn fit(v0: Q, v1: Q, v2: Q) -> Self {
        let two = Q::from_integer(2);
        let a = (v0 - two * v1 + v2) / two;
        Quadratic { a, b: v1 - v0 - a, c: v0 }
    }

    pub fn vertex(&self) -> Q {
        -self.b / (Q::from_integer(2) * self.a)
    }
}

/// One factor of a polygon class: the closed lifted polygon `p̃_0, …, p̃_k`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct FactorClass {
    /// Lift indices `m_2, …, m_k`.
    pub lift_indices: Vec<i64>,
    pub corners: Vec<Pt>,
    /// Line directions `d_0, …, d_k`; edge `j` runs along `d_j`.
    pub directions: Vec<Direction>,
}

impl FactorClass {
    /// Builds a class from explicit corners, checking that each edge runs along its line.
    pub fn from_corners(corners: Vec<Pt>, directions: Vec<Direction>, lift_indices: Vec<i64>) -> Result<Self> {
        if corners.len() != directions.len() || corners.len() < 2 {
            return Err(Error::InvalidInput("need one direction per corner and at least two corners".into()));
        }
        let n = corners.len();
        for j in 0..n {
            let e = sub(&corners[(j + 1) % n], &corners[j]);
            if !cross_qd(&e, &directions[j]).is_zero() {
                return Err(Error::PointNotOnLine);
            }
        }
        Ok(FactorClass { lift_indices, corners, directions })
    }

    pub fn k(&self) -> usize {
        self.corners.len() - 1
    }

    fn edge(&self, j: usize) -> Pt {
        let n = self.corners.len();
        sub(&self.corners[(j + 1) % n], &self.corners[j])
    }

    pub fn signed_area(&self) -> Q {
        let n = self.corners.len();
        let twice: Q = (0..n).map(|j| cross_q(&self.corners[j], &self.corners[(j + 1) % n])).sum();
        twice / Q::from_integer(2)
    }

    fn fan_area(&self) -> Q {
        let p0 = self.corners[0];
        let twice: Q = (1..self.corners.len() - 1)
            .map(|j| cross_q(&sub(&self.corners[j], &p0), &sub(&self.corners[j + 1], &p0)))
            .sum();
        twice / Q::from_integer(2)
    }

    /// Signed arc displacements `Δs_0, …, Δs_k`.
    pub fn arc_displacements(&self) -> Vec<Q> {
        (0..self.corners.len()).map(|j| scalar_along(&self.edge(j), &self.directions[j])).collect()
    }

    /// Strictly convex, counterclockwise and winding once.
    pub fn is_convex_ccw(&self) -> bool {
        let n = self.corners.len();
        if n < 3 {
            return false;
        }
        let edges: Vec<Pt> = (0..n).map(|j| self.edge(j)).collect();
        if edges.iter().any(|e| e[0].is_zero() && e[1].is_zero()) {
            return false;
        }
        if (0..n).any(|j| cross_q(&edges[j], &edges[(j + 1) % n]) <= Q::zero()) {
            return false;
        }
        winding_of_edges(&edges) == 1
    }

    fn translated(&self, v: &Pt) -> FactorClass {
        FactorClass {
            lift_indices: self.lift_indices.clone(),
            corners: self.corners.iter().map(|p| add(p, v)).collect(),
            directions: self.directions.clone(),
        }
    }
}

/// Number of times the edge directions sweep the full circle.
fn winding_of_edges(edges: &[Pt]) -> i64 {
    let half = |e: &Pt| if e[1].is_positive() || (e[1].is_zero() && e[0].is_positive()) { 0 } else { 1 };
    let n = edges.len();
    (0..n)
        .filter(|&j| half(&edges[j]) == 1 && half(&edges[(j + 1) % n]) == 0)
        .count() as i64
}

/// A homotopy class of polygons in `T^{2n}`: one closed lifted polygon per factor.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PolygonClass {
    pub factors: Vec<FactorClass>,
}

impl PolygonClass {
    pub fn single(f: FactorClass) -> Self {
        PolygonClass { factors: vec![f] }
    }

    pub fn k(&self) -> usize {
        self.factors[0].k()
    }

    pub fn lift_indices(&self) -> Vec<Vec<i64>> {
        self.factors.iter().map(|f| f.lift_indices.clone()).collect()
    }

    /// Translates the lift in factor `f` by an integer vector.
    pub fn translated(&self, shifts: &[[i128; 2]]) -> PolygonClass {
        PolygonClass {
            factors: self
                .factors
                .iter()
                .zip(shifts)
                .map(|(f, s)| f.translated(&[Q::from_integer(s[0]), Q::from_integer(s[1])]))
                .collect(),
        }
    }

    /// Sum of the per-factor unsigned areas.
    pub fn total_area(&self) -> Q {
        self.factors.iter().map(|f| f.signed_area().abs()).sum()
    }

    pub fn debug_json(&self) -> serde_json::Value {
        let geometry = class_geometry(self).ok();
        json!({
            "lift_indices": self.lift_indices(),
            "corners": self.factors.iter().map(|f| f.corners.iter()
                .map(|p| [rational::fmt_q(&p[0]), rational::fmt_q(&p[1])]).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "area": self.factors.iter().map(|f| rational::fmt_q(&f.signed_area())).collect::<Vec<_>>(),
            "arc_displacement": geometry.as_ref().map(|g| g.arc_displacement.iter()
                .map(|v| v.iter().map(rational::fmt_q).collect::<Vec<_>>()).collect::<Vec<_>>()),
            "holomorphic": holomorphic_count(self) == 1,
        })
    }
}

/// Exact geometric data of a class.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassGeometry {
    pub euclidean_area: Vec<Q>,
    pub signed_area: Vec<Q>,
    /// `arc_displacement[f][j]` is `Δs_j` in factor `f`.
    pub arc_displacement: Vec<Vec<Q>>,
    pub convex_ccw: bool,
}

pub fn class_geometry(c: &PolygonClass) -> Result<ClassGeometry> {
    let mut g = ClassGeometry {
        euclidean_area: Vec::new(),
        signed_area: Vec::new(),
        arc_displacement: Vec::new(),
        convex_ccw: true,
    };
    for f in &c.factors {
        let area = f.signed_area();
        debug_assert_eq!(area, f.fan_area());
        let n = f.corners.len();
        let collinear = (0..n).any(|j| cross_q(&f.edge(j), &f.edge((j + 1) % n)).is_zero());
        if area.is_zero() || collinear {
            return Err(Error::DegenerateClass);
        }
        g.euclidean_area.push(area.abs());
        g.signed_area.push(area);
        g.arc_displacement.push(f.arc_displacements());
        g.convex_ccw &= f.is_convex_ccw();
    }
    Ok(g)
}

/// 1 if every factor is an embedded convex counterclockwise polygon, else 0.
pub fn holomorphic_count(c: &PolygonClass) -> u8 {
    u8::from(c.factors.iter().all(FactorClass::is_convex_ccw))
}

/// A family of three-cornered classes `m = residue + period·j` in one factor,
/// with unsigned area `quadratic(j)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassFamily {
    pub residue: i64,
    pub period: i64,
    pub quadratic: Quadratic,
    /// Whether the classes of the family are counterclockwise.
    pub holomorphic: bool,
}

/// Enumeration result for one factor.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorEnumeration {
    pub classes: Vec<FactorClass>,
    /// Arithmetic families (three corners only).
    pub families: Vec<ClassFamily>,
    /// For four or more corners: the search box radius of `s_j` per unit cutoff.
    pub window_rates: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Enumeration {
    pub classes: Vec<PolygonClass>,
    pub per_factor: Vec<FactorEnumeration>,
    pub cutoff: Q,
    /// No class under the cutoff although closed classes exist above it.
    pub cutoff_too_small: bool,
}

struct FactorSetup {
    d: Vec<Direction>,
    sigma: Vec<Q>,
    base: Pt,
    g0: Pt,
}

impl FactorSetup {
    fn k(&self) -> usize {
        self.d.len() - 1
    }

    fn corners(&self, m: &[i64]) -> (Vec<Pt>, bool) {
        let k = self.k();
        let mut pts = Vec::with_capacity(k + 1);
        pts.push(self.base);
        for j in 1..k {
            let s = self.sigma[j] + Q::from_integer(m[j - 1] as i128);
            let next = add(&pts[j - 1], &scale_dir(s, &self.d[j]));
            pts.push(next);
        }
        let (d0, dk) = (&self.d[0], &self.d[k]);
        let t = cross_qd(&sub(&pts[k - 1], &self.base), dk) / Q::from_integer(d0.cross(dk) as i128);
        let p0 = add(&self.base, &scale_dir(t, d0));
        let closed = is_integral(&sub(&p0, &self.g0));
        pts.insert(0, p0);
        (pts, closed)
    }

    fn class(&self, m: &[i64]) -> Option<FactorClass> {
        let (corners, closed) = self.corners(m);
        closed.then(|| FactorClass { lift_indices: m.to_vec(), corners, directions: self.d.clone() })
    }
}

fn setup_factor(branes: &[Brane], corners: &[&Generator], output: &Generator, f: usize, shift: [i128; 2]) -> Result<FactorSetup> {
    let k = corners.len();
    let lines: Vec<_> = branes.iter().map(|b| &b.lines[f]).collect();
    // g[j] for j = 0..=k, with g[0] the output.
    let mut g: Vec<Pt> = vec![output.point[f]];
    g.extend(corners.iter().map(|c| c.point[f]));
    for j in 0..=k {
        let nxt = (j + 1) % (k + 1);
        if lines[j].d.cross(&lines[nxt].d) == 0 {
            return Err(Error::ParallelLines { factor: f });
        }
        if !lines[j].contains(&g[j]) || !lines[j].contains(&g[nxt]) {
            return Err(Error::PointNotOnLine);
        }
        if g[j] == g[nxt] {
            return Err(Error::DegenerateCorners(j, nxt, f));
        }
    }
    let sigma = (0..=k)
        .map(|j| {
            let nxt = (j + 1) % (k + 1);
            Ok(frac(lines[j].arc_parameter_mod1(&g[nxt])? - lines[j].arc_parameter_mod1(&g[j])?))
        })
        .collect::<Result<Vec<Q>>>()?;
    let base = add(&g[1], &[Q::from_integer(shift[0]), Q::from_integer(shift[1])]);
    Ok(FactorSetup { d: lines.iter().map(|l| l.d).collect(), sigma, base, g0: g[0] })
}

fn lcm_denominators(v: &Pt) -> i64 {
    v[0].denom().lcm(v[1].denom()).to_i64().expect("period fits in i64")
}

fn enumerate_triangles(s: &FactorSetup, cutoff: Q) -> FactorEnumeration {
    let area = |m: i64| {
        let (c, _) = s.corners(&[m]);
        FactorClass { lift_indices: vec![m], corners: c, directions: s.d.clone() }.signed_area()
    };
    let signed = Quadratic::fit(area(0), area(1), area(2));
    let sign = if signed.a.is_positive() { Q::from_integer(1) } else { Q::from_integer(-1) };
    let drift = sub(&s.corners(&[1]).0[0], &s.corners(&[0]).0[0]);
    let period = lcm_denominators(&drift);
    let mut classes = Vec::new();
    let mut families = Vec::new();
    for r in 0..period {
        if !s.corners(&[r]).1 {
            continue;
        }
        let (p, r_q) = (Q::from_integer(period as i128), Q::from_integer(r as i128));
        let (a, b, c) = (sign * signed.a, sign * signed.b, sign * signed.c);
        let q = Quadratic::new(a * p * p, (Q::from_integer(2) * a * r_q + b) * p, (a * r_q + b) * r_q + c);
        families.push(ClassFamily { residue: r, period, quadratic: q, holomorphic: sign.is_positive() });
        let v = rational::floor_i64(q.vertex());
        let mut push = |j: i64| {
            if q.eval(j) <= cutoff {
                classes.push(s.class(&[r + period * j]).expect("family member closes"));
                true
            } else {
                false
            }
        };
        let mut j = v;
        while push(j) {
            j -= 1;
        }
        let mut j = v + 1;
        while push(j) {
            j += 1;
        }
    }
    classes.sort();
    FactorEnumeration { classes, families, window_rates: Vec::new() }
}

/// `4/(η_{j-1} + η_{j+1})` for the free edges `j = 1, …, k-1`.
fn window_rates(s: &FactorSetup) -> Vec<f64> {
    let k = s.k();
    let eta: Vec<f64> = s.sigma.iter().map(|x| rational::to_f64(dist_to_int(*x))).collect();
    (1..k).map(|j| 4.0 / (eta[j - 1] + eta[(j + 1) % (k + 1)])).collect()
}

fn enumerate_polygons(s: &FactorSetup, cutoff: Q) -> FactorEnumeration {
    let k = s.k();
    let rates = window_rates(s);
    let c = rational::to_f64(cutoff);
    let ranges: Vec<(i64, i64)> = (1..k)
        .map(|j| {
            let r = rates[j - 1] * c;
            let sig = rational::to_f64(s.sigma[j]);
            ((-r - sig).floor() as i64 - 1, (r - sig).ceil() as i64 + 1)
        })
        .collect();
    let (lo0, hi0) = ranges[0];
    let mut classes: Vec<FactorClass> = (lo0..=hi0)
        .into_par_iter()
        .flat_map_iter(|m0| {
            let mut out = Vec::new();
            let mut m = vec![m0];
            odometer(&ranges[1..], &mut m, &mut |m| {
                if let Some(cl) = s.class(m) {
                    if cl.signed_area().abs() <= cutoff && !cl.signed_area().is_zero() {
                        out.push(cl);
                    }
                }
            });
            out
        })
        .collect();
    classes.sort();
    FactorEnumeration { classes, families: Vec::new(), window_rates: rates }
}

fn odometer(ranges: &[(i64, i64)], prefix: &mut Vec<i64>, visit: &mut impl FnMut(&[i64])) {
    match ranges.split_first() {
        None => visit(prefix),
        Some((&(lo, hi), rest)) => {
            for m in lo..=hi {
                prefix.push(m);
                odometer(rest, prefix, visit);
                prefix.pop();
            }
        }
    }
}

/// Enumerates the polygon classes with corners `g_1, …, g_k` and output `g_0`
/// whose total area is at most `cutoff`.
///
/// With four or more corners the search covers the convexity window, which
/// contains every class that can carry a holomorphic polygon.
pub fn enumerate_classes(branes: &[Brane], corners: &[&Generator], output: &Generator, cutoff: Q) -> Result<Enumeration> {
    let n = branes.first().map(Brane::n).unwrap_or(0);
    enumerate_classes_shifted(branes, corners, output, cutoff, &vec![[0, 0]; n])
}

/// As [`enumerate_classes`], with the base lift of `g_1` translated by an integer vector per factor.
pub fn enumerate_classes_shifted(
    branes: &[Brane],
    corners: &[&Generator],
    output: &Generator,
    cutoff: Q,
    base_shift: &[[i128; 2]],
) -> Result<Enumeration> {
    let k = corners.len();
    if k == 0 || branes.len() != k + 1 {
        return Err(Error::InvalidInput(format!("need k >= 1 corners and k+1 branes, got {} and {}", k, branes.len())));
    }
    let n = branes[0].n();
    if branes.iter().any(|b| b.n() != n) || base_shift.len() != n {
        return Err(Error::InvalidInput("all branes must live in the same torus".into()));
    }
    if k >= 3 && n > 1 {
        return Err(Error::Unsupported(
            "polygons with four or more corners are only supported on a single T^2 factor".into(),
        ));
    }
    let empty = || Enumeration {
        classes: vec![],
        per_factor: vec![FactorEnumeration { classes: vec![], families: vec![], window_rates: vec![] }; n],
        cutoff,
        cutoff_too_small: false,
    };
    if k == 1 {
        // Two straight lines in the plane bound no bigon.
        return Ok(empty());
    }
    let setups = (0..n)
        .map(|f| setup_factor(branes, corners, output, f, base_shift[f]))
        .collect::<Result<Vec<_>>>()?;
    if cutoff <= Q::zero() {
        return Ok(empty());
    }
    let per_factor: Vec<FactorEnumeration> = setups
        .iter()
        .map(|s| if k == 2 { enumerate_triangles(s, cutoff) } else { enumerate_polygons(s, cutoff) })
        .collect();
    let mut classes = vec![(Q::zero(), PolygonClass { factors: vec![] })];
    for fe in &per_factor {
        let mut next = Vec::new();
        for (area, partial) in &classes {
            for fc in &fe.classes {
                let total = *area + fc.signed_area().abs();
                if total <= cutoff {
                    let mut factors = partial.factors.clone();
                    factors.push(fc.clone());
                    next.push((total, PolygonClass { factors }));
                }
            }
        }
        classes = next;
    }
    let mut classes: Vec<PolygonClass> = classes.into_iter().map(|(_, c)| c).collect();
    classes.sort();
    let closable = per_factor.iter().all(|fe| !fe.families.is_empty() || !fe.window_rates.is_empty());
    let cutoff_too_small = classes.is_empty() && closable;
    Ok(Enumeration { classes, per_factor, cutoff, cutoff_too_small })
}
