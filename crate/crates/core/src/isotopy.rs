//! Translational Lagrangian isotopies of one brane and their effect on weights.
//!
//! Brane `m` (with `0 < m < k`) is translated along a polyline of offsets
//! `c(t) = c_m + Δc(t)`, one displacement per `T^2` factor and equal time per
//! segment. The flux form is the constant `θ̂ ds` with
//! `θ̂_f = A_f · cross(d_f, Δc_f(1))`, and the brane connection drifts to
//! `β' = β + b · cross(d, Δc(1))` so that its curvature matches the B-field
//! swept by the isotopy.
//!
//! The corners of a polygon class on the moving brane are tracked along the
//! neighbouring lines: the corner on `L_{m-1} ∩ L_m` moves by
//! `λ(c) = cross(c, d_m)/cross(d_{m-1}, d_m)` periods of `L_{m-1}`, and the
//! corner on `L_m ∩ L_{m+1}` by `μ(c) = cross(c, d_m)/cross(d_{m+1}, d_m)`
//! periods of `L_{m+1}`. The arc of the class on `L_m` then has a length
//! `ℓ(c)` that is affine in `c`, and the exact weight ratio of a class is
//!
//! ```text
//! exp(2π Σ_f A_f ∫ cross(d_f, dc) ℓ_f(c)).
//! ```
//!
//! For a single straight segment this is `e^{2π θ̂ ℓ̄}` with `ℓ̄` the mean of
//! the arc displacements before and after. The phases of the weights are
//! absorbed by the transported morphisms, which rotate the input scalars at
//! the tracked corners by exact rational phases.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::ainfinity::{class_weight, mu, CFElement, MuOptions};
use crate::error::{Error, Result};
use crate::flat_torus::{
    add, cross_qd, reduce_point, scalar_along, scale_dir, sub, AffineLine, Brane, Direction, Generator, Pt,
    TorusAmbient,
};
use crate::polygon::{enumerate_classes, holomorphic_count, FactorClass, PolygonClass};
use crate::rational::{self, frac, Q};

/// Translation of brane `brane` along a polyline of offset displacements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineIsotopy {
    pub brane: usize,
    /// `path[w][f]` is the displacement `Δc` of factor `f` at waypoint `w`; `path[0]` is zero.
    #[serde(with = "path_serde")]
    pub path: Vec<Vec<Pt>>,
}

mod path_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &[Vec<Pt>], s: S) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<Vec<[String; 2]>> = p
            .iter()
            .map(|w| w.iter().map(|x| [rational::fmt_q(&x[0]), rational::fmt_q(&x[1])]).collect())
            .collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<Pt>>, D::Error> {
        let strs: Vec<Vec<[String; 2]>> = Vec::deserialize(d)?;
        strs.iter()
            .map(|w| {
                w.iter()
                    .map(|x| {
                        Ok([
                            rational::parse_q(&x[0]).map_err(serde::de::Error::custom)?,
                            rational::parse_q(&x[1]).map_err(serde::de::Error::custom)?,
                        ])
                    })
                    .collect()
            })
            .collect()
    }
}

impl LineIsotopy {
    /// Straight translation by `delta[f]` in each factor.
    pub fn straight(brane: usize, delta: Vec<Pt>) -> Self {
        let zero = vec![[Q::zero(), Q::zero()]; delta.len()];
        LineIsotopy { brane, path: vec![zero, delta] }
    }

    /// Constant path.
    pub fn identity(brane: usize, n: usize) -> Self {
        Self::straight(brane, vec![[Q::zero(), Q::zero()]; n])
    }

    pub fn n(&self) -> usize {
        self.path.first().map(Vec::len).unwrap_or(0)
    }

    pub fn total(&self) -> &[Pt] {
        self.path.last().expect("validated path is nonempty")
    }

    pub fn validate(&self, branes: &[Brane]) -> Result<()> {
        let k = branes.len().saturating_sub(1);
        if self.brane == 0 || self.brane >= k {
            return Err(Error::Unsupported(format!(
                "only interior branes move (1..{}); brane {} requested",
                k.saturating_sub(1),
                self.brane
            )));
        }
        if self.path.len() < 2 {
            return Err(Error::InvalidInput("an isotopy path needs at least two waypoints".into()));
        }
        let n = branes[0].n();
        if self.path.iter().any(|w| w.len() != n) {
            return Err(Error::InvalidInput(format!("every waypoint needs {n} displacements")));
        }
        if self.path[0].iter().any(|p| !p[0].is_zero() || !p[1].is_zero()) {
            return Err(Error::InvalidInput("the path must start at zero displacement".into()));
        }
        Ok(())
    }

    /// Follow `self`, then `other` from where `self` ends.
    pub fn then(&self, other: &LineIsotopy) -> LineIsotopy {
        let end = self.total().to_vec();
        let mut path = self.path.clone();
        path.extend(other.path.iter().skip(1).map(|w| w.iter().zip(&end).map(|(p, e)| add(p, e)).collect()));
        LineIsotopy { brane: self.brane, path }
    }

    /// The same path run backwards, as an isotopy of the moved brane.
    pub fn reversed(&self) -> LineIsotopy {
        let end = self.total().to_vec();
        let path = self.path.iter().rev().map(|w| w.iter().zip(&end).map(|(p, e)| sub(p, e)).collect()).collect();
        LineIsotopy { brane: self.brane, path }
    }

    fn segments(&self) -> impl Iterator<Item = (&Vec<Pt>, &Vec<Pt>)> {
        self.path.iter().zip(self.path.iter().skip(1))
    }
}

/// The flux form `θ_ψ = θ̂ ds`, one coefficient per factor.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FluxForm {
    /// `cross(d_f, Δc_f(1))`, exact.
    #[serde(with = "rational::serde_q::vec")]
    pub swept: Vec<Q>,
    /// `θ̂_f = A_f · swept_f`.
    pub theta_hat: Vec<f64>,
}

pub fn theta_psi(iso: &LineIsotopy, brane: &Brane, ambient: &TorusAmbient) -> FluxForm {
    let swept: Vec<Q> = brane.lines.iter().zip(iso.total()).map(|(l, dc)| -cross_qd(dc, &l.d)).collect();
    let theta_hat = swept.iter().zip(&ambient.area).map(|(s, a)| a * rational::to_f64(*s)).collect();
    FluxForm { swept, theta_hat }
}

/// Exactness of the flux form and, when exact, its constant primitive.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Exactness {
    pub exact: bool,
    /// The primitive `f` is constant on each circle; `f(p_{m+1}) - f(p_m)` is then 0.
    pub primitive_difference: Option<f64>,
}

pub fn is_exact(iso: &LineIsotopy, brane: &Brane, ambient: &TorusAmbient) -> Exactness {
    let exact = theta_psi(iso, brane, ambient).swept.iter().all(Zero::is_zero);
    Exactness { exact, primitive_difference: exact.then_some(0.0) }
}

/// Holonomy of the moved brane, `β + b·cross(d, Δc(1))` mod 1.
pub fn drifted_holonomy(iso: &LineIsotopy, brane: &Brane, ambient: &TorusAmbient) -> Vec<Q> {
    let flux = theta_psi(iso, brane, ambient);
    brane.holonomy.iter().zip(&flux.swept).zip(&ambient.b).map(|((h, s), b)| frac(*h + b * s)).collect()
}

/// The brane at the end of the isotopy, with drifted holonomy.
pub fn moved_brane(iso: &LineIsotopy, brane: &Brane, ambient: &TorusAmbient) -> Brane {
    let lines = brane.lines.iter().zip(iso.total()).map(|(l, dc)| AffineLine::new(l.d, add(&l.c, dc))).collect();
    Brane {
        lines,
        alpha_shift: brane.alpha_shift.clone(),
        holonomy: drifted_holonomy(iso, brane, ambient),
    }
}

/// Exact corner motion in one factor for a displacement `c` of line `m`.
struct Tracker {
    prev: Direction,
    cur: Direction,
    next: Direction,
}

impl Tracker {
    fn new(branes: &[Brane], m: usize, f: usize) -> Self {
        Tracker { prev: branes[m - 1].lines[f].d, cur: branes[m].lines[f].d, next: branes[m + 1].lines[f].d }
    }

    /// Displacement of the corner on `L_{m-1} ∩ L_m`, in periods of `L_{m-1}`.
    fn lambda(&self, c: &Pt) -> Q {
        cross_qd(c, &self.cur) / Q::from_integer(self.prev.cross(&self.cur) as i128)
    }

    /// Displacement of the corner on `L_m ∩ L_{m+1}`, in periods of `L_{m+1}`.
    fn mu(&self, c: &Pt) -> Q {
        cross_qd(c, &self.cur) / Q::from_integer(self.next.cross(&self.cur) as i128)
    }

    /// Arc parameter change of the tracked corners on the moving line.
    fn s_prev(&self, c: &Pt) -> Q {
        scalar_along(&sub(&scale_dir(self.lambda(c), &self.prev), c), &self.cur)
    }

    fn s_next(&self, c: &Pt) -> Q {
        scalar_along(&sub(&scale_dir(self.mu(c), &self.next), c), &self.cur)
    }
}

/// Exact phases (in turns) of the transported morphisms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransportPhases {
    /// Multiplies `ρ_m ∈ CF(L_{m-1}, L_m)`.
    #[serde(with = "rational::serde_q")]
    pub incoming: Q,
    /// Multiplies `ρ_{m+1} ∈ CF(L_m, L_{m+1})`.
    #[serde(with = "rational::serde_q")]
    pub outgoing: Q,
    /// Per factor: `λ`, the shift of the incoming corners along `L_{m-1}`.
    #[serde(with = "rational::serde_q::vec")]
    pub lambda: Vec<Q>,
    /// Per factor: `μ`, the shift of the outgoing corners along `L_{m+1}`.
    #[serde(with = "rational::serde_q::vec")]
    pub mu: Vec<Q>,
}

impl TransportPhases {
    pub fn incoming_factor(&self) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI * rational::to_f64(frac(self.incoming)))
    }

    pub fn outgoing_factor(&self) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI * rational::to_f64(frac(self.outgoing)))
    }
}

/// `∫ β(t) ds(t)` along the path, where `β` drifts on the moving line and
/// `s` is the arc parameter of a tracked corner. Both are affine per segment.
fn moving_holonomy(iso: &LineIsotopy, brane: &Brane, ambient: &TorusAmbient, f: usize, s: impl Fn(&Pt) -> Q) -> Q {
    let d = brane.lines[f].d;
    let beta = |c: &Pt| brane.holonomy[f] - ambient.b[f] * cross_qd(c, &d);
    iso.segments()
        .map(|(a, b)| {
            let (ca, cb) = (&a[f], &b[f]);
            (s(cb) - s(ca)) * (beta(ca) + beta(cb)) / Q::from_integer(2)
        })
        .sum()
}

pub fn transport_phases(iso: &LineIsotopy, branes: &[Brane], ambient: &TorusAmbient) -> Result<TransportPhases> {
    iso.validate(branes)?;
    let m = iso.brane;
    let mut t = TransportPhases { incoming: Q::zero(), outgoing: Q::zero(), lambda: vec![], mu: vec![] };
    for f in 0..iso.n() {
        let tr = Tracker::new(branes, m, f);
        let end = &iso.total()[f];
        let (lam, mu) = (tr.lambda(end), tr.mu(end));
        let hol_in = moving_holonomy(iso, &branes[m], ambient, f, |c| tr.s_prev(c));
        let hol_out = moving_holonomy(iso, &branes[m], ambient, f, |c| tr.s_next(c));
        t.incoming += hol_in - branes[m - 1].holonomy[f] * lam;
        t.outgoing += branes[m + 1].holonomy[f] * mu - hol_out;
        t.lambda.push(lam);
        t.mu.push(mu);
    }
    t.incoming = frac(t.incoming);
    t.outgoing = frac(t.outgoing);
    Ok(t)
}

/// `(ρ'_m, ρ'_{m+1})` for input scalars at a pair of tracked corners.
pub fn transported_morphisms(
    rho_m: Complex64,
    rho_m1: Complex64,
    iso: &LineIsotopy,
    branes: &[Brane],
    ambient: &TorusAmbient,
) -> Result<(Complex64, Complex64)> {
    let t = transport_phases(iso, branes, ambient)?;
    Ok((rho_m * t.incoming_factor(), rho_m1 * t.outgoing_factor()))
}

fn move_generator(g: &Generator, shift: &[Q], dirs: impl Fn(usize) -> Direction) -> Generator {
    Generator {
        point: g.point.iter().enumerate().map(|(f, p)| reduce_point(&add(p, &scale_dir(shift[f], &dirs(f))))).collect(),
        degree: g.degree,
    }
}

/// Moves the generators of the two inputs at the moving brane and applies the transport phases.
pub fn transport_inputs(inputs: &[CFElement], iso: &LineIsotopy, branes: &[Brane], ambient: &TorusAmbient) -> Result<Vec<CFElement>> {
    let t = transport_phases(iso, branes, ambient)?;
    let m = iso.brane;
    let mut out = inputs.to_vec();
    let (fi, fo) = (t.incoming_factor(), t.outgoing_factor());
    out[m - 1] = CFElement::new(
        inputs[m - 1]
            .coeffs
            .iter()
            .map(|(g, c)| (move_generator(g, &t.lambda, |f| branes[m - 1].lines[f].d), c * fi))
            .collect(),
    );
    out[m] = CFElement::new(
        inputs[m]
            .coeffs
            .iter()
            .map(|(g, c)| (move_generator(g, &t.mu, |f| branes[m + 1].lines[f].d), c * fo))
            .collect(),
    );
    Ok(out)
}

/// Arc lengths `(ℓ_{m-1}, ℓ_m, ℓ_{m+1})` of a factor class after displacing line `m` by `c`.
fn tracked_arcs(fc: &FactorClass, tr: &Tracker, m: usize, c: &Pt) -> [Q; 3] {
    let ds = fc.arc_displacements();
    let (lam, mu) = (tr.lambda(c), tr.mu(c));
    let pm = add(&fc.corners[m], &scale_dir(lam, &tr.prev));
    let pm1 = add(&fc.corners[m + 1], &scale_dir(mu, &tr.next));
    [ds[m - 1] + lam, scalar_along(&sub(&pm1, &pm), &tr.cur), ds[m + 1] - mu]
}

/// Exact flux `Σ_f A_f ∫ cross(d_f, dc) ℓ_f(c)` swept by arc `m` of the class.
pub fn class_flux(c: &PolygonClass, iso: &LineIsotopy, branes: &[Brane], ambient: &TorusAmbient) -> Result<f64> {
    iso.validate(branes)?;
    let m = iso.brane;
    let mut total = 0.0;
    for (f, fc) in c.factors.iter().enumerate() {
        let tr = Tracker::new(branes, m, f);
        let mut flux = Q::zero();
        for (a, b) in iso.segments() {
            let (ca, cb) = (&a[f], &b[f]);
            let swept = -cross_qd(&sub(cb, ca), &tr.cur);
            let (la, lb) = (tracked_arcs(fc, &tr, m, ca)[1], tracked_arcs(fc, &tr, m, cb)[1]);
            flux += swept * (la + lb) / Q::from_integer(2);
        }
        total += ambient.area[f] * rational::to_f64(flux);
    }
    Ok(total)
}

/// `e^{2π ∫_{∂_m u} θ_ψ}` with the boundary arc tracked along the isotopy.
pub fn predicted_weight_ratio(c: &PolygonClass, iso: &LineIsotopy, branes: &[Brane], ambient: &TorusAmbient) -> Result<f64> {
    Ok((2.0 * PI * class_flux(c, iso, branes, ambient)?).exp())
}

/// The class at the end of the isotopy, translated so that its first input corner lies in `[0,1)^2`.
fn transported_class(c: &PolygonClass, iso: &LineIsotopy, branes: &[Brane]) -> Result<PolygonClass> {
    let m = iso.brane;
    let mut factors = Vec::new();
    for (f, fc) in c.factors.iter().enumerate() {
        let tr = Tracker::new(branes, m, f);
        let end = &iso.total()[f];
        for w in &iso.path {
            let arcs = tracked_arcs(fc, &tr, m, &w[f]);
            let start = tracked_arcs(fc, &tr, m, &[Q::zero(), Q::zero()]);
            if arcs.iter().zip(&start).any(|(a, s)| a.is_zero() || a.signum() != s.signum()) {
                return Err(Error::TransversalityLost(format!(
                    "a boundary arc of class {:?} collapses in factor {f}",
                    fc.lift_indices
                )));
            }
        }
        let mut corners = fc.corners.clone();
        corners[m] = add(&corners[m], &scale_dir(tr.lambda(end), &tr.prev));
        corners[m + 1] = add(&corners[m + 1], &scale_dir(tr.mu(end), &tr.next));
        let base = [Q::from_integer(corners[1][0].floor().to_integer()), Q::from_integer(corners[1][1].floor().to_integer())];
        let corners = corners.iter().map(|p| sub(p, &base)).collect();
        factors.push(FactorClass { lift_indices: vec![], corners, directions: fc.directions.clone() });
    }
    Ok(PolygonClass { factors })
}

fn corner_key(c: &PolygonClass) -> Vec<Vec<Pt>> {
    c.factors.iter().map(|f| f.corners.clone()).collect()
}

/// Per-class comparison of computed and predicted weight ratios.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassRatio {
    pub output: usize,
    pub lift_indices: Vec<Vec<i64>>,
    pub post_lift_indices: Vec<Vec<i64>>,
    pub predicted: f64,
    pub computed: Complex64,
    pub rel_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct IsotopyReport {
    pub theta: FluxForm,
    pub exactness: Exactness,
    #[serde(with = "rational::serde_q::vec")]
    pub holonomy_drift: Vec<Q>,
    pub transport: TransportPhases,
    pub classes: Vec<ClassRatio>,
    pub worst_class_error: f64,
    /// Label of the aggregate comparison: the per-class theorem summed over classes.
    pub aggregate_label: String,
    /// `max_g |Σ_u predicted(u)·w(u) - μ'(ρ')(g)|`.
    pub aggregate_error: f64,
    /// Bound on the part of the aggregate sum lost to truncation, including the tail of `μ'`.
    pub aggregate_truncation: f64,
    pub mu_before: CFElement,
    pub mu_after: CFElement,
    /// `max_g |μ'(ρ')(g) - μ(ρ)(g)|`, the invariance check for exact isotopies.
    pub mu_change: f64,
    pub tol: f64,
    pub passes: bool,
}

/// Checks the per-class weight change, the aggregate sum and, for exact
/// isotopies, invariance of `μ^k` under transport of the inputs.
pub fn verify_isotopy_theorem(
    branes: &[Brane],
    inputs: &[CFElement],
    ambient: &TorusAmbient,
    iso: &LineIsotopy,
    opts: &MuOptions,
) -> Result<IsotopyReport> {
    iso.validate(branes)?;
    let m = iso.brane;
    let tol = opts.tol;
    let theta = theta_psi(iso, &branes[m], ambient);
    let exactness = is_exact(iso, &branes[m], ambient);
    let transport = transport_phases(iso, branes, ambient)?;
    let mut post_branes = branes.to_vec();
    post_branes[m] = moved_brane(iso, &branes[m], ambient);
    let holonomy_drift =
        post_branes[m].holonomy.iter().zip(&branes[m].holonomy).map(|(a, b)| frac(*a - *b)).collect();
    let post_inputs = transport_inputs(inputs, iso, branes, ambient)?;

    let before = mu(branes, inputs, ambient, opts)?;
    let after = mu(&post_branes, &post_inputs, ambient, opts)?;
    let cutoff = rational::from_f64_exact(before.cutoff).expect("cutoff is dyadic");

    let mut classes = Vec::new();
    let mut aggregate: BTreeMap<Generator, Complex64> = BTreeMap::new();
    let mut truncation = after.tail_bound;
    let outputs: Vec<Generator> = before.output.coeffs.keys().cloned().collect();
    for (oi, g0) in outputs.iter().enumerate() {
        let mut combos: Vec<Vec<(&Generator, Complex64, &Generator, Complex64)>> = vec![vec![]];
        for (pre, post) in inputs.iter().zip(&post_inputs) {
            let pairs: Vec<_> = pre.coeffs.iter().zip(&post.coeffs).collect();
            combos = combos
                .into_iter()
                .flat_map(|prefix| {
                    pairs.iter().map(move |((g, c), (g2, c2))| {
                        let mut v = prefix.clone();
                        v.push((*g, **c, *g2, **c2));
                        v
                    })
                })
                .collect();
        }
        let mut sum = Complex64::zero();
        for combo in combos {
            let gens: Vec<&Generator> = combo.iter().map(|x| x.0).collect();
            let rhos: Vec<Complex64> = combo.iter().map(|x| x.1).collect();
            let pre = enumerate_classes(branes, &gens, g0, cutoff)?;
            let mut images = Vec::new();
            for u in pre.classes.iter().filter(|u| holomorphic_count(u) == 1) {
                let image = transported_class(u, iso, branes)?;
                images.push((u, image));
            }
            let big = images.iter().map(|(_, im)| im.total_area()).max().unwrap_or(cutoff) + Q::from_integer(1);
            let big = big.max(cutoff);
            let post_gens: Vec<&Generator> = combo.iter().map(|x| x.2).collect();
            let post_rhos: Vec<Complex64> = combo.iter().map(|x| x.3).collect();
            let post = enumerate_classes(&post_branes, &post_gens, g0, big)?;
            let mut by_key: BTreeMap<Vec<Vec<Pt>>, &PolygonClass> = BTreeMap::new();
            for v in post.classes.iter().filter(|v| holomorphic_count(v) == 1) {
                by_key.insert(corner_key(v), v);
            }
            let mut matched = std::collections::BTreeSet::new();
            for (u, image) in &images {
                let key = corner_key(image);
                let Some(v) = by_key.get(&key) else {
                    return Err(Error::BijectionFailed(format!("class {:?} has no partner after the isotopy", u.lift_indices())));
                };
                matched.insert(key);
                let w = class_weight(u, &rhos, branes, ambient)?;
                let w2 = class_weight(v, &post_rhos, &post_branes, ambient)?;
                let predicted = predicted_weight_ratio(u, iso, branes, ambient)?;
                let computed = w2.value / w.value;
                let rel_error = (computed / predicted - 1.0).norm();
                sum += w.value * predicted;
                classes.push(ClassRatio {
                    output: oi,
                    lift_indices: u.lift_indices(),
                    post_lift_indices: v.lift_indices(),
                    predicted,
                    computed,
                    rel_error,
                });
            }
            // Post classes without a partner must come from pre-classes beyond the cutoff.
            let back = iso.reversed();
            for (key, v) in &by_key {
                if matched.contains(key) {
                    continue;
                }
                let pre_image = transported_class(v, &back, &post_branes)?;
                if pre_image.total_area() <= cutoff {
                    return Err(Error::BijectionFailed(format!(
                        "class {:?} after the isotopy has no partner before it",
                        v.lift_indices()
                    )));
                }
                let w2 = class_weight(v, &post_rhos, &post_branes, ambient)?;
                truncation += w2.value.norm();
            }
        }
        aggregate.insert(g0.clone(), sum);
    }
    let aggregate_error = aggregate
        .iter()
        .map(|(g, s)| (s - after.output.coefficient(g)).norm())
        .fold(0.0, f64::max);
    let mu_change = before.output.max_abs_diff(&after.output);
    let worst_class_error = classes.iter().map(|c| c.rel_error).fold(0.0, f64::max);
    let scale = after.output.max_abs().max(1.0);
    let mut passes = worst_class_error < tol.max(1e-10) && aggregate_error <= truncation + tol * scale;
    if exactness.exact {
        passes &= mu_change <= before.tail_bound + after.tail_bound + tol * scale;
    }
    Ok(IsotopyReport {
        theta,
        exactness,
        holonomy_drift,
        transport,
        classes,
        worst_class_error,
        aggregate_label: "per-class theorem aggregate".into(),
        aggregate_error,
        aggregate_truncation: truncation,
        mu_before: before.output,
        mu_after: after.output,
        mu_change,
        tol,
        passes,
    })
}
