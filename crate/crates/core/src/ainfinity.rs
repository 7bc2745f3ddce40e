//! Weights of polygon classes and the structure maps `μ^k`.
//!
//! A morphism `ρ ∈ CF(L_0, L_1)` is a complex coefficient per intersection
//! point, each point carrying the unit frame of the trivial line bundles. A
//! contributing class `u` with inputs `ρ_1, …, ρ_k` has weight
//!
//! ```text
//! Π_f e^{2πi τ_f area_f} · Π_j e^{2πi β_j Δs_j} · Π_j ρ_j
//! ```
//!
//! where transport over `+1` period of a circle multiplies by `e^{2πiβ}`. The
//! phase exponent `Σ b_f area_f + Σ β Δs` is an exact rational reduced mod 1,
//! and the modulus exponent `-2π Σ A_f area_f` never sees `b` or `β`.
//!
//! `μ^k` raises the area cutoff geometrically until a rigorous bound on the
//! excluded classes drops below the tolerance.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flat_torus::{intersect, Brane, Generator, TorusAmbient};
use crate::polygon::{class_geometry, enumerate_classes, holomorphic_count, Enumeration, PolygonClass, Quadratic};
use crate::rational::{self, frac, Q};

/// Floating-point summation mode for the final series.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Double,
    /// Neumaier-compensated summation of the real and imaginary parts.
    Compensated,
}

impl Precision {
    pub const ENV: &'static str = "FUKAYA_PRECISION";

    /// Reads the default from `FUKAYA_PRECISION`, falling back to double.
    pub fn from_env() -> Self {
        std::env::var(Self::ENV).ok().and_then(|v| v.parse().ok()).unwrap_or_default()
    }
}

impl std::str::FromStr for Precision {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "double" => Ok(Precision::Double),
            "compensated" => Ok(Precision::Compensated),
            other => Err(Error::InvalidInput(format!("unknown precision mode {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Clone, Copy, Debug)]
struct ComplexAcc {
    mode: Precision,
    re: Neumaier,
    im: Neumaier,
}

impl ComplexAcc {
    fn new(mode: Precision) -> Self {
        ComplexAcc { mode, re: Neumaier::default(), im: Neumaier::default() }
    }

    fn add(&mut self, z: Complex64) {
        match self.mode {
            Precision::Double => {
                self.re.sum += z.re;
                self.im.sum += z.im;
            }
            Precision::Compensated => {
                self.re.add(z.re);
                self.im.add(z.im);
            }
        }
    }

    fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// A morphism: complex coefficients over intersection points of one brane pair.
///
/// In JSON it is a list of `{"generator": …, "coefficient": {"re": …, "im": …}}`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<Term>", from = "Vec<Term>")]
pub struct CFElement {
    pub coeffs: BTreeMap<Generator, Complex64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub generator: Generator,
    pub coefficient: Coefficient,
}

impl From<CFElement> for Vec<Term> {
    fn from(el: CFElement) -> Self {
        el.coeffs
            .into_iter()
            .map(|(generator, c)| Term { generator, coefficient: Coefficient { re: c.re, im: c.im } })
            .collect()
    }
}

impl From<Vec<Term>> for CFElement {
    fn from(terms: Vec<Term>) -> Self {
        CFElement {
            coeffs: terms
                .into_iter()
                .map(|t| (t.generator, Complex64::new(t.coefficient.re, t.coefficient.im)))
                .collect(),
        }
    }
}

impl CFElement {
    pub fn new(coeffs: BTreeMap<Generator, Complex64>) -> Self {
        CFElement { coeffs }
    }

    /// Sum of the given generators with coefficient 1.
    pub fn unit_sum(gens: impl IntoIterator<Item = Generator>) -> Self {
        CFElement { coeffs: gens.into_iter().map(|g| (g, Complex64::new(1.0, 0.0))).collect() }
    }

    /// Every generator of `CF(b0, b1)` with coefficient 1.
    pub fn all_ones(b0: &Brane, b1: &Brane) -> Result<Self> {
        Ok(Self::unit_sum(intersect(b0, b1)?))
    }

    pub fn scaled(&self, lambda: Complex64) -> Self {
        CFElement { coeffs: self.coeffs.iter().map(|(g, c)| (g.clone(), c * lambda)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|c| c.is_zero())
    }

    /// The common degree of the generators, if homogeneous and nonempty.
    pub fn degree(&self) -> Option<i64> {
        let mut it = self.coeffs.keys().map(|g| g.degree);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn coefficient(&self, g: &Generator) -> Complex64 {
        self.coeffs.get(g).copied().unwrap_or_default()
    }

    /// Largest coefficientwise distance, over the union of supports.
    pub fn max_abs_diff(&self, other: &CFElement) -> f64 {
        self.coeffs
            .keys()
            .chain(other.coeffs.keys())
            .map(|g| (self.coefficient(g) - other.coefficient(g)).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Weight of one class together with its exact ingredients.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Weight {
    pub value: Complex64,
    /// `-2π Σ A_f area_f`.
    pub real_exponent: f64,
    /// `Σ b_f area_f + Σ β Δs`, reduced into `[0, 1)`.
    #[serde(with = "rational::serde_q")]
    pub phase_exponent: Q,
    #[serde(with = "rational::serde_q::vec")]
    pub area: Vec<Q>,
    /// `Σ_j Σ_f β_{j,f} Δs_{j,f}` before reduction.
    #[serde(with = "rational::serde_q")]
    pub holonomy_exponent: Q,
    pub input_product: Complex64,
}

impl Weight {
    /// `|value|` recomputed from the real exponent and the inputs alone.
    pub fn modulus(&self) -> f64 {
        self.real_exponent.exp() * self.input_product.norm()
    }
}

fn unit_phase(x: Q) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * rational::to_f64(frac(x)))
}

/// Weight of a contributing class with input scalars `ρ_1, …, ρ_k`.
pub fn class_weight(c: &PolygonClass, inputs: &[Complex64], branes: &[Brane], ambient: &TorusAmbient) -> Result<Weight> {
    if holomorphic_count(c) == 0 {
        return Err(Error::NonContributingClass);
    }
    if branes.len() != c.k() + 1 || inputs.len() != c.k() || ambient.n != c.factors.len() {
        return Err(Error::InvalidInput("class, branes, inputs and ambient disagree in size".into()));
    }
    let geom = class_geometry(c)?;
    let mut real_exponent = 0.0;
    let mut b_phase = Q::zero();
    let mut holonomy_exponent = Q::zero();
    for (f, area) in geom.signed_area.iter().enumerate() {
        real_exponent += -2.0 * PI * ambient.area[f] * rational::to_f64(*area);
        b_phase += ambient.b[f] * area;
        for (j, ds) in geom.arc_displacement[f].iter().enumerate() {
            holonomy_exponent += branes[j].holonomy[f] * ds;
        }
    }
    let phase_exponent = frac(b_phase + holonomy_exponent);
    let input_product: Complex64 = inputs.iter().product();
    let value = unit_phase(phase_exponent) * real_exponent.exp() * input_product;
    Ok(Weight { value, real_exponent, phase_exponent, area: geom.signed_area, holonomy_exponent, input_product })
}

/// Tail of `Σ_j e^{-2πA q(j)}` over the `j` with `q(j) > cutoff`.
fn quadratic_tail(q: &Quadratic, cutoff: Q, area: f64) -> f64 {
    let decay = |x: Q| (-2.0 * PI * area * rational::to_f64(x)).exp();
    let geometric = |step: Q| -(-2.0 * PI * area * rational::to_f64(step)).exp_m1();
    let start = rational::floor_i64(q.vertex()) + 1;
    let mut hi = start;
    while q.eval(hi) <= cutoff {
        hi += 1;
    }
    let mut lo = start - 1;
    while q.eval(lo) <= cutoff {
        lo -= 1;
    }
    let two = Q::from_integer(2);
    let step_hi = q.a * (two * Q::from_integer(hi as i128) + 1) + q.b;
    let step_lo = q.a * (Q::from_integer(1) - two * Q::from_integer(lo as i128)) - q.b;
    decay(q.eval(hi)) / geometric(step_hi) + decay(q.eval(lo)) / geometric(step_lo)
}

/// Upper bound on `Σ e^{-2πA q(j)}` over all `j` with `q(j) > cutoff`,
/// summed over the given quadratics.
///
/// Beyond the first excluded index on either side of the vertex, consecutive
/// values of `q` grow by at least the first step, so each side is dominated by
/// a geometric series.
pub fn tail_bound(quadratics: &[Quadratic], cutoff: Q, area: f64) -> Result<f64> {
    if quadratics.iter().any(|q| !q.a.is_positive()) {
        return Err(Error::NonPositiveLeadingCoefficient);
    }
    Ok(quadratics.iter().map(|q| quadratic_tail(q, cutoff, area)).sum())
}

/// Bound for polygons with four or more corners from the box count
/// `N(X) = Π_j (2 r_j X + 1)` of classes with area at most `X`.
fn polygon_tail(rates: &[f64], cutoff: f64, area: f64) -> f64 {
    let count = |x: f64| rates.iter().map(|r| 2.0 * r * x + 3.0).product::<f64>();
    let term = |t: f64| count(cutoff + t + 1.0) * (-2.0 * PI * area * (cutoff + t)).exp();
    let decay = (-2.0 * PI * area).exp();
    let mut total = 0.0;
    let mut t = 0.0;
    loop {
        let cur = term(t);
        total += cur;
        let ratio = ((cutoff + t + 3.0) / (cutoff + t + 2.0)).powi(rates.len() as i32) * decay;
        if ratio < 0.5 && cur <= total * 1e-17 {
            return total + cur * ratio / (1.0 - ratio);
        }
        if cur == 0.0 && t > 0.0 {
            return total;
        }
        t += 1.0;
    }
}

/// Bound on the total modulus of contributing classes left out of `e`.
fn enumeration_tail(e: &Enumeration, ambient: &TorusAmbient, k: usize) -> f64 {
    if k <= 1 {
        return 0.0;
    }
    let cutoff = e.cutoff;
    if k >= 3 {
        let fe = &e.per_factor[0];
        return polygon_tail(&fe.window_rates, rational::to_f64(cutoff), ambient.area[0]);
    }
    let decay = |f: usize, a: Q| (-2.0 * PI * ambient.area[f] * rational::to_f64(a)).exp();
    let mut eps = Vec::new();
    let mut mass = Vec::new();
    let mut factor_lists: Vec<Vec<(Q, f64)>> = Vec::new();
    for (f, fe) in e.per_factor.iter().enumerate() {
        let quads: Vec<Quadratic> = fe.families.iter().filter(|fa| fa.holomorphic).map(|fa| fa.quadratic).collect();
        eps.push(quads.iter().map(|q| quadratic_tail(q, cutoff, ambient.area[f])).sum::<f64>());
        let list: Vec<(Q, f64)> = fe
            .classes
            .iter()
            .filter(|c| c.is_convex_ccw())
            .map(|c| {
                let a = c.signed_area();
                (a, decay(f, a))
            })
            .collect();
        mass.push(list.iter().map(|x| x.1).sum::<f64>());
        factor_lists.push(list);
    }
    if e.per_factor.len() == 1 {
        return eps[0];
    }
    // Classes with some factor beyond the cutoff: Π(M_f + ε_f) - Π M_f, expanded without cancellation.
    let (mut m_prod, mut extra) = (1.0, 0.0);
    for (m, ep) in mass.iter().zip(&eps) {
        extra = extra * (m + ep) + m_prod * ep;
        m_prod *= m;
    }
    // Tuples of in-cutoff factor classes whose total area exceeds the cutoff.
    let mut partial: Vec<(Q, f64)> = vec![(Q::zero(), 1.0)];
    for list in &factor_lists {
        partial = partial.iter().flat_map(|(a, w)| list.iter().map(move |(b, v)| (*a + b, w * v))).collect();
    }
    extra + partial.iter().filter(|(a, _)| *a > cutoff).map(|x| x.1).sum::<f64>()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuOptions {
    pub tol: f64,
    pub max_cutoff: f64,
    pub precision: Precision,
}

impl Default for MuOptions {
    fn default() -> Self {
        MuOptions { tol: 1e-12, max_cutoff: 4096.0, precision: Precision::from_env() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MuResult {
    pub output: CFElement,
    pub degree: i64,
    /// Largest per-coefficient bound on the excluded classes.
    pub tail_bound: f64,
    pub classes_used: usize,
    pub cutoff: f64,
    /// Per input slot: largest `Σ |term| / |ρ_j(g_j)|` over output coefficients, tail included.
    pub sensitivity: Vec<f64>,
}

struct OutputSum {
    value: Complex64,
    tail: f64,
    classes: usize,
    sensitivity: Vec<f64>,
}

fn cartesian(inputs: &[CFElement]) -> Vec<Vec<(&Generator, Complex64)>> {
    let mut combos: Vec<Vec<(&Generator, Complex64)>> = vec![vec![]];
    for el in inputs {
        combos = combos
            .into_iter()
            .flat_map(|prefix| {
                el.coeffs.iter().map(move |(g, c)| {
                    let mut v = prefix.clone();
                    v.push((g, *c));
                    v
                })
            })
            .collect();
    }
    combos
}

fn sum_for_output(
    branes: &[Brane],
    inputs: &[CFElement],
    g0: &Generator,
    cutoff: Q,
    ambient: &TorusAmbient,
    precision: Precision,
) -> Result<OutputSum> {
    let k = inputs.len();
    let mut acc = ComplexAcc::new(precision);
    let mut tail = 0.0;
    let mut classes = 0;
    let mut sensitivity = vec![0.0; k];
    for combo in cartesian(inputs) {
        let gens: Vec<&Generator> = combo.iter().map(|x| x.0).collect();
        let rhos: Vec<Complex64> = combo.iter().map(|x| x.1).collect();
        let e = enumerate_classes(branes, &gens, g0, cutoff)?;
        let combo_tail = enumeration_tail(&e, ambient, k);
        let mut mass = combo_tail;
        for c in e.classes.iter().filter(|c| holomorphic_count(c) == 1) {
            let w = class_weight(c, &rhos, branes, ambient)?;
            acc.add(w.value);
            mass += w.real_exponent.exp();
            classes += 1;
        }
        let abs: Vec<f64> = rhos.iter().map(|r| r.norm()).collect();
        tail += combo_tail * abs.iter().product::<f64>();
        for (j, s) in sensitivity.iter_mut().enumerate() {
            let others: f64 = abs.iter().enumerate().filter(|(i, _)| *i != j).map(|x| x.1).product();
            *s += mass * others;
        }
    }
    Ok(OutputSum { value: acc.value(), tail, classes, sensitivity })
}

/// `μ^k(ρ_k, …, ρ_1)` for `ρ_j ∈ CF(b_{j-1}, b_j)`, given as `inputs = [ρ_1, …, ρ_k]`.
///
/// The output lives in `CF(b_0, b_k)` in degree `2 - k + Σ deg ρ_j`; every
/// generator of that degree is present in the result, possibly with a zero
/// coefficient.
pub fn mu(branes: &[Brane], inputs: &[CFElement], ambient: &TorusAmbient, opts: &MuOptions) -> Result<MuResult> {
    let k = inputs.len();
    if k == 0 || branes.len() != k + 1 {
        return Err(Error::InvalidInput(format!("μ^k needs k >= 1 inputs and k+1 branes, got {k} and {}", branes.len())));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    ambient.validate()?;
    for b in branes {
        b.validate()?;
        b.check_ambient(ambient)?;
    }
    for (j, el) in inputs.iter().enumerate() {
        let (b0, b1) = (&branes[j], &branes[j + 1]);
        for g in el.coeffs.keys() {
            if !b0.contains(&g.point) || !b1.contains(&g.point) {
                return Err(Error::InvalidInput(format!("input {} has a generator off its brane pair", j + 1)));
            }
        }
        if el.degree().is_none() && !el.coeffs.is_empty() {
            return Err(Error::InvalidInput(format!("input {} is not homogeneous", j + 1)));
        }
    }
    for j in 0..k {
        crate::flat_torus::factor_intersections(&branes[j], &branes[j + 1])?;
    }
    let outputs = intersect(&branes[0], &branes[k])?;
    let in_degrees: Vec<i64> = inputs
        .iter()
        .zip(branes.windows(2))
        .map(|(el, w)| el.degree().map(Ok).unwrap_or_else(|| crate::grading::brane_degree(&w[0], &w[1])))
        .collect::<Result<_>>()?;
    let degree = 2 - k as i64 + in_degrees.iter().sum::<i64>();
    let outputs: Vec<Generator> = outputs.into_iter().filter(|g| g.degree == degree).collect();

    let mut cutoff = 1.0;
    loop {
        let c = rational::from_f64_exact(cutoff).expect("cutoff is a power of two");
        let sums = outputs
            .par_iter()
            .map(|g0| sum_for_output(branes, inputs, g0, c, ambient, opts.precision))
            .collect::<Result<Vec<_>>>()?;
        let tail = sums.iter().map(|s| s.tail).fold(0.0, f64::max);
        if tail < opts.tol {
            let mut sensitivity = vec![0.0; k];
            for s in &sums {
                for (acc, v) in sensitivity.iter_mut().zip(&s.sensitivity) {
                    *acc = f64::max(*acc, *v);
                }
            }
            return Ok(MuResult {
                classes_used: sums.iter().map(|s| s.classes).sum(),
                output: CFElement { coeffs: outputs.iter().cloned().zip(sums.iter().map(|s| s.value)).collect() },
                degree,
                tail_bound: tail,
                cutoff,
                sensitivity,
            });
        }
        if cutoff * 2.0 > opts.max_cutoff {
            return Err(Error::ConvergenceFailure { achieved: tail, cutoff, tol: opts.tol });
        }
        cutoff *= 2.0;
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AssociativityReport {
    pub left: CFElement,
    pub right: CFElement,
    pub max_discrepancy: f64,
    /// Truncation budget of both sides plus a roundoff allowance.
    pub combined_tolerance: f64,
    pub passes: bool,
}

/// Compares `μ²(μ²(ρ_3, ρ_2), ρ_1)` with `μ²(ρ_3, μ²(ρ_2, ρ_1))`.
///
/// With `μ^1 = 0` and inputs of degree zero the `A∞` relation at `k = 3`
/// is plain associativity with no signs.
pub fn associativity_check(
    branes: &[Brane],
    inputs: &[CFElement],
    ambient: &TorusAmbient,
    opts: &MuOptions,
) -> Result<AssociativityReport> {
    if branes.len() != 4 || inputs.len() != 3 {
        return Err(Error::InvalidInput("associativity needs four branes and three inputs".into()));
    }
    let (b, r) = (branes, inputs);
    let inner_l = mu(&[b[1].clone(), b[2].clone(), b[3].clone()], &[r[1].clone(), r[2].clone()], ambient, opts)?;
    let outer_l = mu(&[b[0].clone(), b[1].clone(), b[3].clone()], &[r[0].clone(), inner_l.output.clone()], ambient, opts)?;
    let inner_r = mu(&[b[0].clone(), b[1].clone(), b[2].clone()], &[r[0].clone(), r[1].clone()], ambient, opts)?;
    let outer_r = mu(&[b[0].clone(), b[2].clone(), b[3].clone()], &[inner_r.output.clone(), r[2].clone()], ambient, opts)?;
    let budget_l = outer_l.tail_bound + outer_l.sensitivity[1] * inner_l.tail_bound;
    let budget_r = outer_r.tail_bound + outer_r.sensitivity[0] * inner_r.tail_bound;
    let scale = outer_l.output.max_abs().max(outer_r.output.max_abs()).max(1.0);
    let combined_tolerance = budget_l + budget_r + 1e-12 * scale;
    let max_discrepancy = outer_l.output.max_abs_diff(&outer_r.output);
    Ok(AssociativityReport {
        left: outer_l.output,
        right: outer_r.output,
        max_discrepancy,
        combined_tolerance,
        passes: max_discrepancy < combined_tolerance,
    })
}
