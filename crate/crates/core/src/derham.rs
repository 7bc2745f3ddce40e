//! Relative de Rham pairings on parametrized discs with boundary on a
//! submanifold `L ⊂ R^N`.
//!
//! A relative cocycle is a pair `(B, θ)` with `B` a closed 2-form on the
//! ambient space and `θ` a 1-form on `L` satisfying `j*B = dθ`. A relative
//! cycle here is a disc `f: D → R^N` given in polar parameters `(ρ, φ)` whose
//! boundary circle `ρ = 1` lands on `L`. The pairing is
//! `∫_D f*B − ∫_{∂D} (∂f)*θ`.
//!
//! Forms and maps are symbolic expressions, so pullbacks and exterior
//! derivatives are exact. Only the final integrals are numerical: a degree 5
//! rule on each triangle of a mesh of the parameter rectangle and
//! Gauss–Legendre on each boundary edge.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{c, var, Expr};
use crate::quadrature::gauss_legendre;

/// `Σ a_i dx_i` on `R^N`.
#[derive(Clone, Debug, PartialEq)]
pub struct Form1 {
    pub comps: Vec<Expr>,
}

/// `Σ_{i<j} b_ij dx_i∧dx_j` on `R^N`.
#[derive(Clone, Debug, PartialEq)]
pub struct Form2 {
    pub dim: usize,
    pub comps: BTreeMap<(usize, usize), Expr>,
}

impl Form1 {
    pub fn zero(dim: usize) -> Self {
        Form1 { comps: vec![Expr::zero(); dim] }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn d(&self) -> Form2 {
        let n = self.dim();
        let mut out = Form2::zero(n);
        for i in 0..n {
            for j in i + 1..n {
                out.set(i, j, self.comps[j].diff(i) - self.comps[i].diff(j));
            }
        }
        out
    }

    /// Pullback along `map` (one expression per ambient coordinate, in the source variables).
    pub fn pullback(&self, map: &[Expr], src_dim: usize) -> Form1 {
        let at: Vec<Expr> = self.comps.iter().map(|a| a.subst(map)).collect();
        let comps = (0..src_dim)
            .map(|p| at.iter().zip(map).fold(Expr::zero(), |acc, (a, f)| acc + a.clone() * f.diff(p)))
            .collect();
        Form1 { comps }
    }

    pub fn add(&self, other: &Form1) -> Form1 {
        Form1 { comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a.clone() + b.clone()).collect() }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.comps.iter().map(|e| e.eval(x)).collect()
    }
}

impl Form2 {
    pub fn zero(dim: usize) -> Self {
        Form2 { dim, comps: BTreeMap::new() }
    }

    /// `coeff · dx_i∧dx_j`.
    pub fn monomial(dim: usize, i: usize, j: usize, coeff: Expr) -> Self {
        let mut f = Form2::zero(dim);
        f.set(i, j, coeff);
        f
    }

    /// The standard symplectic form `Σ dx_{2k}∧dx_{2k+1}`.
    pub fn standard_symplectic(dim: usize) -> Self {
        let mut f = Form2::zero(dim);
        for k in 0..dim / 2 {
            f.set(2 * k, 2 * k + 1, c(1.0));
        }
        f
    }

    fn set(&mut self, i: usize, j: usize, e: Expr) {
        let (key, e) = if i < j { ((i, j), e) } else { ((j, i), -e) };
        if e.is_zero() {
            self.comps.remove(&key);
        } else {
            self.comps.insert(key, e);
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Expr {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => Expr::zero(),
            std::cmp::Ordering::Less => self.comps.get(&(i, j)).cloned().unwrap_or_else(Expr::zero),
            std::cmp::Ordering::Greater => -self.comps.get(&(j, i)).cloned().unwrap_or_else(Expr::zero),
        }
    }

    pub fn add(&self, other: &Form2) -> Form2 {
        let mut out = self.clone();
        for (&(i, j), e) in &other.comps {
            out.set(i, j, self.get(i, j) + e.clone());
        }
        out
    }

    /// Components `(dB)_{ijk}`, `i < j < k`.
    pub fn d(&self) -> Vec<((usize, usize, usize), Expr)> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let e = self.get(j, k).diff(i) - self.get(i, k).diff(j) + self.get(i, j).diff(k);
                    out.push(((i, j, k), e));
                }
            }
        }
        out
    }

    /// Coefficient of `du∧dv` in the pullback along a map from a 2-dimensional source.
    pub fn pullback_top(&self, map: &[Expr]) -> Expr {
        self.comps.iter().fold(Expr::zero(), |acc, (&(i, j), b)| {
            let jac = map[i].diff(0) * map[j].diff(1) - map[i].diff(1) * map[j].diff(0);
            acc + b.subst(map) * jac
        })
    }
}

/// A parametrized closed submanifold `L ⊂ R^N` of dimension 1 or 2, every
/// parameter being `2π`-periodic.
#[derive(Clone, Debug, PartialEq)]
pub struct Submanifold {
    pub name: String,
    pub ambient_dim: usize,
    pub param_dim: usize,
    pub embedding: Vec<Expr>,
}

impl Submanifold {
    /// The circle of radius `r` in `R^2`, parameter `s`.
    pub fn circle(r: f64) -> Self {
        Submanifold {
            name: format!("circle of radius {r}"),
            ambient_dim: 2,
            param_dim: 1,
            embedding: vec![c(r) * var(0).cos(), c(r) * var(0).sin()],
        }
    }

    /// `(cos a, sin a, cos b, sin b)`, Lagrangian for the standard form.
    pub fn clifford_torus() -> Self {
        Submanifold {
            name: "Clifford torus".into(),
            ambient_dim: 4,
            param_dim: 2,
            embedding: vec![var(0).cos(), var(0).sin(), var(1).cos(), var(1).sin()],
        }
    }

    /// `(cos a, cos b, sin a, sin b)`: the same torus with two coordinates
    /// swapped. The standard form restricts to `cos(a − b) da∧db`.
    pub fn twisted_torus() -> Self {
        Submanifold {
            name: "twisted torus".into(),
            ambient_dim: 4,
            param_dim: 2,
            embedding: vec![var(0).cos(), var(1).cos(), var(0).sin(), var(1).sin()],
        }
    }

    pub fn point(&self, params: &[f64]) -> Vec<f64> {
        self.embedding.iter().map(|e| e.eval(params)).collect()
    }
}

/// A pair `(B, θ)` on `(R^N, L)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RelCocycle {
    pub b: Form2,
    /// A 1-form on `L` in its parameters.
    pub theta: Form1,
    pub l: Submanifold,
}

/// Largest violations of `dB = 0` and `j*B = dθ` at sample points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CocycleCheck {
    pub max_db: f64,
    pub max_mismatch: f64,
    pub samples: usize,
}

const COCYCLE_TOL: f64 = 1e-9;

/// Deterministic points of the unit cube from the additive recurrence with
/// the generalized golden ratio.
fn sample_cube(dim: usize, count: usize) -> Vec<Vec<f64>> {
    let mut phi = 2.0f64;
    for _ in 0..32 {
        phi = (1.0 + phi).powf(1.0 / (dim as f64 + 1.0));
    }
    let alpha: Vec<f64> = (1..=dim).map(|k| (1.0 / phi.powi(k as i32)).fract()).collect();
    (1..=count).map(|i| alpha.iter().map(|a| (0.5 + a * i as f64).fract()).collect()).collect()
}

impl RelCocycle {
    pub fn new(b: Form2, theta: Form1, l: Submanifold) -> Result<Self> {
        if b.dim != l.ambient_dim || theta.dim() != l.param_dim {
            return Err(Error::InvalidInput("form dimensions do not match the submanifold".into()));
        }
        Ok(RelCocycle { b, theta, l })
    }

    /// `j*B − dθ` as the coefficient of `da∧db` on a 2-dimensional `L`, zero on curves.
    pub fn boundary_defect(&self) -> Expr {
        if self.l.param_dim < 2 {
            return Expr::zero();
        }
        let jb = self.b.pullback_top(&self.l.embedding);
        let dtheta = self.theta.comps[1].diff(0) - self.theta.comps[0].diff(1);
        jb - dtheta
    }

    pub fn check(&self) -> CocycleCheck {
        let samples = 64;
        let db = self.b.d();
        let max_db = sample_cube(self.b.dim, samples)
            .iter()
            .map(|u| {
                let x: Vec<f64> = u.iter().map(|t| 4.0 * t - 2.0).collect();
                db.iter().map(|(_, e)| e.eval(&x).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        let defect = self.boundary_defect();
        let max_mismatch = sample_cube(self.l.param_dim, samples)
            .iter()
            .map(|u| {
                let s: Vec<f64> = u.iter().map(|t| 2.0 * PI * t).collect();
                defect.eval(&s).abs()
            })
            .fold(0.0, f64::max);
        CocycleCheck { max_db, max_mismatch, samples }
    }

    pub fn validate(&self) -> Result<CocycleCheck> {
        let chk = self.check();
        if chk.max_db > COCYCLE_TOL || chk.max_mismatch > COCYCLE_TOL {
            return Err(Error::CocycleViolation(format!(
                "max |dB| = {:e}, max |j*B - dθ| = {:e}",
                chk.max_db, chk.max_mismatch
            )));
        }
        Ok(chk)
    }
}

/// `(B + dA, θ + j*A − dψ)`.
pub fn gauge_shift(c: &RelCocycle, a: &Form1, psi: &Expr) -> RelCocycle {
    let ja = a.pullback(&c.l.embedding, c.l.param_dim);
    let dpsi = Form1 { comps: (0..c.l.param_dim).map(|p| psi.diff(p)).collect() };
    let theta = Form1 { comps: c.theta.add(&ja).comps.into_iter().zip(dpsi.comps).map(|(t, d)| t - d).collect() };
    RelCocycle { b: c.b.add(&a.d()), theta, l: c.l.clone() }
}

/// A disc `f(ρ, φ)` with `ρ ∈ [0, 1]`, `φ ∈ [0, 2π]`, whose boundary `f(1, φ)`
/// equals `L(g(φ))`. The base mesh has `rho_cells × phi_cells` rectangles,
/// each split in two triangles, and refinement level `k` halves both sizes
/// `k` times.
#[derive(Clone, Debug, PartialEq)]
pub struct RelCycle {
    pub name: String,
    /// Ambient coordinates in the variables `(ρ, φ)`.
    pub map: Vec<Expr>,
    /// Parameters on `L` along the boundary, in the variable `φ`.
    pub boundary: Vec<Expr>,
    pub rho_cells: usize,
    pub phi_cells: usize,
}

/// The flat disc homotopy `ρ(1 + tερ(1 − ρ))·(cos(φ + tκρ²), sin(φ + tκρ²))`
/// at `t = 1`, bounding the circle of radius `r` with boundary parameter `φ + κ`.
pub fn deformed_disc(r: f64, eps: f64, kappa: f64) -> RelCycle {
    let (rho, phi) = (var(0), var(1));
    let radial = c(r) * rho.clone() * (c(1.0) + c(eps) * rho.clone() * (c(1.0) - rho.clone()));
    let angle = phi.clone() + c(kappa) * rho.powi(2);
    RelCycle {
        name: format!("deformed disc (eps = {eps}, kappa = {kappa})"),
        map: vec![radial.clone() * angle.clone().cos(), radial * angle.sin()],
        boundary: vec![var(0) + c(kappa)],
        rho_cells: 2,
        phi_cells: 8,
    }
}

pub fn flat_disc(r: f64) -> RelCycle {
    RelCycle { name: format!("flat disc of radius {r}"), ..deformed_disc(r, 0.0, 0.0) }
}

/// The cone `ρ·L(g(φ))` over a loop on `L`.
pub fn cone(l: &Submanifold, boundary: Vec<Expr>, name: &str) -> RelCycle {
    let on_l: Vec<Expr> = l.embedding.iter().map(|e| e.subst(&boundary)).collect();
    let phi_to_param = [var(1)];
    let map = on_l.iter().map(|e| var(0) * e.subst(&phi_to_param)).collect();
    RelCycle { name: name.into(), map, boundary, rho_cells: 2, phi_cells: 8 }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeshVertex {
    pub param: [f64; 2],
    pub image: Vec<f64>,
    /// Parameters on `L` for boundary vertices.
    pub l_param: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mesh {
    pub level: u32,
    pub vertices: Vec<MeshVertex>,
    /// Counterclockwise in the parameter rectangle.
    pub triangles: Vec<[usize; 3]>,
    /// Boundary edges in the direction of increasing `φ`.
    pub boundary_edges: Vec<[usize; 2]>,
}

const ON_L_TOL: f64 = 1e-9;

impl RelCycle {
    pub fn cells(&self, level: u32) -> (usize, usize) {
        (self.rho_cells << level, self.phi_cells << level)
    }

    /// Mesh size in the parameter rectangle, scaled so the `φ` range is 1.
    pub fn mesh_size(&self, level: u32) -> f64 {
        let (nr, np) = self.cells(level);
        (1.0 / nr as f64).max(1.0 / np as f64)
    }

    pub fn mesh(&self, level: u32) -> Result<Mesh> {
        let (nr, np) = self.cells(level);
        let idx = |i: usize, j: usize| i * (np + 1) + j;
        let mut vertices = Vec::with_capacity((nr + 1) * (np + 1));
        for i in 0..=nr {
            for j in 0..=np {
                let param = [i as f64 / nr as f64, 2.0 * PI * j as f64 / np as f64];
                let image = self.map.iter().map(|e| e.eval(&param)).collect();
                let l_param = (i == nr).then(|| self.boundary.iter().map(|g| g.eval(&param[1..])).collect());
                vertices.push(MeshVertex { param, image, l_param });
            }
        }
        let mut triangles = Vec::with_capacity(2 * nr * np);
        for i in 0..nr {
            for j in 0..np {
                triangles.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
                triangles.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            }
        }
        let boundary_edges = (0..np).map(|j| [idx(nr, j), idx(nr, j + 1)]).collect();
        Ok(Mesh { level, vertices, triangles, boundary_edges })
    }

    /// Checks that the boundary lands on `L`, closes up, and that the mesh is nondegenerate.
    pub fn validate(&self, l: &Submanifold, mesh: &Mesh) -> Result<()> {
        if self.map.len() != l.ambient_dim || self.boundary.len() != l.param_dim {
            return Err(Error::DegenerateMesh(format!("{} does not map into the ambient space of {}", self.name, l.name)));
        }
        for t in &mesh.triangles {
            let [a, b, c] = t.map(|k| mesh.vertices[k].param);
            let area = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
            if !(area > 0.0) {
                return Err(Error::DegenerateMesh(format!("triangle {t:?} has parameter area {area}")));
            }
        }
        for e in &mesh.boundary_edges {
            for &k in e {
                let v = &mesh.vertices[k];
                let on_l = l.point(v.l_param.as_deref().unwrap_or_default());
                let gap = v.image.iter().zip(&on_l).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                if gap > ON_L_TOL {
                    return Err(Error::DegenerateMesh(format!("boundary vertex at φ = {} is {gap:e} off L", v.param[1])));
                }
            }
        }
        let first = &mesh.vertices[mesh.boundary_edges[0][0]].image;
        let last = &mesh.vertices[mesh.boundary_edges.last().unwrap()[1]].image;
        if first.iter().zip(last).any(|(a, b)| (a - b).abs() > ON_L_TOL) {
            return Err(Error::DegenerateMesh("boundary loop does not close".into()));
        }
        Ok(())
    }
}

struct TriangleRule {
    bary: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

fn symmetric_orbit(a: f64, b: f64) -> [[f64; 3]; 3] {
    [[a, b, b], [b, a, b], [b, b, a]]
}

/// The seven point rule exact for polynomials of degree 5.
fn degree5_rule() -> TriangleRule {
    let r = 15f64.sqrt();
    let (b1, b2) = ((6.0 + r) / 21.0, (6.0 - r) / 21.0);
    let (w1, w2) = ((155.0 + r) / 1200.0, (155.0 - r) / 1200.0);
    let mut bary = vec![[1.0 / 3.0; 3]];
    let mut weights = vec![9.0 / 40.0];
    for (b, w) in [(b1, w1), (b2, w2)] {
        for p in symmetric_orbit(1.0 - 2.0 * b, b) {
            bary.push(p);
            weights.push(w);
        }
    }
    TriangleRule { bary, weights }
}

/// The three point rule exact for degree 2, used for error estimates.
fn degree2_rule() -> TriangleRule {
    TriangleRule { bary: symmetric_orbit(2.0 / 3.0, 1.0 / 6.0).to_vec(), weights: vec![1.0 / 3.0; 3] }
}

impl TriangleRule {
    fn apply(&self, f: &Expr, p: [[f64; 2]; 3]) -> f64 {
        let area = 0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]));
        let sum: f64 = self
            .bary
            .iter()
            .zip(&self.weights)
            .map(|(l, w)| {
                let x = [0, 1].map(|k| l[0] * p[0][k] + l[1] * p[1][k] + l[2] * p[2][k]);
                w * f.eval(&x)
            })
            .sum();
        area * sum
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Pairing {
    pub value: f64,
    pub surface: f64,
    pub boundary: f64,
    /// Sum over elements of the gap between the main rule and a lower order rule.
    pub error_estimate: f64,
}

/// `∫ f*B − ∫ (∂f)*θ` without checking the cocycle condition.
pub fn pairing_integrals(c: &RelCocycle, z: &RelCycle, level: u32) -> Result<Pairing> {
    let mesh = z.mesh(level)?;
    z.validate(&c.l, &mesh)?;
    let integrand = c.b.pullback_top(&z.map);
    let hi = degree5_rule();
    let lo = degree2_rule();
    let per_tri: Vec<(f64, f64)> = mesh
        .triangles
        .par_iter()
        .map(|t| {
            let p = t.map(|k| mesh.vertices[k].param);
            let v = hi.apply(&integrand, p);
            (v, (v - lo.apply(&integrand, p)).abs())
        })
        .collect();
    let boundary_form = c.theta.pullback(&z.boundary, 1).comps.remove(0);
    let (xg, wg) = gauss_legendre(5);
    let (x3, w3) = gauss_legendre(3);
    let edge = |a: f64, b: f64, x: &[f64], w: &[f64]| -> f64 {
        let h = 0.5 * (b - a);
        x.iter().zip(w).map(|(x, w)| w * h * boundary_form.eval(&[a + h * (x + 1.0)])).sum()
    };
    let per_edge: Vec<(f64, f64)> = mesh
        .boundary_edges
        .iter()
        .map(|e| {
            let (a, b) = (mesh.vertices[e[0]].param[1], mesh.vertices[e[1]].param[1]);
            let v = edge(a, b, &xg, &wg);
            (v, (v - edge(a, b, &x3, &w3)).abs())
        })
        .collect();
    let surface: f64 = per_tri.iter().map(|p| p.0).sum();
    let boundary: f64 = per_edge.iter().map(|p| p.0).sum();
    let error_estimate = per_tri.iter().chain(&per_edge).map(|p| p.1).sum();
    Ok(Pairing { value: surface - boundary, surface, boundary, error_estimate })
}

/// The pairing, after checking that `(B, θ)` is a relative cocycle.
pub fn rel_pairing(c: &RelCocycle, z: &RelCycle, level: u32) -> Result<Pairing> {
    c.validate()?;
    pairing_integrals(c, z, level)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StokesLevel {
    pub level: u32,
    pub mesh_size: f64,
    pub pairing0: f64,
    pub pairing1: f64,
    pub homotopy_difference: f64,
    pub gauge_difference: f64,
    pub error_estimate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StokesReport {
    pub cycles: [String; 2],
    pub submanifold: String,
    pub cocycle_check: CocycleCheck,
    pub levels: Vec<StokesLevel>,
    /// `None` when every difference is below the noise floor.
    pub homotopy_order: Option<f64>,
    pub gauge_order: Option<f64>,
    pub passes: bool,
}

/// Differences below this are treated as rounding noise when fitting orders.
pub const NOISE_FLOOR: f64 = 1e-13;
pub const MIN_ORDER: f64 = 2.0;

/// Least squares slope of `log e` against `log h` over errors above the noise floor.
pub fn fitted_order(h: &[f64], e: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = h.iter().zip(e).filter(|(_, e)| **e > NOISE_FLOOR).map(|(h, e)| (h.ln(), e.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

fn order_ok(order: Option<f64>, last: f64) -> bool {
    match order {
        None => true,
        Some(o) => o >= MIN_ORDER && last < 1e-6,
    }
}

/// Pairs `c` with two homotopic cycles, and `c` against its gauge shift by
/// `(A, ψ)` on `z1`, over refinement levels `0..levels`.
pub fn stokes_invariance_report(
    c: &RelCocycle,
    z0: &RelCycle,
    z1: &RelCycle,
    gauge: (&Form1, &Expr),
    levels: u32,
    check_cocycle: bool,
) -> Result<StokesReport> {
    let cocycle_check = if check_cocycle { c.validate()? } else { c.check() };
    let shifted = gauge_shift(c, gauge.0, gauge.1);
    let rows = (0..levels)
        .map(|level| {
            let p0 = pairing_integrals(c, z0, level)?;
            let p1 = pairing_integrals(c, z1, level)?;
            let g = pairing_integrals(&shifted, z1, level)?;
            Ok(StokesLevel {
                level,
                mesh_size: z0.mesh_size(level),
                pairing0: p0.value,
                pairing1: p1.value,
                homotopy_difference: (p0.value - p1.value).abs(),
                gauge_difference: (p1.value - g.value).abs(),
                error_estimate: p0.error_estimate + p1.error_estimate + g.error_estimate,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let h: Vec<f64> = rows.iter().map(|r| r.mesh_size).collect();
    let hd: Vec<f64> = rows.iter().map(|r| r.homotopy_difference).collect();
    let gd: Vec<f64> = rows.iter().map(|r| r.gauge_difference).collect();
    let homotopy_order = fitted_order(&h, &hd);
    let gauge_order = fitted_order(&h, &gd);
    let passes = !rows.is_empty()
        && order_ok(homotopy_order, *hd.last().unwrap())
        && order_ok(gauge_order, *gd.last().unwrap());
    Ok(StokesReport {
        cycles: [z0.name.clone(), z1.name.clone()],
        submanifold: c.l.name.clone(),
        cocycle_check,
        levels: rows,
        homotopy_order,
        gauge_order,
        passes,
    })
}

/// Standard scenario on `(R^2, unit circle)`: `B = b(x, y) dx∧dy`, `θ = t(s) ds`,
/// flat disc against the deformed disc, gauge `A = x²sin(y) dx + x dy`, `ψ = sin s`.
pub fn disc_scenario(b: Expr, theta: Expr, eps: f64, kappa: f64) -> (RelCocycle, RelCycle, RelCycle, Form1, Expr) {
    let l = Submanifold::circle(1.0);
    let cocycle = RelCocycle { b: Form2::monomial(2, 0, 1, b), theta: Form1 { comps: vec![theta] }, l };
    let a = Form1 { comps: vec![var(0).powi(2) * var(1).sin(), var(0)] };
    (cocycle, flat_disc(1.0), deformed_disc(1.0, eps, kappa), a, var(0).sin())
}

/// Cones over the loops `(φ, 0)` and `(φ, κ cos φ)` on a torus in `R^4`, paired with `(ω, 0)`.
pub fn torus_scenario(l: Submanifold, kappa: f64) -> (RelCocycle, RelCycle, RelCycle) {
    let cocycle = RelCocycle { b: Form2::standard_symplectic(4), theta: Form1::zero(2), l: l.clone() };
    let z0 = cone(&l, vec![var(0), Expr::zero()], "cone over (φ, 0)");
    let z1 = cone(&l, vec![var(0), c(kappa) * var(0).cos()], &format!("cone over (φ, {kappa} cos φ)"));
    (cocycle, z0, z1)
}

/// On the twisted torus `(ω, 0)` is not a relative cocycle; the two cones
/// differ by the `j*ω`-area swept between their boundary loops.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub lagrangian: StokesReport,
    pub non_lagrangian: StokesReport,
    pub min_gap: f64,
    /// Last gap divided by first gap; close to 1 when the gap does not shrink.
    pub gap_ratio: f64,
    pub exhibits_gap: bool,
}

pub fn non_lagrangian_counterexample(kappa: f64, levels: u32) -> Result<CounterexampleReport> {
    let gauge = (Form1::zero(4), Expr::zero());
    let (c0, a0, b0) = torus_scenario(Submanifold::clifford_torus(), kappa);
    let lagrangian = stokes_invariance_report(&c0, &a0, &b0, (&gauge.0, &gauge.1), levels, true)?;
    let (c1, a1, b1) = torus_scenario(Submanifold::twisted_torus(), kappa);
    let non_lagrangian = stokes_invariance_report(&c1, &a1, &b1, (&gauge.0, &gauge.1), levels, false)?;
    let gaps: Vec<f64> = non_lagrangian.levels.iter().map(|r| r.homotopy_difference).collect();
    let min_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let gap_ratio = gaps.last().unwrap_or(&0.0) / gaps.first().unwrap_or(&1.0);
    let exhibits_gap = lagrangian.passes && min_gap > 1e-3 && gap_ratio > 0.5;
    Ok(CounterexampleReport { lagrangian, non_lagrangian, min_gap, gap_ratio, exhibits_gap })
}
