//! The plane disc model: a round Lagrangian circle in `R^2` moved by a radial
//! isotopy, with discs bounding it.
//!
//! The ambient form is `ω = dx∧dy` with B-field `b(x, y) dx∧dy`. The disc of
//! radius `r` bounding the circle has weight
//! `ρ = exp(2πi(∫B + iπr²))·exp(2πiβ)`.
//!
//! Growing the circle from `r(0)` to `r(1)` sweeps an annulus. The disc `u'`
//! for the moved circle is the old disc glued to that annulus, and the flat
//! connection on the moved circle has holonomy `β' = β − ∫_annulus B` so that
//! its curvature matches the pulled back B-field. The ratio `ρ(u')/ρ(u)` is
//! then `exp(2π⟨θ_ψ, ∂u⟩)` with `⟨θ_ψ, ∂u⟩ = −π(r(1)² − r(0)²)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::quadrature::{integrate_1d, integrate_2d, Estimate};

const NAMES: [&str; 2] = ["x", "y"];

/// A function of `(x, y)` kept together with its source text.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PlaneField {
    source: String,
    expr: Expr,
}

impl PlaneField {
    pub fn parse(source: &str) -> Result<Self> {
        let expr = Expr::parse(source, &NAMES)?;
        Ok(PlaneField { source: source.to_string(), expr })
    }

    pub fn zero() -> Self {
        PlaneField { source: "0".into(), expr: Expr::zero() }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.expr.eval(&[x, y])
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

impl TryFrom<String> for PlaneField {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        PlaneField::parse(&s)
    }
}

impl From<PlaneField> for String {
    fn from(f: PlaneField) -> String {
        f.source
    }
}

/// Radius of the moving circle as a function of `t ∈ [0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadiusPath {
    Linear { r0: f64, r1: f64 },
    /// `r0 + (r1 − r0)(3t² − 2t³)`.
    Smoothstep { r0: f64, r1: f64 },
    /// `Σ c_k t^k`.
    Polynomial { coeffs: Vec<f64> },
}

impl RadiusPath {
    /// `(r(t), r'(t))`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        match self {
            RadiusPath::Linear { r0, r1 } => (r0 + (r1 - r0) * t, r1 - r0),
            RadiusPath::Smoothstep { r0, r1 } => {
                (r0 + (r1 - r0) * t * t * (3.0 - 2.0 * t), (r1 - r0) * 6.0 * t * (1.0 - t))
            }
            RadiusPath::Polynomial { coeffs } => {
                let mut r = 0.0;
                let mut dr = 0.0;
                for c in coeffs.iter().rev() {
                    dr = dr * t + r;
                    r = r * t + c;
                }
                (r, dr)
            }
        }
    }

    pub fn r0(&self) -> f64 {
        self.eval(0.0).0
    }

    pub fn r1(&self) -> f64 {
        self.eval(1.0).0
    }

    /// Rejects paths that touch or cross zero radius, sampling densely.
    pub fn validate(&self) -> Result<()> {
        if let RadiusPath::Polynomial { coeffs } = self {
            if coeffs.is_empty() {
                return Err(Error::InvalidInput("radius polynomial has no coefficients".into()));
            }
        }
        for i in 0..=1024 {
            let (r, dr) = self.eval(i as f64 / 1024.0);
            if !(r > 0.0) || !r.is_finite() || !dr.is_finite() {
                return Err(Error::InvalidInput(format!("radius path is not positive at t = {}", i as f64 / 1024.0)));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneDiscModel {
    pub b: PlaneField,
    pub radius: RadiusPath,
    #[serde(default)]
    pub beta: f64,
    /// Target accuracy of every quadrature.
    #[serde(default = "default_tol")]
    pub quadrature_tol: f64,
}

fn default_tol() -> f64 {
    1e-12
}

impl PlaneDiscModel {
    pub fn new(b: PlaneField, radius: RadiusPath, beta: f64) -> Result<Self> {
        let m = PlaneDiscModel { b, radius, beta, quadrature_tol: default_tol() };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        self.radius.validate()?;
        if !(self.quadrature_tol > 0.0) {
            return Err(Error::InvalidInput("quadrature tolerance must be positive".into()));
        }
        Ok(())
    }

    fn with_b(&self, b: PlaneField) -> Self {
        PlaneDiscModel { b, ..self.clone() }
    }
}

/// `∫ b` over the annulus `r_a ≤ |z| ≤ r_b` (signed when `r_b < r_a`), in polar coordinates.
fn polar_integral(b: &PlaneField, ra: f64, rb: f64, tol: f64) -> Result<Estimate> {
    integrate_2d(|rho, phi| b.eval(rho * phi.cos(), rho * phi.sin()) * rho, (ra, rb), (0.0, 2.0 * PI), tol)
}

/// `log ρ` of the flat disc of radius `r(t)`, with the error estimate of `∫B`.
pub fn circle_disc_log_rho(model: &PlaneDiscModel, t: f64) -> Result<(Complex64, Estimate)> {
    let (r, _) = model.radius.eval(t);
    let ib = polar_integral(&model.b, 0.0, r, model.quadrature_tol)?;
    let log = Complex64::new(-2.0 * PI * PI * r * r, 2.0 * PI * (ib.value + model.beta));
    Ok((log, ib))
}

/// `ρ` of the flat disc of radius `r(t)` bounding the circle with holonomy `β`.
pub fn circle_disc_rho(model: &PlaneDiscModel, t: f64) -> Result<Complex64> {
    Ok(circle_disc_log_rho(model, t)?.0.exp())
}

/// Pieces of `ρ(u')` for the disc glued from the inner disc and the swept annulus.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GluedDisc {
    /// `∫B` over the annulus in the `(t, φ)` parametrization of the sweep.
    pub annulus_b: f64,
    /// `∫ω` over the annulus in the same parametrization.
    pub annulus_area: f64,
    /// Holonomy of the moved circle, `β − ∫B` over the annulus in polar coordinates.
    pub moved_holonomy: f64,
    pub log_rho: Complex64,
    pub max_error: f64,
}

fn glued_disc(model: &PlaneDiscModel, path: &(dyn Fn(f64) -> (f64, f64) + Sync)) -> Result<GluedDisc> {
    let tol = model.quadrature_tol;
    let (r0, _) = path(0.0);
    let (r1, _) = path(1.0);
    let inner = polar_integral(&model.b, 0.0, r0, tol)?;
    let sweep = |f: &(dyn Fn(f64, f64, f64) -> f64 + Sync)| {
        integrate_2d(
            |t, phi| {
                let (r, dr) = path(t);
                f(r * phi.cos(), r * phi.sin(), r * dr)
            },
            (0.0, 1.0),
            (0.0, 2.0 * PI),
            tol,
        )
    };
    let ann_b = sweep(&|x, y, jac| model.b.eval(x, y) * jac)?;
    let ann_area = sweep(&|_, _, jac| jac)?;
    let polar = polar_integral(&model.b, r0, r1, tol)?;
    let moved_holonomy = model.beta - polar.value;
    let log_rho = Complex64::new(
        -2.0 * PI * (PI * r0 * r0 + ann_area.value),
        2.0 * PI * (inner.value + ann_b.value + moved_holonomy),
    );
    let max_error = [inner.error, ann_b.error, ann_area.error, polar.error].into_iter().fold(0.0, f64::max);
    Ok(GluedDisc { annulus_b: ann_b.value, annulus_area: ann_area.value, moved_holonomy, log_rho, max_error })
}

/// Monotone reparametrization used for the invariance check.
fn sigma(t: f64) -> (f64, f64) {
    (t * t * t, 3.0 * t * t)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CircleReport {
    pub r0: f64,
    pub r1: f64,
    pub rho_before: Complex64,
    pub log_rho_before: Complex64,
    pub glued: GluedDisc,
    /// `log(ρ(u')/ρ(u))`.
    pub log_ratio: Complex64,
    pub ratio: Complex64,
    pub predicted_ratio: f64,
    pub ratio_rel_error: f64,
    pub theta_analytic: f64,
    pub theta_quadrature: f64,
    pub theta_error: f64,
    pub alt_b: String,
    pub alt_ratio: Complex64,
    pub b_independence_rel_diff: f64,
    pub reparametrized_ratio: Complex64,
    pub reparametrization_rel_diff: f64,
    pub quadrature_error: f64,
    pub tol: f64,
    pub passes: bool,
}

fn rel_diff_log(a: Complex64, b: Complex64) -> f64 {
    ((a - b).exp() - 1.0).norm()
}

/// Compares `ρ(u')/ρ(u)` with `exp(2π⟨θ_ψ, ∂u⟩)`, and checks that the ratio
/// does not change when `B` is replaced by `alt_b` or when the radius path is
/// reparametrized.
pub fn verify_circle_isotopy(model: &PlaneDiscModel, alt_b: &PlaneField, tol: f64) -> Result<CircleReport> {
    model.validate()?;
    let (r0, r1) = (model.radius.r0(), model.radius.r1());
    let (log_before, before_err) = circle_disc_log_rho(model, 0.0)?;
    let path = |t: f64| model.radius.eval(t);
    let glued = glued_disc(model, &path)?;
    let log_ratio = glued.log_rho - log_before;

    let theta_analytic = -PI * (r1 * r1 - r0 * r0);
    let theta_q = integrate_1d(
        |t| {
            let (r, dr) = model.radius.eval(t);
            r * dr
        },
        0.0,
        1.0,
        model.quadrature_tol,
    )?;
    let theta_quadrature = -2.0 * PI * theta_q.value;
    let predicted_log = 2.0 * PI * theta_analytic;

    let alt_model = model.with_b(alt_b.clone());
    let alt_before = circle_disc_log_rho(&alt_model, 0.0)?.0;
    let alt_glued = glued_disc(&alt_model, &path)?;
    let alt_log = alt_glued.log_rho - alt_before;

    let slow = |t: f64| {
        let (s, ds) = sigma(t);
        let (r, dr) = model.radius.eval(s);
        (r, dr * ds)
    };
    let re_glued = glued_disc(model, &slow)?;
    let re_log = re_glued.log_rho - log_before;

    let ratio_rel_error = rel_diff_log(log_ratio, Complex64::new(predicted_log, 0.0));
    let theta_error = (theta_quadrature - theta_analytic).abs();
    let b_independence_rel_diff = rel_diff_log(alt_log, log_ratio);
    let reparametrization_rel_diff = rel_diff_log(re_log, log_ratio);
    let quadrature_error = [before_err.error, glued.max_error, alt_glued.max_error, re_glued.max_error, theta_q.error]
        .into_iter()
        .fold(0.0, f64::max);
    let passes = ratio_rel_error <= tol
        && theta_error <= tol
        && b_independence_rel_diff <= tol
        && reparametrization_rel_diff <= tol;
    Ok(CircleReport {
        r0,
        r1,
        rho_before: log_before.exp(),
        log_rho_before: log_before,
        glued,
        log_ratio,
        ratio: log_ratio.exp(),
        predicted_ratio: predicted_log.exp(),
        ratio_rel_error,
        theta_analytic,
        theta_quadrature,
        theta_error,
        alt_b: alt_b.source().to_string(),
        alt_ratio: alt_log.exp(),
        b_independence_rel_diff,
        reparametrized_ratio: re_log.exp(),
        reparametrization_rel_diff,
        quadrature_error,
        tol,
        passes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(b: &str, r0: f64, r1: f64, beta: f64) -> PlaneDiscModel {
        PlaneDiscModel::new(PlaneField::parse(b).unwrap(), RadiusPath::Linear { r0, r1 }, beta).unwrap()
    }

    #[test]
    fn unit_disc_weights() {
        let m = model("0", 1.0, 1.0, 0.0);
        let rho = circle_disc_rho(&m, 0.0).unwrap();
        assert!((rho.re - (-2.0 * PI * PI).exp()).abs() < 1e-20 && rho.im.abs() < 1e-20);
        let half = circle_disc_rho(&model("0", 1.0, 1.0, 0.5), 0.0).unwrap();
        assert!((half / rho + 1.0).norm() < 1e-12);
        let (log, _) = circle_disc_log_rho(&model("1", 1.0, 1.0, 0.0), 0.0).unwrap();
        assert!((log.im - 2.0 * PI * PI).abs() < 1e-8 * 2.0 * PI * PI);
    }

    #[test]
    fn radius_paths() {
        let p = RadiusPath::Polynomial { coeffs: vec![1.0, 2.0, -0.5] };
        let (r, dr) = p.eval(0.5);
        assert!((r - 1.875).abs() < 1e-15 && (dr - 1.5).abs() < 1e-15);
        assert!(RadiusPath::Linear { r0: 1.0, r1: -1.0 }.validate().is_err());
        let s = RadiusPath::Smoothstep { r0: 1.0, r1: 2.0 };
        assert_eq!((s.r0(), s.r1()), (1.0, 2.0));
    }

    #[test]
    fn growing_circle_ratio() {
        let m = model("0", 1.0, 2.0, 0.25);
        let alt = PlaneField::parse("exp(-x^2 - y^2)").unwrap();
        let rep = verify_circle_isotopy(&m, &alt, 1e-8).unwrap();
        assert!(rep.passes, "{rep:?}");
        assert!((rep.predicted_ratio / (-6.0 * PI * PI).exp() - 1.0).abs() < 1e-12);
        assert!((rep.theta_analytic + 3.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn constant_radius_gives_ratio_one() {
        let rep = verify_circle_isotopy(&model("x^2", 1.5, 1.5, 0.1), &PlaneField::zero(), 1e-10).unwrap();
        assert!(rep.passes);
        assert!((rep.ratio - 1.0).norm() < 1e-12);
    }

    #[test]
    fn model_json() {
        let json = r#"{"b": "exp(-x^2 - y^2)", "radius": {"kind": "smoothstep", "r0": 1, "r1": 2}, "beta": 0.5}"#;
        let m: PlaneDiscModel = serde_json::from_str(json).unwrap();
        assert_eq!(m.b.source(), "exp(-x^2 - y^2)");
        assert_eq!(m.quadrature_tol, 1e-12);
        assert!(serde_json::from_str::<PlaneDiscModel>(r#"{"b": "x +", "radius": {"kind": "linear", "r0": 1, "r1": 2}}"#).is_err());
    }
}
