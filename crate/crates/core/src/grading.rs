//! Phases, clockwise gaps and degrees of intersection points.
//!
//! The tangent plane of a `T^2` factor is identified with `C` through the
//! complex coordinate `r + iθ`. A direction `d = (u, v)` has phase
//! `φ(d) ∈ (-1/2, 1/2]` with `e^{-iπφ}` parallel to `u + iv`, so the line
//! `ℓ_k` with `d = (1, -k)` has `φ = arctan(k)/π`. Vertical lines get `1/2`.
//!
//! The default grading lift of a brane is `α̃ = -φ + alpha_shift` per factor,
//! and the degree of an intersection point is `Σ (α̃_1 - α̃_0 + Δ)` over the
//! factors, where `Δ ∈ (0, 1)` is the clockwise gap from `d0` to `d1`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flat_torus::{intersect, Brane, Direction, Generator};

const INTEGRALITY_TOL: f64 = 1e-9;

/// Canonical phase of a direction, in `(-1/2, 1/2]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Phase {
    pub value: f64,
}

/// Representative of `span(d)` with `u > 0`, or `(0, -1)` for vertical lines.
fn line_rep(d: &Direction) -> (i64, i64) {
    let (u, v) = (d.u(), d.v());
    if u > 0 || (u == 0 && v < 0) {
        (u, v)
    } else {
        (-u, -v)
    }
}

pub fn phase(d: &Direction) -> Phase {
    let (u, v) = line_rep(d);
    let value = -(v as f64).atan2(u as f64) / PI;
    // atan2 of the representative lies in [-π/2, π/2), hence value in (-1/2, 1/2].
    Phase { value }
}

/// Exact test `φ(d1) > φ(d0)` via the orientation of the line representatives.
fn phase_greater(d1: &Direction, d0: &Direction) -> bool {
    let (a, b) = (line_rep(d1), line_rep(d0));
    a.0 * b.1 - a.1 * b.0 > 0
}

/// Clockwise gap `Δ ∈ (0, 1)` with `e^{-iπΔ}·span(d0) = span(d1)`.
pub fn clockwise_gap(d0: &Direction, d1: &Direction) -> Result<f64> {
    if d0.cross(d1) == 0 {
        return Err(Error::ParallelLines { factor: 0 });
    }
    let diff = phase(d1).value - phase(d0).value;
    Ok(if phase_greater(d1, d0) { diff } else { diff + 1.0 })
}

/// Degree of every intersection point of two transverse branes.
///
/// For affine branes the degree does not depend on the point. It is computed
/// twice, once from floating-point phases and once by exact phase comparison,
/// and the two must agree.
pub fn brane_degree(b0: &Brane, b1: &Brane) -> Result<i64> {
    if b0.n() != b1.n() {
        return Err(Error::InvalidBrane("branes live in tori of different dimension".into()));
    }
    let mut exact = 0i64;
    let mut float = 0.0f64;
    for (f, (l0, l1)) in b0.lines.iter().zip(&b1.lines).enumerate() {
        let gap = clockwise_gap(&l0.d, &l1.d).map_err(|_| Error::ParallelLines { factor: f })?;
        let (s0, s1) = (b0.alpha_shift[f], b1.alpha_shift[f]);
        let a0 = -phase(&l0.d).value + s0 as f64;
        let a1 = -phase(&l1.d).value + s1 as f64;
        float += a1 - a0 + gap;
        exact += s1 - s0 + if phase_greater(&l1.d, &l0.d) { 0 } else { 1 };
    }
    if (float - float.round()).abs() > INTEGRALITY_TOL || float.round() as i64 != exact {
        return Err(Error::NonIntegerDegree { float, exact });
    }
    Ok(exact)
}

/// `deg(L̃0, L̃1; g)`.
pub fn degree(b0: &Brane, b1: &Brane, g: &Generator) -> Result<i64> {
    if !b0.contains(&g.point) || !b1.contains(&g.point) {
        return Err(Error::PointNotOnLine);
    }
    brane_degree(b0, b1)
}

/// `(deg(b0, b1; g), deg(b1, b0; g))`, which sum to `n`.
pub fn serre_pair(b0: &Brane, b1: &Brane, g: &Generator) -> Result<(i64, i64)> {
    Ok((degree(b0, b1, g)?, degree(b1, b0, g)?))
}

/// Dimension `i_0 - Σ i_j + k - 2` of the moduli space of `(k+1)`-gons.
pub fn expected_dimension(output_degree: i64, input_degrees: &[i64]) -> i64 {
    let k = input_degrees.len() as i64;
    output_degree - input_degrees.iter().sum::<i64>() + k - 2
}

/// Generators of `CF(b0, b1)` bucketed by degree.
pub fn hom_space(b0: &Brane, b1: &Brane) -> Result<BTreeMap<i64, Vec<Generator>>> {
    let mut out: BTreeMap<i64, Vec<Generator>> = BTreeMap::new();
    for g in intersect(b0, b1)? {
        out.entry(g.degree).or_default().push(g);
    }
    Ok(out)
}

/// One row of the slope degree table: `deg(ℓ_{k0}^n, ℓ_{k1}^n)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradingRow {
    pub n: usize,
    pub k0: i64,
    pub k1: i64,
    pub degree: i64,
}

/// Degrees between the products `ℓ_{k0}^n` and `ℓ_{k1}^n` for `k0 ≠ k1` in the range.
pub fn grading_table(n: usize, ks: std::ops::RangeInclusive<i64>) -> Result<Vec<GradingRow>> {
    let mut rows = Vec::new();
    for k0 in ks.clone() {
        for k1 in ks.clone() {
            if k0 == k1 {
                continue;
            }
            let degree = brane_degree(&Brane::ell(k0, n), &Brane::ell(k1, n))?;
            rows.push(GradingRow { n, k0, k1, degree });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flat_torus::AffineLine;

    fn dir(u: i64, v: i64) -> Direction {
        Direction::new(u, v).unwrap()
    }

    #[test]
    fn phase_of_slopes() {
        for k in -6i64..=6 {
            let p = phase(&Direction::slope(k)).value;
            assert!((p - (k as f64).atan() / PI).abs() < 1e-15);
            assert!(((PI * p).cos() - 1.0 / ((1 + k * k) as f64).sqrt()).abs() < 1e-14);
        }
        assert_eq!(phase(&dir(0, 1)).value, 0.5);
        assert_eq!(phase(&dir(0, -1)).value, 0.5);
        assert_eq!(phase(&dir(-1, 1)).value, phase(&dir(1, -1)).value);
    }

    #[test]
    fn gap_examples() {
        assert!((clockwise_gap(&dir(1, 0), &dir(1, -1)).unwrap() - 0.25).abs() < 1e-15);
        assert!((clockwise_gap(&dir(1, 0), &dir(0, 1)).unwrap() - 0.5).abs() < 1e-15);
        assert!((clockwise_gap(&dir(1, -1), &dir(1, 0)).unwrap() - 0.75).abs() < 1e-15);
        assert!(clockwise_gap(&dir(1, 2), &dir(-1, -2)).is_err());
    }

    #[test]
    fn gaps_are_complementary() {
        let dirs = [dir(1, 0), dir(0, 1), dir(2, -3), dir(-1, 4), dir(3, 5), dir(0, -1)];
        for a in &dirs {
            for b in &dirs {
                if a.cross(b) != 0 {
                    let s = clockwise_gap(a, b).unwrap() + clockwise_gap(b, a).unwrap();
                    assert!((s - 1.0).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn slope_degrees() {
        let e = |k: i64, n: usize| Brane::ell(k, n);
        assert_eq!(brane_degree(&e(0, 1), &e(2, 1)).unwrap(), 0);
        assert_eq!(brane_degree(&e(2, 1), &e(0, 1)).unwrap(), 1);
        let b0 = Brane::from_lines(vec![AffineLine::ell(0), AffineLine::ell(1)]);
        let b1 = Brane::from_lines(vec![AffineLine::ell(1), AffineLine::ell(0)]);
        assert_eq!(brane_degree(&b0, &b1).unwrap(), 1);
    }

    #[test]
    fn shift_moves_degree() {
        let b0 = Brane::ell(0, 2);
        let mut b1 = Brane::ell(-1, 2);
        let d = brane_degree(&b0, &b1).unwrap();
        b1.alpha_shift[1] += 1;
        assert_eq!(brane_degree(&b0, &b1).unwrap(), d + 1);
    }

    #[test]
    fn serre_pairs() {
        let (b0, b1) = (Brane::ell(0, 1), Brane::ell(1, 1));
        let g = &intersect(&b0, &b1).unwrap()[0];
        assert_eq!(serre_pair(&b0, &b1, g).unwrap(), (0, 1));
        assert!(matches!(serre_pair(&b0, &b0, g), Err(Error::ParallelLines { .. })));
    }

    #[test]
    fn dimension_formula() {
        assert_eq!(expected_dimension(0, &[0, 0]), 0);
        assert_eq!(expected_dimension(3, &[2]), 0);
        assert_eq!(expected_dimension(0, &[0, 0, 0]), 1);
    }

    #[test]
    fn hom_space_buckets() {
        let h = hom_space(&Brane::ell(0, 1), &Brane::ell(1, 1)).unwrap();
        assert_eq!(h.keys().copied().collect::<Vec<_>>(), vec![0]);
        let h = hom_space(&Brane::ell(1, 1), &Brane::ell(0, 1)).unwrap();
        assert_eq!(h.keys().copied().collect::<Vec<_>>(), vec![1]);
        let h = hom_space(&Brane::ell(0, 1), &Brane::ell(2, 1)).unwrap();
        assert_eq!(h[&0].len(), 2);
    }
}
