use fukaya_torus::ainfinity::class_weight;
use fukaya_torus::expr::Expr;
use fukaya_torus::flat_torus::{intersect, reduce_point};
use fukaya_torus::grading::serre_pair;
use fukaya_torus::isotopy::{theta_psi, LineIsotopy};
use fukaya_torus::polygon::{enumerate_classes, enumerate_classes_shifted, holomorphic_count};
use fukaya_torus::rational::{frac, q, qi};
use fukaya_torus::{AffineLine, Brane, Direction, TorusAmbient, Q};
use num_complex::Complex64;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Q> {
    (2i128..=12).prop_flat_map(|den| (0..den).prop_map(move |num| q(num, den)))
}

fn direction() -> impl Strategy<Value = Direction> {
    (-4i64..=4, -4i64..=4).prop_filter_map("primitive", |(u, v)| Direction::new(u, v).ok())
}

fn line() -> impl Strategy<Value = AffineLine> {
    (direction(), rational(), rational()).prop_map(|(d, x, y)| AffineLine::new(d, [x, y]))
}

fn slope_brane(k: i64, c: [Q; 2], beta: Q) -> Brane {
    Brane::new(vec![AffineLine::new(Direction::slope(k), c)], vec![0], vec![beta]).unwrap()
}

proptest! {
    #[test]
    fn intersection_count_is_det(l0 in line(), l1 in line()) {
        let det = l0.d.cross(&l1.d);
        match l0.intersect(&l1) {
            None => prop_assert_eq!(det, 0),
            Some(pts) => {
                prop_assert_eq!(pts.len() as i64, det.abs());
                for p in &pts {
                    prop_assert!(l0.contains(p) && l1.contains(p));
                    prop_assert_eq!(reduce_point(p), *p);
                }
                let mut back = l1.intersect(&l0).unwrap();
                back.sort();
                prop_assert_eq!(back, pts);
            }
        }
    }

    #[test]
    fn serre_duality(a in prop::collection::vec(line(), 1..=2), b in prop::collection::vec(line(), 1..=2), shift in -3i64..=3) {
        prop_assume!(a.len() == b.len());
        let n = a.len();
        let b0 = Brane::new(a, vec![shift; n], vec![Q::from_integer(0); n]).unwrap();
        let b1 = Brane::from_lines(b);
        if let Ok(gens) = intersect(&b0, &b1) {
            for g in &gens {
                let (x, y) = serre_pair(&b0, &b1, g).unwrap();
                prop_assert_eq!(x + y, n as i64);
            }
        }
    }

    #[test]
    fn arc_parameter_round_trip(l in line(), s in rational(), whole in -3i128..=3) {
        let s = s + Q::from_integer(whole);
        let p = l.point_at(s);
        prop_assert_eq!(l.arc_parameter(&p).unwrap(), s);
        prop_assert_eq!(l.arc_parameter_mod1(&reduce_point(&p)).unwrap(), frac(s));
    }

    #[test]
    fn flux_is_additive_and_reverses(dx in rational(), dy in rational(), ex in rational(), ey in rational(), k in -3i64..=3) {
        let amb = TorusAmbient::standard(1);
        let b = Brane::ell(k, 1);
        let first = LineIsotopy::straight(1, vec![[dx, dy]]);
        let second = LineIsotopy::straight(1, vec![[ex, -ey]]);
        let t1 = theta_psi(&first, &b, &amb).swept[0];
        let t2 = theta_psi(&second, &b, &amb).swept[0];
        prop_assert_eq!(theta_psi(&first.then(&second), &b, &amb).swept[0], t1 + t2);
        prop_assert_eq!(theta_psi(&first.reversed(), &b, &amb).swept[0], -t1);
    }

    #[test]
    fn classes_do_not_depend_on_base_lift(c0 in (rational(), rational()), c1 in (rational(), rational()), c2 in (rational(), rational()), sx in -2i128..=2, sy in -2i128..=2) {
        let branes = [slope_brane(0, [c0.0, c0.1], qi(0)), slope_brane(1, [c1.0, c1.1], qi(0)), slope_brane(2, [c2.0, c2.1], qi(0))];
        for g1 in intersect(&branes[0], &branes[1]).unwrap() {
            for g2 in intersect(&branes[1], &branes[2]).unwrap() {
                for g0 in intersect(&branes[0], &branes[2]).unwrap() {
                    let Ok(base) = enumerate_classes(&branes, &[&g1, &g2], &g0, qi(6)) else { continue };
                    let moved = enumerate_classes_shifted(&branes, &[&g1, &g2], &g0, qi(6), &[[sx, sy]]).unwrap();
                    let mut a: Vec<Q> = base.classes.iter().map(|c| c.total_area()).collect();
                    let mut b: Vec<Q> = moved.classes.iter().map(|c| c.total_area()).collect();
                    a.sort();
                    b.sort();
                    prop_assert_eq!(a, b);
                }
            }
        }
    }

    #[test]
    fn b_field_and_holonomy_leave_modulus(b in rational(), betas in prop::collection::vec(rational(), 3)) {
        let geometry = [(0, [qi(0), q(1, 7)]), (1, [q(1, 5), q(3, 11)]), (2, [q(2, 9), q(2, 3)])];
        let plain: Vec<Brane> = geometry.iter().map(|(k, c)| slope_brane(*k, *c, qi(0))).collect();
        let twisted: Vec<Brane> = geometry.iter().zip(&betas).map(|((k, c), beta)| slope_brane(*k, *c, *beta)).collect();
        let amb0 = TorusAmbient::new(vec![1.0], vec![qi(0)]).unwrap();
        let amb1 = TorusAmbient::new(vec![1.0], vec![b]).unwrap();
        let ones = [Complex64::new(1.0, 0.0); 2];
        for g1 in intersect(&plain[0], &plain[1]).unwrap() {
            for g2 in intersect(&plain[1], &plain[2]).unwrap() {
                for g0 in intersect(&plain[0], &plain[2]).unwrap() {
                    let e = enumerate_classes(&plain, &[&g1, &g2], &g0, qi(5)).unwrap();
                    for c in e.classes.iter().filter(|c| holomorphic_count(c) == 1) {
                        let w0 = class_weight(c, &ones, &plain, &amb0).unwrap();
                        let w1 = class_weight(c, &ones, &twisted, &amb1).unwrap();
                        prop_assert_eq!(w0.real_exponent, w1.real_exponent);
                        prop_assert!((w0.value.norm() - w1.value.norm()).abs() <= 1e-15 * w0.value.norm());
                    }
                }
            }
        }
    }

    #[test]
    fn expression_display_parses_back(a in -3.0f64..3.0, b in -3.0f64..3.0, x in 0.1f64..2.0, y in -2.0f64..2.0) {
        let names = ["x", "y"];
        let src = format!("{a} * x^3 - sin({b} * y) / (1 + x^2) + exp(-x*y)");
        let e = Expr::parse(&src, &names).unwrap();
        let back = Expr::parse(&e.display(&names).to_string(), &names).unwrap();
        prop_assert!((back.eval(&[x, y]) - e.eval(&[x, y])).abs() <= 1e-12 * (1.0 + e.eval(&[x, y]).abs()));
    }
}
