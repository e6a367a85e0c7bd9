mod common;

use markov_surface::flows::{flow_axis_raw, Automorphism, Axis, ShearFlow};
use markov_surface::interp::Barycentric;
use markov_surface::markov::{vieta_move_raw, vieta_moves, MarkovTriple};
use markov_surface::num::rat;
use markov_surface::poisson::{bracket, bracket_raw, hamiltonian_field};
use markov_surface::singular::germ::{decompose_tangent_field, model_fields, random_tangent_field, GermKind};
use markov_surface::{BigComplex, NumParams, Poly, SurfaceParams};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn poly_strategy(deg: u32) -> impl Strategy<Value = Poly> {
    prop::collection::vec((0..=deg, 0..=deg, 0..=deg, -5i64..=5, 1i64..=3), 1..5).prop_map(move |terms| {
        let mut f = Poly::zero();
        for (i, j, k, n, d) in terms {
            if i + j + k <= deg {
                f = f.add(&Poly::mono(i, j, k).scale(&rat::frac(n, d)));
            }
        }
        f
    })
}

fn params_strategy() -> impl Strategy<Value = SurfaceParams> {
    (-4i64..=4, -4i64..=4, -4i64..=4, -4i64..=4, prop_oneof![-3i64..=-1, 1i64..=3])
        .prop_map(|(a, b, c, d, e)| SurfaceParams::from_ints(a, b, c, d, e).unwrap())
}

fn point_on(np: &NumParams, x: (f64, f64), y: (f64, f64)) -> [BigComplex; 3] {
    let prec = np.prec();
    let x = BigComplex::from_f64_pair(x.0, x.1, prec);
    let y = BigComplex::from_f64_pair(y.0, y.1, prec);
    let z = np.lift_z(&x, &y)[0].clone();
    [x, y, z]
}

fn close(a: &[BigComplex; 3], b: &[BigComplex; 3], tol: f64) -> bool {
    (0..3).all(|k| (&a[k] - &b[k]).abs_f64() <= tol * b[k].abs_f64().max(1.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bracket_is_antisymmetric(f in poly_strategy(3), g in poly_strategy(3), sp in params_strategy()) {
        prop_assert!(bracket_raw(&f, &g, &sp).add(&bracket_raw(&g, &f, &sp)).is_zero());
    }

    #[test]
    fn bracket_is_a_derivation(f in poly_strategy(2), g in poly_strategy(2), h in poly_strategy(2), sp in params_strategy()) {
        let lhs = bracket_raw(&f, &g.mul(&h), &sp);
        let rhs = bracket_raw(&f, &g, &sp).mul(&h).add(&g.mul(&bracket_raw(&f, &h, &sp)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn hamiltonian_field_acts_by_bracket(f in poly_strategy(3), g in poly_strategy(3), sp in params_strategy()) {
        prop_assert_eq!(hamiltonian_field(&f, &sp).apply(&g), bracket_raw(&f, &g, &sp));
        prop_assert!(hamiltonian_field(&f, &sp).is_tangent(&sp));
    }

    #[test]
    fn normal_form_is_idempotent(f in poly_strategy(5), sp in params_strategy()) {
        let once = f.reduce(&sp).into_poly();
        prop_assert_eq!(once.reduce(&sp).into_poly(), once.clone());
        // f - normal(f) vanishes on the surface, so brackets agree after reduction
        let g = Poly::mono(1, 1, 0);
        prop_assert_eq!(bracket(&f, &g, &sp), bracket(&once, &g, &sp));
    }

    #[test]
    fn flow_group_law(x in (-0.9f64..0.9, -0.9f64..0.9), y in (-0.9f64..0.9, -0.9f64..0.9),
                      s in -1.0f64..1.0, t in -1.0f64..1.0, axis in 0usize..3) {
        let np = NumParams::markov(128);
        let p = point_on(&np, x, y);
        let ax = Axis::from_index(axis);
        let (s, t) = (BigComplex::from_f64(s, 128), BigComplex::from_f64(t, 128));
        let a = flow_axis_raw(&np, ax, &flow_axis_raw(&np, ax, &p, &s).0, &t).0;
        let b = flow_axis_raw(&np, ax, &p, &(&s + &t)).0;
        prop_assert!(close(&a, &b, 1e-25));
        prop_assert!(np.eval_p(&a).abs_f64() < 1e-25 * np.residual_scale(&a));
    }

    #[test]
    fn flow_matches_rk4(x in (-0.8f64..0.8, -0.8f64..0.8), y in (-0.8f64..0.8, -0.8f64..0.8),
                        t in -1.0f64..1.0, axis in 0usize..3) {
        let np = NumParams::markov(128);
        let p = point_on(&np, x, y);
        let q = flow_axis_raw(&np, Axis::from_index(axis), &p, &BigComplex::from_f64(t, 128)).0;
        let to64 = |c: &BigComplex| { let (a, b) = c.to_f64_pair(); num_complex::Complex64::new(a, b) };
        let oracle = common::rk4(&common::MARKOV, axis, [to64(&p[0]), to64(&p[1]), to64(&p[2])], t, 4000);
        for k in 0..3 {
            prop_assert!((to64(&q[k]) - oracle[k]).norm() < 1e-9 * to64(&q[k]).norm().max(1.0));
        }
    }

    #[test]
    fn shear_composition_inverts(c0 in -2i64..=2, c1 in -2i64..=2, axis in 0usize..3,
                                 x in (0.1f64..0.7, -0.3f64..0.3), y in (0.1f64..0.7, -0.3f64..0.3)) {
        let np = NumParams::markov(160);
        let p = point_on(&np, x, y);
        let v = ["x", "y", "z"][axis];
        let f = Poly::parse(&format!("{c0} + {c1}*{v}^2")).unwrap();
        let a = Automorphism::new(vec![ShearFlow::exact(Axis::from_index(axis), f).unwrap(), ShearFlow::axis_flow(Axis::Z, BigComplex::from_f64(0.3, 160))]);
        let back = a.inverse().apply_raw(&np, &a.apply_raw(&np, &p));
        prop_assert!(close(&back, &p, 1e-30));
        let json = a.to_json();
        let again = Automorphism::from_json(&json, 160).unwrap();
        prop_assert!(close(&again.apply_raw(&np, &p), &a.apply_raw(&np, &p), 1e-40));
    }

    #[test]
    fn interpolant_hits_nodes(vals in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..7)) {
        let n = vals.len();
        let nodes: Vec<BigComplex> = (0..n).map(|i| BigComplex::from_f64_pair(i as f64 * 0.7 - 1.0, (i * i) as f64 * 0.1, 128)).collect();
        let values: Vec<BigComplex> = vals.iter().map(|v| BigComplex::from_f64_pair(v.0, v.1, 128)).collect();
        let b = Barycentric::new(nodes.clone(), values.clone());
        let coeffs = b.monomial_coeffs();
        for (x, y) in nodes.iter().zip(&values) {
            prop_assert!((&b.eval(x) - y).abs_f64() == 0.0);
            prop_assert!((&markov_surface::interp::horner(&coeffs, x) - y).abs_f64() < 1e-25);
        }
    }

    #[test]
    fn vieta_moves_stay_on_equation(path in prop::collection::vec(0usize..3, 0..25)) {
        let mut t = MarkovTriple::root();
        for i in path {
            let c = t.coords();
            let moved = vieta_move_raw(&c, i);
            prop_assert_eq!(vieta_move_raw(&moved, i), c);
            t = vieta_moves(&t)[i].clone();
            prop_assert!(t.is_solution());
            prop_assert!(t.x <= t.y && t.y <= t.z && t.x >= BigInt::from(1));
        }
    }

    #[test]
    fn decomposition_recomposes(seed in any::<u64>(), which in 0usize..4) {
        let kind = [GermKind::A(1), GermKind::A(3), GermKind::D(4), GermKind::D(5)][which];
        let germ = model_fields(kind).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_tangent_field(&germ, 2, &mut rng);
        let d = decompose_tangent_field(&germ, &w).unwrap();
        prop_assert_eq!(germ.recompose(&d), germ.reduce_field(&w));
    }
}
