use proptest::prelude::*;
use rootdyn::operator::*;
use rootdyn::orbit::{classify_seed, EscapeConfig, Outcome};
use rootdyn::roots::{critical_set_ank, strange_fixed_zpm_a, strange_fixed_zpm_b};
use rootdyn::{BehlParams, ExtendedComplex, GeneralParams, SphereMap, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `|x − y|`, both read in the chart where `y` has modulus ≤ 1.
fn dist(x: ExtendedComplex, y: ExtendedComplex) -> f64 {
    let (x, y) = if y.modulus() <= 1.0 { (x, y) } else { (x.recip(), y.recip()) };
    match (x.to_complex(), y.to_complex()) {
        (Some(u), Some(v)) => (u - v).norm(),
        _ => f64::INFINITY,
    }
}

fn pair_dist(p: (C64, C64), q: (C64, C64)) -> f64 {
    let d = |u: C64, v: C64| dist(ExtendedComplex::finite(u), ExtendedComplex::finite(v));
    (d(p.0, q.0).max(d(p.1, q.1))).min(d(p.0, q.1).max(d(p.1, q.0)))
}

fn complex(half: f64) -> impl Strategy<Value = C64> {
    (-half..half, -half..half).prop_map(|(re, im)| c(re, im))
}

prop_compose! {
    fn general()(a in complex(3.0), n in 2u32..=6, k in 1u32..=4) -> GeneralParams {
        GeneralParams::new(a, n, k).unwrap()
    }
}

fn well_conditioned(p: &GeneralParams, z: C64) -> bool {
    (z - p.a).norm() > 0.05 && (1.0 - p.a * z).norm() > 0.05
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn inversion_commutes_with_the_operator(p in general(), z in complex(2.5)) {
        let x = ExtendedComplex::finite(z);
        let lhs = eval_ank(&p, x.recip());
        let rhs = eval_ank(&p, x).recip();
        prop_assert!(dist(lhs, rhs) < 1e-12, "{lhs:?} vs {rhs:?}");
    }

    #[test]
    fn sign_flip_of_parameter_and_point(p in general(), z in complex(2.5)) {
        prop_assume!(well_conditioned(&p, z));
        let q = GeneralParams::new(-p.a, p.n, p.k).unwrap();
        let lhs = eval_ank(&q, ExtendedComplex::finite(-z));
        let mut rhs = eval_ank(&p, ExtendedComplex::finite(z));
        if (p.n + p.k) % 2 == 1 {
            rhs = rhs.neg();
        }
        prop_assert!(dist(lhs, rhs) < 1e-9 * (1.0 + rhs.modulus().min(1.0 / rhs.modulus())));
    }

    #[test]
    fn charts_agree_on_overlap(p in general(), r in 0.6f64..1.6, t in 0.0f64..std::f64::consts::TAU) {
        let z = C64::from_polar(r, t);
        prop_assume!(well_conditioned(&p, z));
        let via_std = eval_ank(&p, ExtendedComplex::from_parts(rootdyn::Chart::Standard, z));
        let via_inv = eval_ank(&p, ExtendedComplex::from_parts(rootdyn::Chart::Inverted, z.inv()));
        prop_assert!(dist(via_inv, via_std) < 1e-9);
    }

    #[test]
    fn derivative_matches_finite_difference(p in general(), z in complex(1.0)) {
        prop_assume!(well_conditioned(&p, z) && p.reduced().is_none());
        let h = 1e-6;
        let f = |u: C64| eval_ank(&p, ExtendedComplex::finite(u)).to_complex().unwrap();
        let fd = (f(z + h) - f(z - h)) / (2.0 * h);
        let d = eval_ank_deriv(&p, ExtendedComplex::finite(z)).unwrap();
        prop_assert!((fd - d).norm() <= 1e-5 * (1.0 + d.norm()), "{fd} vs {d}");
    }

    #[test]
    fn behl_derivative_matches_finite_difference(b in complex(6.0), z in complex(1.0)) {
        let p = BehlParams::new(b).unwrap();
        let (ca, cb) = (p.coeff_a(), p.coeff_b());
        prop_assume!((cb + ca * z).norm() > 0.05);
        let h = 1e-6;
        let f = |u: C64| eval_b(&p, ExtendedComplex::finite(u)).to_complex().unwrap();
        let fd = (f(z + h) - f(z - h)) / (2.0 * h);
        let d = eval_b_deriv(&p, ExtendedComplex::finite(z)).unwrap();
        prop_assert!((fd - d).norm() <= 1e-5 * (1.0 + d.norm()), "{fd} vs {d}");
    }

    #[test]
    fn reparametrization_round_trip(a in complex(4.0)) {
        prop_assume!((a + 1.0).norm() > 1e-3);
        let (b1, b2) = reparam_b_of_a(a).unwrap();
        for b in [b1, b2] {
            let back = reparam_a_of_b(b).unwrap();
            prop_assert!((back - a).norm() < 1e-9 * (1.0 + b.norm()), "a={a} b={b} back={back}");
        }
    }

    #[test]
    fn free_critical_points_are_reciprocal(p in general()) {
        prop_assume!(p.reduced().is_none());
        let (cp, cm) = p.free_critical_pair().unwrap();
        prop_assert!((cp * cm - 1.0).norm() < 1e-10);
    }

    #[test]
    fn critical_points_total_twice_degree_minus_two(p in general()) {
        let set = critical_set_ank(&p);
        prop_assert_eq!(set.total_multiplicity(), 2 * p.degree() - 2);
    }

    #[test]
    fn rank_map_is_odd(p in general(), z in complex(2.5)) {
        let x = ExtendedComplex::finite(z);
        let lhs = eval_r(&p, x.neg());
        let rhs = eval_r(&p, x).neg();
        prop_assert!(dist(lhs, rhs) < 1e-12);
    }

    #[test]
    fn square_root_branches_agree(p in general(), w in complex(3.0)) {
        let x = ExtendedComplex::finite(w);
        prop_assert!(dist(eval_s_branch(&p, x, true), eval_s_branch(&p, x, false)) < 1e-12);
    }

    #[test]
    fn behl_and_general_critical_points_coincide(b in complex(6.0)) {
        let p = BehlParams::new(b).unwrap();
        prop_assume!(p.reduced().is_none() && !p.is_order_five());
        let g = p.to_general().unwrap();
        prop_assume!(g.reduced().is_none());
        let (Ok(cb), Some(cg)) = (p.free_critical_pair(), g.free_critical_pair()) else {
            return Err(TestCaseError::fail("missing critical pair"));
        };
        prop_assert!(pair_dist(cb, cg) < 1e-8, "{cb:?} vs {cg:?}");
    }

    #[test]
    fn behl_strange_points_match_general(b in complex(6.0)) {
        let p = BehlParams::new(b).unwrap();
        prop_assume!(p.reduced().is_none());
        let Ok(a) = reparam_a_of_b(b) else { return Ok(()) };
        let Ok(zb) = strange_fixed_zpm_b(b) else { return Ok(()) };
        let za = strange_fixed_zpm_a(a);
        prop_assert!(pair_dist(zb, za) < 1e-7, "{zb:?} vs {za:?}");
    }

    #[test]
    fn classification_pairs_under_inversion(p in general(), r in 0.05f64..0.9, t in 0.0f64..std::f64::consts::TAU) {
        let z = ExtendedComplex::finite(C64::from_polar(r, t));
        let cfg = EscapeConfig::default();
        let inner = classify_seed(&p, z, &cfg, &[]);
        let outer = classify_seed(&p, z.recip(), &cfg, &[]);
        let mirrored = match inner.outcome {
            Outcome::ToZero => Outcome::ToInfinity,
            Outcome::ToInfinity => Outcome::ToZero,
            o => o,
        };
        prop_assert_eq!(outer.outcome, mirrored);
        prop_assert_eq!(outer.iterations, inner.iterations);
    }

    #[test]
    fn unit_circle_is_invariant_for_real_parameters(a in -3.0f64..3.0, n in 2u32..=6, k in 1u32..=4, t in 0.0f64..std::f64::consts::TAU) {
        let p = GeneralParams::new(c(a, 0.0), n, k).unwrap();
        prop_assume!(well_conditioned(&p, C64::from_polar(1.0, t)));
        let image = p.eval(ExtendedComplex::finite(C64::from_polar(1.0, t)));
        prop_assert!((image.modulus() - 1.0).abs() < 1e-12);
    }
}
