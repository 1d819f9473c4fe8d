use num_complex::Complex64;
use odd_lefschetz::charclass::{self, Bundle, RootSet};
use odd_lefschetz::jlo::{extrapolate_to_zero, FunctionSpec, LambdaMulti};
use odd_lefschetz::lefschetz::{self, FixedComponentSpec};
use odd_lefschetz::series::{rat, GradedSeries, Rational, Variable};
use odd_lefschetz::spectral::{heat_supertrace, GeometryStanza, LiftPhase, SpinStructure};
use proptest::prelude::*;

fn ring() -> Vec<Variable> {
    vec![Variable::root("x"), Variable::root("y")]
}

const CAP: u32 = 5;

fn arb_rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

fn arb_series() -> impl Strategy<Value = GradedSeries> {
    prop::collection::vec(((0u32..=CAP), (0u32..=CAP), arb_rational()), 0..8).prop_map(|terms| {
        GradedSeries::from_terms(
            ring(),
            CAP,
            terms
                .into_iter()
                .filter(|(a, b, _)| a + b <= CAP)
                .map(|(a, b, c)| (vec![a, b], c)),
        )
        .unwrap()
    })
}

fn arb_unit() -> impl Strategy<Value = GradedSeries> {
    (arb_series(), (1i64..=5), prop::bool::ANY).prop_map(|(s, c, neg)| {
        let c = if neg { -c } else { c };
        let constant = GradedSeries::constant(ring(), rat(c, 1), CAP);
        s.sub(&GradedSeries::constant(ring(), s.constant_term(), CAP))
            .unwrap()
            .add(&constant)
            .unwrap()
    })
}

proptest! {
    #[test]
    fn ring_axioms(a in arb_series(), b in arb_series(), c in arb_series()) {
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.add(&b).unwrap().add(&c).unwrap(), a.add(&b.add(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(
            a.mul(&b.add(&c).unwrap()).unwrap(),
            a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
        );
        prop_assert!(a.sub(&a).unwrap().is_zero());
        prop_assert_eq!(a.mul(&GradedSeries::one(ring(), CAP)).unwrap(), a.clone());
    }

    #[test]
    fn inverse_is_two_sided(u in arb_unit()) {
        let inv = u.invert().unwrap();
        let one = GradedSeries::one(ring(), CAP);
        prop_assert_eq!(u.mul(&inv).unwrap(), one.clone());
        prop_assert_eq!(inv.mul(&u).unwrap(), one);
        prop_assert_eq!(inv.invert().unwrap(), u);
    }

    #[test]
    fn truncation_is_a_ring_homomorphism(a in arb_series(), b in arb_series(), cap in 0u32..=CAP) {
        prop_assert_eq!(a.mul(&b).unwrap().truncate(cap), a.truncate(cap).mul(&b.truncate(cap)).unwrap());
        prop_assert_eq!(a.add(&b).unwrap().truncate(cap), a.truncate(cap).add(&b.truncate(cap)).unwrap());
    }

    #[test]
    fn exp_is_multiplicative(a in arb_series(), b in arb_series()) {
        let a0 = a.sub(&GradedSeries::constant(ring(), a.constant_term(), CAP)).unwrap();
        let b0 = b.sub(&GradedSeries::constant(ring(), b.constant_term(), CAP)).unwrap();
        prop_assert_eq!(
            a0.add(&b0).unwrap().exp().unwrap(),
            a0.exp().unwrap().mul(&b0.exp().unwrap()).unwrap()
        );
    }

    #[test]
    fn density_is_even_and_round_trips(n in 0usize..=2, m in 0usize..=2, cap in 0u32..=6) {
        let roots = RootSet::new(n, m);
        let d = charclass::local_density(&roots, cap);
        prop_assert!(d.terms().all(|(e, _)| e.iter().all(|k| k % 2 == 0)));
        let p = charclass::roots_to_pontryagin(&d, &roots).unwrap();
        prop_assert_eq!(charclass::pontryagin_to_roots(&p, &roots).unwrap(), d);
    }

    #[test]
    fn classes_multiply_over_bundle_splittings(n in 1usize..=2, m in 1usize..=2, cap in 0u32..=6) {
        // Â(T) for n roots equals the product over single roots, embedded.
        let roots = RootSet::new(n, m);
        let vars = roots.variables();
        let mut ahat = GradedSeries::one(vars.clone(), cap);
        let mut chd = GradedSeries::one(vars.clone(), cap);
        for (pos, var) in vars.iter().enumerate() {
            let single_roots = if pos < n { RootSet::new(1, 0) } else { RootSet::new(0, 1) };
            let single = if pos < n {
                charclass::ahat_series(&single_roots, cap)
            } else {
                charclass::ch_delta(&single_roots, cap)
            };
            let lifted = GradedSeries::from_terms(
                vars.clone(),
                cap,
                single.terms().map(|(e, c)| {
                    let mut full = vec![0; vars.len()];
                    full[pos] = e[0];
                    (full, c.clone())
                }),
            ).unwrap();
            let _ = var;
            if pos < n { ahat = ahat.mul(&lifted).unwrap(); } else { chd = chd.mul(&lifted).unwrap(); }
        }
        prop_assert_eq!(charclass::ahat_series(&roots, cap), ahat);
        prop_assert_eq!(charclass::ch_delta(&roots, cap), chd);
    }

    #[test]
    fn newton_route_agrees(n in 1usize..=3, k in 1usize..=3) {
        // P_k = sum of u_i^{2k}, rewritten greedily, equals Newton's identities.
        let roots = RootSet::new(n, 0);
        let cap = 2 * k as u32;
        let vars = roots.variables();
        let power_sum = GradedSeries::from_terms(
            vars.clone(),
            cap,
            (0..n).map(|i| {
                let mut e = vec![0; vars.len()];
                e[i] = 2 * k as u32;
                (e, rat(1, 1))
            }),
        ).unwrap();
        let greedy = charclass::roots_to_pontryagin(&power_sum, &roots).unwrap();
        let newton = charclass::newton_power_sums(&roots, Bundle::Tangent, k, cap);
        prop_assert_eq!(greedy, newton[k - 1].clone());
    }

    #[test]
    fn rebasing_by_two_flips_signs(
        codims in prop::collection::vec(prop::sample::select(vec![1u32, 5, 9]), 1..4),
        signs in prop::collection::vec(prop::bool::ANY, 4),
    ) {
        let ambient = 9;
        let comps: Vec<FixedComponentSpec> = codims
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let s = if signs[i] { 1 } else { -1 };
                FixedComponentSpec::flat(format!("F{i}"), ambient - c, c, s)
            })
            .collect();
        let report = lefschetz::index(&comps).unwrap();
        let flipped = report.rebase(report.m1 + 2).unwrap();
        for (a, b) in report.contributions.iter().zip(&flipped.contributions) {
            prop_assert_eq!(a.value, -b.value);
        }
        prop_assert_eq!(report.rebase(report.m1 + 4).unwrap().total, report.total);
    }

    #[test]
    fn lambda_tilde_factorial_recursion(l in prop::collection::vec(0u32..5, 1..5), extra in 0u32..5) {
        // λ̃(p+1)! = λ̃(p)! · (|λ(p)| + λ_{p+1} + p + 1)
        let base = LambdaMulti(l.clone());
        let mut longer = l.clone();
        longer.push(extra);
        let longer = LambdaMulti(longer);
        let step = base.weight() + extra + l.len() as u32 + 1;
        prop_assert_eq!(longer.tilde_factorial(), base.tilde_factorial() * step);
    }

    #[test]
    fn extrapolation_exact_on_model_curves(a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0) {
        let samples: Vec<(f64, Complex64)> = [0.4, 0.2, 0.1]
            .iter()
            .map(|&t: &f64| (t, Complex64::new(a + b * t.sqrt() + c * t, 0.0)))
            .collect();
        let e = extrapolate_to_zero(&samples, 0.5, f64::INFINITY).unwrap();
        prop_assert!((e.value.re - a).abs() < 1e-12);
    }

    #[test]
    fn real_functions_are_closed_under_products(n1 in -3i32..=3, n2 in -3i32..=3, axis in 0usize..3) {
        let f = FunctionSpec::cos(axis, n1, 3).mul(&FunctionSpec::sin((axis + 1) % 3, n2, 3));
        prop_assert!(f.is_real());
    }
}

#[test]
fn heat_supertrace_is_constant_in_t() {
    for spin in [SpinStructure::Periodic, SpinStructure::Antiperiodic] {
        for phase in [LiftPhase::Plus, LiftPhase::Minus] {
            let g = GeometryStanza::circle(spin, phase, 6).build().unwrap();
            let v: Vec<f64> = [0.07, 0.3, 2.0].iter().map(|&t| heat_supertrace(&g, t).value).collect();
            assert!(v.iter().all(|x| (x - v[0]).abs() < 1e-12));
        }
    }
}
