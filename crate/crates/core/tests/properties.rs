use std::collections::BTreeMap;

use proptest::prelude::*;
use sumset_lab::bounds::{check_instance, predicted_bound, TheoremId, Verdict};
use sumset_lab::field::{FieldElement, FieldSpec};
use sumset_lab::group::{GroupElement, GroupSpec};
use sumset_lab::poly::{build_difference_poly, cn_decompose, vanishes_on_grid, MultiPoly};
use sumset_lab::search::{
    enumerate_subsets, merge_reports, sweep_with_workers, ConstraintFamily, SweepPlan, Sweeper,
};
use sumset_lab::sumsets::{
    min_nu_over, nu, restricted_sumset, sumset, Ambient, Constraint, Element, Instance,
    LinearConstraint, SumsetProfile,
};

fn group_spec() -> impl Strategy<Value = GroupSpec> {
    (0usize..=2, prop::collection::vec(2u64..=12, 0..=2))
        .prop_map(|(rank, moduli)| GroupSpec::new(&moduli, rank).unwrap())
}

fn group_element(spec: &GroupSpec) -> impl Strategy<Value = GroupElement> {
    let spec = spec.clone();
    let k = spec.invariant_factors().len();
    (
        prop::collection::vec(-20i64..=20, spec.free_rank()),
        prop::collection::vec(-50i64..=50, k),
    )
        .prop_map(move |(f, t)| spec.element_from_i64(&f, &t).unwrap())
}

fn group_with_elements(n: usize) -> impl Strategy<Value = (GroupSpec, Vec<GroupElement>)> {
    group_spec().prop_flat_map(move |g| {
        let elems = prop::collection::vec(group_element(&g), n);
        (Just(g), elems)
    })
}

const FIELDS: [&str; 9] = ["GF(2)", "GF(3)", "GF(5)", "GF(7)", "GF(4)", "GF(8)", "GF(9)", "GF(25)", "Q"];

fn field_element(f: &FieldSpec) -> BoxedStrategy<FieldElement> {
    match f {
        FieldSpec::Rationals => {
            let f = f.clone();
            (-30i64..=30, 1i64..=12)
                .prop_map(move |(n, d)| f.rational(n, d).unwrap())
                .boxed()
        }
        FieldSpec::Finite(_) => {
            let all = f.elements().unwrap();
            (0..all.len()).prop_map(move |i| all[i].clone()).boxed()
        }
    }
}

fn field_with_elements(n: usize) -> impl Strategy<Value = (FieldSpec, Vec<FieldElement>)> {
    (0..FIELDS.len()).prop_flat_map(move |i| {
        let f: FieldSpec = FIELDS[i].parse().unwrap();
        (Just(f.clone()), prop::collection::vec(field_element(&f), n))
    })
}

proptest! {
    #[test]
    fn group_axioms((g, e) in group_with_elements(3), k in -6i64..=6) {
        let (x, y, z) = (&e[0], &e[1], &e[2]);
        let xy = g.add(x, y).unwrap();
        prop_assert_eq!(g.add(&xy, z).unwrap(), g.add(x, &g.add(y, z).unwrap()).unwrap());
        prop_assert_eq!(&xy, &g.add(y, x).unwrap());
        prop_assert_eq!(&g.add(x, &g.identity()).unwrap(), x);
        prop_assert!(g.add(x, &g.neg(x).unwrap()).unwrap().is_identity());
        prop_assert_eq!(g.sub(&xy, y).unwrap(), x.clone());
        let mut rep = g.identity();
        for _ in 0..k.unsigned_abs() {
            rep = g.add(&rep, x).unwrap();
        }
        if k < 0 {
            rep = g.neg(&rep).unwrap();
        }
        prop_assert_eq!(g.scalar_mul(k, x).unwrap(), rep);
        prop_assert_eq!(&g.parse_element(&g.format_element(x)).unwrap(), x);
        prop_assert_eq!(&g.to_string().parse::<GroupSpec>().unwrap(), &g);
    }

    #[test]
    fn element_orders_annihilate((g, e) in group_with_elements(1)) {
        if let sumset_lab::group::ElementOrder::Finite(n) = g.element_order(&e[0]).unwrap() {
            prop_assert!(g.scalar_mul(n as i64, &e[0]).unwrap().is_identity());
            for d in 1..n {
                prop_assert!(!g.scalar_mul(d as i64, &e[0]).unwrap().is_identity());
            }
        } else {
            prop_assert!(g.free_rank() > 0);
        }
    }

    #[test]
    fn field_axioms((f, e) in field_with_elements(3)) {
        let (a, b, c) = (&e[0], &e[1], &e[2]);
        let ab = f.mul(a, b).unwrap();
        prop_assert_eq!(&ab, &f.mul(b, a).unwrap());
        prop_assert_eq!(f.mul(&ab, c).unwrap(), f.mul(a, &f.mul(b, c).unwrap()).unwrap());
        let lhs = f.mul(a, &f.add(b, c).unwrap()).unwrap();
        let rhs = f.add(&ab, &f.mul(a, c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(&f.add(a, &f.neg(a).unwrap()).unwrap(), &f.zero());
        if !f.is_zero(a) {
            prop_assert_eq!(f.mul(a, &f.inv(a).unwrap()).unwrap(), f.one());
            prop_assert_eq!(f.div(&ab, a).unwrap(), b.clone());
        } else {
            prop_assert!(f.inv(a).is_err());
        }
        prop_assert_eq!(&f.parse_element(&f.format_element(a)).unwrap(), a);
        if let Some(q) = f.size() {
            // Frobenius: a^q = a.
            prop_assert_eq!(&f.pow(a, q as i64).unwrap(), a);
        }
    }
}

fn poly_over(f: &FieldSpec, nvars: usize, max_deg: u32) -> BoxedStrategy<MultiPoly> {
    let f = f.clone();
    let coeff = field_element(&f);
    prop::collection::vec((prop::collection::vec(0..=max_deg, nvars), coeff), 0..6)
        .prop_map(move |terms| {
            terms.into_iter().fold(MultiPoly::zero(&f, nvars), |acc, (exps, c)| {
                acc.add(&MultiPoly::term(&f, nvars, c, exps))
            })
        })
        .boxed()
}

fn prime_field() -> impl Strategy<Value = FieldSpec> {
    prop::sample::select(vec![2u64, 3, 5, 7]).prop_map(|p| FieldSpec::prime(p).unwrap())
}

proptest! {
    #[test]
    fn evaluation_is_a_ring_homomorphism(
        (f, g, h, pt) in prime_field().prop_flat_map(|f| {
            (Just(f.clone()), poly_over(&f, 2, 3), poly_over(&f, 2, 3), prop::collection::vec(field_element(&f), 2))
        })
    ) {
        let at = |p: &MultiPoly| p.eval(&pt).unwrap();
        prop_assert_eq!(at(&g.add(&h)), f.add(&at(&g), &at(&h)).unwrap());
        prop_assert_eq!(at(&g.mul(&h)), f.mul(&at(&g), &at(&h)).unwrap());
        prop_assert_eq!(at(&g.sub(&g)), f.zero());
        prop_assert_eq!(MultiPoly::parse(&g.to_string(), &f, 2).unwrap(), g);
    }

    #[test]
    fn cn_decomposition_invariants(
        (f, p, grids) in prime_field().prop_flat_map(|f| {
            let all = f.elements().unwrap();
            let max = all.len().min(4);
            let grid = prop::sample::subsequence(all, 1..=max);
            (Just(f.clone()), poly_over(&f, 2, 6), prop::collection::vec(grid, 2))
        })
    ) {
        let d = cn_decompose(&p, &grids).unwrap();
        prop_assert_eq!(d.reconstruct(), p.clone());
        prop_assert!(d.quotient_degrees_bounded(&p));
        prop_assert!(d.remainder_reduced());
        prop_assert_eq!(d.remainder.is_zero(), vanishes_on_grid(&p, &grids).unwrap());
        let _ = f;
    }
}

#[test]
fn difference_poly_zero_set_is_exhaustively_right_over_gf7() {
    let f = FieldSpec::prime(7).unwrap();
    let all = f.elements().unwrap();
    let amb = Ambient::Field(f.clone());
    for k in 0..=3 {
        for s in enumerate_subsets(&amb, k.max(1), None).unwrap().take(if k == 0 { 1 } else { usize::MAX }) {
            let s: Vec<FieldElement> = if k == 0 {
                Vec::new()
            } else {
                s.iter().map(|e| e.as_field().unwrap().clone()).collect()
            };
            let p = build_difference_poly(&f, &s);
            for a in &all {
                for b in &all {
                    let zero = f.is_zero(&p.eval(&[a.clone(), b.clone()]).unwrap());
                    assert_eq!(zero, s.contains(&f.sub(a, b).unwrap()));
                }
            }
        }
    }
}

const AMBIENTS: [&str; 10] = ["Z/5", "Z/6", "Z/8", "Z/2 x Z/2", "Z/2 x Z/4", "Z", "GF(5)", "GF(4)", "GF(9)", "Z x Z/3"];

fn small_set(amb: &Ambient) -> BoxedStrategy<Vec<Element>> {
    let u = sumset_lab::search::universe(amb, Some(3)).unwrap();
    prop::sample::subsequence(u, 1..=4).boxed()
}

fn constraint_for(amb: &Ambient) -> BoxedStrategy<Constraint> {
    let mut options: Vec<BoxedStrategy<Constraint>> = vec![
        Just(Constraint::None).boxed(),
        Just(Constraint::Distinct).boxed(),
        small_set(amb).prop_map(Constraint::Difference).boxed(),
    ];
    match amb {
        Ambient::Field(f) => options.push(poly_over(f, 2, 3).prop_map(Constraint::Poly).boxed()),
        Ambient::Group(g) => {
            let g2 = g.clone();
            options.push(
                prop::collection::vec((0u32..=2, 0u32..=2, group_element(&g2)), 0..=2)
                    .prop_map(|cs| {
                        Constraint::Linear(cs.into_iter().map(|(m, n, d)| LinearConstraint { m, n, d }).collect())
                    })
                    .boxed(),
            );
        }
    }
    prop::strategy::Union::new(options).boxed()
}

fn instance() -> impl Strategy<Value = Instance> {
    (0..AMBIENTS.len()).prop_flat_map(|i| {
        let amb: Ambient = AMBIENTS[i].parse().unwrap();
        (Just(amb.clone()), small_set(&amb), small_set(&amb), constraint_for(&amb))
            .prop_map(|(amb, a, b, c)| Instance::new(amb, a, b, c).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sumset_structure(inst in instance()) {
        let amb = inst.ambient();
        let full = sumset(amb, inst.a(), inst.b()).unwrap();
        let c = restricted_sumset(&inst).unwrap();
        prop_assert!(c.iter().all(|x| full.contains(x)));
        prop_assert!(full.len() >= inst.a().len().max(inst.b().len()));
        let total: usize = full.iter().map(|x| nu(amb, inst.a(), inst.b(), x).unwrap()).sum();
        prop_assert_eq!(total, inst.a().len() * inst.b().len());
        let min_full = min_nu_over(amb, inst.a(), inst.b(), &full).unwrap().unwrap();
        if let Some(min_c) = min_nu_over(amb, inst.a(), inst.b(), &c).unwrap() {
            prop_assert!(min_full <= min_c);
        }
        let profile = SumsetProfile::compute(&inst).unwrap();
        prop_assert_eq!(&profile.restricted, &c);
        prop_assert_eq!(profile.nu.keys().cloned().collect::<Vec<_>>(), full);
    }

    #[test]
    fn instance_json_round_trip(inst in instance()) {
        prop_assert_eq!(Instance::from_json(&inst.to_json()).unwrap(), inst);
    }

    #[test]
    fn no_proven_bound_is_violated(inst in instance()) {
        for t in TheoremId::ALL {
            let r = check_instance(t, &inst);
            prop_assert_ne!(r.verdict, Verdict::Violated, "{:?}", r);
            if r.verdict == Verdict::NotApplicable {
                prop_assert!(r.predicted.is_none());
            }
            if r.verdict == Verdict::Tight {
                prop_assert_eq!(r.predicted, Some(r.actual as i64));
            }
        }
    }

    #[test]
    fn cyclic_torsion_bound_is_weaker(inst in instance()) {
        let weak = predicted_bound(TheoremId::DifferenceCyclicTorsion, &inst);
        let strong = predicted_bound(TheoremId::DifferenceFieldLike, &inst);
        if let (Some(w), Some(s)) = (weak, strong) {
            prop_assert!(w <= s);
        }
        // Over a field the difference bound is the polynomial bound for ∏ (x - y - s).
        if inst.ambient().field().is_some()
            && matches!(inst.constraint(), Constraint::Difference(s) if !s.is_empty())
        {
            prop_assert_eq!(strong, predicted_bound(TheoremId::PolyRestricted, &inst));
        }
    }

    #[test]
    fn translating_a_and_s_shifts_c(inst in instance(), t_idx in 0usize..64) {
        let amb = inst.ambient().clone();
        let s = match inst.constraint() {
            Constraint::Difference(s) => s.clone(),
            Constraint::Distinct => vec![amb.zero()],
            _ => return Ok(()),
        };
        let u = sumset_lab::search::universe(&amb, Some(3)).unwrap();
        let t = &u[t_idx % u.len()];
        let shift = |v: &[Element]| v.iter().map(|x| amb.add(x, t).unwrap()).collect::<Vec<_>>();
        let moved = Instance::new(
            amb.clone(),
            shift(inst.a()),
            inst.b().to_vec(),
            Constraint::Difference(shift(&s)),
        )
        .unwrap();
        let mut expected = shift(&restricted_sumset(&inst).unwrap());
        expected.sort();
        prop_assert_eq!(restricted_sumset(&moved).unwrap(), expected);
        let as_difference = Instance::new(amb.clone(), inst.a().to_vec(), inst.b().to_vec(), Constraint::Difference(s)).unwrap();
        for th in [TheoremId::DifferenceFieldLike, TheoremId::DifferenceCyclicTorsion, TheoremId::PolyRestricted, TheoremId::PsBound] {
            let before = check_instance(th, &as_difference);
            let after = check_instance(th, &moved);
            prop_assert_eq!(before.predicted, after.predicted);
            prop_assert_eq!(before.actual, after.actual);
        }
    }
}

/// Tallies computed one instance at a time with the exact checker.
fn brute_tallies(plan: &SweepPlan, constraints: &[Constraint]) -> BTreeMap<TheoremId, [u64; 4]> {
    let amb: Ambient = plan.ambient.parse().unwrap();
    let sets = |lo: usize, hi: usize| -> Vec<Vec<Element>> {
        (lo..=hi).flat_map(|k| enumerate_subsets(&amb, k, plan.box_radius).unwrap()).collect()
    };
    let mut out: BTreeMap<TheoremId, [u64; 4]> = BTreeMap::new();
    for a in sets(plan.min_a, plan.max_a) {
        for b in sets(plan.min_b, plan.max_b) {
            for c in constraints {
                let inst = Instance::new(amb.clone(), a.clone(), b.clone(), c.clone()).unwrap();
                for &t in &plan.theorems {
                    let slot = match check_instance(t, &inst).verdict {
                        Verdict::Satisfied => 0,
                        Verdict::Tight => 1,
                        Verdict::Violated => 2,
                        Verdict::NotApplicable => 3,
                    };
                    out.entry(t).or_default()[slot] += 1;
                }
            }
        }
    }
    out
}

#[test]
fn table_engine_matches_exact_checks() {
    let theorems: Vec<TheoremId> = TheoremId::ALL.iter().copied().chain([TheoremId::TestSentinel]).collect();
    for (ambient, box_radius) in [("Z/6", None), ("Z/2 x Z/2", None), ("GF(4)", None), ("GF(5)", None), ("Z", Some(2)), ("Z/9", None)] {
        let amb: Ambient = ambient.parse().unwrap();
        let mut plan = SweepPlan::new(ambient, 2, 3, &theorems).with_constraints(vec![
            ConstraintFamily::None,
            ConstraintFamily::Distinct,
            ConstraintFamily::Difference { min_size: 1, max_size: 2 },
        ]);
        plan.box_radius = box_radius;
        let mut constraints = vec![Constraint::None, Constraint::Distinct];
        let s_universe: Vec<Element> = if amb.is_finite() {
            sumset_lab::search::universe(&amb, None).unwrap()
        } else {
            let u = sumset_lab::search::universe(&amb, box_radius).unwrap();
            let mut d: Vec<Element> = u.iter().flat_map(|x| u.iter().map(|y| amb.sub(x, y).unwrap())).collect();
            d.sort();
            d.dedup();
            d
        };
        for (i, x) in s_universe.iter().enumerate() {
            constraints.push(Constraint::Difference(vec![x.clone()]));
            for y in &s_universe[i + 1..] {
                constraints.push(Constraint::Difference(vec![x.clone(), y.clone()]));
            }
        }
        if let Ambient::Group(g) = &amb {
            if g.is_finite() {
                plan.constraints.push(ConstraintFamily::Linear { min_l: 1, max_l: 1, max_m: 1, max_n: 2 });
                for m in 0..=1 {
                    for n in 0..=2 {
                        for d in g.elements().unwrap() {
                            constraints.push(Constraint::Linear(vec![LinearConstraint { m, n, d }]));
                        }
                    }
                }
            }
        }
        let report = sweep_with_workers(&plan, 1).unwrap();
        let expected = brute_tallies(&plan, &constraints);
        for t in &report.tallies {
            let e = expected[&t.theorem];
            assert_eq!(
                [t.satisfied, t.tight, t.violated, t.not_applicable],
                e,
                "{ambient}: {}",
                t.theorem
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn partitions_merge_to_the_same_report(
        ambient in prop::sample::select(vec!["Z/5", "Z/6", "GF(4)", "Z/2 x Z/2"]),
        cuts in prop::collection::vec(0usize..1000, 0..5),
        tight_cap in 0usize..20,
    ) {
        let mut plan = SweepPlan::new(ambient, 3, 2, &[TheoremId::LevConjecture, TheoremId::DifferenceCyclicTorsion, TheoremId::TestSentinel])
            .with_constraints(vec![ConstraintFamily::Distinct, ConstraintFamily::Difference { min_size: 1, max_size: 2 }]);
        plan.tight_cap = tight_cap;
        plan.violation_cap = 7;
        let sweeper = Sweeper::new(&plan).unwrap();
        let len = sweeper.outer_len();
        let mut points: Vec<usize> = cuts.iter().map(|c| c % (len + 1)).collect();
        points.push(0);
        points.push(len);
        points.sort();
        let parts: Vec<_> = points
            .windows(2)
            .map(|w| sweeper.run_range(w[0]..w[1]).unwrap())
            .collect();
        let merged = merge_reports(parts, plan.tight_cap, plan.violation_cap).unwrap().without_timing();
        let whole = sweeper.run(1).unwrap().without_timing();
        prop_assert_eq!(&merged, &whole);
        prop_assert_eq!(&sweeper.run(3).unwrap().without_timing(), &whole);
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let mut plan = SweepPlan::new("GF(5)", 3, 3, &[TheoremId::PolyRestricted, TheoremId::PsBound])
        .with_constraints(vec![
            ConstraintFamily::Difference { min_size: 0, max_size: 2 },
            ConstraintFamily::RandomPoly { count: 20, max_degree: 3 },
        ]);
    plan.seed = 99;
    let a = serde_json::to_string(&sweep_with_workers(&plan, 1).unwrap().without_timing()).unwrap();
    let b = serde_json::to_string(&sweep_with_workers(&plan, 2).unwrap().without_timing()).unwrap();
    assert_eq!(a, b);
    plan.samples = Some(300);
    let a = serde_json::to_string(&sweep_with_workers(&plan, 1).unwrap().without_timing()).unwrap();
    let b = serde_json::to_string(&sweep_with_workers(&plan, 2).unwrap().without_timing()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn lev_hunts_find_nothing_in_known_cases() {
    for spec in ["Z/5", "Z/2 x Z/2", "Z/8"] {
        let g: GroupSpec = spec.parse().unwrap();
        let n = g.order().unwrap() as usize;
        let r = sumset_lab::search::hunt_lev_counterexample(&g, n, n, u64::MAX, 1).unwrap();
        assert!(r.witness.is_none(), "{spec}");
        assert!(r.exhausted);
        assert_eq!(r.instances_checked, ((1u64 << n) - 1).pow(2));
    }
}
