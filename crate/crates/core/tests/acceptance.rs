//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines are always printed; exits nonzero when any
//! criterion fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sumset_lab::bounds::{check_instance, TheoremId, Verdict};
use sumset_lab::field::{embed_elementary, FieldElement, FieldSpec};
use sumset_lab::poly::{cn_decompose, lemma21_check, poly_eval, Degree, Line, MultiPoly};
use sumset_lab::search::{
    enumerate_subsets, sweep, ConstraintFamily, SweepPlan, SweepReport,
};
use sumset_lab::sumsets::{
    min_nu_over, nu, restricted_sumset, sumset, Ambient, Constraint, Element, Instance,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run(plan: &SweepPlan) -> Result<SweepReport, String> {
    sweep(plan).map_err(|e| format!("{}: {e}", plan.ambient))
}

fn no_violations(r: &SweepReport) -> Result<(), String> {
    ensure(r.violation_count == 0, || {
        format!(
            "{}: {} violations, first {:?}",
            r.ambient,
            r.violation_count,
            r.violations.first().map(|v| &v.report)
        )
    })?;
    for t in &r.tallies {
        ensure(t.total() == r.instances_checked, || {
            format!("{}: tallies for {} do not sum to the instance count", r.ambient, t.theorem)
        })?;
    }
    ensure(!r.partial, || format!("{}: sweep was truncated", r.ambient))
}

fn within(limit: Duration, started: Instant) -> Result<(), String> {
    let took = started.elapsed();
    ensure(took < limit, || format!("took {took:.1?}, limit {limit:?}"))
}

fn cyclic(n: u64) -> String {
    format!("Z/{n}")
}

fn kemperman_scherk() -> Outcome {
    let started = Instant::now();
    let mut total = 0;
    for n in 1..=7 {
        let plan = SweepPlan::new(&cyclic(n), n as usize, n as usize, &[TheoremId::KempermanScherk]);
        let r = run(&plan)?;
        no_violations(&r)?;
        let expected = ((1u64 << n) - 1).pow(2);
        ensure(r.instances_checked == expected, || {
            format!("Z/{n}: {} instances, expected {expected}", r.instances_checked)
        })?;
        total += r.instances_checked;
    }
    within(Duration::from_secs(10), started)?;
    Ok(format!("{total} instances over Z/1..Z/7, 0 violations, {:.2?}", started.elapsed()))
}

fn erdos_heilbronn_anr() -> Outcome {
    let started = Instant::now();
    let mut total = 0;
    let mut eh_applicable = 0;
    for p in [2u64, 3, 5, 7, 11] {
        let plan = SweepPlan::new(
            &cyclic(p),
            p as usize,
            p as usize,
            &[TheoremId::ErdosHeilbronn, TheoremId::Anr],
        )
        .with_constraints(vec![ConstraintFamily::Distinct]);
        let r = run(&plan)?;
        no_violations(&r)?;
        let expected = ((1u64 << p) - 1).pow(2);
        ensure(r.instances_checked == expected, || {
            format!("Z/{p}: {} instances, expected {expected}", r.instances_checked)
        })?;
        let eh = r.tally(TheoremId::ErdosHeilbronn).unwrap();
        // EH applies exactly to the A = B instances.
        ensure(eh.total() - eh.not_applicable == (1 << p) - 1, || {
            format!("Z/{p}: erdos_heilbronn applied to {} instances", eh.total() - eh.not_applicable)
        })?;
        ensure(r.tally(TheoremId::Anr).unwrap().not_applicable == 0, || {
            format!("Z/{p}: anr skipped instances")
        })?;
        eh_applicable += eh.total() - eh.not_applicable;
        total += r.instances_checked;
    }
    within(Duration::from_secs(120), started)?;
    Ok(format!(
        "{total} instances (EH applicable on {eh_applicable}), 0 violations, {:.2?}",
        started.elapsed()
    ))
}

fn lev_conjecture() -> Outcome {
    let started = Instant::now();
    let mut total = 0;
    let mut tight = 0;
    for n in 1..=12 {
        let plan = SweepPlan::new(&cyclic(n), n as usize, n as usize, &[TheoremId::LevConjecture])
            .with_constraints(vec![ConstraintFamily::Distinct]);
        let r = run(&plan)?;
        no_violations(&r)?;
        let expected = ((1u64 << n) - 1).pow(2);
        ensure(r.instances_checked == expected, || {
            format!("Z/{n}: {} instances, expected {expected}", r.instances_checked)
        })?;
        total += r.instances_checked;
        tight += r.tight_count;
    }
    within(Duration::from_secs(600), started)?;

    let mut plan = SweepPlan::new("Z/5", 3, 3, &[TheoremId::LevConjecture])
        .with_constraints(vec![ConstraintFamily::Distinct]);
    plan.min_a = 3;
    plan.min_b = 3;
    let r = run(&plan)?;
    let found = r.tight_instances.iter().any(|t| {
        let i = &t.report.witness.instance;
        let names = |v: &[sumset_lab::sumsets::ElementText]| v.iter().map(|e| e.text()).collect::<Vec<_>>();
        names(&i.a) == ["0", "1", "2"] && names(&i.b) == ["0", "1", "2"]
            && t.report.predicted == Some(3)
            && t.report.actual == 3
    });
    ensure(found, || "Z/5 tight instance {0,1,2} not recorded".into())?;
    Ok(format!(
        "{total} instances over Z/1..Z/12, 0 violations, {tight} tight, Z/5 {{0,1,2}} tight; {:.2?}",
        started.elapsed()
    ))
}

fn poly_restricted() -> Outcome {
    let started = Instant::now();
    let mut total = 0;
    let mut applicable = 0;
    for p in [2u64, 3, 5, 7] {
        let mut plan = SweepPlan::new(&format!("GF({p})"), 3, 3, &[TheoremId::PolyRestricted])
            .with_constraints(vec![
                ConstraintFamily::Difference { min_size: 0, max_size: 2 },
                ConstraintFamily::RandomPoly { count: 500, max_degree: 3 },
            ]);
        plan.seed = 20_240_601 + p;
        let r = run(&plan)?;
        no_violations(&r)?;
        let t = r.tally(TheoremId::PolyRestricted).unwrap();
        applicable += t.total() - t.not_applicable;
        total += r.instances_checked;
    }
    ensure(applicable > 0, || "no applicable instances".into())?;
    Ok(format!(
        "{total} instances, {applicable} with C nonempty, 0 violations; {:.2?}",
        started.elapsed()
    ))
}

fn linear_restricted() -> Outcome {
    let started = Instant::now();
    let mut total = 0;
    for n in 1..=8 {
        let plan = SweepPlan::new(&cyclic(n), 3, 3, &[TheoremId::LinearRestricted]).with_constraints(vec![
            ConstraintFamily::Linear { min_l: 0, max_l: 2, max_m: 2, max_n: 2 },
        ]);
        let r = run(&plan)?;
        no_violations(&r)?;
        total += r.instances_checked;
    }
    let mut plan = SweepPlan::new("Z", 3, 3, &[TheoremId::LinearRestricted]).with_constraints(vec![
        ConstraintFamily::Linear { min_l: 1, max_l: 2, max_m: 2, max_n: 2 },
    ]);
    plan.box_radius = Some(2);
    plan.samples = Some(10_000);
    plan.seed = 7;
    let r = run(&plan)?;
    no_violations(&r)?;
    ensure(r.instances_checked == 10_000, || format!("{} samples", r.instances_checked))?;
    let applied = {
        let t = r.tally(TheoremId::LinearRestricted).unwrap();
        t.total() - t.not_applicable
    };
    Ok(format!(
        "{total} exhaustive instances over Z/1..Z/8, 10000 sampled over Z (box 2, {applied} applicable), 0 violations; {:.2?}",
        started.elapsed()
    ))
}

fn difference_restricted() -> Outcome {
    let started = Instant::now();
    let diff = vec![ConstraintFamily::Difference { min_size: 1, max_size: 3 }];
    let mut total = 0;
    for amb in ["GF(2)", "GF(3)", "GF(5)", "GF(7)", "Z/2 x Z/2"] {
        let plan = SweepPlan::new(amb, 3, 3, &[TheoremId::DifferenceFieldLike]).with_constraints(diff.clone());
        let r = run(&plan)?;
        no_violations(&r)?;
        ensure(r.tally(TheoremId::DifferenceFieldLike).unwrap().not_applicable < r.instances_checked, || {
            format!("{amb}: never applicable")
        })?;
        total += r.instances_checked;
    }

    // Every (Z/2)^2 instance through the exact check, which computes C in
    // GF(4) via the coordinate embedding, against the group computation.
    let amb: Ambient = "Z/2 x Z/2".parse().unwrap();
    let g = amb.group().unwrap().clone();
    let gf4 = FieldSpec::extension(2, 2).unwrap();
    let sets: Vec<Vec<Element>> = (1..=3)
        .flat_map(|k| enumerate_subsets(&amb, k, None).unwrap())
        .collect();
    let mut embedded = 0;
    for a in &sets {
        for b in &sets {
            for s in &sets {
                let inst = Instance::new(amb.clone(), a.clone(), b.clone(), Constraint::Difference(s.clone()))
                    .unwrap();
                let report = check_instance(TheoremId::DifferenceFieldLike, &inst);
                let direct: Vec<String> = restricted_sumset(&inst).unwrap().iter().map(ToString::to_string).collect();
                ensure(report.witness.restricted == direct, || format!("embedding disagrees on {:?}", inst.to_doc()))?;
                ensure(report.verdict != Verdict::Violated, || format!("violation {report:?}"))?;
                embedded += 1;
            }
        }
    }
    // The embedding itself is additive.
    for x in g.elements().unwrap() {
        for y in g.elements().unwrap() {
            let lhs = embed_elementary(&g.add(&x, &y).unwrap(), &g, &gf4).unwrap();
            let rhs = gf4
                .add(&embed_elementary(&x, &g, &gf4).unwrap(), &embed_elementary(&y, &g, &gf4).unwrap())
                .unwrap();
            ensure(lhs == rhs, || "embedding is not additive".into())?;
        }
    }

    for amb in (1..=8).map(cyclic) {
        let plan = SweepPlan::new(&amb, 3, 3, &[TheoremId::DifferenceCyclicTorsion]).with_constraints(diff.clone());
        let r = run(&plan)?;
        no_violations(&r)?;
        total += r.instances_checked;
    }
    let mut plan = SweepPlan::new("Z", 3, 3, &[TheoremId::DifferenceCyclicTorsion]).with_constraints(diff.clone());
    plan.box_radius = Some(2);
    let r = run(&plan)?;
    no_violations(&r)?;
    total += r.instances_checked;

    let mut plan = SweepPlan::new("GF(3)", 2, 2, &[TheoremId::DifferenceFieldLike])
        .with_constraints(vec![ConstraintFamily::Difference { min_size: 1, max_size: 1 }]);
    plan.min_a = 2;
    plan.min_b = 2;
    let r = run(&plan)?;
    let found = r.tight_instances.iter().any(|t| {
        let i = &t.report.witness.instance;
        let txt = |v: &[sumset_lab::sumsets::ElementText]| v.iter().map(|e| e.text()).collect::<Vec<_>>();
        txt(&i.a) == ["0", "1"]
            && txt(&i.b) == ["0", "1"]
            && matches!(&i.constraint, sumset_lab::sumsets::ConstraintDoc::Difference(s) if txt(s) == ["0"])
            && t.report.predicted == Some(1)
    });
    ensure(found, || "GF(3) A = B = {0,1}, S = {0} not recorded as tight".into())?;
    Ok(format!(
        "{total} swept instances and {embedded} (Z/2)^2 instances via GF(4), 0 violations, GF(3) tight instance recorded; {:.2?}",
        started.elapsed()
    ))
}

fn random_poly_gf5(rng: &mut ChaCha8Rng, f5: &FieldSpec, max_deg: u32) -> MultiPoly {
    let mut p = MultiPoly::zero(f5, 2);
    for i in 0..=max_deg {
        for j in 0..=(max_deg - i) {
            if rng.gen_bool(0.4) {
                let c = f5.from_i64(rng.gen_range(1..5));
                p = p.add(&MultiPoly::term(f5, 2, c, vec![i, j]));
            }
        }
    }
    p
}

fn random_grid(rng: &mut ChaCha8Rng, f5: &FieldSpec) -> Vec<FieldElement> {
    let k = rng.gen_range(1..=4);
    let mut pts: BTreeSet<i64> = BTreeSet::new();
    while pts.len() < k {
        pts.insert(rng.gen_range(0..5));
    }
    pts.into_iter().map(|v| f5.from_i64(v)).collect()
}

fn cn_engine() -> Outcome {
    let started = Instant::now();
    let f5 = FieldSpec::prime(5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut vanishing = 0;
    for trial in 0..1000 {
        let grids = vec![random_grid(&mut rng, &f5), random_grid(&mut rng, &f5)];
        let f = if trial % 2 == 0 {
            random_poly_gf5(&mut rng, &f5, 6)
        } else {
            // A combination of the grid polynomials vanishes on the grid.
            let g1 = MultiPoly::vanishing(&f5, 2, 0, &grids[0]);
            let g2 = MultiPoly::vanishing(&f5, 2, 1, &grids[1]);
            g1.mul(&random_poly_gf5(&mut rng, &f5, 3))
                .add(&g2.mul(&random_poly_gf5(&mut rng, &f5, 3)))
        };
        let d = cn_decompose(&f, &grids).map_err(|e| e.to_string())?;
        ensure(d.reconstruct() == f, || format!("trial {trial}: reconstruction failed for {f}"))?;
        let df = f.total_degree();
        for (g, h) in d.grid_polys.iter().zip(&d.quotients) {
            let ok = match (df, g.total_degree(), h.total_degree()) {
                (_, _, Degree::NegInfinity) => true,
                (Degree::Finite(df), Degree::Finite(dg), Degree::Finite(dh)) => dh + dg <= df,
                _ => false,
            };
            ensure(ok, || format!("trial {trial}: degree bound fails for {f}"))?;
        }
        let mut vanishes = true;
        for x in &grids[0] {
            for y in &grids[1] {
                if !f5.is_zero(&poly_eval(&f, &[x.clone(), y.clone()]).unwrap()) {
                    vanishes = false;
                }
            }
        }
        ensure(vanishes == d.remainder.is_zero(), || {
            format!("trial {trial}: remainder zero = {} but vanishing = {vanishes} for {f}", d.remainder.is_zero())
        })?;
        vanishing += usize::from(vanishes);
    }
    within(Duration::from_secs(30), started)?;
    Ok(format!("1000/1000 pass ({vanishing} vanishing); {:.2?}", started.elapsed()))
}

fn lemma_lines() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let primes = [2u64, 3, 5, 7, 11];
    let mut tight = 0;
    let mut done = 0;
    while done < 1000 {
        let p = primes[rng.gen_range(0..primes.len())];
        let f = FieldSpec::prime(p).unwrap();
        let pick = |rng: &mut ChaCha8Rng| -> Vec<u64> {
            let k = rng.gen_range(1..=p.min(5) as usize);
            let mut s = BTreeSet::new();
            while s.len() < k {
                s.insert(rng.gen_range(0..p));
            }
            s.into_iter().collect()
        };
        let a = pick(&mut rng);
        let b = pick(&mut rng);
        // P as a coefficient list, evaluated here with plain modular arithmetic.
        let deg = rng.gen_range(0..=3u32);
        let mut coeffs: Vec<(u32, u32, u64)> = Vec::new();
        for i in 0..=deg {
            for j in 0..=(deg - i) {
                if rng.gen_bool(0.5) {
                    coeffs.push((i, j, rng.gen_range(1..p)));
                }
            }
        }
        let eval = |x: u64, y: u64| -> u64 {
            coeffs.iter().fold(0, |acc, &(i, j, c)| {
                (acc + c * x.pow(i) % p * y.pow(j) % p) % p
            })
        };
        let lambda = rng.gen_range(1..p);
        let mus: BTreeSet<u64> = a
            .iter()
            .flat_map(|&x| b.iter().map(move |&y| (x, y)))
            .filter(|&(x, y)| eval(x, y) != 0)
            .map(|(x, y)| (x + lambda * y) % p)
            .collect();
        if mus.is_empty() {
            continue;
        }
        let mut poly = MultiPoly::zero(&f, 2);
        for &(i, j, c) in &coeffs {
            poly = poly.add(&MultiPoly::term(&f, 2, f.from_i64(c as i64), vec![i, j]));
        }
        let lines: Vec<Line> = mus
            .iter()
            .map(|&m| Line {
                lambda: f.from_i64(lambda as i64),
                mu: f.from_i64(m as i64),
            })
            .collect();
        let els = |v: &[u64]| v.iter().map(|&x| f.from_i64(x as i64)).collect::<Vec<_>>();
        let report = lemma21_check(&els(&a), &els(&b), &lines, &poly).map_err(|e| e.to_string())?;
        ensure(report.hypotheses_ok, || format!("hypotheses rejected: {report:?}"))?;
        let nus: Vec<usize> = mus
            .iter()
            .map(|&m| {
                a.iter()
                    .flat_map(|&x| b.iter().map(move |&y| (x, y)))
                    .filter(|&(x, y)| (x + lambda * y) % p == m)
                    .count()
            })
            .collect();
        ensure(report.nu_values == nus, || format!("nu {:?} vs oracle {nus:?}", report.nu_values))?;
        let actual_deg = poly.total_degree().finite().unwrap_or(0) as i64;
        let lhs = mus.len() + nus.iter().min().unwrap();
        let rhs = (a.len() + b.len()) as i64 - actual_deg;
        ensure(report.lhs == lhs && report.rhs == Some(rhs), || format!("lhs/rhs mismatch {report:?}"))?;
        ensure(report.inequality_holds && lhs as i64 >= rhs, || format!("inequality fails: {report:?}"))?;
        tight += usize::from(report.is_tight);
        done += 1;
    }

    let f5 = FieldSpec::prime(5).unwrap();
    let e = |v: i64| f5.from_i64(v);
    let lines: Vec<Line> = [1, 2, 3].iter().map(|&m| Line { lambda: e(1), mu: e(m) }).collect();
    let p = MultiPoly::parse("x - y", &f5, 2).unwrap();
    let r = lemma21_check(&[e(0), e(1), e(2)], &[e(0), e(1), e(2)], &lines, &p).map_err(|e| e.to_string())?;
    ensure(
        r.hypotheses_ok && r.nu_values == [2, 3, 2] && r.lhs == 5 && r.rhs == Some(5) && r.is_tight,
        || format!("GF(5) example: {r:?}"),
    )?;
    Ok(format!(
        "1000/1000 hold ({tight} tight); GF(5) example reproduced (nu = (2,3,2), 5 = 5); {:.2?}",
        started.elapsed()
    ))
}

/// A deliberately separate model of the supported ambients on plain `i64`
/// vectors: free coordinates first, then torsion coordinates.
#[derive(Clone)]
struct Naive {
    spec: String,
    free: usize,
    moduli: Vec<i64>,
    prime: Option<i64>,
}

impl Naive {
    fn add(&self, x: &[i64], y: &[i64]) -> Vec<i64> {
        self.combine(1, x, 1, y)
    }

    fn combine(&self, m: i64, x: &[i64], n: i64, y: &[i64]) -> Vec<i64> {
        (0..x.len())
            .map(|i| {
                let v = m * x[i] + n * y[i];
                if i < self.free {
                    v
                } else {
                    v.rem_euclid(self.moduli[i - self.free])
                }
            })
            .collect()
    }

    fn text(&self, x: &[i64]) -> String {
        let parts: Vec<String> = x.iter().map(ToString::to_string).collect();
        if x.len() == 1 {
            parts[0].clone()
        } else if self.free > 0 && !self.moduli.is_empty() {
            format!(
                "({}; {})",
                parts[..self.free].join(","),
                parts[self.free..].join(",")
            )
        } else {
            format!("({})", parts.join(","))
        }
    }

    fn random(&self, rng: &mut ChaCha8Rng) -> Vec<i64> {
        let mut v: Vec<i64> = (0..self.free).map(|_| rng.gen_range(-3..=3)).collect();
        v.extend(self.moduli.iter().map(|&m| rng.gen_range(0..m)));
        v
    }
}

enum NaiveConstraint {
    None,
    Distinct,
    Difference(Vec<Vec<i64>>),
    Linear(Vec<(i64, i64, Vec<i64>)>),
    Poly(Vec<(u32, u32, i64)>),
}

fn naive_admits(g: &Naive, c: &NaiveConstraint, a: &[i64], b: &[i64]) -> bool {
    match c {
        NaiveConstraint::None => true,
        NaiveConstraint::Distinct => a != b,
        NaiveConstraint::Difference(s) => !s.contains(&g.combine(1, a, -1, b)),
        NaiveConstraint::Linear(cs) => cs.iter().all(|(m, n, d)| &g.combine(*m, a, -*n, b) != d),
        NaiveConstraint::Poly(terms) => {
            let p = g.prime.unwrap();
            let v = terms.iter().fold(0i64, |acc, &(i, j, c)| {
                let mut t = c;
                for _ in 0..i {
                    t = t * a[0] % p;
                }
                for _ in 0..j {
                    t = t * b[0] % p;
                }
                (acc + t) % p
            });
            v != 0
        }
    }
}

fn oracle_cross_check() -> Outcome {
    let started = Instant::now();
    let ambients = [
        Naive { spec: "Z/7".into(), free: 0, moduli: vec![7], prime: None },
        Naive { spec: "Z/12".into(), free: 0, moduli: vec![12], prime: None },
        Naive { spec: "Z".into(), free: 1, moduli: vec![], prime: None },
        Naive { spec: "Z^2".into(), free: 2, moduli: vec![], prime: None },
        Naive { spec: "Z/2 x Z/4".into(), free: 0, moduli: vec![2, 4], prime: None },
        Naive { spec: "Z x Z/3".into(), free: 1, moduli: vec![3], prime: None },
        Naive { spec: "GF(5)".into(), free: 0, moduli: vec![5], prime: Some(5) },
        Naive { spec: "GF(11)".into(), free: 0, moduli: vec![11], prime: Some(11) },
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut pairs_compared = 0;
    for trial in 0..10_000 {
        let g = &ambients[rng.gen_range(0..ambients.len())];
        let set = |rng: &mut ChaCha8Rng| -> Vec<Vec<i64>> {
            let k = rng.gen_range(1..=5);
            let mut s = BTreeSet::new();
            for _ in 0..k {
                s.insert(g.random(rng));
            }
            s.into_iter().collect()
        };
        let a = set(&mut rng);
        let b = set(&mut rng);
        let is_field = g.prime.is_some();
        let kind = rng.gen_range(0..4);
        let constraint = match kind {
            0 => NaiveConstraint::None,
            1 => NaiveConstraint::Distinct,
            2 => NaiveConstraint::Difference(set(&mut rng)),
            _ if is_field => {
                let p = g.prime.unwrap();
                let terms = (0..rng.gen_range(1..=4))
                    .map(|_| (rng.gen_range(0..3), rng.gen_range(0..3), rng.gen_range(1..p)))
                    .collect();
                NaiveConstraint::Poly(terms)
            }
            _ => NaiveConstraint::Linear(
                (0..rng.gen_range(1..=2))
                    .map(|_| (rng.gen_range(0..3), rng.gen_range(0..3), g.random(&mut rng)))
                    .collect(),
            ),
        };

        // Oracle: direct pair enumeration.
        let mut sums: Vec<(Vec<i64>, usize)> = Vec::new();
        let mut restricted: BTreeSet<Vec<i64>> = BTreeSet::new();
        for x in &a {
            for y in &b {
                let s = g.add(x, y);
                match sums.iter_mut().find(|(e, _)| *e == s) {
                    Some((_, n)) => *n += 1,
                    None => sums.push((s.clone(), 1)),
                }
                if naive_admits(g, &constraint, x, y) {
                    restricted.insert(s);
                }
            }
        }

        let list = |v: &[Vec<i64>]| -> String {
            let parts: Vec<String> = v.iter().map(|e| format!("\"{}\"", g.text(e))).collect();
            format!("[{}]", parts.join(","))
        };
        let cjson = match &constraint {
            NaiveConstraint::None => r#"{"type":"none"}"#.to_string(),
            NaiveConstraint::Distinct => r#"{"type":"distinct"}"#.to_string(),
            NaiveConstraint::Difference(s) => format!(r#"{{"type":"difference","payload":{}}}"#, list(s)),
            NaiveConstraint::Linear(cs) => {
                let parts: Vec<String> = cs
                    .iter()
                    .map(|(m, n, d)| format!(r#"{{"m":{m},"n":{n},"d":"{}"}}"#, g.text(d)))
                    .collect();
                format!(r#"{{"type":"linear","payload":[{}]}}"#, parts.join(","))
            }
            NaiveConstraint::Poly(terms) => {
                let parts: Vec<String> = terms.iter().map(|(i, j, c)| format!("{c}*x^{i}*y^{j}")).collect();
                format!(r#"{{"type":"poly","payload":"{}"}}"#, parts.join(" + "))
            }
        };
        let doc = format!(
            r#"{{"ambient":"{}","A":{},"B":{},"constraint":{cjson}}}"#,
            g.spec,
            list(&a),
            list(&b)
        );
        let inst = Instance::from_json(&doc).map_err(|e| format!("trial {trial}: {e} in {doc}"))?;
        let amb = inst.ambient();
        let parse = |v: &Vec<i64>| amb.parse_element(&g.text(v)).unwrap();

        let lib_c: BTreeSet<Element> = restricted_sumset(&inst).unwrap().into_iter().collect();
        let oracle_c: BTreeSet<Element> = restricted.iter().map(parse).collect();
        ensure(lib_c == oracle_c, || format!("trial {trial}: restricted sumset differs on {doc}"))?;
        let lib_sum: BTreeSet<Element> = sumset(amb, inst.a(), inst.b()).unwrap().into_iter().collect();
        let oracle_sum: BTreeSet<Element> = sums.iter().map(|(s, _)| parse(s)).collect();
        ensure(lib_sum == oracle_sum, || format!("trial {trial}: sumset differs on {doc}"))?;
        for (s, n) in &sums {
            let got = nu(amb, inst.a(), inst.b(), &parse(s)).unwrap();
            ensure(got == *n, || format!("trial {trial}: nu({}) = {got}, oracle {n}", g.text(s)))?;
            pairs_compared += 1;
        }
        let oracle_min = sums.iter().map(|(_, n)| *n).min();
        let lib_min = min_nu_over(amb, inst.a(), inst.b(), &lib_sum.iter().cloned().collect::<Vec<_>>()).unwrap();
        ensure(lib_min == oracle_min, || format!("trial {trial}: min nu differs"))?;
    }
    Ok(format!(
        "10000/10000 instances agree ({pairs_compared} nu values compared); {:.2?}",
        started.elapsed()
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    // A skipped suite must not look like a pass: run everything, always.
    let criteria: [Criterion; 9] = [
        ("C1 kemperman_scherk exhaustive, Z/n, n <= 7", kemperman_scherk),
        ("C2 erdos_heilbronn + anr exhaustive, Z/p, p <= 11", erdos_heilbronn_anr),
        ("C3 lev_conjecture exhaustive, Z/n, n <= 12", lev_conjecture),
        ("C4 thm_1_1 over GF(p), p <= 7", poly_restricted),
        ("C5 thm_1_2 over Z/n, n <= 8, and Z box 2 sampled", linear_restricted),
        ("C6 thm_1_3 (i) and (ii)", difference_restricted),
        ("C7 CN engine, 1000 random polynomials over GF(5)", cn_engine),
        ("C8 lines lemma, 1000 random valid instances", lemma_lines),
        ("C9 naive oracle cross-check, 10^4 instances", oracle_cross_check),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
