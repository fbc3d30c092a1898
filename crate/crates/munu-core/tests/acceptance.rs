//! Acceptance suite: one test per claim, each printing a pass/fail line.
//! All checks are exact; the stated time budgets are asserted.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use munu_core::{
    behaviorally_equal, chains, check_intersection_preservation, compose, demo, distance, embed_term,
    epsilon, gset, leq, metric::BasePoint, project, unfold_term, CanonValue, Coalgebra, Distance,
    FiniteFunction, FiniteSet, FunctorExpr, RationalElement, Term,
};

fn conclude(name: &str, failures: Vec<String>, elapsed: Duration, budget: Option<Duration>) {
    let in_budget = budget.is_none_or(|b| elapsed <= b);
    let ok = failures.is_empty() && in_budget;
    println!(
        "[{}] {name} ({:.2?}{})",
        if ok { "PASS" } else { "FAIL" },
        elapsed,
        budget
            .map(|b| format!(" / budget {b:.2?}"))
            .unwrap_or_default()
    );
    if !failures.is_empty() {
        panic!(
            "{name}: {} failure(s):\n{}",
            failures.len(),
            failures.join("\n")
        );
    }
    assert!(in_budget, "{name}: exceeded budget ({elapsed:.2?})");
}

#[test]
fn functor_laws_on_random_triples() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(11);
    let mut failures = Vec::new();
    for case in 0..200 {
        let functor = common::random_functor(&mut rng, 5, 600, false);
        let x = common::random_subset(&mut rng, &common::ATOM_POOL[..5], 1, 5);
        let y = common::random_subset(&mut rng, &common::ATOM_POOL[..5], 1, 5);
        let z = common::random_subset(&mut rng, &common::ATOM_POOL[..5], 1, 5);
        let g = common::random_function(&mut rng, &x, &y);
        let f = common::random_function(&mut rng, &y, &z);

        let id = FiniteFunction::identity(&x);
        let f_id = functor.apply_fun(&id).expect("bounded");
        let id_fx = FiniteFunction::identity(&functor.apply_set(&x).expect("bounded"));
        if f_id != id_fx {
            failures.push(format!("case {case}: F(id) != id for {}", functor.render()));
        }

        let lhs = functor
            .apply_fun(&compose(&f, &g).expect("composable"))
            .expect("bounded");
        let rhs = compose(
            &functor.apply_fun(&f).expect("bounded"),
            &functor.apply_fun(&g).expect("bounded"),
        )
        .expect("composable");
        if lhs != rhs {
            failures.push(format!(
                "case {case}: F(f.g) != F(f).F(g) for {}",
                functor.render()
            ));
        }
    }
    conclude(
        "functor laws: identities and composition on 200 random triples, carriers <= 5",
        failures,
        start.elapsed(),
        Some(Duration::from_secs(5)),
    );
}

#[test]
fn intersection_squares_stay_pullbacks() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(23);
    let mut failures = Vec::new();
    for fi in 0..10 {
        let functor = common::random_functor(&mut rng, 5, 250, false);
        for case in 0..100 {
            let codomain = common::random_subset(&mut rng, &common::ATOM_POOL[..5], 2, 5);
            // Force a common image point, then fill up the two images.
            let size1 = rng.random_range(1..=codomain.len());
            let size2 = rng.random_range(1..=codomain.len());
            let b1 = common::random_injection(&mut rng, "u", size1, &codomain);
            let mut b2;
            loop {
                b2 = common::random_injection(&mut rng, "v", size2, &codomain);
                let disjoint = b2
                    .mapping()
                    .values()
                    .all(|t| !b1.mapping().values().any(|s| s == t));
                if !disjoint {
                    break;
                }
            }
            match check_intersection_preservation(&functor, &b1, &b2, 1_000_000) {
                Ok(report) => {
                    if !report.passed() {
                        failures.push(format!(
                            "functor {fi} case {case}: {} on {}",
                            report
                                .checks
                                .iter()
                                .filter(|c| !c.passed)
                                .map(|c| c.name.clone())
                                .collect::<Vec<_>>()
                                .join(", "),
                            functor.render()
                        ));
                    }
                }
                Err(e) => failures.push(format!("functor {fi} case {case}: error {e}")),
            }
        }
    }
    conclude(
        "intersection preservation: 100 random injective squares x 10 random functors",
        failures,
        start.elapsed(),
        Some(Duration::from_secs(30)),
    );
}

#[test]
fn chain_sizes_match_hand_computation() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let pf = FunctorExpr::parse("Pf(Id)").unwrap();
    let term_sizes = chains::terminal_chain_default(&pf, 3).unwrap().stage_sizes();
    if term_sizes != vec![1, 2, 4, 16] {
        failures.push(format!("Pf terminal sizes {term_sizes:?}"));
    }
    let init_sizes = chains::initial_chain_default(&pf, 3).unwrap().stage_sizes();
    if init_sizes != vec![0, 1, 2, 4] {
        failures.push(format!("Pf initial sizes {init_sizes:?}"));
    }
    let stream = FunctorExpr::parse("C{s} * Id + C{stop}").unwrap();
    let stream_sizes = chains::terminal_chain_default(&stream, 3).unwrap().stage_sizes();
    if stream_sizes != vec![1, 2, 3, 4] {
        failures.push(format!("one-letter stream terminal sizes {stream_sizes:?}"));
    }
    conclude(
        "chain sizes: Pf terminal 1,2,4,16; Pf initial 0,1,2,4; one-letter stream 1,2,3,4",
        failures,
        start.elapsed(),
        Some(Duration::from_secs(5)),
    );
}

/// Literal depth-k projections of every state, computed by unfolding only.
fn projection_tables(coalgebra: &Coalgebra, depth: usize) -> Vec<BTreeMap<String, CanonValue>> {
    let states: Vec<String> = coalgebra.states().iter().map(str::to_string).collect();
    let mut tables = vec![states
        .iter()
        .map(|s| (s.clone(), CanonValue::point()))
        .collect::<BTreeMap<_, _>>()];
    for k in 0..depth {
        let prev = tables[k].clone();
        let next: BTreeMap<String, CanonValue> = states
            .iter()
            .map(|s| {
                let unfolded = coalgebra
                    .structure(s)
                    .expect("state exists")
                    .substitute(&|y| prev[y].clone());
                (s.clone(), unfolded)
            })
            .collect();
        tables.push(next);
    }
    tables
}

#[test]
fn bisimilarity_agrees_with_projection_oracle() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(37);
    let mut failures = Vec::new();
    for case in 0..100 {
        let states = common::state_set(rng.random_range(1..=8));
        let functor = common::random_functor(&mut rng, states.len(), 2000, false);
        let Some(coalgebra) = common::random_coalgebra(&mut rng, &functor, &states, 2, 2000)
        else {
            continue;
        };
        // Brute-force oracle: materialize every projection up to the total
        // state count of the compared pair.
        let bound = 2 * coalgebra.states().len();
        let tables = projection_tables(&coalgebra, bound);
        let state_names: Vec<String> = coalgebra.states().iter().map(str::to_string).collect();
        for a in &state_names {
            for b in &state_names {
                let oracle = (0..=bound).all(|k| tables[k][a] == tables[k][b]);
                let x = RationalElement::new(coalgebra.clone(), a).unwrap();
                let y = RationalElement::new(coalgebra.clone(), b).unwrap();
                let engine = behaviorally_equal(&x, &y).unwrap();
                if oracle != engine {
                    failures.push(format!(
                        "case {case}: {a} vs {b}: engine {engine}, oracle {oracle} on {}",
                        functor.render()
                    ));
                }
            }
        }
    }
    conclude(
        "bisimilarity equals brute-force depth-k projection comparison on 100 random coalgebras",
        failures,
        start.elapsed(),
        Some(Duration::from_secs(30)),
    );
}

#[test]
fn ultrametric_axioms_hold_on_random_triples() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(41);
    let mut failures = Vec::new();
    for case in 0..500 {
        let (_, coalgebra) = common::random_system(&mut rng, 5, 3, false);
        let x = common::random_state(&mut rng, &coalgebra);
        let y = common::random_state(&mut rng, &coalgebra);
        let z = common::random_state(&mut rng, &coalgebra);
        let dxy = distance(&x, &y).unwrap();
        let dyx = distance(&y, &x).unwrap();
        let dyz = distance(&y, &z).unwrap();
        let dxz = distance(&x, &z).unwrap();
        if dxy != dyx {
            failures.push(format!("case {case}: symmetry fails"));
        }
        let equal = behaviorally_equal(&x, &y).unwrap();
        if (dxy == Distance::Zero) != equal {
            failures.push(format!("case {case}: indiscernibility fails"));
        }
        if dxz > std::cmp::max(dxy, dyz) {
            failures.push(format!(
                "case {case}: strong triangle fails: d(x,z)={dxz:?} d(x,y)={dxy:?} d(y,z)={dyz:?}"
            ));
        }
    }
    conclude(
        "ultrametric axioms on 500 random triples",
        failures,
        start.elapsed(),
        None,
    );
}

#[test]
fn epsilon_laws_hold_exactly() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(43);
    let mut failures = Vec::new();
    for case in 0..200 {
        let (functor, coalgebra) = common::random_system(&mut rng, 4, 3, true);
        let base = BasePoint::default_for(&functor).unwrap();
        let x = common::random_state(&mut rng, &coalgebra);
        let n = rng.random_range(0..=8usize);

        // Section law: re-embedding a depth-n stage value hits the same value.
        let u = project(&x, n);
        let section = u.substitute(&|_| base.value().clone());
        let section_term = Term::new(&functor, section).unwrap();
        let re_projected = project(&embed_term(&functor, &section_term).unwrap(), n);
        if re_projected != u {
            failures.push(format!("case {case}: v.e law fails at n={n} on {}", functor.render()));
        }

        // Projection law: eps_n does not change the depth-n projection.
        let eps_n = epsilon(&x, n, &base).unwrap();
        let eps_n_elem = embed_term(&functor, &eps_n).unwrap();
        if project(&eps_n_elem, n) != project(&x, n) {
            failures.push(format!("case {case}: v.eps law fails at n={n}"));
        }

        // Idempotence law: eps_n of eps_{n+1} is eps_n, as canonical terms.
        let eps_next = embed_term(&functor, &epsilon(&x, n + 1, &base).unwrap()).unwrap();
        let collapsed = epsilon(&eps_next, n, &base).unwrap();
        if collapsed != eps_n {
            failures.push(format!("case {case}: eps.eps law fails at n={n}"));
        }
    }
    conclude(
        "approximation laws (section, projection, idempotence) on 200 random elements, n <= 8",
        failures,
        start.elapsed(),
        None,
    );
}

#[test]
fn approximants_are_dense_and_increasing() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(47);
    let mut failures = Vec::new();
    for case in 0..200 {
        let (functor, coalgebra) = common::random_system(&mut rng, 4, 3, true);
        let base = BasePoint::default_for(&functor).unwrap();
        let x = common::random_state(&mut rng, &coalgebra);
        let n = rng.random_range(0..8usize);

        let eps_n = embed_term(&functor, &epsilon(&x, n, &base).unwrap()).unwrap();
        let eps_next = embed_term(&functor, &epsilon(&x, n + 1, &base).unwrap()).unwrap();
        if !distance(&x, &eps_n).unwrap().below(n as u32) {
            failures.push(format!("case {case}: d(x, eps_{n}(x)) not below 2^-{n}"));
        }
        if !leq(&eps_n, &eps_next, &base).unwrap() {
            failures.push(format!("case {case}: eps_{n} not below eps_{}", n + 1));
        }
        if !leq(&eps_next, &x, &base).unwrap() {
            failures.push(format!("case {case}: eps_{} not below x", n + 1));
        }
    }
    conclude(
        "density: d(x, eps_n(x)) < 2^-n and eps_n(x) below eps_n+1(x) below x on 200 random elements",
        failures,
        start.elapsed(),
        None,
    );
}

#[test]
fn term_embedding_satisfies_the_homomorphism_square() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(53);
    let mut failures = Vec::new();
    let mut checked = 0;
    while checked < 100 {
        let functor = common::random_functor(&mut rng, 3, 600, true);
        let Ok(chain) = chains::initial_chain_default(&functor, 3) else {
            continue;
        };
        let stage = &chain.stages[rng.random_range(1..=3)];
        if stage.is_empty() {
            continue;
        }
        let labels: Vec<&str> = stage.iter().collect();
        let label = labels[rng.random_range(0..labels.len())];
        let term = Term::parse(&functor, label).expect("stage labels parse");
        let embedded = embed_term(&functor, &term).unwrap();
        let (template, bindings) = unfold_term(&functor, &term).unwrap();

        for n in 0..=term.depth() + 2 {
            // One side: unfold the embedded element n+1 steps.
            let lhs = project(&embedded, n + 1);
            // Other side: embed each immediate subterm and unfold n steps.
            let rhs = template.substitute(&|label: &str| {
                let sub = &bindings[label];
                project(&embed_term(&functor, sub).expect("valid subterm"), n)
            });
            if lhs != rhs {
                failures.push(format!(
                    "term {} at depth {n}: square fails on {}",
                    term.render(),
                    functor.render()
                ));
            }
        }
        checked += 1;
    }
    conclude(
        "embedding square: one-step unfolding commutes with projections for 100 random terms",
        failures,
        start.elapsed(),
        None,
    );
}

#[test]
fn prefix_order_model_is_exact() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let report = demo::demo_prefix_order(&FiniteSet::new(["a", "b"]), 0).unwrap();
    if !report.passed() {
        failures.push(format!("{report:?}"));
    }
    let pair_detail = report
        .checks
        .iter()
        .find(|c| c.name.starts_with("order agrees"))
        .map(|c| c.detail.clone())
        .unwrap_or_default();
    let pair_count: usize = pair_detail
        .split_whitespace()
        .next()
        .and_then(|w| w.parse().ok())
        .unwrap_or(0);
    if pair_count < 50 {
        failures.push(format!("only {pair_count} pairs checked"));
    }

    // Spot checks against the word model.
    let functor = FunctorExpr::parse("C{a,b} * Id + C{stop}").unwrap();
    let base = BasePoint::default_for(&functor).unwrap();
    let ab_cycle = RationalElement::new(
        Coalgebra::parse(
            "functor: C{a,b} * Id + C{stop}\nstates: {x, y}\nx -> (a, y)\ny -> (b, x)\n",
        )
        .unwrap(),
        "x",
    )
    .unwrap();
    let ab = embed_term(&functor, &Term::parse(&functor, "(a,(b,stop))").unwrap()).unwrap();
    let ba = embed_term(&functor, &Term::parse(&functor, "(b,(a,stop))").unwrap()).unwrap();
    if !leq(&ab, &ab_cycle, &base).unwrap() {
        failures.push("\"ab\" should be below (ab)^w".into());
    }
    if leq(&ba, &ab_cycle, &base).unwrap() {
        failures.push("\"ba\" should not be below (ab)^w".into());
    }
    let aaa = RationalElement::new(
        Coalgebra::parse("functor: C{a,b} * Id + C{stop}\nstates: {x}\nx -> (a, x)\n").unwrap(),
        "x",
    )
    .unwrap();
    let aab = RationalElement::new(
        Coalgebra::parse(
            "functor: C{a,b} * Id + C{stop}\nstates: {x, y, z}\nx -> (a, y)\ny -> (a, z)\nz -> (b, x)\n",
        )
        .unwrap(),
        "x",
    )
    .unwrap();
    if distance(&aaa, &aab).unwrap() != Distance::Finite(3) {
        failures.push("d(aaa..., aab...) should be 2^-3".into());
    }
    conclude(
        "prefix-order model: order is prefix, distance is common-prefix length + 1, >= 50 pairs",
        failures,
        start.elapsed(),
        None,
    );
}

#[test]
fn powerset_counterexample_shadow() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let report = demo::demo_pf_countable(5).unwrap();
    if !report.passed() {
        failures.push(format!("{report:?}"));
    }
    if !report
        .checks
        .iter()
        .any(|c| c.name.starts_with("64 roots") && c.passed)
    {
        failures.push("expected 64 pairwise distinct roots".into());
    }
    conclude(
        "finite power-set counterexample shadow: 64 pairwise distinct behaviors",
        failures,
        start.elapsed(),
        Some(Duration::from_secs(10)),
    );
}

fn disjoint_union_actions(group: &gset::FiniteGroup, parts: &[&gset::GAction]) -> gset::GAction {
    let mut action = BTreeMap::new();
    let mut carrier = Vec::new();
    for (k, part) in parts.iter().enumerate() {
        for x in part.carrier().iter() {
            carrier.push(format!("{k}.{x}"));
            for g in group.elements().iter() {
                action.insert(
                    (g.to_string(), format!("{k}.{x}")),
                    format!("{k}.{}", part.apply(g, x)),
                );
            }
        }
    }
    gset::GAction::new(group.clone(), FiniteSet::new(carrier), action).expect("union of actions")
}

#[test]
fn symmetric_group_width_bookkeeping() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(59);
    let mut failures = Vec::new();
    let s3 = gset::FiniteGroup::symmetric(3).unwrap();
    let connected = gset::connected_objects(&s3).unwrap();
    if connected.objects.len() != 6 {
        failures.push(format!("{} equivariant equivalences, expected 6", connected.objects.len()));
    }
    if connected.classes.len() != 4 {
        failures.push(format!("{} isomorphism classes, expected 4", connected.classes.len()));
    }

    // Random sample actions: disjoint unions of small quotients.
    let small: Vec<&gset::GAction> = connected
        .objects
        .iter()
        .filter(|o| o.action.carrier().len() <= 3)
        .map(|o| &o.action)
        .collect();
    for case in 0..20 {
        let count = rng.random_range(1..=2);
        let parts: Vec<&gset::GAction> = (0..count)
            .map(|_| small[rng.random_range(0..small.len())])
            .collect();
        let sample = disjoint_union_actions(&s3, &parts);
        for obj in &connected.objects {
            let fast = gset::hom_count(obj, &sample);
            let brute = gset::hom_count_brute(&obj.action, &sample);
            if fast != brute {
                failures.push(format!(
                    "case {case}: hom_count {fast} != brute {brute} for subgroup {{{}}}",
                    obj.subgroup.join(",")
                ));
            }
        }
    }

    let samples: Vec<gset::GAction> = (0..3)
        .map(|_| {
            let parts: Vec<&gset::GAction> =
                (0..2).map(|_| small[rng.random_range(0..small.len())]).collect();
            disjoint_union_actions(&s3, &parts)
        })
        .collect();
    let width = gset::width_report(&s3, &samples).unwrap();
    if !width.report.passed() {
        failures.push(format!("width report failed: {:?}", width.report));
    }
    if width.connected_class_count as u128 > width.class_bound {
        failures.push("class count exceeds 2^|G|".into());
    }
    conclude(
        "S3: 6 equivariant equivalences in 4 classes; hom counts match brute force; width bound",
        failures,
        start.elapsed(),
        Some(Duration::from_secs(30)),
    );
}
