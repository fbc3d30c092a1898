//! Seeded random generators shared by the integration suites.

use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::Rng;

use munu_core::{Coalgebra, FiniteFunction, FiniteSet, FunctorExpr, RationalElement};

pub const ATOM_POOL: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];

pub fn random_subset(rng: &mut StdRng, pool: &[&str], min: usize, max: usize) -> FiniteSet {
    let size = rng.random_range(min..=max.min(pool.len()));
    let mut picked: Vec<&str> = Vec::new();
    while picked.len() < size {
        let candidate = pool[rng.random_range(0..pool.len())];
        if !picked.contains(&candidate) {
            picked.push(candidate);
        }
    }
    FiniteSet::new(picked)
}

fn random_functor_raw(rng: &mut StdRng, budget: usize) -> FunctorExpr {
    if budget == 0 {
        return if rng.random_bool(0.5) {
            FunctorExpr::Id
        } else {
            FunctorExpr::Const(random_subset(rng, &ATOM_POOL[..4], 1, 2))
        };
    }
    match rng.random_range(0..12) {
        0 | 1 => FunctorExpr::Id,
        2 | 3 => FunctorExpr::Const(random_subset(rng, &ATOM_POOL[..4], 1, 2)),
        4 => {
            let names = ["op", "mk", "nil", "cons"];
            let count = rng.random_range(1..=2);
            let ops: Vec<(&str, usize)> = (0..count)
                .map(|i| (names[i], rng.random_range(0..=2)))
                .collect();
            FunctorExpr::sig(&ops).expect("distinct names")
        }
        5 | 6 => FunctorExpr::product(
            random_functor_raw(rng, budget - 1),
            random_functor_raw(rng, budget - 1),
        ),
        7..=9 => FunctorExpr::coproduct(
            random_functor_raw(rng, budget - 1),
            random_functor_raw(rng, budget - 1),
        ),
        10 => FunctorExpr::pfin(random_functor_raw(rng, budget - 1)),
        _ => FunctorExpr::compose(
            random_functor_raw(rng, budget - 1),
            random_functor_raw(rng, budget - 1),
        ),
    }
}

/// A random grammar functor whose value sets stay within `max_size` on
/// carriers of `carrier_size`; optionally requires a nonempty `F(∅)`.
pub fn random_functor(
    rng: &mut StdRng,
    carrier_size: usize,
    max_size: u64,
    require_base: bool,
) -> FunctorExpr {
    loop {
        let functor = random_functor_raw(rng, 3);
        if functor.size_on(carrier_size as u128, max_size).is_err() {
            continue;
        }
        if require_base {
            match functor.size_on(0, max_size) {
                Ok(n) if n > 0 => {}
                _ => continue,
            }
        }
        return functor;
    }
}

pub fn random_function(rng: &mut StdRng, domain: &FiniteSet, codomain: &FiniteSet) -> FiniteFunction {
    let targets: Vec<&str> = codomain.iter().collect();
    let mapping: BTreeMap<String, String> = domain
        .iter()
        .map(|x| {
            (
                x.to_string(),
                targets[rng.random_range(0..targets.len())].to_string(),
            )
        })
        .collect();
    FiniteFunction::new(domain.clone(), codomain.clone(), mapping).expect("total by construction")
}

/// A random injection from `size` fresh atoms into `codomain`.
pub fn random_injection(
    rng: &mut StdRng,
    prefix: &str,
    size: usize,
    codomain: &FiniteSet,
) -> FiniteFunction {
    let mut targets: Vec<&str> = codomain.iter().collect();
    // Partial shuffle.
    for i in 0..size {
        let j = rng.random_range(i..targets.len());
        targets.swap(i, j);
    }
    let domain = FiniteSet::new((0..size).map(|i| format!("{prefix}{i}")));
    let mapping = (0..size)
        .map(|i| (format!("{prefix}{i}"), targets[i].to_string()))
        .collect();
    FiniteFunction::new(domain, codomain.clone(), mapping).expect("injective by construction")
}

/// A random coalgebra with the given states. Candidate structure values are
/// limited to at most `max_slots` slot occurrences so that deep unfoldings
/// stay materializable. Returns `None` when the functor admits no such
/// values over the states.
pub fn random_coalgebra(
    rng: &mut StdRng,
    functor: &FunctorExpr,
    states: &FiniteSet,
    max_slots: usize,
    enum_bound: u64,
) -> Option<Coalgebra> {
    let values = functor.enumerate_bounded(states, enum_bound).ok()?;
    let candidates: Vec<_> = values
        .into_iter()
        .filter(|v| functor.slot_values(v).map(|s| s.len() <= max_slots).unwrap_or(false))
        .collect();
    if candidates.is_empty() {
        return None;
    }
    let structure: BTreeMap<String, munu_core::CanonValue> = states
        .iter()
        .map(|s| {
            (
                s.to_string(),
                candidates[rng.random_range(0..candidates.len())].clone(),
            )
        })
        .collect();
    Some(Coalgebra::new(functor.clone(), states.clone(), structure).expect("valid by construction"))
}

pub fn state_set(count: usize) -> FiniteSet {
    FiniteSet::new((0..count).map(|i| format!("s{i}")))
}

/// A random functor together with a random coalgebra for it.
pub fn random_system(
    rng: &mut StdRng,
    max_states: usize,
    max_slots: usize,
    require_base: bool,
) -> (FunctorExpr, Coalgebra) {
    loop {
        let states = state_set(rng.random_range(1..=max_states));
        let functor = random_functor(rng, states.len(), 4000, require_base);
        if let Some(coalgebra) = random_coalgebra(rng, &functor, &states, max_slots, 4000) {
            return (functor, coalgebra);
        }
    }
}

pub fn random_state(rng: &mut StdRng, coalgebra: &Coalgebra) -> RationalElement {
    let states: Vec<&str> = coalgebra.states().iter().collect();
    let state = states[rng.random_range(0..states.len())];
    RationalElement::new(coalgebra.clone(), state).expect("state exists")
}
