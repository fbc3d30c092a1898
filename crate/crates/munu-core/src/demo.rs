//! Reproducible demos: worked examples and counterexample shadows, each
//! returning a machine-readable report that is byte-stable for fixed
//! parameters.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::algebra::{embed_term, Term};
use crate::chains;
use crate::coalgebra::{behaviorally_equal, Coalgebra, RationalElement};
use crate::error::{Error, Result};
use crate::finset::FiniteSet;
use crate::functor::FunctorExpr;
use crate::metric::{distance, epsilon, leq, BasePoint, Distance};
use crate::report::Check;
use crate::util::SplitMix64;
use crate::value::CanonValue;

/// Default cap on `max_element` for the finite power-set counterexample.
pub const PF_COUNTABLE_BOUND: u64 = 6;

#[derive(Debug, Clone, Serialize)]
pub struct DemoReport {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub lines: Vec<String>,
    pub checks: Vec<Check>,
}

impl DemoReport {
    fn new(name: &str) -> Self {
        DemoReport {
            name: name.to_string(),
            params: BTreeMap::new(),
            lines: Vec::new(),
            checks: Vec::new(),
        }
    }

    fn param(&mut self, key: &str, value: impl ToString) {
        self.params.insert(key.to_string(), value.to_string());
    }

    fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Finite shadow of the counterexample showing that the finite power-set
/// functor on countable sets has no terminal coalgebra: subsets `A` of
/// `{0..max_element}` are encoded as finitely branching graphs, truncated
/// with a self-loop tail, and distinct subsets yield behaviorally distinct
/// roots.
pub fn demo_pf_countable(max_element: usize) -> Result<DemoReport> {
    if max_element as u64 > PF_COUNTABLE_BOUND {
        return Err(Error::BoundExceeded {
            value: max_element as u64,
            bound: PF_COUNTABLE_BOUND,
        });
    }
    let mut report = DemoReport::new("pf-countable");
    report.param("max-element", max_element);
    let functor = FunctorExpr::parse("Pf(Id)").expect("grammar literal");

    let subset_count = 1usize << (max_element + 1);
    let graphs: Vec<RationalElement> = (0..subset_count)
        .map(|mask| path_graph_with_leaves(&functor, max_element, mask))
        .collect::<Result<_>>()?;
    report.line(format!(
        "{subset_count} subsets of {{0..{max_element}}} encoded as path graphs with marked leaves"
    ));

    let mut all_distinct = true;
    let mut deepest_separation: Option<u32> = None;
    for i in 0..graphs.len() {
        for j in (i + 1)..graphs.len() {
            match distance(&graphs[i], &graphs[j])?.exponent() {
                Some(e) => {
                    deepest_separation = Some(deepest_separation.map_or(e, |m: u32| m.max(e)));
                }
                None => {
                    all_distinct = false;
                    report.line(format!("collision: subsets {i:#b} and {j:#b}"));
                }
            }
        }
    }
    report.check(
        format!("{subset_count} roots pairwise behaviorally distinct"),
        all_distinct,
        deepest_separation
            .map(|e| format!("deepest required separation depth {e}"))
            .unwrap_or_default(),
    );
    let sanity = behaviorally_equal(&graphs[0], &graphs[0])?;
    report.check("identical subsets stay behaviorally equal", sanity, "");
    Ok(report)
}

fn path_graph_with_leaves(
    functor: &FunctorExpr,
    max_element: usize,
    mask: usize,
) -> Result<RationalElement> {
    let tail = max_element + 1;
    let mut states: Vec<String> = (0..=tail).map(|i| format!("n{i}")).collect();
    let mut structure: BTreeMap<String, CanonValue> = BTreeMap::new();
    for i in 0..=max_element {
        let mut successors = vec![CanonValue::Var(format!("n{}", i + 1))];
        if mask & (1 << i) != 0 {
            let leaf = format!("leaf{i}");
            successors.push(CanonValue::Var(leaf.clone()));
            structure.insert(leaf.clone(), CanonValue::SetOf(vec![]));
            states.push(leaf);
        }
        structure.insert(format!("n{i}"), CanonValue::SetOf(successors).canonicalize());
    }
    // The self-loop tail stands in for the infinite path.
    structure.insert(
        format!("n{tail}"),
        CanonValue::SetOf(vec![CanonValue::Var(format!("n{tail}"))]),
    );
    let coalgebra = Coalgebra::new(functor.clone(), FiniteSet::new(states), structure)?;
    RationalElement::new(coalgebra, "n0")
}

/// Finite shadow of the injectivity argument for `FX = ℵ_ω × X`: with a
/// finite alphabet in place of the cardinal, distinct letter functions on a
/// prefix give behaviorally distinct stream states.
pub fn demo_aleph_stream(alphabet_size: usize, prefix_len: usize) -> Result<DemoReport> {
    if alphabet_size < 2 {
        return Err(Error::BoundExceeded {
            value: alphabet_size as u64,
            bound: 2,
        });
    }
    if alphabet_size > 26 || prefix_len == 0 || alphabet_size.pow(prefix_len as u32) > 4096 {
        return Err(Error::BoundExceeded {
            value: alphabet_size.pow(prefix_len as u32) as u64,
            bound: 4096,
        });
    }
    let mut report = DemoReport::new("aleph-stream");
    report.param("alphabet-size", alphabet_size);
    report.param("prefix-len", prefix_len);

    let letters: Vec<String> = (0..alphabet_size)
        .map(|i| ((b'a' + i as u8) as char).to_string())
        .collect();
    let functor = FunctorExpr::product(
        FunctorExpr::Const(FiniteSet::new(letters.clone())),
        FunctorExpr::Id,
    );

    // All functions prefix -> alphabet, extended periodically.
    let total = alphabet_size.pow(prefix_len as u32);
    let mut streams = Vec::with_capacity(total);
    let mut words: Vec<Vec<usize>> = Vec::with_capacity(total);
    for code in 0..total {
        let mut digits = Vec::with_capacity(prefix_len);
        let mut c = code;
        for _ in 0..prefix_len {
            digits.push(c % alphabet_size);
            c /= alphabet_size;
        }
        let mut structure = BTreeMap::new();
        for (i, d) in digits.iter().enumerate() {
            structure.insert(
                format!("p{i}"),
                CanonValue::Pair(
                    Box::new(CanonValue::ConstAtom(letters[*d].clone())),
                    Box::new(CanonValue::Var(format!("p{}", (i + 1) % prefix_len))),
                ),
            );
        }
        let states = FiniteSet::new((0..prefix_len).map(|i| format!("p{i}")));
        let coalgebra = Coalgebra::new(functor.clone(), states, structure)?;
        streams.push(RationalElement::new(coalgebra, "p0")?);
        words.push(digits);
    }
    report.line(format!(
        "{total} periodic streams from functions {{0..{}}} -> {{{}}}",
        prefix_len - 1,
        letters.join(",")
    ));

    let mut all_ok = true;
    for i in 0..total {
        for j in (i + 1)..total {
            let first_diff = words[i]
                .iter()
                .zip(&words[j])
                .position(|(a, b)| a != b)
                .expect("distinct codes differ on the prefix");
            let expected = Distance::Finite(first_diff as u32 + 1);
            let got = distance(&streams[i], &streams[j])?;
            if got != expected {
                all_ok = false;
                report.line(format!(
                    "mismatch for codes {i},{j}: distance {} expected {}",
                    got.render(),
                    expected.render()
                ));
            }
        }
    }
    report.check(
        "distinct prefix functions give distinct behaviors at the first difference",
        all_ok,
        format!("{} pairs", total * (total - 1) / 2),
    );
    let same = behaviorally_equal(&streams[0], &streams[0])?;
    report.check("equal functions give equal behaviors", same, "");
    Ok(report)
}

/// Finite extensional trees: initial-chain stages of the finite power-set
/// functor, and the ε-approximants of the non-well-founded self-singleton.
pub fn demo_trees() -> Result<DemoReport> {
    let mut report = DemoReport::new("trees");
    let functor = FunctorExpr::parse("Pf(Id)").expect("grammar literal");
    let chain = chains::initial_chain_default(&functor, 3)?;
    let sizes = chain.stage_sizes();
    for (k, stage) in chain.stages.iter().enumerate() {
        report.line(format!(
            "stage {k}: {} term(s): {}",
            stage.len(),
            stage.labels().join("  ")
        ));
    }
    report.check(
        "initial chain sizes are 0, 1, 2, 4",
        sizes == vec![0, 1, 2, 4],
        format!("{sizes:?}"),
    );

    let base = BasePoint::default_for(&functor)?;
    report.line(format!("base point p = {}", base.value().render()));
    let omega = RationalElement::new(
        Coalgebra::parse("functor: Pf(Id)\nstates: {x}\nx -> {x}\n")?,
        "x",
    )?;
    let mut eps_ok = true;
    let mut dist_ok = true;
    for n in 0..=4 {
        let approx = epsilon(&omega, n, &base)?;
        let embedded = embed_term(&functor, &approx)?;
        let d = distance(&omega, &embedded)?;
        let below = leq(&embedded, &omega, &base)?;
        report.line(format!(
            "eps_{n}(x -> {{x}}) = {}   d = {}   below x: {below}",
            approx.render(),
            d.render()
        ));
        eps_ok &= below;
        dist_ok &= d.below(n as u32);
        if n == 1 {
            report.check(
                "eps_1 of the self-singleton is {{}}",
                approx.render() == "{{}}",
                approx.render(),
            );
        }
    }
    report.check("eps_n(x) below x for n = 0..4", eps_ok, "");
    report.check("d(x, eps_n(x)) < 2^-n for n = 0..4", dist_ok, "");
    Ok(report)
}

/// An eventually periodic sequence over a finite alphabet; an empty cycle
/// means a finite word. The oracle side of the prefix-order demo.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Sequence {
    head: Vec<String>,
    cycle: Vec<String>,
}

impl Sequence {
    fn letter_at(&self, i: usize) -> Option<&str> {
        if i < self.head.len() {
            Some(&self.head[i])
        } else if self.cycle.is_empty() {
            None
        } else {
            Some(&self.cycle[(i - self.head.len()) % self.cycle.len()])
        }
    }

    fn describe(&self) -> String {
        if self.cycle.is_empty() {
            format!("\"{}\"", self.head.join(""))
        } else {
            format!("\"{}({})^w\"", self.head.join(""), self.cycle.join(""))
        }
    }

    /// Positions to inspect when comparing with another sequence.
    fn horizon(&self, other: &Sequence) -> usize {
        self.head.len()
            + other.head.len()
            + self.cycle.len().max(1) * other.cycle.len().max(1)
            + 2
    }

    fn first_difference(&self, other: &Sequence) -> Option<usize> {
        (0..self.horizon(other)).find(|&i| self.letter_at(i) != other.letter_at(i))
    }

    fn equal_sequence(&self, other: &Sequence) -> bool {
        self.first_difference(other).is_none()
    }

    /// Prefix order on `Σ* + Σ^ω`: equal, or a finite word that the other
    /// sequence properly extends.
    fn is_prefix_of(&self, other: &Sequence) -> bool {
        if self.equal_sequence(other) {
            return true;
        }
        self.cycle.is_empty()
            && (0..self.head.len()).all(|i| self.letter_at(i) == other.letter_at(i))
            && other.letter_at(self.head.len()).is_some()
    }

    fn to_element(&self, functor: &FunctorExpr, stop: &str) -> Result<RationalElement> {
        if self.cycle.is_empty() {
            let mut value = CanonValue::InR(Box::new(CanonValue::ConstAtom(stop.to_string())));
            for letter in self.head.iter().rev() {
                value = CanonValue::InL(Box::new(CanonValue::Pair(
                    Box::new(CanonValue::ConstAtom(letter.clone())),
                    Box::new(value),
                )));
            }
            return embed_term(functor, &Term::new(functor, value)?);
        }
        let n = self.head.len() + self.cycle.len();
        let mut structure = BTreeMap::new();
        for i in 0..n {
            let letter = self.letter_at(i).expect("infinite sequence").to_string();
            let next = if i + 1 < n { i + 1 } else { self.head.len() };
            structure.insert(
                format!("s{i}"),
                CanonValue::InL(Box::new(CanonValue::Pair(
                    Box::new(CanonValue::ConstAtom(letter)),
                    Box::new(CanonValue::Var(format!("s{next}"))),
                ))),
            );
        }
        let states = FiniteSet::new((0..n).map(|i| format!("s{i}")));
        let coalgebra = Coalgebra::new(functor.clone(), states, structure)?;
        RationalElement::new(coalgebra, "s0")
    }
}

/// Words and eventually periodic streams over an alphabet, with the prefix
/// relation and longest-common-prefix distance as the oracle for the
/// canonical order and ultrametric.
pub fn demo_prefix_order(alphabet: &FiniteSet, seed: u64) -> Result<DemoReport> {
    if alphabet.is_empty() {
        return Err(Error::BoundExceeded { value: 0, bound: 1 });
    }
    let mut report = DemoReport::new("prefix-order");
    report.param("alphabet", alphabet.to_string());
    report.param("seed", seed);

    let stop = "stop";
    let functor = FunctorExpr::coproduct(
        FunctorExpr::product(
            FunctorExpr::Const(alphabet.clone()),
            FunctorExpr::Id,
        ),
        FunctorExpr::Const(FiniteSet::singleton(stop)),
    );
    let base = BasePoint::default_for(&functor)?;
    report.line(format!("functor {} with p = {}", functor.render(), base.value().render()));

    let letters: Vec<String> = alphabet.iter().map(str::to_string).collect();
    let mut corpus: Vec<Sequence> = Vec::new();
    // All words of length <= 2.
    let mut layer: Vec<Vec<String>> = vec![vec![]];
    for _ in 0..=2 {
        let mut next_layer = Vec::new();
        for w in &layer {
            for l in &letters {
                let mut w2 = w.clone();
                w2.push(l.clone());
                next_layer.push(w2);
            }
        }
        corpus.extend(layer.iter().map(|w| Sequence {
            head: w.clone(),
            cycle: vec![],
        }));
        layer = next_layer;
    }
    // Streams: every cycle of length 1 or 2, bare and with a seeded head.
    let mut rng = SplitMix64::new(seed);
    let mut cycles: Vec<Vec<String>> = letters.iter().map(|l| vec![l.clone()]).collect();
    for a in &letters {
        for b in &letters {
            cycles.push(vec![a.clone(), b.clone()]);
        }
    }
    for cycle in cycles {
        corpus.push(Sequence {
            head: vec![],
            cycle: cycle.clone(),
        });
        let head: Vec<String> = (0..1 + rng.below(2))
            .map(|_| letters[rng.below(letters.len())].clone())
            .collect();
        corpus.push(Sequence { head, cycle });
    }
    // Cap the corpus deterministically, keeping at least 50 pairs.
    while corpus.len() > 16 {
        corpus.remove(rng.below(corpus.len()));
    }
    let elements: Vec<RationalElement> = corpus
        .iter()
        .map(|s| s.to_element(&functor, stop))
        .collect::<Result<_>>()?;
    report.line(format!(
        "corpus: {}",
        corpus.iter().map(Sequence::describe).collect::<Vec<_>>().join(" ")
    ));

    let mut pairs = 0;
    let mut order_ok = true;
    let mut metric_ok = true;
    for i in 0..corpus.len() {
        for j in 0..corpus.len() {
            if i == j {
                continue;
            }
            pairs += 1;
            let expected_order = corpus[i].is_prefix_of(&corpus[j]);
            let got_order = leq(&elements[i], &elements[j], &base)?;
            if got_order != expected_order {
                order_ok = false;
                report.line(format!(
                    "order mismatch: {} vs {}: leq = {got_order}, prefix = {expected_order}",
                    corpus[i].describe(),
                    corpus[j].describe()
                ));
            }
            if i < j {
                let expected_distance = match corpus[i].first_difference(&corpus[j]) {
                    None => Distance::Zero,
                    Some(k) => Distance::Finite(k as u32 + 1),
                };
                let got_distance = distance(&elements[i], &elements[j])?;
                if got_distance != expected_distance {
                    metric_ok = false;
                    report.line(format!(
                        "distance mismatch: {} vs {}: {} expected {}",
                        corpus[i].describe(),
                        corpus[j].describe(),
                        got_distance.render(),
                        expected_distance.render()
                    ));
                }
            }
        }
    }
    report.check(
        "order agrees with the prefix relation",
        order_ok,
        format!("{pairs} ordered pairs"),
    );
    report.check(
        "distance exponent is longest common prefix + 1",
        metric_ok,
        "",
    );
    // A few named facts from the model.
    let empty = Sequence { head: vec![], cycle: vec![] };
    let empty_elem = empty.to_element(&functor, stop)?;
    let all_above_empty = elements
        .iter()
        .map(|e| leq(&empty_elem, e, &base))
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .all(|b| b);
    report.check("the empty word is below everything", all_above_empty, "");
    Ok(report)
}

/// Dispatch by demo name with string parameters, for the CLI and bindings.
pub fn run_demo(name: &str, params: &BTreeMap<String, String>) -> Result<DemoReport> {
    let get_usize = |key: &str, default: usize| -> Result<usize> {
        match params.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::Parse(format!("parameter {key}={v} is not a number"))),
        }
    };
    let known = |allowed: &[&str]| -> Result<()> {
        for key in params.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(Error::Parse(format!("unknown parameter `{key}`")));
            }
        }
        Ok(())
    };
    // `seed` is accepted everywhere; only sampled demos consult it.
    match name {
        "pf-countable" => {
            known(&["max-element", "seed"])?;
            demo_pf_countable(get_usize("max-element", 5)?)
        }
        "aleph-stream" => {
            known(&["alphabet-size", "prefix-len", "seed"])?;
            demo_aleph_stream(get_usize("alphabet-size", 2)?, get_usize("prefix-len", 3)?)
        }
        "trees" => {
            known(&["seed"])?;
            demo_trees()
        }
        "prefix-order" => {
            known(&["alphabet", "seed"])?;
            let alphabet = match params.get("alphabet") {
                None => FiniteSet::new(["a", "b"]),
                Some(text) => FiniteSet::parse(text)?,
            };
            demo_prefix_order(&alphabet, get_usize("seed", 0)? as u64)
        }
        other => Err(Error::Parse(format!(
            "unknown demo `{other}`; expected pf-countable, aleph-stream, trees, or prefix-order"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pf_countable_small_is_distinct() {
        let report = demo_pf_countable(0).unwrap();
        assert!(report.passed(), "{report:?}");
        let report = demo_pf_countable(2).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn pf_countable_bound_is_enforced() {
        assert!(matches!(
            demo_pf_countable(7),
            Err(Error::BoundExceeded { .. })
        ));
    }

    #[test]
    fn aleph_stream_separates_prefix_functions() {
        let report = demo_aleph_stream(2, 3).unwrap();
        assert!(report.passed(), "{report:?}");
        assert!(matches!(
            demo_aleph_stream(1, 3),
            Err(Error::BoundExceeded { .. })
        ));
    }

    #[test]
    fn trees_demo_passes() {
        let report = demo_trees().unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn prefix_order_matches_the_word_model() {
        let report = demo_prefix_order(&FiniteSet::new(["a", "b"]), 0).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn demo_reports_are_byte_stable() {
        let a = serde_json::to_string(&run_demo("trees", &BTreeMap::new()).unwrap()).unwrap();
        let b = serde_json::to_string(&run_demo("trees", &BTreeMap::new()).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unknown_demo_or_param_is_rejected() {
        assert!(run_demo("nope", &BTreeMap::new()).is_err());
        let mut params = BTreeMap::new();
        params.insert("bogus".to_string(), "1".to_string());
        assert!(run_demo("trees", &params).is_err());
    }
}
