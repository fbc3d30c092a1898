//! Finite coalgebras, rational behaviors, and behavioral equivalence.
//!
//! A rational element of the terminal coalgebra is a finite coalgebra with a
//! designated state. Depth-`n` behavior is computed by unfolding the
//! structure map `n` times into a deep stage value; behavioral equivalence is
//! decided by the naive final-chain iteration, refining the kernel of the
//! depth-`n` projection one step at a time until it stabilizes. For every
//! finite coalgebra that happens within `|states|` steps.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::finset::{FiniteFunction, FiniteSet};
use crate::functor::FunctorExpr;
use crate::value::{CanonValue, POINT};

/// A finite coalgebra: a structure value over the state set for every state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coalgebra {
    functor: FunctorExpr,
    states: FiniteSet,
    structure: BTreeMap<String, CanonValue>,
}

impl Coalgebra {
    pub fn new(
        functor: FunctorExpr,
        states: FiniteSet,
        structure: BTreeMap<String, CanonValue>,
    ) -> Result<Coalgebra> {
        if states.contains(POINT) {
            return Err(Error::InvalidCoalgebra(format!(
                "`{POINT}` is reserved for the terminal-chain base point"
            )));
        }
        for s in states.iter() {
            let value = structure.get(s).ok_or_else(|| {
                Error::InvalidCoalgebra(format!("state `{s}` has no structure value"))
            })?;
            if !functor.validates(value, &states) {
                return Err(Error::InvalidCoalgebra(format!(
                    "structure of `{s}` is `{}`, which is not a value of {} over {}",
                    value.render(),
                    functor.render(),
                    states
                )));
            }
        }
        if structure.len() != states.len() {
            let stray = structure
                .keys()
                .find(|k| !states.contains(k))
                .cloned()
                .unwrap_or_default();
            return Err(Error::InvalidCoalgebra(format!(
                "structure mentions `{stray}` outside the state set"
            )));
        }
        Ok(Coalgebra {
            functor,
            states,
            structure,
        })
    }

    pub fn functor(&self) -> &FunctorExpr {
        &self.functor
    }

    pub fn states(&self) -> &FiniteSet {
        &self.states
    }

    pub fn structure(&self, state: &str) -> Result<&CanonValue> {
        self.structure
            .get(state)
            .ok_or_else(|| Error::UnknownState(state.to_string()))
    }

    /// Parses the textual coalgebra format:
    ///
    /// ```text
    /// functor: Pf(Id)
    /// states: {x, y}
    /// x -> {x, y}
    /// y -> {}
    /// ```
    ///
    /// Blank lines and lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Coalgebra> {
        let mut functor = None;
        let mut states = None;
        let mut structure: BTreeMap<String, String> = BTreeMap::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("functor:") {
                functor = Some(FunctorExpr::parse(rest.trim())?);
            } else if let Some(rest) = line.strip_prefix("states:") {
                states = Some(FiniteSet::parse(rest.trim())?);
            } else if let Some((state, value)) = line.split_once("->") {
                let state = state.trim().to_string();
                if structure.insert(state.clone(), value.trim().to_string()).is_some() {
                    return Err(Error::InvalidCoalgebra(format!(
                        "state `{state}` has two structure lines"
                    )));
                }
            } else {
                return Err(Error::Parse(format!("cannot parse coalgebra line `{line}`")));
            }
        }
        let functor =
            functor.ok_or_else(|| Error::Parse("missing `functor:` line".into()))?;
        let states = states.ok_or_else(|| Error::Parse("missing `states:` line".into()))?;
        let mut parsed = BTreeMap::new();
        for (state, text) in structure {
            parsed.insert(state, functor.parse_value(&text, &states)?);
        }
        Coalgebra::new(functor, states, parsed)
    }

    /// Renders back into the textual format.
    pub fn render(&self) -> String {
        let mut out = format!("functor: {}\nstates: {}\n", self.functor.render(), self.states);
        for s in self.states.iter() {
            out.push_str(&format!("{s} -> {}\n", self.structure[s].render()));
        }
        out
    }
}

/// An element of the terminal coalgebra presented by a finite coalgebra and a
/// state of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalElement {
    coalgebra: Coalgebra,
    point: String,
}

impl RationalElement {
    pub fn new(coalgebra: Coalgebra, point: &str) -> Result<RationalElement> {
        if !coalgebra.states.contains(point) {
            return Err(Error::UnknownState(point.to_string()));
        }
        Ok(RationalElement {
            coalgebra,
            point: point.to_string(),
        })
    }

    pub fn coalgebra(&self) -> &Coalgebra {
        &self.coalgebra
    }

    pub fn point(&self) -> &str {
        &self.point
    }

    pub fn functor(&self) -> &FunctorExpr {
        &self.coalgebra.functor
    }
}

/// Kernel blocks of the stabilized behavioral partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Vec<String>>,
}

impl Partition {
    fn from_classes(states: &[&str], classes: &[usize]) -> Partition {
        let mut by_class: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        for (i, s) in states.iter().enumerate() {
            by_class.entry(classes[i]).or_default().push(s.to_string());
        }
        let mut blocks: Vec<Vec<String>> = by_class.into_values().collect();
        for block in &mut blocks {
            block.sort();
        }
        blocks.sort();
        Partition { blocks }
    }

    pub fn blocks(&self) -> &[Vec<String>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_of(&self, state: &str) -> Option<usize> {
        self.blocks
            .iter()
            .position(|b| b.binary_search_by(|s| s.as_str().cmp(state)).is_ok())
    }

    pub fn same_block(&self, a: &str, b: &str) -> bool {
        match (self.block_of(a), self.block_of(b)) {
            (Some(i), Some(j)) => i == j,
            _ => false,
        }
    }
}

/// Depth-`n` behavior of a rational element, as a deep stage value: the
/// structure map unfolded `n` times with the cut boundary collapsed to the
/// stage-0 atom.
pub fn project(x: &RationalElement, depth: usize) -> CanonValue {
    let states: Vec<&str> = x.coalgebra.states.iter().collect();
    let mut beh: BTreeMap<&str, CanonValue> = states
        .iter()
        .map(|s| (*s, CanonValue::point()))
        .collect();
    for _ in 0..depth {
        let snapshot = beh.clone();
        for s in &states {
            let unfolded = x.coalgebra.structure[*s]
                .substitute(&|y| snapshot[y].clone());
            beh.insert(s, unfolded);
        }
    }
    beh[x.point.as_str()].clone()
}

/// One kernel-refinement round: quotient every structure value by the current
/// classes and reindex by canonical value order.
fn refine_once(
    states: &[&str],
    structure: &BTreeMap<String, CanonValue>,
    classes: &[usize],
) -> Vec<usize> {
    let index: BTreeMap<&str, usize> = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let quotiented: Vec<CanonValue> = states
        .iter()
        .map(|s| {
            structure[*s].substitute(&|y| CanonValue::Var(format!("#{}", classes[index[y]])))
        })
        .collect();
    let mut order: BTreeMap<&CanonValue, usize> = BTreeMap::new();
    for v in &quotiented {
        let next = order.len();
        order.entry(v).or_insert(next);
    }
    // Reindex in canonical value order for determinism.
    let mut sorted: Vec<&CanonValue> = order.keys().copied().collect();
    sorted.sort();
    let canonical: BTreeMap<&CanonValue, usize> =
        sorted.into_iter().enumerate().map(|(i, v)| (v, i)).collect();
    quotiented.iter().map(|v| canonical[v]).collect()
}

fn same_kernel(a: &[usize], b: &[usize]) -> bool {
    let mut pairing: BTreeMap<usize, usize> = BTreeMap::new();
    let mut reverse: BTreeMap<usize, usize> = BTreeMap::new();
    for (x, y) in a.iter().zip(b.iter()) {
        if *pairing.entry(*x).or_insert(*y) != *y {
            return false;
        }
        if *reverse.entry(*y).or_insert(*x) != *x {
            return false;
        }
    }
    true
}

/// Kernels of the depth-`n` projections, from depth 0 until the first repeat.
/// `rounds[n][i]` is the class of state `i` at depth `n`; the final two
/// entries carry the same kernel.
fn kernel_rounds(c: &Coalgebra) -> Vec<Vec<usize>> {
    let states: Vec<&str> = c.states.iter().collect();
    let mut rounds: Vec<Vec<usize>> = vec![vec![0; states.len()]];
    loop {
        let next = refine_once(&states, &c.structure, rounds.last().unwrap());
        let stable = same_kernel(rounds.last().unwrap(), &next);
        rounds.push(next);
        if stable {
            return rounds;
        }
    }
}

/// The stabilized behavioral partition and the least depth `n` with
/// `kernel(n+1) = kernel(n)`. States in one block are behaviorally equal at
/// every depth.
pub fn behavioral_partition(c: &Coalgebra) -> (Partition, usize) {
    let states: Vec<&str> = c.states.iter().collect();
    let rounds = kernel_rounds(c);
    let depth = rounds.len() - 2;
    (Partition::from_classes(&states, rounds.last().unwrap()), depth)
}

/// Coproduct of two coalgebras for the same functor, with the renamed labels
/// of the two designated states.
fn disjoint_union(
    x: &RationalElement,
    y: &RationalElement,
) -> Result<(Coalgebra, String, String)> {
    if x.functor() != y.functor() {
        return Err(Error::FunctorMismatch);
    }
    let mut states = Vec::new();
    let mut structure = BTreeMap::new();
    for (prefix, side) in [("a:", &x.coalgebra), ("b:", &y.coalgebra)] {
        for s in side.states.iter() {
            let label = format!("{prefix}{s}");
            let value = side.structure[s]
                .rename(&|v| Some(format!("{prefix}{v}")))
                .expect("total renaming");
            states.push(label.clone());
            structure.insert(label, value);
        }
    }
    let union = Coalgebra::new(x.functor().clone(), FiniteSet::new(states), structure)?;
    Ok((union, format!("a:{}", x.point), format!("b:{}", y.point)))
}

/// Least depth at which the two points are separated by a projection, if any.
pub(crate) fn separation_depth(
    x: &RationalElement,
    y: &RationalElement,
) -> Result<Option<usize>> {
    let (union, px, py) = disjoint_union(x, y)?;
    let states: Vec<&str> = union.states.iter().collect();
    let ix = states.iter().position(|s| *s == px).expect("point in union");
    let iy = states.iter().position(|s| *s == py).expect("point in union");
    for (n, round) in kernel_rounds(&union).iter().enumerate() {
        if round[ix] != round[iy] {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Equality in the terminal coalgebra: the two points are bisimilar.
pub fn behaviorally_equal(x: &RationalElement, y: &RationalElement) -> Result<bool> {
    Ok(separation_depth(x, y)?.is_none())
}

/// Quotients the reachable part of `x` by its behavioral partition. The
/// result has canonical state labels in breadth-first order from the point
/// and is behaviorally equal to `x`.
pub fn minimize(x: &RationalElement) -> Result<RationalElement> {
    Ok(minimize_with_witness(x)?.0)
}

/// Like [`minimize`], but also returns the reachable restriction of the input
/// and the quotient map from it, which is a coalgebra homomorphism.
pub fn minimize_with_witness(
    x: &RationalElement,
) -> Result<(RationalElement, Coalgebra, FiniteFunction)> {
    // Restrict to states reachable from the point.
    let mut reachable: BTreeSet<String> = BTreeSet::new();
    let mut queue = VecDeque::from([x.point.clone()]);
    while let Some(s) = queue.pop_front() {
        if !reachable.insert(s.clone()) {
            continue;
        }
        for y in x.coalgebra.structure[&s].vars_in_order() {
            if !reachable.contains(y) {
                queue.push_back(y.to_string());
            }
        }
    }
    let restricted = Coalgebra::new(
        x.functor().clone(),
        FiniteSet::new(reachable.iter().cloned()),
        reachable
            .iter()
            .map(|s| (s.clone(), x.coalgebra.structure[s].clone()))
            .collect(),
    )?;

    let (partition, _) = behavioral_partition(&restricted);
    // Pre-label each block by its least member and quotient the structures.
    let rep_of: BTreeMap<&str, &str> = restricted
        .states
        .iter()
        .map(|s| (s, partition.blocks[partition.block_of(s).unwrap()][0].as_str()))
        .collect();
    let quotient_value = |rep: &str| -> CanonValue {
        restricted.structure[rep]
            .rename(&|y| Some(rep_of[y].to_string()))
            .expect("total renaming")
    };

    // Breadth-first discovery over the quotient, then canonical labels.
    let start = rep_of[x.point.as_str()].to_string();
    let mut order: Vec<String> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut queue = VecDeque::from([start]);
    while let Some(rep) = queue.pop_front() {
        if !seen.insert(rep.clone()) {
            continue;
        }
        order.push(rep.clone());
        for y in quotient_value(&rep).vars_in_order() {
            if !seen.contains(y) {
                queue.push_back(y.to_string());
            }
        }
    }
    debug_assert_eq!(order.len(), partition.len(), "every block is reachable");
    let width = order.len().saturating_sub(1).to_string().len();
    let label_of: BTreeMap<&str, String> = order
        .iter()
        .enumerate()
        .map(|(i, rep)| (rep.as_str(), format!("q{i:0width$}")))
        .collect();

    let states = FiniteSet::new(label_of.values().cloned());
    let structure = order
        .iter()
        .map(|rep| {
            let value = quotient_value(rep)
                .rename(&|y| Some(label_of[y].clone()))
                .expect("total renaming");
            (label_of[rep.as_str()].clone(), value)
        })
        .collect();
    let minimized = Coalgebra::new(x.functor().clone(), states, structure)?;
    let point = label_of[rep_of[x.point.as_str()]].clone();

    let quotient_map = FiniteFunction::new(
        restricted.states.clone(),
        minimized.states.clone(),
        restricted
            .states
            .iter()
            .map(|s| (s.to_string(), label_of[rep_of[s]].clone()))
            .collect(),
    )?;
    Ok((
        RationalElement::new(minimized, &point)?,
        restricted,
        quotient_map,
    ))
}

/// Whether `f` is a coalgebra homomorphism from `c` to `d`: the structure of
/// the image equals the functor image of the structure, state by state.
pub fn is_homomorphism(f: &FiniteFunction, c: &Coalgebra, d: &Coalgebra) -> Result<bool> {
    if c.functor != d.functor {
        return Err(Error::FunctorMismatch);
    }
    if f.domain() != &c.states || f.codomain() != &d.states {
        return Err(Error::InvalidFunction(
            "map boundaries do not match the two state sets".into(),
        ));
    }
    for s in c.states.iter() {
        let mapped = c.structure[s].rename(&|y| f.apply(y).ok().map(str::to_string))?;
        if &mapped != d.structure(f.apply(s)?)? {
            return Ok(false);
        }
    }
    Ok(true)
}
