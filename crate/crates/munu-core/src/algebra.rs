//! Elements of the initial algebra as finite terms.
//!
//! A term is a closed, well-founded canonical value: every layer matches the
//! functor shape and every identity slot holds the next layer. For the
//! finite power-set functor the canonical `SetOf` invariant makes terms
//! exactly the finite extensional trees.

use std::collections::BTreeMap;

use crate::coalgebra::{Coalgebra, RationalElement};
use crate::error::{Error, Result};
use crate::finset::FiniteSet;
use crate::functor::FunctorExpr;
use crate::value::{CanonValue, RawValue};

/// An element of the initial algebra of a functor expression.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Term {
    value: CanonValue,
    depth: usize,
}

impl Term {
    /// Validates `value` layer by layer against `functor` and records the
    /// nesting depth (number of layers on the longest slot chain).
    pub fn new(functor: &FunctorExpr, value: CanonValue) -> Result<Term> {
        let value = value.canonicalize();
        let depth = layer_depth(functor, &value)?;
        Ok(Term { value, depth })
    }

    /// Parses a term literal such as `{{},{{}}}`, `f(c,c)` or `(a,(b,stop))`.
    pub fn parse(functor: &FunctorExpr, text: &str) -> Result<Term> {
        let raw = RawValue::parse(text)?;
        let value = elaborate_term(functor, &raw)?;
        Term::new(functor, value)
    }

    pub fn value(&self) -> &CanonValue {
        &self.value
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn render(&self) -> String {
        self.value.render()
    }

    pub fn is_valid_for(&self, functor: &FunctorExpr) -> bool {
        validate_term(functor, &self.value)
    }

    /// The immediate subterms, in slot order with repetitions.
    pub fn subterms(&self, functor: &FunctorExpr) -> Result<Vec<Term>> {
        functor
            .slot_values(&self.value)?
            .into_iter()
            .map(|v| Term::new(functor, v.clone()))
            .collect()
    }
}

impl std::fmt::Display for Term {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.render())
    }
}

fn elaborate_term(functor: &FunctorExpr, raw: &RawValue) -> Result<CanonValue> {
    if functor.is_identity() {
        return Err(Error::ShapeMismatch(
            "the identity functor has no finite terms".into(),
        ));
    }
    functor.elaborate(raw, &|slot| elaborate_term(functor, slot))
}

/// True iff every layer of `value` matches the shape of `functor` and the
/// value is closed (no free variables anywhere).
pub fn validate_term(functor: &FunctorExpr, value: &CanonValue) -> bool {
    if functor.is_identity() {
        return false;
    }
    value.is_canonical() && functor.matches_with(value, &|slot| validate_term(functor, slot))
}

fn layer_depth(functor: &FunctorExpr, value: &CanonValue) -> Result<usize> {
    if functor.is_identity() {
        return Err(Error::ShapeMismatch(
            "the identity functor has no finite terms".into(),
        ));
    }
    if !value.is_canonical() {
        return Err(Error::ShapeMismatch(format!(
            "value `{}` is not canonical",
            value.render()
        )));
    }
    let slots = functor.slot_values(value)?;
    let mut deepest = 0;
    for slot in slots {
        deepest = deepest.max(layer_depth(functor, slot)?);
    }
    Ok(1 + deepest)
}

/// Exposes the top layer of a term as a functor structure over its immediate
/// subterms: the template holds a variable per slot, named by the canonical
/// printed form of the subterm, and `bindings` resolves those names.
///
/// This is the inverse of term formation; [`fold_term`] undoes it.
pub fn unfold_term(
    functor: &FunctorExpr,
    term: &Term,
) -> Result<(CanonValue, BTreeMap<String, Term>)> {
    let mut bindings = BTreeMap::new();
    let template = functor.map_slots(term.value(), &mut |slot| {
        let label = slot.render();
        if !bindings.contains_key(&label) {
            bindings.insert(label.clone(), Term::new(functor, slot.clone())?);
        }
        Ok(CanonValue::Var(label))
    })?;
    Ok((template.canonicalize(), bindings))
}

/// Rebuilds a term from a one-layer structure over subterms.
pub fn fold_term(
    functor: &FunctorExpr,
    template: &CanonValue,
    bindings: &BTreeMap<String, Term>,
) -> Result<Term> {
    let value = functor.map_slots(template, &mut |slot| match slot {
        CanonValue::Var(name) => bindings
            .get(name)
            .map(|t| t.value().clone())
            .ok_or_else(|| Error::UnknownState(name.clone())),
        other => Err(Error::ShapeMismatch(format!(
            "template slot `{}` is not a variable",
            other.render()
        ))),
    })?;
    Term::new(functor, value)
}

/// Embeds a term into the space of rational behaviors: the coalgebra whose
/// states are the distinct subterms of `term` (shared by structural
/// equality), each unfolding one layer, pointed at the term itself.
pub fn embed_term(functor: &FunctorExpr, term: &Term) -> Result<RationalElement> {
    // Collect distinct subterm values in canonical order.
    let mut subterms: BTreeMap<CanonValue, ()> = BTreeMap::new();
    collect_subterms(functor, term.value(), &mut subterms)?;
    let labels: BTreeMap<String, String> = subterms
        .keys()
        .enumerate()
        .map(|(i, v)| (v.render(), format!("t{i}")))
        .collect();

    let states = FiniteSet::new(labels.values().cloned());
    let mut structure = BTreeMap::new();
    for v in subterms.keys() {
        let one_layer = functor.map_slots(v, &mut |slot| {
            Ok(CanonValue::Var(labels[&slot.render()].clone()))
        })?;
        structure.insert(labels[&v.render()].clone(), one_layer.canonicalize());
    }
    let coalgebra = Coalgebra::new(functor.clone(), states, structure)?;
    let point = labels[&term.value().render()].clone();
    RationalElement::new(coalgebra, &point)
}

fn collect_subterms(
    functor: &FunctorExpr,
    value: &CanonValue,
    out: &mut BTreeMap<CanonValue, ()>,
) -> Result<()> {
    if out.contains_key(value) {
        return Ok(());
    }
    out.insert(value.clone(), ());
    for slot in functor.slot_values(value)? {
        collect_subterms(functor, slot, out)?;
    }
    Ok(())
}
