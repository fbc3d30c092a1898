//! Canonical finite sets and functions between them.
//!
//! A [`FiniteSet`] stores its atom labels deduplicated and in lexicographic
//! order; every canonical form elsewhere in the crate derives from that
//! order. A [`FiniteFunction`] is a total assignment between two such sets.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// A finite set of atom labels, kept sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiniteSet {
    labels: Vec<String>,
}

impl FiniteSet {
    /// Builds a set from arbitrary labels, sorting and deduplicating.
    pub fn new<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        labels.sort();
        labels.dedup();
        FiniteSet { labels }
    }

    pub fn empty() -> Self {
        FiniteSet { labels: Vec::new() }
    }

    /// The singleton used as stage 0 of the terminal-coalgebra chain.
    pub fn singleton(label: &str) -> Self {
        FiniteSet {
            labels: vec![label.to_string()],
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.labels.binary_search_by(|l| l.as_str().cmp(label)).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(String::as_str)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Parses a set literal `{a, b, c}`.
    pub fn parse(text: &str) -> Result<Self> {
        let inner = text
            .trim()
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .ok_or_else(|| Error::Parse(format!("expected a set literal `{{...}}`, got `{text}`")))?;
        let inner = inner.trim();
        if inner.is_empty() {
            return Ok(FiniteSet::empty());
        }
        let mut labels = Vec::new();
        for part in inner.split(',') {
            let atom = part.trim();
            if atom.is_empty() {
                return Err(Error::Parse(format!("empty atom in set literal `{text}`")));
            }
            if atom.chars().any(|c| "{}(),;|".contains(c) || c.is_whitespace()) {
                return Err(Error::Parse(format!("invalid atom `{atom}` in set literal")));
            }
            labels.push(atom.to_string());
        }
        Ok(FiniteSet::new(labels))
    }
}

impl fmt::Display for FiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels.join(", "))
    }
}

/// A total function between two finite sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteFunction {
    domain: FiniteSet,
    codomain: FiniteSet,
    mapping: BTreeMap<String, String>,
}

impl FiniteFunction {
    /// Builds a function, checking totality and that images land in the codomain.
    pub fn new(
        domain: FiniteSet,
        codomain: FiniteSet,
        mapping: BTreeMap<String, String>,
    ) -> Result<Self> {
        for x in domain.iter() {
            match mapping.get(x) {
                None => {
                    return Err(Error::InvalidFunction(format!(
                        "no value assigned to `{x}`"
                    )))
                }
                Some(y) if !codomain.contains(y) => {
                    return Err(Error::InvalidFunction(format!(
                        "image `{y}` of `{x}` is not in the codomain"
                    )))
                }
                _ => {}
            }
        }
        if mapping.len() != domain.len() {
            let stray = mapping
                .keys()
                .find(|k| !domain.contains(k))
                .cloned()
                .unwrap_or_default();
            return Err(Error::InvalidFunction(format!(
                "mapping mentions `{stray}` outside the domain"
            )));
        }
        Ok(FiniteFunction {
            domain,
            codomain,
            mapping,
        })
    }

    pub fn identity(set: &FiniteSet) -> Self {
        let mapping = set
            .iter()
            .map(|x| (x.to_string(), x.to_string()))
            .collect();
        FiniteFunction {
            domain: set.clone(),
            codomain: set.clone(),
            mapping,
        }
    }

    /// The unique map from the empty set into `codomain`.
    pub fn from_empty(codomain: FiniteSet) -> Self {
        FiniteFunction {
            domain: FiniteSet::empty(),
            codomain,
            mapping: BTreeMap::new(),
        }
    }

    /// The unique map into a singleton.
    pub fn to_singleton(domain: FiniteSet, point: &str) -> Self {
        let mapping = domain
            .iter()
            .map(|x| (x.to_string(), point.to_string()))
            .collect();
        FiniteFunction {
            domain,
            codomain: FiniteSet::singleton(point),
            mapping,
        }
    }

    pub fn domain(&self) -> &FiniteSet {
        &self.domain
    }

    pub fn codomain(&self) -> &FiniteSet {
        &self.codomain
    }

    pub fn mapping(&self) -> &BTreeMap<String, String> {
        &self.mapping
    }

    pub fn apply(&self, x: &str) -> Result<&str> {
        self.mapping
            .get(x)
            .map(String::as_str)
            .ok_or_else(|| Error::UnknownState(x.to_string()))
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        self.mapping.values().all(|v| seen.insert(v))
    }

    pub fn is_bijective(&self) -> bool {
        self.domain.len() == self.codomain.len() && self.is_injective()
    }

    /// Inverse of a bijection.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_bijective() {
            return Err(Error::InvalidFunction("not a bijection".into()));
        }
        let mapping = self
            .mapping
            .iter()
            .map(|(k, v)| (v.clone(), k.clone()))
            .collect();
        FiniteFunction::new(self.codomain.clone(), self.domain.clone(), mapping)
    }

    /// Parses a function literal `f: {a,b} -> {x} ; a|->x ; b|->x`.
    /// The leading name is optional.
    pub fn parse(text: &str) -> Result<Self> {
        let mut body = text.trim();
        // Strip an optional `name:` prefix; careful not to eat the set literal.
        if let Some(colon) = body.find(':') {
            let head = &body[..colon];
            if !head.contains('{') && !head.contains("->") {
                body = body[colon + 1..].trim_start();
            }
        }
        let arrow = body
            .find("->")
            .ok_or_else(|| Error::Parse(format!("function literal `{text}` is missing `->`")))?;
        let domain = FiniteSet::parse(&body[..arrow])?;
        let rest = &body[arrow + 2..];
        let mut pieces = rest.split(';');
        let codomain = FiniteSet::parse(
            pieces
                .next()
                .ok_or_else(|| Error::Parse("missing codomain".into()))?,
        )?;
        let mut mapping = BTreeMap::new();
        for piece in pieces {
            let piece = piece.trim();
            if piece.is_empty() {
                continue;
            }
            let (lhs, rhs) = piece
                .split_once("|->")
                .ok_or_else(|| Error::Parse(format!("expected `x|->y`, got `{piece}`")))?;
            let prev = mapping.insert(lhs.trim().to_string(), rhs.trim().to_string());
            if prev.is_some() {
                return Err(Error::Parse(format!(
                    "`{}` is assigned twice in the function literal",
                    lhs.trim()
                )));
            }
        }
        FiniteFunction::new(domain, codomain, mapping)
    }
}

impl fmt::Display for FiniteFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.domain, self.codomain)?;
        for (x, y) in &self.mapping {
            write!(f, " ; {x}|->{y}")?;
        }
        Ok(())
    }
}

/// Composition `f ∘ g` (apply `g` first).
pub fn compose(f: &FiniteFunction, g: &FiniteFunction) -> Result<FiniteFunction> {
    if g.codomain != f.domain {
        return Err(Error::DomainMismatch {
            expected: f.domain.to_string(),
            found: g.codomain.to_string(),
        });
    }
    let mut mapping = BTreeMap::new();
    for (x, y) in &g.mapping {
        mapping.insert(x.clone(), f.apply(y)?.to_string());
    }
    FiniteFunction::new(g.domain.clone(), f.codomain.clone(), mapping)
}

/// Deterministic label for a pair of atoms.
pub fn pair_label(x: &str, y: &str) -> String {
    format!("({x},{y})")
}

/// The canonical pullback of `f` and `g`: carrier `{(x,y) | f(x) = g(y)}`
/// with its two projections. Pair labels use [`pair_label`].
pub fn pullback(
    f: &FiniteFunction,
    g: &FiniteFunction,
) -> Result<(FiniteSet, FiniteFunction, FiniteFunction)> {
    if f.codomain != g.codomain {
        return Err(Error::CodomainMismatch(
            f.codomain.to_string(),
            g.codomain.to_string(),
        ));
    }
    // Group by common image so only matching pairs are materialized.
    let mut fibers_g: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (y, z) in &g.mapping {
        fibers_g.entry(z.as_str()).or_default().push(y.as_str());
    }
    let mut labels = Vec::new();
    let mut proj1 = BTreeMap::new();
    let mut proj2 = BTreeMap::new();
    for (x, z) in &f.mapping {
        if let Some(ys) = fibers_g.get(z.as_str()) {
            for y in ys {
                let label = pair_label(x, y);
                proj1.insert(label.clone(), x.clone());
                proj2.insert(label.clone(), (*y).to_string());
                labels.push(label);
            }
        }
    }
    let carrier = FiniteSet::new(labels);
    let p1 = FiniteFunction::new(carrier.clone(), f.domain.clone(), proj1)?;
    let p2 = FiniteFunction::new(carrier.clone(), g.domain.clone(), proj2)?;
    Ok((carrier, p1, p2))
}
