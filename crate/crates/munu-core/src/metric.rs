//! The canonical ultrametric and partial order on rational behaviors.
//!
//! Two elements are at distance `2^-n` where `n` is the least depth at which
//! their projections differ; behaviorally equal elements are at distance 0.
//! Choosing a base point `p` in `F(∅)` defines the approximation maps `ε_n`
//! (truncate at depth `n`, then plug `p` into every cut point), and with them
//! the order `t ⊑ s` iff `t = ε_n(s)` for some `n`. Distances are stored as
//! exponents and never as floats, so every comparison is exact.

use std::cmp::Ordering;

use crate::algebra::{embed_term, Term};
use crate::coalgebra::{behaviorally_equal, project, separation_depth, RationalElement};
use crate::error::{Error, Result};
use crate::finset::FiniteSet;
use crate::functor::FunctorExpr;
use crate::report::VerificationReport;
use crate::value::{CanonValue, POINT};

/// A chosen element of `F(∅)`, the seed for the ε-approximations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasePoint {
    functor: FunctorExpr,
    value: CanonValue,
}

impl BasePoint {
    /// The canonically least element of `F(∅)`; fails with `EmptyFZero` when
    /// `F(∅)` is empty.
    pub fn default_for(functor: &FunctorExpr) -> Result<BasePoint> {
        let mut values = functor.enumerate(&FiniteSet::empty())?;
        values.sort();
        match values.into_iter().next() {
            Some(value) => Ok(BasePoint {
                functor: functor.clone(),
                value,
            }),
            None => Err(Error::EmptyFZero),
        }
    }

    /// A user-chosen element of `F(∅)`.
    pub fn new(functor: &FunctorExpr, value: CanonValue) -> Result<BasePoint> {
        let value = value.canonicalize();
        if !functor.validates(&value, &FiniteSet::empty()) {
            return Err(Error::ShapeMismatch(format!(
                "`{}` is not an element of {}(∅)",
                value.render(),
                functor.render()
            )));
        }
        Ok(BasePoint {
            functor: functor.clone(),
            value,
        })
    }

    pub fn parse(functor: &FunctorExpr, text: &str) -> Result<BasePoint> {
        let value = functor.parse_value(text, &FiniteSet::empty())?;
        BasePoint::new(functor, value)
    }

    pub fn functor(&self) -> &FunctorExpr {
        &self.functor
    }

    pub fn value(&self) -> &CanonValue {
        &self.value
    }
}

/// A behavioral distance `2^-exponent`, with `Zero` for distance 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distance {
    Zero,
    Finite(u32),
}

impl Distance {
    pub fn exponent(&self) -> Option<u32> {
        match self {
            Distance::Zero => None,
            Distance::Finite(n) => Some(*n),
        }
    }

    /// Strictly smaller than `2^-n`.
    pub fn below(&self, n: u32) -> bool {
        match self {
            Distance::Zero => true,
            Distance::Finite(k) => *k > n,
        }
    }

    pub fn render(&self) -> String {
        match self {
            Distance::Zero => "0".to_string(),
            Distance::Finite(n) => format!("2^-{n}"),
        }
    }
}

impl PartialOrd for Distance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Distance {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Distance::Zero, Distance::Zero) => Ordering::Equal,
            (Distance::Zero, Distance::Finite(_)) => Ordering::Less,
            (Distance::Finite(_), Distance::Zero) => Ordering::Greater,
            // A larger exponent is a smaller distance.
            (Distance::Finite(a), Distance::Finite(b)) => b.cmp(a),
        }
    }
}

impl std::fmt::Display for Distance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.render())
    }
}

/// The canonical ultrametric distance between two rational elements,
/// computed exactly through the kernel-refinement bound.
pub fn distance(x: &RationalElement, y: &RationalElement) -> Result<Distance> {
    match separation_depth(x, y)? {
        None => Ok(Distance::Zero),
        Some(n) => Ok(Distance::Finite(n as u32)),
    }
}

/// `ε_n(x)`: the depth-`n` projection of `x` with the base point substituted
/// for every cut point. The result is a term of depth at most `n + depth(p)`.
pub fn epsilon(x: &RationalElement, depth: usize, base: &BasePoint) -> Result<Term> {
    if base.functor != *x.functor() {
        return Err(Error::FunctorMismatch);
    }
    let projected = project(x, depth);
    let plugged = projected.substitute(&|atom| {
        debug_assert_eq!(atom, POINT, "projections only contain the stage-0 atom");
        base.value.clone()
    });
    Term::new(&base.functor, plugged)
}

/// The canonical order: `t ⊑ s` iff they are behaviorally equal or
/// `t = ε_n(s)` for some `n`. Since `t = ε_n(s)` forces agreement up to
/// depth `n`, only `n` below the separation exponent need checking, which
/// makes this an exact decision procedure.
pub fn leq(t: &RationalElement, s: &RationalElement, base: &BasePoint) -> Result<bool> {
    if base.functor != *t.functor() || base.functor != *s.functor() {
        return Err(Error::FunctorMismatch);
    }
    let separation = match separation_depth(t, s)? {
        None => return Ok(true),
        Some(n) => n,
    };
    for n in 0..separation {
        let approximant = embed_term(&base.functor, &epsilon(s, n, base)?)?;
        if behaviorally_equal(t, &approximant)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// The ε-approximants of `x` up to depth `N`, with the density and chain
/// facts verified: `d(x, ε_n(x)) < 2^-n` and `ε_n(x) ⊑ ε_{n+1}(x) ⊑ x`.
#[derive(Debug, Clone)]
pub struct CompletionWitness {
    pub approximants: Vec<Term>,
    pub report: VerificationReport,
}

pub fn completion_witness(
    x: &RationalElement,
    depth: usize,
    base: &BasePoint,
) -> Result<CompletionWitness> {
    let mut approximants = Vec::with_capacity(depth + 1);
    for n in 0..=depth {
        approximants.push(epsilon(x, n, base)?);
    }
    let embedded: Vec<RationalElement> = approximants
        .iter()
        .map(|t| embed_term(&base.functor, t))
        .collect::<Result<_>>()?;
    let mut report = VerificationReport::new();
    for (n, approx) in embedded.iter().enumerate() {
        let d = distance(x, approx)?;
        report.add(
            &format!("d(x, eps_{n}(x)) < 2^-{n}"),
            d.below(n as u32),
            format!("distance {}", d.render()),
        );
    }
    for n in 0..depth {
        report.add(
            &format!("eps_{n}(x) below eps_{}(x)", n + 1),
            leq(&embedded[n], &embedded[n + 1], base)?,
            String::new(),
        );
    }
    for (n, approx) in embedded.iter().enumerate() {
        report.add(
            &format!("eps_{n}(x) below x"),
            leq(approx, x, base)?,
            String::new(),
        );
    }
    Ok(CompletionWitness {
        approximants,
        report,
    })
}
