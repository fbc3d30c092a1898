//! The functor-expression language and its action on finite sets and
//! functions.
//!
//! Expressions are built from the identity functor, constant functors,
//! binary products and coproducts, the finite power-set constructor, flat
//! signatures, and composition. Applying an expression to a finite set
//! enumerates canonical values; applying it to a function relabels variables
//! and re-canonicalizes, which realizes the extensional quotient for the
//! power-set constructor.
//!
//! Composition is evaluated pointwise: a value of `F . G` is an `F`-shaped
//! value whose identity slots hold `G`-shaped values directly.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::finset::{self, FiniteFunction, FiniteSet};
use crate::report::VerificationReport;
use crate::value::{CanonValue, RawValue};

/// Default bound on the size of any enumerated set.
pub const DEFAULT_SIZE_LIMIT: u64 = 1_000_000;

/// A finitary set functor, as an expression tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FunctorExpr {
    Id,
    Const(FiniteSet),
    Product(Box<FunctorExpr>, Box<FunctorExpr>),
    Coproduct(Box<FunctorExpr>, Box<FunctorExpr>),
    Pfin(Box<FunctorExpr>),
    Sig(Vec<(String, usize)>),
    Compose(Box<FunctorExpr>, Box<FunctorExpr>),
}

impl FunctorExpr {
    pub fn product(f: FunctorExpr, g: FunctorExpr) -> Self {
        FunctorExpr::Product(Box::new(f), Box::new(g))
    }

    pub fn coproduct(f: FunctorExpr, g: FunctorExpr) -> Self {
        FunctorExpr::Coproduct(Box::new(f), Box::new(g))
    }

    pub fn pfin(f: FunctorExpr) -> Self {
        FunctorExpr::Pfin(Box::new(f))
    }

    pub fn compose(f: FunctorExpr, g: FunctorExpr) -> Self {
        FunctorExpr::Compose(Box::new(f), Box::new(g))
    }

    pub fn sig(ops: &[(&str, usize)]) -> Result<Self> {
        let ops: Vec<(String, usize)> = ops
            .iter()
            .map(|(n, a)| (n.to_string(), *a))
            .collect();
        let mut names: Vec<&str> = ops.iter().map(|(n, _)| n.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Parse("signature op-names must be distinct".into()));
        }
        Ok(FunctorExpr::Sig(ops))
    }

    /// Size of `F(X)` for a carrier of size `n`, refusing to exceed `limit`.
    pub fn size_on(&self, n: u128, limit: u64) -> Result<u128> {
        let cap = limit as u128;
        let over = |size: u128| Error::SizeLimitExceeded { size, limit };
        let size = match self {
            FunctorExpr::Id => n,
            FunctorExpr::Const(c) => c.len() as u128,
            FunctorExpr::Product(f, g) => f
                .size_on(n, limit)?
                .checked_mul(g.size_on(n, limit)?)
                .ok_or(over(u128::MAX))?,
            FunctorExpr::Coproduct(f, g) => f
                .size_on(n, limit)?
                .checked_add(g.size_on(n, limit)?)
                .ok_or(over(u128::MAX))?,
            FunctorExpr::Pfin(f) => {
                let k = f.size_on(n, limit)?;
                if k >= 64 {
                    return Err(over(u128::MAX));
                }
                1u128 << k
            }
            FunctorExpr::Sig(ops) => {
                let mut total: u128 = 0;
                for (_, arity) in ops {
                    let arity = u32::try_from(*arity).map_err(|_| over(u128::MAX))?;
                    let this = n.checked_pow(arity).ok_or(over(u128::MAX))?;
                    total = total.checked_add(this).ok_or(over(u128::MAX))?;
                }
                total
            }
            FunctorExpr::Compose(f, g) => f.size_on(g.size_on(n, limit)?, limit)?,
        };
        if size > cap {
            Err(over(size))
        } else {
            Ok(size)
        }
    }

    /// All valid values of this shape whose identity slots are drawn from
    /// `slots`. The `slots` entries must be pairwise distinct.
    fn enum_with(&self, slots: &[CanonValue]) -> Vec<CanonValue> {
        match self {
            FunctorExpr::Id => slots.to_vec(),
            FunctorExpr::Const(c) => c
                .iter()
                .map(|a| CanonValue::ConstAtom(a.to_string()))
                .collect(),
            FunctorExpr::Product(f, g) => {
                let left = f.enum_with(slots);
                let right = g.enum_with(slots);
                let mut out = Vec::with_capacity(left.len() * right.len());
                for a in &left {
                    for b in &right {
                        out.push(CanonValue::Pair(Box::new(a.clone()), Box::new(b.clone())));
                    }
                }
                out
            }
            FunctorExpr::Coproduct(f, g) => {
                let mut out: Vec<CanonValue> = f
                    .enum_with(slots)
                    .into_iter()
                    .map(|v| CanonValue::InL(Box::new(v)))
                    .collect();
                out.extend(
                    g.enum_with(slots)
                        .into_iter()
                        .map(|v| CanonValue::InR(Box::new(v))),
                );
                out
            }
            FunctorExpr::Pfin(f) => {
                let mut base = f.enum_with(slots);
                base.sort();
                base.dedup();
                let n = base.len();
                let mut out = Vec::with_capacity(1 << n);
                for mask in 0u64..(1u64 << n) {
                    let members: Vec<CanonValue> = (0..n)
                        .filter(|i| mask & (1 << i) != 0)
                        .map(|i| base[i].clone())
                        .collect();
                    out.push(CanonValue::SetOf(members));
                }
                out
            }
            FunctorExpr::Sig(ops) => {
                let mut out = Vec::new();
                for (name, arity) in ops {
                    let mut tuples: Vec<Vec<CanonValue>> = vec![Vec::new()];
                    for _ in 0..*arity {
                        let mut next = Vec::with_capacity(tuples.len() * slots.len());
                        for tuple in &tuples {
                            for s in slots {
                                let mut t = tuple.clone();
                                t.push(s.clone());
                                next.push(t);
                            }
                        }
                        tuples = next;
                    }
                    out.extend(
                        tuples
                            .into_iter()
                            .map(|args| CanonValue::Op(name.clone(), args)),
                    );
                }
                out
            }
            FunctorExpr::Compose(f, g) => f.enum_with(&g.enum_with(slots)),
        }
    }

    /// Enumerates the canonical values of `F(X)`.
    pub fn enumerate_bounded(&self, carrier: &FiniteSet, limit: u64) -> Result<Vec<CanonValue>> {
        self.size_on(carrier.len() as u128, limit)?;
        let slots: Vec<CanonValue> = carrier
            .iter()
            .map(|x| CanonValue::Var(x.to_string()))
            .collect();
        Ok(self.enum_with(&slots))
    }

    pub fn enumerate(&self, carrier: &FiniteSet) -> Result<Vec<CanonValue>> {
        self.enumerate_bounded(carrier, DEFAULT_SIZE_LIMIT)
    }

    /// `F(X)` as a finite set, labeled by canonical printed forms.
    pub fn apply_set_bounded(&self, carrier: &FiniteSet, limit: u64) -> Result<FiniteSet> {
        let values = self.enumerate_bounded(carrier, limit)?;
        let set = FiniteSet::new(values.iter().map(CanonValue::render));
        debug_assert_eq!(set.len(), values.len(), "canonical printing must be injective");
        Ok(set)
    }

    pub fn apply_set(&self, carrier: &FiniteSet) -> Result<FiniteSet> {
        self.apply_set_bounded(carrier, DEFAULT_SIZE_LIMIT)
    }

    /// Shape check: `slot_ok` decides whether a value may sit in an identity
    /// slot. Composition chains the check through the inner functor.
    pub fn matches_with(&self, v: &CanonValue, slot_ok: &dyn Fn(&CanonValue) -> bool) -> bool {
        match self {
            FunctorExpr::Id => slot_ok(v),
            FunctorExpr::Const(c) => matches!(v, CanonValue::ConstAtom(a) if c.contains(a)),
            FunctorExpr::Product(f, g) => match v {
                CanonValue::Pair(a, b) => f.matches_with(a, slot_ok) && g.matches_with(b, slot_ok),
                _ => false,
            },
            FunctorExpr::Coproduct(f, g) => match v {
                CanonValue::InL(u) => f.matches_with(u, slot_ok),
                CanonValue::InR(u) => g.matches_with(u, slot_ok),
                _ => false,
            },
            FunctorExpr::Pfin(f) => match v {
                CanonValue::SetOf(vs) => {
                    vs.windows(2).all(|w| w[0] < w[1])
                        && vs.iter().all(|u| f.matches_with(u, slot_ok))
                }
                _ => false,
            },
            FunctorExpr::Sig(ops) => match v {
                CanonValue::Op(name, args) => {
                    ops.iter()
                        .any(|(n, arity)| n == name && *arity == args.len())
                        && args.iter().all(slot_ok)
                }
                _ => false,
            },
            FunctorExpr::Compose(f, g) => {
                f.matches_with(v, &|u| g.matches_with(u, slot_ok))
            }
        }
    }

    /// Validity of `v` as an element of `F(X)` for the carrier `X`.
    pub fn validates(&self, v: &CanonValue, carrier: &FiniteSet) -> bool {
        v.is_canonical()
            && self.matches_with(v, &|u| matches!(u, CanonValue::Var(x) if carrier.contains(x)))
    }

    /// Whether the expression denotes the identity functor (composition
    /// normalized away). Such functors have no well-founded terms: slot
    /// recursion on them would not consume the value.
    pub fn is_identity(&self) -> bool {
        match self {
            FunctorExpr::Id => true,
            FunctorExpr::Compose(f, g) => f.is_identity() && g.is_identity(),
            _ => false,
        }
    }

    /// Rebuilds `v` with every identity-slot value passed through `f`.
    /// The result is not canonicalized; callers do that once at the top.
    pub fn map_slots(
        &self,
        v: &CanonValue,
        f: &mut dyn FnMut(&CanonValue) -> Result<CanonValue>,
    ) -> Result<CanonValue> {
        let mismatch = || {
            Error::ShapeMismatch(format!(
                "value `{}` does not match functor `{}`",
                v.render(),
                self.render()
            ))
        };
        match self {
            FunctorExpr::Id => f(v),
            FunctorExpr::Const(c) => match v {
                CanonValue::ConstAtom(a) if c.contains(a) => Ok(v.clone()),
                _ => Err(mismatch()),
            },
            FunctorExpr::Product(l, r) => match v {
                CanonValue::Pair(a, b) => Ok(CanonValue::Pair(
                    Box::new(l.map_slots(a, f)?),
                    Box::new(r.map_slots(b, f)?),
                )),
                _ => Err(mismatch()),
            },
            FunctorExpr::Coproduct(l, r) => match v {
                CanonValue::InL(u) => Ok(CanonValue::InL(Box::new(l.map_slots(u, f)?))),
                CanonValue::InR(u) => Ok(CanonValue::InR(Box::new(r.map_slots(u, f)?))),
                _ => Err(mismatch()),
            },
            FunctorExpr::Pfin(g) => match v {
                CanonValue::SetOf(vs) => Ok(CanonValue::SetOf(
                    vs.iter().map(|u| g.map_slots(u, f)).collect::<Result<_>>()?,
                )),
                _ => Err(mismatch()),
            },
            FunctorExpr::Sig(ops) => match v {
                CanonValue::Op(name, args)
                    if ops
                        .iter()
                        .any(|(n, arity)| n == name && *arity == args.len()) =>
                {
                    Ok(CanonValue::Op(
                        name.clone(),
                        args.iter().map(&mut *f).collect::<Result<_>>()?,
                    ))
                }
                _ => Err(mismatch()),
            },
            FunctorExpr::Compose(outer, inner) => {
                outer.map_slots(v, &mut |u| inner.map_slots(u, f))
            }
        }
    }

    /// The values sitting in the identity slots of `v`, left to right.
    /// For a composed functor these are the slots of the full composite.
    pub fn slot_values<'v>(&self, v: &'v CanonValue) -> Result<Vec<&'v CanonValue>> {
        let mut out = Vec::new();
        self.collect_slots(v, &mut out)?;
        Ok(out)
    }

    fn collect_slots<'v>(&self, v: &'v CanonValue, out: &mut Vec<&'v CanonValue>) -> Result<()> {
        let mismatch = || {
            Error::ShapeMismatch(format!(
                "value `{}` does not match functor `{}`",
                v.render(),
                self.render()
            ))
        };
        match self {
            FunctorExpr::Id => {
                out.push(v);
                Ok(())
            }
            FunctorExpr::Const(c) => match v {
                CanonValue::ConstAtom(a) if c.contains(a) => Ok(()),
                _ => Err(mismatch()),
            },
            FunctorExpr::Product(l, r) => match v {
                CanonValue::Pair(a, b) => {
                    l.collect_slots(a, out)?;
                    r.collect_slots(b, out)
                }
                _ => Err(mismatch()),
            },
            FunctorExpr::Coproduct(l, r) => match v {
                CanonValue::InL(u) => l.collect_slots(u, out),
                CanonValue::InR(u) => r.collect_slots(u, out),
                _ => Err(mismatch()),
            },
            FunctorExpr::Pfin(g) => match v {
                CanonValue::SetOf(vs) => {
                    for u in vs {
                        g.collect_slots(u, out)?;
                    }
                    Ok(())
                }
                _ => Err(mismatch()),
            },
            FunctorExpr::Sig(ops) => match v {
                CanonValue::Op(name, args)
                    if ops
                        .iter()
                        .any(|(n, arity)| n == name && *arity == args.len()) =>
                {
                    out.extend(args.iter());
                    Ok(())
                }
                _ => Err(mismatch()),
            },
            FunctorExpr::Compose(outer, inner) => {
                for u in outer.slot_values(v)? {
                    inner.collect_slots(u, out)?;
                }
                Ok(())
            }
        }
    }

    /// `F(f)` as a function between the enumerated label sets: relabel every
    /// variable through `f`, then re-canonicalize.
    pub fn apply_fun_bounded(&self, f: &FiniteFunction, limit: u64) -> Result<FiniteFunction> {
        let domain_values = self.enumerate_bounded(f.domain(), limit)?;
        let domain = FiniteSet::new(domain_values.iter().map(CanonValue::render));
        let codomain = self.apply_set_bounded(f.codomain(), limit)?;
        let mut mapping = BTreeMap::new();
        for v in &domain_values {
            let image = self
                .map_slots(v, &mut |slot| match slot {
                    CanonValue::Var(x) => Ok(CanonValue::Var(f.apply(x)?.to_string())),
                    other => Err(Error::ShapeMismatch(format!(
                        "expected a variable in an identity slot, got `{}`",
                        other.render()
                    ))),
                })?
                .canonicalize();
            mapping.insert(v.render(), image.render());
        }
        FiniteFunction::new(domain, codomain, mapping)
    }

    pub fn apply_fun(&self, f: &FiniteFunction) -> Result<FiniteFunction> {
        self.apply_fun_bounded(f, DEFAULT_SIZE_LIMIT)
    }

    /// Elaborates an untyped parse tree against this shape. `slot` elaborates
    /// whatever sits in an identity slot. At a coproduct, explicit `inl`/`inr`
    /// tags commit to a branch; untagged values are accepted when exactly one
    /// branch elaborates.
    pub fn elaborate(
        &self,
        raw: &RawValue,
        slot: &dyn Fn(&RawValue) -> Result<CanonValue>,
    ) -> Result<CanonValue> {
        let mismatch = || {
            Error::ShapeMismatch(format!(
                "value {raw:?} does not match functor `{}`",
                self.render()
            ))
        };
        match self {
            FunctorExpr::Id => slot(raw),
            FunctorExpr::Const(c) => match raw {
                RawValue::Atom(a) if c.contains(a) => Ok(CanonValue::ConstAtom(a.clone())),
                _ => Err(mismatch()),
            },
            FunctorExpr::Product(f, g) => match raw {
                RawValue::Pair(a, b) => Ok(CanonValue::Pair(
                    Box::new(f.elaborate(a, slot)?),
                    Box::new(g.elaborate(b, slot)?),
                )),
                _ => Err(mismatch()),
            },
            FunctorExpr::Coproduct(f, g) => {
                if let RawValue::App(tag, args) = raw {
                    if tag == "inl" && args.len() == 1 {
                        return Ok(CanonValue::InL(Box::new(f.elaborate(&args[0], slot)?)));
                    }
                    if tag == "inr" && args.len() == 1 {
                        return Ok(CanonValue::InR(Box::new(g.elaborate(&args[0], slot)?)));
                    }
                }
                match (f.elaborate(raw, slot), g.elaborate(raw, slot)) {
                    (Ok(l), Err(_)) => Ok(CanonValue::InL(Box::new(l))),
                    (Err(_), Ok(r)) => Ok(CanonValue::InR(Box::new(r))),
                    (Ok(_), Ok(_)) => Err(Error::Parse(format!(
                        "value {raw:?} is ambiguous for `{}`; tag it with inl(..) or inr(..)",
                        self.render()
                    ))),
                    (Err(e), Err(_)) => Err(e),
                }
            }
            FunctorExpr::Pfin(f) => match raw {
                RawValue::SetOf(items) => {
                    let mut children: Vec<CanonValue> = items
                        .iter()
                        .map(|r| f.elaborate(r, slot))
                        .collect::<Result<_>>()?;
                    children.sort();
                    children.dedup();
                    Ok(CanonValue::SetOf(children))
                }
                _ => Err(mismatch()),
            },
            FunctorExpr::Sig(ops) => {
                let (name, args): (&str, &[RawValue]) = match raw {
                    RawValue::App(name, args) => (name, args),
                    RawValue::Atom(name) => (name, &[]),
                    _ => return Err(mismatch()),
                };
                if !ops.iter().any(|(n, a)| n == name && *a == args.len()) {
                    return Err(mismatch());
                }
                Ok(CanonValue::Op(
                    name.to_string(),
                    args.iter().map(slot).collect::<Result<_>>()?,
                ))
            }
            FunctorExpr::Compose(f, g) => {
                f.elaborate(raw, &|r| g.elaborate(r, slot))
            }
        }
    }

    /// Parses a value of `F(X)` from text, resolving bare atoms against the
    /// carrier `X`.
    pub fn parse_value(&self, text: &str, carrier: &FiniteSet) -> Result<CanonValue> {
        let raw = RawValue::parse(text)?;
        let value = self.elaborate(&raw, &|r| match r {
            RawValue::Atom(x) if carrier.contains(x) => Ok(CanonValue::Var(x.clone())),
            other => Err(Error::ShapeMismatch(format!(
                "{other:?} is not an atom of the carrier {carrier}"
            ))),
        })?;
        Ok(value.canonicalize())
    }

    /// Grammar: `Id`, `C{a,b}`, `F * G`, `F + G`, `Pf(F)`,
    /// `Sig[(f,2),(c,0)]`, `F . G`, with `.` binding tighter than `*`, and
    /// `*` tighter than `+`. Parentheses group.
    pub fn parse(text: &str) -> Result<FunctorExpr> {
        let mut p = ExprParser {
            text,
            rest: text.trim(),
        };
        let expr = p.sum()?;
        if !p.rest.trim().is_empty() {
            return Err(Error::Parse(format!(
                "unexpected trailing input `{}` in functor `{}`",
                p.rest.trim(),
                text
            )));
        }
        Ok(expr)
    }

    pub fn render(&self) -> String {
        self.render_prec(0)
    }

    // precedence: 0 = coproduct, 1 = product, 2 = composition, 3 = atom
    fn render_prec(&self, parent: u8) -> String {
        let (s, prec) = match self {
            FunctorExpr::Id => ("Id".to_string(), 3),
            FunctorExpr::Const(c) => (format!("C{{{}}}", c.labels().join(",")), 3),
            FunctorExpr::Pfin(f) => (format!("Pf({})", f.render_prec(0)), 3),
            FunctorExpr::Sig(ops) => {
                let body = ops
                    .iter()
                    .map(|(n, a)| format!("({n},{a})"))
                    .collect::<Vec<_>>()
                    .join(",");
                (format!("Sig[{body}]"), 3)
            }
            FunctorExpr::Product(f, g) => (
                format!("{} * {}", f.render_prec(1), g.render_prec(2)),
                1,
            ),
            FunctorExpr::Coproduct(f, g) => (
                format!("{} + {}", f.render_prec(0), g.render_prec(1)),
                0,
            ),
            FunctorExpr::Compose(f, g) => (
                format!("{} . {}", f.render_prec(2), g.render_prec(3)),
                2,
            ),
        };
        if prec < parent {
            format!("({s})")
        } else {
            s
        }
    }
}

impl std::fmt::Display for FunctorExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.render())
    }
}

struct ExprParser<'a> {
    text: &'a str,
    rest: &'a str,
}

impl<'a> ExprParser<'a> {
    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start();
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if let Some(rest) = self.rest.strip_prefix(token) {
            self.rest = rest;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<FunctorExpr> {
        let mut left = self.prod()?;
        while self.eat("+") {
            let right = self.prod()?;
            left = FunctorExpr::coproduct(left, right);
        }
        Ok(left)
    }

    fn prod(&mut self) -> Result<FunctorExpr> {
        let mut left = self.comp()?;
        while self.eat("*") {
            let right = self.comp()?;
            left = FunctorExpr::product(left, right);
        }
        Ok(left)
    }

    fn comp(&mut self) -> Result<FunctorExpr> {
        let mut left = self.atom()?;
        while self.eat(".") {
            let right = self.atom()?;
            left = FunctorExpr::compose(left, right);
        }
        Ok(left)
    }

    fn atom(&mut self) -> Result<FunctorExpr> {
        self.skip_ws();
        if self.eat("(") {
            let inner = self.sum()?;
            if !self.eat(")") {
                return Err(Error::Parse(format!("missing `)` in `{}`", self.text)));
            }
            return Ok(inner);
        }
        if self.eat("Id") {
            return Ok(FunctorExpr::Id);
        }
        if self.eat("Pf") {
            if !self.eat("(") {
                return Err(Error::Parse(format!("expected `(` after Pf in `{}`", self.text)));
            }
            let inner = self.sum()?;
            if !self.eat(")") {
                return Err(Error::Parse(format!("missing `)` in `{}`", self.text)));
            }
            return Ok(FunctorExpr::pfin(inner));
        }
        if self.eat("Sig") {
            if !self.eat("[") {
                return Err(Error::Parse(format!("expected `[` after Sig in `{}`", self.text)));
            }
            let mut ops: Vec<(String, usize)> = Vec::new();
            self.skip_ws();
            if !self.eat("]") {
                loop {
                    if !self.eat("(") {
                        return Err(Error::Parse(format!(
                            "expected `(name,arity)` in signature of `{}`",
                            self.text
                        )));
                    }
                    self.skip_ws();
                    let name_len = self
                        .rest
                        .find(|c: char| c == ',' || c.is_whitespace())
                        .ok_or_else(|| Error::Parse(format!("bad signature in `{}`", self.text)))?;
                    let name = self.rest[..name_len].to_string();
                    if name.is_empty() {
                        return Err(Error::Parse(format!("empty op name in `{}`", self.text)));
                    }
                    self.rest = &self.rest[name_len..];
                    if !self.eat(",") {
                        return Err(Error::Parse(format!("expected `,` in signature of `{}`", self.text)));
                    }
                    self.skip_ws();
                    let digits_len = self
                        .rest
                        .find(|c: char| !c.is_ascii_digit())
                        .unwrap_or(self.rest.len());
                    let arity: usize = self.rest[..digits_len]
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad arity in `{}`", self.text)))?;
                    self.rest = &self.rest[digits_len..];
                    if !self.eat(")") {
                        return Err(Error::Parse(format!("missing `)` in signature of `{}`", self.text)));
                    }
                    ops.push((name, arity));
                    if self.eat(",") {
                        continue;
                    }
                    if self.eat("]") {
                        break;
                    }
                    return Err(Error::Parse(format!(
                        "expected `,` or `]` in signature of `{}`",
                        self.text
                    )));
                }
            }
            let refs: Vec<(&str, usize)> = ops.iter().map(|(n, a)| (n.as_str(), *a)).collect();
            return FunctorExpr::sig(&refs);
        }
        if self.eat("C") {
            self.skip_ws();
            if !self.rest.starts_with('{') {
                return Err(Error::Parse(format!("expected `{{` after C in `{}`", self.text)));
            }
            let close = self
                .rest
                .find('}')
                .ok_or_else(|| Error::Parse(format!("missing `}}` in `{}`", self.text)))?;
            let set = FiniteSet::parse(&self.rest[..=close])?;
            self.rest = &self.rest[close + 1..];
            return Ok(FunctorExpr::Const(set));
        }
        Err(Error::Parse(format!(
            "expected a functor atom at `{}` in `{}`",
            self.rest, self.text
        )))
    }
}

/// Checks the splitting construction behind preservation of nonempty finite
/// intersections, and that the functor image of the intersection square is a
/// pullback.
///
/// `b1: B1 -> B` and `b2: B2 -> B` must be injective with a common codomain
/// and overlapping images. The splittings choose the canonically least
/// element of the intersection carrier.
pub fn check_intersection_preservation(
    functor: &FunctorExpr,
    b1: &FiniteFunction,
    b2: &FiniteFunction,
    limit: u64,
) -> Result<VerificationReport> {
    if b1.codomain() != b2.codomain() {
        return Err(Error::CodomainMismatch(
            b1.codomain().to_string(),
            b2.codomain().to_string(),
        ));
    }
    if !b1.is_injective() {
        return Err(Error::NotInjective("b1".into()));
    }
    if !b2.is_injective() {
        return Err(Error::NotInjective("b2".into()));
    }
    let (carrier, a1, a2) = finset::pullback(b1, b2)?;
    if carrier.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    let t = carrier.labels()[0].clone();
    let a1_t = a1.apply(&t)?.to_string();

    // Splitting of b1: send an image point back, everything else to a1(t).
    let mut inv_b1: BTreeMap<&str, &str> = BTreeMap::new();
    for (y, x) in b1.mapping() {
        inv_b1.insert(x.as_str(), y.as_str());
    }
    let b1_bar = FiniteFunction::new(
        b1.codomain().clone(),
        b1.domain().clone(),
        b1.codomain()
            .iter()
            .map(|x| {
                let y = inv_b1.get(x).copied().unwrap_or(a1_t.as_str());
                (x.to_string(), y.to_string())
            })
            .collect(),
    )?;

    // Splitting of a2: send an image point back, everything else to t.
    let mut inv_a2: BTreeMap<&str, &str> = BTreeMap::new();
    for (y, x) in a2.mapping() {
        inv_a2.insert(x.as_str(), y.as_str());
    }
    let a2_bar = FiniteFunction::new(
        b2.domain().clone(),
        carrier.clone(),
        b2.domain()
            .iter()
            .map(|x| {
                let y = inv_a2.get(x).copied().unwrap_or(t.as_str());
                (x.to_string(), y.to_string())
            })
            .collect(),
    )?;

    let mut report = VerificationReport::new();
    let id_b1 = FiniteFunction::identity(b1.domain());
    let id_a = FiniteFunction::identity(&carrier);
    report.add(
        "b1 splits: b1_bar . b1 = id",
        finset::compose(&b1_bar, b1)? == id_b1,
        String::new(),
    );
    report.add(
        "a2 splits: a2_bar . a2 = id",
        finset::compose(&a2_bar, &a2)? == id_a,
        String::new(),
    );
    report.add(
        "compatibility: a1 . a2_bar = b1_bar . b2",
        finset::compose(&a1, &a2_bar)? == finset::compose(&b1_bar, b2)?,
        String::new(),
    );

    let fb1 = functor.apply_fun_bounded(b1, limit)?;
    let fb2 = functor.apply_fun_bounded(b2, limit)?;
    let fa1 = functor.apply_fun_bounded(&a1, limit)?;
    let fa2 = functor.apply_fun_bounded(&a2, limit)?;
    report.add(
        "image square commutes",
        finset::compose(&fb1, &fa1)? == finset::compose(&fb2, &fa2)?,
        String::new(),
    );

    // Compare against the canonical pullback of the image cospan.
    let (p_carrier, p1, p2) = finset::pullback(&fb1, &fb2)?;
    let mut mediating = BTreeMap::new();
    let mut images_in_carrier = true;
    for v in fa1.domain().iter() {
        let label = finset::pair_label(fa1.apply(v)?, fa2.apply(v)?);
        images_in_carrier &= p_carrier.contains(&label);
        mediating.insert(v.to_string(), label);
    }
    let mediates = if images_in_carrier {
        let u = FiniteFunction::new(fa1.domain().clone(), p_carrier.clone(), mediating)?;
        u.is_bijective()
            && finset::compose(&p1, &u)? == fa1
            && finset::compose(&p2, &u)? == fa2
    } else {
        false
    };
    report.add(
        "image square is a pullback",
        mediates,
        format!(
            "F-image of the intersection has {} elements, canonical pullback has {}",
            fa1.domain().len(),
            p_carrier.len()
        ),
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fs(labels: &[&str]) -> FiniteSet {
        FiniteSet::new(labels.iter().copied())
    }

    fn inclusion(sub: &FiniteSet, sup: &FiniteSet) -> FiniteFunction {
        FiniteFunction::new(
            sub.clone(),
            sup.clone(),
            sub.iter().map(|l| (l.to_string(), l.to_string())).collect(),
        )
        .unwrap()
    }

    #[test]
    fn parse_and_render() {
        let f = FunctorExpr::parse("C{a,b} * Id + C{stop}").unwrap();
        assert_eq!(
            f,
            FunctorExpr::coproduct(
                FunctorExpr::product(FunctorExpr::Const(fs(&["a", "b"])), FunctorExpr::Id),
                FunctorExpr::Const(fs(&["stop"]))
            )
        );
        assert_eq!(f.render(), "C{a,b} * Id + C{stop}");
        let g = FunctorExpr::parse("Pf(Id) . (Id + Id)").unwrap();
        assert_eq!(FunctorExpr::parse(&g.render()).unwrap(), g);
        let s = FunctorExpr::parse("Sig[(f,2),(c,0)]").unwrap();
        assert_eq!(s.render(), "Sig[(f,2),(c,0)]");
        // `.` binds tighter than `*`, `*` tighter than `+`.
        let prec = FunctorExpr::parse("Id + Id * Pf(Id) . Id").unwrap();
        assert_eq!(
            prec,
            FunctorExpr::coproduct(
                FunctorExpr::Id,
                FunctorExpr::product(
                    FunctorExpr::Id,
                    FunctorExpr::compose(FunctorExpr::pfin(FunctorExpr::Id), FunctorExpr::Id)
                )
            )
        );
        assert!(FunctorExpr::parse("Sig[(f,2),(f,1)]").is_err());
    }

    #[test]
    fn powerset_of_two_atoms() {
        let f = FunctorExpr::parse("Pf(Id)").unwrap();
        let out = f.apply_set(&fs(&["a", "b"])).unwrap();
        assert_eq!(out.len(), 4);
        for label in ["{}", "{a}", "{b}", "{a,b}"] {
            assert!(out.contains(label), "missing {label}");
        }
    }

    #[test]
    fn constant_functor_ignores_carrier() {
        let f = FunctorExpr::parse("C{c}").unwrap();
        assert_eq!(f.apply_set(&fs(&["x", "y", "z"])).unwrap(), fs(&["c"]));
        assert_eq!(f.apply_set(&FiniteSet::empty()).unwrap(), fs(&["c"]));
    }

    #[test]
    fn signature_enumeration_on_a_singleton() {
        let f = FunctorExpr::parse("Sig[(f,2),(c,0)]").unwrap();
        let out = f.apply_set(&fs(&["x"])).unwrap();
        assert_eq!(out, fs(&["c", "f(x,x)"]));
    }

    #[test]
    fn size_guard_trips() {
        let f = FunctorExpr::parse("Pf(Pf(Pf(Id)))").unwrap();
        assert!(matches!(
            f.apply_set_bounded(&fs(&["a", "b", "c"]), 1000),
            Err(Error::SizeLimitExceeded { .. })
        ));
    }

    #[test]
    fn apply_fun_preserves_identities() {
        for text in ["Pf(Id)", "C{a} * Id + C{s}", "Sig[(f,2),(c,0)]", "Pf(Id) . Pf(Id)"] {
            let f = FunctorExpr::parse(text).unwrap();
            let x = fs(&["a", "b"]);
            let id = FiniteFunction::identity(&x);
            let fid = f.apply_fun(&id).unwrap();
            assert_eq!(fid, FiniteFunction::identity(&f.apply_set(&x).unwrap()), "{text}");
        }
    }

    #[test]
    fn apply_fun_merges_and_dedups() {
        let f = FunctorExpr::parse("Pf(Id)").unwrap();
        let constant = FiniteFunction::new(
            fs(&["a", "b"]),
            fs(&["c"]),
            [("a", "c"), ("b", "c")]
                .iter()
                .map(|(x, y)| (x.to_string(), y.to_string()))
                .collect(),
        )
        .unwrap();
        let ff = f.apply_fun(&constant).unwrap();
        assert_eq!(ff.apply("{a,b}").unwrap(), "{c}");
        assert_eq!(ff.apply("{}").unwrap(), "{}");
    }

    #[test]
    fn apply_fun_respects_composition() {
        let f = FunctorExpr::parse("Pf(Id) + Id * Id").unwrap();
        let g1 = FiniteFunction::parse("{a,b} -> {c,d} ; a|->c ; b|->c").unwrap();
        let g2 = FiniteFunction::parse("{c,d} -> {e} ; c|->e ; d|->e").unwrap();
        let lhs = f.apply_fun(&finset::compose(&g2, &g1).unwrap()).unwrap();
        let rhs = finset::compose(&f.apply_fun(&g2).unwrap(), &f.apply_fun(&g1).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn composed_functor_evaluates_pointwise() {
        let f = FunctorExpr::parse("Pf(Id) . (C{a} + Id)").unwrap();
        // (C{a} + Id) on {x} has 2 elements; Pf of that has 4.
        assert_eq!(f.apply_set(&fs(&["x"])).unwrap().len(), 4);
        let g = FunctorExpr::parse("C{a} + Id").unwrap();
        let direct = FunctorExpr::pfin(g.clone());
        assert_ne!(direct, f);
        assert_eq!(
            direct.apply_set(&fs(&["x"])).unwrap(),
            f.apply_set(&fs(&["x"])).unwrap()
        );
    }

    #[test]
    fn parse_value_resolves_shapes() {
        let f = FunctorExpr::parse("C{a,b} * Id + C{stop}").unwrap();
        let states = fs(&["x", "y"]);
        let v = f.parse_value("(a, y)", &states).unwrap();
        assert_eq!(v.render(), "inl((a,y))");
        let stop = f.parse_value("stop", &states).unwrap();
        assert_eq!(stop.render(), "inr(stop)");
        assert!(f.parse_value("(a, z)", &states).is_err());
        // Explicit tags resolve ambiguity.
        let amb = FunctorExpr::parse("C{a} + C{a}").unwrap();
        assert!(amb.parse_value("a", &states).is_err());
        assert_eq!(amb.parse_value("inr(a)", &states).unwrap().render(), "inr(a)");
    }

    #[test]
    fn trnkova_identity_square() {
        let f = FunctorExpr::parse("Pf(Id)").unwrap();
        let x = fs(&["a"]);
        let id = FiniteFunction::identity(&x);
        let report = check_intersection_preservation(&f, &id, &id, DEFAULT_SIZE_LIMIT).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn trnkova_overlapping_inclusions() {
        let f = FunctorExpr::parse("Pf(Id)").unwrap();
        let x = fs(&["a", "b", "c"]);
        let b1 = inclusion(&fs(&["a", "b"]), &x);
        let b2 = inclusion(&fs(&["b", "c"]), &x);
        let report = check_intersection_preservation(&f, &b1, &b2, DEFAULT_SIZE_LIMIT).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn trnkova_rejects_disjoint_images() {
        let f = FunctorExpr::parse("Pf(Id)").unwrap();
        let x = fs(&["a", "b"]);
        let b1 = inclusion(&fs(&["a"]), &x);
        let b2 = inclusion(&fs(&["b"]), &x);
        assert!(matches!(
            check_intersection_preservation(&f, &b1, &b2, DEFAULT_SIZE_LIMIT),
            Err(Error::EmptyIntersection)
        ));
    }
}
