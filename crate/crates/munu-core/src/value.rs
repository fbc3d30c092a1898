//! Canonical structured values.
//!
//! A [`CanonValue`] is the universal element shape produced by applying a
//! functor expression to a finite set: variables name carrier atoms, and the
//! remaining node kinds mirror the functor grammar. `SetOf` children are kept
//! sorted under the derived total order and duplicate-free; that invariant is
//! the extensional quotient for the finite-power-set constructor.

use std::fmt;

use crate::error::{Error, Result};

/// The atom standing for the unique element of stage 0 of the
/// terminal-coalgebra chain.
pub const POINT: &str = "•";

/// A canonical element of `F(X)`, with `Var` nodes naming atoms of `X`.
///
/// The derived `Ord` (variant order, then fields) is the canonical total
/// order used for sorting `SetOf` children and everywhere a deterministic
/// choice of element is needed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CanonValue {
    Var(String),
    ConstAtom(String),
    Pair(Box<CanonValue>, Box<CanonValue>),
    InL(Box<CanonValue>),
    InR(Box<CanonValue>),
    SetOf(Vec<CanonValue>),
    Op(String, Vec<CanonValue>),
}

impl CanonValue {
    pub fn point() -> Self {
        CanonValue::Var(POINT.to_string())
    }

    /// Sorts and deduplicates every `SetOf` node, bottom-up.
    pub fn canonicalize(self) -> Self {
        match self {
            v @ (CanonValue::Var(_) | CanonValue::ConstAtom(_)) => v,
            CanonValue::Pair(a, b) => {
                CanonValue::Pair(Box::new(a.canonicalize()), Box::new(b.canonicalize()))
            }
            CanonValue::InL(v) => CanonValue::InL(Box::new(v.canonicalize())),
            CanonValue::InR(v) => CanonValue::InR(Box::new(v.canonicalize())),
            CanonValue::SetOf(vs) => {
                let mut vs: Vec<CanonValue> =
                    vs.into_iter().map(CanonValue::canonicalize).collect();
                vs.sort();
                vs.dedup();
                CanonValue::SetOf(vs)
            }
            CanonValue::Op(name, args) => CanonValue::Op(
                name,
                args.into_iter().map(CanonValue::canonicalize).collect(),
            ),
        }
    }

    pub fn is_canonical(&self) -> bool {
        match self {
            CanonValue::Var(_) | CanonValue::ConstAtom(_) => true,
            CanonValue::Pair(a, b) => a.is_canonical() && b.is_canonical(),
            CanonValue::InL(v) | CanonValue::InR(v) => v.is_canonical(),
            CanonValue::SetOf(vs) => {
                vs.windows(2).all(|w| w[0] < w[1]) && vs.iter().all(CanonValue::is_canonical)
            }
            CanonValue::Op(_, args) => args.iter().all(CanonValue::is_canonical),
        }
    }

    /// Replaces every `Var` node by `subst(atom)`. The result is canonicalized.
    pub fn substitute(&self, subst: &dyn Fn(&str) -> CanonValue) -> CanonValue {
        self.substitute_raw(subst).canonicalize()
    }

    fn substitute_raw(&self, subst: &dyn Fn(&str) -> CanonValue) -> CanonValue {
        match self {
            CanonValue::Var(x) => subst(x),
            CanonValue::ConstAtom(c) => CanonValue::ConstAtom(c.clone()),
            CanonValue::Pair(a, b) => CanonValue::Pair(
                Box::new(a.substitute_raw(subst)),
                Box::new(b.substitute_raw(subst)),
            ),
            CanonValue::InL(v) => CanonValue::InL(Box::new(v.substitute_raw(subst))),
            CanonValue::InR(v) => CanonValue::InR(Box::new(v.substitute_raw(subst))),
            CanonValue::SetOf(vs) => {
                CanonValue::SetOf(vs.iter().map(|v| v.substitute_raw(subst)).collect())
            }
            CanonValue::Op(name, args) => CanonValue::Op(
                name.clone(),
                args.iter().map(|v| v.substitute_raw(subst)).collect(),
            ),
        }
    }

    /// Renames variables through a total mapping, failing on unmapped atoms.
    pub fn rename(&self, mapping: &dyn Fn(&str) -> Option<String>) -> Result<CanonValue> {
        let renamed = self.rename_raw(mapping)?;
        Ok(renamed.canonicalize())
    }

    fn rename_raw(&self, mapping: &dyn Fn(&str) -> Option<String>) -> Result<CanonValue> {
        Ok(match self {
            CanonValue::Var(x) => CanonValue::Var(
                mapping(x).ok_or_else(|| Error::UnknownState(x.clone()))?,
            ),
            CanonValue::ConstAtom(c) => CanonValue::ConstAtom(c.clone()),
            CanonValue::Pair(a, b) => CanonValue::Pair(
                Box::new(a.rename_raw(mapping)?),
                Box::new(b.rename_raw(mapping)?),
            ),
            CanonValue::InL(v) => CanonValue::InL(Box::new(v.rename_raw(mapping)?)),
            CanonValue::InR(v) => CanonValue::InR(Box::new(v.rename_raw(mapping)?)),
            CanonValue::SetOf(vs) => CanonValue::SetOf(
                vs.iter()
                    .map(|v| v.rename_raw(mapping))
                    .collect::<Result<_>>()?,
            ),
            CanonValue::Op(name, args) => CanonValue::Op(
                name.clone(),
                args.iter()
                    .map(|v| v.rename_raw(mapping))
                    .collect::<Result<_>>()?,
            ),
        })
    }

    /// Variables in preorder, with repetitions.
    pub fn vars_in_order(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            CanonValue::Var(x) => out.push(x),
            CanonValue::ConstAtom(_) => {}
            CanonValue::Pair(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            CanonValue::InL(v) | CanonValue::InR(v) => v.collect_vars(out),
            CanonValue::SetOf(vs) | CanonValue::Op(_, vs) => {
                for v in vs {
                    v.collect_vars(out);
                }
            }
        }
    }

    /// Canonical printed form. Injective on valid values of a fixed shape:
    /// variables and constant atoms print bare, pairs as `(a,b)`, coproduct
    /// injections as `inl(v)` / `inr(v)`, sets as `{v1,v2}` in canonical
    /// order, and operations as `f(v1,..,vn)` (nullary ones as a bare name).
    pub fn render(&self) -> String {
        let mut s = String::new();
        self.render_into(&mut s);
        s
    }

    fn render_into(&self, out: &mut String) {
        match self {
            CanonValue::Var(x) | CanonValue::ConstAtom(x) => out.push_str(x),
            CanonValue::Pair(a, b) => {
                out.push('(');
                a.render_into(out);
                out.push(',');
                b.render_into(out);
                out.push(')');
            }
            CanonValue::InL(v) => {
                out.push_str("inl(");
                v.render_into(out);
                out.push(')');
            }
            CanonValue::InR(v) => {
                out.push_str("inr(");
                v.render_into(out);
                out.push(')');
            }
            CanonValue::SetOf(vs) => {
                out.push('{');
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    v.render_into(out);
                }
                out.push('}');
            }
            CanonValue::Op(name, args) => {
                out.push_str(name);
                if !args.is_empty() {
                    out.push('(');
                    for (i, v) in args.iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        v.render_into(out);
                    }
                    out.push(')');
                }
            }
        }
    }
}

impl fmt::Display for CanonValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Untyped parse tree for the value syntax. Whether an atom is a variable, a
/// constant, or a nullary operation is decided later against a functor shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawValue {
    Atom(String),
    SetOf(Vec<RawValue>),
    Pair(Box<RawValue>, Box<RawValue>),
    App(String, Vec<RawValue>),
}

impl RawValue {
    pub fn parse(text: &str) -> Result<RawValue> {
        let mut parser = RawParser {
            chars: text.char_indices().peekable(),
            text,
        };
        let value = parser.value()?;
        parser.skip_ws();
        if let Some(&(pos, _)) = parser.chars.peek() {
            return Err(Error::Parse(format!(
                "unexpected trailing input at byte {pos} in `{text}`"
            )));
        }
        Ok(value)
    }
}

struct RawParser<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    text: &'a str,
}

impl<'a> RawParser<'a> {
    fn skip_ws(&mut self) {
        while matches!(self.chars.peek(), Some(&(_, c)) if c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn eat(&mut self, expected: char) -> Result<()> {
        self.skip_ws();
        match self.chars.next() {
            Some((_, c)) if c == expected => Ok(()),
            other => Err(Error::Parse(format!(
                "expected `{expected}` in `{}`, found {other:?}",
                self.text
            ))),
        }
    }

    fn value(&mut self) -> Result<RawValue> {
        self.skip_ws();
        match self.chars.peek() {
            Some(&(_, '{')) => {
                self.chars.next();
                let mut items = Vec::new();
                self.skip_ws();
                if matches!(self.chars.peek(), Some(&(_, '}'))) {
                    self.chars.next();
                    return Ok(RawValue::SetOf(items));
                }
                loop {
                    items.push(self.value()?);
                    self.skip_ws();
                    match self.chars.next() {
                        Some((_, ',')) => continue,
                        Some((_, '}')) => break,
                        other => {
                            return Err(Error::Parse(format!(
                                "expected `,` or `}}` in `{}`, found {other:?}",
                                self.text
                            )))
                        }
                    }
                }
                Ok(RawValue::SetOf(items))
            }
            Some(&(_, '(')) => {
                self.chars.next();
                let first = self.value()?;
                self.eat(',')?;
                let second = self.value()?;
                self.eat(')')?;
                Ok(RawValue::Pair(Box::new(first), Box::new(second)))
            }
            Some(_) => {
                let atom = self.atom()?;
                self.skip_ws();
                if matches!(self.chars.peek(), Some(&(_, '('))) {
                    self.chars.next();
                    let mut args = Vec::new();
                    self.skip_ws();
                    if matches!(self.chars.peek(), Some(&(_, ')'))) {
                        self.chars.next();
                        return Ok(RawValue::App(atom, args));
                    }
                    loop {
                        args.push(self.value()?);
                        self.skip_ws();
                        match self.chars.next() {
                            Some((_, ',')) => continue,
                            Some((_, ')')) => break,
                            other => {
                                return Err(Error::Parse(format!(
                                    "expected `,` or `)` in `{}`, found {other:?}",
                                    self.text
                                )))
                            }
                        }
                    }
                    Ok(RawValue::App(atom, args))
                } else {
                    Ok(RawValue::Atom(atom))
                }
            }
            None => Err(Error::Parse(format!("unexpected end of `{}`", self.text))),
        }
    }

    fn atom(&mut self) -> Result<String> {
        let mut atom = String::new();
        while let Some(&(_, c)) = self.chars.peek() {
            if "{}(),;|".contains(c) || c.is_whitespace() {
                break;
            }
            atom.push(c);
            self.chars.next();
        }
        if atom.is_empty() {
            Err(Error::Parse(format!("expected an atom in `{}`", self.text)))
        } else {
            Ok(atom)
        }
    }
}
