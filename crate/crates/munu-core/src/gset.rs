//! Finite groups, group actions, orbits, and the connectedness and width
//! bookkeeping for categories of G-sets.
//!
//! Connected G-sets are exactly the quotients of the group by an equivariant
//! equivalence; those are enumerated through subgroups (the class of the
//! identity), with the equivariance re-checked explicitly rather than
//! assumed. Isomorphism of connected objects is decided by exhaustive
//! equivariant-bijection search, which is feasible at the supported sizes.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::finset::FiniteSet;
use crate::report::VerificationReport;

/// Default bound on the group order for subgroup enumeration.
pub const DEFAULT_GROUP_BOUND: u64 = 10;

/// A finite group given by its Cayley table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    elements: FiniteSet,
    table: BTreeMap<(String, String), String>,
    identity: String,
    inverses: BTreeMap<String, String>,
}

impl FiniteGroup {
    /// Validates the group axioms: totality, associativity, identity, and
    /// inverses.
    pub fn new(elements: FiniteSet, table: BTreeMap<(String, String), String>) -> Result<FiniteGroup> {
        for g in elements.iter() {
            for h in elements.iter() {
                match table.get(&(g.to_string(), h.to_string())) {
                    None => {
                        return Err(Error::InvalidGroup(format!(
                            "product {g} * {h} is missing"
                        )))
                    }
                    Some(k) if !elements.contains(k) => {
                        return Err(Error::InvalidGroup(format!(
                            "product {g} * {h} = {k} is outside the element set"
                        )))
                    }
                    _ => {}
                }
            }
        }
        let mul = |a: &str, b: &str| table[&(a.to_string(), b.to_string())].clone();
        for a in elements.iter() {
            for b in elements.iter() {
                for c in elements.iter() {
                    if mul(&mul(a, b), c) != mul(a, &mul(b, c)) {
                        return Err(Error::InvalidGroup(format!(
                            "associativity fails on ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        let identity = elements
            .iter()
            .find(|e| elements.iter().all(|x| mul(e, x) == x && mul(x, e) == x))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?
            .to_string();
        let mut inverses = BTreeMap::new();
        for g in elements.iter() {
            let inv = elements
                .iter()
                .find(|h| mul(g, h) == identity && mul(h, g) == identity)
                .ok_or_else(|| Error::InvalidGroup(format!("{g} has no inverse")))?;
            inverses.insert(g.to_string(), inv.to_string());
        }
        Ok(FiniteGroup {
            elements,
            table,
            identity,
            inverses,
        })
    }

    /// Parses a Cayley table:
    ///
    /// ```text
    /// elements: {e, a, b}
    /// e: e, a, b
    /// a: a, b, e
    /// b: b, e, a
    /// ```
    ///
    /// Row `g` lists the products `g * x` with `x` running over the elements
    /// in the order of the `elements:` line.
    pub fn parse(text: &str) -> Result<FiniteGroup> {
        let mut order: Vec<String> = Vec::new();
        let mut rows: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("elements:") {
                let listed = FiniteSet::parse(rest.trim())?;
                // Preserve the written order for the columns.
                order = rest
                    .trim()
                    .trim_start_matches('{')
                    .trim_end_matches('}')
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect();
                if order.len() != listed.len() {
                    return Err(Error::InvalidGroup("duplicate elements listed".into()));
                }
            } else if let Some((head, rest)) = line.split_once(':') {
                let row: Vec<String> = rest.split(',').map(|s| s.trim().to_string()).collect();
                rows.insert(head.trim().to_string(), row);
            } else {
                return Err(Error::Parse(format!("cannot parse group line `{line}`")));
            }
        }
        if order.is_empty() {
            return Err(Error::Parse("missing `elements:` line".into()));
        }
        let mut table = BTreeMap::new();
        for g in &order {
            let row = rows
                .get(g)
                .ok_or_else(|| Error::InvalidGroup(format!("missing row for `{g}`")))?;
            if row.len() != order.len() {
                return Err(Error::InvalidGroup(format!(
                    "row for `{g}` has {} entries, expected {}",
                    row.len(),
                    order.len()
                )));
            }
            for (x, gx) in order.iter().zip(row.iter()) {
                table.insert((g.clone(), x.clone()), gx.clone());
            }
        }
        FiniteGroup::new(FiniteSet::new(order), table)
    }

    pub fn elements(&self) -> &FiniteSet {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> &str {
        &self.identity
    }

    pub fn mul(&self, a: &str, b: &str) -> &str {
        &self.table[&(a.to_string(), b.to_string())]
    }

    pub fn inverse(&self, a: &str) -> &str {
        &self.inverses[a]
    }

    /// The symmetric group on `{1..n}` with permutations labeled by their
    /// one-line notation, e.g. `213` for the transposition of 1 and 2.
    pub fn symmetric(n: usize) -> Result<FiniteGroup> {
        let mut perms: Vec<Vec<usize>> = vec![vec![]];
        for k in 0..n {
            let mut next = Vec::new();
            for p in &perms {
                for slot in 0..=k {
                    let mut q = p.clone();
                    q.insert(slot, k);
                    next.push(q);
                }
            }
            perms = next;
        }
        let label = |p: &[usize]| -> String {
            p.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join("")
        };
        let mut table = BTreeMap::new();
        for p in &perms {
            for q in &perms {
                // (p . q)(i) = p(q(i))
                let composite: Vec<usize> = (0..n).map(|i| p[q[i]]).collect();
                table.insert((label(p), label(q)), label(&composite));
            }
        }
        FiniteGroup::new(FiniteSet::new(perms.iter().map(|p| label(p))), table)
    }

    /// The cyclic group of order `n`, elements `0..n` under addition.
    pub fn cyclic(n: usize) -> Result<FiniteGroup> {
        let mut table = BTreeMap::new();
        for a in 0..n {
            for b in 0..n {
                table.insert((a.to_string(), b.to_string()), ((a + b) % n).to_string());
            }
        }
        FiniteGroup::new(FiniteSet::new((0..n).map(|i| i.to_string())), table)
    }
}

/// A finite set with a validated action of a finite group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GAction {
    group: FiniteGroup,
    carrier: FiniteSet,
    action: BTreeMap<(String, String), String>,
}

impl GAction {
    pub fn new(
        group: FiniteGroup,
        carrier: FiniteSet,
        action: BTreeMap<(String, String), String>,
    ) -> Result<GAction> {
        let act = |g: &str, x: &str| -> Result<&String> {
            action
                .get(&(g.to_string(), x.to_string()))
                .ok_or_else(|| Error::InvalidAction(format!("action of {g} on {x} is missing")))
        };
        for g in group.elements.iter() {
            for x in carrier.iter() {
                let gx = act(g, x)?;
                if !carrier.contains(gx) {
                    return Err(Error::InvalidAction(format!(
                        "{g} . {x} = {gx} is outside the carrier"
                    )));
                }
            }
        }
        for x in carrier.iter() {
            if act(group.identity(), x)? != x {
                return Err(Error::InvalidAction(format!("identity moves {x}")));
            }
        }
        for g in group.elements.iter() {
            for h in group.elements.iter() {
                for x in carrier.iter() {
                    let lhs = act(h, act(g, x)?)?;
                    let rhs = act(group.mul(h, g), x)?;
                    if lhs != rhs {
                        return Err(Error::InvalidAction(format!(
                            "h(gx) = (hg)x fails on ({h}, {g}, {x})"
                        )));
                    }
                }
            }
        }
        Ok(GAction {
            group,
            carrier,
            action,
        })
    }

    /// Parses rows `g, x -> x'`.
    pub fn parse(group: &FiniteGroup, text: &str) -> Result<GAction> {
        let mut action = BTreeMap::new();
        let mut carrier: BTreeSet<String> = BTreeSet::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (lhs, rhs) = line
                .split_once("->")
                .ok_or_else(|| Error::Parse(format!("cannot parse action line `{line}`")))?;
            let (g, x) = lhs
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("expected `g, x -> x'` in `{line}`")))?;
            carrier.insert(x.trim().to_string());
            carrier.insert(rhs.trim().to_string());
            action.insert(
                (g.trim().to_string(), x.trim().to_string()),
                rhs.trim().to_string(),
            );
        }
        GAction::new(group.clone(), FiniteSet::new(carrier), action)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn carrier(&self) -> &FiniteSet {
        &self.carrier
    }

    pub fn apply(&self, g: &str, x: &str) -> &str {
        &self.action[&(g.to_string(), x.to_string())]
    }

    /// The action of the group on itself by left multiplication.
    pub fn left_translation(group: &FiniteGroup) -> GAction {
        let action = group
            .elements
            .iter()
            .flat_map(|g| {
                group
                    .elements
                    .iter()
                    .map(move |x| ((g.to_string(), x.to_string()), group.mul(g, x).to_string()))
            })
            .collect();
        GAction {
            group: group.clone(),
            carrier: group.elements.clone(),
            action,
        }
    }

    /// The action fixing every point of the carrier.
    pub fn trivial(group: &FiniteGroup, carrier: FiniteSet) -> GAction {
        let action = group
            .elements
            .iter()
            .flat_map(|g| {
                carrier
                    .iter()
                    .map(move |x| ((g.to_string(), x.to_string()), x.to_string()))
            })
            .collect();
        GAction {
            group: group.clone(),
            carrier,
            action,
        }
    }
}

/// Orbit decomposition of the carrier, each orbit sorted, orbits ordered by
/// least member.
pub fn orbits(a: &GAction) -> Vec<Vec<String>> {
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut out = Vec::new();
    for x in a.carrier.iter() {
        if seen.contains(x) {
            continue;
        }
        let mut orbit: BTreeSet<String> = BTreeSet::new();
        for g in a.group.elements.iter() {
            orbit.insert(a.apply(g, x).to_string());
        }
        seen.extend(orbit.iter().cloned());
        out.push(orbit.into_iter().collect());
    }
    out
}

/// The power of the action: the number of orbits, i.e. of connected summands.
pub fn power(a: &GAction) -> usize {
    orbits(a).len()
}

/// A connected G-set presented as the quotient of the group by an
/// equivariant equivalence, here induced by a subgroup.
#[derive(Debug, Clone)]
pub struct ConnectedObject {
    pub subgroup: Vec<String>,
    pub action: GAction,
    /// Carrier point corresponding to the class of the identity.
    pub identity_class: String,
}

/// The connected objects and their grouping into isomorphism classes.
#[derive(Debug, Clone)]
pub struct ConnectedObjects {
    pub objects: Vec<ConnectedObject>,
    /// Indices into `objects`, one list per isomorphism class.
    pub classes: Vec<Vec<usize>>,
}

fn subgroups(group: &FiniteGroup) -> Vec<Vec<String>> {
    let elements: Vec<&str> = group.elements.iter().collect();
    let n = elements.len();
    let id_pos = elements
        .iter()
        .position(|e| *e == group.identity())
        .expect("identity is an element");
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << n) {
        if mask & (1 << id_pos) == 0 {
            continue;
        }
        let members: Vec<&str> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| elements[i]).collect();
        let closed = members.iter().all(|a| {
            members
                .iter()
                .all(|b| members.contains(&group.mul(a, b)))
                && members.contains(&group.inverse(a))
        });
        if closed {
            out.push(members.into_iter().map(str::to_string).collect());
        }
    }
    out
}

fn is_equivariant(group: &FiniteGroup, related: &dyn Fn(&str, &str) -> bool) -> bool {
    for g in group.elements.iter() {
        for g2 in group.elements.iter() {
            if related(g, g2) {
                for h in group.elements.iter() {
                    if !related(group.mul(h, g), group.mul(h, g2)) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Searches for an equivariant bijection between two actions of one group.
pub fn equivariant_bijection_exists(a: &GAction, b: &GAction) -> bool {
    if a.carrier.len() != b.carrier.len() {
        return false;
    }
    let xs: Vec<&str> = a.carrier.iter().collect();
    let ys: Vec<&str> = b.carrier.iter().collect();

    fn full_check(a: &GAction, b: &GAction, xs: &[&str], ys: &[&str], assignment: &[usize]) -> bool {
        a.group.elements.iter().all(|g| {
            xs.iter().enumerate().all(|(i, x)| {
                let gx = a.apply(g, x);
                let k = xs.iter().position(|x2| *x2 == gx).expect("closed carrier");
                b.apply(g, ys[assignment[i]]) == ys[assignment[k]]
            })
        })
    }

    fn search(
        a: &GAction,
        b: &GAction,
        xs: &[&str],
        ys: &[&str],
        assignment: &mut Vec<usize>,
        used: &mut [bool],
    ) -> bool {
        let i = assignment.len();
        if i == xs.len() {
            return full_check(a, b, xs, ys, assignment);
        }
        'candidate: for (j, y) in ys.iter().enumerate() {
            if used[j] {
                continue;
            }
            // Prune: wherever g maps the new element into the assigned
            // prefix, the candidate must commute with the action.
            for g in a.group.elements.iter() {
                let gx = a.apply(g, xs[i]);
                if let Some(k) = xs[..=i].iter().position(|x| *x == gx) {
                    let image = if k == i { y } else { ys[assignment[k]] };
                    if b.apply(g, y) != image {
                        continue 'candidate;
                    }
                }
            }
            assignment.push(j);
            used[j] = true;
            if search(a, b, xs, ys, assignment, used) {
                return true;
            }
            assignment.pop();
            used[j] = false;
        }
        false
    }

    let mut assignment: Vec<usize> = Vec::new();
    let mut used = vec![false; ys.len()];
    search(a, b, &xs, &ys, &mut assignment, &mut used)
}

/// Enumerates the connected objects of the category of G-sets: all quotients
/// of the group by an equivariant equivalence, grouped into isomorphism
/// classes by exhaustive bijection search.
pub fn connected_objects(group: &FiniteGroup) -> Result<ConnectedObjects> {
    connected_objects_bounded(group, DEFAULT_GROUP_BOUND)
}

pub fn connected_objects_bounded(group: &FiniteGroup, bound: u64) -> Result<ConnectedObjects> {
    if group.order() as u64 > bound {
        return Err(Error::BoundExceeded {
            value: group.order() as u64,
            bound,
        });
    }
    let mut objects = Vec::new();
    for subgroup in subgroups(group) {
        // The induced relation g ~ g' iff g^-1 g' is in the subgroup; checked
        // equivariant rather than assumed.
        let related = |g: &str, g2: &str| -> bool {
            subgroup.contains(&group.mul(group.inverse(g), g2).to_string())
        };
        if !is_equivariant(group, &related) {
            continue;
        }
        // Quotient carrier: cosets labeled by their least member.
        let mut coset_of: BTreeMap<String, String> = BTreeMap::new();
        for g in group.elements.iter() {
            let mut members: Vec<&str> = group
                .elements
                .iter()
                .filter(|g2| related(g, g2))
                .collect();
            members.sort_unstable();
            coset_of.insert(g.to_string(), members[0].to_string());
        }
        let carrier = FiniteSet::new(coset_of.values().cloned());
        let mut action = BTreeMap::new();
        for h in group.elements.iter() {
            for rep in carrier.iter() {
                action.insert(
                    (h.to_string(), rep.to_string()),
                    coset_of[group.mul(h, rep)].clone(),
                );
            }
        }
        let quotient = GAction::new(group.clone(), carrier, action)?;
        let identity_class = coset_of[group.identity()].clone();
        objects.push(ConnectedObject {
            subgroup,
            action: quotient,
            identity_class,
        });
    }
    // Group into isomorphism classes.
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..objects.len() {
        let found = classes.iter_mut().find(|class| {
            equivariant_bijection_exists(&objects[class[0]].action, &objects[i].action)
        });
        match found {
            Some(class) => class.push(i),
            None => classes.push(vec![i]),
        }
    }
    Ok(ConnectedObjects { objects, classes })
}

/// Counts equivariant maps from a connected object into `target`: every map
/// is determined by the image of the identity class, and a candidate image
/// works iff it is fixed by the inducing subgroup.
pub fn hom_count(conn: &ConnectedObject, target: &GAction) -> usize {
    target
        .carrier
        .iter()
        .filter(|x0| conn.subgroup.iter().all(|h| target.apply(h, x0) == *x0))
        .count()
}

/// Brute-force count of equivariant maps, for cross-checking `hom_count`.
pub fn hom_count_brute(source: &GAction, target: &GAction) -> usize {
    let xs: Vec<&str> = source.carrier.iter().collect();
    let ys: Vec<&str> = target.carrier.iter().collect();
    let mut count = 0;
    let mut assignment = vec![0usize; xs.len()];
    loop {
        let equivariant = source.group.elements.iter().all(|g| {
            xs.iter().enumerate().all(|(i, x)| {
                let gx = source.apply(g, x);
                let k = xs.iter().position(|x2| *x2 == gx).expect("closed carrier");
                target.apply(g, ys[assignment[i]]) == ys[assignment[k]]
            })
        });
        if equivariant {
            count += 1;
        }
        // Next assignment in mixed radix.
        let mut pos = 0;
        loop {
            if pos == xs.len() {
                return count;
            }
            assignment[pos] += 1;
            if assignment[pos] < ys.len() {
                break;
            }
            assignment[pos] = 0;
            pos += 1;
        }
    }
}

#[derive(Debug, Clone)]
pub struct WidthReport {
    pub connected_class_count: usize,
    pub class_bound: u128,
    pub report: VerificationReport,
}

/// Checks the finite part of the width bound: the number of connected
/// objects up to isomorphism is at most `2^|G|`, and a connected object has
/// at most `|X|` maps into a sample action `X`.
pub fn width_report(group: &FiniteGroup, samples: &[GAction]) -> Result<WidthReport> {
    let connected = connected_objects(group)?;
    let class_bound = 1u128
        .checked_shl(group.order() as u32)
        .unwrap_or(u128::MAX);
    let mut report = VerificationReport::new();
    report.add(
        "connected classes within 2^|G|",
        (connected.classes.len() as u128) <= class_bound,
        format!("{} classes, bound {}", connected.classes.len(), class_bound),
    );
    for (si, sample) in samples.iter().enumerate() {
        for class in &connected.classes {
            let conn = &connected.objects[class[0]];
            let count = hom_count(conn, sample);
            report.add(
                &format!(
                    "homs from G/{{{}}} into sample {} within |X|",
                    conn.subgroup.join(","),
                    si
                ),
                count <= sample.carrier.len(),
                format!("{count} <= {}", sample.carrier.len()),
            );
        }
    }
    Ok(WidthReport {
        connected_class_count: connected.classes.len(),
        class_bound,
        report,
    })
}
