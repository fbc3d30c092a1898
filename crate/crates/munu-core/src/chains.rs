//! Finite prefixes of the initial-algebra and terminal-coalgebra chains.
//!
//! The initial chain starts at the empty set and iterates the functor with
//! connecting maps `w_{k,k+1}: F^k 0 -> F^{k+1} 0`; the terminal chain starts
//! at a singleton and iterates with `v_{k+1,k}: F^{k+1} 1 -> F^k 1`. Both are
//! computed eagerly to a requested depth. Stage elements of the terminal
//! chain are represented deeply, as values over the single stage-0 atom, so
//! the connecting maps act by truncation.

use crate::algebra::Term;
use crate::error::{Error, Result};
use crate::finset::{FiniteFunction, FiniteSet};
use crate::functor::{FunctorExpr, DEFAULT_SIZE_LIMIT};
use crate::value::{CanonValue, POINT};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Initial,
    Terminal,
}

/// Stages 0..=n of a chain with its connecting maps.
///
/// For the initial direction `links[k]` is `w_{k,k+1}`; for the terminal
/// direction it is `v_{k+1,k}`.
#[derive(Debug, Clone)]
pub struct ChainPrefix {
    pub functor: FunctorExpr,
    pub direction: Direction,
    pub stages: Vec<FiniteSet>,
    pub links: Vec<FiniteFunction>,
}

impl ChainPrefix {
    pub fn depth(&self) -> usize {
        self.stages.len() - 1
    }

    pub fn stage_sizes(&self) -> Vec<usize> {
        self.stages.iter().map(FiniteSet::len).collect()
    }
}

pub fn initial_chain(functor: &FunctorExpr, depth: usize, limit: u64) -> Result<ChainPrefix> {
    let mut stages = vec![FiniteSet::empty()];
    let mut links = Vec::new();
    for k in 0..depth {
        let next = functor.apply_set_bounded(&stages[k], limit)?;
        let link = if k == 0 {
            FiniteFunction::from_empty(next.clone())
        } else {
            functor.apply_fun_bounded(&links[k - 1], limit)?
        };
        stages.push(next);
        links.push(link);
    }
    Ok(ChainPrefix {
        functor: functor.clone(),
        direction: Direction::Initial,
        stages,
        links,
    })
}

pub fn terminal_chain(functor: &FunctorExpr, depth: usize, limit: u64) -> Result<ChainPrefix> {
    let mut stages = vec![FiniteSet::singleton(POINT)];
    let mut links = Vec::new();
    for k in 0..depth {
        let next = functor.apply_set_bounded(&stages[k], limit)?;
        let link = if k == 0 {
            FiniteFunction::to_singleton(next.clone(), POINT)
        } else {
            functor.apply_fun_bounded(&links[k - 1], limit)?
        };
        stages.push(next);
        links.push(link);
    }
    Ok(ChainPrefix {
        functor: functor.clone(),
        direction: Direction::Terminal,
        stages,
        links,
    })
}

/// Least stage `k` whose connecting map is a bijection, if any. At such a
/// stage the chain has converged: for the initial direction the algebra
/// structure is the inverse of that link.
pub fn detect_convergence(chain: &ChainPrefix) -> Option<usize> {
    chain.links.iter().position(FiniteFunction::is_bijective)
}

/// Cuts a value at `depth` layers of the functor shape, replacing whatever
/// sits below the cut by the stage-0 atom, and re-canonicalizing. This is the
/// action of the terminal-chain connecting maps on deep stage elements.
pub fn truncate_at_depth(
    functor: &FunctorExpr,
    value: &CanonValue,
    depth: usize,
) -> Result<CanonValue> {
    Ok(truncate_raw(functor, value, depth)?.canonicalize())
}

fn truncate_raw(functor: &FunctorExpr, value: &CanonValue, depth: usize) -> Result<CanonValue> {
    if depth == 0 {
        return Ok(CanonValue::point());
    }
    if let CanonValue::Var(x) = value {
        if x == POINT {
            // Already cut further up the chain; stays the point.
            return Ok(CanonValue::point());
        }
    }
    functor.map_slots(value, &mut |slot| truncate_raw(functor, slot, depth - 1))
}

/// The depth-`n` projection of a term along the unique map from the initial
/// chain into the terminal one: truncate at `n` layers and collapse the cut
/// boundary to the stage-0 atom.
pub fn u_bar_projection(functor: &FunctorExpr, term: &Term, depth: usize) -> Result<CanonValue> {
    if !term.is_valid_for(functor) {
        return Err(Error::ShapeMismatch(format!(
            "term `{}` is not valid for functor `{}`",
            term.value().render(),
            functor.render()
        )));
    }
    truncate_at_depth(functor, term.value(), depth)
}

/// Checks that a deep stage value is a valid element of stage `depth` of the
/// terminal chain.
pub fn validates_stage(functor: &FunctorExpr, value: &CanonValue, depth: usize) -> bool {
    if depth == 0 {
        return *value == CanonValue::point();
    }
    functor.matches_with(value, &|slot| validates_stage(functor, slot, depth - 1))
}

/// The label of a deep stage value inside the enumerated stage set: rebuild
/// the value shallowly, naming each slot by the label of its own stage
/// element, and print. Deep values order set children structurally while
/// stage labels order them by label string, so the two printed forms can
/// differ; this conversion bridges them.
pub fn stage_label(functor: &FunctorExpr, value: &CanonValue, depth: usize) -> Result<String> {
    if depth == 0 {
        if *value == CanonValue::point() {
            return Ok(POINT.to_string());
        }
        return Err(Error::ShapeMismatch(format!(
            "`{}` is not the stage-0 element",
            value.render()
        )));
    }
    if *value == CanonValue::point() {
        return Err(Error::ShapeMismatch(
            "the stage-0 atom cannot appear above depth 0".into(),
        ));
    }
    let shallow = functor.map_slots(value, &mut |slot| {
        Ok(CanonValue::Var(stage_label(functor, slot, depth - 1)?))
    })?;
    Ok(shallow.canonicalize().render())
}

/// Chain helper shared by tests and the CLI: stage sizes only, as
/// `(depth, size)` rows.
pub fn size_table(chain: &ChainPrefix) -> Vec<(usize, usize)> {
    chain
        .stages
        .iter()
        .enumerate()
        .map(|(k, s)| (k, s.len()))
        .collect()
}

pub fn initial_chain_default(functor: &FunctorExpr, depth: usize) -> Result<ChainPrefix> {
    initial_chain(functor, depth, DEFAULT_SIZE_LIMIT)
}

pub fn terminal_chain_default(functor: &FunctorExpr, depth: usize) -> Result<ChainPrefix> {
    terminal_chain(functor, depth, DEFAULT_SIZE_LIMIT)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finset;

    fn f(text: &str) -> FunctorExpr {
        FunctorExpr::parse(text).unwrap()
    }

    #[test]
    fn powerset_initial_chain_sizes() {
        let chain = initial_chain_default(&f("Pf(Id)"), 3).unwrap();
        assert_eq!(chain.stage_sizes(), vec![0, 1, 2, 4]);
    }

    #[test]
    fn powerset_terminal_chain_sizes() {
        let chain = terminal_chain_default(&f("Pf(Id)"), 3).unwrap();
        assert_eq!(chain.stage_sizes(), vec![1, 2, 4, 16]);
    }

    #[test]
    fn constant_functor_converges_immediately() {
        let init = initial_chain_default(&f("C{a}"), 4).unwrap();
        assert_eq!(init.stage_sizes(), vec![0, 1, 1, 1, 1]);
        assert!(init.links[1].is_bijective());
        assert_eq!(detect_convergence(&init), Some(1));

        let term = terminal_chain_default(&f("C{a}"), 3).unwrap();
        assert_eq!(term.stage_sizes(), vec![1, 1, 1, 1]);
        assert!(term.links[1].is_bijective());
        // v_{1,0}: {a} -> {•} is already a bijection.
        assert_eq!(detect_convergence(&term), Some(0));
    }

    #[test]
    fn id_free_functor_converges_quickly() {
        let chain = initial_chain_default(&f("C{a,b} + C{x} * C{y}"), 3).unwrap();
        assert_eq!(detect_convergence(&chain), Some(1));
    }

    #[test]
    fn one_letter_stream_chain_sizes() {
        let stream = f("C{s} * Id + C{stop}");
        let init = initial_chain_default(&stream, 3).unwrap();
        assert_eq!(init.stage_sizes(), vec![0, 1, 2, 3]);
        let term = terminal_chain_default(&stream, 3).unwrap();
        assert_eq!(term.stage_sizes(), vec![1, 2, 3, 4]);
    }

    #[test]
    fn powerset_keeps_growing() {
        let chain = initial_chain_default(&f("Pf(Id)"), 5).unwrap();
        assert_eq!(detect_convergence(&chain), None);
    }

    #[test]
    fn links_cohere_with_functor_application() {
        for text in ["Pf(Id)", "C{a,b} * Id + C{stop}"] {
            let functor = f(text);
            let chain = terminal_chain_default(&functor, 3).unwrap();
            for k in 0..chain.links.len() - 1 {
                let expected = functor.apply_fun(&chain.links[k]).unwrap();
                assert_eq!(chain.links[k + 1], expected, "{text} link {k}");
            }
            let init = initial_chain_default(&functor, 3).unwrap();
            for k in 0..init.links.len() - 1 {
                let expected = functor.apply_fun(&init.links[k]).unwrap();
                assert_eq!(init.links[k + 1], expected, "{text} init link {k}");
            }
        }
    }

    #[test]
    fn truncation_of_shallow_term_is_identity_embedding() {
        let functor = f("Pf(Id)");
        let t = Term::parse(&functor, "{{}}").unwrap();
        let v = u_bar_projection(&functor, &t, 2).unwrap();
        assert_eq!(v.render(), "{{}}");
        assert!(validates_stage(&functor, &v, 2));
        // Depth 0 collapses everything to the point.
        assert_eq!(u_bar_projection(&functor, &t, 0).unwrap(), CanonValue::point());
    }

    #[test]
    fn truncation_squares_commute() {
        let functor = f("Pf(Id)");
        for text in ["{}", "{{}}", "{{},{{}}}", "{{{}},{}}"] {
            let t = Term::parse(&functor, text).unwrap();
            for n in 0..4 {
                let deeper = u_bar_projection(&functor, &t, n + 1).unwrap();
                let cut = truncate_at_depth(&functor, &deeper, n).unwrap();
                let direct = u_bar_projection(&functor, &t, n).unwrap();
                assert_eq!(cut, direct, "term {text} depth {n}");
            }
        }
    }

    #[test]
    fn deep_stage_values_land_in_the_enumerated_stages() {
        let functor = f("Pf(Id)");
        let chain = terminal_chain_default(&functor, 3).unwrap();
        let t = Term::parse(&functor, "{{},{{}}}").unwrap();
        for n in 0..=3 {
            let v = u_bar_projection(&functor, &t, n).unwrap();
            let label = stage_label(&functor, &v, n).unwrap();
            assert!(
                chain.stages[n].contains(&label),
                "{label} not in stage {n}"
            );
        }
        // The connecting maps act on labels as truncation acts on values.
        for n in 1..=3 {
            let deep = u_bar_projection(&functor, &t, n).unwrap();
            let label = stage_label(&functor, &deep, n).unwrap();
            let cut = truncate_at_depth(&functor, &deep, n - 1).unwrap();
            assert_eq!(
                chain.links[n - 1].apply(&label).unwrap(),
                stage_label(&functor, &cut, n - 1).unwrap()
            );
        }
    }

    #[test]
    fn empty_stage_zero_link_is_empty_map() {
        let chain = initial_chain_default(&f("Pf(Id)"), 1).unwrap();
        assert!(chain.links[0].domain().is_empty());
        assert_eq!(chain.links[0].codomain(), &chain.stages[1]);
        let term = terminal_chain_default(&f("Pf(Id)"), 1).unwrap();
        assert_eq!(
            term.links[0],
            finset::FiniteFunction::to_singleton(term.stages[1].clone(), POINT)
        );
    }
}
