//! RR: goal-directed search for a chain of substitutions.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use super::subst::{gg_pi, lex_rewrites, subst_box};
use super::{Judgment, ReplaceError, Replacer};
use crate::disambig::{clause_readings, correlated_assignments, isomorphism, ConfigError};
use crate::engine::syntax::print_udrs;
use crate::structure::*;

/// A chain of SUBST steps from a database entry to a new UDRS.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub source: usize,
    /// The source entry, with a fresh index on any ambiguous clause that
    /// had none, so that the result can share it.
    pub source_entry: Udrs,
    pub steps: Vec<Judgment>,
    pub result: Udrs,
}

/// Maps the referents of `goal` to those of `state` by position in aligned
/// universes and by bound variable.
fn referent_alignment(state: &Udrs, goal: &Udrs, labels: &BTreeMap<Label, Label>) -> BTreeMap<Referent, Referent> {
    let mut back = BTreeMap::new();
    for (l, b) in &state.boxes {
        if let Some(gb) = labels.get(l).and_then(|g| goal.boxes.get(g)) {
            for (a, b) in b.universe.iter().zip(&gb.universe) {
                back.insert(b.clone(), a.clone());
            }
        }
    }
    for c in &state.clauses {
        for n in &c.nodes {
            let Some(v) = n.cond.bound_var() else { continue };
            if let Some((_, gn)) = labels.get(&n.label).and_then(|g| goal.component(g)) {
                if let Some(gv) = gn.cond.bound_var() {
                    back.insert(gv.clone(), v.clone());
                }
            }
        }
    }
    back
}

fn translate(b: &DrsBox, back: &BTreeMap<Referent, Referent>) -> DrsBox {
    let r = |x: &Referent| back.get(x).cloned().unwrap_or_else(|| x.clone());
    DrsBox {
        universe: b.universe.iter().map(r).collect(),
        atoms: b
            .atoms
            .iter()
            .map(|a| Atom {
                pred: a.pred.clone(),
                args: a
                    .args
                    .iter()
                    .map(|t| match t {
                        Term::Ref(x) => Term::Ref(r(x)),
                        c => c.clone(),
                    })
                    .collect(),
            })
            .collect(),
    }
}

fn same_box(a: &DrsBox, b: &DrsBox) -> bool {
    let mut x = a.atoms.clone();
    let mut y = b.atoms.clone();
    x.sort();
    y.sort();
    a.universe == b.universe && x == y
}

/// One-step replacements of `state`, aimed at `goal`.
fn candidates(rep: &Replacer, state: &Udrs, goal: &Udrs, fresh: &mut Fresh) -> Vec<(Udrs, Judgment)> {
    let mut out = Vec::new();
    let ordered = isomorphism(state, goal, true, None);
    let shaped = ordered.clone().or_else(|| isomorphism(state, goal, false, None));
    if let Some(iso) = &shaped {
        let back = referent_alignment(state, goal, &iso.labels);
        for (l, b) in &state.boxes {
            let Some(gb) = iso.labels.get(l).and_then(|g| goal.boxes.get(g)) else { continue };
            let target = translate(gb, &back);
            if !same_box(b, &target) {
                if let Ok(step) = subst_box(rep, state, l, &target) {
                    out.push(step);
                }
            }
        }
    }
    if ordered.is_some() {
        return out;
    }
    for c in &state.clauses {
        for e in &c.ord {
            let above = state.resolve_bound(&e.above);
            for n in &c.nodes {
                if n.cond.scope() == &above && state.is_node(&e.below) {
                    if let Ok(step) = gg_pi(rep, state, &n.label, &e.below) {
                        out.push(step);
                    }
                }
            }
        }
    }
    if shaped.is_none() {
        for c in &state.clauses {
            for n in &c.nodes {
                if let Ok(steps) = lex_rewrites(rep, state, &n.label, fresh) {
                    out.extend(steps);
                }
            }
        }
    }
    out
}

fn reached(state: &Udrs, goal: &Udrs) -> bool {
    isomorphism(state, goal, true, Some(&BTreeMap::new())).is_some()
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    rep: &Replacer,
    state: &Udrs,
    goal: &Udrs,
    depth: usize,
    fresh: &mut Fresh,
    seen: &mut HashSet<String>,
    steps: &mut Vec<Judgment>,
) -> Option<Udrs> {
    if reached(state, goal) {
        return Some(state.clone());
    }
    if depth == 0 || !seen.insert(format!("{depth}|{}", print_udrs(state))) {
        return None;
    }
    for (next, j) in candidates(rep, state, goal, fresh) {
        steps.push(j);
        if let Some(done) = dfs(rep, &next, goal, depth - 1, fresh, seen, steps) {
            return Some(done);
        }
        steps.pop();
    }
    None
}

/// Gives each ambiguous clause without an index a fresh one.
fn index_ambiguous(u: &Udrs, fresh: &mut Fresh) -> Result<Udrs, ReplaceError> {
    let closure = implicit_closure(u)?;
    let mut v = u.clone();
    for (ci, c) in u.clauses.iter().enumerate() {
        if c.index.is_none() && clause_readings(c, &closure).len() > 1 {
            v.clauses[ci].index = Some(fresh.index());
        }
    }
    Ok(v)
}

/// Keeps the result coindexed with its source where the two can be
/// disambiguated together; an unambiguous clause may drop its index.
fn transport(source: &Udrs, result: &Udrs) -> Result<Udrs, ReplaceError> {
    let check = |r: &Udrs| {
        let idx: BTreeSet<CorrelationIndex> = source.indices().into_iter().chain(r.indices()).collect();
        correlated_assignments(&[source, r], &idx).map(|_| ())
    };
    match check(result) {
        Ok(()) => return Ok(result.clone()),
        Err(ConfigError::NotSameType(_)) => {}
        Err(e) => return Err(e.into()),
    }
    let closure = implicit_closure(result)?;
    let mut r = result.clone();
    for c in &mut r.clauses {
        if clause_readings(c, &closure).len() <= 1 {
            c.index = None;
        }
    }
    check(&r).map_err(|_| ReplaceError::Transport)?;
    Ok(r)
}

/// Searches for substitutions turning entry `source` into `goal`, up to
/// `budget` steps.
pub fn rr_towards(rep: &Replacer, source: usize, goal: &Udrs, budget: usize) -> Result<Derivation, ReplaceError> {
    let mut fresh = rep.db.fresh();
    fresh.reserve_udrs(goal);
    let start = index_ambiguous(&rep.db.entries[source], &mut fresh)?;
    for depth in 0..=budget {
        let mut seen = HashSet::new();
        let mut steps = Vec::new();
        if let Some(done) = dfs(rep, &start, goal, depth, &mut fresh, &mut seen, &mut steps) {
            let (result, _) = fresh_variant(&done, &mut fresh);
            let result = transport(&start, &result)?;
            return Ok(Derivation {
                source,
                source_entry: start,
                steps,
                result,
            });
        }
    }
    Err(ReplaceError::NoDerivation(budget))
}

/// RR: adds the derived UDRS to the database unless an identical entry
/// is already there.
pub fn rr(db: &Database, d: &Derivation) -> Result<Database, ReplaceError> {
    let mut out = db.clone();
    out.entries[d.source] = d.source_entry.clone();
    out.registry.extend(d.source_entry.indices());
    let duplicate = out.entries.iter().any(|e| {
        e.indices() == d.result.indices() && isomorphism(e, &d.result, true, Some(&BTreeMap::new())).is_some()
    });
    if !duplicate {
        let mut f = out.fresh();
        f.reserve_udrs(&d.result);
        out.push(d.result.clone())?;
        out.commit_fresh(&f);
    }
    Ok(out)
}
