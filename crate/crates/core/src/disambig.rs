//! Total scopings of UDRSs, type-sameness, and coindexed disambiguation.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::structure::*;

/// One disambiguation: a widest-first order of the nodes of every clause,
/// keyed by the clause's upper bound.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Scoping {
    pub per_clause: BTreeMap<Label, Vec<Label>>,
    /// Clauses whose correlated order is not one of their readings. They
    /// are interpreted as falsity.
    pub void: BTreeSet<Label>,
}

impl Scoping {
    pub fn order(&self, upper: &Label) -> Option<&Vec<Label>> {
        self.per_clause.get(upper)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("clauses coindexed with {0} are not of the same type")]
    NotSameType(CorrelationIndex),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// Linear orders of `nodes` in which `a` precedes `b` whenever `b` lies
/// strictly below `a`, in lexicographic order.
pub fn linear_extensions(nodes: &[Label], below: impl Fn(&Label, &Label) -> bool) -> Vec<Vec<Label>> {
    let mut sorted = nodes.to_vec();
    sorted.sort();
    let mut out = Vec::new();
    let mut current = Vec::new();
    let mut used = vec![false; sorted.len()];
    fn go(
        sorted: &[Label],
        below: &dyn Fn(&Label, &Label) -> bool,
        used: &mut [bool],
        current: &mut Vec<Label>,
        out: &mut Vec<Vec<Label>>,
    ) {
        if current.len() == sorted.len() {
            out.push(current.clone());
            return;
        }
        for i in 0..sorted.len() {
            if used[i] {
                continue;
            }
            // Available when no unused node still has to come before it.
            let blocked = (0..sorted.len()).any(|j| j != i && !used[j] && below(&sorted[i], &sorted[j]));
            if blocked {
                continue;
            }
            used[i] = true;
            current.push(sorted[i].clone());
            go(sorted, below, used, current, out);
            current.pop();
            used[i] = false;
        }
    }
    go(&sorted, &below, &mut used, &mut current, &mut out);
    out
}

/// Readings of one clause: orders of its nodes consistent with the closure,
/// restricted to the explicit reading set when the clause has one.
pub fn clause_readings(c: &Clause, closure: &Closure) -> Vec<Vec<Label>> {
    let all = linear_extensions(&c.node_labels(), |a, b| closure.lt(a, b));
    match &c.readings {
        Some(allowed) => all.into_iter().filter(|r| allowed.contains(r)).collect(),
        None => all,
    }
}

/// All readings of every clause, in clause order.
pub fn readings_per_clause(u: &Udrs) -> Result<Vec<Vec<Vec<Label>>>, StructureError> {
    let closure = implicit_closure(u)?;
    Ok(u.clauses.iter().map(|c| clause_readings(c, &closure)).collect())
}

fn product<T: Clone>(choices: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for options in choices {
        let mut next = Vec::with_capacity(out.len() * options.len());
        for prefix in &out {
            for o in options {
                let mut p = prefix.clone();
                p.push(o.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Per-clause choices: a clause left without readings contributes a single
/// void choice.
fn choices(readings: &[Vec<Label>]) -> Vec<Option<Vec<Label>>> {
    if readings.is_empty() {
        vec![None]
    } else {
        readings.iter().cloned().map(Some).collect()
    }
}

fn record(s: &mut Scoping, upper: &Label, choice: Option<Vec<Label>>) {
    match choice {
        Some(r) => {
            s.per_clause.insert(upper.clone(), r);
        }
        None => {
            s.void.insert(upper.clone());
            s.per_clause.insert(upper.clone(), Vec::new());
        }
    }
}

/// Every total scoping of `u`, ordered lexicographically clause by clause.
pub fn enumerate(u: &Udrs) -> Result<Vec<Scoping>, StructureError> {
    let per: Vec<_> = readings_per_clause(u)?.iter().map(|r| choices(r)).collect();
    Ok(product(&per)
        .into_iter()
        .map(|choice| {
            let mut s = Scoping::default();
            for (c, r) in u.clauses.iter().zip(choice) {
                record(&mut s, &c.upper, r);
            }
            s
        })
        .collect())
}

/// Whether `s` orders every clause of `u` consistently with its closure.
pub fn is_consistent(u: &Udrs, s: &Scoping) -> bool {
    let Ok(closure) = implicit_closure(u) else {
        return false;
    };
    u.clauses.iter().all(|c| {
        if s.void.contains(&c.upper) {
            return true;
        }
        let Some(order) = s.order(&c.upper) else {
            return false;
        };
        let mut sorted = order.clone();
        sorted.sort();
        let mut labels = c.node_labels();
        labels.sort();
        if sorted != labels {
            return false;
        }
        let ok = order
            .iter()
            .enumerate()
            .all(|(i, a)| order[i + 1..].iter().all(|b| !closure.lt(a, b)));
        ok && c.readings.as_ref().map_or(true, |r| r.contains(order))
    })
}

/// Kind signature used when matching nodes: the condition kind and, for
/// quantifiers, the determiner.
fn signature(c: &Component) -> (&str, &str) {
    match &c.cond {
        Condition::Quant { quantifier, .. } => ("quant", quantifier.as_str()),
        Condition::Neg { .. } => ("neg", ""),
        Condition::Impl { .. } => ("impl", ""),
    }
}

struct Aligner<'a> {
    u1: &'a Udrs,
    u2: &'a Udrs,
    c1: Option<Closure>,
    c2: Option<Closure>,
    /// When set, box contents must agree; starts from this referent map.
    content: Option<BTreeMap<Referent, Term>>,
    refs: RefCell<BTreeMap<Referent, Term>>,
}

impl Aligner<'_> {
    fn check(&self, map: &BTreeMap<Label, Label>) -> bool {
        if let (Some(c1), Some(c2)) = (&self.c1, &self.c2) {
            let same = map.iter().all(|(a, a2)| {
                map.iter()
                    .all(|(b, b2)| c1.leq(a, b) == c2.leq(a2, b2))
            });
            if !same {
                return false;
            }
        }
        match &self.content {
            None => true,
            Some(pre) => match content_map(self.u1, self.u2, map, pre) {
                Some(r) => {
                    *self.refs.borrow_mut() = r;
                    true
                }
                None => false,
            },
        }
    }

    /// Pairs clause `k` of `u1` (in list order) and continues.
    fn clauses(&self, k: usize, used: &mut BTreeSet<usize>, map: &mut BTreeMap<Label, Label>) -> bool {
        if k == self.u1.clauses.len() {
            return self.check(map);
        }
        let a = &self.u1.clauses[k];
        let candidates: Vec<usize> = match &a.host {
            None => vec![0],
            Some(h) => match map.get(h) {
                Some(h2) => self.u2.hosted_under(h2),
                None => return false,
            },
        };
        for j in candidates {
            if used.contains(&j) {
                continue;
            }
            let b = &self.u2.clauses[j];
            if a.nodes.len() != b.nodes.len() || a.attachments.len() != b.attachments.len() {
                continue;
            }
            used.insert(j);
            let snapshot = map.clone();
            map.insert(a.upper.clone(), b.upper.clone());
            map.insert(a.lower.clone(), b.lower.clone());
            if self.nodes(k, j, 0, &mut vec![false; b.nodes.len()], used, map) {
                return true;
            }
            *map = snapshot;
            used.remove(&j);
        }
        false
    }

    fn nodes(
        &self,
        k: usize,
        j: usize,
        i: usize,
        taken: &mut Vec<bool>,
        used: &mut BTreeSet<usize>,
        map: &mut BTreeMap<Label, Label>,
    ) -> bool {
        let a = &self.u1.clauses[k];
        let b = &self.u2.clauses[j];
        if i == a.nodes.len() {
            return self.attachments(k, j, 0, &mut vec![false; b.attachments.len()], used, map);
        }
        let n1 = &a.nodes[i];
        for (t, n2) in b.nodes.iter().enumerate() {
            if taken[t] || signature(n1) != signature(n2) {
                continue;
            }
            taken[t] = true;
            map.insert(n1.label.clone(), n2.label.clone());
            for (s1, s2) in n1.cond.slots().into_iter().zip(n2.cond.slots()) {
                map.insert(s1.clone(), s2.clone());
            }
            if self.nodes(k, j, i + 1, taken, used, map) {
                return true;
            }
            map.remove(&n1.label);
            for s1 in n1.cond.slots() {
                map.remove(s1);
            }
            taken[t] = false;
        }
        false
    }

    fn attachments(
        &self,
        k: usize,
        j: usize,
        i: usize,
        taken: &mut Vec<bool>,
        used: &mut BTreeSet<usize>,
        map: &mut BTreeMap<Label, Label>,
    ) -> bool {
        let a = &self.u1.clauses[k];
        let b = &self.u2.clauses[j];
        if i == a.attachments.len() {
            return self.clauses(k + 1, used, map);
        }
        for t in 0..b.attachments.len() {
            if taken[t] {
                continue;
            }
            taken[t] = true;
            map.insert(a.attachments[i].clone(), b.attachments[t].clone());
            if self.attachments(k, j, i + 1, taken, used, map) {
                return true;
            }
            map.remove(&a.attachments[i]);
            taken[t] = false;
        }
        false
    }
}

/// Referent map under which every box of `u1` has the content of its
/// image in `u2`. Declared referents correspond by position; referents
/// not declared in `u1` must map through `pre` or stay as they are.
fn content_map(
    u1: &Udrs,
    u2: &Udrs,
    labels: &BTreeMap<Label, Label>,
    pre: &BTreeMap<Referent, Term>,
) -> Option<BTreeMap<Referent, Term>> {
    let mut refs = pre.clone();
    let mut bind = |a: &Referent, b: &Referent| -> bool {
        match refs.get(a) {
            Some(t) => t == &Term::Ref(b.clone()),
            None => {
                refs.insert(a.clone(), Term::Ref(b.clone()));
                true
            }
        }
    };
    for (l1, b1) in &u1.boxes {
        let b2 = u2.boxes.get(labels.get(l1)?)?;
        if b1.universe.len() != b2.universe.len() {
            return None;
        }
        for (a, b) in b1.universe.iter().zip(&b2.universe) {
            if !bind(a, b) {
                return None;
            }
        }
    }
    for c in &u1.clauses {
        for n in &c.nodes {
            if let Some(v1) = n.cond.bound_var() {
                let (_, n2) = u2.component(labels.get(&n.label)?)?;
                if !bind(v1, n2.cond.bound_var()?) {
                    return None;
                }
            }
        }
    }
    let images: BTreeSet<&Term> = refs.values().collect();
    if images.len() != refs.len() {
        return None;
    }
    let subst = |t: &Term| match t {
        Term::Ref(r) => refs.get(r).cloned().unwrap_or_else(|| t.clone()),
        Term::Const(_) => t.clone(),
    };
    for (l1, b1) in &u1.boxes {
        let b2 = &u2.boxes[&labels[l1]];
        let mut a: Vec<Atom> = b1
            .atoms
            .iter()
            .map(|x| Atom {
                pred: x.pred.clone(),
                args: x.args.iter().map(subst).collect(),
            })
            .collect();
        let mut b = b2.atoms.clone();
        a.sort();
        b.sort();
        if a != b {
            return None;
        }
    }
    Some(refs)
}

/// Label and referent correspondence between two UDRSs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Iso {
    pub labels: BTreeMap<Label, Label>,
    pub refs: BTreeMap<Referent, Term>,
}

/// A label bijection preserving clause structure and component kinds.
/// With `compare_order` the subordination closure must correspond too;
/// with `content` every box must have the same content up to the returned
/// referent map, which extends `content`.
pub fn isomorphism(
    u1: &Udrs,
    u2: &Udrs,
    compare_order: bool,
    content: Option<&BTreeMap<Referent, Term>>,
) -> Option<Iso> {
    if u1.clauses.len() != u2.clauses.len() {
        return None;
    }
    let (c1, c2) = if compare_order {
        (Some(implicit_closure(u1).ok()?), Some(implicit_closure(u2).ok()?))
    } else {
        (None, None)
    };
    let al = Aligner {
        u1,
        u2,
        c1,
        c2,
        content: content.cloned(),
        refs: RefCell::new(BTreeMap::new()),
    };
    let mut map = BTreeMap::new();
    map.insert(u1.top.clone(), u2.top.clone());
    let mut used = BTreeSet::new();
    if al.clauses(0, &mut used, &mut map) {
        Some(Iso {
            labels: map,
            refs: al.refs.into_inner(),
        })
    } else {
        None
    }
}

/// A label bijection preserving clause structure, component kinds and,
/// when `compare_order` is set, the subordination closure.
pub fn align(u1: &Udrs, u2: &Udrs, compare_order: bool) -> Option<BTreeMap<Label, Label>> {
    isomorphism(u1, u2, compare_order, None).map(|i| i.labels)
}

/// Isomorphism witnessing that two UDRSs are of the same type: same clause
/// structure, same component kinds and determiners, same subordination.
/// Content of the boxes is not compared.
pub fn same_type(u1: &Udrs, u2: &Udrs) -> Option<BTreeMap<Label, Label>> {
    align(u1, u2, true)
}

/// Clauses carrying one correlation index, as `(entry, clause)` positions.
fn members(entries: &[&Udrs], i: &CorrelationIndex) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (e, u) in entries.iter().enumerate() {
        for (ci, c) in u.clauses.iter().enumerate() {
            if c.index.as_ref() == Some(i) {
                out.push((e, ci));
            }
        }
    }
    out
}

/// Nodes sharing a slot in two clauses are of the same kind.
fn shared_kinds_agree(entries: &[&Udrs], (e1, c1): (usize, usize), (e2, c2): (usize, usize)) -> bool {
    let (a, b) = (&entries[e1].clauses[c1], &entries[e2].clauses[c2]);
    let slots_b = b.slots();
    a.slots().iter().enumerate().all(|(x, s)| {
        match slots_b.iter().position(|t| t == s) {
            Some(y) => signature(&a.nodes[x]).0 == signature(&b.nodes[y]).0,
            None => true,
        }
    })
}

/// Orders over the slots of an index that coindexed clauses must follow.
///
/// Coindexed clauses name their nodes by slot. The slot sets must form a
/// chain under inclusion, nodes sharing a slot must be of the same kind,
/// and clauses with equal slot sets must have the same determiners. Templates are the readings of the clauses with the
/// largest slot set, written as slot sequences.
pub fn templates(
    entries: &[&Udrs],
    i: &CorrelationIndex,
    readings: &[Vec<Vec<Vec<Label>>>],
) -> Result<Vec<Vec<String>>, ConfigError> {
    let ms = members(entries, i);
    let slot_set = |(e, ci): (usize, usize)| -> BTreeSet<String> {
        entries[e].clauses[ci].slots().into_iter().collect()
    };
    let kinds = |(e, ci): (usize, usize)| -> Vec<(String, String)> {
        let mut v: Vec<(String, String)> = entries[e].clauses[ci]
            .nodes
            .iter()
            .map(|n| {
                let (a, b) = signature(n);
                (a.to_string(), b.to_string())
            })
            .collect();
        v.sort();
        v
    };
    for (x, &a) in ms.iter().enumerate() {
        for &b in &ms[x + 1..] {
            let (sa, sb) = (slot_set(a), slot_set(b));
            if sa == sb {
                if kinds(a) != kinds(b) {
                    return Err(ConfigError::NotSameType(i.clone()));
                }
            } else if !sa.is_subset(&sb) && !sb.is_subset(&sa) {
                return Err(ConfigError::NotSameType(i.clone()));
            } else if !shared_kinds_agree(entries, a, b) {
                return Err(ConfigError::NotSameType(i.clone()));
            }
        }
    }
    let largest = ms.iter().map(|&m| slot_set(m).len()).max().unwrap_or(0);
    let mut out = BTreeSet::new();
    for &(e, ci) in &ms {
        let c = &entries[e].clauses[ci];
        if c.nodes.len() != largest {
            continue;
        }
        for r in &readings[e][ci] {
            out.insert(
                r.iter()
                    .map(|l| c.slot_of(c.nodes.iter().position(|n| &n.label == l).unwrap()))
                    .collect::<Vec<_>>(),
            );
        }
    }
    Ok(out.into_iter().collect())
}

/// The order `template` imposes on a clause, if the clause has every
/// slot it needs.
pub fn project(c: &Clause, template: &[String]) -> Vec<Label> {
    let slots = c.slots();
    template
        .iter()
        .filter_map(|s| slots.iter().position(|x| x == s))
        .map(|p| c.nodes[p].label.clone())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrelatedAssignment {
    pub by_index: BTreeMap<CorrelationIndex, Vec<String>>,
    pub by_entry: Vec<Scoping>,
}

/// Every disambiguation of `entries` that respects the indices in `respect`.
/// Clauses carrying other indices, or none, are disambiguated freely.
pub fn correlated_assignments(
    entries: &[&Udrs],
    respect: &BTreeSet<CorrelationIndex>,
) -> Result<Vec<CorrelatedAssignment>, ConfigError> {
    let readings: Vec<Vec<Vec<Vec<Label>>>> = entries
        .iter()
        .map(|u| readings_per_clause(u))
        .collect::<Result<_, _>>()?;
    let present: BTreeSet<CorrelationIndex> = entries.iter().flat_map(|u| u.indices()).collect();
    let indices: Vec<CorrelationIndex> = respect.intersection(&present).cloned().collect();
    let mut template_choices = Vec::new();
    for i in &indices {
        template_choices.push(templates(entries, i, &readings)?);
    }
    // Free clauses: every clause whose index is not respected.
    let mut free = Vec::new();
    let mut free_choices = Vec::new();
    for (e, u) in entries.iter().enumerate() {
        for (ci, c) in u.clauses.iter().enumerate() {
            let bound = c.index.as_ref().map_or(false, |i| indices.contains(i));
            if !bound {
                free.push((e, ci));
                free_choices.push(choices(&readings[e][ci]));
            }
        }
    }
    let mut out = Vec::new();
    for ts in product(&template_choices) {
        let by_index: BTreeMap<CorrelationIndex, Vec<String>> =
            indices.iter().cloned().zip(ts.iter().cloned()).collect();
        for fs in product(&free_choices) {
            let mut by_entry: Vec<Scoping> = vec![Scoping::default(); entries.len()];
            for (&(e, ci), r) in free.iter().zip(&fs) {
                record(&mut by_entry[e], &entries[e].clauses[ci].upper, r.clone());
            }
            for (e, u) in entries.iter().enumerate() {
                for (ci, c) in u.clauses.iter().enumerate() {
                    let Some(t) = c.index.as_ref().and_then(|i| by_index.get(i)) else {
                        continue;
                    };
                    let order = project(c, t);
                    if order.len() != c.nodes.len() || !readings[e][ci].contains(&order) {
                        by_entry[e].void.insert(c.upper.clone());
                    }
                    by_entry[e].per_clause.insert(c.upper.clone(), order);
                }
            }
            out.push(CorrelatedAssignment {
                by_index: by_index.clone(),
                by_entry,
            });
        }
    }
    Ok(out)
}

/// Correlated assignments over a whole database, respecting every index.
pub fn database_assignments(db: &Database) -> Result<Vec<CorrelatedAssignment>, ConfigError> {
    let entries: Vec<&Udrs> = db.entries.iter().collect();
    let all: BTreeSet<CorrelationIndex> = entries.iter().flat_map(|u| u.indices()).collect();
    correlated_assignments(&entries, &all)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::engine::syntax::parse_udrs;
    use crate::structure::tests::{ex15, l};
    use proptest::prelude::*;

    /// Independent count: every permutation, filtered by the closure.
    fn brute_force(nodes: &[Label], lt: impl Fn(&Label, &Label) -> bool) -> BTreeSet<Vec<Label>> {
        fn perms(v: &[Label]) -> Vec<Vec<Label>> {
            if v.is_empty() {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for i in 0..v.len() {
                let mut rest = v.to_vec();
                let x = rest.remove(i);
                for mut p in perms(&rest) {
                    p.insert(0, x.clone());
                    out.push(p);
                }
            }
            out
        }
        perms(nodes)
            .into_iter()
            .filter(|p| {
                (0..p.len()).all(|i| (i + 1..p.len()).all(|j| !lt(&p[i], &p[j])))
            })
            .collect()
    }

    pub fn three_quantifiers(extra_ord: &str) -> Udrs {
        parse_udrs(&format!(
            "(udrs :top t (clause :upper t :lower b
               (comp :label l1 (quant every x :res r1 (drs () ((man x))) :scope s1))
               (comp :label l2 (quant a y :res r2 (drs () ((woman y))) :scope s2))
               (comp :label l3 (quant every z :res r3 (drs () ((book z))) :scope s3))
               (base :label b ((give x y z)))
               (ord {extra_ord})))"
        ))
        .unwrap()
    }

    #[test]
    fn neutral_example_has_two_scopings() {
        let u = ex15();
        let s = enumerate(&u).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].order(&l("top")).unwrap(), &vec![l("l1"), l("l2")]);
        assert_eq!(s[1].order(&l("top")).unwrap(), &vec![l("l2"), l("l1")]);
        assert!(s.iter().all(|x| is_consistent(&u, x)));
    }

    #[test]
    fn forced_order_leaves_one_scoping() {
        let mut u = ex15();
        u.clauses[0].ord.push(OrdEdge::under_scope(&l("l2"), &l("l1")));
        let s = enumerate(&u).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].order(&l("top")).unwrap(), &vec![l("l1"), l("l2")]);
    }

    #[test]
    fn three_nodes_with_and_without_an_edge() {
        let u = three_quantifiers("");
        assert_eq!(enumerate(&u).unwrap().len(), 6);
        let u = three_quantifiers("(leq l2 (scope l1))");
        assert_eq!(enumerate(&u).unwrap().len(), 3);
    }

    #[test]
    fn single_node_clause() {
        let u = parse_udrs(
            "(udrs :top t (clause :upper t :lower b
               (comp :label n (neg :body nb)) (base :label b ((p k))) (ord)))",
        )
        .unwrap();
        assert_eq!(enumerate(&u).unwrap().len(), 1);
    }

    #[test]
    fn same_type_with_fresh_variant_and_different_content() {
        let u = three_quantifiers("(leq l2 (scope l1))");
        let (v, _) = fresh_variant(&u, &mut Fresh::new(0));
        assert!(same_type(&u, &v).is_some());
        let mut w = u.clone();
        w.boxes.get_mut(&l("b")).unwrap().atoms[0].pred = "sell".into();
        let iso = same_type(&u, &w).unwrap();
        assert_eq!(iso[&l("l1")], l("l1"));
        assert_eq!(enumerate(&u).unwrap().len(), enumerate(&w).unwrap().len());
        // A different edge breaks type-sameness.
        let x = three_quantifiers("(leq l3 (scope l1))");
        assert!(same_type(&u, &x).is_none() || enumerate(&x).unwrap().len() == 3);
        let y = three_quantifiers("");
        assert!(same_type(&u, &y).is_none());
    }

    #[test]
    fn different_node_counts_are_not_same_type() {
        let u = ex15();
        let d = parse_udrs(
            "(udrs :top t (clause :upper t :lower b
               (comp :label n (neg :body nb)) (base :label b ((pay-att k))) (ord)))",
        )
        .unwrap();
        assert!(same_type(&u, &d).is_none());
    }

    fn indexed(u: &Udrs, i: &str) -> Udrs {
        let mut u = u.clone();
        u.set_index(Some(CorrelationIndex::new(i)));
        u
    }

    #[test]
    fn coindexing_correlates_and_distinct_indices_multiply() {
        let a = indexed(&ex15(), "i");
        let (b, _) = fresh_variant(&a, &mut Fresh::new(0));
        let all: BTreeSet<_> = [CorrelationIndex::new("i")].into();
        let xs = correlated_assignments(&[&a, &b], &all).unwrap();
        assert_eq!(xs.len(), 2);
        for x in &xs {
            assert!(x.by_entry.iter().all(|s| s.void.is_empty()));
        }
        let c = indexed(&b, "j");
        let all: BTreeSet<_> = [CorrelationIndex::new("i"), CorrelationIndex::new("j")].into();
        assert_eq!(correlated_assignments(&[&a, &c], &all).unwrap().len(), 4);
        // Not respecting the index frees both entries.
        assert_eq!(correlated_assignments(&[&a, &b], &BTreeSet::new()).unwrap().len(), 4);
    }

    #[test]
    fn unambiguous_database_has_one_assignment() {
        let u = parse_udrs(
            "(udrs :top t (clause :upper t :lower b (base :label b ((p k))) (ord)))",
        )
        .unwrap();
        assert_eq!(correlated_assignments(&[&u], &BTreeSet::new()).unwrap().len(), 1);
    }

    #[test]
    fn coindexed_clauses_of_different_kinds_are_rejected() {
        let a = indexed(&ex15(), "i");
        let b = indexed(&three_quantifiers(""), "i");
        let all: BTreeSet<_> = [CorrelationIndex::new("i")].into();
        assert!(matches!(
            correlated_assignments(&[&a, &b], &all),
            Err(ConfigError::NotSameType(_))
        ));
    }

    #[test]
    fn explicit_readings_restrict_enumeration() {
        let mut u = three_quantifiers("");
        let keep: BTreeSet<Vec<Label>> = [
            vec![l("l1"), l("l2"), l("l3")],
            vec![l("l3"), l("l2"), l("l1")],
        ]
        .into();
        u.clauses[0].readings = Some(keep.clone());
        let got: BTreeSet<Vec<Label>> = enumerate(&u)
            .unwrap()
            .into_iter()
            .map(|s| s.per_clause[&l("t")].clone())
            .collect();
        assert_eq!(got, keep);
    }

    /// Random clause of `n` quantifiers with random extra ORD edges that
    /// respect a hidden total order, so the result is always a partial order.
    fn random_clause(n: usize, edges: &[(usize, usize)]) -> Udrs {
        let mut comps = String::new();
        for i in 0..n {
            comps.push_str(&format!(
                "(comp :label n{i} (quant some x{i} :res r{i} (drs () ()) :scope s{i}))"
            ));
        }
        let mut ord = String::new();
        for &(a, b) in edges {
            let (lo, hi) = (a.max(b), a.min(b));
            if lo != hi && lo < n {
                ord.push_str(&format!("(leq n{lo} (scope n{hi}))"));
            }
        }
        parse_udrs(&format!(
            "(udrs :top t (clause :upper t :lower b {comps} (base :label b ()) (ord {ord})))"
        ))
        .unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn enumeration_matches_brute_force(
            n in 1usize..=5,
            edges in proptest::collection::vec((0usize..5, 0usize..5), 0..6),
        ) {
            let u = random_clause(n, &edges);
            let closure = implicit_closure(&u).unwrap();
            let got = enumerate(&u).unwrap();
            prop_assert!(!got.is_empty());
            let orders: Vec<Vec<Label>> = got.iter().map(|s| s.per_clause[&l("t")].clone()).collect();
            let mut sorted = orders.clone();
            sorted.sort();
            prop_assert_eq!(&sorted, &orders);
            let set: BTreeSet<_> = orders.iter().cloned().collect();
            prop_assert_eq!(set.len(), orders.len());
            let expected = brute_force(&u.clauses[0].node_labels(), |a, b| closure.lt(a, b));
            prop_assert_eq!(set, expected);
            for s in &got {
                prop_assert!(is_consistent(&u, s));
            }
        }

        #[test]
        fn coindexing_never_adds_assignments(
            n in 1usize..=4,
            edges in proptest::collection::vec((0usize..4, 0usize..4), 0..4),
        ) {
            let u = random_clause(n, &edges);
            let a = indexed(&u, "i");
            let (b, _) = fresh_variant(&a, &mut Fresh::new(0));
            let c = indexed(&b, "j");
            let all: BTreeSet<_> = [CorrelationIndex::new("i"), CorrelationIndex::new("j")].into();
            let same = correlated_assignments(&[&a, &b], &all).unwrap().len();
            let apart = correlated_assignments(&[&a, &c], &all).unwrap().len();
            prop_assert!(same <= apart);
        }
    }
}
