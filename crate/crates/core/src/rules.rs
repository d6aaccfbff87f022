//! Inference rules over UDRS databases: NeU, DET, AI and DIFF, and the
//! polarity marking that guards DET and substitution.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::disambig::{clause_readings, enumerate, isomorphism, linear_extensions};
use crate::modelsem::{Mono, Oracle, OracleError, QuantifierTable};
use crate::structure::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Positive,
    Negative,
    Undefined,
}

impl Polarity {
    /// Polarity of an argument position with monotonicity `m`.
    pub fn apply(self, m: Mono) -> Polarity {
        match (self, m) {
            (Polarity::Undefined, _) | (_, Mono::None) => Polarity::Undefined,
            (p, Mono::Up) => p,
            (Polarity::Positive, Mono::Down) => Polarity::Negative,
            (Polarity::Negative, Mono::Down) => Polarity::Positive,
        }
    }

    pub fn sign(self) -> &'static str {
        match self {
            Polarity::Positive => "+",
            Polarity::Negative => "-",
            Polarity::Undefined => "?",
        }
    }
}

pub type PolarityMap = BTreeMap<Label, Polarity>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("{0} does not have positive polarity")]
    Guard(Label),
    #[error("{0} is not a universal condition")]
    NotUniversal(Label),
    #[error("{0} is not a node of the top clause")]
    NotTopClause(Label),
    #[error("no embedding of the restrictor of {0}")]
    NoEmbedding(Label),
    #[error("indices {0} and {1} differ and the readings are not equivalent")]
    SideCondition(String, String),
    #[error("the two UDRSs differ in more than their orderings")]
    StructuralMismatch,
    #[error("{0} is ambiguous")]
    Ambiguous(Label),
    #[error("intersected ordering admits readings of neither input")]
    OverGenerates,
    #[error("not the negation of a single clause")]
    NotNegation,
    #[error("the negated UDRS is neither coindexed with the other nor unambiguous")]
    Uncorrelated,
    #[error("the structural difference is falsity: the database is inconsistent")]
    Inconsistent,
    #[error("result violates well-formedness: {0}")]
    Invalid(#[from] Violation),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// Monotonicity of a component in its scope argument.
pub fn scope_mono(c: &Condition, table: &QuantifierTable) -> Result<Mono, OracleError> {
    Ok(match c {
        Condition::Quant { quantifier, .. } => table.get(quantifier)?.scope,
        Condition::Neg { .. } => Mono::Down,
        Condition::Impl { .. } => Mono::Up,
    })
}

/// Monotonicity of a component in the argument at `slot`.
pub fn slot_mono(c: &Condition, slot: &Label, table: &QuantifierTable) -> Result<Mono, OracleError> {
    Ok(match c {
        Condition::Quant {
            quantifier, res, ..
        } => {
            let q = table.get(quantifier)?;
            if slot == res {
                q.restrictor
            } else {
                q.scope
            }
        }
        Condition::Neg { .. } => Mono::Down,
        Condition::Impl { ante, .. } => {
            if slot == ante {
                Mono::Down
            } else {
                Mono::Up
            }
        }
    })
}

/// Polarity of every label, by the path rule: a node's polarity is fixed
/// by the clause-mates that dominate it in every reading, and undefined
/// when a clause-mate that only may dominate it is downward monotone (or
/// when a dominating one is not monotone at all).
pub fn polarity(u: &Udrs, table: &QuantifierTable) -> Result<PolarityMap, OracleError> {
    let closure = implicit_closure(u)?;
    let mut map = PolarityMap::new();
    map.insert(u.top.clone(), Polarity::Positive);
    for c in &u.clauses {
        let p = match &c.host {
            None => Polarity::Positive,
            Some(h) => map.get(h).copied().unwrap_or(Polarity::Undefined),
        };
        map.insert(c.upper.clone(), p);
        for a in &c.attachments {
            map.insert(a.clone(), p);
        }
        let monos: Vec<Mono> = c
            .nodes
            .iter()
            .map(|n| scope_mono(&n.cond, table))
            .collect::<Result<_, _>>()?;
        for n in &c.nodes {
            let mut pol = p;
            for (m, &mono) in c.nodes.iter().zip(&monos) {
                if m.label == n.label || closure.lt(&m.label, &n.label) {
                    continue;
                }
                let forced = closure.lt(&n.label, &m.label);
                pol = match (forced, mono) {
                    (_, Mono::None) => Polarity::Undefined,
                    (true, mono) => pol.apply(mono),
                    (false, Mono::Down) => Polarity::Undefined,
                    (false, Mono::Up) => pol,
                };
            }
            map.insert(n.label.clone(), pol);
            for s in n.cond.slots() {
                map.insert(s.clone(), pol.apply(slot_mono(&n.cond, s, table)?));
            }
        }
        let lower = monos.iter().fold(p, |acc, &m| acc.apply(m));
        map.insert(c.lower.clone(), lower);
    }
    Ok(map)
}

/// NeU: adds referents to the top universe.
pub fn neu(u: &Udrs, refs: &[Referent]) -> Result<Udrs, StructureError> {
    let declared: BTreeSet<Referent> = u.declared_referents().into_iter().collect();
    let mut out = u.clone();
    let mut added = BTreeSet::new();
    for r in refs {
        if declared.contains(r) || !added.insert(r.clone()) {
            return Err(StructureError::RefCollision(r.clone()));
        }
        out.boxes.get_mut(&u.top).unwrap().universe.push(r.clone());
    }
    Ok(out)
}

/// Atoms whose position does not depend on any disambiguation: the top
/// box, attachments of the top clause, and the lower bound of a top
/// clause without nodes.
pub fn definite_atoms(u: &Udrs) -> Vec<Atom> {
    let c = u.top_clause();
    let mut out = u.boxes[&u.top].atoms.clone();
    for a in &c.attachments {
        out.extend(u.boxes[a].atoms.iter().cloned());
    }
    if c.nodes.is_empty() {
        out.extend(u.boxes[&c.lower].atoms.iter().cloned());
    }
    out
}

/// A hosted clause of the embedded restrictor, matched against a whole entry.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ClauseMatch {
    pub upper: Label,
    pub entry: usize,
    pub clause_index: Option<CorrelationIndex>,
    pub entry_index: Option<CorrelationIndex>,
}

/// Condition-preserving map of a restrictor into the database.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Embedding {
    pub refs: BTreeMap<Referent, Term>,
    pub labels: BTreeMap<Label, Label>,
    pub clauses: Vec<ClauseMatch>,
}

fn unify(
    src: &Atom,
    fact: &Atom,
    mappable: &BTreeSet<Referent>,
    refs: &mut BTreeMap<Referent, Term>,
) -> bool {
    if src.pred != fact.pred || src.args.len() != fact.args.len() {
        return false;
    }
    for (s, t) in src.args.iter().zip(&fact.args) {
        match s {
            Term::Ref(r) if mappable.contains(r) => match refs.get(r) {
                Some(img) if img != t => return false,
                Some(_) => {}
                None => {
                    // One-to-one on the mapped referents.
                    if refs.values().any(|v| v == t) {
                        return false;
                    }
                    refs.insert(r.clone(), t.clone());
                }
            },
            _ => {
                if s != t {
                    return false;
                }
            }
        }
    }
    true
}

fn embed_atoms(
    atoms: &[Atom],
    facts: &[Atom],
    mappable: &BTreeSet<Referent>,
    refs: &mut BTreeMap<Referent, Term>,
    out: &mut BTreeSet<BTreeMap<Referent, Term>>,
) {
    let Some((first, rest)) = atoms.split_first() else {
        out.insert(refs.clone());
        return;
    };
    for f in facts {
        let saved = refs.clone();
        if unify(first, f, mappable, refs) {
            embed_atoms(rest, facts, mappable, refs, out);
        }
        *refs = saved;
    }
}

/// Embeddings of the restrictor `source` (a sub-UDRS whose top is the
/// restrictor label) into the database, relative to entry `host`. Only the
/// referents in `bound` may be mapped; they go to constants, or to
/// referents of the host's top universe. Clauses hosted directly under the
/// restrictor must match whole entries of the database.
pub fn find_embeddings(
    source: &Udrs,
    bound: &[Referent],
    db: &Database,
    host: usize,
) -> Vec<Embedding> {
    let host_u = &db.entries[host];
    let host_top: BTreeSet<&Referent> = host_u.boxes[&host_u.top].universe.iter().collect();
    let mut facts = Vec::new();
    for (e, u) in db.entries.iter().enumerate() {
        for a in definite_atoms(u) {
            let usable = a.args.iter().all(|t| match t {
                Term::Const(_) => true,
                Term::Ref(r) => e == host && host_top.contains(r),
            });
            if usable && !facts.contains(&a) {
                facts.push(a);
            }
        }
    }
    let mappable: BTreeSet<Referent> = bound.iter().cloned().collect();
    let atoms = &source.boxes[&source.top].atoms;
    let mut maps = BTreeSet::new();
    embed_atoms(atoms, &facts, &mappable, &mut BTreeMap::new(), &mut maps);

    let hosted: Vec<usize> = source.hosted_under(&source.top);
    let mut out = BTreeSet::new();
    for refs in maps {
        // Every referent must be mapped (an unconstrained one goes nowhere).
        if !mappable.iter().all(|r| refs.contains_key(r)) && hosted.is_empty() {
            continue;
        }
        let mut partial = vec![(refs.clone(), BTreeMap::new(), Vec::new())];
        for &ci in &hosted {
            let c = &source.clauses[ci];
            let Ok(sub) = sub_udrs(source, &c.upper) else {
                partial.clear();
                break;
            };
            let mut next = Vec::new();
            for (refs, labels, matches) in &partial {
                for (e, entry) in db.entries.iter().enumerate() {
                    if e == host {
                        continue;
                    }
                    if let Some(iso) = isomorphism(&sub, entry, false, Some(refs)) {
                        let mut refs2 = refs.clone();
                        for (k, v) in &iso.refs {
                            if !mappable.contains(k) && !sub.declared_referents().contains(k) {
                                refs2.insert(k.clone(), v.clone());
                            } else if mappable.contains(k) {
                                refs2.insert(k.clone(), v.clone());
                            }
                        }
                        let mut labels2: BTreeMap<Label, Label> = labels.clone();
                        labels2.extend(iso.labels);
                        let mut m2: Vec<ClauseMatch> = matches.clone();
                        m2.push(ClauseMatch {
                            upper: c.upper.clone(),
                            entry: e,
                            clause_index: c.index.clone(),
                            entry_index: entry.index().cloned(),
                        });
                        next.push((refs2, labels2, m2));
                    }
                }
            }
            partial = next;
        }
        for (refs, mut labels, clauses) in partial {
            if !mappable.iter().all(|r| refs.contains_key(r)) {
                continue;
            }
            let refs: BTreeMap<Referent, Term> = refs
                .into_iter()
                .filter(|(k, _)| mappable.contains(k))
                .collect();
            labels.insert(source.top.clone(), host_u.top.clone());
            out.insert(Embedding {
                refs,
                labels,
                clauses,
            });
        }
    }
    out.into_iter().collect()
}

/// Restrictor, scope and bound referents of a universal node.
fn universal_parts(u: &Udrs, n: &Component) -> Option<(Label, Label, Vec<Referent>)> {
    match &n.cond {
        Condition::Quant {
            quantifier,
            var,
            res,
            scope,
        } if quantifier == "every" => {
            let mut bound = vec![var.clone()];
            bound.extend(u.boxes[res].universe.iter().cloned());
            Some((res.clone(), scope.clone(), bound))
        }
        Condition::Impl { ante, cons } => Some((
            ante.clone(),
            cons.clone(),
            u.boxes[ante].universe.clone(),
        )),
        _ => None,
    }
}

/// Checks the DET preconditions on node `node` of entry `host` and returns
/// its restrictor as a sub-UDRS with the referents an embedding may map.
pub fn det_source(
    db: &Database,
    host: usize,
    node: &Label,
    table: &QuantifierTable,
) -> Result<(Udrs, Vec<Referent>), RuleError> {
    let u = &db.entries[host];
    let n = u
        .top_clause()
        .node(node)
        .ok_or_else(|| RuleError::NotTopClause(node.clone()))?;
    let (res, _, bound) = universal_parts(u, n).ok_or_else(|| RuleError::NotUniversal(node.clone()))?;
    let pol = polarity(u, table)?;
    if pol.get(node) != Some(&Polarity::Positive) {
        return Err(RuleError::Guard(node.clone()));
    }
    Ok((sub_udrs(u, &res)?, bound))
}

/// Hasse diagram of a strict order given as `(wider, narrower)` pairs,
/// written as ORD edges.
pub fn order_edges(pairs: &BTreeSet<(Label, Label)>) -> Vec<OrdEdge> {
    pairs
        .iter()
        .filter(|(a, b)| {
            !pairs
                .iter()
                .any(|(x, y)| x == a && y != b && pairs.contains(&(y.clone(), b.clone())))
        })
        .map(|(a, b)| OrdEdge::under_scope(b, a))
        .collect()
}

/// Moves the content of a nodeless clause's lower bound into its upper
/// bound, and lifts a lone clause hanging from a nodeless top clause to
/// the top. Both steps preserve every reading.
pub fn normalize(u: &Udrs) -> Udrs {
    let mut u = u.clone();
    loop {
        let c = u.clauses[0].clone();
        let lower_empty = u.boxes[&c.lower].is_empty();
        let hosted: Vec<usize> = c.attachments.iter().flat_map(|a| u.hosted_under(a)).collect();
        if !(c.nodes.is_empty() && lower_empty && hosted.len() == 1) {
            break;
        }
        let sub = u.clauses[hosted[0]].clone();
        let mut top_box = u.boxes.remove(&u.top).unwrap();
        for a in &c.attachments {
            let b = u.boxes.remove(a).unwrap();
            top_box.universe.extend(b.universe);
            top_box.atoms.extend(b.atoms);
        }
        let ub = u.boxes.remove(&sub.upper).unwrap();
        top_box.universe.extend(ub.universe);
        top_box.atoms.extend(ub.atoms);
        u.boxes.remove(&c.lower);
        u.boxes.insert(u.top.clone(), top_box);
        let old_upper = sub.upper.clone();
        let mut promoted = sub;
        promoted.upper = u.top.clone();
        promoted.host = None;
        let mut clauses = vec![promoted];
        for (i, other) in u.clauses.iter().enumerate() {
            if i != 0 && i != hosted[0] {
                let mut o = other.clone();
                if o.host.as_ref() == Some(&old_upper) {
                    o.host = Some(u.top.clone());
                }
                clauses.push(o);
            }
        }
        u.clauses = clauses;
    }
    for ci in 0..u.clauses.len() {
        let c = u.clauses[ci].clone();
        if c.nodes.is_empty() {
            for a in &c.attachments {
                if u.hosted_under(a).is_empty() {
                    let b = u.boxes.remove(a).unwrap();
                    let up = u.boxes.get_mut(&c.upper).unwrap();
                    up.universe.extend(b.universe);
                    up.atoms.extend(b.atoms);
                    u.clauses[ci].attachments.retain(|x| x != a);
                }
            }
        }
        if c.nodes.is_empty() && c.upper != c.lower {
            let lb = std::mem::take(u.boxes.get_mut(&c.lower).unwrap());
            let up = u.boxes.get_mut(&c.upper).unwrap();
            up.universe.extend(lb.universe);
            up.atoms.extend(lb.atoms);
        }
    }
    crate::engine::syntax::canonicalize(u)
}

/// DET: drops the universal node, keeps the rest of the host with fresh
/// names, and replaces the restrictor's referents by their images.
///
/// When the restrictor hosts clauses matched against entries with another
/// index, the two must be equivalent given the database.
pub fn det(
    db: &Database,
    host: usize,
    node: &Label,
    f: &Embedding,
    oracle: &Oracle,
    fresh: &mut Fresh,
) -> Result<Udrs, RuleError> {
    let (source, _) = det_source(db, host, node, &oracle.table)?;
    let u = &db.entries[host];
    for m in &f.clauses {
        if m.clause_index.is_some() && m.clause_index == m.entry_index {
            continue;
        }
        let clause = sub_udrs(&source, &m.upper)?;
        let context: Vec<&Udrs> = db.entries.iter().collect();
        if !oracle.equivalent(&context, &db.lexicon, &clause, &db.entries[m.entry])? {
            let show = |i: &Option<CorrelationIndex>| i.as_ref().map_or("-".to_string(), |i| i.to_string());
            return Err(RuleError::SideCondition(show(&m.clause_index), show(&m.entry_index)));
        }
    }
    remove_node(u, node, &f.refs, fresh)
}

/// Drops node `node` of the top clause together with everything below its
/// restrictor (a negation keeps its body). The scope box stays, directly
/// below the top. Everything is renamed fresh, except that the referents in
/// `refs` go to the given terms.
pub fn remove_node(
    u: &Udrs,
    node: &Label,
    refs: &BTreeMap<Referent, Term>,
    fresh: &mut Fresh,
) -> Result<Udrs, RuleError> {
    let c0 = u.top_clause();
    let n = c0.node(node).ok_or_else(|| RuleError::NotTopClause(node.clone()))?;
    let scope = n.cond.scope().clone();
    let res = match &n.cond {
        Condition::Neg { .. } => None,
        c => Some(c.res().clone()),
    };
    let closure = implicit_closure(u)?;

    // Labels removed with the restrictor.
    let removed: BTreeSet<Label> = closure
        .labels()
        .iter()
        .filter(|l| res.as_ref().is_some_and(|r| closure.leq(l, r)))
        .cloned()
        .chain([node.clone()])
        .collect();

    let mut out = u.clone();
    out.boxes.retain(|l, _| !removed.contains(l));
    out.clauses.retain(|c| !removed.contains(&c.upper));
    let keep: Vec<Label> = c0
        .node_labels()
        .into_iter()
        .filter(|l| l != node)
        .collect();
    let mut pairs = BTreeSet::new();
    for a in &keep {
        for b in &keep {
            if closure.lt(b, a) {
                pairs.insert((a.clone(), b.clone()));
            }
        }
    }
    {
        let top = &mut out.clauses[0];
        top.nodes = c0
            .nodes
            .iter()
            .enumerate()
            .filter(|(_, x)| &x.label != node)
            .enumerate()
            .map(|(j, (i, x))| Component {
                slot: (c0.slot_of(i) != j.to_string()).then(|| c0.slot_of(i)),
                ..x.clone()
            })
            .collect();
        top.ord = order_edges(&pairs);
        top.readings = c0.readings.as_ref().map(|rs| {
            rs.iter()
                .map(|r| r.iter().filter(|l| *l != node).cloned().collect())
                .collect()
        });
    }
    // The scope box stays, now directly below the top.
    if out.boxes[&scope].is_empty() && out.hosted_under(&scope).is_empty() {
        out.boxes.remove(&scope);
    } else {
        out.clauses[0].attachments.push(scope.clone());
    }

    let mut ren = Renaming::default();
    for l in out.labels() {
        ren.labels.insert(l, fresh.label());
    }
    for r in out.declared_referents() {
        ren.refs.insert(r, Term::Ref(fresh.referent()));
    }
    for (r, img) in refs {
        let t = match img {
            Term::Ref(y) => ren.term_for(y),
            c => c.clone(),
        };
        ren.refs.insert(r.clone(), t);
    }
    let result = normalize(&out.apply_renaming(&ren));
    validate(&result)?;
    Ok(result)
}

/// Label and referent correspondence under which `b` has the content of
/// `a`, ignoring ORD.
fn same_content(a: &Udrs, b: &Udrs) -> Option<crate::disambig::Iso> {
    isomorphism(a, b, false, Some(&BTreeMap::new()))
}

/// AI: two unambiguous UDRSs that differ only in their ORDs yield one
/// whose ORD is the intersection of both, under a fresh index.
pub fn ai(s1: &Udrs, s2: &Udrs, fresh: &mut Fresh) -> Result<Udrs, RuleError> {
    for s in [s1, s2] {
        if !s.is_unambiguous() {
            return Err(RuleError::Ambiguous(s.top.clone()));
        }
    }
    let iso = same_content(s1, s2).ok_or(RuleError::StructuralMismatch)?;
    let c1 = implicit_closure(s1)?;
    let c2 = implicit_closure(s2)?;
    let mut out = s1.clone();
    for (ci, c) in s1.clauses.iter().enumerate() {
        let mut pairs = BTreeSet::new();
        for a in c.node_labels() {
            for b in c.node_labels() {
                if c1.lt(&b, &a) && c2.lt(&iso.labels[&b], &iso.labels[&a]) {
                    pairs.insert((a.clone(), b));
                }
            }
        }
        out.clauses[ci].ord = order_edges(&pairs);
        out.clauses[ci].readings = None;
    }
    // The result must cover exactly the readings of the two inputs.
    let c3 = implicit_closure(&out)?;
    let inv: BTreeMap<&Label, &Label> = iso.labels.iter().map(|(a, b)| (b, a)).collect();
    for (ci, c) in out.clauses.iter().enumerate() {
        let r3: BTreeSet<Vec<Label>> = clause_readings(c, &c3).into_iter().collect();
        let mut union: BTreeSet<Vec<Label>> = clause_readings(&s1.clauses[ci], &c1).into_iter().collect();
        let twin = s2
            .clauses
            .iter()
            .find(|x| Some(&x.upper) == iso.labels.get(&c.upper))
            .unwrap();
        for r in clause_readings(twin, &c2) {
            union.insert(r.iter().map(|l| inv[l].clone()).collect());
        }
        if r3 != union {
            return Err(RuleError::OverGenerates);
        }
    }
    let (mut v, _) = fresh_variant(&out, fresh);
    let ambiguous: Vec<usize> = {
        let cl = implicit_closure(&v)?;
        (0..v.clauses.len())
            .filter(|&ci| clause_readings(&v.clauses[ci], &cl).len() > 1 || ci == 0)
            .collect()
    };
    for ci in ambiguous {
        v.clauses[ci].index = Some(fresh.index());
    }
    validate(&v)?;
    Ok(v)
}

/// Result of comparing two reading sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Difference {
    Falsity,
    /// `(wider, narrower)` covering pairs of the weakest order whose
    /// extensions are exactly the difference.
    Order(BTreeSet<(Label, Label)>),
    /// The difference is not the extension set of any single order.
    Readings(BTreeSet<Vec<Label>>),
}

/// Readings of the first set that are not readings of the second, as the
/// weakest partial order when one exists.
pub fn structural_difference(r1: &[Vec<Label>], r2: &[Vec<Label>]) -> Difference {
    let minus: BTreeSet<Vec<Label>> = r1.iter().filter(|r| !r2.contains(r)).cloned().collect();
    let Some(first) = minus.iter().next() else {
        return Difference::Falsity;
    };
    let nodes = first.clone();
    let mut pairs = BTreeSet::new();
    for (i, a) in nodes.iter().enumerate() {
        for b in &nodes[i + 1..] {
            let before = |r: &Vec<Label>| {
                r.iter().position(|x| x == a) < r.iter().position(|x| x == b)
            };
            if minus.iter().all(before) {
                pairs.insert((a.clone(), b.clone()));
            } else if minus.iter().all(|r| !before(r)) {
                pairs.insert((b.clone(), a.clone()));
            }
        }
    }
    let ext: BTreeSet<Vec<Label>> = linear_extensions(&nodes, |x, y| pairs.contains(&(y.clone(), x.clone())))
        .into_iter()
        .collect();
    if ext == minus {
        let edges = order_edges(&pairs);
        Difference::Order(
            edges
                .into_iter()
                .map(|e| (e.above.label().clone(), e.below))
                .collect(),
        )
    } else {
        Difference::Readings(minus)
    }
}

/// Splits `¬α2` into the negated clause as a standalone UDRS.
pub fn negated_clause(neg: &Udrs) -> Result<Udrs, RuleError> {
    let c = neg.top_clause();
    let [n] = c.nodes.as_slice() else {
        return Err(RuleError::NotNegation);
    };
    let Condition::Neg { body } = &n.cond else {
        return Err(RuleError::NotNegation);
    };
    let hosted = neg.hosted_under(body);
    let clean = neg.boxes[&neg.top].is_empty()
        && neg.boxes[&c.lower].is_empty()
        && neg.boxes[body].is_empty()
        && c.attachments.is_empty();
    match hosted.as_slice() {
        [ci] if clean => Ok(sub_udrs(neg, &neg.clauses[*ci].upper)?),
        _ => Err(RuleError::NotNegation),
    }
}

/// DIFF: narrows `alpha` to the readings not excluded by `neg_alpha2`.
pub fn diff(alpha: &Udrs, neg_alpha2: &Udrs, fresh: &mut Fresh) -> Result<Udrs, RuleError> {
    let alpha2 = negated_clause(neg_alpha2)?;
    let iso = same_content(&alpha2, alpha).ok_or(RuleError::StructuralMismatch)?;
    let correlated = alpha2.index().is_some() && alpha2.index() == alpha.index();
    if !correlated && !alpha2.is_unambiguous() {
        return Err(RuleError::Uncorrelated);
    }
    let ca = implicit_closure(alpha)?;
    let c2 = implicit_closure(&alpha2)?;
    for c in alpha.clauses.iter().skip(1) {
        if clause_readings(c, &ca).len() > 1 {
            return Err(RuleError::Ambiguous(c.upper.clone()));
        }
    }
    let ra = clause_readings(alpha.top_clause(), &ca);
    let r2: Vec<Vec<Label>> = clause_readings(alpha2.top_clause(), &c2)
        .into_iter()
        .map(|r| r.iter().map(|l| iso.labels[l].clone()).collect())
        .collect();
    let mut out = alpha.clone();
    match structural_difference(&ra, &r2) {
        Difference::Falsity => return Err(RuleError::Inconsistent),
        Difference::Order(pairs) => {
            out.clauses[0].ord = order_edges(&pairs);
            out.clauses[0].readings = None;
        }
        Difference::Readings(rs) => out.clauses[0].readings = Some(rs),
    }
    let (v, _) = fresh_variant(&out, fresh);
    validate(&v)?;
    Ok(v)
}

/// Polarity by enumeration: walks every reading and compares.
pub fn polarity_by_enumeration(u: &Udrs, table: &QuantifierTable) -> Result<PolarityMap, RuleError> {
    let mut agg: BTreeMap<Label, BTreeSet<Polarity>> = BTreeMap::new();
    for s in enumerate(u)? {
        let mut map = PolarityMap::new();
        map.insert(u.top.clone(), Polarity::Positive);
        for c in &u.clauses {
            let p = match &c.host {
                None => Polarity::Positive,
                Some(h) => map[h],
            };
            map.insert(c.upper.clone(), p);
            for a in &c.attachments {
                map.insert(a.clone(), p);
            }
            let mut cur = p;
            for l in s.order(&c.upper).unwrap() {
                let n = c.node(l).unwrap();
                map.insert(l.clone(), cur);
                for sl in n.cond.slots() {
                    map.insert(sl.clone(), cur.apply(slot_mono(&n.cond, sl, table)?));
                }
                cur = cur.apply(scope_mono(&n.cond, table)?);
            }
            map.insert(c.lower.clone(), cur);
        }
        for (l, p) in map {
            agg.entry(l).or_default().insert(p);
        }
    }
    Ok(agg
        .into_iter()
        .map(|(l, ps)| {
            let p = if ps.len() == 1 {
                *ps.iter().next().unwrap()
            } else {
                Polarity::Undefined
            };
            (l, p)
        })
        .collect())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::disambig::tests::three_quantifiers;
    use crate::engine::syntax::{parse_database, parse_udrs};
    use crate::modelsem::{Relation, QuantifierTable};
    use crate::structure::tests::{ex15, l};
    use proptest::prelude::*;

    fn table() -> QuantifierTable {
        QuantifierTable::standard(2)
    }

    pub fn ex16(det: &str, extra: &str) -> Database {
        parse_database(&format!(
            "(udrs :top t1
               (clause :upper t1 :lower b1
                 (comp :label q1 (quant {det} y :res r1 (drs () ((problem y))) :scope s1))
                 (comp :label q2 (quant every x :res r2 (drs () ((politician x))) :scope s2))
                 (base :label b1 ((preoccupy y x)))
                 (ord {extra})))
             (udrs :top t2 (clause :upper t2 :lower b2 (base :label b2 ((politician john))) (ord)))"
        ))
        .unwrap()
    }

    #[test]
    fn polarity_of_the_politician_examples() {
        let t = table();
        let db = ex16("at-least-one", "");
        let p = polarity(&db.entries[0], &t).unwrap();
        assert_eq!(p[&l("q2")], Polarity::Positive);
        let db = ex16("few", "");
        let p = polarity(&db.entries[0], &t).unwrap();
        assert_eq!(p[&l("q2")], Polarity::Undefined);
        assert_eq!(p[&l("b1")], Polarity::Negative);
        let atom = parse_udrs("(udrs :top t (clause :upper t :lower b (base :label b ((p k))) (ord)))").unwrap();
        assert!(polarity(&atom, &t).unwrap().values().all(|p| *p == Polarity::Positive));
    }

    #[test]
    fn polarity_of_negation_slots() {
        let t = table();
        let u = ex15();
        let p = polarity(&u, &t).unwrap();
        assert_eq!(p[&l("l1")], Polarity::Undefined);
        assert_eq!(p[&l("l2")], Polarity::Positive);
        assert_eq!(p[&l("b2")], Polarity::Negative);
        assert_eq!(p[&l("l3")], Polarity::Negative);
        assert_eq!(p, polarity_by_enumeration(&u, &t).unwrap());
    }

    #[test]
    fn neu_adds_referents() {
        let u = ex15();
        let v = neu(&u, &[Referent::new("y")]).unwrap();
        validate(&v).unwrap();
        assert_eq!(enumerate(&v).unwrap().len(), 2);
        assert_eq!(neu(&u, &[]).unwrap(), u);
        assert!(neu(&u, &[Referent::new("x")]).is_err());
    }

    #[test]
    fn embeddings_of_the_politician_restrictor() {
        let db = ex16("at-least-one", "");
        let (src, bound) = det_source(&db, 0, &l("q2"), &table()).unwrap();
        let es = find_embeddings(&src, &bound, &db, 0);
        assert_eq!(es.len(), 1);
        assert_eq!(es[0].refs[&Referent::new("x")], Term::constant("john"));
        let mut two = db.clone();
        two.push(
            parse_udrs("(udrs :top t3 (clause :upper t3 :lower b3 (base :label b3 ((politician mary))) (ord)))")
                .unwrap(),
        )
        .unwrap();
        assert_eq!(find_embeddings(&src, &bound, &two, 0).len(), 2);
        let mut none = db.clone();
        none.entries.truncate(1);
        assert!(find_embeddings(&src, &bound, &none, 0).is_empty());
    }

    #[test]
    fn det_on_the_politician_examples() {
        let t = table();
        let oracle = Oracle::new(t.clone(), 3);
        let db = ex16("at-least-one", "");
        let (src, bound) = det_source(&db, 0, &l("q2"), &t).unwrap();
        let f = &find_embeddings(&src, &bound, &db, 0)[0];
        let mut fresh = db.fresh();
        let out = det(&db, 0, &l("q2"), f, &oracle, &mut fresh).unwrap();
        let expected = parse_udrs(
            "(udrs :top g (clause :upper g :lower gb
               (comp :label gq (quant at-least-one z :res gr (drs () ((problem z))) :scope gs))
               (base :label gb ((preoccupy z john))) (ord)))",
        )
        .unwrap();
        assert!(
            isomorphism(&out, &normalize(&expected), true, Some(&BTreeMap::new())).is_some(),
            "{}",
            crate::engine::syntax::print_udrs(&out)
        );
        assert!(oracle.entails_db(&db, &out, Relation::R8).unwrap().holds);

        let db = ex16("few", "");
        assert_eq!(det_source(&db, 0, &l("q2"), &t).unwrap_err(), RuleError::Guard(l("q2")));
    }

    #[test]
    fn difference_of_the_three_component_example() {
        let r = |s: &[&str]| s.iter().map(|x| l(x)).collect::<Vec<_>>();
        let a1 = vec![r(&["l3", "l2", "l1"]), r(&["l2", "l3", "l1"]), r(&["l2", "l1", "l3"])];
        let a2 = vec![r(&["l2", "l3", "l1"]), r(&["l2", "l1", "l3"])];
        match structural_difference(&a1, &a2) {
            Difference::Order(p) => {
                let exts = linear_extensions(&r(&["l1", "l2", "l3"]), |x, y| p.contains(&(y.clone(), x.clone())));
                assert_eq!(exts, vec![r(&["l3", "l2", "l1"])]);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(structural_difference(&a1, &a1), Difference::Falsity);
        // Disjoint sets give back the first order.
        let u = three_quantifiers("(leq l2 (scope l1))");
        let cl = implicit_closure(&u).unwrap();
        let rs = clause_readings(u.top_clause(), &cl);
        match structural_difference(&rs, &[r(&["l2", "l1", "l3"])]) {
            Difference::Order(p) => assert_eq!(p, [(l("l1"), l("l2"))].into()),
            other => panic!("{other:?}"),
        }
        // Two readings not forming an order.
        match structural_difference(&[r(&["l1", "l2", "l3"]), r(&["l3", "l2", "l1"])], &[]) {
            Difference::Readings(rs) => assert_eq!(rs.len(), 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ai_merges_two_readings() {
        let mut wide = ex15();
        wide.clauses[0].ord.push(OrdEdge::under_scope(&l("l2"), &l("l1")));
        let mut narrow = ex15();
        narrow.clauses[0].ord.push(OrdEdge::under_scope(&l("l1"), &l("l2")));
        let (narrow, _) = fresh_variant(&narrow, &mut Fresh::new(100));
        let mut fresh = Fresh::new(0);
        fresh.reserve_udrs(&wide);
        let merged = ai(&wide, &narrow, &mut fresh).unwrap();
        assert_eq!(enumerate(&merged).unwrap().len(), 2);
        assert!(merged.index().is_some());
        let copy = ai(&wide, &wide, &mut fresh).unwrap();
        assert_eq!(enumerate(&copy).unwrap().len(), 1);
        assert!(matches!(ai(&ex15(), &wide, &mut fresh), Err(RuleError::Ambiguous(_))));
    }

    #[test]
    fn ai_refuses_over_generation() {
        // Readings 123 and 321 share no ordered pair, so the intersection
        // is empty and would admit all six orders.
        let a = three_quantifiers("(leq l2 (scope l1)) (leq l3 (scope l2))");
        let b = three_quantifiers("(leq l2 (scope l3)) (leq l1 (scope l2))");
        let (b, _) = fresh_variant(&b, &mut Fresh::new(50));
        assert_eq!(ai(&a, &b, &mut Fresh::new(0)), Err(RuleError::OverGenerates));
    }

    fn random_clause(dets: &[usize], edges: &[(usize, usize)]) -> Udrs {
        let names = ["every", "some", "no", "few", "more-than-half"];
        let mut comps = String::new();
        let mut vars = String::new();
        for (i, &d) in dets.iter().enumerate() {
            if d == 5 {
                comps.push_str(&format!("(comp :label n{i} (neg :body nb{i}))"));
            } else {
                comps.push_str(&format!(
                    "(comp :label n{i} (quant {} x{i} :res r{i} (drs () ((p x{i}))) :scope s{i}))",
                    names[d]
                ));
                vars.push_str(&format!(" x{i}"));
            }
        }
        let mut ord = String::new();
        for &(a, b) in edges {
            let (lo, hi) = (a.max(b), a.min(b));
            if lo != hi && lo < dets.len() {
                ord.push_str(&format!("(leq n{lo} (scope n{hi}))"));
            }
        }
        parse_udrs(&format!(
            "(udrs :top t (clause :upper t :lower b {comps} (base :label b ((q k{vars}))) (ord {ord})))"
        ))
        .unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn path_rule_agrees_with_enumeration(
            dets in proptest::collection::vec(0usize..6, 1..=4),
            edges in proptest::collection::vec((0usize..4, 0usize..4), 0..4),
        ) {
            let u = random_clause(&dets, &edges);
            let t = table();
            prop_assert_eq!(polarity(&u, &t).unwrap(), polarity_by_enumeration(&u, &t).unwrap());
        }
    }
}
