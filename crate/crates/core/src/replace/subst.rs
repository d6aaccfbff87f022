//! SUBST at a label of a UDRS, the determiner rewrites and the scope
//! exchange.

use std::collections::{BTreeMap, BTreeSet};

use super::{DetRule, Judgment, ReplaceError, Replacer};
use crate::disambig::clause_readings;
use crate::modelsem::{Persistence, QuantifierTable, ScopedCond, ScopedDrs};
use crate::rules::{det, det_source, find_embeddings, polarity, Polarity};
use crate::structure::*;

fn atoms_drs(b: &DrsBox) -> ScopedDrs {
    ScopedDrs {
        universe: b.universe.clone(),
        conds: b.atoms.iter().cloned().map(ScopedCond::Atom).collect(),
    }
}

/// SUBST on the box at `l`: replaces its universe and atoms by `new`.
/// Clauses hosted by the box are kept.
pub fn subst_box(rep: &Replacer, u: &Udrs, l: &Label, new: &DrsBox) -> Result<(Udrs, Judgment), ReplaceError> {
    let old = u.boxes.get(l).ok_or_else(|| ReplaceError::NotABox(l.clone()))?;
    let pol = polarity(u, &rep.oracle.table)?;
    let p = pol.get(l).copied().unwrap_or(Polarity::Undefined);
    if p == Polarity::Undefined {
        return Err(ReplaceError::UndefinedPolarity(l.clone()));
    }
    let mut elsewhere = BTreeSet::new();
    for (k, b) in &u.boxes {
        if k != l {
            for a in &b.atoms {
                elsewhere.extend(a.referents().cloned());
            }
        }
    }
    let fixed: BTreeSet<Referent> = old.universe.iter().filter(|r| elsewhere.contains(*r)).cloned().collect();
    if !fixed.iter().all(|r| new.universe.contains(r)) {
        return Err(ReplaceError::NoJudgment(l.clone()));
    }
    let (k, k2) = (atoms_drs(old), atoms_drs(new));
    let (rule, j) = match p {
        Polarity::Positive => ("SUBST(i)", rep.gg_drs(&k, &k2, &fixed)?),
        _ => ("SUBST(ii)", rep.gg_drs(&k2, &k, &fixed)?),
    };
    let j = j.ok_or_else(|| ReplaceError::NoJudgment(l.clone()))?;
    let mut out = u.clone();
    out.boxes.insert(l.clone(), new.clone());
    validate(&out)?;
    let note = format!("{l}{}: {k} ⇝ {k2}", p.sign());
    Ok((out, Judgment::new(rule, note, vec![j])))
}

/// The determiner's persistence class if it survives every reading of
/// its clause, judged by the polarity of the node.
pub fn persistent_in_clause(u: &Udrs, np: &Label, table: &QuantifierTable) -> Result<Persistence, ReplaceError> {
    let (_, n) = u.component(np).ok_or_else(|| ReplaceError::NotANode(np.clone()))?;
    let Condition::Quant { quantifier, .. } = &n.cond else {
        return Err(ReplaceError::NotANode(np.clone()));
    };
    let base = table.get(quantifier)?.persistence();
    Ok(match polarity(u, table)?[np] {
        Polarity::Positive => base,
        Polarity::Negative => base.flip(),
        Polarity::Undefined => Persistence::None,
    })
}

/// Gives every listed node an explicit slot, dropping it where it equals
/// the node's new position.
fn pin_slots(c: &mut Clause, slots: &BTreeMap<Label, String>) {
    for (i, n) in c.nodes.iter_mut().enumerate() {
        if let Some(s) = slots.get(&n.label) {
            n.slot = (*s != i.to_string()).then(|| s.clone());
        }
    }
}

fn current_slots(c: &Clause) -> BTreeMap<Label, String> {
    c.nodes.iter().enumerate().map(|(i, n)| (n.label.clone(), c.slot_of(i))).collect()
}

fn unused_slot(c: &Clause) -> String {
    let taken = c.slots();
    (0..).map(|k: usize| k.to_string()).find(|s| !taken.contains(s)).unwrap()
}

/// Whether box `l` holds nothing and hosts nothing.
fn bare(u: &Udrs, l: &Label) -> bool {
    u.boxes[l].is_empty() && u.hosted_under(l).is_empty()
}

/// The ≫Lex rewrites of node `node`, in the direction its polarity allows.
pub fn lex_rewrites(
    rep: &Replacer,
    u: &Udrs,
    node: &Label,
    fresh: &mut Fresh,
) -> Result<Vec<(Udrs, Judgment)>, ReplaceError> {
    let table = &rep.oracle.table;
    let ci = u.clause_of_node(node).ok_or_else(|| ReplaceError::NotANode(node.clone()))?;
    let p = polarity(u, table)?[node];
    if p == Polarity::Undefined {
        return Ok(vec![]);
    }
    let closure = implicit_closure(u)?;
    let c = &u.clauses[ci];
    let n = c.node(node).unwrap();
    let mates: Vec<&Component> = c.nodes.iter().filter(|m| m.label != *node).collect();
    let mut out = Vec::new();
    let sign = p.sign();
    for rule in &rep.lex.det_rules {
        match (rule, &n.cond, p) {
            (DetRule::Entails(a, b), Condition::Quant { quantifier, .. }, _) => {
                let (from, to) = if p == Polarity::Positive { (a, b) } else { (b, a) };
                if quantifier == from {
                    let mut v = u.clone();
                    if let Condition::Quant { quantifier, .. } = &mut v.clauses[ci].nodes.iter_mut().find(|m| m.label == *node).unwrap().cond {
                        *quantifier = to.clone();
                    }
                    validate(&v)?;
                    out.push((v, Judgment::new("SUBST", format!("{node}{sign}"), vec![Judgment::new("≫Lex", rule.to_string(), vec![])])));
                }
            }
            (DetRule::Individual, Condition::Quant { quantifier, .. }, Polarity::Positive)
                if quantifier == "every" && ci == 0 =>
            {
                let mut db = rep.db.clone();
                db.entries.push(u.clone());
                let host = db.entries.len() - 1;
                let (src, bound) = det_source(&db, host, node, table)?;
                for f in find_embeddings(&src, &bound, &db, host) {
                    if !f.clauses.is_empty() || f.refs.values().any(|t| matches!(t, Term::Ref(_))) {
                        continue;
                    }
                    let v = det(&db, host, node, &f, rep.oracle, fresh)?;
                    let names: Vec<String> = f.refs.values().map(|t| t.to_string()).collect();
                    let j = Judgment::new("≫Lex(ii)", format!("every ≫ {}", names.join(",")), vec![]);
                    out.push((v, Judgment::new("SUBST", format!("{node}{sign}"), vec![j])));
                }
            }
            (DetRule::NoToEveryNot, Condition::Quant { quantifier, var, res, scope }, Polarity::Positive)
                if quantifier == "no" && mates.iter().all(|m| closure.lt(node, &m.label)) =>
            {
                let mut v = u.clone();
                let slots = current_slots(c);
                let slot = unused_slot(c);
                let (neg, body) = (fresh.label(), fresh.label());
                v.boxes.insert(body.clone(), DrsBox::default());
                let vc = &mut v.clauses[ci];
                for m in vc.nodes.iter_mut().filter(|m| m.label == *node) {
                    m.cond = Condition::Quant {
                        quantifier: "every".into(),
                        var: var.clone(),
                        res: res.clone(),
                        scope: scope.clone(),
                    };
                }
                vc.nodes.push(Component {
                    label: neg.clone(),
                    cond: Condition::Neg { body },
                    slot: None,
                });
                vc.ord.push(OrdEdge::under_scope(&neg, node));
                let mut slots = slots;
                slots.insert(neg, slot);
                pin_slots(vc, &slots);
                validate(&v)?;
                let j = Judgment::new("≫Lex(iii)", rule.to_string(), vec![]);
                out.push((v, Judgment::new("SUBST", format!("{node}{sign}"), vec![j])));
            }
            (DetRule::NoToEveryNot, Condition::Quant { quantifier, var, res, scope }, Polarity::Negative)
                if quantifier == "every" =>
            {
                // every-not back to no, with the negation forced right below.
                for m in &mates {
                    let Condition::Neg { body } = &m.cond else { continue };
                    let lowest = mates.iter().all(|o| o.label == m.label || closure.lt(&m.label, &o.label));
                    let adjacent = mates.iter().all(|o| o.label == m.label || closure.lt(node, &o.label));
                    if !(lowest && adjacent && closure.lt(&m.label, node) && bare(u, body)) {
                        continue;
                    }
                    let mut v = u.clone();
                    let slots = current_slots(c);
                    v.boxes.remove(body);
                    let vc = &mut v.clauses[ci];
                    vc.nodes.retain(|x| x.label != m.label);
                    vc.ord.retain(|e| e.below != m.label && e.above.label() != &m.label && e.above.label() != body);
                    for x in vc.nodes.iter_mut().filter(|x| x.label == *node) {
                        x.cond = Condition::Quant {
                            quantifier: "no".into(),
                            var: var.clone(),
                            res: res.clone(),
                            scope: scope.clone(),
                        };
                    }
                    pin_slots(vc, &slots);
                    validate(&v)?;
                    let j = Judgment::new("≫Lex(iii)", rule.to_string(), vec![]);
                    out.push((v, Judgment::new("SUBST", format!("{node}{sign}"), vec![j])));
                }
            }
            (DetRule::SomeNotToNotEvery, Condition::Quant { quantifier, var, res, scope }, Polarity::Positive)
                if quantifier == "some" && bare(u, scope) =>
            {
                for m in &mates {
                    let Condition::Neg { body } = &m.cond else { continue };
                    if !adjacent_pair(&closure, &mates, node, &m.label) {
                        continue;
                    }
                    let upper = Condition::Neg { body: scope.clone() };
                    let lower = Condition::Quant {
                        quantifier: "every".into(),
                        var: var.clone(),
                        res: res.clone(),
                        scope: body.clone(),
                    };
                    out.push(exchange_kinds(u, ci, node, &m.label, upper, lower, rule)?);
                }
            }
            (DetRule::SomeNotToNotEvery, Condition::Neg { body }, Polarity::Negative) if bare(u, body) => {
                for m in &mates {
                    let Condition::Quant { quantifier, var, res, scope } = &m.cond else { continue };
                    if quantifier != "every" || !adjacent_pair(&closure, &mates, node, &m.label) {
                        continue;
                    }
                    let upper = Condition::Quant {
                        quantifier: "some".into(),
                        var: var.clone(),
                        res: res.clone(),
                        scope: body.clone(),
                    };
                    let lower = Condition::Neg { body: scope.clone() };
                    out.push(exchange_kinds(u, ci, node, &m.label, upper, lower, rule)?);
                }
            }
            _ => {}
        }
    }
    Ok(out)
}

/// `lower` is forced right below `upper`, with nothing able to come between.
fn adjacent_pair(closure: &Closure, mates: &[&Component], upper: &Label, lower: &Label) -> bool {
    closure.lt(lower, upper)
        && mates
            .iter()
            .all(|o| o.label == *lower || closure.lt(upper, &o.label) || closure.lt(&o.label, lower))
}

/// Rewrites the adjacent pair `upper`/`lower` in place. The slots follow
/// the node kinds so the result can stay coindexed with its source.
fn exchange_kinds(
    u: &Udrs,
    ci: usize,
    upper: &Label,
    lower: &Label,
    new_upper: Condition,
    new_lower: Condition,
    rule: &DetRule,
) -> Result<(Udrs, Judgment), ReplaceError> {
    let mut v = u.clone();
    let mut slots = current_slots(&u.clauses[ci]);
    let (su, sl) = (slots[upper].clone(), slots[lower].clone());
    slots.insert(upper.clone(), sl);
    slots.insert(lower.clone(), su);
    let vc = &mut v.clauses[ci];
    for n in vc.nodes.iter_mut() {
        if n.label == *upper {
            n.cond = new_upper.clone();
        } else if n.label == *lower {
            n.cond = new_lower.clone();
        }
    }
    pin_slots(vc, &slots);
    validate(&v)?;
    let j = Judgment::new("≫Lex(iv)", rule.to_string(), vec![]);
    Ok((v, Judgment::new("SUBST", format!("{upper}"), vec![j])))
}

fn quantifier_of(u: &Udrs, l: &Label) -> Option<String> {
    match &u.component(l)?.1.cond {
        Condition::Quant { quantifier, .. } => Some(quantifier.clone()),
        _ => None,
    }
}

/// ≫π: replaces the edge `l2 ≤ scope(l1)` by `l1 ≤ scope(l2)`.
pub fn gg_pi(rep: &Replacer, u: &Udrs, l1: &Label, l2: &Label) -> Result<(Udrs, Judgment), ReplaceError> {
    let ci = u.clause_of_node(l1).ok_or_else(|| ReplaceError::NotANode(l1.clone()))?;
    if u.clause_of_node(l2) != Some(ci) {
        return Err(ReplaceError::NotAdjacent(l1.clone(), l2.clone()));
    }
    let c = &u.clauses[ci];
    let scope1 = u.scope_of(l1);
    let edge = c
        .ord
        .iter()
        .position(|e| e.below == *l2 && u.resolve_bound(&e.above) == scope1)
        .ok_or_else(|| ReplaceError::NotAdjacent(l1.clone(), l2.clone()))?;
    let refuse = || ReplaceError::NotExchangeable(l1.clone(), l2.clone());
    let p = polarity(u, &rep.oracle.table)?[l1];
    if p == Polarity::Undefined {
        return Err(ReplaceError::UndefinedPolarity(l1.clone()));
    }
    let closure = implicit_closure(u)?;
    for m in c.node_labels() {
        if m == *l1 || m == *l2 {
            continue;
        }
        let same = closure.lt(&m, l1) == closure.lt(&m, l2) && closure.lt(l1, &m) == closure.lt(l2, &m);
        if !same {
            return Err(refuse());
        }
    }
    let q = |l: &Label| quantifier_of(u, l);
    let (q1, q2) = (q(l1).ok_or_else(refuse)?, q(l2).ok_or_else(refuse)?);
    // In each reading, l1 moves down past everything up to l2, and l2
    // moves up past the same elements.
    let pi = |a: &str, b: &str| {
        if p == Polarity::Positive {
            rep.pi.holds(a, b)
        } else {
            rep.pi.holds(b, a)
        }
    };
    if !pi(&q1, &q2) {
        return Err(refuse());
    }
    let mut checked = BTreeSet::new();
    for r in clause_readings(c, &closure) {
        let i1 = r.iter().position(|x| x == l1).unwrap();
        let i2 = r.iter().position(|x| x == l2).unwrap();
        for m in &r[i1 + 1..i2] {
            if checked.insert(m.clone()) {
                let qm = q(m).ok_or_else(refuse)?;
                if !(pi(&q1, &qm) && pi(&qm, &q2)) {
                    return Err(refuse());
                }
            }
        }
    }
    let mut v = u.clone();
    let mut slots = current_slots(c);
    let (s1, s2) = (slots[l1].clone(), slots[l2].clone());
    slots.insert(l1.clone(), s2);
    slots.insert(l2.clone(), s1);
    let vc = &mut v.clauses[ci];
    vc.ord[edge] = OrdEdge::under_scope(l1, l2);
    vc.readings = None;
    pin_slots(vc, &slots);
    validate(&v)?;
    let note = format!("{l1}{}:{q1} π {l2}:{q2}", p.sign());
    Ok((v, Judgment::new("≫π", note, vec![])))
}
