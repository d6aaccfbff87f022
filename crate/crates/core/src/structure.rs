//! Underspecified DRSs: labelled components, clauses and the subordination
//! order over their labels.
//!
//! A [`Udrs`] is stored flat. Every label that names a plain DRS (the top,
//! clause bounds, restrictor and scope slots, attachment points) has an
//! entry in `boxes`; labels of scope-bearing components never do. Clauses
//! are listed with the top clause first, and every other clause names the
//! label it is hosted under. Only the explicit part of the subordination
//! order is stored; everything implied by the component structure is
//! recomputed by [`implicit_closure`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

macro_rules! name_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(Arc<str>);

        impl $name {
            pub fn new(name: impl AsRef<str>) -> Self {
                $name(Arc::from(name.as_ref()))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name::new(s)
            }
        }
    };
}

name_type!(
    /// Name of a DRS fragment.
    Label
);
name_type!(
    /// A discourse referent.
    Referent
);
name_type!(
    /// Tag forcing coindexed clauses to be disambiguated together.
    CorrelationIndex
);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Ref(Referent),
    Const(Arc<str>),
}

impl Term {
    pub fn constant(name: &str) -> Term {
        Term::Const(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Ref(r) => r.as_str(),
            Term::Const(c) => c,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: &str, args: Vec<Term>) -> Self {
        Atom {
            pred: pred.to_string(),
            args,
        }
    }

    pub fn referents(&self) -> impl Iterator<Item = &Referent> {
        self.args.iter().filter_map(|t| match t {
            Term::Ref(r) => Some(r),
            Term::Const(_) => None,
        })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.pred)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        write!(f, ")")
    }
}

/// Universe and plain conditions attached to one label.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DrsBox {
    pub universe: Vec<Referent>,
    pub atoms: Vec<Atom>,
}

impl DrsBox {
    pub fn is_empty(&self) -> bool {
        self.universe.is_empty() && self.atoms.is_empty()
    }
}

/// The distinguished condition of a scope-bearing component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Condition {
    /// Generalized quantifier with restrictor and nuclear scope labels.
    /// Universal quantification is stored here as `every`.
    Quant {
        quantifier: String,
        var: Referent,
        res: Label,
        scope: Label,
    },
    Neg {
        body: Label,
    },
    Impl {
        ante: Label,
        cons: Label,
    },
}

impl Condition {
    pub fn res(&self) -> &Label {
        match self {
            Condition::Quant { res, .. } => res,
            Condition::Neg { body } => body,
            Condition::Impl { ante, .. } => ante,
        }
    }

    pub fn scope(&self) -> &Label {
        match self {
            Condition::Quant { scope, .. } => scope,
            Condition::Neg { body } => body,
            Condition::Impl { cons, .. } => cons,
        }
    }

    /// Distinct slot labels, restrictor first.
    pub fn slots(&self) -> Vec<&Label> {
        match self {
            Condition::Neg { body } => vec![body],
            _ => vec![self.res(), self.scope()],
        }
    }

    pub fn is_universal(&self) -> bool {
        match self {
            Condition::Impl { .. } => true,
            Condition::Quant { quantifier, .. } => quantifier == "every",
            Condition::Neg { .. } => false,
        }
    }

    pub fn kind_name(&self) -> &str {
        match self {
            Condition::Quant { quantifier, .. } => quantifier,
            Condition::Neg { .. } => "neg",
            Condition::Impl { .. } => "impl",
        }
    }

    /// Referents bound by the condition itself (not by its boxes).
    pub fn bound_var(&self) -> Option<&Referent> {
        match self {
            Condition::Quant { var, .. } => Some(var),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub label: Label,
    pub cond: Condition,
    /// Correlation slot; defaults to the node's position in its clause.
    pub slot: Option<String>,
}

/// Right-hand side of an explicit subordination edge.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    Label(Label),
    Scope(Label),
    Res(Label),
}

impl Bound {
    pub fn label(&self) -> &Label {
        match self {
            Bound::Label(l) | Bound::Scope(l) | Bound::Res(l) => l,
        }
    }
}

/// `below ≤ above` as written in a clause's ORD.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrdEdge {
    pub below: Label,
    pub above: Bound,
}

impl OrdEdge {
    pub fn under_scope(below: &Label, of: &Label) -> Self {
        OrdEdge {
            below: below.clone(),
            above: Bound::Scope(of.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub index: Option<CorrelationIndex>,
    pub upper: Label,
    pub lower: Label,
    /// Label this clause's upper bound is subordinated to; `None` for the top clause.
    pub host: Option<Label>,
    pub nodes: Vec<Component>,
    /// Labels of `sub` components: plain boxes directly below the upper bound
    /// that host a subordinate clause.
    pub attachments: Vec<Label>,
    pub ord: Vec<OrdEdge>,
    /// Explicit reading set, used when a set of readings is not the set of
    /// linear extensions of any single order.
    pub readings: Option<BTreeSet<Vec<Label>>>,
}

impl Clause {
    pub fn node(&self, l: &Label) -> Option<&Component> {
        self.nodes.iter().find(|c| &c.label == l)
    }

    pub fn slot_of(&self, position: usize) -> String {
        self.nodes[position]
            .slot
            .clone()
            .unwrap_or_else(|| position.to_string())
    }

    pub fn slots(&self) -> Vec<String> {
        (0..self.nodes.len()).map(|i| self.slot_of(i)).collect()
    }

    pub fn node_labels(&self) -> Vec<Label> {
        self.nodes.iter().map(|c| c.label.clone()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Udrs {
    pub top: Label,
    pub boxes: BTreeMap<Label, DrsBox>,
    pub clauses: Vec<Clause>,
}

/// Hyponymy and other lexical facts carried alongside a database.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Lexicon {
    /// `(narrow, broad)`: everything `narrow` is `broad`.
    pub hypo: Vec<(String, String)>,
    /// Pairs of predicates with complementary extensions.
    pub complement: Vec<(String, String)>,
    /// Quantifier pairs `(wide, narrow)` that may exchange scope.
    pub pi: Vec<(String, String)>,
    /// Extra determiner replacements `(from, to)`.
    pub det: Vec<(String, String)>,
}

impl Lexicon {
    pub fn is_empty(&self) -> bool {
        self.hypo.is_empty() && self.complement.is_empty() && self.pi.is_empty() && self.det.is_empty()
    }

    pub fn merge(&mut self, other: &Lexicon) {
        fn add(into: &mut Vec<(String, String)>, from: &[(String, String)]) {
            for p in from {
                if !into.contains(p) {
                    into.push(p.clone());
                }
            }
        }
        add(&mut self.hypo, &other.hypo);
        add(&mut self.complement, &other.complement);
        add(&mut self.pi, &other.pi);
        add(&mut self.det, &other.det);
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Database {
    pub entries: Vec<Udrs>,
    pub registry: BTreeSet<CorrelationIndex>,
    pub lexicon: Lexicon,
    next_fresh: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("unknown label {0}")]
    UnknownLabel(Label),
    #[error("subordination is not a partial order: {0} and {1} lie on a cycle")]
    NotPartialOrder(Label, Label),
    #[error("label {0} names a scope-bearing component; take its res or scope")]
    NodeLabel(Label),
    #[error("top label {0} already used in the database")]
    DuplicateTop(Label),
    #[error("discourse referent {0} already declared")]
    RefCollision(Referent),
}

/// A failed well-formedness condition.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("label {0} is defined twice")]
    DuplicateLabel(Label),
    #[error("label {0} is referenced but never defined")]
    UnknownLabel(Label),
    #[error("the first clause must have the top label as its upper bound")]
    TopClause,
    #[error("component {0}: restrictor and scope must be distinct labels")]
    SlotsNotDistinct(Label),
    #[error("component {0} carries a distinguished condition and must not carry a box")]
    ComponentWithBox(Label),
    #[error("lower bound {0} carries a distinguished condition")]
    LowerBoundDistinguished(Label),
    #[error("lower bound {0} has a label below it")]
    LowerBoundNotMinimal(Label),
    #[error("edge {0} ≤ {1} is not between nodes of one clause")]
    BadOrdEdge(Label, Label),
    #[error("ORD is not a partial order ({0} and {1} lie on a cycle)")]
    NotPartialOrder(Label, Label),
    #[error("label {0} is not below the top")]
    NotBelowTop(Label),
    #[error("labels {0} and {1} have no least upper bound")]
    NoLeastUpperBound(Label, Label),
    #[error("discourse referent {0} declared more than once")]
    ReferentRedeclared(Referent),
    #[error("clause {0} host {1} is not a box label")]
    BadHost(Label, Label),
    #[error("clause {0}: explicit reading is not a consistent order of its nodes")]
    BadReading(Label),
    #[error("clause {0}: slot {1} used twice")]
    DuplicateSlot(Label, String),
}

impl Violation {
    /// Which part of the well-formedness definition failed.
    pub fn rule(&self) -> &'static str {
        match self {
            Violation::SlotsNotDistinct(_) | Violation::ComponentWithBox(_) => "component",
            Violation::LowerBoundDistinguished(_)
            | Violation::LowerBoundNotMinimal(_)
            | Violation::BadOrdEdge(..)
            | Violation::NotPartialOrder(..)
            | Violation::BadHost(..)
            | Violation::BadReading(_)
            | Violation::DuplicateSlot(..) => "clause",
            Violation::TopClause
            | Violation::NotBelowTop(_)
            | Violation::NoLeastUpperBound(..) => "udrs",
            Violation::DuplicateLabel(_)
            | Violation::UnknownLabel(_)
            | Violation::ReferentRedeclared(_) => "labels",
        }
    }
}

impl Udrs {
    pub fn top_clause(&self) -> &Clause {
        &self.clauses[0]
    }

    pub fn index(&self) -> Option<&CorrelationIndex> {
        self.clauses[0].index.as_ref()
    }

    pub fn set_index(&mut self, index: Option<CorrelationIndex>) {
        self.clauses[0].index = index;
    }

    /// Component carrying `label`, with its clause position.
    pub fn component(&self, label: &Label) -> Option<(usize, &Component)> {
        self.clauses
            .iter()
            .enumerate()
            .find_map(|(ci, c)| c.node(label).map(|n| (ci, n)))
    }

    pub fn is_node(&self, label: &Label) -> bool {
        self.component(label).is_some()
    }

    pub fn clause_of_node(&self, label: &Label) -> Option<usize> {
        self.component(label).map(|(ci, _)| ci)
    }

    /// `scope(l)`: the scope slot of a component, the label itself otherwise.
    pub fn scope_of(&self, l: &Label) -> Label {
        match self.component(l) {
            Some((_, c)) => c.cond.scope().clone(),
            None => l.clone(),
        }
    }

    pub fn res_of(&self, l: &Label) -> Label {
        match self.component(l) {
            Some((_, c)) => c.cond.res().clone(),
            None => l.clone(),
        }
    }

    pub fn resolve_bound(&self, b: &Bound) -> Label {
        match b {
            Bound::Label(l) => l.clone(),
            Bound::Scope(l) => self.scope_of(l),
            Bound::Res(l) => self.res_of(l),
        }
    }

    /// Every label defined in the structure, in a stable order.
    pub fn labels(&self) -> Vec<Label> {
        let mut out: Vec<Label> = self.boxes.keys().cloned().collect();
        for c in &self.clauses {
            for n in &c.nodes {
                out.push(n.label.clone());
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Referents declared anywhere (box universes and quantifier variables).
    pub fn declared_referents(&self) -> Vec<Referent> {
        let mut out = Vec::new();
        for b in self.boxes.values() {
            out.extend(b.universe.iter().cloned());
        }
        for c in &self.clauses {
            for n in &c.nodes {
                if let Some(v) = n.cond.bound_var() {
                    out.push(v.clone());
                }
            }
        }
        out
    }

    pub fn predicates(&self) -> BTreeSet<(String, usize)> {
        self.boxes
            .values()
            .flat_map(|b| b.atoms.iter())
            .map(|a| (a.pred.clone(), a.args.len()))
            .collect()
    }

    pub fn constants(&self) -> BTreeSet<String> {
        self.boxes
            .values()
            .flat_map(|b| b.atoms.iter())
            .flat_map(|a| a.args.iter())
            .filter_map(|t| match t {
                Term::Const(c) => Some(c.to_string()),
                Term::Ref(_) => None,
            })
            .collect()
    }

    pub fn quantifiers(&self) -> BTreeSet<String> {
        self.clauses
            .iter()
            .flat_map(|c| c.nodes.iter())
            .map(|n| n.cond.kind_name().to_string())
            .collect()
    }

    /// Indices of clauses hosted (directly) under `label`.
    pub fn hosted_under(&self, label: &Label) -> Vec<usize> {
        self.clauses
            .iter()
            .enumerate()
            .filter(|(_, c)| c.host.as_ref() == Some(label))
            .map(|(i, _)| i)
            .collect()
    }

    /// Every index occurring on any clause.
    pub fn indices(&self) -> BTreeSet<CorrelationIndex> {
        self.clauses.iter().filter_map(|c| c.index.clone()).collect()
    }

    /// Number of clauses whose nodes are not totally ordered by the closure.
    pub fn is_unambiguous(&self) -> bool {
        match implicit_closure(self) {
            Ok(cl) => self.clauses.iter().all(|c| {
                if let Some(r) = &c.readings {
                    return r.len() <= 1;
                }
                let ls = c.node_labels();
                ls.iter().enumerate().all(|(i, a)| {
                    ls[i + 1..]
                        .iter()
                        .all(|b| cl.leq(a, b) || cl.leq(b, a))
                })
            }),
            Err(_) => false,
        }
    }

    pub fn apply_renaming(&self, ren: &Renaming) -> Udrs {
        let lab = |l: &Label| ren.label(l);
        let rf = |r: &Referent| ren.referent(r);
        let term = |t: &Term| match t {
            Term::Ref(r) => ren.term_for(r),
            Term::Const(_) => t.clone(),
        };
        let boxes = self
            .boxes
            .iter()
            .map(|(l, b)| {
                (
                    lab(l),
                    DrsBox {
                        universe: b.universe.iter().map(rf).collect(),
                        atoms: b
                            .atoms
                            .iter()
                            .map(|a| Atom {
                                pred: a.pred.clone(),
                                args: a.args.iter().map(term).collect(),
                            })
                            .collect(),
                    },
                )
            })
            .collect();
        let clauses = self
            .clauses
            .iter()
            .map(|c| Clause {
                index: c.index.clone(),
                upper: lab(&c.upper),
                lower: lab(&c.lower),
                host: c.host.as_ref().map(lab),
                nodes: c
                    .nodes
                    .iter()
                    .map(|n| Component {
                        label: lab(&n.label),
                        slot: n.slot.clone(),
                        cond: match &n.cond {
                            Condition::Quant {
                                quantifier,
                                var,
                                res,
                                scope,
                            } => Condition::Quant {
                                quantifier: quantifier.clone(),
                                var: rf(var),
                                res: lab(res),
                                scope: lab(scope),
                            },
                            Condition::Neg { body } => Condition::Neg { body: lab(body) },
                            Condition::Impl { ante, cons } => Condition::Impl {
                                ante: lab(ante),
                                cons: lab(cons),
                            },
                        },
                    })
                    .collect(),
                attachments: c.attachments.iter().map(lab).collect(),
                ord: c
                    .ord
                    .iter()
                    .map(|e| OrdEdge {
                        below: lab(&e.below),
                        above: match &e.above {
                            Bound::Label(l) => Bound::Label(lab(l)),
                            Bound::Scope(l) => Bound::Scope(lab(l)),
                            Bound::Res(l) => Bound::Res(lab(l)),
                        },
                    })
                    .collect(),
                readings: c
                    .readings
                    .as_ref()
                    .map(|rs| rs.iter().map(|r| r.iter().map(lab).collect()).collect()),
            })
            .collect();
        Udrs {
            top: lab(&self.top),
            boxes,
            clauses,
        }
    }
}

/// Label and referent substitution; unmapped names are kept.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Renaming {
    pub labels: BTreeMap<Label, Label>,
    pub refs: BTreeMap<Referent, Term>,
}

impl Renaming {
    pub fn label(&self, l: &Label) -> Label {
        self.labels.get(l).cloned().unwrap_or_else(|| l.clone())
    }

    pub fn term_for(&self, r: &Referent) -> Term {
        self.refs.get(r).cloned().unwrap_or_else(|| Term::Ref(r.clone()))
    }

    /// Declaration sites can only hold referents; constants fall back to the original.
    pub fn referent(&self, r: &Referent) -> Referent {
        match self.refs.get(r) {
            Some(Term::Ref(x)) => x.clone(),
            _ => r.clone(),
        }
    }
}

/// Source of names that do not clash with anything already in use.
#[derive(Clone, Debug, Default)]
pub struct Fresh {
    next: u64,
    taken: BTreeSet<String>,
}

impl Fresh {
    pub fn new(next: u64) -> Self {
        Fresh {
            next,
            taken: BTreeSet::new(),
        }
    }

    pub fn reserve_udrs(&mut self, u: &Udrs) {
        for l in u.labels() {
            self.taken.insert(l.to_string());
        }
        for r in u.declared_referents() {
            self.taken.insert(r.to_string());
        }
        for c in u.constants() {
            self.taken.insert(c);
        }
        for i in u.indices() {
            self.taken.insert(i.to_string());
        }
    }

    pub fn reserve(&mut self, name: &str) {
        self.taken.insert(name.to_string());
    }

    pub fn counter(&self) -> u64 {
        self.next
    }

    fn name(&mut self, prefix: &str) -> String {
        loop {
            let candidate = format!("{prefix}{}", self.next);
            self.next += 1;
            if self.taken.insert(candidate.clone()) {
                return candidate;
            }
        }
    }

    pub fn label(&mut self) -> Label {
        Label::new(self.name("k"))
    }

    pub fn referent(&mut self) -> Referent {
        Referent::new(self.name("v"))
    }

    pub fn constant(&mut self) -> String {
        self.name("c")
    }

    pub fn index(&mut self) -> CorrelationIndex {
        CorrelationIndex::new(self.name("i"))
    }
}

/// Reflexive-transitive closure of the subordination relation.
#[derive(Clone, Debug)]
pub struct Closure {
    labels: Vec<Label>,
    pos: BTreeMap<Label, usize>,
    leq: Vec<bool>,
}

impl Closure {
    pub fn contains_label(&self, l: &Label) -> bool {
        self.pos.contains_key(l)
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// `a ≤ b`.
    pub fn leq(&self, a: &Label, b: &Label) -> bool {
        match (self.pos.get(a), self.pos.get(b)) {
            (Some(&i), Some(&j)) => self.leq[i * self.labels.len() + j],
            _ => false,
        }
    }

    pub fn lt(&self, a: &Label, b: &Label) -> bool {
        a != b && self.leq(a, b)
    }

    pub fn pairs(&self) -> BTreeSet<(Label, Label)> {
        let n = self.labels.len();
        let mut out = BTreeSet::new();
        for i in 0..n {
            for j in 0..n {
                if self.leq[i * n + j] {
                    out.insert((self.labels[i].clone(), self.labels[j].clone()));
                }
            }
        }
        out
    }

    pub fn below(&self, l: &Label) -> Vec<Label> {
        self.labels
            .iter()
            .filter(|x| self.leq(x, l))
            .cloned()
            .collect()
    }

    /// Least upper bound, if one exists.
    pub fn lub(&self, a: &Label, b: &Label) -> Option<Label> {
        let uppers: Vec<&Label> = self
            .labels
            .iter()
            .filter(|x| self.leq(a, x) && self.leq(b, x))
            .collect();
        uppers
            .iter()
            .find(|u| uppers.iter().all(|v| self.leq(u, v)))
            .map(|u| (*u).clone())
    }
}

/// Edges implied by the component structure, plus the explicit ORD.
pub fn structural_edges(u: &Udrs) -> Vec<(Label, Label)> {
    let mut edges = Vec::new();
    for c in &u.clauses {
        if let Some(h) = &c.host {
            edges.push((c.upper.clone(), h.clone()));
        }
        if c.nodes.is_empty() {
            edges.push((c.lower.clone(), c.upper.clone()));
        }
        for n in &c.nodes {
            edges.push((n.label.clone(), c.upper.clone()));
            edges.push((c.lower.clone(), n.cond.scope().clone()));
            for s in n.cond.slots() {
                edges.push((s.clone(), n.label.clone()));
            }
        }
        for a in &c.attachments {
            edges.push((a.clone(), c.upper.clone()));
        }
        for e in &c.ord {
            edges.push((e.below.clone(), u.resolve_bound(&e.above)));
        }
    }
    edges
}

fn close(labels: Vec<Label>, edges: &[(Label, Label)]) -> Result<Closure, StructureError> {
    let pos: BTreeMap<Label, usize> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.clone(), i))
        .collect();
    let n = labels.len();
    let mut leq = vec![false; n * n];
    for i in 0..n {
        leq[i * n + i] = true;
    }
    for (a, b) in edges {
        let i = *pos.get(a).ok_or_else(|| StructureError::UnknownLabel(a.clone()))?;
        let j = *pos.get(b).ok_or_else(|| StructureError::UnknownLabel(b.clone()))?;
        leq[i * n + j] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if leq[i * n + k] {
                for j in 0..n {
                    if leq[k * n + j] {
                        leq[i * n + j] = true;
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if leq[i * n + j] && leq[j * n + i] {
                return Err(StructureError::NotPartialOrder(
                    labels[i].clone(),
                    labels[j].clone(),
                ));
            }
        }
    }
    Ok(Closure { labels, pos, leq })
}

/// Closure of the explicit ORD together with every implied edge.
pub fn implicit_closure(u: &Udrs) -> Result<Closure, StructureError> {
    close(u.labels(), &structural_edges(u))
}

/// Checks every well-formedness condition; the first failure is reported.
pub fn validate(u: &Udrs) -> Result<(), Violation> {
    let mut seen = BTreeSet::new();
    let mut defined = |l: &Label| -> Result<(), Violation> {
        if seen.insert(l.clone()) {
            Ok(())
        } else {
            Err(Violation::DuplicateLabel(l.clone()))
        }
    };
    // Every box label and node label is defined exactly once.
    for c in &u.clauses {
        for n in &c.nodes {
            defined(&n.label)?;
        }
    }
    for l in u.boxes.keys() {
        defined(l)?;
    }
    let node_labels: BTreeSet<&Label> = u
        .clauses
        .iter()
        .flat_map(|c| c.nodes.iter().map(|n| &n.label))
        .collect();
    let has_box = |l: &Label| u.boxes.contains_key(l);

    if u.clauses.is_empty() || u.clauses[0].upper != u.top || u.clauses[0].host.is_some() {
        return Err(Violation::TopClause);
    }
    for c in u.clauses.iter().skip(1) {
        match &c.host {
            Some(h) if has_box(h) => {}
            Some(h) => return Err(Violation::BadHost(c.upper.clone(), h.clone())),
            None => return Err(Violation::TopClause),
        }
    }

    for c in &u.clauses {
        for n in &c.nodes {
            match &n.cond {
                Condition::Quant { res, scope, .. } | Condition::Impl { ante: res, cons: scope } => {
                    if res == scope {
                        return Err(Violation::SlotsNotDistinct(n.label.clone()));
                    }
                }
                Condition::Neg { .. } => {}
            }
            for s in n.cond.slots() {
                if !has_box(s) {
                    return Err(Violation::UnknownLabel(s.clone()));
                }
            }
        }
        if node_labels.contains(&c.lower) {
            return Err(Violation::LowerBoundDistinguished(c.lower.clone()));
        }
        for l in [&c.upper, &c.lower].into_iter().chain(c.attachments.iter()) {
            if !has_box(l) {
                return Err(Violation::UnknownLabel(l.clone()));
            }
        }
        let mut slots = BTreeSet::new();
        for s in c.slots() {
            if !slots.insert(s.clone()) {
                return Err(Violation::DuplicateSlot(c.upper.clone(), s));
            }
        }
    }
    // Explicit edges relate a node or the lower bound to a node (or its scope) of the same clause.
    let all_labels: BTreeSet<Label> = u.labels().into_iter().collect();
    let lowers: BTreeSet<&Label> = u.clauses.iter().map(|c| &c.lower).collect();
    for c in &u.clauses {
        for e in &c.ord {
            let target = e.above.label();
            for l in [&e.below, target] {
                if !all_labels.contains(l) {
                    return Err(Violation::UnknownLabel(l.clone()));
                }
            }
            let resolved = u.resolve_bound(&e.above);
            if lowers.contains(&resolved) && resolved != e.below {
                return Err(Violation::LowerBoundNotMinimal(resolved));
            }
            let below_ok = c.node(&e.below).is_some() || e.below == c.lower;
            let above_ok = c.node(target).is_some() && !matches!(e.above, Bound::Res(_));
            if !(below_ok && above_ok) {
                return Err(Violation::BadOrdEdge(e.below.clone(), target.clone()));
            }
        }
    }

    let mut refs = BTreeSet::new();
    for r in u.declared_referents() {
        if !refs.insert(r.clone()) {
            return Err(Violation::ReferentRedeclared(r));
        }
    }

    let closure = implicit_closure(u).map_err(|e| match e {
        StructureError::NotPartialOrder(a, b) => Violation::NotPartialOrder(a, b),
        StructureError::UnknownLabel(l) => Violation::UnknownLabel(l),
        other => unreachable!("closure error {other}"),
    })?;

    for c in &u.clauses {
        if let Some(rs) = &c.readings {
            let mut expected = c.node_labels();
            expected.sort();
            for r in rs {
                let mut got = r.clone();
                got.sort();
                let consistent = r.iter().enumerate().all(|(i, a)| {
                    r[i + 1..].iter().all(|b| !closure.lt(a, b))
                });
                if got != expected || !consistent {
                    return Err(Violation::BadReading(c.upper.clone()));
                }
            }
        }
    }

    for l in closure.labels() {
        if !closure.leq(l, &u.top) {
            return Err(Violation::NotBelowTop(l.clone()));
        }
    }
    Ok(())
}

/// Exhaustive least-upper-bound scan; intended for small structures.
pub fn check_semilattice(u: &Udrs) -> Result<(), Violation> {
    let closure = implicit_closure(u).map_err(|e| match e {
        StructureError::NotPartialOrder(a, b) => Violation::NotPartialOrder(a, b),
        StructureError::UnknownLabel(l) => Violation::UnknownLabel(l),
        other => unreachable!("closure error {other}"),
    })?;
    let ls = closure.labels().to_vec();
    for (i, a) in ls.iter().enumerate() {
        for b in &ls[i..] {
            if closure.lub(a, b).is_none() {
                return Err(Violation::NoLeastUpperBound(a.clone(), b.clone()));
            }
        }
    }
    Ok(())
}

/// The part of `u` dominated by the box label `l`.
///
/// A clause that is only partly below `l` is cut down to the nodes that are
/// forced below it; when its lower bound is not among them an empty lower
/// bound is synthesised.
pub fn sub_udrs(u: &Udrs, l: &Label) -> Result<Udrs, StructureError> {
    let closure = implicit_closure(u)?;
    if !closure.contains_label(l) {
        return Err(StructureError::UnknownLabel(l.clone()));
    }
    if u.is_node(l) {
        return Err(StructureError::NodeLabel(l.clone()));
    }
    if l == &u.top {
        return Ok(u.clone());
    }
    let inside = |x: &Label| closure.leq(x, l);
    let mut boxes: BTreeMap<Label, DrsBox> = u
        .boxes
        .iter()
        .filter(|(k, _)| inside(k))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();

    let mut clauses = Vec::new();
    let mut top_clause: Option<Clause> = None;
    for c in &u.clauses {
        if inside(&c.upper) {
            let mut c = c.clone();
            if &c.upper == l {
                c.host = None;
                top_clause = Some(c);
            } else {
                clauses.push(c);
            }
            continue;
        }
        let nodes: Vec<Component> = c
            .nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| inside(&n.label))
            .map(|(i, n)| Component {
                slot: Some(c.slot_of(i)),
                ..n.clone()
            })
            .collect();
        let owns_l = c
            .nodes
            .iter()
            .any(|n| n.cond.slots().contains(&l))
            || c.attachments.contains(l)
            || &c.lower == l;
        if !owns_l {
            continue;
        }
        let kept: BTreeSet<Label> = nodes.iter().map(|n| n.label.clone()).collect();
        let lower = if inside(&c.lower) && &c.lower != l {
            c.lower.clone()
        } else {
            let mut name = format!("{l}.lb");
            while closure.contains_label(&Label::new(&name)) {
                name.push('\'');
            }
            let lb = Label::new(name);
            boxes.insert(lb.clone(), DrsBox::default());
            lb
        };
        let ord = c
            .ord
            .iter()
            .filter(|e| {
                (kept.contains(&e.below) || e.below == lower) && kept.contains(e.above.label())
            })
            .cloned()
            .collect();
        top_clause = Some(Clause {
            index: c.index.clone(),
            upper: l.clone(),
            lower,
            host: None,
            nodes,
            attachments: c.attachments.iter().filter(|a| inside(a) && *a != l).cloned().collect(),
            ord,
            readings: None,
        });
    }
    let top_clause = top_clause.unwrap_or_else(|| {
        let mut name = format!("{l}.lb");
        while closure.contains_label(&Label::new(&name)) {
            name.push('\'');
        }
        let lb = Label::new(name);
        boxes.insert(lb.clone(), DrsBox::default());
        Clause {
            index: None,
            upper: l.clone(),
            lower: lb,
            host: None,
            nodes: vec![],
            attachments: vec![],
            ord: vec![],
            readings: None,
        }
    });
    let mut all = vec![top_clause];
    all.extend(clauses);
    Ok(Udrs {
        top: l.clone(),
        boxes,
        clauses: all,
    })
}

/// Copy of `u` with every label and referent replaced by a fresh one.
/// Correlation indices and slots are kept.
pub fn fresh_variant(u: &Udrs, fresh: &mut Fresh) -> (Udrs, Renaming) {
    let mut ren = Renaming::default();
    for l in u.labels() {
        ren.labels.insert(l, fresh.label());
    }
    for r in u.declared_referents() {
        ren.refs.insert(r, Term::Ref(fresh.referent()));
    }
    (u.apply_renaming(&ren), ren)
}

impl Database {
    pub fn new() -> Self {
        Database::default()
    }

    pub fn with_entries(entries: Vec<Udrs>) -> Result<Self, StructureError> {
        let mut db = Database::new();
        for e in entries {
            db.push(e)?;
        }
        Ok(db)
    }

    pub fn push(&mut self, u: Udrs) -> Result<usize, StructureError> {
        if self.entries.iter().any(|e| e.top == u.top) {
            return Err(StructureError::DuplicateTop(u.top.clone()));
        }
        self.registry.extend(u.indices());
        self.entries.push(u);
        Ok(self.entries.len() - 1)
    }

    pub fn fresh_counter(&self) -> u64 {
        self.next_fresh
    }

    /// A name source that avoids every name in the database.
    pub fn fresh(&self) -> Fresh {
        let mut f = Fresh::new(self.next_fresh);
        for e in &self.entries {
            f.reserve_udrs(e);
        }
        for i in &self.registry {
            f.reserve(i.as_str());
        }
        f
    }

    /// Records how far a name source advanced, so later names stay fresh.
    pub fn commit_fresh(&mut self, f: &Fresh) {
        self.next_fresh = self.next_fresh.max(f.counter());
    }

    pub fn predicates(&self) -> BTreeSet<(String, usize)> {
        self.entries.iter().flat_map(|e| e.predicates()).collect()
    }

    pub fn constants(&self) -> BTreeSet<String> {
        self.entries.iter().flat_map(|e| e.constants()).collect()
    }
}
