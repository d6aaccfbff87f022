//! Finite-model interpretation of fully scoped readings, and bounded-model
//! checks of the four candidate consequence relations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::disambig::{correlated_assignments, ConfigError, CorrelatedAssignment, Scoping};
use crate::structure::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mono {
    Up,
    Down,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Persistence {
    Persistent,
    AntiPersistent,
    None,
}

impl Persistence {
    pub fn flip(self) -> Self {
        match self {
            Persistence::Persistent => Persistence::AntiPersistent,
            Persistence::AntiPersistent => Persistence::Persistent,
            Persistence::None => Persistence::None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Persistence::Persistent => "persistent",
            Persistence::AntiPersistent => "anti-persistent",
            Persistence::None => "none",
        }
    }
}

/// Truth conditions in terms of `|A|` and `|A ∩ B|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truth {
    Every,
    Some,
    No,
    AtMost(usize),
    MoreThanHalf,
}

impl Truth {
    pub fn holds(self, a: usize, ab: usize) -> bool {
        match self {
            Truth::Every => ab == a,
            Truth::Some => ab > 0,
            Truth::No => ab == 0,
            Truth::AtMost(k) => ab <= k,
            Truth::MoreThanHalf => 2 * ab > a,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantifierSemantics {
    pub name: String,
    pub truth: Truth,
    /// Monotonicity in the restrictor argument.
    pub restrictor: Mono,
    /// Monotonicity in the scope argument.
    pub scope: Mono,
}

impl QuantifierSemantics {
    pub fn persistence(&self) -> Persistence {
        match self.restrictor {
            Mono::Up => Persistence::Persistent,
            Mono::Down => Persistence::AntiPersistent,
            Mono::None => Persistence::None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("unknown quantifier {0}")]
    UnknownQuantifier(String),
    #[error("quantifier {0}: declared {1} monotonicity does not match its truth conditions")]
    BadFlag(String, &'static str),
    #[error("predicate {0} used with different arities")]
    ArityMismatch(String),
    #[error("symbol {0} is not interpreted in the model")]
    Uninterpreted(String),
    #[error("referent {0} is not accessible where it is used")]
    Unbound(Referent),
    #[error("model space too large: {0}")]
    TooLarge(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// Determiner table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantifierTable {
    entries: BTreeMap<String, QuantifierSemantics>,
}

fn monotone(truth: Truth, n: usize, restrictor: bool, up: bool) -> bool {
    // Exhaustive over subsets A, B of an n-element domain: growing the
    // chosen argument by one element never turns truth into falsity
    // (or, for `up == false`, never turns falsity into truth).
    let full = 1u32 << n;
    for a in 0..full {
        for b in 0..full {
            for e in 0..n {
                let bit = 1u32 << e;
                let (a2, b2) = if restrictor { (a | bit, b) } else { (a, b | bit) };
                if (a2, b2) == (a, b) {
                    continue;
                }
                let count = |x: u32, y: u32| ((x.count_ones()) as usize, (x & y).count_ones() as usize);
                let (ca, cab) = count(a, b);
                let (ca2, cab2) = count(a2, b2);
                let before = truth.holds(ca, cab);
                let after = truth.holds(ca2, cab2);
                if up && before && !after {
                    return false;
                }
                if !up && !before && after {
                    return false;
                }
            }
        }
    }
    true
}

/// Strongest monotonicity flag valid for one argument on domains up to `n`.
pub fn derived_mono(truth: Truth, restrictor: bool, n: usize) -> Mono {
    let up = (1..=n).all(|k| monotone(truth, k, restrictor, true));
    let down = (1..=n).all(|k| monotone(truth, k, restrictor, false));
    match (up, down) {
        (true, false) => Mono::Up,
        (false, true) => Mono::Down,
        _ => Mono::None,
    }
}

impl QuantifierTable {
    /// The standard determiners, with "few" read as "at most `few_k`".
    pub fn standard(few_k: usize) -> Self {
        let mut t = QuantifierTable {
            entries: BTreeMap::new(),
        };
        let mut add = |name: &str, truth, restrictor, scope| {
            t.entries.insert(
                name.to_string(),
                QuantifierSemantics {
                    name: name.to_string(),
                    truth,
                    restrictor,
                    scope,
                },
            );
        };
        add("every", Truth::Every, Mono::Down, Mono::Up);
        add("some", Truth::Some, Mono::Up, Mono::Up);
        add("a", Truth::Some, Mono::Up, Mono::Up);
        add("at-least-one", Truth::Some, Mono::Up, Mono::Up);
        add("no", Truth::No, Mono::Down, Mono::Down);
        add("few", Truth::AtMost(few_k), Mono::Down, Mono::Down);
        add("more-than-half", Truth::MoreThanHalf, Mono::None, Mono::Up);
        t
    }

    /// Registers a determiner after checking its flags.
    pub fn insert(&mut self, q: QuantifierSemantics) -> Result<(), OracleError> {
        check_flags(&q)?;
        self.entries.insert(q.name.clone(), q);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&QuantifierSemantics, OracleError> {
        self.entries
            .get(name)
            .ok_or_else(|| OracleError::UnknownQuantifier(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Checks every declared flag against the truth function.
    pub fn validate(&self) -> Result<(), OracleError> {
        self.entries.values().try_for_each(check_flags)
    }
}

fn check_flags(q: &QuantifierSemantics) -> Result<(), OracleError> {
    for (declared, restrictor, what) in [(q.restrictor, true, "restrictor"), (q.scope, false, "scope")] {
        let ok = match declared {
            Mono::Up => (1..=4).all(|n| monotone(q.truth, n, restrictor, true)),
            Mono::Down => (1..=4).all(|n| monotone(q.truth, n, restrictor, false)),
            Mono::None => derived_mono(q.truth, restrictor, 4) == Mono::None,
        };
        if !ok {
            return Err(OracleError::BadFlag(q.name.clone(), what));
        }
    }
    Ok(())
}

/// A fully scoped DRS.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ScopedDrs {
    pub universe: Vec<Referent>,
    pub conds: Vec<ScopedCond>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScopedCond {
    Atom(Atom),
    Neg(ScopedDrs),
    Impl(ScopedDrs, ScopedDrs),
    Quant {
        quantifier: String,
        var: Referent,
        res: ScopedDrs,
        scope: ScopedDrs,
    },
    Falsum,
}

impl ScopedDrs {
    fn merge(&mut self, other: ScopedDrs) {
        self.universe.extend(other.universe);
        self.conds.extend(other.conds);
    }

    /// Predicates with their arities, and constants.
    pub fn symbols(&self) -> (BTreeSet<(String, usize)>, BTreeSet<String>) {
        let mut preds = BTreeSet::new();
        let mut consts = BTreeSet::new();
        self.walk(&mut |a| {
            preds.insert((a.pred.clone(), a.args.len()));
            for t in &a.args {
                if let Term::Const(c) = t {
                    consts.insert(c.to_string());
                }
            }
        });
        (preds, consts)
    }

    fn walk(&self, f: &mut impl FnMut(&Atom)) {
        for c in &self.conds {
            match c {
                ScopedCond::Atom(a) => f(a),
                ScopedCond::Neg(d) => d.walk(f),
                ScopedCond::Impl(a, b) => {
                    a.walk(f);
                    b.walk(f);
                }
                ScopedCond::Quant { res, scope, .. } => {
                    res.walk(f);
                    scope.walk(f);
                }
                ScopedCond::Falsum => {}
            }
        }
    }

    fn declared(&self, out: &mut BTreeSet<Referent>) {
        out.extend(self.universe.iter().cloned());
        for c in &self.conds {
            match c {
                ScopedCond::Neg(d) => d.declared(out),
                ScopedCond::Impl(a, b) => {
                    a.declared(out);
                    b.declared(out);
                }
                ScopedCond::Quant { var, res, scope, .. } => {
                    out.insert(var.clone());
                    res.declared(out);
                    scope.declared(out);
                }
                ScopedCond::Atom(_) | ScopedCond::Falsum => {}
            }
        }
    }

    /// Referents used but declared nowhere inside.
    pub fn free_referents(&self) -> BTreeSet<Referent> {
        let mut declared = BTreeSet::new();
        self.declared(&mut declared);
        let mut free = BTreeSet::new();
        self.walk(&mut |a| {
            for r in a.referents() {
                if !declared.contains(r) {
                    free.insert(r.clone());
                }
            }
        });
        free
    }
}

impl fmt::Display for ScopedDrs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, r) in self.universe.iter().enumerate() {
            write!(f, "{}{r}", if i > 0 { " " } else { "" })?;
        }
        write!(f, " |")?;
        for c in &self.conds {
            write!(f, " {c}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for ScopedCond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScopedCond::Atom(a) => write!(f, "{a}"),
            ScopedCond::Neg(k) => write!(f, "(not {k})"),
            ScopedCond::Impl(a, b) => write!(f, "(=> {a} {b})"),
            ScopedCond::Quant {
                quantifier,
                var,
                res,
                scope,
            } => write!(f, "({quantifier} {var} {res} {scope})"),
            ScopedCond::Falsum => write!(f, "falsum"),
        }
    }
}

fn plain_box(u: &Udrs, l: &Label, s: &Scoping) -> Result<ScopedDrs, StructureError> {
    let b = u
        .boxes
        .get(l)
        .ok_or_else(|| StructureError::UnknownLabel(l.clone()))?;
    let mut d = ScopedDrs {
        universe: b.universe.clone(),
        conds: b.atoms.iter().cloned().map(ScopedCond::Atom).collect(),
    };
    for ci in u.hosted_under(l) {
        d.merge(resolve_clause(u, ci, s)?);
    }
    Ok(d)
}

fn resolve_clause(u: &Udrs, ci: usize, s: &Scoping) -> Result<ScopedDrs, StructureError> {
    let c = &u.clauses[ci];
    let b = u
        .boxes
        .get(&c.upper)
        .ok_or_else(|| StructureError::UnknownLabel(c.upper.clone()))?;
    let mut d = ScopedDrs {
        universe: b.universe.clone(),
        conds: b.atoms.iter().cloned().map(ScopedCond::Atom).collect(),
    };
    for a in &c.attachments {
        d.merge(plain_box(u, a, s)?);
    }
    if s.void.contains(&c.upper) {
        d.conds.push(ScopedCond::Falsum);
        return Ok(d);
    }
    let order = s
        .order(&c.upper)
        .ok_or_else(|| StructureError::UnknownLabel(c.upper.clone()))?;
    // Build from the innermost scope outwards.
    let mut inner = plain_box(u, &c.lower, s)?;
    for l in order.iter().rev() {
        let n = c
            .node(l)
            .ok_or_else(|| StructureError::UnknownLabel(l.clone()))?;
        let cond = match &n.cond {
            Condition::Quant {
                quantifier,
                var,
                res,
                scope,
            } => {
                let mut sc = plain_box(u, scope, s)?;
                sc.merge(inner);
                ScopedCond::Quant {
                    quantifier: quantifier.clone(),
                    var: var.clone(),
                    res: plain_box(u, res, s)?,
                    scope: sc,
                }
            }
            Condition::Neg { body } => {
                let mut b = plain_box(u, body, s)?;
                b.merge(inner);
                ScopedCond::Neg(b)
            }
            Condition::Impl { ante, cons } => {
                let mut c2 = plain_box(u, cons, s)?;
                c2.merge(inner);
                ScopedCond::Impl(plain_box(u, ante, s)?, c2)
            }
        };
        inner = ScopedDrs {
            universe: vec![],
            conds: vec![cond],
        };
    }
    d.merge(inner);
    Ok(d)
}

/// Nests the components of `u` in the order fixed by `s`.
pub fn resolve(u: &Udrs, s: &Scoping) -> Result<ScopedDrs, StructureError> {
    for c in &u.clauses {
        if let Some(order) = s.order(&c.upper) {
            if !s.void.contains(&c.upper) {
                let mut a = order.clone();
                let mut b = c.node_labels();
                a.sort();
                b.sort();
                if a != b {
                    return Err(StructureError::UnknownLabel(c.upper.clone()));
                }
            }
        }
    }
    resolve_clause(u, 0, s)
}

/// Predicates (with arity) and constants an interpretation must cover.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocabulary {
    pub preds: Vec<(String, usize)>,
    pub consts: Vec<String>,
}

impl Vocabulary {
    pub fn of<'a>(entries: impl IntoIterator<Item = &'a Udrs>) -> Result<Self, OracleError> {
        let mut preds: BTreeMap<String, usize> = BTreeMap::new();
        let mut consts = BTreeSet::new();
        for u in entries {
            for (p, k) in u.predicates() {
                if let Some(&old) = preds.get(&p) {
                    if old != k {
                        return Err(OracleError::ArityMismatch(p));
                    }
                }
                preds.insert(p, k);
            }
            consts.extend(u.constants());
        }
        Ok(Vocabulary {
            preds: preds.into_iter().collect(),
            consts: consts.into_iter().collect(),
        })
    }

    /// Adds the predicates a lexicon relates, with the arity of their partner.
    pub fn close_under(&mut self, lex: &Lexicon) {
        let mut changed = true;
        while changed {
            changed = false;
            for (a, b) in lex.hypo.iter().chain(&lex.complement) {
                let ka = self.arity(a);
                let kb = self.arity(b);
                match (ka, kb) {
                    (Some(k), None) => {
                        self.preds.push((b.clone(), k));
                        changed = true;
                    }
                    (None, Some(k)) => {
                        self.preds.push((a.clone(), k));
                        changed = true;
                    }
                    _ => {}
                }
            }
        }
        self.preds.sort();
    }

    pub fn arity(&self, p: &str) -> Option<usize> {
        self.preds.iter().find(|(q, _)| q == p).map(|(_, k)| *k)
    }

    fn pred_id(&self, p: &str) -> Option<usize> {
        self.preds.iter().position(|(q, _)| q == p)
    }

    fn const_id(&self, c: &str) -> Option<usize> {
        self.consts.iter().position(|x| x == c)
    }
}

/// A finite first-order model.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FiniteModel {
    pub domain: Vec<String>,
    pub constants: BTreeMap<String, usize>,
    pub extensions: BTreeMap<(String, usize), BTreeSet<Vec<usize>>>,
}

impl fmt::Display for FiniteModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(model (domain {})", self.domain.join(" "))?;
        for (c, i) in &self.constants {
            write!(f, " (const {c} {})", self.domain[*i])?;
        }
        for ((p, k), ts) in &self.extensions {
            write!(f, " (pred {p} {k} (")?;
            let parts: Vec<String> = ts
                .iter()
                .map(|t| {
                    let names: Vec<&str> = t.iter().map(|&i| self.domain[i].as_str()).collect();
                    if *k == 1 {
                        names[0].to_string()
                    } else {
                        format!("({})", names.join(" "))
                    }
                })
                .collect();
            write!(f, "{}))", parts.join(" "))?;
        }
        write!(f, ")")
    }
}

/// Interpretation of a vocabulary over the domain `0..n`, with extensions
/// stored as bitmasks over tuple codes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interp {
    pub n: usize,
    pub masks: Vec<u64>,
    pub consts: Vec<usize>,
}

fn tuple_code(n: usize, args: &[usize]) -> usize {
    args.iter().rev().fold(0, |acc, &a| acc * n + a)
}

fn tuple_count(n: usize, k: usize) -> Result<usize, OracleError> {
    let c = n.pow(k as u32);
    if c > 64 {
        Err(OracleError::TooLarge(format!("{c} tuples for an arity-{k} predicate")))
    } else {
        Ok(c)
    }
}

impl Interp {
    pub fn from_model(m: &FiniteModel, v: &Vocabulary) -> Result<Self, OracleError> {
        let n = m.domain.len();
        let mut masks = Vec::new();
        for (p, k) in &v.preds {
            tuple_count(n, *k)?;
            let ext = m
                .extensions
                .get(&(p.clone(), *k))
                .ok_or_else(|| OracleError::Uninterpreted(p.clone()))?;
            let mut mask = 0u64;
            for t in ext {
                mask |= 1 << tuple_code(n, t);
            }
            masks.push(mask);
        }
        let consts = v
            .consts
            .iter()
            .map(|c| {
                m.constants
                    .get(c)
                    .copied()
                    .ok_or_else(|| OracleError::Uninterpreted(c.clone()))
            })
            .collect::<Result<_, _>>()?;
        Ok(Interp { n, masks, consts })
    }

    pub fn to_model(&self, v: &Vocabulary) -> FiniteModel {
        let domain: Vec<String> = (0..self.n).map(|i| format!("d{i}")).collect();
        let constants = v
            .consts
            .iter()
            .cloned()
            .zip(self.consts.iter().copied())
            .collect();
        let mut extensions = BTreeMap::new();
        for ((p, k), &mask) in v.preds.iter().zip(&self.masks) {
            let mut set = BTreeSet::new();
            let total = self.n.pow(*k as u32);
            for code in 0..total {
                if mask & (1 << code) != 0 {
                    let mut t = Vec::new();
                    let mut c = code;
                    for _ in 0..*k {
                        t.push(c % self.n);
                        c /= self.n;
                    }
                    set.insert(t);
                }
            }
            extensions.insert((p.clone(), *k), set);
        }
        FiniteModel {
            domain,
            constants,
            extensions,
        }
    }

    fn satisfies(&self, v: &Vocabulary, lex: &Lexicon) -> bool {
        let mask_of = |p: &str| v.pred_id(p).map(|i| self.masks[i]);
        for (a, b) in &lex.hypo {
            if let (Some(ma), Some(mb)) = (mask_of(a), mask_of(b)) {
                if ma & !mb != 0 {
                    return false;
                }
            }
        }
        for (a, b) in &lex.complement {
            if let (Some(ma), Some(mb), Some(k)) = (mask_of(a), mask_of(b), v.arity(a)) {
                let total = self.n.pow(k as u32);
                let full = if total == 64 { u64::MAX } else { (1u64 << total) - 1 };
                if ma ^ mb != full || ma & mb != 0 {
                    return false;
                }
            }
        }
        true
    }
}

/// Every interpretation of `v` with domain size `1..=bound` satisfying the
/// lexical postulates. Stops early when `f` returns `false`.
pub fn for_each_model(
    v: &Vocabulary,
    lex: &Lexicon,
    bound: usize,
    mut f: impl FnMut(&Interp) -> bool,
) -> Result<usize, OracleError> {
    // Predicates fixed by a complement partner are derived, not enumerated.
    let mut derived: BTreeMap<usize, usize> = BTreeMap::new();
    for (a, b) in &lex.complement {
        if let (Some(ia), Some(ib)) = (v.pred_id(a), v.pred_id(b)) {
            if ia != ib && !derived.contains_key(&ia) && !derived.contains_key(&ib) {
                derived.insert(ib, ia);
            }
        }
    }
    let mut count = 0;
    for n in 1..=bound {
        let sizes: Vec<usize> = v
            .preds
            .iter()
            .map(|(_, k)| tuple_count(n, *k))
            .collect::<Result<_, _>>()?;
        let free: Vec<usize> = (0..v.preds.len()).filter(|i| !derived.contains_key(i)).collect();
        let bits: usize = free.iter().map(|&i| sizes[i]).sum();
        if bits > 26 {
            return Err(OracleError::TooLarge(format!(
                "{bits} extension bits at domain size {n}"
            )));
        }
        let const_combos = n.pow(v.consts.len() as u32);
        for code in 0u64..(1u64 << bits) {
            let mut masks = vec![0u64; v.preds.len()];
            let mut shift = 0;
            for &i in &free {
                let width = sizes[i];
                let m = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
                masks[i] = (code >> shift) & m;
                shift += width;
            }
            for (&d, &src) in &derived {
                let m = if sizes[d] == 64 { u64::MAX } else { (1u64 << sizes[d]) - 1 };
                masks[d] = !masks[src] & m;
            }
            for cc in 0..const_combos {
                let mut consts = Vec::with_capacity(v.consts.len());
                let mut c = cc;
                for _ in 0..v.consts.len() {
                    consts.push(c % n);
                    c /= n;
                }
                let m = Interp {
                    n,
                    masks: masks.clone(),
                    consts,
                };
                if !m.satisfies(v, lex) {
                    continue;
                }
                count += 1;
                if !f(&m) {
                    return Ok(count);
                }
            }
        }
    }
    Ok(count)
}

#[derive(Clone, Debug)]
enum CTerm {
    Var(usize),
    Const(usize),
}

#[derive(Clone, Debug)]
enum CCond {
    Atom(usize, Vec<CTerm>),
    Neg(CDrs),
    Impl(CDrs, CDrs),
    Quant(Truth, usize, CDrs, CDrs),
    Falsum,
}

#[derive(Clone, Debug, Default)]
struct CDrs {
    universe: Vec<usize>,
    conds: Vec<CCond>,
}

/// A reading compiled against a vocabulary, ready for repeated evaluation.
#[derive(Clone, Debug)]
pub struct Compiled {
    drs: CDrs,
    slots: usize,
}

struct Compiler<'a> {
    v: &'a Vocabulary,
    table: &'a QuantifierTable,
    vars: BTreeMap<Referent, usize>,
}

impl Compiler<'_> {
    fn var(&mut self, r: &Referent) -> usize {
        let next = self.vars.len();
        *self.vars.entry(r.clone()).or_insert(next)
    }

    fn drs(&mut self, d: &ScopedDrs, scope: &mut Vec<Referent>) -> Result<CDrs, OracleError> {
        let mark = scope.len();
        let universe = d
            .universe
            .iter()
            .map(|r| {
                scope.push(r.clone());
                self.var(r)
            })
            .collect();
        let mut conds = Vec::new();
        for c in &d.conds {
            conds.push(self.cond(c, scope)?);
        }
        scope.truncate(mark);
        Ok(CDrs { universe, conds })
    }

    fn cond(&mut self, c: &ScopedCond, scope: &mut Vec<Referent>) -> Result<CCond, OracleError> {
        Ok(match c {
            ScopedCond::Atom(a) => {
                let p = self
                    .v
                    .pred_id(&a.pred)
                    .ok_or_else(|| OracleError::Uninterpreted(a.pred.clone()))?;
                if self.v.preds[p].1 != a.args.len() {
                    return Err(OracleError::ArityMismatch(a.pred.clone()));
                }
                let mut args = Vec::new();
                for t in &a.args {
                    args.push(match t {
                        Term::Ref(r) => {
                            if !scope.contains(r) {
                                return Err(OracleError::Unbound(r.clone()));
                            }
                            CTerm::Var(self.var(r))
                        }
                        Term::Const(c) => CTerm::Const(
                            self.v
                                .const_id(c)
                                .ok_or_else(|| OracleError::Uninterpreted(c.to_string()))?,
                        ),
                    });
                }
                CCond::Atom(p, args)
            }
            ScopedCond::Neg(k) => CCond::Neg(self.drs(k, scope)?),
            ScopedCond::Impl(a, b) => {
                let mark = scope.len();
                let ca = self.drs(a, scope)?;
                scope.extend(a.universe.iter().cloned());
                let cb = self.drs(b, scope);
                scope.truncate(mark);
                CCond::Impl(ca, cb?)
            }
            ScopedCond::Quant {
                quantifier,
                var,
                res,
                scope: sc,
            } => {
                let truth = self.table.get(quantifier)?.truth;
                let x = self.var(var);
                let mark = scope.len();
                scope.push(var.clone());
                let cr = self.drs(res, scope);
                scope.extend(res.universe.iter().cloned());
                let cs = self.drs(sc, scope);
                scope.truncate(mark);
                CCond::Quant(truth, x, cr?, cs?)
            }
            ScopedCond::Falsum => CCond::Falsum,
        })
    }
}

pub fn compile(d: &ScopedDrs, v: &Vocabulary, table: &QuantifierTable) -> Result<Compiled, OracleError> {
    let mut c = Compiler {
        v,
        table,
        vars: BTreeMap::new(),
    };
    let drs = c.drs(d, &mut Vec::new())?;
    Ok(Compiled {
        drs,
        slots: c.vars.len(),
    })
}

struct Eval<'a> {
    m: &'a Interp,
    env: Vec<usize>,
}

impl Eval<'_> {
    fn term(&self, t: &CTerm) -> usize {
        match t {
            CTerm::Var(i) => self.env[*i],
            CTerm::Const(c) => self.m.consts[*c],
        }
    }

    fn conds(&mut self, cs: &[CCond]) -> bool {
        cs.iter().all(|c| self.cond(c))
    }

    fn cond(&mut self, c: &CCond) -> bool {
        match c {
            CCond::Atom(p, args) => {
                let mut code = 0;
                for a in args.iter().rev() {
                    code = code * self.m.n + self.term(a);
                }
                self.m.masks[*p] & (1 << code) != 0
            }
            CCond::Neg(k) => !self.exists(k, 0, &mut |_| true),
            CCond::Impl(a, b) => {
                let mut ok = true;
                self.exists(a, 0, &mut |ev: &mut Eval<'_>| {
                    if !ev.exists(b, 0, &mut |_| true) {
                        ok = false;
                        return true;
                    }
                    false
                });
                ok
            }
            CCond::Quant(truth, x, res, scope) => {
                let (mut a, mut ab) = (0, 0);
                for d in 0..self.m.n {
                    self.env[*x] = d;
                    let mut in_a = false;
                    let mut in_ab = false;
                    self.exists(res, 0, &mut |ev: &mut Eval<'_>| {
                        in_a = true;
                        if ev.exists(scope, 0, &mut |_| true) {
                            in_ab = true;
                            return true;
                        }
                        false
                    });
                    a += in_a as usize;
                    ab += in_ab as usize;
                }
                truth.holds(a, ab)
            }
            CCond::Falsum => false,
        }
    }

    /// Searches extensions of the environment over `k`'s universe that
    /// verify `k`, calling `found` on each until it returns `true`.
    fn exists(&mut self, k: &CDrs, i: usize, found: &mut dyn FnMut(&mut Eval<'_>) -> bool) -> bool {
        if i == k.universe.len() {
            return self.conds(&k.conds) && found(self);
        }
        let slot = k.universe[i];
        for d in 0..self.m.n {
            self.env[slot] = d;
            if self.exists(k, i + 1, found) {
                return true;
            }
        }
        false
    }
}

impl Compiled {
    pub fn eval(&self, m: &Interp) -> bool {
        let mut ev = Eval {
            m,
            env: vec![0; self.slots],
        };
        let drs = &self.drs;
        ev.exists(drs, 0, &mut |_| true)
    }
}

/// Truth of a scoped DRS in a model.
pub fn eval(m: &FiniteModel, d: &ScopedDrs, table: &QuantifierTable) -> Result<bool, OracleError> {
    let mut v = Vocabulary::default();
    collect_vocab(d, &mut v);
    let interp = Interp::from_model(m, &v)?;
    Ok(compile(d, &v, table)?.eval(&interp))
}

fn collect_vocab(d: &ScopedDrs, v: &mut Vocabulary) {
    for c in &d.conds {
        match c {
            ScopedCond::Atom(a) => {
                if v.pred_id(&a.pred).is_none() {
                    v.preds.push((a.pred.clone(), a.args.len()));
                }
                for t in &a.args {
                    if let Term::Const(c) = t {
                        if v.const_id(c).is_none() {
                            v.consts.push(c.to_string());
                        }
                    }
                }
            }
            ScopedCond::Neg(k) => collect_vocab(k, v),
            ScopedCond::Impl(a, b) => {
                collect_vocab(a, v);
                collect_vocab(b, v);
            }
            ScopedCond::Quant { res, scope, .. } => {
                collect_vocab(res, v);
                collect_vocab(scope, v);
            }
            ScopedCond::Falsum => {}
        }
    }
}

/// The candidate consequence relations over disambiguations δ of the
/// premises and δ' of the goal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    /// ∀δ ∃δ'
    R1,
    /// ∀δ ∀δ'
    R3,
    /// ∃δ ∃δ'
    R4,
    /// ∀δ respecting every index, premises and goal together
    R8,
}

impl Relation {
    pub fn name(self) -> &'static str {
        match self {
            Relation::R1 => "r1",
            Relation::R3 => "r3",
            Relation::R4 => "r4",
            Relation::R8 => "r8",
        }
    }

    pub fn all() -> [Relation; 4] {
        [Relation::R1, Relation::R3, Relation::R4, Relation::R8]
    }
}

/// A failed check: the readings involved and a model falsifying the goal
/// reading while verifying the premise readings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub premises: Vec<Scoping>,
    pub goal: Scoping,
    pub model: FiniteModel,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub relation: Relation,
    pub holds: bool,
    pub bound: usize,
    pub models: usize,
    pub witness: Option<Witness>,
}

/// Where the oracle takes its models from.
#[derive(Clone, Debug)]
pub enum Models {
    /// Every model up to the given domain size.
    Bounded(usize),
    /// Exactly these models.
    Explicit(Vec<FiniteModel>),
}

/// Bounded-model consequence checker.
#[derive(Clone, Debug)]
pub struct Oracle {
    pub table: QuantifierTable,
    pub models: Models,
}

fn compile_reading(
    u: &Udrs,
    s: &Scoping,
    v: &Vocabulary,
    table: &QuantifierTable,
) -> Result<Compiled, OracleError> {
    compile(&resolve(u, s)?, v, table)
}

/// Goal copy whose indices cannot coincide with any premise index.
fn indices_apart(goal: &Udrs) -> Udrs {
    let mut g = goal.clone();
    for c in &mut g.clauses {
        if let Some(i) = &c.index {
            c.index = Some(CorrelationIndex::new(format!("goal#{i}")));
        }
    }
    g
}

impl Oracle {
    pub fn new(table: QuantifierTable, bound: usize) -> Self {
        Oracle {
            table,
            models: Models::Bounded(bound),
        }
    }

    pub fn bound(&self) -> usize {
        match &self.models {
            Models::Bounded(n) => *n,
            Models::Explicit(ms) => ms.iter().map(|m| m.domain.len()).max().unwrap_or(0),
        }
    }

    /// Runs `f` on every model of the vocabulary; stops when `f` returns false.
    fn scan(
        &self,
        v: &Vocabulary,
        lex: &Lexicon,
        mut f: impl FnMut(&Interp) -> bool,
    ) -> Result<usize, OracleError> {
        match &self.models {
            Models::Bounded(n) => for_each_model(v, lex, *n, f),
            Models::Explicit(ms) => {
                let mut count = 0;
                for m in ms {
                    let i = Interp::from_model(m, v)?;
                    if !i.satisfies(v, lex) {
                        continue;
                    }
                    count += 1;
                    if !f(&i) {
                        break;
                    }
                }
                Ok(count)
            }
        }
    }

    fn vocabulary(&self, premises: &[&Udrs], goal: &Udrs, lex: &Lexicon) -> Result<Vocabulary, OracleError> {
        let mut all: Vec<&Udrs> = premises.to_vec();
        all.push(goal);
        self.vocabulary_with(all, &ScopedDrs::default(), lex)
    }

    fn vocabulary_with(
        &self,
        entries: Vec<&Udrs>,
        extra: &ScopedDrs,
        lex: &Lexicon,
    ) -> Result<Vocabulary, OracleError> {
        let mut v = Vocabulary::of(entries)?;
        let (preds, consts) = extra.symbols();
        for (p, k) in preds {
            match v.arity(&p) {
                Some(old) if old != k => return Err(OracleError::ArityMismatch(p)),
                Some(_) => {}
                None => v.preds.push((p, k)),
            }
        }
        for c in consts {
            if !v.consts.contains(&c) {
                v.consts.push(c);
            }
        }
        v.preds.sort();
        v.consts.sort();
        v.close_under(lex);
        if let Models::Explicit(ms) = &self.models {
            if let Some(m) = ms.first() {
                for ((p, k), _) in &m.extensions {
                    if v.arity(p).is_none() {
                        v.preds.push((p.clone(), *k));
                    }
                }
                v.preds.sort();
            }
        }
        Ok(v)
    }

    /// Decides `premises ⊨ goal` under `rel`. Lexical postulates restrict
    /// the models considered.
    pub fn entails(
        &self,
        premises: &[&Udrs],
        lex: &Lexicon,
        goal: &Udrs,
        rel: Relation,
    ) -> Result<Verdict, OracleError> {
        let v = self.vocabulary(premises, goal, lex)?;
        match rel {
            Relation::R8 => self.joint(premises, lex, goal, &v),
            _ => self.matrix(premises, lex, goal, rel, &v),
        }
    }

    pub fn entails_db(&self, db: &Database, goal: &Udrs, rel: Relation) -> Result<Verdict, OracleError> {
        let ps: Vec<&Udrs> = db.entries.iter().collect();
        self.entails(&ps, &db.lexicon, goal, rel)
    }

    fn joint(
        &self,
        premises: &[&Udrs],
        lex: &Lexicon,
        goal: &Udrs,
        v: &Vocabulary,
    ) -> Result<Verdict, OracleError> {
        let mut all: Vec<&Udrs> = premises.to_vec();
        all.push(goal);
        let indices: BTreeSet<CorrelationIndex> = all.iter().flat_map(|u| u.indices()).collect();
        let assignments = correlated_assignments(&all, &indices)?;
        let mut compiled = Vec::new();
        for a in &assignments {
            let mut ps = Vec::new();
            for (u, s) in premises.iter().zip(&a.by_entry) {
                ps.push(compile_reading(u, s, v, &self.table)?);
            }
            let g = compile_reading(goal, a.by_entry.last().unwrap(), v, &self.table)?;
            compiled.push((ps, g));
        }
        let mut failure: Option<(usize, Interp)> = None;
        let models = self.scan(v, lex, |m| {
            for (k, (ps, g)) in compiled.iter().enumerate() {
                if ps.iter().all(|p| p.eval(m)) && !g.eval(m) {
                    failure = Some((k, m.clone()));
                    return false;
                }
            }
            true
        })?;
        let witness = failure.map(|(k, m)| {
            let a: &CorrelatedAssignment = &assignments[k];
            Witness {
                premises: a.by_entry[..premises.len()].to_vec(),
                goal: a.by_entry[premises.len()].clone(),
                model: m.to_model(v),
            }
        });
        Ok(Verdict {
            relation: Relation::R8,
            holds: witness.is_none(),
            bound: self.bound(),
            models,
            witness,
        })
    }

    fn matrix(
        &self,
        premises: &[&Udrs],
        lex: &Lexicon,
        goal: &Udrs,
        rel: Relation,
        v: &Vocabulary,
    ) -> Result<Verdict, OracleError> {
        let pidx: BTreeSet<CorrelationIndex> = premises.iter().flat_map(|u| u.indices()).collect();
        let pas = correlated_assignments(premises, &pidx)?;
        let g = indices_apart(goal);
        let gidx = g.indices();
        let gas = correlated_assignments(&[&g], &gidx)?;
        let mut pcs = Vec::new();
        for a in &pas {
            let mut ps = Vec::new();
            for (u, s) in premises.iter().zip(&a.by_entry) {
                ps.push(compile_reading(u, s, v, &self.table)?);
            }
            pcs.push(ps);
        }
        let gcs: Vec<Compiled> = gas
            .iter()
            .map(|a| compile_reading(&g, &a.by_entry[0], v, &self.table))
            .collect::<Result<_, _>>()?;
        // holds[p][g] stays true until a model verifies premise reading p
        // and falsifies goal reading g.
        let mut counter: Vec<Vec<Option<Interp>>> = vec![vec![None; gcs.len()]; pcs.len()];
        let decided = |c: &Vec<Vec<Option<Interp>>>| -> bool {
            let fails = |p: usize, q: usize| c[p][q].is_some();
            match rel {
                Relation::R1 => (0..c.len()).any(|p| (0..gcs.len()).all(|q| fails(p, q))),
                Relation::R3 => (0..c.len()).any(|p| (0..gcs.len()).any(|q| fails(p, q))),
                Relation::R4 => (0..c.len()).all(|p| (0..gcs.len()).all(|q| fails(p, q))),
                Relation::R8 => unreachable!(),
            }
        };
        let models = self.scan(v, lex, |m| {
            let gv: Vec<bool> = gcs.iter().map(|g| g.eval(m)).collect();
            let mut changed = false;
            for (p, ps) in pcs.iter().enumerate() {
                if gv.iter().enumerate().all(|(q, &t)| t || counter[p][q].is_some()) {
                    continue;
                }
                if ps.iter().all(|x| x.eval(m)) {
                    for (q, &t) in gv.iter().enumerate() {
                        if !t && counter[p][q].is_none() {
                            counter[p][q] = Some(m.clone());
                            changed = true;
                        }
                    }
                }
            }
            !(changed && decided(&counter))
        })?;
        let holds = !decided(&counter);
        let witness = if holds {
            None
        } else {
            // First failing pair, preferring the premise reading that
            // fails everywhere.
            let p = (0..pcs.len())
                .find(|&p| counter[p].iter().all(Option::is_some))
                .or_else(|| (0..pcs.len()).find(|&p| counter[p].iter().any(Option::is_some)))
                .unwrap();
            let q = counter[p].iter().position(Option::is_some).unwrap();
            Some(Witness {
                premises: pas[p].by_entry.clone(),
                goal: gas[q].by_entry[0].clone(),
                model: counter[p][q].as_ref().unwrap().to_model(v),
            })
        };
        Ok(Verdict {
            relation: rel,
            holds,
            bound: self.bound(),
            models,
            witness,
        })
    }

    /// `context ⊨ a ⇔ b` under R8, both directions.
    pub fn equivalent(
        &self,
        context: &[&Udrs],
        lex: &Lexicon,
        a: &Udrs,
        b: &Udrs,
    ) -> Result<bool, OracleError> {
        let mut with_a = context.to_vec();
        with_a.push(a);
        if !self.entails(&with_a, lex, b, Relation::R8)?.holds {
            return Ok(false);
        }
        let mut with_b = context.to_vec();
        with_b.push(b);
        Ok(self.entails(&with_b, lex, a, Relation::R8)?.holds)
    }

    /// Whether the closed DRS `d` is true in every model where the
    /// premises are, under each correlated choice of premise readings.
    pub fn valid_given(&self, premises: &[&Udrs], lex: &Lexicon, d: &ScopedDrs) -> Result<bool, OracleError> {
        let v = self.vocabulary_with(premises.to_vec(), d, lex)?;
        let idx: BTreeSet<CorrelationIndex> = premises.iter().flat_map(|u| u.indices()).collect();
        let mut pcs = Vec::new();
        for a in correlated_assignments(premises, &idx)? {
            let mut ps = Vec::new();
            for (u, s) in premises.iter().zip(&a.by_entry) {
                ps.push(compile_reading(u, s, &v, &self.table)?);
            }
            pcs.push(ps);
        }
        let g = compile(d, &v, &self.table)?;
        let mut valid = true;
        self.scan(&v, lex, |m| {
            if !g.eval(m) && pcs.iter().any(|ps| ps.iter().all(|p| p.eval(m))) {
                valid = false;
            }
            valid
        })?;
        Ok(valid)
    }

    /// Whether the premises have no model at all (within the bound).
    pub fn inconsistent(&self, premises: &[&Udrs], lex: &Lexicon) -> Result<bool, OracleError> {
        let falsum = falsum_udrs();
        Ok(self.entails(premises, lex, &falsum, Relation::R8)?.holds)
    }
}

/// A UDRS whose only reading is false.
pub fn falsum_udrs() -> Udrs {
    let top = Label::new("⊥");
    let lower = Label::new("⊥.0");
    let mut boxes = BTreeMap::new();
    boxes.insert(top.clone(), DrsBox::default());
    boxes.insert(lower.clone(), DrsBox::default());
    Udrs {
        top: top.clone(),
        boxes,
        clauses: vec![Clause {
            index: None,
            upper: top,
            lower,
            host: None,
            nodes: vec![],
            attachments: vec![],
            ord: vec![],
            // No reading survives, so the clause is void.
            readings: Some(BTreeSet::new()),
        }],
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::disambig::enumerate;
    use crate::engine::syntax::{parse_lexicon, parse_udrs};
    use crate::structure::tests::{ex15, l};

    pub fn table() -> QuantifierTable {
        QuantifierTable::standard(2)
    }

    pub fn oracle(bound: usize) -> Oracle {
        Oracle::new(table(), bound)
    }

    /// "Everybody didn't sleep".
    pub fn everybody_didnt(verb: &str, index: Option<&str>) -> Udrs {
        let idx = index.map(|i| format!(":index {i}")).unwrap_or_default();
        parse_udrs(&format!(
            "(udrs :top t{verb} {idx}
               (clause :upper t{verb} :lower b{verb}
                 (comp :label q{verb} (quant every x{verb} :res r{verb} (drs () ()) :scope s{verb}))
                 (comp :label n{verb} (neg :body nb{verb}))
                 (base :label b{verb} (({verb} x{verb})))
                 (ord)))"
        ))
        .unwrap()
    }

    fn model(domain: &[&str], preds: &[(&str, &[&str])]) -> FiniteModel {
        let domain: Vec<String> = domain.iter().map(|s| s.to_string()).collect();
        let pos = |s: &str| domain.iter().position(|d| d == s).unwrap();
        let mut extensions = BTreeMap::new();
        for (p, ext) in preds {
            extensions.insert(
                (p.to_string(), 1),
                ext.iter().map(|e| vec![pos(e)]).collect(),
            );
        }
        FiniteModel {
            domain,
            constants: BTreeMap::new(),
            extensions,
        }
    }

    #[test]
    fn standard_table_flags_are_valid() {
        table().validate().unwrap();
        QuantifierTable::standard(0).validate().unwrap();
    }

    #[test]
    fn wrong_flags_are_rejected() {
        let mut t = table();
        let bad = QuantifierSemantics {
            name: "most".into(),
            truth: Truth::MoreThanHalf,
            restrictor: Mono::Up,
            scope: Mono::Up,
        };
        assert_eq!(t.insert(bad), Err(OracleError::BadFlag("most".into(), "restrictor")));
    }

    #[test]
    fn resolutions_of_the_neutral_example() {
        let u = ex15();
        let s = enumerate(&u).unwrap();
        let wide = resolve(&u, &s[0]).unwrap();
        let narrow = resolve(&u, &s[1]).unwrap();
        // (∀x)(¬ pay-att x) and ¬(∀x)(pay-att x).
        assert_eq!(wide.to_string(), "[ | (every x [ |] [ | (not [ | (pay-att x)])])]");
        assert_eq!(narrow.to_string(), "[ | (not [ | (every x [ |] [ | (pay-att x)])])]");
        let t = table();
        let m = model(&["a", "b"], &[("pay-att", &["a"])]);
        assert!(eval(&m, &narrow, &t).unwrap());
        assert!(!eval(&m, &wide, &t).unwrap());
    }

    #[test]
    fn evaluation_examples() {
        let t = table();
        let u = everybody_didnt("sleep", None);
        let s = enumerate(&u).unwrap();
        let wide = resolve(&u, &s[0]).unwrap();
        let narrow = resolve(&u, &s[1]).unwrap();
        let all_sleep = model(&["a", "b"], &[("sleep", &["a", "b"])]);
        assert!(!eval(&all_sleep, &wide, &t).unwrap());
        let none = model(&["a", "b"], &[("sleep", &[])]);
        assert!(eval(&none, &wide, &t).unwrap());
        assert!(eval(&none, &narrow, &t).unwrap());
        assert!(eval(&none, &ScopedDrs::default(), &t).unwrap());
    }

    #[test]
    fn single_atom_reading() {
        let u = parse_udrs("(udrs :top t (clause :upper t :lower b (base :label b ((p k))) (ord)))").unwrap();
        let s = enumerate(&u).unwrap();
        let d = resolve(&u, &s[0]).unwrap();
        assert_eq!(d.conds, vec![ScopedCond::Atom(Atom::new("p", vec![Term::constant("k")]))]);
    }

    #[test]
    fn uninterpreted_symbol_is_an_error() {
        let u = everybody_didnt("sleep", None);
        let d = resolve(&u, &enumerate(&u).unwrap()[0]).unwrap();
        let m = model(&["a"], &[]);
        assert_eq!(eval(&m, &d, &table()), Err(OracleError::Uninterpreted("sleep".into())));
    }

    #[test]
    fn awake_example_separates_relations() {
        let lex = parse_lexicon("(lex (complement awake sleep))").unwrap();
        let p = everybody_didnt("sleep", Some("i"));
        let g = parse_udrs(
            "(udrs :top tg :index j (clause :upper tg :lower bg
               (comp :label qg (quant every y :res rg (drs () ()) :scope sg))
               (base :label bg ((awake y))) (ord)))",
        )
        .unwrap();
        let o = oracle(4);
        assert!(o.entails(&[&p], &lex, &g, Relation::R4).unwrap().holds);
        let r8 = o.entails(&[&p], &lex, &g, Relation::R8).unwrap();
        assert!(!r8.holds);
        assert!(r8.witness.is_some());
        assert!(!o.entails(&[&p], &lex, &g, Relation::R1).unwrap().holds);
        assert!(!o.entails(&[&p], &lex, &g, Relation::R3).unwrap().holds);
    }

    #[test]
    fn reflexivity_holds_correlated_but_not_for_all_pairs() {
        let p = everybody_didnt("sleep", Some("i"));
        let (g, _) = fresh_variant(&p, &mut Fresh::new(0));
        let o = oracle(3);
        let lex = Lexicon::default();
        assert!(o.entails(&[&p], &lex, &g, Relation::R8).unwrap().holds);
        assert!(o.entails(&[&p], &lex, &g, Relation::R1).unwrap().holds);
        assert!(!o.entails(&[&p], &lex, &g, Relation::R3).unwrap().holds);
    }

    #[test]
    fn countermodels_are_genuine() {
        let lex = parse_lexicon("(lex (complement awake sleep))").unwrap();
        let p = everybody_didnt("sleep", Some("i"));
        let g = everybody_didnt("awake", Some("j"));
        let o = oracle(3);
        let v = o.entails(&[&p], &lex, &g, Relation::R8).unwrap();
        let w = v.witness.unwrap();
        let t = table();
        let pd = resolve(&p, &w.premises[0]).unwrap();
        let gd = resolve(&g, &w.goal).unwrap();
        let m = &w.model;
        // The witness model interprets both predicates.
        assert!(eval(m, &pd, &t).unwrap());
        assert!(!eval(m, &gd, &t).unwrap());
    }

    #[test]
    fn scope_monotonicity_in_models() {
        // Growing the scope set never falsifies an upward-monotone determiner.
        let t = table();
        for name in ["every", "some", "more-than-half"] {
            let q = t.get(name).unwrap();
            for n in 1..=4usize {
                for a in 0..=n {
                    for ab in 0..a {
                        if q.truth.holds(a, ab) {
                            assert!(q.truth.holds(a, ab + 1), "{name}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn model_enumeration_respects_postulates() {
        let v = Vocabulary {
            preds: vec![("p".into(), 1), ("q".into(), 1)],
            consts: vec![],
        };
        let free = for_each_model(&v, &Lexicon::default(), 2, |_| true).unwrap();
        assert_eq!(free, 4 + 16);
        let hypo = parse_lexicon("(lex (hypo p q))").unwrap();
        // Pairs p ⊆ q: 3^n.
        assert_eq!(for_each_model(&v, &hypo, 2, |_| true).unwrap(), 3 + 9);
        let comp = parse_lexicon("(lex (complement p q))").unwrap();
        assert_eq!(for_each_model(&v, &comp, 2, |_| true).unwrap(), 2 + 4);
    }

    #[test]
    fn falsum_has_no_models() {
        let o = oracle(2);
        let u = everybody_didnt("sleep", None);
        assert!(!o.inconsistent(&[&u], &Lexicon::default()).unwrap());
        let f = falsum_udrs();
        assert!(o.inconsistent(&[&f], &Lexicon::default()).unwrap());
        let _ = l("unused");
    }
}
