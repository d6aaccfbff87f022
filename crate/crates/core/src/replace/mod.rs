//! The replacement calculus: ≫ judgments between components, SUBST at
//! a label of a UDRS, and the replacement rule RR.

mod search;
mod subst;

pub use search::{rr, rr_towards, Derivation};
pub use subst::{gg_pi, lex_rewrites, persistent_in_clause, subst_box};

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::disambig::ConfigError;
use crate::engine::syntax::parse_udrs;
use crate::modelsem::{Models, Oracle, OracleError, QuantifierTable, Relation, ScopedCond, ScopedDrs};
use crate::rules::RuleError;
use crate::structure::*;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplaceError {
    #[error("{0} has undefined polarity")]
    UndefinedPolarity(Label),
    #[error("{0} is not a box label")]
    NotABox(Label),
    #[error("{0} is not a node")]
    NotANode(Label),
    #[error("no ≫ derivation for the replacement at {0}")]
    NoJudgment(Label),
    #[error("no derivation found within depth {0}")]
    NoDerivation(usize),
    #[error("hyponymy is cyclic at {0}")]
    Cycle(String),
    #[error("rule {0} is not valid: {1}")]
    InvalidRule(String, String),
    #[error("{0} does not immediately dominate {1}")]
    NotAdjacent(Label, Label),
    #[error("exchange of {0} and {1} is not licensed")]
    NotExchangeable(Label, Label),
    #[error("the result cannot be correlated with its source")]
    Transport,
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("result violates well-formedness: {0}")]
    Invalid(#[from] Violation),
}

/// One node of a ≫ derivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Judgment {
    pub rule: String,
    pub note: String,
    pub premises: Vec<Judgment>,
}

impl Judgment {
    pub fn new(rule: &str, note: impl Into<String>, premises: Vec<Judgment>) -> Self {
        Judgment {
            rule: rule.to_string(),
            note: note.into(),
            premises,
        }
    }

    /// Rule names in the tree, pre-order.
    pub fn rules(&self) -> Vec<&str> {
        let mut out = vec![self.rule.as_str()];
        for p in &self.premises {
            out.extend(p.rules());
        }
        out
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        writeln!(f, "{:w$}{} {}", "", self.rule, self.note, w = 2 * depth)?;
        for p in &self.premises {
            p.write(f, depth + 1)?;
        }
        Ok(())
    }
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

/// A determiner rule of the ≫Lex table.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum DetRule {
    /// `⟨q1, l1, l2⟩ ≫ ⟨q2, l1, l2⟩`.
    Entails(String, String),
    /// `⟨every, l1, l2⟩ ≫` an individual satisfying the restrictor.
    Individual,
    /// `⟨no, l1, l2⟩ ≫ ⟨every, l1, ¬l2⟩`.
    NoToEveryNot,
    /// `⟨some, l1, ¬l2⟩ ≫ ¬⟨every, l1, l2⟩`.
    SomeNotToNotEvery,
}

impl fmt::Display for DetRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DetRule::Entails(a, b) => write!(f, "{a} ≫ {b}"),
            DetRule::Individual => write!(f, "every ≫ individual"),
            DetRule::NoToEveryNot => write!(f, "no ≫ every-not"),
            DetRule::SomeNotToNotEvery => write!(f, "some-not ≫ not-every"),
        }
    }
}

impl DetRule {
    /// Checks the rule over every restrictor and scope size up to `bound`.
    pub fn validate(&self, table: &QuantifierTable, bound: usize) -> Result<(), ReplaceError> {
        let bad = |why: String| Err(ReplaceError::InvalidRule(self.to_string(), why));
        let cases = (0..=bound).flat_map(|a| (0..=a).map(move |ab| (a, ab)));
        match self {
            DetRule::Entails(q1, q2) => {
                let (t1, t2) = (table.get(q1)?.truth, table.get(q2)?.truth);
                for (a, ab) in cases {
                    if t1.holds(a, ab) && !t2.holds(a, ab) {
                        return bad(format!("fails with |A| = {a}, |A ∩ B| = {ab}"));
                    }
                }
            }
            DetRule::Individual => {
                let t = table.get("every")?.truth;
                for (a, ab) in cases {
                    if t.holds(a, ab) && ab != a {
                        return bad(format!("fails with |A| = {a}, |A ∩ B| = {ab}"));
                    }
                }
            }
            DetRule::NoToEveryNot => {
                let (no, every) = (table.get("no")?.truth, table.get("every")?.truth);
                for (a, ab) in cases {
                    if no.holds(a, ab) && !every.holds(a, a - ab) {
                        return bad(format!("fails with |A| = {a}, |A ∩ B| = {ab}"));
                    }
                }
            }
            DetRule::SomeNotToNotEvery => {
                let (some, every) = (table.get("some")?.truth, table.get("every")?.truth);
                for (a, ab) in cases {
                    if some.holds(a, a - ab) && every.holds(a, ab) {
                        return bad(format!("fails with |A| = {a}, |A ∩ B| = {ab}"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Meaning postulates between predicates, and the determiner rules.
#[derive(Clone, Debug, Default)]
pub struct LexTheory {
    hypo: BTreeSet<(String, String)>,
    pub det_rules: Vec<DetRule>,
}

impl LexTheory {
    /// Hyponymy pairs `(p, q)`, read `p ≫ q`; rejects cycles.
    pub fn new(hypo: impl IntoIterator<Item = (String, String)>) -> Result<Self, ReplaceError> {
        let mut t = LexTheory::default();
        for (p, q) in hypo {
            t.add_hyponym(p, q)?;
        }
        Ok(t)
    }

    pub fn add_hyponym(&mut self, p: String, q: String) -> Result<(), ReplaceError> {
        if p == q {
            return Ok(());
        }
        if self.hyponym(&q, &p) {
            return Err(ReplaceError::Cycle(p));
        }
        self.hypo.insert((p, q));
        Ok(())
    }

    /// The lexicon's pairs, postulates stated as database entries of the
    /// shape `every x (p(x) → q(x))`, the valid standard determiner rules
    /// and the lexicon's extra determiner pairs.
    pub fn from_database(db: &Database, table: &QuantifierTable, bound: usize) -> Result<Self, ReplaceError> {
        let mut t = LexTheory::new(db.lexicon.hypo.iter().cloned())?;
        for u in &db.entries {
            if let Some((p, q)) = postulate(u) {
                t.add_hyponym(p, q)?;
            }
        }
        for r in [DetRule::Individual, DetRule::NoToEveryNot, DetRule::SomeNotToNotEvery] {
            t.register(r, table, bound)?;
        }
        for (a, b) in &db.lexicon.det {
            t.register(DetRule::Entails(a.clone(), b.clone()), table, bound)?;
        }
        Ok(t)
    }

    /// Adds a determiner rule after checking it.
    pub fn register(&mut self, rule: DetRule, table: &QuantifierTable, bound: usize) -> Result<(), ReplaceError> {
        rule.validate(table, bound)?;
        if !self.det_rules.contains(&rule) {
            self.det_rules.push(rule);
        }
        Ok(())
    }

    pub fn pairs(&self) -> impl Iterator<Item = &(String, String)> {
        self.hypo.iter()
    }

    /// `p ≫ q` under the reflexive transitive closure.
    pub fn hyponym(&self, p: &str, q: &str) -> bool {
        let mut seen = BTreeSet::new();
        let mut todo = vec![p.to_string()];
        while let Some(x) = todo.pop() {
            if x == q {
                return true;
            }
            if seen.insert(x.clone()) {
                todo.extend(self.hypo.iter().filter(|(a, _)| *a == x).map(|(_, b)| b.clone()));
            }
        }
        false
    }

    /// Checks extension containment for every pair in the given models.
    pub fn check_models(&self, models: &[crate::modelsem::FiniteModel]) -> Result<(), ReplaceError> {
        for m in models {
            for (p, q) in &self.hypo {
                for ((name, k), ext) in &m.extensions {
                    if name != p {
                        continue;
                    }
                    let sup = m.extensions.get(&(q.clone(), *k));
                    if !ext.iter().all(|t| sup.is_some_and(|s| s.contains(t))) {
                        return Err(ReplaceError::InvalidRule(
                            format!("{p} ≫ {q}"),
                            "extension not contained in a fixture model".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// `(p, q)` when `u` is the unambiguous postulate `every x (p(x) → q(x))`.
fn postulate(u: &Udrs) -> Option<(String, String)> {
    let c = u.top_clause();
    if u.clauses.len() != 1 || c.nodes.len() != 1 || !u.boxes[&u.top].is_empty() || !c.attachments.is_empty() {
        return None;
    }
    let (var, ante, cons) = match &c.nodes[0].cond {
        Condition::Quant {
            quantifier,
            var,
            res,
            scope,
        } if quantifier == "every" && u.boxes[res].universe.is_empty() => (var.clone(), res, scope),
        Condition::Impl { ante, cons } => match u.boxes[ante].universe.as_slice() {
            [x] => (x.clone(), ante, cons),
            _ => return None,
        },
        _ => return None,
    };
    let one = |b: &DrsBox| -> Option<String> {
        match b.atoms.as_slice() {
            [a] if a.args == [Term::Ref(var.clone())] => Some(a.pred.clone()),
            _ => None,
        }
    };
    let lower = &u.boxes[&c.lower];
    if !u.boxes[cons].is_empty() || !lower.universe.is_empty() {
        return None;
    }
    Some((one(&u.boxes[ante])?, one(lower)?))
}

/// Largest domain used to check an exchange pair: the check involves a
/// binary relation, whose models grow as 2^(n*n).
pub const PI_BOUND: usize = 3;

/// Quantifier pairs that may exchange scope.
#[derive(Clone, Debug, Default)]
pub struct PiRelation {
    pairs: BTreeSet<(String, String)>,
}

impl PiRelation {
    /// `(a, every)` and `(some, every)`, universals commuting with each
    /// other, plus the lexicon's pairs.
    pub fn from_lexicon(lex: &Lexicon, oracle: &Oracle) -> Result<Self, ReplaceError> {
        let mut pi = PiRelation::default();
        for (a, b) in [("a", "every"), ("some", "every"), ("every", "every")] {
            if oracle.table.get(a).is_ok() {
                pi.register(a, b, oracle)?;
            }
        }
        for (a, b) in &lex.pi {
            pi.register(a, b, oracle)?;
        }
        Ok(pi)
    }

    /// Adds `q1 π q2` if `q1 x. q2 y. s(x,y)` entails `q2 y. q1 x. s(x,y)`,
    /// checked on domains of at most `PI_BOUND` elements.
    pub fn register(&mut self, q1: &str, q2: &str, oracle: &Oracle) -> Result<(), ReplaceError> {
        let mut oracle = oracle.clone();
        if let Models::Bounded(n) = oracle.models {
            oracle.models = Models::Bounded(n.min(PI_BOUND));
        }
        oracle.table.get(q1)?;
        oracle.table.get(q2)?;
        let text = |first: &str, second: &str| {
            let (a, b) = if first == "x" { (q1, q2) } else { (q2, q1) };
            let (v1, v2) = (first, second);
            let (p1, p2) = if first == "x" { ("pa", "pb") } else { ("pb", "pa") };
            format!(
                "(udrs :top t (clause :upper t :lower b
                   (comp :label n1 (quant {a} {v1} :res r1 (drs () (({p1} {v1}))) :scope s1))
                   (comp :label n2 (quant {b} {v2} :res r2 (drs () (({p2} {v2}))) :scope s2))
                   (base :label b ((rel x y)))
                   (ord (leq n2 (scope n1)))))"
            )
        };
        let wide = parse_udrs(&text("x", "y")).expect("fixed text");
        let narrow = parse_udrs(&text("y", "x")).expect("fixed text");
        let v = oracle.entails(&[&wide], &Lexicon::default(), &narrow, Relation::R8)?;
        if !v.holds {
            return Err(ReplaceError::InvalidRule(
                format!("{q1} π {q2}"),
                "exchanged reading is not entailed".into(),
            ));
        }
        self.pairs.insert((q1.to_string(), q2.to_string()));
        Ok(())
    }

    pub fn holds(&self, q1: &str, q2: &str) -> bool {
        self.pairs.contains(&(q1.to_string(), q2.to_string()))
    }

    pub fn pairs(&self) -> impl Iterator<Item = &(String, String)> {
        self.pairs.iter()
    }
}

/// Everything a ≫ derivation may consult.
pub struct Replacer<'a> {
    pub db: &'a Database,
    pub lex: &'a LexTheory,
    pub pi: &'a PiRelation,
    pub oracle: &'a Oracle,
    pub depth: usize,
    memo: RefCell<HashMap<String, Option<Judgment>>>,
}

fn apply(f: &BTreeMap<Referent, Referent>, t: &Term) -> Term {
    match t {
        Term::Ref(r) => Term::Ref(f.get(r).cloned().unwrap_or_else(|| r.clone())),
        c => c.clone(),
    }
}

fn rename_drs(f: &BTreeMap<Referent, Referent>, d: &ScopedDrs) -> ScopedDrs {
    ScopedDrs {
        universe: d.universe.iter().map(|r| f.get(r).cloned().unwrap_or_else(|| r.clone())).collect(),
        conds: d.conds.iter().map(|c| rename_cond(f, c)).collect(),
    }
}

fn rename_cond(f: &BTreeMap<Referent, Referent>, c: &ScopedCond) -> ScopedCond {
    match c {
        ScopedCond::Atom(a) => ScopedCond::Atom(Atom {
            pred: a.pred.clone(),
            args: a.args.iter().map(|t| apply(f, t)).collect(),
        }),
        ScopedCond::Neg(d) => ScopedCond::Neg(rename_drs(f, d)),
        ScopedCond::Impl(a, b) => ScopedCond::Impl(rename_drs(f, a), rename_drs(f, b)),
        ScopedCond::Quant {
            quantifier,
            var,
            res,
            scope,
        } => ScopedCond::Quant {
            quantifier: quantifier.clone(),
            var: f.get(var).cloned().unwrap_or_else(|| var.clone()),
            res: rename_drs(f, res),
            scope: rename_drs(f, scope),
        },
        ScopedCond::Falsum => ScopedCond::Falsum,
    }
}

fn referents_of(c: &ScopedCond) -> BTreeSet<Referent> {
    let d = ScopedDrs {
        universe: vec![],
        conds: vec![c.clone()],
    };
    let mut out = d.free_referents();
    if let ScopedCond::Quant { var, .. } = c {
        out.remove(var);
    }
    out
}

impl<'a> Replacer<'a> {
    pub fn new(db: &'a Database, lex: &'a LexTheory, pi: &'a PiRelation, oracle: &'a Oracle) -> Self {
        Replacer {
            db,
            lex,
            pi,
            oracle,
            depth: 8,
            memo: RefCell::new(HashMap::new()),
        }
    }

    /// `Δ ⊢ ⟨→, from, to⟩`, with free referents read universally.
    pub fn implication(&self, from: &ScopedDrs, to: &ScopedDrs) -> Result<bool, ReplaceError> {
        let mut ante = from.clone();
        let mut free: Vec<Referent> = from.free_referents().into_iter().collect();
        for r in to.free_referents() {
            if !free.contains(&r) && !from.universe.contains(&r) {
                free.push(r);
            }
        }
        free.retain(|r| !ante.universe.contains(r));
        ante.universe.extend(free);
        let mut cons = to.clone();
        cons.universe.retain(|r| !ante.universe.contains(r));
        let goal = ScopedDrs {
            universe: vec![],
            conds: vec![ScopedCond::Impl(ante, cons)],
        };
        let premises: Vec<&Udrs> = self.db.entries.iter().collect();
        Ok(self.oracle.valid_given(&premises, &self.db.lexicon, &goal)?)
    }

    /// `Δ ⊢ K ≫ K'` by ≫DRS. Referents in `fixed` map to themselves.
    pub fn gg_drs(
        &self,
        k: &ScopedDrs,
        k2: &ScopedDrs,
        fixed: &BTreeSet<Referent>,
    ) -> Result<Option<Judgment>, ReplaceError> {
        self.drs(k, k2, fixed, self.depth)
    }

    /// `Δ ⊢ γ ≫ γ'` for single conditions (≫⇒, ≫Q, ≫¬, ≫Lex).
    pub fn gg_cond(&self, g: &ScopedCond, g2: &ScopedCond) -> Result<Option<Judgment>, ReplaceError> {
        self.cond(g, g2, self.depth)
    }

    fn drs(
        &self,
        k: &ScopedDrs,
        k2: &ScopedDrs,
        fixed: &BTreeSet<Referent>,
        depth: usize,
    ) -> Result<Option<Judgment>, ReplaceError> {
        if k == k2 {
            return Ok(Some(Judgment::new("id", format!("{k}"), vec![])));
        }
        if depth == 0 {
            return Ok(None);
        }
        let key = format!("{k}|{k2}|{fixed:?}");
        if let Some(hit) = self.memo.borrow().get(&key) {
            return Ok(hit.clone());
        }
        let mut f = BTreeMap::new();
        for r in &k.universe {
            if fixed.contains(r) {
                if !k2.universe.contains(r) {
                    self.memo.borrow_mut().insert(key, None);
                    return Ok(None);
                }
                f.insert(r.clone(), r.clone());
            }
        }
        let mut found = None;
        self.match_conds(k, k2, 0, &mut f, &mut Vec::new(), depth, &mut found)?;
        let out = found.map(|(f, subs): (BTreeMap<Referent, Referent>, Vec<Judgment>)| {
            let map: Vec<String> = f.iter().filter(|(a, b)| a != b).map(|(a, b)| format!("{a}↦{b}")).collect();
            Judgment::new("≫DRS", format!("{k} ≫ {k2} f={{{}}}", map.join(",")), subs)
        });
        self.memo.borrow_mut().insert(key, out.clone());
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn match_conds(
        &self,
        k: &ScopedDrs,
        k2: &ScopedDrs,
        i: usize,
        f: &mut BTreeMap<Referent, Referent>,
        subs: &mut Vec<Judgment>,
        depth: usize,
        found: &mut Option<(BTreeMap<Referent, Referent>, Vec<Judgment>)>,
    ) -> Result<(), ReplaceError> {
        if found.is_some() {
            return Ok(());
        }
        let Some(target) = k2.conds.get(i) else {
            *found = Some((f.clone(), subs.clone()));
            return Ok(());
        };
        for g in &k.conds {
            // Bind the unmapped universe referents of g, one-to-one.
            let open: Vec<Referent> = referents_of(g)
                .into_iter()
                .filter(|r| k.universe.contains(r) && !f.contains_key(r))
                .collect();
            let mut options = Vec::new();
            bindings(&open, &k2.universe, f, &mut BTreeMap::new(), &mut options);
            for extra in options {
                let mut f2 = f.clone();
                f2.extend(extra);
                let image = rename_cond(&f2, g);
                if let Some(j) = self.cond(&image, target, depth - 1)? {
                    subs.push(j);
                    self.match_conds(k, k2, i + 1, &mut f2, subs, depth, found)?;
                    subs.pop();
                    if found.is_some() {
                        return Ok(());
                    }
                }
            }
        }
        Ok(())
    }

    fn cond(&self, g: &ScopedCond, g2: &ScopedCond, depth: usize) -> Result<Option<Judgment>, ReplaceError> {
        if g == g2 {
            return Ok(Some(Judgment::new("id", format!("{}", one(g)), vec![])));
        }
        if depth == 0 {
            return Ok(None);
        }
        let none = BTreeSet::new();
        match (g, g2) {
            (ScopedCond::Falsum, _) => Ok(Some(Judgment::new("⊥", "", vec![]))),
            (ScopedCond::Atom(a), ScopedCond::Atom(b)) => {
                if a.args == b.args && self.lex.hyponym(&a.pred, &b.pred) {
                    Ok(Some(Judgment::new("≫Lex(v)", format!("{} ≫ {}", a.pred, b.pred), vec![])))
                } else {
                    Ok(None)
                }
            }
            (ScopedCond::Neg(a), ScopedCond::Neg(b)) => {
                if let Some(j) = self.drs(b, a, &none, depth - 1)? {
                    return Ok(Some(Judgment::new("≫¬", "branch 1", vec![j])));
                }
                if self.implication(b, a)? {
                    return Ok(Some(Judgment::new("≫¬", format!("branch 2: ⊢ {b} → {a}"), vec![])));
                }
                Ok(None)
            }
            (ScopedCond::Impl(a, c), ScopedCond::Impl(a2, c2)) => {
                let keep: BTreeSet<Referent> = a.universe.iter().cloned().collect();
                let Some(jc) = self.drs(c, c2, &none, depth - 1)? else {
                    return Ok(None);
                };
                if let Some(ja) = self.drs(a2, a, &keep, depth - 1)? {
                    return Ok(Some(Judgment::new("≫⇒", "branch 1", vec![ja, jc])));
                }
                if a.universe == a2.universe && self.implication(a2, a)? {
                    return Ok(Some(Judgment::new("≫⇒", format!("branch 2: ⊢ {a2} → {a}"), vec![jc])));
                }
                Ok(None)
            }
            (
                ScopedCond::Quant {
                    quantifier: q,
                    var: x,
                    res: r,
                    scope: s,
                },
                ScopedCond::Quant {
                    quantifier: q2,
                    var: x2,
                    res: r2,
                    scope: s2,
                },
            ) if x == x2 => {
                if q != q2 {
                    let rule = DetRule::Entails(q.clone(), q2.clone());
                    if r == r2 && s == s2 && self.lex.det_rules.contains(&rule) {
                        return Ok(Some(Judgment::new("≫Lex", rule.to_string(), vec![])));
                    }
                    return Ok(None);
                }
                self.quant(q, r, s, r2, s2, depth)
            }
            (
                ScopedCond::Quant {
                    quantifier: q,
                    var: x,
                    res: r,
                    scope: s,
                },
                other,
            ) => self.lex_cond(q, x, r, s, other, depth),
            _ => Ok(None),
        }
    }

    fn quant(
        &self,
        q: &str,
        r: &ScopedDrs,
        s: &ScopedDrs,
        r2: &ScopedDrs,
        s2: &ScopedDrs,
        depth: usize,
    ) -> Result<Option<Judgment>, ReplaceError> {
        use crate::modelsem::{Mono, Persistence};
        let sem = self.oracle.table.get(q)?;
        let none = BTreeSet::new();
        let mut subs = Vec::new();
        let mut notes = Vec::new();
        if r != r2 {
            let (from, to) = match sem.persistence() {
                Persistence::Persistent => (r, r2),
                Persistence::AntiPersistent => (r2, r),
                Persistence::None => return Ok(None),
            };
            if let Some(j) = self.drs(from, to, &none, depth - 1)? {
                subs.push(j);
                notes.push(format!("{} branch 1", sem.persistence().name()));
            } else if from.universe.is_empty() && to.universe.is_empty() && self.implication(from, to)? {
                notes.push(format!("{} branch 2: ⊢ {from} → {to}", sem.persistence().name()));
            } else {
                return Ok(None);
            }
        }
        if s != s2 {
            let j = match sem.scope {
                Mono::Up => self.drs(s, s2, &none, depth - 1)?,
                Mono::Down => self.drs(s2, s, &none, depth - 1)?,
                Mono::None => None,
            };
            match j {
                Some(j) => subs.push(j),
                None => return Ok(None),
            }
            notes.push("scope".into());
        }
        Ok(Some(Judgment::new("≫Q", format!("{q}: {}", notes.join("; ")), subs)))
    }

    /// ≫Lex (iii) and (iv), which change the shape of the condition.
    fn lex_cond(
        &self,
        q: &str,
        x: &Referent,
        r: &ScopedDrs,
        s: &ScopedDrs,
        other: &ScopedCond,
        _depth: usize,
    ) -> Result<Option<Judgment>, ReplaceError> {
        let negated = |d: &ScopedDrs| -> Option<ScopedDrs> {
            match (d.universe.as_slice(), d.conds.as_slice()) {
                ([], [ScopedCond::Neg(inner)]) => Some(inner.clone()),
                _ => None,
            }
        };
        let has = |r: DetRule| self.lex.det_rules.contains(&r);
        match other {
            ScopedCond::Quant {
                quantifier: q2,
                var: x2,
                res: r2,
                scope: s2,
            } if q == "no" && q2 == "every" && x == x2 && r == r2 && has(DetRule::NoToEveryNot) => {
                if negated(s2).as_ref() == Some(s) {
                    return Ok(Some(Judgment::new("≫Lex(iii)", "no ≫ every-not", vec![])));
                }
                Ok(None)
            }
            ScopedCond::Neg(d) if q == "some" && has(DetRule::SomeNotToNotEvery) => {
                let Some(s_inner) = negated(s) else {
                    return Ok(None);
                };
                match d.conds.as_slice() {
                    [ScopedCond::Quant {
                        quantifier,
                        var,
                        res,
                        scope,
                    }] if d.universe.is_empty()
                        && quantifier == "every"
                        && var == x
                        && res == r
                        && *scope == s_inner =>
                    {
                        Ok(Some(Judgment::new("≫Lex(iv)", "some-not ≫ not-every", vec![])))
                    }
                    _ => Ok(None),
                }
            }
            _ => Ok(None),
        }
    }
}

fn one(c: &ScopedCond) -> ScopedDrs {
    ScopedDrs {
        universe: vec![],
        conds: vec![c.clone()],
    }
}

/// Every one-to-one extension of `f` to `open` into `targets`.
fn bindings(
    open: &[Referent],
    targets: &[Referent],
    f: &BTreeMap<Referent, Referent>,
    acc: &mut BTreeMap<Referent, Referent>,
    out: &mut Vec<BTreeMap<Referent, Referent>>,
) {
    let Some((first, rest)) = open.split_first() else {
        out.push(acc.clone());
        return;
    };
    for t in targets {
        if f.values().any(|v| v == t) || acc.values().any(|v| v == t) {
            continue;
        }
        acc.insert(first.clone(), t.clone());
        bindings(rest, targets, f, acc, out);
        acc.remove(first);
    }
}
