//! Proof search: direct proof, forward application of the inference rules,
//! and the rules of proof COND and RAA.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write;

use thiserror::Error;

use crate::disambig::{clause_readings, isomorphism};
use crate::engine::sexp::{quote, read_all, Items, Sexp, SyntaxError};
use crate::engine::syntax::{parse_udrs_form, print_database, print_udrs};
use crate::modelsem::{Oracle, OracleError};
use crate::replace::{rr, rr_towards, Judgment, LexTheory, PiRelation, ReplaceError, Replacer};
use crate::rules::{self, RuleError};
use crate::structure::*;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProveError {
    #[error("not well-formed: {0}")]
    Invalid(#[from] Violation),
    #[error("index {0} of the goal does not occur in the database")]
    UnknownIndex(CorrelationIndex),
    #[error("no operator has widest scope in the goal")]
    AmbiguousTop,
    #[error("the goal has conditions outside its widest operator")]
    NotBare,
    #[error("the widest operator of the goal is {0}, not {1}")]
    WrongOperator(String, &'static str),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Replace(#[from] ReplaceError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("replay: {0}")]
    Replay(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Only the rule of direct proof.
    Direct,
    Search,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Goal {
    pub udrs: Udrs,
    pub mode: Mode,
}

impl Goal {
    pub fn search(udrs: Udrs) -> Self {
        Goal { udrs, mode: Mode::Search }
    }
}

/// What is left to show.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    Udrs(Udrs),
    Falsum,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Effect {
    Add(Udrs),
    /// Entry replaced in place (RR may give its source a fresh index).
    Set(usize, Udrs),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub rule: String,
    pub inputs: Vec<usize>,
    pub discharges: Vec<String>,
    pub effects: Vec<Effect>,
    /// New goal, for rules of proof.
    pub goal: Option<Target>,
}

impl Step {
    fn new(rule: &str, inputs: Vec<usize>) -> Self {
        Step {
            rule: rule.to_string(),
            inputs,
            discharges: Vec::new(),
            effects: Vec::new(),
            goal: None,
        }
    }

    fn note(mut self, s: impl Into<String>) -> Self {
        self.discharges.push(s.into());
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Proved,
    Refuted,
    Exhausted,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Proved => "proved",
            Outcome::Refuted => "refuted",
            Outcome::Exhausted => "exhausted",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofTrace {
    pub budget: usize,
    pub steps: Vec<Step>,
    pub outcome: Outcome,
}

impl ProofTrace {
    /// Number of steps that apply a rule, leaving out the closing step.
    pub fn rule_steps(&self) -> usize {
        self.steps.iter().filter(|s| !s.effects.is_empty() || s.goal.is_some()).count()
    }

    pub fn discharges(&self) -> impl Iterator<Item = &str> {
        self.steps.iter().flat_map(|s| s.discharges.iter().map(String::as_str))
    }
}

/// A trace together with the database it ends in.
#[derive(Clone, Debug)]
pub struct Proof {
    pub trace: ProofTrace,
    pub database: Database,
}

pub struct Prover {
    pub oracle: Oracle,
    pub budget: usize,
    /// Depth bound of each RR derivation.
    pub rr_depth: usize,
}

struct Ctx {
    lex: LexTheory,
    pi: PiRelation,
    seen: HashSet<String>,
    /// DET outcomes by database and application, since the side
    /// condition may need the oracle.
    det: HashMap<String, Option<Udrs>>,
}

fn flatten(j: &Judgment, out: &mut Vec<String>) {
    out.push(format!("{} {}", j.rule, j.note));
    for p in &j.premises {
        flatten(p, out);
    }
}

fn same(a: &Udrs, b: &Udrs) -> bool {
    isomorphism(&rules::normalize(a), &rules::normalize(b), true, Some(&BTreeMap::new())).is_some()
}

fn contains(db: &Database, u: &Udrs) -> bool {
    db.entries.iter().any(|e| e.indices() == u.indices() && same(e, u))
}

/// Adds `u` unless it is malformed or already there.
fn extend(db: &Database, u: Udrs, fresh: &Fresh) -> Option<Database> {
    if validate(&u).is_err() || contains(db, &u) {
        return None;
    }
    let mut out = db.clone();
    out.push(u).ok()?;
    out.commit_fresh(fresh);
    Some(out)
}

/// The entry that proves `g` directly: same structure and order, and, for
/// an ambiguous goal, the same indices.
pub fn direct(db: &Database, g: &Udrs) -> Option<usize> {
    let ambiguous = !g.is_unambiguous();
    db.entries.iter().position(|e| {
        (!ambiguous || (!g.indices().is_empty() && e.indices() == g.indices()))
            && same(e, g)
    })
}

/// The node of the goal's top clause that is widest in every reading.
pub fn widest(g: &Udrs) -> Result<Label, ProveError> {
    let c = g.top_clause();
    if !g.boxes[&g.top].is_empty() || !c.attachments.is_empty() {
        return Err(ProveError::NotBare);
    }
    let closure = implicit_closure(g)?;
    let rs = clause_readings(c, &closure);
    let first = rs.first().and_then(|r| r.first()).ok_or(ProveError::AmbiguousTop)?;
    if rs.iter().all(|r| r.first() == Some(first)) {
        Ok(first.clone())
    } else {
        Err(ProveError::AmbiguousTop)
    }
}

/// COND: adds the antecedent of the goal's widest conditional, with
/// eigen-constants for its referents, and returns the consequent as the
/// new goal.
pub fn cond(db: &Database, g: &Udrs, fresh: &mut Fresh) -> Result<(Udrs, Udrs), ProveError> {
    let n = widest(g)?;
    let node = g.top_clause().node(&n).unwrap();
    let Condition::Impl { ante, .. } = &node.cond else {
        return Err(ProveError::WrongOperator(node.cond.kind_name().to_string(), "impl"));
    };
    fresh.reserve_udrs(g);
    for e in &db.entries {
        fresh.reserve_udrs(e);
    }
    let mut refs = BTreeMap::new();
    for r in &g.boxes[ante].universe {
        refs.insert(r.clone(), Term::constant(&fresh.constant()));
    }
    let subgoal = rules::remove_node(g, &n, &refs, fresh)?;
    let ren = Renaming {
        labels: BTreeMap::new(),
        refs: refs.clone(),
    };
    let mut hyp = sub_udrs(g, ante)?.apply_renaming(&ren);
    for b in hyp.boxes.values_mut() {
        b.universe.retain(|r| !refs.contains_key(r));
    }
    let (hyp, _) = fresh_variant(&rules::normalize(&hyp), fresh);
    validate(&hyp)?;
    validate(&subgoal)?;
    Ok((hyp, subgoal))
}

/// RAA: adds the body of the goal's widest negation; what is left is to
/// derive an inconsistency.
pub fn raa(g: &Udrs, fresh: &mut Fresh) -> Result<Udrs, ProveError> {
    let n = widest(g)?;
    let node = g.top_clause().node(&n).unwrap();
    if !matches!(node.cond, Condition::Neg { .. }) {
        return Err(ProveError::WrongOperator(node.cond.kind_name().to_string(), "neg"));
    }
    fresh.reserve_udrs(g);
    let hyp = rules::remove_node(g, &n, &BTreeMap::new(), fresh)?;
    validate(&hyp)?;
    Ok(hyp)
}

impl Prover {
    pub fn new(oracle: Oracle, budget: usize) -> Self {
        Prover {
            oracle,
            budget,
            rr_depth: 4,
        }
    }

    pub fn prove(&self, db: &Database, goal: &Goal) -> Result<Proof, ProveError> {
        for e in &db.entries {
            validate(e)?;
        }
        let g = &goal.udrs;
        validate(g)?;
        let done = |steps, outcome| Proof {
            trace: ProofTrace {
                budget: self.budget,
                steps,
                outcome,
            },
            database: db.clone(),
        };
        if goal.mode == Mode::Direct {
            if let Some(i) = g.indices().into_iter().find(|i| !db.registry.contains(i)) {
                return Err(ProveError::UnknownIndex(i));
            }
            return Ok(match direct(db, g) {
                Some(i) => done(vec![Step::new("DIRECT", vec![i])], Outcome::Proved),
                None => done(vec![], Outcome::Exhausted),
            });
        }
        if let Some(step) = self.refutation(db, g) {
            return Ok(done(vec![step], Outcome::Refuted));
        }
        let mut ctx = Ctx {
            lex: LexTheory::from_database(db, &self.oracle.table, self.oracle.bound())?,
            pi: PiRelation::from_lexicon(&db.lexicon, &self.oracle)?,
            seen: HashSet::new(),
            det: HashMap::new(),
        };
        let target = Target::Udrs(g.clone());
        for depth in 0..=self.budget {
            ctx.seen.clear();
            let mut steps = Vec::new();
            if self.dfs(&mut ctx, db, &target, depth, &mut steps)? {
                let database = replay(db, &steps)?;
                return Ok(Proof {
                    trace: ProofTrace {
                        budget: self.budget,
                        steps,
                        outcome: Outcome::Proved,
                    },
                    database,
                });
            }
        }
        Ok(done(vec![], Outcome::Exhausted))
    }

    /// A negated entry that excludes every reading of the goal.
    fn refutation(&self, db: &Database, g: &Udrs) -> Option<Step> {
        let mut fresh = db.fresh();
        fresh.reserve_udrs(g);
        db.entries.iter().enumerate().find_map(|(j, e)| {
            matches!(rules::diff(g, e, &mut fresh), Err(RuleError::Inconsistent))
                .then(|| Step::new("DIFF", vec![j]).note(format!("every reading of the goal is excluded by entry {j}")))
        })
    }

    fn close(&self, db: &Database, target: &Target) -> Result<Option<Step>, ProveError> {
        match target {
            Target::Udrs(g) => Ok(direct(db, g).map(|i| {
                let s = Step::new("DIRECT", vec![i]);
                match g.index() {
                    Some(k) if !g.is_unambiguous() => s.note(format!("index {k} respected")),
                    _ => s,
                }
            })),
            Target::Falsum => {
                let mut fresh = db.fresh();
                for (i, a) in db.entries.iter().enumerate() {
                    for (j, b) in db.entries.iter().enumerate() {
                        if i != j && matches!(rules::diff(a, b, &mut fresh), Err(RuleError::Inconsistent)) {
                            return Ok(Some(
                                Step::new("DIFF", vec![i, j]).note("structural difference is falsity"),
                            ));
                        }
                    }
                }
                let ps: Vec<&Udrs> = db.entries.iter().collect();
                if self.oracle.inconsistent(&ps, &db.lexicon)? {
                    let n = self.oracle.bound();
                    return Ok(Some(
                        Step::new("ABSURD", (0..db.entries.len()).collect()).note(format!("no model up to size {n}")),
                    ));
                }
                Ok(None)
            }
        }
    }

    fn dfs(
        &self,
        ctx: &mut Ctx,
        db: &Database,
        target: &Target,
        depth: usize,
        steps: &mut Vec<Step>,
    ) -> Result<bool, ProveError> {
        if let Some(step) = self.close(db, target)? {
            steps.push(step);
            return Ok(true);
        }
        if depth == 0 {
            return Ok(false);
        }
        let key = match target {
            Target::Udrs(g) => format!("{depth}|{}|{}", print_database(db), print_udrs(g)),
            Target::Falsum => format!("{depth}|{}|⊥", print_database(db)),
        };
        if !ctx.seen.insert(key) {
            return Ok(false);
        }
        let mut moves = self.rules_of_proof(db, target);
        moves.extend(self.forward(ctx, db, target));
        for (next, step) in moves {
            let goal = step.goal.clone().unwrap_or_else(|| target.clone());
            steps.push(step);
            if self.dfs(ctx, &next, &goal, depth - 1, steps)? {
                return Ok(true);
            }
            steps.pop();
        }
        Ok(false)
    }

    /// COND and RAA, where the guard allows them.
    fn rules_of_proof(&self, db: &Database, target: &Target) -> Vec<(Database, Step)> {
        let Target::Udrs(g) = target else { return vec![] };
        let mut out = Vec::new();
        let mut fresh = db.fresh();
        if let Ok((hyp, sub)) = cond(db, g, &mut fresh) {
            if let Some(next) = extend(db, hyp.clone(), &fresh) {
                let mut s = Step::new("COND", vec![]).note("the conditional has widest scope in every reading");
                s.effects.push(Effect::Add(hyp));
                s.goal = Some(Target::Udrs(sub));
                out.push((next, s));
            }
        }
        let mut fresh = db.fresh();
        if let Ok(hyp) = raa(g, &mut fresh) {
            if let Some(next) = extend(db, hyp.clone(), &fresh) {
                let mut s = Step::new("RAA", vec![]).note("the negation has widest scope in every reading");
                s.effects.push(Effect::Add(hyp));
                s.goal = Some(Target::Falsum);
                out.push((next, s));
            }
        }
        out
    }

    /// One-step extensions of the database, in the order DIFF, DET, RR, AI, NeU.
    fn forward(&self, ctx: &mut Ctx, db: &Database, target: &Target) -> Vec<(Database, Step)> {
        let mut out = Vec::new();
        let n = db.entries.len();
        let added = |out: &mut Vec<(Database, Step)>, u: Udrs, fresh: &Fresh, mut s: Step| {
            if let Some(next) = extend(db, u.clone(), fresh) {
                s.effects.push(Effect::Add(u));
                out.push((next, s));
            }
        };

        for i in 0..n {
            for j in 0..n {
                let mut fresh = db.fresh();
                if i == j {
                    continue;
                }
                if let Ok(v) = rules::diff(&db.entries[i], &db.entries[j], &mut fresh) {
                    let s = Step::new("DIFF", vec![i, j]).note(format!("readings of {i} not shared by the negation {j}"));
                    added(&mut out, v, &fresh, s);
                }
            }
        }

        let table = &self.oracle.table;
        for h in 0..n {
            for node in db.entries[h].top_clause().node_labels() {
                let Ok((src, bound)) = rules::det_source(db, h, &node, table) else { continue };
                for f in rules::find_embeddings(&src, &bound, db, h) {
                    let mut fresh = db.fresh();
                    let key = format!("{}|{h}|{node}|{f:?}", print_database(db));
                    let v = match ctx.det.get(&key) {
                        Some(v) => v.clone(),
                        None => {
                            let v = rules::det(db, h, &node, &f, &self.oracle, &mut fresh).ok();
                            ctx.det.insert(key, v.clone());
                            v
                        }
                    };
                    let Some(v) = v else { continue };
                    fresh.reserve_udrs(&v);
                    let mut inputs = vec![h];
                    let mut s = Step::new("DET", vec![]).note(format!("{node}+"));
                    let refs: Vec<String> = f.refs.iter().map(|(x, t)| format!("{x}:={t}")).collect();
                    if !refs.is_empty() {
                        s = s.note(format!("embedding {}", refs.join(" ")));
                    }
                    for m in &f.clauses {
                        inputs.push(m.entry);
                        let show = |i: &Option<CorrelationIndex>| i.as_ref().map_or("-".to_string(), |i| i.to_string());
                        s = s.note(if m.clause_index.is_some() && m.clause_index == m.entry_index {
                            format!("coindexed {}", show(&m.clause_index))
                        } else {
                            format!(
                                "readings {} and {} equivalent",
                                show(&m.clause_index),
                                show(&m.entry_index)
                            )
                        });
                    }
                    s.inputs = inputs;
                    added(&mut out, v, &fresh, s);
                }
            }
        }

        if let Target::Udrs(g) = target {
            let rep = Replacer::new(db, &ctx.lex, &ctx.pi, &self.oracle);
            for i in 0..n {
                let Ok(d) = rr_towards(&rep, i, g, self.rr_depth) else { continue };
                let Ok(next) = rr(db, &d) else { continue };
                if next.entries.len() == n {
                    continue;
                }
                let mut s = Step::new("RR", vec![i]);
                for j in &d.steps {
                    flatten(j, &mut s.discharges);
                }
                if d.source_entry != db.entries[i] {
                    s.effects.push(Effect::Set(i, d.source_entry.clone()));
                }
                s.effects.push(Effect::Add(d.result.clone()));
                out.push((next, s));
            }
        }

        for i in 0..n {
            for j in i + 1..n {
                let mut fresh = db.fresh();
                if let Ok(v) = rules::ai(&db.entries[i], &db.entries[j], &mut fresh) {
                    let s = Step::new("AI", vec![i, j]).note(format!("{i} and {j} differ only in order"));
                    added(&mut out, v, &fresh, s);
                }
            }
        }

        if let Target::Udrs(g) = target {
            let want = g.boxes[&g.top].universe.len();
            for i in 0..n {
                let e = &db.entries[i];
                let have = e.boxes[&e.top].universe.len();
                if want > have {
                    let mut fresh = db.fresh();
                    let refs: Vec<Referent> = (have..want).map(|_| fresh.referent()).collect();
                    if let Ok(v) = rules::neu(e, &refs) {
                        let (v, _) = fresh_variant(&v, &mut fresh);
                        added(&mut out, v, &fresh, Step::new("NeU", vec![i]));
                    }
                }
            }
        }
        out
    }
}

/// Applies the effects of `steps` to `db`, checking each added entry.
pub fn replay(db: &Database, steps: &[Step]) -> Result<Database, ProveError> {
    let mut out = db.clone();
    for s in steps {
        for e in &s.effects {
            match e {
                Effect::Add(u) => {
                    validate(u)?;
                    let mut f = out.fresh();
                    f.reserve_udrs(u);
                    out.push(u.clone())?;
                    out.commit_fresh(&f);
                }
                Effect::Set(i, u) => {
                    validate(u)?;
                    let slot = out
                        .entries
                        .get_mut(*i)
                        .ok_or_else(|| ProveError::Replay(format!("no entry {i}")))?;
                    *slot = u.clone();
                    out.registry.extend(u.indices());
                }
            }
        }
    }
    Ok(out)
}

fn indent(text: &str, by: usize) -> String {
    let pad = " ".repeat(by);
    text.lines().collect::<Vec<_>>().join(&format!("\n{pad}"))
}

pub fn print_trace(t: &ProofTrace) -> String {
    let mut out = format!("(trace :outcome {} :budget {}", t.outcome.name(), t.budget);
    for s in &t.steps {
        let inputs: Vec<String> = s.inputs.iter().map(|i| i.to_string()).collect();
        write!(out, "\n  (step :rule {} :inputs ({})", s.rule, inputs.join(" ")).unwrap();
        for d in &s.discharges {
            write!(out, "\n    (discharge {})", quote(d)).unwrap();
        }
        for e in &s.effects {
            match e {
                Effect::Add(u) => write!(out, "\n    (add {})", indent(&print_udrs(u), 4)).unwrap(),
                Effect::Set(i, u) => write!(out, "\n    (set {i} {})", indent(&print_udrs(u), 4)).unwrap(),
            }
        }
        match &s.goal {
            Some(Target::Udrs(g)) => write!(out, "\n    (goal {})", indent(&print_udrs(g), 4)).unwrap(),
            Some(Target::Falsum) => out.push_str("\n    (goal falsum)"),
            None => {}
        }
        out.push(')');
    }
    out.push_str(")\n");
    out
}

fn number(s: &Sexp) -> Result<usize, SyntaxError> {
    s.as_sym()
        .and_then(|x| x.parse().ok())
        .ok_or_else(|| SyntaxError::new(s.pos(), "expected a number"))
}

fn parse_step(form: &Sexp) -> Result<Step, SyntaxError> {
    let mut it = Items::open(form, "step")?;
    it.keyword(":rule")?;
    let rule = it.sym("rule name")?;
    it.keyword(":inputs")?;
    let inputs = it.list("inputs")?.iter().map(number).collect::<Result<_, _>>()?;
    let mut s = Step::new(rule, inputs);
    while let Some(f) = it.next() {
        let items = f.as_list().unwrap_or(&[]);
        match (f.head(), items) {
            (Some("discharge"), [_, d]) => s.discharges.push(d.as_sym().unwrap_or_default().to_string()),
            (Some("add"), [_, u]) => s.effects.push(Effect::Add(parse_udrs_form(u)?)),
            (Some("set"), [_, i, u]) => s.effects.push(Effect::Set(number(i)?, parse_udrs_form(u)?)),
            (Some("goal"), [_, g]) if g.as_sym() == Some("falsum") => s.goal = Some(Target::Falsum),
            (Some("goal"), [_, g]) => s.goal = Some(Target::Udrs(parse_udrs_form(g)?)),
            _ => return Err(SyntaxError::new(f.pos(), "expected discharge, add, set or goal")),
        }
    }
    Ok(s)
}

pub fn parse_trace(text: &str) -> Result<ProofTrace, SyntaxError> {
    let forms = read_all(text)?;
    let [form] = forms.as_slice() else {
        return Err(SyntaxError::new(
            forms.get(1).map_or(crate::engine::sexp::Pos { line: 1, col: 1 }, Sexp::pos),
            "expected one trace form",
        ));
    };
    let mut it = Items::open(form, "trace")?;
    it.keyword(":outcome")?;
    let outcome = match it.sym("outcome")? {
        "proved" => Outcome::Proved,
        "refuted" => Outcome::Refuted,
        "exhausted" => Outcome::Exhausted,
        _ => return Err(SyntaxError::new(it.pos(), "unknown outcome")),
    };
    it.keyword(":budget")?;
    let budget = number(it.next().ok_or_else(|| SyntaxError::new(it.pos(), "expected a number"))?)?;
    let mut steps = Vec::new();
    while let Some(f) = it.next() {
        steps.push(parse_step(f)?);
    }
    Ok(ProofTrace { budget, steps, outcome })
}
