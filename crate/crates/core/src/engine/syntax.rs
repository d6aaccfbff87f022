//! Textual form of UDRSs, databases and lexicons.
//!
//! ```text
//! udrs   := "(" "udrs" ":top" LABEL [":index" IDENT] [":universe" "(" VAR* ")"]
//!               [":atoms" "(" atom* ")"] clause ")"
//! clause := "(" "clause" [":index" IDENT] ":upper" LABEL ":lower" LABEL comp* base ord [readings] ")"
//! comp   := "(" "comp" ":label" LABEL [":slot" IDENT] kind ")"
//! kind   := "(" "quant" NAME VAR ":res" LABEL drs ":scope" LABEL [drs] ")"
//!         | "(" "neg" ":body" LABEL [drs] ")"
//!         | "(" "impl" ":ante" LABEL drs ":cons" LABEL [drs] ")"
//!         | "(" "sub" clause ")"
//! base   := "(" "base" ":label" LABEL "(" atom* ")" ")"
//! drs    := "(" "drs" "(" VAR* ")" "(" atom* ")" clause* ")"
//! atom   := "(" NAME term+ ")"
//! ord    := "(" "ord" edge* ")" ;  edge := "(" "leq" LABEL scopeof ")"
//! scopeof:= LABEL | "(" "scope" LABEL ")" | "(" "res" LABEL ")"
//! readings := "(" "readings" "(" LABEL* ")"* ")"
//! ```
//!
//! A term is a referent when it is declared in some universe (or bound by a
//! quantifier) of the same UDRS, and a constant otherwise. Clauses inside a
//! `drs` are subordinate clauses hosted under that slot.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use crate::engine::sexp::{read_all, Items, Pos, Sexp, SyntaxError};
use crate::modelsem::FiniteModel;
use crate::structure::*;

struct Builder {
    boxes: BTreeMap<Label, DrsBox>,
    clauses: Vec<Option<Clause>>,
    /// Raw atoms (pred, arg names) per box, resolved once all declarations are known.
    raw_atoms: Vec<(Label, String, Vec<String>)>,
    declared: BTreeSet<String>,
    seen_labels: BTreeSet<Label>,
    /// ORD edges with their positions, checked once all labels are known.
    edges: Vec<(OrdEdge, Pos)>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            boxes: BTreeMap::new(),
            clauses: Vec::new(),
            raw_atoms: Vec::new(),
            declared: BTreeSet::new(),
            seen_labels: BTreeSet::new(),
            edges: Vec::new(),
        }
    }

    fn define(&mut self, l: &Label, pos: Pos) -> Result<(), SyntaxError> {
        if self.seen_labels.insert(l.clone()) {
            Ok(())
        } else {
            Err(SyntaxError::new(pos, format!("label {l} defined twice")))
        }
    }

    fn new_box(&mut self, l: &Label, pos: Pos) -> Result<(), SyntaxError> {
        self.define(l, pos)?;
        self.boxes.insert(l.clone(), DrsBox::default());
        Ok(())
    }

    fn declare(&mut self, r: &str) {
        self.declared.insert(r.to_string());
    }
}

fn label(items: &mut Items<'_>, kw: &str) -> Result<(Label, Pos), SyntaxError> {
    items.keyword(kw)?;
    let pos = items.pos();
    Ok((Label::new(items.sym("label")?), pos))
}

fn atoms(list: &[Sexp], target: &Label, b: &mut Builder) -> Result<(), SyntaxError> {
    for a in list {
        let parts = a
            .as_list()
            .ok_or_else(|| SyntaxError::new(a.pos(), "expected atom"))?;
        if parts.len() < 2 {
            return Err(SyntaxError::new(a.pos(), "atom needs a predicate and at least one term"));
        }
        let mut names = Vec::new();
        for p in parts {
            names.push(
                p.as_sym()
                    .ok_or_else(|| SyntaxError::new(p.pos(), "expected symbol"))?
                    .to_string(),
            );
        }
        let pred = names.remove(0);
        b.raw_atoms.push((target.clone(), pred, names));
    }
    Ok(())
}

fn drs(form: &Sexp, at: &Label, b: &mut Builder) -> Result<(), SyntaxError> {
    let mut it = Items::open(form, "drs")?;
    let vars = it.list("referents")?;
    for v in vars {
        let name = v
            .as_sym()
            .ok_or_else(|| SyntaxError::new(v.pos(), "expected referent"))?;
        b.declare(name);
        b.boxes
            .get_mut(at)
            .unwrap()
            .universe
            .push(Referent::new(name));
    }
    let atom_list = it.list("atoms")?;
    atoms(atom_list, at, b)?;
    while let Some(c) = it.next() {
        clause(c, Some(at.clone()), None, b)?;
    }
    Ok(())
}

fn optional_drs(it: &mut Items<'_>, at: &Label, b: &mut Builder) -> Result<(), SyntaxError> {
    if it.peek_head() == Some("drs") {
        drs(it.next().unwrap(), at, b)?;
    }
    Ok(())
}

fn bound(form: &Sexp) -> Result<Bound, SyntaxError> {
    match form {
        Sexp::Sym(s, _) => Ok(Bound::Label(Label::new(s))),
        Sexp::List(v, p) => match (v.first().and_then(Sexp::as_sym), v.get(1).and_then(Sexp::as_sym), v.len()) {
            (Some("scope"), Some(l), 2) => Ok(Bound::Scope(Label::new(l))),
            (Some("res"), Some(l), 2) => Ok(Bound::Res(Label::new(l))),
            _ => Err(SyntaxError::new(*p, "expected LABEL, (scope LABEL) or (res LABEL)")),
        },
    }
}

fn clause(
    form: &Sexp,
    host: Option<Label>,
    index_hint: Option<CorrelationIndex>,
    b: &mut Builder,
) -> Result<(), SyntaxError> {
    let mut it = Items::open(form, "clause")?;
    let slot_in_list = b.clauses.len();
    b.clauses.push(None);
    let mut index = index_hint;
    if it.optional_keyword(":index") {
        index = Some(CorrelationIndex::new(it.sym("index")?));
    }
    let (upper, upos) = label(&mut it, ":upper")?;
    let (lower, lpos) = label(&mut it, ":lower")?;
    if host.is_some() {
        b.new_box(&upper, upos)?;
    } else if !b.boxes.contains_key(&upper) {
        return Err(SyntaxError::new(upos, "top clause must have the top label as upper bound"));
    }
    b.new_box(&lower, lpos)?;

    let mut nodes = Vec::new();
    let mut attachments = Vec::new();
    while it.peek_head() == Some("comp") {
        let cform = it.next().unwrap();
        let mut ci = Items::open(cform, "comp")?;
        let (clabel, cpos) = label(&mut ci, ":label")?;
        let slot = if ci.optional_keyword(":slot") {
            Some(ci.sym("slot")?.to_string())
        } else {
            None
        };
        let kform = ci
            .next()
            .ok_or_else(|| SyntaxError::new(ci.pos(), "expected component kind"))?;
        match kform.head() {
            Some("quant") => {
                b.define(&clabel, cpos)?;
                let mut k = Items::open(kform, "quant")?;
                let q = k.sym("quantifier name")?.to_string();
                let var = k.sym("bound referent")?.to_string();
                b.declare(&var);
                let (res, rpos) = label(&mut k, ":res")?;
                b.new_box(&res, rpos)?;
                let dform = k
                    .next()
                    .ok_or_else(|| SyntaxError::new(k.pos(), "expected restrictor drs"))?;
                drs(dform, &res, b)?;
                let (scope, spos) = label(&mut k, ":scope")?;
                b.new_box(&scope, spos)?;
                optional_drs(&mut k, &scope, b)?;
                k.finish()?;
                nodes.push(Component {
                    label: clabel,
                    cond: Condition::Quant {
                        quantifier: q,
                        var: Referent::new(var),
                        res,
                        scope,
                    },
                    slot,
                });
            }
            Some("neg") => {
                b.define(&clabel, cpos)?;
                let mut k = Items::open(kform, "neg")?;
                let (body, bpos) = label(&mut k, ":body")?;
                b.new_box(&body, bpos)?;
                optional_drs(&mut k, &body, b)?;
                k.finish()?;
                nodes.push(Component {
                    label: clabel,
                    cond: Condition::Neg { body },
                    slot,
                });
            }
            Some("impl") => {
                b.define(&clabel, cpos)?;
                let mut k = Items::open(kform, "impl")?;
                let (ante, apos) = label(&mut k, ":ante")?;
                b.new_box(&ante, apos)?;
                let dform = k
                    .next()
                    .ok_or_else(|| SyntaxError::new(k.pos(), "expected antecedent drs"))?;
                drs(dform, &ante, b)?;
                let (cons, cpos2) = label(&mut k, ":cons")?;
                b.new_box(&cons, cpos2)?;
                optional_drs(&mut k, &cons, b)?;
                k.finish()?;
                nodes.push(Component {
                    label: clabel,
                    cond: Condition::Impl { ante, cons },
                    slot,
                });
            }
            Some("sub") => {
                b.new_box(&clabel, cpos)?;
                let mut k = Items::open(kform, "sub")?;
                let inner = k
                    .next()
                    .ok_or_else(|| SyntaxError::new(k.pos(), "expected clause"))?;
                clause(inner, Some(clabel.clone()), None, b)?;
                k.finish()?;
                attachments.push(clabel);
            }
            _ => return Err(SyntaxError::new(kform.pos(), "expected quant, neg, impl or sub")),
        }
        ci.finish()?;
    }

    let bform = it
        .next()
        .ok_or_else(|| SyntaxError::new(it.pos(), "expected base"))?;
    let mut bi = Items::open(bform, "base")?;
    let (blabel, bpos) = label(&mut bi, ":label")?;
    if blabel != lower {
        return Err(SyntaxError::new(bpos, "base label must be the clause's lower bound"));
    }
    let base_atoms = bi.list("atoms")?;
    atoms(base_atoms, &lower, b)?;
    bi.finish()?;

    let oform = it
        .next()
        .ok_or_else(|| SyntaxError::new(it.pos(), "expected ord"))?;
    let mut oi = Items::open(oform, "ord")?;
    let mut ord = Vec::new();
    while let Some(e) = oi.next() {
        let mut ei = Items::open(e, "leq")?;
        let below = Label::new(ei.sym("label")?);
        let above = bound(
            ei.next()
                .ok_or_else(|| SyntaxError::new(ei.pos(), "expected upper side of edge"))?,
        )?;
        ei.finish()?;
        ord.push((OrdEdge { below, above }, e.pos()));
    }

    let mut readings = None;
    if it.peek_head() == Some("readings") {
        let rform = it.next().unwrap();
        let mut ri = Items::open(rform, "readings")?;
        let mut set = BTreeSet::new();
        while let Some(r) = ri.next() {
            let ls = r
                .as_list()
                .ok_or_else(|| SyntaxError::new(r.pos(), "expected list of labels"))?;
            let mut order = Vec::new();
            for l in ls {
                order.push(Label::new(
                    l.as_sym()
                        .ok_or_else(|| SyntaxError::new(l.pos(), "expected label"))?,
                ));
            }
            set.insert(order);
        }
        readings = Some(set);
    }
    it.finish()?;

    let edges = ord.iter().map(|(e, _)| e.clone()).collect();
    b.clauses[slot_in_list] = Some(Clause {
        index,
        upper,
        lower,
        host,
        nodes,
        attachments,
        ord: edges,
        readings,
    });
    b.edges.extend(ord);
    Ok(())
}

pub(crate) fn parse_udrs_form(form: &Sexp) -> Result<Udrs, SyntaxError> {
    let mut it = Items::open(form, "udrs")?;
    let (top, tpos) = label(&mut it, ":top")?;
    let mut b = Builder::new();
    b.new_box(&top, tpos)?;
    let mut index = None;
    if it.optional_keyword(":index") {
        index = Some(CorrelationIndex::new(it.sym("index")?));
    }
    if it.optional_keyword(":universe") {
        for v in it.list("referents")? {
            let name = v
                .as_sym()
                .ok_or_else(|| SyntaxError::new(v.pos(), "expected referent"))?;
            b.declare(name);
            b.boxes.get_mut(&top).unwrap().universe.push(Referent::new(name));
        }
    }
    if it.optional_keyword(":atoms") {
        let list = it.list("atoms")?;
        atoms(list, &top, &mut b)?;
    }
    let cform = it
        .next()
        .ok_or_else(|| SyntaxError::new(it.pos(), "expected clause"))?;
    clause(cform, None, None, &mut b)?;
    it.finish()?;

    let mut clauses: Vec<Clause> = b.clauses.into_iter().map(|c| c.unwrap()).collect();
    if index.is_some() {
        if clauses[0].index.is_some() && clauses[0].index != index {
            return Err(SyntaxError::new(tpos, "conflicting indices on the top clause"));
        }
        clauses[0].index = index;
    }
    if clauses[0].upper != top {
        return Err(SyntaxError::new(tpos, "top clause must have the top label as upper bound"));
    }

    let mut known: BTreeSet<Label> = b.boxes.keys().cloned().collect();
    known.extend(clauses.iter().flat_map(|c| c.nodes.iter().map(|n| n.label.clone())));
    let mut boxes = b.boxes;
    for (e, pos) in &b.edges {
        for l in [&e.below, e.above.label()] {
            if !known.contains(l) {
                return Err(SyntaxError::new(*pos, format!("ORD edge references unknown label {l}")));
            }
        }
    }
    for (target, pred, args) in b.raw_atoms {
        let args = args
            .into_iter()
            .map(|a| {
                if b.declared.contains(&a) {
                    Term::Ref(Referent::new(a))
                } else {
                    Term::constant(&a)
                }
            })
            .collect();
        boxes.get_mut(&target).unwrap().atoms.push(Atom { pred, args });
    }
    Ok(canonicalize(Udrs {
        top,
        boxes,
        clauses,
    }))
}

/// Reorders clauses into the order they are printed in.
pub fn canonicalize(u: Udrs) -> Udrs {
    fn visit(u: &Udrs, ci: usize, out: &mut Vec<usize>) {
        out.push(ci);
        let c = &u.clauses[ci];
        let mut hosts: Vec<&Label> = Vec::new();
        for n in &c.nodes {
            hosts.extend(n.cond.slots());
        }
        hosts.extend(c.attachments.iter());
        for h in hosts {
            for sub in u.hosted_under(h) {
                visit(u, sub, out);
            }
        }
    }
    let mut order = Vec::new();
    visit(&u, 0, &mut order);
    // Clauses hosted somewhere unreachable keep their relative order at the end.
    for i in 0..u.clauses.len() {
        if !order.contains(&i) {
            order.push(i);
        }
    }
    let clauses = order.iter().map(|&i| u.clauses[i].clone()).collect();
    Udrs { clauses, ..u }
}

pub fn parse_udrs(text: &str) -> Result<Udrs, SyntaxError> {
    let forms = read_all(text)?;
    match forms.as_slice() {
        [one] => parse_udrs_form(one),
        [] => Err(SyntaxError::new(Pos { line: 1, col: 1 }, "empty input")),
        [_, second, ..] => Err(SyntaxError::new(second.pos(), "expected a single udrs form")),
    }
}

fn parse_lex_form(form: &Sexp, lex: &mut Lexicon) -> Result<(), SyntaxError> {
    let mut it = Items::open(form, "lex")?;
    while let Some(entry) = it.next() {
        let parts = entry
            .as_list()
            .ok_or_else(|| SyntaxError::new(entry.pos(), "expected lexicon entry"))?;
        let syms: Option<Vec<&str>> = parts.iter().map(Sexp::as_sym).collect();
        let pair = match syms.as_deref() {
            Some([_, a, b]) => (a.to_string(), b.to_string()),
            _ => return Err(SyntaxError::new(entry.pos(), "expected (KIND NAME NAME)")),
        };
        match entry.head() {
            Some("hypo") => lex.hypo.push(pair),
            Some("complement") => lex.complement.push(pair),
            Some("pi") => lex.pi.push(pair),
            Some("det") => lex.det.push(pair),
            _ => {
                return Err(SyntaxError::new(
                    entry.pos(),
                    "expected hypo, complement, pi or det",
                ))
            }
        }
    }
    Ok(())
}

pub fn parse_lexicon(text: &str) -> Result<Lexicon, SyntaxError> {
    let mut lex = Lexicon::default();
    for f in read_all(text)? {
        parse_lex_form(&f, &mut lex)?;
    }
    Ok(lex)
}

/// A database file: any number of `udrs` forms, plus optional `lex` forms.
pub fn parse_database(text: &str) -> Result<Database, SyntaxError> {
    let mut db = Database::new();
    for f in read_all(text)? {
        match f.head() {
            Some("udrs") => {
                let u = parse_udrs_form(&f)?;
                db.push(u)
                    .map_err(|e| SyntaxError::new(f.pos(), e.to_string()))?;
            }
            Some("lex") => {
                let mut lex = db.lexicon.clone();
                parse_lex_form(&f, &mut lex)?;
                db.lexicon = lex;
            }
            _ => return Err(SyntaxError::new(f.pos(), "expected (udrs ...) or (lex ...)")),
        }
    }
    Ok(db)
}

fn model_form(form: &Sexp) -> Result<FiniteModel, SyntaxError> {
    let mut it = Items::open(form, "model")?;
    let d = it.list("domain")?;
    if d.first().and_then(Sexp::as_sym) != Some("domain") {
        return Err(SyntaxError::new(form.pos(), "expected (domain ...)"));
    }
    let domain: Vec<String> = d[1..]
        .iter()
        .map(|x| x.as_sym().map(str::to_string).ok_or_else(|| SyntaxError::new(x.pos(), "expected an element")))
        .collect::<Result<_, _>>()?;
    let element = |x: &Sexp| {
        x.as_sym()
            .and_then(|n| domain.iter().position(|e| e == n))
            .ok_or_else(|| SyntaxError::new(x.pos(), "not a domain element"))
    };
    let mut m = FiniteModel {
        domain: domain.clone(),
        constants: BTreeMap::new(),
        extensions: BTreeMap::new(),
    };
    while let Some(f) = it.next() {
        let items = f.as_list().unwrap_or(&[]);
        match (f.head(), items) {
            (Some("const"), [_, c, e]) => {
                let name = c.as_sym().ok_or_else(|| SyntaxError::new(c.pos(), "expected a constant"))?;
                m.constants.insert(name.to_string(), element(e)?);
            }
            (Some("pred"), [_, p, k, ext]) => {
                let name = p.as_sym().ok_or_else(|| SyntaxError::new(p.pos(), "expected a predicate"))?;
                let arity: usize = k
                    .as_sym()
                    .and_then(|x| x.parse().ok())
                    .ok_or_else(|| SyntaxError::new(k.pos(), "expected an arity"))?;
                let tuples = ext.as_list().ok_or_else(|| SyntaxError::new(ext.pos(), "expected an extension"))?;
                let mut set = BTreeSet::new();
                for t in tuples {
                    let tuple = match t.as_list() {
                        Some(xs) => xs.iter().map(element).collect::<Result<Vec<_>, _>>()?,
                        None => vec![element(t)?],
                    };
                    if tuple.len() != arity {
                        return Err(SyntaxError::new(t.pos(), "tuple does not match the arity"));
                    }
                    set.insert(tuple);
                }
                m.extensions.insert((name.to_string(), arity), set);
            }
            _ => return Err(SyntaxError::new(f.pos(), "expected (const ...) or (pred ...)")),
        }
    }
    Ok(m)
}

/// A model file: `(model (domain a b) (const john a) (pred p 1 (a)) (pred r 2 ((a b))))`.
pub fn parse_model(text: &str) -> Result<FiniteModel, SyntaxError> {
    match read_all(text)?.as_slice() {
        [f] => model_form(f),
        _ => Err(SyntaxError::new(Pos { line: 1, col: 1 }, "expected one model form")),
    }
}

struct Printer<'a> {
    u: &'a Udrs,
    out: String,
}

impl Printer<'_> {
    fn indent(&mut self, depth: usize) {
        self.out.push('\n');
        for _ in 0..depth {
            self.out.push_str("  ");
        }
    }

    fn atoms(&mut self, atoms: &[Atom]) {
        self.out.push('(');
        let parts: Vec<String> = atoms.iter().map(|a| a.to_string()).collect();
        self.out.push_str(&parts.join(" "));
        self.out.push(')');
    }

    fn refs(&mut self, refs: &[Referent]) {
        let parts: Vec<&str> = refs.iter().map(|r| r.as_str()).collect();
        write!(self.out, "({})", parts.join(" ")).unwrap();
    }

    fn drs(&mut self, at: &Label, depth: usize, optional: bool) {
        let bx = &self.u.boxes[at];
        let hosted = self.u.hosted_under(at);
        if optional && bx.is_empty() && hosted.is_empty() {
            return;
        }
        self.out.push_str(" (drs ");
        self.refs(&bx.universe);
        self.out.push(' ');
        self.atoms(&bx.atoms);
        for ci in hosted {
            self.indent(depth + 1);
            self.clause(ci, depth + 1, false);
        }
        self.out.push(')');
    }

    fn clause(&mut self, ci: usize, depth: usize, top: bool) {
        let c = &self.u.clauses[ci];
        self.out.push_str("(clause");
        if !top {
            if let Some(i) = &c.index {
                write!(self.out, " :index {i}").unwrap();
            }
        }
        write!(self.out, " :upper {} :lower {}", c.upper, c.lower).unwrap();
        for n in &c.nodes {
            self.indent(depth + 1);
            write!(self.out, "(comp :label {}", n.label).unwrap();
            if let Some(s) = &n.slot {
                write!(self.out, " :slot {s}").unwrap();
            }
            match &n.cond {
                Condition::Quant {
                    quantifier,
                    var,
                    res,
                    scope,
                } => {
                    write!(self.out, " (quant {quantifier} {var} :res {res}").unwrap();
                    self.drs(res, depth + 1, false);
                    write!(self.out, " :scope {scope}").unwrap();
                    self.drs(scope, depth + 1, true);
                }
                Condition::Neg { body } => {
                    write!(self.out, " (neg :body {body}").unwrap();
                    self.drs(body, depth + 1, true);
                }
                Condition::Impl { ante, cons } => {
                    write!(self.out, " (impl :ante {ante}").unwrap();
                    self.drs(ante, depth + 1, false);
                    write!(self.out, " :cons {cons}").unwrap();
                    self.drs(cons, depth + 1, true);
                }
            }
            self.out.push_str("))");
        }
        for a in &c.attachments {
            self.indent(depth + 1);
            write!(self.out, "(comp :label {a} (sub").unwrap();
            for sub in self.u.hosted_under(a) {
                self.indent(depth + 2);
                self.clause(sub, depth + 2, false);
            }
            self.out.push_str("))");
        }
        self.indent(depth + 1);
        write!(self.out, "(base :label {} ", c.lower).unwrap();
        self.atoms(&self.u.boxes[&c.lower].atoms.clone());
        self.out.push(')');
        self.indent(depth + 1);
        self.out.push_str("(ord");
        for e in &c.ord {
            match &e.above {
                Bound::Label(l) => write!(self.out, " (leq {} {l})", e.below),
                Bound::Scope(l) => write!(self.out, " (leq {} (scope {l}))", e.below),
                Bound::Res(l) => write!(self.out, " (leq {} (res {l}))", e.below),
            }
            .unwrap();
        }
        self.out.push(')');
        if let Some(rs) = &c.readings {
            self.indent(depth + 1);
            self.out.push_str("(readings");
            for r in rs {
                let parts: Vec<&str> = r.iter().map(|l| l.as_str()).collect();
                write!(self.out, " ({})", parts.join(" ")).unwrap();
            }
            self.out.push(')');
        }
        self.out.push(')');
    }
}

pub fn print_udrs(u: &Udrs) -> String {
    let u = canonicalize(u.clone());
    let mut p = Printer {
        u: &u,
        out: String::new(),
    };
    write!(p.out, "(udrs :top {}", u.top).unwrap();
    if let Some(i) = u.index() {
        write!(p.out, " :index {i}").unwrap();
    }
    let top = &u.boxes[&u.top];
    if !top.universe.is_empty() {
        p.out.push_str(" :universe ");
        p.refs(&top.universe.clone());
    }
    if !top.atoms.is_empty() {
        p.out.push_str(" :atoms ");
        p.atoms(&top.atoms.clone());
    }
    p.indent(1);
    p.clause(0, 1, true);
    p.out.push(')');
    p.out
}

pub fn print_lexicon(lex: &Lexicon) -> String {
    let mut out = String::from("(lex");
    for (kind, pairs) in [
        ("hypo", &lex.hypo),
        ("complement", &lex.complement),
        ("pi", &lex.pi),
        ("det", &lex.det),
    ] {
        for (a, b) in pairs {
            write!(out, " ({kind} {a} {b})").unwrap();
        }
    }
    out.push(')');
    out
}

pub fn print_database(db: &Database) -> String {
    let mut out = String::new();
    for e in &db.entries {
        out.push_str(&print_udrs(e));
        out.push('\n');
    }
    if !db.lexicon.is_empty() {
        out.push_str(&print_lexicon(&db.lexicon));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::validate;

    pub const EX15: &str = "
(udrs :top top
  (clause :upper top :lower l3
    (comp :label l1 (quant every x :res r1 (drs () ()) :scope s1))
    (comp :label l2 (neg :body b2))
    (base :label l3 ((pay-att x)))
    (ord (leq l3 (scope l1)) (leq l3 (scope l2)))))";

    #[test]
    fn parses_the_neutral_negation_example() {
        let u = parse_udrs(EX15).unwrap();
        validate(&u).unwrap();
        assert_eq!(u.top_clause().nodes.len(), 2);
        assert_eq!(
            u.boxes[&Label::new("l3")].atoms[0].args[0],
            Term::Ref(Referent::new("x"))
        );
    }

    #[test]
    fn print_parse_round_trip() {
        let u = parse_udrs(EX15).unwrap();
        let text = print_udrs(&u);
        assert_eq!(parse_udrs(&text).unwrap(), u);
    }

    #[test]
    fn unknown_label_in_ord_is_a_parse_error() {
        let text = EX15.replace("(leq l3 (scope l2))", "(leq l3 (scope l9))");
        let err = parse_udrs(&text).unwrap_err();
        assert!(err.msg.contains("unknown label l9"), "{err}");
        assert_eq!(err.pos.line, 7);
    }

    #[test]
    fn constants_are_undeclared_terms() {
        let u = parse_udrs(
            "(udrs :top t (clause :upper t :lower b (base :label b ((politician john))) (ord)))",
        )
        .unwrap();
        assert_eq!(u.boxes[&Label::new("b")].atoms[0].args[0], Term::constant("john"));
    }

    #[test]
    fn nested_clauses_and_sub_components() {
        let text = "
(udrs :top t :index i
  (clause :upper t :lower b0
    (comp :label c1 (impl :ante a (drs () ()
        (clause :index j :upper u1 :lower b1 (base :label b1 ((talk chair))) (ord)))
      :cons c))
    (comp :label s (sub (clause :upper u2 :lower b2 (base :label b2 ((p k))) (ord))))
    (base :label b0 ())
    (ord)))";
        let u = parse_udrs(text).unwrap();
        validate(&u).unwrap();
        assert_eq!(u.clauses.len(), 3);
        assert_eq!(u.clauses[1].host, Some(Label::new("a")));
        assert_eq!(u.clauses[1].index, Some(CorrelationIndex::new("j")));
        assert_eq!(u.clauses[2].host, Some(Label::new("s")));
        assert_eq!(parse_udrs(&print_udrs(&u)).unwrap(), u);
    }

    #[test]
    fn database_with_lexicon() {
        let text = format!("{EX15}\n(lex (hypo snore sleep) (pi a every))");
        let db = parse_database(&text).unwrap();
        assert_eq!(db.entries.len(), 1);
        assert_eq!(db.lexicon.hypo, vec![("snore".into(), "sleep".into())]);
        let again = parse_database(&print_database(&db)).unwrap();
        assert_eq!(again.entries, db.entries);
        assert_eq!(again.lexicon, db.lexicon);
    }

    #[test]
    fn model_files_round_trip() {
        let text = "(model (domain a b) (const john a) (pred p 1 (a b)) (pred r 2 ((a b) (b b))))";
        let m = parse_model(text).unwrap();
        assert_eq!(m.to_string(), text);
        assert!(parse_model("(model (domain a) (pred p 1 (c)))").is_err());
        assert!(parse_model("(model (domain a) (pred r 2 (a)))").is_err());
    }
}
