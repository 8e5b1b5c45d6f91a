//! The problem file format.
//!
//! ```text
//! (signature (sorts S U) (functions (f (S S) S)) (relations (R (S U))))
//! (theory (undef-axioms))                      ; or (axiom (forall (x S) F)) ...
//! (precedence e e1 y1)
//! (cover (exists ((e S))) (params (y1 S)) (and (= (f e y1) y1) ...))
//! (system (vars (x1 S)) (locals (z S)) (init F) (trans F) (unsafe F))
//! ```
//!
//! Undeclared symbols in a cover body are parameters and undeclared symbols
//! in `trans` are step-local variables; their sorts are inferred. Primed
//! state variables are written `x1'`.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::literal::Literal;
use crate::ordering::Precedence;
use crate::print;
use crate::reach::TransitionSystem;
use crate::signature::{FunKind, Signature, Sort};
use crate::solver::{Axiom, Theory};
use crate::term::{Term, Var, VarKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SexpKind {
    Atom(String),
    List(Vec<Sexp>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sexp {
    pub kind: SexpKind,
    pub line: usize,
    pub col: usize,
}

impl Sexp {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        })
    }

    fn sort_err<T>(&self, msg: impl fmt::Display) -> Result<T> {
        Err(Error::Sort(format!("{}:{}: {msg}", self.line, self.col)))
    }

    pub fn atom(&self) -> Option<&str> {
        match &self.kind {
            SexpKind::Atom(a) => Some(a),
            SexpKind::List(_) => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match &self.kind {
            SexpKind::List(l) => Some(l),
            SexpKind::Atom(_) => None,
        }
    }

    fn expect_atom(&self, what: &str) -> Result<&str> {
        match self.atom() {
            Some(a) => Ok(a),
            None => self.err(format!("expected {what}")),
        }
    }

    fn expect_list(&self, what: &str) -> Result<&[Sexp]> {
        match self.list() {
            Some(l) => Ok(l),
            None => self.err(format!("expected {what}")),
        }
    }

    /// The head symbol and arguments of a non-empty list.
    fn head(&self) -> Option<(&str, &[Sexp])> {
        let l = self.list()?;
        let h = l.first()?.atom()?;
        Some((h, &l[1..]))
    }

    fn form(&self, name: &str) -> Result<&[Sexp]> {
        match self.head() {
            Some((h, rest)) if h == name => Ok(rest),
            _ => self.err(format!("expected ({name} ...)")),
        }
    }
}

/// Reads every s-expression in `text`. `;` starts a comment.
pub fn read_sexps(text: &str) -> Result<Vec<Sexp>> {
    let mut stack: Vec<(usize, usize, Vec<Sexp>)> = Vec::new();
    let mut top = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (l0, c0) = (line, col);
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            ';' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    chars.next();
                }
            }
            '(' => {
                chars.next();
                col += 1;
                stack.push((l0, c0, Vec::new()));
            }
            ')' => {
                chars.next();
                col += 1;
                let Some((l, c, items)) = stack.pop() else {
                    return Err(Error::Parse {
                        line: l0,
                        col: c0,
                        msg: "unbalanced `)`".into(),
                    });
                };
                let s = Sexp {
                    kind: SexpKind::List(items),
                    line: l,
                    col: c,
                };
                match stack.last_mut() {
                    Some((_, _, parent)) => parent.push(s),
                    None => top.push(s),
                }
            }
            _ => {
                let mut a = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    a.push(c);
                    chars.next();
                    col += 1;
                }
                let s = Sexp {
                    kind: SexpKind::Atom(a),
                    line: l0,
                    col: c0,
                };
                match stack.last_mut() {
                    Some((_, _, parent)) => parent.push(s),
                    None => top.push(s),
                }
            }
        }
    }
    if let Some((l, c, _)) = stack.pop() {
        return Err(Error::Parse {
            line: l,
            col: c,
            msg: "unclosed `(`".into(),
        });
    }
    Ok(top)
}

/// `exists evars. body` over the parameters `params`.
#[derive(Clone, Debug)]
pub struct CoverQuery {
    pub evars: Vec<Var>,
    pub params: Vec<Var>,
    pub body: Vec<Literal>,
}

#[derive(Clone, Debug)]
pub enum Query {
    Cover(CoverQuery),
    System(Box<TransitionSystem>),
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub sig: Signature,
    pub theory: Theory,
    pub prec: Precedence,
    pub query: Query,
}

fn parse_sorts(sig: &Signature, items: &Sexp, what: &str) -> Result<Vec<String>> {
    items
        .expect_list(&format!("argument sorts of `{what}`"))?
        .iter()
        .map(|s| {
            let name = s.expect_atom("a sort")?;
            if sig.sort(name).is_none() {
                return s.sort_err(format!("undeclared sort `{name}` in `{what}`"));
            }
            Ok(name.to_string())
        })
        .collect()
}

fn parse_signature(s: &Sexp) -> Result<Signature> {
    let mut sig = Signature::new();
    for part in s.form("signature")? {
        let Some((h, rest)) = part.head() else {
            return part.err("expected (sorts ...), (functions ...) or (relations ...)");
        };
        match h {
            "sorts" => {
                for name in rest {
                    let n = name.expect_atom("a sort name")?;
                    sig.add_sort(n).or_else(|e| name.err(e.to_string()))?;
                }
            }
            "functions" => {
                for d in rest {
                    let items = d.expect_list("(f (ARGS) RESULT)")?;
                    let [name, args, result] = items else {
                        return d.err("expected (f (ARGS) RESULT)");
                    };
                    let n = name.expect_atom("a function name")?;
                    let args = parse_sorts(&sig, args, n)?;
                    let r = result.expect_atom("a result sort")?;
                    if sig.sort(r).is_none() {
                        return result.sort_err(format!("undeclared sort `{r}` in `{n}`"));
                    }
                    let args: Vec<&str> = args.iter().map(String::as_str).collect();
                    sig.add_fun(n, &args, r).or_else(|e| d.err(e.to_string()))?;
                }
            }
            "relations" => {
                for d in rest {
                    let items = d.expect_list("(R (ARGS))")?;
                    let [name, args] = items else {
                        return d.err("expected (R (ARGS))");
                    };
                    let n = name.expect_atom("a relation name")?;
                    let args = parse_sorts(&sig, args, n)?;
                    let args: Vec<&str> = args.iter().map(String::as_str).collect();
                    sig.add_rel(n, &args).or_else(|e| d.err(e.to_string()))?;
                }
            }
            other => return part.err(format!("unknown signature section `{other}`")),
        }
    }
    Ok(sig)
}

/// Which undeclared symbols become variables, and of what kind.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Free {
    Forbidden,
    Parameter,
}

struct Scope<'a> {
    sig: &'a Signature,
    vars: HashMap<String, Var>,
    free: Free,
    /// Inferred sorts of undeclared symbols, in order of appearance.
    inferred: Vec<(String, Option<Sort>)>,
}

impl Scope<'_> {
    fn declare_sort(&self, s: &Sexp) -> Result<Sort> {
        let n = s.expect_atom("a sort")?;
        match self.sig.sort(n) {
            Some(sort) => Ok(sort),
            None => s.sort_err(format!("undeclared sort `{n}`")),
        }
    }

    /// `((x S) ...)` bindings.
    fn bindings(&self, s: &Sexp) -> Result<Vec<(String, Sort)>> {
        s.expect_list("a list of (name SORT) bindings")?
            .iter()
            .map(|b| match b.list() {
                Some([n, sort]) => Ok((n.expect_atom("a variable name")?.to_string(), self.declare_sort(sort)?)),
                _ => b.err("expected (name SORT)"),
            })
            .collect()
    }

    fn is_free_symbol(&self, name: &str) -> bool {
        self.free == Free::Parameter
            && !self.vars.contains_key(name)
            && self.sig.fun(name).is_none()
            && self.sig.rel(name).is_none()
            && !matches!(name, "true" | "false")
    }

    fn free_sort(&self, name: &str) -> Option<&Sort> {
        self.inferred.iter().find(|(n, _)| n == name).and_then(|(_, s)| s.as_ref())
    }

    fn note(&mut self, name: &str, sort: Option<&Sort>) -> bool {
        match self.inferred.iter_mut().find(|(n, _)| n == name) {
            Some((_, slot)) => {
                if slot.is_none() && sort.is_some() {
                    *slot = sort.cloned();
                    return true;
                }
                false
            }
            None => {
                self.inferred.push((name.to_string(), sort.cloned()));
                true
            }
        }
    }

    fn infer_term(&mut self, s: &Sexp, expected: Option<&Sort>, changed: &mut bool) -> Option<Sort> {
        match &s.kind {
            SexpKind::Atom(a) => {
                if let Some(v) = self.vars.get(a) {
                    return Some(v.sort().clone());
                }
                if let Some(f) = self.sig.fun(a) {
                    return Some(f.result().clone());
                }
                if self.is_free_symbol(a) {
                    *changed |= self.note(a, expected);
                    return self.free_sort(a).cloned();
                }
                None
            }
            SexpKind::List(items) => {
                let f = self.sig.fun(items.first()?.atom()?)?;
                for (arg, sort) in items[1..].iter().zip(f.args()) {
                    self.infer_term(arg, Some(sort), changed);
                }
                Some(f.result().clone())
            }
        }
    }

    fn infer_formula(&mut self, s: &Sexp, changed: &mut bool) {
        let Some((h, args)) = s.head() else { return };
        match h {
            "and" | "or" | "not" | "=>" => {
                for a in args {
                    self.infer_formula(a, changed);
                }
            }
            "=" | "distinct" => {
                if let [a, b] = args {
                    let sa = self.infer_term(a, None, changed);
                    let sb = self.infer_term(b, sa.as_ref(), changed);
                    if sa.is_none() && sb.is_some() {
                        self.infer_term(a, sb.as_ref(), changed);
                    }
                }
            }
            r => {
                if let Some(rel) = self.sig.rel(r) {
                    for (arg, sort) in args.iter().zip(rel.args()) {
                        self.infer_term(arg, Some(sort), changed);
                    }
                }
            }
        }
    }

    /// Infers the sorts of undeclared symbols and binds them as parameters
    /// with indices from `first_index`.
    fn bind_free(&mut self, forms: &[&Sexp], first_index: usize) -> Result<Vec<Var>> {
        loop {
            let mut changed = false;
            for f in forms {
                self.infer_formula(f, &mut changed);
            }
            if !changed {
                break;
            }
        }
        let mut out = Vec::new();
        for (i, (name, sort)) in self.inferred.clone().into_iter().enumerate() {
            let Some(sort) = sort else {
                return Err(Error::Sort(format!("cannot infer the sort of `{name}`")));
            };
            let v = Var::parameter(first_index + i, &name, sort);
            self.vars.insert(name, v.clone());
            out.push(v);
        }
        Ok(out)
    }

    fn term(&self, s: &Sexp) -> Result<Term> {
        match &s.kind {
            SexpKind::Atom(a) => {
                if let Some(v) = self.vars.get(a) {
                    return Ok(Term::var(v.clone()));
                }
                match self.sig.fun(a) {
                    Some(f) if f.arity() == 0 => Ok(Term::app(f, Vec::new()).or_else(|e| s.sort_err(e))?),
                    Some(f) => s.err(format!("`{a}` expects {} arguments", f.arity())),
                    None => s.err(format!("unknown symbol `{a}`")),
                }
            }
            SexpKind::List(items) => {
                let Some((h, args)) = s.head() else {
                    return s.err("expected a term");
                };
                let Some(f) = self.sig.fun(h) else {
                    return items[0].err(format!("unknown function `{h}`"));
                };
                if f.arity() != args.len() {
                    return s.err(format!("`{h}` expects {} arguments, got {}", f.arity(), args.len()));
                }
                let args = args.iter().map(|a| self.term(a)).collect::<Result<Vec<_>>>()?;
                Term::app(f, args).or_else(|e| s.sort_err(e))
            }
        }
    }

    fn formula(&self, s: &Sexp) -> Result<Formula> {
        if let Some(a) = s.atom() {
            return match a {
                "true" => Ok(Formula::True),
                "false" => Ok(Formula::False),
                r => match self.sig.rel(r) {
                    Some(rel) => Ok(Formula::lit(Literal::rel(true, rel, Vec::new()).or_else(|e| s.sort_err(e))?)),
                    None => s.err(format!("expected a formula, found `{r}`")),
                },
            };
        }
        let Some((h, args)) = s.head() else {
            return s.err("expected a formula");
        };
        let sub = |i: usize| self.formula(&args[i]);
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                s.err(format!("`{h}` expects {n} arguments"))
            }
        };
        match h {
            "and" => Ok(Formula::and(args.iter().map(|a| self.formula(a)).collect::<Result<Vec<_>>>()?)),
            "or" => Ok(Formula::or(args.iter().map(|a| self.formula(a)).collect::<Result<Vec<_>>>()?)),
            "not" => {
                arity(1)?;
                Ok(Formula::not(sub(0)?))
            }
            "=>" => {
                arity(2)?;
                Ok(Formula::implies(sub(0)?, sub(1)?))
            }
            "=" | "distinct" => {
                arity(2)?;
                let (a, b) = (self.term(&args[0])?, self.term(&args[1])?);
                let l = Literal::eq(a, b).or_else(|e| s.sort_err(e))?;
                Ok(Formula::lit(if h == "=" { l } else { l.negate() }))
            }
            r => {
                let Some(rel) = self.sig.rel(r) else {
                    return s.err(format!("unknown relation `{r}`"));
                };
                if rel.arity() != args.len() {
                    return s.err(format!("`{r}` expects {} arguments", rel.arity()));
                }
                let args = args.iter().map(|a| self.term(a)).collect::<Result<Vec<_>>>()?;
                Ok(Formula::lit(Literal::rel(true, rel, args).or_else(|e| s.sort_err(e))?))
            }
        }
    }
}

fn parse_theory(s: &Sexp, sig: &mut Signature) -> Result<Theory> {
    let parts = s.form("theory")?;
    if let [p] = parts {
        if p.head().is_some_and(|(h, _)| h == "undef-axioms") {
            sig.add_undef_constants();
            return Ok(Theory::Undef(sig.clone()));
        }
    }
    let mut axioms = Vec::new();
    for p in parts {
        let body = p.form("axiom")?;
        let [q] = body else {
            return p.err("expected (axiom (forall (x S) F))");
        };
        let items = q.form("forall")?;
        let [binding, f] = items else {
            return q.err("expected (forall (x S) F)");
        };
        let scope = Scope {
            sig,
            vars: HashMap::new(),
            free: Free::Forbidden,
            inferred: Vec::new(),
        };
        let Some([name, sort]) = binding.list() else {
            return binding.err("expected (x S)");
        };
        let var = Var::new(
            VarKind::Bound,
            axioms.len() + 1,
            name.expect_atom("a variable name")?,
            scope.declare_sort(sort)?,
        );
        let mut scope = scope;
        scope.vars.insert(var.name().to_string(), var.clone());
        let body = scope.formula(f)?;
        axioms.push(Axiom { var, body });
    }
    if axioms.is_empty() {
        return Ok(Theory::Empty);
    }
    Ok(Theory::Axioms(sig.clone(), axioms))
}

fn parse_cover(s: &Sexp, sig: &Signature) -> Result<CoverQuery> {
    let parts = s.form("cover")?;
    let mut scope = Scope {
        sig,
        vars: HashMap::new(),
        free: Free::Parameter,
        inferred: Vec::new(),
    };
    let Some((first, rest)) = parts.split_first() else {
        return s.err("expected (cover (exists ...) BODY)");
    };
    let binds = first.form("exists")?;
    let [binds] = binds else {
        return first.err("expected (exists ((e S) ...))");
    };
    let mut evars = Vec::new();
    for (i, (n, sort)) in scope.bindings(binds)?.into_iter().enumerate() {
        let v = Var::existential(i + 1, &n, sort);
        scope.vars.insert(n, v.clone());
        evars.push(v);
    }
    let (declared, body) = match rest {
        [p, body] if p.head().is_some_and(|(h, _)| h == "params") => (Some(p), body),
        [body] => (None, body),
        _ => return s.err("expected (cover (exists ...) [(params ...)] BODY)"),
    };
    let mut params = Vec::new();
    if let Some(p) = declared {
        for b in p.form("params")? {
            let Some([n, sort]) = b.list() else {
                return b.err("expected (y S)");
            };
            let name = n.expect_atom("a parameter name")?;
            let v = Var::parameter(params.len() + 1, name, scope.declare_sort(sort)?);
            scope.vars.insert(name.to_string(), v.clone());
            params.push(v);
        }
    }
    let n = params.len();
    params.extend(scope.bind_free(&[body], n + 1)?);
    let f = scope.formula(body)?;
    let Some(body) = f.as_conjunction() else {
        return body_err(body);
    };
    Ok(CoverQuery { evars, params, body })
}

fn body_err<T>(s: &Sexp) -> Result<T> {
    s.err("the cover body must be a conjunction of literals")
}

fn parse_system(s: &Sexp, sig: &Signature, theory: &Theory) -> Result<TransitionSystem> {
    let parts = s.form("system")?;
    let mut scope = Scope {
        sig,
        vars: HashMap::new(),
        free: Free::Forbidden,
        inferred: Vec::new(),
    };
    let mut sections: HashMap<&str, &Sexp> = HashMap::new();
    for p in parts {
        let Some((h, _)) = p.head() else {
            return p.err("expected a system section");
        };
        if !matches!(h, "vars" | "locals" | "init" | "trans" | "unsafe") {
            return p.err(format!("unknown system section `{h}`"));
        }
        if sections.insert(h, p).is_some() {
            return p.err(format!("duplicate section `{h}`"));
        }
    }
    let get = |name: &str| match sections.get(name) {
        Some(p) => {
            let body = p.form(name)?;
            match body {
                [f] => Ok(f),
                _ => p.err(format!("expected ({name} F)")),
            }
        }
        None => s.err(format!("missing ({name} ...)")),
    };
    let Some(vars_form) = sections.get("vars") else {
        return s.err("missing (vars ...)");
    };
    let mut vars = Vec::new();
    for b in vars_form.form("vars")? {
        let Some([n, sort]) = b.list() else {
            return b.err("expected (x S)");
        };
        let name = n.expect_atom("a variable name")?;
        vars.push(Var::parameter(vars.len() + 1, name, scope.declare_sort(sort)?));
    }
    let mut sys = TransitionSystem::new(sig.clone(), theory.clone(), vars, Formula::True, Formula::True, Formula::True);
    for v in sys.vars.iter().chain(&sys.next) {
        scope.vars.insert(v.name().to_string(), v.clone());
    }
    let mut index = 2 * sys.vars.len() + 1;
    if let Some(p) = sections.get("locals") {
        for b in p.form("locals")? {
            let Some([n, sort]) = b.list() else {
                return b.err("expected (z S)");
            };
            let name = n.expect_atom("a variable name")?;
            scope
                .vars
                .insert(name.to_string(), Var::parameter(index, name, scope.declare_sort(sort)?));
            index += 1;
        }
    }
    let (init, trans, bad) = (get("init")?, get("trans")?, get("unsafe")?);
    let primed: Vec<String> = sys.next.iter().map(|v| v.name().to_string()).collect();
    for p in &primed {
        scope.vars.remove(p);
    }
    sys.init = scope.formula(init)?;
    sys.unsafe_states = scope.formula(bad)?;
    for v in &sys.next {
        scope.vars.insert(v.name().to_string(), v.clone());
    }
    scope.free = Free::Parameter;
    scope.bind_free(&[trans], index)?;
    sys.trans = scope.formula(trans)?;
    Ok(sys)
}

/// Parses a problem file.
pub fn parse_problem(text: &str) -> Result<Problem> {
    let forms = read_sexps(text)?;
    let Some(first) = forms.first() else {
        return Err(Error::Parse {
            line: 1,
            col: 1,
            msg: "expected (signature ...)".into(),
        });
    };
    let mut sig = parse_signature(first)?;
    let mut theory = Theory::Empty;
    let mut prec = Precedence::default();
    let mut query = None;
    for f in &forms[1..] {
        let Some((h, rest)) = f.head() else {
            return f.err("expected a top-level form");
        };
        if query.is_some() {
            return f.err("nothing may follow the query");
        }
        match h {
            "theory" => theory = parse_theory(f, &mut sig)?,
            "precedence" => {
                let names = rest
                    .iter()
                    .map(|n| n.expect_atom("a symbol").map(str::to_string))
                    .collect::<Result<Vec<_>>>()?;
                prec = Precedence::new(&names);
            }
            "cover" => query = Some(Query::Cover(parse_cover(f, &sig)?)),
            "system" => query = Some(Query::System(Box::new(parse_system(f, &sig, &theory)?))),
            other => return f.err(format!("unknown form `{other}`")),
        }
    }
    let Some(query) = query else {
        let last = forms.last().unwrap();
        return last.err("expected (cover ...) or (system ...)");
    };
    Ok(Problem {
        sig,
        theory,
        prec,
        query,
    })
}

fn binding(v: &Var) -> String {
    format!("({} {})", v.name(), v.sort().name())
}

fn bindings(vs: &[Var]) -> String {
    vs.iter().map(binding).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sorts: Vec<&str> = self.sig.sorts().iter().map(Sort::name).collect();
        writeln!(f, "(signature")?;
        write!(f, "  (sorts {})", sorts.join(" "))?;
        let funs: Vec<String> = self
            .sig
            .funs()
            .iter()
            .filter(|g| g.kind() == FunKind::Declared && !g.name().starts_with("undef."))
            .map(|g| {
                let args: Vec<&str> = g.args().iter().map(Sort::name).collect();
                format!("({} ({}) {})", g.name(), args.join(" "), g.result().name())
            })
            .collect();
        if !funs.is_empty() {
            write!(f, "\n  (functions {})", funs.join(" "))?;
        }
        let rels: Vec<String> = self
            .sig
            .rels()
            .iter()
            .map(|r| {
                let args: Vec<&str> = r.args().iter().map(Sort::name).collect();
                format!("({} ({}))", r.name(), args.join(" "))
            })
            .collect();
        if !rels.is_empty() {
            write!(f, "\n  (relations {})", rels.join(" "))?;
        }
        writeln!(f, ")")?;
        let p = &self.prec;
        match &self.theory {
            Theory::Empty => {}
            Theory::Undef(_) => writeln!(f, "(theory (undef-axioms))")?,
            Theory::Axioms(_, axioms) => {
                write!(f, "(theory")?;
                for a in axioms {
                    write!(f, "\n  (axiom (forall {} {}))", binding(&a.var), print::formula(&a.body, p))?;
                }
                writeln!(f, ")")?;
            }
        }
        let listed = p.listed();
        if !listed.is_empty() {
            writeln!(f, "(precedence {})", listed.join(" "))?;
        }
        match &self.query {
            Query::Cover(q) => {
                write!(f, "(cover (exists ({}))", bindings(&q.evars))?;
                if !q.params.is_empty() {
                    write!(f, " (params {})", bindings(&q.params))?;
                }
                let lits: Vec<String> = q.body.iter().map(|l| print::literal(l, p)).collect();
                write!(f, "\n  (and {}))", lits.join(" "))
            }
            Query::System(s) => {
                write!(f, "(system\n  (vars {})", bindings(&s.vars))?;
                let locals = s.locals();
                if !locals.is_empty() {
                    write!(f, "\n  (locals {})", bindings(&locals))?;
                }
                write!(f, "\n  (init {})", print::formula(&s.init, p))?;
                write!(f, "\n  (trans {})", print::formula(&s.trans, p))?;
                write!(f, "\n  (unsafe {}))", print::formula(&s.unsafe_states, p))
            }
        }
    }
}
