//! Simply-typed λ-terms over `o` with a divergent constant `bot`:
//! parsing, type checking, η-long β-normalization and interpretation as
//! innocent strategies.

use std::fmt;
use std::rc::Rc;
use std::sync::Arc;

use crate::arena::{parse_type, Arena, SimpleType, TypeParser};
use crate::error::{Error, Result};
use crate::play::{Play, Strategy};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Var(String),
    Lam(String, SimpleType, Box<Term>),
    App(Box<Term>, Box<Term>),
    Bot,
}

impl Term {
    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut t = self;
        while let Term::App(f, a) = t {
            args.push(a.as_ref());
            t = f;
        }
        args.reverse();
        (t, args)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => write!(f, "{x}"),
            Term::Bot => write!(f, "bot"),
            Term::Lam(x, t, b) => write!(f, "\\{x}:{t}. {b}"),
            Term::App(..) => {
                let (h, args) = self.spine();
                match h {
                    Term::Lam(..) => write!(f, "({h})")?,
                    _ => write!(f, "{h}")?,
                }
                for a in args {
                    match a {
                        Term::Var(_) | Term::Bot => write!(f, " {a}")?,
                        _ => write!(f, " ({a})")?,
                    }
                }
                Ok(())
            }
        }
    }
}

struct TermParser<'a> {
    src: &'a str,
    pos: usize,
}

impl TermParser<'_> {
    fn ws(&mut self) {
        let b = self.src.as_bytes();
        while self.pos < b.len() && b[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Syntax { offset: self.pos, message: msg.to_string() }
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn ident(&mut self) -> Option<String> {
        let b = self.src.as_bytes();
        let start = self.pos;
        if start < b.len() && (b[start].is_ascii_alphabetic() || b[start] == b'_') {
            let mut end = start + 1;
            while end < b.len() && (b[end].is_ascii_alphanumeric() || b[end] == b'_' || b[end] == b'\'') {
                end += 1;
            }
            self.pos = end;
            Some(self.src[start..end].to_string())
        } else {
            None
        }
    }

    fn term(&mut self) -> Result<Term> {
        self.ws();
        if self.rest().starts_with('\\') || self.rest().starts_with('λ') {
            self.pos += if self.rest().starts_with('\\') { 1 } else { 'λ'.len_utf8() };
            self.ws();
            let x = self.ident().ok_or_else(|| self.err("expected binder name"))?;
            self.ws();
            if !self.rest().starts_with(':') {
                return Err(self.err("expected ':'"));
            }
            self.pos += 1;
            let mut tp = TypeParser { src: self.src.as_bytes(), pos: self.pos };
            let ty = tp.ty()?;
            self.pos = tp.pos;
            self.ws();
            if !self.rest().starts_with('.') {
                return Err(self.err("expected '.'"));
            }
            self.pos += 1;
            let body = self.term()?;
            return Ok(Term::Lam(x, ty, Box::new(body)));
        }
        let mut t = self.atom()?.ok_or_else(|| self.err("expected term"))?;
        loop {
            self.ws();
            if self.rest().starts_with('\\') || self.rest().starts_with('λ') {
                let lam = self.term()?;
                return Ok(Term::app(t, lam));
            }
            match self.atom()? {
                Some(a) => t = Term::app(t, a),
                None => return Ok(t),
            }
        }
    }

    fn atom(&mut self) -> Result<Option<Term>> {
        self.ws();
        if self.rest().starts_with('(') {
            self.pos += 1;
            let t = self.term()?;
            self.ws();
            if !self.rest().starts_with(')') {
                return Err(self.err("expected ')'"));
            }
            self.pos += 1;
            return Ok(Some(t));
        }
        let save = self.pos;
        match self.ident() {
            Some(x) if x == "bot" => Ok(Some(Term::Bot)),
            Some(x) => Ok(Some(Term::Var(x))),
            None => {
                self.pos = save;
                Ok(None)
            }
        }
    }
}

pub fn parse_term(text: &str) -> Result<Term> {
    let mut p = TermParser { src: text, pos: 0 };
    let t = p.term()?;
    p.ws();
    if p.pos != text.len() {
        return Err(p.err("trailing input"));
    }
    Ok(t)
}

pub type Context = Vec<(String, SimpleType)>;

fn lookup<'a>(ctx: &'a Context, x: &str) -> Result<&'a SimpleType> {
    ctx.iter().rev().find(|(y, _)| y == x).map(|(_, t)| t).ok_or_else(|| Error::Type(format!("unbound variable {x}")))
}

/// The type of `t` in `ctx`. `bot` needs an expected type, which it gets in
/// argument position or under an annotated binder.
pub fn typecheck(t: &Term, ctx: &Context) -> Result<SimpleType> {
    let mut ctx = ctx.clone();
    synth(t, &mut ctx)
}

fn synth(t: &Term, ctx: &mut Context) -> Result<SimpleType> {
    match t {
        Term::Var(x) => lookup(ctx, x).cloned(),
        Term::Bot => Err(Error::Type("cannot infer the type of bot here".into())),
        Term::Lam(x, a, b) => {
            ctx.push((x.clone(), a.clone()));
            let r = synth(b, ctx);
            ctx.pop();
            Ok(SimpleType::arrow(a.clone(), r?))
        }
        Term::App(f, a) => match synth(f, ctx)? {
            SimpleType::Arrow(dom, cod) => {
                check(a, &dom, ctx)?;
                Ok(*cod)
            }
            SimpleType::O => Err(Error::Type(format!("{f} is applied but has type o"))),
        },
    }
}

fn check(t: &Term, ty: &SimpleType, ctx: &mut Context) -> Result<()> {
    match (t, ty) {
        (Term::Bot, _) => Ok(()),
        (Term::Lam(x, a, b), SimpleType::Arrow(dom, cod)) => {
            if a != dom.as_ref() {
                return Err(Error::Type(format!("binder {x} annotated {a}, expected {dom}")));
            }
            ctx.push((x.clone(), a.clone()));
            let r = check(b, cod, ctx);
            ctx.pop();
            r
        }
        _ => {
            let (h, args) = t.spine();
            if let Term::Bot = h {
                for a in args {
                    synth(a, ctx)?;
                }
                return Ok(());
            }
            let got = synth(t, ctx)?;
            if &got == ty {
                Ok(())
            } else {
                Err(Error::Type(format!("{t} has type {got}, expected {ty}")))
            }
        }
    }
}

#[derive(Debug)]
enum DTerm {
    Var(usize),
    Lam(String, Rc<DTerm>),
    App(Rc<DTerm>, Rc<DTerm>),
    Bot,
}

fn to_debruijn(t: &Term, names: &mut Vec<String>) -> Result<Rc<DTerm>> {
    Ok(Rc::new(match t {
        Term::Var(x) => {
            let i = names.iter().rev().position(|y| y == x).ok_or_else(|| Error::Type(format!("unbound variable {x}")))?;
            DTerm::Var(i)
        }
        Term::Bot => DTerm::Bot,
        Term::Lam(x, _, b) => {
            names.push(x.clone());
            let body = to_debruijn(b, names);
            names.pop();
            DTerm::Lam(x.clone(), body?)
        }
        Term::App(f, a) => DTerm::App(to_debruijn(f, names)?, to_debruijn(a, names)?),
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Head {
    Var(usize),
    Bot,
}

#[derive(Clone)]
enum Value {
    Closure(Rc<Vec<Value>>, String, Rc<DTerm>),
    Neutral(Head, Vec<Value>),
}

fn eval(env: &Rc<Vec<Value>>, t: &DTerm) -> Value {
    match t {
        DTerm::Var(i) => env[env.len() - 1 - i].clone(),
        DTerm::Bot => Value::Neutral(Head::Bot, vec![]),
        DTerm::Lam(x, b) => Value::Closure(env.clone(), x.clone(), b.clone()),
        DTerm::App(f, a) => apply(eval(env, f), eval(env, a)),
    }
}

fn apply(f: Value, a: Value) -> Value {
    match f {
        Value::Closure(env, _, body) => {
            let mut e = (*env).clone();
            e.push(a);
            eval(&Rc::new(e), &body)
        }
        Value::Neutral(Head::Bot, _) => Value::Neutral(Head::Bot, vec![]),
        Value::Neutral(h, mut args) => {
            args.push(a);
            Value::Neutral(h, args)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NfHead {
    /// A variable, by de Bruijn level counted from the outermost binder.
    Var(usize),
    Bot,
}

/// An η-long β-normal form: binders, then a head applied to normal arguments.
#[derive(Clone, Debug)]
pub struct Nf {
    pub binders: Vec<(String, SimpleType)>,
    pub head: NfHead,
    pub args: Vec<Nf>,
}

impl PartialEq for Nf {
    fn eq(&self, other: &Nf) -> bool {
        self.binders.len() == other.binders.len()
            && self.binders.iter().zip(&other.binders).all(|(a, b)| a.1 == b.1)
            && self.head == other.head
            && self.args == other.args
    }
}

impl Eq for Nf {}

impl Nf {
    pub fn is_bot_free(&self) -> bool {
        self.head != NfHead::Bot && self.args.iter().all(|a| a.is_bot_free())
    }

    /// Number of head occurrences.
    pub fn size(&self) -> usize {
        1 + self.args.iter().map(|a| a.size()).sum::<usize>()
    }

    /// Back to a named term, renaming binders apart.
    pub fn to_term(&self, free: &[String]) -> Term {
        let mut names: Vec<String> = free.to_vec();
        self.named(&mut names)
    }

    fn named(&self, names: &mut Vec<String>) -> Term {
        let start = names.len();
        for (x, _) in &self.binders {
            let mut cand = x.clone();
            let mut k = 1;
            while names.contains(&cand) {
                cand = format!("{x}{k}");
                k += 1;
            }
            names.push(cand);
        }
        let mut body = match self.head {
            NfHead::Bot => Term::Bot,
            NfHead::Var(l) => Term::Var(names[l].clone()),
        };
        for a in &self.args {
            body = Term::app(body, a.named(names));
        }
        for i in (0..self.binders.len()).rev() {
            body = Term::Lam(names[start + i].clone(), self.binders[i].1.clone(), Box::new(body));
        }
        names.truncate(start);
        body
    }
}

const FRESH: [&str; 6] = ["x", "y", "z", "u", "v", "w"];

fn readback(v: Value, ty: &SimpleType, env_types: &mut Vec<SimpleType>) -> Nf {
    let args: Vec<SimpleType> = ty.args().into_iter().cloned().collect();
    let base = env_types.len();
    let mut v = v;
    let mut binders = Vec::new();
    for (i, a) in args.iter().enumerate() {
        let name = match &v {
            Value::Closure(_, x, _) => x.clone(),
            _ => FRESH[(base + i) % FRESH.len()].to_string(),
        };
        binders.push((name, a.clone()));
        env_types.push(a.clone());
        v = apply(v, Value::Neutral(Head::Var(base + i), vec![]));
    }
    let nf = match v {
        Value::Neutral(Head::Bot, _) => Nf { binders, head: NfHead::Bot, args: vec![] },
        Value::Neutral(Head::Var(l), vals) => {
            let hty = env_types[l].clone();
            let arg_tys: Vec<SimpleType> = hty.args().into_iter().cloned().collect();
            let args = vals.into_iter().zip(&arg_tys).map(|(a, t)| readback(a, t, env_types)).collect();
            Nf { binders, head: NfHead::Var(l), args }
        }
        Value::Closure(..) => unreachable!("well-typed values at o are neutral"),
    };
    env_types.truncate(base);
    nf
}

/// η-long β-normal form of a term in a context; returns it with its type.
pub fn normalize(t: &Term, ctx: &Context) -> Result<(Nf, SimpleType)> {
    let ty = typecheck(t, ctx)?;
    let mut names: Vec<String> = ctx.iter().map(|(x, _)| x.clone()).collect();
    let d = to_debruijn(t, &mut names)?;
    let env: Vec<Value> = (0..ctx.len()).map(|l| Value::Neutral(Head::Var(l), vec![])).collect();
    let v = eval(&Rc::new(env), &d);
    let mut env_types: Vec<SimpleType> = ctx.iter().map(|(_, t)| t.clone()).collect();
    Ok((readback(v, &ty, &mut env_types), ty))
}

pub fn eta_long_beta_normalize(t: &Term, ctx: &Context) -> Result<Term> {
    let (nf, _) = normalize(t, ctx)?;
    let free: Vec<String> = ctx.iter().map(|(x, _)| x.clone()).collect();
    Ok(nf.to_term(&free))
}

/// The innocent strategy of a closed normal form of type `ty`.
pub fn interpret(nf: &Nf, ty: &SimpleType) -> Result<Strategy> {
    let arena = Arc::new(ty.arena());
    let mut pviews = Vec::new();
    let mut env: Vec<(usize, usize)> = Vec::new();
    let root = Play::from_pairs(&[(0, None)]);
    visit(&arena, nf, &root, &mut env, &mut pviews)?;
    Strategy::from_pviews(arena, &pviews)
}

fn visit(arena: &Arena, nf: &Nf, odd: &Play, env: &mut Vec<(usize, usize)>, out: &mut Vec<Play>) -> Result<()> {
    let o = odd.len() - 1;
    let base = env.len();
    if nf.binders.len() != arena.children(odd.moves[o]).len() {
        return Err(Error::pre("term is not η-long"));
    }
    for i in 0..nf.binders.len() {
        env.push((o, i));
    }
    let r = match nf.head {
        NfHead::Bot => Ok(()),
        NfHead::Var(l) => {
            let (j, i) = *env.get(l).ok_or_else(|| Error::pre("term is not closed"))?;
            let m = arena.children(odd.moves[j])[i];
            let even = odd.pushed(m, Some(j));
            let kids = arena.children(m);
            if kids.len() != nf.args.len() {
                return Err(Error::pre("head variable is not fully applied"));
            }
            if kids.is_empty() {
                out.push(even.clone());
            }
            let mut r = Ok(());
            for (k, a) in nf.args.iter().enumerate() {
                let next = even.pushed(kids[k], Some(even.len() - 1));
                out.push(even.clone());
                r = r.and(visit(arena, a, &next, env, out));
            }
            r
        }
    };
    env.truncate(base);
    r
}

/// Parses, normalizes and interprets a closed term; the type, when given,
/// must match the inferred one.
pub fn interpret_text(text: &str, ty: Option<&str>) -> Result<(Nf, SimpleType, Strategy)> {
    let t = parse_term(text)?;
    let (nf, inferred) = normalize(&t, &vec![])?;
    if let Some(ty) = ty {
        let want = parse_type(ty)?;
        if want != inferred {
            return Err(Error::Type(format!("term has type {inferred}, expected {want}")));
        }
    }
    let s = interpret(&nf, &inferred)?;
    Ok((nf, inferred, s))
}

/// All closed η-long normal forms of a type with at most `max_size` head
/// occurrences, `bot` included when `with_bot`.
pub fn enumerate_normal_forms(ty: &SimpleType, max_size: usize, with_bot: bool) -> Vec<Nf> {
    fn go(ty: &SimpleType, env: &mut Vec<SimpleType>, budget: usize, with_bot: bool) -> Vec<Nf> {
        if budget == 0 {
            return vec![];
        }
        let args: Vec<SimpleType> = ty.args().into_iter().cloned().collect();
        let base = env.len();
        let binders: Vec<(String, SimpleType)> =
            args.iter().enumerate().map(|(i, a)| (FRESH[(base + i) % FRESH.len()].to_string(), a.clone())).collect();
        env.extend(args.iter().cloned());
        let mut out = Vec::new();
        if with_bot {
            out.push(Nf { binders: binders.clone(), head: NfHead::Bot, args: vec![] });
        }
        for l in 0..env.len() {
            let hargs: Vec<SimpleType> = env[l].args().into_iter().cloned().collect();
            let mut acc: Vec<(Vec<Nf>, usize)> = vec![(vec![], 1)];
            for at in &hargs {
                let mut next = Vec::new();
                for (done, used) in &acc {
                    for a in go(at, env, budget - used, with_bot) {
                        let s = a.size();
                        let mut d = done.clone();
                        d.push(a);
                        next.push((d, used + s));
                    }
                }
                acc = next;
            }
            for (a, _) in acc {
                out.push(Nf { binders: binders.clone(), head: NfHead::Var(l), args: a });
            }
        }
        env.truncate(base);
        out
    }
    go(ty, &mut Vec::new(), max_size, with_bot)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ty(s: &str) -> SimpleType {
        parse_type(s).unwrap()
    }

    #[test]
    fn typing_examples() {
        let kx = parse_term("\\f:(o->o)->o. f (\\x:o. f (\\y:o. x))").unwrap();
        assert_eq!(typecheck(&kx, &vec![]).unwrap(), ty("((o->o)->o)->o"));
        assert_eq!(typecheck(&parse_term("\\x:o. x").unwrap(), &vec![]).unwrap(), ty("o->o"));
        let f7 = parse_term("\\f:o->o->o.\\x:o. f (f bot x) (f bot bot)").unwrap();
        assert_eq!(typecheck(&f7, &vec![]).unwrap(), ty("(o->o->o)->o->o"));
        assert!(typecheck(&parse_term("\\x:o. x x").unwrap(), &vec![]).is_err());
        assert!(parse_term("\\x:o x").is_err());
    }

    #[test]
    fn normalization() {
        let ctx = vec![("y".to_string(), ty("o"))];
        let t = parse_term("(\\x:o.x) y").unwrap();
        assert_eq!(eta_long_beta_normalize(&t, &ctx).unwrap(), Term::Var("y".into()));
        let t = parse_term("\\f:o->o. f").unwrap();
        let n = eta_long_beta_normalize(&t, &vec![]).unwrap();
        let want = parse_term("\\f:o->o.\\x:o. f x").unwrap();
        assert_eq!(normalize(&n, &vec![]).unwrap().0, normalize(&want, &vec![]).unwrap().0);
        assert_eq!(n.to_string(), "\\f:o -> o. \\y:o. f y");
        let kx = parse_term("\\f:(o->o)->o. f (\\x:o. f (\\y:o. x))").unwrap();
        assert_eq!(eta_long_beta_normalize(&kx, &vec![]).unwrap(), kx);
        let b = parse_term("\\f:o->o. (\\g:o->o. g) f").unwrap();
        assert_eq!(eta_long_beta_normalize(&b, &vec![]).unwrap().to_string(), "\\f:o -> o. \\y:o. f y");
        let bot = parse_term("\\g:(o->o)->o. g (\\x:o. bot (g (\\y:o. y)) x)").unwrap();
        assert_eq!(eta_long_beta_normalize(&bot, &vec![]).unwrap().to_string(), "\\g:(o -> o) -> o. g (\\x:o. bot)");
        assert!(typecheck(&parse_term("\\x:o. bot x").unwrap(), &vec![]).is_err());
    }

    #[test]
    fn interpretation() {
        let (_, _, s) = interpret_text("\\x:o. x", Some("o -> o")).unwrap();
        assert_eq!(s.pviews(), vec![Play::from_pairs(&[(0, None), (1, Some(0))])]);
        let (_, _, kx) = interpret_text("\\f:(o->o)->o. f (\\x:o. f (\\y:o. x))", None).unwrap();
        assert_eq!(
            kx.maximal_pviews(),
            vec![Play::from_pairs(&[(0, None), (1, Some(0)), (2, Some(1)), (1, Some(0)), (2, Some(3)), (3, Some(2))])]
        );
        assert!(kx.is_total());
        let (nf, _, f7) = interpret_text("\\f:o->o->o.\\x:o. f (f bot x) (f bot bot)", None).unwrap();
        assert!(!nf.is_bot_free());
        assert!(!f7.is_total());
        assert_eq!(f7.maximal_pviews().len(), 2);
    }

    #[test]
    fn interpretation_is_injective_on_small_terms() {
        for t in ["(o -> o) -> o -> o", "(o -> o -> o) -> o -> o", "((o -> o) -> o) -> o"] {
            let t = ty(t);
            let nfs = enumerate_normal_forms(&t, 4, true);
            let strategies: Vec<Strategy> = nfs.iter().map(|n| interpret(n, &t).unwrap()).collect();
            for i in 0..nfs.len() {
                assert_eq!(strategies[i].is_total(), nfs[i].is_bot_free());
                for j in 0..i {
                    assert_ne!(strategies[i], strategies[j], "{} vs {}", nfs[i].to_term(&[]), nfs[j].to_term(&[]));
                }
            }
        }
    }
}
