//! Immutable canonical expression trees over exact rationals.
//!
//! Every constructor returns canonical form: sums and products are flat,
//! sorted and merged, constants are folded, and unit exponents never appear.
//! Distribution of products over sums is left to [`Expr::expand`].

mod context;
mod diff;
mod equality;
mod eval;
mod expand;
mod func;
mod jet;
mod parse;
mod print;
mod subst;

use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use context::{Context, SymbolKind};
pub use diff::{DiffError, DiffRules, Total};
pub use equality::{probably_equal, Equality, ProbeReport};
pub use eval::{sine_integral, EvalError, Env, NumericFn};
pub use subst::SubstError;
pub use func::{Builtin, Func};
pub use jet::{cmp_var, var_rank, JetVar, MultiIndex, Name};
pub use parse::{parse, ParseError};

/// Exact rational scalar.
pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

#[derive(Clone, Debug)]
pub enum Kind {
    Num(Q),
    Sym(Name),
    Jet(JetVar),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Expr, i64),
    Apply(Func, Vec<Expr>),
    /// Formal antiderivative `Int[e, var]`, the right inverse of `D_var`.
    Int(Expr, Name),
}

const F_EXPANDED: u8 = 1;
const F_INT: u8 = 2;
const F_BUILTIN: u8 = 4;
const F_NAMED: u8 = 8;

struct Node {
    kind: Kind,
    hash: u64,
    flags: u8,
}

/// Shared handle to a canonical expression node.
#[derive(Clone)]
pub struct Expr(Arc<Node>);

impl Expr {
    fn raw(kind: Kind) -> Expr {
        let mut h = DefaultHasher::new();
        let mut flags = F_EXPANDED;
        match &kind {
            Kind::Num(c) => {
                0u8.hash(&mut h);
                c.hash(&mut h);
            }
            Kind::Sym(s) => {
                1u8.hash(&mut h);
                s.hash(&mut h);
            }
            Kind::Jet(j) => {
                2u8.hash(&mut h);
                j.hash(&mut h);
            }
            Kind::Add(ts) => {
                3u8.hash(&mut h);
                for t in ts {
                    t.0.hash.hash(&mut h);
                    flags &= t.flags() | !F_EXPANDED;
                    flags |= t.flags() & !F_EXPANDED;
                }
            }
            Kind::Mul(fs) => {
                4u8.hash(&mut h);
                for f in fs {
                    f.0.hash.hash(&mut h);
                    flags &= f.flags() | !F_EXPANDED;
                    flags |= f.flags() & !F_EXPANDED;
                    if matches!(f.kind(), Kind::Add(_)) {
                        flags &= !F_EXPANDED;
                    }
                }
            }
            Kind::Pow(b, n) => {
                5u8.hash(&mut h);
                b.0.hash.hash(&mut h);
                n.hash(&mut h);
                flags = b.flags();
                if *n > 0 && matches!(b.kind(), Kind::Add(_)) {
                    flags &= !F_EXPANDED;
                }
            }
            Kind::Apply(f, args) => {
                6u8.hash(&mut h);
                f.hash(&mut h);
                for a in args {
                    a.0.hash.hash(&mut h);
                    flags &= a.flags() | !F_EXPANDED;
                    flags |= a.flags() & !F_EXPANDED;
                }
                flags |= if f.is_named() { F_NAMED } else { F_BUILTIN };
            }
            Kind::Int(e, v) => {
                7u8.hash(&mut h);
                e.0.hash.hash(&mut h);
                v.hash(&mut h);
                flags = e.flags() | F_INT;
            }
        }
        Expr(Arc::new(Node {
            kind,
            hash: h.finish(),
            flags,
        }))
    }

    fn flags(&self) -> u8 {
        self.0.flags
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    pub fn ptr_eq(&self, other: &Expr) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// True when no product distributes over a sum anywhere in the tree.
    pub fn is_expanded(&self) -> bool {
        self.flags() & F_EXPANDED != 0
    }

    pub fn has_int(&self) -> bool {
        self.flags() & F_INT != 0
    }

    pub fn has_builtin(&self) -> bool {
        self.flags() & F_BUILTIN != 0
    }

    pub fn has_named_func(&self) -> bool {
        self.flags() & F_NAMED != 0
    }

    // ----- atoms -----

    pub fn num(c: Q) -> Expr {
        Expr::raw(Kind::Num(c))
    }

    pub fn int(n: i64) -> Expr {
        Expr::num(qi(n))
    }

    pub fn frac(n: i64, d: i64) -> Expr {
        Expr::num(q(n, d))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn sym(name: impl Into<Name>) -> Expr {
        Expr::raw(Kind::Sym(name.into()))
    }

    pub fn jet(j: JetVar) -> Expr {
        Expr::raw(Kind::Jet(j))
    }

    /// Jet from a dependent name and a list of differentiation variables.
    pub fn jet_of<S: AsRef<str>>(dep: &str, vars: &[S]) -> Expr {
        Expr::jet(JetVar::of(dep, vars))
    }

    pub fn as_num(&self) -> Option<&Q> {
        match self.kind() {
            Kind::Num(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_sym(&self) -> Option<&Name> {
        match self.kind() {
            Kind::Sym(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_jet(&self) -> Option<&JetVar> {
        match self.kind() {
            Kind::Jet(j) => Some(j),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_num().is_some_and(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.as_num().is_some_and(|c| c.is_one())
    }

    pub fn terms(&self) -> &[Expr] {
        match self.kind() {
            Kind::Add(ts) => ts,
            _ => std::slice::from_ref(self),
        }
    }

    pub fn factors(&self) -> &[Expr] {
        match self.kind() {
            Kind::Mul(fs) => fs,
            _ => std::slice::from_ref(self),
        }
    }

    /// `(base, exponent)` with exponent 1 for non-powers.
    pub fn base_exp(&self) -> (&Expr, i64) {
        match self.kind() {
            Kind::Pow(b, n) => (b, *n),
            _ => (self, 1),
        }
    }

    /// Splits a term into its rational coefficient and the remaining factors.
    pub fn coeff_slice(&self) -> (Q, &[Expr]) {
        match self.kind() {
            Kind::Num(c) => (c.clone(), &[]),
            Kind::Mul(fs) => match fs[0].kind() {
                Kind::Num(c) => (c.clone(), &fs[1..]),
                _ => (Q::one(), fs),
            },
            _ => (Q::one(), std::slice::from_ref(self)),
        }
    }

    /// `(coefficient, rest)` with `rest` rebuilt as an expression.
    pub fn split_coeff(&self) -> (Q, Expr) {
        match self.kind() {
            Kind::Num(c) => (c.clone(), Expr::one()),
            Kind::Mul(fs) => match fs[0].kind() {
                Kind::Num(c) if fs.len() == 2 => (c.clone(), fs[1].clone()),
                Kind::Num(c) => (c.clone(), Expr::raw(Kind::Mul(fs[1..].to_vec()))),
                _ => (Q::one(), self.clone()),
            },
            _ => (Q::one(), self.clone()),
        }
    }

    // ----- compound constructors -----

    pub fn add<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        let mut constant = Q::zero();
        let mut acc: HashMap<Expr, Q> = HashMap::new();
        let mut order: Vec<Expr> = Vec::new();
        let mut push = |t: &Expr, constant: &mut Q| {
            let (c, rest) = t.split_coeff();
            if rest.is_one() {
                *constant += c;
                return;
            }
            match acc.get_mut(&rest) {
                Some(v) => *v += c,
                None => {
                    order.push(rest.clone());
                    acc.insert(rest, c);
                }
            }
        };
        for t in terms {
            match t.kind() {
                Kind::Add(ts) => {
                    for s in ts {
                        push(s, &mut constant);
                    }
                }
                Kind::Num(c) => constant += c,
                _ => push(&t, &mut constant),
            }
        }
        let mut out: Vec<Expr> = Vec::with_capacity(order.len() + 1);
        if !constant.is_zero() {
            out.push(Expr::num(constant));
        }
        for rest in order {
            let c = acc.remove(&rest).unwrap();
            if c.is_zero() {
                continue;
            }
            out.push(Expr::scaled_term(c, rest));
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => {
                out.sort_by(cmp_term);
                Expr::raw(Kind::Add(out))
            }
        }
    }

    /// `c * rest` for an already canonical coefficient-free `rest`.
    fn scaled_term(c: Q, rest: Expr) -> Expr {
        if c.is_one() {
            return rest;
        }
        let mut fs = Vec::with_capacity(rest.factors().len() + 1);
        fs.push(Expr::num(c));
        fs.extend(rest.factors().iter().cloned());
        Expr::raw(Kind::Mul(fs))
    }

    pub fn mul<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
        let mut coeff = Q::one();
        let mut bases: Vec<(Expr, i64)> = Vec::new();
        for f in factors {
            for g in f.factors() {
                match g.kind() {
                    Kind::Num(c) => coeff *= c,
                    _ => {
                        let (b, n) = g.base_exp();
                        bases.push((b.clone(), n));
                    }
                }
            }
        }
        if coeff.is_zero() {
            return Expr::zero();
        }
        let mut merged = merge_bases(bases);
        // sqrt(X)^n with n outside {1} feeds X back in, which may merge again
        for _ in 0..8 {
            let mut changed = false;
            let mut next = Vec::with_capacity(merged.len());
            for (b, n) in merged {
                if let Some(x) = sqrt_arg(&b) {
                    if n != 1 {
                        let whole = n.div_euclid(2);
                        let rem = n.rem_euclid(2);
                        changed = true;
                        if whole != 0 {
                            match x.as_num() {
                                Some(c) => coeff *= rat_pow(c, whole),
                                None => next.push((x.clone(), whole)),
                            }
                        }
                        if rem != 0 {
                            next.push((b, rem));
                        }
                        continue;
                    }
                }
                next.push((b, n));
            }
            merged = if changed { merge_bases(next) } else { next };
            if !changed {
                break;
            }
        }
        let mut out: Vec<Expr> = Vec::with_capacity(merged.len());
        for (b, n) in merged {
            if n == 0 {
                continue;
            }
            let f = if n == 1 { b } else { Expr::raw(Kind::Pow(b, n)) };
            out.push(f);
        }
        if coeff.is_zero() {
            return Expr::zero();
        }
        if out.is_empty() {
            return Expr::num(coeff);
        }
        if out.len() == 1 {
            let only = out.pop().unwrap();
            if coeff.is_one() {
                return only;
            }
            if let Kind::Add(ts) = only.kind() {
                return Expr::add(ts.iter().map(|t| t.scale(&coeff)));
            }
            return Expr::raw(Kind::Mul(vec![Expr::num(coeff), only]));
        }
        out.sort_by(cmp_expr);
        if !coeff.is_one() {
            out.insert(0, Expr::num(coeff));
        }
        Expr::raw(Kind::Mul(out))
    }

    /// Multiplies by a rational, distributing over sums.
    pub fn scale(&self, c: &Q) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        if c.is_one() {
            return self.clone();
        }
        match self.kind() {
            Kind::Num(a) => Expr::num(a * c),
            Kind::Add(ts) => Expr::add(ts.iter().map(|t| t.scale(c))),
            _ => {
                let (a, rest) = self.split_coeff();
                let k = a * c;
                if k.is_zero() {
                    Expr::zero()
                } else {
                    Expr::scaled_term(k, rest)
                }
            }
        }
    }

    pub fn pow(&self, n: i64) -> Expr {
        if n == 0 {
            return Expr::one();
        }
        if n == 1 {
            return self.clone();
        }
        match self.kind() {
            Kind::Num(c) => {
                if c.is_zero() {
                    if n > 0 {
                        Expr::zero()
                    } else {
                        Expr::raw(Kind::Pow(self.clone(), n))
                    }
                } else {
                    Expr::num(rat_pow(c, n))
                }
            }
            Kind::Mul(fs) => Expr::mul(fs.iter().map(|f| f.pow(n))),
            Kind::Pow(b, m) => b.pow(m * n),
            _ => {
                if sqrt_arg(self).is_some() {
                    Expr::mul([Expr::raw(Kind::Pow(self.clone(), n))])
                } else {
                    Expr::raw(Kind::Pow(self.clone(), n))
                }
            }
        }
    }

    pub fn recip(&self) -> Expr {
        self.pow(-1)
    }

    pub fn apply(f: Func, args: Vec<Expr>) -> Expr {
        if let Func::Builtin(b) = &f {
            if let Some(v) = fold_builtin(*b, &args) {
                return v;
            }
        }
        Expr::raw(Kind::Apply(f, args))
    }

    pub fn call(b: Builtin, arg: Expr) -> Expr {
        Expr::apply(Func::Builtin(b), vec![arg])
    }

    pub fn sech(arg: Expr) -> Expr {
        Expr::call(Builtin::Cosh, arg).recip()
    }

    pub fn sqrt(arg: Expr) -> Expr {
        Expr::call(Builtin::Sqrt, arg)
    }

    /// Formal antiderivative in `var`, linear, collapsing `Int[f_{Jx}, x]` to `f_J`.
    pub fn integral(e: &Expr, var: &Name) -> Expr {
        match e.kind() {
            Kind::Num(c) if c.is_zero() => Expr::zero(),
            Kind::Add(ts) => Expr::add(ts.iter().map(|t| Expr::integral(t, var))),
            Kind::Jet(j) if j.index.count(var) > 0 => Expr::jet(JetVar {
                dep: j.dep.clone(),
                index: j.index.without(var).unwrap(),
            }),
            Kind::Mul(_) => {
                let (c, rest) = e.split_coeff();
                if c.is_one() {
                    Expr::raw(Kind::Int(e.clone(), var.clone()))
                } else {
                    Expr::integral(&rest, var).scale(&c)
                }
            }
            _ => Expr::raw(Kind::Int(e.clone(), var.clone())),
        }
    }

    // ----- queries -----

    /// Visits every node in pre-order.
    pub fn walk(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self.kind() {
            Kind::Add(cs) | Kind::Mul(cs) | Kind::Apply(_, cs) => {
                for c in cs {
                    c.walk(f);
                }
            }
            Kind::Pow(b, _) => b.walk(f),
            Kind::Int(e, _) => e.walk(f),
            _ => {}
        }
    }

    pub fn symbols(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| {
            if let Kind::Sym(s) = e.kind() {
                out.insert(s.clone());
            }
        });
        out
    }

    pub fn jets(&self) -> BTreeSet<JetVar> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| {
            if let Kind::Jet(j) = e.kind() {
                out.insert(j.clone());
            }
        });
        out
    }

    pub fn contains_sym(&self, name: &str) -> bool {
        let mut found = false;
        self.walk(&mut |e| {
            if let Kind::Sym(s) = e.kind() {
                found |= &**s == name;
            }
        });
        found
    }

    /// True if `e` depends on `var` either as a symbol or through a jet.
    pub fn depends_on(&self, var: &str) -> bool {
        let mut found = false;
        self.walk(&mut |e| match e.kind() {
            Kind::Sym(s) => found |= &**s == var,
            Kind::Jet(_) => found = true,
            Kind::Int(_, v) => found |= &**v == var,
            _ => {}
        });
        found
    }

    /// Named function applications occurring anywhere in the tree.
    pub fn named_calls(&self) -> Vec<Expr> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            if let Kind::Apply(Func::Named { .. }, _) = e.kind() {
                if !out.contains(e) {
                    out.push(e.clone());
                }
            }
        });
        out
    }

    /// Number of nodes, counting shared subtrees repeatedly.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }

    /// Rebuilds the tree bottom-up, replacing leaves where `f` returns a value.
    pub fn map_leaves(&self, f: &mut impl FnMut(&Expr) -> Option<Expr>) -> Expr {
        match self.kind() {
            Kind::Num(_) | Kind::Sym(_) | Kind::Jet(_) => f(self).unwrap_or_else(|| self.clone()),
            Kind::Add(ts) => Expr::add(ts.iter().map(|t| t.map_leaves(f)).collect::<Vec<_>>()),
            Kind::Mul(fs) => Expr::mul(fs.iter().map(|t| t.map_leaves(f)).collect::<Vec<_>>()),
            Kind::Pow(b, n) => b.map_leaves(f).pow(*n),
            Kind::Apply(h, args) => {
                Expr::apply(h.clone(), args.iter().map(|a| a.map_leaves(f)).collect())
            }
            Kind::Int(e, v) => Expr::integral(&e.map_leaves(f), v),
        }
    }
}

fn merge_bases(mut bases: Vec<(Expr, i64)>) -> Vec<(Expr, i64)> {
    bases.sort_by(|a, b| cmp_expr(&a.0, &b.0));
    let mut out: Vec<(Expr, i64)> = Vec::with_capacity(bases.len());
    for (b, n) in bases {
        match out.last_mut() {
            Some((lb, ln)) if *lb == b => *ln += n,
            _ => out.push((b, n)),
        }
    }
    out.retain(|(_, n)| *n != 0);
    out
}

fn sqrt_arg(e: &Expr) -> Option<&Expr> {
    match e.kind() {
        Kind::Apply(Func::Builtin(Builtin::Sqrt), args) => Some(&args[0]),
        _ => None,
    }
}

pub(crate) fn rat_pow(c: &Q, n: i64) -> Q {
    let e = n.unsigned_abs() as u32;
    let num = c.numer().pow(e);
    let den = c.denom().pow(e);
    if n >= 0 {
        Q::new(num, den)
    } else {
        Q::new(den, num)
    }
}

fn rat_sqrt(c: &Q) -> Option<Q> {
    if c.is_negative() {
        return None;
    }
    let n = c.numer().sqrt();
    let d = c.denom().sqrt();
    (&n * &n == *c.numer() && &d * &d == *c.denom()).then(|| Q::new(n, d))
}

fn fold_builtin(b: Builtin, args: &[Expr]) -> Option<Expr> {
    let a = &args[0];
    let c = a.as_num();
    let zero = c.is_some_and(|c| c.is_zero());
    match b {
        Builtin::Sin | Builtin::Sinh | Builtin::Tanh | Builtin::Arctan | Builtin::Arctanh
        | Builtin::Si
            if zero =>
        {
            Some(Expr::zero())
        }
        Builtin::Cos | Builtin::Cosh | Builtin::Exp if zero => Some(Expr::one()),
        Builtin::Ln if c.is_some_and(|c| c.is_one()) => Some(Expr::zero()),
        Builtin::Sqrt => {
            let c = c?;
            rat_sqrt(c).map(Expr::num)
        }
        Builtin::Abs => c.map(|c| Expr::num(c.abs())),
        _ => None,
    }
}

// ----- ordering -----

fn kind_rank(e: &Expr) -> u8 {
    match e.kind() {
        Kind::Num(_) => 0,
        Kind::Sym(_) => 1,
        Kind::Jet(_) => 2,
        Kind::Apply(..) => 3,
        Kind::Int(..) => 4,
        Kind::Mul(_) => 5,
        Kind::Add(_) => 6,
        Kind::Pow(b, _) => kind_rank(b),
    }
}

/// Global total order on canonical expressions.
///
/// Powers sort next to their base: `x < x^2 < y`.
pub fn cmp_expr(a: &Expr, b: &Expr) -> Ordering {
    if a.ptr_eq(b) {
        return Ordering::Equal;
    }
    let (ba, ea) = a.base_exp();
    let (bb, eb) = b.base_exp();
    cmp_base(ba, bb).then(ea.cmp(&eb))
}

fn cmp_base(a: &Expr, b: &Expr) -> Ordering {
    if a.ptr_eq(b) {
        return Ordering::Equal;
    }
    match kind_rank(a).cmp(&kind_rank(b)) {
        Ordering::Equal => {}
        o => return o,
    }
    match (a.kind(), b.kind()) {
        (Kind::Num(x), Kind::Num(y)) => x.cmp(y),
        (Kind::Sym(x), Kind::Sym(y)) => cmp_var(x, y),
        (Kind::Jet(x), Kind::Jet(y)) => cmp_var(&x.dep, &y.dep).then_with(|| x.index.cmp(&y.index)),
        (Kind::Apply(f, xs), Kind::Apply(g, ys)) => f.cmp(g).then_with(|| cmp_seq(xs, ys, cmp_expr)),
        (Kind::Int(x, v), Kind::Int(y, w)) => cmp_expr(x, y).then_with(|| cmp_var(v, w)),
        (Kind::Mul(xs), Kind::Mul(ys)) => cmp_seq(xs, ys, cmp_expr),
        (Kind::Add(xs), Kind::Add(ys)) => cmp_seq(xs, ys, cmp_term),
        // a zero base under a negative power
        (Kind::Pow(..), _) | (_, Kind::Pow(..)) => cmp_expr(a, b),
        _ => Ordering::Equal,
    }
}

fn cmp_seq(xs: &[Expr], ys: &[Expr], f: fn(&Expr, &Expr) -> Ordering) -> Ordering {
    for (x, y) in xs.iter().zip(ys) {
        match f(x, y) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    xs.len().cmp(&ys.len())
}

/// Order of summands: by the non-numeric factors, then by coefficient.
pub fn cmp_term(a: &Expr, b: &Expr) -> Ordering {
    if a.ptr_eq(b) {
        return Ordering::Equal;
    }
    let (ca, ra) = a.coeff_slice();
    let (cb, rb) = b.coeff_slice();
    cmp_seq(ra, rb, cmp_expr).then_with(|| ca.cmp(&cb))
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        if self.ptr_eq(other) {
            return true;
        }
        if self.0.hash != other.0.hash {
            return false;
        }
        match (self.kind(), other.kind()) {
            (Kind::Num(a), Kind::Num(b)) => a == b,
            (Kind::Sym(a), Kind::Sym(b)) => a == b,
            (Kind::Jet(a), Kind::Jet(b)) => a == b,
            (Kind::Add(a), Kind::Add(b)) | (Kind::Mul(a), Kind::Mul(b)) => a == b,
            (Kind::Pow(a, n), Kind::Pow(b, m)) => n == m && a == b,
            (Kind::Apply(f, a), Kind::Apply(g, b)) => f == g && a == b,
            (Kind::Int(a, v), Kind::Int(b, w)) => v == w && a == b,
            _ => false,
        }
    }
}

impl Eq for Expr {}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_expr(self, other)
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<Q> for Expr {
    fn from(c: Q) -> Expr {
        Expr::num(c)
    }
}

impl From<JetVar> for Expr {
    fn from(j: JetVar) -> Expr {
        Expr::jet(j)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl ops::$tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(&self, &rhs)
            }
        }
        impl ops::$tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(&self, rhs)
            }
        }
        impl ops::$tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, &rhs)
            }
        }
        impl ops::$tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::add([a.clone(), b.clone()]));
binop!(Sub, sub, |a, b| Expr::add([a.clone(), b.scale(&qi(-1))]));
binop!(Mul, mul, |a, b| Expr::mul([a.clone(), b.clone()]));
binop!(Div, div, |a, b| Expr::mul([a.clone(), b.recip()]));

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.scale(&qi(-1))
    }
}

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.scale(&qi(-1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Expr {
        Expr::sym("x")
    }
    fn y() -> Expr {
        Expr::sym("y")
    }

    #[test]
    fn like_terms_merge() {
        assert_eq!(x() + x(), Expr::int(2) * x());
        assert!((x() - x()).is_zero());
        let u = Expr::jet_of::<&str>("u", &[]);
        let ux = Expr::jet_of("u", &["x"]);
        let a = Expr::frac(2, 3) * &u * &ux;
        let b = Expr::frac(10, 15) * &ux * &u;
        assert!((a - b).is_zero());
    }

    #[test]
    fn powers_merge_and_cancel() {
        let e = x() * x() * x().recip();
        assert_eq!(e, x());
        assert_eq!((x() * y()).pow(2), x().pow(2) * y().pow(2));
        assert_eq!(x().pow(2).pow(3), x().pow(6));
    }

    #[test]
    fn sqrt_squares_collapse() {
        let s = Expr::sqrt(Expr::int(2));
        assert_eq!(&s * &s, Expr::int(2));
        assert_eq!(Expr::sqrt(Expr::frac(4, 9)), Expr::frac(2, 3));
        let sx = Expr::sqrt(x());
        assert_eq!(sx.pow(3), x() * Expr::sqrt(x()));
    }

    #[test]
    fn scalar_distributes_over_sums() {
        let s = x() + y();
        assert_eq!(Expr::int(2) * &s, Expr::int(2) * x() + Expr::int(2) * y());
        assert!((s.clone() - s).is_zero());
    }

    #[test]
    fn builtin_folding() {
        assert!(Expr::call(Builtin::Tanh, Expr::zero()).is_zero());
        assert!(Expr::sech(Expr::zero()).is_one());
        assert!(Expr::call(Builtin::Exp, Expr::zero()).is_one());
    }

    #[test]
    fn integral_collapses_x_jets() {
        let x: Name = "x".into();
        let uxy = Expr::jet_of("u", &["x", "y"]);
        assert_eq!(Expr::integral(&uxy, &x), Expr::jet_of("u", &["y"]));
        let uy = Expr::jet_of("u", &["y"]);
        assert!(matches!(Expr::integral(&uy, &x).kind(), Kind::Int(..)));
    }

    #[test]
    fn term_order_is_deterministic() {
        let items = [x(), y().pow(2), Expr::jet_of("q", &["x"]), Expr::int(3), x().pow(-1)];
        let mut a = items.to_vec();
        let mut b: Vec<Expr> = items.iter().rev().cloned().collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        assert_eq!(Expr::add(items.clone()), Expr::add(items.iter().rev().cloned()));
    }
}
