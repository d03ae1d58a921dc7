//! Point symmetries: invariance residuals, determining systems and a
//! restricted solver for generator ansätze linear in their unknowns.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::catalog::{self, CatalogError};
use crate::expr::{parse, Context, Expr, Func, Kind, Name, Q};
use crate::hierarchy::{self, HierarchyError};
use crate::jetcalc::{collect_by_jets, onshell_reduce, prolonged_coefficient, CharacteristicDerivatives, Equation, Generator, JetError};
use crate::linalg::QMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymmetryError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
    #[error("not a vector field in {basis:?}: {field}")]
    NotAField { field: String, basis: Vec<String> },
    #[error("ansatz: {0}")]
    Ansatz(String),
}

const COORDS: [&str; 4] = ["x", "y", "z", "t"];

/// The potential form of the (3+1)-dimensional equation, built from the
/// hierarchy.
pub fn potential_equation() -> Result<Equation, SymmetryError> {
    Ok(hierarchy::potential_transform(&hierarchy::assemble_new_kdv()?)?)
}

/// Reads `sum c_i * D<var_i>` into a generator on `indep` and `dep`.
pub fn generator_from_field(field: &Expr, indep: &[&str], dep: &[&str]) -> Result<Generator, SymmetryError> {
    let field = field.expand();
    let basis: Vec<String> = indep.iter().chain(dep).map(|v| format!("D{v}")).collect();
    let mut coeffs = Vec::with_capacity(basis.len());
    let mut rebuilt = Vec::new();
    for b in &basis {
        let name: Name = b.as_str().into();
        let c = field.partial_sym(&name).map_err(JetError::from)?.expand();
        if basis.iter().any(|o| c.contains_sym(o)) {
            return Err(SymmetryError::NotAField {
                field: field.to_string(),
                basis: basis.clone(),
            });
        }
        rebuilt.push(&c * Expr::sym(name));
        coeffs.push(c);
    }
    if !(&field - Expr::add(rebuilt)).expand().is_zero() {
        return Err(SymmetryError::NotAField {
            field: field.to_string(),
            basis,
        });
    }
    let eta = coeffs.split_off(indep.len());
    Ok(Generator::new(indep, coeffs, dep, eta)?)
}

/// A catalogued generator on `(x, y, z, t; q)`, as printed.
pub fn catalog_generator(name: &str) -> Result<Generator, SymmetryError> {
    let e = catalog::generators().expr(name)?;
    generator_from_field(&e, &COORDS, &["q"])
}

/// The seven basis generators with `S5 = d/dq`.
pub fn basis() -> Result<Vec<Generator>, SymmetryError> {
    let mut out = Vec::with_capacity(7);
    for i in 1..=7 {
        let g = if i == 5 {
            Generator::new(&COORDS, vec![Expr::zero(); 4], &["q"], vec![Expr::one()])?
        } else {
            catalog_generator(&format!("S{i}"))?
        };
        out.push(g);
    }
    Ok(out)
}

/// `pr(g)(Delta)` restricted to the equation manifold.
///
/// Only the prolonged coefficients of jets that occur in `Delta` are
/// computed.
pub fn invariance_residual(g: &Generator, eq: &Equation) -> Result<Expr, SymmetryError> {
    let lhs = eq.lhs.expand();
    let mut derivs: Vec<_> = g.characteristic().into_iter().map(CharacteristicDerivatives::new).collect();
    let mut terms = Vec::new();
    for j in lhs.jets() {
        if !g.dep.contains(&j.dep) {
            continue;
        }
        let d = lhs.partial_jet(&j).map_err(JetError::from)?;
        let c = prolonged_coefficient(g, &mut derivs, &j)?;
        terms.push((c * d).expand());
    }
    for (v, xi) in g.indep.iter().zip(&g.xi) {
        if xi.is_zero() || !lhs.contains_sym(v) {
            continue;
        }
        terms.push((xi * lhs.partial_sym(v).map_err(JetError::from)?).expand());
    }
    Ok(onshell_reduce(&Expr::add(terms), std::slice::from_ref(eq))?)
}

pub fn is_symmetry(g: &Generator, eq: &Equation) -> Result<bool, SymmetryError> {
    Ok(invariance_residual(g, eq)?.is_zero())
}

/// Unknown of an ansatz: a constant or a function of the time variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Unknown {
    Constant(Name),
    Function(Name),
}

impl Unknown {
    pub fn name(&self) -> &Name {
        match self {
            Unknown::Constant(n) | Unknown::Function(n) => n,
        }
    }
}

/// A generator shape whose coefficients are linear in the unknowns.
///
/// `unknowns` is in registration order; when an equation could be solved for
/// several unknowns the last registered one is eliminated. `pool` names the
/// integration constants, consumed in order.
#[derive(Debug, Clone)]
pub struct InfinitesimalAnsatz {
    pub generator: Generator,
    pub unknowns: Vec<Unknown>,
    pub time: Name,
    pub split: Vec<Name>,
    pub pool: Vec<Name>,
}

impl InfinitesimalAnsatz {
    /// Parses `xi` and `eta` in a context declaring the unknowns.
    pub fn parse(
        indep: &[&str],
        xi: &[&str],
        dep: &[&str],
        eta: &[&str],
        constants: &[&str],
        functions: &[&str],
        time: &str,
        pool: &[&str],
    ) -> Result<Self, SymmetryError> {
        let base = Context::kdv();
        let mut ctx = Context::new().independent(indep).dependent(dep);
        let mut unknowns = Vec::new();
        for c in constants {
            unknowns.push(Unknown::Constant((*c).into()));
        }
        for f in functions {
            unknowns.push(Unknown::Function((*f).into()));
            ctx = ctx.function(f, &[time]);
        }
        let taken: BTreeSet<&str> = constants.iter().chain(functions).chain(indep).chain(dep).copied().collect();
        let extra: Vec<&str> = base
            .constant_names()
            .iter()
            .map(|n| &**n)
            .filter(|n| !taken.contains(n))
            .collect();
        ctx = ctx.constants(&extra).constants(constants);
        let p = |s: &&str| parse(s, &ctx).map_err(|e| SymmetryError::Ansatz(format!("`{s}`: {e}")));
        let xi = xi.iter().map(p).collect::<Result<Vec<_>, _>>()?;
        let eta = eta.iter().map(p).collect::<Result<Vec<_>, _>>()?;
        let mut split: Vec<Name> = indep.iter().filter(|v| **v != time).map(|v| Name::from(*v)).collect();
        split.extend(dep.iter().map(|d| Name::from(*d)));
        Ok(InfinitesimalAnsatz {
            generator: Generator::new(indep, xi, dep, eta)?,
            unknowns,
            time: time.into(),
            split,
            pool: pool.iter().map(|s| Name::from(*s)).collect(),
        })
    }

    /// General point-symmetry shape for the potential equation. The
    /// coefficient of `d/dt` may a priori depend on `x` and `q`, and the
    /// `y` and `z` scalings are independent.
    pub fn new_kdv() -> Self {
        Self::parse(
            &COORDS,
            &["A(t)*x + F1(t)", "C1*y + C2", "K*z + C4", "T(t) + Tx*x + Tq*q"],
            &["q"],
            &["P(t)*x + R(t)*y + W(t)*z + M*q + F2(t)"],
            &["C1", "C2", "C4", "K", "Tx", "Tq", "M"],
            &["F1", "F2", "A", "T", "P", "R", "W"],
            "t",
            &["C3", "C5", "C6", "C7"],
        )
        .expect("built-in ansatz parses")
    }

    /// Point-symmetry shape for `u_t - 6 u u_x + u_xxx = 0`.
    pub fn classical_kdv() -> Self {
        Self::parse(
            &["x", "t"],
            &["A(t)*x + B(t)", "T(t)"],
            &["u"],
            &["P(t)*x + M*u + N(t)"],
            &["M"],
            &["B", "N", "T", "A", "P"],
            "t",
            &["C1", "C2", "C3", "C4"],
        )
        .expect("built-in ansatz parses")
    }
}

/// Coefficients of the residual with respect to the derivative jets.
#[derive(Debug, Clone)]
pub struct DeterminingSystem {
    pub equations: Vec<Expr>,
}

pub fn extract_determining(residual: &Expr) -> DeterminingSystem {
    let eqs = collect_by_jets(residual, |j| j.order() > 0);
    DeterminingSystem {
        equations: eqs.into_values().map(|c| c.expand()).filter(|c| !c.is_zero()).collect(),
    }
}

pub fn determining_system(ansatz: &InfinitesimalAnsatz, eq: &Equation) -> Result<DeterminingSystem, SymmetryError> {
    Ok(extract_determining(&invariance_residual(&ansatz.generator, eq)?))
}

/// Result of [`solve_restricted`].
#[derive(Debug, Clone)]
pub struct SolvedFamily {
    pub generator: Generator,
    /// Eliminations in the order they were performed.
    pub solutions: Vec<(Name, Expr)>,
    pub free_constants: Vec<Name>,
    pub free_functions: Vec<Name>,
    /// Equations the solver could not resolve.
    pub remainder: Vec<Expr>,
}

impl SolvedFamily {
    pub fn is_complete(&self) -> bool {
        self.remainder.is_empty()
    }

    /// Replaces free functions by the given bodies in the time variable.
    pub fn specialize(&self, time: &str, bodies: &[(&str, Expr)]) -> Result<Generator, SymmetryError> {
        let params = [Name::from(time)];
        let mut g = self.generator.clone();
        for (f, body) in bodies {
            g = try_map(&g, |e| Ok(e.subst_func(f, &params, body).map_err(sub_err)?.expand()))?;
        }
        Ok(g)
    }
}

fn sub_err(e: crate::expr::SubstError) -> SymmetryError {
    SymmetryError::Ansatz(e.to_string())
}

fn try_map(g: &Generator, f: impl Fn(&Expr) -> Result<Expr, SymmetryError>) -> Result<Generator, SymmetryError> {
    Ok(Generator {
        indep: g.indep.clone(),
        xi: g.xi.iter().map(&f).collect::<Result<_, _>>()?,
        dep: g.dep.clone(),
        eta: g.eta.iter().map(&f).collect::<Result<_, _>>()?,
    })
}

/// Splits `e` into coefficients of monomials in the given coordinate symbols
/// and bare fields.
fn split_poly(e: &Expr, coords: &[Name]) -> Vec<Expr> {
    let is_coord = |b: &Expr| match b.kind() {
        Kind::Sym(s) => coords.contains(s),
        Kind::Jet(j) => j.order() == 0 && coords.contains(&j.dep),
        _ => false,
    };
    let mut acc: BTreeMap<Expr, Vec<Expr>> = BTreeMap::new();
    for t in e.expand().terms() {
        let (mut mono, mut coeff) = (Vec::new(), Vec::new());
        for f in t.factors() {
            if is_coord(f.base_exp().0) {
                mono.push(f.clone());
            } else {
                coeff.push(f.clone());
            }
        }
        acc.entry(Expr::mul(mono)).or_default().push(Expr::mul(coeff));
    }
    acc.into_values().map(Expr::add).filter(|c| !c.is_zero()).collect()
}

/// Derivative orders at which function `f` occurs, or `[0]` for a constant.
fn orders_of(e: &Expr, u: &Unknown) -> BTreeSet<u32> {
    let mut out = BTreeSet::new();
    e.walk(&mut |n| match (n.kind(), u) {
        (Kind::Sym(s), Unknown::Constant(c)) if s == c => {
            out.insert(0);
        }
        (Kind::Apply(Func::Named { name, derivs }, _), Unknown::Function(f)) if name == f => {
            out.insert(derivs.iter().sum());
        }
        _ => {}
    });
    out
}

fn function_call(f: &Name, order: u32, time: &Name) -> Expr {
    Expr::apply(
        Func::Named {
            name: f.clone(),
            derivs: vec![order],
        },
        vec![Expr::sym(time.clone())],
    )
}

fn has_function_unknown(e: &Expr, unknowns: &[Unknown]) -> bool {
    unknowns
        .iter()
        .any(|u| matches!(u, Unknown::Function(_)) && !orders_of(e, u).is_empty())
}

/// `U` such that `coeff * target + rest = 0`, if `e` has that shape with a
/// rational `coeff` and `target` absent from `rest`.
fn isolate(e: &Expr, target: &Expr) -> Option<Expr> {
    let mut coeff = Q::zero();
    let mut rest = Vec::new();
    for t in e.terms() {
        let (c, r) = t.split_coeff();
        if r == *target {
            coeff += c;
        } else {
            rest.push(t.clone());
        }
    }
    if coeff.is_zero() {
        return None;
    }
    Some(Expr::add(rest).scale(&(-coeff.recip())).expand())
}

/// `k`-fold antiderivative in `time` of a polynomial in `time`.
fn integrate_poly(e: &Expr, time: &Name, k: u32) -> Option<Expr> {
    let mut cur = e.expand();
    for _ in 0..k {
        let mut out = Vec::new();
        for t in cur.terms() {
            let mut n = 0i64;
            let mut rest = Vec::new();
            for f in t.factors() {
                match f.base_exp() {
                    (b, m) if b.as_sym() == Some(time) => n += m,
                    _ => rest.push(f.clone()),
                }
            }
            if n < 0 || Expr::mul(rest.clone()).contains_sym(time) {
                return None;
            }
            let tt = Expr::sym(time.clone()).pow(n + 1);
            out.push((Expr::mul(rest) * tt).scale(&Q::new((1).into(), (n + 1).into())));
        }
        cur = Expr::add(out).expand();
    }
    Some(cur)
}

fn factorial(n: u32) -> Q {
    (1..=n).fold(Q::one(), |acc, i| acc * Q::from_integer(i.into()))
}

struct Solver<'a> {
    ansatz: &'a InfinitesimalAnsatz,
    open: Vec<Unknown>,
    pool: std::vec::IntoIter<Name>,
    used_pool: Vec<Name>,
    solutions: Vec<(Name, Expr)>,
}

impl Solver<'_> {
    fn normalize(&self, eqs: Vec<Expr>) -> Vec<Expr> {
        let mut out = BTreeSet::new();
        for e in eqs {
            for c in split_poly(&e, &self.ansatz.split) {
                let parts = if has_function_unknown(&c, &self.open) {
                    vec![c]
                } else {
                    split_poly(&c, std::slice::from_ref(&self.ansatz.time))
                };
                for p in parts {
                    let p = p.expand();
                    if !p.is_zero() {
                        out.insert(monic(&p));
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    fn apply(&mut self, u: &Unknown, value: &Expr, eqs: &mut Vec<Expr>) -> Result<(), SymmetryError> {
        let subst = |e: &Expr| -> Result<Expr, SymmetryError> {
            Ok(match u {
                Unknown::Constant(c) => e.subst_sym(c, value).expand(),
                Unknown::Function(f) => e
                    .subst_func(f, std::slice::from_ref(&self.ansatz.time), value)
                    .map_err(sub_err)?
                    .expand(),
            })
        };
        for e in eqs.iter_mut() {
            *e = subst(e)?;
        }
        for (_, s) in self.solutions.iter_mut() {
            *s = subst(s)?;
        }
        self.solutions.push((u.name().clone(), value.clone()));
        self.open.retain(|o| o != u);
        Ok(())
    }

    /// An unknown with an algebraic occurrence, preferring late registration.
    fn algebraic_step(&self, eqs: &[Expr]) -> Option<(Unknown, Expr)> {
        for u in self.open.iter().rev() {
            let target = match u {
                Unknown::Constant(c) => Expr::sym(c.clone()),
                Unknown::Function(f) => function_call(f, 0, &self.ansatz.time),
            };
            for e in eqs {
                if orders_of(e, u) != BTreeSet::from([0]) {
                    continue;
                }
                let Some(v) = isolate(e, &target) else { continue };
                if !orders_of(&v, u).is_empty() {
                    continue;
                }
                if matches!(u, Unknown::Constant(_))
                    && (v.contains_sym(&self.ansatz.time) || has_function_unknown(&v, &self.open))
                {
                    continue;
                }
                return Some((u.clone(), v));
            }
        }
        None
    }

    /// `c * U^(k) + r(t) = 0` with `r` free of unknown functions, lowest `k`
    /// first.
    fn integration_step(&mut self, eqs: &[Expr]) -> Option<(Unknown, Expr)> {
        let mut best: Option<(u32, Unknown, Expr)> = None;
        for e in eqs {
            let funcs: Vec<&Unknown> = self
                .open
                .iter()
                .filter(|u| matches!(u, Unknown::Function(_)) && !orders_of(e, u).is_empty())
                .collect();
            let [u] = funcs[..] else { continue };
            let orders = orders_of(e, u);
            if orders.len() != 1 {
                continue;
            }
            let k = *orders.iter().next().unwrap();
            if best.as_ref().is_some_and(|(bk, _, _)| *bk <= k) {
                continue;
            }
            let target = function_call(u.name(), k, &self.ansatz.time);
            let Some(v) = isolate(e, &target) else { continue };
            let Some(body) = integrate_poly(&v, &self.ansatz.time, k) else {
                continue;
            };
            best = Some((k, u.clone(), body));
        }
        let (k, u, mut body) = best?;
        let t = Expr::sym(self.ansatz.time.clone());
        for i in 0..k {
            let c = self.pool.next()?;
            self.used_pool.push(c.clone());
            body = &body + (Expr::sym(c) * t.pow(i as i64)).scale(&factorial(i).recip());
        }
        Some((u, body.expand()))
    }
}

fn monic(e: &Expr) -> Expr {
    let first = e.terms()[0].split_coeff().0;
    e.scale(&first.recip()).expand()
}

/// Solves a determining system linear in the ansatz unknowns: polynomial
/// splitting in the non-time coordinates, algebraic elimination, then
/// integration of single-unknown equations in time.
pub fn solve_restricted(ansatz: &InfinitesimalAnsatz, sys: &DeterminingSystem) -> Result<SolvedFamily, SymmetryError> {
    let mut solver = Solver {
        ansatz,
        open: ansatz.unknowns.clone(),
        pool: ansatz.pool.clone().into_iter(),
        used_pool: Vec::new(),
        solutions: Vec::new(),
    };
    let mut eqs = solver.normalize(sys.equations.clone());
    loop {
        if eqs.is_empty() {
            break;
        }
        let step = match solver.algebraic_step(&eqs) {
            Some(s) => Some(s),
            None => solver.integration_step(&eqs),
        };
        let Some((u, value)) = step else { break };
        solver.apply(&u, &value, &mut eqs)?;
        eqs = solver.normalize(eqs);
    }
    let mut g = ansatz.generator.clone();
    for (name, value) in &solver.solutions {
        let u = ansatz.unknowns.iter().find(|u| u.name() == name).unwrap();
        g = try_map(&g, |e| {
            Ok(match u {
                Unknown::Constant(c) => e.subst_sym(c, value).expand(),
                Unknown::Function(f) => e
                    .subst_func(f, std::slice::from_ref(&ansatz.time), value)
                    .map_err(sub_err)?
                    .expand(),
            })
        })?;
    }
    let mut free_constants = Vec::new();
    let mut free_functions = Vec::new();
    for u in &solver.open {
        if g.coefficients().any(|c| !orders_of(c, u).is_empty()) {
            match u {
                Unknown::Constant(c) => free_constants.push(c.clone()),
                Unknown::Function(f) => free_functions.push(f.clone()),
            }
        }
    }
    free_constants.extend(solver.used_pool.iter().cloned());
    Ok(SolvedFamily {
        generator: g,
        solutions: solver.solutions,
        free_constants,
        free_functions,
        remainder: eqs,
    })
}

/// Applies the eliminations of `fam` to every member of `sys`; returns the
/// members that do not vanish.
pub fn unsatisfied(ansatz: &InfinitesimalAnsatz, sys: &DeterminingSystem, fam: &SolvedFamily) -> Result<Vec<Expr>, SymmetryError> {
    let mut out = Vec::new();
    for e in &sys.equations {
        let mut e = e.clone();
        for (name, value) in &fam.solutions {
            e = match ansatz.unknowns.iter().find(|u| u.name() == name) {
                Some(Unknown::Function(f)) => e
                    .subst_func(f, std::slice::from_ref(&ansatz.time), value)
                    .map_err(sub_err)?,
                _ => e.subst_sym(name, value),
            };
        }
        let e = e.expand();
        if !e.is_zero() {
            out.push(e);
        }
    }
    Ok(out)
}

/// `F1 = C5 t + C6`, `F2 = C7`, then one generator per constant `C1 .. C7`.
pub fn specialized_basis(fam: &SolvedFamily) -> Result<Vec<Generator>, SymmetryError> {
    let ctx = Context::kdv();
    let f1 = parse("C5*t + C6", &ctx).expect("literal");
    let f2 = parse("C7", &ctx).expect("literal");
    let g = fam.specialize("t", &[("F1", f1), ("F2", f2)])?;
    let names: Vec<Name> = (1..=7).map(|i| Name::from(format!("C{i}"))).collect();
    Ok(family_basis(&g, &names))
}

/// The members of a generator family linear in `constants`, one per
/// constant.
pub fn family_basis(g: &Generator, constants: &[Name]) -> Vec<Generator> {
    constants
        .iter()
        .map(|c| {
            g.map(|e| {
                let mut vals = std::collections::HashMap::new();
                for o in constants {
                    vals.insert(o.clone(), if o == c { Expr::one() } else { Expr::zero() });
                }
                e.subst_syms(&vals).expand()
            })
        })
        .collect()
}

/// Coordinate rows of generators whose coefficients are polynomial: one
/// column per (component, monomial) pair.
fn coordinate_matrix(gens: &[Generator]) -> QMatrix {
    let mut keys: BTreeMap<(usize, Expr), usize> = BTreeMap::new();
    let mut rows: Vec<Vec<((usize, Expr), Q)>> = Vec::new();
    for g in gens {
        let mut row = Vec::new();
        for (i, c) in g.coefficients().enumerate() {
            for t in c.expand().terms() {
                let (q, m) = t.split_coeff();
                let n = keys.len();
                keys.entry((i, m.clone())).or_insert(n);
                row.push(((i, m), q));
            }
        }
        rows.push(row);
    }
    let mut m = QMatrix::zeros(rows.len(), keys.len());
    for (r, row) in rows.into_iter().enumerate() {
        for (k, q) in row {
            m[(r, keys[&k])] += q;
        }
    }
    m
}

pub fn span_rank(gens: &[Generator]) -> usize {
    coordinate_matrix(gens).rank()
}

/// True if both sets span the same space over the rationals.
pub fn same_span(a: &[Generator], b: &[Generator]) -> bool {
    let all: Vec<Generator> = a.iter().chain(b).cloned().collect();
    let r = span_rank(&all);
    r == span_rank(a) && r == span_rank(b)
}

/// Solves `target = sum c_i gens_i` over the rationals.
pub fn decompose(target: &Generator, gens: &[Generator]) -> Option<Vec<Q>> {
    let mut all = gens.to_vec();
    all.push(target.clone());
    let m = coordinate_matrix(&all).transpose();
    let n = gens.len();
    let mut a = QMatrix::zeros(m.rows, n);
    let mut b = Vec::with_capacity(m.rows);
    for i in 0..m.rows {
        for j in 0..n {
            a[(i, j)] = m[(i, j)].clone();
        }
        b.push(m[(i, n)].clone());
    }
    a.solve(&b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn classical() -> Equation {
        let e = parse("u_t - 6*u*u_x + u_xxx", &Context::kdv()).unwrap();
        Equation::new(e, crate::expr::JetVar::of("u", &["x", "x", "x"])).unwrap()
    }

    fn field(text: &str, indep: &[&str], dep: &[&str]) -> Generator {
        let ctx = Context::kdv().constants(&["Dx", "Dy", "Dz", "Dt", "Du", "Dq"]);
        generator_from_field(&parse(text, &ctx).unwrap(), indep, dep).unwrap()
    }

    #[test]
    fn field_parsing() {
        let g = field("t*Dx - 1/6*Du", &["x", "t"], &["u"]);
        assert_eq!(g.xi[0], Expr::sym("t"));
        assert_eq!(g.eta[0], Expr::frac(-1, 6));
        let ctx = Context::kdv().constants(&["Dx", "Dt", "Du"]);
        let bad = parse("Dx*Dt", &ctx).unwrap();
        assert!(generator_from_field(&bad, &["x", "t"], &["u"]).is_err());
    }

    #[test]
    fn classical_generators_are_symmetries() {
        let eq = classical();
        for text in ["Dx", "Dt", "t*Dx - 1/6*Du", "x*Dx + 3*t*Dt - 2*u*Du"] {
            let g = field(text, &["x", "t"], &["u"]);
            assert!(is_symmetry(&g, &eq).unwrap(), "{text}");
        }
        let g = field("x*Dx", &["x", "t"], &["u"]);
        assert!(!is_symmetry(&g, &eq).unwrap());
    }

    #[test]
    fn classical_family() {
        let eq = classical();
        let ans = InfinitesimalAnsatz::classical_kdv();
        let sys = determining_system(&ans, &eq).unwrap();
        let fam = solve_restricted(&ans, &sys).unwrap();
        assert!(fam.is_complete(), "{:?}", fam.remainder);
        assert!(fam.free_functions.is_empty());
        let got = family_basis(&fam.generator, &fam.free_constants);
        assert_eq!(got.len(), 4);
        let want: Vec<_> = ["Dx", "Dt", "t*Dx - 1/6*Du", "x*Dx + 3*t*Dt - 2*u*Du"]
            .iter()
            .map(|t| field(t, &["x", "t"], &["u"]))
            .collect();
        assert!(same_span(&got, &want));
    }

    #[test]
    fn polynomial_integration() {
        let t: Name = "t".into();
        let e = parse("3*C1 + t", &Context::kdv()).unwrap();
        let got = integrate_poly(&e, &t, 1).unwrap();
        assert_eq!(got, parse("3*C1*t + t^2/2", &Context::kdv()).unwrap());
        assert!(integrate_poly(&parse("sin(t)", &Context::kdv()).unwrap(), &t, 1).is_none());
    }
}
