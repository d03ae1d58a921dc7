//! Similarity reductions: invariant maps of the supported generator shapes,
//! chain-rule substitution of group-invariant solutions, and comparison of
//! reduced equations up to a rational factor.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::catalog::{self, CatalogError};
use crate::expr::{DiffError, DiffRules, Env, EvalError, Expr, JetVar, Kind, MultiIndex, Name, Q};
use crate::jetcalc::{Generator, JetError};
use crate::symmetry::{self, SymmetryError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("unsupported generator shape: {0}")]
    UnsupportedShape(String),
    #[error("reduced equation still depends on {vars:?}: {expr}")]
    InvarianceViolation { vars: Vec<String>, expr: String },
    #[error(transparent)]
    Diff(#[from] DiffError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("no reduction for `{0}`")]
    UnknownSubalgebra(String),
    #[error("evaluation failed: {0}")]
    Eval(String),
}

/// A group-invariant ansatz `dep = base + new_dep(new vars)`.
#[derive(Debug, Clone)]
pub struct ChangeOfVariables {
    pub old_vars: Vec<Name>,
    pub old_dep: Name,
    /// New variables as expressions in the old ones.
    pub new_vars: Vec<(Name, Expr)>,
    pub new_dep: Name,
    /// Particular part of the ansatz, in the old variables.
    pub base: Expr,
    /// Old variables in terms of the new ones and `leftover`.
    pub inverse: Vec<(Name, Expr)>,
    /// The old variable along the orbits; it must drop out.
    pub leftover: Name,
}

impl ChangeOfVariables {
    /// `dep` in the old variables for a given `f` of the new ones.
    pub fn compose(&self, f: &Expr) -> Expr {
        let vals: HashMap<Name, Expr> = self.new_vars.iter().cloned().collect();
        (&self.base + f.subst_syms(&vals)).expand()
    }

    pub fn new_point(&self, old: &HashMap<Name, Complex64>) -> Result<HashMap<Name, Complex64>, ReductionError> {
        let mut env = Env::new();
        for (k, v) in old {
            env.syms.insert(k.clone(), *v);
        }
        let mut out = HashMap::new();
        for (n, e) in &self.new_vars {
            out.insert(n.clone(), e.eval(&env).map_err(|e| ReductionError::Eval(e.to_string()))?);
        }
        Ok(out)
    }
}

fn is_const(e: &Expr) -> bool {
    e.expand().as_num().is_some()
}

/// Invariants of `g` acting on `(vars; dep)`, named `names` in order.
///
/// Supported shapes: constant coefficients with `eta = 0`, and
/// `xi = (a t, b, 0, .., 0)` on `(x, y, .., t)` with `eta` affine in
/// the spatial variables.
pub fn invariants_of(g: &Generator, names: &[&str], new_dep: &str) -> Result<ChangeOfVariables, ReductionError> {
    let vars = &g.indep;
    let shape = || ReductionError::UnsupportedShape(format!("{g:?}"));
    if names.len() + 1 != vars.len() || g.dep.len() != 1 {
        return Err(shape());
    }
    let eta = g.eta[0].expand();
    if g.xi.iter().all(is_const) && eta.is_zero() {
        return translation_invariants(vars, &g.xi, &g.dep[0], names, new_dep);
    }
    galilean_invariants(g, names, new_dep).ok_or_else(shape)
}

fn translation_invariants(
    vars: &[Name],
    xi: &[Expr],
    dep: &Name,
    names: &[&str],
    new_dep: &str,
) -> Result<ChangeOfVariables, ReductionError> {
    let coeff: Vec<Q> = xi.iter().map(|e| e.expand().as_num().cloned().unwrap()).collect();
    let p = coeff
        .iter()
        .position(|c| !c.is_zero())
        .ok_or_else(|| ReductionError::UnsupportedShape("zero generator".into()))?;
    let pivot = Expr::sym(vars[p].clone());
    let mut new_vars = Vec::new();
    let mut inverse = Vec::new();
    let mut it = names.iter();
    for (i, v) in vars.iter().enumerate() {
        if i == p {
            continue;
        }
        let name: Name = (*it.next().unwrap()).into();
        let r = &coeff[i] / &coeff[p];
        let e = (Expr::sym(v.clone()) - pivot.scale(&r)).expand();
        inverse.push((v.clone(), (Expr::sym(name.clone()) + pivot.scale(&r)).expand()));
        new_vars.push((name, e));
    }
    Ok(ChangeOfVariables {
        old_vars: vars.to_vec(),
        old_dep: dep.clone(),
        new_vars,
        new_dep: new_dep.into(),
        base: Expr::zero(),
        inverse,
        leftover: vars[p].clone(),
    })
}

/// `a t d/dx + b d/dy + (p x + r y + s z + c) d/dq` on `(x, y, z, t)`.
fn galilean_invariants(g: &Generator, names: &[&str], new_dep: &str) -> Option<ChangeOfVariables> {
    let names_ok = g.indep.iter().map(|n| &**n).eq(["x", "y", "z", "t"]);
    if !names_ok {
        return None;
    }
    let t = Expr::sym("t");
    let a = (&g.xi[0] * t.recip()).expand().as_num()?.clone();
    let b = g.xi[1].expand().as_num()?.clone();
    if a.is_zero() || b.is_zero() || !g.xi[2].is_zero() || !g.xi[3].is_zero() {
        return None;
    }
    let eta = g.eta[0].expand();
    let lin = |v: &str| -> Option<Q> { eta.partial_sym(&v.into()).ok()?.expand().as_num().cloned() };
    let (p, r, s) = (lin("x")?, lin("y")?, lin("z")?);
    let x = Expr::sym("x");
    let y = Expr::sym("y");
    let z = Expr::sym("z");
    let c = (&eta - x.scale(&p) - y.scale(&r) - z.scale(&s)).expand();
    if !is_const(&c) {
        return None;
    }
    // Integrate eta along the orbit from the plane x = 0: parameter
    // sig = x / (a t), with y moving by b per unit parameter.
    let sig = (&x * t.recip()).scale(&a.recip());
    let half = Q::new(1.into(), 2.into());
    let base = Expr::add([
        (t.scale(&(&p * &a)) * sig.pow(2)).scale(&half),
        (Expr::sym("y") - sig.scale(&b)) * &sig * Expr::num(r.clone()),
        sig.pow(2).scale(&(&r * &b * &half)),
        (z.scale(&s) + c) * &sig,
    ])
    .expand();
    let xi_inv = (y.scale(&b.recip()) - (&x * t.recip()).scale(&a.recip())).expand();
    let (n0, n1, n2): (Name, Name, Name) = (names[0].into(), names[1].into(), names[2].into());
    let new_vars = vec![(n0.clone(), z.clone()), (n1.clone(), t.clone()), (n2.clone(), xi_inv)];
    let tt = Expr::sym(n1.clone());
    let y_of = (Expr::sym(n2) + (&x * tt.recip()).scale(&a.recip())).scale(&b).expand();
    Some(ChangeOfVariables {
        old_vars: g.indep.clone(),
        old_dep: g.dep[0].clone(),
        new_vars,
        new_dep: new_dep.into(),
        base,
        inverse: vec![("y".into(), y_of), ("z".into(), Expr::sym(n0)), ("t".into(), tt)],
        leftover: "x".into(),
    })
}

/// `d/d(old var)` through the invariant map: old symbols are coordinates,
/// jets of the new dependent variable pick up `sum_j dn_j/dv f_{K,j}`.
struct Chain {
    var: Name,
    new_dep: Name,
    grads: Vec<(Name, Expr)>,
}

impl DiffRules for Chain {
    fn sym(&self, s: &Name) -> Expr {
        if *s == self.var {
            Expr::one()
        } else {
            Expr::zero()
        }
    }

    fn jet(&self, j: &JetVar) -> Expr {
        if j.dep != self.new_dep {
            return Expr::zero();
        }
        Expr::add(
            self.grads
                .iter()
                .filter(|(_, d)| !d.is_zero())
                .map(|(n, d)| d * Expr::jet(j.diff(n))),
        )
    }

    fn int(&self, integrand: &Expr, _: &Name) -> Result<Expr, DiffError> {
        Err(DiffError::Antiderivative(integrand.to_string()))
    }
}

/// Substitutes the ansatz into `lhs` (a differential expression in
/// `cov.old_dep`) and rewrites it in the new variables.
pub fn reduce(lhs: &Expr, cov: &ChangeOfVariables) -> Result<Expr, ReductionError> {
    let ansatz = &cov.base + Expr::jet(JetVar::bare(cov.new_dep.clone()));
    let mut rules = HashMap::new();
    for v in &cov.old_vars {
        let mut grads = Vec::new();
        for (n, e) in &cov.new_vars {
            grads.push((n.clone(), e.partial_sym(v)?.expand()));
        }
        rules.insert(
            v.clone(),
            Chain {
                var: v.clone(),
                new_dep: cov.new_dep.clone(),
                grads,
            },
        );
    }
    let mut memo: HashMap<MultiIndex, Expr> = HashMap::new();
    memo.insert(MultiIndex::empty(), ansatz.expand());
    let mut values = HashMap::new();
    for j in lhs.jets() {
        if j.dep != cov.old_dep {
            continue;
        }
        values.insert(j.clone(), derivative(&j.index, &mut memo, &rules)?);
    }
    let sub = lhs.subst_jets(&values).expand();
    let inv: HashMap<Name, Expr> = cov.inverse.iter().cloned().collect();
    let out = sub.subst_syms(&inv).expand();
    let left: Vec<String> = cov
        .old_vars
        .iter()
        .filter(|v| out.contains_sym(v))
        .map(|v| v.to_string())
        .collect();
    if !left.is_empty() {
        return Err(ReductionError::InvarianceViolation {
            vars: left,
            expr: out.to_string(),
        });
    }
    Ok(out)
}

fn derivative(
    idx: &MultiIndex,
    memo: &mut HashMap<MultiIndex, Expr>,
    rules: &HashMap<Name, Chain>,
) -> Result<Expr, ReductionError> {
    if let Some(e) = memo.get(idx) {
        return Ok(e.clone());
    }
    let last = idx.entries().last().unwrap().0.clone();
    let parent = idx.without(&last).unwrap();
    let d = derivative(&parent, memo, rules)?.diff_with(&rules[&last])?.expand();
    memo.insert(idx.clone(), d.clone());
    Ok(d)
}

#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    pub equal: bool,
    /// `computed = lambda * transcribed`.
    pub lambda: Option<String>,
    pub mismatch: Option<String>,
    /// Largest relative deviation over the numeric probe, when run.
    pub max_relative: Option<f64>,
}

/// Exact test of `computed = lambda * transcribed` for a nonzero factor
/// `lambda` free of jets.
pub fn compare_reduced(computed: &Expr, transcribed: &Expr) -> Comparison {
    let c = computed.expand();
    let t = transcribed.expand();
    let fail = |m: String| Comparison {
        equal: false,
        lambda: None,
        mismatch: Some(m),
        max_relative: None,
    };
    if t.is_zero() || c.is_zero() {
        return if t.is_zero() && c.is_zero() {
            Comparison {
                equal: true,
                lambda: Some("1".into()),
                mismatch: None,
                max_relative: None,
            }
        } else {
            fail("one side is zero".into())
        };
    }
    let ct = collect_jet_monomials(&c);
    let tt = collect_jet_monomials(&t);
    let Some((m, tc)) = tt.iter().find(|(_, k)| k.terms().len() == 1) else {
        return fail("no jet monomial with a single-term coefficient".into());
    };
    let Some(cc) = ct.get(m) else {
        return fail(format!("monomial {m} absent from computed"));
    };
    let lambda = (cc * tc.recip()).expand();
    let diff = (&c - &lambda * &t).expand();
    if diff.is_zero() {
        Comparison {
            equal: true,
            lambda: Some(lambda.to_string()),
            mismatch: None,
            max_relative: None,
        }
    } else {
        let first = diff.terms()[0].clone();
        fail(format!("lambda {lambda}; first mismatching term {first}"))
    }
}

fn collect_jet_monomials(e: &Expr) -> BTreeMap<Expr, Expr> {
    let mut out: BTreeMap<Expr, Vec<Expr>> = BTreeMap::new();
    for term in e.terms() {
        let (jets, rest): (Vec<Expr>, Vec<Expr>) = term.factors().iter().cloned().partition(|f| !f.jets().is_empty());
        out.entry(Expr::mul(jets)).or_default().push(Expr::mul(rest));
    }
    out.into_iter().map(|(k, v)| (k, Expr::add(v))).collect()
}

/// Numeric test of proportionality at `points` random assignments: the
/// ratio at the first point fixes lambda.
pub fn compare_numeric(computed: &Expr, transcribed: &Expr, seed: u64, points: usize, tol: f64) -> Result<Comparison, ReductionError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut syms: Vec<Name> = computed.symbols().union(&transcribed.symbols()).cloned().collect();
    syms.retain(|s| &**s != "pi" && &**s != "I");
    let jets: Vec<JetVar> = computed.jets().union(&transcribed.jets()).cloned().collect();
    let mut lambda: Option<Complex64> = None;
    let mut worst = 0.0f64;
    let mut done = 0;
    let mut attempts = 0;
    while done < points {
        attempts += 1;
        if attempts > 4 * points {
            return Err(ReductionError::Eval("too many singular points".into()));
        }
        let mut env = Env::new();
        let draw = |rng: &mut ChaCha8Rng| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        for s in &syms {
            env.syms.insert(s.clone(), draw(&mut rng));
        }
        for j in &jets {
            env.jets.insert(j.clone(), draw(&mut rng));
        }
        let (a, b) = match (computed.eval_finite(&env), transcribed.eval_finite(&env)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(EvalError::Domain(_)), _) | (_, Err(EvalError::Domain(_))) => continue,
            (Err(e), _) | (_, Err(e)) => return Err(ReductionError::Eval(e.to_string())),
        };
        let l = match lambda {
            Some(l) => l,
            None => {
                if b.norm() < 1e-12 {
                    continue;
                }
                let l = a / b;
                lambda = Some(l);
                l
            }
        };
        let rel = (a - l * b).norm() / a.norm().max((l * b).norm()).max(1.0);
        worst = worst.max(rel);
        done += 1;
    }
    let equal = worst < tol;
    Ok(Comparison {
        equal,
        lambda: lambda.map(|l| format!("{:.12}", l.re)),
        mismatch: (!equal).then(|| format!("max relative deviation {worst:.3e}")),
        max_relative: Some(worst),
    })
}

/// A catalogued reduction: generator, invariant names, printed result and
/// the relabeling from the printed names to the engine's.
#[derive(Debug, Clone)]
pub struct Subalgebra {
    pub label: &'static str,
    pub names: [&'static str; 3],
    pub transcription: Option<&'static str>,
    pub numeric: bool,
}

pub const SUBALGEBRAS: [Subalgebra; 7] = [
    Subalgebra { label: "S2", names: ["xi", "zeta", "eta"], transcription: None, numeric: false },
    Subalgebra { label: "S4", names: ["X", "Y", "Z"], transcription: Some("reduced_S4"), numeric: false },
    Subalgebra { label: "S8", names: ["xi", "zeta", "eta"], transcription: Some("reduced_S8"), numeric: true },
    Subalgebra { label: "S9", names: ["xi", "Z", "T"], transcription: Some("reduced_S9"), numeric: false },
    Subalgebra { label: "S10", names: ["X", "xi", "T"], transcription: Some("reduced_S10"), numeric: false },
    Subalgebra { label: "S11", names: ["Z", "T", "xi"], transcription: Some("reduced_S11"), numeric: false },
    Subalgebra { label: "S12", names: ["X", "xi", "zeta"], transcription: Some("reduced_S12"), numeric: true },
];

pub fn subalgebra(label: &str) -> Result<&'static Subalgebra, ReductionError> {
    SUBALGEBRAS
        .iter()
        .find(|s| s.label.eq_ignore_ascii_case(label))
        .ok_or_else(|| ReductionError::UnknownSubalgebra(label.into()))
}

#[derive(Debug, Clone, Serialize)]
pub struct ReductionReport {
    pub subalgebra: String,
    pub invariants: Vec<(String, String)>,
    pub ansatz: String,
    pub reduced: String,
    pub comparison: Comparison,
}

/// Reduces the potential equation by a catalogued subalgebra and compares
/// with the printed result (`S2` against `f_xixizetaeta`).
pub fn reduce_subalgebra(label: &str, seed: u64) -> Result<ReductionReport, ReductionError> {
    let sub = subalgebra(label)?;
    let eq = symmetry::potential_equation()?;
    let g = symmetry::catalog_generator(sub.label)?;
    let cov = invariants_of(&g, &sub.names, "f")?;
    let reduced = reduce(&eq.lhs, &cov)?;
    let printed = match sub.transcription {
        Some(name) => catalog::reductions().expr(name)?,
        None => Expr::jet(JetVar::of("f", &["xi", "xi", "zeta", "eta"])),
    };
    let comparison = if sub.numeric {
        let exact = compare_reduced(&reduced, &printed);
        let mut num = compare_numeric(&reduced, &printed, seed, 50, 1e-8)?;
        num.lambda = exact.lambda.or(num.lambda);
        num
    } else {
        compare_reduced(&reduced, &printed)
    };
    let f = Expr::jet(JetVar::bare("f"));
    Ok(ReductionReport {
        subalgebra: sub.label.into(),
        invariants: cov.new_vars.iter().map(|(n, e)| (n.to_string(), e.to_string())).collect(),
        ansatz: cov.compose(&f).to_string().replace("f", &format!("f({})", sub.names.join(", "))),
        reduced: reduced.to_string(),
        comparison,
    })
}

/// Translation generator `sum c_i d/dv_i` on `(vars; dep)`.
pub fn translation(vars: &[&str], coeffs: &[i64], dep: &str) -> Result<Generator, ReductionError> {
    let xi = coeffs.iter().map(|&c| Expr::int(c)).collect();
    Ok(Generator::new(vars, xi, &[dep], vec![Expr::zero()])?)
}

/// `F` with `D_var F = e` for a polynomial differential expression in one
/// dependent variable of one independent variable, if it exists.
pub fn integrate_total(e: &Expr, dep: &str, var: &str) -> Option<Expr> {
    let v: Name = var.into();
    let jet = |k: u32| JetVar::new(dep, MultiIndex::from_counts([(v.clone(), k)]));
    let mut rest = e.expand();
    let mut acc = Vec::new();
    for _ in 0..64 {
        if rest.is_zero() {
            return Some(Expr::add(acc).expand());
        }
        let n = rest.jets().iter().filter(|j| &*j.dep == dep).map(JetVar::order).max()?;
        if n == 0 {
            return None;
        }
        let top = jet(n);
        let c = rest.partial_jet(&top).ok()?.expand();
        if c.jets().contains(&top) {
            return None;
        }
        let lower = jet(n - 1);
        let part = antiderivative_in(&c, &lower)?;
        rest = (&rest - part.total_diff(&v).ok()?).expand();
        acc.push(part);
    }
    None
}

/// Polynomial antiderivative of `c` in the jet `j`.
fn antiderivative_in(c: &Expr, j: &JetVar) -> Option<Expr> {
    let mut out = Vec::new();
    for t in c.expand().terms() {
        let mut k = 0i64;
        let mut rest = Vec::new();
        for f in t.factors() {
            match f.base_exp() {
                (b, m) if b.as_jet() == Some(j) => k += m,
                _ => rest.push(f.clone()),
            }
        }
        if k < 0 {
            return None;
        }
        let r = Expr::mul(rest);
        if r.jets().contains(j) {
            return None;
        }
        out.push((r * Expr::jet(j.clone()).pow(k + 1)).scale(&Q::new(1.into(), (k + 1).into())));
    }
    Some(Expr::add(out).expand())
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    pub second: Comparison,
    pub third: Comparison,
    pub integrated: Comparison,
    pub third_equation: String,
    pub integrated_equation: String,
}

/// The two-step chain below the `S8` reduction, then four formal
/// integrations of the resulting ODE: three in the independent variable
/// and one after multiplying by `h_rhorho`, integration constants zero.
pub fn s8_chain(redeq1: &Expr) -> Result<ChainReport, ReductionError> {
    let cat = catalog::reductions();
    let g1 = translation(&["xi", "zeta", "eta"], &[1, -1, -1], "f")?;
    let cov1 = invariants_of(&g1, &["theta", "vartheta"], "g")?;
    let second = reduce(redeq1, &cov1)?;
    let g2 = translation(&["theta", "vartheta"], &[1, -1], "g")?;
    let cov2 = invariants_of(&g2, &["rho"], "h")?;
    let third = reduce(&second, &cov2)?;
    let mut e = third.clone();
    for _ in 0..3 {
        e = integrate_total(&e, "h", "rho").ok_or_else(|| ReductionError::Eval(format!("{e} is not a total derivative")))?;
    }
    let w = Expr::jet(JetVar::of("h", &["rho", "rho"]));
    let integrated = integrate_total(&(&e * w), "h", "rho")
        .ok_or_else(|| ReductionError::Eval(format!("{e} has no first integral")))?;
    Ok(ChainReport {
        second: compare_reduced(&second, &cat.expr("chain_S8_2")?),
        third: compare_reduced(&third, &cat.expr("chain_S8_3")?),
        integrated: compare_reduced(&integrated, &cat.expr("chain_S8_4")?),
        third_equation: third.to_string(),
        integrated_equation: integrated.to_string(),
    })
}

/// Whether `e` contains any jet with a name other than `dep`.
pub fn foreign_jets(e: &Expr, dep: &str) -> bool {
    let mut found = false;
    e.walk(&mut |n| {
        if let Kind::Jet(j) = n.kind() {
            found |= &*j.dep != dep;
        }
    });
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::local_context;
    use crate::expr::parse;

    #[test]
    fn s2_invariants() {
        let g = symmetry::catalog_generator("S2").unwrap();
        let cov = invariants_of(&g, &["xi", "zeta", "eta"], "f").unwrap();
        let got: Vec<String> = cov.new_vars.iter().map(|(n, e)| format!("{n}={e}")).collect();
        assert_eq!(got, ["xi=x", "zeta=z", "eta=t"]);
    }

    #[test]
    fn s8_invariants() {
        let g = symmetry::catalog_generator("S8").unwrap();
        let cov = invariants_of(&g, &["xi", "zeta", "eta"], "f").unwrap();
        let got: Vec<String> = cov.new_vars.iter().map(|(n, e)| format!("{n}={e}")).collect();
        assert_eq!(got, ["xi=-x + y", "zeta=-x + z", "eta=-x + t"]);
    }

    #[test]
    fn s11_ansatz() {
        let g = symmetry::catalog_generator("S11").unwrap();
        let cov = invariants_of(&g, &["Z", "T", "xi"], "f").unwrap();
        let want = parse("-((x + 18*y + 18*z)*t - 9*x)*x/(12*t^2)", &crate::expr::Context::kdv()).unwrap();
        assert_eq!(cov.base, want.expand());
        let xi = &cov.new_vars[2].1;
        assert_eq!(*xi, parse("(t*y - x)/t", &crate::expr::Context::kdv()).unwrap().expand());
    }

    #[test]
    fn unsupported_shape() {
        let g = symmetry::catalog_generator("S7").unwrap();
        assert!(matches!(
            invariants_of(&g, &["a", "b", "c"], "f"),
            Err(ReductionError::UnsupportedShape(_))
        ));
    }

    #[test]
    fn integration() {
        let ctx = local_context(&["rho"], &["h"]);
        let e = parse("2*h_rho*h_rhorho + h_rhorhorho", &ctx).unwrap();
        assert_eq!(integrate_total(&e, "h", "rho").unwrap(), parse("h_rho^2 + h_rhorho", &ctx).unwrap());
        assert!(integrate_total(&parse("h_rho^2", &ctx).unwrap(), "h", "rho").is_none());
    }

    #[test]
    fn proportional_comparison() {
        let ctx = local_context(&["X"], &["f"]);
        let a = parse("2*f_XX - 4*f*f_X", &ctx).unwrap();
        let b = parse("-f_XX + 2*f*f_X", &ctx).unwrap();
        let r = compare_reduced(&a, &b);
        assert!(r.equal);
        assert_eq!(r.lambda.as_deref(), Some("-2"));
        assert!(!compare_reduced(&a, &parse("f_XX", &ctx).unwrap()).equal);
    }
}
