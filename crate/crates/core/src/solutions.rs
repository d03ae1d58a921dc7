//! Closed-form solutions: residual verification against the potential
//! equation and numeric grids for plotting.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::catalog::{self, CatalogError};
use crate::expr::{parse, Builtin, Context, DiffError, Env, EvalError, Expr, Func, Kind, Name, SubstError};
use crate::jetcalc::Equation;
use crate::symmetry::{self, SymmetryError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolutionError {
    #[error("unknown solution `{0}`")]
    Unknown(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error(transparent)]
    Diff(#[from] DiffError),
    #[error(transparent)]
    Subst(#[from] SubstError),
    #[error("could not find a regular sample point after {0} attempts")]
    Singular(usize),
    #[error("unresolved special function: {0}")]
    Unresolved(String),
    #[error("{0} is complex-valued on real slices; pass --complex to split real and imaginary parts")]
    ComplexValued(String),
    #[error("bad parameter `{0}`")]
    BadParameter(String),
    #[error("bad slice: {0}")]
    BadSlice(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Symbolic,
    Numeric,
    RewriteRule,
    Excluded,
}

/// An arbitrary function replaced by a concrete body.
#[derive(Debug, Clone)]
pub struct Instantiation {
    pub name: &'static str,
    pub params: &'static [&'static str],
    pub body: &'static str,
}

#[derive(Debug, Clone)]
pub struct ClosedFormSolution {
    pub name: &'static str,
    pub q: Option<Expr>,
    pub u: Expr,
    pub mode: Mode,
    /// Constants drawn at random for numeric checks.
    pub params: &'static [&'static str],
    /// Values used for grids unless overridden.
    pub defaults: &'static [(&'static str, f64)],
    /// Concrete choices for arbitrary functions, for numeric work.
    pub functions: Vec<Vec<Instantiation>>,
    /// Numeric samples of `t` are drawn from `(0.5, 2)` rather than `(-1, 1)`.
    pub positive_t: bool,
    /// Sample points must satisfy `|expr| <= bound`.
    pub bounded: Option<(&'static str, f64)>,
    pub complex: bool,
}

pub const NAMES: [&str; 7] = ["kdvsol1", "kdvsol2", "kdvsol3", "kdvsol4", "kdvsol5", "kdvsol6", "kdvsol7"];

const KDVSOL6_PLOT: [Instantiation; 3] = [
    Instantiation { name: "F2", params: &["t"], body: "0" },
    Instantiation { name: "F3", params: &["t"], body: "3/t^4" },
    Instantiation { name: "F4", params: &["t"], body: "1/cosh(t)" },
];

const KDVSOL6_SMOOTH: [Instantiation; 3] = [
    Instantiation { name: "F2", params: &["t"], body: "cos(2*t) + t^3" },
    Instantiation { name: "F3", params: &["t"], body: "exp(-t)*sin(3*t)" },
    Instantiation { name: "F4", params: &["t"], body: "tanh(t/2) + 1/t" },
];

const KDVSOL1_PLOT: [Instantiation; 4] = [
    Instantiation { name: "F1", params: &["z", "t"], body: "1/cosh(z - t)" },
    Instantiation { name: "F2", params: &["z", "t"], body: "0" },
    Instantiation { name: "F3", params: &["x", "t"], body: "Si(x/z)" },
    Instantiation { name: "F4", params: &["x", "z"], body: "cos(z - x)" },
];

pub fn solution(name: &str) -> Result<ClosedFormSolution, SolutionError> {
    let cat = catalog::solutions();
    let q = |n: &str| cat.expr(&format!("{n}_q")).map(Some);
    let u = |n: &str| cat.expr(n);
    let base = |name: &'static str, mode: Mode| -> Result<ClosedFormSolution, SolutionError> {
        Ok(ClosedFormSolution {
            name,
            q: if name == "kdvsol5" { None } else { q(name)? },
            u: u(name)?,
            mode,
            params: &[],
            defaults: &[],
            functions: Vec::new(),
            positive_t: false,
            bounded: None,
            complex: false,
        })
    };
    Ok(match name {
        "kdvsol1" => ClosedFormSolution {
            functions: vec![KDVSOL1_PLOT.to_vec()],
            defaults: &[("z", 10.0)],
            ..base("kdvsol1", Mode::Symbolic)?
        },
        "kdvsol2" => ClosedFormSolution {
            params: &["alpha1", "alpha2"],
            defaults: &[("alpha1", 0.5), ("alpha2", 0.0), ("z", 0.1)],
            ..base("kdvsol2", Mode::Symbolic)?
        },
        "kdvsol3" => ClosedFormSolution {
            params: &["c1", "c2", "c3", "c4"],
            defaults: &[("c1", 1.0), ("c2", 1.0), ("c3", 1.0), ("c4", 1.0)],
            bounded: Some(("c4*(-4*x + 2*y + z + t) + c3", 1.0)),
            ..base("kdvsol3", Mode::Numeric)?
        },
        "kdvsol4" => ClosedFormSolution {
            params: &["c1", "c2", "c4", "c5"],
            defaults: &[("c1", 1.0), ("c2", 5.0), ("c3", 0.0), ("c4", 19.0), ("c5", 1.0), ("z", 1.0)],
            ..base("kdvsol4", Mode::RewriteRule)?
        },
        "kdvsol5" => ClosedFormSolution {
            params: &["c1", "c2", "c3", "c4", "c5", "c6"],
            defaults: &[("c1", 0.5), ("c2", 1.0), ("c3", 1.0), ("c4", 1.0), ("c5", 1.0), ("c6", 1.0)],
            complex: true,
            ..base("kdvsol5", Mode::Excluded)?
        },
        "kdvsol6" => ClosedFormSolution {
            functions: vec![KDVSOL6_PLOT.to_vec(), KDVSOL6_SMOOTH.to_vec()],
            positive_t: true,
            ..base("kdvsol6", Mode::Numeric)?
        },
        "kdvsol7" => ClosedFormSolution {
            params: &["c1", "c2"],
            defaults: &[("c1", 1.0), ("c2", 0.0)],
            ..base("kdvsol7", Mode::Numeric)?
        },
        _ => return Err(SolutionError::Unknown(name.into())),
    })
}

fn instantiate(e: &Expr, funcs: &[Instantiation]) -> Result<Expr, SolutionError> {
    let mut out = e.clone();
    for f in funcs {
        let ctx = Context::kdv();
        let body = parse(f.body, &ctx).map_err(|e| SolutionError::BadParameter(e.to_string()))?;
        let params: Vec<Name> = f.params.iter().map(|p| Name::from(*p)).collect();
        out = out.subst_func(f.name, &params, &body)?;
    }
    Ok(out)
}

/// `(P')^2 = 4 P^3 - g2 P - g3` applied to every power of `P'`.
pub fn weierstrass_rewrite(e: &Expr) -> Expr {
    let rule = |f: &Expr| -> Option<Expr> {
        let (b, k) = f.base_exp();
        match b.kind() {
            Kind::Apply(Func::Builtin(Builtin::WeierstrassPPrime), args) if k >= 2 => {
                let p = Expr::apply(Func::Builtin(Builtin::WeierstrassP), args.clone());
                let sq = Expr::int(4) * p.pow(3) - &args[1] * &p - &args[2];
                Some(b.pow(k % 2) * sq.pow(k / 2))
            }
            _ => None,
        }
    };
    let mut out = e.expand();
    loop {
        let next = Expr::add(
            out.terms()
                .iter()
                .map(|t| Expr::mul(t.factors().iter().map(|f| rule(f).unwrap_or_else(|| f.clone())))),
        )
        .expand();
        if next == out {
            return out;
        }
        out = next;
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DrawReport {
    pub parameters: BTreeMap<String, f64>,
    pub functions: Option<usize>,
    pub max_relative: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolutionReport {
    pub name: String,
    pub mode: Mode,
    pub pass: bool,
    /// Canonical residual for symbolic modes.
    pub residual: Option<String>,
    pub draws: Vec<DrawReport>,
    /// `D_x q - u` check.
    pub consistency: Option<Consistency>,
    /// Residual with arbitrary functions left abstract, when the numeric
    /// mode instantiates them.
    pub abstract_residual_zero: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Consistency {
    pub mode: Mode,
    pub pass: bool,
    pub max_relative: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub seed: u64,
    pub tolerance: f64,
    pub points: usize,
    pub draws: usize,
    /// Fixed parameter values; drawn ones are replaced.
    pub params: HashMap<String, f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 0,
            tolerance: 1e-8,
            points: 100,
            draws: 5,
            params: HashMap::new(),
        }
    }
}

fn residual_symbolic(eq: &Equation, q: &Expr) -> Result<Expr, SolutionError> {
    Ok(eq.lhs.subst_dep("q", q)?.expand())
}

struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    /// Nonzero constant in `[-2, -1/4] U [1/4, 2]`.
    fn constant(&mut self) -> f64 {
        let m = self.rng.gen_range(0.25..2.0);
        if self.rng.gen_bool(0.5) {
            m
        } else {
            -m
        }
    }

    fn coordinate(&mut self, var: &str, positive_t: bool) -> f64 {
        if var == "t" && positive_t {
            self.rng.gen_range(0.5..2.0)
        } else {
            self.rng.gen_range(-1.0..1.0)
        }
    }
}

/// Max over points of `|sum of terms| / max |term|` for `lhs` on `q`.
fn residual_numeric(
    eq: &Equation,
    q: &Expr,
    params: &BTreeMap<String, f64>,
    sampler: &mut Sampler,
    points: usize,
    positive_t: bool,
    bounded: Option<&(Expr, f64)>,
) -> Result<f64, SolutionError> {
    let mut derivs: HashMap<crate::expr::MultiIndex, Expr> = HashMap::new();
    let jets: Vec<_> = eq.lhs.jets().into_iter().collect();
    for j in &jets {
        let mut d = q.clone();
        for v in j.index.flatten() {
            d = d.total_diff(&v)?;
        }
        derivs.insert(j.index.clone(), d);
    }
    let mut worst = 0.0f64;
    let mut done = 0;
    let mut attempts = 0;
    while done < points {
        attempts += 1;
        if attempts > 1000 * points {
            return Err(SolutionError::Singular(attempts));
        }
        let mut env = Env::new();
        for (k, v) in params {
            env.set(k, *v);
        }
        for v in ["x", "y", "z", "t"] {
            let c = sampler.coordinate(v, positive_t);
            env.set(v, c);
        }
        if let Some((e, bound)) = bounded {
            if !e.eval(&env).is_ok_and(|v| v.norm() <= *bound) {
                continue;
            }
        }
        let mut ok = true;
        for j in &jets {
            match derivs[&j.index].eval_finite(&env) {
                Ok(val) => {
                    env.jets.insert(j.clone(), val);
                }
                Err(EvalError::Domain(_)) => {
                    ok = false;
                    break;
                }
                Err(e) => return Err(SolutionError::Unresolved(e.to_string())),
            }
        }
        if !ok {
            continue;
        }
        let mut total = Complex64::zero();
        let mut scale = 0.0f64;
        for t in eq.lhs.terms() {
            let v = t.eval(&env).map_err(|e| SolutionError::Unresolved(e.to_string()))?;
            scale = scale.max(v.norm());
            total += v;
        }
        if !scale.is_finite() {
            continue;
        }
        worst = worst.max(if scale == 0.0 { 0.0 } else { total.norm() / scale });
        done += 1;
    }
    Ok(worst)
}

fn draw_params(s: &ClosedFormSolution, sampler: &mut Sampler, fixed: &HashMap<String, f64>) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    for p in s.params {
        let v = sampler.constant();
        out.insert((*p).to_string(), fixed.get(*p).copied().unwrap_or(v));
    }
    for (k, v) in fixed {
        out.insert(k.clone(), *v);
    }
    out
}

pub fn verify_solution(s: &ClosedFormSolution, opts: &VerifyOptions) -> Result<SolutionReport, SolutionError> {
    let eq = symmetry::potential_equation()?;
    let q = s.q.clone().ok_or_else(|| SolutionError::ComplexValued(s.name.into()))?;
    let mut sampler = Sampler {
        rng: ChaCha8Rng::seed_from_u64(opts.seed),
    };
    let mut report = SolutionReport {
        name: s.name.into(),
        mode: s.mode,
        pass: false,
        residual: None,
        draws: Vec::new(),
        consistency: None,
        abstract_residual_zero: None,
    };
    match s.mode {
        Mode::Symbolic => {
            let r = residual_symbolic(&eq, &q)?;
            report.pass = r.is_zero();
            report.residual = Some(r.to_string());
        }
        Mode::RewriteRule => {
            let r = weierstrass_rewrite(&residual_symbolic(&eq, &q)?);
            report.pass = r.is_zero();
            report.residual = Some(r.to_string());
        }
        Mode::Numeric => {
            if !s.functions.is_empty() {
                report.abstract_residual_zero = Some(residual_symbolic(&eq, &q)?.is_zero());
            }
            let variants: Vec<Option<usize>> = if s.functions.is_empty() {
                vec![None]
            } else {
                (0..s.functions.len()).map(Some).collect()
            };
            let bounded = match s.bounded {
                Some((text, b)) => Some((parse(text, &Context::kdv()).map_err(|e| SolutionError::BadParameter(e.to_string()))?, b)),
                None => None,
            };
            let mut pass = true;
            for k in variants {
                let qk = match k {
                    Some(k) => instantiate(&q, &s.functions[k])?,
                    None => q.clone(),
                };
                let draws = if s.params.is_empty() && k.is_some() { 1 } else { opts.draws };
                for _ in 0..draws {
                    let params = draw_params(s, &mut sampler, &opts.params);
                    let worst = residual_numeric(&eq, &qk, &params, &mut sampler, opts.points, s.positive_t, bounded.as_ref())?;
                    pass &= worst < opts.tolerance;
                    report.draws.push(DrawReport {
                        parameters: params,
                        functions: k,
                        max_relative: worst,
                    });
                }
            }
            report.pass = pass;
        }
        Mode::Excluded => return Err(SolutionError::ComplexValued(s.name.into())),
    }
    report.consistency = Some(consistency(s, &q, &mut sampler, opts)?);
    report.pass &= report.consistency.as_ref().is_none_or(|c| c.pass);
    Ok(report)
}

fn consistency(s: &ClosedFormSolution, q: &Expr, sampler: &mut Sampler, opts: &VerifyOptions) -> Result<Consistency, SolutionError> {
    let d = (q.total_diff(&"x".into())? - &s.u).expand();
    let d = if s.mode == Mode::RewriteRule { weierstrass_rewrite(&d) } else { d };
    if d.is_zero() || !matches!(s.mode, Mode::Numeric) {
        return Ok(Consistency {
            mode: Mode::Symbolic,
            pass: d.is_zero(),
            max_relative: None,
        });
    }
    let funcs = s.functions.first().cloned().unwrap_or_default();
    let dq = instantiate(&q.total_diff(&"x".into())?, &funcs)?;
    let u = instantiate(&s.u, &funcs)?;
    let params = draw_params(s, sampler, &opts.params);
    let mut worst = 0.0f64;
    for _ in 0..opts.points {
        let mut env = Env::new();
        for (k, v) in &params {
            env.set(k, *v);
        }
        for v in ["x", "y", "z", "t"] {
            let c = sampler.coordinate(v, s.positive_t);
            env.set(v, c);
        }
        let (Ok(a), Ok(b)) = (dq.eval_finite(&env), u.eval_finite(&env)) else {
            continue;
        };
        worst = worst.max((a - b).norm() / a.norm().max(b.norm()).max(1e-300));
    }
    Ok(Consistency {
        mode: Mode::Numeric,
        pass: worst < opts.tolerance,
        max_relative: Some(worst),
    })
}

/// Two fixed coordinates and a lattice over the other two.
#[derive(Debug, Clone)]
pub struct Slice {
    pub fixed: Vec<(String, f64)>,
    /// `(var, lo, hi, count)` for the first and second lattice axes.
    pub axes: [(String, f64, f64, usize); 2],
}

#[derive(Debug, Clone, Serialize)]
pub struct Grid {
    pub axes: [String; 2],
    /// Rows `(v1, v2, u)` or `(v1, v2, re u, im u)` when complex.
    pub rows: Vec<Vec<f64>>,
    pub complex: bool,
}

impl Grid {
    pub fn header(&self) -> Vec<&'static str> {
        if self.complex {
            vec!["v1", "v2", "re_u", "im_u"]
        } else {
            vec!["v1", "v2", "u"]
        }
    }
}

pub fn emit_grid(
    s: &ClosedFormSolution,
    slice: &Slice,
    overrides: &HashMap<String, f64>,
    complex: bool,
) -> Result<Grid, SolutionError> {
    if s.complex && !complex {
        return Err(SolutionError::ComplexValued(s.name.into()));
    }
    let mut vars: Vec<&str> = slice.fixed.iter().map(|(v, _)| v.as_str()).collect();
    vars.extend(slice.axes.iter().map(|a| a.0.as_str()));
    let mut sorted = vars.clone();
    sorted.sort();
    if sorted != ["t", "x", "y", "z"] {
        return Err(SolutionError::BadSlice(format!("slice must cover x, y, z, t exactly once, got {vars:?}")));
    }
    let funcs = s.functions.first().cloned().unwrap_or_default();
    let u = instantiate(&s.u, &funcs)?;
    let mut env = Env::new();
    for (k, v) in s.defaults {
        env.set(k, *v);
    }
    for p in s.params {
        if !env.syms.contains_key(*p) {
            env.set(p, 1.0);
        }
    }
    for (k, v) in overrides {
        env.set(k, *v);
    }
    for (k, v) in &slice.fixed {
        env.set(k, *v);
    }
    let step = |lo: f64, hi: f64, n: usize, i: usize| if n <= 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 };
    let [(a, alo, ahi, an), (b, blo, bhi, bn)] = &slice.axes;
    let mut rows = Vec::with_capacity(an * bn);
    for i in 0..*an {
        for j in 0..*bn {
            let (va, vb) = (step(*alo, *ahi, *an, i), step(*blo, *bhi, *bn, j));
            env.set(a, va);
            env.set(b, vb);
            let val = u.eval(&env).map_err(|e| match e {
                EvalError::UnsupportedFunction(f) => SolutionError::Unresolved(f),
                e => SolutionError::Unresolved(e.to_string()),
            })?;
            rows.push(if complex { vec![va, vb, val.re, val.im] } else { vec![va, vb, val.re] });
        }
    }
    Ok(Grid {
        axes: [a.clone(), b.clone()],
        rows,
        complex,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weierstrass_square_rule() {
        let ctx = Context::kdv();
        let e = parse("WeierstrassPPrime(x, 0, g3)^3", &ctx).unwrap();
        let want = parse("WeierstrassPPrime(x, 0, g3)*(4*WeierstrassP(x, 0, g3)^3 - g3)", &ctx).unwrap();
        assert_eq!(weierstrass_rewrite(&e), want.expand());
    }

    #[test]
    fn kdvsol7_value_at_origin() {
        let s = solution("kdvsol7").unwrap();
        let slice = Slice {
            fixed: vec![("y".into(), 0.0), ("z".into(), 0.0)],
            axes: [("x".into(), 0.0, 0.0, 1), ("t".into(), 0.0, 0.0, 1)],
        };
        let over = HashMap::from([("c1".to_string(), 0.0)]);
        let g = emit_grid(&s, &slice, &over, false).unwrap();
        assert!((g.rows[0][2] + 0.75).abs() < 1e-12);
    }

    #[test]
    fn kdvsol5_refused() {
        let s = solution("kdvsol5").unwrap();
        let slice = Slice {
            fixed: vec![("y".into(), 0.0), ("z".into(), 0.0)],
            axes: [("x".into(), -1.0, 1.0, 3), ("t".into(), 0.5, 1.0, 3)],
        };
        assert!(matches!(emit_grid(&s, &slice, &HashMap::new(), false), Err(SolutionError::ComplexValued(_))));
        assert_eq!(emit_grid(&s, &slice, &HashMap::new(), true).unwrap().rows.len(), 9);
    }
}
