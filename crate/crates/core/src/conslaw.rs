//! Conserved vectors from the formal Lagrangian `L = v * lhs` and their
//! on-shell divergence check.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::catalog::{self, CatalogError};
use crate::expr::{Env, Expr, JetVar, MultiIndex, Name, Q};
use crate::jetcalc::{euler_operator, total_derivative_by, Equation, Generator, JetError, OnShell, MAX_ORDER};
use crate::symmetry::{self, SymmetryError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConsLawError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("evaluation failed: {0}")]
    Eval(String),
}

/// Name of the adjoint dependent variable.
pub const ADJOINT_VAR: &str = "v";

/// Component labels, in output order.
pub const COMPONENTS: [&str; 4] = ["t", "x", "y", "z"];

#[derive(Debug, Clone, PartialEq)]
pub struct ConservedVector {
    /// Components keyed by the independent variable, in `COMPONENTS` order.
    pub components: Vec<(Name, Expr)>,
}

impl ConservedVector {
    pub fn get(&self, var: &str) -> Option<&Expr> {
        self.components.iter().find(|(n, _)| &**n == var).map(|(_, e)| e)
    }

    pub fn divergence(&self) -> Result<Expr, ConsLawError> {
        let mut terms = Vec::new();
        for (n, e) in &self.components {
            terms.push(e.total_diff(n).map_err(JetError::from)?);
        }
        Ok(Expr::add(terms).expand())
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|(_, e)| e.is_zero())
    }

    pub fn scale(&self, c: &Q) -> ConservedVector {
        ConservedVector {
            components: self.components.iter().map(|(n, e)| (n.clone(), e.scale(c))).collect(),
        }
    }

    pub fn plus(&self, other: &ConservedVector) -> ConservedVector {
        ConservedVector {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|((n, a), (_, b))| (n.clone(), (a + b).expand()))
                .collect(),
        }
    }
}

pub fn lagrangian(eq: &Equation) -> Expr {
    (Expr::jet(JetVar::bare(ADJOINT_VAR)) * &eq.lhs).expand()
}

/// `E_q(v * lhs) = 0`, solved for `v` with the leading index of `eq`.
pub fn adjoint_equation(eq: &Equation) -> Result<Equation, ConsLawError> {
    let e = euler_operator(&lagrangian(eq), &eq.dep)?;
    let leading = JetVar::new(ADJOINT_VAR, eq.leading.index.clone());
    Ok(Equation::new(e, leading)?)
}

/// Conserved vector of `g` by the symmetrized formula: for each jet
/// `q_M` of `L` and each split `M = i + J + K`, the term
/// `(-1)^|K| N(J) N(K) / N(M) * D_J(W) * D_K(dL/dq_M)` contributes to `T^i`,
/// with `N` the number of orderings of a multi-index.
pub fn conserved_vector(g: &Generator, eq: &Equation) -> Result<ConservedVector, ConsLawError> {
    let l = lagrangian(eq);
    let dep = &eq.dep;
    let a = g.dep.iter().position(|d| d == dep).expect("generator acts on the equation's variable");
    let w = &g.characteristic()[a];
    let mut dw = Derivatives::new(w.clone());
    let mut dl: HashMap<(JetVar, MultiIndex), Expr> = HashMap::new();
    let mut out = Vec::new();
    for var in COMPONENTS {
        let v: Name = var.into();
        let i = g.indep.iter().position(|n| *n == v).expect("generator on (t, x, y, z)");
        let mut terms = vec![(&g.xi[i] * &l).expand()];
        for j in l.jets() {
            if j.dep != *dep || j.index.count(var) == 0 {
                continue;
            }
            if j.order() > MAX_ORDER {
                return Err(JetError::OrderTooHigh {
                    jet: Expr::jet(j).to_string(),
                    max: MAX_ORDER,
                }
                .into());
            }
            let rest = j.index.without(var).unwrap();
            let n_m = Q::from_integer(j.index.multinomial());
            for jj in rest.sub_indices() {
                let kk = rest.sub(&jj).unwrap();
                let weight = Q::from_integer(jj.multinomial() * kk.multinomial()) / &n_m;
                let weight = if kk.order() % 2 == 1 { -weight } else { weight };
                let key = (j.clone(), kk.clone());
                let dk = match dl.get(&key) {
                    Some(e) => e.clone(),
                    None => {
                        let p = l.partial_jet(&j).map_err(JetError::from)?.expand();
                        let e = total_derivative_by(&p, &kk)?;
                        dl.insert(key, e.clone());
                        e
                    }
                };
                let dwj = dw.get(&jj)?;
                if dwj.is_zero() || dk.is_zero() {
                    continue;
                }
                terms.push((dwj * dk).scale(&weight));
            }
        }
        out.push((v, Expr::add(terms).expand()));
    }
    Ok(ConservedVector { components: out })
}

struct Derivatives {
    memo: HashMap<MultiIndex, Expr>,
}

impl Derivatives {
    fn new(base: Expr) -> Self {
        let mut memo = HashMap::new();
        memo.insert(MultiIndex::empty(), base.expand());
        Derivatives { memo }
    }

    fn get(&mut self, idx: &MultiIndex) -> Result<Expr, ConsLawError> {
        if let Some(e) = self.memo.get(idx) {
            return Ok(e.clone());
        }
        let last = idx.entries().last().unwrap().0.clone();
        let parent = idx.without(&last).unwrap();
        let d = self.get(&parent)?.total_diff(&last).map_err(JetError::from)?.expand();
        self.memo.insert(idx.clone(), d.clone());
        Ok(d)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DivergenceReport {
    pub mode: &'static str,
    pub residual: String,
    /// Surviving monomials, at most ten, when the symbolic residual is nonzero.
    pub surviving: Vec<String>,
    pub max_relative: Option<f64>,
    pub pass: bool,
}

/// Divergence reduced modulo `eqs` and all their differential consequences.
pub fn onshell_divergence_check(t: &ConservedVector, eqs: &[Equation]) -> Result<DivergenceReport, ConsLawError> {
    let div = t.divergence()?;
    let r = OnShell::new(eqs).reduce(&div)?;
    Ok(DivergenceReport {
        mode: "symbolic",
        residual: r.to_string(),
        surviving: if r.is_zero() {
            Vec::new()
        } else {
            r.terms().iter().take(10).map(ToString::to_string).collect()
        },
        max_relative: None,
        pass: r.is_zero(),
    })
}

/// Numeric variant: non-principal jets drawn uniformly in `[-1, 1]`,
/// principal jets evaluated from their normal forms.
pub fn onshell_divergence_numeric(
    t: &ConservedVector,
    eqs: &[Equation],
    seed: u64,
    samples: usize,
    tol: f64,
) -> Result<DivergenceReport, ConsLawError> {
    let div = t.divergence()?;
    let mut shell = OnShell::new(eqs);
    let mut normal: BTreeMap<JetVar, Expr> = BTreeMap::new();
    let mut free: Vec<JetVar> = Vec::new();
    let mut syms: Vec<Name> = div.symbols().into_iter().collect();
    for j in div.jets() {
        if shell.is_principal(&j) {
            let nf = shell.normal_form(&j)?;
            free.extend(nf.jets());
            syms.extend(nf.symbols());
            normal.insert(j, nf);
        } else {
            free.push(j);
        }
    }
    free.sort();
    free.dedup();
    syms.sort();
    syms.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let mut env = Env::new();
        for s in &syms {
            if &**s != "pi" && &**s != "I" {
                env.syms.insert(s.clone(), Complex64::new(rng.gen_range(0.5..1.5), 0.0));
            }
        }
        for j in &free {
            env.jets.insert(j.clone(), Complex64::new(rng.gen_range(-1.0..1.0), 0.0));
        }
        let mut scale = 1.0f64;
        for (j, nf) in &normal {
            let val = nf.eval(&env).map_err(|e| ConsLawError::Eval(e.to_string()))?;
            scale = scale.max(val.norm());
            env.jets.insert(j.clone(), val);
        }
        let mut total = Complex64::new(0.0, 0.0);
        for term in div.terms() {
            let v = term.eval(&env).map_err(|e| ConsLawError::Eval(e.to_string()))?;
            scale = scale.max(v.norm());
            total += v;
        }
        worst = worst.max(total.norm() / scale);
    }
    Ok(DivergenceReport {
        mode: "numeric",
        residual: format!("{worst:.3e}"),
        surviving: Vec::new(),
        max_relative: Some(worst),
        pass: worst < tol,
    })
}

/// `Delta` and its adjoint.
pub fn system() -> Result<(Equation, Equation), ConsLawError> {
    let eq = symmetry::potential_equation()?;
    let adj = adjoint_equation(&eq)?;
    Ok((eq, adj))
}

/// Generator used for the conserved vector `T<n>`: the printed list, in
/// which `S5 = t d/dq`.
pub fn printed_generator(n: usize) -> Result<Generator, ConsLawError> {
    Ok(symmetry::catalog_generator(&format!("S{n}"))?)
}

/// A printed component `T<n>_<var>`, if transcribed.
pub fn printed_component(n: usize, var: &str) -> Option<Expr> {
    catalog::conserved().expr(&format!("T{n}_{var}")).ok()
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentComparison {
    pub component: String,
    pub exact: bool,
    pub max_relative: f64,
    /// Generated minus printed, when they differ.
    pub difference: Option<String>,
}

/// Compares generated components against printed ones at random jet
/// points (off-shell).
pub fn compare_components(
    generated: &ConservedVector,
    n: usize,
    seed: u64,
    points: usize,
) -> Result<Vec<ComponentComparison>, ConsLawError> {
    let printed: Vec<(Name, Expr)> = COMPONENTS
        .iter()
        .filter_map(|v| printed_component(n, v).map(|e| (Name::from(*v), e)))
        .collect();
    compare_against(generated, &printed, &format!("T{n}"), seed, points)
}

/// Compares generated components against `reference`, keyed by component
/// variable. Components missing from `reference` are skipped.
pub fn compare_against(
    generated: &ConservedVector,
    reference: &[(Name, Expr)],
    label: &str,
    seed: u64,
    points: usize,
) -> Result<Vec<ComponentComparison>, ConsLawError> {
    let mut out = Vec::new();
    for (var, e) in &generated.components {
        let Some((_, p)) = reference.iter().find(|(v, _)| v == var) else {
            continue;
        };
        let diff = (e - p).expand();
        let exact = diff.is_zero();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        let jets: Vec<JetVar> = e.jets().union(&p.jets()).cloned().collect();
        let syms: Vec<Name> = e.symbols().union(&p.symbols()).cloned().collect();
        for _ in 0..points {
            let mut env = Env::new();
            for s in &syms {
                env.syms.insert(s.clone(), Complex64::new(rng.gen_range(0.5..1.5), 0.0));
            }
            for j in &jets {
                env.jets.insert(j.clone(), Complex64::new(rng.gen_range(-1.0..1.0), 0.0));
            }
            let a = e.eval(&env).map_err(|e| ConsLawError::Eval(e.to_string()))?;
            let b = p.eval(&env).map_err(|e| ConsLawError::Eval(e.to_string()))?;
            worst = worst.max((a - b).norm() / a.norm().max(b.norm()).max(1e-300));
        }
        out.push(ComponentComparison {
            component: format!("{label}_{var}"),
            exact,
            max_relative: worst,
            difference: (!exact).then(|| diff.to_string()),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Context};

    fn p(s: &str) -> Expr {
        parse(s, &Context::kdv()).unwrap()
    }

    #[test]
    fn classical_adjoint() {
        let eq = Equation::new(p("u_t - 6*u*u_x + u_xxx"), JetVar::of("u", &["x", "x", "x"])).unwrap();
        let adj = adjoint_equation(&eq).unwrap();
        assert_eq!(adj.lhs, p("-v_t + 6*u*v_x - v_xxx"));
    }

    #[test]
    fn divergence_lagrangian_has_zero_adjoint() {
        let e = p("q_x*q_yy + q^2*q_xz").total_diff(&"x".into()).unwrap();
        assert!(euler_operator(&e, "q").unwrap().is_zero());
    }

    #[test]
    fn zero_generator_gives_zero_vector() {
        let (eq, _) = system().unwrap();
        let g = Generator::zero_like(&printed_generator(1).unwrap());
        assert!(conserved_vector(&g, &eq).unwrap().is_zero());
    }

    #[test]
    fn trivial_vector_is_divergence_free() {
        let h = p("q_xy*v_z + q^2*v_t");
        let t = ConservedVector {
            components: vec![
                ("t".into(), h.total_diff(&"x".into()).unwrap()),
                ("x".into(), -h.total_diff(&"t".into()).unwrap()),
                ("y".into(), Expr::zero()),
                ("z".into(), Expr::zero()),
            ],
        };
        assert!(t.divergence().unwrap().is_zero());
    }

    #[test]
    fn printed_s5_time_component() {
        let (eq, _) = system().unwrap();
        let t5 = conserved_vector(&printed_generator(5).unwrap(), &eq).unwrap();
        assert_eq!(*t5.get("t").unwrap(), printed_component(5, "t").unwrap());
    }
}
