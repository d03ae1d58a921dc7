//! Differential algebra on jet expressions: total derivatives, the Euler
//! operator, prolongation of point generators and on-shell reduction.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use thiserror::Error;

use crate::expr::{DiffError, Expr, JetVar, Kind, MultiIndex, Name, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error(transparent)]
    Diff(#[from] DiffError),
    #[error("equation is not linear in {lead} with a nonzero rational coefficient")]
    NotMonicLinear { lead: String },
    #[error("generator coefficient {0} is not of point-symmetry shape")]
    NotPointShape(String),
    #[error("jet {jet} exceeds the supported order {max}")]
    OrderTooHigh { jet: String, max: u32 },
    #[error("on-shell reduction exceeded the order bound at {0}")]
    NonTermination(String),
}

/// Highest jet order handled by the Euler operator and conserved vectors.
pub const MAX_ORDER: u32 = 6;

const REDUCE_ORDER_BOUND: u32 = 24;

pub fn total_derivative(e: &Expr, var: &Name) -> Result<Expr, JetError> {
    Ok(e.total_diff(var)?)
}

/// `D_J e` for a multi-index `J`.
pub fn total_derivative_by(e: &Expr, index: &MultiIndex) -> Result<Expr, JetError> {
    let mut d = e.clone();
    for v in index.flatten() {
        d = d.total_diff(&v)?.expand();
    }
    Ok(d)
}

/// An equation `lhs = 0` solved for a leading jet it is monic-linear in.
#[derive(Clone, Debug)]
pub struct Equation {
    pub lhs: Expr,
    pub dep: Name,
    pub leading: JetVar,
    /// Value of the leading jet on the equation manifold.
    pub solved: Expr,
}

impl Equation {
    pub fn new(lhs: Expr, leading: JetVar) -> Result<Equation, JetError> {
        let lhs = lhs.expand();
        let c = lhs.partial_jet(&leading)?.expand();
        let coeff = match c.as_num() {
            Some(c) if !c.is_zero() => c.clone(),
            _ => {
                return Err(JetError::NotMonicLinear {
                    lead: Expr::jet(leading).to_string(),
                })
            }
        };
        let lead = Expr::jet(leading.clone());
        let solved = (&lead - lhs.scale(&coeff.recip())).expand();
        if solved.jets().contains(&leading) {
            return Err(JetError::NotMonicLinear {
                lead: lead.to_string(),
            });
        }
        Ok(Equation {
            dep: leading.dep.clone(),
            lhs,
            leading,
            solved,
        })
    }

    /// Coefficient of the leading jet in `lhs`.
    pub fn leading_coefficient(&self) -> Q {
        self.lhs
            .partial_jet(&self.leading)
            .ok()
            .and_then(|c| c.as_num().cloned())
            .unwrap_or_else(Q::zero)
    }

    pub fn order(&self) -> u32 {
        self.lhs
            .jets()
            .iter()
            .filter(|j| j.dep == self.dep)
            .map(|j| j.order())
            .max()
            .unwrap_or(0)
    }

    /// True if `j` is the leading jet or one of its derivatives.
    pub fn is_principal(&self, j: &JetVar) -> bool {
        j.dep == self.leading.dep && j.index.dominates(&self.leading.index)
    }
}

/// A point vector field `xi^i d/dx^i + eta^a d/du^a`.
#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub indep: Vec<Name>,
    pub xi: Vec<Expr>,
    pub dep: Vec<Name>,
    pub eta: Vec<Expr>,
}

impl Generator {
    pub fn new(indep: &[&str], xi: Vec<Expr>, dep: &[&str], eta: Vec<Expr>) -> Result<Generator, JetError> {
        assert_eq!(indep.len(), xi.len());
        assert_eq!(dep.len(), eta.len());
        for c in xi.iter().chain(&eta) {
            if c.jets().iter().any(|j| j.order() > 0) {
                return Err(JetError::NotPointShape(c.to_string()));
            }
        }
        Ok(Generator {
            indep: indep.iter().map(|s| Name::from(*s)).collect(),
            xi,
            dep: dep.iter().map(|s| Name::from(*s)).collect(),
            eta,
        })
    }

    pub fn zero_like(other: &Generator) -> Generator {
        Generator {
            indep: other.indep.clone(),
            xi: vec![Expr::zero(); other.xi.len()],
            dep: other.dep.clone(),
            eta: vec![Expr::zero(); other.eta.len()],
        }
    }

    pub fn coefficients(&self) -> impl Iterator<Item = &Expr> {
        self.xi.iter().chain(&self.eta)
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients().all(|c| c.expand().is_zero())
    }

    pub fn xi_of(&self, var: &str) -> Option<&Expr> {
        self.indep.iter().position(|v| &**v == var).map(|i| &self.xi[i])
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> Generator {
        Generator {
            indep: self.indep.clone(),
            xi: self.xi.iter().map(&f).collect(),
            dep: self.dep.clone(),
            eta: self.eta.iter().map(&f).collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> Generator {
        self.map(|e| e.scale(c).expand())
    }

    pub fn plus(&self, other: &Generator) -> Generator {
        Generator {
            indep: self.indep.clone(),
            xi: self.xi.iter().zip(&other.xi).map(|(a, b)| (a + b).expand()).collect(),
            dep: self.dep.clone(),
            eta: self.eta.iter().zip(&other.eta).map(|(a, b)| (a + b).expand()).collect(),
        }
    }

    /// Applies the vector field to a function of `(x, .., u, ..)`.
    pub fn apply_to(&self, f: &Expr) -> Result<Expr, JetError> {
        let mut terms = Vec::new();
        for (v, c) in self.indep.iter().zip(&self.xi) {
            if !c.is_zero() {
                terms.push(c * f.partial_sym(v)?);
            }
        }
        for (u, c) in self.dep.iter().zip(&self.eta) {
            if !c.is_zero() {
                terms.push(c * f.partial_jet(&JetVar::bare(u.clone()))?);
            }
        }
        Ok(Expr::add(terms).expand())
    }

    /// Characteristic `W^a = eta^a - xi^j u^a_j`, one per dependent variable.
    pub fn characteristic(&self) -> Vec<Expr> {
        self.dep
            .iter()
            .zip(&self.eta)
            .map(|(u, eta)| {
                let mut terms = vec![eta.clone()];
                for (v, c) in self.indep.iter().zip(&self.xi) {
                    terms.push(-(c * Expr::jet(JetVar::bare(u.clone()).diff(v))));
                }
                Expr::add(terms).expand()
            })
            .collect()
    }
}

/// Memoized `D_J(W)` for one characteristic.
pub struct CharacteristicDerivatives {
    cache: HashMap<MultiIndex, Expr>,
}

impl CharacteristicDerivatives {
    pub fn new(w: Expr) -> Self {
        let mut cache = HashMap::new();
        cache.insert(MultiIndex::empty(), w);
        CharacteristicDerivatives { cache }
    }

    pub fn get(&mut self, index: &MultiIndex) -> Result<Expr, JetError> {
        if let Some(e) = self.cache.get(index) {
            return Ok(e.clone());
        }
        let last = index.entries().last().unwrap().0.clone();
        let parent = index.without(&last).unwrap();
        let d = self.get(&parent)?.total_diff(&last)?.expand();
        self.cache.insert(index.clone(), d.clone());
        Ok(d)
    }
}

/// Prolonged coefficient of `jet`: `D_J(W) + xi^i u_{J,i}`.
pub fn prolonged_coefficient(
    g: &Generator,
    derivs: &mut [CharacteristicDerivatives],
    jet: &JetVar,
) -> Result<Expr, JetError> {
    let a = g
        .dep
        .iter()
        .position(|u| *u == jet.dep)
        .expect("jet of a dependent variable of the generator");
    let mut terms = vec![derivs[a].get(&jet.index)?];
    for (v, c) in g.indep.iter().zip(&g.xi) {
        if !c.is_zero() {
            terms.push(c * Expr::jet(jet.diff(v)));
        }
    }
    Ok(Expr::add(terms).expand())
}

/// Every prolonged coefficient of `g` up to the given order.
pub fn prolong_generator(g: &Generator, upto: u32) -> Result<BTreeMap<JetVar, Expr>, JetError> {
    if upto > MAX_ORDER {
        return Err(JetError::OrderTooHigh {
            jet: format!("order {upto}"),
            max: MAX_ORDER,
        });
    }
    let mut derivs: Vec<_> = g.characteristic().into_iter().map(CharacteristicDerivatives::new).collect();
    let mut indices = vec![MultiIndex::empty()];
    let mut frontier = std::collections::BTreeSet::from([MultiIndex::empty()]);
    for _ in 0..upto {
        let next: std::collections::BTreeSet<MultiIndex> = frontier
            .iter()
            .flat_map(|idx| g.indep.iter().map(move |v| idx.with(v, 1)))
            .collect();
        indices.extend(next.iter().cloned());
        frontier = next;
    }
    let mut out = BTreeMap::new();
    for u in &g.dep {
        for idx in &indices {
            let j = JetVar::new(u.clone(), idx.clone());
            let c = prolonged_coefficient(g, &mut derivs, &j)?;
            out.insert(j, c);
        }
    }
    Ok(out)
}

/// Variational derivative `sum_J (-D)_J dL/du_J`.
pub fn euler_operator(l: &Expr, dep: &str) -> Result<Expr, JetError> {
    let l = l.expand();
    let mut terms = Vec::new();
    for j in l.jets() {
        if &*j.dep != dep {
            continue;
        }
        if j.order() > MAX_ORDER {
            return Err(JetError::OrderTooHigh {
                jet: Expr::jet(j).to_string(),
                max: MAX_ORDER,
            });
        }
        let p = l.partial_jet(&j)?.expand();
        let d = total_derivative_by(&p, &j.index)?;
        terms.push(if j.order() % 2 == 1 { -d } else { d });
    }
    Ok(Expr::add(terms).expand())
}

/// Substitutes leading jets and their derivatives by their values on the
/// manifold of `eqs`, with memoized normal forms.
pub struct OnShell<'a> {
    eqs: &'a [Equation],
    memo: HashMap<JetVar, Expr>,
}

impl<'a> OnShell<'a> {
    pub fn new(eqs: &'a [Equation]) -> Self {
        OnShell {
            eqs,
            memo: HashMap::new(),
        }
    }

    fn principal_of(&self, j: &JetVar) -> Option<&'a Equation> {
        self.eqs.iter().find(|eq| eq.is_principal(j))
    }

    pub fn is_principal(&self, j: &JetVar) -> bool {
        self.principal_of(j).is_some()
    }

    /// Normal form of a single principal jet.
    pub fn normal_form(&mut self, j: &JetVar) -> Result<Expr, JetError> {
        if let Some(e) = self.memo.get(j) {
            return Ok(e.clone());
        }
        if j.order() > REDUCE_ORDER_BOUND {
            return Err(JetError::NonTermination(Expr::jet(j.clone()).to_string()));
        }
        let eq = self.principal_of(j).expect("principal jet");
        let nf = if *j == eq.leading {
            self.reduce(&eq.solved)?
        } else {
            let rest = j.index.sub(&eq.leading.index).unwrap();
            let v = rest.entries().last().unwrap().0.clone();
            let parent = JetVar::new(j.dep.clone(), j.index.without(&v).unwrap());
            let d = self.normal_form(&parent)?.total_diff(&v)?;
            self.reduce(&d)?
        };
        self.memo.insert(j.clone(), nf.clone());
        Ok(nf)
    }

    pub fn reduce(&mut self, e: &Expr) -> Result<Expr, JetError> {
        let mut values = HashMap::new();
        for j in e.jets() {
            if self.is_principal(&j) {
                let nf = self.normal_form(&j)?;
                values.insert(j, nf);
            }
        }
        if values.is_empty() {
            return Ok(e.expand());
        }
        Ok(e.subst_jets(&values).expand())
    }
}

pub fn onshell_reduce(e: &Expr, eqs: &[Equation]) -> Result<Expr, JetError> {
    OnShell::new(eqs).reduce(e)
}

/// Collects `e` (expanded) as a polynomial in the jets selected by `is_coord`:
/// maps each monomial in those jets to its coefficient.
pub fn collect_by_jets(e: &Expr, is_coord: impl Fn(&JetVar) -> bool) -> BTreeMap<Expr, Expr> {
    let mut acc: BTreeMap<Expr, Vec<Expr>> = BTreeMap::new();
    for t in e.expand().terms() {
        let mut mono = Vec::new();
        let mut coeff = Vec::new();
        for f in t.factors() {
            let (b, _) = f.base_exp();
            match b.kind() {
                Kind::Jet(j) if is_coord(j) => mono.push(f.clone()),
                _ => coeff.push(f.clone()),
            }
        }
        acc.entry(Expr::mul(mono)).or_default().push(Expr::mul(coeff));
    }
    acc.into_iter()
        .map(|(m, cs)| (m, Expr::add(cs)))
        .filter(|(_, c)| !c.is_zero())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Context};

    fn p(s: &str) -> Expr {
        parse(s, &Context::kdv()).unwrap()
    }

    fn kdv() -> Equation {
        Equation::new(p("u_t - 6*u*u_x + u_xxx"), JetVar::of("u", &["x", "x", "x"])).unwrap()
    }

    #[test]
    fn euler_examples() {
        assert_eq!(euler_operator(&p("u_x^2/2"), "u").unwrap(), p("-u_xx"));
        let e = euler_operator(&p("v*(u_t - 6*u*u_x + u_xxx)"), "u").unwrap();
        assert_eq!(e, p("-v_t + 6*u*v_x - v_xxx"));
    }

    #[test]
    fn onshell_examples() {
        let eq = kdv();
        assert!(onshell_reduce(&eq.lhs, std::slice::from_ref(&eq)).unwrap().is_zero());
        let d = total_derivative(&eq.lhs, &"t".into()).unwrap();
        assert!(onshell_reduce(&d, std::slice::from_ref(&eq)).unwrap().is_zero());
        let plain = p("u_xx*u_t");
        assert_eq!(onshell_reduce(&plain, std::slice::from_ref(&eq)).unwrap(), plain);
    }

    #[test]
    fn prolongation_of_translation_vanishes() {
        let g = Generator::new(
            &["x", "t"],
            vec![Expr::one(), Expr::zero()],
            &["u"],
            vec![Expr::zero()],
        )
        .unwrap();
        for (_, c) in prolong_generator(&g, 3).unwrap() {
            assert!(c.is_zero());
        }
    }

    #[test]
    fn point_shape_enforced() {
        let bad = Generator::new(&["x"], vec![p("u_x")], &["u"], vec![Expr::zero()]);
        assert!(matches!(bad, Err(JetError::NotPointShape(_))));
    }
}
