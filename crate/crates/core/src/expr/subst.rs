//! Substitution of symbols, whole dependent variables and arbitrary functions.

use std::collections::HashMap;

use thiserror::Error;

use super::diff::DiffError;
use super::{Expr, Func, JetVar, Kind, Name};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error("jet-only substitution unsupported: {0}")]
    JetOnly(String),
    #[error("substitution target must be a symbol or a dependent variable, got {0}")]
    BadTarget(String),
    #[error(transparent)]
    Diff(#[from] DiffError),
}

impl Expr {
    /// Replaces a bare symbol or a whole dependent variable.
    ///
    /// Replacing a dependent variable maps each of its jets `u_J` to `D_J`
    /// of the replacement.
    pub fn substitute(&self, target: &Expr, replacement: &Expr) -> Result<Expr, SubstError> {
        match target.kind() {
            Kind::Sym(s) => Ok(self.subst_sym(s, replacement)),
            Kind::Jet(j) if j.index.is_empty() => self.subst_dep(&j.dep, replacement),
            Kind::Jet(_) => Err(SubstError::JetOnly(target.to_string())),
            _ => Err(SubstError::BadTarget(target.to_string())),
        }
    }

    pub fn subst_sym(&self, name: &str, value: &Expr) -> Expr {
        self.map_leaves(&mut |e| match e.kind() {
            Kind::Sym(s) if &**s == name => Some(value.clone()),
            _ => None,
        })
    }

    pub fn subst_syms(&self, values: &HashMap<Name, Expr>) -> Expr {
        if values.is_empty() {
            return self.clone();
        }
        self.map_leaves(&mut |e| match e.kind() {
            Kind::Sym(s) => values.get(s).cloned(),
            _ => None,
        })
    }

    pub fn subst_dep(&self, dep: &str, value: &Expr) -> Result<Expr, SubstError> {
        let mut cache: HashMap<JetVar, Expr> = HashMap::new();
        let mut err = None;
        let out = self.map_leaves(&mut |e| match e.kind() {
            Kind::Jet(j) if &*j.dep == dep => {
                if let Some(v) = cache.get(j) {
                    return Some(v.clone());
                }
                let mut d = value.clone();
                for v in j.index.flatten() {
                    match d.total_diff(&v) {
                        Ok(x) => d = x,
                        Err(e) => {
                            err = Some(e);
                            return None;
                        }
                    }
                }
                cache.insert(j.clone(), d.clone());
                Some(d)
            }
            _ => None,
        });
        match err {
            Some(e) => Err(e.into()),
            None => Ok(out),
        }
    }

    /// Replaces jets by looking them up in `values`; unmatched jets stay.
    pub fn subst_jets(&self, values: &HashMap<JetVar, Expr>) -> Expr {
        self.map_leaves(&mut |e| match e.kind() {
            Kind::Jet(j) => values.get(j).cloned(),
            _ => None,
        })
    }

    /// Replaces every application of the arbitrary function `name` (and its
    /// derivatives) by `body` with `params` bound to the call arguments.
    pub fn subst_func(&self, name: &str, params: &[Name], body: &Expr) -> Result<Expr, SubstError> {
        Ok(match self.kind() {
            Kind::Num(_) | Kind::Sym(_) | Kind::Jet(_) => self.clone(),
            Kind::Add(ts) => Expr::add(
                ts.iter()
                    .map(|t| t.subst_func(name, params, body))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
            Kind::Mul(fs) => Expr::mul(
                fs.iter()
                    .map(|t| t.subst_func(name, params, body))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
            Kind::Pow(b, n) => b.subst_func(name, params, body)?.pow(*n),
            Kind::Int(e, v) => Expr::integral(&e.subst_func(name, params, body)?, v),
            Kind::Apply(f, args) => {
                let args = args
                    .iter()
                    .map(|a| a.subst_func(name, params, body))
                    .collect::<Result<Vec<_>, _>>()?;
                match f {
                    Func::Named { name: n, derivs } if &**n == name => {
                        let mut d = body.clone();
                        for (slot, k) in derivs.iter().enumerate() {
                            for _ in 0..*k {
                                d = d.partial_sym(&params[slot])?;
                            }
                        }
                        let bind: HashMap<Name, Expr> =
                            params.iter().cloned().zip(args.iter().cloned()).collect();
                        d.subst_syms(&bind)
                    }
                    _ => Expr::apply(f.clone(), args),
                }
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Context};

    fn p(s: &str) -> Expr {
        parse(s, &Context::kdv()).unwrap()
    }

    #[test]
    fn chain_through_jets() {
        let e = p("u*u_x").substitute(&p("u"), &p("q_x")).unwrap();
        assert_eq!(e, p("q_x*q_xx"));
        let e = p("Int[u_y, x]").substitute(&p("u"), &p("q_x")).unwrap();
        assert_eq!(e, p("q_y"));
    }

    #[test]
    fn constant_fold_after_substitution() {
        assert!(p("tanh(t)").substitute(&p("t"), &Expr::zero()).unwrap().is_zero());
    }

    #[test]
    fn jet_only_rejected() {
        let ctx = Context::kdv().dependent(&["h"]);
        let err = p("q_xxy").substitute(&p("q_xx"), &parse("h", &ctx).unwrap());
        assert!(matches!(err, Err(SubstError::JetOnly(_))));
        assert!(err.unwrap_err().to_string().contains("jet-only substitution unsupported"));
    }

    #[test]
    fn function_substitution() {
        let e = p("x*D[F1(t); 1] + F1(t)");
        let out = e.subst_func("F1", &["t".into()], &p("C5*t + C6")).unwrap();
        assert_eq!(out, p("C5*x + C5*t + C6"));
    }
}
