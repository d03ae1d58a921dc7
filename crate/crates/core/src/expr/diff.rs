//! Rule-driven differentiation: the leaf rules decide whether this is a
//! total derivative, a partial derivative in a symbol, or a chain-rule
//! derivative through a change of variables.

use thiserror::Error;

use super::{Builtin, Expr, Func, JetVar, Kind, Name};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiffError {
    #[error("cannot differentiate through abs({0})")]
    Abs(String),
    #[error("cannot differentiate {0} with respect to an invariant parameter")]
    WeierstrassParameter(String),
    #[error("cannot differentiate formal antiderivative {0} in its own variable")]
    Antiderivative(String),
}

pub trait DiffRules {
    fn sym(&self, s: &Name) -> Expr;
    fn jet(&self, j: &JetVar) -> Expr;
    /// Derivative of `Int[integrand, var]`.
    fn int(&self, integrand: &Expr, var: &Name) -> Result<Expr, DiffError>;
}

impl Expr {
    pub fn diff_with(&self, rules: &dyn DiffRules) -> Result<Expr, DiffError> {
        Ok(match self.kind() {
            Kind::Num(_) => Expr::zero(),
            Kind::Sym(s) => rules.sym(s),
            Kind::Jet(j) => rules.jet(j),
            Kind::Add(ts) => {
                let mut out = Vec::with_capacity(ts.len());
                for t in ts {
                    out.push(t.diff_with(rules)?);
                }
                Expr::add(out)
            }
            Kind::Mul(fs) => {
                let mut out = Vec::with_capacity(fs.len());
                for (i, f) in fs.iter().enumerate() {
                    let d = f.diff_with(rules)?;
                    if d.is_zero() {
                        continue;
                    }
                    let mut prod: Vec<Expr> = Vec::with_capacity(fs.len());
                    prod.extend(fs[..i].iter().cloned());
                    prod.push(d);
                    prod.extend(fs[i + 1..].iter().cloned());
                    out.push(Expr::mul(prod));
                }
                Expr::add(out)
            }
            Kind::Pow(b, n) => {
                let d = b.diff_with(rules)?;
                if d.is_zero() {
                    return Ok(Expr::zero());
                }
                Expr::mul([Expr::int(*n), b.pow(n - 1), d])
            }
            Kind::Apply(Func::Builtin(b), args) => builtin_diff(self, *b, args, rules)?,
            Kind::Apply(f @ Func::Named { .. }, args) => {
                let mut out = Vec::new();
                for (slot, a) in args.iter().enumerate() {
                    let d = a.diff_with(rules)?;
                    if d.is_zero() {
                        continue;
                    }
                    let head = f.derived(slot).unwrap();
                    out.push(Expr::apply(head, args.clone()) * d);
                }
                Expr::add(out)
            }
            Kind::Int(e, v) => rules.int(e, v)?,
        })
    }

    /// Total derivative in `var`: jets gain one index, `D_x Int[f, x] = f`.
    pub fn total_diff(&self, var: &Name) -> Result<Expr, DiffError> {
        self.diff_with(&Total(var.clone()))
    }

    /// Partial derivative in a symbol, treating jets as constants.
    pub fn partial_sym(&self, var: &Name) -> Result<Expr, DiffError> {
        self.diff_with(&PartialSym(var.clone()))
    }

    /// Partial derivative in a jet coordinate.
    pub fn partial_jet(&self, j: &JetVar) -> Result<Expr, DiffError> {
        self.diff_with(&PartialJet(j.clone()))
    }
}

pub struct Total(pub Name);

impl DiffRules for Total {
    fn sym(&self, s: &Name) -> Expr {
        if *s == self.0 {
            Expr::one()
        } else {
            Expr::zero()
        }
    }

    fn jet(&self, j: &JetVar) -> Expr {
        Expr::jet(j.diff(&self.0))
    }

    fn int(&self, integrand: &Expr, var: &Name) -> Result<Expr, DiffError> {
        if *var == self.0 {
            Ok(integrand.clone())
        } else {
            Ok(Expr::integral(&integrand.diff_with(self)?, var))
        }
    }
}

struct PartialSym(Name);

impl DiffRules for PartialSym {
    fn sym(&self, s: &Name) -> Expr {
        if *s == self.0 {
            Expr::one()
        } else {
            Expr::zero()
        }
    }

    fn jet(&self, _: &JetVar) -> Expr {
        Expr::zero()
    }

    fn int(&self, integrand: &Expr, var: &Name) -> Result<Expr, DiffError> {
        if *var == self.0 {
            return Err(DiffError::Antiderivative(
                Expr::integral(integrand, var).to_string(),
            ));
        }
        Ok(Expr::integral(&integrand.diff_with(self)?, var))
    }
}

struct PartialJet(JetVar);

impl DiffRules for PartialJet {
    fn sym(&self, _: &Name) -> Expr {
        Expr::zero()
    }

    fn jet(&self, j: &JetVar) -> Expr {
        if *j == self.0 {
            Expr::one()
        } else {
            Expr::zero()
        }
    }

    fn int(&self, integrand: &Expr, var: &Name) -> Result<Expr, DiffError> {
        Ok(Expr::integral(&integrand.diff_with(self)?, var))
    }
}

fn builtin_diff(
    whole: &Expr,
    b: Builtin,
    args: &[Expr],
    rules: &dyn DiffRules,
) -> Result<Expr, DiffError> {
    let a = &args[0];
    if b.is_weierstrass() {
        for p in &args[1..] {
            if !p.diff_with(rules)?.is_zero() {
                return Err(DiffError::WeierstrassParameter(whole.to_string()));
            }
        }
    }
    if b == Builtin::Abs {
        if a.diff_with(rules)?.is_zero() {
            return Ok(Expr::zero());
        }
        return Err(DiffError::Abs(a.to_string()));
    }
    let da = a.diff_with(rules)?;
    if da.is_zero() {
        return Ok(Expr::zero());
    }
    let c = |h: Builtin| Expr::call(h, a.clone());
    let outer = match b {
        Builtin::Sin => c(Builtin::Cos),
        Builtin::Cos => -c(Builtin::Sin),
        Builtin::Sinh => c(Builtin::Cosh),
        Builtin::Cosh => c(Builtin::Sinh),
        Builtin::Tanh => Expr::one() - c(Builtin::Tanh).pow(2),
        Builtin::Exp => whole.clone(),
        Builtin::Ln => a.recip(),
        Builtin::Sqrt => Expr::frac(1, 2) * whole.recip(),
        Builtin::Arctan => (Expr::one() + a.pow(2)).recip(),
        Builtin::Arctanh => (Expr::one() - a.pow(2)).recip(),
        Builtin::Si => c(Builtin::Sin) * a.recip(),
        Builtin::WeierstrassP => Expr::apply(Func::Builtin(Builtin::WeierstrassPPrime), args.to_vec()),
        Builtin::WeierstrassPPrime => {
            let p = Expr::apply(Func::Builtin(Builtin::WeierstrassP), args.to_vec());
            Expr::int(6) * p.pow(2) - Expr::frac(1, 2) * &args[1]
        }
        Builtin::WeierstrassZeta => -Expr::apply(Func::Builtin(Builtin::WeierstrassP), args.to_vec()),
        Builtin::Abs => unreachable!(),
    };
    Ok(outer * da)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Context};

    fn p(s: &str) -> Expr {
        parse(s, &Context::kdv()).unwrap()
    }

    #[test]
    fn product_and_chain_rules() {
        let x: Name = "x".into();
        assert_eq!(p("u*u_x").total_diff(&x).unwrap().expand(), p("u_x^2 + u*u_xx"));
        assert_eq!(p("sin(x^2)").total_diff(&x).unwrap(), p("2*x*cos(x^2)"));
        assert_eq!(p("D[F1(t); 1]").total_diff(&"t".into()).unwrap(), p("D[F1(t); 1, 1]"));
    }

    #[test]
    fn antiderivative_rules() {
        let x: Name = "x".into();
        let y: Name = "y".into();
        assert_eq!(p("Int[u_y, x]").total_diff(&x).unwrap(), p("u_y"));
        assert_eq!(p("Int[u_y, x]").total_diff(&y).unwrap(), p("Int[u_yy, x]"));
    }

    #[test]
    fn abs_is_rejected() {
        assert!(matches!(p("abs(sin(t))").total_diff(&"t".into()), Err(DiffError::Abs(_))));
        assert!(p("abs(sin(t))").total_diff(&"x".into()).unwrap().is_zero());
    }
}
