//! The recursion-operator construction of the (3+1)-dimensional KdV equation
//! and its potential form.

use std::fmt;

use thiserror::Error;

use crate::expr::{q, Expr, JetVar, Kind, MultiIndex, Name, Q};
use crate::jetcalc::{total_derivative_by, Equation, JetError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HierarchyError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("mixed-derivative identity failed: {0}")]
    Cancellation(String),
    #[error("antiderivative {0} does not cancel under u = q_x")]
    UncancelledIntegral(String),
    #[error("leading jet {0} is missing from the assembled equation")]
    MissingLeading(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiffPart {
    /// `D_x^n` (n = 0 is the identity).
    Dx(u32),
    /// The formal inverse of `D_x`.
    Inverse,
}

#[derive(Debug, Clone)]
pub struct RecursionTerm {
    pub scalar: Q,
    pub pre: Expr,
    pub part: DiffPart,
}

/// An operator `f -> sum scalar * pre * part(f)`.
#[derive(Debug, Clone)]
pub struct RecursionOperator {
    pub terms: Vec<RecursionTerm>,
}

impl RecursionOperator {
    /// `(1/5) D_x^2 - (16/15) u + (2/3) u_x D_x^-1`.
    pub fn kdv() -> RecursionOperator {
        RecursionOperator {
            terms: vec![
                RecursionTerm {
                    scalar: q(1, 5),
                    pre: Expr::one(),
                    part: DiffPart::Dx(2),
                },
                RecursionTerm {
                    scalar: q(-16, 15),
                    pre: Expr::jet_of::<&str>("u", &[]),
                    part: DiffPart::Dx(0),
                },
                RecursionTerm {
                    scalar: q(2, 3),
                    pre: Expr::jet_of("u", &["x"]),
                    part: DiffPart::Inverse,
                },
            ],
        }
    }

    pub fn apply(&self, f: &Expr) -> Result<Expr, JetError> {
        let x: Name = "x".into();
        let mut out = Vec::with_capacity(self.terms.len());
        for term in &self.terms {
            let inner = match term.part {
                DiffPart::Dx(n) => total_derivative_by(f, &MultiIndex::from_counts([(x.clone(), n)]))?,
                DiffPart::Inverse => Expr::integral(f, &x),
            };
            out.push((&term.pre * &inner).scale(&term.scalar));
        }
        Ok(Expr::add(out).expand())
    }
}

impl fmt::Display for RecursionOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let part = match t.part {
                DiffPart::Dx(0) => String::new(),
                DiffPart::Dx(n) => format!("*D_x^{n}"),
                DiffPart::Inverse => "*D_x^-1".to_string(),
            };
            write!(f, "({})*{}{}", t.scalar, t.pre, part)?;
        }
        Ok(())
    }
}

pub fn apply_recursion(r: &RecursionOperator, f: &Expr) -> Result<Expr, JetError> {
    r.apply(f)
}

/// Left-hand side of the flow `u_t = R(u_var)`, written as `u_t - R(u_var)`.
pub fn flow(r: &RecursionOperator, var: &str) -> Result<Expr, JetError> {
    let rhs = r.apply(&Expr::jet_of("u", &[var]))?;
    Ok((Expr::jet_of("u", &["t"]) - rhs).expand())
}

fn d(e: &Expr, vars: &[&str]) -> Result<Expr, JetError> {
    total_derivative_by(e, &MultiIndex::from_vars(vars.iter().copied()))
}

/// The three differentiated flows entering the assembly.
#[derive(Debug, Clone)]
pub struct Flows {
    /// `D_yz` of the x-flow.
    pub kdv_x: Expr,
    /// `3 D_xz` of the y-flow.
    pub kdv_y: Expr,
    /// `3 D_xy` of the z-flow.
    pub kdv_z: Expr,
}

pub fn flows(r: &RecursionOperator) -> Result<Flows, JetError> {
    let three = Q::from_integer(3.into());
    Ok(Flows {
        kdv_x: d(&flow(r, "x")?, &["y", "z"])?,
        kdv_y: d(&flow(r, "y")?, &["x", "z"])?.scale(&three),
        kdv_z: d(&flow(r, "z")?, &["x", "y"])?.scale(&three),
    })
}

/// Checks `(u u_x)_yz = (u u_y)_xz = (u u_z)_xy`, the identity that merges the
/// quadratic terms of the three flows.
pub fn mixed_identity() -> Result<(), HierarchyError> {
    let u = Expr::jet_of::<&str>("u", &[]);
    let term = |v: &str, a: &str, b: &str| d(&(&u * Expr::jet_of("u", &[v])), &[a, b]);
    let yz = term("x", "y", "z")?;
    for other in [term("y", "x", "z")?, term("z", "x", "y")?] {
        if (&yz - &other).expand() != Expr::zero() {
            return Err(HierarchyError::Cancellation(format!("{yz} versus {other}")));
        }
    }
    Ok(())
}

/// Builds `KdV_y + KdV_z - KdV_x`, normalized so that `u_xxxyz` has
/// coefficient -1.
pub fn assemble_new_kdv() -> Result<Equation, HierarchyError> {
    let r = RecursionOperator::kdv();
    let f = flows(&r)?;
    let sum = (&f.kdv_y + &f.kdv_z - &f.kdv_x).expand();
    mixed_identity()?;
    let lead = JetVar::of("u", &["x", "x", "x", "y", "z"]);
    normalized(sum, lead)
}

fn normalized(lhs: Expr, lead: JetVar) -> Result<Equation, HierarchyError> {
    let eq = Equation::new(lhs, lead.clone()).map_err(|e| match e {
        JetError::NotMonicLinear { lead } => HierarchyError::MissingLeading(lead),
        other => other.into(),
    })?;
    let c = eq.leading_coefficient();
    let minus_one = Q::from_integer((-1).into());
    if c == minus_one {
        return Ok(eq);
    }
    Ok(Equation::new(eq.lhs.scale(&(minus_one / c)), lead)?)
}

/// Substitutes `u = q_x`; every antiderivative must cancel.
pub fn potential_transform(eq: &Equation) -> Result<Equation, HierarchyError> {
    let qx = Expr::jet_of("q", &["x"]);
    let lhs = eq.lhs.subst_dep(&eq.dep, &qx).map_err(|e| match e {
        crate::expr::SubstError::Diff(d) => HierarchyError::Jet(JetError::Diff(d)),
        other => HierarchyError::UncancelledIntegral(other.to_string()),
    })?;
    if let Some(i) = first_integral(&lhs) {
        return Err(HierarchyError::UncancelledIntegral(i.to_string()));
    }
    let lead = JetVar::new("q", eq.leading.index.with(&"x".into(), 1));
    Ok(Equation::new(lhs.expand(), lead)?)
}

fn first_integral(e: &Expr) -> Option<Expr> {
    let mut found = None;
    e.walk(&mut |n| {
        if found.is_none() && matches!(n.kind(), Kind::Int(..)) {
            found = Some(n.clone());
        }
    });
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Context};

    fn p(s: &str) -> Expr {
        parse(s, &Context::kdv()).unwrap()
    }

    #[test]
    fn recursion_on_u_x() {
        let r = RecursionOperator::kdv();
        assert_eq!(r.apply(&p("u_x")).unwrap(), p("1/5*u_xxx - 2/5*u*u_x"));
        assert!(r.apply(&Expr::zero()).unwrap().is_zero());
    }

    #[test]
    fn recursion_on_u_y() {
        let r = RecursionOperator::kdv();
        assert_eq!(
            r.apply(&p("u_y")).unwrap(),
            p("1/5*u_xxy - 16/15*u*u_y + 2/3*u_x*Int[u_y, x]")
        );
    }

    #[test]
    fn assembled_leading_coefficient() {
        let eq = assemble_new_kdv().unwrap();
        assert_eq!(eq.leading_coefficient(), q(-1, 1));
        let qeq = potential_transform(&eq).unwrap();
        assert_eq!(qeq.leading, JetVar::of("q", &["x", "x", "x", "x", "y", "z"]));
        assert!(!qeq.lhs.has_int());
    }

    #[test]
    fn classical_potential() {
        let eq = Equation::new(p("u_t - 6*u*u_x + u_xxx"), JetVar::of("u", &["x", "x", "x"])).unwrap();
        let qeq = potential_transform(&eq).unwrap();
        assert_eq!(qeq.lhs, p("q_xt - 6*q_x*q_xx + q_xxxx"));
    }

    #[test]
    fn uncancelled_integral_reported() {
        let eq = Equation::new(p("u_xxx + Int[u*u, x]"), JetVar::of("u", &["x", "x", "x"])).unwrap();
        assert!(matches!(
            potential_transform(&eq),
            Err(HierarchyError::UncancelledIntegral(_))
        ));
    }
}

#[cfg(test)]
mod transcription_tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn matches_transcriptions() {
        let cat = catalog::equations();
        let eq = assemble_new_kdv().unwrap();
        assert_eq!(eq.lhs, cat.expr("new_kdv_u").unwrap().expand());
        let qeq = potential_transform(&eq).unwrap();
        assert_eq!(qeq.lhs, cat.expr("new_kdv_q").unwrap().expand());
        let f = flows(&RecursionOperator::kdv()).unwrap();
        assert_eq!(f.kdv_x, cat.expr("kdv_x").unwrap().expand());
        assert_eq!(f.kdv_y, cat.expr("kdv_y").unwrap().expand());
        assert_eq!(f.kdv_z, cat.expr("kdv_z").unwrap().expand());
        let r = RecursionOperator::kdv();
        assert_eq!(flow(&r, "x").unwrap(), cat.expr("flow_x").unwrap().expand());
        assert_eq!(flow(&r, "y").unwrap(), cat.expr("flow_y").unwrap().expand());
    }
}
