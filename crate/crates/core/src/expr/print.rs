//! Text rendering in the parser's grammar.

use std::fmt::{self, Display, Formatter, Write};

use num_traits::{One, Signed};

use super::{Expr, Func, Kind, Q};

impl Display for Expr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_sum(self, f)
    }
}

fn write_sum(e: &Expr, f: &mut Formatter<'_>) -> fmt::Result {
    match e.kind() {
        Kind::Add(ts) => {
            for (i, t) in ts.iter().enumerate() {
                let (c, _) = t.coeff_slice();
                if i == 0 {
                    write_term(t, f)?;
                } else if c.is_negative() {
                    f.write_str(" - ")?;
                    write_term(&-t, f)?;
                } else {
                    f.write_str(" + ")?;
                    write_term(t, f)?;
                }
            }
            Ok(())
        }
        _ => write_term(e, f),
    }
}

fn write_num(c: &Q, f: &mut Formatter<'_>) -> fmt::Result {
    if c.denom().is_one() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

fn write_term(e: &Expr, f: &mut Formatter<'_>) -> fmt::Result {
    match e.kind() {
        Kind::Mul(fs) => {
            let (c, rest) = e.coeff_slice();
            if rest.len() < fs.len() {
                if c == -Q::one() {
                    f.write_str("-")?;
                } else {
                    write_num(&c, f)?;
                    f.write_str("*")?;
                }
            }
            for (i, x) in rest.iter().enumerate() {
                if i > 0 {
                    f.write_str("*")?;
                }
                write_factor(x, f)?;
            }
            Ok(())
        }
        Kind::Add(_) => {
            f.write_str("(")?;
            write_sum(e, f)?;
            f.write_str(")")
        }
        _ => write_factor(e, f),
    }
}

fn write_factor(e: &Expr, f: &mut Formatter<'_>) -> fmt::Result {
    match e.kind() {
        Kind::Pow(b, n) => {
            let paren = match b.kind() {
                Kind::Add(_) | Kind::Mul(_) | Kind::Pow(..) => true,
                Kind::Num(c) => c.is_negative() || !c.denom().is_one(),
                _ => false,
            };
            if paren {
                f.write_str("(")?;
                write_sum(b, f)?;
                f.write_str(")")?;
            } else {
                write_atom(b, f)?;
            }
            write!(f, "^{n}")
        }
        Kind::Add(_) | Kind::Mul(_) => {
            f.write_str("(")?;
            write_sum(e, f)?;
            f.write_str(")")
        }
        _ => write_atom(e, f),
    }
}

fn write_atom(e: &Expr, f: &mut Formatter<'_>) -> fmt::Result {
    match e.kind() {
        Kind::Num(c) => write_num(c, f),
        Kind::Sym(s) => f.write_str(s),
        Kind::Jet(j) => {
            if j.index.is_empty() {
                f.write_str(&j.dep)
            } else if j.index.single_letter() {
                write!(f, "{}_", j.dep)?;
                for v in j.index.flatten() {
                    f.write_str(&v)?;
                }
                Ok(())
            } else {
                write!(f, "D[{}; ", j.dep)?;
                for (i, v) in j.index.flatten().iter().enumerate() {
                    if i > 0 {
                        f.write_char(',')?;
                    }
                    f.write_str(v)?;
                }
                f.write_str("]")
            }
        }
        Kind::Apply(h, args) => {
            let derivs = match h {
                Func::Named { derivs, .. } if derivs.iter().any(|&d| d > 0) => Some(derivs),
                _ => None,
            };
            if derivs.is_some() {
                f.write_str("D[")?;
            }
            write!(f, "{}(", h.name())?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write_sum(a, f)?;
            }
            f.write_str(")")?;
            if let Some(derivs) = derivs {
                f.write_str("; ")?;
                let mut first = true;
                for (slot, &d) in derivs.iter().enumerate() {
                    for _ in 0..d {
                        if !first {
                            f.write_str(", ")?;
                        }
                        first = false;
                        write!(f, "{}", slot + 1)?;
                    }
                }
                f.write_str("]")?;
            }
            Ok(())
        }
        Kind::Int(x, v) => {
            f.write_str("Int[")?;
            write_sum(x, f)?;
            write!(f, ", {v}]")
        }
        Kind::Add(_) | Kind::Mul(_) | Kind::Pow(..) => {
            f.write_str("(")?;
            write_sum(e, f)?;
            f.write_str(")")
        }
    }
}
