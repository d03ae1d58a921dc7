//! Double-precision complex evaluation.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use super::{Builtin, Expr, Func, JetVar, Kind, Name};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unsupported function in numeric evaluation: {0}")]
    UnsupportedFunction(String),
    #[error("no value assigned to `{0}`")]
    Unassigned(String),
    #[error("domain error: {0}")]
    Domain(String),
}

pub type NumericFn = Arc<dyn Fn(&[Complex64]) -> Complex64 + Send + Sync>;

/// Numeric assignment for symbols, jets and (underived) arbitrary functions.
/// `pi` and the imaginary unit `I` are preassigned.
#[derive(Clone)]
pub struct Env {
    pub syms: HashMap<Name, Complex64>,
    pub jets: HashMap<JetVar, Complex64>,
    pub funcs: HashMap<Name, NumericFn>,
}

impl Default for Env {
    fn default() -> Self {
        let mut syms = HashMap::new();
        syms.insert("pi".into(), Complex64::new(std::f64::consts::PI, 0.0));
        syms.insert("I".into(), Complex64::new(0.0, 1.0));
        Env {
            syms,
            jets: HashMap::new(),
            funcs: HashMap::new(),
        }
    }
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    pub fn set(&mut self, name: &str, v: f64) -> &mut Self {
        self.syms.insert(name.into(), Complex64::new(v, 0.0));
        self
    }

    pub fn set_c(&mut self, name: &str, v: Complex64) -> &mut Self {
        self.syms.insert(name.into(), v);
        self
    }

    pub fn set_jet(&mut self, j: JetVar, v: Complex64) -> &mut Self {
        self.jets.insert(j, v);
        self
    }
}

impl Expr {
    pub fn eval(&self, env: &Env) -> Result<Complex64, EvalError> {
        match self.kind() {
            Kind::Num(c) => Ok(Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0)),
            Kind::Sym(s) => env
                .syms
                .get(s)
                .copied()
                .ok_or_else(|| EvalError::Unassigned(s.to_string())),
            Kind::Jet(j) => env
                .jets
                .get(j)
                .copied()
                .ok_or_else(|| EvalError::Unassigned(self.to_string())),
            Kind::Add(ts) => {
                let mut acc = Complex64::zero();
                for t in ts {
                    acc += t.eval(env)?;
                }
                Ok(acc)
            }
            Kind::Mul(fs) => {
                let mut acc = Complex64::new(1.0, 0.0);
                for f in fs {
                    acc *= f.eval(env)?;
                }
                Ok(acc)
            }
            Kind::Pow(b, n) => {
                let v = b.eval(env)?;
                if *n < 0 && v.norm() == 0.0 {
                    return Err(EvalError::Domain(format!("division by zero in {self}")));
                }
                Ok(v.powi(*n as i32))
            }
            Kind::Apply(Func::Builtin(b), args) => {
                if b.is_weierstrass() {
                    return Err(EvalError::UnsupportedFunction(b.name().into()));
                }
                let z = args[0].eval(env)?;
                builtin_eval(*b, z)
            }
            Kind::Apply(Func::Named { name, derivs }, args) => {
                if derivs.iter().any(|&d| d > 0) {
                    return Err(EvalError::UnsupportedFunction(self.to_string()));
                }
                let f = env
                    .funcs
                    .get(name)
                    .ok_or_else(|| EvalError::UnsupportedFunction(name.to_string()))?;
                let vals = args.iter().map(|a| a.eval(env)).collect::<Result<Vec<_>, _>>()?;
                Ok(f(&vals))
            }
            Kind::Int(..) => Err(EvalError::UnsupportedFunction(format!("unresolved {self}"))),
        }
    }

    /// Evaluation that additionally requires a finite result.
    pub fn eval_finite(&self, env: &Env) -> Result<Complex64, EvalError> {
        let v = self.eval(env)?;
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::Domain(format!("non-finite value of {self}")))
        }
    }
}

fn builtin_eval(b: Builtin, z: Complex64) -> Result<Complex64, EvalError> {
    Ok(match b {
        Builtin::Sin => z.sin(),
        Builtin::Cos => z.cos(),
        Builtin::Sinh => z.sinh(),
        Builtin::Cosh => z.cosh(),
        Builtin::Tanh => z.tanh(),
        Builtin::Exp => z.exp(),
        Builtin::Ln => {
            if z.norm() == 0.0 {
                return Err(EvalError::Domain("ln(0)".into()));
            }
            z.ln()
        }
        Builtin::Sqrt => z.sqrt(),
        Builtin::Arctan => z.atan(),
        Builtin::Arctanh => z.atanh(),
        Builtin::Abs => Complex64::new(z.norm(), 0.0),
        Builtin::Si => sine_integral(z),
        Builtin::WeierstrassP | Builtin::WeierstrassPPrime | Builtin::WeierstrassZeta => {
            return Err(EvalError::UnsupportedFunction(b.name().into()))
        }
    })
}

/// `Si(z) = integral of sin(z s)/s over s in [0, 1]`, the straight path from 0 to z.
pub fn sine_integral(z: Complex64) -> Complex64 {
    let f = |s: f64| {
        if s == 0.0 {
            z
        } else {
            (z * s).sin() / s
        }
    };
    let pieces = (z.norm().ceil() as usize).clamp(1, 256);
    let h = 1.0 / pieces as f64;
    let mut total = Complex64::zero();
    for k in 0..pieces {
        let (a, b) = (k as f64 * h, (k + 1) as f64 * h);
        let fa = f(a);
        let fb = f(b);
        let m = 0.5 * (a + b);
        let fm = f(m);
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        total += simpson(&f, a, b, fa, fm, fb, whole, 1e-14, 40);
    }
    total
}

#[allow(clippy::too_many_arguments)]
fn simpson(
    f: &impl Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    whole: Complex64,
    tol: f64,
    depth: u32,
) -> Complex64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.norm() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Context};

    #[test]
    fn sech_zero() {
        let e = parse("sech(x)", &Context::kdv()).unwrap();
        let mut env = Env::new();
        env.set("x", 0.0);
        assert!((e.eval(&env).unwrap() - 1.0).norm() < 1e-15);
    }

    #[test]
    fn weierstrass_unsupported() {
        let e = parse("WeierstrassP(1, 0, 1)", &Context::kdv()).unwrap();
        assert!(matches!(e.eval(&Env::new()), Err(EvalError::UnsupportedFunction(_))));
    }

    #[test]
    fn sine_integral_values() {
        // Si(1) and Si(pi) to 15 digits
        assert!((sine_integral(Complex64::new(1.0, 0.0)).re - 0.946_083_070_367_183_0).abs() < 1e-13);
        assert!((sine_integral(Complex64::new(std::f64::consts::PI, 0.0)).re - 1.851_937_051_982_466).abs() < 1e-13);
        assert!((sine_integral(Complex64::new(20.0, 0.0)).re - 1.548_241_701_043_44).abs() < 1e-12);
    }

    #[test]
    fn ln_zero_is_domain_error() {
        let e = parse("ln(x)", &Context::kdv()).unwrap();
        let mut env = Env::new();
        env.set("x", 0.0);
        assert!(matches!(e.eval(&env), Err(EvalError::Domain(_))));
    }
}
