//! Equality adjudication: exact structural comparison with a randomized
//! numeric fallback for expressions the canonical form cannot decide.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Env, EvalError, Expr, Kind};

#[derive(Debug, Clone, Serialize)]
pub struct ProbePoint {
    pub assignment: Vec<(String, [f64; 2])>,
    pub lhs: [f64; 2],
    pub rhs: [f64; 2],
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub points: usize,
    pub max_relative: f64,
    pub transcript: Vec<ProbePoint>,
}

#[derive(Debug, Clone, Serialize)]
pub enum Equality {
    /// Difference canonicalizes to zero.
    Structural,
    /// Differences vanish numerically at every probe point.
    Probable(ProbeReport),
    NotEqual(String),
}

impl Equality {
    pub fn holds(&self) -> bool {
        !matches!(self, Equality::NotEqual(_))
    }
}

/// True if the canonical form may miss an identity: special functions or
/// negative powers of sums are present.
fn needs_probe(e: &Expr) -> bool {
    let mut found = e.has_builtin();
    if !found {
        e.walk(&mut |n| {
            if let Kind::Pow(b, k) = n.kind() {
                found |= *k < 0 && matches!(b.kind(), Kind::Add(_));
            }
        });
    }
    found
}

/// Structural equality after expansion, falling back to numeric probing at
/// `points` random complex points with relative tolerance `tol`.
pub fn probably_equal(a: &Expr, b: &Expr, seed: u64, points: usize, tol: f64) -> Equality {
    let diff = (a - b).expand();
    if diff.is_zero() {
        return Equality::Structural;
    }
    if !needs_probe(a) && !needs_probe(b) {
        return Equality::NotEqual(format!("difference {diff}"));
    }
    match probe(a, b, seed, points, tol) {
        Ok(report) if report.max_relative <= tol => Equality::Probable(report),
        Ok(report) => Equality::NotEqual(format!(
            "numeric probe mismatch, max relative difference {:.3e}",
            report.max_relative
        )),
        Err(e) => Equality::NotEqual(format!("numeric probe failed: {e}")),
    }
}

pub fn probe(a: &Expr, b: &Expr, seed: u64, points: usize, tol: f64) -> Result<ProbeReport, EvalError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut syms: Vec<_> = a.symbols().union(&b.symbols()).cloned().collect();
    syms.retain(|s| &**s != "pi" && &**s != "I");
    let jets: Vec<_> = a.jets().union(&b.jets()).cloned().collect();
    let mut report = ProbeReport {
        points: 0,
        max_relative: 0.0,
        transcript: Vec::new(),
    };
    let mut attempts = 0;
    while report.points < points {
        attempts += 1;
        if attempts > points * 4 {
            return Err(EvalError::Domain("too many singular probe points".into()));
        }
        let mut env = Env::new();
        let mut assignment = Vec::new();
        let draw = |rng: &mut ChaCha8Rng| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        for s in &syms {
            let v = draw(&mut rng);
            env.syms.insert(s.clone(), v);
            assignment.push((s.to_string(), [v.re, v.im]));
        }
        for j in &jets {
            let v = draw(&mut rng);
            env.jets.insert(j.clone(), v);
            assignment.push((Expr::jet(j.clone()).to_string(), [v.re, v.im]));
        }
        let (va, vb) = match (a.eval_finite(&env), b.eval_finite(&env)) {
            (Ok(x), Ok(y)) => (x, y),
            (Err(EvalError::Domain(_)), _) | (_, Err(EvalError::Domain(_))) => continue,
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        let scale = va.norm().max(vb.norm()).max(1.0);
        let rel = (va - vb).norm() / scale;
        report.max_relative = report.max_relative.max(rel);
        report.points += 1;
        report.transcript.push(ProbePoint {
            assignment,
            lhs: [va.re, va.im],
            rhs: [vb.re, vb.im],
        });
        if rel > tol {
            break;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Context};

    fn p(s: &str) -> Expr {
        parse(s, &Context::kdv()).unwrap()
    }

    #[test]
    fn structural_first() {
        assert!(matches!(
            probably_equal(&p("(x + y)^2"), &p("x^2 + 2*x*y + y^2"), 1, 25, 1e-9),
            Equality::Structural
        ));
    }

    #[test]
    fn trig_identity_is_probable() {
        let r = probably_equal(&p("sin(x)^2 + cos(x)^2"), &p("1"), 7, 25, 1e-9);
        match r {
            Equality::Probable(rep) => assert_eq!(rep.points, 25),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn distinct_rational_functions() {
        let r = probably_equal(&p("x/(x + 1)"), &p("1 - 1/(x + 1)"), 3, 25, 1e-9);
        assert!(r.holds());
        let r = probably_equal(&p("x/(x + 1)"), &p("1 + 1/(x + 1)"), 3, 25, 1e-9);
        assert!(!r.holds());
        assert!(!probably_equal(&p("x"), &p("y"), 3, 25, 1e-9).holds());
    }
}
