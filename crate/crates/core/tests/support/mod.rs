//! Property suites shared by the `properties` and `acceptance` targets.

use std::sync::OnceLock;

use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use kdvsym::expr::{parse, Builtin, Context, Env, Expr, JetVar, Name, Q};
use kdvsym::jetcalc::{euler_operator, prolonged_coefficient, CharacteristicDerivatives, Generator};
use kdvsym::liealg::{adjoint_matrix, AlgebraBasis, ExpPoly};
use kdvsym::symmetry::{self, InfinitesimalAnsatz, SolvedFamily};

const SYMS: [&str; 4] = ["x", "y", "z", "t"];
const JETS: [(&str, &[&str]); 6] = [
    ("q", &[]),
    ("q", &["x"]),
    ("q", &["y"]),
    ("q", &["x", "z"]),
    ("q", &["t", "x"]),
    ("v", &["y"]),
];

#[derive(Clone, Debug)]
enum Tree {
    Num(i64),
    Sym(usize),
    Jet(usize),
    Add(Box<Tree>, Box<Tree>),
    Mul(Box<Tree>, Box<Tree>),
    Pow(Box<Tree>, u8),
    Sin(Box<Tree>),
}

impl Tree {
    fn expr(&self) -> Expr {
        match self {
            Tree::Num(n) => Expr::int(*n),
            Tree::Sym(i) => Expr::sym(SYMS[*i]),
            Tree::Jet(i) => Expr::jet(JetVar::of(JETS[*i].0, JETS[*i].1)),
            Tree::Add(a, b) => a.expr() + b.expr(),
            Tree::Mul(a, b) => a.expr() * b.expr(),
            Tree::Pow(a, k) => a.expr().pow(i64::from(*k)),
            Tree::Sin(a) => Expr::call(Builtin::Sin, a.expr()),
        }
    }

    fn eval(&self, env: &Env) -> Complex64 {
        match self {
            Tree::Num(n) => Complex64::new(*n as f64, 0.0),
            Tree::Sym(i) => env.syms[SYMS[*i]],
            Tree::Jet(i) => env.jets[&JetVar::of(JETS[*i].0, JETS[*i].1)],
            Tree::Add(a, b) => a.eval(env) + b.eval(env),
            Tree::Mul(a, b) => a.eval(env) * b.eval(env),
            Tree::Pow(a, k) => a.eval(env).powu(u32::from(*k)),
            Tree::Sin(a) => a.eval(env).sin(),
        }
    }
}

fn tree(jets: usize, with_sin: bool) -> impl Strategy<Value = Tree> {
    let leaf = prop_oneof![
        (-3i64..=3).prop_map(Tree::Num),
        (0..SYMS.len()).prop_map(Tree::Sym),
        (0..jets).prop_map(Tree::Jet),
    ];
    leaf.prop_recursive(4, 24, 2, move |inner| {
        let base = prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Tree::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Tree::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), 0u8..=3).prop_map(|(a, k)| Tree::Pow(Box::new(a), k)),
        ];
        if with_sin {
            prop_oneof![3 => base, 1 => inner.prop_map(|a| Tree::Sin(Box::new(a)))].boxed()
        } else {
            base.boxed()
        }
    })
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.0f64..1.0, SYMS.len() + JETS.len())
}

fn env_at(vals: &[f64]) -> Env {
    let mut env = Env::new();
    for (i, s) in SYMS.iter().enumerate() {
        env.set(s, vals[i]);
    }
    for (i, (d, idx)) in JETS.iter().enumerate() {
        env.set_jet(JetVar::of(d, idx), Complex64::new(vals[SYMS.len() + i], 0.0));
    }
    env
}

fn runner(cases: u32, seed: u8) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]))
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-9 * a.norm().max(b.norm()).max(1.0)
}

pub fn canonicalization_is_idempotent() -> Result<(), String> {
    let ctx = Context::kdv();
    runner(200, 1)
        .run(&tree(JETS.len(), true), |t| {
            let e = t.expr();
            let x = e.expand();
            prop_assert_eq!(x.expand(), x.clone());
            prop_assert_eq!(parse(&e.to_string(), &ctx).unwrap(), e);
            prop_assert_eq!(Expr::add([x.clone()]), x.clone());
            prop_assert_eq!(Expr::mul([x.clone(), Expr::one()]), x);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn evaluation_commutes_with_canonicalization() -> Result<(), String> {
    runner(200, 2)
        .run(&(tree(JETS.len(), true), point()), |(t, p)| {
            let env = env_at(&p);
            let direct = t.eval(&env);
            let e = t.expr();
            prop_assert!(close(e.eval(&env).unwrap(), direct));
            prop_assert!(close(e.expand().eval(&env).unwrap(), direct));
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn total_derivatives_commute() -> Result<(), String> {
    let (x, y): (Name, Name) = ("x".into(), "y".into());
    runner(150, 3)
        .run(&tree(JETS.len(), true), |t| {
            let e = t.expr();
            let xy = e.total_diff(&x).unwrap().total_diff(&y).unwrap().expand();
            let yx = e.total_diff(&y).unwrap().total_diff(&x).unwrap().expand();
            prop_assert_eq!(xy, yx);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn euler_operator_annihilates_divergences() -> Result<(), String> {
    runner(120, 4)
        .run(&(tree(5, false), 0..SYMS.len()), |(t, k)| {
            let var: Name = SYMS[k].into();
            let div = t.expr().total_diff(&var).unwrap().expand();
            prop_assert!(euler_operator(&div, "q").unwrap().is_zero());
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn algebra() -> &'static AlgebraBasis {
    static ALG: OnceLock<AlgebraBasis> = OnceLock::new();
    ALG.get_or_init(|| AlgebraBasis::kdv().unwrap())
}

fn exp_bracket(alg: &AlgebraBasis, a: &[ExpPoly], b: &[ExpPoly]) -> Vec<ExpPoly> {
    let n = alg.dim();
    let unit = |i: usize| -> Vec<Q> { (0..n).map(|k| Q::from_integer(((k == i) as i64).into())).collect() };
    let mut out = vec![ExpPoly::default(); n];
    for i in 0..n {
        for j in 0..n {
            let c = alg.bracket(&unit(i), &unit(j));
            let ab = a[i].mul(&b[j]);
            for k in 0..n {
                out[k] = out[k].add(&ab.scale(&c[k]));
            }
        }
    }
    out
}

pub fn adjoint_action_is_an_automorphism() -> Result<(), String> {
    let alg = algebra();
    let vec7 = proptest::collection::vec(-4i64..=4, 7);
    runner(140, 5)
        .run(&(0..7usize, vec7.clone(), vec7), |(w, a, b)| {
            let lift = |v: &[i64]| -> Vec<ExpPoly> { v.iter().map(|&c| ExpPoly::constant(Q::from_integer(c.into()))).collect() };
            let qv = |v: &[i64]| -> Vec<Q> { v.iter().map(|&c| Q::from_integer(c.into())).collect() };
            let m = adjoint_matrix(alg, w).unwrap();
            let (xa, xb) = (lift(&a), lift(&b));
            let exact: Vec<ExpPoly> = alg.bracket(&qv(&a), &qv(&b)).into_iter().map(ExpPoly::constant).collect();
            let lhs = m.act(&exact);
            let rhs = exp_bracket(alg, &m.act(&xa), &m.act(&xb));
            for (l, r) in lhs.iter().zip(&rhs) {
                prop_assert!(l.add(&r.scale(&Q::from_integer((-1).into()))).is_zero());
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn field_tree() -> impl Strategy<Value = Tree> {
    tree(1, false)
}

fn generator(ts: &[Tree]) -> Generator {
    Generator::new(&SYMS, ts[..4].iter().map(Tree::expr).collect(), &["q"], vec![ts[4].expr()]).unwrap()
}

pub fn prolongation_is_linear() -> Result<(), String> {
    let targets = [JetVar::of("q", &["x", "y"]), JetVar::of("q", &["t", "x", "x"])];
    let gens = proptest::collection::vec(field_tree(), 10);
    runner(100, 6)
        .run(&(gens, -3i64..=3, -3i64..=3), |(ts, a, b)| {
            let (a, b) = (Q::from_integer(a.into()), Q::from_integer(b.into()));
            let g1 = generator(&ts[..5]);
            let g2 = generator(&ts[5..]);
            let sum = g1.scale(&a).plus(&g2.scale(&b));
            let pro = |g: &Generator, j: &JetVar| {
                let mut d: Vec<_> = g.characteristic().into_iter().map(CharacteristicDerivatives::new).collect();
                prolonged_coefficient(g, &mut d, j).unwrap()
            };
            for j in &targets {
                let lhs = pro(&sum, j);
                let rhs = (pro(&g1, j).scale(&a) + pro(&g2, j).scale(&b)).expand();
                prop_assert_eq!(lhs, rhs);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn family() -> &'static SolvedFamily {
    static FAM: OnceLock<SolvedFamily> = OnceLock::new();
    FAM.get_or_init(|| {
        let ans = InfinitesimalAnsatz::new_kdv();
        let eq = symmetry::potential_equation().unwrap();
        let sys = symmetry::determining_system(&ans, &eq).unwrap();
        symmetry::solve_restricted(&ans, &sys).unwrap()
    })
}

fn member(consts: &[i64], f1: &[i64], f2: &[i64]) -> Generator {
    let fam = family();
    let poly = |cs: &[i64]| {
        Expr::add(cs.iter().enumerate().map(|(k, &c)| Expr::int(c) * Expr::sym("t").pow(k as i64)))
    };
    let g = fam.specialize("t", &[("F1", poly(f1)), ("F2", poly(f2))]).unwrap();
    let vals: std::collections::HashMap<Name, Expr> = fam
        .free_constants
        .iter()
        .zip(consts.iter().cycle())
        .map(|(n, &c)| (n.clone(), Expr::int(c)))
        .collect();
    g.map(|e| e.subst_syms(&vals).expand())
}

pub fn family_members_are_symmetries() -> Result<(), String> {
    let eq = symmetry::potential_equation().unwrap();
    let coeffs = |n| proptest::collection::vec(-3i64..=3, n);
    runner(24, 7)
        .run(&(coeffs(4), coeffs(4), coeffs(4)), |(c, f1, f2)| {
            let g = member(&c, &f1, &f2);
            prop_assert!(symmetry::is_symmetry(&g, &eq).unwrap());
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn perturbed_generators_are_not_symmetries() -> Result<(), String> {
    let eq = symmetry::potential_equation().unwrap();
    let ctx = Context::kdv();
    let bumps = ["x^2", "t", "y", "x", "q^2", "x*y*z"];
    let coeffs = |n| proptest::collection::vec(-3i64..=3, n);
    runner(20, 8)
        .run(&(coeffs(4), coeffs(3), 0..bumps.len(), 1i64..=3), |(c, f1, k, s)| {
            let mut g = member(&c, &f1, &[0]);
            let bump = parse(bumps[k], &ctx).unwrap() * Expr::int(s);
            let slot = k.min(4);
            if slot < 4 {
                g.xi[slot] = (&g.xi[slot] + bump).expand();
            } else {
                g.eta[0] = (&g.eta[0] + bump).expand();
            }
            prop_assert!(!symmetry::invariance_residual(&g, &eq).unwrap().is_zero());
            Ok(())
        })
        .map_err(|e| e.to_string())
}
