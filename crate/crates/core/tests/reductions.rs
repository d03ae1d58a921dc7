use kdvsym::catalog;
use kdvsym::reduction::{self, reduce_subalgebra, s8_chain, SUBALGEBRAS};

#[test]
fn every_subalgebra_matches_its_printed_reduction() {
    for sub in &SUBALGEBRAS {
        let r = reduce_subalgebra(sub.label, 7).unwrap();
        assert!(r.comparison.equal, "{}: {:?}\n{}", sub.label, r.comparison, r.reduced);
    }
}

#[test]
fn s8_chain_reaches_the_first_integral() {
    let redeq1 = catalog::reductions().expr("reduced_S8").unwrap();
    let r = s8_chain(&redeq1).unwrap();
    assert!(r.second.equal, "{:?}", r.second);
    assert!(r.third.equal, "{:?}", r.third);
    assert!(r.integrated.equal, "{:?} {}", r.integrated, r.integrated_equation);
}

#[test]
fn unknown_label() {
    assert!(reduction::subalgebra("S13").is_err());
}


#[test]
fn reduced_equation_agrees_with_the_composed_solution() {
    use kdvsym::expr::{Env, Expr};
    use kdvsym::reduction::invariants_of;
    use kdvsym::symmetry;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    let eq = symmetry::potential_equation().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for sub in &SUBALGEBRAS {
        let g = symmetry::catalog_generator(sub.label).unwrap();
        let cov = invariants_of(&g, &sub.names, "f").unwrap();
        let reduced = reduction::reduce(&eq.lhs, &cov).unwrap();
        let mut terms = Vec::new();
        for _ in 0..8 {
            let mut m = Expr::int(rng.gen_range(-3..=3));
            for n in sub.names {
                m = m * Expr::sym(n).pow(rng.gen_range(0..=2));
            }
            terms.push(m);
        }
        let f = Expr::add(terms).expand();
        let full = eq.lhs.subst_dep("q", &cov.compose(&f)).unwrap().expand();
        let red = reduced.subst_dep("f", &f).unwrap().expand();
        for _ in 0..25 {
            let mut old = HashMap::new();
            let mut env = Env::new();
            for v in ["x", "y", "z", "t"] {
                let val = if v == "t" { rng.gen_range(0.5..1.5) } else { rng.gen_range(-1.0..1.0) };
                old.insert(v.into(), Complex64::new(val, 0.0));
                env.set(v, val);
            }
            let a = full.eval(&env).unwrap();
            let mut new_env = Env::new();
            for (k, v) in cov.new_point(&old).unwrap() {
                new_env.syms.insert(k, v);
            }
            let b = red.eval(&new_env).unwrap();
            assert!((a - b).norm() <= 1e-8 * a.norm().max(b.norm()).max(1.0), "{}: {a} vs {b}", sub.label);
        }
    }
}
