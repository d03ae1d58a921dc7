use kdvsym::catalog;
use kdvsym::conslaw::{
    self, compare_components, conserved_vector, onshell_divergence_check, onshell_divergence_numeric,
    printed_component, printed_generator, ConservedVector,
};
use kdvsym::expr::Q;

#[test]
fn adjoint_matches_transcription() {
    let (_, adj) = conslaw::system().unwrap();
    assert_eq!(adj.lhs, catalog::equations().expr("adjoint").unwrap().expand());
}

#[test]
fn every_vector_is_conserved_on_shell() {
    let (eq, adj) = conslaw::system().unwrap();
    let eqs = [eq.clone(), adj];
    for n in 1..=7 {
        let t = conserved_vector(&printed_generator(n).unwrap(), &eq).unwrap();
        let r = onshell_divergence_check(&t, &eqs).unwrap();
        assert!(r.pass, "T{n}: {:?}", r.surviving);
    }
}

#[test]
fn largest_vectors_pass_numerically() {
    let (eq, adj) = conslaw::system().unwrap();
    let eqs = [eq.clone(), adj];
    for n in [6, 7] {
        let t = conserved_vector(&printed_generator(n).unwrap(), &eq).unwrap();
        let r = onshell_divergence_numeric(&t, &eqs, 5, 40, 1e-8).unwrap();
        assert!(r.pass, "T{n}: {}", r.residual);
    }
}

#[test]
fn printed_vectors_match() {
    let (eq, _) = conslaw::system().unwrap();
    for n in [1, 5] {
        let t = conserved_vector(&printed_generator(n).unwrap(), &eq).unwrap();
        for c in compare_components(&t, n, 3, 30).unwrap() {
            assert!(c.max_relative < 1e-8, "{}: {:?}", c.component, c.difference);
        }
    }
}

#[test]
fn perturbed_vector_fails() {
    let (eq, adj) = conslaw::system().unwrap();
    let eqs = [eq, adj];
    let mut t = ConservedVector {
        components: ["t", "x", "y", "z"]
            .iter()
            .map(|v| ((*v).into(), printed_component(1, v).unwrap()))
            .collect(),
    };
    assert!(onshell_divergence_check(&t, &eqs).unwrap().pass);
    let first = t.components[0].1.terms()[0].clone();
    t.components[0].1 = (&t.components[0].1 - first).expand();
    assert!(!onshell_divergence_check(&t, &eqs).unwrap().pass);
}

#[test]
fn linear_in_the_generator() {
    let (eq, _) = conslaw::system().unwrap();
    let (a, b) = (Q::new(3.into(), 2.into()), Q::from_integer((-2).into()));
    let g1 = printed_generator(6).unwrap();
    let g2 = printed_generator(7).unwrap();
    let combined = conserved_vector(&g1.scale(&a).plus(&g2.scale(&b)), &eq).unwrap();
    let separate = conserved_vector(&g1, &eq)
        .unwrap()
        .scale(&a)
        .plus(&conserved_vector(&g2, &eq).unwrap().scale(&b));
    for ((_, x), (_, y)) in combined.components.iter().zip(&separate.components) {
        assert!((x - y).expand().is_zero());
    }
}
