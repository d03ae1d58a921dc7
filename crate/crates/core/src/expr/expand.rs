//! Distribution of products over sums.

use std::collections::HashMap;

use num_traits::Zero;

use super::{Expr, Kind, Q};

impl Expr {
    /// Fully distributes products and positive integer powers of sums.
    /// Negative powers of sums are kept as atoms (their bases are expanded).
    pub fn expand(&self) -> Expr {
        if self.is_expanded() {
            return self.clone();
        }
        match self.kind() {
            Kind::Num(_) | Kind::Sym(_) | Kind::Jet(_) => self.clone(),
            Kind::Add(ts) => {
                let mut acc = Accum::default();
                for t in ts {
                    acc.push_all(&t.expand());
                }
                acc.finish()
            }
            Kind::Mul(fs) => {
                let mut acc: Vec<Expr> = vec![Expr::one()];
                for f in fs {
                    let g = f.expand();
                    acc = product(&acc, g.terms());
                }
                let mut out = Accum::default();
                for t in acc {
                    out.push(t);
                }
                out.finish()
            }
            Kind::Pow(b, n) => {
                let base = b.expand();
                if *n > 0 && matches!(base.kind(), Kind::Add(_)) {
                    let mut acc: Vec<Expr> = vec![Expr::one()];
                    for _ in 0..*n {
                        acc = product(&acc, base.terms());
                        let mut merged = Accum::default();
                        for t in acc {
                            merged.push(t);
                        }
                        acc = merged.finish().terms().to_vec();
                    }
                    Expr::add(acc)
                } else {
                    base.pow(*n)
                }
            }
            Kind::Apply(f, args) => Expr::apply(f.clone(), args.iter().map(|a| a.expand()).collect()),
            Kind::Int(e, v) => Expr::integral(&e.expand(), v),
        }
    }
}

fn product(acc: &[Expr], terms: &[Expr]) -> Vec<Expr> {
    let mut out = Vec::with_capacity(acc.len() * terms.len());
    for a in acc {
        for t in terms {
            out.push(Expr::mul([a.clone(), t.clone()]));
        }
    }
    out
}

/// Like-term accumulator that avoids re-sorting on every insertion.
#[derive(Default)]
pub(crate) struct Accum {
    map: HashMap<Expr, Q>,
    order: Vec<Expr>,
    constant: Q,
}

impl Accum {
    pub(crate) fn push(&mut self, t: Expr) {
        let (c, rest) = t.split_coeff();
        self.push_scaled(c, rest);
    }

    pub(crate) fn push_scaled(&mut self, c: Q, rest: Expr) {
        if c.is_zero() {
            return;
        }
        if rest.is_one() {
            self.constant += c;
            return;
        }
        match self.map.get_mut(&rest) {
            Some(v) => *v += c,
            None => {
                self.order.push(rest.clone());
                self.map.insert(rest, c);
            }
        }
    }

    pub(crate) fn push_all(&mut self, e: &Expr) {
        for t in e.terms() {
            self.push(t.clone());
        }
    }

    pub(crate) fn finish(mut self) -> Expr {
        let mut terms = Vec::with_capacity(self.order.len() + 1);
        terms.push(Expr::num(self.constant));
        for rest in self.order {
            let c = self.map.remove(&rest).unwrap();
            if !c.is_zero() {
                terms.push(rest.scale(&c));
            }
        }
        Expr::add(terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial() {
        let a = Expr::jet_of("q", &["x"]);
        let b = Expr::jet_of("q", &["y"]);
        let e = (&a + &b).pow(2).expand();
        let want = a.pow(2) + Expr::int(2) * &a * &b + b.pow(2);
        assert_eq!(e, want);
        assert!(e.is_expanded());
    }

    #[test]
    fn negative_powers_stay_atoms() {
        let x = Expr::sym("x");
        let e = (&x * (&x + Expr::one()).recip()).expand();
        assert_eq!(e, &x * (&x + Expr::one()).recip());
        let p = ((&x + Expr::one()) * (&x - Expr::one())).expand();
        assert_eq!(p, x.pow(2) - Expr::one());
    }
}
