//! Jet variables: a dependent variable tagged with a derivative multi-index.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;

/// Shared, cheaply clonable identifier.
pub type Name = Arc<str>;

/// Rank used to order independent variables: the physical coordinates
/// `x, y, z, t` come first in that order, everything else follows by name.
pub fn var_rank(name: &str) -> u8 {
    match name {
        "x" => 0,
        "y" => 1,
        "z" => 2,
        "t" => 3,
        _ => 4,
    }
}

/// Total order on variable names consistent with [`var_rank`].
pub fn cmp_var(a: &str, b: &str) -> Ordering {
    var_rank(a).cmp(&var_rank(b)).then_with(|| a.cmp(b))
}

/// Derivative multi-index: nonnegative counts per independent variable.
///
/// Stored sparsely as `(variable, count)` pairs sorted by [`cmp_var`] with
/// every count nonzero, so two indices are equal iff they denote the same
/// multiset of differentiations.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex {
    entries: Vec<(Name, u32)>,
}

impl MultiIndex {
    pub fn empty() -> Self {
        MultiIndex { entries: Vec::new() }
    }

    /// Builds an index from a sequence of variables, e.g. `["x","x","y","t"]`.
    pub fn from_vars<I, S>(vars: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut idx = MultiIndex::empty();
        for v in vars {
            idx = idx.with(&Name::from(v.as_ref()), 1);
        }
        idx
    }

    pub fn from_counts<I>(counts: I) -> Self
    where
        I: IntoIterator<Item = (Name, u32)>,
    {
        let mut idx = MultiIndex::empty();
        for (v, c) in counts {
            idx = idx.with(&v, c);
        }
        idx
    }

    pub fn entries(&self) -> &[(Name, u32)] {
        &self.entries
    }

    pub fn count(&self, var: &str) -> u32 {
        self.entries
            .iter()
            .find(|(v, _)| &**v == var)
            .map(|(_, c)| *c)
            .unwrap_or(0)
    }

    pub fn order(&self) -> u32 {
        self.entries.iter().map(|(_, c)| c).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Index with `n` more differentiations in `var`.
    pub fn with(&self, var: &Name, n: u32) -> Self {
        if n == 0 {
            return self.clone();
        }
        let mut entries = self.entries.clone();
        match entries.binary_search_by(|(v, _)| cmp_var(v, var)) {
            Ok(pos) => entries[pos].1 += n,
            Err(pos) => entries.insert(pos, (var.clone(), n)),
        }
        MultiIndex { entries }
    }

    /// Index with one differentiation in `var` removed, if present.
    pub fn without(&self, var: &str) -> Option<Self> {
        let pos = self.entries.iter().position(|(v, _)| &**v == var)?;
        let mut entries = self.entries.clone();
        if entries[pos].1 == 1 {
            entries.remove(pos);
        } else {
            entries[pos].1 -= 1;
        }
        Some(MultiIndex { entries })
    }

    pub fn add(&self, other: &MultiIndex) -> Self {
        let mut out = self.clone();
        for (v, c) in &other.entries {
            out = out.with(v, *c);
        }
        out
    }

    /// Componentwise `self >= other`.
    pub fn dominates(&self, other: &MultiIndex) -> bool {
        other.entries.iter().all(|(v, c)| self.count(v) >= *c)
    }

    /// `self - other`, defined when `self` dominates `other`.
    pub fn sub(&self, other: &MultiIndex) -> Option<Self> {
        if !self.dominates(other) {
            return None;
        }
        let entries = self
            .entries
            .iter()
            .filter_map(|(v, c)| {
                let rest = c - other.count(v);
                (rest > 0).then(|| (v.clone(), rest))
            })
            .collect();
        Some(MultiIndex { entries })
    }

    /// The differentiations as a flat list of variables in rank order.
    pub fn flatten(&self) -> Vec<Name> {
        self.entries
            .iter()
            .flat_map(|(v, c)| std::iter::repeat(v.clone()).take(*c as usize))
            .collect()
    }

    /// Number of distinct orderings of the multiset: `|J|! / prod(J_v!)`.
    pub fn multinomial(&self) -> BigInt {
        let mut num = factorial(self.order());
        for (_, c) in &self.entries {
            num /= factorial(*c);
        }
        num
    }

    /// Every index `A` with `A <= self` componentwise.
    pub fn sub_indices(&self) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex::empty()];
        for (v, c) in &self.entries {
            let mut next = Vec::with_capacity(out.len() * (*c as usize + 1));
            for base in &out {
                for k in 0..=*c {
                    next.push(base.with(v, k));
                }
            }
            out = next;
        }
        out
    }

    /// True when every variable name is a single character, so the compact
    /// suffix notation `q_xxyt` is unambiguous.
    pub fn single_letter(&self) -> bool {
        self.entries.iter().all(|(v, _)| v.chars().count() == 1)
    }
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

impl Ord for MultiIndex {
    /// Lexicographic on the counts taken in variable rank order.
    fn cmp(&self, other: &Self) -> Ordering {
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.entries.get(i), other.entries.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((va, ca)), Some((vb, cb))) => match cmp_var(va, vb) {
                    // `self` has a positive count where `other` has zero
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        match ca.cmp(cb) {
                            Ordering::Equal => {}
                            o => return o,
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, v) in self.flatten().iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

/// A dependent variable together with a derivative multi-index.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct JetVar {
    pub dep: Name,
    pub index: MultiIndex,
}

impl JetVar {
    pub fn new(dep: impl Into<Name>, index: MultiIndex) -> Self {
        JetVar { dep: dep.into(), index }
    }

    pub fn bare(dep: impl Into<Name>) -> Self {
        JetVar::new(dep, MultiIndex::empty())
    }

    /// `q_xxyt` style constructor from a list of single variables.
    pub fn of<S: AsRef<str>>(dep: &str, vars: &[S]) -> Self {
        JetVar::new(dep, MultiIndex::from_vars(vars.iter().map(|s| s.as_ref())))
    }

    pub fn order(&self) -> u32 {
        self.index.order()
    }

    pub fn diff(&self, var: &Name) -> JetVar {
        JetVar {
            dep: self.dep.clone(),
            index: self.index.with(var, 1),
        }
    }

    pub fn diff_by(&self, index: &MultiIndex) -> JetVar {
        JetVar {
            dep: self.dep.clone(),
            index: self.index.add(index),
        }
    }
}

impl Ord for JetVar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dep
            .cmp(&other.dep)
            .then_with(|| self.index.cmp(&other.index))
    }
}

impl PartialOrd for JetVar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.dep, self.index)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_is_a_multiset() {
        let a = MultiIndex::from_vars(["x", "y", "x", "t"]);
        let b = MultiIndex::from_vars(["t", "x", "x", "y"]);
        assert_eq!(a, b);
        assert_eq!(a.order(), 4);
        assert_eq!(a.count("x"), 2);
        assert_eq!(a.flatten().iter().map(|v| &**v).collect::<Vec<_>>(), ["x", "x", "y", "t"]);
    }

    #[test]
    fn dominance_and_difference() {
        let lead = MultiIndex::from_vars(["x", "x", "x", "x", "y", "z"]);
        let j = MultiIndex::from_vars(["x", "x", "x", "x", "y", "z", "t"]);
        assert!(j.dominates(&lead));
        assert_eq!(j.sub(&lead).unwrap(), MultiIndex::from_vars(["t"]));
        assert!(!lead.dominates(&j));
    }

    #[test]
    fn multinomial_counts_orderings() {
        let j = MultiIndex::from_vars(["x", "x", "y", "t"]);
        assert_eq!(j.multinomial(), BigInt::from(12));
        assert_eq!(MultiIndex::empty().multinomial(), BigInt::from(1));
        assert_eq!(j.sub_indices().len(), 3 * 2 * 2);
    }
}
