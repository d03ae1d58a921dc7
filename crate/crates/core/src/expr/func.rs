//! Function heads: built-in special functions and declared arbitrary functions.

use std::cmp::Ordering;

use super::jet::Name;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Builtin {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Ln,
    Sqrt,
    Arctan,
    Arctanh,
    Abs,
    Si,
    WeierstrassP,
    WeierstrassPPrime,
    WeierstrassZeta,
}

impl Builtin {
    pub const ALL: [Builtin; 15] = [
        Builtin::Sin,
        Builtin::Cos,
        Builtin::Sinh,
        Builtin::Cosh,
        Builtin::Tanh,
        Builtin::Exp,
        Builtin::Ln,
        Builtin::Sqrt,
        Builtin::Arctan,
        Builtin::Arctanh,
        Builtin::Abs,
        Builtin::Si,
        Builtin::WeierstrassP,
        Builtin::WeierstrassPPrime,
        Builtin::WeierstrassZeta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Sin => "sin",
            Builtin::Cos => "cos",
            Builtin::Sinh => "sinh",
            Builtin::Cosh => "cosh",
            Builtin::Tanh => "tanh",
            Builtin::Exp => "exp",
            Builtin::Ln => "ln",
            Builtin::Sqrt => "sqrt",
            Builtin::Arctan => "arctan",
            Builtin::Arctanh => "arctanh",
            Builtin::Abs => "abs",
            Builtin::Si => "Si",
            Builtin::WeierstrassP => "WeierstrassP",
            Builtin::WeierstrassPPrime => "WeierstrassPPrime",
            Builtin::WeierstrassZeta => "WeierstrassZeta",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Builtin::WeierstrassP | Builtin::WeierstrassPPrime | Builtin::WeierstrassZeta => 3,
            _ => 1,
        }
    }

    pub fn from_name(name: &str) -> Option<Builtin> {
        Builtin::ALL.iter().copied().find(|b| b.name() == name).or(match name {
            "log" => Some(Builtin::Ln),
            _ => None,
        })
    }

    pub fn is_weierstrass(self) -> bool {
        matches!(
            self,
            Builtin::WeierstrassP | Builtin::WeierstrassPPrime | Builtin::WeierstrassZeta
        )
    }
}

/// Head of a function application.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Builtin(Builtin),
    /// A declared arbitrary function together with how many times it has
    /// been differentiated in each argument slot.
    Named { name: Name, derivs: Vec<u32> },
}

impl Func {
    pub fn named(name: impl Into<Name>, arity: usize) -> Func {
        Func::Named {
            name: name.into(),
            derivs: vec![0; arity],
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Func::Builtin(b) => b.name(),
            Func::Named { name, .. } => name,
        }
    }

    pub fn is_named(&self) -> bool {
        matches!(self, Func::Named { .. })
    }

    /// The same head differentiated once more in slot `slot`.
    pub fn derived(&self, slot: usize) -> Option<Func> {
        match self {
            Func::Named { name, derivs } => {
                let mut derivs = derivs.clone();
                derivs[slot] += 1;
                Some(Func::Named {
                    name: name.clone(),
                    derivs,
                })
            }
            Func::Builtin(_) => None,
        }
    }
}

impl Ord for Func {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Func::Builtin(a), Func::Builtin(b)) => a.cmp(b),
            (Func::Builtin(_), Func::Named { .. }) => Ordering::Less,
            (Func::Named { .. }, Func::Builtin(_)) => Ordering::Greater,
            (Func::Named { name: a, derivs: da }, Func::Named { name: b, derivs: db }) => {
                a.cmp(b).then_with(|| da.cmp(db))
            }
        }
    }
}

impl PartialOrd for Func {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
