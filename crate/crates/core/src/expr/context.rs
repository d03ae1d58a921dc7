//! Symbol registry consulted by the parser.

use super::jet::Name;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolKind {
    Independent,
    Dependent,
    Constant,
    Function,
}

/// Registry of independent and dependent variables, constants and
/// arbitrary functions (with their argument lists).
#[derive(Clone, Debug, Default)]
pub struct Context {
    independent: Vec<Name>,
    dependent: Vec<Name>,
    constants: Vec<Name>,
    functions: Vec<(Name, Vec<Name>)>,
}

impl Context {
    pub fn new() -> Self {
        Context::default()
    }

    /// Coordinates `x, y, z, t`, fields `u, q, v`, the shared constants
    /// and the symmetry functions `F1(t), F2(t)`.
    pub fn kdv() -> Self {
        let mut ctx = Context::new()
            .independent(&["x", "y", "z", "t"])
            .dependent(&["u", "q", "v"])
            .constants(&["pi", "I", "alpha", "alpha1", "alpha2", "lambda", "g2", "g3"]);
        for i in 1..=7 {
            ctx = ctx.constants(&[
                format!("C{i}"),
                format!("c{i}"),
                format!("a{i}"),
                format!("b{i}"),
                format!("eps{i}"),
            ]);
        }
        ctx.function("F1", &["t"]).function("F2", &["t"])
    }

    fn check_fresh(&self, name: &str) {
        if let Some(kind) = self.kind_of(name) {
            panic!("`{name}` already registered as {kind:?}");
        }
    }

    pub fn independent<S: AsRef<str>>(mut self, names: &[S]) -> Self {
        for n in names {
            if !self.is_independent(n.as_ref()) {
                self.check_fresh(n.as_ref());
                self.independent.push(n.as_ref().into());
            }
        }
        self
    }

    pub fn dependent<S: AsRef<str>>(mut self, names: &[S]) -> Self {
        for n in names {
            if !self.is_dependent(n.as_ref()) {
                self.check_fresh(n.as_ref());
                self.dependent.push(n.as_ref().into());
            }
        }
        self
    }

    pub fn constants<S: AsRef<str>>(mut self, names: &[S]) -> Self {
        for n in names {
            if !self.is_constant(n.as_ref()) {
                self.check_fresh(n.as_ref());
                self.constants.push(n.as_ref().into());
            }
        }
        self
    }

    /// Declares (or redeclares) an arbitrary function with its argument names.
    pub fn function<S: AsRef<str>>(mut self, name: &str, args: &[S]) -> Self {
        let args: Vec<Name> = args.iter().map(|a| a.as_ref().into()).collect();
        if let Some(slot) = self.functions.iter_mut().find(|(n, _)| &**n == name) {
            slot.1 = args;
            return self;
        }
        self.check_fresh(name);
        self.functions.push((name.into(), args));
        self
    }

    pub fn kind_of(&self, name: &str) -> Option<SymbolKind> {
        if self.is_independent(name) {
            Some(SymbolKind::Independent)
        } else if self.is_dependent(name) {
            Some(SymbolKind::Dependent)
        } else if self.is_constant(name) {
            Some(SymbolKind::Constant)
        } else if self.function_args(name).is_some() {
            Some(SymbolKind::Function)
        } else {
            None
        }
    }

    pub fn is_independent(&self, name: &str) -> bool {
        self.independent.iter().any(|n| &**n == name)
    }

    pub fn is_dependent(&self, name: &str) -> bool {
        self.dependent.iter().any(|n| &**n == name)
    }

    pub fn is_constant(&self, name: &str) -> bool {
        self.constants.iter().any(|n| &**n == name)
    }

    pub fn function_args(&self, name: &str) -> Option<&[Name]> {
        self.functions
            .iter()
            .find(|(n, _)| &**n == name)
            .map(|(_, a)| a.as_slice())
    }

    pub fn independents(&self) -> &[Name] {
        &self.independent
    }

    pub fn dependents(&self) -> &[Name] {
        &self.dependent
    }

    pub fn constant_names(&self) -> &[Name] {
        &self.constants
    }
}
