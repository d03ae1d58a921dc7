//! Transcribed reference data: equations, generators, algebra tables,
//! reduced equations, closed-form solutions and conserved vectors.
//!
//! Each data file holds `name := expr` entries in grammar text. Indented
//! lines continue the previous entry, `#` starts a comment line, and
//! `@context` / `@fn` directives set the parsing context of the entries that
//! follow.

use std::collections::HashMap;
use std::sync::OnceLock;

use thiserror::Error;

use crate::expr::{parse, Context, Expr, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("no catalog entry `{0}`")]
    Missing(String),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("entry `{name}`: {err}")]
    Parse { name: String, err: ParseError },
}

#[derive(Debug, Clone)]
pub struct Entry {
    pub name: String,
    pub text: String,
    pub context: Context,
}

impl Entry {
    pub fn expr(&self) -> Result<Expr, CatalogError> {
        parse(&self.text, &self.context).map_err(|err| CatalogError::Parse {
            name: self.name.clone(),
            err,
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct Catalog {
    entries: Vec<Entry>,
    index: HashMap<String, usize>,
}

/// Contexts addressable from `@context`.
///
/// `kdv` is the standard context, `fields` adds the vector-field basis
/// symbols `Dx .. Dq`, `table` adds `S1 .. S7` and `s`. Any other value is
/// `vars ; deps`, a fresh coordinate system sharing the standard constants.
pub fn named_context(spec: &str) -> Result<Context, String> {
    let spec = spec.trim();
    match spec {
        "kdv" => Ok(Context::kdv()),
        "fields" => Ok(Context::kdv().constants(&["Dx", "Dy", "Dz", "Dt", "Dq"])),
        "table" => Ok(Context::kdv().constants(&["S1", "S2", "S3", "S4", "S5", "S6", "S7", "s"])),
        _ => {
            let (vars, deps) = spec
                .split_once(';')
                .ok_or_else(|| format!("unknown context `{spec}`"))?;
            let vars: Vec<&str> = vars.split_whitespace().collect();
            let deps: Vec<&str> = deps.split_whitespace().collect();
            Ok(local_context(&vars, &deps))
        }
    }
}

/// Coordinates `vars`, fields `deps`, and the standard constants.
pub fn local_context(vars: &[&str], deps: &[&str]) -> Context {
    let base = Context::kdv();
    Context::new()
        .constants(base.constant_names())
        .independent(vars)
        .dependent(deps)
}

fn parse_fn_decls(ctx: Context, decls: &str) -> Result<Context, String> {
    let mut ctx = ctx;
    let mut rest = decls.trim();
    while !rest.is_empty() {
        let open = rest.find('(').ok_or_else(|| format!("bad function declaration `{rest}`"))?;
        let close = rest.find(')').ok_or_else(|| format!("bad function declaration `{rest}`"))?;
        let name = rest[..open].trim();
        let args: Vec<&str> = rest[open + 1..close].split(',').map(str::trim).collect();
        ctx = ctx.function(name, &args);
        rest = rest[close + 1..].trim();
    }
    Ok(ctx)
}

impl Catalog {
    pub fn load(src: &str) -> Result<Catalog, CatalogError> {
        let mut cat = Catalog::default();
        let mut ctx = Context::kdv();
        for (no, raw) in src.lines().enumerate() {
            let line = no + 1;
            let fmt_err = |msg: String| CatalogError::Format { line, msg };
            if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
                continue;
            }
            if raw.starts_with(char::is_whitespace) {
                let last = cat
                    .entries
                    .last_mut()
                    .ok_or_else(|| fmt_err("continuation without an entry".into()))?;
                last.text.push(' ');
                last.text.push_str(raw.trim());
                continue;
            }
            if let Some(spec) = raw.strip_prefix("@context") {
                ctx = named_context(spec).map_err(fmt_err)?;
                continue;
            }
            if let Some(decls) = raw.strip_prefix("@fn") {
                ctx = parse_fn_decls(ctx, decls).map_err(fmt_err)?;
                continue;
            }
            let (name, text) = raw
                .split_once(":=")
                .ok_or_else(|| fmt_err(format!("expected `name := expr`, got `{raw}`")))?;
            let name = name.trim().to_string();
            if cat.index.contains_key(&name) {
                return Err(fmt_err(format!("duplicate entry `{name}`")));
            }
            cat.index.insert(name.clone(), cat.entries.len());
            cat.entries.push(Entry {
                name,
                text: text.trim().to_string(),
                context: ctx.clone(),
            });
        }
        Ok(cat)
    }

    pub fn get(&self, name: &str) -> Result<&Entry, CatalogError> {
        self.index
            .get(name)
            .map(|&i| &self.entries[i])
            .ok_or_else(|| CatalogError::Missing(name.to_string()))
    }

    pub fn expr(&self, name: &str) -> Result<Expr, CatalogError> {
        self.get(name)?.expr()
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }
}

macro_rules! data_file {
    ($fn_name:ident, $file:literal) => {
        pub fn $fn_name() -> &'static Catalog {
            static CELL: OnceLock<Catalog> = OnceLock::new();
            CELL.get_or_init(|| {
                Catalog::load(include_str!(concat!("../data/", $file)))
                    .unwrap_or_else(|e| panic!("{}: {e}", $file))
            })
        }
    };
}

data_file!(equations, "equations.txt");
data_file!(generators, "generators.txt");
data_file!(tables, "tables.txt");
data_file!(reductions, "reductions.txt");
data_file!(solutions, "solutions.txt");
data_file!(conserved, "conserved.txt");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_parses() {
        for cat in [equations(), generators(), tables(), reductions(), solutions(), conserved()] {
            for e in cat.entries() {
                if e.name == "optimal" {
                    continue;
                }
                e.expr().unwrap_or_else(|err| panic!("{err}"));
            }
        }
    }

    #[test]
    fn continuation_and_directives() {
        let src = "@context x ; f\na := f_x\n   + f_xx\n@fn G(x)\nb := G(x)\n";
        let cat = Catalog::load(src).unwrap();
        assert_eq!(cat.get("a").unwrap().text, "f_x + f_xx");
        assert!(cat.expr("b").is_ok());
        assert!(matches!(cat.get("c"), Err(CatalogError::Missing(_))));
    }
}
