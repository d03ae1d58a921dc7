//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr   := ('+'|'-')? term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | base ('^' '-'? integer)?
//! base   := integer | name | name '_' jetletters | name '(' args ')'
//!         | 'D' '[' expr ';' vars ']' | 'D' '[' name '(' args ')' ';' slots ']'
//!         | 'Int' '[' expr ',' name ']' | '(' expr ')'
//! ```

use num_bigint::BigInt;
use thiserror::Error;

use super::context::{Context, SymbolKind};
use super::{Builtin, Expr, Func, JetVar, Kind, MultiIndex, Name, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown symbol `{name}` at {pos}")]
    UnknownSymbol { pos: usize, name: String },
    #[error("malformed multi-index suffix `{suffix}` at {pos}")]
    MalformedJet { pos: usize, suffix: String },
}

pub fn parse(text: &str, ctx: &Context) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        ctx,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax(format!("unexpected `{}`", p.src[p.pos] as char)));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ctx: &'a Context,
}

impl Parser<'_> {
    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.syntax(format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = Vec::new();
        let neg = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        let first = self.term()?;
        terms.push(if neg { -first } else { first });
        loop {
            if self.eat(b'+') {
                terms.push(self.term()?);
            } else if self.eat(b'-') {
                terms.push(-self.term()?);
            } else {
                break;
            }
        }
        Ok(Expr::add(terms))
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.factor()?];
        loop {
            if self.eat(b'*') {
                factors.push(self.factor()?);
            } else if self.peek() == Some(b'/') {
                let at = self.pos;
                self.pos += 1;
                let d = self.factor()?;
                if d.is_zero() {
                    self.pos = at;
                    return Err(self.syntax("division by zero"));
                }
                factors.push(d.recip());
            } else {
                break;
            }
        }
        Ok(Expr::mul(factors))
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            return Ok(-self.factor()?);
        }
        let b = self.base()?;
        if self.eat(b'^') {
            let neg = self.eat(b'-');
            let paren = self.eat(b'(');
            let neg = if paren { self.eat(b'-') || neg } else { neg };
            let n = self.integer()?;
            if paren {
                self.expect(b')')?;
            }
            let n: i64 = n
                .try_into()
                .map_err(|_| self.syntax("exponent out of range"))?;
            let n = if neg { -n } else { n };
            if b.is_zero() && n < 0 {
                return Err(self.syntax("division by zero"));
            }
            return Ok(b.pow(n));
        }
        Ok(b)
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.syntax("expected integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn ident(&mut self) -> Option<(usize, String)> {
        self.skip_ws();
        let start = self.pos;
        if self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                self.pos += 1;
            }
            Some((start, String::from_utf8(self.src[start..self.pos].to_vec()).unwrap()))
        } else {
            None
        }
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => Ok(Expr::num(Q::from_integer(self.integer()?))),
            Some(c) if c.is_ascii_alphabetic() => {
                let (start, name) = self.ident().unwrap();
                self.named(start, name)
            }
            Some(c) => Err(self.syntax(format!("unexpected `{}`", c as char))),
            None => Err(self.syntax("unexpected end of input")),
        }
    }

    fn named(&mut self, start: usize, name: String) -> Result<Expr, ParseError> {
        let kind = self.ctx.kind_of(&name);
        if kind.is_none() && self.src.get(self.pos) == Some(&b'[') {
            match name.as_str() {
                "D" => return self.functional_derivative(),
                "Int" => {
                    self.pos += 1;
                    let e = self.expr()?;
                    self.expect(b',')?;
                    let (vpos, var) = self.ident().ok_or_else(|| self.syntax("expected variable"))?;
                    if !self.ctx.is_independent(&var) {
                        return Err(ParseError::UnknownSymbol { pos: vpos, name: var });
                    }
                    self.expect(b']')?;
                    return Ok(Expr::integral(&e, &Name::from(var)));
                }
                _ => {}
            }
        }
        match kind {
            Some(SymbolKind::Independent) | Some(SymbolKind::Constant) => Ok(Expr::sym(name)),
            Some(SymbolKind::Dependent) => {
                if self.src.get(self.pos) == Some(&b'_') {
                    self.pos += 1;
                    let spos = self.pos;
                    while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
                        self.pos += 1;
                    }
                    let suffix = std::str::from_utf8(&self.src[spos..self.pos]).unwrap();
                    let index = self.split_suffix(suffix).ok_or_else(|| ParseError::MalformedJet {
                        pos: spos,
                        suffix: suffix.to_string(),
                    })?;
                    Ok(Expr::jet(JetVar::new(name.as_str(), index)))
                } else {
                    Ok(Expr::jet(JetVar::bare(name.as_str())))
                }
            }
            Some(SymbolKind::Function) => {
                let args = self.call_args()?;
                let arity = self.ctx.function_args(&name).unwrap().len();
                if args.len() != arity {
                    return Err(ParseError::Syntax {
                        pos: start,
                        msg: format!("`{name}` takes {arity} arguments, got {}", args.len()),
                    });
                }
                Ok(Expr::apply(Func::named(name.as_str(), arity), args))
            }
            None => {
                if name == "sech" || Builtin::from_name(&name).is_some() {
                    if self.peek() != Some(b'(') {
                        return Err(ParseError::UnknownSymbol { pos: start, name });
                    }
                    let args = self.call_args()?;
                    if name == "sech" {
                        if args.len() != 1 {
                            return Err(ParseError::Syntax {
                                pos: start,
                                msg: "`sech` takes 1 argument".into(),
                            });
                        }
                        return Ok(Expr::sech(args.into_iter().next().unwrap()));
                    }
                    let b = Builtin::from_name(&name).unwrap();
                    if args.len() != b.arity() {
                        return Err(ParseError::Syntax {
                            pos: start,
                            msg: format!("`{name}` takes {} arguments, got {}", b.arity(), args.len()),
                        });
                    }
                    Ok(Expr::apply(Func::Builtin(b), args))
                } else {
                    Err(ParseError::UnknownSymbol { pos: start, name })
                }
            }
        }
    }

    fn call_args(&mut self) -> Result<Vec<Expr>, ParseError> {
        self.expect(b'(')?;
        let mut args = vec![self.expr()?];
        while self.eat(b',') {
            args.push(self.expr()?);
        }
        self.expect(b')')?;
        Ok(args)
    }

    /// Greedy longest match of registered independent variables.
    fn split_suffix(&self, suffix: &str) -> Option<MultiIndex> {
        if suffix.is_empty() {
            return None;
        }
        let mut vars = Vec::new();
        let mut rest = suffix;
        while !rest.is_empty() {
            let best = self
                .ctx
                .independents()
                .iter()
                .filter(|v| rest.starts_with(&***v))
                .max_by_key(|v| v.len())?;
            vars.push(best.clone());
            rest = &rest[best.len()..];
        }
        Some(MultiIndex::from_vars(vars.iter().map(|v| &**v)))
    }

    /// `D[expr; vars]` (total derivative) or `D[F(args); slots]`.
    fn functional_derivative(&mut self) -> Result<Expr, ParseError> {
        self.expect(b'[')?;
        let inner = self.expr()?;
        self.expect(b';')?;
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            let (name, mut derivs, args) = match inner.kind() {
                Kind::Apply(Func::Named { name, derivs }, args) => (name.clone(), derivs.clone(), args.clone()),
                _ => return Err(self.syntax("derivative slots require an arbitrary function")),
            };
            loop {
                let slot = self.integer()?;
                let slot: usize = slot.try_into().unwrap_or(0);
                if slot == 0 || slot > derivs.len() {
                    return Err(self.syntax("derivative slot out of range"));
                }
                derivs[slot - 1] += 1;
                if !self.eat(b',') {
                    break;
                }
            }
            self.expect(b']')?;
            return Ok(Expr::apply(Func::Named { name, derivs }, args));
        }
        let mut out = inner;
        loop {
            let (vpos, v) = self.ident().ok_or_else(|| self.syntax("expected variable"))?;
            if !self.ctx.is_independent(&v) {
                return Err(ParseError::UnknownSymbol { pos: vpos, name: v });
            }
            out = out
                .total_diff(&Name::from(v))
                .map_err(|e| ParseError::Syntax {
                    pos: vpos,
                    msg: e.to_string(),
                })?;
            if !self.eat(b',') {
                break;
            }
        }
        self.expect(b']')?;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_suffix() {
        let ctx = Context::kdv();
        let e = parse("q_xxyt", &ctx).unwrap();
        let j = e.as_jet().unwrap();
        assert_eq!(&*j.dep, "q");
        assert_eq!(j.index.count("x"), 2);
        assert_eq!(j.index.count("y"), 1);
        assert_eq!(j.index.count("t"), 1);
        assert_eq!(parse("D[q; x,x,y,t]", &ctx).unwrap(), e);
        let d = parse("D[u*u_x; x]", &ctx).unwrap().expand();
        assert_eq!(d, parse("u_x^2 + u*u_xx", &ctx).unwrap());
    }

    #[test]
    fn round_trip() {
        let ctx = Context::kdv();
        for s in [
            "u_t - 6*u*u_x + u_xxx",
            "Int[u_y, x]",
            "-2/3*q_x^2*cosh(x - t)^-2",
            "6*(alpha1 - x + z + sin(y))^-1 + alpha2",
            "D[F1(t); 1, 1]*x",
        ] {
            let e = parse(s, &ctx).unwrap();
            let again = parse(&e.to_string(), &ctx).unwrap();
            assert_eq!(e, again, "{s} -> {e}");
        }
        let e = parse("u_t - 6*u*u_x + u_xxx", &ctx).unwrap();
        assert_eq!(e.terms().len(), 3);
    }

    #[test]
    fn antiderivative_node() {
        let ctx = Context::kdv();
        let e = parse("Int[u_y, x]", &ctx).unwrap();
        assert!(matches!(e.kind(), Kind::Int(..)));
        assert_eq!(parse("Int[u_xy, x]", &ctx).unwrap(), parse("u_y", &ctx).unwrap());
    }

    #[test]
    fn errors() {
        let ctx = Context::kdv();
        assert!(matches!(parse("q_xw", &ctx), Err(ParseError::MalformedJet { .. })));
        assert!(matches!(parse("w + 1", &ctx), Err(ParseError::UnknownSymbol { .. })));
        assert!(matches!(parse("x + * y", &ctx), Err(ParseError::Syntax { pos: 4, .. })));
        assert!(matches!(parse("1/0", &ctx), Err(ParseError::Syntax { .. })));
    }
}
