//! Textual grammar for module expressions.
//!
//! ```text
//! expr   := tensor ("(+)" tensor)*
//! tensor := atom ("(x)" atom)*
//! atom   := "std" | "dual" | "const" ["(" group ")"] | "lie(" n ")"
//!         | "ext(" n "," expr ")" | "hom(" expr "," expr ")" | "(" expr ")"
//! group  := "0" | term ("+" term)*      term := "Z" ["^" n] | "Z/" n
//! ```

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use super::ModuleSpec;
use crate::error::{Error, Result};
use crate::stability::FinAbPresentation;

impl ModuleSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Parser { src: text, pos: 0 };
        let spec = p.expr()?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(Error::parse(p.pos, "unexpected trailing input"));
        }
        Ok(spec)
    }
}

impl std::str::FromStr for ModuleSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(Error::parse(self.pos, format!("expected `{token}`")))
        }
    }

    fn number(&mut self) -> Result<usize> {
        self.skip_ws();
        let digits = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        if digits == 0 {
            return Err(Error::parse(self.pos, "expected a nonnegative integer"));
        }
        let n = self.rest()[..digits]
            .parse()
            .map_err(|_| Error::parse(self.pos, "integer too large"))?;
        self.pos += digits;
        Ok(n)
    }

    fn keyword(&mut self) -> String {
        self.skip_ws();
        let len = self
            .rest()
            .bytes()
            .take_while(|b| b.is_ascii_alphabetic())
            .count();
        let word = self.rest()[..len].to_ascii_lowercase();
        self.pos += len;
        word
    }

    fn expr(&mut self) -> Result<ModuleSpec> {
        let mut lhs = self.tensor()?;
        while self.eat("(+)") {
            let rhs = self.tensor()?;
            lhs = ModuleSpec::Sum(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn tensor(&mut self) -> Result<ModuleSpec> {
        let mut lhs = self.atom()?;
        while self.eat("(x)") {
            let rhs = self.atom()?;
            lhs = ModuleSpec::Tensor(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> Result<ModuleSpec> {
        self.skip_ws();
        let start = self.pos;
        if self.rest().starts_with("(+)") || self.rest().starts_with("(x)") {
            return Err(Error::parse(start, "missing operand"));
        }
        if self.eat("(") {
            let inner = self.expr()?;
            self.expect(")")?;
            return Ok(inner);
        }
        match self.keyword().as_str() {
            "std" => Ok(ModuleSpec::Std),
            "dual" | "dualstd" => Ok(ModuleSpec::Dual),
            "const" => {
                self.skip_ws();
                let operator = self.rest().starts_with("(+)") || self.rest().starts_with("(x)");
                if !operator && self.eat("(") {
                    let g = self.group()?;
                    self.expect(")")?;
                    Ok(ModuleSpec::Const(g))
                } else {
                    Ok(ModuleSpec::Const(FinAbPresentation::free(1)))
                }
            }
            "lie" => {
                self.expect("(")?;
                let at = self.pos;
                let n = self.number()?;
                if n == 0 {
                    return Err(Error::parse(at, "lie(n) needs n >= 1"));
                }
                self.expect(")")?;
                Ok(ModuleSpec::Lie(n))
            }
            "ext" => {
                self.expect("(")?;
                let t = self.number()?;
                self.expect(",")?;
                let inner = self.expr()?;
                self.expect(")")?;
                Ok(ModuleSpec::Ext(t, Box::new(inner)))
            }
            "hom" => {
                self.expect("(")?;
                let source = self.expr()?;
                self.expect(",")?;
                let target = self.expr()?;
                self.expect(")")?;
                Ok(ModuleSpec::Hom(Box::new(source), Box::new(target)))
            }
            "" => Err(Error::parse(start, "expected a module expression")),
            other => Err(Error::parse(start, format!("unknown module `{other}`"))),
        }
    }

    fn group(&mut self) -> Result<FinAbPresentation> {
        if self.eat("0") {
            return Ok(FinAbPresentation::default());
        }
        let mut orders = Vec::new();
        loop {
            self.expect("Z")?;
            if self.eat("/") {
                let at = self.pos;
                let d = self.number()?;
                if d == 0 {
                    return Err(Error::parse(at, "Z/0 is not allowed, write Z"));
                }
                orders.push(BigInt::from(d));
            } else if self.eat("^") {
                let k = self.number()?;
                orders.extend(std::iter::repeat_n(BigInt::zero(), k));
            } else {
                orders.push(BigInt::zero());
            }
            if !self.eat("+") {
                break;
            }
        }
        Ok(FinAbPresentation::from_cyclic_orders(&orders))
    }
}

fn write_group(f: &mut fmt::Formatter<'_>, g: &FinAbPresentation) -> fmt::Result {
    if g.free_rank == 1 && g.invariant_factors.is_empty() {
        return write!(f, "const");
    }
    write!(f, "const({g})")
}

impl fmt::Display for ModuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModuleSpec::Const(g) => write_group(f, g),
            ModuleSpec::Std => write!(f, "std"),
            ModuleSpec::Dual => write!(f, "dual"),
            ModuleSpec::Lie(n) => write!(f, "lie({n})"),
            ModuleSpec::Ext(t, x) => write!(f, "ext({t}, {x})"),
            ModuleSpec::Hom(x, y) => write!(f, "hom({x}, {y})"),
            ModuleSpec::Sum(x, y) => {
                write!(f, "{x} (+) ")?;
                match **y {
                    ModuleSpec::Sum(..) => write!(f, "({y})"),
                    _ => write!(f, "{y}"),
                }
            }
            ModuleSpec::Tensor(x, y) => {
                match **x {
                    ModuleSpec::Sum(..) => write!(f, "({x})")?,
                    _ => write!(f, "{x}")?,
                }
                write!(f, " (x) ")?;
                match **y {
                    ModuleSpec::Sum(..) | ModuleSpec::Tensor(..) => write!(f, "({y})"),
                    _ => write!(f, "{y}"),
                }
            }
        }
    }
}
