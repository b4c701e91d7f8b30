//! Recursive descent parser for the expression grammar.
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' exponent)?
//! atom    := integer | name | '(' sum ')'
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{CsaError, Result};
use crate::expr::{Expr, Expression};
use crate::jet::{JetContext, SymbolRole};
use crate::poly::Symbol;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Op(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        let (l0, c0) = (line, column);
        if c == '\n' {
            line += 1;
            column = 1;
            k += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            k += 1;
            continue;
        }
        let start = k;
        if c.is_ascii_digit() {
            while k < chars.len() && chars[k].is_ascii_digit() {
                k += 1;
            }
            let s: String = chars[start..k].iter().collect();
            out.push(Token {
                tok: Tok::Int(s.parse().expect("digits")),
                line: l0,
                column: c0,
            });
        } else if c.is_ascii_alphabetic() {
            while k < chars.len() && chars[k].is_ascii_alphanumeric() {
                k += 1;
            }
            if k < chars.len() && chars[k] == '_' {
                k += 1;
                while k < chars.len() && chars[k].is_ascii_alphanumeric() {
                    k += 1;
                }
            } else {
                while k < chars.len() && chars[k] == '\'' {
                    k += 1;
                }
            }
            out.push(Token {
                tok: Tok::Name(chars[start..k].iter().collect()),
                line: l0,
                column: c0,
            });
        } else if "+-*/^()".contains(c) {
            k += 1;
            out.push(Token {
                tok: Tok::Op(c),
                line: l0,
                column: c0,
            });
        } else {
            return Err(CsaError::Syntax {
                line: l0,
                column: c0,
                message: format!("unexpected character `{c}`"),
            });
        }
        column += k - start;
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    ctx: &'a JetContext,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, t: &Token, message: impl Into<String>) -> Result<T> {
        Err(CsaError::Syntax {
            line: t.line,
            column: t.column,
            message: message.into(),
        })
    }

    fn expect_op(&mut self, c: char) -> Result<()> {
        let t = self.bump();
        if t.tok == Tok::Op(c) {
            Ok(())
        } else {
            self.error(&t, format!("expected `{c}`"))
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut items = vec![self.product()?];
        loop {
            match self.peek().tok {
                Tok::Op('+') => {
                    self.bump();
                    items.push(self.product()?);
                }
                Tok::Op('-') => {
                    self.bump();
                    items.push(Expr::Neg(Box::new(self.product()?)));
                }
                _ => break,
            }
        }
        Ok(if items.len() == 1 {
            items.pop().expect("one item")
        } else {
            Expr::Sum(items)
        })
    }

    fn product(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Op('*') => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = match acc {
                        Expr::Product(mut v) => {
                            v.push(rhs);
                            Expr::Product(v)
                        }
                        other => Expr::Product(vec![other, rhs]),
                    };
                }
                Tok::Op('/') => {
                    let slash = self.bump();
                    let rhs = self.unary()?;
                    if rhs.canonicalize()?.is_zero() {
                        return self.error(&slash, "division by zero");
                    }
                    acc = Expr::Quotient(Box::new(acc), Box::new(rhs));
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek().tok == Tok::Op('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek().tok != Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        let paren = self.peek().tok == Tok::Op('(');
        if paren {
            self.bump();
        }
        let neg = self.peek().tok == Tok::Op('-');
        if neg {
            self.bump();
        }
        let t = self.bump();
        let Tok::Int(n) = &t.tok else {
            return self.error(&t, "exponent must be an integer");
        };
        let Ok(mut e) = i32::try_from(n.clone()) else {
            return self.error(&t, "exponent too large");
        };
        if neg {
            e = -e;
        }
        if paren {
            self.expect_op(')')?;
        }
        if self.peek().tok == Tok::Op('^') {
            let t = self.peek().clone();
            return self.error(&t, "chained `^` is ambiguous, use parentheses");
        }
        Ok(Expr::Pow(Box::new(base), e))
    }

    fn atom(&mut self) -> Result<Expr> {
        let t = self.bump();
        match &t.tok {
            Tok::Int(n) => Ok(Expr::Const(BigRational::from_integer(n.clone()))),
            Tok::Op('(') => {
                let e = self.sum()?;
                self.expect_op(')')?;
                Ok(e)
            }
            Tok::Name(name) => {
                if self.peek().tok == Tok::Op('(') {
                    return self.error(
                        &t,
                        format!("function application `{name}(...)` is not supported"),
                    );
                }
                self.resolve(name, &t)
            }
            Tok::End => self.error(&t, "unexpected end of input"),
            Tok::Op(c) => self.error(&t, format!("unexpected `{c}`")),
        }
    }

    fn resolve(&self, name: &str, t: &Token) -> Result<Expr> {
        if name == "i" || name == "j" {
            return self.error(t, format!("imaginary unit `{name}` is not allowed here"));
        }
        match self.ctx.role_of_name(name) {
            Some(SymbolRole::Jet { index, .. }) if index.len() > self.ctx.max_order() => {
                Err(CsaError::OrderExceeded {
                    name: name.to_string(),
                    order: index.len(),
                    max: self.ctx.max_order(),
                })
            }
            Some(_) => Ok(Expr::Sym(Symbol::new(name))),
            None => Err(CsaError::UnknownIdentifier {
                name: name.to_string(),
                line: t.line,
                column: t.column,
            }),
        }
    }
}

/// Parses into an unsimplified tree.
pub fn parse_expr(text: &str, ctx: &JetContext) -> Result<Expr> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
        ctx,
    };
    let e = p.sum()?;
    let t = p.peek().clone();
    if t.tok != Tok::End {
        return p.error(&t, "unexpected trailing input");
    }
    Ok(e)
}

/// Parses and canonicalizes.
pub fn parse(text: &str, ctx: &JetContext) -> Result<Expression> {
    parse_expr(text, ctx)?.canonicalize()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ode() -> JetContext {
        JetContext::new(&["s"], &["u"]).unwrap()
    }

    #[test]
    fn quotient_and_negative_power_agree() {
        let a = parse("u^2 / s^5", &ode()).unwrap();
        let b = parse("s^-5*u^2", &ode()).unwrap();
        let c = parse("s^(-5)*u^2", &ode()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a.to_string(), "u^2/s^5");
    }

    #[test]
    fn precedence() {
        let e = parse("-u^2 + 2*3 - 5/2", &ode()).unwrap();
        assert_eq!(e.to_string(), "-u^2 + 7/2");
    }

    #[test]
    fn errors_carry_location() {
        match parse("u +\n  * s", &ode()) {
            Err(CsaError::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse("u + v", &ode()),
            Err(CsaError::UnknownIdentifier { .. })
        ));
        assert!(matches!(
            parse("u'''", &ode()),
            Err(CsaError::OrderExceeded { order: 3, .. })
        ));
        assert!(parse("sin(u)", &ode()).is_err());
        assert!(parse("0/0", &ode()).is_err());
        assert!(parse("u*i", &ode()).is_err());
    }

    #[test]
    fn pde_jets() {
        let ctx = JetContext::new(&["s", "t"], &["w", "x"]).unwrap();
        let e = parse("w_ss - w_tt + 2*x_st", &ctx).unwrap();
        assert_eq!(e.numerator().len(), 3);
        assert!(parse("w_ts", &ctx).is_err());
    }
}
