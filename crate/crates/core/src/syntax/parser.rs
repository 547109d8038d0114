use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::lexer::{tokenize, Tok, Token};
use super::ParseError;

/// How the unknown `y` is referenced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnknownRef {
    /// Bare `y`.
    Plain,
    /// `y[n+k]`.
    Shift(i64),
    /// `y'`, `y''`, `y^(k)`.
    Derivative(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Int(BigInt),
    Imag,
    Var(char),
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, Box<Ast>),
    Exp(Box<Ast>),
    Unknown(UnknownRef),
}

/// Syntax tree node with its byte span in the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ast {
    pub node: Node,
    pub span: (usize, usize),
}

impl Ast {
    fn new(node: Node, start: usize, end: usize) -> Ast {
        Ast {
            node,
            span: (start, end),
        }
    }

    fn binary(make: fn(Box<Ast>, Box<Ast>) -> Node, a: Ast, b: Ast) -> Ast {
        let span = (a.span.0, b.span.1);
        Ast {
            node: make(Box::new(a), Box::new(b)),
            span,
        }
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

pub(crate) fn parse_expr_only(src: &str) -> Result<Ast, ParseError> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    p.expect_end()?;
    Ok(e)
}

pub(crate) fn parse_equation(src: &str) -> Result<(Ast, Ast), ParseError> {
    let mut p = Parser::new(src)?;
    let lhs = p.expr()?;
    if p.peek() != &Tok::Eq {
        return Err(ParseError::syntax(p.here(), "expected `=` in equation")
            .hint("equations look like y[n+1] - 2*y[n] = 3^n or y' - y = exp(2*t)"));
    }
    p.bump();
    let rhs = p.expr()?;
    p.expect_end()?;
    Ok((lhs, rhs))
}

impl Parser {
    fn new(src: &str) -> Result<Parser, ParseError> {
        Ok(Parser {
            toks: tokenize(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn here(&self) -> usize {
        self.toks[self.pos].start
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Token, ParseError> {
        if *self.peek() == tok {
            Ok(self.bump())
        } else {
            Err(ParseError::syntax(
                self.here(),
                format!("expected {what}, found {}", self.describe()),
            ))
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::End => Ok(()),
            Tok::Eq => Err(ParseError::syntax(self.here(), "unexpected `=`")
                .hint("an expression was expected here, not an equation")),
            _ => Err(
                ParseError::syntax(self.here(), format!("unexpected {}", self.describe()))
                    .hint("products need an explicit `*`, e.g. 2*n"),
            ),
        }
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Int(v) => format!("number `{v}`"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Prime => "`'`".into(),
            Tok::Eq => "`=`".into(),
            Tok::End => "end of input".into(),
        }
    }

    fn expr(&mut self) -> Result<Ast, ParseError> {
        let mut acc = self.term()?;
        loop {
            let make: fn(Box<Ast>, Box<Ast>) -> Node = match self.peek() {
                Tok::Plus => Node::Add,
                Tok::Minus => Node::Sub,
                _ => return Ok(acc),
            };
            self.bump();
            let rhs = self.term()?;
            acc = Ast::binary(make, acc, rhs);
        }
    }

    fn term(&mut self) -> Result<Ast, ParseError> {
        let mut acc = self.unary()?;
        loop {
            let make: fn(Box<Ast>, Box<Ast>) -> Node = match self.peek() {
                Tok::Star => Node::Mul,
                Tok::Slash => Node::Div,
                _ => return Ok(acc),
            };
            self.bump();
            let rhs = self.unary()?;
            acc = Ast::binary(make, acc, rhs);
        }
    }

    fn unary(&mut self) -> Result<Ast, ParseError> {
        match self.peek() {
            Tok::Minus => {
                let start = self.bump().start;
                let inner = self.unary()?;
                let end = inner.span.1;
                Ok(Ast::new(Node::Neg(Box::new(inner)), start, end))
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Ast, ParseError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        if matches!(self.peek(), Tok::Minus) {
            return Err(
                ParseError::syntax(self.here(), "negative exponents must be parenthesized").hint("write 2^(-1)"),
            );
        }
        let exponent = self.primary()?;
        Ok(Ast::binary(Node::Pow, base, exponent))
    }

    fn primary(&mut self) -> Result<Ast, ParseError> {
        let t = self.bump();
        match t.tok {
            Tok::Int(v) => Ok(Ast::new(Node::Int(v), t.start, t.end)),
            Tok::LParen => {
                let inner = self.expr()?;
                let close = self.expect(Tok::RParen, "`)`")?;
                Ok(Ast::new(inner.node, t.start, close.end))
            }
            Tok::Ident(ref name) => match name.as_str() {
                "i" => Ok(Ast::new(Node::Imag, t.start, t.end)),
                "n" => Ok(Ast::new(Node::Var('n'), t.start, t.end)),
                "t" => Ok(Ast::new(Node::Var('t'), t.start, t.end)),
                "exp" => {
                    self.expect(Tok::LParen, "`(` after exp")?;
                    let arg = self.expr()?;
                    let close = self.expect(Tok::RParen, "`)`")?;
                    Ok(Ast::new(Node::Exp(Box::new(arg)), t.start, close.end))
                }
                "y" => self.unknown(t.clone()),
                other => Err(ParseError::syntax(t.start, format!("unknown identifier `{other}`"))
                    .hint("available names: n, t, i, exp, y")),
            },
            Tok::End => Err(ParseError::syntax(t.start, "unexpected end of input")),
            _ => {
                self.pos -= 1;
                Err(ParseError::syntax(t.start, format!("unexpected {}", self.describe())))
            }
        }
    }

    fn unknown(&mut self, y: Token) -> Result<Ast, ParseError> {
        match self.peek() {
            Tok::LBracket => {
                self.bump();
                let var = self.bump();
                if var.tok != Tok::Ident("n".into()) {
                    return Err(ParseError::syntax(var.start, "expected `n` inside y[...]")
                        .hint("shifted terms look like y[n+2]"));
                }
                let offset = match self.peek() {
                    Tok::Plus | Tok::Minus => {
                        let sign = if self.bump().tok == Tok::Minus { -1 } else { 1 };
                        let k = self.bump();
                        match k.tok {
                            Tok::Int(v) => {
                                let v = v
                                    .to_i64()
                                    .ok_or_else(|| ParseError::syntax(k.start, "shift offset too large"))?;
                                sign * v
                            }
                            _ => return Err(ParseError::syntax(k.start, "expected an integer shift offset")),
                        }
                    }
                    _ => 0,
                };
                let close = self.expect(Tok::RBracket, "`]`")?;
                Ok(Ast::new(Node::Unknown(UnknownRef::Shift(offset)), y.start, close.end))
            }
            Tok::Prime => {
                let mut order = 0;
                let mut end = y.end;
                while *self.peek() == Tok::Prime {
                    end = self.bump().end;
                    order += 1;
                }
                Ok(Ast::new(Node::Unknown(UnknownRef::Derivative(order)), y.start, end))
            }
            Tok::Caret
                if *self.peek_at(1) == Tok::LParen
                    && matches!(self.peek_at(2), Tok::Int(_))
                    && *self.peek_at(3) == Tok::RParen =>
            {
                self.bump();
                self.bump();
                let k = self.bump();
                let close = self.bump();
                let Tok::Int(v) = k.tok else { unreachable!() };
                let order = v
                    .to_usize()
                    .ok_or_else(|| ParseError::syntax(k.start, "derivative order too large"))?;
                Ok(Ast::new(
                    Node::Unknown(UnknownRef::Derivative(order)),
                    y.start,
                    close.end,
                ))
            }
            _ => Ok(Ast::new(Node::Unknown(UnknownRef::Plain), y.start, y.end)),
        }
    }
}
