use super::ast::{Ast, BinOp, Func, NamedConst};
use super::token::{Token, TokenKind};
use super::ParseError;

/// Recursive-descent parser over a token stream.
///
/// Precedence, loosest first: `+ -`, then `* /`, then unary `-`, then `^`
/// (right associative). So `-u^2` is `-(u^2)` and `2^-1` is `2^(-1)`.
pub fn parse(tokens: &[Token<'_>], allowed_vars: &[&str]) -> Result<Ast, ParseError> {
    let mut p = Parser { tokens, pos: 0, allowed_vars };
    if tokens.is_empty() {
        return Err(ParseError::UnexpectedEnd);
    }
    let ast = p.expr()?;
    match p.peek() {
        None => Ok(ast),
        Some(t) => Err(ParseError::Syntax { position: t.position, expected: "operator or end of input".into() }),
    }
}

struct Parser<'t, 'a> {
    tokens: &'t [Token<'a>],
    pos: usize,
    allowed_vars: &'t [&'t str],
}

impl<'t, 'a> Parser<'t, 'a> {
    fn peek(&self) -> Option<&Token<'a>> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token<'a>> {
        let t = self.tokens.get(self.pos).copied();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn peek_op(&self) -> Option<char> {
        match self.peek()?.kind {
            TokenKind::Operator(c) => Some(c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Ast::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Ast::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Ast, ParseError> {
        match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                Ok(Ast::neg(self.unary()?))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Ast, ParseError> {
        let base = self.primary()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(Ast::binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Ast, ParseError> {
        let tok = self.next().ok_or(ParseError::UnexpectedEnd)?;
        match tok.kind {
            TokenKind::Number(x) => Ok(Ast::Num(x)),
            TokenKind::LParen => {
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            TokenKind::Identifier => self.identifier(tok),
            _ => Err(ParseError::Syntax { position: tok.position, expected: "number, identifier or '('".into() }),
        }
    }

    fn identifier(&mut self, tok: Token<'a>) -> Result<Ast, ParseError> {
        if let Some(func) = Func::from_name(tok.text) {
            match self.next() {
                Some(Token { kind: TokenKind::LParen, .. }) => {}
                Some(t) => return Err(ParseError::Syntax { position: t.position, expected: "'('".into() }),
                None => return Err(ParseError::UnexpectedEnd),
            }
            let arg = self.expr()?;
            self.expect_rparen()?;
            return Ok(Ast::call(func, arg));
        }
        if let Some(c) = NamedConst::from_name(tok.text) {
            return Ok(Ast::Const(c));
        }
        if self.allowed_vars.contains(&tok.text) {
            return Ok(Ast::var(tok.text));
        }
        Err(ParseError::UnknownIdentifier { name: tok.text.to_string(), position: tok.position })
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        match self.next() {
            Some(Token { kind: TokenKind::RParen, .. }) => Ok(()),
            Some(t) => Err(ParseError::Syntax { position: t.position, expected: "')'".into() }),
            None => Err(ParseError::UnexpectedEnd),
        }
    }
}
