use super::{BinOp, Expr, Func};

/// Parse failure with the byte offset of the offending token.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{message} at offset {offset} (near `{token}`)")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
    pub token: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    offset: usize,
    text: String,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let single = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            i += 1;
            out.push(Token {
                tok,
                offset: start,
                text: src[start..i].to_string(),
            });
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            // exponent only when digits follow, so `2e` stays `2` then `e`
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let value: f64 = text.parse().map_err(|_| ParseError {
                offset: start,
                message: "malformed number".into(),
                token: text.to_string(),
            })?;
            out.push(Token {
                tok: Tok::Num(value),
                offset: start,
                text: text.to_string(),
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let text = &src[start..i];
            out.push(Token {
                tok: Tok::Ident(text.to_string()),
                offset: start,
                text: text.to_string(),
            });
            continue;
        }
        let ch = src[start..].chars().next().unwrap_or('?');
        return Err(ParseError {
            offset: start,
            message: "unexpected character".into(),
            token: ch.to_string(),
        });
    }
    out.push(Token {
        tok: Tok::End,
        offset: src.len(),
        text: String::new(),
    });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, token: &Token, message: impl Into<String>) -> ParseError {
        let text = if token.tok == Tok::End {
            "end of input".to_string()
        } else {
            token.text.clone()
        };
        ParseError {
            offset: token.offset,
            message: message.into(),
            token: text,
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek().tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.peek().tok == Tok::Minus {
            self.bump();
            return Ok(Expr::negate(self.factor()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek().tok == Tok::Caret {
            self.bump();
            let exponent = self.factor()?;
            return Ok(Expr::binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let token = self.bump();
        match &token.tok {
            Tok::Num(v) => Ok(Expr::Num(*v)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect_close(&token)?;
                Ok(inner)
            }
            Tok::Ident(name) => match name.as_str() {
                "u" => Ok(Expr::Var),
                "pi" => Ok(Expr::Pi),
                "e" => Ok(Expr::E),
                _ => {
                    let Some(func) = Func::from_name(name) else {
                        return Err(self.error(&token, "unknown identifier"));
                    };
                    let open = self.bump();
                    if open.tok != Tok::LParen {
                        return Err(self.error(
                            &open,
                            format!("expected `(` after function `{}`", func.name()),
                        ));
                    }
                    let arg = self.expr()?;
                    if self.peek().tok == Tok::Comma {
                        let comma = self.peek().clone();
                        return Err(self.error(
                            &comma,
                            format!("arity mismatch: `{}` takes exactly one argument", func.name()),
                        ));
                    }
                    self.expect_close(&open)?;
                    Ok(Expr::call(func, arg))
                }
            },
            Tok::End => Err(self.error(&token, "unexpected end of input")),
            _ => Err(self.error(&token, "expected a number, `u`, a constant, a function call or `(`")),
        }
    }

    fn expect_close(&mut self, open: &Token) -> Result<(), ParseError> {
        let t = self.bump();
        match t.tok {
            Tok::RParen => Ok(()),
            Tok::End => Err(ParseError {
                offset: t.offset,
                message: format!("unbalanced parentheses: `(` at offset {} is never closed", open.offset),
                token: "end of input".into(),
            }),
            _ => Err(self.error(&t, "expected `)`")),
        }
    }
}

/// Parses an expression in `u`.
///
/// Precedence from tightest: `^` (right-associative), unary minus, `* /`, `+ -`.
/// Multiplication must be written explicitly.
pub fn parse(source: &str) -> Result<Expr, ParseError> {
    let tokens = lex(source)?;
    let mut parser = Parser { tokens, pos: 0 };
    let expr = parser.expr()?;
    let rest = parser.peek().clone();
    match rest.tok {
        Tok::End => Ok(expr),
        Tok::RParen => Err(parser.error(&rest, "unbalanced parentheses: unmatched `)`")),
        _ => Err(parser.error(&rest, "unexpected trailing token")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn incomplete_product_fails_at_end() {
        let err = parse("2*").unwrap_err();
        assert_eq!(err.offset, 2);
        assert_eq!(err.token, "end of input");
    }

    #[test]
    fn bare_variable() {
        assert_eq!(parse("u").unwrap(), Expr::Var);
    }

    #[test]
    fn implicit_multiplication_is_rejected() {
        let err = parse("2cos(u)").unwrap_err();
        assert_eq!(err.offset, 1);
        assert!(err.message.contains("trailing"));
    }

    #[test]
    fn unknown_identifier() {
        let err = parse("1 + foo(u)").unwrap_err();
        assert_eq!(err.offset, 4);
        assert_eq!(err.token, "foo");
        assert!(parse("x").is_err());
    }

    #[test]
    fn arity_mismatch() {
        let err = parse("sin(u, 2)").unwrap_err();
        assert!(err.message.contains("arity"));
        assert_eq!(err.offset, 5);
        assert!(parse("sin u").is_err());
        assert!(parse("sin()").is_err());
    }

    #[test]
    fn unbalanced_parentheses() {
        assert!(parse("(u + 1").unwrap_err().message.contains("unbalanced"));
        assert!(parse("u + 1)").unwrap_err().message.contains("unbalanced"));
    }

    #[test]
    fn offsets_stay_inside_input() {
        for src in ["", "(", "2*", "sin(", "u u", "#", "1..2"] {
            let err = parse(src).unwrap_err();
            assert!(err.offset <= src.len(), "{src:?} -> {err:?}");
        }
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(parse("-u^2").unwrap().to_sexpr(), "(neg (^ u 2))");
        assert_eq!(parse("u^2^3").unwrap().to_sexpr(), "(^ u (^ 2 3))");
        assert_eq!(parse("1-2-3").unwrap().to_sexpr(), "(- (- 1 2) 3)");
        assert_eq!(parse("2^-u").unwrap().to_sexpr(), "(^ 2 (neg u))");
        assert_eq!(parse("-2*u").unwrap().to_sexpr(), "(* (neg 2) u)");
    }

    #[test]
    fn number_forms() {
        assert_eq!(parse("1.5e3").unwrap(), Expr::Num(1500.0));
        assert_eq!(parse(".25").unwrap(), Expr::Num(0.25));
        assert_eq!(parse("2E-2").unwrap(), Expr::Num(0.02));
        // `2e` is the literal 2 followed by Euler's constant, i.e. implicit multiplication
        assert!(parse("2e").is_err());
    }
}
