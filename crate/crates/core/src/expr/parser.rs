use std::collections::BTreeMap;

use thiserror::Error;

use super::{BinOp, Expr, Func};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { message: String, line: usize, column: usize },
    #[error("unknown identifier `{name}` at line {line}, column {column}")]
    UnknownIdentifier { name: String, line: usize, column: usize },
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
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let (start_line, start_col) = (line, col);
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Token { tok, line: start_line, column: start_col });
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let begin = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text: String = chars[begin..i].iter().collect();
            let value = text.parse::<f64>().map_err(|_| ParseError::Syntax {
                message: format!("malformed number `{text}`"),
                line: start_line,
                column: start_col,
            })?;
            col += i - begin;
            out.push(Token { tok: Tok::Num(value), line: start_line, column: start_col });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let begin = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let text: String = chars[begin..i].iter().collect();
            col += i - begin;
            out.push(Token { tok: Tok::Ident(text), line: start_line, column: start_col });
            continue;
        }
        return Err(ParseError::Syntax { message: format!("unexpected character `{c}`"), line, column: col });
    }
    out.push(Token { tok: Tok::End, line, column: col });
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    coords: &'a [String],
    constants: &'a BTreeMap<String, f64>,
}

impl Parser<'_> {
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

    fn error(&self, message: impl Into<String>) -> ParseError {
        let t = self.peek();
        ParseError::Syntax { message: message.into(), line: t.line, column: t.column }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek().tok == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
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
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek().tok == Tok::Minus {
            self.bump();
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek().tok == Tok::Caret {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let t = self.bump();
        match t.tok {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(func) = Func::from_name(&name) {
                    if self.peek().tok != Tok::LParen {
                        return Err(self.error(format!("expected `(` after `{name}`")));
                    }
                    self.bump();
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(Expr::call(func, arg));
                }
                if let Some(i) = self.coords.iter().position(|c| *c == name) {
                    return Ok(Expr::Var(i));
                }
                if let Some(v) = self.constants.get(&name) {
                    return Ok(Expr::Num(*v));
                }
                Err(ParseError::UnknownIdentifier { name, line: t.line, column: t.column })
            }
            Tok::End => {
                Err(ParseError::Syntax { message: "unexpected end of input".into(), line: t.line, column: t.column })
            }
            other => Err(ParseError::Syntax {
                message: format!("unexpected token {other:?}"),
                line: t.line,
                column: t.column,
            }),
        }
    }
}

/// Parses `source` against the declared coordinate names.
///
/// Identifiers found in `constants` are replaced by their values; a name that
/// is both a coordinate and a constant resolves to the coordinate.
pub fn parse(source: &str, coords: &[String], constants: &BTreeMap<String, f64>) -> Result<Expr, ParseError> {
    for (name, v) in constants {
        if !v.is_finite() {
            return Err(ParseError::Syntax { message: format!("constant `{name}` is not finite"), line: 1, column: 1 });
        }
    }
    let tokens = tokenize(source)?;
    let mut p = Parser { tokens, pos: 0, coords, constants };
    let e = p.expr()?;
    if p.peek().tok != Tok::End {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn p(src: &str, coords: &[&str]) -> Result<Expr, ParseError> {
        parse(src, &names(coords), &BTreeMap::new())
    }

    #[test]
    fn precedence_and_associativity() {
        let e = p("a+b*c", &["a", "b", "c"]).unwrap();
        assert_eq!(e, p("a+(b*c)", &["a", "b", "c"]).unwrap());
        let e = p("a-b-c", &["a", "b", "c"]).unwrap();
        assert_eq!(e, p("(a-b)-c", &["a", "b", "c"]).unwrap());
        let e = p("a^b^c", &["a", "b", "c"]).unwrap();
        assert_eq!(e, p("a^(b^c)", &["a", "b", "c"]).unwrap());
        let e = p("-a^2", &["a"]).unwrap();
        assert_eq!(e, p("-(a^2)", &["a"]).unwrap());
        let e = p("a^-2", &["a"]).unwrap();
        assert_eq!(e, p("a^(-2)", &["a"]).unwrap());
    }

    #[test]
    fn unknown_identifier_is_named() {
        let err = p("p*qdot - L", &["q", "qdot", "p"]).unwrap_err();
        match err {
            ParseError::UnknownIdentifier { name, line, column } => {
                assert_eq!(name, "L");
                assert_eq!((line, column), (1, 10));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_location() {
        let err = p("q +\n  * p", &["q", "p"]).unwrap_err();
        assert_eq!(err, ParseError::Syntax { message: "unexpected token Star".into(), line: 2, column: 3 });
        assert!(matches!(p("exp q", &["q"]), Err(ParseError::Syntax { .. })));
        assert!(matches!(p("(q", &["q"]), Err(ParseError::Syntax { .. })));
        assert!(matches!(p("q p", &["q", "p"]), Err(ParseError::Syntax { .. })));
        assert!(matches!(p("q # p", &["q", "p"]), Err(ParseError::Syntax { .. })));
        assert!(matches!(p("", &["q"]), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn constants_fold_to_literals() {
        let mut k = BTreeMap::new();
        k.insert("gamma".to_string(), 0.5);
        let e = parse("gamma*z", &names(&["z"]), &k).unwrap();
        assert_eq!(e, Expr::binary(BinOp::Mul, Expr::Num(0.5), Expr::Var(0)));
    }

    #[test]
    fn scientific_literals() {
        let e = p("1.5e-3 + 2E2 + .25", &[]).unwrap();
        assert!(e.is_constant());
    }
}
