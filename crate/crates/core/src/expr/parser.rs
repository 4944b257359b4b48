use super::{BinOp, Func, Node};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num { value: f64, exact: bool },
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

fn err<T>(position: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse { position, message: message.into() })
}

/// True if the decimal `digits × 10^exp10` is a binary64 value.
fn decimal_is_exact(digits: &str, exp10: i64) -> bool {
    let digits = digits.trim_start_matches('0');
    if digits.is_empty() {
        return true;
    }
    let Ok(mut n) = digits.parse::<u128>() else {
        return false;
    };
    const LIMIT: u128 = 1 << 53;
    if exp10 >= 0 {
        for _ in 0..exp10 {
            n = match n.checked_mul(10) {
                Some(v) => v,
                None => return false,
            };
        }
        // Large integers are exact when their odd part fits in 53 bits.
        while n > LIMIT && n % 2 == 0 {
            n /= 2;
        }
        return n <= LIMIT;
    }
    let k = -exp10;
    if k > 300 {
        return false;
    }
    for _ in 0..k {
        if n % 5 != 0 {
            return false;
        }
        n /= 5;
    }
    n <= LIMIT
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            _ if c.is_ascii_digit() || c == '.' => {
                let mut int_digits = String::new();
                let mut frac_digits = String::new();
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    int_digits.push(bytes[i] as char);
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        frac_digits.push(bytes[i] as char);
                        i += 1;
                    }
                }
                if int_digits.is_empty() && frac_digits.is_empty() {
                    return err(start, "malformed number");
                }
                let mut exp10: i64 = 0;
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    let mut neg = false;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        neg = bytes[j] == b'-';
                        j += 1;
                    }
                    let es = j;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    if j == es {
                        return err(i, "exponent has no digits");
                    }
                    let Ok(e) = text[es..j].parse::<i64>() else {
                        return err(es, "exponent out of range");
                    };
                    exp10 = if neg { -e } else { e };
                    i = j;
                }
                let value: f64 = match text[start..i].parse() {
                    Ok(v) => v,
                    Err(_) => return err(start, "malformed number"),
                };
                if !value.is_finite() {
                    return err(start, "number out of range");
                }
                let all_digits = format!("{int_digits}{frac_digits}");
                let exact = decimal_is_exact(&all_digits, exp10 - frac_digits.len() as i64);
                out.push((start, Tok::Num { value, exact }));
                continue;
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            _ => return err(start, format!("unexpected character `{c}`")),
        };
        out.push((start, tok));
        i += c.len_utf8();
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn at(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            err(self.at(), format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Node> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.primary()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let neg = match self.peek() {
            Tok::Minus => {
                self.bump();
                true
            }
            Tok::Plus => {
                self.bump();
                false
            }
            _ => false,
        };
        let at = self.at();
        match self.bump() {
            Tok::Num { value, .. } if value.fract() == 0.0 && value <= 1024.0 => {
                let n = value as i32;
                if *self.peek() == Tok::Caret {
                    return err(self.at(), "chained powers need parentheses");
                }
                Ok(Node::Pow(Box::new(base), if neg { -n } else { n }))
            }
            _ => err(at, "exponent must be an integer literal of at most 1024"),
        }
    }

    fn primary(&mut self) -> Result<Node> {
        let at = self.at();
        match self.bump() {
            Tok::Num { value, exact } => Ok(Node::Num { value, exact }),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => self.ident(at, &name),
            Tok::End => err(at, "unexpected end of input"),
            t => err(at, format!("unexpected token {t:?}")),
        }
    }

    fn args(&mut self, at: usize, name: &str, arity: usize) -> Result<Vec<Node>> {
        self.expect(Tok::LParen, &format!("`(` after `{name}`"))?;
        let mut args = vec![self.expr()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.expr()?);
        }
        self.expect(Tok::RParen, "`)`")?;
        if args.len() != arity {
            return err(at, format!("`{name}` takes {arity} argument(s), got {}", args.len()));
        }
        Ok(args)
    }

    fn ident(&mut self, at: usize, name: &str) -> Result<Node> {
        let func = match name {
            "x" => return Ok(Node::X),
            "y" => return Ok(Node::Y),
            "pi" => return Ok(Node::Pi),
            "min" | "max" => {
                let mut a = self.args(at, name, 2)?;
                let b = a.pop().expect("arity checked");
                let a = a.pop().expect("arity checked");
                let op = if name == "min" { BinOp::Min } else { BinOp::Max };
                return Ok(Node::Binary(op, Box::new(a), Box::new(b)));
            }
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" | "ln" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return err(at, format!("unknown identifier `{name}`")),
        };
        let a = self.args(at, name, 1)?.pop().expect("arity checked");
        Ok(Node::Call(func, Box::new(a)))
    }
}

pub(super) fn parse(text: &str) -> Result<Node> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return err(p.at(), "unexpected trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn num(v: f64) -> Box<Node> {
        Box::new(Node::Num { value: v, exact: true })
    }

    #[test]
    fn constant() {
        assert_eq!(parse("1").unwrap(), Node::Num { value: 1.0, exact: true });
    }

    #[test]
    fn polynomial_source_tree() {
        let t = parse("(x-0.125)^2+(y-0.25)^3").unwrap();
        let expect = Node::Binary(
            BinOp::Add,
            Box::new(Node::Pow(Box::new(Node::Binary(BinOp::Sub, Box::new(Node::X), num(0.125))), 2)),
            Box::new(Node::Pow(Box::new(Node::Binary(BinOp::Sub, Box::new(Node::Y), num(0.25))), 3)),
        );
        assert_eq!(t, expect);
    }

    #[test]
    fn trig_source_tree() {
        let t = parse("x + sin((x+0.5)*y^2)").unwrap();
        let inner = Node::Binary(
            BinOp::Mul,
            Box::new(Node::Binary(BinOp::Add, Box::new(Node::X), num(0.5))),
            Box::new(Node::Pow(Box::new(Node::Y), 2)),
        );
        assert_eq!(t, Node::Binary(BinOp::Add, Box::new(Node::X), Box::new(Node::Call(Func::Sin, Box::new(inner)))));
    }

    #[test]
    fn precedence_and_unary_minus() {
        // -x^2 is -(x^2); 1-2-3 is left associative.
        assert_eq!(parse("-x^2").unwrap(), Node::Neg(Box::new(Node::Pow(Box::new(Node::X), 2))));
        let v = crate::expr::SourceExpr::parse("1-2-3*2/4").unwrap().eval_point(0.0, 0.0).unwrap();
        assert_eq!(v, -2.5);
        let v = crate::expr::SourceExpr::parse("2^-2").unwrap().eval_point(0.0, 0.0).unwrap();
        assert_eq!(v, 0.25);
    }

    #[test]
    fn errors_have_positions() {
        assert!(matches!(parse("1 +"), Err(Error::Parse { position: 3, .. })));
        assert!(matches!(parse("foo(x)"), Err(Error::Parse { position: 0, .. })));
        assert!(matches!(parse("x + min(x)"), Err(Error::Parse { position: 4, .. })));
        assert!(matches!(parse("sin(x, y)"), Err(Error::Parse { .. })));
        assert!(matches!(parse("x ^ 1.5"), Err(Error::Parse { position: 4, .. })));
        assert!(matches!(parse("(x"), Err(Error::Parse { position: 2, .. })));
        assert!(matches!(parse("x $"), Err(Error::Parse { position: 2, .. })));
        assert!(matches!(parse("x y"), Err(Error::Parse { position: 2, .. })));
    }

    #[test]
    fn literal_exactness() {
        assert!(decimal_is_exact("125", -3));
        assert!(decimal_is_exact("5", -1));
        assert!(!decimal_is_exact("1", -1));
        assert!(decimal_is_exact("1", 20));
        assert!(!decimal_is_exact("3", 0) == false);
        assert!(matches!(parse("1e-1").unwrap(), Node::Num { exact: false, .. }));
        assert!(matches!(parse("2.5e-1").unwrap(), Node::Num { exact: true, .. }));
    }
}
