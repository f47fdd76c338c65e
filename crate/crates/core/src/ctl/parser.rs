use std::fmt;

use super::CtlFormula;

/// Syntax error with a character offset and the tokens that would have been accepted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub found: String,
    pub expected: Vec<&'static str>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "syntax error at position {}: found {}, expected one of: {}",
            self.position,
            self.found,
            self.expected.join(", ")
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok {
    Atom(usize),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Temporal(Temporal),
    E,
    A,
    Until,
    LParen,
    RParen,
    LBracket,
    RBracket,
    End,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Temporal {
    EX,
    AX,
    EF,
    AF,
    EG,
    AG,
}

const START: &[&str] = &[
    "!", "EX", "AX", "EF", "AF", "EG", "AG", "E[", "A[", "(", "true", "false", "p<INT>",
];

fn describe(t: Tok) -> String {
    match t {
        Tok::Atom(i) => format!("`p{i}`"),
        Tok::True => "`true`".into(),
        Tok::False => "`false`".into(),
        Tok::Not => "`!`".into(),
        Tok::And => "`&`".into(),
        Tok::Or => "`|`".into(),
        Tok::Implies => "`->`".into(),
        Tok::Temporal(t) => format!("`{t:?}`"),
        Tok::E => "`E`".into(),
        Tok::A => "`A`".into(),
        Tok::Until => "`U`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::LBracket => "`[`".into(),
        Tok::RBracket => "`]`".into(),
        Tok::End => "end of input".into(),
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let next = chars.get(i + 1).copied();
        let tok = match c {
            '!' => Tok::Not,
            '&' => Tok::And,
            '|' => Tok::Or,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            'U' => Tok::Until,
            '-' if next == Some('>') => {
                i += 1;
                Tok::Implies
            }
            'E' | 'A' => {
                let t = match (c, next) {
                    ('E', Some('X')) => Some(Temporal::EX),
                    ('A', Some('X')) => Some(Temporal::AX),
                    ('E', Some('F')) => Some(Temporal::EF),
                    ('A', Some('F')) => Some(Temporal::AF),
                    ('E', Some('G')) => Some(Temporal::EG),
                    ('A', Some('G')) => Some(Temporal::AG),
                    _ => None,
                };
                match t {
                    Some(t) => {
                        i += 1;
                        Tok::Temporal(t)
                    }
                    None if c == 'E' => Tok::E,
                    None => Tok::A,
                }
            }
            'p' if next.is_some_and(|d| d.is_ascii_digit()) => {
                let mut j = i + 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let digits: String = chars[i + 1..j].iter().collect();
                let id = digits.parse::<usize>().map_err(|_| ParseError {
                    position: start,
                    found: format!("`p{digits}`"),
                    expected: vec!["atom index that fits in usize"],
                })?;
                i = j - 1;
                Tok::Atom(id)
            }
            't' | 'f' => {
                let word = if c == 't' { "true" } else { "false" };
                let n = word.chars().count();
                let candidate: String = chars[i..(i + n).min(chars.len())].iter().collect();
                if candidate != word {
                    return Err(ParseError {
                        position: start,
                        found: format!("`{c}`"),
                        expected: START.to_vec(),
                    });
                }
                i += n - 1;
                if c == 't' {
                    Tok::True
                } else {
                    Tok::False
                }
            }
            _ => {
                return Err(ParseError {
                    position: start,
                    found: format!("`{c}`"),
                    expected: START.to_vec(),
                })
            }
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((chars.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Tok {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.peek();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&'static str]) -> ParseError {
        let (position, tok) = self.toks[self.pos];
        ParseError {
            position,
            found: describe(tok),
            expected: expected.to_vec(),
        }
    }

    fn expect(&mut self, tok: Tok, name: &'static str) -> Result<(), ParseError> {
        if self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[name]))
        }
    }

    fn implies(&mut self) -> Result<CtlFormula, ParseError> {
        let lhs = self.or()?;
        if self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.implies()?;
            return Ok(CtlFormula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<CtlFormula, ParseError> {
        let mut lhs = self.and()?;
        while self.peek() == Tok::Or {
            self.bump();
            lhs = CtlFormula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<CtlFormula, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek() == Tok::And {
            self.bump();
            lhs = CtlFormula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<CtlFormula, ParseError> {
        match self.peek() {
            Tok::Not => {
                self.bump();
                Ok(CtlFormula::not(self.unary()?))
            }
            Tok::Temporal(t) => {
                self.bump();
                let a = self.unary()?;
                Ok(match t {
                    Temporal::EX => CtlFormula::ex(a),
                    Temporal::AX => CtlFormula::ax(a),
                    Temporal::EF => CtlFormula::ef(a),
                    Temporal::AF => CtlFormula::af(a),
                    Temporal::EG => CtlFormula::eg(a),
                    Temporal::AG => CtlFormula::ag(a),
                })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<CtlFormula, ParseError> {
        match self.peek() {
            Tok::True => {
                self.bump();
                Ok(CtlFormula::True)
            }
            Tok::False => {
                self.bump();
                Ok(CtlFormula::False)
            }
            Tok::Atom(i) => {
                self.bump();
                Ok(CtlFormula::Atom(i))
            }
            Tok::LParen => {
                self.bump();
                let f = self.implies()?;
                self.expect(Tok::RParen, ")")?;
                Ok(f)
            }
            q @ (Tok::E | Tok::A) => {
                self.bump();
                self.expect(Tok::LBracket, "[")?;
                let a = self.implies()?;
                self.expect(Tok::Until, "U")?;
                let b = self.implies()?;
                self.expect(Tok::RBracket, "]")?;
                Ok(if q == Tok::E {
                    CtlFormula::eu(a, b)
                } else {
                    CtlFormula::au(a, b)
                })
            }
            _ => Err(self.error(START)),
        }
    }
}

/// Parses one CTL formula.
///
/// Precedence from tightest: `!`, temporal prefixes, `&`, `|`, `->`
/// (right-associative). Whitespace is insignificant.
pub fn parse_ctl(text: &str) -> Result<CtlFormula, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let f = p.implies()?;
    if p.peek() != Tok::End {
        return Err(p.error(&["&", "|", "->", "end of input"]));
    }
    Ok(f)
}
