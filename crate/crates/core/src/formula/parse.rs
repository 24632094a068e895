//! Recursive-descent parser for the ASCII formula grammar.
//!
//! ```text
//! iff     := implies ("<->" implies)*          left-assoc
//! implies := or ("->" implies)?                right-assoc
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "~" unary | "<" prog ">" unary | "[" prog "]" unary
//!          | "box" unary | "dia" unary | "K" unary | "Khat" unary
//!          | "O" "[" prog "]" unary | atom | "top" | "(" iff ")"
//! prog    := step (";" step)*                  left-assoc
//! step    := name | "?(" iff ")" | "(" prog ")"
//! ```

use super::{Formula, FormulaError, Program};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Name(String),
    Top,
    Box,
    Dia,
    Know,
    KHat,
    Next,
    Not,
    And,
    Or,
    Arrow,
    DoubleArrow,
    LParen,
    RParen,
    LAngle,
    RAngle,
    LBracket,
    RBracket,
    Semi,
    Question,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Name(n) => format!("`{n}`"),
            Tok::Top => "`top`".into(),
            Tok::Box => "`box`".into(),
            Tok::Dia => "`dia`".into(),
            Tok::Know => "`K`".into(),
            Tok::KHat => "`Khat`".into(),
            Tok::Next => "`O`".into(),
            Tok::Not => "`~`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::DoubleArrow => "`<->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LAngle => "`<`".into(),
            Tok::RAngle => "`>`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Question => "`?`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> FormulaError {
    FormulaError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Spanned>, FormulaError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut column) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, column);
        if c == '\n' {
            i += 1;
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            column += 1;
            continue;
        }
        let mut push = |tok: Tok, width: usize, i: &mut usize, column: &mut usize| {
            out.push(Spanned {
                tok,
                line: start_line,
                column: start_col,
            });
            *i += width;
            *column += width;
        };
        let next = chars.get(i + 1).copied();
        let next2 = chars.get(i + 2).copied();
        match c {
            '~' => push(Tok::Not, 1, &mut i, &mut column),
            '&' => push(Tok::And, 1, &mut i, &mut column),
            '|' => push(Tok::Or, 1, &mut i, &mut column),
            '(' => push(Tok::LParen, 1, &mut i, &mut column),
            ')' => push(Tok::RParen, 1, &mut i, &mut column),
            '[' => push(Tok::LBracket, 1, &mut i, &mut column),
            ']' => push(Tok::RBracket, 1, &mut i, &mut column),
            '>' => push(Tok::RAngle, 1, &mut i, &mut column),
            ';' => push(Tok::Semi, 1, &mut i, &mut column),
            '?' => push(Tok::Question, 1, &mut i, &mut column),
            '-' if next == Some('>') => push(Tok::Arrow, 2, &mut i, &mut column),
            '<' if next == Some('-') && next2 == Some('>') => push(Tok::DoubleArrow, 3, &mut i, &mut column),
            '<' => push(Tok::LAngle, 1, &mut i, &mut column),
            c if c.is_ascii_alphabetic() => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                let tok = match word.as_str() {
                    "top" => Tok::Top,
                    "box" => Tok::Box,
                    "dia" => Tok::Dia,
                    "K" => Tok::Know,
                    "Khat" => Tok::KHat,
                    "O" => Tok::Next,
                    w if w.starts_with(|c: char| c.is_ascii_lowercase()) => Tok::Name(word.clone()),
                    _ => {
                        return Err(syntax(
                            start_line,
                            start_col,
                            format!("unknown identifier `{word}`; atoms and programs are lowercase"),
                        ))
                    }
                };
                push(tok, j - i, &mut i, &mut column);
            }
            other => return Err(syntax(start_line, start_col, format!("unexpected character `{other}`"))),
        }
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, message: impl Into<String>) -> FormulaError {
        let t = &self.toks[self.pos];
        syntax(t.line, t.column, message)
    }

    fn expect(&mut self, tok: Tok) -> Result<(), FormulaError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error_here(format!("expected {}, found {}", tok.describe(), self.peek().describe())))
        }
    }

    fn iff(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.implies()?;
        while *self.peek() == Tok::DoubleArrow {
            self.bump();
            let rhs = self.implies()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        let t = self.bump();
        match t.tok {
            Tok::Not => Ok(Formula::not(self.unary()?)),
            Tok::Box => Ok(Formula::int(self.unary()?)),
            Tok::Dia => Ok(Formula::cl(self.unary()?)),
            Tok::Know => Ok(Formula::know(self.unary()?)),
            Tok::KHat => Ok(Formula::khat(self.unary()?)),
            Tok::LAngle => {
                let p = self.program()?;
                self.expect(Tok::RAngle)?;
                Ok(Formula::diamond(p, self.unary()?))
            }
            Tok::LBracket => {
                let p = self.program()?;
                self.expect(Tok::RBracket)?;
                Ok(Formula::box_pdl(p, self.unary()?))
            }
            Tok::Next => {
                self.expect(Tok::LBracket)?;
                let p = self.program()?;
                self.expect(Tok::RBracket)?;
                Ok(Formula::next(p, self.unary()?))
            }
            Tok::Name(name) => Ok(Formula::Atom(name)),
            Tok::Top => Ok(Formula::Top),
            Tok::LParen => {
                let f = self.iff()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            other => Err(syntax(t.line, t.column, format!("expected a formula, found {}", other.describe()))),
        }
    }

    fn program(&mut self) -> Result<Program, FormulaError> {
        let mut lhs = self.program_step()?;
        while *self.peek() == Tok::Semi {
            self.bump();
            let rhs = self.program_step()?;
            lhs = Program::seq(lhs, rhs);
        }
        Ok(lhs)
    }

    fn program_step(&mut self) -> Result<Program, FormulaError> {
        let t = self.bump();
        match t.tok {
            Tok::Name(name) => Ok(Program::Atomic(name)),
            Tok::Question => {
                self.expect(Tok::LParen)?;
                let body = self.iff()?;
                self.expect(Tok::RParen)?;
                Program::test(body).map_err(|e| match e {
                    FormulaError::FragmentViolation(msg) => {
                        FormulaError::FragmentViolation(format!("{msg} (test at line {}, column {})", t.line, t.column))
                    }
                    other => other,
                })
            }
            Tok::LParen => {
                let p = self.program()?;
                self.expect(Tok::RParen)?;
                Ok(p)
            }
            other => Err(syntax(t.line, t.column, format!("expected a program, found {}", other.describe()))),
        }
    }
}

/// Parses a formula. Test bodies outside the `box`/`O` fragment are
/// rejected with [`FormulaError::FragmentViolation`].
pub fn parse(text: &str) -> Result<Formula, FormulaError> {
    let mut parser = Parser { toks: lex(text)?, pos: 0 };
    let f = parser.iff()?;
    if *parser.peek() != Tok::Eof {
        return Err(parser.error_here(format!("unexpected {} after formula", parser.peek().describe())));
    }
    Ok(f)
}

/// Parses a bare program expression such as `a;b` or `?(box p)`.
pub fn parse_program(text: &str) -> Result<Program, FormulaError> {
    let mut parser = Parser { toks: lex(text)?, pos: 0 };
    let p = parser.program()?;
    if *parser.peek() != Tok::Eof {
        return Err(parser.error_here(format!("unexpected {} after program", parser.peek().describe())));
    }
    Ok(p)
}
