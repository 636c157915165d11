//! Hand-rolled lexer for the object language.

use crate::error::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokKind {
    Ident(String),
    /// A single digit literal, `0`–`9`.
    Digit(u8),
    Lambda,
    Colon,
    Dot,
    Semi,
    Eq,
    LParen,
    RParen,
    Comma,
    Arrow,
    LBrace,
    RBrace,
    KwParam,
    KwRegion,
    KwTag,
    KwUnit,
    KwBool,
    KwInt4,
    KwLet,
    KwIn,
    KwIf,
    KwThen,
    KwElse,
    KwFst,
    KwSnd,
    KwAsk,
    KwRead,
    KwWrite,
    KwOut,
    KwTrue,
    KwFalse,
    KwRd,
    KwWr,
    KwIp,
    Eof,
}

impl TokKind {
    /// How the token reads in diagnostics.
    pub fn describe(&self) -> String {
        let kw = match self {
            TokKind::Ident(n) => return format!("`{n}`"),
            TokKind::Digit(d) => return format!("`{d}`"),
            TokKind::Lambda => "\\",
            TokKind::Colon => ":",
            TokKind::Dot => ".",
            TokKind::Semi => ";",
            TokKind::Eq => "=",
            TokKind::LParen => "(",
            TokKind::RParen => ")",
            TokKind::Comma => ",",
            TokKind::Arrow => "->",
            TokKind::LBrace => "{",
            TokKind::RBrace => "}",
            TokKind::Eof => return "end of input".to_string(),
            TokKind::KwParam => "param",
            TokKind::KwRegion => "region",
            TokKind::KwTag => "tag",
            TokKind::KwUnit => "unit",
            TokKind::KwBool => "bool",
            TokKind::KwInt4 => "int4",
            TokKind::KwLet => "let",
            TokKind::KwIn => "in",
            TokKind::KwIf => "if",
            TokKind::KwThen => "then",
            TokKind::KwElse => "else",
            TokKind::KwFst => "fst",
            TokKind::KwSnd => "snd",
            TokKind::KwAsk => "ask",
            TokKind::KwRead => "read",
            TokKind::KwWrite => "write",
            TokKind::KwOut => "out",
            TokKind::KwTrue => "true",
            TokKind::KwFalse => "false",
            TokKind::KwRd => "rd",
            TokKind::KwWr => "wr",
            TokKind::KwIp => "ip",
        };
        format!("`{kw}`")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tok {
    pub kind: TokKind,
    pub line: usize,
    pub col: usize,
}

fn keyword(word: &str) -> Option<TokKind> {
    Some(match word {
        "param" => TokKind::KwParam,
        "region" => TokKind::KwRegion,
        "tag" => TokKind::KwTag,
        "unit" => TokKind::KwUnit,
        "bool" => TokKind::KwBool,
        "int4" => TokKind::KwInt4,
        "let" => TokKind::KwLet,
        "in" => TokKind::KwIn,
        "if" => TokKind::KwIf,
        "then" => TokKind::KwThen,
        "else" => TokKind::KwElse,
        "fst" => TokKind::KwFst,
        "snd" => TokKind::KwSnd,
        "ask" => TokKind::KwAsk,
        "read" => TokKind::KwRead,
        "write" => TokKind::KwWrite,
        "out" => TokKind::KwOut,
        "true" => TokKind::KwTrue,
        "false" => TokKind::KwFalse,
        "rd" => TokKind::KwRd,
        "wr" => TokKind::KwWr,
        "ip" => TokKind::KwIp,
        _ => return None,
    })
}

struct Lexer {
    chars: Vec<char>,
    i: usize,
    line: usize,
    col: usize,
}

impl Lexer {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }
}

pub fn lex(source: &str) -> Result<Vec<Tok>, ParseError> {
    let mut lx = Lexer {
        chars: source.chars().collect(),
        i: 0,
        line: 1,
        col: 1,
    };
    let mut toks = Vec::new();
    while let Some(c) = lx.peek() {
        if c.is_whitespace() {
            lx.bump();
            continue;
        }
        let (tline, tcol) = (lx.line, lx.col);
        let kind = match c {
            '\\' => {
                lx.bump();
                TokKind::Lambda
            }
            ':' => {
                lx.bump();
                TokKind::Colon
            }
            '.' => {
                lx.bump();
                TokKind::Dot
            }
            ';' => {
                lx.bump();
                TokKind::Semi
            }
            '=' => {
                lx.bump();
                TokKind::Eq
            }
            '(' => {
                lx.bump();
                TokKind::LParen
            }
            ')' => {
                lx.bump();
                TokKind::RParen
            }
            ',' => {
                lx.bump();
                TokKind::Comma
            }
            '{' => {
                lx.bump();
                TokKind::LBrace
            }
            '}' => {
                lx.bump();
                TokKind::RBrace
            }
            '-' => {
                lx.bump();
                if lx.peek() == Some('>') {
                    lx.bump();
                    TokKind::Arrow
                } else {
                    return Err(ParseError::Syntax {
                        line: tline,
                        col: tcol,
                        expected: "`->`".to_string(),
                        found: lx
                            .peek()
                            .map(|c| format!("`-{c}`"))
                            .unwrap_or_else(|| "end of input".to_string()),
                    });
                }
            }
            d if d.is_ascii_digit() => {
                lx.bump();
                TokKind::Digit(d as u8 - b'0')
            }
            a if a.is_ascii_alphabetic() || a == '_' => {
                let mut word = String::new();
                word.push(lx.bump().unwrap());
                while let Some(n) = lx.peek() {
                    if n.is_ascii_alphanumeric() || n == '_' {
                        word.push(lx.bump().unwrap());
                    } else {
                        break;
                    }
                }
                keyword(&word).unwrap_or(TokKind::Ident(word))
            }
            other => {
                return Err(ParseError::Syntax {
                    line: tline,
                    col: tcol,
                    expected: "a token".to_string(),
                    found: format!("`{other}`"),
                })
            }
        };
        toks.push(Tok {
            kind,
            line: tline,
            col: tcol,
        });
    }
    toks.push(Tok {
        kind: TokKind::Eof,
        line: lx.line,
        col: lx.col,
    });
    Ok(toks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_a_small_program() {
        let toks = lex("param p : int4; \\x:int4. ask p").unwrap();
        let kinds: Vec<&TokKind> = toks.iter().map(|t| &t.kind).collect();
        assert!(matches!(kinds[0], TokKind::KwParam));
        assert!(matches!(kinds[1], TokKind::Ident(n) if n == "p"));
        assert!(matches!(kinds[4], TokKind::Semi));
        assert!(matches!(kinds[5], TokKind::Lambda));
        assert!(matches!(kinds.last().unwrap(), TokKind::Eof));
    }

    #[test]
    fn positions_are_one_based_and_track_lines() {
        let toks = lex("let x =\n  3 in x").unwrap();
        assert_eq!((toks[0].line, toks[0].col), (1, 1));
        let three = toks.iter().find(|t| t.kind == TokKind::Digit(3)).unwrap();
        assert_eq!((three.line, three.col), (2, 3));
    }

    #[test]
    fn rejects_stray_characters() {
        assert!(matches!(lex("let # x"), Err(ParseError::Syntax { .. })));
        assert!(matches!(lex("a - b"), Err(ParseError::Syntax { .. })));
    }
}
