//! The spec DSL.
//!
//! ```text
//! spec  := tower ";" map
//! tower := "zp" INT "depth" INT
//!        | "prod" "[" tower ("," tower)* "]"
//!        | "table" PATH
//! map   := "poly" "[" INT ("," INT)* "]"
//!        | "matrix" "[" row ("," row)* "]"      row := "[" INT ("," INT)* "]"
//!        | "shift" | "binom"
//!        | "prod" "[" map ("," map)* "]"
//!        | "tables" PATH
//! ```
//!
//! Integers are decimal and non-negative; they are interpreted mod the
//! relevant level order. Paths are bare words or double-quoted strings.
//! Errors carry line and column numbers.

use std::fmt;

/// Parse failure with source position (1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "syntax error at line {}, column {}: {}",
            self.line, self.col, self.message
        )
    }
}

impl std::error::Error for ParseError {}

/// Tower expression as written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TowerAst {
    Zp { p: u64, depth: usize },
    Prod(Vec<TowerAst>),
    TableFile(String),
}

/// Map expression as written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapAst {
    Poly(Vec<u64>),
    Matrix(Vec<Vec<u64>>),
    Shift,
    Binom,
    Prod(Vec<MapAst>),
    TablesFile(String),
}

/// A full spec: tower plus map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecAst {
    pub tower: TowerAst,
    pub map: MapAst,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Word(String),
    Int(u64),
    LBracket,
    RBracket,
    Comma,
    Semi,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Word(w) => write!(f, "'{w}'"),
            Token::Int(n) => write!(f, "'{n}'"),
            Token::LBracket => write!(f, "'['"),
            Token::RBracket => write!(f, "']'"),
            Token::Comma => write!(f, "','"),
            Token::Semi => write!(f, "';'"),
        }
    }
}

type Spanned = (Token, usize, usize);

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
}

impl Lexer {
    fn new(src: &str) -> Self {
        Lexer {
            chars: src.chars().collect(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col,
            message: message.into(),
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek_char(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek_char(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn next_token(&mut self) -> Result<Option<Spanned>, ParseError> {
        self.skip_ws();
        let (line, col) = (self.line, self.col);
        let Some(c) = self.peek_char() else {
            return Ok(None);
        };
        let token = match c {
            '[' => {
                self.bump();
                Token::LBracket
            }
            ']' => {
                self.bump();
                Token::RBracket
            }
            ',' => {
                self.bump();
                Token::Comma
            }
            ';' => {
                self.bump();
                Token::Semi
            }
            c if c.is_ascii_digit() => {
                let mut text = String::new();
                while matches!(self.peek_char(), Some(d) if d.is_ascii_digit()) {
                    text.push(self.bump().unwrap());
                }
                let value = text.parse::<u64>().map_err(|_| ParseError {
                    line,
                    col,
                    message: format!("integer '{text}' is out of range"),
                })?;
                Token::Int(value)
            }
            c if c.is_ascii_alphabetic() => {
                let mut text = String::new();
                while matches!(self.peek_char(), Some(d) if d.is_ascii_alphanumeric() || d == '_')
                {
                    text.push(self.bump().unwrap());
                }
                Token::Word(text)
            }
            other => {
                return Err(ParseError {
                    line,
                    col,
                    message: format!("unexpected character '{other}'"),
                })
            }
        };
        Ok(Some((token, line, col)))
    }

    /// A path: a double-quoted string or a bare run up to whitespace or a
    /// delimiter.
    fn next_path(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let (line, col) = (self.line, self.col);
        match self.peek_char() {
            Some('"') => {
                self.bump();
                let mut path = String::new();
                loop {
                    match self.bump() {
                        Some('"') => return Ok(path),
                        Some(c) => path.push(c),
                        None => {
                            return Err(ParseError {
                                line,
                                col,
                                message: "unterminated quoted path".into(),
                            })
                        }
                    }
                }
            }
            Some(c) if !c.is_whitespace() && !"[],;\"".contains(c) => {
                let mut path = String::new();
                while matches!(self.peek_char(),
                    Some(d) if !d.is_whitespace() && !"[],;\"".contains(d))
                {
                    path.push(self.bump().unwrap());
                }
                Ok(path)
            }
            _ => Err(ParseError {
                line,
                col,
                message: "expected a file path".into(),
            }),
        }
    }
}

/// Recursive-descent parser with a lazy single-token pushback, so path
/// arguments can be lexed with their own raw rule.
struct Parser {
    lexer: Lexer,
    peeked: Option<Option<Spanned>>,
}

impl Parser {
    fn new(src: &str) -> Self {
        Parser {
            lexer: Lexer::new(src),
            peeked: None,
        }
    }

    fn peek(&mut self) -> Result<Option<&Spanned>, ParseError> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lexer.next_token()?);
        }
        Ok(self.peeked.as_ref().unwrap().as_ref())
    }

    fn next(&mut self) -> Result<Option<Spanned>, ParseError> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => self.lexer.next_token(),
        }
    }

    /// Lex a path immediately after a keyword; nothing may be buffered.
    fn path(&mut self) -> Result<String, ParseError> {
        debug_assert!(self.peeked.is_none(), "path must follow an un-peeked keyword");
        self.lexer.next_path()
    }

    fn end_error(&self, message: impl Into<String>) -> ParseError {
        self.lexer.error_here(message)
    }

    fn expect(&mut self, expected: Token) -> Result<(), ParseError> {
        match self.next()? {
            Some((t, _, _)) if t == expected => Ok(()),
            Some((t, line, col)) => Err(ParseError {
                line,
                col,
                message: format!("expected {expected}, found {t}"),
            }),
            None => Err(self.end_error(format!("expected {expected}, found end of input"))),
        }
    }

    fn expect_word(&mut self, word: &str) -> Result<(), ParseError> {
        match self.next()? {
            Some((Token::Word(w), _, _)) if w == word => Ok(()),
            Some((t, line, col)) => Err(ParseError {
                line,
                col,
                message: format!("expected '{word}', found {t}"),
            }),
            None => Err(self.end_error(format!("expected '{word}', found end of input"))),
        }
    }

    fn expect_int(&mut self) -> Result<u64, ParseError> {
        match self.next()? {
            Some((Token::Int(n), _, _)) => Ok(n),
            Some((t, line, col)) => Err(ParseError {
                line,
                col,
                message: format!("expected an integer, found {t}"),
            }),
            None => Err(self.end_error("expected an integer, found end of input")),
        }
    }

    /// Bracketed comma-separated non-empty list.
    fn list<T>(
        &mut self,
        item: impl Fn(&mut Self) -> Result<T, ParseError>,
    ) -> Result<Vec<T>, ParseError> {
        self.expect(Token::LBracket)?;
        let mut items = vec![item(self)?];
        loop {
            match self.next()? {
                Some((Token::Comma, _, _)) => items.push(item(self)?),
                Some((Token::RBracket, _, _)) => return Ok(items),
                Some((t, line, col)) => {
                    return Err(ParseError {
                        line,
                        col,
                        message: format!("expected ',' or ']', found {t}"),
                    })
                }
                None => return Err(self.end_error("expected ',' or ']', found end of input")),
            }
        }
    }

    fn tower(&mut self) -> Result<TowerAst, ParseError> {
        match self.next()? {
            Some((Token::Word(w), line, col)) => match w.as_str() {
                "zp" => {
                    let p = self.expect_int()?;
                    self.expect_word("depth")?;
                    let depth = self.expect_int()? as usize;
                    Ok(TowerAst::Zp { p, depth })
                }
                "prod" => Ok(TowerAst::Prod(self.list(Self::tower)?)),
                "table" => Ok(TowerAst::TableFile(self.path()?)),
                other => Err(ParseError {
                    line,
                    col,
                    message: format!("expected 'zp', 'prod', or 'table', found '{other}'"),
                }),
            },
            Some((t, line, col)) => Err(ParseError {
                line,
                col,
                message: format!("expected a tower expression, found {t}"),
            }),
            None => Err(self.end_error("expected a tower expression, found end of input")),
        }
    }

    fn map(&mut self) -> Result<MapAst, ParseError> {
        match self.next()? {
            Some((Token::Word(w), line, col)) => match w.as_str() {
                "poly" => Ok(MapAst::Poly(self.list(Self::expect_int)?)),
                "matrix" => Ok(MapAst::Matrix(self.list(|p| p.list(Self::expect_int))?)),
                "shift" => Ok(MapAst::Shift),
                "binom" => Ok(MapAst::Binom),
                "prod" => Ok(MapAst::Prod(self.list(Self::map)?)),
                "tables" => Ok(MapAst::TablesFile(self.path()?)),
                other => Err(ParseError {
                    line,
                    col,
                    message: format!(
                        "expected 'poly', 'matrix', 'shift', 'binom', 'prod', or 'tables', \
                         found '{other}'"
                    ),
                }),
            },
            Some((t, line, col)) => Err(ParseError {
                line,
                col,
                message: format!("expected a map expression, found {t}"),
            }),
            None => Err(self.end_error("expected a map expression, found end of input")),
        }
    }
}

/// Parse a full spec string.
pub fn parse_spec(text: &str) -> Result<SpecAst, ParseError> {
    let mut parser = Parser::new(text);
    let tower = parser.tower()?;
    parser.expect(Token::Semi)?;
    let map = parser.map()?;
    if let Some((t, line, col)) = parser.peek()?.cloned() {
        return Err(ParseError {
            line,
            col,
            message: format!("unexpected trailing {t}"),
        });
    }
    Ok(SpecAst { tower, map })
}

fn write_path(f: &mut fmt::Formatter<'_>, path: &str) -> fmt::Result {
    let bare = !path.is_empty()
        && path
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || "._/-".contains(c));
    if bare {
        f.write_str(path)
    } else {
        write!(f, "\"{path}\"")
    }
}

fn write_ints(f: &mut fmt::Formatter<'_>, v: &[u64]) -> fmt::Result {
    write!(f, "[")?;
    for (i, n) in v.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{n}")?;
    }
    write!(f, "]")
}

impl fmt::Display for TowerAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TowerAst::Zp { p, depth } => write!(f, "zp {p} depth {depth}"),
            TowerAst::Prod(items) => {
                write!(f, "prod [")?;
                for (i, t) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, "]")
            }
            TowerAst::TableFile(path) => {
                write!(f, "table ")?;
                write_path(f, path)
            }
        }
    }
}

impl fmt::Display for MapAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapAst::Poly(coeffs) => {
                write!(f, "poly ")?;
                write_ints(f, coeffs)
            }
            MapAst::Matrix(rows) => {
                write!(f, "matrix [")?;
                for (i, row) in rows.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write_ints(f, row)?;
                }
                write!(f, "]")
            }
            MapAst::Shift => write!(f, "shift"),
            MapAst::Binom => write!(f, "binom"),
            MapAst::Prod(items) => {
                write!(f, "prod [")?;
                for (i, m) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{m}")?;
                }
                write!(f, "]")
            }
            MapAst::TablesFile(path) => {
                write!(f, "tables ")?;
                write_path(f, path)
            }
        }
    }
}

impl fmt::Display for SpecAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}; {}", self.tower, self.map)
    }
}
