//! Parser for the theory DSL.
//!
//! ```text
//! theory SGraph {
//!   ob E, V
//!   hom src: E -> V
//!   hom tgt: E -> V
//!   hom inv: E -> E
//!   eq inv.inv = id(E)
//!   eq inv.src = tgt
//!   eq inv.tgt = src
//! }
//! ```
//!
//! Whitespace is insignificant and `#` starts a comment running to the end of
//! the line. `hom f, g: A -> B` declares several parallel generators at once.

use super::{validate_theory, Equation, GeneratorDecl, Path, TheoryError, TheoryErrors, TheoryPresentation};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Colon,
    Arrow,
    Dot,
    Eq,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, TheoryError> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (line, col) = (lineno + 1, i + 1);
            let simple = match c {
                '{' => Some(Tok::LBrace),
                '}' => Some(Tok::RBrace),
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                ',' => Some(Tok::Comma),
                ':' => Some(Tok::Colon),
                '.' => Some(Tok::Dot),
                '=' => Some(Tok::Eq),
                _ => None,
            };
            if let Some(tok) = simple {
                out.push(Token { tok, line, col });
                i += 1;
            } else if c == '#' {
                break;
            } else if c.is_whitespace() {
                i += 1;
            } else if c == '-' && chars.get(i + 1) == Some(&'>') {
                out.push(Token { tok: Tok::Arrow, line, col });
                i += 2;
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let ident: String = chars[start..i].iter().collect();
                out.push(Token { tok: Tok::Ident(ident), line, col });
            } else {
                return Err(TheoryError::Syntax { line, col, msg: format!("unexpected character `{c}`") });
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

struct RawPath {
    identity_of: Option<String>,
    steps: Vec<(String, usize, usize)>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.end, |t| (t.line, t.col))
    }

    fn error(&self, msg: impl Into<String>) -> TheoryError {
        let (line, col) = self.here();
        TheoryError::Syntax { line, col, msg: msg.into() }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), TheoryError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, TheoryError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    fn ident_list(&mut self, what: &str) -> Result<Vec<String>, TheoryError> {
        let mut names = vec![self.ident(what)?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            names.push(self.ident(what)?);
        }
        Ok(names)
    }

    fn path(&mut self) -> Result<RawPath, TheoryError> {
        let (line, col) = self.here();
        let first = self.ident("a path")?;
        if first == "id" && self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            let ob = self.ident("an object name")?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(RawPath { identity_of: Some(ob), steps: Vec::new() });
        }
        let mut steps = vec![(first, line, col)];
        while self.peek() == Some(&Tok::Dot) {
            self.pos += 1;
            let (line, col) = self.here();
            steps.push((self.ident("a generator name")?, line, col));
        }
        Ok(RawPath { identity_of: None, steps })
    }
}

/// Parses and validates a theory written in the DSL.
pub fn parse_theory(text: &str) -> Result<TheoryPresentation, TheoryErrors> {
    let toks = lex(text)?;
    let lines = text.lines().count().max(1);
    let end = (lines, text.lines().last().map_or(1, |l| l.chars().count() + 1));
    let mut p = Parser { toks, pos: 0, end };

    match p.peek() {
        Some(Tok::Ident(k)) if k == "theory" => p.pos += 1,
        _ => return Err(p.error("expected `theory`").into()),
    }
    let name = p.ident("a theory name")?;
    p.expect(Tok::LBrace, "`{`")?;

    let mut objects = Vec::new();
    let mut generators = Vec::new();
    let mut raw_equations = Vec::new();
    loop {
        match p.peek() {
            Some(Tok::RBrace) => {
                p.pos += 1;
                break;
            }
            Some(Tok::Ident(k)) if k == "ob" => {
                p.pos += 1;
                objects.extend(p.ident_list("an object name")?);
            }
            Some(Tok::Ident(k)) if k == "hom" => {
                p.pos += 1;
                let names = p.ident_list("a generator name")?;
                p.expect(Tok::Colon, "`:`")?;
                let dom = p.ident("a domain object")?;
                p.expect(Tok::Arrow, "`->`")?;
                let cod = p.ident("a codomain object")?;
                for name in names {
                    generators.push(GeneratorDecl { name, dom: dom.clone(), cod: cod.clone() });
                }
            }
            Some(Tok::Ident(k)) if k == "eq" => {
                p.pos += 1;
                let lhs = p.path()?;
                p.expect(Tok::Eq, "`=`")?;
                let rhs = p.path()?;
                raw_equations.push((lhs, rhs));
            }
            None => return Err(p.error("unexpected end of input, expected `}`").into()),
            _ => return Err(p.error("expected `ob`, `hom`, `eq` or `}`").into()),
        }
    }
    if p.peek().is_some() {
        return Err(p.error("trailing input after `}`").into());
    }

    let resolve = |raw: RawPath| -> Result<Path, TheoryError> {
        if let Some(ob) = raw.identity_of {
            return Ok(Path::identity(&ob));
        }
        let (first, line, col) = &raw.steps[0];
        let dom = generators
            .iter()
            .find(|g: &&GeneratorDecl| &g.name == first)
            .map(|g| g.dom.clone())
            .ok_or_else(|| TheoryError::Syntax {
                line: *line,
                col: *col,
                msg: format!("undeclared generator `{first}`"),
            })?;
        Ok(Path { dom, steps: raw.steps.into_iter().map(|s| s.0).collect() })
    };
    let mut equations = Vec::new();
    for (lhs, rhs) in raw_equations {
        equations.push(Equation { lhs: resolve(lhs)?, rhs: resolve(rhs)? });
    }

    let theory = TheoryPresentation { name, objects, generators, equations };
    validate_theory(&theory)?;
    Ok(theory)
}
