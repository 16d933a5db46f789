use std::collections::{BTreeSet, HashMap};

use super::{CatError, CatModel, CheckKind, Name, Predefined, RelExpr, Statement, Ty};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Str(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Pipe,
    Amp,
    Backslash,
    Semi,
    Inv,
    Plus,
    Star,
    Tilde,
    Eq,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const STATEMENT_KEYWORDS: &[&str] = &["let", "acyclic", "irreflexive", "empty"];
const UNSUPPORTED: &[&str] = &[
    "include", "show", "unshow", "flag", "procedure", "call", "with", "forall", "enum",
    "instructions", "do", "if", "match", "undefined_unless", "set", "assert",
];
const KEYWORDS: &[&str] = &["let", "rec", "and", "acyclic", "irreflexive", "empty", "as", "in"];

fn err(line: usize, col: usize, message: impl Into<String>) -> CatError {
    CatError {
        line,
        col,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Token>, CatError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    macro_rules! advance {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c.is_whitespace() {
            advance!();
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                advance!();
            }
            continue;
        }
        if c == '(' && chars.get(i + 1) == Some(&'*') {
            advance!();
            advance!();
            loop {
                if i + 1 >= chars.len() {
                    return Err(err(tl, tc, "unterminated comment"));
                }
                if chars[i] == '*' && chars[i + 1] == ')' {
                    advance!();
                    advance!();
                    break;
                }
                advance!();
            }
            continue;
        }
        if c == '"' {
            advance!();
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None | Some('\n') => return Err(err(tl, tc, "unterminated string")),
                    Some('"') => {
                        advance!();
                        break;
                    }
                    Some(&d) => {
                        s.push(d);
                        advance!();
                    }
                }
            }
            out.push(Token {
                tok: Tok::Str(s),
                line: tl,
                col: tc,
            });
            continue;
        }
        if c == '^' {
            if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'1') {
                advance!();
                advance!();
                advance!();
                out.push(Token {
                    tok: Tok::Inv,
                    line: tl,
                    col: tc,
                });
                continue;
            }
            return Err(err(tl, tc, "expected '^-1'"));
        }
        let simple = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBrack),
            ']' => Some(Tok::RBrack),
            '|' => Some(Tok::Pipe),
            '&' => Some(Tok::Amp),
            '\\' => Some(Tok::Backslash),
            ';' => Some(Tok::Semi),
            '+' => Some(Tok::Plus),
            '*' => Some(Tok::Star),
            '~' => Some(Tok::Tilde),
            '=' => Some(Tok::Eq),
            _ => None,
        };
        if let Some(tok) = simple {
            advance!();
            out.push(Token {
                tok,
                line: tl,
                col: tc,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while i < chars.len()
                && (chars[i].is_ascii_alphanumeric() || matches!(chars[i], '_' | '-' | '.'))
            {
                s.push(chars[i]);
                advance!();
            }
            out.push(Token {
                tok: Tok::Ident(s),
                line: tl,
                col: tc,
            });
            continue;
        }
        return Err(err(tl, tc, format!("unexpected character '{c}'")));
    }
    Ok(out)
}

/// Parses a model whose only free names are the predefined ones.
pub fn parse_cat(text: &str) -> Result<CatModel, CatError> {
    parse_cat_with_tags(text, &BTreeSet::new())
}

/// Parses a model that may also refer to the annotation-tag sets in `tags`.
/// Predefined names take precedence over tags of the same name.
pub fn parse_cat_with_tags(text: &str, tags: &BTreeSet<&str>) -> Result<CatModel, CatError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks: &toks,
        i: 0,
        lets: HashMap::new(),
        slots: 0,
        tags,
    };

    let mut name = String::new();
    if let Some(first) = toks.first() {
        match &first.tok {
            Tok::Ident(k) if STATEMENT_KEYWORDS.contains(&k.as_str()) || UNSUPPORTED.contains(&k.as_str()) => {}
            Tok::Str(s) => {
                name = s.clone();
                p.i = 1;
            }
            _ => {
                let line = first.line;
                let words: Vec<String> = toks
                    .iter()
                    .take_while(|t| t.line == line)
                    .map(|t| match &t.tok {
                        Tok::Ident(s) | Tok::Str(s) => s.clone(),
                        other => format!("{other:?}"),
                    })
                    .collect();
                p.i = words.len();
                name = words.join(" ");
            }
        }
    }

    let mut statements = Vec::new();
    while p.i < toks.len() {
        statements.push(p.statement()?);
    }
    Ok(CatModel {
        name,
        statements,
        slots: p.slots,
    })
}

struct Parser<'t> {
    toks: &'t [Token],
    i: usize,
    lets: HashMap<String, (usize, Ty)>,
    slots: usize,
    tags: &'t BTreeSet<&'t str>,
}

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        match self.toks.get(self.i).or(self.toks.last()) {
            Some(t) => (t.line, t.col),
            None => (1, 1),
        }
    }

    fn error(&self, message: impl Into<String>) -> CatError {
        let (l, c) = self.here();
        err(l, c, message)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), CatError> {
        if self.peek() == Some(&tok) {
            self.i += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn keyword(&self) -> Option<&str> {
        match self.peek() {
            Some(Tok::Ident(k)) => Some(k.as_str()),
            _ => None,
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, CatError> {
        match self.peek() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.i += 1;
                Ok(s)
            }
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    fn statement(&mut self) -> Result<Statement, CatError> {
        let (line, _) = self.here();
        let kw = self.keyword().map(str::to_string);
        match kw.as_deref() {
            Some("let") => {
                self.i += 1;
                if self.keyword() == Some("rec") {
                    return Err(self.error("recursive definitions (let rec) are not supported"));
                }
                let name = self.ident("name after 'let'")?;
                if Predefined::lookup(&name).is_some() {
                    return Err(self.error(format!("cannot redefine predefined name {name}")));
                }
                self.expect(Tok::Eq, "'='")?;
                let (expr, ty) = self.union()?;
                if self.keyword() == Some("and") {
                    return Err(self.error("simultaneous definitions (let ... and ...) are not supported"));
                }
                let slot = self.slots;
                self.slots += 1;
                self.lets.insert(name.clone(), (slot, ty));
                Ok(Statement::Let {
                    name,
                    slot,
                    expr,
                    ty,
                    line,
                })
            }
            Some(k @ ("acyclic" | "irreflexive" | "empty")) => {
                let kind = match k {
                    "acyclic" => CheckKind::Acyclic,
                    "irreflexive" => CheckKind::Irreflexive,
                    _ => CheckKind::Empty,
                };
                self.i += 1;
                let start = self.here();
                let (expr, ty) = self.union()?;
                if kind != CheckKind::Empty && ty != Ty::Rel {
                    return Err(err(
                        start.0,
                        start.1,
                        format!("{} expects a relation, found an event set", kind.keyword()),
                    ));
                }
                let name = if self.keyword() == Some("as") {
                    self.i += 1;
                    self.ident("check name after 'as'")?
                } else {
                    expr.to_string()
                };
                Ok(Statement::Check {
                    kind,
                    expr,
                    name,
                    line,
                })
            }
            Some(k) if UNSUPPORTED.contains(&k) => {
                Err(self.error(format!("'{k}' is not supported by this cat subset")))
            }
            _ => Err(self.error("expected let, acyclic, irreflexive or empty")),
        }
    }

    fn binary(
        &mut self,
        op: Tok,
        next: fn(&mut Self) -> Result<(RelExpr, Ty), CatError>,
        build: fn(Box<RelExpr>, Box<RelExpr>) -> RelExpr,
        rel_only: bool,
        sym: &str,
    ) -> Result<(RelExpr, Ty), CatError> {
        let (mut lhs, ty) = next(self)?;
        while self.peek() == Some(&op) {
            let at = self.here();
            self.i += 1;
            let (rhs, rty) = next(self)?;
            if rel_only && (ty != Ty::Rel || rty != Ty::Rel) {
                return Err(err(at.0, at.1, format!("'{sym}' expects relations")));
            }
            if ty != rty {
                return Err(err(
                    at.0,
                    at.1,
                    format!("'{sym}' mixes a {ty} and a {rty}"),
                ));
            }
            lhs = build(Box::new(lhs), Box::new(rhs));
        }
        Ok((lhs, ty))
    }

    fn union(&mut self) -> Result<(RelExpr, Ty), CatError> {
        self.binary(Tok::Pipe, Self::seq, RelExpr::Union, false, "|")
    }

    fn seq(&mut self) -> Result<(RelExpr, Ty), CatError> {
        self.binary(Tok::Semi, Self::diff, RelExpr::Sequence, true, ";")
    }

    fn diff(&mut self) -> Result<(RelExpr, Ty), CatError> {
        self.binary(Tok::Backslash, Self::inter, RelExpr::Difference, false, "\\")
    }

    fn inter(&mut self) -> Result<(RelExpr, Ty), CatError> {
        self.binary(Tok::Amp, Self::cartesian, RelExpr::Intersection, false, "&")
    }

    fn starts_operand(&self, at: usize) -> bool {
        match self.toks.get(at).map(|t| &t.tok) {
            Some(Tok::Ident(s)) => !KEYWORDS.contains(&s.as_str()),
            Some(Tok::LParen | Tok::LBrack | Tok::Tilde) => true,
            _ => false,
        }
    }

    fn cartesian(&mut self) -> Result<(RelExpr, Ty), CatError> {
        let (mut lhs, mut ty) = self.unary()?;
        while self.peek() == Some(&Tok::Star) && self.starts_operand(self.i + 1) {
            let at = self.here();
            self.i += 1;
            let (rhs, rty) = self.unary()?;
            if ty != Ty::Set || rty != Ty::Set {
                return Err(err(at.0, at.1, "cartesian product '*' expects event sets"));
            }
            lhs = RelExpr::Cartesian(Box::new(lhs), Box::new(rhs));
            ty = Ty::Rel;
        }
        Ok((lhs, ty))
    }

    fn unary(&mut self) -> Result<(RelExpr, Ty), CatError> {
        if self.peek() == Some(&Tok::Tilde) {
            self.i += 1;
            let (e, ty) = self.unary()?;
            return Ok((RelExpr::Complement(Box::new(e)), ty));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<(RelExpr, Ty), CatError> {
        let (mut e, ty) = self.atom()?;
        loop {
            let at = self.here();
            let build: fn(Box<RelExpr>) -> RelExpr = match self.peek() {
                Some(Tok::Inv) => RelExpr::Inverse,
                Some(Tok::Plus) => RelExpr::TransClosure,
                Some(Tok::Star) if !self.starts_operand(self.i + 1) => RelExpr::ReflTransClosure,
                _ => return Ok((e, ty)),
            };
            if ty != Ty::Rel {
                return Err(err(at.0, at.1, "postfix operator expects a relation"));
            }
            self.i += 1;
            e = build(Box::new(e));
        }
    }

    fn atom(&mut self) -> Result<(RelExpr, Ty), CatError> {
        match self.peek() {
            Some(Tok::LParen) => {
                self.i += 1;
                let r = self.union()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(r)
            }
            Some(Tok::LBrack) => {
                let at = self.here();
                self.i += 1;
                let (e, ty) = self.union()?;
                self.expect(Tok::RBrack, "']'")?;
                if ty != Ty::Set {
                    return Err(err(at.0, at.1, "[...] expects an event set"));
                }
                Ok((RelExpr::Lift(Box::new(e)), Ty::Rel))
            }
            Some(Tok::Ident(_)) => {
                let at = self.here();
                let name = self.ident("name")?;
                if let Some(&(slot, ty)) = self.lets.get(&name) {
                    return Ok((RelExpr::Base(Name::Let { name, slot }), ty));
                }
                if let Some(p) = Predefined::lookup(&name) {
                    return Ok((RelExpr::Base(Name::Predefined(p)), p.ty()));
                }
                if self.tags.contains(name.as_str()) {
                    return Ok((RelExpr::Base(Name::Tag(name)), Ty::Set));
                }
                Err(err(at.0, at.1, format!("unknown name {name}")))
            }
            _ => Err(self.error("expected expression")),
        }
    }
}
