use std::collections::{BTreeSet, HashSet};

use super::ast::*;
use super::lexer::{blank_comments, tokenize, LineIndex, Tok, Token};
use super::ParseError;

/// Parses a litmus file. The result is structurally valid but not yet
/// [validated](super::validate).
pub fn parse_litmus(text: &str) -> Result<LitmusTest, ParseError> {
    let index = LineIndex::new(text);
    let src = blank_comments(text, &index)?;
    Parser {
        src: &src,
        index: &index,
        pos: 0,
    }
    .file()
}

struct Parser<'a> {
    src: &'a str,
    index: &'a LineIndex,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, offset: usize, msg: impl Into<String>) -> ParseError {
        self.index.error(offset, msg)
    }

    /// Next line (without its newline) starting at the cursor; advances past it.
    fn next_line(&mut self) -> Option<(usize, &'a str)> {
        if self.pos >= self.src.len() {
            return None;
        }
        let start = self.pos;
        let end = self.src[start..]
            .find('\n')
            .map(|i| start + i)
            .unwrap_or(self.src.len());
        self.pos = (end + 1).min(self.src.len());
        Some((start, &self.src[start..end]))
    }

    fn skip_blank(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn file(mut self) -> Result<LitmusTest, ParseError> {
        self.skip_blank();
        let (hstart, header) = self
            .next_line()
            .ok_or_else(|| self.err(self.src.len(), "empty file"))?;
        let mut words = header.split_whitespace();
        if words.next() != Some("LISA") {
            return Err(self.err(hstart, "expected header line 'LISA <name>'"));
        }
        let name = match (words.next(), words.next()) {
            (Some(n), None) => n.to_string(),
            (None, _) => return Err(self.err(hstart, "missing test name")),
            (Some(_), Some(_)) => return Err(self.err(hstart, "test name must be a single word")),
        };

        let mut metadata = Vec::new();
        loop {
            self.skip_blank();
            if self.pos >= self.src.len() {
                return Err(self.err(self.src.len(), "missing prelude '{ ... }'"));
            }
            if self.src[self.pos..].starts_with('{') {
                break;
            }
            let (_, line) = self.next_line().unwrap();
            metadata.push(line.trim().to_string());
        }
        let prelude = self.prelude()?;
        let (table_start, table_end, cond_start) = self.split_table();
        let processes = self.table(table_start, table_end)?;
        let final_cond = self.condition(cond_start)?;

        Ok(LitmusTest {
            name,
            metadata,
            prelude,
            processes,
            final_cond,
            annotation_universe: BTreeSet::new(),
        })
    }

    fn prelude(&mut self) -> Result<Vec<(String, i64)>, ParseError> {
        let open = self.pos;
        let close = self.src[open..]
            .find('}')
            .map(|i| open + i)
            .ok_or_else(|| self.err(open, "unterminated prelude"))?;
        self.pos = close + 1;
        let body = &self.src[open + 1..close];
        let mut out = Vec::new();
        let mut offset = open + 1;
        for entry in body.split(';') {
            let base = offset;
            offset += entry.len() + 1;
            let toks = tokenize(entry, base, self.index)?;
            match toks.as_slice() {
                [] => {}
                [Token {
                    tok: Tok::Ident(loc),
                    ..
                }, Token { tok: Tok::Eq, .. }, Token {
                    tok: Tok::Int(v), ..
                }] => out.push((loc.clone(), *v)),
                [t, ..] => {
                    return Err(self.err(t.offset, "expected 'location = integer' in prelude"))
                }
            }
        }
        Ok(out)
    }

    /// Locates the process table and the condition line following the prelude.
    fn split_table(&mut self) -> (usize, usize, Option<usize>) {
        let table_start = self.pos;
        let mut cond = None;
        while let Some((start, line)) = self.next_line() {
            let t = line.trim_start();
            let starts_cond = ["exists", "~exists", "forall", "~ exists"]
                .iter()
                .any(|k| t.starts_with(k));
            if starts_cond {
                cond = Some(start + (line.len() - t.len()));
                break;
            }
        }
        let table_end = cond.unwrap_or(self.src.len());
        (table_start, table_end, cond)
    }

    fn table(&self, start: usize, end: usize) -> Result<Vec<Process>, ParseError> {
        let text = &self.src[start..end];
        let mut rows: Vec<(usize, &str)> = Vec::new();
        let mut offset = start;
        let pieces: Vec<&str> = text.split(';').collect();
        let last = pieces.len() - 1;
        for (i, piece) in pieces.into_iter().enumerate() {
            let base = offset;
            offset += piece.len() + 1;
            if i == last {
                if !piece.trim().is_empty() {
                    let lead = piece.len() - piece.trim_start().len();
                    return Err(self.err(base + lead, "row is not terminated by ';'"));
                }
                continue;
            }
            rows.push((base, piece));
        }
        // blank pieces between separators are row terminators with no content
        rows.retain(|(_, r)| !r.trim().is_empty());
        let Some(&(hbase, header)) = rows.first() else {
            return Err(self.err(end.min(self.src.len()), "no processes"));
        };

        let mut procs = Vec::new();
        for (col, (cbase, cell)) in split_cells(hbase, header).into_iter().enumerate() {
            let toks = tokenize(cell, cbase, self.index)?;
            let id = match toks.as_slice() {
                [Token {
                    tok: Tok::Ident(p), ..
                }]
                | [Token {
                    tok: Tok::Ident(p), ..
                }, Token {
                    tok: Tok::Colon, ..
                }] => p.strip_prefix('P').and_then(|n| n.parse::<usize>().ok()),
                _ => None,
            };
            match id {
                Some(id) if id == col => procs.push(Process {
                    id,
                    code: Vec::new(),
                }),
                Some(id) => {
                    return Err(self.err(
                        cbase,
                        format!("process P{id} in column {col}; expected P{col}"),
                    ))
                }
                None => {
                    let at = toks.first().map(|t| t.offset).unwrap_or(cbase);
                    return Err(self.err(at, "expected process header 'P<n>'"));
                }
            }
        }

        let mut labels: Vec<HashSet<String>> = vec![HashSet::new(); procs.len()];
        for &(rbase, row) in &rows[1..] {
            let cells = split_cells(rbase, row);
            if cells.len() != procs.len() {
                let lead = row.len() - row.trim_start().len();
                return Err(self.err(
                    rbase + lead,
                    format!(
                        "row has {} columns, expected {}",
                        cells.len(),
                        procs.len()
                    ),
                ));
            }
            for (col, (cbase, cell)) in cells.into_iter().enumerate() {
                let toks = tokenize(cell, cbase, self.index)?;
                let mut cp = CellParser {
                    toks: &toks,
                    i: 0,
                    index: self.index,
                    end: cbase + cell.len(),
                };
                for (offset, instr) in cp.cell()? {
                    if let Instruction::Label(l) = &instr {
                        if !labels[col].insert(l.clone()) {
                            return Err(
                                self.err(offset, format!("duplicate label {l} in P{col}"))
                            );
                        }
                    }
                    procs[col].code.push(instr);
                }
            }
        }
        Ok(procs)
    }

    fn condition(&self, start: Option<usize>) -> Result<Condition, ParseError> {
        let Some(start) = start else {
            return Err(self.err(self.src.len(), "missing final condition"));
        };
        let toks = tokenize(&self.src[start..], start, self.index)?;
        let mut cp = CellParser {
            toks: &toks,
            i: 0,
            index: self.index,
            end: self.src.len(),
        };
        let quantifier = match (cp.peek().cloned(), cp.toks.get(1).map(|t| &t.tok)) {
            (Some(Tok::Tilde), Some(Tok::Ident(k))) if k == "exists" => {
                cp.i += 2;
                Quantifier::NotExists
            }
            (Some(Tok::Ident(k)), _) if k == "exists" => {
                cp.i += 1;
                Quantifier::Exists
            }
            (Some(Tok::Ident(k)), _) if k == "forall" => {
                cp.i += 1;
                Quantifier::Forall
            }
            _ => return Err(self.err(start, "expected exists, ~exists or forall")),
        };
        let body = cp.prop_or()?;
        if let Some(t) = cp.toks.get(cp.i) {
            return Err(self.err(t.offset, "trailing text after condition"));
        }
        Ok(Condition { quantifier, body })
    }
}

fn split_cells(base: usize, row: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut offset = base;
    for cell in row.split('|') {
        out.push((offset, cell));
        offset += cell.len() + 1;
    }
    out
}

struct CellParser<'t> {
    toks: &'t [Token],
    i: usize,
    index: &'t LineIndex,
    /// Offset used for "unexpected end" errors.
    end: usize,
}

impl<'t> CellParser<'t> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.tok)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.i).map(|t| t.offset).unwrap_or(self.end)
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        self.index.error(self.offset(), msg)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.i += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.i += 1;
                Ok(s)
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        match self.peek() {
            Some(Tok::Int(v)) => {
                let v = *v;
                self.i += 1;
                Ok(v)
            }
            _ => Err(self.err("expected integer")),
        }
    }

    /// `(label ':')* instruction?`
    fn cell(&mut self) -> Result<Vec<(usize, Instruction)>, ParseError> {
        let mut out = Vec::new();
        while let (Some(Tok::Ident(l)), Some(Tok::Colon)) =
            (self.peek(), self.toks.get(self.i + 1).map(|t| &t.tok))
        {
            out.push((self.offset(), Instruction::Label(l.clone())));
            self.i += 2;
        }
        if self.i < self.toks.len() {
            let at = self.offset();
            out.push((at, self.instruction()?));
            if self.i < self.toks.len() {
                return Err(self.err("unexpected token after instruction"));
            }
        }
        Ok(out)
    }

    fn annotations(&mut self) -> Result<Annotations, ParseError> {
        self.expect(Tok::LBrack, "'[' after mnemonic")?;
        let mut tags = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::RBrack) => {
                    self.i += 1;
                    return Ok(tags);
                }
                Some(Tok::Comma) => self.i += 1,
                Some(Tok::Ident(t)) => {
                    tags.push(t.clone());
                    self.i += 1;
                }
                _ => return Err(self.err("expected annotation tag or ']'")),
            }
        }
    }

    fn instruction(&mut self) -> Result<Instruction, ParseError> {
        let at = self.offset();
        let mnemonic = self.ident("instruction")?;
        Ok(match mnemonic.as_str() {
            "w" => {
                let annotations = self.annotations()?;
                let location = self.ident("location")?;
                let value = self.expr()?;
                Instruction::Write {
                    annotations,
                    location,
                    value,
                }
            }
            "r" => {
                let annotations = self.annotations()?;
                let register = self.ident("register")?;
                let location = self.ident("location")?;
                Instruction::Read {
                    annotations,
                    register,
                    location,
                }
            }
            "b" => {
                let annotations = self.annotations()?;
                let register = self.ident("register")?;
                let label = self.ident("label")?;
                Instruction::Branch {
                    annotations,
                    register,
                    label,
                }
            }
            "j" => Instruction::Jump {
                label: self.ident("label")?,
            },
            "mov" => {
                let register = self.ident("register")?;
                let value = self.expr()?;
                Instruction::Mov { register, value }
            }
            "f" => Instruction::Fence {
                annotations: self.annotations()?,
            },
            other => {
                return Err(self
                    .index
                    .error(at, format!("unknown mnemonic '{other}'")))
            }
        })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(Tok::Int(v)) => {
                let v = *v;
                self.i += 1;
                Ok(Expr::Const(v))
            }
            Some(Tok::Ident(r)) => {
                let r = r.clone();
                self.i += 1;
                Ok(Expr::Reg(r))
            }
            Some(Tok::LParen) => {
                self.i += 1;
                let at = self.offset();
                let op = self.ident("operator")?;
                let e = if let Some(op) = BinOp::from_mnemonic(&op) {
                    let a = self.expr()?;
                    let b = self.expr()?;
                    Expr::Binop(op, Box::new(a), Box::new(b))
                } else if let Some(op) = UnOp::from_mnemonic(&op) {
                    Expr::Unop(op, Box::new(self.expr()?))
                } else {
                    return Err(self.index.error(at, format!("unknown operator '{op}'")));
                };
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            _ => Err(self.err("expected expression")),
        }
    }

    fn prop_or(&mut self) -> Result<Prop, ParseError> {
        let mut lhs = self.prop_and()?;
        while self.peek() == Some(&Tok::OrOp) {
            self.i += 1;
            let rhs = self.prop_and()?;
            lhs = Prop::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn prop_and(&mut self) -> Result<Prop, ParseError> {
        let mut lhs = self.prop_unary()?;
        while self.peek() == Some(&Tok::AndOp) {
            self.i += 1;
            let rhs = self.prop_unary()?;
            lhs = Prop::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn prop_unary(&mut self) -> Result<Prop, ParseError> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.i += 1;
                Ok(Prop::Not(Box::new(self.prop_unary()?)))
            }
            Some(Tok::LParen) => {
                self.i += 1;
                let p = self.prop_or()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(p)
            }
            Some(Tok::Ident(k)) if k == "true" => {
                self.i += 1;
                Ok(Prop::True)
            }
            Some(Tok::Ident(k)) if k == "false" => {
                self.i += 1;
                Ok(Prop::False)
            }
            Some(Tok::Int(p)) => {
                let at = self.offset();
                let p = *p;
                self.i += 1;
                self.expect(Tok::Colon, "':' after process number")?;
                let reg = self.ident("register")?;
                self.expect(Tok::Eq, "'='")?;
                let proc = usize::try_from(p)
                    .map_err(|_| self.index.error(at, "negative process number"))?;
                Ok(Prop::Atom(Observable::Reg { proc, reg }, self.int()?))
            }
            Some(Tok::LBrack) => {
                self.i += 1;
                let loc = self.ident("location")?;
                self.expect(Tok::RBrack, "']'")?;
                self.expect(Tok::Eq, "'='")?;
                Ok(Prop::Atom(Observable::Loc { loc }, self.int()?))
            }
            Some(Tok::Ident(_)) => {
                let loc = self.ident("location")?;
                self.expect(Tok::Eq, "'='")?;
                Ok(Prop::Atom(Observable::Loc { loc }, self.int()?))
            }
            _ => Err(self.err("expected condition atom")),
        }
    }
}
