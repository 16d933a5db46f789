use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    LBrack,
    RBrack,
    LParen,
    RParen,
    Colon,
    Comma,
    Eq,
    Tilde,
    AndOp,
    OrOp,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    /// Byte offset into the whole source.
    pub offset: usize,
}

/// Maps byte offsets to 1-based line and column numbers.
#[derive(Debug)]
pub struct LineIndex {
    starts: Vec<usize>,
}

impl LineIndex {
    pub fn new(src: &str) -> Self {
        let mut starts = vec![0];
        starts.extend(src.match_indices('\n').map(|(i, _)| i + 1));
        LineIndex { starts }
    }

    pub fn position(&self, offset: usize) -> (usize, usize) {
        let line = self.starts.partition_point(|&s| s <= offset) - 1;
        (line + 1, offset - self.starts[line] + 1)
    }

    pub fn error(&self, offset: usize, message: impl Into<String>) -> ParseError {
        let (line, col) = self.position(offset);
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }
}

/// Replaces `(* ... *)` comments by spaces, keeping newlines so that offsets
/// stay valid.
pub fn blank_comments(src: &str, index: &LineIndex) -> Result<String, ParseError> {
    let bytes = src.as_bytes();
    let mut out = String::with_capacity(src.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'(' && bytes.get(i + 1) == Some(&b'*') {
            let start = i;
            i += 2;
            loop {
                if i + 1 >= bytes.len() {
                    return Err(index.error(start, "unterminated comment"));
                }
                if bytes[i] == b'*' && bytes[i + 1] == b')' {
                    i += 2;
                    break;
                }
                i += 1;
            }
            for c in src[start..i].chars() {
                out.push(if c == '\n' { '\n' } else { ' ' });
            }
            // keep byte offsets aligned for multi-byte characters
            let blanked = src[start..i].chars().count();
            let len = i - start;
            out.extend(std::iter::repeat_n(' ', len - blanked));
        } else {
            let c = src[i..].chars().next().unwrap();
            out.push(c);
            i += c.len_utf8();
        }
    }
    Ok(out)
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '.'
}

/// Tokenises `text`, which starts at byte `base` of the source.
pub fn tokenize(text: &str, base: usize, index: &LineIndex) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        let offset = base + i;
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let simple = match c {
            '[' => Some(Tok::LBrack),
            ']' => Some(Tok::RBrack),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ':' => Some(Tok::Colon),
            ',' => Some(Tok::Comma),
            '=' => Some(Tok::Eq),
            '~' => Some(Tok::Tilde),
            _ => None,
        };
        if let Some(tok) = simple {
            chars.next();
            out.push(Token { tok, offset });
            continue;
        }
        if c == '/' || c == '\\' {
            chars.next();
            let want = if c == '/' { '\\' } else { '/' };
            match chars.next() {
                Some((_, d)) if d == want => {}
                _ => return Err(index.error(offset, format!("unexpected character '{c}'"))),
            }
            let tok = if c == '/' { Tok::AndOp } else { Tok::OrOp };
            out.push(Token { tok, offset });
            continue;
        }
        if c.is_ascii_digit() || c == '-' {
            let mut s = String::new();
            s.push(c);
            chars.next();
            while let Some(&(_, d)) = chars.peek() {
                if d.is_ascii_digit() {
                    s.push(d);
                    chars.next();
                } else {
                    break;
                }
            }
            let v: i64 = s
                .parse()
                .map_err(|_| index.error(offset, format!("invalid integer '{s}'")))?;
            out.push(Token {
                tok: Tok::Int(v),
                offset,
            });
            continue;
        }
        if is_ident_start(c) {
            let mut s = String::new();
            while let Some(&(_, d)) = chars.peek() {
                if is_ident_char(d) {
                    s.push(d);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push(Token {
                tok: Tok::Ident(s),
                offset,
            });
            continue;
        }
        return Err(index.error(offset, format!("unexpected character '{c}'")));
    }
    Ok(out)
}
