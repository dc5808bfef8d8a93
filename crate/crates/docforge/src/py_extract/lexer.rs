//! A minimal Python tokenizer sufficient for signature and docstring
//! extraction.
//!
//! The lexer understands exactly as much Python as the extractor needs:
//! string literals (all prefix/quote combinations, with escape handling),
//! comments, numbers, identifiers, multi-character operators, bracket
//! nesting, and explicit/implicit line continuation. Tokens carry byte
//! offsets into the original source so callers can slice verbatim text
//! (annotations, default expressions) without any re-rendering.
//!
//! Logical lines follow Python's rules: physical newlines inside brackets
//! or after a backslash do not end a logical line; blank and comment-only
//! lines produce no tokens at all.

use std::fmt;

/// One lexed token. `start..end` are byte offsets into the source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tok {
    pub kind: TokKind,
    pub start: usize,
    pub end: usize,
    /// 1-based physical line of the token's first character.
    pub line: u32,
    /// 0-based column with tabs expanded to multiples of 8.
    pub col: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokKind {
    /// Identifier or keyword (the lexer does not distinguish).
    Name(String),
    /// Numeric literal; the exact value is never needed, only the span.
    Number,
    /// String literal with its decoded value (prefixes and quotes stripped,
    /// escapes resolved unless the literal was raw).
    Str { value: String },
    /// Operator or delimiter.
    Op(&'static str),
    /// End of a logical line.
    Newline,
}

impl TokKind {
    pub fn as_name(&self) -> Option<&str> {
        match self {
            TokKind::Name(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_op(&self, op: &str) -> bool {
        matches!(self, TokKind::Op(o) if *o == op)
    }
}

/// Lexical error with 1-based line and 0-based column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub line: u32,
    pub col: u32,
    pub msg: String,
}

impl fmt::Display for LexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.msg)
    }
}

/// Multi-character operators first so longest-match wins.
const OPERATORS: &[&str] = &[
    "**=", "//=", ">>=", "<<=", "...", "->", ":=", "==", "!=", "<=", ">=",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "@=", "**", "//", "<<",
    ">>", "(", ")", "[", "]", "{", "}", ",", ":", ".", ";", "@", "=", "+",
    "-", "*", "/", "%", "&", "|", "^", "~", "<", ">",
];

struct Lexer<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
    line: u32,
    col: u32,
    depth: u32,
    toks: Vec<Tok>,
    line_has_tokens: bool,
}

/// Tokenize a whole source file into a flat token stream with
/// [`TokKind::Newline`] markers between logical lines.
pub fn tokenize(src: &str) -> Result<Vec<Tok>, LexError> {
    let mut lx = Lexer {
        src,
        chars: src.char_indices().collect(),
        pos: 0,
        line: 1,
        col: 0,
        depth: 0,
        toks: Vec::new(),
        line_has_tokens: false,
    };
    lx.run()?;
    Ok(lx.toks)
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn peek_at(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.pos + ahead).map(|&(_, c)| c)
    }

    fn byte_at(&self, idx: usize) -> usize {
        self.chars
            .get(idx)
            .map(|&(b, _)| b)
            .unwrap_or(self.src.len())
    }

    /// Advance one char, maintaining line/col bookkeeping.
    fn bump(&mut self) -> Option<char> {
        let &(_, c) = self.chars.get(self.pos)?;
        self.pos += 1;
        match c {
            '\n' => {
                self.line += 1;
                self.col = 0;
            }
            '\t' => self.col = (self.col / 8 + 1) * 8,
            _ => self.col += 1,
        }
        Some(c)
    }

    fn err(&self, msg: impl Into<String>) -> LexError {
        LexError {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        }
    }

    fn push(&mut self, kind: TokKind, start: usize, line: u32, col: u32) {
        let end = self.byte_at(self.pos);
        self.toks.push(Tok {
            kind,
            start,
            end,
            line,
            col,
        });
        self.line_has_tokens = true;
    }

    fn emit_newline(&mut self) {
        if self.line_has_tokens {
            let at = self.byte_at(self.pos);
            self.toks.push(Tok {
                kind: TokKind::Newline,
                start: at,
                end: at,
                line: self.line,
                col: self.col,
            });
            self.line_has_tokens = false;
        }
    }

    fn run(&mut self) -> Result<(), LexError> {
        while let Some(c) = self.peek() {
            match c {
                ' ' | '\t' | '\r' | '\x0c' => {
                    self.bump();
                }
                '\n' => {
                    if self.depth == 0 {
                        self.emit_newline();
                    }
                    self.bump();
                }
                '#' => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                '\\' => {
                    // Explicit line continuation: backslash-newline joins
                    // physical lines; anything else after '\' is an error.
                    if self.peek_at(1) == Some('\n')
                        || (self.peek_at(1) == Some('\r') && self.peek_at(2) == Some('\n'))
                    {
                        self.bump();
                        while self.peek() == Some('\r') {
                            self.bump();
                        }
                        self.bump();
                    } else {
                        return Err(self.err("unexpected character after line continuation"));
                    }
                }
                _ if starts_string(self, c) => self.string()?,
                _ if c.is_alphabetic() || c == '_' => self.name(),
                _ if c.is_ascii_digit() || (c == '.' && matches!(self.peek_at(1), Some(d) if d.is_ascii_digit())) => {
                    self.number()
                }
                _ => self.operator()?,
            }
        }
        if self.depth > 0 {
            return Err(self.err("unexpected end of file inside brackets"));
        }
        self.emit_newline();
        Ok(())
    }

    fn name(&mut self) {
        let start = self.byte_at(self.pos);
        let (line, col) = (self.line, self.col);
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || c == '_' {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        self.push(TokKind::Name(s), start, line, col);
    }

    fn number(&mut self) {
        let start = self.byte_at(self.pos);
        let (line, col) = (self.line, self.col);
        let first = self.peek();
        let radix_prefixed = first == Some('0')
            && matches!(
                self.peek_at(1),
                Some('x') | Some('X') | Some('b') | Some('B') | Some('o') | Some('O')
            );
        let mut prev = '\0';
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' || c == '.' {
                prev = c;
                self.bump();
            } else if (c == '+' || c == '-')
                && !radix_prefixed
                && (prev == 'e' || prev == 'E')
                && matches!(self.peek_at(1), Some(d) if d.is_ascii_digit())
            {
                prev = c;
                self.bump();
            } else {
                break;
            }
        }
        self.push(TokKind::Number, start, line, col);
    }

    fn operator(&mut self) -> Result<(), LexError> {
        let start_idx = self.pos;
        let start = self.byte_at(start_idx);
        let (line, col) = (self.line, self.col);
        let rest: String = self
            .chars
            .iter()
            .skip(start_idx)
            .take(3)
            .map(|&(_, c)| c)
            .collect();
        for op in OPERATORS {
            if rest.starts_with(op) {
                for _ in 0..op.chars().count() {
                    self.bump();
                }
                match *op {
                    "(" | "[" | "{" => self.depth += 1,
                    ")" | "]" | "}" => {
                        if self.depth == 0 {
                            return Err(LexError {
                                line,
                                col,
                                msg: format!("unmatched '{op}'"),
                            });
                        }
                        self.depth -= 1;
                    }
                    _ => {}
                }
                self.push(TokKind::Op(op), start, line, col);
                return Ok(());
            }
        }
        Err(self.err(format!(
            "unexpected character {:?}",
            self.peek().unwrap_or('\0')
        )))
    }

    /// Lex a string literal, handling prefixes, triple quotes, and escapes.
    fn string(&mut self) -> Result<(), LexError> {
        let start = self.byte_at(self.pos);
        let (line, col) = (self.line, self.col);
        let mut raw = false;
        while let Some(c) = self.peek() {
            if c == '"' || c == '\'' {
                break;
            }
            if c == 'r' || c == 'R' {
                raw = true;
            }
            self.bump(); // prefix letter (r/b/u/f in any case/combination)
        }
        let quote = self.peek().ok_or_else(|| self.err("unterminated string"))?;
        self.bump();
        let triple = self.peek() == Some(quote) && self.peek_at(1) == Some(quote);
        if triple {
            self.bump();
            self.bump();
        } else if self.peek() == Some(quote) {
            // empty short string: the second quote closes immediately
            self.bump();
            self.push(TokKind::Str { value: String::new() }, start, line, col);
            return Ok(());
        }
        let inner_start = self.byte_at(self.pos);
        loop {
            let c = match self.peek() {
                Some(c) => c,
                None => {
                    return Err(LexError {
                        line,
                        col,
                        msg: "unterminated string literal".into(),
                    })
                }
            };
            if c == '\\' {
                // Backslash always shields the next character from
                // terminating the literal, raw prefix or not.
                self.bump();
                if self.bump().is_none() {
                    return Err(LexError {
                        line,
                        col,
                        msg: "unterminated string literal".into(),
                    });
                }
                continue;
            }
            if c == '\n' && !triple {
                return Err(LexError {
                    line,
                    col,
                    msg: "newline inside single-quoted string".into(),
                });
            }
            if c == quote {
                if !triple {
                    let inner_end = self.byte_at(self.pos);
                    self.bump();
                    let value = decode(&self.src[inner_start..inner_end], raw);
                    self.push(TokKind::Str { value }, start, line, col);
                    return Ok(());
                }
                if self.peek_at(1) == Some(quote) && self.peek_at(2) == Some(quote) {
                    let inner_end = self.byte_at(self.pos);
                    self.bump();
                    self.bump();
                    self.bump();
                    let value = decode(&self.src[inner_start..inner_end], raw);
                    self.push(TokKind::Str { value }, start, line, col);
                    return Ok(());
                }
            }
            self.bump();
        }
    }
}

fn starts_string(lx: &Lexer<'_>, c: char) -> bool {
    if c == '"' || c == '\'' {
        return true;
    }
    // up to two prefix letters from {r,b,u,f} followed by a quote
    let is_prefix = |c: char| matches!(c, 'r' | 'R' | 'b' | 'B' | 'u' | 'U' | 'f' | 'F');
    if !is_prefix(c) {
        return false;
    }
    match lx.peek_at(1) {
        Some('"') | Some('\'') => true,
        Some(second) if is_prefix(second) => {
            matches!(lx.peek_at(2), Some('"') | Some('\''))
        }
        _ => false,
    }
}

/// Resolve escape sequences for non-raw strings; raw strings are verbatim.
fn decode(inner: &str, raw: bool) -> String {
    if raw {
        return inner.to_string();
    }
    let mut out = String::with_capacity(inner.len());
    let mut chars = inner.chars().peekable();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            None => out.push('\\'),
            Some('n') => out.push('\n'),
            Some('t') => out.push('\t'),
            Some('r') => out.push('\r'),
            Some('\\') => out.push('\\'),
            Some('\'') => out.push('\''),
            Some('"') => out.push('"'),
            Some('a') => out.push('\x07'),
            Some('b') => out.push('\x08'),
            Some('f') => out.push('\x0c'),
            Some('v') => out.push('\x0b'),
            Some('0') => out.push('\0'),
            Some('\n') => {} // escaped newline disappears
            Some('x') => {
                let hi = chars.next();
                let lo = chars.next();
                match (hi, lo) {
                    (Some(h), Some(l)) => {
                        match u8::from_str_radix(&format!("{h}{l}"), 16) {
                            Ok(byte) => out.push(byte as char),
                            Err(_) => {
                                out.push_str("\\x");
                                out.push(h);
                                out.push(l);
                            }
                        }
                    }
                    _ => out.push_str("\\x"),
                }
            }
            // Python keeps unrecognized escapes verbatim.
            Some(other) => {
                out.push('\\');
                out.push(other);
            }
        }
    }
    out
}

/// A logical line: a token range plus the line's indentation.
#[derive(Debug, Clone)]
pub struct LogicalLine {
    /// Index range into the token vector (Newline excluded).
    pub toks: std::ops::Range<usize>,
    /// Column of the first token, tabs expanded.
    pub indent: u32,
    /// 1-based physical line of the first token.
    pub first_line: u32,
    /// 1-based physical line of the last token.
    pub last_line: u32,
}

/// Group a token stream into logical lines.
pub fn logical_lines(toks: &[Tok]) -> Vec<LogicalLine> {
    let mut lines = Vec::new();
    let mut start = 0usize;
    for (i, t) in toks.iter().enumerate() {
        if t.kind == TokKind::Newline {
            if i > start {
                lines.push(LogicalLine {
                    toks: start..i,
                    indent: toks[start].col,
                    first_line: toks[start].line,
                    last_line: toks[i - 1].line,
                });
            }
            start = i + 1;
        }
    }
    if start < toks.len() {
        lines.push(LogicalLine {
            toks: start..toks.len(),
            indent: toks[start].col,
            first_line: toks[start].line,
            last_line: toks[toks.len() - 1].line,
        });
    }
    lines
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokKind> {
        tokenize(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn names_numbers_ops() {
        let ks = kinds("x = 1 + 2.5");
        assert_eq!(
            ks,
            vec![
                TokKind::Name("x".into()),
                TokKind::Op("="),
                TokKind::Number,
                TokKind::Op("+"),
                TokKind::Number,
                TokKind::Newline,
            ]
        );
    }

    #[test]
    fn multichar_operators_longest_match() {
        let ks = kinds("a **= b // c -> d := e");
        let ops: Vec<&str> = ks
            .iter()
            .filter_map(|k| match k {
                TokKind::Op(o) => Some(*o),
                _ => None,
            })
            .collect();
        assert_eq!(ops, vec!["**=", "//", "->", ":="]);
    }

    #[test]
    fn comments_and_blank_lines_vanish() {
        let toks = tokenize("# top\n\nx = 1  # trailing\n\n# done\n").unwrap();
        assert_eq!(toks.len(), 4); // x = 1 NEWLINE
    }

    #[test]
    fn string_values_decoded() {
        let ks = kinds(r#"s = 'a\nb'"#);
        assert!(matches!(&ks[2], TokKind::Str { value } if value == "a\nb"));
        let ks = kinds(r#"s = r'a\nb'"#);
        assert!(matches!(&ks[2], TokKind::Str { value } if value == "a\\nb"));
        let ks = kinds("s = \"it's\"");
        assert!(matches!(&ks[2], TokKind::Str { value } if value == "it's"));
    }

    #[test]
    fn triple_quoted_spans_lines() {
        let src = "s = \"\"\"one\ntwo\"\"\"\ny = 2\n";
        let toks = tokenize(src).unwrap();
        assert!(matches!(&toks[2].kind, TokKind::Str { value } if value == "one\ntwo"));
        // the docstring line ends, then y = 2 follows
        assert_eq!(toks[3].kind, TokKind::Newline);
        assert_eq!(toks[4].kind.as_name(), Some("y"));
    }

    #[test]
    fn string_prefixes() {
        for src in ["b'x'", "rb'x'", "BR'x'", "f'x'", "u'x'", "Rf'x'"] {
            let toks = tokenize(src).unwrap();
            assert!(
                matches!(&toks[0].kind, TokKind::Str { .. }),
                "prefix failed for {src}"
            );
        }
    }

    #[test]
    fn hash_inside_string_is_not_comment() {
        let ks = kinds("s = 'a#b'\ny = 1");
        assert!(matches!(&ks[2], TokKind::Str { value } if value == "a#b"));
        assert_eq!(ks.len(), 8);
    }

    #[test]
    fn brackets_suppress_newline() {
        let toks = tokenize("f(a,\n  b)\ng()").unwrap();
        let newlines = toks
            .iter()
            .filter(|t| t.kind == TokKind::Newline)
            .count();
        assert_eq!(newlines, 2);
        let lines = logical_lines(&toks);
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].first_line, 1);
        assert_eq!(lines[0].last_line, 2);
    }

    #[test]
    fn backslash_continuation() {
        let toks = tokenize("x = 1 + \\\n    2\n").unwrap();
        let lines = logical_lines(&toks);
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0].last_line, 2);
    }

    #[test]
    fn tab_indentation_expands() {
        let toks = tokenize("if x:\n\treturn 1\n").unwrap();
        let lines = logical_lines(&toks);
        assert_eq!(lines[1].indent, 8);
    }

    #[test]
    fn unterminated_string_is_error() {
        let err = tokenize("s = 'abc\n").unwrap_err();
        assert!(err.msg.contains("string"));
        assert_eq!(err.line, 1);
    }

    #[test]
    fn unterminated_triple_is_error() {
        assert!(tokenize("s = '''abc\ndef x():\n").is_err());
    }

    #[test]
    fn unclosed_bracket_is_error() {
        let err = tokenize("f(a, b\n").unwrap_err();
        assert!(err.msg.contains("brackets"));
    }

    #[test]
    fn unmatched_close_is_error() {
        assert!(tokenize("x = a)\n").is_err());
    }

    #[test]
    fn spans_slice_verbatim_source() {
        let src = "x = [1,  2]";
        let toks = tokenize(src).unwrap();
        let open = toks.iter().position(|t| t.kind.is_op("[")).unwrap();
        let close = toks.iter().position(|t| t.kind.is_op("]")).unwrap();
        assert_eq!(&src[toks[open].start..toks[close].end], "[1,  2]");
    }

    #[test]
    fn ellipsis_token() {
        let ks = kinds("def f(x=...): ...");
        assert!(ks.contains(&TokKind::Op("...")));
    }

    #[test]
    fn empty_short_string() {
        let ks = kinds("s = ''");
        assert!(matches!(&ks[2], TokKind::Str { value } if value.is_empty()));
    }

    #[test]
    fn escaped_quote_inside_string() {
        let ks = kinds(r#"s = 'don\'t'"#);
        assert!(matches!(&ks[2], TokKind::Str { value } if value == "don't"));
    }
}
