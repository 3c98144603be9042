//! A lexer for JavaScript that is precise enough for operator/operand
//! classification. Strings, templates, regular expressions and comments each
//! come out as one token; whitespace is kept alongside so the source can be
//! rebuilt byte for byte.

use super::table::{is_keyword_operator, CLOSERS, PUNCTUATORS};
use super::LexError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Operator,
    Operand,
    Comment,
    StringLiteral,
    NumericLiteral,
    TemplateLiteral,
    RegexLiteral,
    /// Closing brackets and the `:` of a conditional. Present in the stream
    /// but never counted.
    PunctuationNoise,
}

impl TokenKind {
    pub fn is_operand(self) -> bool {
        matches!(
            self,
            TokenKind::Operand
                | TokenKind::StringLiteral
                | TokenKind::NumericLiteral
                | TokenKind::TemplateLiteral
                | TokenKind::RegexLiteral
        )
    }

    pub fn is_operator(self) -> bool {
        self == TokenKind::Operator
    }

    pub fn is_code(self) -> bool {
        self != TokenKind::Comment
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// 1-based line of the first character.
    pub line: usize,
}

impl Token {
    /// Line of the last character of the token.
    pub fn end_line(&self) -> usize {
        self.line + self.text.matches('\n').count()
    }
}

/// Tokens plus the whitespace between them.
///
/// `whitespace[i]` precedes `tokens[i]`; the final entry is trailing
/// whitespace, so `whitespace.len() == tokens.len() + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenStream {
    pub tokens: Vec<Token>,
    pub whitespace: Vec<String>,
}

impl TokenStream {
    pub fn reconstruct(&self) -> String {
        let mut out = String::new();
        for (ws, tok) in self.whitespace.iter().zip(&self.tokens) {
            out.push_str(ws);
            out.push_str(&tok.text);
        }
        if let Some(tail) = self.whitespace.last() {
            out.push_str(tail);
        }
        out
    }

    pub fn code_tokens(&self) -> impl Iterator<Item = &Token> {
        self.tokens.iter().filter(|t| t.kind.is_code())
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Strict tokenization: unterminated strings, templates and block comments
/// are errors.
pub fn tokenize(source: &str) -> Result<TokenStream, LexError> {
    let mut lexer = Lexer::new(source);
    lexer.run()?;
    Ok(lexer.finish())
}

/// Best-effort tokenization. On a lexical error the valid prefix is
/// returned together with the error; the unlexable remainder is dropped.
pub fn tokenize_lenient(source: &str) -> (TokenStream, Option<LexError>) {
    let mut lexer = Lexer::new(source);
    let err = lexer.run().err();
    (lexer.finish(), err)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Prev {
    Start,
    /// Identifier, literal or closing `)`/`]`: a following `/` divides.
    Value,
    /// `}`: ambiguous, treated as a statement boundary.
    Brace,
    /// Any operator or keyword: a following `/` opens a regex.
    Operator,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    tokens: Vec<Token>,
    whitespace: Vec<String>,
    pending_ws: String,
    prev: Prev,
    prev_text: String,
    depth: usize,
    ternaries: Vec<usize>,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src,
            pos: 0,
            line: 1,
            tokens: Vec::new(),
            whitespace: Vec::new(),
            pending_ws: String::new(),
            prev: Prev::Start,
            prev_text: String::new(),
            depth: 0,
            ternaries: Vec::new(),
        }
    }

    fn finish(mut self) -> TokenStream {
        let tail = std::mem::take(&mut self.pending_ws);
        self.whitespace.push(tail);
        TokenStream {
            tokens: self.tokens,
            whitespace: self.whitespace,
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.rest().chars().nth(n)
    }

    fn run(&mut self) -> Result<(), LexError> {
        if self.rest().starts_with("#!") {
            let end = self.line_end(self.pos);
            self.emit(TokenKind::Comment, end);
        }
        while let Some(c) = self.peek() {
            if c.is_whitespace() || c == '\u{feff}' {
                let len = c.len_utf8();
                self.pending_ws.push(c);
                if c == '\n' {
                    self.line += 1;
                }
                self.pos += len;
                continue;
            }
            self.lex_token(c)?;
        }
        Ok(())
    }

    fn lex_token(&mut self, c: char) -> Result<(), LexError> {
        let rest = self.rest();
        if rest.starts_with("//") || rest.starts_with("<!--") {
            let end = self.line_end(self.pos);
            self.emit(TokenKind::Comment, end);
            return Ok(());
        }
        if let Some(body) = rest.strip_prefix("/*") {
            return match body.find("*/") {
                Some(i) => {
                    let end = self.pos + 2 + i + 2;
                    self.emit(TokenKind::Comment, end);
                    Ok(())
                }
                None => Err(LexError::UnterminatedComment { line: self.line }),
            };
        }
        if c == '"' || c == '\'' {
            let end = self.scan_string(self.pos, c)?;
            self.emit_value(TokenKind::StringLiteral, end);
            return Ok(());
        }
        if c == '`' {
            let end = self.scan_template(self.pos)?;
            self.emit_value(TokenKind::TemplateLiteral, end);
            return Ok(());
        }
        if c.is_ascii_digit() || (c == '.' && self.peek_at(1).is_some_and(|d| d.is_ascii_digit())) {
            let end = self.scan_number();
            self.emit_value(TokenKind::NumericLiteral, end);
            return Ok(());
        }
        if is_ident_start(c) || (c == '#' && self.peek_at(1).is_some_and(is_ident_start)) {
            self.lex_word();
            return Ok(());
        }
        if c == '/' && self.prev != Prev::Value {
            if let Some(end) = self.scan_regex() {
                self.emit_value(TokenKind::RegexLiteral, end);
                return Ok(());
            }
        }
        if let Some(p) = PUNCTUATORS.iter().find(|p| rest.starts_with(**p)) {
            let p = if *p == "?." && rest[2..].starts_with(|d: char| d.is_ascii_digit()) {
                "?"
            } else {
                *p
            };
            self.lex_punctuator(p);
            return Ok(());
        }
        // Stray character: keep it so reconstruction stays exact.
        let end = self.pos + c.len_utf8();
        self.emit(TokenKind::PunctuationNoise, end);
        Ok(())
    }

    fn lex_word(&mut self) {
        let start = self.pos;
        let mut end = start;
        for (i, ch) in self.src[start..].char_indices() {
            let ok = if i == 0 {
                ch == '#' || is_ident_start(ch)
            } else {
                is_ident_part(ch)
            };
            if !ok {
                break;
            }
            end = start + i + ch.len_utf8();
        }
        // `\uXXXX` escapes inside identifiers
        while self.src[end..].starts_with("\\u") {
            let esc_end = (end + 6).min(self.src.len());
            end = esc_end;
            while let Some(ch) = self.src[end..].chars().next() {
                if !is_ident_part(ch) {
                    break;
                }
                end += ch.len_utf8();
            }
        }
        let word = &self.src[start..end];
        let after_dot = self.prev_text == "." || self.prev_text == "?.";
        if !after_dot && is_keyword_operator(word) {
            self.emit(TokenKind::Operator, end);
            self.prev = Prev::Operator;
        } else {
            self.emit_value(TokenKind::Operand, end);
        }
    }

    fn lex_punctuator(&mut self, p: &str) {
        let end = self.pos + p.len();
        match p {
            "(" | "[" | "{" => {
                self.depth += 1;
                self.emit(TokenKind::Operator, end);
                self.prev = Prev::Operator;
            }
            _ if CLOSERS.contains(&p) => {
                self.depth = self.depth.saturating_sub(1);
                while self.ternaries.last().is_some_and(|d| *d > self.depth) {
                    self.ternaries.pop();
                }
                self.emit(TokenKind::PunctuationNoise, end);
                self.prev = if p == "}" { Prev::Brace } else { Prev::Value };
            }
            "?" => {
                self.ternaries.push(self.depth);
                self.emit(TokenKind::Operator, end);
                self.prev = Prev::Operator;
            }
            ":" if self.ternaries.last() == Some(&self.depth) => {
                self.ternaries.pop();
                self.emit(TokenKind::PunctuationNoise, end);
                self.prev = Prev::Operator;
            }
            "++" | "--" => {
                self.emit(TokenKind::Operator, end);
                // postfix `a++ / 2` is far more common than prefix before a regex
                if self.prev != Prev::Value {
                    self.prev = Prev::Operator;
                }
            }
            _ => {
                self.emit(TokenKind::Operator, end);
                self.prev = Prev::Operator;
            }
        }
    }

    fn emit_value(&mut self, kind: TokenKind, end: usize) {
        self.emit(kind, end);
        self.prev = Prev::Value;
    }

    fn emit(&mut self, kind: TokenKind, end: usize) {
        let text = &self.src[self.pos..end];
        self.whitespace.push(std::mem::take(&mut self.pending_ws));
        self.tokens.push(Token {
            kind,
            text: text.to_string(),
            line: self.line,
        });
        if kind != TokenKind::Comment {
            self.prev_text.clear();
            self.prev_text.push_str(text);
        }
        self.line += text.matches('\n').count();
        self.pos = end;
    }

    fn line_end(&self, from: usize) -> usize {
        self.src[from..]
            .find(['\n', '\r'])
            .map(|i| from + i)
            .unwrap_or(self.src.len())
    }

    fn scan_string(&self, start: usize, quote: char) -> Result<usize, LexError> {
        let line = self.line;
        let mut chars = self.src[start + 1..].char_indices();
        while let Some((i, ch)) = chars.next() {
            match ch {
                '\\' => {
                    if let Some((_, '\r')) = chars.next() {
                        let mut look = chars.clone();
                        if let Some((_, '\n')) = look.next() {
                            chars = look;
                        }
                    }
                }
                '\n' | '\r' => return Err(LexError::UnterminatedString { line }),
                c if c == quote => return Ok(start + 1 + i + 1),
                _ => {}
            }
        }
        Err(LexError::UnterminatedString { line })
    }

    /// Scans from an opening backtick to its matching close, descending into
    /// `${ ... }` substitutions.
    fn scan_template(&self, start: usize) -> Result<usize, LexError> {
        let line = self.line + self.src[self.pos..start].matches('\n').count();
        let bytes = self.src.as_bytes();
        let mut i = start + 1;
        while i < bytes.len() {
            match bytes[i] {
                b'\\' => i += 2,
                b'`' => return Ok(i + 1),
                b'$' if bytes.get(i + 1) == Some(&b'{') => {
                    i = self.scan_substitution(i + 2, line)?;
                }
                _ => i += 1,
            }
        }
        Err(LexError::UnterminatedTemplate { line })
    }

    /// Returns the index just past the `}` closing a template substitution.
    fn scan_substitution(&self, mut i: usize, line: usize) -> Result<usize, LexError> {
        let bytes = self.src.as_bytes();
        let mut depth = 1usize;
        while i < bytes.len() {
            match bytes[i] {
                b'{' => {
                    depth += 1;
                    i += 1;
                }
                b'}' => {
                    depth -= 1;
                    i += 1;
                    if depth == 0 {
                        return Ok(i);
                    }
                }
                b'"' | b'\'' => {
                    let q = bytes[i] as char;
                    i = self
                        .scan_string(i, q)
                        .map_err(|_| LexError::UnterminatedTemplate { line })?;
                }
                b'`' => i = self.scan_template(i)?,
                b'/' if bytes.get(i + 1) == Some(&b'/') => {
                    i = self.line_end(i);
                }
                b'/' if bytes.get(i + 1) == Some(&b'*') => match self.src[i + 2..].find("*/") {
                    Some(k) => i = i + 2 + k + 2,
                    None => return Err(LexError::UnterminatedTemplate { line }),
                },
                _ => i += 1,
            }
        }
        Err(LexError::UnterminatedTemplate { line })
    }

    fn scan_number(&self) -> usize {
        let bytes = self.src.as_bytes();
        let mut i = self.pos;
        let radix_prefix = bytes[i] == b'0'
            && bytes
                .get(i + 1)
                .is_some_and(|b| matches!(b, b'x' | b'X' | b'o' | b'O' | b'b' | b'B'));
        if radix_prefix {
            i += 2;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            return i;
        }
        let digits = |mut i: usize| {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'_') {
                i += 1;
            }
            i
        };
        i = digits(i);
        if bytes.get(i) == Some(&b'.') {
            i = digits(i + 1);
        }
        if matches!(bytes.get(i), Some(b'e' | b'E')) {
            let mut j = i + 1;
            if matches!(bytes.get(j), Some(b'+' | b'-')) {
                j += 1;
            }
            if bytes.get(j).is_some_and(|b| b.is_ascii_digit()) {
                i = digits(j);
            }
        }
        // BigInt suffix and any trailing identifier garbage stay in the literal
        while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
            i += 1;
        }
        i
    }

    /// Attempts a regex literal at the current `/`. Returns `None` when the
    /// line ends first, in which case the slash is a division operator.
    fn scan_regex(&self) -> Option<usize> {
        let bytes = self.src.as_bytes();
        let mut i = self.pos + 1;
        if matches!(bytes.get(i), Some(b'/' | b'*') | None) {
            return None;
        }
        let mut in_class = false;
        loop {
            match *bytes.get(i)? {
                b'\n' | b'\r' => return None,
                b'\\' => {
                    if matches!(bytes.get(i + 1), Some(b'\n' | b'\r') | None) {
                        return None;
                    }
                    i += 2;
                    continue;
                }
                b'[' => in_class = true,
                b']' => in_class = false,
                b'/' if !in_class => {
                    i += 1;
                    break;
                }
                _ => {}
            }
            i += 1;
        }
        while let Some(ch) = self.src[i..].chars().next() {
            if !is_ident_part(ch) {
                break;
            }
            i += ch.len_utf8();
        }
        Some(i)
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == '$' || c == '\\'
}

fn is_ident_part(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$' || c == '\u{200c}' || c == '\u{200d}'
}
