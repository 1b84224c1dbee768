use super::ParseError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TokenKind {
    Number(f64),
    Identifier,
    Operator(char),
    LParen,
    RParen,
    Comma,
}

/// A lexeme borrowed from the source string.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Token<'a> {
    pub kind: TokenKind,
    pub text: &'a str,
    /// Byte offset of the first character.
    pub position: usize,
}

/// Splits `source` into tokens, skipping whitespace.
///
/// Numbers may be written as integers, decimals (`1.5`, `.5`, `2.`) or in
/// scientific form (`1e-3`, `2.5E+4`).
pub fn tokenize(source: &str) -> Result<Vec<Token<'_>>, ParseError> {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let kind = match c {
            b'0'..=b'9' | b'.' => {
                i = scan_number(bytes, i).ok_or(ParseError::InvalidCharacter { position: start })?;
                let text = &source[start..i];
                let value: f64 = text.parse().map_err(|_| ParseError::InvalidCharacter { position: start })?;
                tokens.push(Token { kind: TokenKind::Number(value), text, position: start });
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                tokens.push(Token { kind: TokenKind::Identifier, text: &source[start..i], position: start });
                continue;
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => TokenKind::Operator(c as char),
            b'(' => TokenKind::LParen,
            b')' => TokenKind::RParen,
            b',' => TokenKind::Comma,
            _ => return Err(ParseError::InvalidCharacter { position: start }),
        };
        i += 1;
        tokens.push(Token { kind, text: &source[start..i], position: start });
    }
    Ok(tokens)
}

/// Returns the end offset of the number starting at `i`, or `None` when the
/// lexeme has no digits at all (a lone `.`).
fn scan_number(bytes: &[u8], mut i: usize) -> Option<usize> {
    let mut digits = 0;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
        digits += 1;
    }
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
            digits += 1;
        }
    }
    if digits == 0 {
        return None;
    }
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
            j += 1;
        }
        let exp_start = j;
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        // "2e" followed by a non-digit is left for the parser to reject as
        // number-then-identifier.
        if j > exp_start {
            i = j;
        }
    }
    Some(i)
}
