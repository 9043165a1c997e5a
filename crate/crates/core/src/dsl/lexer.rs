use super::{Diagnostic, Position};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum TokenKind {
    Name { text: String, quoted: bool },
    Int(u64),
    Punct(char),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Token {
    pub kind: TokenKind,
    pub pos: Position,
}

impl Token {
    pub fn is_punct(&self, c: char) -> bool {
        self.kind == TokenKind::Punct(c)
    }

    /// An unquoted name equal to `word`.
    pub fn is_keyword(&self, word: &str) -> bool {
        matches!(&self.kind, TokenKind::Name { text, quoted: false } if text == word)
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            TokenKind::Name { text, quoted: true } => format!("\"{text}\""),
            TokenKind::Name { text, .. } => format!("`{text}`"),
            TokenKind::Int(n) => format!("`{n}`"),
            TokenKind::Punct(c) => format!("`{c}`"),
        }
    }
}

const PUNCT: &[char] = &['{', '}', '(', ')', ',', '=', '.', '!', '#'];

fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

/// Whether `s` can be written without quotes.
pub(crate) fn is_bare_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if is_name_start(c)) && chars.all(is_name_char)
}

pub(crate) fn lex(text: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut tokens = Vec::new();
    let mut diagnostics = Vec::new();
    let mut chars = text.chars().peekable();
    let mut line = 1;
    let mut column = 1;

    macro_rules! bump {
        () => {{
            let c = chars.next();
            match c {
                Some('\n') => {
                    line += 1;
                    column = 1;
                }
                Some(_) => column += 1,
                None => {}
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let pos = Position { line, column };
        if c.is_whitespace() {
            bump!();
        } else if c == '/' {
            bump!();
            if chars.peek() == Some(&'/') {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    bump!();
                }
            } else {
                diagnostics.push(Diagnostic::error(pos, "unexpected character `/`"));
            }
        } else if c == '"' {
            bump!();
            let mut value = String::new();
            let mut closed = false;
            while let Some(c) = bump!() {
                match c {
                    '"' => {
                        closed = true;
                        break;
                    }
                    '\\' => match bump!() {
                        Some(e @ ('"' | '\\')) => value.push(e),
                        Some('n') => value.push('\n'),
                        Some(other) => {
                            value.push(other);
                            diagnostics.push(Diagnostic::warning(pos, format!("unknown escape `\\{other}`")));
                        }
                        None => break,
                    },
                    '\n' => break,
                    c => value.push(c),
                }
            }
            if closed {
                tokens.push(Token { kind: TokenKind::Name { text: value, quoted: true }, pos });
            } else {
                diagnostics.push(Diagnostic::error(pos, "unterminated string"));
            }
        } else if c.is_ascii_digit() {
            let mut digits = String::new();
            while chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                digits.push(bump!().unwrap());
            }
            match digits.parse() {
                Ok(n) => tokens.push(Token { kind: TokenKind::Int(n), pos }),
                Err(_) => diagnostics.push(Diagnostic::error(pos, "integer out of range")),
            }
        } else if is_name_start(c) {
            let mut text = String::new();
            while chars.peek().is_some_and(|&c| is_name_char(c)) {
                text.push(bump!().unwrap());
            }
            tokens.push(Token { kind: TokenKind::Name { text, quoted: false }, pos });
        } else if PUNCT.contains(&c) {
            bump!();
            tokens.push(Token { kind: TokenKind::Punct(c), pos });
        } else {
            bump!();
            diagnostics.push(Diagnostic::error(pos, format!("unexpected character `{c}`")));
        }
    }
    (tokens, diagnostics)
}

/// Writes a name, quoting it when it is not a bare name or collides with a
/// reserved word.
pub(crate) fn write_name(out: &mut String, name: &str, reserved: &[&str]) {
    if is_bare_name(name) && !reserved.contains(&name) {
        out.push_str(name);
    } else {
        out.push('"');
        for c in name.chars() {
            match c {
                '"' => out.push_str("\\\""),
                '\\' => out.push_str("\\\\"),
                '\n' => out.push_str("\\n"),
                c => out.push(c),
            }
        }
        out.push('"');
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_are_one_based() {
        let (tokens, diags) = lex("process X {\n  activity \"Work on revision\" // note\n}");
        assert!(diags.is_empty());
        assert_eq!(tokens[0].pos, Position { line: 1, column: 1 });
        assert_eq!(tokens[3].pos, Position { line: 2, column: 3 });
        assert_eq!(
            tokens[4].kind,
            TokenKind::Name { text: "Work on revision".into(), quoted: true }
        );
        assert_eq!(tokens[5].pos, Position { line: 3, column: 1 });
    }

    #[test]
    fn errors_carry_positions() {
        let (_, diags) = lex("a $ \"open");
        assert_eq!(diags.len(), 2);
        assert_eq!(diags[0].position, Position { line: 1, column: 3 });
        assert_eq!(diags[1].position, Position { line: 1, column: 5 });
    }

    #[test]
    fn quoting() {
        let mut s = String::new();
        write_name(&mut s, "Get acceptance", &[]);
        write_name(&mut s, "A", &[]);
        write_name(&mut s, "process", &["process"]);
        assert_eq!(s, "\"Get acceptance\"A\"process\"");
    }
}
