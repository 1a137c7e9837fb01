//! Tokenizer for `.scc` sources.

use std::fmt;
use std::sync::Arc;

use crate::model::SourceSpan;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenKind {
    /// A run of `[A-Za-z0-9_]`. Keywords are words too; the parser decides.
    Word(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Dot,
    Unknown(char),
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Word(w) => write!(f, "`{w}`"),
            TokenKind::LBrace => f.write_str("`{`"),
            TokenKind::RBrace => f.write_str("`}`"),
            TokenKind::LParen => f.write_str("`(`"),
            TokenKind::RParen => f.write_str("`)`"),
            TokenKind::LBracket => f.write_str("`[`"),
            TokenKind::RBracket => f.write_str("`]`"),
            TokenKind::Semi => f.write_str("`;`"),
            TokenKind::Comma => f.write_str("`,`"),
            TokenKind::Dot => f.write_str("`.`"),
            TokenKind::Unknown(c) => write!(f, "`{}`", c.escape_debug()),
            TokenKind::Eof => f.write_str("end of file"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
}

/// Splits `text` into tokens. Never fails: unexpected characters become
/// [`TokenKind::Unknown`]. The last token is always [`TokenKind::Eof`].
pub fn tokenize(text: &str, file: &Arc<str>) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1u32, 1u32);

    while let Some(&c) = chars.peek() {
        let start = (line, col);
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            col += 1;
            continue;
        }
        if c == '/' {
            chars.next();
            col += 1;
            if chars.peek() == Some(&'/') {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
                continue;
            }
            tokens.push(Token {
                kind: TokenKind::Unknown('/'),
                span: SourceSpan::new(file.clone(), start, (line, col)),
            });
            continue;
        }
        if c.is_ascii_alphanumeric() || c == '_' {
            let mut word = String::new();
            while let Some(&c) = chars.peek() {
                if !(c.is_ascii_alphanumeric() || c == '_') {
                    break;
                }
                word.push(c);
                chars.next();
                col += 1;
            }
            tokens.push(Token {
                kind: TokenKind::Word(word),
                span: SourceSpan::new(file.clone(), start, (line, col)),
            });
            continue;
        }
        chars.next();
        col += 1;
        let kind = match c {
            '{' => TokenKind::LBrace,
            '}' => TokenKind::RBrace,
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            '[' => TokenKind::LBracket,
            ']' => TokenKind::RBracket,
            ';' => TokenKind::Semi,
            ',' => TokenKind::Comma,
            '.' => TokenKind::Dot,
            other => TokenKind::Unknown(other),
        };
        tokens.push(Token {
            kind,
            span: SourceSpan::new(file.clone(), start, (line, col)),
        });
    }

    tokens.push(Token {
        kind: TokenKind::Eof,
        span: SourceSpan::new(file.clone(), (line, col), (line, col)),
    });
    tokens
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<TokenKind> {
        tokenize(text, &Arc::from("t.scc"))
            .into_iter()
            .map(|t| t.kind)
            .collect()
    }

    #[test]
    fn words_and_punctuation() {
        assert_eq!(
            kinds("source ranges as Float[];"),
            vec![
                TokenKind::Word("source".into()),
                TokenKind::Word("ranges".into()),
                TokenKind::Word("as".into()),
                TokenKind::Word("Float".into()),
                TokenKind::LBracket,
                TokenKind::RBracket,
                TokenKind::Semi,
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn comments_are_skipped() {
        assert_eq!(
            kinds("// hello\nentity // trailing\n"),
            vec![TokenKind::Word("entity".into()), TokenKind::Eof]
        );
    }

    #[test]
    fn positions_are_one_based() {
        let toks = tokenize("a\n  bc", &Arc::from("f"));
        assert_eq!(toks[0].span.start(), (1, 1));
        assert_eq!(toks[1].span.start(), (2, 3));
        assert_eq!((toks[1].span.end_line, toks[1].span.end_col), (2, 5));
    }

    #[test]
    fn stray_characters() {
        assert_eq!(
            kinds("a / é"),
            vec![
                TokenKind::Word("a".into()),
                TokenKind::Unknown('/'),
                TokenKind::Unknown('é'),
                TokenKind::Eof
            ]
        );
    }
}
