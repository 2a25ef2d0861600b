use crate::ast::Span;

use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(u128),
    Kw(&'static str),
    Sym(&'static str),
    Eof,
}

pub const KEYWORDS: &[&str] = &[
    "node", "returns", "var", "let", "tel", "and", "or", "not", "div", "mod", "fby", "when", "merge", "if",
    "then", "else", "true", "false", "bool", "int", "base", "on",
];

// Longest symbols first so that `<=` wins over `<`.
const SYMBOLS: &[&str] =
    &["::", "<>", "<=", ">=", "(", ")", ",", ";", ":", "=", "<", ">", "+", "-", "*", "/"];

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, c: char| {
        *i += 1;
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, c);
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                {
                    let ch = chars[i];
                    advance(&mut i, &mut line, &mut col, ch);
                }
            }
            continue;
        }
        if c == '(' && chars.get(i + 1) == Some(&'*') {
            let start = Span::new(line, col, col + 2);
            advance(&mut i, &mut line, &mut col, '(');
            advance(&mut i, &mut line, &mut col, '*');
            loop {
                if i >= chars.len() {
                    return Err(ParseError::new(start, "unterminated comment"));
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&')') {
                    advance(&mut i, &mut line, &mut col, '*');
                    advance(&mut i, &mut line, &mut col, ')');
                    break;
                }
                {
                    let ch = chars[i];
                    advance(&mut i, &mut line, &mut col, ch);
                }
            }
            continue;
        }
        let start_col = col;
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                s.push(chars[i]);
                {
                    let ch = chars[i];
                    advance(&mut i, &mut line, &mut col, ch);
                }
            }
            let tok = match KEYWORDS.iter().find(|k| **k == s) {
                Some(k) => Tok::Kw(k),
                None => Tok::Ident(s),
            };
            out.push(Token { tok, span: Span::new(line, start_col, col) });
            continue;
        }
        if c.is_ascii_digit() {
            let mut n: u128 = 0;
            while i < chars.len() && chars[i].is_ascii_digit() {
                n = n
                    .checked_mul(10)
                    .and_then(|n| n.checked_add(chars[i].to_digit(10).unwrap() as u128))
                    .ok_or_else(|| {
                        ParseError::new(Span::new(line, start_col, col), "integer literal too large")
                    })?;
                {
                    let ch = chars[i];
                    advance(&mut i, &mut line, &mut col, ch);
                }
            }
            if i < chars.len() && (chars[i].is_ascii_alphabetic() || chars[i] == '_') {
                return Err(ParseError::new(Span::new(line, start_col, col + 1), "malformed number"));
            }
            out.push(Token { tok: Tok::Int(n), span: Span::new(line, start_col, col) });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(s) => {
                for ch in s.chars() {
                    advance(&mut i, &mut line, &mut col, ch);
                }
                out.push(Token { tok: Tok::Sym(s), span: Span::new(line, start_col, col) });
            }
            None => {
                return Err(ParseError::new(
                    Span::new(line, col, col + 1),
                    format!("unexpected character {:?}", c),
                ))
            }
        }
    }
    out.push(Token { tok: Tok::Eof, span: Span::new(line, col, col) });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn comments_are_skipped() {
        assert_eq!(
            toks("x -- note\n(* block\n *) y"),
            vec![Tok::Ident("x".into()), Tok::Ident("y".into()), Tok::Eof]
        );
    }

    #[test]
    fn two_char_symbols_win() {
        assert_eq!(
            toks("a<=b::c"),
            vec![
                Tok::Ident("a".into()),
                Tok::Sym("<="),
                Tok::Ident("b".into()),
                Tok::Sym("::"),
                Tok::Ident("c".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn spans_track_lines() {
        let ts = tokenize("a\r\n  bc").unwrap();
        assert_eq!((ts[1].span.line, ts[1].span.col_start, ts[1].span.col_end), (2, 3, 5));
    }

    #[test]
    fn bad_character_is_reported() {
        let e = tokenize("a $ b").unwrap_err();
        assert_eq!((e.span.line, e.span.col_start), (1, 3));
    }
}
