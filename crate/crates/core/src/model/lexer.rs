use super::{DiagCode, Diagnostic, Pos};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(i64),
    Sym(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

// Longest first so that `->` wins over `-` and `<=` over `<`.
const SYMBOLS: &[&str] = &[
    "->", "==", "!=", "<=", ">=", "&&", "||", "{", "}", "(", ")", "[", "]", ";", ",", "=", "<",
    ">", "+", "-", "*", "/", "%", "!", "?", ".",
];

pub(crate) fn lex(text: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    while i < bytes.len() {
        let c = bytes[i];
        let pos = Pos { line, col };
        if c == b'\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if text[i..].starts_with("//") {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            col += i - start;
            out.push(Token {
                tok: Tok::Ident(text[start..i].to_string()),
                pos,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            col += i - start;
            let value = text[start..i].parse::<i64>().map_err(|_| {
                Diagnostic::new(DiagCode::Syntax, pos, format!("integer literal `{}` too large", &text[start..i]))
            })?;
            out.push(Token { tok: Tok::Int(value), pos });
            continue;
        }
        match SYMBOLS.iter().find(|s| text[i..].starts_with(**s)) {
            Some(sym) => {
                i += sym.len();
                col += sym.len();
                out.push(Token { tok: Tok::Sym(sym), pos });
            }
            None => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(Diagnostic::new(
                    DiagCode::Syntax,
                    pos,
                    format!("unexpected character `{ch}`"),
                ));
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, col },
    });
    Ok(out)
}

/// Replaces every identifier token named in `consts` by its integer value.
pub(crate) fn substitute(tokens: &mut [Token], consts: &[(String, i64)]) {
    for t in tokens {
        if let Tok::Ident(name) = &t.tok {
            if let Some((_, v)) = consts.iter().find(|(n, _)| n == name) {
                t.tok = Tok::Int(*v);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn symbols_and_positions() {
        let ts = lex("trans a -> b {\n  guard x<=3; // c\n}").unwrap();
        assert_eq!(ts[2].tok, Tok::Sym("->"));
        assert_eq!(ts[5].tok, Tok::Ident("guard".into()));
        assert_eq!((ts[5].pos.line, ts[5].pos.col), (2, 3));
        assert_eq!(ts[7].tok, Tok::Sym("<="));
        assert_eq!(ts.last().unwrap().tok, Tok::Eof);
    }

    #[test]
    fn rejects_stray_characters() {
        let e = lex("byte x = 1;\n  @").unwrap_err();
        assert_eq!((e.code, e.pos.line, e.pos.col), (DiagCode::Syntax, 2, 3));
    }

    #[test]
    fn const_substitution() {
        let mut ts = lex("x < N").unwrap();
        substitute(&mut ts, &[("N".into(), 4)]);
        assert_eq!(ts[2].tok, Tok::Int(4));
        assert_eq!(toks("a-1"), vec![Tok::Ident("a".into()), Tok::Sym("-"), Tok::Int(1), Tok::Eof]);
    }
}
