// Source-level mutations used by the fingerprint tests: consistent
// variable renaming, whitespace/comment reformatting, and single-literal
// changes. Works on raw text with a small scanner, independent of the
// crate's lexer.

use rand::Rng;

const KEYWORDS: &[&str] = &[
    "let", "if", "else", "while", "for", "in", "break", "continue", "return", "true", "false",
];

#[derive(Debug, Clone, PartialEq)]
enum Piece {
    Word(String),
    Number(String),
    Comment(String),
    Space(String),
    Other(char),
}

fn scan(src: &str) -> Vec<Piece> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            out.push(Piece::Comment(chars[start..i].iter().collect()));
        } else if c.is_whitespace() {
            while i < chars.len() && chars[i].is_whitespace() {
                i += 1;
            }
            out.push(Piece::Space(chars[start..i].iter().collect()));
        } else if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if chars.get(i) == Some(&'.') && chars.get(i + 1).is_some_and(char::is_ascii_digit) {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            out.push(Piece::Number(chars[start..i].iter().collect()));
        } else if c.is_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Piece::Word(chars[start..i].iter().collect()));
        } else {
            out.push(Piece::Other(c));
            i += 1;
        }
    }
    out
}

fn join(pieces: &[Piece]) -> String {
    let mut s = String::new();
    for p in pieces {
        match p {
            Piece::Word(w) | Piece::Number(w) | Piece::Comment(w) | Piece::Space(w) => s.push_str(w),
            Piece::Other(c) => s.push(*c),
        }
    }
    s
}

/// Words that name variables: not keywords and not followed by `(`.
fn variable_names(pieces: &[Piece]) -> Vec<String> {
    let mut names = Vec::new();
    for (k, p) in pieces.iter().enumerate() {
        let Piece::Word(w) = p else { continue };
        if KEYWORDS.contains(&w.as_str()) {
            continue;
        }
        let next = pieces[k + 1..].iter().find(|p| !matches!(p, Piece::Space(_) | Piece::Comment(_)));
        if next == Some(&Piece::Other('(')) {
            continue;
        }
        if !names.contains(w) {
            names.push(w.clone());
        }
    }
    names
}

/// Renames every variable to a fresh random name, consistently.
pub fn rename_variables(src: &str, rng: &mut impl Rng) -> String {
    let mut pieces = scan(src);
    let names = variable_names(&pieces);
    let fresh: Vec<String> = (0..names.len())
        .map(|k| format!("v{}_{}", rng.gen_range(0..100_000), k))
        .collect();
    for p in &mut pieces {
        if let Piece::Word(w) = p {
            if let Some(k) = names.iter().position(|n| n == w) {
                *w = fresh[k].clone();
            }
        }
    }
    join(&pieces)
}

/// Rewrites whitespace runs, drops existing comments and sprinkles new ones.
pub fn reformat(src: &str, rng: &mut impl Rng) -> String {
    let pieces = scan(src);
    let mut out = Vec::new();
    for p in pieces {
        match p {
            Piece::Comment(_) => out.push(Piece::Space(" ".into())),
            Piece::Space(_) => {
                let s = match rng.gen_range(0..4) {
                    0 => " ".to_string(),
                    1 => "\n\t".to_string(),
                    2 => format!("  // note {}\n", rng.gen_range(0..1000)),
                    _ => "\n\n   ".to_string(),
                };
                out.push(Piece::Space(s));
            }
            Piece::Other(c) if matches!(c, ';' | '{' | '}' | ',') => {
                out.push(Piece::Other(c));
                if rng.gen_bool(0.3) {
                    out.push(Piece::Space("   \n".into()));
                }
            }
            other => out.push(other),
        }
    }
    join(&out)
}

/// Number of numeric literals in `src`.
pub fn count_literals(src: &str) -> usize {
    scan(src).iter().filter(|p| matches!(p, Piece::Number(_))).count()
}

/// Changes the `which`-th numeric literal to a different value.
pub fn mutate_literal(src: &str, which: usize, rng: &mut impl Rng) -> String {
    let mut pieces = scan(src);
    let mut seen = 0;
    for p in &mut pieces {
        if let Piece::Number(n) = p {
            if seen == which {
                let bump = rng.gen_range(1..10);
                *n = if n.contains('.') {
                    let v: f64 = n.parse().unwrap();
                    format!("{:.1}", v + bump as f64 / 10.0)
                } else {
                    let v: i64 = n.parse().unwrap();
                    (v + bump).to_string()
                };
                break;
            }
            seen += 1;
        }
    }
    join(&pieces)
}
