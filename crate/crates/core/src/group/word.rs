use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn gen(generator: usize) -> Self {
        Letter { generator, inverse: false }
    }

    pub fn inv(generator: usize) -> Self {
        Letter { generator, inverse: true }
    }

    pub fn inverted(self) -> Self {
        Letter { inverse: !self.inverse, ..self }
    }

    /// `+1` for a generator, `-1` for an inverse.
    pub fn sign(self) -> i64 {
        if self.inverse { -1 } else { 1 }
    }
}

/// A word over generators, read as the group product left to right.
pub type Word = Vec<Letter>;

pub fn free_reduce(word: &[Letter]) -> Word {
    let mut out: Word = Vec::with_capacity(word.len());
    for &l in word {
        if out.last() == Some(&l.inverted()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub fn inverse(word: &[Letter]) -> Word {
    word.iter().rev().map(|l| l.inverted()).collect()
}

/// Free and cyclic reduction: strips cancelling letters at the two ends.
pub fn cyclic_reduce(word: &[Letter]) -> Word {
    let mut w = free_reduce(word);
    while w.len() >= 2 && w[0] == w[w.len() - 1].inverted() {
        w.pop();
        w.remove(0);
    }
    w
}

pub fn concat(a: &[Letter], b: &[Letter]) -> Word {
    let mut w = a.to_vec();
    w.extend_from_slice(b);
    free_reduce(&w)
}

/// Exponent sum of each generator.
pub fn exponent_sums(word: &[Letter], rank: usize) -> Vec<i64> {
    let mut sums = vec![0; rank];
    for l in word {
        sums[l.generator] += l.sign();
    }
    sums
}

/// Parses a word such as `a b^-1 (ab)^3`, `a2`, or `abAB` over the declared
/// generator names. Juxtaposed names are matched greedily, an integer (with
/// optional `^`) after a name or parenthesised group is an exponent, and an
/// upper-case single letter means the inverse of its lower-case generator
/// when that upper-case name is not itself declared.
pub fn parse_word(text: &str, names: &[String]) -> Result<Word> {
    if let Some(w) = parse_tokens(text, names) {
        return Ok(w);
    }
    let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut pos = 0;
    let w = parse_sequence(&chars, &mut pos, names)?;
    if pos != chars.len() {
        return Err(invalid(format!("unexpected '{}' in word {text:?}", chars[pos])));
    }
    Ok(w)
}

/// Whitespace-separated `name` or `name^k` tokens, each naming a declared
/// generator exactly. Needed for names that contain digits.
fn parse_tokens(text: &str, names: &[String]) -> Option<Word> {
    let mut word = Word::new();
    for token in text.split_whitespace() {
        if token == "1" {
            continue;
        }
        let (name, exp) = match token.split_once('^') {
            Some((n, e)) => (n, e.parse::<i64>().ok()?),
            None => (token, 1),
        };
        let g = names.iter().position(|n| n == name)?;
        let letter = if exp < 0 { Letter::inv(g) } else { Letter::gen(g) };
        word.extend(std::iter::repeat_n(letter, exp.unsigned_abs() as usize));
    }
    Some(word)
}

fn parse_sequence(chars: &[char], pos: &mut usize, names: &[String]) -> Result<Word> {
    let mut word = Word::new();
    while *pos < chars.len() && chars[*pos] != ')' {
        let atom = if chars[*pos] == '(' {
            *pos += 1;
            let inner = parse_sequence(chars, pos, names)?;
            if *pos >= chars.len() || chars[*pos] != ')' {
                return Err(invalid("unbalanced parentheses in word"));
            }
            *pos += 1;
            inner
        } else {
            vec![parse_letter(chars, pos, names)?]
        };
        let exp = parse_exponent(chars, pos)?;
        let base = if exp < 0 { inverse(&atom) } else { atom };
        for _ in 0..exp.unsigned_abs() {
            word.extend_from_slice(&base);
        }
    }
    Ok(word)
}

fn parse_letter(chars: &[char], pos: &mut usize, names: &[String]) -> Result<Letter> {
    let rest: String = chars[*pos..].iter().collect();
    let best = names
        .iter()
        .enumerate()
        .filter(|(_, n)| !n.is_empty() && rest.starts_with(n.as_str()))
        .max_by_key(|(_, n)| n.len());
    if let Some((i, n)) = best {
        *pos += n.chars().count();
        return Ok(Letter::gen(i));
    }
    let c = chars[*pos];
    if c.is_uppercase() {
        let lower: String = c.to_lowercase().collect();
        if let Some(i) = names.iter().position(|n| *n == lower) {
            *pos += 1;
            return Ok(Letter::inv(i));
        }
    }
    Err(invalid(format!("unknown generator at {rest:?}")))
}

fn parse_exponent(chars: &[char], pos: &mut usize) -> Result<i64> {
    let start = *pos;
    if *pos < chars.len() && chars[*pos] == '^' {
        *pos += 1;
    }
    let num_start = *pos;
    if *pos < chars.len() && chars[*pos] == '-' {
        *pos += 1;
    }
    while *pos < chars.len() && chars[*pos].is_ascii_digit() {
        *pos += 1;
    }
    let digits: String = chars[num_start..*pos].iter().collect();
    if digits.is_empty() {
        if *pos != start {
            return Err(invalid("dangling '^' in word"));
        }
        return Ok(1);
    }
    digits.parse().map_err(|_| invalid(format!("bad exponent {digits:?}")))
}

/// Formats a word with run-length exponents, e.g. `a^2 b^-1`. The identity
/// is written `1`.
pub fn format_word(word: &[Letter], names: &[String]) -> String {
    if word.is_empty() {
        return "1".into();
    }
    let mut out = String::new();
    let mut i = 0;
    while i < word.len() {
        let l = word[i];
        let mut run = 0i64;
        while i < word.len() && word[i] == l {
            run += 1;
            i += 1;
        }
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(&names[l.generator]);
        let exp = run * l.sign();
        if exp != 1 {
            let _ = write!(out, "^{exp}");
        }
    }
    out
}
