//! Cyclic words of angular sectors at ∞, their reduction and index formulas.
//!
//! String grammar:
//!
//! ```text
//! word    := letter*
//! letter  := "E" | "H" | "*" | "𝓔" | "P(" complex ")"
//! complex := real ("+" | "-") real "i"
//! ```
//!
//! Whitespace is ignored. `*` and `𝓔` both denote the entire sector.

mod reduce;
mod walk;

pub use reduce::{apply_redex, redexes, reduce};
pub use walk::word_at_infinity;

use crate::error::{ErdError, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

/// Rounding applied to parabolic displacements before comparison.
const NU_QUANTUM: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum Letter {
    H,
    E,
    Ent,
    Par(Complex64),
}

impl Letter {
    fn rank(&self) -> (u8, i64, i64) {
        match *self {
            Letter::E => (0, 0, 0),
            Letter::H => (1, 0, 0),
            Letter::Ent => (2, 0, 0),
            Letter::Par(nu) => (3, (nu.re / NU_QUANTUM).round() as i64, (nu.im / NU_QUANTUM).round() as i64),
        }
    }

    pub fn is_parabolic(&self) -> bool {
        matches!(self, Letter::Par(_))
    }
}

impl PartialEq for Letter {
    fn eq(&self, other: &Self) -> bool {
        self.rank() == other.rank()
    }
}

impl Eq for Letter {}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank().cmp(&other.rank())
    }
}

fn fmt_real(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Letter::H => write!(f, "H"),
            Letter::E => write!(f, "E"),
            Letter::Ent => write!(f, "*"),
            Letter::Par(nu) => {
                let sign = if nu.im < 0.0 || (nu.im == 0.0 && nu.im.is_sign_negative()) { '-' } else { '+' };
                write!(f, "P({}{}{}i)", fmt_real(nu.re), sign, fmt_real(nu.im.abs()))
            }
        }
    }
}

/// Letters up to cyclic rotation, with the residue carried as an attribute.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CyclicWord {
    pub letters: Vec<Letter>,
    pub residue: Complex64,
}

impl CyclicWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        CyclicWord { letters, residue: Complex64::new(0.0, 0.0) }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// (h, e, ε).
    pub fn counts(&self) -> (usize, usize, usize) {
        let c = |l: Letter| self.letters.iter().filter(|&&x| x == l).count();
        (c(Letter::H), c(Letter::E), c(Letter::Ent))
    }

    pub fn parabolic(&self) -> Vec<Complex64> {
        self.letters
            .iter()
            .filter_map(|l| match l {
                Letter::Par(nu) => Some(*nu),
                _ => None,
            })
            .collect()
    }

    /// Lexicographically least rotation.
    pub fn min_rotation(&self) -> Vec<Letter> {
        let n = self.letters.len();
        (0..n.max(1))
            .map(|r| self.letters.iter().cycle().skip(r).take(n).copied().collect::<Vec<_>>())
            .min()
            .unwrap_or_default()
    }

    pub fn cyclic_eq(&self, other: &CyclicWord) -> bool {
        self.letters.len() == other.letters.len() && self.min_rotation() == other.min_rotation()
    }

    /// Rendering with `𝓔` for entire sectors.
    pub fn to_unicode(&self) -> String {
        self.to_string().replace('*', "𝓔")
    }
}

impl PartialEq for CyclicWord {
    fn eq(&self, other: &Self) -> bool {
        self.cyclic_eq(other)
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

fn bad(pos: usize, msg: &str) -> ErdError {
    ErdError::InvalidInput(format!("word position {pos}: {msg}"))
}

fn parse_complex(s: &str, pos: usize) -> Result<Complex64> {
    let body = s.strip_suffix('i').ok_or_else(|| bad(pos, "displacement must end with 'i'"))?;
    let split = body
        .char_indices()
        .skip(1)
        .filter(|&(i, c)| (c == '+' || c == '-') && !matches!(body.as_bytes()[i - 1], b'e' | b'E'))
        .map(|(i, _)| i)
        .last()
        .ok_or_else(|| bad(pos, "displacement must look like a+bi"))?;
    let re: f64 = body[..split].parse().map_err(|_| bad(pos, "bad real part"))?;
    let im: f64 = body[split..].parse().map_err(|_| bad(pos, "bad imaginary part"))?;
    if !re.is_finite() || !im.is_finite() {
        return Err(bad(pos, "non-finite displacement"));
    }
    Ok(Complex64::new(re, im))
}

pub fn parse_word(s: &str) -> Result<CyclicWord> {
    let mut letters = Vec::new();
    let mut it = s.char_indices().peekable();
    while let Some((i, ch)) = it.next() {
        match ch {
            'E' => letters.push(Letter::E),
            'H' => letters.push(Letter::H),
            '*' | '𝓔' => letters.push(Letter::Ent),
            'P' => {
                if it.next().map(|x| x.1) != Some('(') {
                    return Err(bad(i, "expected '(' after P"));
                }
                let start = i + 2;
                let mut end = None;
                for (j, c) in it.by_ref() {
                    if c == ')' {
                        end = Some(j);
                        break;
                    }
                }
                let end = end.ok_or_else(|| bad(i, "unclosed P("))?;
                let nu = parse_complex(&s[start..end], i)?;
                if nu.im.abs() <= NU_QUANTUM * nu.norm().max(1.0) {
                    return Err(bad(i, "parabolic displacement must have nonzero imaginary part"));
                }
                letters.push(Letter::Par(nu));
            }
            c if c.is_whitespace() => {}
            c => return Err(bad(i, &format!("unexpected character '{c}'"))),
        }
    }
    Ok(CyclicWord::new(letters))
}

/// `2(μ+1)` hyperbolic sectors.
pub fn word_at_pole(mu: u32) -> CyclicWord {
    CyclicWord::new(vec![Letter::H; 2 * (mu as usize + 1)])
}

/// Twice the Poincaré–Hopf index, `2 + e − h + ε`, on the reduced word.
pub fn ph_index_doubled(w: &CyclicWord) -> i64 {
    let (h, e, ent) = reduce(w).counts();
    2 + e as i64 - h as i64 + ent as i64
}

/// `1 + (e − h + ε)/2` on the reduced word.
pub fn ph_index(w: &CyclicWord) -> f64 {
    ph_index_doubled(w) as f64 / 2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub reasons: Vec<String>,
}

/// Conditions for a word to arise at ∞ from a field with `deg P = r`, `deg E = d`.
pub fn admissible_for_erd(w: &CyclicWord, r: u32, d: usize) -> Admissibility {
    let red = reduce(w);
    let (h, e, ent) = red.counts();
    let mut reasons = Vec::new();
    if w.residue.norm() > 1e-9 {
        reasons.push(format!("residue {} is not 0", w.residue));
    }
    let ph2 = ph_index_doubled(w);
    if ph2 != 2 * (2 + r as i64) {
        reasons.push(format!("index {} differs from 2 + r = {}", ph2 as f64 / 2.0, 2 + r));
    }
    if ent != 2 * d {
        reasons.push(format!("{ent} entire sectors, expected 2d = {}", 2 * d));
    }
    if h as i64 - e as i64 != 2 * (d as i64 - r as i64 - 1) {
        reasons.push(format!("h − e = {} differs from 2(d − r − 1) = {}", h as i64 - e as i64, 2 * (d as i64 - r as i64 - 1)));
    }
    let sum: Complex64 = red.parabolic().iter().sum();
    if sum.norm() > 1e-6 * red.parabolic().iter().map(|z| z.norm()).sum::<f64>().max(1.0) {
        reasons.push(format!("parabolic displacements sum to {sum}"));
    }
    Admissibility { admissible: reasons.is_empty(), reasons }
}
